//! Python bindings: finite square roots and factorizations, the Ω subshift,
//! lazy square roots of infinite words, and the table drivers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sqrtmap::dynamics::{fibonacci_estimate, table1_experiment, truncate2, SearchBudget};
use sqrtmap::equation::{doubling_orbits, is_solution};
use sqrtmap::lazy::sqrt_stream;
use sqrtmap::squares::root_name;
use sqrtmap::{Block, BlockSeq, EndpointConvention, SLProduct, SquareAlphabet};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn letters(word: &str) -> PyResult<Vec<u8>> {
    word.bytes()
        .map(|c| match c {
            b'0' => Ok(0),
            b'1' => Ok(1),
            _ => Err(err(format!("{word:?} is not a word over {{0, 1}}"))),
        })
        .collect()
}

fn render(letters: &[u8]) -> String {
    letters.iter().map(|&x| char::from(b'0' + x)).collect()
}

fn convention(name: &str) -> PyResult<EndpointConvention> {
    match name {
        "left" => Ok(EndpointConvention::LeftClosed),
        "right" => Ok(EndpointConvention::RightClosed),
        other => Err(err(format!("convention must be 'left' or 'right', not {other:?}"))),
    }
}

/// Square root of a finite word in Π for the alphabet with parameters `a`, `b`.
#[pyfunction]
#[pyo3(signature = (word, a = 1, b = 0))]
fn sqrt(word: &str, a: usize, b: usize) -> PyResult<String> {
    let x = SquareAlphabet::new(a, b).map_err(err)?;
    x.sqrt_finite(&letters(word)?).map(|r| render(&r)).map_err(err)
}

/// Names of the minimal squares (`S1`, `S2`, ...) whose product is `word`.
#[pyfunction]
#[pyo3(signature = (word, a = 1, b = 0))]
fn factorize(word: &str, a: usize, b: usize) -> PyResult<Vec<String>> {
    let x = SquareAlphabet::new(a, b).map_err(err)?;
    let roots = x.factorize(&letters(word)?).map_err(err)?;
    Ok(roots.into_iter().map(root_name).collect())
}

/// Whether `word` solves X₁²···X_n² = (X₁···X_n)² with minimal squares as factors.
#[pyfunction]
#[pyo3(signature = (word, a = 1, b = 0))]
fn is_equation_solution(word: &str, a: usize, b: usize) -> PyResult<bool> {
    let x = SquareAlphabet::new(a, b).map_err(err)?;
    Ok(is_solution(&x, &letters(word)?).is_some())
}

/// Orbits of i ↦ 2i mod n, sorted by least element.
#[pyfunction]
fn orbits(n: usize) -> PyResult<Vec<Vec<usize>>> {
    Ok(doubling_orbits(n).map_err(err)?.orbits)
}

/// The closed-form step estimate for a Fibonacci size, truncated to two decimals.
#[pyfunction]
fn step_estimate(size: u64) -> PyResult<String> {
    fibonacci_estimate(size).map(truncate2).map_err(err)
}

/// `(size, n, reference, status)`.
type Table1Row = (usize, Option<usize>, Option<usize>, String);

/// Rows of the maximal step count experiment.
#[pyfunction]
#[pyo3(signature = (sizes, depth = None, convention = "left"))]
fn table1(py: Python<'_>, sizes: Vec<usize>, depth: Option<usize>, convention: &str) -> PyResult<Vec<Table1Row>> {
    let mut budget = SearchBudget::default();
    if let Some(d) = depth {
        budget.depth = d;
    }
    let conv = self::convention(convention)?;
    let rows = py.detach(|| table1_experiment(&sizes, &budget, conv)).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.size, r.n, r.paper_n, r.status.to_string()))
        .collect())
}

/// The subshift Ω generated by S and L.
#[pyclass(name = "Omega", frozen)]
struct PyOmega {
    inner: sqrtmap::Omega,
}

impl PyOmega {
    fn product(&self, word: &str, shift: usize) -> PyResult<SLProduct> {
        let named = |name: &str| match name {
            "gamma1" => Some(self.inner.big_gamma_blocks(1)),
            "gamma2" => Some(self.inner.big_gamma_blocks(2)),
            "s-omega" => Some(BlockSeq::constant(Block::S)),
            "l-omega" => Some(BlockSeq::constant(Block::L)),
            _ => None,
        };
        let blocks =
            |text: &str| -> PyResult<Vec<Block>> { text.chars().map(|c| Block::from_char(c).map_err(err)).collect() };
        let seq = match (named(word), word.split_once('+')) {
            (Some(seq), _) => seq,
            (None, Some((head, tail))) => {
                let tail = named(tail).ok_or_else(|| err(format!("unknown tail {tail:?}")))?;
                BlockSeq::prefixed(blocks(head)?, tail)
            }
            (None, None) if word.is_empty() => return Err(err("empty block word")),
            (None, None) => BlockSeq::periodic(blocks(word)?),
        };
        Ok(SLProduct::new(seq, shift))
    }
}

#[pymethods]
impl PyOmega {
    #[new]
    #[pyo3(signature = (a = 1, b = 0, c = 1, k = None, swapped = false, convention = "left"))]
    fn new(a: usize, b: usize, c: usize, k: Option<usize>, swapped: bool, convention: &str) -> PyResult<Self> {
        let mut params = sqrtmap::OmegaParams::new(a, b, c).map_err(err)?;
        if let Some(k) = k {
            params = params.with_k(k);
        }
        if swapped {
            params = params.with_seed(sqrtmap::Seed::Swapped);
        }
        let inner = sqrtmap::Omega::with_convention(params, self::convention(convention)?).map_err(err)?;
        Ok(PyOmega { inner })
    }

    /// Ω for the reversed Fibonacci word of the given length.
    #[staticmethod]
    fn fibonacci(size: usize) -> PyResult<Self> {
        Ok(PyOmega {
            inner: sqrtmap::Omega::fibonacci(size).map_err(err)?,
        })
    }

    #[getter]
    fn s(&self) -> String {
        self.inner.s().to_string()
    }

    #[getter]
    fn l(&self) -> String {
        self.inner.l().to_string()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    /// `(γ_j, γ̄_j)` as letter strings.
    fn gamma(&self, j: usize) -> (String, String) {
        let (g, gbar) = self.inner.gamma(j);
        (g.to_string(), gbar.to_string())
    }

    /// The first `n` letters of an infinite word: a block word (periodic, or
    /// `HEAD+TAIL`) or a name among gamma1, gamma2, s-omega, l-omega.
    #[pyo3(signature = (word, n, shift = 0))]
    fn prefix(&self, word: &str, n: usize, shift: usize) -> PyResult<String> {
        let mut w = self.inner.expand(&self.product(word, shift)?);
        w.prefix(n).map(|p| p.to_string()).map_err(err)
    }

    /// The first `n` letters of the square root of an infinite word.
    #[pyo3(signature = (word, n, shift = 0))]
    fn sqrt_prefix(&self, word: &str, n: usize, shift: usize) -> PyResult<String> {
        let src = self.inner.expand(&self.product(word, shift)?);
        let mut root = sqrt_stream(self.inner.alphabet(), src);
        root.prefix(n).map(|p| p.to_string()).map_err(err)
    }

    /// `(type, pi_prefix_len)` of the shifted product.
    #[pyo3(signature = (word, shift = 0))]
    fn classify(&self, word: &str, shift: usize) -> PyResult<(String, Option<usize>)> {
        let c = self.inner.classify_type(&self.product(word, shift)?);
        Ok((format!("{:?}", c.kind), c.pi_prefix_len))
    }

    /// σ applied to a finite block word.
    fn sigma(&self, blocks: &str) -> PyResult<String> {
        let blocks: Vec<Block> = blocks
            .chars()
            .map(|c| Block::from_char(c).map_err(err))
            .collect::<PyResult<_>>()?;
        Ok(self.inner.sigma(&blocks).to_string())
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!("Omega(a={}, b={}, c={}, |S|={})", p.a, p.b, p.c, self.inner.size())
    }
}

#[pymodule]
fn sqrtmap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(is_equation_solution, m)?)?;
    m.add_function(wrap_pyfunction!(orbits, m)?)?;
    m.add_function(wrap_pyfunction!(step_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_class::<PyOmega>()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_round_trip() {
        assert_eq!(render(&letters("0110").unwrap()), "0110");
    }

    #[test]
    fn finite_sqrt_without_interpreter() {
        assert_eq!(sqrt("0101001010", 1, 0).unwrap(), "01010");
    }
}
