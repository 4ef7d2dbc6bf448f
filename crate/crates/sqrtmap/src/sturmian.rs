//! Continued fractions, standard words and codings of rational rotations.
//!
//! All arithmetic is exact. Circle points are [`BigRational`] values in
//! `[0, 1)`. A rotation system of slope `p/q` has exactly `q` distinct codings,
//! one for each intercept `j/q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{swap_first_two, Word};

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
    let q: BigInt = q
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
    if q.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(p, q))
}

/// Fractional part `{x}`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// A finite continued fraction `[a0; a1, ..., an]`, kept in canonical form
/// (the last quotient is at least 2 unless the expansion has a single term).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContinuedFraction {
    a0: i64,
    quotients: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(a0: i64, quotients: Vec<u64>) -> Result<ContinuedFraction> {
        if quotients.contains(&0) {
            return Err(Error::InvalidParams("partial quotients must be positive".into()));
        }
        let mut cf = ContinuedFraction { a0, quotients };
        cf.normalize();
        Ok(cf)
    }

    fn normalize(&mut self) {
        while self.quotients.last() == Some(&1) {
            self.quotients.pop();
            match self.quotients.last_mut() {
                Some(last) => *last += 1,
                None => self.a0 += 1,
            }
        }
    }

    pub fn from_rational(x: &BigRational) -> ContinuedFraction {
        let a0 = x.floor();
        let mut rest = x - &a0;
        let mut quotients = Vec::new();
        while !rest.is_zero() {
            let inv = rest.recip();
            let a = inv.floor();
            quotients.push(a.to_integer().to_u64().expect("partial quotient fits in u64"));
            rest = inv - a;
        }
        let mut cf = ContinuedFraction {
            a0: a0.to_integer().to_i64().expect("integer part fits in i64"),
            quotients,
        };
        cf.normalize();
        cf
    }

    pub fn a0(&self) -> i64 {
        self.a0
    }

    /// `a_1, a_2, ...`
    pub fn partial_quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// `a_i` for `i >= 0`.
    pub fn quotient(&self, i: usize) -> Option<i64> {
        if i == 0 {
            Some(self.a0)
        } else {
            self.quotients.get(i - 1).map(|&a| a as i64)
        }
    }

    /// Index of the last quotient.
    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    pub fn value(&self) -> BigRational {
        self.convergents(self.depth()).pop().expect("at least one convergent")
    }

    /// `p_i/q_i` for `0 <= i <= k`.
    pub fn convergents(&self, k: usize) -> Vec<BigRational> {
        let (ps, qs) = self.recurrence(k);
        ps.into_iter().zip(qs).map(|(p, q)| BigRational::new(p, q)).collect()
    }

    /// Numerators and denominators `p_i`, `q_i` for `0 <= i <= k`.
    fn recurrence(&self, k: usize) -> (Vec<BigInt>, Vec<BigInt>) {
        assert!(k <= self.depth(), "convergent index {k} beyond depth {}", self.depth());
        let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        let mut ps = Vec::with_capacity(k + 1);
        let mut qs = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let a = BigInt::from(self.quotient(i).expect("index checked"));
            let p = &a * &p1 + &p2;
            let q = &a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p.clone());
            q2 = std::mem::replace(&mut q1, q.clone());
            ps.push(p);
            qs.push(q);
        }
        (ps, qs)
    }

    /// `(l p_{k-1} + p_{k-2}) / (l q_{k-1} + q_{k-2})` for `1 <= l < a_k`.
    pub fn semiconvergents(&self, k: usize) -> Result<Vec<BigRational>> {
        if k < 2 || k > self.depth() {
            return Err(Error::Precondition(format!(
                "semiconvergent index must satisfy 2 <= k <= {}",
                self.depth()
            )));
        }
        let (ps, qs) = self.recurrence(k - 1);
        let ak = self.quotient(k).expect("index checked");
        Ok((1..ak)
            .map(|l| {
                let l = BigInt::from(l);
                BigRational::new(&l * &ps[k - 1] + &ps[k - 2], &l * &qs[k - 1] + &qs[k - 2])
            })
            .collect())
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.a0)?;
        for (i, a) in self.quotients.iter().enumerate() {
            write!(f, "{}{a}", if i == 0 { ";" } else { "," })?;
        }
        write!(f, "]")
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;
    fn from_str(text: &str) -> Result<ContinuedFraction> {
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [a0;a1,...], got {text:?}")))?;
        let (head, tail) = match inner.split_once(';') {
            Some((h, t)) => (h, t),
            None => (inner, ""),
        };
        let a0 = head
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer part in {text:?}")))?;
        let quotients = tail
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad partial quotient {t:?}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        ContinuedFraction::new(a0, quotients)
    }
}

/// Standard word `s_k` from `s_{-1} = 1`, `s_0 = 0`, `s_k = s_{k-1}^{d_k} s_{k-2}`.
/// `d[0]` is `d_1`.
pub fn standard_word(d: &[u64], k: i64) -> Result<Word> {
    if k < -1 {
        return Err(Error::Precondition("standard word index must be >= -1".into()));
    }
    if k == -1 {
        return Ok(Word::binary(vec![1]));
    }
    if (k as usize) > d.len() {
        return Err(Error::Precondition(format!(
            "need {k} directive terms, only {} given",
            d.len()
        )));
    }
    let mut older = vec![1u8];
    let mut newer = vec![0u8];
    for &dk in &d[..k as usize] {
        if dk == 0 {
            return Err(Error::InvalidParams("directive terms must be positive".into()));
        }
        let mut next = newer.repeat(dk as usize);
        next.extend_from_slice(&older);
        older = std::mem::replace(&mut newer, next);
    }
    Ok(Word::binary(newer))
}

pub fn reversed_standard_word(d: &[u64], k: i64) -> Result<Word> {
    Ok(standard_word(d, k)?.reversed())
}

/// `L(s̄_k)`.
pub fn swapped_reversed_standard_word(d: &[u64], k: i64) -> Result<Word> {
    swap_first_two(&reversed_standard_word(d, k)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum EndpointConvention {
    /// `I0 = [0, 1-a)`, `I1 = [1-a, 1)`.
    #[default]
    LeftClosed,
    /// `I0 = (0, 1-a]`, `I1 = (1-a, 1]`.
    RightClosed,
}

impl EndpointConvention {
    pub fn other(self) -> EndpointConvention {
        match self {
            EndpointConvention::LeftClosed => EndpointConvention::RightClosed,
            EndpointConvention::RightClosed => EndpointConvention::LeftClosed,
        }
    }
}

impl fmt::Display for EndpointConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndpointConvention::LeftClosed => "left",
            EndpointConvention::RightClosed => "right",
        })
    }
}

/// An arc of the circle `[0, 1)`. Its endpoint membership follows the
/// convention of the system that produced it: `[start, end)` for left-closed,
/// `(start, end]` for right-closed (with `1` identified with `0`).
///
/// Cut points of factor intervals always include `0`, so arcs never wrap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arc {
    pub start: BigRational,
    pub end: BigRational,
    pub convention: EndpointConvention,
}

impl Arc {
    pub fn length(&self) -> BigRational {
        &self.end - &self.start
    }

    pub fn contains(&self, rho: &BigRational) -> bool {
        match self.convention {
            EndpointConvention::LeftClosed => &self.start <= rho && rho < &self.end,
            EndpointConvention::RightClosed => {
                (&self.start < rho && rho <= &self.end) || (rho.is_zero() && self.end.is_one())
            }
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.convention {
            EndpointConvention::LeftClosed => write!(f, "[{}, {})", self.start, self.end),
            EndpointConvention::RightClosed => write!(f, "({}, {}]", self.start, self.end),
        }
    }
}

/// Rotation by a rational slope with a two-interval partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSystem {
    slope: BigRational,
    convention: EndpointConvention,
}

impl RotationSystem {
    pub fn new(slope: BigRational, convention: EndpointConvention) -> Result<RotationSystem> {
        if !slope.is_positive() || slope >= BigRational::one() {
            return Err(Error::InvalidParams(format!("slope {slope} not in (0,1)")));
        }
        let cf = ContinuedFraction::from_rational(&slope);
        if cf.depth() < 3 {
            return Err(Error::InvalidParams(format!(
                "slope {slope} = {cf} needs at least three partial quotients"
            )));
        }
        if cf.quotient(1) < Some(2) {
            return Err(Error::InvalidParams(format!("slope {slope} needs a1 >= 2")));
        }
        Ok(RotationSystem { slope, convention })
    }

    pub fn slope(&self) -> &BigRational {
        &self.slope
    }

    pub fn convention(&self) -> EndpointConvention {
        self.convention
    }

    pub fn with_convention(&self, convention: EndpointConvention) -> RotationSystem {
        RotationSystem {
            slope: self.slope.clone(),
            convention,
        }
    }

    /// Denominator `q` of the slope.
    pub fn period(&self) -> usize {
        self.slope.denom().to_usize().expect("denominator fits in usize")
    }

    /// The shared endpoint `1 - a` of `I0` and `I1`.
    pub fn pivot(&self) -> BigRational {
        BigRational::one() - &self.slope
    }

    /// ν(ρ): the letter coding the point `rho`.
    pub fn letter(&self, rho: &BigRational) -> u8 {
        let pivot = self.pivot();
        match self.convention {
            EndpointConvention::LeftClosed => u8::from(rho >= &pivot),
            EndpointConvention::RightClosed => u8::from(rho.is_zero() || rho > &pivot),
        }
    }

    pub fn rotate(&self, rho: &BigRational) -> BigRational {
        frac(&(rho + &self.slope))
    }

    pub fn coding(&self, rho: &BigRational, n: usize) -> Word {
        let mut point = frac(rho);
        let mut letters = Vec::with_capacity(n);
        for _ in 0..n {
            letters.push(self.letter(&point));
            point = self.rotate(&point);
        }
        Word::binary(letters)
    }

    /// The level-`n` intervals in circle order, each with its length-`n` factor.
    pub fn level_intervals(&self, n: usize) -> Vec<(Arc, Word)> {
        let mut cuts: Vec<BigRational> = (0..=n).map(|j| frac(&(-(&self.slope) * BigInt::from(j)))).collect();
        cuts.sort();
        cuts.dedup();
        cuts.push(BigRational::one());
        let two = BigRational::from_integer(BigInt::from(2));
        cuts.windows(2)
            .map(|pair| {
                let mid = (&pair[0] + &pair[1]) / &two;
                let arc = Arc {
                    start: pair[0].clone(),
                    end: pair[1].clone(),
                    convention: self.convention,
                };
                (arc, self.coding(&mid, n))
            })
            .collect()
    }

    /// `[w]`: the arc of intercepts whose coding begins with `w`.
    pub fn factor_interval(&self, w: &Word) -> Option<Arc> {
        self.level_intervals(w.len())
            .into_iter()
            .find(|(_, factor)| factor == w)
            .map(|(arc, _)| arc)
    }

    /// Checks that circle order of the level-`n` intervals is lexicographic order.
    pub fn verify_lex_interval_order(&self, n: usize) -> bool {
        self.level_intervals(n)
            .windows(2)
            .all(|pair| pair[0].1.letters() < pair[1].1.letters())
    }

    /// ψ(ρ) = (ρ + 1 - a)/2, with the endpoint case at `ρ = 0`.
    pub fn psi(&self, rho: &BigRational) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        if rho.is_zero() && self.convention == EndpointConvention::RightClosed {
            BigRational::one() - &self.slope / &two
        } else {
            (rho + self.pivot()) / &two
        }
    }

    /// The canonical intercept `j/q` whose coding starts with the period word `period`.
    pub fn intercept_of_periodic(&self, period: &Word) -> Option<BigRational> {
        let q = self.period();
        if period.len() != q {
            return None;
        }
        (0..q)
            .map(|j| BigRational::new(BigInt::from(j), BigInt::from(q)))
            .find(|rho| &self.coding(rho, q) == period)
    }

    /// Distance from `rho` to the pivot, measured inside the interval holding `rho`.
    pub fn distance_to_pivot(&self, rho: &BigRational) -> BigRational {
        let pivot = self.pivot();
        if self.letter(rho) == 0 {
            &pivot - rho
        } else if rho.is_zero() {
            self.slope.clone()
        } else {
            rho - &pivot
        }
    }
}

/// `log2` of a positive rational, exact enough for two-decimal display.
pub fn log2_rational(x: &BigRational) -> f64 {
    let (n, d) = (x.numer(), x.denom());
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift >= 0 {
        BigRational::new(n.clone(), d.clone() << (shift as usize))
    } else {
        BigRational::new(n.clone() << ((-shift) as usize), d.clone())
    };
    shift as f64 + scaled.to_f64().expect("scaled into [1/2, 2)").log2()
}
