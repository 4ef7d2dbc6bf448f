//! Suffix automaton over a binary text, used as a factor index: a word is a
//! factor of the text iff it can be read from the root.

#[derive(Debug, Clone, Copy)]
struct State {
    len: usize,
    link: Option<usize>,
    next: [Option<usize>; 2],
}

#[derive(Debug, Clone)]
pub struct FactorIndex {
    states: Vec<State>,
    text_len: usize,
}

impl FactorIndex {
    /// Builds the index of `text`, whose letters must be 0 or 1.
    pub fn new(text: &[u8]) -> FactorIndex {
        let mut states = Vec::with_capacity(2 * text.len() + 1);
        states.push(State {
            len: 0,
            link: None,
            next: [None, None],
        });
        let mut last = 0;
        for &x in text {
            let x = x as usize;
            let cur = states.len();
            states.push(State {
                len: states[last].len + 1,
                link: None,
                next: [None, None],
            });
            let mut p = Some(last);
            while let Some(q) = p {
                if states[q].next[x].is_some() {
                    break;
                }
                states[q].next[x] = Some(cur);
                p = states[q].link;
            }
            match p {
                None => states[cur].link = Some(0),
                Some(p) => {
                    let q = states[p].next[x].expect("transition found above");
                    if states[p].len + 1 == states[q].len {
                        states[cur].link = Some(q);
                    } else {
                        let clone = states.len();
                        states.push(State {
                            len: states[p].len + 1,
                            ..states[q]
                        });
                        let mut r = Some(p);
                        while let Some(s) = r {
                            if states[s].next[x] != Some(q) {
                                break;
                            }
                            states[s].next[x] = Some(clone);
                            r = states[s].link;
                        }
                        states[q].link = Some(clone);
                        states[cur].link = Some(clone);
                    }
                }
            }
            last = cur;
        }
        FactorIndex {
            states,
            text_len: text.len(),
        }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn text_len(&self) -> usize {
        self.text_len
    }

    pub fn step(&self, state: usize, letter: u8) -> Option<usize> {
        self.states[state].next[letter as usize]
    }

    /// Reads `word` from `state`.
    pub fn walk(&self, mut state: usize, word: &[u8]) -> Option<usize> {
        for &x in word {
            state = self.step(state, x)?;
        }
        Some(state)
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        self.walk(self.root(), word).is_some()
    }
}
