//! Conjunction-of-literals guards, the label syntax of the text formats.
//!
//! A guard like `r1 & !g2` matches every letter that sets `r1` and clears
//! `g2`; variables not mentioned are unconstrained. `true` (or the empty
//! string) matches every letter.

use std::fmt;

use crate::error::{Error, Result};

use super::{Alphabet, Letter};

/// A conjunction of positive and negated variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    pos: u32,
    neg: u32,
}

impl Guard {
    pub const TRUE: Guard = Guard { pos: 0, neg: 0 };

    /// Parses a conjunction of literals over `alphabet`. Accepted literal
    /// separators are `&` and `&&`; negation is `!` or `~`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Guard> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "true" || trimmed == "1" {
            return Ok(Guard::TRUE);
        }
        let mut pos = 0u32;
        let mut neg = 0u32;
        for raw in trimmed.split('&') {
            let lit = raw.trim();
            if lit.is_empty() {
                continue; // tolerate `&&`
            }
            let (negated, name) = match lit.strip_prefix(['!', '~']) {
                Some(rest) => (true, rest.trim()),
                None => (false, lit),
            };
            let idx = alphabet
                .var_index(name)
                .ok_or_else(|| Error::InputDomain(format!("unknown variable '{name}' in guard '{text}'")))?;
            let bit = 1u32 << idx;
            if negated {
                neg |= bit;
            } else {
                pos |= bit;
            }
            if pos & neg != 0 {
                return Err(Error::InputDomain(format!(
                    "contradictory literal for '{name}' in guard '{text}'"
                )));
            }
        }
        Ok(Guard { pos, neg })
    }

    /// Builds a guard that matches exactly one letter.
    pub fn exactly(letter: Letter, alphabet: &Alphabet) -> Guard {
        let all = (alphabet.len() - 1) as u32;
        Guard { pos: letter.0, neg: all & !letter.0 }
    }

    pub fn matches(&self, letter: Letter) -> bool {
        letter.0 & self.pos == self.pos && letter.0 & self.neg == 0
    }

    /// All letters of `alphabet` matched by this guard, in index order.
    pub fn expand(&self, alphabet: &Alphabet) -> Vec<Letter> {
        alphabet.letters().filter(|l| self.matches(*l)).collect()
    }

    /// True iff the guard determines every variable of `alphabet`, i.e. it
    /// matches exactly one letter.
    pub fn is_total_assignment(&self, alphabet: &Alphabet) -> bool {
        let all = (alphabet.len() - 1) as u32;
        (self.pos | self.neg) == all
    }

    /// Renders the guard over `alphabet`, mentioning only constrained
    /// variables.
    pub fn format(&self, alphabet: &Alphabet) -> String {
        if self.pos == 0 && self.neg == 0 {
            return "true".to_string();
        }
        let mut parts = Vec::new();
        for (i, v) in alphabet.variables().iter().enumerate() {
            let bit = 1u32 << i;
            if self.pos & bit != 0 {
                parts.push(v.clone());
            } else if self.neg & bit != 0 {
                parts.push(format!("!{v}"));
            }
        }
        parts.join(" & ")
    }
}

// Display without an alphabet only shows raw masks; used in debug paths.
impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "guard(pos={:#b}, neg={:#b})", self.pos, self.neg)
    }
}
