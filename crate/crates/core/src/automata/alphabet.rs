//! Alphabets of letters over named Boolean signals.
//!
//! A letter is the set of variables that are true; it is stored as a bitmask
//! over the alphabet's (sorted) variable list, so an alphabet with `n`
//! variables has exactly `2^n` letters and letter index = bitmask.

use std::fmt;

use crate::error::{Error, Result};

use super::MAX_VARIABLES;

/// A letter: the subset of the alphabet's variables that are set to true,
/// encoded as a bitmask over variable indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    pub const EMPTY: Letter = Letter(0);

    pub fn contains(self, var_index: usize) -> bool {
        self.0 & (1 << var_index) != 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An ordered finite set of named Boolean signals. Variable names are kept
/// sorted so that letters are canonical across alphabets with the same
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    variables: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from variable names. Names are sorted and must be
    /// unique; at most [`MAX_VARIABLES`] variables are accepted.
    pub fn new<I, S>(variables: I) -> Result<Alphabet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vars: Vec<String> = variables.into_iter().map(Into::into).collect();
        vars.sort();
        for w in vars.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InputDomain(format!("duplicate variable '{}'", w[0])));
            }
        }
        if vars.len() > MAX_VARIABLES {
            return Err(Error::AlphabetTooLarge {
                vars: vars.len(),
                letters: 1u64 << vars.len(),
            });
        }
        Ok(Alphabet { variables: vars })
    }

    /// The empty alphabet; it has a single letter, the empty set.
    pub fn empty() -> Alphabet {
        Alphabet { variables: Vec::new() }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Number of letters, `2^|variables|`.
    pub fn len(&self) -> usize {
        1usize << self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        false // there is always at least the empty letter
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.binary_search_by(|v| v.as_str().cmp(name)).ok()
    }

    /// Iterates over all letters in index order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.len() as u32).map(Letter)
    }

    pub fn contains_letter(&self, letter: Letter) -> bool {
        letter.index() < self.len()
    }

    /// Builds a letter from the names of the variables that are true.
    pub fn letter<I, S>(&self, true_vars: I) -> Result<Letter>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut mask = 0u32;
        for v in true_vars {
            let idx = self.var_index(v.as_ref()).ok_or_else(|| {
                Error::InputDomain(format!("unknown variable '{}'", v.as_ref()))
            })?;
            mask |= 1 << idx;
        }
        Ok(Letter(mask))
    }

    /// The names of the true variables of `letter`, in alphabet order.
    pub fn letter_vars(&self, letter: Letter) -> Vec<&str> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(i, _)| letter.contains(*i))
            .map(|(_, v)| v.as_str())
            .collect()
    }

    /// Renders a letter as a full conjunction, e.g. `r1 & !r2`.
    pub fn format_letter(&self, letter: Letter) -> String {
        if self.variables.is_empty() {
            return "true".to_string();
        }
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| if letter.contains(i) { v.clone() } else { format!("!{v}") })
            .collect::<Vec<_>>()
            .join(" & ")
    }

    /// Renders a letter as the set of its true variables, e.g. `{r1,g2}`.
    pub fn format_letter_set(&self, letter: Letter) -> String {
        format!("{{{}}}", self.letter_vars(letter).join(","))
    }

    /// The union of two alphabets with disjoint variables.
    pub fn join(&self, other: &Alphabet) -> Result<Alphabet> {
        for v in &other.variables {
            if self.var_index(v).is_some() {
                return Err(Error::AlphabetMismatch(format!(
                    "variable '{v}' appears in both alphabets"
                )));
            }
        }
        let all: Vec<String> = self
            .variables
            .iter()
            .chain(other.variables.iter())
            .cloned()
            .collect();
        Alphabet::new(all)
    }

    /// True iff every variable of `self` appears in `other`.
    pub fn is_sub_alphabet_of(&self, other: &Alphabet) -> bool {
        self.variables.iter().all(|v| other.var_index(v).is_some())
    }

    /// Maps a letter of `self` into a super-alphabet `target`: the same
    /// variables are true, all variables private to `target` are false.
    pub fn embed_letter(&self, letter: Letter, target: &Alphabet) -> Result<Letter> {
        let mut mask = 0u32;
        for (i, v) in self.variables.iter().enumerate() {
            if letter.contains(i) {
                let j = target.var_index(v).ok_or_else(|| {
                    Error::AlphabetMismatch(format!("variable '{v}' missing from target alphabet"))
                })?;
                mask |= 1 << j;
            }
        }
        Ok(Letter(mask))
    }

    /// Projects a letter of `self` onto a sub-alphabet `target`, dropping
    /// variables not present there.
    pub fn project_letter(&self, letter: Letter, target: &Alphabet) -> Letter {
        let mut mask = 0u32;
        for (i, v) in self.variables.iter().enumerate() {
            if letter.contains(i) {
                if let Some(j) = target.var_index(v) {
                    mask |= 1 << j;
                }
            }
        }
        Letter(mask)
    }

    /// Combines a letter of `self` and a letter of `other` into a letter of
    /// the joint alphabet `joint` (which must contain both variable sets).
    pub fn combine_into(
        &self,
        letter: Letter,
        other: &Alphabet,
        other_letter: Letter,
        joint: &Alphabet,
    ) -> Result<Letter> {
        let a = self.embed_letter(letter, joint)?;
        let b = other.embed_letter(other_letter, joint)?;
        Ok(Letter(a.0 | b.0))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{{{}}}", self.variables.join(","))
    }
}
