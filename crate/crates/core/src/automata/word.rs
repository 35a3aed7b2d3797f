//! Finite words and lasso-shaped infinite words.

use crate::error::{Error, Result};

use super::{Alphabet, Letter};

/// A finite sequence of letters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word { letters }
    }

    pub fn empty() -> Word {
        Word { letters: Vec::new() }
    }

    /// Builds a word over `alphabet` from per-position lists of true
    /// variables.
    pub fn from_sets<I, J, S>(alphabet: &Alphabet, sets: I) -> Result<Word>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let letters = sets
            .into_iter()
            .map(|s| alphabet.letter(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Checks every letter lies in `alphabet`.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        for (i, l) in self.letters.iter().enumerate() {
            if !alphabet.contains_letter(*l) {
                return Err(Error::InputDomain(format!(
                    "letter at position {i} is outside the alphabet {alphabet}"
                )));
            }
        }
        Ok(())
    }
}

/// An ultimately periodic infinite word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    /// The cycle must be nonempty.
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Lasso> {
        if cycle.is_empty() {
            return Err(Error::InputDomain("lasso cycle must be nonempty".into()));
        }
        Ok(Lasso { prefix, cycle })
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        Word { letters: self.prefix.clone() }.check_alphabet(alphabet)?;
        Word { letters: self.cycle.clone() }.check_alphabet(alphabet)
    }

    /// The finite word `prefix · cycle^k`.
    pub fn unroll(&self, k: usize) -> Word {
        let mut letters = self.prefix.clone();
        for _ in 0..k {
            letters.extend_from_slice(&self.cycle);
        }
        Word { letters }
    }
}
