//! Alphabets, finite words, and the one-sided shift.
//!
//! Finite words over `{0, …, N-1}` index cylinder sets of the space of
//! one-sided infinite sequences. A [`PathPrefix`] is the same data as a
//! [`Word`] but stands for "any infinite sequence extending these symbols";
//! operations that conceptually act on infinite sequences take prefixes and
//! account for the unseen tail elsewhere (see the density engine).
//!
//! All types here are immutable values and all operations are pure.

use std::fmt;

use thiserror::Error;

/// Default cap on exhaustive word enumeration (`N^k` words).
pub const DEFAULT_ENUM_CAP: usize = 1 << 20;

/// Largest alphabet that still renders as single base-N digits.
pub const MAX_ALPHABET: usize = 36;

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("alphabet must have at least 2 symbols, got {0}")]
    AlphabetTooSmall(usize),
    #[error("alphabet size {0} exceeds the supported maximum {MAX_ALPHABET}")]
    AlphabetTooLarge(usize),
    #[error("symbol {symbol} out of range for alphabet of {n_symbols} symbols")]
    SymbolOutOfRange { symbol: u8, n_symbols: usize },
    #[error("alphabet mismatch: {0} symbols vs {1} symbols")]
    AlphabetMismatch(usize, usize),
    #[error("cannot shift the empty word")]
    ShiftEmptyWord,
    #[error("truncation length {k} exceeds word length {len}")]
    TruncateOutOfRange { k: usize, len: usize },
    #[error("enumerating {required} words exceeds the cap of {cap}")]
    EnumerationCapExceeded { required: u128, cap: usize },
    #[error("invalid digit {0:?} for alphabet of {1} symbols")]
    InvalidDigit(char, usize),
    #[error("cannot periodically extend the empty word")]
    EmptyPeriod,
}

/// A finite alphabet `{0, …, N-1}`, `2 <= N <= 36`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    n_symbols: usize,
}

impl Alphabet {
    pub fn new(n_symbols: usize) -> Result<Self, SymbolicError> {
        if n_symbols < 2 {
            return Err(SymbolicError::AlphabetTooSmall(n_symbols));
        }
        if n_symbols > MAX_ALPHABET {
            return Err(SymbolicError::AlphabetTooLarge(n_symbols));
        }
        Ok(Alphabet { n_symbols })
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn symbols(&self) -> impl Iterator<Item = u8> {
        0..self.n_symbols as u8
    }

    fn check_symbol(&self, s: u8) -> Result<(), SymbolicError> {
        if (s as usize) < self.n_symbols {
            Ok(())
        } else {
            Err(SymbolicError::SymbolOutOfRange {
                symbol: s,
                n_symbols: self.n_symbols,
            })
        }
    }
}

/// A finite word over an alphabet. The empty word denotes the full space
/// when read as a cylinder.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    symbols: Vec<u8>,
}

/// First `k` letters of an infinite word; structurally identical to [`Word`].
pub type PathPrefix = Word;

impl Word {
    pub fn new(alphabet: Alphabet, symbols: Vec<u8>) -> Result<Self, SymbolicError> {
        for &s in &symbols {
            alphabet.check_symbol(s)?;
        }
        Ok(Word { alphabet, symbols })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word {
            alphabet,
            symbols: Vec::new(),
        }
    }

    /// Parses a base-N digit string, e.g. `"0121"` for N >= 3.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self, SymbolicError> {
        let mut symbols = Vec::with_capacity(text.len());
        for ch in text.chars() {
            let digit = DIGITS
                .iter()
                .position(|&d| d as char == ch.to_ascii_lowercase())
                .ok_or(SymbolicError::InvalidDigit(ch, alphabet.n_symbols()))?;
            if digit >= alphabet.n_symbols() {
                return Err(SymbolicError::InvalidDigit(ch, alphabet.n_symbols()));
            }
            symbols.push(digit as u8);
        }
        Ok(Word { alphabet, symbols })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// 1-based symbol access matching the usual index convention `x_1 x_2 …`.
    pub fn symbol(&self, k: usize) -> u8 {
        self.symbols[k - 1]
    }

    pub fn first(&self) -> Option<u8> {
        self.symbols.first().copied()
    }

    pub fn concat(&self, other: &Word) -> Result<Word, SymbolicError> {
        if self.alphabet != other.alphabet {
            return Err(SymbolicError::AlphabetMismatch(
                self.alphabet.n_symbols(),
                other.alphabet.n_symbols(),
            ));
        }
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.symbols);
        symbols.extend_from_slice(&other.symbols);
        Ok(Word {
            alphabet: self.alphabet,
            symbols,
        })
    }

    /// First `k` symbols.
    pub fn truncate(&self, k: usize) -> Result<Word, SymbolicError> {
        if k > self.len() {
            return Err(SymbolicError::TruncateOutOfRange { k, len: self.len() });
        }
        Ok(Word {
            alphabet: self.alphabet,
            symbols: self.symbols[..k].to_vec(),
        })
    }

    /// Drops the first symbol (the one-sided shift on words).
    pub fn shift(&self) -> Result<Word, SymbolicError> {
        if self.is_empty() {
            return Err(SymbolicError::ShiftEmptyWord);
        }
        Ok(Word {
            alphabet: self.alphabet,
            symbols: self.symbols[1..].to_vec(),
        })
    }

    /// Prepends `i`: the inverse branch of the shift selected by `i`.
    pub fn inverse_branch(&self, i: u8) -> Result<Word, SymbolicError> {
        self.alphabet.check_symbol(i)?;
        let mut symbols = Vec::with_capacity(self.len() + 1);
        symbols.push(i);
        symbols.extend_from_slice(&self.symbols);
        Ok(Word {
            alphabet: self.alphabet,
            symbols,
        })
    }

    pub fn has_prefix(&self, prefix: &Word) -> bool {
        self.alphabet == prefix.alphabet
            && prefix.len() <= self.len()
            && self.symbols[..prefix.len()] == prefix.symbols[..]
    }

    /// The word repeated cyclically until it has `len` symbols. Used as the
    /// canonical representative of the cylinder it indexes.
    pub fn periodic_extension(&self, len: usize) -> Result<Word, SymbolicError> {
        if self.is_empty() {
            return Err(SymbolicError::EmptyPeriod);
        }
        let symbols = self
            .symbols
            .iter()
            .cycle()
            .copied()
            .take(len.max(self.len()))
            .collect();
        Ok(Word {
            alphabet: self.alphabet,
            symbols,
        })
    }

    /// Rank of the word among all words of the same length, lexicographically.
    pub fn lex_index(&self) -> usize {
        let n = self.alphabet.n_symbols();
        self.symbols
            .iter()
            .fold(0usize, |acc, &s| acc * n + s as usize)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        for &s in &self.symbols {
            write!(f, "{}", DIGITS[s as usize] as char)?;
        }
        Ok(())
    }
}

/// All `N^k` words of length `k` in lexicographic order.
pub fn enumerate_words(alphabet: Alphabet, k: usize) -> Result<Vec<Word>, SymbolicError> {
    enumerate_words_with_cap(alphabet, k, DEFAULT_ENUM_CAP)
}

pub fn enumerate_words_with_cap(
    alphabet: Alphabet,
    k: usize,
    cap: usize,
) -> Result<Vec<Word>, SymbolicError> {
    let n = alphabet.n_symbols();
    let required = (n as u128).pow(k as u32);
    if required > cap as u128 {
        return Err(SymbolicError::EnumerationCapExceeded { required, cap });
    }
    let total = required as usize;
    let mut out = Vec::with_capacity(total);
    let mut current = vec![0u8; k];
    loop {
        out.push(Word {
            alphabet,
            symbols: current.clone(),
        });
        // increment base-N counter, most significant digit first
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if (current[pos] as usize) + 1 < n {
                current[pos] += 1;
                for digit in &mut current[pos + 1..] {
                    *digit = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab(n: usize) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn w(n: usize, text: &str) -> Word {
        Word::parse(ab(n), text).unwrap()
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w(2, "01").concat(&w(2, "10")).unwrap(), w(2, "0110"));
        assert_eq!(Word::empty(ab(3)).concat(&w(3, "2")).unwrap(), w(3, "2"));
        assert_eq!(w(2, "1").concat(&w(2, "1")).unwrap(), w(2, "11"));
    }

    #[test]
    fn concat_alphabet_mismatch() {
        let err = w(2, "01").concat(&w(3, "2")).unwrap_err();
        assert_eq!(err, SymbolicError::AlphabetMismatch(2, 3));
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(w(2, "0110").truncate(2).unwrap(), w(2, "01"));
        assert_eq!(w(2, "0110").truncate(0).unwrap(), Word::empty(ab(2)));
        assert_eq!(w(2, "0110").truncate(4).unwrap(), w(2, "0110"));
        assert!(matches!(
            w(2, "0110").truncate(5),
            Err(SymbolicError::TruncateOutOfRange { k: 5, len: 4 })
        ));
    }

    #[test]
    fn shift_and_inverse_branch() {
        assert_eq!(w(3, "210").shift().unwrap(), w(3, "10"));
        assert_eq!(w(3, "10").inverse_branch(2).unwrap(), w(3, "210"));
        assert_eq!(
            Word::empty(ab(2)).shift().unwrap_err(),
            SymbolicError::ShiftEmptyWord
        );
    }

    #[test]
    fn enumerate_small() {
        let words = enumerate_words(ab(2), 2).unwrap();
        let rendered: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(rendered, vec!["00", "01", "10", "11"]);

        let words = enumerate_words(ab(3), 0).unwrap();
        assert_eq!(words, vec![Word::empty(ab(3))]);

        let words = enumerate_words(ab(2), 3).unwrap();
        assert_eq!(words.len(), 8);
        assert_eq!(words[0], w(2, "000"));
        assert_eq!(words[7], w(2, "111"));
    }

    #[test]
    fn enumerate_cap() {
        let err = enumerate_words_with_cap(ab(2), 11, 1024).unwrap_err();
        assert_eq!(
            err,
            SymbolicError::EnumerationCapExceeded {
                required: 2048,
                cap: 1024
            }
        );
    }

    #[test]
    fn parse_display_roundtrip() {
        let word = w(12, "0ab1");
        assert_eq!(word.to_string(), "0ab1");
        assert_eq!(word.symbols(), &[0, 10, 11, 1]);
    }

    #[test]
    fn periodic_extension_cycles() {
        let word = w(2, "01");
        assert_eq!(word.periodic_extension(5).unwrap(), w(2, "01010"));
        assert_eq!(word.periodic_extension(1).unwrap(), w(2, "01"));
        assert!(Word::empty(ab(2)).periodic_extension(3).is_err());
    }

    #[test]
    fn lex_index_matches_enumeration() {
        for (idx, word) in enumerate_words(ab(3), 4).unwrap().iter().enumerate() {
            assert_eq!(word.lex_index(), idx);
        }
    }

    fn word_strategy(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0..n as u8, 0..=max_len)
            .prop_map(move |symbols| Word::new(ab(n), symbols).unwrap())
    }

    proptest! {
        #[test]
        fn concat_associative_with_identity(
            a in word_strategy(3, 6),
            b in word_strategy(3, 6),
            c in word_strategy(3, 6),
        ) {
            let left = a.concat(&b).unwrap().concat(&c).unwrap();
            let right = a.concat(&b.concat(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let e = Word::empty(ab(3));
            prop_assert_eq!(e.concat(&a).unwrap(), a.clone());
            prop_assert_eq!(a.concat(&e).unwrap(), a);
        }

        #[test]
        fn shift_undoes_inverse_branch(word in word_strategy(4, 8), i in 0u8..4) {
            let branched = word.inverse_branch(i).unwrap();
            prop_assert_eq!(branched.shift().unwrap(), word);
            prop_assert_eq!(branched.first(), Some(i));
        }

        #[test]
        fn enumeration_has_no_duplicates(k in 0usize..6) {
            let words = enumerate_words(ab(2), k).unwrap();
            prop_assert_eq!(words.len(), 1 << k);
            let mut sorted = words.clone();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), words.len());
        }
    }
}
