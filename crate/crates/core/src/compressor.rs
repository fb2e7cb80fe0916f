//! The lossy compression step.
//!
//! A window of `n` bytes slides over the input one byte at a time. Each
//! window is hashed; when `hash % c == 0` the window is replaced in the
//! digest by `alphabet[hash % alphabet.len()]`, otherwise it contributes
//! nothing. The digest is therefore about `1/c` of the input length, and an
//! edit in the input only disturbs the digest characters of the `n` windows
//! that cover it.

use std::fmt;

use thiserror::Error;

use crate::rolling_hash::{rabin_karp_windows, WindowHash, WindowHashes};

pub const DEFAULT_C: u64 = 101;
pub const DEFAULT_N: usize = 11;

/// Printable ASCII without `,` `"` `'` `\` and `` ` ``. 89 bytes, a prime,
/// so it is coprime with every `c`.
pub const DEFAULT_ALPHABET: &[u8] = b"!#$%&()*+-./0123456789:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ[]^_abcdefghijklmnopqrstuvwxyz{|}~";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("compression rate C must be positive")]
    BadC,
    #[error("neighborhood size N must be at least 2, got {0}")]
    BadN(usize),
    #[error("alphabet needs at least 2 bytes, got {0}")]
    AlphabetTooShort(usize),
    #[error("C={c} and alphabet length {len} are not coprime")]
    NotCoprime { c: u64, len: usize },
    #[error("alphabet byte 0x{0:02x} is not allowed (comma, double quote, whitespace and non-printable bytes are reserved)")]
    ForbiddenByte(u8),
    #[error("alphabet byte {:?} appears more than once", *.0 as char)]
    DuplicateAlphabetByte(u8),
}

fn is_allowed_alphabet_byte(b: u8) -> bool {
    b.is_ascii_graphic() && !matches!(b, b',' | b'"')
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Checks the compression parameters without building a [`Params`].
pub fn validate_params(c: u64, n: usize, alphabet: &[u8]) -> Result<(), ParamsError> {
    if c == 0 {
        return Err(ParamsError::BadC);
    }
    if n < 2 {
        return Err(ParamsError::BadN(n));
    }
    if alphabet.len() < 2 {
        return Err(ParamsError::AlphabetTooShort(alphabet.len()));
    }
    let mut seen = [false; 256];
    for &b in alphabet {
        if !is_allowed_alphabet_byte(b) {
            return Err(ParamsError::ForbiddenByte(b));
        }
        if std::mem::replace(&mut seen[b as usize], true) {
            return Err(ParamsError::DuplicateAlphabetByte(b));
        }
    }
    if gcd(c, alphabet.len() as u64) != 1 {
        return Err(ParamsError::NotCoprime {
            c,
            len: alphabet.len(),
        });
    }
    Ok(())
}

/// Validated compression parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    c: u64,
    n: usize,
    alphabet: Vec<u8>,
}

impl Params {
    pub fn new(c: u64, n: usize, alphabet: impl Into<Vec<u8>>) -> Result<Self, ParamsError> {
        let alphabet = alphabet.into();
        validate_params(c, n, &alphabet)?;
        Ok(Self { c, n, alphabet })
    }

    pub fn with_default_alphabet(c: u64, n: usize) -> Result<Self, ParamsError> {
        Self::new(c, n, DEFAULT_ALPHABET)
    }

    /// Nominal compression rate.
    pub fn c(&self) -> u64 {
        self.c
    }

    /// Neighborhood (window) size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }
}

impl Default for Params {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            n: DEFAULT_N,
            alphabet: DEFAULT_ALPHABET.to_vec(),
        }
    }
}

/// Output of the compressor: a short ASCII string over the alphabet.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Digest(String);

impl Digest {
    pub fn new(text: impl Into<String>) -> Self {
        Self(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Digest {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Every emitted digest byte together with the start offset of the window
/// that produced it.
pub fn emissions<'a>(input: &'a [u8], params: &'a Params) -> Emissions<'a> {
    Emissions {
        hashes: rabin_karp_windows(input, params.n).expect("validated params have n >= 2"),
        position: 0,
        params,
    }
}

pub struct Emissions<'a> {
    hashes: WindowHashes<'a, crate::rolling_hash::RabinKarp>,
    position: usize,
    params: &'a Params,
}

impl Iterator for Emissions<'_> {
    type Item = (usize, u8);

    fn next(&mut self) -> Option<(usize, u8)> {
        for hash in self.hashes.by_ref() {
            let start = self.position;
            self.position += 1;
            if hash % self.params.c == 0 {
                let alphabet = &self.params.alphabet;
                return Some((start, alphabet[(hash % alphabet.len() as u64) as usize]));
            }
        }
        None
    }
}

/// Compresses `input` into its digest. Inputs shorter than `n` give an
/// empty digest.
pub fn compress(input: &[u8], params: &Params) -> Digest {
    compress_with::<crate::rolling_hash::RabinKarp>(input, params)
}

/// [`compress`] with a caller-chosen window hash.
pub fn compress_with<H: WindowHash>(input: &[u8], params: &Params) -> Digest {
    let hashes = WindowHashes::<H>::new(input, params.n).expect("validated params have n >= 2");
    let len = params.alphabet.len() as u64;
    let text: String = hashes
        .filter(|h| h % params.c == 0)
        .map(|h| params.alphabet[(h % len) as usize] as char)
        .collect();
    Digest(text)
}

/// Expected digest length for an input of `input_len` bytes.
pub fn expected_digest_len(input_len: u64, c: u64, n: u64) -> f64 {
    (input_len + 1).saturating_sub(n) as f64 / c as f64
}

/// True when a digest is far off its expected `1/c` size, which happens on
/// repetitive input and on files barely longer than `n`.
pub fn is_low_confidence(digest_len: usize, input_len: u64, c: u64, n: u64) -> bool {
    let expected = expected_digest_len(input_len, c, n);
    let len = digest_len as f64;
    len < (expected / 8.0).max(4.0) || len > 8.0 * expected
}
