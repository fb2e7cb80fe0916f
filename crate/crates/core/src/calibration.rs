//! Calibrating the expected overlap ratio `r`.
//!
//! Two unrelated texts of equal length `L` still share part of their
//! content by chance, so their Levenshtein distance is below `L`. The
//! overlap ratio is `1 - LD(ts1, ts2) / L`, averaged over several pairs of
//! test strings drawn independently from an alphabet model.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::levenshtein::levenshtein;

/// Shortest test string accepted by [`expected_overlap`].
pub const MIN_LENGTH: usize = 1000;
pub const DEFAULT_LENGTH: usize = 30_000;
pub const DEFAULT_RUNS: usize = 10;

/// Letters, digits and 21 punctuation marks.
pub const RANDOM_CHARS: &[u8] =
    b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789()[]+#_-!?%<>@.:;&/{}";

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("alphabet model has no elements")]
    EmptyModel,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("cannot read corpus {path}: {source}")]
    CorpusUnreadable { path: String, source: std::io::Error },
    #[error("{0} model needs a corpus")]
    MissingCorpus(ModelKind),
    #[error("test strings must be at least {MIN_LENGTH} bytes, got {0}")]
    LengthTooShort(usize),
    #[error("at least one run is required")]
    NoRuns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    RandomChars,
    CharFrequency,
    WordList,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::RandomChars => "random_chars",
            ModelKind::CharFrequency => "eng_chars",
            ModelKind::WordList => "eng_words",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" | "random_chars" => Ok(ModelKind::RandomChars),
            "chars" | "eng_chars" => Ok(ModelKind::CharFrequency),
            "words" | "eng_words" => Ok(ModelKind::WordList),
            other => Err(format!("unknown model kind {other:?} (expected random, chars or words)")),
        }
    }
}

/// Units that test strings are sampled from. Repeated elements weight the
/// draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphabetModel {
    kind: ModelKind,
    elements: Vec<Vec<u8>>,
}

impl AlphabetModel {
    pub fn new(kind: ModelKind, elements: Vec<Vec<u8>>) -> Result<Self, CalibrationError> {
        if elements.is_empty() || elements.iter().all(|e| e.is_empty()) {
            return Err(CalibrationError::EmptyModel);
        }
        Ok(Self { kind, elements })
    }

    /// The fixed 83-character set.
    pub fn random_chars() -> Self {
        Self {
            kind: ModelKind::RandomChars,
            elements: RANDOM_CHARS.iter().map(|&b| vec![b]).collect(),
        }
    }

    /// Every byte of the corpus except line breaks, drawn uniformly by
    /// position.
    pub fn char_frequency(corpus: &[u8]) -> Result<Self, CalibrationError> {
        let elements: Vec<Vec<u8>> = corpus
            .iter()
            .filter(|&&b| b != b'\n' && b != b'\r')
            .map(|&b| vec![b])
            .collect();
        if elements.is_empty() {
            return Err(CalibrationError::EmptyCorpus);
        }
        Ok(Self {
            kind: ModelKind::CharFrequency,
            elements,
        })
    }

    /// Whitespace-separated words of the corpus, drawn uniformly by position.
    pub fn word_list(corpus: &[u8]) -> Result<Self, CalibrationError> {
        let elements: Vec<Vec<u8>> = corpus
            .split(|b| b.is_ascii_whitespace())
            .filter(|w| !w.is_empty())
            .map(<[u8]>::to_vec)
            .collect();
        if elements.is_empty() {
            return Err(CalibrationError::EmptyCorpus);
        }
        Ok(Self {
            kind: ModelKind::WordList,
            elements,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn elements(&self) -> &[Vec<u8>] {
        &self.elements
    }

    /// A test string of exactly `length` bytes. Word models append a space
    /// after every word and truncate the last one.
    pub fn sample<R: Rng + ?Sized>(&self, length: usize, rng: &mut R) -> Vec<u8> {
        let mut out = Vec::with_capacity(length + 64);
        while out.len() < length {
            let unit = &self.elements[rng.random_range(0..self.elements.len())];
            out.extend_from_slice(unit);
            if self.kind == ModelKind::WordList {
                out.push(b' ');
            }
        }
        out.truncate(length);
        out
    }
}

/// Builds a model of the given kind. Only the random model works without a
/// corpus.
pub fn load_model(kind: ModelKind, corpus: Option<&Path>) -> Result<AlphabetModel, CalibrationError> {
    if kind == ModelKind::RandomChars {
        return Ok(AlphabetModel::random_chars());
    }
    let path = corpus.ok_or(CalibrationError::MissingCorpus(kind))?;
    let bytes = std::fs::read(path).map_err(|source| CalibrationError::CorpusUnreadable {
        path: path.display().to_string(),
        source,
    })?;
    match kind {
        ModelKind::CharFrequency => AlphabetModel::char_frequency(&bytes),
        ModelKind::WordList => AlphabetModel::word_list(&bytes),
        ModelKind::RandomChars => unreachable!(),
    }
}

/// Mean overlap ratio over `runs` pairs of independent test strings of
/// `length` bytes. Deterministic for a given seed.
pub fn expected_overlap(
    model: &AlphabetModel,
    length: usize,
    runs: usize,
    seed: u64,
) -> Result<f64, CalibrationError> {
    if length < MIN_LENGTH {
        return Err(CalibrationError::LengthTooShort(length));
    }
    if runs == 0 {
        return Err(CalibrationError::NoRuns);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..runs {
        let ts1 = model.sample(length, &mut rng);
        let ts2 = model.sample(length, &mut rng);
        total += overlap_ratio(&ts1, &ts2);
    }
    Ok(total / runs as f64)
}

/// `1 - LD(a, b) / |a|` for one pair of test strings.
pub fn overlap_ratio(a: &[u8], b: &[u8]) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / a.len() as f64
}
