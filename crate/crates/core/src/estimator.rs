//! Estimating the Levenshtein distance of two documents from their
//! signatures, plus the significance score used to filter related pairs.
//!
//! With `A` the longer document:
//!
//! ```text
//! dig_diff       = |dig_A| - |dig_B|
//! effective_c    = (|A| + |B|) / (|dig_A| + |dig_B|)
//! dig_ld         = LD(dig_A, dig_B)
//! scaled_dig_ld  = (dig_ld - dig_diff) * effective_c / (1 + r)
//! file_len_diff  = |A| - |B|
//! eld            = round(scaled_dig_ld + file_len_diff)
//! ```
//!
//! `r` is the expected overlap ratio of two unrelated texts (see
//! [`crate::calibration`]).

use thiserror::Error;

use crate::levenshtein::levenshtein;
use crate::signature::{compatible, Signature};

/// Overlap ratio for random printable characters.
pub const R_RANDOM: f64 = 0.0417;
/// Overlap ratio for English text sampled character by character.
pub const R_CHARS: f64 = 0.1593;
/// Overlap ratio for English text sampled word by word.
pub const R_WORDS: f64 = 0.1902;

pub const DEFAULT_R: f64 = R_WORDS;
pub const DEFAULT_MAX_RATIO: f64 = 10.0;

/// Expected overlap ratios for the three alphabet models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapRatios {
    pub r_random: f64,
    pub r_chars: f64,
    pub r_words: f64,
}

impl Default for OverlapRatios {
    fn default() -> Self {
        Self {
            r_random: R_RANDOM,
            r_chars: R_CHARS,
            r_words: R_WORDS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("signatures were generated with different parameters (C={c_a}, N={n_a} vs C={c_b}, N={n_b})")]
    IncompatibleParams { c_a: u64, n_a: u64, c_b: u64, n_b: u64 },
    #[error("both digests are empty; compare the original files directly")]
    EmptyDigests,
    #[error("error rate undefined for two empty documents")]
    ZeroLength,
}

/// Significance of a digest pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Significance {
    Score(f64),
    /// The longer digest exceeds `max_ratio` times the shorter one.
    RatioExceeded,
    /// The shorter digest is empty.
    EmptyDigest,
}

impl Significance {
    /// The score, with not-applicable pairs counting as 0.
    pub fn value(&self) -> f64 {
        match self {
            Significance::Score(s) => *s,
            _ => 0.0,
        }
    }

    pub fn score(&self) -> Option<f64> {
        match self {
            Significance::Score(s) => Some(*s),
            _ => None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        matches!(self, Significance::Score(_))
    }
}

/// δ = (len_A - ld) / len_B with `len_A >= len_B`; argument order does not
/// matter.
pub fn significance(dig_len_a: usize, dig_len_b: usize, dig_ld: usize, max_ratio: f64) -> Significance {
    let (long, short) = if dig_len_a >= dig_len_b {
        (dig_len_a, dig_len_b)
    } else {
        (dig_len_b, dig_len_a)
    };
    if short == 0 {
        return Significance::EmptyDigest;
    }
    if long as f64 > max_ratio * short as f64 {
        return Significance::RatioExceeded;
    }
    // ld >= long - short, so the numerator never exceeds `short`.
    Significance::Score((long as f64 - dig_ld as f64) / short as f64)
}

/// Error rate of an estimate relative to the longer document.
pub fn error_rate(ld: u64, eld: u64, len_a: u64, len_b: u64) -> Result<f64, EstimateError> {
    let longest = len_a.max(len_b);
    if longest == 0 {
        return Err(EstimateError::ZeroLength);
    }
    Ok(ld.abs_diff(eld) as f64 / longest as f64)
}

/// All terms of one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub eld: u64,
    pub dig_ld: usize,
    pub dig_diff: usize,
    pub effective_c: f64,
    pub scaled_dig_ld: f64,
    pub file_length_diff: u64,
    pub delta: Significance,
    pub low_confidence: bool,
}

/// Estimation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimator {
    /// Expected overlap ratio.
    pub r: f64,
    /// Size-ratio guard for the significance score.
    pub max_ratio: f64,
}

impl Default for Estimator {
    fn default() -> Self {
        Self {
            r: DEFAULT_R,
            max_ratio: DEFAULT_MAX_RATIO,
        }
    }
}

impl Estimator {
    pub fn new(r: f64, max_ratio: f64) -> Self {
        Self { r, max_ratio }
    }

    pub fn estimate(&self, a: &Signature, b: &Signature) -> Result<EstimateResult, EstimateError> {
        if !compatible(a, b) {
            return Err(EstimateError::IncompatibleParams {
                c_a: a.c(),
                n_a: a.n(),
                c_b: b.c(),
                n_b: b.n(),
            });
        }
        if a.digest().is_empty() && b.digest().is_empty() {
            return Err(EstimateError::EmptyDigests);
        }
        let dig_ld = levenshtein(a.digest().as_bytes(), b.digest().as_bytes());
        Ok(self.estimate_with_ld(a, b, dig_ld))
    }

    /// Same as [`Estimator::estimate`] with the digest distance already
    /// known. Parameters and emptiness are not rechecked.
    pub fn estimate_with_ld(&self, a: &Signature, b: &Signature, dig_ld: usize) -> EstimateResult {
        let (long, short) = if a.file_length() >= b.file_length() { (a, b) } else { (b, a) };
        let (dl, ds) = (long.digest_length(), short.digest_length());

        let dig_diff = dl.abs_diff(ds);
        let effective_c = (long.file_length() + short.file_length()) as f64 / (dl + ds) as f64;
        let scaled_dig_ld = dig_ld.saturating_sub(dig_diff) as f64 * effective_c / (1.0 + self.r);
        let file_length_diff = long.file_length() - short.file_length();
        // f64::round rounds half away from zero.
        let eld = (scaled_dig_ld + file_length_diff as f64).round() as u64;

        EstimateResult {
            eld,
            dig_ld,
            dig_diff,
            effective_c,
            scaled_dig_ld,
            file_length_diff,
            delta: significance(dl, ds, dig_ld, self.max_ratio),
            low_confidence: a.is_low_confidence() || b.is_low_confidence(),
        }
    }
}

/// Estimate with overlap ratio `r` and the default ratio guard.
pub fn estimate(a: &Signature, b: &Signature, r: f64) -> Result<EstimateResult, EstimateError> {
    Estimator::new(r, DEFAULT_MAX_RATIO).estimate(a, b)
}

/// Whether a pair passes a significance threshold `t` in `[0, 1]`.
///
/// `t = 0` passes every compatible pair. A score of 1 also arises when one
/// digest is a subsequence of the other, so `t = 1` additionally requires
/// an estimated distance of zero.
pub fn passes_threshold(delta: Significance, eld: u64, t: f64) -> bool {
    if t <= 0.0 {
        return true;
    }
    match delta.score() {
        Some(s) if t >= 1.0 => s >= 1.0 && eld == 0,
        Some(s) => s >= t,
        None => false,
    }
}
