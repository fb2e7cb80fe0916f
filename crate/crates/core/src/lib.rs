//! Fast estimation of the Levenshtein distance between large documents.
//!
//! Each document is lossy-compressed into a short digest by hashing every
//! `N`-byte window and keeping roughly one window in `C`. The distance of
//! two documents is then estimated from the exact distance of their
//! digests, scaled back by the realized compression rate and discounted by
//! the overlap expected between unrelated texts.
//!
//! ```
//! use eld::{Params, Signature, estimate, DEFAULT_R};
//!
//! let params = Params::with_default_alphabet(11, 11).unwrap();
//! let text = "the quick brown fox jumps over the lazy dog. ".repeat(40);
//! let a = Signature::build("a.txt", text.as_bytes(), &params).unwrap();
//! let b = Signature::build("b.txt", text[..1200].as_bytes(), &params).unwrap();
//! let result = estimate(&a, &b, DEFAULT_R).unwrap();
//! assert!(result.eld >= (text.len() - 1200) as u64);
//! ```

pub mod calibration;
pub mod compressor;
pub mod estimator;
pub mod levenshtein;
pub mod pipeline;
pub mod preprocess;
pub mod rolling_hash;
pub mod signature;

pub use compressor::{compress, validate_params, Digest, Params, ParamsError, DEFAULT_ALPHABET};
pub use estimator::{
    error_rate, estimate, significance, EstimateError, EstimateResult, Estimator, OverlapRatios,
    Significance, DEFAULT_MAX_RATIO, DEFAULT_R,
};
pub use levenshtein::levenshtein;
pub use preprocess::Preprocess;
pub use signature::{compatible, ParseError, Signature, SignatureError};
