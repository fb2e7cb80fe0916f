//! Batch comparison of signature sets and the comparison report format.
//!
//! Pairs are scored in parallel on the current rayon pool, but results are
//! always returned in row-major pair order so reports do not depend on the
//! number of workers.
//!
//! Report lines have the form
//!
//! ```text
//! path_a,path_b,eld,delta,dig_ld,effective_c,low_confidence
//! ```
//!
//! Search reports carry an extra `best_match` column. Fields that do not
//! apply to a pair are written as `NA`; incompatible pairs have
//! `INCOMPATIBLE` in the `eld` column.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::estimator::{passes_threshold, significance, EstimateResult, Estimator, Significance};
use crate::levenshtein::levenshtein;
use crate::signature::{compatible, Signature};

/// Below this many digest characters on either side, a pair is compared
/// on the original files instead.
pub const FALLBACK_MIN_DIGEST: usize = 4;

/// Largest `|A| * |B|` for which the exact fallback is attempted.
pub const FALLBACK_MAX_CELLS: u128 = 10_000_000_000;

pub const REPORT_HEADER: &str = "#path_a,path_b,eld,delta,dig_ld,effective_c,low_confidence";
pub const SEARCH_REPORT_HEADER: &str = "#path_a,path_b,eld,delta,dig_ld,effective_c,low_confidence,best_match";

/// Access to original documents for the small-digest fallback.
pub trait OriginalSource: Sync {
    fn load(&self, path: &str) -> Option<Vec<u8>>;
}

impl<F> OriginalSource for F
where
    F: Fn(&str) -> Option<Vec<u8>> + Sync,
{
    fn load(&self, path: &str) -> Option<Vec<u8>> {
        self(path)
    }
}

/// No originals available; small-digest pairs are reported as not
/// applicable.
pub struct NoOriginals;

impl OriginalSource for NoOriginals {
    fn load(&self, _path: &str) -> Option<Vec<u8>> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub estimator: Estimator,
    /// Significance threshold in `[0, 1]`.
    pub threshold: f64,
    /// Report every pair regardless of the threshold.
    pub report_all: bool,
    /// Also compare each signature with itself (all-vs-all mode only).
    pub include_self: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            estimator: Estimator::default(),
            threshold: 0.0,
            report_all: false,
            include_self: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairScore {
    Estimated(EstimateResult),
    /// Exact distance on the original files. Equivalent to an estimate at
    /// compression rate 1.
    Exact { ld: u64, delta: Significance },
    /// Digests too small and originals unavailable.
    NotApplicable,
    Incompatible,
}

impl PairScore {
    pub fn eld(&self) -> Option<u64> {
        match self {
            PairScore::Estimated(r) => Some(r.eld),
            PairScore::Exact { ld, .. } => Some(*ld),
            _ => None,
        }
    }

    pub fn delta(&self) -> Option<Significance> {
        match self {
            PairScore::Estimated(r) => Some(r.delta),
            PairScore::Exact { delta, .. } => Some(*delta),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    /// Index into the first (or only) signature list.
    pub a: usize,
    /// Index into the second (or only) signature list.
    pub b: usize,
    pub score: PairScore,
    pub low_confidence: bool,
    pub best_match: bool,
}

impl PairOutcome {
    /// Whether the pair belongs in a filtered report.
    pub fn passes(&self, threshold: f64) -> bool {
        match &self.score {
            PairScore::Incompatible => true,
            PairScore::NotApplicable => threshold <= 0.0,
            score => passes_threshold(score.delta().unwrap(), score.eld().unwrap(), threshold),
        }
    }
}

/// Scores a single pair, falling back to the originals for tiny digests.
pub fn score_pair(a: &Signature, b: &Signature, estimator: &Estimator, originals: &dyn OriginalSource) -> PairScore {
    if !compatible(a, b) {
        return PairScore::Incompatible;
    }
    if a.digest_length() < FALLBACK_MIN_DIGEST || b.digest_length() < FALLBACK_MIN_DIGEST {
        return exact_fallback(a, b, estimator, originals).unwrap_or(PairScore::NotApplicable);
    }
    match estimator.estimate(a, b) {
        Ok(r) => PairScore::Estimated(r),
        Err(_) => PairScore::NotApplicable,
    }
}

fn exact_fallback(
    a: &Signature,
    b: &Signature,
    estimator: &Estimator,
    originals: &dyn OriginalSource,
) -> Option<PairScore> {
    if a.file_length() as u128 * b.file_length() as u128 > FALLBACK_MAX_CELLS {
        return None;
    }
    let da = originals.load(a.path())?;
    let db = if a.path() == b.path() { da.clone() } else { originals.load(b.path())? };
    let ld = levenshtein(&da, &db);
    Some(PairScore::Exact {
        ld: ld as u64,
        delta: significance(da.len(), db.len(), ld, estimator.max_ratio),
    })
}

fn outcome(a: usize, b: usize, sa: &Signature, sb: &Signature, opts: &CompareOptions, originals: &dyn OriginalSource) -> PairOutcome {
    PairOutcome {
        a,
        b,
        score: score_pair(sa, sb, &opts.estimator, originals),
        low_confidence: sa.is_low_confidence() || sb.is_low_confidence(),
        best_match: false,
    }
}

/// All pairs `i < j` of one signature list (`i <= j` with `include_self`),
/// in row-major order. Nothing is filtered.
pub fn compare_all(sigs: &[Signature], opts: &CompareOptions, originals: &dyn OriginalSource) -> Vec<PairOutcome> {
    let pairs: Vec<(usize, usize)> = (0..sigs.len())
        .flat_map(|i| {
            let start = if opts.include_self { i } else { i + 1 };
            (start..sigs.len()).map(move |j| (i, j))
        })
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| outcome(i, j, &sigs[i], &sigs[j], opts, originals))
        .collect()
}

/// Every source against every destination, in row-major order, with the
/// best match of each source flagged. Nothing is filtered.
pub fn search(
    sources: &[Signature],
    destinations: &[Signature],
    opts: &CompareOptions,
    originals: &dyn OriginalSource,
) -> Vec<PairOutcome> {
    let mut out: Vec<PairOutcome> = (0..sources.len() * destinations.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / destinations.len(), k % destinations.len());
            outcome(i, j, &sources[i], &destinations[j], opts, originals)
        })
        .collect();

    if !destinations.is_empty() {
        for row in out.chunks_mut(destinations.len()) {
            let best = row
                .iter()
                .enumerate()
                .filter_map(|(k, o)| {
                    let delta = o.score.delta()?.score()?;
                    Some((k, delta, o.score.eld()?))
                })
                .fold(None::<(usize, f64, u64)>, |best, cand| match best {
                    Some(b) if b.1 > cand.1 || (b.1 == cand.1 && b.2 <= cand.2) => Some(b),
                    _ => Some(cand),
                });
            if let Some((k, _, _)) = best {
                row[k].best_match = true;
            }
        }
    }
    out
}

fn format_row(path_a: &str, path_b: &str, o: &PairOutcome) -> String {
    let (eld, delta, dig_ld, eff_c) = match &o.score {
        PairScore::Estimated(r) => (
            r.eld.to_string(),
            fmt_delta(r.delta),
            r.dig_ld.to_string(),
            format!("{:.3}", r.effective_c),
        ),
        PairScore::Exact { ld, delta } => (ld.to_string(), fmt_delta(*delta), ld.to_string(), "1.000".to_owned()),
        PairScore::NotApplicable => ("NA".into(), "NA".into(), "NA".into(), "NA".into()),
        PairScore::Incompatible => ("INCOMPATIBLE".into(), "NA".into(), "NA".into(), "NA".into()),
    };
    format!("{path_a},{path_b},{eld},{delta},{dig_ld},{eff_c},{}", o.low_confidence)
}

fn fmt_delta(delta: Significance) -> String {
    match delta.score() {
        Some(s) => format!("{s:.4}"),
        None => "NA".to_owned(),
    }
}

/// Writes an all-vs-all report. Rows below the threshold are skipped unless
/// `report_all` is set.
pub fn write_compare_report<W: Write>(
    mut w: W,
    sigs: &[Signature],
    outcomes: &[PairOutcome],
    opts: &CompareOptions,
) -> io::Result<usize> {
    writeln!(w, "{REPORT_HEADER}")?;
    let mut written = 0;
    for o in outcomes {
        if opts.report_all || o.passes(opts.threshold) {
            writeln!(w, "{}", format_row(sigs[o.a].path(), sigs[o.b].path(), o))?;
            written += 1;
        }
    }
    w.flush()?;
    Ok(written)
}

/// Writes a source-vs-destination report with the `best_match` column.
pub fn write_search_report<W: Write>(
    mut w: W,
    sources: &[Signature],
    destinations: &[Signature],
    outcomes: &[PairOutcome],
    opts: &CompareOptions,
) -> io::Result<usize> {
    writeln!(w, "{SEARCH_REPORT_HEADER}")?;
    let mut written = 0;
    for o in outcomes {
        if opts.report_all || o.passes(opts.threshold) {
            let row = format_row(sources[o.a].path(), destinations[o.b].path(), o);
            writeln!(w, "{row},{}", o.best_match)?;
            written += 1;
        }
    }
    w.flush()?;
    Ok(written)
}
