//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use eld::calibration::{self, AlphabetModel, RANDOM_CHARS};
use eld::compressor::emissions;
use eld::pipeline::{self, CompareOptions, NoOriginals, PairScore};
use eld::{
    compress, error_rate, estimate, levenshtein, significance, Digest, Estimator, Params, Signature, Significance,
    DEFAULT_MAX_RATIO, DEFAULT_R,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: &[u8] = include_bytes!("data/english_corpus.txt");
const DOC_LEN: usize = 30_000;

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("worked example", worked_example),
        ("significance table", significance_table),
        ("error rate", error_rates),
        ("calibration", calibration_bands),
        ("oracle equivalence", oracle_equivalence),
        ("mutation tracking", mutation_tracking),
        ("self-similarity and metric floor", metric_floor),
        ("locality", locality),
        ("speedup", speedup),
        ("unrelated corpus", unrelated_corpus),
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn words() -> AlphabetModel {
    AlphabetModel::word_list(CORPUS).expect("corpus fixture has words")
}

/// Seeded English-like text: corpus words drawn at random.
fn english(model: &AlphabetModel, len: usize, seed: u64) -> Vec<u8> {
    model.sample(len, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn params(c: u64) -> Params {
    Params::with_default_alphabet(c, 11).unwrap()
}

fn sig(path: &str, input: &[u8], p: &Params) -> Signature {
    Signature::build(path, input, p).unwrap()
}

fn best_of<T>(reps: usize, mut f: impl FnMut() -> T) -> Duration {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(f());
            t.elapsed()
        })
        .min()
        .unwrap()
}

fn worked_example() -> Result<String, String> {
    let a = Signature::new("docA", 700, 101, 11, Digest::from("AABBCFF00192192")).unwrap();
    let b = Signature::new("docB", 500, 101, 11, Digest::from("AABBCCDDEE")).unwrap();
    let r = estimate(&a, &b, 0.19).map_err(|e| e.to_string())?;
    ensure(
        r.dig_diff == 5
            && r.effective_c == 48.0
            && r.dig_ld == 10
            && (r.scaled_dig_ld - 201.68).abs() <= 0.01
            && r.eld == 402,
        || format!("{r:?}"),
    )?;
    Ok(format!(
        "digDiff={} effectiveC={} digLD={} scaled={:.2} eld={}",
        r.dig_diff, r.effective_c, r.dig_ld, r.scaled_dig_ld, r.eld
    ))
}

fn significance_table() -> Result<String, String> {
    let rows: [(usize, usize, usize, f64); 11] = [
        (700, 700, 0, 1.000),
        (700, 700, 10, 0.986),
        (700, 350, 400, 0.857),
        (700, 100, 600, 1.000),
        (700, 700, 600, 0.143),
        (700, 350, 650, 0.143),
        (700, 100, 696, 0.040),
        (700, 200, 700, 0.000),
        (70_000, 700, 70_000, 0.000),
        (70_000, 700, 69_650, 0.500),
        (70_000, 700, 69_300, 1.000),
    ];
    for (k, &(la, lb, ld, want)) in rows.iter().enumerate() {
        let raw = significance(la, lb, ld, f64::INFINITY)
            .score()
            .ok_or_else(|| format!("row {}: not applicable without guard", k + 1))?;
        ensure((raw - want).abs() < 5e-4, || format!("row {}: got {raw:.4}, want {want:.3}", k + 1))?;
        let guarded = significance(la, lb, ld, DEFAULT_MAX_RATIO);
        if k >= 8 {
            ensure(guarded == Significance::RatioExceeded, || format!("row {}: guard gave {guarded:?}", k + 1))?;
        } else {
            ensure(guarded == Significance::Score(raw), || format!("row {}: guard gave {guarded:?}", k + 1))?;
        }
    }
    Ok("11 rows to 3 decimals, rows 9-11 not applicable at max_ratio=10".into())
}

fn error_rates() -> Result<String, String> {
    let mut got = Vec::new();
    for ((ld, eld), want) in [((1, 2), 0.00), ((1000, 2000), 0.03), ((15_000, 30_000), 0.47)] {
        let er = error_rate(ld, eld, 32_000, 32_000).map_err(|e| e.to_string())?;
        ensure((er - want).abs() <= 0.005, || format!("({ld},{eld}): {er:.4} vs {want}"))?;
        got.push(format!("{er:.2}"));
    }
    Ok(got.join("/"))
}

fn calibration_bands() -> Result<String, String> {
    let start = Instant::now();
    let models = [
        (AlphabetModel::random_chars(), 0.032, 0.052),
        (AlphabetModel::char_frequency(CORPUS).unwrap(), 0.12, 0.20),
        (words(), 0.15, 0.23),
    ];
    ensure(RANDOM_CHARS.len() == 83, || "random model must have 83 elements".into())?;
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for (model, lo, hi) in &models {
        let r = calibration::expected_overlap(model, DOC_LEN, 10, 0).map_err(|e| e.to_string())?;
        parts.push(format!("{}={r:.4}", model.kind()));
        if !(*lo..=*hi).contains(&r) {
            bad.push(format!("{} {r:.4} outside [{lo}, {hi}]", model.kind()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        bad.push(format!("took {elapsed:?}"));
    }
    if bad.is_empty() {
        Ok(parts.join(" "))
    } else {
        Err(bad.join("; "))
    }
}

fn naive_ld(a: &[u8], b: &[u8]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = naive_ld(ra, rb) + usize::from(x != y);
            let del = naive_ld(ra, b) + 1;
            let ins = naive_ld(a, rb) + 1;
            sub.min(del).min(ins)
        }
    }
}

fn oracle_equivalence() -> Result<String, String> {
    let mut strings: Vec<Vec<u8>> = vec![Vec::new()];
    let mut frontier = strings.clone();
    for _ in 0..5 {
        frontier = frontier
            .iter()
            .flat_map(|s| b"abc".iter().map(move |&c| [s.as_slice(), &[c]].concat()))
            .collect();
        strings.extend(frontier.iter().cloned());
    }
    let mut pairs = 0usize;
    for a in &strings {
        for b in &strings {
            let (want, got) = (naive_ld(a, b), levenshtein(a, b));
            ensure(want == got, || {
                format!("{:?} vs {:?}: {got} != {want}", String::from_utf8_lossy(a), String::from_utf8_lossy(b))
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{} strings, {pairs} ordered pairs", strings.len()))
}

fn mutation_tracking() -> Result<String, String> {
    let model = words();
    let cs = [11u64, 21, 51];
    let mut worst_deletion = [0f64; 3];
    let mut worst_insertion = [0u64; 3];
    let mut min_upper_ratio = [f64::INFINITY; 3];

    for seed in 0..10u64 {
        let text = english(&model, DOC_LEN, 600 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let block = rng.random_range(DOC_LEN / 100..=DOC_LEN / 10);
        let at = rng.random_range(0..=DOC_LEN - block);
        let deleted = [&text[..at], &text[at + block..]].concat();
        let del_ld = levenshtein(&text, &deleted) as u64;
        ensure(del_ld == block as u64, || format!("seed {seed}: deletion LD {del_ld} != {block}"))?;

        let mut inserted = text.clone();
        for _ in 0..10 {
            let pos = rng.random_range(0..=inserted.len());
            inserted.insert(pos, *RANDOM_CHARS.choose(&mut rng).unwrap());
        }
        let ins_ld = levenshtein(&text, &inserted) as u64;

        let letter = *b"etaoinshr".choose(&mut rng).unwrap();
        let upper: Vec<u8> = text.iter().map(|&b| if b == letter { b.to_ascii_uppercase() } else { b }).collect();
        let up_ld = levenshtein(&text, &upper) as u64;

        for (k, &c) in cs.iter().enumerate() {
            let p = params(c);
            let orig = sig("orig", &text, &p);
            let eld = |other: &[u8]| estimate(&orig, &sig("mut", other, &p), DEFAULT_R).unwrap().eld;

            let e = eld(&deleted);
            let rel = (e as f64 - del_ld as f64).abs() / del_ld as f64;
            worst_deletion[k] = worst_deletion[k].max(rel);
            ensure(rel <= 0.15, || format!("seed {seed} C={c}: deletion LD {del_ld}, eld {e}"))?;

            let e = eld(&inserted);
            worst_insertion[k] = worst_insertion[k].max(e);
            ensure(e <= 600, || format!("seed {seed} C={c}: insertion LD {ins_ld}, eld {e}"))?;

            let e = eld(&upper);
            min_upper_ratio[k] = min_upper_ratio[k].min(e as f64 / up_ld as f64);
            ensure(e > up_ld, || format!("seed {seed} C={c}: uppercase LD {up_ld}, eld {e}"))?;
        }
    }
    let per_c: Vec<String> = cs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            format!(
                "C={c}: deletion err<={:.1}% insertion eld<={} uppercase eld/LD>={:.1}",
                worst_deletion[k] * 100.0,
                worst_insertion[k],
                min_upper_ratio[k]
            )
        })
        .collect();
    Ok(per_c.join("; "))
}

fn metric_floor() -> Result<String, String> {
    let model = words();
    let p = Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigs: Vec<Signature> = (0..100)
        .map(|i| {
            let len = rng.random_range(2_000..=DOC_LEN);
            sig(&format!("doc{i}"), &english(&model, len, 700 + i), &p)
        })
        .collect();
    let est = Estimator::default();
    for s in &sigs {
        let r = est.estimate(s, s).map_err(|e| format!("{}: {e}", s.path()))?;
        ensure(r.eld == 0, || format!("{}: self eld {}", s.path(), r.eld))?;
    }
    let (mut pairs, mut applicable) = (0, 0);
    for (i, a) in sigs.iter().enumerate() {
        for b in &sigs[i + 1..] {
            let r = est.estimate(a, b).map_err(|e| e.to_string())?;
            let diff = a.file_length().abs_diff(b.file_length());
            ensure(r.eld >= diff, || format!("{} vs {}: eld {} < {diff}", a.path(), b.path(), r.eld))?;
            if let Some(d) = r.delta.score() {
                ensure((0.0..=1.0).contains(&d), || format!("{} vs {}: delta {d}", a.path(), b.path()))?;
                applicable += 1;
            }
            pairs += 1;
        }
    }
    ensure(pairs >= 4950, || format!("only {pairs} pairs"))?;
    Ok(format!("100 self pairs, {pairs} pairs, {applicable} with applicable delta"))
}

fn locality() -> Result<String, String> {
    let p = Params::with_default_alphabet(7, 11).unwrap();
    let n = p.n();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut boundary_max = 0;
    let mut edit_max = 0;

    for case in 0..200 {
        let a: Vec<u8> = (0..rng.random_range(0..3000)).map(|_| rng.random()).collect();
        let b: Vec<u8> = (0..rng.random_range(0..3000)).map(|_| rng.random()).collect();
        let ab = [a.as_slice(), &b].concat();
        let (ea, eb): (Vec<_>, Vec<_>) = (emissions(&a, &p).collect(), emissions(&b, &p).collect());
        let eab: Vec<(usize, u8)> = emissions(&ab, &p).collect();

        let head: Vec<_> = eab.iter().copied().filter(|&(s, _)| s + n <= a.len()).collect();
        let tail: Vec<_> = eab.iter().filter(|&&(s, _)| s >= a.len()).map(|&(s, c)| (s - a.len(), c)).collect();
        let boundary = eab.len() - head.len() - tail.len();
        ensure(head == ea && tail == eb, || format!("case {case}: digests differ outside the boundary"))?;
        ensure(boundary < n, || format!("case {case}: {boundary} boundary emissions"))?;
        let (da, db, dab) = (compress(&a, &p), compress(&b, &p), compress(&ab, &p));
        ensure(
            dab.as_str().starts_with(da.as_str()) && dab.as_str().ends_with(db.as_str()),
            || format!("case {case}: digest of concatenation does not frame both parts"),
        )?;
        boundary_max = boundary_max.max(boundary);

        if ab.is_empty() {
            continue;
        }
        let pos = rng.random_range(0..ab.len());
        let mut edited = ab.clone();
        edited[pos] = edited[pos].wrapping_add(rng.random_range(1..=255));
        let touched = |s: usize| s <= pos && pos < s + n;
        let outside = |e: &[(usize, u8)]| e.iter().copied().filter(|&(s, _)| !touched(s)).collect::<Vec<_>>();
        let eedit: Vec<(usize, u8)> = emissions(&edited, &p).collect();
        ensure(outside(&eab) == outside(&eedit), || format!("case {case}: edit at {pos} leaked"))?;
        let changed = eab.len() - outside(&eab).len() + eedit.len() - outside(&eedit).len();
        let dig_ld = levenshtein(dab.as_bytes(), compress(&edited, &p).as_bytes());
        ensure(dig_ld <= n, || format!("case {case}: single-byte edit moved digest by {dig_ld}"))?;
        edit_max = edit_max.max(changed);
    }
    Ok(format!(
        "200 concatenations, at most {boundary_max} boundary emissions; single-byte edits touched at most {edit_max} emissions"
    ))
}

fn all_vs_all_exact(docs: &[Vec<u8>]) -> usize {
    let mut total = 0;
    for (i, a) in docs.iter().enumerate() {
        for b in &docs[i + 1..] {
            total += levenshtein(a, b);
        }
    }
    total
}

fn all_vs_all_estimate(docs: &[Vec<u8>], p: &Params) -> usize {
    let sigs: Vec<Signature> = docs.iter().enumerate().map(|(i, d)| sig(&format!("d{i}"), d, p)).collect();
    compare(&sigs)
}

fn compare(sigs: &[Signature]) -> usize {
    let opts = CompareOptions { report_all: true, ..CompareOptions::default() };
    pipeline::compare_all(sigs, &opts, &NoOriginals).len()
}

fn speedup() -> Result<String, String> {
    let model = words();
    let docs: Vec<Vec<u8>> = (0..20).map(|i| english(&model, DOC_LEN, 900 + i)).collect();
    let exact = best_of(1, || all_vs_all_exact(&docs));
    let p51 = params(51);
    let estimated = best_of(3, || all_vs_all_estimate(&docs, &p51));
    let ratio = exact.as_secs_f64() / estimated.as_secs_f64();

    let big = english(&model, 1_000_000, 901);
    let per_n: Vec<f64> = [7, 14, 21]
        .iter()
        .map(|&n| {
            let p = Params::with_default_alphabet(301, n).unwrap();
            best_of(3, || compress(&big, &p)).as_secs_f64()
        })
        .collect();
    let spread = per_n.iter().cloned().fold(0.0, f64::max) / per_n.iter().cloned().fold(f64::INFINITY, f64::min);

    let large: Vec<Vec<u8>> = (0..20).map(|i| english(&model, 10 * DOC_LEN, 920 + i)).collect();
    let sigs_at = |c| -> Vec<Signature> {
        let p = params(c);
        large.iter().enumerate().map(|(i, d)| sig(&format!("l{i}"), d, &p)).collect()
    };
    let (s51, s201) = (sigs_at(51), sigs_at(201));
    let t51 = best_of(3, || compare(&s51)).as_secs_f64();
    let t201 = best_of(3, || compare(&s201)).as_secs_f64();
    let shrink = t51 / t201;

    let detail = format!(
        "exact {:.2}s vs estimate {:.4}s ({ratio:.0}x); compress at N=7/14/21 {:.3}/{:.3}/{:.3}s (spread {spread:.2}); \
         compare t(51)/t(201)={shrink:.1}",
        exact.as_secs_f64(),
        estimated.as_secs_f64(),
        per_n[0],
        per_n[1],
        per_n[2],
    );
    ensure(ratio >= 50.0 && spread <= 1.5 && shrink > 201.0 / 51.0, || detail.clone())?;
    Ok(detail)
}

fn unrelated_corpus() -> Result<String, String> {
    let model = words();
    let p = Params::default();
    let sigs: Vec<Signature> =
        (0..30).map(|i| sig(&format!("u{i}"), &english(&model, DOC_LEN, 1000 + i), &p)).collect();
    let opts = CompareOptions { report_all: true, ..CompareOptions::default() };
    let outcomes = pipeline::compare_all(&sigs, &opts, &NoOriginals);
    ensure(outcomes.len() == 435, || format!("{} pairs", outcomes.len()))?;
    let deltas: Vec<f64> = outcomes
        .iter()
        .map(|o| match &o.score {
            PairScore::Estimated(r) => r.delta.value(),
            other => panic!("unexpected score {other:?}"),
        })
        .collect();
    let below = deltas.iter().filter(|&&d| d < 0.15).count();
    let max = deltas.iter().cloned().fold(0.0, f64::max);
    let frac = below as f64 / deltas.len() as f64;
    let detail = format!("{below}/435 below 0.15 ({:.1}%), max {max:.3}", frac * 100.0);
    ensure(frac >= 0.99, || detail.clone())?;
    Ok(detail)
}
