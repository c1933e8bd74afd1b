//! Seeded Monte Carlo estimators for ensembles too large to enumerate.
//!
//! Trial `i` always draws from `stream_rng(seed, i)`, and per-trial results
//! are accumulated as integer sums, so estimates are bit-identical no matter
//! how rayon schedules the trials.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::sample_rlc;
use crate::ensemble::{type_pair_counts, EnsembleSpec};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::rng::stream_rng;
use crate::seq::{EnumLimits, SeqMap};
use crate::types::TypeVector;

/// Sample mean with its standard error `s/√trials` (`s` the unbiased sample
/// standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
    pub seed: u64,
    pub target: String,
}

impl McEstimate {
    /// `|mean − exact| ≤ k·std_err`, with a floor of `1e-12` for
    /// zero-variance estimates.
    pub fn within(&self, exact: f64, k: f64) -> bool {
        (self.mean - exact).abs() <= k * self.std_err + 1e-12
    }

    /// Estimate from `Σcᵢ` and `Σcᵢ²` of integer per-trial counts, each over `scale`.
    fn from_sums(sum: u128, sum_sq: u128, trials: usize, scale: f64, seed: u64, target: String) -> Self {
        let t = trials as u128;
        let centered = t * sum_sq - sum * sum;
        let var = centered as f64 / (t as f64 * (t - 1) as f64) / (scale * scale);
        McEstimate {
            mean: sum as f64 / (trials as f64 * scale),
            std_err: (var / trials as f64).sqrt(),
            trials,
            seed,
            target,
        }
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::TooFewTrials(trials));
    }
    Ok(())
}

/// How each sampled code is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InputMode {
    /// Every input in `𝒳^n`: the realization's joint spectrum exactly.
    Exhaustive,
    /// `per_trial` uniform inputs drawn after the code, from the same stream.
    Sampled { per_trial: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSpectrumEntry {
    #[serde(rename = "P")]
    pub p: TypeVector,
    #[serde(rename = "Q")]
    pub q: TypeVector,
    pub estimate: McEstimate,
}

/// Per-`(P, Q)` estimates of `E[S_𝒳𝒴(F)]`. Pairs never observed are absent
/// and have estimate zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSpectrum {
    pub spec: EnsembleSpec,
    pub trials: usize,
    pub mode: InputMode,
    pub entries: Vec<McSpectrumEntry>,
}

impl McSpectrum {
    pub fn get(&self, p: &TypeVector, q: &TypeVector) -> Option<&McEstimate> {
        self.entries.iter().find(|e| &e.p == p && &e.q == q).map(|e| &e.estimate)
    }

    pub fn total_mean(&self) -> f64 {
        self.entries.iter().map(|e| e.estimate.mean).sum()
    }
}

type Sums = HashMap<(Vec<u32>, Vec<u32>), (u128, u128)>;

fn merge(mut a: Sums, b: Sums) -> Sums {
    for (k, (s, s2)) in b {
        let e = a.entry(k).or_insert((0, 0));
        e.0 += s;
        e.1 += s2;
    }
    a
}

fn sampled_counts<M: SeqMap + ?Sized, R: Rng + ?Sized>(
    f: &M,
    samples: usize,
    rng: &mut R,
) -> HashMap<(Vec<u32>, Vec<u32>), u128> {
    let mut x = vec![0u32; f.input_len()];
    let mut y = vec![0u32; f.output_len()];
    let mut px = vec![0u32; f.input_alphabet() as usize];
    let mut py = vec![0u32; f.output_alphabet() as usize];
    let mut out: HashMap<(Vec<u32>, Vec<u32>), u128> = HashMap::new();
    for _ in 0..samples {
        for a in x.iter_mut() {
            *a = rng.random_range(0..f.input_alphabet());
        }
        f.apply_into(&x, &mut y);
        TypeVector::count_into(&x, &mut px);
        TypeVector::count_into(&y, &mut py);
        *out.entry((px.clone(), py.clone())).or_insert(0) += 1;
    }
    out
}

/// Sample mean of `S_𝒳𝒴(F_i)(P, Q)` over i.i.d. realizations `F_i`.
pub fn estimate_expected_spectrum(
    spec: &EnsembleSpec,
    trials: usize,
    mode: InputMode,
    limits: &EnumLimits,
) -> Result<McSpectrum> {
    check_trials(trials)?;
    spec.kind.validate()?;
    let (q, n) = (spec.kind.q(), spec.kind.input_len());
    let scale = match mode {
        InputMode::Exhaustive => limits.check_domain(q, n)? as f64,
        InputMode::Sampled { per_trial } if per_trial > 0 => per_trial as f64,
        InputMode::Sampled { .. } => return Err(Error::invalid("per-trial input samples must be positive")),
    };
    let sums = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Sums> {
            let mut rng = stream_rng(spec.seed, i as u64);
            let f = spec.kind.sample(&mut rng)?;
            let counts = match mode {
                InputMode::Exhaustive => type_pair_counts(&f),
                InputMode::Sampled { per_trial } => sampled_counts(&f, per_trial, &mut rng),
            };
            Ok(counts.into_iter().map(|(k, c)| (k, (c, c * c))).collect())
        })
        .try_reduce(Sums::new, |a, b| Ok(merge(a, b)))?;
    let mut sorted = BTreeMap::new();
    for ((p, qt), v) in sums {
        sorted.insert((TypeVector::from_counts(p)?, TypeVector::from_counts(qt)?), v);
    }
    let entries = sorted
        .into_iter()
        .map(|((p, qt), (s, s2))| {
            let target = format!("E[S](P={p}, Q={qt})");
            McSpectrumEntry { estimate: McEstimate::from_sums(s, s2, trials, scale, spec.seed, target), p, q: qt }
        })
        .collect();
    Ok(McSpectrum { spec: spec.clone(), trials, mode, entries })
}

/// Empirical law of `F(x)` for a fixed nonzero input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub input: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    /// Observed counts for every output in `𝒴^m`, keyed by the output word.
    pub histogram: BTreeMap<String, u64>,
    /// One estimate per histogram cell, in the histogram's order.
    pub probabilities: Vec<McEstimate>,
    /// Pearson statistic against the uniform law on `𝒴^m`.
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
}

fn word(y: &[u32]) -> String {
    y.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
}

/// Draws `trials` codes from `spec` and tabulates `F(x)`. For a linear
/// ensemble `F(0) = 0` always, so `x = 0` is rejected.
pub fn estimate_uniformity(spec: &EnsembleSpec, x: &[u32], trials: usize, limits: &EnumLimits) -> Result<UniformityReport> {
    check_trials(trials)?;
    spec.kind.validate()?;
    let (q, m) = (spec.kind.q(), spec.kind.output_len());
    Error::check_dim(spec.kind.input_len(), x.len())?;
    let field = FieldSpec::new(q)?;
    for &a in x {
        field.element(a as u64)?;
    }
    if x.iter().all(|&a| a == 0) {
        return Err(Error::ZeroInput);
    }
    let cells = limits.check_domain(q, m)? as usize;
    let hist = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Vec<u64>> {
            let f = spec.kind.sample(&mut stream_rng(spec.seed, i as u64))?;
            let y = f.encode(x)?;
            let mut h = vec![0u64; cells];
            h[crate::seq::sequence_index(q, &y) as usize] += 1;
            Ok(h)
        })
        .try_reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(s, v)| *s += v);
                Ok(a)
            },
        )?;
    let expected = trials as f64 / cells as f64;
    let chi_square = hist.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let histogram: BTreeMap<String, u64> = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| (word(&crate::seq::sequence_from_index(q, m, i as u64)), c))
        .collect();
    // Same order as `histogram`.
    let probabilities = histogram
        .iter()
        .map(|(label, &c)| {
            let c = c as u128;
            McEstimate::from_sums(c, c, trials, 1.0, spec.seed, format!("Pr{{F(x) = {label}}}"))
        })
        .collect();
    Ok(UniformityReport {
        input: x.to_vec(),
        trials,
        seed: spec.seed,
        histogram,
        probabilities,
        chi_square,
        degrees_of_freedom: cells - 1,
    })
}

/// Fraction of uniform `m × n` matrices with rank `m`. `m = 0` has rate 1.
pub fn estimate_rank_rate(q: u32, n: usize, m: usize, trials: usize, seed: u64) -> Result<McEstimate> {
    check_trials(trials)?;
    let field = FieldSpec::new(q)?;
    if m > n {
        return Err(Error::invalid(format!("full row rank needs m <= n, got m={m}, n={n}")));
    }
    let target = format!("Pr{{rank = m}} q={q} n={n} m={m}");
    if m == 0 {
        return Ok(McEstimate { mean: 1.0, std_err: 0.0, trials, seed, target });
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<u128> {
            let f = sample_rlc(field, n, m, &mut stream_rng(seed, i as u64))?;
            Ok((f.rank() == m) as u128)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(McEstimate::from_sums(hits, hits, trials, 1.0, seed, target))
}
