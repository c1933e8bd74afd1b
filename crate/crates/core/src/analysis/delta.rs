//! The exponent `δ_d(x, y)` bounding LDGM joint spectra, its supremum over
//! the heavy-input region, and the LDGM finite-size bound.

use num_rational::{BigRational, Rational64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chk::ExpectedChkSpectrum;
use super::report::{BoundReport, BoundValue};
use crate::code::ldgm_output_len;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::numeric::{ln_rational, to_f64};
use crate::spectrum::{JointSpectrum, Spectrum};
use crate::types::TypeVector;

pub const COARSE_GRID: usize = 1024;
pub const DEFAULT_TOL: f64 = 1e-10;

const INVPHI: f64 = 0.618_033_988_749_894_9;

/// Result of minimizing the `δ_d` objective at one `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaDParams {
    pub q: u32,
    pub d: usize,
    pub x: f64,
    pub y: f64,
    pub minimizer: f64,
    pub value: f64,
}

fn xlogy_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * (a / b).ln()
    }
}

/// Binary divergence `D(x‖x̂)` in nats, with `0·ln 0 = 0`.
pub fn binary_divergence(x: f64, xh: f64) -> f64 {
    xlogy_ratio(x, xh) + xlogy_ratio(1.0 - x, 1.0 - xh)
}

/// `d·D(x‖x̂) + y·ln[1+(q−1)t^d] + (1−y)·ln[1−t^d]`, `t = (q x̂ − 1)/(q − 1)`.
/// A term whose weight is zero is dropped rather than evaluated.
pub fn delta_objective(q: u32, d: usize, x: f64, y: f64, xh: f64) -> f64 {
    let qf = q as f64;
    let t = (qf * xh - 1.0) / (qf - 1.0);
    let td = t.powi(d as i32);
    let mut v = d as f64 * binary_divergence(x, xh);
    if y > 0.0 {
        v += y * (1.0 + (qf - 1.0) * td).ln();
    }
    if y < 1.0 {
        v += (1.0 - y) * (1.0 - td).ln();
    }
    v
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INVPHI * (b - a);
    let mut e = a + INVPHI * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while (b - a).abs() > tol {
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + INVPHI * (b - a);
            fe = f(e);
        }
    }
    if fc <= fe {
        (c, fc)
    } else {
        (e, fe)
    }
}

/// Endpoint of `(0, 1)` where the objective runs off to `−∞`, if any.
///
/// Near `x̂ = 1` the objective is `κ₁·ln(1 − x̂) + O(1)` with
/// `κ₁ = (1 − y) − d(1 − x)`. For `q = 2` the point `x̂ = 0` sends `t` to
/// `−1`, and one of the two logs vanishes there as well. A positive
/// coefficient means the infimum is `−∞`. These are exactly the `(x, y)`
/// that no check layer can realize.
pub fn divergent_endpoint(q: u32, d: usize, x: f64, y: f64) -> Option<f64> {
    const EPS: f64 = 1e-12;
    let df = d as f64;
    if (1.0 - y) - df * (1.0 - x) > EPS {
        return Some(1.0);
    }
    if q == 2 {
        let w = if d % 2 == 0 { 1.0 - y } else { y };
        if w - df * x > EPS {
            return Some(0.0);
        }
    }
    None
}

/// `δ_d(x, y) = inf_{0<x̂<1} objective`, by a 1024-point grid followed by
/// golden-section refinement around the best grid point. The candidate
/// `x̂ = x` is always probed, so the value never exceeds the objective there.
///
/// Where the infimum is `−∞` (see [`divergent_endpoint`]) the value is `−∞`
/// and the minimizer is the endpoint it is approached at.
pub fn delta_d(q: u32, d: usize, x: f64, y: f64, tol: f64) -> Result<DeltaDParams> {
    FieldSpec::new(q)?;
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(Error::invalid(format!("x = {x} and y = {y} must lie in [0, 1]")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if let Some(end) = divergent_endpoint(q, d, x, y) {
        return Ok(DeltaDParams { q, d, x, y, minimizer: end, value: f64::NEG_INFINITY });
    }
    let f = |xh: f64| delta_objective(q, d, x, y, xh);
    let step = 1.0 / COARSE_GRID as f64;
    let (best_i, _) = (0..COARSE_GRID)
        .map(|i| (i, f((i as f64 + 0.5) * step)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let lo = (best_i as f64 - 0.5) * step;
    let hi = (best_i as f64 + 1.5) * step;
    let lo = lo.max(f64::EPSILON);
    let hi = hi.min(1.0 - f64::EPSILON);
    let mut best = golden_section(f, lo, hi, tol);
    let grid_point = (best_i as f64 + 0.5) * step;
    for cand in [grid_point, x] {
        if cand > 0.0 && cand < 1.0 {
            let v = f(cand);
            if v < best.1 {
                best = (cand, v);
            }
        }
    }
    Ok(DeltaDParams { q, d, x, y, minimizer: best.0, value: best.1 })
}

/// Evenly spaced points `0, step, 2·step, …` strictly below `end` (or up to
/// and including `end` when `inclusive`).
pub fn grid_points(step: f64, end: f64, inclusive: bool) -> Vec<f64> {
    let k = (end / step + 1e-9).floor() as usize;
    (0..=k)
        .map(|i| i as f64 * step)
        .filter(|&v| if inclusive { v <= end + 1e-12 } else { v < end - 1e-12 })
        .map(|v| v.min(1.0))
        .collect()
}

/// `δ_d` on the grid `x ∈ [0, 1]`, `y ∈ [0, 1]` with the given step.
pub fn delta_table(q: u32, d: usize, step: f64, tol: f64) -> Result<Vec<DeltaDParams>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::invalid("grid step must lie in (0, 1]"));
    }
    let xs = grid_points(step, 1.0, true);
    let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| xs.iter().map(move |&y| (x, y))).collect();
    pts.par_iter().map(|&(x, y)| delta_d(q, d, x, y, tol)).collect()
}

/// Supremum of `δ_d(x, y)` over grid points with `x < 1 − γ`, `y ∈ [0,1]`,
/// together with the maximizing grid point.
pub fn sup_delta_d(q: u32, d: usize, gamma: f64, step: f64, tol: f64) -> Result<DeltaDParams> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid("γ must lie in [0, 1)"));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::invalid("grid step must lie in (0, 1]"));
    }
    let xs = grid_points(step, 1.0 - gamma, false);
    let ys = grid_points(step, 1.0, true);
    let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let vals: Vec<DeltaDParams> = pts.par_iter().map(|&(x, y)| delta_d(q, d, x, y, tol)).collect::<Result<_>>()?;
    vals.into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .ok_or(Error::EmptySupport)
}

/// One row of a `d₀` search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D0Row {
    pub d: usize,
    pub c: usize,
    pub sup_delta: f64,
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D0Report {
    /// Least `d` from which `(c/d)·sup δ_d ≤ δ` holds for every tested
    /// larger `d`; `None` if even `d_max` fails.
    pub d0: Option<usize>,
    pub rows: Vec<D0Row>,
}

/// Searches `d ≤ d_max` with `c = ratio·d` integral for the threshold `d₀(γ, δ)`.
pub fn d0_search(
    q: u32,
    ratio: Rational64,
    gamma: f64,
    delta: f64,
    d_max: usize,
    step: f64,
    tol: f64,
) -> Result<D0Report> {
    if *ratio.numer() <= 0 || *ratio.denom() <= 0 {
        return Err(Error::invalid("c/d must be positive"));
    }
    let mut rows = Vec::new();
    for d in 1..=d_max {
        let c = ratio * Rational64::from_integer(d as i64);
        if !c.is_integer() {
            continue;
        }
        let sup = sup_delta_d(q, d, gamma, step, tol)?.value;
        let r = *ratio.numer() as f64 / *ratio.denom() as f64;
        rows.push(D0Row { d, c: c.to_integer() as usize, sup_delta: sup, scaled: r * sup });
    }
    let mut d0 = None;
    for row in rows.iter().rev() {
        if row.scaled <= delta {
            d0 = Some(row.d);
        } else {
            break;
        }
    }
    Ok(D0Report { d0, rows })
}

/// `(q − 1)·ln(N + 1)`, the slack lost when a multinomial over `N` letters is
/// replaced by `exp(N·H)`.
pub fn multinomial_slack(q: u32, letters: usize) -> f64 {
    (q as f64 - 1.0) * ((letters + 1) as f64).ln()
}

/// Exact `E[S(F^LD_{n,c,d})]` from the check-layer closed form: the repetition
/// layer maps type `P` to `cP` and the interleaved checks see a uniform
/// sequence of that type.
pub fn ldgm_expected_joint(q: u32, n: usize, c: usize, d: usize) -> Result<JointSpectrum> {
    let m = ldgm_output_len(n, c, d)?;
    let chk = ExpectedChkSpectrum::new(q, d, m)?;
    let mut entries = Vec::new();
    for p in TypeVector::all(q, n) {
        let amb = Spectrum::ambient_value(&p);
        let scaled = p.scaled(c as u32);
        for qt in TypeVector::all(q, m) {
            let v = chk.conditional(&scaled, &qt)? * &amb;
            entries.push(((p.clone(), qt), v));
        }
    }
    JointSpectrum::from_entries((q, n), (q, m), entries)
}

/// Checks `(1/n) ln α(F^LD)(P,Q) ≤ (c/d)·δ_d(P(0), Q(0)) + (q−1) ln(nc+1)/n`,
/// with `α` exact from the check-layer closed form. `P` must be nonzero.
pub fn ldgm_alpha_bound(
    q: u32,
    n: usize,
    c: usize,
    d: usize,
    p: &TypeVector,
    qt: &TypeVector,
    tol: f64,
) -> Result<BoundReport> {
    let m = ldgm_output_len(n, c, d)?;
    if p.q() != q || p.n() != n || qt.q() != q || qt.n() != m {
        return Err(Error::ShapeMismatch(format!("types {p}, {qt} do not fit q={q}, n={n}, m={m}")));
    }
    if p.is_zero_type() {
        return Err(Error::ZeroInput);
    }
    let chk = ExpectedChkSpectrum::new(q, d, m)?;
    let alpha = chk.alpha(&p.scaled(c as u32), qt)?;
    ldgm_report_from_alpha(q, n, c, d, p, qt, &alpha, tol)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn ldgm_report_from_alpha(
    q: u32,
    n: usize,
    c: usize,
    d: usize,
    p: &TypeVector,
    qt: &TypeVector,
    alpha: &BigRational,
    tol: f64,
) -> Result<BoundReport> {
    let lhs = ln_rational(alpha) / n as f64;
    let delta = delta_d(q, d, p.prob_f64(0), qt.prob_f64(0), tol)?;
    let rhs = c as f64 / d as f64 * delta.value + multinomial_slack(q, n * c) / n as f64;
    let context = format!(
        "LDGM q={q} n={n} c={c} d={d} P={p} Q={qt} alpha={} minimizer={:.12}",
        to_f64(alpha),
        delta.minimizer
    );
    Ok(BoundReport::new(context, BoundValue::Log(lhs), BoundValue::Log(rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_conventions() {
        assert_eq!(binary_divergence(0.0, 0.5), 2f64.ln());
        assert_eq!(binary_divergence(0.3, 0.3), 0.0);
        assert!(binary_divergence(1.0, 0.5) > 0.0);
    }

    #[test]
    fn value_at_uniform_point_is_nonpositive() {
        for y in [0.0, 0.3, 1.0] {
            let r = delta_d(3, 4, 1.0 / 3.0, y, DEFAULT_TOL).unwrap();
            assert!(r.value <= 1e-15, "{r:?}");
        }
    }

    #[test]
    fn certificate_against_probes() {
        let r = delta_d(3, 4, 0.4, 0.2, DEFAULT_TOL).unwrap();
        for i in 1..1000 {
            let xh = i as f64 / 1000.0;
            assert!(r.value <= delta_objective(3, 4, 0.4, 0.2, xh) + 1e-12);
        }
        assert!(r.value <= delta_objective(3, 4, 0.4, 0.2, 0.4));
    }

    #[test]
    fn all_ones_input_is_minus_infinity() {
        assert_eq!(delta_d(3, 2, 1.0, 0.5, DEFAULT_TOL).unwrap().value, f64::NEG_INFINITY);
        assert!(delta_d(3, 2, 1.0, 1.0, DEFAULT_TOL).unwrap().value.is_finite());
    }

    #[test]
    fn divergence_matches_unrealizable_pairs() {
        assert_eq!(divergent_endpoint(3, 2, 0.7, 0.0), Some(1.0));
        assert_eq!(divergent_endpoint(3, 2, 0.5, 0.0), None);
        assert_eq!(divergent_endpoint(2, 3, 0.1, 1.0), Some(0.0));
        // Divergent (x, y) are exactly those the check layer never produces.
        for (q, d, m) in [(2u32, 2usize, 2usize), (2, 3, 2), (3, 2, 2), (3, 3, 1)] {
            let chk = ExpectedChkSpectrum::new(q, d, m).unwrap();
            for p in TypeVector::all(q, m * d) {
                for t in TypeVector::all(q, m) {
                    let x = p.count(0) as f64 / (m * d) as f64;
                    let y = t.count(0) as f64 / m as f64;
                    let zero = chk.value(&p, &t).unwrap() == BigRational::from_integer(0.into());
                    if divergent_endpoint(q, d, x, y).is_some() {
                        assert!(zero, "q={q} d={d} P={p} Q={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(delta_d(3, 2, 1.5, 0.0, DEFAULT_TOL).is_err());
        assert!(delta_d(4, 2, 0.5, 0.0, DEFAULT_TOL).is_err());
        assert!(delta_d(3, 0, 0.5, 0.0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn grid_points_exclude_endpoint() {
        assert_eq!(grid_points(0.25, 0.5, false), vec![0.0, 0.25]);
        assert_eq!(grid_points(0.25, 1.0, true).len(), 5);
    }

    #[test]
    fn ldgm_closed_form_is_normalized() {
        let e = ldgm_expected_joint(3, 2, 2, 2).unwrap();
        assert_eq!(e.marginal_x(), Spectrum::ambient(3, 2));
    }
}
