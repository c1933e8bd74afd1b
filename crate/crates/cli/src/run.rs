use std::collections::BTreeMap;
use std::path::Path;

use jointspec::analysis::delta::{d0_search, delta_d, delta_table, ldgm_expected_joint, sup_delta_d};
use jointspec::analysis::{
    image_goodness, jscc_goodness, ldgm_alpha_bound, rank_full_probability, rank_lower_bound,
    square_rank_bound, ExpectedChkSpectrum, Goodness,
};
use jointspec::code::{ldgm_output_len, sample_ldgm, sample_rlc};
use jointspec::montecarlo::{estimate_expected_spectrum, estimate_rank_rate, estimate_uniformity, InputMode, McEstimate};
use jointspec::numeric::{format_rational, to_f64};
use jointspec::rng::stream_rng;
use jointspec::spectrum::kernel_spectrum;
use jointspec::{
    verify, EnsembleKind, EnsembleSpec, EnumLimits, Error, FieldMatrix, FieldSpec, JointSpectrum,
    LinearCodeMatrix, Spectrum, TypeVector,
};
use num_rational::{BigRational, Rational64};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{write_atomic, Report, Table};

/// A command's report plus an error to raise after the report is written.
pub struct Outcome {
    pub report: Report,
    pub deferred: Option<CliError>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, deferred: None }
    }
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Spectrum(a) => spectrum(a).map(Into::into),
        Command::Ldgm(a) => ldgm(a).map(Into::into),
        Command::Rlc(a) => rlc(a).map(Into::into),
        Command::DeltaD(a) => delta(a).map(Into::into),
        Command::D0(a) => d0(a).map(Into::into),
        Command::Rank(a) => rank(a).map(Into::into),
        Command::Goodness(a) => goodness(a).map(Into::into),
        Command::LdgmBound(a) => ldgm_bound(a),
        Command::Mc(a) => mc(a).map(Into::into),
        Command::Verify(a) => run_verify(a),
    }
}

fn limits(o: &OutputArgs) -> EnumLimits {
    EnumLimits {
        max_domain: o.limit as u128,
        max_realizations: o.max_realizations as u128,
        ..EnumLimits::default()
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<LinearCodeMatrix, CliError> {
    let m = FieldMatrix::parse_text(&read_text(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(LinearCodeMatrix::new(m)?)
}

fn ratio(x: &BigRational) -> String {
    format_rational(x)
}

fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// JSON has no infinities; they become strings.
fn jf(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(float(x))
    }
}

fn unary_rows(table: &mut Table, kind: &str, s: &Spectrum) {
    for (p, v) in s.entries() {
        table.push(vec![kind.into(), p.to_string(), String::new(), ratio(v), float(to_f64(v))]);
    }
}

fn spectrum(a: &SpectrumArgs) -> Result<Report, CliError> {
    let code = read_matrix(&a.matrix)?;
    let lim = limits(&a.output);
    let joint = JointSpectrum::of_map(&code, &lim)?;
    let kernel = kernel_spectrum(&code, &lim)?;
    let parts = joint.decompose();
    let json = json!({
        "q": code.q(),
        "n": code.n(),
        "m": code.m(),
        "rank": code.rank(),
        "joint": joint.to_json_value(),
        "marginal_x": parts.marginal_x.to_json_value(),
        "marginal_y": parts.marginal_y.to_json_value(),
        "forward": parts.forward.to_json_value(),
        "backward": parts.backward.to_json_value(),
        "kernel": kernel.to_json_value(),
    });
    let mut table = Table::new(vec!["kind", "P", "Q", "value", "decimal"]);
    for ((p, q), v) in joint.entries() {
        table.push(vec!["joint".into(), p.to_string(), q.to_string(), ratio(v), float(to_f64(v))]);
    }
    unary_rows(&mut table, "marginal_x", &parts.marginal_x);
    unary_rows(&mut table, "marginal_y", &parts.marginal_y);
    for (given, slice) in parts.forward.slices() {
        for (t, v) in slice.entries() {
            table.push(vec!["forward".into(), given.to_string(), t.to_string(), ratio(v), float(to_f64(v))]);
        }
    }
    for (given, slice) in parts.backward.slices() {
        for (t, v) in slice.entries() {
            table.push(vec!["backward".into(), t.to_string(), given.to_string(), ratio(v), float(to_f64(v))]);
        }
    }
    unary_rows(&mut table, "kernel", &kernel);
    Ok(Report { json, table })
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn code_summary(
    code: &LinearCodeMatrix,
    extra: Vec<(&str, Value)>,
    with_spectrum: bool,
    lim: &EnumLimits,
) -> Result<Report, CliError> {
    let g = code.generator();
    let nonzeros: usize = g.row_weights().iter().sum();
    let mut json = json!({
        "q": code.q(),
        "n": code.n(),
        "m": code.m(),
        "rate": code.rate().to_string(),
        "rank": code.rank(),
        "generator": g.to_rows(),
        "row_weights": g.row_weights(),
        "col_weights": g.col_weights(),
        "nonzeros": nonzeros,
    });
    let mut table = Table::new(vec!["field", "value"]);
    for (k, v) in [("q", code.q() as usize), ("n", code.n()), ("m", code.m()), ("rank", code.rank()), ("nonzeros", nonzeros)] {
        table.push(vec![k.into(), v.to_string()]);
    }
    table.push(vec!["rate".into(), code.rate().to_string()]);
    for (k, v) in extra {
        let text = match &v {
            Value::Array(items) => items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
            other => other.to_string(),
        };
        table.push(vec![k.into(), text]);
        json[k] = v;
    }
    table.push(vec!["row_weights".into(), join(&g.row_weights())]);
    table.push(vec!["col_weights".into(), join(&g.col_weights())]);
    for (r, row) in g.to_rows().iter().enumerate() {
        table.push(vec![format!("row{r}"), join(row)]);
    }
    if with_spectrum {
        let joint = JointSpectrum::of_map(code, lim)?;
        for ((p, q), v) in joint.entries() {
            table.push(vec![format!("joint {p} {q}"), ratio(v)]);
        }
        json["joint"] = joint.to_json_value();
    }
    Ok(Report { json, table })
}

fn ldgm(a: &LdgmArgs) -> Result<Report, CliError> {
    let field = FieldSpec::new(a.q)?;
    ldgm_output_len(a.n, a.c, a.d)?;
    if a.q == 2 {
        eprintln!("warning: the LDGM goodness guarantee needs q > 2; a binary code is built but carries no such guarantee");
    }
    let s = sample_ldgm(field, a.n, a.c, a.d, &mut stream_rng(a.seed, 0))?;
    if let Some(path) = &a.matrix_out {
        write_atomic(path, &s.code.generator().to_text())?;
    }
    let extra = vec![
        ("c", json!(a.c)),
        ("d", json!(a.d)),
        ("seed", json!(a.seed)),
        ("interleaver", json!(s.interleaver.perm())),
        ("coefficients", json!(s.coefficients)),
    ];
    code_summary(&s.code, extra, a.spectrum, &limits(&a.output))
}

fn rlc(a: &RlcArgs) -> Result<Report, CliError> {
    let field = FieldSpec::new(a.q)?;
    let code = sample_rlc(field, a.n, a.m, &mut stream_rng(a.seed, 0))?;
    if let Some(path) = &a.matrix_out {
        write_atomic(path, &code.generator().to_text())?;
    }
    code_summary(&code, vec![("seed", json!(a.seed))], a.spectrum, &limits(&a.output))
}

fn delta_row(t: &mut Table, r: &jointspec::DeltaDParams) {
    t.push(vec![
        r.q.to_string(),
        r.d.to_string(),
        float(r.x),
        float(r.y),
        float(r.value),
        float(r.minimizer),
    ]);
}

fn delta_json(r: &jointspec::DeltaDParams) -> Value {
    json!({"q": r.q, "d": r.d, "x": r.x, "y": r.y, "value": jf(r.value), "minimizer": r.minimizer})
}

fn delta(a: &DeltaArgs) -> Result<Report, CliError> {
    let rows = match (a.x, a.y) {
        (Some(x), Some(y)) => vec![delta_d(a.q, a.d, x, y, a.tol)?],
        _ => delta_table(a.q, a.d, a.grid, a.tol)?,
    };
    let mut table = Table::new(vec!["q", "d", "x", "y", "value", "minimizer"]);
    rows.iter().for_each(|r| delta_row(&mut table, r));
    let mut json = json!({ "rows": rows.iter().map(delta_json).collect::<Vec<_>>() });
    if let Some(g) = a.gamma {
        let sup = sup_delta_d(a.q, a.d, g, a.grid, a.tol)?;
        json["sup"] = json!({ "gamma": g, "at": delta_json(&sup) });
    }
    Ok(Report { json, table })
}

fn d0(a: &D0Args) -> Result<Report, CliError> {
    if a.c <= 0 || a.d <= 0 {
        return Err(CliError::Usage("--c and --d must be positive".into()));
    }
    let r = Rational64::new(a.c, a.d);
    let rep = d0_search(a.q, r, a.gamma, a.delta, a.d_max, a.grid, a.tol)?;
    let mut table = Table::new(vec!["d", "c", "sup_delta", "scaled", "meets_delta"]);
    for row in &rep.rows {
        table.push(vec![
            row.d.to_string(),
            row.c.to_string(),
            float(row.sup_delta),
            float(row.scaled),
            (row.scaled <= a.delta).to_string(),
        ]);
    }
    let json = json!({
        "ratio": r.to_string(),
        "d0": rep.d0,
        "rows": rep.rows.iter().map(|x| json!({"d": x.d, "c": x.c, "sup_delta": jf(x.sup_delta), "scaled": jf(x.scaled)})).collect::<Vec<_>>(),
    });
    Ok(Report { json, table })
}

fn estimate_json(e: &McEstimate) -> Value {
    json!({"mean": e.mean, "std_err": e.std_err, "trials": e.trials, "seed": e.seed, "target": e.target})
}

fn rank(a: &RankArgs) -> Result<Report, CliError> {
    let exact = rank_full_probability(a.q, a.n, a.m)?;
    let mut table = Table::new(vec!["quantity", "k", "exact", "decimal"]);
    table.push(vec!["full_rank".into(), String::new(), ratio(&exact), float(to_f64(&exact))]);
    let mut bounds = Vec::new();
    for k in 1..=a.m {
        let b = rank_lower_bound(a.q, a.n, a.m, k)?;
        table.push(vec!["lower_bound".into(), k.to_string(), ratio(&b), float(to_f64(&b))]);
        bounds.push(json!({"k": k, "exact": ratio(&b), "decimal": to_f64(&b)}));
    }
    let mut json = json!({
        "exact": ratio(&exact),
        "decimal": to_f64(&exact),
        "lower_bounds": bounds,
    });
    if a.m == a.n {
        let sq = square_rank_bound(a.q);
        table.push(vec!["square_bound".into(), String::new(), ratio(&sq), float(to_f64(&sq))]);
        json["square_bound"] = json!({"exact": ratio(&sq), "decimal": to_f64(&sq)});
    }
    if let Some(trials) = a.trials {
        let e = estimate_rank_rate(a.q, a.n, a.m, trials, a.seed)?;
        table.push(vec!["estimate".into(), String::new(), String::new(), float(e.mean)]);
        table.push(vec!["std_err".into(), String::new(), String::new(), float(e.std_err)]);
        json["estimate"] = estimate_json(&e);
    }
    Ok(Report { json, table })
}

fn need<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--kind {kind} needs --{flag}")))
}

/// Resolves the ensemble flags. Returns the ensemble and the seed stored in
/// a spec file, if one was given.
fn ensemble(a: &EnsembleArgs) -> Result<(EnsembleKind, Option<u64>), CliError> {
    if let Some(path) = &a.spec {
        let spec: EnsembleSpec = serde_json::from_str(&read_text(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        spec.kind.validate()?;
        return Ok((spec.kind, Some(spec.seed)));
    }
    if let Some(path) = &a.matrix {
        return Ok((EnsembleKind::Fixed { generator: read_matrix(path)? }, None));
    }
    let kind = a.kind.ok_or_else(|| CliError::Usage("give one of --kind, --spec or --matrix".into()))?;
    let name = format!("{kind:?}").to_lowercase();
    let q = need(a.q, "q", &name)?;
    let k = match kind {
        KindArg::Rlc => EnsembleKind::Rlc { q, n: need(a.n, "n", &name)?, m: need(a.m, "m", &name)? },
        KindArg::Chk => EnsembleKind::Chk { q, d: need(a.d, "d", &name)? },
        KindArg::ChkParallel => EnsembleKind::ChkParallel { q, d: need(a.d, "d", &name)?, m: need(a.m, "m", &name)? },
        KindArg::RepParallel => EnsembleKind::RepParallel { q, c: need(a.c, "c", &name)?, n: need(a.n, "n", &name)? },
        KindArg::Ldgm => {
            EnsembleKind::Ldgm { q, n: need(a.n, "n", &name)?, c: need(a.c, "c", &name)?, d: need(a.d, "d", &name)? }
        }
    };
    k.validate()?;
    Ok((k, None))
}

/// Exact expected joint spectrum, preferring closed forms where they exist.
fn exact_expectation(kind: &EnsembleKind, lim: &EnumLimits) -> Result<JointSpectrum, Error> {
    match *kind {
        EnsembleKind::Ldgm { q, n, c, d } => ldgm_expected_joint(q, n, c, d),
        EnsembleKind::ChkParallel { q, d, m } => ExpectedChkSpectrum::new(q, d, m)?.table(),
        EnsembleKind::Chk { q, d } => ExpectedChkSpectrum::new(q, d, 1)?.table(),
        _ => kind.expected_joint_spectrum(lim),
    }
}

fn goodness_json(g: &Goodness) -> Value {
    json!({
        "exponent": jf(g.exponent),
        "max_ratio": ratio(&g.max_ratio),
        "argmax": g.argmax.iter().map(|t| t.counts().to_vec()).collect::<Vec<_>>(),
    })
}

fn goodness_row(t: &mut Table, name: &str, g: &Goodness) {
    let arg = g.argmax.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    t.push(vec![name.into(), float(g.exponent), ratio(&g.max_ratio), arg]);
}

fn goodness(a: &GoodnessArgs) -> Result<Report, CliError> {
    let lim = limits(&a.output);
    let (kind, _) = ensemble(&a.ensemble)?;
    let joint = exact_expectation(&kind, &lim)?;
    let jscc = jscc_goodness(&joint)?;
    let mut table = Table::new(vec!["functional", "exponent", "max_ratio", "argmax"]);
    goodness_row(&mut table, "jscc", &jscc);
    let mut json = json!({ "ensemble": kind, "jscc": goodness_json(&jscc) });
    match kind.expected_image_spectrum(&lim) {
        Ok(img) => {
            let g = image_goodness(&img)?;
            goodness_row(&mut table, "image", &g);
            json["image"] = goodness_json(&g);
        }
        Err(Error::EnumerationLimit { what, size, limit }) => {
            json["image"] = Value::Null;
            json["image_skipped"] = json!(format!("{what} needs {size} items, limit {limit}"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Report { json, table })
}

fn ldgm_bound(a: &LdgmBoundArgs) -> Result<Outcome, CliError> {
    let m = ldgm_output_len(a.n, a.c, a.d)?;
    let mut table = Table::new(vec!["P", "Q", "lhs", "rhs", "satisfied", "slack"]);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for p in TypeVector::all(a.q, a.n) {
        if p.is_zero_type() {
            continue;
        }
        for q in TypeVector::all(a.q, m) {
            let r = ldgm_alpha_bound(a.q, a.n, a.c, a.d, &p, &q, a.tol)?;
            if !r.satisfied {
                failures.push(format!("P={p} Q={q}"));
            }
            table.push(vec![
                p.to_string(),
                q.to_string(),
                float(r.lhs.as_f64()),
                float(r.rhs.as_f64()),
                r.satisfied.to_string(),
                r.slack.map(float).unwrap_or_else(|| "inf".into()),
            ]);
            rows.push(json!({
                "P": p.counts(), "Q": q.counts(),
                "lhs": jf(r.lhs.as_f64()), "rhs": jf(r.rhs.as_f64()),
                "satisfied": r.satisfied, "slack": r.slack.map(jf),
            }));
        }
    }
    let json = json!({ "m": m, "all_satisfied": failures.is_empty(), "rows": rows });
    let deferred = (!failures.is_empty()).then(|| CliError::Verification(format!("LDGM bound violated at {}", failures.join(", "))));
    Ok(Outcome { report: Report { json, table }, deferred })
}

fn parse_word(s: &str) -> Result<Vec<u32>, CliError> {
    s.split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|_| CliError::Usage(format!("bad input symbol `{t}`"))))
        .collect()
}

fn mc(a: &McArgs) -> Result<Report, CliError> {
    let lim = limits(&a.output);
    let (kind, file_seed) = ensemble(&a.ensemble)?;
    let seed = file_seed.unwrap_or(a.seed);
    let spec = EnsembleSpec::new(kind, seed)?;
    match a.estimand {
        Estimand::Rank => {
            let (q, n, m) = match spec.kind {
                EnsembleKind::Rlc { q, n, m } => (q, n, m),
                _ => return Err(CliError::Usage("the rank estimand needs --kind rlc".into())),
            };
            let e = estimate_rank_rate(q, n, m, a.trials, seed)?;
            let exact = rank_full_probability(q, n, m)?;
            let mut table = Table::new(vec!["mean", "std_err", "exact", "decimal"]);
            table.push(vec![float(e.mean), float(e.std_err), ratio(&exact), float(to_f64(&exact))]);
            let json = json!({"estimate": estimate_json(&e), "exact": ratio(&exact)});
            Ok(Report { json, table })
        }
        Estimand::Uniformity => {
            let x = parse_word(a.input.as_deref().ok_or_else(|| CliError::Usage("--input is required".into()))?)?;
            let r = estimate_uniformity(&spec, &x, a.trials, &lim)?;
            let mut table = Table::new(vec!["output", "count", "mean", "std_err"]);
            for ((label, count), e) in r.histogram.iter().zip(&r.probabilities) {
                table.push(vec![label.clone(), count.to_string(), float(e.mean), float(e.std_err)]);
            }
            let json = serde_json::to_value(&r).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(Report { json, table })
        }
        Estimand::Spectrum => {
            let mode = match a.samples {
                Some(per_trial) => InputMode::Sampled { per_trial },
                None => InputMode::Exhaustive,
            };
            let est = estimate_expected_spectrum(&spec, a.trials, mode, &lim)?;
            let exact = exact_expectation(&spec.kind, &lim).ok();
            let mut keys: BTreeMap<(TypeVector, TypeVector), Option<&McEstimate>> = BTreeMap::new();
            for e in &est.entries {
                keys.insert((e.p.clone(), e.q.clone()), Some(&e.estimate));
            }
            if let Some(x) = &exact {
                for k in x.entries().keys() {
                    keys.entry(k.clone()).or_insert(None);
                }
            }
            let mut table = Table::new(vec!["P", "Q", "mean", "std_err", "exact", "z"]);
            let mut rows = Vec::new();
            for ((p, q), e) in &keys {
                let (mean, se) = e.map_or((0.0, 0.0), |e| (e.mean, e.std_err));
                let ex = exact.as_ref().map(|x| x.get(p, q));
                let z = ex.as_ref().map(|v| {
                    let diff = mean - to_f64(v);
                    if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY }
                });
                table.push(vec![
                    p.to_string(),
                    q.to_string(),
                    float(mean),
                    float(se),
                    ex.as_ref().map(ratio).unwrap_or_default(),
                    z.map(float).unwrap_or_default(),
                ]);
                rows.push(json!({
                    "P": p.counts(), "Q": q.counts(), "mean": mean, "std_err": se,
                    "exact": ex.as_ref().map(ratio), "z": z.map(jf),
                }));
            }
            let json = json!({
                "ensemble": spec, "trials": a.trials, "mode": mode,
                "total_mean": est.total_mean(), "entries": rows,
            });
            Ok(Report { json, table })
        }
    }
}

fn run_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let checks = verify::run_all(&limits(&a.output));
    let mut table = Table::new(vec!["check", "passed", "detail"]);
    for c in &checks {
        table.push(vec![c.name.into(), c.passed.to_string(), c.detail.clone()]);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let json = json!({ "passed": failed.is_empty(), "checks": checks });
    let deferred = (!failed.is_empty()).then(|| CliError::Verification(failed.join(", ")));
    Ok(Outcome { report: Report { json, table }, deferred })
}
