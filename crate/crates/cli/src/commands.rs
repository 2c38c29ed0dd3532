use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use modsetlab::acceptance;
use modsetlab::exact;
use modsetlab::experiments::{self, convergence_report, run_sweep, RegimeSpec};
use modsetlab::graph;
use modsetlab::oracle::{self, Event};
use modsetlab::report;
use modsetlab::{is_prime, BigRational, Probability, RationalRecord};
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Params;
use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    /// Independent r-sets of the m-vertex path (--n m --k r)
    #[value(name = "path")]
    Path,
    /// Independent k-sets of the n-cycle
    #[value(name = "cycle")]
    Cycle,
    /// Lucas number L_n
    #[value(name = "lucas")]
    Lucas,
    /// F(n) at probability p
    #[value(name = "F")]
    F,
    /// n (1-p^2)^((n+1)/2), with the exact expectation alongside
    #[value(name = "ESc")]
    ESc,
    /// P(k not in A-A, A nonempty) for prime n
    #[value(name = "PdiffMissing")]
    PdiffMissing,
    /// Per-cycle product for composite n
    #[value(name = "PdiffComposite")]
    PdiffComposite,
    /// P(i, j both missing from A+A) for prime n
    #[value(name = "PbothSums")]
    PbothSums,
    /// Expected missing nonzero differences and the 2nF(n) bound
    #[value(name = "EDc")]
    EDc,
    /// Gauge functions G and h
    #[value(name = "gauges")]
    Gauges,
    /// Limiting S, D and D/S for a regime
    #[value(name = "targets")]
    Targets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleEvent {
    DiffMissing,
    SumMissing,
    BothSums,
    Moments,
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphMode {
    Sum,
    Diff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Dot,
}

fn print_json(v: &Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn record(r: &BigRational) -> RationalRecord {
    RationalRecord::from(r)
}

fn integer(v: impl Into<num_bigint::BigInt>) -> RationalRecord {
    record(&BigRational::from_integer(v.into()))
}

/// Resolved configuration stored in output headers. The worker count is
/// left out: it does not affect results, and output must not depend on it.
fn resolved(command: &str, params: &Params, extra: Value) -> Value {
    let params = Params {
        workers: None,
        ..params.clone()
    };
    json!({
        "command": command,
        "params": params,
        "resolved": extra,
    })
}

fn sweep_spec(params: &Params, default_trials: u64) -> Result<RegimeSpec, Failure> {
    let regime = params.regime()?;
    let mut spec = RegimeSpec::new(
        regime,
        params.moduli()?,
        params.trials.unwrap_or(default_trials),
        params.seed()?,
    );
    spec.require_prime = params.require_prime;
    spec.kmax = params.kmax.unwrap_or(if params.moments {
        experiments::DEFAULT_KMAX
    } else {
        0
    });
    Ok(spec)
}

fn spec_resolution(spec: &RegimeSpec) -> Result<Value, Failure> {
    let probabilities = spec
        .n_values
        .iter()
        .map(|&n| Ok(json!({ "n": n, "p": spec.regime.probability(n)?.to_string() })))
        .collect::<Result<Vec<_>, modsetlab::Error>>()?;
    Ok(json!({
        "spec": spec,
        "probabilities": probabilities,
    }))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Param(format!("cannot create {}: {e}", path.display())))
}

pub fn sample(params: &Params) -> Result<(), Failure> {
    let spec = sweep_spec(params, 1)?;
    let config = resolved("sample", params, spec_resolution(&spec)?);
    let sweep = run_sweep(&spec, params.workers)?;
    match &params.out {
        Some(path) => report::write_trials_csv(create(path)?, &sweep.records, spec.kmax, &config)?,
        None => report::write_trials_csv(io::stdout().lock(), &sweep.records, spec.kmax, &config)?,
    }
    if spec.trials > 1 {
        for a in &sweep.aggregates {
            eprintln!(
                "n={} trials={} mean|A|={:.3} meanS={:.3} meanD={:.3} meanD/S={:.5}",
                a.n, a.trials, a.card.mean, a.s.mean, a.d.mean, a.ratio.mean
            );
        }
    }
    Ok(())
}

pub fn sweep(params: &Params) -> Result<(), Failure> {
    let spec = sweep_spec(params, 100)?;
    let config = resolved("sweep", params, spec_resolution(&spec)?);
    let sweep = run_sweep(&spec, params.workers)?;
    let mut rows = Vec::new();
    for agg in &sweep.aggregates {
        rows.extend(convergence_report(agg, &spec.regime)?);
    }
    let doc = report::sweep_json(&sweep, &rows, &config);
    match &params.out {
        Some(prefix) => {
            let csv_path = with_suffix(prefix, "csv");
            let json_path = with_suffix(prefix, "json");
            report::write_trials_csv(create(&csv_path)?, &sweep.records, spec.kmax, &config)?;
            let mut w = create(&json_path)?;
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
            w.flush()?;
            eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
        }
        None => print_json(&doc)?,
    }
    Ok(())
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn exact_p(params: &Params) -> Result<(Probability, BigRational), Failure> {
    let p = params.probability()?;
    let e = p.exact().clone();
    Ok((p, e))
}

pub fn exact(formula: Formula, params: &Params) -> Result<(), Failure> {
    let n = params.single_n()?;
    let name = formula.to_possible_value().expect("no skipped variants");
    let mut out = json!({ "formula": name.get_name(), "n": n });
    let fields = out.as_object_mut().expect("object literal");
    let mut put = |key: &str, v: Value| {
        fields.insert(key.to_string(), v);
    };
    match formula {
        Formula::Path => {
            let r = params.k()?;
            put("k", json!(r));
            put("value", json!(integer(exact::path_count(n, r))));
        }
        Formula::Cycle => {
            let k = params.k()?;
            put("k", json!(k));
            put("value", json!(integer(exact::cycle_count(n, k)?)));
        }
        Formula::Lucas => put("value", json!(integer(exact::lucas(n)))),
        Formula::F => {
            let (p, e) = exact_p(params)?;
            put("p", json!(p.to_string()));
            put("value", json!(record(&exact::f_series(n, &e))));
        }
        Formula::ESc => {
            let (p, e) = exact_p(params)?;
            put("p", json!(p.to_string()));
            put(
                "value",
                json!(record(&exact::expected_missing_sums(n, &e)?)),
            );
            put(
                "exact_expectation",
                json!(record(&exact::exact_expected_missing_sums(n, &e)?)),
            );
        }
        Formula::PdiffMissing => {
            let (p, e) = exact_p(params)?;
            put("p", json!(p.to_string()));
            put("value", json!(record(&exact::prob_diff_missing(n, &e)?)));
        }
        Formula::PdiffComposite => {
            let (p, e) = exact_p(params)?;
            let k = params.k()?;
            put("p", json!(p.to_string()));
            put("k", json!(k));
            put(
                "value",
                json!(record(&exact::prob_diff_missing_composite(n, k, &e)?)),
            );
        }
        Formula::PbothSums => {
            let (p, e) = exact_p(params)?;
            put("p", json!(p.to_string()));
            put(
                "value",
                json!(record(&exact::prob_both_sums_missing(n, &e)?)),
            );
        }
        Formula::EDc => {
            let (p, e) = exact_p(params)?;
            let m = exact::expected_missing_diffs(n, &e)?;
            put("p", json!(p.to_string()));
            put("value", json!(record(&m.value)));
            put("bound", json!(record(&m.bound)));
        }
        Formula::Gauges => {
            let (p, _) = exact_p(params)?;
            put("p", json!(p.to_string()));
            put(
                "value",
                serde_json::to_value(exact::gauge_functions(n, p.to_f64())?)?,
            );
        }
        Formula::Targets => {
            let regime = params.regime()?;
            let target = regime.target_regime().ok_or_else(|| {
                Failure::Param(format!("no limit targets for the {} regime", regime.name()))
            })?;
            put("regime", serde_json::to_value(&regime)?);
            put(
                "value",
                serde_json::to_value(exact::theoretical_targets(target, n)?)?,
            );
        }
    }
    print_json(&out)
}

#[derive(Serialize)]
struct Comparison {
    quantity: String,
    oracle: RationalRecord,
    closed_form: RationalRecord,
    equal: bool,
    /// Whether equality is expected; composite-modulus forms are reported only.
    asserted: bool,
    delta: RationalRecord,
}

fn compare(
    quantity: &str,
    oracle: &BigRational,
    closed: &BigRational,
    asserted: bool,
) -> Comparison {
    Comparison {
        quantity: quantity.to_string(),
        oracle: record(oracle),
        closed_form: record(closed),
        equal: oracle == closed,
        asserted,
        delta: record(&(oracle - closed)),
    }
}

pub fn oracle(event: OracleEvent, params: &Params) -> Result<(), Failure> {
    let n = params.single_n()?;
    let nu = n as usize;
    let (p, e) = exact_p(params)?;
    let incl = params.include_empty;
    // Weight of the empty set, for moving closed forms between conventions.
    let empty = num_traits::pow(BigRational::one() - &e, nu);
    let if_excluded = |v: &BigRational| if incl { BigRational::zero() } else { v.clone() };
    let if_included = |v: &BigRational| if incl { v.clone() } else { BigRational::zero() };
    let mut rows = Vec::new();
    match event {
        OracleEvent::DiffMissing => {
            let k = params.k()?;
            let o =
                oracle::oracle_event_probability(nu, &e, &Event::DiffMissing(k as usize), incl)?;
            let closed = exact::prob_diff_missing(n, &e)? + if_included(&empty);
            rows.push(compare("P(k not in A-A)", &o, &closed, is_prime(n)));
        }
        OracleEvent::SumMissing => {
            let k = params.k()?;
            let o = oracle::oracle_event_probability(nu, &e, &Event::SumMissing(k as usize), incl)?;
            let per_residue =
                exact::exact_expected_missing_sums(n, &e)? / BigRational::from_integer(n.into());
            let closed = per_residue - if_excluded(&empty);
            rows.push(compare("P(k not in A+A)", &o, &closed, true));
        }
        OracleEvent::BothSums => {
            let (i, j) = match (params.i, params.j) {
                (Some(i), Some(j)) => (i, j),
                _ => return Err(Failure::Param("--i and --j are required".into())),
            };
            let ev = Event::BothSumsMissing(i as usize, j as usize);
            let o = oracle::oracle_event_probability(nu, &e, &ev, incl)?;
            let closed = exact::prob_both_sums_missing(n, &e)? - if_excluded(&empty);
            rows.push(compare("P(i, j not in A+A)", &o, &closed, is_prime(n)));
        }
        OracleEvent::Composite => {
            let k = params.k()?;
            let o =
                oracle::oracle_event_probability(nu, &e, &Event::DiffMissing(k as usize), incl)?;
            let closed = exact::prob_diff_missing_composite(n, k, &e)?;
            rows.push(compare(
                "P(k not in A-A), per-cycle product",
                &o,
                &closed,
                false,
            ));
        }
        OracleEvent::Moments => {
            let m = oracle::oracle_moments(nu, &e, incl)?;
            // The empty set has all n sums and all n differences missing.
            let n_empty = &empty * BigRational::from_integer(n.into());
            if n % 2 == 1 {
                let two_element = exact::expected_missing_sums(n, &e)? - if_excluded(&n_empty);
                rows.push(compare(
                    "E[Sc], two-element form",
                    &m.e_sc,
                    &two_element,
                    true,
                ));
                let exact_sc = exact::exact_expected_missing_sums(n, &e)? - if_excluded(&n_empty);
                rows.push(compare("E[Sc], exact", &m.e_sc, &exact_sc, true));
            }
            if is_prime(n) {
                let dc = exact::expected_missing_diffs(n, &e)?.value + if_included(&n_empty);
                rows.push(compare("E[Dc]", &m.e_dc, &dc, true));
            }
        }
    }
    let failed: Vec<&str> = rows
        .iter()
        .filter(|r| r.asserted && !r.equal)
        .map(|r| r.quantity.as_str())
        .collect();
    print_json(&json!({
        "event": event,
        "n": n,
        "p": p.to_string(),
        "k": params.k,
        "include_empty": incl,
        "rows": rows,
    }))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(format!(
            "oracle and closed form differ: {}",
            failed.join(", ")
        )))
    }
}

pub fn graphs(mode: GraphMode, format: GraphFormat, params: &Params) -> Result<(), Failure> {
    let n = params.single_n()? as usize;
    let (g, name) = match mode {
        GraphMode::Sum => {
            let (i, j) = match (params.i, params.j) {
                (Some(i), Some(j)) => (i as usize, j as usize),
                _ => return Err(Failure::Param("--i and --j are required".into())),
            };
            (graph::build_sum_graph(n, i, j)?, format!("sum_{n}_{i}_{j}"))
        }
        GraphMode::Diff => {
            let k = params.k()? as usize;
            (graph::build_diff_graph(n, k)?, format!("diff_{n}_{k}"))
        }
    };
    match format {
        GraphFormat::Dot => {
            print!("{}", g.to_dot(&name));
            Ok(())
        }
        GraphFormat::Json => print_json(&json!({
            "n": n,
            "mode": match mode { GraphMode::Sum => "sum", GraphMode::Diff => "diff" },
            "classification": g.kind(),
            "loops": g.loops(),
            "edges": g.edges(),
        })),
    }
}

pub fn acceptance(selected: &[u8], as_json: bool) -> Result<(), Failure> {
    if selected
        .iter()
        .any(|&id| id == 0 || id as usize > acceptance::CRITERIA.len())
    {
        return Err(Failure::Param(format!(
            "criteria are numbered 1 to {}",
            acceptance::CRITERIA.len()
        )));
    }
    let mut reports = Vec::new();
    for (idx, f) in acceptance::CRITERIA.iter().enumerate() {
        let id = idx as u8 + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let r = f()?;
        if !as_json {
            print!("{r}");
        }
        reports.push(r);
    }
    if as_json {
        print_json(&serde_json::to_value(&reports)?)?;
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.id.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(format!(
            "failed criteria: {}",
            failed.join(", ")
        )))
    }
}
