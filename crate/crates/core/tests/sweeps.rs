use modsetlab::experiments::{convergence_report, run_sweep, Regime, RegimeSpec};
use modsetlab::report::write_trials_csv;
use modsetlab::{Error, Probability};

fn csv_bytes(spec: &RegimeSpec, workers: usize) -> Vec<u8> {
    let sweep = run_sweep(spec, Some(workers)).unwrap();
    let mut buf = Vec::new();
    write_trials_csv(&mut buf, &sweep.records, spec.kmax, &serde_json::json!({})).unwrap();
    buf
}

#[test]
fn byte_identical_across_worker_counts() {
    let mut spec = RegimeSpec::new(Regime::Critical { c: 1.0 }, vec![1009, 2003, 4001], 60, 42);
    spec.kmax = 3;
    let one = csv_bytes(&spec, 1);
    assert_eq!(one, csv_bytes(&spec, 3));
    assert_eq!(one, csv_bytes(&spec, 8));
    // header + comment lines + one row per trial
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 3 + 180);
}

#[test]
fn require_prime_is_enforced() {
    let mut spec = RegimeSpec::new(Regime::Fast { delta: 0.7 }, vec![1000], 1, 0);
    spec.require_prime = true;
    assert!(matches!(run_sweep(&spec, None), Err(Error::NotPrime(1000))));
}

#[test]
fn empty_sets_have_no_ratio() {
    let spec = RegimeSpec::new(
        Regime::Fixed {
            p: Probability::zero(),
        },
        vec![50],
        10,
        1,
    );
    let sweep = run_sweep(&spec, None).unwrap();
    assert!(sweep
        .records
        .iter()
        .all(|r| r.ratio.is_none() && r.sc == 50));
    assert_eq!(sweep.aggregates[0].ratio.count, 0);
}

#[test]
fn intermediate_missing_counts_match_exact_expectations() {
    let regime = Regime::Intermediate { gamma: 1.0 };
    let spec = RegimeSpec::new(regime.clone(), vec![10007], 500, 2024);
    let sweep = run_sweep(&spec, None).unwrap();
    let rows = convergence_report(&sweep.aggregates[0], &regime).unwrap();
    let sc = rows.iter().find(|r| r.quantity == "Sc").unwrap();
    assert!(sc.z_score() <= 3.0, "{sc:?}");
    let dc = rows.iter().find(|r| r.quantity == "Dc").unwrap();
    assert!(dc.z_score() <= 3.0, "{dc:?}");
}

#[test]
fn critical_c2_difference_density() {
    let regime = Regime::Critical { c: 2.0 };
    let sweep = run_sweep(&RegimeSpec::new(regime.clone(), vec![10007], 200, 5), None).unwrap();
    let rows = convergence_report(&sweep.aggregates[0], &regime).unwrap();
    let d = rows.iter().find(|r| r.quantity == "D/n").unwrap();
    assert!((d.target - (1.0 - (-4.0f64).exp())).abs() < 1e-12);
    assert!(d.abs_error <= 0.02, "{d:?}");
    let s = rows.iter().find(|r| r.quantity == "S/n").unwrap();
    assert!(s.abs_error <= 0.02, "{s:?}");
}

#[test]
fn critical_spread_is_driven_by_set_size() {
    // S/n ~ 1 - exp(-|A|^2 / 2n) with |A| ~ Bin(n, p); the delta method gives
    // sd(S/n) ~ exp(-c^2/2) p sqrt(np).
    let spec = RegimeSpec::new(Regime::Critical { c: 1.0 }, vec![10007], 500, 8);
    let agg = &run_sweep(&spec, None).unwrap().aggregates[0];
    let n = 10007f64;
    let sd = agg.s.variance.sqrt() / n;
    let predicted = (-0.5f64).exp() * agg.p_float * (n * agg.p_float).sqrt();
    assert!((sd / predicted - 1.0).abs() < 0.2, "{sd} vs {predicted}");
}

#[test]
fn slow_and_fixed_reports() {
    let regime = Regime::Slow { delta: 0.25 };
    let sweep = run_sweep(&RegimeSpec::new(regime.clone(), vec![2003], 20, 3), None).unwrap();
    let rows = convergence_report(&sweep.aggregates[0], &regime).unwrap();
    assert_eq!(rows[0].quantity, "frac(S=n)");
    assert_eq!(rows[0].empirical, 1.0);
}
