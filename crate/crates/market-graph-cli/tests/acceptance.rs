//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities. Run with `cargo test -p market-graph-cli --test
//! acceptance -- --nocapture` to see the report.

use std::time::Instant;

use num_bigint::BigInt;

use market_graph::graph::{CorrelationMatrix, SignProbabilityMatrix};
use market_graph::risk::{
    loss, risk_sweep, write_risk_csv, LossSpec, PairCounting, ProcedureKind, RiskCurve,
};
use market_graph::sampling::{sample, DistributionSpec, Sampler};
use market_graph::sign::{critical_value, sign_counts};
use market_graph::{reference_graph, sign, AlphaSpec, SquareMatrix};
use market_graph_cli::config::{ExperimentConfig, LevelSpec, SIGMA2_ROLE_CSV};
use market_graph_cli::experiment::run_risk_experiment;

fn report(criterion: &str, details: String) {
    println!("PASS {criterion}: {details}");
}

// ---------------------------------------------------------------------------
// criterion 1: exact critical values on the full grid
// ---------------------------------------------------------------------------

/// Exact rational value of a finite positive f64 as (numerator, denominator).
fn f64_to_ratio(x: f64) -> (BigInt, BigInt) {
    assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & 0xf_ffff_ffff_ffff;
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074i64) // subnormal
    } else {
        (fraction | (1 << 52), exponent - 1075)
    };
    let m = BigInt::from(mantissa);
    if exp >= 0 {
        (m << exp, BigInt::from(1))
    } else {
        (m, BigInt::from(1) << (-exp))
    }
}

/// Brute-force oracle: minimal c such that the exact rational upper tail of
/// Binomial(n, p0) at c is at most alpha, with p0 and alpha taken as the
/// exact rationals the f64 inputs denote. Pure integer arithmetic.
fn critical_value_oracle(n: u64, p0: f64, alpha: f64) -> u64 {
    let (p_num, p_den) = f64_to_ratio(p0);
    let q_num = &p_den - &p_num;
    let (a_num, a_den) = f64_to_ratio(alpha);

    // binomial coefficients of row n
    let nn = n as usize;
    let mut coeff = vec![BigInt::from(1); nn + 1];
    for k in 0..nn {
        coeff[k + 1] = &coeff[k] * (n - k as u64) / (k as u64 + 1);
    }
    // powers of the numerators
    let mut pow_p = vec![BigInt::from(1); nn + 1];
    let mut pow_q = vec![BigInt::from(1); nn + 1];
    for k in 1..=nn {
        pow_p[k] = &pow_p[k - 1] * &p_num;
        pow_q[k] = &pow_q[k - 1] * &q_num;
    }
    // suffix sums of terms over the common denominator p_den^n
    let mut den = BigInt::from(1);
    for _ in 0..nn {
        den *= &p_den;
    }
    let mut suffix = vec![BigInt::from(0); nn + 2];
    for k in (0..=nn).rev() {
        suffix[k] = &suffix[k + 1] + &coeff[k] * &pow_p[k] * &pow_q[nn - k];
    }
    // minimal c with suffix[c]/den <= a_num/a_den
    for c in 0..=(n + 1) {
        let tail_num = &suffix[c as usize];
        if tail_num * &a_den <= &a_num * &den {
            return c;
        }
    }
    unreachable!("tail at c = n+1 is zero");
}

#[test]
fn criterion_1_critical_values_match_exact_enumeration() {
    let start = Instant::now();
    let alphas = [0.01, 0.05, 0.1, 0.25, 0.5];
    let p0s: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for n in 1..=50u64 {
        for &p0 in &p0s {
            for &alpha in &alphas {
                let got = critical_value(n, p0, alpha).unwrap();
                let want = critical_value_oracle(n, p0, alpha);
                checked += 1;
                if got != want {
                    mismatches.push((n, p0, alpha, got, want));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        mismatches.is_empty(),
        "critical-value mismatches: {mismatches:?}"
    );
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "oracle comparison took {elapsed:?}, budget is 10 s"
    );
    report(
        "critical-value oracle",
        format!("{checked} combinations, zero mismatches, {elapsed:.2?}"),
    );
}

// ---------------------------------------------------------------------------
// criterion 2: size control of the sign edge test
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_sign_test_size_control() {
    let start = Instant::now();
    let n = 400u64;
    let p0 = 0.5;
    let reps = 10_000usize;
    let alphas = [0.5, 0.1, 0.05];
    let crits: Vec<u64> = alphas
        .iter()
        .map(|&a| critical_value(n, p0, a).unwrap())
        .collect();

    let sigma = CorrelationMatrix::identity(2).unwrap();
    let sampler = Sampler::new(&DistributionSpec::gaussian(sigma, 2024)).unwrap();
    let mut rejects = [0usize; 3];
    for rep in 0..reps {
        let x = sampler.replicate(rep as u64, n as usize);
        let v = sign_counts(x.series(0), x.series(1)).unwrap().v;
        for (slot, &c) in rejects.iter_mut().zip(&crits) {
            if v > c {
                *slot += 1;
            }
        }
    }
    let mut details = Vec::new();
    for (i, &alpha) in alphas.iter().enumerate() {
        let rate = rejects[i] as f64 / reps as f64;
        let bound = alpha + 3.0 * (alpha * (1.0 - alpha) / reps as f64).sqrt();
        assert!(
            rate <= bound,
            "alpha = {alpha}: empirical rejection rate {rate} exceeds {bound}"
        );
        details.push(format!("alpha {alpha}: rate {rate:.4} <= {bound:.4}"));
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "size-control run took {elapsed:?}, budget is 1 min"
    );
    report(
        "size control",
        format!("{} ({elapsed:.2?})", details.join("; ")),
    );
}

// ---------------------------------------------------------------------------
// criterion 3: arcsine law for both families
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_arcsine_law() {
    let cases = [
        (0.0f64, 0.5f64),
        (0.5, 2.0 / 3.0),
        (0.9, 0.85643370687129373),
    ];
    let n = 1_050_000usize; // >= 1e6 observations per case
    let mut details = Vec::new();
    for (case_idx, &(rho, target)) in cases.iter().enumerate() {
        let sigma = if rho == 0.0 {
            CorrelationMatrix::identity(2).unwrap()
        } else {
            CorrelationMatrix::equicorrelated(2, rho).unwrap()
        };
        for student in [false, true] {
            let seed = 900 + 10 * case_idx as u64 + student as u64;
            let spec = if student {
                DistributionSpec::student(sigma.clone(), 3.0, seed).unwrap()
            } else {
                DistributionSpec::gaussian(sigma.clone(), seed)
            };
            let x = sample(&spec, n).unwrap();
            let c = sign_counts(x.series(0), x.series(1)).unwrap();
            let p_hat = c.v as f64 / c.n as f64;
            assert!(
                (p_hat - target).abs() <= 0.01,
                "rho = {rho}, student = {student}: estimate {p_hat} vs target {target}"
            );
            details.push(format!(
                "rho {rho} {}: |{p_hat:.4} - {target:.4}| <= 0.01",
                if student { "student" } else { "gaussian" }
            ));
        }
    }
    report("arcsine law", details.join("; "));
}

// ---------------------------------------------------------------------------
// criteria 4, 5, 7: risk-curve contrasts
// ---------------------------------------------------------------------------

fn paper_grid() -> Vec<f64> {
    ExperimentConfig::default().grid().unwrap()
}

/// Runs the published sweep (N = 30, n = 400, R = 500) at one level and
/// returns (sign curve, pearson curve).
fn sweep(sigma: &CorrelationMatrix, student: bool, alpha: f64, seed: u64) -> (RiskCurve, RiskCurve) {
    let dist = if student {
        DistributionSpec::student(sigma.clone(), 3.0, seed).unwrap()
    } else {
        DistributionSpec::gaussian(sigma.clone(), seed)
    };
    let curves = risk_sweep(
        &dist,
        400,
        &paper_grid(),
        &LossSpec::from_alpha(alpha).unwrap(),
        &[ProcedureKind::Sign, ProcedureKind::Pearson],
        500,
    )
    .unwrap();
    let mut it = curves.into_iter();
    (it.next().unwrap(), it.next().unwrap())
}

fn sigma2_role() -> CorrelationMatrix {
    let rows: Vec<Vec<f64>> = SIGMA2_ROLE_CSV
        .lines()
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    CorrelationMatrix::validate(SquareMatrix::from_rows(&rows).unwrap()).unwrap()
}

#[test]
fn criterion_4_gaussian_alpha_contrast() {
    let sigma = CorrelationMatrix::identity(30).unwrap();
    let (sign_05, pearson_05) = sweep(&sigma, false, 0.5, 41);
    let (sign_01, pearson_01) = sweep(&sigma, false, 0.1, 41);
    let mut details = Vec::new();
    for (name, hi, lo) in [
        ("sign", &sign_05, &sign_01),
        ("pearson", &pearson_05, &pearson_01),
    ] {
        let ratio = lo.max_risk() / hi.max_risk();
        assert!(
            (0.25..=0.45).contains(&ratio),
            "{name}: max-risk ratio {ratio} outside [0.25, 0.45] \
             (alpha 0.5 max {}, alpha 0.1 max {})",
            hi.max_risk(),
            lo.max_risk()
        );
        details.push(format!(
            "{name}: {:.1} -> {:.1}, ratio {ratio:.3} in [0.25, 0.45]",
            hi.max_risk(),
            lo.max_risk()
        ));
    }
    report("gaussian alpha contrast", details.join("; "));
}

#[test]
fn criterion_5_student_contrast_across_matrices() {
    let matrices = [
        ("identity", CorrelationMatrix::identity(30).unwrap()),
        ("two-sector", sigma2_role()),
        ("equicorr 0.9", CorrelationMatrix::equicorrelated(30, 0.9).unwrap()),
    ];
    let mut details = Vec::new();
    for (mi, (name, sigma)) in matrices.iter().enumerate() {
        let seed = 50 + mi as u64;
        let (sign_05, pearson_05) = sweep(sigma, true, 0.5, seed);
        let (sign_01, pearson_01) = sweep(sigma, true, 0.1, seed);
        let pearson_ratio = pearson_01.max_risk() / pearson_05.max_risk();
        let sign_ratio = sign_01.max_risk() / sign_05.max_risk();
        assert!(
            pearson_ratio >= 0.8,
            "{name}: pearson max-risk ratio {pearson_ratio} below 0.8 under Student data \
             ({} -> {})",
            pearson_05.max_risk(),
            pearson_01.max_risk()
        );
        assert!(
            sign_ratio <= 0.45,
            "{name}: sign max-risk ratio {sign_ratio} above 0.45 under Student data \
             ({} -> {})",
            sign_05.max_risk(),
            sign_01.max_risk()
        );
        details.push(format!(
            "{name}: pearson ratio {pearson_ratio:.2} >= 0.8, sign ratio {sign_ratio:.2} <= 0.45"
        ));
    }
    report("student contrast", details.join("; "));
}

#[test]
fn criterion_7_high_correlation_recovery() {
    let sigma = CorrelationMatrix::equicorrelated(30, 0.9).unwrap();
    let dist = DistributionSpec::gaussian(sigma, 4242);
    let curves = risk_sweep(
        &dist,
        400,
        &[0.7],
        &LossSpec::uniform(1.0, 1.0).unwrap(),
        &[ProcedureKind::Sign],
        200,
    )
    .unwrap();
    let risk = curves[0].points[0].risk;
    assert!(
        risk <= 0.5,
        "mean loss {risk} above 0.5 for the high-correlation recovery run"
    );
    report(
        "high-correlation recovery",
        format!("mean loss {risk:.4} <= 0.5 over 200 replications"),
    );
}

// ---------------------------------------------------------------------------
// criterion 6: risk additivity
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_risk_additivity() {
    // total loss of the full-graph decision equals the sum of per-edge
    // losses, exactly, on 100 fixed simulated datasets
    let sigma = CorrelationMatrix::equicorrelated(3, 0.4).unwrap();
    let sampler = Sampler::new(&DistributionSpec::gaussian(sigma.clone(), 616)).unwrap();
    let pmat = SignProbabilityMatrix::from_correlation(&sigma);
    let truth = reference_graph(&pmat, 0.55).unwrap();
    let spec = LossSpec::uniform(1.5, 2.5).unwrap();
    for rep in 0..100u64 {
        let x = sampler.replicate(rep, 80);
        let decided = sign::identify_sign(&x, 0.55, &AlphaSpec::Scalar(0.3)).unwrap();
        let total = loss(&truth, &decided, &spec).unwrap();
        let mut per_edge_sum = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                per_edge_sum += match (truth.edge(i, j), decided.edge(i, j)) {
                    (false, true) => 1.5,
                    (true, false) => 2.5,
                    _ => 0.0,
                };
            }
        }
        assert_eq!(
            total, per_edge_sum,
            "additivity broken on replication {rep}"
        );
    }
    report(
        "risk additivity",
        "100 datasets, full-graph loss == sum of per-edge losses exactly".to_string(),
    );
}

// ---------------------------------------------------------------------------
// criterion 8: determinism across thread counts
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_determinism_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let base = ExperimentConfig {
        label: "det".into(),
        n_series: 10,
        sample_size: 120,
        replications: 60,
        grid_start: 0.1,
        grid_stop: 0.9,
        grid_step: 0.1,
        seed: 777,
        level: LevelSpec::Alpha(0.1),
        pair_counting: PairCounting::Unordered,
        ..ExperimentConfig::default()
    };
    let mut outputs = Vec::new();
    for (tag, threads) in [("t1", 1usize), ("t8", 8)] {
        for round in 0..2 {
            let out_dir = dir.path().join(format!("{tag}_{round}"));
            let runs = vec![base.clone()];
            let result = run_risk_experiment(&runs, &out_dir, false, threads).unwrap();
            outputs.push(std::fs::read(&result[0].csv).unwrap());
        }
    }
    let first = &outputs[0];
    for (i, other) in outputs.iter().enumerate().skip(1) {
        assert_eq!(first, other, "risk CSV differs in run {i}");
    }
    // sanity: the CSV carries the expected schema and grid
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("p0,procedure,risk,stderr,replications\n"));
    assert_eq!(text.lines().count(), 1 + 9 * 2);
    report(
        "determinism",
        "identical risk CSVs across {1, 8} threads and repeated runs".to_string(),
    );
}
