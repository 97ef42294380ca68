//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use terraspec::asymptotics::AsymptoticClass;
use terraspec::ideals::{check_quasinorm_axioms, inclusion_check, AxiomConfig, SNumberSequence};
use terraspec::operator::{classify_boundedness, criterion_sequence_dense};
use terraspec::products::{alpha, ratio_band, ratio_band_with_exponent, BandConfig, BandVerdict};
use terraspec::spectrum::{
    adjoint_eigvector, adjoint_point_test, classify_point, dist_to_s, eigenvector,
    point_spectrum_test, resolvent_section, spectrum_grid, verify_resolvent, GridSpec,
    SpectralConfig, SpectralLabel,
};
use terraspec::{SequenceSpec, TriState};

type Check = std::result::Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> std::result::Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("runtime {:.3}s exceeds {limit_s}s", elapsed.as_secs_f64())
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let a = SequenceSpec::log_reciprocal();
    let w = SequenceSpec::geometric(0.5).map_err(err)?;
    let seq = criterion_sequence_dense(&a, &w, &w, 50).map_err(err)?;
    let mut worst = 0.0f64;
    for n in 1..=50usize {
        let exact = (2f64.powi(n as i32 + 1) - 2.0) / (2f64.powi(n as i32) * ((n + 1) as f64).ln());
        let got = seq.get(n).ok_or(format!("c_{n} not sampled"))?;
        worst = worst.max((got - exact).abs() / exact);
    }
    let rep = classify_boundedness(&a, &w, &w).map_err(err)?;
    let elapsed = t.elapsed();
    ensure(worst <= 1e-12, || format!("max rel err {worst:.3e}"))?;
    ensure(rep.compact == TriState::Yes, || {
        format!("compact = {}", rep.compact.as_str())
    })?;
    within(elapsed, 1.0)?;
    Ok(format!(
        "max rel err {worst:.2e}, compact yes, {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let a = SequenceSpec::cesaro_scaled(1.0).map_err(err)?;
    let one = SequenceSpec::constant(1.0).map_err(err)?;
    let seq = criterion_sequence_dense(&a, &one, &one, 10_000).map_err(err)?;
    ensure(seq.samples.len() == 10_000, || {
        format!("{} samples", seq.samples.len())
    })?;
    if let Some((n, v)) = seq.samples.iter().find(|(_, v)| *v != 1.0) {
        return Err(format!("c_{n} = {v:e}, not exactly 1"));
    }
    let rep = classify_boundedness(&a, &one, &one).map_err(err)?;
    ensure(rep.norm == Some(1.0), || format!("norm {:?}", rep.norm))?;
    ensure(rep.compact == TriState::No, || {
        format!("compact = {}", rep.compact.as_str())
    })?;
    for k in 1..=100usize {
        let pt = point_spectrum_test(c(1.0 / k as f64, 0.0), &a, &one, 1.0).map_err(err)?;
        ensure(pt.verdict == TriState::No, || {
            format!("lambda = a_{k}: {}", pt.verdict.as_str())
        })?;
    }
    let elapsed = t.elapsed();
    within(elapsed, 1.0)?;
    Ok(format!(
        "c_n = 1 for n <= 1e4, norm 1, compact no, sigma_p empty on a_1..a_100, {:.3}s",
        elapsed.as_secs_f64()
    ))
}

/// Inverse of the lower-triangular `R_N - lambda I` column by column.
fn forward_substitution_inverse(
    a: &SequenceSpec,
    lambda: Complex64,
    n: usize,
) -> DMatrix<Complex64> {
    let av: Vec<f64> = (1..=n).map(|k| a.eval(k).unwrap()).collect();
    let mut inv = DMatrix::<Complex64>::zeros(n, n);
    for col in 0..n {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        let mut partial = Complex64::new(0.0, 0.0);
        for i in col..n {
            let rhs = if i == col { c(1.0, 0.0) } else { c(0.0, 0.0) };
            // row i: a_i (partial + x_i) - lambda x_i = rhs
            let xi = (rhs - partial * av[i]) / (av[i] - lambda);
            x[i] = xi;
            partial += xi;
        }
        for i in 0..n {
            inv[(i, col)] = x[i];
        }
    }
    inv
}

fn sample_lambda(
    rng: &mut ChaCha8Rng,
    a: &SequenceSpec,
    chi: f64,
    min_dist: f64,
    accept: impl Fn(Complex64) -> bool,
) -> std::result::Result<Complex64, String> {
    for _ in 0..10_000 {
        let l = c(rng.gen_range(-chi..2.0 * chi), rng.gen_range(-chi..chi));
        let d = dist_to_s(l, a, 1 << 16).map_err(err)?.distance;
        if d >= min_dist && accept(l) {
            return Ok(l);
        }
    }
    Err("could not sample lambda".into())
}

fn criterion_3() -> Check {
    let t = Instant::now();
    let n = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_entry, mut worst_res) = (0.0f64, 0.0f64);
    let mut count = 0;
    for chi in [1.0, 2.0] {
        let a = SequenceSpec::cesaro_scaled(chi).map_err(err)?;
        for _ in 0..10 {
            let l = sample_lambda(&mut rng, &a, chi, 0.2, |_| true)?;
            let b = resolvent_section(l, &a, n).map_err(err)?.to_dense();
            let o = forward_substitution_inverse(&a, l, n);
            for (x, y) in b.iter().zip(o.iter()) {
                let rel = if *y == c(0.0, 0.0) {
                    x.norm()
                } else {
                    (x - y).norm() / y.norm()
                };
                worst_entry = worst_entry.max(rel);
            }
            let chk = verify_resolvent(l, &a, n, 1e-10).map_err(err)?;
            worst_res = worst_res.max(chk.max_residual);
            count += 1;
        }
    }
    let elapsed = t.elapsed();
    ensure(worst_entry <= 1e-10, || {
        format!("max rel entry err {worst_entry:.3e}")
    })?;
    ensure(worst_res <= 1e-10, || {
        format!("max residual {worst_res:.3e}")
    })?;
    within(elapsed, 10.0)?;
    Ok(format!(
        "{count} lambdas, max rel entry err {worst_entry:.2e}, max residual {worst_res:.2e}, {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_4() -> Check {
    let a = SequenceSpec::cesaro_scaled(1.0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lambdas = [
        c(2.0, 0.0),
        c(-0.5, 0.3),
        sample_lambda(&mut rng, &a, 1.0, 0.2, |_| true)?,
    ];
    for l in lambdas {
        let big = resolvent_section(l, &a, 300).map_err(err)?;
        for m in [10, 50, 150] {
            let lead = big.leading(m).to_dense();
            let small = resolvent_section(l, &a, m).map_err(err)?.to_dense();
            ensure(lead == small, || format!("M = {m} differs at lambda = {l}"))?;
        }
    }
    Ok("leading blocks M = 10, 50, 150 of N = 300 are bit-identical".into())
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let range = (1 << 7, 1 << 15);
    let (mut worst_slope, mut min_drift) = (0.0f64, f64::INFINITY);
    for chi in [0.5, 1.0, 2.0] {
        let a = SequenceSpec::cesaro_scaled(chi).map_err(err)?;
        for _ in 0..10 {
            let l = sample_lambda(&mut rng, &a, chi, 0.1 * chi, |l| {
                alpha(l).is_ok_and(|al| (al * chi - 1.0).abs() >= 0.1)
            })?;
            let rep = ratio_band(&a, l, chi, range).map_err(err)?;
            ensure(rep.verdict == BandVerdict::BoundedBand, || {
                format!(
                    "chi {chi}, lambda {l}: {:?} slope {:.4}",
                    rep.verdict, rep.log_log_slope
                )
            })?;
            ensure(rep.log_log_slope.abs() < 0.02, || {
                format!("slope {:.4}", rep.log_log_slope)
            })?;
            worst_slope = worst_slope.max(rep.log_log_slope.abs());
            let bad =
                ratio_band_with_exponent(&a, l, rep.exponent + 0.05, range, &BandConfig::default())
                    .map_err(err)?;
            ensure(bad.verdict == BandVerdict::Drifting, || {
                format!("perturbed exponent at {l}: {:?}", bad.verdict)
            })?;
            min_drift = min_drift.min(bad.log_log_slope.abs());
        }
    }
    let elapsed = t.elapsed();
    within(elapsed, 30.0)?;
    Ok(format!(
        "30 lambdas bounded, max |slope| {worst_slope:.2e}; +0.05 drifts (min |slope| {min_drift:.3}), {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_6() -> Check {
    let a = SequenceSpec::cesaro_scaled(1.0).map_err(err)?;
    let s = SequenceSpec::power_weight(1.0).map_err(err)?;
    let one = classify_point(c(1.0, 0.0), &a, &s, 1.0).map_err(err)?;
    ensure(one.label == SpectralLabel::Point, || {
        format!("lambda = 1 labelled {}", one.label.as_str())
    })?;
    let half = classify_point(c(0.5, 0.0), &a, &s, 1.0).map_err(err)?;
    ensure(half.label != SpectralLabel::Point, || {
        "lambda = 1/2 labelled point".into()
    })?;
    let n = 1000;
    let x = eigenvector(c(1.0, 0.0), &a, n).map_err(err)?;
    // (R_a x)_i = a_i sum_{k<=i} x_k, evaluated directly
    let mut partial = Complex64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    for i in 1..=n {
        partial += x[i - 1];
        let lhs = partial / i as f64;
        let rhs = x[i - 1];
        let scale = rhs.norm().max(lhs.norm());
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    ensure(worst <= 1e-10, || {
        format!("recurrence residual {worst:.3e}")
    })?;
    Ok(format!(
        "lambda = 1 point, lambda = 1/2 {}, eigen-recurrence residual {worst:.2e} to N = {n}",
        half.label.as_str()
    ))
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let a = SequenceSpec::cesaro_scaled(1.0).map_err(err)?;
    let s = SequenceSpec::constant(1.0).map_err(err)?;
    let grid = GridSpec {
        re_range: (-0.25, 1.25),
        im_range: (-0.75, 0.75),
        resolution: (41, 41),
    };
    let nodes = grid.nodes().map_err(err)?;
    let points = spectrum_grid(&a, &s, 1.0, &grid, SpectralConfig::default()).map_err(err)?;
    ensure(
        points.len() == nodes.len() && nodes.len() == 41 * 41,
        || format!("{} labels for {} nodes", points.len(), nodes.len()),
    )?;
    let (mut resolvent, mut residual, mut skipped) = (0, 0, 0);
    for (node, p) in nodes.iter().zip(&points) {
        ensure(p.lambda == *node, || format!("node order broken at {node}"))?;
        let off_closure = p.evidence.dist_to_s > 1e-12 && !p.evidence.origin;
        let r = (node - c(0.5, 0.0)).norm();
        if off_closure && r > 0.5 + 1e-9 {
            ensure(p.label == SpectralLabel::Resolvent, || {
                format!("exterior node {node} labelled {}", p.label.as_str())
            })?;
            resolvent += 1;
        } else if off_closure && r < 0.5 - 1e-9 {
            ensure(p.label == SpectralLabel::Residual, || {
                format!("interior node {node} labelled {}", p.label.as_str())
            })?;
            residual += 1;
        } else {
            skipped += 1;
        }
    }
    let origin = classify_point(c(0.0, 0.0), &a, &s, 1.0).map_err(err)?;
    ensure(origin.label == SpectralLabel::ContinuousCandidate, || {
        format!("0 labelled {}", origin.label.as_str())
    })?;
    let elapsed = t.elapsed();
    within(elapsed, 30.0)?;
    Ok(format!(
        "1681 nodes: {resolvent} resolvent, {residual} residual, {skipped} on S or the circle; 0 continuous_candidate; {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_8() -> Check {
    let a = SequenceSpec::cesaro_scaled(1.0).map_err(err)?;
    let s = SequenceSpec::constant(1.0).map_err(err)?;
    for l in [1usize, 2, 5, 17] {
        let x = adjoint_eigvector(c(1.0 / l as f64, 0.0), &a, 40).map_err(err)?;
        ensure(x[..l].iter().all(|v| *v != c(0.0, 0.0)), || {
            format!("l = {l}: zero before l")
        })?;
        ensure(x[l..].iter().all(|v| *v == c(0.0, 0.0)), || {
            format!("l = {l}: nonzero after l")
        })?;
    }
    let inside = adjoint_point_test(c(0.4, 0.0), &a, &s, 1.0).map_err(err)?;
    ensure(inside.verdict == TriState::Yes, || {
        format!("lambda = 0.4: {}", inside.verdict.as_str())
    })?;
    let outside = adjoint_point_test(c(2.0, 0.0), &a, &s, 1.0).map_err(err)?;
    ensure(outside.verdict == TriState::No, || {
        format!("lambda = 2: {}", outside.verdict.as_str())
    })?;
    Ok("exact zeros after l for l in {1, 2, 5, 17}; 0.4 yes; 2 no".into())
}

fn criterion_9() -> Check {
    let t = Instant::now();
    let a = SequenceSpec::cesaro_scaled(1.0).map_err(err)?;
    let r = SequenceSpec::constant(1.0).map_err(err)?;
    let cfg = AxiomConfig {
        trials: 200,
        dim: 8,
        seed: 9,
        ..AxiomConfig::default()
    };
    let rep = check_quasinorm_axioms(&cfg, &a, &r).map_err(err)?;
    let elapsed = t.elapsed();
    ensure(rep.qnorm_normalized == TriState::Yes, || {
        "a, r not normalized".into()
    })?;
    ensure(rep.violations.total() == 0, || {
        format!("violations {:?}", rep.violations)
    })?;
    within(elapsed, 10.0)?;
    Ok(format!(
        "200 trials at N = 8, 0 violations, {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn synthetic_snumbers(rng: &mut ChaCha8Rng, count: usize) -> Vec<SNumberSequence> {
    (0..count)
        .map(|i| {
            let scale = rng.gen_range(0.1..10.0);
            match i % 3 {
                0 => {
                    let len = rng.gen_range(1..20);
                    let mut v: Vec<f64> = (0..len).map(|_| scale * rng.gen::<f64>()).collect();
                    v.sort_by(|x, y| y.total_cmp(x));
                    SNumberSequence::synthetic(v, None)
                }
                1 => {
                    let p = rng.gen_range(0.05..3.0);
                    let k = AsymptoticClass::power_law(scale, -p);
                    SNumberSequence::synthetic((1..=8).map(|j| k.value(j)).collect(), Some(k))
                }
                _ => {
                    let q = rng.gen_range(0.1..0.95);
                    let k = AsymptoticClass::new(scale, q, 0.0, 0.0).unwrap();
                    SNumberSequence::synthetic((1..=8).map(|j| k.value(j)).collect(), Some(k))
                }
            }
            .unwrap()
        })
        .collect()
}

fn run_cli(
    bin: &str,
    sub: &str,
    config: &Path,
    jobs: Option<usize>,
) -> std::result::Result<Vec<u8>, String> {
    let mut cmd = Command::new(bin);
    cmd.arg(sub)
        .arg("--config")
        .arg(config)
        .env_remove("TERRASPEC_SEED");
    if let Some(j) = jobs {
        cmd.arg("--jobs").arg(j.to_string());
    }
    let out = cmd.output().map_err(err)?;
    match out.status.code() {
        Some(0) => Ok(out.stdout),
        code => Err(format!(
            "{sub} exited {code:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        )),
    }
}

fn criterion_10() -> Check {
    let a = SequenceSpec::cesaro_scaled(1.0).map_err(err)?;
    let r = SequenceSpec::geometric(0.5).map_err(err)?;
    let tw = SequenceSpec::constant(1.0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let samples = synthetic_snumbers(&mut rng, 50);
    let rep = inclusion_check(&r, &tw, &samples, &a, 1 << 12).map_err(err)?;
    ensure(rep.t_members == 50, || {
        format!("{} of 50 samples are t-members", rep.t_members)
    })?;
    ensure(
        rep.r_members == 50 && rep.counterexamples.is_empty(),
        || {
            format!(
                "{} r-members, counterexamples {:?}, undecided {:?}",
                rep.r_members, rep.counterexamples, rep.undecided
            )
        },
    )?;

    let bin = env!("CARGO_BIN_EXE_terraspec");
    let dir = tempfile::tempdir().map_err(err)?;
    let cesaro = r#""a": {"family": "cesaro_scaled", "params": {"chi": 1.0}}"#;
    let runs = [
        ("classify", format!("{{{cesaro}}}")),
        (
            "spectrum-map",
            format!(
                r#"{{{cesaro}, "chi": 1.0, "grid": {{"re": [-0.25, 1.25], "im": [-0.75, 0.75], "resolution": [21, 21]}}}}"#
            ),
        ),
        (
            "point-test",
            format!(r#"{{{cesaro}, "chi": 1.0, "lambdas": [[0.4, 0.0], [2.0, 0.0], [0.0, 0.0]]}}"#),
        ),
        (
            "resolvent-verify",
            format!(r#"{{{cesaro}, "n": 120, "lambdas": [[2.0, 0.5], [-0.5, 0.0]]}}"#),
        ),
        (
            "product-band",
            format!(r#"{{{cesaro}, "chi": 1.0, "lambdas": [[2.0, 0.0], [0.3, 0.2]]}}"#),
        ),
        (
            "ideal-qnorm",
            format!(r#"{{{cesaro}, "snumbers": {{"section": 16}}}}"#),
        ),
        (
            "ideal-axioms",
            format!(r#"{{{cesaro}, "seed": 42, "axioms": {{"trials": 64, "dim": 6}}}}"#),
        ),
    ];
    for (sub, body) in &runs {
        let path = dir.path().join(format!("{sub}.json"));
        std::fs::write(&path, body).map_err(err)?;
        let first = run_cli(bin, sub, &path, Some(1))?;
        let second = run_cli(bin, sub, &path, Some(4))?;
        let third = run_cli(bin, sub, &path, None)?;
        ensure(first == second && second == third, || {
            format!("{sub}: outputs differ between runs")
        })?;
    }
    Ok(format!(
        "50/50 t-members are r-members; {} commands byte-identical across reruns and --jobs",
        runs.len()
    ))
}

fn main() {
    let criteria: [(u32, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (id, f) in criteria {
        match f() {
            Ok(msg) => println!("criterion {id:>2} PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
