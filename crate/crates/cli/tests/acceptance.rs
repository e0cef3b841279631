//! End-to-end acceptance criteria. Runs as a plain binary so that each
//! criterion prints exactly one PASS/FAIL line under `cargo test`.

use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use infoengine_cli::parallel::par_mc_cycles;
use infoengine_core::engine::{
    self, conditional_entropy, info_gain, initial_entropy, work_out_quadrature,
};
use infoengine_core::model::{gaussian_peak, joint_density};
use infoengine_core::optimize::{maximize_with_resolution, Axis, Objective, SearchBox};
use infoengine_core::oracle::{
    mc_cycles, mc_cycles_sharded, oracle_work_meas, propagate, GridSpec,
};
use infoengine_core::{EngineParams, OperatingPoint, QuadratureSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn defaults() -> EngineParams {
    EngineParams::new(25.85, 300.0, 25.85).unwrap()
}

fn pt(t: f64, u: f64) -> OperatingPoint {
    OperatingPoint::new(t, u).unwrap()
}

fn at_time(t: f64) -> OperatingPoint {
    OperatingPoint::at_time(t).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_marginals() -> Outcome {
    let p = defaults();
    let grid = GridSpec::for_horizon(2.0);
    let mut worst = 0.0f64;
    let mut drift = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let (g, e) = propagate(&p, t, &grid).map_err(|e| e.to_string())?;
        for (u, d) in e.momenta().zip(e.momentum_density()) {
            let exact = joint_density(1, u, &at_time(t), &p).unwrap() / p.pop_b;
            worst = worst.max((d - exact).abs());
        }
        drift = drift
            .max((g.norm() - 1.0).abs())
            .max((e.norm() - 1.0).abs());
    }
    ensure(worst <= 1e-6, || {
        format!("max density error {worst:.3e} > 1e-6")
    })?;
    ensure(drift <= 1e-10, || format!("norm drift {drift:.3e} > 1e-10"))?;
    Ok(format!(
        "max density error {worst:.2e} (tol 1e-6), norm drift {drift:.2e} (tol 1e-10)"
    ))
}

fn measurement_cost() -> Outcome {
    let p = defaults();
    let grid = GridSpec::for_horizon(2.0);
    let mut worst = 0.0f64;
    let mut oracle = Vec::new();
    for t in [0.5, 1.0, 2.0] {
        let w = oracle_work_meas(&p, t, &grid).map_err(|e| e.to_string())?;
        worst = worst.max((w / engine::work_meas(&at_time(t), &p) - 1.0).abs());
        oracle.push(w);
    }
    let ratio_oracle = oracle[1] / oracle[0];
    let ratio_closed = engine::work_meas(&at_time(1.0), &p) / engine::work_meas(&at_time(0.5), &p);
    ensure(worst <= 1e-5, || format!("relative gap {worst:.3e} > 1e-5"))?;
    for r in [ratio_oracle, ratio_closed] {
        ensure((r - 4.0).abs() <= 1e-5, || format!("W(1)/W(0.5) = {r}"))?;
    }
    Ok(format!(
        "max relative gap {worst:.2e} (tol 1e-5), W(1)/W(0.5) oracle {ratio_oracle:.9} closed {ratio_closed:.9}"
    ))
}

fn null_extraction() -> Outcome {
    let p = defaults();
    let worst = [0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&t| engine::work_out(&at_time(t), &p).abs() / p.delta_e)
        .fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("|W_out|/dE = {worst:.3e}"))?;
    Ok(format!(
        "max |W_out(u' = inf)|/dE = {worst:.2e} (tol 1e-10)"
    ))
}

fn closed_form_vs_quadrature() -> Outcome {
    let p = defaults();
    let spec = QuadratureSpec::default();
    let ts = Axis::linspace(0.05, 5.0, 20).unwrap();
    let us = Axis::linspace(-3.0, 1.0, 20).unwrap();
    let mut worst = 0.0f64;
    for &t in ts.values() {
        for &u in us.values() {
            let q = work_out_quadrature(&pt(t, u), &p, &spec).map_err(|e| e.to_string())?;
            worst = worst.max((q - engine::work_out(&pt(t, u), &p)).abs() / p.delta_e);
        }
    }
    let spot = engine::work_out(&pt(1.0, 0.0), &p);
    ensure(worst <= 1e-9, || format!("max gap/dE {worst:.3e} > 1e-9"))?;
    ensure((spot - 2.4256).abs() <= 1e-3, || {
        format!("W_out(1, 0) = {spot}")
    })?;
    Ok(format!(
        "max gap/dE {worst:.2e} on 20x20 (tol 1e-9), W_out(1, 0) = {spot:.5} meV"
    ))
}

fn monte_carlo() -> Outcome {
    let p = defaults();
    let at = pt(1.0, 0.0);
    let n = 1_000_000;
    let r = mc_cycles(&p, &at, n, 42).map_err(|e| e.to_string())?;
    let a = engine::CycleReport::evaluate(&at, &p).map_err(|e| e.to_string())?;
    let z = [
        ("W_out", r.w_out.z_score(a.w_out)),
        (
            "attempt_fraction",
            r.attempt_fraction.z_score(a.attempt_fraction),
        ),
        ("info_gain", r.info_gain.z_score(a.info_gain)),
    ];
    for (name, v) in z {
        ensure(v <= 3.0, || format!("{name} |z| = {v:.3} > 3"))?;
    }
    for shards in [1, 2, 3, 7, 61, 64] {
        let s = mc_cycles_sharded(&p, &at, n, 42, shards).map_err(|e| e.to_string())?;
        ensure(s == r, || format!("{shards}-shard estimate differs"))?;
    }
    let threaded = par_mc_cycles(&p, &at, n, 42).map_err(|e| e.to_string())?;
    ensure(threaded == r, || "thread-parallel estimate differs".into())?;
    Ok(format!(
        "|z| W_out {:.2}, attempt {:.2}, info {:.2} (tol 3); shard and thread merges bit-identical",
        z[0].1, z[1].1, z[2].1
    ))
}

fn information_limits() -> Outcome {
    let unit = EngineParams::from_gap_ratio(25.85, 1.0, 25.85).unwrap();
    let i0 = info_gain(&at_time(0.0), &unit).map_err(|e| e.to_string())?;
    ensure(i0 == 0.0, || format!("I(0) = {i0:e}"))?;
    let s0 = initial_entropy(&unit);
    let i50 = info_gain(&at_time(50.0), &unit).map_err(|e| e.to_string())?;
    ensure((i50 - s0).abs() <= 1e-3, || {
        format!("I(50) = {i50} vs S(0) = {s0}")
    })?;
    ensure((i50 - 0.582208).abs() <= 1e-3, || {
        format!("I(50) = {i50} vs 0.582208")
    })?;
    // I = S(0) - S(t) rounds to S(0) once S(t) drops below half an ulp of
    // S(0), so strict growth is checked on S(t) itself.
    for ratio in [0.5, 1.0, 2.0] {
        let p = EngineParams::from_gap_ratio(25.85, ratio, 25.85).unwrap();
        let (mut prev_i, mut prev_s) = (f64::NEG_INFINITY, f64::INFINITY);
        for k in 0..=40 {
            let t = 0.25 * k as f64;
            let i = info_gain(&at_time(t), &p).map_err(|e| e.to_string())?;
            let s = conditional_entropy(&at_time(t), &p).map_err(|e| e.to_string())?;
            ensure(i >= prev_i, || {
                format!("ratio {ratio}: I decreases at t = {t} ({i} < {prev_i})")
            })?;
            ensure(s < prev_s, || {
                format!("ratio {ratio}: S not decreasing at t = {t} ({s} >= {prev_s})")
            })?;
            (prev_i, prev_s) = (i, s);
        }
    }
    Ok(format!(
        "I(0) = 0, I(50) = {i50:.9} vs S(0) = {s0:.9}; I monotone and S(t) strictly decreasing on 0..10 step 0.25 for ratios 0.5, 1, 2"
    ))
}

fn power_limit() -> Outcome {
    let p = defaults();
    let limit = p.delta_e * p.pop_a * p.pop_b * gaussian_peak();
    let power = engine::power(&pt(1e-4, 0.0), &p);
    let rel = (power / limit - 1.0).abs();
    ensure(rel <= 1e-3, || {
        format!("Pi(1e-4, 0) = {power}, limit {limit}")
    })?;
    ensure((power / 4.0551 - 1.0).abs() <= 1e-3, || {
        format!("Pi(1e-4, 0) = {power} vs 4.0551")
    })?;
    Ok(format!(
        "Pi(1e-4, 0) = {power:.6} meV, limit {limit:.6} meV, rel gap {rel:.2e} (tol 1e-3)"
    ))
}

/// Log-spaced grid on [0.01, 100].
fn log_times(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / (count - 1) as f64))
        .collect()
}

fn interior_argmax(values: &[f64]) -> Option<usize> {
    let (k, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &v)| {
            if v > best.1 {
                (k, v)
            } else {
                best
            }
        });
    (k > 0 && k + 1 < values.len()).then_some(k)
}

fn shape_properties() -> Outcome {
    let p = defaults();
    let ts = log_times(2001);
    let mut peaks = Vec::new();
    for u in [-1.5, -1.0, -0.5, 0.0] {
        let eta: Vec<f64> = ts
            .iter()
            .map(|&t| engine::efficiency(&pt(t, u), &p))
            .collect();
        let k = interior_argmax(&eta)
            .ok_or_else(|| format!("u' = {u}: efficiency peak on an end point"))?;
        let max = eta[k];
        let (lo, hi) = (eta[0], eta[eta.len() - 1]);
        // Both ends below 5% of the peak.
        ensure(lo < 0.05 * max && hi < 0.05 * max, || {
            format!("u' = {u}: eta ends {lo:.2e}, {hi:.2e} vs peak {max:.3}")
        })?;
        peaks.push(format!("{u}: {max:.3} at t {:.2}", ts[k]));
    }
    let pw0: Vec<f64> = ts.iter().map(|&t| engine::power(&pt(t, 0.0), &p)).collect();
    ensure(pw0.windows(2).all(|w| w[1] < w[0]), || {
        "u' = 0 power not strictly decreasing".into()
    })?;
    let pw1: Vec<f64> = ts
        .iter()
        .map(|&t| engine::power(&pt(t, -1.0), &p))
        .collect();
    let k =
        interior_argmax(&pw1).ok_or_else(|| "u' = -1 power peak on an end point".to_string())?;
    Ok(format!(
        "eta peaks {{{}}}, ends < 5% of peak; power decreasing at u' = 0, peaked at t = {:.3} for u' = -1",
        peaks.join(", "),
        ts[k]
    ))
}

fn heat_map_optimum() -> Outcome {
    let p = defaults();
    let search = SearchBox::default();
    let a =
        maximize_with_resolution(&p, Objective::Product, &search, 64).map_err(|e| e.to_string())?;
    let b = maximize_with_resolution(&p, Objective::Product, &search, 128)
        .map_err(|e| e.to_string())?;
    ensure(!a.on_boundary && a.converged, || format!("optimum {a:?}"))?;
    ensure(a.t_bar_star > 0.0 && a.u_prime_star < 0.0, || {
        format!("optimum {a:?}")
    })?;
    let dt = (a.t_bar_star - b.t_bar_star).abs();
    let du = (a.u_prime_star - b.u_prime_star).abs();
    ensure(dt <= 1e-4 && du <= 1e-4, || {
        format!("resolution shift ({dt:.2e}, {du:.2e})")
    })?;
    Ok(format!(
        "(t*, u'*) = ({:.6}, {:.6}), product {:.6} meV; shift under doubled grid ({dt:.1e}, {du:.1e}) (tol 1e-4)",
        a.t_bar_star, a.u_prime_star, a.value
    ))
}

fn scaled_efficiency(lambda: f64) -> f64 {
    let p = EngineParams::new(25.85 * lambda, 300.0 * lambda, 25.85).unwrap();
    engine::efficiency(&pt(1.0, -0.5), &p)
}

fn scaling_claim() -> Outcome {
    let etas: Vec<f64> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&l| scaled_efficiency(l))
        .collect();
    ensure(etas[0] < etas[1] && etas[1] < etas[2], || {
        format!("eta at lambda 1, 2, 4: {etas:?}")
    })?;
    // First integer lambda past one half, then bisection on the crossing.
    let mut hi = 1.0;
    while scaled_efficiency(hi) <= 0.5 {
        hi += 1.0;
        ensure(hi <= 1000.0, || {
            "eta never exceeds 1/2 for lambda <= 1000".into()
        })?;
    }
    let mut lo = hi - 1.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if scaled_efficiency(mid) > 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(format!(
        "eta(1, -0.5) = {:.4}, {:.4}, {:.4} at lambda 1, 2, 4; eta > 1/2 for lambda > {hi:.6}",
        etas[0], etas[1], etas[2]
    ))
}

fn run_cli(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_infoengine"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))
}

fn cli_reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let figures = ["cond-prob", "info-cost", "perf", "heatmap"];
    for cmd in figures {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{cmd}-{run}.csv"));
            let out = run_cli(&[cmd, "--out", path.to_str().unwrap()])?;
            ensure(out.status.success(), || {
                format!("{cmd} exited {:?}", out.status.code())
            })?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(!outputs[0].is_empty(), || format!("{cmd} wrote nothing"))?;
        ensure(outputs[0] == outputs[1], || {
            format!("{cmd} output differs between runs")
        })?;
    }
    let verify = run_cli(&["verify"])?;
    ensure(verify.status.code() == Some(0), || {
        format!(
            "verify exited {:?}:\n{}",
            verify.status.code(),
            String::from_utf8_lossy(&verify.stdout)
        )
    })?;
    Ok("cond-prob, info-cost, perf, heatmap byte-identical across re-runs; verify exits 0".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("oracle marginal equivalence", oracle_marginals),
        ("measurement-cost oracle", measurement_cost),
        ("null extraction", null_extraction),
        ("closed form vs quadrature", closed_form_vs_quadrature),
        ("monte carlo", monte_carlo),
        ("information limits", information_limits),
        ("power limit", power_limit),
        ("shape properties", shape_properties),
        ("heat-map optimum", heat_map_optimum),
        ("scaling claim", scaling_claim),
        ("cli reproducibility", cli_reproducibility),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
