use super::*;
use crate::engine::{attempt_fraction, info_gain, work_meas, work_out};
use crate::model::OperatingPoint;

fn unit_ratio() -> EngineParams {
    EngineParams::from_gap_ratio(25.85, 1.0, 25.85).unwrap()
}

fn analytic_branch1(u: f64, t: f64) -> f64 {
    (2.0 / PI).sqrt() * (-2.0 * (u + t) * (u + t)).exp()
}

#[test]
fn ground_branch_momentum_is_static() {
    let p = unit_ratio();
    let grid = GridSpec::for_horizon(1.0);
    let (g0, _) = propagate(&p, 0.0, &grid).unwrap();
    let (g1, _) = propagate(&p, 1.0, &grid).unwrap();
    let d0 = g0.momentum_density();
    let d1 = g1.momentum_density();
    let worst = d0
        .iter()
        .zip(&d1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn excited_branch_matches_shifted_gaussian() {
    let p = unit_ratio();
    let grid = GridSpec::for_horizon(1.0);
    let (_, e) = propagate(&p, 1.0, &grid).unwrap();
    let worst = e
        .momenta()
        .zip(e.momentum_density())
        .map(|(u, d)| (d - analytic_branch1(u, 1.0)).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
    assert!((e.norm() - 1.0).abs() < 1e-10);
    assert_eq!(e.branch_weight, p.pop_b);
}

#[test]
fn excited_branch_mean_position_follows_uniform_force() {
    let p = unit_ratio();
    let (_, e) = propagate(&p, 1.0, &GridSpec::for_horizon(1.0)).unwrap();
    assert!((e.position_mean() + 0.5).abs() < 1e-6);
}

#[test]
fn oracle_switching_work() {
    let p = unit_ratio();
    let grid = GridSpec::for_horizon(1.0);
    assert_eq!(oracle_work_meas(&p, 0.0, &grid).unwrap(), 0.0);
    let w1 = oracle_work_meas(&p, 1.0, &grid).unwrap();
    let closed = work_meas(&OperatingPoint::at_time(1.0).unwrap(), &p);
    assert!((w1 / closed - 1.0).abs() < 1e-5);
    assert!((w1 - 3.4761).abs() < 1e-4);
    let wh = oracle_work_meas(&p, 0.5, &grid).unwrap();
    assert!((wh / w1 - 0.25).abs() < 1e-5);
}

#[test]
fn norm_is_conserved_over_many_steps() {
    let p = unit_ratio();
    let grid = GridSpec {
        dt: 1e-4,
        ..GridSpec::for_horizon(1.0)
    };
    let (g, e) = propagate(&p, 1.0, &grid).unwrap();
    assert!((g.norm() - 1.0).abs() < 1e-10);
    assert!((e.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn grid_refinement_leaves_work_unchanged() {
    let p = unit_ratio();
    let base = GridSpec::for_horizon(1.0);
    let w = oracle_work_meas(&p, 1.0, &base).unwrap();
    let finer_t = oracle_work_meas(
        &p,
        1.0,
        &GridSpec {
            dt: base.dt / 2.0,
            ..base
        },
    )
    .unwrap();
    let finer_p = oracle_work_meas(
        &p,
        1.0,
        &GridSpec {
            n_points: 2 * base.n_points,
            ..base
        },
    )
    .unwrap();
    assert!((finer_t / w - 1.0).abs() < 1e-7);
    assert!((finer_p / w - 1.0).abs() < 1e-7);
}

#[test]
fn gap_energy_is_only_a_phase() {
    let grid = GridSpec::for_horizon(1.0);
    let with_gap = EngineParams::from_gap_ratio(25.85, 1.0, 25.85).unwrap();
    let (_, a) = propagate(&with_gap, 1.0, &grid).unwrap();
    // Same populations, ten times the gap.
    let bigger = EngineParams::from_populations(258.5, with_gap.pop_a, 25.85).unwrap();
    let (_, b) = propagate(&bigger, 1.0, &grid).unwrap();
    let da = a.momentum_density();
    let db = b.momentum_density();
    assert!(da.iter().zip(&db).all(|(x, y)| (x - y).abs() < 1e-12));
    assert!((a.position_mean() - b.position_mean()).abs() < 1e-10);
}

#[test]
fn undersized_grid_is_rejected() {
    let p = unit_ratio();
    let bad = GridSpec {
        n_points: 100,
        ..GridSpec::for_horizon(1.0)
    };
    assert!(propagate(&p, 1.0, &bad).is_err());
    let narrow = GridSpec {
        p_max: 4.5,
        ..GridSpec::for_horizon(0.0)
    };
    assert!(narrow.validate(0.0).is_ok());
    assert!(matches!(propagate(&p, 0.2, &narrow), Err(Error::Domain(_))));
    // Legal window, but so coarse in momentum that the conjugate position
    // box is narrower than the packet.
    let coarse = GridSpec {
        n_points: 256,
        p_max: 400.0,
        dt: 1e-2,
    };
    assert!(matches!(
        propagate(&p, 0.5, &coarse),
        Err(Error::Resolution { .. })
    ));
}

#[test]
fn marginal_rows_cover_grid() {
    let p = unit_ratio();
    let grid = GridSpec::for_horizon(0.5);
    let rows = branch_marginals(&p, 0.5, &grid).unwrap();
    assert_eq!(rows.len(), grid.n_points);
    let dp = grid.dp();
    let m0: f64 = rows.iter().map(|r| r.1).sum::<f64>() * dp;
    let m1: f64 = rows.iter().map(|r| r.2).sum::<f64>() * dp;
    assert!((m0 - 1.0).abs() < 1e-10 && (m1 - 1.0).abs() < 1e-10);
}

fn pt(t: f64, u: f64) -> OperatingPoint {
    OperatingPoint::new(t, u).unwrap()
}

#[test]
fn mc_agrees_with_closed_forms() {
    let p = unit_ratio();
    let point = pt(1.0, 0.0);
    let r = mc_cycles(&p, &point, 200_000, 7).unwrap();
    assert!(r.w_out.z_score(work_out(&point, &p)) < 4.0);
    assert!(r.attempt_fraction.z_score(attempt_fraction(&point, &p)) < 4.0);
    assert!(r.info_gain.z_score(info_gain(&point, &p).unwrap()) < 4.0);
    assert_eq!(r.w_out.n_samples, 200_000);
    assert_eq!(r.w_out.seed, 7);
}

#[test]
fn mc_null_threshold() {
    let p = unit_ratio();
    let r = mc_cycles(&p, &pt(1.0, f64::INFINITY), 100_000, 3).unwrap();
    assert!(r.w_out.z_score(0.0) < 4.0);
    assert_eq!(r.attempt_fraction.mean, 1.0);
    let r = mc_cycles(&p, &pt(1.0, f64::NEG_INFINITY), 10_000, 3).unwrap();
    assert_eq!(r.w_out.mean, 0.0);
    assert_eq!(r.attempt_fraction.mean, 0.0);
}

#[test]
fn mc_is_deterministic_and_shard_independent() {
    let p = unit_ratio();
    let point = pt(0.8, -0.3);
    let n = 5 * MC_BLOCK_LEN + 123;
    let base = mc_cycles(&p, &point, n, 11).unwrap();
    assert_eq!(base, mc_cycles(&p, &point, n, 11).unwrap());
    for shards in [1, 2, 3, 7, 16] {
        assert_eq!(base, mc_cycles_sharded(&p, &point, n, 11, shards).unwrap());
    }
    assert_ne!(
        base.w_out.mean,
        mc_cycles(&p, &point, n, 12).unwrap().w_out.mean
    );
}

#[test]
fn mc_rejects_tiny_runs() {
    let p = unit_ratio();
    assert!(mc_cycles(&p, &pt(1.0, 0.0), 999, 1).is_err());
    assert!(mc_cycles_sharded(&p, &pt(1.0, 0.0), 5000, 1, 0).is_err());
}

#[test]
fn mc_standard_error_definition() {
    let p = unit_ratio();
    let r = mc_cycles(&p, &pt(1.0, 0.0), 4000, 5).unwrap();
    // Attempt indicator: std error of a Bernoulli mean.
    let m = r.attempt_fraction.mean;
    let expected = (m * (1.0 - m) * 4000.0 / 3999.0 / 4000.0).sqrt();
    assert!((r.attempt_fraction.std_error - expected).abs() < 1e-12);
}
