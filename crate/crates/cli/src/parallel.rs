//! Rayon drivers over the sequential building blocks in the core crate.
//! Results are assembled in a fixed order, so they match the sequential
//! paths bit for bit.

use infoengine_core::optimize::{sweep_column, Axis, SweepTable};
use infoengine_core::oracle::{block_count, mc_block, merge_blocks, McReport};
use infoengine_core::{EngineParams, OperatingPoint, QuadratureSpec, Result};
use rayon::prelude::*;

/// Parallel [`infoengine_core::optimize::sweep`], one task per `t̄` column.
pub fn par_sweep(params: &EngineParams, t_axis: &Axis, u_axis: &Axis) -> Result<SweepTable> {
    let spec = QuadratureSpec::default();
    let columns = t_axis
        .values()
        .par_iter()
        .map(|&t| sweep_column(params, t, u_axis, &spec))
        .collect();
    SweepTable::from_columns(params, t_axis, u_axis, columns)
}

/// Parallel [`infoengine_core::oracle::mc_cycles`], one task per block.
pub fn par_mc_cycles(
    params: &EngineParams,
    pt: &OperatingPoint,
    n: u64,
    seed: u64,
) -> Result<McReport> {
    // Sample-count validation lives in the core; reuse it on a tiny run.
    if n < 1000 {
        return infoengine_core::oracle::mc_cycles(params, pt, n, seed);
    }
    let blocks: Vec<_> = (0..block_count(n))
        .into_par_iter()
        .map(|b| mc_block(params, pt, n, seed, b))
        .collect();
    Ok(merge_blocks(blocks).finish(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use infoengine_core::optimize::sweep;
    use infoengine_core::oracle::mc_cycles;

    #[test]
    fn parallel_sweep_matches_sequential() {
        let p = EngineParams::new(25.85, 300.0, 25.85).unwrap();
        let t = Axis::linspace(0.1, 3.0, 7).unwrap();
        let u = Axis::linspace(-2.0, 1.0, 5).unwrap();
        assert_eq!(par_sweep(&p, &t, &u).unwrap(), sweep(&p, &t, &u).unwrap());
    }

    #[test]
    fn parallel_mc_matches_sequential() {
        let p = EngineParams::new(25.85, 300.0, 25.85).unwrap();
        let pt = OperatingPoint::new(1.0, 0.0).unwrap();
        let n = 5 * 16384 + 77;
        assert_eq!(
            par_mc_cycles(&p, &pt, n, 9).unwrap(),
            mc_cycles(&p, &pt, n, 9).unwrap()
        );
        assert!(par_mc_cycles(&p, &pt, 10, 9).is_err());
    }
}
