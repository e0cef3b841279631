use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

/// Tolerances and limits for [`adaptive_integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any single panel.
    pub max_depth: u32,
    /// Half-width (in reduced momentum units) used when truncating an
    /// infinite momentum integral around the branch centers.
    pub domain_halfwidth: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_depth: 60,
            domain_halfwidth: 8.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(domain("quadrature tolerances must be positive"));
        }
        if self.max_depth < 10 {
            return Err(domain("quadrature max_depth must be at least 10"));
        }
        if !(self.domain_halfwidth > 0.0 && self.domain_halfwidth.is_finite()) {
            return Err(domain(
                "quadrature domain_halfwidth must be positive and finite",
            ));
        }
        Ok(())
    }
}

const MAX_PANELS: usize = 20_000;

// 15-point Kronrod abscissae on [0, 1]; the odd entries are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    estimate: f64,
    error: f64,
    depth: u32,
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, depth: u32) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        lo,
        hi,
        estimate: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        depth,
    }
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature of `f` over `[lo, hi]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// error drops below `max(abs_tol, rel_tol * |estimate|)`. Panels are kept in
/// left-to-right order and summed in that order, so results are bit-stable.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_with_breaks(f, &[lo, hi], spec)
}

/// Like [`adaptive_integrate`], but starts from one panel per interval of
/// `breaks` (sorted ascending, at least two points). Use it when the
/// integrand has narrow features whose location is known in advance.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if breaks.len() < 2 {
        return Err(domain("integration needs at least two break points"));
    }
    if breaks.iter().any(|b| !b.is_finite()) {
        return Err(domain("integration limits must be finite"));
    }
    if breaks
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(core::cmp::Ordering::Less))
    {
        return Err(domain("integration limits must be strictly increasing"));
    }

    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .map(|w| gauss_kronrod_15(&f, w[0], w[1], 0))
        .collect();

    loop {
        let (estimate, error) = panels
            .iter()
            .fold((0.0, 0.0), |(e, r), p| (e + p.estimate, r + p.error));
        if !estimate.is_finite() {
            return Err(domain("integrand is not finite on the interval"));
        }
        let target = spec.abs_tol.max(spec.rel_tol * estimate.abs());
        if error <= target {
            return Ok(estimate);
        }

        // First panel with the largest error; ties resolve leftmost.
        let (worst, _) =
            panels
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                    if p.error > be {
                        (i, p.error)
                    } else {
                        (bi, be)
                    }
                });
        let panel = panels[worst];
        if panel.depth >= spec.max_depth || panels.len() >= MAX_PANELS {
            return Err(Error::Convergence {
                estimate,
                error_bound: error,
            });
        }
        let mid = 0.5 * (panel.lo + panel.hi);
        if !(panel.lo < mid && mid < panel.hi) {
            // Interval exhausted at machine resolution.
            return Err(Error::Convergence {
                estimate,
                error_bound: error,
            });
        }
        let left = gauss_kronrod_15(&f, panel.lo, mid, panel.depth + 1);
        let right = gauss_kronrod_15(&f, mid, panel.hi, panel.depth + 1);
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn square_on_unit_interval() {
        let v = adaptive_integrate(|x| x * x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn polynomials_up_to_rule_degree_are_exact() {
        // The Gauss-7 embedded rule is exact to degree 13, so a single panel
        // already reports zero error for these.
        for deg in 0..=13 {
            let v = adaptive_integrate(|x: f64| x.powi(deg), -1.0, 2.0, &QuadratureSpec::default())
                .unwrap();
            let exact = (2.0f64.powi(deg + 1) - (-1.0f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!(
                (v - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                "deg {deg}"
            );
        }
    }

    #[test]
    fn gaussian_normalization_and_odd_moment() {
        let spec = QuadratureSpec::default();
        let c = (2.0 / PI).sqrt();
        let norm = adaptive_integrate(|u| c * (-2.0 * u * u).exp(), -8.0, 8.0, &spec).unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
        let odd = adaptive_integrate(|u| u * c * (-2.0 * u * u).exp(), -8.0, 8.0, &spec).unwrap();
        assert!(odd.abs() < 1e-12);
    }

    #[test]
    fn exhausted_depth_reports_best_estimate() {
        let spec = QuadratureSpec {
            max_depth: 10,
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            ..QuadratureSpec::default()
        };
        match adaptive_integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &spec) {
            Err(Error::Convergence {
                estimate,
                error_bound,
            }) => {
                assert!((estimate - 4.0 / 3.0).abs() < 1e-3);
                assert!(error_bound > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_limits() {
        let spec = QuadratureSpec::default();
        assert!(adaptive_integrate(|x| x, 1.0, 0.0, &spec).is_err());
        assert!(adaptive_integrate(|x| x, 0.0, f64::INFINITY, &spec).is_err());
        assert!(integrate_with_breaks(|x| x, &[0.0], &spec).is_err());
        let bad = QuadratureSpec {
            max_depth: 3,
            ..spec
        };
        assert!(adaptive_integrate(|x| x, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn bit_stable_across_calls() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (x * 3.0).sin() * (-x * x).exp();
        let a = adaptive_integrate(f, -6.0, 5.0, &spec).unwrap();
        let b = adaptive_integrate(f, -6.0, 5.0, &spec).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
