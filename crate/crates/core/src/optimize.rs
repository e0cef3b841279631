//! Grid sweeps over `(t̄, u')` and search for the best operating point.

use alloc::vec::Vec;

use crate::engine::{self, conditional_entropy_with, CycleReport};
use crate::error::{domain, Result};
use crate::model::{EngineParams, OperatingPoint};
use crate::numerics::QuadratureSpec;

/// Quantity to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Efficiency,
    Power,
    Product,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Efficiency, Objective::Power, Objective::Product];

    pub fn evaluate(self, pt: &OperatingPoint, params: &EngineParams) -> f64 {
        match self {
            Objective::Efficiency => engine::efficiency(pt, params),
            Objective::Power => engine::power(pt, params),
            Objective::Product => engine::performance_product(pt, params),
        }
    }

    pub fn of_report(self, report: &CycleReport) -> f64 {
        match self {
            Objective::Efficiency => report.efficiency,
            Objective::Power => report.power,
            Objective::Product => report.product,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::Efficiency => "efficiency",
            Objective::Power => "power",
            Objective::Product => "product",
        }
    }
}

impl core::str::FromStr for Objective {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "efficiency" | "eta" => Ok(Objective::Efficiency),
            "power" => Ok(Objective::Power),
            "product" => Ok(Objective::Product),
            _ => Err(domain(
                "objective must be one of efficiency, power, product",
            )),
        }
    }
}

/// A strictly increasing, finite sample axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis(Vec<f64>);

impl Axis {
    /// `count` evenly spaced points from `lo` to `hi` inclusive. A single
    /// point is allowed only when `lo == hi`.
    pub fn linspace(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(domain("axis bounds must be finite"));
        }
        match count {
            0 => Err(domain("axis needs at least one point")),
            1 if lo == hi => Ok(Axis(alloc::vec![lo])),
            1 => Err(domain("a one-point axis needs lo == hi")),
            _ if lo < hi => {
                let step = (hi - lo) / (count - 1) as f64;
                let mut v: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
                v[count - 1] = hi;
                Ok(Axis(v))
            }
            _ => Err(domain("axis needs lo < hi")),
        }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(domain("axis values must be finite and non-empty"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("axis values must be strictly increasing"));
        }
        Ok(Axis(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rectangular table of cycle reports. `cells[i * u_len + j]` belongs to
/// `t_bar_axis[i]` and `u_prime_axis[j]`. A cell whose evaluation failed
/// keeps its error; the rest of the sweep is unaffected.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub t_bar_axis: Vec<f64>,
    pub u_prime_axis: Vec<f64>,
    pub cells: Vec<Result<CycleReport>>,
    pub params_echo: EngineParams,
}

impl SweepTable {
    /// Assembles a table from per-`t̄` columns, as produced by
    /// [`sweep_column`]. Used by parallel drivers.
    pub fn from_columns(
        params: &EngineParams,
        t_axis: &Axis,
        u_axis: &Axis,
        columns: Vec<Vec<Result<CycleReport>>>,
    ) -> Result<Self> {
        if columns.len() != t_axis.len() || columns.iter().any(|c| c.len() != u_axis.len()) {
            return Err(domain("sweep columns do not match the axes"));
        }
        Ok(Self {
            t_bar_axis: t_axis.values().to_vec(),
            u_prime_axis: u_axis.values().to_vec(),
            cells: columns.into_iter().flatten().collect(),
            params_echo: *params,
        })
    }

    pub fn cell(&self, i: usize, j: usize) -> &Result<CycleReport> {
        &self.cells[i * self.u_prime_axis.len() + j]
    }

    /// Best successfully evaluated cell; ties go to the smaller `t̄`.
    pub fn argmax(&self, objective: Objective) -> Option<(usize, usize, f64)> {
        let nu = self.u_prime_axis.len();
        let mut best: Option<(usize, usize, f64)> = None;
        for (k, cell) in self.cells.iter().enumerate() {
            if let Ok(r) = cell {
                let v = objective.of_report(r);
                if best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((k / nu, k % nu, v));
                }
            }
        }
        best
    }
}

/// Reports for every `u'` at a single `t̄`, sharing one entropy quadrature.
pub fn sweep_column(
    params: &EngineParams,
    t_bar: f64,
    u_axis: &Axis,
    spec: &QuadratureSpec,
) -> Vec<Result<CycleReport>> {
    let s_cond =
        OperatingPoint::at_time(t_bar).and_then(|pt| conditional_entropy_with(&pt, params, spec));
    u_axis
        .values()
        .iter()
        .map(|&u| {
            let pt = OperatingPoint::new(t_bar, u)?;
            let s = s_cond.clone()?;
            Ok(CycleReport::assemble(&pt, params, s))
        })
        .collect()
}

pub fn sweep(params: &EngineParams, t_axis: &Axis, u_axis: &Axis) -> Result<SweepTable> {
    let spec = QuadratureSpec::default();
    let columns = t_axis
        .values()
        .iter()
        .map(|&t| sweep_column(params, t, u_axis, &spec))
        .collect();
    SweepTable::from_columns(params, t_axis, u_axis, columns)
}

/// Search region. Setting `lo == hi` on an axis pins that coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub t_min: f64,
    pub t_max: f64,
    pub u_min: f64,
    pub u_max: f64,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self {
            t_min: 0.01,
            t_max: 20.0,
            u_min: -4.0,
            u_max: 2.0,
        }
    }
}

impl SearchBox {
    pub fn with_fixed_threshold(self, u_prime: f64) -> Self {
        Self {
            u_min: u_prime,
            u_max: u_prime,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_t = self.t_min > 0.0 && self.t_min <= self.t_max && self.t_max <= 50.0;
        let ok_u = self.u_min >= -10.0 && self.u_min <= self.u_max && self.u_max <= 10.0;
        if !(ok_t && ok_u) {
            return Err(domain(
                "search box must lie within t in (0, 50], u' in [-10, 10]",
            ));
        }
        Ok(())
    }

    fn contains(&self, t: f64, u: f64) -> bool {
        t >= self.t_min && t <= self.t_max && u >= self.u_min && u <= self.u_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub t_bar_star: f64,
    pub u_prime_star: f64,
    pub value: f64,
    pub objective: Objective,
    /// The optimum sits on an edge of the search box.
    pub on_boundary: bool,
    /// The local refinement met its coordinate tolerance.
    pub converged: bool,
}

/// Points per axis in the coarse scan of [`maximize`].
pub const COARSE_RESOLUTION: usize = 64;

const COORD_TOL: f64 = 1e-8;
const BOUNDARY_TOL: f64 = 1e-5;

pub fn maximize(
    params: &EngineParams,
    objective: Objective,
    search: &SearchBox,
) -> Result<Optimum> {
    maximize_with_resolution(params, objective, search, COARSE_RESOLUTION)
}

/// Coarse `resolution × resolution` scan followed by derivative-free local
/// refinement (Nelder–Mead in 2-D, golden section in 1-D).
pub fn maximize_with_resolution(
    params: &EngineParams,
    objective: Objective,
    search: &SearchBox,
    resolution: usize,
) -> Result<Optimum> {
    search.validate()?;
    if resolution < 3 {
        return Err(domain("coarse resolution must be at least 3"));
    }
    let axis = |lo: f64, hi: f64| {
        if lo == hi {
            Axis::linspace(lo, hi, 1)
        } else {
            Axis::linspace(lo, hi, resolution)
        }
    };
    let t_axis = axis(search.t_min, search.t_max)?;
    let u_axis = axis(search.u_min, search.u_max)?;
    let f = |t: f64, u: f64| {
        objective.evaluate(
            &OperatingPoint {
                t_bar: t,
                u_prime: u,
            },
            params,
        )
    };

    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (i, &t) in t_axis.values().iter().enumerate() {
        for (j, &u) in u_axis.values().iter().enumerate() {
            let v = f(t, u);
            if v > best.2 {
                best = (i, j, v);
            }
        }
    }
    let (bi, bj, coarse_value) = best;
    let coarse = (t_axis.values()[bi], u_axis.values()[bj]);

    let t_free = t_axis.len() > 1;
    let u_free = u_axis.len() > 1;
    let (mut t_star, mut u_star, converged) = match (t_free, u_free) {
        (false, false) => (coarse.0, coarse.1, true),
        (true, false) => {
            let (lo, hi) = bracket(t_axis.values(), bi);
            let (t, ok) = golden_section(|t| f(t, coarse.1), lo, hi);
            (t, coarse.1, ok)
        }
        (false, true) => {
            let (lo, hi) = bracket(u_axis.values(), bj);
            let (u, ok) = golden_section(|u| f(coarse.0, u), lo, hi);
            (coarse.0, u, ok)
        }
        (true, true) => {
            let step = (
                t_axis.values()[1] - t_axis.values()[0],
                u_axis.values()[1] - u_axis.values()[0],
            );
            nelder_mead(&f, search, coarse, step)
        }
    };

    let mut value = f(t_star, u_star);
    if value.is_nan() || value < coarse_value {
        t_star = coarse.0;
        u_star = coarse.1;
        value = coarse_value;
    }
    let near = |x: f64, edge: f64| (x - edge).abs() <= BOUNDARY_TOL;
    let on_boundary = (t_free && (near(t_star, search.t_min) || near(t_star, search.t_max)))
        || (u_free && (near(u_star, search.u_min) || near(u_star, search.u_max)));
    Ok(Optimum {
        t_bar_star: t_star,
        u_prime_star: u_star,
        value,
        objective,
        on_boundary,
        converged,
    })
}

fn bracket(values: &[f64], i: usize) -> (f64, f64) {
    let lo = values[i.saturating_sub(1)];
    let hi = values[(i + 1).min(values.len() - 1)];
    (lo, hi)
}

/// Golden-section maximization on `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, bool) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= COORD_TOL {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    // Compare the interior estimate with the bracket ends so a monotone
    // objective lands exactly on the edge.
    let mid = 0.5 * (lo + hi);
    let candidates = [(lo, f(lo)), (mid, f(mid)), (hi, f(hi))];
    let best = candidates
        .iter()
        .fold(candidates[0], |b, &c| if c.1 > b.1 { c } else { b });
    (best.0, hi - lo <= COORD_TOL)
}

type Vertex = ((f64, f64), f64);

/// Nelder–Mead maximization restricted to `search`, restarted from the
/// incumbent until a restart no longer moves it.
fn nelder_mead(
    f: &impl Fn(f64, f64) -> f64,
    search: &SearchBox,
    start: (f64, f64),
    step: (f64, f64),
) -> (f64, f64, bool) {
    let g = |p: (f64, f64)| {
        if search.contains(p.0, p.1) {
            f(p.0, p.1)
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut incumbent = start;
    let mut scale = 1.0;
    let mut converged = false;
    for _ in 0..8 {
        let (p, ok) = nelder_mead_run(&g, search, incumbent, (step.0 * scale, step.1 * scale));
        let moved = (p.0 - incumbent.0).abs().max((p.1 - incumbent.1).abs());
        incumbent = p;
        converged = ok;
        if ok && moved <= COORD_TOL {
            break;
        }
        scale *= 0.1;
    }
    (incumbent.0, incumbent.1, converged)
}

fn nelder_mead_run(
    g: &impl Fn((f64, f64)) -> f64,
    search: &SearchBox,
    start: (f64, f64),
    step: (f64, f64),
) -> ((f64, f64), bool) {
    let offset =
        |x: f64, d: f64, lo: f64, hi: f64| if x + d <= hi { x + d } else { (x - d).max(lo) };
    let p1 = (offset(start.0, step.0, search.t_min, search.t_max), start.1);
    let p2 = (start.0, offset(start.1, step.1, search.u_min, search.u_max));
    let mut simplex: [Vertex; 3] = [(start, g(start)), (p1, g(p1)), (p2, g(p2))];

    // Highest value first; equal values prefer smaller t̄.
    let order = |s: &mut [Vertex; 3]| {
        s.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(
                    a.0 .0
                        .partial_cmp(&b.0 .0)
                        .unwrap_or(core::cmp::Ordering::Equal),
                )
        })
    };
    let lerp =
        |a: (f64, f64), b: (f64, f64), s: f64| (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1));

    for _ in 0..5_000 {
        order(&mut simplex);
        let best = simplex[0].0;
        let spread = simplex[1..]
            .iter()
            .map(|v| (v.0 .0 - best.0).abs().max((v.0 .1 - best.1).abs()))
            .fold(0.0, f64::max);
        if spread <= COORD_TOL {
            return (best, true);
        }
        let centroid = lerp(simplex[0].0, simplex[1].0, 0.5);
        let worst = simplex[2];
        let reflected = lerp(worst.0, centroid, 2.0);
        let fr = g(reflected);
        if fr > simplex[0].1 {
            let expanded = lerp(worst.0, centroid, 3.0);
            let fe = g(expanded);
            simplex[2] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr > simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let (towards, fv) = if fr > worst.1 {
                (reflected, fr)
            } else {
                (worst.0, worst.1)
            };
            let contracted = lerp(centroid, towards, 0.5);
            let fc = g(contracted);
            if fc > fv {
                simplex[2] = (contracted, fc);
            } else {
                for k in 1..3 {
                    let p = lerp(simplex[0].0, simplex[k].0, 0.5);
                    simplex[k] = (p, g(p));
                }
            }
        }
    }
    order(&mut simplex);
    (simplex[0].0, false)
}
