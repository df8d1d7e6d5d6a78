//! Materialization/dematerialization regions over pairs of parameters.
//!
//! The criterion `pop - k + eps (k + gdp) < 0` is linear in each of its four
//! parameters taken alone, so the boundary between the two regions can be
//! solved in closed form for any one of them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::estimate::DEFAULT_DENOMINATOR_FLOOR;
use crate::model::{classify_unchecked, index_unchecked, DEFAULT_CLASSIFICATION_TOL};
use crate::scalar::{as_f64, ensure_finite, lit};
use crate::{Classification, Error, Result, Scalar, SeriesKind, TimeSeries};

/// Default upper bound on the number of cells a grid may hold.
pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    K,
    Epsilon,
    PopGrowth,
    GdpGrowth,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::K, Param::Epsilon, Param::PopGrowth, Param::GdpGrowth];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::K => "k",
            Param::Epsilon => "epsilon",
            Param::PopGrowth => "pop_growth",
            Param::GdpGrowth => "gdp_growth",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "k" => Ok(Param::K),
            "epsilon" | "eps" => Ok(Param::Epsilon),
            "pop_growth" | "pop" => Ok(Param::PopGrowth),
            "gdp_growth" | "gdp" => Ok(Param::GdpGrowth),
            other => Err(Error::InvalidArgument(format!(
                "unknown parameter `{other}` (expected k, epsilon, pop_growth or gdp_growth)"
            ))),
        }
    }
}

/// A full assignment of the criterion's four parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    pub k: T,
    pub epsilon: T,
    pub pop_growth: T,
    pub gdp_growth: T,
}

impl<T: Scalar> Params<T> {
    pub fn new(k: T, epsilon: T, pop_growth: T, gdp_growth: T) -> Self {
        Self {
            k,
            epsilon,
            pop_growth,
            gdp_growth,
        }
    }

    pub fn get(&self, param: Param) -> T {
        match param {
            Param::K => self.k,
            Param::Epsilon => self.epsilon,
            Param::PopGrowth => self.pop_growth,
            Param::GdpGrowth => self.gdp_growth,
        }
    }

    pub fn set(&mut self, param: Param, value: T) {
        match param {
            Param::K => self.k = value,
            Param::Epsilon => self.epsilon = value,
            Param::PopGrowth => self.pop_growth = value,
            Param::GdpGrowth => self.gdp_growth = value,
        }
    }

    pub fn with(mut self, param: Param, value: T) -> Self {
        self.set(param, value);
        self
    }

    pub fn index(&self) -> T {
        index_unchecked(self.pop_growth, self.gdp_growth, self.k, self.epsilon)
    }
}

impl<T: Scalar> Default for Params<T> {
    fn default() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }
}

/// Why [`boundary_solve`] found no boundary value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoBoundary {
    /// The unknown's coefficient vanishes and the rest of the expression does
    /// not: the sign is the same everywhere along that axis.
    Singular,
    /// The unknown's coefficient and the rest both vanish: every value lies
    /// on the boundary.
    Degenerate,
    /// With `eps >= 1` only a negative improvement rate would balance the
    /// criterion.
    NoImprovementRate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary<T> {
    At(T),
    Absent(NoBoundary),
}

impl<T: Copy> Boundary<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            Boundary::At(v) => Some(v),
            Boundary::Absent(_) => None,
        }
    }
}

/// Solves `pop - k + eps (k + gdp) = 0` for `unknown`, reading the other three
/// parameters from `known` (its `unknown` entry is ignored).
pub fn boundary_solve<T: Scalar>(unknown: Param, known: Params<T>) -> Result<Boundary<T>> {
    for p in Param::ALL.into_iter().filter(|&p| p != unknown) {
        ensure_finite(p.as_str(), known.get(p))?;
    }
    let floor: T = lit(DEFAULT_DENOMINATOR_FLOOR);
    let Params {
        k,
        epsilon: eps,
        pop_growth: pop,
        gdp_growth: gdp,
    } = known;
    let (numerator, denominator) = match unknown {
        Param::K => (pop + eps * gdp, T::one() - eps),
        Param::GdpGrowth => (k * (T::one() - eps) - pop, eps),
        Param::PopGrowth => (k * (T::one() - eps) - eps * gdp, T::one()),
        Param::Epsilon => (k - pop, k + gdp),
    };
    if denominator.abs() < floor {
        return Ok(Boundary::Absent(if numerator.abs() < floor {
            NoBoundary::Degenerate
        } else {
            NoBoundary::Singular
        }));
    }
    if unknown == Param::K && eps >= T::one() && numerator > T::zero() {
        return Ok(Boundary::Absent(NoBoundary::NoImprovementRate));
    }
    Ok(Boundary::At(numerator / denominator))
}

/// A sampled parameter range: `min, min + step, ...` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<T> {
    pub param: Param,
    pub min: T,
    pub max: T,
    pub step: T,
}

impl<T: Scalar> Axis<T> {
    pub fn new(param: Param, min: T, max: T, step: T) -> Result<Self> {
        let axis = Self {
            param,
            min,
            max,
            step,
        };
        axis.validate()?;
        Ok(axis)
    }

    fn validate(&self) -> Result<()> {
        ensure_finite("axis min", self.min)?;
        ensure_finite("axis max", self.max)?;
        ensure_finite("axis step", self.step)?;
        if self.min >= self.max {
            return Err(Error::InvalidArgument(format!(
                "axis {}: min {} must be below max {}",
                self.param,
                as_f64(self.min),
                as_f64(self.max)
            )));
        }
        if self.step <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "axis {}: step must be positive, got {}",
                self.param,
                as_f64(self.step)
            )));
        }
        Ok(())
    }

    /// Number of sample points.
    pub fn len(&self) -> u64 {
        let span = as_f64((self.max - self.min) / self.step);
        (span + 1e-9).floor() as u64 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: u64) -> T {
        self.min + self.step * T::from_u64(i).expect("axis index representable")
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(move |i| self.value(i))
    }

    fn contains(&self, v: T) -> bool {
        let slack = self.step * lit(1e-9);
        v >= self.min - slack && v <= self.max + slack
    }
}

impl FromStr for Axis<f64> {
    type Err = Error;

    /// Parses `VAR:MIN:MAX:STEP`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidArgument(format!(
                "axis `{s}` is not VAR:MIN:MAX:STEP"
            )));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("axis `{s}`: bad number `{t}`")))
        };
        Axis::new(
            parts[0].parse()?,
            num(parts[1])?,
            num(parts[2])?,
            num(parts[3])?,
        )
    }
}

/// Two swept axes plus fixed values for the other two parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec<T> {
    pub x: Axis<T>,
    pub y: Axis<T>,
    /// Values of the two parameters not swept. The entries for the swept
    /// parameters are placeholders.
    pub fixed: Params<T>,
}

impl<T: Scalar> RegionSpec<T> {
    /// `fixed` must name exactly the two parameters not on an axis.
    pub fn new(x: Axis<T>, y: Axis<T>, fixed: &[(Param, T)]) -> Result<Self> {
        let mut params = Params::default();
        let mut seen = Vec::new();
        for &(p, v) in fixed {
            if p == x.param || p == y.param {
                return Err(Error::InvalidArgument(format!(
                    "{p} is swept and cannot be fixed"
                )));
            }
            if seen.contains(&p) {
                return Err(Error::InvalidArgument(format!("{p} fixed twice")));
            }
            seen.push(p);
            params.set(p, v);
        }
        let spec = Self {
            x,
            y,
            fixed: params,
        };
        spec.validate()?;
        if seen.len() != 2 {
            let missing: Vec<_> = spec.fixed_params().iter().map(|p| p.as_str()).collect();
            return Err(Error::InvalidArgument(format!(
                "fixed values required for {}",
                missing.join(" and ")
            )));
        }
        Ok(spec)
    }

    /// The two parameters held constant.
    pub fn fixed_params(&self) -> Vec<Param> {
        Param::ALL
            .into_iter()
            .filter(|&p| p != self.x.param && p != self.y.param)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        if self.x.param == self.y.param {
            return Err(Error::InvalidArgument(format!(
                "x and y axes both sweep {}",
                self.x.param
            )));
        }
        for p in self.fixed_params() {
            ensure_finite(p.as_str(), self.fixed.get(p))?;
        }
        Ok(())
    }

    pub fn cell_count(&self) -> u64 {
        self.x.len().saturating_mul(self.y.len())
    }

    /// Parameters at the lattice point `(x, y)`.
    pub fn params_at(&self, x: T, y: T) -> Params<T> {
        self.fixed.with(self.x.param, x).with(self.y.param, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCell<T> {
    pub x: T,
    pub y: T,
    pub index: T,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid<T> {
    pub spec: RegionSpec<T>,
    /// Ordered by x ascending, then y ascending.
    pub cells: Vec<PhaseCell<T>>,
}

impl<T: Scalar> PhaseGrid<T> {
    pub fn nx(&self) -> u64 {
        self.spec.x.len()
    }

    pub fn ny(&self) -> u64 {
        self.spec.y.len()
    }

    pub fn count(&self, class: Classification) -> usize {
        self.cells
            .iter()
            .filter(|c| c.classification == class)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions<T> {
    pub cell_budget: u64,
    pub tol: T,
}

impl<T: Scalar> Default for GridOptions<T> {
    fn default() -> Self {
        Self {
            cell_budget: DEFAULT_CELL_BUDGET,
            tol: lit(DEFAULT_CLASSIFICATION_TOL),
        }
    }
}

pub fn classify_grid<T: Scalar>(spec: &RegionSpec<T>) -> Result<PhaseGrid<T>> {
    classify_grid_with(spec, GridOptions::default())
}

pub fn classify_grid_with<T: Scalar>(
    spec: &RegionSpec<T>,
    options: GridOptions<T>,
) -> Result<PhaseGrid<T>> {
    spec.validate()?;
    if options.tol.is_nan() || options.tol < T::zero() {
        return Err(Error::InvalidArgument(
            "classification tolerance must be non-negative".into(),
        ));
    }
    let cells = spec.cell_count();
    if cells > options.cell_budget {
        return Err(Error::ResourceLimit {
            cells,
            budget: options.cell_budget,
        });
    }
    let ny = spec.y.len();
    let cells = (0..cells)
        .into_par_iter()
        .map(|n| {
            let (x, y) = (spec.x.value(n / ny), spec.y.value(n % ny));
            let index = spec.params_at(x, y).index();
            PhaseCell {
                x,
                y,
                index,
                classification: classify_unchecked(index, options.tol),
            }
        })
        .collect();
    Ok(PhaseGrid { spec: *spec, cells })
}

/// Boundary curve of a region as `(x, y)` points in ascending `x`, restricted
/// to the region's axis ranges.
///
/// The curve is traced by solving for `y` at each sampled `x`. When `y` cannot
/// be solved anywhere (its coefficient vanishes), it is traced by solving for
/// `x` at each sampled `y` instead.
pub fn boundary_polyline<T: Scalar>(spec: &RegionSpec<T>) -> Result<Vec<(T, T)>> {
    spec.validate()?;
    let mut points = Vec::new();
    let mut y_solvable = false;
    for x in spec.x.values() {
        let known = spec.fixed.with(spec.x.param, x);
        if let Boundary::At(y) = boundary_solve(spec.y.param, known)? {
            y_solvable = true;
            if spec.y.contains(y) {
                points.push((x, y));
            }
        }
    }
    if !y_solvable {
        for y in spec.y.values() {
            let known = spec.fixed.with(spec.y.param, y);
            if let Boundary::At(x) = boundary_solve(spec.x.param, known)? {
                if spec.x.contains(x) {
                    points.push((x, y));
                }
            }
        }
        points.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        });
    }
    Ok(points)
}

/// `pop_rate + eps * gdp_rate` for every year present in both rate series.
pub fn combined_growth_series<T: Scalar>(
    pop_growth: &TimeSeries<T>,
    gdp_growth: &TimeSeries<T>,
    epsilon: T,
) -> Result<Vec<(T, T)>> {
    ensure_finite("epsilon", epsilon)?;
    for s in [pop_growth, gdp_growth] {
        if s.kind() != SeriesKind::Rate {
            return Err(Error::InvalidArgument(format!(
                "series `{}` must hold growth rates (kind rate), found {}",
                s.label(),
                s.kind()
            )));
        }
    }
    let (a, b) = (pop_growth.observations(), gdp_growth.observations());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        if a[i].year < b[j].year {
            i += 1;
        } else if b[j].year < a[i].year {
            j += 1;
        } else {
            out.push((a[i].year, a[i].value + epsilon * b[j].value));
            i += 1;
            j += 1;
        }
    }
    if out.is_empty() {
        return Err(Error::NoOverlap);
    }
    Ok(out)
}

/// Bundled region presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// GDP growth vs population growth at k = 0.05, eps = 0.5.
    Fig2,
    /// k vs GDP growth at eps = 0.5, pop = 0.01.
    Fig3,
    /// k vs eps at pop = 0.01, gdp = 0.03.
    Fig4,
    /// Chemicals: k vs eps at the 1940s-60s era, pop = 0.02, gdp = 0.05.
    Fig5a,
    /// Hardware: k vs eps at pop = 0.01, gdp = 0.03 (the Fig4 era).
    Fig5b,
    /// Hardware: k vs eps at pop = 0.02, gdp = 0.03, the era the hardware
    /// table rows were computed with.
    Fig5bEra,
    /// Energy: k vs eps at the 1940s-60s era, pop = 0.02, gdp = 0.05.
    Fig5c,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5a,
        Preset::Fig5b,
        Preset::Fig5bEra,
        Preset::Fig5c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5a => "fig5a",
            Preset::Fig5b => "fig5b",
            Preset::Fig5bEra => "fig5b-era",
            Preset::Fig5c => "fig5c",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Fig2 => "x=gdp_growth 0..0.1, y=pop_growth 0..0.05; k=0.05, epsilon=0.5",
            Preset::Fig3 => "x=k 0..0.3, y=gdp_growth 0..0.15; epsilon=0.5, pop_growth=0.01",
            Preset::Fig4 => "x=k 0..0.7, y=epsilon 0..2; pop_growth=0.01, gdp_growth=0.03",
            Preset::Fig5a => "x=k 0..0.2, y=epsilon 0..2.5; pop_growth=0.02, gdp_growth=0.05",
            Preset::Fig5b => "x=k 0..0.7, y=epsilon 0..2.5; pop_growth=0.01, gdp_growth=0.03",
            Preset::Fig5bEra => "x=k 0..0.7, y=epsilon 0..2.5; pop_growth=0.02, gdp_growth=0.03",
            Preset::Fig5c => "x=k 0..0.15, y=epsilon 0..8; pop_growth=0.02, gdp_growth=0.05",
        }
    }

    pub fn spec<T: Scalar>(self) -> RegionSpec<T> {
        let axis = |param, min: f64, max: f64, step: f64| Axis {
            param,
            min: lit::<T>(min),
            max: lit::<T>(max),
            step: lit::<T>(step),
        };
        let k_eps =
            |k_max: f64, k_step: f64, eps_max: f64, eps_step: f64, pop: f64, gdp: f64| RegionSpec {
                x: axis(Param::K, 0.0, k_max, k_step),
                y: axis(Param::Epsilon, 0.0, eps_max, eps_step),
                fixed: Params::new(T::zero(), T::zero(), lit(pop), lit(gdp)),
            };
        match self {
            Preset::Fig2 => RegionSpec {
                x: axis(Param::GdpGrowth, 0.0, 0.1, 0.001),
                y: axis(Param::PopGrowth, 0.0, 0.05, 0.0005),
                fixed: Params::new(lit(0.05), lit(0.5), T::zero(), T::zero()),
            },
            Preset::Fig3 => RegionSpec {
                x: axis(Param::K, 0.0, 0.3, 0.0025),
                y: axis(Param::GdpGrowth, 0.0, 0.15, 0.0025),
                fixed: Params::new(T::zero(), lit(0.5), lit(0.01), T::zero()),
            },
            Preset::Fig4 => k_eps(0.7, 0.005, 2.0, 0.01, 0.01, 0.03),
            Preset::Fig5a => k_eps(0.2, 0.002, 2.5, 0.0125, 0.02, 0.05),
            Preset::Fig5b => k_eps(0.7, 0.005, 2.5, 0.0125, 0.01, 0.03),
            Preset::Fig5bEra => k_eps(0.7, 0.005, 2.5, 0.0125, 0.02, 0.03),
            Preset::Fig5c => k_eps(0.15, 0.0015, 8.0, 0.04, 0.02, 0.05),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownPreset(s.to_owned()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn known(k: f64, eps: f64, pop: f64, gdp: f64) -> Params<f64> {
        Params::new(k, eps, pop, gdp)
    }

    #[test]
    fn boundary_examples() {
        let gdp = boundary_solve(Param::GdpGrowth, known(0.05, 0.5, 0.0, f64::NAN)).unwrap();
        assert_eq!(gdp, Boundary::At(0.05));
        let pop = boundary_solve(Param::PopGrowth, known(0.05, 0.5, f64::NAN, 0.0)).unwrap();
        assert_eq!(pop, Boundary::At(0.025));
        let k = boundary_solve(Param::K, known(f64::NAN, 1.2, 0.01, 0.03)).unwrap();
        assert_eq!(k, Boundary::Absent(NoBoundary::NoImprovementRate));
        let gdp = boundary_solve(Param::GdpGrowth, known(0.15, 0.5, 0.01, 0.0)).unwrap();
        assert!((gdp.value().unwrap() - 0.13).abs() < 1e-15);
    }

    #[test]
    fn boundary_for_epsilon_and_k() {
        // eps* = (k - pop) / (k + gdp)
        let eps = boundary_solve(Param::Epsilon, known(0.2, 0.0, 0.01, 0.03)).unwrap();
        assert!((eps.value().unwrap() - 0.19 / 0.23).abs() < 1e-15);
        // k* = (pop + eps gdp) / (1 - eps)
        let k = boundary_solve(Param::K, known(0.0, 0.5, 0.01, 0.03)).unwrap();
        assert!((k.value().unwrap() - 0.05).abs() < 1e-15);
        // eps > 1 with a non-positive numerator still has a boundary
        let k = boundary_solve(Param::K, known(0.0, 2.0, -0.04, 0.01)).unwrap();
        assert!((k.value().unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn singular_boundaries_are_typed() {
        assert_eq!(
            boundary_solve(Param::K, known(0.0, 1.0, 0.01, 0.03)).unwrap(),
            Boundary::Absent(NoBoundary::Singular)
        );
        assert_eq!(
            boundary_solve(Param::K, known(0.0, 1.0, 0.0, 0.0)).unwrap(),
            Boundary::Absent(NoBoundary::Degenerate)
        );
        assert_eq!(
            boundary_solve(Param::GdpGrowth, known(0.05, 0.0, 0.01, 0.0)).unwrap(),
            Boundary::Absent(NoBoundary::Singular)
        );
        assert_eq!(
            boundary_solve(Param::Epsilon, known(0.03, 0.0, 0.01, -0.03)).unwrap(),
            Boundary::Absent(NoBoundary::Singular)
        );
        assert!(matches!(
            boundary_solve(Param::K, known(0.0, f64::NAN, 0.01, 0.03)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn fig4_grid_cells() {
        let spec = Preset::Fig4.spec::<f64>();
        let grid = classify_grid(&spec).unwrap();
        assert_eq!(grid.cells.len() as u64, grid.nx() * grid.ny());
        let cell = |x: f64, y: f64| {
            *grid
                .cells
                .iter()
                .find(|c| (c.x - x).abs() < 1e-9 && (c.y - y).abs() < 1e-9)
                .unwrap()
        };
        let a = cell(0.2, 0.5);
        assert!((a.index + 0.075).abs() < 1e-12);
        assert_eq!(a.classification, Classification::Dematerializing);
        let b = cell(0.2, 1.2);
        assert!((b.index - 0.086).abs() < 1e-12);
        assert_eq!(b.classification, Classification::Materializing);
        assert!(grid
            .cells
            .iter()
            .filter(|c| c.y >= 1.0)
            .all(|c| c.classification == Classification::Materializing));
    }

    #[test]
    fn grid_order_is_x_major() {
        let spec = RegionSpec::new(
            Axis::new(Param::K, 0.0, 0.2, 0.1).unwrap(),
            Axis::new(Param::Epsilon, 0.0, 1.0, 0.5).unwrap(),
            &[(Param::PopGrowth, 0.01), (Param::GdpGrowth, 0.03)],
        )
        .unwrap();
        let grid = classify_grid(&spec).unwrap();
        let xy: Vec<(f64, f64)> = grid.cells.iter().map(|c| (c.x, c.y)).collect();
        assert_eq!(xy.len(), 9);
        assert_eq!(&xy[..4], &[(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (0.1, 0.0)]);
        for c in &grid.cells {
            assert_eq!(c.classification, classify_unchecked(c.index, 1e-12));
        }
    }

    #[test]
    fn region_spec_validation() {
        let kx = Axis::new(Param::K, 0.0, 0.2, 0.1).unwrap();
        let ky = Axis {
            param: Param::K,
            ..kx
        };
        assert!(
            RegionSpec::new(kx, ky, &[(Param::PopGrowth, 0.0), (Param::GdpGrowth, 0.0)]).is_err()
        );
        let ey = Axis::new(Param::Epsilon, 0.0, 1.0, 0.5).unwrap();
        assert!(RegionSpec::new(kx, ey, &[(Param::PopGrowth, 0.0)]).is_err());
        assert!(RegionSpec::new(kx, ey, &[(Param::K, 0.0), (Param::GdpGrowth, 0.0)]).is_err());
        assert!(RegionSpec::new(
            kx,
            ey,
            &[(Param::PopGrowth, f64::NAN), (Param::GdpGrowth, 0.0)]
        )
        .is_err());
        assert!(Axis::new(Param::K, 0.2, 0.1, 0.1).is_err());
        assert!(Axis::new(Param::K, 0.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn cell_budget_enforced() {
        let spec = RegionSpec::new(
            Axis::new(Param::K, 0.0, 1.0, 1e-4).unwrap(),
            Axis::new(Param::Epsilon, 0.0, 1.0, 1e-4).unwrap(),
            &[(Param::PopGrowth, 0.01), (Param::GdpGrowth, 0.03)],
        )
        .unwrap();
        assert!(matches!(
            classify_grid(&spec),
            Err(Error::ResourceLimit { .. })
        ));
        let small = GridOptions {
            cell_budget: 3,
            tol: 1e-12,
        };
        let tiny = RegionSpec {
            x: Axis::new(Param::K, 0.0, 0.1, 0.05).unwrap(),
            ..spec
        };
        assert!(matches!(
            classify_grid_with(
                &RegionSpec {
                    y: tiny.x,
                    x: spec.y,
                    ..tiny
                },
                small
            ),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn fig2_polyline_intercepts() {
        let line = boundary_polyline(&Preset::Fig2.spec::<f64>()).unwrap();
        assert_eq!(line.first().copied(), Some((0.0, 0.025)));
        let last = *line.last().unwrap();
        assert!(
            (last.0 - 0.05).abs() < 1e-12 && last.1.abs() < 1e-12,
            "{last:?}"
        );
        assert!(line.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn polyline_falls_back_to_x_solve() {
        // y = gdp with eps = 0 fixed: gdp has no effect, boundary is the vertical k = pop
        let spec = RegionSpec::new(
            Axis::new(Param::K, 0.0f64, 0.1, 0.01).unwrap(),
            Axis::new(Param::GdpGrowth, 0.0, 0.05, 0.01).unwrap(),
            &[(Param::Epsilon, 0.0), (Param::PopGrowth, 0.02)],
        )
        .unwrap();
        let line = boundary_polyline(&spec).unwrap();
        assert_eq!(line.len(), 6);
        assert!(line.iter().all(|&(x, _)| (x - 0.02).abs() < 1e-15));
    }

    #[test]
    fn combined_growth_examples() {
        let rate = |pairs: &[(f64, f64)]| {
            TimeSeries::from_pairs("r", SeriesKind::Rate, pairs.iter().copied()).unwrap()
        };
        let pop = rate(&[(2000.0, 0.012), (2010.0, 0.010)]);
        let gdp = rate(&[(2000.0, 0.04), (2010.0, 0.03)]);
        let out = combined_growth_series(&pop, &gdp, 0.5).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out[0].1 - 0.032).abs() < 1e-15 && (out[1].1 - 0.025).abs() < 1e-15);
        assert_eq!(
            combined_growth_series(&pop, &gdp, 0.0).unwrap(),
            vec![(2000.0, 0.012), (2010.0, 0.010)]
        );

        let flat_pop = rate(&[(1990.0, 0.01), (1991.0, 0.01), (1992.0, 0.01)]);
        let flat_gdp = rate(&[(1991.0, 0.03), (1992.0, 0.03), (1993.0, 0.03)]);
        let out = combined_growth_series(&flat_pop, &flat_gdp, 0.5).unwrap();
        assert_eq!(
            out.iter().map(|p| p.0).collect::<Vec<_>>(),
            vec![1991.0, 1992.0]
        );
        assert!(out.iter().all(|p| (p.1 - 0.025).abs() < 1e-15));

        let late = rate(&[(2050.0, 0.01), (2051.0, 0.01)]);
        assert!(matches!(
            combined_growth_series(&pop, &late, 0.5),
            Err(Error::NoOverlap)
        ));
        let level =
            TimeSeries::from_pairs("p", SeriesKind::Population, [(2000.0, 1.0), (2010.0, 2.0)])
                .unwrap();
        assert!(combined_growth_series(&level, &gdp, 0.5).is_err());
    }

    #[test]
    fn parsing() {
        let a: Axis<f64> = "k:0:0.7:0.01".parse().unwrap();
        assert_eq!(a.param, Param::K);
        assert_eq!(a.len(), 71);
        assert!("eps:0:1".parse::<Axis<f64>>().is_err());
        assert!("zeta:0:1:0.1".parse::<Axis<f64>>().is_err());
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            p.spec::<f64>().validate().unwrap();
        }
        assert!("fig9".parse::<Preset>().is_err());
    }

    #[test]
    fn presets_evaluate_in_f32() {
        let grid = classify_grid(&Preset::Fig2.spec::<f32>()).unwrap();
        assert!(grid.count(Classification::Dematerializing) > 0);
        assert!(grid.count(Classification::Materializing) > 0);
    }
}
