//! Closed-form growth equations and the absolute dematerialization criterion.
//!
//! All rates are continuous (natural-log) annual rates.

use std::fmt;

use log::warn;

use crate::scalar::{as_f64, ensure_finite, lit};
use crate::{Error, Result, Scalar};

/// Default tolerance used to resolve floating-point ties on the criterion to
/// [`Classification::Boundary`].
pub const DEFAULT_CLASSIFICATION_TOL: f64 = 1e-12;

/// Exponential improvement of a performance-per-cost (or cost) metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechnologyTrend<T> {
    /// Annual improvement rate `k`.
    pub improvement_rate: T,
    pub reference_level: T,
    pub reference_year: T,
}

impl<T: Scalar> TechnologyTrend<T> {
    pub fn new(improvement_rate: T, reference_level: T, reference_year: T) -> Result<Self> {
        ensure_finite("improvement_rate", improvement_rate)?;
        ensure_finite("reference_level", reference_level)?;
        ensure_finite("reference_year", reference_year)?;
        if reference_level <= T::zero() {
            return Err(Error::Domain(format!(
                "reference_level must be positive, got {}",
                as_f64(reference_level)
            )));
        }
        if improvement_rate < T::zero() || improvement_rate > lit(0.7) {
            warn!(
                "improvement rate {} is outside the empirically observed range [0, 0.7]",
                as_f64(improvement_rate)
            );
        }
        Ok(Self {
            improvement_rate,
            reference_level,
            reference_year,
        })
    }

    /// Performance per cost at `year`.
    pub fn level_at(&self, year: T) -> Result<T> {
        project_trend(
            self.improvement_rate,
            self.reference_level,
            year - self.reference_year,
        )
    }

    /// Cost at constant function at `year`; decays at the improvement rate.
    pub fn cost_at(&self, year: T) -> Result<T> {
        project_trend(
            -self.improvement_rate,
            self.reference_level,
            year - self.reference_year,
        )
    }
}

/// Exponential growth of demand `D = D0 exp(g t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandTrend<T> {
    pub growth_rate: T,
    pub reference_demand: T,
    pub reference_year: T,
}

impl<T: Scalar> DemandTrend<T> {
    pub fn new(growth_rate: T, reference_demand: T, reference_year: T) -> Result<Self> {
        ensure_finite("growth_rate", growth_rate)?;
        ensure_finite("reference_demand", reference_demand)?;
        ensure_finite("reference_year", reference_year)?;
        if reference_demand <= T::zero() {
            return Err(Error::Domain(format!(
                "reference_demand must be positive, got {}",
                as_f64(reference_demand)
            )));
        }
        Ok(Self {
            growth_rate,
            reference_demand,
            reference_year,
        })
    }

    pub fn demand_at(&self, year: T) -> Result<T> {
        project_trend(
            self.growth_rate,
            self.reference_demand,
            year - self.reference_year,
        )
    }
}

/// Background growth environment: population and per-capita GDP growth rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EraContext<T> {
    pub pop_growth: T,
    pub gdp_growth: T,
}

impl<T: Scalar> EraContext<T> {
    pub fn new(pop_growth: T, gdp_growth: T) -> Result<Self> {
        ensure_finite("pop_growth", pop_growth)?;
        ensure_finite("gdp_growth", gdp_growth)?;
        let (lo, hi) = (lit::<T>(-0.02), lit::<T>(0.10));
        if pop_growth < lo || pop_growth > hi || gdp_growth < lo || gdp_growth > hi {
            warn!(
                "era growth rates (pop {}, gdp {}) are outside the typical range [-0.02, 0.10]",
                as_f64(pop_growth),
                as_f64(gdp_growth)
            );
        }
        Ok(Self {
            pop_growth,
            gdp_growth,
        })
    }
}

/// Income and price elasticities of demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityPair<T> {
    pub income: T,
    pub price: T,
    /// Set when the price elasticity is taken equal to the income elasticity.
    pub equal_assumption: bool,
}

impl<T: Scalar> ElasticityPair<T> {
    /// A single elasticity used for both income and price response.
    pub fn equal(epsilon: T) -> Self {
        Self {
            income: epsilon,
            price: epsilon,
            equal_assumption: true,
        }
    }

    pub fn distinct(income: T, price: T) -> Self {
        Self {
            income,
            price,
            equal_assumption: false,
        }
    }

    /// The common elasticity, if the equal-elasticity assumption holds.
    pub fn common(&self) -> Option<T> {
        (self.equal_assumption || self.income == self.price).then_some(self.income)
    }
}

/// Ternary reading of the criterion's sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classification {
    Dematerializing,
    Boundary,
    Materializing,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Dematerializing => "dematerializing",
            Classification::Boundary => "boundary",
            Classification::Materializing => "materializing",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DematAssessment<T> {
    pub epsilon: T,
    pub index: T,
    pub classification: Classification,
}

impl<T: Scalar> DematAssessment<T> {
    /// Evaluates the criterion for one (era, k, eps) combination.
    pub fn evaluate(era: EraContext<T>, k: T, epsilon: T, tol: T) -> Result<Self> {
        let index = materialization_index(era, k, epsilon)?;
        let classification = classify_index(index, tol)?;
        Ok(Self {
            epsilon,
            index,
            classification,
        })
    }
}

/// `reference_level * exp(rate * elapsed_years)`.
pub fn project_trend<T: Scalar>(rate: T, reference_level: T, elapsed_years: T) -> Result<T> {
    ensure_finite("rate", rate)?;
    ensure_finite("reference_level", reference_level)?;
    ensure_finite("elapsed_years", elapsed_years)?;
    if reference_level <= T::zero() {
        return Err(Error::Domain(format!(
            "reference_level must be positive, got {}",
            as_f64(reference_level)
        )));
    }
    Ok(reference_level * (rate * elapsed_years).exp())
}

/// Growth rate of per-capita material usage, `-k + eps_price k + eps_income g_c`.
///
/// With no rebound and no income growth this is just `-k`: each unit of
/// function needs exponentially less material.
pub fn per_capita_usage_rate<T: Scalar>(
    k: T,
    elasticities: ElasticityPair<T>,
    gdp_growth: T,
) -> Result<T> {
    ensure_finite("k", k)?;
    ensure_finite("income elasticity", elasticities.income)?;
    ensure_finite("price elasticity", elasticities.price)?;
    ensure_finite("gdp_growth", gdp_growth)?;
    Ok(-k + elasticities.price * k + elasticities.income * gdp_growth)
}

/// Growth rate of total material usage under equal elasticities:
/// `pop - k + eps (k + gdp)`. Negative means absolute dematerialization.
pub fn materialization_index<T: Scalar>(era: EraContext<T>, k: T, epsilon: T) -> Result<T> {
    ensure_finite("pop_growth", era.pop_growth)?;
    ensure_finite("gdp_growth", era.gdp_growth)?;
    ensure_finite("k", k)?;
    ensure_finite("epsilon", epsilon)?;
    Ok(index_unchecked(era.pop_growth, era.gdp_growth, k, epsilon))
}

#[inline]
pub(crate) fn index_unchecked<T: Scalar>(pop: T, gdp: T, k: T, epsilon: T) -> T {
    pop - k + epsilon * (k + gdp)
}

pub fn classify_index<T: Scalar>(index: T, tol: T) -> Result<Classification> {
    ensure_finite("index", index)?;
    if tol.is_nan() || tol < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "classification tolerance must be non-negative, got {}",
            as_f64(tol)
        )));
    }
    Ok(classify_unchecked(index, tol))
}

#[inline]
pub(crate) fn classify_unchecked<T: Scalar>(index: T, tol: T) -> Classification {
    if index < -tol {
        Classification::Dematerializing
    } else if index > tol {
        Classification::Materializing
    } else {
        Classification::Boundary
    }
}

/// Whether total usage declines: per-capita usage must fall faster than
/// population grows.
pub fn strong_demat_criterion<T: Scalar>(per_capita_rate: T, pop_growth: T) -> Result<bool> {
    ensure_finite("per_capita_rate", per_capita_rate)?;
    ensure_finite("pop_growth", pop_growth)?;
    Ok(per_capita_rate < T::zero() && per_capita_rate.abs() > pop_growth.abs())
}

/// One yearly sample of projected usage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsagePoint<T> {
    pub year_offset: u32,
    pub per_capita: T,
    pub total: T,
}

/// Samples `m_c(t)` and `m(t) = p(t) m_c(t)` at `t = 0, 1, ..., horizon_years`.
pub fn project_usage<T: Scalar>(
    initial_per_capita: T,
    initial_population: T,
    per_capita_rate: T,
    pop_growth: T,
    horizon_years: u32,
) -> Result<Vec<UsagePoint<T>>> {
    ensure_finite("initial_per_capita", initial_per_capita)?;
    ensure_finite("initial_population", initial_population)?;
    ensure_finite("per_capita_rate", per_capita_rate)?;
    ensure_finite("pop_growth", pop_growth)?;
    if initial_per_capita <= T::zero() || initial_population <= T::zero() {
        return Err(Error::Domain(format!(
            "initial levels must be positive, got per-capita {} and population {}",
            as_f64(initial_per_capita),
            as_f64(initial_population)
        )));
    }
    if horizon_years == 0 {
        return Err(Error::InvalidArgument(
            "horizon must be at least one year".into(),
        ));
    }
    Ok((0..=horizon_years)
        .map(|year| {
            let t = T::from_u32(year).expect("year offset representable");
            let per_capita = initial_per_capita * (per_capita_rate * t).exp();
            let population = initial_population * (pop_growth * t).exp();
            UsagePoint {
                year_offset: year,
                per_capita,
                total: per_capita * population,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn era(pop: f64, gdp: f64) -> EraContext<f64> {
        EraContext::new(pop, gdp).unwrap()
    }

    #[test]
    fn project_trend_examples() {
        assert_eq!(project_trend(0.0, 7.3, 100.0).unwrap(), 7.3);
        // exp(-1.04651)
        let v = project_trend(-0.104651f64, 1.0, 10.0).unwrap();
        assert!((v - 0.351_161_165_475_331_2).abs() < 1e-12, "{v}");
        let v = project_trend(0.176744f64, 100.0, 1.0).unwrap();
        assert!((v - 119.332_556_267_686_46).abs() < 1e-9, "{v}");
    }

    #[test]
    fn project_trend_errors() {
        assert!(matches!(
            project_trend(0.1, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            project_trend(0.1, -2.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            project_trend(f64::NAN, 1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            project_trend(0.1, 1.0, f64::INFINITY),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn trend_types_project_from_reference_year() {
        let tech = TechnologyTrend::new(0.1, 2.0, 2000.0).unwrap();
        assert!((tech.level_at(2010.0).unwrap() - 2.0 * 1f64.exp()).abs() < 1e-12);
        assert!((tech.cost_at(2010.0).unwrap() - 2.0 * (-1f64).exp()).abs() < 1e-12);
        assert!(TechnologyTrend::new(0.1, 0.0, 2000.0).is_err());
        let demand = DemandTrend::new(0.05f64, 10.0, 1990.0).unwrap();
        assert!((demand.demand_at(1990.0).unwrap() - 10.0).abs() < 1e-15);
        assert!(DemandTrend::new(0.05, -1.0, 1990.0).is_err());
    }

    #[test]
    fn per_capita_rate_examples() {
        let none = ElasticityPair::equal(0.0);
        assert_eq!(per_capita_usage_rate(0.08, none, 0.05).unwrap(), -0.08);
        let unit = ElasticityPair::equal(1.0f64);
        assert!((per_capita_usage_rate(0.08, unit, 0.05).unwrap() - 0.05).abs() < 1e-15);
        let half = ElasticityPair::equal(0.5f64);
        assert!((per_capita_usage_rate(0.05, half, 0.03).unwrap() + 0.01).abs() < 1e-15);
        // price elasticity zero, no income growth: bare efficiency gain
        let pair = ElasticityPair::distinct(0.7, 0.0);
        assert_eq!(per_capita_usage_rate(0.3, pair, 0.0).unwrap(), -0.3);
        assert!(per_capita_usage_rate(f64::NAN, half, 0.0).is_err());
    }

    #[test]
    fn elasticity_pair_common() {
        assert_eq!(ElasticityPair::equal(0.4).common(), Some(0.4));
        assert_eq!(ElasticityPair::distinct(0.4, 0.6).common(), None);
        assert_eq!(ElasticityPair::distinct(0.4, 0.4).common(), Some(0.4));
    }

    #[test]
    fn materialization_index_examples() {
        // AcrylicFiber, using the rounded epsilon
        let v = materialization_index(era(0.02, 0.05), 0.104651, 1.142857).unwrap();
        assert!((v - 0.092093).abs() < 1e-6, "{v}");
        // HardDiskDrive
        let v = materialization_index(era(0.02, 0.03), 0.651163, 0.955958).unwrap();
        assert!((v - 0.02).abs() < 1e-6, "{v}");
        let v = materialization_index(era(0.01, 0.03), 0.05, 0.0).unwrap();
        assert!((v + 0.04).abs() < 1e-15);
        assert!(materialization_index(era(0.01, 0.03), 0.05, f64::NAN).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_index(-0.04, 1e-12).unwrap(),
            Classification::Dematerializing
        );
        assert_eq!(
            classify_index(0.0, 1e-12).unwrap(),
            Classification::Boundary
        );
        assert_eq!(
            classify_index(0.092093, 1e-12).unwrap(),
            Classification::Materializing
        );
        assert_eq!(
            classify_index(5e-13, 1e-12).unwrap(),
            Classification::Boundary
        );
        assert_eq!(
            classify_index(-1e-12, 1e-12).unwrap(),
            Classification::Boundary
        );
        assert!(matches!(
            classify_index(0.1, -1e-3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(classify_index(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn strong_criterion_examples() {
        assert!(strong_demat_criterion(-0.03, 0.02).unwrap());
        assert!(!strong_demat_criterion(-0.01, 0.02).unwrap());
        assert!(!strong_demat_criterion(0.02, 0.01).unwrap());
        assert!(strong_demat_criterion(f64::INFINITY, 0.01).is_err());
    }

    #[test]
    fn project_usage_examples() {
        let flat = project_usage(1.0, 1.0, 0.0, 0.0, 5).unwrap();
        assert_eq!(flat.len(), 6);
        assert!(flat.iter().all(|p| p.per_capita == 1.0 && p.total == 1.0));

        let s = project_usage(1.0f64, 1.0, -0.01, 0.02, 1).unwrap();
        assert!((s[1].per_capita - 0.990_049_833_749_168_1).abs() < 1e-12);
        assert!((s[1].total - 1.010_050_167_084_168).abs() < 1e-12);

        assert!(matches!(
            project_usage(0.0, 1.0, 0.0, 0.0, 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            project_usage(1.0, -1.0, 0.0, 0.0, 3),
            Err(Error::Domain(_))
        ));
        assert!(project_usage(1.0, 1.0, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn project_usage_matches_index_for_acrylic_fiber() {
        let e = era(0.02, 0.05);
        let (g, k) = (0.176744, 0.104651);
        let eps = g / (k + e.gdp_growth);
        let rate = per_capita_usage_rate(k, ElasticityPair::equal(eps), e.gdp_growth).unwrap();
        let index = materialization_index(e, k, eps).unwrap();
        let series = project_usage(3.0, 2.0, rate, e.pop_growth, 10).unwrap();
        for w in series.windows(2) {
            let growth = (w[1].total / w[0].total).ln();
            assert!((growth - index).abs() < 1e-12);
        }
        assert!((index - 0.092093).abs() < 1e-6);
    }

    #[test]
    fn works_for_f32() {
        let e = EraContext::<f32>::new(0.01, 0.03).unwrap();
        let v = materialization_index(e, 0.2f32, 0.5).unwrap();
        assert!((v + 0.075).abs() < 1e-6);
        assert_eq!(
            classify_index(v, 1e-6).unwrap(),
            Classification::Dematerializing
        );
    }

    #[test]
    fn assessment_evaluate() {
        let a = DematAssessment::evaluate(era(0.02, 0.05), 0.104651, 1.0, 1e-12).unwrap();
        assert_eq!(a.classification, Classification::Materializing);
        assert!((a.index - 0.07).abs() < 1e-12);
    }
}
