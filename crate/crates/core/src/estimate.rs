//! Exponential trend fitting and demand elasticity estimation.

use std::fmt;
use std::path::Path;

use crate::scalar::{as_f64, ensure_finite, lit};
use crate::tabular::Table;
use crate::{Error, Result, Scalar};

/// Smallest `|k + gdp_growth|` accepted when estimating an elasticity.
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Price,
    Demand,
    GdpPerCapita,
    Population,
    Consumption,
    /// A series of growth rates; values may be zero or negative.
    Rate,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Price => "price",
            SeriesKind::Demand => "demand",
            SeriesKind::GdpPerCapita => "gdp_per_capita",
            SeriesKind::Population => "population",
            SeriesKind::Consumption => "consumption",
            SeriesKind::Rate => "rate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "price" | "cost" => SeriesKind::Price,
            "demand" | "production" => SeriesKind::Demand,
            "gdp_per_capita" | "gdp" => SeriesKind::GdpPerCapita,
            "population" | "pop" => SeriesKind::Population,
            "consumption" => SeriesKind::Consumption,
            "rate" => SeriesKind::Rate,
            _ => return None,
        })
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<T> {
    pub year: T,
    pub value: T,
}

/// Yearly observations with strictly increasing years.
///
/// Level series (every kind except [`SeriesKind::Rate`]) must be strictly
/// positive so they can be fitted on the log scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    label: String,
    kind: SeriesKind,
    observations: Vec<Observation<T>>,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(
        label: impl Into<String>,
        kind: SeriesKind,
        observations: Vec<Observation<T>>,
    ) -> Result<Self> {
        if observations.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: observations.len(),
            });
        }
        for obs in &observations {
            ensure_finite("year", obs.year)?;
            if !obs.value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite value at year {}",
                    as_f64(obs.year)
                )));
            }
        }
        if let Some(w) = observations.windows(2).find(|w| w[1].year <= w[0].year) {
            return Err(Error::MalformedSeries(format!(
                "years must be strictly increasing, found {} after {}",
                as_f64(w[1].year),
                as_f64(w[0].year)
            )));
        }
        if kind != SeriesKind::Rate {
            if let Some(obs) = observations.iter().find(|o| o.value <= T::zero()) {
                return Err(Error::NonPositiveValue {
                    year: as_f64(obs.year),
                    value: as_f64(obs.value),
                });
            }
        }
        Ok(Self {
            label: label.into(),
            kind,
            observations,
        })
    }

    pub fn from_pairs(
        label: impl Into<String>,
        kind: SeriesKind,
        pairs: impl IntoIterator<Item = (T, T)>,
    ) -> Result<Self> {
        let obs = pairs
            .into_iter()
            .map(|(year, value)| Observation { year, value })
            .collect();
        Self::new(label, kind, obs)
    }

    /// Parses a delimited `year,value` table.
    pub fn parse(text: &str, label: impl Into<String>, kind: SeriesKind) -> Result<Self> {
        let table = Table::parse(text)?;
        let year_col = table.column("year")?;
        let value_col = table.column("value")?;
        let mut pairs = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            let year = table.number(row, year_col)?;
            let value = table.number(row, value_col)?;
            let to_t = |v: f64| {
                T::from_f64(v).ok_or_else(|| Error::Parse {
                    line: row.line,
                    message: format!("value {v} not representable"),
                })
            };
            pairs.push((to_t(year)?, to_t(value)?));
        }
        Self::from_pairs(label, kind, pairs)
    }

    /// Reads a `year,value` file; the label is the file stem.
    pub fn read(path: &Path, kind: SeriesKind) -> Result<Self> {
        let label = path
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Self::parse(&std::fs::read_to_string(path)?, label, kind)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn observations(&self) -> &[Observation<T>] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn first(&self) -> Observation<T> {
        self.observations[0]
    }

    pub fn last(&self) -> Observation<T> {
        self.observations[self.observations.len() - 1]
    }
}

/// Least-squares line through `(year - first_year, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit<T> {
    /// Slope of `ln value` against year.
    pub rate: T,
    /// Fitted `ln value` at `origin_year`.
    pub ln_intercept: T,
    pub r_squared: T,
    pub n_points: usize,
    /// First year of the fitted series.
    pub origin_year: T,
}

impl<T: Scalar> ExponentialFit<T> {
    /// Improvement rate `k` when the fitted series is a price: prices fall as
    /// technology improves, so `k = -rate`.
    pub fn improvement_rate(&self) -> T {
        -self.rate
    }

    pub fn predict(&self, year: T) -> T {
        (self.ln_intercept + self.rate * (year - self.origin_year)).exp()
    }
}

pub fn fit_exponential<T: Scalar>(series: &TimeSeries<T>) -> Result<ExponentialFit<T>> {
    if series.kind == SeriesKind::Rate {
        return Err(Error::Domain(format!(
            "series `{}` holds rates, not levels; it cannot be fitted on the log scale",
            series.label
        )));
    }
    let obs = &series.observations;
    let n = obs.len();
    let origin = obs[0].year;
    let nt = T::from_usize(n).expect("length representable");
    let xs: Vec<T> = obs.iter().map(|o| o.year - origin).collect();
    let ys: Vec<T> = obs.iter().map(|o| o.value.ln()).collect();
    let mean_x = xs.iter().fold(T::zero(), |a, &x| a + x) / nt;
    let mean_y = ys.iter().fold(T::zero(), |a, &y| a + y) / nt;

    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    let rate = sxy / sxx;
    let ln_intercept = mean_y - rate * mean_x;

    // a constant series leaves only rounding noise in syy
    let scale = ys.iter().fold(T::one(), |m, y| m.max(y.abs()));
    let noise = T::epsilon() * scale * lit(4.0);
    let r_squared = if syy <= nt * noise * noise {
        T::one()
    } else {
        let ss_res = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let r = y - (ln_intercept + rate * x);
                r * r
            })
            .fold(T::zero(), |a, r| a + r);
        (T::one() - ss_res / syy).max(T::zero()).min(T::one())
    };

    Ok(ExponentialFit {
        rate,
        ln_intercept,
        r_squared,
        n_points: n,
        origin_year: origin,
    })
}

/// Common income/price demand elasticity implied by demand growth `g` under
/// improvement rate `k` and per-capita GDP growth: `g / (k + gdp_growth)`.
pub fn elasticity_from_rates<T: Scalar>(g: T, k: T, gdp_growth: T) -> Result<T> {
    elasticity_from_rates_with_floor(g, k, gdp_growth, lit(DEFAULT_DENOMINATOR_FLOOR))
}

pub fn elasticity_from_rates_with_floor<T: Scalar>(
    g: T,
    k: T,
    gdp_growth: T,
    floor: T,
) -> Result<T> {
    ensure_finite("g", g)?;
    ensure_finite("k", k)?;
    ensure_finite("gdp_growth", gdp_growth)?;
    let denominator = k + gdp_growth;
    if denominator.abs() < floor {
        return Err(Error::SingularDenominator {
            denominator: as_f64(denominator),
            floor: as_f64(floor),
        });
    }
    Ok(g / denominator)
}

/// Converts a per-year base-10 log rate into a natural-log rate.
pub fn log10_rate_to_ln<T: Scalar>(rate_log10: T) -> Result<T> {
    ensure_finite("rate", rate_log10)?;
    Ok(rate_log10 * T::LN_10())
}

pub fn ln_rate_to_log10<T: Scalar>(rate_ln: T) -> Result<T> {
    ensure_finite("rate", rate_ln)?;
    Ok(rate_ln / T::LN_10())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(pairs: &[(f64, f64)]) -> Result<TimeSeries<f64>> {
        TimeSeries::from_pairs("t", SeriesKind::Demand, pairs.iter().copied())
    }

    #[test]
    fn exact_exponential_roundtrip() {
        let s = series(&[(0.0, 1.0), (1.0, 0.1f64.exp()), (2.0, 0.2f64.exp())]).unwrap();
        let fit = fit_exponential(&s).unwrap();
        assert!((fit.rate - 0.1).abs() < 1e-12);
        assert!(fit.ln_intercept.abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
        assert_eq!(fit.n_points, 3);
    }

    #[test]
    fn constant_series_has_unit_r_squared() {
        let s = series(&[(2000.0, 5.0), (2001.0, 5.0), (2002.0, 5.0)]).unwrap();
        let fit = fit_exponential(&s).unwrap();
        assert_eq!(fit.rate, 0.0);
        assert_eq!(fit.r_squared, 1.0);
        assert!((fit.ln_intercept - 5f64.ln()).abs() < 1e-15);
        assert_eq!(fit.origin_year, 2000.0);
        for level in [7.0, 0.3, 1e6, 123.456] {
            for n in [2, 10, 37] {
                let s = TimeSeries::from_pairs(
                    "c",
                    SeriesKind::Demand,
                    (0..n).map(|t| (1990.0 + t as f64, level)),
                )
                .unwrap();
                let fit = fit_exponential(&s).unwrap();
                assert_eq!(fit.r_squared, 1.0, "level {level}, n {n}");
                assert!(fit.rate.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn price_series_reports_improvement_rate() {
        let s = TimeSeries::from_pairs(
            "cost",
            SeriesKind::Price,
            (0..10).map(|t| (1990.0 + t as f64, 50.0 * (-0.3 * t as f64).exp())),
        )
        .unwrap();
        let fit = fit_exponential(&s).unwrap();
        assert!((fit.improvement_rate() - 0.3).abs() < 1e-12);
        assert!((fit.predict(1995.0) - 50.0 * (-1.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn series_validation_errors() {
        assert!(matches!(
            series(&[(2000.0, 1.0)]),
            Err(Error::InsufficientData { got: 1, .. })
        ));
        assert!(matches!(
            series(&[(2000.0, 1.0), (2000.0, 2.0)]),
            Err(Error::MalformedSeries(_))
        ));
        assert!(matches!(
            series(&[(2001.0, 1.0), (2000.0, 2.0)]),
            Err(Error::MalformedSeries(_))
        ));
        match series(&[(2000.0, 1.0), (2001.0, 0.0), (2002.0, 3.0)]) {
            Err(Error::NonPositiveValue { year, .. }) => assert_eq!(year, 2001.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(series(&[(2000.0, 1.0), (2001.0, f64::NAN)]).is_err());
        // rates may be negative
        let rates = TimeSeries::from_pairs("r", SeriesKind::Rate, [(2000.0, -0.01), (2001.0, 0.0)])
            .unwrap();
        assert!(matches!(fit_exponential(&rates), Err(Error::Domain(_))));
    }

    #[test]
    fn parses_delimited_series() {
        let s: TimeSeries<f64> =
            TimeSeries::parse("year;value\n2000;1,5\n2001;2,5\n", "x", SeriesKind::Demand).unwrap();
        assert_eq!(s.observations()[0].value, 1.5);
        let s: TimeSeries<f64> =
            TimeSeries::parse("year\tvalue\n2000\t1,5\n2001\t3\n", "x", SeriesKind::Demand)
                .unwrap();
        assert_eq!(s.last().value, 3.0);
        let s: TimeSeries<f64> =
            TimeSeries::parse("year,value\n2000,1.5\n2001,3\n", "x", SeriesKind::Demand).unwrap();
        assert_eq!(s.len(), 2);
        let err = TimeSeries::<f64>::parse("year,value\n2000,1\n2001,x\n", "x", SeriesKind::Demand)
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err =
            TimeSeries::<f64>::parse("yr,value\n2000,1\n", "x", SeriesKind::Demand).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(_)));
    }

    #[test]
    fn elasticity_examples() {
        let ammonia = elasticity_from_rates::<f64>(0.109302, 0.090698, 0.05).unwrap();
        assert!((ammonia - 0.77686).abs() < 1e-5, "{ammonia}");
        let dram = elasticity_from_rates::<f64>(0.604651, 0.44186, 0.03).unwrap();
        assert!((dram - 1.281419).abs() < 1e-5, "{dram}");
        assert_eq!(elasticity_from_rates(0.0, 0.05, 0.03).unwrap(), 0.0);
        assert!(matches!(
            elasticity_from_rates(0.1, 0.03, -0.03),
            Err(Error::SingularDenominator { .. })
        ));
        assert!(elasticity_from_rates_with_floor(0.1, 1e-6, 0.0, 1e-9).is_ok());
        assert!(elasticity_from_rates_with_floor(0.1, 1e-6, 0.0, 1e-5).is_err());
    }

    #[test]
    fn log10_conversion() {
        assert_eq!(log10_rate_to_ln(0.0).unwrap(), 0.0);
        assert!((log10_rate_to_ln(0.1f64).unwrap() - 0.230_258_509_299_404_6).abs() < 1e-15);
        for r in [0.3f64, -0.017, 1e-4, 0.25] {
            let back = ln_rate_to_log10(log10_rate_to_ln(r).unwrap()).unwrap();
            assert!((back - r).abs() < 1e-15);
        }
        assert!(log10_rate_to_ln(f64::NAN).is_err());
    }

    #[test]
    fn kinds_roundtrip_names() {
        for kind in [
            SeriesKind::Price,
            SeriesKind::Demand,
            SeriesKind::GdpPerCapita,
            SeriesKind::Population,
            SeriesKind::Consumption,
            SeriesKind::Rate,
        ] {
            assert_eq!(SeriesKind::parse(kind.as_str()), Some(kind));
        }
        assert_eq!(SeriesKind::parse("bogus"), None);
    }
}
