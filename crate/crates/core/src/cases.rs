//! The 57 technology cases (demand growth `g`, improvement rate `k`), their
//! assessment against the criterion, table replication, and detection of
//! absolute declines in consumption series.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;

use crate::estimate::elasticity_from_rates;
use crate::model::{classify_index, materialization_index, DEFAULT_CLASSIFICATION_TOL};
use crate::scalar::{as_f64, lit};
use crate::tabular::Table;
use crate::{
    fit_exponential, Classification, EraContext, Error, Result, Scalar, SeriesKind, TimeSeries,
};

/// The bundled case table: semicolon-delimited, dot decimals, with the
/// reference epsilon and criterion values as expected columns.
pub const BUNDLED_CASES: &str = include_str!("../data/cases.csv");
/// The same table with decimal commas.
pub const BUNDLED_CASES_COMMA: &str = include_str!("../data/cases_comma.csv");
/// File name of the bundled table inside a data directory.
pub const BUNDLED_CASES_FILE: &str = "cases.csv";

/// Illustrative population growth rates, 1961-2010 (synthetic).
pub const SAMPLE_POP_GROWTH: &str = include_str!("../data/pop_growth_sample.csv");
/// Illustrative per-capita GDP growth rates, 1961-2010 (synthetic).
pub const SAMPLE_GDP_GROWTH: &str = include_str!("../data/gdp_growth_sample.csv");

/// Absorbs binary representation error when comparing deviations between
/// six-decimal table values against a tolerance.
const REPRESENTATION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Chemicals,
    Hardware,
    Energy,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Chemicals => "chemicals",
            Category::Hardware => "hardware",
            Category::Energy => "energy",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "chemicals" | "chemical" => Ok(Category::Chemicals),
            "hardware" => Ok(Category::Hardware),
            "energy" => Ok(Category::Energy),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord<T> {
    pub name: String,
    pub category: Category,
    pub start_year: i32,
    pub end_year: i32,
    /// Demand growth rate.
    pub g: T,
    /// Technical improvement rate.
    pub k: T,
}

/// Reference values a replication is checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRow<T> {
    pub name: String,
    pub epsilon: T,
    pub index: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseTable<T> {
    pub records: Vec<CaseRecord<T>>,
    /// Present when the table carries `epsilon_expected;index_expected`.
    pub expected: Option<Vec<ExpectedRow<T>>>,
}

impl<T: Scalar> CaseTable<T> {
    pub fn parse(text: &str) -> Result<Self> {
        let table = Table::parse(text)?;
        let name = table.column("name")?;
        let category = table.column("category")?;
        let period = match (
            table.find_column("start_year"),
            table.find_column("end_year"),
        ) {
            (Some(s), Some(e)) => Period::Split(s, e),
            _ => match table.find_column("period") {
                Some(p) => Period::Joined(p),
                None => return Err(Error::MissingColumn("start_year".into())),
            },
        };
        let g = table.column("g")?;
        let k = table.column("k")?;
        let expected_cols = match (
            table.find_column("epsilon_expected"),
            table.find_column("index_expected"),
        ) {
            (Some(e), Some(i)) => Some((e, i)),
            (None, None) => None,
            (Some(_), None) => return Err(Error::MissingColumn("index_expected".into())),
            (None, Some(_)) => return Err(Error::MissingColumn("epsilon_expected".into())),
        };

        let scalar = |row: &crate::tabular::Row, col: usize| -> Result<T> {
            let v = table.number(row, col)?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: row.line,
                    message: format!("non-finite `{v}`"),
                });
            }
            Ok(lit(v))
        };

        let mut records = Vec::with_capacity(table.rows.len());
        let mut expected = Vec::new();
        let mut seen: HashMap<String, u64> = HashMap::new();
        for row in &table.rows {
            let line = row.line;
            let case_name = row.fields[name].clone();
            if case_name.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty case name".into(),
                });
            }
            let cat: Category = row.fields[category]
                .parse()
                .map_err(|message| Error::Parse { line, message })?;
            let (start_year, end_year) = match period {
                Period::Split(s, e) => (year(&row.fields[s], line)?, year(&row.fields[e], line)?),
                Period::Joined(p) => {
                    let text = &row.fields[p];
                    let (s, e) = text.split_once('-').ok_or_else(|| Error::Parse {
                        line,
                        message: format!("period `{text}` is not in start-end form"),
                    })?;
                    (year(s, line)?, year(e, line)?)
                }
            };
            if start_year >= end_year {
                return Err(Error::MalformedPeriod {
                    line,
                    start: start_year,
                    end: end_year,
                });
            }
            if let Some(first) = seen.insert(case_name.clone(), line) {
                warn!(
                    "duplicate case name `{case_name}` on lines {first} and {line}; keeping both"
                );
            }
            if let Some((e, i)) = expected_cols {
                expected.push(ExpectedRow {
                    name: case_name.clone(),
                    epsilon: scalar(row, e)?,
                    index: scalar(row, i)?,
                });
            }
            records.push(CaseRecord {
                name: case_name,
                category: cat,
                start_year,
                end_year,
                g: scalar(row, g)?,
                k: scalar(row, k)?,
            });
        }
        Ok(Self {
            records,
            expected: expected_cols.map(|_| expected),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The bundled 57-case table.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_CASES).expect("bundled case table parses")
    }
}

#[derive(Clone, Copy)]
enum Period {
    Split(usize, usize),
    Joined(usize),
}

fn year(text: &str, line: u64) -> Result<i32> {
    text.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse year `{text}`"),
    })
}

/// Reads the case records from a case-table file.
pub fn load_cases<T: Scalar>(path: &Path) -> Result<Vec<CaseRecord<T>>> {
    Ok(CaseTable::read(path)?.records)
}

pub fn parse_cases<T: Scalar>(text: &str) -> Result<Vec<CaseRecord<T>>> {
    Ok(CaseTable::parse(text)?.records)
}

/// Maps a case's period onto the growth environment it was evaluated in.
///
/// Cases ending by `last_historical_year` fall in the post-war era of fast
/// income growth; later cases get the slower modern era.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EraRule<T> {
    pub historical: EraContext<T>,
    pub modern: EraContext<T>,
    pub last_historical_year: i32,
}

impl<T: Scalar> Default for EraRule<T> {
    fn default() -> Self {
        Self {
            historical: EraContext {
                pop_growth: lit(0.02),
                gdp_growth: lit(0.05),
            },
            modern: EraContext {
                pop_growth: lit(0.02),
                gdp_growth: lit(0.03),
            },
            last_historical_year: 1975,
        }
    }
}

impl<T: Scalar> EraRule<T> {
    pub fn era_for(&self, record: &CaseRecord<T>) -> EraContext<T> {
        if record.end_year <= self.last_historical_year {
            self.historical
        } else {
            self.modern
        }
    }

    /// A rule returning `era` for every case.
    pub fn fixed(era: EraContext<T>) -> Self {
        Self {
            historical: era,
            modern: era,
            last_historical_year: i32::MAX,
        }
    }
}

pub fn era_for<T: Scalar>(record: &CaseRecord<T>) -> EraContext<T> {
    EraRule::default().era_for(record)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseAssessment<T> {
    pub record: CaseRecord<T>,
    pub era: EraContext<T>,
    pub epsilon: T,
    pub index: T,
    pub classification: Classification,
}

pub fn assess_case<T: Scalar>(
    record: &CaseRecord<T>,
    era: EraContext<T>,
) -> Result<CaseAssessment<T>> {
    assess_case_with_tol(record, era, lit(DEFAULT_CLASSIFICATION_TOL))
}

pub fn assess_case_with_tol<T: Scalar>(
    record: &CaseRecord<T>,
    era: EraContext<T>,
    tol: T,
) -> Result<CaseAssessment<T>> {
    let epsilon = elasticity_from_rates(record.g, record.k, era.gdp_growth)?;
    let index = materialization_index(era, record.k, epsilon)?;
    let classification = classify_index(index, tol)?;
    Ok(CaseAssessment {
        record: record.clone(),
        era,
        epsilon,
        index,
        classification,
    })
}

/// Assesses every record under `rule`, preserving input order.
pub fn assess_all<T: Scalar>(
    records: &[CaseRecord<T>],
    rule: &EraRule<T>,
) -> Result<Vec<CaseAssessment<T>>> {
    records
        .par_iter()
        .map(|r| assess_case(r, rule.era_for(r)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationConfig<T> {
    pub tol_epsilon: T,
    pub tol_index: T,
    pub era_rule: EraRule<T>,
}

impl<T: Scalar> Default for ReplicationConfig<T> {
    fn default() -> Self {
        Self {
            tol_epsilon: lit(1e-4),
            tol_index: lit(1e-6),
            era_rule: EraRule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow<T> {
    pub name: String,
    pub epsilon: T,
    pub epsilon_expected: T,
    pub epsilon_deviation: T,
    pub index: T,
    pub index_expected: T,
    pub index_deviation: T,
    pub classification: Classification,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationReport<T> {
    pub rows: Vec<ReplicationRow<T>>,
    pub materializing: usize,
    pub dematerializing: usize,
    pub boundary: usize,
    /// Every row within tolerance and every case materializing.
    pub pass: bool,
}

impl<T: Scalar> ReplicationReport<T> {
    pub fn max_epsilon_deviation(&self) -> T {
        self.rows
            .iter()
            .map(|r| r.epsilon_deviation)
            .fold(T::zero(), T::max)
    }

    pub fn max_index_deviation(&self) -> T {
        self.rows
            .iter()
            .map(|r| r.index_deviation)
            .fold(T::zero(), T::max)
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &ReplicationRow<T>> {
        self.rows.iter().filter(|r| !r.within_tolerance)
    }
}

fn within<T: Scalar>(deviation: T, tol: T) -> bool {
    deviation <= tol + lit(REPRESENTATION_SLACK)
}

/// Recomputes epsilon and the criterion for each record and compares them
/// with the expected values, matched by name.
pub fn replicate_tables<T: Scalar>(
    records: &[CaseRecord<T>],
    expected: &[ExpectedRow<T>],
    config: &ReplicationConfig<T>,
) -> Result<ReplicationReport<T>> {
    let mut by_name: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, e) in expected.iter().enumerate().rev() {
        by_name.entry(e.name.as_str()).or_default().push(i);
    }
    let mut pairs = Vec::with_capacity(records.len());
    let mut unmatched = Vec::new();
    for r in records {
        match by_name.get_mut(r.name.as_str()).and_then(Vec::pop) {
            Some(i) => pairs.push((r, &expected[i])),
            None => unmatched.push(format!("{} (no expected row)", r.name)),
        }
    }
    let mut leftovers: Vec<usize> = by_name.into_values().flatten().collect();
    leftovers.sort_unstable();
    unmatched.extend(
        leftovers
            .into_iter()
            .map(|i| format!("{} (no case record)", expected[i].name)),
    );
    if !unmatched.is_empty() {
        return Err(Error::NameMismatch(unmatched));
    }

    let rows = pairs
        .par_iter()
        .map(|&(record, exp)| {
            let a = assess_case(record, config.era_rule.era_for(record))?;
            let epsilon_deviation = (a.epsilon - exp.epsilon).abs();
            let index_deviation = (a.index - exp.index).abs();
            Ok(ReplicationRow {
                name: record.name.clone(),
                epsilon: a.epsilon,
                epsilon_expected: exp.epsilon,
                epsilon_deviation,
                index: a.index,
                index_expected: exp.index,
                index_deviation,
                classification: a.classification,
                within_tolerance: within(epsilon_deviation, config.tol_epsilon)
                    && within(index_deviation, config.tol_index),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let count = |c| {
        rows.iter()
            .filter(|r: &&ReplicationRow<T>| r.classification == c)
            .count()
    };
    let materializing = count(Classification::Materializing);
    let dematerializing = count(Classification::Dematerializing);
    let boundary = count(Classification::Boundary);
    let pass = rows.iter().all(|r| r.within_tolerance) && materializing == rows.len();
    Ok(ReplicationReport {
        rows,
        materializing,
        dematerializing,
        boundary,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeclineVerdict<T> {
    pub label: String,
    pub fitted_rate: T,
    /// Last value over first value.
    pub endpoint_ratio: T,
    /// Both the fitted trend and the endpoints fall.
    pub declining: bool,
    pub n_points: usize,
}

pub fn detect_absolute_decline<T: Scalar>(series: &TimeSeries<T>) -> Result<DeclineVerdict<T>> {
    if series.len() < 5 {
        warn!(
            "series `{}` has only {} points; at least 5 are recommended for decline detection",
            series.label(),
            series.len()
        );
    }
    if series.kind() != SeriesKind::Consumption {
        warn!(
            "series `{}` is of kind {}, expected consumption",
            series.label(),
            series.kind()
        );
    }
    let fit = fit_exponential(series)?;
    let endpoint_ratio = series.last().value / series.first().value;
    let declining = fit.rate < T::zero() && endpoint_ratio < T::one();
    log::debug!(
        "{}: rate {} ratio {} declining {declining}",
        series.label(),
        as_f64(fit.rate),
        as_f64(endpoint_ratio)
    );
    Ok(DeclineVerdict {
        label: series.label().to_owned(),
        fitted_rate: fit.rate,
        endpoint_ratio,
        declining,
        n_points: series.len(),
    })
}
