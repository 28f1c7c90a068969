//! Wire formats: JSON shapes for sequences, measures, supports, and reports.
//!
//! Numbers on the wire are a union of two spellings, handled by [`Value`]:
//! plain JSON numbers for float data and strings like `"2/3"` for exact
//! rationals. Either spelling loads into either arithmetic mode — floats
//! embed exactly into rationals (they are dyadic), rationals round to the
//! nearest float — so a file written by an exact run can be re-read by a
//! float run and vice versa.
//!
//! The structs here are deliberately dumb mirrors of the JSON; all validation
//! happens in the `to_core` conversions, which delegate to the same
//! constructors the library uses everywhere else. Schemas for each format
//! live in the repository's `schemas/` directory.

use crate::analysis::{
    AnalysisReport, FiredCondition, GrowthReport, GrowthVerdict, Obstruction, StarOutcome,
    StarReport, Verdict,
};
use crate::construct::{MatchResult, SolverMode, VerifyReport};
use crate::moments::{
    MomentError, MomentSequence, MultiIndex, Polynomial, SignedAtomicMeasure,
};
use crate::scalar::{parse_rational, Scalar};
use crate::support::{
    EscapeSpec, GridAxis, Ray, StripAxis, SupportClass, SupportError, SupportSpec,
};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum JsonError {
    #[error("value {0:?} is not a finite number or rational literal")]
    BadValue(String),
    #[error("exponent list {0:?} appears more than once")]
    DuplicateAlpha(Vec<u32>),
    #[error("interval needs exactly two endpoints, got {0}")]
    BadInterval(usize),
    #[error("unknown strip axis {0:?}; use \"free\" or {{\"interval\": [lo, hi]}}")]
    BadStripAxis(String),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Support(#[from] SupportError),
}

/// A number on the wire: a JSON number, or a string holding an exact
/// rational like `"22/7"` (decimal strings are accepted too).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Exact(String),
}

impl Value {
    pub fn to_scalar<S: Scalar>(&self) -> Result<S, JsonError> {
        match self {
            Value::Number(x) => {
                if x.is_finite() {
                    Ok(S::from_f64(*x))
                } else {
                    Err(JsonError::BadValue(x.to_string()))
                }
            }
            Value::Exact(s) => {
                let q = parse_rational(s).map_err(|_| JsonError::BadValue(s.clone()))?;
                Ok(S::from_rational(&q))
            }
        }
    }

    /// Exact scalars render as rational strings, floats as JSON numbers.
    pub fn from_scalar<S: Scalar>(s: &S) -> Value {
        if S::EXACT {
            Value::Exact(s.to_rational().to_string())
        } else {
            Value::Number(s.to_f64())
        }
    }

    fn from_rational(q: &BigRational) -> Value {
        Value::Exact(q.to_string())
    }

    fn to_rational(&self) -> Result<BigRational, JsonError> {
        self.to_scalar::<BigRational>()
    }
}

fn values_to_rationals(values: &[Value]) -> Result<Vec<BigRational>, JsonError> {
    values.iter().map(Value::to_rational).collect()
}

fn rationals_to_values(qs: &[BigRational]) -> Vec<Value> {
    qs.iter().map(Value::from_rational).collect()
}

// ---------------------------------------------------------------------------
// Moment sequences.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub alpha: Vec<u32>,
    pub value: Value,
}

/// `{"dimension": d, "max_degree": N, "entries": [{"alpha": [...], "value": ...}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequenceFile {
    pub dimension: usize,
    pub max_degree: u32,
    pub entries: Vec<MomentEntry>,
}

impl MomentSequenceFile {
    pub fn from_core<S: Scalar>(seq: &MomentSequence<S>) -> Self {
        MomentSequenceFile {
            dimension: seq.dimension(),
            max_degree: seq.max_degree(),
            entries: seq
                .iter()
                .map(|(alpha, s)| MomentEntry {
                    alpha: alpha.exponents().to_vec(),
                    value: Value::from_scalar(s),
                })
                .collect(),
        }
    }

    pub fn to_core<S: Scalar>(&self) -> Result<MomentSequence<S>, JsonError> {
        let mut map = std::collections::BTreeMap::new();
        for e in &self.entries {
            let alpha = MultiIndex::new(e.alpha.clone());
            if map.insert(alpha, e.value.to_scalar::<S>()?).is_some() {
                return Err(JsonError::DuplicateAlpha(e.alpha.clone()));
            }
        }
        Ok(MomentSequence::from_values(
            self.dimension,
            self.max_degree,
            map,
        )?)
    }
}

// ---------------------------------------------------------------------------
// Measures.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub point: Vec<Value>,
    pub weight: Value,
}

/// `{"dimension": d, "atoms": [{"point": [...], "weight": ...}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dimension: usize,
    pub atoms: Vec<AtomEntry>,
}

impl MeasureFile {
    pub fn from_core<S: Scalar>(measure: &SignedAtomicMeasure<S>) -> Self {
        MeasureFile {
            dimension: measure.dimension(),
            atoms: measure
                .atoms()
                .iter()
                .map(|a| AtomEntry {
                    point: a.point.iter().map(Value::from_scalar).collect(),
                    weight: Value::from_scalar(&a.weight),
                })
                .collect(),
        }
    }

    pub fn to_core<S: Scalar>(&self) -> Result<SignedAtomicMeasure<S>, JsonError> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let point = a
                    .point
                    .iter()
                    .map(Value::to_scalar)
                    .collect::<Result<Vec<S>, _>>()?;
                Ok((point, a.weight.to_scalar::<S>()?))
            })
            .collect::<Result<Vec<_>, JsonError>>()?;
        Ok(SignedAtomicMeasure::from_atoms(self.dimension, atoms)?)
    }
}

// ---------------------------------------------------------------------------
// Supports.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxisFile {
    pub values: Vec<Value>,
    #[serde(default)]
    pub unbounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayFile {
    pub offset: Vec<Value>,
    pub direction: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StripAxisFile {
    Interval { interval: Vec<Value> },
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeFile {
    pub axis: usize,
    pub base: Vec<Value>,
    pub values: Vec<Value>,
}

/// Tagged by `"class"`, mirroring the support catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum SupportFile {
    #[serde(rename = "full-space")]
    FullSpace { dimension: usize },
    #[serde(rename = "orthant")]
    Orthant { dimension: usize },
    #[serde(rename = "grid")]
    Grid { axes: Vec<GridAxisFile> },
    #[serde(rename = "union-of-rays")]
    UnionOfRays { dimension: usize, rays: Vec<RayFile> },
    #[serde(rename = "affine-cone")]
    AffineCone {
        vertex: Vec<Value>,
        generators: Vec<Vec<Value>>,
    },
    #[serde(rename = "strip")]
    Strip { axes: Vec<StripAxisFile> },
    #[serde(rename = "bounded-box")]
    BoundedBox { intervals: Vec<Vec<Value>> },
    #[serde(rename = "point-sequence-1d")]
    PointSequence1D { values: Vec<Value> },
    #[serde(rename = "sampled-set")]
    SampledSet {
        dimension: usize,
        points: Vec<Vec<Value>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        escapes: Option<Vec<EscapeFile>>,
    },
}

fn interval_pair(values: &[Value]) -> Result<(BigRational, BigRational), JsonError> {
    if values.len() != 2 {
        return Err(JsonError::BadInterval(values.len()));
    }
    Ok((values[0].to_rational()?, values[1].to_rational()?))
}

impl SupportFile {
    pub fn from_core(spec: &SupportSpec) -> Self {
        let d = spec.dimension();
        match spec.class() {
            SupportClass::FullSpace => SupportFile::FullSpace { dimension: d },
            SupportClass::Orthant => SupportFile::Orthant { dimension: d },
            SupportClass::Grid { axes } => SupportFile::Grid {
                axes: axes
                    .iter()
                    .map(|a| GridAxisFile {
                        values: rationals_to_values(&a.values),
                        unbounded: a.unbounded,
                    })
                    .collect(),
            },
            SupportClass::UnionOfRays { rays } => SupportFile::UnionOfRays {
                dimension: d,
                rays: rays
                    .iter()
                    .map(|r| RayFile {
                        offset: rationals_to_values(&r.offset),
                        direction: rationals_to_values(&r.direction),
                    })
                    .collect(),
            },
            SupportClass::AffineCone { vertex, generators } => SupportFile::AffineCone {
                vertex: rationals_to_values(vertex),
                generators: generators.iter().map(|g| rationals_to_values(g)).collect(),
            },
            SupportClass::Strip { axes } => SupportFile::Strip {
                axes: axes
                    .iter()
                    .map(|a| match a {
                        StripAxis::Interval(lo, hi) => StripAxisFile::Interval {
                            interval: vec![Value::from_rational(lo), Value::from_rational(hi)],
                        },
                        StripAxis::Free => StripAxisFile::Named("free".into()),
                    })
                    .collect(),
            },
            SupportClass::BoundedBox { intervals } => SupportFile::BoundedBox {
                intervals: intervals
                    .iter()
                    .map(|(lo, hi)| vec![Value::from_rational(lo), Value::from_rational(hi)])
                    .collect(),
            },
            SupportClass::PointSequence1D { values } => SupportFile::PointSequence1D {
                values: rationals_to_values(values),
            },
            SupportClass::SampledSet { points, escapes } => SupportFile::SampledSet {
                dimension: d,
                points: points.iter().map(|p| rationals_to_values(p)).collect(),
                escapes: escapes.as_ref().map(|specs| {
                    specs
                        .iter()
                        .map(|e| EscapeFile {
                            axis: e.axis,
                            base: rationals_to_values(&e.base),
                            values: rationals_to_values(&e.values),
                        })
                        .collect()
                }),
            },
        }
    }

    pub fn to_core(&self) -> Result<SupportSpec, JsonError> {
        Ok(match self {
            SupportFile::FullSpace { dimension } => SupportSpec::full_space(*dimension)?,
            SupportFile::Orthant { dimension } => SupportSpec::orthant(*dimension)?,
            SupportFile::Grid { axes } => SupportSpec::grid(
                axes.iter()
                    .map(|a| {
                        Ok(GridAxis {
                            values: values_to_rationals(&a.values)?,
                            unbounded: a.unbounded,
                        })
                    })
                    .collect::<Result<Vec<_>, JsonError>>()?,
            )?,
            SupportFile::UnionOfRays { dimension, rays } => SupportSpec::union_of_rays(
                *dimension,
                rays.iter()
                    .map(|r| {
                        Ok(Ray {
                            offset: values_to_rationals(&r.offset)?,
                            direction: values_to_rationals(&r.direction)?,
                        })
                    })
                    .collect::<Result<Vec<_>, JsonError>>()?,
            )?,
            SupportFile::AffineCone { vertex, generators } => SupportSpec::affine_cone(
                values_to_rationals(vertex)?,
                generators
                    .iter()
                    .map(|g| values_to_rationals(g))
                    .collect::<Result<Vec<_>, _>>()?,
            )?,
            SupportFile::Strip { axes } => SupportSpec::strip(
                axes.iter()
                    .map(|a| match a {
                        StripAxisFile::Interval { interval } => {
                            let (lo, hi) = interval_pair(interval)?;
                            Ok(StripAxis::Interval(lo, hi))
                        }
                        StripAxisFile::Named(name) if name == "free" => Ok(StripAxis::Free),
                        StripAxisFile::Named(name) => Err(JsonError::BadStripAxis(name.clone())),
                    })
                    .collect::<Result<Vec<_>, JsonError>>()?,
            )?,
            SupportFile::BoundedBox { intervals } => SupportSpec::bounded_box(
                intervals
                    .iter()
                    .map(|iv| interval_pair(iv))
                    .collect::<Result<Vec<_>, _>>()?,
            )?,
            SupportFile::PointSequence1D { values } => {
                SupportSpec::point_sequence_1d(values_to_rationals(values)?)?
            }
            SupportFile::SampledSet {
                dimension,
                points,
                escapes,
            } => SupportSpec::sampled_set(
                *dimension,
                points
                    .iter()
                    .map(|p| values_to_rationals(p))
                    .collect::<Result<Vec<_>, _>>()?,
                escapes
                    .as_ref()
                    .map(|specs| {
                        specs
                            .iter()
                            .map(|e| {
                                Ok(EscapeSpec {
                                    axis: e.axis,
                                    base: values_to_rationals(&e.base)?,
                                    values: values_to_rationals(&e.values)?,
                                })
                            })
                            .collect::<Result<Vec<_>, JsonError>>()
                    })
                    .transpose()?,
            )?,
        })
    }
}

// ---------------------------------------------------------------------------
// Report shapes (output only, but kept deserializable for tooling).

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermFile {
    pub alpha: Vec<u32>,
    pub coeff: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub dimension: usize,
    pub terms: Vec<TermFile>,
    /// Human-readable rendering like `1*x1^2 + -2*x2`.
    pub rendered: String,
}

impl PolynomialFile {
    pub fn from_core<S: Scalar>(p: &Polynomial<S>) -> Self {
        PolynomialFile {
            dimension: p.dimension(),
            terms: p
                .terms()
                .map(|(alpha, c)| TermFile {
                    alpha: alpha.exponents().to_vec(),
                    coeff: Value::from_scalar(c),
                })
                .collect(),
            rendered: format!("{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub degree: u32,
    pub rank: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub dense: bool,
    pub rank: usize,
    pub basis_dim: usize,
    pub sample_count: usize,
    pub exhaustive: bool,
    pub rank_by_degree: Vec<RankEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarAxisFile {
    pub axis: usize,
    pub sequences: usize,
    pub distinct_bases: usize,
    pub bases_requested: usize,
    pub base_rank: usize,
    pub base_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarSummary {
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub evidence: Vec<StarAxisFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub weight: u32,
    pub samples_used: usize,
    pub escaping: bool,
}

impl GrowthSummary {
    pub fn from_core(report: &GrowthReport) -> Self {
        let (verdict, lambda, peak, reason) = match &report.verdict {
            GrowthVerdict::BoundedWitnessed { lambda } => {
                ("bounded".to_string(), Some(*lambda), None, None)
            }
            GrowthVerdict::UnboundedWitnessed { peak } => {
                ("unbounded".to_string(), None, Some(*peak), None)
            }
            GrowthVerdict::Inconclusive { reason } => {
                ("inconclusive".to_string(), None, None, Some(reason.clone()))
            }
        };
        GrowthSummary {
            verdict,
            lambda,
            peak,
            reason,
            weight: report.weight,
            samples_used: report.samples_used,
            escaping: report.escaping,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReportFile {
    pub verdict: String,
    pub degree: u32,
    pub dimension: usize,
    pub support_class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fired_condition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
    pub density: DensitySummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<StarSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PolynomialFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounded_witness: Option<PolynomialFile>,
    pub growth: Vec<GrowthSummary>,
    pub notes: Vec<String>,
}

impl AnalysisReportFile {
    pub fn from_core(report: &AnalysisReport, support: &SupportSpec) -> Self {
        let star = report.star.as_ref().map(|s: &StarReport| {
            let (outcome, axis, reason) = match &s.outcome {
                StarOutcome::Holds => ("holds".to_string(), None, None),
                StarOutcome::Fails { axis } => ("fails".to_string(), Some(*axis), None),
                StarOutcome::Unknown { axis, reason } => {
                    ("unknown".to_string(), Some(*axis), Some(reason.clone()))
                }
            };
            StarSummary {
                outcome,
                axis,
                reason,
                evidence: s
                    .evidence
                    .iter()
                    .map(|e| StarAxisFile {
                        axis: e.axis,
                        sequences: e.sequences,
                        distinct_bases: e.distinct_bases,
                        bases_requested: e.bases_requested,
                        base_rank: e.base_rank,
                        base_dim: e.base_dim,
                    })
                    .collect(),
            }
        });
        AnalysisReportFile {
            verdict: match report.verdict {
                Verdict::Representable => "representable",
                Verdict::NotRepresentable => "not-representable",
                Verdict::Unknown => "unknown",
            }
            .to_string(),
            degree: report.degree,
            dimension: report.dimension,
            support_class: support.class_name().to_string(),
            fired_condition: report.fired.map(|f| {
                match f {
                    FiredCondition::UnboundedLine => "unbounded-line",
                    FiredCondition::AllDirectionsEscape => "all-directions-escape",
                    FiredCondition::UserCertifiedEscapes => "user-certified-escapes",
                }
                .to_string()
            }),
            obstruction: report.obstruction.map(|o| {
                match o {
                    Obstruction::DensityFailure => "density-failure",
                    Obstruction::BoundedDirection => "bounded-direction",
                }
                .to_string()
            }),
            density: DensitySummary {
                dense: report.density.dense,
                rank: report.density.rank,
                basis_dim: report.density.basis.len(),
                sample_count: report.density.points.len(),
                exhaustive: report.density.exhaustive,
                rank_by_degree: report
                    .density
                    .rank_by_degree
                    .iter()
                    .map(|(degree, rank, dim)| RankEntry {
                        degree: *degree,
                        rank: *rank,
                        dim: *dim,
                    })
                    .collect(),
            },
            star,
            certificate: report.certificate.as_ref().map(PolynomialFile::from_core),
            bounded_witness: report
                .bounded_witness
                .as_ref()
                .map(PolynomialFile::from_core),
            growth: report.growth.iter().map(GrowthSummary::from_core).collect(),
            notes: report.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsFile {
    pub solver: String,
    pub node_count: usize,
    pub rank: usize,
    pub basis_dim: usize,
    pub retries: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditioning: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReportFile {
    pub measure: MeasureFile,
    pub total_variation: Value,
    pub max_relative_residual: f64,
    pub residuals: Vec<MomentEntry>,
    pub diagnostics: DiagnosticsFile,
}

impl MatchReportFile {
    pub fn from_core<S: Scalar>(result: &MatchResult<S>) -> Self {
        MatchReportFile {
            measure: MeasureFile::from_core(&result.measure),
            total_variation: Value::from_scalar(&result.total_variation),
            max_relative_residual: result.max_relative_residual,
            residuals: result
                .residuals
                .iter()
                .map(|(alpha, r)| MomentEntry {
                    alpha: alpha.exponents().to_vec(),
                    value: Value::from_scalar(r),
                })
                .collect(),
            diagnostics: DiagnosticsFile {
                solver: match result.diagnostics.solver {
                    SolverMode::ExactElimination => "exact-elimination",
                    SolverMode::ExactSimplex => "exact-simplex",
                    SolverMode::FloatMinNorm => "float-min-norm",
                    SolverMode::FloatSimplex => "float-simplex",
                }
                .to_string(),
                node_count: result.diagnostics.node_count,
                rank: result.diagnostics.rank,
                basis_dim: result.diagnostics.basis_dim,
                retries: result.diagnostics.retries,
                conditioning: result.diagnostics.conditioning,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReportFile {
    pub matched: bool,
    pub max_relative_error: f64,
    pub total_variation: Value,
    pub atom_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_ok: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_in_support: Option<Vec<bool>>,
    pub residuals: Vec<MomentEntry>,
}

impl VerifyReportFile {
    pub fn from_core<S: Scalar>(report: &VerifyReport<S>) -> Self {
        VerifyReportFile {
            matched: report.matched,
            max_relative_error: report.max_relative_error,
            total_variation: Value::from_scalar(&report.total_variation),
            atom_count: report.atom_count,
            support_ok: report.support_ok,
            atom_in_support: report.atom_in_support.clone(),
            residuals: report
                .residuals
                .iter()
                .map(|(alpha, r)| MomentEntry {
                    alpha: alpha.exponents().to_vec(),
                    value: Value::from_scalar(r),
                })
                .collect(),
        }
    }
}
