//! Deciding whether a support set can carry signed representing measures.
//!
//! The underlying characterization: a linear functional on polynomials of
//! bounded degree is a signed-measure moment functional supported in a closed
//! set `K` exactly when (i) `K` is Zariski dense — no nonzero polynomial of
//! the working degree vanishes identically on it — and (ii) for each `n` the
//! space of polynomials `p` with `|p(x)| ≤ λ_p (1 + ‖x‖²)ⁿ` on `K` is finite
//! dimensional. On the line the second condition collapses to `K` being
//! unbounded. In several variables we verify the workable sufficient
//! condition that every coordinate axis admits escape sequences over a dense
//! base set; conversely a non-constant polynomial bounded on `K` (a bounded
//! coordinate, say) makes the weighted space infinite dimensional and rules
//! representability out.
//!
//! The pieces exposed here:
//!
//! * [`zariski_density_check`] — evaluation-matrix ranks per degree, with a
//!   minimal-degree vanishing certificate when the rank falls short;
//! * [`growth_test`] — empirical ratios `|p(x)| / (1+‖x‖²)ⁿ` along escape
//!   schedules, with deliberately asymmetric verdicts: unboundedness needs
//!   ratios past a hard threshold *and* still climbing, boundedness needs a
//!   flat tail, anything else stays inconclusive;
//! * [`nn_dimension`] — the finite/infinite/unknown trichotomy for the
//!   weighted polynomial space;
//! * [`condition_star_check`] — per-axis escape evidence with base-set
//!   density;
//! * [`classify`] — the full decision tree with an evidence trail.

use crate::linalg::rank_and_kernel;
use crate::moments::{basis_size, enumerate_basis, MultiIndex, Polynomial};
use crate::scalar::{derive_seed, Scalar};
use crate::support::{SupportClass, SupportError, SupportSpec};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

type Q = BigRational;

/// Ratios above this are required (along with a climbing tail) before a
/// growth test will call a polynomial unbounded.
pub const BLOWUP_THRESHOLD: f64 = 1e3;

/// Relative slack on the trace tail when certifying boundedness.
pub const FLAT_TAIL_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Support(#[from] SupportError),
    #[error("polynomial lives in dimension {poly}, support in {support}")]
    Dimension { poly: usize, support: usize },
}

// ---------------------------------------------------------------------------
// Zariski density.

/// Rank data of the evaluation matrix `V[i, α] = points[i]^α` over the
/// monomial basis of total degree ≤ `degree`.
#[derive(Debug, Clone)]
pub struct DensityReport<S: Scalar> {
    pub degree: u32,
    pub points: Vec<Vec<S>>,
    pub basis: Vec<MultiIndex>,
    /// `(n, rank, dim)` for each total degree `n ≤ degree`; the matrix for
    /// degree `n` is a column prefix of the full one, so ranks are nested.
    pub rank_by_degree: Vec<(u32, usize, usize)>,
    /// Rank at the full degree.
    pub rank: usize,
    /// Full column rank at the working degree: no vanishing polynomial.
    pub dense: bool,
    /// The sampled points are provably the whole set (finite lattices), so a
    /// rank deficit is genuine even with fewer samples than basis columns.
    pub exhaustive: bool,
    /// A nonzero polynomial of minimal witnessed degree vanishing on every
    /// sample; present exactly when some prefix rank falls short.
    pub certificate: Option<Polynomial<S>>,
}

impl<S: Scalar> DensityReport<S> {
    /// Whether a rank deficit here is evidence about the set rather than an
    /// artifact of too few samples.
    pub fn deficit_is_genuine(&self) -> bool {
        self.points.len() >= self.basis.len() || self.exhaustive
    }
}

/// Samples the support and measures evaluation-matrix ranks degree by
/// degree. Asks for `samples` points but settles for what a finite class can
/// give.
pub fn zariski_density_check<S: Scalar>(
    support: &SupportSpec,
    degree: u32,
    samples: usize,
    seed: u64,
) -> Result<DensityReport<S>, AnalysisError> {
    let d = support.dimension();
    let strategy = support.default_strategy();
    let raw = match support.sample(samples, strategy, seed) {
        Ok(pts) => pts,
        Err(SupportError::NotEnoughPoints { available, .. }) if available > 0 => {
            support.sample(available, strategy, seed)?
        }
        Err(e) => return Err(e.into()),
    };
    let exhaustive = match support.class() {
        SupportClass::Grid { axes } => {
            let cardinality: Option<usize> = axes.iter().try_fold(1usize, |acc, a| {
                if a.unbounded {
                    None
                } else {
                    acc.checked_mul(a.values.len())
                }
            });
            cardinality.is_some_and(|c| raw.len() == c)
        }
        _ => false,
    };
    let points: Vec<Vec<S>> = raw
        .iter()
        .map(|p| p.iter().map(|q| S::from_rational(q)).collect())
        .collect();
    let basis = enumerate_basis(d, degree);
    let rows: Vec<Vec<S>> = points
        .iter()
        .map(|p| {
            basis
                .iter()
                .map(|alpha| alpha.eval(p).expect("basis and points share a dimension"))
                .collect()
        })
        .collect();

    let mut rank_by_degree = Vec::new();
    let mut certificate = None;
    let mut rank = 0;
    for n in 0..=degree {
        let dim = basis_size(d, n);
        let prefix: Vec<Vec<S>> = rows.iter().map(|r| r[..dim].to_vec()).collect();
        let report = rank_and_kernel(&prefix, dim);
        rank = report.rank;
        rank_by_degree.push((n, report.rank, dim));
        if certificate.is_none() && report.rank < dim {
            if let Some(kernel) = report.kernel {
                let terms = basis[..dim]
                    .iter()
                    .cloned()
                    .zip(kernel)
                    .collect::<Vec<_>>();
                certificate = Some(
                    Polynomial::from_terms(d, terms)
                        .expect("kernel terms share the ambient dimension"),
                );
            }
        }
    }
    let dim_full = basis.len();
    Ok(DensityReport {
        degree,
        points,
        basis,
        rank_by_degree,
        rank,
        dense: rank == dim_full,
        exhaustive,
        certificate,
    })
}

// ---------------------------------------------------------------------------
// Growth tests.

#[derive(Debug, Clone)]
pub struct GrowthOptions {
    /// Values per escape sequence; `None` derives one from `target_samples`
    /// and clamps against overflow of `r^deg` in doubles.
    pub levels: Option<usize>,
    /// Escape bases per axis; `None` derives one from `target_samples`.
    pub bases_per_axis: Option<usize>,
    pub target_samples: usize,
    pub blowup_threshold: f64,
    pub seed: u64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            levels: None,
            bases_per_axis: None,
            target_samples: 512,
            blowup_threshold: BLOWUP_THRESHOLD,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrowthSample {
    pub point: Vec<f64>,
    /// Position inside its escape sequence; magnitudes grow with the level.
    pub level: usize,
    /// `|p(x)| / (1 + ‖x‖²)ⁿ`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthVerdict {
    /// Every observed ratio is ≤ `lambda` and the trace tail has flattened
    /// (or the support is provably bounded, where flatness is automatic).
    BoundedWitnessed { lambda: f64 },
    /// Ratios blew past the threshold and were still strictly climbing over
    /// the last quarter of the levels.
    UnboundedWitnessed { peak: f64 },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub verdict: GrowthVerdict,
    pub trace: Vec<GrowthSample>,
    /// The weight exponent `n` of `(1 + ‖x‖²)ⁿ`.
    pub weight: u32,
    pub samples_used: usize,
    /// Whether the trace rides escape sequences (false on provably bounded
    /// classes, where plain samples suffice).
    pub escaping: bool,
}

/// Observes `|p| / (1+‖x‖²)ⁿ` along the support's escape schedule and takes
/// one of three deliberately cautious verdicts. A point cloud without an
/// escape generator yields `Inconclusive` rather than an error.
pub fn growth_test(
    p: &Polynomial<f64>,
    weight: u32,
    support: &SupportSpec,
    opts: &GrowthOptions,
) -> Result<GrowthReport, AnalysisError> {
    if p.dimension() != support.dimension() {
        return Err(AnalysisError::Dimension {
            poly: p.dimension(),
            support: support.dimension(),
        });
    }
    let d = support.dimension();
    let max_deg = p.degree().unwrap_or(0).max(2 * weight).max(1) as usize;
    let level_cap = (3600 / max_deg).max(8);
    let levels = opts
        .levels
        .unwrap_or_else(|| (opts.target_samples / (4 * d).max(1)).clamp(13, 64))
        .min(level_cap)
        .max(2);
    let bases = opts
        .bases_per_axis
        .unwrap_or_else(|| (opts.target_samples / (2 * d * levels)).max(4));

    let schedule = match support.escape_schedule(levels, bases, opts.seed) {
        Ok(s) => s,
        Err(SupportError::EscapeUnknown { axis }) => {
            return Ok(GrowthReport {
                verdict: GrowthVerdict::Inconclusive {
                    reason: format!(
                        "no escape generator for axis {axis}; cannot probe growth at infinity"
                    ),
                },
                trace: Vec::new(),
                weight,
                samples_used: 0,
                escaping: false,
            });
        }
        Err(e) => return Err(e.into()),
    };

    let mut trace = Vec::with_capacity(schedule.points.len());
    for (point, &level) in schedule.points.iter().zip(&schedule.levels) {
        let value = p.eval(point).expect("dimension checked on entry").abs();
        let norm2: f64 = point.iter().map(|c| c * c).sum();
        let ratio = value / (1.0 + norm2).powi(weight as i32);
        if ratio.is_finite() {
            trace.push(GrowthSample {
                point: point.clone(),
                level,
                ratio,
            });
        }
    }
    let samples_used = trace.len();
    if samples_used == 0 {
        return Ok(GrowthReport {
            verdict: GrowthVerdict::Inconclusive {
                reason: "no finite ratio could be observed".into(),
            },
            trace,
            weight,
            samples_used,
            escaping: schedule.escaping,
        });
    }

    let peak = trace.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let verdict = if !schedule.escaping {
        // Bounded class: polynomials are bounded on it, and the sampled peak
        // is the witnessed constant.
        GrowthVerdict::BoundedWitnessed { lambda: peak }
    } else {
        let mut level_max: BTreeMap<usize, f64> = BTreeMap::new();
        for s in &trace {
            let m = level_max.entry(s.level).or_insert(0.0);
            *m = m.max(s.ratio);
        }
        let maxima: Vec<f64> = level_max.values().cloned().collect();
        let count = maxima.len();
        let tail_len = (count / 4).max(2).min(count.saturating_sub(1)).max(1);
        let (head, tail) = maxima.split_at(count - tail_len);
        let tail_climbing = tail.windows(2).all(|w| w[1] > w[0])
            && head.last().map_or(true, |h| tail[0] > *h);
        let head_peak = head.iter().cloned().fold(0.0, f64::max);
        let tail_peak = tail.iter().cloned().fold(0.0, f64::max);
        if peak > opts.blowup_threshold && tail_climbing {
            GrowthVerdict::UnboundedWitnessed { peak }
        } else if tail_peak <= head_peak * (1.0 + FLAT_TAIL_SLACK) {
            GrowthVerdict::BoundedWitnessed { lambda: peak }
        } else {
            GrowthVerdict::Inconclusive {
                reason: format!(
                    "trace still moving: tail peak {tail_peak:.6e} vs head peak {head_peak:.6e}, \
                     overall peak {peak:.6e} below threshold {:.0e}",
                    opts.blowup_threshold
                ),
            }
        }
    };
    Ok(GrowthReport {
        verdict,
        trace,
        weight,
        samples_used,
        escaping: schedule.escaping,
    })
}

// ---------------------------------------------------------------------------
// The weighted polynomial space.

#[derive(Debug, Clone)]
pub enum NnDimension {
    /// The space of polynomials dominated by `(1+‖x‖²)ⁿ` on the support is
    /// finite dimensional.
    Finite {
        /// Exact dimension when known (on the line: `2n + 1`).
        dim: Option<usize>,
        /// Every member has degree ≤ this bound in each single variable.
        per_variable_degree: u32,
        /// Explicit basis when known (on the line: powers `x^0..x^{2n}`).
        basis: Option<Vec<MultiIndex>>,
    },
    /// A non-constant polynomial bounded on the support; all its powers are
    /// dominated too, so the space has infinite dimension.
    Infinite { witness: Polynomial<Q> },
    Unknown { reason: String },
}

/// Decides the dimension trichotomy for the space of polynomials `p` with
/// `|p| ≤ λ_p (1 + ‖x‖²)ⁿ` on the support.
pub fn nn_dimension(
    support: &SupportSpec,
    weight: u32,
    seed: u64,
) -> Result<NnDimension, AnalysisError> {
    // A bounded direction settles it for every weight: the witness and all
    // its powers are dominated by constants.
    if let Some(w) = support.bounded_linear_functional() {
        let terms: Vec<(MultiIndex, Q)> = w
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                (
                    MultiIndex::coordinate(support.dimension(), i + 1),
                    c.clone(),
                )
            })
            .collect();
        return Ok(NnDimension::Infinite {
            witness: Polynomial::from_terms(support.dimension(), terms)
                .expect("witness terms share the ambient dimension"),
        });
    }
    let d = support.dimension();
    if d == 1 {
        return match support.escape_sequences(1, 1, 16, seed) {
            Ok(seqs) if !seqs.is_empty() => Ok(NnDimension::Finite {
                dim: Some(2 * weight as usize + 1),
                per_variable_degree: 2 * weight,
                basis: Some(enumerate_basis(1, 2 * weight)),
            }),
            Ok(_) => Ok(NnDimension::Unknown {
                reason: "no escape to infinity found, but no bounded direction either".into(),
            }),
            Err(SupportError::EscapeUnknown { .. }) => Ok(NnDimension::Unknown {
                reason: "point cloud without an escape generator".into(),
            }),
            Err(e) => Err(e.into()),
        };
    }
    match condition_star_check(support, weight, seed)? {
        StarReport {
            outcome: StarOutcome::Holds,
            ..
        } => Ok(NnDimension::Finite {
            dim: None,
            per_variable_degree: 2 * weight,
            basis: None,
        }),
        StarReport {
            outcome: StarOutcome::Fails { axis },
            ..
        } => Ok(NnDimension::Unknown {
            reason: format!(
                "axis {axis} admits no escape over a dense base, and no bounded direction \
                 presented itself; the dimension is undetermined by these tools"
            ),
        }),
        StarReport {
            outcome: StarOutcome::Unknown { axis, reason },
            ..
        } => Ok(NnDimension::Unknown {
            reason: format!("axis {axis}: {reason}"),
        }),
    }
}

// ---------------------------------------------------------------------------
// The all-directions escape condition.

#[derive(Debug, Clone, PartialEq)]
pub enum StarOutcome {
    /// Every axis escapes over a sufficiently rich base set.
    Holds,
    /// Some axis provably admits no escape sequence.
    Fails { axis: usize },
    Unknown { axis: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct StarAxisEvidence {
    pub axis: usize,
    pub sequences: usize,
    pub distinct_bases: usize,
    pub bases_requested: usize,
    /// Rank of the base-point evaluation matrix in the section (d−1
    /// variables) at degree `2 · degree`; equal to the dimension when the
    /// bases are dense. Trivially satisfied for d ≤ 2 with enough bases.
    pub base_rank: usize,
    pub base_dim: usize,
}

#[derive(Debug, Clone)]
pub struct StarReport {
    pub outcome: StarOutcome,
    pub degree: u32,
    pub evidence: Vec<StarAxisEvidence>,
}

/// Checks that every coordinate axis admits escape sequences whose base
/// points form a rich set: Zariski dense in the section for d ≥ 3, merely
/// infinite (witnessed by enough distinct bases) in the plane, trivial on
/// the line.
pub fn condition_star_check(
    support: &SupportSpec,
    degree: u32,
    seed: u64,
) -> Result<StarReport, AnalysisError> {
    let d = support.dimension();
    let base_dim = basis_size(d - 1, 2 * degree);
    let bases_requested = base_dim.max(4);
    let mut evidence = Vec::new();
    let mut outcome = StarOutcome::Holds;
    for axis in 1..=d {
        let seqs = match support.escape_sequences(axis, bases_requested, 16, seed) {
            Ok(s) => s,
            Err(SupportError::EscapeUnknown { .. }) => {
                evidence.push(StarAxisEvidence {
                    axis,
                    sequences: 0,
                    distinct_bases: 0,
                    bases_requested,
                    base_rank: 0,
                    base_dim,
                });
                if outcome == StarOutcome::Holds {
                    outcome = StarOutcome::Unknown {
                        axis,
                        reason: "point cloud without an escape generator".into(),
                    };
                }
                continue;
            }
            Err(SupportError::Invalid(msg)) => {
                evidence.push(StarAxisEvidence {
                    axis,
                    sequences: 0,
                    distinct_bases: 0,
                    bases_requested,
                    base_rank: 0,
                    base_dim,
                });
                if outcome == StarOutcome::Holds {
                    outcome = StarOutcome::Unknown { axis, reason: msg };
                }
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut bases: Vec<Vec<Q>> = seqs.iter().map(|s| s.base.clone()).collect();
        bases.sort();
        bases.dedup();
        let distinct = bases.len();

        let mut axis_ok = !seqs.is_empty();
        let mut base_rank = 0;
        if axis_ok {
            if d == 1 {
                base_rank = 1;
            } else if distinct < bases_requested {
                // Classes whose escape generators are exhaustive have
                // genuinely finite base sets; otherwise we merely ran short.
                let exhaustive = matches!(
                    support.class(),
                    SupportClass::UnionOfRays { .. } | SupportClass::Grid { .. }
                );
                axis_ok = false;
                if exhaustive {
                    if outcome == StarOutcome::Holds {
                        outcome = StarOutcome::Fails { axis };
                    }
                } else if outcome == StarOutcome::Holds {
                    outcome = StarOutcome::Unknown {
                        axis,
                        reason: format!(
                            "only {distinct} distinct escape bases of {bases_requested} requested"
                        ),
                    };
                }
            } else if d == 2 {
                // In the plane, infinitely many distinct bases per axis
                // suffice; `distinct ≥ bases_requested` is the surrogate.
                base_rank = distinct.min(base_dim);
            } else {
                let basis = enumerate_basis(d - 1, 2 * degree);
                let rows: Vec<Vec<Q>> = bases
                    .iter()
                    .map(|b| {
                        basis
                            .iter()
                            .map(|alpha| {
                                alpha.eval(b).expect("bases live in the section dimension")
                            })
                            .collect()
                    })
                    .collect();
                base_rank = rank_and_kernel(&rows, base_dim).rank;
                if base_rank < base_dim {
                    axis_ok = false;
                    if outcome == StarOutcome::Holds {
                        outcome = StarOutcome::Unknown {
                            axis,
                            reason: format!(
                                "escape bases span rank {base_rank} of {base_dim}; \
                                 density of the base set is unverified"
                            ),
                        };
                    }
                }
            }
        } else if outcome == StarOutcome::Holds {
            outcome = StarOutcome::Fails { axis };
        }
        let _ = axis_ok;
        evidence.push(StarAxisEvidence {
            axis,
            sequences: seqs.len(),
            distinct_bases: distinct,
            bases_requested,
            base_rank,
            base_dim,
        });
    }
    Ok(StarReport {
        outcome,
        degree,
        evidence,
    })
}

// ---------------------------------------------------------------------------
// The classifier.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Representable,
    NotRepresentable,
    Unknown,
}

/// Which sufficient condition backed a `Representable` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiredCondition {
    /// d = 1 and the support is unbounded.
    UnboundedLine,
    /// Every axis escapes over a dense base set.
    AllDirectionsEscape,
    /// The user's own escape declarations on a point cloud.
    UserCertifiedEscapes,
}

/// Which obstruction backed a `NotRepresentable` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Obstruction {
    /// A nonzero polynomial vanishes on the support.
    DensityFailure,
    /// A non-constant polynomial is bounded on the support.
    BoundedDirection,
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub verdict: Verdict,
    pub degree: u32,
    pub dimension: usize,
    pub fired: Option<FiredCondition>,
    pub obstruction: Option<Obstruction>,
    pub density: DensityReport<Q>,
    pub star: Option<StarReport>,
    /// Vanishing polynomial backing a density failure.
    pub certificate: Option<Polynomial<Q>>,
    /// Bounded non-constant polynomial backing a bounded-direction verdict.
    pub bounded_witness: Option<Polynomial<Q>>,
    /// Growth traces supporting the witnesses above.
    pub growth: Vec<GrowthReport>,
    pub notes: Vec<String>,
}

/// The full decision tree at a working degree:
///
/// 1. a genuine evaluation-rank deficit refutes representability outright;
/// 2. on the line, unboundedness of the support is equivalent to it;
/// 3. in several variables, all-axes escape over dense bases suffices;
/// 4. a bounded direction refutes it;
/// 5. anything else is reported unknown, with the evidence gathered so far.
pub fn classify(
    support: &SupportSpec,
    degree: u32,
    seed: u64,
) -> Result<AnalysisReport, AnalysisError> {
    let d = support.dimension();
    let dim_full = basis_size(d, degree);
    let budget = 2 * dim_full;
    let density =
        zariski_density_check::<Q>(support, degree, budget, derive_seed(seed, "density", 0))?;
    let mut notes = Vec::new();

    let mut report = AnalysisReport {
        verdict: Verdict::Unknown,
        degree,
        dimension: d,
        fired: None,
        obstruction: None,
        density: density.clone(),
        star: None,
        certificate: None,
        bounded_witness: None,
        growth: Vec::new(),
        notes: Vec::new(),
    };

    if !density.dense {
        if density.deficit_is_genuine() {
            report.verdict = Verdict::NotRepresentable;
            report.obstruction = Some(Obstruction::DensityFailure);
            report.certificate = density.certificate.clone();
            if let Some(cert) = &report.certificate {
                notes.push(format!(
                    "a degree-{} polynomial vanishes on the support",
                    cert.degree().unwrap_or(0)
                ));
            }
            report.notes = notes;
            return Ok(report);
        }
        notes.push(format!(
            "only {} sample(s) for {} basis columns; the rank deficit may be an artifact",
            density.points.len(),
            density.basis.len()
        ));
        report.notes = notes;
        return Ok(report);
    }

    // Bounded direction: decisive for any degree, and checked before the
    // sufficient conditions so mixed classes (a bounded coordinate among
    // unbounded ones) land on the refutation.
    if let Some(w) = support.bounded_linear_functional() {
        let terms: Vec<(MultiIndex, Q)> = w
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (MultiIndex::coordinate(d, i + 1), c.clone()))
            .collect();
        let witness =
            Polynomial::from_terms(d, terms).expect("witness terms share the ambient dimension");
        let trace = growth_test(
            &witness.convert::<f64>(),
            0,
            support,
            &GrowthOptions {
                seed: derive_seed(seed, "witness-growth", 0),
                ..GrowthOptions::default()
            },
        )?;
        report.verdict = Verdict::NotRepresentable;
        report.obstruction = Some(Obstruction::BoundedDirection);
        report.bounded_witness = Some(witness);
        notes.push("a non-constant linear polynomial stays bounded on the support".into());
        report.growth.push(trace);
        report.notes = notes;
        return Ok(report);
    }

    if d == 1 {
        match support.escape_sequences(1, 1, 16, derive_seed(seed, "line-escape", 0)) {
            Ok(seqs) if !seqs.is_empty() => {
                report.verdict = Verdict::Representable;
                report.fired = Some(match support.class() {
                    SupportClass::SampledSet { .. } => FiredCondition::UserCertifiedEscapes,
                    _ => FiredCondition::UnboundedLine,
                });
            }
            Ok(_) => {
                // Dense, no bounded witness surfaced, yet provably no escape:
                // does not occur for the shipped classes, but stay honest.
                notes.push("support appears bounded but no linear witness was found".into());
            }
            Err(SupportError::EscapeUnknown { .. }) => {
                notes.push("point cloud without an escape generator; unboundedness unknown".into());
            }
            Err(e) => return Err(e.into()),
        }
        report.notes = notes;
        return Ok(report);
    }

    let star = condition_star_check(support, degree, derive_seed(seed, "star", 0))?;
    match &star.outcome {
        StarOutcome::Holds => {
            report.verdict = Verdict::Representable;
            report.fired = Some(match support.class() {
                SupportClass::SampledSet { .. } => FiredCondition::UserCertifiedEscapes,
                _ => FiredCondition::AllDirectionsEscape,
            });
        }
        StarOutcome::Fails { axis } => {
            notes.push(format!(
                "axis {axis} admits no escape over a rich base set, but no bounded direction \
                 was found; representability is undetermined at this degree"
            ));
        }
        StarOutcome::Unknown { axis, reason } => {
            notes.push(format!("axis {axis}: {reason}"));
        }
    }
    report.star = Some(star);
    report.notes = notes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::{EscapeSpec, GridAxis, Ray, StripAxis};
    use proptest::prelude::*;

    fn qi(n: i64) -> Q {
        Q::from_int(n)
    }

    fn strip01() -> SupportSpec {
        SupportSpec::strip(vec![StripAxis::Interval(qi(0), qi(1)), StripAxis::Free]).unwrap()
    }

    fn squares(n: usize) -> SupportSpec {
        SupportSpec::point_sequence_1d((1..=n as i64).map(|k| qi(k * k)).collect()).unwrap()
    }

    fn coordinate_cross() -> SupportSpec {
        let e = |x: i64, y: i64| vec![qi(x), qi(y)];
        SupportSpec::union_of_rays(
            2,
            vec![
                Ray { offset: e(0, 0), direction: e(1, 0) },
                Ray { offset: e(0, 0), direction: e(-1, 0) },
                Ray { offset: e(0, 0), direction: e(0, 1) },
                Ray { offset: e(0, 0), direction: e(0, -1) },
            ],
        )
        .unwrap()
    }

    fn x_power(dim: usize, axis: usize, exp: u32) -> Polynomial<f64> {
        let mut e = vec![0u32; dim];
        e[axis - 1] = exp;
        Polynomial::from_terms(dim, vec![(MultiIndex::new(e), 1.0)]).unwrap()
    }

    // Independent density oracle: a polynomial with the certificate's
    // coefficients must evaluate to zero at every sampled point.
    fn assert_certificate_vanishes(report: &DensityReport<Q>) {
        let cert = report.certificate.as_ref().expect("certificate");
        assert!(cert.degree().is_some(), "certificate must be nonzero");
        for p in &report.points {
            assert!(
                cert.eval(p).unwrap().is_zero(),
                "certificate fails to vanish at {p:?}"
            );
        }
    }

    #[test]
    fn full_plane_is_dense() {
        let full = SupportSpec::full_space(2).unwrap();
        let report = zariski_density_check::<Q>(&full, 3, 20, 1).unwrap();
        assert!(report.dense);
        assert_eq!(report.rank, 10);
        assert!(report.certificate.is_none());
        // Ranks are monotone and bounded by the dimension.
        for w in report.rank_by_degree.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
        for (_, rank, dim) in &report.rank_by_degree {
            assert!(rank <= dim);
        }
    }

    #[test]
    fn coordinate_cross_yields_the_product_certificate() {
        let cross = coordinate_cross();
        let report = zariski_density_check::<Q>(&cross, 2, 20, 1).unwrap();
        assert!(!report.dense);
        assert_eq!(report.rank, 5);
        assert!(report.deficit_is_genuine());
        assert_certificate_vanishes(&report);
        let expected =
            Polynomial::from_terms(2, vec![(MultiIndex::new(vec![1, 1]), qi(1))]).unwrap();
        let cert = report.certificate.unwrap();
        assert!(
            cert == expected || cert == expected.scale(&qi(-1)),
            "expected ±x1·x2, got {cert:?}"
        );
    }

    #[test]
    fn tiny_grid_deficit_is_exhaustive() {
        let axis = GridAxis { values: vec![qi(0), qi(1)], unbounded: false };
        let grid = SupportSpec::grid(vec![axis.clone(), axis]).unwrap();
        let report = zariski_density_check::<Q>(&grid, 2, 40, 1).unwrap();
        assert!(!report.dense);
        assert!(report.exhaustive);
        assert!(report.deficit_is_genuine());
        assert_certificate_vanishes(&report);
    }

    #[test]
    fn float_density_agrees_with_exact() {
        let cross = coordinate_cross();
        let exact = zariski_density_check::<Q>(&cross, 2, 20, 1).unwrap();
        let float = zariski_density_check::<f64>(&cross, 2, 20, 1).unwrap();
        assert_eq!(exact.rank, float.rank);
        let cert = float.certificate.expect("float certificate");
        for p in &float.points {
            assert!(cert.eval(p).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn growth_of_the_identity_on_the_line_blows_up() {
        let line = SupportSpec::full_space(1).unwrap();
        let x = x_power(1, 1, 1);
        let report = growth_test(&x, 0, &line, &GrowthOptions::default()).unwrap();
        assert!(matches!(report.verdict, GrowthVerdict::UnboundedWitnessed { .. }));
        assert!(report.escaping);
    }

    #[test]
    fn growth_respects_the_weight() {
        let line = SupportSpec::full_space(1).unwrap();
        // x² under weight 1: ratio x²/(1+x²) climbs toward 1 but stays tiny.
        let x2 = x_power(1, 1, 2);
        let report = growth_test(&x2, 1, &line, &GrowthOptions::default()).unwrap();
        assert!(
            !matches!(report.verdict, GrowthVerdict::UnboundedWitnessed { .. }),
            "x² is dominated by (1+x²): {:?}",
            report.verdict
        );
        // x³ under weight 1 grows like |x|.
        let x3 = x_power(1, 1, 3);
        let report = growth_test(&x3, 1, &line, &GrowthOptions::default()).unwrap();
        assert!(matches!(report.verdict, GrowthVerdict::UnboundedWitnessed { .. }));
    }

    #[test]
    fn strip_bounds_its_first_coordinate_tightly() {
        let strip = strip01();
        let x1 = x_power(2, 1, 1);
        let report = growth_test(&x1, 0, &strip, &GrowthOptions::default()).unwrap();
        match report.verdict {
            GrowthVerdict::BoundedWitnessed { lambda } => {
                assert!((lambda - 1.0).abs() <= 1e-12, "lambda = {lambda}");
            }
            other => panic!("expected a bounded verdict, got {other:?}"),
        }
        assert!(report.escaping);
    }

    #[test]
    fn bounded_box_growth_runs_on_plain_samples() {
        let boxy = SupportSpec::bounded_box(vec![(qi(0), qi(2)), (qi(-1), qi(1))]).unwrap();
        let p = x_power(2, 1, 3);
        let report = growth_test(&p, 0, &boxy, &GrowthOptions::default()).unwrap();
        assert!(!report.escaping);
        match report.verdict {
            GrowthVerdict::BoundedWitnessed { lambda } => assert!(lambda <= 8.0 + 1e-9),
            other => panic!("expected bounded, got {other:?}"),
        }
    }

    #[test]
    fn cloud_without_generator_is_inconclusive() {
        let cloud =
            SupportSpec::sampled_set(1, vec![vec![qi(1)], vec![qi(5)], vec![qi(9)]], None).unwrap();
        let p = x_power(1, 1, 1);
        let report = growth_test(&p, 0, &cloud, &GrowthOptions::default()).unwrap();
        assert!(matches!(report.verdict, GrowthVerdict::Inconclusive { .. }));
        assert_eq!(report.samples_used, 0);
    }

    #[test]
    fn line_dimension_counts_odd_powers() {
        for n in 0..=3u32 {
            match nn_dimension(&squares(32), n, 0).unwrap() {
                NnDimension::Finite { dim, per_variable_degree, basis } => {
                    assert_eq!(dim, Some(2 * n as usize + 1));
                    assert_eq!(per_variable_degree, 2 * n);
                    assert_eq!(basis.unwrap().len(), 2 * n as usize + 1);
                }
                other => panic!("expected finite at weight {n}, got {other:?}"),
            }
        }
    }

    #[test]
    fn strip_dimension_is_infinite_with_a_bounded_witness() {
        match nn_dimension(&strip01(), 0, 0).unwrap() {
            NnDimension::Infinite { witness } => {
                let report = growth_test(
                    &witness.convert::<f64>(),
                    0,
                    &strip01(),
                    &GrowthOptions::default(),
                )
                .unwrap();
                assert!(
                    matches!(report.verdict, GrowthVerdict::BoundedWitnessed { .. }),
                    "the witness must be observably bounded: {:?}",
                    report.verdict
                );
            }
            other => panic!("expected infinite, got {other:?}"),
        }
    }

    #[test]
    fn star_holds_on_the_plane_and_fails_on_the_strip() {
        let full = SupportSpec::full_space(2).unwrap();
        let report = condition_star_check(&full, 2, 0).unwrap();
        assert_eq!(report.outcome, StarOutcome::Holds);
        assert_eq!(report.evidence.len(), 2);
        for ev in &report.evidence {
            assert!(ev.distinct_bases >= ev.bases_requested);
        }

        let report = condition_star_check(&strip01(), 2, 0).unwrap();
        assert_eq!(report.outcome, StarOutcome::Fails { axis: 1 });
    }

    #[test]
    fn star_sees_finite_bases_on_the_cross() {
        let report = condition_star_check(&coordinate_cross(), 2, 0).unwrap();
        assert!(matches!(report.outcome, StarOutcome::Fails { .. }));
    }

    #[test]
    fn star_holds_in_three_unbounded_variables() {
        let full = SupportSpec::full_space(3).unwrap();
        let report = condition_star_check(&full, 1, 0).unwrap();
        assert_eq!(report.outcome, StarOutcome::Holds, "{:?}", report.evidence);
        for ev in &report.evidence {
            assert_eq!(ev.base_rank, ev.base_dim);
        }
    }

    #[test]
    fn classify_full_plane_representable() {
        let report = classify(&SupportSpec::full_space(2).unwrap(), 3, 0).unwrap();
        assert_eq!(report.verdict, Verdict::Representable);
        assert_eq!(report.fired, Some(FiredCondition::AllDirectionsEscape));
        assert!(report.density.dense);
    }

    #[test]
    fn classify_squares_representable_via_the_line_rule() {
        let report = classify(&squares(32), 4, 0).unwrap();
        assert_eq!(report.verdict, Verdict::Representable);
        assert_eq!(report.fired, Some(FiredCondition::UnboundedLine));
    }

    #[test]
    fn classify_strip_not_representable_with_valid_witness() {
        let report = classify(&strip01(), 3, 0).unwrap();
        assert_eq!(report.verdict, Verdict::NotRepresentable);
        assert_eq!(report.obstruction, Some(Obstruction::BoundedDirection));
        let witness = report.bounded_witness.expect("witness");
        assert_eq!(witness, Polynomial::coordinate(2, 1));
        assert_eq!(report.growth.len(), 1);
        assert!(matches!(
            report.growth[0].verdict,
            GrowthVerdict::BoundedWitnessed { .. }
        ));
    }

    #[test]
    fn classify_cross_fails_on_density_first() {
        let report = classify(&coordinate_cross(), 2, 0).unwrap();
        assert_eq!(report.verdict, Verdict::NotRepresentable);
        assert_eq!(report.obstruction, Some(Obstruction::DensityFailure));
        assert!(report.certificate.is_some());
    }

    #[test]
    fn classify_bounded_grid_hits_the_bounded_direction() {
        let axis = GridAxis { values: (1..=5).map(qi).collect(), unbounded: false };
        let grid = SupportSpec::grid(vec![axis.clone(), axis]).unwrap();
        // Degree 4: 25 points cover the 15 columns, so density passes and the
        // bounded coordinate is the live obstruction.
        let report = classify(&grid, 4, 0).unwrap();
        assert_eq!(report.verdict, Verdict::NotRepresentable);
        assert_eq!(report.obstruction, Some(Obstruction::BoundedDirection));
        // Degree 5: (x1-1)...(x1-5) vanishes, so density itself fails.
        let report = classify(&grid, 5, 0).unwrap();
        assert_eq!(report.verdict, Verdict::NotRepresentable);
        assert_eq!(report.obstruction, Some(Obstruction::DensityFailure));
        assert_certificate_vanishes(&report.density);
    }

    #[test]
    fn classify_cloud_without_escapes_is_unknown() {
        let points: Vec<Vec<Q>> = (0..40)
            .map(|k| vec![qi(k), qi(k * k % 23 - 11)])
            .collect();
        let cloud = SupportSpec::sampled_set(2, points, None).unwrap();
        let report = classify(&cloud, 2, 0).unwrap();
        assert_eq!(report.verdict, Verdict::Unknown);
        assert!(!report.notes.is_empty());
    }

    #[test]
    fn classify_cloud_with_user_escapes_is_user_certified() {
        // A 1-d cloud listing powers of two, escaping by declaration.
        let points: Vec<Vec<Q>> = (0..12).map(|k| vec![qi(1 << k)]).collect();
        let escapes = vec![EscapeSpec {
            axis: 1,
            base: vec![],
            values: (0..12).map(|k| qi(1 << k)).collect(),
        }];
        let cloud = SupportSpec::sampled_set(1, points, Some(escapes)).unwrap();
        let report = classify(&cloud, 3, 0).unwrap();
        assert_eq!(report.verdict, Verdict::Representable);
        assert_eq!(report.fired, Some(FiredCondition::UserCertifiedEscapes));
    }

    #[test]
    fn classify_undersampled_cloud_stays_unknown_despite_rank_deficit() {
        let cloud = SupportSpec::sampled_set(
            2,
            vec![vec![qi(1), qi(2)], vec![qi(3), qi(5)], vec![qi(-2), qi(7)]],
            None,
        )
        .unwrap();
        let report = classify(&cloud, 2, 0).unwrap();
        assert_eq!(report.verdict, Verdict::Unknown);
        assert!(!report.density.dense);
        assert!(!report.density.deficit_is_genuine());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        // Certificates from rank-deficient reports vanish exactly on every
        // sample, whatever the support and seed.
        #[test]
        fn certificates_always_vanish(seed in 0u64..500) {
            let cross = coordinate_cross();
            let report = zariski_density_check::<Q>(&cross, 2, 16, seed).unwrap();
            prop_assert!(!report.dense);
            let cert = report.certificate.as_ref().unwrap();
            for p in &report.points {
                prop_assert!(cert.eval(p).unwrap().is_zero());
            }
        }

        // The classifier is deterministic in the seed.
        #[test]
        fn classifier_is_deterministic(seed in 0u64..100) {
            let a = classify(&strip01(), 3, seed).unwrap();
            let b = classify(&strip01(), 3, seed).unwrap();
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert_eq!(a.density.rank, b.density.rank);
        }
    }
}
