//! Structured descriptions of closed supports `K ⊆ ℝᵈ`.
//!
//! A [`SupportSpec`] pairs an ambient dimension with one of a small catalog
//! of set classes: the full space, the nonnegative orthant, lattice grids,
//! unions of rays, finitely generated affine cones, strips (bounded intervals
//! crossed with free coordinates), bounded boxes, explicit unbounded point
//! sequences on the line, and raw user point clouds. Three capabilities hang
//! off every spec:
//!
//! * **membership** — an exact predicate per class, with a small absolute
//!   slack (`1e-12`) when the queried point is a float;
//! * **sampling** — deterministic point generators driven entirely by a seed,
//!   producing exact rational points so the same sample set serves both
//!   arithmetic modes;
//! * **escape sequences** — for an axis `j`, families of points
//!   `(y₁,…,y_{j−1}, x_n, y_{j+1},…,y_d)` that stay in `K` while `|x_n| → ∞`.
//!   These witness that `K` is unbounded in the `j`-th direction and feed
//!   both the growth tests and the all-directions check downstream.
//!
//! `escape_sequences` distinguishes three answers: a nonempty list (escapes
//! found), an empty list (the class *provably* has none on that axis, e.g. a
//! bounded strip coordinate), and an error for point clouds without a
//! user-supplied escape generator, where we simply cannot tell.
//!
//! Axes are numbered `1..=d` everywhere, matching the usual `x₁,…,x_d`.

use crate::scalar::{derive_seed, pow, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

type Q = BigRational;

/// Escape prefixes must certify growth: last magnitude at least this factor
/// times the first.
pub const MIN_ESCAPE_FACTOR: f64 = 8.0;

/// Absolute membership slack applied to float query points.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SupportError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("cannot produce {requested} distinct points; only {available} available")]
    NotEnoughPoints { requested: usize, available: usize },
    #[error("point cloud has no escape generator; unboundedness along axis {axis} is unknown")]
    EscapeUnknown { axis: usize },
    #[error("invalid support description: {0}")]
    Invalid(String),
}

/// One axis of a grid: explicit strictly increasing values, optionally
/// continued upward forever in arithmetic progression with the final step.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub values: Vec<Q>,
    pub unbounded: bool,
}

impl GridAxis {
    /// Value at position `i`, extending past the explicit list by the
    /// trailing step when the axis is unbounded.
    fn value(&self, i: usize) -> Option<Q> {
        if i < self.values.len() {
            return Some(self.values[i].clone());
        }
        if !self.unbounded {
            return None;
        }
        let last = self.values.len() - 1;
        let step = self.values[last].clone() - self.values[last - 1].clone();
        let extra = Q::from_int((i - last) as i64) * step;
        Some(self.values[last].clone() + extra)
    }

    fn len_hint(&self) -> Option<usize> {
        if self.unbounded {
            None
        } else {
            Some(self.values.len())
        }
    }
}

/// A half-line `{offset + t·direction : t ≥ 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub offset: Vec<Q>,
    pub direction: Vec<Q>,
}

/// One coordinate of a strip: a bounded interval or a free line.
#[derive(Debug, Clone, PartialEq)]
pub enum StripAxis {
    Interval(Q, Q),
    Free,
}

/// User-declared escape data for a point cloud: along `axis`, the points
/// `(base | values[n])` all belong to the cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeSpec {
    pub axis: usize,
    pub base: Vec<Q>,
    pub values: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SupportClass {
    FullSpace,
    Orthant,
    Grid { axes: Vec<GridAxis> },
    UnionOfRays { rays: Vec<Ray> },
    AffineCone { vertex: Vec<Q>, generators: Vec<Vec<Q>> },
    Strip { axes: Vec<StripAxis> },
    BoundedBox { intervals: Vec<(Q, Q)> },
    PointSequence1D { values: Vec<Q> },
    SampledSet { points: Vec<Vec<Q>>, escapes: Option<Vec<EscapeSpec>> },
}

/// How `sample` should pick points. Classes without a meaningful reading of a
/// strategy fall back to their natural one rather than failing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStrategy {
    /// Lattice-style enumeration (grids, integer shells of the full space).
    Grid,
    /// The documented radial schedule: radii `2^{k/4}` in rounds of
    /// low-discrepancy directions.
    Radial,
    /// The leading entries of an explicit list (point sequences, clouds).
    Prefix,
}

/// A family `x_n(y) = (y | x_n)` of points of `K` escaping along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeSequence {
    /// Axis being escaped, `1..=d`.
    pub axis: usize,
    /// The frozen coordinates `y ∈ ℝ^{d−1}` (empty when `d = 1`).
    pub base: Vec<Q>,
    /// The escaping coordinate values, strictly increasing in magnitude.
    pub values: Vec<Q>,
}

impl EscapeSequence {
    fn new(axis: usize, base: Vec<Q>, values: Vec<Q>) -> Result<Self, SupportError> {
        if values.len() < 2 {
            return Err(SupportError::Invalid(
                "escape sequence needs at least two values".into(),
            ));
        }
        for w in values.windows(2) {
            if w[1].abs() <= w[0].abs() {
                return Err(SupportError::Invalid(
                    "escape values must strictly increase in magnitude".into(),
                ));
            }
        }
        let first = values.first().unwrap().abs().to_f64().max(f64::MIN_POSITIVE);
        let last = values.last().unwrap().abs().to_f64();
        if last < MIN_ESCAPE_FACTOR * first {
            return Err(SupportError::Invalid(format!(
                "escape prefix too short: |last|/|first| = {:.3} below the required factor {MIN_ESCAPE_FACTOR}",
                last / first
            )));
        }
        Ok(EscapeSequence { axis, base, values })
    }

    /// The full points `(y₁,…,y_{j−1}, x_n, y_{j+1},…)`.
    pub fn composed_points(&self) -> Vec<Vec<Q>> {
        self.values
            .iter()
            .map(|v| compose(&self.base, self.axis, v))
            .collect()
    }
}

/// Inserts `value` as coordinate `axis` (1-based) into the base tuple.
fn compose(base: &[Q], axis: usize, value: &Q) -> Vec<Q> {
    let mut point = Vec::with_capacity(base.len() + 1);
    point.extend_from_slice(&base[..axis - 1]);
    point.push(value.clone());
    point.extend_from_slice(&base[axis - 1..]);
    point
}

/// Points escaping to infinity grouped into magnitude levels, for growth
/// ratio traces. `escaping` is false when the class is bounded and the
/// schedule degrades to ordinary samples.
#[derive(Debug, Clone)]
pub struct EscapeSchedule {
    pub points: Vec<Vec<f64>>,
    /// `levels[i]` tags `points[i]`; magnitudes grow with the level.
    pub levels: Vec<usize>,
    pub escaping: bool,
}

/// A closed support set: ambient dimension plus a catalog class.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSpec {
    dimension: usize,
    class: SupportClass,
}

impl SupportSpec {
    pub fn full_space(dimension: usize) -> Result<Self, SupportError> {
        Self::build(dimension, SupportClass::FullSpace)
    }

    pub fn orthant(dimension: usize) -> Result<Self, SupportError> {
        Self::build(dimension, SupportClass::Orthant)
    }

    pub fn grid(axes: Vec<GridAxis>) -> Result<Self, SupportError> {
        let d = axes.len();
        Self::build(d, SupportClass::Grid { axes })
    }

    pub fn union_of_rays(dimension: usize, rays: Vec<Ray>) -> Result<Self, SupportError> {
        Self::build(dimension, SupportClass::UnionOfRays { rays })
    }

    pub fn affine_cone(vertex: Vec<Q>, generators: Vec<Vec<Q>>) -> Result<Self, SupportError> {
        let d = vertex.len();
        Self::build(d, SupportClass::AffineCone { vertex, generators })
    }

    pub fn strip(axes: Vec<StripAxis>) -> Result<Self, SupportError> {
        let d = axes.len();
        Self::build(d, SupportClass::Strip { axes })
    }

    pub fn bounded_box(intervals: Vec<(Q, Q)>) -> Result<Self, SupportError> {
        let d = intervals.len();
        Self::build(d, SupportClass::BoundedBox { intervals })
    }

    pub fn point_sequence_1d(values: Vec<Q>) -> Result<Self, SupportError> {
        Self::build(1, SupportClass::PointSequence1D { values })
    }

    pub fn sampled_set(
        dimension: usize,
        points: Vec<Vec<Q>>,
        escapes: Option<Vec<EscapeSpec>>,
    ) -> Result<Self, SupportError> {
        Self::build(dimension, SupportClass::SampledSet { points, escapes })
    }

    fn build(dimension: usize, class: SupportClass) -> Result<Self, SupportError> {
        if dimension == 0 {
            return Err(SupportError::Invalid("dimension must be at least 1".into()));
        }
        let spec = SupportSpec { dimension, class };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), SupportError> {
        let d = self.dimension;
        let check_dim = |v: &[Q]| -> Result<(), SupportError> {
            if v.len() != d {
                return Err(SupportError::Dimension {
                    expected: d,
                    got: v.len(),
                });
            }
            Ok(())
        };
        match &self.class {
            SupportClass::FullSpace | SupportClass::Orthant => {}
            SupportClass::Grid { axes } => {
                if axes.len() != d {
                    return Err(SupportError::Dimension {
                        expected: d,
                        got: axes.len(),
                    });
                }
                for (i, axis) in axes.iter().enumerate() {
                    if axis.values.is_empty() {
                        return Err(SupportError::Invalid(format!(
                            "grid axis {} has no values",
                            i + 1
                        )));
                    }
                    for w in axis.values.windows(2) {
                        if w[1] <= w[0] {
                            return Err(SupportError::Invalid(format!(
                                "grid axis {} values must strictly increase",
                                i + 1
                            )));
                        }
                    }
                    if axis.unbounded && axis.values.len() < 2 {
                        return Err(SupportError::Invalid(format!(
                            "unbounded grid axis {} needs at least two values to fix the step",
                            i + 1
                        )));
                    }
                }
            }
            SupportClass::UnionOfRays { rays } => {
                if rays.is_empty() {
                    return Err(SupportError::Invalid("ray union needs at least one ray".into()));
                }
                for ray in rays {
                    check_dim(&ray.offset)?;
                    check_dim(&ray.direction)?;
                    if ray.direction.iter().all(|c| c.is_zero()) {
                        return Err(SupportError::Invalid("ray direction must be nonzero".into()));
                    }
                }
            }
            SupportClass::AffineCone { vertex, generators } => {
                check_dim(vertex)?;
                for g in generators {
                    check_dim(g)?;
                    if g.iter().all(|c| c.is_zero()) {
                        return Err(SupportError::Invalid(
                            "cone generator must be nonzero".into(),
                        ));
                    }
                }
            }
            SupportClass::Strip { axes } => {
                if axes.len() != d {
                    return Err(SupportError::Dimension {
                        expected: d,
                        got: axes.len(),
                    });
                }
                let bounded = axes.iter().filter(|a| matches!(a, StripAxis::Interval(..))).count();
                if bounded == 0 {
                    return Err(SupportError::Invalid(
                        "strip needs a bounded axis; use the full space otherwise".into(),
                    ));
                }
                if bounded == axes.len() {
                    return Err(SupportError::Invalid(
                        "strip needs a free axis; use a bounded box otherwise".into(),
                    ));
                }
                for axis in axes {
                    if let StripAxis::Interval(a, b) = axis {
                        if a > b {
                            return Err(SupportError::Invalid(
                                "strip interval is empty (min > max)".into(),
                            ));
                        }
                    }
                }
            }
            SupportClass::BoundedBox { intervals } => {
                if intervals.len() != d {
                    return Err(SupportError::Dimension {
                        expected: d,
                        got: intervals.len(),
                    });
                }
                for (a, b) in intervals {
                    if a > b {
                        return Err(SupportError::Invalid(
                            "box interval is empty (min > max)".into(),
                        ));
                    }
                }
            }
            SupportClass::PointSequence1D { values } => {
                if d != 1 {
                    return Err(SupportError::Dimension { expected: 1, got: d });
                }
                if values.is_empty() {
                    return Err(SupportError::Invalid("point sequence is empty".into()));
                }
                for w in values.windows(2) {
                    if w[1].abs() <= w[0].abs() {
                        return Err(SupportError::Invalid(
                            "point sequence magnitudes must strictly increase \
                             (the checkable stand-in for having no finite cluster point)"
                                .into(),
                        ));
                    }
                }
            }
            SupportClass::SampledSet { points, escapes } => {
                if points.is_empty() {
                    return Err(SupportError::Invalid("point cloud is empty".into()));
                }
                let mut seen = BTreeSet::new();
                for p in points {
                    check_dim(p)?;
                    if !seen.insert(p.clone()) {
                        return Err(SupportError::Invalid(
                            "point cloud entries must be pairwise distinct".into(),
                        ));
                    }
                }
                if let Some(specs) = escapes {
                    for e in specs {
                        if e.axis < 1 || e.axis > d {
                            return Err(SupportError::Invalid(format!(
                                "escape axis {} out of range 1..={d}",
                                e.axis
                            )));
                        }
                        if e.base.len() != d - 1 {
                            return Err(SupportError::Dimension {
                                expected: d - 1,
                                got: e.base.len(),
                            });
                        }
                        // Declared escapes must stay inside the cloud.
                        let seq = EscapeSequence::new(e.axis, e.base.clone(), e.values.clone())?;
                        for p in seq.composed_points() {
                            if !seen.contains(&p) {
                                return Err(SupportError::Invalid(
                                    "escape sequence leaves the point cloud".into(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn class(&self) -> &SupportClass {
        &self.class
    }

    pub fn class_name(&self) -> &'static str {
        match &self.class {
            SupportClass::FullSpace => "full-space",
            SupportClass::Orthant => "orthant",
            SupportClass::Grid { .. } => "grid",
            SupportClass::UnionOfRays { .. } => "union-of-rays",
            SupportClass::AffineCone { .. } => "affine-cone",
            SupportClass::Strip { .. } => "strip",
            SupportClass::BoundedBox { .. } => "bounded-box",
            SupportClass::PointSequence1D { .. } => "point-sequence-1d",
            SupportClass::SampledSet { .. } => "sampled-set",
        }
    }

    // -----------------------------------------------------------------------
    // Membership.

    /// Whether `x ∈ K`. Exact scalars are tested exactly; floats get an
    /// absolute `1e-12` slack on every defining equality and inequality.
    pub fn contains<S: Scalar>(&self, x: &[S]) -> bool {
        if x.len() != self.dimension {
            return false;
        }
        let xq: Vec<Q> = x.iter().map(|v| v.to_rational()).collect();
        let slack = if S::EXACT {
            Q::zero()
        } else {
            Q::from_f64(MEMBERSHIP_SLACK)
        };
        self.contains_with_slack(&xq, &slack)
    }

    fn contains_with_slack(&self, x: &[Q], slack: &Q) -> bool {
        let near = |a: &Q, b: &Q| (a.clone() - b.clone()).abs() <= *slack;
        match &self.class {
            SupportClass::FullSpace => true,
            SupportClass::Orthant => x.iter().all(|v| *v >= -slack.clone()),
            SupportClass::Grid { axes } => x.iter().zip(axes).all(|(v, axis)| {
                if axis.values.iter().any(|gv| near(v, gv)) {
                    return true;
                }
                if !axis.unbounded {
                    return false;
                }
                let last = axis.values.last().unwrap();
                let n = axis.values.len();
                let step = axis.values[n - 1].clone() - axis.values[n - 2].clone();
                if *v <= *last || step.is_zero() {
                    return false;
                }
                // Nearest arithmetic continuation point.
                let k = ((v.clone() - last.clone()) / step.clone()).round();
                near(v, &(last.clone() + k * step))
            }),
            SupportClass::UnionOfRays { rays } => rays.iter().any(|ray| {
                // Recover the parameter from the largest direction component,
                // then check every coordinate.
                let (j, uj) = ray
                    .direction
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().cmp(&b.1.abs()))
                    .expect("nonzero direction");
                let t = (x[j].clone() - ray.offset[j].clone()) / uj.clone();
                if t < -slack.clone() {
                    return false;
                }
                ray.offset
                    .iter()
                    .zip(&ray.direction)
                    .zip(x)
                    .all(|((o, u), v)| near(v, &(o.clone() + t.clone() * u.clone())))
            }),
            SupportClass::AffineCone { vertex, generators } => {
                cone_contains(vertex, generators, x, slack)
            }
            SupportClass::Strip { axes } => x.iter().zip(axes).all(|(v, axis)| match axis {
                StripAxis::Interval(a, b) => {
                    *v >= a.clone() - slack.clone() && *v <= b.clone() + slack.clone()
                }
                StripAxis::Free => true,
            }),
            SupportClass::BoundedBox { intervals } => x.iter().zip(intervals).all(|(v, (a, b))| {
                *v >= a.clone() - slack.clone() && *v <= b.clone() + slack.clone()
            }),
            SupportClass::PointSequence1D { values } => values.iter().any(|gv| near(&x[0], gv)),
            SupportClass::SampledSet { points, .. } => points
                .iter()
                .any(|p| p.iter().zip(x).all(|(a, b)| near(b, a))),
        }
    }

    // -----------------------------------------------------------------------
    // Sampling.

    /// The strategy a class naturally responds to.
    pub fn default_strategy(&self) -> SampleStrategy {
        match &self.class {
            SupportClass::Grid { .. } => SampleStrategy::Grid,
            SupportClass::PointSequence1D { .. } | SupportClass::SampledSet { .. } => {
                SampleStrategy::Prefix
            }
            _ => SampleStrategy::Radial,
        }
    }

    /// `count` pairwise distinct points of `K`, deterministic in
    /// `(self, count, strategy, seed)`. Points are exact rationals; convert
    /// with [`Scalar::from_rational`] for float work.
    pub fn sample(
        &self,
        count: usize,
        strategy: SampleStrategy,
        seed: u64,
    ) -> Result<Vec<Vec<Q>>, SupportError> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let d = self.dimension;
        let raw: Vec<Vec<Q>> = match &self.class {
            SupportClass::FullSpace => match strategy {
                SampleStrategy::Grid => integer_shells(d, count, true),
                _ => radial_points(d, count, false, seed),
            },
            SupportClass::Orthant => match strategy {
                SampleStrategy::Grid => integer_shells(d, count, false),
                _ => radial_points(d, count, true, seed),
            },
            SupportClass::Grid { axes } => {
                let lists: Vec<AxisList> = axes
                    .iter()
                    .map(|a| AxisList {
                        len_hint: a.len_hint(),
                        get: Box::new(move |i| a.value(i)),
                    })
                    .collect();
                product_enumeration(&lists, count)?
            }
            SupportClass::UnionOfRays { rays } => {
                let mut pts = Vec::new();
                let mut k = 0;
                while pts.len() < 4 * count && k < 8 * count + 16 {
                    let ray = &rays[k % rays.len()];
                    let t = radial_radius(k / rays.len());
                    pts.push(
                        ray.offset
                            .iter()
                            .zip(&ray.direction)
                            .map(|(o, u)| o.clone() + t.clone() * u.clone())
                            .collect(),
                    );
                    k += 1;
                }
                pts
            }
            SupportClass::AffineCone { vertex, generators } => {
                if generators.is_empty() {
                    vec![vertex.clone()]
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "cone-sample", 0));
                    let mut pts = Vec::with_capacity(2 * count);
                    for k in 0..2 * count {
                        let scale = radial_radius(k / 4);
                        let mut p = vertex.clone();
                        for g in generators {
                            // Dyadic coefficient in [0, 1], scaled by the round radius.
                            let c = Q::new(BigInt::from(rng.gen_range(0..=256u32)), BigInt::from(256))
                                * scale.clone();
                            for (pi, gi) in p.iter_mut().zip(g) {
                                *pi = pi.clone() + c.clone() * gi.clone();
                            }
                        }
                        pts.push(p);
                    }
                    pts
                }
            }
            SupportClass::Strip { axes } => {
                let per_axis = (count as f64).powf(1.0 / d as f64).ceil() as usize + 1;
                let lists: Vec<AxisList> = axes
                    .iter()
                    .map(|axis| match axis {
                        StripAxis::Interval(a, b) => interval_list(a.clone(), b.clone(), per_axis),
                        StripAxis::Free => signed_radial_list(),
                    })
                    .collect();
                product_enumeration(&lists, count)?
            }
            SupportClass::BoundedBox { intervals } => {
                let per_axis = (count as f64).powf(1.0 / d as f64).ceil() as usize + 1;
                let lists: Vec<AxisList> = intervals
                    .iter()
                    .map(|(a, b)| interval_list(a.clone(), b.clone(), per_axis))
                    .collect();
                product_enumeration(&lists, count)?
            }
            SupportClass::PointSequence1D { values } => {
                if count > values.len() {
                    return Err(SupportError::NotEnoughPoints {
                        requested: count,
                        available: values.len(),
                    });
                }
                values[..count].iter().map(|v| vec![v.clone()]).collect()
            }
            SupportClass::SampledSet { points, .. } => {
                if count > points.len() {
                    return Err(SupportError::NotEnoughPoints {
                        requested: count,
                        available: points.len(),
                    });
                }
                points[..count].to_vec()
            }
        };

        // Deduplicate in order and truncate.
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(count);
        for p in raw {
            if seen.insert(p.clone()) {
                out.push(p);
                if out.len() == count {
                    break;
                }
            }
        }
        if out.len() < count {
            return Err(SupportError::NotEnoughPoints {
                requested: count,
                available: out.len(),
            });
        }
        debug_assert!(out.iter().all(|p| self.contains(&p[..])));
        Ok(out)
    }

    // -----------------------------------------------------------------------
    // Escapes.

    /// Escape sequences along `axis` (1-based): up to `bases` base points,
    /// each carrying `len` escaping values. An empty list means the class
    /// provably has no escape on that axis; a point cloud without declared
    /// escapes yields [`SupportError::EscapeUnknown`].
    pub fn escape_sequences(
        &self,
        axis: usize,
        bases: usize,
        len: usize,
        seed: u64,
    ) -> Result<Vec<EscapeSequence>, SupportError> {
        let d = self.dimension;
        if axis < 1 || axis > d {
            return Err(SupportError::Invalid(format!(
                "axis {axis} out of range 1..={d}"
            )));
        }
        match &self.class {
            SupportClass::FullSpace => {
                let base_points = section_bases(&SupportSpec::full_space(d.max(2) - 1).ok(), d, bases, seed)?;
                signed_sequences(axis, &base_points, len, true, true)
            }
            SupportClass::Orthant => {
                let base_points =
                    section_bases(&SupportSpec::orthant(d.max(2) - 1).ok(), d, bases, seed)?;
                signed_sequences(axis, &base_points, len, true, false)
            }
            SupportClass::Grid { axes } => {
                let target = &axes[axis - 1];
                if !target.unbounded {
                    return Ok(Vec::new()); // bounded axis: provably none
                }
                // Values along the escaping axis, extended as needed; start
                // where magnitudes begin to increase for good.
                let mut values: Vec<Q> = Vec::new();
                let mut i = 0;
                while values.len() < len && i < 4 * len + target.values.len() {
                    let v = target.value(i).expect("unbounded axis extends forever");
                    i += 1;
                    while let Some(prev) = values.last() {
                        if v.abs() <= prev.abs() {
                            values.pop();
                        } else {
                            break;
                        }
                    }
                    values.push(v);
                }
                let others: Vec<AxisList> = axes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != axis - 1)
                    .map(|(_, a)| AxisList {
                        len_hint: a.len_hint(),
                        get: Box::new(move |i| a.value(i)),
                    })
                    .collect();
                let base_points = if others.is_empty() {
                    vec![Vec::new()]
                } else {
                    product_enumeration_capped(&others, bases)
                };
                base_points
                    .into_iter()
                    .map(|b| EscapeSequence::new(axis, b, values.clone()))
                    .collect()
            }
            SupportClass::UnionOfRays { rays } => {
                // Only axis-parallel rays give a fixed base with an escaping
                // coordinate; slanted rays meet each frozen-base line once.
                let mut seqs = Vec::new();
                for ray in rays {
                    let parallel = ray
                        .direction
                        .iter()
                        .enumerate()
                        .all(|(i, u)| (i == axis - 1) != u.is_zero());
                    if !parallel {
                        continue;
                    }
                    let u = ray.direction[axis - 1].clone();
                    let o = ray.offset[axis - 1].clone();
                    let base: Vec<Q> = ray
                        .offset
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != axis - 1)
                        .map(|(_, v)| v.clone())
                        .collect();
                    let values = shifted_radial(&o, &u, len);
                    seqs.push(EscapeSequence::new(axis, base, values)?);
                    if seqs.len() >= bases {
                        break;
                    }
                }
                Ok(seqs)
            }
            SupportClass::AffineCone { vertex, generators } => {
                let mut dirs = Vec::new();
                if in_cone_hull(generators, &unit(d, axis - 1, false)) {
                    dirs.push(false);
                }
                if in_cone_hull(generators, &unit(d, axis - 1, true)) {
                    dirs.push(true);
                }
                if dirs.is_empty() {
                    // Slices of a closed convex set along a line are
                    // intervals; unbounded slices force ±e_axis into the
                    // recession cone. Neither is there, so no escape exists.
                    let _ = vertex;
                    return Ok(Vec::new());
                }
                let anchors = self.sample(bases, SampleStrategy::Radial, derive_seed(seed, "cone-esc", 0))?;
                let mut seqs = Vec::new();
                let mut seen_bases = BTreeSet::new();
                for p in anchors {
                    let base: Vec<Q> = p
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != axis - 1)
                        .map(|(_, v)| v.clone())
                        .collect();
                    if !seen_bases.insert(base.clone()) {
                        continue;
                    }
                    for &negative in &dirs {
                        let sign = if negative { -Q::one() } else { Q::one() };
                        let values = shifted_radial(&p[axis - 1], &sign, len);
                        seqs.push(EscapeSequence::new(axis, base.clone(), values)?);
                    }
                }
                Ok(seqs)
            }
            SupportClass::Strip { axes } => {
                if let StripAxis::Interval(..) = axes[axis - 1] {
                    return Ok(Vec::new()); // bounded coordinate: provably none
                }
                let section_axes: Vec<StripAxis> = axes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != axis - 1)
                    .map(|(_, a)| a.clone())
                    .collect();
                let per_axis = (bases as f64)
                    .powf(1.0 / section_axes.len().max(1) as f64)
                    .ceil() as usize
                    + 1;
                let lists: Vec<AxisList> = section_axes
                    .iter()
                    .map(|a| match a {
                        StripAxis::Interval(lo, hi) => interval_list(lo.clone(), hi.clone(), per_axis),
                        StripAxis::Free => signed_radial_list(),
                    })
                    .collect();
                let base_points = product_enumeration_capped(&lists, bases);
                signed_sequences(axis, &base_points, len, true, true)
            }
            SupportClass::BoundedBox { .. } => Ok(Vec::new()),
            SupportClass::PointSequence1D { values } => {
                let take = values.len().min(len.max(2));
                EscapeSequence::new(1, Vec::new(), values[..take].to_vec()).map(|s| vec![s])
            }
            SupportClass::SampledSet { escapes, .. } => match escapes {
                None => Err(SupportError::EscapeUnknown { axis }),
                Some(specs) => specs
                    .iter()
                    .filter(|e| e.axis == axis)
                    .take(bases)
                    .map(|e| {
                        let take = e.values.len().min(len.max(2));
                        EscapeSequence::new(e.axis, e.base.clone(), e.values[..take].to_vec())
                    })
                    .collect(),
            },
        }
    }

    /// A level-tagged schedule of escaping points across all axes, for growth
    /// ratio traces. Falls back to ordinary samples (marked `escaping:
    /// false`) when the class provably has no escape in any direction.
    pub fn escape_schedule(
        &self,
        levels: usize,
        bases_per_axis: usize,
        seed: u64,
    ) -> Result<EscapeSchedule, SupportError> {
        let mut points = Vec::new();
        let mut level_tags = Vec::new();
        for axis in 1..=self.dimension {
            let seqs = self.escape_sequences(axis, bases_per_axis, levels, seed)?;
            for seq in seqs {
                for (n, v) in seq.values.iter().enumerate() {
                    let p = compose(&seq.base, seq.axis, v);
                    points.push(p.iter().map(|q| q.to_f64()).collect());
                    level_tags.push(n);
                }
            }
        }
        if points.is_empty() {
            // Bounded class: plain samples, all on one level.
            let budget = (levels * bases_per_axis).clamp(8, 256);
            let mut samples = Vec::new();
            let mut want = budget;
            while want > 0 {
                match self.sample(want, self.default_strategy(), seed) {
                    Ok(s) => {
                        samples = s;
                        break;
                    }
                    Err(SupportError::NotEnoughPoints { available, .. }) if available > 0 => {
                        want = available;
                    }
                    Err(e) => return Err(e),
                }
            }
            return Ok(EscapeSchedule {
                points: samples
                    .iter()
                    .map(|p| p.iter().map(|q| q.to_f64()).collect())
                    .collect(),
                levels: vec![0; samples.len()],
                escaping: false,
            });
        }
        Ok(EscapeSchedule {
            points,
            levels: level_tags,
            escaping: true,
        })
    }

    // -----------------------------------------------------------------------
    // Boundedness structure.

    /// Axes (1-based) along which every point of `K` is bounded.
    pub fn bounded_axes(&self) -> Vec<usize> {
        let d = self.dimension;
        match &self.class {
            SupportClass::FullSpace | SupportClass::Orthant | SupportClass::PointSequence1D { .. } => {
                Vec::new()
            }
            SupportClass::Grid { axes } => (1..=d)
                .filter(|&j| !axes[j - 1].unbounded)
                .collect(),
            SupportClass::UnionOfRays { rays } => (1..=d)
                .filter(|&j| rays.iter().all(|r| r.direction[j - 1].is_zero()))
                .collect(),
            SupportClass::AffineCone { generators, .. } => (1..=d)
                .filter(|&j| generators.iter().all(|g| g[j - 1].is_zero()))
                .collect(),
            SupportClass::Strip { axes } => (1..=d)
                .filter(|&j| matches!(axes[j - 1], StripAxis::Interval(..)))
                .collect(),
            SupportClass::BoundedBox { .. } => (1..=d).collect(),
            // A cloud is a finite list, but it stands for an unknown set.
            SupportClass::SampledSet { .. } => Vec::new(),
        }
    }

    /// Whether the class is known to be a bounded set.
    pub fn is_bounded(&self) -> bool {
        !matches!(self.class, SupportClass::SampledSet { .. })
            && self.bounded_axes().len() == self.dimension
    }

    /// Coefficients `w` of a non-constant linear polynomial `⟨w, x⟩` that is
    /// bounded on `K`, if the class structure exposes one: a bounded
    /// coordinate directly, or for rays and cones a direction orthogonal to
    /// every escape direction. This is a structural search, not a complete
    /// decision procedure.
    pub fn bounded_linear_functional(&self) -> Option<Vec<Q>> {
        let d = self.dimension;
        if let Some(&j) = self.bounded_axes().first() {
            let mut w = vec![Q::zero(); d];
            w[j - 1] = Q::one();
            return Some(w);
        }
        let directions: Vec<Vec<Q>> = match &self.class {
            SupportClass::UnionOfRays { rays } => {
                rays.iter().map(|r| r.direction.clone()).collect()
            }
            SupportClass::AffineCone { generators, .. } => generators.clone(),
            _ => return None,
        };
        let report = crate::linalg::rank_and_kernel::<Q>(&directions, d);
        report.kernel
    }
}

/// Feasibility of `Σ t_i g_i = x − v`, `t ≥ 0`, within an L1 residual of
/// `slack · d`, decided by an exact phase-one LP.
fn cone_contains(vertex: &[Q], generators: &[Vec<Q>], x: &[Q], slack: &Q) -> bool {
    let d = vertex.len();
    let rhs: Vec<Q> = x
        .iter()
        .zip(vertex)
        .map(|(xi, vi)| xi.clone() - vi.clone())
        .collect();
    if generators.is_empty() {
        let l1: Q = rhs.iter().fold(Q::zero(), |acc, r| acc + r.abs());
        return l1 <= slack.clone() * Q::from_int(d as i64);
    }
    // Columns: generators, then +/- residual slacks; minimize total residual.
    let mut columns: Vec<Vec<Q>> = generators.iter().map(|g| g.to_vec()).collect();
    let mut costs = vec![Q::zero(); generators.len()];
    for i in 0..d {
        let mut plus = vec![Q::zero(); d];
        plus[i] = Q::one();
        let mut minus = vec![Q::zero(); d];
        minus[i] = -Q::one();
        columns.push(plus);
        columns.push(minus);
        costs.push(Q::one());
        costs.push(Q::one());
    }
    match crate::simplex::solve_standard_form(&columns, &rhs, &costs, &Q::zero()) {
        crate::simplex::LpOutcome::Optimal { objective, .. } => {
            objective <= slack.clone() * Q::from_int(d as i64)
        }
        _ => false,
    }
}

/// Membership of a direction in the conical hull of the generators.
fn in_cone_hull(generators: &[Vec<Q>], direction: &[Q]) -> bool {
    cone_contains(&vec![Q::zero(); direction.len()], generators, direction, &Q::zero())
}

fn unit(d: usize, index: usize, negative: bool) -> Vec<Q> {
    let mut e = vec![Q::zero(); d];
    e[index] = if negative { -Q::one() } else { Q::one() };
    e
}

/// `±2^{k/4}` escape values shifted past an anchor so magnitudes strictly
/// increase: `anchor + sign · 2^{(k+k₀)/4}` with `k₀` lifting the first term
/// clear of `|anchor|`.
fn shifted_radial(anchor: &Q, sign: &Q, len: usize) -> Vec<Q> {
    let mut k0 = 0;
    let bound = anchor.abs() * Q::from_int(2) + Q::one();
    while radial_radius(k0) < bound {
        k0 += 4;
    }
    (0..len)
        .map(|k| anchor.clone() + sign.clone() * radial_radius(k0 + 4 * k))
        .collect()
}

/// One or two signed escape sequences per base point.
fn signed_sequences(
    axis: usize,
    bases: &[Vec<Q>],
    len: usize,
    positive: bool,
    negative: bool,
) -> Result<Vec<EscapeSequence>, SupportError> {
    let values_pos: Vec<Q> = (0..len).map(|k| radial_radius(4 * k)).collect();
    let mut out = Vec::new();
    for base in bases {
        if positive {
            out.push(EscapeSequence::new(axis, base.clone(), values_pos.clone())?);
        }
        if negative {
            let neg: Vec<Q> = values_pos.iter().map(|v| -v.clone()).collect();
            out.push(EscapeSequence::new(axis, base.clone(), neg)?);
        }
    }
    Ok(out)
}

/// Base points in the (d−1)-dimensional section, or the single empty base
/// when d = 1.
fn section_bases(
    section: &Option<SupportSpec>,
    d: usize,
    bases: usize,
    seed: u64,
) -> Result<Vec<Vec<Q>>, SupportError> {
    if d == 1 {
        return Ok(vec![Vec::new()]);
    }
    let section = section.as_ref().expect("section spec for d >= 2");
    section.sample(bases, SampleStrategy::Radial, derive_seed(seed, "esc-base", 0))
}

// ---------------------------------------------------------------------------
// Deterministic point generators.

/// Radius `2^{k/4}` of the documented radial schedule, exact when `k` is a
/// multiple of four and the dyadic value of the `f64` otherwise.
pub fn radial_radius(k: usize) -> Q {
    if k % 4 == 0 {
        pow(&Q::from_int(2), (k / 4) as u32)
    } else {
        Q::from_f64(2f64.powf(k as f64 / 4.0))
    }
}

/// Radial sample points: rounds of low-discrepancy directions at radii
/// `2^{k/4}`. With `fold`, directions are reflected into the nonnegative
/// orthant. Produces at least `count` candidates before deduplication.
fn radial_points(d: usize, count: usize, fold: bool, seed: u64) -> Vec<Vec<Q>> {
    let mut pts = Vec::new();
    if d == 1 {
        let mut k = 0;
        while pts.len() < 2 * count {
            let r = radial_radius(k);
            pts.push(vec![r.clone()]);
            if !fold {
                pts.push(vec![-r]);
            }
            k += 1;
        }
        return pts;
    }
    let per_level = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "radial-dir", 0));
    let mut index = 0;
    let mut level = 0;
    while pts.len() < 2 * count + 4 {
        let r = radial_radius(level).to_f64();
        for _ in 0..per_level {
            let dir = direction(d, index, &mut rng);
            let p: Vec<Q> = dir
                .iter()
                .map(|c| {
                    let v = c * r;
                    Q::from_f64(if fold { v.abs() } else { v })
                })
                .collect();
            pts.push(p);
            index += 1;
        }
        level += 1;
    }
    pts
}

/// Direction `index` of the angular sequence: golden-angle rotations in the
/// plane, seeded unit Gaussians beyond.
fn direction(d: usize, index: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if d == 2 {
        // Golden-angle increments never resample the same angle.
        let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
        let theta = golden * (index as f64 + 1.0);
        vec![theta.cos(), theta.sin()]
    } else {
        loop {
            let v: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 1e-6 {
                return v.into_iter().map(|c| c / norm).collect();
            }
        }
    }
}

/// Box–Muller from the seeded stream.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Integer lattice points by max-norm shells: shell 0 is the origin, shell r
/// adds every point with `‖x‖_∞ = r`, each shell in lexicographic order.
fn integer_shells(d: usize, count: usize, signed: bool) -> Vec<Vec<Q>> {
    let mut pts = Vec::new();
    let mut shell: i64 = 0;
    while pts.len() < count + 1 {
        let lo = if signed { -shell } else { 0 };
        let mut stack: Vec<Vec<i64>> = vec![Vec::new()];
        let mut shell_pts = Vec::new();
        while let Some(prefix) = stack.pop() {
            if prefix.len() == d {
                if prefix.iter().any(|&v| v.abs() == shell) {
                    shell_pts.push(prefix);
                }
                continue;
            }
            for v in (lo..=shell).rev() {
                let mut next = prefix.clone();
                next.push(v);
                stack.push(next);
            }
        }
        shell_pts.sort();
        for p in shell_pts {
            pts.push(p.into_iter().map(Q::from_int).collect());
        }
        shell += 1;
        if shell > 4 * count as i64 + 4 {
            break;
        }
    }
    pts
}

/// Lazily indexed per-axis value list for product enumeration.
struct AxisList<'a> {
    len_hint: Option<usize>,
    get: Box<dyn Fn(usize) -> Option<Q> + 'a>,
}

fn owned_list(values: Vec<Q>) -> AxisList<'static> {
    AxisList {
        len_hint: Some(values.len()),
        get: Box::new(move |i| values.get(i).cloned()),
    }
}

/// Interval values: both endpoints first, then the base-2 van der Corput
/// refinement of the interior. For a degenerate interval just the point.
fn interval_list(a: Q, b: Q, count: usize) -> AxisList<'static> {
    let mut values = Vec::with_capacity(count.max(2));
    if a == b {
        return owned_list(vec![a]);
    }
    values.push(a.clone());
    values.push(b.clone());
    let width = b - a.clone();
    let mut i = 1;
    while values.len() < count.max(2) {
        let t = Q::from_f64(van_der_corput(i));
        values.push(a.clone() + t * width.clone());
        i += 1;
    }
    owned_list(values)
}

/// Alternating-sign radial values `+1, −1, +2^{1/4}, −2^{1/4}, …` for free
/// axes.
fn signed_radial_list() -> AxisList<'static> {
    AxisList {
        len_hint: None,
        get: Box::new(|i| {
            let r = radial_radius(i / 2);
            Some(if i % 2 == 0 { r } else { -r })
        }),
    }
}

/// Base-2 van der Corput sequence (skipping the leading 0).
fn van_der_corput(mut i: usize) -> f64 {
    let mut value = 0.0;
    let mut denom = 1.0;
    while i > 0 {
        denom *= 2.0;
        value += (i % 2) as f64 / denom;
        i /= 2;
    }
    value
}

/// Tuples from the per-axis lists, enumerated by increasing index sum then
/// lexicographic order, so early output forms a product sub-grid.
fn product_enumeration(lists: &[AxisList], count: usize) -> Result<Vec<Vec<Q>>, SupportError> {
    let pts = product_enumeration_capped(lists, count);
    if pts.len() < count {
        return Err(SupportError::NotEnoughPoints {
            requested: count,
            available: pts.len(),
        });
    }
    Ok(pts)
}

fn product_enumeration_capped(lists: &[AxisList], count: usize) -> Vec<Vec<Q>> {
    let d = lists.len();
    let mut out = Vec::with_capacity(count);
    let lengths: Vec<Option<usize>> = lists.iter().map(|l| l.len_hint).collect();
    let finite_total: Option<usize> = lengths
        .iter()
        .try_fold(1usize, |acc, l| l.map(|n| acc.saturating_mul(n)));
    let budget = finite_total.unwrap_or(usize::MAX).min(count);
    let mut sum = 0usize;
    while out.len() < budget {
        // All index tuples with the given sum, lexicographically.
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        let mut found_any = false;
        while let Some(prefix) = stack.pop() {
            if prefix.len() == d {
                if prefix.iter().sum::<usize>() == sum {
                    if let Some(point) = prefix
                        .iter()
                        .enumerate()
                        .map(|(a, &i)| (lists[a].get)(i))
                        .collect::<Option<Vec<Q>>>()
                    {
                        out.push(point);
                        found_any = true;
                        if out.len() == budget {
                            return out;
                        }
                    }
                }
                continue;
            }
            let used: usize = prefix.iter().sum();
            let remaining_axes = d - prefix.len() - 1;
            for i in (0..=sum.saturating_sub(used)).rev() {
                if sum.saturating_sub(used + i) <= remaining_axes * sum {
                    let mut next = prefix.clone();
                    next.push(i);
                    stack.push(next);
                }
            }
        }
        if !found_any && sum > lengths.iter().filter_map(|l| *l).sum::<usize>() + d * count {
            break;
        }
        sum += 1;
    }
    out
}
