//! Multi-index bookkeeping: monomial bases, moment sequences, polynomials,
//! and signed atomic measures.
//!
//! A *moment sequence* prescribes the numbers `s_α = L(x^α)` for all
//! multi-indices `|α| ≤ N`; a *signed atomic measure* is a finite list of
//! weighted points whose integrals against monomials should reproduce those
//! numbers. Everything here is a plain immutable value and is generic over
//! the [`Scalar`] tower, so the same code path runs in exact rationals and in
//! floats.
//!
//! The monomial order is graded lexicographic throughout: multi-indices are
//! compared first by total degree, then lexicographically with the earlier
//! variable dominating. For `d = 2, N = 2` the basis reads
//! `1, x1, x2, x1², x1·x2, x2²`. All matrix layouts and serialized entry
//! orders derive from this single order.

use crate::scalar::{pow, Scalar};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MomentError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("moment sequence is missing the entry for alpha = {0}")]
    MissingEntry(MultiIndex),
    #[error("moment sequence entry {0} exceeds the stated max degree {1}")]
    DegreeOutOfRange(MultiIndex, u32),
    #[error("ambient dimension must be at least 1")]
    ZeroDimension,
}

/// Exponent vector `α ∈ ℕ₀^d` of a monomial `x^α = x1^α1 ⋯ xd^αd`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(!exponents.is_empty(), "multi-index needs dimension >= 1");
        MultiIndex(exponents)
    }

    pub fn zero(dimension: usize) -> Self {
        Self::new(vec![0; dimension])
    }

    /// The exponent vector of the coordinate monomial `x_axis` (axes are
    /// numbered `1..=d`).
    pub fn coordinate(dimension: usize, axis: usize) -> Self {
        assert!(axis >= 1 && axis <= dimension, "axis out of range");
        let mut e = vec![0; dimension];
        e[axis - 1] = 1;
        Self::new(e)
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Evaluates the monomial `x^α` at a point.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S, MomentError> {
        if point.len() != self.0.len() {
            return Err(MomentError::DimensionMismatch {
                expected: self.0.len(),
                got: point.len(),
            });
        }
        let mut acc = S::one();
        for (x, &e) in point.iter().zip(&self.0) {
            if e > 0 {
                acc = acc * pow(x, e);
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    /// Graded lexicographic order: lower total degree first; within a degree
    /// the index with the larger exponent on the earliest differing variable
    /// comes first, so `x1` precedes `x2`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// All multi-indices with `|α| ≤ max_degree` in graded lexicographic order.
///
/// The result has length `C(max_degree + d, d)`.
pub fn enumerate_basis(dimension: usize, max_degree: u32) -> Vec<MultiIndex> {
    assert!(dimension >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity(basis_size(dimension, max_degree));
    let mut current = vec![0u32; dimension];
    fill_basis(&mut out, &mut current, 0, max_degree);
    out.sort();
    out
}

fn fill_basis(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, budget: u32) {
    if pos == current.len() {
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for e in 0..=budget {
        current[pos] = e;
        fill_basis(out, current, pos + 1, budget - e);
    }
    current[pos] = 0;
}

/// `C(max_degree + d, d)`, the number of monomials of total degree at most
/// `max_degree` in `d` variables.
pub fn basis_size(dimension: usize, max_degree: u32) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=dimension as u128 {
        num *= max_degree as u128 + i;
        den *= i;
    }
    (num / den) as usize
}

/// The prescribed moments `s_α` for all `|α| ≤ max_degree`.
///
/// A sequence is complete by construction: every multi-index up to the stated
/// degree has an entry, and iteration yields entries in graded lex order.
#[derive(Clone, PartialEq)]
pub struct MomentSequence<S: Scalar> {
    dimension: usize,
    max_degree: u32,
    values: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> MomentSequence<S> {
    pub fn from_values(
        dimension: usize,
        max_degree: u32,
        values: BTreeMap<MultiIndex, S>,
    ) -> Result<Self, MomentError> {
        if dimension == 0 {
            return Err(MomentError::ZeroDimension);
        }
        for alpha in values.keys() {
            if alpha.dimension() != dimension {
                return Err(MomentError::DimensionMismatch {
                    expected: dimension,
                    got: alpha.dimension(),
                });
            }
            if alpha.degree() > max_degree {
                return Err(MomentError::DegreeOutOfRange(alpha.clone(), max_degree));
            }
        }
        for alpha in enumerate_basis(dimension, max_degree) {
            if !values.contains_key(&alpha) {
                return Err(MomentError::MissingEntry(alpha));
            }
        }
        Ok(MomentSequence {
            dimension,
            max_degree,
            values,
        })
    }

    /// Builds the sequence entry by entry from a closure.
    pub fn from_fn(
        dimension: usize,
        max_degree: u32,
        mut f: impl FnMut(&MultiIndex) -> S,
    ) -> Self {
        let values = enumerate_basis(dimension, max_degree)
            .into_iter()
            .map(|alpha| {
                let v = f(&alpha);
                (alpha, v)
            })
            .collect();
        MomentSequence {
            dimension,
            max_degree,
            values,
        }
    }

    pub fn zero(dimension: usize, max_degree: u32) -> Self {
        Self::from_fn(dimension, max_degree, |_| S::zero())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<&S> {
        self.values.get(alpha)
    }

    /// Entries in graded lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.values.iter()
    }

    /// The Riesz functional applied to a polynomial: `L_s(p) = Σ c_α s_α`.
    pub fn riesz(&self, p: &Polynomial<S>) -> Result<S, MomentError> {
        if p.dimension() != self.dimension {
            return Err(MomentError::DimensionMismatch {
                expected: self.dimension,
                got: p.dimension(),
            });
        }
        let mut acc = S::zero();
        for (alpha, coeff) in p.terms() {
            match self.values.get(alpha) {
                Some(s) => acc = acc + coeff.clone() * s.clone(),
                None => return Err(MomentError::DegreeOutOfRange(alpha.clone(), self.max_degree)),
            }
        }
        Ok(acc)
    }
}

impl<S: Scalar> fmt::Debug for MomentSequence<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MomentSequence(d={}, N={}, [", self.dimension, self.max_degree)?;
        for (i, (alpha, v)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{alpha}={v}")?;
        }
        write!(f, "])")
    }
}

/// A sparse multivariate polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Polynomial<S: Scalar> {
    dimension: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn from_terms(
        dimension: usize,
        terms: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self, MomentError> {
        if dimension == 0 {
            return Err(MomentError::ZeroDimension);
        }
        let mut map: BTreeMap<MultiIndex, S> = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.dimension() != dimension {
                return Err(MomentError::DimensionMismatch {
                    expected: dimension,
                    got: alpha.dimension(),
                });
            }
            let entry = map.entry(alpha).or_insert_with(S::zero);
            *entry = entry.clone() + c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            dimension,
            terms: map,
        })
    }

    pub fn zero(dimension: usize) -> Self {
        Polynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dimension: usize, c: S) -> Self {
        Self::from_terms(dimension, [(MultiIndex::zero(dimension), c)]).expect("valid")
    }

    /// The monomial `x^alpha` with coefficient one.
    pub fn monomial(alpha: MultiIndex) -> Self {
        let d = alpha.dimension();
        Self::from_terms(d, [(alpha, S::one())]).expect("valid")
    }

    /// The coordinate polynomial `x_axis` (axes numbered `1..=d`).
    pub fn coordinate(dimension: usize, axis: usize) -> Self {
        Self::monomial(MultiIndex::coordinate(dimension, axis))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.degree()).max()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest coefficient magnitude.
    pub fn coeff_inf_norm(&self) -> S {
        let mut best = S::zero();
        for c in self.terms.values() {
            let a = c.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Evaluates `Σ c_α x^α`; exact in rational mode.
    pub fn eval(&self, point: &[S]) -> Result<S, MomentError> {
        if point.len() != self.dimension {
            return Err(MomentError::DimensionMismatch {
                expected: self.dimension,
                got: point.len(),
            });
        }
        let mut acc = S::zero();
        for (alpha, c) in &self.terms {
            acc = acc + c.clone() * alpha.eval(point)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self::from_terms(
            self.dimension,
            self.terms
                .iter()
                .map(|(a, c)| (a.clone(), c.clone() * factor.clone())),
        )
        .expect("valid")
    }

    pub fn add(&self, other: &Self) -> Result<Self, MomentError> {
        if other.dimension != self.dimension {
            return Err(MomentError::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        Self::from_terms(
            self.dimension,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(a, c)| (a.clone(), c.clone())),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MomentError> {
        if other.dimension != self.dimension {
            return Err(MomentError::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        let mut terms: Vec<(MultiIndex, S)> = Vec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let alpha = MultiIndex::new(
                    a.exponents()
                        .iter()
                        .zip(b.exponents())
                        .map(|(x, y)| x + y)
                        .collect(),
                );
                terms.push((alpha, ca.clone() * cb.clone()));
            }
        }
        Self::from_terms(self.dimension, terms)
    }

    pub fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::constant(self.dimension, S::one());
        for _ in 0..exp {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// Maps into another scalar type through the exact rational bridge.
    pub fn convert<T: Scalar>(&self) -> Polynomial<T> {
        Polynomial::from_terms(
            self.dimension,
            self.terms
                .iter()
                .map(|(a, c)| (a.clone(), T::from_rational(&c.to_rational()))),
        )
        .expect("valid")
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<S: Scalar> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (alpha, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (j, e) in alpha.exponents().iter().enumerate() {
                if *e > 0 {
                    write!(f, "*x{}", j + 1)?;
                    if *e > 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// One weighted point of an atomic measure. The weight is never zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<S: Scalar> {
    pub point: Vec<S>,
    pub weight: S,
}

/// A signed measure with finitely many atoms, `μ = Σ w_i δ_{x_i}`.
///
/// Construction merges duplicate points and drops zero weights, so the atom
/// list is always pairwise distinct with nonzero weights. The Jordan parts
/// `μ₊`/`μ₋` are recovered by [`SignedAtomicMeasure::jordan_decomposition`].
#[derive(Clone, Debug, PartialEq)]
pub struct SignedAtomicMeasure<S: Scalar> {
    dimension: usize,
    atoms: Vec<Atom<S>>,
}

impl<S: Scalar> SignedAtomicMeasure<S> {
    pub fn from_atoms(
        dimension: usize,
        atoms: impl IntoIterator<Item = (Vec<S>, S)>,
    ) -> Result<Self, MomentError> {
        if dimension == 0 {
            return Err(MomentError::ZeroDimension);
        }
        let mut merged: Vec<Atom<S>> = Vec::new();
        for (point, weight) in atoms {
            if point.len() != dimension {
                return Err(MomentError::DimensionMismatch {
                    expected: dimension,
                    got: point.len(),
                });
            }
            match merged.iter_mut().find(|a| a.point == point) {
                Some(a) => a.weight = a.weight.clone() + weight,
                None => merged.push(Atom { point, weight }),
            }
        }
        merged.retain(|a| !a.weight.is_zero());
        Ok(SignedAtomicMeasure {
            dimension,
            atoms: merged,
        })
    }

    pub fn empty(dimension: usize) -> Self {
        SignedAtomicMeasure {
            dimension,
            atoms: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ |w_i|`; always at least `|Σ w_i|`.
    pub fn total_variation(&self) -> S {
        let mut acc = S::zero();
        for a in &self.atoms {
            acc = acc + a.weight.abs();
        }
        acc
    }

    /// `Σ w_i`, the measure of the whole space.
    pub fn total_mass(&self) -> S {
        let mut acc = S::zero();
        for a in &self.atoms {
            acc = acc + a.weight.clone();
        }
        acc
    }

    /// `∫ p dμ = Σ w_i p(x_i)`.
    pub fn integrate(&self, p: &Polynomial<S>) -> Result<S, MomentError> {
        if p.dimension() != self.dimension {
            return Err(MomentError::DimensionMismatch {
                expected: self.dimension,
                got: p.dimension(),
            });
        }
        let mut acc = S::zero();
        for a in &self.atoms {
            acc = acc + a.weight.clone() * p.eval(&a.point)?;
        }
        Ok(acc)
    }

    /// The moment sequence `α ↦ ∫ x^α dμ` up to the given degree.
    pub fn moments(&self, max_degree: u32) -> MomentSequence<S> {
        MomentSequence::from_fn(self.dimension, max_degree, |alpha| {
            let mut acc = S::zero();
            for a in &self.atoms {
                acc = acc + a.weight.clone() * alpha.eval(&a.point).expect("dims agree");
            }
            acc
        })
    }

    /// Jordan split `μ = μ₊ − μ₋`: the positive-weight atoms and the negated
    /// negative-weight atoms, both as positive measures with disjoint atoms.
    pub fn jordan_decomposition(&self) -> (Self, Self) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for a in &self.atoms {
            if a.weight.is_negative() {
                neg.push((a.point.clone(), -a.weight.clone()));
            } else {
                pos.push((a.point.clone(), a.weight.clone()));
            }
        }
        (
            Self::from_atoms(self.dimension, pos).expect("valid"),
            Self::from_atoms(self.dimension, neg).expect("valid"),
        )
    }

    pub fn convert<T: Scalar>(&self) -> SignedAtomicMeasure<T> {
        SignedAtomicMeasure::from_atoms(
            self.dimension,
            self.atoms.iter().map(|a| {
                (
                    a.point
                        .iter()
                        .map(|x| T::from_rational(&x.to_rational()))
                        .collect(),
                    T::from_rational(&a.weight.to_rational()),
                )
            }),
        )
        .expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    type Q = BigRational;

    fn qi(n: i64) -> Q {
        <Q as Scalar>::from_int(n)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    /// Independent brute-force enumeration: loops over a hypercube of
    /// exponents and filters by total degree.
    fn brute_force_basis(d: usize, n: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![]];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == d {
                if prefix.iter().sum::<u32>() <= n {
                    out.push(prefix);
                }
                continue;
            }
            for e in (0..=n).rev() {
                let mut next = prefix.clone();
                next.push(e);
                stack.push(next);
            }
        }
        out
    }

    #[test]
    fn basis_d1_n2() {
        let basis = enumerate_basis(1, 2);
        assert_eq!(basis, vec![mi(&[0]), mi(&[1]), mi(&[2])]);
    }

    #[test]
    fn basis_d2_n1_graded_order() {
        let basis = enumerate_basis(2, 1);
        assert_eq!(basis, vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]);
    }

    #[test]
    fn basis_d3_n4_matches_brute_force_enumeration() {
        let basis = enumerate_basis(3, 4);
        let brute = brute_force_basis(3, 4);
        assert_eq!(basis.len(), 35);
        assert_eq!(basis.len(), brute.len());
        for alpha in &brute {
            assert!(basis.iter().any(|b| b.exponents() == &alpha[..]));
        }
    }

    #[test]
    fn basis_d2_n2_spells_out_graded_lex() {
        let basis = enumerate_basis(2, 2);
        let expect: Vec<MultiIndex> = [
            [0, 0],
            [1, 0],
            [0, 1],
            [2, 0],
            [1, 1],
            [0, 2],
        ]
        .iter()
        .map(|e| mi(e))
        .collect();
        assert_eq!(basis, expect);
    }

    #[test]
    fn eval_poly_examples() {
        // p = 1 + x1^2 at x = 3.
        let p = Polynomial::from_terms(1, [(mi(&[0]), qi(1)), (mi(&[2]), qi(1))]).unwrap();
        assert_eq!(p.eval(&[qi(3)]).unwrap(), qi(10));

        // p = x1*x2 at (2, -5).
        let p = Polynomial::from_terms(2, [(mi(&[1, 1]), qi(1))]).unwrap();
        assert_eq!(p.eval(&[qi(2), qi(-5)]).unwrap(), qi(-10));

        // p = (1 + x1^2 + x2^2)^2 at (1, 1).
        let base = Polynomial::from_terms(
            2,
            [(mi(&[0, 0]), qi(1)), (mi(&[2, 0]), qi(1)), (mi(&[0, 2]), qi(1))],
        )
        .unwrap();
        let p = base.powi(2);
        assert_eq!(p.eval(&[qi(1), qi(1)]).unwrap(), qi(9));
    }

    #[test]
    fn eval_dimension_mismatch_is_an_error() {
        let p = Polynomial::<Q>::coordinate(2, 1);
        assert!(matches!(
            p.eval(&[qi(1)]),
            Err(MomentError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn integrate_point_mass_at_origin_reads_constant_term() {
        let mu = SignedAtomicMeasure::from_atoms(1, [(vec![qi(0)], qi(1))]).unwrap();
        let p = Polynomial::from_terms(1, [(mi(&[0]), qi(7)), (mi(&[3]), qi(5))]).unwrap();
        assert_eq!(mu.integrate(&p).unwrap(), qi(7));
    }

    #[test]
    fn integrate_two_atoms() {
        let mu =
            SignedAtomicMeasure::from_atoms(1, [(vec![qi(1)], qi(1)), (vec![qi(2)], qi(-1))])
                .unwrap();
        let x = Polynomial::coordinate(1, 1);
        assert_eq!(mu.integrate(&x).unwrap(), qi(-1));
    }

    #[test]
    fn moments_of_empty_measure_is_zero_sequence() {
        let mu = SignedAtomicMeasure::<Q>::empty(2);
        let s = mu.moments(3);
        assert!(s.iter().all(|(_, v)| v.is_zero()));
        assert_eq!(s.len(), basis_size(2, 3));
    }

    #[test]
    fn moments_of_unit_mass_at_origin() {
        let mu = SignedAtomicMeasure::from_atoms(1, [(vec![qi(0)], qi(1))]).unwrap();
        let s = mu.moments(3);
        let got: Vec<Q> = s.iter().map(|(_, v)| v.clone()).collect();
        assert_eq!(got, vec![qi(1), qi(0), qi(0), qi(0)]);
    }

    #[test]
    fn moments_of_symmetric_pair() {
        let mu =
            SignedAtomicMeasure::from_atoms(1, [(vec![qi(1)], qi(1)), (vec![qi(-1)], qi(1))])
                .unwrap();
        let s = mu.moments(2);
        let got: Vec<Q> = s.iter().map(|(_, v)| v.clone()).collect();
        assert_eq!(got, vec![qi(2), qi(0), qi(2)]);
    }

    #[test]
    fn zero_weight_atoms_are_dropped_and_duplicates_merge() {
        let mu = SignedAtomicMeasure::from_atoms(
            1,
            [
                (vec![qi(1)], qi(2)),
                (vec![qi(1)], qi(-2)),
                (vec![qi(3)], qi(0)),
                (vec![qi(4)], qi(5)),
            ],
        )
        .unwrap();
        assert_eq!(mu.num_atoms(), 1);
        assert_eq!(mu.atoms()[0].point, vec![qi(4)]);
    }

    #[test]
    fn total_variation_dominates_total_mass() {
        let mu =
            SignedAtomicMeasure::from_atoms(1, [(vec![qi(1)], qi(3)), (vec![qi(2)], qi(-5))])
                .unwrap();
        assert_eq!(mu.total_variation(), qi(8));
        assert_eq!(mu.total_mass(), qi(-2));
        assert!(mu.total_variation() >= mu.total_mass().abs());
    }

    #[test]
    fn jordan_split_is_consistent() {
        let mu =
            SignedAtomicMeasure::from_atoms(1, [(vec![qi(1)], qi(2)), (vec![qi(2)], qi(-3))])
                .unwrap();
        let (pos, neg) = mu.jordan_decomposition();
        assert_eq!(pos.atoms()[0].weight, qi(2));
        assert_eq!(neg.atoms()[0].weight, qi(3));
        let n = 3;
        let sp = pos.moments(n);
        let sn = neg.moments(n);
        for (alpha, v) in mu.moments(n).iter() {
            let diff = sp.get(alpha).unwrap().clone() - sn.get(alpha).unwrap().clone();
            assert_eq!(*v, diff);
        }
    }

    #[test]
    fn basis_length_matches_binomial_formula_for_small_d_n() {
        for d in 1..=4usize {
            for n in 0..=8u32 {
                let basis = enumerate_basis(d, n);
                assert_eq!(basis.len(), basis_size(d, n), "d={d} n={n}");
                // Total order: strictly increasing under Ord.
                for w in basis.windows(2) {
                    assert!(w[0] < w[1]);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn integration_is_linear(
            coeffs_p in proptest::collection::vec(-9i64..10, 3),
            coeffs_q in proptest::collection::vec(-9i64..10, 3),
            scale in -9i64..10,
            atoms in proptest::collection::vec((-5i64..6, -5i64..6), 1..5),
        ) {
            let p = Polynomial::from_terms(
                1,
                coeffs_p.iter().enumerate().map(|(i, c)| (MultiIndex::new(vec![i as u32]), qi(*c))),
            ).unwrap();
            let q = Polynomial::from_terms(
                1,
                coeffs_q.iter().enumerate().map(|(i, c)| (MultiIndex::new(vec![i as u32]), qi(*c))),
            ).unwrap();
            let mu = SignedAtomicMeasure::from_atoms(
                1,
                atoms.iter().map(|(x, w)| (vec![qi(*x)], qi(*w))),
            ).unwrap();
            let lhs = mu.integrate(&p.scale(&qi(scale)).add(&q).unwrap()).unwrap();
            let rhs = qi(scale) * mu.integrate(&p).unwrap() + mu.integrate(&q).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn monomial_order_is_total_and_consistent(
            a in proptest::collection::vec(0u32..5, 1..4),
            b in proptest::collection::vec(0u32..5, 1..4),
        ) {
            prop_assume!(a.len() == b.len());
            let x = MultiIndex::new(a);
            let y = MultiIndex::new(b);
            match x.cmp(&y) {
                Ordering::Equal => prop_assert_eq!(&x, &y),
                Ordering::Less => prop_assert_eq!(y.cmp(&x), Ordering::Greater),
                Ordering::Greater => prop_assert_eq!(y.cmp(&x), Ordering::Less),
            }
            if x.degree() < y.degree() {
                prop_assert_eq!(x.cmp(&y), Ordering::Less);
            }
        }
    }
}
