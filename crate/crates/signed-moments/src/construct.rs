//! Building signed atomic measures with prescribed moments.
//!
//! Given a target moment sequence and a support description, the constructors
//! here produce a finitely atomic signed measure `Σ w_i δ_{x_i}` whose
//! moments match the target, with all atoms inside the support. Two entry
//! points:
//!
//! * [`polya_construct_1d`] — the one-variable scheme: pick `N+1` distinct
//!   nodes from the support, solve the square Vandermonde system, done. This
//!   is the constructive half of the line characterization: any unbounded
//!   closed set on the line carries signed representations of every truncated
//!   sequence.
//! * [`construct_signed_measure`] — the general driver: sample candidate
//!   nodes from the support, gate on the evaluation matrix having full row
//!   rank (retrying with doubled budgets when sampling was unlucky), then
//!   either solve for any matching weight vector or minimize the total
//!   variation `Σ |w_i|` over the candidate nodes by linear programming.
//!
//! Everything is generic over the scalar: exact rationals give residuals
//! that are identically zero, floats give fast approximate matches with
//! row-equilibrated solves and one step of iterative refinement.

use crate::linalg::{float_condition_estimate, rank_and_kernel, solve_linear_system, LinalgError};
use crate::moments::{
    enumerate_basis, MomentError, MomentSequence, MultiIndex, Polynomial, SignedAtomicMeasure,
};
use crate::scalar::{derive_seed, Scalar};
use crate::simplex::{solve_standard_form, LpOutcome};
use crate::support::{SupportError, SupportSpec};
use num_rational::BigRational;
use thiserror::Error;

/// Above this many LP variables (twice the node count) the exact simplex is
/// deemed too slow and a float solve is substituted, noted in diagnostics.
pub const EXACT_LP_VARIABLE_LIMIT: usize = 200;

/// Relative residual tolerance for float verification.
pub const VERIFY_RELATIVE_TOL: f64 = 1e-9;

/// Pivot tolerance for the float simplex.
const FLOAT_LP_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum ConstructError<S: Scalar> {
    #[error("target lives in dimension {target}, support in {support}")]
    DimensionMismatch { target: usize, support: usize },
    #[error("degree {degree} needs at least {needed} nodes, got {got}")]
    NotEnoughNodes { needed: usize, got: usize, degree: u32 },
    #[error("nodes {first} and {second} coincide (both are {value})")]
    DuplicateNodes { first: usize, second: usize, value: S },
    #[error(
        "candidate nodes span rank {rank} of {needed} at degree {degree} after {attempts} \
         attempt(s); the polynomial {certificate} vanishes on all of them"
    )]
    CandidatesNotDense {
        degree: u32,
        attempts: usize,
        rank: usize,
        needed: usize,
        certificate: Polynomial<S>,
    },
    #[error(transparent)]
    Support(#[from] SupportError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("internal solver failure: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Any weight vector matching the target moments.
    AnySolution,
    /// Minimize `Σ |w_i|` over the candidate nodes.
    MinimizeTotalVariation,
}

/// A construction request. `node_budget` defaults to the number of basis
/// monomials — the least that can possibly pass the rank gate.
#[derive(Debug, Clone)]
pub struct MatchProblem<'a, S: Scalar> {
    pub target: &'a MomentSequence<S>,
    pub support: &'a SupportSpec,
    pub node_budget: Option<usize>,
    pub objective: Objective,
    pub seed: u64,
}

impl<'a, S: Scalar> MatchProblem<'a, S> {
    pub fn new(target: &'a MomentSequence<S>, support: &'a SupportSpec) -> Self {
        MatchProblem {
            target,
            support,
            node_budget: None,
            objective: Objective::AnySolution,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    /// Exact elimination with free variables pinned to zero.
    ExactElimination,
    /// Exact two-phase simplex on the split weights.
    ExactSimplex,
    /// Float minimum-norm least squares with one refinement step.
    FloatMinNorm,
    /// Float two-phase simplex on the split weights.
    FloatSimplex,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub solver: SolverMode,
    pub node_count: usize,
    /// Rank of the node evaluation matrix; equals `basis_dim` past the gate.
    pub rank: usize,
    pub basis_dim: usize,
    /// Sampling rounds beyond the first needed to pass the rank gate.
    pub retries: usize,
    /// 2-norm condition estimate of the (equilibrated) moment matrix.
    pub conditioning: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MatchResult<S: Scalar> {
    pub measure: SignedAtomicMeasure<S>,
    /// Achieved minus target, one entry per basis monomial.
    pub residuals: Vec<(MultiIndex, S)>,
    /// Largest residual relative to `max(1, |target entry|)`, each row first
    /// divided by its equilibration factor so float solves are judged in the
    /// frame they were computed in. Exact solves leave the factors at one.
    pub max_relative_residual: f64,
    pub total_variation: S,
    pub diagnostics: Diagnostics,
}

// ---------------------------------------------------------------------------
// The one-variable scheme.

/// Interpolatory construction on the line: the first `N+1` of the given
/// nodes, a square Vandermonde solve, and the weights fall out. Nodes must be
/// pairwise distinct — the error names the offending pair.
pub fn polya_construct_1d<S: Scalar>(
    target: &MomentSequence<S>,
    nodes: &[S],
) -> Result<SignedAtomicMeasure<S>, ConstructError<S>> {
    if target.dimension() != 1 {
        return Err(ConstructError::DimensionMismatch {
            target: target.dimension(),
            support: 1,
        });
    }
    let degree = target.max_degree();
    let needed = degree as usize + 1;
    if nodes.len() < needed {
        return Err(ConstructError::NotEnoughNodes {
            needed,
            got: nodes.len(),
            degree,
        });
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i] == nodes[j] {
                return Err(ConstructError::DuplicateNodes {
                    first: i + 1,
                    second: j + 1,
                    value: nodes[i].clone(),
                });
            }
        }
    }
    let used = &nodes[..needed];
    // Row per moment order: Σ_i x_i^α w_i = s_α.
    let rows: Vec<Vec<S>> = (0..needed)
        .map(|alpha| {
            used.iter()
                .map(|x| crate::scalar::pow(x, alpha as u32))
                .collect()
        })
        .collect();
    let rhs: Vec<S> = target.iter().map(|(_, s)| s.clone()).collect();
    let weights = solve_linear_system(&rows, &rhs).map_err(|e: LinalgError| {
        ConstructError::Internal(format!("square Vandermonde solve failed: {e}"))
    })?;
    let atoms = used
        .iter()
        .cloned()
        .zip(weights)
        .map(|(x, w)| (vec![x], w));
    Ok(SignedAtomicMeasure::from_atoms(1, atoms)?)
}

// ---------------------------------------------------------------------------
// The general driver.

/// Samples candidate nodes, gates on their evaluation rank, and solves for
/// matching weights under the requested objective.
pub fn construct_signed_measure<S: Scalar>(
    problem: &MatchProblem<'_, S>,
) -> Result<MatchResult<S>, ConstructError<S>> {
    let target = problem.target;
    let support = problem.support;
    let d = support.dimension();
    if target.dimension() != d {
        return Err(ConstructError::DimensionMismatch {
            target: target.dimension(),
            support: d,
        });
    }
    let degree = target.max_degree();
    let basis = enumerate_basis(d, degree);
    let dim = basis.len();
    let budget0 = problem.node_budget.unwrap_or(dim).max(dim);
    let strategy = support.default_strategy();

    // Rank gate with doubled budgets on retry. Classes with too few points
    // settle for what exists; identical candidate sets end the retries.
    let mut chosen: Option<Vec<Vec<BigRational>>> = None;
    let mut last: Option<(usize, Vec<Vec<BigRational>>, Option<Vec<S>>)> = None;
    let mut attempts = 0;
    let mut retries = 0;
    for round in 0..3 {
        let budget = budget0 << round;
        let seed = derive_seed(problem.seed, "candidate-nodes", round as u64);
        let candidates = match support.sample(budget, strategy, seed) {
            Ok(pts) => pts,
            Err(SupportError::NotEnoughPoints { available, .. }) if available > 0 => {
                support.sample(available, strategy, seed)?
            }
            Err(e) => return Err(e.into()),
        };
        attempts += 1;
        let rows: Vec<Vec<S>> = candidates
            .iter()
            .map(|p| {
                let ps: Vec<S> = p.iter().map(|q| S::from_rational(q)).collect();
                basis
                    .iter()
                    .map(|alpha| alpha.eval(&ps).expect("dimensions agree"))
                    .collect()
            })
            .collect();
        let report = rank_and_kernel(&rows, dim);
        if report.rank == dim {
            chosen = Some(candidates);
            retries = round;
            break;
        }
        let same_as_last = last.as_ref().is_some_and(|(_, prev, _)| *prev == candidates);
        last = Some((report.rank, candidates, report.kernel));
        if same_as_last {
            break; // a finite class keeps handing us the same points
        }
    }
    let candidates = match chosen {
        Some(c) => c,
        None => {
            let (rank, _, kernel) = last.expect("at least one attempt ran");
            let kernel = kernel.ok_or_else(|| {
                ConstructError::Internal("rank deficit without a kernel vector".into())
            })?;
            let certificate = Polynomial::from_terms(
                d,
                basis.iter().cloned().zip(kernel).collect::<Vec<_>>(),
            )?;
            return Err(ConstructError::CandidatesNotDense {
                degree,
                attempts,
                rank,
                needed: dim,
                certificate,
            });
        }
    };

    let nodes: Vec<Vec<S>> = candidates
        .iter()
        .map(|p| p.iter().map(|q| S::from_rational(q)).collect())
        .collect();
    let n = nodes.len();

    // Moment matrix A[α, i] = x_i^α and right-hand side s_α. Floats get rows
    // equilibrated by σ^α, σ the per-axis magnitude, which is exactly a
    // rescale of the nodes into the unit box.
    let mut a_rows: Vec<Vec<S>> = basis
        .iter()
        .map(|alpha| {
            nodes
                .iter()
                .map(|x| alpha.eval(x).expect("dimensions agree"))
                .collect()
        })
        .collect();
    let mut rhs: Vec<S> = target.iter().map(|(_, s)| s.clone()).collect();
    let mut row_scales = vec![1.0_f64; dim];
    if !S::EXACT {
        let mut sigma = vec![1.0_f64; d];
        for x in &nodes {
            for (s, c) in sigma.iter_mut().zip(x) {
                *s = s.max(c.to_f64().abs());
            }
        }
        for (row, ((alpha, r), scale)) in a_rows
            .iter_mut()
            .zip(basis.iter().zip(rhs.iter_mut()).zip(row_scales.iter_mut()))
        {
            let factor: f64 = alpha
                .exponents()
                .iter()
                .zip(&sigma)
                .map(|(e, s)| s.powi(*e as i32))
                .product();
            *scale = factor;
            let inv = S::from_f64(1.0 / factor);
            for v in row.iter_mut() {
                *v = v.clone() * inv.clone();
            }
            *r = r.clone() * inv;
        }
    }
    let conditioning = {
        let float_rows: Vec<Vec<f64>> = a_rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_f64()).collect())
            .collect();
        Some(float_condition_estimate(&float_rows, n))
    };

    let (weights, solver) = match problem.objective {
        Objective::AnySolution => {
            let mut w = solve_linear_system(&a_rows, &rhs).map_err(|e| {
                ConstructError::Internal(format!(
                    "full-rank system reported {e}; the rank gate should have prevented this"
                ))
            })?;
            if !S::EXACT {
                // One step of iterative refinement on the residual.
                let residual: Vec<S> = a_rows
                    .iter()
                    .zip(&rhs)
                    .map(|(row, b)| {
                        let ax = row
                            .iter()
                            .zip(&w)
                            .fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone());
                        b.clone() - ax
                    })
                    .collect();
                if let Ok(dw) = solve_linear_system(&a_rows, &residual) {
                    for (wi, di) in w.iter_mut().zip(dw) {
                        *wi = wi.clone() + di;
                    }
                }
            }
            let mode = if S::EXACT {
                SolverMode::ExactElimination
            } else {
                SolverMode::FloatMinNorm
            };
            (w, mode)
        }
        Objective::MinimizeTotalVariation => {
            if S::EXACT && 2 * n > EXACT_LP_VARIABLE_LIMIT {
                // Too large for exact pivoting: solve in floats and embed the
                // dyadic weights back. Residuals will say so honestly.
                let float_cols = split_columns_f64(&a_rows, n);
                let b: Vec<f64> = rhs.iter().map(|v| v.to_f64()).collect();
                let c = vec![1.0; 2 * n];
                let w = run_split_lp(&float_cols, &b, &c, &FLOAT_LP_TOL, n)?;
                (w.into_iter().map(|x| S::from_f64(x)).collect(), SolverMode::FloatSimplex)
            } else {
                let columns = split_columns(&a_rows, n);
                let costs = vec![S::one(); 2 * n];
                let tol = if S::EXACT {
                    S::zero()
                } else {
                    S::from_f64(FLOAT_LP_TOL)
                };
                let w = run_split_lp(&columns, &rhs, &costs, &tol, n)?;
                let mode = if S::EXACT {
                    SolverMode::ExactSimplex
                } else {
                    SolverMode::FloatSimplex
                };
                (w, mode)
            }
        }
    };

    let measure = SignedAtomicMeasure::from_atoms(d, nodes.into_iter().zip(weights))?;
    let achieved = measure.moments(degree);
    let mut residuals = Vec::with_capacity(dim);
    let mut max_rel = 0.0_f64;
    for ((alpha, s), scale) in target.iter().zip(&row_scales) {
        let a = achieved.get(alpha).cloned().unwrap_or_else(S::zero);
        let r = a - s.clone();
        // Relative to the equilibrated rows: the frame the solver works in,
        // where one number across all degrees means something.
        let rel = (r.to_f64() / scale).abs() / (s.to_f64() / scale).abs().max(1.0);
        max_rel = max_rel.max(rel);
        residuals.push((alpha.clone(), r));
    }
    let total_variation = measure.total_variation();
    Ok(MatchResult {
        measure,
        residuals,
        max_relative_residual: max_rel,
        total_variation,
        diagnostics: Diagnostics {
            solver,
            node_count: n,
            rank: dim,
            basis_dim: dim,
            retries,
            conditioning,
        },
    })
}

/// Splits `w = u − v` into the standard-form columns `[A | −A]`.
fn split_columns<S: Scalar>(a_rows: &[Vec<S>], n: usize) -> Vec<Vec<S>> {
    let mut columns = Vec::with_capacity(2 * n);
    for i in 0..n {
        columns.push(a_rows.iter().map(|r| r[i].clone()).collect());
    }
    for i in 0..n {
        columns.push(a_rows.iter().map(|r| -r[i].clone()).collect());
    }
    columns
}

fn split_columns_f64<S: Scalar>(a_rows: &[Vec<S>], n: usize) -> Vec<Vec<f64>> {
    let float_rows: Vec<Vec<f64>> = a_rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_f64()).collect())
        .collect();
    split_columns(&float_rows, n)
}

/// Runs the split-weight LP and recombines `w_i = u_i − v_i`.
fn run_split_lp<T: Scalar, S: Scalar>(
    columns: &[Vec<T>],
    b: &[T],
    costs: &[T],
    tol: &T,
    n: usize,
) -> Result<Vec<T>, ConstructError<S>> {
    match solve_standard_form(columns, b, costs, tol) {
        LpOutcome::Optimal { x, .. } => Ok((0..n).map(|i| x[i].clone() - x[n + i].clone()).collect()),
        LpOutcome::Infeasible => Err(ConstructError::Internal(
            "variation LP reported infeasible despite a full-rank gate".into(),
        )),
        LpOutcome::Unbounded => Err(ConstructError::Internal(
            "variation LP reported unbounded despite nonnegative costs".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Decomposition and verification.

/// Jordan split `μ = μ₊ − μ₋` into positive measures with disjoint atoms.
pub fn jordan_decompose<S: Scalar>(
    measure: &SignedAtomicMeasure<S>,
) -> (SignedAtomicMeasure<S>, SignedAtomicMeasure<S>) {
    measure.jordan_decomposition()
}

#[derive(Debug, Clone)]
pub struct VerifyReport<S: Scalar> {
    /// All residuals are zero (exact) or relatively below `1e-9` (float).
    pub matched: bool,
    /// Recomputed minus target, per basis monomial.
    pub residuals: Vec<(MultiIndex, S)>,
    pub max_relative_error: f64,
    /// Per-atom membership flags, when a support was supplied.
    pub atom_in_support: Option<Vec<bool>>,
    /// All atoms inside the support, when one was supplied.
    pub support_ok: Option<bool>,
    pub total_variation: S,
    pub atom_count: usize,
}

/// Recomputes the measure's moments independently (atoms accumulated in
/// reverse, monomials evaluated term by term) and diffs against the target.
pub fn verify_match<S: Scalar>(
    measure: &SignedAtomicMeasure<S>,
    target: &MomentSequence<S>,
    support: Option<&SupportSpec>,
) -> Result<VerifyReport<S>, MomentError> {
    if measure.dimension() != target.dimension() {
        return Err(MomentError::DimensionMismatch {
            expected: target.dimension(),
            got: measure.dimension(),
        });
    }
    let mut residuals = Vec::new();
    let mut max_rel = 0.0_f64;
    let mut matched = true;
    for (alpha, s) in target.iter() {
        let mut acc = S::zero();
        for atom in measure.atoms().iter().rev() {
            acc = acc + atom.weight.clone() * alpha.eval(&atom.point)?;
        }
        let r = acc - s.clone();
        let rel = r.to_f64().abs() / s.to_f64().abs().max(1.0);
        max_rel = max_rel.max(rel);
        let ok = if S::EXACT {
            r.is_zero()
        } else {
            rel <= VERIFY_RELATIVE_TOL
        };
        matched &= ok;
        residuals.push((alpha.clone(), r));
    }
    let atom_in_support = support.map(|spec| {
        measure
            .atoms()
            .iter()
            .map(|a| spec.contains(&a.point[..]))
            .collect::<Vec<bool>>()
    });
    let support_ok = atom_in_support.as_ref().map(|flags| flags.iter().all(|b| *b));
    if let Some(false) = support_ok {
        matched = false;
    }
    Ok(VerifyReport {
        matched,
        residuals,
        max_relative_error: max_rel,
        atom_in_support,
        support_ok,
        total_variation: measure.total_variation(),
        atom_count: measure.atoms().len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::{GridAxis, Ray, SampleStrategy};
    use num_traits::{One, Zero};
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;

    fn qi(n: i64) -> Q {
        Q::from_int(n)
    }

    fn qq(n: i64, den: i64) -> Q {
        Q::new(n.into(), den.into())
    }

    // Independent oracle for the one-variable scheme: the weight at node x_i
    // is the functional applied to the Lagrange basis polynomial ℓ_i.
    fn lagrange_weights(target: &MomentSequence<Q>, nodes: &[Q]) -> Vec<Q> {
        let x = Polynomial::coordinate(1, 1);
        nodes
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                let mut ell = Polynomial::constant(1, Q::one());
                for (j, xj) in nodes.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let factor = x
                        .add(&Polynomial::constant(1, -xj.clone()))
                        .unwrap()
                        .scale(&(Q::one() / (xi.clone() - xj.clone())));
                    ell = ell.mul(&factor).unwrap();
                }
                target.riesz(&ell).unwrap()
            })
            .collect()
    }

    fn sequence_1d(values: &[i64]) -> MomentSequence<Q> {
        MomentSequence::from_values(
            1,
            (values.len() - 1) as u32,
            values
                .iter()
                .map(|&v| qi(v))
                .enumerate()
                .map(|(k, s)| (MultiIndex::new(vec![k as u32]), s))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn textbook_three_node_example() {
        // Moments (1, 0, 0) at nodes 1, 2, 3 force the weights (3, −3, 1).
        let target = sequence_1d(&[1, 0, 0]);
        let nodes = [qi(1), qi(2), qi(3)];
        let measure = polya_construct_1d(&target, &nodes).unwrap();
        let expected = SignedAtomicMeasure::from_atoms(
            1,
            vec![
                (vec![qi(1)], qi(3)),
                (vec![qi(2)], qi(-3)),
                (vec![qi(3)], qi(1)),
            ],
        )
        .unwrap();
        assert_eq!(measure, expected);
        assert_eq!(measure.total_variation(), qi(7));
    }

    #[test]
    fn point_mass_is_recovered_when_its_site_is_a_node() {
        let delta4 = SignedAtomicMeasure::from_atoms(1, vec![(vec![qi(4)], qi(1))]).unwrap();
        let target = delta4.moments(2);
        let measure = polya_construct_1d(&target, &[qi(2), qi(4), qi(7)]).unwrap();
        assert_eq!(measure, delta4);
    }

    #[test]
    fn zero_target_gives_the_empty_measure() {
        let target = MomentSequence::<Q>::zero(1, 3);
        let measure = polya_construct_1d(&target, &[qi(1), qi(2), qi(3), qi(4)]).unwrap();
        assert!(measure.atoms().is_empty());
        assert_eq!(measure.total_variation(), qi(0));
    }

    #[test]
    fn duplicate_nodes_are_named() {
        let target = sequence_1d(&[1, 0, 0]);
        let err = polya_construct_1d(&target, &[qi(1), qi(2), qi(2)]).unwrap_err();
        assert_eq!(
            err,
            ConstructError::DuplicateNodes {
                first: 2,
                second: 3,
                value: qi(2)
            }
        );
    }

    #[test]
    fn too_few_nodes_are_rejected() {
        let target = sequence_1d(&[1, 0, 0]);
        let err = polya_construct_1d(&target, &[qi(1), qi(2)]).unwrap_err();
        assert_eq!(
            err,
            ConstructError::NotEnoughNodes {
                needed: 3,
                got: 2,
                degree: 2
            }
        );
    }

    #[test]
    fn polya_agrees_with_the_lagrange_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let nodes: Vec<Q> = (1..=6).map(|k| qi(k * k)).collect();
        for _ in 0..25 {
            let target = MomentSequence::from_fn(1, 5, |_| qq(rng.gen_range(-50..=50), 7));
            let measure = polya_construct_1d(&target, &nodes).unwrap();
            let oracle = lagrange_weights(&target, &nodes);
            let expected = SignedAtomicMeasure::from_atoms(
                1,
                nodes.iter().cloned().map(|x| vec![x]).zip(oracle),
            )
            .unwrap();
            assert_eq!(measure, expected);
        }
    }

    fn squares_support(n: i64) -> SupportSpec {
        SupportSpec::point_sequence_1d((1..=n).map(|k| qi(k * k)).collect()).unwrap()
    }

    fn first_ten() -> SupportSpec {
        SupportSpec::point_sequence_1d((1..=10).map(qi).collect()).unwrap()
    }

    #[test]
    fn default_budget_minimizes_over_the_leading_nodes() {
        // Target (s₀, s₁) = (0, 1) over {1, …, 10}: the default budget keeps
        // the first two nodes, forcing weights (−1, +1) of total variation 2.
        let target = sequence_1d(&[0, 1]);
        let support = first_ten();
        let mut problem = MatchProblem::new(&target, &support);
        problem.objective = Objective::MinimizeTotalVariation;
        let result = construct_signed_measure(&problem).unwrap();
        assert_eq!(result.total_variation, qi(2));
        assert_eq!(result.diagnostics.solver, SolverMode::ExactSimplex);
        assert_eq!(result.diagnostics.node_count, 2);
        let expected = SignedAtomicMeasure::from_atoms(
            1,
            vec![(vec![qi(1)], qi(-1)), (vec![qi(2)], qi(1))],
        )
        .unwrap();
        assert_eq!(result.measure, expected);
    }

    #[test]
    fn widening_the_budget_shrinks_the_variation_to_the_diameter_bound() {
        // Over all ten nodes the optimum parks ∓1/9 on the endpoints:
        // TV = 2/(x_max − x_min).
        let target = sequence_1d(&[0, 1]);
        let support = first_ten();
        let mut problem = MatchProblem::new(&target, &support);
        problem.objective = Objective::MinimizeTotalVariation;
        problem.node_budget = Some(10);
        let result = construct_signed_measure(&problem).unwrap();
        assert_eq!(result.total_variation, qq(2, 9));
        let expected = SignedAtomicMeasure::from_atoms(
            1,
            vec![(vec![qi(1)], qq(-1, 9)), (vec![qi(10)], qq(1, 9))],
        )
        .unwrap();
        assert_eq!(result.measure, expected);
        for (_, r) in &result.residuals {
            assert!(r.is_zero());
        }
    }

    fn grid_5x5() -> SupportSpec {
        let axis = GridAxis {
            values: (1..=5).map(qi).collect(),
            unbounded: false,
        };
        SupportSpec::grid(vec![axis.clone(), axis]).unwrap()
    }

    #[test]
    fn grid_point_mass_is_the_unique_variation_minimizer() {
        let delta = SignedAtomicMeasure::from_atoms(2, vec![(vec![qi(1), qi(1)], qi(1))]).unwrap();
        let target = delta.moments(2);
        let support = grid_5x5();
        let mut problem = MatchProblem::new(&target, &support);
        problem.objective = Objective::MinimizeTotalVariation;
        problem.node_budget = Some(25);
        let result = construct_signed_measure(&problem).unwrap();
        assert_eq!(result.measure, delta);
        assert_eq!(result.total_variation, qi(1));
        assert_eq!(result.diagnostics.node_count, 25);
        assert_eq!(result.diagnostics.solver, SolverMode::ExactSimplex);
    }

    #[test]
    fn float_grid_point_mass_matches_within_tolerance() {
        let delta = SignedAtomicMeasure::from_atoms(2, vec![(vec![1.0, 1.0], 1.0)]).unwrap();
        let target = delta.moments(2);
        let support = grid_5x5();
        let mut problem = MatchProblem::new(&target, &support);
        problem.objective = Objective::MinimizeTotalVariation;
        problem.node_budget = Some(25);
        let result = construct_signed_measure(&problem).unwrap();
        assert_eq!(result.diagnostics.solver, SolverMode::FloatSimplex);
        assert!(result.max_relative_residual <= VERIFY_RELATIVE_TOL);
        assert!((result.total_variation - 1.0).abs() <= 1e-6);
        let report = verify_match(&result.measure, &target, Some(&support)).unwrap();
        assert!(report.matched);
        assert_eq!(report.support_ok, Some(true));
    }

    #[test]
    fn variation_objective_never_beats_any_solution_backwards() {
        let target = sequence_1d(&[2, -1, 5]);
        let support = squares_support(12);
        let mut any = MatchProblem::new(&target, &support);
        any.node_budget = Some(8);
        let mut tv = any.clone();
        tv.objective = Objective::MinimizeTotalVariation;
        let any_result = construct_signed_measure(&any).unwrap();
        let tv_result = construct_signed_measure(&tv).unwrap();
        assert!(tv_result.total_variation <= any_result.total_variation);
        // Both must still match the moments exactly.
        for result in [&any_result, &tv_result] {
            for (_, r) in &result.residuals {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn rank_gate_reports_a_certificate_on_degenerate_supports() {
        // Points confined to the two coordinate axes never span the degree-2
        // monomials: x₁x₂ vanishes identically.
        let e = |x: i64, y: i64| vec![qi(x), qi(y)];
        let cross = SupportSpec::union_of_rays(
            2,
            vec![
                Ray { offset: e(0, 0), direction: e(1, 0) },
                Ray { offset: e(0, 0), direction: e(-1, 0) },
                Ray { offset: e(0, 0), direction: e(0, 1) },
                Ray { offset: e(0, 0), direction: e(0, -1) },
            ],
        )
        .unwrap();
        let target = MomentSequence::<Q>::zero(2, 2);
        let problem = MatchProblem::new(&target, &cross);
        match construct_signed_measure(&problem) {
            Err(ConstructError::CandidatesNotDense {
                rank,
                needed,
                certificate,
                attempts,
                ..
            }) => {
                assert_eq!(needed, 6);
                assert!(rank < needed);
                assert_eq!(attempts, 3);
                assert!(certificate.degree().is_some());
            }
            other => panic!("expected a density failure, got {other:?}"),
        }
    }

    #[test]
    fn general_constructor_reduces_to_the_line_scheme_on_shared_nodes() {
        // With the budget pinned to N+1 nodes the general system is square,
        // so its unique solution must equal the interpolatory weights.
        let target = sequence_1d(&[3, -2, 7, 1]);
        let support = squares_support(16);
        let mut problem = MatchProblem::new(&target, &support);
        problem.node_budget = Some(4);
        let general = construct_signed_measure(&problem).unwrap();
        let nodes: Vec<Q> = (1..=4).map(|k| qi(k * k)).collect();
        let line = polya_construct_1d(&target, &nodes).unwrap();
        assert_eq!(general.measure, line);
    }

    #[test]
    fn jordan_parts_recombine() {
        let measure = SignedAtomicMeasure::from_atoms(
            1,
            vec![
                (vec![qi(1)], qi(2)),
                (vec![qi(3)], qi(-5)),
                (vec![qi(7)], qq(1, 2)),
            ],
        )
        .unwrap();
        let (pos, neg) = jordan_decompose(&measure);
        assert!(pos.atoms().iter().all(|a| a.weight > Q::zero()));
        assert!(neg.atoms().iter().all(|a| a.weight > Q::zero()));
        assert_eq!(
            pos.total_mass() + neg.total_mass(),
            measure.total_variation()
        );
        let m_pos = pos.moments(3);
        let m_neg = neg.moments(3);
        let m = measure.moments(3);
        for (alpha, s) in m.iter() {
            let diff = m_pos.get(alpha).unwrap().clone() - m_neg.get(alpha).unwrap().clone();
            assert_eq!(&diff, s);
        }
    }

    #[test]
    fn verify_match_catches_a_perturbed_target() {
        let measure = SignedAtomicMeasure::from_atoms(1, vec![(vec![qi(2)], qi(1))]).unwrap();
        let good = measure.moments(2);
        let report = verify_match(&measure, &good, None).unwrap();
        assert!(report.matched);
        assert_eq!(report.max_relative_error, 0.0);

        let bad = MomentSequence::from_values(
            1,
            2,
            vec![
                (MultiIndex::new(vec![0]), qi(1)),
                (MultiIndex::new(vec![1]), qi(2)),
                (MultiIndex::new(vec![2]), qi(5)), // should be 4
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let report = verify_match(&measure, &bad, None).unwrap();
        assert!(!report.matched);
        assert!(report.max_relative_error > 0.0);
    }

    #[test]
    fn verify_match_flags_atoms_outside_the_support() {
        let measure = SignedAtomicMeasure::from_atoms(1, vec![(vec![qi(6)], qi(1))]).unwrap();
        let target = measure.moments(1);
        let support = SupportSpec::point_sequence_1d(vec![qi(1), qi(2), qi(4)]).unwrap();
        let report = verify_match(&measure, &target, Some(&support)).unwrap();
        assert_eq!(report.support_ok, Some(false));
        assert_eq!(report.atom_in_support, Some(vec![false]));
        assert!(!report.matched);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        // Exact construction is a true right inverse of the moment map, with
        // atoms inside the support and variation at least |s₀|.
        #[test]
        fn exact_construction_round_trips(
            seed in 0u64..200,
            degree in 1u32..4,
            numerators in prop::collection::vec(-40i64..40, 10),
        ) {
            let support = SupportSpec::full_space(1).unwrap();
            let dim = degree as usize + 1;
            let target = MomentSequence::from_values(
                1,
                degree,
                (0..dim)
                    .map(|k| (MultiIndex::new(vec![k as u32]), qq(numerators[k], 6)))
                    .collect(),
            ).unwrap();
            let mut problem = MatchProblem::new(&target, &support);
            problem.seed = seed;
            let result = construct_signed_measure(&problem).unwrap();
            for (_, r) in &result.residuals {
                prop_assert!(r.is_zero());
            }
            let report = verify_match(&result.measure, &target, Some(&support)).unwrap();
            prop_assert!(report.matched);
            prop_assert_eq!(report.support_ok, Some(true));
            let s0 = target.get(&MultiIndex::new(vec![0])).unwrap();
            prop_assert!(result.total_variation >= s0.abs());
        }

        // The variation objective is optimal over every sub-selection the
        // any-solution path might use, for shared candidates.
        #[test]
        fn variation_is_minimal_among_matches(seed in 0u64..50, s1 in -8i64..8) {
            let target = sequence_1d(&[0, s1]);
            let support = first_ten();
            let mut tv = MatchProblem::new(&target, &support);
            tv.node_budget = Some(10);
            tv.objective = Objective::MinimizeTotalVariation;
            tv.seed = seed;
            let mut any = tv.clone();
            any.objective = Objective::AnySolution;
            let tv_result = construct_signed_measure(&tv).unwrap();
            let any_result = construct_signed_measure(&any).unwrap();
            prop_assert!(tv_result.total_variation <= any_result.total_variation);
            // And the known closed form: |s₁| · 2/9 on the endpoints.
            prop_assert_eq!(tv_result.total_variation, qq(2 * s1.abs(), 9));
        }
    }

    #[test]
    fn sampling_strategy_is_part_of_the_contract() {
        // Grid supports enumerate the lattice; the budget request of 25 on a
        // 5×5 grid must return every lattice point, keeping LP candidates
        // reproducible across runs.
        let support = grid_5x5();
        let pts = support.sample(25, SampleStrategy::Grid, 0).unwrap();
        assert_eq!(pts.len(), 25);
    }
}
