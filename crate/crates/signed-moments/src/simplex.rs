//! A self-contained simplex solver for small standard-form linear programs:
//! `min cᵀx` subject to `A x = b`, `x ≥ 0`.
//!
//! This is a textbook two-phase revised simplex with an explicit basis
//! inverse. Bland's rule picks both the entering and the leaving variable, so
//! the solver never cycles and — just as important here — the optimal vertex
//! it reports is deterministic even when the optimum face has many vertices.
//!
//! The solver is generic over the scalar: with rationals and a zero tolerance
//! every comparison is exact and the answer is certified; with floats a small
//! feasibility tolerance absorbs roundoff. Artificial variables that survive
//! phase one at level zero (redundant constraint rows) are kept basic and
//! evicted lazily the moment any entering direction touches their row, which
//! handles rank-deficient systems without a separate cleanup pass.

use crate::scalar::Scalar;

/// Result of a standard-form solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S: Scalar> {
    /// An optimal basic solution. `x` has one entry per column of `A`.
    Optimal { x: Vec<S>, objective: S },
    /// The constraints admit no nonnegative solution.
    Infeasible,
    /// The objective decreases without bound over the feasible set.
    Unbounded,
}

/// Minimizes `cᵀx` over `A x = b`, `x ≥ 0`, where `columns[j]` is the `j`-th
/// column of `A`. Pass a zero tolerance for exact scalars and something like
/// `1e-8` for floats.
pub fn solve_standard_form<S: Scalar>(
    columns: &[Vec<S>],
    b: &[S],
    c: &[S],
    tol: &S,
) -> LpOutcome<S> {
    let m = b.len();
    let n = columns.len();
    assert_eq!(c.len(), n, "one cost per column");
    for col in columns {
        assert_eq!(col.len(), m, "one entry per constraint row");
    }
    if m == 0 {
        // No constraints: x = 0 is optimal unless some cost is negative.
        if c.iter().any(|cj| *cj < S::zero() - tol.clone()) {
            return LpOutcome::Unbounded;
        }
        return LpOutcome::Optimal {
            x: vec![S::zero(); n],
            objective: S::zero(),
        };
    }

    // Flip rows so the right-hand side is nonnegative; artificials then start
    // as a feasible identity basis.
    let mut cols: Vec<Vec<S>> = columns.to_vec();
    let mut rhs: Vec<S> = b.to_vec();
    for i in 0..m {
        if rhs[i] < S::zero() {
            rhs[i] = -rhs[i].clone();
            for col in cols.iter_mut() {
                col[i] = -col[i].clone();
            }
        }
    }

    let mut state = State {
        cols,
        rhs,
        m,
        n,
        basis: (n..n + m).collect(),
        binv: identity(m),
        tol: tol.clone(),
    };

    // Phase one: minimize the sum of artificials.
    let phase1_cost: Vec<S> = (0..n + m)
        .map(|j| if j < n { S::zero() } else { S::one() })
        .collect();
    match state.run(&phase1_cost, true) {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => unreachable!("phase-one objective is bounded below by zero"),
    }
    let phase1_obj = state.objective(&phase1_cost);
    if phase1_obj > state.tol {
        return LpOutcome::Infeasible;
    }

    // Phase two: the real objective; artificials cost nothing and may not
    // enter.
    let phase2_cost: Vec<S> = (0..n + m)
        .map(|j| if j < n { c[j].clone() } else { S::zero() })
        .collect();
    match state.run(&phase2_cost, false) {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return LpOutcome::Unbounded,
    }

    let xb = state.basic_values();
    let mut x = vec![S::zero(); n];
    for (i, &j) in state.basis.iter().enumerate() {
        if j < n {
            x[j] = xb[i].clone();
        }
    }
    let mut objective = S::zero();
    for (xj, cj) in x.iter().zip(c) {
        objective = objective + xj.clone() * cj.clone();
    }
    LpOutcome::Optimal { x, objective }
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

struct State<S: Scalar> {
    /// Original columns (row-flipped), indices `0..n`; artificial `j ≥ n` is
    /// the identity column `e_{j−n}`.
    cols: Vec<Vec<S>>,
    rhs: Vec<S>,
    m: usize,
    n: usize,
    basis: Vec<usize>,
    binv: Vec<Vec<S>>,
    tol: S,
}

impl<S: Scalar> State<S> {
    fn column(&self, j: usize) -> Vec<S> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            let mut e = vec![S::zero(); self.m];
            e[j - self.n] = S::one();
            e
        }
    }

    fn basic_values(&self) -> Vec<S> {
        mat_vec(&self.binv, &self.rhs)
    }

    fn objective(&self, cost: &[S]) -> S {
        let xb = self.basic_values();
        let mut obj = S::zero();
        for (i, &j) in self.basis.iter().enumerate() {
            obj = obj + cost[j].clone() * xb[i].clone();
        }
        obj
    }

    fn run(&mut self, cost: &[S], allow_artificial_entering: bool) -> RunOutcome {
        loop {
            // Simplex multipliers y = c_B B⁻¹.
            let mut y = vec![S::zero(); self.m];
            for (i, &j) in self.basis.iter().enumerate() {
                for k in 0..self.m {
                    y[k] = y[k].clone() + cost[j].clone() * self.binv[i][k].clone();
                }
            }

            // Bland's entering rule: smallest index with negative reduced
            // cost.
            let limit = if allow_artificial_entering {
                self.n + self.m
            } else {
                self.n
            };
            let neg_tol = -self.tol.clone();
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let col = self.column(j);
                let mut reduced = cost[j].clone();
                for (yk, ak) in y.iter().zip(&col) {
                    reduced = reduced - yk.clone() * ak.clone();
                }
                if reduced < neg_tol {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return RunOutcome::Optimal;
            };

            let direction = mat_vec(&self.binv, &self.column(j));
            let xb = self.basic_values();

            // Evict a zero-level artificial whose row the direction touches;
            // this keeps redundant rows inert without a cleanup pass.
            let mut leave = None;
            for i in 0..self.m {
                if self.basis[i] >= self.n
                    && direction[i].abs() > self.tol
                    && xb[i] <= self.tol
                {
                    leave = Some(i);
                    break;
                }
            }

            // Otherwise the usual minimum-ratio test, ties broken by the
            // smallest basis index (Bland again).
            if leave.is_none() {
                let mut best: Option<(usize, S)> = None;
                for i in 0..self.m {
                    if direction[i] > self.tol {
                        let ratio = xb[i].clone() / direction[i].clone();
                        let replace = match &best {
                            None => true,
                            Some((bi, br)) => {
                                ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                            }
                        };
                        if replace {
                            best = Some((i, ratio));
                        }
                    }
                }
                leave = best.map(|(i, _)| i);
            }
            let Some(r) = leave else {
                return RunOutcome::Unbounded;
            };

            // Pivot: update B⁻¹ so the entering column becomes e_r.
            let pivot = direction[r].clone();
            for k in 0..self.m {
                self.binv[r][k] = self.binv[r][k].clone() / pivot.clone();
            }
            for i in 0..self.m {
                if i != r && !direction[i].is_zero() {
                    for k in 0..self.m {
                        self.binv[i][k] = self.binv[i][k].clone()
                            - direction[i].clone() * self.binv[r][k].clone();
                    }
                }
            }
            self.basis[r] = j;
        }
    }
}

fn identity<S: Scalar>(m: usize) -> Vec<Vec<S>> {
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { S::one() } else { S::zero() })
                .collect()
        })
        .collect()
}

fn mat_vec<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
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

    fn qq(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn solve_q(columns: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome<Q> {
        solve_standard_form(columns, b, c, &Q::zero())
    }

    /// Brute-force optimum by enumerating basic solutions: every subset of at
    /// most `m` independent columns that solves `A_T x_T = b` uniquely with
    /// `x_T ≥ 0`. Standard-form LPs attain their optimum at such a point when
    /// they attain it at all, and are infeasible iff no such point exists.
    fn enumerate_optimum(columns: &[Vec<Q>], b: &[Q], c: &[Q]) -> Option<Q> {
        let m = b.len();
        let n = columns.len();
        let mut best: Option<Q> = None;
        let mut consider = |subset: &[usize]| {
            if let Some(x) = unique_nonneg_solution(columns, b, subset) {
                let val = subset
                    .iter()
                    .zip(&x)
                    .fold(Q::zero(), |acc, (&j, xj)| acc + c[j].clone() * xj.clone());
                if best.as_ref().map_or(true, |bv| val < *bv) {
                    best = Some(val);
                }
            }
        };
        // All subsets of size 0..=m.
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(subset) = stack.pop() {
            consider(&subset);
            if subset.len() < m {
                let start = subset.last().map_or(0, |&l| l + 1);
                for j in start..n {
                    let mut next = subset.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
        }
        best
    }

    /// Solves `A_T x_T = b` by plain rational elimination; `None` unless the
    /// solution exists, is unique, and is nonnegative.
    fn unique_nonneg_solution(columns: &[Vec<Q>], b: &[Q], subset: &[usize]) -> Option<Vec<Q>> {
        let m = b.len();
        let k = subset.len();
        let mut aug: Vec<Vec<Q>> = (0..m)
            .map(|i| {
                let mut row: Vec<Q> = subset.iter().map(|&j| columns[j][i].clone()).collect();
                row.push(b[i].clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..k {
            let Some(p) = (row..m).find(|&r| !aug[r][col].is_zero()) else {
                return None; // dependent columns: not a basic solution
            };
            aug.swap(row, p);
            let inv = aug[row][col].clone();
            for j in 0..=k {
                aug[row][j] = aug[row][j].clone() / inv.clone();
            }
            for i in 0..m {
                if i != row && !aug[i][col].is_zero() {
                    let f = aug[i][col].clone();
                    for j in 0..=k {
                        aug[i][j] = aug[i][j].clone() - f.clone() * aug[row][j].clone();
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        // Remaining rows must be 0 = 0.
        for r in row..m {
            if !aug[r][k].is_zero() {
                return None;
            }
        }
        let x: Vec<Q> = (0..k).map(|i| aug[i][k].clone()).collect();
        if x.iter().any(|v| *v < Q::zero()) {
            return None;
        }
        Some(x)
    }

    #[test]
    fn pinned_variable() {
        // min x subject to x = 5.
        let out = solve_q(&[vec![qi(1)]], &[qi(5)], &[qi(1)]);
        assert_eq!(
            out,
            LpOutcome::Optimal {
                x: vec![qi(5)],
                objective: qi(5)
            }
        );
    }

    #[test]
    fn absolute_value_as_split_pair() {
        // min u + v subject to u − v = 3: the LP form of |w| for w = 3.
        let out = solve_q(
            &[vec![qi(1)], vec![qi(-1)]],
            &[qi(3)],
            &[qi(1), qi(1)],
        );
        assert_eq!(
            out,
            LpOutcome::Optimal {
                x: vec![qi(3), qi(0)],
                objective: qi(3)
            }
        );
    }

    #[test]
    fn negative_rhs_is_infeasible_for_nonnegative_variable() {
        let out = solve_q(&[vec![qi(1)]], &[qi(-1)], &[qi(1)]);
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn free_direction_is_unbounded() {
        // min −x subject to 0·x = 0: the all-zero row leaves an artificial
        // stuck in the basis, and the entering direction never touches it.
        let out = solve_q(&[vec![qi(0)]], &[qi(0)], &[qi(-1)]);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn duplicated_constraint_row_is_harmless() {
        // min x1 subject to x1 + x2 = 1 stated twice.
        let out = solve_q(
            &[vec![qi(1), qi(1)], vec![qi(1), qi(1)]],
            &[qi(1), qi(1)],
            &[qi(1), qi(0)],
        );
        match out {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(objective, Q::zero());
                assert_eq!(x, vec![qi(0), qi(1)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn min_total_variation_on_two_nodes() {
        // Nodes {1, 2}, constraints Σw = 0 and Σ w·x = 1, weights split as
        // w = u − v. The unique solution is w = (−1, +1), total variation 2.
        let cols = vec![
            vec![qi(1), qi(1)],   // u at node 1
            vec![qi(1), qi(2)],   // u at node 2
            vec![qi(-1), qi(-1)], // v at node 1
            vec![qi(-1), qi(-2)], // v at node 2
        ];
        let b = vec![qi(0), qi(1)];
        let c = vec![qi(1); 4];
        let out = solve_q(&cols, &b, &c);
        match out {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(objective, qi(2));
                assert_eq!(x, vec![qi(0), qi(1), qi(1), qi(0)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn min_total_variation_spreads_to_the_widest_nodes() {
        // Same constraints over nodes 1..=10: spreading the weight pair to
        // the extreme nodes 1 and 10 divides the needed mass by the gap, so
        // the optimum drops to 2/9.
        let nodes: Vec<i64> = (1..=10).collect();
        let mut cols = Vec::new();
        for &x in &nodes {
            cols.push(vec![qi(1), qi(x)]);
        }
        for &x in &nodes {
            cols.push(vec![qi(-1), qi(-x)]);
        }
        let b = vec![qi(0), qi(1)];
        let c = vec![qi(1); cols.len()];
        let out = solve_q(&cols, &b, &c);
        match out {
            LpOutcome::Optimal { objective, .. } => assert_eq!(objective, qq(2, 9)),
            other => panic!("expected optimal, got {other:?}"),
        }
        assert_eq!(enumerate_optimum(&cols, &b, &c), Some(qq(2, 9)));
    }

    #[test]
    fn float_mode_agrees_on_a_small_instance() {
        let cols = vec![
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![-1.0, -1.0],
            vec![-1.0, -2.0],
        ];
        let out = solve_standard_form(&cols, &[0.0, 1.0], &[1.0, 1.0, 1.0, 1.0], &1e-8);
        match out {
            LpOutcome::Optimal { objective, .. } => assert!((objective - 2.0).abs() < 1e-9),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_basic_solution_enumeration(
            entries in proptest::collection::vec(-3i64..4, 1..12),
            b_raw in proptest::collection::vec(-3i64..4, 1..3),
            c_raw in proptest::collection::vec(-2i64..3, 1..5),
        ) {
            let m = b_raw.len();
            let n = c_raw.len();
            let columns: Vec<Vec<Q>> = (0..n)
                .map(|j| (0..m).map(|i| qi(entries[(j * m + i) % entries.len()])).collect())
                .collect();
            let b: Vec<Q> = b_raw.iter().map(|&v| qi(v)).collect();
            let c: Vec<Q> = c_raw.iter().map(|&v| qi(v)).collect();
            let oracle = enumerate_optimum(&columns, &b, &c);
            match solve_q(&columns, &b, &c) {
                LpOutcome::Optimal { x, objective } => {
                    prop_assert!(x.iter().all(|v| *v >= Q::zero()));
                    // The solution really satisfies the constraints.
                    for i in 0..m {
                        let mut lhs = Q::zero();
                        for (j, xj) in x.iter().enumerate() {
                            lhs = lhs + columns[j][i].clone() * xj.clone();
                        }
                        prop_assert_eq!(&lhs, &b[i]);
                    }
                    prop_assert_eq!(oracle, Some(objective));
                }
                LpOutcome::Infeasible => prop_assert_eq!(oracle, None),
                LpOutcome::Unbounded => prop_assert!(oracle.is_some()),
            }
        }
    }
}
