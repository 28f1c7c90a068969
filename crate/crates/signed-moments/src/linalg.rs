//! Rank, kernel, and solve kernels in two arithmetic modes.
//!
//! The exact path clears denominators row by row and runs fraction-free
//! (Bareiss) Gaussian elimination over `BigInt`, so every intermediate entry
//! is a minor of the original matrix and the computed rank is certified.
//! A kernel vector, when one exists, is recovered by back-substitution with
//! the first free variable set to one; certificates derived from it are
//! exact, not numerical.
//!
//! The float path goes through an SVD. The rank counts singular values above
//! `1e-10 · σ_max`, and underdetermined solves return the minimum-norm
//! least-squares solution. Matrices with fewer rows than columns are padded
//! with zero rows first, which leaves rank, kernel, and the min-norm solution
//! unchanged but keeps the full set of right singular vectors available.
//!
//! Callers pick the mode through the [`Scalar`] type parameter; the generic
//! entry points route on `S::EXACT`.

use crate::scalar::Scalar;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Relative singular-value cutoff for float rank decisions.
pub const FLOAT_RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("linear system is inconsistent: no solution matches the right-hand side")]
    Inconsistent,
}

/// Rank together with a kernel vector when the columns are dependent.
#[derive(Debug, Clone)]
pub struct KernelReport<S: Scalar> {
    pub rank: usize,
    /// A nonzero `v` with `A v = 0`, present iff `rank < ncols`. Exact mode
    /// certifies it; float mode returns the right singular vector of the
    /// smallest singular value.
    pub kernel: Option<Vec<S>>,
}

/// Column rank of the matrix with rows `rows` and `ncols` columns, plus a
/// kernel vector if the rank is deficient. Routes on the arithmetic mode.
pub fn rank_and_kernel<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> KernelReport<S> {
    if S::EXACT {
        let qrows: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_rational()).collect())
            .collect();
        let (rank, kernel) = exact_rank_kernel(&qrows, ncols);
        KernelReport {
            rank,
            kernel: kernel.map(|v| v.iter().map(S::from_rational).collect()),
        }
    } else {
        let frows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64()).collect())
            .collect();
        let (rank, kernel) = float_rank_kernel(&frows, ncols);
        KernelReport {
            rank,
            kernel: kernel.map(|v| v.into_iter().map(S::from_f64).collect()),
        }
    }
}

/// Solves `A x = b`. In exact mode free variables are pinned to zero and an
/// unsatisfiable system is reported as [`LinalgError::Inconsistent`]; in
/// float mode the minimum-norm least-squares solution is returned and the
/// caller is expected to check residuals.
pub fn solve_linear_system<S: Scalar>(
    rows: &[Vec<S>],
    rhs: &[S],
) -> Result<Vec<S>, LinalgError> {
    assert_eq!(rows.len(), rhs.len(), "one right-hand side entry per row");
    if S::EXACT {
        let qrows: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_rational()).collect())
            .collect();
        let qrhs: Vec<BigRational> = rhs.iter().map(|x| x.to_rational()).collect();
        let x = exact_solve(&qrows, &qrhs)?;
        Ok(x.iter().map(S::from_rational).collect())
    } else {
        let frows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64()).collect())
            .collect();
        let frhs: Vec<f64> = rhs.iter().map(|x| x.to_f64()).collect();
        let ncols = frows.first().map_or(0, |r| r.len());
        Ok(float_min_norm_solve(&frows, &frhs, ncols)
            .into_iter()
            .map(S::from_f64)
            .collect())
    }
}

/// `σ_max / σ_min` over the singular values above the rank cutoff; `1.0` for
/// the zero matrix. A rough sensitivity gauge for diagnostics.
pub fn float_condition_estimate(rows: &[Vec<f64>], ncols: usize) -> f64 {
    let sv = singular_values(rows, ncols);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 1.0;
    }
    let cutoff = FLOAT_RANK_CUTOFF * smax;
    let smin = sv
        .iter()
        .cloned()
        .filter(|&s| s > cutoff)
        .fold(f64::INFINITY, f64::min);
    smax / smin
}

/// Scales a rational vector to coprime integers with a positive leading
/// nonzero entry. The zero vector passes through unchanged.
pub fn normalize_primitive(v: &[BigRational]) -> Vec<BigRational> {
    let mut lcm = BigInt::one();
    for q in v {
        if !q.is_zero() {
            lcm = lcm.lcm(q.denom());
        }
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = g.gcd(i);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    if ints
        .iter()
        .find(|i| !i.is_zero())
        .map(|i| i.is_negative())
        .unwrap_or(false)
    {
        g = -g;
    }
    ints.into_iter()
        .map(|i| BigRational::from_integer(i / &g))
        .collect()
}

// ---------------------------------------------------------------------------
// Exact path.

/// Multiplies each row by the least common denominator of its entries.
fn clear_denominators(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for q in row {
                if !q.is_zero() {
                    lcm = lcm.lcm(q.denom());
                }
            }
            row.iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        })
        .collect()
}

/// Fraction-free echelon form with column pivoting. Returns the transformed
/// matrix and the pivot columns; the row space is preserved and every pivot
/// row has zeros left of its pivot column. The divisions are exact by the
/// Sylvester identity underlying the Bareiss scheme.
fn bareiss_echelon(mut m: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        for i in row + 1..nrows {
            for j in col + 1..ncols {
                let num = &m[row][col] * &m[i][j] - &m[i][col] * &m[row][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                m[i][j] = num / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        pivot_cols.push(col);
        row += 1;
    }
    (m, pivot_cols)
}

fn exact_rank_kernel(
    rows: &[Vec<BigRational>],
    ncols: usize,
) -> (usize, Option<Vec<BigRational>>) {
    debug_assert!(rows.iter().all(|r| r.len() == ncols));
    let (ech, pivots) = bareiss_echelon(clear_denominators(rows));
    let rank = pivots.len();
    if rank == ncols {
        return (rank, None);
    }
    // Free the first non-pivot column, zero the rest, back-substitute.
    let free = (0..ncols)
        .find(|c| !pivots.contains(c))
        .expect("rank < ncols leaves a free column");
    let mut x = vec![BigRational::zero(); ncols];
    x[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = BigRational::zero();
        for j in pc + 1..ncols {
            if !x[j].is_zero() && !ech[r][j].is_zero() {
                acc = acc + BigRational::from_integer(ech[r][j].clone()) * x[j].clone();
            }
        }
        x[pc] = -acc / BigRational::from_integer(ech[r][pc].clone());
    }
    (rank, Some(normalize_primitive(&x)))
}

fn exact_solve(
    rows: &[Vec<BigRational>],
    rhs: &[BigRational],
) -> Result<Vec<BigRational>, LinalgError> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (ech, pivots) = bareiss_echelon(clear_denominators(&aug));
    if pivots.iter().any(|&c| c == ncols) {
        // A pivot in the right-hand-side column means some row reads
        // 0 = nonzero.
        return Err(LinalgError::Inconsistent);
    }
    if rows.is_empty() {
        if rhs.iter().any(|b| !b.is_zero()) {
            return Err(LinalgError::Inconsistent);
        }
        return Ok(Vec::new());
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = BigRational::from_integer(ech[r][ncols].clone());
        for j in pc + 1..ncols {
            if !x[j].is_zero() && !ech[r][j].is_zero() {
                acc = acc - BigRational::from_integer(ech[r][j].clone()) * x[j].clone();
            }
        }
        x[pc] = acc / BigRational::from_integer(ech[r][pc].clone());
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Float path.

/// Builds the (zero-padded) nalgebra matrix: at least `ncols` rows so the
/// thin SVD carries a complete set of right singular vectors.
fn padded_matrix(rows: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    let nrows = rows.len().max(ncols).max(1);
    let mut m = DMatrix::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), ncols);
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    m
}

fn singular_values(rows: &[Vec<f64>], ncols: usize) -> Vec<f64> {
    if ncols == 0 {
        return Vec::new();
    }
    padded_matrix(rows, ncols)
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect()
}

fn float_rank_kernel(rows: &[Vec<f64>], ncols: usize) -> (usize, Option<Vec<f64>>) {
    if ncols == 0 {
        return (0, None);
    }
    let svd = padded_matrix(rows, ncols).svd(false, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = FLOAT_RANK_CUTOFF * smax;
    let rank = sv.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    if rank == ncols {
        return (rank, None);
    }
    let v_t = svd.v_t.expect("requested right singular vectors");
    let idx = (0..sv.len())
        .min_by(|&a, &b| sv[a].partial_cmp(&sv[b]).expect("finite singular values"))
        .expect("ncols >= 1");
    let mut kernel: Vec<f64> = (0..ncols).map(|j| v_t[(idx, j)]).collect();
    // Deterministic sign: largest-magnitude entry positive.
    let lead = kernel
        .iter()
        .cloned()
        .fold(0.0_f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if lead < 0.0 {
        for v in &mut kernel {
            *v = -*v;
        }
    }
    (rank, Some(kernel))
}

/// Minimum-norm solve through a Householder QR of the transpose: with
/// `Aᵀ = QR` one has `A = RᵀQᵀ`, so a forward substitution on `Rᵀ` followed
/// by `x = Qz` lands in the row space of `A` — the minimum-norm solution
/// whenever `A` has full row rank. (The SVD route is avoided on purpose:
/// its factorisation loses digits on some wide evaluation matrices.)
/// Near-zero diagonal entries are skipped, which degrades gracefully to a
/// basic solution on rank-deficient input.
fn float_min_norm_solve(rows: &[Vec<f64>], rhs: &[f64], ncols: usize) -> Vec<f64> {
    if ncols == 0 {
        return Vec::new();
    }
    let m = rows.len();
    let mut at = DMatrix::zeros(ncols, m.max(1));
    for (i, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), ncols);
        for (j, v) in row.iter().enumerate() {
            at[(j, i)] = *v;
        }
    }
    let qr = at.qr();
    let q = qr.q(); // ncols × k
    let r = qr.r(); // k × m, upper triangular
    let k = r.nrows();
    let dmax = (0..k.min(m)).fold(0.0_f64, |acc, i| acc.max(r[(i, i)].abs()));
    let cutoff = FLOAT_RANK_CUTOFF * dmax;
    // Forward substitution on Rᵀ z = b over the usable diagonal.
    let mut z = vec![0.0_f64; k];
    for i in 0..k.min(m) {
        let partial: f64 = (0..i).map(|l| r[(l, i)] * z[l]).sum();
        if r[(i, i)].abs() > cutoff {
            z[i] = (rhs[i] - partial) / r[(i, i)];
        }
    }
    let mut x = vec![0.0_f64; ncols];
    for j in 0..ncols {
        x[j] = (0..k).map(|l| q[(j, l)] * z[l]).sum();
    }
    x
}
