//! Reduction of a block problem to pure PSD equality form.
//!
//! Three passes: Gauss-Jordan elimination of free scalars (pivot rows become
//! definitions of the eliminated variables), row normalization, and removal
//! of linearly dependent rows via a pivoted Cholesky of the row Gram matrix.
//! Every row operation is recorded in an explicit transform so multipliers
//! and infeasibility certificates can be mapped back to the caller's rows.

use crate::linalg::SparseHerm;
use crate::scalar::Scalar;

use super::SdpError;

/// Relative pivot threshold for treating a free-variable coefficient as zero.
const FREE_PIVOT_TOL: f64 = 1e-12;
/// Residual diagonal of the row Gram matrix (unit-norm rows) below which a
/// row counts as linearly dependent.
const RANK_DROP_TOL: f64 = 1e-12;
/// Right-hand-side mismatch on a dependent row that flags inconsistency.
const RHS_CONSISTENCY_TOL: f64 = 1e-8;
/// Largest pairwise inner product of unit rows that still counts as an
/// orthogonal family, letting rank reduction skip its cubic factorization.
const ORTHO_SKIP_TOL: f64 = 1e-12;

/// Row in internal form: merged PSD coefficients sorted by block index plus
/// a dense free-variable segment.
#[derive(Clone, Debug)]
pub(super) struct InternalRow<T: Scalar> {
    pub psd: Vec<(usize, SparseHerm<T>)>,
    pub free: Vec<T>,
    pub rhs: T,
}

/// Eliminated pivot row: defines free variable `var` through
/// `alpha * u_var = rhs - <psd, X>` and carries multiplier `y`.
#[derive(Clone, Debug)]
pub(super) struct Pivot<T: Scalar> {
    pub pos: usize,
    pub var: usize,
    pub alpha: T,
    pub psd: Vec<(usize, SparseHerm<T>)>,
    pub rhs: T,
    pub y: T,
}

/// Outcome of presolve short of running the interior-point method.
pub(super) enum Presolve<T: Scalar> {
    Reduced(Reduced<T>),
    /// Certificate over the original rows: sum_i y_i rhs_i = 1 while
    /// sum_i y_i A_i = 0 and the free coefficients cancel.
    Infeasible { farkas: Vec<T> },
    /// Improving ray purely in the free variables (minimization sense).
    Unbounded { free_ray: Vec<T> },
}

pub(super) struct Reduced<T: Scalar> {
    /// Scaled, independent, PSD-only rows fed to the interior-point method.
    pub kept: Vec<InternalRow<T>>,
    /// Position of each kept row in the eliminated full list.
    pub kept_pos: Vec<usize>,
    /// Objective after substituting eliminated free variables.
    pub c_psd: Vec<SparseHerm<T>>,
    pub pivots: Vec<Pivot<T>>,
    /// Eliminated row i as a sparse combination of original rows.
    pub transform: Vec<Vec<(usize, T)>>,
}

/// Adds `w * src` into a sparse index/value combination kept sorted by index.
fn combo_add<T: Scalar>(dst: &mut Vec<(usize, T)>, src: &[(usize, T)], w: T) {
    for &(j, v) in src {
        match dst.binary_search_by_key(&j, |e| e.0) {
            Ok(k) => dst[k].1 += v * w,
            Err(k) => dst.insert(k, (j, v * w)),
        }
    }
}

/// Scatters `w * combo` into a dense length-`m` vector.
fn combo_scatter<T: Scalar>(combo: &[(usize, T)], m: usize, w: T) -> Vec<T> {
    let mut out = vec![T::zero(); m];
    for &(j, v) in combo {
        out[j] = v * w;
    }
    out
}

fn row_add_assign<T: Scalar>(dst: &mut Vec<(usize, SparseHerm<T>)>, src: &[(usize, SparseHerm<T>)], w: T) {
    for (b, h) in src {
        match dst.binary_search_by_key(b, |e| e.0) {
            Ok(k) => dst[k].1.add_assign(h, w),
            Err(k) => dst.insert(k, (*b, h.clone().scale(w))),
        }
    }
}

fn row_scale<T: Scalar>(row: &mut InternalRow<T>, s: T) {
    for (_, h) in row.psd.iter_mut() {
        let scaled = h.clone().scale(s);
        *h = scaled;
    }
    for f in row.free.iter_mut() {
        *f *= s;
    }
    row.rhs *= s;
}

fn row_norm<T: Scalar>(psd: &[(usize, SparseHerm<T>)]) -> T {
    let sq = psd
        .iter()
        .fold(T::zero(), |acc, (_, h)| acc + h.frobenius_norm() * h.frobenius_norm());
    num_traits::Float::sqrt(sq)
}

/// Inner product of two PSD row segments (block-index merge join).
pub(super) fn row_inner<T: Scalar>(a: &[(usize, SparseHerm<T>)], b: &[(usize, SparseHerm<T>)]) -> T {
    let (mut i, mut j) = (0, 0);
    let mut acc = T::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1.inner_sparse(&b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

pub(super) fn run<T: Scalar>(
    mut rows: Vec<InternalRow<T>>,
    mut c_psd: Vec<SparseHerm<T>>,
    c_free: Vec<T>,
) -> Result<Presolve<T>, SdpError> {
    let m = rows.len();
    let n_free = c_free.len();
    let mut transform: Vec<Vec<(usize, T)>> = (0..m).map(|i| vec![(i, T::one())]).collect();

    // Free-variable elimination (Gauss-Jordan with full pivoting).
    let mut pivots: Vec<Pivot<T>> = Vec::new();
    let mut var_pivoted = vec![false; n_free];
    let mut row_pivoted = vec![false; m];
    if n_free > 0 {
        let scale0 = rows
            .iter()
            .flat_map(|r| r.free.iter())
            .fold(T::zero(), |a, &f| num_traits::Float::max(a, num_traits::Float::abs(f)));
        let pivot_tol = scale0 * T::c(FREE_PIVOT_TOL);
        loop {
            let mut best = T::zero();
            let mut at: Option<(usize, usize)> = None;
            for (r, row) in rows.iter().enumerate() {
                if row_pivoted[r] {
                    continue;
                }
                for (v, &f) in row.free.iter().enumerate() {
                    if !var_pivoted[v] && num_traits::Float::abs(f) > best {
                        best = num_traits::Float::abs(f);
                        at = Some((r, v));
                    }
                }
            }
            let Some((r, v)) = at else { break };
            if best <= pivot_tol {
                break;
            }
            let alpha = rows[r].free[v];
            let pivot_row = rows[r].clone();
            let pivot_transform = transform[r].clone();
            for s in 0..m {
                if s == r {
                    continue;
                }
                let f = rows[s].free[v];
                if f == T::zero() {
                    continue;
                }
                let w = -(f / alpha);
                row_add_assign(&mut rows[s].psd, &pivot_row.psd, w);
                for k in 0..n_free {
                    let d = pivot_row.free[k] * w;
                    rows[s].free[k] += d;
                }
                rows[s].free[v] = T::zero();
                rows[s].rhs += pivot_row.rhs * w;
                combo_add(&mut transform[s], &pivot_transform, w);
            }
            row_pivoted[r] = true;
            var_pivoted[v] = true;
            pivots.push(Pivot { pos: r, var: v, alpha, psd: Vec::new(), rhs: T::zero(), y: T::zero() });
        }
        // Clear sub-threshold leftovers from dependent free columns.
        for row in rows.iter_mut() {
            for f in row.free.iter_mut() {
                if num_traits::Float::abs(*f) <= pivot_tol {
                    *f = T::zero();
                }
            }
        }
    }

    // Unbounded check: a never-pivoted free variable with a surviving
    // objective coefficient rides an unconstrained direction.
    let c_scale = c_free
        .iter()
        .fold(T::one(), |a, &c| num_traits::Float::max(a, num_traits::Float::abs(c)));
    for v in 0..n_free {
        if !var_pivoted[v] && num_traits::Float::abs(c_free[v]) > c_scale * T::c(1e-12) {
            let mut free_ray = vec![T::zero(); n_free];
            free_ray[v] = -num_traits::Float::signum(c_free[v]);
            return Ok(Presolve::Unbounded { free_ray });
        }
    }

    // Substitute pivot definitions into the objective.
    for p in pivots.iter_mut() {
        p.psd = rows[p.pos].psd.clone();
        p.rhs = rows[p.pos].rhs;
        p.alpha = rows[p.pos].free[p.var];
        let t = c_free[p.var] / p.alpha;
        p.y = t;
        if t != T::zero() {
            for (b, h) in &p.psd {
                c_psd[*b].add_assign(h, -t);
            }
        }
    }

    // Normalize the surviving rows; empty rows must have matching rhs.
    let mut candidates: Vec<usize> = Vec::new();
    for r in 0..m {
        if row_pivoted[r] {
            continue;
        }
        let norm = row_norm(&rows[r].psd);
        if norm <= T::c(1e-14) {
            if num_traits::Float::abs(rows[r].rhs) > T::c(1e-10) {
                let w = T::one() / rows[r].rhs;
                return Ok(Presolve::Infeasible { farkas: combo_scatter(&transform[r], m, w) });
            }
            continue;
        }
        let s = T::one() / norm;
        row_scale(&mut rows[r], s);
        for (_, t) in transform[r].iter_mut() {
            *t *= s;
        }
        candidates.push(r);
    }

    // Rank reduction: pivoted Cholesky of the Gram matrix of unit rows.
    // Network-style row families are pairwise orthogonal; detect that with a
    // streamed pass and skip the cubic factorization when it holds.
    let k = candidates.len();
    let mut orthogonal = true;
    'ortho: for i in 0..k {
        for j in 0..i {
            let g = row_inner(&rows[candidates[i]].psd, &rows[candidates[j]].psd);
            if num_traits::Float::abs(g) > T::c(ORTHO_SKIP_TOL) {
                orthogonal = false;
                break 'ortho;
            }
        }
    }
    if orthogonal {
        let kept: Vec<InternalRow<T>> = candidates.iter().map(|&r| rows[r].clone()).collect();
        return Ok(Presolve::Reduced(Reduced { kept, kept_pos: candidates, c_psd, pivots, transform }));
    }
    let mut gram = vec![vec![T::zero(); k]; k];
    for i in 0..k {
        for j in 0..=i {
            let g = row_inner(&rows[candidates[i]].psd, &rows[candidates[j]].psd);
            gram[i][j] = g;
            gram[j][i] = g;
        }
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut diag: Vec<T> = (0..k).map(|i| gram[i][i]).collect();
    let mut low = vec![vec![T::zero(); k]; k];
    let mut rank = k;
    for j in 0..k {
        let p = (j..k)
            .max_by(|&a, &b| {
                diag[perm[a]]
                    .partial_cmp(&diag[perm[b]])
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        perm.swap(j, p);
        let pj = perm[j];
        if diag[pj] <= T::c(RANK_DROP_TOL) {
            rank = j;
            break;
        }
        low[pj][j] = num_traits::Float::sqrt(diag[pj]);
        for t in (j + 1)..k {
            let pi = perm[t];
            let mut s = gram[pi][pj];
            for q in 0..j {
                s -= low[pi][q] * low[pj][q];
            }
            low[pi][j] = s / low[pj][j];
            diag[pi] -= low[pi][j] * low[pi][j];
        }
    }

    // Dependent rows must be consistent with the combination that spans them.
    for t in rank..k {
        let pd = perm[t];
        // Solve L_kk^T beta = l_d over the kept triangle.
        let mut beta = vec![T::zero(); rank];
        for j in (0..rank).rev() {
            let mut s = low[pd][j];
            for q in (j + 1)..rank {
                s -= low[perm[q]][j] * beta[q];
            }
            beta[j] = s / low[perm[j]][j];
        }
        let rhs_pred = (0..rank).fold(T::zero(), |a, j| a + beta[j] * rows[candidates[perm[j]]].rhs);
        let rhs_d = rows[candidates[pd]].rhs;
        let miss = rhs_d - rhs_pred;
        if num_traits::Float::abs(miss) > T::c(RHS_CONSISTENCY_TOL) * (T::one() + num_traits::Float::abs(rhs_d)) {
            let w = T::one() / miss;
            let mut farkas = combo_scatter(&transform[candidates[pd]], m, w);
            for j in 0..rank {
                for &(idx, tr) in &transform[candidates[perm[j]]] {
                    farkas[idx] -= beta[j] * tr * w;
                }
            }
            return Ok(Presolve::Infeasible { farkas });
        }
    }

    let mut kept_idx: Vec<usize> = (0..rank).map(|j| candidates[perm[j]]).collect();
    kept_idx.sort_unstable();
    let kept: Vec<InternalRow<T>> = kept_idx.iter().map(|&r| rows[r].clone()).collect();
    Ok(Presolve::Reduced(Reduced { kept, kept_pos: kept_idx, c_psd, pivots, transform }))
}
