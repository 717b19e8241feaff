//! Infeasible-start primal-dual interior-point method on real symmetric
//! blocks, using the dual-scaled (HKM) search direction with a Mehrotra
//! predictor-corrector step.
//!
//! Internal convention: minimize <C, X> subject to <A_i, X> = b_i and
//! X PSD per block; the dual maximizes b'y subject to sum_i y_i A_i + Z = C
//! with Z PSD. The Schur complement is assembled one column at a time from
//! the sparse row supports, so memory stays at O(m^2 + n^2).

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::scalar::FactorScalar;

use super::real::{RealForm, RealRow};

pub(super) struct IpmOptions<T> {
    pub feas_tol: T,
    pub gap_tol: T,
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum IpmStatus {
    Converged,
    Stalled,
    IterLimit,
    /// `y` holds a certificate: b'y = 1 and sum y_i A_i has no positive part.
    PrimalRay,
    /// `x` holds an improving ray: A(x) = 0, <C, x> = -1, x PSD.
    DualRay,
}

pub(super) struct IpmOutput<T: FactorScalar> {
    pub status: IpmStatus,
    pub x: Vec<DMatrix<T>>,
    pub y: Vec<T>,
    pub iterations: usize,
}

fn fmax<T: FactorScalar>(a: T, b: T) -> T {
    num_traits::Float::max(a, b)
}

fn fabs<T: FactorScalar>(a: T) -> T {
    num_traits::Float::abs(a)
}

fn sym<T: FactorScalar>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::c(0.5)
}

/// tr(A row . M) for symmetric M given as-is.
fn row_dot<T: FactorScalar>(row: &RealRow<T>, mats: &[DMatrix<T>]) -> T {
    let mut acc = T::zero();
    for (b, entries) in &row.blocks {
        let m = &mats[*b];
        for &(i, j, v) in entries {
            acc += v * m[(j as usize, i as usize)];
        }
    }
    acc
}

/// tr(A row . sym(M)) without materializing the symmetric part.
fn row_dot_sym<T: FactorScalar>(row: &RealRow<T>, mats: &[DMatrix<T>]) -> T {
    let half = T::c(0.5);
    let mut acc = T::zero();
    for (b, entries) in &row.blocks {
        let m = &mats[*b];
        for &(i, j, v) in entries {
            acc += v * (m[(j as usize, i as usize)] + m[(i as usize, j as usize)]) * half;
        }
    }
    acc
}

fn a_apply<T: FactorScalar>(rows: &[RealRow<T>], x: &[DMatrix<T>]) -> Vec<T> {
    rows.iter().map(|r| row_dot(r, x)).collect()
}

fn at_apply<T: FactorScalar>(rows: &[RealRow<T>], y: &[T], dims: &[usize]) -> Vec<DMatrix<T>> {
    let mut out: Vec<DMatrix<T>> = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    for (r, row) in rows.iter().enumerate() {
        let w = y[r];
        if w == T::zero() {
            continue;
        }
        for (b, entries) in &row.blocks {
            let m = &mut out[*b];
            for &(i, j, v) in entries {
                m[(i as usize, j as usize)] += w * v;
            }
        }
    }
    out
}

/// Largest step a with base + a*delta staying PSD, via the generalized
/// eigenvalues of delta against the Cholesky factor of base.
fn max_step<T: FactorScalar>(l: &DMatrix<T>, delta: &DMatrix<T>) -> T {
    let y = l
        .solve_lower_triangular(delta)
        .expect("Cholesky factor is nonsingular");
    let w = l
        .solve_lower_triangular(&y.transpose())
        .expect("Cholesky factor is nonsingular")
        .transpose();
    let eig = SymmetricEigen::new(sym(&w));
    let lmin = eig
        .eigenvalues
        .iter()
        .fold(T::infinity(), |a, &v| num_traits::Float::min(a, v));
    if lmin >= -T::c(1e-14) {
        T::infinity()
    } else {
        -T::one() / lmin
    }
}

fn lambda_min<T: FactorScalar>(m: &DMatrix<T>) -> T {
    SymmetricEigen::new(sym(m))
        .eigenvalues
        .iter()
        .fold(T::infinity(), |a, &v| num_traits::Float::min(a, v))
}

fn lambda_max<T: FactorScalar>(m: &DMatrix<T>) -> T {
    SymmetricEigen::new(sym(m))
        .eigenvalues
        .iter()
        .fold(T::neg_infinity(), |a, &v| num_traits::Float::max(a, v))
}

struct Stats<T> {
    pobj: T,
    dobj: T,
    pinf: T,
    dinf: T,
    relgap: T,
    mu: T,
    rd: Vec<DMatrix<T>>,
}

fn stats<T: FactorScalar>(
    form: &RealForm<T>,
    x: &[DMatrix<T>],
    y: &[T],
    z: &[DMatrix<T>],
    bnorm: T,
    cmax: T,
    n_tot: T,
) -> Stats<T> {
    let pobj = form.c.iter().zip(x.iter()).fold(T::zero(), |a, (c, xb)| a + c.dot(xb));
    let dobj = form.b.iter().zip(y.iter()).fold(T::zero(), |a, (&b, &yv)| a + b * yv);
    let ax = a_apply(&form.rows, x);
    let pinf = form
        .b
        .iter()
        .zip(ax.iter())
        .fold(T::zero(), |a, (&b, &v)| fmax(a, fabs(b - v)))
        / (T::one() + bnorm);
    let aty = at_apply(&form.rows, y, &form.dims);
    let rd: Vec<DMatrix<T>> = form
        .c
        .iter()
        .zip(aty.iter().zip(z.iter()))
        .map(|(c, (g, zb))| c - g - zb)
        .collect();
    let dinf = rd
        .iter()
        .fold(T::zero(), |a, m| m.iter().fold(a, |acc, &v| fmax(acc, fabs(v))))
        / (T::one() + cmax);
    let relgap = fabs(pobj - dobj) / (T::one() + fabs(pobj) + fabs(dobj));
    let mu = x.iter().zip(z.iter()).fold(T::zero(), |a, (xb, zb)| a + xb.dot(zb)) / n_tot;
    Stats { pobj, dobj, pinf, dinf, relgap, mu, rd }
}

/// Lower Cholesky factor computed panel by panel, with the trailing update
/// tiled through gemm so large Schur systems run at matrix-multiply speed.
fn blocked_cholesky<T: FactorScalar>(mut a: DMatrix<T>) -> Option<DMatrix<T>> {
    let n = a.nrows();
    let nb = 64;
    let tile = 256;
    let mut k = 0;
    while k < n {
        let b = nb.min(n - k);
        let rows = n - k;
        // Unblocked panel factorization on a contiguous column-major copy.
        let mut panel: Vec<T> = Vec::with_capacity(rows * b);
        for j in 0..b {
            panel.extend(a.view((k, k + j), (rows, 1)).iter().copied());
        }
        for j in 0..b {
            for q in 0..j {
                let f = panel[q * rows + j];
                if f != T::zero() {
                    let (left, right) = panel.split_at_mut(j * rows);
                    let colq = &left[q * rows + j..q * rows + rows];
                    let colj = &mut right[j..rows];
                    for (cj, &cq) in colj.iter_mut().zip(colq) {
                        *cj -= f * cq;
                    }
                }
            }
            let d = panel[j * rows + j];
            if d <= T::zero() || !num_traits::Float::is_finite(d) {
                return None;
            }
            let l = num_traits::Float::sqrt(d);
            let inv = T::one() / l;
            panel[j * rows + j] = l;
            for v in panel[j * rows + j + 1..(j + 1) * rows].iter_mut() {
                *v *= inv;
            }
        }
        for j in 0..b {
            for i in j..rows {
                a[(k + i, k + j)] = panel[j * rows + i];
            }
        }
        // Trailing update A22 -= L21 L21^T, tiled to bound temporaries.
        let start = k + b;
        let mut jb = start;
        while jb < n {
            let jl = tile.min(n - jb);
            let mut ib = jb;
            while ib < n {
                let il = tile.min(n - ib);
                let prod = a.view((ib, k), (il, b)) * a.view((jb, k), (jl, b)).transpose();
                for jj in 0..jl {
                    for ii in 0..il {
                        if ib + ii >= jb + jj {
                            a[(ib + ii, jb + jj)] -= prod[(ii, jj)];
                        }
                    }
                }
                ib += il;
            }
            jb += jl;
        }
        k += b;
    }
    for j in 1..n {
        for i in 0..j {
            a[(i, j)] = T::zero();
        }
    }
    Some(a)
}

/// Solves `L L^T v = rhs` by column-oriented forward and back substitution.
fn chol_solve<T: FactorScalar>(l: &DMatrix<T>, rhs: &DVector<T>) -> DVector<T> {
    let n = rhs.len();
    let mut v = rhs.clone();
    for j in 0..n {
        v[j] /= l[(j, j)];
        let wj = v[j];
        for i in j + 1..n {
            v[i] -= l[(i, j)] * wj;
        }
    }
    for j in (0..n).rev() {
        let mut s = v[j];
        for i in j + 1..n {
            s -= l[(i, j)] * v[i];
        }
        v[j] = s / l[(j, j)];
    }
    v
}

fn solve_with_refinement<T: FactorScalar>(l: &DMatrix<T>, m: &DMatrix<T>, rhs: &[T]) -> Vec<T> {
    let r0 = DVector::from_column_slice(rhs);
    let mut sol = chol_solve(l, &r0);
    let resid = &r0 - m * &sol;
    sol += chol_solve(l, &resid);
    sol.iter().copied().collect()
}

pub(super) fn solve<T: FactorScalar>(form: &RealForm<T>, opts: &IpmOptions<T>) -> IpmOutput<T> {
    let dims = &form.dims;
    let m_rows = form.rows.len();
    let n_tot_usize: usize = dims.iter().sum();
    let n_tot = T::from_usize(n_tot_usize).expect("dimension fits the scalar type");
    let bnorm = form.b.iter().fold(T::zero(), |a, &v| fmax(a, fabs(v)));
    let cmax = form
        .c
        .iter()
        .fold(T::zero(), |a, c| c.iter().fold(a, |acc, &v| fmax(acc, fabs(v))));

    // Per-row, per-block sorted support (distinct row indices of the entries).
    let supports: Vec<Vec<Vec<u32>>> = form
        .rows
        .iter()
        .map(|r| {
            r.blocks
                .iter()
                .map(|(_, entries)| {
                    let mut s: Vec<u32> = entries.iter().map(|e| e.0).collect();
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect()
        })
        .collect();
    let mut rows_by_block: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dims.len()];
    for (r, row) in form.rows.iter().enumerate() {
        for (slot, (b, _)) in row.blocks.iter().enumerate() {
            rows_by_block[*b].push((r, slot));
        }
    }

    let beta_p = T::c(10.0) * (T::one() + bnorm);
    let beta_d = T::c(10.0) * (T::one() + cmax);
    let mut x: Vec<DMatrix<T>> = dims.iter().map(|&d| DMatrix::identity(d, d) * beta_p).collect();
    let mut z: Vec<DMatrix<T>> = dims.iter().map(|&d| DMatrix::identity(d, d) * beta_d).collect();
    let mut y: Vec<T> = vec![T::zero(); m_rows];

    let mut best_merit = T::infinity();
    let mut best_iter = 0usize;
    let finish = |status: IpmStatus, x: Vec<DMatrix<T>>, y: Vec<T>, it: usize| IpmOutput {
        status,
        x,
        y,
        iterations: it,
    };

    let mut iter = 0usize;
    loop {
        let st = stats(form, &x, &y, &z, bnorm, cmax, n_tot);
        if st.pinf <= opts.feas_tol && st.dinf <= opts.feas_tol && st.relgap <= opts.gap_tol {
            return finish(IpmStatus::Converged, x, y, iter);
        }
        if iter >= opts.max_iter {
            return finish(IpmStatus::IterLimit, x, y, iter);
        }

        // Divergence certificates.
        if iter >= 8 && st.dobj > T::one() && st.pinf > opts.feas_tol {
            let ynorm = y.iter().fold(T::zero(), |a, &v| fmax(a, fabs(v)));
            let yhat: Vec<T> = y.iter().map(|&v| v / st.dobj).collect();
            let g = at_apply(&form.rows, &yhat, dims);
            let ok = g
                .iter()
                .all(|gb| lambda_max(gb) <= T::c(1e-9) * (T::one() + ynorm / st.dobj));
            if ok {
                return finish(IpmStatus::PrimalRay, x, yhat, iter);
            }
        }
        if st.pobj < -T::c(1e7) * (T::one() + bnorm) {
            let scale = T::one() / fabs(st.pobj);
            let xhat: Vec<DMatrix<T>> = x.iter().map(|xb| xb * scale).collect();
            let axn = a_apply(&form.rows, &xhat)
                .iter()
                .fold(T::zero(), |a, &v| fmax(a, fabs(v)));
            if axn <= T::c(1e-7) && xhat.iter().all(|xb| lambda_min(xb) >= -T::c(1e-9)) {
                return finish(IpmStatus::DualRay, xhat, y, iter);
            }
        }

        let merit = fmax(fmax(st.pinf, st.dinf), st.relgap);
        if merit < best_merit * T::c(0.9999) {
            best_merit = merit;
            best_iter = iter;
        } else if iter > best_iter + 12 || st.mu < T::c(1e-15) {
            return finish(IpmStatus::Stalled, x, y, iter);
        }

        // Factorizations of the current iterate.
        let mut chol_z = Vec::with_capacity(z.len());
        for zb in &z {
            match Cholesky::new(zb.clone()) {
                Some(c) => chol_z.push(c),
                None => return finish(IpmStatus::Stalled, x, y, iter),
            }
        }
        let mut chol_x = Vec::with_capacity(x.len());
        for xb in &x {
            match Cholesky::new(xb.clone()) {
                Some(c) => chol_x.push(c),
                None => return finish(IpmStatus::Stalled, x, y, iter),
            }
        }
        let zinv: Vec<DMatrix<T>> = chol_z.iter().map(|c| c.inverse()).collect();
        let lx: Vec<DMatrix<T>> = chol_x.iter().map(|c| c.l()).collect();
        let lz: Vec<DMatrix<T>> = chol_z.iter().map(|c| c.l()).collect();

        // Schur complement, assembled column by column.
        let mut schur = DMatrix::<T>::zeros(m_rows, m_rows);
        for j in 0..m_rows {
            for (slot, (b, entries)) in form.rows[j].blocks.iter().enumerate() {
                let sup = &supports[j][slot];
                let r = sup.len();
                let d = dims[*b];
                let mut p = DMatrix::<T>::zeros(r, d);
                for &(i, col, v) in entries {
                    let pos = sup.binary_search(&i).expect("entry row is in support");
                    for t in 0..d {
                        p[(pos, t)] += v * x[*b][(col as usize, t)];
                    }
                }
                let mut zs = DMatrix::<T>::zeros(d, r);
                for (k, &srow) in sup.iter().enumerate() {
                    for t in 0..d {
                        zs[(t, k)] = zinv[*b][(t, srow as usize)];
                    }
                }
                let tj = zs * p;
                for &(i_row, slot_i) in &rows_by_block[*b] {
                    let (_, e_i) = &form.rows[i_row].blocks[slot_i];
                    let mut acc = T::zero();
                    for &(a, c, v) in e_i {
                        acc += v * tj[(c as usize, a as usize)];
                    }
                    schur[(i_row, j)] += acc;
                }
            }
        }
        schur = sym(&schur);

        let mean_diag = schur.diagonal().iter().fold(T::zero(), |a, &v| a + v)
            / T::from_usize(m_rows.max(1)).expect("row count fits the scalar type");
        let mut reg = T::zero();
        let chol_m = loop {
            let mut trial = schur.clone();
            if reg > T::zero() {
                for k in 0..m_rows {
                    trial[(k, k)] += reg;
                }
            }
            match blocked_cholesky(trial) {
                Some(c) => break Some(c),
                None => {
                    reg = if reg == T::zero() {
                        T::c(1e-13) * (T::one() + fabs(mean_diag))
                    } else {
                        reg * T::c(100.0)
                    };
                    if reg > T::c(1e-3) * (T::one() + fabs(mean_diag)) {
                        break None;
                    }
                }
            }
        };
        let Some(chol_m) = chol_m else {
            return finish(IpmStatus::Stalled, x, y, iter);
        };

        // Shared pieces: H1 = Z^-1 Rd X, A(Z^-1).
        let h1: Vec<DMatrix<T>> = (0..dims.len())
            .map(|b| &zinv[b] * &st.rd[b] * &x[b])
            .collect();
        let azinv: Vec<T> = form.rows.iter().map(|r| row_dot(r, &zinv)).collect();
        let ah1: Vec<T> = form.rows.iter().map(|r| row_dot_sym(r, &h1)).collect();

        // Predictor (affine scaling) direction.
        let rhs_aff: Vec<T> = (0..m_rows).map(|i| form.b[i] + ah1[i]).collect();
        let dy_aff = solve_with_refinement(&chol_m, &schur, &rhs_aff);
        let g_aff = at_apply(&form.rows, &dy_aff, dims);
        let dz_aff: Vec<DMatrix<T>> = (0..dims.len()).map(|b| &st.rd[b] - &g_aff[b]).collect();
        let dx_aff: Vec<DMatrix<T>> = (0..dims.len())
            .map(|b| -&x[b] - sym(&h1[b]) + sym(&(&zinv[b] * &g_aff[b] * &x[b])))
            .collect();
        let ap_aff = dims
            .iter()
            .enumerate()
            .fold(T::one(), |a, (b, _)| num_traits::Float::min(a, max_step(&lx[b], &dx_aff[b])));
        let ad_aff = dims
            .iter()
            .enumerate()
            .fold(T::one(), |a, (b, _)| num_traits::Float::min(a, max_step(&lz[b], &dz_aff[b])));
        let mu_aff = (0..dims.len()).fold(T::zero(), |a, b| {
            a + (&x[b] + &dx_aff[b] * ap_aff).dot(&(&z[b] + &dz_aff[b] * ad_aff))
        }) / n_tot;
        let ratio = fmax(mu_aff, T::zero()) / st.mu;
        let sigma = num_traits::Float::min(T::one(), fmax(ratio * ratio * ratio, T::c(1e-10)));

        // Corrector direction.
        let h2: Vec<DMatrix<T>> = (0..dims.len())
            .map(|b| &zinv[b] * &dz_aff[b] * &dx_aff[b])
            .collect();
        let smu = sigma * st.mu;
        let rhs: Vec<T> = (0..m_rows)
            .map(|i| form.b[i] - smu * azinv[i] + ah1[i] + row_dot_sym(&form.rows[i], &h2))
            .collect();
        let dy = solve_with_refinement(&chol_m, &schur, &rhs);
        let g = at_apply(&form.rows, &dy, dims);
        let dz: Vec<DMatrix<T>> = (0..dims.len()).map(|b| &st.rd[b] - &g[b]).collect();
        let dx: Vec<DMatrix<T>> = (0..dims.len())
            .map(|b| {
                &zinv[b] * smu - &x[b] - sym(&h1[b]) - sym(&h2[b]) + sym(&(&zinv[b] * &g[b] * &x[b]))
            })
            .collect();

        let loose = fmax(fmax(st.pinf, st.dinf), st.mu / (T::one() + fabs(st.pobj)));
        let tau = if loose < T::c(1e-3) { T::c(0.98) } else { T::c(0.9) };
        let mut ap = num_traits::Float::min(
            T::one(),
            tau * dims
                .iter()
                .enumerate()
                .fold(T::infinity(), |a, (b, _)| num_traits::Float::min(a, max_step(&lx[b], &dx[b]))),
        );
        let mut ad = num_traits::Float::min(
            T::one(),
            tau * dims
                .iter()
                .enumerate()
                .fold(T::infinity(), |a, (b, _)| num_traits::Float::min(a, max_step(&lz[b], &dz[b]))),
        );

        // Fallback shrink if rounding pushed an update off the cone.
        let mut ok = false;
        for _ in 0..12 {
            let xn: Vec<DMatrix<T>> = (0..dims.len()).map(|b| &x[b] + &dx[b] * ap).collect();
            let zn: Vec<DMatrix<T>> = (0..dims.len()).map(|b| &z[b] + &dz[b] * ad).collect();
            let x_ok = xn.iter().all(|m| Cholesky::new(m.clone()).is_some());
            let z_ok = zn.iter().all(|m| Cholesky::new(m.clone()).is_some());
            if x_ok && z_ok {
                x = xn;
                z = zn;
                for (yi, &d) in y.iter_mut().zip(dy.iter()) {
                    *yi += ad * d;
                }
                ok = true;
                break;
            }
            if !x_ok {
                ap *= T::c(0.8);
            }
            if !z_ok {
                ad *= T::c(0.8);
            }
        }
        if !ok {
            return finish(IpmStatus::Stalled, x, y, iter);
        }
        iter += 1;
    }
}
