//! End-to-end solve: validation, presolve, real form, interior point, and
//! translation of the raw iterate into user-facing certificates.

use num_complex::Complex;

use crate::linalg::{eigh, psd_margin, CMatrix, HermitianOperator, SparseHerm};
use crate::scalar::FactorScalar;

use super::ipm::{self, IpmOptions, IpmStatus};
use super::presolve::{self, InternalRow, Presolve, Reduced};
use super::problem::{Block, BlockValue, Coeff, SdpProblem, SdpSolution, SdpStatus, SolveOptions};
use super::{real, SdpError};

struct BlockMap {
    psd_of: Vec<Option<usize>>,
    free_of: Vec<Option<usize>>,
    psd_dims: Vec<usize>,
}

fn block_map(blocks: &[Block]) -> BlockMap {
    let mut psd_of = vec![None; blocks.len()];
    let mut free_of = vec![None; blocks.len()];
    let mut psd_dims = Vec::new();
    let mut n_free = 0usize;
    for (i, b) in blocks.iter().enumerate() {
        match b {
            Block::Psd { dim } => {
                psd_of[i] = Some(psd_dims.len());
                psd_dims.push(*dim);
            }
            Block::Free => {
                free_of[i] = Some(n_free);
                n_free += 1;
            }
        }
    }
    BlockMap { psd_of, free_of, psd_dims }
}

/// Canonical complex data in the user's sense: merged per-block coefficients.
struct UserData<T: FactorScalar> {
    psd_rows: Vec<Vec<(usize, SparseHerm<T>)>>,
    free_rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    c_psd: Vec<SparseHerm<T>>,
    c_free: Vec<T>,
    n_free: usize,
}

fn canon_parts<T: FactorScalar>(
    coeffs: &[(usize, Coeff<T>)],
    map: &BlockMap,
    n_free: usize,
) -> (Vec<(usize, SparseHerm<T>)>, Vec<T>) {
    let mut psd: Vec<(usize, SparseHerm<T>)> = Vec::new();
    let mut free = vec![T::zero(); n_free];
    for (b, c) in coeffs {
        match c {
            Coeff::Herm(h) => {
                let p = map.psd_of[*b].expect("validated psd coefficient");
                match psd.binary_search_by_key(&p, |e| e.0) {
                    Ok(k) => psd[k].1.add_assign(h, T::one()),
                    Err(k) => psd.insert(k, (p, h.clone())),
                }
            }
            Coeff::Scalar(s) => {
                let f = map.free_of[*b].expect("validated free coefficient");
                free[f] += *s;
            }
        }
    }
    (psd, free)
}

fn build_user<T: FactorScalar>(problem: &SdpProblem<T>, map: &BlockMap) -> UserData<T> {
    let n_free = map.free_of.iter().filter(|f| f.is_some()).count();
    let (obj_psd, c_free) = canon_parts(&problem.objective, map, n_free);
    let mut c_psd: Vec<SparseHerm<T>> = map.psd_dims.iter().map(|&d| SparseHerm::zero(d)).collect();
    for (p, h) in obj_psd {
        c_psd[p].add_assign(&h, T::one());
    }
    let mut psd_rows = Vec::with_capacity(problem.rows.len());
    let mut free_rows = Vec::with_capacity(problem.rows.len());
    let mut rhs = Vec::with_capacity(problem.rows.len());
    for row in &problem.rows {
        let (p, f) = canon_parts(&row.coeffs, map, n_free);
        psd_rows.push(p);
        free_rows.push(f);
        rhs.push(row.rhs);
    }
    UserData { psd_rows, free_rows, rhs, c_psd, c_free, n_free }
}

fn eval_row<T: FactorScalar>(user: &UserData<T>, i: usize, xs: &[CMatrix<T>], u: &[T]) -> T {
    let mut acc = user.psd_rows[i]
        .iter()
        .fold(T::zero(), |a, (p, h)| a + h.inner(&xs[*p]));
    for (f, &c) in user.free_rows[i].iter().enumerate() {
        acc += c * u[f];
    }
    acc
}

fn eval_objective<T: FactorScalar>(user: &UserData<T>, xs: &[CMatrix<T>], u: &[T]) -> T {
    let mut acc = user
        .c_psd
        .iter()
        .zip(xs.iter())
        .fold(T::zero(), |a, (h, x)| a + h.inner(x));
    for (c, &uv) in user.c_free.iter().zip(u.iter()) {
        acc += *c * uv;
    }
    acc
}

/// Dual slack per PSD block in the user's sense; PSD at optimality.
fn user_slacks<T: FactorScalar>(
    problem: &SdpProblem<T>,
    user: &UserData<T>,
    y: &[T],
) -> Result<Vec<HermitianOperator<T>>, SdpError> {
    let s_dir = if problem.maximize { T::one() } else { -T::one() };
    let mut out = Vec::with_capacity(user.c_psd.len());
    for (p, c) in user.c_psd.iter().enumerate() {
        let dim = c.dim();
        let mut acc = CMatrix::<T>::zeros(dim, dim);
        for (i, parts) in user.psd_rows.iter().enumerate() {
            if y[i] == T::zero() {
                continue;
            }
            if let Ok(k) = parts.binary_search_by_key(&p, |e| e.0) {
                parts[k].1.accumulate(&mut acc, y[i]);
            }
        }
        c.accumulate(&mut acc, -T::one());
        let slack = acc.symmetrized().scale_re(s_dir);
        out.push(HermitianOperator::new(slack).map_err(SdpError::Linalg)?);
    }
    Ok(out)
}

fn fmax<T: FactorScalar>(a: T, b: T) -> T {
    num_traits::Float::max(a, b)
}

fn fabs<T: FactorScalar>(a: T) -> T {
    num_traits::Float::abs(a)
}

struct Packaged<T: FactorScalar> {
    primal: Vec<BlockValue<T>>,
    dual_slacks: Vec<BlockValue<T>>,
    value: T,
    primal_residual: T,
    dual_residual: T,
    gap: T,
}

fn package<T: FactorScalar>(
    problem: &SdpProblem<T>,
    map: &BlockMap,
    user: &UserData<T>,
    xs: &[CMatrix<T>],
    u: &[T],
    y: &[T],
) -> Result<Packaged<T>, SdpError> {
    let value = eval_objective(user, xs, u);
    let mut primal_residual = T::zero();
    for i in 0..user.rhs.len() {
        primal_residual = fmax(primal_residual, fabs(eval_row(user, i, xs, u) - user.rhs[i]));
    }
    let slacks = user_slacks(problem, user, y)?;
    let mut dual_residual = slacks
        .iter()
        .fold(T::zero(), |a, s| fmax(a, fmax(T::zero(), -psd_margin(s))));
    for f in 0..user.n_free {
        let paired = user
            .free_rows
            .iter()
            .zip(y.iter())
            .fold(T::zero(), |a, (fr, &yi)| a + fr[f] * yi);
        dual_residual = fmax(dual_residual, fabs(paired - user.c_free[f]));
    }
    let dual_value = user.rhs.iter().zip(y.iter()).fold(T::zero(), |a, (&r, &yi)| a + r * yi);
    let gap = fabs(value - dual_value);

    let mut primal = Vec::with_capacity(problem.blocks.len());
    let mut dual_slacks = Vec::with_capacity(problem.blocks.len());
    for (b, _) in problem.blocks.iter().enumerate() {
        if let Some(p) = map.psd_of[b] {
            primal.push(BlockValue::Herm(
                HermitianOperator::new(xs[p].symmetrized()).map_err(SdpError::Linalg)?,
            ));
            dual_slacks.push(BlockValue::Herm(slacks[p].clone()));
        } else {
            let f = map.free_of[b].expect("block is psd or free");
            primal.push(BlockValue::Scalar(u[f]));
            dual_slacks.push(BlockValue::Scalar(T::zero()));
        }
    }
    Ok(Packaged { primal, dual_slacks, value, primal_residual, dual_residual, gap })
}

/// Multipliers on the original rows from a reduced-space vector.
fn lift_multipliers<T: FactorScalar>(red: &Reduced<T>, y_reduced: &[T], m_orig: usize) -> Vec<T> {
    let mut y_full = vec![T::zero(); m_orig];
    for (k, &pos) in red.kept_pos.iter().enumerate() {
        y_full[pos] = y_reduced[k];
    }
    for p in &red.pivots {
        y_full[p.pos] = p.y;
    }
    let mut y_orig = vec![T::zero(); m_orig];
    for (i, row) in red.transform.iter().enumerate() {
        if y_full[i] == T::zero() {
            continue;
        }
        for &(j, t) in row {
            y_orig[j] += y_full[i] * t;
        }
    }
    y_orig
}

fn infeasible_solution<T: FactorScalar>(
    problem: &SdpProblem<T>,
    map: &BlockMap,
    user: &UserData<T>,
    y_cert: Vec<T>,
) -> Result<SdpSolution<T>, SdpError> {
    let scale = user
        .rhs
        .iter()
        .zip(y_cert.iter())
        .fold(T::zero(), |a, (&r, &y)| a + r * y);
    if fabs(scale) < T::c(1e-300) {
        return Err(SdpError::Numerical("degenerate infeasibility certificate".into()));
    }
    let y: Vec<T> = y_cert.iter().map(|&v| v / scale).collect();
    // Separating slack: -sum_i y_i A_i per PSD block, PSD up to tolerance.
    let mut dual_slacks = Vec::with_capacity(problem.blocks.len());
    let mut primal = Vec::with_capacity(problem.blocks.len());
    let mut dual_residual = T::zero();
    for (b, block) in problem.blocks.iter().enumerate() {
        if let Some(p) = map.psd_of[b] {
            let Block::Psd { dim } = block else { unreachable!() };
            let mut acc = CMatrix::<T>::zeros(*dim, *dim);
            for (i, parts) in user.psd_rows.iter().enumerate() {
                if let Ok(k) = parts.binary_search_by_key(&p, |e| e.0) {
                    parts[k].1.accumulate(&mut acc, -y[i]);
                }
            }
            let sep = HermitianOperator::new(acc.symmetrized()).map_err(SdpError::Linalg)?;
            dual_residual = fmax(dual_residual, fmax(T::zero(), -psd_margin(&sep)));
            dual_slacks.push(BlockValue::Herm(sep));
            primal.push(BlockValue::Herm(HermitianOperator::zeros(*dim)));
        } else {
            dual_slacks.push(BlockValue::Scalar(T::zero()));
            primal.push(BlockValue::Scalar(T::zero()));
        }
    }
    let value = if problem.maximize { T::neg_infinity() } else { T::infinity() };
    Ok(SdpSolution {
        status: SdpStatus::PrimalInfeasible,
        value,
        primal,
        dual_multipliers: y,
        dual_slacks,
        primal_residual: T::infinity(),
        dual_residual,
        gap: T::infinity(),
        iterations: 0,
    })
}

fn unbounded_solution<T: FactorScalar>(
    problem: &SdpProblem<T>,
    map: &BlockMap,
    user: &UserData<T>,
    ray_xs: Vec<CMatrix<T>>,
    ray_u: Vec<T>,
) -> Result<SdpSolution<T>, SdpError> {
    let v = eval_objective(user, &ray_xs, &ray_u);
    if fabs(v) < T::c(1e-300) {
        return Err(SdpError::Numerical("degenerate unboundedness certificate".into()));
    }
    let s = T::one() / fabs(v);
    let mut ray_norm = T::zero();
    for i in 0..user.rhs.len() {
        ray_norm = fmax(ray_norm, fabs(eval_row(user, i, &ray_xs, &ray_u)) * s);
    }
    let mut primal = Vec::with_capacity(problem.blocks.len());
    let mut dual_slacks = Vec::with_capacity(problem.blocks.len());
    for (b, block) in problem.blocks.iter().enumerate() {
        if let Some(p) = map.psd_of[b] {
            let Block::Psd { dim } = block else { unreachable!() };
            primal.push(BlockValue::Herm(
                HermitianOperator::new(ray_xs[p].scale_re(s).symmetrized()).map_err(SdpError::Linalg)?,
            ));
            dual_slacks.push(BlockValue::Herm(HermitianOperator::zeros(*dim)));
        } else {
            let f = map.free_of[b].expect("block is psd or free");
            primal.push(BlockValue::Scalar(ray_u[f] * s));
            dual_slacks.push(BlockValue::Scalar(T::zero()));
        }
    }
    let value = if problem.maximize { T::infinity() } else { T::neg_infinity() };
    Ok(SdpSolution {
        status: SdpStatus::DualInfeasible,
        value,
        primal,
        dual_multipliers: vec![T::zero(); user.rhs.len()],
        dual_slacks,
        primal_residual: ray_norm,
        dual_residual: T::infinity(),
        gap: T::infinity(),
        iterations: 0,
    })
}

/// Solves the problem to the requested tolerances.
pub fn solve<T: FactorScalar>(
    problem: &SdpProblem<T>,
    opts: &SolveOptions<T>,
) -> Result<SdpSolution<T>, SdpError> {
    problem.validate()?;
    let map = block_map(&problem.blocks);
    let user = build_user(problem, &map);
    let sign = if problem.maximize { -T::one() } else { T::one() };
    let m_orig = user.rhs.len();

    let rows: Vec<InternalRow<T>> = (0..m_orig)
        .map(|i| InternalRow {
            psd: user.psd_rows[i].clone(),
            free: user.free_rows[i].clone(),
            rhs: user.rhs[i],
        })
        .collect();
    let c_psd_int: Vec<SparseHerm<T>> = user.c_psd.iter().map(|h| h.clone().scale(sign)).collect();
    let c_free_int: Vec<T> = user.c_free.iter().map(|&c| c * sign).collect();

    let red = match presolve::run(rows, c_psd_int, c_free_int)? {
        Presolve::Infeasible { farkas } => return infeasible_solution(problem, &map, &user, farkas),
        Presolve::Unbounded { free_ray } => {
            let ray_xs: Vec<CMatrix<T>> = map.psd_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
            return unbounded_solution(problem, &map, &user, ray_xs, free_ray);
        }
        Presolve::Reduced(r) => r,
    };

    // No surviving rows: optimize over the bare cone.
    if red.kept.is_empty() {
        for (p, c) in red.c_psd.iter().enumerate() {
            let h = HermitianOperator::new(c.to_dense().symmetrized()).map_err(SdpError::Linalg)?;
            let spec = eigh(&h);
            let scale = fmax(T::one(), h.max_abs());
            if spec.min() < -T::c(1e-9) * scale {
                let dim = h.dim();
                let v: Vec<Complex<T>> = (0..dim).map(|r| spec.vectors[(r, 0)]).collect();
                let ray = HermitianOperator::projector(&v);
                let mut ray_xs: Vec<CMatrix<T>> =
                    map.psd_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
                ray_xs[p] = ray.mat().clone();
                let mut ray_u = vec![T::zero(); user.n_free];
                for piv in &red.pivots {
                    let w = piv.psd.iter().fold(T::zero(), |a, (b, hh)| a + hh.inner(&ray_xs[*b]));
                    ray_u[piv.var] = -w / piv.alpha;
                }
                return unbounded_solution(problem, &map, &user, ray_xs, ray_u);
            }
        }
        let xs: Vec<CMatrix<T>> = map.psd_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
        let mut u = vec![T::zero(); user.n_free];
        for piv in &red.pivots {
            let w = piv.psd.iter().fold(T::zero(), |a, (b, hh)| a + hh.inner(&xs[*b]));
            u[piv.var] = (piv.rhs - w) / piv.alpha;
        }
        let y_user: Vec<T> = lift_multipliers(&red, &[], m_orig).iter().map(|&v| v * sign).collect();
        let pack = package(problem, &map, &user, &xs, &u, &y_user)?;
        return Ok(SdpSolution {
            status: SdpStatus::Optimal,
            value: pack.value,
            primal: pack.primal,
            dual_multipliers: y_user,
            dual_slacks: pack.dual_slacks,
            primal_residual: pack.primal_residual,
            dual_residual: pack.dual_residual,
            gap: pack.gap,
            iterations: 0,
        });
    }

    let form = real::build(&map.psd_dims, &red.kept, &red.c_psd);
    let out = ipm::solve(
        &form,
        &IpmOptions { feas_tol: opts.feas_tol, gap_tol: opts.gap_tol, max_iter: opts.max_iter },
    );

    match out.status {
        IpmStatus::PrimalRay => {
            let y_orig = lift_multipliers(&red, &out.y, m_orig);
            infeasible_solution(problem, &map, &user, y_orig)
        }
        IpmStatus::DualRay => {
            let ray_xs: Vec<CMatrix<T>> = (0..map.psd_dims.len())
                .map(|p| real::unembed(&out.x[p], map.psd_dims[p], form.embedded))
                .collect();
            let mut ray_u = vec![T::zero(); user.n_free];
            for piv in &red.pivots {
                let w = piv.psd.iter().fold(T::zero(), |a, (b, hh)| a + hh.inner(&ray_xs[*b]));
                ray_u[piv.var] = -w / piv.alpha;
            }
            unbounded_solution(problem, &map, &user, ray_xs, ray_u)
        }
        IpmStatus::Converged | IpmStatus::Stalled | IpmStatus::IterLimit => {
            let xs: Vec<CMatrix<T>> = (0..map.psd_dims.len())
                .map(|p| real::unembed(&out.x[p], map.psd_dims[p], form.embedded))
                .collect();
            let mut u = vec![T::zero(); user.n_free];
            for piv in &red.pivots {
                let w = piv.psd.iter().fold(T::zero(), |a, (b, hh)| a + hh.inner(&xs[*b]));
                u[piv.var] = (piv.rhs - w) / piv.alpha;
            }
            let y_user: Vec<T> =
                lift_multipliers(&red, &out.y, m_orig).iter().map(|&v| v * sign).collect();
            let pack = package(problem, &map, &user, &xs, &u, &y_user)?;

            let rhs_scale = user.rhs.iter().fold(T::one(), |a, &r| fmax(a, fabs(r)));
            let c_scale = user
                .c_psd
                .iter()
                .fold(T::one(), |a, c| fmax(a, c.max_abs()));
            let good = pack.primal_residual <= opts.accept_feas * rhs_scale
                && pack.dual_residual <= opts.accept_feas * c_scale
                && pack.gap <= opts.accept_gap * (T::one() + fabs(pack.value));
            let status = if good { SdpStatus::Optimal } else { SdpStatus::Inaccurate };
            Ok(SdpSolution {
                status,
                value: pack.value,
                primal: pack.primal,
                dual_multipliers: y_user,
                dual_slacks: pack.dual_slacks,
                primal_residual: pack.primal_residual,
                dual_residual: pack.dual_residual,
                gap: pack.gap,
                iterations: out.iterations,
            })
        }
    }
}

/// Re-derives every optimality certificate from the problem data and the
/// returned solution, using dense linear algebra only.
#[derive(Clone, Copy, Debug)]
pub struct CertificateReport<T> {
    pub primal_equality: T,
    pub primal_cone: T,
    pub dual_cone: T,
    pub slack_mismatch: T,
    pub gap: T,
}

impl<T: FactorScalar> CertificateReport<T> {
    pub fn within(&self, tol: T) -> bool {
        self.primal_equality <= tol
            && self.primal_cone <= tol
            && self.dual_cone <= tol
            && self.slack_mismatch <= tol
            && self.gap <= tol
    }
}

pub fn verify_certificates<T: FactorScalar>(
    problem: &SdpProblem<T>,
    sol: &SdpSolution<T>,
) -> Result<CertificateReport<T>, SdpError> {
    problem.validate()?;
    let map = block_map(&problem.blocks);
    let user = build_user(problem, &map);
    if sol.primal.len() != problem.blocks.len() || sol.dual_multipliers.len() != user.rhs.len() {
        return Err(SdpError::BadProblem("solution shape does not match problem".into()));
    }
    let mut xs: Vec<CMatrix<T>> = Vec::with_capacity(map.psd_dims.len());
    let mut u = vec![T::zero(); user.n_free];
    for (b, bv) in sol.primal.iter().enumerate() {
        match (bv, map.psd_of[b], map.free_of[b]) {
            (BlockValue::Herm(h), Some(_), _) => xs.push(h.mat().clone()),
            (BlockValue::Scalar(s), _, Some(f)) => u[f] = *s,
            _ => return Err(SdpError::BadProblem("solution block shape mismatch".into())),
        }
    }
    let y = &sol.dual_multipliers;

    let mut primal_equality = T::zero();
    for i in 0..user.rhs.len() {
        primal_equality = fmax(primal_equality, fabs(eval_row(&user, i, &xs, &u) - user.rhs[i]));
    }
    let mut primal_cone = T::zero();
    for x in &xs {
        let h = HermitianOperator::new(x.symmetrized()).map_err(SdpError::Linalg)?;
        primal_cone = fmax(primal_cone, fmax(T::zero(), -psd_margin(&h)));
    }
    let slacks = user_slacks(problem, &user, y)?;
    let mut dual_cone = slacks
        .iter()
        .fold(T::zero(), |a, s| fmax(a, fmax(T::zero(), -psd_margin(s))));
    for f in 0..user.n_free {
        let paired = user
            .free_rows
            .iter()
            .zip(y.iter())
            .fold(T::zero(), |a, (fr, &yi)| a + fr[f] * yi);
        dual_cone = fmax(dual_cone, fabs(paired - user.c_free[f]));
    }
    let mut slack_mismatch = T::zero();
    let mut p_idx = 0usize;
    for (b, bv) in sol.dual_slacks.iter().enumerate() {
        if map.psd_of[b].is_some() {
            if let BlockValue::Herm(h) = bv {
                slack_mismatch = fmax(slack_mismatch, h.sub(&slacks[p_idx]).max_abs());
            } else {
                return Err(SdpError::BadProblem("slack block shape mismatch".into()));
            }
            p_idx += 1;
        }
    }
    let dual_value = user.rhs.iter().zip(y.iter()).fold(T::zero(), |a, (&r, &yi)| a + r * yi);
    let value = eval_objective(&user, &xs, &u);
    let gap = fmax(fabs(sol.value - value), fabs(value - dual_value));
    Ok(CertificateReport { primal_equality, primal_cone, dual_cone, slack_mismatch, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_psd;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn diag_sparse(d: &[f64]) -> SparseHerm<f64> {
        SparseHerm::from_entries(
            d.len(),
            d.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i as u32, i as u32, c(*v, 0.0)))
                .collect(),
        )
    }

    fn random_herm(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator<f64> {
        let raw = CMatrix::from_fn(dim, dim, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        HermitianOperator::new(raw.symmetrized()).expect("symmetrized matrix is Hermitian")
    }

    fn random_pd(rng: &mut ChaCha8Rng, dim: usize, shift: f64) -> CMatrix<f64> {
        let r = CMatrix::from_fn(dim, dim, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let mut m = r.matmul(&r.dagger());
        for i in 0..dim {
            m[(i, i)] += c(shift, 0.0);
        }
        m
    }

    /// Optimal LP value over {x >= 0, Ax = b} by enumerating basic solutions.
    fn lp_vertex_opt(obj: &[f64], a: &[Vec<f64>], b: &[f64], maximize: bool) -> f64 {
        let n = obj.len();
        let m = b.len();
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            let basis = nalgebra::DMatrix::<f64>::from_fn(m, m, |i, k| a[i][cols[k]]);
            let rhs = nalgebra::DVector::<f64>::from_row_slice(b);
            let Some(sol) = basis.lu().solve(&rhs) else { continue };
            if sol.iter().any(|&v| v < -1e-9) {
                continue;
            }
            let val: f64 = cols.iter().zip(sol.iter()).map(|(&j, &x)| obj[j] * x).sum();
            best = Some(match best {
                None => val,
                Some(cur) => {
                    if maximize {
                        cur.max(val)
                    } else {
                        cur.min(val)
                    }
                }
            });
        }
        best.expect("feasible vertex exists")
    }

    #[test]
    fn diagonal_problems_match_vertex_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = 5;
            let m = 3;
            let x0: Vec<f64> = (0..n).map(|_| 0.2 + rng.gen::<f64>()).collect();
            let mut a: Vec<Vec<f64>> = vec![vec![1.0; n]];
            for _ in 1..m {
                a.push((0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect());
            }
            let b: Vec<f64> = a.iter().map(|row| row.iter().zip(&x0).map(|(r, x)| r * x).sum()).collect();
            let obj: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            for &maximize in &[true, false] {
                let oracle = lp_vertex_opt(&obj, &a, &b, maximize);
                let mut p = SdpProblem::new(vec![Block::Psd { dim: n }], maximize);
                p.set_objective(vec![(0, Coeff::Herm(diag_sparse(&obj)))]);
                for (row, &rhs) in a.iter().zip(&b) {
                    p.push_row(vec![(0, Coeff::Herm(diag_sparse(row)))], rhs);
                }
                let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
                assert_eq!(sol.status, SdpStatus::Optimal, "trial {trial} maximize {maximize}");
                assert!(
                    (sol.value - oracle).abs() < 1e-6,
                    "trial {trial} maximize {maximize}: got {} oracle {oracle}",
                    sol.value
                );
            }
        }
    }

    #[test]
    fn rank_one_objective_real() {
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }], true);
        p.set_objective(vec![(0, Coeff::Herm(diag_sparse(&[1.0, -1.0])))]);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 1.0])))], 1.0);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-7);
        let x = sol.primal[0].herm().expect("psd block");
        assert!((x.mat()[(0, 0)].re - 1.0).abs() < 1e-6);
        let report = verify_certificates(&p, &sol).expect("verification runs");
        assert!(report.within(1e-6), "{report:?}");
    }

    #[test]
    fn rank_one_objective_complex() {
        // Pauli-y style objective forces the complex embedding path.
        let sy = SparseHerm::from_entries(2, vec![(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))]);
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }], true);
        p.set_objective(vec![(0, Coeff::Herm(sy))]);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 1.0])))], 1.0);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-7);
        let x = sol.primal[0].herm().expect("psd block");
        // Optimizer is the +1 eigenprojector of (|0> + i|1>)/sqrt(2).
        assert!((x.mat()[(0, 1)] - c(0.0, -0.5)).norm() < 1e-6);
        assert!(is_psd(sol.dual_slacks[0].herm().expect("psd slack")));
        let report = verify_certificates(&p, &sol).expect("verification runs");
        assert!(report.within(1e-6), "{report:?}");
    }

    #[test]
    fn free_variable_elimination_both_senses() {
        for &(maximize, expect) in &[(false, 0.0), (true, 1.0)] {
            let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }, Block::Free], maximize);
            p.set_objective(vec![(1, Coeff::Scalar(1.0))]);
            p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 1.0])))], 1.0);
            p.push_row(
                vec![(1, Coeff::Scalar(1.0)), (0, Coeff::Herm(diag_sparse(&[-1.0, 0.0])))],
                0.0,
            );
            let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!((sol.value - expect).abs() < 1e-6, "sense {maximize}: {}", sol.value);
            let u = sol.primal[1].scalar().expect("free block");
            let x00 = sol.primal[0].herm().expect("psd block").mat()[(0, 0)].re;
            assert!((u - x00).abs() < 1e-6);
            let report = verify_certificates(&p, &sol).expect("verification runs");
            assert!(report.within(1e-6), "{report:?}");
        }
    }

    #[test]
    fn duplicate_and_zero_rows_are_dropped() {
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 3 }], true);
        p.set_objective(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 2.0, 3.0])))]);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 1.0, 1.0])))], 1.0);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[2.0, 2.0, 2.0])))], 2.0);
        p.push_row(vec![(0, Coeff::Herm(SparseHerm::zero(3)))], 0.0);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 3.0).abs() < 1e-7);
        let report = verify_certificates(&p, &sol).expect("verification runs");
        assert!(report.within(1e-6), "{report:?}");
    }

    #[test]
    fn inconsistent_duplicate_rows_are_infeasible() {
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }], true);
        p.set_objective(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 1.0])))]);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 1.0])))], 1.0);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 1.0])))], 2.0);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::PrimalInfeasible);
        let y = &sol.dual_multipliers;
        let paired = y[0] * 1.0 + y[1] * 2.0;
        assert!((paired - 1.0).abs() < 1e-9);
        // The combination cancels the coefficients exactly.
        assert!((y[0] + y[1]).abs() < 1e-9);
    }

    #[test]
    fn cone_infeasible_rows_detected() {
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }], true);
        p.set_objective(vec![(0, Coeff::Herm(diag_sparse(&[0.0, 1.0])))]);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 0.0])))], -1.0);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[0.0, 1.0])))], 1.0);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::PrimalInfeasible);
        let y = &sol.dual_multipliers;
        let paired = -y[0] + y[1];
        assert!((paired - 1.0).abs() < 1e-6);
        // Separating direction: sum_i y_i A_i has no positive part.
        let combo = diag_sparse(&[1.0, 0.0]).to_dense().scale_re(y[0])
            .add(&diag_sparse(&[0.0, 1.0]).to_dense().scale_re(y[1]));
        let h = HermitianOperator::new(combo.symmetrized()).expect("Hermitian combo");
        assert!(eigh(&h).max() < 1e-6, "lambda_max = {}", eigh(&h).max());
    }

    #[test]
    fn unbounded_objective_detected() {
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }], true);
        p.set_objective(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 0.0])))]);
        p.push_row(vec![(0, Coeff::Herm(diag_sparse(&[0.0, 1.0])))], 1.0);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::DualInfeasible);
        assert!(sol.value.is_infinite() && sol.value > 0.0);
        let ray = sol.primal[0].herm().expect("psd ray");
        assert!(is_psd(ray));
        // Improving direction: objective 1 along the ray, constraints fixed.
        assert!((ray.mat()[(0, 0)].re - 1.0).abs() < 1e-6);
        assert!(ray.mat()[(1, 1)].norm() < 1e-6);
    }

    #[test]
    fn free_direction_unbounded() {
        let mut p = SdpProblem::<f64>::new(vec![Block::Free], true);
        p.set_objective(vec![(0, Coeff::Scalar(2.0))]);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::DualInfeasible);
        let u = sol.primal[0].scalar().expect("free ray");
        assert!((2.0 * u - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_rows_optimum_and_ray() {
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }], false);
        p.set_objective(vec![(0, Coeff::Herm(diag_sparse(&[1.0, 2.0])))]);
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!(sol.value.abs() < 1e-9);

        let mut q = SdpProblem::new(vec![Block::Psd { dim: 2 }], true);
        q.set_objective(vec![(0, Coeff::Herm(diag_sparse(&[1.0, -1.0])))]);
        let sol = solve(&q, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::DualInfeasible);
        let ray = sol.primal[0].herm().expect("psd ray");
        assert!((ray.mat()[(0, 0)].re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_problems_close_gap_and_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..20 {
            let dim = 3;
            let x0 = random_pd(&mut rng, dim, 0.3);
            let obj = random_herm(&mut rng, dim);
            let a: Vec<HermitianOperator<f64>> = (0..3)
                .map(|k| {
                    if k == 0 {
                        HermitianOperator::identity(dim)
                    } else {
                        random_herm(&mut rng, dim)
                    }
                })
                .collect();
            let mut p = SdpProblem::new(vec![Block::Psd { dim }], true);
            p.set_objective(vec![(0, Coeff::Herm(SparseHerm::from_dense(&obj)))]);
            for ai in &a {
                let rhs = ai.mat().inner_re(&x0);
                p.push_row(vec![(0, Coeff::Herm(SparseHerm::from_dense(ai)))], rhs);
            }
            let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
            assert_eq!(sol.status, SdpStatus::Optimal, "trial {trial}");
            assert!(sol.primal_residual < 1e-7, "trial {trial}: pres {}", sol.primal_residual);
            assert!(sol.dual_residual < 1e-7, "trial {trial}: dres {}", sol.dual_residual);
            assert!(sol.gap < 1e-6 * (1.0 + sol.value.abs()), "trial {trial}: gap {}", sol.gap);
            let report = verify_certificates(&p, &sol).expect("verification runs");
            assert!(report.within(1e-6), "trial {trial}: {report:?}");
        }
    }

    #[test]
    fn free_variable_substitution_matches_direct_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let dim = 3;
            let x0 = random_pd(&mut rng, dim, 0.4);
            let obj = random_herm(&mut rng, dim);
            let tie = random_herm(&mut rng, dim);
            let cu = 0.7;
            let beta = 0.3;
            let tr0 = x0.trace().re;

            // Augmented: maximize <obj, X> + cu*u with u = <tie, X> + beta.
            let mut p = SdpProblem::new(vec![Block::Psd { dim }, Block::Free], true);
            p.set_objective(vec![
                (0, Coeff::Herm(SparseHerm::from_dense(&obj))),
                (1, Coeff::Scalar(cu)),
            ]);
            p.push_row(vec![(0, Coeff::Herm(SparseHerm::from_dense(&HermitianOperator::identity(dim))))], tr0);
            p.push_row(
                vec![(1, Coeff::Scalar(1.0)), (0, Coeff::Herm(SparseHerm::from_dense(&tie.scale(-1.0))))],
                beta,
            );
            let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
            assert_eq!(sol.status, SdpStatus::Optimal);

            // Direct: maximize <obj + cu*tie, X> + cu*beta.
            let merged = obj.add(&tie.scale(cu));
            let mut q = SdpProblem::new(vec![Block::Psd { dim }], true);
            q.set_objective(vec![(0, Coeff::Herm(SparseHerm::from_dense(&merged)))]);
            q.push_row(vec![(0, Coeff::Herm(SparseHerm::from_dense(&HermitianOperator::identity(dim))))], tr0);
            let sol2 = solve(&q, &SolveOptions::default()).expect("solver runs");
            assert_eq!(sol2.status, SdpStatus::Optimal);
            assert!(
                (sol.value - (sol2.value + cu * beta)).abs() < 1e-6,
                "augmented {} direct {}",
                sol.value,
                sol2.value + cu * beta
            );
        }
    }

    #[test]
    fn coupled_blocks_share_budget() {
        let mut p = SdpProblem::new(vec![Block::Psd { dim: 2 }, Block::Psd { dim: 2 }], true);
        p.set_objective(vec![
            (0, Coeff::Herm(diag_sparse(&[1.0, 0.0]))),
            (1, Coeff::Herm(diag_sparse(&[0.5, 0.0]))),
        ]);
        p.push_row(
            vec![
                (0, Coeff::Herm(diag_sparse(&[1.0, 1.0]))),
                (1, Coeff::Herm(diag_sparse(&[1.0, 1.0]))),
            ],
            1.0,
        );
        let sol = solve(&p, &SolveOptions::default()).expect("solver runs");
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-7);
        let report = verify_certificates(&p, &sol).expect("verification runs");
        assert!(report.within(1e-6), "{report:?}");
    }
}
