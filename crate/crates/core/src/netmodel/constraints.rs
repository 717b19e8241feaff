//! Affine constraint sets cutting out network classes within the PSD cone.
//!
//! Each builder eliminates the auxiliary operators of its recursive
//! definition, leaving equality rows on the full-space variable only. Rows
//! follow one pattern: pair the variable against `A (x) B`, with `A` running
//! over a traceless basis of one system group, `B` over a full Hermitian
//! basis of a second group, and the identity on the rest. A single
//! inhomogeneous row fixes the trace.

use num_complex::Complex;

use super::labeled::{embed_factors, LabeledOperator};
use super::layout::{Role, SystemLayout};
use super::NetError;
use crate::linalg::{HermitianOperator, SparseHerm};
use crate::scalar::{FactorScalar, Scalar};

/// Maximum number of no-signalling parties the subset enumeration accepts.
pub const MAX_PARTIES: usize = 4;

/// Which network class a constraint set describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    /// Deterministic causally ordered networks (channels with memory).
    Comb,
    /// Normalized duals of combs: single-outcome testers.
    DualComb,
    /// Multi-outcome testers; blocks are the outcome operators.
    Tester,
    /// No-signalling networks over unordered parties.
    NoSig,
    /// Normalized duals of no-signalling networks.
    DualNoSig,
}

/// One equality: `sum_b <coeff_b, X_b> = rhs` with real inner products.
#[derive(Clone, Debug)]
pub struct ConstraintRow<T: Scalar> {
    pub coeffs: Vec<(usize, SparseHerm<T>)>,
    pub rhs: T,
}

/// Equality description of a network class, with a strictly positive
/// feasible point kept as an interior-point seed and sanity witness.
#[derive(Clone, Debug)]
pub struct ConstraintSet<T: Scalar> {
    kind: SetKind,
    layout: SystemLayout,
    n_blocks: usize,
    rows: Vec<ConstraintRow<T>>,
    normalization_index: usize,
    positive_point: Vec<HermitianOperator<T>>,
}

/// Residuals of a candidate point against a constraint set.
#[derive(Clone, Copy, Debug)]
pub struct ValidationReport<T> {
    pub max_equality_residual: T,
    pub min_psd_margin: T,
}

impl<T> ValidationReport<T>
where
    T: PartialOrd + num_traits::Float,
{
    pub fn satisfied(&self, tol: T) -> bool {
        self.max_equality_residual <= tol && self.min_psd_margin >= -tol
    }
}

impl<T: Scalar> ConstraintSet<T> {
    fn build(
        kind: SetKind,
        layout: SystemLayout,
        n_blocks: usize,
        rows: Vec<ConstraintRow<T>>,
        normalization_index: usize,
        positive_point: Vec<HermitianOperator<T>>,
    ) -> Result<Self, NetError> {
        let cs = Self { kind, layout, n_blocks, rows, normalization_index, positive_point };
        let residual = cs.equality_residual_mats(
            &cs.positive_point.iter().map(|h| h.mat().clone()).collect::<Vec<_>>(),
        );
        if residual > T::c(1e-8) {
            return Err(NetError::Internal(format!(
                "seed point violates {:?} rows (residual {residual})",
                cs.kind
            )));
        }
        Ok(cs)
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn rows(&self) -> &[ConstraintRow<T>] {
        &self.rows
    }

    /// Index of the single inhomogeneous (trace) row.
    pub fn normalization_index(&self) -> usize {
        self.normalization_index
    }

    /// Strictly positive feasible point, one operator per block.
    pub fn positive_point(&self) -> &[HermitianOperator<T>] {
        &self.positive_point
    }

    fn equality_residual_mats(&self, blocks: &[crate::linalg::CMatrix<T>]) -> T {
        let mut worst = T::zero();
        for row in &self.rows {
            let mut acc = -row.rhs;
            for (b, g) in &row.coeffs {
                acc += g.inner(&blocks[*b]);
            }
            worst = num_traits::Float::max(worst, num_traits::Float::abs(acc));
        }
        worst
    }

    /// Equality residual only; see [`ConstraintSet::check_point`] for the
    /// full report including positivity.
    pub fn equality_residual(&self, blocks: &[LabeledOperator<T>]) -> Result<T, NetError> {
        let aligned = self.aligned_blocks(blocks)?;
        Ok(self.equality_residual_mats(&aligned))
    }

    fn aligned_blocks(
        &self,
        blocks: &[LabeledOperator<T>],
    ) -> Result<Vec<crate::linalg::CMatrix<T>>, NetError> {
        if blocks.len() != self.n_blocks {
            return Err(NetError::BlockCount { expected: self.n_blocks, found: blocks.len() });
        }
        blocks
            .iter()
            .map(|b| Ok(b.aligned_to(&self.layout)?.mat().clone()))
            .collect()
    }
}

impl<T: FactorScalar> ConstraintSet<T> {
    /// Checks a candidate point: equality residual over all rows and the
    /// smallest eigenvalue over all blocks.
    pub fn check_point(&self, blocks: &[LabeledOperator<T>]) -> Result<ValidationReport<T>, NetError> {
        let aligned = self.aligned_blocks(blocks)?;
        let max_equality_residual = self.equality_residual_mats(&aligned);
        let mut min_psd_margin = T::infinity();
        for m in &aligned {
            let margin = crate::linalg::psd_margin(&HermitianOperator::new_unchecked(m.clone()));
            min_psd_margin = num_traits::Float::min(min_psd_margin, margin);
        }
        Ok(ValidationReport { max_equality_residual, min_psd_margin })
    }

    /// Constraint set of the normalized dual class, on the same layout.
    ///
    /// Optimizing a linear functional over `pre_dual(S)` puts the dual
    /// multipliers of that program inside `S` itself.
    pub fn pre_dual(&self) -> Result<ConstraintSet<T>, NetError> {
        match self.kind {
            SetKind::Comb => dual_comb_constraints(self.layout.clone()),
            SetKind::DualComb => comb_constraints(self.layout.clone()),
            SetKind::NoSig => super::affine::dual_nosig_constraints(self.layout.clone()),
            SetKind::DualNoSig => nosig_constraints(self.layout.clone()),
            SetKind::Tester => Err(NetError::Internal("testers have no pre-dual class".into())),
        }
    }
}

/// Orthonormal Hermitian basis of `Herm(dim)`: diagonal units, then
/// real and imaginary off-diagonal pairs.
pub(crate) fn herm_basis<T: Scalar>(dim: usize) -> Vec<SparseHerm<T>> {
    let mut out = Vec::with_capacity(dim * dim);
    let one = Complex::new(T::one(), T::zero());
    let s = T::c(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..dim as u32 {
        out.push(SparseHerm::from_entries(dim, vec![(i, i, one)]));
    }
    for i in 0..dim as u32 {
        for j in i + 1..dim as u32 {
            out.push(SparseHerm::from_entries(
                dim,
                vec![(i, j, Complex::new(s, T::zero())), (j, i, Complex::new(s, T::zero()))],
            ));
            out.push(SparseHerm::from_entries(
                dim,
                vec![(i, j, Complex::new(T::zero(), s)), (j, i, Complex::new(T::zero(), -s))],
            ));
        }
    }
    out
}

/// Orthonormal basis of the traceless Hermitian subspace (empty for dim 1).
pub(crate) fn traceless_herm_basis<T: Scalar>(dim: usize) -> Vec<SparseHerm<T>> {
    let mut out = Vec::with_capacity(dim * dim - 1);
    let s = T::c(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..dim as u32 {
        for j in i + 1..dim as u32 {
            out.push(SparseHerm::from_entries(
                dim,
                vec![(i, j, Complex::new(s, T::zero())), (j, i, Complex::new(s, T::zero()))],
            ));
            out.push(SparseHerm::from_entries(
                dim,
                vec![(i, j, Complex::new(T::zero(), s)), (j, i, Complex::new(T::zero(), -s))],
            ));
        }
    }
    for l in 1..dim as u32 {
        let norm = T::c(1.0) / num_traits::Float::sqrt(T::c((l * (l + 1)) as f64));
        let mut entries: Vec<(u32, u32, Complex<T>)> =
            (0..l).map(|k| (k, k, Complex::new(norm, T::zero()))).collect();
        entries.push((l, l, Complex::new(-norm * T::c(l as f64), T::zero())));
        out.push(SparseHerm::from_entries(dim, entries));
    }
    out
}

/// One elimination family: rows `<A (x) B (x) I, X> = 0` with `A` traceless
/// on the `traceless` positions and `B` running over the `free` positions.
fn family_rows<T: Scalar>(
    layout: &SystemLayout,
    traceless: &[usize],
    free: &[usize],
    rows: &mut Vec<ConstraintRow<T>>,
) {
    let dims = layout.dims();
    let d_tl = layout.dim_of(traceless);
    if d_tl == 1 {
        return;
    }
    let d_free = layout.dim_of(free);
    for a in traceless_herm_basis::<T>(d_tl) {
        for b in herm_basis::<T>(d_free) {
            let g = embed_factors(&dims, &[(traceless, &a), (free, &b)]);
            rows.push(ConstraintRow { coeffs: vec![(0, g)], rhs: T::zero() });
        }
    }
}

fn norm_row<T: Scalar>(layout: &SystemLayout, rhs: T) -> ConstraintRow<T> {
    ConstraintRow { coeffs: vec![(0, SparseHerm::identity(layout.dim()))], rhs }
}

fn role_dim<T: Scalar>(layout: &SystemLayout, role: Role) -> T {
    T::c(layout.systems().iter().filter(|s| s.role == role).map(|s| s.dim).product::<usize>() as f64)
}

fn prefix_positions(layout: &SystemLayout, step: usize) -> Vec<usize> {
    (0..layout.len()).filter(|&i| layout.systems()[i].step < step).collect()
}

/// Builds the comb (causally ordered network) constraint set.
///
/// For each step `n`, partial-tracing the step-`n` outputs from the marginal
/// on steps `1..=n` must leave the identity on the step-`n` inputs; the rows
/// express exactly that with the later steps traced out, plus the trace row
/// `Tr X = prod(input dims)`.
pub fn comb_constraints<T: Scalar>(layout: SystemLayout) -> Result<ConstraintSet<T>, NetError> {
    let n_steps = layout.n_steps();
    if n_steps == 0 {
        return Err(NetError::BadLayout("comb needs at least one step".into()));
    }
    let mut rows = Vec::new();
    for n in (1..=n_steps).rev() {
        let inputs = layout.step_positions(n, Role::In);
        let free = prefix_positions(&layout, n);
        family_rows(&layout, &inputs, &free, &mut rows);
    }
    rows.push(norm_row(&layout, role_dim::<T>(&layout, Role::In)));
    let normalization_index = rows.len() - 1;
    let d = layout.dim();
    let seed = HermitianOperator::scaled_identity(d, T::one() / role_dim::<T>(&layout, Role::Out));
    ConstraintSet::build(SetKind::Comb, layout, 1, rows, normalization_index, vec![seed])
}

/// Builds the normalized dual-comb constraint set on the same layout.
///
/// Members pair to exactly 1 with every comb under the trace pairing. The
/// elimination runs backwards: stripping the step-`n` outputs must leave an
/// operator proportional to the identity on those outputs.
pub fn dual_comb_constraints<T: Scalar>(layout: SystemLayout) -> Result<ConstraintSet<T>, NetError> {
    let n_steps = layout.n_steps();
    if n_steps == 0 {
        return Err(NetError::BadLayout("dual comb needs at least one step".into()));
    }
    let mut rows = Vec::new();
    for n in (1..=n_steps).rev() {
        let outputs = layout.step_positions(n, Role::Out);
        let mut free = prefix_positions(&layout, n);
        free.extend(layout.step_positions(n, Role::In));
        family_rows(&layout, &outputs, &free, &mut rows);
    }
    rows.push(norm_row(&layout, role_dim::<T>(&layout, Role::Out)));
    let normalization_index = rows.len() - 1;
    let d = layout.dim();
    let seed = HermitianOperator::scaled_identity(d, T::one() / role_dim::<T>(&layout, Role::In));
    ConstraintSet::build(SetKind::DualComb, layout, 1, rows, normalization_index, vec![seed])
}

/// Builds the constraint set of an `n_outcomes`-outcome tester: every
/// dual-comb row applied to the block sum.
pub fn tester_constraints<T: Scalar>(
    layout: SystemLayout,
    n_outcomes: usize,
) -> Result<ConstraintSet<T>, NetError> {
    if n_outcomes == 0 {
        return Err(NetError::BadLayout("tester needs at least one outcome".into()));
    }
    let dual = dual_comb_constraints::<T>(layout.clone())?;
    let rows = dual
        .rows
        .iter()
        .map(|row| {
            let (_, g) = &row.coeffs[0];
            ConstraintRow {
                coeffs: (0..n_outcomes).map(|b| (b, g.clone())).collect(),
                rhs: row.rhs,
            }
        })
        .collect();
    let seed = dual.positive_point[0].scale(T::one() / T::c(n_outcomes as f64));
    ConstraintSet::build(
        SetKind::Tester,
        layout,
        n_outcomes,
        rows,
        dual.normalization_index,
        vec![seed; n_outcomes],
    )
}

/// Builds the no-signalling constraint set; parties are the layout steps.
///
/// For every nonempty party subset, discarding the subset's outputs must
/// decouple its inputs. Subsets are enumerated exhaustively, so the party
/// count is capped at [`MAX_PARTIES`].
pub fn nosig_constraints<T: Scalar>(layout: SystemLayout) -> Result<ConstraintSet<T>, NetError> {
    let k = layout.n_steps();
    if k == 0 {
        return Err(NetError::BadLayout("no-signalling set needs at least one party".into()));
    }
    if k > MAX_PARTIES {
        return Err(NetError::TooManyParties { found: k });
    }
    let mut rows = Vec::new();
    for subset in 1u32..(1 << k) {
        let in_subset = |step: usize| subset >> (step - 1) & 1 == 1;
        let inputs: Vec<usize> = (0..layout.len())
            .filter(|&i| layout.systems()[i].role == Role::In && in_subset(layout.systems()[i].step))
            .collect();
        let free: Vec<usize> =
            (0..layout.len()).filter(|&i| !in_subset(layout.systems()[i].step)).collect();
        family_rows(&layout, &inputs, &free, &mut rows);
    }
    rows.push(norm_row(&layout, role_dim::<T>(&layout, Role::In)));
    let normalization_index = rows.len() - 1;
    let d = layout.dim();
    let seed = HermitianOperator::scaled_identity(d, T::one() / role_dim::<T>(&layout, Role::Out));
    ConstraintSet::build(SetKind::NoSig, layout, 1, rows, normalization_index, vec![seed])
}

pub(crate) fn dual_nosig_from_parts<T: Scalar>(
    layout: SystemLayout,
    rows: Vec<ConstraintRow<T>>,
    normalization_index: usize,
) -> Result<ConstraintSet<T>, NetError> {
    let d = layout.dim();
    let seed = HermitianOperator::scaled_identity(d, T::one() / role_dim::<T>(&layout, Role::In));
    ConstraintSet::build(SetKind::DualNoSig, layout, 1, rows, normalization_index, vec![seed])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::netmodel::layout::SystemInfo;
    use crate::netmodel::link_product;
    use num_complex::Complex;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = CMatrix<f64>;
    type Op = LabeledOperator<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> M {
        let m = M::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = crate::linalg::HermitianOperator::new(m.add(&m.dagger()).scale_re(0.5)).unwrap();
        crate::linalg::eigh(&h).vectors
    }

    /// Choi of an isometry channel `V: in -> out`, on layout (out, in).
    fn isometry_choi(rng: &mut ChaCha8Rng, d_in: usize, d_out: usize) -> M {
        assert!(d_out >= d_in);
        let u = random_unitary(rng, d_out);
        let mut v = M::zeros(d_out * d_in, 1);
        for i in 0..d_out {
            for j in 0..d_in {
                v[(i * d_in + j, 0)] = u[(i, j)];
            }
        }
        crate::linalg::HermitianOperator::dyad(v.data()).into_mat()
    }

    /// Random two-step comb on `chain(d, labels)` via a memory channel:
    /// step 1 is an isometry into out1 (x) memory, step 2 contracts the
    /// memory with a second isometry and traces its environment.
    fn random_comb2(rng: &mut ChaCha8Rng, d: usize, labels: [&str; 4]) -> Op {
        let d_mem = d;
        let step1 = isometry_choi(rng, d, d * d_mem);
        let l1 = SystemLayout::new(vec![
            SystemInfo::new(labels[1], d, Role::Out, 1),
            SystemInfo::new("mem", d_mem, Role::Out, 1),
            SystemInfo::new(labels[0], d, Role::In, 1),
        ])
        .unwrap();
        let c1 = Op::from_matrix(l1, step1).unwrap();

        let step2 = isometry_choi(rng, d * d_mem, d * d);
        let l2 = SystemLayout::new(vec![
            SystemInfo::new(labels[3], d, Role::Out, 1),
            SystemInfo::new("env", d, Role::Out, 1),
            SystemInfo::new("mem", d_mem, Role::In, 1),
            SystemInfo::new(labels[2], d, Role::In, 1),
        ])
        .unwrap();
        let c2 = Op::from_matrix(l2, step2).unwrap().partial_trace(&["env"]).unwrap();

        let comb = link_product(&c1, &c2).unwrap();
        comb.permuted(&[labels[0], labels[1], labels[2], labels[3]]).unwrap()
    }

    #[test]
    fn comb_row_counts_match_codimension() {
        let layout = SystemLayout::chain(2, &["0", "1", "2", "3"]).unwrap();
        let comb = comb_constraints::<f64>(layout.clone()).unwrap();
        // Step 2: 3 traceless x 16 prefix basis; step 1: 3 x 1; trace row.
        assert_eq!(comb.rows().len(), 48 + 3 + 1);
        assert_eq!(comb.normalization_index(), comb.rows().len() - 1);

        let dual = dual_comb_constraints::<f64>(layout).unwrap();
        // Step 2: 3 traceless x 64; step 1: 3 x 4; trace row.
        assert_eq!(dual.rows().len(), 192 + 12 + 1);
    }

    #[test]
    fn random_combs_satisfy_comb_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let labels = ["0", "1", "2", "3"];
        let layout = SystemLayout::chain(2, &labels).unwrap();
        let cs = comb_constraints::<f64>(layout).unwrap();
        for _ in 0..5 {
            let comb = random_comb2(&mut rng, 2, labels);
            let report = cs.check_point(std::slice::from_ref(&comb)).unwrap();
            assert!(report.max_equality_residual < 1e-9, "residual {}", report.max_equality_residual);
            assert!(report.min_psd_margin > -1e-9);
        }
    }

    #[test]
    fn comb_rows_reject_non_combs() {
        // A product of two states is normalized but signals backwards.
        let layout = SystemLayout::chain(2, &["0", "1", "2", "3"]).unwrap();
        let cs = comb_constraints::<f64>(layout.clone()).unwrap();
        let mut m = M::zeros(16, 16);
        m[(0, 0)] = c(4.0, 0.0);
        let op = Op::from_matrix(layout, m).unwrap();
        let report = cs.check_point(std::slice::from_ref(&op)).unwrap();
        assert!(report.max_equality_residual > 0.1);
    }

    #[test]
    fn single_step_dual_comb_is_state_tensor_identity() {
        let layout = SystemLayout::chain(2, &["in", "out"]).unwrap();
        let cs = dual_comb_constraints::<f64>(layout.clone()).unwrap();
        assert_eq!(cs.rows().len(), 13);

        let mut rho = M::zeros(2, 2);
        rho[(0, 0)] = c(0.25, 0.0);
        rho[(1, 1)] = c(0.75, 0.0);
        rho[(0, 1)] = c(0.1, 0.2);
        rho[(1, 0)] = c(0.1, -0.2);
        let gamma = crate::linalg::kron(&rho, &M::identity(2));
        let op = Op::from_matrix(layout.clone(), gamma).unwrap();
        assert!(cs.equality_residual(std::slice::from_ref(&op)).unwrap() < 1e-12);

        // rho (x) sigma with sigma far from the identity is not a dual comb.
        let mut sigma = M::identity(2);
        sigma[(1, 1)] = c(3.0, 0.0);
        let bad = Op::from_matrix(layout, crate::linalg::kron(&rho, &sigma)).unwrap();
        assert!(cs.equality_residual(std::slice::from_ref(&bad)).unwrap() > 0.1);
    }

    #[test]
    fn dual_comb_pairs_to_one_with_random_combs() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let labels = ["0", "1", "2", "3"];
        let layout = SystemLayout::chain(2, &labels).unwrap();

        // Gamma = rho_0 (x) I_1 (x) C^T-free choice: a simple product tester
        // rho on "0", identity on "1", measure-and-reprepare on ("2","3").
        let mut rho = M::zeros(2, 2);
        rho[(0, 0)] = c(0.5, 0.0);
        rho[(1, 1)] = c(0.5, 0.0);
        rho[(0, 1)] = c(0.0, 0.3);
        rho[(1, 0)] = c(0.0, -0.3);
        let mut e = M::zeros(4, 4);
        // E on ("2","3") = sum_k |k><k| (x) I / ... must satisfy Tr_3-free
        // dual condition; take E = |0><0| (x) I.
        e[(0, 0)] = c(1.0, 0.0);
        e[(1, 1)] = c(1.0, 0.0);
        let gamma_m =
            crate::linalg::kron(&crate::linalg::kron(&rho, &M::identity(2)), &e);
        let gamma = Op::from_matrix(layout.clone(), gamma_m).unwrap();
        let cs = dual_comb_constraints::<f64>(layout).unwrap();
        assert!(cs.equality_residual(std::slice::from_ref(&gamma)).unwrap() < 1e-12);

        for _ in 0..5 {
            let comb = random_comb2(&mut rng, 2, labels);
            let pairing = gamma.mat().matmul(comb.mat()).trace().re;
            assert!((pairing - 1.0).abs() < 1e-9, "pairing {pairing}");
        }
    }

    #[test]
    fn tester_rows_constrain_block_sum() {
        let layout = SystemLayout::chain(2, &["in", "out"]).unwrap();
        let cs = tester_constraints::<f64>(layout.clone(), 2).unwrap();
        assert_eq!(cs.n_blocks(), 2);

        // Projective measurement preceded by a fixed state: T_k = rho^T (x) P_k.
        let mut rho = M::identity(2);
        rho = rho.scale_re(0.5);
        let mut p0 = M::zeros(2, 2);
        p0[(0, 0)] = c(1.0, 0.0);
        let mut p1 = M::zeros(2, 2);
        p1[(1, 1)] = c(1.0, 0.0);
        let t0 = Op::from_matrix(layout.clone(), crate::linalg::kron(&rho, &p0)).unwrap();
        let t1 = Op::from_matrix(layout, crate::linalg::kron(&rho, &p1)).unwrap();
        let report = cs.check_point(&[t0.clone(), t1.clone()]).unwrap();
        assert!(report.satisfied(1e-10));
        // A lone block does not sum to a dual comb.
        assert!(cs.equality_residual(&[t0.clone(), t0]).is_ok());
        let bad = cs.equality_residual(&[t1.clone(), t1]).unwrap();
        assert!(bad > 0.1);
    }

    #[test]
    fn no_signalling_sits_inside_combs_of_either_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let labels = ["0", "1", "2", "3"];
        let layout = SystemLayout::chain(2, &labels).unwrap();
        let nosig = nosig_constraints::<f64>(layout.clone()).unwrap();

        // A memory comb signals from step 1 to step 2, so it cannot be
        // no-signalling; the reverse inclusion is checked below.
        let comb = random_comb2(&mut rng, 2, labels);
        assert!(nosig.equality_residual(std::slice::from_ref(&comb)).unwrap() > 1e-3);

        // A product of independent channels is no-signalling, and passes
        // the comb rows for both orderings of the parties.
        let d_prod = {
            let mut a = isometry_choi(&mut rng, 2, 2);
            a = crate::linalg::permute_systems(&a, &[2, 2], &[1, 0]).unwrap();
            let mut b = isometry_choi(&mut rng, 2, 2);
            b = crate::linalg::permute_systems(&b, &[2, 2], &[1, 0]).unwrap();
            Op::from_matrix(layout.clone(), crate::linalg::kron(&a, &b)).unwrap()
        };
        assert!(nosig.equality_residual(std::slice::from_ref(&d_prod)).unwrap() < 1e-10);
        let comb_12 = comb_constraints::<f64>(layout.clone()).unwrap();
        assert!(comb_12.equality_residual(std::slice::from_ref(&d_prod)).unwrap() < 1e-10);
        let layout_21 = SystemLayout::new(vec![
            SystemInfo::new("0", 2, Role::In, 2),
            SystemInfo::new("1", 2, Role::Out, 2),
            SystemInfo::new("2", 2, Role::In, 1),
            SystemInfo::new("3", 2, Role::Out, 1),
        ])
        .unwrap();
        let comb_21 = comb_constraints::<f64>(layout_21).unwrap();
        assert!(comb_21.equality_residual(std::slice::from_ref(&d_prod)).unwrap() < 1e-10);

        // Swap-like channel from party-2 input to party-1 output signals
        // backwards: comb rows reject it, and so do the no-signalling rows.
        let swap_choi = {
            let mut v = M::zeros(16, 1);
            // |I>> on (out1, in2) tensored with |I>> on (out2, in1) gives a
            // two-way identity pipe; entries indexed on (in1,out1,in2,out2).
            for a in 0..2usize {
                for b in 0..2usize {
                    v[(a * 8 + b * 4 + b * 2 + a, 0)] = c(1.0, 0.0);
                }
            }
            crate::linalg::HermitianOperator::dyad(v.data()).into_mat()
        };
        let pipe = Op::from_matrix(layout, swap_choi).unwrap();
        assert!(nosig.equality_residual(std::slice::from_ref(&pipe)).unwrap() > 0.1);
    }

    #[test]
    fn nosig_accepts_product_of_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let layout = SystemLayout::chain(2, &["a_in", "a_out", "b_in", "b_out"]).unwrap();
        // D = C_A (x) C_B with independent channels is no-signalling.
        let ca = {
            let m = isometry_choi(&mut rng, 2, 4);
            let l = SystemLayout::new(vec![
                SystemInfo::new("a_out", 2, Role::Out, 1),
                SystemInfo::new("a_env", 2, Role::Out, 1),
                SystemInfo::new("a_in", 2, Role::In, 1),
            ])
            .unwrap();
            Op::from_matrix(l, m).unwrap().partial_trace(&["a_env"]).unwrap()
        };
        let cb = {
            let m = isometry_choi(&mut rng, 2, 4);
            let l = SystemLayout::new(vec![
                SystemInfo::new("b_out", 2, Role::Out, 1),
                SystemInfo::new("b_env", 2, Role::Out, 1),
                SystemInfo::new("b_in", 2, Role::In, 2),
            ])
            .unwrap();
            Op::from_matrix(l, m).unwrap().partial_trace(&["b_env"]).unwrap()
        };
        let d = ca.tensor(&cb).unwrap().aligned_to(&layout).unwrap();
        let cs = nosig_constraints::<f64>(layout).unwrap();
        let report = cs.check_point(std::slice::from_ref(&d)).unwrap();
        assert!(report.satisfied(1e-9));
    }

    #[test]
    fn party_cap_enforced() {
        let mut systems = Vec::new();
        for p in 1..=5 {
            systems.push(SystemInfo::new(format!("i{p}"), 2, Role::In, p));
            systems.push(SystemInfo::new(format!("o{p}"), 2, Role::Out, p));
        }
        let layout = SystemLayout::new(systems).unwrap();
        match nosig_constraints::<f64>(layout) {
            Err(NetError::TooManyParties { found }) => assert_eq!(found, 5),
            other => panic!("expected party cap error, got {other:?}"),
        }
    }
}
