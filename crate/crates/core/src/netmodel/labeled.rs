//! Hermitian operators tied to a labeled system layout.

use num_complex::Complex;

use super::layout::SystemLayout;
use super::NetError;
use crate::linalg::{
    partial_trace, partial_transpose, permute_systems, CMatrix, HermitianOperator, SparseHerm,
};
use crate::scalar::Scalar;

/// A Hermitian operator together with the layout naming its tensor factors.
#[derive(Clone, Debug)]
pub struct LabeledOperator<T: Scalar> {
    layout: SystemLayout,
    op: HermitianOperator<T>,
}

impl<T: Scalar> LabeledOperator<T> {
    pub fn new(layout: SystemLayout, op: HermitianOperator<T>) -> Result<Self, NetError> {
        if layout.dim() != op.dim() {
            return Err(NetError::DimMismatch { layout: layout.dim(), operator: op.dim() });
        }
        Ok(Self { layout, op })
    }

    /// Validates Hermiticity of a raw matrix before wrapping it.
    pub fn from_matrix(layout: SystemLayout, m: CMatrix<T>) -> Result<Self, NetError> {
        let op = HermitianOperator::new(m)?;
        Self::new(layout, op)
    }

    pub fn identity(layout: SystemLayout) -> Self {
        let op = HermitianOperator::identity(layout.dim());
        Self { layout, op }
    }

    /// Places `factor` on the listed labels (in that order) and the identity
    /// on every other system of `layout`.
    pub fn embedded(
        layout: SystemLayout,
        labels: &[&str],
        factor: &HermitianOperator<T>,
    ) -> Result<Self, NetError> {
        let positions = layout.positions(labels)?;
        if layout.dim_of(&positions) != factor.dim() {
            return Err(NetError::DimMismatch { layout: layout.dim_of(&positions), operator: factor.dim() });
        }
        let sparse = embed_factors(&layout.dims(), &[(&positions, &SparseHerm::from_dense(factor))]);
        let op = HermitianOperator::new_unchecked(sparse.to_dense());
        Ok(Self { layout, op })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn op(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn mat(&self) -> &CMatrix<T> {
        self.op.mat()
    }

    pub fn into_op(self) -> HermitianOperator<T> {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn trace_re(&self) -> T {
        self.op.trace_re()
    }

    pub fn scale(&self, s: T) -> Self {
        Self { layout: self.layout.clone(), op: self.op.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self, NetError> {
        let aligned = other.aligned_to(&self.layout)?;
        Ok(Self { layout: self.layout.clone(), op: self.op.add(&aligned.op) })
    }

    /// Value of a scalar operator (empty layout).
    pub fn scalar(&self) -> Option<T> {
        (self.dim() == 1).then(|| self.op.mat()[(0, 0)].re)
    }

    /// Reorders the tensor factors to the given label order.
    pub fn permuted(&self, order: &[&str]) -> Result<Self, NetError> {
        if order.len() != self.layout.len() {
            return Err(NetError::BadLayout(format!(
                "permutation lists {} labels, layout has {}",
                order.len(),
                self.layout.len()
            )));
        }
        let perm = self.layout.positions(order)?;
        let m = permute_systems(self.mat(), &self.layout.dims(), &perm)?;
        let layout = self.layout.select(&perm);
        Ok(Self { layout, op: HermitianOperator::new_unchecked(m) })
    }

    /// Permutes into the label order of `target`, which must list the same
    /// labels with the same dimensions.
    pub fn aligned_to(&self, target: &SystemLayout) -> Result<Self, NetError> {
        if !self.layout.same_label_set(target) {
            return Err(NetError::LabelMismatch);
        }
        self.permuted(&target.labels())
    }

    /// Traces out the listed systems.
    pub fn partial_trace(&self, labels: &[&str]) -> Result<Self, NetError> {
        let positions = self.layout.positions(labels)?;
        let m = partial_trace(self.mat(), &self.layout.dims(), &positions)?;
        Ok(Self { layout: self.layout.without(&positions), op: HermitianOperator::new_unchecked(m) })
    }

    /// Transposes the listed systems in place.
    pub fn partial_transpose(&self, labels: &[&str]) -> Result<Self, NetError> {
        let positions = self.layout.positions(labels)?;
        let m = partial_transpose(self.mat(), &self.layout.dims(), &positions)?;
        Self::from_matrix(self.layout.clone(), m)
    }

    /// Tensor product; label sets must be disjoint.
    pub fn tensor(&self, other: &Self) -> Result<Self, NetError> {
        let layout = self.layout.joined(&other.layout)?;
        let m = crate::linalg::kron(self.mat(), other.mat());
        Ok(Self { layout, op: HermitianOperator::new_unchecked(m) })
    }
}

/// Embeds factors on disjoint position groups, identity elsewhere.
///
/// Each group lists layout positions in the Kronecker order of its factor.
/// The result has `prod(nnz) * dim_rest` entries and is Hermitian whenever
/// every factor is.
pub(crate) fn embed_factors<T: Scalar>(
    dims: &[usize],
    groups: &[(&[usize], &SparseHerm<T>)],
) -> SparseHerm<T> {
    let full_dim: usize = dims.iter().product();
    let strides = stride_table(dims);
    let mut used = vec![false; dims.len()];
    for (positions, factor) in groups {
        debug_assert_eq!(positions.iter().map(|&p| dims[p]).product::<usize>(), factor.dim());
        for &p in *positions {
            debug_assert!(!used[p]);
            used[p] = true;
        }
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|&p| !used[p]).collect();
    let rest_offsets = diagonal_offsets(dims, &strides, &rest);

    // Per-group entry lists mapped to (row offset, column offset, value).
    let group_entries: Vec<Vec<(usize, usize, Complex<T>)>> = groups
        .iter()
        .map(|(positions, factor)| {
            let sub_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
            let sub_strides = stride_table(&sub_dims);
            factor
                .entries()
                .iter()
                .map(|&(fi, fj, v)| {
                    let ro = map_offset(fi as usize, &sub_dims, &sub_strides, positions, &strides);
                    let co = map_offset(fj as usize, &sub_dims, &sub_strides, positions, &strides);
                    (ro, co, v)
                })
                .collect()
        })
        .collect();

    let mut combos: Vec<(usize, usize, Complex<T>)> = vec![(0, 0, Complex::new(T::one(), T::zero()))];
    for list in &group_entries {
        let mut next = Vec::with_capacity(combos.len() * list.len());
        for &(ro, co, v) in &combos {
            for &(gro, gco, gv) in list {
                next.push((ro + gro, co + gco, v * gv));
            }
        }
        combos = next;
    }

    let mut entries = Vec::with_capacity(combos.len() * rest_offsets.len());
    for &(ro, co, v) in &combos {
        for &r in &rest_offsets {
            entries.push(((ro + r) as u32, (co + r) as u32, v));
        }
    }
    let mut out = SparseHerm::from_entries(full_dim, entries);
    if groups.len() > 1 {
        out = merge_duplicates(out);
    }
    out
}

fn merge_duplicates<T: Scalar>(sp: SparseHerm<T>) -> SparseHerm<T> {
    let mut m = SparseHerm::zero(sp.dim());
    m.add_assign(&sp, T::one());
    m
}

fn stride_table(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Maps a flat index over `sub_dims` to a full-space offset by scattering its
/// digits to the listed positions.
fn map_offset(
    flat: usize,
    sub_dims: &[usize],
    sub_strides: &[usize],
    positions: &[usize],
    full_strides: &[usize],
) -> usize {
    let mut off = 0;
    for k in 0..sub_dims.len() {
        let digit = (flat / sub_strides[k]) % sub_dims[k];
        off += digit * full_strides[positions[k]];
    }
    off
}

fn diagonal_offsets(dims: &[usize], strides: &[usize], positions: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &p in positions {
        let mut next = Vec::with_capacity(offsets.len() * dims[p]);
        for &o in &offsets {
            for k in 0..dims[p] {
                next.push(o + k * strides[p]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Link product: contracts the systems whose labels appear in both operands.
///
/// The result lives on the remaining systems, `a`'s first in `a`'s order,
/// then `b`'s in `b`'s order. Disjoint label sets give the tensor product; a
/// fully shared label set gives a scalar on the empty layout.
pub fn link_product<T: Scalar>(
    a: &LabeledOperator<T>,
    b: &LabeledOperator<T>,
) -> Result<LabeledOperator<T>, NetError> {
    let shared: Vec<&str> = a
        .layout()
        .labels()
        .into_iter()
        .filter(|l| b.layout().position(l).is_some())
        .collect();
    for l in &shared {
        let da = a.layout().systems()[a.layout().position(l).unwrap()].dim;
        let db = b.layout().systems()[b.layout().position(l).unwrap()].dim;
        if da != db {
            return Err(NetError::BadLayout(format!("shared label '{l}' has dimensions {da} and {db}")));
        }
    }
    if shared.is_empty() {
        return a.tensor(b);
    }

    let a_only: Vec<usize> =
        (0..a.layout().len()).filter(|&i| !shared.contains(&a.layout().systems()[i].label.as_str())).collect();
    let b_only: Vec<usize> =
        (0..b.layout().len()).filter(|&i| !shared.contains(&b.layout().systems()[i].label.as_str())).collect();

    // Work layout: a-only systems, shared systems (in a's order), b-only.
    let shared_in_a = a.layout().positions(&shared)?;
    let work = a
        .layout()
        .select(&a_only)
        .joined(&a.layout().select(&shared_in_a))?
        .joined(&b.layout().select(&b_only))?;
    let work_dims = work.dims();

    let a_positions = work.positions(&a.layout().labels())?;
    let a_ext = embed_factors(&work_dims, &[(&a_positions, &SparseHerm::from_dense(a.op()))]);

    let b_pt = b.partial_transpose(&shared)?;
    let b_positions = work.positions(&b.layout().labels())?;
    let b_ext = embed_factors(&work_dims, &[(&b_positions, &SparseHerm::from_dense(b_pt.op()))]);

    let product = a_ext.to_dense().matmul(&b_ext.to_dense());
    let shared_in_work: Vec<usize> = (a_only.len()..a_only.len() + shared.len()).collect();
    let traced = partial_trace(&product, &work_dims, &shared_in_work)?;
    let layout = work.without(&shared_in_work);
    LabeledOperator::from_matrix(layout, traced)
}

/// Probability of a test outcome on a network: the full-overlap link product
/// `Tr[T C^T]` after aligning `network` to `test`'s label order.
pub fn born_probability<T: Scalar>(
    test: &LabeledOperator<T>,
    network: &LabeledOperator<T>,
) -> Result<T, NetError> {
    if !test.layout().same_label_set(network.layout()) {
        return Err(NetError::LabelMismatch);
    }
    let c = network.aligned_to(test.layout())?;
    let t = test.mat();
    let cm = c.mat();
    let n = t.n_rows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            acc += t[(i, j)] * cm[(i, j)];
        }
    }
    Ok(acc.re)
}
