//! Dense row-major complex matrices and composite-system index operations.

use num_complex::Complex;

use super::LinalgError;
use crate::scalar::Scalar;

/// Dense complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T: Scalar> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> std::fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{}", self.n_rows, self.n_cols)?;
        let show = self.n_rows.min(8);
        for i in 0..show {
            let row: Vec<String> = (0..self.n_cols.min(8))
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, data: vec![Complex::new(T::zero(), T::zero()); n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Identity scaled by a real factor.
    pub fn scaled_identity(n: usize, s: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(s, T::zero());
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Column vector from complex amplitudes.
    pub fn col_vector(v: &[Complex<T>]) -> Self {
        Self { n_rows: v.len(), n_cols: 1, data: v.to_vec() }
    }

    /// Rank-one operator `|v><w|`.
    pub fn outer(v: &[Complex<T>], w: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for i in 0..v.len() {
            for j in 0..w.len() {
                m[(i, j)] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { n_rows: self.n_rows, n_cols: self.n_cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        debug_assert!(self.is_square());
        (0..self.n_rows).map(|i| self[(i, i)]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { n_rows: self.n_rows, n_cols: self.n_cols, data: self.data.iter().map(|z| *z * s).collect() }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols), "shape mismatch");
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols), "shape mismatch");
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    /// `self += s * other`, in place.
    pub fn axpy(&mut self, s: Complex<T>, other: &Self) {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * *b;
        }
    }

    /// Matrix product.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n_cols, other.n_rows, "inner dimension mismatch");
        let (m, k, n) = (self.n_rows, self.n_cols, other.n_cols);
        let mut out = Self::zeros(m, n);
        // i-k-j order keeps both inner accesses contiguous in row-major storage.
        for i in 0..m {
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let orow = &mut out.data[i * n..(i + 1) * n];
                let brow = &other.data[p * n..(p + 1) * n];
                for j in 0..n {
                    orow[j] += a * brow[j];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Real part of the Frobenius inner product `Tr[self^dag other]`.
    pub fn inner_re(&self, other: &Self) -> T {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .fold(T::zero(), |a, b| a + b)
    }

    /// Largest absolute deviation from the conjugate transpose.
    pub fn asymmetry(&self) -> T {
        debug_assert!(self.is_square());
        let mut worst = T::zero();
        for i in 0..self.n_rows {
            for j in i..self.n_cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `(M + M^dag) / 2`.
    pub fn symmetrized(&self) -> Self {
        debug_assert!(self.is_square());
        let half = T::c(0.5);
        Self::from_fn(self.n_rows, self.n_cols, |i, j| (self[(i, j)] + self[(j, i)].conj()).scale(half))
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n_cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n_cols + j]
    }
}

/// Kronecker product; the left factor is the most significant index block.
pub fn kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ar, ac, br, bc) = (a.n_rows(), a.n_cols(), b.n_rows(), b.n_cols());
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let z = a[(i, j)];
            if z.re == T::zero() && z.im == T::zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = z * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, left-to-right (first factor most significant).
pub fn kron_all<T: Scalar>(factors: &[&CMatrix<T>]) -> CMatrix<T> {
    assert!(!factors.is_empty(), "kron_all needs at least one factor");
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = kron(&acc, f);
    }
    acc
}

/// Strides of a composite index: first subsystem is most significant.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_dims<T: Scalar>(m: &CMatrix<T>, dims: &[usize]) -> Result<(), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { n_rows: m.n_rows(), n_cols: m.n_cols() });
    }
    let prod: usize = dims.iter().product();
    if prod != m.n_rows() || dims.iter().any(|&d| d == 0) {
        return Err(LinalgError::DimMismatch {
            expected: prod,
            found: m.n_rows(),
        });
    }
    Ok(())
}

/// Partial trace over the subsystems listed in `traced` (indices into `dims`).
/// The kept subsystems preserve their relative order.
pub fn partial_trace<T: Scalar>(
    m: &CMatrix<T>,
    dims: &[usize],
    traced: &[usize],
) -> Result<CMatrix<T>, LinalgError> {
    check_dims(m, dims)?;
    let n_sys = dims.len();
    if traced.iter().any(|&k| k >= n_sys) {
        return Err(LinalgError::BadSubsystem);
    }
    let mut is_traced = vec![false; n_sys];
    for &k in traced {
        if is_traced[k] {
            return Err(LinalgError::BadSubsystem);
        }
        is_traced[k] = true;
    }
    let st = strides(dims);
    let kept: Vec<usize> = (0..n_sys).filter(|&k| !is_traced[k]).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let d_kept: usize = kept_dims.iter().product();
    let kept_st = strides(&kept_dims);
    let traced_sys: Vec<usize> = (0..n_sys).filter(|&k| is_traced[k]).collect();
    let d_traced: usize = traced_sys.iter().map(|&k| dims[k]).product();

    // Offset of each kept (applied to rows and columns) and traced diagonal index.
    let kept_offsets: Vec<usize> = (0..d_kept)
        .map(|idx| {
            kept.iter()
                .enumerate()
                .map(|(pos, &k)| (idx / kept_st[pos] % kept_dims[pos]) * st[k])
                .sum()
        })
        .collect();
    let traced_dims: Vec<usize> = traced_sys.iter().map(|&k| dims[k]).collect();
    let traced_st_local = strides(&traced_dims);
    let traced_offsets: Vec<usize> = (0..d_traced)
        .map(|idx| {
            traced_sys
                .iter()
                .enumerate()
                .map(|(pos, &k)| (idx / traced_st_local[pos] % traced_dims[pos]) * st[k])
                .sum()
        })
        .collect();

    let mut out = CMatrix::zeros(d_kept, d_kept);
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &to in &traced_offsets {
                acc += m[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Partial transpose on the subsystems listed in `transposed`.
pub fn partial_transpose<T: Scalar>(
    m: &CMatrix<T>,
    dims: &[usize],
    transposed: &[usize],
) -> Result<CMatrix<T>, LinalgError> {
    check_dims(m, dims)?;
    let n_sys = dims.len();
    if transposed.iter().any(|&k| k >= n_sys) {
        return Err(LinalgError::BadSubsystem);
    }
    let mut flip = vec![false; n_sys];
    for &k in transposed {
        flip[k] = true;
    }
    let st = strides(dims);
    let n = m.n_rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (mut ri, mut ci) = (0usize, 0usize);
            for k in 0..n_sys {
                let ik = i / st[k] % dims[k];
                let jk = j / st[k] % dims[k];
                let (rk, ck) = if flip[k] { (jk, ik) } else { (ik, jk) };
                ri += rk * st[k];
                ci += ck * st[k];
            }
            out[(ri, ci)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorder subsystems: entry `perm[k]` is the old position of the system that
/// ends up at new position `k`.
pub fn permute_systems<T: Scalar>(
    m: &CMatrix<T>,
    dims: &[usize],
    perm: &[usize],
) -> Result<CMatrix<T>, LinalgError> {
    check_dims(m, dims)?;
    let n_sys = dims.len();
    if perm.len() != n_sys {
        return Err(LinalgError::BadSubsystem);
    }
    let mut seen = vec![false; n_sys];
    for &p in perm {
        if p >= n_sys || seen[p] {
            return Err(LinalgError::BadSubsystem);
        }
        seen[p] = true;
    }
    let st_old = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let st_new = strides(&new_dims);
    let n = m.n_rows();
    // row_map[i_old] = i_new
    let mut row_map = vec![0usize; n];
    for (i, entry) in row_map.iter_mut().enumerate() {
        let mut v = 0usize;
        for (k, &p) in perm.iter().enumerate() {
            v += (i / st_old[p] % dims[p]) * st_new[k];
        }
        *entry = v;
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(row_map[i], row_map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}
