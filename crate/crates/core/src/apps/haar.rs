//! Haar-random unitaries and Monte-Carlo averages of the twirled
//! performance operators.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{CMatrix, HermitianOperator};
use crate::netmodel::LabeledOperator;
use crate::scalar::Scalar;

use super::resources::{loose_layout, real, reframed, vec_row_col};
use super::twirl::{ctrl_chain, gate_chain};
use super::AppError;

/// Haar-distributed `d x d` unitary, deterministic in `seed`.
///
/// Orthonormalizes a complex Gaussian matrix column by column with two
/// Gram-Schmidt passes. This is the QR factorization whose triangular
/// factor has a positive diagonal, the convention under which the
/// orthonormal factor is exactly Haar distributed.
pub fn haar_sample<T: Scalar>(d: usize, seed: u64) -> Result<CMatrix<T>, AppError> {
    if d == 0 {
        return Err(AppError::BadInput("unitary dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex::new(T::c(re), T::c(im))
    };
    let mut cols: Vec<Vec<Complex<T>>> =
        (0..d).map(|_| (0..d).map(|_| gauss()).collect()).collect();
    for j in 0..d {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let mut proj = Complex::new(T::zero(), T::zero());
                for i in 0..d {
                    proj += q[i].conj() * col[i];
                }
                for i in 0..d {
                    col[i] -= proj * q[i];
                }
            }
        }
        let norm2 = col.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
        let inv = T::one() / num_traits::Float::sqrt(norm2);
        for z in col.iter_mut() {
            *z = *z * inv;
        }
    }
    Ok(CMatrix::from_fn(d, d, |i, j| cols[j][i]))
}

/// SplitMix-style stream seed: decorrelates the per-sample generators
/// drawn from one master seed, so samples are order-independent.
fn sample_seed(master: u64, k: u64) -> u64 {
    let mut z = master.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Vectorization of the controlled gate on the wire order `(3, Qp, 0, Q)`:
/// identity on the control-0 block, the gate on the control-1 block.
pub(crate) fn ctrl_vec<T: Scalar>(u: &CMatrix<T>) -> Vec<Complex<T>> {
    let d = u.n_rows();
    let mut v = vec![Complex::new(T::zero(), T::zero()); 4 * d * d];
    for a in 0..d {
        for b in 0..d {
            if a == b {
                v[((a * 2) * d + b) * 2] = Complex::new(T::one(), T::zero());
            }
            v[((a * 2 + 1) * d + b) * 2 + 1] = u[(a, b)];
        }
    }
    v
}

/// Choi operator of the unitary channel `u`, labeled `in_label -> out_label`.
pub fn gate_choi<T: Scalar>(u: &CMatrix<T>, in_label: &str, out_label: &str) -> LabeledOperator<T> {
    let d = u.n_rows();
    let mut v = vec![Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..d {
        for k in 0..d {
            v[i * d + k] = u[(k, i)];
        }
    }
    LabeledOperator::new(loose_layout(&[(in_label, d), (out_label, d)]), HermitianOperator::dyad(&v))
        .expect("dimensions match")
}

/// Choi operator of the gate `u` under coherent control, on the wires
/// `(3, Qp, 0, Q)`: gate input `0`, control in `Q`, gate output `3`,
/// control out `Qp`.
pub fn controlled_choi<T: Scalar>(u: &CMatrix<T>) -> LabeledOperator<T> {
    let d = u.n_rows();
    let layout = loose_layout(&[("3", d), ("Qp", 2), ("0", d), ("Q", 2)]);
    LabeledOperator::new(layout, HermitianOperator::dyad(&ctrl_vec(u))).expect("dimensions match")
}

fn kron_vec<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut v = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            v.push(x * y);
        }
    }
    v
}

/// Monte-Carlo average of the named builder's fidelity integrand over
/// `samples` Haar draws.
///
/// Per-sample seeds derive deterministically from `seed`, so runs are
/// reproducible and the samples could be drawn independently in parallel.
/// Supported ids: `inversion`, `conjugation`, `controlization`.
pub fn mc_twirl<T: Scalar>(
    builder: &str,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<LabeledOperator<T>, AppError> {
    if d < 2 {
        return Err(AppError::BadInput(format!("twirled builders need d >= 2, got {d}")));
    }
    if samples == 0 {
        return Err(AppError::BadInput("at least one sample is required".into()));
    }
    if !matches!(builder, "inversion" | "conjugation" | "controlization") {
        return Err(AppError::BadInput(format!("no Monte-Carlo integrand for id '{builder}'")));
    }

    let n = if builder == "controlization" { 4 * d.pow(4) } else { d.pow(4) };
    let mut acc = CMatrix::<T>::zeros(n, n);
    let one = Complex::new(T::one(), T::zero());
    for k in 0..samples {
        let u = haar_sample::<T>(d, sample_seed(seed, k as u64))?;
        let v = match builder {
            // Target gate dyad on (3, 0), conjugate gate use on (2, 1).
            "inversion" => kron_vec(&vec_row_col(&u.dagger()), &vec_row_col(&u.conj())),
            "conjugation" => kron_vec(&vec_row_col(&u.conj()), &vec_row_col(&u.conj())),
            _ => kron_vec(&ctrl_vec(&u), &vec_row_col(&u.conj())),
        };
        acc.axpy(one, &CMatrix::outer(&v, &v));
    }

    let pref = match builder {
        "controlization" => T::one() / real::<T>(4 * d * d),
        _ => T::one() / real::<T>(d * d),
    } / real::<T>(samples);
    let herm = HermitianOperator::new_unchecked(acc.scale_re(pref).symmetrized());
    let (layout, target) = if builder == "controlization" {
        (
            loose_layout(&[("3", d), ("Qp", 2), ("0", d), ("Q", 2), ("2", d), ("1", d)]),
            ctrl_chain(d),
        )
    } else {
        (loose_layout(&[("3", d), ("0", d), ("2", d), ("1", d)]), gate_chain(d))
    };
    Ok(reframed(&LabeledOperator::new(layout, herm)?, &target)?)
}
