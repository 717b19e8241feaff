//! A two-party qubit game whose best causally ordered score is beaten by
//! a network with no definite order between the parties.
//!
//! Alice acts on `Ain -> Aout` with classical input `a` and outcome `x`;
//! Bob acts on `Bin -> Bout` with inputs `(b, bp)` and outcome `y`. When
//! `bp = 0` the pair wins on `x = b` (Alice guesses Bob's input), when
//! `bp = 1` on `y = a` (Bob guesses Alice's). The performance operator
//! averages the local instruments against those scores uniformly over
//! the inputs `(a, b, bp)`.

use num_complex::Complex;

use crate::linalg::{kron, CMatrix, HermitianOperator};
use crate::netmodel::{Instrument, LabeledOperator, Role, SystemInfo, SystemLayout};
use crate::scalar::Scalar;

use super::AppError;

/// Four-qubit party layout: Alice is step 1, Bob step 2. The steps label
/// parties rather than a causal order; the no-signalling and process
/// classes built on this layout treat them symmetrically.
fn party_layout() -> SystemLayout {
    SystemLayout::new(vec![
        SystemInfo::new("Ain", 2, Role::In, 1),
        SystemInfo::new("Aout", 2, Role::Out, 1),
        SystemInfo::new("Bin", 2, Role::In, 2),
        SystemInfo::new("Bout", 2, Role::Out, 2),
    ])
    .expect("valid layout")
}

fn single_party(in_label: &str, out_label: &str) -> SystemLayout {
    SystemLayout::new(vec![
        SystemInfo::new(in_label, 2, Role::In, 1),
        SystemInfo::new(out_label, 2, Role::Out, 1),
    ])
    .expect("valid layout")
}

/// `(I + s * pauli) / 2` for `s = (-1)^bit`: the qubit projector onto the
/// `bit` eigenstate of the given Pauli axis.
fn axis_projector<T: Scalar>(x_axis: bool, bit: usize) -> CMatrix<T> {
    let s = if bit == 0 { T::one() } else { -T::one() };
    let h = T::c(0.5);
    let zero = Complex::new(T::zero(), T::zero());
    let mut m = CMatrix::zeros(2, 2);
    if x_axis {
        m[(0, 0)] = Complex::new(h, T::zero());
        m[(1, 1)] = Complex::new(h, T::zero());
        m[(0, 1)] = Complex::new(s * h, T::zero());
        m[(1, 0)] = Complex::new(s * h, T::zero());
    } else {
        m[(0, 0)] = Complex::new(h + s * h, T::zero());
        m[(1, 1)] = Complex::new(h - s * h, T::zero());
        m[(0, 1)] = zero;
        m[(1, 0)] = zero;
    }
    m
}

/// Alice's element for outcome `x` under input `a`: measure along z,
/// prepare the z eigenstate of her input.
fn alice_element<T: Scalar>(x: usize, a: usize) -> HermitianOperator<T> {
    HermitianOperator::new_unchecked(kron(&axis_projector(false, x), &axis_projector(false, a)))
}

/// Bob's element for outcome `y` under inputs `(b, bp)`: with `bp = 1` he
/// measures along z and discards (prepares the maximally mixed state);
/// with `bp = 0` he measures along x and prepares the z eigenstate of
/// `b + y`, which is what lets Alice read `b` out of his output.
fn bob_element<T: Scalar>(y: usize, b: usize, bp: usize) -> HermitianOperator<T> {
    let m = if bp == 1 {
        kron(&axis_projector::<T>(false, y), &CMatrix::scaled_identity(2, T::c(0.5)))
    } else {
        kron(&axis_projector::<T>(true, y), &axis_projector(false, (b + y) % 2))
    };
    HermitianOperator::new_unchecked(m)
}

/// Local instruments and the score table of the game.
#[derive(Clone, Debug)]
pub struct GameSpec<T: Scalar> {
    /// Alice's instrument per input `a` in `{0, 1}`; outcomes are `x`.
    pub alice: Vec<Instrument<T>>,
    /// Bob's instrument per input pair, flat index `b * 2 + bp`.
    pub bob: Vec<Instrument<T>>,
    /// Win indicators, flat index `(((a * 2 + b) * 2 + bp) * 2 + x) * 2 + y`.
    pub score_table: Vec<T>,
}

impl<T: Scalar> GameSpec<T> {
    /// Score of outcomes `(x, y)` under inputs `(a, b, bp)`.
    pub fn score(&self, a: usize, b: usize, bp: usize, x: usize, y: usize) -> T {
        self.score_table[(((a * 2 + b) * 2 + bp) * 2 + x) * 2 + y]
    }
}

/// Builds the game's instruments and score table.
pub fn ocb_game<T: Scalar>() -> Result<GameSpec<T>, AppError> {
    let a_layout = single_party("Ain", "Aout");
    let b_layout = single_party("Bin", "Bout");
    let mut alice = Vec::new();
    for a in 0..2 {
        let elements = (0..2)
            .map(|x| LabeledOperator::new(a_layout.clone(), alice_element(x, a)))
            .collect::<Result<Vec<_>, _>>()?;
        alice.push(Instrument::new(elements)?);
    }
    let mut bob = Vec::new();
    for b in 0..2 {
        for bp in 0..2 {
            let elements = (0..2)
                .map(|y| LabeledOperator::new(b_layout.clone(), bob_element(y, b, bp)))
                .collect::<Result<Vec<_>, _>>()?;
            bob.push(Instrument::new(elements)?);
        }
    }
    let mut score_table = Vec::with_capacity(32);
    for a in 0..2usize {
        for b in 0..2usize {
            for bp in 0..2usize {
                for x in 0..2usize {
                    for y in 0..2usize {
                        let win = if bp == 0 { x == b } else { y == a };
                        score_table.push(if win { T::one() } else { T::zero() });
                    }
                }
            }
        }
    }
    Ok(GameSpec { alice, bob, score_table })
}

/// Performance operator of the game on the party layout `(Ain, Aout,
/// Bin, Bout)`: the score-weighted average of the instrument elements
/// under uniform inputs.
pub fn omega_ocb<T: Scalar>() -> Result<LabeledOperator<T>, AppError> {
    let game = ocb_game::<T>()?;
    let mut acc = CMatrix::<T>::zeros(16, 16);
    let w = T::c(0.125);
    for a in 0..2 {
        for b in 0..2 {
            for bp in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        let s = game.score(a, b, bp, x, y);
                        if s == T::zero() {
                            continue;
                        }
                        let m = &game.alice[a].elements()[x];
                        let n = &game.bob[b * 2 + bp].elements()[y];
                        acc.axpy(Complex::new(w * s, T::zero()), &kron(m.mat(), n.mat()));
                    }
                }
            }
        }
    }
    Ok(LabeledOperator::new(
        party_layout(),
        HermitianOperator::new_unchecked(acc.symmetrized()),
    )?)
}
