//! Testers that score oracle-aided position search.
//!
//! A hidden position is drawn uniformly from `0..k`. The tester threads
//! the strategy's query register through `n_queries` uses of the phase
//! oracle flagging the hidden position, then reads the strategy's guess.
//! The reported outcome `x` is the signed guess error, and the score
//! weight `1 - |x| / k` falls off linearly with the miss distance.

use num_complex::Complex;

use crate::linalg::{CMatrix, HermitianOperator};
use crate::netmodel::{link_product, LabeledOperator, Role, SystemInfo, SystemLayout};
use crate::scalar::Scalar;

use super::resources::{loose_layout, real, reframed};
use super::AppError;

/// Strategy-side layout: query outputs on odd labels, oracle replies on
/// even ones, the guess register last.
fn strategy_layout(k: usize, n_queries: usize) -> SystemLayout {
    let mut systems = Vec::new();
    for j in 1..=n_queries {
        systems.push(SystemInfo::new(format!("s{}", 2 * j - 1), k, Role::Out, j));
        systems.push(SystemInfo::new(format!("s{}", 2 * j), k, Role::In, j + 1));
    }
    systems.push(SystemInfo::new("ans", k, Role::Out, n_queries + 1));
    SystemLayout::new(systems).expect("valid layout")
}

/// Choi operator of the joint position-oracle unitary: diagonal, with
/// entry `-1` unless the search index matches the position.
fn oracle_choi<T: Scalar>(
    k: usize,
    p_in: &str,
    s_in: &str,
    p_out: &str,
    s_out: &str,
) -> LabeledOperator<T> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); k * k * k * k];
    for i in 0..k {
        for s in 0..k {
            let idx = i * k + s;
            let sign = if s == i { T::one() } else { -T::one() };
            v[idx * k * k + idx] = Complex::new(sign, T::zero());
        }
    }
    let layout = loose_layout(&[(p_in, k), (s_in, k), (p_out, k), (s_out, k)]);
    LabeledOperator::new(layout, HermitianOperator::dyad(&v)).expect("dimensions match")
}

/// Builds the search tester: outcome `x` ranges over the guess errors
/// `-(k-1)..=(k-1)`, and the returned performance operator weights each
/// branch by `1 - |x| / k`.
///
/// `k` is the number of positions (2 to 4) and `n_queries` the number of
/// oracle calls offered to the strategy (1 or 2).
pub fn grover_tester<T: Scalar>(
    k: usize,
    n_queries: usize,
) -> Result<(Vec<LabeledOperator<T>>, LabeledOperator<T>), AppError> {
    if !(2..=4).contains(&k) {
        return Err(AppError::BadInput(format!("position count {k} outside 2..=4")));
    }
    if !(1..=2).contains(&n_queries) {
        return Err(AppError::BadInput(format!("query count {n_queries} outside 1..=2")));
    }
    let layout = strategy_layout(k, n_queries);

    // Uniformly random hidden position, threaded through each oracle call.
    let prior = LabeledOperator::new(
        loose_layout(&[("p0", k)]),
        HermitianOperator::scaled_identity(k, T::one() / real::<T>(k)),
    )?;
    let mut chain = link_product(&prior, &oracle_choi(k, "p0", "s1", "p1", "s2"))?;
    if n_queries == 2 {
        chain = link_product(&chain, &oracle_choi(k, "p1", "s3", "p2", "s4"))?;
    }
    let p_last = format!("p{n_queries}");

    // Final readout compares the guess with the position.
    let mut tester = Vec::with_capacity(2 * k - 1);
    let mut omega: Option<LabeledOperator<T>> = None;
    for x in -(k as i64 - 1)..=(k as i64 - 1) {
        let hit = CMatrix::from_fn(k * k, k * k, |r, c| {
            if r == c && (r % k) as i64 - (r / k) as i64 == x {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        let p_op = LabeledOperator::new(
            loose_layout(&[(p_last.as_str(), k), ("ans", k)]),
            HermitianOperator::new_unchecked(hit),
        )?;
        let t_x = reframed(&link_product(&chain, &p_op)?, &layout)?;
        let weight = T::one() - real::<T>(x.unsigned_abs() as usize) / real::<T>(k);
        let term = t_x.scale(weight);
        omega = Some(match omega {
            Some(acc) => acc.add(&term)?,
            None => term,
        });
        tester.push(t_x);
    }
    Ok((tester, omega.expect("at least one outcome")))
}
