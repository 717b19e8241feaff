//! Ready-made performance operators for the worked transformation tasks:
//! inverting an unknown gate, charge-conjugating it, adding coherent
//! control to it, a two-party game that no causally ordered network wins
//! optimally, and a tester scoring oracle-aided position search.
//!
//! Each builder returns a [`LabeledOperator`] on exactly the layout the
//! tested networks live on, so outputs feed straight into the score and
//! entropy optimizers. The group averages behind the gate tasks are
//! evaluated in closed form; [`mc_twirl`] reproduces them by direct Haar
//! sampling as an independent cross-check.

mod grover;
mod haar;
mod ocb;
mod resources;
mod twirl;

pub use grover::grover_tester;
pub use haar::{controlled_choi, gate_choi, haar_sample, mc_twirl};
pub use ocb::{ocb_game, omega_ocb, GameSpec};
pub use resources::{entangled_resources, sym_antisym, EntangledResources, ProjectorPair};
pub use twirl::{
    controlization_classical, controlization_fidelity, estimation_baseline,
    omega_controlization, omega_conjugation, omega_inversion,
};

use thiserror::Error;

use crate::netmodel::{LabeledOperator, NetError};
use crate::scalar::Scalar;

/// Errors from the application builders.
#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// Registry ids accepted by [`build_omega`].
pub const BUILDER_IDS: [&str; 5] =
    ["inversion", "conjugation", "controlization", "ocb", "grover"];

/// Builds the performance operator with the given registry id.
///
/// `inversion`, `conjugation` and `controlization` read `d` as the gate
/// dimension (`d >= 2`); `ocb` is fixed to qubits, so `d` must be 2;
/// `grover` reads `d` as the database size `K` and uses a single query.
pub fn build_omega<T: Scalar>(id: &str, d: usize) -> Result<LabeledOperator<T>, AppError> {
    match id {
        "inversion" => omega_inversion(d),
        "conjugation" => omega_conjugation(d),
        "controlization" => omega_controlization(d),
        "ocb" => {
            if d != 2 {
                return Err(AppError::BadInput(format!(
                    "the two-party game is fixed to qubits, got d={d}"
                )));
            }
            omega_ocb()
        }
        "grover" => grover_tester(d, 1).map(|(_, omega)| omega),
        other => Err(AppError::BadInput(format!("unknown builder id '{other}'"))),
    }
}
