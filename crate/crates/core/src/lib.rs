//! Dihedral randomized benchmarking for a single qubit.
//!
//! Channels are represented as real 4x4 Pauli-Liouville matrices
//! ([`Superoperator`]). The dihedral group `D_j = <R_j(1), X>` acts on the
//! Bloch sphere by rotations of `2*pi/j` about z and the X flip; benchmarking
//! over it yields two decay parameters `p0` (Z axis) and `p1` (XY plane)
//! from which the average gate fidelity is `1/2 + (p0 + 2*p1)/6`.
//!
//! Modules, bottom up:
//!
//! - [`liouville`]: channel algebra, fidelity functionals, CPTP checks.
//! - [`dihedral`]: the group, its Liouville representation, twirling.
//! - [`noise`]: error channels and gate-dependent noise assignment.
//! - [`protocol`]: random sequences, inversion gates, survival probabilities.
//! - [`estimation`]: decay datasets, exponential fits, the interleaved bound.
//! - [`cli`]: config files and the `run` / `verify` drivers.

pub mod cli;
pub mod dihedral;
pub mod error;
pub mod estimation;
pub mod liouville;
pub mod noise;
pub mod protocol;

pub use dihedral::{decay_params, twirl, DecayParams, GroupElement, Irrep};
pub use error::{Error, Result};
pub use estimation::{DecayDataset, FitReport};
pub use liouville::{
    avg_fidelity, chi00, chi00_inv, compose, expectation, unitary_to_superop, PauliVector,
    Superoperator, UnitarySpec,
};
pub use noise::{GateNoiseMap, GateTag, NoiseSpec};
pub use protocol::{ExperimentPlan, Mode, SequenceRecord};
