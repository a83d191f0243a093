//! Circuit-to-Hamiltonian construction on an explicit clock.

mod assemble;
mod circuit;
mod clock;
pub mod complex;
pub mod specfile;
mod unionfind;

pub use assemble::{
    assemble, assemble_capped, conjugation_w, history_state, mixed_lower_bound, verify_mixed,
    walk_tensor_identity, BlockTerm, ClockOperator, Component, HistoryState, MixedReport, Profile,
    StandardFormHamiltonian, SubspaceSummary, DEFAULT_MAX_DIM,
};
pub use circuit::{acceptance_probability, builtin, CircuitSpec, Gate, MAX_QUBITS, UNITARITY_TOL};
pub use clock::{mixed_cuts, ClockSpec, MixedBranch, Subspace, SubspaceKind};
pub use complex::CMatrix;
pub use unionfind::UnionFind;
