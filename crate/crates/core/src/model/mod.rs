//! Sector basis, device graph, and the sparse operators built on them.

pub mod basis;
pub mod config;
pub mod graph;
pub mod hamiltonian;
pub mod operator;
pub mod potential;
pub mod state;

pub use basis::{format_bits, parse_bits, SectorBasis};
pub use config::DeviceConfig;
pub use graph::{DeviceGraph, Edge, LadderParams, Subgraph};
pub use hamiltonian::{
    alternating_bits, build_dipole_operator, build_hamiltonian, build_imbalance_operator,
    build_normalized_dipole_operator, product_state_energy, MHZ_TO_ANGULAR,
};
pub use operator::SparseOperator;
pub use potential::PotentialProfile;
pub use state::QuantumState;
