//! Time evolution of sector states: dense eigenbasis propagation for small
//! sectors, Lanczos–Krylov stepping for large ones.

pub mod eigen;
pub mod krylov;
pub mod quench;

pub use eigen::{
    eigenvalues, evolve_exact, full_diagonalize, full_diagonalize_capped, EigenDecomposition,
    ExactPropagator, DEFAULT_DENSE_CAP,
};
pub use krylov::{evolve_krylov, evolve_krylov_to, KrylovConfig, KrylovDiagnostics};
pub use quench::{
    run_quench, Column, CorrelationSnapshot, Method, Observable, ObservableSeries, ObserverSet,
    Propagator, SeriesMetadata, TimeGrid,
};
