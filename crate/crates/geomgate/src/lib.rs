//! Pulse-level simulation and optimization of composite nonadiabatic
//! geometric quantum gates on superconducting circuits.
//!
//! The crate builds the pulse sequences behind six single-qubit gate schemes
//! (single-loop geometric, two-loop composite geometric, optimized composite
//! geometric with a free inter-loop angle `k`, each in two path
//! configurations, plus plain dynamical gates), evolves them under systematic
//! Rabi/detuning errors and Lindblad decoherence on three physical models
//! (ideal two-level qubit, leaky three-level transmon, pair of capacitively
//! coupled transmons with parametric drive), and scans parameters to locate
//! robustness optima.
//!
//! Module layout mirrors the data flow:
//!
//! * [`matrixcore`] — dense complex matrices, Kronecker products, `expm`.
//! * [`pathgeom`] — Bloch-sphere path parametrization, reverse-engineered
//!   drives, dynamical/geometric phase functionals.
//! * [`pulseforge`] — gate specifications, envelopes, and the sequence
//!   builders with their ideal analytic propagators.
//! * [`models`] — time-dependent Hamiltonians and collapse operators for the
//!   three physical settings, with systematic-error injection.
//! * [`lindblad`] — fixed-step RK4 integrators for the master and
//!   Schrödinger equations.
//! * [`metrics`] — state-averaged gate fidelities (6 single-qubit / 16
//!   two-qubit probe states) and propagator distances.
//! * [`sweeps`] — deterministic, parallel parameter scans (optimal `k`,
//!   robustness curves and maps, two-qubit parameter maps, gate dynamics).
//! * [`cli`] — config-driven batch front end emitting CSV/JSON/SVG.
//! * [`verification`] — independent brute-force oracles used by the test
//!   suites; shares only `matrixcore` with the main build.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --example ideal_gates`.

pub mod matrixcore;
pub mod pathgeom;
pub mod pulseforge;
pub mod models;
pub mod lindblad;
pub mod metrics;
pub mod sweeps;
pub mod cli;
pub mod verification;

pub use matrixcore::ComplexMatrix;
pub use pulseforge::{Envelope, EnvelopeKind, GateSpec, PathVariant, PulseSequence, Scheme};
pub use models::{DecoherenceSpec, HamiltonianFn, NoiseSpec, TransmonSpec, TwoQubitSpec};
pub use lindblad::{DensityMatrix, EvolutionReport};
pub use metrics::FidelityResult;
pub use sweeps::{Scenario, SingleQubitModel, SweepGrid, SweepResult};
