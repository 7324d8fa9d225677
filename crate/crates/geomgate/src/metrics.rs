//! State-averaged gate fidelities and propagator distances.
//!
//! Single-qubit fidelity averages `<psi|U+ rho(tau) U|psi>` over the six
//! probe states `{|0>, |1>, (|0>+i|1>)/sqrt(2), (|0>-i|1>)/sqrt(2),
//! (|0>+|1>)/sqrt(2), (|0>-|1>)/sqrt(2)}`, an over-complete basis that pins
//! the action of the gate on all three axes. The two-qubit fidelity averages
//! over the 16 products of `{|0>, |1>, (|0>-i|1>)/sqrt(2),
//! (|0>+|1>)/sqrt(2)}` per qubit.
//!
//! On leaky models the target unitary is embedded as the identity on the
//! leakage levels, so leaked population simply reduces the overlap.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lindblad::{DensityMatrix, LindbladError};
use crate::matrixcore::ComplexMatrix;
use crate::models::TWO_QUBIT_COMPUTATIONAL;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("target is not unitary (deviation {0:.3e})")]
    NonUnitaryTarget(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("per-state overlap has imaginary residue {0:.3e}")]
    ComplexOverlap(f64),
    #[error(transparent)]
    Evolution(#[from] LindbladError),
}

/// Gate fidelity with the individual probe-state overlaps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub per_state: Vec<f64>,
}

impl FidelityResult {
    fn from_overlaps(per_state: Vec<f64>) -> Self {
        let fidelity = per_state.iter().sum::<f64>() / per_state.len() as f64;
        Self {
            fidelity,
            per_state,
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The six single-qubit probe states, in the fixed reporting order.
pub fn six_probe_states() -> [[C64; 2]; 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(r, 0.0), c(0.0, r)],
        [c(r, 0.0), c(0.0, -r)],
        [c(r, 0.0), c(r, 0.0)],
        [c(r, 0.0), c(-r, 0.0)],
    ]
}

/// The four single-qubit factors of the two-qubit probe set.
pub fn two_qubit_probe_factors() -> [[C64; 2]; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(r, 0.0), c(0.0, -r)],
        [c(r, 0.0), c(r, 0.0)],
    ]
}

/// Embed a state on the computational levels into a larger space; the map
/// sends computational index `i` to full-space index `map[i]`.
pub fn embed_state(state: &[C64], dim: usize, map: &[usize]) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); dim];
    for (i, &v) in state.iter().enumerate() {
        out[map[i]] = v;
    }
    out
}

/// Embed a unitary on the computational levels as the identity elsewhere.
pub fn embed_unitary(u: &ComplexMatrix, dim: usize, map: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(dim);
    for &m in &map[..u.rows()] {
        out.set(m, m, c(0.0, 0.0));
    }
    for i in 0..u.rows() {
        for j in 0..u.cols() {
            out.set(map[i], map[j], u.get(i, j));
        }
    }
    out
}

fn check_unitary(target: &ComplexMatrix) -> Result<(), MetricsError> {
    let dev = target.unitarity_deviation();
    if dev > 1e-8 {
        return Err(MetricsError::NonUnitaryTarget(dev));
    }
    Ok(())
}

fn average_overlaps<F>(
    states: Vec<Vec<C64>>,
    targets: Vec<Vec<C64>>,
    run: F,
) -> Result<FidelityResult, MetricsError>
where
    F: Fn(&[C64]) -> Result<DensityMatrix, LindbladError> + Sync,
{
    // probe evolutions run in parallel; the average is taken in the fixed
    // state order, so the result does not depend on scheduling
    let overlaps: Vec<Result<f64, MetricsError>> = states
        .par_iter()
        .zip(targets.par_iter())
        .map(|(psi0, want)| {
            let rho = run(psi0)?;
            let overlap = rho.expectation(want);
            if overlap.im.abs() > 1e-10 {
                return Err(MetricsError::ComplexOverlap(overlap.im));
            }
            Ok(overlap.re)
        })
        .collect();
    let per_state = overlaps.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(FidelityResult::from_overlaps(per_state))
}

/// Six-state average gate fidelity of a single-qubit gate.
///
/// `run` evolves an initial (embedded, pure) state to its final density
/// matrix on a `dim`-level model whose computational subspace is the first
/// two levels; `target` is the ideal 2x2 unitary.
pub fn single_qubit_fidelity<F>(
    target: &ComplexMatrix,
    dim: usize,
    run: F,
) -> Result<FidelityResult, MetricsError>
where
    F: Fn(&[C64]) -> Result<DensityMatrix, LindbladError> + Sync,
{
    if target.rows() != 2 || target.cols() != 2 {
        return Err(MetricsError::Dimension(format!(
            "target is {}x{}, want 2x2",
            target.rows(),
            target.cols()
        )));
    }
    if dim < 2 {
        return Err(MetricsError::Dimension(format!("model dimension {dim} < 2")));
    }
    check_unitary(target)?;
    let map = [0usize, 1];
    let mut states = Vec::with_capacity(6);
    let mut targets = Vec::with_capacity(6);
    for psi in six_probe_states() {
        states.push(embed_state(&psi, dim, &map));
        let rotated = target.apply(&psi);
        targets.push(embed_state(&rotated, dim, &map));
    }
    average_overlaps(states, targets, run)
}

/// Sixteen-state average gate fidelity of a two-qubit gate on the
/// 9-dimensional pair-of-transmons model.
///
/// `target` is the ideal 4x4 unitary on the computational subspace
/// `{|00>, |01>, |10>, |11>}`.
pub fn two_qubit_fidelity<F>(
    target: &ComplexMatrix,
    run: F,
) -> Result<FidelityResult, MetricsError>
where
    F: Fn(&[C64]) -> Result<DensityMatrix, LindbladError> + Sync,
{
    if target.rows() != 4 || target.cols() != 4 {
        return Err(MetricsError::Dimension(format!(
            "target is {}x{}, want 4x4",
            target.rows(),
            target.cols()
        )));
    }
    check_unitary(target)?;
    let factors = two_qubit_probe_factors();
    let mut states = Vec::with_capacity(16);
    let mut targets = Vec::with_capacity(16);
    for a in factors {
        for b in factors {
            let mut psi4 = [c(0.0, 0.0); 4];
            for i in 0..2 {
                for j in 0..2 {
                    psi4[2 * i + j] = a[i] * b[j];
                }
            }
            states.push(embed_state(&psi4, 9, &TWO_QUBIT_COMPUTATIONAL));
            let rotated = target.apply(&psi4);
            targets.push(embed_state(&rotated, 9, &TWO_QUBIT_COMPUTATIONAL));
        }
    }
    average_overlaps(states, targets, run)
}

/// Global-phase-invariant distance `1 - |tr(a+ b)| / dim` between unitaries.
pub fn propagator_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, MetricsError> {
    if a.rows() != b.rows() || a.cols() != b.cols() || !a.is_square() {
        return Err(MetricsError::Dimension(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    check_unitary(a)?;
    check_unitary(b)?;
    let overlap = a.adjoint().dot(b).trace().norm();
    Ok(1.0 - overlap / a.rows() as f64)
}

/// The controlled-phase target `diag(1, 1, 1, e^{-i gamma})` on the two-qubit
/// computational subspace.
pub fn cp_target(gamma: f64) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(4);
    u.set(3, 3, C64::from_polar(1.0, -gamma));
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::{pauli_x, pauli_z};
    use crate::pulseforge::GateSpec;
    use std::f64::consts::PI;

    fn identity_run(psi0: &[C64]) -> Result<DensityMatrix, LindbladError> {
        Ok(DensityMatrix::from_pure(psi0))
    }

    #[test]
    fn identity_gate_has_unit_fidelity() {
        let f = single_qubit_fidelity(&ComplexMatrix::identity(2), 2, identity_run).unwrap();
        assert!((f.fidelity - 1.0).abs() < 1e-14);
        assert_eq!(f.per_state.len(), 6);
        assert!(f
            .per_state
            .iter()
            .all(|p| (*p - 1.0).abs() < 1e-14));
    }

    #[test]
    fn fidelity_is_the_mean_of_per_state_overlaps() {
        // apply X while the target is the identity: only |+> and |-> survive
        // (the circular states map to their orthogonal partners)
        let run = |psi0: &[C64]| {
            let flipped = pauli_x().apply(psi0);
            Ok(DensityMatrix::from_pure(&flipped))
        };
        let f = single_qubit_fidelity(&ComplexMatrix::identity(2), 2, run).unwrap();
        let mean = f.per_state.iter().sum::<f64>() / 6.0;
        assert!((f.fidelity - mean).abs() < 1e-15);
        assert!((f.fidelity - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_invariant_under_global_phase_of_target() {
        let u = GateSpec::h_gate().target_unitary();
        let run = |psi0: &[C64]| {
            let out = GateSpec::h_gate().target_unitary().apply(psi0);
            Ok(DensityMatrix::from_pure(&out))
        };
        let f1 = single_qubit_fidelity(&u, 2, run).unwrap();
        let phased = u.scaled(C64::from_polar(1.0, 1.234));
        let f2 = single_qubit_fidelity(&phased, 2, run).unwrap();
        assert!((f1.fidelity - f2.fidelity).abs() < 1e-12);
        assert!((f1.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_target_is_rejected() {
        let m = ComplexMatrix::identity(2).scaled(C64::new(0.5, 0.0));
        assert!(matches!(
            single_qubit_fidelity(&m, 2, identity_run),
            Err(MetricsError::NonUnitaryTarget(_))
        ));
    }

    #[test]
    fn leakage_counts_as_loss() {
        // move |1> population to the leakage level: the |1> probe fully
        // leaks, the equator probes keep half their weight
        let run = |psi0: &[C64]| {
            let mut out = psi0.to_vec();
            out.swap(1, 2);
            Ok(DensityMatrix::from_pure(&out))
        };
        let f = single_qubit_fidelity(&ComplexMatrix::identity(2), 3, run).unwrap();
        // per-state: |0> -> 1, |1> -> 0, equator -> 1/4 each
        assert!((f.fidelity - (1.0 + 4.0 * 0.25) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_identity_and_absent_gate() {
        let f = two_qubit_fidelity(&ComplexMatrix::identity(4), identity_run).unwrap();
        assert!((f.fidelity - 1.0).abs() < 1e-14);
        // a missing CP gate (identity evolution against the pi/2 target)
        // scores 25/32: |11> is still an eigenstate up to phase, only the
        // probes with partial |11> weight lose overlap
        let f = two_qubit_fidelity(&cp_target(PI / 2.0), identity_run).unwrap();
        assert!((f.fidelity - 25.0 / 32.0).abs() < 1e-12, "{}", f.fidelity);
    }

    #[test]
    fn propagator_distance_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert!(propagator_distance(&i2, &i2).unwrap() < 1e-15);
        let phased = i2.scaled(C64::from_polar(1.0, 2.1));
        assert!(propagator_distance(&i2, &phased).unwrap() < 1e-15);
        assert!((propagator_distance(&i2, &pauli_x()).unwrap() - 1.0).abs() < 1e-15);
        assert!(propagator_distance(&i2, &ComplexMatrix::identity(3)).is_err());
        // global-phase-discounted equality of Z-rotations
        let a = pauli_z().scaled(C64::new(0.0, -1.0)).expm().unwrap();
        let b = a.scaled(C64::from_polar(1.0, -0.5));
        assert!(propagator_distance(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn embeddings() {
        let u = embed_unitary(&pauli_x(), 3, &[0, 1]);
        assert_eq!(u.get(2, 2), C64::new(1.0, 0.0));
        assert_eq!(u.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(u.get(0, 0), C64::new(0.0, 0.0));
        let s = embed_state(&[c(0.6, 0.0), c(0.0, 0.8)], 9, &[4, 2]);
        assert_eq!(s[4], c(0.6, 0.0));
        assert_eq!(s[2], c(0.0, 0.8));
        assert!(s.iter().enumerate().filter(|(i, _)| *i != 2 && *i != 4).all(|(_, v)| v.norm() == 0.0));
    }
}
