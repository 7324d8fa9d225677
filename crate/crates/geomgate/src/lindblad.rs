//! Fixed-step RK4 integrators for the Lindblad master equation and the
//! Schrödinger equation.
//!
//! The master equation is integrated in the form
//!
//! ```text
//!   drho/dt = i[rho, H(t)] + sum_m kappa_m (A_m rho A_m+ - (1/2){A_m+ A_m, rho})
//! ```
//!
//! i.e. `(1/2) kappa L(A)` with `L(A) = 2 A rho A+ - A+A rho - rho A+A`.
//! Steps are aligned with the Hamiltonian's segment boundaries so a step
//! never straddles a drive discontinuity, which preserves the RK4 order.
//! Density matrices are never renormalized; the trace drift is monitored and
//! integration fails loudly when it exceeds 1e-6.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::matrixcore::{vdot, vnorm, ComplexMatrix};
use crate::models::HamiltonianFn;
use crate::pathgeom::{trajectory_from_states, PathError, PathTrajectory};
use crate::pulseforge::GateSpec;

#[derive(Debug, Error)]
pub enum LindbladError {
    #[error("trace drift {drift:.3e} exceeds 1e-6; reduce the time step (dt = {dt:.3e})")]
    TraceDrift { drift: f64, dt: f64 },
    #[error("state norm drift {drift:.3e} exceeds 1e-6; reduce the time step (dt = {dt:.3e})")]
    NormDrift { drift: f64, dt: f64 },
    #[error("not a density matrix: {0}")]
    BadState(String),
    #[error("collapse operator is {rows}x{cols}, Hamiltonian dimension is {dim}")]
    CollapseDimension { rows: usize, cols: usize, dim: usize },
    #[error("requested duration {duration:.3e} exceeds the Hamiltonian's span {span:.3e}")]
    DurationBeyondSpan { duration: f64, span: f64 },
    #[error("time step must be positive")]
    BadTimeStep,
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Hermitian, unit-trace, positive-semidefinite state matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LindbladError> {
        if !matrix.is_square() {
            return Err(LindbladError::BadState("matrix not square".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(LindbladError::BadState(format!("trace = {tr}")));
        }
        if matrix.hermiticity_deviation() > 1e-10 {
            return Err(LindbladError::BadState("not Hermitian".into()));
        }
        Ok(Self { matrix })
    }

    /// Projector onto a pure state (normalized first).
    pub fn from_pure(state: &[C64]) -> Self {
        let norm = vnorm(state);
        assert!(norm > 0.0, "cannot normalize the zero vector");
        let n = state.len();
        let matrix =
            ComplexMatrix::from_fn(n, n, |i, j| state[i] * state[j].conj() / (norm * norm));
        Self { matrix }
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.matrix.hermiticity_deviation()
    }

    /// Expectation value `<psi|rho|psi>` for a normalized pure state.
    pub fn expectation(&self, state: &[C64]) -> C64 {
        let applied = self.matrix.apply(state);
        vdot(state, &applied)
    }

    /// Estimate of the smallest eigenvalue by power iteration on `I - rho`
    /// (a physical state's spectrum lies in `[0, 1]`, so `I - rho` is
    /// positive with dominant eigenvalue `1 - lambda_min`).
    pub fn min_eigenvalue_estimate(&self) -> f64 {
        let n = self.dim();
        let m = ComplexMatrix::identity(n).sub(&self.matrix);
        let mut v: Vec<C64> = (0..n)
            .map(|i| C64::new(1.0 + 0.37 * (i as f64 + 1.0).sin(), 0.2 * (i as f64).cos()))
            .collect();
        let norm = vnorm(&v);
        v.iter_mut().for_each(|x| *x /= norm);
        let mut w = vec![C64::new(0.0, 0.0); n];
        for _ in 0..200 {
            m.apply_into(&v, &mut w);
            let norm = vnorm(&w);
            if norm < 1e-300 {
                return 1.0; // I - rho annihilates everything (rho = I, n = 1)
            }
            for (a, b) in v.iter_mut().zip(&w) {
                *a = b / norm;
            }
        }
        m.apply_into(&v, &mut w);
        1.0 - vdot(&v, &w).re
    }
}

/// Outcome of one master-equation integration.
#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub final_state: DensityMatrix,
    /// Largest `|tr(rho) - 1|` seen along the run.
    pub trace_drift: f64,
    pub steps: usize,
    /// Optional sampled observables `(time, values)`.
    pub samples: Option<Vec<(f64, Vec<f64>)>>,
}

struct CollapseChannel {
    rate: f64,
    entries: Vec<(usize, usize, C64)>,
}

struct DissipatorPrep {
    channels: Vec<CollapseChannel>,
    /// Diagonal of `(1/2) sum_m kappa_m A_m+ A_m` when it is diagonal
    /// (true for every operator set in scope), else the full matrix.
    g_diag: Option<Vec<f64>>,
    g_full: Option<ComplexMatrix>,
}

fn prep_dissipator(
    collapse: &[(f64, ComplexMatrix)],
    dim: usize,
) -> Result<DissipatorPrep, LindbladError> {
    let mut channels = Vec::new();
    let mut g = ComplexMatrix::zeros(dim, dim);
    for (rate, a) in collapse {
        if a.rows() != dim || a.cols() != dim {
            return Err(LindbladError::CollapseDimension {
                rows: a.rows(),
                cols: a.cols(),
                dim,
            });
        }
        if *rate == 0.0 {
            continue;
        }
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = a.get(i, j);
                if v.norm_sqr() > 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        g.add_scaled_assign(C64::new(rate / 2.0, 0.0), &a.adjoint().dot(a));
        channels.push(CollapseChannel {
            rate: *rate,
            entries,
        });
    }
    let mut diagonal = true;
    'outer: for i in 0..dim {
        for j in 0..dim {
            if i != j && g.get(i, j).norm_sqr() > 0.0 {
                diagonal = false;
                break 'outer;
            }
        }
    }
    Ok(DissipatorPrep {
        channels,
        g_diag: diagonal.then(|| (0..dim).map(|i| g.get(i, i).re).collect()),
        g_full: (!diagonal).then_some(g),
    })
}

/// `out = i (rho H - H rho) + sum_m kappa_m (A rho A+ ...) - (G rho + rho G)`.
#[allow(clippy::too_many_arguments)]
fn lindblad_rhs(
    rho: &ComplexMatrix,
    h: &ComplexMatrix,
    pattern: Option<&[(usize, usize)]>,
    prep: &DissipatorPrep,
    t1: &mut ComplexMatrix,
    t2: &mut ComplexMatrix,
    out: &mut ComplexMatrix,
) {
    let n = rho.rows();
    match pattern {
        Some(pat) => {
            t1.fill_zero();
            t2.fill_zero();
            for &(i, j) in pat {
                let hij = h.get(i, j);
                if hij.re == 0.0 && hij.im == 0.0 {
                    continue;
                }
                for r in 0..n {
                    t1.add_to(r, j, rho.get(r, i) * hij); // rho H
                }
                for c in 0..n {
                    t2.add_to(i, c, hij * rho.get(j, c)); // H rho
                }
            }
        }
        None => {
            rho.matmul_into(h, t1);
            h.matmul_into(rho, t2);
        }
    }
    out.fill_zero();
    for i in 0..n {
        for j in 0..n {
            let c = t1.get(i, j) - t2.get(i, j);
            out.set(i, j, C64::new(-c.im, c.re)); // i * c
        }
    }
    for ch in &prep.channels {
        // t1 = A rho
        t1.fill_zero();
        for &(i, j, a) in &ch.entries {
            for c in 0..n {
                t1.add_to(i, c, a * rho.get(j, c));
            }
        }
        // out += kappa (A rho) A+
        for &(k_row, l, a) in &ch.entries {
            let s = a.conj() * ch.rate;
            for r in 0..n {
                out.add_to(r, k_row, t1.get(r, l) * s);
            }
        }
    }
    match (&prep.g_diag, &prep.g_full) {
        (Some(gd), _) => {
            for i in 0..n {
                for j in 0..n {
                    let s = gd[i] + gd[j];
                    if s != 0.0 {
                        out.add_to(i, j, rho.get(i, j) * C64::new(-s, 0.0));
                    }
                }
            }
        }
        (None, Some(g)) => {
            g.matmul_into(rho, t1);
            rho.matmul_into(g, t2);
            for i in 0..n {
                for j in 0..n {
                    out.add_to(i, j, -(t1.get(i, j) + t2.get(i, j)));
                }
            }
        }
        _ => {}
    }
}

/// Per-segment stepping schedule `(segment index, start, step, count)`,
/// clipped to `duration`, with uniform steps inside each segment.
fn step_plan(
    h: &HamiltonianFn,
    duration: f64,
    dt: f64,
) -> Result<Vec<(usize, f64, f64, usize)>, LindbladError> {
    if dt <= 0.0 {
        return Err(LindbladError::BadTimeStep);
    }
    let span = h.total_duration();
    if duration > span * (1.0 + 1e-9) {
        return Err(LindbladError::DurationBeyondSpan { duration, span });
    }
    let mut plan = Vec::new();
    for (idx, seg) in h.segments().iter().enumerate() {
        if seg.t_start >= duration {
            break;
        }
        let end = seg.t_end.min(duration);
        let len = end - seg.t_start;
        if len <= 0.0 {
            continue;
        }
        let n = (len / dt).ceil().max(1.0) as usize;
        plan.push((idx, seg.t_start, len / n as f64, n));
    }
    Ok(plan)
}

/// Integrate the master equation over `[0, duration]` with steps of at most
/// `dt`, aligned to the Hamiltonian's segments.
pub fn evolve_lindblad(
    h: &HamiltonianFn,
    collapse: &[(f64, ComplexMatrix)],
    rho0: &DensityMatrix,
    duration: f64,
    dt: f64,
) -> Result<EvolutionReport, LindbladError> {
    evolve_lindblad_sampled(h, collapse, rho0, duration, dt, usize::MAX, |_, _| {})
}

/// As [`evolve_lindblad`], invoking `observe(t, rho)` at `t = 0`, after
/// every `stride`-th step, and at the end.
pub fn evolve_lindblad_sampled(
    h: &HamiltonianFn,
    collapse: &[(f64, ComplexMatrix)],
    rho0: &DensityMatrix,
    duration: f64,
    dt: f64,
    stride: usize,
    mut observe: impl FnMut(f64, &ComplexMatrix),
) -> Result<EvolutionReport, LindbladError> {
    let n = h.dim();
    if rho0.dim() != n {
        return Err(LindbladError::BadState(format!(
            "state dimension {} vs Hamiltonian dimension {}",
            rho0.dim(),
            n
        )));
    }
    let prep = prep_dissipator(collapse, n)?;
    let pattern = h.nonzero_pattern();
    let plan = step_plan(h, duration, dt)?;
    let total_steps: usize = plan.iter().map(|p| p.3).sum();

    let mut ws_h = ComplexMatrix::zeros(n, n);
    let mut stage = ComplexMatrix::zeros(n, n);
    let mut k: [ComplexMatrix; 4] = std::array::from_fn(|_| ComplexMatrix::zeros(n, n));
    let mut t1 = ComplexMatrix::zeros(n, n);
    let mut t2 = ComplexMatrix::zeros(n, n);

    let mut rho = rho0.matrix().clone();
    let mut drift = 0.0f64;
    let mut steps = 0usize;
    observe(0.0, &rho);
    for (seg_idx, t_start, h_step, n_steps) in plan {
        let seg = &h.segments()[seg_idx];
        let half = C64::new(h_step / 2.0, 0.0);
        let full = C64::new(h_step, 0.0);
        for i in 0..n_steps {
            let t = t_start + i as f64 * h_step;
            let [k1, k2, k3, k4] = &mut k;

            seg.fill_at(t, &mut ws_h);
            lindblad_rhs(&rho, &ws_h, pattern, &prep, &mut t1, &mut t2, k1);

            stage.copy_from(&rho);
            stage.add_scaled_assign(half, k1);
            seg.fill_at(t + h_step / 2.0, &mut ws_h);
            lindblad_rhs(&stage, &ws_h, pattern, &prep, &mut t1, &mut t2, k2);

            stage.copy_from(&rho);
            stage.add_scaled_assign(half, k2);
            lindblad_rhs(&stage, &ws_h, pattern, &prep, &mut t1, &mut t2, k3);

            stage.copy_from(&rho);
            stage.add_scaled_assign(full, k3);
            seg.fill_at(t + h_step, &mut ws_h);
            lindblad_rhs(&stage, &ws_h, pattern, &prep, &mut t1, &mut t2, k4);

            let w = h_step / 6.0;
            rho.add_scaled_assign(C64::new(w, 0.0), k1);
            rho.add_scaled_assign(C64::new(2.0 * w, 0.0), k2);
            rho.add_scaled_assign(C64::new(2.0 * w, 0.0), k3);
            rho.add_scaled_assign(C64::new(w, 0.0), k4);
            steps += 1;

            let tr = rho.trace();
            drift = drift.max((tr.re - 1.0).hypot(tr.im));
            if drift > 1e-6 {
                return Err(LindbladError::TraceDrift { drift, dt });
            }
            if steps.is_multiple_of(stride) && steps != total_steps {
                observe(t + h_step, &rho);
            }
        }
    }
    observe(duration, &rho);
    Ok(EvolutionReport {
        final_state: DensityMatrix::from_matrix_unchecked(rho),
        trace_drift: drift,
        steps,
        samples: None,
    })
}

/// Integrate the Schrödinger equation `i d|psi>/dt = H(t)|psi>`.
pub fn evolve_unitary(
    h: &HamiltonianFn,
    psi0: &[C64],
    duration: f64,
    dt: f64,
) -> Result<Vec<C64>, LindbladError> {
    evolve_unitary_sampled(h, psi0, duration, dt, usize::MAX, |_, _| {})
}

/// As [`evolve_unitary`], invoking `observe(t, psi)` at `t = 0`, after every
/// `stride`-th step, and at the end.
pub fn evolve_unitary_sampled(
    h: &HamiltonianFn,
    psi0: &[C64],
    duration: f64,
    dt: f64,
    stride: usize,
    mut observe: impl FnMut(f64, &[C64]),
) -> Result<Vec<C64>, LindbladError> {
    let n = h.dim();
    if psi0.len() != n {
        return Err(LindbladError::BadState(format!(
            "state dimension {} vs Hamiltonian dimension {}",
            psi0.len(),
            n
        )));
    }
    let norm0 = vnorm(psi0);
    let plan = step_plan(h, duration, dt)?;
    let total_steps: usize = plan.iter().map(|p| p.3).sum();
    let mut psi = psi0.to_vec();
    let mut hmat = ComplexMatrix::zeros(n, n);
    let mut stage = vec![C64::new(0.0, 0.0); n];
    let mut k: [Vec<C64>; 4] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n]);
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut steps = 0usize;

    fn rhs(hm: &ComplexMatrix, v: &[C64], out: &mut [C64], tmp: &mut [C64]) {
        hm.apply_into(v, tmp);
        for (o, x) in out.iter_mut().zip(tmp.iter()) {
            *o = C64::new(x.im, -x.re); // -i H v
        }
    }

    observe(0.0, &psi);
    for (seg_idx, t_start, h_step, n_steps) in plan {
        let seg = &h.segments()[seg_idx];
        for i in 0..n_steps {
            let t = t_start + i as f64 * h_step;
            seg.fill_at(t, &mut hmat);
            rhs(&hmat, &psi, &mut k[0], &mut tmp);
            for j in 0..n {
                stage[j] = psi[j] + k[0][j] * (h_step / 2.0);
            }
            seg.fill_at(t + h_step / 2.0, &mut hmat);
            rhs(&hmat, &stage, &mut k[1], &mut tmp);
            for j in 0..n {
                stage[j] = psi[j] + k[1][j] * (h_step / 2.0);
            }
            rhs(&hmat, &stage, &mut k[2], &mut tmp);
            for j in 0..n {
                stage[j] = psi[j] + k[2][j] * h_step;
            }
            seg.fill_at(t + h_step, &mut hmat);
            rhs(&hmat, &stage, &mut k[3], &mut tmp);
            let w = h_step / 6.0;
            for j in 0..n {
                psi[j] += (k[0][j] + (k[1][j] + k[2][j]) * 2.0 + k[3][j]) * w;
            }
            steps += 1;
            let drift = (vnorm(&psi) - norm0).abs();
            if drift > 1e-6 {
                return Err(LindbladError::NormDrift { drift, dt });
            }
            if steps.is_multiple_of(stride) && steps != total_steps {
                observe(t + h_step, &psi);
            }
        }
    }
    observe(duration, &psi);
    Ok(psi)
}

/// Simulate the dressed state that starts at `(alpha0, beta0)` under a
/// noiseless two-level Hamiltonian and extract its Bloch-sphere trajectory,
/// sampled at every integration step.
pub fn dressed_state_trajectory(
    h: &HamiltonianFn,
    gate: &GateSpec,
    dt: f64,
) -> Result<PathTrajectory, LindbladError> {
    assert_eq!(h.dim(), 2, "dressed-state trajectories are two-level");
    let psi0 = [
        C64::new((gate.alpha0 / 2.0).cos(), 0.0),
        C64::from_polar((gate.alpha0 / 2.0).sin(), gate.beta0),
    ];
    let mut samples: Vec<(f64, [C64; 2])> = Vec::new();
    evolve_unitary_sampled(h, &psi0, h.total_duration(), dt, 1, |t, psi| {
        if samples.last().is_none_or(|&(t0, _)| t > t0) {
            samples.push((t, [psi[0], psi[1]]));
        }
    })?;
    Ok(trajectory_from_states(&samples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::pauli_x;
    use crate::models::{
        collapse_operators, ideal_qubit_hamiltonian, DecoherenceSpec, DissipationSetting,
        NoiseSpec,
    };
    use crate::pulseforge::{build_ocngqg, Envelope, GateSpec, PathVariant};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ket(n: usize, i: usize) -> Vec<C64> {
        let mut v = vec![c(0.0, 0.0); n];
        v[i] = c(1.0, 0.0);
        v
    }

    #[test]
    fn free_evolution_is_identity() {
        let h = HamiltonianFn::constant(ComplexMatrix::zeros(2, 2), 1.0);
        let rho0 = DensityMatrix::from_pure(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let rep = evolve_lindblad(&h, &[], &rho0, 1.0, 0.01).unwrap();
        assert!(rep.final_state.matrix().sub(rho0.matrix()).norm_max() < 1e-14);
        assert!(rep.trace_drift < 1e-14);
    }

    #[test]
    fn rabi_pi_pulse_flips_the_qubit() {
        // H = (Omega/2) X over T = pi/Omega maps |0> to |1>
        let omega = 2.0 * PI * 50e6;
        let h = HamiltonianFn::constant(pauli_x().scaled(c(omega / 2.0, 0.0)), PI / omega);
        let rho0 = DensityMatrix::from_pure(&ket(2, 0));
        let rep = evolve_lindblad(&h, &[], &rho0, PI / omega, 0.02 / omega).unwrap();
        let p1 = rep.final_state.expectation(&ket(2, 1)).re;
        assert!((p1 - 1.0).abs() < 1e-8, "p1 = {p1}");
    }

    #[test]
    fn amplitude_damping_matches_the_analytic_solution() {
        // kappa (A rho A+ - {A+A, rho}/2) with A = |0><1| decays the excited
        // population as e^{-kappa T}
        let kappa = 2.0 * PI * 2e3;
        let t_final = 1.0e-4; // kappa*T ~ 1.26
        let dec = DecoherenceSpec::new(0.0, kappa);
        let ops = collapse_operators(DissipationSetting::IdealQubit, &dec);
        let h = HamiltonianFn::constant(ComplexMatrix::zeros(2, 2), t_final);
        let rho0 = DensityMatrix::from_pure(&ket(2, 1));
        let rep = evolve_lindblad(&h, &ops, &rho0, t_final, t_final / 4000.0).unwrap();
        let p1 = rep.final_state.expectation(&ket(2, 1)).re;
        let want = crate::verification::damping_oracle(kappa, t_final);
        assert!((p1 - want).abs() < 1e-8, "p1 = {p1}, want {want}");
    }

    #[test]
    fn rk4_order_is_four() {
        // halving the step shrinks the Rabi-test error by roughly 2^4; the
        // error is measured entry-wise at a quarter rotation, where every
        // density-matrix entry responds linearly to the state error
        let omega = 1.0;
        let t_final = PI / 2.0;
        let h = HamiltonianFn::constant(pauli_x().scaled(c(omega / 2.0, 0.0)), t_final);
        let rho0 = DensityMatrix::from_pure(&ket(2, 0));
        let theta = omega * t_final;
        let exact = [
            c((theta / 2.0).cos(), 0.0),
            c(0.0, -(theta / 2.0).sin()),
        ];
        let rho_exact = DensityMatrix::from_pure(&exact);
        let err = |dt: f64| {
            let rep = evolve_lindblad(&h, &[], &rho0, t_final, dt).unwrap();
            rep.final_state.matrix().sub(rho_exact.matrix()).norm_max()
        };
        let ratio = err(t_final / 20.0) / err(t_final / 40.0);
        assert!((12.0..=20.0).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn lindblad_and_unitary_agree_without_decoherence() {
        let gate = GateSpec::h_gate();
        let omega = 2.0 * PI * 60e6;
        let seq = build_ocngqg(&gate, 1.3, PathVariant::A, Envelope::sin_squared(omega)).unwrap();
        let h = ideal_qubit_hamiltonian(&seq, &NoiseSpec::new(0.05, -0.03));
        let dt = 0.02 / omega;
        let psi0 = [c(0.8, 0.0), c(0.36, 0.48)];
        let t_final = seq.total_duration();
        let psi = evolve_unitary(&h, &psi0, t_final, dt).unwrap();
        let rho = evolve_lindblad(&h, &[], &DensityMatrix::from_pure(&psi0), t_final, dt)
            .unwrap()
            .final_state;
        let fid = rho.expectation(&psi).re / vnorm(&psi).powi(2);
        assert!((fid - 1.0).abs() < 1e-8, "fidelity gap {}", 1.0 - fid);
    }

    #[test]
    fn unitary_evolution_of_the_phase_gate() {
        // |0> is an eigenstate of the ideal S propagator: picks up e^{-i pi/4}
        let gate = GateSpec::s_gate();
        let omega = 2.0 * PI * 60e6;
        let seq = build_ocngqg(&gate, 1.13 * PI, PathVariant::A, Envelope::square(omega)).unwrap();
        let h = ideal_qubit_hamiltonian(&seq, &NoiseSpec::none());
        let psi = evolve_unitary(&h, &ket(2, 0), seq.total_duration(), 0.02 / omega).unwrap();
        let want = C64::from_polar(1.0, -PI / 4.0);
        assert!((psi[0] - want).norm() < 1e-6, "psi0 = {}", psi[0]);
        assert!(psi[1].norm() < 1e-6);
    }

    #[test]
    fn trace_drift_is_caught() {
        // a grossly coarse step on a fast Hamiltonian must fail loudly
        let omega = 1.0e9;
        let h = HamiltonianFn::constant(pauli_x().scaled(c(omega, 0.0)), 1e-5);
        let rho0 = DensityMatrix::from_pure(&ket(2, 0));
        let r = evolve_lindblad(&h, &[], &rho0, 1e-5, 2.0e-8);
        assert!(matches!(r, Err(LindbladError::TraceDrift { .. })));
    }

    #[test]
    fn duration_beyond_span_is_rejected() {
        let h = HamiltonianFn::constant(ComplexMatrix::zeros(2, 2), 1.0);
        let rho0 = DensityMatrix::from_pure(&ket(2, 0));
        assert!(matches!(
            evolve_lindblad(&h, &[], &rho0, 2.0, 0.1),
            Err(LindbladError::DurationBeyondSpan { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        let ok = DensityMatrix::new(ComplexMatrix::identity(2).scaled(c(0.5, 0.0))).unwrap();
        assert!((ok.min_eigenvalue_estimate() - 0.5).abs() < 1e-9);
        let pure = DensityMatrix::from_pure(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((pure.trace().re - 1.0).abs() < 1e-12);
        assert!(pure.min_eigenvalue_estimate() > -1e-12);
    }

    #[test]
    fn sampling_has_no_duplicate_end_point() {
        let h = HamiltonianFn::constant(ComplexMatrix::zeros(2, 2), 1.0);
        let rho0 = DensityMatrix::from_pure(&ket(2, 0));
        let mut times = Vec::new();
        evolve_lindblad_sampled(&h, &[], &rho0, 1.0, 0.25, 1, |t, _| times.push(t)).unwrap();
        assert_eq!(times.len(), 5); // t = 0 plus 4 steps
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert!((times.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dressed_trajectory_of_a_pi_rotation() {
        // constant drive at azimuth phi takes the north pole to the south
        // pole along the meridian beta = phi - pi/2
        let omega = 2.0 * PI * 10e6;
        let gate = GateSpec::new(0.0, 0.0, 0.1).unwrap();
        let phi = 0.7;
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 1, C64::from_polar(omega / 2.0, -phi));
        m.set(1, 0, C64::from_polar(omega / 2.0, phi));
        let h = HamiltonianFn::constant(m, PI / omega);
        let traj = dressed_state_trajectory(&h, &gate, 0.01 / omega).unwrap();
        let (_, last) = traj.samples().last().copied().unwrap();
        assert!((last.alpha - PI).abs() < 1e-6);
        let betas_ok = traj
            .samples()
            .iter()
            .filter(|(_, p)| p.alpha > 0.1 && p.alpha < PI - 0.1)
            .all(|(_, p)| crate::pathgeom::wrap_angle(p.beta - (phi - PI / 2.0)).abs() < 1e-6);
        assert!(betas_ok);
    }
}
