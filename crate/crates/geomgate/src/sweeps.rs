//! Deterministic parameter sweeps: optimal path-parameter search,
//! robustness curves and maps over systematic errors, the two-qubit
//! parameter map, and gate-fidelity dynamics.
//!
//! Grid points are independent tasks evaluated on a rayon pool; results are
//! written into the output array by grid index, so values, argmax and any
//! emitted files are identical across thread counts and repeated runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use thiserror::Error;

use num_complex::Complex64 as C64;

use crate::lindblad::{
    evolve_lindblad, evolve_lindblad_sampled, evolve_unitary, evolve_unitary_sampled,
    DensityMatrix, LindbladError,
};
use crate::matrixcore::ComplexMatrix;
use crate::metrics::{
    cp_target, single_qubit_fidelity, two_qubit_fidelity, FidelityResult, MetricsError,
};
use crate::models::{
    collapse_operators, effective_cp_embedded, ideal_qubit_hamiltonian, transmon_hamiltonian,
    twoqubit_interaction_hamiltonian, DecoherenceSpec, DissipationSetting, HamiltonianFn,
    ModelError, NoiseSpec, TransmonSpec, TwoQubitSpec,
};
use crate::pulseforge::{
    build_cngqg, build_dynamical, build_ngqg, build_ocngqg, segment_block, DynamicalGate,
    Envelope, GateSpec, PathVariant, PulseError, PulseSequence, Scheme,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Evolution(#[from] LindbladError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("bad sweep grid: {0}")]
    BadGrid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Default integrator accuracy: largest Hamiltonian rate times the step.
pub const DEFAULT_PHASE_BUDGET: f64 = 0.02;

/// Integrator step policy: a phase budget relative to the fastest rate in
/// the Hamiltonian, or an absolute override.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub phase_budget: f64,
    pub dt_override: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            phase_budget: DEFAULT_PHASE_BUDGET,
            dt_override: None,
        }
    }
}

impl StepControl {
    pub fn budget(phase_budget: f64) -> Self {
        Self {
            phase_budget,
            dt_override: None,
        }
    }

    pub fn fixed(dt: f64) -> Self {
        Self {
            phase_budget: DEFAULT_PHASE_BUDGET,
            dt_override: Some(dt),
        }
    }

    /// Step for a model whose fastest angular rate is `rate`.
    pub fn step_for(&self, rate: f64) -> f64 {
        self.dt_override
            .unwrap_or(self.phase_budget / rate.max(1e-3))
    }
}

/// One sweep axis: inclusive `[min, max]` with `points` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub unit: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(name: &str, unit: &str, min: f64, max: f64, points: usize) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            min,
            max,
            points,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            return self.min;
        }
        self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    fn validate(&self) -> Result<(), SweepError> {
        if self.points < 2 {
            return Err(SweepError::BadGrid(format!(
                "axis '{}' needs at least 2 points, got {}",
                self.name, self.points
            )));
        }
        if self.min.is_nan() || self.max.is_nan() || self.min >= self.max {
            return Err(SweepError::BadGrid(format!(
                "axis '{}' needs min < max, got [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        Ok(())
    }
}

/// A 1- or 2-axis scan grid plus the frozen scenario parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, String>,
}

impl SweepGrid {
    pub fn new(axes: Vec<Axis>, fixed: BTreeMap<String, String>) -> Result<Self, SweepError> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(SweepError::BadGrid(format!(
                "need 1 or 2 axes, got {}",
                axes.len()
            )));
        }
        for ax in &axes {
            ax.validate()?;
        }
        Ok(Self { axes, fixed })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major coordinates of flat index `i` (last axis fastest).
    pub fn coords(&self, i: usize) -> Vec<f64> {
        match self.axes.len() {
            1 => vec![self.axes[0].value(i)],
            2 => {
                let inner = self.axes[1].points;
                vec![
                    self.axes[0].value(i / inner),
                    self.axes[1].value(i % inner),
                ]
            }
            _ => unreachable!(),
        }
    }
}

/// Scan outcome: fidelity per grid point (row-major) and the best point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub values: Vec<f64>,
    pub argmax: Vec<f64>,
    pub max_fidelity: f64,
}

impl SweepResult {
    fn from_values(grid: SweepGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        // first strict maximum wins, so ties resolve to the smallest
        // coordinates in row-major order
        let mut best = 0usize;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        let argmax = grid.coords(best);
        let max_fidelity = values[best];
        Self {
            grid,
            values,
            argmax,
            max_fidelity,
        }
    }

    /// CSV with one axis column per grid axis plus the fidelity, row-major,
    /// floats at 10 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let names: Vec<&str> = self.grid.axes.iter().map(|a| a.name.as_str()).collect();
        writeln!(w, "{},fidelity", names.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let coords = self.grid.coords(i);
            let cols: Vec<String> = coords
                .iter()
                .chain(std::iter::once(v))
                .map(|x| format!("{x:.9e}"))
                .collect();
            writeln!(w, "{}", cols.join(","))?;
        }
        Ok(())
    }

    /// JSON summary `{argmax, max_fidelity, grid_spec}` with stable key order.
    pub fn summary_json(&self) -> serde_json::Value {
        let mut argmax = serde_json::Map::new();
        for (ax, v) in self.grid.axes.iter().zip(&self.argmax) {
            argmax.insert(ax.name.clone(), serde_json::json!(v));
        }
        serde_json::json!({
            "argmax": argmax,
            "max_fidelity": self.max_fidelity,
            "grid_spec": self.grid,
        })
    }
}

/// Physical model a single-qubit scenario runs on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleQubitModel {
    Ideal,
    Transmon(TransmonSpec),
}

/// A fully pinned single-qubit simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub model: SingleQubitModel,
    pub envelope: Envelope,
    pub noise: NoiseSpec,
    pub decoherence: DecoherenceSpec,
    pub step: StepControl,
}

impl Scenario {
    pub fn ideal(envelope: Envelope) -> Self {
        Self {
            model: SingleQubitModel::Ideal,
            envelope,
            noise: NoiseSpec::none(),
            decoherence: DecoherenceSpec::none(),
            step: StepControl::default(),
        }
    }

    pub fn transmon(spec: TransmonSpec, envelope: Envelope) -> Self {
        Self {
            model: SingleQubitModel::Transmon(spec),
            envelope,
            noise: NoiseSpec::none(),
            decoherence: DecoherenceSpec::none(),
            step: StepControl::default(),
        }
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_decoherence(mut self, dec: DecoherenceSpec) -> Self {
        self.decoherence = dec;
        self
    }

    pub fn with_phase_budget(mut self, budget: f64) -> Self {
        self.step.phase_budget = budget;
        self
    }

    pub fn with_step(mut self, step: StepControl) -> Self {
        self.step = step;
        self
    }

    fn dimension(&self) -> usize {
        match self.model {
            SingleQubitModel::Ideal => 2,
            SingleQubitModel::Transmon(t) => t.levels,
        }
    }

    fn hamiltonian(&self, seq: &PulseSequence) -> Result<HamiltonianFn, SweepError> {
        Ok(match self.model {
            SingleQubitModel::Ideal => ideal_qubit_hamiltonian(seq, &self.noise),
            SingleQubitModel::Transmon(t) => transmon_hamiltonian(seq, &self.noise, &t)?,
        })
    }

    fn collapse(&self) -> Vec<(f64, ComplexMatrix)> {
        let setting = match self.model {
            SingleQubitModel::Ideal => DissipationSetting::IdealQubit,
            SingleQubitModel::Transmon(t) => DissipationSetting::Transmon(t.levels),
        };
        collapse_operators(setting, &self.decoherence)
    }

    /// Step bound from the largest rate in the Hamiltonian.
    pub fn time_step(&self) -> f64 {
        let drive =
            self.envelope.omega_max * (1.0 + self.noise.epsilon.abs() + self.noise.delta.abs());
        let rate = match self.model {
            SingleQubitModel::Ideal => drive,
            SingleQubitModel::Transmon(t) => {
                t.anharmonicity
                    + 2.0f64.sqrt() * drive
                    + t.levels as f64 * self.noise.delta.abs() * t.omega_max
            }
        };
        self.step.step_for(rate)
    }

    /// Six-state average fidelity of one pulse sequence against its gate's
    /// ideal unitary, on this scenario's model.
    pub fn sequence_fidelity(&self, seq: &PulseSequence) -> Result<FidelityResult, SweepError> {
        let h = self.hamiltonian(seq)?;
        let collapse = self.collapse();
        let dt = self.time_step();
        let duration = seq.total_duration();
        let dim = self.dimension();
        let target = seq.gate.target_unitary();
        let result = if collapse.is_empty() {
            single_qubit_fidelity(&target, dim, |psi0| {
                let psi = evolve_unitary(&h, psi0, duration, dt)?;
                Ok(DensityMatrix::from_pure(&psi))
            })?
        } else {
            single_qubit_fidelity(&target, dim, |psi0| {
                Ok(evolve_lindblad(&h, &collapse, &DensityMatrix::from_pure(psi0), duration, dt)?
                    .final_state)
            })?
        };
        Ok(result)
    }

    /// Convenience: build the scheme's sequence and evaluate it.
    pub fn gate_fidelity(&self, run: &SchemeRun, gate: &GateSpec) -> Result<FidelityResult, SweepError> {
        let seq = run.build(gate, self.envelope)?;
        self.sequence_fidelity(&seq)
    }

    fn descriptor(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert(
            "model".into(),
            match self.model {
                SingleQubitModel::Ideal => "ideal".to_string(),
                SingleQubitModel::Transmon(t) => format!("transmon(d={})", t.levels),
            },
        );
        m.insert("envelope".into(), format!("{:?}", self.envelope.kind));
        m.insert("omega_max_rad_s".into(), format!("{:.6e}", self.envelope.omega_max));
        m.insert("epsilon".into(), format!("{}", self.noise.epsilon));
        m.insert("delta".into(), format!("{}", self.noise.delta));
        m.insert("kappa_z_rad_s".into(), format!("{:.6e}", self.decoherence.kappa_z));
        m.insert(
            "kappa_minus_rad_s".into(),
            format!("{:.6e}", self.decoherence.kappa_minus),
        );
        m
    }
}

/// A scheme selection with whatever parameters it needs (path parameter for
/// the optimized composite schemes, loop count for the composite ones).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeRun {
    pub scheme: Scheme,
    pub k: Option<f64>,
    pub loops: usize,
}

impl SchemeRun {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            k: None,
            loops: 2,
        }
    }

    pub fn with_k(scheme: Scheme, k: f64) -> Self {
        Self {
            scheme,
            k: Some(k),
            loops: 2,
        }
    }

    pub fn build(&self, gate: &GateSpec, env: Envelope) -> Result<PulseSequence, PulseError> {
        match self.scheme {
            Scheme::OcngqgA => {
                build_ocngqg(gate, self.k.ok_or(PulseError::MissingK(self.scheme))?, PathVariant::A, env)
            }
            Scheme::OcngqgB => {
                build_ocngqg(gate, self.k.ok_or(PulseError::MissingK(self.scheme))?, PathVariant::B, env)
            }
            Scheme::CngqgA => build_cngqg(gate, self.loops, PathVariant::A, env),
            Scheme::CngqgB => build_cngqg(gate, self.loops, PathVariant::B, env),
            Scheme::NgqgA => Ok(build_ngqg(gate, PathVariant::A, env)),
            Scheme::NgqgB => Ok(build_ngqg(gate, PathVariant::B, env)),
            Scheme::Dg => Ok(build_dynamical(DynamicalGate::from_gate_spec(gate)?, env)),
        }
    }
}

/// Which systematic error the path-parameter search optimizes against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMode {
    X,
    Z,
    Both,
}

impl ErrorMode {
    /// Applies this mode's error selection to magnitude settings.
    pub fn noise(&self, magnitudes: &NoiseSpec) -> NoiseSpec {
        match self {
            ErrorMode::X => NoiseSpec::new(magnitudes.epsilon, 0.0),
            ErrorMode::Z => NoiseSpec::new(0.0, magnitudes.delta),
            ErrorMode::Both => *magnitudes,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ErrorMode::X => "X",
            ErrorMode::Z => "Z",
            ErrorMode::Both => "X&Z",
        }
    }
}

/// Scan the path parameter `k` over `[0, 2 pi]` and return fidelity-vs-k
/// with its argmax; ties resolve to the smallest `k`.
pub fn optimize_k(
    gate: &GateSpec,
    path: PathVariant,
    mode: ErrorMode,
    grid_points: usize,
    scenario: &Scenario,
) -> Result<SweepResult, SweepError> {
    let scen = scenario.with_noise(mode.noise(&scenario.noise));
    let mut fixed = scen.descriptor();
    fixed.insert("error_mode".into(), mode.label().into());
    fixed.insert("path".into(), format!("{path:?}"));
    let grid = SweepGrid::new(vec![Axis::new("k", "rad", 0.0, 2.0 * PI, grid_points)], fixed)?;
    let ks = grid.axes[0].values();
    let scheme = match path {
        PathVariant::A => Scheme::OcngqgA,
        PathVariant::B => Scheme::OcngqgB,
    };
    let values = ks
        .par_iter()
        .map(|&k| {
            scen.gate_fidelity(&SchemeRun::with_k(scheme, k), gate)
                .map(|f| f.fidelity)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult::from_values(grid, values))
}

/// Which error axis a robustness curve scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorAxis {
    Epsilon,
    Delta,
}

impl ErrorAxis {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorAxis::Epsilon => "epsilon",
            ErrorAxis::Delta => "delta",
        }
    }
}

/// Fidelity-vs-error curves, one `SweepResult` per scheme, on a shared grid.
pub fn robustness_curve(
    runs: &[SchemeRun],
    gate: &GateSpec,
    axis: ErrorAxis,
    range: (f64, f64),
    points: usize,
    scenario: &Scenario,
) -> Result<Vec<SweepResult>, SweepError> {
    runs.iter()
        .map(|run| {
            let mut fixed = scenario.descriptor();
            fixed.insert("scheme".into(), run.scheme.label().into());
            if let Some(k) = run.k {
                fixed.insert("k_rad".into(), format!("{k:.9e}"));
            }
            let grid = SweepGrid::new(
                vec![Axis::new(axis.name(), "ratio", range.0, range.1, points)],
                fixed,
            )?;
            let xs = grid.axes[0].values();
            let values = xs
                .par_iter()
                .map(|&x| {
                    let noise = match axis {
                        ErrorAxis::Epsilon => NoiseSpec::new(x, scenario.noise.delta),
                        ErrorAxis::Delta => NoiseSpec::new(scenario.noise.epsilon, x),
                    };
                    scenario
                        .with_noise(noise)
                        .gate_fidelity(run, gate)
                        .map(|f| f.fidelity)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SweepResult::from_values(grid, values))
        })
        .collect()
}

/// Two-dimensional fidelity map over `(epsilon, delta)` for one scheme.
pub fn robustness_map(
    run: &SchemeRun,
    gate: &GateSpec,
    eps_range: (f64, f64),
    delta_range: (f64, f64),
    points_per_axis: usize,
    scenario: &Scenario,
) -> Result<SweepResult, SweepError> {
    let mut fixed = scenario.descriptor();
    fixed.insert("scheme".into(), run.scheme.label().into());
    if let Some(k) = run.k {
        fixed.insert("k_rad".into(), format!("{k:.9e}"));
    }
    let grid = SweepGrid::new(
        vec![
            Axis::new("epsilon", "ratio", eps_range.0, eps_range.1, points_per_axis),
            Axis::new("delta", "ratio", delta_range.0, delta_range.1, points_per_axis),
        ],
        fixed,
    )?;
    let n = grid.len();
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let coords = grid.coords(i);
            scenario
                .with_noise(NoiseSpec::new(coords[0], coords[1]))
                .gate_fidelity(run, gate)
                .map(|f| f.fidelity)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult::from_values(grid, values))
}

/// Whether a two-qubit run uses the full interaction-picture model or the
/// effective two-level reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpModel {
    Full,
    Effective,
}

/// Controlled-phase gate selection: accumulated phase, path parameter, and
/// the underlying sequence scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpGate {
    pub gamma: f64,
    pub k: f64,
    pub scheme: Scheme,
}

impl CpGate {
    pub fn optimized(gamma: f64, k: f64) -> Self {
        Self {
            gamma,
            k,
            scheme: Scheme::OcngqgA,
        }
    }
}

/// The pulse program that drives the `|11> <-> |02>` loop for a CP gate,
/// built at the nominal effective coupling (square envelope; the drive phase
/// schedule switches at segment boundaries).
///
/// The dynamical variant is a single full `2 pi` loop; it shares the
/// single-loop duration and is provided for timing comparisons.
pub fn cp_sequence(gate: &CpGate, spec: &TwoQubitSpec) -> Result<PulseSequence, SweepError> {
    let geff = spec.effective_coupling();
    if geff.is_nan() || geff <= 0.0 {
        return Err(SweepError::BadGrid(format!(
            "effective coupling {geff:.3e} at beta = {}; no finite-duration gate exists",
            spec.beta
        )));
    }
    let env = Envelope::square(geff);
    let gate_spec = GateSpec::new(0.0, 0.0, gate.gamma).map_err(SweepError::Pulse)?;
    let seq = match gate.scheme {
        Scheme::Dg => {
            // single full loop in the auxiliary subspace; shares the
            // single-loop duration
            let area = 2.0 * PI;
            PulseSequence {
                scheme: Scheme::Dg,
                gate: gate_spec,
                k: None,
                envelope: env,
                segments: vec![crate::pulseforge::PulseSegment {
                    area,
                    phase: 0.0,
                    duration: env.duration_for_area(area),
                }],
            }
        }
        _ => SchemeRun::with_k(gate.scheme, gate.k).build(&gate_spec, env)?,
    };
    Ok(seq)
}

/// Integrator step bound for the two-transmon model: the fastest phase in
/// the interaction picture is `|Delta| + alpha + |beta| nu` plus the drive.
fn cp_time_step(spec: &TwoQubitSpec, noise: &NoiseSpec, model: CpModel, step: StepControl) -> f64 {
    let rate = match model {
        CpModel::Full => {
            spec.delta_omega.abs()
                + spec.alpha1.max(spec.alpha2)
                + spec.beta.abs() * spec.nu.abs()
                + 4.0 * spec.g12.abs() * (1.0 + noise.epsilon.abs() + noise.delta.abs())
        }
        CpModel::Effective => {
            spec.effective_coupling().abs() * (1.0 + noise.epsilon.abs())
                + spec.g12.abs() * noise.delta.abs()
        }
    };
    step.step_for(rate)
}

/// Sixteen-state CP gate fidelity on the chosen model.
pub fn cp_fidelity(
    spec: &TwoQubitSpec,
    dec: &DecoherenceSpec,
    gate: &CpGate,
    noise: &NoiseSpec,
    model: CpModel,
    step: StepControl,
) -> Result<FidelityResult, SweepError> {
    let seq = cp_sequence(gate, spec)?;
    let h = match model {
        CpModel::Full => twoqubit_interaction_hamiltonian(spec, &seq, noise),
        CpModel::Effective => effective_cp_embedded(spec, &seq, noise),
    };
    let collapse = collapse_operators(DissipationSetting::TwoTransmon, dec);
    let dt = cp_time_step(spec, noise, model, step);
    let duration = seq.total_duration();
    let target = cp_target(gate.gamma);
    let result = if collapse.is_empty() {
        two_qubit_fidelity(&target, |psi0| {
            let psi = evolve_unitary(&h, psi0, duration, dt)?;
            Ok(DensityMatrix::from_pure(&psi))
        })?
    } else {
        two_qubit_fidelity(&target, |psi0| {
            Ok(evolve_lindblad(&h, &collapse, &DensityMatrix::from_pure(psi0), duration, dt)?
                .final_state)
        })?
    };
    Ok(result)
}

/// Two-dimensional CP fidelity map over detuning and modulation index, with
/// the drive re-pinned to resonance at every grid point.
pub fn cp_parameter_map(
    delta_range: (f64, f64),
    beta_range: (f64, f64),
    points: (usize, usize),
    base: &TwoQubitSpec,
    dec: &DecoherenceSpec,
    gate: &CpGate,
    step: StepControl,
) -> Result<SweepResult, SweepError> {
    let mut fixed = BTreeMap::new();
    fixed.insert("g12_rad_s".into(), format!("{:.6e}", base.g12));
    fixed.insert("alpha1_rad_s".into(), format!("{:.6e}", base.alpha1));
    fixed.insert("alpha2_rad_s".into(), format!("{:.6e}", base.alpha2));
    fixed.insert("k_rad".into(), format!("{:.9e}", gate.k));
    fixed.insert("gamma_rad".into(), format!("{:.9e}", gate.gamma));
    fixed.insert("kappa_z_rad_s".into(), format!("{:.6e}", dec.kappa_z));
    fixed.insert("kappa_minus_rad_s".into(), format!("{:.6e}", dec.kappa_minus));
    fixed.insert("scheme".into(), gate.scheme.label().into());
    let grid = SweepGrid::new(
        vec![
            Axis::new("delta_omega", "rad/s", delta_range.0, delta_range.1, points.0),
            Axis::new("beta", "1", beta_range.0, beta_range.1, points.1),
        ],
        fixed,
    )?;
    let n = grid.len();
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let coords = grid.coords(i);
            let spec = TwoQubitSpec {
                delta_omega: coords[0],
                beta: coords[1],
                ..*base
            }
            .resonant();
            cp_fidelity(&spec, dec, gate, &NoiseSpec::none(), CpModel::Full, step)
                .map(|f| f.fidelity)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult::from_values(grid, values))
}

/// Analytic propagator of the effective loop at time `t` (partial segments
/// included), embedded on the `{|11>, |02>}` levels of the product space.
fn effective_propagator_at(seq: &PulseSequence, geff: f64, t: f64) -> ComplexMatrix {
    let mut u2 = ComplexMatrix::identity(2);
    let mut t0 = 0.0;
    for seg in &seq.segments {
        if t >= t0 + seg.duration {
            u2 = segment_block(seg.area, seg.phase).dot(&u2);
        } else if t > t0 {
            u2 = segment_block(geff * (t - t0), seg.phase).dot(&u2);
            break;
        } else {
            break;
        }
        t0 += seg.duration;
    }
    crate::metrics::embed_unitary(&u2, 9, &[4, 2])
}

/// One fidelity-vs-time series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Gate-fidelity dynamics of the CP gate with its infidelity split into the
/// high-order-oscillation part and the decoherence part.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub series: Vec<TraceSeries>,
    pub final_full: f64,
    pub final_no_decoherence: f64,
    pub final_effective: f64,
    /// `1 - F(full model, no decoherence)`.
    pub hot_infidelity: f64,
    /// `F(no decoherence) - F(full)`.
    pub decoherence_infidelity: f64,
}

/// Evolve the 16 probe states on one model variant, sampling the running
/// fidelity against the analytically evolving ideal states.
fn cp_trace_variant(
    spec: &TwoQubitSpec,
    dec: &DecoherenceSpec,
    gate: &CpGate,
    model: CpModel,
    with_decoherence: bool,
    n_samples: usize,
    step: StepControl,
) -> Result<Vec<(f64, f64)>, SweepError> {
    let seq = cp_sequence(gate, spec)?;
    let geff = spec.effective_coupling();
    let h = match model {
        CpModel::Full => twoqubit_interaction_hamiltonian(spec, &seq, &NoiseSpec::none()),
        CpModel::Effective => effective_cp_embedded(spec, &seq, &NoiseSpec::none()),
    };
    let collapse = if with_decoherence {
        collapse_operators(DissipationSetting::TwoTransmon, dec)
    } else {
        Vec::new()
    };
    let dt = cp_time_step(spec, &NoiseSpec::none(), model, step);
    let duration = seq.total_duration();
    let est_steps = (duration / dt).ceil() as usize;
    let stride = (est_steps / n_samples.max(1)).max(1);

    let factors = crate::metrics::two_qubit_probe_factors();
    let mut probes = Vec::with_capacity(16);
    for a in factors {
        for b in factors {
            let mut psi4 = [C64::new(0.0, 0.0); 4];
            for i in 0..2 {
                for j in 0..2 {
                    psi4[2 * i + j] = a[i] * b[j];
                }
            }
            probes.push(crate::metrics::embed_state(
                &psi4,
                9,
                &crate::models::TWO_QUBIT_COMPUTATIONAL,
            ));
        }
    }

    let per_probe: Vec<Vec<(f64, f64)>> = probes
        .par_iter()
        .map(|psi0| -> Result<Vec<(f64, f64)>, SweepError> {
            let mut series = Vec::new();
            if collapse.is_empty() {
                evolve_unitary_sampled(&h, psi0, duration, dt, stride, |t, psi| {
                    let ideal = effective_propagator_at(&seq, geff, t).apply(psi0);
                    let ov = crate::matrixcore::vdot(&ideal, psi).norm_sqr();
                    series.push((t, ov));
                })?;
            } else {
                let rho0 = DensityMatrix::from_pure(psi0);
                evolve_lindblad_sampled(&h, &collapse, &rho0, duration, dt, stride, |t, rho| {
                    let ideal = effective_propagator_at(&seq, geff, t).apply(psi0);
                    let applied = rho.apply(&ideal);
                    series.push((t, crate::matrixcore::vdot(&ideal, &applied).re));
                })?;
            }
            Ok(series)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let n_pts = per_probe[0].len();
    let mut out = Vec::with_capacity(n_pts);
    for i in 0..n_pts {
        let t = per_probe[0][i].0;
        let f = per_probe.iter().map(|s| s[i].1).sum::<f64>() / per_probe.len() as f64;
        out.push((t, f));
    }
    Ok(out)
}

/// Fidelity-vs-time traces for the full model, the full model without
/// decoherence, and the effective model, with the final infidelity
/// decomposition.
pub fn dynamics_trace(
    spec: &TwoQubitSpec,
    dec: &DecoherenceSpec,
    gate: &CpGate,
    n_samples: usize,
    step: StepControl,
) -> Result<DynamicsTrace, SweepError> {
    let full = cp_trace_variant(spec, dec, gate, CpModel::Full, true, n_samples, step)?;
    let no_dec = cp_trace_variant(spec, dec, gate, CpModel::Full, false, n_samples, step)?;
    let eff = cp_trace_variant(spec, dec, gate, CpModel::Effective, false, n_samples, step)?;
    let final_full = full.last().map(|p| p.1).unwrap_or(f64::NAN);
    let final_no_dec = no_dec.last().map(|p| p.1).unwrap_or(f64::NAN);
    let final_eff = eff.last().map(|p| p.1).unwrap_or(f64::NAN);
    Ok(DynamicsTrace {
        series: vec![
            TraceSeries {
                label: "full".into(),
                points: full,
            },
            TraceSeries {
                label: "no-decoherence".into(),
                points: no_dec,
            },
            TraceSeries {
                label: "effective".into(),
                points: eff,
            },
        ],
        final_full,
        final_no_decoherence: final_no_dec,
        final_effective: final_eff,
        hot_infidelity: 1.0 - final_no_dec,
        decoherence_infidelity: final_no_dec - final_full,
    })
}

/// Transmon pair with the coupling, detuning, anharmonicities and modulation
/// index used throughout the two-qubit runs.
pub fn default_two_qubit_spec() -> TwoQubitSpec {
    TwoQubitSpec::new(
        2.0 * PI * 10e6,
        2.0 * PI * 594e6,
        2.0 * PI * 320e6,
        2.0 * PI * 300e6,
        1.8,
    )
}

/// Transmon defaults for the single-qubit implementation runs.
pub fn default_transmon_spec() -> TransmonSpec {
    TransmonSpec {
        levels: 3,
        anharmonicity: 2.0 * PI * 320e6,
        omega_max: 2.0 * PI * 60e6,
    }
}
