//! Time-dependent Hamiltonians and collapse operators for the three physical
//! settings, with systematic-error injection.
//!
//! * Ideal two-level qubit: `H = -(delta Omega_m / 2) Z +
//!   ((1+eps)/2) Omega(t) (cos(phi) X + sin(phi) Y)` — a resonant drive with
//!   a multiplicative Rabi error `eps` and an additive detuning error
//!   `delta Omega_m`.
//! * Leaky transmon, rotating frame at the (resonant) drive frequency:
//!   anharmonic diagonal `-l(l-1)/2 alpha`, ladder couplings
//!   `sqrt(l)/2 (1+eps) Omega_R(t) e^{-i phi}` with the DRAG-corrected
//!   complex drive, and the detuning error `delta Omega_m (|1><1| + 2|2><2|)`.
//! * Two capacitively coupled transmons in the interaction picture, with a
//!   parametric modulation `e^{i beta cos(nu t + eta)}` on the exchange
//!   terms; on resonance `nu = Delta + alpha_2` the `|11> <-> |02>` exchange
//!   reduces to an effective two-level drive of rate
//!   `g_eff = 2 sqrt(2) g12 J1(beta)`.
//!
//! All frequencies are angular (rad/s).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrixcore::ComplexMatrix;
use crate::pulseforge::PulseSequence;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("transmon needs at least 3 levels to represent the detuning error operator, got {0}")]
    TooFewLevels(usize),
}

/// Systematic error ratios: `epsilon` scales the drive (X error), `delta`
/// sets the detuning in units of the peak drive (Z error).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub delta: f64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self { epsilon, delta }
    }
}

/// Dephasing and decay rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecoherenceSpec {
    pub kappa_z: f64,
    pub kappa_minus: f64,
}

impl DecoherenceSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(kappa_z: f64, kappa_minus: f64) -> Self {
        Self {
            kappa_z,
            kappa_minus,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kappa_z == 0.0 && self.kappa_minus == 0.0
    }
}

/// Truncated transmon: level count, anharmonicity, and peak drive rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonSpec {
    pub levels: usize,
    /// Anharmonicity `alpha` in rad/s.
    pub anharmonicity: f64,
    /// Peak drive `Omega_m` in rad/s (sets the detuning-error scale).
    pub omega_max: f64,
}

/// Two capacitively coupled transmons with a parametric drive on the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitSpec {
    /// Static coupling `g12` in rad/s.
    pub g12: f64,
    /// Detuning `Delta = omega_1 - omega_2` in rad/s.
    pub delta_omega: f64,
    /// Anharmonicity of the first transmon in rad/s.
    pub alpha1: f64,
    /// Anharmonicity of the second transmon in rad/s.
    pub alpha2: f64,
    /// Dimensionless modulation index of the parametric drive.
    pub beta: f64,
    /// Drive frequency in rad/s; `resonant()` pins it to `Delta + alpha_2`.
    pub nu: f64,
}

impl TwoQubitSpec {
    pub fn new(g12: f64, delta_omega: f64, alpha1: f64, alpha2: f64, beta: f64) -> Self {
        Self {
            g12,
            delta_omega,
            alpha1,
            alpha2,
            beta,
            nu: delta_omega + alpha2,
        }
    }

    /// Re-pin the drive to the `nu = Delta + alpha_2` resonance.
    pub fn resonant(mut self) -> Self {
        self.nu = self.delta_omega + self.alpha2;
        self
    }

    /// Effective `|11> <-> |02>` exchange rate `2 sqrt(2) g12 J1(beta)`.
    pub fn effective_coupling(&self) -> f64 {
        2.0 * 2.0f64.sqrt() * self.g12 * bessel_j1(self.beta)
    }
}

/// Bessel function of the first kind, order one, by its ascending power
/// series with terms cut off at 1e-16 relative; well-conditioned for the
/// modulation indices in scope (|beta| <= 5).
pub fn bessel_j1(beta: f64) -> f64 {
    let half = beta / 2.0;
    let mut term = half;
    let mut sum = term;
    let mut m = 1.0f64;
    while term.abs() > 1e-17 * sum.abs().max(1e-300) {
        term *= -(half * half) / (m * (m + 1.0));
        sum += term;
        m += 1.0;
    }
    if beta == 0.0 {
        0.0
    } else {
        sum
    }
}

/// Closure writing a Hamiltonian matrix at a global time.
pub type FillFn = Box<dyn Fn(f64, &mut ComplexMatrix) + Send + Sync>;

/// One contiguous span of a piecewise-defined Hamiltonian. The fill closure
/// receives global time and writes the full matrix.
pub struct HamSegment {
    pub t_start: f64,
    pub t_end: f64,
    fill: FillFn,
}

impl HamSegment {
    pub fn fill_at(&self, t: f64, out: &mut ComplexMatrix) {
        (self.fill)(t, out);
    }
}

/// A Hermitian-valued function of time, piecewise smooth over contiguous
/// segments. Integrators step segment by segment so that no integration step
/// straddles a discontinuity.
pub struct HamiltonianFn {
    dim: usize,
    segments: Vec<HamSegment>,
    /// Index pairs that can be nonzero, when the matrix is sparse enough for
    /// integrators to exploit; `None` means treat as dense.
    nonzero_pattern: Option<Vec<(usize, usize)>>,
}

impl HamiltonianFn {
    pub fn new(dim: usize, segments: Vec<HamSegment>) -> Self {
        Self {
            dim,
            segments,
            nonzero_pattern: None,
        }
    }

    pub fn with_pattern(mut self, pattern: Vec<(usize, usize)>) -> Self {
        self.nonzero_pattern = Some(pattern);
        self
    }

    /// A constant Hamiltonian over `[0, duration]`.
    pub fn constant(matrix: ComplexMatrix, duration: f64) -> Self {
        let dim = matrix.rows();
        let seg = HamSegment {
            t_start: 0.0,
            t_end: duration,
            fill: Box::new(move |_t, out| out.copy_from(&matrix)),
        };
        Self::new(dim, vec![seg])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[HamSegment] {
        &self.segments
    }

    pub fn nonzero_pattern(&self) -> Option<&[(usize, usize)]> {
        self.nonzero_pattern.as_deref()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t_end)
    }

    /// Evaluate at a global time (segment lookup, left-inclusive).
    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        let seg = self
            .segments
            .iter()
            .find(|s| t < s.t_end)
            .or_else(|| self.segments.last());
        if let Some(seg) = seg {
            seg.fill_at(t, &mut out);
        }
        out
    }
}

/// Build the per-segment spans of a pulse sequence, handing each segment
/// closure its local time and duration.
fn sequence_segments<F>(seq: &PulseSequence, make: F) -> Vec<HamSegment>
where
    F: Fn(usize, f64) -> FillFn,
{
    let mut t0 = 0.0;
    let mut out = Vec::with_capacity(seq.segments.len());
    for (i, seg) in seq.segments.iter().enumerate() {
        let fill = make(i, t0);
        out.push(HamSegment {
            t_start: t0,
            t_end: t0 + seg.duration,
            fill,
        });
        t0 += seg.duration;
    }
    out
}

/// Noisy two-level drive Hamiltonian for a pulse sequence:
/// `-(delta Omega_m / 2) Z + ((1+eps)/2) Omega(t) (cos phi X + sin phi Y)`.
pub fn ideal_qubit_hamiltonian(seq: &PulseSequence, noise: &NoiseSpec) -> HamiltonianFn {
    let env = seq.envelope;
    let z_rate = -noise.delta * env.omega_max / 2.0;
    let gain = (1.0 + noise.epsilon) / 2.0;
    let segs = sequence_segments(seq, |i, t0| {
        let seg = seq.segments[i];
        Box::new(move |t, out: &mut ComplexMatrix| {
            let omega = env.amplitude(t - t0, seg.duration);
            let c = C64::from_polar(gain * omega, -seg.phase);
            out.set(0, 0, C64::new(z_rate, 0.0));
            out.set(1, 1, C64::new(-z_rate, 0.0));
            out.set(0, 1, c);
            out.set(1, 0, c.conj());
        })
    });
    if segs.is_empty() {
        // no executable segments: the detuning term alone, instantaneous
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, C64::new(z_rate, 0.0));
        m.set(1, 1, C64::new(-z_rate, 0.0));
        return HamiltonianFn::constant(m, 0.0);
    }
    HamiltonianFn::new(2, segs)
}

/// Rotating-frame leaky-transmon Hamiltonian for a pulse sequence:
/// anharmonic diagonal, DRAG-corrected ladder drive, and the detuning-error
/// level shift `delta Omega_m diag(0, 1, 2, ...)`.
pub fn transmon_hamiltonian(
    seq: &PulseSequence,
    noise: &NoiseSpec,
    spec: &TransmonSpec,
) -> Result<HamiltonianFn, ModelError> {
    let d = spec.levels;
    if d < 3 {
        return Err(ModelError::TooFewLevels(d));
    }
    let env = seq.envelope;
    let gain = 1.0 + noise.epsilon;
    let mut diagonal = vec![0.0f64; d];
    for (l, slot) in diagonal.iter_mut().enumerate() {
        let l_f = l as f64;
        *slot = -l_f * (l_f - 1.0) / 2.0 * spec.anharmonicity + noise.delta * spec.omega_max * l_f;
    }
    let ladder: Vec<f64> = (1..d).map(|l| (l as f64).sqrt() / 2.0).collect();
    let segs = sequence_segments(seq, |i, t0| {
        let seg = seq.segments[i];
        let diagonal = diagonal.clone();
        let ladder = ladder.clone();
        Box::new(move |t, out: &mut ComplexMatrix| {
            out.fill_zero();
            for (l, &v) in diagonal.iter().enumerate() {
                out.set(l, l, C64::new(v, 0.0));
            }
            let omega_r = env.complex_amplitude(t - t0, seg.duration) * gain;
            let phase = C64::from_polar(1.0, -seg.phase);
            for (l, &w) in ladder.iter().enumerate() {
                let c = omega_r * phase * w;
                out.set(l, l + 1, c);
                out.set(l + 1, l, c.conj());
            }
        })
    });
    Ok(HamiltonianFn::new(d, segs))
}

/// Basis index of `|l1 l2>` in the 9-dimensional two-transmon product space.
pub const fn two_transmon_index(l1: usize, l2: usize) -> usize {
    3 * l1 + l2
}

/// Indices of the two-qubit computational subspace `{|00>,|01>,|10>,|11>}`
/// inside the product space.
pub const TWO_QUBIT_COMPUTATIONAL: [usize; 4] = [0, 1, 3, 4];

/// Per-segment drive phases `eta = phi + pi/2` of a two-qubit pulse program,
/// paired with the segment durations.
pub fn eta_schedule(seq: &PulseSequence) -> Vec<(f64, f64)> {
    seq.segments
        .iter()
        .map(|s| (s.duration, s.phase + std::f64::consts::FRAC_PI_2))
        .collect()
}

/// Interaction-picture Hamiltonian of the coupled transmon pair (9x9, both
/// truncated to 3 levels, basis `|l1 l2>` lexicographic):
///
/// `g (|10><01| e^{i D t} + sqrt(2)|20><11| e^{i(D - a1)t}
///    + sqrt(2)|11><02| e^{i(D + a2)t}) e^{i beta cos(nu t + eta(t))} + h.c.`
///
/// with `g = (1+eps) g12` and `D = Delta + delta g12`; the drive phase
/// `eta(t)` follows the per-segment schedule `eta = phi + pi/2` and the drive
/// frequency stays at the nominal resonance.
pub fn twoqubit_interaction_hamiltonian(
    spec: &TwoQubitSpec,
    seq: &PulseSequence,
    noise: &NoiseSpec,
) -> HamiltonianFn {
    let g = (1.0 + noise.epsilon) * spec.g12;
    let delta_eff = spec.delta_omega + noise.delta * spec.g12;
    let (alpha1, alpha2, beta, nu) = (spec.alpha1, spec.alpha2, spec.beta, spec.nu);
    let sqrt2 = 2.0f64.sqrt();
    let segs = sequence_segments(seq, |i, _t0| {
        let eta = seq.segments[i].phase + std::f64::consts::FRAC_PI_2;
        Box::new(move |t, out: &mut ComplexMatrix| {
            out.fill_zero();
            let mod_phase = beta * (nu * t + eta).cos();
            let e10_01 = C64::from_polar(g, delta_eff * t + mod_phase);
            let e20_11 = C64::from_polar(sqrt2 * g, (delta_eff - alpha1) * t + mod_phase);
            let e11_02 = C64::from_polar(sqrt2 * g, (delta_eff + alpha2) * t + mod_phase);
            put_hermitian(out, two_transmon_index(1, 0), two_transmon_index(0, 1), e10_01);
            put_hermitian(out, two_transmon_index(2, 0), two_transmon_index(1, 1), e20_11);
            put_hermitian(out, two_transmon_index(1, 1), two_transmon_index(0, 2), e11_02);
        })
    });
    HamiltonianFn::new(9, segs).with_pattern(vec![
        (3, 1),
        (1, 3),
        (6, 4),
        (4, 6),
        (4, 2),
        (2, 4),
    ])
}

fn put_hermitian(m: &mut ComplexMatrix, i: usize, j: usize, v: C64) {
    m.set(i, j, v);
    m.set(j, i, v.conj());
}

/// Effective two-level Hamiltonian on `{|11>, |02>}` after the
/// rotating-wave/Bessel reduction at resonance:
/// `(delta g12 / 2) sz + ((1+eps) g_eff / 2)(cos(eta - pi/2) sx +
/// sin(eta - pi/2) sy)`.
pub fn effective_cp_hamiltonian(
    spec: &TwoQubitSpec,
    seq: &PulseSequence,
    noise: &NoiseSpec,
) -> HamiltonianFn {
    let rate = (1.0 + noise.epsilon) * spec.effective_coupling() / 2.0;
    let z_rate = noise.delta * spec.g12 / 2.0;
    let segs = sequence_segments(seq, |i, _t0| {
        let eta = seq.segments[i].phase + std::f64::consts::FRAC_PI_2;
        Box::new(move |_t, out: &mut ComplexMatrix| {
            // <0~|H|1~> = (rate) e^{-i(eta - pi/2)} on (|11>, |02>)
            let c = C64::from_polar(rate, -(eta - std::f64::consts::FRAC_PI_2));
            out.set(0, 0, C64::new(z_rate, 0.0));
            out.set(1, 1, C64::new(-z_rate, 0.0));
            out.set(0, 1, c);
            out.set(1, 0, c.conj());
        })
    });
    HamiltonianFn::new(2, segs)
}

/// The effective two-level model embedded in the 9-dimensional product space
/// (indices 4 = `|11>`, 2 = `|02>`); every other basis state is stationary.
pub fn effective_cp_embedded(
    spec: &TwoQubitSpec,
    seq: &PulseSequence,
    noise: &NoiseSpec,
) -> HamiltonianFn {
    let rate = (1.0 + noise.epsilon) * spec.effective_coupling() / 2.0;
    let z_rate = noise.delta * spec.g12 / 2.0;
    let segs = sequence_segments(seq, |i, _t0| {
        let eta = seq.segments[i].phase + std::f64::consts::FRAC_PI_2;
        Box::new(move |_t, out: &mut ComplexMatrix| {
            out.fill_zero();
            let c = C64::from_polar(rate, -(eta - std::f64::consts::FRAC_PI_2));
            let (i11, i02) = (two_transmon_index(1, 1), two_transmon_index(0, 2));
            out.set(i11, i11, C64::new(z_rate, 0.0));
            out.set(i02, i02, C64::new(-z_rate, 0.0));
            out.set(i11, i02, c);
            out.set(i02, i11, c.conj());
        })
    });
    HamiltonianFn::new(9, segs).with_pattern(vec![(4, 4), (2, 2), (4, 2), (2, 4)])
}

/// Physical setting selector for [`collapse_operators`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DissipationSetting {
    IdealQubit,
    Transmon(usize),
    TwoTransmon,
}

/// Collapse operators with their rates. Qubit: `A_z = |0><0| - |1><1|`,
/// `A_- = |0><1|`. Transmon: `A_z = sum l |l><l|`,
/// `A_- = sum sqrt(l) |l-1><l|`. Two transmons: the transmon pair tensored
/// with identity on the partner, four operators. Zero-rate entries are
/// dropped.
pub fn collapse_operators(
    setting: DissipationSetting,
    dec: &DecoherenceSpec,
) -> Vec<(f64, ComplexMatrix)> {
    let mut ops = Vec::new();
    match setting {
        DissipationSetting::IdealQubit => {
            ops.push((dec.kappa_z, crate::matrixcore::pauli_z()));
            let mut a = ComplexMatrix::zeros(2, 2);
            a.set(0, 1, C64::new(1.0, 0.0));
            ops.push((dec.kappa_minus, a));
        }
        DissipationSetting::Transmon(d) => {
            ops.push((dec.kappa_z, transmon_dephasing_op(d)));
            ops.push((dec.kappa_minus, transmon_decay_op(d)));
        }
        DissipationSetting::TwoTransmon => {
            let i3 = ComplexMatrix::identity(3);
            let az = transmon_dephasing_op(3);
            let am = transmon_decay_op(3);
            ops.push((dec.kappa_z, az.kron(&i3)));
            ops.push((dec.kappa_minus, am.kron(&i3)));
            ops.push((dec.kappa_z, i3.kron(&az)));
            ops.push((dec.kappa_minus, i3.kron(&am)));
        }
    }
    ops.retain(|(rate, _)| *rate > 0.0);
    ops
}

fn transmon_dephasing_op(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn transmon_decay_op(d: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(d, d);
    for l in 1..d {
        a.set(l - 1, l, C64::new((l as f64).sqrt(), 0.0));
    }
    a
}
