//! Pulse-sequence builders for every gate scheme in scope, together with
//! their ideal analytic propagators and drive sampling.
//!
//! A sequence is an ordered list of segments, each holding a pulse area
//! `∫Ω dt`, a constant drive phase, and the duration implied by the envelope.
//! The geometric schemes trace closed loops on the Bloch sphere built from
//! meridian arcs:
//!
//! * single-loop (`NGQG-A/B`): three segments, areas `(α₀, π, π−α₀)`;
//! * n-loop composite (`CNGQG-A/B`): the single loop cascaded with the
//!   per-loop phase `γ_g/n`;
//! * optimized composite (`OCNGQG-A/B`): seven segments forming two loops
//!   separated by a free angle `k` that tunes error robustness without
//!   changing the ideal gate;
//! * `DG`: plain dynamical compositions for the S and H gates.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::matrixcore::{drive_axis, ComplexMatrix};

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("path parameter k = {0} outside [0, 2*pi]")]
    KOutOfRange(f64),
    #[error("loop count must be at least 1")]
    ZeroLoops,
    #[error("gate spec invalid: {0}")]
    BadGateSpec(String),
    #[error("sample step {dt} too coarse; need dt < {limit} (shortest segment / 100)")]
    SampleStepTooCoarse { dt: f64, limit: f64 },
    #[error("scheme {0:?} requires a path parameter k")]
    MissingK(Scheme),
    #[error("no dynamical composition defined for this gate; use S or H")]
    UnsupportedDynamicalGate,
}

/// Target rotation: axis polar/azimuth angles and rotation half-angle.
///
/// The ideal gate is `exp(-i gamma_g n.sigma)` with
/// `n = (sin a0 cos b0, sin a0 sin b0, cos a0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub alpha0: f64,
    pub beta0: f64,
    pub gamma_g: f64,
}

impl GateSpec {
    pub fn new(alpha0: f64, beta0: f64, gamma_g: f64) -> Result<Self, PulseError> {
        if !(0.0..=PI).contains(&alpha0) {
            return Err(PulseError::BadGateSpec(format!(
                "alpha0 = {alpha0} outside [0, pi]"
            )));
        }
        if gamma_g.abs() >= 2.0 * PI || !gamma_g.is_finite() {
            return Err(PulseError::BadGateSpec(format!(
                "gamma_g = {gamma_g} outside (-2*pi, 2*pi)"
            )));
        }
        Ok(Self {
            alpha0,
            beta0,
            gamma_g,
        })
    }

    /// Phase gate S: rotation by pi/4 about z.
    pub fn s_gate() -> Self {
        Self {
            alpha0: 0.0,
            beta0: 0.0,
            gamma_g: PI / 4.0,
        }
    }

    /// Hadamard: rotation by pi/2 about (x+z)/sqrt(2).
    pub fn h_gate() -> Self {
        Self {
            alpha0: PI / 4.0,
            beta0: 0.0,
            gamma_g: PI / 2.0,
        }
    }

    /// Rotation axis as a unit 3-vector.
    pub fn axis(&self) -> [f64; 3] {
        [
            self.alpha0.sin() * self.beta0.cos(),
            self.alpha0.sin() * self.beta0.sin(),
            self.alpha0.cos(),
        ]
    }

    /// The ideal 2x2 unitary `exp(-i gamma_g n.sigma)`.
    pub fn target_unitary(&self) -> ComplexMatrix {
        let [nx, ny, nz] = self.axis();
        let (s, c) = (self.gamma_g.sin(), self.gamma_g.cos());
        ComplexMatrix::from_rows(&[
            vec![
                C64::new(c, -s * nz),
                C64::new(-s * ny, -s * nx),
            ],
            vec![
                C64::new(s * ny, -s * nx),
                C64::new(c, s * nz),
            ],
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeKind {
    Square,
    SinSquared,
}

/// Pulse envelope: peak Rabi rate, shape, and an optional anharmonicity that
/// enables the derivative (DRAG) quadrature correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub kind: EnvelopeKind,
    /// Peak Rabi rate in rad/s.
    pub omega_max: f64,
    /// Anharmonicity in rad/s; when present the drive gains the quadrature
    /// term `-i dOmega/dt / (2 alpha)`.
    pub drag_alpha: Option<f64>,
}

impl Envelope {
    pub fn square(omega_max: f64) -> Self {
        Self {
            kind: EnvelopeKind::Square,
            omega_max,
            drag_alpha: None,
        }
    }

    pub fn sin_squared(omega_max: f64) -> Self {
        Self {
            kind: EnvelopeKind::SinSquared,
            omega_max,
            drag_alpha: None,
        }
    }

    pub fn with_drag(mut self, anharmonicity: f64) -> Self {
        self.drag_alpha = Some(anharmonicity);
        self
    }

    /// Segment duration realizing the given pulse area at this envelope.
    /// Square: `area / omega_max`. Sin^2: `2 area / omega_max`, because
    /// `∫ omega_max sin^2(pi t / T) dt = omega_max T / 2`.
    pub fn duration_for_area(&self, area: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Square => area / self.omega_max,
            EnvelopeKind::SinSquared => 2.0 * area / self.omega_max,
        }
    }

    /// Real envelope value at local time `t` within a segment of duration `t_seg`.
    pub fn amplitude(&self, t: f64, t_seg: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Square => self.omega_max,
            EnvelopeKind::SinSquared => {
                let s = (PI * t / t_seg).sin();
                self.omega_max * s * s
            }
        }
    }

    /// Time derivative of the envelope at local time `t`.
    pub fn amplitude_derivative(&self, t: f64, t_seg: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Square => 0.0,
            EnvelopeKind::SinSquared => {
                self.omega_max * (PI / t_seg) * (2.0 * PI * t / t_seg).sin()
            }
        }
    }

    /// Complex drive `Omega_R = Omega - i dOmega/dt / (2 alpha)` with the
    /// quadrature term present only when DRAG is enabled.
    pub fn complex_amplitude(&self, t: f64, t_seg: f64) -> C64 {
        let re = self.amplitude(t, t_seg);
        let im = match self.drag_alpha {
            Some(alpha) => -self.amplitude_derivative(t, t_seg) / (2.0 * alpha),
            None => 0.0,
        };
        C64::new(re, im)
    }
}

/// One constant-phase pulse: area `∫Ω dt`, drive phase, and duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    pub area: f64,
    pub phase: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "OCNGQG-A")]
    OcngqgA,
    #[serde(rename = "OCNGQG-B")]
    OcngqgB,
    #[serde(rename = "CNGQG-A")]
    CngqgA,
    #[serde(rename = "CNGQG-B")]
    CngqgB,
    #[serde(rename = "NGQG-A")]
    NgqgA,
    #[serde(rename = "NGQG-B")]
    NgqgB,
    #[serde(rename = "DG")]
    Dg,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::OcngqgA => "OCNGQG-A",
            Scheme::OcngqgB => "OCNGQG-B",
            Scheme::CngqgA => "CNGQG-A",
            Scheme::CngqgB => "CNGQG-B",
            Scheme::NgqgA => "NGQG-A",
            Scheme::NgqgB => "NGQG-B",
            Scheme::Dg => "DG",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        match s {
            "OCNGQG-A" => Some(Scheme::OcngqgA),
            "OCNGQG-B" => Some(Scheme::OcngqgB),
            "CNGQG-A" => Some(Scheme::CngqgA),
            "CNGQG-B" => Some(Scheme::CngqgB),
            "NGQG-A" => Some(Scheme::NgqgA),
            "NGQG-B" => Some(Scheme::NgqgB),
            "DG" => Some(Scheme::Dg),
            _ => None,
        }
    }

    /// Whether the construction accumulates only geometric phase.
    pub fn is_geometric(&self) -> bool {
        !matches!(self, Scheme::Dg)
    }
}

/// Loop orientation of the geometric constructions. Path A gives the
/// orange-slice loop an inner angle of `gamma/2` (or `gamma` single-loop),
/// Path B the supplementary angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathVariant {
    A,
    B,
}

/// Executable pulse program for one gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub scheme: Scheme,
    pub gate: GateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub envelope: Envelope,
    pub segments: Vec<PulseSegment>,
}

impl PulseSequence {
    fn from_raw(
        scheme: Scheme,
        gate: GateSpec,
        k: Option<f64>,
        envelope: Envelope,
        raw: Vec<(f64, f64)>,
    ) -> Self {
        // Zero-area segments carry no duration and a phase with no effect;
        // they are dropped from execution here.
        let segments = raw
            .into_iter()
            .filter(|&(area, _)| area > 0.0)
            .map(|(area, phase)| PulseSegment {
                area,
                phase,
                duration: envelope.duration_for_area(area),
            })
            .collect();
        Self {
            scheme,
            gate,
            k,
            envelope,
            segments,
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.segments.iter().map(|s| s.area).sum()
    }

    /// Ordered product of the per-segment analytic su(2) blocks
    /// `cos(a/2) I - i sin(a/2)(cos(phi) X + sin(phi) Y)`; the first segment
    /// acts first.
    pub fn ideal_propagator(&self) -> ComplexMatrix {
        let mut u = ComplexMatrix::identity(2);
        for seg in &self.segments {
            u = segment_block(seg.area, seg.phase).dot(&u);
        }
        u
    }

    /// Piecewise drive samples `(time, Omega_R, phase)` on a uniform grid.
    /// The envelope restarts at zero at every segment boundary for the sin^2
    /// shape, and the DRAG quadrature uses the analytic envelope derivative.
    pub fn sampled_drive(&self, dt: f64) -> Result<Vec<DriveSample>, PulseError> {
        let shortest = self
            .segments
            .iter()
            .map(|s| s.duration)
            .fold(f64::INFINITY, f64::min);
        let limit = shortest / 100.0;
        if !(dt > 0.0 && dt < limit) {
            return Err(PulseError::SampleStepTooCoarse { dt, limit });
        }
        let total = self.total_duration();
        let n = (total / dt).floor() as usize;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = i as f64 * dt;
            let mut acc = 0.0;
            let mut sample = DriveSample {
                time: t,
                omega: C64::new(0.0, 0.0),
                phase: 0.0,
            };
            for seg in &self.segments {
                if t <= acc + seg.duration {
                    sample.omega = self.envelope.complex_amplitude(t - acc, seg.duration);
                    sample.phase = seg.phase;
                    break;
                }
                acc += seg.duration;
            }
            out.push(sample);
        }
        Ok(out)
    }
}

/// One drive sample: complex amplitude (in-phase + DRAG quadrature) and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    pub time: f64,
    pub omega: C64,
    pub phase: f64,
}

/// Analytic propagator of a single constant-phase segment.
pub fn segment_block(area: f64, phase: f64) -> ComplexMatrix {
    let c = (area / 2.0).cos();
    let s = (area / 2.0).sin();
    ComplexMatrix::identity(2)
        .scaled(C64::new(c, 0.0))
        .add(&drive_axis(phase).scaled(C64::new(0.0, -s)))
}

/// Seven-segment areas and phases of the optimized composite scheme before
/// zero-area pruning. Exposed for tests; use [`build_ocngqg`] to execute.
pub fn ocngqg_raw_segments(gate: &GateSpec, k: f64, path: PathVariant) -> Vec<(f64, f64)> {
    let (a0, b0, gg) = (gate.alpha0, gate.beta0, gate.gamma_g);
    let areas = [a0, PI, PI - a0, a0, PI, PI, a0];
    let phases = match path {
        PathVariant::A => [
            b0 - PI / 2.0,
            b0 - gg / 2.0 + PI / 2.0,
            b0 - PI / 2.0,
            b0 - PI / 2.0,
            b0 + k + PI / 2.0,
            b0 + k + gg / 2.0 - PI / 2.0,
            b0 + PI / 2.0,
        ],
        PathVariant::B => [
            b0 - PI / 2.0,
            b0 - gg / 2.0 - PI / 2.0,
            b0 - PI / 2.0,
            b0 - PI / 2.0,
            b0 - k + PI / 2.0,
            b0 - k + gg / 2.0 + PI / 2.0,
            b0 + PI / 2.0,
        ],
    };
    areas.into_iter().zip(phases).collect()
}

/// Optimized composite geometric gate: two loops separated by the free path
/// parameter `k` in `[0, 2*pi]`.
pub fn build_ocngqg(
    gate: &GateSpec,
    k: f64,
    path: PathVariant,
    env: Envelope,
) -> Result<PulseSequence, PulseError> {
    if !(0.0..=2.0 * PI).contains(&k) {
        return Err(PulseError::KOutOfRange(k));
    }
    let scheme = match path {
        PathVariant::A => Scheme::OcngqgA,
        PathVariant::B => Scheme::OcngqgB,
    };
    Ok(PulseSequence::from_raw(
        scheme,
        *gate,
        Some(k),
        env,
        ocngqg_raw_segments(gate, k, path),
    ))
}

fn ngqg_raw_segments(gate: &GateSpec, gamma: f64, path: PathVariant) -> Vec<(f64, f64)> {
    let (a0, b0) = (gate.alpha0, gate.beta0);
    let phi2 = match path {
        PathVariant::A => b0 - gamma + PI / 2.0,
        PathVariant::B => b0 - gamma - PI / 2.0,
    };
    vec![
        (a0, b0 - PI / 2.0),
        (PI, phi2),
        (PI - a0, b0 - PI / 2.0),
    ]
}

/// Single-loop geometric gate on the orange-slice path: three segments with
/// areas `(alpha0, pi, pi - alpha0)`.
pub fn build_ngqg(gate: &GateSpec, path: PathVariant, env: Envelope) -> PulseSequence {
    let scheme = match path {
        PathVariant::A => Scheme::NgqgA,
        PathVariant::B => Scheme::NgqgB,
    };
    PulseSequence::from_raw(
        scheme,
        *gate,
        None,
        env,
        ngqg_raw_segments(gate, gate.gamma_g, path),
    )
}

/// n-loop composite geometric gate: the single loop cascaded `loops` times
/// with per-loop phase `gamma_g / loops`. `loops == 1` reduces exactly to
/// [`build_ngqg`].
pub fn build_cngqg(
    gate: &GateSpec,
    loops: usize,
    path: PathVariant,
    env: Envelope,
) -> Result<PulseSequence, PulseError> {
    if loops == 0 {
        return Err(PulseError::ZeroLoops);
    }
    if loops == 1 {
        return Ok(build_ngqg(gate, path, env));
    }
    let gamma = gate.gamma_g / loops as f64;
    let mut raw = Vec::with_capacity(3 * loops);
    for _ in 0..loops {
        raw.extend(ngqg_raw_segments(gate, gamma, path));
    }
    let scheme = match path {
        PathVariant::A => Scheme::CngqgA,
        PathVariant::B => Scheme::CngqgB,
    };
    Ok(PulseSequence::from_raw(scheme, *gate, None, env, raw))
}

/// Gates with a dynamical composition in scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicalGate {
    S,
    H,
}

impl DynamicalGate {
    pub fn gate_spec(&self) -> GateSpec {
        match self {
            DynamicalGate::S => GateSpec::s_gate(),
            DynamicalGate::H => GateSpec::h_gate(),
        }
    }

    /// Match a rotation spec to a supported dynamical composition.
    pub fn from_gate_spec(gate: &GateSpec) -> Result<Self, PulseError> {
        let close = |a: &GateSpec, b: &GateSpec| {
            (a.alpha0 - b.alpha0).abs() < 1e-12
                && (a.beta0 - b.beta0).abs() < 1e-12
                && (a.gamma_g - b.gamma_g).abs() < 1e-12
        };
        if close(gate, &GateSpec::s_gate()) {
            Ok(DynamicalGate::S)
        } else if close(gate, &GateSpec::h_gate()) {
            Ok(DynamicalGate::H)
        } else {
            Err(PulseError::UnsupportedDynamicalGate)
        }
    }
}

/// Dynamical gate compositions. Segments are listed in execution order,
/// i.e. right-to-left of the operator product they realize.
pub fn build_dynamical(gate: DynamicalGate, env: Envelope) -> PulseSequence {
    let raw = match gate {
        // S = U(pi/2, pi) U(pi/2, 3pi/2) U(pi/2, 0)
        DynamicalGate::S => vec![
            (PI / 2.0, 0.0),
            (PI / 2.0, 3.0 * PI / 2.0),
            (PI / 2.0, PI),
        ],
        // H = U(pi, 0) U(pi/2, pi/2)
        DynamicalGate::H => vec![(PI / 2.0, PI / 2.0), (PI, 0.0)],
    };
    PulseSequence::from_raw(Scheme::Dg, gate.gate_spec(), None, env, raw)
}
