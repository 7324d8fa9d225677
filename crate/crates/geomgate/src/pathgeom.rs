//! Bloch-sphere path parametrization of the evolution states and the
//! functionals defined on it.
//!
//! A dressed state `cos(a/2)|0> + sin(a/2) e^{i b}|1>` (up to a global phase
//! `f`) traces a path `(a(t), b(t))` on the Bloch sphere. For a resonant
//! drive with Rabi rate `O(t)` and phase `phi` the path obeys
//!
//! ```text
//!   da/dt =  O sin(phi - b)
//!   db/dt = -O cot(a) cos(phi - b)
//! ```
//!
//! which is used in reverse here: given a sampled path, recover the drive,
//! and integrate the dynamical and geometric phase functionals
//!
//! ```text
//!   gamma_d =  (1/2) ∫ db/dt sin(a) tan(a) dt
//!   gamma_g = -(1/2) ∫ db/dt (1 - cos(a)) dt
//! ```
//!
//! The azimuth is undefined at the poles. Paths built from meridian arcs
//! transit the poles with a discontinuous azimuth jump; jump handling is
//! described at [`geometric_phase`].

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("trajectory times must start at 0 and increase strictly")]
    BadTimeGrid,
    #[error("polar angle {0} outside [0, pi]")]
    BadPolarAngle(f64),
    #[error("azimuthal motion at a pole sample (t = {0}); the azimuth is undefined there")]
    AzimuthalMotionAtPole(f64),
    #[error("tan(alpha) overflow near the equator with nonzero azimuthal rate at t = {0}")]
    TanOverflow(f64),
}

/// Polar angle, azimuth, and accumulated global phase of a dressed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub alpha: f64,
    pub beta: f64,
    /// Global phase `f`; carried along but invisible on the sphere.
    pub global_phase: f64,
}

/// A sampled path: ordered `(time, point)` pairs, first time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrajectory {
    samples: Vec<(f64, PathPoint)>,
}

/// Samples with polar angle within this distance of a pole are treated as
/// pole transits: their azimuth is excluded from finite differences and the
/// accumulated azimuth change is booked as a jump at the pole. The margin is
/// far above extraction noise and far below one integration step of arc.
pub const POLE_ALPHA_EPS: f64 = 2e-3;

const TAN_LIMIT: f64 = 1e9;
const BETA_RATE_EPS: f64 = 1e-9;

/// Azimuth differences below this are finite-difference noise from state
/// extraction, not motion; the phase functionals treat them as zero so that
/// meridian paths integrate exactly. Real azimuthal motion in scope is
/// orders of magnitude above this per sample.
pub const BETA_STEP_NOISE_EPS: f64 = 1e-7;

/// Reduce an angle to (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

impl PathTrajectory {
    pub fn new(samples: Vec<(f64, PathPoint)>) -> Result<Self, PathError> {
        if let Some(&(t0, _)) = samples.first() {
            if t0 != 0.0 {
                return Err(PathError::BadTimeGrid);
            }
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(PathError::BadTimeGrid);
        }
        if let Some(&(_, p)) = samples
            .iter()
            .find(|(_, p)| !(0.0..=PI).contains(&p.alpha))
        {
            return Err(PathError::BadPolarAngle(p.alpha));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, PathPoint)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn is_pole(&self, i: usize) -> bool {
        let a = self.samples[i].1.alpha;
        !(POLE_ALPHA_EPS..=PI - POLE_ALPHA_EPS).contains(&a)
    }
}

/// Extract a trajectory from sampled two-component state vectors.
///
/// `alpha = 2 atan2(|c1|, |c0|)`, `beta = arg(c1) - arg(c0)`; samples where
/// either amplitude is below the pole margin keep a placeholder azimuth and
/// are flagged by their polar angle alone.
pub fn trajectory_from_states(samples: &[(f64, [C64; 2])]) -> Result<PathTrajectory, PathError> {
    let amp_eps = POLE_ALPHA_EPS / 2.0;
    let mut out = Vec::with_capacity(samples.len());
    let mut last_beta = 0.0;
    for &(t, [c0, c1]) in samples {
        let (a0, a1) = (c0.norm(), c1.norm());
        let alpha = 2.0 * a1.atan2(a0);
        let beta = if a0 > amp_eps && a1 > amp_eps {
            last_beta = c1.arg() - c0.arg();
            last_beta
        } else {
            last_beta
        };
        let global_phase = if a0 >= a1 { -c0.arg() } else { beta - c1.arg() };
        out.push((
            t,
            PathPoint {
                alpha,
                beta,
                global_phase,
            },
        ));
    }
    PathTrajectory::new(out)
}

/// One reverse-engineered drive sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivePoint {
    pub time: f64,
    /// Rabi rate in rad/s.
    pub rabi: f64,
    /// Drive phase in radians.
    pub phase: f64,
    /// Set when the drive is not determined by the local motion (azimuthal
    /// rate at the equator, where `cot(alpha) = 0` makes the second relation
    /// indeterminate).
    pub indeterminate: bool,
}

/// Recover `(Omega(t), phi(t))` from a sampled path by finite differences.
///
/// On meridians the sign convention is fixed by the motion: increasing polar
/// angle takes `phi = beta + pi/2`, decreasing takes `phi = beta - pi/2`.
/// Pole samples are excluded from the azimuth differences; an interval that
/// touches a pole is treated as meridian motion through it.
pub fn drive_from_path(traj: &PathTrajectory) -> Result<Vec<DrivePoint>, PathError> {
    let s = traj.samples();
    let mut out = Vec::with_capacity(s.len().saturating_sub(1));
    for i in 0..s.len().saturating_sub(1) {
        let (t0, p0) = s[i];
        let (t1, p1) = s[i + 1];
        let dt = t1 - t0;
        let alpha_dot = (p1.alpha - p0.alpha) / dt;
        let pole0 = traj.is_pole(i);
        let pole1 = traj.is_pole(i + 1);
        let time = 0.5 * (t0 + t1);
        if pole0 && pole1 {
            if wrap_angle(p1.beta - p0.beta).abs() > BETA_RATE_EPS {
                return Err(PathError::AzimuthalMotionAtPole(time));
            }
            out.push(DrivePoint {
                time,
                rabi: alpha_dot.abs(),
                phase: p0.beta + PI / 2.0 * alpha_dot.signum(),
                indeterminate: false,
            });
            continue;
        }
        if pole0 || pole1 {
            // meridian transit: azimuth taken from the non-pole endpoint
            let beta = if pole0 { p1.beta } else { p0.beta };
            out.push(DrivePoint {
                time,
                rabi: alpha_dot.abs(),
                phase: beta + PI / 2.0 * alpha_dot.signum(),
                indeterminate: false,
            });
            continue;
        }
        let beta_dot = wrap_angle(p1.beta - p0.beta) / dt;
        let alpha_mid = 0.5 * (p0.alpha + p1.alpha);
        let beta_mid = p0.beta + 0.5 * wrap_angle(p1.beta - p0.beta);
        let tan_mid = alpha_mid.tan();
        if tan_mid.abs() > TAN_LIMIT && beta_dot.abs() > BETA_RATE_EPS {
            // equatorial azimuthal motion: 0 * cot(pi/2) is indeterminate
            out.push(DrivePoint {
                time,
                rabi: alpha_dot.abs(),
                phase: beta_mid + PI / 2.0 * alpha_dot.signum(),
                indeterminate: true,
            });
            continue;
        }
        let transverse = -beta_dot * tan_mid;
        let rabi = alpha_dot.hypot(transverse);
        let phase = if rabi == 0.0 {
            beta_mid
        } else {
            beta_mid + alpha_dot.atan2(transverse)
        };
        out.push(DrivePoint {
            time,
            rabi,
            phase,
            indeterminate: false,
        });
    }
    Ok(out)
}

/// Dynamical phase `(1/2) ∫ db/dt sin(a) tan(a) dt` by trapezoid over the
/// sampled path. Pole-touching intervals carry zero weight (`sin tan -> 0`);
/// an interval with azimuthal motion where `|tan(a)|` overflows errors out.
pub fn dynamical_phase(traj: &PathTrajectory) -> Result<f64, PathError> {
    let s = traj.samples();
    let mut acc = 0.0;
    for i in 0..s.len().saturating_sub(1) {
        if traj.is_pole(i) || traj.is_pole(i + 1) {
            continue;
        }
        let (t0, p0) = s[i];
        let (t1, p1) = s[i + 1];
        let dbeta = wrap_angle(p1.beta - p0.beta);
        if dbeta.abs() < BETA_STEP_NOISE_EPS {
            continue;
        }
        let w0 = p0.alpha.sin() * p0.alpha.tan();
        let w1 = p1.alpha.sin() * p1.alpha.tan();
        if (w0.abs() > TAN_LIMIT || w1.abs() > TAN_LIMIT) && dbeta.abs() > BETA_RATE_EPS {
            return Err(PathError::TanOverflow(0.5 * (t0 + t1)));
        }
        acc += 0.5 * dbeta * 0.5 * (w0 + w1);
    }
    Ok(acc)
}

/// Geometric phase `-(1/2) ∫ db/dt (1 - cos(a)) dt` by trapezoid, plus the
/// pole-transit jumps.
///
/// Smooth intervals integrate the literal functional, so a full equator loop
/// with increasing azimuth gives `-pi` (minus half the enclosed solid angle).
/// At a pole transit the azimuth jump between the flanking meridians enters
/// with the orientation measured from the incoming meridian to the outgoing
/// one and the weight of the pole itself, `+(1/2)(1 - cos a_pole) d_beta`:
/// under this convention a meridian loop closing through the south pole with
/// inner angle `theta` accumulates `+theta/2` per transit, which is the loop
/// orientation the sequence builders use.
pub fn geometric_phase(traj: &PathTrajectory) -> f64 {
    let s = traj.samples();
    let n = s.len();
    let mut acc = 0.0;
    // smooth part
    for i in 0..n.saturating_sub(1) {
        if traj.is_pole(i) || traj.is_pole(i + 1) {
            continue;
        }
        let (_, p0) = s[i];
        let (_, p1) = s[i + 1];
        let dbeta = wrap_angle(p1.beta - p0.beta);
        if dbeta.abs() < BETA_STEP_NOISE_EPS {
            continue;
        }
        let w = 0.5 * ((1.0 - p0.alpha.cos()) + (1.0 - p1.alpha.cos()));
        acc += -0.5 * dbeta * w;
    }
    // pole-transit jumps
    let mut i = 0;
    while i < n {
        if !traj.is_pole(i) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < n && traj.is_pole(i) {
            i += 1;
        }
        let run_end = i; // exclusive
        if run_start == 0 || run_end == n {
            // open transit at the path boundary: no flanking azimuths
            continue;
        }
        let before = s[run_start - 1].1;
        let after = s[run_end].1;
        let mean_alpha: f64 = s[run_start..run_end]
            .iter()
            .map(|(_, p)| p.alpha)
            .sum::<f64>()
            / (run_end - run_start) as f64;
        let pole_alpha = if mean_alpha > PI / 2.0 { PI } else { 0.0 };
        let weight = 1.0 - pole_alpha.cos();
        let dbeta = wrap_angle(after.beta - before.beta);
        acc += 0.5 * weight * dbeta;
    }
    acc
}

/// Largest `|db/dt * sin(a)|` over the smooth intervals, in rad/s. Zero for
/// pure meridian motion; used to check that the geometric sequences never
/// drive the azimuth.
pub fn max_azimuthal_rate(traj: &PathTrajectory) -> f64 {
    let s = traj.samples();
    let mut worst = 0.0f64;
    for i in 0..s.len().saturating_sub(1) {
        if traj.is_pole(i) || traj.is_pole(i + 1) {
            continue;
        }
        let (t0, p0) = s[i];
        let (t1, p1) = s[i + 1];
        let beta_dot = wrap_angle(p1.beta - p0.beta) / (t1 - t0);
        let sin_mid = (0.5 * (p0.alpha + p1.alpha)).sin();
        worst = worst.max((beta_dot * sin_mid).abs());
    }
    worst
}
