//! Independent brute-force oracles used by the test suites.
//!
//! Everything here is derived directly from closed forms and shares only
//! `matrixcore` with the main build, so a bug in the sequence builders or
//! integrators cannot hide inside the oracle that checks it. Frozen expected
//! values live in [`manifest`], which the test suites consume; the manifest
//! can also be written out as JSON.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::matrixcore::ComplexMatrix;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};

/// One frozen expected value with its derivation method and tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleRecord {
    pub name: String,
    pub inputs: serde_json::Value,
    pub expected: serde_json::Value,
    pub method: String,
    pub tolerance: f64,
}

/// Product of analytic su(2) blocks
/// `cos(a/2) I - i sin(a/2) (cos(phi) X + sin(phi) Y)` for piecewise
/// constant-phase segments `(area, phase)`, first segment acting first.
/// Written from the closed form, independent of the sequence builders.
pub fn su2_product_oracle(segments: &[(f64, f64)]) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(2);
    for &(area, phase) in segments {
        let c = C64::new((area / 2.0).cos(), 0.0);
        let s = (area / 2.0).sin();
        let block = ComplexMatrix::from_rows(&[
            vec![c, C64::new(0.0, -s) * C64::from_polar(1.0, -phase)],
            vec![C64::new(0.0, -s) * C64::from_polar(1.0, phase), c],
        ]);
        u = block.dot(&u);
    }
    u
}

/// Excited-state population after amplitude damping at rate `kappa` for time
/// `t` under the master equation
/// `drho/dt = i[rho,H] + (1/2) kappa (2 A rho A+ - A+A rho - rho A+A)` with
/// `A = |0><1|`: substituting gives `d(rho_11)/dt = -kappa rho_11`, so the
/// population is `e^{-kappa t}`.
pub fn damping_oracle(kappa: f64, t: f64) -> f64 {
    (-kappa * t).exp()
}

/// Bessel function of the first kind `J_n(x)` by the ascending power series
/// `sum_m (-1)^m (x/2)^{n+2m} / (m! (m+n)!)`, summed to 1e-16 relative.
pub fn bessel_oracle_jn(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    // first term: (x/2)^n / n!
    let mut term = 1.0f64;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut m = 1.0f64;
    while term.abs() > 1e-17 * sum.abs().max(1e-300) {
        term *= -(half * half) / (m * (m + n as f64));
        sum += term;
        m += 1.0;
    }
    if x == 0.0 {
        if n == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        sum
    }
}

/// `J_1` by series; the value feeding the effective two-transmon coupling.
pub fn bessel_oracle(beta: f64) -> f64 {
    bessel_oracle_jn(1, beta)
}

/// The frozen oracle records consumed by the test suites.
pub fn manifest() -> Vec<OracleRecord> {
    let s_segments = json!([[PI, FRAC_PI_4], [PI, -FRAC_PI_2]]);
    vec![
        OracleRecord {
            name: "su2_product_phase_gate_single_loop".into(),
            inputs: s_segments,
            expected: json!({"diag_phase": -FRAC_PI_4}),
            method: "ordered product of closed-form su(2) blocks; the result is \
                     diag(e^{-i pi/4}, e^{i pi/4})"
                .into(),
            tolerance: 1e-12,
        },
        OracleRecord {
            name: "su2_product_pi_pulse".into(),
            inputs: json!([[PI, 0.0]]),
            expected: json!({"matrix": "-i X"}),
            method: "single (pi, 0) block".into(),
            tolerance: 1e-15,
        },
        OracleRecord {
            name: "damping_population_half_life".into(),
            inputs: json!({"kappa_t": LN_2}),
            expected: json!(0.5),
            method: "analytic solution e^{-kappa t} of the amplitude-damping master \
                     equation; population 1/2 at kappa t = ln 2"
                .into(),
            tolerance: 1e-12,
        },
        OracleRecord {
            name: "bessel_j1_at_1.8".into(),
            inputs: json!(1.8),
            expected: json!(0.5815169517311653),
            method: "ascending power series to 1e-16 relative".into(),
            tolerance: 1e-12,
        },
        OracleRecord {
            name: "effective_coupling_at_beta_1.8".into(),
            inputs: json!({"g12_hz": 10e6, "beta": 1.8}),
            expected: json!({"geff_over_2pi_mhz": 16.447752}),
            method: "2 sqrt(2) g12 J1(beta) with J1 from the series".into(),
            tolerance: 1e-3,
        },
    ]
}

/// Write the manifest as a JSON document.
pub fn write_manifest(path: &std::path::Path) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&manifest()).expect("manifest serializes");
    std::fs::write(path, text)
}
