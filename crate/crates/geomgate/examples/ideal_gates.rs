//! Build every pulse-sequence scheme for the S and H gates, print the
//! segment tables, durations and pulse areas, and verify each ideal
//! propagator against the target rotation.
//!
//!     cargo run --release --example ideal_gates

use std::f64::consts::PI;

use geomgate::metrics::propagator_distance;
use geomgate::pulseforge::{
    build_cngqg, build_dynamical, build_ngqg, build_ocngqg, DynamicalGate, Envelope, GateSpec,
    PathVariant,
};

fn main() {
    let omega_m = 2.0 * PI * 60e6;
    let env = Envelope::sin_squared(omega_m);
    for (name, gate, k) in [
        ("S", GateSpec::s_gate(), 1.13 * PI),
        ("H", GateSpec::h_gate(), 1.17 * PI),
    ] {
        println!(
            "=== {name} gate: axis polar {:.3} rad, rotation angle {:.3} rad ===",
            gate.alpha0, gate.gamma_g
        );
        let target = gate.target_unitary();
        let sequences = vec![
            build_ocngqg(&gate, k, PathVariant::A, env).unwrap(),
            build_ocngqg(&gate, k, PathVariant::B, env).unwrap(),
            build_cngqg(&gate, 2, PathVariant::A, env).unwrap(),
            build_cngqg(&gate, 2, PathVariant::B, env).unwrap(),
            build_ngqg(&gate, PathVariant::A, env),
            build_ngqg(&gate, PathVariant::B, env),
            build_dynamical(DynamicalGate::from_gate_spec(&gate).unwrap(), env),
        ];
        println!(
            "{:<10} {:>9} {:>12} {:>14} {:>12}",
            "scheme", "segments", "area [pi]", "duration [ns]", "distance"
        );
        for seq in sequences {
            let d = propagator_distance(&seq.ideal_propagator(), &target).unwrap();
            println!(
                "{:<10} {:>9} {:>12.3} {:>14.2} {:>12.2e}",
                seq.scheme.label(),
                seq.segments.len(),
                seq.total_area() / PI,
                seq.total_duration() * 1e9,
                d
            );
        }
        println!();
    }
    println!("(distances are global-phase-invariant; sin^2 envelope at 2 pi x 60 MHz)");
}
