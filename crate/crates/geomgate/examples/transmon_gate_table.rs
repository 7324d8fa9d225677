//! Reproduce the transmon gate-performance table: duration, fidelity under
//! decoherence, and robustness at 10% drive or detuning error, for all
//! single-qubit S-gate schemes on the three-level transmon with DRAG.
//!
//!     cargo run --release --example transmon_gate_table

use std::f64::consts::PI;

use geomgate::models::{DecoherenceSpec, NoiseSpec};
use geomgate::pulseforge::{Envelope, GateSpec, Scheme};
use geomgate::sweeps::{default_transmon_spec, Scenario, SchemeRun};

fn main() {
    let transmon = default_transmon_spec();
    let kappa = 2.0 * PI * 2e3;
    let scenario = Scenario::transmon(
        transmon,
        Envelope::sin_squared(transmon.omega_max).with_drag(transmon.anharmonicity),
    )
    .with_decoherence(DecoherenceSpec::new(kappa, kappa));
    let gate = GateSpec::s_gate();

    let rows = [
        ("optimized (k = 1.13 pi)", SchemeRun::with_k(Scheme::OcngqgA, 1.13 * PI)),
        ("two-loop, path A", SchemeRun::new(Scheme::CngqgA)),
        ("two-loop, path B", SchemeRun::new(Scheme::CngqgB)),
        ("single-loop, path A", SchemeRun::new(Scheme::NgqgA)),
        ("single-loop, path B", SchemeRun::new(Scheme::NgqgB)),
        ("dynamical", SchemeRun::new(Scheme::Dg)),
    ];
    println!(
        "{:<26} {:>12} {:>10} {:>12} {:>12}",
        "scheme", "duration", "F", "F(eps=0.1)", "F(delta=0.1)"
    );
    for (label, run) in rows {
        let seq = run.build(&gate, scenario.envelope).unwrap();
        let f0 = scenario.gate_fidelity(&run, &gate).unwrap().fidelity;
        let fe = scenario
            .with_noise(NoiseSpec::new(0.1, 0.0))
            .gate_fidelity(&run, &gate)
            .unwrap()
            .fidelity;
        let fd = scenario
            .with_noise(NoiseSpec::new(0.0, 0.1))
            .gate_fidelity(&run, &gate)
            .unwrap()
            .fidelity;
        println!(
            "{:<26} {:>9.1} ns {:>10.4} {:>12.4} {:>12.4}",
            label,
            seq.total_duration() * 1e9,
            f0,
            fe,
            fd
        );
    }
    println!(
        "\n(three-level transmon, anharmonicity 2 pi x 320 MHz, peak drive 2 pi x 60 MHz,\n\
         sin^2 envelope with DRAG, dephasing = decay = 2 pi x 2 kHz)"
    );
}
