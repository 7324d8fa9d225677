//! Serialize a pulse sequence as JSON and sample its drive waveform
//! (including the DRAG quadrature) as CSV.
//!
//!     cargo run --release --example export_pulse_schedule [scheme] [S|H]

use std::f64::consts::PI;

use geomgate::pulseforge::{Envelope, GateSpec, Scheme};
use geomgate::sweeps::SchemeRun;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let scheme = args
        .get(1)
        .and_then(|s| Scheme::parse(s))
        .unwrap_or(Scheme::OcngqgA);
    let gate = match args.get(2).map(String::as_str) {
        Some("H") => GateSpec::h_gate(),
        _ => GateSpec::s_gate(),
    };
    let omega_m = 2.0 * PI * 60e6;
    let anharmonicity = 2.0 * PI * 320e6;
    let env = Envelope::sin_squared(omega_m).with_drag(anharmonicity);
    let seq = SchemeRun {
        scheme,
        k: Some(1.13 * PI),
        loops: 2,
    }
    .build(&gate, env)
    .unwrap();

    std::fs::create_dir_all("out").unwrap();
    std::fs::write(
        "out/sequence.json",
        serde_json::to_string_pretty(&seq).unwrap() + "\n",
    )
    .unwrap();

    let dt = seq.total_duration() / 2000.0;
    let samples = seq.sampled_drive(dt).unwrap();
    let mut text = String::from("time_s,omega_in_phase_rad_s,omega_quadrature_rad_s,phase_rad\n");
    for s in &samples {
        text.push_str(&format!(
            "{:.9e},{:.9e},{:.9e},{:.9e}\n",
            s.time, s.omega.re, s.omega.im, s.phase
        ));
    }
    std::fs::write("out/drive.csv", text).unwrap();
    println!(
        "{} {}: {} segments, {:.2} ns, {} drive samples",
        scheme.label(),
        if gate == GateSpec::s_gate() { "S" } else { "H" },
        seq.segments.len(),
        seq.total_duration() * 1e9,
        samples.len()
    );
    println!("-> out/sequence.json, out/drive.csv");
}
