//! Scan the free path parameter k of the optimized composite scheme over
//! [0, 2 pi] against X, Z and combined errors, for the S and H gates, and
//! report the optima. Writes one fidelity-vs-k CSV per case into out/.
//!
//!     cargo run --release --example optimal_k_search [grid_points] [A|B]

use std::f64::consts::PI;

use geomgate::models::NoiseSpec;
use geomgate::pulseforge::{Envelope, GateSpec, PathVariant};
use geomgate::sweeps::{optimize_k, ErrorMode, Scenario};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let points: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(201);
    let path = match args.get(2).map(String::as_str) {
        Some("B") => PathVariant::B,
        _ => PathVariant::A,
    };
    let omega_m = 2.0 * PI * 60e6;
    // square drive, error ratios 0.1, no decoherence
    let scenario =
        Scenario::ideal(Envelope::square(omega_m)).with_noise(NoiseSpec::new(0.1, 0.1));
    std::fs::create_dir_all("out").unwrap();

    println!("path {path:?}, {points}-point grid over [0, 2 pi]:");
    for (name, gate) in [("S", GateSpec::s_gate()), ("H", GateSpec::h_gate())] {
        for mode in [ErrorMode::X, ErrorMode::Z, ErrorMode::Both] {
            let result = optimize_k(&gate, path, mode, points, &scenario).unwrap();
            let stem = format!("k_scan_{}_{}", name, mode.label().replace('&', ""));
            let mut buf = Vec::new();
            result.write_csv(&mut buf).unwrap();
            std::fs::write(format!("out/{stem}.csv"), buf).unwrap();
            println!(
                "  {name} vs {:<3}: optimal k = {:.2} pi  (fidelity {:.6})  -> out/{stem}.csv",
                mode.label(),
                result.argmax[0] / PI,
                result.max_fidelity
            );
        }
    }
}
