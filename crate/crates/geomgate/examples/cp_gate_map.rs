//! Fidelity map of the two-qubit controlled-phase gate over the transmon
//! detuning and the parametric modulation index, at the optimal path
//! parameter k = 1.27 pi. Written as CSV and SVG.
//!
//!     cargo run --release --example cp_gate_map [points_delta] [points_beta]
//!
//! The default 7x5 grid takes a couple of minutes on a small machine; the
//! full-resolution map wants 11x11 or more.

use std::f64::consts::PI;

use geomgate::cli::heatmap_svg;
use geomgate::models::DecoherenceSpec;
use geomgate::sweeps::{cp_parameter_map, default_two_qubit_spec, CpGate, StepControl};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let points_delta: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let points_beta: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let spec = default_two_qubit_spec();
    let kappa = 2.0 * PI * 2e3;
    let dec = DecoherenceSpec::new(kappa, kappa);
    let gate = CpGate::optimized(PI / 2.0, 1.27 * PI);

    let result = cp_parameter_map(
        (2.0 * PI * 544e6, 2.0 * PI * 644e6),
        (1.3, 2.3),
        (points_delta, points_beta),
        &spec,
        &dec,
        &gate,
        StepControl::budget(0.05),
    )
    .unwrap();

    std::fs::create_dir_all("out").unwrap();
    let mut buf = Vec::new();
    result.write_csv(&mut buf).unwrap();
    std::fs::write("out/cp_map.csv", buf).unwrap();
    std::fs::write("out/cp_map.svg", heatmap_svg(&result, "cp_map")).unwrap();
    println!(
        "cp map {points_delta}x{points_beta}: best F = {:.4} at Delta = 2 pi x {:.0} MHz, beta = {:.2}",
        result.max_fidelity,
        result.argmax[0] / (2.0 * PI * 1e6),
        result.argmax[1]
    );
    println!("-> out/cp_map.csv, out/cp_map.svg");
}
