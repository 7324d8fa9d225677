//! Two-dimensional fidelity map over (epsilon, delta) errors for one scheme
//! on the decohering transmon, written as CSV and SVG.
//!
//!     cargo run --release --example error_heatmap [points_per_axis] [scheme]
//!
//! `scheme` is one of OCNGQG-A, OCNGQG-B, CNGQG-A, CNGQG-B, NGQG-A, NGQG-B,
//! DG (default OCNGQG-A at k = 1.13 pi).

use std::f64::consts::PI;

use geomgate::cli::heatmap_svg;
use geomgate::models::DecoherenceSpec;
use geomgate::pulseforge::{Envelope, GateSpec, Scheme};
use geomgate::sweeps::{default_transmon_spec, robustness_map, Scenario, SchemeRun};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let points: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(15);
    let scheme = args
        .get(2)
        .and_then(|s| Scheme::parse(s))
        .unwrap_or(Scheme::OcngqgA);
    let run = SchemeRun {
        scheme,
        k: Some(1.13 * PI),
        loops: 2,
    };
    let transmon = default_transmon_spec();
    let kappa = 2.0 * PI * 2e3;
    let scenario = Scenario::transmon(
        transmon,
        Envelope::sin_squared(transmon.omega_max).with_drag(transmon.anharmonicity),
    )
    .with_decoherence(DecoherenceSpec::new(kappa, kappa));

    let result = robustness_map(
        &run,
        &GateSpec::s_gate(),
        (-0.1, 0.1),
        (-0.1, 0.1),
        points,
        &scenario,
    )
    .unwrap();

    std::fs::create_dir_all("out").unwrap();
    let stem = format!("heatmap_{}", scheme.label().to_lowercase());
    let mut buf = Vec::new();
    result.write_csv(&mut buf).unwrap();
    std::fs::write(format!("out/{stem}.csv"), buf).unwrap();
    std::fs::write(format!("out/{stem}.svg"), heatmap_svg(&result, &stem)).unwrap();
    let center = result.values[result.values.len() / 2];
    println!(
        "{}: {points}x{points} map, F(0,0) = {center:.4}, worst corner {:.4} -> out/{stem}.csv, out/{stem}.svg",
        scheme.label(),
        result.values.iter().copied().fold(f64::INFINITY, f64::min),
    );
}
