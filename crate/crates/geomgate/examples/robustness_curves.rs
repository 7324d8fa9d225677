//! Gate-infidelity curves over systematic errors for the optimized
//! composite scheme against its comparators (two-loop composite,
//! single-loop geometric, dynamical), on the ideal two-level model without
//! decoherence. Writes per-scheme CSVs into out/.
//!
//!     cargo run --release --example robustness_curves [points]

use std::f64::consts::PI;

use geomgate::pulseforge::{Envelope, GateSpec, Scheme};
use geomgate::sweeps::{robustness_curve, ErrorAxis, Scenario, SchemeRun};

fn main() {
    let points: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(41);
    let omega_m = 2.0 * PI * 60e6;
    let scenario = Scenario::ideal(Envelope::square(omega_m));
    std::fs::create_dir_all("out").unwrap();

    let panels = [
        ("S", GateSpec::s_gate(), ErrorAxis::Epsilon, 1.13 * PI,
         vec![Scheme::CngqgA, Scheme::NgqgA, Scheme::Dg]),
        ("S", GateSpec::s_gate(), ErrorAxis::Delta, 1.13 * PI,
         vec![Scheme::CngqgB, Scheme::NgqgB, Scheme::Dg]),
        ("H", GateSpec::h_gate(), ErrorAxis::Epsilon, 1.43 * PI,
         vec![Scheme::CngqgA, Scheme::NgqgA, Scheme::Dg]),
        ("H", GateSpec::h_gate(), ErrorAxis::Delta, 1.27 * PI,
         vec![Scheme::CngqgB, Scheme::NgqgB, Scheme::Dg]),
    ];
    for (name, gate, axis, k, comparators) in panels {
        let mut runs = vec![SchemeRun::with_k(Scheme::OcngqgA, k)];
        runs.extend(comparators.iter().map(|&s| SchemeRun::new(s)));
        let results =
            robustness_curve(&runs, &gate, axis, (-0.2, 0.2), points, &scenario).unwrap();
        println!("{name} gate vs {}:", axis.name());
        for (run, result) in runs.iter().zip(&results) {
            let stem = format!(
                "curve_{name}_{}_{}",
                axis.name(),
                run.scheme.label().to_lowercase()
            );
            let mut buf = Vec::new();
            result.write_csv(&mut buf).unwrap();
            std::fs::write(format!("out/{stem}.csv"), buf).unwrap();
            // infidelity at the +0.1 error point for a quick comparison
            let idx = result
                .grid
                .axes[0]
                .values()
                .iter()
                .position(|&x| (x - 0.1).abs() < 1e-9)
                .unwrap_or(points - 1);
            println!(
                "  {:<9} infidelity at +0.1: {:.3e}  -> out/{stem}.csv",
                run.scheme.label(),
                1.0 - result.values[idx]
            );
        }
    }
}
