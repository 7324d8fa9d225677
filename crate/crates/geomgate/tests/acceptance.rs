//! Acceptance suite: one test per exit criterion, each printing a PASS/FAIL
//! line with the measured numbers.
//!
//! Criteria 7 and 10 each contain one subcheck that the simulations
//! reproducibly contradict; those subchecks are asserted as stated and fail
//! with a diagnosis attached (see the printed output): the Path-B Hadamard
//! optimum against detuning errors lands at 1.73 pi, the mirror image
//! (2 pi - k') of the quoted 0.27 pi, and the two-loop Path-B Hadamard beats
//! the optimized gate at delta = -0.1 under every envelope and path
//! parameter tried.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use geomgate::lindblad::{
    dressed_state_trajectory, evolve_lindblad, evolve_lindblad_sampled, evolve_unitary,
    DensityMatrix,
};
use geomgate::matrixcore::ComplexMatrix;
use geomgate::metrics::{propagator_distance, single_qubit_fidelity};
use geomgate::models::{
    collapse_operators, ideal_qubit_hamiltonian, transmon_hamiltonian, DecoherenceSpec,
    DissipationSetting, NoiseSpec,
};
use geomgate::pathgeom::{dynamical_phase, geometric_phase, max_azimuthal_rate, wrap_angle};
use geomgate::pulseforge::{
    build_cngqg, build_dynamical, build_ngqg, build_ocngqg, DynamicalGate, Envelope, GateSpec,
    PathVariant, PulseSequence, Scheme,
};
use geomgate::sweeps::{
    cp_fidelity, cp_parameter_map, cp_sequence, default_transmon_spec, default_two_qubit_spec,
    dynamics_trace, optimize_k, robustness_curve, CpGate, CpModel, ErrorAxis, ErrorMode,
    Scenario, SchemeRun, StepControl, SweepError,
};
use geomgate::verification::damping_oracle;

const OMEGA_M: f64 = 2.0 * PI * 60e6;
const KAPPA_TRANSMON: f64 = 2.0 * PI * 2e3;

fn pass(criterion: &str, detail: String) {
    eprintln!("[PASS] {criterion}: {detail}");
}

struct Checks {
    criterion: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new(criterion: &'static str) -> Self {
        Self {
            criterion,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(format!("ok: {what}"));
        } else {
            self.failures.push(what);
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            pass(self.criterion, format!("{} subchecks", self.notes.len()));
        } else {
            eprintln!("[FAIL] {}:", self.criterion);
            for f in &self.failures {
                eprintln!("    failed: {f}");
            }
            panic!(
                "{}: {} of {} subchecks failed",
                self.criterion,
                self.failures.len(),
                self.failures.len() + self.notes.len()
            );
        }
    }
}

fn all_scheme_sequences(gate: &GateSpec, k: f64, env: Envelope) -> Vec<PulseSequence> {
    vec![
        build_ocngqg(gate, k, PathVariant::A, env).unwrap(),
        build_ocngqg(gate, k, PathVariant::B, env).unwrap(),
        build_cngqg(gate, 2, PathVariant::A, env).unwrap(),
        build_cngqg(gate, 2, PathVariant::B, env).unwrap(),
        build_ngqg(gate, PathVariant::A, env),
        build_ngqg(gate, PathVariant::B, env),
        build_dynamical(DynamicalGate::from_gate_spec(gate).unwrap(), env),
    ]
}

#[test]
fn c01_ideal_gates_match_their_targets() {
    let env = Envelope::square(OMEGA_M);
    let mut worst: f64 = 0.0;
    for gate in [GateSpec::s_gate(), GateSpec::h_gate()] {
        let target = gate.target_unitary();
        for seq in all_scheme_sequences(&gate, 1.13 * PI, env) {
            let d = propagator_distance(&seq.ideal_propagator(), &target).unwrap();
            assert!(
                d < 1e-9,
                "{:?} propagator distance {d:.3e}",
                seq.scheme
            );
            worst = worst.max(d);
        }
    }
    pass(
        "criterion 1 (ideal-gate correctness)",
        format!("14 scheme/gate propagators, max distance {worst:.3e}"),
    );
}

#[test]
fn c02_path_parameter_never_changes_the_ideal_gate() {
    let env = Envelope::square(OMEGA_M);
    let mut worst: f64 = 0.0;
    for gate in [GateSpec::s_gate(), GateSpec::h_gate()] {
        let target = gate.target_unitary();
        for path in [PathVariant::A, PathVariant::B] {
            for i in 0..100 {
                let k = (i as f64 / 99.0) * (2.0 * PI);
                let seq = build_ocngqg(&gate, k, path, env).unwrap();
                let d = propagator_distance(&seq.ideal_propagator(), &target).unwrap();
                assert!(d < 1e-9, "k = {k}, path {path:?}: distance {d:.3e}");
                worst = worst.max(d);
            }
        }
    }
    pass(
        "criterion 2 (k-invariance of the ideal gate)",
        format!("100-point grid, both paths, both gates, max distance {worst:.3e}"),
    );
}

#[test]
fn c03_phase_functionals_on_extracted_trajectories() {
    // simulate each geometric sequence without noise, extract the
    // Bloch-sphere loop of the dressed state, and integrate the phase
    // functionals; the single-loop Path B construction carries its known
    // extra half-turn (its exact propagator is -exp(-i gamma n.sigma)),
    // every other scheme must land on gamma_g itself
    let env = Envelope::square(OMEGA_M);
    let dt = 0.02 / OMEGA_M;
    let mut checks = Checks::new("criterion 3 (phase functionals)");
    for gate in [GateSpec::s_gate(), GateSpec::h_gate()] {
        let k = if gate == GateSpec::s_gate() {
            1.13 * PI
        } else {
            1.27 * PI
        };
        let cases: Vec<(PulseSequence, f64)> = vec![
            (build_ocngqg(&gate, k, PathVariant::A, env).unwrap(), gate.gamma_g),
            (build_ocngqg(&gate, 1.87 * PI, PathVariant::B, env).unwrap(), gate.gamma_g),
            (build_cngqg(&gate, 2, PathVariant::A, env).unwrap(), gate.gamma_g),
            (build_cngqg(&gate, 2, PathVariant::B, env).unwrap(), gate.gamma_g),
            (build_ngqg(&gate, PathVariant::A, env), gate.gamma_g),
            (build_ngqg(&gate, PathVariant::B, env), gate.gamma_g - PI),
        ];
        for (seq, expected_geo) in cases {
            let h = ideal_qubit_hamiltonian(&seq, &NoiseSpec::none());
            let traj = dressed_state_trajectory(&h, &gate, dt).unwrap();
            let dynamical = dynamical_phase(&traj).unwrap();
            let geo = geometric_phase(&traj);
            let geo_err = wrap_angle(geo - expected_geo).abs();
            let azimuthal = max_azimuthal_rate(&traj);
            checks.check(
                dynamical.abs() < 1e-6,
                format!("{:?} gamma_d = {dynamical:.2e} rad", seq.scheme),
            );
            checks.check(
                geo_err < 1e-6,
                format!(
                    "{:?} gamma_geo = {geo:.8} rad vs expected {expected_geo:.8} (err {geo_err:.2e})",
                    seq.scheme
                ),
            );
            checks.check(
                azimuthal < 1e-6 * OMEGA_M,
                format!("{:?} meridian deviation {azimuthal:.2e} rad/s", seq.scheme),
            );
        }
    }
    checks.finish();
}

#[test]
fn c04_damping_oracle_agreement_and_rk4_order() {
    // the analytic amplitude-damping solution of the master equation as
    // written is e^{-kappa T}; the integrator must match it to 1e-8
    let kappa = 2.0 * PI * 2e3;
    let mut worst: f64 = 0.0;
    for frac in [0.1, 0.5, 1.0, 1.6, 2.0] {
        let t_final = frac / kappa;
        let ops = collapse_operators(
            DissipationSetting::IdealQubit,
            &DecoherenceSpec::new(0.0, kappa),
        );
        let h = geomgate::models::HamiltonianFn::constant(ComplexMatrix::zeros(2, 2), t_final);
        let excited = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let rho0 = DensityMatrix::from_pure(&excited);
        let rep = evolve_lindblad(&h, &ops, &rho0, t_final, t_final / 4000.0).unwrap();
        let p1 = rep.final_state.expectation(&excited).re;
        let err = (p1 - damping_oracle(kappa, t_final)).abs();
        assert!(err < 1e-8, "kappa*T = {frac}: error {err:.3e}");
        worst = worst.max(err);
    }

    // halving convergence on the Rabi test, measured where the density
    // matrix responds linearly to the state error
    let omega = 1.0;
    let t_final = PI / 2.0;
    let h = geomgate::models::HamiltonianFn::constant(
        geomgate::matrixcore::pauli_x().scaled(C64::new(omega / 2.0, 0.0)),
        t_final,
    );
    let psi0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let exact = [
        C64::new((t_final / 2.0).cos(), 0.0),
        C64::new(0.0, -(t_final / 2.0).sin()),
    ];
    let rho_exact = DensityMatrix::from_pure(&exact);
    let err_at = |dt: f64| {
        let rep = evolve_lindblad(&h, &[], &DensityMatrix::from_pure(&psi0), t_final, dt).unwrap();
        rep.final_state.matrix().sub(rho_exact.matrix()).norm_max()
    };
    let ratio = err_at(t_final / 20.0) / err_at(t_final / 40.0);
    assert!(
        (12.0..=20.0).contains(&ratio),
        "halving-convergence ratio {ratio}"
    );
    pass(
        "criterion 4 (damping oracle + RK4 order)",
        format!("max |p1 - e^(-kT)| = {worst:.3e}; halving ratio {ratio:.2}"),
    );
}

#[test]
fn c05_gate_durations() {
    let env = Envelope::sin_squared(OMEGA_M);
    let s = GateSpec::s_gate();
    let mut checks = Checks::new("criterion 5 (duration arithmetic)");
    let ocngqg = build_ocngqg(&s, 1.13 * PI, PathVariant::A, env).unwrap();
    checks.check(
        (ocngqg.total_duration() - 66.7e-9).abs() < 0.1e-9,
        format!("optimized composite S: {:.3} ns vs 66.7", ocngqg.total_duration() * 1e9),
    );
    let ngqg = build_ngqg(&s, PathVariant::A, env);
    checks.check(
        (ngqg.total_duration() - 33.3e-9).abs() < 0.1e-9,
        format!("single-loop S: {:.3} ns vs 33.3", ngqg.total_duration() * 1e9),
    );
    let cngqg = build_cngqg(&s, 2, PathVariant::A, env).unwrap();
    checks.check(
        (cngqg.total_duration() - 66.7e-9).abs() < 0.1e-9,
        format!("two-loop S: {:.3} ns vs 66.7", cngqg.total_duration() * 1e9),
    );

    let spec = default_two_qubit_spec();
    let cp_opt = cp_sequence(&CpGate::optimized(PI / 2.0, 1.27 * PI), &spec).unwrap();
    checks.check(
        (cp_opt.total_duration() - 121.6e-9).abs() < 1e-9,
        format!("optimized CP: {:.2} ns vs 121.6", cp_opt.total_duration() * 1e9),
    );
    for scheme in [Scheme::NgqgA, Scheme::Dg] {
        let seq = cp_sequence(
            &CpGate {
                gamma: PI / 2.0,
                k: 0.0,
                scheme,
            },
            &spec,
        )
        .unwrap();
        checks.check(
            (seq.total_duration() - 60.8e-9).abs() < 1e-9,
            format!("{scheme:?} CP: {:.2} ns vs 60.8", seq.total_duration() * 1e9),
        );
    }
    checks.finish();
}

fn k_search_scenario() -> Scenario {
    Scenario::ideal(Envelope::square(OMEGA_M)).with_noise(NoiseSpec::new(0.1, 0.1))
}

#[test]
fn c06_optimal_path_parameters() {
    let scen = k_search_scenario();
    let cases = [
        (GateSpec::s_gate(), ErrorMode::X, 1.13),
        (GateSpec::s_gate(), ErrorMode::Z, 1.13),
        (GateSpec::s_gate(), ErrorMode::Both, 1.13),
        (GateSpec::h_gate(), ErrorMode::X, 1.43),
        (GateSpec::h_gate(), ErrorMode::Z, 1.27),
        (GateSpec::h_gate(), ErrorMode::Both, 1.17),
    ];
    let mut checks = Checks::new("criterion 6 (optimal k values)");
    for (gate, mode, want_pi) in cases {
        let result = optimize_k(&gate, PathVariant::A, mode, 201, &scen).unwrap();
        let got = result.argmax[0] / PI;
        checks.check(
            (got - want_pi).abs() <= 0.02 + 1e-12,
            format!(
                "{} gate, mode {}: k = {got:.2} pi vs {want_pi} pi (F = {:.6})",
                if gate == GateSpec::s_gate() { "S" } else { "H" },
                mode.label(),
                result.max_fidelity
            ),
        );
    }
    checks.finish();
}

#[test]
fn c07_optimal_path_parameters_path_b() {
    let scen = k_search_scenario();
    let cases = [
        (GateSpec::s_gate(), ErrorMode::X, 1.87),
        (GateSpec::s_gate(), ErrorMode::Z, 1.87),
        (GateSpec::h_gate(), ErrorMode::X, 1.67),
        (GateSpec::h_gate(), ErrorMode::Z, 0.27),
    ];
    let mut checks = Checks::new("criterion 7 (optimal k', second path)");
    for (gate, mode, want_pi) in cases {
        let result = optimize_k(&gate, PathVariant::B, mode, 201, &scen).unwrap();
        let got = result.argmax[0] / PI;
        let ok = (got - want_pi).abs() <= 0.03 + 1e-12;
        let mut line = format!(
            "{} gate, mode {}: k' = {got:.2} pi vs {want_pi} pi",
            if gate == GateSpec::s_gate() { "S" } else { "H" },
            mode.label(),
        );
        if !ok && (2.0 - got - want_pi).abs() <= 0.03 {
            line.push_str(&format!(
                " [the scan has a single local maximum at {got:.2} pi; its mirror \
                 2 pi - k' = {:.2} pi matches the quoted value exactly, consistent \
                 with an opposite k' orientation in the quoted source]",
                2.0 - got
            ));
        }
        checks.check(ok, line);
    }
    checks.finish();
}

fn table_scenario() -> Scenario {
    Scenario::transmon(
        default_transmon_spec(),
        Envelope::sin_squared(OMEGA_M).with_drag(default_transmon_spec().anharmonicity),
    )
    .with_decoherence(DecoherenceSpec::new(KAPPA_TRANSMON, KAPPA_TRANSMON))
}

#[test]
fn c08_transmon_fidelity_table() {
    let s = GateSpec::s_gate();
    let scen = table_scenario();
    let oc = SchemeRun::with_k(Scheme::OcngqgA, 1.13 * PI);
    let cases: Vec<(&str, SchemeRun, f64, f64, f64)> = vec![
        // (label, scheme, epsilon, delta, expected fidelity)
        ("optimized S", oc, 0.0, 0.0, 0.9996),
        ("optimized S, eps 0.1", oc, 0.1, 0.0, 0.9994),
        ("optimized S, delta 0.1", oc, 0.0, 0.1, 0.9991),
        ("two-loop A S", SchemeRun::new(Scheme::CngqgA), 0.0, 0.0, 0.9996),
        ("two-loop A S, eps 0.1", SchemeRun::new(Scheme::CngqgA), 0.1, 0.0, 0.9912),
        ("two-loop B S", SchemeRun::new(Scheme::CngqgB), 0.0, 0.0, 0.9994),
        ("two-loop B S, delta 0.1", SchemeRun::new(Scheme::CngqgB), 0.0, 0.1, 0.9689),
        ("single-loop A S", SchemeRun::new(Scheme::NgqgA), 0.0, 0.0, 0.9998),
        ("single-loop A S, eps 0.1", SchemeRun::new(Scheme::NgqgA), 0.1, 0.0, 0.9906),
        ("single-loop B S", SchemeRun::new(Scheme::NgqgB), 0.0, 0.0, 0.9997),
        ("single-loop B S, delta 0.1", SchemeRun::new(Scheme::NgqgB), 0.0, 0.1, 0.9835),
        ("dynamical S", SchemeRun::new(Scheme::Dg), 0.0, 0.0, 0.9998),
        ("dynamical S, eps 0.1", SchemeRun::new(Scheme::Dg), 0.1, 0.0, 0.9878),
        ("dynamical S, delta 0.1", SchemeRun::new(Scheme::Dg), 0.0, 0.1, 0.9447),
    ];
    let mut checks = Checks::new("criterion 8 (transmon fidelities)");
    for (label, run, eps, delta, want) in cases {
        let f = scen
            .with_noise(NoiseSpec::new(eps, delta))
            .gate_fidelity(&run, &s)
            .unwrap()
            .fidelity;
        checks.check(
            (f - want).abs() <= 0.002,
            format!("{label}: F = {f:.4} vs {want:.4}"),
        );
    }
    checks.finish();
}

#[test]
fn c09_two_qubit_cp_gate() {
    let spec = default_two_qubit_spec();
    let dec = DecoherenceSpec::new(KAPPA_TRANSMON, KAPPA_TRANSMON);
    let gate = CpGate::optimized(PI / 2.0, 1.27 * PI);
    let mut checks = Checks::new("criterion 9 (two-qubit CP gate)");

    // point fidelity and infidelity decomposition at the optimum
    let trace = dynamics_trace(&spec, &dec, &gate, 200, StepControl::budget(0.02)).unwrap();
    checks.check(
        trace.final_full >= 0.995,
        format!("fidelity at the optimum: {:.4}", trace.final_full),
    );
    checks.check(
        (trace.hot_infidelity - 0.0013).abs() <= 0.0010,
        format!(
            "oscillating-term infidelity {:.4}% vs 0.13% +- 0.10%",
            100.0 * trace.hot_infidelity
        ),
    );
    checks.check(
        (trace.decoherence_infidelity - 0.0017).abs() <= 0.0010,
        format!(
            "decoherence infidelity {:.4}% vs 0.17% +- 0.10%",
            100.0 * trace.decoherence_infidelity
        ),
    );
    checks.check(
        1.0 - trace.final_effective < 1e-4,
        format!(
            "effective-model construction exact to {:.2e}",
            1.0 - trace.final_effective
        ),
    );

    // coarse parameter map: argmax within one cell of the stated optimum
    let map = cp_parameter_map(
        (2.0 * PI * 544e6, 2.0 * PI * 644e6),
        (1.3, 2.3),
        (11, 11),
        &spec,
        &dec,
        &gate,
        StepControl::budget(0.05),
    )
    .unwrap();
    let cell_delta = 2.0 * PI * 10e6;
    let cell_beta = 0.1;
    let delta_err = (map.argmax[0] - 2.0 * PI * 594e6).abs();
    let beta_err = (map.argmax[1] - 1.8).abs();
    let argmax_ok = delta_err <= cell_delta + 1e-3 && beta_err <= cell_beta + 1e-9;
    let mut line = format!(
        "map argmax at (Delta = 2 pi x {:.0} MHz, beta = {:.2}), F = {:.4}, vs (594 MHz, 1.8)",
        map.argmax[0] / (2.0 * PI * 1e6),
        map.argmax[1],
        map.max_fidelity
    );
    if !argmax_ok {
        line.push_str(
            " [the fidelity along the detuning axis carries oscillating-term \
             interference wiggles of ~1e-3 with local peaks near 574 and 624 MHz \
             whose height matches the quoted optimal fidelity; the modulation-index \
             coordinate is exact]",
        );
    }
    checks.check(argmax_ok, line);
    checks.finish();
}

#[test]
fn c10_robustness_orderings() {
    let scen = Scenario::ideal(Envelope::square(OMEGA_M));
    let mut checks = Checks::new("criterion 10 (robustness orderings)");
    let k_x = [1.13 * PI, 1.43 * PI];
    let k_z = [1.13 * PI, 1.27 * PI];
    for (gi, gate) in [GateSpec::s_gate(), GateSpec::h_gate()].into_iter().enumerate() {
        let gate_name = if gi == 0 { "S" } else { "H" };
        // drive-amplitude errors: optimized vs the Path-A family and the
        // dynamical gate
        let runs_x = [
            SchemeRun::with_k(Scheme::OcngqgA, k_x[gi]),
            SchemeRun::new(Scheme::CngqgA),
            SchemeRun::new(Scheme::NgqgA),
            SchemeRun::new(Scheme::Dg),
        ];
        let curves = robustness_curve(&runs_x, &gate, ErrorAxis::Epsilon, (-0.1, 0.1), 3, &scen)
            .unwrap();
        for sign_idx in [0usize, 2] {
            let oc = 1.0 - curves[0].values[sign_idx];
            for (run, curve) in runs_x.iter().zip(&curves).skip(1) {
                let comp = 1.0 - curve.values[sign_idx];
                checks.check(
                    oc <= comp,
                    format!(
                        "{gate_name} eps = {:+.1}: optimized {oc:.2e} <= {} {comp:.2e}",
                        curve.grid.axes[0].value(sign_idx),
                        run.scheme.label()
                    ),
                );
            }
        }
        // detuning errors: optimized vs the Path-B family and the dynamical
        // gate
        let runs_z = [
            SchemeRun::with_k(Scheme::OcngqgA, k_z[gi]),
            SchemeRun::new(Scheme::CngqgB),
            SchemeRun::new(Scheme::NgqgB),
            SchemeRun::new(Scheme::Dg),
        ];
        let curves =
            robustness_curve(&runs_z, &gate, ErrorAxis::Delta, (-0.1, 0.1), 3, &scen).unwrap();
        for sign_idx in [0usize, 2] {
            let oc = 1.0 - curves[0].values[sign_idx];
            for (run, curve) in runs_z.iter().zip(&curves).skip(1) {
                let comp = 1.0 - curve.values[sign_idx];
                let ok = oc <= comp;
                let mut line = format!(
                    "{gate_name} delta = {:+.1}: optimized {oc:.2e} <= {} {comp:.2e}",
                    curve.grid.axes[0].value(sign_idx),
                    run.scheme.label()
                );
                if !ok {
                    line.push_str(
                        " [reproducible crossover: the two-loop Path-B Hadamard is more \
                         robust at negative detuning error for every candidate path \
                         parameter and envelope]",
                    );
                }
                checks.check(ok, line);
            }
        }
    }
    checks.finish();
}

#[test]
fn c11_density_matrix_invariants_along_acceptance_runs() {
    // invariants sampled along a noisy decoherent transmon run and along the
    // full two-transmon run at the optimum
    let mut worst_trace: f64 = 0.0;
    let mut worst_herm: f64 = 0.0;
    let mut worst_eig: f64 = f64::INFINITY;
    let mut samples = 0usize;
    {
        let scen = table_scenario().with_noise(NoiseSpec::new(0.1, 0.1));
        let gate = GateSpec::s_gate();
        let seq = SchemeRun::with_k(Scheme::OcngqgA, 1.13 * PI)
            .build(&gate, scen.envelope)
            .unwrap();
        let h = transmon_hamiltonian(&seq, &NoiseSpec::new(0.1, 0.1), &default_transmon_spec())
            .unwrap();
        let ops = collapse_operators(
            DissipationSetting::Transmon(3),
            &DecoherenceSpec::new(KAPPA_TRANSMON, KAPPA_TRANSMON),
        );
        let psi0 = [
            C64::new(1.0, 0.0) / C64::new(2.0f64.sqrt(), 0.0),
            C64::new(0.0, 1.0) / C64::new(2.0f64.sqrt(), 0.0),
            C64::new(0.0, 0.0),
        ];
        let rho0 = DensityMatrix::from_pure(&psi0);
        evolve_lindblad_sampled(
            &h,
            &ops,
            &rho0,
            seq.total_duration(),
            scen.time_step(),
            200,
            |_t, rho| {
                let dm = DensityMatrix::new(rho.clone()).expect("valid state along the run");
                worst_trace = worst_trace.max((dm.trace().re - 1.0).abs());
                worst_herm = worst_herm.max(dm.hermiticity_deviation());
                worst_eig = worst_eig.min(dm.min_eigenvalue_estimate());
                samples += 1;
            },
        )
        .unwrap();
    }
    {
        let spec = default_two_qubit_spec();
        let gate = CpGate::optimized(PI / 2.0, 1.27 * PI);
        let seq = cp_sequence(&gate, &spec).unwrap();
        let h = geomgate::models::twoqubit_interaction_hamiltonian(
            &spec,
            &seq,
            &NoiseSpec::none(),
        );
        let ops = collapse_operators(
            DissipationSetting::TwoTransmon,
            &DecoherenceSpec::new(KAPPA_TRANSMON, KAPPA_TRANSMON),
        );
        let mut psi0 = vec![C64::new(0.0, 0.0); 9];
        psi0[4] = C64::new(1.0, 0.0); // |11>
        let rho0 = DensityMatrix::from_pure(&psi0);
        let dt = StepControl::budget(0.02).step_for(
            spec.delta_omega + spec.alpha1 + spec.beta * spec.nu + 4.0 * spec.g12,
        );
        evolve_lindblad_sampled(&h, &ops, &rho0, seq.total_duration(), dt, 2000, |_t, rho| {
            let dm = DensityMatrix::new(rho.clone()).expect("valid state along the run");
            worst_trace = worst_trace.max((dm.trace().re - 1.0).abs());
            worst_herm = worst_herm.max(dm.hermiticity_deviation());
            worst_eig = worst_eig.min(dm.min_eigenvalue_estimate());
            samples += 1;
        })
        .unwrap();
    }
    assert!(worst_trace < 1e-8, "trace deviation {worst_trace:.3e}");
    assert!(worst_herm < 1e-10, "hermiticity deviation {worst_herm:.3e}");
    assert!(worst_eig > -1e-7, "smallest eigenvalue {worst_eig:.3e}");
    pass(
        "criterion 11 (density-matrix invariants)",
        format!(
            "{samples} samples: |tr-1| <= {worst_trace:.2e}, herm <= {worst_herm:.2e}, \
             min eig >= {worst_eig:.2e}"
        ),
    );
}

#[test]
fn c12_reduction_consistency_at_the_boundary_k() {
    // at k = 2 pi - gamma_g/2 the optimized sequence coincides with the
    // two-loop composite one; fidelities under identical noise must agree
    let gate = GateSpec::s_gate();
    let k = 2.0 * PI - gate.gamma_g / 2.0;
    let mut worst: f64 = 0.0;
    for scen in [
        k_search_scenario(),
        table_scenario().with_noise(NoiseSpec::new(0.1, 0.1)),
    ] {
        let f_oc = scen
            .gate_fidelity(&SchemeRun::with_k(Scheme::OcngqgA, k), &gate)
            .unwrap()
            .fidelity;
        let f_c = scen
            .gate_fidelity(&SchemeRun::new(Scheme::CngqgA), &gate)
            .unwrap()
            .fidelity;
        let gap = (f_oc - f_c).abs();
        assert!(gap < 1e-6, "fidelity gap {gap:.3e}");
        worst = worst.max(gap);
    }
    pass(
        "criterion 12 (reduction consistency)",
        format!("optimized-at-boundary vs two-loop fidelity gap {worst:.3e}"),
    );
}

#[test]
fn c13_sweeps_are_deterministic_across_thread_counts() {
    let gate = GateSpec::s_gate();
    let scen = table_scenario();
    let run_sweep = || -> Result<Vec<u8>, SweepError> {
        let runs = [SchemeRun::new(Scheme::NgqgA)];
        let curves = robustness_curve(&runs, &gate, ErrorAxis::Epsilon, (-0.1, 0.1), 5, &scen)?;
        let mut buf = Vec::new();
        curves[0].write_csv(&mut buf).unwrap();
        Ok(buf)
    };
    let mut outputs = Vec::new();
    for threads in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        outputs.push(pool.install(run_sweep).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "1-thread vs 2-thread CSV differ");
    assert_eq!(outputs[0], outputs[2], "1-thread vs 4-thread CSV differ");
    // and across repeated runs on the same pool
    let again = run_sweep().unwrap();
    assert_eq!(outputs[0], again, "repeated run differs");
    pass(
        "criterion 13 (sweep determinism)",
        format!("byte-identical CSV across 1/2/4 threads ({} bytes)", again.len()),
    );
}

// Supporting cross-checks used by the criteria above.

#[test]
fn unitary_and_lindblad_engines_agree_on_an_acceptance_scenario() {
    let gate = GateSpec::h_gate();
    let seq = build_ocngqg(&gate, 1.17 * PI, PathVariant::A, Envelope::sin_squared(OMEGA_M))
        .unwrap();
    let noise = NoiseSpec::new(0.08, -0.05);
    let h = ideal_qubit_hamiltonian(&seq, &noise);
    let dt = 0.02 / OMEGA_M;
    let f_unitary = single_qubit_fidelity(&gate.target_unitary(), 2, |psi0| {
        let psi = evolve_unitary(&h, psi0, seq.total_duration(), dt)?;
        Ok(DensityMatrix::from_pure(&psi))
    })
    .unwrap();
    let f_lindblad = single_qubit_fidelity(&gate.target_unitary(), 2, |psi0| {
        Ok(evolve_lindblad(&h, &[], &DensityMatrix::from_pure(psi0), seq.total_duration(), dt)?
            .final_state)
    })
    .unwrap();
    let gap = (f_unitary.fidelity - f_lindblad.fidelity).abs();
    assert!(gap < 1e-8, "engine fidelity gap {gap:.3e}");
}

#[test]
fn cp_fidelity_point_matches_the_trace_endpoint() {
    // the 16-state fidelity evaluated directly agrees with the dynamics
    // trace's final sample on the effective model
    let spec = default_two_qubit_spec();
    let gate = CpGate::optimized(PI / 2.0, 1.27 * PI);
    let f = cp_fidelity(
        &spec,
        &DecoherenceSpec::none(),
        &gate,
        &NoiseSpec::none(),
        CpModel::Effective,
        StepControl::default(),
    )
    .unwrap();
    assert!(f.fidelity > 0.9999, "effective-model fidelity {}", f.fidelity);
}
