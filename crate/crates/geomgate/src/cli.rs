//! Config-driven batch front end.
//!
//! A run is described by a sectioned `key = value` text file and dispatched
//! through one of six subcommands: `fidelity`, `sweep-k`, `robustness`,
//! `cp-map`, `dynamics`, `export`. Results land in the output directory as
//! CSV (deterministic row order, 10 significant digits), JSON (stable key
//! order), and optionally SVG heatmaps.
//!
//! Unit conventions in config files: keys ending in `_hz` are plain
//! frequencies multiplied by `2 pi` on input; keys ending in `_pi` are
//! angles in units of `pi`. Everything else is SI or dimensionless.

use clap::{Parser, Subcommand};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::metrics::FidelityResult;
use crate::models::{DecoherenceSpec, NoiseSpec, TransmonSpec, TwoQubitSpec};
use crate::pulseforge::{Envelope, EnvelopeKind, GateSpec, PulseError, PulseSequence, Scheme};
use crate::sweeps::{
    cp_fidelity, cp_parameter_map, cp_sequence, dynamics_trace, optimize_k, robustness_curve,
    robustness_map, CpGate, CpModel, ErrorAxis, ErrorMode, Scenario, SchemeRun, SingleQubitModel,
    StepControl, SweepError, SweepResult,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser, Debug)]
#[command(
    name = "geomgate",
    about = "Pulse-level simulation and optimization of composite geometric quantum gates"
)]
pub struct Cli {
    /// Scenario config file (sectioned key = value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides [output] dir).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweep evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also render SVG heatmaps for sweep outputs.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Integrator step override in seconds.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the configured gate's state-averaged fidelity.
    Fidelity,
    /// Scan the path parameter k over [0, 2 pi] and report the optimum.
    SweepK,
    /// Scan fidelity over systematic errors (one axis: curves; two: a map).
    Robustness,
    /// Scan the two-qubit gate fidelity over detuning and modulation index.
    CpMap,
    /// Trace the two-qubit gate fidelity over time and split its infidelity.
    Dynamics,
    /// Write the configured pulse sequence as JSON.
    Export,
}

/// Parsed sectioned `key = value` document with unit-aware accessors.
pub struct ConfigDoc {
    path: String,
    sections: BTreeMap<String, BTreeMap<String, String>>,
    consumed: Mutex<BTreeSet<(String, String)>>,
}

impl ConfigDoc {
    pub fn parse(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text, &path.display().to_string())
    }

    pub fn parse_str(text: &str, path: &str) -> Result<Self, CliError> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::from("scenario");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config {
                    path: path.into(),
                    message: format!("line {}: expected key = value, got '{raw}'", lineno + 1),
                });
            };
            sections
                .entry(current.clone())
                .or_default()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self {
            path: path.into(),
            sections,
            consumed: Default::default(),
        })
    }

    fn err(&self, message: String) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            message,
        }
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        let v = self.sections.get(section)?.get(key)?;
        self.consumed
            .lock()
            .expect("consumed-keys lock")
            .insert((section.into(), key.into()));
        Some(v.as_str())
    }

    /// Numeric value with the unit conventions applied: `*_hz` keys are
    /// multiplied by `2 pi`, `*_pi` keys by `pi`.
    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>, CliError> {
        let Some(text) = self.raw(section, key) else {
            return Ok(None);
        };
        let value: f64 = text.parse().map_err(|_| {
            self.err(format!("key '{key}' in [{section}]: '{text}' is not a number"))
        })?;
        let scaled = if key.ends_with("_hz") {
            2.0 * PI * value
        } else if key.ends_with("_pi") {
            PI * value
        } else {
            value
        };
        Ok(Some(scaled))
    }

    pub fn number_or(&self, section: &str, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.number(section, key)?.unwrap_or(default))
    }

    pub fn require_number(&self, section: &str, key: &str) -> Result<f64, CliError> {
        self.number(section, key)?
            .ok_or_else(|| self.err(format!("missing key '{key}' in [{section}]")))
    }

    pub fn string(&self, section: &str, key: &str) -> Option<String> {
        self.raw(section, key).map(str::to_string)
    }

    pub fn string_or(&self, section: &str, key: &str, default: &str) -> String {
        self.string(section, key).unwrap_or_else(|| default.into())
    }

    pub fn boolean_or(&self, section: &str, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some("true") | Some("yes") | Some("on") | Some("1") => Ok(true),
            Some("false") | Some("no") | Some("off") | Some("0") => Ok(false),
            Some(other) => Err(self.err(format!(
                "key '{key}' in [{section}]: '{other}' is not a boolean"
            ))),
        }
    }

    pub fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(text) => text.parse().map_err(|_| {
                self.err(format!(
                    "key '{key}' in [{section}]: '{text}' is not a whole number"
                ))
            }),
        }
    }

    /// Reject keys that no reader consumed; catches typos loudly. Sections
    /// in `skip` are exempt (a shared config may carry sweep settings that a
    /// non-sweep subcommand never reads).
    pub fn check_unused(&self, skip: &[&str]) -> Result<(), CliError> {
        let consumed = self.consumed.lock().expect("consumed-keys lock");
        for (section, keys) in &self.sections {
            if skip.contains(&section.as_str()) {
                continue;
            }
            for key in keys.keys() {
                if !consumed.contains(&(section.clone(), key.clone())) {
                    return Err(self.err(format!("unknown key '{key}' in [{section}]")));
                }
            }
        }
        Ok(())
    }
}

/// Which gate a scenario drives.
#[derive(Debug, Clone, Copy)]
pub enum GateChoice {
    Single(GateSpec),
    ControlledPhase(CpGate),
}

/// Everything a run needs, decoded from the config document.
#[derive(Debug)]
pub struct ScenarioConfig {
    pub scheme: SchemeRun,
    pub gate: GateChoice,
    pub single_qubit: Option<Scenario>,
    pub two_qubit: Option<(TwoQubitSpec, DecoherenceSpec, NoiseSpec)>,
    pub out_dir: PathBuf,
    pub svg: bool,
    pub step: StepControl,
}

impl ScenarioConfig {
    pub fn from_doc(doc: &ConfigDoc, cli: &Cli) -> Result<Self, CliError> {
        let s = "scenario";
        let scheme_name = doc.string_or(s, "scheme", "OCNGQG-A");
        let scheme = Scheme::parse(&scheme_name)
            .ok_or_else(|| doc.err(format!("key 'scheme' in [scenario]: unknown scheme '{scheme_name}'")))?;
        let k = doc.number(s, "k_pi")?;
        let loops = doc.usize_or(s, "loops", 2)?;
        let mut scheme_run = SchemeRun { scheme, k, loops };

        let step = StepControl {
            phase_budget: doc.number_or(s, "phase_budget", crate::sweeps::DEFAULT_PHASE_BUDGET)?,
            dt_override: cli.dt,
        };

        let gate_name = doc.string_or(s, "gate", "S");
        let model_name = doc.string_or(s, "model", "ideal");

        let omega_max = doc.number_or(s, "omega_max_hz", 2.0 * PI * 60e6)?;
        let anharmonicity = doc.number_or(s, "anharmonicity_hz", 2.0 * PI * 320e6)?;
        let envelope_kind = match doc.string_or(s, "envelope", "sin2").as_str() {
            "square" => EnvelopeKind::Square,
            "sin2" => EnvelopeKind::SinSquared,
            other => {
                return Err(doc.err(format!(
                    "key 'envelope' in [scenario]: '{other}' is not square|sin2"
                )))
            }
        };
        let drag = doc.boolean_or(s, "drag", false)?;
        let mut envelope = Envelope {
            kind: envelope_kind,
            omega_max,
            drag_alpha: None,
        };
        if drag {
            envelope = envelope.with_drag(anharmonicity);
        }

        let noise = NoiseSpec::new(
            doc.number_or(s, "epsilon", 0.0)?,
            doc.number_or(s, "delta", 0.0)?,
        );
        let decoherence = DecoherenceSpec::new(
            doc.number_or(s, "kappa_z_hz", 0.0)?,
            doc.number_or(s, "kappa_minus_hz", 0.0)?,
        );

        let (gate, single_qubit, two_qubit) = match (gate_name.as_str(), model_name.as_str()) {
            ("CP", "two-transmon") => {
                let spec = TwoQubitSpec::new(
                    doc.number_or(s, "g12_hz", 2.0 * PI * 10e6)?,
                    doc.number_or(s, "delta_omega_hz", 2.0 * PI * 594e6)?,
                    doc.number_or(s, "alpha1_hz", 2.0 * PI * 320e6)?,
                    doc.number_or(s, "alpha2_hz", 2.0 * PI * 300e6)?,
                    doc.number_or(s, "beta", 1.8)?,
                );
                let gamma = doc.number_or(s, "gamma_g_pi", PI / 2.0)?;
                let cp = CpGate {
                    gamma,
                    k: k.unwrap_or(1.27 * PI),
                    scheme,
                };
                (GateChoice::ControlledPhase(cp), None, Some((spec, decoherence, noise)))
            }
            ("CP", other) => {
                return Err(doc.err(format!(
                    "gate CP requires model = two-transmon, got '{other}'"
                )))
            }
            (_, "two-transmon") => {
                return Err(doc.err("model two-transmon requires gate = CP".into()))
            }
            (name, model) => {
                let gate = match name {
                    "S" => GateSpec::s_gate(),
                    "H" => GateSpec::h_gate(),
                    "custom" => GateSpec::new(
                        doc.require_number(s, "alpha0_pi")?,
                        doc.require_number(s, "beta0_pi")?,
                        doc.require_number(s, "gamma_g_pi")?,
                    )
                    .map_err(|e| doc.err(format!("custom gate: {e}")))?,
                    other => {
                        return Err(doc.err(format!(
                            "key 'gate' in [scenario]: '{other}' is not S|H|CP|custom"
                        )))
                    }
                };
                let model = match model {
                    "ideal" => SingleQubitModel::Ideal,
                    "transmon" => SingleQubitModel::Transmon(TransmonSpec {
                        levels: doc.usize_or(s, "levels", 3)?,
                        anharmonicity,
                        omega_max,
                    }),
                    other => {
                        return Err(doc.err(format!(
                            "key 'model' in [scenario]: '{other}' is not ideal|transmon|two-transmon"
                        )))
                    }
                };
                let scenario = Scenario {
                    model,
                    envelope,
                    noise,
                    decoherence,
                    step,
                };
                (GateChoice::Single(gate), Some(scenario), None)
            }
        };

        if let GateChoice::ControlledPhase(cp) = gate {
            scheme_run.k = Some(cp.k);
        }

        let out_dir = cli
            .out
            .clone()
            .or_else(|| doc.string("output", "dir").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let svg = cli.svg || doc.boolean_or("output", "svg", false)?;

        Ok(Self {
            scheme: scheme_run,
            gate,
            single_qubit,
            two_qubit,
            out_dir,
            svg,
            step,
        })
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn write_sweep_outputs(
    out_dir: &Path,
    stem: &str,
    result: &SweepResult,
    svg: bool,
) -> Result<(), CliError> {
    let csv_path = out_dir.join(format!("{stem}.csv"));
    let mut buf = Vec::new();
    result.write_csv(&mut buf)?;
    std::fs::write(&csv_path, buf)?;
    write_json(&out_dir.join(format!("{stem}_summary.json")), &result.summary_json())?;
    if svg {
        let svg_text = heatmap_svg(result, stem);
        std::fs::write(out_dir.join(format!("{stem}.svg")), svg_text)?;
    }
    println!(
        "{stem}: max fidelity {:.6} at {:?} ({} points) -> {}",
        result.max_fidelity,
        result.argmax,
        result.values.len(),
        csv_path.display()
    );
    Ok(())
}

/// Minimal SVG heatmap: one rect per grid cell on a linear two-color ramp,
/// with axis names, ranges and the value scale in text.
pub fn heatmap_svg(result: &SweepResult, title: &str) -> String {
    let (nx, ny) = match result.grid.axes.len() {
        1 => (result.grid.axes[0].points, 1),
        _ => (result.grid.axes[1].points, result.grid.axes[0].points),
    };
    let cell = 14usize;
    let margin = 60usize;
    let width = margin * 2 + nx * cell;
    let height = margin * 2 + ny * cell;
    let lo = result.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = result
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-300);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"13\">{title}</text>\n",
        margin
    ));
    for (i, v) in result.values.iter().enumerate() {
        let (row, col) = if result.grid.axes.len() == 1 {
            (0, i)
        } else {
            (i / nx, i % nx)
        };
        let t = (v - lo) / span;
        // dark blue (low) to yellow (high)
        let r = (20.0 + 235.0 * t) as u8;
        let g = (25.0 + 210.0 * t) as u8;
        let b = (90.0 * (1.0 - t) + 40.0) as u8;
        let x = margin + col * cell;
        let y = margin + (ny - 1 - row) * cell;
        s.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" \
             fill=\"rgb({r},{g},{b})\"/>\n"
        ));
    }
    let ax0 = &result.grid.axes[0];
    if result.grid.axes.len() == 2 {
        let ax1 = &result.grid.axes[1];
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{} [{}]: {:.4e} .. {:.4e}</text>\n",
            margin, height - margin + 20, ax1.name, ax1.unit, ax1.min, ax1.max
        ));
        s.push_str(&format!(
            "<text x=\"12\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             transform=\"rotate(-90 12 {})\">{} [{}]: {:.4e} .. {:.4e}</text>\n",
            height / 2,
            height / 2,
            ax0.name,
            ax0.unit,
            ax0.min,
            ax0.max
        ));
    } else {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{} [{}]: {:.4e} .. {:.4e}</text>\n",
            margin, height - margin + 20, ax0.name, ax0.unit, ax0.min, ax0.max
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">fidelity {lo:.6} .. {hi:.6}</text>\n",
        margin,
        height - margin + 38
    ));
    s.push_str("</svg>\n");
    s
}

fn fidelity_command(cfg: &ScenarioConfig) -> Result<serde_json::Value, CliError> {
    let (label, duration, fid): (String, f64, FidelityResult) = match (&cfg.gate, &cfg.single_qubit, &cfg.two_qubit) {
        (GateChoice::Single(gate), Some(scen), _) => {
            let seq = cfg.scheme.build(gate, scen.envelope)?;
            let f = scen.sequence_fidelity(&seq)?;
            (
                format!("{} {}", cfg.scheme.scheme.label(), gate_label(gate)),
                seq.total_duration(),
                f,
            )
        }
        (GateChoice::ControlledPhase(cp), _, Some((spec, dec, noise))) => {
            let seq = cp_sequence(cp, spec)?;
            let f = cp_fidelity(spec, dec, cp, noise, CpModel::Full, cfg.step)?;
            (
                format!("{} CP", cfg.scheme.scheme.label()),
                seq.total_duration(),
                f,
            )
        }
        _ => unreachable!("config decoding pins the model-gate pairing"),
    };
    Ok(serde_json::json!({
        "scheme": cfg.scheme.scheme.label(),
        "gate": label,
        "duration_s": duration,
        "fidelity": fid.fidelity,
        "per_state": fid.per_state,
    }))
}

fn gate_label(gate: &GateSpec) -> String {
    if *gate == GateSpec::s_gate() {
        "S".into()
    } else if *gate == GateSpec::h_gate() {
        "H".into()
    } else {
        format!(
            "(alpha0={:.4}, beta0={:.4}, gamma_g={:.4})",
            gate.alpha0, gate.beta0, gate.gamma_g
        )
    }
}

fn single_qubit_parts<'a>(
    cfg: &'a ScenarioConfig,
    doc: &ConfigDoc,
) -> Result<(&'a GateSpec, &'a Scenario), CliError> {
    match (&cfg.gate, &cfg.single_qubit) {
        (GateChoice::Single(g), Some(s)) => Ok((g, s)),
        _ => Err(doc.err("this subcommand needs a single-qubit gate (S, H or custom)".into())),
    }
}

fn sweep_k_command(cfg: &ScenarioConfig, doc: &ConfigDoc) -> Result<(), CliError> {
    let (gate, scenario) = single_qubit_parts(cfg, doc)?;
    let mode = match doc.string_or("sweep", "error_mode", "Both").as_str() {
        "X" => ErrorMode::X,
        "Z" => ErrorMode::Z,
        "Both" | "X&Z" => ErrorMode::Both,
        other => {
            return Err(doc.err(format!(
                "key 'error_mode' in [sweep]: '{other}' is not X|Z|Both"
            )))
        }
    };
    let points = doc.usize_or("sweep", "points", 201)?;
    let magnitude = NoiseSpec::new(
        doc.number_or("sweep", "epsilon", 0.1)?,
        doc.number_or("sweep", "delta", 0.1)?,
    );
    let path = match cfg.scheme.scheme {
        Scheme::OcngqgB => crate::pulseforge::PathVariant::B,
        _ => crate::pulseforge::PathVariant::A,
    };
    let result = optimize_k(gate, path, mode, points, &scenario.with_noise(magnitude))?;
    write_sweep_outputs(&cfg.out_dir, "sweep_k", &result, cfg.svg)
}

fn robustness_command(cfg: &ScenarioConfig, doc: &ConfigDoc) -> Result<(), CliError> {
    let (gate, scenario) = single_qubit_parts(cfg, doc)?;
    let points = doc.usize_or("sweep", "points", 41)?;
    let two_axes = doc.number("sweep", "eps_min")?.is_some();
    if two_axes {
        let eps = (
            doc.require_number("sweep", "eps_min")?,
            doc.require_number("sweep", "eps_max")?,
        );
        let del = (
            doc.require_number("sweep", "delta_min")?,
            doc.require_number("sweep", "delta_max")?,
        );
        let result = robustness_map(&cfg.scheme, gate, eps, del, points, scenario)?;
        write_sweep_outputs(&cfg.out_dir, "robustness_map", &result, cfg.svg)
    } else {
        let axis = match doc.string_or("sweep", "axis", "epsilon").as_str() {
            "epsilon" => ErrorAxis::Epsilon,
            "delta" => ErrorAxis::Delta,
            other => {
                return Err(doc.err(format!(
                    "key 'axis' in [sweep]: '{other}' is not epsilon|delta"
                )))
            }
        };
        let range = (
            doc.number_or("sweep", "min", -0.2)?,
            doc.number_or("sweep", "max", 0.2)?,
        );
        let runs = parse_scheme_list(doc, cfg)?;
        let results = robustness_curve(&runs, gate, axis, range, points, scenario)?;
        for (run, result) in runs.iter().zip(&results) {
            let stem = format!("robustness_{}", run.scheme.label().to_lowercase());
            write_sweep_outputs(&cfg.out_dir, &stem, result, cfg.svg)?;
        }
        Ok(())
    }
}

/// `schemes = NGQG-A, OCNGQG-A@1.13, DG` — optional `@k_pi` suffix.
fn parse_scheme_list(doc: &ConfigDoc, cfg: &ScenarioConfig) -> Result<Vec<SchemeRun>, CliError> {
    let Some(text) = doc.string("sweep", "schemes") else {
        return Ok(vec![cfg.scheme]);
    };
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        let (name, k) = match item.split_once('@') {
            Some((name, kk)) => {
                let k: f64 = kk.trim().parse().map_err(|_| {
                    doc.err(format!("schemes entry '{item}': bad k value '{kk}'"))
                })?;
                (name.trim(), Some(k * PI))
            }
            None => (item, None),
        };
        let scheme = Scheme::parse(name)
            .ok_or_else(|| doc.err(format!("schemes entry '{item}': unknown scheme")))?;
        out.push(SchemeRun {
            scheme,
            k,
            loops: 2,
        });
    }
    Ok(out)
}

fn cp_map_command(cfg: &ScenarioConfig, doc: &ConfigDoc) -> Result<(), CliError> {
    let Some((spec, dec, _)) = &cfg.two_qubit else {
        return Err(doc.err("cp-map needs gate = CP and model = two-transmon".into()));
    };
    let GateChoice::ControlledPhase(cp) = cfg.gate else {
        unreachable!()
    };
    let delta_range = (
        doc.number_or("sweep", "delta_omega_min_hz", 2.0 * PI * 544e6)?,
        doc.number_or("sweep", "delta_omega_max_hz", 2.0 * PI * 644e6)?,
    );
    let beta_range = (
        doc.number_or("sweep", "beta_min", 1.3)?,
        doc.number_or("sweep", "beta_max", 2.3)?,
    );
    let points = (
        doc.usize_or("sweep", "points_delta", 11)?,
        doc.usize_or("sweep", "points_beta", 11)?,
    );
    let result = cp_parameter_map(delta_range, beta_range, points, spec, dec, &cp, cfg.step)?;
    write_sweep_outputs(&cfg.out_dir, "cp_map", &result, cfg.svg)
}

fn dynamics_command(cfg: &ScenarioConfig, doc: &ConfigDoc) -> Result<(), CliError> {
    let Some((spec, dec, _)) = &cfg.two_qubit else {
        return Err(doc.err("dynamics needs gate = CP and model = two-transmon".into()));
    };
    let GateChoice::ControlledPhase(cp) = cfg.gate else {
        unreachable!()
    };
    let samples = doc.usize_or("sweep", "samples", 400)?;
    let trace = dynamics_trace(spec, dec, &cp, samples, cfg.step)?;
    let csv_path = cfg.out_dir.join("dynamics.csv");
    let mut text = String::from("time_s,observable_name,value\n");
    for series in &trace.series {
        let name = format!("fidelity_{}", series.label.replace('-', "_"));
        for (t, v) in &series.points {
            text.push_str(&format!("{t:.9e},{name},{v:.9e}\n"));
        }
    }
    std::fs::write(&csv_path, text)?;
    let summary = serde_json::json!({
        "final_full": trace.final_full,
        "final_no_decoherence": trace.final_no_decoherence,
        "final_effective": trace.final_effective,
        "hot_infidelity": trace.hot_infidelity,
        "decoherence_infidelity": trace.decoherence_infidelity,
    });
    write_json(&cfg.out_dir.join("dynamics_summary.json"), &summary)?;
    println!(
        "dynamics: F = {:.4}, infidelity split {:.4}% oscillating + {:.4}% decoherence -> {}",
        trace.final_full,
        100.0 * trace.hot_infidelity,
        100.0 * trace.decoherence_infidelity,
        csv_path.display()
    );
    Ok(())
}

fn export_command(cfg: &ScenarioConfig) -> Result<(), CliError> {
    let seq: PulseSequence = match (&cfg.gate, &cfg.single_qubit, &cfg.two_qubit) {
        (GateChoice::Single(gate), Some(scen), _) => cfg.scheme.build(gate, scen.envelope)?,
        (GateChoice::ControlledPhase(cp), _, Some((spec, _, _))) => cp_sequence(cp, spec)?,
        _ => unreachable!(),
    };
    let path = cfg.out_dir.join("sequence.json");
    std::fs::write(&path, serde_json::to_string_pretty(&seq)? + "\n")?;
    println!(
        "export: {} segments, {:.3} ns -> {}",
        seq.segments.len(),
        seq.total_duration() * 1e9,
        path.display()
    );
    Ok(())
}

/// Entry point used by the binary: parse, dispatch, write outputs.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let doc = match &cli.config {
        Some(path) => ConfigDoc::parse(path)?,
        None => ConfigDoc::parse_str("", "<defaults>")?,
    };
    let cfg = ScenarioConfig::from_doc(&doc, cli)?;
    std::fs::create_dir_all(&cfg.out_dir)?;

    let body = || -> Result<(), CliError> {
        match cli.command {
            Command::Fidelity => {
                let report = fidelity_command(&cfg)?;
                write_json(&cfg.out_dir.join("fidelity.json"), &report)?;
                println!("{}", serde_json::to_string_pretty(&report)?);
                Ok(())
            }
            Command::SweepK => sweep_k_command(&cfg, &doc),
            Command::Robustness => robustness_command(&cfg, &doc),
            Command::CpMap => cp_map_command(&cfg, &doc),
            Command::Dynamics => dynamics_command(&cfg, &doc),
            Command::Export => export_command(&cfg),
        }
    };
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(body),
        None => body(),
    };
    result?;
    let skip: &[&str] = match cli.command {
        Command::Fidelity | Command::Export => &["sweep"],
        _ => &[],
    };
    doc.check_unused(skip)?;
    Ok(())
}
