//! `run` and `verify` drivers behind the `dihedral-rb` binary.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dihedral::GroupElement;
use crate::error::{Error, Result};
use crate::estimation::{assemble_interleaved, fit_dataset, FitOptions, FitReport};
use crate::liouville::{avg_fidelity, is_cptp};
use crate::noise::GateTag;
use crate::protocol::{decay_dataset, splitmix64, ExperimentPlan, Mode};

pub use config::{parse_config, ConfigFile};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DIHEDRAL_RB_OUT_DIR";

#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub lengths: Option<Vec<usize>>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    /// Mean average fidelity of the per-gate error channels over `D_j`.
    pub mean_gate_fidelity: f64,
    /// Average fidelity of the error following the interleaved gate.
    pub target_error_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    pub j: u32,
    pub lengths: Vec<usize>,
    pub sequences_per_length: usize,
    pub shots: u64,
    pub seed: u64,
    pub model: ModelSummary,
    /// Standard run over `D_j` accompanying an interleaved run.
    pub reference: Option<FitReport>,
    pub fit: FitReport,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub data_paths: Vec<PathBuf>,
    pub report_path: PathBuf,
    pub report: RunReport,
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

fn resolve_output(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn reference_path(data_path: &Path) -> PathBuf {
    let stem = data_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into());
    let name = match data_path.extension() {
        Some(ext) => format!("{stem}.reference.{}", ext.to_string_lossy()),
        None => format!("{stem}.reference"),
    };
    data_path.with_file_name(name)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

fn element_tag(mode: Mode, g: GroupElement) -> GateTag {
    match mode {
        Mode::Standard => GateTag::Element(g),
        Mode::Interleaved => GateTag::Native(g),
    }
}

/// Per-gate error fidelities of the plan's noise model.
pub fn model_summary(plan: &ExperimentPlan) -> Result<ModelSummary> {
    let mut total = 0.0;
    for g in GroupElement::elements(plan.order) {
        let noisy = plan.noise.resolve(element_tag(plan.mode, g))?;
        total += avg_fidelity(&(noisy * g.inverse().to_superop()));
    }
    let target_error_fidelity = match (plan.mode, &plan.noise.generator_noise) {
        (Mode::Interleaved, Some(n)) => Some(avg_fidelity(&n.to_superop()?)),
        (Mode::Interleaved, None) => Some(1.0),
        _ => None,
    };
    Ok(ModelSummary {
        mean_gate_fidelity: total / (2 * plan.order) as f64,
        target_error_fidelity,
    })
}

/// Simulates, writes decay data, fits and writes the report.
///
/// Data files are written before fitting, so they exist even when the fit
/// fails.
pub fn run(config_path: &Path, overrides: &RunOverrides) -> Result<RunOutcome> {
    let mut cfg = load_config(config_path)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(lengths) = &overrides.lengths {
        cfg.lengths = lengths.clone();
    }
    let plan = cfg.to_plan()?;
    let out_dir = overrides.out_dir.as_deref();
    let data_path = resolve_output(&cfg.output.data_path, out_dir);
    let report_path = resolve_output(&cfg.output.report_path, out_dir);
    let options = FitOptions {
        bootstrap_resamples: cfg.fit.bootstrap_resamples,
        seed: splitmix64(plan.seed ^ 0x424f_4f54),
    };
    let model = model_summary(&plan)?;

    let dataset = decay_dataset(&plan)?;
    write_file(&data_path, dataset.to_csv_string()?.as_bytes())?;
    let mut data_paths = vec![data_path.clone()];

    let (reference, fit) = match plan.mode {
        Mode::Standard => (None, fit_dataset(&dataset, &options)?),
        Mode::Interleaved => {
            let ref_plan = plan.reference_plan();
            let ref_data = decay_dataset(&ref_plan)?;
            let ref_path = reference_path(&data_path);
            write_file(&ref_path, ref_data.to_csv_string()?.as_bytes())?;
            data_paths.push(ref_path);
            let ref_fit = fit_dataset(&ref_data, &options)?;
            let inter_fit = fit_dataset(&dataset, &options)?;
            let combined = assemble_interleaved(&ref_fit, &inter_fit)?;
            (Some(ref_fit), combined)
        }
    };
    let report = RunReport {
        mode: plan.mode,
        j: plan.order,
        lengths: plan.lengths.clone(),
        sequences_per_length: plan.sequences_per_length,
        shots: plan.shots,
        seed: plan.seed,
        model,
        reference,
        fit,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Data(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    write_file(&report_path, text.as_bytes())?;
    Ok(RunOutcome {
        data_paths,
        report_path,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub plan: ExperimentPlan,
    pub gates_checked: usize,
}

/// Schema, CPTP and group-membership checks; no simulation.
pub fn verify(config_path: &Path) -> Result<VerifySummary> {
    let cfg = load_config(config_path)?;
    let plan = cfg.to_plan()?;
    let mut gates_checked = 0;
    for g in GroupElement::elements(plan.order) {
        let mut tags = vec![element_tag(plan.mode, g)];
        if plan.mode == Mode::Interleaved {
            tags.push(GateTag::Interleaved(g));
        }
        for tag in tags {
            let noisy = plan.noise.resolve(tag)?;
            let ideal_inverse = match tag {
                GateTag::Element(g) | GateTag::Native(g) => g.inverse().to_superop(),
                GateTag::Interleaved(g) => {
                    let step = GroupElement::generator(2 * plan.order).multiply(&g.embed(2))?;
                    step.inverse().to_superop()
                }
            };
            if !is_cptp(&(noisy * ideal_inverse)) {
                return Err(Error::unphysical(format!(
                    "error channel of {tag:?} is not CPTP"
                )));
            }
            gates_checked += 1;
        }
    }
    for s in plan.settings() {
        crate::protocol::target_element(plan.order, s)?;
    }
    Ok(VerifySummary {
        plan,
        gates_checked,
    })
}
