//! Teleportation experiment driver and its report files.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{LoadedConfig, Postselect};
use crate::error::{Error, Result};
use crate::noise::{draw_rng, monte_carlo_teleport, McEstimate, PolicyEstimate, TeleportEstimate};
use crate::state::DensityRecord;
use crate::teleport::TeleportProgram;
use crate::tomography::{expectations_from_state, fidelity, reconstruct, BlochVector, CLASSICAL_BOUND};

pub const FIDELITY_CSV: &str = "fidelity.csv";
pub const DENSITY_JSON: &str = "density.json";
pub const SUMMARY_JSON: &str = "summary.json";

/// Estimates for every configured input, in config order.
#[derive(Clone, Debug)]
pub struct TeleportRun {
    pub config_sha256: String,
    pub draws: usize,
    pub seed: u64,
    pub postselect: Postselect,
    pub dephasing_policy: String,
    pub c_d: f64,
    pub estimates: Vec<TeleportEstimate>,
}

pub fn run_experiment(loaded: &LoadedConfig) -> Result<TeleportRun> {
    let cfg = &loaded.config;
    let params = cfg.noise_params()?;
    let program = TeleportProgram::compile()?;
    let mut estimates = Vec::new();
    for input in cfg.input_states()? {
        let est = monte_carlo_teleport(&input, &program, &params, cfg.draws, cfg.seed).map_err(|e| match e {
            Error::EmptyRetained => Error::Config(format!(
                "input {input}: syndrome postselection retained nothing in any of {} draws",
                cfg.draws
            )),
            e => e,
        })?;
        estimates.push(est);
    }
    Ok(TeleportRun {
        config_sha256: loaded.sha256.clone(),
        draws: cfg.draws,
        seed: cfg.seed,
        postselect: cfg.postselect,
        dephasing_policy: serde_json::to_value(cfg.dephasing_policy)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
        c_d: cfg.c_d,
        estimates,
    })
}

/// Mean of the per-input means, with the standard errors combined in quadrature.
pub fn average(estimates: &[&McEstimate]) -> (f64, f64) {
    let n = estimates.len() as f64;
    let mean = estimates.iter().map(|e| e.mean).sum::<f64>() / n;
    let se = estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / n;
    (mean, se)
}

impl TeleportRun {
    pub fn average_ns(&self) -> (f64, f64) {
        average(&self.estimates.iter().map(|e| &e.ns.fidelity).collect::<Vec<_>>())
    }

    pub fn average_es(&self) -> (f64, f64) {
        average(&self.estimates.iter().map(|e| &e.es.fidelity).collect::<Vec<_>>())
    }

    pub fn fidelity_csv(&self) -> String {
        let (ns, es) = (self.postselect.ns(), self.postselect.es());
        let mut header = vec!["input"];
        if ns {
            header.extend(["f_ns", "f_ns_stderr"]);
        }
        if es {
            header.extend(["f_es", "f_es_stderr"]);
        }
        header.extend(["draws", "seed"]);
        let mut out = header.join(",") + "\n";
        let mut row = |label: &str, n: (f64, f64), e: (f64, f64)| {
            let mut cells = vec![label.to_string()];
            if ns {
                cells.extend([format!("{:.6}", n.0), format!("{:.6}", n.1)]);
            }
            if es {
                cells.extend([format!("{:.6}", e.0), format!("{:.6}", e.1)]);
            }
            cells.extend([self.draws.to_string(), self.seed.to_string()]);
            out.push_str(&cells.join(","));
            out.push('\n');
        };
        for est in &self.estimates {
            let f = |p: &PolicyEstimate| (p.fidelity.mean, p.fidelity.stderr);
            row(&est.input.label(), f(&est.ns), f(&est.es));
        }
        row("AVG", self.average_ns(), self.average_es());
        out
    }

    pub fn density_json(&self) -> Result<String> {
        let mut records = Vec::new();
        for est in &self.estimates {
            let mut rec = DensityEntry {
                input: est.input.label(),
                ns: None,
                es: None,
            };
            if self.postselect.ns() {
                rec.ns = Some(tomography_of(&est.ns, est)?);
            }
            if self.postselect.es() {
                rec.es = Some(tomography_of(&est.es, est)?);
            }
            records.push(rec);
        }
        let doc = DensityDoc {
            config_sha256: &self.config_sha256,
            seed: self.seed,
            draws: self.draws,
            states: records,
        };
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn summary_json(&self) -> Result<String> {
        let per_input = self
            .estimates
            .iter()
            .map(|e| InputSummary {
                input: e.input.label(),
                f_ns: e.ns.fidelity.mean,
                f_ns_stderr: e.ns.fidelity.stderr,
                f_es: e.es.fidelity.mean,
                f_es_stderr: e.es.fidelity.stderr,
                empty_es_draws: e.es.empty_draws,
            })
            .collect();
        let (ns, ns_se) = self.average_ns();
        let (es, es_se) = self.average_es();
        let doc = Summary {
            config_sha256: &self.config_sha256,
            seed: self.seed,
            draws: self.draws,
            dephasing_policy: &self.dephasing_policy,
            c_d: self.c_d,
            postselect: self.postselect,
            inputs: per_input,
            average: Average {
                f_ns: ns,
                f_ns_stderr: ns_se,
                f_es: es,
                f_es_stderr: es_se,
            },
            classical_bound: CLASSICAL_BOUND,
            ns_exceeds_classical_bound: ns > CLASSICAL_BOUND,
            es_exceeds_classical_bound: es > CLASSICAL_BOUND,
            es_exceeds_ns: es > ns,
        };
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    /// Writes the three report files into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let files = [
            (FIDELITY_CSV, self.fidelity_csv()),
            (DENSITY_JSON, self.density_json()?),
            (SUMMARY_JSON, self.summary_json()?),
        ];
        let mut out = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            out.push(path);
        }
        Ok(out)
    }
}

fn tomography_of(p: &PolicyEstimate, est: &TeleportEstimate) -> Result<StateTomography> {
    let bloch = expectations_from_state(&p.mean_rho, None, &mut draw_rng(0, 0))?;
    let rho = reconstruct(&bloch)?;
    Ok(StateTomography {
        mean_rho: p.mean_rho.to_record(),
        bloch,
        reconstructed: rho.to_record(),
        fidelity: fidelity(&rho, &est.input.ket())?,
    })
}

#[derive(Serialize)]
struct StateTomography {
    mean_rho: DensityRecord,
    bloch: BlochVector,
    reconstructed: DensityRecord,
    fidelity: f64,
}

#[derive(Serialize)]
struct DensityEntry {
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ns: Option<StateTomography>,
    #[serde(skip_serializing_if = "Option::is_none")]
    es: Option<StateTomography>,
}

#[derive(Serialize)]
struct DensityDoc<'a> {
    config_sha256: &'a str,
    seed: u64,
    draws: usize,
    states: Vec<DensityEntry>,
}

#[derive(Serialize)]
struct InputSummary {
    input: String,
    f_ns: f64,
    f_ns_stderr: f64,
    f_es: f64,
    f_es_stderr: f64,
    empty_es_draws: usize,
}

#[derive(Serialize)]
struct Average {
    f_ns: f64,
    f_ns_stderr: f64,
    f_es: f64,
    f_es_stderr: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    config_sha256: &'a str,
    seed: u64,
    draws: usize,
    dephasing_policy: &'a str,
    c_d: f64,
    postselect: Postselect,
    inputs: Vec<InputSummary>,
    average: Average,
    classical_bound: f64,
    ns_exceeds_classical_bound: bool,
    es_exceeds_classical_bound: bool,
    es_exceeds_ns: bool,
}
