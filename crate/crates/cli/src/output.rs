//! CSV rendering, run manifests and all-or-nothing writing of outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Mode, Overrides, ParamEntry};
use crate::error::{CliError, Result};
use crate::presets::figure_panels;
use crate::runner::{compute, ClosedOutcome, OpenOutcome, Outcome};

/// A file to be written, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: String,
    pub contents: String,
}

/// 17 significant digits, so values round-trip exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn curve_stem(outcome: &ClosedOutcome, index: usize) -> String {
    match (outcome.curve_param, outcome.curves[index].curve_value) {
        (Some(p), Some(v)) => format!("curve{index}_{p}_{v}"),
        _ => format!("curve{index}"),
    }
}

pub fn closed_artifacts(outcome: &ClosedOutcome, prefix: &str) -> Vec<Artifact> {
    let mut files = Vec::new();
    let mut transitions = String::from("curve,before,after,delta_xi\n");
    for (i, curve) in outcome.curves.iter().enumerate() {
        let stem = curve_stem(outcome, i);
        let r = &curve.result;
        let mut csv = String::from("param,value,xi_max,t_star\n");
        for ((v, xi), t) in r.param_values.iter().zip(&r.xi_max).zip(&r.t_star) {
            let _ = writeln!(csv, "{},{},{},{}", r.param_name, num(*v), num(*xi), num(*t));
        }
        files.push(Artifact {
            path: format!("{prefix}{stem}.csv"),
            contents: csv,
        });
        for tr in &curve.transitions {
            let _ = writeln!(transitions, "{stem},{},{},{}", num(tr.before), num(tr.after), num(tr.delta_xi));
        }
    }
    files.push(Artifact {
        path: format!("{prefix}transitions.csv"),
        contents: transitions,
    });
    files
}

pub fn open_artifacts(outcome: &OpenOutcome, prefix: &str) -> Vec<Artifact> {
    let mut files = Vec::new();
    let mut peaks = String::from("N,xi_peak,t_peak\n");
    for ((n, traj), (xi, t)) in outcome.sizes.iter().zip(&outcome.trajectories).zip(&outcome.peaks) {
        let mut csv = String::from("t,xi,trace_err,min_eig\n");
        for i in 0..traj.len() {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                num(traj.times[i]),
                num(traj.xi[i]),
                num(traj.trace_err[i]),
                num(traj.min_eig[i])
            );
        }
        files.push(Artifact {
            path: format!("{prefix}trajectory_N{n}.csv"),
            contents: csv,
        });
        let _ = writeln!(peaks, "{n},{},{}", num(*xi), num(*t));
    }
    files.push(Artifact {
        path: format!("{prefix}peaks.csv"),
        contents: peaks,
    });
    if let Some((fit, _)) = &outcome.fit {
        files.push(Artifact {
            path: format!("{prefix}fit.csv"),
            contents: format!(
                "A,alpha,sigma_A,sigma_alpha,rss\n{},{},{},{},{}\n",
                num(fit.a),
                num(fit.alpha),
                num(fit.sigma_a),
                num(fit.sigma_alpha),
                num(fit.rss)
            ),
        });
    }
    files
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub a: f64,
    pub alpha: f64,
    pub sigma_a: f64,
    pub sigma_alpha: f64,
    pub rss: f64,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub n: usize,
    pub t_end: f64,
    pub stopped_early: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    /// Output subdirectory, empty for single runs.
    pub name: String,
    pub mode: String,
    pub parameters: BTreeMap<String, ParamEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trajectories: Vec<TrajectoryRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitions: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Software {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub software: Software,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<u32>,
    pub workers: usize,
    pub wall_clock_seconds: f64,
    pub runs: Vec<RunRecord>,
    pub outputs: Vec<OutputRecord>,
}

fn run_record(name: &str, cfg: &ExperimentConfig, outcome: &Outcome) -> RunRecord {
    let mut record = RunRecord {
        name: name.to_string(),
        mode: cfg.mode.name().to_string(),
        parameters: cfg.params.clone(),
        fit: None,
        trajectories: Vec::new(),
        transitions: None,
    };
    match outcome {
        Outcome::Closed(c) => {
            record.transitions = Some(c.curves.iter().map(|c| c.transitions.len()).sum());
        }
        Outcome::Open(o) => {
            record.fit = o.fit.map(|(f, class)| FitRecord {
                a: f.a,
                alpha: f.alpha,
                sigma_a: f.sigma_a,
                sigma_alpha: f.sigma_alpha,
                rss: f.rss,
                class: class.to_string(),
            });
            record.trajectories = o
                .sizes
                .iter()
                .zip(&o.trajectories)
                .map(|(&n, t)| TrajectoryRecord {
                    n,
                    t_end: t.times.last().copied().unwrap_or(0.0),
                    stopped_early: t.stopped_early,
                })
                .collect();
        }
    }
    record
}

fn artifacts_for(outcome: &Outcome, prefix: &str) -> Vec<Artifact> {
    match outcome {
        Outcome::Closed(c) => closed_artifacts(c, prefix),
        Outcome::Open(o) => open_artifacts(o, prefix),
    }
}

/// Writes every artifact or none of them.
pub fn write_all(out_dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for a in artifacts {
        let path = out_dir.join(&a.path);
        let result = path
            .parent()
            .map_or(Ok(()), fs::create_dir_all)
            .and_then(|_| fs::write(&path, &a.contents));
        if let Err(source) = result {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(CliError::Io { path, source });
        }
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub manifest: Manifest,
    pub written: Vec<PathBuf>,
}

/// Computes everything `cfg` asks for on the current rayon pool, then writes
/// CSVs and `manifest.json` under the output directory. Nothing is written
/// when a computation fails.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let out_dir = cfg.out_dir.clone().ok_or_else(|| {
        CliError::validation("output.dir", "no output directory; pass --out or set output.dir")
    })?;

    let jobs: Vec<(String, ExperimentConfig)> = match cfg.mode {
        Mode::Figure => {
            let id = cfg.figure.ok_or_else(|| CliError::validation("figure", "required in mode figure"))?;
            figure_panels(id, &cfg.passthrough, &Overrides::default())?
                .into_iter()
                .map(|p| (p.name, p.config))
                .collect()
        }
        _ => vec![(String::new(), cfg.clone())],
    };

    use rayon::prelude::*;
    let outcomes = jobs
        .par_iter()
        .map(|(_, job)| compute(job))
        .collect::<Result<Vec<_>>>()?;

    let mut artifacts = Vec::new();
    let mut runs = Vec::new();
    for ((name, job), outcome) in jobs.iter().zip(&outcomes) {
        let prefix = if name.is_empty() { String::new() } else { format!("{name}/") };
        artifacts.extend(artifacts_for(outcome, &prefix));
        runs.push(run_record(name, job, outcome));
    }

    let outputs = artifacts
        .iter()
        .map(|a| OutputRecord {
            path: a.path.clone(),
            sha256: hex::encode(Sha256::digest(a.contents.as_bytes())),
            bytes: a.contents.len(),
        })
        .collect();
    let mut manifest = Manifest {
        software: Software {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        mode: cfg.mode.name().to_string(),
        figure: cfg.figure,
        workers: rayon::current_num_threads(),
        wall_clock_seconds: 0.0,
        runs,
        outputs,
    };
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    artifacts.push(Artifact {
        path: "manifest.json".to_string(),
        contents: json,
    });
    let written = write_all(&out_dir, &artifacts)?;
    Ok(RunReport { manifest, written })
}
