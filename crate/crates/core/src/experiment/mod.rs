//! End-to-end scenarios: forward solve, measurement, reconstruction, metrics and plots.

mod config;
pub mod plots;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

pub use config::{
    builtin, builtin_value, builtin_with_overrides, merge, MaterialRow, ProfileSelector, ScenarioConfig, ScenarioKind,
    BUILTIN_NAMES, SCHEMA_VERSION,
};

use crate::analytic::{upsilon_scan, UpsilonTable};
use crate::error::{Result, SuperlensError};
use crate::forward::io::write_trace_csv;
use crate::forward::{solve_total_field, trace_on_gamma_b, Profile, SolveReport};
use crate::measurement::{apply_noise, sample_trace, MeasurementSet};
use crate::reconstruction::{profile_error, reconstruct_profile, ProfileErrorMetrics, ReconstructedProfile};
use crate::spectral::{periodic_grid, SceneParameters, C64};
use plots::{line_chart, Series, PALETTE};

#[derive(Debug, Clone)]
pub struct CellResult {
    pub cutoff: usize,
    pub reconstruction: ReconstructedProfile,
    pub metrics: ProfileErrorMetrics,
    /// The same cutoff applied to the noiseless samples.
    pub noiseless_metrics: ProfileErrorMetrics,
}

#[derive(Debug, Clone)]
pub struct RowData {
    pub trace_x: Vec<f64>,
    pub trace: Vec<C64>,
    pub report: SolveReport,
    pub clean: MeasurementSet,
    pub noisy: MeasurementSet,
    pub cells: Vec<CellResult>,
}

#[derive(Debug, Clone)]
pub struct RowResult {
    pub row: MaterialRow,
    pub scene: SceneParameters,
    /// Error message when the row failed; earlier rows and cells are kept.
    pub outcome: std::result::Result<RowData, String>,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub profile: Profile,
    pub rows: Vec<RowResult>,
    pub upsilon: Option<UpsilonTable>,
}

impl ScenarioResult {
    pub fn failures(&self) -> Vec<(String, String)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().err().map(|e| (r.row.label.clone(), e.clone())))
            .collect()
    }
}

fn run_row(config: &ScenarioConfig, profile: &Profile, row: &MaterialRow) -> Result<RowData> {
    let scene = config.scene(row);
    let field = solve_total_field(profile, &scene, &config.grid, &config.solver_options())?;
    let trace = trace_on_gamma_b(&field);
    let clean = sample_trace(&trace, &scene, config.measurements)?;
    let noisy = apply_noise(&clean, config.noise, config.seed)?;
    let mut cells = Vec::with_capacity(row.cutoffs.len());
    for &n in &row.cutoffs {
        let reconstruction = reconstruct_profile(&noisy, &scene, n)?;
        let metrics = profile_error(&reconstruction, profile, config.plot_points);
        let noiseless = reconstruct_profile(&clean, &scene, n)?;
        let noiseless_metrics = profile_error(&noiseless, profile, config.plot_points);
        cells.push(CellResult {
            cutoff: n,
            reconstruction,
            metrics,
            noiseless_metrics,
        });
    }
    Ok(RowData {
        trace_x: field.x(),
        trace,
        report: field.report,
        clean,
        noisy,
        cells,
    })
}

/// Runs every row of the scenario without touching the file system.
///
/// Rows are solved in a pool of `threads` workers (all cores when `None`).
pub fn compute_scenario(config: &ScenarioConfig, threads: Option<usize>) -> Result<ScenarioResult> {
    config.validate()?;
    let profile = config.profile()?;
    if config.kind == ScenarioKind::Upsilon {
        let sets: Vec<SceneParameters> = config.rows.iter().map(|r| config.scene(r)).collect();
        let mut table = upsilon_scan(config.n_max, &sets)?;
        table.labels = config.rows.iter().map(|r| r.label.clone()).collect();
        return Ok(ScenarioResult {
            config: config.clone(),
            profile,
            rows: Vec::new(),
            upsilon: Some(table),
        });
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| SuperlensError::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        config
            .rows
            .par_iter()
            .map(|row| {
                let outcome = run_row(config, &profile, row).map_err(|e| {
                    log::error!("row {}: {e}", row.label);
                    e.to_string()
                });
                RowResult {
                    row: row.clone(),
                    scene: config.scene(row),
                    outcome,
                }
            })
            .collect()
    });
    Ok(ScenarioResult {
        config: config.clone(),
        profile,
        rows,
        upsilon: None,
    })
}

/// Computes the scenario and writes all artifacts under `out`; the manifest is written last.
pub fn run_scenario(config: &ScenarioConfig, out: &Path, threads: Option<usize>) -> Result<ScenarioResult> {
    let result = compute_scenario(config, threads)?;
    write_results(&result, out)?;
    Ok(result)
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.+".contains(c) { c } else { '_' })
        .collect()
}

fn cell_dir(out: &Path, row: &MaterialRow, cutoff: usize) -> PathBuf {
    out.join(slug(&row.label)).join(format!("N{cutoff}"))
}

fn rel(out: &Path, p: &Path) -> String {
    p.strip_prefix(out).unwrap_or(p).to_string_lossy().replace('\\', "/")
}

#[derive(Serialize)]
struct ModeSummary {
    n: i64,
    re: f64,
    im: f64,
    rel_error: Option<f64>,
}

fn metrics_json(m: &ProfileErrorMetrics) -> serde_json::Value {
    let modes: Vec<ModeSummary> = m
        .modes
        .iter()
        .filter(|e| e.n >= 0)
        .map(|e| ModeSummary {
            n: e.n,
            re: e.recovered.re,
            im: e.recovered.im,
            rel_error: e.rel_error,
        })
        .collect();
    json!({
        "rel_l2": m.rel_l2,
        "rel_linf": m.rel_linf,
        "band_rel_l2": m.band_rel_l2,
        "band_rel_linf": m.band_rel_linf,
        "max_imaginary": m.max_imaginary,
        "modes": modes,
    })
}

/// Writes CSVs, plots, `metrics.json` and finally `manifest.json`.
pub fn write_results(result: &ScenarioResult, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let cfg = &result.config;
    let mut rows_json = Vec::new();
    for r in &result.rows {
        let dir = out.join(slug(&r.row.label));
        fs::create_dir_all(&dir)?;
        match &r.outcome {
            Err(msg) => {
                let p = dir.join("FAILED");
                fs::write(&p, format!("{msg}\n"))?;
                files.push(p);
                rows_json.push(json!({"label": r.row.label, "eps": r.row.eps, "mu": r.row.mu, "error": msg}));
            }
            Ok(d) => {
                let header = vec![
                    ("scene", serde_json::to_string(&r.scene)?),
                    ("profile", serde_json::to_string(&result.profile)?),
                    ("grid", serde_json::to_string(&cfg.grid)?),
                ];
                let p = dir.join("trace.csv");
                write_trace_csv(fs::File::create(&p)?, &d.trace_x, &d.trace, &header)?;
                files.push(p);
                let p = dir.join("measurements_clean.csv");
                d.clean.write_csv(fs::File::create(&p)?)?;
                files.push(p);
                let p = dir.join("measurements.csv");
                d.noisy.write_csv(fs::File::create(&p)?)?;
                files.push(p);
                let mut cells = Vec::new();
                for c in &d.cells {
                    let cd = cell_dir(out, &r.row, c.cutoff);
                    fs::create_dir_all(&cd)?;
                    let p = cd.join("modes.csv");
                    c.reconstruction.write_mode_table(fs::File::create(&p)?)?;
                    files.push(p);
                    cells.push(json!({
                        "cutoff": c.cutoff,
                        "skipped": c.reconstruction.skipped,
                        "noisy": metrics_json(&c.metrics),
                        "noiseless": metrics_json(&c.noiseless_metrics),
                    }));
                }
                rows_json.push(json!({
                    "label": r.row.label,
                    "eps": r.row.eps,
                    "mu": r.row.mu,
                    "solve": d.report,
                    "cells": cells,
                }));
            }
        }
    }
    if let Some(t) = &result.upsilon {
        let p = out.join("upsilon.csv");
        t.write_csv(fs::File::create(&p)?)?;
        files.push(p);
    }
    files.extend(emit_plots(result, out)?);
    if !result.rows.is_empty() || result.upsilon.is_some() {
        let p = out.join("metrics.json");
        let metrics = json!({
            "scenario": cfg.name,
            "schema_version": cfg.schema_version,
            "delta": cfg.delta,
            "noise": cfg.noise,
            "seed": cfg.seed,
            "rows": rows_json,
            "upsilon_skipped": result.upsilon.as_ref().map(|t| t.skipped.clone()),
        });
        fs::write(&p, serde_json::to_string_pretty(&metrics)? + "\n")?;
        files.push(p);
    }
    files.sort();
    files.dedup();
    let manifest = json!({
        "scenario": cfg.name,
        "schema_version": cfg.schema_version,
        "generator": format!("superlens {}", env!("CARGO_PKG_VERSION")),
        "config": cfg,
        "files": files.iter().map(|p| rel(out, p)).collect::<Vec<_>>(),
        "failures": result.failures().iter().map(|(l, e)| json!({"row": l, "error": e})).collect::<Vec<_>>(),
    });
    let p = out.join("manifest.json");
    fs::write(&p, serde_json::to_string_pretty(&manifest)? + "\n")?;
    files.push(p);
    Ok(files)
}

/// One overlay SVG (truth solid, reconstruction dashed) plus its backing CSV per cell,
/// and a log-scale chart for an upsilon scan.
pub fn emit_plots(result: &ScenarioResult, out: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let cfg = &result.config;
    for r in &result.rows {
        let Ok(d) = &r.outcome else { continue };
        for c in &d.cells {
            let cd = cell_dir(out, &r.row, c.cutoff);
            fs::create_dir_all(&cd)?;
            let p = cd.join("reconstruction.csv");
            c.reconstruction
                .write_profile_csv(fs::File::create(&p)?, Some(&result.profile), cfg.plot_points)?;
            files.push(p);
            let x = periodic_grid(cfg.plot_points, cfg.period);
            let truth: Vec<f64> = x.iter().map(|&x| result.profile.delta * result.profile.g(x)).collect();
            let rec: Vec<f64> = c.reconstruction.evaluate(&x).iter().map(|v| v.re).collect();
            let svg = line_chart(
                &format!("{} / {}, N = {}", cfg.name, r.row.label, c.cutoff),
                "x",
                "f(x)",
                &[
                    Series { label: "true".into(), x: &x, y: &truth, color: PALETTE[0], dashed: false },
                    Series { label: "reconstructed".into(), x: &x, y: &rec, color: PALETTE[1], dashed: true },
                ],
                false,
            );
            let p = cd.join("profile.svg");
            fs::write(&p, svg)?;
            files.push(p);
        }
    }
    if let Some(t) = &result.upsilon {
        let n: Vec<f64> = (0..=t.n_max).map(|n| n as f64).collect();
        let ys: Vec<Vec<f64>> = t
            .moduli
            .iter()
            .map(|col| col.iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            .collect();
        let series: Vec<Series<'_>> = ys
            .iter()
            .enumerate()
            .map(|(i, y)| Series {
                label: t.labels[i].clone(),
                x: &n,
                y,
                color: PALETTE[i % PALETTE.len()],
                dashed: false,
            })
            .collect();
        let p = out.join("upsilon.svg");
        fs::create_dir_all(out)?;
        fs::write(&p, line_chart("|Upsilon_n|", "n", "|Upsilon_n|", &series, true))?;
        files.push(p);
    }
    Ok(files)
}
