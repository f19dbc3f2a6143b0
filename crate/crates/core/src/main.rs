use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use superlens::analytic::{experiment_parameter_sets, upsilon_scan};
use superlens::experiment::{builtin_value, plots, run_scenario, ScenarioConfig, BUILTIN_NAMES};
use superlens::forward::io::{read_trace_csv, write_field_binary, write_trace_csv};
use superlens::forward::{solve_total_field, trace_on_gamma_b, Grid, SolverOptions, XDerivative};
use superlens::measurement::{apply_noise, sample_trace, MeasurementSet, DEFAULT_NOISE, DEFAULT_SAMPLES};
use superlens::reconstruction::{profile_error, reconstruct_profile};
use superlens::validation::run_validation;
use superlens::{Result, SceneParameters, SuperlensError, C64};

#[derive(Parser)]
#[command(name = "superlens", version, about = "Forward solver and first-order profile reconstruction through a slab lens")]
struct Cli {
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the scattering problem and write the trace on the measurement line.
    Forward(ForwardArgs),
    /// Sample a trace at M points and add seeded noise.
    Measure(MeasureArgs),
    /// Recover the profile from a measurement file.
    Reconstruct(ReconstructArgs),
    /// Tabulate |Upsilon_n| for the standard parameter sets.
    Upsilon(UpsilonArgs),
    /// Run a whole scenario from a builtin or a JSON config.
    Experiment(ExperimentArgs),
    /// Run the quick oracle checks.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct MaterialArgs {
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    eps_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    eps_im: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    mu_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu_im: f64,
}

impl MaterialArgs {
    fn scene(&self) -> Result<SceneParameters> {
        let p = SceneParameters::experiment(C64::new(self.eps_re, self.eps_im), C64::new(self.mu_re, self.mu_im));
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum XDer {
    Spectral,
    Centered,
}

impl From<XDer> for XDerivative {
    fn from(x: XDer) -> Self {
        match x {
            XDer::Spectral => XDerivative::Spectral,
            XDer::Centered => XDerivative::Centered,
        }
    }
}

#[derive(Args)]
struct ForwardArgs {
    #[command(flatten)]
    material: MaterialArgs,
    /// smooth, tent (nonsmooth) or boxcar (discontinuous).
    #[arg(long, default_value = "smooth")]
    profile: String,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 256)]
    grid_nx: usize,
    /// Levels per segment (corrugated region and slab), end points included.
    #[arg(long, default_value_t = 128)]
    grid_ny: usize,
    /// Slab levels, if different from --grid-ny.
    #[arg(long)]
    grid_ny_slab: Option<usize>,
    #[arg(long, value_enum, default_value = "spectral")]
    x_derivative: XDer,
    /// Slab loss sigma: the solve uses eps + i sigma.
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
    /// Also dump the full field as field.bin.
    #[arg(long)]
    field: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MeasureArgs {
    /// trace.csv written by `forward` or `experiment`.
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    noise: f64,
    #[arg(long, default_value_t = 20240601)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    cutoff: usize,
    /// Truth profile for error metrics and the overlay plot.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 400)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct UpsilonArgs {
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Builtin scenario name (see --list).
    #[arg(long, conflicts_with = "config")]
    builtin: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the builtin names and exit.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    /// Replace every row's cutoffs.
    #[arg(long, value_delimiter = ',')]
    cutoff: Option<Vec<usize>>,
    #[arg(long)]
    grid_nx: Option<usize>,
    #[arg(long)]
    grid_ny: Option<usize>,
    #[arg(long, value_enum)]
    x_derivative: Option<XDer>,
    #[arg(long)]
    loss: Option<f64>,
    /// Worker threads for the material rows (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 100_000)]
    draws: usize,
}

fn scene_from_header(h: &std::collections::BTreeMap<String, String>, what: &Path) -> Result<SceneParameters> {
    let s = h.get("scene").ok_or_else(|| SuperlensError::Parse {
        context: what.display().to_string(),
        message: "missing `# scene = ...` header".into(),
    })?;
    Ok(serde_json::from_str(s)?)
}

fn forward(a: ForwardArgs) -> Result<()> {
    let scene = a.material.scene()?;
    let grid = Grid::new(a.grid_nx, a.grid_ny, a.grid_ny_slab.unwrap_or(a.grid_ny))?;
    let profile = superlens::experiment::ProfileSelector::parse(&a.profile)?.build(a.delta, scene.period)?;
    let opts = SolverOptions {
        x_derivative: a.x_derivative.into(),
        loss: a.loss,
        ..SolverOptions::default()
    };
    let field = solve_total_field(&profile, &scene, &grid, &opts)?;
    log::info!(
        "solved {} unknowns, backward error {:.2e}, min pivot ratio {:.2e}",
        grid.unknowns(),
        field.report.backward_error,
        field.report.min_pivot_ratio
    );
    fs::create_dir_all(&a.out)?;
    let header = vec![
        ("scene", serde_json::to_string(&scene)?),
        ("profile", serde_json::to_string(&profile)?),
        ("grid", serde_json::to_string(&grid)?),
        ("solve", serde_json::to_string(&field.report)?),
    ];
    write_trace_csv(fs::File::create(a.out.join("trace.csv"))?, &field.x(), &trace_on_gamma_b(&field), &header)?;
    if a.field {
        write_field_binary(std::io::BufWriter::new(fs::File::create(a.out.join("field.bin"))?), &field)?;
    }
    Ok(())
}

fn measure(a: MeasureArgs) -> Result<()> {
    let (h, _, trace) = read_trace_csv(fs::File::open(&a.trace)?)?;
    let scene = scene_from_header(&h, &a.trace)?;
    let clean = sample_trace(&trace, &scene, a.m)?;
    let ms = if a.noise > 0.0 { apply_noise(&clean, a.noise, a.seed)? } else { clean };
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    ms.write_csv(fs::File::create(&a.out)?)
}

fn reconstruct(a: ReconstructArgs) -> Result<()> {
    let ms = MeasurementSet::read_csv(fs::File::open(&a.input)?, None)?;
    let recon = reconstruct_profile(&ms, &ms.scene, a.cutoff)?;
    let truth = match &a.profile {
        Some(name) => Some(superlens::experiment::ProfileSelector::parse(name)?.build(a.delta, ms.scene.period)?),
        None => None,
    };
    fs::create_dir_all(&a.out)?;
    recon.write_mode_table(fs::File::create(a.out.join("modes.csv"))?)?;
    recon.write_profile_csv(fs::File::create(a.out.join("reconstruction.csv"))?, truth.as_ref(), a.points)?;
    let x: Vec<f64> = (0..a.points).map(|i| ms.scene.period * i as f64 / a.points as f64).collect();
    let rec: Vec<f64> = recon.evaluate(&x).iter().map(|v| v.re).collect();
    let mut series = Vec::new();
    let tv: Vec<f64>;
    if let Some(t) = &truth {
        tv = x.iter().map(|&x| t.delta * t.g(x)).collect();
        series.push(plots::Series { label: "truth".into(), x: &x, y: &tv, color: plots::PALETTE[0], dashed: false });
        let m = profile_error(&recon, t, a.points);
        println!("rel_l2 {:.6e} rel_linf {:.6e} band_rel_l2 {:.6e}", m.rel_l2, m.rel_linf, m.band_rel_l2);
        fs::write(a.out.join("metrics.json"), serde_json::to_string_pretty(&m)? + "\n")?;
    }
    series.push(plots::Series {
        label: format!("N = {}", a.cutoff),
        x: &x,
        y: &rec,
        color: plots::PALETTE[1],
        dashed: true,
    });
    let svg = plots::line_chart(&format!("{} N = {}", ms.scene.label(), a.cutoff), "x", "f(x)", &series, false);
    fs::write(a.out.join("profile.svg"), svg)?;
    Ok(())
}

fn upsilon(a: UpsilonArgs) -> Result<()> {
    let table = upsilon_scan(a.n_max, &experiment_parameter_sets())?;
    fs::create_dir_all(&a.out)?;
    table.write_csv(fs::File::create(a.out.join("upsilon.csv"))?)?;
    for s in &table.skipped {
        log::warn!("skipped set {} n = {}: {}", s.set, s.n, s.reason);
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<bool> {
    if a.list {
        for n in BUILTIN_NAMES {
            println!("{n}");
        }
        return Ok(true);
    }
    let mut v: Value = match (&a.builtin, &a.config) {
        (Some(name), None) => builtin_value(name)?,
        (None, Some(path)) => serde_json::to_value(ScenarioConfig::load(path)?)?,
        _ => return Err(SuperlensError::Config("give exactly one of --builtin or --config".into())),
    };
    let mut overlay = serde_json::Map::new();
    if let Some(s) = a.seed {
        overlay.insert("seed".into(), json!(s));
    }
    if let Some(n) = a.noise {
        overlay.insert("noise".into(), json!(n));
    }
    if let Some(d) = a.delta {
        overlay.insert("delta".into(), json!(d));
    }
    if let Some(p) = &a.profile {
        overlay.insert("profile".into(), serde_json::to_value(superlens::experiment::ProfileSelector::parse(p)?)?);
    }
    if let Some(m) = a.m {
        overlay.insert("measurements".into(), json!(m));
    }
    if let Some(l) = a.loss {
        overlay.insert("loss".into(), json!(l));
    }
    if let Some(x) = a.x_derivative {
        overlay.insert("x_derivative".into(), serde_json::to_value(XDerivative::from(x))?);
    }
    if a.grid_nx.is_some() || a.grid_ny.is_some() {
        let mut g = v["grid"].clone();
        if let Some(nx) = a.grid_nx {
            g["nx"] = json!(nx);
        }
        if let Some(ny) = a.grid_ny {
            g["ny_omega"] = json!(ny);
            g["ny_slab"] = json!(ny);
        }
        overlay.insert("grid".into(), g);
    }
    if let Some(c) = &a.cutoff {
        if let Some(rows) = v["rows"].as_array_mut() {
            for r in rows {
                r["cutoffs"] = json!(c);
            }
        }
    }
    superlens::experiment::merge(&mut v, Value::Object(overlay));
    let config = ScenarioConfig::from_value(v)?;
    let out = a.out.unwrap_or_else(|| PathBuf::from("out").join(&config.name));
    let result = run_scenario(&config, &out, a.threads)?;
    let failures = result.failures();
    for (row, e) in &failures {
        eprintln!("row {row} failed: {e}");
    }
    println!("wrote {}", out.join("manifest.json").display());
    Ok(failures.is_empty())
}

fn validate(a: ValidateArgs) -> Result<bool> {
    let mut ok = true;
    for c in run_validation(a.draws) {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    // row-level parallelism comes from rayon; keep the dense kernels sequential
    faer::set_global_parallelism(faer::Par::Seq);
    let r = match cli.command {
        Command::Forward(a) => forward(a).map(|_| true),
        Command::Measure(a) => measure(a).map(|_| true),
        Command::Reconstruct(a) => reconstruct(a).map(|_| true),
        Command::Upsilon(a) => upsilon(a).map(|_| true),
        Command::Experiment(a) => experiment(a),
        Command::Validate(a) => validate(a),
    };
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
