use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Result, SuperlensError};
use crate::forward::{CosineTerm, Grid, Profile, ProfileShape, SolverOptions, XDerivative};
use crate::spectral::{SceneParameters, C64};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Reconstruction,
    Upsilon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSelector {
    Smooth,
    Tent,
    Boxcar,
    Cosine { terms: Vec<CosineTerm> },
    Fourier { coefficients: Vec<(i64, C64)> },
}

impl ProfileSelector {
    pub fn build(&self, delta: f64, period: f64) -> Result<Profile> {
        let mut p = match self {
            ProfileSelector::Smooth => Profile::smooth(delta),
            ProfileSelector::Tent => Profile::tent(delta),
            ProfileSelector::Boxcar => Profile::boxcar(delta),
            ProfileSelector::Cosine { terms } => Profile {
                delta,
                period,
                shape: ProfileShape::CosineSum { terms: terms.clone() },
            },
            ProfileSelector::Fourier { coefficients } => Profile {
                delta,
                period,
                shape: ProfileShape::Fourier {
                    coefficients: coefficients.clone(),
                },
            },
        };
        if matches!(self, ProfileSelector::Smooth | ProfileSelector::Tent | ProfileSelector::Boxcar)
            && (period - 1.0).abs() > 1e-12
        {
            // the built-in shapes are defined on the unit period; stretch them
            p = stretch(p, period);
        }
        Profile::new(p.delta, p.period, p.shape)
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "smooth" => Ok(ProfileSelector::Smooth),
            "tent" | "nonsmooth" => Ok(ProfileSelector::Tent),
            "boxcar" | "discontinuous" => Ok(ProfileSelector::Boxcar),
            other => Err(SuperlensError::Config(format!(
                "unknown profile {other:?} (expected smooth, tent or boxcar)"
            ))),
        }
    }
}

fn stretch(p: Profile, period: f64) -> Profile {
    let shape = match p.shape {
        ProfileShape::TentSum { centers, half_width } => ProfileShape::TentSum {
            centers: centers.iter().map(|c| c * period).collect(),
            half_width: half_width * period,
        },
        ProfileShape::BoxcarSum { intervals } => ProfileShape::BoxcarSum {
            intervals: intervals.iter().map(|(l, h)| (l * period, h * period)).collect(),
        },
        other => other,
    };
    Profile {
        delta: p.delta,
        period,
        shape,
    }
}

/// One material row of the experiment matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRow {
    pub label: String,
    pub eps: C64,
    pub mu: C64,
    pub cutoffs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    pub kind: ScenarioKind,
    pub period: f64,
    pub wavelength: f64,
    pub slab_bottom: f64,
    pub slab_top: f64,
    pub profile: ProfileSelector,
    pub delta: f64,
    pub rows: Vec<MaterialRow>,
    pub measurements: usize,
    pub noise: f64,
    pub seed: u64,
    pub grid: Grid,
    pub x_derivative: XDerivative,
    pub loss: f64,
    /// Highest mode of an upsilon scan.
    pub n_max: usize,
    /// Points of the profile evaluation grid used for plots and error norms.
    pub plot_points: usize,
}

impl ScenarioConfig {
    pub fn scene(&self, row: &MaterialRow) -> SceneParameters {
        SceneParameters {
            period: self.period,
            wavelength: self.wavelength,
            slab_bottom: self.slab_bottom,
            slab_top: self.slab_top,
            eps: row.eps,
            mu: row.mu,
        }
    }

    pub fn profile(&self) -> Result<Profile> {
        self.profile.build(self.delta, self.period)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            x_derivative: self.x_derivative,
            loss: self.loss,
            ..SolverOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SuperlensError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.rows.is_empty() {
            return Err(SuperlensError::Config("scenario has no material rows".into()));
        }
        if !(self.noise >= 0.0) {
            return Err(SuperlensError::Config("noise must be >= 0".into()));
        }
        if self.plot_points < 2 {
            return Err(SuperlensError::Config("plot_points must be >= 2".into()));
        }
        for row in &self.rows {
            self.scene(row).validate()?;
            if self.kind == ScenarioKind::Reconstruction {
                for &n in &row.cutoffs {
                    if self.measurements < 2 * n + 1 {
                        return Err(SuperlensError::Aliasing {
                            samples: self.measurements,
                            band: n,
                        });
                    }
                }
            }
        }
        if self.kind == ScenarioKind::Reconstruction {
            self.grid.validate()?;
            self.profile()?.validate_for(&self.scene(&self.rows[0]))?;
        }
        Ok(())
    }

    pub fn from_value(v: Value) -> Result<Self> {
        let c: ScenarioConfig = serde_json::from_value(v).map_err(|e| SuperlensError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Loads a config file. A `"base"` key names a builtin that the file overrides field by field.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut v: Value = serde_json::from_str(&text).map_err(|e| SuperlensError::Config(format!("{}: {e}", path.display())))?;
        let base = v.as_object_mut().and_then(|o| o.remove("base"));
        let v = match base {
            Some(Value::String(name)) => {
                let mut b = builtin_value(&name)?;
                merge(&mut b, v);
                b
            }
            Some(other) => return Err(SuperlensError::Config(format!("base must be a builtin name, got {other}"))),
            None => v,
        };
        Self::from_value(v)
    }
}

/// Recursive object merge; arrays and scalars in `overlay` replace those in `base`.
pub fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn row(label: &str, eps: (f64, f64), mu: (f64, f64), cutoffs: &[usize]) -> Value {
    json!({"label": label, "eps": [eps.0, eps.1], "mu": [mu.0, mu.1], "cutoffs": cutoffs})
}

fn smooth_rows() -> Vec<Value> {
    let c = [1, 3, 10];
    vec![
        row("row1_eps1_mu1", (1.0, 0.0), (1.0, 0.0), &c),
        row("row2_eps16_mu1", (16.0, 0.0), (1.0, 0.0), &c),
        row("row3_eps-1_mu-1", (-1.0, 0.0), (-1.0, 0.0), &c),
        row("row4_eps-1+0.05i_mu-0.97", (-1.0, 0.05), (-0.97, 0.0), &c),
        row("row5_eps-1+0.1i_mu-1.06", (-1.0, 0.1), (-1.06, 0.0), &c),
    ]
}

fn nonsmooth_rows() -> Vec<Value> {
    vec![
        row("row1_eps1_mu1", (1.0, 0.0), (1.0, 0.0), &[1, 2, 4]),
        row("row2_eps16_mu1", (16.0, 0.0), (1.0, 0.0), &[1, 4, 5]),
        row("row3_eps-1_mu-1", (-1.0, 0.0), (-1.0, 0.0), &[1, 4, 8]),
    ]
}

fn discontinuous_rows() -> Vec<Value> {
    vec![
        row("row1_eps1_mu1", (1.0, 0.0), (1.0, 0.0), &[1, 2, 3]),
        row("row2_eps16_mu1", (16.0, 0.0), (1.0, 0.0), &[1, 2, 3]),
        row("row3_eps-1_mu-1", (-1.0, 0.0), (-1.0, 0.0), &[1, 2, 20]),
    ]
}

fn base_value(name: &str, profile: &str, delta: f64, rows: Vec<Value>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "kind": "reconstruction",
        "period": 1.0,
        "wavelength": 1.1,
        "slab_bottom": 0.1,
        "slab_top": 0.2,
        "profile": {"kind": profile},
        "delta": delta,
        "rows": rows,
        "measurements": 100,
        "noise": 0.05,
        "seed": 20240601u64,
        "grid": {"nx": 256, "ny_omega": 128, "ny_slab": 128},
        "x_derivative": "spectral",
        "loss": 0.0,
        "n_max": 20,
        "plot_points": 400,
    })
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "smooth",
    "smooth-row1",
    "smooth-row2",
    "smooth-row3",
    "smooth-row4",
    "smooth-row5",
    "noslab-row1",
    "nonsmooth",
    "nonsmooth-row1",
    "nonsmooth-row2",
    "nonsmooth-row3",
    "discontinuous",
    "discontinuous-row1",
    "discontinuous-row2",
    "discontinuous-row3",
    "upsilon",
];

fn pick_row(rows: Vec<Value>, name: &str, idx: &str) -> Result<Vec<Value>> {
    let i: usize = idx
        .parse()
        .map_err(|_| SuperlensError::Config(format!("unknown builtin {name:?}")))?;
    if i == 0 || i > rows.len() {
        return Err(SuperlensError::Config(format!("unknown builtin {name:?}")));
    }
    Ok(vec![rows[i - 1].clone()])
}

/// JSON of a builtin scenario, before any override.
pub fn builtin_value(name: &str) -> Result<Value> {
    let name = if name == "noslab-row1" { "smooth-row1" } else { name };
    let (family, row) = match name.split_once("-row") {
        Some((f, r)) => (f, Some(r)),
        None => (name, None),
    };
    let (profile, delta, rows) = match family {
        "smooth" => ("smooth", 0.01, smooth_rows()),
        "nonsmooth" => ("tent", 0.01, nonsmooth_rows()),
        "discontinuous" => ("boxcar", 0.001, discontinuous_rows()),
        "upsilon" if row.is_none() => {
            let mut v = base_value("upsilon", "smooth", 0.01, smooth_rows());
            v["kind"] = json!("upsilon");
            return Ok(v);
        }
        _ => return Err(SuperlensError::Config(format!("unknown builtin {name:?}"))),
    };
    let rows = match row {
        Some(r) => pick_row(rows, name, r)?,
        None => rows,
    };
    Ok(base_value(name, profile, delta, rows))
}

pub fn builtin(name: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::from_value(builtin_value(name)?)
}

/// Builtin with a JSON overlay applied field by field.
pub fn builtin_with_overrides(name: &str, overlay: Value) -> Result<ScenarioConfig> {
    let mut v = builtin_value(name)?;
    merge(&mut v, overlay);
    ScenarioConfig::from_value(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_parses() {
        for name in BUILTIN_NAMES {
            let c = builtin(name).unwrap();
            assert_eq!(c.schema_version, SCHEMA_VERSION);
        }
        assert!(builtin("smooth-row6").is_err());
        assert!(builtin("bogus").is_err());
    }

    #[test]
    fn experiment_matrix_is_complete() {
        let cells = |n: &str| -> usize { builtin(n).unwrap().rows.iter().map(|r| r.cutoffs.len()).sum() };
        assert_eq!(cells("smooth"), 15);
        assert_eq!(cells("nonsmooth"), 9);
        assert_eq!(cells("discontinuous"), 9);
        let d3 = builtin("discontinuous-row3").unwrap();
        assert_eq!(d3.rows[0].cutoffs, vec![1, 2, 20]);
        assert_eq!(d3.delta, 0.001);
        assert_eq!(builtin("noslab-row1").unwrap().rows, builtin("smooth-row1").unwrap().rows);
        let s4 = builtin("smooth-row4").unwrap();
        assert_eq!(s4.rows[0].eps, C64::new(-1.0, 0.05));
        assert_eq!(s4.rows[0].mu, C64::new(-0.97, 0.0));
    }

    #[test]
    fn overrides_replace_single_fields() {
        let c = builtin_with_overrides("smooth-row3", json!({"seed": 7, "grid": {"nx": 64}})).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.grid.nx, 64);
        assert_eq!(c.grid.ny_omega, 128);
        assert!(builtin_with_overrides("smooth-row3", json!({"bogus": 1})).is_err());
        assert!(builtin_with_overrides("smooth-row3", json!({"schema_version": 2})).is_err());
        let e = builtin_with_overrides("smooth-row3", json!({"measurements": 10})).unwrap_err();
        assert!(matches!(e, SuperlensError::Aliasing { .. }));
    }

    #[test]
    fn load_with_base() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"base": "nonsmooth-row2", "noise": 0.0}"#).unwrap();
        let c = ScenarioConfig::load(&path).unwrap();
        assert_eq!(c.noise, 0.0);
        assert_eq!(c.rows[0].cutoffs, vec![1, 4, 5]);
        assert_eq!(c.profile, ProfileSelector::Tent);
    }

    #[test]
    fn profile_selector_builds_shapes() {
        let p = ProfileSelector::parse("boxcar").unwrap().build(0.001, 1.0).unwrap();
        assert_eq!(p, Profile::boxcar(0.001));
        let p = ProfileSelector::Tent.build(0.01, 2.0).unwrap();
        assert!((p.g(0.6) - 1.0).abs() < 1e-12);
        assert!(ProfileSelector::parse("wavy").is_err());
    }
}
