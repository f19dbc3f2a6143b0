//! Sampling of the measurement-line trace and the multiplicative noise model.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SuperlensError};
use crate::forward::io::{parse_f64, split_header, write_header};
use crate::spectral::{SceneParameters, TrigInterpolant, C64};

/// Default number of sampling intervals per period.
pub const DEFAULT_SAMPLES: usize = 100;
/// Default relative noise level.
pub const DEFAULT_NOISE: f64 = 0.05;
/// Generator used for `r_m`, recorded with every noisy measurement set.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64), r = level * (2 U - 1), U = gen::<f64>()";

/// Samples `u(x_m, b)` at `x_m = m Lambda / M`, `m = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub scene: SceneParameters,
    pub count: usize,
    pub x: Vec<f64>,
    pub samples: Vec<C64>,
    pub noise_level: f64,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

impl MeasurementSet {
    pub fn is_noiseless(&self) -> bool {
        self.seed.is_none() || self.noise_level == 0.0
    }

    /// Samples `0..M`, i.e. one period without the duplicated end point.
    pub fn analysis_samples(&self) -> &[C64] {
        &self.samples[..self.count]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write_header(
            &mut w,
            &[
                ("M", self.count.to_string()),
                ("noise_level", format!("{}", self.noise_level)),
                ("seed", self.seed.map_or("none".into(), |s| s.to_string())),
                ("rng", self.rng.clone().unwrap_or_else(|| "none".into())),
                ("scene", serde_json::to_string(&self.scene)?),
            ],
        )?;
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["m", "x", "re_u", "im_u"])?;
        for (m, (x, u)) in self.x.iter().zip(&self.samples).enumerate() {
            wr.write_record([
                m.to_string(),
                format!("{x:.17e}"),
                format!("{:.17e}", u.re),
                format!("{:.17e}", u.im),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`MeasurementSet::write_csv`]. The scene comes from
    /// the header unless `scene` is given.
    pub fn read_csv<R: Read>(r: R, scene: Option<SceneParameters>) -> Result<Self> {
        let (h, body) = split_header(r)?;
        let scene = match scene {
            Some(s) => s,
            None => {
                let s = h.get("scene").ok_or_else(|| SuperlensError::Parse {
                    context: "measurement csv".into(),
                    message: "missing '# scene = ...' header".into(),
                })?;
                serde_json::from_str(s)?
            }
        };
        let mut rd = csv::Reader::from_reader(body.as_bytes());
        let mut x = Vec::new();
        let mut samples = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() < 4 {
                return Err(SuperlensError::Parse {
                    context: "measurement csv".into(),
                    message: format!("expected 4 columns, got {}", rec.len()),
                });
            }
            x.push(parse_f64(&rec[1], "x")?);
            samples.push(C64::new(parse_f64(&rec[2], "re_u")?, parse_f64(&rec[3], "im_u")?));
        }
        if samples.len() < 3 {
            return Err(SuperlensError::Parse {
                context: "measurement csv".into(),
                message: "need at least 3 samples".into(),
            });
        }
        let noise_level = h.get("noise_level").map(|s| parse_f64(s, "noise_level")).transpose()?.unwrap_or(0.0);
        let seed = match h.get("seed").map(String::as_str) {
            None | Some("none") => None,
            Some(s) => Some(s.parse::<u64>().map_err(|e| SuperlensError::Parse {
                context: "seed".into(),
                message: e.to_string(),
            })?),
        };
        let rng = h.get("rng").filter(|s| s.as_str() != "none").cloned();
        Ok(MeasurementSet {
            scene,
            count: samples.len() - 1,
            x,
            samples,
            noise_level,
            seed,
            rng,
        })
    }
}

/// Samples a trace given as a function of `x` at the `M + 1` measurement points.
pub fn sample_measurements(trace: &dyn Fn(f64) -> C64, p: &SceneParameters, count: usize) -> Result<MeasurementSet> {
    if count < 2 {
        return Err(SuperlensError::InvalidParameter(format!("need M >= 2, got {count}")));
    }
    let x: Vec<f64> = (0..=count).map(|m| m as f64 * p.period / count as f64).collect();
    let samples = x.iter().map(|&x| trace(x)).collect();
    Ok(MeasurementSet {
        scene: *p,
        count,
        x,
        samples,
        noise_level: 0.0,
        seed: None,
        rng: None,
    })
}

/// Samples a solver trace on `x_i = i Lambda / Nx` by trigonometric interpolation.
pub fn sample_trace(trace: &[C64], p: &SceneParameters, count: usize) -> Result<MeasurementSet> {
    let interp = TrigInterpolant::new(trace, p.period)?;
    let nx = trace.len();
    // grid nesting: take nodal values where the measurement point is a node
    let nodal = |x: f64| -> Option<C64> {
        let s = x / p.period * nx as f64;
        let r = s.round();
        ((s - r).abs() < 1e-9).then(|| trace[(r as usize) % nx])
    };
    sample_measurements(&|x| nodal(x).unwrap_or_else(|| interp.eval(x)), p, count)
}

/// The relative perturbations `r_m` drawn for a given seed.
pub fn noise_draws(level: f64, seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| level * (2.0 * rng.gen::<f64>() - 1.0)).collect()
}

/// Multiplies each sample by `1 + r_m`, `r_m` uniform on `[-level, level]`.
pub fn apply_noise(ms: &MeasurementSet, level: f64, seed: u64) -> Result<MeasurementSet> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(SuperlensError::InvalidParameter(format!("noise level must be >= 0, got {level}")));
    }
    let r = noise_draws(level, seed, ms.samples.len());
    Ok(MeasurementSet {
        samples: ms.samples.iter().zip(&r).map(|(u, r)| u * (1.0 + r)).collect(),
        noise_level: level,
        seed: Some(seed),
        rng: Some(RNG_NAME.to_string()),
        ..ms.clone()
    })
}
