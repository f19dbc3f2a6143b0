//! Profile coefficients from measured trace coefficients: `f_n = Upsilon_n (u_n(b) - u0(b) delta_n0)`.

use std::io::Write;

use serde::Serialize;

use crate::analytic::{scaling_factor, zeroth_order_field};
use crate::error::{Result, SuperlensError};
use crate::forward::Profile;
use crate::measurement::MeasurementSet;
use crate::spectral::{fourier_coefficients, fourier_synthesis, periodic_grid, ModeCoefficients, SceneParameters, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedProfile {
    pub period: f64,
    pub cutoff: usize,
    /// `f_n` for `|n| <= N`; skipped modes hold zero.
    pub coefficients: ModeCoefficients,
    /// `|Upsilon_n|` for `|n| <= N` (`None` when skipped).
    pub upsilon: Vec<(i64, Option<f64>)>,
    pub skipped: Vec<i64>,
}

impl ReconstructedProfile {
    /// Complex synthesis; the real part is the profile, the imaginary part a diagnostic.
    pub fn evaluate(&self, grid: &[f64]) -> Vec<C64> {
        fourier_synthesis(&self.coefficients, self.period, grid)
    }

    /// `max |Im f|` on `points` uniform points.
    pub fn max_imaginary(&self, points: usize) -> f64 {
        self.evaluate(&periodic_grid(points, self.period))
            .iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max)
    }

    /// Mode table: `n, re_f, im_f, abs_upsilon, skipped`.
    pub fn write_mode_table<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["n", "re_f", "im_f", "abs_upsilon", "skipped"])?;
        for ((n, f), (_, ups)) in self.coefficients.iter().zip(&self.upsilon) {
            wr.write_record([
                n.to_string(),
                format!("{:.17e}", f.re),
                format!("{:.17e}", f.im),
                ups.map_or(String::new(), |u| format!("{u:.17e}")),
                self.skipped.contains(&n).to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reconstruction CSV: `x, f_true, f_recon_re, f_recon_im`.
    pub fn write_profile_csv<W: Write>(&self, w: W, truth: Option<&Profile>, points: usize) -> Result<()> {
        let x = periodic_grid(points, self.period);
        let f = self.evaluate(&x);
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "f_true", "f_recon_re", "f_recon_im"])?;
        for (xi, fi) in x.iter().zip(&f) {
            let t = truth.map_or(String::new(), |p| format!("{:.17e}", p.delta * p.g(*xi)));
            wr.write_record([format!("{xi:.17e}"), t, format!("{:.17e}", fi.re), format!("{:.17e}", fi.im)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Reconstructs the profile from a measurement set with cutoff `N`.
pub fn reconstruct_profile(ms: &MeasurementSet, p: &SceneParameters, cutoff: usize) -> Result<ReconstructedProfile> {
    p.validate()?;
    let data = ms.analysis_samples();
    if data.len() < 2 * cutoff + 1 {
        return Err(SuperlensError::Aliasing {
            samples: data.len(),
            band: cutoff,
        });
    }
    let mut u = fourier_coefficients(data, cutoff)?;
    let u0 = zeroth_order_field(p)?.trace();
    u.set(0, u.get(0).unwrap() - u0);
    reconstruct_from_coefficients(&u, p)
}

/// Applies the scaling factors to perturbation coefficients `u_n(b) - u0(b) delta_n0`.
pub fn reconstruct_from_coefficients(perturbation: &ModeCoefficients, p: &SceneParameters) -> Result<ReconstructedProfile> {
    let cutoff = perturbation.band();
    let mut coefficients = ModeCoefficients::zeros(cutoff);
    let mut upsilon = Vec::with_capacity(2 * cutoff + 1);
    let mut skipped = Vec::new();
    for (n, un) in perturbation.iter() {
        match scaling_factor(n, p) {
            Ok(ups) => {
                coefficients.set(n, ups * un);
                upsilon.push((n, Some(ups.norm())));
            }
            Err(e @ SuperlensError::DegenerateMode { .. }) => {
                log::warn!("reconstruction skips mode {n}: {e}");
                skipped.push(n);
                upsilon.push((n, None));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ReconstructedProfile {
        period: p.period,
        cutoff,
        coefficients,
        upsilon,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeError {
    pub n: i64,
    pub recovered: C64,
    pub truth: C64,
    pub abs_error: f64,
    /// `None` when the true coefficient vanishes.
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileErrorMetrics {
    /// `||Re f - f_true||_2 / ||f_true||_2` on the evaluation grid.
    pub rel_l2: f64,
    /// `||Re f - f_true||_inf / ||f_true||_inf`.
    pub rel_linf: f64,
    /// Same two errors against the truth truncated to `|n| <= N`.
    pub band_rel_l2: f64,
    pub band_rel_linf: f64,
    pub max_imaginary: f64,
    pub modes: Vec<ModeError>,
}

impl ProfileErrorMetrics {
    pub fn mode(&self, n: i64) -> Option<&ModeError> {
        self.modes.iter().find(|m| m.n == n)
    }
}

fn rel_norms(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let t2: f64 = b.iter().map(|y| y * y).sum();
    let di = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let ti = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    ((d2 / t2).sqrt(), di / ti)
}

/// Relative errors of `Re f` against `delta g` on `points` uniform points, plus per-mode errors.
pub fn profile_error(recon: &ReconstructedProfile, truth: &Profile, points: usize) -> ProfileErrorMetrics {
    let x = periodic_grid(points, recon.period);
    let f = recon.evaluate(&x);
    let re: Vec<f64> = f.iter().map(|v| v.re).collect();
    let t: Vec<f64> = x.iter().map(|&x| truth.delta * truth.g(x)).collect();
    let band = truth.band_limited_coefficients(recon.cutoff);
    let tb: Vec<f64> = fourier_synthesis(&band, recon.period, &x).iter().map(|v| v.re).collect();
    let (rel_l2, rel_linf) = rel_norms(&re, &t);
    let (band_rel_l2, band_rel_linf) = rel_norms(&re, &tb);
    let modes = recon
        .coefficients
        .iter()
        .map(|(n, c)| {
            let tn = band.get(n).unwrap();
            let abs_error = (c - tn).norm();
            ModeError {
                n,
                recovered: c,
                truth: tn,
                abs_error,
                rel_error: (tn.norm() > 0.0).then(|| abs_error / tn.norm()),
            }
        })
        .collect();
    ProfileErrorMetrics {
        rel_l2,
        rel_linf,
        band_rel_l2,
        band_rel_linf,
        max_imaginary: f.iter().map(|v| v.im.abs()).fold(0.0, f64::max),
        modes,
    }
}
