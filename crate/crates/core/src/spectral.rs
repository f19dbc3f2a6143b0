//! Wavenumbers, branch convention and discrete Fourier analysis of periodic data.

use std::f64::consts::TAU;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SuperlensError};

pub type C64 = Complex<f64>;

/// Square root with the argument of `z` taken in `[0, 2pi)`.
///
/// The result has argument in `[0, pi)`, so negative reals map to `+i sqrt|z|`
/// and `z = 1` (the product `eps * mu` of a perfect lens) maps to `1`.
pub fn branch_sqrt(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let mut arg = z.im.atan2(z.re);
    if arg < 0.0 {
        arg += TAU;
    }
    // atan2 returns -0.0 for (x > 0, -0.0); keep that on the positive real axis
    if arg >= TAU {
        arg -= TAU;
    }
    C64::from_polar(r.sqrt(), 0.5 * arg)
}

/// Global physical configuration: period, wavelength, slab `[a, b]` and slab material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneParameters {
    pub period: f64,
    pub wavelength: f64,
    pub slab_bottom: f64,
    pub slab_top: f64,
    pub eps: C64,
    pub mu: C64,
}

impl SceneParameters {
    pub fn new(
        period: f64,
        wavelength: f64,
        slab_bottom: f64,
        slab_top: f64,
        eps: C64,
        mu: C64,
    ) -> Result<Self> {
        let p = SceneParameters {
            period,
            wavelength,
            slab_bottom,
            slab_top,
            eps,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    /// The experiment geometry: period 1, wavelength 1.1, slab on `[0.1, 0.2]`.
    pub fn experiment(eps: C64, mu: C64) -> Self {
        SceneParameters {
            period: 1.0,
            wavelength: 1.1,
            slab_bottom: 0.1,
            slab_top: 0.2,
            eps,
            mu,
        }
    }

    /// Experiment geometry with `eps = mu = -1`.
    pub fn superlens() -> Self {
        Self::experiment(C64::new(-1.0, 0.0), C64::new(-1.0, 0.0))
    }

    /// Experiment geometry with `eps = mu = 1` (the slab is vacuum).
    pub fn vacuum() -> Self {
        Self::experiment(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SuperlensError::InvalidParameter(m.to_string()));
        if !(self.period.is_finite() && self.period > 0.0) {
            return bad("period must be positive");
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return bad("wavelength must be positive");
        }
        if !(self.slab_bottom > 0.0 && self.slab_top > self.slab_bottom && self.slab_top.is_finite()) {
            return bad("slab must satisfy 0 < a < b");
        }
        if !(self.eps.re.is_finite() && self.eps.im.is_finite()) || self.eps.norm() == 0.0 {
            return bad("eps must be finite and nonzero");
        }
        if !(self.mu.re.is_finite() && self.mu.im.is_finite()) || self.mu.norm() == 0.0 {
            return bad("mu must be finite and nonzero");
        }
        Ok(())
    }

    /// Free-space wavenumber `kappa = 2 pi / lambda`.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    /// Same scene with `eps` replaced by `eps + i sigma`.
    pub fn with_loss(&self, sigma: f64) -> Self {
        SceneParameters {
            eps: self.eps + C64::new(0.0, sigma),
            ..*self
        }
    }

    /// Slab wavenumber `eta = kappa sqrt(eps mu)`.
    pub fn slab_wavenumber(&self) -> C64 {
        self.wavenumber() * branch_sqrt(self.eps * self.mu)
    }

    pub fn label(&self) -> String {
        format!("eps={} mu={}", fmt_complex(self.eps), fmt_complex(self.mu))
    }
}

pub(crate) fn fmt_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im > 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

/// `alpha_n = 2 pi n / Lambda`.
pub fn alpha(n: i64, period: f64) -> f64 {
    TAU * n as f64 / period
}

/// `(alpha_n, beta_n)` with `beta_n = sqrt(kappa^2 - alpha_n^2)`.
pub fn mode_wavenumbers(n: i64, p: &SceneParameters) -> (f64, C64) {
    let al = alpha(n, p.period);
    let k = p.wavenumber();
    (al, branch_sqrt(C64::new(k * k - al * al, 0.0)))
}

/// `(eta, gamma_n)` with `gamma_n = sqrt(eta^2 - alpha_n^2)`.
pub fn slab_wavenumbers(n: i64, p: &SceneParameters) -> (C64, C64) {
    let al = alpha(n, p.period);
    let eta = p.slab_wavenumber();
    (eta, branch_sqrt(eta * eta - al * al))
}

/// Fourier coefficients on the symmetric band `-N..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    band: usize,
    values: Vec<C64>,
}

impl ModeCoefficients {
    pub fn zeros(band: usize) -> Self {
        ModeCoefficients {
            band,
            values: vec![C64::new(0.0, 0.0); 2 * band + 1],
        }
    }

    /// Build from a closure evaluated at `n = -N..=N`.
    pub fn from_fn(band: usize, mut f: impl FnMut(i64) -> C64) -> Self {
        let b = band as i64;
        ModeCoefficients {
            band,
            values: (-b..=b).map(&mut f).collect(),
        }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn get(&self, n: i64) -> Option<C64> {
        self.index(n).map(|i| self.values[i])
    }

    pub fn set(&mut self, n: i64, v: C64) {
        let i = self.index(n).expect("mode outside band");
        self.values[i] = v;
    }

    fn index(&self, n: i64) -> Option<usize> {
        let b = self.band as i64;
        if n.abs() <= b {
            Some((n + b) as usize)
        } else {
            None
        }
    }

    /// `(n, c_n)` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let b = self.band as i64;
        self.values.iter().enumerate().map(move |(i, v)| (i as i64 - b, *v))
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

fn twiddles(m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| C64::from_polar(1.0, -TAU * j as f64 / m as f64))
        .collect()
}

/// `c_n = (1/M) sum_m s_m e^{-i alpha_n x_m}` for `|n| <= band`, with `x_m = m Lambda / M`.
///
/// The samples must cover exactly one period (no duplicate end point).
pub fn fourier_coefficients(samples: &[C64], band: usize) -> Result<ModeCoefficients> {
    let m = samples.len();
    if m < 2 * band + 1 {
        return Err(SuperlensError::Aliasing { samples: m, band });
    }
    let tw = twiddles(m);
    let scale = 1.0 / m as f64;
    Ok(ModeCoefficients::from_fn(band, |n| {
        let nn = n.rem_euclid(m as i64) as usize;
        let mut acc = C64::new(0.0, 0.0);
        for (j, s) in samples.iter().enumerate() {
            acc += s * tw[(nn * j) % m];
        }
        acc * scale
    }))
}

/// Evaluates `sum_{|n| <= N} c_n e^{i alpha_n x}` at each grid point.
pub fn fourier_synthesis(coeffs: &ModeCoefficients, period: f64, grid: &[f64]) -> Vec<C64> {
    grid.iter()
        .map(|&x| {
            coeffs
                .iter()
                .map(|(n, c)| c * C64::from_polar(1.0, alpha(n, period) * x))
                .sum()
        })
        .collect()
}

/// Trigonometric interpolant of equispaced periodic samples.
///
/// For an even sample count the Nyquist coefficient is split evenly between
/// `+M/2` and `-M/2`, so the interpolant of real data is real.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    period: f64,
    coeffs: ModeCoefficients,
}

impl TrigInterpolant {
    pub fn new(samples: &[C64], period: f64) -> Result<Self> {
        let m = samples.len();
        if m == 0 {
            return Err(SuperlensError::InvalidParameter("no samples to interpolate".into()));
        }
        let band = m / 2;
        if m % 2 == 1 {
            return Ok(TrigInterpolant {
                period,
                coeffs: fourier_coefficients(samples, band)?,
            });
        }
        let tw = twiddles(m);
        let scale = 1.0 / m as f64;
        let dft = |n: i64| -> C64 {
            let nn = n.rem_euclid(m as i64) as usize;
            samples
                .iter()
                .enumerate()
                .map(|(j, s)| s * tw[(nn * j) % m])
                .sum::<C64>()
                * scale
        };
        let b = band as i64;
        let coeffs = ModeCoefficients::from_fn(band, |n| {
            if n.abs() == b {
                0.5 * dft(b)
            } else {
                dft(n)
            }
        });
        Ok(TrigInterpolant { period, coeffs })
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.coeffs
            .iter()
            .map(|(n, c)| c * C64::from_polar(1.0, alpha(n, self.period) * x))
            .sum()
    }

    pub fn coefficients(&self) -> &ModeCoefficients {
        &self.coeffs
    }
}

/// Uniform grid `x_i = i Lambda / n`, `i = 0..n`.
pub fn periodic_grid(n: usize, period: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * period / n as f64).collect()
}
