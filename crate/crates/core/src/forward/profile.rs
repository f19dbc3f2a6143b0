//! Periodic surface profiles `f = delta * g`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SuperlensError};
use crate::spectral::{alpha, ModeCoefficients, SceneParameters, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineTerm {
    /// Integer frequency `k` in `cos(2 pi k x / Lambda)`.
    pub mode: i64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    CosineSum { terms: Vec<CosineTerm> },
    /// Unit-height triangles of the given half width.
    TentSum { centers: Vec<f64>, half_width: f64 },
    /// Indicator functions of `[lo, hi]` intervals.
    BoxcarSum { intervals: Vec<(f64, f64)> },
    /// `g(x) = Re sum c_n e^{i alpha_n x}`.
    Fourier { coefficients: Vec<(i64, C64)> },
}

/// Surface `f(x) = delta g(x)`, periodic with the scene period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub delta: f64,
    pub period: f64,
    pub shape: ProfileShape,
}

/// `f`, `f'` and `f''` at grid points (already scaled by `delta`).
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSamples {
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    pub d2f: Vec<f64>,
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Distance from `x` to `c` on the circle of circumference `period`.
fn periodic_distance(x: f64, c: f64, period: f64) -> f64 {
    let d = (x - c).rem_euclid(period);
    d.min(period - d)
}

impl Profile {
    pub fn new(delta: f64, period: f64, shape: ProfileShape) -> Result<Self> {
        let p = Profile { delta, period, shape };
        p.check_shape()?;
        Ok(p)
    }

    /// `0.4 cos 2 pi x + 0.3 cos 6 pi x + 0.2 cos 20 pi x` on period 1.
    pub fn smooth(delta: f64) -> Self {
        let terms = [(1, 0.4), (3, 0.3), (10, 0.2)]
            .into_iter()
            .map(|(mode, amplitude)| CosineTerm { mode, amplitude })
            .collect();
        Profile {
            delta,
            period: 1.0,
            shape: ProfileShape::CosineSum { terms },
        }
    }

    /// Two tents of half width 0.1 centred at 0.3 and 0.7.
    pub fn tent(delta: f64) -> Self {
        Profile {
            delta,
            period: 1.0,
            shape: ProfileShape::TentSum {
                centers: vec![0.3, 0.7],
                half_width: 0.1,
            },
        }
    }

    /// Indicators of `[0.2, 0.4]` and `[0.6, 0.8]`.
    pub fn boxcar(delta: f64) -> Self {
        Profile {
            delta,
            period: 1.0,
            shape: ProfileShape::BoxcarSum {
                intervals: vec![(0.2, 0.4), (0.6, 0.8)],
            },
        }
    }

    pub fn flat() -> Self {
        Profile {
            delta: 0.0,
            period: 1.0,
            shape: ProfileShape::CosineSum { terms: vec![] },
        }
    }

    fn check_shape(&self) -> Result<()> {
        let bad = |m: String| Err(SuperlensError::InvalidParameter(m));
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be non-negative, got {}", self.delta));
        }
        if !(self.period > 0.0) {
            return bad("profile period must be positive".into());
        }
        match &self.shape {
            ProfileShape::TentSum { half_width, .. } if !(*half_width > 0.0 && 2.0 * half_width <= self.period) => {
                bad(format!("tent half width {half_width} out of range"))
            }
            ProfileShape::BoxcarSum { intervals } if intervals.iter().any(|(l, h)| !(h > l && h - l <= self.period)) => {
                bad("boxcar intervals must satisfy lo < hi within one period".into())
            }
            _ => Ok(()),
        }
    }

    /// True when `g''` is available in closed form.
    pub fn is_smooth(&self) -> bool {
        matches!(self.shape, ProfileShape::CosineSum { .. } | ProfileShape::Fourier { .. })
    }

    /// Exact shape value `g(x)` (without `delta`).
    pub fn g(&self, x: f64) -> f64 {
        let l = self.period;
        match &self.shape {
            ProfileShape::CosineSum { terms } => terms
                .iter()
                .map(|t| t.amplitude * (TAU * t.mode as f64 * x / l).cos())
                .sum(),
            ProfileShape::TentSum { centers, half_width } => centers
                .iter()
                .map(|&c| (1.0 - periodic_distance(x, c, l) / half_width).max(0.0))
                .sum(),
            ProfileShape::BoxcarSum { intervals } => intervals
                .iter()
                .filter(|(lo, hi)| {
                    let xr = lo + (x - lo).rem_euclid(l);
                    xr >= *lo && xr <= *hi
                })
                .count() as f64,
            ProfileShape::Fourier { coefficients } => coefficients
                .iter()
                .map(|(n, c)| (c * C64::from_polar(1.0, alpha(*n, l) * x)).re)
                .sum(),
        }
    }

    /// Exact Fourier coefficient `g_n` of the shape (without `delta`).
    pub fn coefficient(&self, n: i64) -> C64 {
        let l = self.period;
        let al = alpha(n, l);
        match &self.shape {
            ProfileShape::CosineSum { terms } => terms
                .iter()
                .map(|t| {
                    if t.mode == 0 && n == 0 {
                        C64::new(t.amplitude, 0.0)
                    } else if t.mode != 0 && t.mode.abs() == n.abs() {
                        C64::new(0.5 * t.amplitude, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .sum(),
            ProfileShape::TentSum { centers, half_width } => {
                let w = *half_width;
                centers
                    .iter()
                    .map(|&c| C64::from_polar(w / l * sinc(0.5 * al * w).powi(2), -al * c))
                    .sum()
            }
            ProfileShape::BoxcarSum { intervals } => intervals
                .iter()
                .map(|&(lo, hi)| {
                    if n == 0 {
                        C64::new((hi - lo) / l, 0.0)
                    } else {
                        (C64::from_polar(1.0, -al * lo) - C64::from_polar(1.0, -al * hi)) / C64::new(0.0, al * l)
                    }
                })
                .sum(),
            ProfileShape::Fourier { coefficients } => {
                let find = |m: i64| -> C64 {
                    coefficients
                        .iter()
                        .filter(|(k, _)| *k == m)
                        .map(|(_, c)| *c)
                        .sum()
                };
                0.5 * (find(n) + find(-n).conj())
            }
        }
    }

    /// Coefficients of `f = delta g` for `|n| <= band`.
    pub fn band_limited_coefficients(&self, band: usize) -> ModeCoefficients {
        ModeCoefficients::from_fn(band, |n| self.delta * self.coefficient(n))
    }

    /// Number of modes used for the forward solve of a non-smooth profile on `nx` points.
    pub fn projection_band(nx: usize) -> usize {
        nx / 4
    }

    /// `f, f', f''` at `x`. Smooth shapes are exact; tents and boxcars are first
    /// projected onto `|n| <= nx / 4`.
    pub fn samples(&self, x: &[f64], nx: usize) -> ProfileSamples {
        let d = self.delta;
        let l = self.period;
        let spectral = |modes: Vec<(i64, C64)>| -> ProfileSamples {
            let mut out = ProfileSamples {
                f: vec![0.0; x.len()],
                df: vec![0.0; x.len()],
                d2f: vec![0.0; x.len()],
            };
            for (i, &xi) in x.iter().enumerate() {
                for &(n, c) in &modes {
                    let al = alpha(n, l);
                    let e = c * C64::from_polar(1.0, al * xi);
                    out.f[i] += d * e.re;
                    out.df[i] += d * (C64::new(0.0, al) * e).re;
                    out.d2f[i] += d * (-al * al * e.re);
                }
            }
            out
        };
        match &self.shape {
            ProfileShape::CosineSum { terms } => {
                let mut out = ProfileSamples {
                    f: vec![0.0; x.len()],
                    df: vec![0.0; x.len()],
                    d2f: vec![0.0; x.len()],
                };
                for (i, &xi) in x.iter().enumerate() {
                    for t in terms {
                        let w = TAU * t.mode as f64 / l;
                        let (s, c) = (w * xi).sin_cos();
                        out.f[i] += d * t.amplitude * c;
                        out.df[i] -= d * t.amplitude * w * s;
                        out.d2f[i] -= d * t.amplitude * w * w * c;
                    }
                }
                out
            }
            ProfileShape::Fourier { coefficients } => spectral(coefficients.clone()),
            _ => {
                let k = Self::projection_band(nx) as i64;
                spectral((-k..=k).map(|n| (n, self.coefficient(n))).collect())
            }
        }
    }

    /// `max |g|` sampled on a fine grid (exact for the built-in shapes).
    pub fn max_abs_g(&self) -> f64 {
        let m = 4096;
        (0..m)
            .map(|i| self.g(i as f64 * self.period / m as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Checks the period and that the surface stays strictly below the slab.
    pub fn validate_for(&self, p: &SceneParameters) -> Result<()> {
        self.check_shape()?;
        if (self.period - p.period).abs() > 1e-12 * p.period {
            return Err(SuperlensError::InvalidParameter(format!(
                "profile period {} differs from scene period {}",
                self.period, p.period
            )));
        }
        let top = self.delta * self.max_abs_g();
        if top >= p.slab_bottom {
            return Err(SuperlensError::ProfileIntersectsSlab {
                x: f64::NAN,
                gap: p.slab_bottom - top,
            });
        }
        Ok(())
    }
}
