//! Closed-form zeroth- and first-order field quantities and the scaling factor.
//!
//! Every first-order quantity is per unit profile coefficient `g_n`; callers
//! multiply by the profile spectrum themselves.

use std::io::Write;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::error::{Result, SuperlensError};
use crate::linalg::SmallMatrix;
use crate::spectral::{alpha, mode_wavenumbers, slab_wavenumbers, SceneParameters, C64};

/// Relative size (against `kappa`) below which `beta_n` or `gamma_n` counts as zero.
pub const DEGENERATE_TOL: f64 = 1e-10;
/// Relative size (against `4 kappa^2`) below which a determinant counts as zero.
pub const RESONANCE_TOL: f64 = 1e-12;

const I: C64 = C64::new(0.0, 1.0);

/// `rho = -2 i kappa e^{-i kappa b}`.
pub fn boundary_source(p: &SceneParameters) -> C64 {
    let k = p.wavenumber();
    -2.0 * I * k * C64::from_polar(1.0, -k * p.slab_top)
}

/// Determinant of the mode-`n` interface system, as a two-term closed form.
pub fn interface_determinant(n: i64, p: &SceneParameters) -> C64 {
    let (_, be) = mode_wavenumbers(n, p);
    let (_, ga) = slab_wavenumbers(n, p);
    let (a, b, mu) = (p.slab_bottom, p.slab_top, p.mu);
    let e = |z: C64| z.exp();
    let gm = ga - mu * be;
    let gp = ga + mu * be;
    gm * e(I * ga * (b - a)) * (gp * e(I * be * a) - gm * e(-I * be * a))
        + gp * e(I * ga * (a - b)) * (gp * e(-I * be * a) - gm * e(I * be * a))
}

fn check_resonance(n: i64, phi: C64, p: &SceneParameters) -> Result<()> {
    let k = p.wavenumber();
    if phi.norm() < RESONANCE_TOL * 4.0 * k * k || !phi.is_finite() {
        return Err(SuperlensError::Resonance { n, modulus: phi.norm() });
    }
    Ok(())
}

fn check_degenerate(n: i64, p: &SceneParameters) -> Result<(C64, C64)> {
    let (_, be) = mode_wavenumbers(n, p);
    let (_, ga) = slab_wavenumbers(n, p);
    let tol = DEGENERATE_TOL * p.wavenumber();
    if be.norm() < tol || ga.norm() < tol {
        return Err(SuperlensError::DegenerateMode {
            n,
            beta: be.norm(),
            gamma: ga.norm(),
        });
    }
    Ok((be, ga))
}

fn resonance_checked_phi(n: i64, p: &SceneParameters) -> Result<C64> {
    let phi = interface_determinant(n, p);
    check_resonance(n, phi, p)?;
    Ok(phi)
}

/// The 4x4 mode system for unknowns `(a, b, c, d)`: slab field `a e^{i gamma y} + b e^{-i gamma y}`,
/// homogeneous field below the slab `c e^{i beta y} + d e^{-i beta y}`.
///
/// Rows: Robin condition at `y = b`, continuity at `y = a`, flux jump at `y = a`,
/// Dirichlet condition at `y = 0`.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceSystem {
    pub n: i64,
    pub matrix: SmallMatrix<4>,
}

impl InterfaceSystem {
    pub fn new(n: i64, p: &SceneParameters) -> Self {
        let (_, be) = mode_wavenumbers(n, p);
        let (_, ga) = slab_wavenumbers(n, p);
        let (a, b, mu) = (p.slab_bottom, p.slab_top, p.mu);
        let e = |z: C64| z.exp();
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let matrix = SmallMatrix::new([
            [
                I * (ga - mu * be) * e(I * ga * b),
                -I * (ga + mu * be) * e(-I * ga * b),
                z,
                z,
            ],
            [e(I * ga * a), e(-I * ga * a), -e(I * be * a), -e(-I * be * a)],
            [
                I * ga * e(I * ga * a),
                -I * ga * e(-I * ga * a),
                -I * mu * be * e(I * be * a),
                I * mu * be * e(-I * be * a),
            ],
            [z, z, one, one],
        ]);
        InterfaceSystem { n, matrix }
    }

    pub fn determinant(&self) -> C64 {
        self.matrix.determinant()
    }

    pub fn rhs(r: C64, s: C64, t: C64) -> [C64; 4] {
        [r, s, t, C64::new(0.0, 0.0)]
    }
}

/// Coefficients `(a, b, c, d)` of a mode solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl ModeSolution {
    pub fn as_array(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Solves the mode-`n` interface system with right-hand side `(r, s, t, 0)`.
pub fn solve_interface_system(n: i64, p: &SceneParameters, rhs: (C64, C64, C64)) -> Result<ModeSolution> {
    resonance_checked_phi(n, p)?;
    let sys = InterfaceSystem::new(n, p);
    let x = sys.matrix.solve(&InterfaceSystem::rhs(rhs.0, rhs.1, rhs.2))?;
    Ok(ModeSolution {
        a: x[0],
        b: x[1],
        c: x[2],
        d: x[3],
    })
}

/// Flat-surface total field: `c00 e^{i kappa y} + d00 e^{-i kappa y}` below the slab,
/// `a00 e^{i eta y} + b00 e^{-i eta y}` inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZerothOrderField {
    pub coefficients: ModeSolution,
    pub kappa: f64,
    pub eta: C64,
    pub slab_bottom: f64,
    pub slab_top: f64,
}

impl ZerothOrderField {
    pub fn eval(&self, y: f64) -> C64 {
        let c = &self.coefficients;
        if y <= self.slab_bottom {
            c.c * C64::from_polar(1.0, self.kappa * y) + c.d * C64::from_polar(1.0, -self.kappa * y)
        } else {
            c.a * (I * self.eta * y).exp() + c.b * (-I * self.eta * y).exp()
        }
    }

    /// Value at the measurement line `y = b`.
    pub fn trace(&self) -> C64 {
        self.eval(self.slab_top)
    }
}

pub fn zeroth_order_field(p: &SceneParameters) -> Result<ZerothOrderField> {
    let phi0 = resonance_checked_phi(0, p)?;
    let k = p.wavenumber();
    let eta = p.slab_wavenumber();
    let (a, mu) = (p.slab_bottom, p.mu);
    let rho = boundary_source(p);
    let pre = 2.0 * mu * rho / (I * phi0);
    let (ck, sk) = ((k * a).cos(), (k * a).sin());
    let a00 = pre * (-I * eta * a).exp() * (mu * k * ck + I * eta * sk);
    let b00 = -pre * (I * eta * a).exp() * (mu * k * ck - I * eta * sk);
    let c00 = pre * eta;
    Ok(ZerothOrderField {
        coefficients: ModeSolution {
            a: a00,
            b: b00,
            c: c00,
            d: -c00,
        },
        kappa: k,
        eta,
        slab_bottom: p.slab_bottom,
        slab_top: p.slab_top,
    })
}

/// First-order source `(v_1n(y), tau_1n)` per unit `g_n`, for `0 <= y <= a`.
pub fn first_order_source(n: i64, p: &SceneParameters, y: f64) -> Result<(C64, C64)> {
    let phi0 = resonance_checked_phi(0, p)?;
    let k = p.wavenumber();
    let eta = p.slab_wavenumber();
    let (a, mu) = (p.slab_bottom, p.mu);
    let rho = boundary_source(p);
    let al = alpha(n, p.period);
    let pre = 4.0 * k * eta * mu * rho / (a * phi0);
    let v = pre * (2.0 * k * (k * y).sin() - al * al * (a - y) * (k * y).cos());
    let tau = pre * mu * (k * a).cos();
    Ok((v, tau))
}

/// `psi_n = 4 kappa eta mu^2 rho beta_n / phi_0` per unit `g_n`.
pub fn psi_closed_form(n: i64, p: &SceneParameters) -> Result<C64> {
    let phi0 = resonance_checked_phi(0, p)?;
    let (_, be) = mode_wavenumbers(n, p);
    let k = p.wavenumber();
    Ok(4.0 * k * p.slab_wavenumber() * p.mu * p.mu * boundary_source(p) * be / phi0)
}

/// Composite Gauss-Legendre rule on `[lo, hi]`: `panels` panels of `order` nodes.
pub fn composite_gauss_legendre(lo: f64, hi: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for j in 0..panels {
        let (l, r) = (lo + j as f64 * h, lo + (j + 1) as f64 * h);
        for &(x, w) in rule.as_node_weight_pairs() {
            out.push((0.5 * (r - l) * x + 0.5 * (r + l), 0.5 * (r - l) * w));
        }
    }
    out
}

/// Default quadrature: 8 panels of 16 nodes on `[0, a]`.
pub const PSI_PANELS: usize = 8;
pub const PSI_ORDER: usize = 16;

/// `psi_n = mu int_0^a sin(beta_n y) v_1n(y) dy + sin(beta_n a) tau_1n`, by quadrature.
pub fn psi_quadrature(n: i64, p: &SceneParameters) -> Result<C64> {
    psi_quadrature_with(n, p, PSI_PANELS, PSI_ORDER)
}

pub fn psi_quadrature_with(n: i64, p: &SceneParameters, panels: usize, order: usize) -> Result<C64> {
    let (_, be) = mode_wavenumbers(n, p);
    let a = p.slab_bottom;
    let mut acc = C64::new(0.0, 0.0);
    for (y, w) in composite_gauss_legendre(0.0, a, panels, order) {
        let (v, _) = first_order_source(n, p, y)?;
        acc += w * (be * y).sin() * v;
    }
    let (_, tau) = first_order_source(n, p, a)?;
    Ok(p.mu * acc + (be * a).sin() * tau)
}

/// `sin(beta x) / beta`, continuous at `beta = 0`.
fn sin_over(be: C64, x: f64) -> C64 {
    if be.norm() * x.abs() < 1e-8 {
        C64::new(x, 0.0) * (1.0 - be * be * x * x / 6.0)
    } else {
        (be * x).sin() / be
    }
}

/// Interface data `(s_1n, t_1n)` of the first-order mode problem, by quadrature of the source.
pub fn first_order_interface_data(n: i64, p: &SceneParameters) -> Result<(C64, C64)> {
    let (_, be) = mode_wavenumbers(n, p);
    let a = p.slab_bottom;
    let mut s = C64::new(0.0, 0.0);
    let mut t = C64::new(0.0, 0.0);
    for (z, w) in composite_gauss_legendre(0.0, a, PSI_PANELS, PSI_ORDER) {
        let (v, _) = first_order_source(n, p, z)?;
        s += w * sin_over(be, a - z) * v;
        t += w * (be * (a - z)).cos() * v;
    }
    let (_, tau) = first_order_source(n, p, a)?;
    Ok((s, p.mu * t + tau))
}

/// Closed-form slab coefficients `(a_1n, b_1n)` of the first-order field.
pub fn first_order_coefficients(n: i64, p: &SceneParameters) -> Result<(C64, C64)> {
    let phi0 = resonance_checked_phi(0, p)?;
    let phin = resonance_checked_phi(n, p)?;
    let (_, be) = mode_wavenumbers(n, p);
    let (eta, ga) = slab_wavenumbers(n, p);
    let (b, mu) = (p.slab_top, p.mu);
    let k = p.wavenumber();
    let pre = -8.0 * k * eta * mu * mu * boundary_source(p) * be / (phi0 * phin);
    let a1 = pre * (ga + mu * be) * (-I * ga * b).exp();
    let b1 = pre * (ga - mu * be) * (I * ga * b).exp();
    Ok((a1, b1))
}

/// First-order trace `u_1n(b)` per unit `g_n`.
pub fn first_order_trace(n: i64, p: &SceneParameters) -> Result<C64> {
    let phi0 = resonance_checked_phi(0, p)?;
    let phin = resonance_checked_phi(n, p)?;
    let (_, be) = mode_wavenumbers(n, p);
    let (eta, ga) = slab_wavenumbers(n, p);
    let k = p.wavenumber();
    let mu = p.mu;
    Ok(-16.0 * k * eta * mu * mu * boundary_source(p) * be * ga / (phi0 * phin))
}

/// `Upsilon_n = -phi_0 phi_n / (16 kappa eta mu^2 rho beta_n gamma_n)`.
pub fn scaling_factor(n: i64, p: &SceneParameters) -> Result<C64> {
    let (be, ga) = check_degenerate(n, p)?;
    let phi0 = resonance_checked_phi(0, p)?;
    let phin = resonance_checked_phi(n, p)?;
    let k = p.wavenumber();
    let eta = p.slab_wavenumber();
    let mu = p.mu;
    Ok(-phi0 * phin / (16.0 * k * eta * mu * mu * boundary_source(p) * be * ga))
}

/// Scaling factors for `|n| <= band`; degenerate modes are listed instead of failing.
#[derive(Debug, Clone)]
pub struct ScalingFactors {
    pub parameters: SceneParameters,
    pub values: Vec<(i64, Option<C64>)>,
    pub skipped: Vec<i64>,
}

impl ScalingFactors {
    pub fn compute(band: usize, p: &SceneParameters) -> Result<Self> {
        let b = band as i64;
        let mut values = Vec::with_capacity(2 * band + 1);
        let mut skipped = Vec::new();
        for n in -b..=b {
            match scaling_factor(n, p) {
                Ok(v) => values.push((n, Some(v))),
                Err(SuperlensError::DegenerateMode { .. }) => {
                    skipped.push(n);
                    values.push((n, None));
                }
                Err(e) => return Err(e),
            }
        }
        Ok(ScalingFactors {
            parameters: *p,
            values,
            skipped,
        })
    }

    pub fn get(&self, n: i64) -> Option<C64> {
        self.values.iter().find(|(m, _)| *m == n).and_then(|(_, v)| *v)
    }
}

/// The five material rows of the experiment: `(1, 1)`, `(16, 1)`, `(-1, -1)`,
/// `(-1 + 0.05i, -0.97)`, `(-1 + 0.1i, -1.06)`.
pub fn experiment_parameter_sets() -> Vec<SceneParameters> {
    [
        (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        (C64::new(16.0, 0.0), C64::new(1.0, 0.0)),
        (C64::new(-1.0, 0.0), C64::new(-1.0, 0.0)),
        (C64::new(-1.0, 0.05), C64::new(-0.97, 0.0)),
        (C64::new(-1.0, 0.1), C64::new(-1.06, 0.0)),
    ]
    .into_iter()
    .map(|(e, m)| SceneParameters::experiment(e, m))
    .collect()
}

/// Marker for a mode that could not be evaluated in a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedMode {
    pub set: usize,
    pub n: i64,
    pub reason: String,
}

/// `|Upsilon_n|` for `n = 0..=n_max` and several parameter sets.
#[derive(Debug, Clone)]
pub struct UpsilonTable {
    pub n_max: usize,
    pub labels: Vec<String>,
    pub parameters: Vec<SceneParameters>,
    /// `moduli[set][n]`; `None` for skipped modes.
    pub moduli: Vec<Vec<Option<f64>>>,
    pub skipped: Vec<SkippedMode>,
}

pub fn upsilon_scan(n_max: usize, sets: &[SceneParameters]) -> Result<UpsilonTable> {
    let mut moduli = Vec::with_capacity(sets.len());
    let mut skipped = Vec::new();
    for (si, p) in sets.iter().enumerate() {
        p.validate()?;
        let mut col = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max as i64 {
            match scaling_factor(n, p) {
                Ok(v) => col.push(Some(v.norm())),
                Err(e @ (SuperlensError::DegenerateMode { .. } | SuperlensError::Resonance { .. })) => {
                    log::warn!("upsilon scan: set {si}, n = {n}: {e}");
                    skipped.push(SkippedMode {
                        set: si,
                        n,
                        reason: e.to_string(),
                    });
                    col.push(None);
                }
                Err(e) => return Err(e),
            }
        }
        moduli.push(col);
    }
    Ok(UpsilonTable {
        n_max,
        labels: sets.iter().map(|p| p.label()).collect(),
        parameters: sets.to_vec(),
        moduli,
        skipped,
    })
}

impl UpsilonTable {
    /// CSV: `n` then one `|Upsilon_n|` column per set; skipped cells read `skipped`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["n".to_string()];
        header.extend(self.labels.iter().cloned());
        wr.write_record(&header)?;
        for n in 0..=self.n_max {
            let mut row = vec![n.to_string()];
            for col in &self.moduli {
                row.push(match col[n] {
                    Some(v) => format!("{v:.16e}"),
                    None => "skipped".to_string(),
                });
            }
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn rho_modulus_is_two_kappa() {
        let p = SceneParameters::superlens();
        assert!((boundary_source(&p).norm() - 11.423973285781066).abs() < 1e-12);
    }

    #[test]
    fn determinant_matches_matrix() {
        for p in experiment_parameter_sets() {
            for n in 0..6 {
                let d = InterfaceSystem::new(n, &p).determinant();
                assert!(rel(d, interface_determinant(n, &p)) < 1e-12, "n={n} {}", p.label());
            }
        }
    }

    #[test]
    fn vacuum_and_perfect_lens_determinants() {
        let v = SceneParameters::vacuum();
        let s = SceneParameters::superlens();
        for n in 0..8 {
            let (_, be) = mode_wavenumbers(n, &v);
            let want = 4.0 * be * be * (-I * be * v.slab_top).exp();
            assert!(rel(interface_determinant(n, &v), want) < 1e-12);
            let want = -4.0 * be * be * (I * be * (s.slab_top - 2.0 * s.slab_bottom)).exp();
            assert!(rel(interface_determinant(n, &s), want) < 1e-12);
        }
    }

    #[test]
    fn vacuum_field_is_pec_mirror() {
        let f = zeroth_order_field(&SceneParameters::vacuum()).unwrap();
        let k = f.kappa;
        for i in 0..=20 {
            let y = 0.2 * i as f64 / 20.0;
            let want = C64::from_polar(1.0, -k * y) - C64::from_polar(1.0, k * y);
            assert!((f.eval(y) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn zeroth_order_is_continuous_and_vanishes_at_zero() {
        for p in experiment_parameter_sets() {
            let f = zeroth_order_field(&p).unwrap();
            assert_eq!(f.eval(0.0), C64::new(0.0, 0.0));
            let a = p.slab_bottom;
            let below = f.coefficients.c * C64::from_polar(1.0, f.kappa * a)
                + f.coefficients.d * C64::from_polar(1.0, -f.kappa * a);
            let above = f.coefficients.a * (I * f.eta * a).exp() + f.coefficients.b * (-I * f.eta * a).exp();
            assert!(rel(below, above) < 1e-12);
        }
        // b = 2a perfect lens: the field returns to zero at the measurement line
        assert!(zeroth_order_field(&SceneParameters::superlens()).unwrap().trace().norm() < 1e-12);
    }

    #[test]
    fn zeroth_order_matches_pivoted_solve() {
        for p in experiment_parameter_sets() {
            let f = zeroth_order_field(&p).unwrap();
            let x = solve_interface_system(0, &p, (p.mu * boundary_source(&p), C64::default(), C64::default()))
                .unwrap();
            for (u, v) in f.coefficients.as_array().iter().zip(x.as_array()) {
                assert!((u - v).norm() <= 1e-12 * v.norm().max(1.0));
            }
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let z = C64::default();
        let x = solve_interface_system(2, &SceneParameters::vacuum(), (z, z, z)).unwrap();
        assert!(x.as_array().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn source_special_values() {
        let p = SceneParameters::superlens();
        let (v, _) = first_order_source(7, &p, p.slab_bottom).unwrap();
        let (v0, _) = first_order_source(0, &p, p.slab_bottom).unwrap();
        assert!(rel(v, v0) < 1e-14);
        let (w0, _) = first_order_source(0, &p, 0.03).unwrap();
        let (w1, _) = first_order_source(0, &SceneParameters { period: 3.0, ..p }, 0.03).unwrap();
        assert!(rel(w0, w1) < 1e-14);
    }

    #[test]
    fn psi_forms_agree() {
        for p in experiment_parameter_sets() {
            for n in 0..=12 {
                let c = psi_closed_form(n, &p).unwrap();
                let q = psi_quadrature(n, &p).unwrap();
                assert!(rel(q, c) < 1e-8, "n={n}");
                assert!(rel(psi_closed_form(-n, &p).unwrap(), c) < 1e-15);
            }
        }
    }

    #[test]
    fn psi_quadrature_self_converges() {
        let p = SceneParameters::vacuum();
        let q1 = psi_quadrature_with(0, &p, 4, 16).unwrap();
        let q2 = psi_quadrature_with(0, &p, 8, 16).unwrap();
        assert!(rel(q1, q2) < 1e-12);
    }

    #[test]
    fn closure_and_first_order_oracle() {
        for p in experiment_parameter_sets() {
            for n in 0..=12 {
                let u1 = first_order_trace(n, &p).unwrap();
                let ups = scaling_factor(n, &p).unwrap();
                assert!((ups * u1 - 1.0).norm() < 1e-12);
            }
            for n in 0..=4 {
                let (s, t) = first_order_interface_data(n, &p).unwrap();
                let x = solve_interface_system(n, &p, (C64::default(), s, t)).unwrap();
                let (a1, b1) = first_order_coefficients(n, &p).unwrap();
                let scale = x.a.norm().max(x.b.norm());
                assert!((x.a - a1).norm() < 1e-10 * scale && (x.b - b1).norm() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn special_case_scaling_factors() {
        let v = SceneParameters::vacuum();
        let k = v.wavenumber();
        assert!((scaling_factor(0, &v).unwrap().norm() - 0.0875352187).abs() < 1e-10);
        for n in 1..=20 {
            let (_, be) = mode_wavenumbers(n, &v);
            let want = (be.norm() * v.slab_top).exp() / (2.0 * k);
            assert!((scaling_factor(n, &v).unwrap().norm() - want).abs() < 1e-12 * want);
        }
        let s = SceneParameters::superlens();
        for n in 0..=40 {
            assert!((scaling_factor(n, &s).unwrap().norm() - 1.0 / (2.0 * k)).abs() < 1e-12 / k);
        }
    }

    #[test]
    fn upsilon_is_even() {
        for p in experiment_parameter_sets() {
            for n in 1..10 {
                assert!(rel(scaling_factor(-n, &p).unwrap(), scaling_factor(n, &p).unwrap()) < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_mode_is_reported() {
        // kappa = 2 pi exactly: beta_1 = 0
        let p = SceneParameters {
            wavelength: 1.0,
            ..SceneParameters::vacuum()
        };
        assert!(matches!(scaling_factor(1, &p), Err(SuperlensError::DegenerateMode { n: 1, .. })));
        let t = upsilon_scan(3, &[p]).unwrap();
        assert_eq!(t.moduli[0][1], None);
        assert_eq!(t.skipped.len(), 1);
        let sf = ScalingFactors::compute(2, &p).unwrap();
        assert_eq!(sf.skipped, vec![-1, 1]);
    }

    #[test]
    fn upsilon_table_values_and_csv() {
        let t = upsilon_scan(20, &experiment_parameter_sets()).unwrap();
        let want = [
            (0usize, 0usize, 0.0875),
            (0, 10, 2.38e4),
            (1, 4, 7.41),
            (2, 20, 0.0875),
            (3, 8, 0.362),
            (4, 10, 20.2),
        ];
        for (s, n, v) in want {
            let got = t.moduli[s][n].unwrap();
            assert!((got - v).abs() < 0.01 * v, "set {s} n {n}: {got}");
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 22);
        assert!(text.lines().next().unwrap().starts_with("n,eps=1 mu=1,"));
    }
}
