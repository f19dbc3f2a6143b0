//! Quick oracle and property checks behind the `validate` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{
    experiment_parameter_sets, first_order_trace, interface_determinant, psi_closed_form, psi_quadrature,
    scaling_factor, zeroth_order_field, InterfaceSystem,
};
use crate::forward::{solve_total_field, trace_on_gamma_b, Grid, Profile, SolverOptions};
use crate::spectral::{branch_sqrt, mode_wavenumbers, SceneParameters, C64};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: worst <= tol,
        detail: format!("worst {worst:.3e}, tolerance {tol:.1e}"),
    }
}

/// Runs the checks; `draws` sets the size of the random branch test.
pub fn run_validation(draws: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let sets = experiment_parameter_sets();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let z = C64::new(rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3));
        let w = branch_sqrt(z);
        let mut e = (w * w - z).norm() / z.norm();
        if w.im.atan2(w.re) < 0.0 {
            e = f64::INFINITY;
        }
        worst = worst.max(e);
    }
    out.push(check("branch_sqrt squares back with arg in [0, pi)", worst, 1e-14));

    let mut worst: f64 = 0.0;
    for p in &sets {
        for n in 0..=12 {
            let d = InterfaceSystem::new(n, p).determinant();
            let c = interface_determinant(n, p);
            worst = worst.max((d - c).norm() / c.norm());
        }
    }
    out.push(check("closed-form determinant equals 4x4 determinant", worst, 1e-12));

    let mut worst: f64 = 0.0;
    for p in &sets {
        for n in 0..=12 {
            if let (Ok(c), Ok(q)) = (psi_closed_form(n, p), psi_quadrature(n, p)) {
                worst = worst.max((c - q).norm() / c.norm());
            } else {
                worst = f64::INFINITY;
            }
        }
    }
    out.push(check("psi closed form equals quadrature", worst, 1e-8));

    let mut worst: f64 = 0.0;
    for p in &sets {
        for n in 0..=12 {
            match (scaling_factor(n, p), first_order_trace(n, p)) {
                (Ok(u), Ok(t)) => worst = worst.max((u * t - 1.0).norm()),
                _ => worst = f64::INFINITY,
            }
        }
    }
    out.push(check("Upsilon_n u1_n(b) = 1", worst, 1e-12));

    let v = SceneParameters::vacuum();
    let k = v.wavenumber();
    let mut worst: f64 = 0.0;
    for n in 0..=20 {
        let (_, be) = mode_wavenumbers(n, &v);
        let want = if be.im == 0.0 { 1.0 / (2.0 * k) } else { (be.im * v.slab_top).exp() / (2.0 * k) };
        worst = worst.max(scaling_factor(n, &v).map_or(f64::INFINITY, |u| (u.norm() - want).abs() / want));
    }
    let s = SceneParameters::superlens();
    for n in 0..=40 {
        worst = worst.max(scaling_factor(n, &s).map_or(f64::INFINITY, |u| (u.norm() * 2.0 * k - 1.0).abs()));
    }
    out.push(check("special-case |Upsilon_n|", worst, 1e-12));

    let mut worst: f64 = 0.0;
    let f = zeroth_order_field(&v);
    for i in 0..=50 {
        let y = v.slab_top * i as f64 / 50.0;
        let want = C64::from_polar(1.0, -k * y) - C64::from_polar(1.0, k * y);
        worst = worst.max(f.as_ref().map_or(f64::INFINITY, |f| (f.eval(y) - want).norm()));
    }
    out.push(check("vacuum zeroth-order field is the PEC mirror", worst, 1e-12));

    let mut worst: f64 = 0.0;
    for p in &sets {
        let z = zeroth_order_field(p).map(|z| z.trace());
        let sol = solve_total_field(&Profile::flat(), p, &Grid { nx: 8, ny_omega: 65, ny_slab: 65 }, &SolverOptions::default());
        match (z, sol) {
            (Ok(z), Ok(f)) => {
                let t = trace_on_gamma_b(&f);
                let scale = zeroth_order_field(p).map(|f| f.eval(p.slab_bottom).norm()).unwrap_or(1.0);
                worst = worst.max(t.iter().map(|u| (u - z).norm() / scale).fold(0.0, f64::max));
            }
            _ => worst = f64::INFINITY,
        }
    }
    out.push(check("flat forward solve matches analytic trace (65 levels per segment)", worst, 5e-3));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_suite_passes() {
        let r = run_validation(10_000);
        for c in &r {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(r.len(), 7);
    }
}
