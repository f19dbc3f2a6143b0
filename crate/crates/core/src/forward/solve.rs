use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::Serialize;

use super::{assemble_system, AssembledSystem, Grid, Profile, SolverOptions, SUGGESTED_LOSS};
use crate::error::{Result, SuperlensError};
use crate::spectral::{periodic_grid, SceneParameters, C64};

/// Diagnostics of one block elimination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    /// Largest `max|U| / max|S|` over the block pivots `S_j = L U`.
    pub pivot_growth: f64,
    /// Smallest `min|u_ii| / max|u_ij|` over the block pivots.
    pub min_pivot_ratio: f64,
    pub min_pivot_level: usize,
    /// `||b - A u|| / (||A|| ||u|| + ||b||)` in the infinity norm.
    pub backward_error: f64,
    pub loss: f64,
}

/// Total field on the flattened grid, stored level by level.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub scene: SceneParameters,
    pub grid: Grid,
    pub profile: Profile,
    /// Transformed `y` of each level.
    pub y: Vec<f64>,
    /// `values[j][i]`: level `j`, column `x_i = i Lambda / Nx`.
    pub values: Vec<Vec<C64>>,
    pub report: SolveReport,
}

impl DiscreteField {
    pub fn x(&self) -> Vec<f64> {
        periodic_grid(self.grid.nx, self.scene.period)
    }
}

fn max_abs(m: &Mat<C64>) -> f64 {
    let mut v: f64 = 0.0;
    for k in 0..m.ncols() {
        for i in 0..m.nrows() {
            v = v.max(m[(i, k)].norm());
        }
    }
    v
}

fn row_abs_sums(m: &Mat<C64>, acc: &mut [f64]) {
    for k in 0..m.ncols() {
        for (i, a) in acc.iter_mut().enumerate() {
            *a += m[(i, k)].norm();
        }
    }
}

/// Block-tridiagonal elimination (block Thomas) with dense partially pivoted block LU.
pub(crate) fn solve_assembled(sys: &AssembledSystem, opts: &SolverOptions) -> Result<(Vec<Vec<C64>>, SolveReport)> {
    let nx = sys.grid.nx;
    let levels = sys.levels();
    let mut xs: Vec<Mat<C64>> = Vec::with_capacity(levels);
    let mut ys: Vec<Mat<C64>> = Vec::with_capacity(levels);
    let mut growth: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    let mut min_level = 0;
    let mut a_norm: f64 = 0.0;
    for (j, row) in sys.rows.iter().enumerate() {
        let mut s = row.diag.materialize(&sys.ops, nx);
        let mut sums = vec![0.0; nx];
        row_abs_sums(&s, &mut sums);
        let mut r = Mat::from_fn(nx, 1, |i, _| sys.rhs[j][i]);
        if let Some(lower) = &row.lower {
            row_abs_sums(&lower.materialize(&sys.ops, nx), &mut sums);
            s -= lower.apply(&sys.ops, xs[j - 1].as_ref());
            r -= lower.apply(&sys.ops, ys[j - 1].as_ref());
        }
        let s_max = max_abs(&s);
        let lu = s.partial_piv_lu();
        let u = lu.U();
        let mut u_max: f64 = 0.0;
        let mut d_min = f64::INFINITY;
        for k in 0..nx {
            d_min = d_min.min(u[(k, k)].norm());
            for i in 0..=k {
                u_max = u_max.max(u[(i, k)].norm());
            }
        }
        let ratio = if u_max > 0.0 { d_min / u_max } else { 0.0 };
        if s_max > 0.0 {
            growth = growth.max(u_max / s_max);
        }
        if ratio < min_ratio {
            min_ratio = ratio;
            min_level = j;
        }
        if !(ratio >= opts.pivot_tolerance) {
            return Err(SuperlensError::Conditioning {
                level: j,
                pivot_ratio: ratio,
                growth,
                suggested_loss: SUGGESTED_LOSS,
            });
        }
        match &row.upper {
            Some(up) => {
                let c = up.materialize(&sys.ops, nx);
                row_abs_sums(&c, &mut sums);
                xs.push(lu.solve(&c));
            }
            None => xs.push(Mat::zeros(nx, nx)),
        }
        ys.push(lu.solve(&r));
        a_norm = a_norm.max(sums.iter().cloned().fold(0.0, f64::max));
    }
    let mut u: Vec<Mat<C64>> = vec![Mat::zeros(0, 0); levels];
    u[levels - 1] = ys[levels - 1].clone();
    for j in (0..levels - 1).rev() {
        let next = &xs[j] * &u[j + 1];
        u[j] = &ys[j] - &next;
    }
    let u: Vec<Vec<C64>> = u.iter().map(|m| (0..nx).map(|i| m[(i, 0)]).collect()).collect();

    let au = sys.apply(&u);
    let mut r_norm: f64 = 0.0;
    let mut b_norm: f64 = 0.0;
    let mut u_norm: f64 = 0.0;
    for j in 0..levels {
        for i in 0..nx {
            r_norm = r_norm.max((sys.rhs[j][i] - au[j][i]).norm());
            b_norm = b_norm.max(sys.rhs[j][i].norm());
            u_norm = u_norm.max(u[j][i].norm());
        }
    }
    let denom = a_norm * u_norm + b_norm;
    let backward_error = if denom > 0.0 { r_norm / denom } else { 0.0 };
    let report = SolveReport {
        pivot_growth: growth,
        min_pivot_ratio: min_ratio,
        min_pivot_level: min_level,
        backward_error,
        loss: opts.loss,
    };
    if !(backward_error <= opts.residual_tolerance) {
        return Err(SuperlensError::Residual {
            residual: backward_error,
            tolerance: opts.residual_tolerance,
        });
    }
    Ok((u, report))
}

/// Assembles and solves the full problem for one profile.
pub fn solve_total_field(
    profile: &Profile,
    p: &SceneParameters,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<DiscreteField> {
    let sys = assemble_system(profile, p, grid, opts)?;
    let (values, report) = solve_assembled(&sys, opts)?;
    log::debug!(
        "forward solve {}x{}: growth {:.3e}, min pivot ratio {:.3e} at level {}, backward error {:.3e}",
        grid.nx,
        grid.levels(),
        report.pivot_growth,
        report.min_pivot_ratio,
        report.min_pivot_level,
        report.backward_error
    );
    Ok(DiscreteField {
        scene: *p,
        grid: *grid,
        profile: profile.clone(),
        y: sys.y,
        values,
        report,
    })
}

/// Field values on the measurement line `y = b` (the top level).
pub fn trace_on_gamma_b(field: &DiscreteField) -> Vec<C64> {
    field.values.last().cloned().unwrap_or_default()
}
