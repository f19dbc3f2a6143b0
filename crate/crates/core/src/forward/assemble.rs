use std::f64::consts::TAU;

use faer::{Mat, MatRef};

use super::{Grid, Profile, SolverOptions, XDerivative};
use crate::analytic::boundary_source;
use crate::error::{Result, SuperlensError};
use crate::spectral::{alpha, mode_wavenumbers, periodic_grid, SceneParameters, C64};

/// Coefficients of the flattened operator
/// `c1 u_xx + c2 u_yy + c3 u_xy + c4 u_y + c1 kappa^2 u` on the levels of `[0, a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedCoefficients {
    /// Transformed `y` of each level.
    pub y: Vec<f64>,
    /// `c[j][i]`: level `j`, column `i`.
    pub c1: Vec<Vec<f64>>,
    pub c2: Vec<Vec<f64>>,
    pub c3: Vec<Vec<f64>>,
    pub c4: Vec<Vec<f64>>,
}

pub fn transformed_coefficients(profile: &Profile, p: &SceneParameters, grid: &Grid) -> Result<TransformedCoefficients> {
    grid.validate()?;
    profile.validate_for(p)?;
    let x = periodic_grid(grid.nx, p.period);
    let s = profile.samples(&x, grid.nx);
    let a = p.slab_bottom;
    if let Some((i, gap)) = s
        .f
        .iter()
        .map(|f| a - f)
        .enumerate()
        .find(|(_, g)| *g <= 0.0)
    {
        return Err(SuperlensError::ProfileIntersectsSlab { x: x[i], gap });
    }
    let h = a / (grid.ny_omega - 1) as f64;
    let y: Vec<f64> = (0..grid.ny_omega).map(|j| j as f64 * h).collect();
    let mut out = TransformedCoefficients {
        y: y.clone(),
        c1: Vec::with_capacity(y.len()),
        c2: Vec::with_capacity(y.len()),
        c3: Vec::with_capacity(y.len()),
        c4: Vec::with_capacity(y.len()),
    };
    for &yj in &y {
        let w = a - yj;
        let mut c1 = vec![0.0; grid.nx];
        let mut c2 = vec![0.0; grid.nx];
        let mut c3 = vec![0.0; grid.nx];
        let mut c4 = vec![0.0; grid.nx];
        for i in 0..grid.nx {
            let (f, fp, fpp) = (s.f[i], s.df[i], s.d2f[i]);
            c1[i] = (a - f) * (a - f);
            c2[i] = (w * fp) * (w * fp) + a * a;
            c3[i] = -2.0 * w * (a - f) * fp;
            c4[i] = -w * ((a - f) * fpp + 2.0 * fp * fp);
        }
        out.c1.push(c1);
        out.c2.push(c2);
        out.c3.push(c3);
        out.c4.push(c4);
    }
    Ok(out)
}

/// Nx x Nx operators acting along one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Identity,
    /// First x-derivative.
    D1,
    /// Second x-derivative.
    D2,
    /// Dirichlet-to-Neumann map at the top boundary.
    Dtn,
}

/// Dense matrices of the x-operators.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub d1: Mat<C64>,
    pub d2: Mat<C64>,
    pub dtn: Mat<C64>,
}

fn circulant(nx: usize, col: &[C64]) -> Mat<C64> {
    Mat::from_fn(nx, nx, |i, k| col[(i + nx - k) % nx])
}

/// First column of the circulant with Fourier symbol `s(n)`, `n = -Nx/2 .. Nx/2 - 1`.
fn spectral_column(nx: usize, symbol: impl Fn(i64) -> C64) -> Vec<C64> {
    let half = (nx / 2) as i64;
    let sym: Vec<(i64, C64)> = (-half..half).map(|n| (n, symbol(n))).collect();
    (0..nx)
        .map(|m| {
            sym.iter()
                .map(|&(n, s)| s * C64::from_polar(1.0, TAU * (n * m as i64) as f64 / nx as f64))
                .sum::<C64>()
                / nx as f64
        })
        .collect()
}

impl OperatorSet {
    pub fn new(nx: usize, p: &SceneParameters, kind: XDerivative) -> Self {
        let half = (nx / 2) as i64;
        let l = p.period;
        let dtn = circulant(
            nx,
            &spectral_column(nx, |n| {
                if n == -half {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(0.0, 1.0) * mode_wavenumbers(n, p).1
                }
            }),
        );
        let (d1, d2) = match kind {
            XDerivative::Spectral => (
                circulant(
                    nx,
                    &spectral_column(nx, |n| {
                        if n == -half {
                            C64::new(0.0, 0.0)
                        } else {
                            C64::new(0.0, alpha(n, l))
                        }
                    }),
                ),
                circulant(nx, &spectral_column(nx, |n| C64::new(-alpha(n, l).powi(2), 0.0))),
            ),
            XDerivative::Centered => {
                let h = l / nx as f64;
                let mut c1 = vec![C64::new(0.0, 0.0); nx];
                c1[1] = C64::new(-0.5 / h, 0.0);
                c1[nx - 1] = C64::new(0.5 / h, 0.0);
                let mut c2 = vec![C64::new(0.0, 0.0); nx];
                c2[0] = C64::new(-2.0 / (h * h), 0.0);
                c2[1] = C64::new(1.0 / (h * h), 0.0);
                c2[nx - 1] = C64::new(1.0 / (h * h), 0.0);
                (circulant(nx, &c1), circulant(nx, &c2))
            }
        };
        OperatorSet { d1, d2, dtn }
    }

    pub fn get(&self, op: Operator) -> Option<&Mat<C64>> {
        match op {
            Operator::Identity => None,
            Operator::D1 => Some(&self.d1),
            Operator::D2 => Some(&self.d2),
            Operator::Dtn => Some(&self.dtn),
        }
    }
}

/// A block `sum_k diag(w_k) Op_k`.
#[derive(Debug, Clone, Default)]
pub struct BlockTerms {
    pub terms: Vec<(Vec<C64>, Operator)>,
}

impl BlockTerms {
    fn push(&mut self, w: Vec<C64>, op: Operator) {
        self.terms.push((w, op));
    }

    fn uniform(nx: usize, w: C64, op: Operator) -> Self {
        BlockTerms {
            terms: vec![(vec![w; nx], op)],
        }
    }

    /// Dense Nx x Nx matrix of the block.
    pub fn materialize(&self, ops: &OperatorSet, nx: usize) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(nx, nx);
        for (w, op) in &self.terms {
            match ops.get(*op) {
                None => {
                    for i in 0..nx {
                        m[(i, i)] += w[i];
                    }
                }
                Some(o) => {
                    for k in 0..nx {
                        for i in 0..nx {
                            m[(i, k)] += w[i] * o[(i, k)];
                        }
                    }
                }
            }
        }
        m
    }

    /// `sum_k diag(w_k) (Op_k x)` without materializing the block.
    pub fn apply(&self, ops: &OperatorSet, x: MatRef<'_, C64>) -> Mat<C64> {
        let (n, m) = (x.nrows(), x.ncols());
        let mut out = Mat::<C64>::zeros(n, m);
        for (w, op) in &self.terms {
            let y = match ops.get(*op) {
                None => x.to_owned(),
                Some(o) => o * x,
            };
            for c in 0..m {
                for i in 0..n {
                    out[(i, c)] += w[i] * y[(i, c)];
                }
            }
        }
        out
    }
}

/// One block row: coupling to the level below, the level itself and the level above.
#[derive(Debug, Clone, Default)]
pub struct BlockRow {
    pub lower: Option<BlockTerms>,
    pub diag: BlockTerms,
    pub upper: Option<BlockTerms>,
}

/// The block-tridiagonal system in structured form.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub grid: Grid,
    /// Scene used for the solve (loss already applied).
    pub scene: SceneParameters,
    pub ops: OperatorSet,
    pub rows: Vec<BlockRow>,
    /// Right-hand side per level.
    pub rhs: Vec<Vec<C64>>,
    /// Transformed `y` of every level.
    pub y: Vec<f64>,
    pub interface_level: usize,
}

impl AssembledSystem {
    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    pub fn row_count(&self) -> usize {
        self.grid.nx * self.levels()
    }

    /// `A u` level by level; `u[j]` is the field on level `j`.
    pub fn apply(&self, u: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let nx = self.grid.nx;
        let col = |v: &Vec<C64>| Mat::from_fn(nx, 1, |i, _| v[i]);
        let mut out = Vec::with_capacity(self.levels());
        for (j, row) in self.rows.iter().enumerate() {
            let mut acc = row.diag.apply(&self.ops, col(&u[j]).as_ref());
            if let Some(l) = &row.lower {
                acc += l.apply(&self.ops, col(&u[j - 1]).as_ref());
            }
            if let Some(up) = &row.upper {
                acc += up.apply(&self.ops, col(&u[j + 1]).as_ref());
            }
            out.push((0..nx).map(|i| acc[(i, 0)]).collect());
        }
        out
    }
}

/// Builds the discrete system for the given profile and scene.
pub fn assemble_system(
    profile: &Profile,
    p: &SceneParameters,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<AssembledSystem> {
    p.validate()?;
    let coef = transformed_coefficients(profile, p, grid)?;
    let scene = p.with_loss(opts.loss);
    let nx = grid.nx;
    let (pn, qn) = (grid.ny_omega, grid.ny_slab);
    let a = p.slab_bottom;
    let ho = a / (pn - 1) as f64;
    let hs = (p.slab_top - a) / (qn - 1) as f64;
    let k2 = p.wavenumber().powi(2);
    let eta2 = k2 * scene.eps * scene.mu;
    let mu = scene.mu;
    let levels = grid.levels();
    let jf = pn - 1;
    let top = levels - 1;
    let ops = OperatorSet::new(nx, &scene, opts.x_derivative);
    let re = |v: Vec<f64>| -> Vec<C64> { v.into_iter().map(|x| C64::new(x, 0.0)).collect() };
    let one = C64::new(1.0, 0.0);

    let mut rows = Vec::with_capacity(levels);
    rows.push(BlockRow {
        lower: None,
        diag: BlockTerms::uniform(nx, one, Operator::Identity),
        upper: None,
    });
    let s = 1.0 / (a * a);
    for j in 1..jf {
        let (c1, c2, c3, c4) = (&coef.c1[j], &coef.c2[j], &coef.c3[j], &coef.c4[j]);
        let mut diag = BlockTerms::default();
        diag.push(re(c1.iter().map(|v| s * v).collect()), Operator::D2);
        diag.push(
            re((0..nx).map(|i| s * (-2.0 * c2[i] / (ho * ho) + c1[i] * k2)).collect()),
            Operator::Identity,
        );
        let mut upper = BlockTerms::default();
        upper.push(
            re((0..nx).map(|i| s * (c2[i] / (ho * ho) + c4[i] / (2.0 * ho))).collect()),
            Operator::Identity,
        );
        let mut lower = BlockTerms::default();
        lower.push(
            re((0..nx).map(|i| s * (c2[i] / (ho * ho) - c4[i] / (2.0 * ho))).collect()),
            Operator::Identity,
        );
        if c3.iter().any(|v| *v != 0.0) {
            upper.push(re(c3.iter().map(|v| s * v / (2.0 * ho)).collect()), Operator::D1);
            lower.push(re(c3.iter().map(|v| -s * v / (2.0 * ho)).collect()), Operator::D1);
        }
        rows.push(BlockRow {
            lower: Some(lower),
            diag,
            upper: Some(upper),
        });
    }

    // interface: (1 - f/a) d_y^+ u = mu d_y^- u, one-sided differences corrected with the PDE
    {
        let c1n: Vec<f64> = coef.c1[jf].iter().map(|v| v / (a * a)).collect();
        let w: Vec<f64> = coef.c1[jf].iter().map(|v| v.sqrt() / a).collect();
        let mut diag = BlockTerms::default();
        diag.push(
            (0..nx).map(|i| w[i] * hs / 2.0 + mu * ho / 2.0 * c1n[i]).collect(),
            Operator::D2,
        );
        diag.push(
            (0..nx)
                .map(|i| w[i] * (-1.0 / hs + hs / 2.0 * eta2) - mu / ho + mu * ho / 2.0 * c1n[i] * k2)
                .collect(),
            Operator::Identity,
        );
        rows.push(BlockRow {
            lower: Some(BlockTerms::uniform(nx, mu / ho, Operator::Identity)),
            diag,
            upper: Some(BlockTerms {
                terms: vec![(re(w.iter().map(|v| v / hs).collect()), Operator::Identity)],
            }),
        });
    }

    for _ in jf + 1..top {
        let mut diag = BlockTerms::uniform(nx, one, Operator::D2);
        diag.push(vec![-2.0 / (hs * hs) + eta2; nx], Operator::Identity);
        rows.push(BlockRow {
            lower: Some(BlockTerms::uniform(nx, C64::new(1.0 / (hs * hs), 0.0), Operator::Identity)),
            diag,
            upper: Some(BlockTerms::uniform(nx, C64::new(1.0 / (hs * hs), 0.0), Operator::Identity)),
        });
    }

    // top: d_y^- u = mu (T u + rho)
    {
        let mut diag = BlockTerms::uniform(nx, 1.0 / hs - hs / 2.0 * eta2, Operator::Identity);
        diag.push(vec![C64::new(-hs / 2.0, 0.0); nx], Operator::D2);
        diag.push(vec![-mu; nx], Operator::Dtn);
        rows.push(BlockRow {
            lower: Some(BlockTerms::uniform(nx, C64::new(-1.0 / hs, 0.0), Operator::Identity)),
            diag,
            upper: None,
        });
    }

    let mut rhs = vec![vec![C64::new(0.0, 0.0); nx]; levels];
    rhs[top] = vec![mu * boundary_source(p); nx];
    let mut y = coef.y.clone();
    y.extend((1..qn).map(|j| a + j as f64 * hs));
    Ok(AssembledSystem {
        grid: *grid,
        scene,
        ops,
        rows,
        rhs,
        y,
        interface_level: jf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_coefficients_reduce_to_helmholtz() {
        let p = SceneParameters::superlens();
        let g = Grid::new(16, 9, 9).unwrap();
        let c = transformed_coefficients(&Profile::flat(), &p, &g).unwrap();
        let a2 = p.slab_bottom.powi(2);
        for j in 0..9 {
            for i in 0..16 {
                assert_eq!(c.c1[j][i], a2);
                assert_eq!(c.c2[j][i], a2);
                assert_eq!(c.c3[j][i], 0.0);
                assert_eq!(c.c4[j][i], 0.0);
            }
        }
    }

    #[test]
    fn top_level_has_no_geometric_terms() {
        let p = SceneParameters::superlens();
        let g = Grid::new(32, 9, 9).unwrap();
        let c = transformed_coefficients(&Profile::smooth(0.01), &p, &g).unwrap();
        let a2 = p.slab_bottom.powi(2);
        for i in 0..32 {
            assert!((c.c2[8][i] - a2).abs() < 1e-18);
            assert_eq!(c.c3[8][i], 0.0);
            assert_eq!(c.c4[8][i], 0.0);
        }
        // x = 0 is a crest of the smooth profile: f' = 0 there
        let f0 = 0.01 * 0.9;
        assert!((c.c1[0][0] - (p.slab_bottom - f0).powi(2)).abs() < 1e-15);
        assert!(c.c3[0][0].abs() < 1e-15);
    }

    #[test]
    fn spectral_operators_act_on_modes() {
        let p = SceneParameters::vacuum();
        let nx = 16;
        let ops = OperatorSet::new(nx, &p, XDerivative::Spectral);
        let x = periodic_grid(nx, 1.0);
        for n in [-7i64, -3, 0, 2, 5, 7] {
            let al = alpha(n, 1.0);
            let u = Mat::from_fn(nx, 1, |i, _| C64::from_polar(1.0, al * x[i]));
            let d1 = &ops.d1 * &u;
            let d2 = &ops.d2 * &u;
            let t = &ops.dtn * &u;
            let beta = mode_wavenumbers(n, &p).1;
            for i in 0..nx {
                assert!((d1[(i, 0)] - C64::new(0.0, al) * u[(i, 0)]).norm() < 1e-12);
                assert!((d2[(i, 0)] + al * al * u[(i, 0)]).norm() < 1e-10);
                assert!((t[(i, 0)] - C64::new(0.0, 1.0) * beta * u[(i, 0)]).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn centered_operators_match_stencil() {
        let p = SceneParameters::vacuum();
        let ops = OperatorSet::new(8, &p, XDerivative::Centered);
        let h = 1.0 / 8.0;
        assert_eq!(ops.d1[(2, 3)], C64::new(0.5 / h, 0.0));
        assert_eq!(ops.d1[(2, 1)], C64::new(-0.5 / h, 0.0));
        assert_eq!(ops.d1[(0, 7)], C64::new(-0.5 / h, 0.0));
        assert_eq!(ops.d2[(4, 4)], C64::new(-2.0 / (h * h), 0.0));
        assert_eq!(ops.d2[(7, 0)], C64::new(1.0 / (h * h), 0.0));
    }

    #[test]
    fn system_shape() {
        let p = SceneParameters::superlens();
        let g = Grid::new(16, 9, 7).unwrap();
        let s = assemble_system(&Profile::smooth(0.01), &p, &g, &SolverOptions::default()).unwrap();
        assert_eq!(s.levels(), 15);
        assert_eq!(s.row_count(), 16 * 15);
        assert_eq!(s.interface_level, 8);
        assert!((s.y[8] - 0.1).abs() < 1e-15 && (s.y[14] - 0.2).abs() < 1e-15);
        let b = s.rows[3].upper.as_ref().unwrap();
        let dense = b.materialize(&s.ops, 16);
        let v = Mat::from_fn(16, 1, |i, _| C64::new(i as f64, 0.5));
        let lhs = &dense * &v;
        let rhs = b.apply(&s.ops, v.as_ref());
        for i in 0..16 {
            assert!((lhs[(i, 0)] - rhs[(i, 0)]).norm() < 1e-9);
        }
    }
}
