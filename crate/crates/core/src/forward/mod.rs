//! Finite-difference solver for the full transformed problem.
//!
//! The corrugated region `f(x) < y < a` is flattened onto `0 < y < a`; the slab
//! `a < y < b` is untouched. Unknowns live on `Nx` periodic columns and
//! `Ny_omega + Ny_slab - 1` levels (the interface level is shared). The exact
//! transparent condition closes the problem at `y = b`.

mod assemble;
pub mod io;
mod profile;
mod solve;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SuperlensError};

pub use assemble::{
    assemble_system, transformed_coefficients, AssembledSystem, BlockTerms, Operator, OperatorSet,
    TransformedCoefficients,
};
pub use profile::{CosineTerm, Profile, ProfileSamples, ProfileShape};
pub use solve::{solve_total_field, trace_on_gamma_b, DiscreteField, SolveReport};

/// Tensor grid sizes. `ny_omega` and `ny_slab` count points including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny_omega: usize,
    pub ny_slab: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            nx: 256,
            ny_omega: 128,
            ny_slab: 128,
        }
    }
}

impl Grid {
    pub fn new(nx: usize, ny_omega: usize, ny_slab: usize) -> Result<Self> {
        let g = Grid { nx, ny_omega, ny_slab };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 4 || self.nx % 2 != 0 {
            return Err(SuperlensError::InvalidParameter(format!(
                "nx must be even and at least 4, got {}",
                self.nx
            )));
        }
        if self.ny_omega < 3 || self.ny_slab < 3 {
            return Err(SuperlensError::InvalidParameter(
                "each y segment needs at least 3 points".into(),
            ));
        }
        Ok(())
    }

    /// Number of y levels (the interface level is shared).
    pub fn levels(&self) -> usize {
        self.ny_omega + self.ny_slab - 1
    }

    /// Total unknown count, `Nx (Ny_omega + Ny_slab - 1)`.
    pub fn unknowns(&self) -> usize {
        self.nx * self.levels()
    }

    /// Largest mode band that the grid resolves, `Nx / 2 - 1`.
    pub fn resolvable_band(&self) -> usize {
        self.nx / 2 - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum XDerivative {
    /// Trigonometric differentiation on the periodic grid.
    #[default]
    Spectral,
    /// Second-order centred differences.
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub x_derivative: XDerivative,
    /// Slab loss `sigma`: the solve uses `eps + i sigma`.
    pub loss: f64,
    /// Block pivot ratio `min |u_ii| / max |u_ij|` below which a block counts as singular.
    pub pivot_tolerance: f64,
    /// Bound on the norm-wise backward error of the solution.
    pub residual_tolerance: f64,
}

/// Loss suggested when a block pivot is numerically singular.
pub const SUGGESTED_LOSS: f64 = 1e-8;

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            x_derivative: XDerivative::Spectral,
            loss: 0.0,
            pivot_tolerance: 1e-14,
            residual_tolerance: 1e-10,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let g = Grid::default();
        assert_eq!(g.levels(), 255);
        assert_eq!(g.unknowns(), 256 * 255);
        assert_eq!(g.resolvable_band(), 127);
        assert!(Grid::new(63, 10, 10).is_err());
        assert!(Grid::new(64, 2, 10).is_err());
    }
}
