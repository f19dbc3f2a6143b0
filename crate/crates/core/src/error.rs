use thiserror::Error;

pub type Result<T> = std::result::Result<T, SuperlensError>;

#[derive(Debug, Error)]
pub enum SuperlensError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("aliasing: {samples} samples cannot resolve band |n| <= {band} (need at least {})", 2 * band + 1)]
    Aliasing { samples: usize, band: usize },

    #[error("degenerate mode n = {n}: |beta_n| = {beta:.3e}, |gamma_n| = {gamma:.3e}")]
    DegenerateMode { n: i64, beta: f64, gamma: f64 },

    #[error("resonant configuration at mode n = {n}: |phi_n| = {modulus:.3e}")]
    Resonance { n: i64, modulus: f64 },

    #[error("singular {size}x{size} system")]
    SingularSystem { size: usize },

    #[error("ill-conditioned block at y-level {level} (pivot ratio {pivot_ratio:.3e}, growth {growth:.3e}); retry with loss sigma = {suggested_loss:e}")]
    Conditioning {
        level: usize,
        pivot_ratio: f64,
        growth: f64,
        suggested_loss: f64,
    },

    #[error("linear residual {residual:.3e} exceeds {tolerance:.1e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("surface reaches the slab: a - f = {gap:.3e} at x = {x}")]
    ProfileIntersectsSlab { x: f64, gap: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SuperlensError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SuperlensError::InvalidParameter(_)
            | SuperlensError::Aliasing { .. }
            | SuperlensError::ProfileIntersectsSlab { .. }
            | SuperlensError::Config(_)
            | SuperlensError::Parse { .. }
            | SuperlensError::Json(_) => 2,
            SuperlensError::DegenerateMode { .. }
            | SuperlensError::Resonance { .. }
            | SuperlensError::SingularSystem { .. }
            | SuperlensError::Conditioning { .. }
            | SuperlensError::Residual { .. } => 3,
            SuperlensError::Io(_) | SuperlensError::Csv(_) => 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_categories() {
        assert_eq!(SuperlensError::Config("x".into()).exit_code(), 2);
        assert_eq!(SuperlensError::Resonance { n: 0, modulus: 0.0 }.exit_code(), 3);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(SuperlensError::from(io).exit_code(), 4);
    }

    #[test]
    fn aliasing_message_names_requirement() {
        let e = SuperlensError::Aliasing { samples: 10, band: 5 };
        assert!(e.to_string().contains("at least 11"));
    }
}
