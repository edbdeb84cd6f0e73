use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("configuration error at `{key}`: {message}")]
    Semantic { key: String, message: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tilt {delta_theta} rad exceeds the small-angle cutoff of {limit} rad")]
    AngleOutOfRange { delta_theta: f64, limit: f64 },

    #[error("grid step {step:e} exceeds the sampling limit {max_step:e}")]
    GridTooCoarse { step: f64, max_step: f64 },

    #[error("sampled domain [{start:e}, {end:e}] does not match the expected [{expected_start:e}, {expected_end:e}]")]
    DomainMismatch {
        start: f64,
        end: f64,
        expected_start: f64,
        expected_end: f64,
    },

    #[error("imaginary residue {residue:e} exceeds 1e-10 of the Wigner scale {scale:e}")]
    ImaginaryResidueTooLarge { residue: f64, scale: f64 },

    #[error("evaluation point {value:e} outside the sampled support [{min:e}, {max:e}]")]
    SupportExceeded { value: f64, min: f64, max: f64 },

    #[error("beams must share one waist ({a:e} m vs {b:e} m)")]
    WaistMismatch { a: f64, b: f64 },

    #[error("Wigner function has no positive maximum")]
    NoPeaks,

    #[error("frequency shift {shift:e} rad/s pushes the state off the sampled grid")]
    ShiftExceedsGrid { shift: f64 },

    #[error("phase-space point ({tau:e} s, {omega:e} rad/s) is outside the grid")]
    PointOffGrid { tau: f64, omega: f64 },

    #[error("beam spot {position:e} m leaves the usable window of ±{limit:e} m")]
    BeamLeavesDevice { position: f64, limit: f64 },

    #[error("refusing to serialize non-finite value in {what}")]
    RejectedValue { what: String },

    #[error("{path}: line {line}: {message}")]
    Table {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the scenario description rather than numerics or I/O.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::Semantic { .. }
                | Error::InvalidParameter { .. }
                | Error::Table { .. }
                | Error::AngleOutOfRange { .. }
        )
    }
}
