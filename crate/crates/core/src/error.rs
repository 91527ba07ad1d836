use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value:e} s lies outside the acquisition window [0, {t_acq:e}] s")]
    OutsideWindow {
        what: &'static str,
        value: f64,
        t_acq: f64,
    },

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The scene carries no photons at all, so densities and means are undefined.
    #[error("total expected photon count is zero")]
    ZeroIntensity,

    /// The background accounts for every observed photon; the time of flight
    /// cannot be inverted.
    #[error("no signal: background fraction {alpha} is not below 1")]
    NoSignal { alpha: f64 },

    #[error("inversion is ill-conditioned: 1 - alpha = {one_minus_alpha:e}")]
    IllConditioned { one_minus_alpha: f64 },

    #[error("closed form is only available for rectangular pulses")]
    UnsupportedPulse,

    #[error("timestamp {ps} ps falls beyond the histogram range of {range_ps} ps")]
    OutOfRange { ps: u64, range_ps: u64 },

    #[error("histogram region holds no counts")]
    EmptyRegion,

    #[error("need at least 2 valid estimates, got {0}")]
    InsufficientTrials(usize),

    #[error("malformed input on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
