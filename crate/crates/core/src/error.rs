use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("pole at (x, y, t) = ({x}, {y}, {t})")]
    Pole { x: f64, y: f64, t: f64 },
    #[error("tau function is identically zero")]
    ZeroTau,
    #[error("seed is not holomorphic: {0}")]
    NotHolomorphic(String),
    #[error("seed does not satisfy p_t = p_zzz: {0}")]
    NotOnFlow(String),
    #[error("degenerate seed: {0}")]
    DegenerateSeed(String),
    #[error("integrand is not closed: {0}")]
    NotClosed(String),
    #[error("tau function is not affine in t")]
    NotAffineInT,
    #[error("no blow-up: {0}")]
    NoBlowup(String),
    #[error("function is not in the kernel: {0}")]
    NotInKernel(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("superposition divisor lambda is identically zero")]
    ZeroLambda,
    #[error("no integration constant satisfies the pairing identity: {0}")]
    PairingFailure(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("constant fit failed: {0}")]
    FitFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used in structured CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroDenominator => "ZeroDenominator",
            Error::Pole { .. } => "PoleError",
            Error::ZeroTau => "ZeroTau",
            Error::NotHolomorphic(_) => "NotHolomorphic",
            Error::NotOnFlow(_) => "NotOnFlow",
            Error::DegenerateSeed(_) => "DegenerateSeed",
            Error::NotClosed(_) => "NotClosed",
            Error::NotAffineInT => "NotAffineInT",
            Error::NoBlowup(_) => "NoBlowup",
            Error::NotInKernel(_) => "NotInKernel",
            Error::Unsupported(_) => "Unsupported",
            Error::ZeroLambda => "ZeroLambda",
            Error::PairingFailure(_) => "PairingFailure",
            Error::InvalidParams(_) => "InvalidParams",
            Error::Parse(_) => "ParseError",
            Error::FitFailure(_) => "FitFailure",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
            Error::Csv(_) => "CsvError",
        }
    }
}
