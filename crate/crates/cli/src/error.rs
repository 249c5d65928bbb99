use minsurf::classical::ClassicalError;
use minsurf::curve::CurveError;
use minsurf::mesh::MeshError;
use minsurf::registration::RegistrationError;
use minsurf::shiffkdv::ShiffError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad configuration, 3 for numeric failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) | CliError::Json(_) => 4,
        }
    }
}

macro_rules! numeric_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numeric(e.to_string())
            }
        }
    )*};
}

numeric_from!(ClassicalError, CurveError, RegistrationError, ShiffError);

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::Io(io) => CliError::Io(io),
            MeshError::InvalidParameter(s) => CliError::Config(s),
            other => CliError::Numeric(other.to_string()),
        }
    }
}
