use thiserror::Error;

/// Everything that can stop a command, with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] ultracc_core::Error),
    #[error("verification failed: {check}")]
    VerifyFailed { check: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;
pub const EXIT_REGIME: i32 = 5;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ultracc_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Numeric(E::InvalidLambda(_)) => EXIT_USAGE,
            CliError::Numeric(E::WrongRegime { .. }) => EXIT_REGIME,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::VerifyFailed { .. } => EXIT_VERIFY,
            // an unwritable --out path is a usage problem
            CliError::Io(_) => EXIT_USAGE,
            CliError::Csv(_) | CliError::Json(_) => EXIT_NUMERIC,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ultracc_core::Error as E;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(E::InvalidLambda(0.0)).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(E::WrongRegime { k1: 2, k2: 1 }).exit_code(), EXIT_REGIME);
        assert_eq!(CliError::from(E::ZeroLeadingCoefficient { index: 3 }).exit_code(), EXIT_NUMERIC);
        assert_eq!(CliError::from(E::NoConvergence { what: "x", iterations: 1 }).exit_code(), EXIT_NUMERIC);
        assert_eq!(CliError::VerifyFailed { check: "wave".into() }.exit_code(), EXIT_VERIFY);
        assert_eq!(EXIT_OK, 0);
        assert_eq!(EXIT_FLAGGED, 2);
    }
}
