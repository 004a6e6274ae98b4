use std::fmt;

/// Failure of a command, mapped to the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration, or bad flags.
    Config(String),
    /// The engine could not produce a result.
    Numeric(String),
    /// Reproduced values fall outside tolerance of the published ones.
    ReproductionDiff(String),
    /// Output could not be written.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::ReproductionDiff(_) => 4,
        }
    }

    pub fn config(e: powerbasket::Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// Usage and domain errors are configuration problems; everything else
    /// is a numeric failure.
    pub fn engine(e: powerbasket::Error) -> Self {
        use powerbasket::Error as E;
        match e {
            E::Usage(_) | E::Domain(_) => CliError::Config(e.to_string()),
            E::Capacity(_) => CliError::Numeric(format!("{e}; use --engine sim instead")),
            E::Numeric { .. } | E::CalibrationInfeasible { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::ReproductionDiff(m) => write!(f, "reproduction differs: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
