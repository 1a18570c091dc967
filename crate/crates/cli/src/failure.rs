use std::fmt;

use qjd_core::QjdError;

pub const EXIT_PROPERTY: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

/// Why an invocation stopped early.
#[derive(Debug)]
pub enum Failure {
    Property(String),
    Input(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Property(_) => EXIT_PROPERTY,
            Failure::Input(_) => EXIT_INPUT,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            Failure::Property(m) => ("property_failure", m),
            Failure::Input(m) => ("invalid_input", m),
            Failure::Internal(m) => ("internal_error", m),
        };
        serde_json::json!({ "error": kind, "message": message, "exit_code": self.exit_code() })
            .to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Property(m) => write!(f, "property failure: {m}"),
            Failure::Input(m) => write!(f, "invalid input: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<QjdError> for Failure {
    fn from(e: QjdError) -> Self {
        let msg = e.to_string();
        match e {
            QjdError::NonnegativityViolation { .. } | QjdError::NormalizationViolation { .. } => {
                Failure::Property(msg)
            }
            QjdError::DegenerateSample { .. }
            | QjdError::DecompositionFailure(_)
            | QjdError::InvariantViolation(_)
            | QjdError::TransportStalled(_) => Failure::Internal(msg),
            QjdError::DimensionMismatch(..)
            | QjdError::MalformedMatrix(_)
            | QjdError::NotHermitian { .. }
            | QjdError::NotDensity(_)
            | QjdError::NotUnitary { .. }
            | QjdError::IndexOutOfRange { .. }
            | QjdError::NotCommuting { .. }
            | QjdError::WrongArity { .. }
            | QjdError::NoObservables
            | QjdError::TooManyObservables { .. }
            | QjdError::EmptyAxisSet
            | QjdError::GridMismatch(_)
            | QjdError::UnsupportedKind
            | QjdError::TooLarge { .. }
            | QjdError::InvalidArgument(_)
            | QjdError::NoValidTrials(_)
            | QjdError::Json(_) => Failure::Input(msg),
        }
    }
}
