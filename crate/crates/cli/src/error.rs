use chablab_core::blockperm::BlockError;
use chablab_core::chabfin::ChabError;
use chablab_core::plgroup::PlError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Bound(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) | Failure::Usage(_) => 2,
            Failure::Bound(_) => 3,
        }
    }

    /// Prefixes the file name to an input error.
    pub fn in_file(self, file: &std::path::Path) -> Failure {
        match self {
            Failure::Input(msg) => Failure::Input(format!("{}: {msg}", file.display())),
            other => other,
        }
    }
}

impl From<PlError> for Failure {
    fn from(e: PlError) -> Self {
        match e {
            PlError::PieceCeiling(_) | PlError::FamilyTooLarge { .. } => {
                Failure::Bound(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ChabError> for Failure {
    fn from(e: ChabError) -> Self {
        match e {
            ChabError::TooLarge { .. } => Failure::Bound(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<BlockError> for Failure {
    fn from(e: BlockError) -> Self {
        match e {
            BlockError::TooLarge { .. } => Failure::Bound(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        // serde_json reports "... at line L column C"
        Failure::Input(e.to_string())
    }
}
