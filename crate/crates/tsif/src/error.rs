use thiserror::Error;
use tsif_core::catalog::CatalogError;
use tsif_core::digraph::TooManyCircuits;
use tsif_core::gap::GapError;

#[derive(Debug, Error)]
pub enum TsifError {
    #[error("{0}")]
    Usage(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Catalog(CatalogError),
    #[error("{0}")]
    Gap(GapError),
    #[error("{0}")]
    Synthesis(TooManyCircuits),
}

impl TsifError {
    /// 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            TsifError::Usage(_) | TsifError::Parse { .. } | TsifError::Catalog(_) => 2,
            _ => 1,
        }
    }
}

impl From<CatalogError> for TsifError {
    fn from(e: CatalogError) -> Self {
        TsifError::Catalog(e)
    }
}

impl From<GapError> for TsifError {
    fn from(e: GapError) -> Self {
        TsifError::Gap(e)
    }
}

impl From<TooManyCircuits> for TsifError {
    fn from(e: TooManyCircuits) -> Self {
        TsifError::Synthesis(e)
    }
}
