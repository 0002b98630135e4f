//! Crate-wide error type.

use thiserror::Error;

use crate::configmodel::ConfigError;
use crate::equations::EqError;
use crate::exactlin::LinAlgError;
use crate::filtration::FiltrationError;
use crate::generate::GenError;
use crate::instance::InstanceError;
use crate::liealg::LieError;
use crate::nilorbit::NilError;
use crate::springerchar::SpringerError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Nil(#[from] NilError),
    #[error(transparent)]
    Equations(#[from] EqError),
    #[error(transparent)]
    Springer(#[from] SpringerError),
    #[error(transparent)]
    Generate(#[from] GenError),
}

impl Error {
    /// True when a result contradicts a proven structural property, as
    /// opposed to an input that fails a precondition.
    pub fn is_invariant_violation(&self) -> bool {
        match self {
            Error::Filtration(e) => matches!(e, FiltrationError::NotSubalgebra { .. } | FiltrationError::NotDirect { .. }),
            Error::Lie(e) => e.is_invariant_violation(),
            Error::Nil(e) => e.is_invariant_violation(),
            Error::Equations(e) => e.is_invariant_violation(),
            _ => false,
        }
    }
}
