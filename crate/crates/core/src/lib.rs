//! Representation zeta functions of unipotent group schemes attached to
//! nilpotent Lie lattices.

pub mod arith;
pub mod cli;
pub mod lattice;
pub mod localring;
pub mod modp;
pub mod oracle;
pub mod poincare;
pub mod zetafit;
pub mod zmat;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    Ring(#[from] localring::RingError),
    #[error(transparent)]
    Poincare(#[from] poincare::PoincareError),
    #[error(transparent)]
    Fit(#[from] zetafit::FitError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("usage: {0}")]
    Usage(String),
}
