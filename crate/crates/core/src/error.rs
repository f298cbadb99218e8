use thiserror::Error;

use crate::diophantine::DiophantineError;
use crate::fourier::FormError;
use crate::io::IoError;
use crate::isomorphisms::IsoError;
use crate::koszul::KoszulError;
use crate::lattice::LatticeError;
use crate::scalar::ScalarError;
use crate::solver::SolverError;
use crate::surfaces::SurfaceError;

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Io(#[from] IoError),
}
