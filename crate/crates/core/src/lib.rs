//! Fourier-mode analysis of the differential complex `d′` of a tube
//! structure on `Tⁿ × Tᵐ` with constant period matrix `A`.
//!
//! At the double frequency `(ξ, κ)` the operator acts on coefficient forms as
//! wedge multiplication by `z = i(κ + ξᵀA)`. Everything here is exact:
//! scalars live in `Q`, `Q(√d)` or `Q + Q·L_b` (`L_b` a Liouville constant),
//! and irrational quantities are compared through certified enclosures.

pub mod diophantine;
pub mod error;
pub mod fourier;
pub mod intmat;
pub mod io;
pub mod isomorphisms;
pub mod koszul;
pub mod lattice;
pub mod report;
pub mod scalar;
pub mod solver;
pub mod surfaces;

pub use error::Error;
