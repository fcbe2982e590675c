//! Catalan states of the lattice crossing `L(m,n)` and their coefficients in
//! the Kauffman bracket skein expansion.
//!
//! * [`laurent`]: exact Laurent polynomials in `A` and Gaussian binomials.
//! * [`states`]: boundary matchings, separating lines, composition, splitting
//!   and the Dyck-word encoding.
//! * [`skein`]: marker grids, resolution and the two expansion engines.
//! * [`realize`]: explicit marker grids for realizable states.
//! * [`census`]: closed-form counts and no-return coefficients.

pub mod census;
pub mod laurent;
pub mod realize;
pub mod skein;
pub mod states;
mod union_find;

pub use laurent::{LaurentError, LaurentPoly};
pub use realize::{realize, RealizeError};
pub use skein::{
    coefficient, expand, expand_transfer, preimages, resolve, Budget, Engine, ExpansionTable,
    Marker, MarkerGrid, Resolution, SkeinError,
};
pub use states::{
    Axis, BoardShape, BoundaryPoint, CatalanState, DyckWord, SeparatingLine, Side, StateError,
};
