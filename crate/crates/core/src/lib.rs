//! Numerical toolkit for identical particles with spatial and spin degrees
//! of freedom.
//!
//! States live in `(l ⊗ h)^⊗n` with a finite spatial mode basis `l` and spin
//! space `h = C^{d_h}`. The crate builds (anti)symmetrized states, lifts
//! operators through the second-quantization map, and extracts the spin
//! state seen by detectors placed in chosen spatial regions. With pairwise
//! disjoint regions the extracted spin state forgets the exchange statistics
//! of the global state; with overlapping regions it does not.
//!
//! Index convention: the one-particle basis index is `x * d_h + s`, and in
//! every tensor product the first factor is the slowest-varying digit.

pub mod algebra;
pub mod embedding;
pub mod entanglement;
pub mod error;
pub mod random;
pub mod reduction;
pub mod second_quantization;
pub mod space;
pub mod spatial;
pub mod states;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
pub use space::SpaceSpec;
pub use spatial::{SpatialRegion, SpatialSpace, Wavefunction};
pub use symmetry::{Parity, Permutation, SymmetryClass};
pub use tensor::{DensityMatrix, FactorShape, Operator, StateVector, C64};
