//! Ring-level verification and construction of mirror extensions of rational
//! vertex operator algebras.
//!
//! Everything here is pure computation over fusion rings and modular data:
//!
//! * [`fusion_ring`]: sparse fusion rings, axiom checks, Frobenius-Perron
//!   dimensions, sub-ring closure and Deligne products.
//! * [`modular_data`]: S-matrices with exact conformal weights, the Verlinde
//!   formula and twist integrality.
//! * [`affine`]: Kac-Peterson data for `L_{sl_n}(k,0)` and a closed-form sl2
//!   fusion rule used as an oracle.
//! * [`branching`]: the decomposition matrix of an extension `U ⊃ V¹ ⊗ V²`,
//!   its necessary conditions, and a constraint search for candidates.
//! * [`mirror`]: extension specs `V ⊕ ⊕ m_i M^i` and their mirrors
//!   `V^c ⊕ ⊕ m_i (N^{τ(i)})'`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod affine;
pub mod branching;
pub mod category;
pub mod exact;
pub mod fusion_ring;
pub mod label;
pub mod mirror;
pub mod modular_data;
pub mod report;
pub mod spectral;
pub mod tolerance;

pub use branching::{BranchingError, BranchingMatrix, SearchOptions, Tau};
pub use category::{Category, CategoryError};
pub use fusion_ring::{FusionRing, Multiplicity, RingError};
pub use label::Label;
pub use mirror::{ExtensionSpec, MirrorError, MirrorResult, Side};
pub use modular_data::{ModularData, ModularError};
pub use report::{Check, CheckReport, Outcome};
pub use tolerance::Tolerances;

pub use num_bigint::BigUint;
pub use num_complex::Complex64;
pub use num_rational::BigRational;
