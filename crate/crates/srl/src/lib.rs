//! Stable arithmetic regularity toolkit for `F_p^n`: dense Fourier analysis,
//! order-property search with exact certificates, density-increment and
//! good-subspace machinery, the dichotomy tree builder, and the associated
//! budget arithmetic.

pub mod budget;
pub mod error;
pub mod fourier;
pub mod generators;
pub mod group;
pub mod io;
pub mod regularity;
pub mod set;
pub mod stability;

pub use error::{Error, Result};
pub use fourier::{balanced_function, characteristic_measure, coset_density, dft, inverse_dft, parseval_energy, DenseFunction, Spectrum};
pub use group::{Coset, Functional, GroupContext, GroupElement, Subspace};
pub use set::{sumset, SetIndicator};
pub use stability::{
    cover_or_witness, find_order_witness, neighborhood, stability_number, verify_cover,
    verify_order_witness, verify_tree_witness, CoverCertificate, CoverOrWitness, Effort,
    OrderWitness, SearchOutcome, SetSide, StabilityNumber, TreeWitness,
};
