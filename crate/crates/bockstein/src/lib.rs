//! Generalized Bockstein maps and Massey products for finite p-groups.
//!
//! Everything is exact arithmetic over `Z/p^s`.

pub mod bockstein_verify;
pub mod cohomology;
pub mod gmodule;
pub mod group_ring;
pub mod groups;
pub mod massey;
pub mod modular_linalg;
pub mod vanishing;
