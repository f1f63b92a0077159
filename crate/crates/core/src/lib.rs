//! Exact algebra behind extendable mapping classes of the unknotted sphere
//! and of `S^p x S^p` standardly embedded in `S^{2p+2}`.
//!
//! * [`f2_forms`]: symplectic spaces and quadratic refinements over GF(2).
//! * [`sl2z`]: the subgroup `Γ_V(2)` of `SL(2, Z)` and its word problem.
//! * [`smallgrp`]: coset enumeration and small multiplication-table groups.
//! * [`ambient_geom`]: the signed permutation matrices acting on the ambient sphere.
//! * [`homotopy_tables`]: tabulated homotopy groups of rotation groups.
//! * [`classifier`]: the classification of extendable mapping class groups.
//! * [`verify`]: the one-shot verification suite.

pub mod ambient_geom;
pub mod classifier;
pub mod f2_forms;
pub mod homotopy_tables;
pub mod sl2z;
pub mod smallgrp;
pub mod verify;
