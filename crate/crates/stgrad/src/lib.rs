//! Exact combinatorial invariants of stably graded exceptional Lie algebras.
//!
//! Reconstructs, in exact arithmetic, the finite objects attached to a stable
//! Z/mZ-grading of an exceptional simple Lie algebra: theta-orbits of roots,
//! the fixed-point group I = T^theta, the little Weyl group with its
//! distinguished reflections, orbits and stabilizers of characters of I,
//! cyclotomic Hecke algebra descriptors, endoscopic subsystems, and the
//! b-functions of the rank-one gradings. Everything is verified against a
//! frozen catalog of expected values.

pub mod lattice;
pub mod rootsys;
pub mod grading;
pub mod littleweyl;
pub mod characters;
pub mod hecke;
pub mod bfunction;
pub mod catalog;
pub mod cli;
