//! Exact-arithmetic engine for classifying Hamiltonian circle and torus actions
//! on closed symplectic 8-manifolds with isolated fixed points.
//!
//! Everything in this crate computes over the integers or rationals; there is
//! no floating point anywhere. The main layers, bottom to top:
//!
//! * [`poly`] / [`ratfunc`]: sparse multivariate polynomials over the integers
//!   and sums of rational functions with factored denominators,
//! * [`matrix`]: integer matrices, Hermite normal form, saturated kernels and
//!   strictly positive kernel points,
//! * [`graphs`] / [`magnitudes`]: enumeration of directed multigraphs with
//!   prescribed in/out degrees and of edge-magnitude assignments whose
//!   adjusted adjacency matrix is singular,
//! * [`localization`]: Atiyah-Bott/Berline-Vergne style fixed-point sums and
//!   Chern numbers from isotropy weights,
//! * [`diophantine`]: the closed-form Chern-number relations, candidate
//!   tables and Betti-number bounds used to steer the search,
//! * [`gkm`]: equivariant cohomology of the reference actions (canonical
//!   classes, structure constants, equivariant Chern classes) plus weight
//!   matching and blow-up bookkeeping,
//! * [`catalog`]: the built-in reference actions,
//! * [`search`]: the full search pipeline tying the layers together.

pub mod catalog;
pub mod diophantine;
pub mod gkm;
pub mod graphs;
pub mod localization;
pub mod magnitudes;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod search;
