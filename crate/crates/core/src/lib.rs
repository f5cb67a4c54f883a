//! Coherent states of the trilinear boson Hamiltonian
//!
//! ```text
//! H = ω_a (a†a + K₀) + κ a K₊ + κ* a† K₋
//! ```
//!
//! The Hilbert space splits into invariant blocks `H_L` of dimension `L + 1`,
//! spanned by `|n⟩|k, L−n⟩` (pump Fock state times SU(1,1) state). Everything
//! in this crate works inside one block at a time:
//!
//! * [`subspace`] – block labels, states and the ladder-operator actions.
//! * [`special`] – terminating and general Kummer functions, Γ-ratios, Ω.
//! * [`coherent`] – the coherent states `|z;k,L⟩`, overlaps, eigenvalue
//!   residuals, multi-block superpositions and even cat states.
//! * [`analytic`] – y/z-plane and double representations, the differential
//!   operators, and the measure behind the resolution of the identity.
//! * [`dynamics`] – exact evolution by tridiagonal diagonalization,
//!   closed forms for `L = 1, 2`, the short-time law and transfer efficiency.
//! * [`statistics`] – reduced pump density, purity, entropy, photon
//!   distribution and number moments.
//!
//! The coupling convention used by all closed forms is `κ = i|κ|`.

pub mod analytic;
pub mod coherent;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod special;
pub mod statistics;
pub mod subspace;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use subspace::{BargmannIndex, BlockState, SubspaceLabel};
