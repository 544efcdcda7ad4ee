//! Holonomic control of the degenerate dark subspace of two Λ-type atomic
//! subensembles sharing a single cavity mode.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: basis enumeration, Hamiltonian construction, Zeno and dark
//! subspace extraction, non-Abelian holonomies (by discrete parallel
//! transport and in closed form), SU(2) gate synthesis, Dicke-state
//! preparation and time-dependent evolution. File formats, the command line
//! and parallel sweeps live in the `zenodark-cli` crate.
#![no_std]

extern crate alloc;

pub mod application;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod gates;
pub mod holonomy;
pub mod linalg;
pub mod model;
pub mod subspace;

pub use error::{Error, Result};
pub use fock::{BasisState, Mode, SectorBasis, SectorConfig};
pub use holonomy::{parse_path, HolonomyResult, Method, PathProgram, PathSegment, Transporter};
pub use linalg::C64;
pub use model::{ControlParams, ModelConfig};
pub use subspace::Frame;
