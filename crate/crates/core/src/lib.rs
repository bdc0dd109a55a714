//! Exact-arithmetic invariants of Dehn surgeries.
//!
//! The crate computes, with no floating point on any load-bearing path:
//!
//! - negative continued fraction expansions of surgery slopes and the
//!   increasing interpolation sequences between them ([`cf`]);
//! - the linear lattice of a chain of 2-handles, its characteristic
//!   covectors, residue classes, and short-representative sets ([`lattice`]);
//! - Alexander polynomials, torsion coefficients, and surgery d-invariants
//!   by two independent routes ([`knot`]);
//! - changemaker lattices, torsion recovery by quadratic-form minimisation,
//!   and isometry classification of their complements ([`changemaker`]);
//! - spin-c extension between nested chains and the gluing identity behind
//!   sharpness transport ([`extension`]);
//! - characterizing-slope thresholds and the satellite-exclusion chain
//!   ([`slopes`]).
//!
//! Brute-force reference computations live in [`oracle`]; batched property
//! suites driven by both the test harness and the CLI live in [`verify`].

pub mod cf;
pub mod changemaker;
pub mod error;
pub mod extension;
pub mod knot;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod rational;
pub mod slopes;
pub mod verify;

pub use cf::{expand, interpolation_sequence, split_slope, NegCf, SlopeSplit};
pub use changemaker::{
    is_changemaker, uniqueness_search, uniqueness_search_for, ChangemakerLattice, ChangemakerVec,
    StableBound,
};
pub use error::{Error, Result};
pub use extension::{
    check_extension_d_equality, even_slope_vanishing, sharpness_identity_check, ExceptionalMode,
    ExtensionPair, ExtensionReport,
};
pub use knot::{
    absolute_d, d_by_class, d_by_residue, lens_d, sum_identity_holds, AlexPoly, DTable, TorsionSeq,
    VhSeq,
};
pub use lattice::{CharVec, LinearLattice, SpincClass};
pub use rational::PosRational;
pub use slopes::{
    alex_unique_zone, characterizing_threshold, lspace_zone, ni_zhang_threshold, satellite_chain,
    slope_verdict, SlopeVerdict, TorusKnot,
};
