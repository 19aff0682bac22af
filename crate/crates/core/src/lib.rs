//! Triply graded annular Khovanov homology of braid closures over `Q[beta]`.
//!
//! The pipeline is braid word -> cube of resolutions -> trigraded complex
//! over `Q[beta]` -> exact elimination. The elimination either computes
//! homology over `Q` for a specialization (`beta = 1` gives Khovanov
//! homology, `beta = 0` the sutured annular theory) or splits the `Q[beta]`
//! complex into free summands and staircases `Q[beta] --beta^k--> Q[beta]`,
//! whose multiplicity spaces `W_k` are annular link invariants.

pub mod braid;
pub mod cli;
pub mod complex;
pub mod cube;
pub mod error;
pub mod experiments;
pub mod export;
pub mod invariants;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod reduce;

pub use braid::{parse_braid, BraidWord, CrossingCounts};
pub use complex::{build_complex, specialize, ChainComplex, FieldComplex, FrobeniusSpec, Specialization, Trigrading};
pub use cube::{build_cube, Cube, Vertex, DEFAULT_LIMIT};
pub use error::{Error, Result};
pub use export::{export_json, parse_json};
pub use invariants::{
    graded_euler, kh_poincare, representatives_in_grading, sl2_decompose, spectral_annular_kh, Differential,
    Sl2Decomposition, SpectralOutput,
};
pub use poly::{LaurentPoly3, Monomial, Style, Var};
pub use rational::Rational;
pub use reduce::{
    homology_over_field, spectral_page, staircase_decompose, wk_from_oracle, Decomposition, GradedDims, PivotOrder,
    Staircase,
};
