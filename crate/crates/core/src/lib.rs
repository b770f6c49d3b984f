//! Affine constellations on `d²` points and mutually unbiased constellations
//! in `C^d`: constructions, verification, exhaustive search and numerical
//! search.

pub mod affine;
pub mod field;
pub mod latin;
pub mod mub;
pub mod search;
pub mod signature;

pub use affine::{
    complete_foliation_set, complete_parallel_class, make_plane, sub_constellation, table1_constellation,
    verify_constellation, verify_plane_axioms, AffineConstellation, AffineError, Line, ParallelClass,
    VerificationReport, Violation,
};
pub use field::{FieldError, FieldOp, FieldTable};
pub use mub::{constellation_defect, mu_defect, Basis, DefectReport, MuConstellation, MubError, C64};
pub use search::{
    extend_search, search_constellation, CostFunction, SearchConfig, SearchError, SearchResult, SearchStatus,
};
pub use signature::{Bracket, Signature, SignatureError};
