//! Finite projective planes, their `p`-ary codes, exact weight enumerators,
//! line reconstruction from codeword types, inclusion numbers and Pappus
//! counting.

pub mod builders;
pub mod census;
pub mod error;
pub mod field;
pub mod format;
pub mod incidence;
pub mod iso;
pub mod linear;
pub mod pappus;
pub mod reconstruction;

pub use builders::{
    build_desargues_config, build_hall9, build_pappus_config, build_pattern, build_pg2, flag_deletion,
    free_plane_stage, free_plane_stages, random_partial_linear_space, Pattern, DEFAULT_POINT_BUDGET,
};
pub use census::{
    binomial, bounded_weight_census, full_census, merge, type_census, BoundedCensus, BoundedOptions,
    CensusKind, CensusStatus, CensusTable, ShardSpec, TypeStrategy, WordFilter,
};
pub use error::{Error, Result};
pub use field::{FiniteField, NearField9};
pub use format::{parse_inc, write_inc};
pub use incidence::{
    build_plane, classify, dual, is_p_admissible, validate_partial_linear, IncidenceSystem, Plane,
    ValidationReport, Verdict, Witness,
};
pub use iso::{
    are_isomorphic, automorphism_count, canonical_form, count_copies, count_copies_direct, count_monomorphisms,
    BigCount, CanonicalForm,
};
pub use linear::{code_from_system, plane_membership, FpVector, LinearCode, WeightType};
pub use pappus::{count_pappus, pappus_bound, PappusCount, PappusOptions};
pub use reconstruction::{
    corollary43_compare, digit_bound_check, lemma39_verify, powers_word, reconstruct_lines, theorem42_count,
    AjSource, AjStrategy, InclusionReport, PipelineOptions, PowersWord,
};
