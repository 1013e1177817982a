//! Exact arithmetic for S-adic subshifts: directive sequences of
//! non-erasing morphisms, their languages, invariant measures as cylinder
//! weight tables, vector towers, letter frequency cones and bounded
//! recognizability checks.

pub mod cones;
pub mod constructions;
pub mod directive;
pub mod error;
pub mod io;
pub mod language;
pub mod linalg;
pub mod measures;
pub mod recognizability;
pub mod symbols;
pub mod towers;

pub use cones::{cone_at_level, critical_level_estimate, ConeReport, CriticalLevelReport};
pub use constructions::{
    build_critical_level_example, build_diagonal_sequence, build_diagonal_towers, build_sigma_ld,
    build_tau_d, critical_level_example_report, diagonal_report, CriticalLevelExample,
    CriticalLevelExampleReport, DiagonalFamilySpec, DiagonalReport, DiagonalTowers,
};
pub use directive::{DirectiveSequence, GrowthReport, GrowthVerdict};
pub use error::{Error, Result};
pub use language::{
    complexity, entropy_upper_bound, generate_language, image_language, required_input_len,
    LanguageTable,
};
pub use measures::{
    characteristic_measure, check_kirchhoff, letter_frequency, transfer_measure,
    transfer_property_report, KirchhoffReport, TransferReport, WeightTable,
};
pub use recognizability::{
    orbit_collision_on_periodic, recognizability_scan, scan_source_len, shift_period_check,
    OrbitCollisionReport, RecognizabilityVerdict, ShiftPeriodReport, Witness,
};
pub use symbols::{Alphabet, IncidenceMatrix, Letter, Morphism, SubdivisionDecomposition, Word};
pub use towers::{
    evaluate_tower, levelwise_measures, prolong_tower, validate_tower, MeasureTower,
    TowerEvaluation, TowerValidation, VectorTower,
};
