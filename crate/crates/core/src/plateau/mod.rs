//! Plateaus of key polynomials: approximant families, the sets `J_ρ`,
//! `B_n`, `I_i`, reduced limit key polynomials and per-plateau defects.

mod analyze;
mod family;
mod stepper;

pub use analyze::{
    analyze_extension, analyze_stage, b_set, compare_truncations, j_set, plateau_defect, plateau_stats,
    reduced_limit_kp, AnalysisOptions, BSet, DefectReport, PlateauRecord, PlateauStats, ReducedCheck, RhoRecord,
};
pub use family::{build_family, ApproxFamily, Extension, GeneratorSpec, Member, StageSpec};
pub use stepper::{as_root_lazy, as_root_stepper, detect_limit, newton_stepper, StepperRun};
