//! Fourth-moment analysis, concentration, two-point functional calculus,
//! log-Sobolev and characteristic-function estimates.

mod concentration;
mod fourth_moment;
mod functional;
mod lambert;

pub use concentration::{
    concentration_tail, h_function, HFunction, ConcentrationOptions, ConcentrationReport, TailPoint, Verdict,
};
pub use fourth_moment::{
    adjointness, antisymmetric_norm_check, claim1_report, claim2_witness, fourth_moment, hat_norm,
    variance_carre, wedge_integral, Adjointness, AntiNormCheck, Claim1Report, Claim2Report,
    FourthMomentReport, VarianceCarre,
};
pub use functional::{
    characteristic_distance, entropy_closed_form, log_sobolev_check, two_point, two_point_fn,
    CharacteristicDistance, LogSobolevReport,
};
pub use lambert::lambert_w;
