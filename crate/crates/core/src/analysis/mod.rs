//! Closed-form expected spectra, bounds and goodness functionals.

pub mod chk;
pub mod delta;
pub mod goodness;
pub mod rank;
pub mod report;

pub use chk::{checksum_distribution, expected_chk_genfun, g2_bound, ExpectedChkSpectrum};
pub use delta::{
    d0_search, delta_d, delta_table, divergent_endpoint, ldgm_alpha_bound, ldgm_expected_joint, sup_delta_d, D0Report,
    DeltaDParams,
};
pub use goodness::{concatenation_bound, image_goodness, jscc_goodness, max_normalized_ratio, ComposeBound, Goodness};
pub use rank::{rank_full_probability, rank_lower_bound, square_rank_bound};
pub use report::{BoundReport, BoundValue};
