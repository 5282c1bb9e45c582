//! Symmetric extensions, cloning bounds and monogamy of nonlocal boxes.

mod cloning;
mod extension;
mod generalized;
mod monogamy;

pub use cloning::{clone_ceiling, isotropic_clone_ceiling, shrinking_factor};
pub use extension::{
    clone_feasibility, extension_lp, infinite_shareability_extension, is_m_shareable, local_model_from_extension,
    validate_extension, ExtensionProblem, ExtensionWitness, SharedParty, EXTENSION_CAP,
};
pub use generalized::{
    generalized_isotropic, generalized_pr, has_uniform_marginals, shared_shift, shift_yields_uniform_noise,
};
pub use monogamy::{monogamy_scan, monogamy_tradeoff, polygamy_example, unique_violator_decoupling};
