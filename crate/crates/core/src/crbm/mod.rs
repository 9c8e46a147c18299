//! Binary convolutional restricted Boltzmann machine.
//!
//! Hidden map `m` reads the visible layer by valid cross-correlation with
//! filter `W_m`; the visible layer is reconstructed by full convolution with
//! the same, unflipped filters. With this pairing both conditionals are exact
//! for the energy
//!
//! ```text
//! E(v, h) = -Σ_m Σ_ij h^m_ij (W_m ⋆ v)_ij - b Σ_ij v_ij - Σ_m c_m Σ_ij h^m_ij
//! ```

mod conv;
pub mod exact;
mod features;
mod model;
mod persist;
mod train;

pub use self::exact::{
    all_visible_configurations, exact_log_likelihood, exact_log_likelihood_grad, log_marginals, log_partition,
    ENUMERATION_LIMIT,
};
pub use self::features::{extract_feature_map, reduce_1x1, ReductionWeights};
pub use self::model::{sample_bernoulli, sample_hidden, CrbmModel, GibbsOutput, HiddenKind, HiddenState};
pub use self::persist::MODEL_VERSION;
pub use self::train::{
    cd_gradient, cd_update, reconstruction_cross_entropy, train, BatchStats, CrbmGradient,
    CrbmTrainConfig, EpochStats, TrainHistory, VisibleMode,
};
