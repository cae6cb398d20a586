pub mod algorithms;
pub mod audit;
pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod instance;
pub mod metric;
mod serde_inf;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/core.md")]
    mod core {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    mod algorithms {}
    #[doc = include_str!("../../../book/src/auditing.md")]
    mod auditing {}
    #[doc = include_str!("../../../book/src/lower-bounds.md")]
    mod lower_bounds {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
