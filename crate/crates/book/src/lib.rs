//! The guide's chapters, compiled so that `cargo test` runs their samples.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/photon-model.md")]
pub mod photon_model {}

#[doc = include_str!("../../../book/src/linearization.md")]
pub mod linearization {}

#[doc = include_str!("../../../book/src/estimation.md")]
pub mod estimation {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}

#[doc = include_str!("../../../book/src/reproducibility.md")]
pub mod reproducibility {}
