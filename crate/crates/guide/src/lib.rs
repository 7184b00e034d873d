//! The chapters of the `book/` guide, compiled as documentation so that
//! `cargo test -p essq-guide` runs every snippet.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/fock.md")]
pub mod fock {}

#[doc = include_str!("../../../book/src/beam_splitter.md")]
pub mod beam_splitter {}

#[doc = include_str!("../../../book/src/mgf.md")]
pub mod mgf {}

#[doc = include_str!("../../../book/src/criteria.md")]
pub mod criteria {}

#[doc = include_str!("../../../book/src/click_detectors.md")]
pub mod click_detectors {}

#[doc = include_str!("../../../book/src/reconstruction.md")]
pub mod reconstruction {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
