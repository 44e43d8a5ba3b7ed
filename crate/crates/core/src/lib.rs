//! Error-bounded online piecewise-linear modeling of unbounded scalar streams,
//! reference competitor stores, and a small mobility-privacy toolkit built on
//! top of it.
//!
//! The crate is organised by subsystem:
//!
//! - [`flair`]: the online ε-bounded piecewise-linear store, its reads and its
//!   text persistence format.
//! - [`competitors`]: offline bottom-up segmentation, SWAB and a polynomial
//!   store, all behind the shared [`Store`] interface.
//! - [`geo`]: GPS traces, stay extraction (linear scan and divide-and-conquer),
//!   stay merging into points of interest, and constant-speed resampling.
//! - [`tuning`]: drift distribution and ε candidates.
//! - [`bench`]: seeded workload generators and the memory / throughput /
//!   stability harness.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and falls back to plain iteration otherwise.

pub mod bench;
pub mod competitors;
pub mod error;
pub mod flair;
pub mod geo;
pub mod io;
pub mod par;
pub mod sample;
pub mod store;
pub mod tuning;

pub use error::{Error, Result};
pub use flair::FlairModel;
pub use sample::{Epsilon, Sample};
pub use store::{RawStore, Store, StoreKind};
