//! Dual-modality drowsiness detection pipeline.
//!
//! Synchronized landmark and biosignal streams go through per-modality
//! feature extraction (EAR/blinks/PERCLOS/yawns on one side, band powers,
//! HRV, and EOG statistics on the other), feature-level fusion with
//! selection and PCA, quality-weighted decision fusion, compact
//! from-scratch classifiers, and full metric evaluation. A seeded
//! synthetic generator supplies labeled sessions with known ground truth.
//!
//! The crate is `no_std`-compatible (`default-features = false` keeps
//! `alloc` only); file formats, the CLI, and wall-clock benchmarking live
//! in the companion `fusewake` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod eval;
pub mod fusion;
pub mod model;
pub mod physio;
pub mod pipeline;
pub mod rng;
pub mod session;
pub mod synth;
pub mod vision;

mod dsp;

pub use session::{Channel, LandmarkFrame, PhysioBlock, Session, State, Timestamp, Window};
