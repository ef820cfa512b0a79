//! Additive-noise-annealed quantised networks.
//!
//! This crate implements noise-regularised stair functions and everything
//! needed to train small quantised feedforward networks with them:
//!
//! - [`quantiser`]: stair functions, the parametric Heaviside, and linear
//!   B-bit quantisers;
//! - [`noise`]: the uniform/triangular/normal/logistic families parametrised
//!   by mean and standard deviation, with the 95%-mass equivalence between
//!   compact and full-support families;
//! - [`regulariser`]: noise-regularised quantisers with exact expectation
//!   forward/backward closed forms plus mode and random-sampling forwards;
//! - [`schedule`]: per-layer annealing ranges, decay-interval strategies, and
//!   decay power laws driving the noise parameters over training iterations;
//! - [`network`]: quantised feedforward networks with latent real-valued
//!   parameters, straight-through backpropagation, and a binary parameter
//!   format;
//! - [`convergence`]: numeric verification of the compositional-convergence
//!   hypotheses and measurement of per-layer feature-error ratios;
//! - [`trainer`]: the annealed training loop with SGD/ADAM and cross-entropy;
//! - [`dataset`] and [`config`]: synthetic datasets and the experiment
//!   configuration format used by the CLI.

pub mod config;
pub mod convergence;
pub mod dataset;
pub mod error;
pub mod network;
pub mod noise;
pub mod quantiser;
pub mod regulariser;
pub mod schedule;
pub mod trainer;


pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use network::{EvalMode, Gradients, Layer, Network, NetworkRng};

pub use noise::{NoiseFamily, NoiseParams};
pub use dataset::{Dataset, DatasetSpec};
pub use quantiser::{LinearQuantiserSpec, Quantiser};
pub use regulariser::{ForwardStrategy, RegularisedActivation};
pub use trainer::{Optimiser, TrainConfig, TrainLog, TrainOutcome};
pub use schedule::{
    AnnealingRange, DecayInterval, DecayPowerLaw, LayerScheduleSpec, ScheduleStrategy,
};

