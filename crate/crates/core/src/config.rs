//! Experiment configuration: a sectioned key-value (TOML) file describing
//! the network, noise, schedule, training loop, dataset, and the optional
//! subcommand sections. Parsing validates every cross-module invariant and
//! reports all violations at once, each message naming the offending key.

use crate::dataset::{DatasetSpec, Generator};
use crate::error::{Error, Result};
use crate::network::{Layer, Network};
use crate::noise::{NoiseFamily, NoiseParams};
use crate::quantiser::{LinearQuantiserSpec, Quantiser};
use crate::regulariser::{ForwardStrategy, RegularisedActivation};
use crate::schedule::{
    build_schedule, AnnealingRange, DecayInterval, DecayPowerLaw, LayerScheduleSpec,
    ScheduleStrategy,
};
use crate::trainer::{Optimiser, TrainConfig};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// A quantiser named by shorthand or spelled out.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum QuantiserChoice {
    /// `"none"`, `"binary"`, or `"ternary"`.
    Named(String),
    /// Explicit levels and thresholds.
    Custom {
        levels: Vec<f64>,
        thresholds: Vec<f64>,
    },
    /// A linear B-bit quantiser.
    Linear { offset: i64, quantum: f64, bits: u32 },
}

impl QuantiserChoice {
    pub fn to_quantiser(&self) -> Result<Option<Quantiser>> {
        match self {
            QuantiserChoice::Named(name) => match name.as_str() {
                "none" => Ok(None),
                "binary" => Ok(Some(Quantiser::heaviside_at(0.0)?)),
                "ternary" => Ok(Some(Quantiser::ternary())),
                other => Err(Error::Config(format!(
                    "unknown quantiser name {other:?} (expected none, binary, or ternary)"
                ))),
            },
            QuantiserChoice::Custom { levels, thresholds } => {
                Ok(Some(Quantiser::new(levels.clone(), thresholds.clone())?))
            }
            QuantiserChoice::Linear {
                offset,
                quantum,
                bits,
            } => Ok(Some(LinearQuantiserSpec::new(*offset, *quantum, *bits)?.induced())),
        }
    }
}

fn default_ternary() -> QuantiserChoice {
    QuantiserChoice::Named("ternary".into())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub input: usize,
    pub hidden: Vec<usize>,
    pub output: usize,
    #[serde(default = "default_ternary")]
    pub activation: QuantiserChoice,
    #[serde(default = "default_ternary")]
    pub weight_quantiser: QuantiserChoice,
}

fn default_c_beta() -> f64 {
    1.0 / (2.0 * 3.0_f64.sqrt())
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub family: NoiseFamily,
    #[serde(default = "default_true")]
    pub static_mean: bool,
    #[serde(default)]
    pub static_variance: bool,
    #[serde(default)]
    pub c_alpha: f64,
    #[serde(default = "default_c_beta")]
    pub c_beta: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            family: NoiseFamily::Uniform,
            static_mean: true,
            static_variance: false,
            c_alpha: 0.0,
            c_beta: default_c_beta(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSectionRaw {
    decay_interval: Option<DecayInterval>,
    decay_power_law: Option<DecayPowerLaw>,
    anneal_fraction: Option<f64>,
}

/// Resolved schedule section.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSection {
    pub decay_interval: DecayInterval,
    pub decay_power_law: DecayPowerLaw,
    /// Fraction of the total iterations spanned by the annealing window.
    pub anneal_fraction: f64,
}

fn default_optimiser() -> String {
    "adam".into()
}

fn default_lr() -> f64 {
    1e-3
}

fn default_beta1() -> f64 {
    0.9
}

fn default_beta2() -> f64 {
    0.999
}

fn default_adam_eps() -> f64 {
    1e-8
}

fn default_batch() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub strategy: ForwardStrategy,
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_optimiser")]
    pub optimiser: String,
    #[serde(default = "default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_adam_eps")]
    pub adam_epsilon: f64,
    #[serde(default)]
    pub lr_drop_epoch: Option<usize>,
    #[serde(default)]
    pub lr_drop_factor: Option<f64>,
    pub seed: u64,
    #[serde(default)]
    pub early_stop_backward: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub generator: Generator,
    pub size: usize,
    #[serde(default)]
    pub noise: f64,
    #[serde(default = "default_split")]
    pub split: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub features_path: Option<PathBuf>,
    #[serde(default)]
    pub labels_path: Option<PathBuf>,
}

fn default_split() -> f64 {
    0.8
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegcurveSection {
    #[serde(default = "default_x_min")]
    pub x_min: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_x_min() -> f64 {
    -2.0
}

fn default_x_max() -> f64 {
    2.0
}

fn default_step() -> f64 {
    1e-3
}

impl Default for RegcurveSection {
    fn default() -> Self {
        Self {
            x_min: default_x_min(),
            x_max: default_x_max(),
            step: default_step(),
        }
    }
}

/// How the per-layer regularisation parameters follow the global λ in the
/// convergence checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaStyle {
    /// Every layer follows λ directly.
    Synchronized,
    /// Layers nearer the input decay faster (larger exponents).
    InputFirst,
    /// The first layer never decays while the rest follow λ.
    StalledInput,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_grid_min_exp")]
    pub grid_min_exp: u32,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub alpha_coeff: f64,
    #[serde(default = "default_half")]
    pub alpha_exp: f64,
    #[serde(default = "default_one")]
    pub beta_coeff: f64,
    #[serde(default = "default_one")]
    pub beta_exp: f64,
    #[serde(default = "default_lambda_style")]
    pub lambda_style: LambdaStyle,
    /// One exponent per layer; grid-searched when absent.
    #[serde(default)]
    pub rate_exponents: Option<Vec<f64>>,
}

fn default_epsilon() -> f64 {
    1.0
}

fn default_grid_min_exp() -> u32 {
    20
}

fn default_tolerance() -> f64 {
    1e-2
}

fn default_half() -> f64 {
    0.5
}

fn default_one() -> f64 {
    1.0
}

fn default_lambda_style() -> LambdaStyle {
    LambdaStyle::Synchronized
}

impl Default for CheckSection {
    fn default() -> Self {
        Self {
            epsilon: default_epsilon(),
            grid_min_exp: default_grid_min_exp(),
            tolerance: default_tolerance(),
            alpha_coeff: 0.0,
            alpha_exp: default_half(),
            beta_coeff: default_one(),
            beta_exp: default_one(),
            lambda_style: default_lambda_style(),
            rate_exponents: None,
        }
    }
}

fn default_strategies() -> Vec<ForwardStrategy> {
    ForwardStrategy::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_strategies")]
    pub forward_strategies: Vec<ForwardStrategy>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            forward_strategies: default_strategies(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    network: NetworkSection,
    #[serde(default)]
    noise: NoiseSection,
    #[serde(default)]
    schedule: ScheduleSectionRaw,
    train: TrainSection,
    dataset: DatasetSection,
    #[serde(default)]
    regcurve: RegcurveSection,
    #[serde(default)]
    check: CheckSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    output: OutputSection,
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub network: NetworkSection,
    pub noise: NoiseSection,
    pub schedule: ScheduleSection,
    pub train: TrainSection,
    pub dataset: DatasetSection,
    pub regcurve: RegcurveSection,
    pub check: CheckSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    /// Parses and validates a config; returns non-fatal warnings alongside.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        Self::from_raw(raw)
    }

    /// Reads and validates the config file at `path`.
    pub fn load<P: AsRef<Path>>(path: P) -> Result<(Self, Vec<String>)> {
        let text = std::fs::read_to_string(&path)?;
        Self::parse(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<(Self, Vec<String>)> {
        let mut violations: Vec<String> = Vec::new();
        let mut warnings: Vec<String> = Vec::new();

        let fully_static = raw.noise.static_mean && raw.noise.static_variance;
        if fully_static
            && (raw.schedule.decay_interval.is_some() || raw.schedule.decay_power_law.is_some())
        {
            warnings.push(
                "schedule.decay_interval/decay_power_law: not used when noise.static_mean and \
                 noise.static_variance are both true"
                    .into(),
            );
        }
        let schedule = ScheduleSection {
            decay_interval: raw.schedule.decay_interval.unwrap_or(DecayInterval::Partition),
            decay_power_law: raw
                .schedule
                .decay_power_law
                .unwrap_or(DecayPowerLaw::Homogeneous),
            anneal_fraction: raw.schedule.anneal_fraction.unwrap_or(0.7),
        };

        // Network section.
        if raw.network.input == 0 {
            violations.push("network.input: must be at least 1".into());
        }
        if raw.network.output == 0 {
            violations.push("network.output: must be at least 1".into());
        }
        if raw.network.hidden.is_empty() {
            violations.push("network.hidden: at least one hidden layer is required".into());
        }
        if raw.network.hidden.iter().any(|&h| h == 0) {
            violations.push("network.hidden: layer sizes must be at least 1".into());
        }
        match raw.network.activation.to_quantiser() {
            Ok(None) => {
                violations.push("network.activation: hidden layers need a quantiser".into())
            }
            Ok(Some(_)) => {}
            Err(e) => violations.push(format!("network.activation: {e}")),
        }
        if let Err(e) = raw.network.weight_quantiser.to_quantiser() {
            violations.push(format!("network.weight_quantiser: {e}"));
        }

        // Noise section.
        if !(raw.noise.c_beta > 0.0) || !raw.noise.c_beta.is_finite() {
            violations.push(format!(
                "noise.c_beta: must be positive (zero disables regularisation), got {}",
                raw.noise.c_beta
            ));
        }
        if raw.noise.static_mean && raw.noise.c_alpha != 0.0 {
            violations.push("noise.c_alpha: must be 0 when noise.static_mean is true".into());
        }
        if !raw.noise.static_mean && !(raw.noise.c_alpha > 0.0) {
            violations.push(
                "noise.c_alpha: must be positive when noise.static_mean is false".into(),
            );
        }

        // Pruned combination: the expectation strategy with a variance held
        // static would change the function at deployment time.
        if raw.noise.static_variance && raw.train.strategy == ForwardStrategy::Expectation {
            violations.push(
                "train.strategy: expectation cannot be combined with noise.static_variance \
                 (the deployed quantised network would differ from the trained one)"
                    .into(),
            );
        }

        if !(schedule.anneal_fraction > 0.0 && schedule.anneal_fraction <= 1.0) {
            violations.push(format!(
                "schedule.anneal_fraction: must lie in (0, 1], got {}",
                schedule.anneal_fraction
            ));
        }

        // Train section.
        match raw.train.optimiser.as_str() {
            "adam" | "sgd" => {}
            other => violations.push(format!(
                "train.optimiser: expected \"sgd\" or \"adam\", got {other:?}"
            )),
        }
        if raw.train.lr_drop_epoch.is_some() != raw.train.lr_drop_factor.is_some() {
            violations.push(
                "train.lr_drop_epoch/lr_drop_factor: both or neither must be set".into(),
            );
        }
        let train_config = TrainConfig {
            epochs: raw.train.epochs.max(1),
            batch_size: raw.train.batch_size.max(1),
            learning_rate: raw.train.learning_rate,
            lr_drop: raw.train.lr_drop_epoch.zip(raw.train.lr_drop_factor),
            optimiser: Optimiser::adam(),
            strategy: raw.train.strategy,
            seed: raw.train.seed,
            early_stop_backward: raw.train.early_stop_backward,
        };
        if raw.train.epochs == 0 {
            violations.push("train.epochs: must be at least 1".into());
        }
        if raw.train.batch_size == 0 {
            violations.push("train.batch_size: must be at least 1".into());
        }
        if let Err(e) = train_config.validate() {
            violations.push(format!("train: {e}"));
        }
        if !(0.0..1.0).contains(&raw.train.adam_beta1)
            || !(0.0..1.0).contains(&raw.train.adam_beta2)
            || !(raw.train.adam_epsilon > 0.0)
        {
            violations.push(
                "train.adam_beta1/adam_beta2/adam_epsilon: betas must lie in [0, 1) and \
                 epsilon must be positive"
                    .into(),
            );
        }

        // Dataset section.
        if raw.dataset.size < 4 {
            violations.push(format!(
                "dataset.size: must be at least 4, got {}",
                raw.dataset.size
            ));
        }
        if !(raw.dataset.split > 0.0 && raw.dataset.split < 1.0) {
            violations.push(format!(
                "dataset.split: must lie in (0, 1), got {}",
                raw.dataset.split
            ));
        }
        if !(raw.dataset.noise >= 0.0) {
            violations.push(format!(
                "dataset.noise: must be non-negative, got {}",
                raw.dataset.noise
            ));
        }
        if raw.dataset.generator == Generator::File {
            if raw.dataset.features_path.is_none() {
                violations.push("dataset.features_path: required for the file generator".into());
            }
            if raw.dataset.labels_path.is_none() {
                violations.push("dataset.labels_path: required for the file generator".into());
            }
        }

        // Check section.
        if !(raw.check.epsilon > 0.0) {
            violations.push(format!(
                "check.epsilon: must be positive, got {}",
                raw.check.epsilon
            ));
        }
        if raw.check.grid_min_exp < 2 {
            violations.push("check.grid_min_exp: must be at least 2".into());
        }
        if !(raw.check.tolerance > 0.0) {
            violations.push(format!(
                "check.tolerance: must be positive, got {}",
                raw.check.tolerance
            ));
        }
        if let Some(rates) = &raw.check.rate_exponents {
            let expected = raw.network.hidden.len() + 1;
            if rates.len() != expected {
                violations.push(format!(
                    "check.rate_exponents: need {expected} entries (one per layer), got {}",
                    rates.len()
                ));
            }
            if rates.iter().any(|&r| !(r > 0.0)) {
                violations.push("check.rate_exponents: exponents must be positive".into());
            }
        }

        if raw.sweep.forward_strategies.is_empty() {
            violations.push("sweep.forward_strategies: must not be empty".into());
        }

        if !violations.is_empty() {
            return Err(Error::Config(violations.join("; ")));
        }

        Ok((
            ExperimentConfig {
                network: raw.network,
                noise: raw.noise,
                schedule,
                train: raw.train,
                dataset: raw.dataset,
                regcurve: raw.regcurve,
                check: raw.check,
                sweep: raw.sweep,
                output: raw.output,
            },
            warnings,
        ))
    }

    /// Noise parameters at full regularisation (λ = 1).
    pub fn initial_noise(&self) -> Result<NoiseParams> {
        let mean = if self.noise.static_mean {
            0.0
        } else {
            self.noise.c_alpha
        };
        NoiseParams::new(mean, self.noise.c_beta)
    }

    /// The feature activation shared by all hidden layers.
    pub fn feature_activation(&self) -> Result<RegularisedActivation> {
        let quantiser = self
            .network
            .activation
            .to_quantiser()?
            .ok_or_else(|| Error::Config("network.activation: hidden layers need a quantiser".into()))?;
        Ok(RegularisedActivation::new(
            quantiser,
            self.noise.family,
            self.initial_noise()?,
            self.train.strategy,
        ))
    }

    /// The weight activation, if weights are quantised.
    pub fn weight_activation(&self) -> Result<Option<RegularisedActivation>> {
        Ok(self.network.weight_quantiser.to_quantiser()?.map(|q| {
            RegularisedActivation::new(
                q,
                self.noise.family,
                self.initial_noise().expect("validated"),
                self.train.strategy,
            )
        }))
    }

    /// Builds the network (hidden layers quantised, output layer plain) and
    /// initialises its latent weights from the training seed.
    pub fn build_network(&self) -> Result<Network> {
        let act = self.feature_activation()?;
        let wact = self.weight_activation()?;
        let mut sizes = vec![self.network.input];
        sizes.extend_from_slice(&self.network.hidden);
        sizes.push(self.network.output);
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for (i, w) in sizes.windows(2).enumerate() {
            let last = i == sizes.len() - 2;
            let layer = if last {
                Layer::new(w[0], w[1], None, None)?
            } else {
                Layer::new(w[0], w[1], Some(act.clone()), wact.clone())?
            };
            layers.push(layer);
        }
        let mut net = Network::new(layers)?;
        net.init_uniform(self.train.seed);
        Ok(net)
    }

    /// Base per-layer schedule law (ranges filled in by the strategy).
    pub fn base_layer_spec(&self) -> LayerScheduleSpec {
        LayerScheduleSpec {
            range: AnnealingRange::new(0, 1).expect("placeholder range"),
            c_alpha: self.noise.c_alpha,
            c_beta: self.noise.c_beta,
            d_alpha: 1,
            d_beta: 1,
            static_mean: self.noise.static_mean,
            static_variance: self.noise.static_variance,
        }
    }

    /// Number of iterations in one training run over `train_len` samples.
    pub fn total_iterations(&self, train_len: usize) -> u64 {
        let per_epoch = train_len.div_ceil(self.train.batch_size.max(1));
        (self.train.epochs as u64) * (per_epoch as u64)
    }

    /// Builds the per-layer schedule for the given training-set size, using
    /// the configured decay interval and power law.
    pub fn schedule_for(&self, train_len: usize) -> Result<Vec<LayerScheduleSpec>> {
        self.schedule_for_strategy(
            train_len,
            ScheduleStrategy {
                decay_interval: self.schedule.decay_interval,
                decay_power_law: self.schedule.decay_power_law,
            },
        )
    }

    /// Builds the schedule under an explicit strategy (used by the sweep).
    pub fn schedule_for_strategy(
        &self,
        train_len: usize,
        strategy: ScheduleStrategy,
    ) -> Result<Vec<LayerScheduleSpec>> {
        let layers = self.network.hidden.len();
        let base = self.base_layer_spec();
        if self.noise.static_mean && self.noise.static_variance {
            // Fully static: ranges are irrelevant, one static law per layer.
            return Ok(vec![base; layers]);
        }
        let total = self.total_iterations(train_len);
        let t_anneal =
            ((total as f64) * self.schedule.anneal_fraction).round().max(layers as f64) as u64;
        if layers == 1 {
            // A single scheduled layer needs no inter-layer strategy.
            let mut spec = base;
            spec.range = AnnealingRange::new(0, t_anneal.max(1))?;
            return Ok(vec![spec]);
        }
        build_schedule(strategy, layers, t_anneal, &base)
    }

    /// The trainer configuration with the optimiser resolved.
    pub fn train_config(&self) -> TrainConfig {
        let optimiser = match self.train.optimiser.as_str() {
            "sgd" => Optimiser::Sgd,
            _ => Optimiser::Adam {
                beta1: self.train.adam_beta1,
                beta2: self.train.adam_beta2,
                epsilon: self.train.adam_epsilon,
            },
        };
        TrainConfig {
            epochs: self.train.epochs,
            batch_size: self.train.batch_size,
            learning_rate: self.train.learning_rate,
            lr_drop: self.train.lr_drop_epoch.zip(self.train.lr_drop_factor),
            optimiser,
            strategy: self.train.strategy,
            seed: self.train.seed,
            early_stop_backward: self.train.early_stop_backward,
        }
    }

    /// The dataset spec; its seed defaults to the training seed.
    pub fn dataset_spec(&self) -> DatasetSpec {
        DatasetSpec {
            generator: self.dataset.generator.clone(),
            size: self.dataset.size,
            noise: self.dataset.noise,
            split: self.dataset.split,
            seed: self.dataset.seed.unwrap_or(self.train.seed),
            features_path: self.dataset.features_path.clone(),
            labels_path: self.dataset.labels_path.clone(),
        }
    }

    /// All network layer sizes, input first.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.network.input];
        sizes.extend_from_slice(&self.network.hidden);
        sizes.push(self.network.output);
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [network]
        input = 2
        hidden = [8, 8]
        output = 2

        [noise]
        family = "uniform"

        [train]
        strategy = "mode"
        epochs = 10
        seed = 1

        [dataset]
        generator = "two_moons"
        size = 100
    "#;

    #[test]
    fn minimal_config_fills_defaults() {
        let (cfg, warnings) = ExperimentConfig::parse(MINIMAL).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(cfg.schedule.decay_interval, DecayInterval::Partition);
        assert_eq!(cfg.schedule.decay_power_law, DecayPowerLaw::Homogeneous);
        assert!((cfg.schedule.anneal_fraction - 0.7).abs() < 1e-12);
        assert_eq!(cfg.train.batch_size, 32);
        assert!((cfg.noise.c_beta - 0.28867513459481287).abs() < 1e-12);
        assert_eq!(cfg.dataset.split, 0.8);
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
        assert_eq!(cfg.regcurve.x_min, -2.0);

        let net = cfg.build_network().unwrap();
        assert_eq!(net.layer_count(), 3);
        assert!(net.layers()[0].activation().is_some());
        assert!(net.layers()[0].weight_activation().is_some());
        assert!(net.layers()[2].activation().is_none());
        assert!(net.layers()[2].weight_activation().is_none());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("[noise]", "[noise]\n        wobble = 3");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("wobble"), "{err}");
    }

    #[test]
    fn pruned_combination_rejected() {
        let text = MINIMAL
            .replace("family = \"uniform\"", "family = \"uniform\"\n        static_variance = true")
            .replace("strategy = \"mode\"", "strategy = \"expectation\"");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("train.strategy"), "{err}");
    }

    #[test]
    fn static_schedule_keys_warn() {
        let text = MINIMAL
            .replace(
                "family = \"uniform\"",
                "family = \"uniform\"\n        static_variance = true",
            )
            .replace(
                "[train]",
                "[schedule]\n        decay_interval = \"same_end\"\n\n        [train]",
            );
        let (cfg, warnings) = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("decay_interval"));
        assert_eq!(cfg.schedule.decay_interval, DecayInterval::SameEnd);
    }

    #[test]
    fn violations_are_collected_with_key_names() {
        let text = MINIMAL
            .replace("epochs = 10", "epochs = 0")
            .replace("size = 100", "size = 2");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("train.epochs"), "{err}");
        assert!(err.contains("dataset.size"), "{err}");
    }

    #[test]
    fn c_alpha_constraints() {
        let bad = MINIMAL.replace(
            "family = \"uniform\"",
            "family = \"uniform\"\n        c_alpha = 0.3",
        );
        assert!(ExperimentConfig::parse(&bad).is_err());

        let dynamic = MINIMAL.replace(
            "family = \"uniform\"",
            "family = \"uniform\"\n        static_mean = false\n        c_alpha = 0.5",
        );
        let (cfg, _) = ExperimentConfig::parse(&dynamic).unwrap();
        assert_eq!(cfg.initial_noise().unwrap().mean(), 0.5);
    }

    #[test]
    fn custom_and_linear_quantisers_parse() {
        let custom = MINIMAL.replace(
            "output = 2",
            "output = 2\n        activation = { levels = [0.0, 1.0], thresholds = [0.5] }\n        weight_quantiser = \"none\"",
        );
        let (cfg, _) = ExperimentConfig::parse(&custom).unwrap();
        let net = cfg.build_network().unwrap();
        assert!(net.layers()[0].weight_activation().is_none());
        assert_eq!(
            net.layers()[0].activation().unwrap().quantiser().thresholds(),
            &[0.5]
        );

        let linear = MINIMAL.replace(
            "output = 2",
            "output = 2\n        activation = { offset = 0, quantum = 0.25, bits = 2 }",
        );
        let (cfg, _) = ExperimentConfig::parse(&linear).unwrap();
        let net = cfg.build_network().unwrap();
        assert_eq!(net.layers()[0].activation().unwrap().quantiser().level_count(), 4);
    }

    #[test]
    fn schedule_building_matches_iterations() {
        let (cfg, _) = ExperimentConfig::parse(MINIMAL).unwrap();
        // 100 rows, split 0.8 -> 80 train rows; batch 32 -> 3 iterations per
        // epoch; 10 epochs -> 30 iterations; anneal window 21.
        assert_eq!(cfg.total_iterations(80), 30);
        let schedule = cfg.schedule_for(80).unwrap();
        assert_eq!(schedule.len(), 2);
        assert_eq!(schedule[0].range.t_start(), 0);
        assert_eq!(schedule[1].range.t_end(), 21);
    }

    #[test]
    fn fully_static_schedule_ignores_ranges() {
        let text = MINIMAL.replace(
            "family = \"uniform\"",
            "family = \"uniform\"\n        static_variance = true",
        );
        let (cfg, _) = ExperimentConfig::parse(&text).unwrap();
        let schedule = cfg.schedule_for(80).unwrap();
        assert!(schedule.iter().all(|s| s.static_mean && s.static_variance));
        let p0 = schedule[0].params_at(0);
        let p1 = schedule[0].params_at(1_000_000);
        assert_eq!(p0, p1);
    }
}
