//! The annealed training loop.
//!
//! Each iteration performs a schedule look-up for every layer, one forward
//! pass with the configured strategy, one backward pass, and one optimiser
//! update. Schedules are indexed by the minibatch counter `t`; gradients are
//! averaged over the minibatch. All randomness (shuffling, initialisation,
//! random-forward sampling) is derived from the single config seed through
//! separate ChaCha streams, so identical configs reproduce identical logs
//! and parameters bit for bit.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::network::{EvalMode, Gradients, Network, NetworkRng};
use crate::noise::NoiseParams;
use crate::regulariser::ForwardStrategy;
use crate::schedule::LayerScheduleSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameter-update rule.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Optimiser {
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimiser {
    /// ADAM with the usual defaults (0.9, 0.999, 1e−8).
    pub fn adam() -> Self {
        Optimiser::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// `θ ← θ − η·g`.
pub fn sgd_step(params: &mut [f64], grads: &[f64], lr: f64) {
    for (p, g) in params.iter_mut().zip(grads) {
        *p -= lr * g;
    }
}

/// First and second moment buffers for one parameter group.
#[derive(Debug, Clone)]
pub struct AdamMoments {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamMoments {
    pub fn zeros(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// One bias-corrected ADAM update; `step` starts at 1.
#[allow(clippy::too_many_arguments)]
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    moments: &mut AdamMoments,
    lr: f64,
    step: u64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) {
    let bc1 = 1.0 - beta1.powi(step as i32);
    let bc2 = 1.0 - beta2.powi(step as i32);
    for i in 0..params.len() {
        let g = grads[i];
        moments.m[i] = beta1 * moments.m[i] + (1.0 - beta1) * g;
        moments.v[i] = beta2 * moments.v[i] + (1.0 - beta2) * g * g;
        let m_hat = moments.m[i] / bc1;
        let v_hat = moments.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
    }
}

/// Optimiser state across a whole network (one moment buffer per weight
/// matrix and bias vector).
#[derive(Debug, Clone)]
pub struct OptimiserState {
    kind: Optimiser,
    weight_moments: Vec<AdamMoments>,
    bias_moments: Vec<AdamMoments>,
    step: u64,
}

impl OptimiserState {
    pub fn new(kind: Optimiser, net: &Network) -> Self {
        let (weight_moments, bias_moments) = match kind {
            Optimiser::Sgd => (Vec::new(), Vec::new()),
            Optimiser::Adam { .. } => (
                net.layers()
                    .iter()
                    .map(|l| AdamMoments::zeros(l.weight().len()))
                    .collect(),
                net.layers()
                    .iter()
                    .map(|l| AdamMoments::zeros(l.bias().len()))
                    .collect(),
            ),
        };
        Self {
            kind,
            weight_moments,
            bias_moments,
            step: 0,
        }
    }

    /// Applies one update with the given learning rate.
    pub fn apply(&mut self, net: &mut Network, grads: &Gradients, lr: f64) {
        self.step += 1;
        match self.kind {
            Optimiser::Sgd => {
                for (l, layer) in net.layers_mut().iter_mut().enumerate() {
                    sgd_step(layer.weight_mut(), &grads.weight[l], lr);
                    sgd_step(layer.bias_mut(), &grads.bias[l], lr);
                }
            }
            Optimiser::Adam {
                beta1,
                beta2,
                epsilon,
            } => {
                for (l, layer) in net.layers_mut().iter_mut().enumerate() {
                    adam_step(
                        layer.weight_mut(),
                        &grads.weight[l],
                        &mut self.weight_moments[l],
                        lr,
                        self.step,
                        beta1,
                        beta2,
                        epsilon,
                    );
                    adam_step(
                        layer.bias_mut(),
                        &grads.bias[l],
                        &mut self.bias_moments[l],
                        lr,
                        self.step,
                        beta1,
                        beta2,
                        epsilon,
                    );
                }
            }
        }
    }
}

/// Softmax cross-entropy with log-sum-exp stabilisation.
///
/// Returns the loss and its gradient `softmax(logits) − onehot(label)`.
pub fn cross_entropy(logits: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
    if label >= logits.len() {
        return Err(Error::Domain(format!(
            "label {label} out of range for {} logits",
            logits.len()
        )));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|&z| (z - max).exp()).sum();
    let lse = max + sum.ln();
    let loss = lse - logits[label];
    let mut grad: Vec<f64> = logits.iter().map(|&z| (z - lse).exp()).collect();
    grad[label] -= 1.0;
    Ok((loss, grad))
}

/// Training-loop hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Multiply the learning rate by `factor` after `epoch`.
    pub lr_drop: Option<(usize, f64)>,
    pub optimiser: Optimiser,
    pub strategy: ForwardStrategy,
    pub seed: u64,
    /// Stop the backward walk at annealed activations. Bit-identical to the
    /// full walk; off by default.
    pub early_stop_backward: bool,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if let Some((_, factor)) = self.lr_drop {
            if !(factor > 0.0) || !factor.is_finite() {
                return Err(Error::Config(format!(
                    "learning-rate drop factor must be positive, got {factor}"
                )));
            }
        }
        if let Optimiser::Adam {
            beta1,
            beta2,
            epsilon,
        } = self.optimiser
        {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || !(epsilon > 0.0) {
                return Err(Error::Config(
                    "adam needs beta1, beta2 in [0, 1) and epsilon > 0".into(),
                ));
            }
        }
        Ok(())
    }

    fn lr_at(&self, epoch: usize) -> f64 {
        match self.lr_drop {
            Some((drop_epoch, factor)) if epoch > drop_epoch => self.learning_rate * factor,
            _ => self.learning_rate,
        }
    }
}

/// One row of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    /// Validation accuracy of the noise-regularised network (current noise,
    /// configured strategy).
    pub val_acc_regularised: f64,
    /// Validation accuracy of the fully quantised network.
    pub val_acc_quantised: f64,
    /// `(mean, std)` per scheduled layer at the end of the epoch.
    pub layer_noise: Vec<(f64, f64)>,
}

/// Per-epoch metrics of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochRecord>,
}

/// A finished run: the trained network plus its log.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    pub log: TrainLog,
}

/// Training failure modes; a numeric abort carries the partial log.
#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("non-finite loss at epoch {epoch}, iteration {iteration}")]
    NonFiniteLoss {
        epoch: usize,
        iteration: u64,
        partial_log: Box<TrainLog>,
    },
    #[error(transparent)]
    Core(#[from] Error),
}

/// Schedule look-up for layer `layer_idx` at iteration `t`, installed into
/// the layer's feature and weight activations. Layers without activations
/// (the floating-point output layer) are a no-op returning `None`.
pub fn set_noise(
    net: &mut Network,
    schedule: &[LayerScheduleSpec],
    layer_idx: usize,
    t: u64,
) -> Option<NoiseParams> {
    if !net.layers()[layer_idx].is_scheduled() {
        return None;
    }
    let position = net
        .layers()
        .iter()
        .take(layer_idx)
        .filter(|l| l.is_scheduled())
        .count();
    let params = schedule[position].params_at(t);
    net.set_layer_noise(layer_idx, params);
    Some(params)
}

/// Classification accuracy of `net` on `data` under `mode`.
pub fn accuracy(
    net: &Network,
    data: &Dataset,
    mode: EvalMode,
    mut rng: Option<&mut NetworkRng>,
) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let eff = net.effective_weights(mode, rng.as_deref_mut())?;
    let mut correct = 0usize;
    for (x, &label) in data.features().iter().zip(data.labels()) {
        let trace = net.forward_cached(&eff, x, mode, rng.as_deref_mut())?;
        if argmax(trace.output()) == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn derive_seed(master: u64, tag: u64) -> u64 {
    // splitmix64 of master xor a tag constant.
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const SHUFFLE_STREAM: u64 = 2;
const EVAL_TAG: u64 = 0x45_56_41_4C; // "EVAL"

/// Runs the annealed training loop for `config.epochs` epochs.
///
/// `schedule` holds one spec per scheduled layer, in network order. The
/// validation set is evaluated twice per epoch: with the live noise and
/// with the noise annealed (quantised).
pub fn train(
    mut net: Network,
    schedule: &[LayerScheduleSpec],
    train_data: &Dataset,
    val_data: &Dataset,
    config: &TrainConfig,
) -> std::result::Result<TrainOutcome, TrainError> {
    config.validate().map_err(TrainError::Core)?;
    let scheduled = net.layers().iter().filter(|l| l.is_scheduled()).count();
    if scheduled != schedule.len() {
        return Err(TrainError::Core(Error::Config(format!(
            "network has {scheduled} scheduled layers but the schedule has {} entries",
            schedule.len()
        ))));
    }
    if train_data.dim() != net.input_size() || train_data.classes() > net.output_size() {
        return Err(TrainError::Core(Error::Config(
            "network input/output sizes do not match the dataset".into(),
        )));
    }
    for spec in schedule {
        spec.validate().map_err(TrainError::Core)?;
    }

    let mode = EvalMode::Regularised(config.strategy);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(SHUFFLE_STREAM);
    let mut net_rng = NetworkRng::new(config.seed, net.layer_count());
    let mut optimiser = OptimiserState::new(config.optimiser, &net);
    let mut grads = Gradients::zeros_like(&net);
    let mut log = TrainLog::default();
    let mut t: u64 = 0;
    let layer_count = net.layer_count();

    for epoch in 1..=config.epochs {
        let lr = config.lr_at(epoch);
        let mut order: Vec<usize> = (0..train_data.len()).collect();
        for i in (1..order.len()).rev() {
            let j = shuffle_rng.gen_range(0..=i);
            order.swap(i, j);
        }

        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for batch in order.chunks(config.batch_size) {
            t += 1;
            for l in 0..layer_count {
                set_noise(&mut net, schedule, l, t);
            }
            let step = run_batch(
                &net,
                batch,
                train_data,
                mode,
                &mut net_rng,
                &mut grads,
                config.early_stop_backward,
            );
            let (batch_loss, batch_correct) = match step {
                Ok(v) => v,
                Err(Error::Numeric(_)) => {
                    return Err(TrainError::NonFiniteLoss {
                        epoch,
                        iteration: t,
                        partial_log: Box::new(log),
                    });
                }
                Err(e) => return Err(TrainError::Core(e)),
            };
            if !batch_loss.is_finite() {
                return Err(TrainError::NonFiniteLoss {
                    epoch,
                    iteration: t,
                    partial_log: Box::new(log),
                });
            }
            loss_sum += batch_loss * batch.len() as f64;
            correct += batch_correct;
            grads.scale(1.0 / batch.len() as f64);
            optimiser.apply(&mut net, &grads, lr);
        }

        let mut eval_rng =
            NetworkRng::new(derive_seed(config.seed, EVAL_TAG ^ epoch as u64), layer_count);
        let val_acc_regularised = accuracy(&net, val_data, mode, Some(&mut eval_rng))?;
        let val_acc_quantised = accuracy(&net, val_data, EvalMode::Quantised, None)?;
        let layer_noise = schedule.iter().map(|s| {
            let p = s.params_at(t);
            (p.mean(), p.std())
        });
        log.epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / train_data.len() as f64,
            train_acc: correct as f64 / train_data.len() as f64,
            val_acc_regularised,
            val_acc_quantised,
            layer_noise: layer_noise.collect(),
        });
    }

    Ok(TrainOutcome { network: net, log })
}

/// Forward/backward over one minibatch; leaves the summed gradients in
/// `grads` and returns (mean loss, correct count).
fn run_batch(
    net: &Network,
    batch: &[usize],
    data: &Dataset,
    mode: EvalMode,
    net_rng: &mut NetworkRng,
    grads: &mut Gradients,
    early_stop: bool,
) -> Result<(f64, usize)> {
    grads.zero();
    let eff = net.effective_weights(mode, Some(net_rng))?;
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    for &idx in batch {
        let x = &data.features()[idx];
        let label = data.labels()[idx];
        let trace = net.forward_cached(&eff, x, mode, Some(net_rng))?;
        let (loss, dloss) = cross_entropy(trace.output(), label)?;
        if argmax(trace.output()) == label {
            correct += 1;
        }
        loss_sum += loss;
        net.backward(&eff, &trace, &dloss, grads, early_stop)?;
    }
    Ok((loss_sum / batch.len() as f64, correct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseFamily;
    use crate::quantiser::Quantiser;
    use crate::regulariser::RegularisedActivation;
    use crate::schedule::{
        build_schedule, AnnealingRange, DecayInterval, DecayPowerLaw, ScheduleStrategy,
    };

    #[test]
    fn sgd_reference_step() {
        let mut p = [1.0];
        sgd_step(&mut p, &[2.0], 0.1);
        assert!((p[0] - 0.8).abs() < 1e-15);
        sgd_step(&mut p, &[0.0], 0.1);
        assert!((p[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn adam_first_step_magnitude_is_lr() {
        // Bias correction makes the first update ≈ η·sign(g) for any scale.
        for g in [1e-3, 1.0, 1e3] {
            let mut p = [0.0];
            let mut m = AdamMoments::zeros(1);
            adam_step(&mut p, &[g], &mut m, 0.01, 1, 0.9, 0.999, 1e-8);
            assert!(
                (p[0].abs() - 0.01).abs() < 1e-6,
                "gradient {g} gave step {}",
                p[0]
            );
            assert!(p[0] < 0.0);
        }
    }

    #[test]
    fn cross_entropy_reference_values() {
        let k = 5;
        let (loss, grad) = cross_entropy(&vec![0.7; k], 2).unwrap();
        assert!((loss - (k as f64).ln()).abs() < 1e-12);
        assert!(grad.iter().sum::<f64>().abs() < 1e-12);

        let mut logits = vec![0.0; 4];
        logits[1] = 10.0;
        let (loss, grad) = cross_entropy(&logits, 1).unwrap();
        assert!(loss < 1e-3);
        assert!(grad.iter().sum::<f64>().abs() < 1e-12);

        assert!(cross_entropy(&[0.0, 1.0], 2).is_err());
    }

    fn ternary_act(strategy: ForwardStrategy) -> RegularisedActivation {
        RegularisedActivation::new(
            Quantiser::ternary(),
            NoiseFamily::Uniform,
            NoiseParams::new(0.0, 0.3).unwrap(),
            strategy,
        )
    }

    fn small_net(seed: u64) -> Network {
        let act = ternary_act(ForwardStrategy::Mode);
        let l1 = crate::network::Layer::new(2, 8, Some(act.clone()), None).unwrap();
        let l2 = crate::network::Layer::new(8, 2, None, None).unwrap();
        let mut net = Network::new(vec![l1, l2]).unwrap();
        net.init_uniform(seed);
        net
    }

    fn static_schedule() -> Vec<LayerScheduleSpec> {
        vec![LayerScheduleSpec {
            range: AnnealingRange::new(0, 1).unwrap(),
            c_alpha: 0.0,
            c_beta: 1.0 / (2.0 * 3.0_f64.sqrt()),
            d_alpha: 1,
            d_beta: 1,
            static_mean: true,
            static_variance: true,
        }]
    }

    fn quick_config(strategy: ForwardStrategy, epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            batch_size: 16,
            learning_rate: 1e-2,
            lr_drop: None,
            optimiser: Optimiser::adam(),
            strategy,
            seed: 7,
            early_stop_backward: false,
        }
    }

    fn blobs() -> (Dataset, Dataset) {
        let spec = crate::dataset::DatasetSpec {
            generator: crate::dataset::Generator::GaussianBlobs,
            size: 400,
            noise: 0.3,
            split: 0.8,
            seed: 5,
            features_path: None,
            labels_path: None,
        };
        crate::dataset::generate(&spec).unwrap()
    }

    #[test]
    fn set_noise_static_and_annealed() {
        let mut net = small_net(1);
        let schedule = static_schedule();
        let a = set_noise(&mut net, &schedule, 0, 1).unwrap();
        let b = set_noise(&mut net, &schedule, 0, 100_000).unwrap();
        assert_eq!(a, b);
        // Output layer has no schedule.
        assert!(set_noise(&mut net, &schedule, 1, 1).is_none());

        let dynamic = vec![LayerScheduleSpec {
            range: AnnealingRange::new(0, 10).unwrap(),
            static_variance: false,
            ..schedule[0]
        }];
        let p = set_noise(&mut net, &dynamic, 0, 11).unwrap();
        assert_eq!(p.std(), 0.0);
        assert!(net.layers()[0].activation().unwrap().is_annealed());
    }

    #[test]
    fn partition_slices_gate_noise_by_depth() {
        let base = LayerScheduleSpec {
            range: AnnealingRange::new(0, 1).unwrap(),
            c_alpha: 0.0,
            c_beta: 0.5,
            d_alpha: 1,
            d_beta: 1,
            static_mean: true,
            static_variance: false,
        };
        let strat = ScheduleStrategy {
            decay_interval: DecayInterval::Partition,
            decay_power_law: DecayPowerLaw::Homogeneous,
        };
        let schedule = build_schedule(strat, 3, 300, &base).unwrap();
        // Inside slice 2 (t in [100, 200)): layer 1 annealed, layers 2-3 not.
        let t = 150;
        assert_eq!(schedule[0].params_at(t).std(), 0.0);
        assert!(schedule[1].params_at(t).std() > 0.0);
        assert!(schedule[2].params_at(t).std() > 0.0);
    }

    #[test]
    fn zero_learning_rate_leaves_parameters() {
        let net = small_net(3);
        let before: Vec<f64> = net.layers()[0].weight().to_vec();
        let (train_ds, val_ds) = blobs();
        let mut cfg = quick_config(ForwardStrategy::Mode, 2);
        cfg.learning_rate = 1e-300; // effectively zero, but still valid
        let out = train(net, &static_schedule(), &train_ds, &val_ds, &cfg).unwrap();
        for (a, b) in before.iter().zip(out.network.layers()[0].weight()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(out.log.epochs.len(), 2);
    }

    #[test]
    fn identical_seeds_identical_runs() {
        let (train_ds, val_ds) = blobs();
        for strategy in ForwardStrategy::ALL {
            let cfg = quick_config(strategy, 3);
            let a = train(small_net(2), &static_schedule(), &train_ds, &val_ds, &cfg).unwrap();
            let b = train(small_net(2), &static_schedule(), &train_ds, &val_ds, &cfg).unwrap();
            assert_eq!(a.log, b.log, "{strategy} log differs");
            for (la, lb) in a.network.layers().iter().zip(b.network.layers()) {
                for (x, y) in la.weight().iter().zip(lb.weight()) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }

    #[test]
    fn separable_blobs_reach_high_accuracy() {
        let (train_ds, val_ds) = blobs();
        let cfg = quick_config(ForwardStrategy::Mode, 50);
        let out = train(small_net(4), &static_schedule(), &train_ds, &val_ds, &cfg).unwrap();
        let final_acc = out.log.epochs.last().unwrap().train_acc;
        assert!(final_acc >= 0.95, "train accuracy {final_acc}");
    }

    #[test]
    fn non_finite_loss_aborts_with_partial_log() {
        // One absurd feature value: the first epoch drives the weights to a
        // scale where re-encountering that row overflows the forward pass.
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..64 {
            let c = if i % 2 == 0 { -1.0 } else { 1.0 };
            features.push(vec![c, c]);
            labels.push(if i % 2 == 0 { 0 } else { 1 });
        }
        features[0][0] = f64::MAX / 4.0;
        let train_ds = Dataset::new(features, labels, 2).unwrap();
        let val_ds = crate::dataset::gaussian_blobs(32, 0.1, 0);

        let mut net = Network::new(vec![crate::network::Layer::new(2, 2, None, None).unwrap()])
            .unwrap();
        // Make the poisoned row (label 0) mispredicted so its saturated
        // softmax gradient is ±1, not an exact zero.
        net.layers_mut()[0]
            .weight_mut()
            .copy_from_slice(&[0.1, 0.2, 0.5, -0.3]);
        let mut cfg = quick_config(ForwardStrategy::Mode, 5);
        cfg.optimiser = Optimiser::Sgd;
        let err = train(net, &[], &train_ds, &val_ds, &cfg).unwrap_err();
        match err {
            TrainError::NonFiniteLoss {
                epoch,
                iteration,
                partial_log,
            } => {
                assert_eq!(epoch, 2);
                assert!(iteration >= 1);
                assert_eq!(partial_log.epochs.len(), 1);
            }
            other => panic!("expected a numeric abort, got {other}"),
        }
    }

    #[test]
    fn schedule_length_must_match() {
        let (train_ds, val_ds) = blobs();
        let cfg = quick_config(ForwardStrategy::Mode, 1);
        let err = train(small_net(6), &[], &train_ds, &val_ds, &cfg);
        assert!(err.is_err());
    }
}
