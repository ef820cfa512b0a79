//! Quantised feedforward networks.
//!
//! A network is a chain of affine maps with element-wise activations. Hidden
//! activations and (optionally) the weights of each layer pass through a
//! [`RegularisedActivation`]; the stored weights and biases stay real-valued
//! ("latent") and are what the optimiser updates. The forward pass can run
//! `Quantised` (noise ignored, plain stair functions) or `Regularised` with
//! any forward strategy; the backward pass always chains the expectation
//! derivative through pre-activations and latent weights, so the gradient is
//! the same function of the trace regardless of the forward strategy.
//!
//! Gradient terms multiplied by a zero local derivative are written as exact
//! `+0.0` and skipped in the accumulations. Once an annealed activation is
//! reached, everything upstream is exactly zero, which is why
//! [`Network::backward`] can optionally stop early without changing a single
//! bit of the result.

use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::regulariser::{ForwardStrategy, RegularisedActivation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// How a forward pass evaluates the stochastic activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Plain stair functions everywhere (noise treated as annealed).
    Quantised,
    /// Noise-regularised evaluation with the given forward strategy.
    Regularised(ForwardStrategy),
}

/// Per-layer ChaCha streams for the random forward strategy, all derived
/// from one seed so runs are reproducible.
#[derive(Debug, Clone)]
pub struct NetworkRng {
    streams: Vec<ChaCha8Rng>,
}

impl NetworkRng {
    const LAYER_STREAM_BASE: u64 = 16;

    /// One independent stream per layer, derived from `seed`.
    pub fn new(seed: u64, layers: usize) -> Self {
        let streams = (0..layers)
            .map(|l| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(Self::LAYER_STREAM_BASE + l as u64);
                rng
            })
            .collect();
        Self { streams }
    }

    fn layer(&mut self, idx: usize) -> &mut ChaCha8Rng {
        &mut self.streams[idx]
    }
}

/// One affine layer with optional feature and weight activations.
#[derive(Debug, Clone)]
pub struct Layer {
    n_in: usize,
    n_out: usize,
    weight: Vec<f64>,
    bias: Vec<f64>,
    activation: Option<RegularisedActivation>,
    weight_activation: Option<RegularisedActivation>,
}

impl Layer {
    /// A layer with zeroed parameters.
    pub fn new(
        n_in: usize,
        n_out: usize,
        activation: Option<RegularisedActivation>,
        weight_activation: Option<RegularisedActivation>,
    ) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::Config(format!(
                "layer sizes must be positive, got {n_in}x{n_out}"
            )));
        }
        Ok(Self {
            n_in,
            n_out,
            weight: vec![0.0; n_in * n_out],
            bias: vec![0.0; n_out],
            activation,
            weight_activation,
        })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Latent weight matrix, row-major `n_out × n_in`.
    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn weight_mut(&mut self) -> &mut [f64] {
        &mut self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn activation(&self) -> Option<&RegularisedActivation> {
        self.activation.as_ref()
    }

    pub fn weight_activation(&self) -> Option<&RegularisedActivation> {
        self.weight_activation.as_ref()
    }

    /// True if the layer has a feature or weight activation to schedule.
    pub fn is_scheduled(&self) -> bool {
        self.activation.is_some() || self.weight_activation.is_some()
    }

    /// Installs noise parameters in both the feature and weight activations.
    pub fn set_noise(&mut self, params: NoiseParams) {
        if let Some(act) = self.activation.as_mut() {
            act.set_params(params);
        }
        if let Some(act) = self.weight_activation.as_mut() {
            act.set_params(params);
        }
    }

    /// Latent weights drawn uniformly from `[−1/√n_in, +1/√n_in]`; biases zero.
    pub fn init_uniform<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let bound = 1.0 / (self.n_in as f64).sqrt();
        for w in &mut self.weight {
            *w = rng.gen_range(-bound..bound);
        }
        for b in &mut self.bias {
            *b = 0.0;
        }
    }
}

/// The effective (quantised/regularised) weights used by one forward pass,
/// with the expectation derivative for chaining into the latent weights.
#[derive(Debug, Clone)]
pub struct EffectiveWeights {
    layers: Vec<LayerWeights>,
}

#[derive(Debug, Clone)]
struct LayerWeights {
    w_eff: Vec<f64>,
    /// `∂w_eff/∂w_latent`, element-wise; `None` when weights are not
    /// quantised (scale 1).
    w_dscale: Option<Vec<f64>>,
}

/// Cached features and pre-activations of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    mode: EvalMode,
    input: Vec<f64>,
    pre_acts: Vec<Vec<f64>>,
    features: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn input(&self) -> &[f64] {
        &self.input
    }

    /// Pre-activations `s_1 .. s_L`.
    pub fn pre_activations(&self) -> &[Vec<f64>] {
        &self.pre_acts
    }

    /// Features `x_1 .. x_L`; the last entry is the network output.
    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn output(&self) -> &[f64] {
        self.features.last().expect("network has at least one layer")
    }
}

/// Per-layer parameter gradients (latent weights and biases).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weight: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            weight: net.layers.iter().map(|l| vec![0.0; l.weight.len()]).collect(),
            bias: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    pub fn zero(&mut self) {
        for w in &mut self.weight {
            w.iter_mut().for_each(|v| *v = 0.0);
        }
        for b in &mut self.bias {
            b.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weight {
            w.iter_mut().for_each(|v| *v *= factor);
        }
        for b in &mut self.bias {
            b.iter_mut().for_each(|v| *v *= factor);
        }
    }
}

/// A feedforward network with latent real-valued parameters.
#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    /// Chains the layers, validating that sizes compose.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].n_out != pair[1].n_in {
                return Err(Error::Shape {
                    context: "layer chaining",
                    expected: pair[0].n_out,
                    got: pair[1].n_in,
                });
            }
            let _ = i;
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().expect("non-empty").n_out
    }

    /// Initialises every layer's latent weights from one stream.
    pub fn init_uniform(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        for layer in &mut self.layers {
            layer.init_uniform(&mut rng);
        }
    }

    /// Computes the effective weights for one forward pass. Under the random
    /// strategy each quantised weight is sampled once per call.
    pub fn effective_weights(
        &self,
        mode: EvalMode,
        mut rng: Option<&mut NetworkRng>,
    ) -> Result<EffectiveWeights> {
        let mut layers = Vec::with_capacity(self.layers.len());
        for (idx, layer) in self.layers.iter().enumerate() {
            let lw = match &layer.weight_activation {
                None => LayerWeights {
                    w_eff: layer.weight.clone(),
                    w_dscale: None,
                },
                Some(wact) => {
                    let mut w_eff = Vec::with_capacity(layer.weight.len());
                    let mut w_dscale = Vec::with_capacity(layer.weight.len());
                    match mode {
                        EvalMode::Quantised => {
                            for &w in &layer.weight {
                                w_eff.push(wact.quantised(w));
                                w_dscale.push(0.0);
                            }
                        }
                        EvalMode::Regularised(strategy) => {
                            for &w in &layer.weight {
                                let v = match strategy {
                                    ForwardStrategy::Expectation => wact.expectation_forward(w),
                                    ForwardStrategy::Mode => wact.mode_forward(w),
                                    ForwardStrategy::Random => {
                                        let rng = rng.as_mut().ok_or_else(|| {
                                            Error::Config(
                                                "random forward strategy needs rng streams".into(),
                                            )
                                        })?;
                                        wact.random_forward(w, rng.layer(idx))
                                    }
                                };
                                w_eff.push(v);
                                w_dscale.push(wact.backward(w));
                            }
                        }
                    }
                    LayerWeights {
                        w_eff,
                        w_dscale: Some(w_dscale),
                    }
                }
            };
            layers.push(lw);
        }
        Ok(EffectiveWeights { layers })
    }

    /// Forward pass reusing previously computed effective weights.
    pub fn forward_cached(
        &self,
        eff: &EffectiveWeights,
        x0: &[f64],
        mode: EvalMode,
        mut rng: Option<&mut NetworkRng>,
    ) -> Result<ForwardTrace> {
        if x0.len() != self.input_size() {
            return Err(Error::Shape {
                context: "network input",
                expected: self.input_size(),
                got: x0.len(),
            });
        }
        let mut pre_acts = Vec::with_capacity(self.layers.len());
        let mut features = Vec::with_capacity(self.layers.len());
        let mut x_prev: &[f64] = x0;
        for (idx, layer) in self.layers.iter().enumerate() {
            let w = &eff.layers[idx].w_eff;
            let mut s = vec![0.0; layer.n_out];
            for i in 0..layer.n_out {
                let row = &w[i * layer.n_in..(i + 1) * layer.n_in];
                let mut acc = layer.bias[i];
                for (wj, xj) in row.iter().zip(x_prev) {
                    acc += wj * xj;
                }
                s[i] = acc;
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite pre-activation in layer {idx}"
                )));
            }
            let x = match &layer.activation {
                None => s.clone(),
                Some(act) => {
                    let mut out = vec![0.0; layer.n_out];
                    match mode {
                        EvalMode::Quantised => {
                            for (o, &v) in out.iter_mut().zip(&s) {
                                *o = act.quantised(v);
                            }
                        }
                        EvalMode::Regularised(strategy) => match strategy {
                            ForwardStrategy::Expectation => {
                                for (o, &v) in out.iter_mut().zip(&s) {
                                    *o = act.expectation_forward(v);
                                }
                            }
                            ForwardStrategy::Mode => {
                                for (o, &v) in out.iter_mut().zip(&s) {
                                    *o = act.mode_forward(v);
                                }
                            }
                            ForwardStrategy::Random => {
                                let rng = rng.as_mut().ok_or_else(|| {
                                    Error::Config(
                                        "random forward strategy needs rng streams".into(),
                                    )
                                })?;
                                let stream = rng.layer(idx);
                                for (o, &v) in out.iter_mut().zip(&s) {
                                    *o = act.random_forward(v, stream);
                                }
                            }
                        },
                    }
                    out
                }
            };
            pre_acts.push(s);
            features.push(x);
            x_prev = features.last().expect("just pushed");
        }
        Ok(ForwardTrace {
            mode,
            input: x0.to_vec(),
            pre_acts,
            features,
        })
    }

    /// Forward pass from scratch (effective weights computed internally).
    pub fn forward(
        &self,
        x0: &[f64],
        mode: EvalMode,
        mut rng: Option<&mut NetworkRng>,
    ) -> Result<ForwardTrace> {
        let eff = self.effective_weights(mode, rng.as_deref_mut())?;
        self.forward_cached(&eff, x0, mode, rng)
    }

    /// Accumulates parameter gradients for one sample into `grads`.
    ///
    /// `dloss_doutput` is the loss gradient with respect to the network
    /// output. Local derivatives come from the expectation backward pass.
    /// With `stop_at_annealed`, the walk stops once every path upstream is
    /// exactly zero; the result is bit-identical to the full walk.
    pub fn backward(
        &self,
        eff: &EffectiveWeights,
        trace: &ForwardTrace,
        dloss_doutput: &[f64],
        grads: &mut Gradients,
        stop_at_annealed: bool,
    ) -> Result<()> {
        if dloss_doutput.len() != self.output_size() {
            return Err(Error::Shape {
                context: "loss gradient",
                expected: self.output_size(),
                got: dloss_doutput.len(),
            });
        }
        let quantised_mode = matches!(trace.mode, EvalMode::Quantised);
        let mut dl_dx = dloss_doutput.to_vec();
        for idx in (0..self.layers.len()).rev() {
            let layer = &self.layers[idx];
            let pre = &trace.pre_acts[idx];
            let x_prev: &[f64] = if idx == 0 {
                &trace.input
            } else {
                &trace.features[idx - 1]
            };

            // Gradient w.r.t. the pre-activation. A zero local derivative
            // yields a canonical +0.0 so skipped and computed paths agree
            // bit-for-bit.
            let mut ds = vec![0.0; layer.n_out];
            let mut any_nonzero = false;
            match &layer.activation {
                Some(act) => {
                    if !quantised_mode && !act.is_annealed() {
                        for i in 0..layer.n_out {
                            let d = act.backward(pre[i]);
                            if d != 0.0 {
                                let v = dl_dx[i] * d;
                                if v != 0.0 {
                                    ds[i] = v;
                                    any_nonzero = true;
                                }
                            }
                        }
                    }
                }
                None => {
                    for i in 0..layer.n_out {
                        if dl_dx[i] != 0.0 {
                            ds[i] = dl_dx[i];
                            any_nonzero = true;
                        }
                    }
                }
            }

            let lw = &eff.layers[idx];
            for i in 0..layer.n_out {
                let d = ds[i];
                if d == 0.0 {
                    continue;
                }
                grads.bias[idx][i] += d;
                let row = i * layer.n_in;
                match &lw.w_dscale {
                    None => {
                        for j in 0..layer.n_in {
                            grads.weight[idx][row + j] += d * x_prev[j];
                        }
                    }
                    Some(scale) => {
                        for j in 0..layer.n_in {
                            let s = scale[row + j];
                            if s != 0.0 {
                                grads.weight[idx][row + j] += d * x_prev[j] * s;
                            }
                        }
                    }
                }
            }

            if idx == 0 {
                break;
            }
            if !any_nonzero {
                if stop_at_annealed {
                    break;
                }
                dl_dx = vec![0.0; layer.n_in];
                continue;
            }
            let mut next = vec![0.0; layer.n_in];
            for i in 0..layer.n_out {
                let d = ds[i];
                if d == 0.0 {
                    continue;
                }
                let row = &lw.w_eff[i * layer.n_in..(i + 1) * layer.n_in];
                for (nj, wj) in next.iter_mut().zip(row) {
                    *nj += wj * d;
                }
            }
            dl_dx = next;
        }
        Ok(())
    }

    /// Installs noise parameters on layer `idx` (both activations). A layer
    /// without activations is left untouched.
    pub fn set_layer_noise(&mut self, idx: usize, params: NoiseParams) {
        self.layers[idx].set_noise(params);
    }

    /// Writes the latent parameters: a textual header with the layer sizes
    /// and quantiser specs, then all weights and biases as little-endian f64.
    pub fn save_params<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = String::new();
        header.push_str("ana-params v1\n");
        header.push_str(&format!("layers {}\n", self.layers.len()));
        for (i, layer) in self.layers.iter().enumerate() {
            header.push_str(&format!(
                "layer {i} in {} out {} act {} wact {}\n",
                layer.n_in,
                layer.n_out,
                quantiser_spec_string(layer.activation.as_ref()),
                quantiser_spec_string(layer.weight_activation.as_ref()),
            ));
        }
        header.push_str("data\n");
        out.write_all(header.as_bytes())?;
        let mut buf = Vec::new();
        for layer in &self.layers {
            for &w in &layer.weight {
                buf.extend_from_slice(&w.to_le_bytes());
            }
            for &b in &layer.bias {
                buf.extend_from_slice(&b.to_le_bytes());
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Writes the parameter file at `path`.
    pub fn save_params_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.save_params(std::io::BufWriter::new(file))
    }

    /// Reads a parameter file produced by [`save_params`](Self::save_params).
    ///
    /// The reconstructed activations are annealed (Dirac noise, mode
    /// strategy): the file describes the deployed quantised network, not the
    /// training-time noise state.
    pub fn load_params<R: Read>(reader: R) -> Result<Network> {
        let mut reader = BufReader::new(reader);
        let mut line = String::new();
        reader.read_line(&mut line)?;
        if line.trim_end() != "ana-params v1" {
            return Err(Error::Format(format!(
                "unexpected parameter file magic: {:?}",
                line.trim_end()
            )));
        }
        line.clear();
        reader.read_line(&mut line)?;
        let count: usize = line
            .trim_end()
            .strip_prefix("layers ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("bad layer count line: {:?}", line.trim_end())))?;
        let mut layers = Vec::with_capacity(count);
        for i in 0..count {
            line.clear();
            reader.read_line(&mut line)?;
            layers.push(parse_layer_header(line.trim_end(), i)?);
        }
        line.clear();
        reader.read_line(&mut line)?;
        if line.trim_end() != "data" {
            return Err(Error::Format(format!(
                "expected data marker, got {:?}",
                line.trim_end()
            )));
        }
        for layer in &mut layers {
            read_f64_slice(&mut reader, &mut layer.weight)?;
            read_f64_slice(&mut reader, &mut layer.bias)?;
        }
        Network::new(layers)
    }

    /// Reads the parameter file at `path`.
    pub fn load_params_file<P: AsRef<Path>>(path: P) -> Result<Network> {
        let file = std::fs::File::open(path)?;
        Self::load_params(file)
    }
}

fn quantiser_spec_string(act: Option<&RegularisedActivation>) -> String {
    match act {
        None => "none".to_string(),
        Some(a) => {
            let levels: Vec<String> =
                a.quantiser().levels().iter().map(|v| v.to_string()).collect();
            let thresholds: Vec<String> = a
                .quantiser()
                .thresholds()
                .iter()
                .map(|v| v.to_string())
                .collect();
            format!("levels={};thresholds={}", levels.join(","), thresholds.join(","))
        }
    }
}

fn parse_quantiser_spec(spec: &str) -> Result<Option<RegularisedActivation>> {
    if spec == "none" {
        return Ok(None);
    }
    let mut levels = None;
    let mut thresholds = None;
    for part in spec.split(';') {
        let (key, vals) = part
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad quantiser spec fragment: {part:?}")))?;
        let parsed: std::result::Result<Vec<f64>, _> =
            vals.split(',').map(|v| v.parse::<f64>()).collect();
        let parsed =
            parsed.map_err(|e| Error::Format(format!("bad number in quantiser spec: {e}")))?;
        match key {
            "levels" => levels = Some(parsed),
            "thresholds" => thresholds = Some(parsed),
            other => return Err(Error::Format(format!("unknown quantiser spec key {other:?}"))),
        }
    }
    let (levels, thresholds) = levels.zip(thresholds).ok_or_else(|| {
        Error::Format("quantiser spec needs both levels and thresholds".into())
    })?;
    let quantiser = crate::quantiser::Quantiser::new(levels, thresholds)?;
    Ok(Some(RegularisedActivation::new(
        quantiser,
        crate::noise::NoiseFamily::Uniform,
        NoiseParams::dirac(0.0),
        ForwardStrategy::Mode,
    )))
}

fn parse_layer_header(line: &str, expect_idx: usize) -> Result<Layer> {
    // layer <idx> in <n_in> out <n_out> act <spec> wact <spec>
    let tokens: Vec<&str> = line.splitn(10, ' ').collect();
    if tokens.len() != 10
        || tokens[0] != "layer"
        || tokens[2] != "in"
        || tokens[4] != "out"
        || tokens[6] != "act"
        || tokens[8] != "wact"
    {
        return Err(Error::Format(format!("bad layer header: {line:?}")));
    }
    let idx: usize = tokens[1]
        .parse()
        .map_err(|_| Error::Format(format!("bad layer index in {line:?}")))?;
    if idx != expect_idx {
        return Err(Error::Format(format!(
            "layer headers out of order: expected {expect_idx}, got {idx}"
        )));
    }
    let n_in: usize = tokens[3]
        .parse()
        .map_err(|_| Error::Format(format!("bad input size in {line:?}")))?;
    let n_out: usize = tokens[5]
        .parse()
        .map_err(|_| Error::Format(format!("bad output size in {line:?}")))?;
    Layer::new(
        n_in,
        n_out,
        parse_quantiser_spec(tokens[7])?,
        parse_quantiser_spec(tokens[9])?,
    )
}

fn read_f64_slice<R: Read>(reader: &mut R, out: &mut [f64]) -> Result<()> {
    let mut bytes = vec![0u8; out.len() * 8];
    reader.read_exact(&mut bytes)?;
    for (i, chunk) in bytes.chunks_exact(8).enumerate() {
        out[i] = f64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
    }
    Ok(())
}

/// Unrolled patch matrix of a 2-D input, so a convolution becomes one
/// matrix multiplication: `patches · kernelᵀ` is the convolution output.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchMatrix {
    /// Row-major `rows × cols` data.
    pub data: Vec<f64>,
    /// One row per output position (`out_h · out_w`).
    pub rows: usize,
    /// One column per kernel element (`channels · kernel_h · kernel_w`).
    pub cols: usize,
}

/// Lowers `input` (channel-major `channels × height × width`) into the patch
/// matrix of all valid `kernel_h × kernel_w` windows with the given stride.
pub fn im2col(
    input: &[f64],
    channels: usize,
    height: usize,
    width: usize,
    kernel_h: usize,
    kernel_w: usize,
    stride: usize,
) -> Result<PatchMatrix> {
    if channels == 0 || height == 0 || width == 0 || kernel_h == 0 || kernel_w == 0 || stride == 0 {
        return Err(Error::Config("im2col dimensions must be positive".into()));
    }
    if input.len() != channels * height * width {
        return Err(Error::Shape {
            context: "im2col input",
            expected: channels * height * width,
            got: input.len(),
        });
    }
    if kernel_h > height || kernel_w > width {
        return Err(Error::Config(format!(
            "kernel {kernel_h}x{kernel_w} larger than input {height}x{width}"
        )));
    }
    let out_h = (height - kernel_h) / stride + 1;
    let out_w = (width - kernel_w) / stride + 1;
    let rows = out_h * out_w;
    let cols = channels * kernel_h * kernel_w;
    let mut data = Vec::with_capacity(rows * cols);
    for oy in 0..out_h {
        for ox in 0..out_w {
            for c in 0..channels {
                for ky in 0..kernel_h {
                    for kx in 0..kernel_w {
                        let y = oy * stride + ky;
                        let x = ox * stride + kx;
                        data.push(input[(c * height + y) * width + x]);
                    }
                }
            }
        }
    }
    Ok(PatchMatrix { data, rows, cols })
}
