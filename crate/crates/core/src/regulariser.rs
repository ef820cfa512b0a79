//! Noise-regularised quantisers.
//!
//! Adding noise `ν ~ μ` to the input of a stair function `σ` and taking the
//! expected value smooths the stairs: `E_ν[σ(x − ν)]` equals the CDF-weighted
//! sum `q_0 + Σ_k (q_k − q_{k−1})·F(x − θ_k)`, and its derivative is the
//! PDF-weighted sum `Σ_k (q_k − q_{k−1})·μ(x − θ_k)`. Both are evaluated in
//! closed form here. Besides the expectation, the forward pass may return the
//! most probable level (mode, a.k.a. deterministic sampling) or a categorical
//! draw over the levels (random sampling); the backward pass always uses the
//! expectation derivative.
//!
//! With `std = 0` the noise has collapsed to a Dirac delta: every forward
//! strategy returns the plain quantiser output and the derivative is zero
//! everywhere, which lets gradient propagation stop at annealed layers.

use crate::error::Result;
use crate::noise::{self, NoiseFamily, NoiseParams};
use crate::quantiser::Quantiser;
use rand::Rng;

/// How a regularised activation computes its forward value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForwardStrategy {
    /// Smooth expected value of the noisy quantiser.
    Expectation,
    /// Most probable quantisation level (deterministic sampling).
    Mode,
    /// Categorical draw over the levels (random sampling).
    Random,
}

impl ForwardStrategy {
    /// All strategies, in a fixed order.
    pub const ALL: [ForwardStrategy; 3] = [
        ForwardStrategy::Expectation,
        ForwardStrategy::Mode,
        ForwardStrategy::Random,
    ];

    /// Lower-case strategy name.
    pub fn name(self) -> &'static str {
        match self {
            ForwardStrategy::Expectation => "expectation",
            ForwardStrategy::Mode => "mode",
            ForwardStrategy::Random => "random",
        }
    }
}

impl std::fmt::Display for ForwardStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A quantiser paired with a noise model and a forward strategy.
#[derive(Debug, Clone)]
pub struct RegularisedActivation {
    quantiser: Quantiser,
    family: NoiseFamily,
    params: NoiseParams,
    strategy: ForwardStrategy,
}

impl RegularisedActivation {
    pub fn new(
        quantiser: Quantiser,
        family: NoiseFamily,
        params: NoiseParams,
        strategy: ForwardStrategy,
    ) -> Self {
        Self {
            quantiser,
            family,
            params,
            strategy,
        }
    }

    pub fn quantiser(&self) -> &Quantiser {
        &self.quantiser
    }

    pub fn family(&self) -> NoiseFamily {
        self.family
    }

    pub fn params(&self) -> NoiseParams {
        self.params
    }

    pub fn strategy(&self) -> ForwardStrategy {
        self.strategy
    }

    /// Installs new noise parameters (called by the schedule every iteration).
    pub fn set_params(&mut self, params: NoiseParams) {
        self.params = params;
    }

    /// True once the noise has been annealed to a Dirac delta.
    pub fn is_annealed(&self) -> bool {
        self.params.is_dirac()
    }

    /// Plain quantiser output, ignoring the noise entirely.
    pub fn quantised(&self, x: f64) -> f64 {
        self.quantiser.quantise(x).unwrap_or(f64::NAN)
    }

    /// `E_ν[σ(x − ν)] = q_0 + Σ_k (q_k − q_{k−1})·F(x − θ_k)`.
    ///
    /// In the Dirac state this is exactly the quantiser applied to `x − α`.
    pub fn expectation_forward(&self, x: f64) -> f64 {
        if self.params.is_dirac() {
            return self.quantised(x - self.params.mean());
        }
        let levels = self.quantiser.levels();
        let mut acc = levels[0];
        for (k, &theta) in self.quantiser.thresholds().iter().enumerate() {
            acc += (levels[k + 1] - levels[k]) * noise::cdf(self.family, self.params, x - theta);
        }
        acc
    }

    /// Derivative of [`expectation_forward`](Self::expectation_forward):
    /// `Σ_k (q_k − q_{k−1})·μ(x − θ_k)`. Zero everywhere once annealed.
    pub fn backward(&self, x: f64) -> f64 {
        if self.params.is_dirac() {
            return 0.0;
        }
        let levels = self.quantiser.levels();
        let mut acc = 0.0;
        for (k, &theta) in self.quantiser.thresholds().iter().enumerate() {
            let density = noise::pdf(self.family, self.params, x - theta)
                .expect("non-degenerate params checked above");
            acc += (levels[k + 1] - levels[k]) * density;
        }
        acc
    }

    /// Probability of each level under the noisy input:
    /// `p_k = F(x − θ_k) − F(x − θ_{k+1})` with `θ_0 = −∞`, `θ_K = +∞`.
    pub fn level_probabilities(&self, x: f64) -> Vec<f64> {
        let k = self.quantiser.level_count();
        let mut probs = Vec::with_capacity(k);
        let mut upper = 1.0;
        for &theta in self.quantiser.thresholds() {
            let c = noise::cdf(self.family, self.params, x - theta);
            probs.push((upper - c).max(0.0));
            upper = c;
        }
        probs.push(upper.max(0.0));
        probs
    }

    /// The most probable level; ties break toward the lower level index.
    pub fn mode_forward(&self, x: f64) -> f64 {
        if self.params.is_dirac() {
            return self.quantised(x - self.params.mean());
        }
        let levels = self.quantiser.levels();
        let thresholds = self.quantiser.thresholds();
        let mut upper = 1.0;
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0;
        for k in 0..levels.len() {
            let lower = if k < thresholds.len() {
                noise::cdf(self.family, self.params, x - thresholds[k])
            } else {
                0.0
            };
            let p = upper - lower;
            if p > best {
                best = p;
                best_idx = k;
            }
            upper = lower;
        }
        levels[best_idx]
    }

    /// A categorical draw over the levels with the probabilities of
    /// [`level_probabilities`](Self::level_probabilities).
    pub fn random_forward<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        if self.params.is_dirac() {
            return self.quantised(x - self.params.mean());
        }
        let levels = self.quantiser.levels();
        let thresholds = self.quantiser.thresholds();
        let u: f64 = rng.gen();
        let mut upper = 1.0;
        let mut acc = 0.0;
        for k in 0..levels.len() {
            let lower = if k < thresholds.len() {
                noise::cdf(self.family, self.params, x - thresholds[k])
            } else {
                0.0
            };
            acc += (upper - lower).max(0.0);
            if u < acc {
                return levels[k];
            }
            upper = lower;
        }
        *levels.last().expect("quantiser has at least two levels")
    }

    /// Forward pass using the stored strategy.
    pub fn forward<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        match self.strategy {
            ForwardStrategy::Expectation => self.expectation_forward(x),
            ForwardStrategy::Mode => self.mode_forward(x),
            ForwardStrategy::Random => self.random_forward(x, rng),
        }
    }

    /// Forward pass with an explicit strategy override.
    pub fn forward_with<R: Rng + ?Sized>(
        &self,
        strategy: ForwardStrategy,
        x: f64,
        rng: &mut R,
    ) -> f64 {
        match strategy {
            ForwardStrategy::Expectation => self.expectation_forward(x),
            ForwardStrategy::Mode => self.mode_forward(x),
            ForwardStrategy::Random => self.random_forward(x, rng),
        }
    }

    /// Validates that the activation's pieces are mutually consistent.
    pub fn validate(&self) -> Result<()> {
        // Quantiser and params enforce their own invariants on construction;
        // nothing extra to check today. Kept as an explicit hook for the
        // config loader.
        Ok(())
    }
}
