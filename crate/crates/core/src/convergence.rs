//! Numeric verification of compositional convergence.
//!
//! A family of regularised Heaviside activations `σ_{λ_ℓ}` composed into a
//! network converges to the composed stair functions only if the per-layer
//! regularisations vanish in a synchronised way. This module evaluates the
//! four limit conditions
//!
//! 1. `σ_{λ_ℓ}^{-1}(ε·r_ℓ(λ)) → 0`
//! 2. `σ_{λ_ℓ}^{-1}(1 − ε·r_ℓ(λ)) → 0`
//! 3. `(1 − σ_{λ_ℓ}(0)) / r_ℓ(λ) → 0`
//! 4. `r_{ℓ−1}(λ) / σ_{λ_ℓ}^{-1}(1 − ε·r_ℓ(λ)) → 0` (for ℓ ≥ 2)
//!
//! along a decreasing λ grid, together with the structural requirements
//! (per-layer λ vanishing, pointwise convergence to the step, monotonicity,
//! range in [0, 1]). A limit is "numerically verified" when its trend is
//! eventually non-increasing and its final value falls below a tolerance;
//! the raw sequences are kept in the report for inspection.
//!
//! Compact-support families are structurally ineligible: their regularised
//! step is constant outside the support, so it is not strictly increasing.
//!
//! [`measure_feature_errors`] and [`measure_ratio`] evaluate the quantity the
//! theorem bounds: the distance between regularised and quantised features of
//! an actual network, per layer, along the same λ grid.

use crate::error::{Error, Result};
use crate::network::{EvalMode, Network};
use crate::noise::{self, NoiseFamily, NoiseParams};
use crate::quantiser::Quantiser;
use crate::regulariser::{ForwardStrategy, RegularisedActivation};

/// Default verdict tolerance for the trend checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-2;

/// The λ grid `2^{-1} .. 2^{-20}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=20).map(|k| 2.0_f64.powi(-k)).collect()
}

/// Convergence rate `r(λ) = λ^p` with `p > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRate {
    exponent: f64,
}

impl ConvergenceRate {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::Config(format!(
                "convergence rate exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self { exponent })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        lambda.powf(self.exponent)
    }
}

/// How a layer's own regularisation parameter follows the global λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaLaw {
    /// `λ_ℓ = λ^e` with `e > 0`.
    Power { exponent: f64 },
    /// `λ_ℓ` pinned to a constant in `(0, 1]` (a stalled layer).
    Constant(f64),
}

impl LambdaLaw {
    pub fn eval(&self, lambda: f64) -> f64 {
        match *self {
            LambdaLaw::Power { exponent } => lambda.powf(exponent),
            LambdaLaw::Constant(value) => value,
        }
    }
}

/// The λ-laws of one layer's regulariser: family plus power laws for the
/// mean and standard deviation of the noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulariserLaw {
    pub family: NoiseFamily,
    /// Mean coefficient; negative values drift the mean left, which is what
    /// pushes `σ_λ(0)` toward 1.
    pub alpha_coeff: f64,
    pub alpha_exp: f64,
    pub beta_coeff: f64,
    pub beta_exp: f64,
    pub lambda_law: LambdaLaw,
}

impl RegulariserLaw {
    /// Zero-mean law `β(λ_ℓ) = c·λ_ℓ` with synchronised `λ_ℓ = λ`.
    pub fn zero_mean(family: NoiseFamily, beta_coeff: f64) -> Self {
        Self {
            family,
            alpha_coeff: 0.0,
            alpha_exp: 1.0,
            beta_coeff,
            beta_exp: 1.0,
            lambda_law: LambdaLaw::Power { exponent: 1.0 },
        }
    }

    /// Noise parameters at global regularisation level `lambda`.
    pub fn params_at(&self, lambda: f64) -> Result<NoiseParams> {
        let ll = self.lambda_law.eval(lambda);
        NoiseParams::new(
            self.alpha_coeff * ll.powf(self.alpha_exp),
            self.beta_coeff * ll.powf(self.beta_exp),
        )
    }

    /// The regularised Heaviside `σ_{λ_ℓ}` at `lambda`.
    pub fn activation_at(&self, lambda: f64) -> Result<RegularisedActivation> {
        Ok(RegularisedActivation::new(
            Quantiser::heaviside_at(0.0)?,
            self.family,
            self.params_at(lambda)?,
            ForwardStrategy::Expectation,
        ))
    }
}

/// Inverts a strictly increasing regularised activation by bisection:
/// solves `expectation_forward(x) = y` to an absolute tolerance of 1e−12.
///
/// Only the full-support families are strictly increasing, and `y` must be
/// strictly inside `(0, 1)`.
pub fn invert_regulariser(a: &RegularisedActivation, y: f64) -> Result<f64> {
    if a.family().compact_support() {
        return Err(Error::UnsupportedFamily(format!(
            "{} regularisers are not strictly increasing and cannot be inverted",
            a.family()
        )));
    }
    if a.params().is_dirac() {
        return Err(Error::Degenerate(
            "an annealed regulariser is a step function and cannot be inverted".into(),
        ));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Domain(format!(
            "invert_regulariser needs y strictly inside (0, 1), got {y}"
        )));
    }
    let thresholds = a.quantiser().thresholds();
    let mut lo = thresholds[0] - 1.0;
    let mut hi = thresholds[thresholds.len() - 1] + 1.0;
    let mut step = 1.0;
    for _ in 0..200 {
        if a.expectation_forward(lo) < y {
            break;
        }
        lo -= step;
        step *= 2.0;
    }
    step = 1.0;
    for _ in 0..200 {
        if a.expectation_forward(hi) > y {
            break;
        }
        hi += step;
        step *= 2.0;
    }
    if !(a.expectation_forward(lo) < y && y < a.expectation_forward(hi)) {
        return Err(Error::Domain(format!(
            "value {y} is not attained by this regulariser"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 {
            break;
        }
        if a.expectation_forward(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One trend sequence with its verdict.
#[derive(Debug, Clone)]
pub struct ConditionTrend {
    /// Raw (signed) values along the λ grid; NaN where undefined.
    pub values: Vec<f64>,
    pub pass: bool,
}

impl ConditionTrend {
    fn vacuous() -> Self {
        Self {
            values: Vec::new(),
            pass: true,
        }
    }

    fn from_values(values: Vec<f64>, tolerance: f64) -> Self {
        let pass = trend_vanishes(&values, tolerance);
        Self { values, pass }
    }
}

/// A trend "reaches zero" when its magnitude is eventually non-increasing
/// and the final value is below the tolerance.
fn trend_vanishes(values: &[f64], tolerance: f64) -> bool {
    let Some(&last) = values.last() else {
        return false;
    };
    if !last.is_finite() || last.abs() >= tolerance {
        return false;
    }
    let tail = values.len().min(5);
    let window = &values[values.len() - tail..];
    window.windows(2).all(|w| {
        w[0].is_finite() && w[1].is_finite() && w[1].abs() <= w[0].abs() + 1e-12
    })
}

/// Everything the checker measured for one layer.
#[derive(Debug, Clone)]
pub struct LayerHypotheses {
    /// False for compact-support families (not strictly increasing).
    pub eligible: bool,
    pub ineligible_reason: Option<String>,
    /// `λ_ℓ(λ)` along the grid; must vanish.
    pub lambda_values: Vec<f64>,
    pub lambda_vanishes: bool,
    /// `max_s |σ_{λ_ℓ}(s) − H(s)|` over the probe set, along the grid.
    pub pointwise_error: Vec<f64>,
    pub pointwise_converges: bool,
    /// σ non-decreasing on the probe grid and within [0, 1].
    pub monotone: bool,
    pub range_ok: bool,
    /// The four limit conditions; the fourth is vacuous on the first layer.
    pub conditions: [ConditionTrend; 4],
}

impl LayerHypotheses {
    pub fn all_pass(&self) -> bool {
        self.eligible
            && self.lambda_vanishes
            && self.pointwise_converges
            && self.monotone
            && self.range_ok
            && self.conditions.iter().all(|c| c.pass)
    }
}

/// Trend report for every layer of a regulariser/schedule/rate triple.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub epsilon: f64,
    pub tolerance: f64,
    pub lambda_grid: Vec<f64>,
    pub layers: Vec<LayerHypotheses>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.layers.iter().all(|l| l.all_pass())
    }
}

/// Names of the four limit conditions, in report order.
pub const CONDITION_NAMES: [&str; 4] = ["h_i", "h_ii", "h_iii", "h_iv"];

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("lambda grid must not be empty".into()));
    }
    if grid.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::Config("lambda grid values must be positive".into()));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("lambda grid must be strictly decreasing".into()));
    }
    Ok(())
}

/// Probe points for the structural checks.
const PROBE_POINTS: [f64; 9] = [-2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0];

/// Evaluates the compositional-convergence hypotheses for per-layer
/// regulariser laws and rates along a decreasing λ grid.
pub fn check_hypotheses(
    laws: &[RegulariserLaw],
    rates: &[ConvergenceRate],
    epsilon: f64,
    lambda_grid: &[f64],
    tolerance: f64,
) -> Result<HypothesisReport> {
    validate_grid(lambda_grid)?;
    if laws.is_empty() || laws.len() != rates.len() {
        return Err(Error::Config(format!(
            "need one rate per regulariser law, got {} laws and {} rates",
            laws.len(),
            rates.len()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }

    let mut layers = Vec::with_capacity(laws.len());
    for (idx, law) in laws.iter().enumerate() {
        let lambda_values: Vec<f64> =
            lambda_grid.iter().map(|&l| law.lambda_law.eval(l)).collect();
        let lambda_vanishes = trend_vanishes(&lambda_values, tolerance);

        if law.family.compact_support() {
            layers.push(LayerHypotheses {
                eligible: false,
                ineligible_reason: Some(format!(
                    "{} support is compact, so the regulariser is not strictly increasing",
                    law.family
                )),
                lambda_values,
                lambda_vanishes,
                pointwise_error: Vec::new(),
                pointwise_converges: false,
                monotone: false,
                range_ok: true,
                conditions: [
                    ConditionTrend::vacuous(),
                    ConditionTrend::vacuous(),
                    ConditionTrend::vacuous(),
                    ConditionTrend::vacuous(),
                ],
            });
            continue;
        }

        let mut pointwise_error = Vec::with_capacity(lambda_grid.len());
        let mut monotone = true;
        let mut range_ok = true;
        let mut h1 = Vec::with_capacity(lambda_grid.len());
        let mut h2 = Vec::with_capacity(lambda_grid.len());
        let mut h3 = Vec::with_capacity(lambda_grid.len());
        let mut h4 = Vec::with_capacity(lambda_grid.len());

        for &lambda in lambda_grid {
            let act = law.activation_at(lambda)?;
            let params = act.params();

            let mut worst: f64 = 0.0;
            let mut prev = f64::NEG_INFINITY;
            for &s in &PROBE_POINTS {
                let v = act.expectation_forward(s);
                let target = if s >= 0.0 { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
                if v < prev {
                    monotone = false;
                }
                if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                    range_ok = false;
                }
                prev = v;
            }
            pointwise_error.push(worst);

            let r = rates[idx].eval(lambda);
            let y_low = epsilon * r;
            let y_high = 1.0 - epsilon * r;
            h1.push(if y_low > 0.0 && y_low < 1.0 {
                invert_regulariser(&act, y_low)?
            } else {
                f64::NAN
            });
            let inv_high = if y_high > 0.0 && y_high < 1.0 {
                invert_regulariser(&act, y_high)?
            } else {
                f64::NAN
            };
            h2.push(inv_high);
            h3.push(noise::sf(law.family, params, 0.0) / r);
            if idx > 0 {
                h4.push(rates[idx - 1].eval(lambda) / inv_high);
            }
        }

        let pointwise_converges = trend_vanishes(&pointwise_error, tolerance);
        let conditions = [
            ConditionTrend::from_values(h1, tolerance),
            ConditionTrend::from_values(h2, tolerance),
            ConditionTrend::from_values(h3, tolerance),
            if idx == 0 {
                ConditionTrend::vacuous()
            } else {
                ConditionTrend::from_values(h4, tolerance)
            },
        ];
        layers.push(LayerHypotheses {
            eligible: true,
            ineligible_reason: None,
            lambda_values,
            lambda_vanishes,
            pointwise_error,
            pointwise_converges,
            monotone,
            range_ok,
            conditions,
        });
    }

    Ok(HypothesisReport {
        epsilon,
        tolerance,
        lambda_grid: lambda_grid.to_vec(),
        layers,
    })
}

/// Grid-searches rate exponents (and, if needed, mean/std exponents) for a
/// triple that passes every condition; returns the passing laws and rates.
pub fn search_passing_triple(
    family: NoiseFamily,
    layers: usize,
    epsilon: f64,
    lambda_grid: &[f64],
    tolerance: f64,
) -> Result<Option<(Vec<RegulariserLaw>, Vec<ConvergenceRate>)>> {
    const RATE_EXPONENTS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
    const ALPHA_EXPONENTS: [f64; 3] = [0.25, 0.5, 1.0];
    const BETA_EXPONENTS: [f64; 2] = [1.0, 2.0];
    for &alpha_exp in &ALPHA_EXPONENTS {
        for &beta_exp in &BETA_EXPONENTS {
            let laws: Vec<RegulariserLaw> = (0..layers)
                .map(|_| RegulariserLaw {
                    family,
                    alpha_coeff: -1.0,
                    alpha_exp,
                    beta_coeff: 1.0,
                    beta_exp,
                    lambda_law: LambdaLaw::Power { exponent: 1.0 },
                })
                .collect();
            for &rate_exp in &RATE_EXPONENTS {
                let rates: Vec<ConvergenceRate> =
                    vec![ConvergenceRate::new(rate_exp)?; layers];
                let report = check_hypotheses(&laws, &rates, epsilon, lambda_grid, tolerance)?;
                if report.all_pass() {
                    return Ok(Some((laws, rates)));
                }
            }
        }
    }
    Ok(None)
}

/// Per-layer error (or error-to-rate ratio) sequences along a λ grid.
#[derive(Debug, Clone)]
pub struct FeatureErrorSeries {
    pub lambda_grid: Vec<f64>,
    /// `values[layer][i]` for grid point `i`.
    pub values: Vec<Vec<f64>>,
}

impl FeatureErrorSeries {
    /// The per-grid-point maximum over layers.
    pub fn max_over_layers(&self) -> Vec<f64> {
        (0..self.lambda_grid.len())
            .map(|i| {
                self.values
                    .iter()
                    .map(|layer| layer[i])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

fn scheduled_layer_indices(net: &Network) -> Vec<usize> {
    net.layers()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.activation().is_some())
        .map(|(i, _)| i)
        .collect()
}

/// `‖x_{λ,ℓ} − x_ℓ‖₂` per layer for every λ in the grid: the regularised
/// (expectation) features against the quantised features from the same input.
pub fn measure_feature_errors(
    net: &Network,
    laws: &[RegulariserLaw],
    x0: &[f64],
    lambda_grid: &[f64],
) -> Result<FeatureErrorSeries> {
    validate_grid(lambda_grid)?;
    let scheduled = scheduled_layer_indices(net);
    if scheduled.len() != laws.len() {
        return Err(Error::Config(format!(
            "network has {} activated layers but {} laws were given",
            scheduled.len(),
            laws.len()
        )));
    }
    let quantised = net.forward(x0, EvalMode::Quantised, None)?;
    let layer_count = net.layer_count();
    let mut values = vec![Vec::with_capacity(lambda_grid.len()); layer_count];
    let mut work = net.clone();
    for &lambda in lambda_grid {
        for (law, &idx) in laws.iter().zip(&scheduled) {
            work.set_layer_noise(idx, law.params_at(lambda)?);
        }
        let regularised = work.forward(
            x0,
            EvalMode::Regularised(ForwardStrategy::Expectation),
            None,
        )?;
        for l in 0..layer_count {
            let err: f64 = regularised.features()[l]
                .iter()
                .zip(&quantised.features()[l])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            values[l].push(err);
        }
    }
    Ok(FeatureErrorSeries {
        lambda_grid: lambda_grid.to_vec(),
        values,
    })
}

/// Feature errors normalised by the per-layer rates: the theorem's ratio
/// `‖x_{λ,ℓ} − x_ℓ‖ / r_ℓ(λ)`.
pub fn measure_ratio(
    net: &Network,
    laws: &[RegulariserLaw],
    rates: &[ConvergenceRate],
    x0: &[f64],
    lambda_grid: &[f64],
) -> Result<FeatureErrorSeries> {
    if rates.len() != net.layer_count() {
        return Err(Error::Config(format!(
            "need one rate per layer, got {} rates for {} layers",
            rates.len(),
            net.layer_count()
        )));
    }
    let mut series = measure_feature_errors(net, laws, x0, lambda_grid)?;
    for (l, layer_vals) in series.values.iter_mut().enumerate() {
        for (i, v) in layer_vals.iter_mut().enumerate() {
            *v /= rates[l].eval(series.lambda_grid[i]);
        }
    }
    Ok(series)
}

/// A network of Heaviside layers with uniformly initialised real weights,
/// the shape Theorem 1 talks about.
pub fn heaviside_network(layer_sizes: &[usize], seed: u64) -> Result<Network> {
    if layer_sizes.len() < 2 {
        return Err(Error::Config(
            "need at least input and output sizes to build a network".into(),
        ));
    }
    let mut layers = Vec::new();
    for w in layer_sizes.windows(2) {
        let act = RegularisedActivation::new(
            Quantiser::heaviside_at(0.0)?,
            NoiseFamily::Normal,
            NoiseParams::dirac(0.0),
            ForwardStrategy::Expectation,
        );
        layers.push(crate::network::Layer::new(w[0], w[1], Some(act), None)?);
    }
    let mut net = Network::new(layers)?;
    net.init_uniform(seed);
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic_act(mean: f64, std: f64) -> RegularisedActivation {
        RegularisedActivation::new(
            Quantiser::heaviside_at(0.0).unwrap(),
            NoiseFamily::Logistic,
            NoiseParams::new(mean, std).unwrap(),
            ForwardStrategy::Expectation,
        )
    }

    fn normal_act(mean: f64, std: f64) -> RegularisedActivation {
        RegularisedActivation::new(
            Quantiser::heaviside_at(0.0).unwrap(),
            NoiseFamily::Normal,
            NoiseParams::new(mean, std).unwrap(),
            ForwardStrategy::Expectation,
        )
    }

    #[test]
    fn invert_symmetry_point() {
        let a = logistic_act(0.0, 0.7);
        assert!(invert_regulariser(&a, 0.5).unwrap().abs() < 1e-9);
    }

    #[test]
    fn invert_matches_normal_quantile() {
        let a = normal_act(0.0, 1.0);
        // Φ(1) by an independent bisection over the closed-form CDF.
        let p = NoiseParams::new(0.0, 1.0).unwrap();
        let phi_1 = noise::cdf(NoiseFamily::Normal, p, 1.0);
        assert!((phi_1 - 0.8413447460685429).abs() < 1e-12);
        let x = invert_regulariser(&a, phi_1).unwrap();
        assert!((x - 1.0).abs() < 1e-9, "inverted {x}");
        assert!((invert_regulariser(&a, 0.8413).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn invert_round_trip() {
        for act in [logistic_act(-0.2, 0.4), normal_act(0.1, 0.9)] {
            for i in -8..=8 {
                let x = i as f64 * 0.3;
                let y = act.expectation_forward(x);
                if y > 1e-4 && y < 1.0 - 1e-4 {
                    let back = invert_regulariser(&act, y).unwrap();
                    assert!((back - x).abs() < 1e-9, "round trip {x} -> {y} -> {back}");
                }
            }
        }
    }

    #[test]
    fn invert_rejects_bad_inputs() {
        let uniform = RegularisedActivation::new(
            Quantiser::heaviside_at(0.0).unwrap(),
            NoiseFamily::Uniform,
            NoiseParams::new(0.0, 0.5).unwrap(),
            ForwardStrategy::Expectation,
        );
        assert!(matches!(
            invert_regulariser(&uniform, 0.5),
            Err(Error::UnsupportedFamily(_))
        ));
        let a = logistic_act(0.0, 0.5);
        assert!(matches!(invert_regulariser(&a, 0.0), Err(Error::Domain(_))));
        assert!(matches!(invert_regulariser(&a, 1.0), Err(Error::Domain(_))));
        assert!(matches!(invert_regulariser(&a, -0.2), Err(Error::Domain(_))));
    }

    fn drift_law(family: NoiseFamily) -> RegulariserLaw {
        RegulariserLaw {
            family,
            alpha_coeff: -1.0,
            alpha_exp: 0.5,
            beta_coeff: 1.0,
            beta_exp: 1.0,
            lambda_law: LambdaLaw::Power { exponent: 1.0 },
        }
    }

    #[test]
    fn zero_mean_fails_the_third_condition() {
        let laws = vec![RegulariserLaw::zero_mean(NoiseFamily::Logistic, 1.0); 3];
        let rates = vec![ConvergenceRate::new(1.0).unwrap(); 3];
        let report =
            check_hypotheses(&laws, &rates, 1.0, &default_lambda_grid(), DEFAULT_TOLERANCE)
                .unwrap();
        for layer in &report.layers {
            assert!(!layer.conditions[2].pass, "h_iii must fail for zero-mean noise");
            // (1 − σ(0))/r = 0.5/r blows up along the grid.
            let vals = &layer.conditions[2].values;
            assert!(vals.last().unwrap() > vals.first().unwrap());
        }
        assert!(!report.all_pass());
    }

    #[test]
    fn negative_mean_drift_passes_all_conditions() {
        for family in [NoiseFamily::Logistic, NoiseFamily::Normal] {
            let laws = vec![drift_law(family); 3];
            let rates = vec![ConvergenceRate::new(1.0).unwrap(); 3];
            let report =
                check_hypotheses(&laws, &rates, 1.0, &default_lambda_grid(), DEFAULT_TOLERANCE)
                    .unwrap();
            assert!(report.all_pass(), "{family}: {report:#?}");
        }
    }

    #[test]
    fn stalled_input_layer_breaks_the_chained_condition() {
        let mut laws = vec![drift_law(NoiseFamily::Logistic); 3];
        laws[0].lambda_law = LambdaLaw::Constant(1.0);
        let rates = vec![
            ConvergenceRate::new(0.25).unwrap(),
            ConvergenceRate::new(1.0).unwrap(),
            ConvergenceRate::new(1.0).unwrap(),
        ];
        let report =
            check_hypotheses(&laws, &rates, 1.0, &default_lambda_grid(), DEFAULT_TOLERANCE)
                .unwrap();
        // The pair (1, 2): r_1 stays far above the shrinking inverse of σ_{λ_2}.
        assert!(!report.layers[1].conditions[3].pass, "h_iv must fail for the pair");
        // The stalled layer itself cannot satisfy its own limits either.
        assert!(!report.layers[0].lambda_vanishes);
        assert!(!report.layers[0].all_pass());
        assert!(!report.all_pass());
    }

    #[test]
    fn compact_families_reported_ineligible() {
        let laws = vec![RegulariserLaw::zero_mean(NoiseFamily::Uniform, 1.0); 2];
        let rates = vec![ConvergenceRate::new(1.0).unwrap(); 2];
        let report =
            check_hypotheses(&laws, &rates, 1.0, &default_lambda_grid(), DEFAULT_TOLERANCE)
                .unwrap();
        assert!(!report.layers[0].eligible);
        assert!(report.layers[0].ineligible_reason.is_some());
        assert!(!report.all_pass());
    }

    #[test]
    fn grid_validation() {
        let laws = vec![drift_law(NoiseFamily::Logistic)];
        let rates = vec![ConvergenceRate::new(1.0).unwrap()];
        assert!(check_hypotheses(&laws, &rates, 1.0, &[], 1e-2).is_err());
        assert!(check_hypotheses(&laws, &rates, 1.0, &[0.5, 0.5], 1e-2).is_err());
        assert!(check_hypotheses(&laws, &rates, 1.0, &[0.25, 0.5], 1e-2).is_err());
        assert!(check_hypotheses(&laws, &rates, 1.0, &[0.5, -0.1], 1e-2).is_err());
        assert!(check_hypotheses(&laws, &rates, 0.0, &[0.5, 0.25], 1e-2).is_err());
    }

    #[test]
    fn search_finds_a_triple_over_logistic() {
        let found = search_passing_triple(
            NoiseFamily::Logistic,
            3,
            1.0,
            &default_lambda_grid(),
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        let (laws, rates) = found.expect("a passing triple exists");
        let report =
            check_hypotheses(&laws, &rates, 1.0, &default_lambda_grid(), DEFAULT_TOLERANCE)
                .unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn feature_errors_zero_when_noise_is_off() {
        let net = heaviside_network(&[3, 4, 4, 2], 5).unwrap();
        let laws: Vec<RegulariserLaw> = (0..3)
            .map(|_| RegulariserLaw {
                beta_coeff: 0.0,
                ..RegulariserLaw::zero_mean(NoiseFamily::Normal, 1.0)
            })
            .collect();
        let grid = default_lambda_grid();
        let series =
            measure_feature_errors(&net, &laws, &[0.3, -0.4, 0.9], &grid).unwrap();
        for layer in &series.values {
            assert!(layer.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn single_layer_ratio_decreases() {
        // One Heaviside unit with pre-activation forced to −0.5.
        let mut net = heaviside_network(&[1, 1], 0).unwrap();
        net.layers_mut()[0].weight_mut()[0] = 1.0;
        net.layers_mut()[0].bias_mut()[0] = 0.0;
        let laws = vec![drift_law(NoiseFamily::Logistic)];
        let rates = vec![ConvergenceRate::new(1.0).unwrap()];
        let grid = default_lambda_grid();
        let series = measure_ratio(&net, &laws, &rates, &[-0.5], &grid).unwrap();
        let vals = &series.values[0];
        assert!(*vals.last().unwrap() < 1e-6, "final ratio {}", vals.last().unwrap());
        // The drifting mean sweeps past the pre-activation early on; the
        // decrease is asymptotic, so check the tail of the grid.
        for w in vals[vals.len() - 10..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "ratio tail not decreasing: {w:?}");
        }
    }

    #[test]
    fn measure_requires_matching_law_count() {
        let net = heaviside_network(&[2, 3, 2], 1).unwrap();
        let laws = vec![drift_law(NoiseFamily::Logistic)];
        assert!(measure_feature_errors(&net, &laws, &[0.1, 0.2], &[0.5, 0.25]).is_err());
    }
}
