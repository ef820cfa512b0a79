//! Per-layer evolution of the noise parameters over training iterations.
//!
//! Each scheduled layer owns an annealing range `[t_start, t_end)`. Inside it
//! the regularisation parameter decays linearly,
//! `λ(t) = clamp((t_end − t)/(t_end − t_start), 0, 1)`, and the noise mean and
//! standard deviation follow power laws `α = c_α·λ^{d_α}`, `β = c_β·λ^{d_β}`
//! (unless held static). At `t_end` the distribution has collapsed to a Dirac
//! delta centred at zero.
//!
//! Decay-interval strategies relate the ranges of different layers: `same
//! start` anchors every range at 0 with ends growing with depth, `same end`
//! anchors the ends with deeper layers starting earlier, `partition` tiles
//! the annealing window with contiguous slices (layer 1 first), and
//! `overlapped` gives every layer the identical range.

use crate::error::{Error, Result};
use crate::noise::NoiseParams;

/// Iteration interval `[t_start, t_end)` over which a layer anneals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnealingRange {
    t_start: u64,
    t_end: u64,
}

impl AnnealingRange {
    /// Builds a range, requiring `t_start < t_end`.
    pub fn new(t_start: u64, t_end: u64) -> Result<Self> {
        if t_start >= t_end {
            return Err(Error::Config(format!(
                "annealing range needs t_start < t_end, got [{t_start}, {t_end})"
            )));
        }
        Ok(Self { t_start, t_end })
    }

    pub fn t_start(&self) -> u64 {
        self.t_start
    }

    pub fn t_end(&self) -> u64 {
        self.t_end
    }

    /// `clamp((t_end − t)/(t_end − t_start), 0, 1)`: 1 before the range,
    /// 0 from `t_end` onwards, linear in between.
    pub fn lambda_at(&self, t: u64) -> f64 {
        let num = self.t_end as f64 - t as f64;
        let den = (self.t_end - self.t_start) as f64;
        (num / den).clamp(0.0, 1.0)
    }
}

/// Annealing law for one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerScheduleSpec {
    pub range: AnnealingRange,
    pub c_alpha: f64,
    pub c_beta: f64,
    pub d_alpha: u32,
    pub d_beta: u32,
    pub static_mean: bool,
    pub static_variance: bool,
}

impl LayerScheduleSpec {
    /// Validates the constants: `c_β > 0` (zero would mean no regularisation
    /// at all), `c_α ≥ 0`, exponents ≥ 1, and `static_mean` forcing `c_α = 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.c_beta > 0.0) || !self.c_beta.is_finite() {
            return Err(Error::Config(format!(
                "c_beta must be positive, got {}",
                self.c_beta
            )));
        }
        if !(self.c_alpha >= 0.0) || !self.c_alpha.is_finite() {
            return Err(Error::Config(format!(
                "c_alpha must be non-negative, got {}",
                self.c_alpha
            )));
        }
        if self.static_mean && self.c_alpha != 0.0 {
            return Err(Error::Config(
                "static_mean forces c_alpha = 0".into(),
            ));
        }
        if !self.static_mean && self.c_alpha == 0.0 {
            return Err(Error::Config(
                "a dynamic mean needs c_alpha > 0; set static_mean instead".into(),
            ));
        }
        if self.d_alpha < 1 || self.d_beta < 1 {
            return Err(Error::Config(format!(
                "power-law exponents must be >= 1, got d_alpha={}, d_beta={}",
                self.d_alpha, self.d_beta
            )));
        }
        Ok(())
    }

    /// Noise parameters at iteration `t`.
    pub fn params_at(&self, t: u64) -> NoiseParams {
        let lambda = self.range.lambda_at(t);
        let mean = if self.static_mean {
            0.0
        } else {
            self.c_alpha * lambda.powi(self.d_alpha as i32)
        };
        let std = if self.static_variance {
            self.c_beta
        } else {
            self.c_beta * lambda.powi(self.d_beta as i32)
        };
        NoiseParams::new(mean, std).expect("schedule laws produce valid params")
    }
}

/// How per-layer annealing ranges relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayInterval {
    SameStart,
    SameEnd,
    Partition,
    Overlapped,
}

impl DecayInterval {
    pub const ALL: [DecayInterval; 4] = [
        DecayInterval::SameStart,
        DecayInterval::SameEnd,
        DecayInterval::Partition,
        DecayInterval::Overlapped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecayInterval::SameStart => "same_start",
            DecayInterval::SameEnd => "same_end",
            DecayInterval::Partition => "partition",
            DecayInterval::Overlapped => "overlapped",
        }
    }
}

impl std::fmt::Display for DecayInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the power-law exponents relate to layer depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayPowerLaw {
    /// The same exponent (1) for every layer.
    Homogeneous,
    /// Larger exponents, hence faster collapse, nearer the input:
    /// `d_ℓ = max(1, L − ℓ)`.
    Progressive,
}

impl DecayPowerLaw {
    pub fn name(self) -> &'static str {
        match self {
            DecayPowerLaw::Homogeneous => "homogeneous",
            DecayPowerLaw::Progressive => "progressive",
        }
    }
}

impl std::fmt::Display for DecayPowerLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A decay interval paired with a decay power law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleStrategy {
    pub decay_interval: DecayInterval,
    pub decay_power_law: DecayPowerLaw,
}

/// Builds one [`LayerScheduleSpec`] per quantised layer.
///
/// `layers` counts the quantised layers (`ℓ = 1` nearest the input) and
/// `t_anneal` is the length of the annealing window; range boundaries are
/// spaced at multiples of `t_anneal / layers`.
pub fn build_schedule(
    strategy: ScheduleStrategy,
    layers: usize,
    t_anneal: u64,
    base: &LayerScheduleSpec,
) -> Result<Vec<LayerScheduleSpec>> {
    if layers < 2 {
        return Err(Error::Config(format!(
            "a schedule needs at least 2 quantised layers, got {layers}"
        )));
    }
    if t_anneal < layers as u64 {
        return Err(Error::Config(format!(
            "annealing window of {t_anneal} iterations cannot hold {layers} layer ranges"
        )));
    }
    let boundary = |i: usize| -> u64 {
        ((i as f64) * (t_anneal as f64) / (layers as f64)).round() as u64
    };
    let mut specs = Vec::with_capacity(layers);
    for l in 1..=layers {
        let range = match strategy.decay_interval {
            DecayInterval::SameStart => AnnealingRange::new(0, boundary(l))?,
            DecayInterval::SameEnd => AnnealingRange::new(boundary(layers - l), t_anneal)?,
            DecayInterval::Partition => AnnealingRange::new(boundary(l - 1), boundary(l))?,
            DecayInterval::Overlapped => AnnealingRange::new(0, t_anneal)?,
        };
        let d = match strategy.decay_power_law {
            DecayPowerLaw::Homogeneous => 1,
            DecayPowerLaw::Progressive => (layers - l).max(1) as u32,
        };
        let spec = LayerScheduleSpec {
            range,
            d_alpha: d,
            d_beta: d,
            ..*base
        };
        spec.validate()?;
        specs.push(spec);
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base() -> LayerScheduleSpec {
        LayerScheduleSpec {
            range: AnnealingRange::new(0, 1).unwrap(),
            c_alpha: 0.0,
            c_beta: 0.5,
            d_alpha: 1,
            d_beta: 1,
            static_mean: true,
            static_variance: false,
        }
    }

    fn strategy(decay_interval: DecayInterval) -> ScheduleStrategy {
        ScheduleStrategy {
            decay_interval,
            decay_power_law: DecayPowerLaw::Homogeneous,
        }
    }

    #[test]
    fn lambda_clamp_law() {
        let r = AnnealingRange::new(100, 300).unwrap();
        assert_eq!(r.lambda_at(0), 1.0);
        assert_eq!(r.lambda_at(100), 1.0);
        assert_eq!(r.lambda_at(200), 0.5);
        assert_eq!(r.lambda_at(300), 0.0);
        assert_eq!(r.lambda_at(10_000), 0.0);
    }

    #[test]
    fn invalid_range_rejected() {
        assert!(AnnealingRange::new(5, 5).is_err());
        assert!(AnnealingRange::new(10, 2).is_err());
    }

    #[test]
    fn static_schedule_is_standard_ste() {
        let spec = LayerScheduleSpec {
            static_mean: true,
            static_variance: true,
            ..base()
        };
        for t in [0, 17, 500, 10_000] {
            let p = spec.params_at(t);
            assert_eq!(p.mean(), 0.0);
            assert_eq!(p.std(), 0.5);
        }
    }

    #[test]
    fn dynamic_variance_reaches_exact_zero() {
        let spec = LayerScheduleSpec {
            range: AnnealingRange::new(0, 100).unwrap(),
            ..base()
        };
        assert!(spec.params_at(99).std() > 0.0);
        assert_eq!(spec.params_at(100).std(), 0.0);
        assert_eq!(spec.params_at(101).std(), 0.0);
        assert!(spec.params_at(100).is_dirac());
    }

    #[test]
    fn power_law_evaluation() {
        let spec = LayerScheduleSpec {
            range: AnnealingRange::new(0, 100).unwrap(),
            d_beta: 2,
            c_beta: 1.0,
            ..base()
        };
        // λ = 0.5 halfway through the range.
        assert_relative_eq!(spec.params_at(50).std(), 0.25);
    }

    #[test]
    fn dynamic_mean_decays() {
        let spec = LayerScheduleSpec {
            range: AnnealingRange::new(0, 100).unwrap(),
            c_alpha: 0.8,
            static_mean: false,
            ..base()
        };
        spec.validate().unwrap();
        assert_relative_eq!(spec.params_at(0).mean(), 0.8);
        assert_relative_eq!(spec.params_at(50).mean(), 0.4);
        assert_eq!(spec.params_at(100).mean(), 0.0);
    }

    #[test]
    fn spec_validation_rules() {
        let mut s = base();
        s.c_beta = 0.0;
        assert!(s.validate().is_err());
        let mut s = base();
        s.c_alpha = 0.3; // static_mean still true
        assert!(s.validate().is_err());
        let mut s = base();
        s.static_mean = false; // c_alpha still 0
        assert!(s.validate().is_err());
        let mut s = base();
        s.d_beta = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn partition_tiles_the_window() {
        let specs = build_schedule(strategy(DecayInterval::Partition), 4, 400, &base()).unwrap();
        let got: Vec<(u64, u64)> = specs
            .iter()
            .map(|s| (s.range.t_start(), s.range.t_end()))
            .collect();
        assert_eq!(got, vec![(0, 100), (100, 200), (200, 300), (300, 400)]);
    }

    #[test]
    fn overlapped_ranges_identical() {
        let specs = build_schedule(strategy(DecayInterval::Overlapped), 4, 400, &base()).unwrap();
        for s in &specs {
            assert_eq!((s.range.t_start(), s.range.t_end()), (0, 400));
        }
    }

    #[test]
    fn same_end_staggers_starts() {
        let specs = build_schedule(strategy(DecayInterval::SameEnd), 3, 300, &base()).unwrap();
        let got: Vec<(u64, u64)> = specs
            .iter()
            .map(|s| (s.range.t_start(), s.range.t_end()))
            .collect();
        assert_eq!(got, vec![(200, 300), (100, 300), (0, 300)]);
    }

    #[test]
    fn same_start_staggers_ends() {
        let specs = build_schedule(strategy(DecayInterval::SameStart), 3, 300, &base()).unwrap();
        let got: Vec<(u64, u64)> = specs
            .iter()
            .map(|s| (s.range.t_start(), s.range.t_end()))
            .collect();
        assert_eq!(got, vec![(0, 100), (0, 200), (0, 300)]);
        for w in specs.windows(2) {
            assert!(w[0].range.t_end() < w[1].range.t_end());
        }
    }

    #[test]
    fn progressive_exponents_fall_with_depth() {
        let strat = ScheduleStrategy {
            decay_interval: DecayInterval::Partition,
            decay_power_law: DecayPowerLaw::Progressive,
        };
        let specs = build_schedule(strat, 4, 400, &base()).unwrap();
        let d: Vec<u32> = specs.iter().map(|s| s.d_beta).collect();
        assert_eq!(d, vec![3, 2, 1, 1]);
        for s in &specs {
            assert_eq!(s.d_alpha, s.d_beta);
        }
    }

    #[test]
    fn partition_has_no_gaps_or_overlap() {
        for layers in [2usize, 3, 5, 7] {
            for t_anneal in [140u64, 1000, 4481] {
                let specs =
                    build_schedule(strategy(DecayInterval::Partition), layers, t_anneal, &base())
                        .unwrap();
                assert_eq!(specs[0].range.t_start(), 0);
                assert_eq!(specs.last().unwrap().range.t_end(), t_anneal);
                for w in specs.windows(2) {
                    assert_eq!(w[0].range.t_end(), w[1].range.t_start());
                }
            }
        }
    }

    #[test]
    fn params_monotone_non_increasing() {
        let spec = LayerScheduleSpec {
            range: AnnealingRange::new(50, 450).unwrap(),
            c_alpha: 0.7,
            static_mean: false,
            d_alpha: 2,
            d_beta: 3,
            ..base()
        };
        let mut last = spec.params_at(0);
        for t in 1..600 {
            let p = spec.params_at(t);
            assert!(p.mean() <= last.mean());
            assert!(p.std() <= last.std());
            last = p;
        }
    }

    /// Earlier layers never lag later ones in annealing progress under the
    /// theorem-friendly strategies; `same_end` inverts the ordering.
    #[test]
    fn input_first_ordering_predicate() {
        let layers = 4;
        let t_anneal = 400;
        for interval in [DecayInterval::Partition, DecayInterval::SameStart] {
            let specs = build_schedule(strategy(interval), layers, t_anneal, &base()).unwrap();
            for t in 0..=t_anneal {
                for w in specs.windows(2) {
                    // An earlier layer is never noisier than a later one, and
                    // once any earlier layer still carries noise, every later
                    // layer does too.
                    assert!(
                        w[0].params_at(t).std() <= w[1].params_at(t).std(),
                        "{interval}: annealing order inverted at t={t}"
                    );
                    if w[0].params_at(t).std() > 0.0 {
                        assert!(w[1].params_at(t).std() > 0.0);
                    }
                }
            }
        }
        let specs =
            build_schedule(strategy(DecayInterval::SameEnd), layers, t_anneal, &base()).unwrap();
        let inverted = (0..=t_anneal).any(|t| {
            specs
                .windows(2)
                .any(|w| w[0].params_at(t).std() > w[1].params_at(t).std())
        });
        assert!(inverted, "same_end should invert the annealing order at some t");
    }

    #[test]
    fn too_few_layers_rejected() {
        assert!(build_schedule(strategy(DecayInterval::Partition), 1, 100, &base()).is_err());
        assert!(build_schedule(strategy(DecayInterval::Partition), 8, 4, &base()).is_err());
    }
}
