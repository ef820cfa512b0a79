//! Parametric noise families: uniform, triangular, normal, and logistic, all
//! parametrised by their mean `α` and standard deviation `β`.
//!
//! Every family is uni-modal with a density symmetric about its mean. The
//! compact families have supports `[α − √3β, α + √3β)` (uniform) and
//! `[α − √6β, α + √6β)` (triangular); the logistic uses scale `s = √3β/π` so
//! that its standard deviation is exactly `β`.
//!
//! `β = 0` denotes the degenerate Dirac delta at `α` (the annealed state).
//! Its CDF is the right-inclusive step `x ↦ [α ≤ x]`, matching the threshold
//! convention of the quantiser module, so annealed regularised activations
//! coincide bit-exactly with the plain quantiser.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Ratio between the logistic scale parameter and its standard deviation.
const LOGISTIC_SCALE_PER_STD: f64 = 0.5513288954217921; // √3/π

/// Two-sided 97.5% quantile of the standard normal, `Φ(z) − Φ(−z) = 0.95`.
const NORMAL_Z_95: f64 = 1.959963984540054;

/// The four supported distribution families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFamily {
    Uniform,
    Triangular,
    Normal,
    Logistic,
}

impl NoiseFamily {
    /// All four families, in a fixed order.
    pub const ALL: [NoiseFamily; 4] = [
        NoiseFamily::Uniform,
        NoiseFamily::Triangular,
        NoiseFamily::Normal,
        NoiseFamily::Logistic,
    ];

    /// True for the compact-support families (uniform, triangular).
    pub fn compact_support(self) -> bool {
        matches!(self, NoiseFamily::Uniform | NoiseFamily::Triangular)
    }

    /// Half-width of the support in standard deviations, for compact families.
    pub fn support_half_width_stds(self) -> Option<f64> {
        match self {
            NoiseFamily::Uniform => Some(3.0_f64.sqrt()),
            NoiseFamily::Triangular => Some(6.0_f64.sqrt()),
            NoiseFamily::Normal | NoiseFamily::Logistic => None,
        }
    }

    /// Lower-case family name.
    pub fn name(self) -> &'static str {
        match self {
            NoiseFamily::Uniform => "uniform",
            NoiseFamily::Triangular => "triangular",
            NoiseFamily::Normal => "normal",
            NoiseFamily::Logistic => "logistic",
        }
    }
}

impl std::fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Mean and standard deviation of a noise distribution.
///
/// `std = 0` is the Dirac delta at `mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    mean: f64,
    std: f64,
}

impl NoiseParams {
    /// Builds parameters, requiring a finite mean and a finite `std ≥ 0`.
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        if !mean.is_finite() || !std.is_finite() || std < 0.0 {
            return Err(Error::Config(format!(
                "noise params need finite mean and std >= 0, got mean={mean}, std={std}"
            )));
        }
        Ok(Self { mean, std })
    }

    /// The Dirac delta at `mean`.
    pub fn dirac(mean: f64) -> Self {
        Self { mean, std: 0.0 }
    }

    /// Mean `α`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard deviation `β`.
    pub fn std(&self) -> f64 {
        self.std
    }

    /// True when the distribution has collapsed to a Dirac delta.
    pub fn is_dirac(&self) -> bool {
        self.std == 0.0
    }
}

/// Probability density of `family` with parameters `p` at `x`.
///
/// Undefined for the Dirac state (`std = 0`).
pub fn pdf(family: NoiseFamily, p: NoiseParams, x: f64) -> Result<f64> {
    if p.is_dirac() {
        return Err(Error::Degenerate(
            "pdf is undefined for a Dirac delta (std = 0)".into(),
        ));
    }
    if x.is_nan() {
        return Ok(f64::NAN);
    }
    let (a, b) = (p.mean, p.std);
    Ok(match family {
        NoiseFamily::Uniform => {
            let h = 3.0_f64.sqrt() * b;
            if x >= a - h && x < a + h {
                1.0 / (2.0 * h)
            } else {
                0.0
            }
        }
        NoiseFamily::Triangular => {
            let h = 6.0_f64.sqrt() * b;
            if x < a - h || x >= a + h {
                0.0
            } else if x < a {
                (x - a + h) / (6.0 * b * b)
            } else {
                (a + h - x) / (6.0 * b * b)
            }
        }
        NoiseFamily::Normal => {
            let z = (x - a) / b;
            (-0.5 * z * z).exp() / ((2.0 * std::f64::consts::PI).sqrt() * b)
        }
        NoiseFamily::Logistic => {
            let s = LOGISTIC_SCALE_PER_STD * b;
            let e = (-(x - a).abs() / s).exp();
            e / (s * (1.0 + e) * (1.0 + e))
        }
    })
}

/// Cumulative distribution of `family` with parameters `p` at `x`.
///
/// For `std = 0` this is the right-inclusive step at the mean.
pub fn cdf(family: NoiseFamily, p: NoiseParams, x: f64) -> f64 {
    let (a, b) = (p.mean, p.std);
    if x.is_nan() {
        return f64::NAN;
    }
    if p.is_dirac() {
        return if a <= x { 1.0 } else { 0.0 };
    }
    match family {
        NoiseFamily::Uniform => {
            let h = 3.0_f64.sqrt() * b;
            ((x - (a - h)) / (2.0 * h)).clamp(0.0, 1.0)
        }
        NoiseFamily::Triangular => {
            let h = 6.0_f64.sqrt() * b;
            if x <= a - h {
                0.0
            } else if x < a {
                let d = x - (a - h);
                d * d / (2.0 * h * h)
            } else if x < a + h {
                let d = (a + h) - x;
                1.0 - d * d / (2.0 * h * h)
            } else {
                1.0
            }
        }
        NoiseFamily::Normal => 0.5 * libm::erfc(-(x - a) / (b * std::f64::consts::SQRT_2)),
        NoiseFamily::Logistic => {
            let s = LOGISTIC_SCALE_PER_STD * b;
            1.0 / (1.0 + (-(x - a) / s).exp())
        }
    }
}

/// Survival function `1 − cdf(x)`, computed without cancellation in the
/// upper tail.
pub fn sf(family: NoiseFamily, p: NoiseParams, x: f64) -> f64 {
    let (a, b) = (p.mean, p.std);
    if x.is_nan() {
        return f64::NAN;
    }
    if p.is_dirac() {
        return if a <= x { 0.0 } else { 1.0 };
    }
    match family {
        NoiseFamily::Normal => 0.5 * libm::erfc((x - a) / (b * std::f64::consts::SQRT_2)),
        NoiseFamily::Logistic => {
            let s = LOGISTIC_SCALE_PER_STD * b;
            1.0 / (1.0 + ((x - a) / s).exp())
        }
        NoiseFamily::Uniform | NoiseFamily::Triangular => 1.0 - cdf(family, p, x),
    }
}

/// Draws one sample `ν ~ μ`. The Dirac state always returns the mean.
pub fn sample<R: Rng + ?Sized>(family: NoiseFamily, p: NoiseParams, rng: &mut R) -> f64 {
    let (a, b) = (p.mean, p.std);
    if p.is_dirac() {
        return a;
    }
    match family {
        NoiseFamily::Uniform => {
            let h = 3.0_f64.sqrt() * b;
            a - h + 2.0 * h * rng.gen::<f64>()
        }
        NoiseFamily::Triangular => {
            let h = 6.0_f64.sqrt() * b;
            let u: f64 = rng.gen();
            if u < 0.5 {
                a - h + h * (2.0 * u).sqrt()
            } else {
                a + h - h * (2.0 * (1.0 - u)).sqrt()
            }
        }
        NoiseFamily::Normal => {
            let z: f64 = StandardNormal.sample(rng);
            a + b * z
        }
        NoiseFamily::Logistic => {
            let s = LOGISTIC_SCALE_PER_STD * b;
            let mut u: f64 = rng.gen();
            while u <= 0.0 {
                u = rng.gen();
            }
            a + s * (u / (1.0 - u)).ln()
        }
    }
}

/// Parameters for `target` (normal or logistic) with the same mean as `p` and
/// the standard deviation that places exactly 95% of its mass inside the
/// support of the compact family `compact` with parameters `p`.
pub fn equivalent_params(
    target: NoiseFamily,
    compact: NoiseFamily,
    p: NoiseParams,
) -> Result<NoiseParams> {
    let half_width = compact.support_half_width_stds().ok_or_else(|| {
        Error::Config(format!(
            "equivalent_params needs a compact-support source family, got {compact}"
        ))
    })?;
    if target.compact_support() {
        return Err(Error::Config(format!(
            "equivalent_params target must be normal or logistic, got {target}"
        )));
    }
    if p.is_dirac() {
        return Ok(NoiseParams::dirac(p.mean));
    }
    let c = half_width * p.std;
    let std = match target {
        // 2Φ(c/σ) − 1 = 0.95
        NoiseFamily::Normal => c / NORMAL_Z_95,
        // 2F(c) − 1 = 0.95 with F the logistic CDF gives scale s = c/ln 39.
        NoiseFamily::Logistic => c / 39.0_f64.ln() / LOGISTIC_SCALE_PER_STD,
        NoiseFamily::Uniform | NoiseFamily::Triangular => unreachable!(),
    };
    NoiseParams::new(p.mean, std)
}
