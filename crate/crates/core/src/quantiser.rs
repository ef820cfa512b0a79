//! Stair functions: general K-level quantisers, the parametric Heaviside, and
//! hardware-style linear B-bit quantisers.
//!
//! A quantiser maps the real line onto a finite, strictly increasing set of
//! levels `q_0 < … < q_{K-1}` through strictly increasing thresholds
//! `θ_1 < … < θ_{K-1}`. Bin `k` is the half-open interval `[θ_k, θ_{k+1})`
//! with `θ_0 = −∞` and `θ_K = +∞`, so a threshold always belongs to the bin
//! above it. Every module in this crate shares that convention.

use crate::error::{Error, Result};

/// Parametric Heaviside step: `1` iff `θ ≤ x`, else `0`.
pub fn heaviside(theta: f64, x: f64) -> Result<f64> {
    if !theta.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!(
            "heaviside requires finite arguments, got theta={theta}, x={x}"
        )));
    }
    Ok(if theta <= x { 1.0 } else { 0.0 })
}

/// A stair function described by its levels and thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantiser {
    levels: Vec<f64>,
    thresholds: Vec<f64>,
}

impl Quantiser {
    /// Builds a quantiser, validating that levels and thresholds are finite,
    /// strictly increasing, and consistently sized (`K ≥ 2`,
    /// `count(thresholds) = K − 1`).
    pub fn new(levels: Vec<f64>, thresholds: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::Config(format!(
                "quantiser needs at least 2 levels, got {}",
                levels.len()
            )));
        }
        if thresholds.len() != levels.len() - 1 {
            return Err(Error::Config(format!(
                "quantiser with {} levels needs {} thresholds, got {}",
                levels.len(),
                levels.len() - 1,
                thresholds.len()
            )));
        }
        Self::check_increasing(&levels, "levels")?;
        Self::check_increasing(&thresholds, "thresholds")?;
        Ok(Self { levels, thresholds })
    }

    fn check_increasing(values: &[f64], name: &str) -> Result<()> {
        for w in values.windows(2) {
            if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(Error::Config(format!(
                    "quantiser {name} must be finite and strictly increasing"
                )));
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "quantiser {name} must be finite, got {v}"
            )));
        }
        Ok(())
    }

    /// The 2-level quantiser `{0, 1}` stepping at `theta`.
    pub fn heaviside_at(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Config(format!(
                "heaviside threshold must be finite, got {theta}"
            )));
        }
        Self::new(vec![0.0, 1.0], vec![theta])
    }

    /// The symmetric ternary quantiser `{−1, 0, +1}` with thresholds `±0.5`.
    pub fn ternary() -> Self {
        Self::new(vec![-1.0, 0.0, 1.0], vec![-0.5, 0.5]).expect("valid ternary quantiser")
    }

    /// Quantisation levels, strictly increasing.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Thresholds between consecutive bins, strictly increasing.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Number of levels `K`.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Index of the bin containing `x`; thresholds belong to the upper bin.
    pub fn bin_index(&self, x: f64) -> Result<usize> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("bin_index requires finite x, got {x}")));
        }
        Ok(self.thresholds.partition_point(|&t| t <= x))
    }

    /// Applies the stair function, returning the level of the bin containing `x`.
    pub fn quantise(&self, x: f64) -> Result<f64> {
        Ok(self.levels[self.bin_index(x)?])
    }
}

/// A linear B-bit quantiser: `ε·clip(⌊x/ε⌋, z, z + K − 1)` with `K = 2^B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearQuantiserSpec {
    offset: i64,
    quantum: f64,
    precision: u32,
}

impl LinearQuantiserSpec {
    /// Maximum supported precision; `induced()` materialises `2^B` levels.
    pub const MAX_PRECISION: u32 = 24;

    /// Builds a linear quantiser spec with offset `z`, quantum `ε > 0`, and
    /// precision `B ≥ 1`.
    pub fn new(offset: i64, quantum: f64, precision: u32) -> Result<Self> {
        if !(quantum > 0.0) || !quantum.is_finite() {
            return Err(Error::Config(format!(
                "linear quantiser quantum must be a positive real, got {quantum}"
            )));
        }
        if precision < 1 || precision > Self::MAX_PRECISION {
            return Err(Error::Config(format!(
                "linear quantiser precision must be in 1..={}, got {precision}",
                Self::MAX_PRECISION
            )));
        }
        Ok(Self {
            offset,
            quantum,
            precision,
        })
    }

    /// Unsigned variant: `z = 0`.
    pub fn unsigned(quantum: f64, precision: u32) -> Result<Self> {
        Self::new(0, quantum, precision)
    }

    /// Signed variant: `z = −2^{B−1}`.
    pub fn signed(quantum: f64, precision: u32) -> Result<Self> {
        if precision < 1 || precision > Self::MAX_PRECISION {
            return Err(Error::Config(format!(
                "linear quantiser precision must be in 1..={}, got {precision}",
                Self::MAX_PRECISION
            )));
        }
        Self::new(-(1i64 << (precision - 1)), quantum, precision)
    }

    /// Number of levels `K = 2^B`.
    pub fn level_count(&self) -> usize {
        1usize << self.precision
    }

    /// Offset `z`.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Quantum `ε`.
    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    /// Precision `B`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn grid_point(&self, k: i64) -> f64 {
        k as f64 * self.quantum
    }

    /// Evaluates `ε·clip(⌊x/ε⌋, z, z + K − 1)`.
    ///
    /// The flooring index is corrected so that bin membership is decided by
    /// the same `θ_k ≤ x` predicate as the induced [`Quantiser`]; the two
    /// routes agree bit-for-bit on every input.
    pub fn quantise(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!(
                "linear quantise requires finite x, got {x}"
            )));
        }
        let lo = self.offset;
        let hi = self.offset + (self.level_count() as i64 - 1);
        let floored = (x / self.quantum).floor();
        let mut k = floored.clamp(lo as f64, hi as f64) as i64;
        while k > lo && self.grid_point(k) > x {
            k -= 1;
        }
        while k < hi && self.grid_point(k + 1) <= x {
            k += 1;
        }
        Ok(self.grid_point(k))
    }

    /// The explicit [`Quantiser`] with levels and thresholds `(z + k)·ε`.
    pub fn induced(&self) -> Quantiser {
        let k = self.level_count();
        let levels: Vec<f64> = (0..k).map(|j| self.grid_point(self.offset + j as i64)).collect();
        let thresholds = levels[1..].to_vec();
        Quantiser::new(levels, thresholds).expect("induced quantiser satisfies the invariants")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn heaviside_step_convention() {
        assert_eq!(heaviside(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(heaviside(0.0, -0.1).unwrap(), 0.0);
        assert_eq!(heaviside(2.5, 2.5).unwrap(), 1.0);
    }

    #[test]
    fn heaviside_rejects_non_finite() {
        assert!(heaviside(f64::NAN, 0.0).is_err());
        assert!(heaviside(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn ternary_quantisation() {
        let q = Quantiser::ternary();
        assert_eq!(q.quantise(0.2).unwrap(), 0.0);
        assert_eq!(q.quantise(0.5).unwrap(), 1.0);
        assert_eq!(q.quantise(-0.5).unwrap(), 0.0);
        assert_eq!(q.quantise(-0.7).unwrap(), -1.0);
        assert_eq!(q.quantise(0.9).unwrap(), 1.0);
    }

    #[test]
    fn binary_quantiser_clips_below() {
        let q = Quantiser::heaviside_at(0.0).unwrap();
        assert_eq!(q.quantise(-3.0).unwrap(), 0.0);
    }

    #[test]
    fn bin_index_threshold_right_inclusive() {
        let q = Quantiser::ternary();
        assert_eq!(q.bin_index(-0.5).unwrap(), 1);
        assert_eq!(q.bin_index(-0.7).unwrap(), 0);
        assert_eq!(q.bin_index(0.9).unwrap(), 2);
    }

    #[test]
    fn quantise_matches_heaviside_sum() {
        let q = Quantiser::new(vec![-2.0, -0.25, 0.5, 3.0], vec![-1.0, 0.0, 1.5]).unwrap();
        for i in -40..40 {
            let x = i as f64 * 0.1;
            let mut acc = q.levels()[0];
            for (k, &theta) in q.thresholds().iter().enumerate() {
                acc += (q.levels()[k + 1] - q.levels()[k]) * heaviside(theta, x).unwrap();
            }
            assert!((acc - q.quantise(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_quantisers_rejected() {
        assert!(Quantiser::new(vec![0.0], vec![]).is_err());
        assert!(Quantiser::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(Quantiser::new(vec![1.0, 0.0], vec![0.5]).is_err());
        assert!(Quantiser::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn linear_quantiser_examples() {
        let spec = LinearQuantiserSpec::new(0, 0.25, 2).unwrap();
        assert_eq!(spec.quantise(0.6).unwrap(), 0.5);

        let spec = LinearQuantiserSpec::new(-2, 1.0, 2).unwrap();
        assert_eq!(spec.quantise(10.0).unwrap(), 1.0);

        let spec = LinearQuantiserSpec::new(0, 1.0, 1).unwrap();
        assert_eq!(spec.quantise(-5.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_quantiser_rejects_bad_quantum() {
        assert!(LinearQuantiserSpec::new(0, 0.0, 2).is_err());
        assert!(LinearQuantiserSpec::new(0, -1.0, 2).is_err());
        assert!(LinearQuantiserSpec::new(0, 1.0, 0).is_err());
    }

    #[test]
    fn signed_unsigned_offsets() {
        assert_eq!(LinearQuantiserSpec::unsigned(1.0, 4).unwrap().offset(), 0);
        assert_eq!(LinearQuantiserSpec::signed(1.0, 4).unwrap().offset(), -8);
    }

    proptest! {
        #[test]
        fn linear_matches_induced_exactly(
            offset in -8i64..8,
            quantum in 1e-3f64..10.0,
            precision in 1u32..6,
            xs in proptest::collection::vec(-100.0f64..100.0, 1..64),
        ) {
            let spec = LinearQuantiserSpec::new(offset, quantum, precision).unwrap();
            let induced = spec.induced();
            for x in xs {
                prop_assert_eq!(
                    spec.quantise(x).unwrap().to_bits(),
                    induced.quantise(x).unwrap().to_bits()
                );
            }
            // Dense grid across the quantiser range, including near-threshold points.
            let lo = spec.offset() as f64 * quantum - 2.0 * quantum;
            let hi = (spec.offset() + spec.level_count() as i64) as f64 * quantum + 2.0 * quantum;
            let n = 257;
            for i in 0..=n {
                let x = lo + (hi - lo) * i as f64 / n as f64;
                prop_assert_eq!(
                    spec.quantise(x).unwrap().to_bits(),
                    induced.quantise(x).unwrap().to_bits()
                );
            }
            for &t in induced.thresholds() {
                prop_assert_eq!(
                    spec.quantise(t).unwrap().to_bits(),
                    induced.quantise(t).unwrap().to_bits()
                );
            }
        }

        #[test]
        fn quantise_monotone_and_consistent(
            raw_levels in proptest::collection::vec(-10.0f64..10.0, 2..8),
            raw_gaps in proptest::collection::vec(0.1f64..2.0, 1..7),
            xs in proptest::collection::vec(-30.0f64..30.0, 1..64),
        ) {
            let mut levels = raw_levels;
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            levels.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            prop_assume!(levels.len() >= 2);
            let mut thresholds = Vec::with_capacity(levels.len() - 1);
            let mut t = -5.0;
            for g in raw_gaps.iter().take(levels.len() - 1) {
                t += g;
                thresholds.push(t);
            }
            prop_assume!(thresholds.len() == levels.len() - 1);
            let q = Quantiser::new(levels.clone(), thresholds).unwrap();

            let mut sorted = xs.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let vals: Vec<f64> = sorted.iter().map(|&x| q.quantise(x).unwrap()).collect();
            for w in vals.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for &x in &xs {
                prop_assert_eq!(q.quantise(x).unwrap(), q.levels()[q.bin_index(x).unwrap()]);
            }
            // A grid spanning all bins hits exactly the level set.
            let mut seen: Vec<f64> = Vec::new();
            for i in -80..=80 {
                let v = q.quantise(i as f64 * 0.1).unwrap();
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
            seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert_eq!(seen, levels);
        }
    }
}
