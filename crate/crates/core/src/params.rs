// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

//! Regularity classes, the Riesz-mean family g_γ and the rules tying the
//! mollification scale ε to the semiclassical parameter ℏ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hölder class C^{k,μ}: k derivatives, the k-th μ-Hölder continuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderClass {
    pub k: u32,
    pub mu: f64,
}

impl HolderClass {
    pub fn new(k: u32, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain(format!("Hölder exponent μ = {mu} outside [0, 1]")));
        }
        Ok(Self { k, mu })
    }

    /// The total regularity k + μ.
    pub fn order(&self) -> f64 {
        f64::from(self.k) + self.mu
    }
}

/// g_γ(t): the indicator of (−∞, 0] for γ = 0, and (t)_−^γ for γ ∈ (0, 1].
pub fn g_gamma(t: f64, gamma: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&gamma));
    if gamma == 0.0 {
        if t <= 0.0 {
            1.0
        } else {
            0.0
        }
    } else if t < 0.0 {
        (-t).powf(gamma)
    } else {
        0.0
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::Domain(format!("Riesz order γ = {gamma} outside [0, 1]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScalingMode {
    /// δ chosen so the framing error matches the sharp remainder.
    Sharp,
    /// δ = 1/3 unconditionally.
    #[default]
    Capped,
}

/// The rule ε(ℏ) = ℏ^{1−δ} for a fixed δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRule {
    pub delta: f64,
    pub gamma: f64,
    pub regularity: HolderClass,
    pub mode: ScalingMode,
}

/// One concrete (ℏ, δ, ε, γ) tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalParams {
    pub hbar: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gamma: f64,
}

impl SemiclassicalParams {
    pub fn new(hbar: f64, delta: f64, gamma: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::Domain(format!("ℏ = {hbar} must be positive")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Domain(format!("δ = {delta} outside (0, 1]")));
        }
        check_gamma(gamma)?;
        Ok(Self {
            hbar,
            delta,
            epsilon: hbar.powf(1.0 - delta),
            gamma,
        })
    }
}

impl ScalingRule {
    pub fn params(&self, hbar: f64) -> Result<SemiclassicalParams> {
        SemiclassicalParams::new(hbar, self.delta, self.gamma)
    }
}

/// Select δ for the given Riesz order and regularity.
///
/// Sharp mode: δ = μ/(1+μ) for γ = 0 (needs k = 1, μ ≥ 1/2), and
/// δ = (1+μ−γ)/(2+μ) for γ > 0 (needs k = 2, μ ≥ max(3γ/2 − 1/2, 0)).
/// Both give δ ≥ 1/3. Capped mode always uses δ = 1/3.
pub fn choose_scaling(gamma: f64, regularity: HolderClass, mode: ScalingMode) -> Result<ScalingRule> {
    check_gamma(gamma)?;
    let mu = regularity.mu;
    let delta = match mode {
        ScalingMode::Capped => 1.0 / 3.0,
        ScalingMode::Sharp if gamma == 0.0 => {
            if regularity.k != 1 {
                return Err(Error::Precondition(format!(
                    "sharp scaling for γ = 0 needs k = 1, got k = {}",
                    regularity.k
                )));
            }
            if mu < 0.5 {
                return Err(Error::Precondition(format!("sharp scaling for γ = 0 needs μ ≥ 1/2, got μ = {mu}")));
            }
            mu / (1.0 + mu)
        }
        ScalingMode::Sharp => {
            if regularity.k != 2 {
                return Err(Error::Precondition(format!(
                    "sharp scaling for γ > 0 needs k = 2, got k = {}",
                    regularity.k
                )));
            }
            let needed = (1.5 * gamma - 0.5).max(0.0);
            if mu < needed {
                return Err(Error::Precondition(format!(
                    "sharp scaling for γ = {gamma} needs μ ≥ 3γ/2 − 1/2 = {needed}, got μ = {mu}"
                )));
            }
            (1.0 + mu - gamma) / (2.0 + mu)
        }
    };
    Ok(ScalingRule {
        delta,
        gamma,
        regularity,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_gamma_examples() {
        assert_eq!(g_gamma(-4.0, 0.5), 2.0);
        assert_eq!(g_gamma(0.5, 0.0), 0.0);
        assert_eq!(g_gamma(0.0, 0.0), 1.0);
        assert_eq!(g_gamma(0.0, 1.0), 0.0);
        assert_eq!(g_gamma(-3.0, 1.0), 3.0);
    }

    #[test]
    fn sharp_gamma_zero_half() {
        let hc = HolderClass::new(1, 0.5).unwrap();
        let rule = choose_scaling(0.0, hc, ScalingMode::Sharp).unwrap();
        assert!((rule.delta - 1.0 / 3.0).abs() < 1e-15);
        let p = rule.params(0.01).unwrap();
        assert!((p.epsilon.powf(1.5) - 0.01).abs() / 0.01 < 1e-12);
    }

    #[test]
    fn sharp_gamma_one() {
        let hc = HolderClass::new(2, 1.0).unwrap();
        let rule = choose_scaling(1.0, hc, ScalingMode::Sharp).unwrap();
        assert!((rule.delta - 1.0 / 3.0).abs() < 1e-15);
        let p = rule.params(0.05).unwrap();
        let lhs = p.epsilon.powi(3);
        assert!((lhs - 0.05f64.powi(2)).abs() / lhs < 1e-12);
    }

    #[test]
    fn capped_is_one_third() {
        for (gamma, k, mu) in [(0.0, 1, 0.0), (0.5, 2, 0.3), (1.0, 0, 1.0)] {
            let rule = choose_scaling(gamma, HolderClass::new(k, mu).unwrap(), ScalingMode::Capped).unwrap();
            assert_eq!(rule.delta, 1.0 / 3.0);
        }
    }

    #[test]
    fn sharp_rejects_insufficient_mu() {
        let err = choose_scaling(0.0, HolderClass::new(1, 0.4).unwrap(), ScalingMode::Sharp).unwrap_err();
        assert!(err.to_string().contains("μ ≥ 1/2"), "{err}");
        let err = choose_scaling(1.0, HolderClass::new(2, 0.9).unwrap(), ScalingMode::Sharp).unwrap_err();
        assert!(err.to_string().contains("3γ/2"), "{err}");
    }

    #[test]
    fn holder_class_validates() {
        assert!(HolderClass::new(1, 1.5).is_err());
        assert!(HolderClass::new(0, -0.1).is_err());
    }
}
