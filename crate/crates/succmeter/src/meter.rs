//! The Gaussian pointer state and its decoherence factor.

use crate::error::{Error, Result};

/// A pure minimum-uncertainty Gaussian pointer centered at `Q = 0` with
/// position width `σ_Q` (so `σ_P = 1/(2σ_Q)` with `ħ = 1`), coupled to the
/// system with strength `ε`.
///
/// Mixed or displaced meters are rejected at construction: the correlation
/// formulas downstream assume this preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMeter {
    epsilon: f64,
    sigma_q: f64,
}

impl GaussianMeter {
    pub fn new(epsilon: f64, sigma_q: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidMeter {
                reason: format!("coupling strength must be finite and >= 0, got {epsilon}"),
            });
        }
        if !sigma_q.is_finite() || sigma_q <= 0.0 {
            return Err(Error::InvalidMeter {
                reason: format!("pointer width must be finite and > 0, got {sigma_q}"),
            });
        }
        Ok(Self { epsilon, sigma_q })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sigma_q(&self) -> f64 {
        self.sigma_q
    }

    /// Momentum width of the minimum-uncertainty state.
    pub fn sigma_p(&self) -> f64 {
        1.0 / (2.0 * self.sigma_q)
    }

    /// Decoherence factor `exp[-(ε²/8σ_Q²)(Δa)²]`: the characteristic
    /// function of the pointer momentum evaluated at `ε·Δa`.
    ///
    /// Always in `(0, 1]`; equal to 1 when `ε = 0` or `Δa = 0`.
    pub fn decoherence(&self, delta_a: f64) -> f64 {
        let x = self.epsilon * delta_a;
        (-x * x / (8.0 * self.sigma_q * self.sigma_q)).exp()
    }

    /// The pointer wavefunction `χ(q) = (2πσ_Q²)^(-1/4) exp(-q²/4σ_Q²)`.
    pub fn wavefunction(&self, q: f64) -> f64 {
        let s2 = self.sigma_q * self.sigma_q;
        (2.0 * std::f64::consts::PI * s2).powf(-0.25) * (-q * q / (4.0 * s2)).exp()
    }

    /// The pointer position density `|χ(q)|²`.
    pub fn position_density(&self, q: f64) -> f64 {
        let s2 = self.sigma_q * self.sigma_q;
        (2.0 * std::f64::consts::PI * s2).sqrt().recip() * (-q * q / (2.0 * s2)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_bad_parameters() {
        assert!(GaussianMeter::new(-1.0, 1.0).is_err());
        assert!(GaussianMeter::new(1.0, 0.0).is_err());
        assert!(GaussianMeter::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn minimum_uncertainty_product() {
        let m = GaussianMeter::new(1.0, 0.37).unwrap();
        assert_abs_diff_eq!(m.sigma_q() * m.sigma_p(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn wavefunction_squares_to_density() {
        let m = GaussianMeter::new(0.0, 1.3).unwrap();
        for q in [-2.0, -0.5, 0.0, 0.7, 3.1] {
            let chi = m.wavefunction(q);
            assert_abs_diff_eq!(chi * chi, m.position_density(q), epsilon = 1e-14);
        }
    }
}
