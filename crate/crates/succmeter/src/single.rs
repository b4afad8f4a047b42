//! Single-observable measurement: pointer density and mean, decoherence of
//! the reduced system state, and the textbook reduction rules for comparison.

use crate::error::{Error, Result};
use crate::meter::GaussianMeter;
use crate::operator::{check_same_dim, CMatrix, DensityMatrix, Projector, SpectralDecomposition};
use crate::tol;

/// Non-selective projective reduction `Σ_n P_n ρ P_n`.
pub fn luders_reduce(rho: &DensityMatrix, a: &SpectralDecomposition) -> Result<DensityMatrix> {
    check_same_dim(rho.dim(), a.dim())?;
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for p in a.projectors() {
        out += p * rho.matrix() * p;
    }
    DensityMatrix::new(out)
}

/// Selective collapse `P ρ P / tr(ρP)` onto a measurement outcome.
pub fn selective_collapse(rho: &DensityMatrix, p: &Projector) -> Result<DensityMatrix> {
    check_same_dim(rho.dim(), p.dim())?;
    let prob = rho.born(p.matrix());
    if prob <= tol::ZERO_PROBABILITY {
        return Err(Error::ZeroProbability {
            probability: prob,
            threshold: tol::ZERO_PROBABILITY,
        });
    }
    DensityMatrix::new((p.matrix() * rho.matrix() * p.matrix()).scale(1.0 / prob))
}

/// Decoherence factor of the meter at eigenvalue separation `Δa`; see
/// [`GaussianMeter::decoherence`].
pub fn decoherence_factor(meter: &GaussianMeter, delta_a: f64) -> f64 {
    meter.decoherence(delta_a)
}

/// Reduced system state after the meter is traced out,
/// `Σ_nn' g_nn'(ε) P_n ρ P_n'`.
///
/// At `ε = 0` this is `ρ` itself; for `ε/σ_Q → ∞` it converges to
/// [`luders_reduce`].
pub fn reduced_state_after(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    meter: &GaussianMeter,
) -> Result<DensityMatrix> {
    check_same_dim(rho.dim(), a.dim())?;
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for (n, pn) in a.projectors().iter().enumerate() {
        for (np, pnp) in a.projectors().iter().enumerate() {
            let g = meter.decoherence(a.eigenvalues()[n] - a.eigenvalues()[np]);
            out += (pn * rho.matrix() * pnp).scale(g);
        }
    }
    DensityMatrix::new(out)
}

/// One Gaussian component of a pointer density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerComponent {
    /// Born probability of the outcome.
    pub weight: f64,
    /// Displaced center `ε·a_n`.
    pub center: f64,
    /// Pointer width `σ_Q`.
    pub width: f64,
}

/// The exact pointer position density: a Gaussian mixture with Born weights.
///
/// Represented analytically, so moments carry no discretization error; use
/// [`PointerDensity::eval`] to sample on a grid for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerDensity {
    components: Vec<PointerComponent>,
}

impl PointerDensity {
    pub fn components(&self) -> &[PointerComponent] {
        &self.components
    }

    /// `p(Q) = Σ_n W_n |χ(Q - ε a_n)|²`.
    pub fn eval(&self, q: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let s2 = c.width * c.width;
                let d = q - c.center;
                c.weight * (2.0 * std::f64::consts::PI * s2).sqrt().recip()
                    * (-d * d / (2.0 * s2)).exp()
            })
            .sum()
    }

    /// Exact mean `⟨Q⟩ = Σ_n W_n ε a_n`.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.center).sum()
    }

    /// Total mixture weight; 1 up to roundoff.
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }

    /// Sample `(Q, p(Q))` pairs on a uniform grid.
    pub fn sample(&self, q_min: f64, q_max: f64, points: usize) -> Vec<(f64, f64)> {
        let n = points.max(2);
        (0..n)
            .map(|k| {
                let q = q_min + (q_max - q_min) * k as f64 / (n - 1) as f64;
                (q, self.eval(q))
            })
            .collect()
    }
}

/// Pointer density after measuring `A` on `ρ`: Born weights `tr(ρ P_n)` on
/// Gaussians centered at `ε a_n` with width `σ_Q`.
pub fn pointer_density(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    meter: &GaussianMeter,
) -> Result<PointerDensity> {
    check_same_dim(rho.dim(), a.dim())?;
    let components = a
        .eigenvalues()
        .iter()
        .zip(a.projectors())
        .map(|(&eig, p)| {
            // Clamp the tiny negative roundoff a trace product can produce.
            let weight = rho.born(p).max(0.0);
            PointerComponent {
                weight,
                center: meter.epsilon() * eig,
                width: meter.sigma_q(),
            }
        })
        .collect();
    Ok(PointerDensity { components })
}

/// Coupling-independent pointer mean in units of `ε`:
/// `⟨Q⟩/ε = Σ_n a_n tr(ρ P_n) = tr(ρ A)`.
///
/// When `A` is a projector this is the Born probability of the outcome
/// `π = 1`.
pub fn pointer_mean(rho: &DensityMatrix, a: &SpectralDecomposition) -> Result<f64> {
    check_same_dim(rho.dim(), a.dim())?;
    Ok(a.eigenvalues()
        .iter()
        .zip(a.projectors())
        .map(|(&eig, p)| eig * (rho.matrix() * p).trace().re)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{max_abs_diff, random_density, random_hermitian, CVector};
    use crate::presets;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn meter(epsilon: f64, sigma_q: f64) -> GaussianMeter {
        GaussianMeter::new(epsilon, sigma_q).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        DensityMatrix::from_ket(&presets::ket_plus()).unwrap()
    }

    /// Independent check of the decoherence factor: quadrature of the
    /// momentum-space characteristic function
    /// `∫ |χ̃(p)|² exp(-i ε Δa p) dp` over a wide grid.
    fn characteristic_function_quadrature(meter: &GaussianMeter, delta_a: f64) -> f64 {
        let sigma_p = meter.sigma_p();
        let extent = 12.0 * sigma_p;
        let n = 20_001;
        let h = 2.0 * extent / (n - 1) as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let p = -extent + k as f64 * h;
            let density = (2.0 * std::f64::consts::PI * sigma_p * sigma_p).sqrt().recip()
                * (-p * p / (2.0 * sigma_p * sigma_p)).exp();
            let phase = Complex64::from_polar(1.0, -meter.epsilon() * delta_a * p);
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            sum += phase.scale(density * w);
        }
        (sum * Complex64::new(h, 0.0)).re
    }

    #[test]
    fn luders_on_plus_state_gives_maximally_mixed() {
        let out = luders_reduce(&plus_state(), &presets::observable_z()).unwrap();
        assert!(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-14);
    }

    #[test]
    fn luders_fixes_commuting_states() {
        // Eigenstate of A.
        let rho = DensityMatrix::from_ket(&presets::ket_zero(2)).unwrap();
        let out = luders_reduce(&rho, &presets::observable_z()).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-14);
        // Commuting mixed state.
        let mixed = DensityMatrix::maximally_mixed(3);
        let obs = crate::operator::SpectralDecomposition::decompose_auto(&random_hermitian(3, 5))
            .unwrap();
        let out = luders_reduce(&mixed, &obs).unwrap();
        assert!(max_abs_diff(out.matrix(), mixed.matrix()) < 1e-12);
    }

    #[test]
    fn collapse_of_mixed_state_onto_rank_one() {
        let rho = DensityMatrix::maximally_mixed(2);
        let out = selective_collapse(&rho, &presets::projector_z0()).unwrap();
        let expect = DensityMatrix::from_ket(&presets::ket_zero(2)).unwrap();
        assert!(max_abs_diff(out.matrix(), expect.matrix()) < 1e-14);
    }

    #[test]
    fn collapse_on_orthogonal_outcome_fails() {
        let rho = DensityMatrix::from_ket(&presets::ket_zero(2)).unwrap();
        let p1 = presets::projector_z0().complement();
        assert!(matches!(
            selective_collapse(&rho, &p1),
            Err(Error::ZeroProbability { .. })
        ));
    }

    #[test]
    fn collapse_of_plus_onto_z0() {
        let out = selective_collapse(&plus_state(), &presets::projector_z0()).unwrap();
        let expect = DensityMatrix::from_ket(&presets::ket_zero(2)).unwrap();
        assert!(max_abs_diff(out.matrix(), expect.matrix()) < 1e-14);
        assert_abs_diff_eq!(out.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn decoherence_closed_form_values() {
        assert_abs_diff_eq!(decoherence_factor(&meter(0.0, 1.0), 3.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(decoherence_factor(&meter(2.0, 1.0), 0.0), 1.0, epsilon = 1e-15);
        // ε=2, σ_Q=1, Δa=1 → e^{-1/2}
        assert_abs_diff_eq!(
            decoherence_factor(&meter(2.0, 1.0), 1.0),
            0.6065306597126334,
            epsilon = 1e-15
        );
    }

    #[test]
    fn decoherence_matches_characteristic_function_quadrature() {
        for (ratio, delta_a) in [(0.0, 1.0), (0.3, 0.5), (1.0, 2.0), (4.0, 1.0), (10.0, 0.3)] {
            let m = meter(ratio, 1.0);
            let analytic = decoherence_factor(&m, delta_a);
            let quad = characteristic_function_quadrature(&m, delta_a);
            assert_abs_diff_eq!(analytic, quad, epsilon = 1e-8);
        }
    }

    #[test]
    fn zero_coupling_leaves_state_unchanged() {
        let rho = random_density(3, 11);
        let obs = crate::operator::SpectralDecomposition::decompose_auto(&random_hermitian(3, 2))
            .unwrap();
        let out = reduced_state_after(&rho, &obs, &meter(0.0, 1.0)).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn strong_coupling_approaches_luders() {
        let out = reduced_state_after(&plus_state(), &presets::observable_z(), &meter(10.0, 1.0))
            .unwrap();
        let luders = luders_reduce(&plus_state(), &presets::observable_z()).unwrap();
        assert!(max_abs_diff(out.matrix(), luders.matrix()) < 2e-6);
    }

    #[test]
    fn unit_ratio_scales_off_diagonals_by_half_exponent() {
        // Δa = 2 for σ_z, so the off-diagonals shrink by e^{-1/2}.
        let out = reduced_state_after(&plus_state(), &presets::observable_z(), &meter(1.0, 1.0))
            .unwrap();
        let g = (-0.5f64).exp();
        assert_abs_diff_eq!(out.matrix()[(0, 1)].re, 0.5 * g, epsilon = 1e-14);
        assert_abs_diff_eq!(out.matrix()[(1, 0)].re, 0.5 * g, epsilon = 1e-14);
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn eigenstate_gives_single_displaced_gaussian() {
        let rho = DensityMatrix::from_ket(&presets::ket_zero(2)).unwrap();
        let d = pointer_density(&rho, &presets::observable_z(), &meter(1.5, 0.8)).unwrap();
        let weights: Vec<f64> = d.components().iter().map(|c| c.weight).collect();
        assert_abs_diff_eq!(weights[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(weights[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.components()[0].center, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn maximally_mixed_gives_equal_weights_at_both_centers() {
        let rho = DensityMatrix::maximally_mixed(2);
        let d = pointer_density(&rho, &presets::observable_z(), &meter(2.0, 1.0)).unwrap();
        for c in d.components() {
            assert_abs_diff_eq!(c.weight, 0.5, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(d.components()[0].center, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.components()[1].center, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn projector_observable_splits_plus_state_evenly() {
        let d = pointer_density(&plus_state(), &presets::observable_proj_z0(), &meter(1.0, 1.0))
            .unwrap();
        assert_eq!(d.components().len(), 2);
        assert_abs_diff_eq!(d.components()[0].weight, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(d.components()[0].center, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.components()[1].weight, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(d.components()[1].center, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pointer_mean_examples() {
        let zero = DensityMatrix::from_ket(&presets::ket_zero(2)).unwrap();
        assert_abs_diff_eq!(pointer_mean(&zero, &presets::observable_z()).unwrap(), 1.0, epsilon = 1e-14);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(pointer_mean(&mixed, &presets::observable_z()).unwrap(), 0.0, epsilon = 1e-14);
        // Projector case: Born probability of outcome 1.
        assert_abs_diff_eq!(
            pointer_mean(&plus_state(), &presets::observable_proj_z0()).unwrap(),
            0.5,
            epsilon = 1e-14
        );
    }

    proptest! {
        #[test]
        fn trace_preserved_for_random_inputs(
            dim in 2usize..=5,
            seed in 0u64..200,
            eps_idx in 0usize..4,
        ) {
            let eps = [0.0, 0.1, 1.0, 10.0][eps_idx];
            let rho = random_density(dim, seed);
            let obs = crate::operator::SpectralDecomposition::decompose_auto(
                &random_hermitian(dim, seed + 1000),
            ).unwrap();
            let out = reduced_state_after(&rho, &obs, &meter(eps, 1.0)).unwrap();
            prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(out.matrix().trace().im.abs() < 1e-12);
        }

        #[test]
        fn pointer_mean_is_coupling_independent(seed in 0u64..100, eps_idx in 0usize..3) {
            let eps = [1e-3, 1.0, 10.0][eps_idx];
            let rho = random_density(3, seed);
            let obs = crate::operator::SpectralDecomposition::decompose_auto(
                &random_hermitian(3, seed + 77),
            ).unwrap();
            let mean_direct = pointer_mean(&rho, &obs).unwrap();
            let density = pointer_density(&rho, &obs, &meter(eps, 1.0)).unwrap();
            prop_assert!((density.mean() / eps - mean_direct).abs() < 1e-12);
            // tr(ρA) along the independent route.
            let tr = (rho.matrix() * obs.observable()).trace().re;
            prop_assert!((mean_direct - tr).abs() < 1e-12);
        }

        #[test]
        fn density_normalizes_exactly(seed in 0u64..100) {
            let rho = random_density(4, seed);
            let obs = crate::operator::SpectralDecomposition::decompose_auto(
                &random_hermitian(4, seed + 3),
            ).unwrap();
            let d = pointer_density(&rho, &obs, &meter(0.7, 1.1)).unwrap();
            prop_assert!((d.total_weight() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ket_constructor_rejects_zero_vector() {
        let z = CVector::from_vec(vec![Complex64::new(0.0, 0.0); 2]);
        assert!(DensityMatrix::from_ket(&z).is_err());
    }
}
