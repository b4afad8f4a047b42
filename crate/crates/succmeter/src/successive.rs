//! Successive measurement of two observables with two meters: the
//! coupling-dependent quasi-probability table, the two-pointer correlations,
//! and the closed-form limits (Kirkwood–Dirac, Margenau–Hill, Wigner rule).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::exec;
use crate::meter::GaussianMeter;
use crate::operator::{check_same_dim, DensityMatrix, Projector, SpectralDecomposition};
use crate::tol;

/// The quasi-probability `W_{b_m a_n}(ε₁)` for observing `a_n` then `b_m`.
///
/// Complex in general; its real and imaginary parts carry the two measurable
/// pointer correlations. Depends on the first coupling `ε₁` only — never on
/// the second meter.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProbTable {
    /// `values[(n, m)]` for eigenvalue pair `(a_n, b_m)`.
    values: DMatrix<Complex64>,
    eigenvalues_a: Vec<f64>,
    eigenvalues_b: Vec<f64>,
    epsilon1: f64,
    sigma_q1: f64,
}

impl QuasiProbTable {
    pub fn value(&self, n: usize, m: usize) -> Complex64 {
        self.values[(n, m)]
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn eigenvalues_a(&self) -> &[f64] {
        &self.eigenvalues_a
    }

    pub fn eigenvalues_b(&self) -> &[f64] {
        &self.eigenvalues_b
    }

    pub fn epsilon1(&self) -> f64 {
        self.epsilon1
    }

    pub fn sigma_q1(&self) -> f64 {
        self.sigma_q1
    }

    pub fn num_a(&self) -> usize {
        self.eigenvalues_a.len()
    }

    pub fn num_b(&self) -> usize {
        self.eigenvalues_b.len()
    }

    /// Marginal over `b`: `Σ_m W[n, m]`, the Born probabilities of `a_n`.
    pub fn marginal_a(&self) -> Vec<Complex64> {
        (0..self.num_a())
            .map(|n| (0..self.num_b()).map(|m| self.values[(n, m)]).sum())
            .collect()
    }

    /// Marginal over `a`: `Σ_n W[n, m]`, the `b_m` distribution after the
    /// first measurement.
    pub fn marginal_b(&self) -> Vec<Complex64> {
        (0..self.num_b())
            .map(|m| (0..self.num_a()).map(|n| self.values[(n, m)]).sum())
            .collect()
    }

    /// `Σ_nm W[n, m]`; 1 up to roundoff.
    pub fn total(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// `Σ_nm a_n b_m W[n, m]`.
    pub fn weighted_sum(&self) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, &a) in self.eigenvalues_a.iter().enumerate() {
            for (m, &b) in self.eigenvalues_b.iter().enumerate() {
                sum += self.values[(n, m)].scale(a * b);
            }
        }
        sum
    }
}

/// The quasi-probability table
/// `W[n, m] = Σ_n' g_nn'(ε₁) tr[ρ P_a_n' P_b_m P_a_n]`.
///
/// Cells are computed independently (in parallel with the `parallel`
/// feature); within each cell the `n'` sum runs in ascending order, so the
/// result is bit-identical for any thread count.
pub fn quasi_probability(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    meter1: &GaussianMeter,
) -> Result<QuasiProbTable> {
    check_same_dim(rho.dim(), a.dim())?;
    check_same_dim(rho.dim(), b.dim())?;
    let (num_a, num_b) = (a.len(), b.len());
    let cells = exec::map_indexed(num_a * num_b, |k| {
        let (n, m) = (k / num_b, k % num_b);
        let mut w = Complex64::new(0.0, 0.0);
        for np in 0..num_a {
            let g = meter1.decoherence(a.eigenvalues()[n] - a.eigenvalues()[np]);
            let t = (rho.matrix() * a.projector(np) * b.projector(m) * a.projector(n)).trace();
            w += t.scale(g);
        }
        w
    });
    Ok(QuasiProbTable {
        values: DMatrix::from_fn(num_a, num_b, |n, m| cells[n * num_b + m]),
        eigenvalues_a: a.eigenvalues().to_vec(),
        eigenvalues_b: b.eigenvalues().to_vec(),
        epsilon1: meter1.epsilon(),
        sigma_q1: meter1.sigma_q(),
    })
}

/// Position–position correlation `⟨Q₁Q₂⟩/ε₁ε₂ = Re Σ_nm a_n b_m W[n, m]`.
pub fn corr_q1q2(table: &QuasiProbTable) -> f64 {
    table.weighted_sum().re
}

/// Momentum–position correlation
/// `⟨P₁Q₂⟩/ε₁ε₂ = (1/2σ_Q₁²) Im Σ_nm a_n b_m W[n, m]`.
pub fn corr_p1q2(table: &QuasiProbTable) -> f64 {
    table.weighted_sum().im / (2.0 * table.sigma_q1 * table.sigma_q1)
}

/// Both pointer correlations of a table, in units of `ε₁ε₂`, together with
/// the meter metadata needed to undo the normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    /// `⟨Q₁Q₂⟩/ε₁ε₂`.
    pub q1q2: f64,
    /// `⟨P₁Q₂⟩/ε₁ε₂`.
    pub p1q2: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub sigma_q1: f64,
}

impl CorrelationResult {
    pub fn from_table(table: &QuasiProbTable, epsilon2: f64) -> Self {
        Self {
            q1q2: corr_q1q2(table),
            p1q2: corr_p1q2(table),
            epsilon1: table.epsilon1(),
            epsilon2,
            sigma_q1: table.sigma_q1(),
        }
    }

    /// The raw expectation `⟨Q₁Q₂⟩`.
    pub fn raw_q1q2(&self) -> f64 {
        self.q1q2 * self.epsilon1 * self.epsilon2
    }

    /// The raw expectation `⟨P₁Q₂⟩`.
    pub fn raw_p1q2(&self) -> f64 {
        self.p1q2 * self.epsilon1 * self.epsilon2
    }
}

/// Kirkwood–Dirac distribution `K[n, m] = tr(ρ P_b_m P_a_n)`: the weak
/// coupling limit `ε₁ → 0` of [`quasi_probability`].
pub fn kirkwood(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
) -> Result<DMatrix<Complex64>> {
    check_same_dim(rho.dim(), a.dim())?;
    check_same_dim(rho.dim(), b.dim())?;
    Ok(DMatrix::from_fn(a.len(), b.len(), |n, m| {
        (rho.matrix() * b.projector(m) * a.projector(n)).trace()
    }))
}

/// Margenau–Hill distribution
/// `½ tr[ρ(P_b_m P_a_n + P_a_n P_b_m)] = Re K[n, m]`; real, possibly
/// negative.
pub fn margenau_hill(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
) -> Result<DMatrix<f64>> {
    check_same_dim(rho.dim(), a.dim())?;
    check_same_dim(rho.dim(), b.dim())?;
    Ok(DMatrix::from_fn(a.len(), b.len(), |n, m| {
        let sym = b.projector(m) * a.projector(n) + a.projector(n) * b.projector(m);
        0.5 * (rho.matrix() * sym).trace().re
    }))
}

/// Wigner's joint probability `tr(ρ P_a P_b P_a)` for two successive
/// projective outcomes: the strong-coupling limit `ε₁ → ∞` of the
/// quasi-probability. Always in `[0, 1]`.
pub fn wigner_joint(rho: &DensityMatrix, pa: &Projector, pb: &Projector) -> Result<f64> {
    check_same_dim(rho.dim(), pa.dim())?;
    check_same_dim(rho.dim(), pb.dim())?;
    Ok((rho.matrix() * pa.matrix() * pb.matrix() * pa.matrix()).trace().re)
}

/// Full table of Wigner-rule probabilities over two decompositions.
pub fn wigner_table(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
) -> Result<DMatrix<f64>> {
    check_same_dim(rho.dim(), a.dim())?;
    check_same_dim(rho.dim(), b.dim())?;
    Ok(DMatrix::from_fn(a.len(), b.len(), |n, m| {
        (rho.matrix() * a.projector(n) * b.projector(m) * a.projector(n)).trace().re
    }))
}

/// Result of checking the marginal identities of a quasi-probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalReport {
    /// Max deviation of `Σ_m W[n, m]` from `tr(ρ P_a_n)`.
    pub max_dev_a: f64,
    /// Max deviation of `Σ_n W[n, m]` from `tr(ρ^(A) P_b_m)`.
    pub max_dev_b: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Verify both marginal identities of `table` against the states computed
/// directly from `(ρ, A, B, meter1)`.
pub fn marginal_check(
    table: &QuasiProbTable,
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    meter1: &GaussianMeter,
) -> Result<MarginalReport> {
    check_same_dim(rho.dim(), a.dim())?;
    check_same_dim(rho.dim(), b.dim())?;
    let reduced = crate::single::reduced_state_after(rho, a, meter1)?;

    let mut max_dev_a = 0.0f64;
    for (n, sum) in table.marginal_a().iter().enumerate() {
        let born = rho.born(a.projector(n));
        max_dev_a = max_dev_a.max((sum.re - born).abs()).max(sum.im.abs());
    }
    let mut max_dev_b = 0.0f64;
    for (m, sum) in table.marginal_b().iter().enumerate() {
        let born = reduced.born(b.projector(m));
        max_dev_b = max_dev_b.max((sum.re - born).abs()).max(sum.im.abs());
    }
    Ok(MarginalReport {
        max_dev_a,
        max_dev_b,
        tolerance: tol::MARGINAL,
        pass: max_dev_a <= tol::MARGINAL && max_dev_b <= tol::MARGINAL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{random_density, random_hermitian, CVector, OrthonormalBasis};
    use crate::presets;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn meter(epsilon: f64, sigma_q: f64) -> GaussianMeter {
        GaussianMeter::new(epsilon, sigma_q).unwrap()
    }

    fn y_plus() -> DensityMatrix {
        DensityMatrix::from_ket(&presets::ket_y_plus()).unwrap()
    }

    fn zero_state() -> DensityMatrix {
        DensityMatrix::from_ket(&presets::ket_zero(2)).unwrap()
    }

    #[test]
    fn commuting_eigenstate_concentrates_in_one_cell() {
        let z = presets::observable_z();
        for eps in [0.01, 1.0, 10.0] {
            let t = quasi_probability(&zero_state(), &z, &z, &meter(eps, 1.0)).unwrap();
            assert_abs_diff_eq!(t.value(0, 0).re, 1.0, epsilon = 1e-12);
            assert!(t.value(0, 0).im.abs() < 1e-14);
            for (n, m) in [(0, 1), (1, 0), (1, 1)] {
                assert!(t.value(n, m).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn strong_coupling_reaches_wigner_cell() {
        let t = quasi_probability(
            &zero_state(),
            &presets::observable_x(),
            &presets::observable_z(),
            &meter(10.0, 1.0),
        )
        .unwrap();
        assert!((t.value(0, 0).re - 0.25).abs() < 4e-6);
        assert!(t.value(0, 0).im.abs() < 4e-6);
    }

    #[test]
    fn weak_coupling_reaches_kirkwood_cell() {
        let t = quasi_probability(
            &y_plus(),
            &presets::observable_x(),
            &presets::observable_z(),
            &meter(1e-4, 1.0),
        )
        .unwrap();
        // Kirkwood value tr(ρ P_z+ P_x+) = (1+i)/4.
        assert!((t.value(0, 0).re - 0.25).abs() < 1e-7);
        assert!((t.value(0, 0).im - 0.25).abs() < 1e-7);
    }

    #[test]
    fn table_is_independent_of_second_meter() {
        let rho = random_density(3, 9);
        let a = SpectralDecomposition::decompose_auto(&random_hermitian(3, 1)).unwrap();
        let b = SpectralDecomposition::decompose_auto(&random_hermitian(3, 2)).unwrap();
        let m1 = meter(0.8, 1.2);
        let t = quasi_probability(&rho, &a, &b, &m1).unwrap();
        let r1 = CorrelationResult::from_table(&t, 0.5);
        let r2 = CorrelationResult::from_table(&t, 50.0);
        // Bit-identical normalized correlations whatever ε₂, σ_Q₂ are.
        assert_eq!(r1.q1q2, r2.q1q2);
        assert_eq!(r1.p1q2, r2.p1q2);
        // And recomputing the table gives identical bits.
        let t2 = quasi_probability(&rho, &a, &b, &m1).unwrap();
        assert_eq!(t.values(), t2.values());
    }

    #[test]
    fn corr_q1q2_commuting_eigenstate_is_one() {
        let z = presets::observable_z();
        for eps in [0.1, 1.0, 10.0] {
            let t = quasi_probability(&zero_state(), &z, &z, &meter(eps, 1.0)).unwrap();
            assert_abs_diff_eq!(corr_q1q2(&t), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn corr_q1q2_anticommuting_pair_vanishes_in_both_limits() {
        let x = presets::observable_x();
        let z = presets::observable_z();
        // Weak: tr(ρ ½{σ_z, σ_x}) = 0.
        let t = quasi_probability(&zero_state(), &x, &z, &meter(1e-6, 1.0)).unwrap();
        assert!(corr_q1q2(&t).abs() < 1e-12);
        // Strong: Wigner cells are all ¼, and Σ a b ¼ = 0.
        let t = quasi_probability(&zero_state(), &x, &z, &meter(50.0, 1.0)).unwrap();
        assert!(corr_q1q2(&t).abs() < 1e-12);
    }

    #[test]
    fn corr_p1q2_vanishes_for_real_instances() {
        // Real state, real eigenbases: the table is real.
        let t = quasi_probability(
            &zero_state(),
            &presets::observable_x(),
            &presets::observable_z(),
            &meter(0.7, 1.0),
        )
        .unwrap();
        assert!(corr_p1q2(&t).abs() < 1e-14);
    }

    #[test]
    fn corr_p1q2_weak_coupling_value_for_y_plus() {
        // Im tr(ρ σ_z σ_x) = Im(i) = 1 for ρ = |y+⟩⟨y+|, so at σ_Q₁ = 1 the
        // weak-coupling correlation is ½.
        let t = quasi_probability(
            &y_plus(),
            &presets::observable_x(),
            &presets::observable_z(),
            &meter(1e-6, 1.0),
        )
        .unwrap();
        assert_abs_diff_eq!(corr_p1q2(&t), 0.5, epsilon = 1e-9);
        // Brute-force route: Σ a b K over the 2x2 table.
        let k = kirkwood(&y_plus(), &presets::observable_x(), &presets::observable_z()).unwrap();
        let mut s = Complex64::new(0.0, 0.0);
        for (n, &a) in [1.0f64, -1.0].iter().enumerate() {
            for (m, &b) in [1.0f64, -1.0].iter().enumerate() {
                s += k[(n, m)].scale(a * b);
            }
        }
        assert_abs_diff_eq!(s.im / 2.0, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn corr_p1q2_commuting_pair_is_zero() {
        let z = presets::observable_z();
        let base = SpectralDecomposition::decompose_auto(&random_hermitian(2, 40)).unwrap();
        let commuting = base.with_eigenvalues(vec![2.0, -3.0]).unwrap();
        let commuting_b = base.with_eigenvalues(vec![5.0, 1.0]).unwrap();
        for eps in [0.1, 1.0, 10.0] {
            let t = quasi_probability(&random_density(2, 3), &commuting, &commuting_b, &meter(eps, 1.0)).unwrap();
            assert!(corr_p1q2(&t).abs() < 1e-13);
            let t = quasi_probability(&zero_state(), &z, &z, &meter(eps, 1.0)).unwrap();
            assert!(corr_p1q2(&t).abs() < 1e-13);
        }
    }

    #[test]
    fn kirkwood_frozen_cells() {
        let x = presets::observable_x();
        let z = presets::observable_z();
        let k = kirkwood(&zero_state(), &x, &z).unwrap();
        assert_abs_diff_eq!(k[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert!(k[(0, 0)].im.abs() < 1e-14);
        let k = kirkwood(&y_plus(), &x, &z).unwrap();
        assert_abs_diff_eq!(k[(0, 0)].re, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(k[(0, 0)].im, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn kirkwood_commuting_case_is_real_joint_distribution() {
        let base = SpectralDecomposition::decompose_auto(&random_hermitian(3, 8)).unwrap();
        let a = base.with_eigenvalues(vec![1.0, 0.0, -1.0]).unwrap();
        let rho = random_density(3, 21);
        let k = kirkwood(&rho, &a, &a).unwrap();
        for n in 0..3 {
            for m in 0..3 {
                assert!(k[(n, m)].im.abs() < 1e-14);
                let joint = (rho.matrix() * a.projector(m) * a.projector(n)).trace().re;
                assert_abs_diff_eq!(k[(n, m)].re, joint, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn margenau_hill_is_real_part_of_kirkwood() {
        let rho = random_density(3, 5);
        let a = SpectralDecomposition::decompose_auto(&random_hermitian(3, 6)).unwrap();
        let b = SpectralDecomposition::decompose_auto(&random_hermitian(3, 7)).unwrap();
        let k = kirkwood(&rho, &a, &b).unwrap();
        let mh = margenau_hill(&rho, &a, &b).unwrap();
        for n in 0..a.len() {
            for m in 0..b.len() {
                assert_abs_diff_eq!(mh[(n, m)], k[(n, m)].re, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn margenau_hill_weighted_sum_matches_symmetrized_trace() {
        let x = presets::observable_x();
        let z = presets::observable_z();
        let mh = margenau_hill(&zero_state(), &x, &z).unwrap();
        let mut s = 0.0;
        for (n, &a) in [1.0f64, -1.0].iter().enumerate() {
            for (m, &b) in [1.0f64, -1.0].iter().enumerate() {
                s += a * b * mh[(n, m)];
            }
        }
        // tr(ρ ½{σ_z σ_x + σ_x σ_z}) = 0.
        assert!(s.abs() < 1e-14);
    }

    #[test]
    fn margenau_hill_has_a_negative_cell() {
        let angle = 3.0 * std::f64::consts::PI / 8.0;
        let psi = CVector::from_vec(vec![
            Complex64::new(angle.cos(), 0.0),
            Complex64::new(angle.sin(), 0.0),
        ]);
        let rho = DensityMatrix::from_ket(&psi).unwrap();
        let mh = margenau_hill(&rho, &presets::observable_x(), &presets::observable_z()).unwrap();
        let min = mh.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(min < 0.0, "expected a negative Margenau-Hill cell, min = {min}");
    }

    #[test]
    fn wigner_joint_frozen_values() {
        let px = Projector::new(
            (crate::operator::CMatrix::identity(2, 2) + presets::pauli_x()).scale(0.5),
        )
        .unwrap();
        let pz = presets::projector_z0();
        assert_abs_diff_eq!(
            wigner_joint(&zero_state(), &px, &pz).unwrap(),
            0.25,
            epsilon = 1e-14
        );
        // Pa = Pb: idempotence gives tr(ρ P).
        let rho = random_density(2, 13);
        assert_abs_diff_eq!(
            wigner_joint(&rho, &pz, &pz).unwrap(),
            rho.born(pz.matrix()),
            epsilon = 1e-14
        );
        // Orthogonal projectors: 0.
        assert!(wigner_joint(&rho, &pz, &pz.complement()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn marginal_check_passes_for_generated_tables() {
        let rho = random_density(4, 2);
        let a = SpectralDecomposition::decompose_auto(&random_hermitian(4, 31)).unwrap();
        let b = SpectralDecomposition::decompose_auto(&random_hermitian(4, 32)).unwrap();
        let m1 = meter(1.0, 1.0);
        let t = quasi_probability(&rho, &a, &b, &m1).unwrap();
        let report = marginal_check(&t, &rho, &a, &b, &m1).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn marginal_check_flags_perturbed_table() {
        let rho = random_density(2, 2);
        let a = presets::observable_x();
        let b = presets::observable_z();
        let m1 = meter(1.0, 1.0);
        let mut t = quasi_probability(&rho, &a, &b, &m1).unwrap();
        t.values[(0, 1)] += Complex64::new(1e-3, 0.0);
        let report = marginal_check(&t, &rho, &a, &b, &m1).unwrap();
        assert!(!report.pass);
        assert!((report.max_dev_a - 1e-3).abs() < 1e-9 || (report.max_dev_b - 1e-3).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn marginals_hold_for_random_instances(seed in 0u64..60, eps_idx in 0usize..3) {
            let eps = [0.1, 1.0, 10.0][eps_idx];
            let rho = random_density(4, seed);
            let a = SpectralDecomposition::decompose_auto(&random_hermitian(4, seed + 100)).unwrap();
            let b = SpectralDecomposition::decompose_auto(&random_hermitian(4, seed + 200)).unwrap();
            let m1 = meter(eps, 1.0);
            let t = quasi_probability(&rho, &a, &b, &m1).unwrap();
            let report = marginal_check(&t, &rho, &a, &b, &m1).unwrap();
            prop_assert!(report.pass, "{:?}", report);
            prop_assert!((t.total().re - 1.0).abs() < 1e-10);
            prop_assert!(t.total().im.abs() < 1e-10);
        }

        #[test]
        fn commuting_observables_make_the_table_coupling_free(seed in 0u64..40) {
            let base = SpectralDecomposition::decompose_auto(&random_hermitian(3, seed)).unwrap();
            let a = base.with_eigenvalues(vec![1.0, 0.0, -1.0]).unwrap();
            let b = base.with_eigenvalues(vec![4.0, 2.0, 1.0]).unwrap();
            let rho = random_density(3, seed + 500);
            let reference = kirkwood(&rho, &a, &b).unwrap();
            for eps in [0.1, 1.0, 10.0] {
                let t = quasi_probability(&rho, &a, &b, &meter(eps, 1.0)).unwrap();
                for n in 0..3 {
                    for m in 0..3 {
                        prop_assert!((t.value(n, m) - reference[(n, m)]).norm() < 1e-12);
                        prop_assert!(t.value(n, m).im.abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn fourier_and_computational_give_complex_tables() {
        // Sanity check that genuinely complex tables appear for d = 3.
        let rho = random_density(3, 77);
        let descending = [2.0, 1.0, 0.0];
        let a = OrthonormalBasis::fourier(3).observable(&descending).unwrap();
        let b = OrthonormalBasis::computational(3).observable(&descending).unwrap();
        let t = quasi_probability(&rho, &a, &b, &meter(1.0, 1.0)).unwrap();
        let max_im = t.values().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(max_im > 1e-6);
    }
}
