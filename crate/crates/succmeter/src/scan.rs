//! Coupling-strength scans: the quasi-probability table, both correlations,
//! and the distances to the two closed-form limits, per ε₁ value.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::meter::GaussianMeter;
use crate::operator::{DensityMatrix, SpectralDecomposition};
use crate::successive::{self, QuasiProbTable};

/// Results for one scan point.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub epsilon1: f64,
    pub table: QuasiProbTable,
    /// `⟨Q₁Q₂⟩/ε₁ε₂`.
    pub q1q2: f64,
    /// `⟨P₁Q₂⟩/ε₁ε₂`.
    pub p1q2: f64,
    /// `max_nm |W(ε₁) - Wigner|`.
    pub dist_wigner: f64,
    /// `max_nm |W(ε₁) - K|`.
    pub dist_kirkwood: f64,
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::InvalidArgument {
            reason: "scan needs at least one ε₁ value".into(),
        });
    }
    if epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidArgument {
            reason: "scan ε₁ values must be finite and positive".into(),
        });
    }
    if epsilons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument {
            reason: "scan ε₁ values must be strictly increasing".into(),
        });
    }
    Ok(())
}

fn scan_point(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    sigma_q1: f64,
    epsilon1: f64,
    wigner: &DMatrix<f64>,
    kirkwood: &DMatrix<Complex64>,
) -> Result<ScanPoint> {
    let meter1 = GaussianMeter::new(epsilon1, sigma_q1)?;
    let table = successive::quasi_probability(rho, a, b, &meter1)?;
    let mut dist_wigner = 0.0f64;
    let mut dist_kirkwood = 0.0f64;
    for n in 0..table.num_a() {
        for m in 0..table.num_b() {
            let w = table.value(n, m);
            dist_wigner = dist_wigner.max((w - Complex64::new(wigner[(n, m)], 0.0)).norm());
            dist_kirkwood = dist_kirkwood.max((w - kirkwood[(n, m)]).norm());
        }
    }
    Ok(ScanPoint {
        epsilon1,
        q1q2: successive::corr_q1q2(&table),
        p1q2: successive::corr_p1q2(&table),
        dist_wigner,
        dist_kirkwood,
        table,
    })
}

/// Evaluate the quasi-probability and its limit distances on an increasing
/// grid of couplings. Scan points run in parallel with the `parallel`
/// feature.
pub fn scan_epsilon(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    sigma_q1: f64,
    epsilons: &[f64],
) -> Result<Vec<ScanPoint>> {
    check_epsilons(epsilons)?;
    let wigner = successive::wigner_table(rho, a, b)?;
    let kirkwood = successive::kirkwood(rho, a, b)?;
    exec::try_map_indexed(epsilons.len(), |k| {
        scan_point(rho, a, b, sigma_q1, epsilons[k], &wigner, &kirkwood)
    })
}

/// Sequential twin of [`scan_epsilon`].
pub fn scan_epsilon_seq(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    sigma_q1: f64,
    epsilons: &[f64],
) -> Result<Vec<ScanPoint>> {
    check_epsilons(epsilons)?;
    let wigner = successive::wigner_table(rho, a, b)?;
    let kirkwood = successive::kirkwood(rho, a, b)?;
    exec::try_map_indexed_seq(epsilons.len(), |k| {
        scan_point(rho, a, b, sigma_q1, epsilons[k], &wigner, &kirkwood)
    })
}

/// Logarithmic ε₁ grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}
