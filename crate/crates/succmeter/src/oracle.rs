//! Independent verification of the measurement model.
//!
//! Meters are represented as wavefunctions sampled on position grids; the
//! delta-kick evolution displaces each branch wavefunction exactly (the
//! shifted Gaussian is evaluated in closed form at the grid points), and all
//! statistics come out of quadrature: overlaps and position moments by the
//! trapezoidal rule on the periodic grid, momentum matrix elements through a
//! spectral (Fourier-space) derivative. The analytic decoherence factor is
//! never used, so agreement with the closed-form modules is a genuine
//! cross-check.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::meter::GaussianMeter;
use crate::operator::{check_same_dim, hermitize, CMatrix, CVector, DensityMatrix, SpectralDecomposition};
use crate::single;
use crate::successive;

/// Uniform position grid `Q_j = -L + j·h`, `j = 0..n`, `h = 2L/n`, with `n` a
/// power of two (the right endpoint is the periodic image of the left).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterGrid {
    n_points: usize,
    extent: f64,
}

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 1024;

/// Extent safety factor: the grid must span at least 8 pointer widths beyond
/// the farthest displaced center so the truncated Gaussian mass stays below
/// [`crate::tol::GRID_MASS`].
const EXTENT_FACTOR: f64 = 8.0;

impl MeterGrid {
    pub fn new(n_points: usize, extent: f64) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < 8 {
            return Err(Error::InvalidArgument {
                reason: format!("grid points must be a power of two >= 8, got {n_points}"),
            });
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidArgument {
                reason: format!("grid extent must be finite and positive, got {extent}"),
            });
        }
        Ok(Self { n_points, extent })
    }

    /// Smallest admissible grid for a meter whose branch centers reach
    /// `ε·max|a_n|`, at the default resolution.
    pub fn for_meter(meter: &GaussianMeter, max_abs_eigenvalue: f64) -> Self {
        Self {
            n_points: DEFAULT_GRID_POINTS,
            extent: EXTENT_FACTOR * (meter.sigma_q() + meter.epsilon() * max_abs_eigenvalue),
        }
    }

    /// Same extent, different resolution (for refinement checks).
    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        Self::new(n_points, self.extent)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n_points as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.extent + j as f64 * self.spacing()
    }

    fn validate_for(&self, meter: &GaussianMeter, max_abs_eigenvalue: f64) -> Result<()> {
        let needed = EXTENT_FACTOR * (meter.sigma_q() + meter.epsilon() * max_abs_eigenvalue);
        if self.extent + 1e-12 < needed {
            return Err(Error::GridTooSmall {
                reason: format!(
                    "extent {} < {needed} required for σ_Q = {}, ε·max|a| = {}",
                    self.extent,
                    meter.sigma_q(),
                    meter.epsilon() * max_abs_eigenvalue
                ),
            });
        }
        Ok(())
    }
}

/// Quadrature matrix elements of one meter between its displaced branch
/// wavefunctions: `overlap = ⟨χ_c'|χ_c⟩`, `q = ⟨χ_c'|Q̂|χ_c⟩`,
/// `p = ⟨χ_c'|P̂|χ_c⟩`, indexed `[bra][ket]` by eigenvalue index.
#[derive(Debug, Clone)]
struct MeterElements {
    overlap: Vec<Vec<Complex64>>,
    q: Vec<Vec<Complex64>>,
    p: Vec<Vec<Complex64>>,
    centers: Vec<f64>,
    sigma_q: f64,
}

impl MeterElements {
    fn compute(meter: &GaussianMeter, grid: &MeterGrid, eigenvalues: &[f64]) -> Self {
        let n = grid.n_points();
        let h = grid.spacing();
        let centers: Vec<f64> = eigenvalues.iter().map(|a| meter.epsilon() * a).collect();

        // Sampled branch wavefunctions and their spectral derivatives.
        let sampled: Vec<Vec<f64>> = centers
            .iter()
            .map(|&c| (0..n).map(|j| meter.wavefunction(grid.point(j) - c)).collect())
            .collect();
        let derivatives: Vec<Vec<Complex64>> =
            sampled.iter().map(|psi| spectral_derivative(psi, grid)).collect();

        let k = centers.len();
        let mut overlap = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        let mut q = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        let mut p = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        for bra in 0..k {
            for ket in 0..k {
                let mut s_o = 0.0;
                let mut s_q = 0.0;
                let mut s_p = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let prod = sampled[bra][j] * sampled[ket][j];
                    s_o += prod;
                    s_q += grid.point(j) * prod;
                    s_p += derivatives[ket][j].scale(sampled[bra][j]);
                }
                overlap[bra][ket] = Complex64::new(h * s_o, 0.0);
                q[bra][ket] = Complex64::new(h * s_q, 0.0);
                // P̂ = -i d/dQ
                p[bra][ket] = Complex64::new(0.0, -h) * s_p;
            }
        }
        Self {
            overlap,
            q,
            p,
            centers,
            sigma_q: meter.sigma_q(),
        }
    }

    /// Analytic branch wavefunction value at arbitrary `q` (not grid-bound).
    fn wavefunction_at(&self, center_idx: usize, q: f64) -> f64 {
        let s2 = self.sigma_q * self.sigma_q;
        let d = q - self.centers[center_idx];
        (2.0 * std::f64::consts::PI * s2).powf(-0.25) * (-d * d / (4.0 * s2)).exp()
    }
}

/// `dψ/dQ` by Fourier-space multiplication with `ik` (Nyquist mode zeroed).
fn spectral_derivative(psi: &[f64], grid: &MeterGrid) -> Vec<Complex64> {
    let n = grid.n_points();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex64> = psi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.process(&mut buf);
    let dk = std::f64::consts::PI / grid.extent();
    for (j, z) in buf.iter_mut().enumerate() {
        let wave = if j < n / 2 {
            j as f64 * dk
        } else if j == n / 2 {
            0.0
        } else {
            (j as f64 - n as f64) * dk
        };
        *z *= Complex64::new(0.0, wave);
    }
    ifft.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|z| *z = z.scale(scale));
    buf
}

/// One term of the evolved system ⊗ meters state: a rank-1 system block
/// `|u⟩⟨v|` together with, per meter, the eigenvalue indices that fix the
/// displaced ket and bra wavefunctions.
#[derive(Debug, Clone)]
pub struct Branch {
    amp_ket: CVector,
    amp_bra: CVector,
    /// `(ket index, bra index)` into each meter's eigenvalue list.
    pub indices: Vec<(usize, usize)>,
}

/// The full post-interaction state as a sum of branches, with the meter
/// quadrature machinery attached.
#[derive(Debug, Clone)]
pub struct BranchState {
    branches: Vec<Branch>,
    meters: Vec<GaussianMeter>,
    grids: Vec<MeterGrid>,
    elements: Vec<MeterElements>,
}

/// Spectral split of a (possibly mixed) state into weighted pure components.
fn pure_components(rho: &DensityMatrix) -> Vec<(f64, CVector)> {
    let eig = SymmetricEigen::new(hermitize(rho.matrix()));
    let mut out = Vec::new();
    for k in 0..rho.dim() {
        let p = eig.eigenvalues[k];
        if p > 1e-14 {
            out.push((p, eig.eigenvectors.column(k).into_owned()));
        }
    }
    out
}

const BRANCH_PRUNE: f64 = 1e-15;

/// Evolve `ρ ⊗ |χ⟩⟨χ|` through a single delta-kick measurement of `A`:
/// each branch pairs the system block `P_n ρ P_n'` with meter wavefunctions
/// displaced by `ε a_n` and `ε a_n'`. Zero-amplitude branches are dropped.
pub fn evolve_single(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    meter: &GaussianMeter,
    grid: &MeterGrid,
) -> Result<BranchState> {
    check_same_dim(rho.dim(), a.dim())?;
    let max_a = a.eigenvalues().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    grid.validate_for(meter, max_a)?;

    let mut branches = Vec::new();
    for (p, psi) in pure_components(rho) {
        let w = p.sqrt();
        let kicked: Vec<CVector> = a.projectors().iter().map(|proj| (proj * &psi).scale(w)).collect();
        for (n, u) in kicked.iter().enumerate() {
            for (np, v) in kicked.iter().enumerate() {
                if u.norm() * v.norm() <= BRANCH_PRUNE {
                    continue;
                }
                branches.push(Branch {
                    amp_ket: u.clone(),
                    amp_bra: v.clone(),
                    indices: vec![(n, np)],
                });
            }
        }
    }
    let elements = MeterElements::compute(meter, grid, a.eigenvalues());
    Ok(BranchState {
        branches,
        meters: vec![*meter],
        grids: vec![*grid],
        elements: vec![elements],
    })
}

/// Evolve through both delta kicks: branches run over `(n, n', m, m')` with
/// system blocks `P_b_m P_a_n ρ P_a_n' P_b_m'` and the four displaced meter
/// wavefunctions.
pub fn evolve_double(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    meter1: &GaussianMeter,
    grid1: &MeterGrid,
    meter2: &GaussianMeter,
    grid2: &MeterGrid,
) -> Result<BranchState> {
    check_same_dim(rho.dim(), a.dim())?;
    check_same_dim(rho.dim(), b.dim())?;
    let max_a = a.eigenvalues().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let max_b = b.eigenvalues().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    grid1.validate_for(meter1, max_a)?;
    grid2.validate_for(meter2, max_b)?;

    let mut branches = Vec::new();
    for (p, psi) in pure_components(rho) {
        let w = p.sqrt();
        // Amplitudes after both kicks, indexed (n, m).
        let kicked: Vec<Vec<CVector>> = a
            .projectors()
            .iter()
            .map(|pa| {
                let after_a = (pa * &psi).scale(w);
                b.projectors().iter().map(|pb| pb * &after_a).collect()
            })
            .collect();
        for (n, row_ket) in kicked.iter().enumerate() {
            for (m, u) in row_ket.iter().enumerate() {
                if u.norm() <= BRANCH_PRUNE {
                    continue;
                }
                for (np, row_bra) in kicked.iter().enumerate() {
                    for (mp, v) in row_bra.iter().enumerate() {
                        if v.norm() <= BRANCH_PRUNE {
                            continue;
                        }
                        branches.push(Branch {
                            amp_ket: u.clone(),
                            amp_bra: v.clone(),
                            indices: vec![(n, np), (m, mp)],
                        });
                    }
                }
            }
        }
    }
    let e1 = MeterElements::compute(meter1, grid1, a.eigenvalues());
    let e2 = MeterElements::compute(meter2, grid2, b.eigenvalues());
    Ok(BranchState {
        branches,
        meters: vec![*meter1, *meter2],
        grids: vec![*grid1, *grid2],
        elements: vec![e1, e2],
    })
}

impl BranchState {
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn meters(&self) -> &[GaussianMeter] {
        &self.meters
    }

    pub fn grids(&self) -> &[MeterGrid] {
        &self.grids
    }

    /// System trace of one branch block, `tr |u⟩⟨v| = ⟨v|u⟩`.
    fn block_trace(&self, branch: &Branch) -> Complex64 {
        branch.amp_bra.dotc(&branch.amp_ket)
    }

    /// Product of meter factors for a branch, with `factor(i)` swapped in
    /// for meter `replace`.
    fn meter_product(&self, branch: &Branch, replace: Option<(usize, Complex64)>) -> Complex64 {
        let mut prod = Complex64::new(1.0, 0.0);
        for (i, &(ket, bra)) in branch.indices.iter().enumerate() {
            prod *= match replace {
                Some((ri, f)) if ri == i => f,
                _ => self.elements[i].overlap[bra][ket],
            };
        }
        prod
    }

    /// Total trace over system and all meters; 1 up to quadrature error.
    pub fn total_trace(&self) -> Complex64 {
        self.branches
            .iter()
            .map(|br| self.block_trace(br) * self.meter_product(br, None))
            .sum()
    }

    /// Reduced system state: partial trace over every meter by quadrature.
    pub fn reduced_system(&self) -> CMatrix {
        let d = self.branches.first().map_or(0, |b| b.amp_ket.len());
        let mut out = CMatrix::zeros(d, d);
        for br in &self.branches {
            let factor = self.meter_product(br, None);
            out += (&br.amp_ket * br.amp_bra.adjoint()) * factor;
        }
        out
    }

    /// Marginal position density of meter `i` at `q`, from the branch sum
    /// with the two displaced wavefunctions evaluated analytically.
    pub fn pointer_density_at(&self, i: usize, q: f64) -> f64 {
        self.branches
            .iter()
            .map(|br| {
                let (ket, bra) = br.indices[i];
                let chi = Complex64::new(
                    self.elements[i].wavefunction_at(ket, q)
                        * self.elements[i].wavefunction_at(bra, q),
                    0.0,
                );
                (self.block_trace(br) * self.meter_product(br, Some((i, chi)))).re
            })
            .sum()
    }

    /// `⟨Q_i⟩` by quadrature.
    pub fn mean_q(&self, i: usize) -> f64 {
        self.branches
            .iter()
            .map(|br| {
                let (ket, bra) = br.indices[i];
                let q = self.elements[i].q[bra][ket];
                (self.block_trace(br) * self.meter_product(br, Some((i, q)))).re
            })
            .sum()
    }
}

/// Raw two-pointer correlations extracted from a two-meter branch state by
/// quadrature only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleStatistics {
    /// `⟨Q̂₁Q̂₂⟩`.
    pub q1q2: f64,
    /// `⟨P̂₁Q̂₂⟩` (momentum of the first pointer by spectral derivative).
    pub p1q2: f64,
    /// Total trace of the branch state; 1 up to quadrature error.
    pub total_trace: f64,
}

fn check_two_meters(state: &BranchState) -> Result<()> {
    if state.meters.len() != 2 {
        return Err(Error::InvalidArgument {
            reason: format!(
                "pointer correlations need a two-meter state, got {} meter(s)",
                state.meters.len()
            ),
        });
    }
    Ok(())
}

/// Per-branch contributions to `(⟨Q₁Q₂⟩, ⟨P₁Q₂⟩, tr)`.
fn branch_contribution(state: &BranchState, k: usize) -> (Complex64, Complex64, Complex64) {
    let br = &state.branches[k];
    let t = state.block_trace(br);
    let (k1, b1) = br.indices[0];
    let (k2, b2) = br.indices[1];
    let q1 = state.elements[0].q[b1][k1];
    let p1 = state.elements[0].p[b1][k1];
    let q2 = state.elements[1].q[b2][k2];
    let o1 = state.elements[0].overlap[b1][k1];
    let o2 = state.elements[1].overlap[b2][k2];
    (t * q1 * q2, t * p1 * q2, t * o1 * o2)
}

fn reduce_contributions(contributions: Vec<(Complex64, Complex64, Complex64)>) -> OracleStatistics {
    let mut q1q2 = Complex64::new(0.0, 0.0);
    let mut p1q2 = Complex64::new(0.0, 0.0);
    let mut trace = Complex64::new(0.0, 0.0);
    for (cq, cp, ct) in contributions {
        q1q2 += cq;
        p1q2 += cp;
        trace += ct;
    }
    OracleStatistics {
        q1q2: q1q2.re,
        p1q2: p1q2.re,
        total_trace: trace.re,
    }
}

/// Extract `⟨Q₁Q₂⟩` and `⟨P₁Q₂⟩` from a two-meter branch state. Branch
/// contributions are evaluated in parallel with the `parallel` feature and
/// summed in fixed branch order.
pub fn oracle_statistics(state: &BranchState) -> Result<OracleStatistics> {
    check_two_meters(state)?;
    let contributions = exec::map_indexed(state.branches.len(), |k| branch_contribution(state, k));
    Ok(reduce_contributions(contributions))
}

/// Sequential twin of [`oracle_statistics`].
pub fn oracle_statistics_seq(state: &BranchState) -> Result<OracleStatistics> {
    check_two_meters(state)?;
    let contributions =
        exec::map_indexed_seq(state.branches.len(), |k| branch_contribution(state, k));
    Ok(reduce_contributions(contributions))
}

/// Side-by-side comparison of the closed-form statistics and the grid oracle
/// on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    /// `⟨Q₁Q₂⟩/ε₁ε₂` from the quasi-probability table.
    pub q1q2_analytic: f64,
    /// Same quantity from quadrature.
    pub q1q2_oracle: f64,
    pub q1q2_diff: f64,
    /// `⟨P₁Q₂⟩/ε₁ε₂` from the table.
    pub p1q2_analytic: f64,
    pub p1q2_oracle: f64,
    pub p1q2_diff: f64,
    /// Max difference of the meter-1 position density at the sample points.
    pub density1_max_diff: f64,
    /// Max difference of the meter-2 position density at the sample points.
    pub density2_max_diff: f64,
    /// Max entry difference of the meter-traced system state.
    pub reduced_max_diff: f64,
    pub n_points: usize,
    pub branch_count: usize,
}

impl OracleComparison {
    /// Largest of all recorded deviations.
    pub fn max_diff(&self) -> f64 {
        self.q1q2_diff
            .max(self.p1q2_diff)
            .max(self.density1_max_diff)
            .max(self.density2_max_diff)
            .max(self.reduced_max_diff)
    }
}

/// Number of density sample points used in comparisons.
pub const DENSITY_SAMPLES: usize = 32;

/// Run one instance through both routes and report every deviation.
///
/// Pass `n_points = None` for the default grid resolution.
pub fn compare_with_analytic(
    rho: &DensityMatrix,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    meter1: &GaussianMeter,
    meter2: &GaussianMeter,
    n_points: Option<usize>,
) -> Result<OracleComparison> {
    let max_a = a.eigenvalues().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let max_b = b.eigenvalues().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut grid1 = MeterGrid::for_meter(meter1, max_a);
    let mut grid2 = MeterGrid::for_meter(meter2, max_b);
    if let Some(n) = n_points {
        grid1 = grid1.with_points(n)?;
        grid2 = grid2.with_points(n)?;
    }

    let state = evolve_double(rho, a, b, meter1, &grid1, meter2, &grid2)?;
    let stats = oracle_statistics(&state)?;
    let scale = meter1.epsilon() * meter2.epsilon();
    if scale <= 0.0 {
        return Err(Error::InvalidArgument {
            reason: "oracle comparison needs positive couplings".into(),
        });
    }

    let table = successive::quasi_probability(rho, a, b, meter1)?;
    let q_analytic = successive::corr_q1q2(&table);
    let p_analytic = successive::corr_p1q2(&table);
    let q_oracle = stats.q1q2 / scale;
    let p_oracle = stats.p1q2 / scale;

    // Meter-1 marginal vs the single-measurement density; meter-2 marginal
    // vs the density of B on the post-measurement state.
    let after_a = single::reduced_state_after(rho, a, meter1)?;
    let dens1 = single::pointer_density(rho, a, meter1)?;
    let dens2 = single::pointer_density(&after_a, b, meter2)?;
    let mut density1_max_diff = 0.0f64;
    let mut density2_max_diff = 0.0f64;
    for k in 0..DENSITY_SAMPLES {
        let f = k as f64 / (DENSITY_SAMPLES - 1) as f64;
        let q1 = -grid1.extent() + 2.0 * grid1.extent() * f;
        let q2 = -grid2.extent() + 2.0 * grid2.extent() * f;
        density1_max_diff =
            density1_max_diff.max((state.pointer_density_at(0, q1) - dens1.eval(q1)).abs());
        density2_max_diff =
            density2_max_diff.max((state.pointer_density_at(1, q2) - dens2.eval(q2)).abs());
    }

    let reduced_analytic = single::reduced_state_after(&after_a, b, meter2)?;
    let reduced_max_diff =
        crate::operator::max_abs_diff(&state.reduced_system(), reduced_analytic.matrix());

    Ok(OracleComparison {
        q1q2_analytic: q_analytic,
        q1q2_oracle: q_oracle,
        q1q2_diff: (q_analytic - q_oracle).abs(),
        p1q2_analytic: p_analytic,
        p1q2_oracle: p_oracle,
        p1q2_diff: (p_analytic - p_oracle).abs(),
        density1_max_diff,
        density2_max_diff,
        reduced_max_diff,
        n_points: grid1.n_points(),
        branch_count: state.branches().len(),
    })
}
