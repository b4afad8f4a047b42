//! State reconstruction from projector-pair correlation measurements.
//!
//! Replacing both observables by rank-1 eigenprojectors makes the
//! quasi-probability element `W₁₁` directly measurable: its real part is the
//! position-position pointer correlation and its imaginary part the
//! momentum-position one. Collecting `W₁₁` for every projector pair of two
//! complementary bases determines the initial density matrix at any coupling
//! strength.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::meter::GaussianMeter;
use crate::operator::{
    check_complementary, check_same_dim, hermiticity_residual, hermitize, CMatrix, DensityMatrix,
    OrthonormalBasis, Projector,
};
use crate::tol;

/// Quasi-probability table for a successive measurement of two projectors,
/// indexed by the binary outcomes `(σ, π)` of the second and first projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorPairTable {
    /// `values[σ][π]`.
    values: [[Complex64; 2]; 2],
    epsilon1: f64,
    sigma_q1: f64,
}

impl ProjectorPairTable {
    pub fn value(&self, sigma: usize, pi: usize) -> Complex64 {
        self.values[sigma][pi]
    }

    /// The measurable element `W₁₁`.
    pub fn w11(&self) -> Complex64 {
        self.values[1][1]
    }

    pub fn epsilon1(&self) -> f64 {
        self.epsilon1
    }

    pub fn sigma_q1(&self) -> f64 {
        self.sigma_q1
    }

    /// Marginal over the second outcome: `Σ_σ W[σ][π]`.
    pub fn marginal_pi(&self, pi: usize) -> Complex64 {
        self.values[0][pi] + self.values[1][pi]
    }
}

/// `W_σπ(ε₁) = Σ_π' g_ππ'(ε₁) tr(ρ P_a^π' P_b^σ P_a^π)` with the binary
/// decoherence factor `g_ππ' = exp[-ε₁²(π-π')²/8σ_Q₁²]`.
///
/// This generally differs from the corresponding element of the two-observable
/// quasi-probability table at intermediate coupling, because the projector
/// spectrum {1, 0} decoheres more slowly than the full eigenvalue spectrum.
pub fn projector_pair_quasiprob(
    rho: &DensityMatrix,
    pa: &Projector,
    pb: &Projector,
    meter1: &GaussianMeter,
) -> Result<ProjectorPairTable> {
    check_same_dim(rho.dim(), pa.dim())?;
    check_same_dim(rho.dim(), pb.dim())?;
    let pa_bin = [pa.complement(), pa.clone()];
    let pb_bin = [pb.complement(), pb.clone()];
    let mut values = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (sigma, pbs) in pb_bin.iter().enumerate() {
        for (pi, pap) in pa_bin.iter().enumerate() {
            let mut w = Complex64::new(0.0, 0.0);
            for (pip, papp) in pa_bin.iter().enumerate() {
                let g = meter1.decoherence(pi as f64 - pip as f64);
                let t = (rho.matrix() * papp.matrix() * pbs.matrix() * pap.matrix()).trace();
                w += t.scale(g);
            }
            values[sigma][pi] = w;
        }
    }
    Ok(ProjectorPairTable {
        values,
        epsilon1: meter1.epsilon(),
        sigma_q1: meter1.sigma_q(),
    })
}

/// Assemble `W₁₁` from the two measured pointer correlations:
/// `W₁₁ = ⟨Q₁Q₂⟩/ε₁ε₂ + i·2σ_Q₁²·⟨P₁Q₂⟩/ε₁ε₂`.
pub fn w11_from_correlations(
    raw_q1q2: f64,
    raw_p1q2: f64,
    epsilon1: f64,
    epsilon2: f64,
    sigma_q1: f64,
) -> Result<Complex64> {
    if !(epsilon1 > 0.0 && epsilon2 > 0.0) {
        return Err(Error::InvalidArgument {
            reason: format!("couplings must be positive, got ε₁ = {epsilon1}, ε₂ = {epsilon2}"),
        });
    }
    let scale = epsilon1 * epsilon2;
    Ok(Complex64::new(
        raw_q1q2 / scale,
        2.0 * sigma_q1 * sigma_q1 * raw_p1q2 / scale,
    ))
}

/// The reconstruction denominator matrix
/// `G_nn' = δ_nn' + (1-δ_nn') exp(-ε₁²/8σ_Q₁²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    entries: DMatrix<f64>,
    epsilon1: f64,
    sigma_q1: f64,
}

impl GMatrix {
    pub fn entry(&self, n: usize, np: usize) -> f64 {
        self.entries[(n, np)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// The common off-diagonal value `exp(-ε₁²/8σ_Q₁²)`.
    pub fn off_diagonal(&self) -> f64 {
        (-self.epsilon1 * self.epsilon1 / (8.0 * self.sigma_q1 * self.sigma_q1)).exp()
    }

    /// Noise amplification of off-diagonal retrieval, `1/G_offdiag`.
    pub fn amplification(&self) -> f64 {
        1.0 / self.off_diagonal()
    }
}

pub fn g_matrix(dim: usize, epsilon1: f64, sigma_q1: f64) -> Result<GMatrix> {
    if dim < 2 {
        return Err(Error::InvalidArgument {
            reason: format!("G matrix needs dim >= 2, got {dim}"),
        });
    }
    if !(sigma_q1 > 0.0) {
        return Err(Error::InvalidArgument {
            reason: format!("σ_Q₁ must be positive, got {sigma_q1}"),
        });
    }
    let off = (-epsilon1 * epsilon1 / (8.0 * sigma_q1 * sigma_q1)).exp();
    Ok(GMatrix {
        entries: DMatrix::from_fn(dim, dim, |n, np| if n == np { 1.0 } else { off }),
        epsilon1,
        sigma_q1,
    })
}

/// One measured projector-pair quasi-probability value `W₁₁` for the pair
/// `(P_{a_ν}, P_{b_μ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W11Record {
    pub nu: usize,
    pub mu: usize,
    pub value: Complex64,
    pub epsilon1: f64,
    pub sigma_q1: f64,
}

fn record_pair(
    rho: &DensityMatrix,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    meter1: &GaussianMeter,
    epsilon2: f64,
    nu: usize,
    mu: usize,
) -> Result<W11Record> {
    let pa = Projector::from_ket(basis_a.vector(nu))?;
    let pb = Projector::from_ket(basis_b.vector(mu))?;
    let w11 = projector_pair_quasiprob(rho, &pa, &pb, meter1)?.w11();
    // What an experiment would record: the two pointer correlations ...
    let scale = meter1.epsilon() * epsilon2;
    let raw_q1q2 = scale * w11.re;
    let raw_p1q2 = scale * w11.im / (2.0 * meter1.sigma_q() * meter1.sigma_q());
    // ... reassembled into the complex quasi-probability element.
    let value = w11_from_correlations(
        raw_q1q2,
        raw_p1q2,
        meter1.epsilon(),
        epsilon2,
        meter1.sigma_q(),
    )?;
    Ok(W11Record {
        nu,
        mu,
        value,
        epsilon1: meter1.epsilon(),
        sigma_q1: meter1.sigma_q(),
    })
}

/// Simulate the full measurement loop for every projector pair `(ν, μ)`:
/// run the two-pointer model, read off both correlations, and reassemble
/// `W₁₁`. Pairs are processed in parallel with the `parallel` feature.
pub fn simulate_records(
    rho: &DensityMatrix,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    meter1: &GaussianMeter,
    epsilon2: f64,
) -> Result<Vec<W11Record>> {
    check_same_dim(rho.dim(), basis_a.dim())?;
    check_same_dim(rho.dim(), basis_b.dim())?;
    let d = rho.dim();
    exec::try_map_indexed(d * d, |k| {
        record_pair(rho, basis_a, basis_b, meter1, epsilon2, k / d, k % d)
    })
}

/// Sequential twin of [`simulate_records`].
pub fn simulate_records_seq(
    rho: &DensityMatrix,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    meter1: &GaussianMeter,
    epsilon2: f64,
) -> Result<Vec<W11Record>> {
    check_same_dim(rho.dim(), basis_a.dim())?;
    check_same_dim(rho.dim(), basis_b.dim())?;
    let d = rho.dim();
    exec::try_map_indexed_seq(d * d, |k| {
        record_pair(rho, basis_a, basis_b, meter1, epsilon2, k / d, k % d)
    })
}

/// Outcome of a density-matrix reconstruction.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    /// The Hermitized reconstruction `(R + R†)/2` in the computational
    /// representation.
    pub matrix: CMatrix,
    /// The validated density matrix, when the reconstruction passes the
    /// state checks; `None` when record noise pushed it outside.
    pub density: Option<DensityMatrix>,
    /// Why validation failed, if it did.
    pub validation_error: Option<String>,
    /// `max |R - R†|` before Hermitization; roundoff-sized for consistent
    /// records, larger when the record set is inconsistent.
    pub asymmetry: f64,
    /// Off-diagonal denominator `G_offdiag = exp(-ε₁²/8σ_Q₁²)`.
    pub g_offdiag: f64,
    /// Noise amplification `1/G_offdiag` applied to off-diagonal elements.
    pub amplification: f64,
    /// Set when the amplification exceeds the ill-conditioning threshold;
    /// diagonal retrieval remains valid in this regime.
    pub ill_conditioned: bool,
    pub epsilon1: f64,
    pub sigma_q1: f64,
}

fn validate_record_set(records: &[W11Record], d: usize) -> Result<DMatrix<Complex64>> {
    if records.len() != d * d {
        return Err(Error::IncompleteRecords {
            reason: format!("got {} records for dimension {d}, need {}", records.len(), d * d),
        });
    }
    let mut seen = vec![false; d * d];
    let mut table = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    let (eps1, sq1) = (records[0].epsilon1, records[0].sigma_q1);
    for r in records {
        if r.nu >= d || r.mu >= d {
            return Err(Error::IncompleteRecords {
                reason: format!("record index ({}, {}) out of range for dimension {d}", r.nu, r.mu),
            });
        }
        if r.epsilon1 != eps1 || r.sigma_q1 != sq1 {
            return Err(Error::IncompleteRecords {
                reason: "records carry inconsistent meter metadata".into(),
            });
        }
        let k = r.nu * d + r.mu;
        if seen[k] {
            return Err(Error::IncompleteRecords {
                reason: format!("duplicate record for pair ({}, {})", r.nu, r.mu),
            });
        }
        seen[k] = true;
        table[(r.nu, r.mu)] = r.value;
    }
    Ok(table)
}

struct ReconstructionSetup {
    overlaps: DMatrix<Complex64>,
    g: GMatrix,
}

/// Shared validation: complementarity, overlap floor, metadata.
fn setup_reconstruction(
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    epsilon1: f64,
    sigma_q1: f64,
) -> Result<ReconstructionSetup> {
    check_same_dim(basis_a.dim(), basis_b.dim())?;
    let d = basis_a.dim();
    if d < 2 {
        return Err(Error::InvalidArgument {
            reason: "reconstruction needs dimension >= 2".into(),
        });
    }
    let descending: Vec<f64> = (0..d).map(|k| (d - 1 - k) as f64).collect();
    let obs_a = basis_a.observable(&descending)?;
    let obs_b = basis_b.observable(&descending)?;
    let comp = check_complementary(&obs_a, &obs_b)?;
    if !comp.complementary {
        return Err(Error::NotComplementary {
            diagnostic: comp.to_string(),
        });
    }
    // overlaps[(mu, n)] = ⟨b_μ|a_n⟩
    let overlaps = DMatrix::from_fn(d, d, |mu, n| basis_b.vector(mu).dotc(basis_a.vector(n)));
    for mu in 0..d {
        for n in 0..d {
            let overlap = overlaps[(mu, n)].norm();
            if overlap <= tol::OVERLAP_MIN {
                return Err(Error::ZeroOverlap {
                    nu: n,
                    mu,
                    overlap,
                    minimum: tol::OVERLAP_MIN,
                });
            }
        }
    }
    Ok(ReconstructionSetup {
        overlaps,
        g: g_matrix(d, epsilon1, sigma_q1)?,
    })
}

/// Retrieve the density matrix from a complete record set:
/// `⟨a_n|ρ|a_n'⟩ = (1/G_n'n) Σ_μ W₁₁(n, μ) ⟨b_μ|a_n'⟩/⟨b_μ|a_n⟩`,
/// Hermitized and validated.
///
/// Ill-conditioning (strong coupling) is reported, not rejected: diagonal
/// elements stay accurate while off-diagonal noise is amplified by
/// `1/G_offdiag`.
pub fn reconstruct_density(
    records: &[W11Record],
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    epsilon1: f64,
    sigma_q1: f64,
) -> Result<ReconstructionReport> {
    let setup = setup_reconstruction(basis_a, basis_b, epsilon1, sigma_q1)?;
    let d = basis_a.dim();
    let w = validate_record_set(records, d)?;

    // Matrix elements in the A eigenbasis.
    let mut in_a = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for n in 0..d {
        for np in 0..d {
            let mut sum = Complex64::new(0.0, 0.0);
            for mu in 0..d {
                sum += w[(n, mu)] * setup.overlaps[(mu, np)] / setup.overlaps[(mu, n)];
            }
            in_a[(n, np)] = sum.unscale(setup.g.entry(np, n));
        }
    }

    // Back to the computational representation: ρ = Σ |a_n⟩ R_nn' ⟨a_n'|.
    let mut raw = CMatrix::zeros(d, d);
    for n in 0..d {
        for np in 0..d {
            raw += (basis_a.vector(n) * basis_a.vector(np).adjoint()) * in_a[(n, np)];
        }
    }

    let asymmetry = hermiticity_residual(&raw);
    let matrix = hermitize(&raw);
    let (density, validation_error) = match DensityMatrix::new(matrix.clone()) {
        Ok(rho) => (Some(rho), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let amplification = setup.g.amplification();
    Ok(ReconstructionReport {
        matrix,
        density,
        validation_error,
        asymmetry,
        g_offdiag: setup.g.off_diagonal(),
        amplification,
        ill_conditioned: amplification > tol::ILL_CONDITIONED_AMPLIFICATION,
        epsilon1,
        sigma_q1,
    })
}

/// Expectation value `tr(ρ Ô)` evaluated directly from the records through
/// the operator transform
/// `O(b_μ, a_n) = Σ_n' [⟨b_μ|a_n'⟩/⟨b_μ|a_n⟩] ⟨a_n'|Ô|a_n⟩ / G_n'n`.
pub fn operator_transform_expectation(
    o: &CMatrix,
    records: &[W11Record],
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    epsilon1: f64,
    sigma_q1: f64,
) -> Result<f64> {
    check_same_dim(o.nrows(), basis_a.dim())?;
    let dev = hermiticity_residual(o);
    if dev > tol::HERMITIAN {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let setup = setup_reconstruction(basis_a, basis_b, epsilon1, sigma_q1)?;
    let d = basis_a.dim();
    let w = validate_record_set(records, d)?;

    // ⟨a_n'|Ô|a_n⟩
    let o_elems = DMatrix::from_fn(d, d, |np, n| {
        (basis_a.vector(np).adjoint() * o * basis_a.vector(n))[(0, 0)]
    });

    let mut expectation = Complex64::new(0.0, 0.0);
    for n in 0..d {
        for mu in 0..d {
            let mut transform = Complex64::new(0.0, 0.0);
            for np in 0..d {
                transform += setup.overlaps[(mu, np)] / setup.overlaps[(mu, n)] * o_elems[(np, n)]
                    / Complex64::new(setup.g.entry(np, n), 0.0);
            }
            expectation += w[(n, mu)] * transform;
        }
    }
    Ok(expectation.re)
}
