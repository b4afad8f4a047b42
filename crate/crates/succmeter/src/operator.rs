//! Complex matrix foundation: Hermitian observables, spectral decompositions
//! with degeneracy grouping, density matrices, orthonormal bases, projectors,
//! and complementarity checks.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest entry modulus, `max_ij |M_ij|`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|A - B|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

/// Deviation from Hermiticity, `max |M - M†|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn check_same_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, unsorted, with roundoff asymmetry
/// removed first.
fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    SymmetricEigen::new(hermitize(m)).eigenvalues.iter().copied().collect()
}

/// Distinct eigenvalues (descending) of a Hermitian observable together with
/// their orthogonal eigenprojectors.
///
/// Near-degenerate eigenvalues are merged into a single eigenvalue (the group
/// mean) with the summed projector, so degenerate observables are represented
/// exactly by their distinct outcomes.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<CMatrix>,
    dim: usize,
}

impl SpectralDecomposition {
    /// Decompose a Hermitian matrix, merging eigenvalues closer than
    /// `group_tol` (absolute).
    pub fn decompose(h: &CMatrix, group_tol: f64) -> Result<Self> {
        if !(group_tol > 0.0) {
            return Err(Error::InvalidArgument {
                reason: format!("group_tol must be positive, got {group_tol}"),
            });
        }
        let dim = check_square(h)?;
        let dev = hermiticity_residual(h);
        if dev > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let herm = hermitize(h);
        let eig = SymmetricEigen::new(herm.clone());

        // Deterministic descending order, index as tie-break.
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j]
                .partial_cmp(&eig.eigenvalues[i])
                .unwrap()
                .then(i.cmp(&j))
        });

        // Chain-group successive eigenvalues within group_tol.
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match groups.last_mut() {
                Some(g)
                    if (eig.eigenvalues[*g.last().unwrap()] - eig.eigenvalues[i]).abs()
                        <= group_tol =>
                {
                    g.push(i)
                }
                _ => groups.push(vec![i]),
            }
        }

        let mut eigenvalues = Vec::with_capacity(groups.len());
        let mut projectors = Vec::with_capacity(groups.len());
        for g in &groups {
            let mean = g.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / g.len() as f64;
            let mut p = CMatrix::zeros(dim, dim);
            for &i in g {
                let v = eig.eigenvectors.column(i).into_owned();
                p += &v * v.adjoint();
            }
            eigenvalues.push(mean);
            projectors.push(p);
        }

        let out = Self::new(eigenvalues, projectors)?;
        let residual = max_abs_diff(&out.observable(), &herm);
        let allowed = tol::SPECTRAL_RECONSTRUCT.max(group_tol);
        if residual > allowed {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "spectral reconstruction residual {residual:.3e} exceeds {allowed:.1e}"
                ),
            });
        }
        Ok(out)
    }

    /// Decompose with the default grouping tolerance: `1e-9` of the spectral
    /// range, floored at `1e-12` so pure-roundoff splittings always merge.
    pub fn decompose_auto(h: &CMatrix) -> Result<Self> {
        let dev = hermiticity_residual(h);
        if dev > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let vals = hermitian_eigenvalues(h);
        let range = vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        Self::decompose(h, (tol::GROUP_TOL_REL * range).max(tol::GROUP_TOL_FLOOR))
    }

    /// Build from explicit eigenvalues and projectors, validating every
    /// invariant (descending distinct eigenvalues, Hermitian idempotent
    /// mutually orthogonal projectors summing to the identity).
    pub fn new(eigenvalues: Vec<f64>, projectors: Vec<CMatrix>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != projectors.len() {
            return Err(Error::InvalidArgument {
                reason: "need one projector per eigenvalue".into(),
            });
        }
        if eigenvalues.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument {
                reason: "eigenvalues must be finite".into(),
            });
        }
        if eigenvalues.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidArgument {
                reason: "eigenvalues must be distinct and descending".into(),
            });
        }
        let dim = check_square(&projectors[0])?;
        let mut completeness = CMatrix::zeros(dim, dim);
        for (k, p) in projectors.iter().enumerate() {
            check_same_dim(check_square(p)?, dim)?;
            let herm = hermiticity_residual(p);
            let idem = max_abs_diff(&(p * p), p);
            if herm > tol::PROJECTOR || idem > tol::PROJECTOR {
                return Err(Error::NotProjector {
                    deviation: herm.max(idem),
                });
            }
            for q in projectors.iter().skip(k + 1) {
                if max_abs(&(p * q)) > tol::PROJECTOR {
                    return Err(Error::InvalidArgument {
                        reason: "projectors are not mutually orthogonal".into(),
                    });
                }
            }
            completeness += p;
        }
        if max_abs_diff(&completeness, &CMatrix::identity(dim, dim)) > tol::PROJECTOR {
            return Err(Error::InvalidArgument {
                reason: "projectors do not sum to the identity".into(),
            });
        }
        Ok(Self {
            eigenvalues,
            projectors,
            dim,
        })
    }

    /// Rank-1 decomposition of the observable `Σ_n a_n |e_n⟩⟨e_n|` built on a
    /// basis. Eigenvalues must be distinct and descending.
    pub fn from_basis(basis: &OrthonormalBasis, eigenvalues: &[f64]) -> Result<Self> {
        check_same_dim(eigenvalues.len(), basis.dim())?;
        let projectors = basis
            .vectors()
            .iter()
            .map(|v| v * v.adjoint())
            .collect::<Vec<_>>();
        Self::new(eigenvalues.to_vec(), projectors)
    }

    /// Same projectors, new eigenvalues (distinct, descending).
    pub fn with_eigenvalues(&self, eigenvalues: Vec<f64>) -> Result<Self> {
        Self::new(eigenvalues, self.projectors.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct eigenvalues.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// True when there are `dim` distinct eigenvalues.
    pub fn is_nondegenerate(&self) -> bool {
        self.len() == self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn projector(&self, n: usize) -> &CMatrix {
        &self.projectors[n]
    }

    /// Reassemble the observable `Σ_n a_n P_n`.
    pub fn observable(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (a, p) in self.eigenvalues.iter().zip(&self.projectors) {
            m += p.scale(*a);
        }
        m
    }

    /// Largest |a_n - a_n'| over distinct pairs; 0 for a single eigenvalue.
    pub fn max_gap(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(hi), Some(lo)) => hi - lo,
            _ => 0.0,
        }
    }
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite
/// (all within the tolerances in [`crate::tol`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validate a candidate matrix; the violated property is named on error.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::InvalidState {
                property: format!("not a square matrix ({}x{})", mat.nrows(), mat.ncols()),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState {
                property: "non-finite entries".into(),
            });
        }
        let dev = hermiticity_residual(&mat);
        if dev > tol::HERMITIAN {
            return Err(Error::InvalidState {
                property: format!("not Hermitian (max |ρ - ρ†| = {dev:.3e})"),
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::TRACE_ONE || tr.im.abs() > tol::TRACE_ONE {
            return Err(Error::InvalidState {
                property: format!("trace is {:.12} + {:.3e}i, not 1", tr.re, tr.im),
            });
        }
        let min_eig = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < tol::EIGENVALUE_FLOOR {
            return Err(Error::InvalidState {
                property: format!("negativity (smallest eigenvalue {min_eig:.3e})"),
            });
        }
        Ok(Self { mat })
    }

    /// Pure state `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_ket(psi: &CVector) -> Result<Self> {
        let norm2 = psi.dotc(psi).re;
        if norm2 <= tol::ZERO_PROBABILITY {
            return Err(Error::InvalidState {
                property: "zero-norm state vector".into(),
            });
        }
        Self::new((psi * psi.adjoint()).scale(1.0 / norm2))
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Born probability `tr(ρ P)` of an outcome projector.
    pub fn born(&self, projector: &CMatrix) -> f64 {
        (&self.mat * projector).trace().re
    }
}

/// A complete orthonormal set of `d` kets with fixed global phases.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    vectors: Vec<CVector>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::InvalidArgument {
                reason: "empty basis".into(),
            });
        }
        for v in &vectors {
            check_same_dim(v.len(), d)?;
        }
        for (i, v) in vectors.iter().enumerate() {
            for (j, w) in vectors.iter().enumerate() {
                let g = v.dotc(w);
                let target = if i == j { 1.0 } else { 0.0 };
                if (g.re - target).abs() > tol::ORTHONORMAL || g.im.abs() > tol::ORTHONORMAL {
                    return Err(Error::InvalidArgument {
                        reason: format!("vectors {i}, {j} are not orthonormal"),
                    });
                }
            }
        }
        Ok(Self { vectors })
    }

    /// The computational basis `{|0⟩, ..., |d-1⟩}`.
    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|k| {
                CVector::from_fn(dim, |n, _| {
                    if n == k {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        Self { vectors }
    }

    /// The discrete Fourier basis, `⟨n|b_μ⟩ = exp(2πi nμ/d)/√d`.
    ///
    /// Complementary to the computational basis: every mutual overlap has
    /// modulus `1/√d`.
    pub fn fourier(dim: usize) -> Self {
        assert!(dim >= 2, "fourier basis needs dim >= 2");
        let norm = 1.0 / (dim as f64).sqrt();
        let vectors = (0..dim)
            .map(|mu| {
                CVector::from_fn(dim, |n, _| {
                    let phase = 2.0 * std::f64::consts::PI * (n as f64) * (mu as f64) / dim as f64;
                    Complex64::from_polar(norm, phase)
                })
            })
            .collect();
        Self { vectors }
    }

    /// Extract the eigenbasis of a nondegenerate decomposition: each rank-1
    /// projector `|v⟩⟨v|` yields its ket, with the phase fixed by the
    /// largest-magnitude projector column. The reconstruction formulas are
    /// invariant under this phase choice.
    pub fn from_decomposition(decomposition: &SpectralDecomposition) -> Result<Self> {
        if !decomposition.is_nondegenerate() {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "basis extraction needs a nondegenerate observable ({} eigenvalues for dimension {})",
                    decomposition.len(),
                    decomposition.dim()
                ),
            });
        }
        let d = decomposition.dim();
        let mut vectors = Vec::with_capacity(d);
        for p in decomposition.projectors() {
            let col = (0..d)
                .max_by(|&i, &j| {
                    p.column(i)
                        .norm()
                        .partial_cmp(&p.column(j).norm())
                        .unwrap()
                })
                .unwrap();
            let v = p.column(col).into_owned();
            let norm = v.norm();
            if norm <= tol::ZERO_PROBABILITY {
                return Err(Error::NotProjector { deviation: norm });
            }
            vectors.push(v.unscale(norm));
        }
        Self::new(vectors)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &CVector {
        &self.vectors[k]
    }

    /// The observable with eigenvalue `eigenvalues[k]` on basis vector `k`.
    pub fn observable(&self, eigenvalues: &[f64]) -> Result<SpectralDecomposition> {
        SpectralDecomposition::from_basis(self, eigenvalues)
    }
}

/// A validated orthogonal projector (Hermitian and idempotent).
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    mat: CMatrix,
}

impl Projector {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let dim = check_square(&mat)?;
        let _ = dim;
        let herm = hermiticity_residual(&mat);
        let idem = max_abs_diff(&(&mat * &mat), &mat);
        if herm > tol::PROJECTOR || idem > tol::PROJECTOR {
            return Err(Error::NotProjector {
                deviation: herm.max(idem),
            });
        }
        Ok(Self { mat })
    }

    /// Rank-1 projector `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_ket(psi: &CVector) -> Result<Self> {
        let norm2 = psi.dotc(psi).re;
        if norm2 <= tol::ZERO_PROBABILITY {
            return Err(Error::InvalidArgument {
                reason: "zero-norm ket".into(),
            });
        }
        Ok(Self {
            mat: (psi * psi.adjoint()).scale(1.0 / norm2),
        })
    }

    /// The complementary projector `I - P`.
    pub fn complement(&self) -> Self {
        Self {
            mat: CMatrix::identity(self.dim(), self.dim()) - &self.mat,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// `tr P`, rounded to the nearest integer rank.
    pub fn rank(&self) -> usize {
        self.mat.trace().re.round() as usize
    }
}

/// Outcome of a complementarity check between two spectral decompositions.
#[derive(Debug, Clone)]
pub struct Complementarity {
    pub complementary: bool,
    pub nondegenerate_a: bool,
    pub nondegenerate_b: bool,
    /// Pairs `(n, μ)` with `tr(P_{a_n} P_{b_μ}) ≈ 0`.
    pub zero_overlap_pairs: Vec<(usize, usize)>,
}

impl std::fmt::Display for Complementarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.complementary {
            return write!(f, "complementary");
        }
        let mut parts = Vec::new();
        if !self.nondegenerate_a {
            parts.push("first observable is degenerate".to_string());
        }
        if !self.nondegenerate_b {
            parts.push("second observable is degenerate".to_string());
        }
        if !self.zero_overlap_pairs.is_empty() {
            parts.push(format!(
                "zero overlaps at (n, mu) pairs {:?}",
                self.zero_overlap_pairs
            ));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Check that two observables are nondegenerate and share no eigenvectors,
/// i.e. every mutual eigenprojector overlap is nonzero.
pub fn check_complementary(
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
) -> Result<Complementarity> {
    check_same_dim(a.dim(), b.dim())?;
    let nondegenerate_a = a.is_nondegenerate();
    let nondegenerate_b = b.is_nondegenerate();
    let mut zero_overlap_pairs = Vec::new();
    for (n, pa) in a.projectors().iter().enumerate() {
        for (mu, pb) in b.projectors().iter().enumerate() {
            // tr(P_a P_b) = |⟨b_μ|a_n⟩|² for rank-1 projectors.
            let overlap = (pa * pb).trace().re;
            if overlap <= tol::OVERLAP_MIN * tol::OVERLAP_MIN {
                zero_overlap_pairs.push((n, mu));
            }
        }
    }
    Ok(Complementarity {
        complementary: nondegenerate_a && nondegenerate_b && zero_overlap_pairs.is_empty(),
        nondegenerate_a,
        nondegenerate_b,
        zero_overlap_pairs,
    })
}

fn standard_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Deterministic random density matrix `G G† / tr(G G†)` from a seeded
/// complex Gaussian matrix `G`; full rank with probability 1.
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| standard_complex(&mut rng));
    let gg = &g * g.adjoint();
    let mat = hermitize(&gg.scale(1.0 / gg.trace().re));
    DensityMatrix::new(mat).expect("Gaussian construction yields a valid state")
}

/// Deterministic random Hermitian matrix `(G + G†)/2` with O(1) entries.
pub fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| standard_complex(&mut rng));
    hermitize(&g)
}
