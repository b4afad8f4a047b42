//! Named operators, states, and bases shared by the CLI and the test suites.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{CMatrix, CVector, DensityMatrix, OrthonormalBasis, Projector, SpectralDecomposition};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn observable_x() -> SpectralDecomposition {
    SpectralDecomposition::decompose_auto(&pauli_x()).expect("pauli-x decomposes")
}

pub fn observable_y() -> SpectralDecomposition {
    SpectralDecomposition::decompose_auto(&pauli_y()).expect("pauli-y decomposes")
}

pub fn observable_z() -> SpectralDecomposition {
    SpectralDecomposition::decompose_auto(&pauli_z()).expect("pauli-z decomposes")
}

/// `|0⟩` in dimension `dim`.
pub fn ket_zero(dim: usize) -> CVector {
    CVector::from_fn(dim, |n, _| if n == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// `(|0⟩ + |1⟩)/√2`.
pub fn ket_plus() -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])
}

/// `(|0⟩ + i|1⟩)/√2`, the σ_y eigenstate with eigenvalue +1.
pub fn ket_y_plus() -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![c(s, 0.0), c(0.0, s)])
}

/// `|0⟩⟨0|` on a qubit.
pub fn projector_z0() -> Projector {
    Projector::from_ket(&ket_zero(2)).expect("rank-1 ket")
}

/// The binary observable with spectrum {1, 0} and `P_1 = |0⟩⟨0|`.
pub fn observable_proj_z0() -> SpectralDecomposition {
    SpectralDecomposition::decompose_auto(projector_z0().matrix()).expect("projector decomposes")
}

/// Look up a state preset by name: `zero`, `plus`, `y-plus`,
/// `maximally-mixed`.
pub fn state_by_name(name: &str, dim: usize) -> Result<DensityMatrix> {
    let qubit_only = |v: CVector| -> Result<DensityMatrix> {
        if dim != 2 {
            return Err(Error::InvalidArgument {
                reason: format!("state preset '{name}' is qubit-only, got dimension {dim}"),
            });
        }
        DensityMatrix::from_ket(&v)
    };
    match name {
        "zero" => DensityMatrix::from_ket(&ket_zero(dim)),
        "plus" => qubit_only(ket_plus()),
        "y-plus" => qubit_only(ket_y_plus()),
        "maximally-mixed" => Ok(DensityMatrix::maximally_mixed(dim)),
        _ => Err(Error::InvalidArgument {
            reason: format!("unknown state preset '{name}'"),
        }),
    }
}

/// Look up an observable preset by name: `pauli-x`, `pauli-y`, `pauli-z`,
/// `proj-z0`, `computational`, `fourier`.
///
/// The basis presets carry descending integer eigenvalues `d-1, ..., 0`.
pub fn observable_by_name(name: &str, dim: usize) -> Result<SpectralDecomposition> {
    let qubit_only = |obs: SpectralDecomposition| -> Result<SpectralDecomposition> {
        if dim != 2 {
            return Err(Error::InvalidArgument {
                reason: format!("observable preset '{name}' is qubit-only, got dimension {dim}"),
            });
        }
        Ok(obs)
    };
    let descending: Vec<f64> = (0..dim).map(|k| (dim - 1 - k) as f64).collect();
    match name {
        "pauli-x" => qubit_only(observable_x()),
        "pauli-y" => qubit_only(observable_y()),
        "pauli-z" => qubit_only(observable_z()),
        "proj-z0" => qubit_only(observable_proj_z0()),
        "computational" => OrthonormalBasis::computational(dim).observable(&descending),
        "fourier" => OrthonormalBasis::fourier(dim).observable(&descending),
        _ => Err(Error::InvalidArgument {
            reason: format!("unknown observable preset '{name}'"),
        }),
    }
}
