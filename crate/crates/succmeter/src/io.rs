//! Serialization: the shared JSON matrix schema and the CSV table formats.
//!
//! Matrices travel as JSON objects with a `dim` field and a row-major
//! `entries` array of `[re, im]` pairs. CSV files are written with a fixed
//! 17-significant-digit float format so identical inputs produce
//! byte-identical files; `#`-prefixed comment lines carry metadata.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::CMatrix;
use crate::reconstruct::{ReconstructionReport, W11Record};
use crate::scan::ScanPoint;
use crate::single::PointerDensity;
use crate::successive::QuasiProbTable;

/// Shared JSON schema for complex matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    /// Row-major `[re, im]` pairs, `dim²` of them.
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self { dim, entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.dim == 0 || self.entries.len() != self.dim * self.dim {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "matrix JSON needs dim² = {} entries, got {}",
                    self.dim * self.dim,
                    self.entries.len()
                ),
            });
        }
        Ok(CMatrix::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.entries[i * self.dim + j];
            Complex64::new(re, im)
        }))
    }
}

/// Fixed float format: 17 significant digits, scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_comments(out: &mut String, comments: &[String]) {
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
}

/// CSV of a quasi-probability table: `a_n,b_m,re,im` rows with the meter
/// metadata in leading comment lines.
pub fn quasiprob_csv(table: &QuasiProbTable, comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    push_comments(
        &mut out,
        &[
            format!("epsilon1 = {}", fmt_float(table.epsilon1())),
            format!("sigma_q1 = {}", fmt_float(table.sigma_q1())),
        ],
    );
    out.push_str("a_n,b_m,re,im\n");
    for (n, &a) in table.eigenvalues_a().iter().enumerate() {
        for (m, &b) in table.eigenvalues_b().iter().enumerate() {
            let w = table.value(n, m);
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(a),
                fmt_float(b),
                fmt_float(w.re),
                fmt_float(w.im)
            ));
        }
    }
    out
}

/// CSV of any complex table over two eigenvalue lists, same schema as
/// [`quasiprob_csv`].
pub fn complex_table_csv(
    eigenvalues_a: &[f64],
    eigenvalues_b: &[f64],
    values: &DMatrix<Complex64>,
    comments: &[String],
) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    out.push_str("a_n,b_m,re,im\n");
    for (n, &a) in eigenvalues_a.iter().enumerate() {
        for (m, &b) in eigenvalues_b.iter().enumerate() {
            let w = values[(n, m)];
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(a),
                fmt_float(b),
                fmt_float(w.re),
                fmt_float(w.im)
            ));
        }
    }
    out
}

/// CSV of a real table (Margenau–Hill, Wigner rule) in the same four-column
/// schema, with a zero imaginary column.
pub fn real_table_csv(
    eigenvalues_a: &[f64],
    eigenvalues_b: &[f64],
    values: &DMatrix<f64>,
    comments: &[String],
) -> String {
    complex_table_csv(
        eigenvalues_a,
        eigenvalues_b,
        &values.map(|x| Complex64::new(x, 0.0)),
        comments,
    )
}

/// Row-major `[re, im]` cells of a complex table (for JSON output).
pub fn complex_cells(values: &DMatrix<Complex64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(values.nrows() * values.ncols());
    for n in 0..values.nrows() {
        for m in 0..values.ncols() {
            out.push([values[(n, m)].re, values[(n, m)].im]);
        }
    }
    out
}

/// Row-major `[value, 0]` cells of a real table (for JSON output).
pub fn real_cells(values: &DMatrix<f64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(values.nrows() * values.ncols());
    for n in 0..values.nrows() {
        for m in 0..values.ncols() {
            out.push([values[(n, m)], 0.0]);
        }
    }
    out
}

/// JSON form of a quasi-probability table (row-major values).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiProbJson {
    pub epsilon1: f64,
    pub sigma_q1: f64,
    pub eigenvalues_a: Vec<f64>,
    pub eigenvalues_b: Vec<f64>,
    pub values: Vec<[f64; 2]>,
}

impl QuasiProbJson {
    pub fn from_table(table: &QuasiProbTable) -> Self {
        let mut values = Vec::with_capacity(table.num_a() * table.num_b());
        for n in 0..table.num_a() {
            for m in 0..table.num_b() {
                let w = table.value(n, m);
                values.push([w.re, w.im]);
            }
        }
        Self {
            epsilon1: table.epsilon1(),
            sigma_q1: table.sigma_q1(),
            eigenvalues_a: table.eigenvalues_a().to_vec(),
            eigenvalues_b: table.eigenvalues_b().to_vec(),
            values,
        }
    }
}

/// CSV of measured projector-pair records:
/// `nu,mu,re,im,epsilon1,sigma_q1`.
pub fn records_csv(records: &[W11Record], comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    out.push_str("nu,mu,re,im,epsilon1,sigma_q1\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.nu,
            r.mu,
            fmt_float(r.value.re),
            fmt_float(r.value.im),
            fmt_float(r.epsilon1),
            fmt_float(r.sigma_q1)
        ));
    }
    out
}

/// Parse records back from [`records_csv`] output; comment and header lines
/// are skipped.
pub fn records_from_csv(text: &str) -> Result<Vec<W11Record>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("nu,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::InvalidArgument {
                reason: format!("records CSV line {}: expected 6 fields, got {}", lineno + 1, fields.len()),
            });
        }
        let parse_usize = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::InvalidArgument {
                reason: format!("records CSV line {}: bad index '{s}'", lineno + 1),
            })
        };
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::InvalidArgument {
                reason: format!("records CSV line {}: bad float '{s}'", lineno + 1),
            })
        };
        out.push(W11Record {
            nu: parse_usize(fields[0])?,
            mu: parse_usize(fields[1])?,
            value: Complex64::new(parse_f64(fields[2])?, parse_f64(fields[3])?),
            epsilon1: parse_f64(fields[4])?,
            sigma_q1: parse_f64(fields[5])?,
        });
    }
    Ok(out)
}

/// CSV of the analytic pointer density mixture: `weight,center,width`.
pub fn pointer_components_csv(density: &PointerDensity, comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    out.push_str("weight,center,width\n");
    for c in density.components() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_float(c.weight),
            fmt_float(c.center),
            fmt_float(c.width)
        ));
    }
    out
}

/// CSV of sampled `(Q, p(Q))` pairs: `q,p`.
pub fn density_grid_csv(samples: &[(f64, f64)], comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    out.push_str("q,p\n");
    for (q, p) in samples {
        out.push_str(&format!("{},{}\n", fmt_float(*q), fmt_float(*p)));
    }
    out
}

/// Long-format CSV of a coupling scan: one row per `(ε₁, a_n, b_m)` cell,
/// with the per-ε₁ scalars repeated on each row for easy plotting.
pub fn scan_csv(points: &[ScanPoint], comments: &[String]) -> String {
    let mut out = String::new();
    push_comments(&mut out, comments);
    out.push_str("epsilon1,a_n,b_m,re,im,q1q2,p1q2,dist_wigner,dist_kirkwood\n");
    for p in points {
        for (n, &a) in p.table.eigenvalues_a().iter().enumerate() {
            for (m, &b) in p.table.eigenvalues_b().iter().enumerate() {
                let w = p.table.value(n, m);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    fmt_float(p.epsilon1),
                    fmt_float(a),
                    fmt_float(b),
                    fmt_float(w.re),
                    fmt_float(w.im),
                    fmt_float(p.q1q2),
                    fmt_float(p.p1q2),
                    fmt_float(p.dist_wigner),
                    fmt_float(p.dist_kirkwood)
                ));
            }
        }
    }
    out
}

/// JSON reconstruction report: the retrieved matrix, residual diagnostics,
/// and conditioning data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReportJson {
    pub rho: MatrixJson,
    pub density_valid: bool,
    pub validation_error: Option<String>,
    pub asymmetry: f64,
    pub g_offdiag: f64,
    pub amplification: f64,
    pub ill_conditioned: bool,
    pub epsilon1: f64,
    pub sigma_q1: f64,
    /// `max |ρ_rec - ρ_true|` when the true state is known (simulated runs).
    pub residual_max: Option<f64>,
}

impl ReconstructionReportJson {
    pub fn from_report(report: &ReconstructionReport, residual_max: Option<f64>) -> Self {
        Self {
            rho: MatrixJson::from_matrix(&report.matrix),
            density_valid: report.density.is_some(),
            validation_error: report.validation_error.clone(),
            asymmetry: report.asymmetry,
            g_offdiag: report.g_offdiag,
            amplification: report.amplification,
            ill_conditioned: report.ill_conditioned,
            epsilon1: report.epsilon1,
            sigma_q1: report.sigma_q1,
            residual_max,
        }
    }
}
