//! The workflows behind each subcommand. Every workflow reads a validated
//! [`Resolved`] configuration, computes, and writes its artifacts into the
//! output directory.

use std::path::Path;

use serde_json::json;

use succmeter::io;
use succmeter::operator::{max_abs_diff, OrthonormalBasis};
use succmeter::oracle;
use succmeter::reconstruct;
use succmeter::scan;
use succmeter::single;
use succmeter::successive;

use crate::config::Resolved;
use crate::error::{numerical, CliError, CliResult};
use crate::output::{provenance, to_json_string, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Context<'a> {
    pub out_dir: &'a Path,
    pub format: Format,
    pub config_hash: &'a str,
}

impl Context<'_> {
    fn comments(&self) -> Vec<String> {
        provenance(self.config_hash)
    }
}

/// `single`: pointer density (components and optional sampled grid), pointer
/// mean, and the reduced post-measurement state.
pub fn run_single(resolved: &Resolved, ctx: &Context) -> CliResult<()> {
    let density = single::pointer_density(&resolved.rho, &resolved.observable_a, &resolved.meter1)
        .map_err(numerical)?;
    let mean = single::pointer_mean(&resolved.rho, &resolved.observable_a).map_err(numerical)?;
    let reduced = single::reduced_state_after(&resolved.rho, &resolved.observable_a, &resolved.meter1)
        .map_err(numerical)?;

    write_atomic(
        ctx.out_dir,
        "single_density.csv",
        &io::pointer_components_csv(&density, &ctx.comments()),
    )?;
    if let Some(grid) = &resolved.density_grid {
        let samples = density.sample(grid.min, grid.max, grid.points);
        write_atomic(
            ctx.out_dir,
            "single_density_grid.csv",
            &io::density_grid_csv(&samples, &ctx.comments()),
        )?;
    }
    let summary = json!({
        "pointer_mean": mean,
        "epsilon": resolved.meter1.epsilon(),
        "sigma_q": resolved.meter1.sigma_q(),
        "reduced_state": io::MatrixJson::from_matrix(reduced.matrix()),
    });
    write_atomic(ctx.out_dir, "single_summary.json", &to_json_string(&summary)?)?;
    Ok(())
}

/// `quasiprob`: the table plus both pointer correlations and the marginal
/// check.
pub fn run_quasiprob(resolved: &Resolved, ctx: &Context) -> CliResult<()> {
    let b = resolved.observable_b()?;
    let table = successive::quasi_probability(&resolved.rho, &resolved.observable_a, b, &resolved.meter1)
        .map_err(numerical)?;
    let correlations =
        successive::CorrelationResult::from_table(&table, resolved.meter2.epsilon());
    let marginals = successive::marginal_check(
        &table,
        &resolved.rho,
        &resolved.observable_a,
        b,
        &resolved.meter1,
    )
    .map_err(numerical)?;

    match ctx.format {
        Format::Csv => {
            write_atomic(
                ctx.out_dir,
                "quasiprob_table.csv",
                &io::quasiprob_csv(&table, &ctx.comments()),
            )?;
        }
        Format::Json => {
            write_atomic(
                ctx.out_dir,
                "quasiprob_table.json",
                &to_json_string(&io::QuasiProbJson::from_table(&table))?,
            )?;
        }
    }
    let summary = json!({
        "q1q2": correlations.q1q2,
        "p1q2": correlations.p1q2,
        "epsilon1": correlations.epsilon1,
        "epsilon2": correlations.epsilon2,
        "sigma_q1": correlations.sigma_q1,
        "marginal_max_dev_a": marginals.max_dev_a,
        "marginal_max_dev_b": marginals.max_dev_b,
        "marginal_pass": marginals.pass,
    });
    write_atomic(ctx.out_dir, "quasiprob_summary.json", &to_json_string(&summary)?)?;
    Ok(())
}

/// `limits`: Kirkwood, Margenau–Hill, and Wigner tables.
pub fn run_limits(resolved: &Resolved, ctx: &Context) -> CliResult<()> {
    let b = resolved.observable_b()?;
    let a = &resolved.observable_a;
    let kirkwood = successive::kirkwood(&resolved.rho, a, b).map_err(numerical)?;
    let mh = successive::margenau_hill(&resolved.rho, a, b).map_err(numerical)?;
    let wigner = successive::wigner_table(&resolved.rho, a, b).map_err(numerical)?;

    let tables: [(&str, String, Vec<[f64; 2]>); 3] = [
        (
            "limits_kirkwood",
            io::complex_table_csv(a.eigenvalues(), b.eigenvalues(), &kirkwood, &ctx.comments()),
            io::complex_cells(&kirkwood),
        ),
        (
            "limits_margenau_hill",
            io::real_table_csv(a.eigenvalues(), b.eigenvalues(), &mh, &ctx.comments()),
            io::real_cells(&mh),
        ),
        (
            "limits_wigner",
            io::real_table_csv(a.eigenvalues(), b.eigenvalues(), &wigner, &ctx.comments()),
            io::real_cells(&wigner),
        ),
    ];
    for (name, csv, cells) in tables {
        match ctx.format {
            Format::Csv => {
                write_atomic(ctx.out_dir, &format!("{name}.csv"), &csv)?;
            }
            Format::Json => {
                let body = json!({
                    "eigenvalues_a": a.eigenvalues(),
                    "eigenvalues_b": b.eigenvalues(),
                    "values": cells,
                });
                write_atomic(ctx.out_dir, &format!("{name}.json"), &to_json_string(&body)?)?;
            }
        }
    }
    Ok(())
}

/// `reconstruct`: simulate the projector-pair correlation measurements,
/// write the records, reconstruct, and report residuals and conditioning.
pub fn run_reconstruct(resolved: &Resolved, ctx: &Context) -> CliResult<()> {
    let b = resolved.observable_b()?;
    let basis_a =
        OrthonormalBasis::from_decomposition(&resolved.observable_a).map_err(numerical)?;
    let basis_b = OrthonormalBasis::from_decomposition(b).map_err(numerical)?;
    if !(resolved.meter1.epsilon() > 0.0) {
        return Err(CliError::Validation(
            "reconstruction needs a positive first coupling ε₁".into(),
        ));
    }
    let records = reconstruct::simulate_records(
        &resolved.rho,
        &basis_a,
        &basis_b,
        &resolved.meter1,
        resolved.meter2.epsilon(),
    )
    .map_err(numerical)?;
    let report = reconstruct::reconstruct_density(
        &records,
        &basis_a,
        &basis_b,
        resolved.meter1.epsilon(),
        resolved.meter1.sigma_q(),
    )
    .map_err(numerical)?;

    write_atomic(
        ctx.out_dir,
        "records.csv",
        &io::records_csv(&records, &ctx.comments()),
    )?;
    let residual = max_abs_diff(&report.matrix, resolved.rho.matrix());
    let report_json = io::ReconstructionReportJson::from_report(&report, Some(residual));
    write_atomic(
        ctx.out_dir,
        "reconstruct_report.json",
        &to_json_string(&report_json)?,
    )?;
    Ok(())
}

/// `oracle-check`: analytic vs grid-quadrature comparison report.
pub fn run_oracle_check(resolved: &Resolved, ctx: &Context) -> CliResult<()> {
    let b = resolved.observable_b()?;
    if !(resolved.meter1.epsilon() > 0.0 && resolved.meter2.epsilon() > 0.0) {
        return Err(CliError::Validation(
            "oracle-check needs positive couplings on both meters".into(),
        ));
    }
    let cmp = oracle::compare_with_analytic(
        &resolved.rho,
        &resolved.observable_a,
        b,
        &resolved.meter1,
        &resolved.meter2,
        resolved.grid_points,
    )
    .map_err(numerical)?;
    let body = json!({
        "epsilon1": resolved.meter1.epsilon(),
        "sigma_q1": resolved.meter1.sigma_q(),
        "epsilon2": resolved.meter2.epsilon(),
        "sigma_q2": resolved.meter2.sigma_q(),
        "comparison": cmp,
        "max_diff": cmp.max_diff(),
    });
    write_atomic(ctx.out_dir, "oracle_report.json", &to_json_string(&body)?)?;
    Ok(())
}

/// `scan`: the quasi-probability, correlations, and limit distances over the
/// configured ε₁ grid, as a long-format table.
pub fn run_scan(resolved: &Resolved, ctx: &Context) -> CliResult<()> {
    let b = resolved.observable_b()?;
    let epsilons = resolved.epsilon_scan.as_ref().ok_or_else(|| {
        CliError::Validation("scan needs an epsilon_scan list in the config".into())
    })?;
    let points = scan::scan_epsilon(
        &resolved.rho,
        &resolved.observable_a,
        b,
        resolved.meter1.sigma_q(),
        epsilons,
    )
    .map_err(numerical)?;

    match ctx.format {
        Format::Csv => {
            write_atomic(ctx.out_dir, "scan.csv", &io::scan_csv(&points, &ctx.comments()))?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = points
                .iter()
                .map(|p| {
                    json!({
                        "epsilon1": p.epsilon1,
                        "q1q2": p.q1q2,
                        "p1q2": p.p1q2,
                        "dist_wigner": p.dist_wigner,
                        "dist_kirkwood": p.dist_kirkwood,
                        "table": io::QuasiProbJson::from_table(&p.table),
                    })
                })
                .collect();
            write_atomic(ctx.out_dir, "scan.json", &to_json_string(&rows)?)?;
        }
    }
    Ok(())
}

/// `run`: dispatch on the workflow named in the config.
pub fn run_named(resolved: &Resolved, ctx: &Context) -> CliResult<()> {
    let workflow = resolved.workflow.as_deref().ok_or_else(|| {
        CliError::Validation("the run subcommand needs a 'workflow' field in the config".into())
    })?;
    match workflow {
        "single" => run_single(resolved, ctx),
        "quasiprob" => run_quasiprob(resolved, ctx),
        "limits" => run_limits(resolved, ctx),
        "reconstruct" => run_reconstruct(resolved, ctx),
        "oracle-check" => run_oracle_check(resolved, ctx),
        "scan" => run_scan(resolved, ctx),
        other => Err(CliError::Validation(format!("unknown workflow '{other}'"))),
    }
}
