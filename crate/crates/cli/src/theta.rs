use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use thetagenus::{enumerate_index_matrices, first_difference, theta_table, Lattice};

use crate::report::{RunReport, Table};
use crate::Session;

#[derive(Debug, Subcommand)]
pub enum ThetaCommand {
    /// Print r_L(S) for every index matrix S in the window.
    Table(Window),
    /// Exact rank of the window.
    Rank(Window),
    /// First index matrix where two lattices differ.
    Diff(DiffArgs),
}

#[derive(Debug, Args)]
pub struct Window {
    /// Comma-separated names, or `all24` for every rank-24 catalog lattice.
    #[arg(long, value_delimiter = ',', required = true)]
    lattices: Vec<String>,
    /// Degree g of the index matrices.
    #[arg(long)]
    degree: usize,
    /// Even bound on the diagonal entries of S.
    #[arg(long, default_value_t = 2)]
    bound: u64,
    /// Also write the table as tab-separated values.
    #[arg(long)]
    tsv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    first: String,
    second: String,
    #[arg(long)]
    degree: usize,
    #[arg(long, default_value_t = 2)]
    bound: u64,
}

fn resolve(ctx: &Session, names: &[String]) -> Result<Vec<Lattice>> {
    let mut out = Vec::new();
    for n in names {
        match n.as_str() {
            "all24" => {
                for name in ctx.catalog.names_of_rank(24) {
                    out.push(ctx.catalog.lattice(&name)?);
                }
            }
            _ => out.push(ctx.catalog.lattice(n)?),
        }
    }
    Ok(out)
}

pub fn run(ctx: &Session, cmd: &ThetaCommand, report: &mut RunReport) -> Result<()> {
    match cmd {
        ThetaCommand::Table(w) | ThetaCommand::Rank(w) => {
            let lattices = resolve(ctx, &w.lattices)?;
            let refs: Vec<&Lattice> = lattices.iter().collect();
            let table = theta_table(&refs, w.degree, w.bound, &ctx.enum_config)?;
            if let Some(path) = &w.tsv {
                std::fs::write(path, table.to_tsv()).with_context(|| format!("writing {}", path.display()))?;
            }
            if matches!(cmd, ThetaCommand::Table(_)) {
                let mut headers = vec!["S"];
                headers.extend(table.lattices.iter().map(String::as_str));
                let mut t = Table::new("counts", &headers);
                for (j, s) in table.columns.iter().enumerate() {
                    let mut row = vec![s.to_string()];
                    row.extend(table.counts.iter().map(|r| r[j].to_string()));
                    t.push(row);
                }
                report.tables.push(t);
            }
            report.set("lattices", table.lattices.len());
            report.set("degree", w.degree);
            report.set("bound", w.bound);
            report.set("columns", table.columns.len());
            report.set("rank", table.rank());
        }
        ThetaCommand::Diff(a) => {
            let l1 = ctx.catalog.lattice(&a.first)?;
            let l2 = ctx.catalog.lattice(&a.second)?;
            let found = first_difference(&l1, &l2, a.degree, a.bound, &ctx.enum_config)?;
            report.set("degree", a.degree);
            report.set("bound", a.bound);
            report.set("columns searched", enumerate_index_matrices(a.degree, a.bound).len());
            match found {
                Some(d) => {
                    report.set("witness", &d.index);
                    report.set(&format!("r({})", a.first), d.first);
                    report.set(&format!("r({})", a.second), d.second);
                }
                None => report.set("witness", "none"),
            }
        }
    }
    Ok(())
}
