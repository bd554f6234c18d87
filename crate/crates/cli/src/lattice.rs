use std::fmt;

use anyhow::{bail, Result};
use clap::Args;
use thetagenus::catalog::predicted_roots;
use thetagenus::is_even_unimodular;

use crate::report::{RunReport, Table};
use crate::Session;

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Catalog name, e.g. E8, E8^2, D16+, Leech, Niemeier(A1^24).
    #[arg(required_unless_present = "all_rank", conflicts_with = "all_rank")]
    name: Option<String>,
    /// Check every catalog lattice of this rank.
    #[arg(long)]
    all_rank: Option<usize>,
}

/// One or more lattices failed a structural check.
#[derive(Debug)]
pub struct CheckFailed(pub Vec<String>);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "checks failed for {}", self.0.join(", "))
    }
}

impl std::error::Error for CheckFailed {}

pub fn run(ctx: &Session, args: &LatticeArgs, report: &mut RunReport) -> Result<()> {
    let names = match (&args.name, args.all_rank) {
        (Some(n), _) => vec![n.clone()],
        (None, Some(rank)) => ctx.catalog.names_of_rank(rank),
        (None, None) => unreachable!("clap requires one of them"),
    };
    if names.is_empty() {
        bail!("the catalog has no lattices of rank {}", args.all_rank.unwrap_or(0));
    }
    let mut table = Table::new(
        "lattices",
        &[
            "name",
            "rank",
            "even unimodular",
            "min norm",
            "kissing",
            "roots",
            "expected roots",
            "check",
        ],
    );
    let mut failed = Vec::new();
    for name in &names {
        let lat = ctx.catalog.lattice(name)?;
        let unimodular = is_even_unimodular(lat.gram());
        let (min, kissing) = lat.minimum()?;
        let roots = lat.root_count()?;
        let entry = ctx.catalog.entry(name);
        let expected = entry.and_then(|e| e.expected_roots.or_else(|| predicted_roots(&e.spec)));
        let ok = unimodular && expected.is_none_or(|e| e == roots);
        if !ok {
            failed.push(name.clone());
        }
        table.push(vec![
            name.clone(),
            lat.rank().to_string(),
            if unimodular { "yes" } else { "no" }.to_string(),
            min.to_string(),
            kissing.to_string(),
            roots.to_string(),
            expected.map_or("-".to_string(), |e| e.to_string()),
            if ok { "ok" } else { "FAIL" }.to_string(),
        ]);
    }
    report.tables.push(table);
    report.set("lattices", names.len());
    report.set("failed", failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CheckFailed(failed).into())
    }
}
