use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use thetagenus::arthur::{
    arthur_condition, chi, classify, enumerate_parameters, fixtures_used, g_of, i_zero_set, l_profile,
    multiplicity_sum, validate, ArthurParameter, Condition, EpsilonTable, FactorOrder, GValue, Options,
};
use thetagenus::param_syntax::{parse, untabulated_weights};

use crate::report::{RunReport, Table};

#[derive(Debug, Subcommand)]
pub enum ParamCommand {
    /// Check the structural rules and list every violation.
    Validate(ParamArgs),
    /// Full analysis: I0, signs, multiplicity, L-profile, t*, g and case.
    Analyze(ParamArgs),
    /// Every valid parameter of rank m over the built-in labels.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct Resolution {
    /// Treat unresolved central values as nonvanishing (recorded as an assumption).
    #[arg(long)]
    assume_central_nonvanishing: bool,
    /// Extra epsilon values, one `labelA labelB ±1` per line.
    #[arg(long)]
    epsilon_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Parameter text, e.g. "D12[4]+1[7]+1".
    param: String,
    /// Rank m of the orthogonal group.
    #[arg(long)]
    m: u32,
    #[command(flatten)]
    resolution: Resolution,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    m: u32,
    /// Largest eigenform weight to include (at most 30).
    #[arg(long, default_value_t = 22)]
    max_weight: u32,
    #[command(flatten)]
    resolution: Resolution,
}

/// The parameter breaks a structural rule.
#[derive(Debug)]
pub struct ValidationFailed(pub String);

impl fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is not a valid parameter", self.0)
    }
}

impl std::error::Error for ValidationFailed {}

impl Resolution {
    fn load(&self) -> Result<(Options, EpsilonTable)> {
        let table = match &self.epsilon_table {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                EpsilonTable::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => EpsilonTable::new(),
        };
        Ok((
            Options {
                assume_central_nonvanishing: self.assume_central_nonvanishing,
            },
            table,
        ))
    }
}

pub fn run(cmd: &ParamCommand, report: &mut RunReport) -> Result<()> {
    match cmd {
        ParamCommand::Validate(a) => {
            let psi = parsed(a, report)?;
            report.set("parameter", &psi);
            report.set("m", psi.m());
            check(&psi, report)
        }
        ParamCommand::Analyze(a) => {
            let (opts, table) = a.resolution.load()?;
            let psi = parsed(a, report)?;
            report.set("parameter", &psi);
            report.set("m", psi.m());
            check(&psi, report)?;
            analyze(&psi, &opts, &table, report)
        }
        ParamCommand::Scan(a) => {
            let (opts, table) = a.resolution.load()?;
            scan(a, &opts, &table, report)
        }
    }
}

fn parsed(a: &ParamArgs, report: &mut RunReport) -> Result<ArthurParameter> {
    let psi = parse(&a.param, a.m).with_context(|| format!("parsing {:?}", a.param))?;
    for k in untabulated_weights(&psi) {
        eprintln!("warning: weight {k} is beyond the dimension table; its eigenform index is not checked");
        report.assume(format!("an eigenform of weight {k} with the given index exists"));
    }
    Ok(psi)
}

fn check(psi: &ArthurParameter, report: &mut RunReport) -> Result<()> {
    match validate(psi) {
        Ok(()) => {
            report.set("valid", "yes");
            Ok(())
        }
        Err(violations) => {
            let mut t = Table::new("violations", &["#", "violation"]);
            for (i, v) in violations.iter().enumerate() {
                t.push(vec![(i + 1).to_string(), v.to_string()]);
            }
            report.tables.push(t);
            report.set("valid", "no");
            Err(ValidationFailed(psi.to_string()).into())
        }
    }
}

fn set_fmt(items: impl IntoIterator<Item = String>) -> String {
    format!("{{{}}}", items.into_iter().collect::<Vec<_>>().join(", "))
}

fn condition_text(c: &Condition) -> String {
    match c {
        Condition::Satisfied => "satisfied".to_string(),
        Condition::Violated { i } => format!("violated at summand {}", i + 1),
        Condition::Unknown { i, pair } => {
            format!(
                "unknown at summand {} (needs eps({} x {}))",
                i + 1,
                pair.0.form(),
                pair.1.form()
            )
        }
    }
}

fn analyze(psi: &ArthurParameter, opts: &Options, table: &EpsilonTable, report: &mut RunReport) -> Result<()> {
    let i0 = i_zero_set(psi);
    let mut summands = Table::new("summands", &["i", "summand", "n", "d", "n*d", "in I0", "chi"]);
    for (i, s) in psi.summands().iter().enumerate() {
        let sign = if i0.contains(&i) {
            chi(psi, i)?.to_string()
        } else {
            "-".to_string()
        };
        summands.push(vec![
            (i + 1).to_string(),
            s.to_string(),
            s.label.n().to_string(),
            s.d.to_string(),
            s.nd().to_string(),
            if i0.contains(&i) { "yes" } else { "no" }.to_string(),
            sign,
        ]);
    }
    report.tables.push(summands);

    let profile = l_profile(psi, opts);
    let mut orders = Table::new("L-profile", &["t", "order"]);
    for (t, o) in profile.orders.iter().enumerate() {
        let cell = match o {
            FactorOrder::Known(x) => x.to_string(),
            FactorOrder::Unknown(why) => format!("unknown: {why}"),
        };
        orders.push(vec![(t + 1).to_string(), cell]);
    }
    report.tables.push(orders);
    for a in &profile.assumptions {
        report.assume(a.clone());
    }

    let condition = arthur_condition(psi, table);
    for (a, b, s) in fixtures_used(psi, table) {
        report.assume(format!("eps({a} x {b}) = {s} from the epsilon table"));
    }
    report.set("I0", set_fmt(i0.iter().map(|i| (i + 1).to_string())));
    report.set("condition", condition_text(&condition));
    report.set("multiplicity", multiplicity_sum(psi, table));
    report.set(
        "T",
        profile
            .support()
            .map_or("unknown".to_string(), |t| set_fmt(t.iter().map(ToString::to_string))),
    );
    match g_of(psi, opts) {
        GValue::Known { g, t_star } => {
            report.set(
                "t*",
                t_star.map_or("none".to_string(), |(t, kind)| format!("{t} ({kind})")),
            );
            report.set("g", g);
        }
        GValue::Unknown(why) => {
            report.set("t*", "unknown");
            report.set("g", format!("unknown ({why})"));
        }
    }
    let c = classify(psi, opts)?;
    report.set("case", c.case);
    report.set("bound", c.bound);
    Ok(())
}

fn scan(a: &ScanArgs, opts: &Options, table: &EpsilonTable, report: &mut RunReport) -> Result<()> {
    let params = enumerate_parameters(a.m, a.max_weight)?;
    let mut t = Table::new("parameters", &["parameter", "case", "condition", "multiplicity", "g"]);
    let mut gs = BTreeSet::new();
    for psi in &params {
        let c = classify(psi, opts)?;
        for note in &c.assumptions {
            report.assume(note.clone());
        }
        let g = g_of(psi, opts);
        if let Some(v) = g.value() {
            gs.insert(v);
        }
        t.push(vec![
            psi.to_string(),
            c.case.to_string(),
            condition_text(&arthur_condition(psi, table)),
            multiplicity_sum(psi, table).to_string(),
            g.value().map_or("unknown".to_string(), |v| v.to_string()),
        ]);
    }
    report.tables.push(t);
    report.set("m", a.m);
    report.set("max weight", a.max_weight);
    report.set("parameters", params.len());
    report.set("g values", set_fmt(gs.iter().map(ToString::to_string)));
    report.set("max g", gs.iter().max().map_or("none".to_string(), ToString::to_string));
    Ok(())
}
