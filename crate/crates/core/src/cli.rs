//! Command-line front end: `ingest`, `recommend`, `simulate`, `evaluate`.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on bad usage.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::audacity::{AudacityStrategy, StrategyKind};
use crate::error::{invalid, Result};
use crate::evaluation::newell_from_orders;
use crate::model::{Query, UserProfile};
use crate::recommender::{complete_query, run_query, EngineConfig};
use crate::simulation::{run_experiment, ExperimentConfig};
use crate::store::{load_xml, ProposalStore};
use crate::xml::{format_unit, load_profile, save_profile};

#[derive(Debug, Parser)]
#[command(name = "jobrec", version, about = "Content-based job recommendation engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Merge proposal files into a deduplicated database.
    Ingest {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Database to create or extend.
        #[arg(long)]
        out: PathBuf,
        /// Replace stored proposals whose content changed.
        #[arg(long)]
        upsert: bool,
    },
    /// Answer one query for a user profile.
    Recommend {
        #[arg(long)]
        jpd: PathBuf,
        /// Profile XML; created on first use.
        #[arg(long)]
        profile: PathBuf,
        /// Comma-separated query topics.
        #[arg(long)]
        topics: String,
        #[arg(long, default_value_t = 0.4)]
        sel: f64,
        /// pnf, 2-lse or ws.
        #[arg(long, default_value = "ws")]
        strategy: String,
        /// Fixed audacity, bypassing the strategy.
        #[arg(long = "override")]
        manual_override: Option<f64>,
        /// Accepted JIDs; when given, feedback is recorded and the profile saved.
        #[arg(long)]
        accept: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        prune_threshold: f64,
    },
    /// Run a synthetic-user experiment and write CSV series.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Newell distance between two ranking files (`jid,rank` CSV).
    Evaluate {
        #[arg(long)]
        sys: PathBuf,
        #[arg(long)]
        usr: PathBuf,
    },
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::to_string)
        .collect()
}

fn ingest(inputs: &[PathBuf], out_path: &Path, upsert: bool, out: &mut dyn Write) -> Result<()> {
    let mut store = if out_path.exists() {
        ProposalStore::from_xml_file(out_path)?.0
    } else {
        ProposalStore::new()
    };
    let (mut inserted, mut updated, mut dups, mut rejected) = (0, 0, 0, 0);
    for path in inputs {
        let load = load_xml(path)?;
        for r in &load.rejects {
            writeln!(
                out,
                "reject {}:{} {}: {}",
                path.display(),
                r.line,
                r.jid.as_deref().unwrap_or("?"),
                r.reason
            )?;
        }
        rejected += load.rejects.len();
        let report = store.ingest_with(load.proposals, upsert);
        for nd in &report.near_duplicates {
            writeln!(out, "warning: {} has the same topics as {}", nd.jid, nd.existing)?;
        }
        inserted += report.inserted;
        updated += report.updated;
        dups += report.duplicates;
        rejected += report.rejects.len();
    }
    store.save_xml(out_path)?;
    writeln!(
        out,
        "inserted {inserted}, updated {updated}, duplicates {dups}, rejected {rejected}; store size {}",
        store.len()
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn recommend(
    jpd: &Path,
    profile_path: &Path,
    topics: &str,
    sel: f64,
    strategy: &str,
    manual_override: Option<f64>,
    accept: Option<&str>,
    prune_threshold: f64,
    out: &mut dyn Write,
) -> Result<()> {
    let (store, _, _) = ProposalStore::from_xml_file(jpd)?;
    let mut profile = if profile_path.exists() {
        load_profile(profile_path)?
    } else {
        let uid = profile_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "user".into());
        UserProfile::new(&uid)
    };
    let mut strat = AudacityStrategy::of_kind(strategy.parse::<StrategyKind>()?);
    strat.manual_override = manual_override;
    strat.validate()?;

    let query = Query::new(sel, split_list(topics), profile.next_query_index())?;
    let result = run_query(&mut profile, &query, &store, &strat)?;
    writeln!(out, "alpha {}", format_unit(result.alpha_used))?;
    for jid in &result.final_list {
        let seed = if result.seeds.contains(jid) { " (seed)" } else { "" };
        let url = store.get(jid).map(|p| p.jurl.as_str()).unwrap_or("");
        writeln!(out, "{jid}\t{url}{seed}")?;
    }
    if let Some(accept) = accept {
        let accepted: BTreeSet<String> = split_list(accept).into_iter().collect();
        let config = EngineConfig { prune_threshold };
        match complete_query(&mut profile, &result, &accepted, &config)? {
            Some(sigma) => writeln!(out, "sigma {}", format_unit(sigma))?,
            None => writeln!(out, "no recommendations; feedback not recorded")?,
        }
        save_profile(&profile, profile_path)?;
    }
    Ok(())
}

/// Reads a `jid,rank` file and returns JIDs ordered by rank.
pub fn read_ranking(path: &Path) -> Result<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows: Vec<(usize, String)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let jid = rec.get(0).unwrap_or("").trim().to_string();
        let rank = rec
            .get(1)
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| invalid(format!("{}: bad rank for `{jid}`", path.display())))?;
        rows.push((rank, jid));
    }
    rows.sort();
    let n = rows.len();
    if rows.iter().enumerate().any(|(i, (r, _))| *r != i + 1) {
        return Err(invalid(format!(
            "{}: ranks are not a permutation of 1..={n}",
            path.display()
        )));
    }
    Ok(rows.into_iter().map(|(_, j)| j).collect())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Ingest { inputs, out: path, upsert } => ingest(&inputs, &path, upsert, out),
        Command::Recommend {
            jpd,
            profile,
            topics,
            sel,
            strategy,
            manual_override,
            accept,
            prune_threshold,
        } => recommend(
            &jpd,
            &profile,
            &topics,
            sel,
            &strategy,
            manual_override,
            accept.as_deref(),
            prune_threshold,
            out,
        ),
        Command::Simulate { config, out_dir } => {
            let cfg = ExperimentConfig::load(&config)?;
            let output = run_experiment(&cfg)?;
            for a in &output.anomalies {
                writeln!(out, "anomaly: {a}")?;
            }
            output.write_csvs(&out_dir)?;
            writeln!(
                out,
                "wrote {} episodes to {}",
                output.episodes.iter().map(Vec::len).sum::<usize>(),
                out_dir.display()
            )?;
            Ok(())
        }
        Command::Evaluate { sys, usr } => {
            let d = newell_from_orders(&read_ranking(&sys)?, &read_ranking(&usr)?)?;
            writeln!(out, "{d}")?;
            Ok(())
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
