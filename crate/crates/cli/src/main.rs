//! `galled-census`: exact counts, distributions, bounds and limit laws for
//! galled networks, one-component galled networks and dup-trees.
//!
//! Exit codes: 0 success, 1 computation or I/O failure (including a failed
//! `check`), 2 usage error, 3 refused by a resource guard.

mod context;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use galled_census_core::asymptotics::{limit_pmf_xy, ln_biguint, log_asym, Family};
use galled_census_core::distributions::{
    convergence_report, dist_dup_repeats, dist_galled_joint, dist_one_component,
};
use galled_census_core::dup_trees::{
    dup_by_repeats_row, dup_total, dup_total_via_relation, enumerate_dup_trees, fdu_total,
    DUP_ORACLE_MAX_N,
};
use galled_census_core::galled::{
    brute_force_galled, galled_egf, galled_joint, galled_max_retic, galled_total, galled_totals,
    joint_from_egf, lower_bound_l, upper_bound_u, BRUTE_FORCE_MAX_N,
};
use galled_census_core::io::{parse_ns_list, DistFamily, DistTable};
use galled_census_core::one_component::{
    one_component_count, one_component_row, one_component_total, verify_bounds,
};
use galled_census_core::Error;

use context::Context;
use format::sig_digits;

/// Largest `n` for which the joint galled table is computed without `--allow-large`.
const JOINT_MAX_N: usize = 60;

#[derive(Parser, Debug)]
#[command(name = "galled-census", version, about = "Exact and asymptotic enumeration of galled networks")]
struct Cli {
    /// Load tables from FILE when present and write grown tables back.
    #[arg(long, global = true, value_name = "FILE")]
    cache: Option<PathBuf>,

    /// Lift the default cap on the joint galled table (n <= 60).
    #[arg(long, global = true)]
    allow_large: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct NArg {
    /// Number of leaves (or labels).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
}

impl NArg {
    fn get(&self) -> usize {
        self.n as usize
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One-component galled networks `1-GN_n`.
    OneComponent {
        #[command(flatten)]
        n: NArg,
        /// Print `k count` for every reticulation number.
        #[arg(long)]
        by_retic: bool,
    },
    /// Galled networks `GN_n`.
    Galled {
        #[command(flatten)]
        n: NArg,
        /// Print `k j count` for every reticulation and inner-reticulation number.
        #[arg(long, conflicts_with = "by_retic")]
        joint: bool,
        /// Print `k count` for every reticulation number.
        #[arg(long)]
        by_retic: bool,
    },
    /// Dup-trees `DU_n`.
    Dup {
        #[command(flatten)]
        n: NArg,
        /// Print `k count` for every number of repeated labels.
        #[arg(long)]
        by_repeats: bool,
    },
    /// Twin-cherry-free dup-trees.
    Fdu {
        #[command(flatten)]
        n: NArg,
    },
    /// Lower bound, exact count and upper bound for `GN_n`.
    Bounds {
        #[command(flatten)]
        n: NArg,
    },
    /// Galled networks with the maximum `2n-2` reticulations.
    MaxRetic {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
    },
    /// Exact distribution of a reticulation statistic.
    Dist {
        #[arg(long)]
        family: DistFamilyArg,
        #[command(flatten)]
        n: NArg,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Exact and asymptotic natural logs of a count.
    Asympt {
        #[arg(long)]
        family: FamilyArg,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        /// Reticulation deficit `n - k` for `one-component-near-max`.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Limit probability `P(X = j, Y = k)`.
    LimitPmf {
        #[arg(long)]
        j: u32,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Consistency checks between independent computation paths.
    Check {
        #[arg(long)]
        suite: Suite,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_n: u32,
    },
    /// Distances to the limit laws for a list of `n`.
    Report {
        /// Comma-separated list, e.g. `10,25,50,100`.
        #[arg(long)]
        ns: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DistFamilyArg {
    OneComponent,
    Galled,
    Dup,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    OneComponent,
    Galled,
    Dup,
    Fdu,
    OneComponentNearMax,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::OneComponent => Family::OneComponent,
            FamilyArg::Galled => Family::Galled,
            FamilyArg::Dup => Family::Dup,
            FamilyArg::Fdu => Family::Fdu,
            FamilyArg::OneComponentNearMax => Family::OneComponentNearMax,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    Tables,
    Bounds,
    Oracle,
    Conjecture,
}

/// Why a command stopped.
enum Failure {
    Usage(String),
    Guard(String),
    Other(String),
    /// A check reported failures; the report itself is already printed.
    ChecksFailed,
    /// The reader went away, e.g. `| head`.
    PipeClosed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Domain(_) => Failure::Usage(e.to_string()),
            Error::ResourceGuard { .. } => Failure::Guard(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::PipeClosed;
        }
        Failure::Other(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ctx = match Context::open(cli.cache.clone()) {
        Ok(ctx) => ctx,
        Err(e) => return report_failure(e.into()),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(&cli, &mut ctx, &mut out).and_then(|()| ctx.save().map_err(Failure::from));
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> ExitCode {
    match f {
        Failure::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Failure::Guard(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Failure::Other(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Failure::ChecksFailed => ExitCode::from(1),
        Failure::PipeClosed => ExitCode::SUCCESS,
    }
}

fn joint_guard(n: usize, allow_large: bool) -> CmdResult {
    if n > JOINT_MAX_N && !allow_large {
        return Err(Error::ResourceGuard {
            what: "the joint galled table (pass --allow-large to override)",
            limit: JOINT_MAX_N,
            requested: n,
        }
        .into());
    }
    Ok(())
}

fn run(cli: &Cli, ctx: &mut Context, out: &mut impl Write) -> CmdResult {
    match &cli.command {
        Command::OneComponent { n, by_retic } => {
            let n = n.get();
            let t = ctx.ntable(n + 1)?;
            if *by_retic {
                for (k, c) in one_component_row(t, n)?.iter().enumerate() {
                    writeln!(out, "{k} {c}")?;
                }
            } else {
                writeln!(out, "{}", one_component_total(t, n)?)?;
            }
        }
        Command::Galled { n, joint, by_retic } => {
            let n = n.get();
            if *joint || *by_retic {
                joint_guard(n, cli.allow_large)?;
                let table = galled_joint(n, ctx.ntable(n + 1)?)?;
                if *joint {
                    for (k, j, c) in table.cells() {
                        writeln!(out, "{k} {j} {c}")?;
                    }
                } else {
                    for k in 0..=table.max_retic() {
                        writeln!(out, "{k} {}", table.by_retic(k))?;
                    }
                }
            } else {
                writeln!(out, "{}", galled_total(n, ctx.ntable(n + 1)?)?)?;
            }
        }
        Command::Dup { n, by_repeats } => {
            let n = n.get();
            if *by_repeats {
                for (k, c) in dup_by_repeats_row(ctx.ntable(n + 1)?, n)?.iter().enumerate() {
                    writeln!(out, "{k} {c}")?;
                }
            } else {
                writeln!(out, "{}", dup_total(ctx.btable(n + 1)?, n)?)?;
            }
        }
        Command::Fdu { n } => {
            let n = n.get();
            writeln!(out, "{}", fdu_total(ctx.ntable(n + 1)?, n)?)?;
        }
        Command::Bounds { n } => {
            let n = n.get();
            let t = ctx.ntable(n + 1)?;
            writeln!(out, "lower {}", lower_bound_l(n, t)?)?;
            writeln!(out, "exact {}", galled_total(n, t)?)?;
            writeln!(out, "upper {}", upper_bound_u(n, t)?)?;
        }
        Command::MaxRetic { n } => {
            writeln!(out, "{}", galled_max_retic(*n as usize)?)?;
        }
        Command::Dist { family, n, format } => {
            let n = n.get();
            let dist = match family {
                DistFamilyArg::OneComponent => DistTable::from_scalar(
                    n,
                    DistFamily::OneComponent,
                    &dist_one_component(ctx.ntable(n + 1)?, n)?,
                )?,
                DistFamilyArg::Dup => {
                    DistTable::from_scalar(n, DistFamily::Dup, &dist_dup_repeats(ctx.ntable(n + 1)?, n)?)?
                }
                DistFamilyArg::Galled => {
                    joint_guard(n, cli.allow_large)?;
                    let joint = galled_joint(n, ctx.ntable(n + 1)?)?;
                    DistTable::from_joint(n, &dist_galled_joint(&joint)?)
                }
            };
            match format {
                OutputFormat::Csv => write!(out, "{}", dist.to_csv())?,
                OutputFormat::Json => write!(out, "{}", dist.to_json())?,
            }
        }
        Command::Asympt { family, n, k } => {
            let family = Family::from(*family);
            let n = *n as usize;
            let k = k.map(|k| k as usize);
            let estimate = log_asym(family, n, k)?;
            let exact = match family {
                Family::OneComponent | Family::Fdu => one_component_total(ctx.ntable(n + 1)?, n)?,
                Family::Galled => galled_total(n, ctx.ntable(n + 1)?)?,
                Family::Dup => dup_total(ctx.btable(n + 1)?, n)?,
                Family::OneComponentNearMax => {
                    let k = k.unwrap_or(0);
                    one_component_count(ctx.ntable(n + 1)?, n, n - k)?
                }
            };
            let exact_ln = ln_biguint(&exact);
            writeln!(out, "exact_ln {exact_ln:.6}")?;
            writeln!(out, "asym_ln {:.6}", estimate.ln_value)?;
            writeln!(out, "gap {:.6}", exact_ln - estimate.ln_value)?;
        }
        Command::LimitPmf { j, k } => {
            writeln!(out, "{}", sig_digits(limit_pmf_xy(*j as usize, *k), 6))?;
        }
        Command::Check { suite, max_n } => {
            let max_n = *max_n as usize;
            let failures = match suite {
                Suite::Tables => check_tables(ctx, max_n, cli.allow_large, out)?,
                Suite::Bounds => check_bounds(ctx, max_n, out)?,
                Suite::Oracle => check_oracle(ctx, max_n, out)?,
                Suite::Conjecture => {
                    check_conjecture(ctx, max_n, cli.allow_large, out)?;
                    0
                }
            };
            if failures > 0 {
                writeln!(out, "{failures} check(s) failed")?;
                return Err(Failure::ChecksFailed);
            }
            writeln!(out, "all checks passed")?;
        }
        Command::Report { ns } => {
            let ns = parse_ns_list(ns).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
                return Err(Failure::Usage(format!("report needs n >= 2, got {bad}")));
            }
            let max_n = ns.iter().copied().max().unwrap_or(2);
            let t = ctx.ntable(max_n + 1)?.clone();
            let b = ctx.btable(max_n + 1)?;
            let joint_cap = if cli.allow_large { usize::MAX } else { JOINT_MAX_N };
            let rows = convergence_report(&ns, &t, b, joint_cap)?;
            writeln!(
                out,
                "n,tv_one_component,tv_joint,one_component_fraction,one_component_fraction_gap,\
                 free_dup_fraction,free_dup_fraction_gap,ln_gap_one_component,ln_gap_galled,ln_gap_dup,ln_gap_fdu"
            )?;
            for r in rows {
                let tv_joint = r.tv_joint.map_or_else(|| "skipped".to_string(), |v| format!("{v:.6e}"));
                write!(
                    out,
                    "{},{:.6e},{},{:.6},{:.6e},{:.6},{:.6e}",
                    r.n,
                    r.tv_one_component,
                    tv_joint,
                    r.one_component_fraction,
                    r.one_component_fraction_gap,
                    r.free_dup_fraction,
                    r.free_dup_fraction_gap
                )?;
                for (_, gap) in &r.ln_gaps {
                    write!(out, ",{gap:.6}")?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// Cross-checks independent computation paths up to `max_n`.
fn check_tables(ctx: &mut Context, max_n: usize, allow_large: bool, out: &mut impl Write) -> Result<usize, Failure> {
    let mut failures = 0;
    let t = ctx.ntable(max_n + 1)?.clone();
    let b = ctx.btable(max_n + 1)?;
    let totals = galled_totals(max_n, &t)?;
    let joint_max = if allow_large { max_n } else { max_n.min(JOINT_MAX_N) };
    let egf_max = max_n.min(6);
    for n in 1..=max_n {
        if n <= joint_max {
            let joint = galled_joint(n, &t)?;
            let ok = joint.total() == &totals[n];
            failures += usize::from(!ok);
            writeln!(out, "n={n} galled joint total matches scalar path: {}", status(ok))?;
        }
        if n <= egf_max {
            let ok = joint_from_egf(n, &galled_egf(n, &t)?)? == galled_joint(n, &t)?;
            failures += usize::from(!ok);
            writeln!(out, "n={n} galled EGF fixed point matches recursion: {}", status(ok))?;
        }
        let du = dup_total(b, n)?;
        let ok = du == dup_total_via_relation(&t, n)?
            && du == dup_by_repeats_row(&t, n)?.into_iter().sum::<BigUint>();
        failures += usize::from(!ok);
        writeln!(out, "n={n} dup-tree totals agree: {}", status(ok))?;
    }
    Ok(failures)
}

fn check_bounds(ctx: &mut Context, max_n: usize, out: &mut impl Write) -> Result<usize, Failure> {
    let mut failures = 0;
    let t = ctx.ntable(max_n.max(2))?;
    let report = verify_bounds(t)?;
    for c in &report.checks {
        let ok = c.counterexample.is_none();
        failures += usize::from(!ok);
        write!(out, "{} ({}): {} instances: {}", c.name, c.statement, c.instances, status(ok))?;
        if let Some(at) = &c.counterexample {
            write!(out, " first counterexample {at}")?;
        }
        writeln!(out)?;
    }
    let t = ctx.ntable(max_n + 1)?;
    let totals = galled_totals(max_n, t)?;
    for n in 1..=max_n {
        let lower = lower_bound_l(n, t)?;
        let upper = upper_bound_u(n, t)?;
        let ok = lower <= totals[n] && totals[n] <= upper;
        failures += usize::from(!ok);
        writeln!(out, "n={n} lower <= GN_n <= upper: {}", status(ok))?;
    }
    Ok(failures)
}

fn check_oracle(ctx: &mut Context, max_n: usize, out: &mut impl Write) -> Result<usize, Failure> {
    if max_n > BRUTE_FORCE_MAX_N {
        return Err(Error::ResourceGuard {
            what: "the brute-force oracle",
            limit: BRUTE_FORCE_MAX_N,
            requested: max_n,
        }
        .into());
    }
    let mut failures = 0;
    let t = ctx.ntable(max_n + 1)?;
    for n in 1..=max_n {
        let ok = galled_joint(n, t)? == brute_force_galled(n, t)?;
        failures += usize::from(!ok);
        writeln!(out, "n={n} galled joint table matches tree enumeration: {}", status(ok))?;
    }
    for n in 1..=max_n.min(DUP_ORACLE_MAX_N) {
        let ok = enumerate_dup_trees(n, false)? == dup_by_repeats_row(t, n)?
            && enumerate_dup_trees(n, true)? == one_component_row(t, n)?;
        failures += usize::from(!ok);
        writeln!(out, "n={n} dup-trees match direct enumeration: {}", status(ok))?;
    }
    if max_n > DUP_ORACLE_MAX_N {
        writeln!(out, "dup-tree enumeration stops at n={DUP_ORACLE_MAX_N}")?;
    }
    Ok(failures)
}

/// Reports whether `k -> GN_{n,k}` rises up to `k = n` and falls after.
fn check_conjecture(ctx: &mut Context, max_n: usize, allow_large: bool, out: &mut impl Write) -> CmdResult {
    joint_guard(max_n, allow_large)?;
    let t = ctx.ntable(max_n + 1)?;
    for n in 1..=max_n {
        let table = galled_joint(n, t)?;
        let row: Vec<BigUint> = (0..=table.max_retic()).map(|k| table.by_retic(k)).collect();
        let peak = n.min(row.len() - 1);
        let rising = row[..=peak].windows(2).all(|w| w[0] < w[1]);
        let falling = row[peak..].windows(2).all(|w| w[0] > w[1]);
        let verdict = if rising && falling {
            format!("unimodal with peak at k={peak}")
        } else {
            "not unimodal at k=n".to_string()
        };
        writeln!(out, "n={n} {verdict}")?;
    }
    Ok(())
}
