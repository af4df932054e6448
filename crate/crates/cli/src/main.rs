mod record;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use modcurve::verify::{sweep, SweepPlan};
use modcurve::{
    invariants_bruteforce, invariants_formula, EngineConfig, Error, Family, InvariantSet,
    SubgroupSpec, DEFAULT_MAX_SL2_ELEMENTS,
};
use serde::Serialize;

use record::{read_reference, write_csv, write_json, InvariantRecord, RowIssue};

const EXIT_USAGE: u8 = 1;
const EXIT_MISMATCH: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

/// Genus invariants of modular curves, by formula and by brute force.
#[derive(Debug, Parser)]
#[command(name = "modcurve", version)]
struct Cli {
    /// Largest SL2(Z/NZ) the brute-force engine will enumerate.
    #[arg(
        long,
        global = true,
        env = "MODCURVE_MAX_SL2",
        default_value_t = DEFAULT_MAX_SL2_ELEMENTS
    )]
    max_sl2_elements: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the invariants of one curve.
    Invariants(InvariantsArgs),
    /// Write a table of formula invariants.
    Table(TableArgs),
    /// Compare formulas with the brute-force engine over a range of levels.
    Verify(VerifyArgs),
    /// Check a reference CSV file against the formulas.
    Compare {
        /// CSV with columns family,level,m,psl2_index,nu2,nu3,cusps,genus[,method].
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Formula,
    Bruteforce,
    Both,
}

#[derive(Debug, Args)]
struct InvariantsArgs {
    #[arg(value_name = "FAMILY", conflicts_with = "family")]
    family_pos: Option<String>,
    #[arg(value_name = "LEVEL", conflicts_with = "level")]
    level_pos: Option<u64>,
    /// Family tag, e.g. x0, sp+, ns*.
    #[arg(long)]
    family: Option<String>,
    /// N, or the prime p for s4.
    #[arg(long)]
    level: Option<u64>,
    /// M for arith1 and arithpm1.
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Formula)]
    method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Comma-separated family tags; all families when omitted.
    #[arg(long)]
    families: Option<String>,
    #[arg(long, default_value_t = 1)]
    min_level: u64,
    #[arg(long)]
    max_level: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated family tags; all families when omitted.
    #[arg(long)]
    families: Option<String>,
    #[arg(long)]
    max_level: u64,
    /// Largest modulus M*N for arith1 and arithpm1 (defaults to --max-level).
    #[arg(long)]
    arith_max: Option<u64>,
    /// Largest prime for s4 (defaults to --max-level).
    #[arg(long)]
    s4_max: Option<u64>,
    /// Include per-entry wall times.
    #[arg(long)]
    timings: bool,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

/// An error that maps to a particular exit status.
#[derive(Debug)]
struct Exit(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Exit {
        let e = e.into();
        let code = match e.downcast_ref::<Error>() {
            Some(Error::Internal(_) | Error::NotIntegral { .. } | Error::NegativeGenus(_)) => {
                EXIT_MISMATCH
            }
            _ => EXIT_USAGE,
        };
        Exit(code, e)
    }
}

type CmdResult = Result<u8, Exit>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let config = EngineConfig::with_cap(cli.max_sl2_elements);
    let result = match cli.command {
        Command::Invariants(args) => cmd_invariants(args, &config),
        Command::Table(args) => cmd_table(args),
        Command::Verify(args) => cmd_verify(args, &config),
        Command::Compare { path } => cmd_compare(&path),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn parse_families(list: Option<&str>) -> anyhow::Result<Vec<Family>> {
    let Some(list) = list else {
        return Ok(Family::ALL.to_vec());
    };
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Family>().map_err(anyhow::Error::from))
        .collect()
}

fn build_spec(args: &InvariantsArgs) -> anyhow::Result<SubgroupSpec> {
    let Some(tag) = args.family.as_deref().or(args.family_pos.as_deref()) else {
        bail!("a family is required (positional or --family)");
    };
    let Some(level) = args.level.or(args.level_pos) else {
        bail!("a level is required (positional or --level)");
    };
    let family: Family = tag.parse()?;
    let spec = match (family.is_arith(), args.m) {
        (true, Some(m)) => SubgroupSpec::arith(family, m, level),
        (true, None) => bail!("{family} needs --m"),
        (false, None) => SubgroupSpec::new(family, level),
        (false, Some(_)) => bail!("{family} takes no --m"),
    };
    spec.validate()?;
    Ok(spec)
}

fn describe(spec: &SubgroupSpec, inv: &InvariantSet) -> String {
    format!(
        "{spec}: psl2_index={} nu2={} nu3={} cusps={} genus={} [{}]",
        inv.psl2_index, inv.eps2, inv.eps3, inv.eps_inf, inv.genus, inv.method
    )
}

fn cmd_invariants(args: InvariantsArgs, config: &EngineConfig) -> CmdResult {
    let spec = build_spec(&args)?;
    let mut out = io::stdout().lock();
    let formula = match args.method {
        MethodArg::Formula | MethodArg::Both => Some(invariants_formula(&spec)?),
        MethodArg::Bruteforce => None,
    };
    let brute = match args.method {
        MethodArg::Bruteforce | MethodArg::Both => Some(invariants_bruteforce(&spec, config)?),
        MethodArg::Formula => None,
    };
    for inv in formula.iter().chain(brute.iter()) {
        writeln!(out, "{}", describe(&spec, inv))?;
    }
    if let (Some(f), Some(b)) = (formula, brute) {
        if f.same_values(&b) {
            writeln!(out, "MATCH")?;
        } else {
            writeln!(out, "MISMATCH")?;
            return Ok(EXIT_MISMATCH);
        }
    }
    Ok(0)
}

fn table_records(families: &[Family], min: u64, max: u64) -> anyhow::Result<Vec<InvariantRecord>> {
    let mut families = families.to_vec();
    families.sort_by_key(|f| f.tag());
    families.dedup();
    let mut rows = Vec::new();
    for family in families {
        for spec in SubgroupSpec::admissible(family, min, max) {
            let inv = invariants_formula(&spec).with_context(|| format!("evaluating {spec}"))?;
            rows.push(InvariantRecord::new(&spec, &inv));
        }
    }
    Ok(rows)
}

fn cmd_table(args: TableArgs) -> CmdResult {
    if args.min_level > args.max_level {
        return Err(Exit(
            EXIT_USAGE,
            anyhow::anyhow!(
                "--min-level {} exceeds --max-level {}",
                args.min_level,
                args.max_level
            ),
        ));
    }
    let families = parse_families(args.families.as_deref())?;
    let rows = table_records(&families, args.min_level, args.max_level)?;
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        Format::Csv => write_csv(sink, &rows)?,
        Format::Json => write_json(sink, &rows)?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct TimedEntry<'a> {
    #[serde(flatten)]
    entry: &'a modcurve::CheckEntry,
    wall_time_ms: f64,
}

#[derive(Serialize)]
struct TimedReport<'a> {
    entries: Vec<TimedEntry<'a>>,
    summary: modcurve::verify::Summary,
}

fn cmd_verify(args: VerifyArgs, config: &EngineConfig) -> CmdResult {
    if args.max_level == 0 {
        return Err(Exit(
            EXIT_USAGE,
            anyhow::anyhow!("--max-level must be positive"),
        ));
    }
    let families = parse_families(args.families.as_deref())?;
    let mut plan = SweepPlan::new(families, args.max_level);
    if let Some(m) = args.arith_max {
        plan = plan.with_arith_max(m);
    }
    if let Some(p) = args.s4_max {
        plan = plan.with_s4_max(p);
    }
    let report = sweep(&plan, config)?;
    let mut out = io::stdout().lock();
    if args.json {
        if args.timings {
            let timed = TimedReport {
                entries: report
                    .entries
                    .iter()
                    .map(|entry| TimedEntry {
                        entry,
                        wall_time_ms: entry.wall_time.as_secs_f64() * 1e3,
                    })
                    .collect(),
                summary: report.summary,
            };
            serde_json::to_writer_pretty(&mut out, &timed)?;
        } else {
            serde_json::to_writer_pretty(&mut out, &report)?;
        }
        writeln!(out)?;
    } else {
        for e in &report.entries {
            let status = match (&e.error, e.matched) {
                (Some(_), _) => "ERROR",
                (None, true) => "ok",
                (None, false) => "MISMATCH",
            };
            if args.timings {
                writeln!(
                    out,
                    "{status:8} {} ({:.1} ms)",
                    e.spec,
                    e.wall_time.as_secs_f64() * 1e3
                )?;
            } else if !e.matched {
                writeln!(out, "{status:8} {}", e.spec)?;
            }
            if !e.matched {
                if let Some(err) = &e.error {
                    writeln!(out, "    {err}")?;
                }
                if let Some(f) = &e.formula {
                    writeln!(out, "    {}", describe(&e.spec, f))?;
                }
                if let Some(b) = &e.bruteforce {
                    writeln!(out, "    {}", describe(&e.spec, b))?;
                }
            }
        }
        let s = report.summary;
        writeln!(
            out,
            "{} checked, {} matched, {} mismatched, {} errors",
            s.total, s.matched, s.mismatched, s.errored
        )?;
    }
    Ok(if report.all_match() { 0 } else { EXIT_MISMATCH })
}

fn cmd_compare(path: &PathBuf) -> CmdResult {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (rows, issues) = read_reference(file)?;
    let mut malformed = 0;
    for issue in &issues {
        match issue {
            RowIssue::Malformed { line, reason } => {
                malformed += 1;
                eprintln!("line {line}: malformed row: {reason}");
            }
            RowIssue::UnknownFamily { line, tag } => {
                eprintln!("warning: line {line}: unknown family `{tag}`, skipped");
            }
        }
    }
    let mut out = io::stdout().lock();
    let mut disagreements = 0;
    for row in &rows {
        let inv = invariants_formula(&row.spec)?;
        if inv.tuple() == row.values {
            writeln!(out, "agree     line {}: {}", row.line, row.spec)?;
        } else {
            disagreements += 1;
            let (i, e2, e3, ei, g) = row.values;
            writeln!(
                out,
                "disagree  line {}: {}: reference psl2_index={i} nu2={e2} nu3={e3} cusps={ei} genus={g}; {}",
                row.line,
                row.spec,
                describe(&row.spec, &inv)
            )?;
        }
    }
    writeln!(
        out,
        "{} compared, {} agree, {} disagree, {} malformed",
        rows.len(),
        rows.len() - disagreements,
        disagreements,
        malformed
    )?;
    Ok(if disagreements > 0 {
        EXIT_DISAGREE
    } else if malformed > 0 {
        EXIT_USAGE
    } else {
        0
    })
}
