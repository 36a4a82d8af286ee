//! Command-line driver: enumerate a restricted system, derive and persist
//! its tables, query them, run the verification suite, and export CSVs.
//!
//! Exit codes: 0 success, 2 bad usage, 3 missing prerequisite artifact,
//! 4 computation failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use soph_lab::error::{QueryError, SophError, TableError};
use soph_lab::export;
use soph_lab::lab::{Lab, LabError};
use soph_lab::soph::{m_soph, mm_soph, statistic_pk, sumtest_d};
use soph_lab::tables::{Mode, OmegaCutoff, TimeBound};
use soph_lab::verify::{run_suite, LemmaId};
use soph_lab::{
    enumerate_domain, load_table, save_table, BitString, EnumConfig, ModeSelection, RunConfig,
};

#[derive(Parser)]
#[command(name = "soph-lab", version, about = "exact algorithmic-statistics laboratory over RM1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Qp,
    Qk,
    Both,
}

impl ModeArg {
    fn selection(self) -> ModeSelection {
        match self {
            ModeArg::Qp => ModeSelection::Qp,
            ModeArg::Qk => ModeSelection::Qk,
            ModeArg::Both => ModeSelection::Both,
        }
    }

    fn single(self) -> Result<Mode, CliError> {
        match self {
            ModeArg::Qp => Ok(Mode::Qp),
            ModeArg::Qk => Ok(Mode::Qk),
            ModeArg::Both => Err(CliError::Usage("this query needs --mode qp or --mode qk".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CutoffArg {
    None,
    Literal,
}

impl CutoffArg {
    fn cutoff(self) -> OmegaCutoff {
        match self {
            CutoffArg::None => OmegaCutoff::AllOutputs,
            CutoffArg::Literal => OmegaCutoff::Literal,
        }
    }
}

/// Derivation parameters shared by the table-consuming commands.
#[derive(Args)]
struct DeriveOpts {
    /// Output directory holding records.csv and receiving derived files.
    #[arg(long)]
    out: PathBuf,
    /// Largest sophistication slack tabulated.
    #[arg(long, default_value_t = 8)]
    cmax: u32,
    /// Semimeasure modes to derive and export.
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,
    /// Halting-probability summation cutoff.
    #[arg(long = "omega-cutoff", value_enum, default_value = "none")]
    omega_cutoff: CutoffArg,
    /// Sample size for checks needing conditional enumerations.
    #[arg(long = "cond-sample", default_value_t = 24)]
    cond_sample: usize,
    /// Worker threads for enumerations.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the restricted domain and persist it.
    Enumerate {
        #[arg(long)]
        lmax: u32,
        #[arg(long)]
        tmax: u64,
        #[arg(long, default_value_t = 64)]
        ocap: u32,
        /// Auxiliary input ('e' for the empty string).
        #[arg(long, default_value = "e")]
        aux: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and persist the derived tables (k_table, bb, omega, tn).
    Tables {
        #[command(flatten)]
        opts: DeriveOpts,
    },
    /// Query K, m, omega prefixes, t_n, BB and sophistication values.
    Query {
        #[command(flatten)]
        opts: DeriveOpts,
        #[command(subcommand)]
        what: QueryCmd,
    },
    /// Run the lemma suite and write a JSON report.
    Verify {
        #[command(flatten)]
        opts: DeriveOpts,
        /// `all` or a comma-separated list of lemma ids (e.g. L2,L8,T1).
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Export every CSV table.
    Export {
        #[command(flatten)]
        opts: DeriveOpts,
    },
}

#[derive(Subcommand)]
enum QueryCmd {
    /// Restricted K(x).
    K { x: String },
    /// m_t(x) in the chosen mode (--mode qp|qk).
    M {
        x: String,
        #[arg(long)]
        t: Option<u64>,
    },
    /// First n digits of the halting probability.
    Omega { n: u32 },
    /// Critical time t_n.
    Tn { n: u32 },
    /// Busy Beaver values at length bound n.
    Bb { n: u32 },
    /// m-sophistication k_c(x).
    Kc {
        x: String,
        #[arg(long, default_value_t = 0)]
        c: u32,
    },
    /// (m,m)-sophistication k'(x).
    Kprime { x: String },
    /// Sumtest exponent d(x).
    D { x: String },
    /// Coarse m-sophistication.
    Coarse { x: String },
    /// Full sophistication summary line set.
    Soph {
        x: String,
        #[arg(long, default_value_t = 0)]
        c: u32,
    },
    /// The statistic P_k: support size, Z_k and implied N.
    Statistic { k: u32 },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Missing(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Missing(_) => 3,
            CliError::Failure(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Missing(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::Io(ref io) if io.kind() == std::io::ErrorKind::NotFound => {
                CliError::Missing(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Table(t) => t.into(),
            LabError::Query(q) => CliError::Failure(q.to_string()),
        }
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::MissingTable { .. } => CliError::Missing(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<SophError> for CliError {
    fn from(e: SophError) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<export::ExportError> for CliError {
    fn from(e: export::ExportError) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn parse_bits(s: &str) -> Result<BitString, CliError> {
    s.parse().map_err(|e: soph_lab::error::ParseError| CliError::Usage(e.to_string()))
}

fn records_path(dir: &Path) -> PathBuf {
    dir.join("records.csv")
}

fn load_lab(opts: &DeriveOpts) -> Result<Lab, CliError> {
    let path = records_path(&opts.out);
    if !path.exists() {
        return Err(CliError::Missing(format!(
            "no domain records at {}; run `soph-lab enumerate` first",
            path.display()
        )));
    }
    let domain = load_table(&path)?;
    let m = domain.manifest();
    let mut config = RunConfig::new(m.l_max, m.t_max);
    config.output_cap = m.output_cap;
    config.aux = m.aux.clone();
    config.c_max = opts.cmax;
    config.modes = opts.mode.selection();
    config.cutoff = opts.omega_cutoff.cutoff();
    config.cond_sample = opts.cond_sample;
    config.workers = opts.workers.max(1);
    Lab::from_domain(config, domain).map_err(|e| CliError::Failure(e.to_string()))
}

fn cmd_enumerate(
    lmax: u32,
    tmax: u64,
    ocap: u32,
    aux: &str,
    workers: usize,
    out: &Path,
) -> Result<(), CliError> {
    if tmax == 0 {
        return Err(CliError::Usage("--tmax must be at least 1".into()));
    }
    let aux = parse_bits(aux)?;
    let cfg = EnumConfig::new(lmax, tmax, ocap, aux);
    let started = Instant::now();
    let table = enumerate_domain(&cfg, workers.max(1))?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Failure(e.to_string()))?;
    save_table(&table, &records_path(out))?;
    println!("records: {}", table.len());
    println!("kraft: {}", table.kraft_sum());
    println!("hash: {}", table.manifest().content_hash);
    println!("wall_seconds: {:.3}", started.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_tables(opts: &DeriveOpts) -> Result<(), CliError> {
    let lab = load_lab(opts)?;
    let mut files = export::write_base_tables(&opts.out, &lab)?;
    for &mode in lab.config.modes.modes() {
        files.extend(export::write_omega_tables(&opts.out, &lab, mode)?);
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_export(opts: &DeriveOpts) -> Result<(), CliError> {
    let lab = load_lab(opts)?;
    let files = export::write_all(&opts.out, &lab)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn fmt_opt_u32(v: Option<u32>) -> String {
    v.map_or("unknown".to_string(), |k| k.to_string())
}

fn cmd_query(opts: &DeriveOpts, what: &QueryCmd) -> Result<(), CliError> {
    let lab = load_lab(opts)?;
    let t = &lab.tables;
    match what {
        QueryCmd::K { x } => {
            let x = parse_bits(x)?;
            println!("{}", fmt_opt_u32(t.k_of(&x, TimeBound::Unbounded)));
        }
        QueryCmd::M { x, t: bound } => {
            let x = parse_bits(x)?;
            let mode = opts.mode.single()?;
            let bound = bound.map_or(TimeBound::Unbounded, |v| TimeBound::At(v as u128));
            println!("{}", t.m_of(&x, bound, mode));
        }
        QueryCmd::Omega { n } => {
            let mode = opts.mode.single()?;
            println!("{}", t.omega(mode).digits(*n as usize));
        }
        QueryCmd::Tn { n } => {
            let mode = opts.mode.single()?;
            println!("{}", t.omega(mode).t_n(*n));
        }
        QueryCmd::Bb { n } => {
            let (out, time) = t.busy_beaver(*n)?;
            println!("out={out} time={time}");
        }
        QueryCmd::Kc { x, c } => {
            let x = parse_bits(x)?;
            let mode = opts.mode.single()?;
            println!("{}", m_soph(t, mode, &x, *c)?);
        }
        QueryCmd::Kprime { x } => {
            let x = parse_bits(x)?;
            let mode = opts.mode.single()?;
            println!("{}", mm_soph(t, mode, &x)?);
        }
        QueryCmd::D { x } => {
            let x = parse_bits(x)?;
            let mode = opts.mode.single()?;
            println!("{}", sumtest_d(mm_soph(t, mode, &x)?));
        }
        QueryCmd::Coarse { x } => {
            let x = parse_bits(x)?;
            let mode = opts.mode.single()?;
            let rec = lab
                .soph(mode)
                .record(&x)
                .ok_or_else(|| CliError::Failure(format!("no witness for {x} in the table")))?;
            println!("{}", rec.coarse);
        }
        QueryCmd::Soph { x, c } => {
            let x = parse_bits(x)?;
            let mode = opts.mode.single()?;
            let rec = lab
                .soph(mode)
                .record(&x)
                .ok_or_else(|| CliError::Failure(format!("no witness for {x} in the table")))?;
            let c = (*c).min(lab.config.c_max) as usize;
            println!("x = {x}");
            println!("K = {}", rec.k_value);
            println!("kC[{c}] = {}", rec.k_c[c]);
            println!("kPrime = {}", rec.k_prime);
            println!("d = {}", rec.sumtest_d);
            println!("coarse = {}", rec.coarse);
        }
        QueryCmd::Statistic { k } => {
            let mode = opts.mode.single()?;
            let stat = statistic_pk(t, mode, *k, lab.config.c_p)?;
            let (pow2, denom) = stat.implied_n();
            println!("support = {}", stat.support_len());
            println!("z = {}", stat.z);
            println!("impliedN = 2^{pow2}/{denom}");
        }
    }
    Ok(())
}

fn cmd_verify(opts: &DeriveOpts, suite: &str) -> Result<(), CliError> {
    let ids: Vec<LemmaId> = if suite.eq_ignore_ascii_case("all") {
        LemmaId::ALL.to_vec()
    } else {
        suite
            .split(',')
            .map(|s| {
                LemmaId::parse(s.trim())
                    .ok_or_else(|| CliError::Usage(format!("unknown lemma id {s:?}")))
            })
            .collect::<Result<_, _>>()?
    };

    // `--out report.json` names the report file, with artifacts beside it;
    // a directory receives `report.json` inside.
    let (dir, report_path) = if opts.out.extension().is_some_and(|e| e == "json") {
        let dir = opts.out.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        (dir, opts.out.clone())
    } else {
        (opts.out.clone(), opts.out.join("report.json"))
    };
    let dir_opts = DeriveOpts {
        out: dir,
        cmax: opts.cmax,
        mode: opts.mode,
        omega_cutoff: opts.omega_cutoff,
        cond_sample: opts.cond_sample,
        workers: opts.workers,
    };
    let mut lab = load_lab(&dir_opts)?;
    let report = run_suite(&mut lab, &ids)?;
    if let Ok(existing) = std::fs::read_to_string(&report_path) {
        let marker = format!("\"config_hash\": \"{}\"", report.config_hash);
        if existing.contains("\"config_hash\": ") && !existing.contains(&marker) {
            return Err(CliError::Failure(format!(
                "{} was written under a different config; refusing to mix artifacts",
                report_path.display()
            )));
        }
    }
    std::fs::write(&report_path, report.to_json()).map_err(|e| CliError::Failure(e.to_string()))?;
    for r in &report.reports {
        println!("{}: {:?}", r.lemma, r.status);
    }
    println!("wrote {}", report_path.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Enumerate { lmax, tmax, ocap, aux, workers, out } => {
            cmd_enumerate(*lmax, *tmax, *ocap, aux, *workers, out)
        }
        Command::Tables { opts } => cmd_tables(opts),
        Command::Query { opts, what } => cmd_query(opts, what),
        Command::Verify { opts, suite } => cmd_verify(opts, suite),
        Command::Export { opts } => cmd_export(opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
