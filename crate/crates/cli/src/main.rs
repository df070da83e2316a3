//! `rr-ea`: theory evaluation, simulation and comparison tables for the
//! (μ+λ) EA with 1-Bit-Swap on Royal Roads.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid arguments,
//! 3 output not writable.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use royal_road::engine::TieRule;
use royal_road::experiments::{
    self, format_sig6, table2_spec, ExperimentSpec, GridRow, MissPolicy, SummaryRow,
    TABLE2_DEFAULT_RUNS, TABLE2_GENERATIONS,
};
use royal_road::theory::{theory_report, ModelParams, TheoryReport};
use royal_road::{Error, InitPolicy, RoyalRoadLayout};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "rr-ea",
    version,
    about = "Royal Roads (mu+lambda) EA with 1-Bit-Swap: theory and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact, approximate and asymptotic expected hitting times.
    Theory(TheoryArgs),
    /// Seeded replicate runs of one configuration; per-replicate CSV.
    Simulate(SimulateArgs),
    /// Theory against simulation on the 12-row comparison grid.
    Compare(CompareArgs),
    /// Theory values along one parameter axis.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// String length; must equal K * M.
    #[arg(long)]
    n: Option<usize>,
    /// Number of bins.
    #[arg(long = "k", value_name = "K")]
    bins: usize,
    /// Bin size (even).
    #[arg(long = "m", value_name = "M")]
    bin_size: usize,
    #[arg(long)]
    mu: usize,
    #[arg(long)]
    lambda: usize,
}

impl ModelArgs {
    fn layout(&self) -> Result<RoyalRoadLayout, Error> {
        match self.n {
            Some(n) => RoyalRoadLayout::with_length(n, self.bins, self.bin_size),
            None => RoyalRoadLayout::new(self.bins, self.bin_size),
        }
    }

    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.layout()?, self.mu, self.lambda)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Master seed.
    #[arg(long, env = "RR_EA_SEED")]
    seed: Option<u64>,
    /// Maximum concurrent replicates; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Initial population.
    #[arg(long, value_enum, default_value_t = InitArg::HalfOnes)]
    init: InitArg,
    /// Ordering of equal-fitness candidates in replacement.
    #[arg(long, value_enum, default_value_t = TieArg::OffspringFirst)]
    ties: TieArg,
    /// Treatment of runs that never hit within the budget.
    #[arg(long, value_enum, default_value_t = MissArg::Exclude)]
    misses: MissArg,
}

impl RunArgs {
    fn apply(&self, spec: &mut ExperimentSpec) {
        spec.workers = self.workers;
        spec.init_policy = match self.init {
            InitArg::HalfOnes => InitPolicy::HalfOnes,
            InitArg::Random => InitPolicy::Random,
        };
        spec.tie_rule = match self.ties {
            TieArg::OffspringFirst => TieRule::OffspringFirst,
            TieArg::Uniform => TieRule::Uniform,
        };
        spec.miss_policy = match self.misses {
            MissArg::Exclude => MissPolicy::Exclude,
            MissArg::Budget => MissPolicy::CountAsBudget,
        };
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of replicates.
    #[arg(long, default_value_t = 20)]
    runs: usize,
    /// Generation budget per replicate.
    #[arg(long, default_value_t = TABLE2_GENERATIONS)]
    gens: usize,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, default_value_t = TABLE2_DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = TABLE2_GENERATIONS)]
    gens: usize,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Parameter to vary.
    #[arg(long, value_enum)]
    axis: Axis,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    values: Vec<usize>,
    /// Fixed string length (ignored for the n axis).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "m", default_value_t = 8)]
    bin_size: usize,
    /// Fixed mu; for the mu axis mu is the axis value.
    #[arg(long)]
    mu: Option<usize>,
    /// Fixed lambda; when absent lambda follows mu.
    #[arg(long)]
    lambda: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitArg {
    HalfOnes,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TieArg {
    OffspringFirst,
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MissArg {
    Exclude,
    Budget,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Axis {
    Mu,
    Lambda,
    N,
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Output(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Output(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Output(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => Failure::Usage(m),
            Error::Io(e) => Failure::Output(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Theory(args) => cmd_theory(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

/// Opens the data sink before any computation so an unwritable path fails
/// fast.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::Output(format!("cannot write {}: {e}", p.display()))),
    }
}

fn write_failure(e: io::Error) -> Failure {
    Failure::Output(e.to_string())
}

const THEORY_HEADER: &str = "n,K,M,mu,lambda,exact,approx,asymptotic_scale";

fn theory_csv_line(params: &ModelParams, report: &TheoryReport) -> String {
    let layout = &params.layout;
    format!(
        "{},{},{},{},{},{},{},{}",
        layout.n(),
        layout.bins(),
        layout.bin_size(),
        params.mu,
        params.lambda,
        format_sig6(report.exact),
        report
            .approx
            .map(format_sig6)
            .unwrap_or_else(|| "unavailable".to_owned()),
        format_sig6(report.asymptotic_scale),
    )
}

fn write_theory(
    out: &mut dyn Write,
    format: Format,
    rows: &[(ModelParams, TheoryReport)],
) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{THEORY_HEADER}")?;
            for (p, r) in rows {
                writeln!(out, "{}", theory_csv_line(p, r))?;
            }
        }
        Format::Pretty => {
            for (p, r) in rows {
                let l = &p.layout;
                writeln!(
                    out,
                    "n={} K={} M={} mu={} lambda={}",
                    l.n(),
                    l.bins(),
                    l.bin_size(),
                    p.mu,
                    p.lambda
                )?;
                writeln!(out, "  exact            {}", format_sig6(r.exact))?;
                match r.approx {
                    Some(a) => writeln!(out, "  approx           {}", format_sig6(a))?,
                    None => writeln!(
                        out,
                        "  approx           unavailable (needs mu >= 2 and M >= 4)"
                    )?,
                }
                write!(
                    out,
                    "  asymptotic_scale {}",
                    format_sig6(r.asymptotic_scale)
                )?;
                if r.mu_equals_lambda {
                    writeln!(out)?;
                } else {
                    writeln!(out, "  (order statement assumes mu = lambda)")?;
                }
            }
        }
    }
    out.flush()
}

fn cmd_theory(args: TheoryArgs) -> Result<(), Failure> {
    let params = args.model.params()?;
    let report = theory_report(&params)?;
    let mut out = open_output(args.output.out.as_deref())?;
    write_theory(&mut out, args.output.format, &[(params, report)]).map_err(write_failure)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let params = args.model.params()?;
    let row = GridRow::new(params.layout, params.mu, params.lambda)?;
    let mut spec = ExperimentSpec::new(vec![row], args.runs, args.gens, args.run.seed());
    args.run.apply(&mut spec);
    spec.validate()?;

    let mut out = open_output(args.output.out.as_deref())?;
    let results = spec.run_all()?;
    let theory = theory_report(&params)?;
    let summary = experiments::summarize(&results[0], &theory, &row, &spec)?;

    match args.output.format {
        Format::Csv => experiments::write_raw_csv(&spec, &results, &mut out)?,
        Format::Pretty => {
            for (i, run) in results[0].iter().enumerate() {
                let hit = run.hit_generation.map_or("-".to_owned(), |t| t.to_string());
                writeln!(
                    out,
                    "replicate {i:>4}  hit {hit:>6}  best {}",
                    run.final_best
                )
                .map_err(write_failure)?;
            }
            out.flush().map_err(write_failure)?;
        }
    }
    let line = summary_line(&summary);
    // Data already went to stdout when there is no output file.
    if args.output.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn summary_line(s: &SummaryRow) -> String {
    let empirical = match s.empirical {
        Some(e) => format!(
            "mean {} std {} ci95 {}",
            format_sig6(e.mean),
            format_sig6(e.std),
            format_sig6(e.ci95_half_width)
        ),
        None => "no hits".to_owned(),
    };
    format!(
        "hits {}/{}  {empirical}  mean(misses=budget) {}  exact {}",
        s.hits,
        s.runs,
        format_sig6(s.mean_with_misses_at_budget),
        format_sig6(s.theory.exact)
    )
}

fn cmd_compare(args: CompareArgs) -> Result<(), Failure> {
    let mut spec = table2_spec(args.runs, args.run.seed());
    spec.max_generations = args.gens;
    args.run.apply(&mut spec);
    spec.validate()?;

    let mut out = open_output(args.output.out.as_deref())?;
    let rows = experiments::table2_experiment(&spec)?;
    match args.output.format {
        Format::Csv => experiments::write_summary_csv(&rows, &mut out)?,
        Format::Pretty => write_compare_pretty(&mut out, &rows).map_err(write_failure)?,
    }
    Ok(())
}

fn write_compare_pretty(out: &mut dyn Write, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(
        out,
        "{:>4} {:>3} {:>2} {:>3} {:>6} {:>10} {:>10} {:>10} {:>10} {:>9} {:>9} {:>9}",
        "n",
        "K",
        "M",
        "mu",
        "lambda",
        "exact",
        "approx",
        "asym",
        "emp.mean",
        "ci95",
        "hits",
        "mean*"
    )?;
    for s in rows {
        let l = &s.row.layout;
        let (mean, ci) = match s.empirical {
            Some(e) => (format_sig6(e.mean), format_sig6(e.ci95_half_width)),
            None => ("-".to_owned(), "-".to_owned()),
        };
        writeln!(
            out,
            "{:>4} {:>3} {:>2} {:>3} {:>6} {:>10} {:>10} {:>10} {:>10} {:>9} {:>9} {:>9}",
            l.n(),
            l.bins(),
            l.bin_size(),
            s.row.mu,
            s.row.lambda,
            format_sig6(s.theory.exact),
            s.theory
                .approx
                .map(format_sig6)
                .unwrap_or_else(|| "-".to_owned()),
            format_sig6(s.theory.asymptotic_scale),
            mean,
            ci,
            format!("{}/{}", s.hits, s.runs),
            format_sig6(s.mean_with_misses_at_budget),
        )?;
    }
    writeln!(
        out,
        "mean* counts runs without a hit as the full budget; ci95 uses the normal approximation"
    )?;
    out.flush()
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.values.is_empty() {
        return Err(Failure::Usage(
            "sweep needs at least one value in --values".to_owned(),
        ));
    }
    let mut rows = Vec::with_capacity(args.values.len());
    for &v in &args.values {
        let (n, mu, lambda) = match args.axis {
            Axis::Mu => (args.n, Some(v), args.lambda.or(Some(v))),
            Axis::Lambda => (args.n, args.mu, Some(v)),
            Axis::N => (Some(v), args.mu, args.lambda.or(args.mu)),
        };
        let n = n.ok_or_else(|| Failure::Usage("--n is required".to_owned()))?;
        let mu = mu.ok_or_else(|| Failure::Usage("--mu is required".to_owned()))?;
        let lambda = lambda.ok_or_else(|| Failure::Usage("--lambda is required".to_owned()))?;
        if args.bin_size == 0 || n % args.bin_size != 0 {
            return Err(Failure::Usage(format!(
                "n = {n} is not a multiple of M = {}",
                args.bin_size
            )));
        }
        let layout = RoyalRoadLayout::with_length(n, n / args.bin_size, args.bin_size)?;
        let params = ModelParams::new(layout, mu, lambda)?;
        rows.push((params, theory_report(&params)?));
    }
    let mut out = open_output(args.output.out.as_deref())?;
    write_theory(&mut out, args.output.format, &rows).map_err(write_failure)
}
