//! `corrfn` command-line front end.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corrfn::observables::{curves, noninteracting_demo};
use corrfn::reference::{ion_label, parse_ion};
use corrfn::report::{self, ReportRow};
use corrfn::surface_sampler::{sample_surface, SamplerSettings, SurfaceSpec};
use corrfn::variational::{optimize, scan_table, solve_charges, IonState, OptimizationCase};
use corrfn::Error;

use config::{Format, RunConfig};

#[derive(Parser)]
#[command(name = "corrfn", version, about = "Correction-function solver for heliumlike ions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format (overrides the config file).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateArg {
    Singlet,
    Triplet,
}

impl From<StateArg> for IonState {
    fn from(s: StateArg) -> Self {
        match s {
            StateArg::Singlet => IonState::GroundSinglet,
            StateArg::Triplet => IonState::ExcitedTriplet,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    FixedZ,
    Equal,
    Independent,
}

impl From<CaseArg> for OptimizationCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::FixedZ => OptimizationCase::FixedZ,
            CaseArg::Equal => OptimizationCase::EqualOpt,
            CaseArg::Independent => OptimizationCase::IndependentOpt,
        }
    }
}

fn ion_arg(s: &str) -> Result<u32, String> {
    parse_ion(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct Target {
    /// Ion symbol (H-, He, Li+, ...) or nuclear charge.
    #[arg(long, value_parser = ion_arg)]
    ion: u32,
    #[arg(long, value_enum, default_value = "singlet")]
    state: StateArg,
    #[arg(long, value_enum, default_value = "independent")]
    case: CaseArg,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one ion and write its report.
    Solve(Target),
    /// Reproduce the full energy table.
    Table {
        /// Comma-separated ion list; all ten by default.
        #[arg(long, value_delimiter = ',', value_parser = ion_arg)]
        ions: Vec<u32>,
    },
    /// Export χ, the r12 densities and the correlation hole.
    Curves(Target),
    /// Lowest χ states without electron repulsion.
    Demo {
        #[arg(long, default_value_t = 1)]
        z: u32,
    },
    /// Sample a constant interaction potential surface as JSON lines.
    Sample {
        #[arg(short = 'n', long = "particles", default_value_t = 2)]
        n: usize,
        #[arg(short = 'p', long)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Radius of the ball the first particle is drawn from, Bohr.
        #[arg(long)]
        ball_radius: Option<f64>,
        /// Write to this file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_) | Error::InvalidAnsatz(_) | Error::InvalidGrid(_) | Error::Unsupported(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

struct Context {
    run: RunConfig,
    out_dir: PathBuf,
    format: Format,
}

impl Context {
    fn new(common: &Common) -> Result<Self, Failure> {
        let run = RunConfig::load(common.config.as_deref())?;
        let out_dir = common.out.clone().unwrap_or_else(|| run.output_dir.clone());
        let format = common.format.unwrap_or(run.format);
        Ok(Self { run, out_dir, format })
    }

    fn output(&self, name: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(self.out_dir.join(name))
    }

    fn write_rows(&self, stem: &str, rows: &[ReportRow]) -> Result<PathBuf, Failure> {
        let path = self.output(&format!("{stem}.{}", self.format.extension()))?;
        let file = fs::File::create(&path)?;
        match self.format {
            Format::Json => report::write_json(rows, file)?,
            Format::Csv => report::write_csv(rows, file)?,
        }
        Ok(path)
    }
}

fn cell_name(z: u32, state: IonState, case: OptimizationCase) -> String {
    format!("z{z}_{}_{}", state.key(), case.key())
}

fn opt5(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into())
}

fn cmd_solve(ctx: &Context, t: &Target) -> CmdResult {
    let (state, case) = (t.state.into(), t.case.into());
    let result = optimize(t.ion, state, case, &ctx.run.pipeline()?)?;
    let row = ReportRow::from_result(&result);
    let path = ctx.write_rows(&format!("solve_{}", cell_name(t.ion, state, case)), &[row.clone()])?;
    println!("{} {} {}", ion_label(t.ion), state.key(), case.key());
    println!("  zeta1 = {:.5}  zeta2 = {:.5}", result.zeta1, result.zeta2);
    println!("  E     = {:.5}", result.energy);
    println!("  E_HF  = {}  (E - E_HF = {})", opt5(row.e_hf_ref), opt5(row.delta_hf));
    println!("  E_CI  = {}  (E - E_CI = {})", opt5(row.e_ci_ref), opt5(row.delta_ci));
    println!("  evaluations = {}", result.evaluations);
    println!("report: {}", path.display());
    Ok(())
}

fn cmd_table(ctx: &Context, ions: &[u32]) -> CmdResult {
    let ions: Vec<u32> = if ions.is_empty() { (1..=10).collect() } else { ions.to_vec() };
    let entries = scan_table(
        &ions,
        &[IonState::GroundSinglet, IonState::ExcitedTriplet],
        &[OptimizationCase::FixedZ, OptimizationCase::EqualOpt, OptimizationCase::IndependentOpt],
        &ctx.run.pipeline()?,
    );
    let rows: Vec<ReportRow> = entries.iter().map(ReportRow::from_entry).collect();
    let text = report::render_text(&rows);
    print!("{text}");
    let path = ctx.write_rows("table", &rows)?;
    fs::write(ctx.output("table.txt")?, &text)?;
    println!("report: {}", path.display());
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        return Err(Failure { code: 1, message: format!("{failed} table cell(s) failed") });
    }
    Ok(())
}

fn cmd_curves(ctx: &Context, t: &Target) -> CmdResult {
    let (state, case) = (t.state.into(), t.case.into());
    let pipeline = ctx.run.pipeline()?;
    let result = optimize(t.ion, state, case, &pipeline)?;
    let (table, sol) = solve_charges(t.ion, state, result.zeta1, result.zeta2, &pipeline)?;
    let c = curves(&table, &sol)?;
    let path = ctx.output(&format!("curves_{}.csv", cell_name(t.ion, state, case)))?;
    c.write_csv(fs::File::create(&path)?)?;
    let (is, ichi, ihole) = c.integrals();
    println!("{} {} {}  E = {:.5}", ion_label(t.ion), state.key(), case.key(), sol.energy);
    println!("  int s = {is:.10}  int chi s chi = {ichi:.10}  int hole = {ihole:.3e}");
    println!(
        "  hole depth = {:.6e}  per unit Zp = {:.6e}  max |chi - 1| = {:.6e}",
        c.hole_depth(),
        c.reduced_hole_depth(),
        c.max_chi_deviation()
    );
    println!("curves: {}", path.display());
    Ok(())
}

fn cmd_demo(ctx: &Context, z: u32) -> CmdResult {
    let pipeline = ctx.run.pipeline()?;
    let states = noninteracting_demo(
        z,
        &pipeline.grid(z)?,
        &pipeline.coefficients,
        &pipeline.solver,
    )?;
    println!("Z = {z}, electron repulsion off, phi = 1s({z})^2");
    println!("{:>5} {:>12} {:>12} {:>6}", "state", "E", "exact", "nodes");
    for (k, s) in states.iter().enumerate() {
        println!(
            "{:>5} {:>12.5} {:>12.5} {:>6}",
            k,
            s.solution.energy,
            s.exact,
            s.solution.nodes()
        );
    }
    Ok(())
}

fn cmd_sample(
    n: usize,
    p: f64,
    count: usize,
    seed: u64,
    ball_radius: Option<f64>,
    output: Option<&Path>,
) -> CmdResult {
    let mut settings = SamplerSettings::default();
    if let Some(r) = ball_radius {
        settings.ball_radius = r;
    }
    let set = sample_surface(SurfaceSpec::new(n, p)?, count, seed, &settings)?;
    match output {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            set.write_jsonl(std::io::BufWriter::new(fs::File::create(path)?))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            set.write_jsonl(&mut lock)?;
            lock.flush()?;
        }
    }
    eprintln!(
        "{} samples, {} attempts, rejection rate {:.4}",
        set.samples.len(),
        set.attempts,
        set.rejection_rate()
    );
    Ok(())
}

fn run(cli: &Cli) -> CmdResult {
    let ctx = Context::new(&cli.common)?;
    match &cli.command {
        Command::Solve(t) => cmd_solve(&ctx, t),
        Command::Table { ions } => cmd_table(&ctx, ions),
        Command::Curves(t) => cmd_curves(&ctx, t),
        Command::Demo { z } => cmd_demo(&ctx, *z),
        Command::Sample { n, p, count, seed, ball_radius, output } => {
            cmd_sample(*n, *p, *count, *seed, *ball_radius, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
