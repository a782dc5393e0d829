use clap::{Args, Parser, Subcommand};
use qnm_cli::commands::{self, PotentialArgs};
use qnm_cli::output::emit;
use qnm_cli::{CliError, Result, RunConfig};
use qnm_core::chart::PotentialGrade;
use std::path::PathBuf;
use std::process::ExitCode;

/// Barrier-top resonances of de Sitter black holes.
#[derive(Parser, Debug)]
#[command(name = "qnm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Horizon radii, surface gravities and the barrier top.
    Horizons,
    /// Potential samples on the real tortoise axis.
    Potential(PotentialFlags),
    /// Taylor data of the potential at the barrier top.
    Barrier,
    /// Birkhoff normal form coefficients.
    Bnf,
    /// Pseudopole lattice.
    Qnm,
    /// Runs the verification suites; exit status 1 when any fails.
    Verify,
    /// Prints the effective configuration in config-file form.
    Config,
}

#[derive(Args, Debug)]
struct PotentialFlags {
    /// alpha, alpha_prime, dirac_q, schrodinger_plus, schrodinger_minus, dsrn_semiclassical, dss_semiclassical
    #[arg(long)]
    grade: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    xmin: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    xmax: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
}

/// Flags mirroring the config keys; each one overrides the file.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Flat `key = value` file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Mass M
    #[arg(long, global = true)]
    mass: Option<String>,
    /// Charge Q (must be 0 for dss)
    #[arg(long, global = true)]
    charge: Option<String>,
    /// Cosmological constant
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<String>,
    /// dsrn or dss
    #[arg(long, global = true)]
    model: Option<String>,
    /// Highest overtone k
    #[arg(long, global = true)]
    kmax: Option<String>,
    /// Smallest angular number l
    #[arg(long, global = true)]
    lmin: Option<String>,
    /// Largest angular number l
    #[arg(long, global = true)]
    lmax: Option<String>,
    /// Lattice order, 0 to 6
    #[arg(long, global = true)]
    order: Option<String>,
    /// Keep k <= truncation * l, or none
    #[arg(long, global = true)]
    truncation: Option<String>,
    /// Collocation points for complex scaling
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Complex scaling angle
    #[arg(long, global = true)]
    theta: Option<String>,
    /// Jost evaluation: strip or compact
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Cutoff |x| for compact mode
    #[arg(long, global = true)]
    xc: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file, - for stdout
    #[arg(long, global = true)]
    out: Option<String>,
    /// Significant digits
    #[arg(long, global = true)]
    precision: Option<String>,
    /// all or a comma-separated list of suites
    #[arg(long, global = true)]
    suite: Option<String>,
    /// none or zero_b02
    #[arg(long, global = true)]
    mutation: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("mass", &self.mass),
            ("charge", &self.charge),
            ("lambda", &self.lambda),
            ("model", &self.model),
            ("kmax", &self.kmax),
            ("lmin", &self.lmin),
            ("lmax", &self.lmax),
            ("order", &self.order),
            ("truncation", &self.truncation),
            ("grid", &self.grid),
            ("theta", &self.theta),
            ("mode", &self.mode),
            ("xc", &self.xc),
            ("format", &self.format),
            ("out", &self.out),
            ("precision", &self.precision),
            ("suite", &self.suite),
            ("mutation", &self.mutation),
        ]
    }

    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.merge_text(&text)?;
        }
        for (key, v) in self.pairs() {
            if let Some(v) = v {
                cfg.set(key, v)
                    .map_err(|e| CliError::Config(format!("--{key}: {e}")))?;
            }
        }
        Ok(cfg)
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = cli.opts.resolve()?;
    cfg.validate()?;
    let out = cfg.out.as_deref();
    let report = match &cli.command {
        Command::Horizons => commands::horizons(&cfg)?,
        Command::Potential(p) => {
            let grade = p
                .grade
                .as_deref()
                .map(str::parse::<PotentialGrade>)
                .transpose()?;
            let args = PotentialArgs {
                grade,
                h: p.h,
                xmin: p.xmin,
                xmax: p.xmax,
                points: p.points,
            };
            commands::potential(&cfg, &args)?
        }
        Command::Barrier => commands::barrier(&cfg)?,
        Command::Bnf => commands::bnf(&cfg)?,
        Command::Qnm => commands::qnm(&cfg)?,
        Command::Config => {
            emit(&cfg.to_string(), out)?;
            return Ok(true);
        }
        Command::Verify => {
            let v = commands::verify(&cfg)?;
            for o in &v.outcomes {
                eprintln!(
                    "{:<12} {}  {}",
                    o.suite.to_string(),
                    if o.pass { "PASS" } else { "FAIL" },
                    o.summary
                );
            }
            emit(&v.report.render(cfg.format), out)?;
            if !v.failures.is_empty() {
                eprintln!("{}", serde_json::json!({ "failures": v.failures }));
                return Ok(false);
            }
            return Ok(true);
        }
    };
    emit(&report.render(cfg.format), out)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
