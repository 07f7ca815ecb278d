use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qlf_core::laws::{GenConfig, LawId, LawReport, SuiteConfig, Verdict};
use qlf_core::splitting::TowerCaps;
use serde::Serialize;

use qlf_cli::commands::{self, report_code, AuxSpec, CliError, FormSpec, Summary};

/// Invariants of quasilinear p-forms over F_p(t_1, ..., t_n) and finite
/// purely inseparable extensions of it.
#[derive(Debug, Parser)]
#[command(name = "qlf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Defect index, norm degree and the standard splitting pattern.
    Invariants(FormArgs),
    /// The invariants plus every level of the standard splitting tower.
    Tower(FormArgs),
    /// Evaluate one law on the given form.
    Check(CheckArgs),
    /// Evaluate laws on seeded random forms.
    RandCheck(RandArgs),
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Comma-separated transcendental variables.
    #[arg(long, default_value = "")]
    vars: String,
    /// Adjoin a p-th root: NAME=EXPR (repeatable, applied in order).
    #[arg(long = "adjoin", value_name = "NAME=EXPR")]
    adjoin: Vec<String>,
}

#[derive(Debug, Args)]
struct CapArgs {
    /// Most transcendentals a splitting tower may use.
    #[arg(long, default_value_t = TowerCaps::default().max_vars)]
    max_vars: usize,
    /// Most p-th roots a splitting tower may use.
    #[arg(long, default_value_t = TowerCaps::default().max_roots)]
    max_roots: usize,
}

impl CapArgs {
    fn caps(&self) -> TowerCaps {
        TowerCaps {
            max_vars: self.max_vars,
            max_roots: self.max_roots,
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Emit JSON (the default).
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// Emit a human-readable table instead of JSON.
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Args)]
struct FormArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Coefficients: `a, b, c`, `<a, b, c>` or `<<a, b>>`.
    #[arg(long)]
    form: String,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    output: OutputArgs,
}

impl FormArgs {
    fn spec(&self) -> Result<FormSpec, CliError> {
        commands::parse_form_spec(self.field.p, &self.field.vars, &self.field.adjoin, &self.form)
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Law name, e.g. HOFFMANN_BOUND.
    law: String,
    #[command(flatten)]
    form: FormArgs,
    /// Radicand a for laws over F(a^(1/p)) (repeatable).
    #[arg(long)]
    radicand: Vec<String>,
    /// Scalar for laws comparing φ with a multiple of a subform.
    #[arg(long)]
    scalar: Option<String>,
    /// Second form ψ for laws about pairs.
    #[arg(long)]
    partner: Option<String>,
    /// Which coefficient to drop, or how many, reduced modulo the valid range.
    #[arg(long)]
    choice: Option<u64>,
    /// Seed for auxiliary data not given explicitly.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct RandArgs {
    /// Laws to run (repeatable); all of them when omitted.
    #[arg(long = "law")]
    laws: Vec<String>,
    /// Characteristic.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Number of transcendental variables t, u, v, ...
    #[arg(long, default_value_t = 2)]
    vars: usize,
    #[arg(long, default_value_t = 2)]
    dim_min: usize,
    #[arg(long, default_value_t = 4)]
    dim_max: usize,
    /// Total degree bound for coefficients.
    #[arg(long, default_value_t = 2)]
    max_degree: u32,
    /// Term-count bound for coefficients.
    #[arg(long, default_value_t = 3)]
    max_terms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Print one JSON line per trial before the summary.
    #[arg(long)]
    emit_trials: bool,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qlf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let line = serde_json::to_string(value).map_err(|e| CliError::Internal(e.to_string()))?;
    println!("{line}");
    Ok(())
}

fn parse_law(name: &str) -> Result<LawId, CliError> {
    name.parse()
        .map_err(|e: qlf_core::laws::LawError| CliError::Input(e.to_string()))
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Invariants(args) => {
            let inv = commands::invariants(&args.spec()?, args.caps.caps())?;
            if args.output.table {
                print!("{}", commands::invariants_table(&inv));
            } else {
                print_json(&inv)?;
            }
            Ok(0)
        }
        Command::Tower(args) => {
            let out = commands::tower(&args.spec()?, args.caps.caps())?;
            if args.output.table {
                print!("{}", commands::tower_table(&out));
            } else {
                print_json(&out)?;
            }
            Ok(0)
        }
        Command::Check(args) => {
            let law = parse_law(&args.law)?;
            let spec = args.form.spec()?;
            let aux = AuxSpec {
                radicands: args.radicand,
                scalar: args.scalar,
                partner: args.partner,
                choice: args.choice,
            };
            let (report, verdict) = commands::check(law, &spec, &aux, args.seed, args.form.caps.caps())?;
            if args.form.output.table {
                print!("{}", commands::reports_table(std::slice::from_ref(&report)));
            } else {
                print_json(&report)?;
            }
            if let Verdict::Skipped(msg) = &verdict {
                eprintln!("qlf: skipped: {msg}");
            }
            Ok(report_code(std::slice::from_ref(&report)))
        }
        Command::RandCheck(args) => {
            let laws = if args.laws.is_empty() {
                LawId::ALL.to_vec()
            } else {
                args.laws.iter().map(|l| parse_law(l)).collect::<Result<_, _>>()?
            };
            let suite = SuiteConfig {
                gen: GenConfig {
                    p: args.p,
                    vars: args.vars,
                    dim_min: args.dim_min,
                    dim_max: args.dim_max,
                    max_degree: args.max_degree,
                    max_terms: args.max_terms,
                    seed: args.seed,
                },
                trials: args.trials,
                caps: args.caps.caps(),
            };
            let run = commands::rand_check(&laws, &suite)?;
            if args.emit_trials {
                let mut out = std::io::stdout().lock();
                for record in &run.records {
                    let line =
                        serde_json::to_string(record).map_err(|e| CliError::Internal(e.to_string()))?;
                    writeln!(out, "{line}").map_err(|e| CliError::Internal(e.to_string()))?;
                }
            }
            let failed = run.reports.iter().any(LawReport::failed);
            if args.output.table {
                print!("{}", commands::reports_table(&run.reports));
            } else {
                print_json(&Summary {
                    p: args.p,
                    seed: args.seed,
                    trials: args.trials,
                    failed,
                    reports: &run.reports,
                })?;
            }
            // Skipped trials in a suite are reported, not fatal.
            Ok(if failed { 1 } else { 0 })
        }
    }
}
