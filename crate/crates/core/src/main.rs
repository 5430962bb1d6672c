// Copyright 2026 The madelung authors
//
// Licensed under the Apache license, version 2.0 (the "license");
// you may not use this file except in compliance with the license.
// You may obtain a copy of the license at
//
//     http://www.apache.org/licenses/license-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the license is distributed on an "as is" basis,
// without warranties or conditions of any kind, either express or implied.
// See the license for the specific language governing permissions and
// limitations under the license.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use madelung::harness::config::{read_config_file, ConfigFile};
use madelung::harness::{self, Failure, GridSpec, Method, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "madelung", version, about = "Lattice sums, Ewald and Wolf energies of periodic point charges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one energy value.
    Energy(RunArgs),
    /// Write a convergence series as CSV.
    Converge(RunArgs),
    /// Write damped-method biases over several α as CSV.
    SweepAlpha(RunArgs),
    /// Evaluate the continued lattice zeta function Z_Q(s, p).
    Zeta(RunArgs),
    /// Run verification suites.
    Check {
        /// Suite to run; all suites when omitted.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    s: Option<f64>,
    /// Damping or splitting parameter; a comma-separated list for sweep-alpha.
    #[arg(long)]
    alpha: Option<String>,
    /// Extent grid: `min:max:count`, one value or a comma-separated list.
    #[arg(long)]
    r: Option<String>,
    /// Fractional offset `x,y,z` (zeta only).
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force single-threaded evaluation.
    #[arg(long)]
    serial: bool,
    /// Target accuracy of Ewald sums.
    #[arg(long)]
    tol: Option<f64>,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("cannot parse {what} '{text}'"))))
        .collect()
}

impl RunArgs {
    /// Merges the flags over the configuration file, if any.
    fn config_file(&self, default_method: Method, alpha_list: bool) -> Result<ConfigFile, Failure> {
        let mut file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => ConfigFile::default(),
        };
        if let Some(preset) = &self.preset {
            file.preset = Some(preset.clone());
            file.cell = None;
        }
        if let Some(method) = &self.method {
            file.method = Some(method.parse()?);
        }
        file.method = file.method.or(Some(default_method));
        if self.s.is_some() {
            file.s = self.s;
        }
        if let Some(alpha) = &self.alpha {
            if !alpha_list {
                file.alpha = Some(alpha.trim().parse().map_err(|_| usage(format!("cannot parse alpha '{alpha}'")))?);
            }
        }
        if let Some(r) = &self.r {
            file.grid = Some(r.parse::<GridSpec>()?);
        }
        if let Some(p) = &self.p {
            let v = parse_list(p, "offset")?;
            let p: [f64; 3] = v.try_into().map_err(|_| usage("the offset needs three components"))?;
            file.p = Some(p);
        }
        if self.out.is_some() {
            file.out = self.out.clone();
        }
        if self.tol.is_some() {
            file.tol = self.tol;
        }
        Ok(file)
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Energy(args) => {
            let config = RunConfig::from_file(&args.config_file(Method::Ewald, false)?)?;
            let line = harness::energy_line(&config)?;
            harness::emit(&(line + "\n"), config.out.as_deref(), stdout)?;
        }
        Command::Zeta(args) => {
            let mut file = args.config_file(Method::Zeta, false)?;
            if file.method != Some(Method::Zeta) {
                return Err(usage("the zeta command only evaluates the zeta method"));
            }
            file.p = file.p.or(Some([0.0; 3]));
            let config = RunConfig::from_file(&file)?;
            let line = harness::energy_line(&config)?;
            harness::emit(&(line + "\n"), config.out.as_deref(), stdout)?;
        }
        Command::Converge(args) => {
            let config = RunConfig::from_file(&args.config_file(Method::Wolf, false)?)?;
            let series = harness::converge(&config)?;
            harness::emit(&series.to_csv(), config.out.as_deref(), stdout)?;
        }
        Command::SweepAlpha(args) => {
            let mut file = args.config_file(Method::WolfDamped, true)?;
            let alphas = match (&args.alpha, file.alpha) {
                (Some(text), _) => parse_list(text, "alpha")?,
                (None, Some(a)) => vec![a],
                (None, None) => return Err(usage("sweep-alpha needs --alpha")),
            };
            let r_max = match file.grid.take() {
                None => 40.0,
                Some(grid) => grid.single().ok_or_else(|| usage("sweep-alpha takes a single R_max in --r"))?,
            };
            file.method = Some(Method::WolfDamped);
            file.alpha = Some(alphas[0]);
            let config = RunConfig::from_file(&file)?;
            let csv = harness::sweep_alpha(&config.cell, &alphas, r_max)?;
            harness::emit(&csv, config.out.as_deref(), stdout)?;
        }
        Command::Check { suite, .. } => {
            let suites = suite.iter().map(|s| s.parse::<Suite>()).collect::<Result<Vec<_>, _>>()?;
            harness::run_checks(&suites, stdout)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let serial = match &cli.command {
        Command::Energy(a) | Command::Converge(a) | Command::SweepAlpha(a) | Command::Zeta(a) => a.serial,
        Command::Check { serial, .. } => *serial,
    };
    let threads = if serial { 1 } else { 0 };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    let mut stdout = std::io::stdout();
    let outcome = pool.install(|| execute(cli.command, &mut stdout));
    let _ = stdout.flush();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(n)) => {
            eprintln!("madelung: {n} check(s) failed");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("madelung: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
