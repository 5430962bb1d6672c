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

//! Command-line layer: configuration, point evaluations, sweeps and the
//! verification suites.

pub mod checks;
pub mod config;
pub mod reference;
pub mod tolerances;

use std::io::Write;
use std::path::Path;

use crate::epstein::{cell_energy_s, epstein_zeta, ewald_cell_energy, EwaldParams, ZetaContext};
use crate::trunc::{convergence_series, format_float, truncated_sum, ConvergenceSeries, TruncationRegion};
use crate::{wolf, Error, Result, UnitCell, Vector3};

pub use checks::{check_suite, CheckReport, Suite};
pub use config::{load_config, ConfigError, ConfigFile, GridSpec, Method, RunConfig};

/// Outcome classes of a command, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0} check(s) failed")]
    Checks(usize),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Checks(_) => 1,
            Failure::Numeric(_) | Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(err: ConfigError) -> Self {
        match err {
            ConfigError::Io { source, .. } => Failure::Io(source),
            ConfigError::Parse { .. } => Failure::Usage(err.to_string()),
            ConfigError::Invalid(e) => Failure::Numeric(e),
        }
    }
}

fn single_extent(config: &RunConfig) -> Result<f64> {
    config
        .grid
        .as_ref()
        .and_then(GridSpec::single)
        .ok_or_else(|| Error::InvalidArgument(format!("{} needs exactly one extent (--r)", config.method)))
}

/// Point value of the configured method.
pub fn evaluate(config: &RunConfig) -> Result<f64> {
    let cell = &config.cell;
    match config.method {
        Method::Ewald => {
            let params = match config.alpha {
                Some(alpha) => EwaldParams::for_tolerance(alpha, config.tol)?,
                None => EwaldParams::default_for(cell.basis(), config.tol)?,
            };
            ewald_cell_energy(cell, &params)
        }
        Method::Sphere => Ok(truncated_sum(cell, config.s, TruncationRegion::sphere(single_extent(config)?)?).value),
        Method::Cube => {
            let m = single_extent(config)?;
            if m.fract() != 0.0 || m < 1.0 {
                return Err(Error::InvalidArgument(format!("cube half-width must be a positive integer, got {m}")));
            }
            Ok(truncated_sum(cell, config.s, TruncationRegion::cube(m as u32)?).value)
        }
        Method::Wolf => wolf::wolf_undamped(cell, single_extent(config)?),
        Method::WolfDamped => wolf::wolf_damped(cell, single_extent(config)?, config.alpha.unwrap_or_default()),
        Method::Zeta => match config.p {
            Some(p) => epstein_zeta(&ZetaContext::from_offset(cell.basis(), &Vector3::from(p))?, config.s),
            None => cell_energy_s(cell, config.s),
        },
    }
}

/// `method=<m> s=<s> value=<v>`
pub fn energy_line(config: &RunConfig) -> Result<String> {
    let value = evaluate(config)?;
    Ok(format!("method={} s={} value={}", config.method, config.s, format_float(value)))
}

/// Sweep of the configured method over its grid.
pub fn converge(config: &RunConfig) -> Result<ConvergenceSeries> {
    let method = config
        .method
        .series_method()
        .ok_or_else(|| Error::InvalidArgument(format!("{} cannot be swept", config.method)))?;
    let grid = config
        .grid
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("a sweep needs a grid (--r)".into()))?
        .resolve(&config.cell, config.method)?;
    let alpha = if method == crate::trunc::SeriesMethod::WolfDamped { config.alpha } else { None };
    convergence_series(&config.cell, config.s, method, &grid, alpha)
}

/// CSV `alpha,bias` of damped biases over `alphas` from sweeps up to `r_max`.
pub fn sweep_alpha(cell: &UnitCell, alphas: &[f64], r_max: f64) -> Result<String> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no alpha values given".into()));
    }
    let mut out = String::from("alpha,bias\n");
    for &alpha in alphas {
        let bias = wolf::damped_bias(cell, alpha, r_max)?;
        out.push_str(&format!("{},{}\n", format_float(alpha), format_float(bias)));
    }
    Ok(out)
}

/// Writes `text` to `path`, or to `stdout` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Runs the named suites, or all of them, printing each report.
pub fn run_checks(suites: &[Suite], stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let suites: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let mut failed = 0;
    for suite in suites {
        let report = check_suite(suite)?;
        for line in report.lines() {
            writeln!(stdout, "{line}")?;
        }
        failed += report.checks.iter().filter(|c| !c.pass).count();
    }
    writeln!(stdout, "{}", if failed == 0 { "PASS" } else { "FAIL" })?;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}
