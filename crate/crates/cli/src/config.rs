//! Flat `key = value` configuration files and their merge order.
//!
//! Precedence, strongest first: explicit command-line flag, environment
//! variable (`KITAEV_ECHO_*`, handled by clap), config file, built-in
//! default. Config keys are the long flag names (`n`, `hf`, `k-range`,
//! ...); `#` starts a comment.

use crate::{
    CliError, CliResult, EchoArgs, KickedArgs, MomdistArgs, ScalingArgs, SweepArgs, VerifyArgs,
};
use clap::parser::ValueSource;
use clap::ArgMatches;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    pub fn empty() -> Self {
        Self {
            values: HashMap::new(),
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("config {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "  - config {}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            // store under the clap id convention (dashes become underscores)
            values.insert(key.trim().replace('-', "_"), value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get(&self, id: &str) -> Option<&str> {
        self.values.get(id).map(String::as_str)
    }
}

/// True when the user did not set this flag on the command line or via the
/// environment, so the config file may supply it.
fn defaulted(matches: &ArgMatches, id: &str) -> bool {
    matches!(
        matches.value_source(id),
        None | Some(ValueSource::DefaultValue)
    )
}

fn set<T: FromStr>(matches: &ArgMatches, cfg: &ConfigMap, id: &str, slot: &mut T) -> CliResult<()>
where
    T::Err: std::fmt::Display,
{
    if defaulted(matches, id) {
        if let Some(raw) = cfg.get(id) {
            *slot = raw.parse().map_err(|e| {
                CliError::Validation(format!("  - config key `{id}`: cannot parse `{raw}`: {e}"))
            })?;
        }
    }
    Ok(())
}

fn set_opt<T: FromStr>(
    matches: &ArgMatches,
    cfg: &ConfigMap,
    id: &str,
    slot: &mut Option<T>,
) -> CliResult<()>
where
    T::Err: std::fmt::Display,
{
    if defaulted(matches, id) {
        if let Some(raw) = cfg.get(id) {
            *slot = Some(raw.parse().map_err(|e| {
                CliError::Validation(format!("  - config key `{id}`: cannot parse `{raw}`: {e}"))
            })?);
        }
    }
    Ok(())
}

fn set_sizes(
    matches: &ArgMatches,
    cfg: &ConfigMap,
    id: &str,
    slot: &mut Vec<usize>,
) -> CliResult<()> {
    if defaulted(matches, id) {
        if let Some(raw) = cfg.get(id) {
            *slot = parse_size_list(raw)?;
        }
    }
    Ok(())
}

fn parse_size_list(raw: &str) -> CliResult<Vec<usize>> {
    raw.split(',')
        .map(|s| {
            s.trim().parse::<usize>().map_err(|e| {
                CliError::Validation(format!("  - config key `sizes`: bad entry `{s}`: {e}"))
            })
        })
        .collect()
}

fn load_for(core_config: &Option<PathBuf>) -> CliResult<ConfigMap> {
    match core_config {
        Some(path) => ConfigMap::load(path),
        None => Ok(ConfigMap::empty()),
    }
}

fn apply_core(core: &mut crate::CoreArgs, m: &ArgMatches, cfg: &ConfigMap) -> CliResult<()> {
    set_opt(m, cfg, "n", &mut core.n)?;
    set(m, cfg, "r", &mut core.r)?;
    set(m, cfg, "jx", &mut core.jx)?;
    set_opt(m, cfg, "out", &mut core.out)?;
    set_opt(m, cfg, "plot_script", &mut core.plot_script)?;
    set(m, cfg, "workers", &mut core.workers)?;
    Ok(())
}

pub fn apply_echo(args: &mut EchoArgs, m: &ArgMatches) -> CliResult<()> {
    let cfg = load_for(&args.core.config)?;
    apply_core(&mut args.core, m, &cfg)?;
    set(m, &cfg, "hf", &mut args.hf)?;
    set(m, &cfg, "hb", &mut args.hb)?;
    set(m, &cfg, "state", &mut args.state)?;
    set(m, &cfg, "tmax", &mut args.tmax)?;
    set(m, &cfg, "dt", &mut args.dt)?;
    set_opt(m, &cfg, "window", &mut args.window)?;
    Ok(())
}

pub fn apply_momdist(args: &mut MomdistArgs, m: &ArgMatches) -> CliResult<()> {
    let cfg = load_for(&args.core.config)?;
    apply_core(&mut args.core, m, &cfg)?;
    set(m, &cfg, "hf", &mut args.hf)?;
    set(m, &cfg, "hb", &mut args.hb)?;
    set(m, &cfg, "state", &mut args.state)?;
    set_opt(m, &cfg, "time", &mut args.time)?;
    set_opt(m, &cfg, "k_range", &mut args.k_range)?;
    set(m, &cfg, "tmax", &mut args.tmax)?;
    set(m, &cfg, "dt", &mut args.dt)?;
    set_opt(m, &cfg, "window", &mut args.window)?;
    Ok(())
}

pub fn apply_sweep(args: &mut SweepArgs, m: &ArgMatches) -> CliResult<()> {
    let cfg = load_for(&args.core.config)?;
    apply_core(&mut args.core, m, &cfg)?;
    set(m, &cfg, "hf", &mut args.hf)?;
    set(m, &cfg, "hb", &mut args.hb)?;
    set(m, &cfg, "state", &mut args.state)?;
    set(m, &cfg, "time", &mut args.time)?;
    if defaulted(m, "sizes") {
        if let Some(raw) = cfg.get("sizes") {
            args.sizes = Some(parse_size_list(raw)?);
        }
    }
    Ok(())
}

pub fn apply_kicked(args: &mut KickedArgs, m: &ArgMatches) -> CliResult<()> {
    let cfg = load_for(&args.core.config)?;
    apply_core(&mut args.core, m, &cfg)?;
    set(m, &cfg, "hf", &mut args.hf)?;
    set(m, &cfg, "hb", &mut args.hb)?;
    set_opt(m, &cfg, "tau", &mut args.tau)?;
    set(m, &cfg, "kicks", &mut args.kicks)?;
    set(m, &cfg, "state", &mut args.state)?;
    set_opt(m, &cfg, "window", &mut args.window)?;
    Ok(())
}

pub fn apply_scaling(args: &mut ScalingArgs, m: &ArgMatches) -> CliResult<()> {
    let cfg = load_for(&args.core.config)?;
    apply_core(&mut args.core, m, &cfg)?;
    set(m, &cfg, "hf", &mut args.hf)?;
    set(m, &cfg, "hb", &mut args.hb)?;
    set(m, &cfg, "time", &mut args.time)?;
    set_sizes(m, &cfg, "sizes", &mut args.sizes)?;
    Ok(())
}

pub fn apply_verify(args: &mut VerifyArgs, m: &ArgMatches) -> CliResult<()> {
    let cfg = load_for(&args.core.config)?;
    apply_core(&mut args.core, m, &cfg)?;
    set(m, &cfg, "hf", &mut args.hf)?;
    set(m, &cfg, "hb", &mut args.hb)?;
    set(m, &cfg, "tmax", &mut args.tmax)?;
    set(m, &cfg, "dt", &mut args.dt)?;
    Ok(())
}
