//! Key=value configuration for the generate and solve subcommands.
//!
//! Precedence: built-in defaults, then the config file, then flags. The
//! resolved configuration printed by `--print-config` is itself loadable.
//! Unknown keys are errors.

use anyhow::{bail, Context, Result};
use deltasat::bench::SolverId;
use deltasat::dmm::DmmParams;
use deltasat::kv::parse_key_values;
use deltasat::sls::SlsParams;

/// `auto` means "derived from the instance" (xl_max from the clause count,
/// max_flips from the variable count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AutoOr<T> {
    Auto,
    Fixed(T),
}

impl<T: std::fmt::Display> std::fmt::Display for AutoOr<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AutoOr::Auto => f.write_str("auto"),
            AutoOr::Fixed(v) => v.fmt(f),
        }
    }
}

impl<T: std::str::FromStr> std::str::FromStr for AutoOr<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            Ok(AutoOr::Auto)
        } else {
            s.parse::<T>()
                .map(AutoOr::Fixed)
                .map_err(|_| format!("expected a number or `auto`, got `{s}`"))
        }
    }
}

/// Fully-resolved solve configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub solver: SolverId,
    pub threshold: f64,
    pub seed: u64,
    // continuous-solver parameters
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub dt: f64,
    pub xl_max: AutoOr<f64>,
    pub max_steps: u64,
    pub eval_stride: u64,
    pub sample_stride: u64,
    pub adaptive_dt: bool,
    // local-search parameters
    pub noise: f64,
    pub max_flips: AutoOr<u64>,
    pub max_restarts: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let dmm = DmmParams::<f64>::defaults_for_clause_count(1);
        let sls = SlsParams::defaults_for_n_vars(1);
        Self {
            solver: SolverId::Dmm,
            threshold: 0.015,
            seed: 1,
            alpha: dmm.alpha,
            beta: dmm.beta,
            gamma: dmm.gamma,
            delta: dmm.delta,
            epsilon: dmm.epsilon,
            zeta: dmm.zeta,
            dt: dmm.dt,
            xl_max: AutoOr::Auto,
            max_steps: dmm.max_steps,
            eval_stride: dmm.eval_stride,
            sample_stride: dmm.sample_stride,
            adaptive_dt: dmm.adaptive_dt,
            noise: sls.noise,
            max_flips: AutoOr::Auto,
            max_restarts: sls.max_restarts,
        }
    }
}

impl SolveConfig {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("bad value `{value}` for `{key}`"))
        }
        match key {
            "solver" => self.solver = parse_solver(value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "zeta" => self.zeta = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "xl_max" => self.xl_max = parse(key, value)?,
            "max_steps" => self.max_steps = parse(key, value)?,
            "eval_stride" => self.eval_stride = parse(key, value)?,
            "sample_stride" => self.sample_stride = parse(key, value)?,
            "adaptive_dt" => self.adaptive_dt = parse(key, value)?,
            "noise" => self.noise = parse(key, value)?,
            "max_flips" => self.max_flips = parse(key, value)?,
            "max_restarts" => self.max_restarts = parse(key, value)?,
            other => bail!("unknown solve key `{other}`"),
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (key, value) in parse_key_values(&text).map_err(anyhow::Error::msg)? {
            self.apply(&key, &value)?;
        }
        Ok(())
    }

    /// Loadable `key = value` rendering of the full configuration.
    pub fn to_config_string(&self) -> String {
        format!(
            "solver = {}\nthreshold = {}\nseed = {}\nalpha = {}\nbeta = {}\ngamma = {}\n\
             delta = {}\nepsilon = {}\nzeta = {}\ndt = {}\nxl_max = {}\nmax_steps = {}\n\
             eval_stride = {}\nsample_stride = {}\nadaptive_dt = {}\nnoise = {}\n\
             max_flips = {}\nmax_restarts = {}\n",
            self.solver,
            self.threshold,
            self.seed,
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.epsilon,
            self.zeta,
            self.dt,
            self.xl_max,
            self.max_steps,
            self.eval_stride,
            self.sample_stride,
            self.adaptive_dt,
            self.noise,
            self.max_flips,
            self.max_restarts,
        )
    }

    pub fn dmm_params(&self, n_clauses: usize) -> DmmParams<f64> {
        let defaults = DmmParams::<f64>::defaults_for_clause_count(n_clauses);
        DmmParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            epsilon: self.epsilon,
            zeta: self.zeta,
            dt: self.dt,
            xl_max: match self.xl_max {
                AutoOr::Auto => defaults.xl_max,
                AutoOr::Fixed(v) => v,
            },
            max_steps: self.max_steps,
            eval_stride: self.eval_stride,
            sample_stride: self.sample_stride,
            adaptive_dt: self.adaptive_dt,
        }
    }

    pub fn sls_params(&self, n_vars: usize) -> SlsParams {
        let defaults = SlsParams::defaults_for_n_vars(n_vars);
        SlsParams {
            noise: self.noise,
            max_flips: match self.max_flips {
                AutoOr::Auto => defaults.max_flips,
                AutoOr::Fixed(v) => v,
            },
            max_restarts: self.max_restarts,
            seed: self.seed,
            threshold_fraction: self.threshold,
        }
    }
}

fn parse_solver(value: &str) -> Result<SolverId> {
    value.parse::<SolverId>().map_err(anyhow::Error::msg)
}

/// Generate-subcommand configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerateConfig {
    pub n: usize,
    pub rho_xor: f64,
    pub seed: u64,
    pub planted: bool,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            rho_xor: 1.25,
            seed: 1,
            planted: false,
        }
    }
}

impl GenerateConfig {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = value.parse().context("bad n")?,
            "rho_xor" => self.rho_xor = value.parse().context("bad rho_xor")?,
            "seed" => self.seed = value.parse().context("bad seed")?,
            "planted" => self.planted = value.parse().context("bad planted")?,
            other => bail!("unknown generate key `{other}`"),
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (key, value) in parse_key_values(&text).map_err(anyhow::Error::msg)? {
            self.apply(&key, &value)?;
        }
        Ok(())
    }

    pub fn to_config_string(&self) -> String {
        format!(
            "n = {}\nrho_xor = {}\nseed = {}\nplanted = {}\n",
            self.n, self.rho_xor, self.seed, self.planted
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_config_roundtrip() {
        let mut config = SolveConfig::default();
        config.apply("solver", "sls").unwrap();
        config.apply("xl_max", "123.5").unwrap();
        config.apply("adaptive_dt", "true").unwrap();
        let text = config.to_config_string();
        let mut reparsed = SolveConfig::default();
        for (k, v) in parse_key_values(&text).unwrap() {
            reparsed.apply(&k, &v).unwrap();
        }
        assert_eq!(config, reparsed);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let mut config = SolveConfig::default();
        assert!(config.apply("bogus", "1").is_err());
        let mut generate = GenerateConfig::default();
        assert!(generate.apply("bogus", "1").is_err());
    }

    #[test]
    fn auto_values_roundtrip() {
        let config = SolveConfig::default();
        let text = config.to_config_string();
        assert!(text.contains("xl_max = auto"));
        assert!(text.contains("max_flips = auto"));
        let mut reparsed = SolveConfig::default();
        for (k, v) in parse_key_values(&text).unwrap() {
            reparsed.apply(&k, &v).unwrap();
        }
        assert_eq!(reparsed.xl_max, AutoOr::Auto);
    }
}
