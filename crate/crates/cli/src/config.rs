//! Run configuration: plain-text key=value lines, strict (unknown keys are
//! rejected), '#' comments allowed.

use std::collections::HashSet;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use ssns_core::io::parse_key_values;
use ssns_core::solver::ContinuationConfig;
use ssns_core::{Error, Result};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid_n: usize,
    pub grid_l: f64,
    pub trace_file: PathBuf,
    pub mollify_eps: f64,
    pub solver: ContinuationConfig<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// SHA-256 of the config file bytes; recorded in every output.
    pub hash: String,
}

const KNOWN_KEYS: [&str; 11] = [
    "grid.n",
    "grid.L",
    "data.trace_file",
    "data.mollify_eps",
    "solver.mu_schedule",
    "solver.theta",
    "solver.anderson_depth",
    "solver.tol",
    "solver.max_iter",
    "output.dir",
    "seed",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::Parameter(format!("config key {key}: bad value '{v}'")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let hash = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>();

        let kv = parse_key_values(text)?;
        let known: HashSet<&str> = KNOWN_KEYS.into_iter().collect();
        let mut seen = HashSet::new();
        for (k, _) in &kv {
            if !known.contains(k.as_str()) {
                return Err(Error::Parameter(format!("unknown config key '{k}'")));
            }
            if !seen.insert(k.clone()) {
                return Err(Error::Parameter(format!("duplicate config key '{k}'")));
            }
        }
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let require = |key: &str| {
            get(key).ok_or_else(|| Error::Parameter(format!("missing config key '{key}'")))
        };

        let grid_n: usize = parse_num("grid.n", require("grid.n")?)?;
        let grid_l: f64 = parse_num("grid.L", require("grid.L")?)?;
        let trace_file = PathBuf::from(require("data.trace_file")?);
        let output_dir = PathBuf::from(require("output.dir")?);
        let mollify_eps: f64 = match get("data.mollify_eps") {
            Some(v) => parse_num("data.mollify_eps", v)?,
            None => 0.0,
        };
        if mollify_eps < 0.0 || mollify_eps >= std::f64::consts::FRAC_PI_4 {
            return Err(Error::Parameter(format!(
                "data.mollify_eps {mollify_eps} outside [0, pi/4)"
            )));
        }
        let seed: u64 = match get("seed") {
            Some(v) => parse_num("seed", v)?,
            None => 0,
        };

        let mut solver = ContinuationConfig::<f64>::default();
        if let Some(v) = get("solver.mu_schedule") {
            solver.mu_schedule = v
                .split(',')
                .map(|s| parse_num("solver.mu_schedule", s.trim()))
                .collect::<Result<Vec<f64>>>()?;
        }
        if let Some(v) = get("solver.theta") {
            solver.picard_damping = parse_num("solver.theta", v)?;
        }
        if let Some(v) = get("solver.anderson_depth") {
            solver.anderson_depth = parse_num("solver.anderson_depth", v)?;
        }
        if let Some(v) = get("solver.tol") {
            solver.tol = parse_num("solver.tol", v)?;
        }
        if let Some(v) = get("solver.max_iter") {
            solver.max_iter = parse_num("solver.max_iter", v)?;
        }
        solver.validate()?;

        Ok(Self {
            grid_n,
            grid_l,
            trace_file,
            mollify_eps,
            solver,
            output_dir,
            seed,
            hash,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# fixture run
grid.n = 32
grid.L = 8.0
data.trace_file = trace.txt
solver.mu_schedule = 0.1,0.5,1.0
solver.theta = 0.5
solver.anderson_depth = 3
solver.tol = 1e-5
solver.max_iter = 50
output.dir = out
";

    #[test]
    fn parses_complete_config() {
        let c = RunConfig::parse(GOOD).unwrap();
        assert_eq!(c.grid_n, 32);
        assert_eq!(c.grid_l, 8.0);
        assert_eq!(c.solver.mu_schedule, vec![0.1, 0.5, 1.0]);
        assert_eq!(c.solver.max_iter, 50);
        assert_eq!(c.mollify_eps, 0.0);
        assert_eq!(c.hash.len(), 64);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let with_unknown = format!("{GOOD}\nsolver.typo = 1\n");
        assert!(RunConfig::parse(&with_unknown).is_err());
        let with_dup = format!("{GOOD}\ngrid.n = 64\n");
        assert!(RunConfig::parse(&with_dup).is_err());
    }

    #[test]
    fn rejects_out_of_range_values() {
        let bad_eps = GOOD.replace("output.dir = out", "output.dir = out\ndata.mollify_eps = 2.0");
        assert!(RunConfig::parse(&bad_eps).is_err());
        let bad_theta = GOOD.replace("solver.theta = 0.5", "solver.theta = 1.5");
        assert!(RunConfig::parse(&bad_theta).is_err());
    }

    #[test]
    fn hash_is_content_sensitive() {
        let a = RunConfig::parse(GOOD).unwrap();
        let b = RunConfig::parse(&GOOD.replace("0.5", "0.4")).unwrap();
        assert_ne!(a.hash, b.hash);
    }
}
