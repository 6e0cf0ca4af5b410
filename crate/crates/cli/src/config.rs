//! Run configuration: command-line flags override `SESHADRI_*` environment
//! variables, which override a `key = value` config file, which overrides defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;

pub const ENV_PREFIX: &str = "SESHADRI_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        <Format as ValueEnum>::from_str(s.trim(), true)
            .map_err(|_| CliError::usage(format!("unknown format `{s}`")))
    }
}

/// Inclusive range of `r` values, written `A..B` or `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RRange {
    pub min: i64,
    pub max: i64,
}

impl FromStr for RRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|_| format!("bad r value `{x}`"));
        let (min, max) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => (parse(s)?, parse(s)?),
        };
        if min > max {
            return Err(format!("empty range {min}..{max}"));
        }
        Ok(Self { min, max })
    }
}

impl fmt::Display for RRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

impl RRange {
    pub fn values(&self) -> Vec<i64> {
        (self.min..=self.max).collect()
    }
}

/// Settings supplied on the command line; `None` falls through to lower layers.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub format: Option<Format>,
    pub cache_dir: Option<PathBuf>,
    pub depth: Option<u32>,
    pub sqrt_width_exponent: Option<u32>,
    pub jobs: Option<usize>,
    pub approx: Option<bool>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub r_min: i64,
    pub r_max: i64,
    pub output_format: Format,
    pub cache_dir: Option<PathBuf>,
    pub bisection_depth: u32,
    pub sqrt_width_exponent: u32,
    pub parallelism: usize,
    pub approx: bool,
    pub out_dir: Option<PathBuf>,
}

const KEYS: [&str; 7] = [
    "format",
    "cache_dir",
    "depth",
    "sqrt_width_exponent",
    "jobs",
    "approx",
    "out_dir",
];

/// Reads `key = value` lines; `#` starts a comment and values may be quoted.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(format!(
                "config line {}: unknown key `{key}`",
                n + 1
            )));
        }
        let value = value.trim().trim_matches('"').to_string();
        out.insert(key, value);
    }
    Ok(out)
}

/// One configuration source with string values keyed like the config file.
type Layer = BTreeMap<String, String>;

fn env_layer(env: &dyn Fn(&str) -> Option<String>) -> Layer {
    KEYS.iter()
        .filter_map(|k| env(&format!("{ENV_PREFIX}{}", k.to_uppercase())).map(|v| (k.to_string(), v)))
        .collect()
}

fn typed<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("invalid value `{value}` for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(CliError::usage(format!("invalid value `{value}` for {key}"))),
    }
}

impl RunConfig {
    /// Merges the layers. `config_path` overrides `SESHADRI_CONFIG`; `default_format`
    /// applies when no layer names one.
    pub fn resolve(
        range: RRange,
        cli: &Overrides,
        config_path: Option<&Path>,
        env: &dyn Fn(&str) -> Option<String>,
        default_format: Format,
    ) -> Result<Self, CliError> {
        let file_path = config_path
            .map(Path::to_path_buf)
            .or_else(|| env(&format!("{ENV_PREFIX}CONFIG")).map(PathBuf::from));
        let file = match file_path {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config_file(&text)?
            }
            None => Layer::new(),
        };
        let env = env_layer(env);
        let lookup = |key: &str| env.get(key).or_else(|| file.get(key)).cloned();

        let output_format = match cli.format {
            Some(f) => f,
            None => lookup("format")
                .map(|v| v.parse())
                .transpose()?
                .unwrap_or(default_format),
        };
        let cache_dir = cli
            .cache_dir
            .clone()
            .or_else(|| lookup("cache_dir").map(PathBuf::from));
        let out_dir = cli
            .out_dir
            .clone()
            .or_else(|| lookup("out_dir").map(PathBuf::from));
        let bisection_depth = match cli.depth {
            Some(d) => d,
            None => lookup("depth")
                .map(|v| typed("depth", &v))
                .transpose()?
                .unwrap_or(40),
        };
        let sqrt_width_exponent = match cli.sqrt_width_exponent {
            Some(k) => k,
            None => lookup("sqrt_width_exponent")
                .map(|v| typed("sqrt_width_exponent", &v))
                .transpose()?
                .unwrap_or(seshadri_core::exact::DEFAULT_SQRT_WIDTH_EXPONENT),
        };
        let parallelism = match cli.jobs {
            Some(j) => j,
            None => match lookup("jobs") {
                Some(v) => typed("jobs", &v)?,
                None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            },
        };
        let approx = match cli.approx {
            Some(a) => a,
            None => lookup("approx")
                .map(|v| parse_bool("approx", &v))
                .transpose()?
                .unwrap_or(false),
        };
        if bisection_depth < 1 {
            return Err(CliError::usage("depth must be at least 1"));
        }
        if parallelism < 1 {
            return Err(CliError::usage("jobs must be at least 1"));
        }
        if sqrt_width_exponent < 1 {
            return Err(CliError::usage("sqrt_width_exponent must be at least 1"));
        }
        Ok(Self {
            r_min: range.min,
            r_max: range.max,
            output_format,
            cache_dir,
            bisection_depth,
            sqrt_width_exponent,
            parallelism,
            approx,
            out_dir,
        })
    }

    pub fn range(&self) -> RRange {
        RRange {
            min: self.r_min,
            max: self.r_max,
        }
    }
}
