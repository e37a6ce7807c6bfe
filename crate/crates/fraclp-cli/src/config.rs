//! Flat `key = value` configuration files with line-precise diagnostics.
//! Command-line flags override file values; per-command defaults fill the
//! rest. The parser is total: any byte sequence either produces a
//! `Settings` or a `ConfigError` naming the offending line.

use std::path::PathBuf;

/// Keys accepted in a config file, mirroring the command-line flags.
pub const KNOWN_KEYS: [&str; 11] = [
    "alpha", "beta", "p", "dim", "nx", "nt", "seed", "samples", "workers", "out", "convention",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConventionTag {
    Canonical,
    Paper,
}

impl ConventionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ConventionTag::Canonical => "canonical",
            ConventionTag::Paper => "paper",
        }
    }
}

/// Partially-specified run settings; `None` means "not set here".
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Settings {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub dim: Option<usize>,
    pub nx: Option<usize>,
    pub nt: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub convention: Option<ConventionTag>,
}

impl Settings {
    /// Layer `over` on top of `self`: set fields of `over` win.
    pub fn overlay(mut self, over: &Settings) -> Settings {
        macro_rules! take {
            ($f:ident) => {
                if over.$f.is_some() {
                    self.$f = over.$f.clone();
                }
            };
        }
        take!(alpha);
        take!(beta);
        take!(p);
        take!(dim);
        take!(nx);
        take!(nt);
        take!(seed);
        take!(samples);
        take!(workers);
        take!(out);
        take!(convention);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, ConfigError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| err(line, format!("`{key}` expects a number, got `{raw}`")))?;
    if !v.is_finite() {
        return Err(err(line, format!("`{key}` must be finite, got `{raw}`")));
    }
    Ok(v)
}

fn parse_usize(line: usize, key: &str, raw: &str) -> Result<usize, ConfigError> {
    raw.parse()
        .map_err(|_| err(line, format!("`{key}` expects a non-negative integer, got `{raw}`")))
}

fn parse_u64(line: usize, key: &str, raw: &str) -> Result<u64, ConfigError> {
    raw.parse()
        .map_err(|_| err(line, format!("`{key}` expects a non-negative integer, got `{raw}`")))
}

/// Parse a config file. Grammar: one `key = value` per line, `#` starts a
/// comment, blank lines are skipped. Unknown and duplicate keys are errors.
pub fn parse_config(text: &str) -> Result<Settings, ConfigError> {
    let mut s = Settings::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(line, format!("expected `key = value`, got `{content}`")));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(err(line, "missing key before `=`"));
        }
        if value.is_empty() {
            return Err(err(line, format!("missing value for `{key}`")));
        }
        macro_rules! set {
            ($f:ident, $v:expr) => {{
                if s.$f.is_some() {
                    return Err(err(line, format!("duplicate key `{key}`")));
                }
                s.$f = Some($v);
            }};
        }
        match key {
            "alpha" => set!(alpha, parse_f64(line, key, value)?),
            "beta" => set!(beta, parse_f64(line, key, value)?),
            "p" => set!(p, parse_f64(line, key, value)?),
            "dim" => set!(dim, parse_usize(line, key, value)?),
            "nx" => set!(nx, parse_usize(line, key, value)?),
            "nt" => set!(nt, parse_usize(line, key, value)?),
            "seed" => set!(seed, parse_u64(line, key, value)?),
            "samples" => set!(samples, parse_usize(line, key, value)?),
            "workers" => set!(workers, parse_usize(line, key, value)?),
            "out" => set!(out, PathBuf::from(value)),
            "convention" => set!(
                convention,
                match value {
                    "canonical" => ConventionTag::Canonical,
                    "paper" => ConventionTag::Paper,
                    other => {
                        return Err(err(
                            line,
                            format!("`convention` must be canonical or paper, got `{other}`"),
                        ))
                    }
                }
            ),
            other => {
                return Err(err(
                    line,
                    format!("unknown key `{other}` (known: {})", KNOWN_KEYS.join(", ")),
                ))
            }
        }
    }
    Ok(s)
}

/// Fully-resolved settings a command runs with.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub dim: usize,
    pub nx: usize,
    pub nt: usize,
    pub seed: u64,
    pub samples: usize,
    pub workers: Option<usize>,
    pub out: PathBuf,
    pub convention: ConventionTag,
    /// Whether `alpha` was set explicitly (file or flag) rather than defaulted.
    pub alpha_explicit: bool,
}

/// Apply precedence `defaults < file < env < flags` and fill every field.
pub fn resolve(defaults: &Settings, file: &Settings, env: &Settings, flags: &Settings) -> Resolved {
    let merged = defaults.clone().overlay(file).overlay(env).overlay(flags);
    Resolved {
        alpha: merged.alpha.unwrap_or(1.0),
        beta: merged.beta.unwrap_or(0.0),
        p: merged.p.unwrap_or(2.0),
        dim: merged.dim.unwrap_or(1),
        nx: merged.nx.unwrap_or(128),
        nt: merged.nt.unwrap_or(64),
        seed: merged.seed.unwrap_or(1),
        samples: merged.samples.unwrap_or(8),
        workers: merged.workers,
        out: merged.out.unwrap_or_else(|| PathBuf::from("runs")),
        convention: merged.convention.unwrap_or(ConventionTag::Canonical),
        alpha_explicit: file.alpha.is_some() || env.alpha.is_some() || flags.alpha.is_some(),
    }
}
