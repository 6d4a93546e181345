//! Run configuration: every scalar knob of the training loop, parsed from a
//! flat `key = value` text file with documented defaults.

use serde::Serialize;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Full,
    LpOnly,
    GnnOnly,
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Variant::Full),
            "lp-only" => Ok(Variant::LpOnly),
            "gnn-only" => Ok(Variant::GnnOnly),
            other => Err(format!("unknown variant '{other}' (full | lp-only | gnn-only)")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::Full => "full",
            Variant::LpOnly => "lp-only",
            Variant::GnnOnly => "gnn-only",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMode {
    Fixed,
    MedianHeuristic,
}

impl FromStr for DeltaMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed" => Ok(DeltaMode::Fixed),
            "median-heuristic" => Ok(DeltaMode::MedianHeuristic),
            other => Err(format!("unknown delta_mode '{other}' (fixed | median-heuristic)")),
        }
    }
}

/// All scalar knobs of the engine. Field names follow the config-file keys.
#[derive(Debug, Clone, Serialize)]
pub struct Hyperparams {
    /// Weight of the embedding loss in the combined objective.
    pub alpha: f64,
    /// Fitness weight tying labeled rows to their one-hot labels.
    pub mu: f64,
    /// Gaussian-kernel length scale for edge weights.
    pub delta: f64,
    pub delta_mode: DeltaMode,
    /// Initial self-paced entropy threshold.
    pub lambda0: f64,
    /// Multiplicative growth of the threshold per outer iteration.
    pub lambda_growth: f64,
    /// Cap on the threshold; `None` resolves to `0.9 * ln(K)` at run time.
    pub lambda_cap: Option<f64>,
    /// Probability of the structure branch in context sampling.
    pub r: f64,
    /// Negatives per positive context pair.
    pub s_neg: usize,
    /// Positive anchors per sampled batch.
    pub batch_size: usize,
    /// Encoder steps per outer iteration.
    pub t1: usize,
    /// Propagation steps per outer iteration.
    pub t2: usize,
    pub lr_enc: f64,
    pub lr_lp: f64,
    /// Embedding dimension.
    pub dim: usize,
    pub hidden_dim: usize,
    pub neighbor_sample_size: usize,
    pub max_outer_iters: usize,
    pub patience: usize,
    pub seed: u64,
    pub variant: Variant,
    /// Row-L2-normalize attributes at load time.
    pub row_normalize: bool,
    /// Fraction of labeled nodes used for training.
    pub train_fraction: f64,
    /// Labeled nodes held out for validation.
    pub val_count: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.1,
            mu: 10.0,
            delta: 0.1,
            delta_mode: DeltaMode::Fixed,
            lambda0: 0.1,
            lambda_growth: 1.25,
            lambda_cap: None,
            r: 0.5,
            s_neg: 10,
            batch_size: 512,
            t1: 200,
            t2: 50,
            lr_enc: 0.01,
            lr_lp: 0.05,
            dim: 64,
            hidden_dim: 128,
            neighbor_sample_size: 10,
            max_outer_iters: 50,
            patience: 5,
            seed: 0,
            variant: Variant::Full,
            row_normalize: false,
            train_fraction: 0.3,
            val_count: 100,
        }
    }
}

const VALID_KEYS: &[&str] = &[
    "alpha",
    "mu",
    "delta",
    "delta_mode",
    "lambda0",
    "lambda_growth",
    "lambda_cap",
    "r",
    "s_neg",
    "batch_size",
    "t1",
    "t2",
    "lr_enc",
    "lr_lp",
    "dim",
    "hidden_dim",
    "neighbor_sample_size",
    "max_outer_iters",
    "patience",
    "seed",
    "variant",
    "row_normalize",
    "train_fraction",
    "val_count",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {0}: expected 'key = value', got '{1}'")]
    Malformed(usize, String),
    #[error("line {line}: unknown key '{key}'; valid keys: {}", VALID_KEYS.join(", "))]
    UnknownKey { line: usize, key: String },
    #[error("line {0}: invalid value for '{1}': {2}")]
    BadValue(usize, String, String),
    #[error("invalid hyperparameter '{0}': {1}")]
    Invalid(&'static str, String),
}

impl Hyperparams {
    /// Resolve the self-paced threshold cap for a `k`-class problem.
    pub fn lambda_cap_for(&self, k: usize) -> f64 {
        self.lambda_cap.unwrap_or(0.9 * (k as f64).ln())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(name: &'static str, v: f64) -> Result<(), ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid(name, format!("must be > 0, got {v}")))
            }
        }
        positive("alpha", self.alpha)?;
        positive("mu", self.mu)?;
        positive("delta", self.delta)?;
        positive("lambda0", self.lambda0)?;
        positive("lambda_growth", self.lambda_growth)?;
        if let Some(cap) = self.lambda_cap {
            positive("lambda_cap", cap)?;
        }
        positive("lr_enc", self.lr_enc)?;
        positive("lr_lp", self.lr_lp)?;
        if !(0.0..=1.0).contains(&self.r) {
            return Err(ConfigError::Invalid("r", format!("must be in [0, 1], got {}", self.r)));
        }
        for (name, v) in [
            ("s_neg", self.s_neg),
            ("batch_size", self.batch_size),
            ("t1", self.t1),
            ("t2", self.t2),
            ("dim", self.dim),
            ("hidden_dim", self.hidden_dim),
            ("neighbor_sample_size", self.neighbor_sample_size),
        ] {
            if v < 1 {
                return Err(ConfigError::Invalid(
                    match name {
                        "s_neg" => "s_neg",
                        "batch_size" => "batch_size",
                        "t1" => "t1",
                        "t2" => "t2",
                        "dim" => "dim",
                        "hidden_dim" => "hidden_dim",
                        _ => "neighbor_sample_size",
                    },
                    format!("must be >= 1, got {v}"),
                ));
            }
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(ConfigError::Invalid(
                "train_fraction",
                format!("must be in (0, 1), got {}", self.train_fraction),
            ));
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment, blank lines ignored.
    /// Missing keys keep their defaults.
    pub fn from_str_config(text: &str) -> Result<Self, ConfigError> {
        let mut hp = Hyperparams::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Malformed(line_no, raw.to_string()))?;
            let key = key.trim();
            let value = value.trim();
            if !VALID_KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                });
            }
            let bad =
                |msg: String| ConfigError::BadValue(line_no, key.to_string(), msg);
            macro_rules! parse {
                ($ty:ty) => {
                    value.parse::<$ty>().map_err(|e| bad(e.to_string()))?
                };
            }
            match key {
                "alpha" => hp.alpha = parse!(f64),
                "mu" => hp.mu = parse!(f64),
                "delta" => hp.delta = parse!(f64),
                "delta_mode" => hp.delta_mode = value.parse().map_err(bad)?,
                "lambda0" => hp.lambda0 = parse!(f64),
                "lambda_growth" => hp.lambda_growth = parse!(f64),
                "lambda_cap" => hp.lambda_cap = Some(parse!(f64)),
                "r" => hp.r = parse!(f64),
                "s_neg" => hp.s_neg = parse!(usize),
                "batch_size" => hp.batch_size = parse!(usize),
                "t1" => hp.t1 = parse!(usize),
                "t2" => hp.t2 = parse!(usize),
                "lr_enc" => hp.lr_enc = parse!(f64),
                "lr_lp" => hp.lr_lp = parse!(f64),
                "dim" => hp.dim = parse!(usize),
                "hidden_dim" => hp.hidden_dim = parse!(usize),
                "neighbor_sample_size" => hp.neighbor_sample_size = parse!(usize),
                "max_outer_iters" => hp.max_outer_iters = parse!(usize),
                "patience" => hp.patience = parse!(usize),
                "seed" => hp.seed = parse!(u64),
                "variant" => hp.variant = value.parse().map_err(bad)?,
                "row_normalize" => hp.row_normalize = parse!(bool),
                "train_fraction" => hp.train_fraction = parse!(f64),
                "val_count" => hp.val_count = parse!(usize),
                _ => unreachable!(),
            }
        }
        hp.validate()?;
        Ok(hp)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_str_config(&std::fs::read_to_string(path)?)
    }
}
