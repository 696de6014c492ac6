//! Resolved run configuration, serializable for bit-exact replay.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Command, CommonArgs};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Common {
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub threads: usize,
}

impl From<&CommonArgs> for Common {
    fn from(c: &CommonArgs) -> Self {
        Common {
            out: c.out.clone(),
            plot: c.plot.clone(),
            manifest: c.manifest.clone(),
            threads: c.threads,
        }
    }
}

/// Full resolved configuration of one run. Replaying a manifest performs
/// the same computation against the same inputs and rewrites the same
/// outputs byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Manifest {
    Ap {
        curve: [i64; 5],
        pmax: u64,
        common: Common,
    },
    Chebyshev {
        limit: u64,
        modulus: u64,
        crossings: Option<usize>,
        common: Common,
    },
    Dataset {
        corpus: PathBuf,
        interval_lo: u64,
        interval_hi: u64,
        parity: u8,
        pmax: u64,
        common: Common,
    },
    Average {
        corpus: PathBuf,
        interval_lo: u64,
        interval_hi: u64,
        pmax: u64,
        normalize: bool,
        common: Common,
    },
    Pca {
        corpus: PathBuf,
        interval_lo: u64,
        interval_hi: u64,
        pmax: u64,
        k: usize,
        seed: u64,
        profile: Option<PathBuf>,
        model: Option<PathBuf>,
        common: Common,
    },
    Train {
        corpus: PathBuf,
        classes: Vec<u32>,
        per_class: usize,
        pmax: u64,
        learning_rate: f64,
        epochs: usize,
        seed: u64,
        train_fraction: f64,
        scale_inv_sqrt_p: bool,
        metrics: Option<PathBuf>,
        model: Option<PathBuf>,
        common: Common,
    },
}

/// Closed `lo:hi` syntax on the CLI; stored half-open as [lo, hi + 1).
pub fn parse_closed_interval(text: &str) -> anyhow::Result<(u64, u64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow::anyhow!("interval must be lo:hi, got `{text}`"))?;
    let lo: u64 = lo.trim().parse()?;
    let hi: u64 = hi.trim().parse()?;
    if hi < lo {
        anyhow::bail!("interval upper end {hi} below lower end {lo}");
    }
    Ok((lo, hi + 1))
}

impl Manifest {
    pub fn from_command(cmd: &Command) -> anyhow::Result<Self> {
        Ok(match cmd {
            Command::Ap { curve, pmax, common } => {
                anyhow::ensure!(curve.len() == 5, "--curve takes a1,a2,a3,a4,a6");
                Manifest::Ap {
                    curve: [curve[0], curve[1], curve[2], curve[3], curve[4]],
                    pmax: *pmax,
                    common: common.into(),
                }
            }
            Command::Chebyshev {
                limit,
                crossings,
                modulus,
                common,
            } => Manifest::Chebyshev {
                limit: *limit,
                modulus: *modulus,
                crossings: *crossings,
                common: common.into(),
            },
            Command::Dataset {
                corpus,
                interval,
                parity,
                pmax,
                common,
            } => {
                let (lo, hi) = parse_closed_interval(interval)?;
                Manifest::Dataset {
                    corpus: corpus.clone(),
                    interval_lo: lo,
                    interval_hi: hi,
                    parity: *parity,
                    pmax: *pmax,
                    common: common.into(),
                }
            }
            Command::Average {
                corpus,
                interval,
                pmax,
                normalize,
                common,
            } => {
                let (lo, hi) = parse_closed_interval(interval)?;
                Manifest::Average {
                    corpus: corpus.clone(),
                    interval_lo: lo,
                    interval_hi: hi,
                    pmax: *pmax,
                    normalize: *normalize,
                    common: common.into(),
                }
            }
            Command::Pca {
                corpus,
                interval,
                pmax,
                k,
                seed,
                profile,
                model,
                common,
            } => {
                let (lo, hi) = parse_closed_interval(interval)?;
                Manifest::Pca {
                    corpus: corpus.clone(),
                    interval_lo: lo,
                    interval_hi: hi,
                    pmax: *pmax,
                    k: *k,
                    seed: *seed,
                    profile: profile.clone(),
                    model: model.clone(),
                    common: common.into(),
                }
            }
            Command::Train {
                corpus,
                classes,
                per_class,
                pmax,
                learning_rate,
                epochs,
                seed,
                train_fraction,
                no_scale,
                metrics,
                model,
                common,
            } => Manifest::Train {
                corpus: corpus.clone(),
                classes: classes.clone(),
                per_class: *per_class,
                pmax: *pmax,
                learning_rate: *learning_rate,
                epochs: *epochs,
                seed: *seed,
                train_fraction: *train_fraction,
                scale_inv_sqrt_p: !no_scale,
                metrics: metrics.clone(),
                model: model.clone(),
                common: common.into(),
            },
            Command::Rerun { .. } => unreachable!("rerun resolves its own manifest"),
        })
    }

    pub fn common(&self) -> &Common {
        match self {
            Manifest::Ap { common, .. }
            | Manifest::Chebyshev { common, .. }
            | Manifest::Dataset { common, .. }
            | Manifest::Average { common, .. }
            | Manifest::Pca { common, .. }
            | Manifest::Train { common, .. } => common,
        }
    }

    pub fn write_if_requested(&self) -> anyhow::Result<()> {
        if let Some(path) = &self.common().manifest {
            let mut text = serde_json::to_string_pretty(self)?;
            text.push('\n');
            fs::write(path, text)?;
        }
        Ok(())
    }
}

pub fn rerun(path: &Path) -> anyhow::Result<()> {
    let text = fs::read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    crate::commands::run(&manifest)
}
