//! Command bodies, all driven from a resolved manifest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use murmur_core::dataset::{self, ConductorInterval, IsogenyClassRecord};
use murmur_core::ecpoint::{aggregate_discrepancy, sieve_primes, CurveEquation};
use murmur_core::learn;
use murmur_core::murmur;
use murmur_core::svg;
use serde::Serialize;

use crate::manifest::Manifest;

pub fn run(manifest: &Manifest) -> anyhow::Result<()> {
    manifest.write_if_requested()?;
    let threads = manifest.common().threads;
    if threads == 0 {
        body(manifest)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        pool.install(|| body(manifest))
    }
}

/// Open --out or fall back to stdout.
fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("create {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn load_corpus(path: &Path) -> anyhow::Result<Vec<IsogenyClassRecord>> {
    let file = File::open(path).with_context(|| format!("open corpus {}", path.display()))?;
    Ok(dataset::parse_corpus(BufReader::new(file))?)
}

fn body(manifest: &Manifest) -> anyhow::Result<()> {
    match manifest {
        Manifest::Ap { curve, pmax, common } => {
            let eq = CurveEquation::from_coeffs(*curve)?;
            let rows = aggregate_discrepancy(&eq, *pmax);
            let primes = sieve_primes(*pmax);
            let mut out = sink(&common.out)?;
            writeln!(out, "prime,count,discrepancy,aggregate")?;
            let mut prev = 0i64;
            let mut pts = Vec::new();
            for (&p, &(prime, agg)) in primes.iter().zip(&rows) {
                let ap = agg - prev;
                prev = agg;
                let count = p as i64 - ap; // affine solutions, singular point included
                writeln!(out, "{prime},{count},{ap},{agg}")?;
                pts.push((prime as f64, agg as f64));
            }
            drop(out);
            if let Some(path) = &common.plot {
                let mut f = BufWriter::new(File::create(path)?);
                svg::scatter(
                    &mut f,
                    &[svg::Series {
                        points: &pts,
                        color: "blue",
                        label: "aggregate",
                    }],
                    "prime",
                    "aggregate discrepancy",
                )?;
            }
            Ok(())
        }

        Manifest::Chebyshev {
            limit,
            modulus,
            crossings,
            common,
        } => {
            anyhow::ensure!(*modulus == 4, "only modulus 4 is supported");
            let series = murmur_core::chebyshev::bias_series(*limit);
            let mut out = sink(&common.out)?;
            murmur_core::chebyshev::write_csv(&series, &mut out)?;
            drop(out);
            if let Some(k) = crossings {
                let hits = murmur_core::chebyshev::first_positive_crossings(*limit, *k);
                let mut stdout = std::io::stdout().lock();
                for p in hits {
                    writeln!(stdout, "crossing {p}")?;
                }
            }
            if let Some(path) = &common.plot {
                let pts: Vec<(f64, f64)> = series
                    .primes
                    .iter()
                    .zip(&series.aggregates)
                    .map(|(&p, &a)| (p as f64, a as f64))
                    .collect();
                let mut f = BufWriter::new(File::create(path)?);
                svg::scatter(
                    &mut f,
                    &[svg::Series {
                        points: &pts,
                        color: "blue",
                        label: "aggregate",
                    }],
                    "prime",
                    "aggregate discrepancy",
                )?;
            }
            Ok(())
        }

        Manifest::Dataset {
            corpus,
            interval_lo,
            interval_hi,
            parity,
            pmax,
            common,
        } => {
            let records = load_corpus(corpus)?;
            let interval = ConductorInterval::new(*interval_lo, *interval_hi)?;
            let selection = dataset::select(&records, *parity, interval);
            let matrix = dataset::materialize_ap(&selection, *pmax)?;
            let mut out = sink(&common.out)?;
            matrix.write_csv(&mut out)?;
            Ok(())
        }

        Manifest::Average {
            corpus,
            interval_lo,
            interval_hi,
            pmax,
            normalize,
            common,
        } => {
            let records = load_corpus(corpus)?;
            let interval = ConductorInterval::new(*interval_lo, *interval_hi)?;
            let (even, odd) = murmur::paired_series(&records, interval, *pmax)?;
            let mut out = sink(&common.out)?;
            murmur::write_paired_csv(&even, &odd, &mut out)?;
            drop(out);
            if let Some(path) = &common.plot {
                let (even_pts, odd_pts) = if *normalize {
                    (murmur::normalized_series(&even)?, murmur::normalized_series(&odd)?)
                } else {
                    let raw = |s: &murmur::MurmurationSeries| {
                        s.primes
                            .iter()
                            .zip(s.means_f64())
                            .map(|(&p, m)| (p as f64, m))
                            .collect::<Vec<_>>()
                    };
                    (raw(&even), raw(&odd))
                };
                let mut f = BufWriter::new(File::create(path)?);
                svg::scatter(
                    &mut f,
                    &[
                        svg::Series {
                            points: &even_pts,
                            color: "blue",
                            label: "even rank",
                        },
                        svg::Series {
                            points: &odd_pts,
                            color: "red",
                            label: "odd rank",
                        },
                    ],
                    if *normalize { "p / lo" } else { "prime" },
                    "mean a_p",
                )?;
            }
            Ok(())
        }

        Manifest::Pca {
            corpus,
            interval_lo,
            interval_hi,
            pmax,
            k,
            seed,
            profile,
            model,
            common,
        } => {
            let records = load_corpus(corpus)?;
            let interval = ConductorInterval::new(*interval_lo, *interval_hi)?;
            let window = dataset::window(&records, interval);
            let matrix = dataset::materialize_records(&window, *pmax)?;
            let rows = learn::to_f64_matrix(&matrix.rows);
            let fitted = learn::pca_fit(&rows, *k, *seed)?;
            let proj = learn::pca_project(&fitted, &rows)?;

            let mut out = sink(&common.out)?;
            write!(out, "label,rank")?;
            for j in 1..=*k {
                write!(out, ",pc{j}")?;
            }
            writeln!(out)?;
            for ((rec, row), coords) in window.iter().zip(&matrix.rows).zip(&proj) {
                debug_assert_eq!(row.len(), matrix.primes.len());
                write!(out, "{},{}", rec.label, rec.rank)?;
                for c in coords {
                    write!(out, ",{c}")?;
                }
                writeln!(out)?;
            }
            drop(out);

            if let Some(path) = profile {
                let pairs = learn::first_component_profile(&fitted, &matrix.primes)?;
                let mut f = BufWriter::new(File::create(path)?);
                writeln!(f, "prime,weight")?;
                for (p, w) in pairs {
                    writeln!(f, "{p},{w}")?;
                }
            }
            if let Some(path) = model {
                let mut f = BufWriter::new(File::create(path)?);
                fitted.write_csv(&mut f)?;
                write_sidecar(path, &PcaSidecar {
                    kind: "pca",
                    dimension: fitted.dimension(),
                    components: *k,
                    primes: matrix.primes.clone(),
                    seed: *seed,
                    explained_variance: fitted.explained_variance.clone(),
                })?;
            }
            if let Some(path) = &common.plot {
                let (mut evens, mut odds) = (Vec::new(), Vec::new());
                for (rec, coords) in window.iter().zip(&proj) {
                    let x = coords[0];
                    let y = coords.get(1).copied().unwrap_or(0.0);
                    if rec.rank % 2 == 0 {
                        evens.push((x, y));
                    } else {
                        odds.push((x, y));
                    }
                }
                let mut f = BufWriter::new(File::create(path)?);
                svg::scatter(
                    &mut f,
                    &[
                        svg::Series {
                            points: &evens,
                            color: "blue",
                            label: "even rank",
                        },
                        svg::Series {
                            points: &odds,
                            color: "red",
                            label: "odd rank",
                        },
                    ],
                    "first principal coordinate",
                    "second principal coordinate",
                )?;
            }
            Ok(())
        }

        Manifest::Train {
            corpus,
            classes,
            per_class,
            pmax,
            learning_rate,
            epochs,
            seed,
            train_fraction,
            scale_inv_sqrt_p,
            metrics,
            model,
            common,
        } => {
            let records = load_corpus(corpus)?;
            let sampled = sample_classes(&records, classes, *per_class, *seed)?;
            let matrix = dataset::materialize_records(&sampled, *pmax)?;
            let mut rows = learn::to_f64_matrix(&matrix.rows);
            if *scale_inv_sqrt_p {
                learn::scale_columns_inv_sqrt_p(&mut rows, &matrix.primes);
            }
            let labels: Vec<u32> = sampled.iter().map(|r| r.rank).collect();
            let config = learn::TrainConfig {
                learning_rate: *learning_rate,
                epochs: *epochs,
                seed: *seed,
                train_fraction: *train_fraction,
            };
            let (fitted, report) = learn::logreg_train(&rows, &labels, &config)?;

            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            match metrics {
                Some(path) => std::fs::write(path, &text)?,
                None => print!("{text}"),
            }
            if let Some(path) = model {
                let mut f = BufWriter::new(File::create(path)?);
                fitted.write_csv(&mut f)?;
                write_sidecar(path, &TrainSidecar {
                    kind: "logreg",
                    dimension: fitted.dimension(),
                    primes: matrix.primes.clone(),
                    classes: fitted.classes.clone(),
                    seed: *seed,
                    scale_inv_sqrt_p: *scale_inv_sqrt_p,
                })?;
            }
            let _ = &common.plot;
            Ok(())
        }
    }
}

/// Deterministic per-rank sampling: seed-shuffled, then capped.
fn sample_classes(
    records: &[IsogenyClassRecord],
    classes: &[u32],
    per_class: usize,
    seed: u64,
) -> anyhow::Result<Vec<IsogenyClassRecord>> {
    use rand::seq::SliceRandom;
    use rand_chacha::rand_core::SeedableRng;
    let mut out = Vec::new();
    for &class in classes {
        let mut members: Vec<&IsogenyClassRecord> =
            records.iter().filter(|r| r.rank == class).collect();
        if per_class > 0 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ class as u64);
            members.shuffle(&mut rng);
            members.truncate(per_class);
        }
        out.extend(members.into_iter().cloned());
    }
    Ok(out)
}

#[derive(Serialize)]
struct PcaSidecar {
    kind: &'static str,
    dimension: usize,
    components: usize,
    primes: Vec<u64>,
    seed: u64,
    explained_variance: Vec<f64>,
}

#[derive(Serialize)]
struct TrainSidecar {
    kind: &'static str,
    dimension: usize,
    primes: Vec<u64>,
    classes: Vec<u32>,
    seed: u64,
    scale_inv_sqrt_p: bool,
}

fn write_sidecar<T: Serialize>(model_path: &Path, sidecar: &T) -> anyhow::Result<()> {
    let mut side = model_path.as_os_str().to_owned();
    side.push(".json");
    let mut text = serde_json::to_string_pretty(sidecar)?;
    text.push('\n');
    std::fs::write(PathBuf::from(side), text)?;
    Ok(())
}
