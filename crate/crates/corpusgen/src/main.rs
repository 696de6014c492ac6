mod curve;
mod enumerate;
mod factor;
mod lseries;
mod tate;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use enumerate::{
    build_classes, cross_check_conductors, merge_models, mordell_scan, scan_box,
    write_corpus_csv, GenOptions,
};

#[derive(Parser)]
#[command(name = "corpusgen", about = "Offline generator for isogeny-class corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate every isogeny class with conductor at most the bound and
    /// validate the reference window before writing.
    Small {
        #[arg(long, default_value_t = 1000)]
        conductor_max: u128,
        #[arg(long, default_value_t = 400)]
        a4_bound: i128,
        #[arg(long, default_value_t = 10000)]
        a6_bound: i128,
        #[arg(long)]
        out: PathBuf,
        /// skip the [200,400] window count/average validation
        #[arg(long)]
        no_validate: bool,
        /// raw model files (from `mordell`) to merge into the scan
        #[arg(long)]
        extra_models: Vec<PathBuf>,
    },
    /// Exhaustive per-conductor discriminant search; writes raw models
    /// to merge into a later `small` run.
    Mordell {
        #[arg(long, default_value_t = 11)]
        n_lo: u128,
        #[arg(long, default_value_t = 1001)]
        n_hi: u128,
        #[arg(long, default_value_t = 4_000_000_000_000)]
        disc_cap: i128,
        #[arg(long, default_value_t = 400_000)]
        c4_cap: i128,
        #[arg(long)]
        out: PathBuf,
    },
    /// Broad sweep for the large generated corpus (not exhaustive).
    Big {
        #[arg(long, default_value_t = 100000)]
        conductor_max: u128,
        #[arg(long, default_value_t = 120)]
        a4_bound: i128,
        #[arg(long, default_value_t = 2200)]
        a6_bound: i128,
        #[arg(long, default_value_t = 400)]
        fe_check: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Reference means for the conductor window [200, 401), printed at three
/// decimals: (prime, even-rank mean, odd-rank mean).
const WINDOW_MEANS: [(u64, &str, &str); 25] = [
    (2, "0.137", "-0.242"),
    (3, "0.266", "-0.605"),
    (5, "0.715", "-1.100"),
    (7, "0.871", "-1.579"),
    (11, "1.078", "-1.937"),
    (13, "0.770", "-2.263"),
    (17, "0.906", "-1.905"),
    (19, "0.777", "-1.963"),
    (23, "0.918", "-1.321"),
    (29, "0.039", "-0.974"),
    (31, "-0.266", "-1.047"),
    (37, "-0.863", "-0.684"),
    (41, "-0.812", "-0.105"),
    (43, "-0.953", "-0.321"),
    (47, "-1.148", "0.332"),
    (53, "-1.484", "1.505"),
    (59, "-1.062", "0.668"),
    (61, "-1.535", "0.968"),
    (67, "-1.648", "0.316"),
    (71, "-0.523", "0.463"),
    (73, "-1.039", "-0.342"),
    (79, "-0.742", "-0.542"),
    (83, "0.031", "-0.189"),
    (89, "0.410", "-1.379"),
    (97, "0.703", "-1.789"),
];

fn validate_window(records: &[enumerate::ClassRecord]) -> Result<(), String> {
    use murmur_core::ecpoint::{ap_vector_with_tables, PrimeTables};
    use murmur_core::murmur::format_mean3;
    use num_rational::Ratio;

    let window: Vec<&enumerate::ClassRecord> = records
        .iter()
        .filter(|r| (200..401).contains(&r.conductor))
        .collect();
    let even: Vec<_> = window.iter().filter(|r| r.rank % 2 == 0).collect();
    let odd: Vec<_> = window.iter().filter(|r| r.rank % 2 == 1).collect();
    if (even.len(), odd.len()) != (256, 190) {
        return Err(format!(
            "window counts {} even / {} odd, expected 256 / 190",
            even.len(),
            odd.len()
        ));
    }
    let tables = PrimeTables::new(100).unwrap();
    let sums = |group: &[&&enumerate::ClassRecord]| -> Vec<i64> {
        let mut acc = vec![0i64; tables.primes().len()];
        for rec in group {
            let curve = murmur_core::ecpoint::CurveEquation::from_coeffs([
                rec.model[0] as i64,
                rec.model[1] as i64,
                rec.model[2] as i64,
                rec.model[3] as i64,
                rec.model[4] as i64,
            ])
            .unwrap();
            for (a, v) in acc
                .iter_mut()
                .zip(ap_vector_with_tables(&curve, "", &tables).values)
            {
                *a += v;
            }
        }
        acc
    };
    let se = sums(&even);
    let so = sums(&odd);
    for (k, (p, want_e, want_o)) in WINDOW_MEANS.iter().enumerate() {
        assert_eq!(tables.primes()[k], *p);
        let got_e = format_mean3(Ratio::new(se[k], even.len() as i64));
        let got_o = format_mean3(Ratio::new(so[k], odd.len() as i64));
        if got_e != *want_e || got_o != *want_o {
            return Err(format!(
                "window mean at p={p}: got ({got_e}, {got_o}), expected ({want_e}, {want_o})"
            ));
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match cli.command {
        Command::Mordell {
            n_lo,
            n_hi,
            disc_cap,
            c4_cap,
            out,
        } => {
            eprintln!("mordell scan over [{n_lo},{n_hi}) disc<=1e{:.0} c4<={c4_cap}", (disc_cap as f64).log10());
            let models = mordell_scan(n_lo, n_hi, disc_cap, c4_cap);
            eprintln!("{} minimal models", models.len());
            let mut f = BufWriter::new(File::create(&out).expect("create output"));
            use std::io::Write as _;
            for (n, m) in &models {
                writeln!(f, "{},{},{},{},{},{}", n, m[0], m[1], m[2], m[3], m[4]).unwrap();
            }
            eprintln!("wrote {}", out.display());
        }
        Command::Small {
            conductor_max,
            a4_bound,
            a6_bound,
            out,
            no_validate,
            extra_models,
        } => {
            let opts = GenOptions {
                conductor_max,
                a4_bound,
                a6_bound,
                allow_rank3: conductor_max > 5000,
                fe_check: usize::MAX,
            };
            eprintln!("scanning box a4 <= {a4_bound}, a6 <= {a6_bound} ...");
            let mut lists = vec![scan_box(&opts)];
            eprintln!("{} minimal models from the box", lists[0].len());
            for path in &extra_models {
                let text = std::fs::read_to_string(path).expect("read extra models");
                let mut extra = Vec::new();
                for line in text.lines() {
                    let v: Vec<i128> = line.split(',').map(|x| x.parse().unwrap()).collect();
                    assert_eq!(v.len(), 6);
                    if v[0] as u128 <= conductor_max {
                        extra.push((v[0] as u128, [v[1], v[2], v[3], v[4], v[5]]));
                    }
                }
                eprintln!("merged {} models from {}", extra.len(), path.display());
                lists.push(extra);
            }
            let models = merge_models(lists);
            eprintln!(
                "{} distinct minimal models with conductor <= {conductor_max}",
                models.len()
            );
            let classes = build_classes(models, &opts);
            eprintln!("{} isogeny classes", classes.len());
            let bad = cross_check_conductors(&classes, opts.fe_check);
            if bad > 0 {
                eprintln!("error: {bad} conductor cross-check failures");
                std::process::exit(1);
            }
            eprintln!("conductor cross-check clean");
            if !no_validate {
                if let Err(msg) = validate_window(&classes) {
                    eprintln!("error: window validation failed: {msg}");
                    std::process::exit(1);
                }
                eprintln!("window [200,400] validated: counts and means reproduce");
            }
            let f = BufWriter::new(File::create(&out).expect("create output"));
            write_corpus_csv(&classes, f).expect("write corpus");
            eprintln!("wrote {}", out.display());
            summarize(&classes);
        }
        Command::Big {
            conductor_max,
            a4_bound,
            a6_bound,
            fe_check,
            out,
        } => {
            let opts = GenOptions {
                conductor_max,
                a4_bound,
                a6_bound,
                allow_rank3: true,
                fe_check,
            };
            eprintln!("scanning box a4 <= {a4_bound}, a6 <= {a6_bound} ...");
            let models = scan_box(&opts);
            eprintln!(
                "{} minimal models with conductor <= {conductor_max}",
                models.len()
            );
            let classes = build_classes(models, &opts);
            eprintln!("{} isogeny classes", classes.len());
            let bad = cross_check_conductors(&classes, opts.fe_check);
            if bad > 0 {
                eprintln!("error: {bad} conductor cross-check failures");
                std::process::exit(1);
            }
            eprintln!("conductor cross-check clean ({fe_check} sampled)");
            let f = BufWriter::new(File::create(&out).expect("create output"));
            write_corpus_csv(&classes, f).expect("write corpus");
            eprintln!("wrote {}", out.display());
            summarize(&classes);
        }
    }
}

fn summarize(classes: &[enumerate::ClassRecord]) {
    let mut by_rank = std::collections::BTreeMap::new();
    for c in classes {
        *by_rank.entry(c.rank).or_insert(0usize) += 1;
    }
    eprintln!("rank distribution: {by_rank:?}");
    for (lo, hi) in [
        (200u128, 401u128),
        (5000, 10000),
        (10000, 20000),
        (20000, 40000),
    ] {
        let in_w: Vec<_> = classes
            .iter()
            .filter(|c| lo <= c.conductor && c.conductor < hi)
            .collect();
        let even = in_w.iter().filter(|c| c.rank % 2 == 0).count();
        eprintln!(
            "window [{lo},{hi}): {} classes ({} even / {} odd)",
            in_w.len(),
            even,
            in_w.len() - even
        );
    }
}
