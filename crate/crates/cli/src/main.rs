use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use randtopo::complex::{build_complex, default_cech_dim_cap, default_rips_dim_cap, Flavor};
use randtopo::detection::connected_components_in;
use randtopo::experiment::{percolation_probe, run_experiment, ExperimentConfig};
use randtopo::genericity::{
    genericity_margin, make_generic, representation_dim_cap, stability_radius, verify_generic,
    GenericityCheck, RepresentationCertificate,
};
use randtopo::geometry::{bottleneck_set_distance, hausdorff_distance};
use randtopo::homology::{betti_numbers, betti_numbers_up_to, euler_characteristic, Field};
use randtopo::io;
use randtopo::poisson::{sample, SamplingMode};
use randtopo::Result;

/// Random simplicial complexes on Poisson point processes.
#[derive(Parser)]
#[command(name = "randtopo", version)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "RANDTOPO_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Occurrence {
    Isolated,
    Pendant,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a Poisson sample; the config holds intensity, window, seed, mode.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<SamplingMode>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build a Rips or Čech complex and write it as JSON.
    Build {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "RIPS")]
        flavor: Flavor,
        #[arg(long)]
        dim_cap: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Betti numbers of a complex JSON file.
    Betti {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, default_value = "GF2")]
        field: Field,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Hausdorff and bottleneck distances between two point files.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Genericity margin, rescaled points and a representation certificate.
    Generic {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "RIPS")]
        flavor: Flavor,
        /// Rescale even when the margin is already positive.
        #[arg(long)]
        force: bool,
        /// Random perturbations to test the certificate with.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Find isolated or pendant copies of a target complex.
    Detect {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "RIPS")]
        flavor: Flavor,
        /// Target complex JSON.
        #[arg(long)]
        target: PathBuf,
        /// `lo:hi,lo:hi,...`; defaults to the bounding box of the points.
        #[arg(long)]
        window: Option<String>,
        #[arg(long, value_enum, default_value = "isolated")]
        kind: Occurrence,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run an experiment file and write its JSON report.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Include wall-clock timings (makes output run-dependent).
        #[arg(long)]
        timings: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Crossing-probability curves as CSV.
    Percolation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn read_config(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_toml_str(&io::read_text(path)?)?;
    if let Some(s) = seed {
        cfg.process.seed = s;
    }
    Ok(cfg)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Sample {
            config,
            seed,
            mode,
            output,
        } => {
            let mut cfg = io::parse_poisson_config(&io::read_text(config)?)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = mode {
                cfg.mode = m;
            }
            io::write_points(output, &sample(&cfg)?)
        }
        Command::Build {
            points,
            rho,
            flavor,
            dim_cap,
            output,
        } => {
            let x = io::read_points(points)?;
            let cap = match (flavor, dim_cap) {
                (Flavor::Cech, None) => default_cech_dim_cap(&x),
                (Flavor::Cech, Some(c)) => c,
                (Flavor::Rips, c) => default_rips_dim_cap(&x, c.unwrap_or(x.dim() + 1)),
            };
            io::write_complex(output, &build_complex(&x, rho, cap, flavor)?.complex)
        }
        Command::Betti {
            complex,
            field,
            max_degree,
            output,
        } => {
            let k = io::read_complex(complex)?;
            // A truncated complex is exact only below its cap.
            let max_degree = match max_degree {
                None if k.is_truncated() => Some(k.dim_cap().saturating_sub(1)),
                m => m,
            };
            let b = match max_degree {
                Some(m) => betti_numbers_up_to(&k, field, m)?,
                None => betti_numbers(&k, field)?,
            };
            let mut doc = json!({
                "field": b.field,
                "betti": b.betti,
                "euler_characteristic": euler_characteristic(&k),
            });
            if k.is_truncated() {
                doc["truncated"] = true.into();
            }
            io::write_json(output, &doc)
        }
        Command::Dist { a, b, output } => {
            let (x, y) = (io::read_points(a)?, io::read_points(b)?);
            io::write_json(
                output,
                &json!({
                    "hausdorff": hausdorff_distance(&x, &y)?,
                    "bottleneck": finite(bottleneck_set_distance(&x, &y)?),
                }),
            )
        }
        Command::Generic {
            points,
            rho,
            flavor,
            force,
            trials,
            seed,
            output,
        } => {
            let x = io::read_points(points)?;
            let target = build_complex(
                &x,
                rho,
                randtopo::genericity::default_dim_cap(&x, flavor),
                flavor,
            )?
            .complex;
            let r = make_generic(&x, rho, flavor, force)?;
            let cert = RepresentationCertificate::issue(&r.points, rho, &target, flavor)?;
            let radius = stability_radius(&r.points, rho, flavor);
            let verification = if trials > 0 && radius.is_finite() && radius > 0.0 {
                let check = verify_generic(&r.points, rho, radius, flavor, trials, seed)?;
                Some(match check {
                    GenericityCheck::Stable { trials } => json!({"trials": trials, "stable": true}),
                    GenericityCheck::Counterexample { trial, perturbed } => json!({
                        "trials": trials,
                        "stable": false,
                        "counterexample_trial": trial,
                        "counterexample": perturbed.to_rows(),
                    }),
                })
            } else {
                None
            };
            io::write_json(
                output,
                &json!({
                    "flavor": flavor,
                    "rho": rho,
                    "margin": finite(genericity_margin(&x, rho, flavor)),
                    "rescaled_margin": finite(genericity_margin(&r.points, rho, flavor)),
                    "scale": r.scale,
                    "gap": r.gap,
                    "rescaled_points": r.points.to_rows(),
                    "certificate": cert,
                    "verification": verification,
                }),
            )
        }
        Command::Detect {
            points,
            rho,
            flavor,
            target,
            window,
            kind,
            output,
        } => {
            let x = io::read_points(points)?;
            let target = io::read_complex(target)?;
            let window = match window {
                Some(w) => io::parse_window(&w)?,
                None => {
                    let b = x.bounding_box().ok_or(randtopo::Error::Empty("detect"))?;
                    randtopo::geometry::Cuboid::new(b.lo().to_vec(), b.hi().to_vec())?
                }
            };
            let g = build_complex(&x, rho, representation_dim_cap(&x, &target), flavor)?;
            let dec = connected_components_in(&g, &window);
            let doc = match kind {
                Occurrence::Isolated => json!({
                    "kind": "ISOLATED",
                    "components": dec.len(),
                    "reports": dec.isolated_occurrences(&g, &target)?,
                }),
                Occurrence::Pendant => {
                    let giant = dec.giant(&g, 0);
                    let reports = match giant {
                        Some((host, _)) => dec.pendant_occurrences(&g, &target, host)?,
                        None => Vec::new(),
                    };
                    json!({
                        "kind": "PENDANT",
                        "components": dec.len(),
                        "host": giant.map(|h| h.0),
                        "host_crosses": giant.map(|h| h.1),
                        "reports": reports,
                    })
                }
            };
            io::write_json(output, &doc)
        }
        Command::Experiment {
            config,
            seed,
            timings,
            output,
        } => {
            let cfg = read_config(&config, seed)?;
            let mut report = run_experiment(&cfg)?;
            if !timings {
                report = report.without_timings();
            }
            io::write_json(output, &report)
        }
        Command::Percolation {
            config,
            seed,
            output,
        } => {
            let cfg = read_config(&config, seed)?;
            let e = &cfg.experiment;
            let curve = percolation_probe(
                cfg.complex.rho,
                e.dim.unwrap_or(2),
                &e.t_values,
                &e.window_sides,
                e.trials,
                cfg.process.seed,
            )?;
            io::write_text(output, &curve.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("randtopo: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("randtopo: {e}");
            ExitCode::FAILURE
        }
    }
}
