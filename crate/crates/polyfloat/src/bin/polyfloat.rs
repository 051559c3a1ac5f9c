//! Thin command line over the library: build nets and bodies, measure
//! distances between body filesers, run experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime failure.

use clap::{Parser, Subcommand};
use polyfloat::body::{bm_upper, hausdorff_distance, log_hausdorff, AnyBody};
use polyfloat::density::DensitySpec;
use polyfloat::experiment::{
    rows_to_csv, run, EpsSpec, ExperimentConfig, ExperimentError, ExperimentKind,
};
use polyfloat::float::{convex_floating_body_2d, floating_polytope, level_set_body, radon_body};
use polyfloat::net::cached_net;
use polyfloat::sampler::{random_polytope, sample};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "polyfloat", version, about = "Random polytopes, floating bodies and log-concave measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a validated sphere net and print or write its JSON
    Net {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Construct a body (floating, level-set, radon, polygon floating body
    /// or sampled polytope) from a JSON config and write its JSON
    Body {
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Distance between two body files sharing a net
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "log-hausdorff")]
        metric: String,
    },
    /// Run a named experiment from a JSON config, writing a CSV
    Experiment {
        /// thm1 | thm2 | thm3 | lemma2 | lower-bounds | universal | zeta
        name: String,
        #[arg(long)]
        config: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum BodyConfig {
    Floating {
        density: DensitySpec,
        net: NetRef,
        delta: f64,
    },
    LevelSet {
        density: DensitySpec,
        net: NetRef,
        delta: f64,
    },
    Radon {
        density: DensitySpec,
        net: NetRef,
        delta: f64,
    },
    Polytope {
        density: DensitySpec,
        net: NetRef,
        n: usize,
        seed: u64,
    },
    PolygonFloating {
        vertices: Vec<(f64, f64)>,
        net: NetRef,
        lambda: f64,
    },
    Primitive {
        shape: polyfloat::universal::StandardShape,
        net: NetRef,
    },
}

#[derive(Debug, Deserialize)]
struct NetRef {
    dim: usize,
    eps: f64,
    #[serde(default)]
    seed: u64,
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> CliError {
        match e {
            ExperimentError::Config { .. } => CliError::Config(e.to_string()),
            ExperimentError::Runtime(_) => CliError::Runtime(e.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("runtime failure: {msg}");
            std::process::exit(3);
        }
    }
}

fn emit(text: &str, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {path}: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Net { dim, eps, seed, out } => {
            let net = cached_net(dim, eps, seed).map_err(|e| CliError::Config(e.to_string()))?;
            eprintln!(
                "net: {} directions, covering radius {:.6} (eps {})",
                net.len(),
                net.covering_radius(),
                eps
            );
            emit(&net.to_json(), out.as_deref())
        }
        Command::Body { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{config}: {e}")))?;
            let cfg: BodyConfig =
                serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
            let json = build_body(cfg)?;
            emit(&json, out.as_deref())
        }
        Command::Distance { a, b, metric } => {
            let load = |path: &String| -> Result<_, CliError> {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{path}: {e}")))?;
                Ok(AnyBody::from_json(&text)
                    .map_err(|e| CliError::Config(format!("{path}: {e}")))?
                    .into_support())
            };
            let ka = load(&a)?;
            let kb = load(&b)?;
            let value = match metric.as_str() {
                "hausdorff" => hausdorff_distance(&ka, &kb),
                "log-hausdorff" => log_hausdorff(&ka, &kb).map(|(v, _)| v),
                "bm-upper" => bm_upper(&ka, &kb),
                other => {
                    return Err(CliError::Config(format!(
                        "unknown metric `{other}`; use hausdorff | log-hausdorff | bm-upper"
                    )))
                }
            }
            .map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("{}", polyfloat::numeric::g17(value));
            Ok(())
        }
        Command::Experiment {
            name,
            config,
            seed,
            out,
            workers,
            dim,
            n,
            trials,
            eps,
            timing,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{config}: {e}")))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            let named = parse_kind(&name)?;
            if cfg.experiment != named {
                return Err(CliError::Config(format!(
                    "experiment name `{name}` does not match the config"
                )));
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = Some(w);
            }
            if let Some(d) = dim {
                cfg.dim = d;
            }
            if let Some(n1) = n {
                cfg.n_grid = Some(vec![n1]);
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(e) = eps {
                cfg.eps = EpsSpec::Fixed(e);
            }
            if timing {
                cfg.timing = true;
            }
            if let Some(o) = out {
                cfg.out = Some(o);
            }
            let rows = run(&cfg)?;
            let csv = rows_to_csv(&rows);
            match cfg.out.as_deref() {
                Some(path) => {
                    std::fs::write(path, &csv)
                        .map_err(|e| CliError::Runtime(format!("cannot write {path}: {e}")))?;
                    eprintln!("wrote {} rows to {path}", rows.len());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn parse_kind(name: &str) -> Result<ExperimentKind, CliError> {
    Ok(match name {
        "thm1" => ExperimentKind::Thm1,
        "thm2" => ExperimentKind::Thm2,
        "thm3" => ExperimentKind::Thm3,
        "lemma2" => ExperimentKind::Lemma2,
        "lower-bounds" => ExperimentKind::LowerBounds,
        "universal" => ExperimentKind::Universal,
        "zeta" => ExperimentKind::Zeta,
        other => {
            return Err(CliError::Config(format!(
                "unknown experiment `{other}`; use thm1 | thm2 | thm3 | lemma2 | lower-bounds | universal | zeta"
            )))
        }
    })
}

fn build_body(cfg: BodyConfig) -> Result<String, CliError> {
    let net_of = |r: &NetRef| {
        cached_net(r.dim, r.eps, r.seed).map_err(|e| CliError::Config(e.to_string()))
    };
    match cfg {
        BodyConfig::Floating { density, net, delta } => {
            let d = density.build().map_err(|e| CliError::Config(e.to_string()))?;
            let net = net_of(&net)?;
            let f = floating_polytope(&d, &net, delta)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(f.body.to_json_with(Some(delta), Some(d.class_name())))
        }
        BodyConfig::LevelSet { density, net, delta } => {
            let d = density.build().map_err(|e| CliError::Config(e.to_string()))?;
            let net = net_of(&net)?;
            let b =
                level_set_body(&d, &net, delta).map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(b.body.to_json_with(Some(delta), Some(d.class_name())))
        }
        BodyConfig::Radon { density, net, delta } => {
            let d = density.build().map_err(|e| CliError::Config(e.to_string()))?;
            let net = net_of(&net)?;
            let b = radon_body(&d, &net, delta).map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(b.body.to_json_with(Some(delta), Some(d.class_name())))
        }
        BodyConfig::Polytope { density, net, n, seed } => {
            let d = density.build().map_err(|e| CliError::Config(e.to_string()))?;
            let net = net_of(&net)?;
            let s = sample(&d, n, seed).map_err(|e| CliError::Runtime(e.to_string()))?;
            let poly = random_polytope(&s, &net).map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(poly.to_json_with(None, Some(d.class_name())))
        }
        BodyConfig::PolygonFloating { vertices, net, lambda } => {
            let net = net_of(&net)?;
            let b = convex_floating_body_2d(&vertices, &net, lambda)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(b.to_json_with(Some(lambda), Some("uniform-polygon")))
        }
        BodyConfig::Primitive { shape, net } => {
            let net = net_of(&net)?;
            let fam = polyfloat::universal::standard_family(&net, &[shape])
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(fam.body(1).unwrap().to_json())
        }
    }
}
