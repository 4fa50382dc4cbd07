//! `bqldpc`: build codes, inspect their parameters and run decoding sweeps.
//!
//! Exit status is 0 on success, 2 for invalid input or configuration and 3
//! when a run fails after starting.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biased_qldpc::codes::{
    classical_params, quantum_distance, tanner_girth, write_bundle, CodeBundle, RotatedCode, SearchBudget,
};
use biased_qldpc::decoder::DecoderConfig;
use biased_qldpc::experiment::{resume_sweep, run_sweep, CodeRecipe, ExperimentConfig};
use biased_qldpc::io::read_matrix;
use biased_qldpc::noise::{hashing_probability, Axis};
use biased_qldpc::sim::{ExperimentResult, RunLimits, UpdateMode};
use biased_qldpc::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bqldpc", version, about = "Bias-tailored quantum LDPC codes")]
struct Cli {
    /// Worker threads for Monte Carlo trials; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code, write its bundle and print [[N,K,D]].
    Build {
        #[command(flatten)]
        recipe: RecipeArgs,
        /// Bundle directory (default: codes/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
        /// Largest weight tried by the exhaustive distance search.
        #[arg(long, default_value_t = 6)]
        max_weight: usize,
    },
    /// Parameters of a classical check matrix or a quantum code.
    Params {
        /// Classical parity-check matrix (.alist or dense text).
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[command(flatten)]
        recipe: Option<RecipeArgs>,
        /// Distance search bound for classical codes.
        #[arg(long, default_value_t = 64)]
        dmax: usize,
    },
    /// Distance bounds of a quantum code, including infinite-bias distances.
    Distance {
        #[command(flatten)]
        recipe: RecipeArgs,
        #[arg(long, default_value_t = 6)]
        max_weight: usize,
        #[arg(long, default_value_t = 200_000_000)]
        max_candidates: u64,
    },
    /// Hashing-bound error rate at a given rate over a bias grid, as CSV.
    Hashing {
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
        #[arg(long, default_value = "X")]
        axis: Axis,
        /// Comma-separated bias values; `inf` allowed.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,3,10,100,1000,1000000")]
        eta: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sweep described by a JSON configuration file.
    Simulate {
        config: PathBuf,
        /// Overrides the configuration's `output`; `-` writes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep described on the command line.
    Sweep {
        #[command(flatten)]
        recipe: RecipeArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Print the equivalent JSON configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
}

#[derive(Args, Clone)]
#[group(multiple = false)]
struct RecipeArgs {
    #[arg(long, num_args = 2, value_names = ["N1", "N2"])]
    xzzx_toric: Option<Vec<usize>>,
    #[arg(long, num_args = 2, value_names = ["N1", "N2"])]
    css_toric: Option<Vec<usize>>,
    #[arg(long, num_args = 2, value_names = ["N1", "N2"])]
    toric: Option<Vec<usize>>,
    #[arg(long, num_args = 2, value_names = ["H1", "H2"])]
    hgp: Option<Vec<PathBuf>>,
    #[arg(long, num_args = 2, value_names = ["A1", "A2"])]
    lifted_product: Option<Vec<PathBuf>>,
    #[arg(long, num_args = 2, value_names = ["A1", "A2"])]
    bias_tailored: Option<Vec<PathBuf>>,
    #[arg(long, value_name = "DIR")]
    bundle: Option<PathBuf>,
}

impl RecipeArgs {
    fn recipe(self) -> Option<CodeRecipe> {
        let pair = |v: Vec<PathBuf>| (v[0].clone(), v[1].clone());
        Some(if let Some(v) = self.xzzx_toric {
            CodeRecipe::XzzxToric { n1: v[0], n2: v[1] }
        } else if let Some(v) = self.css_toric {
            CodeRecipe::CssToric { n1: v[0], n2: v[1] }
        } else if let Some(v) = self.toric {
            CodeRecipe::Toric { n1: v[0], n2: v[1] }
        } else if let Some(v) = self.hgp {
            let (h1, h2) = pair(v);
            CodeRecipe::Hgp { h1, h2 }
        } else if let Some(v) = self.lifted_product {
            let (a1, a2) = pair(v);
            CodeRecipe::LiftedProduct { a1, a2 }
        } else if let Some(v) = self.bias_tailored {
            let (a1, a2) = pair(v);
            CodeRecipe::BiasTailored { a1, a2 }
        } else {
            CodeRecipe::Bundle { dir: self.bundle? }
        })
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "X")]
    axis: Axis,
    /// Comma-separated bias values; `inf` allowed.
    #[arg(long, value_delimiter = ',', required = true)]
    eta: Vec<String>,
    /// Comma-separated total error rates.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = RunLimits::default().min_failures)]
    min_failures: u64,
    #[arg(long, default_value_t = RunLimits::default().batch_size)]
    batch_size: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "off")]
    update: UpdateMode,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    osd_order: usize,
    #[arg(long, default_value_t = DecoderConfig::default().llr_clip)]
    llr_clip: f64,
    #[arg(long)]
    name: Option<String>,
    /// CSV destination; stdout when absent or `-`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error together with the exit status it maps to.
struct Failure {
    status: u8,
    error: Error,
}

fn input(error: impl Into<Error>) -> Failure {
    Failure { status: 2, error: error.into() }
}

fn runtime(error: impl Into<Error>) -> Failure {
    Failure { status: 3, error: error.into() }
}

fn no_recipe() -> Failure {
    input(Error::Config("no code given; use one of --xzzx-toric, --css-toric, --toric, --hgp, --lifted-product, --bias-tailored, --bundle".into()))
}

fn parse_eta(values: &[String]) -> Result<Vec<f64>, Failure> {
    values
        .iter()
        .map(|v| match v.trim() {
            "inf" | "infinity" => Ok(f64::INFINITY),
            t => t.parse().map_err(|_| input(Error::Config(format!("bad bias value {t:?}")))),
        })
        .collect()
}

fn fmt_eta(eta: f64) -> String {
    if eta.is_infinite() {
        "inf".into()
    } else {
        eta.to_string()
    }
}

fn build_code(recipe: &CodeRecipe, base: &Path) -> Result<RotatedCode, Failure> {
    let code = recipe.build(base).map_err(input)?;
    code.css().validate().map_err(input)?;
    Ok(code)
}

fn progress(r: &ExperimentResult) {
    eprintln!(
        "eta={} p={} trials={} failures={} P_W={:.3e}",
        fmt_eta(r.spec.eta),
        r.spec.p,
        r.trials,
        r.failures,
        r.p_w()
    );
}

fn execute(cfg: &ExperimentConfig, base: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let code = build_code(&cfg.code, base)?;
    if code.k() == 0 {
        return Err(input(Error::Config("code encodes no logical qubits".into())));
    }
    match out {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            run_sweep(cfg, &code, &mut lock, progress).map_err(runtime)?;
        }
        Some(path) => {
            let summary = resume_sweep(cfg, &code, path, progress).map_err(|e| match e {
                Error::Config(_) => input(e),
                e => runtime(e),
            })?;
            eprintln!("{}: {} points computed, {} already present", path.display(), summary.computed, summary.skipped);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(input(Error::Config("--threads must be at least 1".into())));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| runtime(Error::Config(e.to_string())))?;
    }
    match cli.command {
        Command::Build { recipe, out, name, max_weight } => {
            let recipe = recipe.recipe().ok_or_else(no_recipe)?;
            let code = build_code(&recipe, Path::new("."))?;
            let name = name.unwrap_or_else(|| recipe.default_name());
            let d = quantum_distance(&code, &SearchBudget::with_max_weight(max_weight));
            let dist = d.d.map_or_else(|| "unknown".to_string(), |b| b.to_string());
            let mut bundle = CodeBundle::new(&name, code, recipe.to_json());
            bundle.distance = dist.clone();
            let dir = out.unwrap_or_else(|| Path::new("codes").join(&name));
            write_bundle(&bundle, &dir).map_err(runtime)?;
            println!("[[{},{},{}]]", bundle.code.n(), bundle.code.k(), dist);
            eprintln!("wrote {}", dir.display());
        }
        Command::Params { matrix, recipe, dmax } => {
            if let Some(path) = matrix {
                let h = read_matrix(&path).map_err(input)?;
                let c = classical_params(&h, dmax);
                let girth = tanner_girth(&h).map_or_else(|| "none".into(), |g| g.to_string());
                println!("{c}");
                println!("checks={} girth={girth}", h.rows());
            } else {
                let recipe = recipe.and_then(RecipeArgs::recipe).ok_or_else(no_recipe)?;
                let code = build_code(&recipe, Path::new("."))?;
                let css = code.css();
                println!("N={} K={}", code.n(), code.k());
                println!("hx={}x{} hz={}x{}", css.hx().rows(), css.hx().cols(), css.hz().rows(), css.hz().cols());
                println!("sector1_size={} rotated_qubits={}", css.sector1_size(), code.rotated_qubits().len());
            }
        }
        Command::Distance { recipe, max_weight, max_candidates } => {
            let recipe = recipe.recipe().ok_or_else(no_recipe)?;
            let code = build_code(&recipe, Path::new("."))?;
            let budget = SearchBudget { max_weight, max_candidates, ..SearchBudget::default() };
            let d = quantum_distance(&code, &budget);
            let show = |b: Option<biased_qldpc::codes::DistanceBound>| b.map_or_else(|| "none".into(), |b| b.to_string());
            println!("N={} K={}", code.n(), code.k());
            println!("d={}", show(d.d));
            println!("d_x_only={}", show(d.x_only));
            println!("d_z_only={}", show(d.z_only));
        }
        Command::Hashing { rate, axis, eta, out } => {
            let etas = parse_eta(&eta)?;
            if !(0.0..=1.0).contains(&rate) {
                return Err(input(Error::Config(format!("rate {rate} outside [0, 1]"))));
            }
            let mut csv = String::from("eta,p_hashing\n");
            for eta in etas {
                let cell = match hashing_probability(rate, axis, eta) {
                    Ok(p) => format!("{p:.6}"),
                    Err(Error::NoSolution(_)) => String::new(),
                    Err(e) => return Err(input(e)),
                };
                let _ = writeln!(csv, "{},{cell}", fmt_eta(eta));
            }
            match out {
                Some(path) => fs::write(path, csv).map_err(runtime)?,
                None => io::stdout().write_all(csv.as_bytes()).map_err(runtime)?,
            }
        }
        Command::Simulate { config, out } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| input(Error::Config(format!("cannot read {}: {e}", config.display()))))?;
            let cfg = ExperimentConfig::from_json(&text).map_err(input)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let out = match out {
                Some(p) if p.as_os_str() == "-" => None,
                Some(p) => Some(p),
                None => cfg.output.as_ref().map(|p| base.join(p)),
            };
            execute(&cfg, base, out.as_deref())?;
        }
        Command::Sweep { recipe, sweep, print_config } => {
            let cfg = ExperimentConfig {
                name: sweep.name,
                code: recipe.recipe().ok_or_else(no_recipe)?,
                axis: sweep.axis,
                eta: parse_eta(&sweep.eta)?,
                p: sweep.p,
                decoder: DecoderConfig {
                    max_iterations: sweep.max_iterations,
                    osd_order: sweep.osd_order,
                    llr_clip: sweep.llr_clip,
                    ..DecoderConfig::default()
                },
                trials: sweep.trials,
                min_failures: sweep.min_failures,
                batch_size: sweep.batch_size,
                seed: sweep.seed,
                update: sweep.update,
                output: sweep.out.filter(|p| p.as_os_str() != "-"),
            };
            cfg.validate().map_err(input)?;
            if print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            execute(&cfg, Path::new("."), cfg.output.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { status, error }) => {
            eprintln!("error: {error}");
            ExitCode::from(status)
        }
    }
}
