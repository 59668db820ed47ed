//! Command-line front end: run the verification suite, describe a context's
//! derived constants, or print sharpness sequences.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dunkl_verify::checks::fractional::fractional_constant;
use dunkl_verify::checks::hardy::sharpness_row_values;
use dunkl_verify::checks::rellich::{rellich_constant, rellich_plateau_ratio};
use dunkl_verify::config::{default_config, ExperimentConfig};
use dunkl_verify::suite::{build_context, run_suite};

#[derive(Parser)]
#[command(
    name = "dunkl-verify",
    version,
    about = "Numerical verification of sharp Hardy-type inequalities for Dunkl operators on finite root systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite; one JSON report line per check row.
    Verify {
        /// JSON experiment configuration (defaults to the built-in suite).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the JSON lines to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print a context's root data and every derived constant.
    Describe {
        /// Family descriptor, e.g. A2, B3, Z2^2, I2(5), A1xZ2^1.
        #[arg(long)]
        family: String,
        /// Rank for bare family letters like `A` or `B`.
        #[arg(long)]
        rank: Option<usize>,
        /// One multiplicity per orbit (exact strings like 1/2, 0.3, 2).
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        k: Vec<String>,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print a sharpness sequence approaching the optimal constant.
    Sharpness {
        /// Which constant: `hardy` (exact rational quotients) or `rellich`
        /// (plateau quotients).
        #[arg(long)]
        theorem: String,
        /// Largest sequence index to print.
        #[arg(long, default_value_t = 50)]
        n_max: u64,
        #[arg(long, default_value = "Z2^1")]
        family: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        k: Option<Vec<String>>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Command::Verify { config, out, jobs } => run_verify(config, out, jobs),
        Command::Describe {
            family,
            rank,
            k,
            json,
        } => run_describe(&family, rank, &k, json),
        Command::Sharpness {
            theorem,
            n_max,
            family,
            rank,
            k,
        } => run_sharpness(&theorem, n_max, &family, rank, k),
    }
}

fn run_verify(config: Option<PathBuf>, out: Option<PathBuf>, jobs: Option<usize>) -> ExitCode {
    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let cfg = match config {
        Some(path) => match ExperimentConfig::load(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => default_config(),
    };
    let outcome = match run_suite(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut handle = stdout.lock();
    for line in &outcome.lines {
        if writeln!(handle, "{line}").is_err() {
            return ExitCode::from(2);
        }
    }
    drop(handle);
    if let Some(path) = out.or(cfg.output.clone()) {
        if let Err(e) = std::fs::write(&path, outcome.lines.join("\n") + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let s = &outcome.summary;
    eprintln!(
        "{} rows: {} passed, {} failed, {} skipped ({:.2} s)",
        s.total,
        s.passed,
        s.failed,
        s.skipped,
        outcome.elapsed.as_secs_f64()
    );
    if s.failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_describe(family: &str, rank: Option<usize>, k: &[String], json: bool) -> ExitCode {
    let ctx = match build_context(family, rank, k) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let n = ctx.dim() as f64;
    let gamma = ctx.gamma();
    let nu = ctx.homogeneous_dim();
    let lam = (nu - 2.0) * (nu - 2.0) / 4.0;
    let orbit_sizes = ctx.system().positive_orbit_sizes();
    let ks = ctx.multiplicities().values().to_vec();

    if json {
        let doc = serde_json::json!({
            "descriptor": ctx.descriptor(),
            "family": ctx.system().label(),
            "dim": ctx.dim(),
            "positive_roots": ctx.system().num_positive(),
            "orbit_sizes": orbit_sizes,
            "k": ks,
            "gamma": gamma,
            "homogeneous_dim": nu,
            "l2_hardy_constant": if nu > 2.0 { Some(lam) } else { None },
            "rellich_constant": if (nu - 2.0).abs() > 1e-12 { Some(rellich_constant(nu)) } else { None },
            "fractional_c1": if nu > 2.0 { Some(fractional_constant(nu, 1.0)) } else { None },
            "sobolev_q": if nu > 2.0 { Some(2.0 * nu / (nu - 2.0)) } else { None },
            "gradient_pairing_p_max": if gamma > 0.0 { Some(nu / (2.0 * gamma)) } else { None },
            "full_hardy_p_max": nu / (1.0 + 2.0 * gamma),
        });
        println!("{doc}");
        return ExitCode::SUCCESS;
    }

    println!("context            {}", ctx.descriptor());
    println!("ambient dimension  {}", ctx.dim());
    println!("positive roots     {}", ctx.system().num_positive());
    for (i, (size, kv)) in orbit_sizes.iter().zip(&ks).enumerate() {
        println!("orbit {i}            {size} positive roots, k = {kv}");
    }
    println!("gamma              {gamma}");
    println!("homogeneous dim ν  {nu}  (= N + 2γ, N = {n})");
    if nu > 2.0 {
        println!("L² Hardy constant  {lam}  (= (ν-2)²/4, sharp)");
        println!("Sobolev exponent   {}  (= 2ν/(ν-2))", 2.0 * nu / (nu - 2.0));
        println!(
            "fractional C(1)    {}  (= (ν-2)/2)",
            fractional_constant(nu, 1.0)
        );
    } else {
        println!("L² Hardy constant  not defined for ν ≤ 2");
    }
    if (nu - 2.0).abs() > 1e-12 {
        println!(
            "Rellich constant   {}  (= ν²(ν-4)²/16, needs ν ≠ 2)",
            rellich_constant(nu)
        );
    }
    if gamma > 0.0 {
        println!(
            "⟨x,∇_k f⟩ pairing   admissible for 1 < p < {}  (= ν/2γ)",
            nu / (2.0 * gamma)
        );
    }
    let pmax = nu / (1.0 + 2.0 * gamma);
    if pmax > 1.0 {
        println!("Lᵖ Hardy range     1 < p < {pmax}  (= ν/(1+2γ))");
    } else {
        println!("Lᵖ Hardy range     empty (ν/(1+2γ) = {pmax} ≤ 1)");
    }
    ExitCode::SUCCESS
}

fn run_sharpness(
    theorem: &str,
    n_max: u64,
    family: &str,
    rank: Option<usize>,
    k: Option<Vec<String>>,
) -> ExitCode {
    let k = k.unwrap_or_else(|| vec!["2".to_string()]);
    let ctx = match build_context(family, rank, &k) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let nu = ctx.homogeneous_dim();
    match theorem {
        "hardy" => {
            if nu <= 2.0 {
                eprintln!("error: the sequence needs ν > 2, got ν = {nu}");
                return ExitCode::from(2);
            }
            let lam = (nu - 2.0) * (nu - 2.0) / 4.0;
            for n in 1..=n_max.max(1) {
                match sharpness_row_values(&ctx, n) {
                    Some((quotient, _closed)) => {
                        println!(
                            "{}",
                            serde_json::json!({
                                "n": n,
                                "quotient": quotient,
                                "limit": lam,
                                "excess": quotient - lam,
                            })
                        );
                    }
                    None => {
                        eprintln!("error: the sequence needs ν > 2");
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        "rellich" => {
            if (nu - 2.0).abs() <= 1e-9 {
                eprintln!("error: the plateau family needs ν ≠ 2, got ν = {nu}");
                return ExitCode::from(2);
            }
            let constant = rellich_constant(nu);
            let mut n = 4u64;
            while n <= n_max.max(4) {
                let quotient = rellich_plateau_ratio(nu, n);
                println!(
                    "{}",
                    serde_json::json!({
                        "n": n,
                        "quotient": quotient,
                        "limit": constant,
                        "excess": quotient - constant,
                    })
                );
                n *= 2;
            }
            ExitCode::SUCCESS
        }
        other => {
            eprintln!("error: unknown sharpness sequence `{other}` (use `hardy` or `rellich`)");
            ExitCode::from(2)
        }
    }
}
