//! `bspec` — spectral analysis of Bernoulli convolution measures.
//!
//! Every subcommand prints machine-readable CSV or JSON to stdout (or
//! `--out`). Rationals cross the boundary as `num/den` strings and floats as
//! decimals with 17 significant digits, so output round-trips losslessly and
//! identical invocations produce byte-identical output.
//!
//! Exit codes: 0 success, 1 contract violation, 2 resource cap exceeded,
//! 3 unresolved search, 64 usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bernoulli_spectra::lattice::{
    enumerate_gamma, gamma_csv, gamma_json, is_hadamard_triple, SpectrumSpec, DEFAULT_ENUM_CAP,
};
use bernoulli_spectra::maximal::{find_witness, stress_maximality};
use bernoulli_spectra::measure::{eval_muhat_at, sample_measure, BernoulliParam};
use bernoulli_spectra::rational::{
    format_float, format_rational, parse_grid, parse_rational, to_f64, Integer, Rational,
};
use bernoulli_spectra::spectral::{
    classify_scan, frame_bound_estimates, gram_json, gram_section, scan_depths,
    ClassifyTolerances, SpectrumFamily, DEFAULT_GRAM_CAP,
};
use bernoulli_spectra::transfer::{
    chain_identity_residual_38, contractivity_constant, invariant_interval,
    iterate_to_fixed_point, GridFunction, TransferSpec,
};
use bernoulli_spectra::zeros::{pairwise_orthogonal, DEFAULT_PAIRWISE_CAP};
use bernoulli_spectra::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bspec",
    version,
    about = "Fourier transforms, exponential bases, and transfer operators for Bernoulli convolutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where the subcommand supports both.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated transform value Π cos(2πλ^k t) with its error bound.
    Muhat {
        /// λ as a "q/m" rational in (0,1).
        #[arg(long)]
        lambda: String,
        /// Evaluation point (rational or decimal; evaluated exactly).
        #[arg(long)]
        t: String,
        /// Number of product factors.
        #[arg(long, default_value_t = 30)]
        depth: u32,
    },
    /// Enumerate the candidate spectrum pΓ(1/2n) to a digit depth.
    Gamma {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long = "K")]
        digit_depth: u32,
    },
    /// Exact pairwise orthogonality of a frequency set in L²(μ_λ).
    Ortho {
        #[arg(long)]
        lambda: String,
        /// Explicit comma-separated rational frequencies.
        #[arg(long, conflicts_with_all = ["n", "p", "digit_depth"])]
        set: Option<String>,
        #[arg(long, requires = "digit_depth")]
        n: Option<u64>,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long = "K")]
        digit_depth: Option<u32>,
    },
    /// Truncated spectral function over a grid, one or more digit depths.
    Scan {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        p: u64,
        /// Comma-separated ascending digit depths, e.g. "4,8,12,16".
        #[arg(long = "K")]
        digit_depths: String,
        /// Grid as "a:b:steps" with rational endpoints.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 30)]
        depth: u32,
        /// Emit a JSON diagnosis over the depth family instead of CSV rows.
        #[arg(long)]
        diagnose: bool,
    },
    /// Gram section μ̂(γ_i - γ_j) with frame-bound estimates.
    Gram {
        #[arg(long)]
        lambda: String,
        #[arg(long, conflicts_with_all = ["n", "p", "digit_depth"])]
        set: Option<String>,
        #[arg(long, requires = "digit_depth")]
        n: Option<u64>,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long = "K")]
        digit_depth: Option<u32>,
        #[arg(long, default_value_t = 30)]
        depth: u32,
        #[arg(long, default_value_t = 200)]
        iters: u32,
    },
    /// Transfer-operator dynamics for λ = 1/(2n) and odd dilation p.
    Transfer {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4097)]
        nodes: usize,
        #[arg(long, default_value_t = 100)]
        max_iters: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Starting function on the invariant interval.
        #[arg(long, value_enum, default_value_t = Start::Sine)]
        start: Start,
        /// What to print: the iteration history, the final function, or the
        /// contractivity constant.
        #[arg(long, value_enum, default_value_t = Emit::History)]
        emit: Emit,
    },
    /// Residuals of the μ_{3/8} chain identities T_k f_(k+1) = f_k.
    Chain {
        #[arg(long = "K", default_value_t = 8)]
        digit_depth: u32,
        #[arg(long, default_value_t = 30)]
        depth: u32,
        #[arg(long, default_value = "0:3:64")]
        grid: String,
        #[arg(long, default_value_t = 2)]
        k_max: u32,
    },
    /// Maximality witness: γ ∈ Γ(1/8) with μ̂_{3/8}(t-γ) ≠ 0.
    Maximal {
        /// Rational t outside the lattice.
        #[arg(long)]
        t: String,
    },
    /// Randomized stress run of the maximality construction.
    Stress {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1_000_000)]
        height: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reproducible draws of the truncated random series Σ ±λ^k.
    Sample {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        terms: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hadamard-triple check for digit sets (B, L, N).
    Hadamard {
        /// Comma-separated integers.
        #[arg(long)]
        b: String,
        /// Comma-separated rationals.
        #[arg(long)]
        l: String,
        #[arg(long)]
        modulus: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Start {
    Ones,
    Bump,
    Sine,
    Decay,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    History,
    Function,
    Constant,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    let out = cli.out.clone();
    match run(cli) {
        Ok(output) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, output) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::FAILURE;
                }
            } else {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(output.as_bytes());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Enumeration cap, overridable through BS_MAX_ENUM.
fn enum_cap() -> Result<u32> {
    match std::env::var("BS_MAX_ENUM") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Contract(format!("BS_MAX_ENUM must be an integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

fn parse_set(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

fn parse_depth_list(s: &str) -> Result<Vec<u32>> {
    let depths: Vec<u32> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Contract(format!("bad digit depth {x:?}")))
        })
        .collect::<Result<_>>()?;
    if depths.is_empty() {
        return Err(Error::Contract("need at least one digit depth".into()));
    }
    Ok(depths)
}

/// Frequencies from either an explicit set or lattice parameters.
fn frequencies(
    set: Option<String>,
    n: Option<u64>,
    p: u64,
    digit_depth: Option<u32>,
) -> Result<Vec<Rational>> {
    match (set, n, digit_depth) {
        (Some(s), _, _) => parse_set(&s),
        (None, Some(n), Some(k)) => {
            let fam = SpectrumFamily::enumerate(SpectrumSpec::new(n, p, k)?, enum_cap()?)?;
            Ok(fam.values().cloned().collect())
        }
        _ => Err(Error::Contract(
            "give either --set or --n with --K".into(),
        )),
    }
}

fn want(format: Option<Format>, default: Format, supported: &[Format]) -> Result<Format> {
    let f = format.unwrap_or(default);
    if supported.contains(&f) {
        Ok(f)
    } else {
        Err(Error::Contract(
            "this subcommand does not support the requested format".into(),
        ))
    }
}

fn json_line(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Muhat { lambda, t, depth } => {
            if depth == 0 {
                return Err(Error::Contract("depth must be positive".into()));
            }
            let lam = BernoulliParam::parse(&lambda)?;
            let t = parse_rational(&t)?;
            let v = eval_muhat_at(&lam, &t, depth);
            match want(cli.format, Format::Csv, &[Format::Csv, Format::Json])? {
                Format::Csv => Ok(format!(
                    "t,value,error_bound,depth\n{},{},{},{}\n",
                    format_rational(&t),
                    format_float(v.value),
                    format_float(v.abs_error_bound),
                    v.product_depth
                )),
                Format::Json => Ok(json_line(serde_json::json!({
                    "t": format_rational(&t),
                    "value": v.value,
                    "error_bound": v.abs_error_bound,
                    "depth": v.product_depth,
                }))),
            }
        }
        Command::Gamma { n, p, digit_depth } => {
            let spec = SpectrumSpec::new(n, p, digit_depth)?;
            let elements = enumerate_gamma(&spec, enum_cap()?)?;
            match want(cli.format, Format::Csv, &[Format::Csv, Format::Json])? {
                Format::Csv => Ok(gamma_csv(&spec, &elements)),
                Format::Json => Ok(json_line(gamma_json(&spec, &elements))),
            }
        }
        Command::Ortho {
            lambda,
            set,
            n,
            p,
            digit_depth,
        } => {
            want(cli.format, Format::Json, &[Format::Json])?;
            let lam = BernoulliParam::parse(&lambda)?;
            let freqs = frequencies(set, n, p, digit_depth)?;
            let report = pairwise_orthogonal(&lam, &freqs, DEFAULT_PAIRWISE_CAP)?;
            Ok(json_line(report.to_json()))
        }
        Command::Scan {
            lambda,
            n,
            p,
            digit_depths,
            grid,
            depth,
            diagnose,
        } => {
            want(cli.format, Format::Csv, &[Format::Csv])?;
            let lam = BernoulliParam::parse(&lambda)?;
            let depths = parse_depth_list(&digit_depths)?;
            let grid = parse_grid(&grid)?;
            let deepest = *depths.last().unwrap();
            let scans = scan_depths(
                &lam,
                SpectrumSpec::new(n, p, deepest)?,
                &depths,
                &grid,
                depth,
                enum_cap()?,
            )?;
            if diagnose {
                let diagnosis = classify_scan(&scans, &ClassifyTolerances::default())?;
                let last = scans.last().unwrap();
                return Ok(json_line(serde_json::json!({
                    "diagnosis": diagnosis.as_str(),
                    "digit_depths": depths,
                    "product_depth": depth,
                    "min_at_deepest": last.min_value(),
                })));
            }
            let mut out = String::from("t,value,error_bound,K,D\n");
            for scan in &scans {
                // skip each scan's own header, keep its rows
                out.push_str(scan.to_csv().split_once('\n').map(|x| x.1).unwrap_or(""));
            }
            Ok(out)
        }
        Command::Gram {
            lambda,
            set,
            n,
            p,
            digit_depth,
            depth,
            iters,
        } => {
            want(cli.format, Format::Json, &[Format::Json])?;
            let lam = BernoulliParam::parse(&lambda)?;
            let freqs = frequencies(set, n, p, digit_depth)?;
            let g = gram_section(&lam, &freqs, depth, DEFAULT_GRAM_CAP)?;
            let bounds = frame_bound_estimates(&g, iters)?;
            Ok(json_line(gram_json(&g, &bounds)))
        }
        Command::Transfer {
            n,
            p,
            nodes,
            max_iters,
            tol,
            start,
            emit,
        } => {
            want(cli.format, Format::Csv, &[Format::Csv])?;
            if emit == Emit::Constant {
                let c = contractivity_constant(n, p)?;
                return Ok(format!(
                    "n,p,constant,contractive\n{},{},{},{}\n",
                    n,
                    p,
                    format_float(c.constant),
                    c.contractive
                ));
            }
            let spec = TransferSpec::new(n, p)?;
            let (_, r) = invariant_interval(n, p)?;
            let r = to_f64(&r);
            let f0 = match start {
                Start::Ones => GridFunction::constant(0.0, r, nodes, 1.0)?,
                Start::Bump => GridFunction::from_fn(0.0, r, nodes, |t| 1.0 + t * (r - t))?,
                Start::Sine => GridFunction::from_fn(0.0, r, nodes, |t| {
                    1.0 + 0.5 * (std::f64::consts::PI * t).sin()
                })?,
                Start::Decay => GridFunction::from_fn(0.0, r, nodes, |t| (1.0 + t) * (-t).exp())?,
            };
            let run = iterate_to_fixed_point(&spec, f0, max_iters, tol)?;
            match emit {
                Emit::History => Ok(run.history_csv()),
                Emit::Function => Ok(run.final_fn.to_csv()),
                Emit::Constant => unreachable!("handled above"),
            }
        }
        Command::Chain {
            digit_depth,
            depth,
            grid,
            k_max,
        } => {
            want(cli.format, Format::Csv, &[Format::Csv])?;
            let grid = parse_grid(&grid)?;
            let cap = enum_cap()?;
            let mut out = String::from("k,K,D,max_residual,truncation_budget\n");
            for k in 0..=k_max {
                let rep = chain_identity_residual_38(k, &grid, digit_depth, depth, cap)?;
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    k,
                    digit_depth,
                    depth,
                    format_float(rep.max_residual),
                    format_float(rep.truncation_budget)
                ));
            }
            Ok(out)
        }
        Command::Maximal { t } => {
            want(cli.format, Format::Json, &[Format::Json])?;
            let t = parse_rational(&t)?;
            let witness = find_witness(&t)?;
            Ok(json_line(witness.to_json()))
        }
        Command::Stress {
            count,
            height,
            seed,
        } => {
            want(cli.format, Format::Csv, &[Format::Csv])?;
            let report = stress_maximality(count, height, seed)?;
            Ok(report.to_csv())
        }
        Command::Sample {
            lambda,
            count,
            terms,
            seed,
        } => {
            want(cli.format, Format::Csv, &[Format::Csv])?;
            let lam = BernoulliParam::parse(&lambda)?;
            let batch = sample_measure(&lam, count, terms, seed)?;
            let mut out = String::from("index,value,tail_radius\n");
            for (i, x) in batch.samples.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    i,
                    format_float(*x),
                    format_float(batch.tail_radius)
                ));
            }
            Ok(out)
        }
        Command::Hadamard { b, l, modulus } => {
            want(cli.format, Format::Json, &[Format::Json])?;
            let b: Vec<Integer> = b
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| Error::Contract(format!("bad integer {x:?} in --b")))
                })
                .collect::<Result<_>>()?;
            let l = parse_set(&l)?;
            let hadamard = is_hadamard_triple(&b, &l, modulus)?;
            Ok(json_line(serde_json::json!({
                "b": b.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "l": l.iter().map(format_rational).collect::<Vec<_>>(),
                "modulus": modulus,
                "hadamard": hadamard,
            })))
        }
    }
}
