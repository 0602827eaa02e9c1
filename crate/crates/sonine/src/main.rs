//! Command-line entry point for the Sonine laboratory.
//!
//! Exit codes: 0 all checks passed; 1 at least one check failed; 2 usage or
//! configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use sonine::config::{Profile, RunConfig};
use sonine::error::Error;
use sonine::kernels::{kernel_eval_record, Route};
use sonine::report::{consolidate, ScanReport};
use sonine::spaces;
use sonine::specfun;
use sonine::verify;
use sonine::zeta_lab;

#[derive(Parser)]
#[command(
    name = "sonine",
    about = "Numerical laboratory for Sonine subspaces of the cosine transform",
    version
)]
struct Cli {
    /// Grid profile: fast, default, or custom:L=<v>,N=<v>.
    /// The SONINE_PROFILE environment variable overrides this flag.
    #[arg(long, global = true, default_value = "default")]
    profile: String,

    /// Subspace cutoff Lambda.
    #[arg(long, global = true, default_value_t = 2.0)]
    lambda: f64,

    /// Override a named tolerance, e.g. --tol nullspace=1e-9 (repeatable).
    #[arg(long, global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,

    /// Seed for randomized property sweeps.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output directory for reports and scans.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a module invariant suite and write its JSON report.
    Verify {
        /// One of: specfun, transforms, kernels, spaces, zeta.
        suite: String,
    },
    /// Tabulate C_a(u, w) over a u-range into a ScanReport CSV.
    KernelEval {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// w as "re,im".
        #[arg(long, default_value = "0.5,0.0")]
        w: String,
        #[arg(long, default_value_t = 0.1)]
        u_min: f64,
        #[arg(long, default_value_t = 5.0)]
        u_max: f64,
        #[arg(long, default_value_t = 50)]
        u_steps: usize,
        /// series, quadrature, or auto.
        #[arg(long, default_value = "auto")]
        route: String,
    },
    /// Build a subspace frame and write CSV + JSON sidecar.
    SpaceBuild {
        /// k-ab or h-lambda.
        #[arg(long, default_value = "h-lambda")]
        kind: String,
        /// a for k-ab builds (b defaults to a).
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
    /// Re-read a frame written by space-build and re-check its invariants.
    SpaceVerify {
        /// Directory holding frame.csv and frame.json (defaults to --out).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Scan the obstruction beta on the critical line and detect zeros.
    ZeroScan {
        #[arg(long, default_value_t = 10.0)]
        tmin: f64,
        #[arg(long, default_value_t = 30.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Merge suite reports and scans in the output directory into a summary.
    Report,
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let profile_text = std::env::var("SONINE_PROFILE").unwrap_or_else(|_| cli.profile.clone());
    let mut config = RunConfig {
        profile: Profile::parse(&profile_text)?,
        lambda: cli.lambda,
        output_dir: cli.out.clone(),
        seed: cli.seed,
        ..RunConfig::default()
    };
    if !(config.lambda > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "--lambda {} must exceed 1",
            config.lambda
        )));
    }
    config.apply_tol_overrides(&cli.tol)?;
    Ok(config)
}

fn parse_complex(text: &str) -> Result<Complex64, Error> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| Error::InvalidParameter(format!("expected re,im got '{text}'")))?;
    Ok(Complex64::new(
        re.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad re in '{text}'")))?,
        im.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad im in '{text}'")))?,
    ))
}

fn run(cli: Cli) -> Result<bool, Error> {
    let config = build_config(&cli)?;
    match cli.command {
        Command::Verify { suite } => {
            let report = verify::run_suite(&suite, &config)?;
            let path = report.write_to(&config.output_dir)?;
            for check in &report.checks {
                let status = match (&check.skipped, check.passed) {
                    (Some(reason), _) => format!("SKIP ({reason})"),
                    (None, true) => "PASS".into(),
                    (None, false) => "FAIL".into(),
                };
                println!(
                    "{status} {} [{}] measured {:.3e} tol {:.3e}",
                    check.name, check.tag, check.measured, check.tolerance
                );
            }
            println!("report: {}", path.display());
            Ok(report.passed)
        }
        Command::KernelEval { a, w, u_min, u_max, u_steps, route } => {
            let w = parse_complex(&w)?;
            let route = match route.as_str() {
                "series" => Route::Series,
                "quadrature" => Route::Quadrature,
                "auto" => Route::Auto,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown route '{other}'")))
                }
            };
            let mut scan = ScanReport::new(&[
                "u",
                "re_w",
                "im_w",
                "a",
                "route",
                "re_val",
                "im_val",
                "crosscheck_residual",
            ]);
            let route_code = match route {
                Route::Series => 0.0,
                Route::Quadrature => 1.0,
                Route::Auto => 2.0,
            };
            for i in 0..u_steps {
                let u = u_min + (u_max - u_min) * i as f64 / (u_steps.max(2) - 1) as f64;
                let record = kernel_eval_record(u, w, a, route)?;
                scan.push(vec![
                    u,
                    w.re,
                    w.im,
                    a,
                    route_code,
                    record.value.re,
                    record.value.im,
                    record.crosscheck_residual.unwrap_or(f64::NAN),
                ]);
            }
            let path = config.output_dir.join("kernel_eval.csv");
            scan.write_to(&path)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::SpaceBuild { kind, a, b } => {
            let grid = config.profile.make_grid()?;
            let opts = config.space_options();
            let frame = match kind.as_str() {
                "k-ab" => {
                    let a = a.unwrap_or(1.0 / config.lambda);
                    let b = b.unwrap_or(a);
                    spaces::build_k_ab_with(a, b, &grid, &opts)?
                }
                "h-lambda" => spaces::build_h_lambda_with(config.lambda, &grid, &opts)?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown kind '{other}' (k-ab or h-lambda)"
                    )))
                }
            };
            std::fs::create_dir_all(&config.output_dir)?;
            let csv_path = config.output_dir.join("frame.csv");
            let mut out = std::fs::File::create(&csv_path)?;
            write_frame_csv(&frame, &mut out)?;
            let sidecar = serde_json::json!({
                "kind": frame.kind.label(),
                "params": { "profile": config.profile.name(), "lambda": config.lambda },
                "dimension": frame.dimension(),
                "raw_dimension": frame.raw_dimension,
                "constraint_residual": frame.constraint_residual,
                "certification_residual": frame.certification_residual,
                "tol": frame.tol,
            });
            let json_path = config.output_dir.join("frame.json");
            std::fs::write(&json_path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
            println!(
                "built {} dim {} (raw {}) constraint residual {:.3e}",
                frame.kind.label(),
                frame.dimension(),
                frame.raw_dimension,
                frame.constraint_residual
            );
            println!("wrote {} and {}", csv_path.display(), json_path.display());
            Ok(true)
        }
        Command::SpaceVerify { dir } => {
            let dir = dir.unwrap_or_else(|| config.output_dir.clone());
            let ok = space_verify(&dir, &config)?;
            Ok(ok)
        }
        Command::ZeroScan { tmin, tmax, step } => {
            let grid = config.profile.make_grid()?;
            let opts = config.space_options();
            let h_frame = spaces::build_h_lambda_with(config.lambda, &grid, &opts)?;
            let w_frame =
                zeta_lab::build_w_lambda(config.lambda, 8, &grid, config.tol("nullspace"))?;
            let threshold = config.tol("detection_threshold");
            let report = zeta_lab::zero_scan(&h_frame, &w_frame, tmin, tmax, step, threshold)?;

            let mut scan = ScanReport::new(&["t", "beta"]);
            for (t, b) in report.t_samples.iter().zip(&report.beta) {
                scan.push(vec![*t, *b]);
            }
            std::fs::create_dir_all(&config.output_dir)?;
            let csv_path = config.output_dir.join("zero_scan.csv");
            scan.write_to(&csv_path)?;

            let summary = serde_json::json!({
                "minima": report.minima,
                "threshold": report.threshold,
                "profile": config.profile.name(),
                "lambda": report.lambda,
            });
            let json_path = config.output_dir.join("zero_scan_summary.json");
            std::fs::write(&json_path, serde_json::to_string_pretty(&summary)? + "\n")?;

            let oracle = specfun::find_critical_zeros(tmin, tmax, step.min(0.02));
            let tol = config.tol("zero_match");
            let matched = report.minima.len() == oracle.len()
                && report
                    .minima
                    .iter()
                    .zip(&oracle)
                    .all(|(m, z)| (m.t - z).abs() <= tol);
            for m in &report.minima {
                println!("minimum t = {:.6} beta = {:.3e}", m.t, m.beta);
            }
            println!(
                "oracle zeros: {:?} -> {}",
                oracle,
                if matched { "matched" } else { "MISMATCH" }
            );
            println!("wrote {} and {}", csv_path.display(), json_path.display());
            Ok(matched)
        }
        Command::Report => {
            let summary = consolidate(&config.output_dir)?;
            let path = config.output_dir.join("summary.json");
            std::fs::write(&path, &summary)?;
            print!("{summary}");
            Ok(true)
        }
    }
}

fn write_frame_csv(
    frame: &spaces::SubspaceFrame,
    out: &mut impl std::io::Write,
) -> Result<(), Error> {
    let grid = frame.grid();
    write!(out, "node")?;
    for i in 0..frame.dimension() {
        write!(out, ",vector_{}", i + 1)?;
    }
    writeln!(out)?;
    let vectors = frame.vectors();
    for (j, t) in grid.nodes().iter().enumerate() {
        write!(out, "{t}")?;
        for v in &vectors {
            write!(out, ",{}", v.samples()[j].re)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn space_verify(dir: &std::path::Path, config: &RunConfig) -> Result<bool, Error> {
    let json_path = dir.join("frame.json");
    let csv_path = dir.join("frame.csv");
    if !json_path.exists() {
        return Err(Error::MissingArtifact { path: json_path.display().to_string() });
    }
    if !csv_path.exists() {
        return Err(Error::MissingArtifact { path: csv_path.display().to_string() });
    }
    let sidecar: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path)?)?;
    let dimension = sidecar["dimension"].as_u64().unwrap_or(0) as usize;
    let recorded_residual = sidecar["constraint_residual"].as_f64().unwrap_or(f64::NAN);

    // Reload the frame columns.
    let text = std::fs::read_to_string(&csv_path)?;
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::MalformedArtifact {
                path: csv_path.display().to_string(),
                reason: e.to_string(),
            })?;
        rows.push(fields);
    }
    let grid = config.profile.make_grid()?;
    if rows.len() != grid.len() || rows.iter().any(|r| r.len() != dimension + 1) {
        return Err(Error::MalformedArtifact {
            path: csv_path.display().to_string(),
            reason: format!(
                "expected {} rows x {} columns for profile {}",
                grid.len(),
                dimension + 1,
                config.profile.name()
            ),
        });
    }
    // Orthonormality under the euclidean pairing.
    let mut worst_gram: f64 = 0.0;
    for i in 0..dimension {
        for j in i..dimension {
            let mut acc = 0.0;
            for (r, w) in rows.iter().zip(grid.weights()) {
                acc += r[i + 1] * r[j + 1] * w;
            }
            let want = if i == j { 1.0 } else { 0.0 };
            worst_gram = worst_gram.max((acc - want).abs());
        }
    }
    let gram_ok = worst_gram <= 1e-10;
    println!(
        "{} orthonormality: gram defect {:.3e}",
        if gram_ok { "PASS" } else { "FAIL" },
        worst_gram
    );
    println!(
        "recorded dimension {dimension}, constraint residual {recorded_residual:.3e}"
    );
    Ok(gram_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::InvalidParameter(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
