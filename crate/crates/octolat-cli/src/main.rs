//! `octolat` — kernel construction, verification suites, and scaling-limit
//! experiments on the 8-dimensional lattice.
//!
//! Exit codes: 0 all executed checks passed, 1 a check failed its tolerance,
//! 2 configuration or I/O error (a JSON error object goes to stderr).
//! Verification reports are JSON, experiment tables are CSV, and both are
//! byte-identical across runs with the same configuration; timings go to
//! stderr only.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use octolat_core::boundary::CauchyEngine;
use octolat_core::convergence::{self, ContinuousDomain, TestFunction};
use octolat_core::kernel::{self, KernelTable};
use octolat_core::lattice::{DomainSpec, LatticeDomain};
use octolat_core::sampling;
use octolat_core::verify::{self, SuiteReport};

const KERNEL_CACHE_ENV: &str = "OCTOLAT_KERNEL_CACHE";

#[derive(Parser)]
#[command(name = "octolat", version, about = "Discrete octonionic function theory on bounded lattices")]
struct Cli {
    /// Worker thread cap (default: available cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel table construction and maintenance
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Run a verification suite and emit a JSON pass/fail report
    Verify(VerifyArgs),
    /// Scaling-limit experiment; emits a CSV report
    Converge(ConvergeArgs),
    /// Print build and environment information
    Info,
}

#[derive(Subcommand)]
enum KernelCmd {
    /// Compute a symmetry-reduced kernel table and write the cache file
    Build {
        /// Chebyshev radius the Dirac kernel must cover
        #[arg(long)]
        range: u32,
        /// Relative quadrature tolerance
        #[arg(long, default_value_t = kernel::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify the defining identities of a kernel cache file
    Check {
        path: PathBuf,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the JSON report here as well as to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the canonical classes of a kernel cache file as CSV
    ExportCsv {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Algebra,
    Stokes,
    Pompeiu,
    Plemelj,
    Extension,
    Exterior,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Domain description JSON (required for every suite except algebra)
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Kernel cache file; falls back to OCTOLAT_KERNEL_CACHE
    #[arg(long)]
    kernel: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random draws for the algebra suite
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    /// Accepted for compatibility; verification reports are always JSON
    #[arg(long)]
    json: bool,
    /// Write the JSON report here as well as to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Ball,
}

#[derive(Clone, Copy, ValueEnum)]
enum FnKind {
    Constant,
    KernelShift,
    Nonregular,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, value_enum, default_value_t = Shape::Ball)]
    shape: Shape,
    #[arg(long)]
    radius: f64,
    /// Ball center, eight comma-separated reals
    #[arg(long, value_delimiter = ',', num_args = 8, default_values_t = [0.0; 8])]
    center: Vec<f64>,
    /// Mesh widths, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    hs: Vec<f64>,
    #[arg(long = "fn", value_enum)]
    function: FnKind,
    /// Distance of the kernel-shift point from the center along +e0
    /// (must exceed radius + 1)
    #[arg(long)]
    shift_dist: Option<f64>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    kernel: Option<PathBuf>,
    /// CSV output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct Provenance {
    name: &'static str,
    version: &'static str,
    git: &'static str,
}

fn provenance() -> Provenance {
    Provenance {
        name: "octolat",
        version: env!("CARGO_PKG_VERSION"),
        git: env!("OCTOLAT_GIT_DESCRIBE"),
    }
}

#[derive(Serialize)]
struct KernelMeta {
    path: String,
    sha256: String,
    range: u32,
    tol: f64,
    classes: usize,
}

fn kernel_meta(path: &Path, table: &KernelTable) -> Result<KernelMeta> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(KernelMeta {
        path: path.display().to_string(),
        sha256: format!("{:x}", hasher.finalize()),
        range: table.range(),
        tol: table.tol(),
        classes: table.class_count(),
    })
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // ignore failure: the pool may already be initialized in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(all_passed) => {
            if !all_passed {
                std::process::exit(1);
            }
        }
        Err(err) => {
            let obj = serde_json::json!({ "error": format!("{err:#}") });
            eprintln!("{obj}");
            std::process::exit(2);
        }
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Kernel(cmd) => run_kernel(cmd),
        Command::Verify(args) => run_verify(args),
        Command::Converge(args) => run_converge(args),
        Command::Info => {
            let info = serde_json::json!({
                "provenance": provenance(),
                "kernel_cache_env": KERNEL_CACHE_ENV,
                "default_tol": kernel::DEFAULT_TOL,
                "threads": rayon::current_num_threads(),
            });
            println!("{}", serde_json::to_string_pretty(&info)?);
            Ok(true)
        }
    }
}

fn run_kernel(cmd: KernelCmd) -> Result<bool> {
    match cmd {
        KernelCmd::Build { range, tol, out } => {
            if !(tol > 0.0) {
                bail!("--tol must be positive, got {tol}");
            }
            let start = Instant::now();
            let table = KernelTable::build(range, tol).context("kernel table construction")?;
            table
                .save(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            eprintln!(
                "built {} classes (range {range}, tol {tol:e}) in {:.2?} -> {}",
                table.class_count(),
                start.elapsed(),
                out.display()
            );
            Ok(true)
        }
        KernelCmd::Check {
            path,
            samples,
            seed,
            out,
        } => {
            let table = KernelTable::load(&path)
                .with_context(|| format!("loading {}", path.display()))?;
            let start = Instant::now();
            let report = kernel::check_table(&table, samples, seed)?;
            eprintln!("checked defining identities in {:.2?}", start.elapsed());
            let pass = report.pass();
            let doc = serde_json::json!({
                "command": "kernel check",
                "config": { "path": path.display().to_string(), "samples": samples, "seed": seed },
                "kernel": kernel_meta(&path, &table)?,
                "provenance": provenance(),
                "tolerances": { "identity": kernel::TOL_IDENTITY, "quarter": kernel::TOL_QUARTER },
                "report": report,
                "pass": pass,
            });
            emit_json(&doc, out.as_deref())?;
            Ok(pass)
        }
        KernelCmd::ExportCsv { path, out } => {
            let table = KernelTable::load(&path)
                .with_context(|| format!("loading {}", path.display()))?;
            let mut buf = Vec::new();
            table.export_csv(&mut buf)?;
            match out {
                Some(p) => std::fs::write(&p, &buf)
                    .with_context(|| format!("writing {}", p.display()))?,
                None => print!("{}", String::from_utf8(buf).expect("csv is ascii")),
            }
            Ok(true)
        }
    }
}

fn load_domain(path: &Path) -> Result<LatticeDomain> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading domain file {}", path.display()))?;
    let spec = DomainSpec::from_json(&text)
        .with_context(|| format!("parsing domain file {}", path.display()))?;
    Ok(spec.build()?)
}

fn resolve_kernel(flag: Option<PathBuf>) -> Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Ok(env) = std::env::var(KERNEL_CACHE_ENV) {
        return Ok(PathBuf::from(env));
    }
    bail!("no kernel table: pass --kernel or set {KERNEL_CACHE_ENV}");
}

fn run_verify(args: VerifyArgs) -> Result<bool> {
    let start = Instant::now();
    let (report, kernel_meta_json): (SuiteReport, serde_json::Value) = match args.suite {
        Suite::Algebra => (
            verify::algebra_suite(args.seed, args.count),
            serde_json::Value::Null,
        ),
        Suite::Stokes => {
            let domain_path = args
                .domain
                .as_deref()
                .context("verify stokes requires --domain")?;
            let domain = load_domain(domain_path)?;
            (
                verify::calculus_suite(&domain, args.seed),
                serde_json::Value::Null,
            )
        }
        Suite::Pompeiu | Suite::Plemelj | Suite::Extension | Suite::Exterior => {
            let domain_path = args
                .domain
                .as_deref()
                .context("this suite requires --domain")?;
            let domain = load_domain(domain_path)?;
            let kernel_path = resolve_kernel(args.kernel.clone())?;
            let table = Arc::new(
                KernelTable::load(&kernel_path)
                    .with_context(|| format!("loading {}", kernel_path.display()))?,
            );
            let meta = serde_json::to_value(kernel_meta(&kernel_path, &table)?)?;
            let engine = CauchyEngine::new(Arc::clone(&table), &domain);
            let report = match args.suite {
                Suite::Pompeiu => verify::pompeiu_suite(&engine, args.samples, args.seed)?,
                Suite::Plemelj => verify::plemelj_suite(&engine, args.samples, args.seed)?,
                Suite::Extension => verify::extension_suite(&engine, args.samples, args.seed)?,
                Suite::Exterior => verify::exterior_suite(&engine, args.samples, args.seed)?,
                _ => unreachable!(),
            };
            (report, meta)
        }
    };
    eprintln!(
        "suite {} finished in {:.2?} (max residual {:.3e})",
        report.suite,
        start.elapsed(),
        report.max_residual()
    );

    let pass = report.pass;
    let doc = serde_json::json!({
        "command": "verify",
        "config": {
            "suite": report.suite,
            "domain": args.domain.as_ref().map(|p| p.display().to_string()),
            "kernel": args.kernel.as_ref().map(|p| p.display().to_string()),
            "samples": args.samples,
            "seed": args.seed,
            "count": args.count,
            "json": args.json,
        },
        "kernel": kernel_meta_json,
        "provenance": provenance(),
        "report": report,
        "pass": pass,
    });
    emit_json(&doc, args.out.as_deref())?;
    Ok(pass)
}

fn run_converge(args: ConvergeArgs) -> Result<bool> {
    let Shape::Ball = args.shape;
    if !(args.radius > 0.0) {
        bail!("--radius must be positive");
    }
    let mut center = [0.0; 8];
    center.copy_from_slice(&args.center);
    let domain = ContinuousDomain::ball(center, args.radius);

    let function = match args.function {
        FnKind::Constant => {
            let mut rng = sampling::rng_from_seed(args.seed);
            TestFunction::Constant(sampling::random_octonion(&mut rng))
        }
        FnKind::KernelShift => {
            let dist = args.shift_dist.unwrap_or(args.radius + 5.8);
            if dist <= args.radius + 1.0 {
                bail!("--shift-dist must exceed radius + 1 so the shift point stays regular on the closure");
            }
            let mut a = center;
            a[0] += dist;
            TestFunction::KernelShift { a }
        }
        FnKind::Nonregular => TestFunction::NonRegular,
    };

    let kernel_path = resolve_kernel(args.kernel)?;
    let table = Arc::new(
        KernelTable::load(&kernel_path)
            .with_context(|| format!("loading {}", kernel_path.display()))?,
    );

    let start = Instant::now();
    let report = convergence::scaling_error(
        &function,
        &domain,
        &args.hs,
        args.samples,
        args.seed,
        &table,
    )?;
    eprintln!(
        "converge ({}) over h = {:?} in {:.2?}",
        function.name(),
        args.hs,
        start.elapsed()
    );
    std::fs::write(&args.out, report.to_csv())
        .with_context(|| format!("writing {}", args.out.display()))?;
    for row in &report.rows {
        eprintln!(
            "h={} points={} sup_error={:.3e} dhf_max={:.3e}",
            row.h, row.points, row.sup_error, row.dhf_max
        );
    }
    Ok(true)
}

fn emit_json(doc: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    println!("{text}");
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
