//! Command-line front end: parse maps, extract level-set regions, run
//! convexity checks and verification suites, render SVG.
//!
//! Exit codes: 0 success, 2 parse/config error, 3 empty region, 4 convexity
//! violation found.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use hypolevel::convexity::{check_h_convex, ConvexityError, Verdict};
use hypolevel::geodesic::geodesic_through;
use hypolevel::hyp_core::{hyp_distance, DiskPoint, MoebiusAutomorphism};
use hypolevel::level_set::{
    dmu_nonempty, extract_region, LevelSpec, PhiKind, RegionSample, DEFAULT_RESOLUTION,
    DEFAULT_TOL_CONTOUR,
};
use hypolevel::map_dsl::{self, parse, MapExpr};
use hypolevel::render::{
    region_to_csv, region_to_json, render_svg, report_to_json, RenderOptions,
};
use hypolevel::suites::{run_suite, SUITE_NAMES};

#[derive(Parser)]
#[command(name = "hypolevel", version, about = "Level sets of holomorphic disk self-maps")]
struct Cli {
    /// Flat key=value config file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a map and the basic hyperbolic quantities at a point.
    Eval(EvalArgs),
    /// Extract a level-set region to JSON (optionally SVG/CSV).
    Levelset(LevelsetArgs),
    /// Test hyperbolic convexity by geodesic sampling.
    Convexity(ConvexityArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Render a stored region JSON to SVG.
    Render(RenderArgs),
    /// Render a sequence of levels as numbered JSON/SVG frames.
    Sweep(SweepArgs),
}

#[derive(Args, Default)]
struct SpecArgs {
    /// Density family at this level lambda.
    #[arg(long)]
    omega: Option<f64>,
    /// Distance family at this level mu.
    #[arg(long)]
    dmu: Option<f64>,
    /// Deformation of the distance family ("log-cosh-half" or "identity").
    #[arg(long)]
    phi: Option<String>,
    /// Level mu for --phi.
    #[arg(long)]
    mu: Option<f64>,
    /// Reference point z0 for the distance family (default 0).
    #[arg(long)]
    z0: Option<String>,
    /// Reference point w0 for the distance family (default 0).
    #[arg(long)]
    w0: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    map: Option<String>,
    /// Point of evaluation, e.g. "0.5" or "0.3-0.2i".
    #[arg(long)]
    at: Option<String>,
}

#[derive(Args)]
struct LevelsetArgs {
    #[arg(long)]
    map: Option<String>,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Output JSON path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ConvexityArgs {
    #[arg(long)]
    map: Option<String>,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    segment: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name; see --list.
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Region JSON produced by `levelset`.
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Convexity report JSON; its witness geodesic is overlaid.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 800)]
    size: u32,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    map: Option<String>,
    /// Family to sweep: "omega" or "dmu".
    #[arg(long, default_value = "omega")]
    family: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("HYPOLEVEL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let config = match cli.config.as_deref().map(load_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return fail(2, &format!("config: {e}")),
    };
    match cli.cmd {
        Cmd::Eval(a) => cmd_eval(a, &config),
        Cmd::Levelset(a) => cmd_levelset(a, &config),
        Cmd::Convexity(a) => cmd_convexity(a, &config),
        Cmd::Verify(a) => cmd_verify(a, &config),
        Cmd::Render(a) => cmd_render(a),
        Cmd::Sweep(a) => cmd_sweep(a, &config),
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

type Config = HashMap<String, String>;

fn load_config(path: &Path) -> Result<Config, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("{}:{}: expected key=value", path.display(), ln + 1));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn cfg_parse<T: std::str::FromStr>(config: &Config, key: &str) -> Result<Option<T>, String> {
    match config.get(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| format!("config key {key}: bad value {v:?}")),
    }
}

/// Parse a complex literal such as "0.5" or "0.3-0.2i" through the
/// expression grammar's constant folding.
fn parse_complex(text: &str) -> Result<Complex64, String> {
    match parse(text) {
        Ok(MapExpr::Const(c)) => Ok(c),
        Ok(_) => Err(format!("{text:?} is not a constant")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_map(text: &str) -> Result<MapExpr, String> {
    let f = parse(text).map_err(|e| e.to_string())?;
    let v = map_dsl::validate_self_map(&f, 256, 512);
    if v.verdict != map_dsl::Verdict::Valid {
        return Err(format!(
            "{text:?} is not a self-map of the unit disk (max boundary modulus {:.6})",
            v.max_boundary_modulus
        ));
    }
    Ok(f)
}

struct ResolvedSpec {
    spec: LevelSpec,
    /// For the distance family with nonzero references: T0 = aut(z0, 0);
    /// the region of the reduced map is pulled back through T0^{-1}.
    reduction: Option<MoebiusAutomorphism>,
}

fn resolve_spec(args: &SpecArgs, config: &Config) -> Result<ResolvedSpec, String> {
    let omega = match args.omega {
        Some(v) => Some(v),
        None => cfg_parse(config, "omega")?,
    };
    let dmu = match args.dmu {
        Some(v) => Some(v),
        None => cfg_parse(config, "dmu")?,
    };
    let phi = args.phi.clone().or_else(|| config.get("phi").cloned());
    let mu = match args.mu {
        Some(v) => Some(v),
        None => cfg_parse(config, "mu")?,
    };
    let spec = match (omega, dmu, &phi) {
        (Some(lambda), None, None) => {
            LevelSpec::omega(lambda).map_err(|e| e.to_string())?
        }
        (None, Some(mu), None) => LevelSpec::DMu { mu },
        (None, None, Some(name)) => {
            let kind = match name.as_str() {
                "log-cosh-half" => PhiKind::LogCoshHalf,
                "identity" => PhiKind::Identity,
                other => return Err(format!("unknown deformation {other:?}")),
            };
            let mu = mu.ok_or("--phi requires --mu")?;
            LevelSpec::PhiMu { phi: kind, mu }
        }
        (None, None, None) => return Err("choose one of --omega, --dmu, --phi".into()),
        _ => return Err("--omega, --dmu and --phi are mutually exclusive".into()),
    };

    let z0 = args.z0.as_deref().or(config.get("z0").map(|s| s.as_str()));
    let w0 = args.w0.as_deref().or(config.get("w0").map(|s| s.as_str()));
    if (z0.is_some() || w0.is_some()) && !matches!(spec, LevelSpec::DMu { .. }) {
        return Err("--z0/--w0 apply to the distance family only".into());
    }
    let z0 = z0.map(parse_complex).transpose()?.unwrap_or_default();
    let w0 = w0.map(parse_complex).transpose()?.unwrap_or_default();
    let reduction = if z0.norm() > 0.0 || w0.norm() > 0.0 {
        if z0.norm() >= 1.0 || w0.norm() >= 1.0 {
            return Err("--z0/--w0 must lie in the unit disk".into());
        }
        Some(MoebiusAutomorphism { a: z0, theta: 0.0 })
    } else {
        None
    };
    let _ = w0;
    Ok(ResolvedSpec { spec, reduction })
}

/// k(z, z0) - k(f(z), w0) < mu reduces to the centered family for
/// g = T1 ∘ f ∘ T0^{-1}; regions map back through T0^{-1}.
fn reduce_map(f: &MapExpr, args: &SpecArgs, config: &Config) -> Result<MapExpr, String> {
    let z0 = args
        .z0
        .as_deref()
        .or(config.get("z0").map(|s| s.as_str()))
        .map(parse_complex)
        .transpose()?
        .unwrap_or_default();
    let w0 = args
        .w0
        .as_deref()
        .or(config.get("w0").map(|s| s.as_str()))
        .map(parse_complex)
        .transpose()?
        .unwrap_or_default();
    if z0.norm() == 0.0 && w0.norm() == 0.0 {
        return Ok(f.clone());
    }
    let t0_inv = MoebiusAutomorphism { a: z0, theta: 0.0 }.inverse();
    let pre = MapExpr::Aut { a: t0_inv.a, theta: t0_inv.theta };
    let post = MapExpr::Aut { a: w0, theta: 0.0 };
    Ok(MapExpr::Compose(
        Box::new(post),
        Box::new(MapExpr::Compose(Box::new(f.clone()), Box::new(pre))),
    ))
}

fn get_map(flag: &Option<String>, config: &Config) -> Result<MapExpr, String> {
    let text = flag
        .clone()
        .or_else(|| config.get("map").cloned())
        .ok_or("missing --map (or map= in the config file)")?;
    parse_map(&text)
}

fn write_atomic(path: &Path, content: &str) -> Result<(), String> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content).map_err(|e| format!("{}: {e}", tmp.display()))?;
    std::fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_eval(args: EvalArgs, config: &Config) -> ExitCode {
    let f = match get_map(&args.map, config) {
        Ok(f) => f,
        Err(e) => return fail(2, &e),
    };
    let at = args.at.clone().or_else(|| config.get("at").cloned()).unwrap_or_else(|| "0".into());
    let z = match parse_complex(&at) {
        Ok(z) => z,
        Err(e) => return fail(2, &e),
    };
    let zp = match DiskPoint::new(z) {
        Ok(p) => p,
        Err(e) => return fail(2, &e.to_string()),
    };
    let jet = match f.eval_jet(z) {
        Ok(j) => j,
        Err(e) => return fail(2, &e.to_string()),
    };
    let nu = (1.0 - jet.f.norm_sqr()) / (1.0 - z.norm_sqr());
    let k_z = hyp_distance(DiskPoint::origin(), zp);
    let k_fz = hyp_distance(DiskPoint::origin(), DiskPoint::clamped(jet.f));
    println!("f(z)   = {} + {}i", jet.f.re, jet.f.im);
    println!("f'(z)  = {} + {}i", jet.d1.re, jet.d1.im);
    println!("nu_f   = {nu}");
    println!("k(z,0) = {k_z}");
    println!("k(f(z),0) = {k_fz}");
    ExitCode::SUCCESS
}

fn pull_back_region(region: RegionSample, t0_inv: &MoebiusAutomorphism) -> RegionSample {
    let contours = region
        .contours
        .iter()
        .map(|poly| poly.iter().map(|p| t0_inv.apply_raw(*p)).collect())
        .collect();
    RegionSample { contours, ..region }
}

fn cmd_levelset(args: LevelsetArgs, config: &Config) -> ExitCode {
    let resolved = match resolve_spec(&args.spec, config) {
        Ok(s) => s,
        Err(e) => return fail(2, &e),
    };
    let f = match get_map(&args.map, config) {
        Ok(f) => f,
        Err(e) => return fail(2, &e),
    };
    let f = match reduce_map(&f, &args.spec, config) {
        Ok(f) => f,
        Err(e) => return fail(2, &e),
    };
    let resolution = match args.resolution.map(Ok).or_else(|| cfg_parse(config, "resolution").transpose()) {
        Some(Ok(r)) => r,
        Some(Err(e)) => return fail(2, &e),
        None => DEFAULT_RESOLUTION,
    };
    if !(64..=8192).contains(&resolution) {
        return fail(2, "resolution must be in [64, 8192]");
    }
    let tol = args.tol.unwrap_or(DEFAULT_TOL_CONTOUR);
    if tol <= 0.0 {
        return fail(2, "tolerances must be positive");
    }

    if let LevelSpec::DMu { mu } = resolved.spec {
        if mu < 0.0 {
            match dmu_nonempty(&f, mu) {
                Ok(false) => {
                    return fail(
                        3,
                        &format!(
                            "the region is empty: |f(0)| <= -tanh(mu/2) (mu = {mu})"
                        ),
                    )
                }
                Ok(true) => {}
                Err(e) => return fail(2, &e.to_string()),
            }
        }
    }

    let region = match extract_region(&resolved.spec, &f, resolution, tol) {
        Ok(r) => r,
        Err(e) => return fail(2, &e.to_string()),
    };
    if region.in_count() == 0 {
        return fail(3, "the region is empty (no interior grid cell)");
    }
    let region = match &resolved.reduction {
        Some(t0) => pull_back_region(region, &t0.inverse()),
        None => region,
    };

    let json = region_to_json(&region);
    let text = serde_json::to_string_pretty(&json).unwrap() + "\n";
    if let Some(out) = &args.out {
        if let Err(e) = write_atomic(out, &text) {
            return fail(2, &e);
        }
    } else {
        print!("{text}");
    }
    if let Some(svg_path) = &args.svg {
        let svg = render_svg(&json, &RenderOptions::default());
        if let Err(e) = write_atomic(svg_path, &svg) {
            return fail(2, &e);
        }
    }
    if let Some(csv_path) = &args.csv {
        if let Err(e) = write_atomic(csv_path, &region_to_csv(&region)) {
            return fail(2, &e);
        }
    }
    ExitCode::SUCCESS
}

fn cmd_convexity(args: ConvexityArgs, config: &Config) -> ExitCode {
    let resolved = match resolve_spec(&args.spec, config) {
        Ok(s) => s,
        Err(e) => return fail(2, &e),
    };
    let f = match get_map(&args.map, config).and_then(|f| reduce_map(&f, &args.spec, config)) {
        Ok(f) => f,
        Err(e) => return fail(2, &e),
    };
    let pairs = args.pairs.unwrap_or(500);
    let segment = args.segment.unwrap_or(64);
    let tol = args.tol.unwrap_or(1e-9);
    let seed = args.seed.unwrap_or(7);
    if tol <= 0.0 {
        return fail(2, "tolerances must be positive");
    }
    let report = match check_h_convex(&resolved.spec, &f, pairs, segment, tol, seed) {
        Ok(r) => r,
        Err(ConvexityError::EmptyRegion) => {
            if let LevelSpec::DMu { mu } = resolved.spec {
                if mu < 0.0 {
                    return fail(
                        3,
                        &format!("the region is empty: |f(0)| <= -tanh(mu/2) (mu = {mu})"),
                    );
                }
            }
            return fail(3, "the region is empty");
        }
        Err(e) => return fail(2, &e.to_string()),
    };
    let text = serde_json::to_string_pretty(&report_to_json(&report)).unwrap() + "\n";
    if let Some(out) = &args.out {
        if let Err(e) = write_atomic(out, &text) {
            return fail(2, &e);
        }
    } else {
        print!("{text}");
    }
    if report.verdict == Verdict::Violated {
        return ExitCode::from(4);
    }
    ExitCode::SUCCESS
}

fn cmd_verify(args: VerifyArgs, config: &Config) -> ExitCode {
    if args.list {
        for name in SUITE_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(suite) = args.suite else {
        return fail(2, "missing suite name (try --list)");
    };
    let seed = match args.seed.map(Ok).or_else(|| cfg_parse(config, "seed").transpose()) {
        Some(Ok(s)) => s,
        Some(Err(e)) => return fail(2, &e),
        None => 7,
    };
    let Some(report) = run_suite(&suite, seed) else {
        return fail(2, &format!("unknown suite {suite:?} (try --list)"));
    };
    let text = serde_json::to_string(&report).unwrap() + "\n";
    if let Some(out) = &args.out {
        if let Err(e) = write_atomic(out, &text) {
            return fail(2, &e);
        }
    } else {
        print!("{text}");
    }
    if report["pass"] == serde_json::json!(true) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn witness_overlay(report: &serde_json::Value) -> (Vec<hypolevel::geodesic::Geodesic>, Vec<Complex64>) {
    let mut geodesics = Vec::new();
    let mut points = Vec::new();
    let w = &report["witness"];
    let get = |key: &str| -> Option<Complex64> {
        let arr = w.get(key)?.as_array()?;
        Some(Complex64::new(arr.first()?.as_f64()?, arr.get(1)?.as_f64()?))
    };
    if let (Some(z1), Some(z2), Some(p)) = (get("z1"), get("z2"), get("p")) {
        if let (Ok(a), Ok(b)) = (DiskPoint::new(z1), DiskPoint::new(z2)) {
            if let Ok(g) = geodesic_through(a, b) {
                geodesics.push(g);
            }
        }
        points.extend([z1, z2, p]);
    }
    (geodesics, points)
}

fn cmd_render(args: RenderArgs) -> ExitCode {
    let region: serde_json::Value = match std::fs::read_to_string(&args.region)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
    {
        Ok(v) => v,
        Err(e) => return fail(2, &format!("{}: {e}", args.region.display())),
    };
    let mut opts = RenderOptions { size_px: args.size, ..Default::default() };
    if let Some(report_path) = &args.report {
        match std::fs::read_to_string(report_path)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).map_err(|e| e.to_string()))
        {
            Ok(report) => {
                let (g, p) = witness_overlay(&report);
                opts.geodesics = g;
                opts.points = p;
            }
            Err(e) => return fail(2, &format!("{}: {e}", report_path.display())),
        }
    }
    let svg = render_svg(&region, &opts);
    if let Err(e) = write_atomic(&args.out, &svg) {
        return fail(2, &e);
    }
    ExitCode::SUCCESS
}

fn cmd_sweep(args: SweepArgs, config: &Config) -> ExitCode {
    let f = match get_map(&args.map, config) {
        Ok(f) => f,
        Err(e) => return fail(2, &e),
    };
    if args.steps < 2 {
        return fail(2, "--steps must be at least 2");
    }
    let resolution = args.resolution.unwrap_or(256);
    if !(64..=8192).contains(&resolution) {
        return fail(2, "resolution must be in [64, 8192]");
    }
    if let Err(e) = std::fs::create_dir_all(&args.out_dir) {
        return fail(2, &format!("{}: {e}", args.out_dir.display()));
    }
    for k in 0..args.steps {
        let level = args.from + (args.to - args.from) * k as f64 / (args.steps - 1) as f64;
        let spec = match args.family.as_str() {
            "omega" => match LevelSpec::omega(level) {
                Ok(s) => s,
                Err(e) => return fail(2, &e.to_string()),
            },
            "dmu" => LevelSpec::DMu { mu: level },
            other => return fail(2, &format!("unknown family {other:?}")),
        };
        let region = match extract_region(&spec, &f, resolution, DEFAULT_TOL_CONTOUR) {
            Ok(r) => r,
            Err(e) => return fail(2, &e.to_string()),
        };
        let json = region_to_json(&region);
        let base = args.out_dir.join(format!("frame_{k:04}"));
        let text = serde_json::to_string_pretty(&json).unwrap() + "\n";
        if let Err(e) = write_atomic(&base.with_extension("json"), &text) {
            return fail(2, &e);
        }
        let svg = render_svg(&json, &RenderOptions::default());
        if let Err(e) = write_atomic(&base.with_extension("svg"), &svg) {
            return fail(2, &e);
        }
    }
    ExitCode::SUCCESS
}
