use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hypnp::acceptance::{run_criterion, CRITERIA};
use hypnp::charsum::{hyp_sum_with_budget, SumContext, DEFAULT_SUM_BUDGET};
use hypnp::frobenius::{compare_all_points, compare_with_budget, nonresonant_tuples, FrobeniusReport, Verdict};
use hypnp::hodge::{as_hodge_polygon, irregular_hodge_polygon, theta};
use hypnp::params::{CharParams, RawParams};
use hypnp::polytope::{basis_exponents, volume, wan_certificate_holds, wan_facet_groups, FacetSystem};
use hypnp::report::{polygons_svg, CompareJson, HodgeJson, OrbitJson, PolygonJson, ReportJson, SumJson, SweepRow};
use hypnp::{Error, HypParams};

const EXIT_DOMAIN: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "hypnp", version, about = "Hodge and Newton polygons of hypergeometric sums")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Irregular Hodge numbers and polygon of (alpha; beta).
    Hodge(HodgeArgs),
    /// Facets, volume, basis exponents and Wan certificates of the Newton polytope.
    Polytope(PolytopeArgs),
    /// One hypergeometric sum over F_{q^ext}.
    Sum(SumArgs),
    /// Frobenius Newton polygon against the Hodge polygon.
    Compare(CompareArgs),
    /// All non-resonant tuples over F_p, every fiber, as CSV.
    Sweep(SweepArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Comma-separated rationals, e.g. "0,1/2".
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    beta: String,
    /// JSON file with {"alpha": [...], "beta": [...]}, or a `hodge` output.
    #[arg(long, conflicts_with = "alpha")]
    params_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HodgeArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// With --s, also compute the Frobenius-orbit averaged polygon.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PolytopeArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Scale of the polytope; defaults to the common denominator of the
    /// parameters, or 1.
    #[arg(long)]
    d: Option<i64>,
    /// Parameters for the basis exponents (sets n and m).
    #[command(flatten)]
    params: ParamArgs,
    /// Prime for the Wan facet certificate.
    #[arg(long)]
    wan_p: Option<u64>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CharArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Exponents a_i of chi_i = omega^{a_i}, comma separated.
    #[arg(long)]
    aexp: Option<String>,
    #[arg(long, default_value = "")]
    bexp: String,
    /// JSON file with {"p", "s", "a_exps", "b_exps"}, or a `sum`/`compare` output.
    #[arg(long, conflicts_with_all = ["p", "aexp"])]
    params_file: Option<PathBuf>,
    /// Pi-adic precision M (default derived from the Hodge numbers).
    #[arg(long)]
    precision: Option<u64>,
    /// Cap on enumerated terms for direct summation.
    #[arg(long, default_value_t = DEFAULT_SUM_BUDGET)]
    budget: u64,
    /// Include p-adic coefficient grids in JSON output.
    #[arg(long)]
    debug_padic: bool,
}

#[derive(Args, Debug)]
struct SumArgs {
    #[command(flatten)]
    chars: CharArgs,
    /// Point a of F_q^x, as the integer code of its F_p coordinates.
    #[arg(long)]
    point: u64,
    #[arg(long, default_value_t = 1)]
    ext: u32,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    chars: CharArgs,
    #[arg(long, conflicts_with = "all_points", required_unless_present = "all_points")]
    point: Option<u64>,
    #[arg(long)]
    all_points: bool,
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG of the first report's polygons.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Exit 3 unless every fiber is ordinary.
    #[arg(long)]
    expect_ordinary: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    nmax: usize,
    #[arg(long)]
    mmax: usize,
    /// CSV output path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    precision: Option<u64>,
    #[arg(long)]
    expect_ordinary: bool,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    criterion: Vec<u8>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_resource() { EXIT_RESOURCE } else { EXIT_DOMAIN };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: format!("{}: {e}", path.display()),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match &cli.command {
        Command::Hodge(a) => hodge(a),
        Command::Polytope(a) => polytope(a),
        Command::Sum(a) => sum(a),
        Command::Compare(a) => compare(a),
        Command::Sweep(a) => sweep(a),
        Command::Selftest(a) => selftest(a, cli.seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    write_text(&text, path)
}

fn write_text(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::io(Path::new("<stdout>"), e)),
                _ => Ok(()),
            }
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

/// Accepts either the object itself or a document carrying it under
/// `params` (or the first report's `params`).
fn unwrap_params(v: serde_json::Value) -> serde_json::Value {
    if let Some(p) = v.get("params") {
        return p.clone();
    }
    if let Some(p) = v.pointer("/reports/0/params") {
        return p.clone();
    }
    v
}

fn load_params(args: &ParamArgs) -> Result<Option<HypParams>, Failure> {
    if let Some(path) = &args.params_file {
        let raw: RawParams = serde_json::from_value(unwrap_params(read_json(path)?))
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        return Ok(Some(raw.into_params()?));
    }
    match &args.alpha {
        Some(alpha) => Ok(Some(HypParams::from_lists(alpha, &args.beta)?)),
        None => Ok(None),
    }
}

fn load_char_params(args: &CharArgs) -> Result<CharParams, Failure> {
    if let Some(path) = &args.params_file {
        let raw: CharParams = serde_json::from_value(unwrap_params(read_json(path)?))
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        return Ok(CharParams::new(raw.p, raw.s, raw.a_exps, raw.b_exps)?);
    }
    let p = args.p.ok_or_else(|| Failure::usage("--p is required (or --params-file)"))?;
    let aexp = args
        .aexp
        .as_deref()
        .ok_or_else(|| Failure::usage("--aexp is required (or --params-file)"))?;
    let exps = |s: &str| -> Result<Vec<u64>, Failure> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Failure::usage(format!("bad exponent {t:?}")))
            })
            .collect()
    };
    Ok(CharParams::new(p, args.s, exps(aexp)?, exps(&args.bexp)?)?)
}

fn hodge(args: &HodgeArgs) -> CliResult {
    let params = load_params(&args.params)?.ok_or_else(|| Failure::usage("--alpha or --params-file is required"))?;
    let poly = irregular_hodge_polygon(&params);
    let orbit = match (args.p, args.s) {
        (Some(p), Some(s)) => {
            let o = as_hodge_polygon(&params, p, s)?;
            Some(OrbitJson {
                p,
                s,
                polygon: PolygonJson::from(&o.polygon),
                orbit_thetas: o
                    .orbit_thetas
                    .iter()
                    .map(|t| t.iter().map(|x| x.to_string()).collect())
                    .collect(),
                experimental: o.experimental,
                resonant: o.resonant,
            })
        }
        (None, None) => None,
        _ => return Err(Failure::usage("--p and --s must be given together")),
    };
    let doc = HodgeJson {
        params: params.to_raw(),
        theta: theta(&params).iter().map(|t| t.to_string()).collect(),
        polygon: PolygonJson::from(&poly),
        orbit,
    };
    if let Some(path) = &args.svg {
        let title = format!("Hodge polygon, alpha = {:?}, beta = {:?}", doc.params.alpha, doc.params.beta);
        fs::write(path, polygons_svg(&title, &[("Hodge", &poly)])).map_err(|e| Failure::io(path, e))?;
    }
    emit_json(&doc, args.json.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct BasisJson {
    r: usize,
    ell: usize,
    point: Vec<i64>,
    weight: String,
    theta_index: usize,
}

#[derive(Serialize)]
struct WanJson {
    p: u64,
    facets: Vec<(String, Vec<i64>)>,
    holds: bool,
}

#[derive(Serialize)]
struct PolytopeJson {
    n: usize,
    m: usize,
    d: i64,
    dim: usize,
    vertices: Vec<Vec<i64>>,
    facets: FacetSystem,
    volume: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<BasisJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wan: Option<WanJson>,
}

fn polytope(args: &PolytopeArgs) -> CliResult {
    let params = load_params(&args.params)?;
    let (n, m) = match (&params, args.n, args.m) {
        (Some(p), None, None) => (p.n(), p.m()),
        (None, Some(n), m) => (n, m.unwrap_or(0)),
        (Some(_), _, _) => return Err(Failure::usage("give either --n/--m or parameters, not both")),
        (None, None, _) => return Err(Failure::usage("--n or --alpha is required")),
    };
    let d = match (args.d, &params) {
        (Some(d), _) => d,
        (None, Some(p)) => p.common_denominator()? as i64,
        (None, None) => 1,
    };
    let fs = FacetSystem::build(n, m, d)?;
    let basis = match &params {
        Some(p) => Some(
            basis_exponents(p, d)?
                .into_iter()
                .map(|g| BasisJson {
                    r: g.r,
                    ell: g.ell,
                    point: g.point,
                    weight: g.weight.to_string(),
                    theta_index: g.theta_index,
                })
                .collect(),
        ),
        None => None,
    };
    let wan = match args.wan_p {
        Some(p) => {
            let groups = wan_facet_groups(n, m, p)?;
            Some(WanJson {
                p,
                holds: wan_certificate_holds(&groups, p),
                facets: groups.into_iter().map(|(id, f)| (id.to_string(), f)).collect(),
            })
        }
        None => None,
    };
    let doc = PolytopeJson {
        n,
        m,
        d,
        dim: fs.dim(),
        vertices: fs.vertices(),
        volume: volume(n, m, d)?.to_string(),
        facets: fs,
        basis,
        wan,
    };
    emit_json(&doc, args.json.as_deref())?;
    Ok(0)
}

fn context(args: &CharArgs) -> Result<SumContext, Failure> {
    let cp = load_char_params(args)?;
    Ok(SumContext::new(&cp, args.precision)?)
}

fn sum(args: &SumArgs) -> CliResult {
    let ctx = context(&args.chars)?;
    let value = hyp_sum_with_budget(&ctx, args.point, args.ext, args.chars.budget)?;
    let doc = SumJson::new(ctx.params(), args.point, args.ext, &value, args.chars.debug_padic);
    emit_json(&doc, args.json.as_deref())?;
    Ok(0)
}

fn verdict_code(reports: &[FrobeniusReport], expect_ordinary: bool) -> u8 {
    if reports.iter().any(|r| r.verdict == Verdict::PrecisionFail) {
        EXIT_RESOURCE
    } else if expect_ordinary && reports.iter().any(|r| r.verdict != Verdict::Ordinary) {
        EXIT_MISMATCH
    } else {
        0
    }
}

fn write_csv(rows: &[SweepRow], path: Option<&Path>) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| Failure::io(p, e))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let name = path.unwrap_or(Path::new("<stdout>"));
    for row in rows {
        w.serialize(row).map_err(|e| Failure::io(name, e))?;
    }
    if rows.is_empty() {
        w.write_record(["p", "s", "n", "m", "aexps", "bexps", "point", "verdict", "np_slopes", "hp_slopes"])
            .map_err(|e| Failure::io(name, e))?;
    }
    w.flush().map_err(|e| Failure::io(name, e))
}

fn compare(args: &CompareArgs) -> CliResult {
    let ctx = context(&args.chars)?;
    let reports = match args.point {
        Some(a) => vec![compare_with_budget(&ctx, a, args.chars.budget)?],
        None => compare_all_points(&ctx)?,
    };
    let doc = CompareJson {
        all_ordinary: reports.iter().all(|r| r.verdict == Verdict::Ordinary),
        reports: reports.iter().map(|r| ReportJson::new(r, args.chars.debug_padic)).collect(),
    };
    if let Some(path) = &args.svg {
        let r = &reports[0];
        let title = format!("p={} s={} a={:?} b={:?} point={}", r.params.p, r.params.s, r.params.a_exps, r.params.b_exps, r.point);
        let mut polys = Vec::new();
        if let Some(np) = &r.newton_polygon {
            polys.push(("Newton", np));
        }
        polys.push(("Hodge", &r.hodge_polygon));
        fs::write(path, polygons_svg(&title, &polys)).map_err(|e| Failure::io(path, e))?;
    }
    if let Some(path) = &args.csv {
        let rows: Vec<SweepRow> = reports.iter().map(SweepRow::from).collect();
        write_csv(&rows, Some(path))?;
    }
    emit_json(&doc, args.json.as_deref())?;
    Ok(verdict_code(&reports, args.expect_ordinary))
}

fn sweep(args: &SweepArgs) -> CliResult {
    use rayon::prelude::*;
    let tuples = nonresonant_tuples(args.p, args.nmax, args.mmax)?;
    let per_tuple: Vec<Vec<FrobeniusReport>> = tuples
        .par_iter()
        .map(|cp| {
            let ctx = SumContext::new(cp, args.precision)?;
            compare_all_points(&ctx)
        })
        .collect::<Result<_, Error>>()?;
    let reports: Vec<FrobeniusReport> = per_tuple.into_iter().flatten().collect();
    let rows: Vec<SweepRow> = reports.iter().map(SweepRow::from).collect();
    write_csv(&rows, args.out.as_deref())?;
    Ok(verdict_code(&reports, args.expect_ordinary))
}

fn selftest(args: &SelftestArgs, seed: u64) -> CliResult {
    let ids: Vec<u8> = if args.criterion.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        args.criterion.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(Failure::usage(format!("no criterion {bad}")));
    }
    let mut failed = 0;
    for id in ids {
        let r = run_criterion(id, seed);
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    Ok(if failed == 0 { 0 } else { EXIT_DOMAIN })
}
