//! The `ym2` command line.
//!
//! Every command prints one JSON document (or CSV for scans) with the
//! results flattened at the top level next to `schema_version`, `command`,
//! `params` and `meta`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ym2_core::groups::{SmallGroup, Su2, U1};
use ym2_core::hurwitz::{euler_characteristic_of_covering, f_series, hurwitz_count, monodromy_oracle, rho_mass};
use ym2_core::maps::{fundamental_map, CombinatorialMap, LoopWord};
use ym2_core::monte_carlo::{
    estimate_wilson, estimate_wilson_gauged, estimate_z, su2_partition_function, verify_character_identities,
    HeatKernel, McOptions,
};
use ym2_core::partition_function::{
    coupling_rhs, dk_free_energy, gaussian_expectation, limit_g_1, limit_g_ge_2, migdal_z, torus_expansion,
    GaussianHWMeasure, TorusOptions, Truncation,
};
use ym2_core::special::{q_of_t, theta, theta_qdq, witten_zeta_su};
use ym2_core::unitary_reps::HighestWeight;
use ym2_core::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when neither `--seed` nor `YM2_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_611;

pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "ym2", version, about = "Two-dimensional Yang-Mills computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; scans default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Size of the worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Relative truncation tolerance.
    #[arg(long, global = true, env = "YM2_TOL")]
    tol: Option<f64>,

    #[arg(long, global = true, env = "YM2_SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Z_{U(N)}(g, t) from the character sum.
    Z(ZArgs),
    /// Z_{U(N)}(g, t) over several N next to the large-N limit.
    Limits(LimitsArgs),
    /// Coefficients of the torus 1/N² expansion with a Richardson check.
    Expand(ExpandArgs),
    /// Witten zeta function of SU(N).
    Zeta(ZetaArgs),
    /// Moments of the first coordinate under the Gaussian highest-weight measure.
    Moments(MomentsArgs),
    /// Gaussian expectation against the partition-coupling formula.
    CouplingCheck(CouplingArgs),
    /// Hurwitz number H₁(n, 2k).
    Hurwitz(HurwitzArgs),
    /// The generating series F_k(q).
    Fseries(FseriesArgs),
    /// Sphere free energy log Z / N² over a grid.
    DkScan(DkArgs),
    /// Monte Carlo estimate of Z on a map.
    McZ(McZArgs),
    /// Monte Carlo Wilson loop expectation.
    McWilson(McWilsonArgs),
    /// SU(2) character identities by Monte Carlo and quadrature.
    VerifyIdentities(IdentityArgs),
    /// Counts and genus of a map.
    MapInfo(MapArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ZArgs {
    #[arg(long = "N")]
    rank: usize,
    #[arg(long)]
    g: u32,
    #[arg(long)]
    t: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct LimitsArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    t: f64,
    #[arg(long = "Ns", value_delimiter = ',', default_value = "1,2,3,4,6,8")]
    ranks: Vec<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ExpandArgs {
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Ranks for the Richardson oracle.
    #[arg(long = "Ns", value_delimiter = ',', default_value = "6,8,10,12")]
    ranks: Vec<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ZetaArgs {
    #[arg(long = "N")]
    rank: usize,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    /// Largest partition size summed.
    #[arg(long, default_value_t = 100_000)]
    nmax: u32,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct MomentsArgs {
    #[arg(long = "N", default_value_t = 1)]
    rank: usize,
    #[arg(long)]
    t: f64,
    /// Highest power.
    #[arg(long, default_value_t = 4)]
    p: u32,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct CouplingArgs {
    #[arg(long = "N")]
    rank: usize,
    #[arg(long)]
    t: f64,
}

#[derive(Debug, Args)]
struct HurwitzArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Also count monodromy tuples in S_n.
    #[arg(long)]
    oracle: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct FseriesArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 40)]
    nmax: u32,
    /// Also report the branching-restricted mass Σ_{k ≤ kmax} with this cap.
    #[arg(long)]
    kmax: Option<u32>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct DkArgs {
    #[arg(long = "Ns", value_delimiter = ',', default_value = "2,4,8,16")]
    ranks: Vec<usize>,
    #[arg(long = "ts", value_delimiter = ',', default_value = "1,2,4,6,8,9,10,11,12,14,16,20")]
    ts: Vec<f64>,
}

#[derive(Debug, Args)]
struct MapSource {
    /// Map file, one face boundary word per line.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Use the one-face map of this genus when no file is given.
    #[arg(long)]
    g: Option<u32>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct McZArgs {
    #[command(flatten)]
    source: MapSource,
    #[arg(long, default_value = "su2")]
    group: SmallGroup,
    #[arg(long)]
    t: f64,
    /// Face areas, comma separated; equal split by default.
    #[arg(long, value_delimiter = ',')]
    areas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct McWilsonArgs {
    #[command(flatten)]
    source: MapSource,
    #[arg(long, default_value = "su2")]
    group: SmallGroup,
    #[arg(long)]
    t: f64,
    #[arg(long, value_delimiter = ',')]
    areas: Option<Vec<f64>>,
    /// Loop word such as "a b a^-1".
    #[arg(long = "loop")]
    word: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Apply a random gauge transformation to each sample.
    #[arg(long)]
    gauged: bool,
}

#[derive(Debug, Args)]
struct IdentityArgs {
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[command(flatten)]
    source: MapSource,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::NonConvergence { .. } | Error::SlowConvergence { .. }) => EXIT_NONCONVERGENCE,
            _ => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(m) => f.write_str(m),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a command produced: scalar fields plus, for scans, a table.
struct Report {
    params: Value,
    formula: &'static str,
    truncation: Value,
    fields: Map<String, Value>,
    table: Option<(Vec<&'static str>, Vec<Vec<Value>>)>,
}

impl Report {
    fn new(params: Value, formula: &'static str) -> Self {
        Report {
            params,
            formula,
            truncation: Value::Null,
            fields: Map::new(),
            table: None,
        }
    }

    fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.fields.insert(key.to_string(), v.into());
    }
}

fn big_to_json(v: &impl ToString) -> Value {
    let s = v.to_string();
    s.parse::<u64>().map(Value::from).unwrap_or(Value::String(s))
}

fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn load_map(src: &MapSource) -> Outcome<CombinatorialMap> {
    match (&src.map, src.g) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(CombinatorialMap::parse(&text)?)
        }
        (None, Some(g)) => Ok(fundamental_map(g)?),
        (None, None) => Err(Failure::Core(Error::Domain("give --map FILE or --g GENUS".into()))),
    }
}

fn face_areas(map: &CombinatorialMap, t: f64, areas: &Option<Vec<f64>>) -> Vec<f64> {
    match areas {
        Some(a) => a.clone(),
        None => vec![t / map.face_count() as f64; map.face_count()],
    }
}

fn truncation(tol: Option<f64>, default: Truncation) -> Truncation {
    tol.map(Truncation::new).unwrap_or(default)
}

fn trunc_json(t: &Truncation) -> Value {
    json!({ "tol": t.tol, "maxCasimir": t.max_cap })
}

fn execute(cli: &Cli) -> Outcome<Report> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.command {
        Command::Z(a) => {
            let tr = truncation(cli.tol, Truncation::for_genus(a.g));
            let r = migdal_z(a.rank, a.g, a.t, &tr)?;
            let mut rep = Report::new(json!({"N": a.rank, "g": a.g, "t": a.t}), "character sum over U(N) highest weights");
            rep.truncation = json!({ "tol": tr.tol, "maxCasimir": tr.max_cap, "casimirCap": r.cap });
            rep.set("value", float(r.value));
            rep.set("tailEstimate", float(r.tail_estimate));
            rep.set("weightsSummed", r.weights_summed);
            rep.set("warnings", r.warnings);
            Ok(rep)
        }
        Command::Limits(a) => {
            let limit = match a.g {
                0 => return Err(Error::Domain("no finite large-N limit on the sphere".into()).into()),
                1 => limit_g_1(a.t)?,
                _ => limit_g_ge_2(a.t)?,
            };
            let tr = truncation(cli.tol, Truncation::for_genus(a.g));
            let mut rows = Vec::new();
            for &n in &a.ranks {
                let z = migdal_z(n, a.g, a.t, &tr)?;
                rows.push(vec![json!(n), float(z.value), float(limit), float(z.value - limit), float(z.tail_estimate)]);
            }
            let mut rep = Report::new(json!({"g": a.g, "t": a.t, "Ns": a.ranks}), "character sum against its large-N limit");
            rep.truncation = trunc_json(&tr);
            rep.set("limit", float(limit));
            rep.table = Some((vec!["N", "value", "limit", "residual", "tailEstimate"], rows));
            Ok(rep)
        }
        Command::Expand(a) => {
            let mut opts = TorusOptions { oracle_ranks: a.ranks.clone(), ..Default::default() };
            if let Some(tol) = cli.tol {
                opts.truncation = Truncation::new(tol);
            }
            let e = torus_expansion(a.t, a.p, &opts)?;
            let mut rep = Report::new(json!({"t": a.t, "p": a.p, "Ns": a.ranks}), "torus 1/N^2 expansion from q-uniform moments");
            rep.truncation = json!({ "tol": opts.truncation.tol, "momentSizeCutoff": e.moment_size_cutoff, "tailEstimate": e.tail_estimate });
            rep.set("coefficients", e.coefficients.iter().map(|v| float(*v)).collect::<Vec<_>>());
            rep.set("oracle", e.oracle.iter().map(|v| float(*v)).collect::<Vec<_>>());
            rep.set("relativeDisagreement", e.relative_disagreement.iter().map(|v| float(*v)).collect::<Vec<_>>());
            rep.set("flagged", e.flagged);
            Ok(rep)
        }
        Command::Zeta(a) => {
            let tol = cli.tol.unwrap_or(1e-6);
            let z = witten_zeta_su(a.rank, a.s, tol, a.nmax)?;
            let mut rep = Report::new(json!({"N": a.rank, "s": a.s, "nmax": a.nmax}), "Witten zeta over SU(N) irreducibles");
            rep.truncation = json!({ "tol": tol, "rigorous": z.rigorous });
            rep.set("value", float(z.value));
            rep.set("tailEstimate", float(z.tail_bound));
            rep.set("termsUsed", z.terms_used);
            Ok(rep)
        }
        Command::Moments(a) => {
            let tr = truncation(cli.tol, Truncation::new(1e-13));
            let m = GaussianHWMeasure::new(a.rank, a.t, &tr)?;
            let q = q_of_t(a.t);
            let th = theta(q, 1e-16)?.value;
            let mut moments = Vec::new();
            for k in 1..=a.p {
                let e = gaussian_expectation(&m, |w| (w.coeffs()[0] as f64).powi(k as i32), &tr)?;
                let mut entry = json!({ "power": k, "value": float(e.value), "tailEstimate": float(e.tail_estimate) });
                if a.rank == 1 {
                    let reference = if k % 2 == 1 { 0.0 } else { theta_qdq(q, k / 2, 1e-16)?.value / th };
                    entry["reference"] = float(reference);
                }
                moments.push(entry);
            }
            let mut rep = Report::new(json!({"N": a.rank, "t": a.t, "p": a.p}), "moments of lambda_1 under the Gaussian highest-weight measure");
            rep.truncation = trunc_json(&tr);
            rep.set("normalization", float(m.normalization));
            rep.set("moments", moments);
            Ok(rep)
        }
        Command::CouplingCheck(a) => {
            let tr = truncation(cli.tol, Truncation::new(1e-13));
            let m = GaussianHWMeasure::new(a.rank, a.t, &tr)?;
            let casimir = |w: &HighestWeight| w.casimir_numerator() as f64 / w.rank() as f64;
            let mut checks = Vec::new();
            for (name, f) in [("1", &(|_: &HighestWeight| 1.0) as &(dyn Fn(&HighestWeight) -> f64 + Sync)), ("c2", &casimir)] {
                let lhs = gaussian_expectation(&m, f, &tr)?.value;
                let rhs = coupling_rhs(a.rank, a.t, f, &tr)?;
                checks.push(json!({
                    "observable": name,
                    "expectation": float(lhs),
                    "coupling": float(rhs.value),
                    "difference": float((lhs - rhs.value).abs()),
                    "levels": rhs.levels,
                }));
            }
            let mut rep = Report::new(json!({"N": a.rank, "t": a.t}), "Gaussian highest-weight measure against q-uniform coupling");
            rep.truncation = trunc_json(&tr);
            rep.set("checks", checks);
            Ok(rep)
        }
        Command::Hurwitz(a) => {
            let count = hurwitz_count(a.n, a.k)?;
            let mut rep = Report::new(json!({"n": a.n, "k": a.k, "oracle": a.oracle}), "Frobenius content-sum formula");
            rep.set("count", big_to_json(&count));
            rep.set("coveringEulerCharacteristic", euler_characteristic_of_covering(a.n, a.k)?);
            if a.oracle {
                let o = monodromy_oracle(a.n, a.k)?;
                let matches = o.is_integer() && o.numer().to_string() == count.to_string();
                rep.set("oracle", if o.is_integer() { big_to_json(o.numer()) } else { Value::String(o.to_string()) });
                rep.set("match", matches);
            }
            Ok(rep)
        }
        Command::Fseries(a) => {
            let f = f_series(a.k, q_of_t(a.t), a.nmax)?;
            let v = f.value();
            let coefficients: Vec<Value> = (1..=f.n_max()).map(|n| big_to_json(f.coefficient(n))).collect();
            let mut rep = Report::new(json!({"k": a.k, "t": a.t, "nmax": a.nmax, "kmax": a.kmax}), "generating series of torus Hurwitz numbers");
            rep.truncation = json!({ "nmax": a.nmax, "rigorous": v.rigorous });
            rep.set("q", float(f.q));
            rep.set("value", float(v.value));
            rep.set("tailEstimate", float(v.tail_bound));
            rep.set("coefficients", coefficients);
            if let Some(k_max) = a.kmax {
                rep.set("rhoMass", float(rho_mass(a.t, a.nmax, k_max)?));
            }
            Ok(rep)
        }
        Command::DkScan(a) => {
            let mut rows = Vec::new();
            for &n in &a.ranks {
                for &t in &a.ts {
                    rows.push(vec![json!(n), float(t), float(dk_free_energy(n, t)?)]);
                }
            }
            let mut rep = Report::new(json!({"Ns": a.ranks, "ts": a.ts}), "sphere free energy via discrete orthogonal polynomials");
            rep.table = Some((vec!["N", "t", "freeEnergy"], rows));
            Ok(rep)
        }
        Command::McZ(a) => {
            let map = load_map(&a.source)?;
            let areas = face_areas(&map, a.t, &a.areas);
            let opts = McOptions::new(a.samples, seed);
            let (est, reference) = match a.group {
                SmallGroup::Su2 => (
                    estimate_z::<Su2>(&map, a.t, &areas, &opts)?,
                    su2_partition_function(map.genus(), a.t, 1e-15)?,
                ),
                SmallGroup::U1 => (estimate_z::<U1>(&map, a.t, &areas, &opts)?, theta(q_of_t(a.t), 1e-16)?.value),
            };
            let mut rep = Report::new(
                json!({"group": group_name(a.group), "t": a.t, "areas": areas, "samples": a.samples, "seed": seed, "genus": map.genus()}),
                "Haar Monte Carlo of the product of face heat kernels",
            );
            rep.truncation = json!({ "heatKernelTol": opts.heat_tol, "tMin": opts.t_min });
            rep.set("mean", float(est.mean));
            rep.set("stdError", float(est.std_error));
            rep.set("reference", float(reference));
            rep.set("zScore", float((est.mean - reference) / est.std_error));
            Ok(rep)
        }
        Command::McWilson(a) => {
            let map = load_map(&a.source)?;
            let areas = face_areas(&map, a.t, &a.areas);
            let word = LoopWord::parse(&map, &a.word)?;
            let opts = McOptions::new(a.samples, seed);
            let est = match (a.group, a.gauged) {
                (SmallGroup::Su2, false) => wilson::<Su2>(&map, a.t, &areas, &word, &opts, false)?,
                (SmallGroup::Su2, true) => wilson::<Su2>(&map, a.t, &areas, &word, &opts, true)?,
                (SmallGroup::U1, g) => wilson::<U1>(&map, a.t, &areas, &word, &opts, g)?,
            };
            let mut rep = Report::new(
                json!({"group": group_name(a.group), "t": a.t, "areas": areas, "loop": a.word, "samples": a.samples, "seed": seed, "gauged": a.gauged}),
                "weighted Haar Monte Carlo of Re tr of the loop holonomy",
            );
            rep.truncation = json!({ "heatKernelTol": opts.heat_tol, "tMin": opts.t_min });
            rep.set("mean", float(est.mean));
            rep.set("stdError", float(est.std_error));
            rep.set("effectiveSampleSize", float(est.effective_sample_size));
            rep.set("degenerate", est.degenerate);
            Ok(rep)
        }
        Command::VerifyIdentities(a) => {
            let r = verify_character_identities(a.samples, seed)?;
            let checks: Vec<Value> = r
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "estimate": float(c.estimate),
                        "stdError": float(c.std_error),
                        "expected": float(c.expected),
                        "passed": c.passed,
                    })
                })
                .collect();
            let mut rep = Report::new(json!({"samples": a.samples, "seed": seed}), "SU(2) character integrals");
            rep.set("allPassed", r.all_passed());
            rep.set("checks", checks);
            Ok(rep)
        }
        Command::MapInfo(a) => {
            let map = load_map(&a.source)?;
            let mut rep = Report::new(json!({"map": a.source.map, "g": a.source.g}), "Euler formula V - E + F");
            rep.set("vertices", map.vertex_count());
            rep.set("edges", map.edge_count());
            rep.set("faces", map.face_count());
            rep.set("eulerCharacteristic", map.euler_characteristic());
            rep.set("genus", map.genus());
            rep.set("boundaries", map.to_text().lines().map(str::to_string).collect::<Vec<_>>());
            Ok(rep)
        }
    }
}

fn wilson<G: HeatKernel>(
    map: &CombinatorialMap,
    t: f64,
    areas: &[f64],
    word: &LoopWord,
    opts: &McOptions,
    gauged: bool,
) -> ym2_core::Result<ym2_core::monte_carlo::WilsonEstimate> {
    if gauged {
        estimate_wilson_gauged::<G>(map, t, areas, word, opts)
    } else {
        estimate_wilson::<G>(map, t, areas, word, opts)
    }
}

fn group_name(g: SmallGroup) -> &'static str {
    match g {
        SmallGroup::U1 => "u1",
        SmallGroup::Su2 => "su2",
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Z(_) => "z",
        Command::Limits(_) => "limits",
        Command::Expand(_) => "expand",
        Command::Zeta(_) => "zeta",
        Command::Moments(_) => "moments",
        Command::CouplingCheck(_) => "coupling-check",
        Command::Hurwitz(_) => "hurwitz",
        Command::Fseries(_) => "fseries",
        Command::DkScan(_) => "dk-scan",
        Command::McZ(_) => "mc-z",
        Command::McWilson(_) => "mc-wilson",
        Command::VerifyIdentities(_) => "verify-identities",
        Command::MapInfo(_) => "map-info",
    }
}

fn render_json(command: &str, rep: Report, wall: f64, threads: usize) -> String {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(command));
    doc.insert("params".into(), rep.params);
    doc.insert(
        "meta".into(),
        json!({ "wall_time": wall, "formula": rep.formula, "truncation": rep.truncation, "threads": threads }),
    );
    for (k, v) in rep.fields {
        doc.insert(k, v);
    }
    if let Some((headers, rows)) = rep.table {
        let rows: Vec<Value> = rows
            .into_iter()
            .map(|r| Value::Object(headers.iter().map(|h| h.to_string()).zip(r).collect()))
            .collect();
        doc.insert("rows".into(), Value::Array(rows));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serialisable");
    s.push('\n');
    s
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(a) => a.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn render_csv(rep: Report) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    match rep.table {
        Some((headers, rows)) => {
            w.write_record(&headers).map_err(io)?;
            for r in rows {
                w.write_record(r.iter().map(csv_cell)).map_err(io)?;
            }
        }
        None => {
            let scalars: Vec<(&String, &Value)> = rep.fields.iter().filter(|(_, v)| !v.is_object()).collect();
            w.write_record(scalars.iter().map(|(k, _)| k.as_str())).map_err(io)?;
            w.write_record(scalars.iter().map(|(_, v)| csv_cell(v))).map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            eprintln!("error: --tol must be positive");
            return EXIT_DOMAIN;
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let start = Instant::now();
    let result = pool.install(|| execute(&cli));
    let wall = start.elapsed().as_secs_f64();
    let rep = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let scan = rep.table.is_some();
    let format = cli.format.unwrap_or(if scan { Format::Csv } else { Format::Json });
    let text = match format {
        Format::Json => render_json(command_name(&cli.command), rep, wall, pool.current_num_threads()),
        Format::Csv => match render_csv(rep) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        },
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_DOMAIN;
    }
    0
}
