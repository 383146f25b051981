//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::catalog::{junit_report, list_fixtures, load_fixture, verify_fixture, FixtureReport};
use crate::cone::{polarized_hilbert_scheme, ChamberReport, PicardData};
use crate::error::{Error, Result};
use crate::io::{int_value, matrix_from_json, parse_json, rats, vector_value, JsonInt, JsonRat};
use crate::k3n::{
    eichler_invariants, eichler_transvection, enumerate_wall_types, make_context, same_orbit,
    wall_test, wall_type_exists, EichlerInvariants, NContext, WallType,
};
use crate::lattice::{divisibility, inner, is_primitive, LatticeVector};
use crate::num::format_rat;

pub const CAVEAT: &str = "note: for n >= 5 these are candidate wall types (numerical bound and \
existence only); some of them are not actual walls";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "wallkit", version, about = "Exact wall and chamber computations for K3^[n]-type lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Height bound for candidate wall searches.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    pub bound: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Read the JSON query from this file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Suppress notes on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Candidate wall types (r², D², div) for a given n.
    Tabulate {
        #[arg(long)]
        n: u64,
    },
    /// Markman and Bayer–Macrì wall test for a vector or a wall type.
    WallTest {
        #[arg(long)]
        n: u64,
        /// {"coords": [..]}, a bare coordinate array, or {"square": s, "div": m}.
        query: Option<String>,
    },
    /// Compares the orbit invariants of two primitive vectors of L_n.
    Orbit {
        #[arg(long)]
        n: u64,
        v: Option<String>,
        w: Option<String>,
    },
    /// Supporting walls and extremal rays of the chamber of ω.
    Chamber { query: Option<String> },
    /// Recomputes the claims of one fixture, or all of them.
    Verify {
        name: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        /// Also write a JUnit XML report here.
        #[arg(long)]
        junit: Option<PathBuf>,
    },
    ListFixtures,
    /// Randomized consistency checks on L_n, reproducible from --seed.
    Selfcheck {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::OnWall { .. } => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut note = |text: &str| {
        if !cli.quiet {
            let _ = writeln!(err, "{text}");
        }
    };
    match &cli.command {
        Command::Tabulate { n } => {
            let ctx = make_context(*n)?;
            let rows = enumerate_wall_types(&ctx);
            emit(out, &render_types(&rows, *n, cli.format))?;
            if *n >= 5 {
                note(CAVEAT);
            }
            Ok(0)
        }
        Command::WallTest { n, query } => {
            let ctx = make_context(*n)?;
            let q = query_text(cli, query.as_deref())?;
            let d = wall_test_vector(&ctx, &q)?;
            let result = wall_test(&ctx, &d)?;
            match cli.format {
                Format::Json => {
                    let body = match &result {
                        Some(w) => json!({"n": n, "D": vector_value(&d), "detected": true, "witness": w.to_json()}),
                        None => json!({"n": n, "D": vector_value(&d), "detected": false}),
                    };
                    emit(out, &pretty(&body))?;
                }
                Format::Table | Format::Csv => {
                    let line = match &result {
                        Some(w) => format!("detected {}", w.condition.name()),
                        None => "not detected".to_string(),
                    };
                    emit(out, &format!("{line}\n"))?;
                }
            }
            Ok(if result.is_some() { 0 } else { 1 })
        }
        Command::Orbit { n, v, w } => {
            let ctx = make_context(*n)?;
            let (v, w) = orbit_vectors(cli, &ctx, v.as_deref(), w.as_deref())?;
            let iv = eichler_invariants(ctx.ln(), &v)?;
            let iw = eichler_invariants(ctx.ln(), &w)?;
            let same = same_orbit(ctx.ln(), &v, &w)?;
            match cli.format {
                Format::Json => {
                    let body = json!({"n": n, "v": invariants_json(&iv), "w": invariants_json(&iw), "same_orbit": same});
                    emit(out, &pretty(&body))?;
                }
                Format::Table | Format::Csv => {
                    emit(
                        out,
                        &format!(
                            "v: {}\nw: {}\n{}\n",
                            invariants_line(&iv),
                            invariants_line(&iw),
                            if same { "same orbit" } else { "different orbits" }
                        ),
                    )?;
                }
            }
            Ok(if same { 0 } else { 1 })
        }
        Command::Chamber { query } => {
            let report = run_chamber_query(&query_text(cli, query.as_deref())?, cli.bound)?;
            match cli.format {
                Format::Json => emit(out, &pretty(&report.to_json()))?,
                Format::Table | Format::Csv => emit(out, &chamber_table(&report))?,
            }
            if report.n >= 5 {
                note(CAVEAT);
            }
            Ok(0)
        }
        Command::Verify { name, n, junit } => {
            let names: Vec<String> = match name {
                Some(x) => vec![x.clone()],
                None => list_fixtures().iter().map(|s| s.to_string()).collect(),
            };
            let reports = names
                .iter()
                .map(|x| verify_fixture(x, *n))
                .collect::<Result<Vec<_>>>()?;
            if let Some(path) = junit {
                std::fs::write(path, junit_report(&reports))
                    .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(out, &render_reports(&reports, cli.format))?;
            if reports.iter().any(|r| r.n >= 5 && r.name == "bm2_negative") {
                note(CAVEAT);
            }
            Ok(if reports.iter().all(FixtureReport::passed) { 0 } else { 1 })
        }
        Command::ListFixtures => {
            let mut text = String::new();
            for name in list_fixtures() {
                let fx = load_fixture(name)?;
                match cli.format {
                    Format::Json => {}
                    Format::Csv => text.push_str(&format!("{name},{}\n", fx.n)),
                    Format::Table => text.push_str(&format!("{name:<14} n={:<3} {}\n", fx.n, fx.origin)),
                }
            }
            if cli.format == Format::Json {
                text = pretty(&json!(list_fixtures()));
            }
            emit(out, &text)?;
            Ok(0)
        }
        Command::Selfcheck { n, samples } => {
            let ctx = make_context(*n)?;
            let summary = selfcheck(&ctx, *samples, cli.seed, cli.bound)?;
            let ok = summary["violations"] == json!(0);
            match cli.format {
                Format::Json => emit(out, &pretty(&summary))?,
                Format::Table | Format::Csv => emit(
                    out,
                    &format!(
                        "n={} seed={} samples={} violations={}\n",
                        n, cli.seed, samples, summary["violations"]
                    ),
                )?,
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Input(format!("cannot write output: {e}")))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn query_text(cli: &Cli, inline: Option<&str>) -> Result<String> {
    match (inline, &cli.input) {
        (Some(_), Some(_)) => Err(Error::Input("give either inline JSON or --input, not both".into())),
        (Some(q), None) => Ok(q.to_string()),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display()))),
        (None, None) => Err(Error::Input("missing query: pass inline JSON or --input FILE".into())),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorJson {
    Bare(Vec<JsonInt>),
    Coords { coords: Vec<JsonInt> },
}

impl VectorJson {
    fn into_vector(self) -> LatticeVector {
        let v = match self {
            VectorJson::Bare(v) | VectorJson::Coords { coords: v } => v,
        };
        LatticeVector::new(v.into_iter().map(|x| x.0).collect())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WallTestQuery {
    Type { square: JsonInt, div: JsonInt },
    Vector(VectorJson),
}

fn wall_test_vector(ctx: &NContext, text: &str) -> Result<LatticeVector> {
    match parse_json::<WallTestQuery>(text)? {
        WallTestQuery::Vector(v) => Ok(v.into_vector()),
        WallTestQuery::Type { square, div } => {
            let t = WallType::new(square.0, div.0)?;
            wall_type_exists(ctx, &t.square, &t.div)?.ok_or_else(|| {
                Error::Input(format!("no primitive vector of type {t} exists in L_{}", ctx.n()))
            })
        }
    }
}

#[derive(Deserialize)]
struct OrbitQuery {
    v: VectorJson,
    w: VectorJson,
}

fn orbit_vectors(
    cli: &Cli,
    ctx: &NContext,
    v: Option<&str>,
    w: Option<&str>,
) -> Result<(LatticeVector, LatticeVector)> {
    let (v, w) = match (v, w) {
        (Some(v), Some(w)) if cli.input.is_none() => (
            parse_json::<VectorJson>(v)?.into_vector(),
            parse_json::<VectorJson>(w)?.into_vector(),
        ),
        (None, None) => {
            let q: OrbitQuery = parse_json(&query_text(cli, None)?)?;
            (q.v.into_vector(), q.w.into_vector())
        }
        _ => return Err(Error::Input("orbit needs two inline vectors or an --input file".into())),
    };
    for x in [&v, &w] {
        if x.len() != ctx.ln().rank() {
            return Err(Error::Input(format!(
                "vector {x} has {} coordinates, L_n has rank {}",
                x.len(),
                ctx.ln().rank()
            )));
        }
    }
    Ok((v, w))
}

fn invariants_json(i: &EichlerInvariants) -> Value {
    json!({
        "square": int_value(&i.square),
        "div": int_value(&i.div),
        "class": i.class.exponents().iter().map(int_value).collect::<Vec<_>>(),
    })
}

fn invariants_line(i: &EichlerInvariants) -> String {
    let class: Vec<String> = i.class.exponents().iter().map(ToString::to_string).collect();
    format!("square {} div {} class [{}]", i.square, i.div, class.join(","))
}

/// A bare matrix, a lattice {"label"?, "gram"} or an embedding {"matrix"}.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixJson {
    Bare(Vec<Vec<JsonInt>>),
    Lattice { gram: Vec<Vec<JsonInt>> },
    Embedding { matrix: Vec<Vec<JsonInt>> },
}

impl MatrixJson {
    fn rows(&self) -> &[Vec<JsonInt>] {
        match self {
            MatrixJson::Bare(m) | MatrixJson::Lattice { gram: m, .. } | MatrixJson::Embedding { matrix: m } => m,
        }
    }
}

/// Parses a chamber query and builds its report; `default_bound` applies
/// when the query has no `bound`.
pub fn run_chamber_query(text: &str, default_bound: u64) -> Result<ChamberReport> {
    parse_json::<ChamberQuery>(text)?.run(default_bound)
}

/// JSON rows {n, square, div, ray_square}.
pub fn wall_types_json(rows: &[WallType], n: u64) -> Value {
    Value::Array(
        rows.iter()
            .map(|t| {
                json!({
                    "n": n,
                    "square": int_value(&t.square),
                    "div": int_value(&t.div),
                    "ray_square": format_rat(&t.ray_square),
                })
            })
            .collect(),
    )
}

/// Chamber query. Either `pic_gram` and `embed` (23×ρ, columns are images
/// in L_n) or `polarized_degree` d for ⟨2d⟩ ⊕ ⟨−(2n−2)⟩.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChamberQuery {
    n: u64,
    #[serde(default)]
    pic_gram: Option<MatrixJson>,
    #[serde(default)]
    embed: Option<MatrixJson>,
    #[serde(default)]
    polarized_degree: Option<i64>,
    omega: Vec<JsonRat>,
    #[serde(default)]
    alpha: Option<Vec<JsonRat>>,
    #[serde(default)]
    beta: Option<Vec<JsonRat>>,
    #[serde(default)]
    bound: Option<u64>,
    /// Overrides the candidate types with explicit (square, div) pairs.
    #[serde(default)]
    types: Option<Vec<(JsonInt, JsonInt)>>,
}

impl ChamberQuery {
    fn run(self, default_bound: u64) -> Result<ChamberReport> {
        let ctx = make_context(self.n)?;
        let p = self.picard(ctx.clone())?;
        let types = match self.types {
            Some(ts) => ts
                .into_iter()
                .map(|(s, m)| WallType::new(s.0, m.0))
                .collect::<Result<Vec<_>>>()?,
            None => enumerate_wall_types(&ctx),
        };
        let bound = self.bound.unwrap_or(default_bound);
        if bound == 0 {
            return Err(Error::Input("bound must be at least 1".into()));
        }
        let omega = rats(&self.omega);
        let ab = match (self.alpha, self.beta) {
            (Some(a), Some(b)) => Some((rats(&a), rats(&b))),
            (None, None) => None,
            _ => return Err(Error::Input("alpha and beta must be given together".into())),
        };
        let p = p.with_reference(omega.clone())?;
        ChamberReport::build(
            &p,
            &omega,
            ab.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice())),
            &types,
            bound,
        )
    }

    fn picard(&self, ctx: NContext) -> Result<PicardData> {
        match (&self.pic_gram, &self.embed, self.polarized_degree) {
            (Some(g), Some(e), None) => {
                PicardData::new(ctx, matrix_from_json(g.rows())?, matrix_from_json(e.rows())?)
            }
            (None, None, Some(d)) => polarized_hilbert_scheme(ctx, d),
            _ => Err(Error::Input(
                "chamber query needs either pic_gram and embed, or polarized_degree".into(),
            )),
        }
    }
}

fn render_types(rows: &[WallType], n: u64, format: Format) -> String {
    match format {
        Format::Json => pretty(&wall_types_json(rows, n)),
        Format::Csv => {
            let mut s = String::from("r2,D2,div\n");
            for t in rows {
                s.push_str(&format!("{},{},{}\n", format_rat(&t.ray_square), t.square, t.div));
            }
            s
        }
        Format::Table => {
            let mut s = format!("{:>10} {:>8} {:>5}\n", "r2", "D2", "div");
            for t in rows {
                s.push_str(&format!(
                    "{:>10} {:>8} {:>5}\n",
                    format_rat(&t.ray_square),
                    t.square.to_string(),
                    t.div.to_string()
                ));
            }
            s
        }
    }
}

fn chamber_table(r: &ChamberReport) -> String {
    let mut s = format!(
        "n={} completeness={} candidates={}\n",
        r.n,
        r.supporting.completeness.label(),
        r.supporting.candidates
    );
    for ray in &r.rays {
        let d: Vec<String> = ray.wall.d.coords().iter().map(ToString::to_string).collect();
        let v: Vec<String> = ray.ray.iter().map(format_rat).collect();
        s.push_str(&format!(
            "wall [{}] type {} ray [{}] ray_square {}\n",
            d.join(","),
            ray.wall.wall_type,
            v.join(","),
            format_rat(&ray.ray_square)
        ));
    }
    if let Some(ws) = &r.walls_crossed {
        for w in ws {
            let d: Vec<String> = w.d.coords().iter().map(ToString::to_string).collect();
            s.push_str(&format!("crossed [{}] type {}\n", d.join(","), w.wall_type));
        }
    }
    s
}

fn render_reports(reports: &[FixtureReport], format: Format) -> String {
    match format {
        Format::Json => pretty(&Value::Array(reports.iter().map(FixtureReport::to_json).collect())),
        Format::Csv => {
            let mut s = String::from("fixture,n,id,passed\n");
            for r in reports {
                for a in &r.assertions {
                    s.push_str(&format!("{},{},{},{}\n", r.name, r.n, a.id, a.passed));
                }
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for r in reports {
                for a in &r.assertions {
                    let tag = if a.passed { "PASS" } else { "FAIL" };
                    s.push_str(&format!("{tag} {}/{} (n={})", r.name, a.id, r.n));
                    if !a.passed {
                        s.push_str(&format!(": expected {} got {}", a.expected, a.actual));
                    }
                    s.push('\n');
                }
            }
            s
        }
    }
}

/// Random primitive vector of L_n with coordinates in [−h, h].
fn random_primitive(rng: &mut ChaCha8Rng, ctx: &NContext, h: i64) -> Result<LatticeVector> {
    loop {
        let coords: Vec<i64> = (0..ctx.ln().rank()).map(|_| rng.gen_range(-h..=h)).collect();
        let x = LatticeVector::from_i64(&coords);
        if !x.is_zero() && is_primitive(ctx.ln(), &x)? {
            return Ok(x);
        }
    }
}

fn selfcheck(ctx: &NContext, samples: usize, seed: u64, bound: u64) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = i64::try_from(bound).unwrap_or(i64::MAX).min(1 << 20);
    let ln = ctx.ln();
    let rank = ln.rank();
    let mut e = LatticeVector::zero(rank);
    e = e.add(&LatticeVector::unit(rank, 0));
    let mut transvection = 0usize;
    let mut existence = 0usize;
    let mut checked_types = 0usize;
    for _ in 0..samples {
        let x = random_primitive(&mut rng, ctx, h)?;
        let mut a: Vec<i64> = (0..rank).map(|_| rng.gen_range(-h..=h)).collect();
        a[1] = 0;
        let a = LatticeVector::from_i64(&a);
        let y = eichler_transvection(ln, &e, &a, &x)?;
        if eichler_invariants(ln, &x)? != eichler_invariants(ln, &y)? {
            transvection += 1;
        }
        let sq = inner(ln, &x, &x)?;
        if sq.is_negative() && !sq.is_zero() {
            checked_types += 1;
            let div = divisibility(ln, &x)?;
            if wall_type_exists(ctx, &sq, &div)?.is_none() {
                existence += 1;
            }
        }
    }
    Ok(json!({
        "n": ctx.n(),
        "seed": seed,
        "samples": samples,
        "height": h,
        "negative_samples": checked_types,
        "transvection_violations": transvection,
        "existence_violations": existence,
        "violations": transvection + existence,
    }))
}
