//! Fixtures transcribing worked examples and tables, with a verifier that
//! recomputes every claim.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cone::{polarized_hilbert_scheme, supporting_walls, PicardData};
use crate::error::{Error, Result};
use crate::io::{parse_json, JsonRat};
use crate::k3n::{
    dual_ray, enumerate_wall_types, ht_bound_ok, make_context, wall_test,
    Condition, NContext, WallType,
};
use crate::lattice::{divisibility, inner, LatticeVector};
use crate::num::{format_rat, Int, Rat};

const FIXTURES: &[(&str, &str)] = &[
    ("menodue", include_str!("../../fixtures/menodue.json")),
    ("delta", include_str!("../../fixtures/delta.json")),
    ("p2", include_str!("../../fixtures/p2.json")),
    ("pn", include_str!("../../fixtures/pn.json")),
    ("pn1_bundle", include_str!("../../fixtures/pn1_bundle.json")),
    ("n4_div2", include_str!("../../fixtures/n4_div2.json")),
    ("bm2_nef", include_str!("../../fixtures/bm2_nef.json")),
    ("bm2_negative", include_str!("../../fixtures/bm2_negative.json")),
    ("table_n2", include_str!("../../fixtures/table_n2.json")),
    ("table_n3", include_str!("../../fixtures/table_n3.json")),
    ("table_n4", include_str!("../../fixtures/table_n4.json")),
];

const SEARCH_BOUND: u64 = 12;

#[derive(Clone, Debug, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub origin: String,
    pub n: u64,
    #[serde(default)]
    pub n_generic: bool,
    #[serde(default)]
    pub data: Value,
    pub claims: Vec<Claim>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Claim {
    pub id: String,
    pub expected: Value,
    /// "stated", "elementary" or "computed".
    pub basis: String,
    pub oracle: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssertionResult {
    pub id: String,
    pub expected: Value,
    pub actual: Value,
    pub passed: bool,
    pub basis: String,
    pub oracle: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureReport {
    pub name: String,
    pub n: u64,
    pub assertions: Vec<AssertionResult>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> usize {
        self.assertions.iter().filter(|a| !a.passed).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "fixture": self.name,
            "n": self.n,
            "passed": self.passed(),
            "assertions": self.assertions.iter().map(|a| json!({
                "id": a.id,
                "expected": a.expected,
                "actual": a.actual,
                "passed": a.passed,
                "basis": a.basis,
                "oracle": a.oracle,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Fixture names in a fixed order.
pub fn list_fixtures() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _)| *n).collect()
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let text = FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    parse_json(text)
}

/// Recomputes every claim of a fixture. `n` overrides the stored value for
/// fixtures that hold for all n.
pub fn verify_fixture(name: &str, n: Option<u64>) -> Result<FixtureReport> {
    let fx = load_fixture(name)?;
    let n = match n {
        Some(m) if m != fx.n && !fx.n_generic => {
            return Err(Error::Input(format!("fixture `{name}` is fixed at n = {}", fx.n)));
        }
        Some(m) => m,
        None => fx.n,
    };
    let ctx = make_context(n)?;
    let observed = observe(&fx, &ctx)?;
    let assertions = fx
        .claims
        .iter()
        .map(|c| {
            let expected = evaluate(&c.expected, n);
            let actual = observed.get(&c.id).cloned().unwrap_or(Value::Null);
            AssertionResult {
                id: c.id.clone(),
                passed: normalize(&actual) == normalize(&expected),
                expected,
                actual,
                basis: c.basis.clone(),
                oracle: c.oracle.clone(),
            }
        })
        .collect();
    Ok(FixtureReport {
        name: fx.name,
        n,
        assertions,
    })
}

/// JUnit XML for a set of fixture reports.
pub fn junit_report(reports: &[FixtureReport]) -> String {
    let tests: usize = reports.iter().map(|r| r.assertions.len()).sum();
    let failures: usize = reports.iter().map(FixtureReport::failures).sum();
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<testsuites tests=\"{tests}\" failures=\"{failures}\">\n"
    ));
    for r in reports {
        out.push_str(&format!(
            "  <testsuite name=\"fixture.{}\" tests=\"{}\" failures=\"{}\">\n",
            xml_escape(&r.name),
            r.assertions.len(),
            r.failures()
        ));
        for a in &r.assertions {
            let name = format!("{} (n={})", a.id, r.n);
            if a.passed {
                out.push_str(&format!(
                    "    <testcase classname=\"fixture.{}\" name=\"{}\"/>\n",
                    xml_escape(&r.name),
                    xml_escape(&name)
                ));
            } else {
                let msg = format!("expected {} got {}", a.expected, a.actual);
                out.push_str(&format!(
                    "    <testcase classname=\"fixture.{}\" name=\"{}\">\n      <failure message=\"{}\"/>\n    </testcase>\n",
                    xml_escape(&r.name),
                    xml_escape(&name),
                    xml_escape(&msg)
                ));
            }
        }
        out.push_str("  </testsuite>\n");
    }
    out.push_str("</testsuites>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn evaluate(expected: &Value, n: u64) -> Value {
    if let Some(coeffs) = expected.get("affine_in_n").and_then(Value::as_array) {
        let parse = |v: &Value| -> Option<Rat> {
            serde_json::from_value::<JsonRat>(v.clone()).ok().map(|r| r.0)
        };
        if let [a, b] = coeffs.as_slice() {
            if let (Some(a), Some(b)) = (parse(a), parse(b)) {
                let v = a * Rat::from_integer(Int::from(n)) + b;
                return Value::String(format_rat(&v));
            }
        }
    }
    expected.clone()
}

/// Sorts the outer array of "rows" style values so tables compare as sets.
fn normalize(v: &Value) -> Value {
    match v {
        Value::Array(items) if items.iter().all(Value::is_array) => {
            let mut items = items.clone();
            items.sort_by_key(|x| x.to_string());
            Value::Array(items)
        }
        other => other.clone(),
    }
}

fn s_int(x: &Int) -> Value {
    Value::String(x.to_string())
}

fn s_rat(x: &Rat) -> Value {
    Value::String(format_rat(x))
}

fn int_list(xs: &[Int]) -> Value {
    Value::Array(xs.iter().map(crate::io::int_value).collect())
}

fn data_err(name: &str, what: &str) -> Error {
    Error::Parse(format!("fixture `{name}`: missing or malformed `{what}`"))
}

fn ln_vector(fx: &Fixture, value: Option<&Value>, rank: usize) -> Result<LatticeVector> {
    let map = value
        .and_then(Value::as_object)
        .ok_or_else(|| data_err(&fx.name, "vector"))?;
    let mut coords = vec![Int::zero(); rank];
    for (k, v) in map {
        let i: usize = k.parse().map_err(|_| data_err(&fx.name, "vector"))?;
        let x = v.as_i64().ok_or_else(|| data_err(&fx.name, "vector"))?;
        *coords.get_mut(i).ok_or_else(|| data_err(&fx.name, "vector"))? = Int::from(x);
    }
    Ok(LatticeVector::new(coords))
}

fn pic_vector(fx: &Fixture, key: &str) -> Result<LatticeVector> {
    let v: Vec<i64> = serde_json::from_value(fx.data.get(key).cloned().unwrap_or(Value::Null))
        .map_err(|_| data_err(&fx.name, key))?;
    Ok(LatticeVector::from_i64(&v))
}

fn rat_vector(fx: &Fixture, key: &str) -> Result<Vec<Rat>> {
    let v: Vec<JsonRat> = serde_json::from_value(fx.data.get(key).cloned().unwrap_or(Value::Null))
        .map_err(|_| data_err(&fx.name, key))?;
    Ok(v.into_iter().map(|r| r.0).collect())
}

fn picard(fx: &Fixture, ctx: &NContext) -> Result<PicardData> {
    let d = fx
        .data
        .get("d")
        .and_then(Value::as_i64)
        .ok_or_else(|| data_err(&fx.name, "d"))?;
    polarized_hilbert_scheme(ctx.clone(), d)
}

fn condition_name(c: Option<Condition>) -> Value {
    Value::String(c.map_or("not detected", Condition::name).to_string())
}

fn in_table(ctx: &NContext, t: &WallType) -> bool {
    enumerate_wall_types(ctx).contains(t)
}

fn observe(fx: &Fixture, ctx: &NContext) -> Result<BTreeMap<String, Value>> {
    let mut out = BTreeMap::new();
    macro_rules! put {
        ($k:expr, $v:expr) => {
            out.insert($k.to_string(), $v)
        };
    }
    let ln = ctx.ln();
    match fx.name.as_str() {
        "menodue" | "delta" | "pn" => {
            let d = ln_vector(fx, fx.data.get("vector"), ln.rank())?;
            let sq = inner(ln, &d, &d)?;
            let div = divisibility(ln, &d)?;
            let t = WallType::new(sq.clone(), div.clone())?;
            put!("square", s_int(&sq));
            put!("div", s_int(&div));
            put!("ray_square", s_rat(&t.ray_square));
            put!("on_ht_boundary", json!(t.ray_square == -Rat::new(Int::from(ctx.n() + 3), Int::from(2))));
            put!("in_table", json!(in_table(ctx, &t)));
            let w = wall_test(ctx, &d)?;
            put!("wall_test", condition_name(w.as_ref().map(|w| w.condition)));
            put!("witness_verified", json!(w.as_ref().is_some_and(|w| w.verify())));
            let r = dual_ray(ln, &d)?;
            let integral = (0..ln.rank()).all(|i| {
                ln.inner_rat(&r, &LatticeVector::unit(ln.rank(), i).to_rat()).is_integer()
            });
            put!("dual_ray_integral", json!(integral));
        }
        "pn1_bundle" | "n4_div2" => {
            let mut record = |prefix: &str, ctx: &NContext, d: &LatticeVector| -> Result<()> {
                let ln = ctx.ln();
                out.insert(format!("{prefix}square"), s_int(&inner(ln, d, d)?));
                out.insert(format!("{prefix}div"), s_int(&divisibility(ln, d)?));
                let w = wall_test(ctx, d)?;
                out.insert(format!("{prefix}condition"), condition_name(w.as_ref().map(|w| w.condition)));
                if let Some(w) = w {
                    out.insert(format!("{prefix}witness_pairing"), int_list(&w.pairing_data));
                    out.insert(format!("{prefix}witness_verified"), json!(w.verify()));
                    let positive = w.condition == Condition::BmSumDecomposition && w.verify();
                    out.insert(format!("{prefix}parts_in_positive_sector"), json!(positive));
                }
                Ok(())
            };
            let d = ln_vector(fx, fx.data.get("vector"), ln.rank())?;
            record("", ctx, &d)?;
            if let Some(var) = fx.data.get("variant") {
                let vn = var
                    .get("n")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| data_err(&fx.name, "variant.n"))?;
                let vctx = make_context(vn)?;
                let vd = ln_vector(fx, var.get("vector"), vctx.ln().rank())?;
                record("variant_", &vctx, &vd)?;
            }
        }
        "p2" => {
            let p = picard(fx, ctx)?;
            let d = pic_vector(fx, "divisor")?;
            let t = p.wall_type_of(&d)?;
            put!("square", s_int(&t.square));
            put!("div", s_int(&t.div));
            put!("in_table", json!(in_table(ctx, &t)));
            let ray: Vec<Value> = d
                .coords()
                .iter()
                .map(|c| s_rat(&Rat::new(c.clone(), t.div.clone())))
                .collect();
            put!("ray", Value::Array(ray));
            put!("ray_square", s_rat(&t.ray_square));
            chamber_claims(&mut out, &p, &rat_vector(fx, "omega")?, &enumerate_wall_types(ctx))?;
        }
        "bm2_nef" => {
            let p = picard(fx, ctx)?;
            let omega = rat_vector(fx, "omega")?;
            chamber_claims(&mut out, &p, &omega, &enumerate_wall_types(ctx))?;
            let s = supporting_walls(&p, &omega, &enumerate_wall_types(ctx), SEARCH_BOUND)?;
            let gens: Vec<LatticeVector> = s
                .walls
                .iter()
                .map(|w| orthogonal_ray(&p, &w.wall.d, &omega))
                .collect();
            put!("nef_generators", Value::Array(gens.iter().map(|g| int_list(g.coords())).collect()));
            if let Some(g) = gens.iter().find(|g| !g.coords()[1].is_zero()) {
                put!("nef_coefficient", s_rat(&Rat::new(g.coords()[1].clone(), g.coords()[0].clone())));
            }
        }
        "bm2_negative" => {
            let p = picard(fx, ctx)?;
            let omega = rat_vector(fx, "omega")?;
            let rp = pic_vector(fx, "r_prime")?;
            let t = p.wall_type_of(&rp)?;
            put!("r_prime_type", json!([crate::io::int_value(&t.square), crate::io::int_value(&t.div)]));
            put!("r_prime_ray_square", s_rat(&t.ray_square));
            put!("r_prime_ht_ok", json!(ht_bound_ok(ctx.n(), &t.ray_square)));
            let candidates = enumerate_wall_types(ctx);
            put!("r_prime_is_candidate_type", json!(candidates.contains(&t)));
            let actual: Vec<(i64, i64)> = serde_json::from_value(
                fx.data.get("actual_types").cloned().unwrap_or(Value::Null),
            )
            .map_err(|_| data_err(&fx.name, "actual_types"))?;
            let actual = actual
                .into_iter()
                .map(|(s, m)| WallType::from_i64(s, m))
                .collect::<Result<Vec<_>>>()?;
            let s = supporting_walls(&p, &omega, &actual, SEARCH_BOUND)?;
            put!("actual_supporting", Value::Array(s.walls.iter().map(|w| int_list(w.wall.d.coords())).collect()));
            put!("r_prime_supporting_in_actual", json!(s.walls.iter().any(|w| w.wall.wall_type == t)));
            let nef = pic_vector(fx, "nef_class")?;
            put!("r_prime_pairing_with_nef", s_int(&inner(p.pic(), &rp, &nef)?));
            let cand = supporting_walls(&p, &omega, &candidates, SEARCH_BOUND)?;
            put!("candidate_supporting_contains_r_prime", json!(cand.walls.iter().any(|w| w.wall.d == rp)));
            put!("caveat", json!(ctx.n() >= 5));
        }
        "table_n2" | "table_n3" | "table_n4" => {
            let rows: Vec<Value> = enumerate_wall_types(ctx)
                .iter()
                .map(|t| json!([format_rat(&t.ray_square), t.square.to_string(), t.div.to_string()]))
                .collect();
            put!("count", json!(rows.len()));
            put!("rows", Value::Array(rows));
        }
        other => return Err(Error::UnknownFixture(other.to_string())),
    }
    Ok(out)
}

fn chamber_claims(
    out: &mut BTreeMap<String, Value>,
    p: &PicardData,
    omega: &[Rat],
    types: &[WallType],
) -> Result<()> {
    let s = supporting_walls(p, omega, types, SEARCH_BOUND)?;
    let walls = s.walls.iter().map(|w| int_list(w.wall.d.coords())).collect();
    out.insert("supporting".into(), Value::Array(walls));
    let squares = s.walls.iter().map(|w| s_rat(&w.wall.wall_type.ray_square)).collect();
    out.insert("ray_squares".into(), Value::Array(squares));
    out.insert("completeness".into(), Value::String(s.completeness.label()));
    Ok(())
}

/// Primitive generator of D^⊥ in a rank-two Picard lattice, positive on ω.
fn orthogonal_ray(p: &PicardData, d: &LatticeVector, omega: &[Rat]) -> LatticeVector {
    let gd = p.pic().gram().mul_vec(d.coords());
    let g = LatticeVector::new(vec![gd[1].clone(), -gd[0].clone()]);
    let c = g.content();
    let g = LatticeVector::new(g.coords().iter().map(|x| x / &c).collect());
    if p.inner(&g.to_rat(), omega).is_negative() {
        g.neg()
    } else {
        g
    }
}
