//! JSON, CSV and markdown encodings of configurations, reports and series.

use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::catalog;
use crate::error::{Error, Result};
use crate::geometry::{Ambient, Configuration, CurveOnSquare, SingularLocusReport};
use crate::intmat::Int;
use crate::isogeny::{self, NonBirationalFormula, Series, SeriesTermRecord};
use crate::lattice::RatVec;
use crate::quad::{FieldTag, QuadInt};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Integers that fit in `i64` are JSON numbers, larger ones decimal strings.
pub fn int_json(n: &Int) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<Int> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Int::from)
            .or_else(|| n.as_u64().map(Int::from))
            .ok_or_else(|| parse_err(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse().map_err(|_| parse_err(format!("not an integer: {s:?}"))),
        _ => Err(parse_err(format!("expected an integer, found {v}"))),
    }
}

fn u64_from_json(v: &Value, what: &str) -> Result<u64> {
    int_from_json(v)?
        .to_u64()
        .ok_or_else(|| parse_err(format!("{what} must be a nonnegative 64-bit integer")))
}

pub fn quad_json(q: &QuadInt) -> Value {
    json!({"d": q.tag().d(), "x": int_json(q.x()), "y": int_json(q.y())})
}

/// Reads `{"d","x","y"}`; a string literal such as `"1+2*w"` is read in `tag`.
pub fn quad_from_json(v: &Value, tag: Option<FieldTag>) -> Result<QuadInt> {
    match v {
        Value::Object(m) => {
            let get = |k: &str| m.get(k).ok_or_else(|| parse_err(format!("QuadInt is missing {k:?}")));
            let d = u64_from_json(get("d")?, "d")?;
            let d = u32::try_from(d).map_err(|_| parse_err("d out of range"))?;
            let t = FieldTag::new(d).map_err(|e| parse_err(e.to_string()))?;
            if let Some(tag) = tag {
                tag.check_same(t)?;
            }
            Ok(QuadInt::new(t, int_from_json(get("x")?)?, int_from_json(get("y")?)?))
        }
        Value::String(s) => {
            let tag = tag.ok_or_else(|| parse_err("a string literal needs a known field"))?;
            QuadInt::parse(tag, s)
        }
        Value::Number(_) => {
            let tag = tag.ok_or_else(|| parse_err("an integer literal needs a known field"))?;
            Ok(QuadInt::from_int(tag, int_from_json(v)?))
        }
        _ => Err(parse_err(format!("expected a QuadInt, found {v}"))),
    }
}

pub fn fraction_string(p: &Int, q: &Int) -> String {
    format!("{p}/{q}")
}

/// `"p/q"` or `"p"`.
pub fn parse_fraction(s: &str) -> Result<(Int, Int)> {
    let s = s.trim();
    let bad = || parse_err(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: Int = p.parse().map_err(|_| bad())?;
    let q: Int = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(parse_err("zero denominator"));
    }
    Ok((p, q))
}

pub fn ratvec_json(v: &RatVec) -> Value {
    Value::Array(
        v.entries()
            .iter()
            .map(|(p, q)| json!(fraction_string(p, q)))
            .collect(),
    )
}

fn curve_json(c: &CurveOnSquare) -> Value {
    let (a, b) = c.slope();
    json!({"slope": [quad_json(a), quad_json(b)], "base": ratvec_json(c.base().coords())})
}

/// The configuration schema, curves in canonical order.
pub fn configuration_json(d: &Configuration) -> Value {
    let d = d.canonical_order();
    let (m1, m2) = d.ambient().conductors();
    json!({
        "d": d.ambient().tag().d(),
        "conductors": [m1, m2],
        "curves": d.curves().iter().map(curve_json).collect::<Vec<_>>(),
    })
}

/// Pretty-printed, newline-terminated; stable under load and re-export.
pub fn configuration_to_string(d: &Configuration) -> String {
    let mut s = serde_json::to_string_pretty(&configuration_json(d)).expect("serializable");
    s.push('\n');
    s
}

pub fn configuration_from_json(v: &Value) -> Result<Configuration> {
    let obj = v.as_object().ok_or_else(|| parse_err("configuration must be an object"))?;
    let d = u64_from_json(obj.get("d").ok_or_else(|| parse_err("missing \"d\""))?, "d")?;
    let d = u32::try_from(d).map_err(|_| parse_err("d out of range"))?;
    let tag = FieldTag::new(d).map_err(|e| parse_err(e.to_string()))?;
    let (m1, m2) = match obj.get("conductors") {
        None => (1, 1),
        Some(Value::Array(c)) if c.len() == 2 => (u64_from_json(&c[0], "conductor")?, u64_from_json(&c[1], "conductor")?),
        Some(_) => return Err(parse_err("\"conductors\" must be a pair")),
    };
    let ambient = Ambient::new(tag, m1, m2).map_err(|e| parse_err(e.to_string()))?;
    let curves = obj
        .get("curves")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing \"curves\" array"))?;
    let mut out = Vec::with_capacity(curves.len());
    for (i, c) in curves.iter().enumerate() {
        let ctx = |e: Error| parse_err(format!("curve {i}: {e}"));
        let slope = c
            .get("slope")
            .and_then(Value::as_array)
            .filter(|s| s.len() == 2)
            .ok_or_else(|| parse_err(format!("curve {i}: \"slope\" must be a pair")))?;
        let a = quad_from_json(&slope[0], Some(tag)).map_err(ctx)?;
        let b = quad_from_json(&slope[1], Some(tag)).map_err(ctx)?;
        let base = match c.get("base") {
            None => RatVec::zeros(4),
            Some(Value::Array(bs)) if bs.len() == 4 => {
                let fr = bs
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => parse_fraction(s),
                        other => int_from_json(other).map(|n| (n, Int::one())),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(ctx)?;
                RatVec::from_fractions(&fr).map_err(ctx)?
            }
            Some(_) => return Err(parse_err(format!("curve {i}: \"base\" needs 4 rationals"))),
        };
        out.push(CurveOnSquare::new(ambient, (a, b), &base).map_err(ctx)?);
    }
    Configuration::new(ambient, out).map_err(|e| parse_err(e.to_string()))
}

pub fn parse_configuration(s: &str) -> Result<Configuration> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    configuration_from_json(&v)
}

pub fn report_json(r: &SingularLocusReport) -> Value {
    json!({
        "components": r.components,
        "singular_points": r.singular_count,
        "incidence_sum": r.incidence_sum,
        "proportional": r.proportional,
        "vacuous": r.vacuous,
        "intersecting": r.intersecting,
        "e": r.singular_count,
        "volume_units": r.singular_count,
        "points": r.points.iter().map(|p| json!({
            "point": ratvec_json(p.point.coords()),
            "incidence": p.incidence(),
            "curves": p.curves,
        })).collect::<Vec<_>>(),
    })
}

fn opt_int_json(v: &Option<Int>) -> Value {
    v.as_ref().map(int_json).unwrap_or(Value::Null)
}

pub fn record_json(r: &SeriesTermRecord) -> Value {
    json!({
        "n": r.n,
        "degree_step": int_json(&r.degree_step),
        "degree": int_json(&r.degree_total),
        "e": int_json(&r.e),
        "volume_units": int_json(&r.volume_units),
        "h": int_json(&r.h),
        "conductor": r.conductor,
        "formula_e": opt_int_json(&r.formula_e),
        "formula_h": opt_int_json(&r.formula_h),
        "mismatch": r.mismatch(),
    })
}

pub const SERIES_COLUMNS: [&str; 8] = [
    "n",
    "degree",
    "e",
    "volume_units",
    "h",
    "conductor",
    "formula_h",
    "mismatch",
];

fn record_cells(r: &SeriesTermRecord) -> [String; 8] {
    [
        r.n.to_string(),
        r.degree_total.to_string(),
        r.e.to_string(),
        r.volume_units.to_string(),
        r.h.to_string(),
        r.conductor.to_string(),
        r.formula_h.as_ref().map(Int::to_string).unwrap_or_default(),
        r.mismatch().to_string(),
    ]
}

/// Rows as CSV with a header line.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn table_markdown(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for r in rows {
        s.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    s
}

/// The records a series prints: its terms, or the base record if there are none.
pub fn series_rows(s: &Series) -> Vec<&SeriesTermRecord> {
    if s.terms.is_empty() {
        vec![&s.base]
    } else {
        s.terms.iter().collect()
    }
}

pub fn series_csv(s: &Series) -> String {
    let rows: Vec<Vec<String>> = series_rows(s).into_iter().map(|r| record_cells(r).to_vec()).collect();
    table_csv(&SERIES_COLUMNS, &rows)
}

pub fn series_markdown(s: &Series) -> String {
    let rows: Vec<Vec<String>> = series_rows(s).into_iter().map(|r| record_cells(r).to_vec()).collect();
    table_markdown(&SERIES_COLUMNS, &rows)
}

pub fn series_json(s: &Series) -> Value {
    json!({
        "base": record_json(&s.base),
        "terms": s.terms.iter().map(record_json).collect::<Vec<_>>(),
    })
}

/// Where a series starts.
#[derive(Clone, Debug)]
pub enum RecipeBase {
    Named(String),
    Inline(Configuration),
}

#[derive(Clone, Debug)]
pub enum RecipeSteps {
    Gammas(Vec<QuadInt>),
    Ks(Vec<u64>),
}

#[derive(Clone, Debug)]
pub struct SeriesRecipe {
    pub base: RecipeBase,
    pub steps: RecipeSteps,
}

impl RecipeBase {
    pub fn configuration(&self) -> Result<Configuration> {
        match self {
            RecipeBase::Named(k) => Ok(catalog::lookup(k)?.configuration),
            RecipeBase::Inline(c) => Ok(c.clone()),
        }
    }
}

/// `{"base": key | configuration, "gammas": [...]}` or `{"base"?: ..., "ks": [...]}`.
pub fn parse_recipe(v: &Value) -> Result<SeriesRecipe> {
    let obj: &Map<String, Value> = v.as_object().ok_or_else(|| parse_err("recipe must be an object"))?;
    let base = match obj.get("base") {
        None => RecipeBase::Named("hirzebruch".into()),
        Some(Value::String(k)) => {
            catalog::lookup(k)?;
            RecipeBase::Named(k.clone())
        }
        Some(c @ Value::Object(_)) => RecipeBase::Inline(configuration_from_json(c)?),
        Some(_) => return Err(parse_err("\"base\" must be a catalog key or a configuration")),
    };
    let tag = base.configuration()?.ambient().tag();
    let steps = match (obj.get("gammas"), obj.get("ks")) {
        (Some(Value::Array(g)), None) => RecipeSteps::Gammas(
            g.iter().map(|x| quad_from_json(x, Some(tag))).collect::<Result<_>>()?,
        ),
        (None, Some(Value::Array(k))) => RecipeSteps::Ks(
            k.iter().map(|x| u64_from_json(x, "k")).collect::<Result<_>>()?,
        ),
        _ => return Err(parse_err("recipe needs exactly one of \"gammas\" or \"ks\" (arrays)")),
    };
    Ok(SeriesRecipe { base, steps })
}

pub fn run_recipe(r: &SeriesRecipe) -> Result<Series> {
    let named = match &r.base {
        RecipeBase::Named(k) => Some(k.as_str()),
        RecipeBase::Inline(_) => None,
    };
    match (&r.steps, named) {
        (RecipeSteps::Gammas(g), Some("hirzebruch")) => isogeny::series_birational(g),
        (RecipeSteps::Gammas(g), Some("d14")) => isogeny::series_four_cusp(g),
        (RecipeSteps::Gammas(g), _) => isogeny::series_gammas(&r.base.configuration()?, g),
        (RecipeSteps::Ks(k), n) => {
            let formula = match n {
                Some("hirzebruch") => NonBirationalFormula::Hirzebruch,
                Some("d14") => NonBirationalFormula::D14,
                _ => NonBirationalFormula::None,
            };
            isogeny::series_nonbirational(k, &r.base.configuration()?, formula)
        }
    }
}

/// `e x 8 pi^2 / 3`, optionally followed by a decimal approximation.
pub fn volume_string(e: &Int, float: bool) -> String {
    let mut s = format!("{e} \u{d7} 8\u{3c0}\u{b2}/3");
    if float {
        let v = e.to_f64().unwrap_or(f64::INFINITY) * 8.0 * std::f64::consts::PI.powi(2) / 3.0;
        s.push_str(&format!(" \u{2248} {v:.6}"));
    }
    s
}
