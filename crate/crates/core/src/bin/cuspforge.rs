use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cuspforge::catalog;
use cuspforge::format::{self, SeriesRecipe, RecipeBase, RecipeSteps};
use cuspforge::geometry::{singular_locus, Configuration, SingularLocusReport};
use cuspforge::isogeny::{self, DiagonalIsogeny};
use cuspforge::{Error, Int, QuadInt};

const EXIT_INPUT: u8 = 1;
const EXIT_NOT_PROPORTIONAL: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "cuspforge", version, about = "Proportional elliptic configurations, isogeny pull-backs and cusp counts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesKind {
    Birational,
    Fourcusp,
    Nonbirational,
}

#[derive(Subcommand)]
enum Cmd {
    /// Singular locus and proportionality of a configuration file or catalog key.
    Check {
        input: String,
        #[arg(long, value_enum, default_value = "markdown")]
        format: OutputFormat,
        /// Also print the volume as a decimal.
        #[arg(long)]
        float: bool,
    },
    /// Pull a configuration back along diag(alpha, beta).
    Pullback {
        input: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value_t = 1)]
        m1: u64,
        #[arg(long, default_value_t = 1)]
        m2: u64,
        /// Print every component.
        #[arg(long)]
        list: bool,
        #[arg(long, value_enum, default_value = "markdown")]
        format: OutputFormat,
        #[arg(long)]
        float: bool,
    },
    /// Tabulate an isogeny series.
    Series {
        #[arg(long, value_enum)]
        kind: Option<SeriesKind>,
        /// Comma-separated QuadInt literals, e.g. "1+1w,2+w".
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gammas: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        ks: Vec<u64>,
        /// Repeat the step list cyclically up to this many terms.
        #[arg(long)]
        terms: Option<usize>,
        /// Catalog key or configuration file for the base.
        #[arg(long)]
        base: Option<String>,
        /// JSON recipe file; replaces --kind/--gammas/--ks/--base.
        #[arg(long)]
        recipe: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "markdown")]
        format: OutputFormat,
    },
    /// Volumes m * 8 pi^2/3 from E x E_m for m = 1..max.
    Allvolumes {
        #[arg(long, default_value_t = 10)]
        max: u64,
        #[arg(long, value_enum, default_value = "markdown")]
        format: OutputFormat,
        #[arg(long)]
        float: bool,
    },
    /// Write a catalog configuration in the configuration schema.
    Export {
        key: String,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) | Error::DegenerateLattice(_) | Error::DegenerateIntersection(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

type CmdResult = std::result::Result<u8, Failure>;

/// Configurations are always handled in canonical curve order, so reports do
/// not depend on how the input listed its curves.
fn load(input: &str) -> std::result::Result<Configuration, Failure> {
    Ok(load_raw(input)?.canonical_order())
}

fn load_raw(input: &str) -> std::result::Result<Configuration, Failure> {
    let path = Path::new(input);
    if path.exists() {
        let s = std::fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{input}: {e}")))?;
        return Ok(format::parse_configuration(&s)?);
    }
    if input.ends_with(".json") {
        return Err(fail(EXIT_INPUT, format!("{input}: no such file")));
    }
    Ok(catalog::lookup(input)?.configuration)
}

fn write_stdout(s: &str) {
    let mut o = io::stdout().lock();
    if let Err(e) = o.write_all(s.as_bytes()).and_then(|_| o.flush()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(EXIT_INPUT as i32);
    }
}

macro_rules! out {
    ($($t:tt)*) => { write_stdout(&format!($($t)*)) };
}

fn print_json(v: &Value) {
    out!("{}\n", serde_json::to_string_pretty(v).expect("serializable"));
}

fn report_table(r: &SingularLocusReport, float: bool) -> (Vec<&'static str>, Vec<String>) {
    let e = Int::from(r.singular_count);
    let mut header = vec![
        "components",
        "singular_points",
        "incidence_sum",
        "proportional",
        "vacuous",
        "intersecting",
        "e",
        "volume",
    ];
    let mut row = vec![
        r.components.to_string(),
        r.singular_count.to_string(),
        r.incidence_sum.to_string(),
        r.proportional.to_string(),
        r.vacuous.to_string(),
        r.intersecting.to_string(),
        e.to_string(),
        format::volume_string(&e, float),
    ];
    if float {
        header.push("volume_float");
        row.push(format!("{:.6}", r.singular_count as f64 * 8.0 * std::f64::consts::PI.powi(2) / 3.0));
    }
    (header, row)
}

fn emit_table(fmt: OutputFormat, header: &[&str], rows: &[Vec<String>]) {
    match fmt {
        OutputFormat::Csv => out!("{}", format::table_csv(header, rows)),
        _ => out!("{}", format::table_markdown(header, rows)),
    }
}

fn check_exit(r: &SingularLocusReport) -> u8 {
    if r.is_ball_quotient() {
        0
    } else {
        EXIT_NOT_PROPORTIONAL
    }
}

fn cmd_check(input: &str, fmt: OutputFormat, float: bool) -> CmdResult {
    let d = load(input)?;
    let r = singular_locus(&d)?;
    match fmt {
        OutputFormat::Json => {
            let mut v = format::report_json(&r);
            v["volume"] = json!(format::volume_string(&Int::from(r.singular_count), float));
            print_json(&v);
        }
        _ => {
            let (h, row) = report_table(&r, float);
            emit_table(fmt, &h, &[row]);
            if fmt == OutputFormat::Markdown && !r.points.is_empty() {
                let rows: Vec<Vec<String>> = r
                    .points
                    .iter()
                    .map(|p| vec![format!("{:?}", p.point.coords()), p.incidence().to_string()])
                    .collect();
                out!("\n");
                emit_table(fmt, &["point", "incidence"], &rows);
            }
        }
    }
    Ok(check_exit(&r))
}

#[allow(clippy::too_many_arguments)]
fn cmd_pullback(
    input: &str,
    alpha: &str,
    beta: &str,
    m1: u64,
    m2: u64,
    list: bool,
    fmt: OutputFormat,
    float: bool,
) -> CmdResult {
    let d = load(input)?;
    let tag = d.ambient().tag();
    let mu = DiagonalIsogeny::new(QuadInt::parse(tag, alpha)?, QuadInt::parse(tag, beta)?, m1, m2)?;
    let before = singular_locus(&d)?;
    if !before.proportional {
        eprintln!("error: the input configuration is not proportional");
        return Ok(EXIT_NOT_PROPORTIONAL);
    }
    let mut per_curve = Vec::new();
    let mut mismatch = false;
    for (i, f) in d.curves().iter().enumerate() {
        let dec = mu.pullback_curve(f)?;
        if let Some(cf) = &dec.closed_form {
            mismatch |= cf.count != dec.count;
        }
        per_curve.push((i, f.clone(), dec));
    }
    let (pulled, _, after) = mu.pullback_verified(&d)?;
    let e = Int::from(after.singular_count);
    match fmt {
        OutputFormat::Json => {
            let curves: Vec<Value> = per_curve
                .iter()
                .map(|(i, f, dec)| {
                    let (a, b) = f.slope();
                    json!({
                        "curve": i,
                        "slope": [format::quad_json(a), format::quad_json(b)],
                        "count": format::int_json(&dec.count),
                        "closed_form": dec.closed_form.as_ref().map(|c| format::int_json(&c.count)),
                        "case": dec.closed_form.as_ref().map(|c| c.case.name()),
                    })
                })
                .collect();
            let mut v = json!({
                "degree": format::int_json(&mu.degree()),
                "curves": curves,
                "h": pulled.len(),
                "e": format::int_json(&e),
                "volume_units": format::int_json(&e),
                "volume": format::volume_string(&e, float),
                "proportional": after.proportional,
                "closed_form_mismatch": mismatch,
            });
            if list {
                v["components"] = format::configuration_json(&pulled);
            }
            print_json(&v);
        }
        _ => {
            let header = ["curve", "slope", "count", "closed_form", "case"];
            let rows: Vec<Vec<String>> = per_curve
                .iter()
                .map(|(i, f, dec)| {
                    let (a, b) = f.slope();
                    vec![
                        i.to_string(),
                        format!("({a}, {b})"),
                        dec.count.to_string(),
                        dec.closed_form.as_ref().map(|c| c.count.to_string()).unwrap_or_default(),
                        dec.closed_form.as_ref().map(|c| c.case.name().to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            emit_table(fmt, &header, &rows);
            out!("\n");
            let header = ["degree", "h", "e", "volume", "proportional"];
            let row = vec![
                mu.degree().to_string(),
                pulled.len().to_string(),
                e.to_string(),
                format::volume_string(&e, float),
                after.proportional.to_string(),
            ];
            emit_table(fmt, &header, &[row]);
            if list {
                out!("\n");
                let rows: Vec<Vec<String>> = pulled
                    .canonical_order()
                    .curves()
                    .iter()
                    .map(|c| {
                        let (a, b) = c.slope();
                        vec![format!("({a}, {b})"), format!("{:?}", c.base().coords())]
                    })
                    .collect();
                emit_table(fmt, &["slope", "base"], &rows);
            }
        }
    }
    if mismatch {
        eprintln!("error: closed-form component count disagrees with the lattice index");
        return Ok(EXIT_INTERNAL);
    }
    Ok(0)
}

fn cycle<T: Clone>(v: Vec<T>, terms: Option<usize>) -> std::result::Result<Vec<T>, Failure> {
    match terms {
        None => Ok(v),
        Some(n) if v.is_empty() && n > 0 => Err(fail(EXIT_INPUT, "--terms needs a nonempty step list")),
        Some(n) => Ok(v.into_iter().cycle().take(n).collect()),
    }
}

fn base_spec(base: Option<&str>, default: &str) -> std::result::Result<RecipeBase, Failure> {
    let key = base.unwrap_or(default);
    if catalog::KEYS.contains(&key) {
        return Ok(RecipeBase::Named(key.to_string()));
    }
    Ok(RecipeBase::Inline(load(key)?))
}

#[allow(clippy::too_many_arguments)]
fn cmd_series(
    kind: Option<SeriesKind>,
    gammas: Vec<String>,
    ks: Vec<u64>,
    terms: Option<usize>,
    base: Option<String>,
    recipe: Option<PathBuf>,
    fmt: OutputFormat,
) -> CmdResult {
    let recipe = match recipe {
        Some(p) => {
            let s = std::fs::read_to_string(&p).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            let v: Value = serde_json::from_str(&s).map_err(|e| fail(EXIT_INPUT, format!("invalid JSON: {e}")))?;
            let mut r = format::parse_recipe(&v)?;
            r.steps = match r.steps {
                RecipeSteps::Gammas(g) => RecipeSteps::Gammas(cycle(g, terms)?),
                RecipeSteps::Ks(k) => RecipeSteps::Ks(cycle(k, terms)?),
            };
            r
        }
        None => {
            let kind = kind.ok_or_else(|| fail(EXIT_INPUT, "either --kind or --recipe is required"))?;
            let (base, steps) = match kind {
                SeriesKind::Birational | SeriesKind::Fourcusp => {
                    if !ks.is_empty() {
                        return Err(fail(EXIT_INPUT, "--ks applies to the nonbirational series"));
                    }
                    let default = if kind == SeriesKind::Birational { "hirzebruch" } else { "d14" };
                    let base = base_spec(base.as_deref(), default)?;
                    let tag = base.configuration()?.ambient().tag();
                    let g = gammas
                        .iter()
                        .map(|s| QuadInt::parse(tag, s))
                        .collect::<cuspforge::Result<Vec<_>>>()?;
                    (base, RecipeSteps::Gammas(cycle(g, terms)?))
                }
                SeriesKind::Nonbirational => {
                    if !gammas.is_empty() {
                        return Err(fail(EXIT_INPUT, "--gammas applies to the birational series"));
                    }
                    (base_spec(base.as_deref(), "hirzebruch")?, RecipeSteps::Ks(cycle(ks, terms)?))
                }
            };
            SeriesRecipe { base, steps }
        }
    };
    let s = format::run_recipe(&recipe)?;
    match fmt {
        OutputFormat::Json => print_json(&Value::Array(
            format::series_rows(&s).into_iter().map(format::record_json).collect(),
        )),
        OutputFormat::Csv => out!("{}", format::series_csv(&s)),
        OutputFormat::Markdown => out!("{}", format::series_markdown(&s)),
    }
    Ok(0)
}

fn cmd_allvolumes(max: u64, fmt: OutputFormat, float: bool) -> CmdResult {
    if max == 0 {
        return Err(fail(EXIT_INPUT, "--max must be at least 1"));
    }
    let recs = (1..=max)
        .map(isogeny::all_volumes_witness)
        .collect::<cuspforge::Result<Vec<_>>>()?;
    match fmt {
        OutputFormat::Json => print_json(&Value::Array(
            recs.iter()
                .map(|r| {
                    json!({
                        "m": r.m,
                        "degree": format::int_json(&r.degree),
                        "e": format::int_json(&r.e),
                        "volume_units": format::int_json(&r.e),
                        "h": format::int_json(&r.h),
                        "volume": format::volume_string(&r.e, float),
                    })
                })
                .collect(),
        )),
        _ => {
            let rows: Vec<Vec<String>> = recs
                .iter()
                .map(|r| {
                    vec![
                        r.m.to_string(),
                        r.degree.to_string(),
                        r.e.to_string(),
                        r.e.to_string(),
                        r.h.to_string(),
                        format::volume_string(&r.e, float),
                    ]
                })
                .collect();
            emit_table(fmt, &["m", "degree", "e", "volume_units", "h", "volume"], &rows);
        }
    }
    Ok(0)
}

fn cmd_export(key: &str, fmt: OutputFormat, output: Option<PathBuf>) -> CmdResult {
    if fmt != OutputFormat::Json {
        return Err(fail(EXIT_INPUT, "export supports --format json only"));
    }
    let nc = catalog::lookup(key)?;
    let s = format::configuration_to_string(&nc.configuration);
    match output {
        Some(p) => std::fs::write(&p, s).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?,
        None => out!("{s}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Check { input, format, float } => cmd_check(&input, format, float),
        Cmd::Pullback {
            input,
            alpha,
            beta,
            m1,
            m2,
            list,
            format,
            float,
        } => cmd_pullback(&input, &alpha, &beta, m1, m2, list, format, float),
        Cmd::Series {
            kind,
            gammas,
            ks,
            terms,
            base,
            recipe,
            format,
        } => cmd_series(kind, gammas, ks, terms, base, recipe, format),
        Cmd::Allvolumes { max, format, float } => cmd_allvolumes(max, format, float),
        Cmd::Export { key, format, output } => cmd_export(&key, format, output),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
