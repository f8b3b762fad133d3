//! Command-line front end. Output is JSON with sorted keys unless
//! `--output text` is given; `∞` is written as the string `"inf"`.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::correspondence::{
    self, equivariant_by_name, form_by_name, h_from_form, lift_form_to_zeta, m_inverse, m_transform,
    random_fundamental_points, zeta_by_name,
};
use crate::eisenstein::{self, QSeriesConfig};
use crate::gamma::CongruenceGroup;
use crate::lattice::{Extended, ModularPoint, C64};
use crate::suite::{self, CheckResult, SuiteConfig, SuiteName};
use crate::weierstrass::{self, EvalConfig};
use crate::zeta_algebra;

/// Number of sample evaluations printed by `correspond`.
const CORRESPOND_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Text,
    Latex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    ToEquivariant,
    ToZeta,
    ToForm,
}

/// Global numeric settings.
#[derive(Debug, Clone, Parser)]
pub struct CliConfig {
    /// Terms kept in every q-series.
    #[arg(long = "terms", global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub qseries_terms: u64,
    /// Truncation radius of the direct lattice sums.
    #[arg(long = "radius", global = true, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub direct_sum_radius: u64,
    /// Gauss–Legendre nodes for period integrals.
    #[arg(long = "quad-points", global = true, default_value_t = 128, value_parser = clap::value_parser!(u64).range(1..))]
    pub quad_points: u64,
    /// Tolerance of the sampled equivariance and weight suites.
    #[arg(long, global = true, default_value_t = 1e-7, value_parser = parse_tol)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

impl CliConfig {
    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            qseries: QSeriesConfig::new(self.qseries_terms as usize),
            direct_sum_radius: self.direct_sum_radius as usize,
            quad_points: self.quad_points as usize,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ellzeta", version, about = "Elliptic zeta functions, weight-2 forms and equivariant functions")]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a named function at τ (and z).
    Eval {
        /// wp, wp_prime, zeta, eta1, eta2, g2, g3, G2, E2, delta, f_n:<n>, h_n:<n>
        function: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Option<C64>,
    },
    /// Quasi-periods H(1), H(τ) of a named elliptic zeta function.
    Quasiperiods {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: C64,
        /// zeta, identity or Z_n:<n>
        #[arg(long, default_value = "zeta")]
        zeta: String,
    },
    /// The exact coefficient table Φₙ, Ψₙ, fₙ.
    Table {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(i64).range(1..=200))]
        max_n: i64,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Apply one edge of the form / equivariant / zeta triangle.
    Correspond {
        #[arg(long, conflicts_with = "equivariant", required_unless_present = "equivariant")]
        form: Option<String>,
        #[arg(long)]
        equivariant: Option<String>,
        #[arg(long, value_enum)]
        direction: Direction,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: SuiteName,
        #[arg(long, default_value = "SL2Z")]
        group: CongruenceGroup,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i` and `-i`; exponents are allowed.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let err = || format!("cannot parse complex number {s:?}; expected a+bi");
    let t = s.trim();
    if t.is_empty() || t.contains(char::is_whitespace) {
        return Err(err());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| err());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| err())?
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| err())?,
    };
    if !(re.is_finite() && im.is_finite()) {
        return Err(err());
    }
    Ok(C64::new(re, im))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid tolerance {s:?}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must lie in (0, 1), got {v}"))
    }
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(if x.is_nan() { "nan".into() } else { "inf".into() }))
}

fn complex(z: C64) -> Value {
    json!({ "re": number(z.re), "im": number(z.im) })
}

fn extended(x: Extended) -> Value {
    match x {
        Extended::Finite(z) => complex(z),
        Extended::Infinity => Value::String("inf".into()),
    }
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn modular_point(tau: C64) -> Result<ModularPoint, UsageError> {
    Ok(ModularPoint::new(tau)?)
}

fn eval_function(name: &str, tau: ModularPoint, z: Option<C64>, cfg: &EvalConfig) -> Result<Extended, UsageError> {
    let q = cfg.qseries;
    let need_z = || z.ok_or_else(|| UsageError(format!("{name} needs --z")));
    let fin = Extended::Finite;
    Ok(match name {
        "wp" => weierstrass::wp(tau, need_z()?, cfg),
        "wp_prime" => weierstrass::wp_prime(tau, need_z()?, cfg),
        "zeta" => weierstrass::zeta_w(tau, need_z()?, cfg),
        "eta1" => fin(weierstrass::eta_pair(tau, cfg).eta1),
        "eta2" => fin(weierstrass::eta_pair(tau, cfg).eta2),
        "g2" => fin(eisenstein::g2_g3(tau, q).0),
        "g3" => fin(eisenstein::g2_g3(tau, q).1),
        "G2" => fin(eisenstein::g_big2(tau, q)),
        "E2" => fin(eisenstein::e2(tau, q)),
        "delta" => fin(eisenstein::delta(tau, q)),
        _ if name.starts_with("f_n:") => form_by_name(name, cfg)?.eval(tau),
        _ if name.starts_with("h_n:") => equivariant_by_name(name, cfg)?.eval(tau),
        _ => return Err(UsageError(format!("unknown function {name:?}"))),
    })
}

fn table_output(max_n: i64, format: TableFormat) -> String {
    let rows = zeta_algebra::table(max_n);
    match format {
        TableFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "phi": r.phi.to_text(),
                        "psi": r.psi.to_text(),
                        "f": r.f.as_ref().map(|f| Value::String(f.to_text())).unwrap_or(Value::Null),
                        "weight_phi": r.weight_phi,
                        "weight_psi": r.weight_psi,
                    })
                })
                .collect();
            pretty(&json!({ "max_n": max_n, "rows": rows }))
        }
        TableFormat::Text => {
            let mut out = String::new();
            for r in &rows {
                let f = r.f.as_ref().map(|f| f.to_text()).unwrap_or_else(|| "-".into());
                out.push_str(&format!(
                    "n={}  Phi={}  Psi={}  f={}\n",
                    r.n,
                    r.phi.to_text(),
                    r.psi.to_text(),
                    f
                ));
            }
            out
        }
        TableFormat::Latex => {
            let mut out = String::from("\\begin{tabular}{c|c|c|c}\nn & $\\Phi_n$ & $\\Psi_n$ & $f_n$ \\\\\n\\hline\n");
            for r in &rows {
                let f = r.f.as_ref().map(|f| f.to_latex()).unwrap_or_else(|| "-".into());
                out.push_str(&format!(
                    "{} & ${}$ & ${}$ & ${}$ \\\\\n",
                    r.n,
                    r.phi.to_latex(),
                    r.psi.to_latex(),
                    f
                ));
            }
            out.push_str("\\end{tabular}\n");
            out
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn sample_points(seed: u64) -> Vec<ModularPoint> {
    random_fundamental_points(CORRESPOND_SAMPLES, seed)
}

fn samples_json(points: &[ModularPoint], eval: impl Fn(ModularPoint) -> Value) -> Value {
    Value::Array(
        points
            .iter()
            .map(|&t| json!({ "tau": complex(t.tau()), "value": eval(t) }))
            .collect(),
    )
}

fn correspond(
    form: Option<&str>,
    equivariant: Option<&str>,
    direction: Direction,
    cfg: &EvalConfig,
    seed: u64,
) -> Result<Value, UsageError> {
    let points = sample_points(seed);
    match (form, equivariant, direction) {
        (Some(name), None, Direction::ToEquivariant) => {
            let f = form_by_name(name, cfg)?;
            let (map, h) = if f.weight() == 2 {
                ("M", m_transform(&f, cfg)?)
            } else {
                ("tau + k f/f'", h_from_form(&f)?)
            };
            Ok(json!({
                "input": { "kind": "form", "name": name, "weight": f.weight(), "group": f.group().to_string() },
                "direction": "to-equivariant",
                "map": map,
                "output": { "kind": "equivariant", "name": h.name(), "group": h.group().to_string() },
                "samples": samples_json(&points, |t| extended(h.eval(t))),
            }))
        }
        (Some(name), None, Direction::ToZeta) => {
            let f = form_by_name(name, cfg)?;
            let z = lift_form_to_zeta(&f)?;
            Ok(json!({
                "input": { "kind": "form", "name": name, "weight": f.weight(), "group": f.group().to_string() },
                "direction": "to-zeta",
                "map": "f(w2/w1)/w1^2 z + zeta(z)",
                "output": { "kind": "zeta", "name": z.name, "weight": z.weight_k, "group": z.group.to_string() },
                "samples": samples_json(&points, |t| {
                    let (h1, ht) = correspondence::quasi_periods(&z, t, cfg);
                    json!({ "phi": extended((z.phi)(t)), "psi": extended((z.psi)(t)), "H1": extended(h1), "Htau": extended(ht) })
                }),
            }))
        }
        (None, Some(name), Direction::ToForm) => {
            let h = equivariant_by_name(name, cfg)?;
            let f = m_inverse(&h, cfg)?;
            Ok(json!({
                "input": { "kind": "equivariant", "name": name, "group": h.group().to_string() },
                "direction": "to-form",
                "map": "M^-1",
                "output": { "kind": "form", "name": f.name(), "weight": f.weight(), "group": f.group().to_string() },
                "samples": samples_json(&points, |t| extended(f.eval(t))),
            }))
        }
        _ => Err(UsageError(
            "use --form with to-equivariant or to-zeta, or --equivariant with to-form".into(),
        )),
    }
}

fn check_json(c: &CheckResult) -> Value {
    json!({
        "id": c.id,
        "name": c.name,
        "passed": c.passed,
        "measured": number(c.measured),
        "tolerance": number(c.tolerance),
        "detail": c.detail,
    })
}

enum Outcome {
    Done(String),
    Failed(String),
}

fn dispatch(cli: Cli) -> Result<Outcome, UsageError> {
    let cfg = cli.config.eval_config();
    let text = cli.config.output == OutputFormat::Text;
    let seed = cli.config.seed;
    match cli.command {
        Command::Eval { function, tau, z } => {
            let point = modular_point(tau)?;
            let value = eval_function(&function, point, z, &cfg)?;
            if text {
                return Ok(Outcome::Done(format!("{value}\n")));
            }
            let mut m = Map::new();
            m.insert("fn".into(), Value::String(function));
            m.insert("tau".into(), complex(tau));
            if let Some(z) = z {
                m.insert("z".into(), complex(z));
            }
            m.insert("value".into(), extended(value));
            Ok(Outcome::Done(pretty(&Value::Object(m))))
        }
        Command::Quasiperiods { tau, zeta } => {
            let point = modular_point(tau)?;
            let z = zeta_by_name(&zeta, &cfg)?;
            let (h1, ht) = correspondence::quasi_periods(&z, point, &cfg);
            let defect = weierstrass::legendre_defect(point, &cfg);
            if text {
                return Ok(Outcome::Done(format!(
                    "H1={h1}\nHtau={ht}\nlegendre_defect={}\n",
                    Extended::Finite(defect)
                )));
            }
            Ok(Outcome::Done(pretty(&json!({
                "zeta": zeta,
                "tau": complex(tau),
                "H1": extended(h1),
                "Htau": extended(ht),
                "legendre_defect": complex(defect),
            }))))
        }
        Command::Table { max_n, format } => Ok(Outcome::Done(table_output(max_n, format))),
        Command::Correspond {
            form,
            equivariant,
            direction,
        } => {
            let v = correspond(form.as_deref(), equivariant.as_deref(), direction, &cfg, seed)?;
            Ok(Outcome::Done(pretty(&v)))
        }
        Command::Verify { suite, group, samples } => {
            let suite_cfg = SuiteConfig { eval: cfg, seed };
            let checks = suite::run_suite(suite, group, samples as usize, cli.config.tol, &suite_cfg);
            let passed = checks.iter().all(|c| c.passed);
            let body = if text {
                let mut s: String = checks.iter().map(|c| format!("{c}\n")).collect();
                s.push_str(&format!(
                    "{} of {} checks passed\n",
                    checks.iter().filter(|c| c.passed).count(),
                    checks.len()
                ));
                s
            } else {
                pretty(&json!({
                    "suite": suite.to_string(),
                    "group": group.to_string(),
                    "samples": samples,
                    "passed": passed,
                    "checks": checks.iter().map(check_json).collect::<Vec<_>>(),
                }))
            };
            Ok(if passed { Outcome::Done(body) } else { Outcome::Failed(body) })
        }
    }
}

/// Runs the CLI, writing to the given streams; returns the exit code
/// (0 success, 1 verification failure, 2 usage error).
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli) {
        Ok(Outcome::Done(s)) => {
            let _ = out.write_all(s.as_bytes());
            0
        }
        Ok(Outcome::Failed(s)) => {
            let _ = out.write_all(s.as_bytes());
            1
        }
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
