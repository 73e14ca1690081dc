//! `foxh`: evaluate, classify, expand, and cross-check H-function instances
//! from the command line, with JSON output suitable for batch pipelines.
//!
//! Exit codes: 0 success, 1 domain/computation errors (a structured
//! `{"error": ...}` object is printed), 2 usage errors.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use foxh::gamma::{script_h_estimate, ContourSpec, Direction};
use foxh::oracle::{auto_vertical_abscissa, quadrature_eval};
use foxh::params::{analyze_pole_structure, classify_existence, HParams};
use foxh::reductions::corpus;
use foxh::series::{
    coeff_log_b, coeff_simple_b, evaluate, expand_near_infinity, expand_near_zero, pole_groups,
    verdict_json,
};

#[derive(Parser)]
#[command(name = "foxh", version, about = "Fox H-function evaluation by residue series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ParamsSource {
    /// Path to a parameter JSON file.
    #[arg(long, value_name = "PATH")]
    params: Option<std::path::PathBuf>,
    /// Inline parameter JSON.
    #[arg(long, value_name = "JSON")]
    params_json: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the function at one or more points by residue series.
    Eval {
        #[command(flatten)]
        source: ParamsSource,
        /// Comma-separated list: "re", "re+imj", or "[re,im]".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Report the existence verdict (and invariants) for an argument.
    Classify {
        #[command(flatten)]
        source: ParamsSource,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Interpret --z as |z| (a non-negative magnitude).
        #[arg(long)]
        abs: bool,
        /// Include pole-structure flags and the asymptotic estimate
        /// prefactors in the output.
        #[arg(long)]
        verbose: bool,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Emit the truncated series expansion as JSON.
    Expand {
        #[command(flatten)]
        source: ParamsSource,
        /// "zero", "infinity", or "auto" (by the sign of Delta).
        #[arg(long, default_value = "auto")]
        about: String,
        #[arg(long, default_value_t = 64)]
        max_shift: u32,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Cross-check by direct Mellin-Barnes quadrature on a vertical line.
    Oracle {
        #[command(flatten)]
        source: ParamsSource,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// "auto" or "vertical:SIGMA".
        #[arg(long, default_value = "auto")]
        contour: String,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run the reductions corpus and the degeneracy invariant.
    Selftest {},
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Domain(err)) => {
            let obj = serde_json::json!({
                "error": {"kind": err.kind(), "detail": err.to_string()}
            });
            println!("{}", render_json(&obj));
            ExitCode::from(1)
        }
    }
}

enum AppError {
    Usage(String),
    Domain(foxh::Error),
}

impl From<foxh::Error> for AppError {
    fn from(e: foxh::Error) -> Self {
        match e {
            foxh::Error::BadInput(m) => AppError::Usage(m),
            other => AppError::Domain(other),
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    match cli.command {
        Command::Eval {
            source,
            z,
            tolerance,
            format,
        } => {
            let params = load_params(&source)?;
            let zs = parse_z_list(&z)?;
            // Points evaluate concurrently; results keep the input order and
            // the first domain error aborts the invocation.
            let mut results = Vec::new();
            for report in foxh::series::evaluate_batch(&params, &zs, tolerance) {
                results.push(report?);
            }
            match format.as_str() {
                "json" => {
                    let vals: Vec<serde_json::Value> =
                        results.iter().map(|r| r.to_json()).collect();
                    print_single_or_array(vals);
                }
                "table" => {
                    println!(
                        "{:>24} {:>24} {:>24} {:>12} {:>8}",
                        "z", "value_re", "value_im", "abs_err", "terms"
                    );
                    for (zv, r) in zs.iter().zip(&results) {
                        println!(
                            "{:>24} {:>24} {:>24} {:>12.3e} {:>8}",
                            fmt_c(*zv),
                            fmt_f(r.value.re),
                            fmt_f(r.value.im),
                            r.abs_error_estimate,
                            r.terms_summed
                        );
                    }
                }
                other => return Err(AppError::Usage(format!("unknown format {other:?}"))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify {
            source,
            z,
            abs,
            verbose,
            format,
        } => {
            let params = load_params(&source)?;
            let zs = parse_z_list(&z)?;
            let mut out = Vec::new();
            for &zv in &zs {
                let zq = if abs {
                    Complex64::new(zv.norm(), 0.0)
                } else {
                    zv
                };
                let verdict = classify_existence(&params, zq, None);
                let inv = params.invariants();
                let mut obj = serde_json::json!({
                    "verdict": verdict_json(&verdict),
                    "invariants": {
                        "delta": inv.delta_cap,
                        "delta_small": inv.delta_small,
                        "mu": [inv.mu.re, inv.mu.im],
                        "a_star": inv.a_star,
                    },
                });
                if verbose {
                    let st = analyze_pole_structure(&params, 64);
                    let plus = script_h_estimate(&params, 0.0, Direction::PlusInfinity);
                    let minus = script_h_estimate(&params, 0.0, Direction::MinusInfinity);
                    obj["pole_structure"] = serde_json::json!({
                        "separation_ok": st.separation_ok,
                        "lower_all_simple": st.lower_all_simple,
                        "upper_all_simple": st.upper_all_simple,
                        "lower_certified": st.lower_certified,
                        "upper_certified": st.upper_certified,
                        "diagnostics": st.diagnostics,
                    });
                    obj["estimate_constants"] = serde_json::json!({
                        "sigma": 0.0,
                        "plus_prefactor": plus.prefactor,
                        "minus_prefactor": minus.prefactor,
                    });
                }
                out.push(obj);
            }
            match format.as_str() {
                "json" => print_single_or_array(out),
                "table" => {
                    for (zv, obj) in zs.iter().zip(&out) {
                        println!(
                            "z={} exists={} contour={} case={} boundary={}",
                            fmt_c(*zv),
                            obj["verdict"]["exists"],
                            obj["verdict"]["contour"],
                            obj["verdict"]["case"],
                            obj["verdict"]["boundary_case"],
                        );
                    }
                }
                other => return Err(AppError::Usage(format!("unknown format {other:?}"))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Expand {
            source,
            about,
            max_shift,
            format,
        } => {
            let params = load_params(&source)?;
            let expansion = match about.as_str() {
                "zero" => expand_near_zero(&params, max_shift)?,
                "infinity" => expand_near_infinity(&params, max_shift)?,
                "auto" => {
                    let inv = params.invariants();
                    if inv.delta_is_zero() || inv.delta_cap > 0.0 {
                        expand_near_zero(&params, max_shift)?
                    } else {
                        expand_near_infinity(&params, max_shift)?
                    }
                }
                other => {
                    return Err(AppError::Usage(format!(
                        "unknown expansion point {other:?} (zero|infinity|auto)"
                    )))
                }
            };
            match format.as_str() {
                "json" => println!("{}", render_json(&expansion.to_json())),
                "table" => {
                    println!(
                        "{:>24} {:>24} {:>24} {:>24} {:>4}",
                        "power_re", "power_im", "coeff_re", "coeff_im", "logk"
                    );
                    for t in &expansion.terms {
                        println!(
                            "{:>24} {:>24} {:>24} {:>24} {:>4}",
                            fmt_f(t.power.re),
                            fmt_f(t.power.im),
                            fmt_f(t.coefficient.re),
                            fmt_f(t.coefficient.im),
                            t.log_power
                        );
                    }
                }
                other => return Err(AppError::Usage(format!("unknown format {other:?}"))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            source,
            z,
            contour,
            format,
        } => {
            let params = load_params(&source)?;
            let zs = parse_z_list(&z)?;
            let sigma0 = match contour.as_str() {
                "auto" => auto_vertical_abscissa(&params)?,
                other => match other.strip_prefix("vertical:") {
                    Some(s) => s
                        .parse::<f64>()
                        .map_err(|_| AppError::Usage(format!("bad contour {other:?}")))?,
                    None => {
                        return Err(AppError::Usage(format!(
                            "unknown contour {other:?} (auto|vertical:SIGMA)"
                        )))
                    }
                },
            };
            let mut out = Vec::new();
            for &zv in &zs {
                let r = quadrature_eval(&params, zv, &ContourSpec::vertical(sigma0))?;
                out.push(r.to_json());
            }
            match format.as_str() {
                "json" => print_single_or_array(out),
                "table" => {
                    for (zv, obj) in zs.iter().zip(&out) {
                        println!(
                            "z={} value=[{}, {}] err={} evals={}",
                            fmt_c(*zv),
                            obj["value"][0],
                            obj["value"][1],
                            obj["abs_error_estimate"],
                            obj["evaluations"]
                        );
                    }
                }
                other => return Err(AppError::Usage(format!("unknown format {other:?}"))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest {} => selftest(),
    }
}

fn selftest() -> Result<ExitCode, AppError> {
    let mut passed = 0usize;
    let mut failed = 0usize;
    let mut check = |name: String, ok: bool| {
        if ok {
            passed += 1;
            println!("[PASS] {name}");
        } else {
            failed += 1;
            println!("[FAIL] {name}");
        }
    };
    for case in corpus() {
        for &(z, reference) in &case.reference_points {
            let closed = match case.closed_form(z) {
                Ok(v) => v,
                Err(e) => {
                    check(format!("{} closed form at {}", case.id, fmt_c(z)), false);
                    let _ = e;
                    continue;
                }
            };
            check(
                format!("{} closed form matches reference at {}", case.id, fmt_c(z)),
                (closed - reference).norm() <= 1e-10 * (1.0 + reference.norm()),
            );
            match evaluate(&case.params, z, 1e-12) {
                Ok(r) => check(
                    format!("{} series matches closed form at {}", case.id, fmt_c(z)),
                    (r.value - closed).norm() <= 1e-9 * (1.0 + closed.norm()),
                ),
                Err(e) => check(format!("{} series at {}: {e}", case.id, fmt_c(z)), false),
            }
        }
    }
    // Degeneracy invariant on a fixed simple-pole instance.
    let simple = HParams::from_json_str(
        r#"{"m":2,"n":0,"p":0,"q":2,"lower":[[0.0,0.0,1.0],[0.4,0.0,1.3]]}"#,
    )
    .map_err(AppError::from)?;
    for group in pole_groups(&simple, foxh::params::PoleFamily::LowerB, 8) {
        let (idx, shift) = group.indices[0];
        let ok = match (coeff_log_b(&simple, &group), coeff_simple_b(&simple, idx, shift)) {
            (Ok(lc), Ok(sc)) => {
                lc.len() == 1 && (lc[0] - sc).norm() <= 1e-12 * sc.norm().max(1e-300)
            }
            _ => false,
        };
        check(
            format!("degeneracy at pole {} shift {}", fmt_c(group.location), shift),
            ok,
        );
    }
    println!("selftest: {passed} passed, {failed} failed");
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn load_params(source: &ParamsSource) -> Result<HParams, AppError> {
    let text = match (&source.params, &source.params_json) {
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))?,
        (None, Some(json)) => json.clone(),
        _ => return Err(AppError::Usage("need exactly one of --params / --params-json".into())),
    };
    let params = HParams::from_json_str(&text)?;
    // FOXH_EXACT=0 disables rational pole arithmetic; any other value (or
    // unset) keeps the metadata active when present.
    if std::env::var("FOXH_EXACT").as_deref() == Ok("0") {
        Ok(params.without_exact())
    } else {
        Ok(params)
    }
}

/// Accepts "re", "re+imj" / "re-imj", bare "imj", or "[re,im]".
fn parse_complex(s: &str) -> Result<Complex64, AppError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(AppError::Usage("empty complex literal".into()));
    }
    if let Some(inner) = t.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| AppError::Usage(format!("unclosed bracket in {t:?}")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(AppError::Usage(format!("expected [re,im] in {t:?}")));
        }
        let re = parse_f64(parts[0])?;
        let im = parse_f64(parts[1])?;
        return Ok(Complex64::new(re, im));
    }
    if let Some(body) = t.strip_suffix(['j', 'J']) {
        // Split at the last +/- that is not an exponent sign or leading.
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        return match split {
            Some(i) => {
                let re = parse_f64(&body[..i])?;
                let im_str = &body[i..];
                let im = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    parse_f64(im_str)?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im = if body.is_empty() { 1.0 } else { parse_f64(body)? };
                Ok(Complex64::new(0.0, im))
            }
        };
    }
    Ok(Complex64::new(parse_f64(t)?, 0.0))
}

fn parse_f64(s: &str) -> Result<f64, AppError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| AppError::Usage(format!("bad number {s:?}")))
}

/// Splits a z list on commas that are not inside brackets.
fn parse_z_list(s: &str) -> Result<Vec<Complex64>, AppError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(parse_complex(&s[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(parse_complex(&s[start..])?);
    if out.is_empty() {
        return Err(AppError::Usage("empty z list".into()));
    }
    Ok(out)
}

fn print_single_or_array(mut items: Vec<serde_json::Value>) {
    if items.len() == 1 {
        println!("{}", render_json(&items.remove(0)));
    } else {
        println!("{}", render_json(&serde_json::Value::Array(items)));
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{}{}j", z.re, if z.im < 0.0 { "" } else { "+" }, z.im)
    }
}

/// JSON writer with 17-significant-digit float formatting (lossless double
/// round-trip) and BTreeMap key order, so identical invocations produce
/// byte-identical output.
fn render_json(value: &serde_json::Value) -> String {
    let mut out = Vec::new();
    write_value(&mut out, value).expect("in-memory write");
    String::from_utf8(out).expect("utf8 JSON")
}

fn write_value(out: &mut Vec<u8>, value: &serde_json::Value) -> std::io::Result<()> {
    match value {
        serde_json::Value::Null => write!(out, "null"),
        serde_json::Value::Bool(b) => write!(out, "{b}"),
        serde_json::Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}")
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}")
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                if f.is_finite() {
                    let f = if f == 0.0 { 0.0 } else { f }; // fold -0.0
                    write!(out, "{f:.16e}")
                } else {
                    write!(out, "null")
                }
            }
        }
        serde_json::Value::String(s) => write!(out, "{}", serde_json::Value::String(s.clone())),
        serde_json::Value::Array(items) => {
            write!(out, "[")?;
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write_value(out, item)?;
            }
            write!(out, "]")
        }
        serde_json::Value::Object(map) => {
            write!(out, "{{")?;
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write!(out, "{}:", serde_json::Value::String(k.clone()))?;
                write_value(out, v)?;
            }
            write!(out, "}}")
        }
    }
}
