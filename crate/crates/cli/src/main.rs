use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jetcalc::bicomplex::{
    chi, extended_top_form, rho, rho_integral, top_form, vertical_delta, IntegralForm, JetForm,
};
use jetcalc::covariant::{check_covariance_basis, compose};
use jetcalc::frontend::{
    parse, parse_integral, parse_signature, poly_to_json, print, print_integral, SessionConfig, Style, CONFIG_ENV,
};
use jetcalc::numeric::{gauss_bonnet_density, gauss_bonnet_sum, gauss_map_density, integrate, sphere_patch};
use jetcalc::random::{self, Shape};
use jetcalc::selftest::{self, CRITERIA};
use jetcalc::variational::{dbar, euler, Lagrangian};
use jetcalc::{Error, GradedPoly, Result, Signature, Q};

#[derive(Parser)]
#[command(name = "jetcalc", version, about = "Lagrangians on jet spaces of super-paths")]
struct Cli {
    /// Parameter signature `r:s`.
    #[arg(long, global = true)]
    sig: Option<String>,
    /// Fiber coordinates, e.g. `x:even,th:odd`.
    #[arg(long, global = true)]
    fiber: Option<String>,
    /// Session config (TOML).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = StyleArg::Named)]
    style: StyleArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Generic,
    Named,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Euler–Lagrange expressions F_a of a Lagrangian.
    Euler { expr: String },
    /// Horizontal differential d̄L, over the signature with one extra even parameter.
    Dbar { expr: String },
    /// Whether d̄L vanishes. Without an expression, tests d̄ of a random Lagrangian.
    CheckClosed { expr: Option<String> },
    /// Canonical representative of a top-degree form, with witness τ.
    Canonicalize { expr: String },
    /// Check χ(δ(L·dt)) = d̄L·dt for a Lagrangian over an even base.
    Relate { expr: String },
    /// Covariance of weight w against the monomial parameter fields.
    Covariance {
        expr: String,
        #[arg(long, default_value = "1")]
        weight: String,
        /// Highest order n; fields t^J ∂/∂t^i with |J| ≤ n + 1 are tested.
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Substitute target coordinates by functions of source coordinates.
    Compose {
        /// Lagrangian over the target fiber given by `--fiber`.
        expr: String,
        /// Source fiber, e.g. `u:even,v:even`.
        #[arg(long)]
        source: String,
        /// One expression per target coordinate, over the source fiber.
        #[arg(required = true)]
        map: Vec<String>,
    },
    /// Gauss–Bonnet integral over the sphere chart.
    GaussBonnet {
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<u32>,
        /// Append wall-clock time to each line (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
}

struct Session {
    sig: Signature,
    config: SessionConfig,
    style: Style,
    format: Format,
}

impl Session {
    fn new(cli: &Cli) -> Result<Session> {
        let mut config = match &cli.config {
            Some(path) => SessionConfig::load(path)?,
            None => SessionConfig::from_signature(&parse_signature("1:0", "x")?),
        };
        let sig = match (&cli.sig, &cli.fiber) {
            (None, None) => config.signature()?,
            (sig, fiber) => {
                let default = format!("{}:{}", config.r, config.s);
                let fiber = match fiber {
                    Some(f) => f.clone(),
                    None => config
                        .fiber
                        .iter()
                        .map(|f| format!("{}:{}", f.name, if f.odd { "odd" } else { "even" }))
                        .collect::<Vec<_>>()
                        .join(","),
                };
                parse_signature(sig.as_deref().unwrap_or(&default), &fiber)?
            }
        };
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        let style = match cli.style {
            StyleArg::Generic => Style::Generic,
            StyleArg::Named => Style::Named,
        };
        let format = if cli.json { Format::Json } else { cli.format };
        Ok(Session { sig, config, style, format })
    }

    fn show(&self, p: &GradedPoly, sig: &Signature) -> String {
        print(p, sig, self.style)
    }

    fn poly(&self, p: &GradedPoly, sig: &Signature) -> Value {
        json!({ "text": self.show(p, sig), "poly": poly_to_json(p) })
    }

    fn no_csv(&self) -> Result<()> {
        if self.format == Format::Csv {
            return Err(Error::Config("csv output is available for gauss-bonnet and selftest".into()));
        }
        Ok(())
    }
}

/// What a subcommand produced: text lines, a JSON document, and whether the checked property held.
struct Report {
    text: Vec<String>,
    json: Value,
    csv: Vec<String>,
    holds: bool,
}

impl Report {
    fn ok(text: Vec<String>, json: Value) -> Report {
        Report { text, json, csv: Vec::new(), holds: true }
    }
}

fn integral_json(w: &IntegralForm, style: Style) -> Value {
    let symbols: Vec<Value> = w
        .terms()
        .map(|(idx, c)| json!({ "indices": idx.to_vec(), "coefficient": poly_to_json(c) }))
        .collect();
    json!({ "text": print_integral(w, style), "symbols": symbols })
}

fn fiber_name(sig: &Signature, a: u16) -> String {
    sig.fiber[a as usize - 1].name.clone()
}

fn run(cli: &Cli) -> Result<Report> {
    let s = Session::new(cli)?;
    let sig = &s.sig;
    match &cli.command {
        Command::Euler { expr } => {
            s.no_csv()?;
            let l = parse(expr, sig)?;
            let f = euler(sig, &l);
            let mut text = Vec::new();
            let mut obj = serde_json::Map::new();
            for (k, fa) in f.iter().enumerate() {
                let name = fiber_name(sig, k as u16 + 1);
                text.push(format!("F_{name} = {}", s.show(fa, sig)));
                obj.insert(name, s.poly(fa, sig));
            }
            Ok(Report::ok(text, json!({ "schema": 1, "euler": obj })))
        }
        Command::Dbar { expr } => {
            s.no_csv()?;
            let l = parse(expr, sig)?;
            let ext = sig.extended();
            let d = dbar(sig, &l);
            Ok(Report::ok(
                vec![format!("dbar = {}", s.show(&d, &ext))],
                json!({ "schema": 1, "dbar": s.poly(&d, &ext), "r": ext.r }),
            ))
        }
        Command::CheckClosed { expr } => {
            s.no_csv()?;
            let (base, l) = match expr {
                Some(e) => (sig.clone(), parse(e, sig)?),
                None => {
                    let mut rng = random::rng(s.config.seed);
                    let l = random::poly(&mut rng, sig, &Shape::default());
                    (sig.extended(), dbar(sig, &l))
                }
            };
            let d = dbar(&base, &l);
            let holds = d.is_zero();
            let verdict = if holds { "closed" } else { "not closed" };
            let mut text = Vec::new();
            if expr.is_none() {
                text.push(format!("input = {}", s.show(&l, &base)));
            }
            text.push(verdict.to_string());
            if !holds {
                text.push(format!("dbar = {}", s.show(&d, &base.extended())));
            }
            Ok(Report {
                text,
                json: json!({ "schema": 1, "input": s.poly(&l, &base), "closed": holds, "dbar": s.poly(&d, &base.extended()) }),
                csv: Vec::new(),
                holds,
            })
        }
        Command::Canonicalize { expr } => {
            s.no_csv()?;
            if expr.contains("Vol") {
                let w = parse_integral(expr, sig)?;
                let (c, witness) = rho_integral(&w)?;
                Ok(Report::ok(
                    vec![
                        format!("canonical = {}", print_integral(&c, s.style)),
                        format!("witness = {}", print_integral(&witness.tau, s.style)),
                    ],
                    json!({ "schema": 1, "canonical": integral_json(&c, s.style), "witness": integral_json(&witness.tau, s.style) }),
                ))
            } else {
                let w = JetForm::new(sig.clone(), parse(expr, sig)?);
                let (c, witness) = rho(&w)?;
                Ok(Report::ok(
                    vec![
                        format!("canonical = {}", s.show(&c.body, sig)),
                        format!("witness = {}", s.show(&witness.tau.body, sig)),
                    ],
                    json!({ "schema": 1, "canonical": s.poly(&c.body, sig), "witness": s.poly(&witness.tau.body, sig) }),
                ))
            }
        }
        Command::Relate { expr } => {
            s.no_csv()?;
            let l = parse(expr, sig)?;
            let w = JetForm::new(sig.clone(), vertical_delta(&(&l * &top_form(sig))));
            let lhs = chi(&w)?.body;
            let rhs = &dbar(sig, &l) * &extended_top_form(sig);
            let ext = sig.extended();
            let holds = lhs == rhs;
            Ok(Report {
                text: vec![
                    format!("chi(delta(L dt)) = {}", s.show(&lhs, &ext)),
                    format!("dbar(L) dt = {}", s.show(&rhs, &ext)),
                    if holds { "relation holds".into() } else { "relation fails".into() },
                ],
                json: json!({ "schema": 1, "lhs": s.poly(&lhs, &ext), "rhs": s.poly(&rhs, &ext), "holds": holds }),
                csv: Vec::new(),
                holds,
            })
        }
        Command::Covariance { expr, weight, order } => {
            s.no_csv()?;
            let w: Q = weight.trim().parse().map_err(|_| Error::Config(format!("bad weight `{weight}`")))?;
            let l = Lagrangian::new(sig.clone(), parse(expr, sig)?);
            let report = check_covariance_basis(&l, &w, *order)?;
            let mut text = Vec::new();
            let mut failures = Vec::new();
            for (j, i, res) in report.fields.iter().chain(&report.chain) {
                if !res.is_zero() {
                    let line = format!("field t^{j:?} d/dt^{i}: residual {}", s.show(res, sig));
                    text.push(line.clone());
                    failures.push(line);
                }
            }
            let holds = report.passed();
            text.push(if holds {
                format!("covariant of weight {w} ({} fields)", report.fields.len())
            } else {
                format!("not covariant of weight {w}")
            });
            Ok(Report {
                text,
                json: json!({ "schema": 1, "weight": w.to_string(), "fields": report.fields.len(), "covariant": holds, "failures": failures }),
                csv: Vec::new(),
                holds,
            })
        }
        Command::Compose { expr, source, map } => {
            s.no_csv()?;
            let src = parse_signature(&format!("{}:{}", sig.r, sig.s), source)?;
            let l = Lagrangian::new(sig.clone(), parse(expr, sig)?);
            let f = map.iter().map(|m| parse(m, &src)).collect::<Result<Vec<_>>>()?;
            let out = compose(&l, &src, &f)?;
            Ok(Report::ok(
                vec![format!("L = {}", s.show(&out.body, &src))],
                json!({ "schema": 1, "composed": s.poly(&out.body, &src) }),
            ))
        }
        Command::GaussBonnet { resolution, delta } => {
            let tol = &s.config.tolerances;
            let patch = sphere_patch(delta.unwrap_or(tol.sphere_delta), resolution.unwrap_or(tol.sphere_resolution));
            let gb = integrate(&gauss_bonnet_density, &patch)?;
            let raw = integrate(&gauss_bonnet_sum, &patch)?;
            let gm = integrate(&gauss_map_density, &patch)?;
            let pi = std::f64::consts::PI;
            let chi_val = gb.value / (4.0 * pi);
            let rows = [
                ("integral", gb.value, 8.0 * pi, gb.error_estimate),
                ("curvature_sum", raw.value, 4.0 * pi, raw.error_estimate),
                ("gauss_map", gm.value, 4.0 * pi, gm.error_estimate),
            ];
            let text = vec![
                format!("integral = {:.6} (8pi = {:.6})", gb.value, 8.0 * pi),
                format!("curvature sum = {:.6} (4pi = {:.6})", raw.value, 4.0 * pi),
                format!("gauss map = {:.6} (4pi = {:.6})", gm.value, 4.0 * pi),
                format!("chi = integral / 4pi = {chi_val:.4}"),
            ];
            let mut csv = vec!["quantity,value,reference,error_estimate".to_string()];
            csv.extend(rows.iter().map(|(n, v, r, e)| format!("{n},{v:.12},{r:.12},{e:.3e}")));
            csv.push(format!("chi,{chi_val:.12},2,"));
            let json = json!({
                "schema": 1,
                "resolution": patch.resolution,
                "rows": rows.iter().map(|(n, v, r, e)| json!({ "quantity": n, "value": v, "reference": r, "error_estimate": e })).collect::<Vec<_>>(),
                "chi": chi_val,
            });
            Ok(Report { text, json, csv, holds: true })
        }
        Command::Selftest { criterion, timings } => {
            let ids: Vec<u32> = match criterion {
                Some(c) => vec![*c],
                None => CRITERIA.iter().map(|c| c.0).collect(),
            };
            let results: Vec<_> = ids.iter().map(|&id| selftest::run(id, s.config.seed, &s.config.tolerances)).collect();
            let holds = results.iter().all(|r| r.passed);
            let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
            let text = results
                .iter()
                .map(|r| {
                    if *timings {
                        r.line()
                    } else {
                        format!("[{}] criterion {:>2} {}: {}", verdict(r.passed), r.id, r.name, r.detail)
                    }
                })
                .collect();
            let mut csv = vec!["criterion,name,result".to_string()];
            csv.extend(results.iter().map(|r| format!("{},{},{}", r.id, r.name, verdict(r.passed))));
            let json = json!({
                "schema": 1,
                "seed": s.config.seed,
                "criteria": results.iter().map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail })).collect::<Vec<_>>(),
            });
            Ok(Report { text, json, csv, holds })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.json { Format::Json } else { cli.format };
    match run(&cli) {
        Ok(report) => {
            match format {
                Format::Text => report.text.iter().for_each(|l| println!("{l}")),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("json")),
                Format::Csv => report.csv.iter().for_each(|l| println!("{l}")),
            }
            if report.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
