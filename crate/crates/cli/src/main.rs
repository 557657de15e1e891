use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cxgeom::bilag::package;
use cxgeom::calculus::{ChartPoint, C};
use cxgeom::connection::christoffel;
use cxgeom::eguchi::{eh_frame, monge_ampere_grid, CotangentPoint};
use cxgeom::flows::{default_steps, geodesic_trajectory, GeodesicState};
use cxgeom::models::{build_model, KahlerModel, ModelKind};
use cxgeom::quaternion::{hh_frame, relation_report};
use cxgeom::suite::{eguchi_point, run_suite, SuiteConfig, SuiteReport};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cxgeom", version, about = "Numerical checks for complexified Kähler geometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Output {
    /// Output format.
    #[arg(long, visible_alias = "report", value_enum, default_value = "json")]
    emit: Emit,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run validation suites and print a report.
    Suite {
        #[arg(long, default_value = "cp1")]
        model: String,
        /// Suite names, comma separated or repeated; `all` for every suite.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Tolerance override `name=value`, repeatable.
        #[arg(long = "tol")]
        tol: Vec<String>,
        /// Record wall times (the report is then no longer reproducible).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Print a tensor of the bi-Lagrangian package at a point.
    Eval {
        #[arg(long, default_value = "cp1")]
        model: String,
        /// Chart point `z,w` (for n > 1: `z1,..,zn,w1,..,wn`).
        #[arg(long)]
        at: String,
        /// One of omega, g, h, j, f, omega1, omega2, g1, g2, or all.
        #[arg(long, default_value = "all")]
        tensor: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Christoffel symbols of the holomorphic connection.
    Christoffel {
        #[arg(long, default_value = "cp1")]
        model: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a geodesic and emit the sampled trajectory.
    Geodesic {
        #[arg(long, default_value = "cp1")]
        model: String,
        #[arg(long)]
        start: String,
        #[arg(long)]
        vel: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// RK4 steps; defaults to 1000 per unit parameter.
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Transported almost hyper-Hermitian frame and its relation report.
    Hh {
        #[arg(long, default_value = "cp1")]
        model: String,
        #[arg(long)]
        at: String,
        #[command(flatten)]
        output: Output,
    },
    /// Eguchi-Hanson structure at a point, or the Monge-Ampère residual on a grid.
    Eh {
        /// Point `z,u` of the cotangent bundle.
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        at: Option<String>,
        /// Grid size for residual data over `z = x`, `u = iy`.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        extent: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

/// Result of a command: text to print and whether its checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn data(text: String) -> Self {
        Outcome { text, pass: true }
    }
}

fn parse_complex(s: &str) -> Result<C> {
    s.trim().parse::<C>().map_err(|_| anyhow!("cannot parse {s:?} as a complex number"))
}

fn parse_list(s: &str) -> Result<Vec<C>> {
    s.split(',').map(parse_complex).collect()
}

fn parse_point(s: &str, n: usize) -> Result<ChartPoint> {
    let v = parse_list(s)?;
    if v.len() != 2 * n {
        bail!("expected {} comma-separated coordinates, got {}", 2 * n, v.len());
    }
    Ok(ChartPoint::new(v[..n].to_vec(), v[n..].to_vec())?)
}

fn model(name: &str) -> Result<KahlerModel> {
    let kind: ModelKind = name.parse()?;
    Ok(build_model(kind)?)
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn compact(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string(v)? + "\n")
}

fn parse_tolerances(items: &[String]) -> Result<BTreeMap<String, f64>> {
    items
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("--tol expects name=value, got {kv:?}"))?;
            let v: f64 = v.trim().parse().with_context(|| format!("bad tolerance value in {kv:?}"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn suite_csv(r: &SuiteReport) -> String {
    let mut s = String::from("name,max_defect,tolerance,bound,passed\n");
    for c in &r.records {
        let bound = match c.bound {
            cxgeom::report::Bound::AtMost => "at_most",
            cxgeom::report::Bound::AtLeast => "at_least",
        };
        s += &format!("{},{:e},{:e},{bound},{}\n", c.name, c.max_defect, c.tolerance, c.passed);
    }
    s
}

fn run(cmd: Command) -> Result<(Outcome, Option<PathBuf>)> {
    Ok(match cmd {
        Command::Suite { model, suite, samples, seed, tol, timing, output } => {
            let suites: Vec<&str> = suite.iter().map(String::as_str).collect();
            let mut cfg = SuiteConfig::parse(&model, &suites, samples, seed, parse_tolerances(&tol)?)?;
            cfg.timing = timing;
            let report = run_suite(&cfg)?;
            let text = match output.emit {
                Emit::Json => pretty(&report)?,
                Emit::Csv => suite_csv(&report),
            };
            (Outcome { text, pass: report.pass }, output.out)
        }
        Command::Eval { model: name, at, tensor, out } => {
            let m = model(&name)?;
            let p = parse_point(&at, m.n())?;
            let pkg = serde_json::to_value(package(&m, &p)?)?;
            let value = if tensor == "all" {
                pkg
            } else {
                pkg.get(&tensor).cloned().ok_or_else(|| anyhow!("unknown tensor {tensor:?}"))?
            };
            (Outcome::data(compact(&json!({ "model": name, "point": p, "tensor": tensor, "value": value }))?), out)
        }
        Command::Christoffel { model: name, at, out } => {
            let m = model(&name)?;
            let p = parse_point(&at, m.n())?;
            let table = christoffel(&m, &p)?;
            let d = 2 * m.n();
            let gamma: Vec<Vec<Vec<C>>> =
                (0..d).map(|a| (0..d).map(|b| (0..d).map(|c| table.get(a, b, c)).collect()).collect()).collect();
            (Outcome::data(compact(&json!({ "model": name, "point": p, "gamma": gamma }))?), out)
        }
        Command::Geodesic { model: name, start, vel, t, steps, output } => {
            let m = model(&name)?;
            let p = parse_point(&start, m.n())?;
            let v = parse_list(&vel)?;
            let s0 = GeodesicState::new(p, v)?;
            let steps = steps.unwrap_or(default_steps(t));
            let rows = geodesic_trajectory(&m, &s0, t, steps)?;
            let text = match output.emit {
                Emit::Csv => {
                    let n = m.n();
                    let mut s = String::from("t");
                    for label in ["z", "w"] {
                        for i in 0..n {
                            let suffix = if n == 1 { String::new() } else { (i + 1).to_string() };
                            s += &format!(",Re {label}{suffix},Im {label}{suffix}");
                        }
                    }
                    s.push('\n');
                    for (t, st) in &rows {
                        s += &t.to_string();
                        for c in st.position.z().iter().chain(st.position.w()) {
                            s += &format!(",{},{}", c.re, c.im);
                        }
                        s.push('\n');
                    }
                    s
                }
                Emit::Json => {
                    let rows: Vec<Value> =
                        rows.iter().map(|(t, st)| json!({ "t": t, "position": st.position, "velocity": st.velocity })).collect();
                    compact(&json!({ "model": name, "steps": steps, "rows": rows }))?
                }
            };
            (Outcome::data(text), output.out)
        }
        Command::Hh { model: name, at, output } => {
            if output.emit == Emit::Csv {
                bail!("hh emits json only");
            }
            let m = model(&name)?;
            let p = parse_point(&at, m.n())?;
            let frame = hh_frame(&m, &p)?;
            let report = relation_report(&m, &p)?;
            let pass = report.pass();
            let text = compact(&json!({ "model": name, "frame": frame, "records": report.records, "pass": pass }))?;
            (Outcome { text, pass }, output.out)
        }
        Command::Eh { at, grid, extent, seed, output } => match (at, grid) {
            (Some(at), _) => {
                if output.emit == Emit::Csv {
                    bail!("eh --at emits json only");
                }
                let v = parse_list(&at)?;
                let [z, u] = v[..] else { bail!("expected z,u") };
                let p = CotangentPoint::new(z, u)?;
                let frame = eh_frame(&p)?;
                let report = eguchi_point(&p, seed)?;
                let pass = report.pass();
                let text = compact(&json!({ "frame": frame, "records": report.records, "pass": pass }))?;
                (Outcome { text, pass }, output.out)
            }
            (None, Some(n)) => {
                let cells = monge_ampere_grid(n, extent)?;
                let text = match output.emit {
                    Emit::Csv => {
                        let mut s = String::from("x,y,residual\n");
                        for (x, y, r) in &cells {
                            s += &format!("{x},{y},{r:e}\n");
                        }
                        s
                    }
                    Emit::Json => {
                        let cells: Vec<[f64; 3]> = cells.iter().map(|&(x, y, r)| [x, y, r]).collect();
                        compact(&json!({ "grid": n, "extent": extent, "cells": cells }))?
                    }
                };
                (Outcome::data(text), output.out)
            }
            (None, None) => bail!("eh needs --at or --grid"),
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((outcome, out)) => {
            let written = match out {
                Some(path) => fs::write(&path, &outcome.text).with_context(|| format!("writing {}", path.display())),
                None => std::io::stdout().write_all(outcome.text.as_bytes()).map_err(Into::into),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
