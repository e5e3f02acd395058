//! `ellsurf`: analyze elliptic surfaces over GF(p)(t) and verify the embedded classification tables.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input or analysis error.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ellsurf::algebra::parse_ratfunc;
use ellsurf::families::{generate, FamilySpec};
use ellsurf::frobext::{
    base_change, base_change_raw, frobenius_pullback_n, frobenius_pullback_raw, igusa_table, quadratic_twist_char2,
    ClassifyingMap,
};
use ellsurf::golden::{verify_table, worst_case_fixed_loci, TABLE_IDS};
use ellsurf::lattice::{artin_invariant, parse_lattice, shioda_tate, trivial_lattice};
use ellsurf::parallel::Execution;
use ellsurf::sections::torsion_search;
use ellsurf::tate::{analyze, AnalyzeOptions};
use ellsurf::weierstrass::{parse_model, WeierstrassModel};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ellsurf", version, about = "Elliptic surfaces over GF(p)(t), p <= 7")]
struct Cli {
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fiber types, Euler number and height data of a model file (`-` reads standard input).
    Analyze {
        model: PathBuf,
        /// Declare a torsion section of this order and search for it.
        #[arg(long)]
        torsion: Option<u32>,
        /// Degree bound for the torsion search (default 2 chi).
        #[arg(long, requires = "torsion")]
        deg_bound: Option<usize>,
        /// Picard number to assume for the Mordell-Weil rank.
        #[arg(long)]
        assume_rho: Option<u32>,
        /// Skip global minimalization.
        #[arg(long)]
        raw: bool,
        /// Per-fiber fixed loci of a torsion translation meeting the zero section on additive fibers.
        #[arg(long)]
        fixed_locus: bool,
    },
    /// Frobenius pullback t -> t^p, applied `times` times.
    Pullback {
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: u32,
        /// Keep the substituted model without minimalizing.
        #[arg(long)]
        raw: bool,
    },
    /// Base change along a rational map t -> phi(t).
    Basechange {
        model: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        raw: bool,
    },
    /// Quadratic twist in characteristic 2 by the Artin-Schreier extension z^2 + z = g.
    Twist2 {
        model: PathBuf,
        #[arg(long)]
        g: String,
    },
    /// Generate a member of a named family from a spec file, or from --name and --param.
    Family {
        spec: Option<PathBuf>,
        #[arg(long, conflicts_with = "spec")]
        name: Option<String>,
        /// `name=value`, repeatable.
        #[arg(long = "param", requires = "name")]
        params: Vec<String>,
        /// Return the base surface instead of the pullback.
        #[arg(long)]
        raw: bool,
    },
    /// The embedded Igusa table.
    Igusa {
        #[command(subcommand)]
        action: IgusaAction,
    },
    /// Parse a lattice expression; with --model, run Shioda-Tate against that surface.
    Lattice {
        expr: String,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Order of the torsion subgroup of the Mordell-Weil group.
        #[arg(long, default_value_t = 1, requires = "model")]
        torsion_order: u64,
    },
    /// Verify embedded tables (`all` for every table).
    Verify {
        #[arg(required = true)]
        tables: Vec<String>,
    },
}

#[derive(Subcommand)]
enum IgusaAction {
    /// Every universal equation with its Frobenius tower.
    Dump,
}

/// Outcome of a successful run: JSON to print and whether verification matched.
struct Output {
    value: Value,
    matched: bool,
}

impl From<Value> for Output {
    fn from(value: Value) -> Self {
        Output { value, matched: true }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> Result<WeierstrassModel> {
    parse_model(&read_input(path)?).with_context(|| format!("model {}", path.display()))
}

fn model_json(m: &WeierstrassModel) -> Result<Value> {
    let mut v = serde_json::to_value(m.to_file())?;
    v["equation"] = json!(m.equation());
    v["chi"] = json!(m.chi());
    Ok(v)
}

/// Family spec files may give parameters as JSON numbers or strings.
fn parse_spec(text: &str) -> Result<FamilySpec> {
    let mut v: Value = serde_json::from_str(text).context("family spec JSON")?;
    if let Some(params) = v.get_mut("parameters").and_then(Value::as_object_mut) {
        for value in params.values_mut() {
            if !value.is_string() {
                *value = Value::String(value.to_string());
            }
        }
    }
    serde_json::from_value(v).context("family spec")
}

fn inline_spec(name: &str, params: &[String]) -> Result<FamilySpec> {
    let mut map = serde_json::Map::new();
    for p in params {
        let Some((k, v)) = p.split_once('=') else { bail!("parameter {p:?} is not of the form name=value") };
        map.insert(k.trim().to_string(), Value::String(v.trim().to_string()));
    }
    parse_spec(&json!({ "family": name, "parameters": map }).to_string())
}

fn run(cli: &Cli) -> Result<Output> {
    let execution = if cli.sequential { Execution::Sequential } else { Execution::best() };
    Ok(match &cli.command {
        Command::Analyze { model, torsion, deg_bound, assume_rho, raw, fixed_locus } => {
            let m = load_model(model)?;
            let opts = AnalyzeOptions { raw: *raw, torsion: *torsion, assume_rho: *assume_rho, execution };
            let report = analyze(&m, &opts)?;
            let mut out = serde_json::to_value(&report)?;
            if let Some(n) = torsion {
                let bound = deg_bound.unwrap_or(2 * report.chi as usize);
                let found = torsion_search(&report.model, *n, bound)?;
                out["torsion_search"] = json!({ "order": n, "deg_bound": bound, "sections": found });
            }
            if *fixed_locus {
                let loci = worst_case_fixed_loci(&report)?;
                let rows: Vec<Value> = report
                    .fibers
                    .iter()
                    .zip(&loci)
                    .map(|(f, (d, _))| json!({ "place": f.place.to_string(), "type": f.kodaira.to_string(), "fixed_locus": d }))
                    .collect();
                out["fixed_locus"] = Value::Array(rows);
            }
            out.into()
        }
        Command::Pullback { model, times, raw } => {
            let m = load_model(model)?;
            let pulled = if *raw {
                (0..*times).fold(m, |acc, _| frobenius_pullback_raw(&acc))
            } else {
                frobenius_pullback_n(&m, *times)?
            };
            model_json(&pulled)?.into()
        }
        Command::Basechange { model, phi, raw } => {
            let m = load_model(model)?;
            let map = ClassifyingMap::parse(phi, m.p()).context("--phi")?;
            let changed = if *raw { base_change_raw(&m, &map)? } else { base_change(&m, &map)? };
            model_json(&changed)?.into()
        }
        Command::Twist2 { model, g } => {
            let m = load_model(model)?;
            let g = parse_ratfunc(g, m.p()).context("--g")?;
            model_json(&quadratic_twist_char2(&m, &g)?)?.into()
        }
        Command::Family { spec, name, params, raw } => {
            let spec = match (spec, name) {
                (Some(path), _) => parse_spec(&read_input(path)?)?,
                (None, Some(name)) => inline_spec(name, params)?,
                (None, None) => bail!("give a spec file or --name"),
            };
            model_json(&generate(&spec, *raw)?)?.into()
        }
        Command::Igusa { action: IgusaAction::Dump } => serde_json::to_value(igusa_table())?.into(),
        Command::Lattice { expr, model, torsion_order } => {
            let lattice = parse_lattice(expr).context("lattice expression")?;
            let mut out = serde_json::to_value(lattice.to_json())?;
            if let Some(path) = model {
                let m = load_model(path)?;
                let report = analyze(&m, &AnalyzeOptions { execution, ..AnalyzeOptions::default() })?;
                let det_t = trivial_lattice(&report.fibers).det();
                let det_ns = shioda_tate(&det_t, &lattice, *torsion_order);
                out["trivial_det"] = json!(det_t.to_string());
                out["ns_det_abs"] = json!(det_ns.to_string());
                out["sigma0"] = match artin_invariant(&det_ns, m.p()) {
                    Ok(s) => json!(s),
                    Err(e) => json!({ "error": e.to_string() }),
                };
            }
            out.into()
        }
        Command::Verify { tables } => {
            let ids: Vec<&str> = if tables.iter().any(|t| t == "all") {
                TABLE_IDS.to_vec()
            } else {
                tables.iter().map(String::as_str).collect()
            };
            let mut reports = Vec::new();
            let mut matched = true;
            for id in ids {
                let report = verify_table(id, execution)?;
                matched &= report.pass;
                reports.push(serde_json::to_value(report)?);
            }
            let value = if reports.len() == 1 { reports.remove(0) } else { Value::Array(reports) };
            Output { value, matched }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text =
                if cli.pretty { serde_json::to_string_pretty(&out.value) } else { serde_json::to_string(&out.value) };
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{}", text.expect("JSON values serialize")) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            if out.matched {
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
