//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tilespec_core::group::haar_weights;
use tilespec_core::lattice::{reduce_zd, Subgroup};
use tilespec_core::snf::IntMatrix;
use tilespec_core::tiling::check_all;
use tilespec_core::{Arithmetic, ConditionReport, Element, Group, SetOnGroup, Side};

use crate::instance::{parse_element, render_instance, InputError, Instance};
use crate::report::CheckReport;
use crate::selftest::{self, DEFAULT_SEED, MAX_EXHAUSTIVE_ORDER};
use crate::tasks::{self, Family, Limits, SearchMode, SearchTask};

/// Exit statuses.
pub mod exit {
    pub const ALL_TRUE: i32 = 0;
    pub const ALL_FALSE: i32 = 1;
    /// The five conditions disagree, which is an implementation defect.
    pub const DEFECT: i32 = 2;
    pub const INPUT: i32 = 64;
    pub const IO: i32 = 74;
}

#[derive(Debug, Parser)]
#[command(
    name = "tilespec",
    version,
    about = "Tilings and spectra of finite abelian groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the five equivalent tiling/spectral conditions on an instance.
    Check {
        /// Instance JSON file.
        #[arg(long)]
        instance: PathBuf,
        /// Exact cyclotomic arithmetic instead of floats.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Enumerate tiles, spectra, general tilings, or tile/spectral classes.
    Search {
        #[command(subcommand)]
        target: SearchTarget,
    },
    /// Reduce a lattice tiling of Z^d to a finite group instance.
    ReduceZd {
        /// JSON file with "matrix" and "omega".
        #[arg(long, conflicts_with_all = ["matrix", "omega"])]
        input: Option<PathBuf>,
        /// Square integer matrix as JSON, e.g. '[[2,0],[0,2]]'.
        #[arg(long, requires = "omega")]
        matrix: Option<String>,
        /// Points of Z^d as JSON, e.g. '[[0,0],[1,0]]'.
        #[arg(long, requires = "matrix")]
        omega: Option<String>,
        /// Where to write the reduced instance; standard output by default.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive five-way agreement plus seeded identity checks.
    Selftest {
        /// Largest group order in the exhaustive sweep (at most 16).
        #[arg(long, default_value_t = 8)]
        max_order: u64,
        /// Exact cyclotomic arithmetic instead of floats.
        #[arg(long)]
        exact: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<NonZeroUsize>,
        /// Seed for the random identity checks.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random functions per identity check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SearchOpts {
    /// Stop after this many results.
    #[arg(long)]
    max_results: Option<NonZeroUsize>,
    /// Stop once this many milliseconds have elapsed.
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<NonZeroUsize>,
}

#[derive(Debug, Args)]
pub struct GroupArg {
    /// Instance file providing the group (and lattice or omega).
    #[arg(long, conflicts_with = "group")]
    instance: Option<PathBuf>,
    /// Group literal such as Z4xZ3.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum SearchTarget {
    /// All sets tiling G by translations in a subgroup.
    Tiles {
        #[command(flatten)]
        source: GroupArg,
        /// Subgroup generator, e.g. 2 or 1,0; repeatable.
        #[arg(long = "generator")]
        generators: Vec<String>,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// All spectra of omega containing the trivial character.
    Spectra {
        #[command(flatten)]
        source: GroupArg,
        /// Element of omega; repeatable.
        #[arg(long = "omega")]
        omega: Vec<String>,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// All exact covers of G by translates of a set of the given size.
    General {
        /// Group literal such as Z12.
        #[arg(long)]
        group: String,
        /// Size of the translated set; must divide |G|.
        #[arg(long)]
        size: usize,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Tile and spectral classification of all subsets of a size containing 0.
    Fuglede {
        /// Group literal such as Z8.
        #[arg(long, required_unless_present = "family", requires = "size")]
        group: Option<String>,
        /// Size of the subsets; must divide |G|.
        #[arg(long)]
        size: Option<usize>,
        /// Sweep a family of groups instead of one group.
        #[arg(long, value_enum, requires = "max_order", conflicts_with_all = ["group", "size"])]
        family: Option<Family>,
        /// Largest group order in the sweep.
        #[arg(long)]
        max_order: Option<u64>,
        #[command(flatten)]
        opts: SearchOpts,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Io(std::io::Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Io(e)
    }
}

fn input<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Input(msg.into()))
}

/// Parses arguments and runs; returns the process exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            exit::INPUT
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit::IO
        }
    }
}

fn pool(jobs: Option<NonZeroUsize>) -> Result<rayon::ThreadPool, Failure> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.get());
    }
    b.build().map_err(|e| Failure::Io(std::io::Error::other(e)))
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Check {
            instance,
            exact,
            format,
        } => check(&instance, exact, format, out),
        Command::Search { target } => search(target, out),
        Command::ReduceZd {
            input,
            matrix,
            omega,
            output,
        } => reduce(input, matrix, omega, output, out, err),
        Command::Selftest {
            max_order,
            exact,
            jobs,
            seed,
            samples,
        } => {
            if max_order > MAX_EXHAUSTIVE_ORDER {
                return input(format!(
                    "--max-order {max_order} exceeds the exhaustive limit {MAX_EXHAUSTIVE_ORDER}"
                ));
            }
            let mode = if exact {
                Arithmetic::Exact
            } else {
                Arithmetic::Float
            };
            let summary = pool(jobs)?.install(|| selftest::run(max_order, mode, seed, samples));
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&summary).expect("summaries serialize")
            )?;
            Ok(if summary.passed {
                exit::ALL_TRUE
            } else {
                exit::DEFECT
            })
        }
    }
}

fn check(path: &PathBuf, exact: bool, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = Instance::load(path)?;
    let h = inst.require_lattice()?;
    let omega = inst.require_omega()?;
    if omega.is_empty() {
        return input(format!(
            "{}: at $.omega: omega must be nonempty",
            inst.origin
        ));
    }
    let mc = haar_weights(&inst.group, inst.measure)
        .map_err(|e| Failure::Input(format!("{}: at $.measure: {e}", inst.origin)))?;
    let mode = if exact || inst.exact {
        Arithmetic::Exact
    } else {
        Arithmetic::Float
    };
    let report = check_all(omega, h, &mc, mode).map_err(|e| Failure::Input(e.to_string()))?;
    let r = CheckReport::new(&inst.group, inst.measure, &report);
    match format {
        Format::Json => writeln!(out, "{}", r.to_json())?,
        Format::Text => write!(out, "{}", r.to_text())?,
    }
    Ok(exit_code(&report))
}

/// 0 when all five conditions hold, 1 when none does, 2 on disagreement.
pub fn exit_code(report: &ConditionReport) -> i32 {
    if !report.consistent() || !(report.all_true() || report.all_false()) {
        exit::DEFECT
    } else if report.all_true() {
        exit::ALL_TRUE
    } else {
        exit::ALL_FALSE
    }
}

fn parse_group(text: &str) -> Result<Group, Failure> {
    Group::from_str(text).map_err(|e| Failure::Input(format!("--group: {e}")))
}

fn elements(group: &Group, flag: &str, items: &[String]) -> Result<Vec<Element>, Failure> {
    items
        .iter()
        .map(|s| parse_element(group, s).map_err(|e| Failure::Input(format!("--{flag}: {e}"))))
        .collect()
}

/// Group plus the instance file, if one was given.
fn source(src: &GroupArg) -> Result<(Group, Option<Instance>), Failure> {
    match (&src.instance, &src.group) {
        (Some(path), _) => {
            let inst = Instance::load(path)?;
            Ok((inst.group.clone(), Some(inst)))
        }
        (None, Some(g)) => Ok((parse_group(g)?, None)),
        (None, None) => input("give --instance or --group"),
    }
}

fn limits(opts: &SearchOpts) -> Limits {
    Limits {
        max_results: opts.max_results,
        time_budget: opts.time_budget_ms.map(Duration::from_millis),
    }
}

fn search(target: SearchTarget, out: &mut dyn Write) -> Result<i32, Failure> {
    let (task, jobs) = match target {
        SearchTarget::Tiles {
            source: src,
            generators,
            opts,
        } => {
            let (group, inst) = source(&src)?;
            let h = match inst {
                Some(i) if generators.is_empty() => i.require_lattice()?.clone(),
                Some(_) => {
                    return input("give the lattice either in the instance or with --generator")
                }
                None => {
                    let gens = elements(&group, "generator", &generators)?;
                    Subgroup::new(&group, Side::Primal, &gens)
                        .map_err(|e| Failure::Input(e.to_string()))?
                }
            };
            (
                SearchTask::new(group, SearchMode::Tiles(h), limits(&opts)),
                opts.jobs,
            )
        }
        SearchTarget::Spectra {
            source: src,
            omega,
            opts,
        } => {
            let (group, inst) = source(&src)?;
            let set = match inst {
                Some(i) if omega.is_empty() => i.require_omega()?.clone(),
                Some(_) => return input("give omega either in the instance or with --omega"),
                None => {
                    let els = elements(&group, "omega", &omega)?;
                    SetOnGroup::from_elements(&group, &els)
                        .map_err(|e| Failure::Input(e.to_string()))?
                }
            };
            (
                SearchTask::new(group, SearchMode::Spectra(set), limits(&opts)),
                opts.jobs,
            )
        }
        SearchTarget::General { group, size, opts } => {
            let g = parse_group(&group)?;
            (
                SearchTask::new(g, SearchMode::General(size), limits(&opts)),
                opts.jobs,
            )
        }
        SearchTarget::Fuglede {
            group,
            size,
            family,
            max_order,
            opts,
        } => match (group, size, family, max_order) {
            (Some(g), Some(n), None, _) => {
                let g = parse_group(&g)?;
                (
                    SearchTask::new(g, SearchMode::Fuglede(n), limits(&opts)),
                    opts.jobs,
                )
            }
            (None, None, Some(family), Some(max_order)) => {
                let trivial = Group::cyclic(1).expect("order 1");
                (
                    SearchTask::new(
                        trivial,
                        SearchMode::FugledeFamily { family, max_order },
                        limits(&opts),
                    ),
                    opts.jobs,
                )
            }
            _ => return input("give --group with --size, or --family with --max-order"),
        },
    };
    let task = task.map_err(Failure::Input)?;
    let mut lines: Vec<Value> = Vec::new();
    let outcome = pool(jobs)?.install(|| tasks::run(&task, &mut |v| lines.push(v)));
    for line in &lines {
        writeln!(out, "{line}")?;
    }
    writeln!(out, "{}", outcome.summary)?;
    Ok(exit::ALL_TRUE)
}

fn json_arg(flag: &str, text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| {
        Failure::Input(format!(
            "--{flag}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn int_rows(v: &Value, at: &str) -> Result<Vec<Vec<i64>>, Failure> {
    let Some(rows) = v.as_array() else {
        return input(format!("{at}: expected a list of integer lists"));
    };
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let Some(r) = r.as_array() else {
                return input(format!("{at}[{i}]: expected a list of integers"));
            };
            r.iter()
                .enumerate()
                .map(|(j, x)| {
                    x.as_i64().ok_or_else(|| {
                        Failure::Input(format!("{at}[{i}][{j}]: expected an integer"))
                    })
                })
                .collect()
        })
        .collect()
}

fn reduce(
    input_path: Option<PathBuf>,
    matrix: Option<String>,
    omega: Option<String>,
    output: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let (m, o) = match (input_path, matrix, omega) {
        (Some(p), _, _) => {
            let origin = p.display().to_string();
            let text = std::fs::read_to_string(&p)
                .map_err(|e| Failure::Input(format!("{origin}: {e}")))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| {
                Failure::Input(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
            })?;
            let get = |k: &str| {
                v.get(k)
                    .cloned()
                    .ok_or_else(|| Failure::Input(format!("{origin}: at $: missing key {k:?}")))
            };
            let (m, o) = (get("matrix")?, get("omega")?);
            (
                int_rows(&m, &format!("{origin}: at $.matrix"))?,
                int_rows(&o, &format!("{origin}: at $.omega"))?,
            )
        }
        (None, Some(m), Some(o)) => (
            int_rows(&json_arg("matrix", &m)?, "--matrix")?,
            int_rows(&json_arg("omega", &o)?, "--omega")?,
        ),
        _ => return input("give --input, or --matrix with --omega"),
    };
    let a = IntMatrix::from_rows(&m).map_err(|e| Failure::Input(format!("matrix: {e}")))?;
    let r = reduce_zd(&a, &o).map_err(|e| Failure::Input(format!("reduce-zd: {e}")))?;
    let source = json!({
        "matrix": m,
        "points": o,
        "invariants": r.smith.invariants(),
        "multiplicity": r.multiplicity,
        "tiles": r.tiles(),
    });
    let text = render_instance(&r.group, &[], &r.image, Some(source));
    match output {
        Some(p) => {
            std::fs::write(&p, &text)?;
            writeln!(err, "wrote {}; tiles: {}", p.display(), r.tiles())?;
        }
        None => write!(out, "{text}")?,
    }
    Ok(exit::ALL_TRUE)
}
