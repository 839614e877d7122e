//! Search tasks: validation, parallel execution and JSON output.

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Value};
use tilespec_core::search::{
    anchored_subsets, classify, enumerate_tiles, Classification, Completion, CoverSearch, Flow,
    FugledeReport, SpectrumSearch,
};
use tilespec_core::{Character, Group, SetOnGroup, Side, Subgroup};

use crate::instance::set_json;

/// Group families for the long-running Fuglede sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// `Z_n` for every `n` up to the order bound
    Cyclic,
    /// every ordered factor list up to the order bound
    All,
}

#[derive(Clone, Debug)]
pub enum SearchMode {
    Tiles(Subgroup),
    Spectra(SetOnGroup),
    General(usize),
    Fuglede(usize),
    FugledeFamily { family: Family, max_order: u64 },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    pub max_results: Option<NonZeroUsize>,
    pub time_budget: Option<Duration>,
}

#[derive(Clone, Debug)]
pub struct SearchTask {
    pub group: Group,
    pub mode: SearchMode,
    pub limits: Limits,
}

impl SearchTask {
    pub fn new(group: Group, mode: SearchMode, limits: Limits) -> Result<SearchTask, String> {
        match &mode {
            SearchMode::Tiles(h) => {
                if h.parent() != &group || h.side() != Side::Primal {
                    return Err(format!("lattice does not belong to {group}"));
                }
            }
            SearchMode::Spectra(omega) => {
                if omega.group() != &group {
                    return Err(format!("omega does not belong to {group}"));
                }
                if omega.is_empty() {
                    return Err("omega must be nonempty".into());
                }
            }
            SearchMode::General(n) | SearchMode::Fuglede(n) => {
                if *n == 0 || !group.size().is_multiple_of(*n) {
                    return Err(format!(
                        "size {n} does not divide |{group}| = {}",
                        group.order()
                    ));
                }
            }
            SearchMode::FugledeFamily { max_order, .. } => {
                if *max_order == 0 {
                    return Err("the order bound must be positive".into());
                }
            }
        }
        if limits.time_budget == Some(Duration::ZERO) {
            return Err("the time budget must be positive".into());
        }
        Ok(SearchTask {
            group,
            mode,
            limits,
        })
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            SearchMode::Tiles(_) => "tiles",
            SearchMode::Spectra(_) => "spectra",
            SearchMode::General(_) => "general",
            SearchMode::Fuglede(_) => "fuglede",
            SearchMode::FugledeFamily { .. } => "fuglede-family",
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Deadline(Option<Instant>);

impl Deadline {
    fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// Result of a task: the emitted lines are passed to `emit` in final order.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub results: usize,
    pub completion: Completion,
    pub summary: Value,
}

pub fn run(task: &SearchTask, emit: &mut dyn FnMut(Value)) -> Outcome {
    let started = Instant::now();
    let deadline = Deadline(task.limits.time_budget.map(|b| started + b));
    let cap = task
        .limits
        .max_results
        .map_or(usize::MAX, NonZeroUsize::get);
    let (lines, completion, extra) = match &task.mode {
        SearchMode::Tiles(h) => tiles(h, cap, deadline),
        SearchMode::Spectra(omega) => spectra(omega, cap, deadline),
        SearchMode::General(n) => general(&task.group, *n, cap, deadline),
        SearchMode::Fuglede(n) => {
            let (report, completion) = fuglede(&task.group, *n, deadline);
            (
                vec![fuglede_json(&report, completion)],
                completion,
                json!({}),
            )
        }
        SearchMode::FugledeFamily { family, max_order } => {
            family_sweep(*family, *max_order, deadline)
        }
    };
    let results = lines.len();
    for line in lines {
        emit(line);
    }
    let mut summary = json!({
        "mode": task.mode_name(),
        "group": match task.mode {
            SearchMode::FugledeFamily { .. } => Value::Null,
            _ => Value::from(task.group.to_string()),
        },
        "results": results,
        "completion": completion,
        "elapsed_ms": started.elapsed().as_millis() as u64,
    });
    if let (Value::Object(s), Value::Object(e)) = (&mut summary, extra) {
        s.extend(e);
    }
    Outcome {
        results,
        completion,
        summary: json!({ "summary": summary }),
    }
}

fn characters_json(chars: &[Character]) -> Value {
    Value::Array(
        chars
            .iter()
            .map(|c| Value::from(c.coords().to_vec()))
            .collect(),
    )
}

fn tiles(h: &Subgroup, cap: usize, deadline: Deadline) -> (Vec<Value>, Completion, Value) {
    let it = enumerate_tiles(h).expect("validated primal subgroup");
    let expected = it.expected_count();
    let mut lines = Vec::new();
    let mut completion = Completion::Exhausted;
    for tile in it {
        if lines.len() == cap || deadline.expired() {
            completion = Completion::Truncated;
            break;
        }
        lines.push(set_json(&tile));
    }
    let expected = expected.map_or(Value::Null, |c| Value::String(c.to_string()));
    (lines, completion, json!({ "expected_total": expected }))
}

/// Runs per-branch jobs in parallel, each capped at `cap + 1` results, then
/// concatenates in branch order and truncates to `cap`.
fn merge(parts: Vec<(Vec<Value>, Completion)>, cap: usize) -> (Vec<Value>, Completion) {
    let mut completion = Completion::Exhausted;
    let mut out = Vec::new();
    for (items, c) in parts {
        completion = completion.and(c);
        out.extend(items);
    }
    if out.len() > cap {
        out.truncate(cap);
        completion = Completion::Truncated;
    }
    (out, completion)
}

fn spectra(omega: &SetOnGroup, cap: usize, deadline: Deadline) -> (Vec<Value>, Completion, Value) {
    let search = SpectrumSearch::new(omega).expect("validated nonempty omega");
    let per_branch = cap.saturating_add(1);
    let parts: Vec<(Vec<Value>, Completion)> = search
        .branches()
        .into_par_iter()
        .map(|b| {
            let mut items = Vec::new();
            let c = search.run_branch(
                b,
                &mut |s| {
                    items.push(characters_json(&s));
                    if items.len() >= per_branch {
                        Flow::Stop
                    } else {
                        Flow::Continue
                    }
                },
                &|| deadline.expired(),
            );
            // a branch stopped by its own cap is only truncated if the merge says so
            let c = if items.len() >= per_branch {
                Completion::Exhausted
            } else {
                c
            };
            (items, c)
        })
        .collect();
    let (lines, completion) = merge(parts, cap);
    (lines, completion, json!({ "omega": set_json(omega) }))
}

fn general(
    group: &Group,
    n: usize,
    cap: usize,
    deadline: Deadline,
) -> (Vec<Value>, Completion, Value) {
    let subsets = anchored_subsets(group, n).expect("validated size");
    let per_branch = cap.saturating_add(1);
    let parts: Vec<(Vec<Value>, Completion)> = subsets
        .into_par_iter()
        .map(|omega| {
            if deadline.expired() {
                return (Vec::new(), Completion::Truncated);
            }
            let search = CoverSearch::new(&omega).expect("validated size");
            let mut found = Vec::new();
            let c = search.run(
                &mut |t| {
                    found.push(t);
                    if found.len() >= per_branch {
                        Flow::Stop
                    } else {
                        Flow::Continue
                    }
                },
                &|| deadline.expired(),
            );
            let c = if found.len() >= per_branch {
                Completion::Exhausted
            } else {
                c
            };
            // the cover search order is not lexicographic; sort within Omega
            found.sort_by(|a, b| a.indices().cmp(b.indices()));
            let items = found
                .iter()
                .map(|t| json!({ "omega": set_json(&omega), "translations": set_json(t) }))
                .collect();
            (items, c)
        })
        .collect();
    let (lines, completion) = merge(parts, cap);
    (lines, completion, json!({ "size": n }))
}

fn fuglede(group: &Group, n: usize, deadline: Deadline) -> (FugledeReport, Completion) {
    let subsets = anchored_subsets(group, n).expect("validated size");
    let classified: Vec<Option<(SetOnGroup, Classification)>> = subsets
        .into_par_iter()
        .map(|s| {
            if deadline.expired() {
                return None;
            }
            let c = classify(&s).expect("validated size");
            Some((s, c))
        })
        .collect();
    let completion = if classified.iter().all(Option::is_some) {
        Completion::Exhausted
    } else {
        Completion::Truncated
    };
    let items: Vec<(SetOnGroup, Classification)> = classified.into_iter().flatten().collect();
    (FugledeReport::from_classified(group, n, &items), completion)
}

fn sets_json(sets: &[SetOnGroup]) -> Value {
    Value::Array(sets.iter().map(set_json).collect())
}

pub fn fuglede_json(r: &FugledeReport, completion: Completion) -> Value {
    json!({
        "group": r.group.to_string(),
        "size": r.size,
        "subsets": r.subsets,
        "tiles": { "count": r.tiles.len(), "sets": sets_json(&r.tiles) },
        "spectral": { "count": r.spectral.len(), "sets": sets_json(&r.spectral) },
        "symmetric_difference": {
            "tile_not_spectral": sets_json(&r.tile_not_spectral),
            "spectral_not_tile": sets_json(&r.spectral_not_tile),
        },
        "agrees": r.agrees(),
        "completion": completion,
    })
}

fn family_sweep(
    family: Family,
    max_order: u64,
    deadline: Deadline,
) -> (Vec<Value>, Completion, Value) {
    let groups: Vec<Group> = match family {
        Family::Cyclic => (1..=max_order)
            .map(|n| Group::cyclic(n).expect("positive order"))
            .collect(),
        Family::All => Group::all_up_to(max_order),
    };
    let mut lines = Vec::new();
    let mut completion = Completion::Exhausted;
    let mut disagreements = 0usize;
    for g in groups {
        let size = g.size();
        for n in (2..size).filter(|n| size % n == 0) {
            if deadline.expired() {
                completion = Completion::Truncated;
                break;
            }
            let (r, c) = fuglede(&g, n, deadline);
            completion = completion.and(c);
            if !r.agrees() {
                disagreements += 1;
            }
            lines.push(json!({
                "group": g.to_string(),
                "size": n,
                "subsets": r.subsets,
                "tiles": r.tiles.len(),
                "spectral": r.spectral.len(),
                "tile_not_spectral": sets_json(&r.tile_not_spectral),
                "spectral_not_tile": sets_json(&r.spectral_not_tile),
                "agrees": r.agrees(),
                "completion": c,
            }));
        }
    }
    (
        lines,
        completion,
        json!({ "family": format!("{family:?}").to_lowercase(), "disagreements": disagreements }),
    )
}
