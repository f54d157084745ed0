//! The top-level loop: grow the number of filled cells until `t` rows are
//! full bases or the budgets run out.
//!
//! Each iteration commits every direct add, then looks for an improving
//! cascade from each non-full row, then falls back to a boost round. When
//! nothing helps, the attempt ends; a bounded number of fresh attempts with
//! a seeded row order follow, and the best attempt is returned.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::boost::{boost, BoostOutcome, BoostParams, BoostReport};
use crate::cascade::{run_cascade, CascadeConfig, CascadeOutcome, CascadeTrace, GrowthParams};
use crate::claims::{check_state, random_walk, ClaimTally};
use crate::error::{Error, Result};
use crate::generate::rng;
use crate::instance::Instance;
use crate::swap::direct_add;
use crate::table::{Move, Table};

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub seed: u64,
    /// Top-level iterations per attempt.
    pub max_iterations: usize,
    /// Cascade levels beyond the first; `None` means `f - 1`.
    pub depth_cap: Option<usize>,
    /// Cap on cascade-removable positions per level; `None` means `10 n f`.
    pub q_cap: Option<usize>,
    /// E-raising rounds per boost; `None` means `D`.
    pub boost_rounds: Option<usize>,
    /// Consecutive boosts without a fill before an attempt gives up.
    pub max_idle_boosts: usize,
    /// Fresh attempts with a shuffled row order after the first stalls.
    pub restarts: usize,
    /// Shuffle the row order of the first attempt as well.
    pub shuffle_first: bool,
    /// Soft wall-clock limit over all attempts.
    pub time_limit: Option<Duration>,
    /// Refuse instances outside `f <= floor((1 - eps) n / 2)`.
    pub strict: bool,
    /// Check the counting bounds on every state the solver passes through.
    pub check_claims: bool,
    /// Full rows to aim for; `None` means `t`. Status is still judged
    /// against `t`.
    pub target_rows: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            max_iterations: 100_000,
            depth_cap: None,
            q_cap: None,
            boost_rounds: None,
            max_idle_boosts: 3,
            restarts: 1,
            shuffle_first: false,
            time_limit: None,
            strict: false,
            check_claims: false,
            target_rows: None,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.q_cap == Some(0) || self.boost_rounds == Some(0) {
            return Err(Error::Precondition(
                "solver budgets must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ReachedT,
    Partial,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub attempts: usize,
    /// Attempt whose table was kept (0 is the first).
    pub kept_attempt: usize,
    pub iterations: usize,
    pub filled: usize,
    /// Moves in the kept log, by variant.
    pub move_counts: BTreeMap<String, usize>,
    pub direct_adds: usize,
    /// Improving cascades committed, by depth.
    pub cascades: BTreeMap<usize, usize>,
    pub cascade_searches: usize,
    /// Exhausted cascade searches of the kept attempt, latest last; at most
    /// `TRACE_LIMIT` kept.
    pub exhausted: Vec<CascadeTrace>,
    pub boosts: Vec<BoostReport>,
    pub stop: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claims: Option<ClaimTally>,
}

const TRACE_LIMIT: usize = 32;

#[derive(Clone, Debug)]
pub struct Solution<'a> {
    pub table: Table<'a>,
    pub full_rows: Vec<usize>,
    pub status: Status,
    pub stats: SolveStats,
}

struct Attempt<'a> {
    table: Table<'a>,
    stats: SolveStats,
}

/// One pass suffices: rows and columns only grow, so a cell that has no
/// direct add keeps having none.
fn direct_pass(
    t: &mut Table<'_>,
    order: &[usize],
    mut tally: Option<&mut ClaimTally>,
) -> Result<usize> {
    let mut added = 0;
    for &i in order {
        for b in 0..t.n() {
            if t.get(i, b).is_some() {
                continue;
            }
            if let Some(mv) = direct_add(t, i, b)? {
                t.commit(mv)?;
                added += 1;
                if let Some(tally) = tally.as_deref_mut() {
                    check_state(t, tally)?;
                }
            }
        }
    }
    Ok(added)
}

fn commit_improving(t: &mut Table<'_>, moves: Vec<Move>) -> Result<()> {
    let before = t.filled();
    for m in moves {
        t.commit(m).map_err(|e| {
            Error::AxiomViolation(format!("improving cascade failed to commit: {e}"))
        })?;
    }
    if t.filled() != before + 1 {
        return Err(Error::AxiomViolation(format!(
            "improving cascade changed the fill by {}",
            t.filled() as isize - before as isize
        )));
    }
    Ok(())
}

fn push_trace(stats: &mut SolveStats, trace: CascadeTrace) {
    if stats.exhausted.len() == TRACE_LIMIT {
        stats.exhausted.remove(0);
    }
    stats.exhausted.push(trace);
}

/// Tries an improving cascade from each row of `rows` in turn and commits
/// the first one found.
fn cascade_phase(
    t: &mut Table<'_>,
    rows: &[usize],
    cfg: &CascadeConfig,
    stats: &mut SolveStats,
    mut tally: Option<&mut ClaimTally>,
) -> Result<bool> {
    for &i in rows {
        if t.is_full(i) {
            continue;
        }
        stats.cascade_searches += 1;
        match run_cascade(t, i, cfg, tally.as_deref_mut())? {
            CascadeOutcome::Improving(c) => {
                *stats.cascades.entry(c.depth).or_default() += 1;
                commit_improving(t, c.moves)?;
                return Ok(true);
            }
            CascadeOutcome::Exhausted(trace) => push_trace(stats, trace),
        }
    }
    Ok(false)
}

struct Budget {
    started: Instant,
    limit: Option<Duration>,
}

impl Budget {
    fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.started.elapsed() >= l)
    }
}

fn attempt<'a>(
    inst: &'a Instance,
    cfg: &SolverConfig,
    order: Vec<usize>,
    budget: &Budget,
) -> Result<Attempt<'a>> {
    let target = cfg.target_rows.unwrap_or(inst.t()).min(inst.f);
    let growth = GrowthParams::for_instance(inst);
    let mut rank = vec![0; inst.f];
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k;
    }
    let ccfg = CascadeConfig {
        depth_cap: cfg.depth_cap.unwrap_or(inst.f.saturating_sub(1)),
        q_cap: cfg.q_cap.unwrap_or(10 * inst.n * inst.f),
        row_rank: rank,
    };
    let bparams = BoostParams {
        epsilon: growth.epsilon,
        d: growth.d,
        max_rounds: cfg.boost_rounds.unwrap_or(growth.d),
    };
    let can_boost = 2 * inst.f <= inst.n;

    let mut t = Table::new(inst);
    let mut stats = SolveStats::default();
    let mut tally = cfg.check_claims.then(ClaimTally::default);
    let mut idle_boosts = 0;

    stats.stop = loop {
        if stats.iterations >= cfg.max_iterations {
            break "iteration_budget".into();
        }
        if budget.expired() {
            break "time_limit".into();
        }
        stats.iterations += 1;
        let before = t.filled();
        if let Some(tally) = tally.as_mut() {
            check_state(&t, tally)?;
        }

        stats.direct_adds += direct_pass(&mut t, &order, tally.as_mut())?;
        if t.full_rows().len() >= target {
            break "reached_target".into();
        }

        if cascade_phase(&mut t, &order, &ccfg, &mut stats, tally.as_mut())? {
            idle_boosts = 0;
            continue;
        }
        if !can_boost {
            break "cascades_exhausted".into();
        }

        let report = boost(&mut t, &bparams)?;
        let seeded_row = match report.outcome {
            BoostOutcome::RowWithD { row } | BoostOutcome::PairWithD { row, .. } => Some(row),
            _ => None,
        };
        let stalled = report.outcome == BoostOutcome::Stalled;
        stats.boosts.push(report);
        if let Some(row) = seeded_row {
            cascade_phase(&mut t, &[row], &ccfg, &mut stats, tally.as_mut())?;
        }
        if t.filled() > before {
            idle_boosts = 0;
            continue;
        }
        if stalled {
            break "boost_stalled".into();
        }
        idle_boosts += 1;
        if idle_boosts > cfg.max_idle_boosts {
            break "boost_idle".into();
        }
    };
    stats.claims = tally;
    Ok(Attempt { table: t, stats })
}

fn score(t: &Table<'_>) -> (usize, usize) {
    (t.full_rows().len(), t.filled())
}

/// Runs the solver. The result always verifies; `status` says whether `t`
/// full rows were reached.
pub fn solve<'a>(inst: &'a Instance, cfg: &SolverConfig) -> Result<Solution<'a>> {
    cfg.validate()?;
    inst.validate()?;
    if cfg.strict && !inst.in_regime() {
        return Err(Error::Precondition(format!(
            "f = {} exceeds floor((1 - eps) n / 2) = {}",
            inst.f,
            inst.regime_rows()
        )));
    }
    let budget = Budget {
        started: Instant::now(),
        limit: cfg.time_limit,
    };
    let mut rng = rng(cfg.seed);
    let target = cfg.target_rows.unwrap_or(inst.t()).min(inst.f);
    let mut best: Option<Attempt<'a>> = None;
    let mut claims: Option<ClaimTally> = None;
    let mut attempts = 0;
    for k in 0..=cfg.restarts {
        let mut order: Vec<usize> = (0..inst.f).collect();
        if k > 0 || cfg.shuffle_first {
            order.shuffle(&mut rng);
        }
        let mut a = attempt(inst, cfg, order, &budget)?;
        attempts += 1;
        a.stats.kept_attempt = k;
        if let Some(c) = a.stats.claims.take() {
            claims.get_or_insert_with(ClaimTally::default).merge(&c);
        }
        let done = a.table.full_rows().len() >= target;
        if best
            .as_ref()
            .is_none_or(|b| score(&a.table) > score(&b.table))
        {
            best = Some(a);
        }
        if done || budget.expired() {
            break;
        }
    }
    let Attempt { table, mut stats } = best.expect("at least one attempt runs");
    stats.attempts = attempts;
    stats.filled = table.filled();
    stats.claims = claims;
    for m in table.log() {
        *stats
            .move_counts
            .entry(m.variant_name().to_string())
            .or_default() += 1;
    }
    let full_rows = table.full_rows();
    let status = if full_rows.len() >= inst.t() {
        Status::ReachedT
    } else {
        Status::Partial
    };
    Ok(Solution {
        table,
        full_rows,
        status,
        stats,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ClaimsReport {
    pub runs: usize,
    pub reached_t: usize,
    /// Cells left empty by the random walks.
    pub walk_blocked: usize,
    pub tally: ClaimTally,
}

/// Per seed, solves with every visited state checked against the counting
/// bounds, then checks the states of one random walk; sums the results.
pub fn claims_sweep(
    inst: &Instance,
    cfg: &SolverConfig,
    seeds: impl IntoIterator<Item = u64>,
) -> Result<ClaimsReport> {
    let mut report = ClaimsReport::default();
    for seed in seeds {
        let cfg = SolverConfig {
            seed,
            check_claims: true,
            shuffle_first: true,
            ..cfg.clone()
        };
        let sol = solve(inst, &cfg)?;
        report.runs += 1;
        report.reached_t += (sol.status == Status::ReachedT) as usize;
        if let Some(t) = &sol.stats.claims {
            report.tally.merge(t);
        }
        let walk = random_walk(inst, seed, &mut report.tally)?;
        report.walk_blocked += inst.f * inst.n - walk.filled();
    }
    Ok(report)
}
