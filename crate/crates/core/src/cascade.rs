//! Cascading swaps.
//!
//! Starting from a row `i0` with an empty cell, level 0 collects every
//! position outside `i0` that one removal step can free. Each further level
//! picks the unused row holding the most of the current level's positions
//! and, from each of them (in the table the cascade leading there
//! produces), either finds a move that fills a cell outright, which makes
//! the whole chain an improving cascade, or collects the positions the next
//! removal step can free. A position's cascade is stored as its list of
//! removal steps, never as a table copy; snapshots are rebuilt on demand.
//! Within one cascade every step works in a column no earlier step used.

use serde::{Deserialize, Serialize};

use crate::claims::{self, ClaimTally};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::swap::removable_positions;
use crate::table::{Move, Table};

/// A position that a cascade can free, and the cascade that frees it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeEntry {
    pub pos: (usize, usize),
    /// Removal steps that, applied to the base table, empty `pos`.
    pub delta: Vec<Move>,
    /// Columns touched by the cascade, in order; pairwise distinct.
    pub cols_used: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeState {
    /// The distinct rows `i0, ..., il` chosen so far.
    pub rows: Vec<usize>,
    /// Cascade-removable positions outside `rows`, sorted by position.
    pub q: Vec<CascadeEntry>,
    /// `|Q|` after each level.
    pub q_sizes: Vec<usize>,
    /// Positions dropped by the Q cap.
    pub pruned: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovingCascade {
    /// Removal steps followed by one filling move; net effect is one more
    /// filled cell.
    pub moves: Vec<Move>,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub enum Extension {
    Next(CascadeState),
    Improving(ImprovingCascade),
    Exhausted,
}

/// Record of a cascade search that found nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeTrace {
    pub rows: Vec<usize>,
    pub q_sizes: Vec<usize>,
    pub pruned: usize,
}

#[derive(Clone, Debug)]
pub enum CascadeOutcome {
    Improving(ImprovingCascade),
    Exhausted(CascadeTrace),
}

#[derive(Clone, Debug)]
pub struct CascadeConfig {
    /// Number of levels beyond the first.
    pub depth_cap: usize,
    pub q_cap: usize,
    /// Preference rank per row for choosing the next row; lower wins ties.
    pub row_rank: Vec<usize>,
}

impl CascadeConfig {
    pub fn for_instance(inst: &Instance) -> Self {
        CascadeConfig {
            depth_cap: inst.f.saturating_sub(1),
            q_cap: 10 * inst.n * inst.f,
            row_rank: (0..inst.f).collect(),
        }
    }
}

fn cap(q: &mut Vec<CascadeEntry>, q_cap: usize) -> usize {
    q.sort_by_key(|e| e.pos);
    let dropped = q.len().saturating_sub(q_cap);
    q.truncate(q_cap);
    dropped
}

fn replay_delta<'a>(t: &Table<'a>, delta: &[Move]) -> Result<Table<'a>> {
    let mut snap = t.scratch();
    snap.commit_all(delta.iter().cloned())
        .map_err(|e| Error::AxiomViolation(format!("stored cascade no longer replays: {e}")))?;
    Ok(snap)
}

/// Level 0: every position outside row `i0` that a single removal step
/// from one of `i0`'s empty cells frees. A fill found on the way is
/// returned as a depth-0 improving cascade.
pub fn init_cascade(t: &Table<'_>, i0: usize, cfg: &CascadeConfig) -> Result<Extension> {
    let empties: Vec<usize> = t.empty_cols(i0).collect();
    if empties.is_empty() {
        return Err(Error::Precondition(format!("row {i0} has no empty cell")));
    }
    let mut q: Vec<CascadeEntry> = Vec::new();
    for b in empties {
        let scan = removable_positions(t, i0, b)?;
        if let Some(mv) = scan.increase {
            return Ok(Extension::Improving(ImprovingCascade {
                moves: vec![mv],
                depth: 0,
            }));
        }
        for rec in scan.records {
            if q.iter().any(|e| e.pos == rec.position()) {
                continue;
            }
            q.push(CascadeEntry {
                pos: rec.position(),
                delta: vec![rec.to_move()],
                cols_used: vec![b, rec.add.col],
            });
        }
    }
    let pruned = cap(&mut q, cfg.q_cap);
    Ok(Extension::Next(CascadeState {
        rows: vec![i0],
        q_sizes: vec![q.len()],
        q,
        pruned,
    }))
}

/// Moves one level deeper, or reports an improving cascade.
pub fn extend_cascade(
    t: &Table<'_>,
    state: &CascadeState,
    cfg: &CascadeConfig,
    mut tally: Option<&mut ClaimTally>,
) -> Result<Extension> {
    if state.q.is_empty() {
        return Ok(Extension::Exhausted);
    }
    let mut counts = vec![0usize; t.f()];
    for e in &state.q {
        counts[e.pos.0] += 1;
    }
    let next_row = (0..t.f())
        .filter(|r| !state.rows.contains(r) && counts[*r] > 0)
        .max_by(|&a, &b| {
            counts[a]
                .cmp(&counts[b])
                .then(cfg.row_rank[b].cmp(&cfg.row_rank[a]))
        });
    let Some(row) = next_row else {
        return Ok(Extension::Exhausted);
    };
    let mut rows = state.rows.clone();
    rows.push(row);

    let mut next: Vec<CascadeEntry> = Vec::new();
    for entry in state.q.iter().filter(|e| e.pos.0 == row) {
        let snap = replay_delta(t, &entry.delta)?;
        let col = entry.pos.1;
        let scan = removable_positions(&snap, row, col)?;
        if let Some(mv) = scan.increase {
            let mut moves = entry.delta.clone();
            moves.push(mv);
            return Ok(Extension::Improving(ImprovingCascade {
                moves,
                depth: rows.len() - 1,
            }));
        }
        if let Some(tally) = tally.as_deref_mut() {
            let removed = t
                .get(row, col)
                .expect("cascade positions are filled in the base table");
            claims::check_cascade_images(t, &snap, row, col, removed, tally)?;
        }
        for rec in scan.records {
            let pos = rec.position();
            if rows.contains(&pos.0) || entry.cols_used.contains(&rec.add.col) {
                continue;
            }
            if next.iter().any(|e| e.pos == pos) {
                continue;
            }
            let mut delta = entry.delta.clone();
            delta.push(rec.to_move());
            let mut cols_used = entry.cols_used.clone();
            cols_used.push(rec.add.col);
            next.push(CascadeEntry {
                pos,
                delta,
                cols_used,
            });
        }
    }
    let pruned = state.pruned + cap(&mut next, cfg.q_cap);
    let mut q_sizes = state.q_sizes.clone();
    q_sizes.push(next.len());
    Ok(Extension::Next(CascadeState {
        rows,
        q: next,
        q_sizes,
        pruned,
    }))
}

/// Searches for an improving cascade from row `i0`, up to `cfg.depth_cap`
/// levels beyond the first.
pub fn run_cascade(
    t: &Table<'_>,
    i0: usize,
    cfg: &CascadeConfig,
    mut tally: Option<&mut ClaimTally>,
) -> Result<CascadeOutcome> {
    let mut state = match init_cascade(t, i0, cfg)? {
        Extension::Improving(c) => return Ok(CascadeOutcome::Improving(c)),
        Extension::Next(s) => s,
        Extension::Exhausted => unreachable!("level 0 never reports exhaustion"),
    };
    for _ in 0..cfg.depth_cap {
        match extend_cascade(t, &state, cfg, tally.as_deref_mut())? {
            Extension::Improving(c) => return Ok(CascadeOutcome::Improving(c)),
            Extension::Exhausted => break,
            Extension::Next(s) => state = s,
        }
    }
    Ok(CascadeOutcome::Exhausted(CascadeTrace {
        rows: state.rows,
        q_sizes: state.q_sizes,
        pruned: state.pruned,
    }))
}

/// Smallest constant `C` for which
/// `C a^(l-1) / (1 - eps) - l - 1 >= C a^l`, `a = 1 + eps/2`, holds for
/// every `l >= 1`, together with the `l` attaining it.
///
/// The requirement at level `l` is `(l + 1) / (d a^(l-1))` with
/// `d = 1/(1 - eps) - a > 0`; the ratio grows while `l < 2/eps - 1` and
/// shrinks after, so a finite scan finds the maximum.
pub fn compute_c(eps: f64) -> (f64, usize) {
    assert!(eps > 0.0 && eps < 1.0, "epsilon must lie in (0, 1)");
    let a = 1.0 + eps / 2.0;
    let d = 1.0 / (1.0 - eps) - a;
    let last = (2.0 / eps).ceil() as usize + 1;
    let mut best = (f64::NEG_INFINITY, 0);
    for l in 1..=last.max(1) {
        let need = (l as f64 + 1.0) / (d * a.powi(l as i32 - 1));
        if need > best.0 {
            best = (need, l);
        }
    }
    best
}

/// Whether the growth inequality holds at level `l` for constant `c`,
/// checked after dividing both sides by `a^(l-1)` so large `l` stays finite.
pub fn growth_inequality_holds(c: f64, eps: f64, l: usize) -> bool {
    let a = 1.0 + eps / 2.0;
    let lhs = c / (1.0 - eps) - (l as f64 + 1.0) / a.powf(l as f64 - 1.0);
    let rhs = c * a;
    lhs >= rhs - 1e-9 * rhs.abs().max(1.0)
}

/// Constants of the growth argument for one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthParams {
    pub epsilon: f64,
    pub c: f64,
    pub c_argmax: usize,
    /// `ceil(2C + 4)`.
    pub d: usize,
    /// `min(f - 1, floor(eps n / 4))`, the range the growth estimate covers.
    pub estimate_depth: usize,
}

impl GrowthParams {
    pub fn for_instance(inst: &Instance) -> Self {
        let eps = *inst.epsilon.numer() as f64 / *inst.epsilon.denom() as f64;
        let (c, c_argmax) = compute_c(eps);
        let quarter = (inst.epsilon * num_rational::Ratio::from_integer(inst.n as u64)
            / num_rational::Ratio::from_integer(4))
        .floor()
        .to_integer() as usize;
        GrowthParams {
            epsilon: eps,
            c,
            c_argmax,
            d: (2.0 * c + 4.0).ceil() as usize,
            estimate_depth: inst.f.saturating_sub(1).min(quarter),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceLevel {
    pub level: usize,
    pub q_prev: usize,
    pub q: usize,
    /// `q_prev / (f - l) * (n - f - l) - (l + 1) n`.
    pub bound: f64,
    pub held: bool,
    /// The bound is not positive, so the level says nothing.
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub levels: Vec<RecurrenceLevel>,
    /// `|Q_0| >= C n` or `|Q_1| >= C n`.
    pub estimate_premise: bool,
    /// Levels `1..=estimate_depth` where `|Q_l| >= C (1 + eps/2)^(l-1) n` failed.
    pub estimate_failures: Vec<usize>,
}

impl RecurrenceReport {
    pub fn violations(&self) -> impl Iterator<Item = &RecurrenceLevel> {
        self.levels.iter().filter(|l| !l.held)
    }
}

/// Compares a trace of `|Q|` sizes against the one-level growth bound. The
/// bound is only promised when no fill was available, and at small sizes
/// it is usually negative; this reports, it does not assert.
pub fn check_recurrence(
    q_sizes: &[usize],
    params: &GrowthParams,
    n: usize,
    f: usize,
) -> RecurrenceReport {
    let mut levels = Vec::new();
    for l in 1..q_sizes.len() {
        if f <= l {
            break;
        }
        let bound = q_sizes[l - 1] as f64 / (f - l) as f64 * (n as f64 - f as f64 - l as f64)
            - ((l + 1) * n) as f64;
        levels.push(RecurrenceLevel {
            level: l,
            q_prev: q_sizes[l - 1],
            q: q_sizes[l],
            bound,
            held: q_sizes[l] as f64 >= bound,
            trivial: bound <= 0.0,
        });
    }
    let cn = params.c * n as f64;
    let estimate_premise = q_sizes.first().is_some_and(|&q| q as f64 >= cn)
        || q_sizes.get(1).is_some_and(|&q| q as f64 >= cn);
    let estimate_failures = if estimate_premise {
        (1..q_sizes.len().min(params.estimate_depth + 1))
            .filter(|&l| (q_sizes[l] as f64) < cn * (1.0 + params.epsilon / 2.0).powi(l as i32 - 1))
            .collect()
    } else {
        Vec::new()
    };
    RecurrenceReport {
        levels,
        estimate_premise,
        estimate_failures,
    }
}
