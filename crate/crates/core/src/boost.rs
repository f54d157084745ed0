//! Raising the supply of removable positions when cascades run dry.
//!
//! Every row gets its own missing column `b_i` (distinct across rows), then
//! an auxiliary digraph on the rows is built: an arc `j -> i` whenever row
//! `j` holds more than `E` positions that are `(i, b_i)`-removable.
//! Transferring entries along vertex-disjoint out-stars empties cells in
//! the star centres while the leaves grow, concentrating the missing
//! entries until some row has many.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::max_matching;
use crate::swap::{direct_add, removable_positions, swappable_columns, RemovableRecord};
use crate::table::{Move, Table};

/// Column `b_i` per row, pairwise distinct, empty in every non-full row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MissingAssignment {
    pub cols: Vec<usize>,
}

impl MissingAssignment {
    /// Distinct columns, each empty in its row unless the row is full.
    pub fn is_valid(&self, t: &Table<'_>) -> bool {
        let mut seen = vec![false; t.n()];
        self.cols.len() == t.f()
            && self.cols.iter().enumerate().all(|(i, &b)| {
                b < t.n()
                    && !std::mem::replace(&mut seen[b], true)
                    && (t.is_full(i) || t.get(i, b).is_none())
            })
    }
}

#[derive(Clone, Debug)]
pub enum Assignment {
    Assigned(MissingAssignment),
    /// A cell can be filled directly; nothing was committed.
    Increase(Move),
}

fn require_half(t: &Table<'_>) -> Result<()> {
    if 2 * t.f() > t.n() {
        return Err(Error::Precondition(format!(
            "distinct missing columns need 2f <= n, got f = {}, n = {}",
            t.f(),
            t.n()
        )));
    }
    Ok(())
}

/// Gives every row a distinct missing column, committing simple swaps where
/// a row's empty cells are all taken by earlier rows.
pub fn assign_distinct_missing(t: &mut Table<'_>) -> Result<Assignment> {
    require_half(t)?;
    let mut used = vec![false; t.n()];
    let mut cols = Vec::with_capacity(t.f());
    for i in 0..t.f() {
        let free_empty = t.empty_cols(i).find(|&c| !used[c]);
        let b = if t.is_full(i) {
            (0..t.n())
                .find(|&c| !used[c])
                .expect("2f <= n leaves a free column")
        } else if let Some(c) = free_empty {
            c
        } else {
            let c = t.empty_cols(i).next().expect("row is not full");
            if let Some(mv) = direct_add(t, i, c)? {
                return Ok(Assignment::Increase(mv));
            }
            let Some((source, y)) = swappable_columns(t, i, c)?
                .into_iter()
                .find(|&(s, _)| !used[s])
            else {
                return Err(Error::Infeasible(format!(
                    "row {i} has no unused swappable column"
                )));
            };
            t.commit(Move::SimpleSwap {
                row: i,
                empty_col: c,
                source_col: source,
                witness: y,
                element: None,
            })?;
            source
        };
        used[b] = true;
        cols.push(b);
    }
    Ok(Assignment::Assigned(MissingAssignment { cols }))
}

/// Largest `E` in `[1, d - 1]` such that at least `max(1, ceil(M_E))` rows
/// miss `E` or more entries, `M_E = (eps / (4 d^2))^E n`. Returns `E` and
/// those rows.
pub fn compute_e(t: &Table<'_>, eps: f64, d: usize) -> Result<(usize, Vec<usize>)> {
    let missing: Vec<usize> = (0..t.f()).map(|i| t.missing(i)).collect();
    if missing.iter().all(|&m| m == 0) {
        return Err(Error::Precondition("every row is full".into()));
    }
    let top = d.saturating_sub(1).max(1);
    let base = eps / (4.0 * (d * d) as f64);
    let mut best = 1;
    for e in 1..=top {
        let threshold = (base.powi(e as i32) * t.n() as f64).ceil().max(1.0) as usize;
        if missing.iter().filter(|&&m| m >= e).count() >= threshold {
            best = e;
        }
    }
    let rows = (0..t.f()).filter(|&i| missing[i] >= best).collect();
    Ok((best, rows))
}

#[derive(Clone, Debug, Default)]
pub struct BoostDigraph {
    pub e: usize,
    /// Arcs `(j, i)`, sorted.
    pub arcs: Vec<(usize, usize)>,
    /// For each arc `(j, i)`, the `(i, b_i)`-removable records in row `j`.
    pub candidates: BTreeMap<(usize, usize), Vec<RemovableRecord>>,
    /// Per target row `i`, the largest number of `(i, b_i)`-removable
    /// positions held by one other row.
    pub best_source: Vec<Option<(usize, usize)>>,
    /// A move that fills a cell, found while scanning.
    pub increase: Option<Move>,
}

/// Computes every arc exhaustively from `removable_positions(i, b_i)`.
/// Stops early if a filling move turns up.
pub fn build_digraph(
    t: &Table<'_>,
    assignment: &MissingAssignment,
    e: usize,
) -> Result<BoostDigraph> {
    let mut g = BoostDigraph {
        e,
        best_source: vec![None; t.f()],
        ..Default::default()
    };
    for (i, &b) in assignment.cols.iter().enumerate() {
        if t.is_full(i) {
            continue;
        }
        let scan = removable_positions(t, i, b)?;
        if let Some(mv) = scan.increase {
            g.increase = Some(mv);
            return Ok(g);
        }
        let mut by_row: BTreeMap<usize, Vec<RemovableRecord>> = BTreeMap::new();
        for rec in scan.records {
            by_row.entry(rec.removed_row).or_default().push(rec);
        }
        g.best_source[i] = by_row
            .iter()
            .map(|(&j, recs)| (j, recs.len()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        if t.missing(i) < e {
            continue;
        }
        for (j, recs) in by_row {
            if recs.len() > e {
                g.arcs.push((j, i));
                g.candidates.insert((j, i), recs);
            }
        }
    }
    g.arcs.sort_unstable();
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutStar {
    pub centre: usize,
    pub leaves: Vec<usize>,
}

/// Greedy vertex-disjoint `k`-out-stars: repeatedly the lowest vertex with
/// `k` remaining out-neighbours, joined to its `k` lowest ones.
pub fn find_out_stars(vertices: usize, arcs: &[(usize, usize)], k: usize) -> Vec<OutStar> {
    assert!(k >= 1, "stars need at least one leaf");
    let mut alive = vec![true; vertices];
    let mut stars = Vec::new();
    loop {
        let found = (0..vertices).filter(|&v| alive[v]).find_map(|v| {
            let mut outs: Vec<usize> = arcs
                .iter()
                .filter(|&&(a, b)| a == v && b != v && alive[b])
                .map(|&(_, b)| b)
                .collect();
            outs.sort_unstable();
            outs.dedup();
            (outs.len() >= k).then(|| OutStar {
                centre: v,
                leaves: outs[..k].to_vec(),
            })
        });
        match found {
            None => return stars,
            Some(star) => {
                alive[star.centre] = false;
                for &l in &star.leaves {
                    alive[l] = false;
                }
                stars.push(star);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarResult {
    /// Number of leaves that received an entry from the centre.
    Moved(usize),
    /// A move filling a cell was found and committed.
    Increased,
}

/// Moves one entry of the centre row to each leaf, each from a different
/// column. The columns are chosen as a system of distinct representatives
/// over the arc candidates; a leaf whose chosen step no longer commits is
/// rescanned on the current table, and skipped if nothing fits.
pub fn apply_out_star(
    t: &mut Table<'_>,
    star: &OutStar,
    g: &BoostDigraph,
    assignment: &MissingAssignment,
) -> Result<StarResult> {
    let j = star.centre;
    let adj: Vec<Vec<usize>> = star
        .leaves
        .iter()
        .map(|&i| {
            g.candidates
                .get(&(j, i))
                .map(|recs| recs.iter().map(|r| r.add.col).collect())
                .unwrap_or_default()
        })
        .collect();
    let sdr = max_matching(&adj, t.n());
    if sdr.iter().any(Option::is_none) {
        return Err(Error::AxiomViolation(format!(
            "out-star at {j}: no distinct columns for leaves {:?}",
            star.leaves
        )));
    }
    let mut used: Vec<usize> = Vec::new();
    let mut moved = 0;
    for (&i, c) in star.leaves.iter().zip(sdr) {
        let c = c.expect("checked above");
        let planned = g.candidates[&(j, i)]
            .iter()
            .find(|r| r.add.col == c)
            .expect("matched column is a candidate");
        if !used.contains(&c) && t.commit(planned.to_move()).is_ok() {
            used.push(c);
            moved += 1;
            continue;
        }
        let b = assignment.cols[i];
        if t.get(i, b).is_some() {
            continue;
        }
        let scan = removable_positions(t, i, b)?;
        if let Some(mv) = scan.increase {
            t.commit(mv)?;
            return Ok(StarResult::Increased);
        }
        if let Some(rec) = scan
            .records
            .iter()
            .find(|r| r.removed_row == j && !used.contains(&r.add.col))
        {
            t.commit(rec.to_move())?;
            used.push(rec.add.col);
            moved += 1;
        }
    }
    Ok(StarResult::Moved(moved))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BoostOutcome {
    Increased,
    /// Row `row` misses at least `D` entries.
    RowWithD {
        row: usize,
    },
    /// Row `holder` holds at least `D` positions that are
    /// `(row, b_row)`-removable.
    PairWithD {
        row: usize,
        holder: usize,
    },
    /// Transfers happened but no terminal outcome within the round budget.
    Progressed,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoostEvent {
    pub round: usize,
    pub e: usize,
    pub arcs: usize,
    pub stars: usize,
    pub transfers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoostReport {
    pub outcome: BoostOutcome,
    pub events: Vec<BoostEvent>,
}

#[derive(Clone, Debug)]
pub struct BoostParams {
    pub epsilon: f64,
    pub d: usize,
    pub max_rounds: usize,
}

/// Runs E-raising rounds until a row misses `D` entries, a row holds `D`
/// removable positions for another, a cell can be filled, or progress stops.
/// The number of filled cells never decreases.
pub fn boost(t: &mut Table<'_>, params: &BoostParams) -> Result<BoostReport> {
    require_half(t)?;
    let mut events = Vec::new();
    let mut transfers_total = 0;
    let done = |outcome, events| Ok(BoostReport { outcome, events });
    for round in 0..params.max_rounds.max(1) {
        let assignment = match assign_distinct_missing(t)? {
            Assignment::Increase(mv) => {
                t.commit(mv)?;
                return done(BoostOutcome::Increased, events);
            }
            Assignment::Assigned(a) => a,
        };
        if let Some(row) = (0..t.f()).find(|&i| t.missing(i) >= params.d) {
            return done(BoostOutcome::RowWithD { row }, events);
        }
        let (e, _) = compute_e(t, params.epsilon, params.d)?;
        let g = build_digraph(t, &assignment, e)?;
        if let Some(mv) = g.increase.clone() {
            t.commit(mv)?;
            return done(BoostOutcome::Increased, events);
        }
        if let Some((row, (holder, _))) = g
            .best_source
            .iter()
            .enumerate()
            .find_map(|(i, s)| s.filter(|&(_, k)| k >= params.d).map(|s| (i, s)))
        {
            return done(BoostOutcome::PairWithD { row, holder }, events);
        }
        let stars = find_out_stars(t.f(), &g.arcs, e + 1);
        let mut transfers = 0;
        for star in &stars {
            match apply_out_star(t, star, &g, &assignment)? {
                StarResult::Increased => {
                    events.push(BoostEvent {
                        round,
                        e,
                        arcs: g.arcs.len(),
                        stars: stars.len(),
                        transfers,
                    });
                    return done(BoostOutcome::Increased, events);
                }
                StarResult::Moved(k) => transfers += k,
            }
        }
        events.push(BoostEvent {
            round,
            e,
            arcs: g.arcs.len(),
            stars: stars.len(),
            transfers,
        });
        transfers_total += transfers;
        if transfers == 0 {
            break;
        }
    }
    let outcome = if transfers_total > 0 {
        BoostOutcome::Progressed
    } else {
        BoostOutcome::Stalled
    };
    done(outcome, events)
}
