//! Local progress at an empty cell `(i, b)`: direct additions, simple swaps,
//! addable elements, removable positions, and the matching injection.
//!
//! Every search here is exhaustive over its index range and keeps the
//! lowest-id witness, so results are deterministic. Candidates are judged
//! by the state the corresponding move would produce: the swap's row, the
//! witness column `C_b + y`, and, for removals, the post-swap column
//! `C_c - T(i, c) + x - T(j, c)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::max_matching;
use crate::matroid::{ElementId, ElementSet};
use crate::table::{Move, RemovalStep, Table};

/// An element `x` of `B(i, c)` that can enter row `i` while `(i, b)` is empty.
///
/// Without a witness `(i, c)` is empty and `x` goes straight in. With a
/// witness `y`, `y` fills `(i, b)` and `x` replaces `displaced = T(i, c)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AddableRecord {
    pub row: usize,
    pub empty_col: usize,
    pub col: usize,
    pub element: ElementId,
    pub witness: Option<ElementId>,
    pub displaced: Option<ElementId>,
}

impl AddableRecord {
    /// The move placing `element` at `(row, col)` without removing anything.
    /// Valid only when the column can take it.
    pub fn to_move(&self) -> Move {
        match self.witness {
            None => Move::PlaceDirect {
                row: self.row,
                col: self.col,
                element: self.element,
            },
            Some(y) => Move::SimpleSwap {
                row: self.row,
                empty_col: self.empty_col,
                source_col: self.col,
                witness: y,
                element: Some(self.element),
            },
        }
    }
}

/// An addable element together with the entry of column `col` it evicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemovableRecord {
    pub add: AddableRecord,
    pub removed_row: usize,
    pub removed: ElementId,
}

impl RemovableRecord {
    pub fn position(&self) -> (usize, usize) {
        (self.removed_row, self.add.col)
    }

    pub fn to_step(&self) -> RemovalStep {
        RemovalStep {
            row: self.add.row,
            empty_col: self.add.empty_col,
            col: self.add.col,
            element: self.add.element,
            witness: self.add.witness,
            removed_row: self.removed_row,
        }
    }

    pub fn to_move(&self) -> Move {
        Move::RemovalStep(self.to_step())
    }
}

#[derive(Clone, Debug, Default)]
pub struct AddableScan {
    pub records: Vec<AddableRecord>,
    /// A witness `y` with `S_i + y` independent: `y` can simply be placed at `(i, b)`.
    pub bonus: Option<Move>,
}

#[derive(Clone, Debug, Default)]
pub struct RemovableScan {
    /// One record per removable position (lowest-id element), ordered by
    /// `(removed_row, col)`.
    pub records: Vec<RemovableRecord>,
    /// First move found that fills a cell without emptying another.
    pub increase: Option<Move>,
}

fn require_empty(t: &Table<'_>, row: usize, col: usize) -> Result<()> {
    if t.get(row, col).is_some() {
        return Err(Error::Precondition(format!(
            "cell ({row}, {col}) is not empty"
        )));
    }
    Ok(())
}

/// Lowest-id `x` in `B(i, b)` with `S_i + x` and `C_b + x` independent.
pub fn direct_add(t: &Table<'_>, row: usize, col: usize) -> Result<Option<Move>> {
    require_empty(t, row, col)?;
    let m = &t.instance().matroid;
    let row_probe = m.probe_of(t.row_set(row).iter()).expect("valid table row");
    let col_probe = m
        .probe_of(t.col_set(col).iter())
        .expect("valid table column");
    Ok(t.instance()
        .basis(row, col)
        .iter()
        .find(|&x| row_probe.accepts(x) && col_probe.accepts(x))
        .map(|element| Move::PlaceDirect { row, col, element }))
}

/// Columns `c` with `(i, c)` filled for which some `y` in `B(i, b)` keeps
/// `C_b + y` and `S_i - T(i, c) + y` independent, with the lowest such `y`.
pub fn swappable_columns(
    t: &Table<'_>,
    row: usize,
    empty_col: usize,
) -> Result<Vec<(usize, ElementId)>> {
    require_empty(t, row, empty_col)?;
    let m = &t.instance().matroid;
    let col_probe = m
        .probe_of(t.col_set(empty_col).iter())
        .expect("valid table column");
    let witnesses: Vec<ElementId> = t
        .instance()
        .basis(row, empty_col)
        .iter()
        .filter(|&y| col_probe.accepts(y))
        .collect();
    let mut out = Vec::new();
    for c in 0..t.n() {
        let Some(displaced) = t.get(row, c) else {
            continue;
        };
        let probe = m
            .probe_of(t.row_set(row).iter().filter(|&x| x != displaced))
            .expect("subset of an independent row");
        if let Some(&y) = witnesses.iter().find(|&&y| probe.accepts(y)) {
            out.push((c, y));
        }
    }
    Ok(out)
}

/// All `(i, b)`-addable elements of `B(i, c)`, each with its lowest witness.
pub fn addable_elements(
    t: &Table<'_>,
    row: usize,
    empty_col: usize,
    col: usize,
) -> Result<AddableScan> {
    require_empty(t, row, empty_col)?;
    let inst = t.instance();
    let m = &inst.matroid;
    let row_probe = m.probe_of(t.row_set(row).iter()).expect("valid table row");
    let mut scan = AddableScan::default();

    match t.get(row, col) {
        None => {
            let col_probe = m
                .probe_of(t.col_set(col).iter())
                .expect("valid table column");
            scan.records = inst
                .basis(row, col)
                .iter()
                .filter(|&x| row_probe.accepts(x) && col_probe.accepts(x))
                .map(|x| AddableRecord {
                    row,
                    empty_col,
                    col,
                    element: x,
                    witness: None,
                    displaced: None,
                })
                .collect();
        }
        Some(displaced) => {
            let witness_col = m
                .probe_of(t.col_set(empty_col).iter())
                .expect("valid table column");
            let candidates = inst.basis(row, col);
            let mut found: Vec<Option<ElementId>> = vec![None; candidates.len()];
            let without = m
                .probe_of(t.row_set(row).iter().filter(|&x| x != displaced))
                .expect("subset of an independent row");
            for y in inst.basis(row, empty_col).iter() {
                if !witness_col.accepts(y) {
                    continue;
                }
                let mut swapped = without.clone();
                if !swapped.insert(y) {
                    continue;
                }
                if scan.bonus.is_none() && row_probe.accepts(y) {
                    scan.bonus = Some(Move::PlaceDirect {
                        row,
                        col: empty_col,
                        element: y,
                    });
                }
                for (slot, x) in found.iter_mut().zip(candidates.iter()) {
                    if slot.is_none() && swapped.accepts(x) {
                        *slot = Some(y);
                    }
                }
                if found.iter().all(Option::is_some) {
                    break;
                }
            }
            scan.records = candidates
                .iter()
                .zip(found)
                .filter_map(|(x, y)| {
                    y.map(|y| AddableRecord {
                        row,
                        empty_col,
                        col,
                        element: x,
                        witness: Some(y),
                        displaced: Some(displaced),
                    })
                })
                .collect();
        }
    }
    Ok(scan)
}

/// Every position `(j, c)` with `j != i` whose entry can be evicted by
/// placing an `(i, b)`-addable element of `B(i, c)` at `(i, c)`.
///
/// If some addable element fits into its column without evicting anything,
/// that move is reported in `increase` instead of producing removals for
/// its column.
pub fn removable_positions(t: &Table<'_>, row: usize, empty_col: usize) -> Result<RemovableScan> {
    require_empty(t, row, empty_col)?;
    let m = &t.instance().matroid;
    let mut out = RemovableScan::default();
    if let Some(mv) = direct_add(t, row, empty_col)? {
        out.increase = Some(mv);
    }
    for c in 0..t.n() {
        let scan = addable_elements(t, row, empty_col, c)?;
        if out.increase.is_none() {
            out.increase = scan.bonus.clone();
        }
        let Some(displaced) = t.get(row, c) else {
            // case without a swap: every addable x already fits its column
            if out.increase.is_none() {
                out.increase = scan.records.first().map(AddableRecord::to_move);
            }
            continue;
        };
        if scan.records.is_empty() {
            continue;
        }
        let post_swap: Vec<ElementId> = t.col_set(c).iter().filter(|&y| y != displaced).collect();
        let post_probe = m
            .probe_of(post_swap.iter().copied())
            .expect("subset of an independent column");
        if let Some(rec) = scan.records.iter().find(|r| post_probe.accepts(r.element)) {
            if out.increase.is_none() {
                out.increase = Some(rec.to_move());
            }
            continue;
        }
        for j in 0..t.f() {
            if j == row {
                continue;
            }
            let Some(evicted) = t.get(j, c) else { continue };
            let probe = m
                .probe_of(post_swap.iter().copied().filter(|&y| y != evicted))
                .expect("subset of an independent column");
            if let Some(rec) = scan.records.iter().find(|r| probe.accepts(r.element)) {
                out.records.push(RemovableRecord {
                    add: rec.clone(),
                    removed_row: j,
                    removed: evicted,
                });
            }
        }
    }
    out.records.sort_by_key(|r| r.position());
    Ok(out)
}

/// An injection `phi: S_i -> B(i, c)` with `S_i - x + phi(x)` independent
/// for every `x`, found by maximum bipartite matching. Pairs are listed in
/// increasing order of `x`.
pub fn matching_injection(
    t: &Table<'_>,
    row: usize,
    col: usize,
) -> Result<Vec<(ElementId, ElementId)>> {
    let inst = t.instance();
    let m = &inst.matroid;
    let left: Vec<ElementId> = t.row_set(row).iter().collect();
    let right: Vec<ElementId> = inst.basis(row, col).iter().collect();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&x| {
            let probe = m
                .probe_of(left.iter().copied().filter(|&z| z != x))
                .expect("subset of an independent row");
            (0..right.len())
                .filter(|&k| probe.accepts(right[k]))
                .collect()
        })
        .collect();
    let matched = max_matching(&adj, right.len());
    left.iter()
        .zip(matched)
        .map(|(&x, r)| {
            r.map(|r| (x, right[r])).ok_or_else(|| {
                Error::AxiomViolation(format!(
                    "no matching covers row {row} into B({row}, {col}) at element {x}"
                ))
            })
        })
        .collect()
}

/// Checks that `phi` is an injection of `S_i` into `B(i, c)` with the
/// exchange property. Used by tests and the claim sweep.
pub fn check_injection(
    t: &Table<'_>,
    row: usize,
    col: usize,
    phi: &[(ElementId, ElementId)],
) -> bool {
    let m = &t.instance().matroid;
    let s = t.row_set(row);
    let images: ElementSet = phi.iter().map(|&(_, y)| y).collect();
    phi.len() == s.len()
        && images.len() == phi.len()
        && phi.iter().all(|&(x, y)| {
            s.contains(x)
                && t.instance().basis(row, col).contains(y)
                && m.independent_ids(s.iter().filter(|&z| z != x).chain(std::iter::once(y)))
        })
}
