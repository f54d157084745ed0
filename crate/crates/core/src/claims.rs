//! Runtime checks of the counting bounds behind the swap engine.
//!
//! Each check runs the exhaustive swap-engine queries on a reachable table
//! and compares the counts with the lower bounds they must meet. Results
//! accumulate in a [`ClaimTally`]; nothing here mutates the table.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::generate::rng;
use crate::instance::Instance;
use crate::matroid::ElementId;
use crate::swap::{
    addable_elements, check_injection, direct_add, matching_injection, removable_positions,
    swappable_columns,
};
use crate::table::{Move, Table};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counter {
    pub checks: u64,
    pub violations: u64,
}

impl Counter {
    fn record(&mut self, ok: bool) -> bool {
        self.checks += 1;
        if !ok {
            self.violations += 1;
        }
        ok
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimTally {
    pub states: u64,
    pub cells: u64,
    /// At least `n - |C_b|` swappable columns when no direct add exists.
    pub many_good: Counter,
    /// Every element of a swappable column's basis that extends `S_i` is addable.
    pub add_if_good: Counter,
    /// `r` addable elements, none fitting the column, give `r` removable positions.
    pub removability: Counter,
    /// `(n - |S_i|)(n - |C_b|)` removable positions when nothing fills a cell.
    pub one_addability: Counter,
    /// An exchange injection `S_i -> B(i, c)` exists.
    pub matching: Counter,
    /// Injection images stay addable in cascade snapshots.
    pub cascade_phi: Counter,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_violation: Option<String>,
}

impl ClaimTally {
    pub fn violations(&self) -> u64 {
        self.counters().iter().map(|(_, c)| c.violations).sum()
    }

    pub fn checks(&self) -> u64 {
        self.counters().iter().map(|(_, c)| c.checks).sum()
    }

    pub fn counters(&self) -> [(&'static str, Counter); 6] {
        [
            ("many_good", self.many_good),
            ("add_if_good", self.add_if_good),
            ("removability", self.removability),
            ("one_addability", self.one_addability),
            ("matching", self.matching),
            ("cascade_phi", self.cascade_phi),
        ]
    }

    pub fn merge(&mut self, other: &ClaimTally) {
        self.states += other.states;
        self.cells += other.cells;
        for (dst, src) in [
            (&mut self.many_good, other.many_good),
            (&mut self.add_if_good, other.add_if_good),
            (&mut self.removability, other.removability),
            (&mut self.one_addability, other.one_addability),
            (&mut self.matching, other.matching),
            (&mut self.cascade_phi, other.cascade_phi),
        ] {
            dst.checks += src.checks;
            dst.violations += src.violations;
        }
        if self.first_violation.is_none() {
            self.first_violation.clone_from(&other.first_violation);
        }
    }

    fn note(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.first_violation.is_none() {
            self.first_violation = Some(what());
        }
    }
}

impl fmt::Display for ClaimTally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} states, {} cells", self.states, self.cells)?;
        for (name, c) in self.counters() {
            write!(f, "; {name} {}/{}", c.checks - c.violations, c.checks)?;
        }
        Ok(())
    }
}

/// Checks every bound at the empty cell `(row, b)`.
pub fn check_cell(t: &Table<'_>, row: usize, b: usize, tally: &mut ClaimTally) -> Result<()> {
    tally.cells += 1;
    let n = t.n();
    let m = &t.instance().matroid;
    let col_len = t.col_set(b).len();
    let row_len = t.row_len(row);

    if direct_add(t, row, b)?.is_some() {
        return Ok(());
    }

    let swappable = swappable_columns(t, row, b)?;
    let ok = tally.many_good.record(swappable.len() + col_len >= n);
    tally.note(ok, || {
        format!(
            "many_good at ({row}, {b}): {} swappable columns, need {}",
            swappable.len(),
            n - col_len
        )
    });

    let row_probe = m.probe_of(t.row_set(row).iter()).expect("valid table row");
    for &(c, y) in &swappable {
        let scan = addable_elements(t, row, b, c)?;
        if row_probe.accepts(y) {
            continue;
        }
        for x in t
            .instance()
            .basis(row, c)
            .iter()
            .filter(|&x| row_probe.accepts(x))
        {
            let ok = tally
                .add_if_good
                .record(scan.records.iter().any(|r| r.element == x));
            tally.note(ok, || {
                format!("add_if_good at ({row}, {b}): element {x} of column {c} not addable")
            });
        }
    }

    let removable = removable_positions(t, row, b)?;
    for c in 0..n {
        let Some(displaced) = t.get(row, c) else {
            continue;
        };
        let scan = addable_elements(t, row, b, c)?;
        if scan.records.is_empty() {
            continue;
        }
        let post = m
            .probe_of(t.col_set(c).iter().filter(|&y| y != displaced))
            .expect("subset of an independent column");
        if scan.records.iter().any(|r| post.accepts(r.element)) {
            continue;
        }
        let found = removable.records.iter().filter(|r| r.add.col == c).count();
        let r = scan.records.len();
        let ok = tally.removability.record(found >= r);
        tally.note(ok, || {
            format!("removability at ({row}, {b}) column {c}: {found} positions for {r} addable")
        });
    }

    if removable.increase.is_none() {
        let need = (n - row_len) * (n - col_len);
        let found = removable.records.len();
        let ok = tally.one_addability.record(found >= need);
        tally.note(ok, || {
            format!("one_addability at ({row}, {b}): {found} positions, need {need}")
        });
    }
    Ok(())
}

/// Checks every empty cell and every row injection of a table.
pub fn check_state(t: &Table<'_>, tally: &mut ClaimTally) -> Result<()> {
    tally.states += 1;
    for row in 0..t.f() {
        for c in 0..t.n() {
            let ok =
                matching_injection(t, row, c).is_ok_and(|phi| check_injection(t, row, c, &phi));
            tally.matching.record(ok);
            tally.note(ok, || {
                format!("matching: no injection for row {row} into column {c}")
            });
        }
        let empties: Vec<usize> = t.empty_cols(row).collect();
        for b in empties {
            check_cell(t, row, b, tally)?;
        }
    }
    Ok(())
}

/// In a cascade snapshot `snap`, where `(row, col)` was emptied by removing
/// `removed` from the base table `t`, the injection image of `removed` into
/// each swappable column must be addable unless the witness alone fills
/// the cell.
pub fn check_cascade_images(
    t: &Table<'_>,
    snap: &Table<'_>,
    row: usize,
    col: usize,
    removed: ElementId,
    tally: &mut ClaimTally,
) -> Result<()> {
    if snap.row_set(row) != &t.row_set(row).without(removed) {
        return Ok(());
    }
    let m = &t.instance().matroid;
    let row_probe = m
        .probe_of(snap.row_set(row).iter())
        .expect("valid table row");
    for (c, y) in swappable_columns(snap, row, col)? {
        if row_probe.accepts(y) {
            continue;
        }
        let phi = match matching_injection(t, row, c) {
            Ok(phi) => phi,
            Err(_) => {
                tally.cascade_phi.record(false);
                tally.note(false, || {
                    format!("cascade_phi: no injection for row {row} into column {c}")
                });
                continue;
            }
        };
        let Some(&(_, image)) = phi.iter().find(|&&(x, _)| x == removed) else {
            continue;
        };
        let scan = addable_elements(snap, row, col, c)?;
        let ok = tally
            .cascade_phi
            .record(scan.records.iter().any(|r| r.element == image));
        tally.note(ok, || {
            format!("cascade_phi at ({row}, {col}): image {image} in column {c} not addable")
        });
    }
    Ok(())
}

/// Fills cells in random order with random direct adds until no cell
/// admits one, checking every state on the way. Random choices run into
/// blocked cells far more often than the solver's lowest-id greedy does.
/// Returns the final table.
pub fn random_walk<'a>(inst: &'a Instance, seed: u64, tally: &mut ClaimTally) -> Result<Table<'a>> {
    let mut rng = rng(seed);
    let mut t = Table::new(inst);
    check_state(&t, tally)?;
    loop {
        let mut cells: Vec<(usize, usize)> = (0..t.f())
            .flat_map(|i| (0..t.n()).map(move |b| (i, b)))
            .filter(|&(i, b)| t.get(i, b).is_none())
            .collect();
        cells.shuffle(&mut rng);
        let m = &inst.matroid;
        let next = cells.into_iter().find_map(|(i, b)| {
            let row = m.probe_of(t.row_set(i).iter()).expect("valid table row");
            let col = m.probe_of(t.col_set(b).iter()).expect("valid table column");
            let options: Vec<_> = inst
                .basis(i, b)
                .iter()
                .filter(|&x| row.accepts(x) && col.accepts(x))
                .collect();
            (!options.is_empty()).then(|| Move::PlaceDirect {
                row: i,
                col: b,
                element: options[rng.gen_range(0..options.len())],
            })
        });
        match next {
            None => return Ok(t),
            Some(mv) => {
                t.commit(mv)?;
                check_state(&t, tally)?;
            }
        }
    }
}
