//! The partially filled `f x n` table and its validated moves.
//!
//! A table is only ever changed through [`Table::commit`], which applies a
//! [`Move`] all-or-nothing and re-checks, on every row and column the move
//! touches, that
//!
//! * V1: a filled cell `(i, j)` holds an element of `B(i, j)`;
//! * V2: every row's entries are independent;
//! * V3: every column's entries are independent;
//! * V4: the derived row/column sets agree with the cells.
//!
//! The committed moves form a log (V5: replaying it from the empty table
//! reproduces the cells), which is what solution files store.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matroid::{ElementId, ElementSet};

/// One removal in a cascade: fill row `row` (which has `empty_col` empty) by
/// placing `element` in column `col` and, if `witness` is set, moving the
/// current `(row, col)` entry out in favour of `witness` at `(row,
/// empty_col)`. The entry at `(removed_row, col)` is cleared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalStep {
    pub row: usize,
    pub empty_col: usize,
    pub col: usize,
    pub element: ElementId,
    pub witness: Option<ElementId>,
    pub removed_row: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// Fill the empty cell `(row, col)` with `element`.
    PlaceDirect {
        row: usize,
        col: usize,
        element: ElementId,
    },
    /// Fill the empty `(row, empty_col)` with `witness` and clear
    /// `(row, source_col)`, or overwrite it with `element` when given.
    SimpleSwap {
        row: usize,
        empty_col: usize,
        source_col: usize,
        witness: ElementId,
        element: Option<ElementId>,
    },
    RemovalStep(RemovalStep),
    /// Several removal steps applied as one transaction.
    Transfer {
        steps: Vec<RemovalStep>,
    },
}

impl Move {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Move::PlaceDirect { .. } => "place_direct",
            Move::SimpleSwap { .. } => "simple_swap",
            Move::RemovalStep(_) => "removal_step",
            Move::Transfer { .. } => "transfer",
        }
    }

    /// Change in the number of filled cells this move causes.
    pub fn fill_delta(&self) -> isize {
        match self {
            Move::PlaceDirect { .. } => 1,
            Move::SimpleSwap { element, .. } => element.is_some() as isize,
            Move::RemovalStep(_) | Move::Transfer { .. } => 0,
        }
    }
}

/// Pending cell edits of a move that has not been committed yet.
struct Overlay<'t, 'a> {
    table: &'t Table<'a>,
    edits: Vec<((usize, usize), Option<ElementId>)>,
}

impl Overlay<'_, '_> {
    fn get(&self, r: usize, c: usize) -> Option<ElementId> {
        self.edits
            .iter()
            .rev()
            .find(|(p, _)| *p == (r, c))
            .map_or_else(|| self.table.get(r, c), |(_, v)| *v)
    }

    fn set(&mut self, r: usize, c: usize, v: Option<ElementId>) {
        self.edits.push(((r, c), v));
    }
}

fn reject(invariant: &'static str, row: usize, col: usize, reason: impl Into<String>) -> Error {
    Error::RejectedMove {
        invariant,
        row,
        col,
        reason: reason.into(),
    }
}

#[derive(Clone, Debug)]
pub struct Table<'a> {
    inst: &'a Instance,
    cells: Vec<Option<ElementId>>,
    rows: Vec<ElementSet>,
    cols: Vec<ElementSet>,
    filled: usize,
    log: Vec<Move>,
}

impl<'a> Table<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Table {
            inst,
            cells: vec![None; inst.f * inst.n],
            rows: vec![ElementSet::new(); inst.f],
            cols: vec![ElementSet::new(); inst.n],
            filled: 0,
            log: Vec::new(),
        }
    }

    /// Builds a table from raw cells and a log without validating either;
    /// [`verify`] reports what is wrong with it.
    pub fn from_parts(
        inst: &'a Instance,
        grid: &[Vec<Option<ElementId>>],
        log: Vec<Move>,
    ) -> Result<Self> {
        if grid.len() != inst.f || grid.iter().any(|r| r.len() != inst.n) {
            return Err(Error::Schema(format!(
                "table must be {} x {}",
                inst.f, inst.n
            )));
        }
        let mut t = Table::new(inst);
        for (i, row) in grid.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t.cells[i * inst.n + j] = v;
            }
        }
        t.rebuild_sets();
        t.log = log;
        Ok(t)
    }

    /// Commits every move of `log` in order, starting from the empty table.
    pub fn replay(inst: &'a Instance, log: &[Move]) -> Result<Self> {
        let mut t = Table::new(inst);
        for m in log {
            t.commit(m.clone())?;
        }
        Ok(t)
    }

    fn rebuild_sets(&mut self) {
        let (f, n) = (self.inst.f, self.inst.n);
        self.rows = (0..f)
            .map(|i| (0..n).filter_map(|j| self.get(i, j)).collect())
            .collect();
        self.cols = (0..n)
            .map(|j| (0..f).filter_map(|i| self.get(i, j)).collect())
            .collect();
        self.filled = self.cells.iter().filter(|c| c.is_some()).count();
    }

    /// Copy of the current state with an empty log, for exploring moves.
    pub fn scratch(&self) -> Self {
        Table {
            inst: self.inst,
            cells: self.cells.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            filled: self.filled,
            log: Vec::new(),
        }
    }

    #[inline]
    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inst.n
    }

    #[inline]
    pub fn f(&self) -> usize {
        self.inst.f
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<ElementId> {
        self.cells[row * self.inst.n + col]
    }

    /// Entries of row `i` (the set S_i).
    #[inline]
    pub fn row_set(&self, row: usize) -> &ElementSet {
        &self.rows[row]
    }

    /// Entries of column `j` (the set C_j).
    #[inline]
    pub fn col_set(&self, col: usize) -> &ElementSet {
        &self.cols[col]
    }

    /// Number of filled cells, |U|.
    #[inline]
    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn row_len(&self, row: usize) -> usize {
        (0..self.inst.n)
            .filter(|&c| self.get(row, c).is_some())
            .count()
    }

    pub fn missing(&self, row: usize) -> usize {
        self.inst.n - self.row_len(row)
    }

    pub fn empty_cols(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.inst.n).filter(move |&c| self.get(row, c).is_none())
    }

    pub fn is_full(&self, row: usize) -> bool {
        self.row_len(row) == self.inst.n
    }

    /// Rows whose entries form a basis.
    pub fn full_rows(&self) -> Vec<usize> {
        (0..self.inst.f).filter(|&i| self.is_full(i)).collect()
    }

    pub fn log(&self) -> &[Move] {
        &self.log
    }

    pub fn grid(&self) -> Vec<Vec<Option<ElementId>>> {
        (0..self.inst.f)
            .map(|i| (0..self.inst.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    fn check_pos(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.inst.f || col >= self.inst.n {
            return Err(reject("structure", row, col, "position outside the table"));
        }
        Ok(())
    }

    fn plan_removal(&self, ov: &mut Overlay<'_, 'a>, s: &RemovalStep) -> Result<()> {
        self.check_pos(s.row, s.empty_col)?;
        self.check_pos(s.removed_row, s.col)?;
        if s.removed_row == s.row {
            return Err(reject(
                "structure",
                s.row,
                s.col,
                "removal must clear a different row",
            ));
        }
        if ov.get(s.row, s.empty_col).is_some() {
            return Err(reject(
                "structure",
                s.row,
                s.empty_col,
                "target cell is not empty",
            ));
        }
        if ov.get(s.removed_row, s.col).is_none() {
            return Err(reject(
                "structure",
                s.removed_row,
                s.col,
                "removed cell is already empty",
            ));
        }
        match s.witness {
            Some(y) => {
                if ov.get(s.row, s.col).is_none() {
                    return Err(reject(
                        "structure",
                        s.row,
                        s.col,
                        "swap source cell is empty",
                    ));
                }
                ov.set(s.row, s.empty_col, Some(y));
            }
            None => {
                if s.col != s.empty_col && ov.get(s.row, s.col).is_some() {
                    return Err(reject(
                        "structure",
                        s.row,
                        s.col,
                        "cell is filled and no witness given",
                    ));
                }
            }
        }
        ov.set(s.row, s.col, Some(s.element));
        ov.set(s.removed_row, s.col, None);
        Ok(())
    }

    fn plan(&self, ov: &mut Overlay<'_, 'a>, m: &Move) -> Result<()> {
        match m {
            &Move::PlaceDirect { row, col, element } => {
                self.check_pos(row, col)?;
                if ov.get(row, col).is_some() {
                    return Err(reject("structure", row, col, "cell is already filled"));
                }
                ov.set(row, col, Some(element));
            }
            &Move::SimpleSwap {
                row,
                empty_col,
                source_col,
                witness,
                element,
            } => {
                self.check_pos(row, empty_col)?;
                self.check_pos(row, source_col)?;
                if ov.get(row, empty_col).is_some() {
                    return Err(reject(
                        "structure",
                        row,
                        empty_col,
                        "swap target is not empty",
                    ));
                }
                if ov.get(row, source_col).is_none() {
                    return Err(reject("structure", row, source_col, "swap source is empty"));
                }
                ov.set(row, empty_col, Some(witness));
                ov.set(row, source_col, element);
            }
            Move::RemovalStep(s) => self.plan_removal(ov, s)?,
            Move::Transfer { steps } => {
                if steps.is_empty() {
                    return Err(reject("structure", 0, 0, "empty transfer"));
                }
                for s in steps {
                    self.plan_removal(ov, s)?;
                }
            }
        }
        Ok(())
    }

    /// Validates `m` against V1-V3 on every touched row and column and
    /// applies it. On error the table is unchanged.
    pub fn commit(&mut self, m: Move) -> Result<()> {
        let mut ov = Overlay {
            table: self,
            edits: Vec::new(),
        };
        self.plan(&mut ov, &m)?;
        let edits = ov.edits;
        let ov = Overlay { table: self, edits };

        let mut touched_rows: Vec<usize> = ov.edits.iter().map(|((r, _), _)| *r).collect();
        let mut touched_cols: Vec<usize> = ov.edits.iter().map(|((_, c), _)| *c).collect();
        touched_rows.sort_unstable();
        touched_rows.dedup();
        touched_cols.sort_unstable();
        touched_cols.dedup();

        let (f, n) = (self.inst.f, self.inst.n);
        for &((r, c), _) in &ov.edits {
            if let Some(x) = ov.get(r, c) {
                if !self.inst.basis(r, c).contains(x) {
                    return Err(reject(
                        "V1",
                        r,
                        c,
                        format!("element {x} is not in B({r}, {c})"),
                    ));
                }
            }
        }
        for &r in &touched_rows {
            if !self
                .inst
                .matroid
                .independent_ids((0..n).filter_map(|c| ov.get(r, c)))
            {
                return Err(reject(
                    "V2",
                    r,
                    0,
                    format!("row {r} would become dependent"),
                ));
            }
        }
        for &c in &touched_cols {
            if !self
                .inst
                .matroid
                .independent_ids((0..f).filter_map(|r| ov.get(r, c)))
            {
                return Err(reject(
                    "V3",
                    0,
                    c,
                    format!("column {c} would become dependent"),
                ));
            }
        }

        // Final value per cell; clear every touched cell before filling, so an
        // element moved within a row or column stays in its set.
        let mut finals: Vec<((usize, usize), Option<ElementId>)> = Vec::new();
        for &((r, c), _) in &ov.edits {
            if !finals.iter().any(|(p, _)| *p == (r, c)) {
                finals.push(((r, c), ov.get(r, c)));
            }
        }
        for &((r, c), _) in &finals {
            if let Some(old) = self.cells[r * n + c].take() {
                self.rows[r].remove(old);
                self.cols[c].remove(old);
                self.filled -= 1;
            }
        }
        for ((r, c), v) in finals {
            if let Some(x) = v {
                self.cells[r * n + c] = Some(x);
                self.rows[r].insert(x);
                self.cols[c].insert(x);
                self.filled += 1;
            }
        }
        self.log.push(m);
        Ok(())
    }

    /// Commits a sequence of moves; stops at the first rejection.
    pub fn commit_all<I: IntoIterator<Item = Move>>(&mut self, moves: I) -> Result<()> {
        for m in moves {
            self.commit(m)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub t: usize,
    pub full_rows: usize,
    pub checks: Vec<InvariantCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_violation(&self) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "full rows: {} (target t = {})", self.full_rows, self.t)?;
        for c in &self.checks {
            match &c.first_failure {
                None => writeln!(f, "{}: pass", c.name)?,
                Some(why) => writeln!(f, "{}: FAIL {why}", c.name)?,
            }
        }
        Ok(())
    }
}

fn check(name: &'static str, failure: Option<String>) -> InvariantCheck {
    InvariantCheck {
        name,
        passed: failure.is_none(),
        first_failure: failure,
    }
}

/// Checks V1-V5 on `table` from scratch, independent of how it was built.
pub fn verify(inst: &Instance, table: &Table<'_>) -> VerifyReport {
    let (f, n) = (inst.f, inst.n);
    let m = &inst.matroid;

    let v1 = (0..f)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find_map(|(i, j)| match table.get(i, j) {
            Some(x) if !inst.basis(i, j).contains(x) => Some(format!(
                "cell ({i}, {j}) holds {x}, which is not in B({i}, {j})"
            )),
            _ => None,
        });
    let v2 = (0..f).find_map(|i| {
        let entries = (0..n).filter_map(|j| table.get(i, j));
        let ok = entries.clone().all(|x| x.index() < m.ground_size()) && m.independent_ids(entries);
        (!ok).then(|| format!("row {i} is dependent"))
    });
    let v3 = (0..n).find_map(|j| {
        let entries = (0..f).filter_map(|i| table.get(i, j));
        let ok = entries.clone().all(|x| x.index() < m.ground_size()) && m.independent_ids(entries);
        (!ok).then(|| format!("column {j} is dependent"))
    });
    let v4 = (0..f)
        .find_map(|i| {
            let s: ElementSet = (0..n).filter_map(|j| table.get(i, j)).collect();
            (&s != table.row_set(i)).then(|| format!("row set {i} disagrees with cells"))
        })
        .or_else(|| {
            (0..n).find_map(|j| {
                let s: ElementSet = (0..f).filter_map(|i| table.get(i, j)).collect();
                (&s != table.col_set(j)).then(|| format!("column set {j} disagrees with cells"))
            })
        })
        .or_else(|| {
            let count = (0..f).map(|i| table.row_len(i)).sum::<usize>();
            (count != table.filled())
                .then(|| format!("filled count {} but {count} cells filled", table.filled()))
        });
    let v5 = match Table::replay(inst, table.log()) {
        Err(e) => Some(format!("log does not replay: {e}")),
        Ok(replayed) => (0..f)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| replayed.get(i, j) != table.get(i, j))
            .map(|(i, j)| format!("replayed log differs at cell ({i}, {j})")),
    };

    let full_rows = (0..f)
        .filter(|&i| (0..n).all(|j| table.get(i, j).is_some()))
        .count();
    VerifyReport {
        t: inst.t(),
        full_rows,
        checks: vec![
            check("V1", v1),
            check("V2", v2),
            check("V3", v3),
            check("V4", v4),
            check("V5", v5),
        ],
    }
}
