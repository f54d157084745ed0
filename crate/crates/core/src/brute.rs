//! Exhaustive search on tiny instances.
//!
//! Backtracking over cells in row-major order, keeping every column
//! independent. Rows that are not completed contribute nothing and can be
//! left empty, so each row is either filled completely or skipped.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matroid::ElementId;
use crate::table::{Move, Table};

pub const DEFAULT_GUARD: u64 = 10_000_000;

pub type Grid = Vec<Vec<Option<ElementId>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteResult {
    pub optimum: usize,
    pub witness: Grid,
    pub nodes: u64,
}

struct Search<'a> {
    inst: &'a Instance,
    grid: Grid,
    nodes: u64,
    guard: u64,
    best: usize,
    best_grid: Grid,
    /// Every row must be filled; stop at the first success.
    all_rows: bool,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.guard {
            return Err(Error::GuardExceeded { guard: self.guard });
        }
        Ok(())
    }

    fn column_accepts(&self, col: usize, x: ElementId) -> bool {
        let entries = self.grid.iter().filter_map(|r| r[col]);
        self.inst
            .matroid
            .independent_ids(entries.chain(std::iter::once(x)))
    }

    fn row_accepts(&self, row: usize, x: ElementId) -> bool {
        let entries = self.grid[row].iter().filter_map(|c| *c);
        self.inst
            .matroid
            .independent_ids(entries.chain(std::iter::once(x)))
    }

    /// Returns true once the search can stop.
    fn rows(&mut self, row: usize, full: usize) -> Result<bool> {
        if row == self.inst.f {
            if full > self.best || self.best_grid.is_empty() {
                self.best = full;
                self.best_grid = self.grid.clone();
            }
            return Ok(self.best == self.inst.f);
        }
        if full + (self.inst.f - row) <= self.best && !self.best_grid.is_empty() {
            return Ok(false);
        }
        if self.cells(row, 0, full)? {
            return Ok(true);
        }
        if self.all_rows {
            return Ok(false);
        }
        self.rows(row + 1, full)
    }

    fn cells(&mut self, row: usize, col: usize, full: usize) -> Result<bool> {
        if col == self.inst.n {
            return self.rows(row + 1, full + 1);
        }
        let candidates: Vec<ElementId> = self.inst.basis(row, col).iter().collect();
        for x in candidates {
            self.tick()?;
            if !self.row_accepts(row, x) || !self.column_accepts(col, x) {
                continue;
            }
            self.grid[row][col] = Some(x);
            let stop = self.cells(row, col + 1, full)?;
            self.grid[row][col] = None;
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn search(inst: &Instance, guard: u64, all_rows: bool) -> Result<Search<'_>> {
    let mut s = Search {
        inst,
        grid: vec![vec![None; inst.n]; inst.f],
        nodes: 0,
        guard,
        best: 0,
        best_grid: Vec::new(),
        all_rows,
    };
    s.rows(0, 0)?;
    Ok(s)
}

/// Largest number of rows that can simultaneously be full bases with every
/// column independent, and an assignment achieving it.
pub fn brute_max_rows(inst: &Instance, guard: u64) -> Result<BruteResult> {
    let s = search(inst, guard, false)?;
    Ok(BruteResult {
        optimum: s.best,
        witness: s.best_grid,
        nodes: s.nodes,
    })
}

/// A full `n x n` assignment with every row and column a basis, if any.
pub fn brute_kahn_full(inst: &Instance, guard: u64) -> Result<Option<Grid>> {
    if inst.f != inst.n {
        return Err(Error::Precondition(format!(
            "full search needs a square instance, got f = {}, n = {}",
            inst.f, inst.n
        )));
    }
    let s = search(inst, guard, true)?;
    Ok((s.best == inst.f && !s.best_grid.is_empty()).then_some(s.best_grid))
}

/// Builds a table from a grid by direct placements in row-major order, so
/// the result carries a replayable log.
pub fn witness_table<'a>(inst: &'a Instance, grid: &Grid) -> Result<Table<'a>> {
    let mut t = Table::new(inst);
    for (row, cells) in grid.iter().enumerate() {
        for (col, cell) in cells.iter().enumerate() {
            if let Some(element) = *cell {
                t.commit(Move::PlaceDirect { row, col, element })?;
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_linear_random, gen_rota};
    use crate::instance::parse_epsilon;
    use crate::matroid::{ElementSet, MatroidOracle};
    use crate::table::verify;

    fn eps() -> crate::instance::Epsilon {
        parse_epsilon("1/2").unwrap()
    }

    #[test]
    fn single_cell() {
        let inst = gen_linear_random(3, 1, 1, eps(), 4).unwrap();
        let r = brute_max_rows(&inst, DEFAULT_GUARD).unwrap();
        assert_eq!(r.optimum, 1);
        assert!(brute_kahn_full(&inst, DEFAULT_GUARD).unwrap().is_some());
    }

    #[test]
    fn uniform_only_basis() {
        let inst = Instance::new(
            MatroidOracle::uniform(2, 2).unwrap(),
            2,
            1,
            eps(),
            vec![vec![ElementSet::from_ids([0, 1]); 2]],
        )
        .unwrap();
        assert_eq!(brute_max_rows(&inst, DEFAULT_GUARD).unwrap().optimum, 1);
    }

    fn gf2_plane_all_standard(f: usize) -> Instance {
        let m = MatroidOracle::linear(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let b = ElementSet::from_ids([0, 1]);
        Instance::new(m, 2, f, eps(), vec![vec![b.clone(), b]; f]).unwrap()
    }

    #[test]
    fn gf2_plane_one_row() {
        // Oracle: the four assignments of {e1, e2} to two cells; two are bases.
        let inst = gf2_plane_all_standard(1);
        let mut bases = 0;
        for a in [0u32, 1] {
            for b in [0u32, 1] {
                if inst.matroid.independent_ids([ElementId(a), ElementId(b)]) {
                    bases += 1;
                }
            }
        }
        assert_eq!(bases, 2);
        let r = brute_max_rows(&inst, DEFAULT_GUARD).unwrap();
        assert_eq!(r.optimum, 1);
        assert!(verify(&inst, &witness_table(&inst, &r.witness).unwrap()).all_pass());
    }

    #[test]
    fn gf2_plane_latin_square() {
        let inst = gf2_plane_all_standard(2);
        let grid = brute_kahn_full(&inst, DEFAULT_GUARD).unwrap().unwrap();
        let e = |i| Some(ElementId(i));
        assert_eq!(grid, vec![vec![e(0), e(1)], vec![e(1), e(0)]]);
        let t = witness_table(&inst, &grid).unwrap();
        assert_eq!(t.full_rows(), vec![0, 1]);
    }

    #[test]
    fn three_rows_over_plane_cannot_all_fill() {
        // Column of three entries from a rank-2 space is dependent.
        let inst = gf2_plane_all_standard(3);
        assert_eq!(brute_max_rows(&inst, DEFAULT_GUARD).unwrap().optimum, 2);
        assert!(matches!(
            brute_kahn_full(&inst, DEFAULT_GUARD),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn guard_is_enforced() {
        let inst = gen_rota(3, 4, parse_epsilon("1/5").unwrap(), 1).unwrap();
        assert!(matches!(
            brute_max_rows(&inst, 3),
            Err(Error::GuardExceeded { guard: 3 })
        ));
        assert!(brute_max_rows(&inst, DEFAULT_GUARD).unwrap().nodes > 3);
    }

    #[test]
    fn witnesses_verify() {
        for seed in 0..10 {
            let inst = gen_linear_random(3, 3, 2, eps(), seed).unwrap();
            let r = brute_max_rows(&inst, DEFAULT_GUARD).unwrap();
            assert_eq!(r.optimum, 2, "seed {seed}");
            let t = witness_table(&inst, &r.witness).unwrap();
            assert!(verify(&inst, &t).all_pass());
            assert_eq!(t.full_rows().len(), r.optimum);
        }
    }
}
