//! The grid of bases and its derived parameters.

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matroid::{ElementSet, MatroidOracle};

pub type Epsilon = Ratio<u64>;

pub fn parse_epsilon(s: &str) -> Result<Epsilon> {
    let eps: Epsilon = s
        .trim()
        .parse()
        .map_err(|_| Error::Schema(format!("epsilon {s:?} is not a rational \"num/den\"")))?;
    if eps.is_zero() || eps >= Epsilon::one() {
        return Err(Error::InvalidInstance(format!(
            "epsilon {eps} is not in (0, 1)"
        )));
    }
    Ok(eps)
}

/// An `f x n` grid of bases of a rank-`n` matroid. Row `i`, column `j` holds
/// the basis the table cell `(i, j)` must draw its representative from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub matroid: MatroidOracle,
    pub n: usize,
    pub f: usize,
    pub epsilon: Epsilon,
    pub bases: Vec<Vec<ElementSet>>,
}

impl Instance {
    /// Validates every cell and returns the instance.
    pub fn new(
        matroid: MatroidOracle,
        n: usize,
        f: usize,
        epsilon: Epsilon,
        bases: Vec<Vec<ElementSet>>,
    ) -> Result<Self> {
        let inst = Instance {
            matroid,
            n,
            f,
            epsilon,
            bases,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.f == 0 {
            return Err(Error::InvalidInstance(format!(
                "need n >= 1 and f >= 1, got n = {}, f = {}",
                self.n, self.f
            )));
        }
        if self.epsilon.is_zero() || self.epsilon >= Epsilon::one() {
            return Err(Error::InvalidInstance(format!(
                "epsilon {} is not in (0, 1)",
                self.epsilon
            )));
        }
        if self.matroid.rank_n() != self.n {
            return Err(Error::InvalidInstance(format!(
                "rank mismatch: matroid has rank {}, instance declares n = {}",
                self.matroid.rank_n(),
                self.n
            )));
        }
        if self.bases.len() != self.f {
            return Err(Error::InvalidInstance(format!(
                "expected {} rows of bases, found {}",
                self.f,
                self.bases.len()
            )));
        }
        for (i, row) in self.bases.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} cells, expected {}",
                    row.len(),
                    self.n
                )));
            }
            for (j, cell) in row.iter().enumerate() {
                let bad = |reason: String| Error::BadCell {
                    row: i,
                    col: j,
                    reason,
                };
                if cell.len() != self.n {
                    return Err(bad(format!(
                        "basis has {} elements, expected {}",
                        cell.len(),
                        self.n
                    )));
                }
                self.matroid
                    .check_ids(cell)
                    .map_err(|e| bad(e.to_string()))?;
                if !self.matroid.independent_ids(cell.iter()) {
                    return Err(bad("basis is not independent".into()));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn basis(&self, row: usize, col: usize) -> &ElementSet {
        &self.bases[row][col]
    }

    /// `ceil(epsilon * n / 2)`: how many rows may stay short of a basis.
    pub fn slack_rows(&self) -> usize {
        (self.epsilon * Ratio::from_integer(self.n as u64) / Ratio::from_integer(2))
            .ceil()
            .to_integer() as usize
    }

    /// Target number of full rows, `f - ceil(epsilon * n / 2)` (floored at 0).
    pub fn t(&self) -> usize {
        self.f.saturating_sub(self.slack_rows())
    }

    /// Largest row count the growth argument covers, `floor((1 - epsilon) n / 2)`.
    pub fn regime_rows(&self) -> usize {
        regime_rows(self.epsilon, self.n)
    }

    pub fn in_regime(&self) -> bool {
        self.f <= self.regime_rows()
    }
}

pub fn regime_rows(epsilon: Epsilon, n: usize) -> usize {
    ((Epsilon::one() - epsilon) * Ratio::from_integer(n as u64) / Ratio::from_integer(2))
        .floor()
        .to_integer() as usize
}
