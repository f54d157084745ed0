//! Canonical JSON files for instances and solutions.
//!
//! Output is compact JSON with object keys in sorted order and a trailing
//! newline; cells are written as sorted id lists. Loading then saving a
//! file written here reproduces it byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::brute::Grid;
use crate::error::{Error, Result};
use crate::instance::{parse_epsilon, Instance};
use crate::matroid::{ElementId, ElementSet, MatroidKind, MatroidOracle};
use crate::solver::{Solution, Status};
use crate::table::{Move, Table};

fn canonical<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's map is ordered by key, so going through a Value sorts
    // every object.
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&v)? + "\n")
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    if text.trim().is_empty() {
        return Err(Error::Schema(format!("{what} file is empty")));
    }
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("{what} file: {e}")))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    bases: Vec<Vec<Vec<u32>>>,
    epsilon: String,
    f: usize,
    matroid: MatroidKind,
    n: usize,
}

pub fn instance_to_string(inst: &Instance) -> Result<String> {
    let file = InstanceFile {
        bases: inst
            .bases
            .iter()
            .map(|row| {
                row.iter()
                    .map(|b| b.iter().map(|e| e.0).collect())
                    .collect()
            })
            .collect(),
        epsilon: format!("{}/{}", inst.epsilon.numer(), inst.epsilon.denom()),
        f: inst.f,
        matroid: inst.matroid.kind().clone(),
        n: inst.n,
    };
    canonical(&file)
}

/// Parses and fully validates an instance. Cells may list their elements in
/// any order; a repeated element is an error naming the cell.
pub fn instance_from_str(text: &str) -> Result<Instance> {
    let file: InstanceFile = parse(text, "instance")?;
    let epsilon = parse_epsilon(&file.epsilon)?;
    let matroid = MatroidOracle::new(file.matroid)?;
    let mut bases = Vec::with_capacity(file.bases.len());
    for (i, row) in file.bases.into_iter().enumerate() {
        let mut cells = Vec::with_capacity(row.len());
        for (j, mut ids) in row.into_iter().enumerate() {
            let len = ids.len();
            ids.sort_unstable();
            ids.dedup();
            if ids.len() != len {
                return Err(Error::BadCell {
                    row: i,
                    col: j,
                    reason: "repeated element".into(),
                });
            }
            cells.push(
                ElementSet::from_sorted(ids.into_iter().map(ElementId).collect())
                    .expect("sorted and deduplicated"),
            );
        }
        bases.push(cells);
    }
    Instance::new(matroid, file.n, file.f, epsilon, bases)
}

pub fn save_instance(inst: &Instance, path: &Path) -> Result<()> {
    fs::write(path, instance_to_string(inst)?)?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    instance_from_str(&fs::read_to_string(path)?)
}

/// A solution as stored on disk: the move log, the resulting cells, the
/// full rows and the solver's statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    #[serde(rename = "L")]
    pub full_rows: Vec<usize>,
    pub moves: Vec<Move>,
    pub stats: Value,
    pub status: Status,
    pub table: Grid,
}

impl SolutionFile {
    pub fn from_solution(sol: &Solution<'_>) -> Result<Self> {
        Ok(SolutionFile {
            full_rows: sol.full_rows.clone(),
            moves: sol.table.log().to_vec(),
            stats: serde_json::to_value(&sol.stats)?,
            status: sol.status,
            table: sol.table.grid(),
        })
    }

    /// The stored cells with the stored log attached, without re-checking
    /// either; run `verify` on the result.
    pub fn table<'a>(&self, inst: &'a Instance) -> Result<Table<'a>> {
        Table::from_parts(inst, &self.table, self.moves.clone())
    }
}

pub fn solution_to_string(file: &SolutionFile) -> Result<String> {
    canonical(file)
}

pub fn solution_from_str(text: &str) -> Result<SolutionFile> {
    parse(text, "solution")
}

pub fn save_solution(file: &SolutionFile, path: &Path) -> Result<()> {
    fs::write(path, solution_to_string(file)?)?;
    Ok(())
}

pub fn load_solution(path: &Path) -> Result<SolutionFile> {
    solution_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_graphic, gen_linear_random, gen_uniform};
    use crate::instance::parse_epsilon;
    use crate::solver::{solve, SolverConfig};
    use crate::table::verify;

    #[test]
    fn instance_round_trip_is_byte_exact() {
        let eps = parse_epsilon("1/4").unwrap();
        for inst in [
            gen_linear_random(3, 3, 2, eps, 1).unwrap(),
            gen_graphic(4, 2, eps, 2).unwrap(),
            gen_uniform(2, 5, 1, eps, 3).unwrap(),
        ] {
            let text = instance_to_string(&inst).unwrap();
            let back = instance_from_str(&text).unwrap();
            assert_eq!(back, inst);
            assert_eq!(instance_to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let inst = gen_uniform(1, 2, 1, parse_epsilon("1/2").unwrap(), 0).unwrap();
        let text = instance_to_string(&inst).unwrap();
        assert!(text.starts_with(r#"{"bases":"#), "{text}");
        assert!(
            text.contains(
                r#""epsilon":"1/2","f":1,"matroid":{"ground":2,"k":1,"kind":"uniform"},"n":1}"#
            ),
            "{text}"
        );
        assert!(text.ends_with("}\n"));
    }

    fn uniform_text(cell: &str) -> String {
        format!(
            r#"{{"bases":[[{cell},[0,1]]],"epsilon":"1/2","f":1,"matroid":{{"kind":"uniform","k":2,"ground":4}},"n":2}}"#
        )
    }

    #[test]
    fn cell_errors_name_the_cell() {
        assert!(instance_from_str(&uniform_text("[1,0]")).is_ok());
        match instance_from_str(&uniform_text("[0]")) {
            Err(Error::BadCell { row: 0, col: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
        match instance_from_str(&uniform_text("[2,2]")) {
            Err(Error::BadCell {
                row: 0,
                col: 0,
                reason,
            }) => assert!(reason.contains("repeated")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dependent_cell_is_reported() {
        // GF(2)^2 with a vector listed twice under different ids: {0, 1} is
        // dependent.
        let text = r#"{"bases":[[[0,2],[0,1]]],"epsilon":"1/2","f":1,"matroid":{"kind":"linear","p":2,"vectors":[[1,0],[1,0],[0,1]]},"n":2}"#;
        match instance_from_str(text) {
            Err(Error::BadCell {
                row: 0,
                col: 1,
                reason,
            }) => assert!(reason.contains("not independent")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_and_malformed_files() {
        assert!(matches!(instance_from_str(""), Err(Error::Schema(_))));
        assert!(matches!(instance_from_str("{}"), Err(Error::Schema(_))));
        assert!(matches!(solution_from_str("  \n"), Err(Error::Schema(_))));
        assert!(matches!(
            instance_from_str(&uniform_text("[0,1]").replace("\"n\"", "\"m\"")),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn solution_round_trip_and_verify() {
        let inst = gen_linear_random(2, 6, 2, parse_epsilon("1/4").unwrap(), 5).unwrap();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        let file = SolutionFile::from_solution(&sol).unwrap();
        let text = solution_to_string(&file).unwrap();
        let back = solution_from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(solution_to_string(&back).unwrap(), text);
        assert!(text.starts_with(r#"{"L":"#));
        let t = back.table(&inst).unwrap();
        assert!(verify(&inst, &t).all_pass());
    }
}
