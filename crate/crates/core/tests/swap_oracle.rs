//! Swap-engine queries against brute-force scans that build each candidate
//! table and test its rows and columns directly.

use std::collections::{BTreeMap, BTreeSet};

use kahn_core::claims::{random_walk, ClaimTally};
use kahn_core::generate::{gen_graphic, gen_linear_pool, gen_linear_random, gen_uniform, rng};
use kahn_core::instance::{parse_epsilon, Instance};
use kahn_core::matroid::ElementId;
use kahn_core::swap::{addable_elements, direct_add, removable_positions, swappable_columns};
use kahn_core::table::{verify, Move, Table};
use rand::Rng;

fn instances() -> Vec<Instance> {
    let eps = parse_epsilon("1/5").unwrap();
    let mut out = Vec::new();
    for seed in 0..3 {
        out.push(gen_linear_pool(2, 6, 2, 1, eps, seed).unwrap());
        out.push(gen_linear_pool(2, 5, 5, 2, eps, seed).unwrap());
        out.push(gen_linear_random(3, 4, 3, eps, seed).unwrap());
        out.push(gen_graphic(5, 4, eps, seed).unwrap());
        out.push(gen_uniform(3, 5, 3, eps, seed).unwrap());
    }
    out
}

/// Random-walk end states and random prefixes of them.
fn states(inst: &Instance, seed: u64) -> Vec<Table<'_>> {
    let mut tally = ClaimTally::default();
    let end = random_walk(inst, seed, &mut tally).unwrap();
    let mut r = rng(seed ^ 0x5eed);
    let mut out: Vec<Table<'_>> = (0..3)
        .map(|_| Table::replay(inst, &end.log()[..r.gen_range(0..=end.log().len())]).unwrap())
        .collect();
    out.push(end);
    out
}

fn empty_cells(t: &Table<'_>) -> Vec<(usize, usize)> {
    (0..t.f())
        .flat_map(|i| (0..t.n()).map(move |b| (i, b)))
        .filter(|&(i, b)| t.get(i, b).is_none())
        .collect()
}

fn indep(t: &Table<'_>, set: impl IntoIterator<Item = ElementId>) -> bool {
    t.instance().matroid.independent_ids(set)
}

fn row_vec(t: &Table<'_>, i: usize) -> Vec<ElementId> {
    (0..t.n()).filter_map(|c| t.get(i, c)).collect()
}

fn col_vec(t: &Table<'_>, c: usize) -> Vec<ElementId> {
    (0..t.f()).filter_map(|j| t.get(j, c)).collect()
}

fn without(v: &[ElementId], drop: &[ElementId]) -> Vec<ElementId> {
    let mut out = v.to_vec();
    for d in drop {
        let k = out
            .iter()
            .position(|x| x == d)
            .expect("dropped element present");
        out.remove(k);
    }
    out
}

fn plus(v: &[ElementId], add: &[ElementId]) -> Vec<ElementId> {
    v.iter().chain(add).copied().collect()
}

/// Addable elements of `B(i, c)` with their lowest witness.
fn brute_addable(
    t: &Table<'_>,
    i: usize,
    b: usize,
    c: usize,
) -> BTreeMap<ElementId, Option<ElementId>> {
    let inst = t.instance();
    let row = row_vec(t, i);
    match t.get(i, c) {
        None => inst
            .basis(i, c)
            .iter()
            .filter(|&x| indep(t, plus(&row, &[x])) && indep(t, plus(&col_vec(t, c), &[x])))
            .map(|x| (x, None))
            .collect(),
        Some(d) => inst
            .basis(i, c)
            .iter()
            .filter_map(|x| {
                inst.basis(i, b)
                    .iter()
                    .find(|&y| {
                        indep(t, plus(&col_vec(t, b), &[y]))
                            && indep(t, plus(&without(&row, &[d]), &[y, x]))
                    })
                    .map(|y| (x, Some(y)))
            })
            .collect(),
    }
}

#[test]
fn direct_add_is_lowest_fitting_element() {
    for (k, inst) in instances().iter().enumerate() {
        for t in states(inst, k as u64) {
            for (i, b) in empty_cells(&t) {
                let expect = inst.basis(i, b).iter().find(|&x| {
                    indep(&t, plus(&row_vec(&t, i), &[x])) && indep(&t, plus(&col_vec(&t, b), &[x]))
                });
                let got = direct_add(&t, i, b).unwrap();
                assert_eq!(
                    got,
                    expect.map(|element| Move::PlaceDirect {
                        row: i,
                        col: b,
                        element
                    }),
                    "instance {k} cell ({i}, {b})"
                );
            }
        }
    }
}

#[test]
fn swappable_and_addable_match_pair_scan() {
    for (k, inst) in instances().iter().enumerate() {
        for t in states(inst, k as u64) {
            for (i, b) in empty_cells(&t) {
                let row = row_vec(&t, i);
                let expect: Vec<(usize, ElementId)> = (0..t.n())
                    .filter_map(|c| {
                        let d = t.get(i, c)?;
                        inst.basis(i, b)
                            .iter()
                            .find(|&y| {
                                indep(&t, plus(&col_vec(&t, b), &[y]))
                                    && indep(&t, plus(&without(&row, &[d]), &[y]))
                            })
                            .map(|y| (c, y))
                    })
                    .collect();
                assert_eq!(swappable_columns(&t, i, b).unwrap(), expect);

                for c in (0..t.n()).filter(|&c| c != b) {
                    let scan = addable_elements(&t, i, b, c).unwrap();
                    let got: BTreeMap<_, _> = scan
                        .records
                        .iter()
                        .map(|r| (r.element, r.witness))
                        .collect();
                    assert_eq!(
                        got,
                        brute_addable(&t, i, b, c),
                        "instance {k} cell ({i}, {b}) column {c}"
                    );
                    for rec in &scan.records {
                        let mv = rec.to_move();
                        let mut next = t.clone();
                        let fits = indep(
                            &t,
                            plus(
                                &without(
                                    &col_vec(&t, c),
                                    &rec.displaced.into_iter().collect::<Vec<_>>(),
                                ),
                                &[rec.element],
                            ),
                        );
                        assert_eq!(next.commit(mv).is_ok(), fits, "instance {k} record {rec:?}");
                        if fits {
                            assert!(verify(inst, &next).all_pass());
                            assert_eq!(next.filled(), t.filled() + 1);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn removable_positions_match_brute_scan() {
    let mut positions = 0;
    for (k, inst) in instances().iter().enumerate() {
        for t in states(inst, k as u64) {
            for (i, b) in empty_cells(&t) {
                let scan = removable_positions(&t, i, b).unwrap();
                let mut expect: BTreeMap<(usize, usize), ElementId> = BTreeMap::new();
                let mut increase = direct_add(&t, i, b).unwrap().is_some();
                for c in 0..t.n() {
                    let addable = brute_addable(&t, i, b, c);
                    let Some(d) = t.get(i, c) else {
                        increase |= !addable.is_empty();
                        continue;
                    };
                    // a witness that alone extends the row fills (i, b)
                    increase |= inst.basis(i, b).iter().any(|y| {
                        indep(&t, plus(&col_vec(&t, b), &[y]))
                            && indep(&t, plus(&row_vec(&t, i), &[y]))
                            && indep(&t, plus(&without(&row_vec(&t, i), &[d]), &[y]))
                    });
                    let post = without(&col_vec(&t, c), &[d]);
                    if addable.keys().any(|&x| indep(&t, plus(&post, &[x]))) {
                        increase = true;
                        continue;
                    }
                    for j in (0..t.f()).filter(|&j| j != i) {
                        let Some(e) = t.get(j, c) else { continue };
                        let freed = without(&post, &[e]);
                        if let Some(&x) = addable.keys().find(|&&x| indep(&t, plus(&freed, &[x]))) {
                            expect.insert((j, c), x);
                        }
                    }
                }
                let got: BTreeMap<_, _> = scan
                    .records
                    .iter()
                    .map(|r| (r.position(), r.add.element))
                    .collect();
                assert_eq!(got, expect, "instance {k} cell ({i}, {b})");
                assert_eq!(
                    scan.increase.is_some(),
                    increase,
                    "instance {k} cell ({i}, {b})"
                );
                let order: Vec<_> = scan.records.iter().map(|r| r.position()).collect();
                assert!(order.windows(2).all(|w| w[0] < w[1]));

                for rec in &scan.records {
                    let mut next = t.clone();
                    next.commit(rec.to_move()).unwrap();
                    assert!(verify(inst, &next).all_pass());
                    assert_eq!(next.filled(), t.filled());
                    assert_eq!(next.get(rec.removed_row, rec.add.col), None);
                    assert_eq!(next.get(i, rec.add.col), Some(rec.add.element));
                    positions += 1;
                }
                if let Some(mv) = scan.increase {
                    let mut next = t.clone();
                    next.commit(mv).unwrap();
                    assert!(verify(inst, &next).all_pass());
                    assert_eq!(next.filled(), t.filled() + 1);
                }
            }
        }
    }
    assert!(positions > 0);
}

#[test]
fn blocked_cells_occur() {
    let blocked: BTreeSet<usize> = instances()
        .iter()
        .enumerate()
        .filter(|(k, inst)| {
            states(inst, *k as u64).iter().any(|t| {
                empty_cells(t)
                    .into_iter()
                    .any(|(i, b)| direct_add(t, i, b).unwrap().is_none())
            })
        })
        .map(|(k, _)| k)
        .collect();
    assert!(!blocked.is_empty());
}
