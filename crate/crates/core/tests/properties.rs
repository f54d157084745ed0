use kahn_core::generate::{gen_graphic, gen_linear_pool, gen_linear_random, gen_uniform};
use kahn_core::instance::{parse_epsilon, Instance};
use kahn_core::io::{
    instance_from_str, instance_to_string, solution_from_str, solution_to_string, SolutionFile,
};
use kahn_core::matroid::{ElementId, ElementSet, MatroidOracle};
use kahn_core::solver::{solve, SolverConfig};
use kahn_core::swap::{addable_elements, direct_add, removable_positions};
use kahn_core::table::{verify, Move, Table};
use proptest::prelude::*;

fn linear_matroid() -> impl Strategy<Value = (u32, Vec<Vec<u16>>)> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..5, 1usize..9).prop_flat_map(
        |(p, dim, count)| {
            (
                Just(p),
                prop::collection::vec(prop::collection::vec(0..p as u16, dim), count),
            )
        },
    )
}

fn subset(ground: usize) -> impl Strategy<Value = ElementSet> {
    prop::collection::vec(any::<bool>(), ground).prop_map(|bits| {
        ElementSet::from_ids(bits.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k))
    })
}

fn instance() -> impl Strategy<Value = Instance> {
    (0u8..4, 0u64..1000).prop_map(|(kind, seed)| {
        let eps = parse_epsilon("1/5").unwrap();
        match kind {
            0 => gen_linear_random(2, 5, 3, eps, seed),
            1 => gen_linear_pool(3, 4, 4, 2, eps, seed),
            2 => gen_graphic(5, 3, eps, seed),
            _ => gen_uniform(3, 6, 3, eps, seed),
        }
        .unwrap()
    })
}

/// Direct adds, addable swaps and removal steps at every empty cell of `t`.
fn candidate_moves(t: &Table<'_>) -> Vec<Move> {
    let mut out = Vec::new();
    for i in 0..t.f() {
        for b in t.empty_cols(i).collect::<Vec<_>>() {
            out.extend(direct_add(t, i, b).unwrap());
            for c in (0..t.n()).filter(|&c| c != b) {
                out.extend(
                    addable_elements(t, i, b, c)
                        .unwrap()
                        .records
                        .iter()
                        .map(|r| r.to_move()),
                );
            }
            out.extend(
                removable_positions(t, i, b)
                    .unwrap()
                    .records
                    .iter()
                    .map(|r| r.to_move()),
            );
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_a_matroid_rank((p, vectors) in linear_matroid(), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let m = MatroidOracle::linear(p, vectors.clone()).unwrap();
        let k = vectors.len();
        let sets: Vec<ElementSet> = picks
            .iter()
            .map(|ix| {
                let mask = ix.index(1 << k);
                ElementSet::from_ids((0..k).filter(|e| mask >> e & 1 == 1))
            })
            .collect();
        let (a, b) = (&sets[0], &sets[1]);
        let ra = m.rank(a).unwrap();
        prop_assert!(ra <= a.len());
        prop_assert_eq!(m.is_independent(a).unwrap(), ra == a.len());
        // monotone and submodular
        let union = a.union(b);
        let inter = a.intersection(b);
        prop_assert!(m.rank(&union).unwrap() >= ra);
        prop_assert!(m.rank(&union).unwrap() + m.rank(&inter).unwrap() <= ra + m.rank(b).unwrap());
        prop_assert!(m.rank(&ElementSet::from_ids(0..k)).unwrap() == m.rank_n());
    }

    #[test]
    fn independent_sets_are_closed_and_augment((p, vectors) in linear_matroid(), a in subset(8), b in subset(8)) {
        let k = vectors.len();
        let m = MatroidOracle::linear(p, vectors).unwrap();
        let clip = |s: &ElementSet| ElementSet::from_iter(s.iter().filter(|x| x.index() < k));
        let (a, b) = (clip(&a), clip(&b));
        if m.is_independent(&a).unwrap() {
            for x in a.iter() {
                prop_assert!(m.is_independent(&a.without(x)).unwrap());
            }
            if m.is_independent(&b).unwrap() && a.len() > b.len() {
                let x = m.augment(&a, &b).unwrap();
                prop_assert!(a.contains(x) && !b.contains(x));
                prop_assert!(m.is_independent(&b.with(x)).unwrap());
            }
        }
    }

    #[test]
    fn probe_agrees_with_independence(extra in prop::collection::vec((0usize..5, 0usize..5), 0..6), s in subset(10), x in 0u32..10) {
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        edges.extend(extra);
        let m = MatroidOracle::graphic(5, edges.clone()).unwrap();
        let s = ElementSet::from_iter(s.iter().filter(|e| e.index() < edges.len()));
        let x = ElementId(x % edges.len() as u32);
        match m.probe_of(s.iter()) {
            None => prop_assert!(!m.is_independent(&s).unwrap()),
            Some(probe) => {
                prop_assert!(m.is_independent(&s).unwrap());
                let expect = !s.contains(x) && m.is_independent(&s.with(x)).unwrap();
                prop_assert_eq!(probe.accepts(x), expect);
            }
        }
    }

    #[test]
    fn committed_moves_keep_invariants(inst in instance(), choices in prop::collection::vec(any::<prop::sample::Index>(), 1..25)) {
        let mut t = Table::new(&inst);
        for ix in choices {
            let moves = candidate_moves(&t);
            if moves.is_empty() {
                break;
            }
            let mv = moves[ix.index(moves.len())].clone();
            let before = t.filled() as isize;
            let grid = t.grid();
            let delta = mv.fill_delta();
            match t.commit(mv.clone()) {
                Ok(()) => {
                    prop_assert_eq!(t.filled() as isize, before + delta, "{:?}", mv);
                    let report = verify(&inst, &t);
                    prop_assert!(report.all_pass(), "{}", report);
                }
                // a swap whose element does not fit its column is rejected whole
                Err(_) => {
                    prop_assert_eq!(t.filled() as isize, before);
                    prop_assert_eq!(t.grid(), grid);
                }
            }
        }
        let replayed = Table::replay(&inst, t.log()).unwrap();
        prop_assert_eq!(replayed.grid(), t.grid());
    }

    #[test]
    fn instances_round_trip(inst in instance()) {
        let text = instance_to_string(&inst).unwrap();
        let back = instance_from_str(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance_to_string(&back).unwrap(), text);
    }

    #[test]
    fn solutions_round_trip(inst in instance(), seed in 0u64..50) {
        let sol = solve(&inst, &SolverConfig { seed, ..SolverConfig::default() }).unwrap();
        prop_assert!(verify(&inst, &sol.table).all_pass());
        let file = SolutionFile::from_solution(&sol).unwrap();
        let text = solution_to_string(&file).unwrap();
        let back = solution_from_str(&text).unwrap();
        prop_assert_eq!(solution_to_string(&back).unwrap(), text);
        let t = back.table(&inst).unwrap();
        prop_assert!(verify(&inst, &t).all_pass());
        prop_assert_eq!(t.full_rows(), back.full_rows);
    }
}
