//! Seeded instance generators.
//!
//! Every generator emits a shared ground set: equal vectors (or edges) are
//! one element, with ids assigned in order of first appearance. All
//! randomness comes from a ChaCha8 stream seeded with the caller's seed, so
//! output is identical across platforms and runs.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{regime_rows, Epsilon, Instance};
use crate::matroid::linear::{is_prime, Vectors};
use crate::matroid::{ElementId, ElementSet, MatroidOracle};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_field(p: u32, n: usize) -> Result<()> {
    if p >= 1 << 16 || !is_prime(p) {
        return Err(Error::Precondition(format!(
            "p = {p} is not a prime below 2^16"
        )));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    Ok(())
}

fn is_invertible(p: u32, columns: &[Vec<u16>]) -> bool {
    let dim = columns.len();
    let vectors = Vectors::new(p, dim, columns);
    let mut ech = vectors.echelon(dim);
    (0..dim).all(|id| ech.insert(&vectors, id))
}

/// Columns of a uniformly random invertible `n x n` matrix over GF(p).
pub fn random_invertible<R: Rng>(p: u32, n: usize, rng: &mut R) -> Vec<Vec<u16>> {
    loop {
        let cols: Vec<Vec<u16>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..p) as u16).collect())
            .collect();
        if is_invertible(p, &cols) {
            return cols;
        }
    }
}

/// Interns vectors into a shared ground set.
#[derive(Default)]
struct GroundBuilder {
    index: HashMap<Vec<u16>, ElementId>,
    vectors: Vec<Vec<u16>>,
}

impl GroundBuilder {
    fn intern(&mut self, v: Vec<u16>) -> ElementId {
        if let Some(&id) = self.index.get(&v) {
            return id;
        }
        let id = ElementId::from(self.vectors.len());
        self.vectors.push(v.clone());
        self.index.insert(v, id);
        id
    }

    fn basis(&mut self, columns: Vec<Vec<u16>>) -> ElementSet {
        columns.into_iter().map(|c| self.intern(c)).collect()
    }
}

/// Every cell an independent uniformly random basis of GF(p)^n.
pub fn gen_linear_random(
    p: u32,
    n: usize,
    f: usize,
    epsilon: Epsilon,
    seed: u64,
) -> Result<Instance> {
    check_field(p, n)?;
    if f == 0 {
        return Err(Error::Precondition("f must be at least 1".into()));
    }
    let mut rng = rng(seed);
    let mut ground = GroundBuilder::default();
    let bases = (0..f)
        .map(|_| {
            (0..n)
                .map(|_| ground.basis(random_invertible(p, n, &mut rng)))
                .collect()
        })
        .collect();
    let matroid = MatroidOracle::linear(p, ground.vectors)?;
    Instance::new(matroid, n, f, epsilon, bases)
}

/// Column-constant grid: `B(i, j) = B(j)` for every row. The row count is
/// `floor((1 - epsilon) n / 2)`, raised to 1 when that is zero.
pub fn gen_rota(p: u32, n: usize, epsilon: Epsilon, seed: u64) -> Result<Instance> {
    check_field(p, n)?;
    let f = regime_rows(epsilon, n).max(1);
    let mut rng = rng(seed);
    let mut ground = GroundBuilder::default();
    let columns: Vec<ElementSet> = (0..n)
        .map(|_| ground.basis(random_invertible(p, n, &mut rng)))
        .collect();
    let matroid = MatroidOracle::linear(p, ground.vectors)?;
    Instance::new(matroid, n, f, epsilon, vec![columns; f])
}

/// Cells drawn (with repetition) from a small pool of random bases. With a
/// pool of one basis every cell is identical and the rows must form a Latin
/// rectangle over it.
pub fn gen_linear_pool(
    p: u32,
    n: usize,
    f: usize,
    pool: usize,
    epsilon: Epsilon,
    seed: u64,
) -> Result<Instance> {
    check_field(p, n)?;
    if f == 0 || pool == 0 {
        return Err(Error::Precondition("f and pool must be at least 1".into()));
    }
    let mut rng = rng(seed);
    let mut ground = GroundBuilder::default();
    let pool: Vec<ElementSet> = (0..pool)
        .map(|_| ground.basis(random_invertible(p, n, &mut rng)))
        .collect();
    let bases = (0..f)
        .map(|_| {
            (0..n)
                .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                .collect()
        })
        .collect();
    let matroid = MatroidOracle::linear(p, ground.vectors)?;
    Instance::new(matroid, n, f, epsilon, bases)
}

/// Edges of `K_m` in lexicographic order.
pub fn complete_graph_edges(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|u| (u + 1..m).map(move |v| (u, v)))
        .collect()
}

/// Minimum spanning tree of `K_m` under i.i.d. random weights.
fn random_spanning_tree<R: Rng>(m: usize, edges: &[(usize, usize)], rng: &mut R) -> ElementSet {
    let mut order: Vec<(u64, usize)> = (0..edges.len()).map(|e| (rng.gen(), e)).collect();
    order.sort_unstable();
    let mut dsu = crate::matroid::graphic::DisjointSets::new(m);
    order
        .into_iter()
        .filter(|&(_, e)| dsu.union(edges[e].0, edges[e].1))
        .map(|(_, e)| ElementId::from(e))
        .collect()
}

/// Graphic matroid of `K_m` (rank `m - 1`); each cell a random spanning tree.
pub fn gen_graphic(m: usize, f: usize, epsilon: Epsilon, seed: u64) -> Result<Instance> {
    if m < 2 || f == 0 {
        return Err(Error::Precondition(format!(
            "need m >= 2 and f >= 1, got m = {m}, f = {f}"
        )));
    }
    let mut rng = rng(seed);
    let edges = complete_graph_edges(m);
    let bases = (0..f)
        .map(|_| {
            (0..m - 1)
                .map(|_| random_spanning_tree(m, &edges, &mut rng))
                .collect()
        })
        .collect();
    let matroid = MatroidOracle::graphic(m, edges)?;
    Instance::new(matroid, m - 1, f, epsilon, bases)
}

/// Uniform matroid `U(n, ground)`; each cell a random `n`-subset.
pub fn gen_uniform(
    n: usize,
    ground: usize,
    f: usize,
    epsilon: Epsilon,
    seed: u64,
) -> Result<Instance> {
    if n == 0 || f == 0 || ground < n {
        return Err(Error::Precondition(format!(
            "need 1 <= n <= ground and f >= 1, got n = {n}, ground = {ground}, f = {f}"
        )));
    }
    let mut rng = rng(seed);
    let bases = (0..f)
        .map(|_| {
            (0..n)
                .map(|_| ElementSet::from_ids(sample(&mut rng, ground, n)))
                .collect()
        })
        .collect();
    Instance::new(MatroidOracle::uniform(n, ground)?, n, f, epsilon, bases)
}
