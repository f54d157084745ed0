//! Ground sets and independence oracles.
//!
//! Three oracle kinds are supported: linear matroids over a prime field,
//! graphic matroids of connected graphs, and uniform matroids. All share one
//! incremental query object, [`Probe`], which holds an independent base set
//! and answers "is `base + x` independent?" without rebuilding anything.

mod element;
pub mod graphic;
pub mod linear;

pub use element::{ElementId, ElementSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use graphic::DisjointSets;
use linear::{Echelon, Vectors};

/// Kind-specific payload of a matroid, in the shape it takes on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidKind {
    /// One coordinate vector per ground-set element, over GF(p).
    Linear { p: u32, vectors: Vec<Vec<u16>> },
    /// Element `e` is edge `edges[e]`.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Every set of at most `k` of the `ground` elements is independent.
    Uniform { k: usize, ground: usize },
}

/// Immutable independence oracle. Safe to share across threads.
#[derive(Clone, Debug)]
pub struct MatroidOracle {
    kind: MatroidKind,
    rank: usize,
    dim: usize,
    vectors: Option<Vectors>,
}

impl PartialEq for MatroidOracle {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for MatroidOracle {}

impl MatroidOracle {
    pub fn new(kind: MatroidKind) -> Result<Self> {
        let mut oracle = match &kind {
            MatroidKind::Linear { p, vectors } => {
                let p = *p;
                if p >= 1 << 16 || !linear::is_prime(p) {
                    return Err(Error::InvalidMatroid(format!(
                        "field size {p} is not a prime below 2^16"
                    )));
                }
                let dim = vectors.first().map_or(0, Vec::len);
                if dim == 0 {
                    return Err(Error::InvalidMatroid(
                        "linear matroid needs at least one nonempty vector".into(),
                    ));
                }
                for (id, v) in vectors.iter().enumerate() {
                    if v.len() != dim {
                        return Err(Error::InvalidMatroid(format!(
                            "vector {id} has length {}, expected {dim}",
                            v.len()
                        )));
                    }
                    if let Some(&c) = v.iter().find(|&&c| c as u32 >= p) {
                        return Err(Error::InvalidMatroid(format!(
                            "vector {id} has coordinate {c} outside GF({p})"
                        )));
                    }
                }
                MatroidOracle {
                    vectors: Some(Vectors::new(p, dim, vectors)),
                    kind: kind.clone(),
                    rank: 0,
                    dim,
                }
            }
            MatroidKind::Graphic { vertices, edges } => {
                if *vertices == 0 {
                    return Err(Error::InvalidMatroid("graph has no vertices".into()));
                }
                let mut dsu = DisjointSets::new(*vertices);
                for (id, &(u, v)) in edges.iter().enumerate() {
                    if u >= *vertices || v >= *vertices {
                        return Err(Error::InvalidMatroid(format!(
                            "edge {id} = ({u}, {v}) has an endpoint outside 0..{vertices}"
                        )));
                    }
                    dsu.union(u, v);
                }
                if (1..*vertices).any(|v| !dsu.same(0, v)) {
                    return Err(Error::InvalidMatroid("graph is not connected".into()));
                }
                MatroidOracle {
                    kind: kind.clone(),
                    rank: 0,
                    dim: *vertices,
                    vectors: None,
                }
            }
            MatroidKind::Uniform { k, ground } => {
                if k > ground {
                    return Err(Error::InvalidMatroid(format!(
                        "uniform threshold {k} exceeds ground size {ground}"
                    )));
                }
                MatroidOracle {
                    kind: kind.clone(),
                    rank: 0,
                    dim: 0,
                    vectors: None,
                }
            }
        };
        let mut probe = oracle.probe();
        oracle.rank = (0..oracle.ground_size())
            .filter(|&e| probe.insert(ElementId::from(e)))
            .count();
        Ok(oracle)
    }

    pub fn uniform(k: usize, ground: usize) -> Result<Self> {
        Self::new(MatroidKind::Uniform { k, ground })
    }

    pub fn linear(p: u32, vectors: Vec<Vec<u16>>) -> Result<Self> {
        Self::new(MatroidKind::Linear { p, vectors })
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(MatroidKind::Graphic { vertices, edges })
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn ground_size(&self) -> usize {
        match &self.kind {
            MatroidKind::Linear { vectors, .. } => vectors.len(),
            MatroidKind::Graphic { edges, .. } => edges.len(),
            MatroidKind::Uniform { ground, .. } => *ground,
        }
    }

    /// Rank of the whole ground set.
    pub fn rank_n(&self) -> usize {
        self.rank
    }

    pub fn check_ids(&self, s: &ElementSet) -> Result<()> {
        let ground = self.ground_size();
        match s.iter().find(|x| x.index() >= ground) {
            Some(id) => Err(Error::InvalidElement { id, ground }),
            None => Ok(()),
        }
    }

    /// An empty probe.
    pub fn probe(&self) -> Probe<'_> {
        let state = match &self.kind {
            MatroidKind::Linear { .. } => ProbeState::Linear(
                self.vectors
                    .as_ref()
                    .expect("linear payload")
                    .echelon(self.dim),
            ),
            MatroidKind::Graphic { vertices, .. } => {
                ProbeState::Graphic(DisjointSets::new(*vertices))
            }
            MatroidKind::Uniform { .. } => ProbeState::Uniform,
        };
        Probe {
            oracle: self,
            members: Vec::new(),
            state,
        }
    }

    /// A probe loaded with `base`, or `None` if `base` (read as a multiset) is
    /// dependent. Ids are not range-checked.
    pub fn probe_of<I: IntoIterator<Item = ElementId>>(&self, base: I) -> Option<Probe<'_>> {
        let mut probe = self.probe();
        for x in base {
            if !probe.insert(x) {
                return None;
            }
        }
        Some(probe)
    }

    /// Independence of a multiset of ids; a repeated id makes it dependent.
    /// Ids are not range-checked.
    pub fn independent_ids<I: IntoIterator<Item = ElementId>>(&self, ids: I) -> bool {
        self.probe_of(ids).is_some()
    }

    pub fn is_independent(&self, s: &ElementSet) -> Result<bool> {
        self.check_ids(s)?;
        Ok(self.independent_ids(s.iter()))
    }

    /// Size of a maximal independent subset of `s`.
    pub fn rank(&self, s: &ElementSet) -> Result<usize> {
        self.check_ids(s)?;
        let mut probe = self.probe();
        Ok(s.iter().filter(|&x| probe.insert(x)).count())
    }

    /// Lowest-id `a` in `a_set \ b_set` with `b_set + a` independent.
    pub fn augment(&self, a_set: &ElementSet, b_set: &ElementSet) -> Result<ElementId> {
        self.check_ids(a_set)?;
        self.check_ids(b_set)?;
        if a_set.len() <= b_set.len() {
            return Err(Error::Precondition(format!(
                "augment needs |A| > |B|, got {} and {}",
                a_set.len(),
                b_set.len()
            )));
        }
        if !self.independent_ids(a_set.iter()) || !self.independent_ids(b_set.iter()) {
            return Err(Error::Precondition(
                "augment needs independent A and B".into(),
            ));
        }
        let probe = self.probe_of(b_set.iter()).expect("B checked independent");
        a_set.iter().find(|&a| probe.accepts(a)).ok_or_else(|| {
            Error::AxiomViolation(format!("no element of {a_set:?} augments {b_set:?}"))
        })
    }

    /// Grows `base` to an independent superset of size `target` using
    /// elements of `pool`, scanning the pool in id order. Each accepted
    /// element is the lowest-id augmentation from a maximal independent
    /// subset of the pool, so the result is the lowest-id extension.
    pub fn extend_independent(
        &self,
        base: &ElementSet,
        pool: &ElementSet,
        target: usize,
    ) -> Result<ElementSet> {
        self.check_ids(base)?;
        self.check_ids(pool)?;
        let mut probe = self.probe_of(base.iter()).ok_or_else(|| {
            Error::Precondition("extend_independent needs an independent base".into())
        })?;
        let mut out = base.clone();
        for x in pool.iter() {
            if out.len() >= target {
                break;
            }
            if probe.insert(x) {
                out.insert(x);
            }
        }
        if out.len() < target {
            return Err(Error::Infeasible(format!(
                "cannot extend a set of size {} to {target}: rank of base and pool is {}",
                base.len(),
                out.len()
            )));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
enum ProbeState {
    Linear(Echelon),
    Graphic(DisjointSets),
    Uniform,
}

/// An independent set held in incremental form.
#[derive(Clone, Debug)]
pub struct Probe<'m> {
    oracle: &'m MatroidOracle,
    members: Vec<ElementId>,
    state: ProbeState,
}

impl Probe<'_> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.members.contains(&x)
    }

    /// Whether `base + x` is independent. A member `x` is rejected: the
    /// result would repeat an element.
    pub fn accepts(&self, x: ElementId) -> bool {
        if self.contains(x) {
            return false;
        }
        let o = self.oracle;
        match (&self.state, &o.kind) {
            (ProbeState::Linear(ech), _) => {
                ech.is_free(o.vectors.as_ref().expect("linear payload"), x.index())
            }
            (ProbeState::Graphic(dsu), MatroidKind::Graphic { edges, .. }) => {
                let (u, v) = edges[x.index()];
                !dsu.same(u, v)
            }
            (ProbeState::Uniform, MatroidKind::Uniform { k, .. }) => self.members.len() < *k,
            _ => unreachable!("probe state does not match oracle kind"),
        }
    }

    /// Adds `x` if `base + x` is independent.
    pub fn insert(&mut self, x: ElementId) -> bool {
        if self.contains(x) {
            return false;
        }
        let o = self.oracle;
        let ok = match (&mut self.state, &o.kind) {
            (ProbeState::Linear(ech), _) => {
                ech.insert(o.vectors.as_ref().expect("linear payload"), x.index())
            }
            (ProbeState::Graphic(dsu), MatroidKind::Graphic { edges, .. }) => {
                let (u, v) = edges[x.index()];
                dsu.union(u, v)
            }
            (ProbeState::Uniform, MatroidKind::Uniform { k, .. }) => self.members.len() < *k,
            _ => unreachable!("probe state does not match oracle kind"),
        };
        if ok {
            self.members.push(x);
        }
        ok
    }
}
