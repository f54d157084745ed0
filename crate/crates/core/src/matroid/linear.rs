//! Exact linear algebra over prime fields GF(p), p < 2^16.
//!
//! Independence is decided by an incremental echelon form: each stored
//! vector is keyed by its lowest nonzero coordinate (its pivot) and has
//! nothing below it, so reducing a candidate strictly raises its lowest
//! nonzero coordinate until it either vanishes or lands on a free pivot.
//! GF(2) vectors are bit-packed.

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

#[inline]
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Ground-set vectors in the representation the echelon form consumes.
#[derive(Clone, Debug)]
pub(crate) enum Vectors {
    Binary { data: Vec<Vec<u64>> },
    Prime { p: u32, data: Vec<Vec<u32>> },
}

impl Vectors {
    pub fn new(p: u32, dim: usize, coords: &[Vec<u16>]) -> Self {
        if p == 2 {
            let words = dim.div_ceil(64).max(1);
            let data = coords
                .iter()
                .map(|v| {
                    let mut w = vec![0u64; words];
                    for (k, &c) in v.iter().enumerate() {
                        if c % 2 == 1 {
                            w[k / 64] |= 1 << (k % 64);
                        }
                    }
                    w
                })
                .collect();
            Vectors::Binary { data }
        } else {
            let data = coords
                .iter()
                .map(|v| v.iter().map(|&c| c as u32 % p).collect())
                .collect();
            Vectors::Prime { p, data }
        }
    }

    pub fn echelon(&self, dim: usize) -> Echelon {
        match self {
            Vectors::Binary { .. } => Echelon::Binary {
                pivots: vec![None; dim],
            },
            Vectors::Prime { p, .. } => Echelon::Prime {
                p: *p,
                pivots: vec![None; dim],
            },
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Echelon {
    Binary {
        pivots: Vec<Option<Vec<u64>>>,
    },
    Prime {
        p: u32,
        pivots: Vec<Option<Vec<u32>>>,
    },
}

impl Echelon {
    /// Reduces element `id` against the stored rows. Returns the reduced
    /// vector and its pivot, or `None` if it lies in the span.
    fn reduce(&self, vectors: &Vectors, id: usize) -> Option<Reduced> {
        match (self, vectors) {
            (Echelon::Binary { pivots }, Vectors::Binary { data, .. }) => {
                let mut x = data[id].clone();
                loop {
                    let k = lowest_bit(&x)?;
                    match &pivots[k] {
                        Some(v) => x.iter_mut().zip(v).for_each(|(a, b)| *a ^= b),
                        None => return Some(Reduced::Binary(k, x)),
                    }
                }
            }
            (Echelon::Prime { p, pivots }, Vectors::Prime { data, .. }) => {
                let p = *p;
                let mut x = data[id].clone();
                let mut k = 0;
                while k < x.len() {
                    if x[k] != 0 {
                        match &pivots[k] {
                            Some(v) => {
                                let factor = p - x[k];
                                for (a, &b) in x[k..].iter_mut().zip(&v[k..]) {
                                    *a = (*a + mul_mod(factor, b, p)) % p;
                                }
                            }
                            None => {
                                let inv = inv_mod(x[k], p);
                                x[k..].iter_mut().for_each(|a| *a = mul_mod(*a, inv, p));
                                return Some(Reduced::Prime(k, x));
                            }
                        }
                    }
                    k += 1;
                }
                None
            }
            _ => unreachable!("echelon and vectors built for different fields"),
        }
    }

    pub fn is_free(&self, vectors: &Vectors, id: usize) -> bool {
        self.reduce(vectors, id).is_some()
    }

    /// Adds element `id` to the span if it is not already in it.
    pub fn insert(&mut self, vectors: &Vectors, id: usize) -> bool {
        match self.reduce(vectors, id) {
            None => false,
            Some(Reduced::Binary(k, v)) => {
                if let Echelon::Binary { pivots } = self {
                    pivots[k] = Some(v);
                }
                true
            }
            Some(Reduced::Prime(k, v)) => {
                if let Echelon::Prime { pivots, .. } = self {
                    pivots[k] = Some(v);
                }
                true
            }
        }
    }
}

enum Reduced {
    Binary(usize, Vec<u64>),
    Prime(usize, Vec<u32>),
}

#[inline]
fn lowest_bit(x: &[u64]) -> Option<usize> {
    x.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u32> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(65521));
        assert!(!is_prime(65535));
    }

    #[test]
    fn inverses() {
        for p in [2u32, 3, 5, 7, 65521] {
            for a in 1..p.min(200) {
                assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
            }
        }
    }

    #[test]
    fn binary_and_prime_paths_agree_on_gf2_data() {
        // Same vectors run through the packed path and the generic path (p = 2
        // forced through Prime by building it by hand).
        let coords: Vec<Vec<u16>> =
            vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0], vec![0, 0, 1]];
        let packed = Vectors::new(2, 3, &coords);
        let generic = Vectors::Prime {
            p: 2,
            data: coords
                .iter()
                .map(|v| v.iter().map(|&c| c as u32).collect())
                .collect(),
        };
        let mut a = packed.echelon(3);
        let mut b = generic.echelon(3);
        for id in 0..4 {
            assert_eq!(a.insert(&packed, id), b.insert(&generic, id), "id {id}");
        }
    }
}
