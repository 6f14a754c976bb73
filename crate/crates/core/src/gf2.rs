//! 160x160 matrices over GF(2), used to invert the linear mask layer.

use std::fmt;

use crate::error::{Error, Result};
use crate::state::{State160, STATE_BITS};

const WORDS: usize = 3;

type Row = [u64; WORDS];

#[inline]
fn row_bit(r: &Row, j: usize) -> bool {
    (r[j >> 6] >> (j & 63)) & 1 == 1
}

#[inline]
fn row_flip(r: &mut Row, j: usize) {
    r[j >> 6] ^= 1 << (j & 63);
}

fn state_to_row(s: &State160) -> Row {
    let mut r = [0u64; WORDS];
    for (i, &b) in s.0.iter().enumerate() {
        r[i / 8] |= (b as u64) << ((i % 8) * 8);
    }
    r
}

/// Linear map on [`State160`]; `rows[i]` holds the coefficients of output bit `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct Bin160Map {
    rows: Box<[Row; STATE_BITS]>,
}

impl Bin160Map {
    pub fn zero() -> Self {
        Bin160Map {
            rows: Box::new([[0; WORDS]; STATE_BITS]),
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..STATE_BITS {
            row_flip(&mut m.rows[i], i);
        }
        m
    }

    /// Builds the matrix of a linear `f` by evaluating it on the 160 unit vectors.
    pub fn from_linear_fn<F: Fn(State160) -> State160>(f: F) -> Self {
        let mut m = Self::zero();
        for j in 0..STATE_BITS {
            let col = f(State160::unit(j));
            for i in 0..STATE_BITS {
                if col.bit(i) {
                    row_flip(&mut m.rows[i], j);
                }
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        row_bit(&self.rows[i], j)
    }

    pub fn apply(&self, x: &State160) -> State160 {
        let v = state_to_row(x);
        let mut out = State160::ZERO;
        for (i, r) in self.rows.iter().enumerate() {
            let parity = r.iter().zip(v.iter()).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set_bit(i, true);
            }
        }
        out
    }

    /// `self * rhs`, i.e. apply `rhs` first.
    pub fn compose(&self, rhs: &Bin160Map) -> Bin160Map {
        let mut out = Self::zero();
        for i in 0..STATE_BITS {
            let mut acc = [0u64; WORDS];
            for k in 0..STATE_BITS {
                if row_bit(&self.rows[i], k) {
                    for w in 0..WORDS {
                        acc[w] ^= rhs.rows[k][w];
                    }
                }
            }
            out.rows[i] = acc;
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut rows = *self.rows;
        let mut rank = 0;
        for col in 0..STATE_BITS {
            let Some(p) = (rank..STATE_BITS).find(|&r| row_bit(&rows[r], col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row_bit(row, col) {
                    for w in 0..WORDS {
                        row[w] ^= pivot[w];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Gauss-Jordan inversion on the augmented matrix `[self | I]`.
    pub fn invert(&self) -> Result<Bin160Map> {
        let mut a = *self.rows;
        let mut inv = *Self::identity().rows;
        for col in 0..STATE_BITS {
            let Some(p) = (col..STATE_BITS).find(|&r| row_bit(&a[r], col)) else {
                return Err(Error::SingularMatrix { rank: self.rank() });
            };
            a.swap(col, p);
            inv.swap(col, p);
            let (pa, pi) = (a[col], inv[col]);
            for r in 0..STATE_BITS {
                if r != col && row_bit(&a[r], col) {
                    for w in 0..WORDS {
                        a[r][w] ^= pa[w];
                        inv[r][w] ^= pi[w];
                    }
                }
            }
        }
        Ok(Bin160Map { rows: Box::new(inv) })
    }
}

impl fmt::Debug for Bin160Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bin160Map(rank {})", self.rank())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spongent::p_layer;

    #[test]
    fn identity_inverts_to_identity() {
        let id = Bin160Map::identity();
        assert_eq!(id.invert().unwrap(), id);
        assert_eq!(id.rank(), 160);
    }

    #[test]
    fn zero_is_singular() {
        assert!(matches!(Bin160Map::zero().invert(), Err(Error::SingularMatrix { rank: 0 })));
    }

    #[test]
    fn permutation_matrix_matches_function() {
        let m = Bin160Map::from_linear_fn(p_layer);
        let x = State160::from_bytes(*b"0123456789abcdefghij");
        assert_eq!(m.apply(&x), p_layer(x));
        let inv = m.invert().unwrap();
        assert_eq!(inv.apply(&p_layer(x)), x);
        assert_eq!(inv.compose(&m), Bin160Map::identity());
    }

    #[test]
    fn rank_deficient_projection() {
        let m = Bin160Map::from_linear_fn(|mut s: State160| {
            s.0[19] = 0;
            s
        });
        assert_eq!(m.rank(), 152);
        assert!(m.invert().is_err());
    }
}
