//! Spongent-160: 80 rounds of round-constant addition, a 40-way parallel
//! 4-bit Sbox layer and the bit transposition `j -> 40 j mod 159`.
//!
//! The Sbox table is an argument so that faulty tables can drive the
//! ciphertext path while the mask path stays fault-free.

use crate::error::{Error, Result};
use crate::sbox::SboxTable;
use crate::state::{State160, NIBBLES, STATE_BITS};

pub const ROUNDS: usize = 80;
pub const ICOUNTER_SEED: u8 = 0b100_0101;

/// State of the 7-bit round-counter LFSR, feedback polynomial x^7 + x^6 + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ICounter(u8);

impl ICounter {
    pub fn new(value: u8) -> Result<Self> {
        let value = value & 0x7f;
        if value == 0 {
            return Err(Error::ZeroCounter);
        }
        Ok(ICounter(value))
    }

    pub fn seed() -> Self {
        ICounter(ICOUNTER_SEED)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Shift left, new bit 0 is b6 ^ b5.
    pub fn next(self) -> Self {
        ICounter(icounter_step(self.0))
    }
}

const fn icounter_step(s: u8) -> u8 {
    let fb = ((s >> 6) ^ (s >> 5)) & 1;
    ((s << 1) | fb) & 0x7f
}

const fn round_constants() -> [u8; ROUNDS] {
    let mut out = [0u8; ROUNDS];
    let mut s = ICOUNTER_SEED;
    let mut r = 0;
    while r < ROUNDS {
        out[r] = s;
        s = icounter_step(s);
        r += 1;
    }
    out
}

/// Counter value used by round `r` (0-based), round 0 uses the seed.
pub const ROUND_CONSTANTS: [u8; ROUNDS] = round_constants();

const fn p_table() -> [u8; STATE_BITS] {
    let mut t = [0u8; STATE_BITS];
    let mut j = 0;
    while j < STATE_BITS - 1 {
        t[j] = ((40 * j) % 159) as u8;
        j += 1;
    }
    t[STATE_BITS - 1] = (STATE_BITS - 1) as u8;
    t
}

const fn p_inv_table() -> [u8; STATE_BITS] {
    let mut t = [0u8; STATE_BITS];
    let mut j = 0;
    while j < STATE_BITS - 1 {
        t[j] = ((4 * j) % 159) as u8;
        j += 1;
    }
    t[STATE_BITS - 1] = (STATE_BITS - 1) as u8;
    t
}

/// Destination of bit `j` under the bit transposition.
pub const P160: [u8; STATE_BITS] = p_table();
pub const P160_INV: [u8; STATE_BITS] = p_inv_table();

pub fn add_round_constant(x: State160, counter: ICounter) -> State160 {
    add_counter_value(x, counter.0)
}

#[inline]
fn add_counter_value(mut x: State160, c: u8) -> State160 {
    for j in 0..7 {
        if (c >> j) & 1 == 1 {
            x.0[0] ^= 1 << j;
            let k = STATE_BITS - 1 - j;
            x.0[k >> 3] ^= 1 << (k & 7);
        }
    }
    x
}

pub fn sbox_layer(mut x: State160, table: &SboxTable) -> State160 {
    for b in x.0.iter_mut() {
        *b = table.apply(*b & 0xf) | (table.apply(*b >> 4) << 4);
    }
    debug_assert_eq!(x.0.len() * 2, NIBBLES);
    x
}

#[inline]
fn transpose(x: &State160, table: &[u8; STATE_BITS]) -> State160 {
    let mut out = State160::ZERO;
    for (byte_idx, &byte) in x.0.iter().enumerate() {
        let mut b = byte;
        while b != 0 {
            let k = b.trailing_zeros() as usize;
            let dst = table[byte_idx * 8 + k] as usize;
            out.0[dst >> 3] |= 1 << (dst & 7);
            b &= b - 1;
        }
    }
    out
}

pub fn p_layer(x: State160) -> State160 {
    transpose(&x, &P160)
}

pub fn p_layer_inv(x: State160) -> State160 {
    transpose(&x, &P160_INV)
}

/// Full permutation with a single table for all rounds.
pub fn permute(x: State160, table: &SboxTable) -> State160 {
    permute_with(x, |_| table)
}

/// Full permutation, `table_for(r)` supplying the Sbox of round `r` (0-based).
pub fn permute_with<'a, F>(mut x: State160, table_for: F) -> State160
where
    F: Fn(usize) -> &'a SboxTable,
{
    for (r, &c) in ROUND_CONSTANTS.iter().enumerate() {
        x = add_counter_value(x, c);
        x = sbox_layer(x, table_for(r));
        x = p_layer(x);
    }
    x
}

/// Inverse of [`permute`] for a bijective table.
pub fn permute_inv(x: State160, table: &SboxTable) -> Result<State160> {
    let inv = table.inverse()?;
    let mut x = x;
    for &c in ROUND_CONSTANTS.iter().rev() {
        x = p_layer_inv(x);
        x = sbox_layer(x, &inv);
        x = add_counter_value(x, c);
    }
    Ok(x)
}

/// Fault-free Spongent-160.
pub fn spongent(x: State160) -> State160 {
    permute(x, &SboxTable::spongent())
}

/// Inverse of fault-free Spongent-160.
pub fn spongent_inv(x: State160) -> State160 {
    permute_inv(x, &SboxTable::spongent()).expect("spongent sbox is bijective")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut impl Rng) -> State160 {
        let mut s = [0u8; 20];
        rng.fill(&mut s);
        State160(s)
    }

    #[test]
    fn icounter_single_step() {
        assert_eq!(ICounter::new(0b100_0101).unwrap().next().value(), 0b000_1011);
    }

    #[test]
    fn icounter_rejects_zero() {
        assert!(matches!(ICounter::new(0), Err(Error::ZeroCounter)));
    }

    #[test]
    fn icounter_period_127_from_every_state() {
        for v in 1..=127u8 {
            let start = ICounter::new(v).unwrap();
            let mut s = start;
            for step in 1..=127 {
                s = s.next();
                assert_ne!(s.value(), 0);
                if step < 127 {
                    assert_ne!(s, start, "short cycle from {v:#x} at {step}");
                }
            }
            assert_eq!(s, start);
        }
    }

    #[test]
    fn round_constants_follow_seed() {
        assert_eq!(ROUND_CONSTANTS[0], ICOUNTER_SEED);
        assert_eq!(ROUND_CONSTANTS[1], 0b000_1011);
        assert!(ROUND_CONSTANTS.iter().all(|&c| c != 0));
    }

    #[test]
    fn round_constant_placement() {
        let y = add_round_constant(State160::ZERO, ICounter::seed());
        let set: Vec<usize> = (0..160).filter(|&j| y.bit(j)).collect();
        assert_eq!(set, vec![0, 2, 6, 153, 157, 159]);
    }

    #[test]
    fn round_constant_is_involution_and_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_state(&mut rng);
        let c = ICounter::new(0x5a).unwrap();
        let y = add_round_constant(x, c);
        assert_eq!(add_round_constant(y, c), x);
        for j in 7..153 {
            assert_eq!(x.bit(j), y.bit(j));
        }
    }

    #[test]
    fn sbox_layer_examples() {
        let t = SboxTable::spongent();
        assert_eq!(sbox_layer(State160::ZERO, &t), State160([0xee; 20]));
        assert_eq!(sbox_layer(State160([0xff; 20]), &t), State160([0x66; 20]));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_state(&mut rng);
        assert_eq!(sbox_layer(x, &SboxTable::identity()), x);
    }

    #[test]
    fn p_layer_examples() {
        assert_eq!(p_layer(State160::unit(1)), State160::unit(40));
        assert_eq!(p_layer(State160::unit(159)), State160::unit(159));
        assert_eq!(p_layer(State160::unit(4)), State160::unit(1));
        assert_eq!(p_layer_inv(State160::unit(1)), State160::unit(4));
    }

    #[test]
    fn p_layer_inverse_exhaustive() {
        for j in 0..160 {
            assert_eq!(P160_INV[P160[j] as usize] as usize, j);
            assert_eq!(p_layer_inv(p_layer(State160::unit(j))), State160::unit(j));
        }
    }

    #[test]
    fn permute_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = random_state(&mut rng);
            assert_eq!(spongent_inv(spongent(x)), x);
        }
        assert_eq!(spongent_inv(spongent(State160::ZERO)), State160::ZERO);
    }

    #[test]
    fn permute_inv_rejects_faulty_table() {
        let t = SboxTable::new([0; 16]).unwrap();
        assert!(matches!(permute_inv(State160::ZERO, &t), Err(Error::NonBijectiveSbox)));
    }

    #[test]
    fn faulty_output_nibbles_lie_in_image() {
        let mut e = SPONGENT_SBOX_COPY;
        e[5] = e[4];
        let t = SboxTable::new(e).unwrap();
        let image = t.image();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let y = p_layer_inv(permute(random_state(&mut rng), &t));
            for i in 0..NIBBLES {
                assert!(image.contains(y.nibble(i)));
            }
        }
    }

    const SPONGENT_SBOX_COPY: [u8; 16] = crate::sbox::SPONGENT_SBOX;
}
