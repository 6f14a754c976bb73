//! The 160-bit state shared by the permutation, the masking LFSR and the attack.
//!
//! Bit `j` lives in bit `j % 8` of octet `j / 8`. Nibble `i` covers bits
//! `4i..4i+3`, bit `4i+3` being its most significant bit.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use crate::error::{Error, Result};

pub const STATE_BITS: usize = 160;
pub const STATE_BYTES: usize = 20;
pub const NIBBLES: usize = 40;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct State160(pub [u8; STATE_BYTES]);

impl State160 {
    pub const ZERO: State160 = State160([0; STATE_BYTES]);

    pub fn from_bytes(bytes: [u8; STATE_BYTES]) -> Self {
        State160(bytes)
    }

    /// Copies up to 20 bytes into a zero state.
    pub fn from_prefix(bytes: &[u8]) -> Self {
        let mut s = [0u8; STATE_BYTES];
        let n = bytes.len().min(STATE_BYTES);
        s[..n].copy_from_slice(&bytes[..n]);
        State160(s)
    }

    pub fn as_bytes(&self) -> &[u8; STATE_BYTES] {
        &self.0
    }

    pub fn unit(bit: usize) -> Self {
        let mut s = Self::ZERO;
        s.set_bit(bit, true);
        s
    }

    #[inline]
    pub fn bit(&self, j: usize) -> bool {
        (self.0[j >> 3] >> (j & 7)) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, j: usize, v: bool) {
        let mask = 1u8 << (j & 7);
        if v {
            self.0[j >> 3] |= mask;
        } else {
            self.0[j >> 3] &= !mask;
        }
    }

    #[inline]
    pub fn nibble(&self, i: usize) -> u8 {
        let b = self.0[i >> 1];
        if i & 1 == 0 {
            b & 0x0f
        } else {
            b >> 4
        }
    }

    #[inline]
    pub fn set_nibble(&mut self, i: usize, v: u8) {
        let b = &mut self.0[i >> 1];
        if i & 1 == 0 {
            *b = (*b & 0xf0) | (v & 0x0f);
        } else {
            *b = (*b & 0x0f) | (v << 4);
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|b| b.count_ones()).sum()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = decode_hex("state", s)?;
        let arr: [u8; STATE_BYTES] = bytes.as_slice().try_into().map_err(|_| Error::InvalidLength {
            field: "state",
            expected: STATE_BYTES,
            actual: bytes.len(),
        })?;
        Ok(State160(arr))
    }
}

impl BitXor for State160 {
    type Output = State160;
    fn bitxor(mut self, rhs: State160) -> State160 {
        self ^= rhs;
        self
    }
}

impl BitXorAssign for State160 {
    fn bitxor_assign(&mut self, rhs: State160) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a ^= b;
        }
    }
}

impl fmt::Debug for State160 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State160({})", self.to_hex())
    }
}

impl fmt::Display for State160 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Lowercase/uppercase hex decode with a field name for diagnostics.
pub fn decode_hex(field: &'static str, s: &str) -> Result<Vec<u8>> {
    hex::decode(s.trim()).map_err(|e| Error::InvalidHex {
        field,
        reason: e.to_string(),
    })
}

/// Decodes hex that must be exactly `N` bytes long.
pub fn decode_hex_array<const N: usize>(field: &'static str, s: &str) -> Result<[u8; N]> {
    let v = decode_hex(field, s)?;
    v.as_slice().try_into().map_err(|_| Error::InvalidLength {
        field,
        expected: N,
        actual: v.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nibble_layout() {
        let mut s = State160::ZERO;
        s.set_nibble(0, 0x8);
        assert!(s.bit(3));
        assert_eq!(s.0[0], 0x08);
        s.set_nibble(1, 0x1);
        assert!(s.bit(4));
        assert_eq!(s.0[0], 0x18);
        s.set_nibble(39, 0xf);
        assert_eq!(s.0[19], 0xf0);
        assert_eq!(s.nibble(39), 0xf);
    }

    #[test]
    fn hex_is_octet_zero_first() {
        let mut s = State160::ZERO;
        s.0[0] = 0xab;
        let h = s.to_hex();
        assert_eq!(h.len(), 40);
        assert!(h.starts_with("ab00"));
        assert_eq!(State160::from_hex(&h).unwrap(), s);
        assert!(State160::from_hex("abcd").is_err());
        assert!(State160::from_hex("zz").is_err());
    }

    #[test]
    fn nibble_roundtrip_all_positions() {
        let mut s = State160::from_bytes([0x5a; 20]);
        for i in 0..NIBBLES {
            let v = s.nibble(i);
            s.set_nibble(i, v);
        }
        assert_eq!(s, State160::from_bytes([0x5a; 20]));
    }
}
