//! 4-bit Sbox tables (possibly faulty) and nibble sets.

use std::fmt;

use crate::error::{Error, Result};

/// The fault-free Spongent Sbox.
pub const SPONGENT_SBOX: [u8; 16] = [
    0xe, 0xd, 0xb, 0x0, 0x2, 0x1, 0x4, 0xf, 0x7, 0xa, 0x8, 0x5, 0x9, 0xc, 0x3, 0x6,
];

/// A set of nibble values, stored as a 16-bit membership mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NibbleSet(u16);

impl NibbleSet {
    pub const EMPTY: NibbleSet = NibbleSet(0);
    pub const FULL: NibbleSet = NibbleSet(0xffff);

    pub fn from_mask(mask: u16) -> Self {
        NibbleSet(mask)
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn contains(self, v: u8) -> bool {
        v < 16 && (self.0 >> v) & 1 == 1
    }

    pub fn insert(&mut self, v: u8) {
        self.0 |= 1 << (v & 0xf);
    }

    pub fn remove(&mut self, v: u8) {
        self.0 &= !(1 << (v & 0xf));
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self) -> Self {
        NibbleSet(!self.0)
    }

    /// `{v ^ delta : v in self}`
    pub fn translate(self, delta: u8) -> Self {
        self.iter().fold(NibbleSet::EMPTY, |mut acc, v| {
            acc.insert(v ^ delta);
            acc
        })
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0u8..16).filter(move |&v| self.contains(v))
    }

    /// Concatenated lowercase hex digits in ascending order, e.g. `"27"` for {2,7}.
    pub fn to_hex_digits(self) -> String {
        self.iter().map(|v| format!("{v:x}")).collect()
    }
}

impl FromIterator<u8> for NibbleSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut s = NibbleSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for NibbleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A 16-entry nibble-to-nibble mapping. Faulty tables need not be bijective.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SboxTable([u8; 16]);

impl SboxTable {
    pub fn spongent() -> Self {
        SboxTable(SPONGENT_SBOX)
    }

    pub fn identity() -> Self {
        let mut t = [0u8; 16];
        for (i, e) in t.iter_mut().enumerate() {
            *e = i as u8;
        }
        SboxTable(t)
    }

    pub fn new(entries: [u8; 16]) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e > 0xf) {
            return Err(Error::NibbleOutOfRange(bad as u32));
        }
        Ok(SboxTable(entries))
    }

    pub fn entries(&self) -> &[u8; 16] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.0[(x & 0xf) as usize]
    }

    pub fn image(&self) -> NibbleSet {
        self.0.iter().copied().collect()
    }

    /// Output values that never occur.
    pub fn missing_values(&self) -> NibbleSet {
        self.image().complement()
    }

    pub fn is_bijective(&self) -> bool {
        self.image() == NibbleSet::FULL
    }

    pub fn inverse(&self) -> Result<SboxTable> {
        if !self.is_bijective() {
            return Err(Error::NonBijectiveSbox);
        }
        let mut inv = [0u8; 16];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Ok(SboxTable(inv))
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|v| format!("{v:x}")).collect()
    }
}

impl Default for SboxTable {
    fn default() -> Self {
        SboxTable::spongent()
    }
}

impl fmt::Debug for SboxTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SboxTable({})", self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spongent_is_bijective() {
        let t = SboxTable::spongent();
        assert!(t.is_bijective());
        assert!(t.missing_values().is_empty());
        let inv = t.inverse().unwrap();
        for x in 0..16u8 {
            assert_eq!(inv.apply(t.apply(x)), x);
        }
    }

    #[test]
    fn constant_table_misses_fifteen() {
        let t = SboxTable::new([0xe; 16]).unwrap();
        assert_eq!(t.missing_values().len(), 15);
        assert!(!t.missing_values().contains(0xe));
        assert!(matches!(t.inverse(), Err(Error::NonBijectiveSbox)));
    }

    #[test]
    fn rejects_wide_entries() {
        let mut e = SPONGENT_SBOX;
        e[3] = 0x10;
        assert!(SboxTable::new(e).is_err());
    }

    #[test]
    fn image_and_missing_partition() {
        let t = SboxTable::new([1, 1, 2, 3, 5, 8, 13, 1, 2, 3, 5, 8, 13, 0, 0, 0]).unwrap();
        assert_eq!(t.image().len() + t.missing_values().len(), 16);
    }

    #[test]
    fn translate_and_hex() {
        let s: NibbleSet = [2u8, 7].into_iter().collect();
        assert_eq!(s.translate(5), s);
        assert_eq!(s.to_hex_digits(), "27");
        assert_eq!(format!("{s:?}"), "{2, 7}");
    }
}
