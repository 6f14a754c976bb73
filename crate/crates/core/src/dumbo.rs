//! Dumbo: Elephant AEAD instantiated with Spongent-160.
//!
//! Masks are `mask(K, a, b) = phi2^a . phi1^b . P(K || 0^32)` where `phi1` is
//! the byte-oriented word LFSR and `phi2 = phi1 ^ id`. Message block `i`
//! (1-based) is encrypted under `mask(K, 1, i-1)`, associated-data blocks are
//! authenticated under `mask(K, 0, i-1)` and ciphertext blocks under
//! `mask(K, 2, i-1)`.

use crate::error::Result;
use crate::gf2::Bin160Map;
use crate::spongent::spongent;
use crate::state::{State160, STATE_BYTES};

pub const KEY_BYTES: usize = 16;
pub const NONCE_BYTES: usize = 12;
pub const BLOCK_BYTES: usize = STATE_BYTES;
pub const TAG_BYTES: usize = 8;

/// Fixed Dumbo sizes in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DumboParams {
    pub key_bits: usize,
    pub nonce_bits: usize,
    pub block_bits: usize,
    pub tag_bits: usize,
}

pub const DUMBO: DumboParams = DumboParams {
    key_bits: KEY_BYTES * 8,
    nonce_bits: NONCE_BYTES * 8,
    block_bits: BLOCK_BYTES * 8,
    tag_bits: TAG_BYTES * 8,
};

pub type Key = [u8; KEY_BYTES];
pub type Nonce = [u8; NONCE_BYTES];
pub type Tag = [u8; TAG_BYTES];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AeadInputs {
    pub key: Key,
    pub nonce: Nonce,
    pub ad: Vec<u8>,
    pub msg: Vec<u8>,
}

pub fn phi1(s: State160) -> State160 {
    let x = &s.0;
    let new = x[0].rotate_left(3) ^ (x[3] << 7) ^ (x[13] >> 7);
    let mut out = [0u8; STATE_BYTES];
    out[..STATE_BYTES - 1].copy_from_slice(&x[1..]);
    out[STATE_BYTES - 1] = new;
    State160(out)
}

pub fn phi2(s: State160) -> State160 {
    phi1(s) ^ s
}

/// `K || 0^32` as a state.
pub fn key_block(key: &Key) -> State160 {
    State160::from_prefix(key)
}

pub fn nonce_block(nonce: &Nonce) -> State160 {
    State160::from_prefix(nonce)
}

/// `phi2^a . phi1^b . P(K || 0^32)`
pub fn mask(key: &Key, a: usize, b: usize) -> State160 {
    let mut s = spongent(key_block(key));
    for _ in 0..b {
        s = phi1(s);
    }
    for _ in 0..a {
        s = phi2(s);
    }
    s
}

/// Expanded key of message block `i` (1-based): `phi2(phi1^(i-1)(P(K||0)))`.
pub fn expanded_key(key: &Key, block: usize) -> State160 {
    assert!(block >= 1, "message blocks are numbered from 1");
    mask(key, 1, block - 1)
}

pub fn phi1_matrix() -> Bin160Map {
    Bin160Map::from_linear_fn(phi1)
}

pub fn phi2_matrix() -> Bin160Map {
    Bin160Map::from_linear_fn(phi2)
}

/// Matrix of `phi2 . phi1^b`, the map from `P(K||0)` to block `b+1`'s expanded key.
pub fn block_mask_matrix(b: usize) -> Bin160Map {
    Bin160Map::from_linear_fn(|s| {
        let mut s = s;
        for _ in 0..b {
            s = phi1(s);
        }
        phi2(s)
    })
}

/// Number of `X || 0x01 || 0*` blocks for an input of `len` bytes.
fn padded_blocks(len: usize) -> usize {
    len / BLOCK_BYTES + 1
}

/// Block `i` of `data || 0x01 || 0*`.
fn padded_block(data: &[u8], i: usize) -> State160 {
    let start = i * BLOCK_BYTES;
    let mut s = State160::ZERO;
    if start <= data.len() {
        let end = (start + BLOCK_BYTES).min(data.len());
        s.0[..end - start].copy_from_slice(&data[start..end]);
        if end - start < BLOCK_BYTES {
            s.0[end - start] = 0x01;
        }
    }
    s
}

/// Successive `phi1^i(L)`, materialised lazily.
struct MaskSchedule {
    powers: Vec<State160>,
}

impl MaskSchedule {
    fn new(key: &Key) -> Self {
        MaskSchedule {
            powers: vec![spongent(key_block(key))],
        }
    }

    fn base(&self) -> State160 {
        self.powers[0]
    }

    fn phi1_pow(&mut self, i: usize) -> State160 {
        while self.powers.len() <= i {
            let last = *self.powers.last().unwrap();
            self.powers.push(phi1(last));
        }
        self.powers[i]
    }

    /// `mask(K, 1, i)`
    fn enc(&mut self, i: usize) -> State160 {
        self.phi1_pow(i) ^ self.phi1_pow(i + 1)
    }

    /// `mask(K, 2, i)`, since `(phi1 ^ id)^2 = phi1^2 ^ id` over GF(2).
    fn auth_ct(&mut self, i: usize) -> State160 {
        self.phi1_pow(i) ^ self.phi1_pow(i + 2)
    }
}

fn keystream_xor(sched: &mut MaskSchedule, nonce: &Nonce, input: &[u8]) -> Vec<u8> {
    let n = nonce_block(nonce);
    let mut out = Vec::with_capacity(input.len());
    for (i, chunk) in input.chunks(BLOCK_BYTES).enumerate() {
        let m = sched.enc(i);
        let ks = spongent(n ^ m) ^ m;
        out.extend(chunk.iter().zip(ks.0.iter()).map(|(a, b)| a ^ b));
    }
    out
}

fn compute_tag(sched: &mut MaskSchedule, nonce: &Nonce, ad: &[u8], ct: &[u8]) -> Tag {
    let mut nad = Vec::with_capacity(NONCE_BYTES + ad.len());
    nad.extend_from_slice(nonce);
    nad.extend_from_slice(ad);

    let mut acc = padded_block(&nad, 0);
    for i in 1..padded_blocks(nad.len()) {
        let m = sched.phi1_pow(i);
        acc ^= spongent(padded_block(&nad, i) ^ m) ^ m;
    }
    for j in 0..padded_blocks(ct.len()) {
        let m = sched.auth_ct(j);
        acc ^= spongent(padded_block(ct, j) ^ m) ^ m;
    }
    let l = sched.base();
    let t = spongent(acc ^ l) ^ l;
    let mut tag = [0u8; TAG_BYTES];
    tag.copy_from_slice(&t.0[..TAG_BYTES]);
    tag
}

pub fn encrypt(input: &AeadInputs) -> (Vec<u8>, Tag) {
    let mut sched = MaskSchedule::new(&input.key);
    let ct = keystream_xor(&mut sched, &input.nonce, &input.msg);
    let tag = compute_tag(&mut sched, &input.nonce, &input.ad, &ct);
    (ct, tag)
}

/// Returns `None` (the rejection symbol) when the tag does not verify.
pub fn decrypt(key: &Key, nonce: &Nonce, ad: &[u8], ct: &[u8], tag: &Tag) -> Option<Vec<u8>> {
    let mut sched = MaskSchedule::new(key);
    let expected = compute_tag(&mut sched, nonce, ad, ct);
    let diff = expected.iter().zip(tag.iter()).fold(0u8, |acc, (a, b)| acc | (a ^ b));
    if diff != 0 {
        return None;
    }
    Some(keystream_xor(&mut sched, nonce, ct))
}

/// Checks the 160-by-160 rank of `phi2` and returns its inverse.
pub fn phi2_inverse() -> Result<Bin160Map> {
    phi2_matrix().invert()
}
