//! Statistical SET fault key recovery against Dumbo.
//!
//! The mask path runs on a fault-free Spongent circuit, the ciphertext path
//! on a circuit whose Sbox carries the injected faults. Every output nibble
//! of the last faulty Sbox layer lies in the faulty table's image, so a key
//! guess for the bits feeding the final transposition is discarded as soon
//! as it maps an observed output into the missing set.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dumbo::{self, AeadInputs, Key, Nonce};
use crate::error::{Error, Result};
use crate::gf2::Bin160Map;
use crate::netlist::{FaultMap, Netlist};
use crate::sbox::{NibbleSet, SboxTable};
use crate::spongent::{self, p_layer_inv, permute_with, P160, ROUNDS};
use crate::state::{State160, NIBBLES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FaultScope {
    /// The fault is present in every round of the ciphertext-path permutation.
    #[default]
    AllRounds,
    /// Only the last round uses the faulty Sbox.
    LastRoundOnly,
}

impl FaultScope {
    pub fn label(self) -> &'static str {
        match self {
            FaultScope::AllRounds => "all",
            FaultScope::LastRoundOnly => "last",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AttackerModel {
    /// One random first message block per trial, known to the attacker.
    #[default]
    Kpa,
    /// Attacker-chosen first block (all zero).
    Cpa,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackConfig {
    pub fault_map: FaultMap,
    pub fault_scope: FaultScope,
    pub max_queries: u32,
    pub attacker_model: AttackerModel,
    pub rng_seed: u64,
}

impl AttackConfig {
    pub fn new(fault_map: FaultMap) -> Self {
        AttackConfig {
            fault_map,
            fault_scope: FaultScope::AllRounds,
            max_queries: 250,
            attacker_model: AttackerModel::Kpa,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_queries == 0 {
            return Err(Error::InvalidConfig("max_queries must be at least 1".into()));
        }
        Ok(())
    }
}

/// First-block encryption with a faulty Sbox on the ciphertext path.
pub fn faulty_encrypt_block1(
    key: &Key,
    nonce: &Nonce,
    m1: &State160,
    faulty: &SboxTable,
    scope: FaultScope,
) -> State160 {
    Device::new(*key, *faulty, scope).encrypt_block1(nonce, m1)
}

/// The victim: holds the key and a faulted ciphertext-path Sbox.
#[derive(Clone, Debug)]
pub struct Device {
    key: Key,
    expanded_key: State160,
    faulty: SboxTable,
    clean: SboxTable,
    scope: FaultScope,
}

impl Device {
    pub fn new(key: Key, faulty: SboxTable, scope: FaultScope) -> Self {
        Device {
            key,
            expanded_key: dumbo::expanded_key(&key, 1),
            faulty,
            clean: SboxTable::spongent(),
            scope,
        }
    }

    pub fn key(&self) -> &Key {
        &self.key
    }

    pub fn expanded_key(&self) -> State160 {
        self.expanded_key
    }

    pub fn encrypt_block1(&self, nonce: &Nonce, m1: &State160) -> State160 {
        let kp = self.expanded_key;
        let y = permute_with(dumbo::nonce_block(nonce) ^ kp, |r| match self.scope {
            FaultScope::AllRounds => &self.faulty,
            FaultScope::LastRoundOnly if r == ROUNDS - 1 => &self.faulty,
            FaultScope::LastRoundOnly => &self.clean,
        });
        *m1 ^ y ^ kp
    }
}

/// Hypothesised last-layer Sbox output at nibble `s` for key guess `guess`:
/// the bits of `i1` at `P160(4s+3..4s)` XOR the guess (MSB at `P160(4s+3)`).
pub fn extract_candidate_nibble(i1: &State160, s: usize, guess: u8) -> u8 {
    let mut v = 0u8;
    for k in 0..4 {
        v |= (i1.bit(P160[4 * s + k] as usize) as u8) << k;
    }
    v ^ (guess & 0xf)
}

/// Key guesses still viable for each of the 40 nibble positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NibbleCandidates([NibbleSet; NIBBLES]);

impl Default for NibbleCandidates {
    fn default() -> Self {
        Self::full()
    }
}

impl NibbleCandidates {
    pub fn full() -> Self {
        NibbleCandidates([NibbleSet::FULL; NIBBLES])
    }

    pub fn from_sets(sets: [NibbleSet; NIBBLES]) -> Self {
        NibbleCandidates(sets)
    }

    pub fn get(&self, s: usize) -> NibbleSet {
        self.0[s]
    }

    pub fn survivors(&self) -> [u8; NIBBLES] {
        let mut out = [0u8; NIBBLES];
        for (o, c) in out.iter_mut().zip(self.0.iter()) {
            *o = c.len() as u8;
        }
        out
    }

    pub fn is_converged(&self) -> bool {
        self.0.iter().all(|c| c.len() == 1)
    }

    /// Drops every guess that would put an observed output into `missing`.
    pub fn eliminate(&mut self, i1: &State160, missing: NibbleSet) -> Result<()> {
        debug_assert!(!missing.is_empty());
        for (s, cands) in self.0.iter_mut().enumerate() {
            let observed = extract_candidate_nibble(i1, s, 0);
            let doomed = missing.translate(observed);
            *cands = NibbleSet::from_mask(cands.mask() & !doomed.mask());
            if cands.is_empty() {
                return Err(Error::ModelInconsistency { nibble: s });
            }
        }
        Ok(())
    }
}

/// The per-nibble key values the attack targets: nibbles of `p_layer_inv(K')`.
pub fn key_nibbles(expanded_key: &State160) -> [u8; NIBBLES] {
    let t = p_layer_inv(*expanded_key);
    let mut out = [0u8; NIBBLES];
    for (s, o) in out.iter_mut().enumerate() {
        *o = t.nibble(s);
    }
    out
}

pub fn recover_expanded_key(candidates: &NibbleCandidates) -> Result<State160> {
    if !candidates.is_converged() {
        return Err(Error::NotConverged {
            survivors: candidates.survivors().to_vec(),
        });
    }
    let mut kp = State160::ZERO;
    for s in 0..NIBBLES {
        let guess = candidates.get(s).iter().next().expect("singleton");
        for k in 0..4 {
            kp.set_bit(P160[4 * s + k] as usize, (guess >> k) & 1 == 1);
        }
    }
    Ok(kp)
}

fn phi2_inverse() -> Result<&'static Bin160Map> {
    static INV: OnceLock<Option<Bin160Map>> = OnceLock::new();
    INV.get_or_init(|| dumbo::phi2_inverse().ok())
        .as_ref()
        .ok_or_else(|| Error::SingularMatrix {
            rank: dumbo::phi2_matrix().rank(),
        })
}

/// Undo `phi2`, then the permutation, and check the 32 zero padding bits.
pub fn recover_master_key(expanded_key: &State160) -> Result<Key> {
    let l = phi2_inverse()?.apply(expanded_key);
    let w = spongent::spongent_inv(l);
    if w.0[16..].iter().any(|&b| b != 0) {
        return Err(Error::InversionSanity);
    }
    let mut key = [0u8; 16];
    key.copy_from_slice(&w.0[..16]);
    Ok(key)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialResult {
    pub success: bool,
    pub converged: bool,
    pub queries_used: u32,
    pub true_key: Key,
    pub recovered_key: Option<Key>,
    pub survivors_final: [u8; NIBBLES],
}

impl TrialResult {
    pub fn survivors_max(&self) -> u8 {
        self.survivors_final.iter().copied().max().unwrap_or(0)
    }
}

/// A configured attack: the faulty table is derived once from the netlist.
#[derive(Clone, Debug)]
pub struct Attack {
    cfg: AttackConfig,
    table: SboxTable,
    missing: NibbleSet,
}

impl Attack {
    pub fn new(netlist: &Netlist, cfg: AttackConfig) -> Result<Self> {
        cfg.validate()?;
        let table = netlist.faulty_truth_table(&cfg.fault_map)?;
        Ok(Attack {
            missing: table.missing_values(),
            table,
            cfg,
        })
    }

    pub fn config(&self) -> &AttackConfig {
        &self.cfg
    }

    pub fn faulty_table(&self) -> &SboxTable {
        &self.table
    }

    pub fn missing(&self) -> NibbleSet {
        self.missing
    }

    /// One trial driven by the generator seeded with `seed`.
    pub fn run_trial(&self, seed: u64) -> Result<TrialResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let key: Key = rng.gen();
        let m1 = match self.cfg.attacker_model {
            AttackerModel::Kpa => State160(rng.gen()),
            AttackerModel::Cpa => State160::ZERO,
        };
        let device = Device::new(key, self.table, self.cfg.fault_scope);
        // simulator-side knowledge, used only for the soundness check
        let truth = key_nibbles(&device.expanded_key());

        let mut cands = NibbleCandidates::full();
        let mut queries_used = self.cfg.max_queries;
        let mut converged = false;
        for q in 1..=self.cfg.max_queries {
            let nonce: Nonce = rng.gen();
            let c1 = device.encrypt_block1(&nonce, &m1);
            if self.missing.is_empty() {
                continue;
            }
            cands.eliminate(&(c1 ^ m1), self.missing)?;
            if let Some(s) = (0..NIBBLES).find(|&s| !cands.get(s).contains(truth[s])) {
                return Err(Error::SoundnessViolation { nibble: s, query: q });
            }
            if cands.is_converged() {
                queries_used = q;
                converged = true;
                break;
            }
        }

        let mut result = TrialResult {
            success: false,
            converged,
            queries_used,
            true_key: key,
            recovered_key: None,
            survivors_final: cands.survivors(),
        };
        if !converged {
            return Ok(result);
        }
        let Ok(recovered) = recover_expanded_key(&cands).and_then(|kp| recover_master_key(&kp)) else {
            return Ok(result);
        };
        // confirm with one fault-free encryption under a fresh nonce
        let check = AeadInputs {
            key,
            nonce: rng.gen(),
            ad: Vec::new(),
            msg: m1.0.to_vec(),
        };
        let trial = AeadInputs {
            key: recovered,
            ..check.clone()
        };
        if dumbo::encrypt(&check) == dumbo::encrypt(&trial) {
            result.success = true;
            result.recovered_key = Some(recovered);
        }
        Ok(result)
    }
}

/// Runs a single trial seeded with `cfg.rng_seed`.
pub fn run_trial(netlist: &Netlist, cfg: &AttackConfig) -> Result<TrialResult> {
    Attack::new(netlist, cfg.clone())?.run_trial(cfg.rng_seed)
}
