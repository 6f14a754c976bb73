//! Dumbo (Elephant AEAD over Spongent-160), a gate-level fault model of the
//! Spongent Sbox, and a statistical key-recovery attack driven by
//! single-event-transient (stuck-at) faults in that Sbox.
//!
//! Module map:
//! - [`spongent`]: the permutation, parameterised by an [`SboxTable`].
//! - [`dumbo`]: masking LFSR, AEAD encryption/decryption, mask-layer matrices.
//! - [`netlist`]: the Sbox circuit, fault maps, faulty truth tables.
//! - [`hotspot`]: exhaustive fault-combination search and classification.
//! - [`attack`]: faulty-encryption oracle, elimination, key recovery.
//! - [`campaign`]: seeded Monte-Carlo success-rate experiments.

pub mod attack;
pub mod campaign;
pub mod dumbo;
pub mod error;
pub mod gf2;
pub mod hotspot;
pub mod manifest;
pub mod netlist;
pub mod sbox;
pub mod spongent;
pub mod state;

pub use error::{Error, Result};
pub use netlist::{canonical_netlist, FaultMap, Netlist, Polarity, WireId};
pub use sbox::{NibbleSet, SboxTable};
pub use state::State160;
