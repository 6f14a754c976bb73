//! Exhaustive search for SET fault combinations that remove values from the
//! Sbox image, and their residual key space under elimination.

use std::collections::BTreeMap;
use std::io::Write;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netlist::{FaultMap, Netlist, Polarity, WireId};
use crate::sbox::{NibbleSet, SboxTable};
use crate::state::NIBBLES;

pub const MAX_ORDER: usize = 3;

/// `{d : missing ^ d == missing}`. Always contains 0; its size is a power of two.
pub fn stabilizer(missing: NibbleSet) -> NibbleSet {
    (0u8..16).filter(|&d| missing.translate(d) == missing).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HotspotRecord {
    pub combo_id: usize,
    pub fault_map: FaultMap,
    pub table: SboxTable,
    pub missing: NibbleSet,
    pub missing_count: usize,
    /// Key guesses per nibble that elimination can never separate.
    pub survivors_per_nibble: usize,
    pub residual_keyspace_log2: f64,
}

impl HotspotRecord {
    pub fn classify(combo_id: usize, fault_map: FaultMap, table: SboxTable) -> Self {
        let missing = table.missing_values();
        let survivors = stabilizer(missing).len();
        HotspotRecord {
            combo_id,
            fault_map,
            table,
            missing,
            missing_count: missing.len(),
            survivors_per_nibble: survivors,
            residual_keyspace_log2: NIBBLES as f64 * (survivors as f64).log2(),
        }
    }

    /// A combination is usable when at least one output value disappears.
    pub fn usable(&self) -> bool {
        self.missing_count > 0
    }

    pub fn order(&self) -> usize {
        self.fault_map.len()
    }

    fn tie_key(&self) -> (Vec<usize>, Vec<u8>) {
        self.fault_map
            .iter()
            .map(|(w, p)| (w.0, p.bit()))
            .unzip()
    }
}

/// Every combination of at most `max_order` faulted wires and every polarity
/// assignment, ordered by size, then wire ids, then polarities (SET0 first).
pub fn enumerate_hotspots(netlist: &Netlist, max_order: usize) -> Result<Vec<HotspotRecord>> {
    if !(1..=MAX_ORDER).contains(&max_order) {
        return Err(Error::MaxOrderOutOfRange(max_order));
    }
    let wires = netlist.wire_count();
    let mut out = Vec::new();
    for k in 1..=max_order {
        for combo in (0..wires).combinations(k) {
            for pols in 0u32..(1 << k) {
                let overrides: Vec<(usize, u16)> = combo
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| (w, if (pols >> (k - 1 - i)) & 1 == 1 { 0xffff } else { 0 }))
                    .collect();
                let table = netlist.truth_table_with(&overrides);
                let fault_map = FaultMap::from_pairs(overrides.iter().map(|&(w, v)| {
                    (WireId(w), if v != 0 { Polarity::Set1 } else { Polarity::Set0 })
                }))?;
                out.push(HotspotRecord::classify(out.len(), fault_map, table));
            }
        }
    }
    Ok(out)
}

/// `sum_{j<=k} C(wires, j) 2^j`
pub fn expected_record_count(wires: usize, max_order: usize) -> usize {
    let mut total = 0;
    let mut binom = 1usize;
    for j in 1..=max_order {
        binom = binom * (wires + 1 - j) / j;
        total += binom << j;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectionPolicy {
    /// Fewest missing values (at least one), regardless of residual.
    MinMissingNonzero,
    /// Smallest residual key space, then fewest missing values.
    MinResidual,
    Explicit(FaultMap),
}

pub fn select_fault_combination<'a>(
    records: &'a [HotspotRecord],
    policy: &SelectionPolicy,
) -> Result<&'a HotspotRecord> {
    if let SelectionPolicy::Explicit(fm) = policy {
        return records
            .iter()
            .find(|r| &r.fault_map == fm)
            .ok_or_else(|| Error::UnknownCombination(fm.to_string()));
    }
    let usable = records.iter().filter(|r| r.usable());
    let best = match policy {
        SelectionPolicy::MinMissingNonzero => usable.min_by_key(|r| (r.missing_count, r.tie_key())),
        SelectionPolicy::MinResidual => {
            usable.min_by_key(|r| (r.survivors_per_nibble, r.missing_count, r.tie_key()))
        }
        SelectionPolicy::Explicit(_) => unreachable!(),
    };
    best.ok_or(Error::NoUsableHotspot)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    combo_id: usize,
    wires: String,
    polarities: String,
    missing_count: usize,
    missing_values_hex: String,
    survivors_per_nibble: usize,
    residual_keyspace_log2: &'a str,
    usable: u8,
}

pub fn write_csv<W: Write>(records: &[HotspotRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        let residual = format!("{:.1}", r.residual_keyspace_log2);
        w.serialize(CsvRow {
            combo_id: r.combo_id,
            wires: r.fault_map.wires_label(),
            polarities: r.fault_map.polarities_label(),
            missing_count: r.missing_count,
            missing_values_hex: r.missing.to_hex_digits(),
            survivors_per_nibble: r.survivors_per_nibble,
            residual_keyspace_log2: &residual,
            usable: r.usable() as u8,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Counts per (order, missing_count, survivors_per_nibble) class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HotspotSummary {
    pub total: usize,
    pub usable: usize,
    pub by_missing: BTreeMap<usize, usize>,
    pub classes: BTreeMap<(usize, usize, usize), usize>,
}

impl HotspotSummary {
    pub fn from_records(records: &[HotspotRecord]) -> Self {
        let mut s = HotspotSummary {
            total: records.len(),
            ..Default::default()
        };
        for r in records {
            s.usable += r.usable() as usize;
            *s.by_missing.entry(r.missing_count).or_default() += 1;
            *s.classes
                .entry((r.order(), r.missing_count, r.survivors_per_nibble))
                .or_default() += 1;
        }
        s
    }

    pub fn count(&self, order: usize, missing: usize, survivors: usize) -> usize {
        self.classes.get(&(order, missing, survivors)).copied().unwrap_or(0)
    }

    pub fn report(&self) -> String {
        let mut s = format!("{} combinations, {} usable\n", self.total, self.usable);
        for (m, c) in &self.by_missing {
            s.push_str(&format!("missing_count={m}: {c}\n"));
        }
        s
    }
}

/// Single SET1 faults leaving exactly three values missing.
pub fn single_set1_three_missing(records: &[HotspotRecord]) -> Vec<&HotspotRecord> {
    records
        .iter()
        .filter(|r| {
            r.order() == 1
                && r.missing_count == 3
                && r.fault_map.iter().all(|(_, p)| p == Polarity::Set1)
        })
        .collect()
}
