//! Seeded Monte-Carlo success-rate campaigns.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::attack::{Attack, AttackConfig, TrialResult};
use crate::error::{Error, Result};
use crate::netlist::Netlist;

pub const DEFAULT_BUCKET_WIDTH: u32 = 20;

/// Seed of trial `index`: the campaign seed XOR the index.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub sub_seed: u64,
    pub result: TrialResult,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HistogramBucket {
    pub bucket_upper_bound: u32,
    pub success_count: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignReport {
    pub config: AttackConfig,
    pub bucket_width: u32,
    pub trials: Vec<TrialRecord>,
    pub histogram: Vec<HistogramBucket>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryStats {
    pub min: u32,
    pub median: u32,
    pub max: u32,
}

impl CampaignReport {
    pub fn successes(&self) -> usize {
        self.trials.iter().filter(|t| t.result.success).count()
    }

    pub fn success_rate(&self) -> f64 {
        self.successes() as f64 / self.trials.len() as f64
    }

    /// Queries used by successful trials, in trial order.
    pub fn success_queries(&self) -> Vec<u32> {
        self.trials
            .iter()
            .filter(|t| t.result.success)
            .map(|t| t.result.queries_used)
            .collect()
    }

    /// Lower median for even counts.
    pub fn query_stats(&self) -> Option<QueryStats> {
        let mut q = self.success_queries();
        if q.is_empty() {
            return None;
        }
        q.sort_unstable();
        Some(QueryStats {
            min: q[0],
            median: q[(q.len() - 1) / 2],
            max: q[q.len() - 1],
        })
    }

    pub fn write_campaign_csv<W: Write>(&self, writer: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            trial: u64,
            sub_seed: u64,
            success: u8,
            queries_used: u32,
            survivors_max: u8,
        }
        let mut w = csv::Writer::from_writer(writer);
        for t in &self.trials {
            w.serialize(Row {
                trial: t.trial,
                sub_seed: t.sub_seed,
                success: t.result.success as u8,
                queries_used: t.result.queries_used,
                survivors_max: t.result.survivors_max(),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_histogram_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for b in &self.histogram {
            w.serialize(b)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Successful trials counted in buckets `(u - width, u]`, `u` running over
/// multiples of `width` up to the first one covering `max_queries`.
pub fn histogram(trials: &[TrialRecord], bucket_width: u32, max_queries: u32) -> Vec<HistogramBucket> {
    let n = max_queries.div_ceil(bucket_width).max(1);
    let mut buckets: Vec<HistogramBucket> = (1..=n)
        .map(|k| HistogramBucket {
            bucket_upper_bound: k * bucket_width,
            success_count: 0,
        })
        .collect();
    for t in trials.iter().filter(|t| t.result.success) {
        let k = t.result.queries_used.div_ceil(bucket_width).max(1) as usize;
        let k = k.min(buckets.len());
        buckets[k - 1].success_count += 1;
    }
    buckets
}

/// Runs `n_trials` independent trials in parallel; output order and content
/// depend only on the configuration.
pub fn campaign(
    netlist: &Netlist,
    cfg: &AttackConfig,
    n_trials: u64,
    bucket_width: u32,
) -> Result<CampaignReport> {
    if n_trials == 0 {
        return Err(Error::InvalidConfig("campaign needs at least one trial".into()));
    }
    if bucket_width == 0 {
        return Err(Error::InvalidConfig("bucket width must be at least 1".into()));
    }
    let attack = Attack::new(netlist, cfg.clone())?;
    let trials = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let seed = sub_seed(cfg.rng_seed, i);
            attack.run_trial(seed).map(|result| TrialRecord {
                trial: i,
                sub_seed: seed,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let histogram = histogram(&trials, bucket_width, cfg.max_queries);
    Ok(CampaignReport {
        config: cfg.clone(),
        bucket_width,
        trials,
        histogram,
    })
}
