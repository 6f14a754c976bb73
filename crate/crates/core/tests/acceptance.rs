//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dumbo_setfa::attack::{recover_master_key, Attack, AttackConfig};
use dumbo_setfa::campaign::{campaign, CampaignReport};
use dumbo_setfa::dumbo::{self, AeadInputs};
use dumbo_setfa::gf2::Bin160Map;
use dumbo_setfa::hotspot::{self, HotspotRecord, HotspotSummary, SelectionPolicy};
use dumbo_setfa::sbox::SPONGENT_SBOX;
use dumbo_setfa::spongent::{p_layer, p_layer_inv, spongent, spongent_inv, P160};
use dumbo_setfa::state::State160;
use dumbo_setfa::{canonical_netlist, FaultMap, Netlist};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sbox_fidelity(n: &Netlist) -> Outcome {
    let empty = FaultMap::new();
    for x in 0..16u8 {
        let y = n.eval(x, &empty).map_err(|e| e.to_string())?;
        check(y == SPONGENT_SBOX[x as usize], format!("S({x:x}) = {y:x}"))?;
    }
    let t = n.faulty_truth_table(&empty).map_err(|e| e.to_string())?;
    check(t.entries() == &SPONGENT_SBOX, "bit-sliced table differs")?;
    Ok(format!("16/16 inputs, {} wires", n.wire_count()))
}

fn permutation_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac2);
    for i in 0..1000 {
        let x = State160(rng.gen());
        check(spongent_inv(spongent(x)) == x, format!("round trip failed on state {i}"))?;
    }
    for j in 0..160 {
        let fwd = P160[j] as usize;
        let expected_inv = if fwd == 159 { 159 } else { (4 * fwd) % 159 };
        check(expected_inv == j, format!("4j mod 159 law fails at {j}"))?;
        check(
            p_layer_inv(p_layer(State160::unit(j))) == State160::unit(j),
            format!("p_layer_inv(p_layer(e_{j})) != e_{j}"),
        )?;
    }
    Ok("1000 states, 160 indices".into())
}

fn aead_round_trip() -> Outcome {
    const MSG_LENS: [usize; 6] = [0, 1, 19, 20, 21, 40];
    const AD_LENS: [usize; 3] = [0, 1, 20];
    let mut rng = ChaCha8Rng::seed_from_u64(0xac3);
    let mut tampered = 0;
    for i in 0..1000 {
        let input = AeadInputs {
            key: rng.gen(),
            nonce: rng.gen(),
            ad: (0..AD_LENS[i % 3]).map(|_| rng.gen()).collect(),
            msg: (0..MSG_LENS[i % 6]).map(|_| rng.gen()).collect(),
        };
        let (ct, tag) = dumbo::encrypt(&input);
        check(ct.len() == input.msg.len(), "ciphertext length")?;
        check(
            dumbo::decrypt(&input.key, &input.nonce, &input.ad, &ct, &tag).as_ref() == Some(&input.msg),
            format!("round trip {i}"),
        )?;

        let (mut ct2, mut tag2) = (ct.clone(), tag);
        let total_bits = ct.len() * 8 + 64;
        let bit = rng.gen_range(0..total_bits);
        if bit < ct.len() * 8 {
            ct2[bit / 8] ^= 1 << (bit % 8);
        } else {
            let b = bit - ct.len() * 8;
            tag2[b / 8] ^= 1 << (b % 8);
        }
        check(
            dumbo::decrypt(&input.key, &input.nonce, &input.ad, &ct2, &tag2).is_none(),
            format!("tampered case {i} accepted"),
        )?;
        tampered += 1;
    }
    Ok(format!("1000 round trips, {tampered} tampered rejected"))
}

fn hotspot_classes(records: &[HotspotRecord]) -> Outcome {
    let s = HotspotSummary::from_records(records);
    let single_one = s.count(1, 1, 1);
    let double_two = s.count(2, 2, 2);
    let three = hotspot::single_set1_three_missing(records);
    let three_note = match three.first() {
        Some(r) => format!("{} single-SET1 3-missing (e.g. {})", three.len(), r.fault_map),
        None => "no single-SET1 3-missing combination".into(),
    };
    check(
        single_one >= 1,
        "netlist deviation: no single fault leaves exactly one value missing",
    )?;
    check(
        double_two >= 1,
        "netlist deviation: no two-fault combination with 2 missing and 2 survivors",
    )?;
    Ok(format!(
        "{} records; {single_one} single-fault 1-missing; {double_two} two-fault 2-missing/2-survivor; {three_note}",
        s.total
    ))
}

fn residual_key_space(n: &Netlist, records: &[HotspotRecord], one_missing: &FaultMap) -> Outcome {
    let two = records
        .iter()
        .find(|r| r.order() == 2 && r.missing_count == 2 && r.survivors_per_nibble == 2)
        .ok_or("no 2-missing combination")?;
    let mut cfg = AttackConfig::new(two.fault_map.clone());
    cfg.max_queries = 500;
    let attack = Attack::new(n, cfg).map_err(|e| e.to_string())?;
    for t in 0..50u64 {
        let r = attack.run_trial(0xac5 ^ t).map_err(|e| e.to_string())?;
        check(
            r.survivors_final.iter().all(|&s| s == 2),
            format!("{}: trial {t} survivors {:?}", two.fault_map, r.survivors_final),
        )?;
    }

    let mut cfg = AttackConfig::new(one_missing.clone());
    cfg.max_queries = 1000;
    let attack = Attack::new(n, cfg).map_err(|e| e.to_string())?;
    for t in 0..50u64 {
        let r = attack.run_trial(0x1ac5 ^ t).map_err(|e| e.to_string())?;
        check(
            r.survivors_final.iter().all(|&s| s == 1),
            format!("{one_missing}: trial {t} survivors {:?}", r.survivors_final),
        )?;
    }
    let singles: Vec<&HotspotRecord> = records
        .iter()
        .filter(|r| r.order() == 1 && r.missing_count == 1)
        .collect();
    for rec in &singles {
        let mut cfg = AttackConfig::new(rec.fault_map.clone());
        cfg.max_queries = 1000;
        let attack = Attack::new(n, cfg).map_err(|e| e.to_string())?;
        for t in 0..5u64 {
            let r = attack.run_trial(0x2ac5 ^ t).map_err(|e| e.to_string())?;
            check(
                r.success && r.survivors_final.iter().all(|&s| s == 1),
                format!("{}: trial {t} survivors {:?}", rec.fault_map, r.survivors_final),
            )?;
        }
    }
    Ok(format!(
        "{} -> 2 per nibble (50x500); {one_missing} -> 1 per nibble (50 trials); all {} single-fault 1-missing combos -> 1",
        two.fault_map,
        singles.len()
    ))
}

fn run_campaign(n: &Netlist, fault: &FaultMap, max_queries: u32, trials: u64) -> Result<CampaignReport, String> {
    let mut cfg = AttackConfig::new(fault.clone());
    cfg.max_queries = max_queries;
    cfg.rng_seed = 0x5e7fa;
    campaign(n, &cfg, trials, 20).map_err(|e| e.to_string())
}

fn success_rate(full: &CampaignReport, short: &CampaignReport) -> Outcome {
    let rate = full.success_rate();
    let q = full.success_queries();
    let in_band = q.iter().filter(|&&v| (60..=260).contains(&v)).count();
    let band_frac = if q.is_empty() { 0.0 } else { in_band as f64 / q.len() as f64 };
    let short_rate = short.success_rate();
    let stats = full.query_stats();
    let desc = format!(
        "rate@250 {rate:.3}, in [60,260] {band_frac:.3}, rate@40 {short_rate:.3}, queries min/median/max {}",
        stats.map_or("n/a".to_string(), |s| format!("{}/{}/{}", s.min, s.median, s.max))
    );
    check(rate >= 0.95, format!("success rate below 0.95: {desc}"))?;
    check(band_frac >= 0.90, format!("query band below 0.90: {desc}"))?;
    check(short_rate <= 0.05, format!("rate at 40 queries above 0.05: {desc}"))?;
    Ok(desc)
}

fn master_key_recovery(full: &CampaignReport) -> Outcome {
    let mut checked = 0;
    for t in full.trials.iter().filter(|t| t.result.success) {
        let k = t.result.recovered_key.ok_or("success without key")?;
        check(k == t.result.true_key, format!("trial {} recovered a wrong key", t.trial))?;
        let kp = dumbo::expanded_key(&t.result.true_key, 1);
        check(recover_master_key(&kp).ok() == Some(k), "padding check failed")?;
        checked += 1;
    }
    let m = dumbo::phi2_matrix();
    let inv = m.invert().map_err(|e| e.to_string())?;
    check(inv.compose(&m) == Bin160Map::identity(), "phi2^-1 * phi2 != I")?;
    check(m.compose(&inv) == Bin160Map::identity(), "phi2 * phi2^-1 != I")?;
    Ok(format!("{checked} successful trials bit-exact, phi2 inverse verified"))
}

fn csv_bytes(r: &CampaignReport) -> (Vec<u8>, Vec<u8>) {
    let (mut c, mut h) = (Vec::new(), Vec::new());
    r.write_campaign_csv(&mut c).unwrap();
    r.write_histogram_csv(&mut h).unwrap();
    (c, h)
}

fn determinism(n: &Netlist, fault: &FaultMap, full: &CampaignReport) -> Outcome {
    let again = run_campaign(n, fault, 250, 200)?;
    check(csv_bytes(full) == csv_bytes(&again), "parallel reruns differ")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let serial = pool.install(|| run_campaign(n, fault, 250, 200))?;
    check(csv_bytes(full) == csv_bytes(&serial), "serial and parallel runs differ")?;
    Ok("campaign.csv and histogram.csv identical across parallel, rerun and single-thread".into())
}

fn main() -> ExitCode {
    let n = canonical_netlist();
    let mut failures = 0;
    let mut report = |id: &str, name: &str, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS AC{id} {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL AC{id} {name} ({secs:.1}s): {detail}");
            }
        }
    };

    let t = Instant::now();
    report("1", "sbox fidelity", t, sbox_fidelity(&n));

    let t = Instant::now();
    report("2", "permutation soundness", t, permutation_soundness());

    let t = Instant::now();
    report("3", "aead round trip", t, aead_round_trip());

    let t = Instant::now();
    let records = hotspot::enumerate_hotspots(&n, 2).expect("enumeration");
    report("4", "hot-spot behavior classes", t, hotspot_classes(&records));

    let chosen = hotspot::select_fault_combination(&records, &SelectionPolicy::MinResidual)
        .expect("a usable hotspot")
        .fault_map
        .clone();

    let t = Instant::now();
    report("5", "residual key space", t, residual_key_space(&n, &records, &chosen));

    let t = Instant::now();
    let full = run_campaign(&n, &chosen, 250, 200);
    let short = run_campaign(&n, &chosen, 40, 200);
    let ac6 = match (&full, &short) {
        (Ok(f), Ok(s)) => success_rate(f, s),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    report("6", "success-rate reproduction", t, ac6);

    let t = Instant::now();
    let ac7 = full.as_ref().map_err(Clone::clone).and_then(master_key_recovery);
    report("7", "master-key recovery", t, ac7);

    let t = Instant::now();
    let ac8 = full.as_ref().map_err(Clone::clone).and_then(|f| determinism(&n, &chosen, f));
    report("8", "determinism", t, ac8);

    if failures == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
