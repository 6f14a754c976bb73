//! `setfa`: batch front end for the Dumbo AEAD, the Sbox fault model and the
//! SET fault key-recovery experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 authentication failure (`BOT`),
//! 3 attack did not converge to a verified key.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dumbo_setfa::attack::{Attack, AttackConfig, AttackerModel, FaultScope};
use dumbo_setfa::campaign::{campaign, DEFAULT_BUCKET_WIDTH};
use dumbo_setfa::dumbo::{self, AeadInputs, Key, Nonce, Tag};
use dumbo_setfa::hotspot::{self, HotspotSummary, SelectionPolicy};
use dumbo_setfa::manifest::RunManifest;
use dumbo_setfa::state::{decode_hex, decode_hex_array};
use dumbo_setfa::{canonical_netlist, Error, FaultMap, Netlist};

const EXIT_USAGE: u8 = 1;
const EXIT_AUTH: u8 = 2;
const EXIT_NO_KEY: u8 = 3;

#[derive(Parser)]
#[command(name = "setfa", version, about = "Dumbo AEAD and SET fault analysis of its Spongent Sbox")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    /// Faulty Sbox in all 80 rounds of the ciphertext path
    All,
    /// Faulty Sbox in the last round only
    Last,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// Random first message block, known to the attacker
    Kpa,
    /// All-zero first message block chosen by the attacker
    Cpa,
}

#[derive(clap::Args)]
struct AttackArgs {
    /// Fault spec such as `w10=0` or `w4=0,w10=0`; `auto` picks the
    /// smallest-residual combination of order <= 2; empty means no fault
    #[arg(long, default_value = "auto")]
    fault: String,
    #[arg(long, value_enum, default_value = "all")]
    scope: Scope,
    #[arg(long, default_value_t = 250)]
    max_queries: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "kpa")]
    model: Model,
}

#[derive(Subcommand)]
enum Cmd {
    /// Encrypt; prints `ct=<hex>` and `tag=<hex>`
    Encrypt {
        /// 16-byte key, 32 hex digits
        #[arg(long)]
        key: String,
        /// 12-byte nonce, 24 hex digits
        #[arg(long)]
        nonce: String,
        #[arg(long, default_value = "")]
        ad: String,
        #[arg(long, default_value = "")]
        msg: String,
    },
    /// Decrypt; prints the message hex, or `BOT` (exit 2) if the tag fails
    Decrypt {
        #[arg(long)]
        key: String,
        #[arg(long)]
        nonce: String,
        #[arg(long, default_value = "")]
        ad: String,
        #[arg(long, default_value = "")]
        ct: String,
        /// 8-byte tag, 16 hex digits
        #[arg(long)]
        tag: String,
    },
    /// Print the Sbox netlist and its truth table under an optional fault
    Netlist {
        #[arg(long, default_value = "")]
        fault: String,
    },
    /// Enumerate fault combinations; writes hotspots.csv, netlist.txt, manifest.json
    Hotspots {
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one key-recovery trial
    Attack(AttackArgs),
    /// Run many trials; writes campaign.csv, histogram.csv, manifest.json
    Campaign {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_BUCKET_WIDTH)]
        bucket: u32,
        #[command(flatten)]
        attack: AttackArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Encrypt { key, nonce, ad, msg } => {
            let input = AeadInputs {
                key: decode_hex_array::<16>("key", &key)?,
                nonce: decode_hex_array::<12>("nonce", &nonce)?,
                ad: decode_hex("ad", &ad)?,
                msg: decode_hex("msg", &msg)?,
            };
            let (ct, tag) = dumbo::encrypt(&input);
            println!("ct={}", hex::encode(ct));
            println!("tag={}", hex::encode(tag));
            Ok(0)
        }
        Cmd::Decrypt { key, nonce, ad, ct, tag } => {
            let key: Key = decode_hex_array("key", &key)?;
            let nonce: Nonce = decode_hex_array("nonce", &nonce)?;
            let tag: Tag = decode_hex_array("tag", &tag)?;
            let ad = decode_hex("ad", &ad)?;
            let ct = decode_hex("ct", &ct)?;
            match dumbo::decrypt(&key, &nonce, &ad, &ct, &tag) {
                Some(m) => {
                    println!("{}", hex::encode(m));
                    Ok(0)
                }
                None => {
                    println!("BOT");
                    Ok(EXIT_AUTH)
                }
            }
        }
        Cmd::Netlist { fault } => {
            let n = canonical_netlist();
            let f = FaultMap::parse_for(&fault, &n)?;
            let t = n.faulty_truth_table(&f)?;
            print!("{}", n.dump());
            println!("fingerprint {}", n.fingerprint());
            println!("table {}", t.to_hex());
            println!("missing {}", t.missing_values().to_hex_digits());
            Ok(0)
        }
        Cmd::Hotspots { max_order, out } => cmd_hotspots(max_order, &out),
        Cmd::Attack(args) => cmd_attack(&args),
        Cmd::Campaign {
            trials,
            bucket,
            attack,
            out,
        } => cmd_campaign(trials, bucket, &attack, &out),
    }
}

fn cmd_hotspots(max_order: usize, out: &Path) -> Result<u8, Error> {
    let n = canonical_netlist();
    let records = hotspot::enumerate_hotspots(&n, max_order)?;
    fs::create_dir_all(out)?;
    hotspot::write_csv(&records, BufWriter::new(File::create(out.join("hotspots.csv"))?))?;
    fs::write(out.join("netlist.txt"), n.dump())?;
    RunManifest::new("hotspots", n.fingerprint())
        .flag("max-order", max_order)
        .write_to_dir(out)?;

    let summary = HotspotSummary::from_records(&records);
    print!("{}", summary.report());
    let three = hotspot::single_set1_three_missing(&records);
    println!("single SET1 faults with 3 missing values: {}", three.len());
    Ok(0)
}

fn resolve_fault(spec: &str, n: &Netlist) -> Result<FaultMap, Error> {
    if spec.trim() == "auto" {
        let records = hotspot::enumerate_hotspots(n, 2)?;
        let r = hotspot::select_fault_combination(&records, &SelectionPolicy::MinResidual)?;
        return Ok(r.fault_map.clone());
    }
    FaultMap::parse_for(spec, n)
}

fn attack_config(args: &AttackArgs, n: &Netlist) -> Result<AttackConfig, Error> {
    Ok(AttackConfig {
        fault_map: resolve_fault(&args.fault, n)?,
        fault_scope: match args.scope {
            Scope::All => FaultScope::AllRounds,
            Scope::Last => FaultScope::LastRoundOnly,
        },
        max_queries: args.max_queries,
        attacker_model: match args.model {
            Model::Kpa => AttackerModel::Kpa,
            Model::Cpa => AttackerModel::Cpa,
        },
        rng_seed: args.seed,
    })
}

fn fmt_survivors(s: &[u8]) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_attack(args: &AttackArgs) -> Result<u8, Error> {
    let n = canonical_netlist();
    let cfg = attack_config(args, &n)?;
    let attack = Attack::new(&n, cfg.clone())?;
    let r = attack.run_trial(cfg.rng_seed)?;
    println!("fault {}", cfg.fault_map);
    println!("missing {}", attack.missing().to_hex_digits());
    println!("queries {}", r.queries_used);
    println!("survivors {}", fmt_survivors(&r.survivors_final));
    match r.recovered_key {
        Some(k) if r.success => {
            println!("key {}", hex::encode(k));
            Ok(0)
        }
        _ => {
            println!("key none");
            Ok(EXIT_NO_KEY)
        }
    }
}

fn cmd_campaign(trials: u64, bucket: u32, args: &AttackArgs, out: &Path) -> Result<u8, Error> {
    let n = canonical_netlist();
    let cfg = attack_config(args, &n)?;
    let report = campaign(&n, &cfg, trials, bucket)?;
    fs::create_dir_all(out)?;
    report.write_campaign_csv(BufWriter::new(File::create(out.join("campaign.csv"))?))?;
    report.write_histogram_csv(BufWriter::new(File::create(out.join("histogram.csv"))?))?;
    let mut manifest = RunManifest::new("campaign", n.fingerprint())
        .flag("trials", trials)
        .flag("bucket", bucket)
        .flag("fault", &cfg.fault_map)
        .flag("scope", cfg.fault_scope.label())
        .flag("max-queries", cfg.max_queries)
        .flag("model", format!("{:?}", cfg.attacker_model).to_lowercase());
    manifest.rng_seed = Some(cfg.rng_seed);
    manifest.write_to_dir(out)?;

    println!("fault {}", cfg.fault_map);
    println!(
        "success {}/{} ({:.3})",
        report.successes(),
        report.trials.len(),
        report.success_rate()
    );
    match report.query_stats() {
        Some(s) => println!("queries min {} median {} max {}", s.min, s.median, s.max),
        None => println!("queries none"),
    }
    Ok(0)
}
