//! C ABI for `dumbo-setfa`.
//!
//! Fixed-size buffers are passed as raw pointers with the sizes documented on
//! each function. Netlists and configured attacks are opaque handles owned by
//! the caller and released with the matching `_free` function. Every call
//! returns a [`SetfaStatus`]; on failure a message is available from
//! [`setfa_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use dumbo_setfa::attack::{Attack, AttackConfig, FaultScope};
use dumbo_setfa::campaign::campaign;
use dumbo_setfa::dumbo::{self, AeadInputs};
use dumbo_setfa::spongent;
use dumbo_setfa::{canonical_netlist, FaultMap, Netlist, SboxTable, State160};

pub const SETFA_STATE_BYTES: usize = 20;
pub const SETFA_KEY_BYTES: usize = 16;
pub const SETFA_NONCE_BYTES: usize = 12;
pub const SETFA_TAG_BYTES: usize = 8;
pub const SETFA_NIBBLES: usize = 40;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetfaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Tag verification failed.
    AuthFailed = 3,
    /// The attack did not reach a verified key.
    NotConverged = 4,
    Io = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetfaScope {
    AllRounds = 0,
    LastRoundOnly = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetfaTrialResult {
    pub success: u8,
    pub converged: u8,
    pub queries_used: u32,
    pub true_key: [u8; SETFA_KEY_BYTES],
    /// All zero unless `success`.
    pub recovered_key: [u8; SETFA_KEY_BYTES],
    pub survivors: [u8; SETFA_NIBBLES],
}

/// Opaque Sbox netlist.
pub struct SetfaNetlist {
    inner: Netlist,
}

/// Opaque attack configuration with its faulty Sbox table.
pub struct SetfaAttack {
    netlist: Netlist,
    attack: Attack,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

type FfiResult<T> = Result<T, (SetfaStatus, String)>;

fn invalid(e: dumbo_setfa::Error) -> (SetfaStatus, String) {
    let status = match e {
        dumbo_setfa::Error::Io(_) | dumbo_setfa::Error::Csv(_) => SetfaStatus::Io,
        _ => SetfaStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn guard<F: FnOnce() -> FfiResult<SetfaStatus>>(f: F) -> SetfaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside dumbo-setfa");
            SetfaStatus::Internal
        }
    }
}

unsafe fn array<'a, const N: usize>(p: *const u8, name: &str) -> FfiResult<&'a [u8; N]> {
    if p.is_null() {
        return Err((SetfaStatus::NullPointer, format!("{name} is null")));
    }
    Ok(&*(p as *const [u8; N]))
}

unsafe fn array_mut<'a, const N: usize>(p: *mut u8, name: &str) -> FfiResult<&'a mut [u8; N]> {
    if p.is_null() {
        return Err((SetfaStatus::NullPointer, format!("{name} is null")));
    }
    Ok(&mut *(p as *mut [u8; N]))
}

/// A null pointer is accepted for zero-length input.
unsafe fn bytes<'a>(p: *const u8, len: usize, name: &str) -> FfiResult<&'a [u8]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err((SetfaStatus::NullPointer, format!("{name} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((SetfaStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SetfaStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// NUL-terminated version string; static storage, do not free.
#[no_mangle]
pub extern "C" fn setfa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length,
/// 0 if there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn setfa_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Applies Spongent-160 in place to the 20-byte `state`. `sbox` is either
/// null (fault-free Sbox) or 16 nibble entries used in every round; the
/// table need not be bijective.
///
/// # Safety
/// `state` must point to 20 writable bytes, `sbox` to 16 bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn setfa_spongent_permute(state: *mut u8, sbox: *const u8) -> SetfaStatus {
    guard(|| {
        let st = array_mut::<SETFA_STATE_BYTES>(state, "state")?;
        let table = if sbox.is_null() {
            SboxTable::spongent()
        } else {
            SboxTable::new(*array::<16>(sbox, "sbox")?).map_err(invalid)?
        };
        *st = spongent::permute(State160(*st), &table).0;
        Ok(SetfaStatus::Ok)
    })
}

/// Inverse of the fault-free Spongent-160, in place.
///
/// # Safety
/// `state` must point to 20 writable bytes.
#[no_mangle]
pub unsafe extern "C" fn setfa_spongent_permute_inverse(state: *mut u8) -> SetfaStatus {
    guard(|| {
        let st = array_mut::<SETFA_STATE_BYTES>(state, "state")?;
        *st = spongent::spongent_inv(State160(*st)).0;
        Ok(SetfaStatus::Ok)
    })
}

/// Dumbo encryption. `ct_out` receives `msg_len` bytes, `tag_out` 8 bytes.
///
/// # Safety
/// `key` 16 bytes, `nonce` 12 bytes, `ad`/`msg` valid for their lengths,
/// `ct_out` writable for `msg_len` bytes, `tag_out` for 8 bytes.
#[no_mangle]
pub unsafe extern "C" fn setfa_dumbo_encrypt(
    key: *const u8,
    nonce: *const u8,
    ad: *const u8,
    ad_len: usize,
    msg: *const u8,
    msg_len: usize,
    ct_out: *mut u8,
    tag_out: *mut u8,
) -> SetfaStatus {
    guard(|| {
        let input = AeadInputs {
            key: *array::<SETFA_KEY_BYTES>(key, "key")?,
            nonce: *array::<SETFA_NONCE_BYTES>(nonce, "nonce")?,
            ad: bytes(ad, ad_len, "ad")?.to_vec(),
            msg: bytes(msg, msg_len, "msg")?.to_vec(),
        };
        let tag_out = array_mut::<SETFA_TAG_BYTES>(tag_out, "tag_out")?;
        if msg_len > 0 && ct_out.is_null() {
            return Err((SetfaStatus::NullPointer, "ct_out is null".into()));
        }
        let (ct, tag) = dumbo::encrypt(&input);
        if msg_len > 0 {
            ptr::copy_nonoverlapping(ct.as_ptr(), ct_out, ct.len());
        }
        *tag_out = tag;
        Ok(SetfaStatus::Ok)
    })
}

/// Dumbo decryption. Returns `AuthFailed` (and leaves `msg_out` untouched)
/// when the tag does not verify.
///
/// # Safety
/// As for [`setfa_dumbo_encrypt`], with `msg_out` writable for `ct_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn setfa_dumbo_decrypt(
    key: *const u8,
    nonce: *const u8,
    ad: *const u8,
    ad_len: usize,
    ct: *const u8,
    ct_len: usize,
    tag: *const u8,
    msg_out: *mut u8,
) -> SetfaStatus {
    guard(|| {
        let key = array::<SETFA_KEY_BYTES>(key, "key")?;
        let nonce = array::<SETFA_NONCE_BYTES>(nonce, "nonce")?;
        let tag = array::<SETFA_TAG_BYTES>(tag, "tag")?;
        let ad = bytes(ad, ad_len, "ad")?;
        let ct = bytes(ct, ct_len, "ct")?;
        if ct_len > 0 && msg_out.is_null() {
            return Err((SetfaStatus::NullPointer, "msg_out is null".into()));
        }
        match dumbo::decrypt(key, nonce, ad, ct, tag) {
            Some(m) => {
                if ct_len > 0 {
                    ptr::copy_nonoverlapping(m.as_ptr(), msg_out, m.len());
                }
                Ok(SetfaStatus::Ok)
            }
            None => Err((SetfaStatus::AuthFailed, "tag verification failed".into())),
        }
    })
}

/// The canonical 53-wire Sbox netlist. Release with [`setfa_netlist_free`].
#[no_mangle]
pub extern "C" fn setfa_netlist_canonical() -> *mut SetfaNetlist {
    Box::into_raw(Box::new(SetfaNetlist {
        inner: canonical_netlist(),
    }))
}

/// # Safety
/// `netlist` must come from [`setfa_netlist_canonical`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn setfa_netlist_free(netlist: *mut SetfaNetlist) {
    if !netlist.is_null() {
        drop(Box::from_raw(netlist));
    }
}

/// Number of wires (fault points); 0 for a null handle.
///
/// # Safety
/// `netlist` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn setfa_netlist_wire_count(netlist: *const SetfaNetlist) -> usize {
    netlist.as_ref().map_or(0, |n| n.inner.wire_count())
}

/// Truth table under `fault_spec` (e.g. `"w10=0,w31=1"`, empty for none),
/// written as 16 bytes to `table_out`.
///
/// # Safety
/// `netlist` a live handle, `fault_spec` a NUL-terminated string,
/// `table_out` writable for 16 bytes.
#[no_mangle]
pub unsafe extern "C" fn setfa_netlist_truth_table(
    netlist: *const SetfaNetlist,
    fault_spec: *const c_char,
    table_out: *mut u8,
) -> SetfaStatus {
    guard(|| {
        let n = netlist
            .as_ref()
            .ok_or((SetfaStatus::NullPointer, "netlist is null".to_string()))?;
        let spec = c_str(fault_spec, "fault_spec")?;
        let out = array_mut::<16>(table_out, "table_out")?;
        let f = FaultMap::parse_for(spec, &n.inner).map_err(invalid)?;
        *out = *n.inner.faulty_truth_table(&f).map_err(invalid)?.entries();
        Ok(SetfaStatus::Ok)
    })
}

/// Text dump of the netlist; release with [`setfa_string_free`]. Null on a null handle.
///
/// # Safety
/// `netlist` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn setfa_netlist_dump(netlist: *const SetfaNetlist) -> *mut c_char {
    match netlist.as_ref() {
        Some(n) => CString::new(n.inner.dump()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must come from a `setfa_*` function returning an owned string.
#[no_mangle]
pub unsafe extern "C" fn setfa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Configures an attack on the canonical netlist. Returns null on error
/// (see [`setfa_last_error_message`]). Release with [`setfa_attack_free`].
///
/// # Safety
/// `fault_spec` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn setfa_attack_new(
    fault_spec: *const c_char,
    scope: SetfaScope,
    max_queries: u32,
    seed: u64,
) -> *mut SetfaAttack {
    let mut handle = ptr::null_mut();
    let status = guard(|| {
        let netlist = canonical_netlist();
        let spec = c_str(fault_spec, "fault_spec")?;
        let mut cfg = AttackConfig::new(FaultMap::parse_for(spec, &netlist).map_err(invalid)?);
        cfg.fault_scope = match scope {
            SetfaScope::AllRounds => FaultScope::AllRounds,
            SetfaScope::LastRoundOnly => FaultScope::LastRoundOnly,
        };
        cfg.max_queries = max_queries;
        cfg.rng_seed = seed;
        let attack = Attack::new(&netlist, cfg).map_err(invalid)?;
        handle = Box::into_raw(Box::new(SetfaAttack { netlist, attack }));
        Ok(SetfaStatus::Ok)
    });
    if status == SetfaStatus::Ok {
        handle
    } else {
        ptr::null_mut()
    }
}

/// # Safety
/// `attack` must come from [`setfa_attack_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn setfa_attack_free(attack: *mut SetfaAttack) {
    if !attack.is_null() {
        drop(Box::from_raw(attack));
    }
}

/// Bit `v` set iff output value `v` never occurs under the configured fault.
///
/// # Safety
/// `attack` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn setfa_attack_missing_mask(attack: *const SetfaAttack) -> u16 {
    attack.as_ref().map_or(0, |a| a.attack.missing().mask())
}

/// Runs one trial with the generator seeded by `seed`. `out` is filled in
/// every non-error case; the status is `NotConverged` unless the key was recovered.
///
/// # Safety
/// `attack` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn setfa_attack_run_trial(
    attack: *const SetfaAttack,
    seed: u64,
    out: *mut SetfaTrialResult,
) -> SetfaStatus {
    guard(|| {
        let a = attack
            .as_ref()
            .ok_or((SetfaStatus::NullPointer, "attack is null".to_string()))?;
        let out = out
            .as_mut()
            .ok_or((SetfaStatus::NullPointer, "out is null".to_string()))?;
        let r = a.attack.run_trial(seed).map_err(invalid)?;
        *out = SetfaTrialResult {
            success: r.success as u8,
            converged: r.converged as u8,
            queries_used: r.queries_used,
            true_key: r.true_key,
            recovered_key: r.recovered_key.unwrap_or([0; SETFA_KEY_BYTES]),
            survivors: r.survivors_final,
        };
        Ok(if r.success {
            SetfaStatus::Ok
        } else {
            SetfaStatus::NotConverged
        })
    })
}

/// Runs `n_trials` trials (campaign seed taken from the handle) and writes
/// `campaign.csv` and `histogram.csv` into the existing directory `out_dir`.
/// `successes_out` may be null.
///
/// # Safety
/// `attack` a live handle, `out_dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn setfa_attack_campaign(
    attack: *const SetfaAttack,
    n_trials: u64,
    bucket_width: u32,
    out_dir: *const c_char,
    successes_out: *mut u64,
) -> SetfaStatus {
    guard(|| {
        let a = attack
            .as_ref()
            .ok_or((SetfaStatus::NullPointer, "attack is null".to_string()))?;
        let dir = Path::new(c_str(out_dir, "out_dir")?);
        let report = campaign(&a.netlist, a.attack.config(), n_trials, bucket_width).map_err(invalid)?;
        let io = |e: std::io::Error| (SetfaStatus::Io, e.to_string());
        report
            .write_campaign_csv(BufWriter::new(File::create(dir.join("campaign.csv")).map_err(io)?))
            .map_err(invalid)?;
        report
            .write_histogram_csv(BufWriter::new(File::create(dir.join("histogram.csv")).map_err(io)?))
            .map_err(invalid)?;
        if let Some(s) = successes_out.as_mut() {
            *s = report.successes() as u64;
        }
        Ok(SetfaStatus::Ok)
    })
}
