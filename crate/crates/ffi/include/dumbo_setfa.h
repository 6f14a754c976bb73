#ifndef DUMBO_SETFA_H
#define DUMBO_SETFA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SETFA_STATE_BYTES 20

#define SETFA_KEY_BYTES 16

#define SETFA_NONCE_BYTES 12

#define SETFA_TAG_BYTES 8

#define SETFA_NIBBLES 40

typedef enum SetfaScope {
  SETFA_SCOPE_ALL_ROUNDS = 0,
  SETFA_SCOPE_LAST_ROUND_ONLY = 1,
} SetfaScope;

typedef enum SetfaStatus {
  SETFA_STATUS_OK = 0,
  SETFA_STATUS_NULL_POINTER = 1,
  SETFA_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Tag verification failed.
   */
  SETFA_STATUS_AUTH_FAILED = 3,
  /**
   * The attack did not reach a verified key.
   */
  SETFA_STATUS_NOT_CONVERGED = 4,
  SETFA_STATUS_IO = 5,
  SETFA_STATUS_INTERNAL = 6,
} SetfaStatus;

/**
 * Opaque attack configuration with its faulty Sbox table.
 */
typedef struct SetfaAttack SetfaAttack;

/**
 * Opaque Sbox netlist.
 */
typedef struct SetfaNetlist SetfaNetlist;

typedef struct SetfaTrialResult {
  uint8_t success;
  uint8_t converged;
  uint32_t queries_used;
  uint8_t true_key[SETFA_KEY_BYTES];
  /**
   * All zero unless `success`.
   */
  uint8_t recovered_key[SETFA_KEY_BYTES];
  uint8_t survivors[SETFA_NIBBLES];
} SetfaTrialResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * NUL-terminated version string; static storage, do not free.
 */
const char *setfa_version(void);

/**
 * Copies the last error message of this thread into `buf` (truncated,
 * always NUL-terminated when `len > 0`). Returns the full message length,
 * 0 if there is none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t setfa_last_error_message(char *buf, size_t len);

/**
 * Applies Spongent-160 in place to the 20-byte `state`. `sbox` is either
 * null (fault-free Sbox) or 16 nibble entries used in every round; the
 * table need not be bijective.
 *
 * # Safety
 * `state` must point to 20 writable bytes, `sbox` to 16 bytes or be null.
 */
enum SetfaStatus setfa_spongent_permute(uint8_t *state, const uint8_t *sbox);

/**
 * Inverse of the fault-free Spongent-160, in place.
 *
 * # Safety
 * `state` must point to 20 writable bytes.
 */
enum SetfaStatus setfa_spongent_permute_inverse(uint8_t *state);

/**
 * Dumbo encryption. `ct_out` receives `msg_len` bytes, `tag_out` 8 bytes.
 *
 * # Safety
 * `key` 16 bytes, `nonce` 12 bytes, `ad`/`msg` valid for their lengths,
 * `ct_out` writable for `msg_len` bytes, `tag_out` for 8 bytes.
 */
enum SetfaStatus setfa_dumbo_encrypt(const uint8_t *key,
                                     const uint8_t *nonce,
                                     const uint8_t *ad,
                                     size_t ad_len,
                                     const uint8_t *msg,
                                     size_t msg_len,
                                     uint8_t *ct_out,
                                     uint8_t *tag_out);

/**
 * Dumbo decryption. Returns `AuthFailed` (and leaves `msg_out` untouched)
 * when the tag does not verify.
 *
 * # Safety
 * As for [`setfa_dumbo_encrypt`], with `msg_out` writable for `ct_len` bytes.
 */
enum SetfaStatus setfa_dumbo_decrypt(const uint8_t *key,
                                     const uint8_t *nonce,
                                     const uint8_t *ad,
                                     size_t ad_len,
                                     const uint8_t *ct,
                                     size_t ct_len,
                                     const uint8_t *tag,
                                     uint8_t *msg_out);

/**
 * The canonical 53-wire Sbox netlist. Release with [`setfa_netlist_free`].
 */
struct SetfaNetlist *setfa_netlist_canonical(void);

/**
 * # Safety
 * `netlist` must come from [`setfa_netlist_canonical`] and not be used afterwards.
 */
void setfa_netlist_free(struct SetfaNetlist *netlist);

/**
 * Number of wires (fault points); 0 for a null handle.
 *
 * # Safety
 * `netlist` must be a live handle or null.
 */
size_t setfa_netlist_wire_count(const struct SetfaNetlist *netlist);

/**
 * Truth table under `fault_spec` (e.g. `"w10=0,w31=1"`, empty for none),
 * written as 16 bytes to `table_out`.
 *
 * # Safety
 * `netlist` a live handle, `fault_spec` a NUL-terminated string,
 * `table_out` writable for 16 bytes.
 */
enum SetfaStatus setfa_netlist_truth_table(const struct SetfaNetlist *netlist,
                                           const char *fault_spec,
                                           uint8_t *table_out);

/**
 * Text dump of the netlist; release with [`setfa_string_free`]. Null on a null handle.
 *
 * # Safety
 * `netlist` must be a live handle or null.
 */
char *setfa_netlist_dump(const struct SetfaNetlist *netlist);

/**
 * # Safety
 * `s` must come from a `setfa_*` function returning an owned string.
 */
void setfa_string_free(char *s);

/**
 * Configures an attack on the canonical netlist. Returns null on error
 * (see [`setfa_last_error_message`]). Release with [`setfa_attack_free`].
 *
 * # Safety
 * `fault_spec` must be a NUL-terminated string.
 */
struct SetfaAttack *setfa_attack_new(const char *fault_spec,
                                     enum SetfaScope scope,
                                     uint32_t max_queries,
                                     uint64_t seed);

/**
 * # Safety
 * `attack` must come from [`setfa_attack_new`] and not be used afterwards.
 */
void setfa_attack_free(struct SetfaAttack *attack);

/**
 * Bit `v` set iff output value `v` never occurs under the configured fault.
 *
 * # Safety
 * `attack` must be a live handle or null (returns 0).
 */
uint16_t setfa_attack_missing_mask(const struct SetfaAttack *attack);

/**
 * Runs one trial with the generator seeded by `seed`. `out` is filled in
 * every non-error case; the status is `NotConverged` unless the key was recovered.
 *
 * # Safety
 * `attack` a live handle, `out` writable.
 */
enum SetfaStatus setfa_attack_run_trial(const struct SetfaAttack *attack,
                                        uint64_t seed,
                                        struct SetfaTrialResult *out);

/**
 * Runs `n_trials` trials (campaign seed taken from the handle) and writes
 * `campaign.csv` and `histogram.csv` into the existing directory `out_dir`.
 * `successes_out` may be null.
 *
 * # Safety
 * `attack` a live handle, `out_dir` a NUL-terminated path.
 */
enum SetfaStatus setfa_attack_campaign(const struct SetfaAttack *attack,
                                       uint64_t n_trials,
                                       uint32_t bucket_width,
                                       const char *out_dir,
                                       uint64_t *successes_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUMBO_SETFA_H */
