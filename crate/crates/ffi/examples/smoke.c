/* Minimal C client: AEAD round trip, faulty truth table, one attack trial. */
#include <stdio.h>
#include <string.h>
#include "dumbo_setfa.h"

int main(void) {
    uint8_t key[SETFA_KEY_BYTES] = {0}, nonce[SETFA_NONCE_BYTES] = {0};
    const uint8_t msg[] = "hello";
    uint8_t ct[sizeof msg], back[sizeof msg], tag[SETFA_TAG_BYTES];
    char err[256];

    if (setfa_dumbo_encrypt(key, nonce, NULL, 0, msg, sizeof msg, ct, tag) != SETFA_STATUS_OK)
        return 10;
    if (setfa_dumbo_decrypt(key, nonce, NULL, 0, ct, sizeof ct, tag, back) != SETFA_STATUS_OK)
        return 11;
    if (memcmp(msg, back, sizeof msg) != 0)
        return 12;
    tag[0] ^= 1;
    if (setfa_dumbo_decrypt(key, nonce, NULL, 0, ct, sizeof ct, tag, back) != SETFA_STATUS_AUTH_FAILED)
        return 13;

    SetfaNetlist *n = setfa_netlist_canonical();
    uint8_t table[16];
    if (setfa_netlist_truth_table(n, "w10=0", table) != SETFA_STATUS_OK)
        return 20;
    if (setfa_netlist_truth_table(n, "w999=0", table) != SETFA_STATUS_INVALID_ARGUMENT)
        return 21;
    setfa_last_error_message(err, sizeof err);
    printf("wires=%zu error=\"%s\"\n", setfa_netlist_wire_count(n), err);
    setfa_netlist_free(n);

    SetfaAttack *a = setfa_attack_new("w10=0", SETFA_SCOPE_ALL_ROUNDS, 250, 0);
    if (a == NULL)
        return 30;
    SetfaTrialResult r;
    SetfaStatus s = setfa_attack_run_trial(a, 7, &r);
    setfa_attack_free(a);
    if (s != SETFA_STATUS_OK || !r.success || memcmp(r.true_key, r.recovered_key, SETFA_KEY_BYTES) != 0)
        return 31;
    printf("version=%s queries=%u\n", setfa_version(), r.queries_used);
    return 0;
}
