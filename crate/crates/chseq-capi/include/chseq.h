/* C interface to the chseq channel hopping library. Generated by cbindgen; do not edit. */

#ifndef CHSEQ_H
#define CHSEQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call. Anything but `Ok` means the out-parameters
// were not written.
typedef enum ChseqStatus {
  CHSEQ_STATUS_OK = 0,
  // An argument violated a documented precondition.
  CHSEQ_STATUS_PRECONDITION = 1,
  // A bounded search was asked to pass its ceiling.
  CHSEQ_STATUS_SEARCH_CEILING = 2,
  // Structurally invalid input data.
  CHSEQ_STATUS_MALFORMED = 3,
  // Text input that failed to parse.
  CHSEQ_STATUS_PARSE = 4,
  // A construction failed its own certification; a library bug.
  CHSEQ_STATUS_CERTIFICATION = 5,
  // An operating system I/O failure.
  CHSEQ_STATUS_IO = 6,
  // A required pointer was null.
  CHSEQ_STATUS_NULL_ARGUMENT = 7,
  // A caller-supplied buffer cannot hold the result.
  CHSEQ_STATUS_BUFFER_TOO_SMALL = 8,
  // The library caught a panic at the boundary.
  CHSEQ_STATUS_PANIC = 9,
} ChseqStatus;

// Opaque periodic hopping sequence.
typedef struct ChseqSequence ChseqSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds the square-construction sequence of order `l` over `l * l`
// channels. On success `*out` owns the sequence.
//
// # Safety
// `out` must be valid for a write.
enum ChseqStatus chseq_ideal_ch(uint64_t l, struct ChseqSequence **out);

// Builds the general square-construction sequence over `n` channels.
//
// # Safety
// `out` must be valid for a write.
enum ChseqStatus chseq_general_mach_ch(uint64_t n, struct ChseqSequence **out);

// Builds an orthogonal-scheme sequence for a user of a `universe`-sized
// channel table who can tune to `avail[0..avail_len]`. A null `avail`
// with length 0 means every channel. The seed drives the member id
// pick and the per-slot replacements.
//
// # Safety
// `avail` must point to `avail_len` readable values or be null with
// `avail_len == 0`; `out` must be valid for a write.
enum ChseqStatus chseq_ortho_ch(uint32_t universe,
                                const uint32_t *avail,
                                size_t avail_len,
                                uint64_t seed,
                                struct ChseqSequence **out);

// Releases a sequence. Null is a no-op.
//
// # Safety
// `seq` must have come from this library and not been freed before.
void chseq_sequence_free(struct ChseqSequence *seq);

// Period in slots; 0 for a null handle.
//
// # Safety
// `seq` must be a live handle or null.
uint64_t chseq_sequence_period(const struct ChseqSequence *seq);

// Channel universe size; 0 for a null handle.
//
// # Safety
// `seq` must be a live handle or null.
uint32_t chseq_sequence_universe(const struct ChseqSequence *seq);

// Channel played in slot `t` (periodically extended); 0 for a null
// handle.
//
// # Safety
// `seq` must be a live handle or null.
uint32_t chseq_sequence_at(const struct ChseqSequence *seq, uint64_t t);

// Copies one full period of slot values into `buf`, which must hold at
// least the period.
//
// # Safety
// `buf` must be valid for `buf_len` writes.
enum ChseqStatus chseq_sequence_copy_values(const struct ChseqSequence *seq,
                                            uint32_t *buf,
                                            size_t buf_len);

// Bytes needed by [`chseq_sequence_provenance`], terminator included;
// 0 for a null handle.
//
// # Safety
// `seq` must be a live handle or null.
size_t chseq_sequence_provenance_len(const struct ChseqSequence *seq);

// Copies the NUL-terminated provenance string into `buf`.
//
// # Safety
// `buf` must be valid for `buf_len` writes.
enum ChseqStatus chseq_sequence_provenance(const struct ChseqSequence *seq,
                                           char *buf,
                                           size_t buf_len);

// Runs the exhaustive drift sweep on a sequence: every drift must
// produce a meeting on every channel below `n` within one period.
// Writes the verdict to `*passed`; on failure also writes the first
// missing `(drift, channel)` to the witness pointers when they are
// non-null.
//
// # Safety
// `seq` must be a live handle; `passed` must be valid for a write; the
// witness pointers must each be null or valid for a write.
enum ChseqStatus chseq_verify_1d_mrd(const struct ChseqSequence *seq,
                                     uint32_t n,
                                     bool *passed,
                                     uint64_t *witness_drift,
                                     uint32_t *witness_channel);

// Worst-case slots to rendezvous for two orthogonal-scheme users over
// `n` channels.
//
// # Safety
// `out` must be valid for a write.
enum ChseqStatus chseq_mttr_bound(uint32_t n, uint64_t *out);

// Period overhead of the general construction at universe `n`. Each
// out-pointer may be null to skip that field.
//
// # Safety
// Non-null out-pointers must each be valid for a write.
enum ChseqStatus chseq_approximation_ratio(uint64_t n,
                                           uint64_t *p_out,
                                           uint64_t *reserved_out,
                                           uint64_t *usable_out,
                                           double *ratio_out);

// Simulates two users for `horizon` slots, user 2 running `drift`
// slots ahead. Availability lists follow the [`chseq_ortho_ch`]
// convention against each sequence's universe. Writes the 1-based time
// to first rendezvous to `*t_out` and the time to a meeting on every
// common channel to `*t_sharp_out`, `-1` where the horizon ran out;
// either pointer may be null.
//
// # Safety
// The handles must be live; the availability pointers must follow
// [`chseq_ortho_ch`]'s rule; non-null out-pointers must be valid for
// writes.
enum ChseqStatus chseq_simulate(const struct ChseqSequence *seq1,
                                const struct ChseqSequence *seq2,
                                uint64_t drift,
                                uint64_t horizon,
                                const uint32_t *avail1,
                                size_t avail1_len,
                                const uint32_t *avail2,
                                size_t avail2_len,
                                int64_t *t_out,
                                int64_t *t_sharp_out);

// Static name for a status code, e.g. `"CHSEQ_STATUS_OK"`.
const char *chseq_status_name(enum ChseqStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHSEQ_H */
