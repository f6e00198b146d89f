//! C ABI over the channel hopping constructions.
//!
//! Conventions: every fallible call returns a [`ChseqStatus`] and writes
//! results through out-pointers, which are left untouched on failure.
//! Sequences are opaque handles owned by the library; free them with
//! [`chseq_sequence_free`]. Panics never cross the boundary: they turn
//! into `ChseqStatus::Panic`.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use chseq::error::Error;
use chseq::machseq::{self, ChSequence};
use chseq::orthoch::{self, AvailableChannelSet};
use chseq::simulator;

/// Result of every call. Anything but `Ok` means the out-parameters
/// were not written.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChseqStatus {
    Ok = 0,
    /// An argument violated a documented precondition.
    Precondition = 1,
    /// A bounded search was asked to pass its ceiling.
    SearchCeiling = 2,
    /// Structurally invalid input data.
    Malformed = 3,
    /// Text input that failed to parse.
    Parse = 4,
    /// A construction failed its own certification; a library bug.
    Certification = 5,
    /// An operating system I/O failure.
    Io = 6,
    /// A required pointer was null.
    NullArgument = 7,
    /// A caller-supplied buffer cannot hold the result.
    BufferTooSmall = 8,
    /// The library caught a panic at the boundary.
    Panic = 9,
}

/// Opaque periodic hopping sequence.
pub struct ChseqSequence(ChSequence);

fn status_of(e: &Error) -> ChseqStatus {
    match e {
        Error::Precondition(_) => ChseqStatus::Precondition,
        Error::SearchCeiling { .. } => ChseqStatus::SearchCeiling,
        Error::Malformed(_) => ChseqStatus::Malformed,
        Error::Parse { .. } => ChseqStatus::Parse,
        Error::Certification(_) => ChseqStatus::Certification,
        Error::Io(_) => ChseqStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> ChseqStatus) -> ChseqStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(ChseqStatus::Panic)
}

/// # Safety
/// `out` must be valid for a write when non-null.
unsafe fn deliver(
    out: *mut *mut ChseqSequence,
    result: Result<ChSequence, Error>,
) -> ChseqStatus {
    if out.is_null() {
        return ChseqStatus::NullArgument;
    }
    match result {
        Ok(seq) => {
            *out = Box::into_raw(Box::new(ChseqSequence(seq)));
            ChseqStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `channels` must point to `len` readable `uint32_t`s, or be null with
/// `len == 0` to mean the full universe.
unsafe fn avail_from(
    universe: u32,
    channels: *const u32,
    len: usize,
) -> Result<AvailableChannelSet, Error> {
    if channels.is_null() {
        if len != 0 {
            return Err(Error::Precondition(
                "null channel list with a nonzero length".into(),
            ));
        }
        AvailableChannelSet::full(universe)
    } else {
        let channels = slice::from_raw_parts(channels, len);
        AvailableChannelSet::new(universe, channels.iter().copied())
    }
}

/// Builds the square-construction sequence of order `l` over `l * l`
/// channels. On success `*out` owns the sequence.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn chseq_ideal_ch(l: u64, out: *mut *mut ChseqSequence) -> ChseqStatus {
    guard(|| deliver(out, machseq::ideal_ch(l)))
}

/// Builds the general square-construction sequence over `n` channels.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn chseq_general_mach_ch(
    n: u64,
    out: *mut *mut ChseqSequence,
) -> ChseqStatus {
    guard(|| deliver(out, machseq::general_mach_ch(n)))
}

/// Builds an orthogonal-scheme sequence for a user of a `universe`-sized
/// channel table who can tune to `avail[0..avail_len]`. A null `avail`
/// with length 0 means every channel. The seed drives the member id
/// pick and the per-slot replacements.
///
/// # Safety
/// `avail` must point to `avail_len` readable values or be null with
/// `avail_len == 0`; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn chseq_ortho_ch(
    universe: u32,
    avail: *const u32,
    avail_len: usize,
    seed: u64,
    out: *mut *mut ChseqSequence,
) -> ChseqStatus {
    guard(|| {
        let result = avail_from(universe, avail, avail_len)
            .and_then(|avail| orthoch::ortho_ch(&avail, seed));
        deliver(out, result)
    })
}

/// Releases a sequence. Null is a no-op.
///
/// # Safety
/// `seq` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn chseq_sequence_free(seq: *mut ChseqSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Period in slots; 0 for a null handle.
///
/// # Safety
/// `seq` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn chseq_sequence_period(seq: *const ChseqSequence) -> u64 {
    seq.as_ref().map_or(0, |s| s.0.period())
}

/// Channel universe size; 0 for a null handle.
///
/// # Safety
/// `seq` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn chseq_sequence_universe(seq: *const ChseqSequence) -> u32 {
    seq.as_ref().map_or(0, |s| s.0.channel_universe())
}

/// Channel played in slot `t` (periodically extended); 0 for a null
/// handle.
///
/// # Safety
/// `seq` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn chseq_sequence_at(seq: *const ChseqSequence, t: u64) -> u32 {
    seq.as_ref().map_or(0, |s| s.0.at(t))
}

/// Copies one full period of slot values into `buf`, which must hold at
/// least the period.
///
/// # Safety
/// `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn chseq_sequence_copy_values(
    seq: *const ChseqSequence,
    buf: *mut u32,
    buf_len: usize,
) -> ChseqStatus {
    guard(|| {
        let Some(seq) = seq.as_ref() else {
            return ChseqStatus::NullArgument;
        };
        if buf.is_null() {
            return ChseqStatus::NullArgument;
        }
        let values = seq.0.values();
        if buf_len < values.len() {
            return ChseqStatus::BufferTooSmall;
        }
        slice::from_raw_parts_mut(buf, values.len()).copy_from_slice(values);
        ChseqStatus::Ok
    })
}

/// Bytes needed by [`chseq_sequence_provenance`], terminator included;
/// 0 for a null handle.
///
/// # Safety
/// `seq` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn chseq_sequence_provenance_len(seq: *const ChseqSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.provenance().len() + 1)
}

/// Copies the NUL-terminated provenance string into `buf`.
///
/// # Safety
/// `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn chseq_sequence_provenance(
    seq: *const ChseqSequence,
    buf: *mut c_char,
    buf_len: usize,
) -> ChseqStatus {
    guard(|| {
        let Some(seq) = seq.as_ref() else {
            return ChseqStatus::NullArgument;
        };
        if buf.is_null() {
            return ChseqStatus::NullArgument;
        }
        let bytes = seq.0.provenance().as_bytes();
        if buf_len < bytes.len() + 1 {
            return ChseqStatus::BufferTooSmall;
        }
        let out = slice::from_raw_parts_mut(buf.cast::<u8>(), bytes.len() + 1);
        out[..bytes.len()].copy_from_slice(bytes);
        out[bytes.len()] = 0;
        ChseqStatus::Ok
    })
}

/// Runs the exhaustive drift sweep on a sequence: every drift must
/// produce a meeting on every channel below `n` within one period.
/// Writes the verdict to `*passed`; on failure also writes the first
/// missing `(drift, channel)` to the witness pointers when they are
/// non-null.
///
/// # Safety
/// `seq` must be a live handle; `passed` must be valid for a write; the
/// witness pointers must each be null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn chseq_verify_1d_mrd(
    seq: *const ChseqSequence,
    n: u32,
    passed: *mut bool,
    witness_drift: *mut u64,
    witness_channel: *mut u32,
) -> ChseqStatus {
    guard(|| {
        let Some(seq) = seq.as_ref() else {
            return ChseqStatus::NullArgument;
        };
        if passed.is_null() {
            return ChseqStatus::NullArgument;
        }
        let report = machseq::verify_1d_mrd(&seq.0, n);
        *passed = report.passed();
        if let Some((d, k)) = report.first_missing() {
            if !witness_drift.is_null() {
                *witness_drift = d;
            }
            if !witness_channel.is_null() {
                *witness_channel = k;
            }
        }
        ChseqStatus::Ok
    })
}

/// Worst-case slots to rendezvous for two orthogonal-scheme users over
/// `n` channels.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn chseq_mttr_bound(n: u32, out: *mut u64) -> ChseqStatus {
    guard(|| {
        if out.is_null() {
            return ChseqStatus::NullArgument;
        }
        match orthoch::mttr_bound(n) {
            Ok(b) => {
                *out = b;
                ChseqStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Period overhead of the general construction at universe `n`. Each
/// out-pointer may be null to skip that field.
///
/// # Safety
/// Non-null out-pointers must each be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn chseq_approximation_ratio(
    n: u64,
    p_out: *mut u64,
    reserved_out: *mut u64,
    usable_out: *mut u64,
    ratio_out: *mut f64,
) -> ChseqStatus {
    guard(|| match machseq::approximation_ratio(n) {
        Ok(r) => {
            if !p_out.is_null() {
                *p_out = r.p;
            }
            if !reserved_out.is_null() {
                *reserved_out = r.diffset_size;
            }
            if !usable_out.is_null() {
                *usable_out = r.usable;
            }
            if !ratio_out.is_null() {
                *ratio_out = r.value();
            }
            ChseqStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Simulates two users for `horizon` slots, user 2 running `drift`
/// slots ahead. Availability lists follow the [`chseq_ortho_ch`]
/// convention against each sequence's universe. Writes the 1-based time
/// to first rendezvous to `*t_out` and the time to a meeting on every
/// common channel to `*t_sharp_out`, `-1` where the horizon ran out;
/// either pointer may be null.
///
/// # Safety
/// The handles must be live; the availability pointers must follow
/// [`chseq_ortho_ch`]'s rule; non-null out-pointers must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn chseq_simulate(
    seq1: *const ChseqSequence,
    seq2: *const ChseqSequence,
    drift: u64,
    horizon: u64,
    avail1: *const u32,
    avail1_len: usize,
    avail2: *const u32,
    avail2_len: usize,
    t_out: *mut i64,
    t_sharp_out: *mut i64,
) -> ChseqStatus {
    guard(|| {
        let (Some(s1), Some(s2)) = (seq1.as_ref(), seq2.as_ref()) else {
            return ChseqStatus::NullArgument;
        };
        let report = avail_from(s1.0.channel_universe(), avail1, avail1_len)
            .and_then(|a1| {
                let a2 = avail_from(s2.0.channel_universe(), avail2, avail2_len)?;
                simulator::run(&s1.0, &s2.0, drift, horizon, &a1, &a2)
            });
        match report {
            Ok(report) => {
                if !t_out.is_null() {
                    *t_out = report.ttr().map_or(-1, |t| t as i64);
                }
                if !t_sharp_out.is_null() {
                    *t_sharp_out = report.t_sharp().map_or(-1, |t| t as i64);
                }
                ChseqStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Static name for a status code, e.g. `"CHSEQ_STATUS_OK"`.
#[no_mangle]
pub extern "C" fn chseq_status_name(status: ChseqStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        ChseqStatus::Ok => b"CHSEQ_STATUS_OK\0",
        ChseqStatus::Precondition => b"CHSEQ_STATUS_PRECONDITION\0",
        ChseqStatus::SearchCeiling => b"CHSEQ_STATUS_SEARCH_CEILING\0",
        ChseqStatus::Malformed => b"CHSEQ_STATUS_MALFORMED\0",
        ChseqStatus::Parse => b"CHSEQ_STATUS_PARSE\0",
        ChseqStatus::Certification => b"CHSEQ_STATUS_CERTIFICATION\0",
        ChseqStatus::Io => b"CHSEQ_STATUS_IO\0",
        ChseqStatus::NullArgument => b"CHSEQ_STATUS_NULL_ARGUMENT\0",
        ChseqStatus::BufferTooSmall => b"CHSEQ_STATUS_BUFFER_TOO_SMALL\0",
        ChseqStatus::Panic => b"CHSEQ_STATUS_PANIC\0",
    };
    name.as_ptr().cast()
}
