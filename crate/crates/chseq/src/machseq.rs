//! Channel matrices with maximum rendezvous diversity, and their readout
//! into hopping sequences.
//!
//! The pipeline: an ideal matrix places one dot per column of a `p x p`
//! grid; the *semi* matrix writes into each cell its row distance from
//! the column's dot, making cell values collide under 2D shifts exactly
//! as the ideal correlation law dictates; embedding a difference set
//! turns those `Z_p` values into channel indices below `n`. The result
//! has *2D maximum rendezvous diversity*: every cyclic shift other than
//! the identity produces a coincidence on every channel. Reading the
//! matrix out row by row, each row lasting `2p` slots, yields a sequence
//! of period `2p^2` with the matching 1D property under every drift.
//!
//! `n = l^2` with a perfect difference set gives the tight construction;
//! a relaxed difference set handles every other `n` at a slightly larger
//! prime. Constructors certify the diversity property exhaustively
//! before returning.

use crate::diffsets::{self, DifferenceSet};
use crate::error::{Error, Result};
use crate::idealmat::{self, IdealMatrix, Preset};
use crate::numtheory;

/// What a [`ChMatrix`] claims to be. The role records which verifier its
/// constructor ran; matrices assembled by hand claim nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixRole {
    /// Row-distance matrix over `Z_p`; diverse under every shift with
    /// `tau != 0` but blind to pure row shifts.
    SemiMach,
    /// Channel matrix certified for full 2D diversity.
    Mach,
    /// One member of an orthogonal schedule family.
    OrthoMember,
    /// Orthogonal member widened to `2p + 1` columns with its identity
    /// column in front.
    OrthoExtended,
}

/// Rectangular matrix of channel indices, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChMatrix {
    rows: usize,
    cols: usize,
    channel_universe: u32,
    role: MatrixRole,
    cells: Vec<u32>,
}

impl ChMatrix {
    pub(crate) fn from_fn(
        rows: usize,
        cols: usize,
        channel_universe: u32,
        role: MatrixRole,
        mut cell: impl FnMut(usize, usize) -> u32,
    ) -> Result<ChMatrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::precondition("matrix must have rows and columns"));
        }
        if channel_universe == 0 {
            return Err(Error::precondition("channel universe must be at least 1"));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = cell(i, j);
                if v >= channel_universe {
                    return Err(Error::malformed(format!(
                        "cell ({i}, {j}) holds channel {v}, universe is {channel_universe}"
                    )));
                }
                cells.push(v);
            }
        }
        Ok(ChMatrix {
            rows,
            cols,
            channel_universe,
            role,
            cells,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Channels are indices in `[0, channel_universe)`.
    pub fn channel_universe(&self) -> u32 {
        self.channel_universe
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    /// Cell at row `i`, column `j`. Panics outside the matrix.
    pub fn at(&self, i: usize, j: usize) -> u32 {
        assert!(i < self.rows && j < self.cols, "cell ({i}, {j}) out of range");
        self.cells[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }
}

/// Periodic hopping sequence: one channel index per slot, repeating
/// forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChSequence {
    values: Vec<u32>,
    channel_universe: u32,
    provenance: String,
}

impl ChSequence {
    /// Wraps one period of slots. The period is `values.len()`; every
    /// value must lie inside the universe.
    pub fn new(
        values: Vec<u32>,
        channel_universe: u32,
        provenance: impl Into<String>,
    ) -> Result<ChSequence> {
        if values.is_empty() {
            return Err(Error::precondition("sequence must have at least one slot"));
        }
        if channel_universe == 0 {
            return Err(Error::precondition("channel universe must be at least 1"));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= channel_universe) {
            return Err(Error::malformed(format!(
                "slot value {v} is outside the channel universe {channel_universe}"
            )));
        }
        Ok(ChSequence {
            values,
            channel_universe,
            provenance: provenance.into(),
        })
    }

    pub fn period(&self) -> u64 {
        self.values.len() as u64
    }

    /// Channel in slot `t`, extended periodically over all of time.
    pub fn at(&self, t: u64) -> u32 {
        self.values[(t % self.period()) as usize]
    }

    /// One full period of slots.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn channel_universe(&self) -> u32 {
        self.channel_universe
    }

    /// Free-form record of how the sequence was made. Round-trips
    /// through the text format.
    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    #[must_use]
    pub fn with_provenance(mut self, provenance: impl Into<String>) -> ChSequence {
        self.provenance = provenance.into();
        self
    }
}

/// Everything [`build_mach_matrix`] and [`build_general_mach_matrix`]
/// assemble on the way to the final matrix, kept for inspection.
#[derive(Clone, Debug)]
pub struct MachConstruction {
    /// The certified channel matrix.
    pub matrix: ChMatrix,
    /// Row-distance matrix the channels were embedded into.
    pub semi: ChMatrix,
    /// Dot placement behind the semi matrix.
    pub ideal: IdealMatrix,
    /// Difference set consumed by the embedding.
    pub diffset: DifferenceSet,
}

/// Row-distance matrix of an ideal dot placement: cell `(i, j)` is
/// `i - dot_row(j) mod p`, so value `v` sits `v` rows below the dot of
/// its column. For the 2D diversity claims downstream to hold, `m` must
/// have passed [`idealmat::verify_ideal`]; constructors in this module
/// only feed it certified matrices.
pub fn build_semi_mach(m: &IdealMatrix) -> Result<ChMatrix> {
    let p = m.p();
    let universe: u32 = p
        .try_into()
        .map_err(|_| Error::precondition(format!("modulus {p} is too large for a matrix")))?;
    let dots: Vec<u64> = (0..p).map(|j| m.dot_row(j)).collect();
    ChMatrix::from_fn(p as usize, p as usize, universe, MatrixRole::SemiMach, |i, j| {
        ((i as u64 + p - dots[j]) % p) as u32
    })
}

/// Replaces the `Z_p` values of a semi matrix with channels below `n`:
/// cells whose value lands in the difference set anchor their column and
/// carry `j mod n`; the rest carry the rank of their value among the
/// complement, mod `n`.
fn embed_channels(semi: &ChMatrix, diffset: &DifferenceSet, n: u32) -> Result<ChMatrix> {
    let p = semi.rows();
    let mut in_set = vec![false; p];
    for &d in diffset.elements() {
        in_set[d as usize] = true;
    }
    let mut rank = vec![0u32; p];
    let mut next = 0u32;
    for v in 0..p {
        if !in_set[v] {
            rank[v] = next % n;
            next += 1;
        }
    }
    ChMatrix::from_fn(p, p, n, MatrixRole::Mach, |i, j| {
        let v = semi.at(i, j) as usize;
        if in_set[v] {
            (j % n as usize) as u32
        } else {
            rank[v]
        }
    })
}

fn certify_mach(matrix: ChMatrix, what: &str) -> Result<ChMatrix> {
    let n = matrix.channel_universe();
    let report = verify_2d_mrd(&matrix, n, false)?;
    match report.first_missing() {
        None => Ok(matrix),
        Some((delta, tau, k)) => Err(Error::Certification(format!(
            "{what}: no coincidence on channel {k} under shift ({delta}, {tau})"
        ))),
    }
}

/// Channel matrix over `n = l^2` channels from a perfect difference set
/// of order `l`. Needs `l` to be a prime power with `l^2 + l + 1` prime
/// (see [`numtheory::valid_ideal_orders`]); the perfect set search obeys
/// its usual ceiling. The result is certified for full 2D diversity
/// before it is returned.
pub fn build_mach_matrix(l: u64) -> Result<MachConstruction> {
    if numtheory::is_prime_power(l).is_none() {
        return Err(Error::precondition(format!(
            "order {l} is not a prime power"
        )));
    }
    let p = l * l + l + 1;
    if !numtheory::is_prime(p) {
        return Err(Error::precondition(format!(
            "order {l} gives modulus {p}, which is not prime"
        )));
    }
    let ideal = idealmat::build_preset(p, Preset::Triangular)?;
    let semi = build_semi_mach(&ideal)?;
    let diffset = diffsets::find_perfect_difference_set(l)?;
    let n = (l * l) as u32;
    let matrix = certify_mach(
        embed_channels(&semi, &diffset, n)?,
        &format!("square construction l={l}"),
    )?;
    Ok(MachConstruction {
        matrix,
        semi,
        ideal,
        diffset,
    })
}

/// Channel matrix over any universe `n >= 1`, built over the least prime
/// that leaves `n` usable channels once a relaxed difference set is
/// carved out. Certified like [`build_mach_matrix`].
pub fn build_general_mach_matrix(n: u64) -> Result<MachConstruction> {
    if n == 0 {
        return Err(Error::precondition("channel count must be at least 1"));
    }
    let p = numtheory::general_prime_for(n);
    let delta = numtheory::ceil_sqrt(p);
    let diffset = diffsets::build_rds(p, delta)?;
    let ideal = idealmat::build_preset(p, Preset::Triangular)?;
    let semi = build_semi_mach(&ideal)?;
    let matrix = certify_mach(
        embed_channels(&semi, &diffset, n as u32)?,
        &format!("general construction n={n}"),
    )?;
    Ok(MachConstruction {
        matrix,
        semi,
        ideal,
        diffset,
    })
}

/// Outcome of the exhaustive 2D shift sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mrd2dReport {
    first_missing: Option<(u64, u64, u32)>,
}

impl Mrd2dReport {
    pub fn passed(&self) -> bool {
        self.first_missing.is_none()
    }

    /// First `(delta, tau, channel)` with no coincidence, scanning
    /// shifts lexicographically and channels ascending.
    pub fn first_missing(&self) -> Option<(u64, u64, u32)> {
        self.first_missing
    }
}

/// Sweeps every cyclic shift `(delta, tau) != (0, 0)` of a square matrix
/// against itself and demands a coincidence on every channel below `n`.
/// `skip_tau_zero` exempts pure row shifts, which is exactly the
/// guarantee a semi matrix offers. Each shift scans the full grid with
/// a channel bitmap and stops as soon as all `n` channels are seen.
pub fn verify_2d_mrd(matrix: &ChMatrix, n: u32, skip_tau_zero: bool) -> Result<Mrd2dReport> {
    if matrix.rows() != matrix.cols() {
        return Err(Error::precondition(format!(
            "shift sweep needs a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    if n == 0 || n > matrix.channel_universe() {
        return Err(Error::precondition(format!(
            "channel count {n} must be in [1, {}]",
            matrix.channel_universe()
        )));
    }
    let p = matrix.rows();
    let mut seen = ChannelBitmap::new(n);
    for delta in 0..p {
        for tau in 0..p {
            if (delta == 0 && tau == 0) || (skip_tau_zero && tau == 0) {
                continue;
            }
            seen.clear();
            'grid: for i in 0..p {
                for j in 0..p {
                    let a = matrix.at(i, j);
                    if a < n && a == matrix.at((i + delta) % p, (j + tau) % p) && seen.insert(a) {
                        break 'grid;
                    }
                }
            }
            if let Some(k) = seen.first_missing() {
                return Ok(Mrd2dReport {
                    first_missing: Some((delta as u64, tau as u64, k)),
                });
            }
        }
    }
    Ok(Mrd2dReport {
        first_missing: None,
    })
}

/// Bitmap over channels `0..n` that reports when it fills up.
struct ChannelBitmap {
    n: u32,
    found: u32,
    words: Vec<u64>,
}

impl ChannelBitmap {
    fn new(n: u32) -> ChannelBitmap {
        ChannelBitmap {
            n,
            found: 0,
            words: vec![0; (n as usize).div_ceil(64)],
        }
    }

    fn clear(&mut self) {
        self.found = 0;
        self.words.fill(0);
    }

    /// Marks `k`; true once every channel has been marked.
    fn insert(&mut self, k: u32) -> bool {
        let (w, bit) = ((k / 64) as usize, 1u64 << (k % 64));
        if self.words[w] & bit == 0 {
            self.words[w] |= bit;
            self.found += 1;
        }
        self.found == self.n
    }

    fn first_missing(&self) -> Option<u32> {
        if self.found == self.n {
            return None;
        }
        (0..self.n).find(|&k| self.words[(k / 64) as usize] & (1 << (k % 64)) == 0)
    }
}

/// Reads a certified channel matrix out as a hopping sequence: slot `t`
/// plays `C[floor(t / 2p)][t mod p]`, so each row is on duty for `2p`
/// slots while the column sweep wraps twice. Period `2p^2`.
pub fn mach_matrix_to_sequence(matrix: &ChMatrix) -> Result<ChSequence> {
    if matrix.role() != MatrixRole::Mach || matrix.rows() != matrix.cols() {
        return Err(Error::precondition(
            "sequence readout needs a certified square channel matrix",
        ));
    }
    let p = matrix.rows() as u64;
    let period = 2 * p * p;
    let mut values = Vec::with_capacity(period as usize);
    for t in 0..period {
        values.push(matrix.at((t / (2 * p)) as usize, (t % p) as usize));
    }
    ChSequence::new(values, matrix.channel_universe(), format!("mach p={p}"))
}

/// Outcome of the exhaustive drift sweep over one sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mrd1dReport {
    first_missing: Option<(u64, u32)>,
}

impl Mrd1dReport {
    pub fn passed(&self) -> bool {
        self.first_missing.is_none()
    }

    /// First `(drift, channel)` that never coincides, drifts ascending.
    pub fn first_missing(&self) -> Option<(u64, u32)> {
        self.first_missing
    }
}

/// Checks 1D maximum rendezvous diversity: for every drift `d`, slots
/// `t` with `seq(t) = seq(t + d)` must cover every channel below `n`
/// within one period.
#[must_use]
pub fn verify_1d_mrd(seq: &ChSequence, n: u32) -> Mrd1dReport {
    let period = seq.period();
    let mut seen = ChannelBitmap::new(n);
    for d in 0..period {
        seen.clear();
        if n > 0 {
            for t in 0..period {
                let a = seq.at(t);
                if a < n && a == seq.at(t + d) && seen.insert(a) {
                    break;
                }
            }
        }
        if let Some(k) = seen.first_missing() {
            return Mrd1dReport {
                first_missing: Some((d, k)),
            };
        }
    }
    Mrd1dReport {
        first_missing: None,
    }
}

/// Like [`verify_1d_mrd`], but only slots in the *aligned box* may
/// count: with `tau = d mod 2p`, slots with `t mod 2p` in `[0, p)` when
/// `tau <= p`, and in `[p, 2p)` otherwise. These are the slots where
/// both users' column sweeps overlap a single matrix shift, and they
/// alone must already certify every channel. Requires period `2p^2`.
pub fn verify_1d_mrd_aligned_box(seq: &ChSequence, n: u32, p: u64) -> Result<Mrd1dReport> {
    let period = seq.period();
    if p == 0 || period != 2 * p * p {
        return Err(Error::precondition(format!(
            "period {period} does not match 2 p^2 for p = {p}"
        )));
    }
    let mut seen = ChannelBitmap::new(n);
    for d in 0..period {
        let tau = d % (2 * p);
        let lo = if tau <= p { 0 } else { p };
        seen.clear();
        if n > 0 {
            'drift: for row in 0..p {
                for u in lo..lo + p {
                    let t = row * 2 * p + u;
                    let a = seq.at(t);
                    if a < n && a == seq.at(t + d) && seen.insert(a) {
                        break 'drift;
                    }
                }
            }
        }
        if let Some(k) = seen.first_missing() {
            return Ok(Mrd1dReport {
                first_missing: Some((d, k)),
            });
        }
    }
    Ok(Mrd1dReport {
        first_missing: None,
    })
}

/// Hopping sequence over `l^2` channels with guaranteed rendezvous
/// diversity under every drift; period `2 (l^2 + l + 1)^2`.
pub fn ideal_ch(l: u64) -> Result<ChSequence> {
    let built = build_mach_matrix(l)?;
    let p = l * l + l + 1;
    let seq = mach_matrix_to_sequence(&built.matrix)?;
    Ok(seq.with_provenance(format!("ideal-ch L={l} p={p}")))
}

/// Hopping sequence over any `n >= 1` channels, same guarantee, period
/// `2 p^2` for the least workable prime `p`.
pub fn general_mach_ch(n: u64) -> Result<ChSequence> {
    let built = build_general_mach_matrix(n)?;
    let p = built.matrix.rows() as u64;
    let seq = mach_matrix_to_sequence(&built.matrix)?;
    Ok(seq.with_provenance(format!("general-mach N={n} p={p}")))
}

/// How far the general construction's period `2 p^2` sits above the
/// `n^2` slots an ideal scheme would need: the ratio is
/// `2 p^2 / (p - |D|)^2`, which tends to 2 from above as `n` grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RatioReport {
    /// Requested channel count.
    pub n: u64,
    /// Prime the construction runs on.
    pub p: u64,
    /// Size of the reserved difference set.
    pub diffset_size: u64,
    /// Channels the matrix can actually serve, `p - diffset_size`.
    pub usable: u64,
}

impl RatioReport {
    /// Sequence period, the ratio's numerator.
    pub fn period(&self) -> u64 {
        2 * self.p * self.p
    }

    /// `usable^2`, the ratio's denominator.
    pub fn denominator(&self) -> u64 {
        self.usable * self.usable
    }

    pub fn value(&self) -> f64 {
        self.period() as f64 / self.denominator() as f64
    }
}

/// Computes the period overhead of [`general_mach_ch`] at universe `n`
/// without materializing the matrix.
pub fn approximation_ratio(n: u64) -> Result<RatioReport> {
    if n == 0 {
        return Err(Error::precondition("channel count must be at least 1"));
    }
    let p = numtheory::general_prime_for(n);
    let delta = numtheory::ceil_sqrt(p);
    let diffset_size = delta + p / delta - 1;
    Ok(RatioReport {
        n,
        p,
        diffset_size,
        usable: p - diffset_size,
    })
}
