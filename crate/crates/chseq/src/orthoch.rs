//! Orthogonal schedule families for users that see different channel
//! subsets.
//!
//! Over a prime `p`, member `r` of the family is the `p x p` Latin
//! square `cell(i, j) = r i + j mod p`, one member per `r` in `[1, p)`.
//! Any two distinct members are orthogonal: overlaying them under any 2D
//! shift realizes every channel as a simultaneous value, at a spot that
//! can be written down in closed form. A user derives its member from a
//! hardware identity (here: a seeded draw from its available channels),
//! widens it with an identity column, reads it out row by row, and
//! replaces slots it cannot actually use. Two such users with any common
//! channel meet on every common channel within `(2p + 1) p` slots, no
//! matter their clock offset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::machseq::{ChMatrix, ChSequence, MatrixRole};
use crate::numtheory;

/// Which channels of a universe `[0, N)` a user can actually tune to.
/// Always nonempty, sorted, duplicate free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvailableChannelSet {
    universe: u32,
    channels: Vec<u32>,
}

impl AvailableChannelSet {
    pub fn new(universe: u32, channels: impl IntoIterator<Item = u32>) -> Result<AvailableChannelSet> {
        if universe == 0 {
            return Err(Error::precondition("channel universe must be at least 1"));
        }
        let mut channels: Vec<u32> = channels.into_iter().collect();
        channels.sort_unstable();
        channels.dedup();
        if channels.is_empty() {
            return Err(Error::precondition("available channel set is empty"));
        }
        let top = *channels.last().expect("nonempty");
        if top >= universe {
            return Err(Error::precondition(format!(
                "channel {top} is outside the universe of {universe}"
            )));
        }
        Ok(AvailableChannelSet { universe, channels })
    }

    /// Every channel of the universe.
    pub fn full(universe: u32) -> Result<AvailableChannelSet> {
        AvailableChannelSet::new(universe, 0..universe)
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    /// Ascending, duplicate free.
    pub fn channels(&self) -> &[u32] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.channels.len() == self.universe as usize
    }

    pub fn contains(&self, c: u32) -> bool {
        self.channels.binary_search(&c).is_ok()
    }

    /// Channels both sets can tune to, ascending.
    pub fn common(&self, other: &AvailableChannelSet) -> Vec<u32> {
        self.channels
            .iter()
            .copied()
            .filter(|&c| other.contains(c))
            .collect()
    }
}

/// One Latin square of the family: `cell(i, j) = r i + j mod p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrthoMember {
    p: u64,
    r: u64,
}

impl OrthoMember {
    /// `p` prime, `1 <= r < p`.
    pub fn new(p: u64, r: u64) -> Result<OrthoMember> {
        if !numtheory::is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        if r == 0 || r >= p {
            return Err(Error::precondition(format!(
                "member id {r} must lie in [1, {p})"
            )));
        }
        Ok(OrthoMember { p, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// Indices are reduced mod `p`.
    pub fn cell(&self, i: u64, j: u64) -> u32 {
        ((self.r * (i % self.p) + j % self.p) % self.p) as u32
    }
}

/// All `p - 1` members over a prime `p`, ids ascending from 1.
#[derive(Clone, Debug)]
pub struct OrthoFamily {
    p: u64,
    members: Vec<OrthoMember>,
}

impl OrthoFamily {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn members(&self) -> &[OrthoMember] {
        &self.members
    }

    pub fn member_for_id(&self, r: u64) -> Option<&OrthoMember> {
        self.members.get(r.checked_sub(1)? as usize)
    }
}

pub fn build_ortho_family(p: u64) -> Result<OrthoFamily> {
    if !numtheory::is_prime(p) {
        return Err(Error::precondition(format!("{p} is not prime")));
    }
    let members = (1..p)
        .map(|r| OrthoMember { p, r })
        .collect();
    Ok(OrthoFamily { p, members })
}

/// Outcome of sweeping one member pair under every 2D shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrthoPairReport {
    first_missing: Option<(u64, u64, u32)>,
    first_witness_mismatch: Option<(u64, u64, u32)>,
}

impl OrthoPairReport {
    pub fn passed(&self) -> bool {
        self.first_missing.is_none() && self.first_witness_mismatch.is_none()
    }

    /// First `(delta, tau, channel)` with no simultaneous occurrence.
    pub fn first_missing(&self) -> Option<(u64, u64, u32)> {
        self.first_missing
    }

    /// First `(delta, tau, channel)` where the closed-form meeting spot
    /// did not hold the predicted value.
    pub fn first_witness_mismatch(&self) -> Option<(u64, u64, u32)> {
        self.first_witness_mismatch
    }
}

/// Exhaustively overlays `a` against `b` shifted by every `(delta,
/// tau)`, requiring each channel `k < p` to occur simultaneously
/// somewhere, and cross-checks the closed-form witness: the row `i* =
/// (r_b delta + tau) / (r_a - r_b)` solves both squares at once, column
/// `j* = k - r_a i*`. The members must share `p` and differ in `r`.
pub fn verify_ortho_pair(a: &OrthoMember, b: &OrthoMember) -> Result<OrthoPairReport> {
    if a.p != b.p {
        return Err(Error::precondition(format!(
            "members live over different primes {} and {}",
            a.p, b.p
        )));
    }
    if a.r == b.r {
        return Err(Error::precondition(
            "orthogonality is between distinct members; a member is not orthogonal to itself",
        ));
    }
    let p = a.p;
    let inv = numtheory::mod_inverse((a.r + p - b.r) % p, p)?;
    let mut seen = vec![false; p as usize];
    for delta in 0..p {
        for tau in 0..p {
            seen.fill(false);
            let mut found = 0u64;
            for i in 0..p {
                for j in 0..p {
                    let v = a.cell(i, j);
                    if v == b.cell(i + delta, j + tau) && !seen[v as usize] {
                        seen[v as usize] = true;
                        found += 1;
                    }
                }
            }
            if found < p {
                let k = seen.iter().position(|&s| !s).expect("some channel missing") as u32;
                return Ok(OrthoPairReport {
                    first_missing: Some((delta, tau, k)),
                    first_witness_mismatch: None,
                });
            }
            let istar = (b.r * delta + tau) % p * inv % p;
            for k in 0..p {
                let jstar = (k + p - a.r * istar % p) % p;
                if a.cell(istar, jstar) != k as u32
                    || b.cell(istar + delta, jstar + tau) != k as u32
                {
                    return Ok(OrthoPairReport {
                        first_missing: None,
                        first_witness_mismatch: Some((delta, tau, k as u32)),
                    });
                }
            }
        }
    }
    Ok(OrthoPairReport {
        first_missing: None,
        first_witness_mismatch: None,
    })
}

/// Outcome of the column cover sweep of one member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverReport {
    first_missing: Option<(u64, u32)>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.first_missing.is_none()
    }

    /// First `(column, channel)` the column does not carry.
    pub fn first_missing(&self) -> Option<(u64, u32)> {
        self.first_missing
    }
}

/// Checks that every column of the member carries every channel: a user
/// parked on any channel is visited once per column sweep.
#[must_use]
pub fn verify_cover(member: &OrthoMember) -> CoverReport {
    let p = member.p;
    let mut seen = vec![false; p as usize];
    for j in 0..p {
        seen.fill(false);
        for i in 0..p {
            seen[member.cell(i, j) as usize] = true;
        }
        if let Some(k) = seen.iter().position(|&s| !s) {
            return CoverReport {
                first_missing: Some((j, k as u32)),
            };
        }
    }
    CoverReport {
        first_missing: None,
    }
}

/// Widens a member to `p x (2p + 1)`: its id in column 0, then the
/// member twice. Reading a row takes `2p + 1` slots, long enough that
/// any alignment of two such rows overlaps a full `p`-column window.
pub fn build_extended_matrix(member: &OrthoMember) -> Result<ChMatrix> {
    let p = member.p;
    let universe: u32 = p
        .try_into()
        .map_err(|_| Error::precondition(format!("modulus {p} is too large for a matrix")))?;
    ChMatrix::from_fn(
        p as usize,
        (2 * p + 1) as usize,
        universe,
        MatrixRole::OrthoExtended,
        |i, j| {
            if j == 0 {
                member.r as u32
            } else {
                member.cell(i as u64, (j as u64 - 1) % p)
            }
        },
    )
}

/// Member id a seed picks for this availability set: uniform over the
/// nonzero available channels, `None` when channel 0 is all there is.
/// Draws from stream 0 of the seeded generator; replacement draws use
/// the later streams, so id and replacements never share random bits.
pub fn selected_id(avail: &AvailableChannelSet, seed: u64) -> Option<u32> {
    let nonzero: Vec<u32> = avail.channels().iter().copied().filter(|&c| c != 0).collect();
    if nonzero.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    Some(nonzero[rng.random_range(0..nonzero.len())])
}

fn replacement_draw(seed: u64, t: u64, avail: &AvailableChannelSet) -> u32 {
    // One stream per slot: re-rolling slot t never disturbs slot t'.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t + 1);
    avail.channels()[rng.random_range(0..avail.len())]
}

/// Rewrites every slot whose channel is unavailable with an independent
/// uniform draw from `avail`, keyed by `(seed, slot)`.
pub fn replace_unavailable(values: &mut [u32], avail: &AvailableChannelSet, seed: u64) {
    for (t, v) in values.iter_mut().enumerate() {
        if !avail.contains(*v) {
            *v = replacement_draw(seed, t as u64, avail);
        }
    }
}

/// Hopping sequence for one user of the orthogonal scheme: pick a member
/// id from the nonzero available channels (or park on 0 when the set is
/// just `{0}`), read the extended matrix row by row, and replace
/// unavailable slots per `(seed, slot)`. Period `(2p + 1) p` over the
/// prime `p >= universe`. Any two users built this way with a common
/// channel rendezvous on every common channel within one period.
pub fn ortho_ch(avail: &AvailableChannelSet, seed: u64) -> Result<ChSequence> {
    let n = avail.universe();
    let p = numtheory::smallest_prime_geq(n as u64);
    let period = ((2 * p + 1) * p) as usize;
    match selected_id(avail, seed) {
        None => ChSequence::new(
            vec![0; period],
            n,
            format!("ortho-ch N={n} p={p} r=none seed={seed}"),
        ),
        Some(r) => {
            let member = OrthoMember::new(p, r as u64)?;
            let ext = build_extended_matrix(&member)?;
            let width = (2 * p + 1) as usize;
            let mut values = Vec::with_capacity(period);
            for t in 0..period {
                values.push(ext.at(t / width, t % width));
            }
            replace_unavailable(&mut values, avail, seed);
            ChSequence::new(
                values,
                n,
                format!("ortho-ch N={n} p={p} r={r} seed={seed} replace=per-slot"),
            )
        }
    }
}

/// Worst-case slots to rendezvous for two users of the scheme over a
/// universe of `n` channels: `(2p + 1) p`, `p` the smallest prime at
/// least `n`. One full period of [`ortho_ch`].
pub fn mttr_bound(n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::precondition("channel count must be at least 1"));
    }
    let p = numtheory::smallest_prime_geq(n as u64);
    Ok((2 * p + 1) * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_latin_squares() {
        for (p, r) in [(2u64, 1u64), (5, 3), (7, 4), (13, 11)] {
            let m = OrthoMember::new(p, r).unwrap();
            for i in 0..p {
                let mut row: Vec<u32> = (0..p).map(|j| m.cell(i, j)).collect();
                row.sort_unstable();
                assert_eq!(row, (0..p as u32).collect::<Vec<u32>>(), "p={p} r={r} row {i}");
            }
            for j in 0..p {
                let mut col: Vec<u32> = (0..p).map(|i| m.cell(i, j)).collect();
                col.sort_unstable();
                assert_eq!(col, (0..p as u32).collect::<Vec<u32>>(), "p={p} r={r} col {j}");
            }
        }
    }

    #[test]
    fn family_has_p_minus_1_members() {
        let fam = build_ortho_family(7).unwrap();
        assert_eq!(fam.members().len(), 6);
        assert_eq!(fam.member_for_id(3).unwrap().r(), 3);
        assert!(fam.member_for_id(0).is_none());
        assert!(fam.member_for_id(7).is_none());
        assert!(build_ortho_family(6).is_err());
    }

    #[test]
    fn all_pairs_verify_with_witnesses() {
        for p in [5u64, 7, 13] {
            let fam = build_ortho_family(p).unwrap();
            for a in fam.members() {
                for b in fam.members() {
                    if a.r() == b.r() {
                        continue;
                    }
                    let report = verify_ortho_pair(a, b).unwrap();
                    assert!(report.passed(), "p={p} pair ({}, {})", a.r(), b.r());
                }
            }
        }
    }

    #[test]
    fn self_pairs_are_rejected() {
        let m = OrthoMember::new(5, 2).unwrap();
        assert!(matches!(
            verify_ortho_pair(&m, &m),
            Err(Error::Precondition(_))
        ));
        let other = OrthoMember::new(7, 2).unwrap();
        assert!(matches!(
            verify_ortho_pair(&m, &other),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn orthogonality_hits_every_ordered_pair_once() {
        let a = OrthoMember::new(7, 2).unwrap();
        let b = OrthoMember::new(7, 5).unwrap();
        let mut pairs = [0u32; 49];
        for i in 0..7u64 {
            for j in 0..7u64 {
                pairs[(a.cell(i, j) * 7 + b.cell(i, j)) as usize] += 1;
            }
        }
        assert!(pairs.iter().all(|&c| c == 1));
    }

    #[test]
    fn columns_cover_every_channel() {
        for p in [2u64, 5, 13] {
            for r in 1..p {
                let m = OrthoMember::new(p, r).unwrap();
                assert!(verify_cover(&m).passed(), "p={p} r={r}");
            }
        }
    }

    #[test]
    fn extended_matrix_layout() {
        let m = OrthoMember::new(5, 3).unwrap();
        let ext = build_extended_matrix(&m).unwrap();
        assert_eq!((ext.rows(), ext.cols()), (5, 11));
        for i in 0..5 {
            assert_eq!(ext.at(i, 0), 3, "identity column");
            for j in 0..5 {
                assert_eq!(ext.at(i, 1 + j), m.cell(i as u64, j as u64));
                assert_eq!(ext.at(i, 6 + j), m.cell(i as u64, j as u64));
            }
        }
    }

    #[test]
    fn lone_channel_zero_parks() {
        let avail = AvailableChannelSet::new(4, [0]).unwrap();
        let seq = ortho_ch(&avail, 9).unwrap();
        assert_eq!(seq.period(), 55);
        assert!(seq.values().iter().all(|&v| v == 0));
        assert_eq!(seq.provenance(), "ortho-ch N=4 p=5 r=none seed=9");
    }

    #[test]
    fn two_channel_readout_golden() {
        // N=2: p=2, the only member is r=1, so the whole sequence is
        // forced: rows [1,0,1,0,1] and [1,1,0,1,0] back to back.
        let avail = AvailableChannelSet::full(2).unwrap();
        let seq = ortho_ch(&avail, 123).unwrap();
        assert_eq!(seq.values(), &[1, 0, 1, 0, 1, 1, 1, 0, 1, 0]);
        assert_eq!(seq.provenance(), "ortho-ch N=2 p=2 r=1 seed=123 replace=per-slot");
    }

    #[test]
    fn sequences_are_deterministic_and_in_bounds() {
        let avail = AvailableChannelSet::new(4, [0, 2, 3]).unwrap();
        let a = ortho_ch(&avail, 7).unwrap();
        let b = ortho_ch(&avail, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.period(), 55);
        assert!(a.values().iter().all(|&v| avail.contains(v)));
        let c = ortho_ch(&avail, 8).unwrap();
        assert_eq!(c.period(), 55);
        assert!(c.values().iter().all(|&v| avail.contains(v)));
    }

    #[test]
    fn id_pick_uses_only_nonzero_channels() {
        let avail = AvailableChannelSet::new(6, [0, 2, 5]).unwrap();
        for seed in 0..50 {
            let r = selected_id(&avail, seed).unwrap();
            assert!(r == 2 || r == 5, "seed {seed} picked {r}");
        }
        let lonely = AvailableChannelSet::new(6, [0]).unwrap();
        assert_eq!(selected_id(&lonely, 3), None);
    }

    #[test]
    fn bound_goldens() {
        assert_eq!(mttr_bound(4).unwrap(), 55);
        assert_eq!(mttr_bound(5).unwrap(), 55);
        assert_eq!(mttr_bound(12).unwrap(), 351);
        assert!(mttr_bound(0).is_err());
    }

    #[test]
    fn availability_set_validation() {
        assert!(AvailableChannelSet::new(4, []).is_err());
        assert!(AvailableChannelSet::new(4, [4]).is_err());
        assert!(AvailableChannelSet::new(0, [0]).is_err());
        let set = AvailableChannelSet::new(5, [3, 1, 3]).unwrap();
        assert_eq!(set.channels(), &[1, 3]);
        assert!(!set.is_full());
        assert!(AvailableChannelSet::full(5).unwrap().is_full());
        let other = AvailableChannelSet::new(5, [0, 3, 4]).unwrap();
        assert_eq!(set.common(&other), vec![3]);
    }

    #[test]
    fn member_validation() {
        assert!(OrthoMember::new(6, 1).is_err());
        assert!(OrthoMember::new(7, 0).is_err());
        assert!(OrthoMember::new(7, 7).is_err());
    }
}
