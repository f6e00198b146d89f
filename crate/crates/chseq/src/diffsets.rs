//! Difference sets over `Z_p`.
//!
//! A set `D` is a *perfect* difference set when every nonzero residue
//! arises exactly once as an ordered difference `a - b mod p` of distinct
//! elements of `D`, and *relaxed* when every residue arises at least once.
//! Perfect sets of size `l + 1` over `Z_{l^2+l+1}` exist for prime power
//! orders `l`; relaxed sets of size below `2 sqrt(p)` exist for every `p`
//! and are what the general square construction runs on.

use crate::error::{Error, Result};

/// Largest order [`find_perfect_difference_set`] will search without an
/// explicit ceiling. The backtracking search is exponential in principle;
/// everything up to here completes in well under a second.
pub const DEFAULT_SEARCH_CEILING: u64 = 11;

/// What a coverage sweep certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Every nonzero residue covered exactly once.
    Perfect,
    /// Every nonzero residue covered at least once.
    Relaxed,
    /// Some residue not covered at all.
    Neither,
}

/// Certification level a [`DifferenceSet`] carries by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Perfect,
    Relaxed,
}

/// Full result of a coverage sweep: the verdict plus, as witness, how
/// often each nonzero residue was hit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    certification: Certification,
    counts: Vec<u64>,
}

impl CoverageReport {
    pub fn certification(&self) -> Certification {
        self.certification
    }

    /// Times residue `l` occurs as an ordered difference. `None` when `l`
    /// is 0 or out of range: only nonzero residues are tracked.
    pub fn count_for(&self, l: u64) -> Option<u64> {
        if l == 0 || l as usize >= self.counts.len() {
            None
        } else {
            Some(self.counts[l as usize])
        }
    }

    /// Counts indexed by residue; entry 0 is unused and always 0.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Least uncovered residue, if any.
    pub fn first_uncovered(&self) -> Option<u64> {
        (1..self.counts.len() as u64).find(|&l| self.counts[l as usize] == 0)
    }
}

/// A difference set that passed certification at construction time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceSet {
    p: u64,
    elements: Vec<u64>,
    level: Level,
}

impl DifferenceSet {
    /// Certifies `elements` over `Z_p` and wraps them. Errors when the
    /// set is structurally invalid or covers some residue zero times.
    pub fn certify(p: u64, elements: Vec<u64>) -> Result<Self> {
        let report = verify_difference_set(p, &elements)?;
        let level = match report.certification() {
            Certification::Perfect => Level::Perfect,
            Certification::Relaxed => Level::Relaxed,
            Certification::Neither => {
                let l = report.first_uncovered().unwrap_or(0);
                return Err(Error::malformed(format!(
                    "not a difference set over Z_{p}: residue {l} is never a difference"
                )));
            }
        };
        let mut elements = elements;
        elements.sort_unstable();
        Ok(DifferenceSet { p, elements, level })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Elements in ascending order.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn contains(&self, v: u64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    /// The translate `{d + r mod p}`. Translation permutes the difference
    /// pairs without changing any difference, so the level carries over.
    #[must_use]
    pub fn rotated(&self, r: u64) -> DifferenceSet {
        let mut elements: Vec<u64> = self
            .elements
            .iter()
            .map(|&d| (d + r % self.p) % self.p)
            .collect();
        elements.sort_unstable();
        DifferenceSet {
            p: self.p,
            elements,
            level: self.level,
        }
    }
}

/// Sweeps all ordered pairs of distinct elements and tallies their
/// differences mod `p`. Structural errors (empty set, duplicates,
/// elements outside `[0, p)`) are reported as malformed input.
pub fn verify_difference_set(p: u64, elements: &[u64]) -> Result<CoverageReport> {
    if p == 0 {
        return Err(Error::precondition("modulus must be at least 1"));
    }
    if elements.is_empty() {
        return Err(Error::malformed("difference set has no elements"));
    }
    if let Some(&v) = elements.iter().find(|&&v| v >= p) {
        return Err(Error::malformed(format!(
            "element {v} is outside Z_{p}"
        )));
    }
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::malformed("difference set has a repeated element"));
    }

    let mut counts = vec![0u64; p as usize];
    for &a in &sorted {
        for &b in &sorted {
            if a != b {
                counts[((a + p - b) % p) as usize] += 1;
            }
        }
    }
    let certification = if counts[1..].iter().all(|&c| c == 1) {
        Certification::Perfect
    } else if counts[1..].iter().all(|&c| c >= 1) {
        Certification::Relaxed
    } else {
        Certification::Neither
    };
    Ok(CoverageReport {
        certification,
        counts,
    })
}

/// Canonical perfect difference set of order `l`: `l + 1` elements over
/// `Z_{l^2+l+1}`, containing 0 and 1, lexicographically least among all
/// such sets. Searches up to [`DEFAULT_SEARCH_CEILING`].
pub fn find_perfect_difference_set(l: u64) -> Result<DifferenceSet> {
    find_perfect_difference_set_bounded(l, DEFAULT_SEARCH_CEILING)
}

/// Same search with an explicit order ceiling.
pub fn find_perfect_difference_set_bounded(l: u64, ceiling: u64) -> Result<DifferenceSet> {
    if l == 0 {
        return Err(Error::precondition("order must be at least 1"));
    }
    if l > ceiling {
        return Err(Error::SearchCeiling {
            what: "perfect difference set order",
            value: l,
            ceiling,
        });
    }
    let p = l * l + l + 1;
    let target = (l + 1) as usize;
    let m = p as usize;

    // Depth-first, candidates ascending, 0 and 1 pinned: the first
    // complete set found is the lexicographic minimum.
    let mut set = vec![0u64, 1];
    let mut used = vec![false; m];
    used[1] = true;
    used[m - 1] = true;
    if (target == set.len() || extend(&mut set, &mut used, target, m))
        && set.len() == target
    {
        return DifferenceSet::certify(p, set);
    }
    Err(Error::precondition(format!(
        "no perfect difference set of order {l} exists (order must be a prime power)"
    )))
}

/// Tries to grow `set` to `target` elements without repeating a
/// difference. Leaves `set` and `used` untouched on failure.
fn extend(set: &mut Vec<u64>, used: &mut [bool], target: usize, m: usize) -> bool {
    let last = *set.last().expect("set is seeded with {0, 1}") as usize;
    let needed = target - set.len();
    // Candidates stay ascending, so at least `needed` values must remain.
    for c in (last + 1)..=(m - needed) {
        let mut fresh: Vec<usize> = Vec::with_capacity(2 * set.len());
        let mut ok = true;
        for &e in set.iter() {
            let d1 = (c + m - e as usize) % m;
            let d2 = (e as usize + m - c) % m;
            if used[d1] || used[d2] || fresh.contains(&d1) || fresh.contains(&d2) {
                ok = false;
                break;
            }
            fresh.push(d1);
            if d2 != d1 {
                fresh.push(d2);
            }
        }
        if !ok {
            continue;
        }
        for &d in &fresh {
            used[d] = true;
        }
        set.push(c as u64);
        if set.len() == target || extend(set, used, target, m) {
            return true;
        }
        set.pop();
        for &d in &fresh {
            used[d] = false;
        }
    }
    false
}

/// Relaxed difference set `{0, .., delta-1} union {k*delta - 1 : 2 <= k
/// <= floor(p/delta)}` over `Z_p`. Size `delta + floor(p/delta) - 1`,
/// which is below `2 sqrt(p)` at `delta = ceil(sqrt(p))`. The result is
/// re-certified before it is returned.
pub fn build_rds(p: u64, delta: u64) -> Result<DifferenceSet> {
    if delta < 2 {
        return Err(Error::precondition(format!(
            "block width {delta} must be at least 2"
        )));
    }
    if p < delta {
        return Err(Error::precondition(format!(
            "modulus {p} is smaller than the block width {delta}"
        )));
    }
    let set = DifferenceSet::certify(p, rds_elements(p, delta))?;
    debug_assert!(set.len() as u64 == delta + p / delta - 1);
    Ok(set)
}

fn rds_elements(p: u64, delta: u64) -> Vec<u64> {
    let mut elements: Vec<u64> = (0..delta).collect();
    elements.extend((2..=p / delta).map(|k| k * delta - 1));
    elements
}
