//! Two-user rendezvous simulator.
//!
//! User 1 plays `seq1(t)` and user 2, whose clock runs `drift` slots
//! ahead, plays `seq2(t + drift)`; both extend their sequences
//! periodically. They rendezvous in slot `t` when the channels match.
//! Times are reported 1-based: a meeting in the very first slot is
//! `T = 1`. `T` is the first meeting on any channel, `T-sharp` the first
//! slot by which every commonly available channel has hosted one.
//!
//! Sweeps enumerate every drift against the second user's period for a
//! list of seeds, which is exhaustive: shifting the drift by a full
//! period never changes a run.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::machseq::{self, ChSequence};
use crate::orthoch::{self, AvailableChannelSet};

/// One simulated run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RendezvousReport {
    ttr: Option<u64>,
    per_channel: BTreeMap<u32, u64>,
    common: Vec<u32>,
    horizon: u64,
}

impl RendezvousReport {
    /// 1-based slot of the first meeting, `None` if the horizon passed
    /// without one.
    pub fn ttr(&self) -> Option<u64> {
        self.ttr
    }

    /// First meeting slot per channel, for the channels that met.
    pub fn per_channel(&self) -> &BTreeMap<u32, u64> {
        &self.per_channel
    }

    /// First slot of a meeting on channel `k`.
    pub fn channel_ttr(&self, k: u32) -> Option<u64> {
        self.per_channel.get(&k).copied()
    }

    /// Channels both users could have met on.
    pub fn common_channels(&self) -> &[u32] {
        &self.common
    }

    /// 1-based slot by which every common channel has hosted a meeting,
    /// `None` while any is still waiting.
    pub fn t_sharp(&self) -> Option<u64> {
        if self.per_channel.len() == self.common.len() {
            self.per_channel.values().copied().max()
        } else {
            None
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }
}

/// Simulates one run. The sequences must share a channel universe, each
/// must respect its user's availability set, and the sets must have a
/// channel in common; `T` is always `min` and `T-sharp` always `max` of
/// the per-channel meeting times by construction.
pub fn run(
    seq1: &ChSequence,
    seq2: &ChSequence,
    drift: u64,
    horizon: u64,
    avail1: &AvailableChannelSet,
    avail2: &AvailableChannelSet,
) -> Result<RendezvousReport> {
    if horizon == 0 {
        return Err(Error::precondition("horizon must be at least 1"));
    }
    if seq1.channel_universe() != seq2.channel_universe() {
        return Err(Error::precondition(format!(
            "sequences live in different universes, {} and {}",
            seq1.channel_universe(),
            seq2.channel_universe()
        )));
    }
    for (who, seq, avail) in [("first", seq1, avail1), ("second", seq2, avail2)] {
        if seq.channel_universe() != avail.universe() {
            return Err(Error::precondition(format!(
                "{who} user's sequence universe {} does not match its availability universe {}",
                seq.channel_universe(),
                avail.universe()
            )));
        }
        if let Some(&v) = seq.values().iter().find(|&&v| !avail.contains(v)) {
            return Err(Error::precondition(format!(
                "{who} user's sequence plays channel {v}, which it cannot tune to"
            )));
        }
    }
    let common = avail1.common(avail2);
    if common.is_empty() {
        return Err(Error::precondition(
            "no common channel: rendezvous is impossible",
        ));
    }

    let mut per_channel = BTreeMap::new();
    let mut ttr = None;
    for t in 0..horizon {
        let c = seq1.at(t);
        if c == seq2.at(t + drift) {
            ttr.get_or_insert(t + 1);
            per_channel.entry(c).or_insert(t + 1);
            if per_channel.len() == common.len() {
                break;
            }
        }
    }
    Ok(RendezvousReport {
        ttr,
        per_channel,
        common,
        horizon,
    })
}

/// Mints the hopping sequence a user would run for a given seed. Closures
/// `Fn(u64) -> Result<ChSequence>` qualify.
pub trait SequenceSource {
    fn generate(&self, seed: u64) -> Result<ChSequence>;
}

impl<F: Fn(u64) -> Result<ChSequence>> SequenceSource for F {
    fn generate(&self, seed: u64) -> Result<ChSequence> {
        self(seed)
    }
}

/// Square-construction user over `l^2` channels, restricted to an
/// availability set: slots it cannot tune to are replaced per
/// `(seed, slot)` like the orthogonal scheme does.
pub struct IdealChSource {
    l: u64,
    avail: AvailableChannelSet,
}

impl IdealChSource {
    pub fn new(l: u64, avail: AvailableChannelSet) -> Result<IdealChSource> {
        if avail.universe() as u64 != l * l {
            return Err(Error::precondition(format!(
                "availability universe {} does not match l^2 = {}",
                avail.universe(),
                l * l
            )));
        }
        Ok(IdealChSource { l, avail })
    }
}

impl SequenceSource for IdealChSource {
    fn generate(&self, seed: u64) -> Result<ChSequence> {
        restrict(machseq::ideal_ch(self.l)?, &self.avail, seed)
    }
}

/// General-construction user over any universe, availability-restricted
/// the same way.
pub struct GeneralMachSource {
    n: u64,
    avail: AvailableChannelSet,
}

impl GeneralMachSource {
    pub fn new(n: u64, avail: AvailableChannelSet) -> Result<GeneralMachSource> {
        if avail.universe() as u64 != n {
            return Err(Error::precondition(format!(
                "availability universe {} does not match n = {n}",
                avail.universe()
            )));
        }
        Ok(GeneralMachSource { n, avail })
    }
}

impl SequenceSource for GeneralMachSource {
    fn generate(&self, seed: u64) -> Result<ChSequence> {
        restrict(machseq::general_mach_ch(self.n)?, &self.avail, seed)
    }
}

/// Orthogonal-scheme user; the seed picks its member id and drives its
/// replacements.
pub struct OrthoChSource {
    avail: AvailableChannelSet,
}

impl OrthoChSource {
    pub fn new(avail: AvailableChannelSet) -> OrthoChSource {
        OrthoChSource { avail }
    }
}

impl SequenceSource for OrthoChSource {
    fn generate(&self, seed: u64) -> Result<ChSequence> {
        orthoch::ortho_ch(&self.avail, seed)
    }
}

/// Memoryless reference: every slot an independent uniform draw from the
/// availability set, materialized with a fixed period.
pub struct UniformRandomSource {
    avail: AvailableChannelSet,
    period: u64,
}

impl UniformRandomSource {
    pub fn new(avail: AvailableChannelSet, period: u64) -> Result<UniformRandomSource> {
        if period == 0 {
            return Err(Error::precondition("period must be at least 1"));
        }
        Ok(UniformRandomSource { avail, period })
    }
}

impl SequenceSource for UniformRandomSource {
    fn generate(&self, seed: u64) -> Result<ChSequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels = self.avail.channels();
        let values = (0..self.period)
            .map(|_| channels[rng.random_range(0..channels.len())])
            .collect();
        ChSequence::new(
            values,
            self.avail.universe(),
            format!(
                "random N={} period={} seed={seed}",
                self.avail.universe(),
                self.period
            ),
        )
    }
}

fn restrict(seq: ChSequence, avail: &AvailableChannelSet, seed: u64) -> Result<ChSequence> {
    if avail.is_full() {
        return Ok(seq);
    }
    let mut values = seq.values().to_vec();
    orthoch::replace_unavailable(&mut values, avail, seed);
    let channels: Vec<String> = avail.channels().iter().map(u32::to_string).collect();
    let provenance = format!(
        "{} avail={} seed={seed} replace=per-slot",
        seq.provenance(),
        channels.join(",")
    );
    ChSequence::new(values, seq.channel_universe(), provenance)
}

/// One cell of a sweep grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub drift: u64,
    pub seed: u64,
    /// Size of user 1's availability set.
    pub n1: u32,
    /// Size of user 2's availability set.
    pub n2: u32,
    /// Number of common channels.
    pub g: u32,
    /// Time to first rendezvous, if any.
    pub t: Option<u64>,
    /// Time to rendezvous on every common channel, if reached.
    pub t_sharp: Option<u64>,
}

/// Which time a sweep summary is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMetric {
    /// First meeting on any common channel.
    TimeToRendezvous,
    /// First slot by which every common channel has hosted a meeting.
    TimeToFullDiversity,
}

/// Flat summary of a sweep, ready for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub metric: SweepMetric,
    pub period1: u64,
    pub period2: u64,
    pub seeds: u64,
    pub runs: u64,
    /// Runs that never reached the metric inside the horizon.
    pub misses: u64,
    /// Largest observed value of the metric, over runs that reached it.
    pub observed_max: Option<u64>,
    pub witness_drift: Option<u64>,
    pub witness_seed: Option<u64>,
    /// Bound the observation is judged against, when one applies.
    pub bound: Option<u64>,
    /// True iff nothing missed and the observed maximum is within bound.
    pub pass: bool,
}

/// Every run of a drift-by-seed grid.
#[derive(Clone, Debug)]
pub struct SweepReport {
    records: Vec<RunRecord>,
    period1: u64,
    period2: u64,
}

impl SweepReport {
    pub fn records(&self) -> &[RunRecord] {
        &self.records
    }

    /// Periods of the two users' sequences (for the last seed swept;
    /// construction periods do not depend on the seed).
    pub fn periods(&self) -> (u64, u64) {
        (self.period1, self.period2)
    }

    pub fn all_rendezvous(&self) -> bool {
        self.records.iter().all(|r| r.t.is_some())
    }

    pub fn all_diversity(&self) -> bool {
        self.records.iter().all(|r| r.t_sharp.is_some())
    }

    pub fn first_missed_rendezvous(&self) -> Option<&RunRecord> {
        self.records.iter().find(|r| r.t.is_none())
    }

    pub fn first_missed_diversity(&self) -> Option<&RunRecord> {
        self.records.iter().find(|r| r.t_sharp.is_none())
    }

    /// Largest observed time to rendezvous as `(t, drift, seed)`, over
    /// the runs that met at all.
    pub fn observed_mttr(&self) -> Option<(u64, u64, u64)> {
        self.records
            .iter()
            .filter_map(|r| r.t.map(|t| (t, r.drift, r.seed)))
            .max_by_key(|&(t, _, _)| t)
    }

    /// Largest observed time to full diversity as `(t, drift, seed)`.
    pub fn observed_mcttr(&self) -> Option<(u64, u64, u64)> {
        self.records
            .iter()
            .filter_map(|r| r.t_sharp.map(|t| (t, r.drift, r.seed)))
            .max_by_key(|&(t, _, _)| t)
    }

    /// One CSV row per run; missing times render as `-1`.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        write_records_csv(w, &self.records)
    }

    pub fn summarize(&self, metric: SweepMetric, bound: Option<u64>) -> SweepSummary {
        let (observed, misses) = match metric {
            SweepMetric::TimeToRendezvous => (
                self.observed_mttr(),
                self.records.iter().filter(|r| r.t.is_none()).count() as u64,
            ),
            SweepMetric::TimeToFullDiversity => (
                self.observed_mcttr(),
                self.records.iter().filter(|r| r.t_sharp.is_none()).count() as u64,
            ),
        };
        let mut seeds: Vec<u64> = self.records.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let within = match (observed, bound) {
            (Some((t, _, _)), Some(b)) => t <= b,
            _ => true,
        };
        SweepSummary {
            metric,
            period1: self.period1,
            period2: self.period2,
            seeds: seeds.len() as u64,
            runs: self.records.len() as u64,
            misses,
            observed_max: observed.map(|(t, _, _)| t),
            witness_drift: observed.map(|(_, d, _)| d),
            witness_seed: observed.map(|(_, _, s)| s),
            bound,
            pass: misses == 0 && within,
        }
    }
}

/// CSV rows for arbitrary run records, with the fixed header
/// `drift,seed,n1,n2,G,T,Tsharp`.
pub fn write_records_csv<W: Write>(mut w: W, records: &[RunRecord]) -> io::Result<()> {
    writeln!(w, "drift,seed,n1,n2,G,T,Tsharp")?;
    for r in records {
        let t = r.t.map_or(-1i64, |v| v as i64);
        let ts = r.t_sharp.map_or(-1i64, |v| v as i64);
        writeln!(w, "{},{},{},{},{},{},{}", r.drift, r.seed, r.n1, r.n2, r.g, t, ts)?;
    }
    Ok(())
}

fn run_grid(
    gen1: &dyn SequenceSource,
    gen2: &dyn SequenceSource,
    avail1: &AvailableChannelSet,
    avail2: &AvailableChannelSet,
    seeds: &[u64],
) -> Result<SweepReport> {
    if seeds.is_empty() {
        return Err(Error::precondition("sweep needs at least one seed"));
    }
    let g = avail1.common(avail2).len() as u32;
    let mut records = Vec::new();
    let (mut period1, mut period2) = (0, 0);
    for &seed in seeds {
        // Decorrelate the two users while keeping the grid reproducible:
        // user 1 runs seed 2s, user 2 runs 2s + 1.
        let s1 = gen1.generate(seed.wrapping_mul(2))?;
        let s2 = gen2.generate(seed.wrapping_mul(2).wrapping_add(1))?;
        period1 = s1.period();
        period2 = s2.period();
        let horizon = 2 * period1.max(period2);
        for drift in 0..period2 {
            let report = run(&s1, &s2, drift, horizon, avail1, avail2)?;
            records.push(RunRecord {
                drift,
                seed,
                n1: avail1.len() as u32,
                n2: avail2.len() as u32,
                g,
                t: report.ttr(),
                t_sharp: report.t_sharp(),
            });
        }
    }
    Ok(SweepReport {
        records,
        period1,
        period2,
    })
}

/// Runs every drift in `[0, period2)` for every seed and records the
/// times to first rendezvous. Read the result's [`SweepReport::observed_mttr`]
/// for the maximum.
pub fn mttr_sweep(
    gen1: &dyn SequenceSource,
    gen2: &dyn SequenceSource,
    avail1: &AvailableChannelSet,
    avail2: &AvailableChannelSet,
    seeds: &[u64],
) -> Result<SweepReport> {
    run_grid(gen1, gen2, avail1, avail2, seeds)
}

/// Same grid as [`mttr_sweep`]; read [`SweepReport::observed_mcttr`]
/// for the time by which every common channel has met.
pub fn mcttr_sweep(
    gen1: &dyn SequenceSource,
    gen2: &dyn SequenceSource,
    avail1: &AvailableChannelSet,
    avail2: &AvailableChannelSet,
    seeds: &[u64],
) -> Result<SweepReport> {
    run_grid(gen1, gen2, avail1, avail2, seeds)
}

/// Monte Carlo estimate of the expected time to rendezvous.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EttrReport {
    pub trials: u64,
    /// Trials that met within the horizon; only these enter the mean.
    pub completed: u64,
    pub mean: f64,
    /// Standard error of the mean.
    pub std_err: f64,
}

/// Draws `trials` independent pairs of sequences (fresh seeds from a
/// generator seeded with `rng_seed`, a uniform drift each) and averages
/// the time to rendezvous, horizon twice the larger period.
pub fn ettr_estimate(
    gen1: &dyn SequenceSource,
    gen2: &dyn SequenceSource,
    avail1: &AvailableChannelSet,
    avail2: &AvailableChannelSet,
    trials: u64,
    rng_seed: u64,
) -> Result<EttrReport> {
    if trials == 0 {
        return Err(Error::precondition("estimate needs at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut completed = 0u64;
    for _ in 0..trials {
        let s1 = gen1.generate(rng.next_u64())?;
        let s2 = gen2.generate(rng.next_u64())?;
        let drift = rng.random_range(0..s2.period());
        let horizon = 2 * s1.period().max(s2.period());
        let report = run(&s1, &s2, drift, horizon, avail1, avail2)?;
        if let Some(t) = report.ttr() {
            let t = t as f64;
            sum += t;
            sum_sq += t * t;
            completed += 1;
        }
    }
    let mean = if completed > 0 { sum / completed as f64 } else { 0.0 };
    let std_err = if completed > 1 {
        let var = (sum_sq - sum * sum / completed as f64) / (completed - 1) as f64;
        (var.max(0.0) / completed as f64).sqrt()
    } else {
        0.0
    };
    Ok(EttrReport {
        trials,
        completed,
        mean,
        std_err,
    })
}
