//! Shrinking property tests over the simulator contract and the
//! structural guarantees the constructions rest on. These overlap the
//! randomized acceptance checks on purpose: a failure here comes back
//! minimized.

use std::collections::BTreeSet;

use proptest::prelude::*;

use chseq::diffsets::{self, Certification};
use chseq::idealmat;
use chseq::machseq::ChSequence;
use chseq::orthoch::{self, AvailableChannelSet, OrthoMember};
use chseq::seqio;
use chseq::simulator;

fn arb_sequence(universe: u32, max_period: usize) -> impl Strategy<Value = ChSequence> {
    prop::collection::vec(0..universe, 1..=max_period)
        .prop_map(move |values| ChSequence::new(values, universe, "property instance").unwrap())
}

fn arb_pair() -> impl Strategy<Value = (ChSequence, ChSequence)> {
    (2u32..=8).prop_flat_map(|universe| (arb_sequence(universe, 40), arb_sequence(universe, 40)))
}

proptest! {
    /// T is the earliest per-channel meeting; T-sharp is the latest and
    /// only exists once every common channel has met.
    #[test]
    fn report_times_are_min_and_max((s1, s2) in arb_pair(), drift in 0u64..200, stretch in 1u64..4) {
        let avail = AvailableChannelSet::full(s1.channel_universe()).unwrap();
        let horizon = stretch * s1.period().max(s2.period());
        let report = simulator::run(&s1, &s2, drift, horizon, &avail, &avail).unwrap();

        prop_assert_eq!(report.ttr(), report.per_channel().values().min().copied());
        for (&k, &t) in report.per_channel() {
            prop_assert!(t >= 1 && t <= horizon);
            prop_assert_eq!(s1.at(t - 1), k);
            prop_assert_eq!(s2.at(t - 1 + drift), k);
        }
        match report.t_sharp() {
            Some(t) => {
                prop_assert_eq!(report.per_channel().len(), report.common_channels().len());
                prop_assert_eq!(Some(t), report.per_channel().values().max().copied());
            }
            None => prop_assert!(
                report.per_channel().len() < report.common_channels().len()
            ),
        }
    }

    /// Shifting the drift by the second user's full period changes
    /// nothing about the run.
    #[test]
    fn drift_is_periodic((s1, s2) in arb_pair(), drift in 0u64..100, laps in 1u64..4) {
        let avail = AvailableChannelSet::full(s1.channel_universe()).unwrap();
        let horizon = 2 * s1.period().max(s2.period());
        let base = simulator::run(&s1, &s2, drift, horizon, &avail, &avail).unwrap();
        let lapped = simulator::run(
            &s1, &s2, drift + laps * s2.period(), horizon, &avail, &avail,
        ).unwrap();
        prop_assert_eq!(base, lapped);
    }

    /// Swapping the users relabels the meeting slots by `+drift mod P`
    /// when the periods agree, and at zero drift leaves T unchanged.
    #[test]
    fn swapping_users_shifts_the_meeting_set(
        universe in 2u32..=6,
        values in prop::collection::vec((0u32..6, 0u32..6), 4..=40),
        drift_raw in 0u64..200,
    ) {
        let period = values.len() as u64;
        let drift = drift_raw % period;
        let (v1, v2): (Vec<u32>, Vec<u32>) = values
            .into_iter()
            .map(|(a, b)| (a % universe, b % universe))
            .unzip();
        let s1 = ChSequence::new(v1, universe, "swap lhs").unwrap();
        let s2 = ChSequence::new(v2, universe, "swap rhs").unwrap();

        let forward: BTreeSet<u64> = (0..period)
            .filter(|&t| s1.at(t) == s2.at(t + drift))
            .map(|t| (t + drift) % period)
            .collect();
        let swapped: BTreeSet<u64> = (0..period)
            .filter(|&t| s2.at(t) == s1.at(t + (period - drift) % period))
            .collect();
        prop_assert_eq!(forward, swapped);

        let avail = AvailableChannelSet::full(universe).unwrap();
        let a = simulator::run(&s1, &s2, 0, 2 * period, &avail, &avail).unwrap();
        let b = simulator::run(&s2, &s1, 0, 2 * period, &avail, &avail).unwrap();
        prop_assert_eq!(a.ttr(), b.ttr());
    }

    /// Every rotation of a perfect difference set is one too.
    #[test]
    fn perfect_difference_sets_close_under_rotation(which in 0usize..3, r in any::<u64>()) {
        let l = [2u64, 3, 5][which];
        let base = diffsets::find_perfect_difference_set(l).unwrap();
        let rotated = base.rotated(r % base.p());
        let report = diffsets::verify_difference_set(rotated.p(), rotated.elements()).unwrap();
        prop_assert_eq!(report.certification(), Certification::Perfect);
    }

    /// Any valid coefficient triple yields the exact correlation law:
    /// full mass at the origin, none elsewhere on the vertical axis, one
    /// everywhere else.
    #[test]
    fn placement_correlation_law_holds(which in 0usize..4, c2 in 1u64..13, c1 in 0u64..13, c0 in 0u64..13) {
        let p = [5u64, 7, 11, 13][which];
        let m = idealmat::build_ideal_matrix(p, c2 % (p - 1) + 1, c1 % p, c0 % p).unwrap();
        let mut total = 0;
        for delta in 0..p {
            for tau in 0..p {
                let want = match (delta, tau) {
                    (0, 0) => p,
                    (_, 0) => 0,
                    _ => 1,
                };
                prop_assert_eq!(m.correlation(delta, tau), want);
                total += want;
            }
        }
        prop_assert_eq!(total, p * p);
    }

    /// Family members are Latin squares and any two distinct ones meet
    /// on every channel under every toroidal shift.
    #[test]
    fn family_members_are_orthogonal_latin_squares(
        which in 0usize..6,
        ra_raw in 1u64..32,
        rb_raw in 1u64..32,
    ) {
        let p = [3u64, 5, 7, 11, 13, 17][which];
        let ra = (ra_raw - 1) % (p - 1) + 1;
        let rb = (rb_raw - 1) % (p - 1) + 1;
        prop_assume!(ra != rb);
        let a = OrthoMember::new(p, ra).unwrap();
        let b = OrthoMember::new(p, rb).unwrap();

        for i in 0..p {
            let row: BTreeSet<u32> = (0..p).map(|j| a.cell(i, j)).collect();
            let col: BTreeSet<u32> = (0..p).map(|j| a.cell(j, i)).collect();
            prop_assert_eq!(row.len() as u64, p);
            prop_assert_eq!(col.len() as u64, p);
        }
        let pair = orthoch::verify_ortho_pair(&a, &b).unwrap();
        prop_assert!(pair.passed());
        prop_assert!(orthoch::verify_cover(&a).passed());
    }

    /// An orthogonal-scheme sequence never strays outside its user's
    /// availability set, whatever that set is.
    #[test]
    fn ortho_sequences_respect_availability(mask in 1u32..64, seed in any::<u64>()) {
        let avail = AvailableChannelSet::new(6, (0..6).filter(|&c| mask & (1 << c) != 0)).unwrap();
        let seq = orthoch::ortho_ch(&avail, seed).unwrap();
        prop_assert!(seq.values().iter().all(|&v| avail.contains(v)));
        prop_assert_eq!(seq.period(), orthoch::mttr_bound(6).unwrap());
    }

    /// Text serialization round-trips every sequence exactly.
    #[test]
    fn sequence_text_roundtrip(
        universe in 1u32..50,
        raw in prop::collection::vec(any::<u32>(), 1..=200),
        tag in "[a-zA-Z0-9=,_-]{0,30}",
    ) {
        let values: Vec<u32> = raw.into_iter().map(|v| v % universe).collect();
        let seq = ChSequence::new(values, universe, tag).unwrap();
        let text = seqio::sequence_to_string(&seq);
        let back = seqio::read_sequence(text.as_bytes()).unwrap();
        prop_assert_eq!(back.values(), seq.values());
        prop_assert_eq!(back.channel_universe(), seq.channel_universe());
        prop_assert_eq!(back.provenance(), seq.provenance());
    }
}
