//! Channel hopping schedules with guaranteed rendezvous.
//!
//! Two radios that each hop over a subset of `N` channels meet once they
//! sit on the same channel in the same slot. This crate builds hopping
//! schedules for which that meeting is a structural certainty rather than
//! a matter of luck, verifies the underlying combinatorics exhaustively,
//! and measures time-to-rendezvous with a two-user slot simulator.
//!
//! Two constructions are provided:
//!
//! * [`machseq::ideal_ch`] and [`machseq::general_mach_ch`] emit periodic
//!   schedules with *maximum rendezvous diversity*: under every relative
//!   drift of two users running the schedule, every channel hosts a
//!   meeting within one period. The period is `2p^2` for a prime `p`
//!   slightly above `N`, within a factor of about 2 of the `N^2` lower
//!   bound for large `N`.
//! * [`orthoch::ortho_ch`] emits schedules for users that may see
//!   different channel subsets; any two of them meet on every commonly
//!   available channel within `(2p+1)p` slots, `p` the smallest prime at
//!   least `N`.
//!
//! The construction stack is bottom up: modular arithmetic
//! ([`numtheory`]), difference sets over `Z_p` ([`diffsets`]), ideal 0/1
//! matrices from quadratic residue tables ([`idealmat`]), the channel
//! matrices and their readout into sequences ([`machseq`]), the
//! orthogonal-family schedules ([`orthoch`]), the rendezvous simulator
//! ([`simulator`]), and a plain text interchange format ([`seqio`]).
//! Every layer ships the verifier for its own guarantee, and constructors
//! re-certify what they build before handing it out.

pub mod diffsets;
pub mod error;
pub mod idealmat;
pub mod machseq;
pub mod numtheory;
pub mod orthoch;
pub mod seqio;
pub mod simulator;

pub use error::{Error, Result};
