//! Command line front end: construct hopping schedules, re-run their
//! exhaustive verifiers, and sweep the two-user simulator.
//!
//! Every invocation is deterministic: the same arguments produce the
//! same bytes. Exit code 0 means every requested check passed, 1 means
//! some check failed, 2 means the request itself was unusable.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chseq::error::Error;
use chseq::machseq::{self, MachConstruction};
use chseq::numtheory;
use chseq::orthoch::{self, AvailableChannelSet};
use chseq::seqio;
use chseq::simulator::{self, SequenceSource, SweepMetric};
use chseq::Result;

#[derive(Parser)]
#[command(
    name = "chseq",
    version,
    about = "Channel hopping schedules with guaranteed rendezvous"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a sequence and write it in the text format.
    Generate(GenerateArgs),
    /// Re-run the exhaustive verifiers on a construction or a file.
    Verify(VerifyArgs),
    /// Simulate one two-user run at a fixed drift.
    Simulate(SimulateArgs),
    /// Sweep every drift and seed; export per-run CSV and a summary.
    Sweep(SweepArgs),
    /// Report the period overhead of the general construction.
    Ratio(RatioArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    /// Square construction over L^2 channels.
    IdealCh,
    /// Orthogonal scheme for asymmetric channel views.
    OrthoCh,
    /// Square construction over any channel count.
    GeneralMach,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Order of the square construction (ideal-ch only).
    #[arg(long = "L")]
    l: Option<u64>,
    /// Channel universe size (ortho-ch and general-mach).
    #[arg(long = "N")]
    n: Option<u32>,
    /// Available channels, comma separated. Default: the full universe.
    #[arg(long, value_delimiter = ',')]
    avail: Option<Vec<u32>>,
    /// Seed for the member id pick and slot replacements.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the sequence here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the underlying channel matrix, one row per line.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    /// Also write the dot matrix behind the construction, 0/1 rows
    /// (ideal-ch and general-mach only).
    #[arg(long)]
    ideal_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Construction to verify from scratch.
    #[arg(long, value_enum)]
    algorithm: Option<Algorithm>,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// Verify a sequence file (drift sweep) instead of a construction.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// User 1's available channels. Default: the full universe.
    #[arg(long, value_delimiter = ',')]
    avail1: Option<Vec<u32>>,
    /// User 2's available channels. Default: the full universe.
    #[arg(long, value_delimiter = ',')]
    avail2: Option<Vec<u32>>,
    /// Slots user 2's clock runs ahead.
    #[arg(long, default_value_t = 0)]
    drift: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Slots to simulate. Default: twice the larger period.
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long = "N")]
    n: Option<u32>,
    /// User 1's available channels. Default: the full universe.
    #[arg(long, value_delimiter = ',')]
    avail1: Option<Vec<u32>>,
    /// User 2's available channels. Default: the full universe.
    #[arg(long, value_delimiter = ',')]
    avail2: Option<Vec<u32>>,
    /// Number of seeds; the grid runs seeds 0, 1, .., seeds-1.
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    /// Write the per-run CSV here; the summary then goes to stdout.
    /// Without it the CSV takes stdout and the summary stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also estimate the expected time to rendezvous with this many
    /// randomized trials.
    #[arg(long)]
    ettr_trials: Option<u64>,
    /// Seed for the estimate's randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct RatioArgs {
    /// Channel universe size.
    #[arg(long = "N")]
    n: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Ratio(args) => cmd_ratio(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn require_l(l: Option<u64>, n: Option<u32>) -> Result<u64> {
    if n.is_some() {
        return Err(usage("ideal-ch is sized by --L, not --N"));
    }
    l.ok_or_else(|| usage("ideal-ch needs --L"))
}

fn require_n(l: Option<u64>, n: Option<u32>, what: &str) -> Result<u32> {
    if l.is_some() {
        return Err(usage(format!("{what} is sized by --N, not --L")));
    }
    n.ok_or_else(|| usage(format!("{what} needs --N")))
}

fn availability(universe: u32, spec: Option<Vec<u32>>) -> Result<AvailableChannelSet> {
    match spec {
        None => AvailableChannelSet::full(universe),
        Some(channels) => AvailableChannelSet::new(universe, channels),
    }
}

fn ideal_universe(l: u64) -> Result<u32> {
    (l * l)
        .try_into()
        .map_err(|_| usage(format!("order {l} is too large")))
}

/// Writes `content` to `path`, or to stdout when there is no path.
/// Returns whether a path was used.
fn emit(path: Option<&PathBuf>, content: &str) -> Result<bool> {
    match path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(content.as_bytes())?;
            w.flush()?;
            Ok(true)
        }
        None => {
            print!("{content}");
            Ok(false)
        }
    }
}

fn build_source(
    algorithm: Algorithm,
    l: Option<u64>,
    n: Option<u32>,
    avail: Option<Vec<u32>>,
) -> Result<(Box<dyn SequenceSource>, AvailableChannelSet)> {
    match algorithm {
        Algorithm::IdealCh => {
            let l = require_l(l, n)?;
            let avail = availability(ideal_universe(l)?, avail)?;
            Ok((
                Box::new(simulator::IdealChSource::new(l, avail.clone())?),
                avail,
            ))
        }
        Algorithm::GeneralMach => {
            let n = require_n(l, n, "general-mach")?;
            let avail = availability(n, avail)?;
            Ok((
                Box::new(simulator::GeneralMachSource::new(n as u64, avail.clone())?),
                avail,
            ))
        }
        Algorithm::OrthoCh => {
            let n = require_n(l, n, "ortho-ch")?;
            let avail = availability(n, avail)?;
            Ok((
                Box::new(simulator::OrthoChSource::new(avail.clone())),
                avail,
            ))
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<bool> {
    if args.format == Format::Csv {
        return Err(usage("generate writes sequences, not CSV; use text or json"));
    }
    let built: Option<MachConstruction> = match args.algorithm {
        Algorithm::IdealCh => Some(machseq::build_mach_matrix(require_l(args.l, args.n)?)?),
        Algorithm::GeneralMach => Some(machseq::build_general_mach_matrix(
            require_n(args.l, args.n, "general-mach")? as u64,
        )?),
        Algorithm::OrthoCh => None,
    };
    let (source, avail) = build_source(args.algorithm, args.l, args.n, args.avail)?;
    let seq = source.generate(args.seed)?;

    if let Some(path) = &args.matrix_out {
        let matrix = match (&built, args.algorithm) {
            (Some(built), _) => built.matrix.clone(),
            (None, _) => {
                let r = orthoch::selected_id(&avail, args.seed).ok_or_else(|| {
                    usage("the lone-channel schedule is constant and has no matrix")
                })?;
                let p = numtheory::smallest_prime_geq(avail.universe() as u64);
                orthoch::build_extended_matrix(&orthoch::OrthoMember::new(p, r as u64)?)?
            }
        };
        emit(Some(path), &seqio::matrix_to_string(&matrix))?;
    }
    if let Some(path) = &args.ideal_out {
        let built = built
            .as_ref()
            .ok_or_else(|| usage("--ideal-out applies to ideal-ch and general-mach"))?;
        emit(Some(path), &built.ideal.render())?;
    }

    let content = match args.format {
        Format::Text => seqio::sequence_to_string(&seq),
        Format::Json => {
            let json = serde_json::json!({
                "period": seq.period(),
                "universe": seq.channel_universe(),
                "provenance": seq.provenance(),
                "values": seq.values(),
            });
            format!("{json}\n")
        }
        Format::Csv => unreachable!("rejected above"),
    };
    if emit(args.out.as_ref(), &content)? {
        println!(
            "wrote {}: period {} universe {} ({})",
            args.out.as_deref().expect("emit returned true").display(),
            seq.period(),
            seq.channel_universe(),
            seq.provenance()
        );
    }
    Ok(true)
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report_checks(checks: &[Check], format: Format) -> Result<bool> {
    let pass = checks.iter().all(|c| c.pass);
    match format {
        Format::Json => {
            let json = serde_json::json!({
                "checks": checks.iter().map(|c| serde_json::json!({
                    "name": c.name,
                    "pass": c.pass,
                    "detail": c.detail,
                })).collect::<Vec<_>>(),
                "pass": pass,
            });
            println!("{json}");
        }
        _ => {
            for c in checks {
                if c.pass {
                    println!("ok: {} ({})", c.name, c.detail);
                } else {
                    println!("FAIL: {}: {}", c.name, c.detail);
                }
            }
            println!("verdict: {}", if pass { "pass" } else { "fail" });
        }
    }
    Ok(pass)
}

fn verify_construction(built: &MachConstruction, n: u32, label: &str) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let ideal = chseq::idealmat::verify_ideal(&built.ideal);
    checks.push(match ideal.violation() {
        None => Check {
            name: "ideal placement law",
            pass: true,
            detail: format!("all {0}x{0} shifts", built.ideal.p()),
        },
        Some(v) => Check {
            name: "ideal placement law",
            pass: false,
            detail: format!(
                "shift ({}, {}) has {} coincidences, expected {}",
                v.delta, v.tau, v.found, v.expected
            ),
        },
    });
    let grid = machseq::verify_2d_mrd(&built.matrix, n, false)?;
    checks.push(match grid.first_missing() {
        None => Check {
            name: "2D diversity",
            pass: true,
            detail: format!("every nontrivial shift covers all {n} channels"),
        },
        Some((delta, tau, k)) => Check {
            name: "2D diversity",
            pass: false,
            detail: format!("shift ({delta}, {tau}) never lands on channel {k}"),
        },
    });
    let seq = machseq::mach_matrix_to_sequence(&built.matrix)?;
    let p = built.matrix.rows() as u64;
    let sweep = machseq::verify_1d_mrd(&seq, n);
    checks.push(match sweep.first_missing() {
        None => Check {
            name: "drift sweep",
            pass: true,
            detail: format!("{label}: all {} drifts cover all {n} channels", seq.period()),
        },
        Some((d, k)) => Check {
            name: "drift sweep",
            pass: false,
            detail: format!("drift {d} never meets channel {k}"),
        },
    });
    let boxed = machseq::verify_1d_mrd_aligned_box(&seq, n, p)?;
    checks.push(match boxed.first_missing() {
        None => Check {
            name: "aligned-box drift sweep",
            pass: true,
            detail: "the aligned window alone certifies every drift".to_string(),
        },
        Some((d, k)) => Check {
            name: "aligned-box drift sweep",
            pass: false,
            detail: format!("drift {d}: the aligned window misses channel {k}"),
        },
    });
    Ok(checks)
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    if let Some(path) = &args.file {
        if args.algorithm.is_some() || args.l.is_some() {
            return Err(usage("verify takes a construction or --file, not both"));
        }
        let seq = seqio::read_sequence(BufReader::new(File::open(path)?))?;
        let n = args.n.unwrap_or_else(|| seq.channel_universe());
        let report = machseq::verify_1d_mrd(&seq, n);
        let check = match report.first_missing() {
            None => Check {
                name: "drift sweep",
                pass: true,
                detail: format!(
                    "period {}, every drift covers all {n} channels",
                    seq.period()
                ),
            },
            Some((d, k)) => Check {
                name: "drift sweep",
                pass: false,
                detail: format!("drift {d} never meets channel {k}"),
            },
        };
        return report_checks(&[check], args.format);
    }

    match args
        .algorithm
        .ok_or_else(|| usage("verify needs --algorithm or --file"))?
    {
        Algorithm::IdealCh => {
            let l = require_l(args.l, args.n)?;
            let built = machseq::build_mach_matrix(l)?;
            let checks = verify_construction(&built, ideal_universe(l)?, "ideal-ch")?;
            report_checks(&checks, args.format)
        }
        Algorithm::GeneralMach => {
            let n = require_n(args.l, args.n, "general-mach")?;
            let built = machseq::build_general_mach_matrix(n as u64)?;
            let checks = verify_construction(&built, n, "general-mach")?;
            report_checks(&checks, args.format)
        }
        Algorithm::OrthoCh => {
            let n = require_n(args.l, args.n, "ortho-ch")?;
            let p = numtheory::smallest_prime_geq(n.max(2) as u64);
            let family = orthoch::build_ortho_family(p)?;
            let mut checks = Vec::new();
            let mut cover_fail = None;
            for member in family.members() {
                if let Some((col, k)) = orthoch::verify_cover(member).first_missing() {
                    cover_fail = Some((member.r(), col, k));
                    break;
                }
            }
            checks.push(match cover_fail {
                None => Check {
                    name: "column cover",
                    pass: true,
                    detail: format!("all {} members, every column, every channel", p - 1),
                },
                Some((r, col, k)) => Check {
                    name: "column cover",
                    pass: false,
                    detail: format!("member {r}: column {col} never carries channel {k}"),
                },
            });
            let mut pair_fail = None;
            'pairs: for a in family.members() {
                for b in family.members() {
                    if a.r() == b.r() {
                        continue;
                    }
                    let report = orthoch::verify_ortho_pair(a, b)?;
                    if !report.passed() {
                        pair_fail = Some((a.r(), b.r(), report));
                        break 'pairs;
                    }
                }
            }
            checks.push(match pair_fail {
                None => Check {
                    name: "pairwise orthogonality",
                    pass: true,
                    detail: format!(
                        "all {} ordered pairs, every shift, closed-form witnesses agree",
                        (p - 1) * (p - 2)
                    ),
                },
                Some((r1, r2, report)) => Check {
                    name: "pairwise orthogonality",
                    pass: false,
                    detail: format!("pair ({r1}, {r2}): {report:?}"),
                },
            });
            report_checks(&checks, args.format)
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<bool> {
    let (src1, avail1) = build_source(args.algorithm, args.l, args.n, args.avail1)?;
    let (src2, avail2) = build_source(args.algorithm, args.l, args.n, args.avail2)?;
    let s1 = src1.generate(args.seed.wrapping_mul(2))?;
    let s2 = src2.generate(args.seed.wrapping_mul(2).wrapping_add(1))?;
    let horizon = args
        .horizon
        .unwrap_or_else(|| 2 * s1.period().max(s2.period()));
    let report = simulator::run(&s1, &s2, args.drift, horizon, &avail1, &avail2)?;

    match args.format {
        Format::Json => {
            let json = serde_json::json!({
                "t": report.ttr(),
                "t_sharp": report.t_sharp(),
                "common": report.common_channels(),
                "per_channel": report.per_channel(),
                "horizon": report.horizon(),
            });
            println!("{json}");
        }
        _ => {
            let mut text = String::new();
            let fmt_opt = |v: Option<u64>| v.map_or(String::from("-1"), |t| t.to_string());
            let _ = writeln!(text, "t={}", fmt_opt(report.ttr()));
            let _ = writeln!(text, "t_sharp={}", fmt_opt(report.t_sharp()));
            let common: Vec<String> = report
                .common_channels()
                .iter()
                .map(u32::to_string)
                .collect();
            let _ = writeln!(text, "common={}", common.join(","));
            for &k in report.common_channels() {
                let _ = writeln!(text, "met[{k}]={}", fmt_opt(report.channel_ttr(k)));
            }
            let _ = writeln!(text, "horizon={}", report.horizon());
            print!("{text}");
        }
    }
    Ok(report.ttr().is_some())
}

fn cmd_sweep(args: SweepArgs) -> Result<bool> {
    if args.seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    let (src1, avail1) = build_source(args.algorithm, args.l, args.n, args.avail1)?;
    let (src2, avail2) = build_source(args.algorithm, args.l, args.n, args.avail2)?;
    let seeds: Vec<u64> = (0..args.seeds).collect();
    let report = simulator::mttr_sweep(src1.as_ref(), src2.as_ref(), &avail1, &avail2, &seeds)?;

    let (metric, bound) = match args.algorithm {
        Algorithm::OrthoCh => (
            SweepMetric::TimeToRendezvous,
            Some(orthoch::mttr_bound(avail1.universe())?),
        ),
        // The square constructions promise full diversity within one
        // period when both users hear everything; the bound stays on the
        // first rendezvous under restricted availability.
        Algorithm::IdealCh | Algorithm::GeneralMach => {
            if avail1.is_full() && avail2.is_full() {
                (SweepMetric::TimeToFullDiversity, Some(report.periods().0))
            } else {
                (SweepMetric::TimeToRendezvous, None)
            }
        }
    };
    let summary = report.summarize(metric, bound);

    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).expect("CSV is ASCII");
    let csv_to_file = emit(args.out.as_ref(), &csv)?;

    let ettr = match args.ettr_trials {
        Some(trials) => Some(simulator::ettr_estimate(
            src1.as_ref(),
            src2.as_ref(),
            &avail1,
            &avail2,
            trials,
            args.seed,
        )?),
        None => None,
    };

    if args.format != Format::Csv {
        let summary_text = match args.format {
            Format::Json => {
                let mut json = serde_json::to_value(&summary).expect("summary serializes");
                if let Some(e) = &ettr {
                    json["ettr"] = serde_json::to_value(e).expect("estimate serializes");
                }
                format!("{json}\n")
            }
            _ => {
                let mut text = String::new();
                let fmt_opt = |v: Option<u64>| v.map_or(String::from("-1"), |t| t.to_string());
                let metric_name = match summary.metric {
                    SweepMetric::TimeToRendezvous => "time-to-rendezvous",
                    SweepMetric::TimeToFullDiversity => "time-to-full-diversity",
                };
                let _ = writeln!(text, "metric={metric_name}");
                let _ = writeln!(text, "period1={}", summary.period1);
                let _ = writeln!(text, "period2={}", summary.period2);
                let _ = writeln!(text, "seeds={}", summary.seeds);
                let _ = writeln!(text, "runs={}", summary.runs);
                let _ = writeln!(text, "misses={}", summary.misses);
                let _ = writeln!(text, "observed_max={}", fmt_opt(summary.observed_max));
                let _ = writeln!(text, "witness_drift={}", fmt_opt(summary.witness_drift));
                let _ = writeln!(text, "witness_seed={}", fmt_opt(summary.witness_seed));
                let _ = writeln!(text, "bound={}", fmt_opt(summary.bound));
                let _ = writeln!(text, "pass={}", summary.pass);
                if let Some(e) = &ettr {
                    let _ = writeln!(text, "ettr_trials={}", e.trials);
                    let _ = writeln!(text, "ettr_completed={}", e.completed);
                    let _ = writeln!(text, "ettr_mean={:.6}", e.mean);
                    let _ = writeln!(text, "ettr_std_err={:.6}", e.std_err);
                }
                text
            }
        };
        if csv_to_file {
            print!("{summary_text}");
        } else {
            eprint!("{summary_text}");
        }
    }
    Ok(summary.pass)
}

fn cmd_ratio(args: RatioArgs) -> Result<bool> {
    let r = machseq::approximation_ratio(args.n)?;
    match args.format {
        Format::Json => {
            let json = serde_json::json!({
                "n": r.n,
                "p": r.p,
                "reserved": r.diffset_size,
                "usable": r.usable,
                "period": r.period(),
                "denominator": r.denominator(),
                "ratio": r.value(),
            });
            println!("{json}");
        }
        _ => {
            println!(
                "N={} p={} reserved={} usable={} ratio={}/{}={:.6}",
                r.n,
                r.p,
                r.diffset_size,
                r.usable,
                r.period(),
                r.denominator(),
                r.value()
            );
        }
    }
    Ok(true)
}
