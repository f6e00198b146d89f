//! Plain text interchange for sequences and matrices.
//!
//! A sequence file opens with the header line `<period> <universe>
//! <provenance>` and continues with the slot values, whitespace
//! separated, wrapped for readability. Reading is strict: the value
//! count must match the period and every value must fit the universe,
//! with errors naming the offending line. A matrix renders as one row
//! per line, values space separated.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::machseq::{ChMatrix, ChSequence};

const VALUES_PER_LINE: usize = 20;

/// Writes the header line and the slot values.
pub fn write_sequence<W: Write>(mut w: W, seq: &ChSequence) -> std::io::Result<()> {
    writeln!(
        w,
        "{} {} {}",
        seq.period(),
        seq.channel_universe(),
        seq.provenance()
    )?;
    for chunk in seq.values().chunks(VALUES_PER_LINE) {
        let line: Vec<String> = chunk.iter().map(u32::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn sequence_to_string(seq: &ChSequence) -> String {
    let mut out = Vec::new();
    write_sequence(&mut out, seq).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("the format is ASCII")
}

/// Parses what [`write_sequence`] produces. Extra whitespace and blank
/// lines after the header are tolerated; everything else is an error
/// with a line number.
pub fn read_sequence<R: BufRead>(r: R) -> Result<ChSequence> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected a header line"))?;
    let header = header.map_err(Error::Io)?;
    let mut fields = header.split_whitespace();
    let period: u64 = fields
        .next()
        .ok_or_else(|| parse_err(1, "missing period"))?
        .parse()
        .map_err(|_| parse_err(1, "period is not a number"))?;
    let universe: u32 = fields
        .next()
        .ok_or_else(|| parse_err(1, "missing channel universe"))?
        .parse()
        .map_err(|_| parse_err(1, "channel universe is not a number"))?;
    if period == 0 {
        return Err(parse_err(1, "period must be at least 1"));
    }
    if universe == 0 {
        return Err(parse_err(1, "channel universe must be at least 1"));
    }
    let provenance = fields.collect::<Vec<&str>>().join(" ");

    let mut values: Vec<u32> = Vec::with_capacity(period as usize);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(Error::Io)?;
        for token in line.split_whitespace() {
            let v: u32 = token
                .parse()
                .map_err(|_| parse_err(lineno, &format!("'{token}' is not a channel index")))?;
            if v >= universe {
                return Err(parse_err(
                    lineno,
                    &format!("channel {v} is outside the universe of {universe}"),
                ));
            }
            if values.len() as u64 == period {
                return Err(parse_err(
                    lineno,
                    &format!("more than {period} values for a period of {period}"),
                ));
            }
            values.push(v);
        }
    }
    if (values.len() as u64) < period {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected {period} values, found {}", values.len()),
        });
    }
    ChSequence::new(values, universe, provenance)
}

/// One row per line, values space separated.
pub fn write_matrix<W: Write>(mut w: W, matrix: &ChMatrix) -> std::io::Result<()> {
    for i in 0..matrix.rows() {
        let line: Vec<String> = matrix.row(i).iter().map(u32::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn matrix_to_string(matrix: &ChMatrix) -> String {
    let mut out = Vec::new();
    write_matrix(&mut out, matrix).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("the format is ASCII")
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}
