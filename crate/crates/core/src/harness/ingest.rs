//! Cross-section tables.
//!
//! ```text
//! id,sigma,err
//! 1,1.0,0.01
//! 12,3.0,
//! ```
//!
//! `id` is one of 1, 2, 3, 12, 23, 31, 123; `sigma` and `err` are in barn
//! and `err` may be empty. Values are written with 17 significant digits so
//! a write/read cycle is bit-exact.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::interference::{Channel, CrossSectionSet};

const HEADER: [&str; 3] = ["id", "sigma", "err"];

fn parse_number(field: &str, what: &str, line: u64) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("{what} {field:?} is not a number"),
    })
}

/// Reads a cross-section table. Errors carry the 1-based line number.
pub fn read_cross_sections<R: Read>(reader: R) -> Result<CrossSectionSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);

    let header = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 2 || names.len() > 3 || names[..] != HEADER[..names.len()] {
        return Err(Error::Parse {
            line: 1,
            message: format!("header must be `id,sigma,err`, got `{}`", names.join(",")),
        });
    }

    let mut values: [Option<(f64, Option<f64>)>; 7] = [None; 7];
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() < 2 || record.len() > names.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        let id = Channel::from_id(&record[0]).ok_or_else(|| Error::Parse {
            line,
            message: format!(
                "unknown channel id {:?} (expected 1, 2, 3, 12, 23, 31 or 123)",
                &record[0]
            ),
        })?;
        let sigma = parse_number(&record[1], "sigma", line)?;
        let err = match record.get(2) {
            Some(f) if !f.is_empty() => Some(parse_number(f, "err", line)?),
            _ => None,
        };
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Value(format!(
                "line {line}: sigma for channel {id} is {sigma}"
            )));
        }
        if let Some(e) = err {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::Value(format!(
                    "line {line}: err for channel {id} is {e}"
                )));
            }
        }
        let slot = &mut values[index(id)];
        if slot.is_some() {
            return Err(Error::Schema(format!(
                "channel {id} appears more than once (line {line})"
            )));
        }
        *slot = Some((sigma, err));
    }

    let missing: Vec<String> = Channel::REQUIRED
        .iter()
        .filter(|c| values[index(**c)].is_none())
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "missing channel(s) {}",
            missing.join(", ")
        )));
    }

    let get = |c: Channel| values[index(c)].expect("checked").0;
    let mut set = CrossSectionSet::new(
        [get(Channel::S1), get(Channel::S2), get(Channel::S3)],
        [get(Channel::S12), get(Channel::S23), get(Channel::S31)],
    )?;
    for c in Channel::ALL {
        if let Some((sigma, err)) = values[index(c)] {
            set.set(c, sigma);
            set.set_error(c, err);
        }
    }
    Ok(set)
}

/// Writes every present channel in canonical order.
pub fn write_cross_sections<W: Write>(set: &CrossSectionSet, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(HEADER).map_err(io)?;
    for c in Channel::ALL {
        let Some(sigma) = set.get(c) else { continue };
        let err = set.error(c).map(format_exact).unwrap_or_default();
        w.write_record([c.id().to_string(), format_exact(sigma), err])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_exact(v: f64) -> String {
    format!("{v:.16e}")
}

fn index(c: Channel) -> usize {
    Channel::ALL
        .iter()
        .position(|x| *x == c)
        .expect("channel in ALL")
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}
