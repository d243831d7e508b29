//! Line-oriented codec test vectors for cross-implementation regression.
//!
//! Record grammar, whitespace separated, one codeword per line:
//!
//! ```text
//! P L K alpha msg_hex re0 im0 re1 im1 ... re(P-1) im(P-1)
//! ```
//!
//! `msg_hex` is the message's bits MSB-first, zero-padded to whole nibbles;
//! `K` recovers the exact bit length. Symbol values are decimal and
//! round-trip exactly through the shortest-representation float printer.

use std::io::Write;

use zcqo_core::codec::{encode, encode_with_indication, Codeword};
use zcqo_core::dictionary::{build_spec, DictionarySpec, Message};
use zcqo_core::Complex64;

use crate::{CliError, CliResult};

/// One test-vector record.
#[derive(Debug, Clone)]
pub struct VectorRecord {
    pub p: u64,
    pub l: usize,
    pub info_bits: usize,
    pub alpha: f64,
    pub message: Message,
    pub symbols: Vec<Complex64>,
}

impl VectorRecord {
    fn build(spec: &DictionarySpec, message: Message, alpha: f64) -> CliResult<Self> {
        let codeword: Codeword = if alpha == 1.0 {
            encode(spec, &message)?
        } else {
            encode_with_indication(spec, &message, alpha)?
        };
        Ok(VectorRecord {
            p: spec.p(),
            l: spec.l(),
            info_bits: spec.info_bits(),
            alpha,
            message,
            symbols: codeword.symbols,
        })
    }

    pub fn to_line(&self) -> String {
        let mut line = format!(
            "{} {} {} {} {}",
            self.p,
            self.l,
            self.info_bits,
            self.alpha,
            self.message.to_hex()
        );
        for c in &self.symbols {
            line.push_str(&format!(" {} {}", c.re, c.im));
        }
        line
    }

    pub fn from_line(line: &str) -> CliResult<Self> {
        let mut fields = line.split_whitespace();
        let mut next = |name: &str| {
            fields
                .next()
                .ok_or_else(|| CliError::Io(format!("truncated record: missing {name}")))
        };
        let p: u64 = parse(next("P")?)?;
        let l: usize = parse(next("L")?)?;
        let info_bits: usize = parse(next("K")?)?;
        let alpha: f64 = parse(next("alpha")?)?;
        let message = Message::from_hex(next("message")?, info_bits)
            .map_err(|e| CliError::Io(e.to_string()))?;
        let rest: Vec<f64> = fields
            .map(|f| parse::<f64>(f))
            .collect::<CliResult<_>>()?;
        if rest.len() != 2 * p as usize {
            return Err(CliError::Io(format!(
                "expected {} symbol values, found {}",
                2 * p,
                rest.len()
            )));
        }
        let symbols = rest
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Ok(VectorRecord {
            p,
            l,
            info_bits,
            alpha,
            message,
            symbols,
        })
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> CliResult<T> {
    s.parse()
        .map_err(|_| CliError::Io(format!("malformed field '{s}' in vector record")))
}

/// The fixed corpus emitted by `vectors --emit`: small dictionaries, plain
/// and indicated, corner and pseudo-random messages.
pub fn reference_records() -> CliResult<Vec<VectorRecord>> {
    let mut out = Vec::new();
    for (p, l, k) in [(11u64, 2usize, 6usize), (31, 2, 8), (31, 3, 12), (127, 2, 12)] {
        let spec = build_spec(p, l, k)?;
        let mut messages = vec![
            Message::new(vec![false; k]),
            Message::new(vec![true; k]),
            Message::new((0..k).map(|i| i % 2 == 0).collect()),
        ];
        // A few fixed arbitrary points spread over the index space.
        for salt in [3u64, 7, 12] {
            let v = (0..l)
                .map(|s| {
                    (salt.wrapping_mul(2654435761).wrapping_add(s as u64 * 40503))
                        % (1 << (k / l))
                })
                .collect::<Vec<_>>();
            messages.push(Message::from_section_values(&v, (k / l) as u32));
        }
        for m in messages {
            out.push(VectorRecord::build(&spec, m.clone(), 1.0)?);
            out.push(VectorRecord::build(&spec, m, 0.5)?);
        }
    }
    Ok(out)
}

/// Writes the reference corpus.
pub fn emit(writer: &mut impl Write) -> CliResult<()> {
    for record in reference_records()? {
        writeln!(writer, "{}", record.to_line())?;
    }
    Ok(())
}

/// Re-encodes every record in `text` and compares symbol-for-symbol.
/// Returns the number of records checked.
pub fn check(text: &str) -> CliResult<usize> {
    let mut checked = 0;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = VectorRecord::from_line(line)?;
        let spec = build_spec(record.p, record.l, record.info_bits)?;
        let fresh = if record.alpha == 1.0 {
            encode(&spec, &record.message)?
        } else {
            encode_with_indication(&spec, &record.message, record.alpha)?
        };
        for (i, (a, b)) in record.symbols.iter().zip(&fresh.symbols).enumerate() {
            if (a - b).norm() > 1e-9 {
                return Err(CliError::Io(format!(
                    "line {}: symbol {i} differs by {}",
                    lineno + 1,
                    (a - b).norm()
                )));
            }
        }
        checked += 1;
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_round_trips_through_text() {
        let mut buf = Vec::new();
        emit(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let n = check(&text).unwrap();
        assert_eq!(n, 4 * 6 * 2);
    }

    #[test]
    fn record_line_parses_back_exactly() {
        let records = reference_records().unwrap();
        for record in &records {
            let parsed = VectorRecord::from_line(&record.to_line()).unwrap();
            assert_eq!(parsed.message, record.message);
            assert_eq!(parsed.symbols, record.symbols);
            assert_eq!(parsed.alpha, record.alpha);
        }
    }

    #[test]
    fn corrupted_record_is_rejected() {
        let line = reference_records().unwrap()[0].to_line();
        let mut fields: Vec<String> = line.split_whitespace().map(String::from).collect();
        fields[6] = "0.25".to_string(); // perturb one symbol value
        assert!(check(&fields.join(" ")).is_err());
        assert!(VectorRecord::from_line("11 2 6").is_err());
    }
}
