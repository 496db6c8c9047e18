//! The `DSTT v1` truth-table file format.
//!
//! Line 1: `n=<int> d=<int>`. Line 2: a `{0,1}`-string of length `n^d` in
//! row-major order with the last coordinate fastest, newline-terminated,
//! ASCII.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::functions::{BooleanFunction, TruthTable};
use crate::grid::GridDomain;

pub fn write_dstt(f: &BooleanFunction, w: &mut impl Write) -> Result<()> {
    let n = f
        .domain()
        .uniform_size()
        .ok_or_else(|| Error::Unsupported("DSTT v1 stores uniform grids only".into()))?;
    let d = f.domain().dim();
    let table = f.truth_table(1 << 28)?;
    writeln!(w, "n={n} d={d}")?;
    let line: String = table.iter_bits().map(|b| if b { '1' } else { '0' }).collect();
    writeln!(w, "{line}")?;
    Ok(())
}

pub fn to_dstt_string(f: &BooleanFunction) -> Result<String> {
    let mut buf = Vec::new();
    write_dstt(f, &mut buf)?;
    Ok(String::from_utf8(buf).expect("dstt output is ascii"))
}

pub fn read_dstt(r: &mut impl BufRead) -> Result<BooleanFunction> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let header = header.trim();
    let mut n = None;
    let mut d = None;
    for part in header.split_whitespace() {
        if let Some(v) = part.strip_prefix("n=") {
            n = Some(v.parse::<u32>().map_err(|_| bad_header(header))?);
        } else if let Some(v) = part.strip_prefix("d=") {
            d = Some(v.parse::<usize>().map_err(|_| bad_header(header))?);
        } else {
            return Err(bad_header(header));
        }
    }
    let (n, d) = match (n, d) {
        (Some(n), Some(d)) => (n, d),
        _ => return Err(bad_header(header)),
    };
    let domain = GridDomain::uniform(n, d).map_err(|e| Error::Parse(e.to_string()))?;
    let expected = domain
        .point_count()
        .ok_or_else(|| Error::Parse(format!("n={n} d={d} is too large")))?;
    let mut line = String::new();
    r.read_line(&mut line)?;
    let line = line.trim_end_matches(['\n', '\r']);
    if line.len() as u64 != expected {
        return Err(Error::Parse(format!(
            "table has {} characters, expected {expected}",
            line.len()
        )));
    }
    let mut table = TruthTable::zeros(expected);
    for (i, c) in line.bytes().enumerate() {
        match c {
            b'0' => {}
            b'1' => table.set(i as u64, true),
            _ => return Err(Error::Parse(format!("non-bit character at offset {i}"))),
        }
    }
    BooleanFunction::from_table(domain, table).map_err(|e| Error::Parse(e.to_string()))
}

pub fn from_dstt_string(s: &str) -> Result<BooleanFunction> {
    read_dstt(&mut s.as_bytes())
}

fn bad_header(h: &str) -> Error {
    Error::Parse(format!("bad DSTT header {h:?}, expected `n=<int> d=<int>`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::Family;
    use proptest::prelude::*;

    #[test]
    fn known_encoding() {
        let dom = GridDomain::hypercube(2).unwrap();
        let f = BooleanFunction::named(Family::And, dom).unwrap();
        assert_eq!(to_dstt_string(&f).unwrap(), "n=2 d=2\n0001\n");
    }

    #[test]
    fn rejects_malformed() {
        assert!(from_dstt_string("n=2\n00\n").is_err());
        assert!(from_dstt_string("n=2 d=2\n001\n").is_err());
        assert!(from_dstt_string("n=2 d=2\n00x1\n").is_err());
        assert!(from_dstt_string("d=2 n  whatever\n0001\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(bits in proptest::collection::vec(any::<bool>(), 9)) {
            let dom = GridDomain::uniform(3, 2).unwrap();
            let f = BooleanFunction::from_bits(dom, &bits).unwrap();
            let s = to_dstt_string(&f).unwrap();
            let g = from_dstt_string(&s).unwrap();
            prop_assert_eq!(f.truth_table(16).unwrap(), g.truth_table(16).unwrap());
        }
    }
}
