//! Small CSV helpers shared by the serializers.

use crate::error::{Error, Result};

/// Parses a two-column numeric CSV with the given header.
pub fn parse_two_column_csv(csv: &str, h0: &str, h1: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| Error::Io("empty csv".into()))?;
    if header.trim() != format!("{h0},{h1}") {
        return Err(Error::Io(format!("unexpected csv header {header:?}")));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let mut next = || -> Result<f64> {
            it.next()
                .ok_or_else(|| Error::Io(format!("line {}: missing column", i + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Io(format!("line {}: {e}", i + 2)))
        };
        a.push(next()?);
        b.push(next()?);
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_checks_header() {
        let (a, b) = parse_two_column_csv("x,y\n1.5,2\n3,4e-1\n", "x", "y").unwrap();
        assert_eq!(a, vec![1.5, 3.0]);
        assert_eq!(b, vec![2.0, 0.4]);
        assert!(parse_two_column_csv("a,b\n", "x", "y").is_err());
    }
}
