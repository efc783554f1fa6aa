//! Plain-text snapshot of a matrix.
//!
//! ```text
//! 2 3
//! 0 0 0
//! 1 0 0
//! 0 0 1
//! -,4,7
//! ```
//!
//! The first line is `depth machines`, followed by `depth + 1` rows of
//! space-separated bits (head first) and a line of comma-separated job ids,
//! `-` marking an empty slot. Every line ends with `\n`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::ScheduleMatrix;
use crate::{Error, JobId, Result};

impl ScheduleMatrix {
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.depth, self.machines).unwrap();
        for r in 0..self.rows() {
            let row: Vec<&str> = self
                .row(r)
                .iter()
                .map(|&b| if b { "1" } else { "0" })
                .collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        let labels: Vec<String> = self
            .labels
            .iter()
            .map(|l| l.map_or_else(|| "-".to_string(), |id| id.to_string()))
            .collect();
        writeln!(out, "{}", labels.join(",")).unwrap();
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (n, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "empty snapshot".into(),
        })?;
        let dims: Vec<usize> = header
            .split(' ')
            .map(|t| {
                t.parse()
                    .map_err(|_| parse_err(n, format!("bad dimension `{t}`")))
            })
            .collect::<Result<_>>()?;
        let [depth, machines] = dims[..] else {
            return Err(parse_err(n, "expected `depth machines`"));
        };
        let mut m =
            ScheduleMatrix::new(depth, machines).map_err(|e| parse_err(n, e.to_string()))?;

        for r in 0..=depth {
            let (n, line) = lines
                .next()
                .ok_or_else(|| parse_err(r + 2, "missing matrix row"))?;
            let bits: Vec<&str> = line.split(' ').collect();
            if bits.len() != machines {
                return Err(parse_err(
                    n,
                    format!("expected {machines} bits, found {}", bits.len()),
                ));
            }
            for (j, b) in bits.into_iter().enumerate() {
                match b {
                    "0" => {}
                    "1" => m.set(r, j, true),
                    other => return Err(parse_err(n, format!("bad bit `{other}`"))),
                }
            }
        }

        let (n, line) = lines
            .next()
            .ok_or_else(|| parse_err(depth + 3, "missing label line"))?;
        let labels: Vec<&str> = line.split(',').collect();
        if labels.len() != depth + 1 {
            return Err(parse_err(
                n,
                format!("expected {} labels, found {}", depth + 1, labels.len()),
            ));
        }
        for (r, l) in labels.into_iter().enumerate() {
            let label = match l {
                "-" => None,
                id => Some(JobId(
                    id.parse()
                        .map_err(|_| parse_err(n, format!("bad job id `{id}`")))?,
                )),
            };
            m.set_label(r, label);
        }
        if let Some((n, _)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(parse_err(n, "trailing content"));
        }
        Ok(m)
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

impl fmt::Display for ScheduleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_snapshot())
    }
}

impl FromStr for ScheduleMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScheduleMatrix::from_snapshot(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "2 3\n0 0 0\n1 0 0\n0 0 1\n-,4,7\n";

    #[test]
    fn sample_parses_and_prints_back() {
        let m: ScheduleMatrix = SAMPLE.parse().unwrap();
        assert_eq!(m.depth(), 2);
        assert_eq!(m.machines(), 3);
        assert_eq!(m.label(2), Some(JobId(7)));
        assert!(m.get(2, 2));
        assert_eq!(m.to_snapshot(), SAMPLE);
    }

    #[test]
    fn malformed_snapshots_report_the_line() {
        let bad_bit = "1 2\n0 0\n0 2\n-,-\n";
        assert!(matches!(
            bad_bit.parse::<ScheduleMatrix>(),
            Err(Error::Parse { line: 3, .. })
        ));
        let short = "1 2\n0 0\n0 0\n";
        assert!(matches!(
            short.parse::<ScheduleMatrix>(),
            Err(Error::Parse { .. })
        ));
        let labels = "1 1\n0\n1\n-\n";
        assert!(matches!(
            labels.parse::<ScheduleMatrix>(),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!("".parse::<ScheduleMatrix>().is_err());
    }
}
