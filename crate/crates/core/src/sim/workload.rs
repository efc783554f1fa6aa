//! Workload files: one job per line as `id arrival service_time`, unsigned
//! decimal integers separated by spaces. Blank lines and lines starting with
//! `#` are ignored.

use std::collections::HashSet;
use std::path::Path;

use crate::{Error, Job, Result};

pub fn parse_workload(text: &str) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [id, arrival, service] = fields[..] else {
            return Err(Error::Parse {
                line: n,
                reason: format!(
                    "expected `id arrival service_time`, found {} fields",
                    fields.len()
                ),
            });
        };
        let num = |field: &str, what: &str| -> Result<u64> {
            field.parse().map_err(|_| Error::Parse {
                line: n,
                reason: format!("{what} `{field}` is not an unsigned integer"),
            })
        };
        let job = Job::new(
            num(id, "id")?,
            num(arrival, "arrival")?,
            num(service, "service_time")? as u32,
        );
        if job.service_time == 0 {
            return Err(Error::Parse {
                line: n,
                reason: "service_time must be at least 1".into(),
            });
        }
        if !seen.insert(job.id) {
            return Err(Error::Parse {
                line: n,
                reason: format!("duplicate job id {}", job.id),
            });
        }
        jobs.push(job);
    }
    Ok(jobs)
}

pub fn format_workload(jobs: &[Job]) -> String {
    jobs.iter()
        .map(|j| format!("{} {} {}\n", j.id, j.arrival, j.service_time))
        .collect()
}

pub fn read_workload(path: &Path) -> std::io::Result<Result<Vec<Job>>> {
    Ok(parse_workload(&std::fs::read_to_string(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let text = "# id arrival service\n0 0 2\n\n1 3 1\n  # indented comment\n";
        let jobs = parse_workload(text).unwrap();
        assert_eq!(jobs, vec![Job::new(0, 0, 2), Job::new(1, 3, 1)]);
        assert_eq!(parse_workload(&format_workload(&jobs)).unwrap(), jobs);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            parse_workload("0 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_workload("0 0 1\n1 x 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_workload("0 0 0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_workload("0 0 1\n0 1 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_workload("-1 0 1\n").is_err());
    }
}
