//! Start-stop histogram and its CSV serialization.

use std::io::{self, BufRead, Write};

use crate::error::ConfigError;

/// Binned start-stop counts. At most one stop is recorded per start, so the
/// count total never exceeds the shot total.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width_s: f64,
    /// Absolute time of the left edge of bin 0 (start-delay aligned).
    pub origin_s: f64,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
    pub scenario_hash: String,
    /// Group index for rendering the distance axis.
    pub display_group_index: f64,
}

impl Histogram {
    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_center_time(&self, i: usize) -> f64 {
        self.origin_s + (i as f64 + 0.5) * self.bin_width_s
    }

    pub fn range_s(&self) -> f64 {
        self.counts.len() as f64 * self.bin_width_s
    }

    /// Writes the normative CSV form: metadata rows, then sparse
    /// `bin_index,count` rows for the non-zero bins.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# psiotdr histogram v1")?;
        writeln!(w, "bin_width_s,{:e}", self.bin_width_s)?;
        writeln!(w, "origin_s,{:e}", self.origin_s)?;
        writeln!(w, "num_bins,{}", self.counts.len())?;
        writeln!(w, "shots,{}", self.shots)?;
        writeln!(w, "seed,{}", self.seed)?;
        writeln!(w, "scenario_hash,{}", self.scenario_hash)?;
        writeln!(w, "display_group_index,{:e}", self.display_group_index)?;
        writeln!(w, "bin_index,count")?;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                writeln!(w, "{i},{c}")?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv(r: impl BufRead) -> Result<Histogram, ConfigError> {
        let mut bin_width_s = None;
        let mut origin_s = None;
        let mut num_bins = None;
        let mut shots = None;
        let mut seed = None;
        let mut scenario_hash = String::new();
        let mut display_group_index = 1.468;
        let mut counts: Option<Vec<u64>> = None;
        let mut in_data = false;

        let parse_err = |line: usize, reason: String| ConfigError::Parse {
            what: format!("histogram CSV line {line}"),
            reason,
        };

        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| parse_err(lineno + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(',')
                .ok_or_else(|| parse_err(lineno + 1, "expected key,value".into()))?;
            if in_data {
                let i: usize = key
                    .parse()
                    .map_err(|e| parse_err(lineno + 1, format!("bin index: {e}")))?;
                let c: u64 = value
                    .parse()
                    .map_err(|e| parse_err(lineno + 1, format!("count: {e}")))?;
                let counts = counts.as_mut().expect("allocated at header end");
                if i >= counts.len() {
                    return Err(parse_err(
                        lineno + 1,
                        format!("bin index {i} outside num_bins {}", counts.len()),
                    ));
                }
                counts[i] = c;
                continue;
            }
            match key {
                "bin_width_s" => bin_width_s = Some(parse_f64(value, lineno)?),
                "origin_s" => origin_s = Some(parse_f64(value, lineno)?),
                "num_bins" => {
                    num_bins = Some(value.parse::<usize>().map_err(|e| {
                        parse_err(lineno + 1, format!("num_bins: {e}"))
                    })?)
                }
                "shots" => {
                    shots = Some(value.parse::<u64>().map_err(|e| {
                        parse_err(lineno + 1, format!("shots: {e}"))
                    })?)
                }
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|e| {
                        parse_err(lineno + 1, format!("seed: {e}"))
                    })?)
                }
                "scenario_hash" => scenario_hash = value.to_string(),
                "display_group_index" => display_group_index = parse_f64(value, lineno)?,
                "bin_index" => {
                    let n = num_bins.ok_or_else(|| {
                        parse_err(lineno + 1, "num_bins header missing before data".into())
                    })?;
                    counts = Some(vec![0u64; n]);
                    in_data = true;
                }
                other => {
                    return Err(parse_err(lineno + 1, format!("unknown header key {other:?}")))
                }
            }
        }
        let counts = counts.ok_or_else(|| ConfigError::Parse {
            what: "histogram CSV".into(),
            reason: "missing bin_index,count section".into(),
        })?;
        Ok(Histogram {
            bin_width_s: bin_width_s.ok_or_else(|| missing("bin_width_s"))?,
            origin_s: origin_s.ok_or_else(|| missing("origin_s"))?,
            counts,
            shots: shots.ok_or_else(|| missing("shots"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            scenario_hash,
            display_group_index,
        })
    }
}

fn parse_f64(value: &str, lineno: usize) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|e| ConfigError::Parse {
        what: format!("histogram CSV line {}", lineno + 1),
        reason: e.to_string(),
    })
}

fn missing(key: &str) -> ConfigError {
    ConfigError::Parse {
        what: "histogram CSV".into(),
        reason: format!("missing header {key}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let h = Histogram {
            bin_width_s: 9.793442968688e-12,
            origin_s: 195.868e-6,
            counts: vec![0, 3, 0, 0, 17, 1],
            shots: 12345,
            seed: 42,
            scenario_hash: "deadbeef01234567".into(),
            display_group_index: 1.468,
        };
        let text = h.to_csv_string();
        let back = Histogram::read_csv(text.as_bytes()).unwrap();
        assert_eq!(h, back);
        assert_eq!(back.total_counts(), 21);
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(Histogram::read_csv("not,a,histogram\n".as_bytes()).is_err());
        let no_data = "bin_width_s,1e-9\norigin_s,0\nnum_bins,4\nshots,10\nseed,1\n";
        assert!(Histogram::read_csv(no_data.as_bytes()).is_err());
    }
}
