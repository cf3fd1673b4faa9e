//! Length ranges: `start:stop:step`, `start:stop`, single values, or comma
//! separated lists of these. Stops are inclusive.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthRange(Vec<usize>);

impl LengthRange {
    pub fn values(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for LengthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

fn number(s: &str) -> Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|_| format!("not a non-negative integer: {s:?}"))?;
    if v == 0 {
        return Err("lengths must be positive".into());
    }
    Ok(v)
}

impl FromStr for LengthRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for item in s.split(',') {
            let fields: Vec<&str> = item.split(':').collect();
            match fields.as_slice() {
                [one] => out.push(number(one)?),
                [start, stop] | [start, stop, _] => {
                    let (start, stop) = (number(start)?, number(stop)?);
                    let step = match fields.get(2) {
                        Some(step) => number(step)?,
                        None => 1,
                    };
                    if stop < start {
                        return Err(format!("empty range {item:?}"));
                    }
                    out.extend((start..=stop).step_by(step));
                }
                _ => return Err(format!("malformed range {item:?}")),
            }
        }
        if out.windows(2).any(|w| w[0] >= w[1]) {
            return Err("lengths must be strictly increasing".into());
        }
        Ok(LengthRange(out))
    }
}
