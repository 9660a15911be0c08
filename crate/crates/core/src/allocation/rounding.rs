use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How optimal counts are mapped onto realizable grid sizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoundingScheme {
    /// Integer ceiling only; not tied to any grid.
    #[serde(rename = "ceil")]
    Ceil,
    /// Smallest grid at least as large as the count.
    #[serde(rename = "up")]
    UpToGrid,
    /// Nearest grid in log ratio, then rebalanced so the number of entries
    /// rounded down and up differ by at most one.
    #[default]
    #[serde(rename = "updown")]
    BalancedUpDown,
}

impl std::str::FromStr for RoundingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ceil" => Ok(RoundingScheme::Ceil),
            "up" => Ok(RoundingScheme::UpToGrid),
            "updown" => Ok(RoundingScheme::BalancedUpDown),
            _ => Err(Error::config("scheme", format!("unknown rounding scheme '{s}' (ceil, up, updown)"))),
        }
    }
}

impl std::fmt::Display for RoundingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RoundingScheme::Ceil => "ceil",
            RoundingScheme::UpToGrid => "up",
            RoundingScheme::BalancedUpDown => "updown",
        })
    }
}

/// Counts after rounding together with the grid level realizing each one
/// (`None` when no grid has exactly that many points).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rounded {
    pub counts: Vec<u64>,
    pub grid_levels: Vec<Option<usize>>,
}

impl Rounded {
    /// Grid levels, failing if any count is not a grid size.
    pub fn realized_levels(&self) -> Result<Vec<usize>> {
        self.grid_levels
            .iter()
            .zip(&self.counts)
            .map(|(l, c)| l.ok_or_else(|| Error::invalid(format!("count {c} is not a grid size"))))
            .collect()
    }
}

/// Map `counts` onto the increasing grid `sizes`.
pub fn round_to_grid(counts: &[u64], sizes: &[u64], scheme: RoundingScheme) -> Result<Rounded> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid sizes must be nonempty and strictly increasing"));
    }
    let largest = *sizes.last().unwrap();
    let exact = |c: u64| sizes.iter().position(|&s| s == c);

    if scheme == RoundingScheme::Ceil {
        return Ok(Rounded {
            counts: counts.to_vec(),
            grid_levels: counts.iter().map(|&c| exact(c)).collect(),
        });
    }
    if let Some(&c) = counts.iter().find(|&&c| c > largest) {
        return Err(Error::invalid(format!(
            "count {c} exceeds the largest available grid ({largest} points)"
        )));
    }
    let up = |c: u64| sizes.iter().position(|&s| s >= c).unwrap();
    let mut levels: Vec<usize> = counts.iter().map(|&c| up(c)).collect();

    if scheme == RoundingScheme::BalancedUpDown {
        let down: Vec<Option<usize>> = counts
            .iter()
            .zip(&levels)
            .map(|(&c, &l)| (sizes[l] != c && l > 0).then(|| l - 1))
            .collect();
        let ratio = |c: u64, l: usize| ((sizes[l] as f64) / c as f64).ln().abs();
        for i in 0..counts.len() {
            if let Some(d) = down[i] {
                if ratio(counts[i], d) < ratio(counts[i], levels[i]) {
                    levels[i] = d;
                }
            }
        }
        loop {
            let moved_down: Vec<usize> = (0..counts.len()).filter(|&i| sizes[levels[i]] < counts[i]).collect();
            let moved_up: Vec<usize> = (0..counts.len())
                .filter(|&i| sizes[levels[i]] > counts[i] && down[i].is_some())
                .collect();
            let n_up = (0..counts.len()).filter(|&i| sizes[levels[i]] > counts[i]).count();
            if moved_down.len() > n_up + 1 {
                let i = *moved_down
                    .iter()
                    .max_by(|&&a, &&b| ratio(counts[a], levels[a]).total_cmp(&ratio(counts[b], levels[b])))
                    .unwrap();
                levels[i] += 1;
            } else if n_up > moved_down.len() + 1 && !moved_up.is_empty() {
                let i = *moved_up
                    .iter()
                    .max_by(|&&a, &&b| ratio(counts[a], levels[a]).total_cmp(&ratio(counts[b], levels[b])))
                    .unwrap();
                levels[i] -= 1;
            } else {
                break;
            }
        }
    }
    Ok(Rounded {
        counts: levels.iter().map(|&l| sizes[l]).collect(),
        grid_levels: levels.into_iter().map(Some).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N20: [u64; 5] = [1, 41, 841, 11561, 120401];

    fn balanced(counts: &[u64]) -> Vec<u64> {
        round_to_grid(counts, &N20, RoundingScheme::BalancedUpDown).unwrap().counts
    }

    #[test]
    fn table_rows() {
        assert_eq!(balanced(&[191, 48, 15]), vec![841, 41, 41]);
        assert_eq!(balanced(&[3002, 747, 233, 73]), vec![841, 841, 841, 41]);
        assert_eq!(
            balanced(&[27940, 6949, 2169, 677, 212]),
            vec![11561, 11561, 841, 841, 841]
        );
        let up = round_to_grid(&[27940, 6949, 2169, 677, 212], &N20, RoundingScheme::UpToGrid).unwrap();
        assert_eq!(up.counts, vec![120401, 11561, 11561, 841, 841]);
    }

    #[test]
    fn fourth_row() {
        // nearest rounding takes 2672 down to 841, which already balances
        // two down against three up
        assert_eq!(
            balanced(&[110310, 27433, 8562, 2672, 834]),
            vec![120401, 11561, 11561, 841, 841]
        );
    }

    #[test]
    fn up_rounds_to_the_next_grid() {
        let r = round_to_grid(&[191, 41, 1], &N20, RoundingScheme::UpToGrid).unwrap();
        assert_eq!(r.counts, vec![841, 41, 1]);
        assert_eq!(r.grid_levels, vec![Some(2), Some(1), Some(0)]);
    }

    #[test]
    fn ceil_is_identity() {
        let r = round_to_grid(&[191, 41], &N20, RoundingScheme::Ceil).unwrap();
        assert_eq!(r.counts, vec![191, 41]);
        assert_eq!(r.grid_levels, vec![None, Some(1)]);
        assert!(r.realized_levels().is_err());
    }

    #[test]
    fn too_large_counts_fail() {
        assert!(round_to_grid(&[200_000], &N20, RoundingScheme::UpToGrid).is_err());
    }

    #[test]
    fn scheme_names() {
        for s in [RoundingScheme::Ceil, RoundingScheme::UpToGrid, RoundingScheme::BalancedUpDown] {
            assert_eq!(s.to_string().parse::<RoundingScheme>().unwrap(), s);
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(j, format!("\"{s}\""));
        }
        assert!("nearest".parse::<RoundingScheme>().is_err());
    }
}
