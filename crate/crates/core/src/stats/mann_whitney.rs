use serde::{Deserialize, Serialize};

use crate::error::{HnetError, Result};
use crate::ingest::CategoryColumn;

use super::special::{ln_normal_sf, LN_10};
use super::LogP;

/// Whether the in-group median sits above or below the out-group median.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Higher,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MannWhitney {
    pub log_p: LogP,
    pub direction: Direction,
    /// U statistic of the in-group.
    pub u: f64,
    pub z: f64,
    pub n_in: usize,
    pub n_out: usize,
    pub median_in: f64,
    pub median_out: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Two-sided Mann-Whitney U test of `values` split by `split`.
///
/// Only rows where the value and every parent feature of `split` are
/// observed take part. Uses the normal approximation with tie-corrected
/// variance and a 0.5 continuity correction.
pub fn mann_whitney(values: &[Option<f64>], split: &CategoryColumn) -> Result<MannWhitney> {
    if values.len() != split.n_rows() {
        return Err(HnetError::LengthMismatch {
            expected: split.n_rows(),
            found: values.len(),
        });
    }
    let mut obs: Vec<(f64, bool)> = values
        .iter()
        .enumerate()
        .filter_map(|(row, v)| {
            let v = (*v)?;
            split.present.get(row).then(|| (v, split.bits.get(row)))
        })
        .collect();
    let n_in = obs.iter().filter(|(_, g)| *g).count();
    let n_out = obs.len() - n_in;
    if n_in < 2 || n_out < 2 {
        return Err(HnetError::DegenerateSplit(n_in, n_out));
    }
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = obs.len();
    let mut rank_sum_in = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && obs[j].0 == obs[i].0 {
            j += 1;
        }
        let t = (j - i) as f64;
        // ranks i+1 ..= j averaged
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        rank_sum_in += avg_rank * obs[i..j].iter().filter(|(_, g)| *g).count() as f64;
        tie_term += t * t * t - t;
        i = j;
    }

    let (n1, n2, nf) = (n_in as f64, n_out as f64, n as f64);
    let u = rank_sum_in - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return Err(HnetError::ConstantValues);
    }
    let sd = var.sqrt();
    let dev = u - mean;
    let z = (dev.abs() - 0.5).max(0.0) / sd * dev.signum();
    let ln_p = std::f64::consts::LN_2 + ln_normal_sf(z.abs());
    let log_p = LogP::from_log10(ln_p / LN_10);

    let inside: Vec<f64> = obs.iter().filter(|(_, g)| *g).map(|(v, _)| *v).collect();
    let outside: Vec<f64> = obs.iter().filter(|(_, g)| !*g).map(|(v, _)| *v).collect();
    let (median_in, median_out) = (median(&inside), median(&outside));
    let direction = if median_in >= median_out {
        Direction::Higher
    } else {
        Direction::Lower
    };
    Ok(MannWhitney {
        log_p,
        direction,
        u,
        z,
        n_in,
        n_out,
        median_in,
        median_out,
    })
}
