use crate::error::{HnetError, Result};
use crate::ingest::CategoryColumn;

use super::special::{ln_choose, log_sum_exp};
use super::LogP;

/// Counts for one over-representation test: `observed` successes among
/// `draws` rows taken from `population` rows that hold `successes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairCounts {
    pub population: u64,
    pub successes: u64,
    pub draws: u64,
    pub observed: u64,
}

impl PairCounts {
    pub fn new(population: u64, successes: u64, draws: u64, observed: u64) -> Result<Self> {
        let c = Self {
            population,
            successes,
            draws,
            observed,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.successes <= self.population
            && self.draws <= self.population
            && self.observed <= self.successes.min(self.draws)
            && self.observed + self.population >= self.successes + self.draws;
        if ok {
            Ok(())
        } else {
            Err(HnetError::InvalidCounts {
                population: self.population,
                successes: self.successes,
                draws: self.draws,
                observed: self.observed,
            })
        }
    }
}

/// Counts for testing whether `response` rows are enriched for `candidate`.
///
/// The population is restricted to rows where both sides are observed.
pub fn pair_counts(response: &CategoryColumn, candidate: &CategoryColumn) -> Result<PairCounts> {
    if response.n_rows() != candidate.n_rows() {
        return Err(HnetError::LengthMismatch {
            expected: response.n_rows(),
            found: candidate.n_rows(),
        });
    }
    if response.shares_feature(candidate) {
        return Err(HnetError::SameFeaturePair(response.id(), candidate.id()));
    }
    let both = &response.present;
    let population = both.and_count(&candidate.present) as u64;
    let successes = candidate.bits.and_count(both) as u64;
    let draws = response.bits.and_count(&candidate.present) as u64;
    let observed = response.bits.and_count(&candidate.bits) as u64;
    PairCounts::new(population, successes, draws, observed)
}

/// log10 P(X ≥ observed) for X ~ Hypergeometric(population, successes, draws).
///
/// The upper tail is summed directly in log space rather than as one minus
/// the CDF, which would cancel to zero long before p reaches the 1e-80 range.
pub fn hypergeom_sf(c: &PairCounts) -> Result<LogP> {
    c.validate()?;
    let PairCounts {
        population: big_n,
        successes: k,
        draws: n,
        observed: x,
    } = *c;
    let lower = (k + n).saturating_sub(big_n);
    if x <= lower {
        return Ok(LogP::ONE);
    }
    let upper = k.min(n);
    let ln_total = ln_choose(big_n, n);
    let mut term = ln_choose(k, x) + ln_choose(big_n - k, n - x) - ln_total;
    let mut terms = Vec::with_capacity((upper - x + 1).min(4096) as usize);
    let mut peak = term;
    terms.push(term);
    for j in x..upper {
        // t(j+1) / t(j) = (K-j)(n-j) / ((j+1)(N-K-n+j+1))
        let num = ((k - j) as f64) * ((n - j) as f64);
        let den = ((j + 1) as f64) * ((big_n + j + 1 - k - n) as f64);
        term += (num / den).ln();
        peak = peak.max(term);
        terms.push(term);
        // past the mode the terms only shrink; e^-50 is below f64 resolution
        if term < peak - 50.0 && num < den {
            break;
        }
    }
    Ok(LogP::from_ln(log_sum_exp(&terms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bits;

    #[test]
    fn zero_observed_is_certain() {
        let c = PairCounts::new(10, 5, 5, 0).unwrap();
        assert_eq!(hypergeom_sf(&c).unwrap().log10(), 0.0);
    }

    #[test]
    fn full_overlap_of_ten_choose_five() {
        // C(5,5)·C(5,0)/C(10,5) = 1/252
        let c = PairCounts::new(10, 5, 5, 5).unwrap();
        let lp = hypergeom_sf(&c).unwrap().log10();
        assert!((lp - (1.0f64 / 252.0).log10()).abs() < 1e-12);
        assert!((lp - -2.4014).abs() < 1e-4);
    }

    #[test]
    fn invalid_counts_rejected() {
        assert!(PairCounts::new(10, 11, 2, 0).is_err());
        assert!(PairCounts::new(10, 3, 3, 4).is_err());
        // x below K + n - N
        assert!(PairCounts::new(10, 8, 8, 5).is_err());
    }

    fn column(feature: &str, bits: &[bool]) -> CategoryColumn {
        CategoryColumn::new(feature, "1", Bits::from_bools(bits), Bits::ones(bits.len()))
    }

    #[test]
    fn counts_from_columns() {
        let r = column("R", &[true, true, false, false]);
        let c = column("C", &[true, false, true, false]);
        assert_eq!(
            pair_counts(&r, &c).unwrap(),
            PairCounts::new(4, 2, 2, 1).unwrap()
        );
    }

    #[test]
    fn identical_columns_overlap_fully() {
        let bits: Vec<bool> = (0..100).map(|i| i < 30).collect();
        let counts = pair_counts(&column("A", &bits), &column("B", &bits)).unwrap();
        assert_eq!(counts, PairCounts::new(100, 30, 30, 30).unwrap());
    }

    #[test]
    fn missing_rows_leave_the_population() {
        let mut r = column("R", &[true, true, false, false, true]);
        r.present = Bits::from_bools(&[true, true, true, true, false]);
        r.bits.set(4, false);
        let c = column("C", &[true, false, true, false, true]);
        assert_eq!(
            pair_counts(&r, &c).unwrap(),
            PairCounts::new(4, 2, 2, 1).unwrap()
        );
    }

    #[test]
    fn same_feature_rejected() {
        let a = column("A", &[true, false]);
        let b = column("A", &[false, true]);
        assert!(matches!(
            pair_counts(&a, &b),
            Err(HnetError::SameFeaturePair(..))
        ));
    }
}
