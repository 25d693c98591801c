//! Edge p-values: hypergeometric over-representation for category pairs and
//! Mann-Whitney U for category-numeric pairs. Everything is carried as
//! log10 p so tails far below `f64::MIN_POSITIVE` stay representable.

mod hypergeom;
mod mann_whitney;
pub mod special;

use serde::{Deserialize, Serialize};

pub use hypergeom::{hypergeom_sf, pair_counts, PairCounts};
pub use mann_whitney::{mann_whitney, Direction, MannWhitney};

/// Smallest p kept in linear form; anything below lives only as log10.
const MIN_LINEAR: f64 = 1e-300;

/// A p-value stored as its base-10 logarithm (always ≤ 0), together with
/// the linear value whenever that is a normal float. Arithmetic on the
/// linear value keeps simple products such as `3 × 0.01` exact.
#[derive(Clone, Copy, Debug)]
pub struct LogP {
    log10: f64,
    /// 0 when p is below `MIN_LINEAR`.
    linear: f64,
}

impl LogP {
    pub const ONE: LogP = LogP {
        log10: 0.0,
        linear: 1.0,
    };

    /// Clamps to p ≤ 1.
    pub fn from_log10(log10_p: f64) -> Self {
        debug_assert!(!log10_p.is_nan());
        let log10 = log10_p.min(0.0);
        let linear = 10f64.powf(log10);
        LogP {
            log10,
            linear: if linear >= MIN_LINEAR { linear } else { 0.0 },
        }
    }

    pub fn from_ln(ln_p: f64) -> Self {
        Self::from_log10(ln_p / special::LN_10)
    }

    /// Clamps to p ≤ 1.
    pub fn from_p(p: f64) -> Self {
        debug_assert!(!p.is_nan());
        let p = p.min(1.0);
        if p >= MIN_LINEAR {
            LogP {
                log10: p.log10(),
                linear: p,
            }
        } else {
            Self::from_log10(p.log10())
        }
    }

    pub fn log10(self) -> f64 {
        self.log10
    }

    /// Linear p; underflows to 0 below ~1e-308.
    pub fn p(self) -> f64 {
        if self.linear > 0.0 {
            self.linear
        } else {
            10f64.powf(self.log10)
        }
    }

    /// −log10 p.
    pub fn weight(self) -> f64 {
        -self.log10 + 0.0
    }

    /// p · factor, clamped at 1.
    pub fn scale(self, factor: f64) -> LogP {
        if self.linear > 0.0 {
            LogP::from_p(self.linear * factor)
        } else {
            LogP::from_log10(self.log10 + factor.log10())
        }
    }

    /// p · factor / divisor, clamped at 1; the product is formed first.
    pub fn scale_ratio(self, factor: f64, divisor: f64) -> LogP {
        if self.linear > 0.0 {
            LogP::from_p(self.linear * factor / divisor)
        } else {
            LogP::from_log10(self.log10 + factor.log10() - divisor.log10())
        }
    }
}

impl PartialEq for LogP {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for LogP {}

impl PartialOrd for LogP {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogP {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.linear > 0.0 && other.linear > 0.0 {
            self.linear.total_cmp(&other.linear)
        } else {
            self.log10.total_cmp(&other.log10)
        }
    }
}

impl Serialize for LogP {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.log10)
    }
}

impl<'de> Deserialize<'de> for LogP {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(LogP::from_log10)
    }
}
