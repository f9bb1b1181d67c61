use std::cmp::Ordering;
use std::fmt;

/// A real number or one of the two signed infinities.
///
/// Suprema and infima of the degree and bracket functions are frequently
/// unbounded; this keeps those cases explicit rather than relying on IEEE
/// infinities leaking through arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Maps IEEE infinities to the tagged variants. NaN is rejected.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "ExtReal::from_f64 called with NaN");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("+inf"),
            ExtReal::Finite(x) => match f.precision() {
                Some(p) => write!(f, "{x:.p$}"),
                None => write!(f, "{x}"),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_infinities_at_the_ends() {
        let xs = [ExtReal::PosInf, ExtReal::Finite(-1e300), ExtReal::NegInf, ExtReal::Finite(2.0)];
        let mut sorted = xs.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            sorted,
            vec![ExtReal::NegInf, ExtReal::Finite(-1e300), ExtReal::Finite(2.0), ExtReal::PosInf]
        );
    }

    #[test]
    fn round_trips_ieee_infinities() {
        assert_eq!(ExtReal::from_f64(f64::INFINITY), ExtReal::PosInf);
        assert_eq!(ExtReal::from_f64(f64::NEG_INFINITY).to_f64(), f64::NEG_INFINITY);
        assert_eq!(ExtReal::from(3.5).finite(), Some(3.5));
    }

    #[test]
    fn max_min() {
        assert_eq!(ExtReal::NegInf.max(ExtReal::Finite(1.0)), ExtReal::Finite(1.0));
        assert_eq!(ExtReal::PosInf.min(ExtReal::Finite(1.0)), ExtReal::Finite(1.0));
    }
}
