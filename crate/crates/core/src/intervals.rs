//! Finite unions of intervals and isolated points inside `(0, inf)`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self { lo, hi, lo_closed, hi_closed }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn point(t: f64) -> Self {
        Self::closed(t, t)
    }

    /// Clips to `(0, inf)`; the endpoints `0` and `inf` are never members.
    fn clipped(mut self) -> Self {
        if self.lo <= 0.0 {
            self.lo = 0.0;
            self.lo_closed = false;
        }
        if self.hi == f64::INFINITY {
            self.hi_closed = false;
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && !self.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_end = |x: f64| if x == f64::INFINITY { "+inf".to_string() } else { format!("{x}") };
        if self.is_point() {
            return write!(f, "{{{}}}", fmt_end(self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            fmt_end(self.lo),
            fmt_end(self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Sorted, disjoint, non-adjacent intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn full() -> Self {
        Self { parts: vec![Interval::open(0.0, f64::INFINITY)] }
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> =
            intervals.into_iter().map(Interval::clipped).filter(|i| !i.is_empty()).collect();
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for next in parts {
            if let Some(last) = merged.last_mut() {
                let touches = next.lo < last.hi || (next.lo == last.hi && (last.hi_closed || next.lo_closed));
                if touches {
                    if next.hi > last.hi || (next.hi == last.hi && next.hi_closed) {
                        last.hi = next.hi;
                        last.hi_closed = next.hi_closed;
                    }
                    continue;
                }
            }
            merged.push(next);
        }
        Self { parts: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.parts.iter().any(|i| i.contains(t))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.parts.iter().chain(other.parts.iter()).copied())
    }

    /// Complement relative to `(0, inf)`.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut cursor = 0.0;
        let mut cursor_closed = false;
        for part in &self.parts {
            out.push(Interval::new(cursor, part.lo, cursor_closed, !part.lo_closed));
            cursor = part.hi;
            cursor_closed = !part.hi_closed;
        }
        out.push(Interval::new(cursor, f64::INFINITY, cursor_closed, false));
        Self::from_intervals(out)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intersection(&other.complement()).is_empty()
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" U ")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn merges_touching_parts() {
        let s = IntervalSet::from_intervals([
            Interval::new(0.0, 1.0, false, false),
            Interval::point(1.0),
            Interval::new(1.0, f64::INFINITY, false, false),
        ]);
        assert!(s.is_full());
        let gap = IntervalSet::from_intervals([Interval::open(0.0, 1.0), Interval::open(1.0, 2.0)]);
        assert_eq!(gap.intervals().len(), 2);
        assert_eq!(gap.complement().to_string(), "{1} U [2, +inf)");
    }

    #[test]
    fn complement_of_full_and_empty() {
        assert!(IntervalSet::full().complement().is_empty());
        assert!(IntervalSet::empty().complement().is_full());
    }

    #[test]
    fn clips_to_positive_reals() {
        let s = IntervalSet::from_intervals([Interval::closed(-3.0, 2.0)]);
        assert_eq!(s.to_string(), "(0, 2]");
        assert!(!s.contains(0.0));
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((0u8..12, 0u8..12, any::<bool>(), any::<bool>()), 0..5).prop_map(|v| {
            IntervalSet::from_intervals(v.into_iter().map(|(a, b, c1, c2)| {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let hi = if hi == 11 { f64::INFINITY } else { hi as f64 };
                Interval::new(lo as f64, hi, c1, c2)
            }))
        })
    }

    proptest! {
        #[test]
        fn membership_laws(a in arb_set(), b in arb_set()) {
            let probes: Vec<f64> = (1..48).map(|i| i as f64 / 4.0).collect();
            let u = a.union(&b);
            let c = a.complement();
            let i = a.intersection(&b);
            for &t in &probes {
                prop_assert_eq!(u.contains(t), a.contains(t) || b.contains(t));
                prop_assert_eq!(c.contains(t), !a.contains(t));
                prop_assert_eq!(i.contains(t), a.contains(t) && b.contains(t));
            }
            prop_assert_eq!(c.complement(), a.clone());
            prop_assert!(i.is_subset_of(&a));
        }
    }
}
