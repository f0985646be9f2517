use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Bounded,
    UnboundedLeft,
    UnboundedRight,
    WholeLine,
    Empty,
    Disconnected,
}

impl SetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SetKind::Bounded => "bounded",
            SetKind::UnboundedLeft => "unbounded_left",
            SetKind::UnboundedRight => "unbounded_right",
            SetKind::WholeLine => "whole_line",
            SetKind::Empty => "empty",
            SetKind::Disconnected => "disconnected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::float")]
    pub low: f64,
    #[serde(with = "crate::float")]
    pub high: f64,
}

/// A confidence set on the real line: a sorted union of disjoint closed
/// intervals whose ends may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    pub kind: SetKind,
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn bounded(low: f64, high: f64) -> Self {
        Self::from_intervals(vec![(low, high)])
    }

    pub fn whole_line() -> Self {
        Self::from_intervals(vec![(f64::NEG_INFINITY, f64::INFINITY)])
    }

    pub fn empty() -> Self {
        Self::from_intervals(Vec::new())
    }

    /// Sorts, drops empty pieces, merges overlaps and classifies.
    pub fn from_intervals(mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.retain(|(a, b)| !a.is_nan() && !b.is_nan() && a <= b);
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in pieces {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let kind = match merged.as_slice() {
            [] => SetKind::Empty,
            [(a, b)] => match (a.is_infinite(), b.is_infinite()) {
                (false, false) => SetKind::Bounded,
                (true, false) => SetKind::UnboundedLeft,
                (false, true) => SetKind::UnboundedRight,
                (true, true) => SetKind::WholeLine,
            },
            _ => SetKind::Disconnected,
        };
        IntervalSet {
            kind,
            intervals: merged
                .into_iter()
                .map(|(low, high)| Interval { low, high })
                .collect(),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.low <= x && x <= i.high)
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(|i| i.low.is_finite() && i.high.is_finite())
    }

    /// Outermost ends; infinite for unbounded sets, `None` when empty.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.low, self.intervals.last()?.high))
    }

    /// Total length of the set.
    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|i| i.high - i.low).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classifies_kinds() {
        assert_eq!(IntervalSet::bounded(-1.0, 2.0).kind, SetKind::Bounded);
        assert_eq!(IntervalSet::whole_line().kind, SetKind::WholeLine);
        assert_eq!(IntervalSet::empty().kind, SetKind::Empty);
        let s = IntervalSet::from_intervals(vec![(3.0, f64::INFINITY), (f64::NEG_INFINITY, -1.0)]);
        assert_eq!(s.kind, SetKind::Disconnected);
        assert!(s.contains(-5.0) && s.contains(3.0) && !s.contains(0.0));
        assert_eq!(
            IntervalSet::from_intervals(vec![(f64::NEG_INFINITY, 1.0)]).kind,
            SetKind::UnboundedLeft
        );
    }

    #[test]
    fn json_keeps_infinite_ends() {
        let s = IntervalSet::from_intervals(vec![(1.0, f64::INFINITY)]);
        let js = serde_json::to_string(&s).unwrap();
        assert!(js.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<IntervalSet>(&js).unwrap(), s);
    }

    proptest! {
        #[test]
        fn normalized_pieces_are_sorted_and_disjoint(
            raw in proptest::collection::vec((-100.0f64..100.0, 0.0f64..20.0), 0..8)
        ) {
            let pieces: Vec<(f64, f64)> = raw.iter().map(|(a, w)| (*a, a + w)).collect();
            let s = IntervalSet::from_intervals(pieces.clone());
            for w in s.intervals.windows(2) {
                prop_assert!(w[0].high < w[1].low);
            }
            for (a, b) in pieces {
                prop_assert!(s.contains(a) && s.contains(b) && s.contains(0.5 * (a + b)));
            }
        }
    }
}
