use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::scalar::Scalar;
use crate::geometry::Ball;

/// Closed interval `[lo, hi]` with exact endpoints, `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "(Scalar, Scalar)", into = "(Scalar, Scalar)")]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn measure(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl TryFrom<(Scalar, Scalar)> for Interval {
    type Error = Error;
    fn try_from((lo, hi): (Scalar, Scalar)) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for (Scalar, Scalar) {
    fn from(iv: Interval) -> Self {
        (iv.lo, iv.hi)
    }
}

/// Canonical finite union of closed intervals: components sorted by left
/// endpoint, pairwise separated by a positive gap. Touching input intervals
/// merge into one component (closed-set convention), so the canonical form
/// is unique and `measure` is simply the sum of component lengths.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntervalUnion {
    components: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { components: Vec::new() }
    }

    /// Canonicalises an arbitrary collection of closed intervals.
    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut components: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match components.last_mut() {
                // Touching counts as connected: [a,b] u [b,c] = [a,c].
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => components.push(iv),
            }
        }
        IntervalUnion { components }
    }

    /// Union of one-dimensional closed balls `[c - r, c + r]`.
    pub fn from_balls(balls: &[Ball]) -> Result<Self> {
        let mut intervals = Vec::with_capacity(balls.len());
        for b in balls {
            intervals.push(b.to_interval()?);
        }
        Ok(IntervalUnion::from_intervals(intervals))
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Exact total length.
    pub fn measure(&self) -> Scalar {
        self.components.iter().map(Interval::measure).sum()
    }

    /// Exact membership by binary search over the sorted components.
    pub fn contains(&self, x: &Scalar) -> bool {
        let idx = self.components.partition_point(|iv| iv.lo() <= x);
        idx > 0 && x <= self.components[idx - 1].hi()
    }

    /// Restriction to a window interval.
    pub fn clip(&self, window: &Interval) -> IntervalUnion {
        let components = self
            .components
            .iter()
            .filter_map(|iv| iv.intersect(window))
            .collect();
        // Clipping preserves order and gaps; no re-merge needed.
        IntervalUnion { components }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::scalar::{int, rat};
    use crate::geometry::Point;

    fn ball1(c: Scalar, r: Scalar) -> Ball {
        Ball::new(Point::new(vec![c]), r).unwrap()
    }

    #[test]
    fn touching_balls_merge() {
        // [-1,1] and [1,2] share the endpoint 1 and merge.
        let u = IntervalUnion::from_balls(&[ball1(int(0), int(1)), ball1(rat(3, 2), rat(1, 2))])
            .unwrap();
        assert_eq!(u.components().len(), 1);
        assert_eq!(u.components()[0].lo(), &int(-1));
        assert_eq!(u.components()[0].hi(), &int(2));
        assert_eq!(u.measure(), int(3));
    }

    #[test]
    fn single_ball() {
        let u = IntervalUnion::from_balls(&[ball1(int(0), int(1))]).unwrap();
        assert_eq!(u.components().len(), 1);
        assert_eq!(u.measure(), int(2));
    }

    #[test]
    fn disjoint_balls_stay_separate() {
        let u =
            IntervalUnion::from_balls(&[ball1(int(0), int(1)), ball1(int(4), int(1))]).unwrap();
        assert_eq!(u.components().len(), 2);
        assert_eq!(u.measure(), int(4));
    }

    #[test]
    fn overlap_is_merged_in_measure() {
        // [0,1] and [1/2,2] overlap; canonical measure is 2.
        let u = IntervalUnion::from_intervals(vec![
            Interval::new(int(0), int(1)).unwrap(),
            Interval::new(rat(1, 2), int(2)).unwrap(),
        ]);
        assert_eq!(u.components().len(), 1);
        assert_eq!(u.measure(), int(2));
    }

    #[test]
    fn empty_union_measures_zero() {
        let u = IntervalUnion::from_balls(&[]).unwrap();
        assert!(u.is_empty());
        assert_eq!(u.measure(), int(0));
    }

    #[test]
    fn membership_binary_search() {
        let u =
            IntervalUnion::from_balls(&[ball1(int(0), int(1)), ball1(int(4), int(1))]).unwrap();
        assert!(u.contains(&int(1))); // boundary of closed component
        assert!(u.contains(&int(-1)));
        assert!(!u.contains(&int(2)));
        assert!(u.contains(&int(3)));
        assert!(!u.contains(&rat(29, 10)));
        assert!(!u.contains(&int(6)));
    }

    #[test]
    fn clip_to_window() {
        let u =
            IntervalUnion::from_balls(&[ball1(int(0), int(1)), ball1(int(4), int(1))]).unwrap();
        let w = Interval::new(rat(1, 2), rat(9, 2)).unwrap();
        // [-1,1] clips to [1/2,1]; [3,5] clips to [3,9/2].
        let clipped = u.clip(&w);
        assert_eq!(clipped.measure(), int(2));
    }

    #[test]
    fn order_independent() {
        let a = ball1(int(0), int(1));
        let b = ball1(rat(3, 2), rat(1, 2));
        let c = ball1(int(4), int(1));
        let u1 = IntervalUnion::from_balls(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let u2 = IntervalUnion::from_balls(&[c, a, b]).unwrap();
        assert_eq!(u1, u2);
    }
}
