//! Constant-radius counterexample system: balls of radius 2 centred on the
//! integer lattice in the plane, enumerated so that every lattice point
//! recurs infinitely often.
//!
//! Pass `k` (k = 1, 2, 3, ...) walks the square shells of sup-norm
//! 0, 1, ..., k-1 and then the enumeration restarts from the origin, so a
//! point of sup-norm `s` reappears in every later pass. The system is not
//! shrinking locally: infinitely many radius-2 balls meet any probe ball.

use num_integer::Roots;

use crate::geometry::{int, Point, Scalar};
use crate::systems::{SystemBall, SystemRadius};

pub const Z2_RADIUS: i64 = 2;

/// Number of entries in pass `k`: shells `0..k` hold `(2k-1)^2` points.
fn pass_size(k: u64) -> u64 {
    let side = 2 * k - 1;
    side * side
}

/// Entries in passes `1..=k`: the sum of the first `k` odd squares.
fn passes_through(k: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    k * (2 * k - 1) * (2 * k + 1) / 3
}

/// The `off`-th point (0-based) of the shell walk over shells `0..k`,
/// ordered by shell then lexicographically by `(x, y)`.
fn shell_walk_point(off: u64) -> (i64, i64) {
    if off == 0 {
        return (0, 0);
    }
    // Shell s occupies offsets [(2s-1)^2, (2s+1)^2).
    let s = (off.sqrt() + 1) / 2;
    let s_i = s as i64;
    let mut idx = off - (2 * s - 1) * (2 * s - 1);

    let column = 2 * s + 1; // points in the x = -s and x = +s columns
    if idx < column {
        return (-s_i, -s_i + idx as i64);
    }
    idx -= column;
    let middles = 2 * s - 1; // columns x = -s+1 .. s-1, two points each
    if idx < 2 * middles {
        let col = (idx / 2) as i64;
        let y = if idx % 2 == 0 { -s_i } else { s_i };
        return (-s_i + 1 + col, y);
    }
    idx -= 2 * middles;
    (s_i, -s_i + idx as i64)
}

/// Centre of the ball at one-based index `i`.
pub fn center_at(i: u64) -> (i64, i64) {
    debug_assert!(i >= 1);
    // Find the pass containing i.
    let mut k = ((3 * i) / 4).cbrt().max(1);
    while passes_through(k) < i {
        k += 1;
    }
    while k > 1 && passes_through(k - 1) >= i {
        k -= 1;
    }
    let off = i - passes_through(k - 1) - 1;
    debug_assert!(off < pass_size(k));
    shell_walk_point(off)
}

pub fn ball_at(i: u64) -> SystemBall {
    let (x, y) = center_at(i);
    SystemBall {
        center: Point::new(vec![int(x), int(y)]),
        radius: SystemRadius::Rational(Scalar::from(Z2_RADIUS)),
    }
}

pub struct Z2Iter {
    next_index: u64,
}

pub fn iter_from(start: u64) -> Z2Iter {
    Z2Iter { next_index: start.max(1) }
}

impl Iterator for Z2Iter {
    type Item = (u64, SystemBall);

    fn next(&mut self) -> Option<(u64, SystemBall)> {
        let i = self.next_index;
        self.next_index += 1;
        Some((i, ball_at(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_ball_is_origin_radius_two() {
        let b = ball_at(1);
        assert_eq!(center_at(1), (0, 0));
        match b.radius {
            SystemRadius::Rational(r) => assert_eq!(r, int(2)),
            _ => panic!(),
        }
    }

    #[test]
    fn pass_structure() {
        // Pass 1 = shell 0 alone; pass 2 = shells 0 and 1 (9 entries).
        assert_eq!(passes_through(1), 1);
        assert_eq!(passes_through(2), 10);
        assert_eq!(center_at(2), (0, 0)); // pass 2 restarts at the origin
        // Shell 1 of pass 2 covers indices 3..=10.
        let shell1: Vec<_> = (3..=10).map(center_at).collect();
        let expected = vec![
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        assert_eq!(shell1, expected);
        assert_eq!(center_at(11), (0, 0)); // pass 3 restarts again
    }

    #[test]
    fn every_radius_is_two() {
        for (_, b) in iter_from(1).take(500) {
            match b.radius {
                SystemRadius::Rational(r) => assert_eq!(r, int(2)),
                _ => panic!(),
            }
        }
    }

    #[test]
    fn origin_recurs() {
        let hits = iter_from(1)
            .take(200)
            .filter(|(_, b)| b.center.coords().iter().all(|c| c == &int(0)))
            .count();
        assert!(hits >= 2, "origin must recur within the first passes, saw {hits}");
    }

    #[test]
    fn shell_walk_is_a_bijection_per_pass() {
        // Within a single pass every lattice point of sup-norm < k occurs
        // exactly once.
        let k = 5u64;
        let mut seen = std::collections::HashSet::new();
        for off in 0..pass_size(k) {
            assert!(seen.insert(shell_walk_point(off)));
        }
        assert_eq!(seen.len() as u64, (2 * k - 1) * (2 * k - 1));
        for (x, y) in seen {
            assert!(x.unsigned_abs() < k && y.unsigned_abs() < k);
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a: Vec<_> = iter_from(1).take(300).map(|(i, b)| (i, b.center)).collect();
        let b: Vec<_> = iter_from(1).take(300).map(|(i, b)| (i, b.center)).collect();
        assert_eq!(a, b);
    }
}
