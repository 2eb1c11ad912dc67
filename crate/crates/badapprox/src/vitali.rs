//! Greedy disjoint-subfamily selection with verified enlargement covers,
//! and the two scaled-union measure bounds it supports: the exact
//! one-dimensional ratio (optimal constant `delta`) and the `(delta/3)^d`
//! certificate in general dimension.
//!
//! Everything in this module is exact; stochastic measure estimates for
//! `d >= 2` live in [`crate::measure`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{check_dim, Ball, IntervalUnion, Scalar};

/// Outcome of the greedy selection, with both invariants re-verified
/// exactly on construction.
#[derive(Clone, Debug, Serialize)]
pub struct VitaliResult {
    /// Indices of the picked balls in pick order (radius descending,
    /// ties by ascending input index).
    pub picked_indices: Vec<usize>,
    /// Picked balls are pairwise non-intersecting (tangency counts as
    /// intersecting, so tangent balls never co-occur).
    pub disjoint_verified: bool,
    /// Every input ball lies inside the 3r-enlargement of some picked
    /// ball of radius at least its own.
    pub cover_verified: bool,
}

/// Lower bound on `measure(union of delta-scaled balls) / measure(union)`.
///
/// Serialises as
/// `{"delta": "p/q", "dim": d, "exact_ratio": "p/q"|null, "certified_lower_bound": "p/q"}`.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Bound {
    pub delta: Scalar,
    pub dim: usize,
    /// Exact measure ratio; present only on the one-dimensional path.
    pub exact_ratio: Option<Scalar>,
    pub certified_lower_bound: Scalar,
}

/// Certificate detail: the two exact volume sums over the picked
/// subfamily whose quotient is the certified bound.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Certificate {
    pub bound: Lemma1Bound,
    pub greedy: VitaliResult,
    /// `sum over picked of (delta * r_j)^d`, unit-ball factor omitted
    /// (it cancels in the quotient).
    pub scaled_volume_sum: Scalar,
    /// `sum over picked of (3 * r_j)^d`.
    pub enlarged_volume_sum: Scalar,
}

fn common_dim(balls: &[Ball]) -> Result<usize> {
    let first = balls
        .first()
        .ok_or_else(|| Error::invalid("empty ball family"))?;
    for b in balls {
        check_dim(first.dim(), b.dim())?;
    }
    Ok(first.dim())
}

/// Greedy disjoint subfamily: process balls by strictly decreasing radius
/// (ties broken by ascending input index), picking a ball iff it intersects
/// no previously picked ball. The output guarantees that every input ball
/// intersects a picked ball of radius at least its own, hence is covered by
/// that ball's 3r-enlargement.
pub fn greedy_disjoint_subfamily(balls: &[Ball]) -> Result<VitaliResult> {
    common_dim(balls)?;

    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| {
        balls[b]
            .radius()
            .cmp(balls[a].radius())
            .then_with(|| a.cmp(&b))
    });

    let mut picked: Vec<usize> = Vec::new();
    for &i in &order {
        let mut free = true;
        for &j in &picked {
            if balls[i].intersects(&balls[j])? {
                free = false;
                break;
            }
        }
        if free {
            picked.push(i);
        }
    }

    let mut result = VitaliResult {
        picked_indices: picked,
        disjoint_verified: false,
        cover_verified: false,
    };
    result.disjoint_verified = verify_disjoint(balls, &result)?;
    result.cover_verified = verify_enlarged_cover(balls, &result, &Scalar::from(3i64))?;
    Ok(result)
}

/// Exact pairwise-disjointness check of the picked subfamily.
pub fn verify_disjoint(balls: &[Ball], result: &VitaliResult) -> Result<bool> {
    let picked = &result.picked_indices;
    for (k, &i) in picked.iter().enumerate() {
        for &j in &picked[k + 1..] {
            if balls[i].intersects(&balls[j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff every input ball `B(x_i, r_i)` sits inside
/// `B(x_j, factor * r_j)` for some picked ball with `r_j >= r_i`.
/// With `factor = 3` this holds for every greedy output.
pub fn verify_enlarged_cover(
    balls: &[Ball],
    result: &VitaliResult,
    factor: &Scalar,
) -> Result<bool> {
    if factor < &Scalar::one() {
        return Err(Error::invalid(format!("enlargement factor must be >= 1, got {factor}")));
    }
    for &j in &result.picked_indices {
        if j >= balls.len() {
            return Err(Error::invalid(format!(
                "picked index {j} out of range for family of {}",
                balls.len()
            )));
        }
    }
    'outer: for ball in balls {
        for &j in &result.picked_indices {
            let picked = &balls[j];
            if picked.radius() >= ball.radius()
                && ball.within_enlarged(picked.center(), &(factor * picked.radius()))?
            {
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Exact one-dimensional ratio
/// `measure(union of delta-scaled balls) / measure(union)`,
/// computed through canonical interval unions. The ratio is always at
/// least `delta`, with equality for a single ball.
pub fn lemma1_ratio_1d(balls: &[Ball], delta: &Scalar) -> Result<Lemma1Bound> {
    let dim = common_dim(balls)?;
    check_dim(1, dim)?;
    check_delta(delta)?;

    let full = IntervalUnion::from_balls(balls)?;
    let scaled: Vec<Ball> = balls
        .iter()
        .map(|b| b.scaled(delta))
        .collect::<Result<_>>()?;
    let shrunk = IntervalUnion::from_balls(&scaled)?;

    let full_measure = full.measure();
    if !full_measure.is_positive() {
        // Unreachable for positive radii; guards the division below.
        return Err(Error::internal("union of positive-radius balls has measure zero"));
    }
    let exact_ratio = shrunk.measure() / &full_measure;
    if &exact_ratio < delta {
        return Err(Error::internal(format!(
            "scaled-union ratio {exact_ratio} fell below delta {delta}"
        )));
    }
    Ok(Lemma1Bound {
        delta: delta.clone(),
        dim,
        exact_ratio: Some(exact_ratio),
        // In one dimension the optimal constant is delta itself.
        certified_lower_bound: delta.clone(),
    })
}

/// General-dimension certificate: run the greedy selection and return the
/// quotient of exact volume sums over the picked subfamily,
/// `sum (delta r_j)^d / sum (3 r_j)^d = (delta/3)^d`. The picked
/// delta-scaled balls are disjoint and the 3r-enlargements cover the full
/// union, so this quotient is a valid lower bound for the measure ratio.
pub fn lemma1_certificate(balls: &[Ball], delta: &Scalar) -> Result<Lemma1Certificate> {
    let dim = common_dim(balls)?;
    check_delta(delta)?;

    let greedy = greedy_disjoint_subfamily(balls)?;
    if !greedy.disjoint_verified || !greedy.cover_verified {
        return Err(Error::internal("greedy subfamily failed its own verification"));
    }

    let d = dim as u32;
    let three = Scalar::from(3i64);
    let mut scaled_volume_sum = Scalar::zero();
    let mut enlarged_volume_sum = Scalar::zero();
    for &j in &greedy.picked_indices {
        let r = balls[j].radius();
        scaled_volume_sum += &(delta * r).pow(d);
        enlarged_volume_sum += &(&three * r).pow(d);
    }

    let certified_lower_bound = &scaled_volume_sum / &enlarged_volume_sum;
    Ok(Lemma1Certificate {
        bound: Lemma1Bound {
            delta: delta.clone(),
            dim,
            exact_ratio: None,
            certified_lower_bound,
        },
        greedy,
        scaled_volume_sum,
        enlarged_volume_sum,
    })
}

fn check_delta(delta: &Scalar) -> Result<()> {
    if !delta.is_positive() || delta > &Scalar::one() {
        return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{int, rat, Point};

    fn ball1(c: Scalar, r: Scalar) -> Ball {
        Ball::new(Point::new(vec![c]), r).unwrap()
    }

    fn three_ball_family() -> Vec<Ball> {
        vec![
            ball1(int(0), int(2)),
            ball1(int(3), int(1)),
            ball1(int(5), int(1)),
        ]
    }

    #[test]
    fn greedy_excludes_tangent_ball() {
        // B(3,1) is tangent to B(0,2), hence intersecting, hence excluded.
        let r = greedy_disjoint_subfamily(&three_ball_family()).unwrap();
        assert_eq!(r.picked_indices, vec![0, 2]);
        assert!(r.disjoint_verified);
        assert!(r.cover_verified);
    }

    #[test]
    fn greedy_singleton() {
        let r = greedy_disjoint_subfamily(&[ball1(int(0), int(1))]).unwrap();
        assert_eq!(r.picked_indices, vec![0]);
        assert!(r.disjoint_verified && r.cover_verified);
    }

    #[test]
    fn greedy_tie_breaks_by_index() {
        // Equal radii: lower index first; B(1,1) intersects B(0,1).
        let fam = vec![ball1(int(0), int(1)), ball1(int(1), int(1))];
        let r = greedy_disjoint_subfamily(&fam).unwrap();
        assert_eq!(r.picked_indices, vec![0]);
    }

    #[test]
    fn greedy_rejects_empty_family() {
        assert!(greedy_disjoint_subfamily(&[]).is_err());
    }

    #[test]
    fn cover_holds_at_three_fails_at_one() {
        let fam = three_ball_family();
        let r = greedy_disjoint_subfamily(&fam).unwrap();
        assert!(verify_enlarged_cover(&fam, &r, &int(3)).unwrap());
        // B(3,1) fits in neither B(0,2) nor B(5,1).
        assert!(!verify_enlarged_cover(&fam, &r, &int(1)).unwrap());
    }

    #[test]
    fn self_cover_at_factor_one() {
        let fam = vec![ball1(int(0), int(1))];
        let r = greedy_disjoint_subfamily(&fam).unwrap();
        assert!(verify_enlarged_cover(&fam, &r, &int(1)).unwrap());
    }

    #[test]
    fn cover_rejects_bad_indices() {
        let fam = three_ball_family();
        let bogus = VitaliResult {
            picked_indices: vec![7],
            disjoint_verified: false,
            cover_verified: false,
        };
        assert!(verify_enlarged_cover(&fam, &bogus, &int(3)).is_err());
    }

    #[test]
    fn ratio_single_ball_attains_delta() {
        let b = lemma1_ratio_1d(&[ball1(int(0), int(1))], &rat(1, 3)).unwrap();
        assert_eq!(b.exact_ratio.unwrap(), rat(1, 3));
    }

    #[test]
    fn ratio_two_overlapping_balls() {
        // Scaled union [-1/2,3/2] has measure 2, full union [-1,2] measure 3.
        let fam = vec![ball1(int(0), int(1)), ball1(int(1), int(1))];
        let b = lemma1_ratio_1d(&fam, &rat(1, 2)).unwrap();
        assert_eq!(b.exact_ratio.unwrap(), rat(2, 3));
    }

    #[test]
    fn ratio_identity_at_delta_one() {
        let fam = three_ball_family();
        let b = lemma1_ratio_1d(&fam, &int(1)).unwrap();
        assert_eq!(b.exact_ratio.unwrap(), int(1));
    }

    #[test]
    fn certificate_is_delta_over_three_power() {
        let b2 = Ball::new(Point::new(vec![int(0), int(0)]), int(1)).unwrap();
        let cert = lemma1_certificate(&[b2], &rat(1, 2)).unwrap();
        assert_eq!(cert.bound.certified_lower_bound, rat(1, 36));

        let cert1 = lemma1_certificate(&three_ball_family(), &rat(1, 2)).unwrap();
        assert_eq!(cert1.bound.certified_lower_bound, rat(1, 6));
        // Exact 1-D oracle dominates the certificate.
        let exact = lemma1_ratio_1d(&three_ball_family(), &rat(1, 2)).unwrap();
        assert_eq!(exact.exact_ratio.unwrap(), rat(1, 2));
    }

    #[test]
    fn delta_out_of_range_rejected() {
        let fam = three_ball_family();
        assert!(lemma1_certificate(&fam, &int(3)).is_err());
        assert!(lemma1_certificate(&fam, &int(0)).is_err());
        assert!(lemma1_ratio_1d(&fam, &rat(-1, 2)).is_err());
    }

    #[test]
    fn bound_json_shape() {
        let b = lemma1_ratio_1d(&[ball1(int(0), int(1))], &rat(1, 3)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&b).unwrap();
        assert_eq!(v["delta"], "1/3");
        assert_eq!(v["dim"], 1);
        assert_eq!(v["exact_ratio"], "1/3");
        assert_eq!(v["certified_lower_bound"], "1/3");
    }
}
