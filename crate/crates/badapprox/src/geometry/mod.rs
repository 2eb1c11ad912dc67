//! Exact-rational geometric primitives: points, closed balls, cubes,
//! axis-aligned boxes and canonical 1-D interval unions.
//!
//! Every predicate here is decided on squared distances in exact rational
//! arithmetic. Closed-set conventions apply throughout: boundary points are
//! members, tangent balls intersect, and touching intervals merge.

mod interval;
mod scalar;

pub use interval::{Interval, IntervalUnion};
pub use scalar::{int, rat, Scalar};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point in `d`-dimensional space with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<Scalar>);

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    /// Exact squared Euclidean distance.
    pub fn dist_sq(&self, other: &Point) -> Result<Scalar> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.dist_sq_unchecked(other))
    }

    pub(crate) fn dist_sq_unchecked(&self, other: &Point) -> Scalar {
        let mut acc = Scalar::zero();
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            let d = a - b;
            acc += &d.square();
        }
        acc
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Closed Euclidean ball `B(x, r)` with exact rational centre and radius.
/// Boundary points are members; the radius is strictly positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "BallRepr", into = "BallRepr")]
pub struct Ball {
    center: Point,
    radius: Scalar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallRepr {
    center: Vec<Scalar>,
    radius: Scalar,
}

impl TryFrom<BallRepr> for Ball {
    type Error = Error;
    fn try_from(r: BallRepr) -> Result<Self> {
        Ball::new(Point::new(r.center), r.radius)
    }
}

impl From<Ball> for BallRepr {
    fn from(b: Ball) -> Self {
        BallRepr { center: b.center.0, radius: b.radius }
    }
}

impl Ball {
    pub fn new(center: Point, radius: Scalar) -> Result<Self> {
        if center.dim() == 0 {
            return Err(Error::invalid("ball centre must have dimension >= 1"));
        }
        if !radius.is_positive() {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> &Scalar {
        &self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Same centre, radius scaled by `kappa > 0`.
    pub fn scaled(&self, kappa: &Scalar) -> Result<Ball> {
        if !kappa.is_positive() {
            return Err(Error::invalid(format!("scale factor must be positive, got {kappa}")));
        }
        Ok(Ball { center: self.center.clone(), radius: kappa * &self.radius })
    }

    /// Closed membership: squared distance to the centre at most `r^2`.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self.center.dist_sq_unchecked(p) <= self.radius.square())
    }

    /// Closed intersection predicate; tangent balls intersect.
    pub fn intersects(&self, other: &Ball) -> Result<bool> {
        check_dim(self.dim(), other.dim())?;
        let sum = &self.radius + &other.radius;
        Ok(self.center.dist_sq_unchecked(&other.center) <= sum.square())
    }

    /// True iff this ball is contained in `B(outer_center, outer_radius)`,
    /// i.e. `dist(centres) + r <= R`. Decided exactly via the squared form
    /// `dist^2 <= (R - r)^2` guarded by the sign of `R - r`.
    pub fn within_enlarged(&self, outer_center: &Point, outer_radius: &Scalar) -> Result<bool> {
        check_dim(self.dim(), outer_center.dim())?;
        let slack = outer_radius - &self.radius;
        if slack.is_negative() {
            return Ok(false);
        }
        Ok(self.center.dist_sq_unchecked(outer_center) <= slack.square())
    }

    /// The interval `[c - r, c + r]` of a one-dimensional ball.
    pub fn to_interval(&self) -> Result<Interval> {
        check_dim(1, self.dim())?;
        let c = self.center.coord(0);
        Interval::new(c - &self.radius, c + &self.radius)
    }

    /// Smallest axis-aligned box containing the ball.
    pub fn bounding_box(&self) -> BoxRegion {
        let lower = Point::new(self.center.coords().iter().map(|c| c - &self.radius).collect());
        let upper = Point::new(self.center.coords().iter().map(|c| c + &self.radius).collect());
        BoxRegion { lower, upper }
    }
}

/// Closed axis-aligned cube `C(x, r)`: centre `x`, half-side `r`,
/// side length `2r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cube {
    center: Point,
    half_side: Scalar,
}

impl Cube {
    pub fn new(center: Point, half_side: Scalar) -> Result<Self> {
        if center.dim() == 0 {
            return Err(Error::invalid("cube centre must have dimension >= 1"));
        }
        if !half_side.is_positive() {
            return Err(Error::invalid(format!("cube half-side must be positive, got {half_side}")));
        }
        Ok(Cube { center, half_side })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn half_side(&self) -> &Scalar {
        &self.half_side
    }

    /// Closed membership: `max_i |p_i - x_i| <= r`.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        check_dim(self.center.dim(), p.dim())?;
        Ok(self
            .center
            .coords()
            .iter()
            .zip(p.coords())
            .all(|(c, x)| (c - x).abs() <= self.half_side))
    }
}

/// Closed axis-aligned box with `lower_i <= upper_i` on every axis.
/// Serves as sampling box, enumeration window and grid region.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Scalar, Scalar)>", into = "Vec<(Scalar, Scalar)>")]
pub struct BoxRegion {
    lower: Point,
    upper: Point,
}

impl TryFrom<Vec<(Scalar, Scalar)>> for BoxRegion {
    type Error = Error;
    fn try_from(axes: Vec<(Scalar, Scalar)>) -> Result<Self> {
        BoxRegion::from_axes(axes)
    }
}

impl From<BoxRegion> for Vec<(Scalar, Scalar)> {
    fn from(b: BoxRegion) -> Self {
        b.lower.0.into_iter().zip(b.upper.0).collect()
    }
}

impl BoxRegion {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        check_dim(lower.dim(), upper.dim())?;
        if lower.dim() == 0 {
            return Err(Error::invalid("box must have dimension >= 1"));
        }
        for (lo, hi) in lower.coords().iter().zip(upper.coords()) {
            if lo > hi {
                return Err(Error::invalid(format!("box axis [{lo}, {hi}] has lo > hi")));
            }
        }
        Ok(BoxRegion { lower, upper })
    }

    pub fn from_axes(axes: Vec<(Scalar, Scalar)>) -> Result<Self> {
        let (lower, upper) = axes.into_iter().unzip();
        BoxRegion::new(Point::new(lower), Point::new(upper))
    }

    /// Unit cube `[0,1]^d`.
    pub fn unit(dim: usize) -> Self {
        let lower = Point::new(vec![Scalar::zero(); dim]);
        let upper = Point::new(vec![Scalar::one(); dim]);
        BoxRegion { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    pub fn axis(&self, i: usize) -> (&Scalar, &Scalar) {
        (self.lower.coord(i), self.upper.coord(i))
    }

    pub fn volume(&self) -> Scalar {
        let mut v = Scalar::one();
        for (lo, hi) in self.lower.coords().iter().zip(self.upper.coords()) {
            v *= &(hi - lo);
        }
        v
    }

    pub fn contains_point(&self, p: &Point) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self
            .lower
            .coords()
            .iter()
            .zip(self.upper.coords())
            .zip(p.coords())
            .all(|((lo, hi), x)| lo <= x && x <= hi))
    }

    /// True iff the whole ball fits inside the box.
    pub fn contains_ball(&self, b: &Ball) -> Result<bool> {
        check_dim(self.dim(), b.dim())?;
        Ok(self
            .lower
            .coords()
            .iter()
            .zip(self.upper.coords())
            .zip(b.center().coords())
            .all(|((lo, hi), c)| &(c - b.radius()) >= lo && &(c + b.radius()) <= hi))
    }

    /// Exact squared distance from a point to the box (zero inside).
    pub fn dist_sq_to(&self, p: &Point) -> Result<Scalar> {
        check_dim(self.dim(), p.dim())?;
        let mut acc = Scalar::zero();
        for ((lo, hi), x) in self.lower.coords().iter().zip(self.upper.coords()).zip(p.coords()) {
            let gap = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                continue;
            };
            acc += &gap.square();
        }
        Ok(acc)
    }
}

/// Per-sample membership flags for the chain
/// `B(x,r) subset C(x,r) subset B(x, sqrt(d) r)`.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionRow {
    pub in_ball: bool,
    pub in_cube: bool,
    /// Membership in the enlarged ball, tested exactly as `dist^2 <= d r^2`.
    pub in_enlarged_ball: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub rows: Vec<InclusionRow>,
    /// Indices of samples violating either implication. Must stay empty.
    pub violations: Vec<usize>,
}

/// Checks both inclusions of the ball/cube sandwich on the given sample
/// points: membership in `B(x,r)` must imply membership in `C(x,r)`, and
/// membership in `C(x,r)` must imply membership in `B(x, sqrt(d) r)`.
pub fn cube_ball_inclusion_check(
    center: &Point,
    radius: &Scalar,
    samples: &[Point],
) -> Result<InclusionReport> {
    if !radius.is_positive() {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let ball = Ball::new(center.clone(), radius.clone())?;
    let cube = Cube::new(center.clone(), radius.clone())?;
    let d = Scalar::from_integer(center.dim() as i64);
    let enlarged_r_sq = &d * &radius.square();

    let mut rows = Vec::with_capacity(samples.len());
    let mut violations = Vec::new();
    for (i, p) in samples.iter().enumerate() {
        let in_ball = ball.contains(p)?;
        let in_cube = cube.contains(p)?;
        let in_enlarged_ball = center.dist_sq(p)? <= enlarged_r_sq;
        if (in_ball && !in_cube) || (in_cube && !in_enlarged_ball) {
            violations.push(i);
        }
        rows.push(InclusionRow { in_ball, in_cube, in_enlarged_ball });
    }
    Ok(InclusionReport { rows, violations })
}

/// On-disk ball-list format:
/// `{"dim": d, "balls": [{"center": ["p/q", ...], "radius": "p/q"}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "BallListRepr", into = "BallListRepr")]
pub struct BallList {
    pub dim: usize,
    pub balls: Vec<Ball>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallListRepr {
    dim: usize,
    balls: Vec<Ball>,
}

impl TryFrom<BallListRepr> for BallList {
    type Error = Error;
    fn try_from(r: BallListRepr) -> Result<Self> {
        for b in &r.balls {
            check_dim(r.dim, b.dim())?;
        }
        Ok(BallList { dim: r.dim, balls: r.balls })
    }
}

impl From<BallList> for BallListRepr {
    fn from(l: BallList) -> Self {
        BallListRepr { dim: l.dim, balls: l.balls }
    }
}

impl BallList {
    pub fn new(dim: usize, balls: Vec<Ball>) -> Result<Self> {
        for b in &balls {
            check_dim(dim, b.dim())?;
        }
        Ok(BallList { dim, balls })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
