//! Continued fractions, convergents, pigeonhole approximation search,
//! bounded-partial-quotient evidence, and the bridge between the cube and
//! ball formulations of badly approximable points over the classical
//! rational-approximation family.
//!
//! Real inputs come in three exactness tiers: exact rationals, exact
//! quadratic surds, and certified rational approximations with an explicit
//! error bound. The first two admit fully exact answers; the third either
//! certifies a result or fails honestly with a precision error.

mod surd;

pub use surd::QuadSurd;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, Scalar};
use crate::systems::ClassicalSystem;

/// A real number at one of three exactness tiers.
#[derive(Clone, Debug)]
pub enum RealInput {
    Rational(Scalar),
    Surd(QuadSurd),
    /// `|true value - value| <= error`, `error > 0`.
    Approx { value: Scalar, error: Scalar },
}

impl RealInput {
    pub fn rational(r: Scalar) -> Self {
        RealInput::Rational(r)
    }

    pub fn surd(s: QuadSurd) -> Self {
        match s.to_rational() {
            Some(r) => RealInput::Rational(r),
            None => RealInput::Surd(s),
        }
    }

    pub fn approx(value: Scalar, error: Scalar) -> Result<Self> {
        if !error.is_positive() {
            return Err(Error::invalid("approximation error bound must be positive"));
        }
        Ok(RealInput::Approx { value, error })
    }

    pub fn as_rational(&self) -> Option<&Scalar> {
        match self {
            RealInput::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            RealInput::Rational(r) => r.to_f64(),
            RealInput::Surd(s) => s.to_f64(),
            RealInput::Approx { value, .. } => value.to_f64(),
        }
    }

    /// Multiplication by a nonnegative integer.
    pub fn times_int(&self, k: &BigInt) -> RealInput {
        match self {
            RealInput::Rational(r) => {
                RealInput::Rational(r * &Scalar::from_integer(k.clone()))
            }
            RealInput::Surd(s) => RealInput::surd(s.mul_int(k)),
            RealInput::Approx { value, error } => {
                let k = Scalar::from_integer(k.clone());
                RealInput::Approx { value: value * &k, error: error * &k.abs() }
            }
        }
    }

    pub fn sub_rational(&self, r: &Scalar) -> RealInput {
        match self {
            RealInput::Rational(v) => RealInput::Rational(v - r),
            RealInput::Surd(s) => RealInput::surd(s.sub_rational(r)),
            RealInput::Approx { value, error } => {
                RealInput::Approx { value: value - r, error: error.clone() }
            }
        }
    }

    /// Certified comparison against a rational. Errors when an approximate
    /// input straddles the target.
    pub fn cmp_rational(&self, target: &Scalar) -> Result<Ordering> {
        match self {
            RealInput::Rational(v) => Ok(v.cmp(target)),
            RealInput::Surd(s) => Ok(s.cmp_rational(target)),
            RealInput::Approx { value, error } => {
                if &(value - error) > target {
                    Ok(Ordering::Greater)
                } else if &(value + error) < target {
                    Ok(Ordering::Less)
                } else {
                    Err(Error::PrecisionInsufficient(format!(
                        "cannot order approx({value} +- {error}) against {target}"
                    )))
                }
            }
        }
    }

    /// Certified `|x| <= bound`.
    pub fn abs_le(&self, bound: &Scalar) -> Result<bool> {
        let above_neg = self.cmp_rational(&-bound)? != Ordering::Less;
        let below_pos = self.cmp_rational(bound)? != Ordering::Greater;
        Ok(above_neg && below_pos)
    }

    /// Certified floor.
    pub fn floor(&self) -> Result<BigInt> {
        match self {
            RealInput::Rational(v) => Ok(v.floor_int()),
            RealInput::Surd(s) => Ok(s.floor()),
            RealInput::Approx { value, error } => {
                let lo = (value - error).floor_int();
                let hi = (value + error).floor_int();
                if lo == hi {
                    Ok(lo)
                } else {
                    Err(Error::PrecisionInsufficient(format!(
                        "floor of approx({value} +- {error}) is ambiguous"
                    )))
                }
            }
        }
    }

    /// Certified nearest integer (`floor(x + 1/2)`).
    pub fn nearest_int(&self) -> Result<BigInt> {
        let half = Scalar::new(1, 2).expect("2 != 0");
        self.sub_rational(&-half).floor()
    }

    /// Rational bracket `lo <= x <= hi`. Surds tighten with `bits`;
    /// approximations cannot.
    pub fn bounds(&self, bits: u32) -> (Scalar, Scalar) {
        match self {
            RealInput::Rational(v) => (v.clone(), v.clone()),
            RealInput::Surd(s) => s.dyadic_bounds(bits),
            RealInput::Approx { value, error } => (value - error, value + error),
        }
    }

    fn refinable(&self) -> bool {
        matches!(self, RealInput::Surd(_))
    }
}

impl fmt::Display for RealInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealInput::Rational(r) => write!(f, "{r}"),
            RealInput::Surd(s) => write!(f, "{s}"),
            RealInput::Approx { value, error } => write!(f, "approx({value}, {error})"),
        }
    }
}

impl FromStr for RealInput {
    type Err = Error;

    /// Literal syntax: `"p/q"` (or decimals / integers),
    /// `"surd(a,b,n,c)"` for `(a + b sqrt(n))/c`, and
    /// `"approx(value, err)"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("surd(").and_then(|t| t.strip_suffix(')')) {
            let parts: Vec<&str> = body.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(Error::parse(format!("surd literal needs 4 fields, got {s:?}")));
            }
            let ints: Vec<BigInt> = parts
                .iter()
                .map(|p| {
                    BigInt::from_str(p).map_err(|e| Error::parse(format!("bad surd field {p:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            return Ok(RealInput::surd(QuadSurd::new(
                ints[0].clone(),
                ints[1].clone(),
                ints[2].clone(),
                ints[3].clone(),
            )?));
        }
        if let Some(body) = s.strip_prefix("approx(").and_then(|t| t.strip_suffix(')')) {
            let parts: Vec<&str> = body.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::parse(format!("approx literal needs 2 fields, got {s:?}")));
            }
            return RealInput::approx(parts[0].parse()?, parts[1].parse()?);
        }
        Ok(RealInput::Rational(s.parse()?))
    }
}

/// Termination state of a continued-fraction expansion.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfStatus {
    /// Rational input: the expansion is complete.
    Terminated,
    /// Quadratic irrational: the tail repeats with the given period; the
    /// stored partials are filled to the requested depth by cycling it.
    Periodic { preperiod: usize, period: usize },
    /// Stopped at the requested depth (or at the certified prefix of an
    /// approximate input) without terminating.
    Truncated,
}

/// Simple continued fraction `[a0; a1, a2, ...]` with all partials >= 1.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ContinuedFraction {
    #[serde(serialize_with = "ser_bigint")]
    pub a0: BigInt,
    #[serde(serialize_with = "ser_bigint_vec")]
    pub partials: Vec<BigInt>,
    pub status: CfStatus,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_bigint_vec<S: serde::Serializer>(
    xs: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

fn ser_bigint_opt<S: serde::Serializer>(
    x: &Option<BigInt>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl ContinuedFraction {
    /// Largest partial quotient after `a0`; `None` when there are none.
    pub fn max_partial(&self) -> Option<&BigInt> {
        self.partials.iter().max()
    }
}

/// Convergent `p/q` of a continued fraction, always in lowest terms.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Convergent {
    #[serde(serialize_with = "ser_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> Scalar {
        Scalar::new(self.p.clone(), self.q.clone()).expect("q >= 1")
    }
}

/// Expands `x` to at most `depth` partial quotients after the integer
/// part. Rational inputs terminate; quadratic surds detect their period
/// and fill the requested depth by cycling it; approximate inputs certify
/// each partial from the error interval or fail with the certified prefix.
pub fn cf_expand(x: &RealInput, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::invalid("depth must be >= 1"));
    }
    match x {
        RealInput::Rational(r) => Ok(cf_expand_rational(r, depth)),
        RealInput::Surd(s) => match s.to_rational() {
            Some(r) => Ok(cf_expand_rational(&r, depth)),
            None => Ok(cf_expand_surd(s, depth)),
        },
        RealInput::Approx { value, error } => {
            cf_expand_interval(value - error, value + error, depth)
        }
    }
}

fn cf_expand_rational(x: &Scalar, depth: usize) -> ContinuedFraction {
    let a0 = x.floor_int();
    let mut rem = x - &Scalar::from_integer(a0.clone());
    let mut partials = Vec::new();
    let mut status = CfStatus::Terminated;
    while !rem.is_zero() {
        if partials.len() == depth {
            status = CfStatus::Truncated;
            break;
        }
        let inv = rem.recip().expect("nonzero");
        let a = inv.floor_int();
        partials.push(a.clone());
        rem = inv - Scalar::from_integer(a);
    }
    ContinuedFraction { a0, partials, status }
}

/// Exact floor of `(p + sqrt(d)) / q` for non-square `d > 0`, any sign of
/// `q != 0`, by refining an integer bracket of `sqrt(d)`.
fn floor_pqa(p: &BigInt, d: &BigInt, q: &BigInt) -> BigInt {
    let mut bits = 8u32;
    loop {
        let scaled = d << (2 * bits);
        let s = scaled.sqrt();
        // sqrt(d) in (s/2^bits, (s+1)/2^bits) strictly (d non-square).
        let pow = BigInt::one() << bits;
        let num_lo = p * &pow + &s;
        let num_hi = p * &pow + &s + 1;
        let den = q * &pow;
        let (lo, hi) = if q.is_positive() {
            (
                Scalar::new(num_lo, den.clone()).expect("den nonzero"),
                Scalar::new(num_hi, den).expect("den nonzero"),
            )
        } else {
            (
                Scalar::new(num_hi, den.clone()).expect("den nonzero"),
                Scalar::new(num_lo, den).expect("den nonzero"),
            )
        };
        let flo = lo.floor_int();
        let fhi = hi.floor_int();
        if flo == fhi {
            return flo;
        }
        bits *= 2;
    }
}

fn cf_expand_surd(x: &QuadSurd, depth: usize) -> ContinuedFraction {
    // Normalise to (P + sqrt(D))/Q with Q | D - P^2.
    let (mut p, mut d, mut q) = x.pqa_parts();
    if !((&d - &p * &p) % &q).is_zero() {
        let qa = q.abs();
        p *= &qa;
        d *= &qa * &qa;
        q *= &qa;
    }

    let a0 = floor_pqa(&p, &d, &q);
    let mut partials: Vec<BigInt> = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut ak = a0.clone();
    let mut periodic: Option<(usize, usize)> = None;

    while partials.len() < depth {
        // State producing partial a_{k+1}.
        p = &ak * &q - &p;
        q = (&d - &p * &p) / &q;
        let key = (p.clone(), q.clone());
        let next_index = partials.len() + 1;
        if let Some(&first) = seen.get(&key) {
            periodic = Some((first - 1, next_index - first));
            break;
        }
        seen.insert(key, next_index);
        ak = floor_pqa(&p, &d, &q);
        partials.push(ak.clone());
    }

    match periodic {
        Some((preperiod, period)) => {
            // Fill to the requested depth by cycling the detected period.
            while partials.len() < depth {
                let idx = preperiod + (partials.len() - preperiod) % period;
                partials.push(partials[idx].clone());
            }
            ContinuedFraction { a0, partials, status: CfStatus::Periodic { preperiod, period } }
        }
        None => ContinuedFraction { a0, partials, status: CfStatus::Truncated },
    }
}

fn cf_expand_interval(lo: Scalar, hi: Scalar, depth: usize) -> Result<ContinuedFraction> {
    debug_assert!(lo <= hi);
    let mut certified: Vec<BigInt> = Vec::new();
    let mut lo = lo;
    let mut hi = hi;
    loop {
        let flo = lo.floor_int();
        let fhi = hi.floor_int();
        if flo != fhi {
            return Err(Error::CfPrecision {
                detail: format!(
                    "next term is ambiguous on [{lo}, {hi}] after {} certified terms",
                    certified.len()
                ),
                certified,
            });
        }
        certified.push(flo.clone());
        if certified.len() > depth {
            break;
        }
        let f = Scalar::from_integer(flo);
        let frac_lo = &lo - &f;
        let frac_hi = &hi - &f;
        if frac_hi.is_zero() {
            // The value is exactly this integer tail: terminate.
            let a0 = certified.remove(0);
            return Ok(ContinuedFraction { a0, partials: certified, status: CfStatus::Terminated });
        }
        if frac_lo.is_zero() {
            // Could terminate here or continue; not certifiable.
            return Err(Error::CfPrecision {
                detail: format!(
                    "cannot certify termination at term {} (interval touches an integer)",
                    certified.len()
                ),
                certified,
            });
        }
        // Reciprocal flips the interval.
        let next_lo = frac_hi.recip().expect("positive");
        let next_hi = frac_lo.recip().expect("positive");
        lo = next_lo;
        hi = next_hi;
    }
    let a0 = certified.remove(0);
    Ok(ContinuedFraction { a0, partials: certified, status: CfStatus::Truncated })
}

/// Convergents of the stored prefix via the standard recurrence
/// `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}`.
pub fn convergents(cf: &ContinuedFraction) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(cf.partials.len() + 1);
    let (mut p_prev2, mut q_prev2) = (BigInt::one(), BigInt::zero());
    let (mut p_prev, mut q_prev) = (cf.a0.clone(), BigInt::one());
    out.push(Convergent { p: p_prev.clone(), q: q_prev.clone() });
    for a in &cf.partials {
        let p = a * &p_prev + &p_prev2;
        let q = a * &q_prev + &q_prev2;
        p_prev2 = std::mem::replace(&mut p_prev, p.clone());
        q_prev2 = std::mem::replace(&mut q_prev, q.clone());
        out.push(Convergent { p, q });
    }
    out
}

/// A verified simultaneous-approximation witness.
#[derive(Clone, Debug, Serialize)]
pub struct DirichletWitness {
    pub q: u64,
    #[serde(serialize_with = "ser_bigint_vec")]
    pub p: Vec<BigInt>,
    /// The bound `1/Q` that the residuals satisfy.
    pub q_limit: u64,
}

/// Exhaustive pigeonhole search: the smallest `q` in `1..Q^d` whose
/// nearest-integer vector satisfies `max_i |q alpha_i - p_i| <= 1/Q`.
/// Existence is guaranteed, so exhaustion on exact inputs raises an
/// internal error.
pub fn dirichlet_search(alpha: &[RealInput], q_limit: u64) -> Result<DirichletWitness> {
    if alpha.is_empty() {
        return Err(Error::invalid("alpha must have dimension >= 1"));
    }
    if q_limit < 2 {
        return Err(Error::invalid("Q must be at least 2"));
    }
    let d = alpha.len() as u32;
    let bound = q_limit
        .checked_pow(d)
        .ok_or_else(|| Error::invalid(format!("search bound {q_limit}^{d} overflows")))?;
    let tolerance = Scalar::new(1, BigInt::from(q_limit)).expect("Q >= 2");

    for q in 1..bound {
        let qi = BigInt::from(q);
        let mut p = Vec::with_capacity(alpha.len());
        let mut ok = true;
        for a in alpha {
            let scaled = a.times_int(&qi);
            let pi = scaled.nearest_int()?;
            let residual = scaled.sub_rational(&Scalar::from_integer(pi.clone()));
            if !residual.abs_le(&tolerance)? {
                ok = false;
                break;
            }
            p.push(pi);
        }
        if ok {
            return Ok(DirichletWitness { q, p, q_limit });
        }
    }
    Err(Error::internal(format!(
        "no approximation witness below {bound}; the pigeonhole bound guarantees one"
    )))
}

/// Verdict of a bounded-partial-quotient evidence report.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BadVerdict {
    /// Eventually periodic expansion: the quotients are provably bounded.
    BoundedEvidence,
    /// The input is rational; the analysis does not apply.
    Rational,
    /// Truncated prefix: the running maximum is evidence only.
    InconclusiveTruncated,
}

#[derive(Clone, Debug, Serialize)]
pub struct BadReport {
    pub cf: ContinuedFraction,
    /// Largest partial quotient over the certified prefix.
    #[serde(serialize_with = "ser_bigint_opt")]
    pub max_partial: Option<BigInt>,
    pub prefix_len: usize,
    pub verdict: BadVerdict,
}

/// Reports the maximum partial quotient of the certified prefix and
/// whether boundedness is proved (periodic), refuted-as-inapplicable
/// (rational) or open (truncated). Never claims unboundedness.
pub fn bad_report(x: &RealInput, depth: usize) -> Result<BadReport> {
    let cf = cf_expand(x, depth)?;
    let verdict = match cf.status {
        CfStatus::Terminated => BadVerdict::Rational,
        CfStatus::Periodic { .. } => BadVerdict::BoundedEvidence,
        CfStatus::Truncated => BadVerdict::InconclusiveTruncated,
    };
    Ok(BadReport {
        max_partial: cf.max_partial().cloned(),
        prefix_len: cf.partials.len(),
        verdict,
        cf,
    })
}

/// Per-condition survival data for [`classical_bad_bridge`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeVerdict {
    /// All coordinates rational: never badly approximable.
    RationalNotBad,
    SurvivesToBound,
    Hit,
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    pub dim: usize,
    pub kappa: Scalar,
    pub index_bound: u64,
    pub checked: u64,
    /// Ball form: `alpha` outside `B(p/q, kappa sqrt(d)/q^{1+1/d})` for
    /// every enumerated pair.
    pub ball_survives: bool,
    pub ball_first_hit: Option<u64>,
    /// Cube form: `max_i |alpha_i - p_i/q| > kappa / q^{1+1/d}` for every
    /// enumerated pair.
    pub cube_survives: bool,
    pub cube_first_hit: Option<u64>,
    /// Pairs where the ball condition survived but the cube condition was
    /// hit. The cube sits inside the enlarged ball, so this must stay 0.
    pub implication_violations: u64,
    pub verdict: BridgeVerdict,
}

const BRIDGE_MAX_BITS: u32 = 4096;

/// Evaluates both badly-approximable formulations over the classical
/// family up to `index_bound`: the cube condition
/// `max_i |alpha_i - p_i/q| > kappa/q^{1+1/d}` and the ball condition
/// `alpha outside B(p/q, kappa sqrt(d)/q^{1+1/d})`, and verifies per pair
/// that surviving the ball implies surviving the cube.
pub fn classical_bad_bridge(
    alpha: &[RealInput],
    kappa: &Scalar,
    index_bound: u64,
    window: BoxRegion,
) -> Result<BridgeReport> {
    if alpha.is_empty() {
        return Err(Error::invalid("alpha must have dimension >= 1"));
    }
    if !kappa.is_positive() {
        return Err(Error::invalid("kappa must be positive"));
    }
    let dim = alpha.len();
    let system = ClassicalSystem::new(dim as u32, window)?;
    let rational_input = alpha.iter().all(|a| a.as_rational().is_some());

    let d = dim as u32;
    let kappa_2d = kappa.pow(2 * d);
    let ball_rhs_base = &kappa_2d * &Scalar::from_integer(BigInt::from(d).pow(d));

    let mut ball_first_hit = None;
    let mut cube_first_hit = None;
    let mut implication_violations = 0u64;
    let mut checked = 0u64;
    let mut index = 0u64;

    'scan: for q in 1u64.. {
        let q_pow = Scalar::from_integer(BigInt::from(q).pow(2 * (d + 1)));
        for center in system.centers_for_q(q) {
            index += 1;
            if index > index_bound {
                break 'scan;
            }
            checked += 1;

            // Residuals y_i = alpha_i - p_i/q.
            let residuals: Vec<RealInput> = alpha
                .iter()
                .zip(center.coords())
                .map(|(a, c)| a.sub_rational(c))
                .collect();

            // Ball hit: (dist^2)^d q^{2(d+1)} <= kappa^{2d} d^d.
            let ball_hit = cleared_le(&residuals, true, d, &q_pow, &ball_rhs_base)?;
            // Cube hit: (max y_i^2)^d q^{2(d+1)} <= kappa^{2d}.
            let cube_hit = cleared_le(&residuals, false, d, &q_pow, &kappa_2d)?;

            if ball_hit && ball_first_hit.is_none() {
                ball_first_hit = Some(index);
            }
            if cube_hit && cube_first_hit.is_none() {
                cube_first_hit = Some(index);
            }
            if !ball_hit && cube_hit {
                implication_violations += 1;
            }
        }
    }

    let ball_survives = ball_first_hit.is_none();
    let cube_survives = cube_first_hit.is_none();
    let verdict = if rational_input {
        BridgeVerdict::RationalNotBad
    } else if ball_survives {
        BridgeVerdict::SurvivesToBound
    } else {
        BridgeVerdict::Hit
    };
    Ok(BridgeReport {
        dim,
        kappa: kappa.clone(),
        index_bound,
        checked,
        ball_survives,
        ball_first_hit,
        cube_survives,
        cube_first_hit,
        implication_violations,
        verdict,
    })
}

/// Decides `lhs <= rhs_base` with `lhs = (agg of residuals^2)^d * q_pow`,
/// where the aggregate is the sum (ball form) or maximum (cube form) of
/// the squared residuals. Exact whenever the residuals live in rationals
/// or one shared quadratic field; certified interval refinement otherwise.
fn cleared_le(
    residuals: &[RealInput],
    sum_aggregate: bool,
    d: u32,
    q_pow: &Scalar,
    rhs_base: &Scalar,
) -> Result<bool> {
    // Exact path: all residuals rational or same-field surds.
    if let Some(agg) = exact_square_aggregate(residuals, sum_aggregate)? {
        let mut powered = QuadSurd::from_rational(&Scalar::one());
        for _ in 0..d {
            powered = powered.mul_same_field(&agg)?;
        }
        let lhs = powered.mul_rational(q_pow);
        return Ok(lhs.cmp_rational(rhs_base) != Ordering::Greater);
    }

    // Interval path with refinement for surd coordinates.
    let mut bits = 64u32;
    loop {
        let mut agg_lo = Scalar::zero();
        let mut agg_hi = Scalar::zero();
        for (k, r) in residuals.iter().enumerate() {
            let (lo, hi) = r.bounds(bits);
            // Square of an interval possibly containing 0.
            let (sq_lo, sq_hi) = if !lo.is_negative() {
                (lo.square(), hi.square())
            } else if !hi.is_positive() {
                (hi.square(), lo.square())
            } else {
                (Scalar::zero(), lo.square().max(hi.square()))
            };
            if sum_aggregate {
                agg_lo += &sq_lo;
                agg_hi += &sq_hi;
            } else if k == 0 {
                agg_lo = sq_lo;
                agg_hi = sq_hi;
            } else {
                agg_lo = agg_lo.max(sq_lo);
                agg_hi = agg_hi.max(sq_hi);
            }
        }
        let lhs_lo = agg_lo.pow(d) * q_pow;
        let lhs_hi = agg_hi.pow(d) * q_pow;
        if &lhs_hi <= rhs_base {
            return Ok(true);
        }
        if &lhs_lo > rhs_base {
            return Ok(false);
        }
        if bits >= BRIDGE_MAX_BITS || !residuals.iter().any(RealInput::refinable) {
            return Err(Error::PrecisionInsufficient(format!(
                "cannot resolve comparison at {bits} bits of refinement"
            )));
        }
        bits *= 2;
    }
}

/// Sum or max of squared residuals as a single-field surd, when all
/// residuals are rational or share one radicand. `None` when mixed.
fn exact_square_aggregate(
    residuals: &[RealInput],
    sum_aggregate: bool,
) -> Result<Option<QuadSurd>> {
    let mut squares: Vec<QuadSurd> = Vec::with_capacity(residuals.len());
    for r in residuals {
        match r {
            RealInput::Rational(v) => squares.push(QuadSurd::from_rational(&v.square())),
            RealInput::Surd(s) => squares.push(s.square()),
            RealInput::Approx { .. } => return Ok(None),
        }
    }
    let mut acc = squares[0].clone();
    for s in &squares[1..] {
        if sum_aggregate {
            match acc.add_same_field(s) {
                Ok(v) => acc = v,
                Err(_) => return Ok(None), // mixed radicands: fall back
            }
        } else {
            match acc.cmp_same_field(s) {
                Ok(Ordering::Less) => acc = s.clone(),
                Ok(_) => {}
                Err(_) => return Ok(None),
            }
        }
    }
    Ok(Some(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{int, rat};

    fn sqrt2() -> RealInput {
        RealInput::surd(QuadSurd::new(0, 1, 2, 1).unwrap())
    }

    fn golden() -> RealInput {
        RealInput::surd(QuadSurd::new(1, 1, 5, 2).unwrap())
    }

    /// e truncated to 60 decimal digits; the truncation error is below 1e-60.
    fn e_approx() -> RealInput {
        let value: Scalar =
            "2.718281828459045235360287471352662497757247093699959574966967"
                .parse()
                .unwrap();
        let error = Scalar::new(1u32, BigInt::from(10u32).pow(60)).unwrap();
        RealInput::approx(value, error).unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn cf_of_355_over_113() {
        let cf = cf_expand(&RealInput::Rational(rat(355, 113)), 10).unwrap();
        assert_eq!(cf.a0, big(3));
        assert_eq!(cf.partials, vec![big(7), big(16)]);
        assert_eq!(cf.status, CfStatus::Terminated);
    }

    #[test]
    fn cf_of_sqrt2_is_periodic() {
        let cf = cf_expand(&sqrt2(), 5).unwrap();
        assert_eq!(cf.a0, big(1));
        assert_eq!(cf.partials, vec![big(2); 5]);
        assert_eq!(cf.status, CfStatus::Periodic { preperiod: 0, period: 1 });
    }

    #[test]
    fn cf_of_golden_ratio() {
        let cf = cf_expand(&golden(), 50).unwrap();
        assert_eq!(cf.a0, big(1));
        assert_eq!(cf.partials, vec![big(1); 50]);
        assert!(matches!(cf.status, CfStatus::Periodic { period: 1, .. }));
    }

    #[test]
    fn cf_of_certified_e_prefix() {
        let cf = cf_expand(&e_approx(), 11).unwrap();
        assert_eq!(cf.a0, big(2));
        assert_eq!(
            cf.partials,
            [1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8].map(big).to_vec()
        );
        assert_eq!(cf.status, CfStatus::Truncated);
    }

    #[test]
    fn cf_precision_failure_carries_prefix() {
        // Interval [0, 1]: even the integer part is ambiguous.
        let x = RealInput::approx(rat(1, 2), rat(1, 2)).unwrap();
        match cf_expand(&x, 5) {
            Err(Error::CfPrecision { certified, .. }) => assert!(certified.is_empty()),
            other => panic!("expected precision error, got {other:?}"),
        }
        // Rational-valued approximations stay ambiguous forever at the
        // term where the remainder hits an integer boundary exactly.
        let half = RealInput::approx(rat(1, 2), rat(1, 1_000_000)).unwrap();
        match cf_expand(&half, 5) {
            Err(Error::CfPrecision { certified, .. }) => assert_eq!(certified, vec![big(0)]),
            other => panic!("expected precision error, got {other:?}"),
        }
        // An interval clear of boundaries certifies its prefix.
        let y = RealInput::approx(rat(618, 1000), rat(1, 1000)).unwrap();
        let cf = cf_expand(&y, 1).unwrap();
        assert_eq!(cf.a0, big(0));
        assert_eq!(cf.partials, vec![big(1)]);
    }

    #[test]
    fn convergents_of_sqrt2_prefix() {
        let cf = cf_expand(&sqrt2(), 3).unwrap();
        let convs = convergents(&cf);
        let expect = [(1, 1), (3, 2), (7, 5), (17, 12)];
        assert_eq!(convs.len(), expect.len());
        for (c, (p, q)) in convs.iter().zip(expect) {
            assert_eq!((c.p.clone(), c.q.clone()), (big(p), big(q)));
        }
    }

    #[test]
    fn convergents_of_pi_approximation() {
        let cf = ContinuedFraction {
            a0: big(3),
            partials: vec![big(7), big(16)],
            status: CfStatus::Terminated,
        };
        let convs = convergents(&cf);
        assert_eq!(convs[0].value(), int(3));
        assert_eq!(convs[1].value(), rat(22, 7));
        assert_eq!(convs[2].value(), rat(355, 113));
    }

    #[test]
    fn convergent_of_bare_integer() {
        let cf = cf_expand(&RealInput::Rational(int(-4)), 3).unwrap();
        let convs = convergents(&cf);
        assert_eq!(convs.len(), 1);
        assert_eq!(convs[0].value(), int(-4));
    }

    #[test]
    fn rational_round_trip() {
        for (p, q) in [(355, 113), (1, 7), (-22, 7), (100, 99), (17, 1)] {
            let x = rat(p, q);
            let cf = cf_expand(&RealInput::Rational(x.clone()), 100).unwrap();
            assert_eq!(cf.status, CfStatus::Terminated);
            let last = convergents(&cf).pop().unwrap();
            assert_eq!(last.value(), x);
        }
    }

    #[test]
    fn convergent_quality_for_surds() {
        // |alpha - p_k/q_k| < 1/(q_k q_{k+1}), checked exactly.
        for alpha in [sqrt2(), golden()] {
            let surd = match &alpha {
                RealInput::Surd(s) => s.clone(),
                _ => unreachable!(),
            };
            let cf = cf_expand(&alpha, 20).unwrap();
            let convs = convergents(&cf);
            for k in 0..convs.len() - 1 {
                let diff = surd.sub_rational(&convs[k].value()).abs();
                let bound = Scalar::new(1, &convs[k].q * &convs[k + 1].q).unwrap();
                assert_eq!(diff.cmp_rational(&bound), std::cmp::Ordering::Less);
            }
        }
    }

    #[test]
    fn dirichlet_sqrt2() {
        let w = dirichlet_search(&[sqrt2()], 3).unwrap();
        assert_eq!(w.q, 2);
        assert_eq!(w.p, vec![big(3)]);
    }

    #[test]
    fn dirichlet_rational_hit() {
        let w = dirichlet_search(&[RealInput::Rational(rat(1, 3))], 10).unwrap();
        assert_eq!(w.q, 3);
        assert_eq!(w.p, vec![big(1)]);
    }

    #[test]
    fn dirichlet_simultaneous() {
        let alpha = vec![sqrt2(), RealInput::surd(QuadSurd::new(0, 1, 3, 1).unwrap())];
        let w = dirichlet_search(&alpha, 2).unwrap();
        assert_eq!(w.q, 1);
        assert_eq!(w.p, vec![big(1), big(2)]);
    }

    #[test]
    fn dirichlet_rejects_bad_q() {
        assert!(dirichlet_search(&[sqrt2()], 1).is_err());
        assert!(dirichlet_search(&[], 5).is_err());
    }

    #[test]
    fn dirichlet_witness_reverifies() {
        // Re-verify the claimed inequality independently, exactly.
        for (num, den) in [(1, 7), (22, 71), (5, 8)] {
            let alpha = RealInput::Rational(rat(num, den));
            for q_limit in 2..20u64 {
                let w = dirichlet_search(&[alpha.clone()], q_limit).unwrap();
                assert!(w.q < q_limit.pow(1));
                let residual = rat(num, den) * Scalar::from(w.q)
                    - Scalar::from_integer(w.p[0].clone());
                assert!(residual.abs() <= Scalar::new(1, BigInt::from(q_limit)).unwrap());
            }
        }
    }

    #[test]
    fn bad_report_verdicts() {
        let g = bad_report(&golden(), 100).unwrap();
        assert_eq!(g.verdict, BadVerdict::BoundedEvidence);
        assert_eq!(g.max_partial, Some(big(1)));

        let s = bad_report(&sqrt2(), 100).unwrap();
        assert_eq!(s.verdict, BadVerdict::BoundedEvidence);
        assert_eq!(s.max_partial, Some(big(2)));

        let r = bad_report(&RealInput::Rational(rat(355, 113)), 100).unwrap();
        assert_eq!(r.verdict, BadVerdict::Rational);

        let e = bad_report(&e_approx(), 12).unwrap();
        assert_eq!(e.verdict, BadVerdict::InconclusiveTruncated);
        assert_eq!(e.max_partial, Some(big(8)));
    }

    #[test]
    fn bad_report_max_monotone_in_depth() {
        let mut last = big(0);
        for depth in [2, 4, 8, 16, 32] {
            let r = bad_report(&e_approx(), depth).unwrap();
            let m = r.max_partial.unwrap();
            assert!(m >= last);
            last = m;
        }
    }

    #[test]
    fn bridge_golden_ratio_survives() {
        // (sqrt(5) - 1)/2 with kappa = 1/5 survives both formulations.
        let alpha = RealInput::surd(QuadSurd::new(-1, 1, 5, 2).unwrap());
        let report = classical_bad_bridge(
            &[alpha],
            &rat(1, 5),
            2000,
            crate::geometry::BoxRegion::unit(1),
        )
        .unwrap();
        assert!(report.ball_survives);
        assert!(report.cube_survives);
        assert_eq!(report.implication_violations, 0);
        assert_eq!(report.verdict, BridgeVerdict::SurvivesToBound);
    }

    #[test]
    fn bridge_rational_center_is_hit() {
        let report = classical_bad_bridge(
            &[RealInput::Rational(rat(1, 2))],
            &rat(1, 2),
            100,
            crate::geometry::BoxRegion::unit(1),
        )
        .unwrap();
        assert_eq!(report.verdict, BridgeVerdict::RationalNotBad);
        assert!(!report.ball_survives);
        assert_eq!(report.implication_violations, 0);
    }

    #[test]
    fn bridge_two_dimensional_mixed_field() {
        // One surd coordinate and one rational coordinate stay exact.
        let alpha = vec![
            RealInput::surd(QuadSurd::new(0, 1, 2, 2).unwrap()),
            RealInput::Rational(rat(1, 3)),
        ];
        let report = classical_bad_bridge(
            &alpha,
            &rat(1, 4),
            200,
            crate::geometry::BoxRegion::unit(2),
        )
        .unwrap();
        assert_eq!(report.implication_violations, 0);
        assert_eq!(report.checked, 200);
    }

    #[test]
    fn real_input_parsing() {
        assert!(matches!("3/4".parse::<RealInput>().unwrap(), RealInput::Rational(_)));
        assert!(matches!("surd(1,1,5,2)".parse::<RealInput>().unwrap(), RealInput::Surd(_)));
        // A surd that is secretly rational normalises to the rational tier.
        assert!(matches!("surd(1,2,4,2)".parse::<RealInput>().unwrap(), RealInput::Rational(_)));
        let a = "approx(0.5, 1/1000)".parse::<RealInput>().unwrap();
        assert!(matches!(a, RealInput::Approx { .. }));
        assert!("surd(1,2)".parse::<RealInput>().is_err());
        assert!("approx(0.5, 0)".parse::<RealInput>().is_err());
        assert!("".parse::<RealInput>().is_err());
    }

    #[test]
    fn nearest_int_and_abs_le() {
        assert_eq!(sqrt2().nearest_int().unwrap(), big(1));
        assert_eq!(sqrt2().times_int(&big(2)).nearest_int().unwrap(), big(3));
        assert!(sqrt2()
            .sub_rational(&rat(3, 2))
            .abs_le(&rat(1, 10))
            .unwrap());
        let fuzzy = RealInput::approx(rat(1, 10), rat(1, 10)).unwrap();
        assert!(fuzzy.abs_le(&rat(1, 4)).unwrap());
        assert!(fuzzy.abs_le(&rat(3, 20)).is_err());
    }
}
