//! Lebesgue-measure estimation and exact coverage experiments.
//!
//! Monte Carlo estimates draw sample coordinates as exact rationals with
//! denominator 2^64 from a seeded ChaCha stream, so every membership test
//! runs through the same exact predicates as the rest of the crate; only
//! the reported confidence interval is floating point. Estimates carry
//! 99% two-sided Hoeffding half-widths (distribution-free) and are
//! bit-reproducible from their seed. Sampling is chunked with per-chunk
//! seeds derived by fixed splitting, so results are independent of how
//! many threads evaluate the chunks.

use num_bigint::BigInt;
use num_traits::One;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Ball, BoxRegion, Interval, IntervalUnion, Point, Scalar};
use crate::systems::{BallSystem, SurvivorParams, SystemBall};

/// Two-sided confidence level of every reported half-width.
pub const CONFIDENCE: f64 = 0.99;

/// Hoeffding half-width for a hit fraction at [`CONFIDENCE`]:
/// `sqrt(ln(2/alpha) / (2 n))`.
pub fn hoeffding_half_width(samples: u64) -> f64 {
    ((2.0 / (1.0 - CONFIDENCE)).ln() / (2.0 * samples as f64)).sqrt()
}

/// A seeded Monte Carlo measure estimate.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureEstimate {
    /// Hit fraction times reference volume, as a float read-out.
    pub value: f64,
    /// The same quantity as an exact rational.
    pub value_exact: Scalar,
    /// 99% Hoeffding half-width scaled by the reference volume.
    pub ci_half_width: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
}

const CHUNK: u64 = 8192;

/// Fixed seed split: chunk `i` of a run seeded `master` draws from an
/// independent ChaCha stream seeded by `splitmix(master, i)`.
fn chunk_seed(master: u64, chunk: u64) -> u64 {
    let mut z = master.wrapping_add((chunk + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One uniform rational sample in the box: each coordinate is
/// `lo + span * k / 2^64` for a fresh 64-bit draw `k`.
fn sample_point(rng: &mut ChaCha8Rng, lows: &[Scalar], spans: &[Scalar]) -> Point {
    let denom: BigInt = BigInt::one() << 64;
    let coords = lows
        .iter()
        .zip(spans)
        .map(|(lo, span)| {
            let k = rng.next_u64();
            let t = Scalar::new(BigInt::from(k), denom.clone()).expect("2^64 != 0");
            lo + &(span * &t)
        })
        .collect();
    Point::new(coords)
}

fn box_axes(sample_box: &BoxRegion) -> (Vec<Scalar>, Vec<Scalar>) {
    let mut lows = Vec::with_capacity(sample_box.dim());
    let mut spans = Vec::with_capacity(sample_box.dim());
    for a in 0..sample_box.dim() {
        let (lo, hi) = sample_box.axis(a);
        lows.push(lo.clone());
        spans.push(hi - lo);
    }
    (lows, spans)
}

fn count_chunk_hits(
    balls: &[Ball],
    lows: &[Scalar],
    spans: &[Scalar],
    seed: u64,
    chunk: u64,
    len: u64,
) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, chunk));
    let mut hits = 0;
    for _ in 0..len {
        let p = sample_point(&mut rng, lows, spans);
        if balls.iter().any(|b| b.contains(&p).expect("dims agree")) {
            hits += 1;
        }
    }
    hits
}

/// Monte Carlo measure of a finite ball union inside a sampling box that
/// must contain every ball. Requires at least 1000 samples.
pub fn mc_union_measure(
    balls: &[Ball],
    sample_box: &BoxRegion,
    samples: u64,
    seed: u64,
) -> Result<MeasureEstimate> {
    mc_union_measure_threaded(balls, sample_box, samples, seed, 1)
}

/// As [`mc_union_measure`], evaluating sample chunks on `threads` worker
/// threads. The result is bit-identical for every thread count.
pub fn mc_union_measure_threaded(
    balls: &[Ball],
    sample_box: &BoxRegion,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<MeasureEstimate> {
    if samples < 1000 {
        return Err(Error::invalid(format!("need at least 1000 samples, got {samples}")));
    }
    for b in balls {
        if !sample_box.contains_ball(b)? {
            return Err(Error::invalid(format!(
                "sampling box does not contain the ball centred at index radius {}",
                b.radius()
            )));
        }
    }
    let threads = threads.max(1);
    let (lows, spans) = box_axes(sample_box);
    let n_chunks = samples.div_ceil(CHUNK);
    let chunk_len = |c: u64| -> u64 {
        if c + 1 == n_chunks && samples % CHUNK != 0 {
            samples % CHUNK
        } else {
            CHUNK
        }
    };

    let hits: u64 = if threads == 1 {
        (0..n_chunks)
            .map(|c| count_chunk_hits(balls, &lows, &spans, seed, c, chunk_len(c)))
            .sum()
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(threads);
            for worker in 0..threads as u64 {
                let lows = &lows;
                let spans = &spans;
                handles.push(scope.spawn(move || {
                    let mut acc = 0u64;
                    let mut c = worker;
                    while c < n_chunks {
                        acc += count_chunk_hits(balls, lows, spans, seed, c, chunk_len(c));
                        c += threads as u64;
                    }
                    acc
                }));
            }
            handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
        })
    };

    let volume = sample_box.volume();
    let value_exact =
        &volume * &(Scalar::from(hits) / Scalar::from(samples));
    Ok(MeasureEstimate {
        value: value_exact.to_f64(),
        value_exact,
        ci_half_width: hoeffding_half_width(samples) * volume.to_f64(),
        samples,
        hits,
        seed,
    })
}

/// Collects the `kappa`-scaled balls of `system` with indices in
/// `[start, index_bound]` as exact 1-D intervals.
fn scaled_tail_union_1d(
    system: &BallSystem,
    kappa: &Scalar,
    start: u64,
    index_bound: u64,
) -> Result<IntervalUnion> {
    let mut intervals = Vec::new();
    for (_, ball) in system.iter_range(start, index_bound) {
        let b = ball
            .to_ball()
            .ok_or_else(|| Error::internal("one-dimensional system ball must be rational"))?;
        let c = b.center().coord(0);
        let r = kappa * b.radius();
        intervals.push(Interval::new(c - &r, c + &r)?);
    }
    Ok(IntervalUnion::from_intervals(intervals))
}

/// Exact fraction of `region` covered by the union of `kappa`-scaled balls
/// with indices in `[start, index_bound]` of a one-dimensional system.
pub fn coverage_fraction_1d_exact(
    system: &BallSystem,
    kappa: &Scalar,
    start: u64,
    index_bound: u64,
    region: &Interval,
) -> Result<Scalar> {
    if system.dimension() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: system.dimension() });
    }
    if !kappa.is_positive() {
        return Err(Error::invalid("kappa must be positive"));
    }
    let region_measure = region.measure();
    if !region_measure.is_positive() {
        return Err(Error::invalid("region must have positive length"));
    }
    let union = scaled_tail_union_1d(system, kappa, start.max(1), index_bound)?;
    Ok(union.clip(region).measure() / region_measure)
}

/// Exact survivor fraction over a regular grid.
#[derive(Clone, Debug, Serialize)]
pub struct GridSurvivorReport {
    pub resolution: u64,
    pub total_points: u64,
    pub survivors: u64,
    /// Exact `survivors / total_points`.
    pub surviving_fraction: Scalar,
    pub tail_start: u64,
    pub shrink_denom: u64,
    pub index_bound: u64,
}

/// Evaluates survival of every point of a regular grid over `region`:
/// a point survives iff it avoids the `1/M`-scaled ball `i` for every
/// index `i` in `[tail_start, index_bound]`. Grid coordinates are the
/// exact rationals `lo + (hi - lo) k / resolution`, `k = 0..resolution-1`,
/// so survival is exactly decidable and the fraction is an exact rational.
pub fn survivor_fraction(
    system: &BallSystem,
    params: &SurvivorParams,
    index_bound: u64,
    resolution: u64,
    region: &BoxRegion,
) -> Result<GridSurvivorReport> {
    if resolution < 2 {
        return Err(Error::invalid("grid resolution must be at least 2"));
    }
    let dim = system.dimension();
    if region.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: region.dim() });
    }
    if !region.volume().is_positive() {
        return Err(Error::invalid("grid region must have positive volume"));
    }
    let total_points = resolution
        .checked_pow(dim as u32)
        .filter(|&t| t <= 100_000_000)
        .ok_or_else(|| Error::invalid("grid too large"))?;
    let kappa = params.kappa();

    let survivors = if dim == 1 {
        // Exact union plus binary search per grid point.
        let union = scaled_tail_union_1d(system, &kappa, params.tail_start, index_bound)?;
        let (lo, hi) = region.axis(0);
        let span = hi - lo;
        let res = Scalar::from(resolution);
        let mut alive = 0u64;
        for k in 0..resolution {
            let t = lo + &(&span * &(Scalar::from(k) / &res));
            if !union.contains(&t) {
                alive += 1;
            }
        }
        alive
    } else {
        // Deduplicate (recurring centres contribute once) and prune balls
        // that cannot reach the region.
        let mut seen = std::collections::HashSet::new();
        let mut active: Vec<SystemBall> = Vec::new();
        for (_, ball) in system.iter_range(params.tail_start, index_bound) {
            if seen.insert((ball.center.clone(), ball.radius.clone()))
                && ball.scaled_reaches_box(region, &kappa)?
            {
                active.push(ball);
            }
        }
        let res = Scalar::from(resolution);
        let axes: Vec<Vec<Scalar>> = (0..dim)
            .map(|a| {
                let (lo, hi) = region.axis(a);
                let span = hi - lo;
                (0..resolution)
                    .map(|k| lo + &(&span * &(Scalar::from(k) / &res)))
                    .collect()
            })
            .collect();

        let mut alive = 0u64;
        let mut idx = vec![0u64; dim];
        'grid: loop {
            let point = Point::new(
                idx.iter()
                    .enumerate()
                    .map(|(a, &k)| axes[a][k as usize].clone())
                    .collect(),
            );
            let mut survives = true;
            for ball in &active {
                if ball.contains_scaled(&point, &kappa)? {
                    survives = false;
                    break;
                }
            }
            if survives {
                alive += 1;
            }
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < resolution {
                    continue 'grid;
                }
                idx[a] = 0;
            }
            break;
        }
        alive
    };

    Ok(GridSurvivorReport {
        resolution,
        total_points,
        survivors,
        surviving_fraction: Scalar::from(survivors) / Scalar::from(total_points),
        tail_start: params.tail_start,
        shrink_denom: params.shrink_denom,
        index_bound,
    })
}

/// Survivor fractions of the classical one-dimensional family for every
/// denominator cutoff `q = 1..=q_max`, on the same grid as
/// [`survivor_fraction`] with `tail_start = 1`.
///
/// A grid point's survival is monotone in the cutoff, so one scan per
/// point recording the first killing denominator produces the entire
/// sweep; the result agrees exactly with calling [`survivor_fraction`]
/// per cutoff.
pub fn survivor_sweep_classical_1d(
    system: &crate::systems::ClassicalSystem,
    shrink_denom: u64,
    q_max: u64,
    resolution: u64,
    region: &BoxRegion,
) -> Result<Vec<(u64, Scalar)>> {
    if system.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: system.dim() as usize });
    }
    if resolution < 2 {
        return Err(Error::invalid("grid resolution must be at least 2"));
    }
    if region.dim() != 1 || !region.volume().is_positive() {
        return Err(Error::invalid("region must be a positive-length interval"));
    }
    if shrink_denom == 0 || q_max == 0 {
        return Err(Error::invalid("shrink denominator and q_max must be >= 1"));
    }
    let kappa = Scalar::new(1, BigInt::from(shrink_denom)).expect("positive");
    let (win_lo, win_hi) = system.window().axis(0);

    let (lo, hi) = region.axis(0);
    let span = hi - lo;
    let res = Scalar::from(resolution);
    // kills[q-1] = number of grid points first killed at denominator q.
    let mut kills = vec![0u64; q_max as usize];
    for k in 0..resolution {
        let x = lo + &(&span * &(Scalar::from(k) / &res));
        'point: for q in 1..=q_max {
            let qs = Scalar::from(q);
            let q_sq = Scalar::from(q * q);
            let xq = &x * &qs;
            let reach = &kappa / &qs; // kill iff |x q - p| <= kappa / q
            let p_lo = (&xq - &reach).ceil_int();
            let p_hi = (&xq + &reach).floor_int();
            let mut p = p_lo;
            while p <= p_hi {
                // Window admission: dist(p/q, window) < 1/q^2.
                let center = Scalar::new(p.clone(), BigInt::from(q)).expect("q > 0");
                let dist = if &center < win_lo {
                    win_lo - &center
                } else if &center > win_hi {
                    &center - win_hi
                } else {
                    Scalar::zero()
                };
                if &dist * &q_sq < Scalar::one() {
                    kills[q as usize - 1] += 1;
                    break 'point;
                }
                p += 1;
            }
        }
    }

    let mut out = Vec::with_capacity(q_max as usize);
    let mut dead = 0u64;
    for q in 1..=q_max {
        dead += kills[q as usize - 1];
        let fraction = Scalar::from(resolution - dead) / Scalar::from(resolution);
        out.push((q, fraction));
    }
    Ok(out)
}

/// A coverage fraction, exact (1-D interval path) or estimated.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageValue {
    Exact(Scalar),
    Estimate { fraction: f64, ci_half_width: f64, samples: u64, seed: u64 },
}

impl CoverageValue {
    pub fn fraction_f64(&self) -> f64 {
        match self {
            CoverageValue::Exact(v) => v.to_f64(),
            CoverageValue::Estimate { fraction, .. } => *fraction,
        }
    }
}

/// Outcome of the per-scale density experiment around a probe ball.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub dim: usize,
    pub shrink_denom: u64,
    pub tail_start: u64,
    pub index_bound: u64,
    pub center: Point,
    pub radius: Scalar,
    /// Fraction of the probe ball covered by the unscaled tail.
    pub coverage_full: CoverageValue,
    /// Fraction covered by the `1/M`-scaled tail.
    pub coverage_shrunk: CoverageValue,
    /// The scaled-union constant `K(1/M, d)`: `1/M` in one dimension,
    /// `(1/(3M))^d` otherwise.
    pub scaling_constant: Scalar,
    /// `coverage_shrunk >= K * coverage_full`: exact on the 1-D path,
    /// with a `3 x ci` slack on the stochastic path.
    pub inequality_holds: bool,
    /// `1 - coverage_shrunk`: the per-scale surrogate for the density of
    /// the survivor set inside the probe ball.
    pub complement_fraction: f64,
}

/// Measures how much of the probe ball `B(y, r)` the tail
/// `[tail_start, index_bound]` covers, unscaled and `1/M`-scaled, and
/// checks the scaled-union inequality at this scale. One-dimensional
/// systems use the exact interval path (zero tolerance); higher dimensions
/// sample inside the probe ball.
#[allow(clippy::too_many_arguments)]
pub fn local_density_experiment(
    system: &BallSystem,
    params: &SurvivorParams,
    center: &Point,
    radius: &Scalar,
    tail_start: u64,
    index_bound: u64,
    samples: u64,
    seed: u64,
) -> Result<DensityReport> {
    let dim = system.dimension();
    if center.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: center.dim() });
    }
    if !radius.is_positive() {
        return Err(Error::invalid("probe radius must be positive"));
    }
    if tail_start < params.tail_start {
        return Err(Error::invalid(format!(
            "tail must start at or after the survivor-set start index {}",
            params.tail_start
        )));
    }
    let m = params.shrink_denom;
    let kappa = params.kappa();
    let scaling_constant = if dim == 1 {
        kappa.clone()
    } else {
        Scalar::new(1, BigInt::from(3 * m)).expect("positive").pow(dim as u32)
    };

    if dim == 1 {
        let y = center.coord(0);
        let region = Interval::new(y - radius, y + radius)?;
        let region_measure = region.measure();
        let full = scaled_tail_union_1d(system, &Scalar::one(), tail_start, index_bound)?
            .clip(&region)
            .measure()
            / &region_measure;
        let shrunk = scaled_tail_union_1d(system, &kappa, tail_start, index_bound)?
            .clip(&region)
            .measure()
            / &region_measure;
        let inequality_holds = shrunk >= &scaling_constant * &full;
        return Ok(DensityReport {
            dim,
            shrink_denom: m,
            tail_start,
            index_bound,
            center: center.clone(),
            radius: radius.clone(),
            complement_fraction: 1.0 - shrunk.to_f64(),
            coverage_full: CoverageValue::Exact(full),
            coverage_shrunk: CoverageValue::Exact(shrunk),
            scaling_constant,
            inequality_holds,
        });
    }

    // Stochastic path: rejection-sample the probe ball from its bounding
    // box; tail memberships are exact per sample.
    if samples < 1000 {
        return Err(Error::invalid(format!("need at least 1000 samples, got {samples}")));
    }
    let probe = Ball::new(center.clone(), radius.clone())?;
    let sample_box = probe.bounding_box();
    let (lows, spans) = box_axes(&sample_box);

    let mut seen = std::collections::HashSet::new();
    let mut tail: Vec<SystemBall> = Vec::new();
    for (_, ball) in system.iter_range(tail_start, index_bound) {
        if seen.insert((ball.center.clone(), ball.radius.clone()))
            && ball.scaled_reaches_box(&sample_box, &Scalar::one())?
        {
            tail.push(ball);
        }
    }

    let n_chunks = samples.div_ceil(CHUNK);
    let mut kept = 0u64;
    let mut covered_full = 0u64;
    let mut covered_shrunk = 0u64;
    for c in 0..n_chunks {
        let len = if c + 1 == n_chunks && samples % CHUNK != 0 { samples % CHUNK } else { CHUNK };
        let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, c));
        for _ in 0..len {
            let p = sample_point(&mut rng, &lows, &spans);
            if !probe.contains(&p)? {
                continue;
            }
            kept += 1;
            let one = Scalar::one();
            if tail.iter().any(|b| b.contains_scaled(&p, &one).expect("dims agree")) {
                covered_full += 1;
            }
            if tail.iter().any(|b| b.contains_scaled(&p, &kappa).expect("dims agree")) {
                covered_shrunk += 1;
            }
        }
    }
    if kept == 0 {
        return Err(Error::internal("no samples landed in the probe ball"));
    }
    let full = covered_full as f64 / kept as f64;
    let shrunk = covered_shrunk as f64 / kept as f64;
    let ci = hoeffding_half_width(kept);
    let k = scaling_constant.to_f64();
    let inequality_holds = shrunk >= k * full - 3.0 * ci;
    Ok(DensityReport {
        dim,
        shrink_denom: m,
        tail_start,
        index_bound,
        center: center.clone(),
        radius: radius.clone(),
        coverage_full: CoverageValue::Estimate {
            fraction: full,
            ci_half_width: ci,
            samples: kept,
            seed,
        },
        coverage_shrunk: CoverageValue::Estimate {
            fraction: shrunk,
            ci_half_width: ci,
            samples: kept,
            seed,
        },
        scaling_constant,
        inequality_holds,
        complement_fraction: 1.0 - shrunk,
    })
}
