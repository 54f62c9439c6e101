//! Quarter-approximation for the circular problem: reduce disks to their
//! bounding squares, solve the rectangle problem exactly, then evaluate the
//! region center and four diagonally shifted candidates against the true
//! disks and keep the best.

use crate::emstore::{BlockFile, BlockStore, IoStats};
use crate::error::{Error, Result};
use crate::exact::{solve_maxrs, SweepStats};
use crate::geometry::{Point, WeightedObject};

/// Midpoint of the valid open shifting interval ((sqrt(2)-1)d/2, d/2),
/// giving axis offsets of d/4.
pub fn default_sigma(d: f64) -> f64 {
    std::f64::consts::SQRT_2 / 4.0 * d
}

/// The four points at Euclidean distance `sigma` from `p0`, one per
/// diagonal direction. With sigma in the valid interval, the four disks of
/// diameter `d` at these points jointly cover the open d x d square at `p0`.
pub fn shifted_points(p0: Point, sigma: f64, d: f64) -> Result<[Point; 4]> {
    let lo = (std::f64::consts::SQRT_2 - 1.0) * d / 2.0;
    let hi = d / 2.0;
    if !sigma.is_finite() || sigma <= lo || sigma >= hi {
        return Err(Error::InvalidParameter(format!(
            "shifting distance {sigma} outside the open interval ({lo}, {hi})"
        )));
    }
    let off = sigma * std::f64::consts::FRAC_1_SQRT_2;
    Ok([
        Point::new(p0.x + off, p0.y + off),
        Point::new(p0.x - off, p0.y + off),
        Point::new(p0.x + off, p0.y - off),
        Point::new(p0.x - off, p0.y - off),
    ])
}

/// Total weight of objects strictly inside the open disk of diameter `d`
/// at `p`, in one linear scan of the object file.
pub fn eval_circle_value(objects: &mut BlockFile<WeightedObject>, p: Point, d: f64) -> Result<f64> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::InvalidParameter(format!("diameter must be positive, got {d}")));
    }
    let r = d / 2.0;
    let mut v = 0.0;
    let mut reader = objects.reader();
    while let Some(o) = reader.next()? {
        let dx = o.x - p.x;
        let dy = o.y - p.y;
        if dx * dx + dy * dy < r * r {
            v += o.w;
        }
    }
    Ok(v)
}

/// Best of the five candidates, with the full audit trail.
#[derive(Debug, Clone, Copy)]
pub struct CrsAnswer {
    pub point: Point,
    pub value: f64,
    /// Candidate points and their disk values: the region center first,
    /// then the four shifted points.
    pub candidates: [(Point, f64); 5],
}

#[derive(Debug, Clone, Copy)]
pub struct MaxCrsReport {
    pub answer: CrsAnswer,
    /// Center of the max-region of the bounding-square problem.
    pub p0: Point,
    /// Maximum location-weight among the bounding squares.
    pub mbr_sum: f64,
    pub sigma: f64,
    pub io_sort: IoStats,
    pub io_sweep: IoStats,
    pub stats: SweepStats,
}

/// End-to-end quarter-approximate solve over an object file. The returned
/// value is at least a quarter of the true circular optimum. `sigma`
/// defaults to the midpoint of the valid interval.
pub fn solve_maxcrs(
    store: &BlockStore,
    objects: &mut BlockFile<WeightedObject>,
    d: f64,
    sigma: Option<f64>,
) -> Result<MaxCrsReport> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::InvalidParameter(format!("diameter must be positive, got {d}")));
    }
    let sigma = sigma.unwrap_or_else(|| default_sigma(d));

    // The transformed circles sit at the objects, so their bounding squares
    // are exactly the d x d object rectangles.
    let rect = solve_maxrs(store, objects, d, d)?;
    let p0 = rect.point;

    let before = store.io_snapshot();
    let mut candidates = [(p0, 0.0); 5];
    if objects.is_empty() {
        // Defined answer for an empty input: the origin with value zero.
        let shifted = shifted_points(Point::ORIGIN, sigma, d)?;
        for (slot, p) in candidates.iter_mut().skip(1).zip(shifted) {
            *slot = (p, 0.0);
        }
        return Ok(MaxCrsReport {
            answer: CrsAnswer { point: Point::ORIGIN, value: 0.0, candidates },
            p0,
            mbr_sum: rect.max_sum,
            sigma,
            io_sort: rect.io_sort,
            io_sweep: rect.io_sweep,
            stats: rect.stats,
        });
    }

    candidates[0] = (p0, eval_circle_value(objects, p0, d)?);
    for (slot, p) in candidates.iter_mut().skip(1).zip(shifted_points(p0, sigma, d)?) {
        *slot = (p, eval_circle_value(objects, p, d)?);
    }
    let scan_io = store.io_snapshot().since(before);

    // Argmax with a leftmost-lowest tie-break on the candidate point.
    let mut best = candidates[0];
    for c in &candidates[1..] {
        let better = c.1 > best.1
            || (c.1 == best.1
                && (c.0.x < best.0.x || (c.0.x == best.0.x && c.0.y < best.0.y)));
        if better {
            best = *c;
        }
    }

    Ok(MaxCrsReport {
        answer: CrsAnswer { point: best.0, value: best.1, candidates },
        p0,
        mbr_sum: rect.max_sum,
        sigma,
        io_sort: rect.io_sort,
        io_sweep: IoStats {
            blocks_read: rect.io_sweep.blocks_read + scan_io.blocks_read,
            blocks_written: rect.io_sweep.blocks_written + scan_io.blocks_written,
        },
        stats: rect.stats,
    })
}
