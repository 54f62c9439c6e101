//! Independent in-memory brute-force solvers, used as ground truth on
//! desk-scale instances. Neither shares any code path with the sweep.

use crate::error::Result;
use crate::geometry::{rect_of_object, Point, WeightedObject, WeightedRect};

/// Ground-truth answer: the true optimum and a point realizing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleAnswer {
    pub point: Point,
    pub value: f64,
}

/// Exhaustive rectangle-placement oracle.
///
/// Transforms objects to open rectangles and evaluates the location-weight of
/// every open cell of the edge arrangement at its midpoint; correct because
/// the location-weight is constant on each open cell. Cost grows roughly with
/// the cube of the object count; keep inputs to a few hundred objects.
pub fn brute_maxrs(objects: &[WeightedObject], d1: f64, d2: f64) -> Result<OracleAnswer> {
    let mut best = OracleAnswer { point: Point::ORIGIN, value: 0.0 };
    if objects.is_empty() {
        return Ok(best);
    }
    let rects: Vec<WeightedRect> =
        objects.iter().map(|o| rect_of_object(o, d1, d2)).collect::<Result<_>>()?;

    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.x1, r.x2]).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let mut ys: Vec<f64> = rects.iter().flat_map(|r| [r.y1, r.y2]).collect();
    ys.sort_by(|a, b| a.total_cmp(b));
    ys.dedup();

    // Per x-strip, the covering rectangles' y-edges induce a prefix sum over
    // the y-cells; each cell value equals the location-weight at the cell
    // midpoint.
    let mut y_events: Vec<(f64, f64)> = Vec::new();
    for sx in xs.windows(2) {
        let mid_x = (sx[0] + sx[1]) / 2.0;
        y_events.clear();
        for r in &rects {
            if r.x1 < mid_x && mid_x < r.x2 {
                y_events.push((r.y1, r.w));
                y_events.push((r.y2, -r.w));
            }
        }
        if y_events.is_empty() {
            continue;
        }
        y_events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        let mut ev = 0usize;
        for sy in ys.windows(2) {
            while ev < y_events.len() && y_events[ev].0 <= sy[0] {
                acc += y_events[ev].1;
                ev += 1;
            }
            if acc > best.value {
                best = OracleAnswer {
                    point: Point::new(mid_x, (sy[0] + sy[1]) / 2.0),
                    value: acc,
                };
            }
        }
    }
    Ok(best)
}

/// Exhaustive disk-placement oracle.
///
/// In the transformed problem (an open disk of diameter `d` at each object),
/// the closure of a maximum-depth region contains an object point or an
/// intersection of two disk boundaries. Boundary candidates are nudged
/// slightly toward both generating centers to land strictly inside the open
/// disks they bound.
pub fn brute_maxcrs(objects: &[WeightedObject], d: f64) -> OracleAnswer {
    let mut best = OracleAnswer { point: Point::ORIGIN, value: 0.0 };
    if objects.is_empty() {
        return best;
    }
    let r = d / 2.0;
    let eps = 1e-7 * d;

    let value_at = |p: Point| -> f64 {
        let mut v = 0.0;
        for o in objects {
            let dx = o.x - p.x;
            let dy = o.y - p.y;
            if dx * dx + dy * dy < r * r {
                v += o.w;
            }
        }
        v
    };
    let consider = |p: Point, best: &mut OracleAnswer| {
        let v = value_at(p);
        if v > best.value {
            *best = OracleAnswer { point: p, value: v };
        }
    };

    for o in objects {
        consider(o.point(), &mut best);
    }
    for i in 0..objects.len() {
        for j in i + 1..objects.len() {
            let (a, b) = (objects[i], objects[j]);
            let dx = b.x - a.x;
            let dy = b.y - a.y;
            let dist2 = dx * dx + dy * dy;
            if dist2 == 0.0 || dist2 >= d * d {
                continue; // coincident or too far apart for boundary crossings
            }
            let dist = dist2.sqrt();
            let h = (r * r - dist2 / 4.0).sqrt();
            let mid = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
            let (ux, uy) = (dx / dist, dy / dist);
            for sign in [1.0, -1.0] {
                let q = Point::new(mid.x - sign * uy * h, mid.y + sign * ux * h);
                // Nudge toward the midpoint of the two centers.
                let (nx, ny) = (mid.x - q.x, mid.y - q.y);
                let norm = (nx * nx + ny * ny).sqrt();
                if norm == 0.0 {
                    continue; // tangent circles; the touching point is open-excluded anyway
                }
                consider(Point::new(q.x + eps * nx / norm, q.y + eps * ny / norm), &mut best);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SplitMix64;
    use crate::geometry::location_weight;

    #[test]
    fn single_object_rect() {
        let o = [WeightedObject::new(5.0, 5.0, 7.0)];
        let ans = brute_maxrs(&o, 2.0, 2.0).unwrap();
        assert_eq!(ans.value, 7.0);
        assert!((ans.point.x - 5.0).abs() < 1.0 && (ans.point.y - 5.0).abs() < 1.0);
    }

    #[test]
    fn disjoint_rects_cap_at_single_weight() {
        // Two objects 2*d1 apart on the x-axis: transformed rects are disjoint.
        let objs = [WeightedObject::new(0.0, 0.0, 2.0), WeightedObject::new(8.0, 0.0, 3.0)];
        let ans = brute_maxrs(&objs, 4.0, 4.0).unwrap();
        assert_eq!(ans.value, 3.0);
    }

    #[test]
    fn zero_objects() {
        assert_eq!(brute_maxrs(&[], 1.0, 1.0).unwrap(), OracleAnswer { point: Point::ORIGIN, value: 0.0 });
        assert_eq!(brute_maxcrs(&[], 1.0), OracleAnswer { point: Point::ORIGIN, value: 0.0 });
    }

    // A cluster of 8 points coverable by one placement, with the remaining
    // points isolated, gives exactly 8.
    #[test]
    fn best_rectangle_covers_eight() {
        let mut objs: Vec<WeightedObject> = Vec::new();
        for i in 0..8 {
            objs.push(WeightedObject::new(50.0 + (i % 4) as f64, 50.0 + (i / 4) as f64, 1.0));
        }
        for i in 0..12 {
            objs.push(WeightedObject::new(100.0 + 25.0 * i as f64, 200.0 + 25.0 * i as f64, 1.0));
        }
        let ans = brute_maxrs(&objs, 10.0, 10.0).unwrap();
        assert_eq!(ans.value, 8.0);
    }

    #[test]
    fn oracle_realizes_its_value() {
        let mut rng = SplitMix64::new(4242);
        for _ in 0..40 {
            let n = (rng.next_u64() % 60 + 1) as usize;
            let objs: Vec<WeightedObject> = (0..n)
                .map(|_| {
                    WeightedObject::new(
                        (rng.next_u64() % 400) as f64 / 4.0,
                        (rng.next_u64() % 400) as f64 / 4.0,
                        (rng.next_u64() % 5 + 1) as f64,
                    )
                })
                .collect();
            let (d1, d2) = (7.0, 11.0);
            let ans = brute_maxrs(&objs, d1, d2).unwrap();
            let rects: Vec<WeightedRect> =
                objs.iter().map(|o| rect_of_object(o, d1, d2).unwrap()).collect();
            assert_eq!(location_weight(&rects, ans.point), ans.value);
            // Random sampling never beats the oracle.
            for _ in 0..200 {
                let p = Point::new(rng.next_f64() * 110.0 - 5.0, rng.next_f64() * 110.0 - 5.0);
                assert!(location_weight(&rects, p) <= ans.value);
            }
        }
    }

    #[test]
    fn enlarging_the_range_never_hurts() {
        let mut rng = SplitMix64::new(515);
        let objs: Vec<WeightedObject> = (0..80)
            .map(|_| {
                WeightedObject::new(
                    (rng.next_u64() % 500) as f64 / 2.0,
                    (rng.next_u64() % 500) as f64 / 2.0,
                    1.0,
                )
            })
            .collect();
        let mut prev = 0.0;
        for k in 1..6 {
            let d = 4.0 * k as f64;
            let v = brute_maxrs(&objs, d, d).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0.0;
        for k in 1..6 {
            let v = brute_maxcrs(&objs, 4.0 * k as f64).value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn single_object_circle() {
        let o = [WeightedObject::new(3.0, -2.0, 4.0)];
        assert_eq!(brute_maxcrs(&o, 2.0).value, 4.0);
    }

    #[test]
    fn two_close_objects_share_a_disk() {
        let objs = [WeightedObject::new(0.0, 0.0, 1.0), WeightedObject::new(1.0, 0.0, 2.0)];
        assert_eq!(brute_maxcrs(&objs, 2.0).value, 3.0);
    }

    // Oracle value dominates a dense grid sampler; on most instances the
    // grid finds the same optimum.
    #[test]
    fn dominates_dense_grid_sampler() {
        let mut rng = SplitMix64::new(60_61);
        let d = 4.0;
        let mut equal = 0usize;
        let trials = 50;
        for _ in 0..trials {
            let n = (rng.next_u64() % 55 + 6) as usize;
            // Tight layouts so the d/200-pitch grid stays small.
            let objs: Vec<WeightedObject> = (0..n)
                .map(|_| {
                    WeightedObject::new(
                        rng.next_f64() * 1.5 * d,
                        rng.next_f64() * 1.5 * d,
                        1.0,
                    )
                })
                .collect();
            let ans = brute_maxcrs(&objs, d);

            let pitch = d / 200.0;
            let r = d / 2.0;
            let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
            for o in &objs {
                min_x = min_x.min(o.x);
                max_x = max_x.max(o.x);
                min_y = min_y.min(o.y);
                max_y = max_y.max(o.y);
            }
            let mut by_x = objs.clone();
            by_x.sort_by(|a, b| a.x.total_cmp(&b.x));
            let nx = ((max_x - min_x) / pitch) as usize + 1;
            let ny = ((max_y - min_y) / pitch) as usize + 1;
            let mut grid_best = 0.0f64;
            for ix in 0..=nx {
                let px = min_x + ix as f64 * pitch;
                let lo = by_x.partition_point(|o| o.x <= px - r);
                let hi = by_x.partition_point(|o| o.x < px + r);
                if lo == hi {
                    continue;
                }
                for iy in 0..=ny {
                    let py = min_y + iy as f64 * pitch;
                    let mut v = 0.0;
                    for o in &by_x[lo..hi] {
                        let dx = o.x - px;
                        let dy = o.y - py;
                        if dx * dx + dy * dy < r * r {
                            v += o.w;
                        }
                    }
                    grid_best = grid_best.max(v);
                }
            }
            assert!(ans.value >= grid_best, "oracle {} below grid {}", ans.value, grid_best);
            if ans.value == grid_best {
                equal += 1;
            }
        }
        assert!(equal * 100 >= trials * 95, "grid matched only {equal}/{trials}");
    }
}
