//! Distribution-sweep exact solver for the maximizing range sum problem:
//! transform objects to congruent open rectangles, recursively divide the
//! plane into slabs until a sub-problem fits in memory, plane-sweep the
//! leaves, and merge child slab-files bottom-up.

mod divide;
mod merge;
mod plane_sweep;
mod records;

pub use divide::{divide, ChildInput};
pub use merge::merge_sweep;
pub use plane_sweep::plane_sweep;
pub use records::{EdgeRecord, EventKind, RectEvent, Slab, SlabTuple, SpanEvent};

use crate::emstore::{external_sort, BlockFile, BlockStore, IoStats};
use crate::error::{Error, Result};
use crate::geometry::{rect_of_object, Point, WeightedObject};

#[cfg(test)]
pub(crate) mod test_util {
    use super::{EventKind, RectEvent};
    use crate::geometry::WeightedRect;

    pub(crate) fn events_of_rects(rects: &[WeightedRect]) -> Vec<RectEvent> {
        let mut evs = Vec::with_capacity(rects.len() * 2);
        for r in rects {
            evs.push(RectEvent { y: r.y1, kind: EventKind::Bottom, x1: r.x1, x2: r.x2, w: r.w });
            evs.push(RectEvent { y: r.y2, kind: EventKind::Top, x1: r.x1, x2: r.x2, w: r.w });
        }
        evs.sort_by(|a, b| a.y.total_cmp(&b.y));
        evs
    }
}

/// A slab's local solution: its max-interval tuples in ascending y.
pub struct SlabFile {
    pub file: BlockFile<SlabTuple>,
    pub slab: Slab,
}

/// An open rectangle of points all attaining the maximum location-weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxRegion {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub sum: f64,
}

/// Instrumentation collected across one solver run.
#[derive(Debug, Clone, Copy, Default)]
pub struct SweepStats {
    /// Deepest division level reached (base case at the root is depth 0).
    pub max_depth: usize,
    /// Recursion nodes visited, leaves included.
    pub nodes: usize,
    pub leaves: usize,
    /// Resident-record high-water mark at the end of the run.
    pub mem_high_water: usize,
}

/// Transforms the object file into the two root inputs of the recursion:
/// rectangle events sorted by y and original vertical edges sorted by x.
/// Both external sorts run under the store's memory budget and are counted.
pub fn build_inputs(
    store: &BlockStore,
    objects: &mut BlockFile<WeightedObject>,
    d1: f64,
    d2: f64,
) -> Result<(BlockFile<RectEvent>, BlockFile<EdgeRecord>)> {
    let valid = |d: f64| d.is_finite() && d > 0.0;
    if !valid(d1) || !valid(d2) {
        return Err(Error::InvalidParameter(format!(
            "query extents must be positive, got {d1} x {d2}"
        )));
    }
    let mut ev = store.create::<RectEvent>()?;
    let mut ed = store.create::<EdgeRecord>()?;
    {
        let mut r = objects.reader();
        while let Some(o) = r.next()? {
            let rect = rect_of_object(&o, d1, d2)?;
            ev.push(RectEvent { y: rect.y1, kind: EventKind::Bottom, x1: rect.x1, x2: rect.x2, w: rect.w })?;
            ev.push(RectEvent { y: rect.y2, kind: EventKind::Top, x1: rect.x1, x2: rect.x2, w: rect.w })?;
            ed.push(EdgeRecord { x: rect.x1 })?;
            ed.push(EdgeRecord { x: rect.x2 })?;
        }
    }
    let events = external_sort(store, ev.finish()?, |a, b| a.y.total_cmp(&b.y))?;
    let edges = external_sort(store, ed.finish()?, |a, b| a.x.total_cmp(&b.x))?;
    Ok((events, edges))
}

/// Runs the full recursion on prepared inputs and returns the slab-file of
/// `slab`. Slab-file sizes are checked against the 2K bound at every node.
pub fn exact_maxrs(
    store: &BlockStore,
    events: BlockFile<RectEvent>,
    edges: BlockFile<EdgeRecord>,
    slab: Slab,
    stats: &mut SweepStats,
) -> Result<SlabFile> {
    exact_rec(store, events, edges, slab, 0, stats)
}

fn exact_rec(
    store: &BlockStore,
    mut events: BlockFile<RectEvent>,
    mut edges: BlockFile<EdgeRecord>,
    slab: Slab,
    depth: usize,
    stats: &mut SweepStats,
) -> Result<SlabFile> {
    stats.nodes += 1;
    if depth > stats.max_depth {
        stats.max_depth = depth;
    }
    let k = events.len() / 2;

    let result = if events.len() <= store.cfg().mem_records() as u64 {
        stats.leaves += 1;
        let n = events.len() as usize;
        let _lease = store.lease(n);
        let mut in_mem = Vec::with_capacity(n);
        {
            let mut r = events.reader();
            while let Some(e) = r.next()? {
                in_mem.push(e);
            }
        }
        drop(events);
        drop(edges);
        plane_sweep(store, &in_mem, &slab)?
    } else {
        let (children, spanning) = divide(store, &mut events, &mut edges, &slab)?;
        drop(events);
        drop(edges);
        let mut child_files = Vec::with_capacity(children.len());
        for ch in children {
            child_files.push(exact_rec(store, ch.events, ch.edges, ch.slab, depth + 1, stats)?);
        }
        merge_sweep(store, child_files, spanning)?
    };

    assert!(
        result.file.len() <= (2 * k).max(1),
        "slab-file has {} tuples, over the 2K bound for K = {k} rectangles",
        result.file.len()
    );
    Ok(result)
}

/// Scans a final slab-file for the best tuple (smallest y, then smallest x1
/// on ties) and returns the max-region it bounds together with the region's
/// center point. A zero maximum reports the origin.
pub fn extract_max_region(sf: &mut SlabFile) -> Result<(MaxRegion, Point)> {
    if sf.file.is_empty() {
        return Err(Error::EmptyInput("slab-file"));
    }
    let mut best: Option<SlabTuple> = None;
    let mut best_next_y = f64::INFINITY;
    let mut best_is_latest = false;
    let mut r = sf.file.reader();
    while let Some(t) = r.next()? {
        if best_is_latest {
            best_next_y = t.y;
            best_is_latest = false;
        }
        if best.is_none_or(|b| t.sum > b.sum) {
            best = Some(t);
            best_next_y = f64::INFINITY;
            best_is_latest = true;
        }
    }
    drop(r);
    let t = best.unwrap();
    let region = MaxRegion { x1: t.x1, x2: t.x2, y1: t.y, y2: best_next_y, sum: t.sum };
    let point = if t.sum == 0.0 {
        Point::ORIGIN
    } else {
        Point::new((t.x1 + t.x2) / 2.0, (t.y + best_next_y) / 2.0)
    };
    Ok((region, point))
}

/// Everything a solver run reports: the answer, the I/O split between the
/// initial sorts and the sweep, and the structural instrumentation.
#[derive(Debug, Clone, Copy)]
pub struct MaxRsReport {
    pub point: Point,
    pub max_sum: f64,
    pub region: MaxRegion,
    pub io_sort: IoStats,
    pub io_sweep: IoStats,
    pub stats: SweepStats,
}

/// End-to-end exact solve over an object file.
pub fn solve_maxrs(
    store: &BlockStore,
    objects: &mut BlockFile<WeightedObject>,
    d1: f64,
    d2: f64,
) -> Result<MaxRsReport> {
    let before_sort = store.io_snapshot();
    let (events, edges) = build_inputs(store, objects, d1, d2)?;
    let io_sort = store.io_snapshot().since(before_sort);

    let before_sweep = store.io_snapshot();
    let mut stats = SweepStats::default();
    let mut sf = exact_maxrs(store, events, edges, Slab::FULL, &mut stats)?;
    let (region, point) = extract_max_region(&mut sf)?;
    let io_sweep = store.io_snapshot().since(before_sweep);
    stats.mem_high_water = store.mem_high_water();

    Ok(MaxRsReport { point, max_sum: region.sum, region, io_sort, io_sweep, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emstore::EmConfig;

    fn object_file(store: &BlockStore, objs: &[WeightedObject]) -> BlockFile<WeightedObject> {
        let mut w = store.create::<WeightedObject>().unwrap();
        for o in objs {
            w.push(*o).unwrap();
        }
        w.finish().unwrap()
    }

    #[test]
    fn build_inputs_counts_and_order() {
        let store = BlockStore::in_memory(EmConfig::new(4, 16).unwrap());
        let mut objs = object_file(&store, &[WeightedObject::new(0.0, 0.0, 1.0)]);
        let (mut events, mut edges) = build_inputs(&store, &mut objs, 2.0, 2.0).unwrap();
        let evs = events.read_all().unwrap();
        assert_eq!(evs.len(), 2);
        assert_eq!((evs[0].y, evs[0].kind), (-1.0, EventKind::Bottom));
        assert_eq!((evs[1].y, evs[1].kind), (1.0, EventKind::Top));
        assert_eq!((evs[0].x1, evs[0].x2), (-1.0, 1.0));
        let eds = edges.read_all().unwrap();
        assert_eq!(eds, vec![EdgeRecord { x: -1.0 }, EdgeRecord { x: 1.0 }]);
    }

    #[test]
    fn build_inputs_handles_empty_file() {
        let store = BlockStore::in_memory(EmConfig::new(4, 16).unwrap());
        let mut objs = object_file(&store, &[]);
        let (events, edges) = build_inputs(&store, &mut objs, 2.0, 2.0).unwrap();
        assert!(events.is_empty() && edges.is_empty());
    }

    #[test]
    fn build_inputs_sorted_against_in_memory_sort() {
        let store = BlockStore::in_memory(EmConfig::new(8, 32).unwrap());
        let mut rng = crate::dataset::SplitMix64::new(5);
        let objs: Vec<WeightedObject> = (0..1000)
            .map(|_| WeightedObject::new(rng.next_f64() * 1e4, rng.next_f64() * 1e4, 1.0))
            .collect();
        let mut f = object_file(&store, &objs);
        let (mut events, mut edges) = build_inputs(&store, &mut f, 40.0, 40.0).unwrap();
        assert_eq!(events.len(), 2000);
        assert_eq!(edges.len(), 2000);

        let evs = events.read_all().unwrap();
        let mut want: Vec<f64> =
            objs.iter().flat_map(|o| [o.y - 20.0, o.y + 20.0]).collect();
        want.sort_by(|a, b| a.total_cmp(b));
        let got: Vec<f64> = evs.iter().map(|e| e.y).collect();
        assert_eq!(got, want);

        let eds = edges.read_all().unwrap();
        let mut want: Vec<f64> =
            objs.iter().flat_map(|o| [o.x - 20.0, o.x + 20.0]).collect();
        want.sort_by(|a, b| a.total_cmp(b));
        let got: Vec<f64> = eds.iter().map(|e| e.x).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn extract_from_single_rect() {
        let store = BlockStore::in_memory(EmConfig::new(4, 16).unwrap());
        let mut objs = object_file(&store, &[WeightedObject::new(1.0, 1.0, 5.0)]);
        let report = solve_maxrs(&store, &mut objs, 2.0, 2.0).unwrap();
        assert_eq!(report.max_sum, 5.0);
        assert_eq!(report.region, MaxRegion { x1: 0.0, x2: 2.0, y1: 0.0, y2: 2.0, sum: 5.0 });
        assert_eq!(report.point, Point::new(1.0, 1.0));
    }

    #[test]
    fn empty_dataset_reports_origin_zero() {
        let store = BlockStore::in_memory(EmConfig::new(4, 16).unwrap());
        let mut objs = object_file(&store, &[]);
        let report = solve_maxrs(&store, &mut objs, 2.0, 2.0).unwrap();
        assert_eq!(report.max_sum, 0.0);
        assert_eq!(report.point, Point::ORIGIN);
    }

    #[test]
    fn extract_rejects_empty_slab_file() {
        let store = BlockStore::in_memory(EmConfig::new(4, 16).unwrap());
        let w = store.create::<SlabTuple>().unwrap();
        let mut sf = SlabFile { file: w.finish().unwrap(), slab: Slab::FULL };
        assert!(matches!(extract_max_region(&mut sf), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn recursion_matches_base_case() {
        // Same instance solved fully in memory and with a tiny budget that
        // forces division must agree on the maximum.
        let mut rng = crate::dataset::SplitMix64::new(17);
        let objs: Vec<WeightedObject> = (0..120)
            .map(|_| {
                WeightedObject::new(
                    (rng.next_u64() % 1000) as f64,
                    (rng.next_u64() % 1000) as f64,
                    (rng.next_u64() % 3 + 1) as f64,
                )
            })
            .collect();

        let big = BlockStore::in_memory(EmConfig::new(8, 1024).unwrap());
        let mut f = object_file(&big, &objs);
        let base = solve_maxrs(&big, &mut f, 120.0, 90.0).unwrap();
        assert_eq!(base.stats.max_depth, 0);

        let small = BlockStore::in_memory(EmConfig::with_fanout(4, 16, Some(2)).unwrap());
        let mut f = object_file(&small, &objs);
        let rec = solve_maxrs(&small, &mut f, 120.0, 90.0).unwrap();
        assert!(rec.stats.max_depth > 0);
        assert_eq!(base.max_sum, rec.max_sum);
    }
}
