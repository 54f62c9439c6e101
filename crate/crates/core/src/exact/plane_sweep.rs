//! In-memory base case: a bottom-to-top sweep over coordinate-compressed
//! x-slots, emitting one max-interval tuple per distinct event y.
//!
//! All events sharing a y are applied before the tuple for the strip above
//! that y is emitted; with open rectangles the strip is affected by every
//! event at its bottom h-line regardless of kind, so no further tie-breaking
//! between Bottom and Top is needed.

use std::cmp::Ordering;

use super::records::{EventKind, RectEvent, Slab, SlabTuple};
use super::SlabFile;
use crate::emstore::BlockStore;
use crate::error::Result;

/// Segment tree with lazy range addition over slots, maintaining per node the
/// maximum value and the leftmost maximal run of slots attaining it.
struct MaxRunTree {
    n: usize,
    max: Vec<f64>,
    run_start: Vec<usize>,
    run_end: Vec<usize>,
    lazy: Vec<f64>,
}

impl MaxRunTree {
    fn new(n: usize) -> MaxRunTree {
        assert!(n >= 1);
        let size = 4 * n;
        let mut t = MaxRunTree {
            n,
            max: vec![0.0; size],
            run_start: vec![0; size],
            run_end: vec![0; size],
            lazy: vec![0.0; size],
        };
        t.build(1, 0, n - 1);
        t
    }

    fn build(&mut self, node: usize, lo: usize, hi: usize) {
        self.run_start[node] = lo;
        self.run_end[node] = hi;
        if lo == hi {
            return;
        }
        let mid = (lo + hi) / 2;
        self.build(2 * node, lo, mid);
        self.build(2 * node + 1, mid + 1, hi);
    }

    fn apply(&mut self, node: usize, delta: f64) {
        self.max[node] += delta;
        self.lazy[node] += delta;
    }

    fn push(&mut self, node: usize) {
        let d = self.lazy[node];
        if d != 0.0 {
            self.apply(2 * node, d);
            self.apply(2 * node + 1, d);
            self.lazy[node] = 0.0;
        }
    }

    fn pull(&mut self, node: usize, mid: usize) {
        let l = 2 * node;
        let r = 2 * node + 1;
        if self.max[l] >= self.max[r] {
            self.max[node] = self.max[l];
            self.run_start[node] = self.run_start[l];
            self.run_end[node] =
                if self.max[l] == self.max[r] && self.run_end[l] == mid && self.run_start[r] == mid + 1 {
                    self.run_end[r]
                } else {
                    self.run_end[l]
                };
        } else {
            self.max[node] = self.max[r];
            self.run_start[node] = self.run_start[r];
            self.run_end[node] = self.run_end[r];
        }
    }

    fn add(&mut self, l: usize, r: usize, delta: f64) {
        debug_assert!(l <= r && r < self.n);
        self.add_rec(1, 0, self.n - 1, l, r, delta);
    }

    fn add_rec(&mut self, node: usize, lo: usize, hi: usize, l: usize, r: usize, delta: f64) {
        if r < lo || hi < l {
            return;
        }
        if l <= lo && hi <= r {
            self.apply(node, delta);
            return;
        }
        self.push(node);
        let mid = (lo + hi) / 2;
        self.add_rec(2 * node, lo, mid, l, r, delta);
        self.add_rec(2 * node + 1, mid + 1, hi, l, r, delta);
        self.pull(node, mid);
    }

    /// (maximum, leftmost maximal run) over all slots.
    fn root(&self) -> (f64, usize, usize) {
        (self.max[1], self.run_start[1], self.run_end[1])
    }
}

/// Sweeps in-memory events (y-sorted, at most M of them) over `slab` and
/// streams out the slab-file. An empty input materializes the boot-strap
/// tuple over the full slab so merge inputs are never empty files.
pub fn plane_sweep(store: &BlockStore, events: &[RectEvent], slab: &Slab) -> Result<SlabFile> {
    assert!(
        events.len() <= store.cfg().mem_records(),
        "plane_sweep input of {} events exceeds memory budget M = {}",
        events.len(),
        store.cfg().mem_records()
    );
    assert!(
        events.windows(2).all(|w| w[0].y.total_cmp(&w[1].y) != Ordering::Greater),
        "plane_sweep events must be sorted by y"
    );

    let mut out = store.create::<SlabTuple>()?;
    if events.is_empty() {
        out.push(SlabTuple { y: f64::NEG_INFINITY, x1: slab.x_lo, x2: slab.x_hi, sum: 0.0 })?;
        return Ok(SlabFile { file: out.finish()?, slab: *slab });
    }

    let mut xs: Vec<f64> = Vec::with_capacity(2 * events.len() + 2);
    xs.push(slab.x_lo);
    xs.push(slab.x_hi);
    for e in events {
        debug_assert!(e.x1 < e.x2);
        xs.push(e.x1);
        xs.push(e.x2);
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
    let slot = |x: f64| -> usize {
        xs.binary_search_by(|v| v.total_cmp(&x)).expect("event x within slot table")
    };

    let mut tree = MaxRunTree::new(xs.len() - 1);
    let mut i = 0;
    while i < events.len() {
        let y = events[i].y;
        let mut j = i;
        while j < events.len() && events[j].y == y {
            let e = &events[j];
            let delta = match e.kind {
                EventKind::Bottom => e.w,
                EventKind::Top => -e.w,
            };
            tree.add(slot(e.x1), slot(e.x2) - 1, delta);
            j += 1;
        }
        let (sum, a, b) = tree.root();
        out.push(SlabTuple { y, x1: xs[a], x2: xs[b + 1], sum })?;
        i = j;
    }
    Ok(SlabFile { file: out.finish()?, slab: *slab })
}
