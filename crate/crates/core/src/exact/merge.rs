//! MergeSweep: combines the m child slab-files and the node's spanning
//! events into the slab-file of the union slab.
//!
//! The sweep batches everything sharing one y: spanning deltas are folded
//! into the per-slab running totals first, then the per-slab base tuples are
//! replaced, and one tuple is emitted from the recomputed effective sums.
//! Base sums are stored separately from the running totals so a y carrying
//! only spanning events still yields a correct tuple.

use std::cmp::Ordering;

use super::records::{EventKind, Slab, SlabTuple, SpanEvent};
use super::SlabFile;
use crate::emstore::{BlockFile, BlockStore, PeekReader};
use crate::error::{Error, Result};

/// Merges child slab-files (left to right, tiling the parent) with the
/// spanning-event file. Inputs must be y-sorted; tuples at y = -inf are
/// boot-strap rows and only initialize state.
pub fn merge_sweep(
    store: &BlockStore,
    mut inputs: Vec<SlabFile>,
    mut spanning: BlockFile<SpanEvent>,
) -> Result<SlabFile> {
    let m = inputs.len();
    if m == 0 {
        return Err(Error::InvalidParameter("merge_sweep needs at least one slab-file".into()));
    }
    for w in inputs.windows(2) {
        if w[0].slab.x_hi != w[1].slab.x_lo {
            return Err(Error::InvalidParameter(format!(
                "child slabs must tile the parent without overlap: [{}, {}) then [{}, {})",
                w[0].slab.x_lo, w[0].slab.x_hi, w[1].slab.x_lo, w[1].slab.x_hi
            )));
        }
    }
    let union = Slab { x_lo: inputs[0].slab.x_lo, x_hi: inputs[m - 1].slab.x_hi };

    // Per-slab state: current max-interval, its base sum, and the running
    // total of spanning weights crossing the sweep line.
    let _state_lease = store.lease(m);
    let mut interval: Vec<(f64, f64)> = inputs.iter().map(|s| (s.slab.x_lo, s.slab.x_hi)).collect();
    let mut base = vec![0.0f64; m];
    let mut up = vec![0.0f64; m];

    let mut out = store.create::<SlabTuple>()?;
    let mut emitted = false;
    {
        let mut span_cur = PeekReader::new(&mut spanning)?;
        let mut tuple_curs: Vec<PeekReader<'_, SlabTuple>> = Vec::with_capacity(m);
        for sf in inputs.iter_mut() {
            tuple_curs.push(PeekReader::new(&mut sf.file)?);
        }

        loop {
            let mut y: Option<f64> = span_cur.peek().map(|e| e.y);
            for c in &tuple_curs {
                if let Some(t) = c.peek() {
                    y = Some(match y {
                        None => t.y,
                        Some(cur) if t.y.total_cmp(&cur) == Ordering::Less => t.y,
                        Some(cur) => cur,
                    });
                }
            }
            let Some(y) = y else { break };

            while let Some(e) = span_cur.peek() {
                if e.y != y {
                    break;
                }
                let e = span_cur.advance()?.unwrap();
                let (from, to) = (e.slab_from as usize, e.slab_to as usize);
                if from > to || to >= m {
                    return Err(Error::InvalidParameter(format!(
                        "spanning event addresses slabs {from}..={to} of {m}"
                    )));
                }
                let delta = match e.kind {
                    EventKind::Bottom => e.w,
                    EventKind::Top => -e.w,
                };
                for slot in &mut up[from..=to] {
                    *slot += delta;
                }
            }
            for (i, c) in tuple_curs.iter_mut().enumerate() {
                if let Some(t) = c.peek() {
                    if t.y == y {
                        let t = c.advance()?.unwrap();
                        interval[i] = (t.x1, t.x2);
                        base[i] = t.sum;
                    }
                }
            }
            if y == f64::NEG_INFINITY {
                continue;
            }

            let mut best = f64::NEG_INFINITY;
            for i in 0..m {
                let eff = base[i] + up[i];
                if eff > best {
                    best = eff;
                }
            }
            // Leftmost maximal candidate, extended across touching intervals
            // of adjacent slabs with the same effective sum.
            let first = (0..m).find(|&i| base[i] + up[i] == best).unwrap();
            let mut last = first;
            while last + 1 < m
                && base[last + 1] + up[last + 1] == best
                && interval[last].1 == interval[last + 1].0
            {
                last += 1;
            }
            out.push(SlabTuple { y, x1: interval[first].0, x2: interval[last].1, sum: best })?;
            emitted = true;
        }
    }
    if !emitted {
        out.push(SlabTuple { y: f64::NEG_INFINITY, x1: union.x_lo, x2: union.x_hi, sum: 0.0 })?;
    }
    Ok(SlabFile { file: out.finish()?, slab: union })
}
