//! Division phase: pick child-slab boundaries from edge ranks, then route
//! every event in one ordered pass. Pieces that fully span a child slab are
//! withheld from the recursion as spanning events; everything else is cropped
//! into the child that holds one of its original vertical edges.

use super::records::{EdgeRecord, RectEvent, Slab, SpanEvent};
use crate::emstore::{BlockFile, BlockStore, BlockWriter};
use crate::error::Result;

/// One child sub-problem produced by [`divide`].
pub struct ChildInput {
    pub events: BlockFile<RectEvent>,
    pub edges: BlockFile<EdgeRecord>,
    pub slab: Slab,
}

/// Splits a node into up to `m` children plus its spanning-event file.
///
/// Boundaries are the edge values at ranks `ceil(E*i/m)` of the x-sorted edge
/// file; duplicate or out-of-range values collapse, shrinking the fan-out for
/// this node rather than failing.
pub fn divide(
    store: &BlockStore,
    events: &mut BlockFile<RectEvent>,
    edges: &mut BlockFile<EdgeRecord>,
    slab: &Slab,
) -> Result<(Vec<ChildInput>, BlockFile<SpanEvent>)> {
    let interior = choose_boundaries(store, edges, slab)?;
    route(store, events, edges, slab, &interior)
}

fn choose_boundaries(
    store: &BlockStore,
    edges: &mut BlockFile<EdgeRecord>,
    slab: &Slab,
) -> Result<Vec<f64>> {
    let m = store.cfg().fanout() as u64;
    let e = edges.len();
    let b = store.cfg().block_records() as u64;
    let mut vals: Vec<f64> = Vec::new();
    let mut cached: Option<(u64, Vec<EdgeRecord>)> = None;
    for i in 1..m {
        let rank = (e * i).div_ceil(m);
        if rank == 0 {
            continue;
        }
        let idx = rank - 1;
        let blk = idx / b;
        if cached.as_ref().map(|c| c.0) != Some(blk) {
            cached = Some((blk, edges.read_block(blk)?));
        }
        vals.push(cached.as_ref().unwrap().1[(idx % b) as usize].x);
    }
    vals.dedup();
    vals.retain(|&x| slab.x_lo < x && x < slab.x_hi);
    if vals.is_empty() {
        // Rank choices degenerated onto the slab's left bound. Every
        // non-spanning piece keeps an original edge strictly inside the
        // slab, so a usable split value always exists; the smallest one
        // turns the stuck pieces into spanning events of the right child.
        let mut r = edges.reader();
        let mut found = None;
        while let Some(rec) = r.next()? {
            if rec.x > slab.x_lo && rec.x < slab.x_hi {
                found = Some(rec.x);
                break;
            }
        }
        vals.push(found.expect("edge file holds no value inside the slab"));
    }
    Ok(vals)
}

/// Routes events and edges against an explicit boundary set. Exposed within
/// the crate so tests can pin the decomposition.
pub(crate) fn route(
    store: &BlockStore,
    events: &mut BlockFile<RectEvent>,
    edges: &mut BlockFile<EdgeRecord>,
    slab: &Slab,
    interior: &[f64],
) -> Result<(Vec<ChildInput>, BlockFile<SpanEvent>)> {
    debug_assert!(interior.windows(2).all(|w| w[0] < w[1]));
    let mut bs = Vec::with_capacity(interior.len() + 2);
    bs.push(slab.x_lo);
    bs.extend_from_slice(interior);
    bs.push(slab.x_hi);
    let nc = bs.len() - 1;

    // Event pass: one reader, nc child writers, one spanning writer.
    let mut ev_writers: Vec<BlockWriter<RectEvent>> = Vec::with_capacity(nc);
    for _ in 0..nc {
        ev_writers.push(store.create()?);
    }
    let mut span_writer = store.create::<SpanEvent>()?;
    {
        let mut r = events.reader();
        while let Some(e) = r.next()? {
            let c_first = interior.partition_point(|&v| v <= e.x1);
            let c_last = interior.partition_point(|&v| v < e.x2);
            debug_assert!(c_first <= c_last && c_last < nc);
            let mut span: Option<(usize, usize)> = None;
            for c in c_first..=c_last {
                if e.x1 <= bs[c] && bs[c + 1] <= e.x2 {
                    span = Some(match span {
                        None => (c, c),
                        Some((f, t)) => {
                            debug_assert_eq!(t + 1, c);
                            (f, c)
                        }
                    });
                } else {
                    let x1 = e.x1.max(bs[c]);
                    let x2 = e.x2.min(bs[c + 1]);
                    debug_assert!(x1 < x2);
                    ev_writers[c].push(RectEvent { y: e.y, kind: e.kind, x1, x2, w: e.w })?;
                }
            }
            if let Some((f, t)) = span {
                span_writer.push(SpanEvent {
                    y: e.y,
                    kind: e.kind,
                    slab_from: f as u32,
                    slab_to: t as u32,
                    w: e.w,
                })?;
            }
        }
    }
    let mut ev_files = Vec::with_capacity(nc);
    for w in ev_writers {
        ev_files.push(w.finish()?);
    }
    let spanning = span_writer.finish()?;

    // Edge pass: edges are x-sorted, so children fill in order and only one
    // writer is live alongside the reader.
    let mut edge_files: Vec<BlockFile<EdgeRecord>> = Vec::with_capacity(nc);
    {
        let mut r = edges.reader();
        let mut pending = r.next()?;
        for c in 0..nc {
            let mut w = store.create::<EdgeRecord>()?;
            while let Some(rec) = pending {
                let child = interior.partition_point(|&v| v <= rec.x);
                debug_assert!(child >= c, "edge file not x-sorted");
                if child != c {
                    pending = Some(rec);
                    break;
                }
                w.push(rec)?;
                pending = r.next()?;
            }
            edge_files.push(w.finish()?);
        }
        debug_assert!(pending.is_none());
    }

    let children = ev_files
        .into_iter()
        .zip(edge_files)
        .enumerate()
        .map(|(c, (events, edges))| ChildInput {
            events,
            edges,
            slab: Slab { x_lo: bs[c], x_hi: bs[c + 1] },
        })
        .collect();
    Ok((children, spanning))
}
