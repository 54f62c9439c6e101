//! On-disk record layouts for the distribution sweep. All fields are
//! little-endian; sentinel infinities are stored as IEEE-754 infinities.

use crate::emstore::Record;

/// A vertical strip of the plane, `[x_lo, x_hi)` for event routing.
/// Bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slab {
    pub x_lo: f64,
    pub x_hi: f64,
}

impl Slab {
    pub const FULL: Slab = Slab { x_lo: f64::NEG_INFINITY, x_hi: f64::INFINITY };

    pub fn new(x_lo: f64, x_hi: f64) -> Slab {
        debug_assert!(x_lo < x_hi);
        Slab { x_lo, x_hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum EventKind {
    Bottom = 0,
    Top = 1,
}

impl EventKind {
    fn from_byte(b: u8) -> EventKind {
        if b == 0 {
            EventKind::Bottom
        } else {
            EventKind::Top
        }
    }
}

/// A horizontal-edge event of a (possibly cropped) weighted rectangle.
/// Each rectangle contributes one Bottom at y1 and one Top at y2 with
/// identical (x1, x2, w).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectEvent {
    pub y: f64,
    pub kind: EventKind,
    pub x1: f64,
    pub x2: f64,
    pub w: f64,
}

// y(8) kind(1) pad(7) x1(8) x2(8) w(8)
impl Record for RectEvent {
    const SIZE: usize = 40;

    fn write_to(&self, buf: &mut [u8]) {
        buf[0..8].copy_from_slice(&self.y.to_le_bytes());
        buf[8] = self.kind as u8;
        buf[9..16].fill(0);
        buf[16..24].copy_from_slice(&self.x1.to_le_bytes());
        buf[24..32].copy_from_slice(&self.x2.to_le_bytes());
        buf[32..40].copy_from_slice(&self.w.to_le_bytes());
    }

    fn read_from(buf: &[u8]) -> Self {
        RectEvent {
            y: f64::from_le_bytes(buf[0..8].try_into().unwrap()),
            kind: EventKind::from_byte(buf[8]),
            x1: f64::from_le_bytes(buf[16..24].try_into().unwrap()),
            x2: f64::from_le_bytes(buf[24..32].try_into().unwrap()),
            w: f64::from_le_bytes(buf[32..40].try_into().unwrap()),
        }
    }
}

/// One original (uncropped) vertical rectangle edge of the sub-problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub x: f64,
}

impl Record for EdgeRecord {
    const SIZE: usize = 8;

    fn write_to(&self, buf: &mut [u8]) {
        buf[0..8].copy_from_slice(&self.x.to_le_bytes());
    }

    fn read_from(buf: &[u8]) -> Self {
        EdgeRecord { x: f64::from_le_bytes(buf[0..8].try_into().unwrap()) }
    }
}

/// Horizontal-edge event of a rectangle piece that fully spans the child
/// slabs `slab_from..=slab_to` of its division node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanEvent {
    pub y: f64,
    pub kind: EventKind,
    pub slab_from: u32,
    pub slab_to: u32,
    pub w: f64,
}

// y(8) kind(1) pad(3) slab_from(4) slab_to(4) pad(4) w(8)
impl Record for SpanEvent {
    const SIZE: usize = 32;

    fn write_to(&self, buf: &mut [u8]) {
        buf[0..8].copy_from_slice(&self.y.to_le_bytes());
        buf[8] = self.kind as u8;
        buf[9..12].fill(0);
        buf[12..16].copy_from_slice(&self.slab_from.to_le_bytes());
        buf[16..20].copy_from_slice(&self.slab_to.to_le_bytes());
        buf[20..24].fill(0);
        buf[24..32].copy_from_slice(&self.w.to_le_bytes());
    }

    fn read_from(buf: &[u8]) -> Self {
        SpanEvent {
            y: f64::from_le_bytes(buf[0..8].try_into().unwrap()),
            kind: EventKind::from_byte(buf[8]),
            slab_from: u32::from_le_bytes(buf[12..16].try_into().unwrap()),
            slab_to: u32::from_le_bytes(buf[16..20].try_into().unwrap()),
            w: f64::from_le_bytes(buf[24..32].try_into().unwrap()),
        }
    }
}

/// One max-interval record of a slab-file: on the strip above h-line `y`,
/// `[x1, x2]` attains the slab's maximum location-weight `sum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabTuple {
    pub y: f64,
    pub x1: f64,
    pub x2: f64,
    pub sum: f64,
}

impl Record for SlabTuple {
    const SIZE: usize = 32;

    fn write_to(&self, buf: &mut [u8]) {
        buf[0..8].copy_from_slice(&self.y.to_le_bytes());
        buf[8..16].copy_from_slice(&self.x1.to_le_bytes());
        buf[16..24].copy_from_slice(&self.x2.to_le_bytes());
        buf[24..32].copy_from_slice(&self.sum.to_le_bytes());
    }

    fn read_from(buf: &[u8]) -> Self {
        SlabTuple {
            y: f64::from_le_bytes(buf[0..8].try_into().unwrap()),
            x1: f64::from_le_bytes(buf[8..16].try_into().unwrap()),
            x2: f64::from_le_bytes(buf[16..24].try_into().unwrap()),
            sum: f64::from_le_bytes(buf[24..32].try_into().unwrap()),
        }
    }
}
