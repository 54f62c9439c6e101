//! Synthetic dataset generation and the binary / text object formats.
//!
//! Object files start with a 16-byte header — magic `MXRS`, version `u16`,
//! flags `u16`, record count `u64`, all little-endian — followed by 24-byte
//! records `x(8) y(8) w(8)` as IEEE-754 little-endian. The flags record the
//! generator (low nibble: 0 external, 1 splitmix64) and the distribution
//! (bits 4-5: 0 uniform, 1 gaussian, 2 imported text), so a file is fully
//! reproducible from its `GenSpec`.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::emstore::{BlockFile, BlockStore, BlockWriter, Record};
use crate::error::{Error, Result};
use crate::geometry::WeightedObject;

pub const OBJECT_FILE_MAGIC: &[u8; 4] = b"MXRS";
pub const OBJECT_FILE_VERSION: u16 = 1;
pub const OBJECT_HEADER_LEN: usize = 16;

const PRNG_SPLITMIX64: u16 = 1;

// x(8) y(8) w(8), little-endian
impl Record for WeightedObject {
    const SIZE: usize = 24;

    fn write_to(&self, buf: &mut [u8]) {
        buf[0..8].copy_from_slice(&self.x.to_le_bytes());
        buf[8..16].copy_from_slice(&self.y.to_le_bytes());
        buf[16..24].copy_from_slice(&self.w.to_le_bytes());
    }

    fn read_from(buf: &[u8]) -> Self {
        WeightedObject {
            x: f64::from_le_bytes(buf[0..8].try_into().unwrap()),
            y: f64::from_le_bytes(buf[8..16].try_into().unwrap()),
            w: f64::from_le_bytes(buf[16..24].try_into().unwrap()),
        }
    }
}

/// Fixed-increment splitmix64. Small, seedable, and stable across builds, so
/// identical specs produce bit-identical files.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1].
    fn next_f64_open_low(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64_open_low();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Every object weighs 1.
    Unit,
    /// Integer weights uniform in 1..=10.
    RandomInt,
}

/// Everything that determines a synthetic dataset, bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub n: u64,
    /// Domain is the square [0, extent]^2.
    pub extent: f64,
    pub distribution: Distribution,
    pub weight_mode: WeightMode,
    pub seed: u64,
}

impl GenSpec {
    /// Desk-scale default: the domain side scales with cardinality as 4n.
    pub fn desk(n: u64, distribution: Distribution, seed: u64) -> GenSpec {
        GenSpec {
            n,
            extent: 4.0 * n.max(1) as f64,
            distribution,
            weight_mode: WeightMode::Unit,
            seed,
        }
    }

    fn flags(&self) -> u16 {
        let dist = match self.distribution {
            Distribution::Uniform => 0u16,
            Distribution::Gaussian => 1,
        };
        PRNG_SPLITMIX64 | (dist << 4)
    }
}

fn header_bytes(flags: u16, count: u64) -> [u8; OBJECT_HEADER_LEN] {
    let mut h = [0u8; OBJECT_HEADER_LEN];
    h[0..4].copy_from_slice(OBJECT_FILE_MAGIC);
    h[4..6].copy_from_slice(&OBJECT_FILE_VERSION.to_le_bytes());
    h[6..8].copy_from_slice(&flags.to_le_bytes());
    h[8..16].copy_from_slice(&count.to_le_bytes());
    h
}

fn parse_header(h: &[u8]) -> Result<u64> {
    if &h[0..4] != OBJECT_FILE_MAGIC {
        return Err(Error::Corrupt("bad magic, not an object file".into()));
    }
    let version = u16::from_le_bytes(h[4..6].try_into().unwrap());
    if version != OBJECT_FILE_VERSION {
        return Err(Error::Corrupt(format!("unsupported object file version {version}")));
    }
    Ok(u64::from_le_bytes(h[8..16].try_into().unwrap()))
}

fn generate_into(spec: &GenSpec, mut w: BlockWriter<WeightedObject>) -> Result<BlockFile<WeightedObject>> {
    if !spec.extent.is_finite() || spec.extent <= 0.0 {
        return Err(Error::InvalidParameter(format!("extent must be positive, got {}", spec.extent)));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let mean = spec.extent / 2.0;
    let sd = spec.extent / 8.0;
    for _ in 0..spec.n {
        let (x, y) = match spec.distribution {
            Distribution::Uniform => (rng.next_f64() * spec.extent, rng.next_f64() * spec.extent),
            Distribution::Gaussian => {
                // One central cluster, resampled per axis until inside the domain.
                let draw = |rng: &mut SplitMix64| loop {
                    let v = mean + sd * rng.next_gaussian();
                    if (0.0..=spec.extent).contains(&v) {
                        return v;
                    }
                };
                (draw(&mut rng), draw(&mut rng))
            }
        };
        let w_val = match spec.weight_mode {
            WeightMode::Unit => 1.0,
            WeightMode::RandomInt => (rng.next_u64() % 10 + 1) as f64,
        };
        w.push(WeightedObject::new(x, y, w_val))?;
    }
    w.finish()
}

/// Generates the dataset into store scratch space.
pub fn generate(store: &BlockStore, spec: &GenSpec) -> Result<BlockFile<WeightedObject>> {
    generate_into(spec, store.create_with_header(&header_bytes(spec.flags(), spec.n))?)
}

/// Generates the dataset into a real file at `path`.
pub fn generate_to(store: &BlockStore, spec: &GenSpec, path: &Path) -> Result<BlockFile<WeightedObject>> {
    generate_into(spec, store.create_at(path, &header_bytes(spec.flags(), spec.n))?)
}

/// Opens an object file, validating magic, version, and record count.
pub fn open_objects(store: &BlockStore, path: &Path) -> Result<BlockFile<WeightedObject>> {
    let (header, file) = store.open_at::<WeightedObject>(path, OBJECT_HEADER_LEN)?;
    let count = parse_header(&header)?;
    if count != file.len() {
        return Err(Error::Corrupt(format!(
            "header claims {count} records but the file holds {}",
            file.len()
        )));
    }
    Ok(file)
}

/// Writes objects to `path` in the standard object-file format, flagged as
/// externally sourced.
pub fn save_objects(store: &BlockStore, path: &Path, objs: &[WeightedObject]) -> Result<()> {
    let flags = 2u16 << 4;
    let mut w = store.create_at(path, &header_bytes(flags, objs.len() as u64))?;
    for o in objs {
        w.push(*o)?;
    }
    w.finish()?;
    Ok(())
}

/// Parses whitespace-separated `x y` or `x y w` lines into an object file in
/// scratch space. With `normalize`, coordinates are affinely mapped so the
/// data's bounding box becomes [0, 1000000]^2.
pub fn load_text_points(
    store: &BlockStore,
    path: &Path,
    default_weight: f64,
    normalize: bool,
) -> Result<BlockFile<WeightedObject>> {
    const NORM_EXTENT: f64 = 1_000_000.0;
    let reader = BufReader::new(fs::File::open(path)?);
    let mut objs: Vec<WeightedObject> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `x y` or `x y w`, got {} fields", fields.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("{what} `{s}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line: lineno, msg: format!("{what} must be finite") });
            }
            // Flush -0.0 so open-boundary comparisons stay consistent.
            Ok(v + 0.0)
        };
        let x = num(fields[0], "x")?;
        let y = num(fields[1], "y")?;
        let w = if fields.len() == 3 { num(fields[2], "weight")? } else { default_weight };
        if w < 0.0 {
            return Err(Error::Parse { line: lineno, msg: "weight must be non-negative".into() });
        }
        objs.push(WeightedObject::new(x, y, w));
    }

    if normalize && !objs.is_empty() {
        let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
        for o in &objs {
            min_x = min_x.min(o.x);
            max_x = max_x.max(o.x);
            min_y = min_y.min(o.y);
            max_y = max_y.max(o.y);
        }
        let scale = |v: f64, lo: f64, hi: f64| {
            if hi > lo {
                (v - lo) / (hi - lo) * NORM_EXTENT
            } else {
                0.0
            }
        };
        for o in &mut objs {
            o.x = scale(o.x, min_x, max_x);
            o.y = scale(o.y, min_y, max_y);
        }
    }

    let flags = 2u16 << 4; // external source
    let mut w = store.create_with_header(&header_bytes(flags, objs.len() as u64))?;
    for o in &objs {
        w.push(*o)?;
    }
    w.finish()
}
