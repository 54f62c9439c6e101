//! Simulated external memory: a block-granular file store with I/O counting,
//! a memory budget, and an external merge sort.
//!
//! All data moves between "disk" and memory in whole blocks of `B` records
//! (the last block of a file may be partial), and every transfer bumps the
//! shared [`IoStats`] counters. The store also meters the algorithm layer's
//! resident records through [`MemLease`] handles so that the budget of `M`
//! records plus `m + 2` block buffers is enforced at runtime, not assumed.
//!
//! Files are write-once: a [`BlockWriter`] stages records through a single
//! block buffer, and `finish()` seals the file for block reads. Backing is
//! either an in-memory byte array or a real file; both are accessed only in
//! block-sized chunks.

mod sort;

pub use sort::external_sort;

use std::cell::RefCell;
use std::fs;
use std::io::{Read, Seek, SeekFrom, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use crate::error::{Error, Result};

/// Fixed-size binary encoding of one record kind.
pub trait Record: Copy {
    /// Encoded size in bytes.
    const SIZE: usize;

    fn write_to(&self, buf: &mut [u8]);
    fn read_from(buf: &[u8]) -> Self;
}

/// External-memory model parameters, in records.
#[derive(Debug, Clone, Copy)]
pub struct EmConfig {
    block_records: usize,
    mem_records: usize,
    fanout: usize,
}

impl EmConfig {
    /// `b` records per block and `m` records of memory, with the default
    /// fan-out `max(2, M/B - 2)` (two blocks reserved: one output buffer and
    /// one spanning-stream input buffer).
    pub fn new(block_records: usize, mem_records: usize) -> Result<EmConfig> {
        Self::with_fanout(block_records, mem_records, None)
    }

    pub fn with_fanout(
        block_records: usize,
        mem_records: usize,
        fanout: Option<usize>,
    ) -> Result<EmConfig> {
        if block_records < 1 {
            return Err(Error::InvalidParameter("B must be at least 1".into()));
        }
        if mem_records < 2 * block_records {
            return Err(Error::InvalidParameter(format!(
                "memory must hold at least two blocks (M = {mem_records}, B = {block_records})"
            )));
        }
        let max_fanout = (mem_records / block_records).saturating_sub(2).max(2);
        let fanout = fanout.unwrap_or(max_fanout);
        if fanout < 2 || fanout > max_fanout {
            return Err(Error::InvalidParameter(format!(
                "fan-out {fanout} outside [2, {max_fanout}]"
            )));
        }
        Ok(EmConfig { block_records, mem_records, fanout })
    }

    /// Records per block (B).
    pub fn block_records(&self) -> usize {
        self.block_records
    }

    /// Records of main-memory capacity (M).
    pub fn mem_records(&self) -> usize {
        self.mem_records
    }

    /// Division fan-out / merge fan-in (m).
    pub fn fanout(&self) -> usize {
        self.fanout
    }

    /// Runtime memory ceiling: M records plus m + 2 block buffers.
    pub fn mem_limit(&self) -> usize {
        self.mem_records + (self.fanout + 2) * self.block_records
    }
}

/// Counts of whole-block transfers through the store.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IoStats {
    pub blocks_read: u64,
    pub blocks_written: u64,
}

impl IoStats {
    pub fn total(&self) -> u64 {
        self.blocks_read + self.blocks_written
    }

    /// Transfers since an earlier snapshot.
    pub fn since(&self, earlier: IoStats) -> IoStats {
        IoStats {
            blocks_read: self.blocks_read - earlier.blocks_read,
            blocks_written: self.blocks_written - earlier.blocks_written,
        }
    }
}

#[derive(Debug, Default)]
struct MemGauge {
    current: usize,
    high_water: usize,
}

enum ScratchBackend {
    Memory,
    Disk(PathBuf),
}

struct StoreInner {
    cfg: EmConfig,
    io: RefCell<IoStats>,
    mem: RefCell<MemGauge>,
    scratch: ScratchBackend,
    next_scratch_id: RefCell<u64>,
}

impl StoreInner {
    fn add_read(&self) {
        self.io.borrow_mut().blocks_read += 1;
    }

    fn add_write(&self) {
        self.io.borrow_mut().blocks_written += 1;
    }

    fn acquire(&self, records: usize) {
        let mut g = self.mem.borrow_mut();
        g.current += records;
        assert!(
            g.current <= self.cfg.mem_limit(),
            "memory budget exceeded: {} resident records > limit {} (M = {}, B = {}, m = {})",
            g.current,
            self.cfg.mem_limit(),
            self.cfg.mem_records,
            self.cfg.block_records,
            self.cfg.fanout,
        );
        if g.current > g.high_water {
            g.high_water = g.current;
        }
    }

    fn release(&self, records: usize) {
        let mut g = self.mem.borrow_mut();
        debug_assert!(g.current >= records);
        g.current -= records;
    }
}

/// Tracks records the algorithm layer holds resident; released on drop.
pub struct MemLease {
    store: Rc<StoreInner>,
    records: usize,
}

impl Drop for MemLease {
    fn drop(&mut self) {
        self.store.release(self.records);
    }
}

/// Factory for block files sharing one I/O counter and one memory gauge.
///
/// A store is single-threaded; distinct stores are independent.
#[derive(Clone)]
pub struct BlockStore {
    inner: Rc<StoreInner>,
}

impl BlockStore {
    /// Scratch files live in process memory. Intended for tests and small runs.
    pub fn in_memory(cfg: EmConfig) -> BlockStore {
        BlockStore {
            inner: Rc::new(StoreInner {
                cfg,
                io: RefCell::new(IoStats::default()),
                mem: RefCell::new(MemGauge::default()),
                scratch: ScratchBackend::Memory,
                next_scratch_id: RefCell::new(0),
            }),
        }
    }

    /// Scratch files are real files under `dir` (removed when dropped).
    pub fn on_disk(cfg: EmConfig, dir: &Path) -> Result<BlockStore> {
        fs::create_dir_all(dir)?;
        Ok(BlockStore {
            inner: Rc::new(StoreInner {
                cfg,
                io: RefCell::new(IoStats::default()),
                mem: RefCell::new(MemGauge::default()),
                scratch: ScratchBackend::Disk(dir.to_path_buf()),
                next_scratch_id: RefCell::new(0),
            }),
        })
    }

    pub fn cfg(&self) -> EmConfig {
        self.inner.cfg
    }

    /// Current transfer counters.
    pub fn io_snapshot(&self) -> IoStats {
        *self.inner.io.borrow()
    }

    /// Largest number of resident records observed so far.
    pub fn mem_high_water(&self) -> usize {
        self.inner.mem.borrow().high_water
    }

    /// Lease `records` from the memory budget (panics when over the limit).
    pub fn lease(&self, records: usize) -> MemLease {
        self.inner.acquire(records);
        MemLease { store: self.inner.clone(), records }
    }

    fn new_backing(&self) -> Result<Backing> {
        match &self.inner.scratch {
            ScratchBackend::Memory => Ok(Backing::Memory(Vec::new())),
            ScratchBackend::Disk(dir) => {
                let id = {
                    let mut n = self.inner.next_scratch_id.borrow_mut();
                    *n += 1;
                    *n
                };
                let path = dir.join(format!("scratch-{id:06}.blk"));
                let file = fs::OpenOptions::new()
                    .create_new(true)
                    .read(true)
                    .write(true)
                    .open(&path)?;
                Ok(Backing::Disk { file, path: Some(path) })
            }
        }
    }

    /// New headerless scratch file.
    pub fn create<R: Record>(&self) -> Result<BlockWriter<R>> {
        BlockWriter::new(self.inner.clone(), self.new_backing()?, Vec::new())
    }

    /// New scratch file starting with `header` (written as one block transfer).
    pub fn create_with_header<R: Record>(&self, header: &[u8]) -> Result<BlockWriter<R>> {
        BlockWriter::new(self.inner.clone(), self.new_backing()?, header.to_vec())
    }

    /// New file at a real path, starting with `header`.
    pub fn create_at<R: Record>(&self, path: &Path, header: &[u8]) -> Result<BlockWriter<R>> {
        let file = fs::OpenOptions::new()
            .create(true)
            .truncate(true)
            .read(true)
            .write(true)
            .open(path)?;
        BlockWriter::new(
            self.inner.clone(),
            Backing::Disk { file, path: None },
            header.to_vec(),
        )
    }

    /// Open an existing file. The first `header_len` bytes are returned and
    /// counted as one block read; records follow.
    pub fn open_at<R: Record>(&self, path: &Path, header_len: usize) -> Result<(Vec<u8>, BlockFile<R>)> {
        let mut file = fs::File::open(path)?;
        let total = file.metadata()?.len();
        if (total as usize) < header_len {
            return Err(Error::Corrupt(format!(
                "{} is shorter than its {header_len}-byte header",
                path.display()
            )));
        }
        let mut header = vec![0u8; header_len];
        if header_len > 0 {
            file.read_exact(&mut header)?;
            self.inner.add_read();
        }
        let data_len = total - header_len as u64;
        if !data_len.is_multiple_of(R::SIZE as u64) {
            return Err(Error::Corrupt(format!(
                "{}: {data_len} data bytes is not a whole number of {}-byte records",
                path.display(),
                R::SIZE
            )));
        }
        Ok((
            header,
            BlockFile {
                store: self.inner.clone(),
                backing: Backing::Disk { file, path: None },
                header_len,
                len: data_len / R::SIZE as u64,
                _marker: PhantomData,
            },
        ))
    }
}

enum Backing {
    Memory(Vec<u8>),
    Disk { file: fs::File, path: Option<PathBuf> },
}

impl Backing {
    fn write_at(&mut self, off: u64, bytes: &[u8]) -> Result<()> {
        match self {
            Backing::Memory(v) => {
                let end = off as usize + bytes.len();
                if v.len() < end {
                    v.resize(end, 0);
                }
                v[off as usize..end].copy_from_slice(bytes);
                Ok(())
            }
            Backing::Disk { file, .. } => {
                file.seek(SeekFrom::Start(off))?;
                file.write_all(bytes)?;
                Ok(())
            }
        }
    }

    fn read_at(&mut self, off: u64, buf: &mut [u8]) -> Result<()> {
        match self {
            Backing::Memory(v) => {
                let end = off as usize + buf.len();
                buf.copy_from_slice(&v[off as usize..end]);
                Ok(())
            }
            Backing::Disk { file, .. } => {
                file.seek(SeekFrom::Start(off))?;
                file.read_exact(buf)?;
                Ok(())
            }
        }
    }
}

impl Drop for Backing {
    fn drop(&mut self) {
        if let Backing::Disk { path: Some(p), .. } = self {
            let _ = fs::remove_file(p);
        }
    }
}

/// A sealed record file readable in whole blocks.
pub struct BlockFile<R: Record> {
    store: Rc<StoreInner>,
    backing: Backing,
    header_len: usize,
    len: u64,
    _marker: PhantomData<R>,
}

impl<R: Record> BlockFile<R> {
    /// Record count.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of blocks, the last possibly partial.
    pub fn num_blocks(&self) -> u64 {
        let b = self.store.cfg.block_records as u64;
        self.len.div_ceil(b)
    }

    /// Read block `block` (up to B records); one block transfer.
    pub fn read_block(&mut self, block: u64) -> Result<Vec<R>> {
        let blocks = self.num_blocks();
        if block >= blocks {
            return Err(Error::OutOfRange { block, blocks });
        }
        let b = self.store.cfg.block_records as u64;
        let first = block * b;
        let count = (self.len - first).min(b) as usize;
        let mut bytes = vec![0u8; count * R::SIZE];
        let off = self.header_len as u64 + first * R::SIZE as u64;
        self.backing.read_at(off, &mut bytes)?;
        self.store.add_read();
        Ok(bytes.chunks_exact(R::SIZE).map(R::read_from).collect())
    }

    /// Sequential reader holding one block buffer (leased from the budget).
    pub fn reader(&mut self) -> BlockReader<'_, R> {
        let lease_records = self.store.cfg.block_records;
        let store = self.store.clone();
        store.acquire(lease_records);
        BlockReader {
            file: self,
            lease: MemLease { store, records: lease_records },
            block: Vec::new(),
            next_block: 0,
            pos: 0,
        }
    }

    /// Bulk read of the whole file, outside the memory budget. For oracles,
    /// tests, and other explicitly in-memory consumers; I/O is still counted.
    pub fn read_all(&mut self) -> Result<Vec<R>> {
        let mut out = Vec::with_capacity(self.len as usize);
        for block in 0..self.num_blocks() {
            out.extend(self.read_block(block)?);
        }
        Ok(out)
    }
}

/// Streaming reader over a [`BlockFile`].
pub struct BlockReader<'a, R: Record> {
    file: &'a mut BlockFile<R>,
    #[allow(dead_code)]
    lease: MemLease,
    block: Vec<R>,
    next_block: u64,
    pos: usize,
}

impl<'a, R: Record> BlockReader<'a, R> {
    /// Next record, pulling the following block when the buffer drains.
    #[allow(clippy::should_implement_trait)] // fallible, so not Iterator
    pub fn next(&mut self) -> Result<Option<R>> {
        if self.pos == self.block.len() {
            if self.next_block >= self.file.num_blocks() {
                return Ok(None);
            }
            self.block = self.file.read_block(self.next_block)?;
            self.next_block += 1;
            self.pos = 0;
        }
        let rec = self.block[self.pos];
        self.pos += 1;
        Ok(Some(rec))
    }
}

/// Append-only writer staging records through one block buffer.
pub struct BlockWriter<R: Record> {
    store: Rc<StoreInner>,
    backing: Backing,
    header_len: usize,
    #[allow(dead_code)]
    lease: MemLease,
    buf: Vec<R>,
    written: u64,
}

impl<R: Record> BlockWriter<R> {
    fn new(store: Rc<StoreInner>, mut backing: Backing, header: Vec<u8>) -> Result<BlockWriter<R>> {
        if !header.is_empty() {
            backing.write_at(0, &header)?;
            store.add_write();
        }
        let lease_records = store.cfg.block_records;
        store.acquire(lease_records);
        let lease = MemLease { store: store.clone(), records: lease_records };
        Ok(BlockWriter {
            store,
            backing,
            header_len: header.len(),
            lease,
            buf: Vec::new(),
            written: 0,
        })
    }

    pub fn push(&mut self, rec: R) -> Result<()> {
        self.buf.push(rec);
        if self.buf.len() == self.store.cfg.block_records {
            self.flush_block()?;
        }
        Ok(())
    }

    fn flush_block(&mut self) -> Result<()> {
        if self.buf.is_empty() {
            return Ok(());
        }
        let mut bytes = vec![0u8; self.buf.len() * R::SIZE];
        for (i, rec) in self.buf.iter().enumerate() {
            rec.write_to(&mut bytes[i * R::SIZE..(i + 1) * R::SIZE]);
        }
        let off = self.header_len as u64 + self.written * R::SIZE as u64;
        self.backing.write_at(off, &bytes)?;
        self.store.add_write();
        self.written += self.buf.len() as u64;
        self.buf.clear();
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.written + self.buf.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flush any partial block and seal the file for reading.
    pub fn finish(mut self) -> Result<BlockFile<R>> {
        self.flush_block()?;
        Ok(BlockFile {
            store: self.store,
            backing: self.backing,
            header_len: self.header_len,
            len: self.written,
            _marker: PhantomData,
        })
    }
}

/// Reader with one-record lookahead, for ordered merges.
pub(crate) struct PeekReader<'a, R: Record> {
    inner: BlockReader<'a, R>,
    head: Option<R>,
}

impl<'a, R: Record> PeekReader<'a, R> {
    pub fn new(file: &'a mut BlockFile<R>) -> Result<PeekReader<'a, R>> {
        let mut inner = file.reader();
        let head = inner.next()?;
        Ok(PeekReader { inner, head })
    }

    pub fn peek(&self) -> Option<&R> {
        self.head.as_ref()
    }

    pub fn advance(&mut self) -> Result<Option<R>> {
        let out = self.head.take();
        self.head = self.inner.next()?;
        Ok(out)
    }
}
