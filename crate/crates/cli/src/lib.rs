//! Command implementations behind the `maxrs` binary: dataset generation,
//! the exact and approximate solvers, the brute-force oracles, a self-check
//! command, and the benchmark sweeps with CSV output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use maxrs::approx::{solve_maxcrs, MaxCrsReport};
use maxrs::dataset::{self, Distribution, GenSpec, WeightMode};
use maxrs::emstore::{BlockStore, EmConfig};
use maxrs::exact::{solve_maxrs, MaxRsReport};
use maxrs::geometry::{location_weight, rect_of_object, WeightedCircle, WeightedObject, WeightedRect};
use maxrs::oracle::{brute_maxcrs, brute_maxrs, OracleAnswer};
use maxrs::{Error, Result};

/// Keep oracle runs to sizes where the cubic cost stays interactive.
const ORACLE_N_CAP: u64 = 2000;

/// External-memory model flags shared by every solving command.
#[derive(Debug, Clone, Copy)]
pub struct EmArgs {
    pub block_records: usize,
    pub mem_records: usize,
    pub fanout: Option<usize>,
}

impl Default for EmArgs {
    fn default() -> Self {
        EmArgs { block_records: 8, mem_records: 128, fanout: None }
    }
}

impl EmArgs {
    pub fn config(&self) -> Result<EmConfig> {
        EmConfig::with_fanout(self.block_records, self.mem_records, self.fanout)
    }
}

fn disk_store(em: &EmArgs) -> Result<(tempfile::TempDir, BlockStore)> {
    let dir = tempfile::tempdir().map_err(Error::Io)?;
    let store = BlockStore::on_disk(em.config()?, dir.path())?;
    Ok((dir, store))
}

pub struct GenParams {
    pub n: u64,
    /// Defaults to 4n, the desk-scale analog of the coordinate-range rule.
    pub extent: Option<f64>,
    pub dist: Distribution,
    pub seed: u64,
    pub out: PathBuf,
    /// Convert a whitespace-separated `x y [w]` text file instead of
    /// sampling; `normalize` rescales its bounding box to [0, 1000000]^2.
    pub from_text: Option<PathBuf>,
    pub normalize: bool,
}

fn spec_of(p: &GenParams) -> GenSpec {
    GenSpec {
        n: p.n,
        extent: p.extent.unwrap_or(4.0 * p.n.max(1) as f64),
        distribution: p.dist,
        weight_mode: WeightMode::Unit,
        seed: p.seed,
    }
}

/// `gen`: write a synthetic dataset to `out`, or convert a text point file.
pub fn run_gen(p: &GenParams, em: &EmArgs) -> Result<String> {
    let (_dir, store) = disk_store(em)?;
    if let Some(text) = &p.from_text {
        let mut imported = dataset::load_text_points(&store, text, 1.0, p.normalize)?;
        let objs = imported.read_all()?;
        dataset::save_objects(&store, &p.out, &objs)?;
        return Ok(format!(
            "imported {} objects from {} to {}{}",
            objs.len(),
            text.display(),
            p.out.display(),
            if p.normalize { " (normalized)" } else { "" }
        ));
    }
    let spec = spec_of(p);
    let f = dataset::generate_to(&store, &spec, &p.out)?;
    Ok(format!(
        "wrote {} objects to {} (extent {}, seed {})",
        f.len(),
        p.out.display(),
        spec.extent,
        spec.seed
    ))
}

/// Loads a dataset into memory for the oracle and verify paths.
fn load_all(path: &Path, em: &EmArgs) -> Result<Vec<WeightedObject>> {
    let (_dir, store) = disk_store(em)?;
    let mut f = dataset::open_objects(&store, path)?;
    f.read_all()
}

pub struct MaxRsOutcome {
    pub n: u64,
    pub report: MaxRsReport,
    pub wall_ms: u64,
}

/// `maxrs`: exact solve over an object file.
pub fn run_maxrs(data: &Path, d1: f64, d2: f64, em: &EmArgs) -> Result<MaxRsOutcome> {
    let (_dir, store) = disk_store(em)?;
    let mut objects = dataset::open_objects(&store, data)?;
    let n = objects.len();
    let t = Instant::now();
    let report = solve_maxrs(&store, &mut objects, d1, d2)?;
    Ok(MaxRsOutcome { n, report, wall_ms: t.elapsed().as_millis() as u64 })
}

pub fn format_maxrs(out: &MaxRsOutcome, em: &EmArgs) -> String {
    let mut s = String::new();
    let r = &out.report;
    let _ = writeln!(s, "algorithm: exact_maxrs");
    let _ = writeln!(s, "n: {}", out.n);
    let _ = writeln!(s, "B: {}  M: {}", em.block_records, em.mem_records);
    let _ = writeln!(s, "point: {} {}", r.point.x, r.point.y);
    let _ = writeln!(s, "max_sum: {}", r.max_sum);
    let _ = writeln!(
        s,
        "region: x in ({}, {}), y in ({}, {})",
        r.region.x1, r.region.x2, r.region.y1, r.region.y2
    );
    let _ = writeln!(
        s,
        "io_sort: {}  io_sweep: {}  io_total: {}",
        r.io_sort.total(),
        r.io_sweep.total(),
        r.io_sort.total() + r.io_sweep.total()
    );
    let _ = writeln!(s, "recursion_depth: {}", r.stats.max_depth);
    let _ = writeln!(s, "wall_ms: {}", out.wall_ms);
    s
}

pub struct MaxCrsOutcome {
    pub n: u64,
    pub report: MaxCrsReport,
    pub wall_ms: u64,
}

/// `maxcrs`: quarter-approximate circular solve over an object file.
pub fn run_maxcrs(data: &Path, diam: f64, sigma: Option<f64>, em: &EmArgs) -> Result<MaxCrsOutcome> {
    let (_dir, store) = disk_store(em)?;
    let mut objects = dataset::open_objects(&store, data)?;
    let n = objects.len();
    let t = Instant::now();
    let report = solve_maxcrs(&store, &mut objects, diam, sigma)?;
    Ok(MaxCrsOutcome { n, report, wall_ms: t.elapsed().as_millis() as u64 })
}

pub fn format_maxcrs(out: &MaxCrsOutcome, em: &EmArgs) -> String {
    let mut s = String::new();
    let r = &out.report;
    let _ = writeln!(s, "algorithm: approx_maxcrs");
    let _ = writeln!(s, "n: {}", out.n);
    let _ = writeln!(s, "B: {}  M: {}", em.block_records, em.mem_records);
    let _ = writeln!(s, "sigma: {}", r.sigma);
    let _ = writeln!(s, "square_center: {} {}  square_sum: {}", r.p0.x, r.p0.y, r.mbr_sum);
    for (i, (p, v)) in r.answer.candidates.iter().enumerate() {
        let tag = if i == 0 { " (center)" } else { "" };
        let _ = writeln!(s, "candidate_{i}: {} {} value {}{}", p.x, p.y, v, tag);
    }
    let _ = writeln!(s, "point: {} {}", r.answer.point.x, r.answer.point.y);
    let _ = writeln!(s, "value: {}", r.answer.value);
    let _ = writeln!(
        s,
        "io_sort: {}  io_sweep: {}  io_total: {}",
        r.io_sort.total(),
        r.io_sweep.total(),
        r.io_sort.total() + r.io_sweep.total()
    );
    let _ = writeln!(s, "wall_ms: {}", out.wall_ms);
    s
}

pub enum OracleQuery {
    Rect { d1: f64, d2: f64 },
    Circle { diam: f64 },
}

/// `oracle`: brute-force ground truth over an object file held in memory.
pub fn run_oracle(data: &Path, query: &OracleQuery, em: &EmArgs) -> Result<(OracleAnswer, String)> {
    let objs = load_all(data, em)?;
    if objs.len() as u64 > ORACLE_N_CAP {
        return Err(Error::InvalidParameter(format!(
            "oracle input has {} objects; cap is {ORACLE_N_CAP}",
            objs.len()
        )));
    }
    let (ans, name) = match query {
        OracleQuery::Rect { d1, d2 } => (brute_maxrs(&objs, *d1, *d2)?, "brute_maxrs"),
        OracleQuery::Circle { diam } => (brute_maxcrs(&objs, *diam), "brute_maxcrs"),
    };
    let text = format!(
        "algorithm: {name}\nn: {}\npoint: {} {}\nvalue: {}\n",
        objs.len(),
        ans.point.x,
        ans.point.y,
        ans.value
    );
    Ok((ans, text))
}

pub struct VerifyParams {
    pub n: u64,
    pub extent: Option<f64>,
    pub dist: Distribution,
    pub seed: u64,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub diam: Option<f64>,
}

/// `verify`: generate an instance, solve both problems, and cross-check
/// against the oracles. Returns the report text and whether it all passed.
pub fn run_verify(p: &VerifyParams, em: &EmArgs) -> Result<(bool, String)> {
    if p.n > ORACLE_N_CAP {
        return Err(Error::InvalidParameter(format!(
            "verify needs n <= {ORACLE_N_CAP} for the oracles, got {}",
            p.n
        )));
    }
    let extent = p.extent.unwrap_or(4.0 * p.n.max(1) as f64);
    let d1 = p.d1.unwrap_or(extent / 250.0);
    let d2 = p.d2.unwrap_or(d1);
    let diam = p.diam.unwrap_or(d1);
    let spec = GenSpec {
        n: p.n,
        extent,
        distribution: p.dist,
        weight_mode: WeightMode::Unit,
        seed: p.seed,
    };

    let mut text = String::new();
    let mut ok = true;
    let check = |name: &str, pass: bool, detail: String, text: &mut String| {
        let _ = writeln!(text, "{}: {name} {detail}", if pass { "PASS" } else { "FAIL" });
        pass
    };

    let (_dir, store) = disk_store(em)?;
    let mut objects = dataset::generate(&store, &spec)?;
    let objs = objects.read_all()?;

    let exact = solve_maxrs(&store, &mut objects, d1, d2)?;
    let rect_oracle = brute_maxrs(&objs, d1, d2)?;
    ok &= check(
        "exact_maxrs matches oracle",
        exact.max_sum == rect_oracle.value,
        format!("(exact {} vs oracle {})", exact.max_sum, rect_oracle.value),
        &mut text,
    );
    let rects: Vec<WeightedRect> =
        objs.iter().map(|o| rect_of_object(o, d1, d2)).collect::<Result<_>>()?;
    let realized = location_weight(&rects, exact.point);
    ok &= check(
        "returned point realizes the sum",
        realized == exact.max_sum,
        format!("(point weight {realized})"),
        &mut text,
    );

    let approx = solve_maxcrs(&store, &mut objects, diam, None)?;
    let circle_oracle = brute_maxcrs(&objs, diam);
    let floor_ok = circle_oracle.value == 0.0
        || approx.answer.value / circle_oracle.value >= 0.25 - 1e-12;
    ok &= check(
        "approx_maxcrs respects the quarter floor",
        floor_ok,
        format!("(approx {} vs oracle {})", approx.answer.value, circle_oracle.value),
        &mut text,
    );

    let square = WeightedRect {
        x1: approx.p0.x - diam / 2.0,
        x2: approx.p0.x + diam / 2.0,
        y1: approx.p0.y - diam / 2.0,
        y2: approx.p0.y + diam / 2.0,
        w: 1.0,
    };
    let disks: Vec<WeightedCircle> = approx.answer.candidates[1..]
        .iter()
        .map(|(p, _)| WeightedCircle { cx: p.x, cy: p.y, d: diam, w: 1.0 })
        .collect();
    let contained = objs
        .iter()
        .filter(|o| square.covers(o.point()))
        .all(|o| disks.iter().any(|c| c.covers(o.point())));
    ok &= check(
        "shifted disks cover the center square",
        contained,
        String::new(),
        &mut text,
    );

    let _ = writeln!(text, "verify: {}", if ok { "PASS" } else { "FAIL" });
    Ok((ok, text))
}

/// One benchmark measurement, serialized as a CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: String,
    pub n: u64,
    pub b: usize,
    pub m: usize,
    pub range_or_diameter: f64,
    pub io_sort: u64,
    pub io_sweep: u64,
    pub io_total: u64,
    pub answer_value: f64,
    pub wall_ms: u64,
}

pub const CSV_HEADER: &str =
    "algorithm,n,B,M,range_or_diameter,io_sort,io_sweep,io_total,answer_value,wall_ms";

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.n,
            self.b,
            self.m,
            self.range_or_diameter,
            self.io_sort,
            self.io_sweep,
            self.io_total,
            self.answer_value,
            self.wall_ms
        )
    }

    pub fn parse(line: &str) -> Result<BenchRow> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::Parse { line: 0, msg: format!("expected 10 CSV fields, got {}", f.len()) });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse { line: 0, msg: format!("bad number `{s}`") })
        };
        Ok(BenchRow {
            algorithm: f[0].to_string(),
            n: num(f[1])? as u64,
            b: num(f[2])? as usize,
            m: num(f[3])? as usize,
            range_or_diameter: num(f[4])?,
            io_sort: num(f[5])? as u64,
            io_sweep: num(f[6])? as u64,
            io_total: num(f[7])? as u64,
            answer_value: num(f[8])?,
            wall_ms: num(f[9])? as u64,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchAxis {
    /// Dataset cardinality sweep.
    N,
    /// Memory budget sweep (records).
    Buffer,
    /// Query rectangle side sweep.
    Range,
    /// Circle diameter sweep (approximate solver plus oracle when feasible).
    Diam,
}

pub struct BenchParams {
    pub axis: BenchAxis,
    pub values: Option<Vec<f64>>,
    pub n: u64,
    pub extent: Option<f64>,
    pub dist: Distribution,
    pub seed: u64,
    pub d1: Option<f64>,
    pub diam: Option<f64>,
    pub csv: Option<PathBuf>,
}

fn default_values(axis: BenchAxis, extent: f64) -> Vec<f64> {
    match axis {
        BenchAxis::N => vec![1000.0, 2000.0, 5000.0, 10000.0, 20000.0],
        BenchAxis::Buffer => vec![128.0, 256.0, 512.0, 1024.0],
        BenchAxis::Range | BenchAxis::Diam => {
            vec![extent / 500.0, extent / 250.0, extent / 100.0, extent / 50.0]
        }
    }
}

/// `bench`: sweep one axis and append one row per measurement to the CSV.
pub fn run_bench(p: &BenchParams, em: &EmArgs) -> Result<Vec<BenchRow>> {
    let base_extent = p.extent.unwrap_or(4.0 * p.n.max(1) as f64);
    let values = match &p.values {
        Some(v) if !v.is_empty() => v.clone(),
        _ => default_values(p.axis, base_extent),
    };
    let mut rows = Vec::new();

    for &v in &values {
        let (n, em_run, d) = match p.axis {
            BenchAxis::N => {
                let n = v as u64;
                let extent = p.extent.unwrap_or(4.0 * n.max(1) as f64);
                (n, *em, p.d1.unwrap_or(extent / 250.0))
            }
            BenchAxis::Buffer => {
                let mut em_run = *em;
                em_run.mem_records = v as usize;
                (p.n, em_run, p.d1.unwrap_or(base_extent / 250.0))
            }
            BenchAxis::Range | BenchAxis::Diam => (p.n, *em, v),
        };
        let extent = p.extent.unwrap_or(4.0 * n.max(1) as f64);
        let spec = GenSpec {
            n,
            extent,
            distribution: p.dist,
            weight_mode: WeightMode::Unit,
            seed: p.seed,
        };

        let (_dir, store) = disk_store(&em_run)?;
        let mut objects = dataset::generate(&store, &spec)?;

        if p.axis == BenchAxis::Diam {
            let diam = v;
            let t = Instant::now();
            let report = solve_maxcrs(&store, &mut objects, diam, None)?;
            rows.push(BenchRow {
                algorithm: "approx_maxcrs".into(),
                n,
                b: em_run.block_records,
                m: em_run.mem_records,
                range_or_diameter: diam,
                io_sort: report.io_sort.total(),
                io_sweep: report.io_sweep.total(),
                io_total: report.io_sort.total() + report.io_sweep.total(),
                answer_value: report.answer.value,
                wall_ms: t.elapsed().as_millis() as u64,
            });
            if n <= 400 {
                let objs = objects.read_all()?;
                let t = Instant::now();
                let ans = brute_maxcrs(&objs, diam);
                rows.push(BenchRow {
                    algorithm: "brute_maxcrs".into(),
                    n,
                    b: em_run.block_records,
                    m: em_run.mem_records,
                    range_or_diameter: diam,
                    io_sort: 0,
                    io_sweep: 0,
                    io_total: 0,
                    answer_value: ans.value,
                    wall_ms: t.elapsed().as_millis() as u64,
                });
            }
        } else {
            let t = Instant::now();
            let report = solve_maxrs(&store, &mut objects, d, d)?;
            rows.push(BenchRow {
                algorithm: "exact_maxrs".into(),
                n,
                b: em_run.block_records,
                m: em_run.mem_records,
                range_or_diameter: d,
                io_sort: report.io_sort.total(),
                io_sweep: report.io_sweep.total(),
                io_total: report.io_sort.total() + report.io_sweep.total(),
                answer_value: report.max_sum,
                wall_ms: t.elapsed().as_millis() as u64,
            });
        }
    }

    if let Some(csv) = &p.csv {
        append_csv(csv, &rows)?;
    }
    Ok(rows)
}

fn append_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let need_header = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if need_header {
        writeln!(f, "{CSV_HEADER}")?;
    }
    for r in rows {
        writeln!(f, "{}", r.csv_line())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_rows_round_trip_through_csv() {
        let row = BenchRow {
            algorithm: "exact_maxrs".into(),
            n: 1000,
            b: 8,
            m: 128,
            range_or_diameter: 16.0,
            io_sort: 812,
            io_sweep: 1343,
            io_total: 2155,
            answer_value: 17.0,
            wall_ms: 3,
        };
        assert_eq!(BenchRow::parse(&row.csv_line()).unwrap(), row);
        assert_eq!(CSV_HEADER.split(',').count(), 10);
    }

    #[test]
    fn verify_passes_on_the_default_instance() {
        let p = VerifyParams {
            n: 150,
            extent: None,
            dist: Distribution::Uniform,
            seed: 1,
            d1: None,
            d2: None,
            diam: None,
        };
        let (ok, text) = run_verify(&p, &EmArgs::default()).unwrap();
        assert!(ok, "verify failed:\n{text}");
    }

    #[test]
    fn bench_n_axis_io_is_monotone() {
        let p = BenchParams {
            axis: BenchAxis::N,
            values: Some(vec![1000.0, 2000.0, 4000.0]),
            n: 0,
            extent: None,
            dist: Distribution::Uniform,
            seed: 1,
            d1: None,
            diam: None,
            csv: None,
        };
        let rows = run_bench(&p, &EmArgs::default()).unwrap();
        assert_eq!(rows.len(), 3);
        for w in rows.windows(2) {
            assert!(w[0].io_total <= w[1].io_total);
            assert_eq!(w[0].io_total, w[0].io_sort + w[0].io_sweep);
        }
    }

    #[test]
    fn maxrs_on_empty_dataset_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("empty.mxrs");
        let em = EmArgs::default();
        run_gen(
            &GenParams {
                n: 0,
                extent: Some(100.0),
                dist: Distribution::Uniform,
                seed: 1,
                out: out.clone(),
                from_text: None,
                normalize: false,
            },
            &em,
        )
        .unwrap();
        let res = run_maxrs(&out, 2.0, 2.0, &em).unwrap();
        assert_eq!(res.report.max_sum, 0.0);
    }
}
