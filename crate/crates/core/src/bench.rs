//! Experiment pipeline: single runs, seeded suites, CSV reports and plots.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::downsweep::{downsweep, Tour};
use crate::error::{Error, Result};
use crate::hk::{held_karp_with_upper_bound, DEFAULT_ITERATIONS};
use crate::instances::{default_cluster_count, generate_clustered, generate_uniform, Instance};
use crate::oracles::{depth_first_shortcut, enumerate_conforming_min, is_conforming, MAX_ENUMERATION_N};
use crate::tree::{degree_increase, minimum_spanning_tree, root_tree, tree_weight, RootedTree};
use crate::upsweep::{upsweep, Depth, Retention, UpsweepConfig};

pub const CSV_HEADER: [&str; 11] = [
    "instance",
    "n",
    "heuristic",
    "D",
    "k",
    "mst_weight",
    "tour_weight",
    "hk_bound",
    "excess_pct",
    "wall_time_ms",
    "seed",
];

/// `DT_{D,k}`: degree limit `D` (1 disables the degree increase) and search depth `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Heuristic {
    pub degree_limit: usize,
    pub depth: Depth,
}

impl Heuristic {
    /// Plain minimum-weight double tree, `DT_{1,inf}`.
    pub const FULL: Heuristic = Heuristic {
        degree_limit: 1,
        depth: Depth::Unlimited,
    };

    pub fn new(degree_limit: usize, depth: Depth) -> Result<Self> {
        if degree_limit == 0 || degree_limit == 2 {
            return Err(Error::Config(format!(
                "degree limit must be 1 (off) or at least 3, got {degree_limit}"
            )));
        }
        if depth == Depth::Limited(0) {
            return Err(Error::Config("search depth must be at least 1".into()));
        }
        Ok(Heuristic { degree_limit, depth })
    }

    pub fn label(&self) -> String {
        if *self == Self::FULL {
            "DT".to_string()
        } else {
            format!("DT_{}_{}", self.degree_limit, self.depth)
        }
    }

    /// `DT_{1,16}` through `DT_{5,32}` at depths 16 and 32.
    pub fn default_grid() -> Vec<Heuristic> {
        [(1, 16), (3, 16), (3, 32), (4, 16), (4, 32), (5, 16), (5, 32)]
            .into_iter()
            .map(|(d, k)| Heuristic {
                degree_limit: d,
                depth: Depth::Limited(k),
            })
            .collect()
    }
}

impl FromStr for Heuristic {
    type Err = Error;

    /// `dt`, or `D:k` with `k` a count or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("dt") {
            return Ok(Heuristic::FULL);
        }
        let (d, k) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("heuristic `{s}` is not `dt` or `D:k`")))?;
        let d = d
            .parse()
            .map_err(|_| Error::Config(format!("bad degree limit `{d}`")))?;
        let k = match k {
            "inf" => Depth::Unlimited,
            k => Depth::Limited(k.parse().map_err(|_| Error::Config(format!("bad depth `{k}`")))?),
        };
        Heuristic::new(d, k)
    }
}

/// Parse a comma-separated grid; `default` expands to [`Heuristic::default_grid`]
/// and `default+dt` additionally includes plain `DT`.
pub fn parse_grid(spec: &str) -> Result<Vec<Heuristic>> {
    let mut out = Vec::new();
    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
        match part.trim() {
            "default" => out.extend(Heuristic::default_grid()),
            "default+dt" => {
                out.push(Heuristic::FULL);
                out.extend(Heuristic::default_grid());
            }
            p => out.push(p.parse()?),
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty heuristic grid".into()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceClass {
    Uniform,
    Clustered,
}

impl FromStr for InstanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(InstanceClass::Uniform),
            "clustered" => Ok(InstanceClass::Clustered),
            other => Err(Error::Config(format!("unknown instance class `{other}`"))),
        }
    }
}

/// Parameters of a generated instance, e.g. `uniform,n=1000,seed=3,box=1e6`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub class: InstanceClass,
    pub n: usize,
    pub seed: u64,
    pub side: f64,
    pub clusters: Option<usize>,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Instance> {
        match self.class {
            InstanceClass::Uniform => generate_uniform(self.n, self.seed, self.side),
            InstanceClass::Clustered => generate_clustered(
                self.n,
                self.seed,
                self.side,
                self.clusters.unwrap_or_else(|| default_cluster_count(self.n)),
            ),
        }
    }
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',');
        let class = parts.next().unwrap_or_default().trim().parse()?;
        let mut spec = GenSpec {
            class,
            n: 0,
            seed: 1,
            side: 1e6,
            clusters: None,
        };
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{kv}`")))?;
            let bad = || Error::Config(format!("bad value for `{k}`: `{v}`"));
            match k.trim() {
                "n" => spec.n = v.parse().map_err(|_| bad())?,
                "seed" => spec.seed = v.parse().map_err(|_| bad())?,
                "box" => spec.side = v.parse().map_err(|_| bad())?,
                "clusters" => spec.clusters = Some(v.parse().map_err(|_| bad())?),
                other => return Err(Error::Config(format!("unknown generator key `{other}`"))),
            }
        }
        if spec.n == 0 {
            return Err(Error::Config("generator spec needs n >= 1".into()));
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub n: usize,
    pub heuristic: String,
    pub degree_limit: usize,
    pub depth: Depth,
    pub mst_weight: f64,
    pub tour_weight: f64,
    pub hk_bound: Option<f64>,
    pub wall_time_ms: f64,
    pub seed: Option<u64>,
}

impl RunRecord {
    pub fn excess_pct(&self) -> Option<f64> {
        self.hk_bound.map(|b| 100.0 * (self.tour_weight / b - 1.0))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Subgradient steps for the lower bound; 0 skips it.
    pub hk_iterations: usize,
    /// Compare against exhaustive enumeration when the instance is small enough.
    pub cross_check: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            hk_iterations: DEFAULT_ITERATIONS,
            cross_check: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub tour: Tour,
    pub tree: RootedTree,
}

/// Everything about an instance that does not depend on the heuristic.
pub struct Prepared<'a> {
    pub inst: &'a Instance,
    pub mst_weight: f64,
    pub tree: RootedTree,
    pub hk_bound: Option<f64>,
    pub seed: Option<u64>,
}

impl<'a> Prepared<'a> {
    pub fn new(inst: &'a Instance, hk_iterations: usize, seed: Option<u64>) -> Result<Self> {
        if inst.len() < 2 {
            return Err(Error::InvalidInput("tours need at least 2 nodes".into()));
        }
        let edges = minimum_spanning_tree(inst);
        let tree = root_tree(&edges, inst.len())?;
        let hk_bound = if hk_iterations > 0 && inst.len() >= 3 {
            let ub = depth_first_shortcut(inst, &tree).weight;
            Some(held_karp_with_upper_bound(inst, hk_iterations, ub)?)
        } else {
            None
        };
        Ok(Prepared {
            inst,
            mst_weight: tree_weight(&edges),
            tree,
            hk_bound,
            seed,
        })
    }

    /// Run one heuristic and verify its tour.
    pub fn run(&self, h: Heuristic, cross_check: bool) -> Result<RunOutcome> {
        let start = Instant::now();
        let tree = if h.degree_limit > 1 {
            degree_increase(&self.tree, h.degree_limit)?
        } else {
            self.tree.clone()
        };
        let up = upsweep(self.inst, &tree, UpsweepConfig::new(h.depth, Retention::Bipartitions))?;
        let tour = downsweep(self.inst, &tree, &up)?;
        let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

        verify_tour(self.inst, &tree, &tour, up.weight, self.mst_weight)?;
        if cross_check && self.inst.len() <= MAX_ENUMERATION_N && h.depth == Depth::Unlimited {
            let best = enumerate_conforming_min(self.inst, &tree)?;
            if !close(best.weight, tour.weight) {
                return Err(Error::Invariant(format!(
                    "tour weight {} differs from the exhaustive optimum {}",
                    tour.weight, best.weight
                )));
            }
        }
        if let Some(b) = self.hk_bound {
            if b > tour.weight * (1.0 + 1e-9) {
                return Err(Error::Invariant(format!(
                    "lower bound {b} exceeds tour weight {}",
                    tour.weight
                )));
            }
        }
        let record = RunRecord {
            instance: self.inst.name().to_string(),
            n: self.inst.len(),
            heuristic: h.label(),
            degree_limit: h.degree_limit,
            depth: h.depth,
            mst_weight: self.mst_weight,
            tour_weight: tour.weight,
            hk_bound: self.hk_bound,
            wall_time_ms,
            seed: self.seed,
        };
        Ok(RunOutcome { record, tour, tree })
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Permutation, conformance, weight agreement with the upsweep, and the
/// factor-two bound.
pub fn verify_tour(inst: &Instance, tree: &RootedTree, tour: &Tour, expected: f64, mst_weight: f64) -> Result<()> {
    if !tour.is_permutation(inst.len()) {
        return Err(Error::Invariant("tour is not a permutation".into()));
    }
    if !is_conforming(tour, tree)? {
        return Err(Error::Invariant("tour does not conform to the tree".into()));
    }
    if !close(tour.weight, expected) {
        return Err(Error::Invariant(format!(
            "tour weight {} differs from upsweep weight {expected}",
            tour.weight
        )));
    }
    if tour.weight > 2.0 * mst_weight * (1.0 + 1e-9) {
        return Err(Error::Invariant(format!(
            "tour weight {} exceeds twice the spanning tree weight {mst_weight}",
            tour.weight
        )));
    }
    Ok(())
}

/// Generate or load, then run one heuristic end to end.
pub fn run_single(inst: &Instance, h: Heuristic, opts: RunOptions, seed: Option<u64>) -> Result<RunOutcome> {
    Prepared::new(inst, opts.hk_iterations, seed)?.run(h, opts.cross_check)
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub sizes: Vec<usize>,
    pub seeds: u64,
    pub grid: Vec<Heuristic>,
    pub class: InstanceClass,
    pub side: f64,
    pub clusters: Option<usize>,
    pub hk_iterations: usize,
    /// Write measured wall time; off gives byte-identical reruns.
    pub timing: bool,
}

#[derive(Clone, Debug)]
pub enum SuiteRow {
    Run(RunRecord),
    Failed {
        instance: String,
        n: usize,
        heuristic: Heuristic,
        seed: u64,
        error: String,
    },
}

/// Run every heuristic on every generated instance. Instances are processed
/// in parallel; rows come back in `(size, seed, heuristic)` order. A failing
/// run becomes a [`SuiteRow::Failed`] row instead of aborting the suite.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    if cfg.sizes.iter().any(|&n| n < 4) {
        return Err(Error::Config("suite sizes must be at least 4".into()));
    }
    if cfg.grid.is_empty() {
        return Err(Error::Config("empty heuristic grid".into()));
    }
    let jobs: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (1..=cfg.seeds).map(move |s| (n, s)))
        .collect();
    let rows: Vec<Vec<SuiteRow>> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let spec = GenSpec {
                class: cfg.class,
                n,
                seed,
                side: cfg.side,
                clusters: cfg.clusters,
            };
            let failed = |h: Heuristic, name: &str, e: &Error| SuiteRow::Failed {
                instance: name.to_string(),
                n,
                heuristic: h,
                seed,
                error: e.to_string(),
            };
            let inst = match spec.generate() {
                Ok(i) => i,
                Err(e) => return cfg.grid.iter().map(|&h| failed(h, "?", &e)).collect(),
            };
            let prep = match Prepared::new(&inst, cfg.hk_iterations, Some(seed)) {
                Ok(p) => p,
                Err(e) => return cfg.grid.iter().map(|&h| failed(h, inst.name(), &e)).collect(),
            };
            cfg.grid
                .iter()
                .map(|&h| match prep.run(h, false) {
                    Ok(out) => SuiteRow::Run(out.record),
                    Err(e) => failed(h, inst.name(), &e),
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_default()
}

fn record_fields(r: &RunRecord, timing: bool) -> Vec<String> {
    vec![
        r.instance.clone(),
        r.n.to_string(),
        r.heuristic.clone(),
        r.degree_limit.to_string(),
        r.depth.to_string(),
        format!("{:.6}", r.mst_weight),
        format!("{:.6}", r.tour_weight),
        fmt_opt(r.hk_bound, 6),
        fmt_opt(r.excess_pct(), 4),
        if timing { format!("{:.3}", r.wall_time_ms) } else { String::new() },
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
    ]
}

/// Write records under [`CSV_HEADER`].
pub fn write_records_csv<W: std::io::Write>(out: W, records: &[RunRecord], timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(record_fields(r, timing))?;
    }
    w.flush()?;
    Ok(())
}

/// Suite rows followed, per size, by one `mean` row per heuristic.
/// Failed runs keep their identifying columns and carry `FAILED` as the tour weight.
pub fn write_suite_csv<W: std::io::Write>(out: W, rows: &[SuiteRow], cfg: &SuiteConfig) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for &n in &cfg.sizes {
        let of_size = |row: &&SuiteRow| match row {
            SuiteRow::Run(r) => r.n == n,
            SuiteRow::Failed { n: m, .. } => *m == n,
        };
        for row in rows.iter().filter(of_size) {
            match row {
                SuiteRow::Run(r) => w.write_record(record_fields(r, cfg.timing))?,
                SuiteRow::Failed {
                    instance,
                    n,
                    heuristic,
                    seed,
                    ..
                } => w.write_record([
                    instance.clone(),
                    n.to_string(),
                    heuristic.label(),
                    heuristic.degree_limit.to_string(),
                    heuristic.depth.to_string(),
                    String::new(),
                    "FAILED".to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    seed.to_string(),
                ])?,
            }
        }
        for h in &cfg.grid {
            let label = h.label();
            let runs: Vec<&RunRecord> = rows
                .iter()
                .filter(of_size)
                .filter_map(|row| match row {
                    SuiteRow::Run(r) if r.heuristic == label => Some(r),
                    _ => None,
                })
                .collect();
            if runs.is_empty() {
                continue;
            }
            let mean = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Option<f64> {
                let vals: Option<Vec<f64>> = runs.iter().map(|r| f(r)).collect();
                vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
            };
            w.write_record([
                "mean".to_string(),
                n.to_string(),
                label.clone(),
                h.degree_limit.to_string(),
                h.depth.to_string(),
                fmt_opt(mean(&|r| Some(r.mst_weight)), 6),
                fmt_opt(mean(&|r| Some(r.tour_weight)), 6),
                fmt_opt(mean(&|r| r.hk_bound), 6),
                fmt_opt(mean(&|r| r.excess_pct()), 4),
                if cfg.timing { fmt_opt(mean(&|r| Some(r.wall_time_ms)), 3) } else { String::new() },
                String::new(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// TSPLIB `TOUR_SECTION` output (1-based, `-1` terminated).
pub fn format_tour_tsplib(name: &str, tour: &Tour) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME : {name}.tour");
    let _ = writeln!(out, "TYPE : TOUR");
    let _ = writeln!(out, "COMMENT : weight {}", tour.weight);
    let _ = writeln!(out, "DIMENSION : {}", tour.len());
    out.push_str("TOUR_SECTION\n");
    for &v in &tour.order {
        let _ = writeln!(out, "{}", v + 1);
    }
    out.push_str("-1\nEOF\n");
    out
}

/// One 0-based node index per line.
pub fn format_tour_plain(tour: &Tour) -> String {
    tour.order.iter().map(|v| format!("{v}\n")).collect()
}

/// SVG drawing of the points, the tree (dashed) and the tour (solid).
pub fn render_svg(inst: &Instance, tree: &RootedTree, tour: &Tour) -> Result<String> {
    let pts = inst
        .points()
        .ok_or_else(|| Error::InvalidInput("plots need point coordinates".into()))?;
    if pts.is_empty() {
        return Err(Error::InvalidInput("nothing to plot".into()));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let size = 800.0;
    let margin = 20.0;
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let scale = (size - 2.0 * margin) / span;
    let sx = |x: f64| margin + (x - x0) * scale;
    let sy = |y: f64| size - margin - (y - y0) * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    out.push_str("<g class=\"tree\" stroke=\"#999\" stroke-dasharray=\"4 3\" stroke-width=\"1\">\n");
    for (p, c) in tree.edges() {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            sx(pts[p].x),
            sy(pts[p].y),
            sx(pts[c].x),
            sy(pts[c].y)
        );
    }
    out.push_str("</g>\n<g class=\"tour\" stroke=\"#c33\" stroke-width=\"1.5\">\n");
    let n = tour.len();
    for i in 0..n {
        let a = pts[tour.order[i]];
        let b = pts[tour.order[(i + 1) % n]];
        let _ = writeln!(
            out,
            r#"<line class="tour-edge" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            sx(a.x),
            sy(a.y),
            sx(b.x),
            sy(b.y)
        );
    }
    out.push_str("</g>\n<g class=\"points\" fill=\"#123\">\n");
    for p in pts {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#, sx(p.x), sy(p.y));
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

pub fn emit_plot(inst: &Instance, tree: &RootedTree, tour: &Tour, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(inst, tree, tour)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{Metric, Point};

    fn square() -> Instance {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect();
        Instance::from_points("square", pts, Metric::EuclidReal).unwrap()
    }

    #[test]
    fn heuristic_parsing() {
        assert_eq!("dt".parse::<Heuristic>().unwrap(), Heuristic::FULL);
        assert_eq!(
            "5:16".parse::<Heuristic>().unwrap(),
            Heuristic {
                degree_limit: 5,
                depth: Depth::Limited(16)
            }
        );
        assert_eq!("1:inf".parse::<Heuristic>().unwrap().label(), "DT");
        assert_eq!("3:32".parse::<Heuristic>().unwrap().label(), "DT_3_32");
        assert!("2:16".parse::<Heuristic>().is_err());
        assert!("5:0".parse::<Heuristic>().is_err());
        assert!("5".parse::<Heuristic>().is_err());
        assert_eq!(parse_grid("default").unwrap().len(), 7);
        assert_eq!(parse_grid("default+dt").unwrap()[0], Heuristic::FULL);
        assert_eq!(parse_grid("dt, 4:16").unwrap().len(), 2);
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn gen_spec_parsing() {
        let g: GenSpec = "uniform,n=10,seed=4,box=2".parse().unwrap();
        assert_eq!((g.n, g.seed, g.side), (10, 4, 2.0));
        let g: GenSpec = "clustered,n=50,clusters=5".parse().unwrap();
        assert_eq!(g.clusters, Some(5));
        assert!("uniform".parse::<GenSpec>().is_err());
        assert!("ring,n=5".parse::<GenSpec>().is_err());
        assert!("uniform,n=5,colour=red".parse::<GenSpec>().is_err());
    }

    #[test]
    fn single_run_small() {
        let inst = generate_uniform(4, 1, 1.0).unwrap();
        let out = run_single(&inst, Heuristic::FULL, RunOptions { cross_check: true, ..Default::default() }, Some(1))
            .unwrap();
        let r = &out.record;
        assert!(r.tour_weight <= 2.0 * r.mst_weight);
        assert!(r.excess_pct().unwrap() >= -1e-9);
    }

    #[test]
    fn tour_formats() {
        let t = Tour {
            order: vec![2, 0, 1],
            weight: 3.0,
        };
        let s = format_tour_tsplib("x", &t);
        assert!(s.contains("TOUR_SECTION\n3\n1\n2\n-1\nEOF\n"));
        assert_eq!(format_tour_plain(&t), "2\n0\n1\n");
    }

    #[test]
    fn svg_counts() {
        let inst = square();
        let out = run_single(&inst, Heuristic::FULL, RunOptions::default(), None).unwrap();
        let svg = render_svg(&inst, &out.tree, &out.tour).unwrap();
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("class=\"tour-edge\"").count(), 4);

        let m = Instance::from_matrix("m", 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let t = RootedTree::from_parents(0, vec![None, Some(0)]).unwrap();
        let tour = Tour::from_order(&m, vec![0, 1]);
        assert!(render_svg(&m, &t, &tour).is_err());
    }

    #[test]
    fn suite_rows_and_means() {
        let cfg = SuiteConfig {
            sizes: vec![30],
            seeds: 3,
            grid: vec!["1:16".parse().unwrap()],
            class: InstanceClass::Uniform,
            side: 1e6,
            clusters: None,
            hk_iterations: 50,
            timing: false,
        };
        let rows = run_suite(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        let mut buf = Vec::new();
        write_suite_csv(&mut buf, &rows, &cfg).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 1 + 3 + 1);
        assert!(lines[4].starts_with("mean,30,DT_1_16,1,16,"));

        let bad = SuiteConfig { sizes: vec![3], ..cfg };
        assert!(run_suite(&bad).is_err());
    }
}
