//! Problem instances: points, metrics, seeded generators and TSPLIB I/O.
//!
//! Random instances are drawn from ChaCha8 (`rand_chacha`), seeded with
//! `seed_from_u64`, so the same parameters produce the same points on every
//! platform.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    fn euclid(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    /// Plain Euclidean distance.
    EuclidReal,
    /// TSPLIB `EUC_2D`: Euclidean distance rounded half-up to an integer.
    EuclidRoundedTsplib,
    ExplicitMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    EuclidReal,
    EuclidRoundedTsplib,
    /// Row-major `n * n` symmetric matrix with zero diagonal.
    ExplicitMatrix(Vec<f64>),
}

impl Metric {
    pub fn kind(&self) -> MetricKind {
        match self {
            Metric::EuclidReal => MetricKind::EuclidReal,
            Metric::EuclidRoundedTsplib => MetricKind::EuclidRoundedTsplib,
            Metric::ExplicitMatrix(_) => MetricKind::ExplicitMatrix,
        }
    }
}

/// A symmetric TSP instance. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    name: String,
    n: usize,
    points: Option<Vec<Point>>,
    metric: Metric,
}

/// TSPLIB `nint`: round half-up.
pub fn tsplib_round(x: f64) -> f64 {
    (x + 0.5).floor()
}

impl Instance {
    pub fn from_points(name: impl Into<String>, points: Vec<Point>, metric: Metric) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("instance needs at least one point".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidInput(format!("point {i} has a non-finite coordinate")));
        }
        if matches!(metric, Metric::ExplicitMatrix(_)) {
            return Err(Error::InvalidInput(
                "coordinate instances take a Euclidean metric".into(),
            ));
        }
        Ok(Instance {
            name: name.into(),
            n: points.len(),
            points: Some(points),
            metric,
        })
    }

    /// Build an explicit-matrix instance. Symmetry and the zero diagonal are
    /// checked here; the triangle inequality only by [`Instance::check_triangle_inequality`].
    pub fn from_matrix(name: impl Into<String>, n: usize, matrix: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("instance needs at least one node".into()));
        }
        if matrix.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        for a in 0..n {
            if matrix[a * n + a] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at node {a}")));
            }
            for b in 0..n {
                let w = matrix[a * n + b];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidInput(format!("bad weight {w} at ({a}, {b})")));
                }
                if w != matrix[b * n + a] {
                    return Err(Error::InvalidInput(format!("matrix not symmetric at ({a}, {b})")));
                }
            }
        }
        Ok(Instance {
            name: name.into(),
            n,
            points: None,
            metric: Metric::ExplicitMatrix(matrix),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> Option<&[Point]> {
        self.points.as_deref()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// Distance without bounds checking beyond the slice access itself.
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        match &self.metric {
            Metric::EuclidReal => {
                let p = self.points.as_ref().unwrap();
                p[a].euclid(&p[b])
            }
            Metric::EuclidRoundedTsplib => {
                let p = self.points.as_ref().unwrap();
                tsplib_round(p[a].euclid(&p[b]))
            }
            Metric::ExplicitMatrix(m) => m[a * self.n + b],
        }
    }

    pub fn distance(&self, a: usize, b: usize) -> Result<f64> {
        for index in [a, b] {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, n: self.n });
            }
        }
        Ok(self.dist(a, b))
    }

    /// Weight of the closed cycle visiting `order` in sequence.
    pub fn cycle_weight(&self, order: &[usize]) -> f64 {
        if order.len() < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        for w in order.windows(2) {
            total += self.dist(w[0], w[1]);
        }
        total + self.dist(order[order.len() - 1], order[0])
    }

    /// Returns the first triple `(a, b, c)` with `d(a,c) > d(a,b) + d(b,c) + tol`.
    pub fn check_triangle_inequality(&self, tol: f64) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.dist(a, c) > self.dist(a, b) + self.dist(b, c) + tol {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}

/// `n` points drawn i.i.d. uniform on `[0, side]^2`.
pub fn generate_uniform(n: usize, seed: u64, side: f64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::Config(format!("box side must be positive, got {side}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * side;
            let y = rng.random::<f64>() * side;
            Point::new(x, y)
        })
        .collect();
    Instance::from_points(format!("uniform-n{n}-s{seed}"), points, Metric::EuclidReal)
}

/// Default cluster count for [`generate_clustered`]: one cluster per hundred points.
pub fn default_cluster_count(n: usize) -> usize {
    (n / 100).max(1)
}

/// Default Gaussian spread around each cluster center.
pub fn default_cluster_sigma(side: f64, clusters: usize) -> f64 {
    side / (50.0 * (clusters as f64).sqrt())
}

/// Clustered instance: `clusters` centers uniform on the box, every point
/// picks a center uniformly and is displaced by an isotropic Gaussian.
pub fn generate_clustered(n: usize, seed: u64, side: f64, clusters: usize) -> Result<Instance> {
    generate_clustered_with_sigma(n, seed, side, clusters, default_cluster_sigma(side, clusters))
}

pub fn generate_clustered_with_sigma(
    n: usize,
    seed: u64,
    side: f64,
    clusters: usize,
    sigma: f64,
) -> Result<Instance> {
    if clusters == 0 || n < clusters {
        return Err(Error::Config(format!(
            "need n >= clusters >= 1, got n = {n}, clusters = {clusters}"
        )));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::Config(format!("box side must be positive, got {side}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Config(format!("sigma must be nonnegative, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Point> = (0..clusters)
        .map(|_| Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
        .collect();
    let points = (0..n)
        .map(|_| {
            let c = centers[rng.random_range(0..clusters)];
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            Point::new(c.x + sigma * dx, c.y + sigma * dy)
        })
        .collect();
    Instance::from_points(
        format!("clustered-n{n}-c{clusters}-s{seed}"),
        points,
        Metric::EuclidReal,
    )
}

/// Parse the supported TSPLIB subset (`EUC_2D`, plus the `EUC_2D_REAL`
/// extension for unrounded Euclidean distances).
pub fn parse_tsplib(text: &str) -> Result<Instance> {
    let mut name = String::from("unnamed");
    let mut dimension: Option<usize> = None;
    let mut metric: Option<Metric> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut in_coords = false;

    for (line_no, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if line == "NODE_COORD_SECTION" {
            in_coords = true;
            break;
        }
        if line == "EOF" {
            break;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => return Err(Error::parse(line_no, format!("expected `KEY : VALUE`, got `{line}`"))),
        };
        match key {
            "NAME" => name = value.to_string(),
            "COMMENT" => {}
            "TYPE" => {
                if value != "TSP" {
                    return Err(Error::parse(line_no, format!("unsupported TYPE `{value}`")));
                }
            }
            "DIMENSION" => {
                let d = value
                    .parse::<usize>()
                    .map_err(|_| Error::parse(line_no, format!("bad DIMENSION `{value}`")))?;
                if d == 0 {
                    return Err(Error::parse(line_no, "DIMENSION must be positive"));
                }
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => {
                metric = Some(match value {
                    "EUC_2D" => Metric::EuclidRoundedTsplib,
                    "EUC_2D_REAL" => Metric::EuclidReal,
                    other => {
                        return Err(Error::parse(
                            line_no,
                            format!("unsupported EDGE_WEIGHT_TYPE `{other}`"),
                        ))
                    }
                })
            }
            other => return Err(Error::parse(line_no, format!("unknown keyword `{other}`"))),
        }
    }

    let n = dimension.ok_or_else(|| Error::parse(0, "missing DIMENSION"))?;
    let metric = metric.ok_or_else(|| Error::parse(0, "missing EDGE_WEIGHT_TYPE"))?;
    if !in_coords {
        return Err(Error::parse(0, "missing NODE_COORD_SECTION"));
    }

    let mut points: Vec<Option<Point>> = vec![None; n];
    let mut seen = 0usize;
    let mut last_line = 0;
    for (line_no, line) in lines {
        last_line = line_no;
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(line_no, format!("expected `index x y`, got `{line}`")));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad node index `{}`", fields[0])))?;
        if index == 0 || index > n {
            return Err(Error::parse(line_no, format!("node index {index} outside 1..={n}")));
        }
        let coord = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line_no, format!("bad coordinate `{s}`")))
        };
        let p = Point::new(coord(fields[1])?, coord(fields[2])?);
        if points[index - 1].replace(p).is_some() {
            return Err(Error::parse(line_no, format!("duplicate node index {index}")));
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::parse(
            last_line,
            format!("DIMENSION is {n} but {seen} coordinate lines were given"),
        ));
    }
    let points = points.into_iter().map(|p| p.unwrap()).collect();
    Instance::from_points(name, points, metric)
}

/// Inverse of [`parse_tsplib`] for coordinate instances.
pub fn write_tsplib(inst: &Instance) -> Result<String> {
    let points = inst
        .points()
        .ok_or_else(|| Error::InvalidInput("explicit-matrix instances cannot be written as TSPLIB".into()))?;
    let weight_type = match inst.metric() {
        Metric::EuclidRoundedTsplib => "EUC_2D",
        Metric::EuclidReal => "EUC_2D_REAL",
        Metric::ExplicitMatrix(_) => unreachable!(),
    };
    let mut out = String::new();
    let _ = writeln!(out, "NAME : {}", inst.name());
    let _ = writeln!(out, "TYPE : TSP");
    let _ = writeln!(out, "DIMENSION : {}", inst.len());
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE : {weight_type}");
    let _ = writeln!(out, "NODE_COORD_SECTION");
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(out, "{} {:?} {:?}", i + 1, p.x, p.y);
    }
    out.push_str("EOF\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn euclid_distance() {
        let inst = Instance::from_points("t", pts(&[(0.0, 0.0), (3.0, 4.0)]), Metric::EuclidReal).unwrap();
        assert_eq!(inst.distance(0, 1).unwrap(), 5.0);
        assert_eq!(inst.distance(1, 1).unwrap(), 0.0);
        assert!(matches!(inst.distance(0, 2), Err(Error::IndexOutOfRange { index: 2, n: 2 })));
    }

    #[test]
    fn rounded_distance() {
        let inst = Instance::from_points("t", pts(&[(0.0, 0.0), (1.0, 1.0), (0.0, 2.5)]), Metric::EuclidRoundedTsplib)
            .unwrap();
        assert_eq!(inst.distance(0, 1).unwrap(), 1.0);
        // 2.5 rounds half-up
        assert_eq!(inst.distance(0, 2).unwrap(), 3.0);
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(Instance::from_points("t", pts(&[(f64::NAN, 0.0)]), Metric::EuclidReal).is_err());
    }

    #[test]
    fn matrix_validation() {
        assert!(Instance::from_matrix("m", 2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert!(Instance::from_matrix("m", 2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(Instance::from_matrix("m", 2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
        let bad = Instance::from_matrix("m", 3, vec![0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0]).unwrap();
        assert!(bad.check_triangle_inequality(1e-9).is_some());
    }

    #[test]
    fn uniform_generator() {
        let one = generate_uniform(1, 7, 1.0).unwrap();
        let p = one.points().unwrap()[0];
        assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y));

        let a = generate_uniform(1000, 1, 1e6).unwrap();
        let b = generate_uniform(1000, 1, 1e6).unwrap();
        let c = generate_uniform(1000, 2, 1e6).unwrap();
        assert_eq!(a.points(), b.points());
        assert_ne!(a.points(), c.points());
        assert!(a.points().unwrap().iter().all(|p| p.x >= 0.0 && p.x < 1e6 && p.y >= 0.0 && p.y < 1e6));
    }

    #[test]
    fn clustered_generator() {
        let tight = generate_clustered_with_sigma(10, 5, 1.0, 1, 1e-12).unwrap();
        let p = tight.points().unwrap();
        assert!(p.iter().all(|q| q.euclid(&p[0]) < 1e-9));

        let a = generate_clustered(100, 3, 1e6, 10).unwrap();
        let b = generate_clustered(100, 3, 1e6, 10).unwrap();
        assert_eq!(a, b);

        assert!(generate_clustered(5, 1, 1.0, 10).is_err());
        assert!(generate_clustered(5, 1, 1.0, 0).is_err());
    }

    #[test]
    fn clustered_spread_exceeds_cluster_spread() {
        let side = 1e6;
        let clusters = 10;
        let inst = generate_clustered(1000, 11, side, clusters).unwrap();
        let xs: Vec<f64> = inst.points().unwrap().iter().map(|p| p.x).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let sigma = default_cluster_sigma(side, clusters);
        assert!(var > 10.0 * sigma * sigma, "total variance {var} vs within-cluster {}", sigma * sigma);
    }

    const SMALL: &str = "NAME : tiny\nTYPE : TSP\nCOMMENT : three nodes\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 4\n3 1.5e1 0\nEOF\n";

    #[test]
    fn parse_minimal() {
        let inst = parse_tsplib(SMALL).unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(inst.name(), "tiny");
        assert_eq!(inst.metric().kind(), MetricKind::EuclidRoundedTsplib);
        assert_eq!(inst.points().unwrap()[2], Point::new(15.0, 0.0));
    }

    #[test]
    fn parse_whitespace_tolerant() {
        let text = "NAME:x\n  TYPE :   TSP\nDIMENSION:2\nEDGE_WEIGHT_TYPE: EUC_2D_REAL\nNODE_COORD_SECTION\n  2   1.0\t2.0\n1 0 0\n";
        let inst = parse_tsplib(text).unwrap();
        assert_eq!(inst.metric().kind(), MetricKind::EuclidReal);
        assert_eq!(inst.points().unwrap()[1], Point::new(1.0, 2.0));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let short = "NAME : t\nTYPE : TSP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n3 2 2\nEOF\n";
        assert!(matches!(parse_tsplib(short), Err(Error::Parse { .. })));

        let geo = "NAME : t\nEDGE_WEIGHT_TYPE : GEO\n";
        match parse_tsplib(geo) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("GEO"));
            }
            other => panic!("unexpected {other:?}"),
        }

        let dup = "DIMENSION : 2\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n1 1 1\n";
        assert!(matches!(parse_tsplib(dup), Err(Error::Parse { line: 5, .. })));

        let garbage = "DIMENSION 2\n";
        assert!(matches!(parse_tsplib(garbage), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn write_format() {
        let inst = Instance::from_points("two", pts(&[(0.0, 0.0), (1.0, 0.5)]), Metric::EuclidRoundedTsplib).unwrap();
        let text = write_tsplib(&inst).unwrap();
        assert!(text.contains("DIMENSION : 2"));
        assert!(text.contains("EDGE_WEIGHT_TYPE : EUC_2D\n"));
        assert_eq!(parse_tsplib(&text).unwrap(), inst);

        let m = Instance::from_matrix("m", 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(write_tsplib(&m).is_err());
    }
}
