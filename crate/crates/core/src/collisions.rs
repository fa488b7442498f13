//! Coordinate-collision analytics.
//!
//! A node "sees" a collision for every unordered pair of its neighbors that
//! hold the same coordinate. Under a uniform random assignment over the
//! `k(k+1)/2` reachable neighbor-proportion triples, the expected number of
//! such pairs among `k` neighbors is `(k-1)/(k+1)`.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_rational::Ratio;

use crate::error::{invalid, Error, Result};
use crate::graph::{Adjacency, NodeId};

/// Number of `(m, o, p)` with `m + o + p = k`, `m ≥ 1`, `o, p ≥ 0`.
pub fn coordinate_space_size(k: u64) -> Result<u64> {
    if k < 1 {
        return Err(invalid("neighborhood size must be at least 1"));
    }
    k.checked_mul(k + 1)
        .map(|x| x / 2)
        .ok_or_else(|| invalid(format!("neighborhood size {k} overflows")))
}

/// `C(k,2) / N(k)` as an exact ratio, which reduces to `(k-1)/(k+1)`.
pub fn expected_collisions_exact(k: u64) -> Result<Ratio<u64>> {
    if k < 2 {
        return Err(invalid("expected collisions need at least 2 neighbors"));
    }
    let pairs = k * (k - 1) / 2;
    Ok(Ratio::new(pairs, coordinate_space_size(k)?))
}

pub fn expected_collisions(k: u64) -> Result<f64> {
    let r = expected_collisions_exact(k)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// How two stored coordinates are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Equality {
    /// Bitwise equality of the stored `f64`.
    #[default]
    Exact,
    /// Equality after rounding to this many fractional decimal digits.
    Digits(u32),
}

impl Equality {
    fn key(self, x: f64) -> u64 {
        match self {
            Equality::Exact => (x + 0.0).to_bits(),
            Equality::Digits(f) => ((x * 10f64.powi(f as i32)).round() as i64) as u64,
        }
    }
}

/// Integer accumulators for one degree bucket; merging is exact and
/// order-independent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DegreeBucket {
    pub samples: u64,
    pub sum: u64,
    pub sum_sq: u64,
}

/// Buckets with fewer samples are flagged as low confidence.
pub const MIN_CONFIDENT_SAMPLES: u64 = 5;

const Z95: f64 = 1.959_963_984_540_054;

impl DegreeBucket {
    pub fn push(&mut self, collisions: u64) {
        self.samples += 1;
        self.sum += collisions;
        self.sum_sq += collisions * collisions;
    }

    pub fn merge(&mut self, other: &DegreeBucket) {
        self.samples += other.samples;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.sum as f64 / self.samples as f64
        }
    }

    pub fn sample_variance(&self) -> f64 {
        if self.samples < 2 {
            return 0.0;
        }
        let n = self.samples as f64;
        let s = self.sum as f64;
        ((self.sum_sq as f64 - s * s / n) / (n - 1.0)).max(0.0)
    }

    /// Normal-approximation 95% half-width of the mean.
    pub fn ci95_half_width(&self) -> f64 {
        if self.samples < 2 {
            return 0.0;
        }
        Z95 * (self.sample_variance() / self.samples as f64).sqrt()
    }

    pub fn low_confidence(&self) -> bool {
        self.samples < MIN_CONFIDENT_SAMPLES
    }
}

/// Per-degree collision statistics, mergeable across runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollisionStats {
    pub buckets: BTreeMap<usize, DegreeBucket>,
}

impl CollisionStats {
    pub fn push(&mut self, degree: usize, collisions: u64) {
        self.buckets.entry(degree).or_default().push(collisions);
    }

    pub fn merge(&mut self, other: &CollisionStats) {
        for (degree, bucket) in &other.buckets {
            self.buckets.entry(*degree).or_default().merge(bucket);
        }
    }

    pub fn total(&self) -> DegreeBucket {
        let mut all = DegreeBucket::default();
        for b in self.buckets.values() {
            all.merge(b);
        }
        all
    }

    pub fn global_mean(&self) -> f64 {
        self.total().mean()
    }

    pub const CSV_HEADER: &'static str = "degree,samples,mean_collisions,ci95_half_width";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for (degree, b) in &self.buckets {
            writeln!(
                out,
                "{degree},{},{},{}",
                b.samples,
                b.mean(),
                b.ci95_half_width()
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCollisions {
    pub degree: usize,
    pub collisions: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollisionReport {
    pub per_node: BTreeMap<NodeId, NodeCollisions>,
    pub stats: CollisionStats,
}

impl CollisionReport {
    pub fn global_mean(&self) -> f64 {
        self.stats.global_mean()
    }
}

/// Counts, for every node of `graph`, the unordered neighbor pairs holding
/// equal coordinates, and buckets the counts by node degree.
pub fn count_collisions(
    graph: &Adjacency,
    coordinates: &BTreeMap<NodeId, f64>,
    equality: Equality,
) -> Result<CollisionReport> {
    if let Some(missing) = graph.nodes().find(|n| !coordinates.contains_key(n)) {
        return Err(Error::MissingCoordinate(missing));
    }
    let mut report = CollisionReport::default();
    let mut groups: HashMap<u64, u64> = HashMap::new();
    for node in graph.nodes() {
        groups.clear();
        for nb in graph.neighbors(node) {
            *groups.entry(equality.key(coordinates[nb])).or_default() += 1;
        }
        let collisions = groups.values().map(|&c| c * (c - 1) / 2).sum();
        let degree = graph.degree(node);
        report.per_node.insert(node, NodeCollisions { degree, collisions });
        report.stats.push(degree, collisions);
    }
    Ok(report)
}
