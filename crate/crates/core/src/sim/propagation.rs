//! Radio link models: unit disk (free space) and log-normal shadowing.

use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::graph::Adjacency;
use crate::sim::rng_stream;
use crate::sim::topology::Topology;

pub(crate) const LINK_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagationModel {
    #[default]
    FreeSpace,
    LogNormalShadowing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub model: PropagationModel,
    pub range: f64,
    /// Path-loss exponent η.
    pub path_loss_exponent: f64,
    /// Standard deviation σ of the shadowing term, in dB.
    pub shadowing_sigma_db: f64,
    pub reference_distance: f64,
    pub reference_loss_db: f64,
    pub tx_power_dbm: f64,
    /// Receive threshold; `None` calibrates it so the mean received power
    /// crosses the threshold exactly at `range`.
    pub rx_threshold_dbm: Option<f64>,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            model: PropagationModel::FreeSpace,
            range: 10.0,
            path_loss_exponent: 3.0,
            shadowing_sigma_db: 4.0,
            reference_distance: 1.0,
            reference_loss_db: 40.0,
            tx_power_dbm: 0.0,
            rx_threshold_dbm: None,
        }
    }
}

impl PropagationConfig {
    pub fn free_space(range: f64) -> Self {
        Self {
            range,
            ..Self::default()
        }
    }

    pub fn shadowing(range: f64, path_loss_exponent: f64, sigma_db: f64) -> Self {
        Self {
            model: PropagationModel::LogNormalShadowing,
            range,
            path_loss_exponent,
            shadowing_sigma_db: sigma_db,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.range) {
            return Err(invalid(format!("radio range must be positive, got {}", self.range)));
        }
        if !pos(self.reference_distance) {
            return Err(invalid("reference distance must be positive"));
        }
        if !pos(self.path_loss_exponent) {
            return Err(invalid("path-loss exponent must be positive"));
        }
        if !(self.shadowing_sigma_db.is_finite() && self.shadowing_sigma_db >= 0.0) {
            return Err(invalid("shadowing sigma must be non-negative"));
        }
        Ok(())
    }

    /// Deterministic part of the received power at distance `d`. Distances
    /// below the reference distance are clamped to it.
    pub fn mean_rx_power_dbm(&self, d: f64) -> f64 {
        let d = d.max(self.reference_distance);
        self.tx_power_dbm
            - self.reference_loss_db
            - 10.0 * self.path_loss_exponent * (d / self.reference_distance).log10()
    }

    pub fn threshold_dbm(&self) -> f64 {
        self.rx_threshold_dbm
            .unwrap_or_else(|| self.mean_rx_power_dbm(self.range))
    }
}

/// Symmetric connectivity over the sink and all sensors.
///
/// Under shadowing, one normal sample is drawn per unordered pair in
/// `(low id, high id)` lexicographic order, so the graph is a pure function
/// of `(topology, config, seed)`.
pub fn build_links(topology: &Topology, prop: &PropagationConfig, seed: u64) -> Result<Adjacency> {
    prop.validate()?;
    let ids: Vec<_> = topology.node_ids().collect();
    let mut graph = Adjacency::with_nodes(ids.iter().copied());
    match prop.model {
        PropagationModel::FreeSpace => {
            for (i, &a) in ids.iter().enumerate() {
                let pa = topology.position(a);
                for &b in &ids[i + 1..] {
                    if pa.distance(&topology.position(b)) <= prop.range {
                        graph.add_edge(a, b);
                    }
                }
            }
        }
        PropagationModel::LogNormalShadowing => {
            let normal = Normal::new(0.0, prop.shadowing_sigma_db)
                .map_err(|e| invalid(format!("shadowing distribution: {e}")))?;
            let threshold = prop.threshold_dbm();
            let mut rng = rng_stream(seed, LINK_STREAM);
            for (i, &a) in ids.iter().enumerate() {
                let pa = topology.position(a);
                for &b in &ids[i + 1..] {
                    let shadow: f64 = normal.sample(&mut rng);
                    let d = pa.distance(&topology.position(b));
                    if prop.mean_rx_power_dbm(d) + shadow >= threshold {
                        graph.add_edge(a, b);
                    }
                }
            }
        }
    }
    Ok(graph)
}
