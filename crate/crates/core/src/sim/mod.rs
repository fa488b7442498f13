//! Deployment, radio connectivity and the initialization protocol, plus the
//! end-to-end pipeline from a seeded deployment to collision statistics.

mod events;
mod propagation;
mod protocol;
mod topology;

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use events::{EventQueue, Time};
pub use propagation::{build_links, PropagationConfig, PropagationModel};
pub use protocol::{
    run_initialization, EventKind, EventRecord, NodeState, ProtocolConfig, ProtocolMode,
    SimOutcome, NOMINAL_LISTEN_PERIODS,
};
pub use topology::{place_nodes, Field, Point, Topology, SINK};

use crate::collisions::{count_collisions, CollisionReport, Equality};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, NodeId};
use crate::mapper::{assign_coordinate, MappingResult};
use crate::table::TableSet;

/// Independent generator per concern; equal seeds on different streams do
/// not share draws.
pub(crate) fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Maps every initialized sensor to its virtual coordinate.
pub fn compute_all_coordinates(
    outcome: &SimOutcome,
    tables: &TableSet,
    radio_range: f64,
) -> Result<BTreeMap<NodeId, MappingResult>> {
    outcome
        .initialized_sensors()
        .map(|(id, s)| {
            let table = tables.for_ring(s.census.ring);
            assign_coordinate(&s.census, table, radio_range).map(|m| (id, m))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTriple {
    pub topology: u64,
    pub links: u64,
    pub protocol: u64,
}

impl SeedTriple {
    pub fn uniform(seed: u64) -> Self {
        Self {
            topology: seed,
            links: seed,
            protocol: seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub sensors: usize,
    pub field: Field,
    pub sink: Point,
    pub propagation: PropagationConfig,
    pub protocol: ProtocolConfig,
    pub equality: Equality,
    pub seeds: SeedTriple,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sensors: 200,
            field: Field {
                width: 50.0,
                height: 50.0,
            },
            sink: Point::new(25.0, 25.0),
            propagation: PropagationConfig::default(),
            protocol: ProtocolConfig::default(),
            equality: Equality::Exact,
            seeds: SeedTriple::uniform(1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub topology: Topology,
    pub adjacency: Adjacency,
    pub outcome: SimOutcome,
    pub mappings: BTreeMap<NodeId, MappingResult>,
    /// Collisions among initialized sensors; the sink and uninitialized
    /// nodes are neither counted nor counted as neighbors.
    pub collisions: CollisionReport,
}

/// Place, link, initialize, map and count collisions.
pub fn run_pipeline(cfg: &RunConfig, tables: &TableSet) -> Result<RunResult> {
    let topology = place_nodes(cfg.sensors, cfg.field, cfg.sink, cfg.seeds.topology)?;
    let adjacency = build_links(&topology, &cfg.propagation, cfg.seeds.links)?;
    let proto = ProtocolConfig {
        seed: cfg.seeds.protocol,
        ..cfg.protocol
    };
    let outcome = match run_initialization(&topology, &adjacency, &proto) {
        Ok(o) => o,
        // An isolated sink still yields a (fully uninitialized) run.
        Err(Error::DisconnectedSink(o)) => *o,
        Err(e) => return Err(e),
    };
    let mappings = compute_all_coordinates(&outcome, tables, cfg.propagation.range)?;
    let coordinates: BTreeMap<NodeId, f64> =
        mappings.iter().map(|(&id, m)| (id, m.coordinate)).collect();
    let graph = adjacency.induced(|id| mappings.contains_key(&id));
    let collisions = count_collisions(&graph, &coordinates, cfg.equality)?;
    Ok(RunResult {
        topology,
        adjacency,
        outcome,
        mappings,
        collisions,
    })
}

pub const NODE_DUMP_HEADER: &str = "node_id,x,y,ring,degree,count_inner,count_same,count_outer,matched_offset,proj_distance,coordinate,collisions_seen,initialized";

impl RunResult {
    /// One row per sensor. `degree` and `collisions_seen` refer to the
    /// initialized-sensor neighborhood used for collision counting;
    /// uninitialized nodes have empty mapping columns.
    pub fn write_node_dump<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{NODE_DUMP_HEADER}")?;
        for id in self.topology.sensor_ids() {
            let p = self.topology.position(id);
            let state = self.outcome.node(id);
            let ring = state.ring.map_or(String::new(), |r| r.to_string());
            let c = &state.census;
            match (self.mappings.get(&id), self.collisions.per_node.get(&id)) {
                (Some(m), Some(nc)) => writeln!(
                    out,
                    "{id},{},{},{ring},{},{},{},{},{},{},{},{},1",
                    p.x,
                    p.y,
                    nc.degree,
                    c.inner,
                    c.same,
                    c.outer,
                    m.matched_offset,
                    m.projection_distance,
                    m.coordinate,
                    nc.collisions
                )?,
                _ => writeln!(
                    out,
                    "{id},{},{},{ring},{},{},{},{},,,,,0",
                    p.x,
                    p.y,
                    self.adjacency.degree(id),
                    c.inner,
                    c.same,
                    c.outer
                )?,
            }
        }
        Ok(())
    }
}
