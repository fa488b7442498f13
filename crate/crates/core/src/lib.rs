//! Hop-count ring virtual coordinates for convergecast sensor networks.
//!
//! Every node gets a single scalar `(n-1)·R + offset`, where `n` is its hop
//! count from the sink and the offset places it inside its ring according
//! to how its neighbors split between rings `n-1`, `n` and `n+1`.
//!
//! * [`geometry`] and [`table`] compute the theoretical disk/ring overlap
//!   fractions and tabulate them against the offset.
//! * [`mapper`] projects a node's measured neighbor census onto the table.
//! * [`collisions`] covers coordinate-collision combinatorics and counting.
//! * [`sim`] deploys nodes, builds radio links and runs the initialization
//!   protocol that produces the censuses.

pub mod collisions;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod mapper;
pub mod quadrature;
pub mod sim;
pub mod table;

pub use error::{Error, Result};
pub use geometry::{area_fractions, area_inner, area_outer, AreaFractions, RingModelParams};
pub use graph::{Adjacency, NodeId};
pub use mapper::{assign_coordinate, census_fractions, project_to_curve, MappingResult, NeighborCensus};
pub use table::{build_offset_table, OffsetTable, TableSet};
