//! Neighbor census → virtual coordinate.
//!
//! A node's measured shares of neighbors in rings `n-1`, `n`, `n+1` are
//! projected onto the nearest point of its ring's offset table. The matched
//! offset is placed after `(n-1)R`, and the projection distance, scaled so
//! it can never reach the table spacing, is added on top. Two nodes matched
//! to different table entries therefore never share a coordinate.

use crate::error::{Error, Result};
use crate::geometry::AreaFractions;
use crate::table::{OffsetTable, TableEntry};

/// Safety margin keeping scaled projection distances strictly below the
/// table spacing even at the simplex diameter.
pub const SCALE_MARGIN: f64 = 1e-9;

/// Neighbor counts gathered by a node during initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct NeighborCensus {
    pub ring: u32,
    /// Neighbors in ring `n-1`; for ring 1 this is the sink.
    pub inner: u32,
    pub same: u32,
    pub outer: u32,
}

impl NeighborCensus {
    pub fn new(ring: u32, inner: u32, same: u32, outer: u32) -> Self {
        Self {
            ring,
            inner,
            same,
            outer,
        }
    }

    pub fn total(&self) -> u32 {
        self.inner + self.same + self.outer
    }
}

pub fn census_fractions(census: &NeighborCensus) -> Result<AreaFractions> {
    let total = census.total();
    if total == 0 {
        return Err(Error::EmptyCensus);
    }
    let t = f64::from(total);
    Ok(AreaFractions::new(
        f64::from(census.inner) / t,
        f64::from(census.same) / t,
        f64::from(census.outer) / t,
    ))
}

/// Nearest table entry to a simplex point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub index: usize,
    pub offset: f64,
    pub distance: f64,
}

/// Linear scan for the entry closest to `fractions` in Euclidean distance.
/// Ties go to the smaller offset. Inputs that drifted off the simplex are
/// renormalized first.
pub fn project_to_curve(fractions: &AreaFractions, table: &OffsetTable) -> Result<Projection> {
    let sum = fractions.sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "fractions {fractions:?} cannot be normalized"
        )));
    }
    let point = if sum == 1.0 { *fractions } else { fractions.normalized() };
    let mut best: Option<Projection> = None;
    for (index, TableEntry { offset, fractions }) in table.entries().iter().enumerate() {
        let distance = point.distance(fractions);
        if best.is_none_or(|b| distance < b.distance) {
            best = Some(Projection {
                index,
                offset: *offset,
                distance,
            });
        }
    }
    best.ok_or(Error::EmptyTable)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingResult {
    pub ring: u32,
    pub matched_offset: f64,
    /// Euclidean distance in fraction space, within `[0, √2]`.
    pub projection_distance: f64,
    pub scaled_distance: f64,
    pub coordinate: f64,
}

impl MappingResult {
    /// Hop count recovered from the coordinate alone.
    pub fn ring_from_coordinate(coordinate: f64, radio_range: f64) -> u32 {
        (coordinate / radio_range).floor() as u32 + 1
    }
}

/// Factor turning a fraction-space distance into a length that stays below
/// the table spacing: `√2` bounds the simplex diameter.
pub fn distance_scale(table: &OffsetTable) -> f64 {
    table.min_spacing() / std::f64::consts::SQRT_2 * (1.0 - SCALE_MARGIN)
}

pub fn assign_coordinate(
    census: &NeighborCensus,
    table: &OffsetTable,
    radio_range: f64,
) -> Result<MappingResult> {
    if census.ring < 1 {
        return Err(Error::InvalidParameter("census ring must be at least 1".into()));
    }
    let fractions = census_fractions(census)?;
    let projection = project_to_curve(&fractions, table)?;
    let scaled_distance = projection.distance * distance_scale(table);
    let base = f64::from(census.ring - 1) * radio_range;
    Ok(MappingResult {
        ring: census.ring,
        matched_offset: projection.offset,
        projection_distance: projection.distance,
        scaled_distance,
        coordinate: base + projection.offset + scaled_distance,
    })
}
