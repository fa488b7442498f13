use rand::Rng;

use crate::error::{invalid, Result};
use crate::graph::NodeId;
use crate::sim::rng_stream;

/// The sink always has id 0; sensors are numbered from 1.
pub const SINK: NodeId = 0;

pub(crate) const TOPOLOGY_STREAM: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Field {
    pub width: f64,
    pub height: f64,
}

impl Field {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(width) && ok(height)) {
            return Err(invalid(format!("field must be positive, got {width}x{height}")));
        }
        Ok(Self { width, height })
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    field: Field,
    sink: Point,
    sensors: Vec<Point>,
    seed: Option<u64>,
}

impl Topology {
    /// Hand-built deployment; sensor `i` of `sensors` gets id `i + 1`.
    pub fn from_positions(field: Field, sink: Point, sensors: Vec<Point>) -> Result<Self> {
        if !field.contains(&sink) {
            return Err(invalid(format!("sink {sink:?} outside the field")));
        }
        if let Some((i, p)) = sensors.iter().enumerate().find(|(_, p)| !field.contains(p)) {
            return Err(invalid(format!("sensor {} at {p:?} outside the field", i + 1)));
        }
        Ok(Self {
            field,
            sink,
            sensors,
            seed: None,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn sink(&self) -> Point {
        self.sink
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn sensor_count(&self) -> usize {
        self.sensors.len()
    }

    pub fn sensor_ids(&self) -> std::ops::RangeInclusive<NodeId> {
        1..=self.sensors.len()
    }

    /// Sink followed by every sensor.
    pub fn node_ids(&self) -> std::ops::RangeInclusive<NodeId> {
        SINK..=self.sensors.len()
    }

    pub fn position(&self, id: NodeId) -> Point {
        if id == SINK {
            self.sink
        } else {
            self.sensors[id - 1]
        }
    }
}

/// Uniform i.i.d. sensor positions over the field.
pub fn place_nodes(count: usize, field: Field, sink: Point, seed: u64) -> Result<Topology> {
    if count < 1 {
        return Err(invalid("at least one sensor is required"));
    }
    let field = Field::new(field.width, field.height)?;
    let mut rng = rng_stream(seed, TOPOLOGY_STREAM);
    let sensors = (0..count)
        .map(|_| {
            let x = rng.random::<f64>() * field.width;
            let y = rng.random::<f64>() * field.height;
            Point::new(x, y)
        })
        .collect();
    let mut topo = Topology::from_positions(field, sink, sensors)?;
    topo.seed = Some(seed);
    Ok(topo)
}
