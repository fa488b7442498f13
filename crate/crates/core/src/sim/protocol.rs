//! Ring-wave initialization protocol.
//!
//! The sink opens phase 0. In phase `r` every node that knows it is in
//! ring `r` sends a preamble, which wakes and synchronizes its neighbors,
//! and then one initialization packet carrying `r` in a slot of the
//! contention period that follows. A node that hears ring-`r` packets
//! while still unsynchronized learns that it is in ring `r + 1` and that it
//! has that many inner neighbors; nodes already placed count the packet as
//! coming from their inner, own or outer ring. Every node thus listens to
//! phases `n-1`, `n` and `n+1` and sends a single packet.
//!
//! In [`ProtocolMode::WaveIdealized`] each transmitter owns a slot and no
//! packet is lost, which reduces the run to BFS layering with exact
//! neighbor counting. In [`ProtocolMode::Contention`] slots are drawn
//! uniformly from `slots`; a receiver hearing two or more transmitters in
//! the same slot loses all of them, and a node loses the packets of the
//! slot it transmits in (half duplex). Nothing is retransmitted.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::{Adjacency, NodeId};
use crate::mapper::NeighborCensus;
use crate::sim::events::{EventQueue, Time};
use crate::sim::rng_stream;
use crate::sim::topology::{Topology, SINK};

pub(crate) const PROTOCOL_STREAM: u64 = 2;

/// Listen periods of a node that synchronized normally.
pub const NOMINAL_LISTEN_PERIODS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProtocolMode {
    #[default]
    WaveIdealized,
    Contention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolConfig {
    pub mode: ProtocolMode,
    /// Slots per contention period (contention mode only).
    pub slots: u32,
    pub preamble_ticks: Time,
    pub slot_ticks: Time,
    /// Deepest ring that may be assigned.
    pub max_rings: u32,
    pub seed: u64,
    pub record_events: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            mode: ProtocolMode::WaveIdealized,
            slots: 64,
            preamble_ticks: 100,
            slot_ticks: 10,
            max_rings: 64,
            seed: 0,
            record_events: false,
        }
    }
}

impl ProtocolConfig {
    pub fn wave() -> Self {
        Self::default()
    }

    pub fn contention(slots: u32, seed: u64) -> Self {
        Self {
            mode: ProtocolMode::Contention,
            slots,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots < 1 {
            return Err(invalid("contention period needs at least one slot"));
        }
        if self.preamble_ticks == 0 || self.slot_ticks == 0 {
            return Err(invalid("preamble and slot durations must be positive"));
        }
        if self.max_rings < 1 {
            return Err(invalid("max rings must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeState {
    /// Hop count from the sink; `Some(0)` for the sink, `None` while
    /// uninitialized.
    pub ring: Option<u32>,
    /// Counts of packets received from rings `n-1`, `n`, `n+1`. For the sink
    /// only `outer` is used.
    pub census: NeighborCensus,
    pub init_packets_sent: u32,
    pub preambles_sent: u32,
    pub listen_periods: u32,
}

impl NodeState {
    pub fn is_initialized(&self) -> bool {
        self.ring.is_some_and(|r| r >= 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    PhaseStart,
    Preamble,
    Transmit,
    Receive,
    Collision,
    Synchronized,
    PhaseEnd,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::PhaseStart => "phase_start",
            EventKind::Preamble => "preamble",
            EventKind::Transmit => "transmit",
            EventKind::Receive => "receive",
            EventKind::Collision => "collision",
            EventKind::Synchronized => "synchronized",
            EventKind::PhaseEnd => "phase_end",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub time: Time,
    pub kind: EventKind,
    pub node: NodeId,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    /// Every node of the topology, sink included.
    pub nodes: BTreeMap<NodeId, NodeState>,
    /// Number of phases that had at least one transmitter.
    pub phases: u32,
    pub events: Vec<EventRecord>,
}

impl SimOutcome {
    pub fn node(&self, id: NodeId) -> &NodeState {
        &self.nodes[&id]
    }

    pub fn initialized_sensors(&self) -> impl Iterator<Item = (NodeId, &NodeState)> + '_ {
        self.nodes
            .iter()
            .filter(|(_, s)| s.is_initialized())
            .map(|(&id, s)| (id, s))
    }

    pub fn uninitialized_sensors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|(&id, s)| id != SINK && !s.is_initialized())
            .map(|(&id, _)| id)
    }

    pub fn total_init_packets(&self) -> u64 {
        self.nodes.values().map(|s| u64::from(s.init_packets_sent)).sum()
    }

    pub fn total_preambles(&self) -> u64 {
        self.nodes.values().map(|s| u64::from(s.preambles_sent)).sum()
    }

    /// Writes the event log as `time,event,node,detail` lines.
    pub fn write_event_log<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "time,event,node,detail")?;
        for e in &self.events {
            writeln!(out, "{},{},{},{}", e.time, e.kind.as_str(), e.node, e.detail)?;
        }
        Ok(())
    }
}

enum Event {
    PhaseStart(u32),
    Preamble(NodeId),
    Transmit { node: NodeId, slot: u32 },
    SlotEnd(u32),
    PhaseEnd(u32),
}

struct Run<'a> {
    adjacency: &'a Adjacency,
    proto: &'a ProtocolConfig,
    nodes: BTreeMap<NodeId, NodeState>,
    events: Vec<EventRecord>,
    // Per-phase scratch state.
    phase: u32,
    in_slot: BTreeMap<u32, Vec<NodeId>>,
    heard_preamble: BTreeSet<NodeId>,
    pending_sync: BTreeMap<NodeId, u32>,
}

impl Run<'_> {
    fn log(&mut self, time: Time, kind: EventKind, node: NodeId, detail: impl FnOnce() -> String) {
        if self.proto.record_events {
            self.events.push(EventRecord {
                time,
                kind,
                node,
                detail: detail(),
            });
        }
    }

    fn resolve_slot(&mut self, time: Time, phase: u32, slot: u32) {
        let senders = self.in_slot.remove(&slot).unwrap_or_default();
        let mut audible: BTreeMap<NodeId, (u32, NodeId)> = BTreeMap::new();
        for &u in &senders {
            for &v in self.adjacency.neighbors(u) {
                let e = audible.entry(v).or_insert((0, u));
                e.0 += 1;
                e.1 = u;
            }
        }
        for (v, (count, sender)) in audible {
            if senders.contains(&v) {
                self.log(time, EventKind::Collision, v, || "half-duplex".to_string());
            } else if count > 1 {
                self.log(time, EventKind::Collision, v, || format!("{count} senders"));
            } else {
                self.deliver(time, v, sender, phase);
            }
        }
    }

    fn deliver(&mut self, time: Time, receiver: NodeId, sender: NodeId, phase: u32) {
        let state = self.nodes.get_mut(&receiver).expect("receiver in topology");
        match state.ring {
            Some(n) => {
                let c = &mut state.census;
                if phase + 1 == n {
                    c.inner += 1;
                } else if phase == n {
                    c.same += 1;
                } else if phase == n + 1 {
                    c.outer += 1;
                }
            }
            None => *self.pending_sync.entry(receiver).or_default() += 1,
        }
        self.log(time, EventKind::Receive, receiver, || format!("from={sender} ring={phase}"));
    }

    fn end_phase(&mut self, time: Time, phase: u32) {
        let new_ring = phase + 1;
        let synced = std::mem::take(&mut self.pending_sync);
        let mut placed = BTreeSet::new();
        if new_ring <= self.proto.max_rings {
            for (&v, &inner) in &synced {
                let s = self.nodes.get_mut(&v).expect("node in topology");
                s.ring = Some(new_ring);
                s.census = NeighborCensus::new(new_ring, inner, 0, 0);
                s.listen_periods += NOMINAL_LISTEN_PERIODS;
                placed.insert(v);
                self.log(time, EventKind::Synchronized, v, || format!("ring={new_ring} inner={inner}"));
            }
        }
        // Woken by a preamble but every packet was lost.
        for v in std::mem::take(&mut self.heard_preamble) {
            let s = self.nodes.get_mut(&v).expect("node in topology");
            if s.ring.is_none() && !placed.contains(&v) {
                s.listen_periods += 1;
            }
        }
        self.in_slot.clear();
    }
}

/// Runs the initialization to completion. A sink without links yields
/// [`Error::DisconnectedSink`] carrying the (all uninitialized) outcome.
pub fn run_initialization(
    topology: &Topology,
    adjacency: &Adjacency,
    proto: &ProtocolConfig,
) -> Result<SimOutcome> {
    proto.validate()?;
    if let Some(missing) = topology.node_ids().find(|&id| !adjacency.contains(id)) {
        return Err(invalid(format!("node {missing} missing from adjacency")));
    }
    let mut nodes: BTreeMap<NodeId, NodeState> =
        topology.node_ids().map(|id| (id, NodeState::default())).collect();
    nodes.get_mut(&SINK).expect("sink").ring = Some(0);

    let mut run = Run {
        adjacency,
        proto,
        nodes,
        events: Vec::new(),
        phase: 0,
        in_slot: BTreeMap::new(),
        heard_preamble: BTreeSet::new(),
        pending_sync: BTreeMap::new(),
    };
    let mut rng = rng_stream(proto.seed, PROTOCOL_STREAM);
    let mut queue = EventQueue::new();
    let mut phases = 0;
    queue.schedule(0, Event::PhaseStart(0));

    while let Some((now, event)) = queue.pop() {
        match event {
            Event::PhaseStart(r) => {
                if r > proto.max_rings {
                    break;
                }
                let transmitters: Vec<NodeId> = run
                    .nodes
                    .iter()
                    .filter(|(_, s)| s.ring == Some(r))
                    .map(|(&id, _)| id)
                    .collect();
                if transmitters.is_empty() {
                    break;
                }
                phases += 1;
                run.phase = r;
                let tx_count = transmitters.len();
                run.log(now, EventKind::PhaseStart, SINK, || {
                    format!("ring={r} transmitters={tx_count}")
                });
                let period_slots = match proto.mode {
                    ProtocolMode::WaveIdealized => transmitters.len() as u32,
                    ProtocolMode::Contention => proto.slots,
                };
                let contention_start = now + proto.preamble_ticks;
                let mut used_slots = BTreeSet::new();
                for (i, &u) in transmitters.iter().enumerate() {
                    let slot = match proto.mode {
                        ProtocolMode::WaveIdealized => i as u32,
                        ProtocolMode::Contention => rng.random_range(0..proto.slots),
                    };
                    used_slots.insert(slot);
                    queue.schedule(now, Event::Preamble(u));
                    queue.schedule(
                        contention_start + Time::from(slot) * proto.slot_ticks,
                        Event::Transmit { node: u, slot },
                    );
                }
                for slot in used_slots {
                    queue.schedule(
                        contention_start + Time::from(slot + 1) * proto.slot_ticks,
                        Event::SlotEnd(slot),
                    );
                }
                queue.schedule(
                    contention_start + Time::from(period_slots) * proto.slot_ticks,
                    Event::PhaseEnd(r),
                );
            }
            Event::Preamble(u) => {
                run.nodes.get_mut(&u).expect("node").preambles_sent += 1;
                run.heard_preamble.extend(adjacency.neighbors(u).iter().copied());
                run.log(now, EventKind::Preamble, u, String::new);
            }
            Event::Transmit { node, slot } => {
                run.nodes.get_mut(&node).expect("node").init_packets_sent += 1;
                run.in_slot.entry(slot).or_default().push(node);
                run.log(now, EventKind::Transmit, node, || format!("slot={slot}"));
            }
            Event::SlotEnd(slot) => {
                run.resolve_slot(now, run.phase, slot);
            }
            Event::PhaseEnd(r) => {
                run.end_phase(now, r);
                run.log(now, EventKind::PhaseEnd, SINK, || format!("ring={r}"));
                queue.schedule(now, Event::PhaseStart(r + 1));
            }
        }
    }

    let outcome = SimOutcome {
        nodes: run.nodes,
        phases,
        events: run.events,
    };
    if adjacency.degree(SINK) == 0 {
        return Err(Error::DisconnectedSink(Box::new(outcome)));
    }
    Ok(outcome)
}
