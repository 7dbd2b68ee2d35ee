//! QCCD topologies, the timing model and shortest shuttle paths.
//!
//! Graph nodes `0..traps` are traps, the remaining nodes are junctions.
//! Segments are undirected edges. A shuttle costs
//! `split + moves + junction crossings + merge` plus any intratrap repositioning.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JunctionKind {
    /// Degree-3 junction.
    Y,
    /// Degree-4 junction.
    X,
}

impl JunctionKind {
    pub fn for_degree(degree: usize) -> Option<Self> {
        match degree {
            3 => Some(JunctionKind::Y),
            4 => Some(JunctionKind::X),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapMethod {
    GateSwap,
    IonSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub a: usize,
    pub b: usize,
}

impl Segment {
    pub fn other(&self, node: usize) -> usize {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    capacities: Vec<usize>,
    junctions: Vec<JunctionKind>,
    segments: Vec<Segment>,
    adjacency: Vec<Vec<(usize, usize)>>,
    name: String,
}

impl Topology {
    /// Builds and validates a topology. Junction node `k` has graph index `capacities.len() + k`.
    pub fn new(
        capacities: Vec<usize>,
        junctions: Vec<JunctionKind>,
        segments: Vec<(usize, usize)>,
        name: impl Into<String>,
    ) -> Result<Self> {
        if capacities.is_empty() {
            return Err(Error::Topology("no traps".into()));
        }
        if let Some(t) = capacities.iter().position(|&c| c < 2) {
            return Err(Error::Topology(format!("trap {t} has capacity below 2")));
        }
        let nodes = capacities.len() + junctions.len();
        let mut adjacency = vec![Vec::new(); nodes];
        let mut segs = Vec::with_capacity(segments.len());
        for (id, (a, b)) in segments.into_iter().enumerate() {
            if a >= nodes || b >= nodes || a == b {
                return Err(Error::Topology(format!("segment {id} joins invalid nodes {a}-{b}")));
            }
            adjacency[a].push((b, id));
            adjacency[b].push((a, id));
            segs.push(Segment { a, b });
        }
        for (k, kind) in junctions.iter().enumerate() {
            let degree = adjacency[capacities.len() + k].len();
            if JunctionKind::for_degree(degree) != Some(*kind) {
                return Err(Error::Topology(format!(
                    "junction {k} tagged {kind:?} has degree {degree}"
                )));
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let topo = Topology {
            capacities,
            junctions,
            segments: segs,
            adjacency,
            name: name.into(),
        };
        let reach = topo.reachable_from(0);
        if let Some(lost) = reach.iter().position(|r| !r) {
            return Err(Error::Topology(format!("node {lost} is disconnected")));
        }
        Ok(topo)
    }

    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !std::mem::replace(&mut seen[w], true) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn trap_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn node_count(&self) -> usize {
        self.capacities.len() + self.junctions.len()
    }

    pub fn capacity(&self, trap: usize) -> usize {
        self.capacities[trap]
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn total_capacity(&self) -> usize {
        self.capacities.iter().sum()
    }

    pub fn is_trap(&self, node: usize) -> bool {
        node < self.capacities.len()
    }

    pub fn junction_kind(&self, node: usize) -> Option<JunctionKind> {
        node.checked_sub(self.capacities.len())
            .and_then(|k| self.junctions.get(k).copied())
    }

    pub fn junction_count(&self) -> usize {
        self.junctions.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: usize) -> Segment {
        self.segments[id]
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Traps reachable from `trap` without passing through another trap.
    pub fn adjacent_traps(&self, trap: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        seen[trap] = true;
        let mut stack = vec![trap];
        let mut out = Vec::new();
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if std::mem::replace(&mut seen[w], true) {
                    continue;
                }
                if self.is_trap(w) {
                    out.push(w);
                } else {
                    stack.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Returns a copy with every trap capacity reduced by `reserved` (cooling ions).
    pub fn with_reserved_slots(&self, reserved: usize) -> Result<Self> {
        let capacities = self
            .capacities
            .iter()
            .map(|&c| c.saturating_sub(reserved))
            .collect::<Vec<_>>();
        if let Some(t) = capacities.iter().position(|&c| c < 2) {
            return Err(Error::Topology(format!(
                "trap {t} keeps fewer than 2 usable slots after reserving {reserved}"
            )));
        }
        Ok(Topology {
            capacities,
            ..self.clone()
        })
    }
}

/// Path graph of traps joined by plain segments.
pub fn make_linear(traps: usize, capacity: usize) -> Result<Topology> {
    if traps == 0 {
        return Err(Error::Topology("no traps".into()));
    }
    let segments = (1..traps).map(|t| (t - 1, t)).collect();
    Topology::new(vec![capacity; traps], Vec::new(), segments, format!("linear:{traps}x{capacity}"))
}

/// Mesh of `rows x cols` traps.
///
/// The four traps around each crossing of the trap lattice share an X junction.
/// A single row or column degenerates to plain segments.
pub fn make_grid(rows: usize, cols: usize, capacity: usize) -> Result<Topology> {
    if rows == 0 || cols == 0 {
        return Err(Error::Topology("grid needs at least one row and column".into()));
    }
    let name = format!("grid:{rows}x{cols}x{capacity}");
    let traps = rows * cols;
    if rows == 1 || cols == 1 {
        let segments = (1..traps).map(|t| (t - 1, t)).collect();
        return Topology::new(vec![capacity; traps], Vec::new(), segments, name);
    }
    let trap = |r: usize, c: usize| r * cols + c;
    let mut junctions = Vec::new();
    let mut segments = Vec::new();
    // crossing (r, c) sits between trap rows r, r+1 and columns c, c+1
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let node = traps + junctions.len();
            junctions.push(JunctionKind::X);
            for t in [trap(r, c), trap(r, c + 1), trap(r + 1, c), trap(r + 1, c + 1)] {
                segments.push((t, node));
            }
        }
    }
    Topology::new(vec![capacity; traps], junctions, segments, name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingModel {
    pub split: f64,
    pub move_per_segment: f64,
    pub merge: f64,
    pub x_junction: f64,
    pub y_junction: f64,
    pub gate2: f64,
    pub gate1: f64,
    pub measure: f64,
    pub ionswap_per_ion: f64,
    pub cool: f64,
    pub swap_method: SwapMethod,
    /// Optional two-qubit gate time keyed by trap capacity.
    pub gate2_by_capacity: BTreeMap<usize, f64>,
}

impl Default for TimingModel {
    fn default() -> Self {
        TimingModel {
            split: 80.0,
            move_per_segment: 5.0,
            merge: 80.0,
            x_junction: 120.0,
            y_junction: 100.0,
            gate2: 100.0,
            gate1: 10.0,
            measure: 100.0,
            ionswap_per_ion: 42.0,
            cool: 100.0,
            swap_method: SwapMethod::GateSwap,
            gate2_by_capacity: BTreeMap::new(),
        }
    }
}

impl TimingModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("split", self.split),
            ("move_per_segment", self.move_per_segment),
            ("merge", self.merge),
            ("x_junction", self.x_junction),
            ("y_junction", self.y_junction),
            ("gate2", self.gate2),
            ("gate1", self.gate1),
            ("measure", self.measure),
            ("ionswap_per_ion", self.ionswap_per_ion),
            ("cool", self.cool),
        ];
        for (name, v) in fields
            .into_iter()
            .chain(self.gate2_by_capacity.iter().map(|(_, &v)| ("gate2_by_capacity", v)))
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Timing(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Two-qubit gate time in a trap of the given capacity.
    pub fn gate2_time(&self, capacity: usize) -> f64 {
        self.gate2_by_capacity
            .get(&capacity)
            .copied()
            .unwrap_or(self.gate2)
    }

    /// A SWAP realised as three two-qubit gates.
    pub fn gateswap(&self) -> f64 {
        3.0 * self.gate2
    }

    pub fn junction(&self, kind: JunctionKind) -> f64 {
        match kind {
            JunctionKind::X => self.x_junction,
            JunctionKind::Y => self.y_junction,
        }
    }
}

pub fn intratrap_swap_time(timing: &TimingModel, method: SwapMethod, chain_length: usize) -> f64 {
    match method {
        SwapMethod::GateSwap => timing.gateswap(),
        SwapMethod::IonSwap => timing.ionswap_per_ion * chain_length as f64,
    }
}

/// Route between two traps. `nodes` includes both endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuttlePath {
    pub nodes: Vec<usize>,
    pub segments: Vec<usize>,
    pub junctions: Vec<JunctionKind>,
}

impl ShuttlePath {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn from(&self) -> usize {
        self.nodes[0]
    }

    pub fn to(&self) -> usize {
        *self.nodes.last().expect("path has at least one node")
    }

    /// Time spent between split and merge.
    pub fn transit_time(&self, timing: &TimingModel) -> f64 {
        self.segments.len() as f64 * timing.move_per_segment
            + self.junctions.iter().map(|&k| timing.junction(k)).sum::<f64>()
    }
}

/// Intratrap repositioning done at one end of a shuttle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Reposition {
    pub swaps: usize,
    pub chain_length: usize,
}

impl Reposition {
    pub const NONE: Reposition = Reposition {
        swaps: 0,
        chain_length: 0,
    };

    pub fn time(&self, timing: &TimingModel) -> f64 {
        self.swaps as f64 * intratrap_swap_time(timing, timing.swap_method, self.chain_length)
    }
}

pub fn shuttle_time(
    timing: &TimingModel,
    path: &ShuttlePath,
    source: Reposition,
    dest: Reposition,
) -> f64 {
    if path.is_empty() {
        return 0.0;
    }
    source.time(timing) + timing.split + path.transit_time(timing) + timing.merge + dest.time(timing)
}

fn node_cost(topology: &Topology, timing: &TimingModel, node: usize) -> u64 {
    topology
        .junction_kind(node)
        .map_or(0, |k| to_ticks(timing.junction(k)))
}

// Dijkstra runs on integer nanoseconds so equal-cost paths tie exactly.
fn to_ticks(us: f64) -> u64 {
    (us * 1000.0).round() as u64
}

/// Minimum-time route; equal-time routes resolve to the lexicographically smallest node sequence.
pub fn shuttle_path(
    topology: &Topology,
    timing: &TimingModel,
    from: usize,
    to: usize,
) -> Result<ShuttlePath> {
    let traps = topology.trap_count();
    if from >= traps || to >= traps {
        return Err(Error::Invalid(format!("trap {} does not exist", from.max(to))));
    }
    let step = to_ticks(timing.move_per_segment);
    let mut settled = vec![false; topology.node_count()];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, vec![from])));
    while let Some(Reverse((cost, nodes))) = heap.pop() {
        let v = *nodes.last().unwrap();
        if std::mem::replace(&mut settled[v], true) {
            continue;
        }
        if v == to {
            return Ok(path_from_nodes(topology, nodes));
        }
        for &(w, _) in topology.neighbors(v) {
            if settled[w] {
                continue;
            }
            let mut next = nodes.clone();
            next.push(w);
            heap.push(Reverse((cost + step + node_cost(topology, timing, w), next)));
        }
    }
    Err(Error::Unreachable { from, to })
}

fn path_from_nodes(topology: &Topology, nodes: Vec<usize>) -> ShuttlePath {
    let segments = nodes
        .windows(2)
        .map(|w| {
            topology
                .neighbors(w[0])
                .iter()
                .find(|&&(n, _)| n == w[1])
                .map(|&(_, s)| s)
                .expect("consecutive path nodes are adjacent")
        })
        .collect();
    let junctions = nodes
        .iter()
        .filter_map(|&n| topology.junction_kind(n))
        .collect();
    ShuttlePath {
        nodes,
        segments,
        junctions,
    }
}

/// Topology plus timing with every trap-to-trap route precomputed.
#[derive(Debug, Clone)]
pub struct Hardware {
    topology: Topology,
    timing: TimingModel,
    routes: Vec<Vec<ShuttlePath>>,
}

impl Hardware {
    pub fn new(topology: Topology, timing: TimingModel) -> Result<Self> {
        timing.validate()?;
        let t = topology.trap_count();
        let mut routes = Vec::with_capacity(t);
        for from in 0..t {
            let row = (0..t)
                .map(|to| shuttle_path(&topology, &timing, from, to))
                .collect::<Result<Vec<_>>>()?;
            routes.push(row);
        }
        Ok(Hardware {
            topology,
            timing,
            routes,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn timing(&self) -> &TimingModel {
        &self.timing
    }

    pub fn route(&self, from: usize, to: usize) -> &ShuttlePath {
        &self.routes[from][to]
    }

    /// Split-to-merge time from one trap to another, without repositioning.
    pub fn hop_time(&self, from: usize, to: usize) -> f64 {
        shuttle_time(&self.timing, self.route(from, to), Reposition::NONE, Reposition::NONE)
    }

    pub fn swap_time(&self, chain_length: usize) -> f64 {
        intratrap_swap_time(&self.timing, self.timing.swap_method, chain_length)
    }

    pub fn trap_count(&self) -> usize {
        self.topology.trap_count()
    }
}
