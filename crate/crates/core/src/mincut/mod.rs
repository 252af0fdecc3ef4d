//! Broadcast min-cut of a rated hypergraph.
//!
//! The capacity of an s-t cut `(S, T)` is the total rate of the nodes of `S`
//! that reach at least one node of `T`. It is computed exactly through a
//! max-flow reduction: each node `v` gets a broadcast vertex `b_v`, an arc
//! `v -> b_v` carrying `rate(v)` and arcs `b_v -> u` for every `u ∈ H_v`
//! whose capacity exceeds any cut value.

mod embedded;
pub mod flow;

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rates::RateAssignment;
use crate::topology::{seeded_rng, Hypergraph};

pub use embedded::{
    embedded_lattice_bound, embedded_mask, map_to_lattice, occupancy, occupancy_of_points,
    EmbeddedLattice, LatticeBound,
};
pub use flow::{max_flow, FlowNetwork, FlowNetworkBuilder, FlowSolver};

/// Largest instance [`brute_force_min_cut`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// An s-t partition of the node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPartition {
    source: usize,
    sink: usize,
    in_source_side: Vec<bool>,
}

impl CutPartition {
    /// Builds a partition from explicit sides; both must cover every node
    /// exactly once, with `source` in `source_side` and `sink` in `sink_side`.
    pub fn new(
        node_count: usize,
        source: usize,
        sink: usize,
        source_side: &[usize],
        sink_side: &[usize],
    ) -> Result<Self> {
        let mut side: Vec<Option<bool>> = vec![None; node_count];
        for (&v, in_s) in source_side
            .iter()
            .map(|v| (v, true))
            .chain(sink_side.iter().map(|v| (v, false)))
        {
            let slot = side
                .get_mut(v)
                .ok_or_else(|| Error::NotAPartition(format!("node {v} out of range")))?;
            if slot.is_some() {
                return Err(Error::NotAPartition(format!("node {v} listed twice")));
            }
            *slot = Some(in_s);
        }
        if let Some(v) = side.iter().position(Option::is_none) {
            return Err(Error::NotAPartition(format!("node {v} is on neither side")));
        }
        let in_source_side: Vec<bool> = side.into_iter().map(|s| s == Some(true)).collect();
        Self::from_membership(source, sink, in_source_side)
    }

    /// `in_source_side[v]` tells which side node `v` is on.
    pub fn from_membership(source: usize, sink: usize, in_source_side: Vec<bool>) -> Result<Self> {
        let n = in_source_side.len();
        if source >= n || sink >= n {
            return Err(Error::NotAPartition("source or sink out of range".into()));
        }
        if !in_source_side[source] {
            return Err(Error::NotAPartition(format!("source {source} is not in S")));
        }
        if in_source_side[sink] {
            return Err(Error::NotAPartition(format!("sink {sink} is not in T")));
        }
        Ok(CutPartition {
            source,
            sink,
            in_source_side,
        })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn len(&self) -> usize {
        self.in_source_side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_source_side.is_empty()
    }

    pub fn in_source_side(&self, v: usize) -> bool {
        self.in_source_side[v]
    }

    pub fn source_side(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.in_source_side[v]).collect()
    }

    pub fn sink_side(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.in_source_side[v]).collect()
    }

    /// `ΔS`: nodes of `S` with at least one target in `T`.
    pub fn boundary(&self, hg: &Hypergraph) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| {
                self.in_source_side[v] && hg.targets(v).iter().any(|&u| !self.in_source_side[u])
            })
            .collect()
    }
}

/// JSON form of a cut witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutWitnessDocument {
    pub value: u64,
    pub source: usize,
    pub sink: usize,
    #[serde(rename = "S")]
    pub source_side: Vec<usize>,
    #[serde(rename = "T")]
    pub sink_side: Vec<usize>,
    pub estimate: bool,
}

fn check_sizes(hg: &Hypergraph, ra: &RateAssignment) -> Result<()> {
    if hg.len() != ra.len() {
        return Err(Error::invalid(format!(
            "{} rates for {} nodes",
            ra.len(),
            hg.len()
        )));
    }
    Ok(())
}

/// `C(S) = Σ_{v ∈ ΔS} rate(v)`.
pub fn cut_capacity(hg: &Hypergraph, ra: &RateAssignment, cut: &CutPartition) -> Result<u64> {
    check_sizes(hg, ra)?;
    if cut.len() != hg.len() {
        return Err(Error::NotAPartition(format!(
            "partition covers {} nodes, graph has {}",
            cut.len(),
            hg.len()
        )));
    }
    Ok(cut.boundary(hg).into_iter().map(|v| ra.rate(v)).sum())
}

/// Flow network realizing the cut capacity: vertex `v` for node `v`,
/// vertex `N + v` for its broadcast vertex `b_v`.
#[derive(Debug, Clone)]
pub struct HyperFlowNetwork {
    network: FlowNetwork,
    nodes: usize,
    big: u64,
}

impl HyperFlowNetwork {
    pub fn network(&self) -> &FlowNetwork {
        &self.network
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn broadcast_vertex(&self, v: usize) -> usize {
        self.nodes + v
    }

    /// Capacity of the fan-out arcs: `1 + Σ rate(v)`.
    pub fn big(&self) -> u64 {
        self.big
    }

    pub fn finite_arc_count(&self) -> usize {
        self.network.arcs().filter(|&(_, _, c)| c < self.big).count()
    }
}

pub fn build_flow_network(hg: &Hypergraph, ra: &RateAssignment) -> Result<HyperFlowNetwork> {
    check_sizes(hg, ra)?;
    let n = hg.len();
    let big = 1 + ra.total();
    let mut b = FlowNetworkBuilder::with_capacity(2 * n, n + hg.total_targets());
    for v in 0..n {
        b.add_arc(v, n + v, ra.rate(v));
    }
    for arc in hg.arcs() {
        for &u in &arc.targets {
            b.add_arc(n + arc.head, u, big);
        }
    }
    Ok(HyperFlowNetwork {
        network: b.build(),
        nodes: n,
        big,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StCut {
    pub value: u64,
    pub witness: CutPartition,
}

/// Which destinations a broadcast min-cut ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Destinations {
    #[default]
    All,
    /// `count` destinations drawn without replacement from `seed`. The
    /// result is an upper estimate of the true broadcast min-cut.
    Sample { count: usize, seed: u64 },
}

/// How the per-destination minima are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Destinations in breadth-first order from the source; each finished
    /// destination joins the source side of the next flow problem. Every
    /// flow problem stays local to its sink.
    #[default]
    Contracting,
    /// One independent s-t flow per destination, run in parallel.
    PerDestination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BroadcastOptions {
    pub destinations: Destinations,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastCut {
    pub value: u64,
    /// A destination whose s-t min-cut equals `value`.
    pub argmin: usize,
    pub witness: CutPartition,
    /// True when only a sample of destinations was evaluated.
    pub estimate: bool,
    pub destinations_evaluated: usize,
}

impl BroadcastCut {
    pub fn to_document(&self) -> CutWitnessDocument {
        CutWitnessDocument {
            value: self.value,
            source: self.witness.source(),
            sink: self.witness.sink(),
            source_side: self.witness.source_side(),
            sink_side: self.witness.sink_side(),
            estimate: self.estimate,
        }
    }
}

/// Min-cut queries against one rated hypergraph.
#[derive(Debug, Clone)]
pub struct CutSolver<'a> {
    hg: &'a Hypergraph,
    ra: &'a RateAssignment,
    flow: HyperFlowNetwork,
}

impl<'a> CutSolver<'a> {
    pub fn new(hg: &'a Hypergraph, ra: &'a RateAssignment) -> Result<Self> {
        Ok(CutSolver {
            hg,
            ra,
            flow: build_flow_network(hg, ra)?,
        })
    }

    pub fn flow_network(&self) -> &HyperFlowNetwork {
        &self.flow
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.hg.len() {
            return Err(Error::invalid(format!("node {v} out of range")));
        }
        Ok(())
    }

    pub fn min_cut_st(&self, s: usize, t: usize) -> Result<StCut> {
        self.check_node(s)?;
        self.check_node(t)?;
        if s == t {
            return Err(Error::invalid("source and sink must differ"));
        }
        let mut solver = FlowSolver::new(&self.flow.network);
        solver.set_source(s, true);
        let value = solver.max_flow(t, u64::MAX);
        let membership = (0..self.hg.len())
            .map(|v| solver.on_sink_side(v) == Some(false))
            .collect();
        let witness = CutPartition::from_membership(s, t, membership)?;
        Ok(StCut { value, witness })
    }

    pub fn broadcast(&self, s: usize, opts: BroadcastOptions) -> Result<BroadcastCut> {
        self.check_node(s)?;
        let n = self.hg.len();
        if n < 2 {
            return Err(Error::invalid("broadcast needs at least 2 nodes"));
        }
        let (mut order, estimate) = self.destinations(s, opts.destinations);
        let evaluated = order.len();

        let reach = self.hg.reachable_from(s);
        let (value, argmin) = if let Some(&t) = order.iter().find(|&&t| !reach[t]) {
            (0, t)
        } else {
            let upper = self.ra.rate(s);
            match opts.strategy {
                Strategy::Contracting => {
                    let pos = bfs_rank(self.hg, s);
                    order.sort_by_key(|&t| (pos[t], t));
                    self.contracting(s, &order, upper)
                }
                Strategy::PerDestination => self.per_destination(s, &order, upper),
            }
        };
        let st = self.min_cut_st(s, argmin)?;
        debug_assert_eq!(st.value, value);
        Ok(BroadcastCut {
            value,
            argmin,
            witness: st.witness,
            estimate,
            destinations_evaluated: evaluated,
        })
    }

    fn destinations(&self, s: usize, which: Destinations) -> (Vec<usize>, bool) {
        let all: Vec<usize> = (0..self.hg.len()).filter(|&t| t != s).collect();
        match which {
            Destinations::All => (all, false),
            Destinations::Sample { count, seed } if count < all.len() => {
                let mut rng = seeded_rng(seed);
                let mut picked: Vec<usize> = sample(&mut rng, all.len(), count.max(1))
                    .into_iter()
                    .map(|i| all[i])
                    .collect();
                picked.sort_unstable();
                (picked, true)
            }
            Destinations::Sample { .. } => (all, false),
        }
    }

    /// `min_i λ(S_i, t_i)` with `S_i = {s, t_1, …, t_{i-1}}` equals
    /// `min_i λ(s, t_i)`: the optimal cut separates `s` from some first
    /// `t_i`, and every earlier `t_j` lies on its source side. Each flow is
    /// capped at the current best, so only strict improvements run to
    /// completion.
    fn contracting(&self, s: usize, order: &[usize], upper: u64) -> (u64, usize) {
        let mut solver = FlowSolver::new(&self.flow.network);
        solver.set_source(s, true);
        let mut best = upper;
        let mut argmin = order[0];
        for &t in order {
            if best == 0 {
                break;
            }
            let value = solver.max_flow(t, best);
            if value < best {
                best = value;
                argmin = t;
            }
            solver.set_source(t, true);
        }
        (best, argmin)
    }

    fn per_destination(&self, s: usize, order: &[usize], upper: u64) -> (u64, usize) {
        let best = AtomicU64::new(upper);
        let network = &self.flow.network;
        let values: Vec<(usize, u64)> = order
            .par_iter()
            .map_init(
                || {
                    let mut solver = FlowSolver::new(network);
                    solver.set_source(s, true);
                    solver
                },
                |solver, &t| {
                    // exact whenever the value does not exceed the best so far
                    let limit = best.load(Ordering::Relaxed).saturating_add(1);
                    let value = solver.max_flow(t, limit);
                    best.fetch_min(value, Ordering::Relaxed);
                    (t, value)
                },
            )
            .collect();
        let value = values
            .iter()
            .map(|&(_, v)| v)
            .min()
            .unwrap_or(upper)
            .min(upper);
        let argmin = values
            .iter()
            .filter(|&&(_, v)| v == value)
            .map(|&(t, _)| t)
            .min()
            .unwrap_or(order[0]);
        (value, argmin)
    }
}

fn bfs_rank(hg: &Hypergraph, s: usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; hg.len()];
    let mut queue = VecDeque::from([s]);
    rank[s] = 0;
    let mut next = 1;
    while let Some(v) = queue.pop_front() {
        for &u in hg.targets(v) {
            if rank[u] == usize::MAX {
                rank[u] = next;
                next += 1;
                queue.push_back(u);
            }
        }
    }
    rank
}

pub fn min_cut_st(hg: &Hypergraph, ra: &RateAssignment, s: usize, t: usize) -> Result<StCut> {
    CutSolver::new(hg, ra)?.min_cut_st(s, t)
}

/// `C_min(s) = min_{t ≠ s} C_min(s, t)` over the chosen destinations.
pub fn min_cut_broadcast(
    hg: &Hypergraph,
    ra: &RateAssignment,
    s: usize,
    opts: BroadcastOptions,
) -> Result<BroadcastCut> {
    CutSolver::new(hg, ra)?.broadcast(s, opts)
}

/// Exact s-t min-cut by enumerating every partition (`2^(N-2)` of them).
pub fn brute_force_min_cut(hg: &Hypergraph, ra: &RateAssignment, s: usize, t: usize) -> Result<u64> {
    check_sizes(hg, ra)?;
    let n = hg.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            nodes: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if s >= n || t >= n || s == t {
        return Err(Error::invalid("need distinct in-range source and sink"));
    }
    let adjacency: Vec<u32> = (0..n)
        .map(|v| hg.targets(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let free: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let all = (1u32 << n) - 1;
    let mut best = u64::MAX;
    for bits in 0u32..(1 << free.len()) {
        let mut in_s = 1u32 << s;
        for (i, &v) in free.iter().enumerate() {
            if bits & (1 << i) != 0 {
                in_s |= 1 << v;
            }
        }
        let in_t = all & !in_s;
        let capacity: u64 = (0..n)
            .filter(|&v| in_s & (1 << v) != 0 && adjacency[v] & in_t != 0)
            .map(|v| ra.rate(v))
            .sum();
        best = best.min(capacity);
    }
    Ok(best)
}
