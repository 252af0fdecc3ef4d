use rayon::prelude::*;
use serde::Serialize;

use super::buffer::NodeBuffer;
use super::gf256::Gf256;
use crate::error::{Error, Result};
use crate::rates::RateAssignment;
use crate::topology::{seeded_rng, Hypergraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimParams {
    pub generation: usize,
    pub max_rounds: usize,
    pub seed: u64,
    /// Record per-round ranks and per-node emissions.
    pub trace: bool,
}

impl SimParams {
    pub fn new(generation: usize, max_rounds: usize, seed: u64) -> Self {
        SimParams {
            generation,
            max_rounds,
            seed,
            trace: false,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundTrace {
    /// Ranks after round `k` (entry 0 is the initial state).
    pub ranks: Vec<Vec<usize>>,
    /// Packets emitted by each node in round `k` (entry `k - 1`).
    pub sent: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimReport {
    pub seed: u64,
    pub generation: usize,
    pub rounds: usize,
    pub per_node_rank: Vec<usize>,
    pub innovative_receptions: u64,
    pub total_receptions: u64,
    pub innovation_ratio: f64,
    pub transmissions: u64,
    pub decoded_all: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<RoundTrace>,
}

impl SimReport {
    pub const CSV_HEADER: &'static str =
        "seed,G,rounds,transmissions,receptions,innovative,innovationRatio,decodedAll";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.seed,
            self.generation,
            self.rounds,
            self.transmissions,
            self.total_receptions,
            self.innovative_receptions,
            self.innovation_ratio,
            self.decoded_all
        )
    }
}

/// Broadcasts one generation of `G` packets from `source` in synchronous
/// rounds. Node `v` sends `rate(v)` random combinations of its buffer per
/// round to every node of `H_v`; packets are usable from the next round on.
///
/// Running out of rounds is not an error: the report has
/// `decoded_all = false`.
pub fn run_broadcast(
    hg: &Hypergraph,
    ra: &RateAssignment,
    source: usize,
    params: SimParams,
) -> Result<SimReport> {
    let n = hg.len();
    let g = params.generation;
    if g == 0 {
        return Err(Error::invalid("generation size must be at least 1"));
    }
    if ra.len() != n {
        return Err(Error::invalid("rate assignment does not match the graph"));
    }
    if source >= n {
        return Err(Error::invalid(format!("source {source} out of range")));
    }
    let reach = hg.reachable_from(source);
    if let Some(v) = reach.iter().position(|&r| !r) {
        return Err(Error::Disconnected(format!("node {v} is unreachable from the source")));
    }

    let mut rng = seeded_rng(params.seed);
    let mut buffers: Vec<NodeBuffer> = (0..n).map(|_| NodeBuffer::new(g)).collect();
    buffers[source] = NodeBuffer::full(g);

    // inbox[u] lists indices into the round's packet pool
    let mut inbox: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut pool: Vec<Vec<Gf256>> = Vec::new();

    let mut trace = params.trace.then(|| RoundTrace {
        ranks: vec![buffers.iter().map(NodeBuffer::rank).collect()],
        sent: Vec::new(),
    });

    let (mut innovative, mut receptions, mut transmissions) = (0u64, 0u64, 0u64);
    let mut rounds = 0;
    let mut decoded = buffers.iter().all(NodeBuffer::is_full);

    while !decoded && rounds < params.max_rounds {
        rounds += 1;
        pool.clear();
        inbox.iter_mut().for_each(Vec::clear);
        let mut sent = vec![0u64; n];

        for v in 0..n {
            if buffers[v].rank() == 0 {
                continue;
            }
            for _ in 0..ra.rate(v) {
                let packet = buffers[v]
                    .random_combination(&mut rng)
                    .expect("buffer has rank > 0");
                let id = pool.len() as u32;
                pool.push(packet);
                for &u in hg.targets(v) {
                    inbox[u].push(id);
                }
                sent[v] += 1;
            }
        }
        transmissions += sent.iter().sum::<u64>();

        let pool = &pool;
        let gained: u64 = buffers
            .par_iter_mut()
            .zip(inbox.par_iter())
            .map(|(buf, ids)| ids.iter().filter(|&&id| buf.insert(&pool[id as usize])).count() as u64)
            .sum();
        innovative += gained;
        receptions += inbox.iter().map(|ids| ids.len() as u64).sum::<u64>();

        if let Some(t) = trace.as_mut() {
            t.ranks.push(buffers.iter().map(NodeBuffer::rank).collect());
            t.sent.push(sent);
        }
        decoded = buffers.iter().all(NodeBuffer::is_full);
    }

    Ok(SimReport {
        seed: params.seed,
        generation: g,
        rounds,
        per_node_rank: buffers.iter().map(NodeBuffer::rank).collect(),
        innovative_receptions: innovative,
        total_receptions: receptions,
        innovation_ratio: if receptions == 0 {
            0.0
        } else {
            innovative as f64 / receptions as f64
        },
        transmissions,
        decoded_all: decoded,
        trace,
    })
}
