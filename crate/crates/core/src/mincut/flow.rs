//! Integer max-flow on a CSR residual graph.
//!
//! The solver runs Dinic phases with levels measured as residual distance
//! *to* the sink, so a phase only explores the region around the sink up to
//! the nearest source vertex. Any number of vertices can be marked as
//! sources; they act as one super-source of unbounded supply. Residual
//! changes are journaled, so resetting between runs costs only what the
//! previous run touched.

#[derive(Debug, Clone)]
pub struct FlowNetworkBuilder {
    vertex_count: usize,
    arcs: Vec<(u32, u32, u64)>,
}

impl FlowNetworkBuilder {
    pub fn new(vertex_count: usize) -> Self {
        assert!(vertex_count < u32::MAX as usize, "too many vertices");
        FlowNetworkBuilder {
            vertex_count,
            arcs: Vec::new(),
        }
    }

    pub fn with_capacity(vertex_count: usize, arcs: usize) -> Self {
        let mut b = Self::new(vertex_count);
        b.arcs.reserve(arcs);
        b
    }

    /// Adds a directed arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: u64) -> usize {
        assert!(from < self.vertex_count && to < self.vertex_count, "vertex out of range");
        self.arcs.push((from as u32, to as u32, capacity));
        self.arcs.len() - 1
    }

    pub fn build(self) -> FlowNetwork {
        let n = self.vertex_count;
        let mut first = vec![0usize; n + 1];
        for &(from, to, _) in &self.arcs {
            first[from as usize + 1] += 1;
            first[to as usize + 1] += 1;
        }
        for v in 0..n {
            first[v + 1] += first[v];
        }
        let slots = first[n];
        let mut fill = first.clone();
        let mut head = vec![0u32; slots];
        let mut rev = vec![0u32; slots];
        let mut cap = vec![0u64; slots];
        for &(from, to, c) in &self.arcs {
            let f = fill[from as usize];
            fill[from as usize] += 1;
            let r = fill[to as usize];
            fill[to as usize] += 1;
            head[f] = to;
            cap[f] = c;
            head[r] = from;
            cap[r] = 0;
            rev[f] = r as u32;
            rev[r] = f as u32;
        }
        FlowNetwork {
            vertex_count: n,
            first,
            head,
            rev,
            cap,
            arcs: self.arcs,
        }
    }
}

/// Directed graph with integer arc capacities.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    vertex_count: usize,
    first: Vec<usize>,
    head: Vec<u32>,
    rev: Vec<u32>,
    cap: Vec<u64>,
    arcs: Vec<(u32, u32, u64)>,
}

impl FlowNetwork {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of arcs added through the builder (residual twins excluded).
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// `(from, to, capacity)` of arc `index`.
    pub fn arc(&self, index: usize) -> (usize, usize, u64) {
        let (f, t, c) = self.arcs[index];
        (f as usize, t as usize, c)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.arcs.iter().map(|&(f, t, c)| (f as usize, t as usize, c))
    }
}

/// Exact maximum flow from `source` to `sink`.
pub fn max_flow(net: &FlowNetwork, source: usize, sink: usize) -> u64 {
    if source == sink {
        return 0;
    }
    let mut solver = FlowSolver::new(net);
    solver.set_source(source, true);
    solver.max_flow(sink, u64::MAX)
}

/// Reusable max-flow state over one [`FlowNetwork`].
#[derive(Debug, Clone)]
pub struct FlowSolver<'a> {
    net: &'a FlowNetwork,
    residual: Vec<u64>,
    journal: Vec<u32>,
    is_source: Vec<bool>,
    level: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    cut_epoch: Option<u32>,
    cursor: Vec<usize>,
    queue: Vec<u32>,
    starts: Vec<u32>,
    path: Vec<u32>,
}

const DEAD: u32 = u32::MAX;

impl<'a> FlowSolver<'a> {
    pub fn new(net: &'a FlowNetwork) -> Self {
        let n = net.vertex_count;
        FlowSolver {
            net,
            residual: net.cap.clone(),
            journal: Vec::new(),
            is_source: vec![false; n],
            level: vec![0; n],
            mark: vec![0; n],
            epoch: 0,
            cut_epoch: None,
            cursor: vec![0; n],
            queue: Vec::new(),
            starts: Vec::new(),
            path: Vec::new(),
        }
    }

    pub fn set_source(&mut self, v: usize, on: bool) {
        self.is_source[v] = on;
    }

    pub fn is_source(&self, v: usize) -> bool {
        self.is_source[v]
    }

    /// Maximum flow from the marked sources into `sink`, stopping once it
    /// reaches `limit`. The result is `min(true max flow, limit)`; the flow
    /// starts from zero on every call.
    pub fn max_flow(&mut self, sink: usize, limit: u64) -> u64 {
        assert!(!self.is_source[sink], "sink is marked as a source");
        self.reset();
        self.cut_epoch = None;
        let mut flow = 0u64;
        while flow < limit {
            self.build_levels(sink);
            if self.starts.is_empty() {
                self.cut_epoch = Some(self.epoch);
                break;
            }
            let starts = std::mem::take(&mut self.starts);
            for &start in &starts {
                while flow < limit {
                    let pushed = self.augment(start as usize, sink, limit - flow);
                    if pushed == 0 {
                        break;
                    }
                    flow += pushed;
                }
                if flow >= limit {
                    break;
                }
            }
            self.starts = starts;
        }
        flow
    }

    /// After a run that ended below its limit: true iff `v` can still reach
    /// the sink in the residual graph. The complement is a minimum cut's
    /// source side.
    pub fn on_sink_side(&self, v: usize) -> Option<bool> {
        self.cut_epoch.map(|e| self.mark[v] == e)
    }

    fn reset(&mut self) {
        for &e in &self.journal {
            let e = e as usize;
            let r = self.net.rev[e] as usize;
            self.residual[e] = self.net.cap[e];
            self.residual[r] = self.net.cap[r];
        }
        self.journal.clear();
    }

    fn next_epoch(&mut self) {
        if self.epoch == u32::MAX - 1 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    /// Breadth-first search backwards from the sink over residual arcs,
    /// stopping after the first level that contains a source vertex.
    fn build_levels(&mut self, sink: usize) {
        self.next_epoch();
        let epoch = self.epoch;
        let net = self.net;
        self.queue.clear();
        self.starts.clear();
        self.queue.push(sink as u32);
        self.mark[sink] = epoch;
        self.level[sink] = 0;
        self.cursor[sink] = net.first[sink];
        let mut frontier = 0;
        while frontier < self.queue.len() && self.starts.is_empty() {
            let end = self.queue.len();
            for i in frontier..end {
                let y = self.queue[i] as usize;
                let next_level = self.level[y] + 1;
                for e in net.first[y]..net.first[y + 1] {
                    let x = net.head[e] as usize;
                    if self.mark[x] != epoch && self.residual[net.rev[e] as usize] > 0 {
                        self.mark[x] = epoch;
                        self.level[x] = next_level;
                        self.cursor[x] = net.first[x];
                        if self.is_source[x] {
                            self.starts.push(x as u32);
                        } else {
                            self.queue.push(x as u32);
                        }
                    }
                }
            }
            frontier = end;
        }
    }

    /// Pushes flow along one admissible path from `start`; 0 when blocked.
    fn augment(&mut self, start: usize, sink: usize, limit: u64) -> u64 {
        let net = self.net;
        let epoch = self.epoch;
        self.path.clear();
        let mut u = start;
        loop {
            if u == sink {
                let mut delta = limit;
                for &e in &self.path {
                    delta = delta.min(self.residual[e as usize]);
                }
                for &e in &self.path {
                    let e = e as usize;
                    self.residual[e] -= delta;
                    self.residual[net.rev[e] as usize] += delta;
                    self.journal.push(e as u32);
                }
                return delta;
            }
            let end = net.first[u + 1];
            let lu = self.level[u];
            let mut advanced = false;
            while self.cursor[u] < end {
                let e = self.cursor[u];
                let x = net.head[e] as usize;
                if self.residual[e] > 0
                    && self.mark[x] == epoch
                    && lu != DEAD
                    && lu > 0
                    && self.level[x] == lu - 1
                {
                    self.path.push(e as u32);
                    u = x;
                    advanced = true;
                    break;
                }
                self.cursor[u] += 1;
            }
            if !advanced {
                self.level[u] = DEAD;
                match self.path.pop() {
                    None => return 0,
                    Some(e) => {
                        u = net.head[net.rev[e as usize] as usize] as usize;
                        self.cursor[u] += 1;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn network(n: usize, arcs: &[(usize, usize, u64)]) -> FlowNetwork {
        let mut b = FlowNetworkBuilder::new(n);
        for &(f, t, c) in arcs {
            b.add_arc(f, t, c);
        }
        b.build()
    }

    #[test]
    fn single_path() {
        let net = network(3, &[(0, 1, 4), (1, 2, 100)]);
        assert_eq!(max_flow(&net, 0, 2), 4);
    }

    #[test]
    fn two_disjoint_relays() {
        // s=0, relays 1 and 2 through broadcast vertices 3 and 4, t=5
        let big = 100;
        let net = network(
            6,
            &[(0, 1, big), (0, 2, big), (1, 3, 1), (2, 4, 1), (3, 5, big), (4, 5, big)],
        );
        assert_eq!(max_flow(&net, 0, 5), 2);
    }

    #[test]
    fn disconnected() {
        let net = network(4, &[(0, 1, 10), (2, 3, 5)]);
        assert_eq!(max_flow(&net, 0, 3), 0);
        assert_eq!(max_flow(&net, 3, 0), 0);
    }

    #[test]
    fn classic_instance() {
        let net = network(
            6,
            &[
                (0, 1, 10),
                (0, 2, 10),
                (1, 3, 4),
                (1, 4, 8),
                (2, 4, 9),
                (3, 5, 10),
                (4, 3, 6),
                (4, 5, 10),
            ],
        );
        assert_eq!(max_flow(&net, 0, 5), 19);
    }

    #[test]
    fn needs_flow_cancellation() {
        // the greedy path 0-1-2-3 must be partly undone
        let net = network(4, &[(0, 1, 1), (0, 2, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]);
        assert_eq!(max_flow(&net, 0, 3), 2);
    }

    #[test]
    fn limit_caps_the_result() {
        let net = network(2, &[(0, 1, 7), (0, 1, 5)]);
        let mut s = FlowSolver::new(&net);
        s.set_source(0, true);
        assert_eq!(s.max_flow(1, 3), 3);
        assert_eq!(s.on_sink_side(0), None);
        assert_eq!(s.max_flow(1, u64::MAX), 12);
        assert_eq!(s.on_sink_side(0), Some(false));
        assert_eq!(s.on_sink_side(1), Some(true));
    }

    #[test]
    fn multiple_sources_and_reuse() {
        let net = network(4, &[(0, 3, 2), (1, 3, 3), (2, 3, 4)]);
        let mut s = FlowSolver::new(&net);
        s.set_source(0, true);
        assert_eq!(s.max_flow(3, u64::MAX), 2);
        s.set_source(1, true);
        assert_eq!(s.max_flow(3, u64::MAX), 5);
        s.set_source(2, true);
        assert_eq!(s.max_flow(3, u64::MAX), 9);
        s.set_source(1, false);
        assert_eq!(s.max_flow(3, u64::MAX), 6);
    }

    #[test]
    fn long_path_does_not_recurse() {
        let n = 200_000;
        let arcs: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 3)).collect();
        let net = network(n, &arcs);
        assert_eq!(max_flow(&net, 0, n - 1), 3);
    }
}
