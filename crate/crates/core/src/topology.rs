//! Network construction: lattice and random unit-disk placements inside a
//! square, border classification, hyperarcs and lattice-set utilities.
//!
//! A lattice network of size `L` has its nodes on the integer points
//! `{0, …, L-1}²`, so its geometric extent (used for border classification)
//! is `L - 1`. A disk network places nodes uniformly on `[0, L]²`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of the generator used for every random draw in the crate.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.3/seed_from_u64";

/// Version of the network JSON document.
pub const NETWORK_FORMAT_VERSION: u32 = 1;

const RANGE_SLACK: f64 = 1e-9;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closed-disk membership test on a squared distance.
///
/// A relative slack of 1e-9 on the squared radius absorbs rounding in
/// radii such as `(2 - 0.8) / 0.4`, which should be exactly 3.
#[inline]
pub fn within_range(dist2: f64, radius: f64) -> bool {
    dist2 <= radius * radius * (1.0 + RANGE_SLACK)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Lattice,
    Disk,
}

/// Where the source of a random network is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourcePlacement {
    /// The node nearest the center of the square (lowest id on ties).
    #[default]
    Center,
    Node(usize),
}

/// A set of nodes in a square, plus the radio range and border width.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    kind: NetworkKind,
    side: f64,
    rho: f64,
    border_width: f64,
    nodes: Vec<Point>,
    source: usize,
}

impl Network {
    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    /// The side length `L` the network was generated with.
    pub fn side(&self) -> f64 {
        self.side
    }

    /// Side of the square the nodes live in: `L - 1` for lattices, `L` for
    /// disk networks.
    pub fn extent(&self) -> f64 {
        match self.kind {
            NetworkKind::Lattice => self.side - 1.0,
            NetworkKind::Disk => self.side,
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn border_width(&self) -> f64 {
        self.border_width
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Node density `N / L²`.
    pub fn density(&self) -> f64 {
        self.nodes.len() as f64 / (self.side * self.side)
    }

    pub fn with_source(mut self, source: usize) -> Result<Self> {
        if source >= self.nodes.len() {
            return Err(Error::invalid(format!(
                "source id {source} out of range for {} nodes",
                self.nodes.len()
            )));
        }
        self.source = source;
        Ok(self)
    }

    pub fn is_border(&self, id: usize) -> bool {
        classify_border(&self.nodes[id], self.extent(), self.border_width)
    }

    pub fn border_count(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_border(v)).count()
    }

    /// Node id of the lattice point `(x, y)`; ids are row-major.
    pub fn lattice_id(&self, x: usize, y: usize) -> Option<usize> {
        if self.kind != NetworkKind::Lattice {
            return None;
        }
        let l = self.side as usize;
        (x < l && y < l).then_some(y * l + x)
    }

    /// The node nearest `(cx, cy)`, lowest id on ties.
    pub fn nearest_node(&self, target: Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (id, p) in self.nodes.iter().enumerate() {
            let d = p.dist2(&target);
            if d < best_d {
                best_d = d;
                best = id;
            }
        }
        best
    }

    pub fn center(&self) -> Point {
        let c = self.extent() / 2.0;
        Point::new(c, c)
    }

    pub fn hypergraph(&self) -> Hypergraph {
        build_hyperarcs(self)
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self)
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            version: NETWORK_FORMAT_VERSION,
            kind: self.kind,
            side: self.side,
            rho: self.rho,
            border_width: self.border_width,
            source_id: self.source,
            nodes: self.nodes.iter().map(|p| [p.x, p.y]).collect(),
            rng: None,
            increased_rate: None,
            rates: None,
        }
    }

    /// Rebuilds a network from its JSON document, checking every invariant.
    pub fn from_document(doc: &NetworkDocument) -> Result<Self> {
        if doc.version != NETWORK_FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported network document version {}",
                doc.version
            )));
        }
        check_geometry(doc.side, doc.rho, doc.border_width)?;
        if doc.nodes.len() < 2 {
            return Err(Error::invalid("a network needs at least 2 nodes"));
        }
        let nodes: Vec<Point> = doc.nodes.iter().map(|&[x, y]| Point::new(x, y)).collect();
        let net = match doc.kind {
            NetworkKind::Lattice => {
                let expected = generate_lattice(lattice_size(doc.side)?, doc.rho, doc.border_width)?;
                if expected.nodes != nodes {
                    return Err(Error::invalid(
                        "lattice document nodes are not the integer grid {0..L-1}^2",
                    ));
                }
                expected
            }
            NetworkKind::Disk => {
                let side = doc.side;
                if let Some(p) = nodes
                    .iter()
                    .find(|p| !(0.0..=side).contains(&p.x) || !(0.0..=side).contains(&p.y))
                {
                    return Err(Error::invalid(format!(
                        "node ({}, {}) lies outside [0, {side}]^2",
                        p.x, p.y
                    )));
                }
                Network {
                    kind: NetworkKind::Disk,
                    side,
                    rho: doc.rho,
                    border_width: doc.border_width,
                    nodes,
                    source: 0,
                }
            }
        };
        net.with_source(doc.source_id)
    }
}

/// Versioned JSON form of a [`Network`], optionally carrying rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NetworkDocument {
    pub version: u32,
    pub kind: NetworkKind,
    #[serde(rename = "L")]
    pub side: f64,
    pub rho: f64,
    #[serde(rename = "W")]
    pub border_width: f64,
    pub source_id: usize,
    pub nodes: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<RngInfo>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub increased_rate: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngInfo {
    pub algorithm: String,
    pub seed: u64,
}

impl RngInfo {
    pub fn new(seed: u64) -> Self {
        RngInfo {
            algorithm: RNG_ALGORITHM.to_string(),
            seed,
        }
    }
}

fn check_geometry(side: f64, rho: f64, w: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid(format!("rho must be positive, got {rho}")));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::invalid(format!("L must be positive, got {side}")));
    }
    if w <= rho {
        return Err(Error::invalid(format!(
            "W must exceed rho (W = {w}, rho = {rho})"
        )));
    }
    Ok(())
}

fn lattice_size(side: f64) -> Result<usize> {
    if side.fract() != 0.0 || side < 1.0 {
        return Err(Error::invalid(format!(
            "lattice size must be a positive integer, got {side}"
        )));
    }
    Ok(side as usize)
}

/// Nodes on the integer grid `{0, …, L-1}²`; the source is the node nearest
/// the center.
pub fn generate_lattice(size: usize, rho: f64, border_width: f64) -> Result<Network> {
    let side = size as f64;
    check_geometry(side, rho, border_width)?;
    if side <= 2.0 * border_width {
        return Err(Error::invalid(format!(
            "L must exceed 2W for a nonempty interior (L = {size}, W = {border_width})"
        )));
    }
    let nodes = (0..size)
        .flat_map(|y| (0..size).map(move |x| Point::new(x as f64, y as f64)))
        .collect();
    let mut net = Network {
        kind: NetworkKind::Lattice,
        side,
        rho,
        border_width,
        nodes,
        source: 0,
    };
    net.source = net.nearest_node(net.center());
    Ok(net)
}

/// `count` points i.i.d. uniform on `[0, L]²`.
pub fn uniform_points<R: Rng>(rng: &mut R, count: usize, side: f64) -> Vec<Point> {
    (0..count)
        .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
        .collect()
}

/// Random unit-disk network with `count` nodes, reproducible from `seed`.
pub fn generate_random_disk(
    count: usize,
    side: f64,
    rho: f64,
    border_width: f64,
    seed: u64,
    placement: SourcePlacement,
) -> Result<Network> {
    check_geometry(side, rho, border_width)?;
    if count < 2 {
        return Err(Error::invalid(format!(
            "a network needs at least 2 nodes, got {count}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let nodes = uniform_points(&mut rng, count, side);
    let mut net = Network {
        kind: NetworkKind::Disk,
        side,
        rho,
        border_width,
        nodes,
        source: 0,
    };
    net.source = match placement {
        SourcePlacement::Center => net.nearest_node(net.center()),
        SourcePlacement::Node(id) => return net.with_source(id),
    };
    Ok(net)
}

/// A disk network from explicit coordinates (test fixtures, imports).
pub fn disk_network_from_points(
    nodes: Vec<Point>,
    side: f64,
    rho: f64,
    border_width: f64,
    source: usize,
) -> Result<Network> {
    let doc = NetworkDocument {
        version: NETWORK_FORMAT_VERSION,
        kind: NetworkKind::Disk,
        side,
        rho,
        border_width,
        source_id: source,
        nodes: nodes.iter().map(|p| [p.x, p.y]).collect(),
        rng: None,
        increased_rate: None,
        rates: None,
    };
    Network::from_document(&doc)
}

/// True iff `p` lies in the border strip of width `w` of the square `[0, extent]²`.
///
/// The interior is closed: a point at distance exactly `w` from every side
/// is interior.
pub fn classify_border(p: &Point, extent: f64, w: f64) -> bool {
    p.x.min(p.y).min(extent - p.x).min(extent - p.y) < w
}

/// Areas of the border strip and the interior of a square of side `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BorderSpec {
    pub width: f64,
    pub border_area: f64,
    pub interior_area: f64,
}

impl BorderSpec {
    pub fn new(side: f64, width: f64) -> Self {
        BorderSpec {
            width,
            border_area: 4.0 * width * (side - width),
            interior_area: (side - 2.0 * width).powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperarc {
    pub head: usize,
    /// Sorted ids of the nodes one transmission of `head` reaches.
    pub targets: Vec<usize>,
}

/// One hyperarc per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    arcs: Vec<Hyperarc>,
}

impl Hypergraph {
    /// Builds a hypergraph from per-node target lists. Targets are sorted and
    /// deduplicated; self-loops and out-of-range ids are rejected.
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        let mut arcs = Vec::with_capacity(n);
        for (head, mut targets) in adjacency.into_iter().enumerate() {
            targets.sort_unstable();
            targets.dedup();
            if let Some(&bad) = targets.iter().find(|&&t| t >= n || t == head) {
                return Err(Error::invalid(format!("node {head} has invalid target {bad}")));
            }
            arcs.push(Hyperarc { head, targets });
        }
        Ok(Hypergraph { arcs })
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arcs(&self) -> &[Hyperarc] {
        &self.arcs
    }

    pub fn targets(&self, v: usize) -> &[usize] {
        &self.arcs[v].targets
    }

    pub fn degree(&self, v: usize) -> usize {
        self.arcs[v].targets.len()
    }

    pub fn max_degree(&self) -> usize {
        self.arcs.iter().map(|a| a.targets.len()).max().unwrap_or(0)
    }

    /// Sum over nodes of `|H_v|`.
    pub fn total_targets(&self) -> usize {
        self.arcs.iter().map(|a| a.targets.len()).sum()
    }

    pub fn contains(&self, v: usize, u: usize) -> bool {
        self.arcs[v].targets.binary_search(&u).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs
            .iter()
            .all(|a| a.targets.iter().all(|&u| self.contains(u, a.head)))
    }

    /// Nodes reachable from `start` by following hyperarcs.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &u in self.targets(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// True iff the graph is a single component, ignoring arc direction.
    pub fn is_connected(&self) -> bool {
        if self.arcs.is_empty() {
            return true;
        }
        let mut undirected: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for a in &self.arcs {
            for &u in &a.targets {
                undirected[a.head].push(u);
                undirected[u].push(a.head);
            }
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &undirected[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == self.len()
    }
}

/// One hyperarc per node: every other node within the closed disk of radius
/// `rho`. Nodes are bucketed on a `rho`-sized grid.
pub fn build_hyperarcs(net: &Network) -> Hypergraph {
    let rho = net.rho;
    let cell = |p: &Point| ((p.x / rho).floor() as i64, (p.y / rho).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (id, p) in net.nodes.iter().enumerate() {
        buckets.entry(cell(p)).or_default().push(id);
    }
    let arcs = net
        .nodes
        .iter()
        .enumerate()
        .map(|(head, p)| {
            let (cx, cy) = cell(p);
            let mut targets = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(ids) = buckets.get(&(cx + dx, cy + dy)) {
                        targets.extend(
                            ids.iter()
                                .copied()
                                .filter(|&u| u != head && within_range(p.dist2(&net.nodes[u]), rho)),
                        );
                    }
                }
            }
            targets.sort_unstable();
            Hyperarc { head, targets }
        })
        .collect();
    Hypergraph { arcs }
}

pub fn is_connected(net: &Network) -> bool {
    build_hyperarcs(net).is_connected()
}

pub type LatticePoint = (i64, i64);

/// Integer offsets within a closed disk: `{(x, y) ∈ Z² : x² + y² ≤ radius²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMask {
    radius: f64,
    offsets: BTreeSet<LatticePoint>,
}

impl LatticeMask {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!(
                "mask radius must be non-negative, got {radius}"
            )));
        }
        let bound = (radius * (1.0 + RANGE_SLACK)).floor() as i64;
        let offsets = (-bound..=bound)
            .flat_map(|x| (-bound..=bound).map(move |y| (x, y)))
            .filter(|&(x, y)| within_range((x * x + y * y) as f64, radius))
            .collect();
        Ok(LatticeMask { radius, offsets })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn offsets(&self) -> &BTreeSet<LatticePoint> {
        &self.offsets
    }

    /// `|R|`, origin included.
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// `|R| - 1`: the degree of an interior lattice node.
    pub fn neighbor_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn contains(&self, offset: LatticePoint) -> bool {
        self.offsets.contains(&offset)
    }
}

/// `A ⊕ B = {a + b : a ∈ A, b ∈ B}`.
pub fn minkowski_sum(
    a: &BTreeSet<LatticePoint>,
    b: &BTreeSet<LatticePoint>,
) -> Result<BTreeSet<LatticePoint>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(a.iter()
        .flat_map(|&(ax, ay)| b.iter().map(move |&(bx, by)| (ax + bx, ay + by)))
        .collect())
}
