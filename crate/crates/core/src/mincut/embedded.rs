//! Embedded lattice: nodes of a continuous network snapped to a rescaled
//! grid `rZ²`, with the per-cell occupancy used by the min-cut lower bound
//! `m_min · (|R(r)| - 1)`.
//!
//! Cell `(i, j)` collects the points `p` with `floor(p / r + 1/2) = (i, j)`,
//! i.e. the half-open square of side `r` centered on `(ri, rj)`. Cells on the
//! edge of `[0, L]²` are clipped by the square; cells whose square lies
//! entirely inside it are "full" and are tracked separately.

use crate::error::{Error, Result};
use crate::topology::{LatticeMask, LatticePoint, Network, Point};

const EDGE_SLACK: f64 = 1e-9;

/// `λ(p) = (r ⌊x/r + 1/2⌋, r ⌊y/r + 1/2⌋)`.
pub fn map_to_lattice(p: &Point, r: f64) -> Point {
    let (i, j) = cell_of(p, r);
    Point::new(r * i as f64, r * j as f64)
}

fn cell_of(p: &Point, r: f64) -> LatticePoint {
    (
        (p.x / r + 0.5).floor() as i64,
        (p.y / r + 0.5).floor() as i64,
    )
}

/// `R(r)`: grid offsets within distance `ρ - 2r`, in units of `r`.
pub fn embedded_mask(rho: f64, r: f64) -> Result<LatticeMask> {
    if !(r > 0.0 && 2.0 * r < rho) {
        return Err(Error::invalid(format!(
            "embedded lattice needs 0 < 2r < rho (r = {r}, rho = {rho})"
        )));
    }
    LatticeMask::new((rho - 2.0 * r) / r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedLattice {
    scale: f64,
    cells_per_axis: usize,
    occupancy: Vec<u32>,
    node_count: usize,
    m_min: u32,
    m_max: u32,
    full_first: usize,
    full_last: usize,
    full_min: Option<u32>,
    full_max: Option<u32>,
    mask: Option<LatticeMask>,
}

impl EmbeddedLattice {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Grid indices run over `0..cells_per_axis` on both axes.
    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn cell_count(&self) -> usize {
        self.occupancy.len()
    }

    /// `m(u)` for the grid point `u = (r i, r j)`.
    pub fn occupancy(&self, i: usize, j: usize) -> u32 {
        self.occupancy[j * self.cells_per_axis + i]
    }

    pub fn occupancies(&self) -> &[u32] {
        &self.occupancy
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn m_min(&self) -> u32 {
        self.m_min
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn mean_occupancy(&self) -> f64 {
        self.node_count as f64 / self.occupancy.len() as f64
    }

    pub fn is_full_cell(&self, i: usize, j: usize) -> bool {
        let range = self.full_first..=self.full_last;
        range.contains(&i) && range.contains(&j)
    }

    pub fn full_cell_count(&self) -> usize {
        if self.full_last < self.full_first {
            0
        } else {
            (self.full_last - self.full_first + 1).pow(2)
        }
    }

    /// Minimum occupancy over cells whose square lies inside `[0, L]²`.
    pub fn full_cell_min(&self) -> Option<u32> {
        self.full_min
    }

    pub fn full_cell_max(&self) -> Option<u32> {
        self.full_max
    }

    pub fn full_cell_mean(&self) -> Option<f64> {
        let count = self.full_cell_count();
        (count > 0).then(|| {
            let total: u64 = (self.full_first..=self.full_last)
                .flat_map(|j| (self.full_first..=self.full_last).map(move |i| (i, j)))
                .map(|(i, j)| self.occupancy(i, j) as u64)
                .sum();
            total as f64 / count as f64
        })
    }

    /// `R(r)`, present when the network's range satisfies `ρ > 2r`.
    pub fn mask(&self) -> Option<&LatticeMask> {
        self.mask.as_ref()
    }
}

/// Occupancy of the grid of step `r` over `[0, side]²`.
pub fn occupancy_of_points<I>(points: I, side: f64, r: f64, rho: Option<f64>) -> Result<EmbeddedLattice>
where
    I: IntoIterator<Item = Point>,
{
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("lattice scale must be positive, got {r}")));
    }
    let cells_per_axis = (side / r + 0.5).floor() as usize + 1;
    let mut occupancy = vec![0u32; cells_per_axis * cells_per_axis];
    let mut node_count = 0;
    for p in points {
        let (i, j) = cell_of(&p, r);
        if i < 0 || j < 0 || i as usize >= cells_per_axis || j as usize >= cells_per_axis {
            return Err(Error::invalid(format!(
                "point ({}, {}) lies outside [0, {side}]^2",
                p.x, p.y
            )));
        }
        occupancy[j as usize * cells_per_axis + i as usize] += 1;
        node_count += 1;
    }
    let m_min = occupancy.iter().copied().min().unwrap_or(0);
    let m_max = occupancy.iter().copied().max().unwrap_or(0);

    // full cells: r(i - 1/2) >= 0 and r(i + 1/2) <= side
    let full_first = 1;
    let full_last = (side / r - 0.5 + EDGE_SLACK).floor().max(0.0) as usize;
    let (mut full_min, mut full_max) = (None::<u32>, None::<u32>);
    if full_last >= full_first {
        for j in full_first..=full_last {
            for i in full_first..=full_last {
                let m = occupancy[j * cells_per_axis + i];
                full_min = Some(full_min.map_or(m, |x| x.min(m)));
                full_max = Some(full_max.map_or(m, |x| x.max(m)));
            }
        }
    }
    let mask = match rho {
        Some(rho) if rho > 2.0 * r => Some(embedded_mask(rho, r)?),
        _ => None,
    };
    Ok(EmbeddedLattice {
        scale: r,
        cells_per_axis,
        occupancy,
        node_count,
        m_min,
        m_max,
        full_first,
        full_last,
        full_min,
        full_max,
        mask,
    })
}

pub fn occupancy(net: &Network, r: f64) -> Result<EmbeddedLattice> {
    occupancy_of_points(net.nodes().iter().copied(), net.extent(), r, Some(net.rho()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBound {
    pub scale: f64,
    pub m_min: u32,
    /// `|R(r)|`, origin included.
    pub mask_size: usize,
    /// Greatest multiple of `r` strictly below `W`.
    pub lattice_border_width: f64,
    /// `m_min · (|R(r)| - 1)`.
    pub value: u64,
}

/// Certified lower bound on the broadcast min-cut of a disk network.
pub fn embedded_lattice_bound(net: &Network, r: f64) -> Result<LatticeBound> {
    let rho = net.rho();
    let w = net.border_width();
    let mask = embedded_mask(rho, r)?;
    if r >= w - rho {
        return Err(Error::invalid(format!(
            "embedded lattice needs r < W - rho (r = {r}, W = {w}, rho = {rho})"
        )));
    }
    let lattice = occupancy(net, r)?;
    let steps = (w / r).ceil() - 1.0;
    Ok(LatticeBound {
        scale: r,
        m_min: lattice.m_min(),
        mask_size: mask.len(),
        lattice_border_width: steps * r,
        value: lattice.m_min() as u64 * mask.neighbor_count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{disk_network_from_points, generate_lattice, generate_random_disk, SourcePlacement};

    #[test]
    fn lambda_examples() {
        assert_eq!(map_to_lattice(&Point::new(3.2, 5.9), 2.0), Point::new(4.0, 6.0));
        assert_eq!(map_to_lattice(&Point::new(0.0, 0.0), 0.7), Point::new(0.0, 0.0));
        assert_eq!(map_to_lattice(&Point::new(1.0, 1.0), 2.0), Point::new(2.0, 2.0));
        assert_eq!(map_to_lattice(&Point::new(0.99, 2.99), 2.0), Point::new(0.0, 2.0));
    }

    #[test]
    fn mask_size_for_disk_parameters() {
        assert_eq!(embedded_mask(2.0, 0.4).unwrap().len(), 29);
        assert!(embedded_mask(2.0, 1.0).is_err());
        assert!(embedded_mask(2.0, 0.0).is_err());
    }

    #[test]
    fn lattice_identity_occupancy() {
        let net = generate_lattice(7, 1.0, 1.5).unwrap();
        let lat = occupancy(&net, 1.0).unwrap();
        assert_eq!(lat.cell_count(), 49);
        assert!(lat.occupancies().iter().all(|&m| m == 1));
        assert_eq!((lat.m_min(), lat.m_max()), (1, 1));
    }

    #[test]
    fn occupancy_sums_to_n() {
        for seed in 0..5 {
            let net = generate_random_disk(1000, 10.0, 1.0, 2.0, seed, SourcePlacement::Center).unwrap();
            let lat = occupancy(&net, 1.0).unwrap();
            assert_eq!(lat.occupancies().iter().map(|&m| m as usize).sum::<usize>(), 1000);
            let mean = lat.mean_occupancy();
            assert!(lat.m_min() as f64 <= mean && mean <= lat.m_max() as f64);
            assert_eq!(lat.full_cell_count(), 81);
        }
    }

    #[test]
    fn full_cells_average_mu_r2() {
        let mut total = 0.0;
        let seeds = 20;
        for seed in 0..seeds {
            let net = generate_random_disk(1000, 10.0, 1.0, 2.0, seed, SourcePlacement::Center).unwrap();
            total += occupancy(&net, 1.0).unwrap().full_cell_mean().unwrap();
        }
        let mean = total / seeds as f64;
        assert!((mean - 10.0).abs() < 0.3, "full-cell mean {mean}");
    }

    #[test]
    fn empty_cell_gives_zero_bound() {
        let pts = vec![Point::new(1.0, 1.0), Point::new(1.5, 1.0), Point::new(9.0, 9.0)];
        let net = disk_network_from_points(pts, 10.0, 2.0, 4.5, 0).unwrap();
        let b = embedded_lattice_bound(&net, 0.4).unwrap();
        assert_eq!(b.m_min, 0);
        assert_eq!(b.value, 0);
        assert_eq!(b.mask_size, 29);
        assert!((b.lattice_border_width - 4.4).abs() < 1e-9);
    }

    #[test]
    fn bound_preconditions() {
        let net = generate_random_disk(50, 10.0, 2.0, 4.5, 1, SourcePlacement::Center).unwrap();
        assert!(embedded_lattice_bound(&net, 1.0).is_err());
        assert!(embedded_lattice_bound(&net, -0.1).is_err());
        let net = generate_random_disk(50, 10.0, 2.0, 2.2, 1, SourcePlacement::Center).unwrap();
        assert!(embedded_lattice_bound(&net, 0.4).is_err());
    }
}
