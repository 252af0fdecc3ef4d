//! Per-node transmission rates: the source and every border node transmit at
//! the increased rate `M`, every other node at rate 1.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::topology::{LatticeMask, Network, NetworkKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateAssignment {
    rates: Vec<u64>,
    increased: u64,
    source: usize,
}

impl RateAssignment {
    /// Arbitrary positive integer rates, e.g. for cross-checking cut solvers.
    pub fn from_rates(rates: Vec<u64>, increased: u64, source: usize) -> Result<Self> {
        if rates.contains(&0) {
            return Err(Error::invalid("every rate must be at least 1"));
        }
        if source >= rates.len() {
            return Err(Error::invalid(format!("source id {source} out of range")));
        }
        Ok(RateAssignment {
            rates,
            increased,
            source,
        })
    }

    pub fn rate(&self, v: usize) -> u64 {
        self.rates[v]
    }

    pub fn rates(&self) -> &[u64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// The rate `M` given to exceptional nodes.
    pub fn increased_rate(&self) -> u64 {
        self.increased
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn total(&self) -> u64 {
        self.rates.iter().sum()
    }

    /// Number of nodes transmitting at the increased rate.
    pub fn increased_count(&self) -> usize {
        self.rates.iter().filter(|&&r| r == self.increased).count()
    }
}

/// `M` for a network: `|R| - 1` on a lattice, `round(π ρ² N / L²)` on a
/// disk network.
pub fn increased_rate(net: &Network) -> Result<u64> {
    let m = match net.kind() {
        NetworkKind::Lattice => LatticeMask::new(net.rho())?.neighbor_count() as u64,
        NetworkKind::Disk => {
            let expected = PI * net.rho() * net.rho() * net.density();
            expected.round() as u64
        }
    };
    if m < 1 {
        return Err(Error::invalid(format!(
            "increased rate M rounds to {m}; the network is too sparse"
        )));
    }
    Ok(m)
}

pub fn assign_rates(net: &Network) -> Result<RateAssignment> {
    let m = increased_rate(net)?;
    let rates = (0..net.len())
        .map(|v| {
            if v == net.source() || net.is_border(v) {
                m
            } else {
                1
            }
        })
        .collect();
    Ok(RateAssignment {
        rates,
        increased: m,
        source: net.source(),
    })
}

pub fn total_rate(ra: &RateAssignment) -> u64 {
    ra.total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{generate_lattice, generate_random_disk, SourcePlacement};

    fn lattice_with_source(l: usize, rho: f64, w: f64, x: usize, y: usize) -> Network {
        let net = generate_lattice(l, rho, w).unwrap();
        let id = net.lattice_id(x, y).unwrap();
        net.with_source(id).unwrap()
    }

    #[test]
    fn lattice_rates_follow_rule() {
        let net = lattice_with_source(10, 1.0, 2.0, 5, 5);
        let ra = assign_rates(&net).unwrap();
        assert_eq!(ra.increased_rate(), 4);
        assert_eq!(ra.rate(net.lattice_id(5, 5).unwrap()), 4);
        assert_eq!(ra.rate(net.lattice_id(0, 0).unwrap()), 4);
        assert_eq!(ra.rate(net.lattice_id(5, 4).unwrap()), 1);
        for v in 0..net.len() {
            let expected = if v == net.source() || net.is_border(v) { 4 } else { 1 };
            assert_eq!(ra.rate(v), expected);
        }
        assert_eq!(ra.increased_count(), 65);
    }

    #[test]
    fn border_source_is_not_stacked() {
        let net = lattice_with_source(10, 1.0, 2.0, 0, 3);
        let ra = assign_rates(&net).unwrap();
        assert_eq!(ra.rate(net.source()), 4);
        assert_eq!(ra.increased_count(), net.border_count());
        assert_eq!(total_rate(&ra), 100 + 3 * 64);
    }

    #[test]
    fn disk_rate_is_rounded_density() {
        let net = generate_random_disk(100, 10.0, 1.0, 2.0, 1, SourcePlacement::Center).unwrap();
        assert_eq!(increased_rate(&net).unwrap(), 3);
        let sparse = generate_random_disk(10, 10.0, 1.0, 2.0, 1, SourcePlacement::Center).unwrap();
        assert!(increased_rate(&sparse).is_err());
    }

    #[test]
    fn total_rate_examples() {
        let ra = assign_rates(&lattice_with_source(10, 1.0, 2.0, 5, 5)).unwrap();
        assert_eq!(total_rate(&ra), 295);
        let ra = assign_rates(&lattice_with_source(20, 1.0, 2.0, 10, 10)).unwrap();
        assert_eq!(total_rate(&ra), 835);
        let ones = RateAssignment::from_rates(vec![1; 17], 1, 0).unwrap();
        assert_eq!(total_rate(&ones), 17);
    }

    #[test]
    fn total_rate_identity() {
        for (l, rho, w) in [(10usize, 1.0, 2.0), (12, 2.0, 3.0), (15, 1.5, 2.0)] {
            let net = generate_lattice(l, rho, w).unwrap();
            let ra = assign_rates(&net).unwrap();
            let m = ra.increased_rate();
            let boosted = (0..net.len()).filter(|&v| ra.rate(v) == m).count() as u64;
            assert_eq!(ra.total(), net.len() as u64 + (m - 1) * boosted);
        }
    }

    #[test]
    fn custom_rates_validated() {
        assert!(RateAssignment::from_rates(vec![1, 0, 2], 2, 0).is_err());
        assert!(RateAssignment::from_rates(vec![1, 2], 2, 2).is_err());
    }
}
