//! Transmission-cost metrics and the analytical bounds they are compared to.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rates::RateAssignment;
use crate::topology::Hypergraph;

/// Cost of broadcasting with a given rate assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CostReport {
    pub total_rate: u64,
    pub c_min: u64,
    /// Transmissions per broadcast packet: `totalRate / cMin`.
    pub e_cost: f64,
    /// Lower bound on transmissions per broadcast packet: `N / mMax`.
    pub e_bound: f64,
    pub e_rel_cost: f64,
    pub m_max: usize,
    pub n: usize,
}

pub fn cost_report(hg: &Hypergraph, ra: &RateAssignment, c_min: u64) -> Result<CostReport> {
    if c_min == 0 {
        return Err(Error::Disconnected(
            "broadcast min-cut is 0, so the cost is unbounded".into(),
        ));
    }
    if hg.len() != ra.len() {
        return Err(Error::invalid("rate assignment does not match the graph"));
    }
    let n = hg.len();
    let m_max = hg.max_degree();
    let total_rate = ra.total();
    let e_cost = total_rate as f64 / c_min as f64;
    let e_bound = n as f64 / m_max as f64;
    Ok(CostReport {
        total_rate,
        c_min,
        e_cost,
        e_bound,
        e_rel_cost: e_cost / e_bound,
        m_max,
        n,
    })
}

/// Area shared by the disks of two nodes at distance `ρ`: `(2π/3 - √3/2) ρ²`.
pub fn lens_overlap_area(rho: f64) -> f64 {
    (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0) * rho * rho
}

/// Lower bound on the relative cost of any broadcast without coding in a
/// dense unit-disk graph: `6π / (2π + 3√3)`.
pub fn noncoding_bound() -> f64 {
    6.0 * PI / (2.0 * PI + 3.0 * 3f64.sqrt())
}

/// `M = π ρ² μ`.
pub fn expected_neighbors(rho: f64, mu: f64) -> f64 {
    PI * rho * rho * mu
}

/// Relative cost of a lattice with fixed `M` and `W` to first order in `1/L`.
pub fn lattice_relcost_first_order(side: f64, border_width: f64, m: u64) -> f64 {
    1.0 + 4.0 * border_width * (m as f64 - 1.0) / side
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffBound {
    /// `log(L²/r²) (1 - μ r² δ² / (2 log(L²/r²)))`.
    pub exponent: f64,
    /// `exp(exponent)`, unclamped.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub probability: f64,
}

/// Union-bound estimate of `Pr[m_min ≤ (1 - δ) μ r²]` over the `L²/r²`
/// cells of the embedded lattice.
pub fn chernoff_mmin_bound(side: f64, r: f64, mu: f64, delta: f64) -> Result<ChernoffBound> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(r > 0.0 && r < side) {
        return Err(Error::invalid(format!("need 0 < r < L (r = {r}, L = {side})")));
    }
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("density must be positive, got {mu}")));
    }
    let log_cells = (side * side / (r * r)).ln();
    let exponent = log_cells * (1.0 - mu * r * r * delta * delta / (2.0 * log_cells));
    let raw = exponent.exp();
    Ok(ChernoffBound {
        exponent,
        raw,
        probability: raw.clamp(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::assign_rates;
    use crate::topology::generate_lattice;

    #[test]
    fn lattice_cost_report() {
        let net = generate_lattice(10, 1.0, 2.0).unwrap();
        let hg = net.hypergraph();
        let ra = assign_rates(&net).unwrap();
        let c = cost_report(&hg, &ra, 4).unwrap();
        assert_eq!(c.total_rate, 295);
        assert_eq!(c.m_max, 4);
        assert!((c.e_cost - 73.75).abs() < 1e-12);
        assert!((c.e_bound - 25.0).abs() < 1e-12);
        assert!((c.e_rel_cost - 2.95).abs() < 1e-12);
    }

    #[test]
    fn two_node_cost() {
        let hg = Hypergraph::from_adjacency(vec![vec![1], vec![0]]).unwrap();
        let ra = RateAssignment::from_rates(vec![1, 1], 1, 0).unwrap();
        let c = cost_report(&hg, &ra, 1).unwrap();
        assert_eq!((c.e_cost, c.e_bound, c.e_rel_cost), (2.0, 2.0, 1.0));
    }

    #[test]
    fn zero_cut_is_disconnected() {
        let hg = Hypergraph::from_adjacency(vec![vec![], vec![]]).unwrap();
        let ra = RateAssignment::from_rates(vec![1, 1], 1, 0).unwrap();
        assert!(matches!(cost_report(&hg, &ra, 0), Err(Error::Disconnected(_))));
    }

    #[test]
    fn analytical_constants() {
        assert!((noncoding_bound() - 1.6420).abs() < 1e-4);
        assert!(noncoding_bound() > 1.0);
        assert!((lens_overlap_area(1.0) - 1.2284).abs() < 1e-4);
        // equivalently the disk area over the disk area outside the lens
        let via_lens = PI / (PI - lens_overlap_area(1.0));
        assert!((via_lens - noncoding_bound()).abs() < 1e-12);
        assert!((expected_neighbors(1.0, 1.0) - PI).abs() < 1e-12);
        assert!((expected_neighbors(2.0, 1.0) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn chernoff_reference_value() {
        let b = chernoff_mmin_bound(100.0, 1.0, 200.0, 0.5).unwrap();
        // log(10^4) - 200 * 0.25 / 2
        let expected = 4.0 * 10f64.ln() - 25.0;
        assert!((b.exponent - expected).abs() < 1e-12);
        assert!((b.exponent + 15.79).abs() < 0.01);
        assert!((b.raw - 1.39e-7).abs() < 0.01e-7);
        assert_eq!(b.raw, b.probability);
    }

    #[test]
    fn chernoff_clamps_and_validates() {
        let b = chernoff_mmin_bound(100.0, 1.0, 1.0, 0.1).unwrap();
        assert!(b.raw > 1.0);
        assert_eq!(b.probability, 1.0);
        assert!(chernoff_mmin_bound(100.0, 1.0, 1.0, 0.0).is_err());
        assert!(chernoff_mmin_bound(100.0, 1.0, 1.0, 1.0).is_err());
        assert!(chernoff_mmin_bound(100.0, 200.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn chernoff_monotone() {
        let mut last = f64::INFINITY;
        for mu in [1.0, 10.0, 100.0, 1000.0, 1e4] {
            let b = chernoff_mmin_bound(50.0, 0.5, mu, 0.3).unwrap().raw;
            assert!(b < last);
            last = b;
        }
        let mut last = f64::INFINITY;
        for delta in [0.05, 0.2, 0.5, 0.8, 0.95] {
            let b = chernoff_mmin_bound(50.0, 0.5, 30.0, delta).unwrap().raw;
            assert!(b < last);
            last = b;
        }
    }
}
