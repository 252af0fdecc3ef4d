use rand::Rng;

use super::gf256::{add_scaled, Gf256};

/// Coefficient vectors a node has received, kept in echelon form: each
/// stored row has a leading 1 at its pivot column and zeros before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeBuffer {
    generation: usize,
    rows: Vec<Vec<Gf256>>,
    pivot_row: Vec<Option<usize>>,
}

impl NodeBuffer {
    pub fn new(generation: usize) -> Self {
        NodeBuffer {
            generation,
            rows: Vec::new(),
            pivot_row: vec![None; generation],
        }
    }

    /// A buffer holding the `generation` original packets.
    pub fn full(generation: usize) -> Self {
        let mut b = Self::new(generation);
        for i in 0..generation {
            let mut row = vec![Gf256::ZERO; generation];
            row[i] = Gf256::ONE;
            b.pivot_row[i] = Some(b.rows.len());
            b.rows.push(row);
        }
        b
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.generation
    }

    pub fn rows(&self) -> &[Vec<Gf256>] {
        &self.rows
    }

    /// Reduces `coeffs` against the stored rows and keeps the remainder if it
    /// is nonzero. Returns whether the rank grew.
    pub fn insert(&mut self, coeffs: &[Gf256]) -> bool {
        assert_eq!(coeffs.len(), self.generation, "coefficient vector length");
        if self.is_full() {
            return false;
        }
        let mut v = coeffs.to_vec();
        let mut lead = None;
        for col in 0..self.generation {
            let c = v[col];
            if c.is_zero() {
                continue;
            }
            match self.pivot_row[col] {
                Some(r) => add_scaled(&mut v, &self.rows[r], c),
                None => {
                    lead = Some(col);
                    break;
                }
            }
        }
        let Some(col) = lead else {
            return false;
        };
        let inv = v[col].inverse().expect("leading coefficient is nonzero");
        for x in v.iter_mut() {
            *x *= inv;
        }
        self.pivot_row[col] = Some(self.rows.len());
        self.rows.push(v);
        true
    }

    /// A uniformly random combination of the stored rows, redrawn until it
    /// is nonzero. `None` while the buffer is empty.
    pub fn random_combination<R: Rng>(&self, rng: &mut R) -> Option<Vec<Gf256>> {
        if self.rows.is_empty() {
            return None;
        }
        loop {
            let mut out = vec![Gf256::ZERO; self.generation];
            for row in &self.rows {
                add_scaled(&mut out, row, Gf256(rng.gen()));
            }
            if out.iter().any(|c| !c.is_zero()) {
                return Some(out);
            }
        }
    }
}

/// Inserts `coeffs` into a copy of `buffer`.
pub fn rank_update(buffer: &NodeBuffer, coeffs: &[Gf256]) -> (NodeBuffer, bool) {
    let mut next = buffer.clone();
    let innovative = next.insert(coeffs);
    (next, innovative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::seeded_rng;

    fn unit(g: usize, i: usize) -> Vec<Gf256> {
        let mut v = vec![Gf256::ZERO; g];
        v[i] = Gf256::ONE;
        v
    }

    #[test]
    fn first_nonzero_vector_is_innovative() {
        let (b, innovative) = rank_update(&NodeBuffer::new(4), &[Gf256(0), Gf256(9), Gf256(3), Gf256(0)]);
        assert!(innovative);
        assert_eq!(b.rank(), 1);
        let (b, innovative) = rank_update(&NodeBuffer::new(4), &[Gf256::ZERO; 4]);
        assert!(!innovative);
        assert_eq!(b.rank(), 0);
    }

    #[test]
    fn full_buffer_rejects_everything() {
        let mut b = NodeBuffer::full(5);
        assert_eq!(b.rank(), 5);
        assert!(!b.insert(&[Gf256(1), Gf256(2), Gf256(3), Gf256(4), Gf256(5)]));
        assert_eq!(b.rank(), 5);
    }

    #[test]
    fn e1_e2_and_their_sum() {
        let mut b = NodeBuffer::new(3);
        let e1 = unit(3, 0);
        let e2 = unit(3, 1);
        let sum: Vec<Gf256> = e1.iter().zip(&e2).map(|(&a, &b)| a + b).collect();
        assert!(b.insert(&e1));
        assert_eq!(b.rank(), 1);
        assert!(b.insert(&e2));
        assert_eq!(b.rank(), 2);
        assert!(!b.insert(&sum));
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn dependent_vectors_are_idempotent() {
        let mut b = NodeBuffer::new(4);
        let v = vec![Gf256(7), Gf256(1), Gf256(0), Gf256(200)];
        assert!(b.insert(&v));
        let before = b.clone();
        let scaled: Vec<Gf256> = v.iter().map(|&x| x * Gf256(0x35)).collect();
        assert!(!b.insert(&scaled));
        assert_eq!(b, before);
    }

    #[test]
    fn random_combinations_stay_in_span() {
        let mut rng = seeded_rng(11);
        let mut b = NodeBuffer::new(6);
        b.insert(&unit(6, 0));
        b.insert(&[Gf256(0), Gf256(3), Gf256(0), Gf256(5), Gf256(0), Gf256(0)]);
        for _ in 0..50 {
            let c = b.random_combination(&mut rng).unwrap();
            assert!(c.iter().any(|x| !x.is_zero()));
            let mut probe = b.clone();
            assert!(!probe.insert(&c));
        }
        assert!(NodeBuffer::new(3).random_combination(&mut rng).is_none());
    }

    #[test]
    fn random_vectors_reach_full_rank() {
        let mut rng = seeded_rng(3);
        let source = NodeBuffer::full(16);
        let mut sink = NodeBuffer::new(16);
        let mut sent = 0;
        while !sink.is_full() {
            let c = source.random_combination(&mut rng).unwrap();
            sink.insert(&c);
            sent += 1;
        }
        assert!(sent <= 18, "needed {sent} packets");
    }
}
