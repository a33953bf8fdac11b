//! Fenwick tree over `f64` for prefix sums with point updates.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    pub fn new(len: usize) -> Self {
        Fenwick { tree: vec![0.0; len + 1] }
    }

    pub fn add(&mut self, pos: usize, delta: f64) {
        let mut k = pos + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    /// Sum over positions `0..end`.
    pub fn prefix(&self, end: usize) -> f64 {
        let mut k = end;
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    pub fn total(&self) -> f64 {
        self.prefix(self.tree.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums() {
        let mut f = Fenwick::new(5);
        for (k, v) in [1.0, 2.0, 3.0, 4.0, 5.0].iter().enumerate() {
            f.add(k, *v);
        }
        assert_eq!(f.prefix(0), 0.0);
        assert_eq!(f.prefix(3), 6.0);
        assert_eq!(f.total(), 15.0);
        f.add(2, -3.0);
        assert_eq!(f.prefix(5), 12.0);
    }
}
