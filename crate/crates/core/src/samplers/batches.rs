//! Epoch-based minibatch schedule: indices are drawn without replacement and
//! the order is reshuffled at every epoch boundary.

use rand::seq::SliceRandom;
use rand::Rng;

pub(crate) struct EpochBatcher {
    n: usize,
    batch: usize,
    order: Vec<usize>,
    pos: usize,
}

impl EpochBatcher {
    pub fn new(n: usize, batch: usize) -> Self {
        Self {
            n,
            batch,
            order: (0..n).collect(),
            pos: n, // force a shuffle before the first batch
        }
    }

    /// Next index batch, or `None` when there is no data at all.
    ///
    /// When the batch size covers the whole dataset the natural order is
    /// returned so the stochastic gradient equals the full-batch gradient
    /// bit for bit.
    pub fn next<R: Rng>(&mut self, rng: &mut R) -> Option<&[usize]> {
        if self.n == 0 {
            return None;
        }
        if self.batch >= self.n {
            return Some(&self.order);
        }
        if self.pos >= self.n {
            self.order.shuffle(rng);
            self.pos = 0;
        }
        let end = (self.pos + self.batch).min(self.n);
        let slice = &self.order[self.pos..end];
        self.pos = end;
        Some(slice)
    }
}
