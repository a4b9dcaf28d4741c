use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Geometric acceptance threshold `t <- 1 - alpha (1 - t)` starting at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceThreshold {
    alpha: f64,
    value: f64,
}

impl AcceptanceThreshold {
    pub fn new(alpha: f64) -> Self {
        AcceptanceThreshold { alpha, value: 0.0 }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn advance(&mut self) -> f64 {
        self.value = 1.0 - self.alpha * (1.0 - self.value);
        self.value
    }
}

/// Entry of the candidate min-queue; ties go to the earlier candidate.
#[derive(Debug, Clone, Copy)]
struct Entry {
    estimate: f64,
    seq: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so that `BinaryHeap` pops the smallest estimate.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .estimate
            .total_cmp(&self.estimate)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Min-priority queue of candidates keyed by estimated robustness.
#[derive(Debug, Clone)]
pub struct CandidateQueue<C> {
    heap: BinaryHeap<Entry>,
    items: Vec<C>,
}

impl<C> Default for CandidateQueue<C> {
    fn default() -> Self {
        CandidateQueue {
            heap: BinaryHeap::new(),
            items: Vec::new(),
        }
    }
}

impl<C> CandidateQueue<C> {
    pub fn push(&mut self, estimate: f64, candidate: C) {
        self.heap.push(Entry {
            estimate,
            seq: self.items.len(),
        });
        self.items.push(candidate);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn min_estimate(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.estimate)
    }

    /// Removes and returns the minimum-estimate candidate.
    pub fn pop_min(mut self) -> Option<(f64, C)> {
        let e = self.heap.pop()?;
        Some((e.estimate, self.items.swap_remove(e.seq)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_sequence() {
        let mut t = AcceptanceThreshold::new(0.95);
        assert_eq!(t.value(), 0.0);
        let expected = [0.05, 0.0975, 0.142625];
        for e in expected {
            assert!((t.advance() - e).abs() < 1e-15);
        }
    }

    #[test]
    fn queue_pops_minimum_with_stable_ties() {
        let mut q = CandidateQueue::default();
        q.push(0.4, "a");
        q.push(0.1, "b");
        q.push(0.1, "c");
        q.push(0.7, "d");
        assert_eq!(q.min_estimate(), Some(0.1));
        assert_eq!(q.pop_min(), Some((0.1, "b")));
    }
}
