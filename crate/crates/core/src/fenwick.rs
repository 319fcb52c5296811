//! Binary indexed tree over nonnegative weights, with prefix-sum search for
//! weighted sampling.

use std::ops::{AddAssign, Sub, SubAssign};

#[derive(Debug, Clone)]
pub struct Fenwick<T> {
    // 1-based; tree[0] unused
    tree: Vec<T>,
}

impl<T> Fenwick<T>
where
    T: Copy + Default + PartialOrd + AddAssign + SubAssign + Sub<Output = T>,
{
    pub fn from_weights(weights: &[T]) -> Self {
        let mut tree = Vec::with_capacity(weights.len() + 1);
        tree.push(T::default());
        tree.extend_from_slice(weights);
        for i in 1..tree.len() {
            let parent = i + lowbit(i);
            if parent < tree.len() {
                let v = tree[i];
                tree[parent] += v;
            }
        }
        Fenwick { tree }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn add(&mut self, index: usize, delta: T) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += lowbit(i);
        }
    }

    /// Sum of weights `0..=index`.
    pub fn prefix(&self, index: usize) -> T {
        let mut sum = T::default();
        let mut i = (index + 1).min(self.len());
        while i > 0 {
            sum += self.tree[i];
            i -= lowbit(i);
        }
        sum
    }

    pub fn total(&self) -> T {
        if self.is_empty() {
            T::default()
        } else {
            self.prefix(self.len() - 1)
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`. Targets at or
    /// beyond the total (possible through floating-point drift) map to the
    /// last index.
    pub fn find(&self, target: T) -> usize {
        let n = self.len();
        let mut pos = 0;
        let mut rem = target;
        let mut step = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n.saturating_sub(1))
    }
}

fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}
