use crate::precode::{ActiveMask, BeamAssignment};

/// Per-user sets of beams still available under beam conflict control.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodebookLog {
    codebook_size: usize,
    remaining: Vec<Vec<bool>>,
    counts: Vec<usize>,
}

impl CodebookLog {
    pub fn new(users: usize, codebook_size: usize) -> Self {
        Self {
            codebook_size,
            remaining: vec![vec![true; codebook_size]; users],
            counts: vec![codebook_size; users],
        }
    }

    /// Log with every active entry of `init` already recorded.
    pub fn with_init(codebook_size: usize, init: &BeamAssignment, mask: Option<&ActiveMask>) -> Self {
        let mut log = Self::new(init.users(), codebook_size);
        for l in 0..init.aps() {
            for k in 0..init.users() {
                if mask.is_none_or(|m| m.is_active(l, k)) {
                    log.assign(k, init.get(l, k));
                }
            }
        }
        log
    }

    pub fn users(&self) -> usize {
        self.counts.len()
    }

    pub fn codebook_size(&self) -> usize {
        self.codebook_size
    }

    /// Records that `user` took `beam`: no other user may use it afterwards.
    pub fn assign(&mut self, user: usize, beam: usize) {
        for (k, (row, count)) in self.remaining.iter_mut().zip(&mut self.counts).enumerate() {
            if k != user && row[beam] {
                row[beam] = false;
                *count -= 1;
            }
        }
    }

    pub fn contains(&self, user: usize, beam: usize) -> bool {
        self.remaining[user][beam]
    }

    /// `B_k`.
    pub fn count(&self, user: usize) -> usize {
        self.counts[user]
    }

    /// Remaining beams of `user` in increasing order.
    pub fn candidates(&self, user: usize) -> Vec<usize> {
        (0..self.codebook_size).filter(|&b| self.remaining[user][b]).collect()
    }
}

/// Ordered candidate beam tuples for one AP; tuple entry `k` is user `k`'s
/// beam.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationSet {
    users: usize,
    tuples: Vec<Vec<usize>>,
}

impl CombinationSet {
    /// All `B!/(B-K)!` tuples of distinct beams, lexicographic.
    pub fn distinct(codebook_size: usize, users: usize) -> Self {
        fn rec(b: usize, k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for x in 0..b {
                if !used[x] {
                    used[x] = true;
                    cur.push(x);
                    rec(b, k, cur, used, out);
                    cur.pop();
                    used[x] = false;
                }
            }
        }
        let mut tuples = Vec::new();
        if users <= codebook_size {
            rec(codebook_size, users, &mut Vec::with_capacity(users), &mut vec![false; codebook_size], &mut tuples);
        }
        Self { users, tuples }
    }

    /// All `B^K` tuples, lexicographic.
    pub fn all(codebook_size: usize, users: usize) -> Self {
        let mut tuples = Vec::new();
        if codebook_size > 0 {
            let mut cur = vec![0; users];
            loop {
                tuples.push(cur.clone());
                if !odometer(&mut cur, codebook_size) {
                    break;
                }
            }
        }
        Self { users, tuples }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// `C`.
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn get(&self, c: usize) -> &[usize] {
        &self.tuples[c]
    }

    /// Drops every tuple that hands one of `committed`'s beams to a different
    /// user than `committed` does.
    pub fn prune(&mut self, committed: &[usize]) {
        self.tuples.retain(|t| {
            t.iter()
                .enumerate()
                .all(|(k2, &b)| committed.iter().enumerate().all(|(k, &c)| k == k2 || c != b))
        });
    }
}

/// Advances `digits` to the next base-`base` number, most significant first.
/// Returns false after wrapping past the last value.
pub(crate) fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_removes_beam_from_other_users() {
        let mut log = CodebookLog::new(3, 4);
        log.assign(0, 2);
        assert!(log.contains(0, 2));
        assert!(!log.contains(1, 2) && !log.contains(2, 2));
        assert_eq!(log.count(1), 3);
        log.assign(0, 2);
        assert_eq!(log.count(1), 3);
        assert_eq!(log.candidates(2), vec![0, 1, 3]);
    }

    #[test]
    fn log_from_init() {
        let init = BeamAssignment::repeated(2, &[1, 3]);
        let log = CodebookLog::with_init(4, &init, None);
        assert_eq!(log.candidates(0), vec![0, 1, 2]);
        assert_eq!(log.candidates(1), vec![0, 2, 3]);
    }

    #[test]
    fn set_sizes() {
        assert_eq!(CombinationSet::distinct(3, 2).len(), 6);
        assert_eq!(CombinationSet::distinct(8, 4).len(), 8 * 7 * 6 * 5);
        assert_eq!(CombinationSet::all(3, 2).len(), 9);
        assert!(CombinationSet::distinct(2, 3).is_empty());
        assert_eq!(CombinationSet::all(2, 2).tuples(), &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn pruning_against_brute_force() {
        for b in 1..=5 {
            for k in 1..=b.min(3) {
                let full = CombinationSet::distinct(b, k);
                for c in full.tuples() {
                    let mut s = full.clone();
                    s.prune(c);
                    let expect: Vec<Vec<usize>> = full
                        .tuples()
                        .iter()
                        .filter(|t| (0..k).all(|i| (0..k).all(|j| i == j || c[i] != t[j])))
                        .cloned()
                        .collect();
                    assert_eq!(s.tuples(), expect.as_slice());
                    assert!(s.tuples().contains(c));
                }
            }
        }
    }
}
