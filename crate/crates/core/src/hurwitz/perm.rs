//! Small permutations of {0..n} for n ≤ 8.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::symfun::{partitions_of, Partition};

pub const MAX_N: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Perm {
    pub n: u8,
    pub p: [u8; MAX_N],
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        let mut p = [0u8; MAX_N];
        for (i, x) in p.iter_mut().enumerate() {
            *x = i as u8;
        }
        Perm { n: n as u8, p }
    }

    /// (self ∘ o)(i) = self(o(i))
    #[inline]
    pub fn compose(&self, o: &Perm) -> Perm {
        let mut r = *self;
        for i in 0..self.n as usize {
            r.p[i] = self.p[o.p[i] as usize];
        }
        r
    }

    #[inline]
    pub fn inverse(&self) -> Perm {
        let mut r = *self;
        for i in 0..self.n as usize {
            r.p[self.p[i] as usize] = i as u8;
        }
        r
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n as usize).all(|i| self.p[i] as usize == i)
    }

    pub fn cycle_type(&self) -> Partition {
        let n = self.n as usize;
        let mut seen = [false; MAX_N];
        let mut parts = vec![];
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.p[j] as usize;
                len += 1;
            }
            parts.push(len);
        }
        Partition::new(parts)
    }

    /// Cycle type encoded as a sorted part array, cheaper than a Partition.
    #[inline]
    pub fn cycle_key(&self) -> [u8; MAX_N] {
        let n = self.n as usize;
        let mut seen = [false; MAX_N];
        let mut parts = [0u8; MAX_N];
        let mut k = 0;
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut len = 0u8;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.p[j] as usize;
                len += 1;
            }
            parts[k] = len;
            k += 1;
        }
        parts[..k].sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// A fixed representative of a cycle type: consecutive cycles.
    pub fn representative(mu: &Partition) -> Perm {
        let n = mu.weight() as usize;
        let mut r = Perm::identity(n);
        let mut start = 0;
        for &l in mu.parts() {
            let l = l as usize;
            for i in 0..l {
                r.p[start + i] = (start + (i + 1) % l) as u8;
            }
            start += l;
        }
        r
    }
}

pub fn key_of(mu: &Partition) -> [u8; MAX_N] {
    let mut k = [0u8; MAX_N];
    for (i, &p) in mu.parts().iter().enumerate() {
        k[i] = p as u8;
    }
    k
}

/// Union-find over n points.
#[derive(Clone, Copy)]
pub struct Components {
    parent: [u8; MAX_N],
    n: u8,
}

impl Components {
    pub fn new(n: usize) -> Self {
        let mut parent = [0u8; MAX_N];
        for (i, x) in parent.iter_mut().enumerate() {
            *x = i as u8;
        }
        Components { parent, n: n as u8 }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let g = self.parent[self.parent[i] as usize];
            self.parent[i] = g;
            i = g as usize;
        }
        i
    }

    pub fn join(&mut self, g: &Perm) {
        for i in 0..self.n as usize {
            let (a, b) = (self.find(i), self.find(g.p[i] as usize));
            if a != b {
                self.parent[a.max(b)] = a.min(b) as u8;
            }
        }
    }

    pub fn connected(&mut self) -> bool {
        (0..self.n as usize).all(|i| self.find(i) == 0)
    }
}

/// All permutations of n points, grouped by cycle type. Cached.
pub struct SymGroup {
    pub n: usize,
    pub all: Vec<Perm>,
    pub types: Vec<Partition>,
    pub type_index: HashMap<[u8; MAX_N], usize>,
    pub by_type: Vec<Vec<Perm>>,
}

impl SymGroup {
    pub fn get(n: usize) -> Arc<SymGroup> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SymGroup>>>> = OnceLock::new();
        let c = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(g) = c.lock().unwrap().get(&n) {
            return g.clone();
        }
        let g = Arc::new(SymGroup::build(n));
        c.lock().unwrap().insert(n, g.clone());
        g
    }

    fn build(n: usize) -> SymGroup {
        assert!(n <= MAX_N);
        let types = partitions_of(n as u32, None);
        let type_index: HashMap<[u8; MAX_N], usize> = types.iter().enumerate().map(|(i, t)| (key_of(t), i)).collect();
        let mut all = vec![];
        let mut cur: Vec<u8> = (0..n as u8).collect();
        heap_permutations(&mut cur, n, &mut |v| {
            let mut p = Perm::identity(n);
            p.p[..n].copy_from_slice(v);
            all.push(p);
        });
        all.sort_by(|a, b| a.p.cmp(&b.p));
        let mut by_type = vec![vec![]; types.len()];
        for p in &all {
            by_type[type_index[&p.cycle_key()]].push(*p);
        }
        SymGroup { n, all, types, type_index, by_type }
    }

    #[inline]
    pub fn type_of(&self, p: &Perm) -> usize {
        self.type_index[&p.cycle_key()]
    }

    pub fn index_of(&self, mu: &Partition) -> usize {
        self.type_index[&key_of(mu)]
    }
}

fn heap_permutations(v: &mut Vec<u8>, k: usize, f: &mut impl FnMut(&[u8])) {
    if k <= 1 {
        f(v);
        return;
    }
    for i in 0..k {
        heap_permutations(v, k - 1, f);
        if k % 2 == 0 {
            v.swap(i, k - 1);
        } else {
            v.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_sizes() {
        let g = SymGroup::get(4);
        assert_eq!(g.all.len(), 24);
        let sizes: Vec<usize> = g.by_type.iter().map(|v| v.len()).collect();
        // [1,1,1,1], [2,1,1], [2,2], [3,1], [4]
        assert_eq!(sizes, vec![1, 6, 3, 8, 6]);
        let r = Perm::representative(&Partition::new(vec![3, 1]));
        assert_eq!(r.cycle_type(), Partition::new(vec![3, 1]));
        assert!(r.compose(&r.inverse()).is_identity());
    }
}
