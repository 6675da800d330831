use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{factorial, Q};

/// Weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Partition(pub Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(vec![])
    }

    /// (1^n)
    pub fn ones(n: u32) -> Self {
        Partition(vec![1; n as usize])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colength(&self) -> u32 {
        self.weight() - self.len() as u32
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&p| p == 1)
    }

    /// Multiplicities m_i for i = 1..=max part.
    pub fn multiplicities(&self) -> Vec<u32> {
        let top = self.0.first().cloned().unwrap_or(0) as usize;
        let mut m = vec![0u32; top + 1];
        for &p in &self.0 {
            m[p as usize] += 1;
        }
        m
    }

    /// |aut(λ)| = Π m_i!
    pub fn aut(&self) -> BigInt {
        self.multiplicities().iter().fold(BigInt::one(), |a, &m| a * factorial(m))
    }

    /// z_λ = Π i^{m_i} m_i!
    pub fn z(&self) -> BigInt {
        let mut r = BigInt::one();
        for (i, &m) in self.multiplicities().iter().enumerate().skip(1) {
            r *= BigInt::from(i).pow(m) * factorial(m);
        }
        r
    }

    pub fn z_q(&self) -> Q {
        Q::from_integer(self.z())
    }

    /// Sign of a permutation with this cycle type.
    pub fn sign(&self) -> i64 {
        if self.colength() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn conjugate(&self) -> Partition {
        let top = self.0.first().cloned().unwrap_or(0);
        Partition((1..=top).map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32).collect())
    }

    /// Cells (row i, column j), zero-based.
    pub fn cells(&self) -> Vec<(i64, i64)> {
        let mut v = vec![];
        for (i, &p) in self.0.iter().enumerate() {
            for j in 0..p {
                v.push((i as i64, j as i64));
            }
        }
        v
    }

    /// Frobenius hook (a|b) if λ is a hook.
    pub fn as_hook(&self) -> Option<(u32, u32)> {
        if self.is_empty() || self.0.iter().skip(1).any(|&p| p > 1) {
            None
        } else {
            Some((self.0[0] - 1, self.len() as u32 - 1))
        }
    }

    pub fn from_hook(a: u32, b: u32) -> Partition {
        let mut v = vec![a + 1];
        v.extend(std::iter::repeat(1).take(b as usize));
        Partition(v)
    }

    pub fn size_of_class(&self) -> BigInt {
        factorial(self.weight()) / self.z()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All partitions of n, optionally with at most `max_len` parts, in
/// ascending lexicographic order of their part sequences.
pub fn partitions_of(n: u32, max_len: Option<usize>) -> Vec<Partition> {
    fn rec(n: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>, max_len: usize) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if cur.len() >= max_len {
            return;
        }
        for p in 1..=max_part.min(n) {
            cur.push(p);
            rec(n - p, p, cur, out, max_len);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(n, n, &mut vec![], &mut out, max_len.unwrap_or(usize::MAX));
    out.sort();
    out
}

/// Partitions of every weight in `0..=n`.
pub fn partitions_up_to(n: u32) -> Vec<Partition> {
    (0..=n).flat_map(|k| partitions_of(k, None)).collect()
}
