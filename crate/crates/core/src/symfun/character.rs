//! Irreducible characters of S_N by Murnaghan–Nakayama.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use super::partition::Partition;
use crate::algebra::rational::{q, Q};
use crate::error::{Error, Result};

type Memo = RwLock<HashMap<(Partition, Partition), i64>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(|| RwLock::new(HashMap::new()))
}

fn beta_set(l: &Partition) -> Vec<i64> {
    let n = l.len() as i64;
    l.parts().iter().enumerate().map(|(i, &p)| p as i64 + n - 1 - i as i64).collect()
}

fn from_beta(mut b: Vec<i64>) -> Partition {
    b.sort_unstable_by(|x, y| y.cmp(x));
    let n = b.len() as i64;
    Partition::new(b.iter().enumerate().map(|(i, &x)| (x - (n - 1 - i as i64)) as u32).collect())
}

fn mn(l: &Partition, mu: &[u32]) -> i64 {
    if mu.is_empty() {
        return if l.is_empty() { 1 } else { 0 };
    }
    let key = (l.clone(), Partition(mu.to_vec()));
    if let Some(v) = memo().read().unwrap().get(&key) {
        return *v;
    }
    let r = mu[0] as i64;
    let beads = beta_set(l);
    let mut total = 0;
    for (i, &b) in beads.iter().enumerate() {
        let nb = b - r;
        if nb < 0 || beads.contains(&nb) {
            continue;
        }
        let between = beads.iter().filter(|&&x| x > nb && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut next = beads.clone();
        next[i] = nb;
        total += sign * mn(&from_beta(next), &mu[1..]);
    }
    memo().write().unwrap().insert(key, total);
    total
}

/// χ_λ(μ).
pub fn character(l: &Partition, mu: &Partition) -> Result<Q> {
    if l.weight() != mu.weight() {
        return Err(Error::SizeMismatch(l.weight(), mu.weight()));
    }
    Ok(q(mn(l, mu.parts())))
}

pub fn character_int(l: &Partition, mu: &Partition) -> i64 {
    assert_eq!(l.weight(), mu.weight());
    mn(l, mu.parts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::partition::partitions_of;

    #[test]
    fn small_values() {
        let p = |v: Vec<u32>| Partition::new(v);
        assert_eq!(character(&p(vec![2, 1]), &p(vec![1, 1, 1])).unwrap(), q(2));
        assert_eq!(character(&p(vec![2, 1]), &p(vec![3])).unwrap(), q(-1));
        assert_eq!(character(&p(vec![2, 1]), &p(vec![2, 1])).unwrap(), q(0));
        assert!(matches!(character(&p(vec![2]), &p(vec![1])), Err(Error::SizeMismatch(2, 1))));
        for n in 1..=6 {
            for mu in partitions_of(n, None) {
                assert_eq!(character_int(&p(vec![n]), &mu), 1);
                assert_eq!(character_int(&Partition::ones(n), &mu), mu.sign());
            }
        }
    }
}
