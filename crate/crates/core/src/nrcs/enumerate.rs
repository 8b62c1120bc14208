//! Exhaustive enumeration of canonical configurations.

use std::collections::HashMap;

use super::{Config, Label};

/// All canonical trees over `labels` with at most `max_size` nodes and
/// height at most `max_height`, smallest first.
pub fn enumerate_configs(labels: &[Label], max_size: usize, max_height: usize) -> Vec<Config> {
    let mut labels = labels.to_vec();
    labels.sort();
    labels.dedup();
    let mut out = trees_upto(&labels, max_size, max_height);
    out.sort_by(|a, b| (a.size(), a).cmp(&(b.size(), b)));
    out
}

fn trees_upto(labels: &[Label], max_size: usize, h: usize) -> Vec<Config> {
    if max_size == 0 {
        return Vec::new();
    }
    let below = if h == 0 {
        Vec::new()
    } else {
        trees_upto(labels, max_size - 1, h - 1)
    };
    let mut forests = Vec::new();
    forest(&below, max_size - 1, 0, &mut Vec::new(), &mut forests);
    let mut out = Vec::new();
    for l in labels {
        for f in &forests {
            out.push(Config::new(l.clone(), f.clone()));
        }
    }
    out
}

// Multisets drawn from `pool[from..]` with total size ≤ budget, listed in
// non-decreasing index order so each multiset appears once.
fn forest(
    pool: &[Config],
    budget: usize,
    from: usize,
    cur: &mut Vec<Config>,
    out: &mut Vec<Vec<Config>>,
) {
    out.push(cur.clone());
    for i in from..pool.len() {
        let s = pool[i].size();
        if s <= budget {
            cur.push(pool[i].clone());
            forest(pool, budget - s, i, cur, out);
            cur.pop();
        }
    }
}

/// Number of trees [`enumerate_configs`] would return, saturating.
pub fn count_configs(num_labels: usize, max_size: usize, max_height: usize) -> u128 {
    let mut memo = HashMap::new();
    (1..=max_size)
        .map(|s| count_exact(num_labels, s, max_height, &mut memo))
        .fold(0u128, u128::saturating_add)
}

// Trees of exactly `s` nodes and height ≤ h.
fn count_exact(q: usize, s: usize, h: usize, memo: &mut HashMap<(usize, usize), u128>) -> u128 {
    if s == 0 {
        return 0;
    }
    if let Some(v) = memo.get(&(s, h)) {
        return *v;
    }
    let v = if h == 0 {
        if s == 1 {
            q as u128
        } else {
            0
        }
    } else {
        // Forests of total size s−1 over trees of height ≤ h−1: the Euler
        // transform of the per-size tree counts.
        let n = s - 1;
        let a: Vec<u128> = (0..=n).map(|i| count_exact(q, i, h - 1, memo)).collect();
        let mut f = vec![0u128; n + 1];
        f[0] = 1;
        for (size, &cnt) in a.iter().enumerate().skip(1) {
            // Choosing m trees with repetition from `cnt` kinds: C(cnt+m−1, m) ways.
            let mut g = vec![0u128; n + 1];
            for (t, slot) in g.iter_mut().enumerate() {
                let mut ways = 1u128;
                let mut m = 0u128;
                let mut acc = 0u128;
                while (m as usize) * size <= t {
                    acc = acc.saturating_add(f[t - (m as usize) * size].saturating_mul(ways));
                    ways = ways.saturating_mul(cnt + m) / (m + 1);
                    m += 1;
                }
                *slot = acc;
            }
            f = g;
        }
        (q as u128).saturating_mul(f[n])
    };
    memo.insert((s, h), v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn counts_match_enumeration() {
        let labels = [Label::new("a"), Label::new("b")];
        for size in 1..=5 {
            for h in 0..=3 {
                let v = enumerate_configs(&labels, size, h);
                let set: BTreeSet<_> = v.iter().cloned().collect();
                assert_eq!(set.len(), v.len(), "duplicates at size {size} h {h}");
                assert_eq!(
                    v.len() as u128,
                    count_configs(2, size, h),
                    "size {size} h {h}"
                );
                assert!(v.iter().all(|c| c.size() <= size && c.height() <= h));
            }
        }
        // Unlabelled rooted trees with 1..=5 nodes: 1, 1, 2, 4, 9.
        assert_eq!(count_configs(1, 5, 4), 17);
    }
}
