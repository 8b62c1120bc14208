//! Exhaustive search for the longest `(g, n)`-controlled bad sequence.

use std::collections::HashMap;

use serde::Serialize;

use super::{NmElem, NmExpr};
use crate::ordinal::ControlFunction;

#[derive(Debug, Clone)]
pub struct BadSequenceQuery {
    pub expr: NmExpr,
    pub control: ControlFunction,
    pub n: u64,
    /// Length at which the search stops and reports a lower bound.
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BadSequenceResult {
    pub length: usize,
    pub witness: Vec<NmElem>,
    /// The cap was reached, so `length` is only a lower bound.
    pub cap_hit: bool,
}

/// Every element of `expr` with norm at most `bound`, smallest norm first.
pub fn slice(expr: &NmExpr, bound: u64) -> Vec<NmElem> {
    let mut v = raw_slice(expr, bound);
    v.sort_by_cached_key(|x| (expr.norm(x).unwrap(), x.clone()));
    v
}

fn raw_slice(expr: &NmExpr, bound: u64) -> Vec<NmElem> {
    match expr {
        NmExpr::Gamma0 => Vec::new(),
        NmExpr::Sum(a, b) => raw_slice(a, bound)
            .into_iter()
            .map(NmElem::left)
            .chain(raw_slice(b, bound).into_iter().map(NmElem::right))
            .collect(),
        NmExpr::Multi(a) => {
            let pool: Vec<(NmElem, u64)> = raw_slice(a, bound)
                .into_iter()
                .map(|x| {
                    let w = a.norm(&x).unwrap().max(1);
                    (x, w)
                })
                .collect();
            let mut out = Vec::new();
            bags(&pool, bound, 0, &mut Vec::new(), &mut out);
            out
        }
    }
}

// Multisets over `pool[from..]` with total weight ≤ budget, each listed once.
fn bags(
    pool: &[(NmElem, u64)],
    budget: u64,
    from: usize,
    cur: &mut Vec<NmElem>,
    out: &mut Vec<NmElem>,
) {
    out.push(NmElem::bag(cur.clone()));
    for i in from..pool.len() {
        let (x, w) = &pool[i];
        if *w <= budget {
            cur.push(x.clone());
            bags(pool, budget - w, i, cur, out);
            cur.pop();
        }
    }
}

struct Search<'a> {
    expr: &'a NmExpr,
    bounds: Vec<Option<u64>>,
    slices: HashMap<u64, Vec<NmElem>>,
    memo: HashMap<(Vec<NmElem>, usize), (Vec<NmElem>, bool)>,
    cap: usize,
}

impl Search<'_> {
    // Longest continuation from step `i` given the minimal elements so far.
    fn best(&mut self, minimal: &[NmElem], i: usize) -> (Vec<NmElem>, bool) {
        if i >= self.cap {
            return (Vec::new(), true);
        }
        let key = (minimal.to_vec(), i);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        // An overflowing control bound is treated like the cap: inconclusive.
        let Some(bound) = self.bounds[i] else {
            return (Vec::new(), true);
        };
        let candidates = self
            .slices
            .entry(bound)
            .or_insert_with(|| slice(self.expr, bound))
            .clone();
        let mut best: (Vec<NmElem>, bool) = (Vec::new(), false);
        for x in candidates {
            if minimal.iter().any(|m| self.expr.leq(m, &x).unwrap()) {
                continue;
            }
            let mut next: Vec<NmElem> = minimal
                .iter()
                .filter(|m| !self.expr.leq(&x, m).unwrap())
                .cloned()
                .collect();
            next.push(x.clone());
            next.sort();
            let (tail, hit) = self.best(&next, i + 1);
            if tail.len() + 1 > best.0.len() || (tail.len() + 1 == best.0.len() && hit && !best.1) {
                let mut seq = vec![x];
                seq.extend(tail);
                best = (seq, hit);
            }
        }
        self.memo.insert(key, best.clone());
        best
    }
}

/// `L_{A,g}(n)` by depth-first search. Sequences are pruned to their minimal
/// elements, which is all that constrains the future.
pub fn max_bad_sequence(q: &BadSequenceQuery) -> BadSequenceResult {
    let cap = q.cap.max(1);
    let mut bounds = Vec::with_capacity(cap);
    let mut b = Some(q.n);
    for _ in 0..cap {
        bounds.push(b);
        b = b.and_then(|v| q.control.apply(&v));
    }
    let mut s = Search {
        expr: &q.expr,
        bounds,
        slices: HashMap::new(),
        memo: HashMap::new(),
        cap,
    };
    let (witness, cap_hit) = s.best(&[], 0);
    BadSequenceResult {
        length: witness.len(),
        witness,
        cap_hit,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;

    fn run(e: &str, n: u64) -> BadSequenceResult {
        max_bad_sequence(&BadSequenceQuery {
            expr: parse_expr(e).unwrap(),
            control: ControlFunction::linear(2).unwrap(),
            n,
            cap: 10,
        })
    }

    #[test]
    fn small_lengths() {
        let r = run("M[G0]", 0);
        assert_eq!((r.length, r.cap_hit), (1, false));
        let r = run("M[G1]", 3);
        assert_eq!(r.length, 4);
        let norms: Vec<u64> = r
            .witness
            .iter()
            .map(|x| parse_expr("M[G1]").unwrap().norm(x).unwrap())
            .collect();
        assert_eq!(norms, [3, 2, 1, 0]);
        assert_eq!(run("G2", 0).length, 2);
        assert_eq!(run("G0", 5).length, 0);
    }

    #[test]
    fn cap_is_reported() {
        let r = max_bad_sequence(&BadSequenceQuery {
            expr: parse_expr("M[G1]").unwrap(),
            control: ControlFunction::linear(2).unwrap(),
            n: 8,
            cap: 3,
        });
        assert_eq!((r.length, r.cap_hit), (3, true));
    }

    #[test]
    fn slice_sizes() {
        // ⟨Γ₂⟩ ≡ ℕ²: pairs with sum ≤ 3.
        assert_eq!(slice(&parse_expr("M[G2]").unwrap(), 3).len(), 10);
        assert_eq!(slice(&parse_expr("M[M[G0]]").unwrap(), 4).len(), 5);
    }
}
