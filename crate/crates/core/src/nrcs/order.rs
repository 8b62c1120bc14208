//! The induced-subgraph order `≤_is` on configurations.

use std::collections::BTreeSet;

use super::config::{Config, NodePath};

/// A root-preserving injective map of `C` into `D`. Entry `i` of `children`
/// gives the `D`-child hosting `C`'s child `i` and the map below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub children: Vec<(usize, Embedding)>,
}

impl Embedding {
    /// Image in `D` of a node path of `C`.
    pub fn lift(&self, path: &[usize]) -> Option<NodePath> {
        let mut e = self;
        let mut out = Vec::with_capacity(path.len());
        for &i in path {
            let (j, sub) = e.children.get(i)?;
            out.push(*j);
            e = sub;
        }
        Some(out)
    }
}

/// `C ≤_is D`: `C` is obtained from `D` by deleting whole subtrees.
pub fn leq_induced(c: &Config, d: &Config) -> bool {
    if c.label() != d.label() || c.size() > d.size() || c.children().len() > d.children().len() {
        return false;
    }
    let m = c.children();
    let n = d.children();
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(m.len());
    for (i, ci) in m.iter().enumerate() {
        // Children are sorted, so identical siblings are adjacent and share a row.
        let row = if i > 0 && m[i - 1] == *ci {
            adj[i - 1].clone()
        } else {
            (0..n.len()).filter(|&j| leq_induced(ci, &n[j])).collect()
        };
        if row.is_empty() {
            return false;
        }
        adj.push(row);
    }
    matching(&adj, n.len()).is_some()
}

/// Like [`leq_induced`] but returns the embedding.
pub fn embedding(c: &Config, d: &Config) -> Option<Embedding> {
    if c.label() != d.label() || c.children().len() > d.children().len() {
        return None;
    }
    let m = c.children();
    let n = d.children();
    let mut subs: Vec<Vec<Option<Embedding>>> = Vec::with_capacity(m.len());
    let mut adj = Vec::with_capacity(m.len());
    for ci in m {
        let row: Vec<Option<Embedding>> = n.iter().map(|dj| embedding(ci, dj)).collect();
        adj.push(
            row.iter()
                .enumerate()
                .filter(|(_, e)| e.is_some())
                .map(|(j, _)| j)
                .collect(),
        );
        subs.push(row);
    }
    let assign = matching(&adj, n.len())?;
    Some(Embedding {
        children: assign
            .into_iter()
            .enumerate()
            .map(|(i, j)| (j, subs[i][j].take().unwrap()))
            .collect(),
    })
}

/// Maximum bipartite matching (Kuhn). Returns, for each left vertex, its
/// right partner when every left vertex can be matched.
fn matching(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; right];
    for u in 0..adj.len() {
        let mut seen = vec![false; right];
        if !augment(u, adj, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut assign = vec![0; adj.len()];
    for (j, o) in owner.iter().enumerate() {
        if let Some(u) = o {
            assign[*u] = j;
        }
    }
    Some(assign)
}

fn augment(u: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v].is_none() || augment(owner[v].unwrap(), adj, owner, seen) {
            owner[v] = Some(u);
            return true;
        }
    }
    false
}

/// Every configuration `C' ≤_is C`, including `C` itself.
pub fn sub_configs(c: &Config) -> BTreeSet<Config> {
    // Options for each child: deleted, or any of its own sub-configurations.
    let mut acc: BTreeSet<Vec<Config>> = BTreeSet::new();
    acc.insert(Vec::new());
    for child in c.children() {
        let opts = sub_configs(child);
        let mut next = BTreeSet::new();
        for partial in &acc {
            next.insert(partial.clone());
            for o in &opts {
                let mut p = partial.clone();
                p.push(o.clone());
                p.sort();
                next.insert(p);
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|ch| Config::new(c.label().clone(), ch))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nrcs::parse_tree;

    fn t(s: &str) -> Config {
        parse_tree(s).unwrap()
    }

    #[test]
    fn basic_order() {
        assert!(leq_induced(&t("q0"), &t("q0(q1,q2)")));
        assert!(!leq_induced(&t("q0(q1)"), &t("q0(q2)")));
        assert!(leq_induced(
            &t("q0(q1(q3),q2)"),
            &t("q0(q1(q3),q2,q1(q2,q2))")
        ));
        assert!(!leq_induced(&t("q0(q1,q1)"), &t("q0(q1(q2))")));
        assert!(!leq_induced(
            &t("q0(q1(q2),q1(q3))"),
            &t("q0(q1(q2,q3),q4)")
        ));
        // Greedy matching would fail here: q1 must go to the bare child.
        assert!(leq_induced(&t("a(b(c),b)"), &t("a(b,b(c))")));
    }

    #[test]
    fn embedding_lifts_paths() {
        let c = t("q0(q1(q3))");
        let d = t("q0(q2,q1(q2,q3))");
        let e = embedding(&c, &d).unwrap();
        let p = e.lift(&[0, 0]).unwrap();
        assert_eq!(d.node(&p).unwrap().label().name(), "q3");
        assert!(embedding(&t("q0(q4)"), &d).is_none());
    }

    #[test]
    fn sub_configs_of_small_tree() {
        let s = sub_configs(&t("a(b(c),b)"));
        let names: Vec<String> = s.iter().map(|c| c.to_string()).collect();
        assert_eq!(names.len(), 5);
        for x in ["a", "a(b)", "a(b(c))", "a(b,b)", "a(b,b(c))"] {
            assert!(names.contains(&x.to_string()), "{x}");
        }
    }
}
