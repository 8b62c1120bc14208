//! Abstract rules with unannotated last-level labels, and their expansion
//! into concrete transitions.
//!
//! A label at depth `k` stands for a pair `(p, ω^i)`. An abstract rule that
//! touches depth `k` becomes one concrete transition per admissible `i`:
//! relabelling keeps `i`, creating a node gives `i = 0`, reaching one level
//! below `k` increments or decrements `i`, and resetting `ω` children of a
//! level-`k` node sets `i = 0`. Resetting the level-`k` children of a node
//! removes every `(r, ω^i)`, which takes a chain of `ℓ+1` resets.

use std::collections::BTreeMap;

use crate::encoding::{BUDGET, OMEGA};
use crate::nrcs::{Label, Nrcs, Transition};

pub(crate) const BUDGET_PRIMED: &str = "#'";

#[derive(Clone, Debug)]
pub(crate) enum Rule {
    Upd {
        src: Vec<Label>,
        dst: Vec<Label>,
    },
    Rst {
        src: Vec<Label>,
        reset: Label,
        dst: Vec<Label>,
    },
}

/// Naming and placement of one gadget instance: `ns` prefixes its state
/// names, `kns` its rule keys, and `pre` holds the labels of the ancestors
/// of its root.
///
/// Each entry `(d, a)` of `track` marks a node at depth `d` that entered an
/// enclosing comparator labelled `a`. Every rule of the instance also gets
/// a variant where that node carries the pair label `a+q` instead of `q`,
/// so the node stays recognisable until the comparator is done.
#[derive(Clone, Debug)]
pub(crate) struct Scope {
    pub ns: String,
    pub kns: String,
    pub pre: Vec<Label>,
    pub track: Vec<(usize, String)>,
}

impl Scope {
    pub fn root() -> Self {
        Scope {
            ns: String::new(),
            kns: String::new(),
            pre: Vec::new(),
            track: Vec::new(),
        }
    }

    /// A state name of this instance. `w` is shared by every instance.
    pub fn lab(&self, name: &str) -> Label {
        if name == OMEGA {
            Label::new(OMEGA)
        } else {
            Label::new(&format!("{}{}", self.ns, name))
        }
    }

    pub fn ann(&self, name: &str, i: u32) -> Label {
        self.lab(name).with_annotation(Some(i))
    }

    pub fn key(&self, name: &str) -> String {
        format!("{}{}", self.kns, name)
    }

    /// Depth of the instance root.
    pub fn depth(&self) -> usize {
        self.pre.len()
    }

    /// A nested instance rooted at the same node.
    pub fn nested(&self, tag: &str) -> Scope {
        Scope {
            ns: format!("{}{}.", self.ns, tag),
            kns: format!("{}{}.", self.kns, tag),
            pre: self.pre.clone(),
            track: self.track.clone(),
        }
    }

    /// A nested instance rooted below this one, reached through `via`.
    pub fn nested_below(&self, tag: &str, via: &[Label]) -> Scope {
        let mut s = self.nested(tag);
        s.pre.extend_from_slice(via);
        s
    }

    pub fn path(&self, rel: &[Label]) -> Vec<Label> {
        let mut p = self.pre.clone();
        p.extend_from_slice(rel);
        p
    }
}

pub(crate) struct Builder {
    pub k: usize,
    pub l: u32,
    rules: Vec<(String, Rule)>,
}

/// A concrete machine plus, per rule key, its concrete variants. Each
/// variant is a chain of transition indices fired back to back.
pub(crate) struct Assembled {
    pub nrcs: Nrcs,
    pub registry: BTreeMap<String, Vec<Vec<usize>>>,
}

impl Builder {
    pub fn new(k: usize, l: u32) -> Self {
        Builder {
            k,
            l,
            rules: Vec::new(),
        }
    }

    pub fn upd(&mut self, s: &Scope, key: &str, src: Vec<Label>, dst: Vec<Label>) {
        for (src, dst) in tracked(s, s.path(&src), s.path(&dst)) {
            self.rules.push((s.key(key), Rule::Upd { src, dst }));
        }
    }

    pub fn rst(&mut self, s: &Scope, key: &str, src: Vec<Label>, reset: Label, dst: Vec<Label>) {
        for (src, dst) in tracked(s, s.path(&src), s.path(&dst)) {
            self.rules.push((
                s.key(key),
                Rule::Rst {
                    src,
                    reset: reset.clone(),
                    dst,
                },
            ));
        }
    }

    fn expandable(&self, l: &Label, depth: usize) -> bool {
        depth == self.k
            && l.annotation().is_none()
            && l.name() != BUDGET
            && l.name() != BUDGET_PRIMED
    }

    fn expand(&self, key: &str, serial: usize, r: &Rule) -> Vec<Vec<Transition>> {
        let k = self.k;
        let at = |v: &[Label], i: usize, a: u32| {
            let mut v = v.to_vec();
            v[i] = v[i].with_annotation(Some(a));
            v
        };
        match r {
            Rule::Upd { src, dst } => {
                let (a, b) = (src.len(), dst.len());
                let one =
                    |s: Vec<Label>, d: Vec<Label>| vec![Transition::Update { src: s, dst: d }];
                if a <= k + 1 && b <= k + 1 {
                    let dst_exp = b == k + 1 && self.expandable(&dst[k], k);
                    if a == k + 1 && self.expandable(&src[k], k) {
                        (0..=self.l)
                            .map(|i| {
                                let d = if dst_exp { at(dst, k, i) } else { dst.clone() };
                                one(at(src, k, i), d)
                            })
                            .collect()
                    } else {
                        let fixed = if a == k + 1 {
                            src[k].annotation().unwrap_or(0)
                        } else {
                            0
                        };
                        let d = if dst_exp {
                            at(dst, k, fixed)
                        } else {
                            dst.clone()
                        };
                        vec![one(src.clone(), d)]
                    }
                } else if a == k + 1 && b == k + 2 {
                    let range: Vec<u32> = match src[k].annotation() {
                        Some(j) => vec![j],
                        None => (0..self.l).collect(),
                    };
                    range
                        .into_iter()
                        .filter(|&i| i < self.l)
                        .map(|i| one(at(src, k, i), at(&dst[..=k], k, i + 1)))
                        .collect()
                } else if a == k + 2 && b <= k + 1 {
                    (1..=self.l)
                        .map(|i| {
                            let d = if b == k + 1 {
                                at(dst, k, i - 1)
                            } else {
                                dst.clone()
                            };
                            one(at(&src[..=k], k, i), d)
                        })
                        .collect()
                } else {
                    panic!("rule {key} reaches below the last level")
                }
            }
            Rule::Rst { src, reset, dst } => {
                let a = src.len();
                if a == k + 1 {
                    // The "children" of a level-k node are its annotation.
                    return (0..=self.l)
                        .map(|i| {
                            let j = if reset.name() == OMEGA { 0 } else { i };
                            vec![Transition::Update {
                                src: at(src, k, i),
                                dst: at(dst, k, j),
                            }]
                        })
                        .collect();
                }
                assert!(a <= k, "reset {key} is too deep");
                if a == k && self.expandable(reset, k) {
                    let width = a;
                    let mid = |j: u32| {
                        let mut p = src[..width - 1].to_vec();
                        p.push(Label::new(&format!("{key}~{serial}.{j}")));
                        p
                    };
                    let chain = (0..=self.l)
                        .map(|j| Transition::Reset {
                            src: if j == 0 { src.clone() } else { mid(j) },
                            reset: reset.with_annotation(Some(j)),
                            dst: if j == self.l { dst.clone() } else { mid(j + 1) },
                        })
                        .collect();
                    vec![chain]
                } else {
                    vec![vec![Transition::Reset {
                        src: src.clone(),
                        reset: reset.clone(),
                        dst: dst.clone(),
                    }]]
                }
            }
        }
    }

    pub fn assemble(self) -> Assembled {
        let mut transitions: Vec<Transition> = Vec::new();
        let mut index: BTreeMap<Transition, usize> = BTreeMap::new();
        let mut registry: BTreeMap<String, Vec<Vec<usize>>> = BTreeMap::new();
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (key, rule) in &self.rules {
            let serial = seen.entry(key).or_default();
            let chains = self.expand(key, *serial, rule);
            *serial += 1;
            for chain in chains {
                let ids = chain
                    .into_iter()
                    .map(|t| {
                        *index.entry(t.clone()).or_insert_with(|| {
                            transitions.push(t);
                            transitions.len() - 1
                        })
                    })
                    .collect();
                registry.entry(key.clone()).or_default().push(ids);
            }
        }
        let nrcs = Nrcs::from_transitions(self.k, transitions)
            .expect("generated transitions are well formed");
        Assembled { nrcs, registry }
    }
}

/// `a+q`, or `q` itself when it is `a`.
pub(crate) fn pair(a: &str, q: &Label) -> Label {
    if q.name() == a || q.name().starts_with(&format!("{a}+")) {
        q.clone()
    } else {
        Label::new(&format!("{a}+{}", q.name())).with_annotation(q.annotation())
    }
}

/// The variants of one rule under the scope's tracked nodes. A rule whose
/// source reads `a` at a tracked depth only exists in its tracked form;
/// any other rule touching that depth keeps its plain form as well.
fn tracked(s: &Scope, src: Vec<Label>, dst: Vec<Label>) -> Vec<(Vec<Label>, Vec<Label>)> {
    let mut out = vec![(src, dst)];
    for (d, a) in &s.track {
        let mut next = Vec::with_capacity(out.len() * 2);
        for (src, dst) in out {
            let Some(p) = src.get(*d) else {
                next.push((src, dst));
                continue;
            };
            let mut t_src = src.clone();
            t_src[*d] = pair(a, p);
            let mut t_dst = dst.clone();
            if let Some(q) = t_dst.get_mut(*d) {
                *q = pair(a, q);
            }
            if p.name() != a {
                next.push((src, dst));
            }
            next.push((t_src, t_dst));
        }
        out = next;
    }
    out.dedup();
    out
}

/// `n` copies of a label.
pub(crate) fn rep(l: &Label, n: usize) -> Vec<Label> {
    vec![l.clone(); n]
}

pub(crate) fn cat(parts: &[&[Label]]) -> Vec<Label> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::from(s)
    }

    fn transitions(k: usize, rule: impl FnOnce(&mut Builder, &Scope)) -> Vec<String> {
        let mut b = Builder::new(k, 2);
        rule(&mut b, &Scope::root());
        b.assemble()
            .nrcs
            .transitions()
            .iter()
            .map(|t| t.to_string())
            .collect()
    }

    #[test]
    fn last_level_variants() {
        let t = transitions(1, |b, s| {
            b.upd(s, "x", vec![l("p"), l("a")], vec![l("q"), l("b")])
        });
        assert_eq!(
            t,
            [
                "update p,a@w0 -> q,b@w0",
                "update p,a@w1 -> q,b@w1",
                "update p,a@w2 -> q,b@w2"
            ]
        );
        let t = transitions(1, |b, s| b.upd(s, "x", vec![l("p")], vec![l("q"), l("b")]));
        assert_eq!(t, ["update p -> q,b@w0"]);
        let t = transitions(1, |b, s| {
            b.upd(s, "x", vec![l("p"), l("a")], vec![l("q"), l("b"), l("w")])
        });
        assert_eq!(t, ["update p,a@w0 -> q,b@w1", "update p,a@w1 -> q,b@w2"]);
        let t = transitions(1, |b, s| {
            b.upd(s, "x", vec![l("p"), l("a"), l("w")], vec![l("q"), l("b")])
        });
        assert_eq!(t, ["update p,a@w1 -> q,b@w0", "update p,a@w2 -> q,b@w1"]);
        let t = transitions(1, |b, s| {
            b.upd(s, "x", vec![l("p"), l("#")], vec![l("q"), l("w")])
        });
        assert_eq!(t, ["update p,# -> q,w@w0"]);
    }

    #[test]
    fn level_k_resets() {
        let t = transitions(1, |b, s| b.rst(s, "x", vec![l("p")], l("w"), vec![l("q")]));
        assert_eq!(
            t,
            [
                "reset p [w@w0] -> x~0.1",
                "reset x~0.1 [w@w1] -> x~0.2",
                "reset x~0.2 [w@w2] -> q"
            ]
        );
        let t = transitions(1, |b, s| b.rst(s, "x", vec![l("p")], l("#'"), vec![l("q")]));
        assert_eq!(t, ["reset p [#'] -> q"]);
        let t = transitions(1, |b, s| {
            b.rst(s, "x", vec![l("p"), l("a")], l("w"), vec![l("q"), l("b")])
        });
        assert_eq!(
            t,
            [
                "update p,a@w0 -> q,b@w0",
                "update p,a@w1 -> q,b@w0",
                "update p,a@w2 -> q,b@w0"
            ]
        );
    }
}
