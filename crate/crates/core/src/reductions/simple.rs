//! Coverability reduced to simple coverability, from a single-node `q_init`
//! to a single-node `q_f`.
//!
//! The forward wrapper grows `C` one node at a time under fresh, pairwise
//! distinct labels, then gives the nodes their real labels bottom-up, the
//! root last. The backward wrapper marks the nodes of `C` top-down in a
//! candidate configuration, one fresh mark per node, and reaches `q_f` once
//! every node is marked. A marked node cannot be picked twice, so the marks
//! trace a root-preserving injective embedding, i.e. `C ≤_is` the candidate.
//! In both wrappers the root carries a step counter while they work, so no
//! transition of the wrapped machine can interfere.

use super::ReductionError;
use crate::nrcs::{Config, Label, Nrcs, Transition};

/// The two fragments for a configuration `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wrappers {
    /// `C`'s root children, in the order they are installed and marked.
    pub branches: Vec<Config>,
    /// From the single node `q_init`, builds exactly `C`.
    pub forward: Vec<Transition>,
    /// From a configuration rooted at `C`'s root, reaches `q_f` iff it covers `C`.
    pub backward: Vec<Transition>,
    /// Fresh labels used by the fragments.
    pub aux: Vec<Label>,
    pub q_init: Label,
    pub q_f: Label,
}

/// Nodes of `c` other than the root in pre-order, each with the pre-order
/// indices of its proper ancestors below the root.
fn preorder(c: &Config) -> Vec<(Label, Vec<usize>)> {
    fn go(c: &Config, anc: &mut Vec<usize>, out: &mut Vec<(Label, Vec<usize>)>) {
        for x in c.children() {
            out.push((x.label().clone(), anc.clone()));
            anc.push(out.len());
            go(x, anc, out);
            anc.pop();
        }
    }
    let mut out = Vec::new();
    go(c, &mut Vec::new(), &mut out);
    out
}

fn fresh(n: &Nrcs, name: String) -> Result<Label, ReductionError> {
    let l = Label::new(&name);
    if n.has_state(&l) {
        return Err(ReductionError::Invalid(format!(
            "wrapper label {name} clashes with a state"
        )));
    }
    Ok(l)
}

/// Wrapper fragments for `c` over the machine `n`. The fresh labels are
/// `sc.init`, `sc.final` and names under `sc.f.` and `sc.b.`.
pub fn simple_coverability_wrappers(n: &Nrcs, c: &Config) -> Result<Wrappers, ReductionError> {
    n.validate_config(c)?;
    let q = c.label().clone();
    let q_init = fresh(n, "sc.init".into())?;
    let q_f = fresh(n, "sc.final".into())?;
    let nodes = preorder(c);
    let m = nodes.len();
    let mut aux = vec![q_init.clone(), q_f.clone()];
    let mut mk = |name: String| -> Result<Label, ReductionError> {
        let l = fresh(n, name)?;
        aux.push(l.clone());
        Ok(l)
    };
    // Node j is built as x[j−1] and marked as mark[j−1]; r and s count steps.
    let x: Vec<Label> = (1..=m)
        .map(|j| mk(format!("sc.f.x{j}")))
        .collect::<Result<_, _>>()?;
    let r: Vec<Label> = (0..2 * m)
        .map(|j| mk(format!("sc.f.r{j}")))
        .collect::<Result<_, _>>()?;
    let mark: Vec<Label> = (1..=m)
        .map(|j| mk(format!("sc.b.m{j}")))
        .collect::<Result<_, _>>()?;
    let s: Vec<Label> = (0..=m)
        .map(|j| mk(format!("sc.b.s{j}")))
        .collect::<Result<_, _>>()?;
    let path = |names: &[Label], anc: &[usize]| -> Vec<Label> {
        anc.iter().map(|&a| names[a - 1].clone()).collect()
    };

    let mut forward = Vec::new();
    if m == 0 {
        forward.push(Transition::Update {
            src: vec![q_init.clone()],
            dst: vec![q.clone()],
        });
    } else {
        forward.push(Transition::Update {
            src: vec![q_init.clone()],
            dst: vec![r[0].clone()],
        });
        for (j, (_, anc)) in nodes.iter().enumerate() {
            let up = path(&x, anc);
            let mut dst = [vec![r[j + 1].clone()], up.clone()].concat();
            dst.push(x[j].clone());
            forward.push(Transition::Update {
                src: [vec![r[j].clone()], up].concat(),
                dst,
            });
        }
        // Post-order: a node gets its label after all its descendants.
        for (step, j) in postorder(&nodes).into_iter().enumerate() {
            let (label, anc) = &nodes[j - 1];
            let root = if step + 1 == m {
                q.clone()
            } else {
                r[m + step + 1].clone()
            };
            let up = path(&x, anc);
            let src = [
                vec![r[m + step].clone()],
                up.clone(),
                vec![x[j - 1].clone()],
            ]
            .concat();
            let dst = [vec![root], up, vec![label.clone()]].concat();
            forward.push(Transition::Update { src, dst });
        }
    }

    let mut backward = vec![Transition::Update {
        src: vec![q.clone()],
        dst: vec![s[0].clone()],
    }];
    for (j, (label, anc)) in nodes.iter().enumerate() {
        let up = path(&mark, anc);
        let src = [vec![s[j].clone()], up.clone(), vec![label.clone()]].concat();
        let dst = [vec![s[j + 1].clone()], up, vec![mark[j].clone()]].concat();
        backward.push(Transition::Update { src, dst });
    }
    backward.push(Transition::Update {
        src: vec![s[m].clone()],
        dst: vec![q_f.clone()],
    });

    aux.sort();
    aux.dedup();
    Ok(Wrappers {
        branches: c.children().to_vec(),
        forward,
        backward,
        aux,
        q_init,
        q_f,
    })
}

/// 1-based pre-order indices in post-order.
fn postorder(nodes: &[(Label, Vec<usize>)]) -> Vec<usize> {
    let m = nodes.len();
    let mut out = Vec::with_capacity(m);
    fn visit(j: usize, nodes: &[(Label, Vec<usize>)], out: &mut Vec<usize>) {
        let depth = nodes[j - 1].1.len();
        for c in j + 1..=nodes.len() {
            let anc = &nodes[c - 1].1;
            if anc.len() == depth + 1 && anc.last() == Some(&j) {
                visit(c, nodes, out);
            }
        }
        out.push(j);
    }
    for j in 1..=m {
        if nodes[j - 1].1.is_empty() {
            visit(j, nodes, &mut out);
        }
    }
    out
}

/// A simple-coverability instance equivalent to covering `to` from `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleInstance {
    pub nrcs: Nrcs,
    pub init: Config,
    pub target: Config,
}

/// `N^from_fwd`, then `N`, then `N^to_bwd`. The fragments for `from` and `to`
/// share the fresh names, which is harmless: the forward fragment uses only
/// `sc.f.` names and the backward one only `sc.b.` names.
pub fn compose_simple(
    n: &Nrcs,
    from: &Config,
    to: &Config,
) -> Result<SimpleInstance, ReductionError> {
    let f = simple_coverability_wrappers(n, from)?;
    let b = simple_coverability_wrappers(n, to)?;
    let mut ts = f.forward.clone();
    ts.extend(n.transitions().iter().cloned());
    ts.extend(b.backward.iter().cloned());
    let mut states = n.states().to_vec();
    states.extend(f.aux.iter().cloned());
    states.extend(b.aux.iter().cloned());
    let nrcs = Nrcs::new(n.k(), states, ts)?;
    Ok(SimpleInstance {
        nrcs,
        init: Config::leaf(f.q_init),
        target: Config::leaf(b.q_f),
    })
}
