//! Coverability for k-NRCS: the backward fixpoint over upward-closed sets,
//! a bounded forward explorer, and a brute-force predecessor oracle.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::nrcs::{
    count_configs, enumerate_configs, leq_induced, Config, NodePath, Nrcs, Transition,
};

/// A finite antichain of configurations denoting its upward closure.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Basis {
    elements: Vec<Config>,
}

impl Basis {
    pub fn elements(&self) -> &[Config] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `x ∈ ↑basis`.
    pub fn contains(&self, x: &Config) -> bool {
        self.elements.iter().any(|b| leq_induced(b, x))
    }

    /// Same upward closure: each side dominates the other.
    pub fn same_denotation(&self, other: &Basis) -> bool {
        self.elements.iter().all(|x| other.contains(x))
            && other.elements.iter().all(|x| self.contains(x))
    }
}

/// Keeps exactly the `≤_is`-minimal elements.
pub fn minimize<I: IntoIterator<Item = Config>>(configs: I) -> Basis {
    let mut v: Vec<Config> = configs.into_iter().collect();
    v.sort_by(|a, b| (a.size(), a).cmp(&(b.size(), b)));
    v.dedup();
    let mut kept: Vec<Config> = Vec::new();
    for x in v {
        if !kept.iter().any(|b| leq_induced(b, &x)) {
            kept.push(x);
        }
    }
    kept.sort();
    Basis { elements: kept }
}

/// A basis of `pre(↑C)`.
///
/// For each transition, the image of `C` after the step meets the relabelled
/// path in a root path `u_0..u_m` of `C`. Inverting the step on that overlap
/// gives the unique minimal predecessor for it; every element has at most
/// `|C| + k` nodes.
pub fn pre_basis(nrcs: &Nrcs, c: &Config) -> Basis {
    let mut cands = Vec::new();
    for t in nrcs.transitions() {
        let dst = t.dst();
        for m in 0..dst.len() {
            for path in c.matching_paths(&dst[..=m]) {
                if let Some(x) = invert(t, c, &path) {
                    cands.push(x);
                }
            }
        }
    }
    minimize(cands)
}

fn invert(t: &Transition, c: &Config, path: &[usize]) -> Option<Config> {
    let src = t.src();
    let i = src.len() - 1;
    let m = path.len();
    let mut x = c.clone();
    match t {
        Transition::Reset { reset, .. } => {
            if m == i
                && c.node(path)?
                    .children()
                    .iter()
                    .any(|ch| ch.label() == reset)
            {
                return None;
            }
        }
        Transition::Update { dst, .. } if dst.len() > src.len() && m > i => {
            // u_{i+1}..u_m sit on freshly created nodes: they must be a bare chain.
            for d in i + 1..=m {
                let want = usize::from(d < m);
                if c.node(&path[..d])?.children().len() != want {
                    return None;
                }
            }
            x.node_mut(&path[..i]).children_mut().remove(path[i]);
        }
        Transition::Update { .. } => {}
    }
    for d in 0..=m.min(i) {
        x.node_mut(&path[..d]).set_label(src[d].clone());
    }
    if m < i {
        let chain = src[m + 1..]
            .iter()
            .rev()
            .fold(None, |below: Option<Config>, l| {
                Some(Config::new(l.clone(), below.into_iter().collect()))
            })
            .unwrap();
        x.node_mut(path).children_mut().push(chain);
    }
    x.canonicalize();
    Some(x)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("oracle refused: {estimate} candidate configurations exceed the guard of {guard}")]
    TooLarge { estimate: u128, guard: u128 },
}

/// Default candidate-count guard for [`pre_basis_oracle`].
pub const ORACLE_GUARD: u128 = 200_000;

/// Brute force: every configuration with at most `|C| + k + 1` nodes over
/// `Q` that has a successor in `↑C`, minimized.
pub fn pre_basis_oracle(nrcs: &Nrcs, c: &Config, guard: u128) -> Result<Basis, OracleError> {
    let bound = c.size() + nrcs.k() + 1;
    let estimate = count_configs(nrcs.states().len(), bound, nrcs.k());
    if estimate > guard {
        return Err(OracleError::TooLarge { estimate, guard });
    }
    let hits = enumerate_configs(nrcs.states(), bound, nrcs.k())
        .into_iter()
        .filter(|x| nrcs.successors(x).iter().any(|(_, _, y)| leq_induced(c, y)));
    Ok(minimize(hits))
}

/// One certificate step: transition index and anchor path.
pub type Step = (usize, NodePath);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Coverable,
    NotCoverable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverabilityVerdict {
    pub decision: Decision,
    /// Fixpoint rounds performed.
    pub iterations: usize,
    /// Basis size after each round, starting with the target alone.
    pub basis_sizes: Vec<usize>,
    /// A replayable run for coverable instances.
    pub certificate: Option<Vec<Step>>,
    /// The final basis of the backward fixpoint.
    pub basis: Basis,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("engine fault: no fixpoint within {0} iterations")]
    IterationCap(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Backward coverability: `U_{i+1} = U_i ∪ pre(U_i)` until it stabilizes
/// or contains `init`.
pub fn backward_coverability(
    nrcs: &Nrcs,
    init: &Config,
    target: &Config,
    iteration_cap: usize,
) -> Result<CoverabilityVerdict, CoverError> {
    for c in [init, target] {
        nrcs.validate_config(c)
            .map_err(|e| CoverError::Invalid(e.to_string()))?;
    }
    // Every element ever added, with the round that added it.
    let mut history: Vec<(Config, usize)> = vec![(target.clone(), 0)];
    let mut basis: Vec<Config> = vec![target.clone()];
    let mut work: Vec<Config> = vec![target.clone()];
    let mut sizes = vec![1];
    let mut it = 0;
    let covered = |b: &[Config]| b.iter().any(|x| leq_induced(x, init));
    let mut found = covered(&basis);
    while !found {
        it += 1;
        if it > iteration_cap {
            return Err(CoverError::IterationCap(iteration_cap));
        }
        let mut fresh: Vec<Config> = Vec::new();
        for w in &work {
            for x in pre_basis(nrcs, w).elements {
                if basis.iter().chain(fresh.iter()).any(|b| leq_induced(b, &x)) {
                    continue;
                }
                fresh.retain(|y| !leq_induced(&x, y));
                fresh.push(x);
            }
        }
        if fresh.is_empty() {
            sizes.push(basis.len());
            basis.sort();
            return Ok(CoverabilityVerdict {
                decision: Decision::NotCoverable,
                iterations: it,
                basis_sizes: sizes,
                certificate: None,
                basis: Basis { elements: basis },
            });
        }
        basis.retain(|b| !fresh.iter().any(|x| leq_induced(x, b)));
        basis.extend(fresh.iter().cloned());
        history.extend(fresh.iter().map(|x| (x.clone(), it)));
        sizes.push(basis.len());
        found = covered(&fresh);
        work = fresh;
    }
    let certificate = replay_witness(nrcs, init, &history);
    basis.sort();
    Ok(CoverabilityVerdict {
        decision: Decision::Coverable,
        iterations: it,
        basis_sizes: sizes,
        certificate: Some(certificate),
        basis: Basis { elements: basis },
    })
}

// Greedy forward replay: each step moves to a successor of strictly lower
// layer, preferring the lowest layer and then the smallest configuration.
fn replay_witness(nrcs: &Nrcs, init: &Config, history: &[(Config, usize)]) -> Vec<Step> {
    let level = |x: &Config| {
        history
            .iter()
            .filter(|(b, _)| leq_induced(b, x))
            .map(|(_, l)| *l)
            .min()
    };
    let mut cur = init.clone();
    let mut lvl = level(&cur).expect("init is covered");
    let mut run = Vec::new();
    while lvl > 0 {
        let (t, a, next, l) = nrcs
            .successors(&cur)
            .into_iter()
            .filter_map(|(t, a, y)| level(&y).filter(|l| *l < lvl).map(|l| (t, a, y, l)))
            .min_by(|x, y| (x.3, &x.2).cmp(&(y.3, &y.2)))
            .expect("a lower layer is reachable in one step");
        run.push((t, a));
        cur = next;
        lvl = l;
    }
    run
}

/// Replays `run` from `init` and checks that the last configuration covers `target`.
pub fn verify_certificate(nrcs: &Nrcs, init: &Config, target: &Config, run: &[Step]) -> bool {
    match nrcs.replay(init, run) {
        Ok(trace) => leq_induced(target, trace.last().unwrap()),
        Err(_) => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum ForwardOutcome {
    Found {
        run: Vec<Step>,
    },
    /// Every configuration within the node cap was visited. `pruned` tells
    /// whether some successor was dropped for exceeding the cap.
    Exhausted {
        visited: usize,
        pruned: bool,
    },
    Cutoff {
        visited: usize,
    },
}

/// Breadth-first search over canonical configurations with at most
/// `max_nodes` nodes, stopping after `max_frontier` distinct configurations.
pub fn forward_explore(
    nrcs: &Nrcs,
    init: &Config,
    max_nodes: usize,
    max_frontier: usize,
    target: &Config,
) -> ForwardOutcome {
    let mut parent: HashMap<Config, Option<(Config, Step)>> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut pruned = false;
    parent.insert(init.clone(), None);
    queue.push_back(init.clone());
    while let Some(x) = queue.pop_front() {
        if leq_induced(target, &x) {
            let mut run = Vec::new();
            let mut cur = x;
            while let Some(Some((p, s))) = parent.get(&cur) {
                run.push(s.clone());
                cur = p.clone();
            }
            run.reverse();
            return ForwardOutcome::Found { run };
        }
        for (t, a, y) in nrcs.successors(&x) {
            if y.size() > max_nodes {
                pruned = true;
                continue;
            }
            if parent.contains_key(&y) {
                continue;
            }
            if parent.len() >= max_frontier {
                return ForwardOutcome::Cutoff {
                    visited: parent.len(),
                };
            }
            parent.insert(y.clone(), Some((x.clone(), (t, a))));
            queue.push_back(y);
        }
    }
    ForwardOutcome::Exhausted {
        visited: parent.len(),
        pruned,
    }
}
