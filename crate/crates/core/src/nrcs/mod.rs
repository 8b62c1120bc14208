//! The k-NRCS machine model.

mod config;
mod enumerate;
mod order;
mod text;

pub use config::{parse_path, render_path, Config, Label, NodePath};
pub use enumerate::{count_configs, enumerate_configs};
pub use order::{embedding, leq_induced, sub_configs, Embedding};
pub(crate) use text::parse_nrcs_with;
pub use text::{parse_label, parse_nrcs, parse_tree, render_nrcs, NrcsFile, TextError};

use std::collections::BTreeMap;
use std::fmt;

/// An update `(p0..pi) → (q0..qj)` or a reset `(p0..pi) reset p → (q0..qi)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Transition {
    Update {
        src: Vec<Label>,
        dst: Vec<Label>,
    },
    Reset {
        src: Vec<Label>,
        reset: Label,
        dst: Vec<Label>,
    },
}

impl Transition {
    pub fn update<S: Into<Label> + Clone>(src: &[S], dst: &[S]) -> Self {
        Transition::Update {
            src: src.iter().cloned().map(Into::into).collect(),
            dst: dst.iter().cloned().map(Into::into).collect(),
        }
    }

    pub fn reset<S: Into<Label> + Clone>(src: &[S], reset: S, dst: &[S]) -> Self {
        Transition::Reset {
            src: src.iter().cloned().map(Into::into).collect(),
            reset: reset.into(),
            dst: dst.iter().cloned().map(Into::into).collect(),
        }
    }

    pub fn src(&self) -> &[Label] {
        match self {
            Transition::Update { src, .. } | Transition::Reset { src, .. } => src,
        }
    }

    pub fn dst(&self) -> &[Label] {
        match self {
            Transition::Update { dst, .. } | Transition::Reset { dst, .. } => dst,
        }
    }

    pub fn is_reset(&self) -> bool {
        matches!(self, Transition::Reset { .. })
    }

    /// An update creating nodes.
    pub fn is_incrementing(&self) -> bool {
        matches!(self, Transition::Update { src, dst } if dst.len() > src.len())
    }

    /// All labels mentioned.
    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        let extra = match self {
            Transition::Reset { reset, .. } => Some(reset),
            Transition::Update { .. } => None,
        };
        self.src().iter().chain(self.dst().iter()).chain(extra)
    }

    fn check(&self, k: usize) -> Result<(), String> {
        let (s, d) = (self.src().len(), self.dst().len());
        match self {
            Transition::Update { .. } if s == 0 || d == 0 || s > k + 1 || d > k + 1 => {
                Err(format!("update paths must have 1..={} labels", k + 1))
            }
            Transition::Reset { .. } if s == 0 || s > k => {
                Err(format!("reset paths must have 1..={k} labels"))
            }
            Transition::Reset { .. } if s != d => {
                Err("reset source and target differ in length".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Label]| {
            v.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Transition::Update { src, dst } => write!(f, "update {} -> {}", join(src), join(dst)),
            Transition::Reset { src, reset, dst } => {
                write!(f, "reset {} [{}] -> {}", join(src), reset, join(dst))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("anchor {0} does not match the transition source")]
    AnchorMismatch(String),
    #[error("no transition with index {0}")]
    NoSuchTransition(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NrcsError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("transition {index}: {message}")]
    BadTransition { index: usize, message: String },
    #[error("label '{0}' is not a declared state")]
    UnknownLabel(String),
    #[error("configuration {config} has height {height} > k = {k}")]
    Height {
        config: String,
        height: usize,
        k: usize,
    },
}

/// `(Q, δ_u, δ_r)` with nesting depth `k`. Transitions keep their insertion
/// order; certificates refer to them by index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Nrcs {
    k: usize,
    states: Vec<Label>,
    transitions: Vec<Transition>,
}

impl Nrcs {
    pub fn new(
        k: usize,
        states: Vec<Label>,
        transitions: Vec<Transition>,
    ) -> Result<Self, NrcsError> {
        if k == 0 {
            return Err(NrcsError::ZeroK);
        }
        let mut states = states;
        states.sort();
        states.dedup();
        for (index, t) in transitions.iter().enumerate() {
            t.check(k)
                .map_err(|message| NrcsError::BadTransition { index, message })?;
            for l in t.labels() {
                if states.binary_search(l).is_err() {
                    return Err(NrcsError::UnknownLabel(l.to_string()));
                }
            }
        }
        Ok(Nrcs {
            k,
            states,
            transitions,
        })
    }

    /// Builds a machine whose state set is exactly the labels used.
    pub fn from_transitions(k: usize, transitions: Vec<Transition>) -> Result<Self, NrcsError> {
        let states = transitions
            .iter()
            .flat_map(|t| t.labels().cloned())
            .collect();
        Self::new(k, states, transitions)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn states(&self) -> &[Label] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn updates(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(|t| !t.is_reset())
    }

    pub fn resets(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(|t| t.is_reset())
    }

    pub fn has_state(&self, l: &Label) -> bool {
        self.states.binary_search(l).is_ok()
    }

    /// Checks height and labels of a configuration.
    pub fn validate_config(&self, c: &Config) -> Result<(), NrcsError> {
        if c.height() > self.k {
            return Err(NrcsError::Height {
                config: c.to_string(),
                height: c.height(),
                k: self.k,
            });
        }
        for l in c.labels() {
            if !self.has_state(&l) {
                return Err(NrcsError::UnknownLabel(l.to_string()));
            }
        }
        Ok(())
    }

    /// Fires transition `index` at `anchor`.
    pub fn apply_at(
        &self,
        c: &Config,
        index: usize,
        anchor: &[usize],
    ) -> Result<Config, StepError> {
        let t = self
            .transitions
            .get(index)
            .ok_or(StepError::NoSuchTransition(index))?;
        apply_at(c, t, anchor)
    }

    /// All `(transition index, anchor, successor)` triples, one per distinct
    /// successor configuration.
    pub fn successors(&self, c: &Config) -> Vec<(usize, NodePath, Config)> {
        let mut seen: BTreeMap<Config, (usize, NodePath)> = BTreeMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            for anchor in c.matching_paths(t.src()) {
                let next = apply_at(c, t, &anchor).expect("matched anchor");
                seen.entry(next).or_insert((i, anchor));
            }
        }
        let mut out: Vec<_> = seen.into_iter().map(|(c, (i, a))| (i, a, c)).collect();
        out.sort_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));
        out
    }

    /// Successors under the lossy semantics: delete any subtrees, then step
    /// with transition `index`.
    pub fn lossy_step(&self, c: &Config, index: usize) -> Vec<Config> {
        let t = &self.transitions[index];
        let mut out: Vec<Config> = sub_configs(c)
            .into_iter()
            .flat_map(|s| {
                s.matching_paths(t.src())
                    .into_iter()
                    .map(|a| apply_at(&s, t, &a).expect("matched anchor"))
                    .collect::<Vec<_>>()
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Replays `(index, anchor)` steps from `init`, returning every
    /// intermediate configuration including `init`.
    pub fn replay(
        &self,
        init: &Config,
        run: &[(usize, NodePath)],
    ) -> Result<Vec<Config>, StepError> {
        let mut trace = vec![init.clone()];
        for (i, a) in run {
            let next = self.apply_at(trace.last().unwrap(), *i, a)?;
            trace.push(next);
        }
        Ok(trace)
    }
}

/// One step of transition `t` along the root path `anchor`.
pub fn apply_at(c: &Config, t: &Transition, anchor: &[usize]) -> Result<Config, StepError> {
    let src = t.src();
    if anchor.len() + 1 != src.len() || c.path_labels(anchor).as_deref() != Some(src) {
        return Err(StepError::AnchorMismatch(render_path(anchor)));
    }
    let mut out = c.clone();
    let i = src.len() - 1;
    match t {
        Transition::Update { dst, .. } => {
            let j = dst.len() - 1;
            for d in 0..=i.min(j) {
                out.node_mut(&anchor[..d]).set_label(dst[d].clone());
            }
            if j < i {
                out.node_mut(&anchor[..j]).children_mut().remove(anchor[j]);
            } else if j > i {
                let chain = dst[i + 1..]
                    .iter()
                    .rev()
                    .fold(None, |below: Option<Config>, l| {
                        Some(Config::new(l.clone(), below.into_iter().collect()))
                    })
                    .unwrap();
                out.node_mut(anchor).children_mut().push(chain);
            }
        }
        Transition::Reset { reset, dst, .. } => {
            for d in 0..=i {
                out.node_mut(&anchor[..d]).set_label(dst[d].clone());
            }
            out.node_mut(anchor)
                .children_mut()
                .retain(|ch| ch.label() != reset);
        }
    }
    out.canonicalize();
    Ok(out)
}

/// `(p0..pi) greset S → (q0..qi)`: relabel the path and remove every child
/// of `v_i` whose label is in `S`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneralizedReset {
    pub src: Vec<Label>,
    pub resets: Vec<Label>,
    pub dst: Vec<Label>,
}

impl GeneralizedReset {
    /// One-shot semantics.
    pub fn apply_at(&self, c: &Config, anchor: &[usize]) -> Result<Config, StepError> {
        if anchor.len() + 1 != self.src.len()
            || c.path_labels(anchor).as_deref() != Some(&self.src[..])
        {
            return Err(StepError::AnchorMismatch(render_path(anchor)));
        }
        let mut out = c.clone();
        for (d, l) in self.dst.iter().enumerate() {
            out.node_mut(&anchor[..d]).set_label(l.clone());
        }
        out.node_mut(anchor)
            .children_mut()
            .retain(|ch| !self.resets.contains(ch.label()));
        out.canonicalize();
        Ok(out)
    }
}

/// Chains ordinary resets `t_1 … t_m`, one per label of `S`, through fresh
/// path labellings `fresh(1) … fresh(m−1)`. With `|S| = 1` this is a single reset.
pub fn expand_generalized_reset(
    g: &GeneralizedReset,
    fresh: &mut dyn FnMut(usize) -> Label,
) -> Result<Vec<Transition>, String> {
    let mut s = g.resets.clone();
    s.sort();
    s.dedup();
    if s.is_empty() {
        return Err("generalized reset needs a nonempty label set".into());
    }
    if g.src.len() != g.dst.len() {
        return Err("reset source and target differ in length".into());
    }
    let m = s.len();
    let width = g.src.len();
    let inter: Vec<Label> = (1..m).map(&mut *fresh).collect();
    let mut out = Vec::with_capacity(m);
    for (j, sj) in s.iter().enumerate() {
        let from = if j == 0 {
            g.src.clone()
        } else {
            vec![inter[j - 1].clone(); width]
        };
        let to = if j + 1 == m {
            g.dst.clone()
        } else {
            vec![inter[j].clone(); width]
        };
        out.push(Transition::Reset {
            src: from,
            reset: sj.clone(),
            dst: to,
        });
    }
    Ok(out)
}
