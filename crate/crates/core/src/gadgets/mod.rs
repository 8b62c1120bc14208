//! Generated lower-bound machines: copy, comparator, smallest-child and
//! biggest-child gadgets, and the machines running the Hardy rewrite system
//! forwards and backwards on `C_{α,n}`.
//!
//! Nested instances are inlined with their state names prefixed (`g1.`,
//! `g1a.` and so on, one prefix per nesting level), and their paths are
//! extended with the labels of the ancestors they run below. Transitions
//! touching the last level are expanded into one transition per
//! annotation `0..=ℓ`.
//!
//! Every machine comes with a planner that builds the intended run on a
//! given input, resolving each nondeterministic guess in favour of the
//! exact outcome.

mod builder;
mod check;
mod machines;
mod plan;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use check::{encoder_violation, validate_encoder, SoundnessReport, Strictness, Violation};

use crate::encoding::{decode_hardy_config, make_hardy_config, EncodingParams, HardyState};
use crate::nrcs::{Config, Label, NodePath, Nrcs};
use builder::{Builder, Scope};
use plan::{hardy_chain, Planner};

/// Largest `ℓ` accepted by [`Gadget::build`]; every last-level rule is
/// expanded `ℓ+1` times.
pub const MAX_L: u64 = 64;

/// Longest `→_H` chain the Hardy planners will follow.
const MAX_HARDY_STEPS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    Copy,
    Comparator,
    Smallest,
    Biggest,
    HardyForward,
    HardyBackward,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 6] = [
        GadgetKind::Copy,
        GadgetKind::Comparator,
        GadgetKind::Smallest,
        GadgetKind::Biggest,
        GadgetKind::HardyForward,
        GadgetKind::HardyBackward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Copy => "copy",
            GadgetKind::Comparator => "comparator",
            GadgetKind::Smallest => "smallest",
            GadgetKind::Biggest => "biggest",
            GadgetKind::HardyForward => "hardy-forward",
            GadgetKind::HardyBackward => "hardy-backward",
        }
    }

    /// Root labels of an input and of a finished output.
    pub fn start_end(self) -> (&'static str, &'static str) {
        match self {
            GadgetKind::Copy => ("start_copy", "end_copy"),
            GadgetKind::Comparator => ("start_cmp", "end_cmp"),
            GadgetKind::Smallest => ("start_sm", "end_sm"),
            GadgetKind::Biggest => ("start_big", "end_big"),
            GadgetKind::HardyForward | GadgetKind::HardyBackward => ("w", "w"),
        }
    }

    /// Labels callers use to prepare inputs and read outputs.
    pub fn roles(self) -> Vec<&'static str> {
        match self {
            GadgetKind::Copy => vec!["start_copy", "end_copy", "mrkd", "cpd", "w"],
            GadgetKind::Comparator => {
                vec![
                    "start_cmp",
                    "end_cmp",
                    "A_cmp",
                    "B_cmp",
                    "big_cmp",
                    "small_cmp",
                    "equal_cmp",
                    "w",
                ]
            }
            GadgetKind::Smallest => vec!["start_sm", "end_sm", "smallest", "w"],
            GadgetKind::Biggest => vec!["start_big", "end_big", "biggest", "w"],
            GadgetKind::HardyForward => vec!["w", "#", "succ"],
            GadgetKind::HardyBackward => vec!["w", "#"],
        }
    }

    pub(crate) fn is_hardy(self) -> bool {
        matches!(self, GadgetKind::HardyForward | GadgetKind::HardyBackward)
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GadgetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        GadgetKind::ALL
            .into_iter()
            .find(|k| k.name() == norm || k.name().replace('-', "") == norm)
            .ok_or_else(|| format!("unknown gadget kind '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("ℓ = {0} is above the supported maximum {MAX_L}")]
    TooWide(u64),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("no applicable instance of rule {rule} at {config}")]
    Stuck { rule: String, config: String },
    #[error("{0} is not reachable by rewriting")]
    NotReachable(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A built gadget: the machine plus, per rule, its concrete variants.
#[derive(Clone, Debug)]
pub struct Gadget {
    kind: GadgetKind,
    params: EncodingParams,
    nrcs: Nrcs,
    registry: BTreeMap<String, Vec<Vec<usize>>>,
}

/// A run as `(transition index, anchor)` steps.
pub type Run = Vec<(usize, NodePath)>;

impl Gadget {
    pub fn build(kind: GadgetKind, params: EncodingParams) -> Result<Gadget, GadgetError> {
        if params.l() > MAX_L {
            return Err(GadgetError::TooWide(params.l()));
        }
        let mut b = Builder::new(params.k(), params.l() as u32);
        let root = Scope::root();
        match kind {
            GadgetKind::Copy => machines::copy(&mut b, &root, &machines::w()),
            GadgetKind::Comparator => machines::cmp(&mut b, &root, &[], &[]),
            GadgetKind::Smallest => machines::smallest(&mut b, &root),
            GadgetKind::Biggest => machines::biggest(&mut b, &root),
            GadgetKind::HardyForward => machines::hardy_forward(&mut b),
            GadgetKind::HardyBackward => machines::hardy_backward(&mut b),
        }
        let a = b.assemble();
        Ok(Gadget {
            kind,
            params,
            nrcs: a.nrcs,
            registry: a.registry,
        })
    }

    pub fn kind(&self) -> GadgetKind {
        self.kind
    }

    pub fn params(&self) -> EncodingParams {
        self.params
    }

    pub fn nrcs(&self) -> &Nrcs {
        &self.nrcs
    }

    /// Rule keys with the transition indices of each concrete variant.
    pub fn rules(&self) -> &BTreeMap<String, Vec<Vec<usize>>> {
        &self.registry
    }

    fn check_input(&self, input: &Config) -> Result<(), GadgetError> {
        let (start, _) = self.kind.start_end();
        if input.label() != &Label::new(start) {
            return Err(GadgetError::Malformed(format!(
                "root of {input} is not {start}"
            )));
        }
        if input.height() > self.params.k() {
            return Err(GadgetError::Malformed(format!(
                "{input} is higher than k = {}",
                self.params.k()
            )));
        }
        let markers: &[(&str, usize)] = match self.kind {
            GadgetKind::Copy => &[("mrkd", 1)],
            GadgetKind::Comparator => &[("A_cmp", 1), ("B_cmp", 1)],
            _ => &[],
        };
        for (m, n) in markers {
            let found = input
                .children()
                .iter()
                .filter(|c| c.label().name() == *m)
                .count();
            if found != *n {
                return Err(GadgetError::Malformed(format!(
                    "{input} has {found} children labelled {m}"
                )));
            }
        }
        // Every compared or marked subtree must be an encoder below its root.
        for c in input.children() {
            if c.label().name() == "#" {
                continue;
            }
            check_encoder_subtree(c, 1, self.params.k()).map_err(GadgetError::Malformed)?;
        }
        Ok(())
    }

    fn hardy_state(&self, c: &Config) -> Result<HardyState, GadgetError> {
        let s = decode_hardy_config(c, &self.params)
            .map_err(|e| GadgetError::Malformed(e.to_string()))?;
        let clean = make_hardy_config(s.alpha(), s.n() as usize, &self.params)
            .map_err(|e| GadgetError::Malformed(e.to_string()))?;
        if clean != *c {
            return Err(GadgetError::Malformed(format!(
                "{c} is not of the form C_(α,n)"
            )));
        }
        Ok(s)
    }

    /// The intended run on `input`. For the encoder gadgets it ends in the
    /// perfect output; for the forward Hardy machine it rewrites until `α = 0`
    /// (or until no `#` is left for a limit step); for the backward machine
    /// use [`Gadget::backward_run`].
    pub fn synthesize_perfect_run(&self, input: &Config) -> Result<Run, GadgetError> {
        if self.kind == GadgetKind::HardyBackward {
            return Err(GadgetError::Malformed(
                "the backward machine needs a target, see backward_run".into(),
            ));
        }
        if self.kind.is_hardy() {
            let mut s = self.hardy_state(input)?;
            let mut p = Planner::new(&self.nrcs, &self.registry, input.clone());
            let mut steps = 0;
            while !s.alpha().is_zero() {
                if s.alpha().is_limit() && s.n() == 0 {
                    break;
                }
                steps += 1;
                if steps > MAX_HARDY_STEPS {
                    return Err(GadgetError::Internal("rewriting chain too long".into()));
                }
                p.forward_step(&s)?;
                s = crate::encoding::hardy_rewrite(&s)
                    .map_err(|e| GadgetError::Internal(e.to_string()))?;
                let want = make_hardy_config(s.alpha(), s.n() as usize, &self.params)
                    .map_err(|e| GadgetError::Internal(e.to_string()))?;
                if p.cfg != want {
                    return Err(GadgetError::Internal(format!(
                        "reached {} instead of {want}",
                        p.cfg
                    )));
                }
            }
            return Ok(p.run);
        }
        self.check_input(input)?;
        let mut p = Planner::new(&self.nrcs, &self.registry, input.clone());
        let root = Scope::root();
        match self.kind {
            GadgetKind::Copy => p.copy(&root)?,
            GadgetKind::Comparator => p.cmp(&root, &[], &[])?,
            GadgetKind::Smallest => p.smallest(&root)?,
            GadgetKind::Biggest => p.biggest(&root)?,
            _ => unreachable!(),
        }
        Ok(p.run)
    }

    /// A run of the backward machine from `input = C_{α,n}` to
    /// `target = C_{α',n'}`, given `(α',n') →*_H (α,n)`.
    pub fn backward_run(&self, input: &Config, target: &Config) -> Result<Run, GadgetError> {
        if self.kind != GadgetKind::HardyBackward {
            return Err(GadgetError::Malformed(format!(
                "{} is not the backward machine",
                self.kind
            )));
        }
        let from = self.hardy_state(input)?;
        let to = self.hardy_state(target)?;
        let chain = hardy_chain(&to, &from, MAX_HARDY_STEPS)
            .ok_or_else(|| GadgetError::NotReachable(format!("{from} from {to}")))?;
        let mut p = Planner::new(&self.nrcs, &self.registry, input.clone());
        for pair in chain.windows(2).rev() {
            p.backward_step(&pair[0], &pair[1])?;
            let want = make_hardy_config(pair[0].alpha(), pair[0].n() as usize, &self.params)
                .map_err(|e| GadgetError::Internal(e.to_string()))?;
            if p.cfg != want {
                return Err(GadgetError::Internal(format!(
                    "reached {} instead of {want}",
                    p.cfg
                )));
            }
        }
        Ok(p.run)
    }

    /// Explores every run from `input`, keeping at most `frontier_cap`
    /// distinct configurations, and judges each finished configuration.
    pub fn check_soundness_by_search(
        &self,
        input: &Config,
        frontier_cap: usize,
    ) -> Result<SoundnessReport, GadgetError> {
        if self.kind.is_hardy() {
            self.hardy_state(input)?;
        } else {
            self.check_input(input)?;
        }
        Ok(check::soundness_search(
            &self.nrcs,
            self.kind,
            input,
            &self.params,
            frontier_cap,
        ))
    }
}

/// The subtrees `T'_β` hanging below a node at `depth`, as sorted forests
/// with at most `budget` nodes in total.
fn forests(depth: usize, p: &EncodingParams, budget: usize) -> Vec<Vec<Config>> {
    let trees = trees(depth, p, budget);
    let mut out = vec![Vec::new()];
    // Pick trees in non-decreasing index order so each multiset appears once.
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while let Some((picked, used)) = stack.pop() {
        let from = picked.last().copied().unwrap_or(0);
        for (i, (_, size)) in trees.iter().enumerate().skip(from) {
            if used + size > budget {
                continue;
            }
            let mut next = picked.clone();
            next.push(i);
            let mut f: Vec<Config> = next.iter().map(|&j| trees[j].0.clone()).collect();
            f.sort();
            out.push(f);
            stack.push((next, used + size));
        }
    }
    out
}

fn trees(depth: usize, p: &EncodingParams, budget: usize) -> Vec<(Config, usize)> {
    if budget == 0 {
        return Vec::new();
    }
    if depth == p.k() {
        return (0..=p.l() as u32)
            .map(|i| (Config::leaf(Label::annotated("w", i)), 1))
            .collect();
    }
    forests(depth + 1, p, budget - 1)
        .into_iter()
        .map(|f| {
            let size = 1 + f.iter().map(Config::size).sum::<usize>();
            (Config::new(Label::new("w"), f), size)
        })
        .collect()
}

/// Every input of gadget `kind` whose underlying encoder `T_α` has at most
/// `max_nodes` nodes: one per choice of marked children. Hardy kinds get
/// `C_{α,n}` for `n ∈ {1, 2}`; at `n = 0` a lossy successor step can raise
/// the Hardy value (see the tests).
pub fn encoder_inputs(kind: GadgetKind, p: &EncodingParams, max_nodes: usize) -> Vec<Config> {
    let mut out = Vec::new();
    for kids in forests(1, p, max_nodes.saturating_sub(1)) {
        if kids.is_empty() && !kind.is_hardy() {
            continue;
        }
        let alpha = if kids.is_empty() {
            crate::ordinal::Ordinal::zero()
        } else {
            match crate::encoding::decode_tree(&Config::new(Label::new("w"), kids.clone()), p) {
                Ok(a) if p.check(&a).is_ok() => a,
                _ => continue,
            }
        };
        let relabel = |i: usize, name: &str| {
            let mut v = kids.clone();
            v[i] = Config::new(v[i].label().renamed(name), v[i].children().to_vec());
            v
        };
        let (start, _) = kind.start_end();
        match kind {
            GadgetKind::Smallest | GadgetKind::Biggest => {
                out.push(Config::new(Label::new(start), kids.clone()))
            }
            GadgetKind::Copy => {
                for i in 0..kids.len() {
                    if i == 0 || kids[i] != kids[i - 1] {
                        out.push(Config::new(Label::new(start), relabel(i, "mrkd")));
                    }
                }
            }
            GadgetKind::Comparator => {
                for i in 0..kids.len() {
                    for j in 0..kids.len() {
                        if i != j {
                            let mut v = relabel(i, "A_cmp");
                            v[j] = Config::new(
                                v[j].label().renamed("B_cmp"),
                                v[j].children().to_vec(),
                            );
                            out.push(Config::new(Label::new(start), v));
                        }
                    }
                }
            }
            GadgetKind::HardyForward | GadgetKind::HardyBackward => {
                for n in 1..=2 {
                    out.push(make_hardy_config(&alpha, n, p).expect("checked against the bound"));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn check_encoder_subtree(c: &Config, depth: usize, k: usize) -> Result<(), String> {
    if depth > 1 && c.label().name() != "w" {
        return Err(format!("inner node {} is not labelled w", c.label()));
    }
    if depth == k {
        if c.label().annotation().is_none() || !c.children().is_empty() {
            return Err(format!(
                "level-{k} node {c} must be a leaf of the form name@wi"
            ));
        }
        return Ok(());
    }
    if c.label().annotation().is_some() {
        return Err(format!("annotated node {} above level {k}", c.label()));
    }
    c.children()
        .iter()
        .try_for_each(|x| check_encoder_subtree(x, depth + 1, k))
}

#[cfg(test)]
mod tests;
