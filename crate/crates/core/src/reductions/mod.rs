//! Minsky machines with zero-tests, their budgeted translation into 1-NRCS,
//! the simple-coverability wrappers and the chained lower-bound instance.
//!
//! A Minsky configuration is a height-1 tree: the root holds the control
//! state and the number of `p`-children is the value of counter `p`.

mod chain;
mod simple;
#[cfg(test)]
mod tests;

pub use chain::{
    build_bounded_reduction, normalize_final, Origin, Provenance, ReductionInstance, DONE,
};
pub use simple::{compose_simple, simple_coverability_wrappers, SimpleInstance, Wrappers};

use std::collections::BTreeSet;
use std::fmt;

use crate::coverability::Step;
use crate::encoding::EncodingError;
use crate::encoding::BUDGET;
use crate::gadgets::GadgetError;
use crate::nrcs::{
    parse_label, parse_nrcs_with, Config, Label, Nrcs, NrcsError, StepError, TextError, Transition,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReductionError {
    #[error(transparent)]
    Machine(#[from] NrcsError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("Minsky machines have zero-tests, not resets")]
    ResetInMinsky,
    #[error("'{0}' is not a state of the machine")]
    UnknownState(String),
    #[error("the budget label '#' cannot be a Minsky state")]
    BudgetState,
    #[error("{0}")]
    Invalid(String),
}

/// `p0 -[z,p]-> q0`: fires from a root `p0` without `p`-children and relabels
/// the root `q0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZeroTest {
    pub from: Label,
    pub tested: Label,
    pub to: Label,
}

impl fmt::Display for ZeroTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zerotest {} [{}] -> {}", self.from, self.tested, self.to)
    }
}

/// `(Q, δ_u, δ_z)`: a 1-NCS with zero-tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinskyMachine {
    updates: Nrcs,
    zero_tests: Vec<ZeroTest>,
}

/// A move of a Minsky machine, by index into its updates or zero-tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MinskyMove {
    Update(usize),
    ZeroTest(usize),
}

impl MinskyMachine {
    pub fn new(
        states: Vec<Label>,
        updates: Vec<Transition>,
        zero_tests: Vec<ZeroTest>,
    ) -> Result<Self, ReductionError> {
        if updates.iter().any(Transition::is_reset) {
            return Err(ReductionError::ResetInMinsky);
        }
        if states.iter().any(|l| l.name() == BUDGET) {
            return Err(ReductionError::BudgetState);
        }
        let updates = Nrcs::new(1, states, updates)?;
        for z in &zero_tests {
            for l in [&z.from, &z.tested, &z.to] {
                if !updates.has_state(l) {
                    return Err(ReductionError::UnknownState(l.to_string()));
                }
            }
        }
        Ok(MinskyMachine {
            updates,
            zero_tests,
        })
    }

    pub fn states(&self) -> &[Label] {
        self.updates.states()
    }

    pub fn updates(&self) -> &[Transition] {
        self.updates.transitions()
    }

    pub fn zero_tests(&self) -> &[ZeroTest] {
        &self.zero_tests
    }

    pub fn has_state(&self, l: &Label) -> bool {
        self.updates.has_state(l)
    }

    /// Labels some update can put below the root, i.e. the counters.
    pub fn counters(&self) -> Vec<Label> {
        let set: BTreeSet<Label> = self
            .updates()
            .iter()
            .filter_map(|t| t.dst().get(1).cloned())
            .collect();
        set.into_iter().collect()
    }

    pub fn moves(&self) -> impl Iterator<Item = MinskyMove> {
        let u = (0..self.updates().len()).map(MinskyMove::Update);
        u.chain((0..self.zero_tests.len()).map(MinskyMove::ZeroTest))
    }

    /// Every `(move, successor)` pair of `c`.
    pub fn successors(&self, c: &Config) -> Vec<(MinskyMove, Config)> {
        self.moves()
            .flat_map(|m| minsky_step(self, c, m).into_iter().map(move |d| (m, d)))
            .collect()
    }
}

/// The successors of `c` under one move. An update yields one successor per
/// matching anchor, a zero-test at most one.
pub fn minsky_step(m: &MinskyMachine, c: &Config, mv: MinskyMove) -> Vec<Config> {
    match mv {
        MinskyMove::Update(i) => {
            let Some(t) = m.updates().get(i) else {
                return Vec::new();
            };
            let mut out: Vec<Config> = c
                .matching_paths(t.src())
                .into_iter()
                .filter_map(|a| m.updates.apply_at(c, i, &a).ok())
                .collect();
            out.sort();
            out.dedup();
            out
        }
        MinskyMove::ZeroTest(i) => {
            let Some(z) = m.zero_tests.get(i) else {
                return Vec::new();
            };
            if *c.label() != z.from || c.count_children(&z.tested) > 0 {
                return Vec::new();
            }
            vec![Config::new(z.to.clone(), c.children().to_vec())]
        }
    }
}

/// A parsed `minsky k=1` file. `init` and `target` name the states `q_init`
/// and `q_f` when present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinskyFile {
    pub machine: MinskyMachine,
    pub init: Option<Label>,
    pub target: Option<Label>,
}

/// Parses the Minsky format: the NRCS format with header `minsky k=1`,
/// `zerotest p0 [p] -> q0` lines and no resets. `init` and `target` must be
/// single states.
pub fn parse_minsky(text: &str) -> Result<MinskyFile, ReductionError> {
    let mut tests = Vec::new();
    let mut extra = |kw: &str, rest: &str, line: usize| -> Result<bool, TextError> {
        if kw != "zerotest" {
            return Ok(false);
        }
        let bad = |m: &str| TextError::Line {
            line,
            message: m.to_string(),
        };
        let (a, b) = rest.split_once("->").ok_or_else(|| bad("expected '->'"))?;
        let (p0, p) = a.split_once('[').ok_or_else(|| bad("expected '[label]'"))?;
        let p = p
            .trim()
            .strip_suffix(']')
            .ok_or_else(|| bad("expected ']'"))?;
        let lab = |s: &str| parse_label(s.trim()).map_err(|e| bad(&e.to_string()));
        tests.push(ZeroTest {
            from: lab(p0)?,
            tested: lab(p)?,
            to: lab(b)?,
        });
        Ok(true)
    };
    let f = parse_nrcs_with(text, "minsky", &mut extra)?;
    if f.nrcs.k() != 1 {
        return Err(ReductionError::Invalid("Minsky machines have k=1".into()));
    }
    let single = |c: Option<Config>, what: &str| -> Result<Option<Label>, ReductionError> {
        match c {
            Some(c) if !c.children().is_empty() => Err(ReductionError::Invalid(format!(
                "{what} must be a single state"
            ))),
            c => Ok(c.map(|c| c.label().clone())),
        }
    };
    let machine = MinskyMachine::new(
        f.nrcs.states().to_vec(),
        f.nrcs.transitions().to_vec(),
        tests,
    )?;
    Ok(MinskyFile {
        machine,
        init: single(f.init, "init")?,
        target: single(f.target, "target")?,
    })
}

/// Renders in the format read by [`parse_minsky`].
pub fn render_minsky(m: &MinskyMachine, init: Option<&Label>, target: Option<&Label>) -> String {
    let mut s = String::from("minsky k=1\nstates");
    for l in m.states() {
        s.push(' ');
        s.push_str(&l.to_string());
    }
    s.push('\n');
    for t in m.updates() {
        s.push_str(&format!("{t}\n"));
    }
    for z in m.zero_tests() {
        s.push_str(&format!("{z}\n"));
    }
    if let Some(l) = init {
        s.push_str(&format!("init   {l}\n"));
    }
    if let Some(l) = target {
        s.push_str(&format!("target {l}\n"));
    }
    s
}

/// The budgeted 1-NRCS of a Minsky machine. Transition `i` of `nrcs` comes
/// from Minsky move `origin[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetMachine {
    pub nrcs: Nrcs,
    pub origin: Vec<MinskyMove>,
}

fn budget() -> Label {
    Label::new(BUDGET)
}

/// Increments consume a `#` child, decrements produce one and zero-tests
/// become resets of the tested label.
pub fn minsky_to_budget_nrcs(m: &MinskyMachine) -> BudgetMachine {
    let mut ts = Vec::new();
    let mut origin = Vec::new();
    for (i, t) in m.updates().iter().enumerate() {
        let (src, dst) = (t.src(), t.dst());
        let (src, dst) = match (src.len(), dst.len()) {
            (1, 2) => (vec![src[0].clone(), budget()], dst.to_vec()),
            (2, 1) => (src.to_vec(), vec![dst[0].clone(), budget()]),
            _ => (src.to_vec(), dst.to_vec()),
        };
        ts.push(Transition::Update { src, dst });
        origin.push(MinskyMove::Update(i));
    }
    for (i, z) in m.zero_tests().iter().enumerate() {
        ts.push(Transition::Reset {
            src: vec![z.from.clone()],
            reset: z.tested.clone(),
            dst: vec![z.to.clone()],
        });
        origin.push(MinskyMove::ZeroTest(i));
    }
    let mut states = m.states().to_vec();
    states.push(budget());
    let nrcs = Nrcs::new(1, states, ts).expect("budgeted transitions stay over Q ∪ {#}");
    BudgetMachine { nrcs, origin }
}

/// `(C, n)`: `C` with `n` extra `#` children.
pub fn with_budget(c: &Config, n: usize) -> Config {
    let mut kids = c.children().to_vec();
    kids.extend(std::iter::repeat_with(|| Config::leaf(budget())).take(n));
    Config::new(c.label().clone(), kids)
}

/// Splits `(C, n)` back into `C` and `n`.
pub fn split_budget(c: &Config) -> (Config, usize) {
    let (hash, rest): (Vec<Config>, Vec<Config>) = c
        .children()
        .iter()
        .cloned()
        .partition(|x| *x.label() == budget());
    (Config::new(c.label().clone(), rest), hash.len())
}

/// `true` iff every reset step of `run` from `init` removes no child.
pub fn honest_run_check(
    bm: &BudgetMachine,
    init: &Config,
    run: &[Step],
) -> Result<bool, StepError> {
    let trace = bm.nrcs.replay(init, run)?;
    Ok(run
        .iter()
        .zip(&trace)
        .all(|((t, anchor), before)| match &bm.nrcs.transitions()[*t] {
            Transition::Reset { reset, .. } => before
                .node(anchor)
                .is_some_and(|v| v.count_children(reset) == 0),
            Transition::Update { .. } => true,
        }))
}
