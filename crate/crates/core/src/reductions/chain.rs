//! The Hardy-bounded chaining: forward Hardy machine, budgeted Minsky
//! simulation, backward Hardy machine, glued by two bridging updates.

use serde::Serialize;

use super::{minsky_to_budget_nrcs, MinskyMachine, ReductionError, ZeroTest};
use crate::encoding::{make_hardy_config, EncodingParams, BUDGET, OMEGA};
use crate::gadgets::{Gadget, GadgetKind};
use crate::nrcs::{Config, Label, Nrcs, Transition};

/// Leaf added to the root by the bridge out of the simulation. The target
/// asks for it, so covering the target needs a visit to `q_f`.
pub const DONE: &str = "done";

/// Which piece a transition of the chained machine comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Forward,
    Simulation,
    Backward,
    BridgeIn,
    BridgeOut,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub k: usize,
    pub ell: u64,
    /// `α = (Ω_{k+1})_ℓ`, the ordinal of both `init` and `target`.
    pub alpha: String,
    /// Number of `#` children of `init` and `target`.
    pub budget: u64,
    pub q_init: String,
    pub q_f: String,
    /// The state the simulation must reach, after normalization.
    pub final_state: String,
    /// Transitions and zero-tests added so that the final state is reached
    /// only with every counter at zero.
    pub normalization: Vec<String>,
    pub forward_prefix: String,
    pub simulation_prefix: String,
    pub backward_prefix: String,
    pub bridges: Vec<String>,
    /// `origins[i]` is the piece transition `i` comes from.
    pub origins: Vec<Origin>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionInstance {
    pub nrcs: Nrcs,
    pub init: Config,
    pub target: Config,
    pub provenance: Provenance,
}

const FWD: &str = "f:";
const SIM: &str = "m:";
const BWD: &str = "b:";

/// `w` and `#` are shared by every piece, any other name gets `prefix`.
fn prefixed(l: &Label, prefix: &str) -> Label {
    if l.name() == OMEGA || l.name() == BUDGET {
        l.clone()
    } else {
        l.renamed(&format!("{prefix}{}", l.name()))
    }
}

fn relabel(t: &Transition, prefix: &str) -> Transition {
    let p = |v: &[Label]| v.iter().map(|l| prefixed(l, prefix)).collect();
    match t {
        Transition::Update { src, dst } => Transition::Update {
            src: p(src),
            dst: p(dst),
        },
        Transition::Reset { src, reset, dst } => Transition::Reset {
            src: p(src),
            reset: prefixed(reset, prefix),
            dst: p(dst),
        },
    }
}

/// Makes `q_f` reachable only with every counter at zero: a fresh state
/// `q_f.drain` entered from `q_f` decrements any counter, then zero-tests
/// every counter in turn, ending in the returned final state.
pub fn normalize_final(
    m: &MinskyMachine,
    q_f: &Label,
) -> Result<(MinskyMachine, Label, Vec<String>), ReductionError> {
    if !m.has_state(q_f) {
        return Err(ReductionError::UnknownState(q_f.to_string()));
    }
    let fresh = |tag: &str| {
        let mut name = format!("{}.{tag}", q_f.name());
        while m.has_state(&Label::new(&name)) {
            name.push('\'');
        }
        Label::new(&name)
    };
    let counters = m.counters();
    let drain = fresh("drain");
    let mut chain = vec![drain.clone()];
    chain.extend((1..counters.len()).map(|i| fresh(&format!("z{i}"))));
    let fin = fresh("final");
    chain.push(fin.clone());
    let mut updates = m.updates().to_vec();
    let mut tests = m.zero_tests().to_vec();
    let mut added: Vec<String> = Vec::new();
    let mut add_update = |t: Transition, updates: &mut Vec<Transition>| {
        added.push(t.to_string());
        updates.push(t);
    };
    add_update(
        Transition::Update {
            src: vec![q_f.clone()],
            dst: vec![drain.clone()],
        },
        &mut updates,
    );
    for p in &counters {
        add_update(
            Transition::Update {
                src: vec![drain.clone(), p.clone()],
                dst: vec![drain.clone()],
            },
            &mut updates,
        );
    }
    if counters.is_empty() {
        add_update(
            Transition::Update {
                src: vec![drain.clone()],
                dst: vec![fin.clone()],
            },
            &mut updates,
        );
    }
    for (i, p) in counters.iter().enumerate() {
        let z = ZeroTest {
            from: chain[i].clone(),
            tested: p.clone(),
            to: chain[i + 1].clone(),
        };
        added.push(z.to_string());
        tests.push(z);
    }
    let mut states = m.states().to_vec();
    states.extend(chain.iter().cloned());
    Ok((MinskyMachine::new(states, updates, tests)?, fin, added))
}

/// The k-NRCS that covers `target` from `init` iff `q_f` is coverable from
/// `q_init` in `m` along runs whose total counter value stays within
/// `H^α(ℓ)`, for `α = (Ω_{k+1})_ℓ`.
///
/// `init` is `C_{α,ℓ}` and `target` is `C_{α,ℓ}` plus a [`DONE`] leaf. The
/// pieces get disjoint label prefixes and share only `w` and `#`.
pub fn build_bounded_reduction(
    m: &MinskyMachine,
    k: usize,
    ell: u64,
    q_init: &Label,
    q_f: &Label,
) -> Result<ReductionInstance, ReductionError> {
    if !m.has_state(q_init) {
        return Err(ReductionError::UnknownState(q_init.to_string()));
    }
    let p = EncodingParams::new(k, ell)?;
    let (normal, fin, normalization) = normalize_final(m, q_f)?;
    let fwd = Gadget::build(GadgetKind::HardyForward, p)?;
    let bwd = Gadget::build(GadgetKind::HardyBackward, p)?;
    let sim = minsky_to_budget_nrcs(&normal);

    let mut ts: Vec<Transition> = Vec::new();
    let mut origins = Vec::new();
    let mut push = |t: Transition, o: Origin, ts: &mut Vec<Transition>| {
        ts.push(t);
        origins.push(o);
    };
    for t in fwd.nrcs().transitions() {
        push(relabel(t, FWD), Origin::Forward, &mut ts);
    }
    let sim_init = prefixed(q_init, SIM);
    let sim_fin = prefixed(&fin, SIM);
    let bridge_in = Transition::Update {
        src: vec![Label::new(OMEGA)],
        dst: vec![sim_init],
    };
    let bridge_out = Transition::Update {
        src: vec![sim_fin],
        dst: vec![Label::new(OMEGA), Label::new(DONE)],
    };
    push(bridge_in.clone(), Origin::BridgeIn, &mut ts);
    for t in sim.nrcs.transitions() {
        push(relabel(t, SIM), Origin::Simulation, &mut ts);
    }
    push(bridge_out.clone(), Origin::BridgeOut, &mut ts);
    for t in bwd.nrcs().transitions() {
        push(relabel(t, BWD), Origin::Backward, &mut ts);
    }

    let mut states: Vec<Label> = fwd
        .nrcs()
        .states()
        .iter()
        .map(|l| prefixed(l, FWD))
        .collect();
    states.extend(sim.nrcs.states().iter().map(|l| prefixed(l, SIM)));
    states.extend(bwd.nrcs().states().iter().map(|l| prefixed(l, BWD)));
    states.push(Label::new(DONE));
    let nrcs = Nrcs::new(k, states, ts)?;

    let alpha = p.bound();
    let init = make_hardy_config(&alpha, ell as usize, &p)?;
    let mut kids = init.children().to_vec();
    kids.push(Config::leaf(Label::new(DONE)));
    let target = Config::new(init.label().clone(), kids);
    let provenance = Provenance {
        k,
        ell,
        alpha: alpha.to_string(),
        budget: ell,
        q_init: q_init.to_string(),
        q_f: q_f.to_string(),
        final_state: fin.to_string(),
        normalization,
        forward_prefix: FWD.into(),
        simulation_prefix: SIM.into(),
        backward_prefix: BWD.into(),
        bridges: vec![bridge_in.to_string(), bridge_out.to_string()],
        origins,
    };
    Ok(ReductionInstance {
        nrcs,
        init,
        target,
        provenance,
    })
}
