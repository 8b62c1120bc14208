//! Validators for the encoder predicates and the bounded soundness search.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::plan::exponent;
use super::GadgetKind;
use crate::encoding::{decode_hardy_pair, hardy_config_unchecked, EncodingParams, OMEGA};
use crate::nrcs::{leq_induced, Config, Label, Nrcs};
use crate::ordinal::{hardy_eval, ControlFunction, Ordinal};

/// Step budget for the Hardy evaluations behind the H-bound check.
const HARDY_BUDGET: u64 = 1 << 20;

/// Expands every `name@wi` at depth `k` into a node `name` with `i` leaf
/// `w` children, so that deleting nodes below level `k` is visible to `≤_is`.
fn uncompress(c: &Config, depth: usize, k: usize) -> Config {
    if depth == k {
        let i = c.label().annotation().unwrap_or(0) as usize;
        let leaves = vec![Config::leaf(Label::new(OMEGA)); i];
        return Config::new(c.label().with_annotation(None), leaves);
    }
    Config::new(
        c.label().clone(),
        c.children()
            .iter()
            .map(|x| uncompress(x, depth + 1, k))
            .collect(),
    )
}

/// A root child with its marker replaced by `w`, uncompressed.
fn plain(c: &Config, k: usize) -> Config {
    let relabelled = Config::new(c.label().renamed(OMEGA), c.children().to_vec());
    uncompress(&relabelled, 1, k)
}

fn forest(kids: &[&Config], k: usize) -> Config {
    Config::new(
        Label::new(OMEGA),
        kids.iter().map(|c| plain(c, k)).collect(),
    )
}

fn split<'a>(c: &'a Config, active: &[&str]) -> (Vec<&'a Config>, Vec<&'a Config>) {
    c.children()
        .iter()
        .partition(|x| active.contains(&x.label().name()))
}

/// How strictly an output is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    /// Nodes under the compared or marked children may have been dropped.
    Lossy,
    /// No node may have been dropped.
    Perfect,
}

/// Why `candidate` is not a valid output of gadget `kind` on `reference`,
/// or `None` if it is. Hardy kinds are judged by the H-bound.
pub fn encoder_violation(
    kind: GadgetKind,
    reference: &Config,
    candidate: &Config,
    p: &EncodingParams,
    strictness: Strictness,
) -> Option<String> {
    let k = p.k();
    let perfect = strictness == Strictness::Perfect;
    let root = |c: &Config, want: &str| -> Result<(), String> {
        if c.label().name() != want || c.label().annotation().is_some() {
            return Err(format!("root is {} instead of {want}", c.label()));
        }
        Ok(())
    };
    let check = || -> Result<(), String> {
        match kind {
            GadgetKind::Smallest | GadgetKind::Biggest => {
                let (start, end, marker) = match kind {
                    GadgetKind::Smallest => ("start_sm", "end_sm", "smallest"),
                    _ => ("start_big", "end_big", "biggest"),
                };
                root(reference, start)?;
                root(candidate, end)?;
                let (ref_act, ref_pass) = split(reference, &[OMEGA]);
                let (act, pass) = split(candidate, &[OMEGA, marker]);
                if pass != ref_pass {
                    return Err("children outside the ω-labelled ones changed".into());
                }
                let marked: Vec<&&Config> =
                    act.iter().filter(|c| c.label().name() == marker).collect();
                if marked.len() != 1 {
                    return Err(format!("{} children labelled {marker}", marked.len()));
                }
                let best = exponent(marked[0], 1, k);
                for c in &act {
                    let e = exponent(c, 1, k);
                    let ok = if kind == GadgetKind::Smallest {
                        best <= e
                    } else {
                        best >= e
                    };
                    if !ok {
                        return Err(format!("{marker} child ω^{best} against sibling ω^{e}"));
                    }
                }
                same_or_smaller(&forest(&act, k), &forest(&ref_act, k), perfect)
            }
            GadgetKind::Copy => {
                root(reference, "start_copy")?;
                root(candidate, "end_copy")?;
                let (marked, ref_pass) = split(reference, &["mrkd"]);
                let [v] = marked[..] else {
                    return Err(format!("{} children labelled mrkd", marked.len()));
                };
                let (cpd, rest) = split(candidate, &["cpd"]);
                let [cpd] = cpd[..] else {
                    return Err(format!("{} children labelled cpd", cpd.len()));
                };
                // Whatever `rest` holds beyond the untouched children is the original.
                let mut left: Vec<&Config> = rest.clone();
                for c in &ref_pass {
                    let Some(i) = left.iter().position(|x| x == c) else {
                        return Err(format!("untouched child {c} is missing"));
                    };
                    left.remove(i);
                }
                let [orig] = left[..] else {
                    return Err(format!(
                        "{} children besides the untouched ones",
                        left.len()
                    ));
                };
                if orig.label().name() != OMEGA {
                    return Err(format!("original relabelled {} instead of w", orig.label()));
                }
                same_or_smaller(&forest(&[cpd], k), &forest(&[v], k), perfect)?;
                same_or_smaller(&forest(&[orig], k), &forest(&[cpd], k), perfect)
            }
            GadgetKind::Comparator => {
                root(reference, "start_cmp")?;
                root(candidate, "end_cmp")?;
                let (ab, ref_pass) = split(reference, &["A_cmp", "B_cmp"]);
                if ab.len() != 2 || ab[0].label().name() == ab[1].label().name() {
                    return Err("reference lacks one A_cmp and one B_cmp child".into());
                }
                let (xy, pass) = split(candidate, &["big_cmp", "small_cmp", "equal_cmp"]);
                if pass != ref_pass {
                    return Err("children other than the compared ones changed".into());
                }
                let [x, y] = xy[..] else {
                    return Err(format!("{} compared children", xy.len()));
                };
                let (ex, ey) = (exponent(x, 1, k), exponent(y, 1, k));
                let want = |a: &Ordinal, b: &Ordinal| match a.cmp(b) {
                    std::cmp::Ordering::Less => "small_cmp",
                    std::cmp::Ordering::Greater => "big_cmp",
                    std::cmp::Ordering::Equal => "equal_cmp",
                };
                if x.label().name() != want(&ex, &ey) || y.label().name() != want(&ey, &ex) {
                    return Err(format!(
                        "ω^{ex} labelled {} and ω^{ey} labelled {}",
                        x.label(),
                        y.label()
                    ));
                }
                let ok = |p: &Config, q: &Config, a: &Config, b: &Config| {
                    same_or_smaller(&forest(&[p], k), &forest(&[a], k), perfect).is_ok()
                        && same_or_smaller(&forest(&[q], k), &forest(&[b], k), perfect).is_ok()
                };
                if ok(x, y, ab[0], ab[1]) || ok(y, x, ab[0], ab[1]) {
                    Ok(())
                } else {
                    Err("compared children do not embed into the originals".into())
                }
            }
            GadgetKind::HardyForward | GadgetKind::HardyBackward => {
                hardy_violation(reference, candidate, p)
            }
        }
    };
    check().err()
}

fn same_or_smaller(c: &Config, d: &Config, perfect: bool) -> Result<(), String> {
    let ok = if perfect { c == d } else { leq_induced(c, d) };
    if ok {
        Ok(())
    } else if perfect {
        Err(format!("{c} differs from {d}"))
    } else {
        Err(format!("{c} does not embed into {d}"))
    }
}

/// `true` iff `candidate` is a valid output (lossy, or perfect when asked).
pub fn validate_encoder(
    kind: GadgetKind,
    reference: &Config,
    candidate: &Config,
    p: &EncodingParams,
    strictness: Strictness,
) -> bool {
    encoder_violation(kind, reference, candidate, p, strictness).is_none()
}

/// `(α, n)` of a configuration of the form `C_{α,n}`, `α` unbounded, with
/// `H^α(n)` when it is within the evaluation budget.
fn hardy_value(c: &Config, p: &EncodingParams) -> Result<(Ordinal, Option<u64>), String> {
    let (alpha, n) = decode_hardy_pair(c, p).map_err(|e| format!("{c} does not decode: {e}"))?;
    if hardy_config_unchecked(&alpha, n as usize, p.k()) != *c {
        return Err(format!("{c} is not of the form C_(α,n)"));
    }
    let h = hardy_eval::<u64>(&ControlFunction::succ(), &alpha, n, HARDY_BUDGET).ok();
    Ok((alpha, h))
}

/// `H^{α'}(n') ≤ H^α(n)` for a candidate `C_{α',n'}` reached from `C_{α,n}`.
/// Values beyond the evaluation budget are not judged.
fn hardy_violation(
    reference: &Config,
    candidate: &Config,
    p: &EncodingParams,
) -> Result<(), String> {
    if candidate.label().name() != OMEGA {
        return Err(format!("root is {}", candidate.label()));
    }
    match (hardy_value(reference, p)?.1, hardy_value(candidate, p)?.1) {
        (Some(a), Some(b)) if b > a => Err(format!("H-value {b} exceeds the input's {a}")),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub config: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    /// Distinct configurations reached.
    pub visited: usize,
    /// Terminal configurations judged.
    pub terminals: usize,
    pub violations: Vec<Violation>,
    /// Hardy terminals `C_{α',n'}` with `α'` above `(Ω_{k+1})_ℓ`. They are
    /// judged by the H-bound like any other terminal.
    pub beyond_bound: usize,
    /// The frontier cap stopped the search before it was exhaustive.
    pub cutoff: bool,
}

fn terminal_root(kind: GadgetKind) -> &'static str {
    match kind {
        GadgetKind::Copy => "end_copy",
        GadgetKind::Comparator => "end_cmp",
        GadgetKind::Smallest => "end_sm",
        GadgetKind::Biggest => "end_big",
        GadgetKind::HardyForward | GadgetKind::HardyBackward => OMEGA,
    }
}

/// Breadth-first search from `input` over distinct canonical configurations,
/// judging every terminal one. At most `frontier_cap` configurations are kept.
pub(crate) fn soundness_search(
    nrcs: &Nrcs,
    kind: GadgetKind,
    input: &Config,
    p: &EncodingParams,
    frontier_cap: usize,
) -> SoundnessReport {
    let end = terminal_root(kind);
    let mut seen: HashSet<Config> = HashSet::from([input.clone()]);
    let mut queue = VecDeque::from([input.clone()]);
    let mut report = SoundnessReport {
        visited: 1,
        terminals: 0,
        violations: Vec::new(),
        beyond_bound: 0,
        cutoff: false,
    };
    while let Some(x) = queue.pop_front() {
        if x.label().name() == end && x.label().annotation().is_none() {
            report.terminals += 1;
            if kind.is_hardy() {
                if let Ok((a, _)) = hardy_value(&x, p) {
                    report.beyond_bound += usize::from(p.check(&a).is_err());
                }
            }
            if let Some(reason) = encoder_violation(kind, input, &x, p, Strictness::Lossy) {
                report.violations.push(Violation {
                    config: x.to_string(),
                    reason,
                });
            }
        }
        for (_, _, y) in nrcs.successors(&x) {
            if seen.contains(&y) {
                continue;
            }
            if seen.len() >= frontier_cap {
                report.cutoff = true;
                report.visited = seen.len();
                return report;
            }
            seen.insert(y.clone());
            queue.push_back(y);
        }
    }
    report.visited = seen.len();
    report
}
