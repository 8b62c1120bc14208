//! Perfect-run planners. Each one follows its gadget's intended order of
//! events and resolves every guess in favour of the exact outcome.

use std::collections::BTreeMap;

use super::builder::{cat, pair, rep, Scope};
use super::machines::{backward_cmp, biggest_parts, cmp_height, cmp_parts, verify_cmp, Phase};
use super::GadgetError;
use crate::encoding::{hardy_rewrite, HardyState, OMEGA};
use crate::nrcs::{Config, Label, NodePath, Nrcs};
use crate::ordinal::Ordinal;

pub(crate) struct Planner<'a> {
    nrcs: &'a Nrcs,
    registry: &'a BTreeMap<String, Vec<Vec<usize>>>,
    k: usize,
    pub cfg: Config,
    pub run: Vec<(usize, NodePath)>,
}

/// The exponent `β` of the CNF term `ω^β` that the node at `depth` encodes.
pub(crate) fn exponent(node: &Config, depth: usize, k: usize) -> Ordinal {
    if depth == k {
        Ordinal::nat(node.label().annotation().unwrap_or(0) as u64)
    } else {
        value_below(node, depth, k)
    }
}

/// The ordinal encoded by the children of the node at `depth`.
pub(crate) fn value_below(node: &Config, depth: usize, k: usize) -> Ordinal {
    Ordinal::from_terms(
        node.children()
            .iter()
            .map(|c| (exponent(c, depth + 1, k), 1)),
    )
}

fn has_child(node: &Config, name: &str) -> bool {
    node.children().iter().any(|c| c.label().name() == name)
}

impl<'a> Planner<'a> {
    pub fn new(
        nrcs: &'a Nrcs,
        registry: &'a BTreeMap<String, Vec<Vec<usize>>>,
        init: Config,
    ) -> Self {
        Planner {
            nrcs,
            registry,
            k: nrcs.k(),
            cfg: init,
            run: Vec::new(),
        }
    }

    /// Fires the first variant of rule `key` having an anchor accepted by
    /// `pick`, followed by the rest of its chain.
    fn fire(
        &mut self,
        key: &str,
        pick: &dyn Fn(&Config, &[usize]) -> bool,
    ) -> Result<(), GadgetError> {
        let variants = self
            .registry
            .get(key)
            .ok_or_else(|| GadgetError::Internal(format!("no rule {key}")))?;
        for chain in variants {
            let first = &self.nrcs.transitions()[chain[0]];
            let Some(anchor) = self
                .cfg
                .matching_paths(first.src())
                .into_iter()
                .find(|a| pick(&self.cfg, a))
            else {
                continue;
            };
            let mut anchor = anchor;
            for (n, &t) in chain.iter().enumerate() {
                if n > 0 {
                    let src = self.nrcs.transitions()[t].src();
                    anchor = self
                        .cfg
                        .matching_paths(src)
                        .into_iter()
                        .next()
                        .ok_or_else(|| self.stuck(key))?;
                }
                self.cfg = self
                    .nrcs
                    .apply_at(&self.cfg, t, &anchor)
                    .map_err(|e| GadgetError::Internal(e.to_string()))?;
                self.run.push((t, anchor.clone()));
            }
            return Ok(());
        }
        Err(self.stuck(key))
    }

    fn stuck(&self, key: &str) -> GadgetError {
        GadgetError::Stuck {
            rule: key.to_string(),
            config: self.cfg.to_string(),
        }
    }

    fn any(&mut self, key: &str) -> Result<(), GadgetError> {
        self.fire(key, &|_, _| true)
    }

    /// The first node along a path labelled `labels`. A label without an
    /// annotation matches any annotation.
    fn node(&self, labels: &[Label]) -> Result<&Config, GadgetError> {
        fn fits(l: &Label, want: &Label) -> bool {
            let name = l.name();
            let tracked = name
                .strip_suffix(want.name())
                .is_some_and(|a| a.ends_with('+'));
            (name == want.name() || tracked)
                && (want.annotation().is_none() || l.annotation() == want.annotation())
        }
        fn find<'c>(c: &'c Config, labels: &[Label]) -> Option<&'c Config> {
            if !fits(c.label(), &labels[0]) {
                return None;
            }
            if labels.len() == 1 {
                return Some(c);
            }
            c.children().iter().find_map(|x| find(x, &labels[1..]))
        }
        find(&self.cfg, labels).ok_or_else(|| {
            let path: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            GadgetError::Stuck {
                rule: format!("locate {}", path.join(",")),
                config: self.cfg.to_string(),
            }
        })
    }

    /// Fires `key`, choosing the child of the depth-`d` root whose term has
    /// exponent `want`.
    fn fire_child(&mut self, key: &str, d: usize, want: &Ordinal) -> Result<(), GadgetError> {
        let k = self.k;
        let pick = |c: &Config, a: &[usize]| {
            a.len() > d && exponent(c.node(&a[..=d]).unwrap(), d + 1, k) == *want
        };
        self.fire(key, &pick)
    }

    fn child_exponents(&self, node: &Config, d: usize) -> Vec<Ordinal> {
        node.children()
            .iter()
            .filter(|c| c.label().name() == OMEGA)
            .map(|c| exponent(c, d + 1, self.k))
            .collect()
    }

    pub fn copy(&mut self, s: &Scope) -> Result<(), GadgetError> {
        let h = self.k - s.depth();
        let key = |n: &str| s.key(n);
        self.any(&key("c1"))?;
        if h == 1 {
            for n in ["c2", "c3", "c4"] {
                self.any(&key(n))?;
            }
            return Ok(());
        }
        self.any(&key("c2"))?;
        let mut j = 1;
        loop {
            if j == h {
                self.any(&key(&format!("up{h}")))?;
                self.any(&key(&format!("up'{h}")))?;
                j -= 1;
                continue;
            }
            let here = cat(&[
                &[s.lab(&format!("cp_{j}"))],
                &rep(&s.lab(&format!("mrkd_{j}")), j),
            ]);
            if has_child(self.node(&s.path(&here))?, OMEGA) {
                self.any(&key(&format!("ext{j}")))?;
                self.any(&key(&format!("ext'{j}")))?;
                j += 1;
            } else {
                self.any(&key(&format!("up{j}")))?;
                self.any(&key(&format!("up'{j}")))?;
                if j == 1 {
                    break;
                }
                j -= 1;
            }
        }
        let mark = s.lab("w'");
        let mut j = 1;
        loop {
            if j == h {
                self.any(&key(&format!("ru{h}")))?;
                j -= 1;
                continue;
            }
            let here = cat(&[
                &[s.lab(&format!("rs_{j}"))],
                &rep(&s.lab(&format!("rst_{j}")), j),
            ]);
            if has_child(self.node(&s.path(&here))?, mark.name()) {
                self.any(&key(&format!("rx{j}")))?;
                j += 1;
            } else {
                self.any(&key(&format!("ru{j}")))?;
                if j == 1 {
                    return Ok(());
                }
                j -= 1;
            }
        }
    }

    pub fn cmp(&mut self, s: &Scope, ra: &[Label], rb: &[Label]) -> Result<(), GadgetError> {
        let key = |n: &str| s.key(n);
        if cmp_height(self.k, s, ra) == 1 {
            for n in ["q1", "q2", "q3"] {
                self.any(&key(n))?;
            }
            return Ok(());
        }
        let p = cmp_parts(s, ra, rb);
        let (va, vb) = (s.lab("VA"), s.lab("VB"));
        let side = |state: &str, r: &[Label], v: &Label| {
            s.path(&cat(&[&[s.lab(state)], r, std::slice::from_ref(v)]))
        };
        self.any(&key("q1"))?;
        self.any(&key("q2"))?;
        let verdict = loop {
            let a_more = has_child(self.node(&side("loop", ra, &va))?, OMEGA);
            let b_more = has_child(self.node(&side("loop", rb, &vb))?, OMEGA);
            match (a_more, b_more) {
                (false, false) => {
                    self.any(&key("q21"))?;
                    self.any(&key("q22"))?;
                    break "eq";
                }
                (false, true) => {
                    self.any(&key("q21"))?;
                    self.any(&key("q23"))?;
                    break "lt";
                }
                (true, false) => {
                    self.any(&key("q24"))?;
                    self.any(&key("q25"))?;
                    break "gt";
                }
                (true, true) => {}
            }
            self.any(&key("q3"))?;
            self.biggest(&p.big_a)?;
            self.any(&key("q4"))?;
            self.copy(&p.copy_a)?;
            self.any(&key("q5"))?;
            self.any(&key("q6"))?;
            self.biggest(&p.big_b)?;
            self.any(&key("q7"))?;
            self.copy(&p.copy_b)?;
            self.any(&key("q8"))?;
            self.any(&key("q9"))?;
            self.any(&key("q10"))?;
            self.cmp(&p.cross, &p.cross_ra, &p.cross_rb)?;
            self.any(&key("q11"))?;
            self.verify(&p.check_a)?;
            self.any(&key("q12"))?;
            self.any(&key("q13"))?;
            self.verify(&p.check_b)?;
            self.any(&key("q14"))?;
            let at = self.node(&side("vd", ra, &va))?;
            if has_child(at, p.cross.lab("equal_cmp").name()) {
                self.any(&key("q15"))?;
                self.any(&key("q16"))?;
            } else if has_child(at, p.cross.lab("small_cmp").name()) {
                self.any(&key("q17"))?;
                self.any(&key("q18"))?;
                break "lt";
            } else {
                self.any(&key("q19"))?;
                self.any(&key("q20"))?;
                break "gt";
            }
        };
        let done = s.lab("done");
        while has_child(
            self.node(&side(&format!("cl_{verdict}"), ra, &va))?,
            done.name(),
        ) {
            self.any(&key(&format!("c{verdict}a")))?;
        }
        self.any(&key(&format!("c{verdict}ra")))?;
        while has_child(
            self.node(&side(&format!("cm_{verdict}"), rb, &vb))?,
            done.name(),
        ) {
            self.any(&key(&format!("c{verdict}b")))?;
        }
        self.any(&key(&format!("c{verdict}rb")))?;
        self.any(&key(&format!("f{verdict}a")))?;
        self.any(&key(&format!("f{verdict}b")))
    }

    pub fn verify(&mut self, s: &Scope) -> Result<(), GadgetError> {
        let key = |n: &str| s.key(n);
        let y = verify_cmp(s);
        self.any(&key("v1"))?;
        let mut state = "s'";
        loop {
            if !has_child(self.node(&s.path(&[s.lab(state)]))?, OMEGA) {
                if state == "s'" {
                    self.any(&key("v1b"))?;
                }
                self.any(&key("v6"))?;
                break;
            }
            self.any(&key(if state == "s'" { "v2" } else { "v5" }))?;
            self.cmp(&y, &[], &[])?;
            let a_big = pair(y.lab("A_cmp").name(), &y.lab("big_cmp"));
            if has_child(self.node(&s.path(&[y.lab("end_cmp")]))?, a_big.name()) {
                self.any(&key("v3a"))?;
                self.any(&key("v4a"))?;
            } else {
                self.any(&key("v3b"))?;
                self.any(&key("v4b"))?;
            }
            state = "e2";
        }
        while has_child(self.node(&s.path(&[s.lab("cv")]))?, s.lab("w'").name()) {
            self.any(&key("v7"))?;
        }
        self.any(&key("v8"))?;
        self.any(&key("v9"))
    }

    pub fn smallest(&mut self, s: &Scope) -> Result<(), GadgetError> {
        let d = s.depth();
        let key = |n: &str| s.key(n);
        let c = s.nested("g1");
        let root = self.node(&s.path(&[s.lab("start_sm")]))?;
        let min = self
            .child_exponents(root, d)
            .into_iter()
            .min()
            .ok_or_else(|| self.stuck(&key("s1")))?;
        self.fire_child(&key("s1"), d, &min)?;
        let mut state = "start_sm'";
        loop {
            if !has_child(self.node(&s.path(&[s.lab(state)]))?, OMEGA) {
                if state == "start_sm'" {
                    self.any(&key("s1b"))?;
                }
                self.any(&key("s8"))?;
                break;
            }
            self.any(&key(if state == "start_sm'" { "s2" } else { "s7" }))?;
            self.cmp(&c, &[], &[])?;
            if has_child(
                self.node(&s.path(&[c.lab("end_cmp")]))?,
                c.lab("big_cmp").name(),
            ) {
                self.any(&key("s5"))?;
                self.any(&key("s6"))?;
            } else {
                self.any(&key("s3"))?;
                self.any(&key("s4"))?;
            }
            state = "end_cmp''";
        }
        self.any(&key("s9"))?;
        while has_child(self.node(&s.path(&[s.lab("convert")]))?, s.lab("w'").name()) {
            self.any(&key("s10"))?;
        }
        self.any(&key("s11"))?;
        self.any(&key("s12"))
    }

    pub fn biggest(&mut self, s: &Scope) -> Result<(), GadgetError> {
        let d = s.depth();
        let (p, v) = biggest_parts(s);
        let root = self.node(&s.path(&[s.lab("start_big")]))?;
        let max = self
            .child_exponents(root, d)
            .into_iter()
            .max()
            .ok_or_else(|| self.stuck(&s.key("b1")))?;
        self.fire_child(&s.key("b1"), d, &max)?;
        self.copy(&p)?;
        self.any(&s.key("b2"))?;
        self.verify(&v)?;
        self.any(&s.key("b3"))
    }

    /// One `→_H` step on a Hardy configuration.
    pub fn forward_step(&mut self, state: &HardyState) -> Result<(), GadgetError> {
        let k = self.k;
        if state.alpha().is_successor() {
            let pick = |c: &Config, a: &[usize]| exponent(c.node(a).unwrap(), 1, k).is_zero();
            self.fire("succ1", &pick)?;
            return self.any("succ2");
        }
        if state.n() == 0 {
            return Err(GadgetError::Stuck {
                rule: "p0/fin (no # left)".into(),
                config: self.cfg.to_string(),
            });
        }
        self.any("lim")?;
        let mut i = 0;
        loop {
            let ph = Phase::new("fwd", i, "cp");
            self.smallest(&ph.sm)?;
            let here = cat(&[&ph.sm.pre, &[Label::new("end_sm"), Label::new("smallest")]]);
            let beta = exponent(self.node(&here)?, i + 1, k);
            if beta.is_limit() {
                self.any(&ph.key("lim"))?;
                i += 1;
                continue;
            }
            let unit = |c: &Config, a: &[usize]| {
                a.len() < i + 2 || exponent(c.node(a).unwrap(), i + 2, k).is_zero()
            };
            self.fire(&ph.key("dec"), &unit)?;
            for _ in 1..state.n() {
                self.any(&ph.key("go"))?;
                self.copy(&ph.inner)?;
                self.any(&ph.key("back"))?;
                self.any(&ph.key("tick"))?;
            }
            self.any(&ph.key("fin"))?;
            return self.finish(&ph);
        }
    }

    /// Moves the primed budget back and enters the phase's last rule.
    fn finish(&mut self, ph: &Phase) -> Result<(), GadgetError> {
        while self
            .cfg
            .count_children(&Label::new(super::builder::BUDGET_PRIMED))
            > 0
        {
            self.any(&ph.key("tr"))?;
        }
        self.any(&ph.key("rs"))?;
        self.any(&ph.key("last"))
    }

    /// Undoes the step `prev →_H cur`, where `cur` is the current configuration.
    pub fn backward_step(
        &mut self,
        prev: &HardyState,
        cur: &HardyState,
    ) -> Result<(), GadgetError> {
        let k = self.k;
        if prev.alpha().is_successor() {
            return self.any("unsucc");
        }
        self.any("lim")?;
        // `target` is what the children of v_i must come to encode.
        let mut target = prev.alpha().clone();
        let mut i = 0;
        loop {
            let ph = Phase::new("bwd", i, "cm");
            self.smallest(&ph.sm)?;
            let (eta, _) = target.terms().last().cloned().expect("limit ordinal");
            if eta.is_limit() {
                self.any(&ph.key("lim"))?;
                target = eta;
                i += 1;
                continue;
            }
            let here = cat(&[&ph.sm.pre, &[Label::new("end_sm"), Label::new("smallest")]]);
            let e = exponent(self.node(&here)?, i + 1, k);
            self.any(&ph.key("sel0"))?;
            let c = backward_cmp(&ph);
            for _ in 1..cur.n() {
                self.fire_child(&ph.key("sel"), i, &e)?;
                self.cmp(&c, &[], &[])?;
                self.any(&ph.key("rm"))?;
                self.any(&ph.key("rm2"))?;
                self.any(&ph.key("tick"))?;
            }
            // v_i, found by its label while the root is in state `r`.
            let v = |r: &str| -> Vec<Label> {
                if i == 0 {
                    vec![ph.lab(r)]
                } else {
                    cat(&[&[ph.lab(r)], &ph.mid(), &[ph.lab("rdy")]])
                }
            };
            while has_child(self.node(&v("cv'"))?, OMEGA) {
                self.any(&ph.key("sel"))?;
                self.cmp(&c, &[], &[])?;
                self.any(&ph.key("ck"))?;
                self.any(&ph.key("ck2"))?;
            }
            self.any(&ph.key("fin"))?;
            self.any(&ph.key("drop"))?;
            let primed = ph.lab("w'");
            while has_child(self.node(&v("cd"))?, primed.name()) {
                self.any(&ph.key("back"))?;
            }
            self.any(&ph.key("drop'"))?;
            self.any(&ph.key("dropn"))?;
            return self.finish(&ph);
        }
    }
}

/// The `→_H` chain from `from` until `to` is reached.
pub(crate) fn hardy_chain(
    from: &HardyState,
    to: &HardyState,
    max_steps: usize,
) -> Option<Vec<HardyState>> {
    let mut chain = vec![from.clone()];
    while chain.last() != Some(to) {
        if chain.len() > max_steps || chain.last().unwrap().alpha().is_zero() {
            return None;
        }
        let next = hardy_rewrite(chain.last().unwrap()).ok()?;
        chain.push(next);
    }
    Some(chain)
}
