//! The gadget constructions. Each builder emits the rules of one instance
//! rooted at depth `scope.depth()`; nested instances get their own scope.

use super::builder::{cat, pair, rep, Builder, Scope, BUDGET_PRIMED};
use crate::encoding::{BUDGET, OMEGA};
use crate::nrcs::Label;

pub(crate) fn w() -> Label {
    Label::new(OMEGA)
}

fn hash() -> Label {
    Label::new(BUDGET)
}

fn hash_p() -> Label {
    Label::new(BUDGET_PRIMED)
}

fn annotate(mut v: Vec<Label>, a: u32) -> Vec<Label> {
    let last = v.len() - 1;
    v[last] = v[last].with_annotation(Some(a));
    v
}

/// Copy gadget rooted at `s`: the child marked `mrkd` is duplicated as a
/// new child `cpd` and relabelled `fin`.
pub(crate) fn copy(b: &mut Builder, s: &Scope, fin: &Label) {
    let h = b.k - s.depth();
    assert!(h >= 1, "copy gadget needs a child level");
    let lab = |n: &str| s.lab(n);
    b.upd(
        s,
        "c1",
        vec![lab("start_copy"), lab("mrkd")],
        vec![lab("start_copy'"), lab("mrkd_1")],
    );
    if h == 1 {
        // The marked child is a last-level node: its annotation is carried
        // by the root label while the copy is created.
        for a in 0..=b.l {
            let copy_a = lab(&format!("copy_{a}"));
            let copied_a = lab(&format!("copied_{a}"));
            b.upd(
                s,
                "c2",
                vec![lab("start_copy'"), s.ann("mrkd_1", a)],
                vec![copy_a.clone(), s.ann("mrkd_1", a)],
            );
            b.upd(
                s,
                "c3",
                vec![copy_a],
                vec![copied_a.clone(), s.ann("cpd", a)],
            );
            b.upd(
                s,
                "c4",
                vec![copied_a, s.ann("mrkd_1", a)],
                vec![lab("end_copy"), fin.with_annotation(Some(a))],
            );
        }
        return;
    }
    let m = |j: usize| rep(&lab(&format!("mrkd_{j}")), j);
    let c = |j: usize| rep(&lab(&format!("mrkd'_{j}")), j);
    let r = |j: usize| rep(&lab(&format!("rst_{j}")), j);
    let cp = |j: usize| lab(&format!("cp_{j}"));
    let cp2 = |j: usize| lab(&format!("cp'_{j}"));
    let conv = |j: usize| lab(&format!("convert_{j}"));
    let rs = |j: usize| lab(&format!("rs_{j}"));
    let mark = lab("w'");
    b.upd(
        s,
        "c2",
        vec![lab("start_copy'")],
        vec![cp(1), lab("mrkd'_1")],
    );
    // First pass: walk the marked subtree, mirroring each step in the copy.
    for j in 1..h {
        let key = format!("ext{j}");
        let key2 = format!("ext'{j}");
        if j + 1 < h {
            b.upd(
                s,
                &key,
                cat(&[&[cp(j)], &m(j), &[w()]]),
                cat(&[&[cp2(j + 1)], &m(j + 1)]),
            );
            b.upd(
                s,
                &key2,
                cat(&[&[cp2(j + 1)], &c(j)]),
                cat(&[&[cp(j + 1)], &c(j + 1)]),
            );
        } else {
            for a in 0..=b.l {
                let pend = lab(&format!("cpl_{a}"));
                b.upd(
                    s,
                    &key,
                    cat(&[&[cp(j)], &m(j), &[w().with_annotation(Some(a))]]),
                    cat(&[std::slice::from_ref(&pend), &annotate(m(h), a)]),
                );
                b.upd(
                    s,
                    &key2,
                    cat(&[&[pend], &c(j)]),
                    cat(&[&[cp(h)], &annotate(c(h), a)]),
                );
            }
        }
    }
    b.upd(
        s,
        &format!("up{h}"),
        cat(&[&[cp(h)], &m(h)]),
        cat(&[&[conv(h)], &m(h - 1), std::slice::from_ref(&mark)]),
    );
    b.upd(
        s,
        &format!("up'{h}"),
        cat(&[&[conv(h)], &c(h)]),
        cat(&[&[cp(h - 1)], &c(h - 1), &[w()]]),
    );
    for j in (2..h).rev() {
        b.rst(
            s,
            &format!("up{j}"),
            cat(&[&[cp(j)], &m(j)]),
            w(),
            cat(&[&[conv(j)], &m(j - 1), std::slice::from_ref(&mark)]),
        );
        b.upd(
            s,
            &format!("up'{j}"),
            cat(&[&[conv(j)], &c(j)]),
            cat(&[&[cp(j - 1)], &c(j - 1), &[w()]]),
        );
    }
    b.rst(
        s,
        "up1",
        vec![cp(1), lab("mrkd_1")],
        w(),
        vec![conv(1), lab("rst_1")],
    );
    b.upd(
        s,
        "up'1",
        vec![conv(1), lab("mrkd'_1")],
        vec![rs(1), lab("cpd")],
    );
    // Second pass: turn the visited marks back into ω.
    for j in 1..h {
        b.upd(
            s,
            &format!("rx{j}"),
            cat(&[&[rs(j)], &r(j), std::slice::from_ref(&mark)]),
            cat(&[&[rs(j + 1)], &r(j + 1)]),
        );
    }
    b.upd(
        s,
        &format!("ru{h}"),
        cat(&[&[rs(h)], &r(h)]),
        cat(&[&[rs(h - 1)], &r(h - 1), &[w()]]),
    );
    for j in (2..h).rev() {
        b.rst(
            s,
            &format!("ru{j}"),
            cat(&[&[rs(j)], &r(j)]),
            mark.clone(),
            cat(&[&[rs(j - 1)], &r(j - 1), &[w()]]),
        );
    }
    b.rst(
        s,
        "ru1",
        vec![rs(1), lab("rst_1")],
        mark,
        vec![lab("end_copy"), fin.clone()],
    );
}

/// Scopes of the instances nested in a comparator of height at least 2.
pub(crate) struct CmpParts {
    pub big_a: Scope,
    pub copy_a: Scope,
    pub big_b: Scope,
    pub copy_b: Scope,
    pub cross: Scope,
    pub cross_ra: Vec<Label>,
    pub cross_rb: Vec<Label>,
    pub check_a: Scope,
    pub check_b: Scope,
}

pub(crate) fn cmp_parts(s: &Scope, ra: &[Label], rb: &[Label]) -> CmpParts {
    let via = |state: &str, r: &[Label]| cat(&[&[s.lab(state)], r]);
    CmpParts {
        big_a: s.nested_below("g1a", &via("fa", ra)),
        copy_a: s.nested_below("g1c", &via("fa", ra)),
        big_b: s.nested_below("g1b", &via("fb", rb)),
        copy_b: s.nested_below("g1d", &via("fb", rb)),
        cross: s.nested("g1x"),
        cross_ra: cat(&[ra, &[s.lab("VA")]]),
        cross_rb: cat(&[rb, &[s.lab("VB")]]),
        check_a: s.nested_below("g1v", &via("ka", ra)),
        check_b: s.nested_below("g1w", &via("kb", rb)),
    }
}

/// Depth of the compared nodes below a comparator root.
pub(crate) fn cmp_height(k: usize, s: &Scope, ra: &[Label]) -> usize {
    k + 1 - (s.depth() + 1 + ra.len())
}

/// Comparator rooted at `s`. The compared nodes are reached from the root
/// through the fixed labels `ra` and `rb`; both are empty for siblings.
pub(crate) fn cmp(b: &mut Builder, s: &Scope, ra: &[Label], rb: &[Label]) {
    let lab = |n: &str| s.lab(n);
    let h = cmp_height(b.k, s, ra);
    let pa = |rest: &[Label]| cat(&[ra, rest]);
    let pb = |rest: &[Label]| cat(&[rb, rest]);
    let with = |root: Label, rest: Vec<Label>| cat(&[&[root], &rest]);
    let (big, small, equal) = (lab("big_cmp"), lab("small_cmp"), lab("equal_cmp"));
    if h == 1 {
        for i in 0..=b.l {
            let a = s.ann("A_cmp", i);
            let ca = lab(&format!("ca_{i}"));
            b.upd(
                s,
                "q1",
                with(lab("start_cmp"), pa(std::slice::from_ref(&a))),
                with(ca.clone(), pa(&[a])),
            );
            for j in 0..=b.l {
                let (res, rb_label) = match i.cmp(&j) {
                    std::cmp::Ordering::Less => ("r_lt", &big),
                    std::cmp::Ordering::Greater => ("r_gt", &small),
                    std::cmp::Ordering::Equal => ("r_eq", &equal),
                };
                b.upd(
                    s,
                    "q2",
                    with(ca.clone(), pb(&[s.ann("B_cmp", j)])),
                    with(lab(res), pb(&[rb_label.with_annotation(Some(j))])),
                );
            }
        }
        for (res, ra_label) in [("r_lt", &small), ("r_gt", &big), ("r_eq", &equal)] {
            for i in 0..=b.l {
                b.upd(
                    s,
                    "q3",
                    with(lab(res), pa(&[s.ann("A_cmp", i)])),
                    with(lab("end_cmp"), pa(&[ra_label.with_annotation(Some(i))])),
                );
            }
        }
        return;
    }
    let (va, vb, orig, done) = (lab("VA"), lab("VB"), lab("orig"), lab("done"));
    let p = cmp_parts(s, ra, rb);
    b.upd(
        s,
        "q1",
        with(lab("start_cmp"), pa(&[lab("A_cmp")])),
        with(lab("s0"), pa(std::slice::from_ref(&va))),
    );
    b.upd(
        s,
        "q2",
        with(lab("s0"), pb(&[lab("B_cmp")])),
        with(lab("loop"), pb(std::slice::from_ref(&vb))),
    );
    // One round: biggest remaining child on each side, copied, compared
    // through the copies, then checked against the siblings.
    b.upd(
        s,
        "q3",
        with(lab("loop"), pa(std::slice::from_ref(&va))),
        with(lab("fa"), pa(&[p.big_a.lab("start_big")])),
    );
    biggest(b, &p.big_a);
    b.upd(
        s,
        "q4",
        with(
            lab("fa"),
            pa(&[p.big_a.lab("end_big"), p.big_a.lab("biggest")]),
        ),
        with(
            lab("fa"),
            pa(&[p.copy_a.lab("start_copy"), p.copy_a.lab("mrkd")]),
        ),
    );
    copy(b, &p.copy_a, &orig);
    b.upd(
        s,
        "q5",
        with(lab("fa"), pa(&[p.copy_a.lab("end_copy")])),
        with(lab("fb"), pa(std::slice::from_ref(&va))),
    );
    b.upd(
        s,
        "q6",
        with(lab("fb"), pb(std::slice::from_ref(&vb))),
        with(lab("fb"), pb(&[p.big_b.lab("start_big")])),
    );
    biggest(b, &p.big_b);
    b.upd(
        s,
        "q7",
        with(
            lab("fb"),
            pb(&[p.big_b.lab("end_big"), p.big_b.lab("biggest")]),
        ),
        with(
            lab("fb"),
            pb(&[p.copy_b.lab("start_copy"), p.copy_b.lab("mrkd")]),
        ),
    );
    copy(b, &p.copy_b, &orig);
    b.upd(
        s,
        "q8",
        with(lab("fb"), pb(&[p.copy_b.lab("end_copy")])),
        with(lab("x0"), pb(std::slice::from_ref(&vb))),
    );
    let x = &p.cross;
    b.upd(
        s,
        "q9",
        with(lab("x0"), pa(&[va.clone(), p.copy_a.lab("cpd")])),
        with(lab("x1"), pa(&[va.clone(), x.lab("A_cmp")])),
    );
    b.upd(
        s,
        "q10",
        with(lab("x1"), pb(&[vb.clone(), p.copy_b.lab("cpd")])),
        with(x.lab("start_cmp"), pb(&[vb.clone(), x.lab("B_cmp")])),
    );
    cmp(b, x, &p.cross_ra, &p.cross_rb);
    b.upd(
        s,
        "q11",
        with(x.lab("end_cmp"), pa(std::slice::from_ref(&va))),
        with(lab("ka"), pa(&[p.check_a.lab("start_vf")])),
    );
    verify(b, &p.check_a, &orig);
    b.upd(
        s,
        "q12",
        with(lab("ka"), pa(&[p.check_a.lab("end_vf")])),
        with(lab("kb"), pa(std::slice::from_ref(&va))),
    );
    b.upd(
        s,
        "q13",
        with(lab("kb"), pb(std::slice::from_ref(&vb))),
        with(lab("kb"), pb(&[p.check_b.lab("start_vf")])),
    );
    verify(b, &p.check_b, &orig);
    b.upd(
        s,
        "q14",
        with(lab("kb"), pb(&[p.check_b.lab("end_vf")])),
        with(lab("vd"), pb(std::slice::from_ref(&vb))),
    );
    let (xb, xs, xe) = (x.lab("big_cmp"), x.lab("small_cmp"), x.lab("equal_cmp"));
    b.upd(
        s,
        "q15",
        with(lab("vd"), pa(&[va.clone(), xe.clone()])),
        with(lab("eq"), pa(&[va.clone(), done.clone()])),
    );
    b.upd(
        s,
        "q16",
        with(lab("eq"), pb(&[vb.clone(), xe])),
        with(lab("loop"), pb(&[vb.clone(), done.clone()])),
    );
    b.upd(
        s,
        "q17",
        with(lab("vd"), pa(&[va.clone(), xs.clone()])),
        with(lab("ls"), pa(&[va.clone(), w()])),
    );
    b.upd(
        s,
        "q18",
        with(lab("ls"), pb(&[vb.clone(), xb.clone()])),
        with(lab("cl_lt"), pb(&[vb.clone(), w()])),
    );
    b.upd(
        s,
        "q19",
        with(lab("vd"), pa(&[va.clone(), xb])),
        with(lab("lg"), pa(&[va.clone(), w()])),
    );
    b.upd(
        s,
        "q20",
        with(lab("lg"), pb(&[vb.clone(), xs])),
        with(lab("cl_gt"), pb(&[vb.clone(), w()])),
    );
    // A side out of children: guessed by resetting what is left.
    b.rst(
        s,
        "q21",
        with(lab("loop"), pa(std::slice::from_ref(&va))),
        w(),
        with(lab("xa"), pa(std::slice::from_ref(&va))),
    );
    b.rst(
        s,
        "q22",
        with(lab("xa"), pb(std::slice::from_ref(&vb))),
        w(),
        with(lab("cl_eq"), pb(std::slice::from_ref(&vb))),
    );
    b.upd(
        s,
        "q23",
        with(lab("xa"), pb(&[vb.clone(), w()])),
        with(lab("cl_lt"), pb(&[vb.clone(), w()])),
    );
    b.rst(
        s,
        "q24",
        with(lab("loop"), pb(std::slice::from_ref(&vb))),
        w(),
        with(lab("xb"), pb(std::slice::from_ref(&vb))),
    );
    b.upd(
        s,
        "q25",
        with(lab("xb"), pa(&[va.clone(), w()])),
        with(lab("cl_gt"), pa(&[va.clone(), w()])),
    );
    for (v, res_a, res_b) in [
        ("lt", &small, &big),
        ("gt", &big, &small),
        ("eq", &equal, &equal),
    ] {
        let (cl, cm, f1, f2) = (
            lab(&format!("cl_{v}")),
            lab(&format!("cm_{v}")),
            lab(&format!("fn_{v}")),
            lab(&format!("fn2_{v}")),
        );
        b.upd(
            s,
            &format!("c{v}a"),
            with(cl.clone(), pa(&[va.clone(), done.clone()])),
            with(cl.clone(), pa(&[va.clone(), w()])),
        );
        b.rst(
            s,
            &format!("c{v}ra"),
            with(cl, pa(std::slice::from_ref(&va))),
            done.clone(),
            with(cm.clone(), pa(std::slice::from_ref(&va))),
        );
        b.upd(
            s,
            &format!("c{v}b"),
            with(cm.clone(), pb(&[vb.clone(), done.clone()])),
            with(cm.clone(), pb(&[vb.clone(), w()])),
        );
        b.rst(
            s,
            &format!("c{v}rb"),
            with(cm, pb(std::slice::from_ref(&vb))),
            done.clone(),
            with(f1.clone(), pb(std::slice::from_ref(&vb))),
        );
        b.upd(
            s,
            &format!("f{v}a"),
            with(f1, pa(std::slice::from_ref(&va))),
            with(f2.clone(), pa(std::slice::from_ref(res_a))),
        );
        b.upd(
            s,
            &format!("f{v}b"),
            with(f2, pb(std::slice::from_ref(&vb))),
            with(lab("end_cmp"), pb(std::slice::from_ref(res_b))),
        );
    }
}

/// Checks that the child labelled `cand` is at least every `ω` sibling,
/// then removes it.
pub(crate) fn verify(b: &mut Builder, s: &Scope, cand: &Label) {
    let lab = |n: &str| s.lab(n);
    let y = verify_cmp(s);
    let (ya, yb) = (y.lab("A_cmp"), y.lab("B_cmp"));
    b.upd(
        s,
        "v1",
        vec![lab("start_vf"), cand.clone()],
        vec![lab("s'"), ya.clone()],
    );
    b.upd(s, "v1b", vec![lab("s'")], vec![lab("e2")]);
    b.upd(
        s,
        "v2",
        vec![lab("s'"), w()],
        vec![y.lab("start_cmp"), yb.clone()],
    );
    cmp(b, &y, &[], &[]);
    let tag = |l: Label| pair(ya.name(), &l);
    b.upd(
        s,
        "v3a",
        vec![y.lab("end_cmp"), tag(y.lab("big_cmp"))],
        vec![lab("e1"), ya.clone()],
    );
    b.upd(
        s,
        "v3b",
        vec![y.lab("end_cmp"), tag(y.lab("equal_cmp"))],
        vec![lab("e1"), ya.clone()],
    );
    b.upd(
        s,
        "v4a",
        vec![lab("e1"), y.lab("small_cmp")],
        vec![lab("e2"), lab("w'")],
    );
    b.upd(
        s,
        "v4b",
        vec![lab("e1"), y.lab("equal_cmp")],
        vec![lab("e2"), lab("w'")],
    );
    b.upd(s, "v5", vec![lab("e2"), w()], vec![y.lab("start_cmp"), yb]);
    b.rst(s, "v6", vec![lab("e2")], w(), vec![lab("cv")]);
    b.upd(s, "v7", vec![lab("cv"), lab("w'")], vec![lab("cv"), w()]);
    b.rst(s, "v8", vec![lab("cv")], lab("w'"), vec![lab("cv'")]);
    b.upd(s, "v9", vec![lab("cv'"), ya], vec![lab("end_vf")]);
}

/// The comparator inside a verification, tracking the candidate.
pub(crate) fn verify_cmp(s: &Scope) -> Scope {
    let mut y = s.nested("g1");
    y.track
        .push((s.depth() + 1, y.lab("A_cmp").name().to_string()));
    y
}

/// Smallest-child gadget rooted at `s`.
pub(crate) fn smallest(b: &mut Builder, s: &Scope) {
    let lab = |n: &str| s.lab(n);
    let c = s.nested("g1");
    let (ca, cb) = (c.lab("A_cmp"), c.lab("B_cmp"));
    b.upd(
        s,
        "s1",
        vec![lab("start_sm"), w()],
        vec![lab("start_sm'"), ca.clone()],
    );
    b.upd(s, "s1b", vec![lab("start_sm'")], vec![lab("end_cmp''")]);
    b.upd(
        s,
        "s2",
        vec![lab("start_sm'"), w()],
        vec![c.lab("start_cmp"), cb.clone()],
    );
    cmp(b, &c, &[], &[]);
    b.upd(
        s,
        "s3",
        vec![c.lab("end_cmp"), c.lab("equal_cmp")],
        vec![lab("end_cmp'"), lab("w'")],
    );
    b.upd(
        s,
        "s4",
        vec![lab("end_cmp'"), c.lab("equal_cmp")],
        vec![lab("end_cmp''"), ca.clone()],
    );
    b.upd(
        s,
        "s5",
        vec![c.lab("end_cmp"), c.lab("big_cmp")],
        vec![lab("end_cmp'"), lab("w'")],
    );
    b.upd(
        s,
        "s6",
        vec![lab("end_cmp'"), c.lab("small_cmp")],
        vec![lab("end_cmp''"), ca.clone()],
    );
    b.upd(
        s,
        "s7",
        vec![lab("end_cmp''"), w()],
        vec![c.lab("start_cmp"), cb],
    );
    b.rst(s, "s8", vec![lab("end_cmp''")], w(), vec![lab("declare")]);
    b.upd(
        s,
        "s9",
        vec![lab("declare"), ca],
        vec![lab("convert"), lab("smallest")],
    );
    b.upd(
        s,
        "s10",
        vec![lab("convert"), lab("w'")],
        vec![lab("convert"), w()],
    );
    b.rst(
        s,
        "s11",
        vec![lab("convert")],
        lab("w'"),
        vec![lab("convert'")],
    );
    b.upd(s, "s12", vec![lab("convert'")], vec![lab("end_sm")]);
}

/// Biggest-child gadget rooted at `s`: copy a guessed child, check the
/// original against every sibling, keep the copy.
pub(crate) fn biggest(b: &mut Builder, s: &Scope) {
    let lab = |n: &str| s.lab(n);
    let (p, v) = biggest_parts(s);
    let cand = lab("cand");
    b.upd(
        s,
        "b1",
        vec![lab("start_big"), w()],
        vec![p.lab("start_copy"), p.lab("mrkd")],
    );
    copy(b, &p, &cand);
    b.upd(s, "b2", vec![p.lab("end_copy")], vec![v.lab("start_vf")]);
    verify(b, &v, &cand);
    b.upd(
        s,
        "b3",
        vec![v.lab("end_vf"), p.lab("cpd")],
        vec![lab("end_big"), lab("biggest")],
    );
}

pub(crate) fn biggest_parts(s: &Scope) -> (Scope, Scope) {
    (s.nested("g1"), s.nested("g1b"))
}

/// Labels of the Hardy machines' phase bookkeeping.
pub(crate) struct Phase {
    pub i: usize,
    /// Scope of the phase's smallest-child gadget.
    pub sm: Scope,
    /// Scope of the copy (forward) or comparator (backward) gadget.
    pub inner: Scope,
    pub root: &'static str,
}

impl Phase {
    pub fn new(root: &'static str, i: usize, k_prefix: &str) -> Phase {
        let phi = rep(&Label::new(&format!("{root}{i}")), i);
        let xi = rep(&Label::new(&format!("{root}.{k_prefix}{i}")), i);
        Phase {
            i,
            sm: Scope {
                ns: String::new(),
                kns: format!("p{i}/sm/"),
                pre: phi,
                track: Vec::new(),
            },
            inner: Scope {
                ns: String::new(),
                kns: format!("p{i}/{k_prefix}/"),
                pre: xi,
                track: Vec::new(),
            },
            root,
        }
    }

    pub fn lab(&self, n: &str) -> Label {
        Label::new(&format!("{}.{}{}", self.root, n, self.i))
    }

    pub fn key(&self, n: &str) -> String {
        format!("p{}/{}", self.i, n)
    }

    /// Labels of `v_1 … v_{i−1}` while the phase's inner gadget is idle.
    pub fn mid(&self) -> Vec<Label> {
        self.inner.pre.iter().skip(1).cloned().collect()
    }
}

/// Budget bookkeeping: each repetition turns one `#` into `#'`, finishing
/// turns one more, and in state `transfer` every `#'` goes back to `#`.
fn hardy_common(b: &mut Builder, ph: &Phase, transfer: &Label) {
    let root = Scope::root();
    let (cv, cv1, cv2) = (ph.lab("cv"), ph.lab("cv'"), ph.lab("cv''"));
    b.upd(
        &root,
        &ph.key("tick"),
        vec![cv, hash()],
        vec![cv1.clone(), hash_p()],
    );
    b.upd(
        &root,
        &ph.key("fin"),
        vec![cv1, hash()],
        vec![cv2, hash_p()],
    );
    b.upd(
        &root,
        &ph.key("tr"),
        vec![transfer.clone(), hash_p()],
        vec![transfer.clone(), hash()],
    );
    b.rst(
        &root,
        &ph.key("rs"),
        vec![transfer.clone()],
        hash_p(),
        vec![ph.lab("last")],
    );
}

fn phase_entry(b: &mut Builder, ph: &Phase, k: usize) {
    let root = Scope::root();
    smallest(b, &ph.sm);
    if ph.i + 1 < k {
        let next = Phase::new(ph.root, ph.i + 1, "");
        b.upd(
            &root,
            &ph.key("lim"),
            cat(&[&ph.sm.pre, &[Label::new("end_sm"), Label::new("smallest")]]),
            cat(&[&next.sm.pre, &[Label::new("start_sm")]]),
        );
    }
}

/// The machine simulating `(α, n) →_H (α', n')` forward on `C_{α,n}`.
pub(crate) fn hardy_forward(b: &mut Builder) {
    let root = Scope::root();
    let k = b.k;
    b.upd(&root, "succ1", vec![w(), w()], vec![Label::new("succ")]);
    b.upd(&root, "succ2", vec![Label::new("succ")], vec![w(), hash()]);
    b.upd(&root, "lim", vec![w()], vec![Label::new("start_sm")]);
    for i in 0..k {
        let ph = Phase::new("fwd", i, "cp");
        phase_entry(b, &ph, k);
        let (sc, ec, mk, cpd) = (
            Label::new("start_copy"),
            Label::new("end_copy"),
            Label::new("mrkd"),
            Label::new("cpd"),
        );
        let dec_src = cat(&[
            &ph.sm.pre,
            &[Label::new("end_sm"), Label::new("smallest"), w()],
        ]);
        let (cv, cv1) = (ph.lab("cv"), ph.lab("cv'"));
        if i == 0 {
            b.upd(
                &root,
                &ph.key("dec"),
                dec_src,
                vec![cv1.clone(), mk.clone()],
            );
            b.upd(&root, &ph.key("go"), vec![cv1.clone()], vec![sc.clone()]);
            b.upd(
                &root,
                &ph.key("back"),
                vec![ec, cpd],
                vec![cv.clone(), mk.clone()],
            );
            b.upd(
                &root,
                &ph.key("last"),
                vec![ph.lab("last"), mk],
                vec![w(), w()],
            );
        } else {
            let mid = ph.mid();
            let cp = ph.inner.pre[0].clone();
            b.upd(
                &root,
                &ph.key("dec"),
                dec_src,
                cat(&[std::slice::from_ref(&cv1), &mid, &[sc.clone(), mk.clone()]]),
            );
            b.upd(&root, &ph.key("go"), vec![cv1], vec![cp]);
            b.upd(
                &root,
                &ph.key("back"),
                cat(&[&ph.inner.pre, &[ec, cpd]]),
                cat(&[&[cv], &mid, &[sc.clone(), mk.clone()]]),
            );
            b.upd(
                &root,
                &ph.key("last"),
                cat(&[&[ph.lab("last")], &mid, &[sc, mk]]),
                rep(&w(), i + 2),
            );
        }
        copy(b, &ph.inner, &w());
        hardy_common(b, &ph, &ph.lab("cv''"));
    }
}

/// The comparator of a backward phase. It tracks the merged copy, so that
/// equal siblings can be removed and bigger ones confirmed.
pub(crate) fn backward_cmp(ph: &Phase) -> Scope {
    let mut s = ph.inner.clone();
    s.track.push((ph.i + 1, s.lab("A_cmp").name().to_string()));
    s
}

/// The machine simulating `→_H` backwards on `C_{α,n}`.
///
/// A limit step merges `m` further copies of the smallest term `ω^β` into
/// `ω^{β+1}` and sets the budget to `m+1`. Every sibling left over must have
/// been compared and found bigger, unconverted `#` are dropped, and so the
/// merged term is the smallest one and the result rewrites back to a lossy
/// version of the input.
pub(crate) fn hardy_backward(b: &mut Builder) {
    let root = Scope::root();
    let k = b.k;
    b.upd(&root, "unsucc", vec![w(), hash()], vec![w(), w()]);
    b.upd(&root, "lim", vec![w()], vec![Label::new("start_sm")]);
    for i in 0..k {
        let ph = Phase::new("bwd", i, "cm");
        phase_entry(b, &ph, k);
        let c = backward_cmp(&ph);
        let (a, bb, sc, ec) = (
            c.lab("A_cmp"),
            c.lab("B_cmp"),
            c.lab("start_cmp"),
            c.lab("end_cmp"),
        );
        let tagged = |l: &str| pair(a.name(), &c.lab(l));
        let found = cat(&[&ph.sm.pre, &[Label::new("end_sm"), Label::new("smallest")]]);
        let mid = ph.mid();
        let rdy = ph.lab("rdy");
        // Path to v_i's children while the root holds state `r`. In phase 0
        // the root is v_i.
        let at = |r: Label, tail: &[Label]| -> Vec<Label> {
            if i == 0 {
                cat(&[&[r], tail])
            } else {
                cat(&[&[r], &mid, std::slice::from_ref(&rdy), tail])
            }
        };
        let running = |tail: &[Label]| cat(&[&ph.inner.pre, std::slice::from_ref(&ec), tail]);
        let (cv, cv1, cv2) = (ph.lab("cv"), ph.lab("cv'"), ph.lab("cv''"));
        b.upd(
            &root,
            &ph.key("sel0"),
            found,
            at(cv1.clone(), std::slice::from_ref(&a)),
        );
        b.upd(
            &root,
            &ph.key("sel"),
            at(cv1.clone(), &[w()]),
            cat(&[&ph.inner.pre, &[sc, bb]]),
        );
        // Equal: the sibling is one more copy.
        b.upd(
            &root,
            &ph.key("rm"),
            running(&[c.lab("equal_cmp")]),
            at(ph.lab("rm"), &[]),
        );
        b.upd(
            &root,
            &ph.key("rm2"),
            at(ph.lab("rm"), &[tagged("equal_cmp")]),
            at(cv.clone(), std::slice::from_ref(&a)),
        );
        // Smaller: the sibling stays, marked as checked.
        b.upd(
            &root,
            &ph.key("ck"),
            running(&[tagged("small_cmp")]),
            at(ph.lab("ck"), std::slice::from_ref(&a)),
        );
        b.upd(
            &root,
            &ph.key("ck2"),
            at(ph.lab("ck"), &[c.lab("big_cmp")]),
            at(cv1.clone(), &[ph.lab("w'")]),
        );
        // Done: drop unchecked siblings and unconverted budget.
        b.rst(
            &root,
            &ph.key("drop"),
            at(cv2, &[]),
            w(),
            at(ph.lab("cd"), &[]),
        );
        b.upd(
            &root,
            &ph.key("back"),
            at(ph.lab("cd"), &[ph.lab("w'")]),
            at(ph.lab("cd"), &[w()]),
        );
        b.rst(
            &root,
            &ph.key("drop'"),
            at(ph.lab("cd"), &[]),
            ph.lab("w'"),
            at(ph.lab("cd'"), &[]),
        );
        b.rst(
            &root,
            &ph.key("dropn"),
            vec![ph.lab("cd'")],
            hash(),
            vec![ph.lab("tr")],
        );
        b.upd(
            &root,
            &ph.key("last"),
            at(ph.lab("last"), &[a]),
            rep(&w(), i + 3),
        );
        cmp(b, &c, &[], &[]);
        hardy_common(b, &ph, &ph.lab("tr"));
    }
}
