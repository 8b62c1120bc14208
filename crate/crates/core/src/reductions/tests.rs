use std::collections::{BTreeSet, HashSet, VecDeque};

use super::*;
use crate::coverability::{
    backward_coverability, forward_explore, verify_certificate, Decision, ForwardOutcome,
};
use crate::nrcs::parse_tree;

fn t(s: &str) -> Config {
    parse_tree(s).unwrap()
}

fn l(s: &str) -> Label {
    Label::new(s)
}

/// Increments `c` on the way to `t`, then zero-tests `c` on the way to `f`:
/// `f` is reachable only through a dishonest reset.
const DISHONEST: &str = "minsky k=1
states s t f c
update s -> t,c
zerotest t [c] -> f
init s
target f
";

/// The same machine with a decrement before the zero-test.
const HONEST: &str = "minsky k=1
states s t f c
update s -> t,c
update t,c -> t
zerotest t [c] -> f
init s
target f
";

/// Two counters, a loop and two zero-tests.
const TWO_COUNTERS: &str = "minsky k=1
states a b x y
update a -> a,x
update a,x -> b,y
update b,y -> a
zerotest a [x] -> b
zerotest b [y] -> a
init a
";

fn machine(src: &str) -> MinskyMachine {
    parse_minsky(src).unwrap().machine
}

#[test]
fn zero_test_examples() {
    let m = MinskyMachine::new(
        vec![l("p0"), l("p"), l("q0")],
        vec![Transition::update(&["p0"], &["p0", "p"])],
        vec![ZeroTest {
            from: l("p0"),
            tested: l("p"),
            to: l("q0"),
        }],
    )
    .unwrap();
    let z = MinskyMove::ZeroTest(0);
    assert!(minsky_step(&m, &t("p0(p)"), z).is_empty());
    assert_eq!(minsky_step(&m, &t("p0(q0)"), z), vec![t("q0(q0)")]);
    let inc = minsky_step(&m, &t("p0"), MinskyMove::Update(0));
    assert_eq!(inc, vec![t("p0(p)")]);
    assert!(minsky_step(&m, &inc[0], z).is_empty());
}

#[test]
fn budget_translation_examples() {
    let m = MinskyMachine::new(
        vec![l("s"), l("s'"), l("p"), l("p0"), l("q0")],
        vec![
            Transition::update(&["s"], &["s'", "p"]),
            Transition::update(&["s'", "p"], &["s"]),
        ],
        vec![ZeroTest {
            from: l("p0"),
            tested: l("p"),
            to: l("q0"),
        }],
    )
    .unwrap();
    let b = minsky_to_budget_nrcs(&m);
    let ts = b.nrcs.transitions();
    assert_eq!(ts[0], Transition::update(&["s", "#"], &["s'", "p"]));
    assert_eq!(ts[1], Transition::update(&["s'", "p"], &["s", "#"]));
    assert_eq!(ts[2], Transition::reset(&["p0"], "p", &["q0"]));
    assert_eq!(
        b.origin,
        vec![
            MinskyMove::Update(0),
            MinskyMove::Update(1),
            MinskyMove::ZeroTest(0)
        ]
    );

    let plain = MinskyMachine::new(
        vec![l("a"), l("b")],
        vec![Transition::update(&["a"], &["b"])],
        vec![],
    )
    .unwrap();
    assert_eq!(minsky_to_budget_nrcs(&plain).nrcs.resets().count(), 0);
}

#[test]
fn rejects_bad_machines() {
    assert!(matches!(
        parse_minsky("minsky k=1\nstates a p\nreset a [p] -> a\n"),
        Err(ReductionError::ResetInMinsky)
    ));
    assert!(parse_minsky("minsky k=1\nstates a\nzerotest a [p] -> a\n").is_err());
    assert!(parse_minsky("minsky k=2\nstates a\n").is_err());
    assert!(parse_minsky("minsky k=1\nstates a p\ninit a(p)\n").is_err());
    let hash = MinskyMachine::new(vec![l("#")], vec![], vec![]);
    assert!(matches!(hash, Err(ReductionError::BudgetState)));
}

#[test]
fn minsky_text_round_trip() {
    for src in [DISHONEST, HONEST, TWO_COUNTERS] {
        let f = parse_minsky(src).unwrap();
        let again = parse_minsky(&render_minsky(
            &f.machine,
            f.init.as_ref(),
            f.target.as_ref(),
        ))
        .unwrap();
        assert_eq!(again, f);
    }
}

#[test]
fn honest_run_examples() {
    let b = minsky_to_budget_nrcs(&machine(DISHONEST));
    let init = with_budget(&t("s"), 1);
    assert!(honest_run_check(&b, &init, &[(0, vec![0])]).unwrap());
    // The reset fires with one `c` child.
    assert!(!honest_run_check(&b, &init, &[(0, vec![0]), (1, vec![])]).unwrap());
    let b = minsky_to_budget_nrcs(&machine(HONEST));
    assert!(honest_run_check(&b, &init, &[(0, vec![0]), (1, vec![0]), (2, vec![])]).unwrap());
    assert!(honest_run_check(&b, &init, &[(2, vec![])]).is_err());
}

/// Every run of length at most `depth` from `init`, as `(run, trace)`.
fn all_runs(
    n: &Nrcs,
    init: &Config,
    depth: usize,
) -> Vec<(Vec<crate::coverability::Step>, Vec<Config>)> {
    let mut out = vec![(Vec::new(), vec![init.clone()])];
    let mut frontier = out.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for (run, trace) in &frontier {
            for (i, a, y) in n.successors(trace.last().unwrap()) {
                let mut r = run.clone();
                r.push((i, a));
                let mut tr = trace.clone();
                tr.push(y);
                next.push((r, tr));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn honesty_iff_budget_conserved() {
    for (src, budget, depth) in [(DISHONEST, 2, 4), (HONEST, 2, 5), (TWO_COUNTERS, 2, 6)] {
        let f = parse_minsky(src).unwrap();
        let b = minsky_to_budget_nrcs(&f.machine);
        let init = with_budget(&Config::leaf(f.init.unwrap()), budget);
        let runs = all_runs(&b.nrcs, &init, depth);
        assert!(runs.len() > 2);
        for (run, trace) in runs {
            let sizes: Vec<usize> = trace.iter().map(Config::size).collect();
            assert!(
                sizes.windows(2).all(|w| w[1] <= w[0]),
                "size grew along {run:?}"
            );
            let conserved = sizes.last() == sizes.first();
            assert_eq!(
                honest_run_check(&b, &init, &run).unwrap(),
                conserved,
                "{run:?}"
            );
        }
    }
}

/// Honest budgeted runs project to Minsky runs, and Minsky runs whose counter
/// total stays within the budget lift to honest runs.
#[test]
fn zero_tests_match_honest_resets() {
    let m = machine(TWO_COUNTERS);
    let b = minsky_to_budget_nrcs(&m);
    let budget = 2;
    let start = Config::leaf(l("a"));
    let init = with_budget(&start, budget);
    for (run, trace) in all_runs(&b.nrcs, &init, 6) {
        if !honest_run_check(&b, &init, &run).unwrap() {
            continue;
        }
        for ((i, _), w) in run.iter().zip(trace.windows(2)) {
            let (before, _) = split_budget(&w[0]);
            let (after, _) = split_budget(&w[1]);
            assert!(minsky_step(&m, &before, b.origin[*i]).contains(&after));
        }
    }
    // Breadth-first over Minsky configurations with at most `budget` counters,
    // each paired with a budgeted configuration reached honestly.
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, init)]);
    while let Some((c, d)) = queue.pop_front() {
        assert_eq!(split_budget(&d), (c.clone(), budget - (c.size() - 1)));
        for (mv, c2) in m.successors(&c) {
            if c2.size() - 1 > budget {
                continue;
            }
            let i = b.origin.iter().position(|o| *o == mv).unwrap();
            let lifted: Vec<Config> = b
                .nrcs
                .successors(&d)
                .into_iter()
                .filter(|(j, a, _)| {
                    *j == i && honest_run_check(&b, &d, &[(*j, a.clone())]).unwrap()
                })
                .map(|(_, _, y)| y)
                .collect();
            let hit = lifted
                .into_iter()
                .find(|y| split_budget(y).0 == c2)
                .expect("Minsky step lifts");
            if seen.insert(c2.clone()) {
                queue.push_back((c2, hit));
            }
        }
    }
    assert!(seen.len() >= 6);
}

#[test]
fn normalization_adds_drain_and_tests() {
    let m = machine(DISHONEST);
    let (n, fin, added) = normalize_final(&m, &l("f")).unwrap();
    assert_eq!(fin, l("f.final"));
    assert_eq!(
        added,
        vec![
            "update f -> f.drain",
            "update f.drain,c -> f.drain",
            "zerotest f.drain [c] -> f.final"
        ]
    );
    assert_eq!(n.zero_tests().len(), 2);
    // Still unreachable: `f` itself needs the dishonest test.
    let reach = |m: &MinskyMachine| {
        let mut seen = BTreeSet::from([Config::leaf(l("s"))]);
        let mut todo = vec![Config::leaf(l("s"))];
        while let Some(c) = todo.pop() {
            for (_, d) in m.successors(&c) {
                if d.size() <= 4 && seen.insert(d.clone()) {
                    todo.push(d);
                }
            }
        }
        seen.iter().any(|c| *c.label() == fin)
    };
    assert!(!reach(&n));
    let (h, fin_h, _) = normalize_final(&machine(HONEST), &l("f")).unwrap();
    assert_eq!(fin_h, fin);
    assert!(reach(&h));
}

fn example_nrcs() -> Nrcs {
    Nrcs::from_transitions(
        2,
        vec![
            Transition::update(&["q0", "q1"], &["q1"]),
            Transition::update(&["q1"], &["q0", "q1", "q2"]),
            Transition::reset(&["q0"], "q1", &["q3"]),
        ],
    )
    .unwrap()
}

/// Configurations reachable in `n` from `c` with at most `cap` nodes.
fn reachable(n: &Nrcs, c: &Config, cap: usize) -> BTreeSet<Config> {
    let mut seen = BTreeSet::from([c.clone()]);
    let mut todo = vec![c.clone()];
    while let Some(x) = todo.pop() {
        for (_, _, y) in n.successors(&x) {
            if y.size() <= cap && seen.insert(y.clone()) {
                todo.push(y);
            }
        }
    }
    seen
}

#[test]
fn single_node_wrapper() {
    let n = example_nrcs();
    let w = simple_coverability_wrappers(&n, &t("q0")).unwrap();
    assert_eq!(w.forward, vec![Transition::update(&["sc.init"], &["q0"])]);
    assert!(w.branches.is_empty());
}

#[test]
fn wrapper_builds_exactly_the_example_tree() {
    let n = example_nrcs();
    let c = t("q0(q1(q3),q2,q1(q2,q2))");
    let w = simple_coverability_wrappers(&n, &c).unwrap();
    assert_eq!(w.branches, vec![t("q1(q2,q2)"), t("q1(q3)"), t("q2")]);
    let mut states = n.states().to_vec();
    states.extend(w.aux.iter().cloned());
    let fwd = Nrcs::new(2, states.clone(), w.forward.clone()).unwrap();
    let reach = reachable(&fwd, &Config::leaf(w.q_init.clone()), 20);
    let in_n: Vec<&Config> = reach.iter().filter(|x| n.has_state(x.label())).collect();
    assert_eq!(in_n, vec![&c]);
    assert_eq!(reach.len(), w.forward.len() + 1);

    // The backward fragment reaches `q_f` exactly from the covering candidates.
    let bwd = Nrcs::new(2, states, w.backward.clone()).unwrap();
    for (cand, covers) in [
        (c.clone(), true),
        (t("q0(q1(q3,q2),q2,q2,q1(q2,q2,q0))"), true),
        (t("q0(q1(q3),q2,q1(q2))"), false),
        (t("q0(q1(q3,q2,q2),q2)"), false),
        (t("q1(q1(q3),q2,q1(q2,q2))"), false),
    ] {
        assert_eq!(leq_is(&c, &cand), covers);
        let hit = reachable(&bwd, &cand, 20)
            .iter()
            .any(|x| *x.label() == w.q_f);
        assert_eq!(hit, covers, "{cand}");
    }
}

fn leq_is(c: &Config, d: &Config) -> bool {
    crate::nrcs::leq_induced(c, d)
}

/// Coverability of `(N, C, C')` agrees with simple coverability of the
/// composed machine, both decided by the backward solver.
#[test]
fn composed_instance_equivalence() {
    let n = Nrcs::from_transitions(
        2,
        vec![
            Transition::update(&["a"], &["b", "c"]),
            Transition::update(&["b", "c"], &["a", "b"]),
            Transition::reset(&["a"], "b", &["c"]),
            Transition::update(&["c", "a"], &["c", "a", "a"]),
        ],
    )
    .unwrap();
    let cases = [
        ("a", "c(b)"),
        ("a", "a(b(a))"),
        ("a(b)", "c"),
        ("a(a)", "c(a(a))"),
        ("b(c)", "c"),
        ("c(a)", "c(a(a,a))"),
        ("c", "a"),
        ("b", "c(b)"),
    ];
    let mut seen = BTreeSet::new();
    for (from, to) in cases {
        let (c, c2) = (t(from), t(to));
        let direct = backward_coverability(&n, &c, &c2, 200).unwrap();
        let s = compose_simple(&n, &c, &c2).unwrap();
        let wrapped = backward_coverability(&s.nrcs, &s.init, &s.target, 200).unwrap();
        assert_eq!(direct.decision, wrapped.decision, "{from} → {to}");
        if let Some(run) = &wrapped.certificate {
            assert!(verify_certificate(&s.nrcs, &s.init, &s.target, run));
        }
        seen.insert(direct.decision == Decision::Coverable);
    }
    assert_eq!(seen.len(), 2, "both answers occur");
}

/// In the composed machine every configuration rooted in `N` is reachable
/// in `N` from `C`.
#[test]
fn wrapper_soundness() {
    let n = example_nrcs();
    let c = t("q0(q1(q2),q1)");
    let s = compose_simple(&n, &c, &t("q3")).unwrap();
    let cap = 7;
    let direct = reachable(&n, &c, cap);
    for x in reachable(&s.nrcs, &s.init, cap) {
        if n.has_state(x.label()) && x.labels().iter().all(|l| n.has_state(l)) {
            assert!(direct.contains(&x), "{x}");
        }
    }
}

const TRIVIAL: &str = "minsky k=1
states a b
update a -> b
init a
target b
";

fn chained(src: &str, k: usize, ell: u64) -> ReductionInstance {
    let f = parse_minsky(src).unwrap();
    build_bounded_reduction(
        &f.machine,
        k,
        ell,
        f.init.as_ref().unwrap(),
        f.target.as_ref().unwrap(),
    )
    .unwrap()
}

#[test]
fn chained_instance_shape() {
    let r = chained(TRIVIAL, 1, 1);
    assert_eq!(r.init, t("w(#,w@w1)"));
    assert_eq!(r.target, t("w(#,done,w@w1)"));
    assert_eq!(
        r.provenance.bridges,
        vec!["update w -> m:a", "update m:b.final -> w,done"]
    );
    assert_eq!(r.provenance.origins.len(), r.nrcs.transitions().len());
    for (o, want) in [(Origin::BridgeIn, 1), (Origin::BridgeOut, 1)] {
        assert_eq!(
            r.provenance.origins.iter().filter(|x| **x == o).count(),
            want
        );
    }
    let json = serde_json::to_string(&r.provenance).unwrap();
    assert!(json.contains("\"bridge-in\""));
}

#[test]
fn trivial_machine_is_coverable() {
    let r = chained(TRIVIAL, 1, 1);
    let v = backward_coverability(&r.nrcs, &r.init, &r.target, 1000).unwrap();
    assert_eq!(v.decision, Decision::Coverable);
    assert!(verify_certificate(
        &r.nrcs,
        &r.init,
        &r.target,
        v.certificate.as_ref().unwrap()
    ));
}

#[test]
fn dishonest_reset_is_not_coverable() {
    let honest = chained(HONEST, 1, 1);
    let v = backward_coverability(&honest.nrcs, &honest.init, &honest.target, 1000).unwrap();
    assert_eq!(v.decision, Decision::Coverable);
    let run = v.certificate.unwrap();
    assert!(verify_certificate(
        &honest.nrcs,
        &honest.init,
        &honest.target,
        &run
    ));

    let dishonest = chained(DISHONEST, 1, 1);
    let v =
        backward_coverability(&dishonest.nrcs, &dishonest.init, &dishonest.target, 1000).unwrap();
    assert_eq!(v.decision, Decision::NotCoverable);
    // The reachable set is finite here, and a full forward search agrees.
    let o = forward_explore(
        &dishonest.nrcs,
        &dishonest.init,
        16,
        1_000_000,
        &dishonest.target,
    );
    assert!(
        matches!(o, ForwardOutcome::Exhausted { pruned: false, .. }),
        "{o:?}"
    );
}
