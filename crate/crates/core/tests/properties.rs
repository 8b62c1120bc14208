//! Randomized laws across the library.

use std::cmp::Ordering;

use nrcs_core::coverability::{backward_coverability, pre_basis, Decision};
use nrcs_core::encoding::{
    decode_tree, encodable_ordinals, encode_tree, hardy_rewrite, EncodingParams, HardyState,
};
use nrcs_core::nmwqo::{
    canonical_expr, delta, m_bound, max_bad_sequence, residual_bound_expr, slice, tree_expr,
    tree_to_element, BadSequenceQuery, NmExpr,
};
use nrcs_core::nrcs::{embedding, leq_induced, parse_tree, sub_configs};
use nrcs_core::ordinal::{cichon_eval, compare, hardy_eval, parse_ordinal};
use nrcs_core::reductions::{
    honest_run_check, minsky_to_budget_nrcs, parse_minsky, split_budget, with_budget,
};
use nrcs_core::{Config, ControlFunction, Label, Nrcs, Ordinal, Transition};
use proptest::prelude::*;

const BUDGET: u64 = 200_000;

fn ordinal() -> impl Strategy<Value = Ordinal> {
    let leaf = (0u64..4).prop_map(Ordinal::nat);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop::collection::vec((inner, 1u64..4), 1..4).prop_map(Ordinal::from_terms)
    })
}

/// Ordinals below `ω^ω`, so hierarchy values stay at desk scale.
fn small_ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::vec((0u64..3, 1u64..3), 0..3)
        .prop_map(|v| Ordinal::from_terms(v.into_iter().map(|(e, c)| (Ordinal::nat(e), c))))
}

fn limit() -> impl Strategy<Value = Ordinal> {
    ordinal().prop_filter("limit", Ordinal::is_limit)
}

const LABELS: [&str; 3] = ["a", "b", "c"];

fn labels() -> Vec<Label> {
    LABELS.iter().map(|s| Label::new(s)).collect()
}

fn label() -> impl Strategy<Value = Label> {
    prop::sample::select(labels())
}

/// Trees of height at most `h` with at most three children per node.
fn config(h: usize) -> BoxedStrategy<Config> {
    if h == 0 {
        return label().prop_map(Config::leaf).boxed();
    }
    (label(), prop::collection::vec(config(h - 1), 0..3))
        .prop_map(|(l, kids)| Config::new(l, kids))
        .boxed()
}

fn small_config(h: usize, max: usize) -> impl Strategy<Value = Config> {
    config(h).prop_filter("size", move |c| c.size() <= max)
}

fn path(len: usize) -> impl Strategy<Value = Vec<Label>> {
    prop::collection::vec(label(), len..=len)
}

/// Updates and resets of a k-NRCS over `a, b, c`.
fn transition(k: usize) -> impl Strategy<Value = Transition> {
    let update = (1..=k + 1).prop_flat_map(move |n| {
        let m = if n == 1 { 1..3usize } else { n - 1..n + 1 };
        (path(n), m.prop_flat_map(path)).prop_map(|(src, dst)| Transition::Update { src, dst })
    });
    let reset = (1..=k).prop_flat_map(|n| {
        (path(n), label(), path(n)).prop_map(|(src, reset, dst)| Transition::Reset {
            src,
            reset,
            dst,
        })
    });
    prop_oneof![3 => update, 1 => reset]
}

fn machine(k: usize) -> impl Strategy<Value = Nrcs> {
    prop::collection::vec(transition(k), 1..5)
        .prop_filter_map("valid", move |ts| Nrcs::new(k, labels(), ts).ok())
}

fn succ() -> ControlFunction {
    ControlFunction::succ()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compare_is_a_total_order(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(compare(&a, &b), compare(&b, &a).reverse());
        prop_assert_eq!(compare(&a, &b) == Ordering::Equal, a == b);
        if compare(&a, &b) != Ordering::Greater && compare(&b, &c) != Ordering::Greater {
            prop_assert_ne!(compare(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn natural_sum_laws(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.natural_sum(&b), b.natural_sum(&a));
        prop_assert_eq!(a.natural_sum(&b).natural_sum(&c), a.natural_sum(&b.natural_sum(&c)));
        prop_assert_eq!(a.natural_sum(&Ordinal::zero()), a.clone());
        prop_assert!(a.natural_sum(&b) >= a);
    }

    #[test]
    fn fundamental_sequences_approach_from_below(l in limit(), x in 1u64..6) {
        let lx = l.fundamental_sequence(x).unwrap();
        prop_assert!(lx < l);
        prop_assert!(lx < l.fundamental_sequence(x + 1).unwrap());
    }

    #[test]
    fn text_round_trip(a in ordinal()) {
        prop_assert_eq!(parse_ordinal(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn leanness_is_monotone(a in ordinal(), l in 0u64..4) {
        if a.is_lean(l) {
            prop_assert!(a.is_lean(l + 1));
        }
    }

    #[test]
    fn predecessor_is_below(a in small_ordinal(), n in 1u64..4) {
        prop_assume!(!a.is_zero());
        prop_assert!(a.predecessor_p(n).unwrap() < a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// One `→_H` step preserves the Hardy value.
    #[test]
    fn hardy_rewrite_preserves_value(i in 0usize..64, n in 0u64..4) {
        let p = EncodingParams::new(1, 2).unwrap();
        let pool = encodable_ordinals(&p, 2);
        let a = pool[i % pool.len()].clone();
        prop_assume!(!a.is_zero());
        let s = HardyState::new(a.clone(), n, &p).unwrap();
        let Ok(t) = hardy_rewrite(&s) else { return Ok(()) };
        let before = hardy_eval::<u64>(&succ(), &a, n, BUDGET).unwrap();
        let after = hardy_eval::<u64>(&succ(), t.alpha(), t.n(), BUDGET).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn encoding_round_trip(i in 0usize..400, k in 1usize..3, l in 1u64..3) {
        let p = EncodingParams::new(k, l).unwrap();
        let pool = encodable_ordinals(&p, l);
        let a = &pool[i % pool.len()];
        prop_assume!(!a.is_zero());
        let t = encode_tree(a, &p).unwrap();
        prop_assert_eq!(&decode_tree(&t, &p).unwrap(), a);
    }

    /// Embedding of encoder trees refines the ordinal order.
    #[test]
    fn tree_embedding_refines_order(i in 0usize..400, j in 0usize..400) {
        let p = EncodingParams::new(2, 1).unwrap();
        let pool = encodable_ordinals(&p, 1);
        let (a, b) = (&pool[i % pool.len()], &pool[j % pool.len()]);
        prop_assume!(!a.is_zero() && !b.is_zero());
        if leq_induced(&encode_tree(a, &p).unwrap(), &encode_tree(b, &p).unwrap()) {
            prop_assert!(a <= b);
        }
    }

    /// Every member of `δ_n(α)` is below `α` and lean as predicted.
    #[test]
    fn derivatives_descend_and_stay_lean(a in ordinal(), n in 1u64..4) {
        prop_assume!(!a.is_zero() && a.is_lean(3));
        let l = a.max_coefficient().max(1);
        let k = u64::from(a.layer());
        for d in delta(&a, n).unwrap() {
            prop_assert!(d < a, "{} not below {}", d, a);
            prop_assert!(d.is_lean(l + l * n * k), "{} from {}", d, a);
        }
    }

    #[test]
    fn order_type_round_trip(a in ordinal()) {
        prop_assert_eq!(canonical_expr(&a).order_type(), a);
    }

    /// The Cichoń bound on derivatives, checked at the first admissible points.
    #[test]
    fn derivative_cichon_bound(a in small_ordinal(), n in 1u64..3, dy in 0u64..3) {
        prop_assume!(!a.is_zero());
        let l = a.max_coefficient().max(1);
        let k = u64::from(a.layer());
        let m = l + l * n * k;
        let h = ControlFunction::times_self(&ControlFunction::linear(2).unwrap());
        let y = m + dy;
        let p = a.predecessor_p(m).unwrap();
        let Ok(bound) = cichon_eval::<u64>(&h, &p, y, BUDGET) else { return Ok(()) };
        for d in delta(&a, n).unwrap() {
            if let Ok(v) = cichon_eval::<u64>(&h, &d, y, BUDGET) {
                prop_assert!(v <= bound, "{}: {} > {}", d, v, bound);
            }
        }
    }
}

/// Expressions of order type below `ω^ω` with a handful of grammar nodes.
fn small_expr() -> impl Strategy<Value = NmExpr> {
    prop::sample::select(vec!["M[G0]", "G2", "M[G1]", "(M[G1] + M[G0])", "G3"])
        .prop_map(|s| nrcs_core::nmwqo::parse_expr(s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiset_order_is_a_preorder(e in small_expr(), i in 0usize..50, j in 0usize..50, k in 0usize..50) {
        let s = slice(&e, 3);
        prop_assume!(!s.is_empty());
        let (x, y, z) = (&s[i % s.len()], &s[j % s.len()], &s[k % s.len()]);
        prop_assert!(e.leq(x, x).unwrap());
        if e.leq(x, y).unwrap() && e.leq(y, z).unwrap() {
            prop_assert!(e.leq(x, z).unwrap());
        }
    }

    #[test]
    fn trees_embed_as_nested_multisets(c in small_config(2, 6), d in small_config(2, 6)) {
        let e = tree_expr(2, LABELS.len());
        let (x, y) = (tree_to_element(&c, 2, &labels()).unwrap(), tree_to_element(&d, 2, &labels()).unwrap());
        prop_assert_eq!(e.leq(&x, &y).unwrap(), leq_induced(&c, &d));
        prop_assert!(e.norm(&x).unwrap() <= c.size() as u64);
    }

    /// The reflection expression has an order type below some derivative.
    #[test]
    fn reflection_is_bounded_by_a_derivative(e in small_expr(), i in 0usize..50, n in 1u64..4) {
        let s = slice(&e, n);
        prop_assume!(!s.is_empty());
        let a = &s[i % s.len()];
        let r = residual_bound_expr(&e, a, n).unwrap();
        let o = r.order_type();
        prop_assert!(delta(&e.order_type(), n).unwrap().iter().any(|d| o <= *d), "{} for {}", o, e);
    }

    #[test]
    fn bad_sequences_within_m_bound(e in small_expr(), n in 1u64..3) {
        let g = ControlFunction::linear(2).unwrap();
        let r = max_bad_sequence(&BadSequenceQuery { expr: e.clone(), control: g.clone(), n, cap: 40 });
        prop_assume!(!r.cap_hit);
        let m = m_bound::<u64>(&e.order_type(), &g, n, BUDGET).unwrap();
        prop_assert!(r.length as u64 <= m, "{}: {} > {}", e, r.length, m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tree_text_round_trip(c in config(3)) {
        prop_assert_eq!(parse_tree(&c.to_string()).unwrap(), c);
    }

    /// Compatibility: a step from `C` lifts to any `D ≥ C` and stays above.
    #[test]
    fn steps_lift_along_embeddings(n in machine(2), d in small_config(2, 6), pick in 0usize..64) {
        let subs: Vec<Config> = sub_configs(&d).into_iter().collect();
        let c = &subs[pick % subs.len()];
        let emb = embedding(c, &d).expect("sub-configuration embeds");
        for (i, anchor, c2) in n.successors(c) {
            let lifted = emb.lift(&anchor).expect("anchor lifts");
            let d2 = n.apply_at(&d, i, &lifted).expect("lifted step applies");
            prop_assert!(leq_induced(&c2, &d2), "{} vs {}", c2, d2);
        }
    }

    #[test]
    fn steps_are_lossy_steps_and_keep_height(n in machine(2), c in small_config(2, 6)) {
        for (i, _, c2) in n.successors(&c) {
            prop_assert!(c2.height() <= n.k());
            prop_assert!(n.lossy_step(&c, i).contains(&c2));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pre_basis_is_sound_and_small(n in machine(2), c in small_config(2, 4)) {
        for b in pre_basis(&n, &c).elements() {
            prop_assert!(b.size() <= c.size() + n.k() + 1);
            prop_assert!(n.successors(b).iter().any(|(_, _, s)| leq_induced(&c, s)), "{} has no step above {}", b, c);
        }
    }

    /// A larger initial configuration never loses coverability.
    #[test]
    fn coverability_is_monotone_in_init(n in machine(1), init in small_config(1, 3), extra in small_config(0, 1), target in small_config(1, 3)) {
        let bigger = Config::new(init.label().clone(), [init.children(), &[extra]].concat());
        let small = backward_coverability(&n, &init, &target, 500).unwrap();
        if small.decision == Decision::Coverable {
            prop_assert_eq!(backward_coverability(&n, &bigger, &target, 500).unwrap().decision, Decision::Coverable);
        }
    }
}

const TWO_COUNTERS: &str = "minsky k=1
states a b x y
update a -> a,x
update a,x -> b,y
update b,y -> a
zerotest a [x] -> b
zerotest b [y] -> a
init a
";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// `|C| + n` never grows and stays put exactly on honest runs.
    #[test]
    fn budget_is_conserved_on_honest_runs(choices in prop::collection::vec(0usize..64, 0..10), budget in 0usize..4) {
        let f = parse_minsky(TWO_COUNTERS).unwrap();
        let b = minsky_to_budget_nrcs(&f.machine);
        let init = with_budget(&Config::leaf(f.init.unwrap()), budget);
        let weight = |c: &Config| {
            let (rest, n) = split_budget(c);
            rest.size() + n
        };
        let mut cur = init.clone();
        let mut run = Vec::new();
        for ch in choices {
            let succ = b.nrcs.successors(&cur);
            if succ.is_empty() {
                break;
            }
            let (i, a, next) = succ[ch % succ.len()].clone();
            prop_assert!(weight(&next) <= weight(&cur));
            run.push((i, a));
            cur = next;
        }
        let honest = honest_run_check(&b, &init, &run).unwrap();
        prop_assert_eq!(honest, weight(&cur) == weight(&init));
    }
}
