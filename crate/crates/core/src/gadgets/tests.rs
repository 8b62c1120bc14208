use super::*;
use crate::nrcs::parse_tree;
use crate::ordinal::parse_ordinal;

fn params(k: usize, l: u64) -> EncodingParams {
    EncodingParams::new(k, l).unwrap()
}

fn t(s: &str) -> Config {
    parse_tree(s).unwrap()
}

fn finish(g: &Gadget, input: &Config) -> Config {
    let run = g.synthesize_perfect_run(input).unwrap();
    g.nrcs().replay(input, &run).unwrap().pop().unwrap()
}

#[test]
fn smallest_example() {
    let g = Gadget::build(GadgetKind::Smallest, params(1, 2)).unwrap();
    let input = t("start_sm(w@w1,w@w0)");
    let out = finish(&g, &input);
    assert_eq!(out, t("end_sm(w@w1,smallest@w0)"));
    assert!(validate_encoder(
        GadgetKind::Smallest,
        &input,
        &out,
        &g.params(),
        Strictness::Perfect
    ));
}

#[test]
fn copy_example() {
    let g = Gadget::build(GadgetKind::Copy, params(1, 2)).unwrap();
    let shown: Vec<String> = g
        .nrcs()
        .transitions()
        .iter()
        .map(|t| t.to_string())
        .collect();
    assert!(shown.contains(&"update start_copy,mrkd@w1 -> start_copy',mrkd_1@w1".to_string()));
    let input = t("start_copy(mrkd@w1,w@w0)");
    assert_eq!(finish(&g, &input), t("end_copy(w@w1,cpd@w1,w@w0)"));
}

#[test]
fn hardy_forward_example() {
    let p = params(1, 2);
    let g = Gadget::build(GadgetKind::HardyForward, p).unwrap();
    let shown: Vec<String> = g
        .nrcs()
        .transitions()
        .iter()
        .map(|t| t.to_string())
        .collect();
    assert!(shown.contains(&"update w,w@w0 -> succ".to_string()));
    assert!(shown.contains(&"update succ -> w,#".to_string()));
    let input = make_hardy_config(&parse_ordinal("w").unwrap(), 2, &p).unwrap();
    let out = finish(&g, &input);
    assert_eq!(
        out,
        make_hardy_config(&parse_ordinal("0").unwrap(), 4, &p).unwrap()
    );
}

fn completeness(kind: GadgetKind, p: EncodingParams, max_nodes: usize) -> usize {
    let g = Gadget::build(kind, p).unwrap();
    let inputs = encoder_inputs(kind, &p, max_nodes);
    for input in &inputs {
        let run = g
            .synthesize_perfect_run(input)
            .unwrap_or_else(|e| panic!("{kind} on {input}: {e}"));
        let out = g.nrcs().replay(input, &run).unwrap().pop().unwrap();
        if let Some(why) = encoder_violation(kind, input, &out, &p, Strictness::Perfect) {
            panic!("{kind} on {input} gave {out}: {why}");
        }
    }
    inputs.len()
}

#[test]
fn complete_at_k1() {
    for kind in [
        GadgetKind::Copy,
        GadgetKind::Comparator,
        GadgetKind::Smallest,
        GadgetKind::Biggest,
    ] {
        assert!(completeness(kind, params(1, 2), 6) > 5, "{kind}");
    }
}

#[test]
fn complete_at_k2() {
    for kind in [
        GadgetKind::Copy,
        GadgetKind::Comparator,
        GadgetKind::Smallest,
        GadgetKind::Biggest,
    ] {
        assert!(completeness(kind, params(2, 2), 5) > 5, "{kind}");
    }
}

#[test]
fn input_counts() {
    let p = params(1, 2);
    // Forests over {w@w0, w@w1, w@w2} within the bound ω^2: w@w2 only alone.
    assert_eq!(encoder_inputs(GadgetKind::Smallest, &p, 3).len(), 2 + 3 + 1);
}

fn hardy_value(a: &crate::ordinal::Ordinal, n: u64) -> Option<u64> {
    crate::ordinal::hardy_eval::<u64>(&crate::ordinal::ControlFunction::succ(), a, n, 10_000).ok()
}

#[test]
fn hardy_forward_complete() {
    for p in [params(1, 2), params(2, 1), params(2, 2)] {
        let g = Gadget::build(GadgetKind::HardyForward, p).unwrap();
        let mut limits = 0;
        for input in encoder_inputs(GadgetKind::HardyForward, &p, 4) {
            let s = decode_hardy_config(&input, &p).unwrap();
            let Some(h) = hardy_value(s.alpha(), s.n()) else {
                continue;
            };
            if h > 64 {
                continue;
            }
            let out = finish(&g, &input);
            let end = decode_hardy_config(&out, &p).unwrap();
            if s.n() > 0 || !s.alpha().is_limit() {
                assert!(
                    end.alpha().is_zero() || end.alpha().is_limit() && end.n() == 0,
                    "{input} -> {out}"
                );
            }
            if end.alpha().is_zero() {
                assert_eq!(end.n(), h, "{input} -> {out}");
            }
            limits += usize::from(s.alpha().is_limit() && s.n() > 0);
        }
        assert!(limits >= 4, "{limits} limit inputs at k = {}", p.k());
    }
}

#[test]
fn hardy_backward_inverts() {
    for p in [params(1, 2), params(2, 1)] {
        let g = Gadget::build(GadgetKind::HardyBackward, p).unwrap();
        let shown: Vec<String> = g
            .nrcs()
            .transitions()
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert!(shown.iter().any(|t| t.starts_with("update w,# -> w,w")));
        for target in encoder_inputs(GadgetKind::HardyBackward, &p, 4) {
            let mut s = decode_hardy_config(&target, &p).unwrap();
            let mut steps = 0;
            while !s.alpha().is_zero() && steps < 40 && !(s.alpha().is_limit() && s.n() == 0) {
                s = crate::encoding::hardy_rewrite(&s).unwrap();
                steps += 1;
                let input = make_hardy_config(s.alpha(), s.n() as usize, &p).unwrap();
                let run = g
                    .backward_run(&input, &target)
                    .unwrap_or_else(|e| panic!("{input} back to {target}: {e}"));
                let out = g.nrcs().replay(&input, &run).unwrap().pop().unwrap();
                assert_eq!(out, target);
            }
        }
    }
}

#[test]
fn soundness_examples() {
    let p = params(1, 2);
    let g = Gadget::build(GadgetKind::Smallest, p).unwrap();
    let r = g
        .check_soundness_by_search(&t("start_sm(w@w1,w@w0)"), 100_000)
        .unwrap();
    assert!(
        !r.cutoff && r.terminals > 0 && r.violations.is_empty(),
        "{r:?}"
    );
    let g = Gadget::build(GadgetKind::HardyForward, p).unwrap();
    let input = make_hardy_config(&parse_ordinal("2").unwrap(), 1, &p).unwrap();
    let r = g.check_soundness_by_search(&input, 100_000).unwrap();
    assert!(
        !r.cutoff && r.terminals >= 3 && r.violations.is_empty(),
        "{r:?}"
    );
    let r = g.check_soundness_by_search(&input, 1).unwrap();
    assert!(r.cutoff);
}

#[test]
fn soundness_k1() {
    let p = params(1, 2);
    for kind in GadgetKind::ALL {
        let g = Gadget::build(kind, p).unwrap();
        let (mut total, mut cut) = (0, 0);
        for input in encoder_inputs(kind, &p, 4) {
            let r = g.check_soundness_by_search(&input, 100_000).unwrap();
            assert!(
                r.violations.is_empty(),
                "{kind} on {input}: {:?}",
                r.violations[0]
            );
            total += r.terminals;
            cut += usize::from(r.cutoff);
        }
        println!("{kind}: {total} terminals, {cut} cutoffs");
    }
}

/// Structural monotonicity of `H` fails at `n = 0`: `T_1 ≤_is T_ω` yet
/// `H^1(0) = 1 > H^ω(0) = 0`. Removing the whole `ω` child on a successor
/// guess therefore raises the value, and the search reports it.
#[test]
fn hardy_bound_fails_at_zero_budget() {
    let p = params(1, 2);
    let g = Gadget::build(GadgetKind::HardyForward, p).unwrap();
    let input = make_hardy_config(&parse_ordinal("w").unwrap(), 0, &p).unwrap();
    let r = g.check_soundness_by_search(&input, 100_000).unwrap();
    let bad: Vec<&str> = r.violations.iter().map(|v| v.config.as_str()).collect();
    assert_eq!(bad, ["w(#)"]);
}

/// Known gap at k = 2: the comparator's clean-up reset can drop a child of
/// a node already labelled equal, and the backward machine then descends
/// into a successor exponent. The search finds a configuration above the
/// input's Hardy value.
#[test]
fn backward_gap_at_k2() {
    let p = params(2, 1);
    let g = Gadget::build(GadgetKind::HardyBackward, p).unwrap();
    let r = g
        .check_soundness_by_search(&t("w(#,#,w,w)"), 100_000)
        .unwrap();
    assert!(
        r.violations.iter().any(|v| v.config == "w(#,w,w(w@w1))"),
        "{r:?}"
    );
}
