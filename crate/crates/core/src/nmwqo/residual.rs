//! The reflection bound `R_n(A, a)`: an expression into which the residual
//! `{x ∈ A : a ≰ x}` embeds, restricted to norm-`n` controlled elements.

use super::{shape, NmElem, NmError, NmExpr, Side};

/// Builds `R_n(A, a)` by the four structural cases. `Γ₀` summands are
/// dropped before matching, since they have no elements.
pub fn residual_bound_expr(expr: &NmExpr, a: &NmElem, n: u64) -> Result<NmExpr, NmError> {
    if expr.is_empty_domain() {
        return Err(NmError::Invalid(format!("{expr} has an empty domain")));
    }
    if n == 0 {
        return Err(NmError::Invalid("n must be at least 1".into()));
    }
    let norm = expr.norm(a)?;
    if norm > n {
        return Err(NmError::Invalid(format!(
            "norm of {a} is {norm}, above n = {n}"
        )));
    }
    reflect(expr, a, n)
}

fn reflect(expr: &NmExpr, a: &NmElem, n: u64) -> Result<NmExpr, NmError> {
    match expr {
        NmExpr::Multi(inner) => reflect_multi(inner, a, n),
        NmExpr::Sum(..) => {
            // Case 4: the other summands survive, the hit one is reflected.
            let (i, part, x) = locate(expr, a)?;
            let parts = expr.summands();
            let mut out: Vec<NmExpr> = parts
                .iter()
                .enumerate()
                .filter(|(k, p)| *k != i && !p.is_empty_domain())
                .map(|(_, p)| (*p).clone())
                .collect();
            out.push(reflect(part, x, n)?);
            Ok(NmExpr::sum_of(out))
        }
        NmExpr::Gamma0 => Err(shape(expr, a)),
    }
}

// `⟨inner⟩` at the bag `a`.
fn reflect_multi(inner: &NmExpr, a: &NmElem, n: u64) -> Result<NmExpr, NmError> {
    let NmElem::Bag(items) = a else {
        return Err(shape(&NmExpr::multi(inner.clone()), a));
    };
    let parts: Vec<&NmExpr> = inner
        .summands()
        .into_iter()
        .filter(|p| !p.is_empty_domain())
        .collect();
    match parts.as_slice() {
        // Case 1: ⟨Γ₀⟩ has only ∅, so nothing avoids it.
        [] => Ok(NmExpr::Gamma0),
        // Case 3: ⟨⟨B⟩⟩, one summand per item of a.
        [NmExpr::Multi(b)] => {
            let mut out = Vec::with_capacity(items.len());
            for ai in items {
                let r = reflect_multi(b, strip_to(inner, ai)?, n)?;
                out.push(NmExpr::multi(NmExpr::sum((**b).times(n as usize - 1), r)));
            }
            Ok(NmExpr::sum_of(out))
        }
        // Case 2: split a by component and reflect each ⟨B_i⟩ separately.
        _ => {
            let all = inner.summands();
            let mut out = Vec::new();
            for (i, bi) in all.iter().enumerate() {
                if bi.is_empty_domain() {
                    continue;
                }
                let mut b_i = Vec::new();
                for item in items {
                    let (j, _, x) = locate(inner, item)?;
                    if j == i {
                        b_i.push(x.clone());
                    }
                }
                let r = reflect_multi(bi, &NmElem::Bag(b_i), n)?;
                let others: Vec<NmExpr> = all
                    .iter()
                    .enumerate()
                    .filter(|(k, p)| *k != i && !p.is_empty_domain())
                    .map(|(_, p)| (*p).clone())
                    .collect();
                for bij in inner_multis(&r) {
                    let mut s = others.clone();
                    s.push(bij);
                    out.push(NmExpr::multi(NmExpr::sum_of(s)));
                }
            }
            Ok(NmExpr::sum_of(out))
        }
    }
}

// `inner` flattens to a single non-empty summand; peel the tags leading to it.
fn strip_to<'a>(inner: &NmExpr, x: &'a NmElem) -> Result<&'a NmElem, NmError> {
    match inner {
        NmExpr::Sum(..) => locate(inner, x).map(|(_, _, e)| e),
        _ => Ok(x),
    }
}

// The `B_i^j` in a reflection result `Σ_j ⟨B_i^j⟩`.
fn inner_multis(r: &NmExpr) -> Vec<NmExpr> {
    r.summands()
        .into_iter()
        .filter_map(|p| match p {
            NmExpr::Multi(b) => Some((**b).clone()),
            _ => None,
        })
        .collect()
}

/// Index in `expr.summands()`, the summand, and the untagged element.
fn locate<'a, 'b>(
    expr: &'a NmExpr,
    x: &'b NmElem,
) -> Result<(usize, &'a NmExpr, &'b NmElem), NmError> {
    match (expr, x) {
        (NmExpr::Sum(l, r), NmElem::Tagged(side, inner)) => match side {
            Side::Left => locate(l, inner),
            Side::Right => {
                let offset = l.summands().len();
                locate(r, inner).map(|(i, p, e)| (i + offset, p, e))
            }
        },
        (NmExpr::Sum(..), _) => Err(shape(expr, x)),
        _ => Ok((0, expr, x)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;

    fn e(s: &str) -> NmExpr {
        parse_expr(s).unwrap()
    }

    fn empty() -> NmElem {
        NmElem::bag(vec![])
    }

    #[test]
    fn cases() {
        assert_eq!(
            residual_bound_expr(&e("M[G0]"), &empty(), 5).unwrap(),
            NmExpr::Gamma0
        );
        let r =
            residual_bound_expr(&e("M[M[G0]]"), &NmElem::bag(vec![empty(), empty()]), 3).unwrap();
        assert!(r.isomorphic(&NmExpr::gamma(2)), "{r}");
        let r = residual_bound_expr(&e("(M[G0] + M[G0])"), &NmElem::left(empty()), 2).unwrap();
        assert_eq!(r, NmExpr::sum(e("M[G0]"), NmExpr::Gamma0));
    }

    #[test]
    fn split_bag() {
        // ⟨Γ₂⟩ has order type ω², a = {L, L, R}.
        let a = NmElem::bag(vec![
            NmElem::left(empty()),
            NmElem::left(empty()),
            NmElem::right(empty()),
        ]);
        let r = residual_bound_expr(&e("M[G2]"), &a, 3).unwrap();
        // Σ_i Σ_j ⟨B_other + B_i^j⟩ with B_i^j = Γ₀·2 + Γ₀: two copies for L, one for R.
        assert_eq!(r.order_type().to_string(), "w*3");
    }

    #[test]
    fn rejects() {
        assert!(residual_bound_expr(&NmExpr::Gamma0, &empty(), 1).is_err());
        assert!(residual_bound_expr(&e("M[M[G0]]"), &NmElem::bag(vec![empty(); 4]), 3).is_err());
        assert!(residual_bound_expr(&e("M[G0]"), &empty(), 0).is_err());
    }
}
