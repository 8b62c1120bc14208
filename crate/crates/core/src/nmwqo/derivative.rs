//! The derivative operators `D_n`, `δ_n` and the descent bound `M_{α,g}(n)`.

use std::collections::{BTreeSet, HashMap};

use crate::ordinal::{ControlFunction, EvalError, Ordinal};
use crate::Natural;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivativeError {
    #[error("{0} is not of the form w^b")]
    NotOmegaPower(Ordinal),
    #[error("n must be at least 1")]
    ZeroN,
    #[error("delta is undefined at 0")]
    Zero,
    #[error("coefficient overflow")]
    Overflow,
}

/// `D_n(ω^β)`.
pub fn derivative_d(alpha: &Ordinal, n: u64) -> Result<Ordinal, DerivativeError> {
    let beta = alpha
        .as_omega_power()
        .ok_or_else(|| DerivativeError::NotOmegaPower(alpha.clone()))?;
    if n == 0 {
        return Err(DerivativeError::ZeroN);
    }
    d_exp(beta, n)
}

// D_n(ω^beta).
fn d_exp(beta: &Ordinal, n: u64) -> Result<Ordinal, DerivativeError> {
    if beta.is_zero() {
        return Ok(Ordinal::zero());
    }
    if let Some(gamma) = beta.as_omega_power() {
        // ω^{γ·(n−1) ⊕ D_n(ω^γ)}·n
        let e = gamma
            .checked_natural_mul(n - 1)
            .ok_or(DerivativeError::Overflow)?
            .natural_sum(&d_exp(gamma, n)?);
        return Ok(Ordinal::term(e, n));
    }
    // β = Σ β_i with at least two terms. Equal β_i give equal contributions,
    // so each distinct ω^γ is handled once and scaled by its coefficient.
    let mut out = Vec::new();
    for (gamma, c) in beta.terms() {
        let bi = Ordinal::omega_pow(gamma.clone());
        let rest = minus_one_term(beta, gamma);
        for (e, m) in d_exp(&bi, n)?.terms() {
            let m = m.checked_mul(*c).ok_or(DerivativeError::Overflow)?;
            out.push((rest.natural_sum(e), m));
        }
    }
    Ok(Ordinal::from_terms(out))
}

// α with one copy of ω^γ removed; γ must occur in α.
fn minus_one_term(alpha: &Ordinal, gamma: &Ordinal) -> Ordinal {
    Ordinal::from_terms(
        alpha
            .terms()
            .iter()
            .map(|(e, c)| (e.clone(), if e == gamma { c - 1 } else { *c })),
    )
}

/// `δ_n(α)`, one candidate per distinct CNF exponent.
pub fn delta(alpha: &Ordinal, n: u64) -> Result<BTreeSet<Ordinal>, DerivativeError> {
    if alpha.is_zero() {
        return Err(DerivativeError::Zero);
    }
    if n == 0 {
        return Err(DerivativeError::ZeroN);
    }
    alpha
        .terms()
        .iter()
        .map(|(b, _)| Ok(d_exp(b, n)?.natural_sum(&minus_one_term(alpha, b))))
        .collect()
}

/// `M_{α,g}(n) = max_{α' ∈ δ_n(α)} 1 + M_{α',g}(g(n))`, with `max ∅ = 0`.
///
/// `budget` bounds the number of evaluated `(α, n)` nodes. On exhaustion the
/// error carries the longest descent chain found so far, a lower bound.
///
/// # Panics
///
/// If `n = 0` and `α > 0`, where `δ_n` is undefined.
pub fn m_bound<N: Natural>(
    alpha: &Ordinal,
    g: &ControlFunction,
    n: u64,
    budget: u64,
) -> Result<N, EvalError<N>> {
    struct Frame<N> {
        key: (Ordinal, u64),
        next_n: u64,
        kids: Vec<Ordinal>,
        at: usize,
        best: N,
    }
    let nat = |v: u64| N::from_u64(v).expect("u64 fits every scalar");
    if alpha.is_zero() {
        return Ok(N::zero());
    }
    assert!(n > 0, "m_bound needs n >= 1");
    let mut memo: HashMap<(Ordinal, u64), N> = HashMap::new();
    let mut steps = 0u64;
    let mut deepest = 0u64;
    let mut stack: Vec<Frame<N>> = Vec::new();
    let mut pending = Some((alpha.clone(), n));
    let mut returned: Option<N> = None;
    loop {
        if let Some((a, m)) = pending.take() {
            // Below ω the recursion is a plain countdown: M_c(m) = c.
            if let Some(c) = a.as_nat() {
                deepest = deepest.max(stack.len() as u64 + c);
                returned = Some(nat(c));
            } else if let Some(v) = memo.get(&(a.clone(), m)) {
                returned = Some(v.clone());
            } else {
                steps += 1;
                if steps > budget {
                    return Err(EvalError::BudgetExhausted {
                        budget,
                        lower_bound: nat(deepest),
                    });
                }
                let next_n = g.apply(&m).ok_or(EvalError::Overflow {
                    lower_bound: nat(deepest),
                })?;
                let kids: Vec<Ordinal> = delta(&a, m)
                    .map_err(|_| EvalError::Overflow {
                        lower_bound: nat(deepest),
                    })?
                    .into_iter()
                    .collect();
                stack.push(Frame {
                    key: (a, m),
                    next_n,
                    kids,
                    at: 0,
                    best: N::zero(),
                });
                deepest = deepest.max(stack.len() as u64);
            }
        }
        let Some(top) = stack.last_mut() else {
            return Ok(returned.expect("root value"));
        };
        if let Some(v) = returned.take() {
            let cand = v.checked_add(&N::one()).ok_or(EvalError::Overflow {
                lower_bound: nat(deepest),
            })?;
            if cand > top.best {
                top.best = cand;
            }
            top.at += 1;
        }
        if top.at < top.kids.len() {
            pending = Some((top.kids[top.at].clone(), top.next_n));
        } else {
            let f = stack.pop().unwrap();
            memo.insert(f.key, f.best.clone());
            returned = Some(f.best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::parse_ordinal;

    fn o(s: &str) -> Ordinal {
        parse_ordinal(s).unwrap()
    }

    #[test]
    fn derivative_values() {
        assert_eq!(derivative_d(&o("1"), 4).unwrap(), o("0"));
        assert_eq!(derivative_d(&o("w"), 3).unwrap(), o("3"));
        assert_eq!(derivative_d(&o("w^w"), 2).unwrap(), o("w^3*2"));
        assert_eq!(derivative_d(&o("w^2"), 2).unwrap(), o("w*4"));
        assert!(derivative_d(&o("w*2"), 2).is_err());
        assert!(derivative_d(&o("w"), 0).is_err());
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(&o("w"), 3).unwrap(), [o("3")].into());
        assert_eq!(
            delta(&o("w^2+w"), 2).unwrap(),
            [o("w*5"), o("w^2+2")].into()
        );
        assert_eq!(delta(&o("2"), 5).unwrap(), [o("1")].into());
        assert!(delta(&o("0"), 1).is_err());
    }

    #[test]
    fn m_values() {
        let g = ControlFunction::linear(2).unwrap();
        assert_eq!(m_bound::<u64>(&o("0"), &g, 3, 100).unwrap(), 0);
        assert_eq!(m_bound::<u64>(&o("3"), &g, 3, 100).unwrap(), 3);
        assert_eq!(m_bound::<u64>(&o("w"), &g, 4, 100).unwrap(), 5);
        // ω+1: either drop the 1 (then ω at g(n)) or expand ω to n.
        assert_eq!(m_bound::<u64>(&o("w+1"), &g, 1, 100).unwrap(), 4);
        let err = m_bound::<u64>(&o("w^w"), &g, 3, 5).unwrap_err();
        assert!(matches!(err, EvalError::BudgetExhausted { .. }));
        assert!(*err.lower_bound() >= 5);
    }
}
