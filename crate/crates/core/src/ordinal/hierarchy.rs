//! Budgeted interpreters for the Hardy, Cichoń and fast-growing hierarchies.
//!
//! All three are generic over the natural-number scalar; `BigUint` never
//! overflows, fixed-width types report [`EvalError::Overflow`].

use std::fmt;

use super::Ordinal;
use crate::Natural;

/// A strictly increasing map on naturals used as a control or hierarchy base.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ControlFunction {
    kind: Kind,
    superadditive: bool,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Kind {
    Succ,
    Linear(u64),
    TimesSelf(Box<ControlFunction>),
}

const SAMPLE: u64 = 24;

impl ControlFunction {
    /// `x ↦ x + 1`. Not superadditive, so only fit as a hierarchy base.
    pub fn succ() -> Self {
        Self::checked(Kind::Succ)
    }

    /// `x ↦ c·x` with `c ≥ 1`.
    pub fn linear(c: u64) -> Result<Self, String> {
        if c == 0 {
            return Err("linear control needs a positive factor".into());
        }
        Ok(Self::checked(Kind::Linear(c)))
    }

    /// `x ↦ x·g(x)`, the base of the final Cichoń bound.
    pub fn times_self(g: &ControlFunction) -> Self {
        Self::checked(Kind::TimesSelf(Box::new(g.clone())))
    }

    /// Accepts `succ`, `x+1`, `cx`, `c*x`, `x` and `x*g` for a nested `g`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "succ" | "x+1" => return Ok(Self::succ()),
            "x" => return Self::linear(1),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("x*") {
            return Ok(Self::times_self(&Self::parse(rest)?));
        }
        let digits = t
            .strip_suffix('x')
            .map(|d| d.strip_suffix('*').unwrap_or(d));
        match digits.and_then(|d| d.parse::<u64>().ok()) {
            Some(c) => Self::linear(c),
            None => Err(format!("unrecognized control function '{text}'")),
        }
    }

    fn checked(kind: Kind) -> Self {
        let mut f = ControlFunction {
            kind,
            superadditive: false,
        };
        let v: Vec<u64> = (0..=SAMPLE).map(|x| f.apply_u64(x)).collect();
        assert!(
            v.windows(2).all(|w| w[1] > w[0]),
            "control function not strictly increasing"
        );
        assert!(
            v.iter().enumerate().all(|(x, y)| *y >= x as u64),
            "control function not inflationary"
        );
        let half = SAMPLE / 2;
        f.superadditive = (0..=half)
            .all(|x| (0..=half).all(|y| v[(x + y) as usize] >= v[x as usize] + v[y as usize]));
        f
    }

    pub fn is_superadditive(&self) -> bool {
        self.superadditive
    }

    fn apply_u64(&self, x: u64) -> u64 {
        self.apply(&x).expect("sample overflow")
    }

    /// `g(x)`, or `None` when the scalar overflows.
    pub fn apply<N: Natural>(&self, x: &N) -> Option<N> {
        match &self.kind {
            Kind::Succ => x.checked_add(&N::one()),
            Kind::Linear(c) => x.checked_mul(&N::from_u64(*c)?),
            Kind::TimesSelf(g) => x.checked_mul(&g.apply(x)?),
        }
    }

    /// `g^i(x)`.
    pub fn iterate<N: Natural>(&self, x: &N, i: u64) -> Option<N> {
        let mut v = x.clone();
        for _ in 0..i {
            v = self.apply(&v)?;
        }
        Some(v)
    }
}

impl fmt::Display for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Succ => f.write_str("x+1"),
            Kind::Linear(1) => f.write_str("x"),
            Kind::Linear(c) => write!(f, "{c}x"),
            Kind::TimesSelf(g) => write!(f, "x*{g}"),
        }
    }
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ControlFunction({self})")
    }
}

/// Why an evaluation stopped early. `lower_bound` is a proven lower bound
/// on the true value.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError<N: fmt::Display + fmt::Debug> {
    #[error("budget of {budget} steps exhausted (value is at least {lower_bound})")]
    BudgetExhausted { budget: u64, lower_bound: N },
    #[error("scalar overflow (value is at least {lower_bound})")]
    Overflow { lower_bound: N },
}

impl<N: fmt::Display + fmt::Debug> EvalError<N> {
    pub fn lower_bound(&self) -> &N {
        match self {
            EvalError::BudgetExhausted { lower_bound, .. }
            | EvalError::Overflow { lower_bound } => lower_bound,
        }
    }
}

fn index<N: Natural>(x: &N, budget: u64, lb: &N) -> Result<u64, EvalError<N>> {
    // An index beyond u64 would take more steps than any budget allows.
    x.to_u64().ok_or_else(|| EvalError::BudgetExhausted {
        budget,
        lower_bound: lb.clone(),
    })
}

/// `h^α(x)`: `h^0(x) = x`, `h^{α+1}(x) = h^α(h(x))`, `h^λ(x) = h^{λ_x}(x)`.
pub fn hardy_eval<N: Natural>(
    h: &ControlFunction,
    alpha: &Ordinal,
    x: N,
    budget: u64,
) -> Result<N, EvalError<N>> {
    let mut a = alpha.clone();
    let mut x = x;
    let mut steps = 0u64;
    while !a.is_zero() {
        if steps >= budget {
            return Err(EvalError::BudgetExhausted {
                budget,
                lower_bound: x,
            });
        }
        steps += 1;
        match a.pred() {
            Some(b) => {
                x = h.apply(&x).ok_or_else(|| EvalError::Overflow {
                    lower_bound: x.clone(),
                })?;
                a = b;
            }
            None => {
                let i = index(&x, budget, &x)?;
                a = a.fundamental_sequence(i).expect("limit");
            }
        }
    }
    Ok(x)
}

/// `h_α(x)`: `h_0(x) = 0`, `h_{α+1}(x) = 1 + h_α(h(x))`, `h_λ(x) = h_{λ_x}(x)`.
pub fn cichon_eval<N: Natural>(
    h: &ControlFunction,
    alpha: &Ordinal,
    x: N,
    budget: u64,
) -> Result<N, EvalError<N>> {
    let mut a = alpha.clone();
    let mut x = x;
    let mut acc = N::zero();
    let mut steps = 0u64;
    while !a.is_zero() {
        if steps >= budget {
            return Err(EvalError::BudgetExhausted {
                budget,
                lower_bound: acc,
            });
        }
        steps += 1;
        match a.pred() {
            Some(b) => {
                x = h.apply(&x).ok_or_else(|| EvalError::Overflow {
                    lower_bound: acc.clone(),
                })?;
                acc = acc
                    .checked_add(&N::one())
                    .ok_or_else(|| EvalError::Overflow {
                        lower_bound: acc.clone(),
                    })?;
                a = b;
            }
            None => {
                let i = index(&x, budget, &acc)?;
                a = a.fundamental_sequence(i).expect("limit");
            }
        }
    }
    Ok(acc)
}

/// `f_{h,α}(x)`: `f_0 = h`, `f_{α+1}(x) = f_α^x(x)`, `f_λ(x) = f_{λ_x}(x)`.
///
/// The budget bounds interpreter steps, which dominate the number of
/// `h`-applications.
pub fn fast_growing_eval<N: Natural>(
    h: &ControlFunction,
    alpha: &Ordinal,
    x: N,
    budget: u64,
) -> Result<N, EvalError<N>> {
    // Each frame applies f_ord to the current value `times` more times.
    let mut stack: Vec<(Ordinal, u64)> = vec![(alpha.clone(), 1)];
    let mut x = x;
    let mut steps = 0u64;
    while let Some(top) = stack.last_mut() {
        if top.1 == 0 {
            stack.pop();
            continue;
        }
        if steps >= budget {
            return Err(EvalError::BudgetExhausted {
                budget,
                lower_bound: x,
            });
        }
        steps += 1;
        top.1 -= 1;
        let a = top.0.clone();
        if a.is_zero() {
            x = h.apply(&x).ok_or_else(|| EvalError::Overflow {
                lower_bound: x.clone(),
            })?;
        } else if let Some(b) = a.pred() {
            let times = index(&x, budget, &x)?;
            stack.push((b, times));
        } else {
            let i = index(&x, budget, &x)?;
            stack.push((a.fundamental_sequence(i).expect("limit"), 1));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::parse_ordinal;
    use crate::Nat;

    fn o(s: &str) -> Ordinal {
        parse_ordinal(s).unwrap()
    }

    fn succ() -> ControlFunction {
        ControlFunction::succ()
    }

    // Direct transcription of the recursive definitions, used as an oracle.
    fn hardy_rec(a: &Ordinal, x: u64) -> u64 {
        if a.is_zero() {
            x
        } else if let Some(b) = a.pred() {
            hardy_rec(&b, x + 1)
        } else {
            hardy_rec(&a.fundamental_sequence(x).unwrap(), x)
        }
    }

    fn fg_rec(a: &Ordinal, x: u64) -> u64 {
        if a.is_zero() {
            x + 1
        } else if let Some(b) = a.pred() {
            (0..x).fold(x, |v, _| fg_rec(&b, v))
        } else {
            fg_rec(&a.fundamental_sequence(x).unwrap(), x)
        }
    }

    #[test]
    fn hardy_values() {
        assert_eq!(hardy_eval(&succ(), &o("0"), 7u64, 0).unwrap(), 7);
        assert_eq!(hardy_eval(&succ(), &o("3"), 5u64, 10).unwrap(), 8);
        assert_eq!(hardy_eval(&succ(), &o("w^2"), 3u64, 10_000).unwrap(), 24);
        assert_eq!(hardy_rec(&o("w^2"), 3), 24);
        for s in ["w", "w*2+1", "w^2+w", "w*3"] {
            for x in 0..4 {
                assert_eq!(
                    hardy_eval(&succ(), &o(s), x, 1 << 30).unwrap(),
                    hardy_rec(&o(s), x)
                );
            }
        }
    }

    #[test]
    fn cichon_values() {
        assert_eq!(cichon_eval(&succ(), &o("0"), 9u64, 0).unwrap(), 0);
        assert_eq!(cichon_eval(&succ(), &o("3"), 5u64, 10).unwrap(), 3);
        assert_eq!(cichon_eval(&succ(), &o("w"), 4u64, 100).unwrap(), 4);
        // With h = succ, h_α(x) = h^α(x) − x.
        for x in 0..4u64 {
            assert_eq!(
                cichon_eval(&succ(), &o("w^2+w"), x, 1 << 30).unwrap() + x,
                hardy_rec(&o("w^2+w"), x)
            );
        }
    }

    #[test]
    fn fast_growing_values() {
        assert_eq!(fast_growing_eval(&succ(), &o("0"), 6u64, 1).unwrap(), 7);
        assert_eq!(fast_growing_eval(&succ(), &o("1"), 5u64, 100).unwrap(), 10);
        assert_eq!(fast_growing_eval(&succ(), &o("2"), 3u64, 100).unwrap(), 24);
        for s in ["w", "2", "1"] {
            for x in 1..=2u64 {
                assert_eq!(
                    fast_growing_eval(&succ(), &o(s), x, 1 << 30).unwrap(),
                    fg_rec(&o(s), x)
                );
            }
        }
    }

    #[test]
    fn budget_reports_lower_bound() {
        let e = hardy_eval(&succ(), &o("w^w"), 3u64, 50).unwrap_err();
        assert!(matches!(e, EvalError::BudgetExhausted { .. }));
        assert!(*e.lower_bound() >= 3);
    }

    #[test]
    fn fixed_width_overflow_is_reported() {
        let g = ControlFunction::linear(2).unwrap();
        let e = hardy_eval(&g, &o("70"), 1u64, 1000).unwrap_err();
        assert!(matches!(e, EvalError::Overflow { .. }));
        let big: Nat = hardy_eval(&g, &o("70"), Nat::from(1u32), 1000).unwrap();
        assert_eq!(big, Nat::from(1u32) << 70);
    }

    #[test]
    fn control_functions() {
        assert!(!succ().is_superadditive());
        let g = ControlFunction::parse("2x").unwrap();
        assert!(g.is_superadditive());
        assert_eq!(g.apply(&5u64), Some(10));
        let h = ControlFunction::times_self(&g);
        assert_eq!(h.apply(&3u64), Some(18));
        assert_eq!(ControlFunction::parse("x*2x").unwrap(), h);
        assert_eq!(ControlFunction::parse("x+1").unwrap(), succ());
        assert!(ControlFunction::parse("x^2").is_err());
        assert_eq!(g.iterate(&3u64, 2), Some(12));
    }
}
