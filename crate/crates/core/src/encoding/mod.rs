//! Ordinals below `(Ω_{k+1})_ℓ` as trees of height at most `k`, and the
//! Hardy rewrite system on pairs `(α, n)`.
//!
//! `T'_α` hangs one subtree per CNF term `ω^β` under a fresh root, the
//! subtree for `ω^β` being a node whose children are the subtrees of `β`.
//! A level-`k` node then has only leaf children, say `j` of them, and is
//! replaced by the single node `w@wj`. Interior nodes are labelled `w`.

use std::fmt;

use crate::nrcs::{Config, Label};
use crate::ordinal::{Ordinal, OrdinalError};

/// Interior label.
pub const OMEGA: &str = "w";
/// Budget label.
pub const BUDGET: &str = "#";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodingParams {
    k: usize,
    l: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("k and l must both be at least 1")]
    Params,
    #[error("{alpha} exceeds the bound {bound}")]
    OutOfRange { alpha: Ordinal, bound: Ordinal },
    #[error("0 has the empty tree as its encoding")]
    Zero,
    #[error("malformed encoder: {0}")]
    Malformed(String),
    #[error("0 has no rewrite step")]
    NoStep,
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

impl EncodingParams {
    pub fn new(k: usize, l: u64) -> Result<Self, EncodingError> {
        if k == 0 || l == 0 {
            return Err(EncodingError::Params);
        }
        Ok(EncodingParams { k, l })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    /// `(Ω_{k+1})_ℓ`, a tower of `k` ω's topped by `ℓ`.
    pub fn bound(&self) -> Ordinal {
        let mut a = Ordinal::nat(self.l);
        for _ in 0..self.k {
            a = Ordinal::omega_pow(a);
        }
        a
    }

    pub fn check(&self, alpha: &Ordinal) -> Result<(), EncodingError> {
        let bound = self.bound();
        if *alpha > bound {
            return Err(EncodingError::OutOfRange {
                alpha: alpha.clone(),
                bound,
            });
        }
        Ok(())
    }
}

fn omega_label() -> Label {
    Label::new(OMEGA)
}

// The subtrees of FO_α, compressed at `depth == k`.
fn forest(alpha: &Ordinal, depth: usize, k: usize) -> Vec<Config> {
    alpha
        .exponents_with_multiplicity()
        .iter()
        .map(|beta| {
            if depth == k {
                let j = beta.as_nat().expect("level-k exponents are finite");
                Config::leaf(Label::annotated(OMEGA, j as u32))
            } else {
                Config::new(omega_label(), forest(beta, depth + 1, k))
            }
        })
        .collect()
}

/// `T_α`.
pub fn encode_tree(alpha: &Ordinal, p: &EncodingParams) -> Result<Config, EncodingError> {
    if alpha.is_zero() {
        return Err(EncodingError::Zero);
    }
    p.check(alpha)?;
    Ok(Config::new(omega_label(), forest(alpha, 1, p.k)))
}

/// Inverse of [`encode_tree`]. Only level-`k` annotations are read; every
/// other label is ignored.
pub fn decode_tree(t: &Config, p: &EncodingParams) -> Result<Ordinal, EncodingError> {
    let a = decode_forest(t.children(), 1, p.k)?;
    if a.is_zero() {
        return Err(EncodingError::Malformed(format!("{t} has no children")));
    }
    Ok(a)
}

fn decode_forest(kids: &[Config], depth: usize, k: usize) -> Result<Ordinal, EncodingError> {
    let mut terms = Vec::with_capacity(kids.len());
    for c in kids {
        let ann = c.label().annotation();
        let beta = if depth == k {
            let j = ann.ok_or_else(|| {
                EncodingError::Malformed(format!(
                    "level-{k} node {} lacks an annotation",
                    c.label()
                ))
            })?;
            if !c.children().is_empty() {
                return Err(EncodingError::Malformed(format!(
                    "level-{k} node {c} has children"
                )));
            }
            Ordinal::nat(j as u64)
        } else {
            if ann.is_some() {
                return Err(EncodingError::Malformed(format!(
                    "annotated node {} above level {k}",
                    c.label()
                )));
            }
            decode_forest(c.children(), depth + 1, k)?
        };
        terms.push((beta, 1));
    }
    Ok(Ordinal::from_terms(terms))
}

/// `C_{α,n}`: `T_α` with `n` extra `#` children at the root. `C_{0,n}` is a
/// bare `w` root with the `#` children.
pub fn make_hardy_config(
    alpha: &Ordinal,
    n: usize,
    p: &EncodingParams,
) -> Result<Config, EncodingError> {
    p.check(alpha)?;
    Ok(hardy_config_unchecked(alpha, n, p.k))
}

/// Reads `(α, n)` back from a Hardy configuration.
pub fn decode_hardy_config(c: &Config, p: &EncodingParams) -> Result<HardyState, EncodingError> {
    let (alpha, n) = decode_hardy_pair(c, p)?;
    HardyState::new(alpha, n, p)
}

/// Like [`decode_hardy_config`], without the bound on `α`. The level-`k`
/// annotations stay below `ℓ+1`, but sums of terms can exceed the bound.
pub fn decode_hardy_pair(c: &Config, p: &EncodingParams) -> Result<(Ordinal, u64), EncodingError> {
    let budget = Label::new(BUDGET);
    let (hash, rest): (Vec<Config>, Vec<Config>) = c
        .children()
        .iter()
        .cloned()
        .partition(|ch| *ch.label() == budget && ch.children().is_empty());
    Ok((decode_forest(&rest, 1, p.k)?, hash.len() as u64))
}

/// `C_{α,n}` without the bound check.
pub(crate) fn hardy_config_unchecked(alpha: &Ordinal, n: usize, k: usize) -> Config {
    let mut kids = if alpha.is_zero() {
        Vec::new()
    } else {
        forest(alpha, 1, k)
    };
    kids.extend(std::iter::repeat_n(Config::leaf(Label::new(BUDGET)), n));
    Config::new(omega_label(), kids)
}

/// A pair `(α, n)` of the Hardy rewrite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HardyState {
    alpha: Ordinal,
    n: u64,
}

impl HardyState {
    pub fn new(alpha: Ordinal, n: u64, p: &EncodingParams) -> Result<Self, EncodingError> {
        p.check(&alpha)?;
        Ok(HardyState { alpha, n })
    }

    pub fn alpha(&self) -> &Ordinal {
        &self.alpha
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

impl fmt::Display for HardyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.n)
    }
}

/// `(α+1, n) → (α, n+1)` and `(λ, n) → (λ_n, n)`.
pub fn hardy_rewrite(s: &HardyState) -> Result<HardyState, EncodingError> {
    if s.alpha.is_zero() {
        return Err(EncodingError::NoStep);
    }
    Ok(match s.alpha.pred() {
        Some(a) => HardyState {
            alpha: a,
            n: s.n + 1,
        },
        None => HardyState {
            alpha: s.alpha.fundamental_sequence(s.n)?,
            n: s.n,
        },
    })
}

/// Every `α ≤ (Ω_{k+1})_ℓ` whose CNF coefficients, at every depth, are at
/// most `max_coeff`. The full range is infinite, so the coefficient cap
/// makes it enumerable.
pub fn encodable_ordinals(p: &EncodingParams, max_coeff: u64) -> Vec<Ordinal> {
    // Level 0 holds the finite exponents 0..=ℓ that sit at level k.
    let mut level: Vec<Ordinal> = (0..=p.l).map(Ordinal::nat).collect();
    for _ in 0..p.k {
        let top = Ordinal::omega_pow(level.iter().max().unwrap().clone());
        let below: Vec<&Ordinal> = level
            .iter()
            .filter(|b| Ordinal::omega_pow((*b).clone()) < top)
            .collect();
        let mut out = vec![Ordinal::zero()];
        for b in below {
            let mut next = Vec::with_capacity(out.len() * (max_coeff as usize + 1));
            for a in &out {
                for c in 0..=max_coeff {
                    next.push(a.natural_sum(&Ordinal::term(b.clone(), c)));
                }
            }
            out = next;
        }
        out.push(top);
        level = out;
    }
    level.sort();
    level.dedup();
    level
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nrcs::parse_tree;
    use crate::ordinal::{hardy_eval, parse_ordinal, ControlFunction};

    fn o(s: &str) -> Ordinal {
        parse_ordinal(s).unwrap()
    }

    fn p(k: usize, l: u64) -> EncodingParams {
        EncodingParams::new(k, l).unwrap()
    }

    #[test]
    fn trees() {
        assert_eq!(
            encode_tree(&o("1"), &p(1, 2)).unwrap(),
            parse_tree("w(w@w0)").unwrap()
        );
        assert_eq!(
            encode_tree(&o("w+1"), &p(1, 2)).unwrap(),
            parse_tree("w(w@w1,w@w0)").unwrap()
        );
        assert_eq!(
            encode_tree(&o("w"), &p(2, 2)).unwrap(),
            parse_tree("w(w(w@w0))").unwrap()
        );
        assert_eq!(
            encode_tree(&o("1"), &p(2, 2)).unwrap(),
            parse_tree("w(w)").unwrap()
        );
        assert!(encode_tree(&o("0"), &p(1, 2)).is_err());
        assert!(encode_tree(&o("w^3"), &p(1, 2)).is_err());
        assert!(encode_tree(&o("w^2"), &p(1, 2)).is_ok());
    }

    #[test]
    fn decoding() {
        assert_eq!(
            decode_tree(&parse_tree("w(w@w0)").unwrap(), &p(1, 2)).unwrap(),
            o("1")
        );
        assert_eq!(
            decode_tree(&parse_tree("x(y@w1,z@w0)").unwrap(), &p(1, 2)).unwrap(),
            o("w+1")
        );
        assert!(decode_tree(&parse_tree("w(w)").unwrap(), &p(1, 2)).is_err());
        for (k, l, c) in [(1, 1, 3), (1, 2, 3), (2, 1, 2), (2, 2, 1)] {
            let params = p(k, l);
            let all = encodable_ordinals(&params, c);
            assert!(all.len() > 3);
            for a in all.iter().filter(|a| !a.is_zero()) {
                let t = encode_tree(a, &params).unwrap();
                assert!(t.height() <= k);
                assert_eq!(&decode_tree(&t, &params).unwrap(), a);
            }
        }
    }

    #[test]
    fn hardy_configs() {
        assert_eq!(
            make_hardy_config(&o("0"), 2, &p(1, 2)).unwrap(),
            parse_tree("w(#,#)").unwrap()
        );
        assert_eq!(
            make_hardy_config(&o("1"), 0, &p(1, 2)).unwrap(),
            parse_tree("w(w@w0)").unwrap()
        );
        let c = make_hardy_config(&o("w+1"), 1, &p(1, 2)).unwrap();
        assert_eq!(c, parse_tree("w(w@w1,w@w0,#)").unwrap());
        let s = decode_hardy_config(&c, &p(1, 2)).unwrap();
        assert_eq!((s.alpha().clone(), s.n()), (o("w+1"), 1));
    }

    #[test]
    fn rewriting() {
        let params = p(2, 2);
        let step = |a: &str, n| hardy_rewrite(&HardyState::new(o(a), n, &params).unwrap()).unwrap();
        assert_eq!(step("3", 5), HardyState::new(o("2"), 6, &params).unwrap());
        assert_eq!(step("w", 4), HardyState::new(o("4"), 4, &params).unwrap());
        let mut s = HardyState::new(o("w^2"), 3, &params).unwrap();
        while !s.alpha().is_zero() {
            s = hardy_rewrite(&s).unwrap();
        }
        assert_eq!(s.n(), 24);
        let h: u64 = hardy_eval(&ControlFunction::succ(), &o("w^2"), 3u64, 1000).unwrap();
        assert_eq!(h, 24);
    }
}
