//! Ordinals below ε₀ in strict Cantor normal form.

mod hierarchy;
mod parse;

pub use hierarchy::{cichon_eval, fast_growing_eval, hardy_eval, ControlFunction, EvalError};
pub use parse::{parse_ordinal, ParseOrdinalError};

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// An ordinal `ω^β1·c1 + … + ω^βm·cm` with `β1 > … > βm` and every `ci ≥ 1`.
///
/// The empty term list is 0. Construction always normalizes, so derived
/// equality and hashing agree with ordinal equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(Self::zero(), n)],
            }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^β`.
    pub fn omega_pow(beta: Ordinal) -> Self {
        Self::term(beta, 1)
    }

    /// `ω^β·c`; zero when `c = 0`.
    pub fn term(beta: Ordinal, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(beta, c)],
            }
        }
    }

    /// Builds from arbitrary `(exponent, coefficient)` pairs, merging and sorting
    /// them as a natural sum.
    pub fn from_terms<I: IntoIterator<Item = (Ordinal, u64)>>(terms: I) -> Self {
        let mut v: Vec<(Ordinal, u64)> = terms.into_iter().filter(|(_, c)| *c > 0).collect();
        v.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Ordinal, u64)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some((le, lc)) if *le == e => {
                    *lc = lc.checked_add(c).expect("ordinal coefficient overflow")
                }
                _ => out.push((e, c)),
            }
        }
        Ordinal { terms: out }
    }

    /// Strict CNF terms, highest exponent first.
    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some((e, _)) if e.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some((e, _)) if !e.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.is_zero())
    }

    /// The value as a natural number if the ordinal is finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    /// True if this is `ω^β` with coefficient 1; returns `β`.
    pub fn as_omega_power(&self) -> Option<&Ordinal> {
        match self.terms.as_slice() {
            [(e, 1)] => Some(e),
            _ => None,
        }
    }

    /// `α + 1`.
    pub fn succ(&self) -> Ordinal {
        self.natural_sum(&Ordinal::one())
    }

    /// `β` for `α = β + 1`.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        last.1 -= 1;
        if last.1 == 0 {
            terms.pop();
        }
        Some(Ordinal { terms })
    }

    /// Hessenberg natural sum.
    pub fn natural_sum(&self, other: &Ordinal) -> Ordinal {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    /// The `n`-fold natural sum `α ⊕ … ⊕ α`.
    pub fn natural_mul(&self, n: u64) -> Ordinal {
        Self::from_terms(self.terms.iter().map(|(e, c)| {
            (
                e.clone(),
                c.checked_mul(n).expect("ordinal coefficient overflow"),
            )
        }))
    }

    /// [`Ordinal::natural_mul`] returning `None` on coefficient overflow.
    pub fn checked_natural_mul(&self, n: u64) -> Option<Ordinal> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| c.checked_mul(n).map(|c| (e.clone(), c)))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_terms(terms))
    }

    /// Terms listed with multiplicity: `ω^β·3` appears three times.
    pub fn exponents_with_multiplicity(&self) -> Vec<Ordinal> {
        let mut out = Vec::new();
        for (e, c) in &self.terms {
            for _ in 0..*c {
                out.push(e.clone());
            }
        }
        out
    }

    /// `λ_x` for a limit ordinal `λ`.
    ///
    /// `(γ + ω^{β+1})_x = γ + ω^β·x` and `(γ + ω^λ)_x = γ + ω^{λ_x}`.
    pub fn fundamental_sequence(&self, x: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.clone()));
        }
        let mut terms = self.terms.clone();
        let (beta, c) = terms.pop().unwrap();
        if c > 1 {
            terms.push((beta.clone(), c - 1));
        }
        let tail = match beta.pred() {
            Some(b) => Ordinal::term(b, x),
            None => Ordinal::omega_pow(beta.fundamental_sequence(x)?),
        };
        terms.extend(tail.terms);
        Ok(Ordinal::from_terms(terms))
    }

    /// `P_n(α)`: follow fundamental sequences at index `n` until a successor
    /// `β + 1` appears, then return `β`.
    pub fn predecessor_p(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        let mut a = self.clone();
        loop {
            if a.is_zero() {
                return Err(OrdinalError::Zero);
            }
            if let Some(b) = a.pred() {
                return Ok(b);
            }
            a = a.fundamental_sequence(n)?;
        }
    }

    /// `Ω_k`: `Ω_1 = ω`, `Ω_{k+1} = ω^{Ω_k}`.
    pub fn omega_tower(k: u32) -> Result<Ordinal, OrdinalError> {
        if k == 0 {
            return Err(OrdinalError::TowerHeight);
        }
        let mut a = Ordinal::omega();
        for _ in 1..k {
            a = Ordinal::omega_pow(a);
        }
        Ok(a)
    }

    /// Every coefficient, recursively, is at most `l`.
    pub fn is_lean(&self, l: u64) -> bool {
        self.terms.iter().all(|(e, c)| *c <= l && e.is_lean(l))
    }

    /// Smallest `k ≥ 0` with `α < Ω_{k+1}`, taking `Ω_0 = 1`.
    pub fn layer(&self) -> u32 {
        if self.is_finite() {
            return 0;
        }
        match self.terms.first() {
            Some((e, _)) => 1 + e.layer(),
            None => 0,
        }
    }

    /// Number of CNF terms counted recursively through exponents.
    pub fn cnf_size(&self) -> usize {
        self.terms.iter().map(|(e, _)| 1 + e.cnf_size()).sum()
    }

    /// Largest coefficient occurring anywhere in the notation.
    pub fn max_coefficient(&self) -> u64 {
        self.terms
            .iter()
            .map(|(e, c)| (*c).max(e.max_coefficient()))
            .max()
            .unwrap_or(0)
    }
}

/// Three-case comparison on CNF heads.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    for (x, y) in a.terms.iter().zip(b.terms.iter()) {
        match compare(&x.0, &y.0).then(x.1.cmp(&y.1)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.terms.len().cmp(&b.terms.len())
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),
    #[error("operation undefined at 0")]
    Zero,
    #[error("tower height must be at least 1")]
    TowerHeight,
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            f.write_str("w")?;
            if let Some(n) = e.as_nat() {
                if n != 1 {
                    write!(f, "^{n}")?;
                }
            } else if *e == Ordinal::omega() {
                f.write_str("^w")?;
            } else {
                write!(f, "^({e})")?;
            }
            if *c != 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        parse_ordinal(s).unwrap()
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare(&o("0"), &o("1")), Ordering::Less);
        assert_eq!(compare(&o("w^2"), &o("w^w")), Ordering::Less);
        assert_eq!(compare(&o("w^w*2+1"), &o("w^w*2+1")), Ordering::Equal);
        assert!(o("w*2") > o("w+5"));
        assert!(o("w^w") > o("w^5*100+w"));
    }

    #[test]
    fn natural_sums() {
        assert_eq!(o("w").natural_sum(&o("1")), o("w+1"));
        assert_eq!(o("1").natural_sum(&o("w")), o("w+1"));
        assert_eq!(o("w^w+1").natural_sum(&o("w")), o("w^w+w+1"));
        assert_eq!(o("w*2+3").natural_mul(2), o("w*4+6"));
    }

    #[test]
    fn fundamental_sequences() {
        assert_eq!(o("w").fundamental_sequence(5).unwrap(), o("5"));
        assert_eq!(o("w^w").fundamental_sequence(2).unwrap(), o("w^2"));
        assert_eq!(o("w^2+w").fundamental_sequence(3).unwrap(), o("w^2+3"));
        assert_eq!(o("w^2*2").fundamental_sequence(3).unwrap(), o("w^2+w*3"));
        assert_eq!(o("w^(w+1)").fundamental_sequence(2).unwrap(), o("w^w*2"));
        assert!(o("w+1").fundamental_sequence(2).is_err());
        assert!(o("0").fundamental_sequence(2).is_err());
    }

    #[test]
    fn predecessor_p() {
        assert_eq!(o("5").predecessor_p(2).unwrap(), o("4"));
        assert_eq!(o("w").predecessor_p(3).unwrap(), o("2"));
        assert_eq!(o("w^2").predecessor_p(2).unwrap(), o("w+1"));
        assert!(o("0").predecessor_p(2).is_err());
    }

    #[test]
    fn towers_and_leanness() {
        assert_eq!(Ordinal::omega_tower(1).unwrap(), o("w"));
        assert_eq!(Ordinal::omega_tower(2).unwrap(), o("w^w"));
        assert_eq!(Ordinal::omega_tower(3).unwrap(), o("w^(w^w)"));
        assert!(Ordinal::omega_tower(0).is_err());
        assert!(o("0").is_lean(0));
        assert!(!o("w^2*3").is_lean(2));
        assert!(o("w^(w*2)*2").is_lean(2));
    }

    #[test]
    fn layers() {
        assert_eq!(o("7").layer(), 0);
        assert_eq!(o("w^5*3+w").layer(), 1);
        assert_eq!(o("w^w").layer(), 2);
        assert_eq!(o("w^(w^w)").layer(), 3);
    }
}
