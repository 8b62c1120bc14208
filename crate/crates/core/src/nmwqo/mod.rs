//! Nested-multiset normed wqos: `A := Γ₀ | A + A | ⟨A⟩`.

mod badseq;
mod derivative;
mod residual;

pub use badseq::{max_bad_sequence, slice, BadSequenceQuery, BadSequenceResult};
pub use derivative::{delta, derivative_d, m_bound};
pub use residual::residual_bound_expr;

use std::fmt;

use crate::nrcs::{Config, Label};
use crate::ordinal::Ordinal;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NmExpr {
    Gamma0,
    Sum(Box<NmExpr>, Box<NmExpr>),
    Multi(Box<NmExpr>),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Side {
    Left,
    Right,
}

/// An element of some [`NmExpr`]. Bags are kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NmElem {
    Tagged(Side, Box<NmElem>),
    Bag(Vec<NmElem>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NmError {
    #[error("element {elem} does not belong to {expr}")]
    Shape { expr: String, elem: String },
    #[error("{0}")]
    Invalid(String),
}

fn shape(expr: &NmExpr, elem: &NmElem) -> NmError {
    NmError::Shape {
        expr: expr.to_string(),
        elem: elem.to_string(),
    }
}

impl NmExpr {
    pub fn multi(inner: NmExpr) -> NmExpr {
        NmExpr::Multi(Box::new(inner))
    }

    pub fn sum(a: NmExpr, b: NmExpr) -> NmExpr {
        NmExpr::Sum(Box::new(a), Box::new(b))
    }

    /// Right-nested sum; the empty sum is `Γ₀`.
    pub fn sum_of(mut parts: Vec<NmExpr>) -> NmExpr {
        let Some(mut acc) = parts.pop() else {
            return NmExpr::Gamma0;
        };
        while let Some(p) = parts.pop() {
            acc = NmExpr::sum(p, acc);
        }
        acc
    }

    /// `Γ_n = ⟨Γ₀⟩·n`.
    pub fn gamma(n: usize) -> NmExpr {
        NmExpr::multi(NmExpr::Gamma0).times(n)
    }

    /// `A·n`, the n-fold sum; `A·0 = Γ₀`.
    pub fn times(&self, n: usize) -> NmExpr {
        NmExpr::sum_of(vec![self.clone(); n])
    }

    /// Grammar nodes.
    pub fn node_count(&self) -> usize {
        match self {
            NmExpr::Gamma0 => 1,
            NmExpr::Sum(a, b) => 1 + a.node_count() + b.node_count(),
            NmExpr::Multi(a) => 1 + a.node_count(),
        }
    }

    /// Summands of a nested sum, left to right.
    pub fn summands(&self) -> Vec<&NmExpr> {
        match self {
            NmExpr::Sum(a, b) => {
                let mut v = a.summands();
                v.extend(b.summands());
                v
            }
            e => vec![e],
        }
    }

    /// True if the domain is empty.
    pub fn is_empty_domain(&self) -> bool {
        match self {
            NmExpr::Gamma0 => true,
            NmExpr::Sum(a, b) => a.is_empty_domain() && b.is_empty_domain(),
            NmExpr::Multi(_) => false,
        }
    }

    /// `o(Γ₀) = 0`, `o(A+B) = o(A) ⊕ o(B)`, `o(⟨A⟩) = ω^{o(A)}`.
    pub fn order_type(&self) -> Ordinal {
        match self {
            NmExpr::Gamma0 => Ordinal::zero(),
            NmExpr::Sum(a, b) => a.order_type().natural_sum(&b.order_type()),
            NmExpr::Multi(a) => Ordinal::omega_pow(a.order_type()),
        }
    }

    /// Equal order types; `o` is injective up to isomorphism.
    pub fn isomorphic(&self, other: &NmExpr) -> bool {
        self.order_type() == other.order_type()
    }

    /// Checks that `e` belongs to this expression's domain.
    pub fn contains(&self, e: &NmElem) -> bool {
        match (self, e) {
            (NmExpr::Sum(a, _), NmElem::Tagged(Side::Left, x)) => a.contains(x),
            (NmExpr::Sum(_, b), NmElem::Tagged(Side::Right, x)) => b.contains(x),
            (NmExpr::Multi(a), NmElem::Bag(items)) => items.iter().all(|x| a.contains(x)),
            _ => false,
        }
    }

    /// `|x|`: a sum element has its component's norm, a bag has `Σ max(|x_i|, 1)`.
    pub fn norm(&self, e: &NmElem) -> Result<u64, NmError> {
        match (self, e) {
            (NmExpr::Sum(a, _), NmElem::Tagged(Side::Left, x)) => a.norm(x),
            (NmExpr::Sum(_, b), NmElem::Tagged(Side::Right, x)) => b.norm(x),
            (NmExpr::Multi(a), NmElem::Bag(items)) => items
                .iter()
                .try_fold(0u64, |acc, x| Ok(acc + a.norm(x)?.max(1))),
            _ => Err(shape(self, e)),
        }
    }

    /// The order: equal tags in sums, an injective dominating map for bags.
    pub fn leq(&self, x: &NmElem, y: &NmElem) -> Result<bool, NmError> {
        match (self, x, y) {
            (NmExpr::Sum(a, b), NmElem::Tagged(sx, ix), NmElem::Tagged(sy, iy)) => {
                if sx != sy {
                    if !self.contains(x) || !self.contains(y) {
                        return Err(shape(self, if self.contains(x) { y } else { x }));
                    }
                    return Ok(false);
                }
                match sx {
                    Side::Left => a.leq(ix, iy),
                    Side::Right => b.leq(ix, iy),
                }
            }
            (NmExpr::Multi(a), NmElem::Bag(xs), NmElem::Bag(ys)) => {
                if xs.len() > ys.len() {
                    for z in xs.iter().chain(ys.iter()) {
                        if !a.contains(z) {
                            return Err(shape(a, z));
                        }
                    }
                    return Ok(false);
                }
                let mut adj = Vec::with_capacity(xs.len());
                for xi in xs {
                    let mut row = Vec::new();
                    for (j, yj) in ys.iter().enumerate() {
                        if a.leq(xi, yj)? {
                            row.push(j);
                        }
                    }
                    adj.push(row);
                }
                Ok(bipartite_complete(&adj, ys.len()))
            }
            _ => Err(shape(self, x)),
        }
    }
}

fn bipartite_complete(adj: &[Vec<usize>], right: usize) -> bool {
    fn aug(u: usize, adj: &[Vec<usize>], own: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if own[v].is_none_or(|w| aug(w, adj, own, seen)) {
                    own[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut own = vec![None; right];
    (0..adj.len()).all(|u| aug(u, adj, &mut own, &mut vec![false; right]))
}

/// `C(α)`: `Γ₀` for 0, otherwise `Σ ⟨C(β_i)⟩` over the CNF terms with multiplicity.
pub fn canonical_expr(alpha: &Ordinal) -> NmExpr {
    NmExpr::sum_of(
        alpha
            .exponents_with_multiplicity()
            .iter()
            .map(|b| NmExpr::multi(canonical_expr(b)))
            .collect(),
    )
}

impl NmElem {
    pub fn bag(mut items: Vec<NmElem>) -> NmElem {
        items.sort();
        NmElem::Bag(items)
    }

    pub fn left(x: NmElem) -> NmElem {
        NmElem::Tagged(Side::Left, Box::new(x))
    }

    pub fn right(x: NmElem) -> NmElem {
        NmElem::Tagged(Side::Right, Box::new(x))
    }

    /// The element of `A·q` (right-nested) that sits in copy `c` as `x`.
    pub fn in_copy(x: NmElem, c: usize, q: usize) -> NmElem {
        let mut e = if c + 1 == q { x } else { NmElem::left(x) };
        for _ in 0..c {
            e = NmElem::right(e);
        }
        e
    }
}

/// `M_k = Γ_q` and `M_{i−1} = ⟨M_i⟩·q`; returns `M_0`.
pub fn tree_expr(k: usize, q: usize) -> NmExpr {
    let mut m = NmExpr::gamma(q);
    for _ in 0..k {
        m = NmExpr::multi(m).times(q);
    }
    m
}

/// `h_0`: a node's label picks the summand copy and its children form the bag.
pub fn tree_to_element(config: &Config, k: usize, states: &[Label]) -> Result<NmElem, NmError> {
    if config.height() > k {
        return Err(NmError::Invalid(format!("{config} is higher than {k}")));
    }
    let mut sorted = states.to_vec();
    sorted.sort();
    sorted.dedup();
    to_elem(config, &sorted)
}

fn to_elem(c: &Config, states: &[Label]) -> Result<NmElem, NmError> {
    let idx = states
        .binary_search(c.label())
        .map_err(|_| NmError::Invalid(format!("label {} is not a state", c.label())))?;
    let kids = c
        .children()
        .iter()
        .map(|ch| to_elem(ch, states))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NmElem::in_copy(NmElem::bag(kids), idx, states.len()))
}

impl fmt::Display for NmExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NmExpr::Gamma0 => f.write_str("G0"),
            _ if self.is_gamma() > 0 => write!(f, "G{}", self.is_gamma()),
            NmExpr::Multi(a) => write!(f, "M[{a}]"),
            NmExpr::Sum(a, b) => {
                // Flatten the right spine, keeping `Gn` subterms intact.
                let mut parts = vec![a.to_string()];
                let mut cur: &NmExpr = b;
                while let NmExpr::Sum(l, r) = cur {
                    if cur.is_gamma() > 0 {
                        break;
                    }
                    parts.push(l.to_string());
                    cur = r;
                }
                parts.push(cur.to_string());
                write!(f, "({})", parts.join(" + "))
            }
        }
    }
}

impl NmExpr {
    // n when this is exactly `gamma(n)` for n ≥ 2, else 0.
    fn is_gamma(&self) -> usize {
        let s = self.summands();
        if s.len() < 2 {
            return 0;
        }
        let unit = NmExpr::multi(NmExpr::Gamma0);
        if s.iter().all(|p| **p == unit) && *self == NmExpr::gamma(s.len()) {
            s.len()
        } else {
            0
        }
    }
}

impl fmt::Debug for NmExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NmElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NmElem::Tagged(Side::Left, x) => write!(f, "L:{x}"),
            NmElem::Tagged(Side::Right, x) => write!(f, "R:{x}"),
            NmElem::Bag(items) => {
                f.write_str("{")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Debug for NmElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl serde::Serialize for NmElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expression syntax error at offset {offset}: {message}")]
pub struct ParseExprError {
    pub offset: usize,
    pub message: String,
}

/// Parses `G0`, `Gn`, `M[E]`, `(E + E + …)` and the postfix `E*n`.
pub fn parse_expr(text: &str) -> Result<NmExpr, ParseExprError> {
    let b = text.as_bytes();
    let mut pos = 0;
    let e = expr(b, &mut pos)?;
    ws(b, &mut pos);
    if pos != b.len() {
        return Err(ParseExprError {
            offset: pos,
            message: "trailing input".into(),
        });
    }
    Ok(e)
}

fn ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn number(b: &[u8], pos: &mut usize) -> Result<usize, ParseExprError> {
    ws(b, pos);
    let start = *pos;
    while *pos < b.len() && b[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&b[start..*pos])
        .unwrap()
        .parse()
        .map_err(|_| ParseExprError {
            offset: start,
            message: "expected a number".into(),
        })
}

fn expect(b: &[u8], pos: &mut usize, c: u8) -> Result<(), ParseExprError> {
    ws(b, pos);
    if b.get(*pos) == Some(&c) {
        *pos += 1;
        Ok(())
    } else {
        Err(ParseExprError {
            offset: *pos,
            message: format!("expected '{}'", c as char),
        })
    }
}

fn expr(b: &[u8], pos: &mut usize) -> Result<NmExpr, ParseExprError> {
    ws(b, pos);
    let mut e = match b.get(*pos) {
        Some(b'G') => {
            *pos += 1;
            NmExpr::gamma(number(b, pos)?)
        }
        Some(b'M') => {
            *pos += 1;
            expect(b, pos, b'[')?;
            let inner = expr(b, pos)?;
            expect(b, pos, b']')?;
            NmExpr::multi(inner)
        }
        Some(b'(') => {
            *pos += 1;
            let mut parts = vec![expr(b, pos)?];
            loop {
                ws(b, pos);
                match b.get(*pos) {
                    Some(b'+') => {
                        *pos += 1;
                        parts.push(expr(b, pos)?);
                    }
                    Some(b')') => {
                        *pos += 1;
                        break;
                    }
                    _ => {
                        return Err(ParseExprError {
                            offset: *pos,
                            message: "expected '+' or ')'".into(),
                        })
                    }
                }
            }
            NmExpr::sum_of(parts)
        }
        _ => {
            return Err(ParseExprError {
                offset: *pos,
                message: "expected G, M or '('".into(),
            })
        }
    };
    loop {
        ws(b, pos);
        if b.get(*pos) == Some(&b'*') {
            *pos += 1;
            e = e.times(number(b, pos)?);
        } else {
            return Ok(e);
        }
    }
}
