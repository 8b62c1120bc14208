use super::Ordinal;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ordinal syntax error at offset {offset}: {message}")]
pub struct ParseOrdinalError {
    pub offset: usize,
    pub message: String,
}

/// Parses `ordinal := "0" | term ("+" term)*` with
/// `term := nat | "w" ["^" base] ["*" nat]` and `base := nat | "w" | "(" ordinal ")"`.
///
/// Sums need not be in CNF order; they are normalized with the natural sum.
pub fn parse_ordinal(text: &str) -> Result<Ordinal, ParseOrdinalError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let o = p.ordinal()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(o)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ParseOrdinalError {
        ParseOrdinalError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, ParseOrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseOrdinalError {
                offset: start,
                message: "number too large".into(),
            })
    }

    fn ordinal(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = acc.natural_sum(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(self.nat()?)),
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') {
                    self.base()?
                } else {
                    Ordinal::one()
                };
                let coef = if self.eat(b'*') { self.nat()? } else { 1 };
                Ok(Ordinal::term(exp, coef))
            }
            _ => Err(self.err("expected a number or 'w'")),
        }
    }

    fn base(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(self.nat()?)),
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let o = self.ordinal()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(o)
            }
            _ => Err(self.err("expected exponent")),
        }
    }
}
