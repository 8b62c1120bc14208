//! Text formats for labels, trees and machine files.

use super::{Config, Label, Nrcs, NrcsError, Transition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

fn is_ident_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '(' | ')' | ',' | '[' | ']' | '@' | '>'))
}

/// `ident` or `ident@wN`.
pub fn parse_label(s: &str) -> Result<Label, TextError> {
    let mut p = TreeParser { src: s, pos: 0 };
    let l = p.label()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(p.err("trailing input after label"));
    }
    Ok(l)
}

/// `tree := label | label "(" tree ("," tree)* ")"`.
pub fn parse_tree(s: &str) -> Result<Config, TextError> {
    let mut p = TreeParser { src: s, pos: 0 };
    let t = p.tree()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(p.err("trailing input after tree"));
    }
    Ok(t)
}

struct TreeParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TreeParser<'_> {
    fn err(&self, m: &str) -> TextError {
        TextError::Syntax {
            offset: self.pos,
            message: m.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn label(&mut self) -> Result<Label, TextError> {
        self.skip_ws();
        let n: usize = self
            .rest()
            .chars()
            .take_while(|c| is_ident_char(*c))
            .map(char::len_utf8)
            .sum();
        if n == 0 {
            return Err(self.err("expected a label"));
        }
        let name = &self.src[self.pos..self.pos + n];
        if name.contains("->") || name.starts_with('-') {
            return Err(self.err("invalid label"));
        }
        self.pos += n;
        if self.rest().starts_with("@w") {
            self.pos += 2;
            let d: usize = self
                .rest()
                .chars()
                .take_while(|c| c.is_ascii_digit())
                .count();
            let i = self.rest()[..d]
                .parse()
                .map_err(|_| self.err("expected annotation index"))?;
            self.pos += d;
            return Ok(Label::annotated(name, i));
        }
        Ok(Label::new(name))
    }

    fn tree(&mut self) -> Result<Config, TextError> {
        let l = self.label()?;
        let mut children = Vec::new();
        if self.eat('(') {
            loop {
                children.push(self.tree()?);
                if self.eat(',') {
                    continue;
                }
                if self.eat(')') {
                    break;
                }
                return Err(self.err("expected ',' or ')'"));
            }
        }
        Ok(Config::new(l, children))
    }
}

/// A parsed machine file. `init` and `target` are optional so that generated
/// machines can be stored without an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NrcsFile {
    pub nrcs: Nrcs,
    pub init: Option<Config>,
    pub target: Option<Config>,
}

fn line_err(line: usize, message: impl ToString) -> TextError {
    TextError::Line {
        line,
        message: message.to_string(),
    }
}

fn label_list(s: &str, line: usize) -> Result<Vec<Label>, TextError> {
    s.split(',')
        .map(|x| parse_label(x.trim()).map_err(|e| line_err(line, e)))
        .collect()
}

/// Parses the line-oriented machine format. Lines other than `nrcs`,
/// `states`, `update`, `reset`, `init` and `target` are handed to `extra`,
/// which returns `false` to reject them.
pub(crate) fn parse_nrcs_with(
    text: &str,
    header: &str,
    extra: &mut dyn FnMut(&str, &str, usize) -> Result<bool, TextError>,
) -> Result<NrcsFile, TextError> {
    let mut k = None;
    let mut states = Vec::new();
    let mut transitions = Vec::new();
    let mut init = None;
    let mut target = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = strip_comment(raw).trim();
        if l.is_empty() {
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match kw {
            _ if kw == header => {
                let v = rest
                    .strip_prefix("k=")
                    .and_then(|x| x.trim().parse::<usize>().ok())
                    .ok_or_else(|| line_err(line, "expected k=<number>"))?;
                k = Some(v);
            }
            "states" => {
                for s in rest.split_whitespace() {
                    states.push(parse_label(s).map_err(|e| line_err(line, e))?);
                }
            }
            "update" => {
                let (a, b) = rest
                    .split_once("->")
                    .ok_or_else(|| line_err(line, "expected '->'"))?;
                transitions.push(Transition::Update {
                    src: label_list(a.trim(), line)?,
                    dst: label_list(b.trim(), line)?,
                });
            }
            "reset" => {
                let (a, b) = rest
                    .split_once("->")
                    .ok_or_else(|| line_err(line, "expected '->'"))?;
                let (path, r) = a
                    .split_once('[')
                    .ok_or_else(|| line_err(line, "expected '[label]'"))?;
                let r = r
                    .trim()
                    .strip_suffix(']')
                    .ok_or_else(|| line_err(line, "expected ']'"))?;
                transitions.push(Transition::Reset {
                    src: label_list(path.trim(), line)?,
                    reset: parse_label(r.trim()).map_err(|e| line_err(line, e))?,
                    dst: label_list(b.trim(), line)?,
                });
            }
            "init" => init = Some(parse_tree(rest).map_err(|e| line_err(line, e))?),
            "target" => target = Some(parse_tree(rest).map_err(|e| line_err(line, e))?),
            _ => {
                if !extra(kw, rest, line)? {
                    return Err(line_err(line, format!("unknown directive '{kw}'")));
                }
            }
        }
    }
    let k = k.ok_or_else(|| line_err(1, format!("missing '{header} k=N' header")))?;
    let nrcs = Nrcs::new(k, states, transitions).map_err(|e| line_err(0, e))?;
    for c in init.iter().chain(target.iter()) {
        nrcs.validate_config(c)
            .map_err(|e: NrcsError| line_err(0, e))?;
    }
    Ok(NrcsFile { nrcs, init, target })
}

/// Drops a comment: a line whose first non-blank character is `#`, or a
/// trailing `# ` preceded by whitespace. Any other `#` is the budget label.
fn strip_comment(raw: &str) -> &str {
    if raw.trim_start().starts_with('#') {
        return "";
    }
    let b = raw.as_bytes();
    for i in 1..b.len() {
        if b[i] == b'#'
            && b[i - 1].is_ascii_whitespace()
            && b.get(i + 1).is_some_and(|c| *c == b' ' || *c == b'\t')
        {
            return &raw[..i];
        }
    }
    raw
}

/// Parses an `nrcs k=K` file.
pub fn parse_nrcs(text: &str) -> Result<NrcsFile, TextError> {
    parse_nrcs_with(text, "nrcs", &mut |_, _, _| Ok(false))
}

/// Renders in the format read by [`parse_nrcs`].
pub fn render_nrcs(nrcs: &Nrcs, init: Option<&Config>, target: Option<&Config>) -> String {
    let mut s = format!("nrcs k={}\n", nrcs.k());
    render_body(&mut s, nrcs, init, target);
    s
}

fn render_body(s: &mut String, nrcs: &Nrcs, init: Option<&Config>, target: Option<&Config>) {
    // A bare `#` state goes on its own line so it cannot read as a comment.
    let budget = Label::new("#");
    s.push_str("states");
    for l in nrcs.states().iter().filter(|l| **l != budget) {
        s.push(' ');
        s.push_str(&l.to_string());
    }
    s.push('\n');
    if nrcs.has_state(&budget) {
        s.push_str("states #\n");
    }
    for t in nrcs.transitions() {
        s.push_str(&t.to_string());
        s.push('\n');
    }
    if let Some(c) = init {
        s.push_str(&format!("init   {c}\n"));
    }
    if let Some(c) = target {
        s.push_str(&format!("target {c}\n"));
    }
}
