use num_bigint::BigInt;

use super::expr::{Expr, Var};
use super::SpecError;
use crate::algebra::{AlgebraSpec, BracketRule, Parity, Symmetry};
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(k) => format!("integer {k}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of line".into(),
        }
    }
}

fn expected(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    col0: usize,
    _src: &'a str,
}

/// Tokens of one expression, each with its 1-based column in the source line.
fn tokenize(src: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, SpecError> {
    let mut lx = Lexer { chars: src.char_indices().collect(), pos: 0, line, col0, _src: src };
    let mut out = Vec::new();
    while lx.pos < lx.chars.len() {
        let (byte, c) = lx.chars[lx.pos];
        let col = lx.col0 + byte;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            lx.pos += 1;
        } else if c.is_whitespace() {
            lx.pos += 1;
        } else if c.is_ascii_digit() {
            let start = lx.pos;
            while lx.pos < lx.chars.len() && lx.chars[lx.pos].1.is_ascii_digit() {
                lx.pos += 1;
            }
            let digits: String = lx.chars[start..lx.pos].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Int(digits.parse().expect("ascii digits")), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = lx.pos;
            while lx.pos < lx.chars.len() && (lx.chars[lx.pos].1.is_alphanumeric() || lx.chars[lx.pos].1 == '_') {
                lx.pos += 1;
            }
            let name: String = lx.chars[start..lx.pos].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Ident(name), col));
        } else {
            return Err(SpecError::Parse {
                line: lx.line,
                column: col,
                expected: expected(&["'+'", "'-'", "'*'", "'('", "')'", "integer", "variable"]),
                found: format!("{c:?}"),
            });
        }
    }
    let end_col = col0 + src.len();
    out.push((Tok::End, end_col));
    Ok(out)
}

struct ExprParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl ExprParser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, exp: &[&str]) -> Result<T, SpecError> {
        Err(SpecError::Parse {
            line: self.line,
            column: self.col(),
            expected: expected(exp),
            found: self.peek().describe(),
        })
    }

    fn expr(&mut self) -> Result<Expr, SpecError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::add(acc, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SpecError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Expr::mul(acc, self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, SpecError> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::neg(self.factor()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail(&["'+'", "'-'", "'*'", "')'"]);
                }
                self.bump();
                Ok(Expr::paren(inner))
            }
            Tok::Int(p) => {
                self.bump();
                if *self.peek() != Tok::Slash {
                    return Ok(Expr::Int(Rational::from(p)));
                }
                self.bump();
                match self.peek().clone() {
                    Tok::Int(q) if q != BigInt::from(0) => {
                        self.bump();
                        Ok(Expr::Ratio(Rational::new(p, q).expect("nonzero")))
                    }
                    _ => self.fail(&["nonzero integer denominator"]),
                }
            }
            Tok::Ident(name) => match Var::from_name(&name) {
                Some(v) => {
                    self.bump();
                    Ok(Expr::var(v))
                }
                None => Err(SpecError::UnknownVariable { line: self.line, column: col, name }),
            },
            _ => self.fail(&["'-'", "'('", "integer", "variable"]),
        }
    }
}

/// Parses one coefficient expression. `col0` is the column of the first byte of `src`.
pub(super) fn parse_expr_at(src: &str, line: usize, col0: usize) -> Result<Expr, SpecError> {
    let mut p = ExprParser { toks: tokenize(src, line, col0)?, pos: 0, line };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["'+'", "'-'", "'*'", "end of line"]);
    }
    Ok(e)
}

struct Word<'a> {
    text: &'a str,
    col: usize,
}

fn words(s: &str, col0: usize) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(k),
            (true, Some(b)) => {
                out.push(Word { text: &s[b..k], col: col0 + b });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn word_error(line: usize, w: Option<&Word>, end_col: usize, exp: &[&str]) -> SpecError {
    SpecError::Parse {
        line,
        column: w.map_or(end_col, |w| w.col),
        expected: expected(exp),
        found: w.map_or_else(|| "end of line".to_string(), |w| format!("{:?}", w.text)),
    }
}

pub(super) fn parse_spec(text: &str) -> Result<AlgebraSpec, SpecError> {
    let mut name: Option<String> = None;
    let mut is_super: Option<bool> = None;
    let mut rules: Vec<(usize, BracketRule)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let ws = words(content, 1);
        let Some(head) = ws.first() else { continue };
        let end_col = content.len() + 1;
        match head.text {
            "algebra" => {
                if name.is_some() {
                    return Err(word_error(line, Some(head), end_col, &["rule", "super"]));
                }
                match ws.as_slice() {
                    [_, n] => name = Some(n.text.to_string()),
                    [_] => return Err(word_error(line, None, end_col, &["algebra name"])),
                    [_, _, extra, ..] => return Err(word_error(line, Some(extra), end_col, &["end of line"])),
                    [] => unreachable!(),
                }
            }
            "super" => {
                if is_super.is_some() {
                    return Err(word_error(line, Some(head), end_col, &["rule", "algebra"]));
                }
                match ws.as_slice() {
                    [_, v] if v.text == "true" => is_super = Some(true),
                    [_, v] if v.text == "false" => is_super = Some(false),
                    [_, _, extra, ..] => return Err(word_error(line, Some(extra), end_col, &["end of line"])),
                    _ => return Err(word_error(line, ws.get(1), end_col, &["true", "false"])),
                }
            }
            "rule" => {
                let colon = content
                    .find(':')
                    .ok_or_else(|| word_error(line, None, end_col, &["':'"]))?;
                let header = words(&content[..colon], 1);
                let parity = |idx: usize| -> Result<Parity, SpecError> {
                    match header.get(idx).map(|w| w.text) {
                        Some("even") => Ok(Parity::Even),
                        Some("odd") => Ok(Parity::Odd),
                        _ => Err(word_error(line, header.get(idx), colon + 1, &["even", "odd"])),
                    }
                };
                let left = parity(1)?;
                let right = parity(2)?;
                if left > right {
                    return Err(SpecError::Parse {
                        line,
                        column: header[1].col,
                        expected: expected(&["even even", "even odd", "odd odd"]),
                        found: "odd even".into(),
                    });
                }
                let symmetry = match header.get(3).map(|w| w.text) {
                    Some("antisymmetric") => Symmetry::Antisymmetric,
                    Some("symmetric") => Symmetry::Symmetric,
                    _ => return Err(word_error(line, header.get(3), colon + 1, &["antisymmetric", "symmetric"])),
                };
                if let Some(extra) = header.get(4) {
                    return Err(word_error(line, Some(extra), colon + 1, &["':'"]));
                }
                if symmetry != Symmetry::required(left, right) {
                    return Err(SpecError::SymmetryMismatch { line, left, right, declared: symmetry.name() });
                }
                if let Some((first, _)) = rules.iter().find(|(_, r)| r.left == left && r.right == right) {
                    return Err(SpecError::DuplicateRule { line, first: *first, left, right });
                }
                let coefficient = parse_expr_at(&content[colon + 1..], line, colon + 2)?;
                rules.push((line, BracketRule { left, right, symmetry, coefficient }));
            }
            _ => return Err(word_error(line, Some(head), end_col, &["algebra", "super", "rule"])),
        }
    }

    let name = name.ok_or(SpecError::MissingHeader("algebra"))?;
    let is_super = is_super.ok_or(SpecError::MissingHeader("super"))?;
    let required: &[(Parity, Parity)] = if is_super {
        &[(Parity::Even, Parity::Even), (Parity::Even, Parity::Odd), (Parity::Odd, Parity::Odd)]
    } else {
        &[(Parity::Even, Parity::Even)]
    };
    for (line, r) in &rules {
        if !required.contains(&(r.left, r.right)) {
            return Err(SpecError::UndeclaredParity { line: *line, left: r.left, right: r.right });
        }
    }
    for &(left, right) in required {
        if !rules.iter().any(|(_, r)| r.left == left && r.right == right) {
            return Err(SpecError::MissingRule { left, right });
        }
    }
    rules.sort_by_key(|(_, r)| (r.left, r.right));
    Ok(AlgebraSpec { name, is_super, rules: rules.into_iter().map(|(_, r)| r).collect() })
}
