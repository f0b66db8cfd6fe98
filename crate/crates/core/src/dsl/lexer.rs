//! Tokens of model source. `%` starts a comment running to end of line.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Diagnostic, Span};

/// Reserved words; they never denote identifiers or bare symbols.
pub const KEYWORDS: &[&str] = &[
    "let", "query", "given", "and", "or", "not", "in", "table", "mix", "true", "false",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Unsigned number literal, decimal point allowed.
    Number(BigRational),
    Str(String),
    /// `@name`, a function value.
    FnRef(String),
    Eq,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {}", crate::value::format_number(n)),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::FnRef(s) => format!("`@{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.punct()),
        }
    }

    fn punct(&self) -> &'static str {
        match self {
            Tok::Eq => "=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (usize, usize, usize)) -> Span {
        Span {
            start: start.0,
            end: self.pos,
            line: start.1,
            col: start.2,
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '%' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }

    /// A decimal literal, or an exact ratio when written `n/d` without
    /// spaces.
    fn number(&mut self, start: (usize, usize, usize)) -> Result<BigRational, Diagnostic> {
        let digits = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        let int_part = &self.src[digits..self.pos];
        let mut value = BigRational::from_integer(int_part.parse::<BigInt>().unwrap());
        if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            let fstart = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            let frac = &self.src[fstart..self.pos];
            let num: BigInt = frac.parse().unwrap();
            let den = BigInt::from(10).pow(frac.len() as u32);
            value += BigRational::new(num, den);
        } else if self.peek() == Some('/') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            let dstart = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            let den: BigInt = self.src[dstart..self.pos].parse().unwrap();
            if den.is_zero() {
                return Err(Diagnostic::error("zero denominator", self.span_from(start)));
            }
            value /= BigRational::from_integer(den);
        }
        Ok(value)
    }

    fn string(&mut self, start: (usize, usize, usize)) -> Result<String, Diagnostic> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(Diagnostic::error("unterminated string", self.span_from(start)))
                }
                Some('"') => return Ok(out),
                Some('\\') => {
                    let esc = self.bump();
                    let c = match esc {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('0') => '\0',
                        Some('\\') => '\\',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('u') => self.unicode_escape(start)?,
                        _ => {
                            return Err(Diagnostic::error(
                                "invalid escape in string",
                                self.span_from(start),
                            ))
                        }
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn unicode_escape(&mut self, start: (usize, usize, usize)) -> Result<char, Diagnostic> {
        let bad = |lx: &Self| Diagnostic::error("invalid unicode escape", lx.span_from(start));
        if self.bump() != Some('{') {
            return Err(bad(self));
        }
        let hstart = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
            self.bump();
        }
        let hex = &self.src[hstart..self.pos];
        if self.bump() != Some('}') {
            return Err(bad(self));
        }
        u32::from_str_radix(hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| bad(self))
    }

    fn next_token(&mut self) -> Result<Token, Diagnostic> {
        self.skip_trivia();
        let start = (self.pos, self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok(Token {
                tok: Tok::Eof,
                span: self.span_from(start),
            });
        };
        let tok = if c.is_alphabetic() || c == '_' {
            Tok::Ident(self.word())
        } else if c.is_ascii_digit() {
            Tok::Number(self.number(start)?)
        } else if c == '"' {
            Tok::Str(self.string(start)?)
        } else if c == '@' {
            self.bump();
            let name = self.word();
            if name.is_empty() {
                return Err(Diagnostic::error(
                    "expected a function name after `@`",
                    self.span_from(start),
                ));
            }
            Tok::FnRef(name)
        } else {
            self.bump();
            let next = self.peek();
            let two = |lx: &mut Self, t: Tok| {
                lx.bump();
                t
            };
            match (c, next) {
                ('=', Some('=')) => two(self, Tok::EqEq),
                ('!', Some('=')) => two(self, Tok::Ne),
                ('<', Some('=')) => two(self, Tok::Le),
                ('>', Some('=')) => two(self, Tok::Ge),
                ('=', _) => Tok::Eq,
                ('<', _) => Tok::Lt,
                ('>', _) => Tok::Gt,
                ('+', _) => Tok::Plus,
                ('-', _) => Tok::Minus,
                ('*', _) => Tok::Star,
                ('/', _) => Tok::Slash,
                ('(', _) => Tok::LParen,
                (')', _) => Tok::RParen,
                ('{', _) => Tok::LBrace,
                ('}', _) => Tok::RBrace,
                ('[', _) => Tok::LBracket,
                (']', _) => Tok::RBracket,
                (',', _) => Tok::Comma,
                (':', _) => Tok::Colon,
                _ => {
                    return Err(Diagnostic::error(
                        format!("unexpected character {c:?}"),
                        self.span_from(start),
                    ))
                }
            }
        };
        Ok(Token {
            tok,
            span: self.span_from(start),
        })
    }
}

/// Splits `src` into tokens, ending with [`Tok::Eof`].
pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next_token()?;
        let eof = t.tok == Tok::Eof;
        out.push(t);
        if eof {
            return Ok(out);
        }
    }
}

/// `n/d` for two literal numbers, `None` when `d` is zero.
pub(crate) fn divide(n: &BigRational, d: &BigRational) -> Option<BigRational> {
    (!d.is_zero()).then(|| n / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(
            toks("0.20"),
            vec![Tok::Number(BigRational::new(1.into(), 5.into())), Tok::Eof]
        );
        assert_eq!(
            toks("12.125"),
            vec![Tok::Number(BigRational::new(97.into(), 8.into())), Tok::Eof]
        );
        assert!(tokenize("3.").is_err());
        assert_eq!(
            toks("2/6 1 / 3"),
            vec![
                Tok::Number(BigRational::new(1.into(), 3.into())),
                Tok::Number(BigRational::from_integer(1.into())),
                Tok::Slash,
                Tok::Number(BigRational::from_integer(3.into())),
                Tok::Eof
            ]
        );
        assert!(tokenize("1/0").is_err());
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("a <= b % trailing\n != <>"),
            vec![
                Tok::Ident("a".into()),
                Tok::Le,
                Tok::Ident("b".into()),
                Tok::Ne,
                Tok::Lt,
                Tok::Gt,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn strings_and_function_refs() {
        assert_eq!(
            toks(r#""two \"words\"" @max"#),
            vec![Tok::Str("two \"words\"".into()), Tok::FnRef("max".into()), Tok::Eof]
        );
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("#").is_err());
    }

    #[test]
    fn spans_track_lines() {
        let t = tokenize("let x\n  = 1").unwrap();
        assert_eq!((t[2].span.line, t[2].span.col), (2, 3));
        assert_eq!(&"let x\n  = 1"[t[1].span.start..t[1].span.end], "x");
    }
}
