//! Strict JSON with source positions.
//!
//! The reader tracks line/column for every value, rejects duplicate object
//! keys, and never panics on malformed input; the writer produces the
//! canonical 2-space-indented form the rest of the crate round-trips
//! through. Only what the game file schemas need is supported: no `null` in
//! practice, numbers either exact integers or exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{pow::Pow, One};

/// 1-based source position.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A parse or decode problem. Every diagnostic carries a position; decode
/// problems also carry a pointer-style path into the document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub path: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn at(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            pos,
            path: None,
            message: message.into(),
        }
    }

    pub fn with_path(pos: Pos, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            pos,
            path: Some(path.into()),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(path) => write!(f, "{}: {}: {}", self.pos, path, self.message),
            None => write!(f, "{}: {}", self.pos, self.message),
        }
    }
}

impl std::error::Error for Diagnostic {}

/// A value plus where it started in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub pos: Pos,
    pub value: T,
}

/// Raw number text, shape-checked by the lexer, converted on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Number(pub String);

const MAX_EXPONENT: i64 = 64;

impl Number {
    /// Exact integer, accepted only in plain integer form (no fraction or
    /// exponent) within the i64 range.
    pub fn as_i64(&self) -> Option<i64> {
        if self.0.bytes().any(|b| matches!(b, b'.' | b'e' | b'E')) {
            return None;
        }
        self.0.parse().ok()
    }

    /// Exact rational value of the JSON number; fails only on out-of-range
    /// exponents.
    pub fn as_rational(&self) -> Option<BigRational> {
        let s = &self.0;
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(ix) => {
                let exp: i64 = s[ix + 1..].parse().ok()?;
                (&s[..ix], exp)
            }
            None => (&s[..], 0),
        };
        if exp.abs() > MAX_EXPONENT {
            return None;
        }
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(ix) => (&mantissa[..ix], &mantissa[ix + 1..]),
            None => (mantissa, ""),
        };
        if frac_part.len() as i64 > MAX_EXPONENT {
            return None;
        }
        let digits: String = format!("{int_part}{frac_part}");
        let numerator: BigInt = digits.parse().ok()?;
        let shift = exp - frac_part.len() as i64;
        let ten = BigInt::from(10);
        let value = if shift >= 0 {
            BigRational::from(numerator * ten.pow(shift as u64))
        } else {
            BigRational::new(numerator, ten.pow((-shift) as u64))
        };
        Some(value)
    }
}

/// Object entries in source order.
pub type KeyedPairs = [(Spanned<String>, Spanned<Value>)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Null,
    Bool(bool),
    Number(Number),
    String(String),
    Array(Vec<Spanned<Value>>),
    /// Key order preserved; duplicate keys are rejected while parsing.
    Object(Vec<(Spanned<String>, Spanned<Value>)>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(_) => "number",
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        }
    }
}

const MAX_DEPTH: usize = 128;

/// Parses one JSON document; trailing content is an error.
pub fn parse(text: &str) -> Result<Spanned<Value>, Diagnostic> {
    let mut p = Parser {
        rest: text,
        pos: Pos { line: 1, col: 1 },
    };
    p.skip_ws();
    let value = p.value(0)?;
    p.skip_ws();
    if !p.rest.is_empty() {
        return Err(Diagnostic::at(p.pos, "expected end of input"));
    }
    Ok(value)
}

struct Parser<'a> {
    rest: &'a str,
    pos: Pos,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest.chars().next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\n' | '\r')) {
            self.bump();
        }
    }

    fn expect(&mut self, want: char) -> Result<(), Diagnostic> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(Diagnostic::at(self.pos, format!("expected {want:?}, found {c:?}"))),
            None => Err(Diagnostic::at(self.pos, format!("expected {want:?}, found end of input"))),
        }
    }

    fn value(&mut self, depth: usize) -> Result<Spanned<Value>, Diagnostic> {
        if depth > MAX_DEPTH {
            return Err(Diagnostic::at(self.pos, "nesting too deep"));
        }
        let pos = self.pos;
        let value = match self.peek() {
            None => return Err(Diagnostic::at(pos, "expected a value, found end of input")),
            Some('{') => self.object(depth)?,
            Some('[') => self.array(depth)?,
            Some('"') => Value::String(self.string()?),
            Some('t') => self.keyword("true", Value::Bool(true))?,
            Some('f') => self.keyword("false", Value::Bool(false))?,
            Some('n') => self.keyword("null", Value::Null)?,
            Some(c) if c == '-' || c.is_ascii_digit() => Value::Number(self.number()?),
            Some(c) => return Err(Diagnostic::at(pos, format!("expected a value, found {c:?}"))),
        };
        Ok(Spanned { pos, value })
    }

    fn keyword(&mut self, word: &str, value: Value) -> Result<Value, Diagnostic> {
        let pos = self.pos;
        for want in word.chars() {
            if self.bump() != Some(want) {
                return Err(Diagnostic::at(pos, format!("expected {word:?}")));
            }
        }
        Ok(value)
    }

    fn object(&mut self, depth: usize) -> Result<Value, Diagnostic> {
        self.expect('{')?;
        let mut pairs: Vec<(Spanned<String>, Spanned<Value>)> = Vec::new();
        self.skip_ws();
        if self.peek() == Some('}') {
            self.bump();
            return Ok(Value::Object(pairs));
        }
        loop {
            self.skip_ws();
            let key_pos = self.pos;
            if self.peek() != Some('"') {
                return Err(Diagnostic::at(key_pos, "expected a string key"));
            }
            let key = self.string()?;
            if pairs.iter().any(|(k, _)| k.value == key) {
                return Err(Diagnostic::at(key_pos, format!("duplicate key {key:?}")));
            }
            self.skip_ws();
            self.expect(':')?;
            self.skip_ws();
            let value = self.value(depth + 1)?;
            pairs.push((Spanned { pos: key_pos, value: key }, value));
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some('}') => {
                    self.bump();
                    return Ok(Value::Object(pairs));
                }
                Some(c) => {
                    return Err(Diagnostic::at(self.pos, format!("expected ',' or '}}', found {c:?}")))
                }
                None => return Err(Diagnostic::at(self.pos, "unterminated object")),
            }
        }
    }

    fn array(&mut self, depth: usize) -> Result<Value, Diagnostic> {
        self.expect('[')?;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.bump();
            return Ok(Value::Array(items));
        }
        loop {
            self.skip_ws();
            items.push(self.value(depth + 1)?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(']') => {
                    self.bump();
                    return Ok(Value::Array(items));
                }
                Some(c) => {
                    return Err(Diagnostic::at(self.pos, format!("expected ',' or ']', found {c:?}")))
                }
                None => return Err(Diagnostic::at(self.pos, "unterminated array")),
            }
        }
    }

    fn string(&mut self) -> Result<String, Diagnostic> {
        let start = self.pos;
        self.expect('"')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(Diagnostic::at(start, "unterminated string")),
                Some('"') => return Ok(out),
                Some('\\') => {
                    let esc_pos = self.pos;
                    match self.bump() {
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        Some('/') => out.push('/'),
                        Some('b') => out.push('\u{8}'),
                        Some('f') => out.push('\u{c}'),
                        Some('n') => out.push('\n'),
                        Some('r') => out.push('\r'),
                        Some('t') => out.push('\t'),
                        Some('u') => out.push(self.unicode_escape(esc_pos)?),
                        Some(c) => {
                            return Err(Diagnostic::at(esc_pos, format!("invalid escape '\\{c}'")))
                        }
                        None => return Err(Diagnostic::at(start, "unterminated string")),
                    }
                }
                Some(c) if (c as u32) < 0x20 => {
                    return Err(Diagnostic::at(start, "control character in string"))
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn unicode_escape(&mut self, at: Pos) -> Result<char, Diagnostic> {
        let first = self.hex4(at)?;
        if (0xD800..0xDC00).contains(&first) {
            // high surrogate: require a low surrogate right behind
            if self.bump() != Some('\\') || self.bump() != Some('u') {
                return Err(Diagnostic::at(at, "unpaired surrogate in \\u escape"));
            }
            let second = self.hex4(at)?;
            if !(0xDC00..0xE000).contains(&second) {
                return Err(Diagnostic::at(at, "unpaired surrogate in \\u escape"));
            }
            let code = 0x10000 + ((first - 0xD800) << 10) + (second - 0xDC00);
            return char::from_u32(code).ok_or_else(|| Diagnostic::at(at, "invalid \\u escape"));
        }
        if (0xDC00..0xE000).contains(&first) {
            return Err(Diagnostic::at(at, "unpaired surrogate in \\u escape"));
        }
        char::from_u32(first).ok_or_else(|| Diagnostic::at(at, "invalid \\u escape"))
    }

    fn hex4(&mut self, at: Pos) -> Result<u32, Diagnostic> {
        let mut code = 0u32;
        for _ in 0..4 {
            let digit = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| Diagnostic::at(at, "invalid \\u escape"))?;
            code = code * 16 + digit;
        }
        Ok(code)
    }

    fn number(&mut self) -> Result<Number, Diagnostic> {
        let start_pos = self.pos;
        let start = self.rest;
        if self.peek() == Some('-') {
            self.bump();
        }
        match self.peek() {
            Some('0') => {
                self.bump();
                if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    return Err(Diagnostic::at(start_pos, "leading zeros are not allowed"));
                }
            }
            Some(c) if c.is_ascii_digit() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
            _ => return Err(Diagnostic::at(start_pos, "expected digits")),
        }
        if self.peek() == Some('.') {
            self.bump();
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(Diagnostic::at(self.pos, "expected digits after '.'"));
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(Diagnostic::at(self.pos, "expected digits in exponent"));
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        let len = start.len() - self.rest.len();
        Ok(Number(start[..len].to_owned()))
    }
}

// ---------------------------------------------------------------------------
// canonical writer

/// Output tree for the canonical form: fixed key order is the caller's job,
/// rendering (2-space indent, inline scalar arrays) is ours.
#[derive(Clone, Debug)]
pub enum Out {
    Null,
    Int(i64),
    Str(String),
    Bool(bool),
    Arr(Vec<Out>),
    Obj(Vec<(String, Out)>),
}

impl Out {
    pub fn str(s: impl Into<String>) -> Out {
        Out::Str(s.into())
    }

    /// Rationals are written as plain integers when whole, `"p/q"` otherwise.
    pub fn rational(r: &BigRational) -> Out {
        if r.denom().is_one() {
            if let Ok(i) = i64::try_from(r.numer()) {
                return Out::Int(i);
            }
        }
        Out::Str(format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn render(&self) -> String {
        let mut buf = String::new();
        self.write(&mut buf, 0);
        buf.push('\n');
        buf
    }

    fn is_scalar(&self) -> bool {
        matches!(self, Out::Null | Out::Int(_) | Out::Str(_) | Out::Bool(_))
    }

    fn write(&self, buf: &mut String, depth: usize) {
        match self {
            Out::Null => buf.push_str("null"),
            Out::Int(i) => buf.push_str(&i.to_string()),
            Out::Bool(b) => buf.push_str(if *b { "true" } else { "false" }),
            Out::Str(s) => write_escaped(buf, s),
            Out::Arr(items) if items.is_empty() => buf.push_str("[]"),
            Out::Arr(items) if items.iter().all(Out::is_scalar) => {
                buf.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        buf.push_str(", ");
                    }
                    item.write(buf, depth);
                }
                buf.push(']');
            }
            Out::Arr(items) => {
                buf.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    indent(buf, depth + 1);
                    item.write(buf, depth + 1);
                    if i + 1 < items.len() {
                        buf.push(',');
                    }
                    buf.push('\n');
                }
                indent(buf, depth);
                buf.push(']');
            }
            Out::Obj(pairs) if pairs.is_empty() => buf.push_str("{}"),
            Out::Obj(pairs) => {
                buf.push_str("{\n");
                for (i, (key, value)) in pairs.iter().enumerate() {
                    indent(buf, depth + 1);
                    write_escaped(buf, key);
                    buf.push_str(": ");
                    value.write(buf, depth + 1);
                    if i + 1 < pairs.len() {
                        buf.push(',');
                    }
                    buf.push('\n');
                }
                indent(buf, depth);
                buf.push('}');
            }
        }
    }
}

fn indent(buf: &mut String, depth: usize) {
    for _ in 0..depth {
        buf.push_str("  ");
    }
}

fn write_escaped(buf: &mut String, s: &str) {
    buf.push('"');
    for c in s.chars() {
        match c {
            '"' => buf.push_str("\\\""),
            '\\' => buf.push_str("\\\\"),
            '\n' => buf.push_str("\\n"),
            '\r' => buf.push_str("\\r"),
            '\t' => buf.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                buf.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => buf.push(c),
        }
    }
    buf.push('"');
}
