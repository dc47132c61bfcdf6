//! Scalar expressions used in gate literals: `0.6+0.8i`, `-i/sqrt(2)`, `pi/2`.
//!
//! Grammar:
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | atom
//! atom    := number ['i'] | 'i' | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn parse_complex(input: &str) -> Result<Complex64> {
    let mut p = Parser {
        src: input,
        chars: input.char_indices().peekable(),
    };
    let value = p.expr()?;
    p.skip_ws();
    if let Some(&(pos, ch)) = p.chars.peek() {
        return Err(p.fail(format!("unexpected `{ch}` at offset {pos}")));
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(p.fail("value is not finite".into()));
    }
    Ok(value)
}

/// Like [`parse_complex`] but rejects a nonzero imaginary part.
pub fn parse_real(input: &str) -> Result<f64> {
    let z = parse_complex(input)?;
    if z.im != 0.0 {
        return Err(Error::Parse {
            input: input.into(),
            reason: "expected a real value".into(),
        });
    }
    Ok(z.re)
}

struct Parser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl Parser<'_> {
    fn fail(&self, reason: String) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            reason,
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.chars.next();
                Ok(())
            }
            Some(c) => Err(self.fail(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.fail(format!("expected `{want}`, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Complex64> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    acc += self.term()?;
                }
                Some('-') => {
                    self.chars.next();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Complex64> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.chars.next();
                    acc *= self.unary()?;
                }
                Some('/') => {
                    self.chars.next();
                    let d = self.unary()?;
                    if d == Complex64::new(0.0, 0.0) {
                        return Err(self.fail("division by zero".into()));
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64> {
        match self.peek() {
            Some('-') => {
                self.chars.next();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.chars.next();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Complex64> {
        match self.peek() {
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let x = self.number()?;
                if self.chars.peek().map(|&(_, c)| c) == Some('i') {
                    self.chars.next();
                    Ok(Complex64::new(0.0, x))
                } else {
                    Ok(Complex64::new(x, 0.0))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let word = self.word();
                match word.as_str() {
                    "i" => Ok(Complex64::new(0.0, 1.0)),
                    "pi" => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
                    "sqrt" => {
                        self.expect('(')?;
                        let v = self.expr()?;
                        self.expect(')')?;
                        Ok(v.sqrt())
                    }
                    other => Err(self.fail(format!("unknown identifier `{other}`"))),
                }
            }
            Some(c) => Err(self.fail(format!("unexpected `{c}`"))),
            None => Err(self.fail("unexpected end of input".into())),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.chars.peek().map(|&(p, _)| p).unwrap_or(self.src.len());
        let mut end = start;
        let mut prev = ' ';
        while let Some(&(p, c)) = self.chars.peek() {
            let exp_sign = (c == '+' || c == '-') && (prev == 'e' || prev == 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                prev = c;
                end = p + c.len_utf8();
                self.chars.next();
            } else {
                break;
            }
        }
        let text = &self.src[start..end];
        text.parse::<f64>()
            .map_err(|_| self.fail(format!("bad number `{text}`")))
    }

    fn word(&mut self) -> String {
        let mut out = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_alphabetic() {
                out.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        out
    }
}
