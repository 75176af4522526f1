//! Inline expressions: sums and products of instance atoms with rational coefficients.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := integer ['/' integer] | name '(' args ')' | '(' expr ')'
//! ```
//!
//! Atom arguments are split on top-level commas; brackets and double quotes nest.

use crate::algebra::{Coeff, Elem};
use crate::error::{Error, Result};
use crate::hopf::Instance;
use crate::render;

/// Parses an inline expression, or an element in JSON form when the input starts with `[`.
pub fn parse_input(inst: &dyn Instance, s: &str) -> Result<Elem> {
    if s.trim_start().starts_with('[') {
        render::elem_from_json(inst, s)
    } else {
        parse_expr(inst, s)
    }
}

pub fn parse_expr(inst: &dyn Instance, s: &str) -> Result<Elem> {
    let mut p = Parser { inst, src: s, pos: 0 };
    let x = p.expr()?;
    p.skip_ws();
    if p.pos < s.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(x)
}

/// Splits atom arguments on commas outside brackets and strings.
pub fn split_args(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut stack = Vec::new();
    let mut in_str = false;
    let mut escaped = false;
    for ch in s.chars() {
        if in_str {
            cur.push(ch);
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_str = false;
            }
            continue;
        }
        match ch {
            '"' => in_str = true,
            '(' => stack.push(')'),
            '[' => stack.push(']'),
            '{' => stack.push('}'),
            ')' | ']' | '}' => {
                if stack.pop() != Some(ch) {
                    return Err(Error::Parse(format!("unbalanced {ch:?} in {s:?}")));
                }
            }
            ',' if stack.is_empty() => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if in_str || !stack.is_empty() {
        return Err(Error::Parse(format!("unterminated argument list {s:?}")));
    }
    if !(out.is_empty() && cur.trim().is_empty()) {
        out.push(cur);
    }
    Ok(out)
}

struct Parser<'a> {
    inst: &'a dyn Instance,
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Elem> {
        let mut acc = Elem::zero();
        let mut sign = if self.eat('-') {
            -Coeff::one()
        } else {
            self.eat('+');
            Coeff::one()
        };
        loop {
            let t = self.term()?;
            acc.add_scaled(&t, &sign);
            if self.eat('+') {
                sign = Coeff::one();
            } else if self.eat('-') {
                sign = -Coeff::one();
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Elem> {
        let sym = self.inst.symmetry();
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat('*') {
                acc = acc.mul(&self.factor()?, sym);
                continue;
            }
            match self.peek() {
                Some(c) if c == '(' || c.is_ascii_alphanumeric() || c == '_' => {
                    acc = acc.mul(&self.factor()?, sym);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Elem> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let x = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(x)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits();
                let c = if self.eat('/') {
                    self.skip_ws();
                    let den = self.digits();
                    if den.is_empty() {
                        return Err(self.error("expected a denominator"));
                    }
                    format!("{num}/{den}").parse::<Coeff>()?
                } else {
                    num.parse::<Coeff>()?
                };
                Ok(Elem::scalar(c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.atom(),
            _ => Err(self.error("expected a coefficient, atom or '('")),
        }
    }

    fn digits(&mut self) -> String {
        let n = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
        let s = self.rest()[..n].to_string();
        self.pos += n;
        s
    }

    fn atom(&mut self) -> Result<Elem> {
        let n = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '-')
            .map(char::len_utf8)
            .sum::<usize>();
        let name = self.rest()[..n].to_string();
        self.pos += n;
        if self.peek() != Some('(') {
            return Err(self.error(&format!("expected '(' after {name}")));
        }
        let body_start = self.pos + 1;
        let mut depth = Vec::new();
        let mut in_str = false;
        let mut escaped = false;
        let mut end = None;
        for (i, ch) in self.src[self.pos..].char_indices() {
            if in_str {
                if escaped {
                    escaped = false;
                } else if ch == '\\' {
                    escaped = true;
                } else if ch == '"' {
                    in_str = false;
                }
                continue;
            }
            match ch {
                '"' => in_str = true,
                '(' => depth.push(')'),
                '[' => depth.push(']'),
                '{' => depth.push('}'),
                ')' | ']' | '}' => {
                    if depth.pop() != Some(ch) {
                        return Err(self.error("unbalanced brackets"));
                    }
                    if depth.is_empty() {
                        end = Some(self.pos + i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let end = end.ok_or_else(|| self.error(&format!("unterminated {name}(..)")))?;
        let args = split_args(&self.src[body_start..end])?;
        self.pos = end + 1;
        self.inst.parse_atom(&name, &args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Word;
    use crate::instances::{instance_by_name, surj};

    #[test]
    fn sums_products_and_coefficients() {
        let s = instance_by_name("surj-ord").unwrap();
        let x = parse_expr(&*s, "2 pi(3) - 1/2 pi(2)*pi(2) + 1").unwrap();
        assert_eq!(x.coeff(&Word::single(surj::pi(3))), Coeff::from_int(2));
        assert_eq!(x.coeff(&Word::new(vec![surj::pi(2), surj::pi(2)], s.symmetry())), Coeff::ratio(-1, 2));
        assert_eq!(x.coeff(&Word::unit()), Coeff::one());
        let y = parse_expr(&*s, "(pi(2) + pi(3)) pi(2)").unwrap();
        assert_eq!(y.len(), 2);
    }

    #[test]
    fn nested_arguments() {
        assert_eq!(split_args(r#"{"a":[1,2]}, (x,y), "p,q""#).unwrap().len(), 3);
        assert_eq!(split_args("").unwrap().len(), 0);
        assert!(split_args("(]").is_err());
    }

    #[test]
    fn errors_are_reported() {
        let s = instance_by_name("surj-ord").unwrap();
        assert!(parse_expr(&*s, "pi(0)").is_err());
        assert!(parse_expr(&*s, "pi(2").is_err());
        assert!(parse_expr(&*s, "foo(2)").is_err());
        assert!(parse_expr(&*s, "pi(2) +").is_err());
    }

    #[test]
    fn json_input() {
        let s = instance_by_name("surj-ord").unwrap();
        let x = parse_input(&*s, r#"[{"word":["pi(2)"],"coeff":"3"}]"#).unwrap();
        assert_eq!(x, parse_expr(&*s, "3 pi(2)").unwrap());
    }
}
