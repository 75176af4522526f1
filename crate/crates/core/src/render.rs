//! Text, LaTeX and JSON output for elements and tensor squares.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{ClassKey, Coeff, Elem, Tensor2, Word};
use crate::error::{Error, Result};
use crate::hopf::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?} (text, latex, json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Latex => "latex",
            Format::Json => "json",
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElemTerm {
    word: Vec<ClassKey>,
    coeff: Coeff,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorTerm {
    left: Vec<ClassKey>,
    right: Vec<ClassKey>,
    coeff: Coeff,
}

pub fn render_elem(inst: &dyn Instance, x: &Elem, format: Format) -> String {
    match format {
        Format::Json => elem_to_json(x),
        Format::Text => join_terms(x.iter().map(|(w, c)| (c, inst.render_word(w)))),
        Format::Latex => join_latex(x.iter().map(|(w, c)| (c, latex_word(w)))),
    }
}

pub fn render_tensor(inst: &dyn Instance, t: &Tensor2, format: Format) -> String {
    match format {
        Format::Json => tensor_to_json(t),
        Format::Text => join_terms(
            t.iter()
                .map(|((a, b), c)| (c, format!("{} ⊗ {}", inst.render_word(a), inst.render_word(b)))),
        ),
        Format::Latex => join_latex(
            t.iter()
                .map(|((a, b), c)| (c, format!("{} \\otimes {}", latex_word(a), latex_word(b)))),
        ),
    }
}

pub fn elem_to_json(x: &Elem) -> String {
    let terms: Vec<ElemTerm> = x
        .iter()
        .map(|(w, c)| ElemTerm {
            word: w.keys().to_vec(),
            coeff: c.clone(),
        })
        .collect();
    serde_json::to_string(&terms).expect("serializable terms")
}

pub fn tensor_to_json(t: &Tensor2) -> String {
    let terms: Vec<TensorTerm> = t
        .iter()
        .map(|((a, b), c)| TensorTerm {
            left: a.keys().to_vec(),
            right: b.keys().to_vec(),
            coeff: c.clone(),
        })
        .collect();
    serde_json::to_string(&terms).expect("serializable terms")
}

fn checked_word(inst: &dyn Instance, keys: Vec<ClassKey>) -> Result<Word> {
    for k in &keys {
        inst.check_generator(k)?;
    }
    Ok(Word::new(keys, inst.symmetry()))
}

pub fn elem_from_json(inst: &dyn Instance, s: &str) -> Result<Elem> {
    let terms: Vec<ElemTerm> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let mut x = Elem::zero();
    for t in terms {
        x.add_term(checked_word(inst, t.word)?, t.coeff);
    }
    Ok(x)
}

pub fn tensor_from_json(inst: &dyn Instance, s: &str) -> Result<Tensor2> {
    let terms: Vec<TensorTerm> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let mut x = Tensor2::zero();
    for t in terms {
        x.add_term((checked_word(inst, t.left)?, checked_word(inst, t.right)?), t.coeff);
    }
    Ok(x)
}

fn join_terms<'a>(terms: impl Iterator<Item = (&'a Coeff, String)>) -> String {
    let mut out = String::new();
    for (c, body) in terms {
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if !a.is_one() {
            out.push_str(&a.to_string());
            out.push(' ');
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn join_latex<'a>(terms: impl Iterator<Item = (&'a Coeff, String)>) -> String {
    let mut out = String::new();
    for (c, body) in terms {
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if !a.is_one() {
            let r = a.as_rational();
            if a.is_integer() {
                out.push_str(&format!("{} ", r.numer()));
            } else {
                out.push_str(&format!("\\frac{{{}}}{{{}}} ", r.numer(), r.denom()));
            }
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn latex_word(w: &Word) -> String {
    if w.is_unit() {
        return "1".into();
    }
    w.keys()
        .iter()
        .map(|k| format!("[\\texttt{{{}}}]", latex_escape(k.as_str())))
        .collect::<Vec<_>>()
        .join(" ")
}

fn latex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\textbackslash{}"),
            '{' | '}' | '_' | '^' | '#' | '$' | '%' | '&' => {
                if ch == '^' {
                    out.push_str("\\^{}");
                } else {
                    out.push('\\');
                    out.push(ch);
                }
            }
            '~' => out.push_str("\\~{}"),
            _ => out.push(ch),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{surj, SurjectionInstance};

    #[test]
    fn unit_renders_as_one() {
        let s = SurjectionInstance::ordered();
        assert_eq!(render_elem(&s, &Elem::one(), Format::Text), "1");
        assert_eq!(render_elem(&s, &Elem::one(), Format::Latex), "1");
        assert_eq!(render_tensor(&s, &Tensor2::one(), Format::Text), "1 ⊗ 1");
    }

    #[test]
    fn signs_and_fractions() {
        let s = SurjectionInstance::ordered();
        let mut x = Elem::term(Word::single(surj::pi(2)), Coeff::ratio(-3, 2));
        x.add_term(Word::unit(), Coeff::one());
        assert_eq!(render_elem(&s, &x, Format::Text), "1 - 3/2 pi(2)");
        assert_eq!(render_elem(&s, &x, Format::Latex), "1 - \\frac{3}{2} [\\texttt{pi(2)}]");
        assert_eq!(render_elem(&s, &Elem::zero(), Format::Text), "0");
    }

    #[test]
    fn json_round_trip() {
        let s = SurjectionInstance::ordered();
        let mut x = Elem::term(Word::new(vec![surj::pi(3), surj::pi(2)], s.symmetry()), Coeff::ratio(5, 7));
        x.add_term(Word::unit(), Coeff::from_int(-2));
        let j = elem_to_json(&x);
        assert_eq!(j, r#"[{"word":[],"coeff":"-2"},{"word":["pi(3)","pi(2)"],"coeff":"5/7"}]"#);
        assert_eq!(elem_from_json(&s, &j).unwrap(), x);
        let t = Tensor2::tensor(&x, &Elem::generator(surj::pi(2)));
        assert_eq!(tensor_from_json(&s, &tensor_to_json(&t)).unwrap(), t);
        assert!(elem_from_json(&s, r#"[{"word":["pi(0)"],"coeff":"1"}]"#).is_err());
    }
}
