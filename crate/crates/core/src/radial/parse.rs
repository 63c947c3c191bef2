//! Prefix grammar for radial expressions.
//!
//! ```text
//! expr  := number | name '(' [arg (',' arg)*] ')'
//! arg   := [ident '='] expr
//! ```
//!
//! Functions: `const(v)`, `powr(a)`, `bnd(c=1, k, R=1)`, `logr(R=1)`,
//! `bump(lo, hi)`, `rampup(lo, hi)`, `rampdown(lo, hi)`, `add(..)`, `mul(..)`,
//! `neg(x)`, `boundary_family(k, delta, c=1, R=1)`, `origin_family(k, delta)`,
//! `extremal(b, p, c=1, R=1)`. A bare number denotes a constant.

use super::expr::RadialExpr;
use super::families::{extremal_candidate, make_boundary_family, make_origin_family};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Eq,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        match ch {
            c if c.is_ascii_whitespace() => i += 1,
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            '=' => {
                out.push((i, Tok::Eq));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    let exp_sign = (d == '-' || d == '+') && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: format!("bad number '{text}'"),
                })?;
                out.push((start, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

enum Value {
    Num(f64),
    Expr(RadialExpr),
}

impl Value {
    fn into_expr(self) -> RadialExpr {
        match self {
            Value::Num(v) => RadialExpr::Const(v),
            Value::Expr(e) => e,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

struct Call {
    name: String,
    pos: usize,
    positional: Vec<Value>,
    named: Vec<(String, Value)>,
}

impl Call {
    /// Binds numeric parameters by name or position; `None` default means required.
    fn numbers(mut self, params: &[(&str, Option<f64>)]) -> Result<Vec<f64>> {
        if self.positional.len() > params.len() {
            return Err(self.err(format!("{} takes at most {} arguments", self.name, params.len())));
        }
        let mut slots: Vec<Option<Value>> = params.iter().map(|_| None).collect();
        for (i, v) in std::mem::take(&mut self.positional).into_iter().enumerate() {
            slots[i] = Some(v);
        }
        let named = std::mem::take(&mut self.named);
        for (key, v) in named {
            let idx = params
                .iter()
                .position(|(n, _)| *n == key)
                .ok_or_else(|| Error::Parse {
                    pos: self.pos,
                    msg: format!("{} has no parameter '{key}'", self.name),
                })?;
            if slots[idx].is_some() {
                return Err(self.err(format!("parameter '{key}' given twice")));
            }
            slots[idx] = Some(v);
        }
        slots
            .into_iter()
            .zip(params)
            .map(|(slot, (pname, default))| match slot {
                Some(Value::Num(v)) => Ok(v),
                Some(Value::Expr(RadialExpr::Const(v))) => Ok(v),
                Some(Value::Expr(_)) => Err(self.err(format!("parameter '{pname}' must be a number"))),
                None => default.ok_or_else(|| self.err(format!("missing parameter '{pname}'"))),
            })
            .collect()
    }

    fn exprs(self) -> Result<Vec<RadialExpr>> {
        if !self.named.is_empty() {
            return Err(self.err(format!("{} takes no named arguments", self.name)));
        }
        Ok(self.positional.into_iter().map(Value::into_expr).collect())
    }

    fn err(&self, msg: String) -> Error {
        Error::Parse { pos: self.pos, msg }
    }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                pos: self.pos(),
                msg: format!("expected {want:?}"),
            })
        }
    }

    fn value(&mut self) -> Result<Value> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(Value::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let call = self.call(name, pos)?;
                Ok(Value::Expr(build(call)?))
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected a number or a function call".into(),
            }),
        }
    }

    fn call(&mut self, name: String, pos: usize) -> Result<Call> {
        self.expect(Tok::LParen)?;
        let mut call = Call {
            name,
            pos,
            positional: Vec::new(),
            named: Vec::new(),
        };
        if self.peek() == Some(&Tok::RParen) {
            self.at += 1;
            return Ok(call);
        }
        loop {
            let is_named = matches!(self.peek(), Some(Tok::Ident(_)))
                && self.toks.get(self.at + 1).map(|(_, t)| t) == Some(&Tok::Eq);
            if is_named {
                let Some(Tok::Ident(key)) = self.peek().cloned() else {
                    unreachable!()
                };
                self.at += 2;
                let v = self.value()?;
                call.named.push((key, v));
            } else {
                if !call.named.is_empty() {
                    return Err(Error::Parse {
                        pos: self.pos(),
                        msg: "positional argument after named argument".into(),
                    });
                }
                let v = self.value()?;
                call.positional.push(v);
            }
            match self.peek() {
                Some(Tok::Comma) => self.at += 1,
                Some(Tok::RParen) => {
                    self.at += 1;
                    return Ok(call);
                }
                _ => {
                    return Err(Error::Parse {
                        pos: self.pos(),
                        msg: "expected ',' or ')'".into(),
                    })
                }
            }
        }
    }
}

fn build(call: Call) -> Result<RadialExpr> {
    let name = call.name.clone();
    let pos = call.pos;
    let wrap = |e: Error| match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            pos,
            msg: other.to_string(),
        },
    };
    let two = |call: Call| -> Result<(f64, f64)> {
        let v = call.numbers(&[("lo", None), ("hi", None)])?;
        if !(v[0] < v[1]) {
            return Err(Error::Parse {
                pos,
                msg: format!("cutoff needs lo < hi, got ({}, {})", v[0], v[1]),
            });
        }
        Ok((v[0], v[1]))
    };
    Ok(match name.as_str() {
        "const" => RadialExpr::Const(call.numbers(&[("v", None)])?[0]),
        "powr" => RadialExpr::PowerR(call.numbers(&[("a", None)])?[0]),
        "bnd" => {
            let v = call.numbers(&[("c", Some(1.0)), ("k", None), ("R", Some(1.0))])?;
            RadialExpr::boundary_power(v[0], v[1], v[2])
        }
        "logr" => RadialExpr::log_r(call.numbers(&[("R", Some(1.0))])?[0]),
        "bump" => {
            let (lo, hi) = two(call)?;
            RadialExpr::Bump { lo, hi }
        }
        "rampup" => {
            let (lo, hi) = two(call)?;
            RadialExpr::RampUp { lo, hi }
        }
        "rampdown" => {
            let (lo, hi) = two(call)?;
            RadialExpr::RampDown { lo, hi }
        }
        "add" | "mul" => {
            let items = call.exprs()?;
            if items.is_empty() {
                return Err(Error::Parse {
                    pos,
                    msg: format!("{name} needs at least one argument"),
                });
            }
            if name == "add" {
                RadialExpr::Sum(items)
            } else {
                RadialExpr::Product(items)
            }
        }
        "neg" => {
            let mut items = call.exprs()?;
            if items.len() != 1 {
                return Err(Error::Parse {
                    pos,
                    msg: "neg takes exactly one argument".into(),
                });
            }
            RadialExpr::Negate(Box::new(items.remove(0)))
        }
        "boundary_family" => {
            let v = call.numbers(&[("k", None), ("delta", None), ("c", Some(1.0)), ("R", Some(1.0))])?;
            make_boundary_family(v[0], v[1], v[2], v[3]).map_err(wrap)?
        }
        "origin_family" => {
            let v = call.numbers(&[("k", None), ("delta", None)])?;
            make_origin_family(v[0], v[1]).map_err(wrap)?
        }
        "extremal" => {
            let v = call.numbers(&[("b", None), ("p", None), ("c", Some(1.0)), ("R", Some(1.0))])?;
            extremal_candidate(v[0], v[1], v[2], v[3])
        }
        other => {
            return Err(Error::Parse {
                pos,
                msg: format!("unknown function '{other}'"),
            })
        }
    })
}

/// Parses the textual form produced by `Display for RadialExpr`.
pub fn parse_expr(src: &str) -> Result<RadialExpr> {
    let toks = tokenize(src)?;
    let mut parser = Parser {
        toks,
        at: 0,
        len: src.len(),
    };
    let v = parser.value()?;
    if parser.at != parser.toks.len() {
        return Err(Error::Parse {
            pos: parser.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(v.into_expr())
}

impl std::str::FromStr for RadialExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}
