//! JSON forms of pencils, curves and cocycles, and a parser for polynomials
//! written like "t^6 - 1" or "(t^2-2)(t^2-3)".

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, FieldDescriptor, PrimeField, Rationals};
use crate::hyperell::HyperellipticCurve;
use crate::linalg;
use crate::pencil::Pencil;
use crate::poly::{PolyRing, P};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Parses a polynomial in one variable (t or x) with integer or a/b
/// coefficients. Juxtaposition multiplies, so "2t^3" and "(t-1)(t+1)" work.
pub fn parse_poly<F: Field>(field: &F, s: &str) -> Result<P<F>> {
    let mut parser = Parser { field, ring: PolyRing::new(field), chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let p = parser.expr()?;
    if parser.pos != parser.chars.len() {
        return Err(bad(format!("unexpected {:?} at position {} in {s:?}", parser.chars[parser.pos], parser.pos)));
    }
    Ok(p)
}

struct Parser<'a, F: Field> {
    field: &'a F,
    ring: PolyRing<'a, F>,
    chars: Vec<char>,
    pos: usize,
}

impl<F: Field> Parser<'_, F> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<P<F>> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                let t = self.term()?;
                self.ring.neg(&t)
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { self.ring.add(&acc, &t) } else { self.ring.sub(&acc, &t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<P<F>> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = self.ring.mul(&acc, &f);
                }
                Some(c) if c == '(' || c == 't' || c == 'x' || c.is_ascii_digit() => {
                    let f = self.power()?;
                    acc = self.ring.mul(&acc, &f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<P<F>> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| bad("exponent too large"))?;
            return Ok(self.ring.pow(&base, e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(bad(format!("expected a number at position {start}")));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<P<F>> {
        match self.peek() {
            Some('t' | 'x') => {
                self.pos += 1;
                Ok(self.ring.x())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(bad("unbalanced parenthesis"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let value = if self.peek() == Some('/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den == BigInt::from(0) {
                        return Err(bad("zero denominator"));
                    }
                    BigRational::new(num, den)
                } else {
                    BigRational::from_integer(num)
                };
                let c = self
                    .field
                    .from_rational(&value)
                    .ok_or_else(|| bad(format!("{value} is not defined in this field")))?;
                Ok(self.ring.constant(c))
            }
            other => Err(bad(format!("unexpected {other:?} at position {}", self.pos))),
        }
    }
}

/// Accepts either the human syntax or a coefficient list, constant term
/// first.
pub fn poly_from_value<F: Field>(field: &F, v: &Value) -> Result<P<F>> {
    match v {
        Value::String(s) => parse_poly(field, s),
        _ => PolyRing::new(field).from_json(v),
    }
}

/// "Q" or "q" for the rationals, a prime p for F_p, or a JSON descriptor.
pub fn parse_field(s: &str) -> Result<FieldDescriptor> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("q") {
        return Ok(FieldDescriptor::Rationals);
    }
    if let Ok(p) = s.parse::<u64>() {
        return Ok(FieldDescriptor::Prime { p });
    }
    let v: Value = serde_json::from_str(s).map_err(|_| bad(format!("unknown field {s:?}; use Q, a prime, or a descriptor")))?;
    FieldDescriptor::from_json(&v)
}

/// A pencil over one of the base fields the pipelines accept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyPencil {
    Prime(Pencil<PrimeField>),
    Rational(Pencil<Rationals>),
}

fn pencil_from_parts<F: Field>(field: F, v: &Value) -> Result<Pencil<F>> {
    let q1 = linalg::from_json(&field, v.get("q1").ok_or_else(|| bad("pencil needs \"q1\""))?)?;
    let q2 = linalg::from_json(&field, v.get("q2").ok_or_else(|| bad("pencil needs \"q2\""))?)?;
    let d = q1.rows();
    if d < 4 || d % 2 == 1 {
        return Err(bad(format!("pencils live in even dimension at least 4, got {d}")));
    }
    if let Some(n) = v.get("n") {
        if n.as_u64() != Some((d / 2 - 1) as u64) {
            return Err(Error::DimensionMismatch { expected: d / 2 - 1, found: n.as_u64().unwrap_or(0) as usize });
        }
    }
    Pencil::new(field, d / 2 - 1, q1, q2)
}

/// Pencil JSON: {"field": descriptor, "q1": matrix, "q2": matrix}, with an
/// optional "n" that must match the dimension.
/// Also accepts a command result that wraps the pencil as {"pencil": ...}.
pub fn pencil_from_json(v: &Value) -> Result<AnyPencil> {
    let v = match v.get("pencil") {
        Some(inner) if v.get("field").is_none() => inner,
        _ => v,
    };
    let field = v.get("field").ok_or_else(|| bad("pencil needs a \"field\""))?;
    let desc = match field {
        Value::String(s) => parse_field(s)?,
        Value::Number(n) => FieldDescriptor::Prime { p: n.as_u64().ok_or_else(|| bad("field must be a prime"))? },
        other => FieldDescriptor::from_json(other)?,
    };
    match desc {
        FieldDescriptor::Rationals => Ok(AnyPencil::Rational(pencil_from_parts(Rationals, v)?)),
        FieldDescriptor::Prime { p } => Ok(AnyPencil::Prime(pencil_from_parts(PrimeField::new(p)?, v)?)),
        other => Err(Error::Unsupported(format!("pencils over {other:?} are not supported"))),
    }
}

pub fn pencil_to_json<F: Field>(p: &Pencil<F>) -> Value {
    let f = p.field();
    json!({
        "field": f.descriptor().to_json(),
        "n": p.n(),
        "q1": linalg::to_json(f, p.q1()),
        "q2": linalg::to_json(f, p.q2()),
    })
}

impl AnyPencil {
    pub fn to_json(&self) -> Value {
        match self {
            AnyPencil::Prime(p) => pencil_to_json(p),
            AnyPencil::Rational(p) => pencil_to_json(p),
        }
    }
}

/// Curve JSON: {"field": prime, "f": polynomial}.
pub fn curve_from_json(v: &Value) -> Result<HyperellipticCurve> {
    let desc = match v.get("field").ok_or_else(|| bad("curve needs a \"field\""))? {
        Value::String(s) => parse_field(s)?,
        Value::Number(n) => FieldDescriptor::Prime { p: n.as_u64().ok_or_else(|| bad("field must be a prime"))? },
        other => FieldDescriptor::from_json(other)?,
    };
    let FieldDescriptor::Prime { p } = desc else {
        return Err(Error::Unsupported("curves are handled over prime fields".into()));
    };
    let fp = PrimeField::new(p)?;
    let f = poly_from_value(&fp, v.get("f").ok_or_else(|| bad("curve needs \"f\""))?)?;
    HyperellipticCurve::new(fp, f)
}

/// A cocycle given by its value on Frobenius: {"m": level, "subset": root
/// indices}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleSpec {
    pub level: usize,
    pub subset: Vec<usize>,
}

pub fn cocycle_from_json(v: &Value) -> Result<CocycleSpec> {
    let level = v.get("m").and_then(Value::as_u64).ok_or_else(|| bad("cocycle needs a positive level \"m\""))?;
    if level == 0 {
        return Err(bad("cocycle level must be positive"));
    }
    let subset = v
        .get("subset")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("cocycle needs a \"subset\" of root indices"))?
        .iter()
        .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(|| bad("root indices are nonnegative integers")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CocycleSpec { level: level as usize, subset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arulwang;

    #[test]
    fn parses_human_syntax() {
        let q = Rationals;
        let r = PolyRing::new(&q);
        assert_eq!(parse_poly(&q, "t^6-1").unwrap(), r.from_i64s(&[-1, 0, 0, 0, 0, 0, 1]));
        assert_eq!(parse_poly(&q, " -t^2 + 3*t - 2 ").unwrap(), r.from_i64s(&[-2, 3, -1]));
        assert_eq!(
            parse_poly(&q, "(t^2-2)(t^2-3)(t^2-5)").unwrap(),
            r.from_i64s(&[-30, 0, 31, 0, -10, 0, 1])
        );
        assert_eq!(parse_poly(&q, "2x^3 + 1/2").unwrap(), r.from_coeffs(vec![
            BigRational::new(1.into(), 2.into()),
            BigRational::from_integer(0.into()),
            BigRational::from_integer(0.into()),
            BigRational::from_integer(2.into()),
        ]));
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(parse_poly(&f7, "t - 1/2").unwrap(), PolyRing::new(&f7).from_i64s(&[3, 1]));
        for badstr in ["t^", "(t-1", "t + y", "1/0", ""] {
            assert!(parse_poly(&q, badstr).is_err(), "{badstr}");
        }
        assert!(parse_poly(&f7, "1/7").is_err());
    }

    #[test]
    fn pencil_round_trip() {
        let q = Rationals;
        let p = arulwang::build(&q, &parse_poly(&q, "t^6-1").unwrap()).unwrap().pencil;
        let v = pencil_to_json(&p);
        let back = pencil_from_json(&v).unwrap();
        assert_eq!(back, AnyPencil::Rational(p));
        assert_eq!(back.to_json(), v);
        assert_eq!(pencil_from_json(&json!({ "pencil": v })).unwrap(), back);
        let f7 = PrimeField::new(7).unwrap();
        let p7 = arulwang::build(&f7, &parse_poly(&f7, "t^6+t+3").unwrap()).unwrap().pencil;
        assert_eq!(pencil_from_json(&pencil_to_json(&p7)).unwrap(), AnyPencil::Prime(p7));
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(pencil_from_json(&json!({"field": "Q", "q1": [[1]]})).is_err());
        assert!(pencil_from_json(&json!({"field": "Q", "q1": [[1, 0], [0, 1]], "q2": [[1, 0], [0, 2]]})).is_err());
        assert!(pencil_from_json(&json!({"field": 4, "q1": [], "q2": []})).is_err());
        assert!(cocycle_from_json(&json!({"m": 0, "subset": []})).is_err());
        assert_eq!(cocycle_from_json(&json!({"m": 2, "subset": [0, 3]})).unwrap(), CocycleSpec { level: 2, subset: vec![0, 3] });
        let c = curve_from_json(&json!({"field": 7, "f": "t^6-1"})).unwrap();
        assert_eq!(c.count_points(1).unwrap(), 8);
        assert!(curve_from_json(&json!({"field": "Q", "f": "t^6-1"})).is_err());
    }
}
