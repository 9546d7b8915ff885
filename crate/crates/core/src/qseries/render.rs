use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use super::PuiseuxSeries;
use crate::algebra::{format_rational, Field, Rational};
use crate::error::{Error, Result};

fn superscript(n: u64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn pretty_rational(x: &Rational) -> String {
    format_rational(x).replace('-', "\u{2212}")
}

fn monomial(e: &Rational) -> String {
    if e.is_integer() {
        let k = u64::try_from(e.to_integer()).unwrap();
        match k {
            0 => String::new(),
            1 => "q".into(),
            _ => format!("q{}", superscript(k)),
        }
    } else {
        format!("q^({})", pretty_rational(e))
    }
}

impl<F: Field> fmt::Display for PuiseuxSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(q^({}))", pretty_rational(&self.precision_end()));
        }
        let d = BigInt::from(self.denom());
        let mut body = String::new();
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.eq_zero() {
                continue;
            }
            let e = Rational::new(BigInt::from(i as i64), d.clone());
            let mon = monomial(&e);
            let mut text = c.render();
            let negative = text.starts_with('-');
            if negative {
                text.remove(0);
            }
            let term = if mon.is_empty() {
                text
            } else if text == "1" {
                mon
            } else {
                format!("{text}·{mon}")
            };
            if body.is_empty() {
                if negative {
                    body.push('\u{2212}');
                }
            } else {
                body.push_str(if negative { " \u{2212} " } else { " + " });
            }
            body.push_str(&term.replace('-', "\u{2212}"));
        }
        body.push_str(" + …");
        let lead = self.leading_exponent().unwrap();
        if lead == Rational::from_integer(0.into()) {
            write!(f, "{body}")
        } else {
            write!(f, "q^({})·({body})", pretty_rational(&lead))
        }
    }
}

impl<F: Field> PuiseuxSeries<F> {
    /// Exact JSON form `{"d", "lead", "coeffs", "prec"}`; coefficients are strings.
    pub fn to_json(&self) -> Value {
        json!({
            "d": self.denom(),
            "lead": self.lead(),
            "coeffs": self.coeffs().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "prec": self.prec(),
        })
    }

    pub fn from_json(ctx: &F::Ctx, v: &Value) -> Result<Self> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::parse(0, format!("missing field {k:?}")))
        };
        let d = field("d")?
            .as_u64()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::parse(0, "\"d\" must be a positive integer"))?;
        let lead = field("lead")?
            .as_i64()
            .ok_or_else(|| Error::parse(0, "\"lead\" must be an integer"))?;
        let prec = field("prec")?
            .as_i64()
            .ok_or_else(|| Error::parse(0, "\"prec\" must be an integer"))?;
        let coeffs = field("coeffs")?
            .as_array()
            .ok_or_else(|| Error::parse(0, "\"coeffs\" must be a list"))?
            .iter()
            .enumerate()
            .map(|(i, c)| F::from_json(ctx, c).map_err(|e| Error::parse(i, e.to_string())))
            .collect::<Result<Vec<F>>>()?;
        if (coeffs.len() as i64) > prec {
            return Err(Error::parse(0, "more coefficients than the stated precision"));
        }
        Ok(PuiseuxSeries::new(ctx.clone(), d, lead, coeffs, prec))
    }
}
