//! Name-keyed registries of strategy constructors.
//!
//! Every family of interchangeable algorithms in the crate (eigensolvers,
//! smallest-singular-value solvers, manufactured solutions, coefficient
//! profiles, initial data) exposes a `Registry` whose entries build a boxed
//! trait object from a parsed argument list. Specs are written in call
//! syntax, `name(arg, arg, ...)`, or just `name`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub struct Registry<F> {
    kind: &'static str,
    entries: BTreeMap<&'static str, F>,
}

impl<F> Registry<F> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: F) -> &mut Self {
        self.entries.insert(name, factory);
        self
    }

    pub fn with(mut self, name: &'static str, factory: F) -> Self {
        self.register(name, factory);
        self
    }

    pub fn get(&self, name: &str) -> Result<&F> {
        self.entries.get(name).ok_or_else(|| Error::UnknownName {
            kind: self.kind,
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

/// A parsed `name(arg, ...)` spec.
#[derive(Debug, Clone, PartialEq)]
pub struct CallSpec {
    pub name: String,
    pub args: Vec<String>,
}

impl CallSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let Some(open) = text.find('(') else {
            if text.is_empty() || !is_ident(text) {
                return Err(Error::InvalidInput(format!("malformed spec `{text}`")));
            }
            return Ok(Self {
                name: text.to_string(),
                args: Vec::new(),
            });
        };
        if !text.ends_with(')') {
            return Err(Error::InvalidInput(format!("unclosed `(` in `{text}`")));
        }
        let name = text[..open].trim();
        if !is_ident(name) {
            return Err(Error::InvalidInput(format!("malformed name in `{text}`")));
        }
        let inner = text[open + 1..text.len() - 1].trim();
        let args = if inner.is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(|a| a.trim().to_string()).collect()
        };
        if args.iter().any(|a| a.is_empty()) {
            return Err(Error::InvalidInput(format!("empty argument in `{text}`")));
        }
        Ok(Self {
            name: name.to_string(),
            args,
        })
    }

    pub fn arity(&self, expected: usize) -> Result<()> {
        if self.args.len() != expected {
            return Err(Error::InvalidInput(format!(
                "`{}` takes {expected} argument(s), got {}",
                self.name,
                self.args.len()
            )));
        }
        Ok(())
    }

    pub fn number(&self, i: usize) -> Result<f64> {
        parse_number(&self.args[i])
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Parses a real literal. Besides plain floats, accepts `pi`, `<k>*pi`,
/// `<k>pi` and `pi/<k>` so domain breakpoints can be written exactly.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a number: `{s}`"));
    if let Some(rest) = s.strip_prefix("pi/") {
        let d: f64 = rest.trim().parse().map_err(|_| bad())?;
        return Ok(std::f64::consts::PI / d);
    }
    if s == "pi" {
        return Ok(std::f64::consts::PI);
    }
    if let Some(k) = s.strip_suffix("pi") {
        let k = k.trim().trim_end_matches('*').trim();
        let k: f64 = k.parse().map_err(|_| bad())?;
        return Ok(k * std::f64::consts::PI);
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// Parses a complex literal: `a`, `bi`, `i`, `a+bi` or `a-bi` where each
/// part is accepted by [`parse_number`].
pub fn parse_complex(s: &str) -> Result<num_complex::Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("not a complex number: `{s}`"));
    if let Ok(re) = parse_number(&t) {
        return Ok(num_complex::Complex64::new(re, 0.0));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(num_complex::Complex64::new(parse_number(&t)?, 0.0));
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_number(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = im.trim_end_matches('*');
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => parse_number(im).map_err(|_| bad())?,
    };
    Ok(num_complex::Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_call_specs() {
        let c = CallSpec::parse("bump(1.5, 0.5, 2)").unwrap();
        assert_eq!(c.name, "bump");
        assert_eq!(c.args, vec!["1.5", "0.5", "2"]);
        let c = CallSpec::parse("zero").unwrap();
        assert!(c.args.is_empty());
        assert!(CallSpec::parse("bump(1,").is_err());
        assert!(CallSpec::parse("bump(1,,2)").is_err());
        assert!(CallSpec::parse("").is_err());
    }

    #[test]
    fn parses_pi_literals() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_number("pi").unwrap(), pi);
        assert_eq!(parse_number("2*pi").unwrap(), 2.0 * pi);
        assert_eq!(parse_number("2pi").unwrap(), 2.0 * pi);
        assert_eq!(parse_number("pi/2").unwrap(), pi / 2.0);
        assert_eq!(parse_number("-0.25").unwrap(), -0.25);
        assert!(parse_number("nan").is_err());
        assert!(parse_number("x").is_err());
    }

    #[test]
    fn unknown_name_lists_alternatives() {
        let r: Registry<u8> = Registry::new("widget").with("a", 1).with("b", 2);
        let err = r.get("c").err().unwrap().to_string();
        assert!(err.contains("widget") && err.contains("a, b"), "{err}");
        assert_eq!(*r.get("b").unwrap(), 2);
    }

    #[test]
    fn parses_complex_literals() {
        use num_complex::Complex64 as C;
        assert_eq!(parse_complex("5i").unwrap(), C::new(0.0, 5.0));
        assert_eq!(parse_complex("-0.5+2i").unwrap(), C::new(-0.5, 2.0));
        assert_eq!(parse_complex("1e-3-1.5e+1i").unwrap(), C::new(1e-3, -15.0));
        assert_eq!(parse_complex("-i").unwrap(), C::new(0.0, -1.0));
        assert_eq!(parse_complex("3").unwrap(), C::new(3.0, 0.0));
        assert_eq!(parse_complex("2pi").unwrap(), C::new(2.0 * std::f64::consts::PI, 0.0));
        assert!(parse_complex("1+zi").is_err());
    }
}
