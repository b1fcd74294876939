//! Check records, versioned JSON reports and CSV writers.

use crate::error::{LabError, Result};
use crate::minmax::ellipse_perimeter;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

pub const SCHEMA_VERSION: &str = "minmax-lab/report/1";

/// Origin of a reference value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Stated,
    Trivial,
    Oracle,
}

/// How a computed value is compared with its reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// |computed − reference| ≤ tol
    Abs,
    /// |computed − reference| ≤ tol·|reference|
    Rel,
    /// computed ≤ reference + tol
    AtMost,
    /// computed ≥ reference − tol
    AtLeast,
    /// computed > reference
    Above,
}

#[derive(Clone, Debug, Serialize)]
pub struct Reference {
    /// Symbolic expression, e.g. "8*pi^2" or "perimeter(1,1.5)".
    pub expr: String,
    pub value: f64,
}

impl Reference {
    pub fn new(expr: &str) -> Result<Self> {
        Ok(Reference {
            expr: expr.to_string(),
            value: eval_constant(expr)?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub suite: String,
    pub name: String,
    pub computed: Option<f64>,
    pub reference: Reference,
    pub source: Source,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn check(
        suite: &str,
        name: &str,
        computed: f64,
        reference: &str,
        source: Source,
        comparison: Comparison,
        tolerance: f64,
    ) -> Result<Self> {
        let reference = Reference::new(reference)?;
        let r = reference.value;
        let c = computed;
        let passed = match comparison {
            Comparison::Abs => (c - r).abs() <= tolerance,
            Comparison::Rel => (c - r).abs() <= tolerance * r.abs(),
            Comparison::AtMost => c <= r + tolerance,
            Comparison::AtLeast => c >= r - tolerance,
            Comparison::Above => c > r,
        };
        Ok(Record {
            suite: suite.to_string(),
            name: name.to_string(),
            computed: Some(c),
            reference,
            source,
            comparison,
            tolerance,
            passed,
            error: None,
        })
    }

    /// A check whose computation failed.
    pub fn failed(suite: &str, name: &str, reference: &str, source: Source, err: &LabError) -> Self {
        let reference = Reference::new(reference).unwrap_or(Reference {
            expr: reference.to_string(),
            value: f64::NAN,
        });
        Record {
            suite: suite.to_string(),
            name: name.to_string(),
            computed: None,
            reference,
            source,
            comparison: Comparison::Abs,
            tolerance: 0.0,
            passed: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub crate_version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            crate_version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<C: Serialize> {
    pub schema: &'static str,
    pub config: C,
    pub environment: Environment,
    pub records: Vec<Record>,
    pub passed: bool,
}

impl<C: Serialize> Report<C> {
    pub fn new(config: C, records: Vec<Record>) -> Self {
        let passed = records.iter().all(|r| r.passed);
        Report {
            schema: SCHEMA_VERSION,
            config,
            environment: Environment::default(),
            records,
            passed,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[derive(Serialize)]
struct RecordRow<'a> {
    suite: &'a str,
    name: &'a str,
    computed: Option<f64>,
    reference: &'a str,
    reference_value: f64,
    source: Source,
    comparison: Comparison,
    tolerance: f64,
    passed: bool,
    error: &'a str,
}

/// One CSV row per record.
pub fn records_csv<W: Write>(records: &[Record], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(RecordRow {
            suite: &r.suite,
            name: &r.name,
            computed: r.computed,
            reference: &r.reference.expr,
            reference_value: r.reference.value,
            source: r.source,
            comparison: r.comparison,
            tolerance: r.tolerance,
            passed: r.passed,
            error: r.error.as_deref().unwrap_or(""),
        })?;
    }
    out.flush()?;
    Ok(())
}

/// CSV with an explicit header; every row must have header.len() fields.
pub fn table_csv<W: Write>(header: &[&str], rows: &[Vec<f64>], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(LabError::BadParameter(format!(
                "row has {} fields, header {}",
                r.len(),
                header.len()
            )));
        }
        out.write_record(r.iter().map(|x| format!("{x:e}")))?;
    }
    out.flush()?;
    Ok(())
}

/// Evaluates reference expressions: numbers, pi, + − * / ^, parentheses, sin, cos,
/// sqrt, ln and perimeter(p, q).
pub fn eval_constant(expr: &str) -> Result<f64> {
    let tokens = tokenize(expr)?;
    let mut p = Parser { t: &tokens, i: 0 };
    let v = p.sum()?;
    if p.i != tokens.len() {
        return Err(LabError::BadParameter(format!("trailing input in {expr:?}")));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let c: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < c.len() {
        let ch = c[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < c.len() && (c[i].is_ascii_digit() || c[i] == '.' || c[i] == 'e'
                || ((c[i] == '-' || c[i] == '+') && c[i - 1] == 'e'))
            {
                i += 1;
            }
            let lit: String = c[start..i].iter().collect();
            let v = lit
                .parse()
                .map_err(|_| LabError::BadParameter(format!("bad number {lit:?}")))?;
            out.push(Tok::Num(v));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < c.len() && c[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(c[start..i].iter().collect()));
        } else if "+-*/^(),".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(LabError::BadParameter(format!("unexpected {ch:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    t: &'a [Tok],
    i: usize,
}

impl Parser<'_> {
    fn peek_op(&self, op: char) -> bool {
        self.t.get(self.i) == Some(&Tok::Op(op))
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.peek_op(op) {
            self.i += 1;
            Ok(())
        } else {
            Err(LabError::BadParameter(format!("expected {op:?}")))
        }
    }

    fn sum(&mut self) -> Result<f64> {
        let mut v = self.product()?;
        loop {
            if self.peek_op('+') {
                self.i += 1;
                v += self.product()?;
            } else if self.peek_op('-') {
                self.i += 1;
                v -= self.product()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn product(&mut self) -> Result<f64> {
        let mut v = self.power()?;
        loop {
            if self.peek_op('*') {
                self.i += 1;
                v *= self.power()?;
            } else if self.peek_op('/') {
                self.i += 1;
                v /= self.power()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn power(&mut self) -> Result<f64> {
        let base = self.atom()?;
        if self.peek_op('^') {
            self.i += 1;
            let e = self.power()?;
            return Ok(base.powf(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        let tok = self
            .t
            .get(self.i)
            .cloned()
            .ok_or_else(|| LabError::BadParameter("unexpected end of expression".into()))?;
        self.i += 1;
        match tok {
            Tok::Num(v) => Ok(v),
            Tok::Op('-') => Ok(-self.power()?),
            Tok::Op('(') => {
                let v = self.sum()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Ident(name) if name == "pi" => Ok(PI),
            Tok::Ident(name) if name == "perimeter" => {
                self.expect('(')?;
                let p = self.sum()?;
                self.expect(',')?;
                let q = self.sum()?;
                self.expect(')')?;
                Ok(ellipse_perimeter(p, q))
            }
            Tok::Ident(name) if ["sin", "cos", "sqrt", "ln"].contains(&name.as_str()) => {
                self.expect('(')?;
                let x = self.sum()?;
                self.expect(')')?;
                Ok(match name.as_str() {
                    "sin" => x.sin(),
                    "cos" => x.cos(),
                    "ln" => x.ln(),
                    _ => x.sqrt(),
                })
            }
            t => Err(LabError::BadParameter(format!("unexpected token {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(eval_constant("8*pi^2").unwrap(), 8.0 * PI * PI);
        assert_eq!(eval_constant("16*pi").unwrap(), 16.0 * PI);
        assert_eq!(eval_constant("1/2").unwrap(), 0.5);
        assert_eq!(eval_constant("-2^2").unwrap(), -4.0);
        assert_eq!(eval_constant("2*(1-0.25)").unwrap(), 1.5);
        assert_eq!(eval_constant("1e-3").unwrap(), 1e-3);
        assert!((eval_constant("perimeter(1,1)").unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((eval_constant("(8/pi)^2*sin(pi/8)^2").unwrap() - 64.0 / (PI * PI) * (PI / 8.0).sin().powi(2)).abs() < 1e-15);
        assert!((eval_constant("ln(3)").unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(eval_constant("8*").is_err());
        assert!(eval_constant("tau").is_err());
        assert!(eval_constant("(1").is_err());
    }

    #[test]
    fn record_comparisons() {
        let r = Record::check("s", "x", 8.0 * PI * PI + 1e-7, "8*pi^2", Source::Stated, Comparison::Abs, 1e-6).unwrap();
        assert!(r.passed);
        let r = Record::check("s", "x", 1.0, "0", Source::Trivial, Comparison::Above, 0.0).unwrap();
        assert!(r.passed);
        let r = Record::check("s", "x", 0.0, "0", Source::Trivial, Comparison::Above, 0.0).unwrap();
        assert!(!r.passed);
        let r = Record::check("s", "x", 1.01, "1", Source::Trivial, Comparison::Rel, 0.005).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn csv_outputs() {
        let mut buf = Vec::new();
        table_csv(&["t", "energy"], &[vec![0.0, 1.5]], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,energy\n0e0,1.5e0\n");
        let r = Record::check("maps", "hopf", 1.0, "1", Source::Stated, Comparison::Abs, 0.0).unwrap();
        let mut buf = Vec::new();
        records_csv(&[r], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("suite,name,computed,reference,reference_value,source"));
        assert!(s.contains("maps,hopf,1.0,1,1.0,stated,abs,0.0,true,"));
    }

    proptest::proptest! {
        #[test]
        fn evaluator_matches_arithmetic(a in -50i32..50, b in 1i32..20, k in 0u32..4) {
            let expr = format!("{a}*pi^{k} + {a}/{b} - ({b})");
            let want = a as f64 * PI.powi(k as i32) + a as f64 / b as f64 - b as f64;
            let got = eval_constant(&expr).unwrap();
            proptest::prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{expr}: {got} vs {want}");
        }
    }
}
