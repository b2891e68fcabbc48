//! `(n, f)`-metric inequalities: `f(d(a_i, a_j)) ≥ 0` for every injective
//! `n`-tuple, with `f` either a registered descriptor or a user expression.

use rayon::prelude::*;

use super::cycl0::{self, Cycl0Options};
use super::defects::{
    four_point_best, offer, par_scan, ptolemy_defect, ultrametric_defect, Best, DefectReport,
};
use crate::error::{Error, Result};
use crate::metric::FinMetric;
use crate::scalar::{ipow, smax, smin, Scalar};
use crate::tuples::for_each_injective_from;

/// An arithmetic expression over the distance variables `x_{i,j}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Num(T),
    /// Zero-based indices with `i < j`.
    Var(usize, usize),
    Neg(Box<Expr<T>>),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Min(Vec<Expr<T>>),
    Max(Vec<Expr<T>>),
}

impl<T: Scalar> Expr<T> {
    /// Parses `+ - *`, `min(..)`, `max(..)`, parentheses, numbers (decimal or
    /// `p/q`) and variables written `x12`, `x_{1,2}` or `x(1,2)` (1-based).
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &impl Fn(usize, usize) -> T) -> T {
        match self {
            Expr::Num(v) => v.clone(),
            Expr::Var(i, j) => x(*i, *j),
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Min(v) => v.iter().map(|e| e.eval(x)).reduce(smin).expect("nonempty"),
            Expr::Max(v) => v.iter().map(|e| e.eval(x)).reduce(smax).expect("nonempty"),
        }
    }

    /// One more than the largest point index used.
    pub fn points_used(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(_, j) => j + 1,
            Expr::Neg(a) => a.points_used(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.points_used().max(b.points_used()),
            Expr::Min(v) | Expr::Max(v) => v.iter().map(Expr::points_used).max().unwrap_or(0),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Expression(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let mut acc = self.unary()?;
        while self.eat(b'*') {
            acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary<T: Scalar>(&mut self) -> Result<Expr<T>> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom<T: Scalar>(&mut self) -> Result<Expr<T>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match word {
                    "min" | "max" => {
                        self.expect(b'(')?;
                        let mut args = vec![self.expr()?];
                        while self.eat(b',') {
                            args.push(self.expr()?);
                        }
                        self.expect(b')')?;
                        Ok(if word == "min" { Expr::Min(args) } else { Expr::Max(args) })
                    }
                    "x" | "d" => self.variable(),
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown name {word:?}")))
                    }
                }
            }
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }

    fn number<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'/' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        T::parse_text(text)
            .map(Expr::Num)
            .ok_or_else(|| Error::Expression(format!("bad number {text:?}")))
    }

    fn index(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| self.error("expected an index"))
    }

    fn variable<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let (i, j) = if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            // x12: two single digits
            let digits = &self.src[self.pos..];
            if digits.len() < 2 || !digits[1].is_ascii_digit() || digits.get(2).is_some_and(u8::is_ascii_digit) {
                return Err(self.error("write two-digit indices as x_{i,j}"));
            }
            self.pos += 2;
            ((digits[0] - b'0') as usize, (digits[1] - b'0') as usize)
        } else {
            let close = if self.eat(b'_') {
                self.expect(b'{')?;
                b'}'
            } else {
                self.expect(b'(')?;
                b')'
            };
            let i = self.index()?;
            self.expect(b',')?;
            let j = self.index()?;
            self.expect(close)?;
            (i, j)
        };
        if i == 0 || j == 0 || i == j {
            return Err(self.error("indices must be distinct and start at 1"));
        }
        Ok(Expr::Var(i.min(j) - 1, i.max(j) - 1))
    }
}

/// A user inequality `f ≥ 0` on `n` points, with declared sub-homogeneity
/// degree `c`: `f(r·x) ≤ r^c·f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality<T> {
    pub text: String,
    pub expr: Expr<T>,
    pub n: usize,
    pub degree: u32,
}

impl<T: Scalar> Inequality<T> {
    /// `n` defaults to the largest index used.
    pub fn parse(text: &str, n: Option<usize>, degree: u32) -> Result<Self> {
        let expr = Expr::parse(text)?;
        let used = expr.points_used();
        let n = n.unwrap_or(used);
        if n < used {
            return Err(Error::Expression(format!("expression uses {used} points but n = {n}")));
        }
        if n < 2 {
            return Err(Error::Expression("an inequality needs at least 2 points".into()));
        }
        Ok(Inequality { text: text.to_string(), expr, n, degree })
    }

    pub fn value(&self, d: &FinMetric<T>, a: &[usize]) -> T {
        self.expr.eval(&|i, j| d.d(a[i], a[j]))
    }
}

/// Which inequality to check.
#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor<T> {
    Ultrametric,
    Ptolemy,
    /// Four-point condition with constant `delta`.
    Hyperbolicity { delta: T },
    /// Planar realizability of `m`-cycles.
    Cycl0 { m: usize, options: Cycl0Options },
    Custom(Inequality<T>),
}

impl<T: Scalar> Descriptor<T> {
    pub fn name(&self) -> String {
        match self {
            Descriptor::Ultrametric => "ultrametric".into(),
            Descriptor::Ptolemy => "ptolemy".into(),
            Descriptor::Hyperbolicity { delta } => format!("hyperbolicity(delta={})", delta.to_text()),
            Descriptor::Cycl0 { m, .. } => format!("cycl0(m={m})"),
            Descriptor::Custom(ineq) => ineq.text.clone(),
        }
    }

    /// Number of points `n` the inequality is stated on.
    pub fn arity(&self) -> usize {
        match self {
            Descriptor::Ultrametric => 3,
            Descriptor::Ptolemy | Descriptor::Hyperbolicity { .. } => 4,
            Descriptor::Cycl0 { m, .. } => *m,
            Descriptor::Custom(ineq) => ineq.n,
        }
    }

    /// Declared sub-homogeneity degree.
    pub fn degree(&self) -> u32 {
        match self {
            Descriptor::Ptolemy => 2,
            Descriptor::Custom(ineq) => ineq.degree,
            _ => 1,
        }
    }

    /// `f` on the tuple `a` of `d`; the cycle function is evaluated in
    /// floating point.
    pub fn value(&self, d: &FinMetric<T>, a: &[usize]) -> T {
        let x = |i: usize, j: usize| d.d(a[i], a[j]);
        match self {
            Descriptor::Ultrametric => smax(x(0, 1), x(1, 2)) - x(0, 2),
            Descriptor::Ptolemy => x(0, 1) * x(2, 3) + x(0, 3) * x(1, 2) - x(0, 2) * x(1, 3),
            Descriptor::Hyperbolicity { delta } => {
                smax(x(0, 1) + x(2, 3), x(0, 3) + x(1, 2)) + delta.clone() + delta.clone() - x(0, 2) - x(1, 3)
            }
            Descriptor::Cycl0 { options, .. } => {
                let slack = cycl0::cycl0_check_idx(d, a, options).expect("valid cycle").min_slack();
                T::from_f64(slack).unwrap_or_else(T::zero)
            }
            Descriptor::Custom(ineq) => ineq.value(d, a),
        }
    }

    /// A descriptor with no parameters, by name.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "ultrametric" => Ok(Descriptor::Ultrametric),
            "ptolemy" => Ok(Descriptor::Ptolemy),
            _ => Err(Error::UnknownDescriptor(name.into())),
        }
    }
}

/// Dihedral-orbit representative of a cycle: smallest point first, and the
/// second point smaller than the last.
pub fn cycle_canonical(a: &[usize]) -> bool {
    let first = a[0];
    a.iter().all(|&p| p >= first) && a[1] < a[a.len() - 1]
}

/// Largest `−f` over injective `n`-tuples.
pub fn check_inequality<T: Scalar>(desc: &Descriptor<T>, d: &FinMetric<T>) -> Result<DefectReport<T>> {
    let n = d.len();
    match desc {
        Descriptor::Ultrametric => Ok(ultrametric_defect(d)),
        Descriptor::Ptolemy => Ok(ptolemy_defect(d)),
        Descriptor::Hyperbolicity { delta } => {
            let best = four_point_best(d).map(|b| Best { value: b.value - delta.clone() - delta.clone(), ..b });
            Ok(labelled(desc, d, best, true))
        }
        Descriptor::Cycl0 { m, options } => {
            if *m < 3 {
                return Err(Error::ArityTooSmall(*m));
            }
            if *m > n {
                return Err(Error::ArityExceedsSpace { points: n });
            }
            let mut tuples = Vec::new();
            for first in 0..n {
                for_each_injective_from(n, *m, first, |a| {
                    if cycle_canonical(a) {
                        tuples.push(a.to_vec());
                    }
                    true
                });
            }
            let values: Vec<f64> = tuples
                .par_iter()
                .map(|a| -cycl0::cycl0_check_idx(d, a, options).expect("valid cycle").min_slack())
                .collect();
            let mut best = None;
            for (a, v) in tuples.iter().zip(values) {
                offer(&mut best, T::from_f64(v).unwrap_or_else(T::zero), a);
            }
            Ok(labelled(desc, d, best, true))
        }
        Descriptor::Custom(ineq) => {
            if ineq.n > n {
                return Err(Error::ArityExceedsSpace { points: n });
            }
            let best = par_scan(n, |first| {
                let mut best = None;
                for_each_injective_from(n, ineq.n, first, |a| {
                    offer(&mut best, -ineq.value(d, a), a);
                    true
                });
                best
            });
            Ok(labelled(desc, d, best, true))
        }
    }
}

fn labelled<T: Scalar>(
    desc: &Descriptor<T>,
    d: &FinMetric<T>,
    best: Option<Best<T>>,
    exhaustive: bool,
) -> DefectReport<T> {
    match best {
        Some(b) => DefectReport {
            property: desc.name(),
            defect: b.value,
            witness: Some(b.tuple.iter().map(|&i| d.label(i).to_string()).collect()),
            exhaustive,
        },
        None => DefectReport { property: desc.name(), defect: T::zero(), witness: None, exhaustive },
    }
}

/// A sampled failure of `f(r·x) ≤ r^c·f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeCase {
    pub sample: usize,
    pub scale: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub descriptor: String,
    pub degree: u32,
    pub checked: usize,
    pub counterexamples: Vec<ProbeCase>,
}

/// Checks sub-homogeneity of `f` on the first `n` points of each sample
/// (samples with fewer points are skipped) for each positive scale.
///
/// Exact types compare exactly; the cycle function allows a relative
/// slack of `tol·(1 + r)`.
pub fn subhomogeneity_probe<T: Scalar>(desc: &Descriptor<T>, samples: &[FinMetric<T>], scales: &[T]) -> ProbeReport {
    let n = desc.arity();
    let c = desc.degree();
    let slack = match desc {
        Descriptor::Cycl0 { options, .. } => Some(options.tol),
        _ => None,
    };
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    let tuple: Vec<usize> = (0..n).collect();
    for (k, x) in samples.iter().enumerate() {
        if x.len() < n {
            continue;
        }
        let fx = desc.value(x, &tuple);
        for r in scales.iter().filter(|r| r.is_positive()) {
            let scaled = x.scale(r).expect("positive scale");
            let lhs = desc.value(&scaled, &tuple);
            let rhs = ipow(r, c) * fx.clone();
            checked += 1;
            let fails = match slack {
                None => lhs > rhs,
                Some(tol) => {
                    let scale = x.diameter().lossy_f64().max(1.0);
                    lhs.lossy_f64() > rhs.lossy_f64() + tol * scale * (1.0 + r.lossy_f64())
                }
            };
            if fails {
                counterexamples.push(ProbeCase {
                    sample: k,
                    scale: r.to_text(),
                    lhs: lhs.to_text(),
                    rhs: rhs.to_text(),
                });
            }
        }
    }
    ProbeReport { descriptor: desc.name(), degree: c, checked, counterexamples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("p{i}")).collect()
    }

    fn c4() -> FinMetric<Q> {
        FinMetric::from_fn(names(4), |i, j| if (j - i) % 2 == 1 { rat(1, 1) } else { rat(2, 1) }).unwrap()
    }

    #[test]
    fn parses_all_variable_forms() {
        let a: Expr<Q> = Expr::parse("max(x12, x23) - x13").unwrap();
        let b: Expr<Q> = Expr::parse("max(x_{1,2}, x(2,3)) - d(3,1)").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points_used(), 3);
        let c: Expr<Q> = Expr::parse("3/2 * x_{10,2} + -0.5").unwrap();
        assert_eq!(c.points_used(), 10);
        let v = c.eval(&|_, _| rat(2, 1));
        assert_eq!(v, rat(5, 2));
    }

    #[test]
    fn rejects_malformed_expressions() {
        for bad in ["x11", "x1", "x123", "foo(x12)", "x12 +", "min()", "(x12", "x_{0,1}", "1/0"] {
            assert!(Expr::<Q>::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn custom_matches_registered() {
        let line = FinMetric::line(&[rat(0, 1), rat(1, 1), rat(2, 1), rat(4, 1)]).unwrap();
        let custom = Descriptor::Custom(Inequality::parse("max(x12, x23) - x13", None, 1).unwrap());
        let a = check_inequality(&custom, &line).unwrap();
        let b = check_inequality(&Descriptor::Ultrametric, &line).unwrap();
        assert_eq!(a.defect, b.defect);
        let ptolemy = Descriptor::Custom(Inequality::parse("x12*x34 + x14*x23 - x13*x24", None, 2).unwrap());
        assert_eq!(check_inequality(&ptolemy, &c4()).unwrap().defect, rat(2, 1));
    }

    #[test]
    fn hyperbolicity_at_delta() {
        let at_one = Descriptor::Hyperbolicity { delta: rat(1, 1) };
        assert_eq!(check_inequality(&at_one, &c4()).unwrap().defect, rat(0, 1));
        let at_half = Descriptor::Hyperbolicity { delta: rat(1, 2) };
        assert_eq!(check_inequality(&at_half, &c4()).unwrap().defect, rat(1, 1));
    }

    #[test]
    fn vacuous_and_oversized() {
        let three = FinMetric::line(&[rat(0, 1), rat(1, 1), rat(2, 1)]).unwrap();
        let r = check_inequality(&Descriptor::Ptolemy, &three).unwrap();
        assert_eq!(r.defect, rat(0, 1));
        assert!(r.witness.is_none());
        let custom = Descriptor::Custom(Inequality::parse("x14", None, 1).unwrap());
        assert_eq!(check_inequality(&custom, &three), Err(Error::ArityExceedsSpace { points: 3 }));
        assert!(matches!(Descriptor::<Q>::named("nope"), Err(Error::UnknownDescriptor(_))));
    }

    #[test]
    fn probe_registered_descriptors() {
        let samples = vec![c4(), FinMetric::line(&[rat(0, 1), rat(1, 1), rat(3, 1), rat(4, 1)]).unwrap()];
        let scales = [rat(1, 3), rat(2, 1), rat(7, 5)];
        for desc in [Descriptor::Ultrametric, Descriptor::Ptolemy, Descriptor::Hyperbolicity { delta: rat(0, 1) }] {
            let r = subhomogeneity_probe(&desc, &samples, &scales);
            assert_eq!(r.checked, 6);
            assert!(r.counterexamples.is_empty(), "{:?}", r);
        }
        // a positive constant is not sub-homogeneous below scale 1
        let r = subhomogeneity_probe(&Descriptor::Hyperbolicity { delta: rat(1, 1) }, &samples, &scales);
        assert_eq!(r.counterexamples.len(), 2);
    }

    #[test]
    fn cycle_representatives() {
        assert!(cycle_canonical(&[0, 1, 2, 3]));
        assert!(!cycle_canonical(&[0, 3, 2, 1]));
        assert!(!cycle_canonical(&[1, 0, 2, 3]));
    }
}
