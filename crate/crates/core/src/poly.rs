use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::strip_comment;

/// One monomial `coeff · x_1^{e_1} ⋯ x_s^{e_s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub coeff: BigInt,
    pub exps: Vec<u32>,
}

impl Term {
    pub fn new(coeff: impl Into<BigInt>, exps: Vec<u32>) -> Self {
        Term {
            coeff: coeff.into(),
            exps,
        }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    fn eval(&self, x: &[BigInt]) -> BigInt {
        let mut v = self.coeff.clone();
        for (xi, &e) in x.iter().zip(&self.exps) {
            if e > 0 {
                v *= xi.pow(e);
            }
        }
        v
    }
}

/// A nonzero sparse integer polynomial in a fixed number of variables.
///
/// Terms are merged on construction, so exponent tuples are distinct and
/// every coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial", into = "RawPolynomial")]
pub struct Polynomial {
    num_vars: usize,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct RawPolynomial {
    num_vars: usize,
    terms: Vec<Term>,
}

impl TryFrom<RawPolynomial> for Polynomial {
    type Error = Error;
    fn try_from(raw: RawPolynomial) -> Result<Self> {
        Polynomial::new(raw.num_vars, raw.terms)
    }
}

impl From<Polynomial> for RawPolynomial {
    fn from(p: Polynomial) -> Self {
        RawPolynomial {
            num_vars: p.num_vars,
            terms: p.terms,
        }
    }
}

impl Polynomial {
    pub fn new(num_vars: usize, terms: Vec<Term>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidSystem("polynomial needs at least one variable".into()));
        }
        let mut merged: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for t in terms {
            if t.exps.len() != num_vars {
                return Err(Error::InvalidSystem(format!(
                    "term has {} exponents, expected {num_vars}",
                    t.exps.len()
                )));
            }
            *merged.entry(t.exps).or_insert_with(BigInt::zero) += t.coeff;
        }
        // Highest exponent tuple first, so x_1 terms print before constants.
        let terms: Vec<Term> = merged
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(exps, coeff)| Term { coeff, exps })
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidSystem("polynomial is identically zero".into()));
        }
        Ok(Polynomial { num_vars, terms })
    }

    /// `Σ_j coeffs[j]·x_j − b`.
    pub fn linear(coeffs: &[i64], b: i64) -> Result<Self> {
        let s = coeffs.len();
        let mut terms: Vec<Term> = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let mut exps = vec![0; s];
                exps[j] = 1;
                Term::new(c, exps)
            })
            .collect();
        terms.push(Term::new(-b, vec![0; s]));
        Polynomial::new(s, terms)
    }

    /// `Σ_j coeffs[j]·x_j^t`.
    pub fn diagonal(coeffs: &[i64], t: u32) -> Result<Self> {
        let s = coeffs.len();
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let mut exps = vec![0; s];
                exps[j] = t;
                Term::new(c, exps)
            })
            .collect();
        Polynomial::new(s, terms)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval(&self, x: &[BigInt]) -> Result<BigInt> {
        if x.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                found: x.len(),
            });
        }
        Ok(self.terms.iter().map(|t| t.eval(x)).sum())
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Term::degree).max().unwrap_or(0)
    }

    /// `‖P‖₁`, the sum of absolute values of the coefficients.
    pub fn norm1(&self) -> BigInt {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn is_linear(&self) -> bool {
        self.terms.iter().all(|t| t.degree() <= 1)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.terms[0].degree();
        self.terms.iter().all(|t| t.degree() == d)
    }

    /// Constant term (zero when absent).
    pub fn constant(&self) -> BigInt {
        self.terms
            .iter()
            .find(|t| t.degree() == 0)
            .map(|t| t.coeff.clone())
            .unwrap_or_default()
    }

    /// Per-variable coefficients when every term is `c·x_j^t` for one
    /// shared `t ≥ 1`; returns `(t, coeffs)`.
    pub fn diagonal_shape(&self) -> Option<(u32, Vec<BigInt>)> {
        let mut t = None;
        let mut coeffs = vec![BigInt::zero(); self.num_vars];
        for term in &self.terms {
            let mut nz = term.exps.iter().enumerate().filter(|(_, &e)| e > 0);
            let (j, &e) = nz.next()?;
            if nz.next().is_some() {
                return None;
            }
            match t {
                None => t = Some(e),
                Some(t0) if t0 != e => return None,
                _ => {}
            }
            coeffs[j] = term.coeff.clone();
        }
        t.map(|t| (t, coeffs))
    }

    /// Linear coefficients `c_j` (the `x_j` coefficients) for a linear polynomial.
    pub fn linear_coeffs(&self) -> Option<Vec<BigInt>> {
        if !self.is_linear() {
            return None;
        }
        let mut c = vec![BigInt::zero(); self.num_vars];
        for term in &self.terms {
            if let Some(j) = term.exps.iter().position(|&e| e == 1) {
                c[j] = term.coeff.clone();
            }
        }
        Some(c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let has_vars = t.degree() > 0;
            if !has_vars || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            let mut first = true;
            for (j, &e) in t.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first || (!mag.is_one()) {
                    f.write_str("*")?;
                }
                first = false;
                write!(f, "x{}", j + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Free-function form of [`Polynomial::eval`].
pub fn eval_poly(p: &Polynomial, x: &[BigInt]) -> Result<BigInt> {
    p.eval(x)
}

/// A system `P_1 = … = P_r = 0` in `s` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct PolySystem {
    num_vars: usize,
    polys: Vec<Polynomial>,
    flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Flags {
    linear: bool,
    homogeneous: bool,
    diagonal: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    num_vars: usize,
    polys: Vec<Polynomial>,
}

impl TryFrom<RawSystem> for PolySystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        PolySystem::new(raw.num_vars, raw.polys)
    }
}

impl From<PolySystem> for RawSystem {
    fn from(p: PolySystem) -> Self {
        RawSystem {
            num_vars: p.num_vars,
            polys: p.polys,
        }
    }
}

impl PolySystem {
    pub fn new(num_vars: usize, polys: Vec<Polynomial>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidSystem("s must be at least 1".into()));
        }
        if polys.is_empty() {
            return Err(Error::InvalidSystem("r must be at least 1".into()));
        }
        if let Some(p) = polys.iter().find(|p| p.num_vars != num_vars) {
            return Err(Error::InvalidSystem(format!(
                "polynomial in {} variables inside a system in {num_vars}",
                p.num_vars
            )));
        }
        let linear = polys.iter().all(Polynomial::is_linear);
        let homogeneous = polys.iter().all(Polynomial::is_homogeneous);
        let diagonal = {
            let shapes: Option<Vec<u32>> = polys.iter().map(|p| p.diagonal_shape().map(|(t, _)| t)).collect();
            shapes.and_then(|ts| {
                let t = ts[0];
                ts.iter().all(|&x| x == t).then_some(t)
            })
        };
        Ok(PolySystem {
            num_vars,
            polys,
            flags: Flags {
                linear,
                homogeneous,
                diagonal,
            },
        })
    }

    pub fn single(p: Polynomial) -> Self {
        let s = p.num_vars;
        PolySystem::new(s, vec![p]).expect("single polynomial is a valid system")
    }

    /// Rows `Σ_j c_ij x_j − b_i`.
    pub fn linear(rows: &[(&[i64], i64)]) -> Result<Self> {
        let s = rows.first().map(|(c, _)| c.len()).unwrap_or(0);
        let polys = rows
            .iter()
            .map(|(c, b)| Polynomial::linear(c, *b))
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(s, polys)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_polys(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Height `Λ = max_i ‖P_i‖₁`; for linear rows this is `|b_i| + Σ_j |c_ij|`.
    pub fn lambda(&self) -> BigInt {
        self.polys.iter().map(Polynomial::norm1).max().unwrap()
    }

    /// Coefficient-norm bound `k`; the same quantity as [`lambda`](Self::lambda).
    pub fn norm_bound(&self) -> BigInt {
        self.lambda()
    }

    /// Degree bound `t = max_i deg P_i`.
    pub fn degree_bound(&self) -> u32 {
        self.polys.iter().map(Polynomial::degree).max().unwrap()
    }

    pub fn is_linear(&self) -> bool {
        self.flags.linear
    }

    pub fn is_homogeneous(&self) -> bool {
        self.flags.homogeneous
    }

    pub fn is_diagonal_power(&self) -> bool {
        self.flags.diagonal.is_some()
    }

    /// The common exponent `t` of a diagonal system.
    pub fn diagonal_degree(&self) -> Option<u32> {
        self.flags.diagonal
    }

    /// True when every `P_i` vanishes at `x`.
    pub fn is_solution(&self, x: &[BigInt]) -> Result<bool> {
        for p in &self.polys {
            if !p.eval(x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Parses the system file format.
    ///
    /// ```text
    /// vars 4
    /// poly: 1 1 0 0 0; 1 0 1 0 0; -1 0 0 1 0; -1 0 0 0 1
    /// linear: 1 1 -1 -1 0
    /// ```
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut num_vars: Option<usize> = None;
        let mut polys = Vec::new();
        let mut last_line = 0;
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            last_line = line_no;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("vars") {
                if num_vars.is_some() {
                    return Err(Error::parse(line_no, "duplicate vars header"));
                }
                let s: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, "vars expects a positive integer"))?;
                if s == 0 {
                    return Err(Error::parse(line_no, "vars must be positive"));
                }
                num_vars = Some(s);
                continue;
            }
            let s = num_vars.ok_or_else(|| Error::parse(line_no, "missing `vars s` header"))?;
            let p = if let Some(rest) = line.strip_prefix("poly:") {
                parse_poly_terms(rest, s, line_no)?
            } else if let Some(rest) = line.strip_prefix("linear:") {
                parse_linear(rest, s, line_no)?
            } else {
                return Err(Error::parse(line_no, "expected `poly:` or `linear:`"));
            };
            polys.push(p);
        }
        let s = num_vars.ok_or_else(|| Error::parse(last_line.max(1), "missing `vars s` header"))?;
        if polys.is_empty() {
            return Err(Error::parse(last_line.max(1), "no polynomials given"));
        }
        PolySystem::new(s, polys)
    }

    /// Canonical text form (always the general `poly:` syntax).
    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.num_vars);
        for p in &self.polys {
            out.push_str("poly:");
            for (i, t) in p.terms.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { "; " });
                out.push_str(&t.coeff.to_string());
                for e in &t.exps {
                    out.push(' ');
                    out.push_str(&e.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

fn parse_ints(text: &str, line_no: usize) -> Result<Vec<BigInt>> {
    text.split_whitespace()
        .map(|w| {
            w.parse::<BigInt>()
                .map_err(|_| Error::parse(line_no, format!("not an integer: {w:?}")))
        })
        .collect()
}

fn parse_poly_terms(text: &str, s: usize, line_no: usize) -> Result<Polynomial> {
    let mut terms = Vec::new();
    for chunk in text.split(';') {
        let nums = parse_ints(chunk, line_no)?;
        if nums.len() != s + 1 {
            return Err(Error::parse(
                line_no,
                format!("term needs a coefficient and {s} exponents, got {} numbers", nums.len()),
            ));
        }
        let exps = nums[1..]
            .iter()
            .map(|e| u32::try_from(e).map_err(|_| Error::parse(line_no, format!("bad exponent {e}"))))
            .collect::<Result<Vec<u32>>>()?;
        terms.push(Term {
            coeff: nums[0].clone(),
            exps,
        });
    }
    Polynomial::new(s, terms).map_err(|e| Error::parse(line_no, e))
}

fn parse_linear(text: &str, s: usize, line_no: usize) -> Result<Polynomial> {
    let nums = parse_ints(text, line_no)?;
    if nums.len() != s + 1 {
        return Err(Error::parse(
            line_no,
            format!("linear row needs {s} coefficients and b, got {} numbers", nums.len()),
        ));
    }
    let mut terms: Vec<Term> = (0..s)
        .map(|j| {
            let mut exps = vec![0; s];
            exps[j] = 1;
            Term {
                coeff: nums[j].clone(),
                exps,
            }
        })
        .collect();
    terms.push(Term {
        coeff: -nums[s].clone(),
        exps: vec![0; s],
    });
    Polynomial::new(s, terms).map_err(|e| Error::parse(line_no, e))
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.polys.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p} = 0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn eval_examples() {
        let p = Polynomial::linear(&[1, 1, -1, -1], 0).unwrap();
        assert_eq!(p.eval(&ints(&[1, 2, 3, 0])).unwrap(), BigInt::zero());
        let q = Polynomial::diagonal(&[1, 1, -1, -1], 2).unwrap();
        assert_eq!(q.eval(&ints(&[3, 4, 5, 0])).unwrap(), BigInt::zero());
        let r = Polynomial::linear(&[1, 1, -2], 0).unwrap();
        assert_eq!(eval_poly(&r, &ints(&[0, 1, 3])).unwrap(), BigInt::from(-5));
    }

    #[test]
    fn eval_arity_mismatch() {
        let p = Polynomial::linear(&[1, 1, -2], 0).unwrap();
        assert_eq!(
            p.eval(&ints(&[1, 2])),
            Err(Error::ArityMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(Polynomial::new(2, vec![Term::new(1, vec![1, 0]), Term::new(-1, vec![1, 0])]).is_err());
        assert!(Polynomial::linear(&[0, 0], 0).is_err());
    }

    #[test]
    fn like_terms_merge() {
        let p = Polynomial::new(2, vec![Term::new(2, vec![1, 0]), Term::new(3, vec![1, 0])]).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].coeff, BigInt::from(5));
    }

    #[test]
    fn flags_and_measures() {
        let inhom = PolySystem::linear(&[(&[1, 1, -1, -1], 3), (&[2, 0, 0, -1], 0)]).unwrap();
        assert!(inhom.is_linear());
        assert!(!inhom.is_homogeneous());
        assert_eq!(inhom.lambda(), BigInt::from(7));
        assert_eq!(inhom.degree_bound(), 1);
        assert!(!inhom.is_diagonal_power());

        let hom = PolySystem::single(Polynomial::linear(&[1, 1, -2], 0).unwrap());
        assert!(hom.is_homogeneous());
        assert_eq!(hom.diagonal_degree(), Some(1));

        let diag = PolySystem::single(Polynomial::diagonal(&[1, 1, -1, -1], 2).unwrap());
        assert_eq!(diag.diagonal_degree(), Some(2));
        assert!(!diag.is_linear());
        assert!(diag.is_homogeneous());
        assert_eq!(diag.norm_bound(), BigInt::from(4));

        let mixed =
            PolySystem::single(Polynomial::new(2, vec![Term::new(1, vec![1, 1]), Term::new(-1, vec![2, 0])]).unwrap());
        assert!(!mixed.is_diagonal_power());
        assert!(mixed.is_homogeneous());
    }

    #[test]
    fn text_round_trip() {
        let text = "# sums\nvars 4\nlinear: 1 1 -1 -1 0\npoly: 1 2 0 0 0; 1 0 2 0 0; -1 0 0 2 0; -1 0 0 0 2\n";
        let sys = PolySystem::parse_text(text).unwrap();
        assert_eq!(sys.num_polys(), 2);
        let again = PolySystem::parse_text(&sys.to_text()).unwrap();
        assert_eq!(sys, again);
    }

    #[test]
    fn linear_shorthand_uses_minus_b() {
        let sys = PolySystem::parse_text("vars 2\nlinear: 1 -1 7\n").unwrap();
        let p = &sys.polys()[0];
        assert_eq!(p.constant(), BigInt::from(-7));
        assert_eq!(p.eval(&ints(&[8, 1])).unwrap(), BigInt::zero());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = PolySystem::parse_text("vars 2\nlinear: 1 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = PolySystem::parse_text("linear: 1 2 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = PolySystem::parse_text("vars 2\npoly: 1 1 0; 1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn display() {
        let p = Polynomial::linear(&[1, 1, -2], 0).unwrap();
        assert_eq!(p.to_string(), "x1 + x2 - 2*x3");
        let q = Polynomial::linear(&[1, -1], 7).unwrap();
        assert_eq!(q.to_string(), "x1 - x2 - 7");
    }
}
