//! Monomials, graded pieces and homogeneous integer polynomials.
//!
//! Monomials are ordered graded-lexicographically with `y0 > y1 > ...`.
//! Graded bases list monomials from largest to smallest in that order, which
//! fixes the row and column layout of every multiplication matrix.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactla::binomial;

mod parse;

pub use parse::{parse_form, parse_form_with};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} variables, got {got}")]
    VarCountMismatch { expected: usize, got: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("at column {column}: form is not homogeneous (degree {found}, expected {expected})")]
    NonHomogeneous { column: usize, expected: u32, found: u32 },
    #[error("at column {column}: variable index {index} out of range for {num_vars} variables")]
    VarOutOfRange {
        column: usize,
        index: usize,
        num_vars: usize,
    },
    #[error("substitution needs at least one form")]
    NoForms,
    #[error("coefficient {0} does not fit in a machine integer")]
    CoefficientOverflow(BigInt),
}

/// Exponent vector; the degree is the exponent sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial {
            exps: vec![0; num_vars],
        }
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    fn write_with(&self, f: &mut fmt::Formatter<'_>, var: char) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            match e {
                1 => write!(f, "{var}{i}")?,
                _ => write!(f, "{var}{i}^{e}")?,
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Number of monomials of `degree` in `num_vars` variables; zero for negative degree.
pub fn graded_dim(num_vars: usize, degree: i64) -> u64 {
    assert!(num_vars >= 1, "graded_dim needs at least one variable");
    if degree < 0 {
        return 0;
    }
    binomial(degree + num_vars as i64 - 1, num_vars as i64 - 1)
}

/// All monomials of one degree, largest first.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    num_vars: usize,
    degree: i64,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl GradedBasis {
    /// Empty for negative degree.
    pub fn new(num_vars: usize, degree: i64) -> Self {
        assert!(num_vars >= 1, "graded basis needs at least one variable");
        let mut monomials = Vec::with_capacity(graded_dim(num_vars, degree) as usize);
        if degree >= 0 {
            let mut exps = vec![0u32; num_vars];
            fill_descending(&mut exps, 0, degree as u32, &mut monomials);
        }
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        GradedBasis {
            num_vars,
            degree,
            monomials,
            index,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

fn fill_descending(exps: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == exps.len() {
        exps[pos] = remaining;
        out.push(Monomial::new(exps.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        exps[pos] = e;
        fill_descending(exps, pos + 1, remaining - e, out);
    }
    exps[pos] = 0;
}

/// Homogeneous polynomial with integer coefficients. Zero coefficients are
/// never stored; the zero polynomial keeps the degree it was created with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogPoly {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, BigInt>,
}

impl HomogPoly {
    pub fn zero(num_vars: usize, degree: u32) -> Self {
        HomogPoly {
            num_vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        Self::monomial(BigInt::one(), Monomial::var(num_vars, index))
    }

    pub fn monomial(coeff: BigInt, m: Monomial) -> Self {
        let mut p = HomogPoly::zero(m.num_vars(), m.degree());
        if !coeff.is_zero() {
            p.terms.insert(m, coeff);
        }
        p
    }

    /// Build from `(coefficient, exponents)` pairs, combining like terms.
    pub fn from_terms<C: Into<BigInt>>(
        num_vars: usize,
        terms: impl IntoIterator<Item = (C, Vec<u32>)>,
    ) -> Result<Self, PolyError> {
        let mut out: Option<HomogPoly> = None;
        for (c, exps) in terms {
            if exps.len() != num_vars {
                return Err(PolyError::VarCountMismatch {
                    expected: num_vars,
                    got: exps.len(),
                });
            }
            let term = HomogPoly::monomial(c.into(), Monomial::new(exps));
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        out.ok_or(PolyError::NoForms)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Terms with machine-integer coefficients, for building matrices.
    pub fn small_terms(&self) -> Result<Vec<(&Monomial, i64)>, PolyError> {
        self.terms()
            .map(|(m, c)| {
                c.to_i64()
                    .map(|v| (m, v))
                    .ok_or_else(|| PolyError::CoefficientOverflow(c.clone()))
            })
            .collect()
    }

    fn check_vars(&self, other: &HomogPoly) -> Result<(), PolyError> {
        if self.num_vars != other.num_vars {
            return Err(PolyError::VarCountMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &HomogPoly) -> Result<HomogPoly, PolyError> {
        self.check_vars(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(PolyError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(HomogPoly {
            num_vars: self.num_vars,
            degree: self.degree,
            terms,
        })
    }

    pub fn neg(&self) -> HomogPoly {
        HomogPoly {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &HomogPoly) -> Result<HomogPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> HomogPoly {
        if c.is_zero() {
            return HomogPoly::zero(self.num_vars, self.degree);
        }
        HomogPoly {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn multiply(&self, other: &HomogPoly) -> Result<HomogPoly, PolyError> {
        self.check_vars(other)?;
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                accumulate(&mut terms, a.mul(b), ca * cb);
            }
        }
        Ok(HomogPoly {
            num_vars: self.num_vars,
            degree: self.degree + other.degree,
            terms,
        })
    }

    pub fn pow(&self, e: u32) -> HomogPoly {
        let mut acc = HomogPoly::monomial(BigInt::one(), Monomial::one(self.num_vars));
        for _ in 0..e {
            acc = acc.multiply(self).expect("same variable count");
        }
        acc
    }

    /// Substitute `forms[i]` for the i-th variable.
    pub fn compose(&self, forms: &[HomogPoly]) -> Result<HomogPoly, PolyError> {
        let first = forms.first().ok_or(PolyError::NoForms)?;
        if forms.len() != self.num_vars {
            return Err(PolyError::VarCountMismatch {
                expected: self.num_vars,
                got: forms.len(),
            });
        }
        for f in &forms[1..] {
            first.check_vars(f)?;
            if f.degree != first.degree {
                return Err(PolyError::DegreeMismatch {
                    left: first.degree,
                    right: f.degree,
                });
            }
        }
        let target_vars = first.num_vars;
        let mut powers: HashMap<(usize, u32), HomogPoly> = HashMap::new();
        let mut out = HomogPoly::zero(target_vars, self.degree * first.degree);
        for (m, c) in &self.terms {
            let mut prod = HomogPoly::monomial(c.clone(), Monomial::one(target_vars));
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| forms[i].pow(e));
                prod = prod.multiply(p)?;
            }
            for (mm, cc) in prod.terms {
                accumulate(&mut out.terms, mm, cc);
            }
        }
        Ok(out)
    }

    /// Evaluate at an integer point modulo `p`.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> u64 {
        let modulus = BigInt::from(p);
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut v = (c % &modulus + &modulus) % &modulus;
            for (x, &e) in point.iter().zip(&m.exps) {
                v = v * BigInt::from(*x).pow(e) % &modulus;
            }
            acc = (acc + v.to_u64().expect("reduced")) % p;
        }
        acc
    }

    pub fn display_with(&self, var: char) -> impl fmt::Display + '_ {
        PolyDisplay { poly: self, var }
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, BigInt>, m: Monomial, c: BigInt) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

struct PolyDisplay<'a> {
    poly: &'a HomogPoly,
    var: char,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.poly.terms().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let constant = m.degree() == 0;
            if !abs.is_one() || constant {
                write!(f, "{abs}")?;
                if !constant {
                    f.write_str("*")?;
                }
            }
            if !constant {
                m.write_with(f, self.var)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with('y').fmt(f)
    }
}
