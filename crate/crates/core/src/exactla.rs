//! Exact scalars and dense matrices, with rank over the rationals and over
//! prime fields.
//!
//! Every matrix the rest of the crate builds has integer entries, so the hot
//! path is [`IntegerMatrix`] together with a [`RankMode`]. The general
//! [`ExactMatrix`] covers rational and residue entries for callers that need
//! them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Two primes above 2^20 used when no override is supplied.
pub const DEFAULT_PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

/// Environment variable holding a comma separated list of primes.
pub const PRIMES_ENV: &str = "PUSHSPLIT_PRIMES";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("no primes supplied")]
    NoPrimes,
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("entry ({row}, {col}) is not an integer")]
    NonInteger { row: usize, col: usize },
    #[error("scalars live in different fields")]
    FieldMismatch,
    #[error("cannot parse prime list {0:?}")]
    PrimeList(String),
}

/// The field a scalar or matrix lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

/// A rational number in lowest terms or a residue modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExactScalar {
    Rational(BigRational),
    Residue { value: u64, prime: u64 },
}

impl ExactScalar {
    pub fn integer(v: impl Into<BigInt>) -> Self {
        ExactScalar::Rational(BigRational::from_integer(v.into()))
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        // BigRational::new normalises sign and gcd.
        ExactScalar::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn residue(v: i64, prime: u64) -> Result<Self, ExactError> {
        check_prime(prime)?;
        Ok(ExactScalar::Residue {
            value: reduce_i64(v, prime),
            prime,
        })
    }

    pub fn zero_in(field: Field) -> Self {
        match field {
            Field::Rationals => ExactScalar::Rational(BigRational::zero()),
            Field::Prime(p) => ExactScalar::Residue { value: 0, prime: p },
        }
    }

    pub fn field(&self) -> Field {
        match self {
            ExactScalar::Rational(_) => Field::Rationals,
            ExactScalar::Residue { prime, .. } => Field::Prime(*prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_zero(),
            ExactScalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_integer(),
            ExactScalar::Residue { .. } => false,
        }
    }

    /// Image of an integer scalar in Z/p.
    pub fn reduce(&self, prime: u64) -> Option<ExactScalar> {
        match self {
            ExactScalar::Rational(q) if q.is_integer() => Some(ExactScalar::Residue {
                value: reduce_big(q.numer(), prime),
                prime,
            }),
            _ => None,
        }
    }

    pub fn checked_add(&self, other: &ExactScalar) -> Result<ExactScalar, ExactError> {
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => Ok(ExactScalar::Rational(a + b)),
            (ExactScalar::Residue { value: a, prime: p }, ExactScalar::Residue { value: b, prime: q }) if p == q => {
                Ok(ExactScalar::Residue {
                    value: (a + b) % p,
                    prime: *p,
                })
            }
            _ => Err(ExactError::FieldMismatch),
        }
    }

    pub fn checked_mul(&self, other: &ExactScalar) -> Result<ExactScalar, ExactError> {
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => Ok(ExactScalar::Rational(a * b)),
            (ExactScalar::Residue { value: a, prime: p }, ExactScalar::Residue { value: b, prime: q }) if p == q => {
                Ok(ExactScalar::Residue {
                    value: a * b % p,
                    prime: *p,
                })
            }
            _ => Err(ExactError::FieldMismatch),
        }
    }
}

/// Dense row-major matrix of exact scalars from a single field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ExactScalar>) -> Result<Self, ExactError> {
        check_shape(rows, cols, entries.len())?;
        if let Some(first) = entries.first() {
            let field = first.field();
            if entries.iter().any(|e| e.field() != field) {
                return Err(ExactError::FieldMismatch);
            }
        }
        Ok(ExactMatrix { rows, cols, entries })
    }

    pub fn from_integers(rows: usize, cols: usize, entries: &[i64]) -> Result<Self, ExactError> {
        check_shape(rows, cols, entries.len())?;
        Ok(ExactMatrix {
            rows,
            cols,
            entries: entries.iter().map(|&v| ExactScalar::integer(v)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &ExactScalar {
        &self.entries[row * self.cols + col]
    }

    /// `None` for a matrix without entries.
    pub fn field(&self) -> Option<Field> {
        self.entries.first().map(ExactScalar::field)
    }

    /// Reduce an integer matrix modulo `prime`.
    pub fn reduce_mod(&self, prime: u64) -> Result<ExactMatrix, ExactError> {
        check_prime(prime)?;
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, e)| {
                e.reduce(prime).ok_or(ExactError::NonInteger {
                    row: idx / self.cols.max(1),
                    col: idx % self.cols.max(1),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Rank over the field the entries live in.
    pub fn rank(&self) -> usize {
        match self.field() {
            None => 0,
            Some(Field::Prime(p)) => {
                let data = self
                    .entries
                    .iter()
                    .map(|e| match e {
                        ExactScalar::Residue { value, .. } => *value,
                        ExactScalar::Rational(_) => unreachable!("uniform field checked at construction"),
                    })
                    .collect();
                rank_mod_prime(self.rows, self.cols, data, p)
            }
            Some(Field::Rationals) => {
                // Clearing denominators row by row leaves the rank unchanged.
                let mut data = Vec::with_capacity(self.entries.len());
                for r in 0..self.rows {
                    let row = &self.entries[r * self.cols..(r + 1) * self.cols];
                    let lcm = row.iter().fold(BigInt::one(), |acc, e| match e {
                        ExactScalar::Rational(q) => acc.lcm(q.denom()),
                        ExactScalar::Residue { .. } => unreachable!(),
                    });
                    data.extend(row.iter().map(|e| match e {
                        ExactScalar::Rational(q) => q.numer() * (&lcm / q.denom()),
                        ExactScalar::Residue { .. } => unreachable!(),
                    }));
                }
                bareiss_rank(self.rows, self.cols, data)
            }
        }
    }
}

/// Dense row-major integer matrix. All multiplication-map matrices are of
/// this kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, ExactError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(ExactError::Shape {
                    rows: rows.len(),
                    cols,
                    expected: rows.len() * cols,
                    got: entries.len() + row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(IntegerMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self, ExactError> {
        check_shape(rows, cols, entries.len())?;
        Ok(IntegerMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: i64) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn to_exact(&self) -> ExactMatrix {
        ExactMatrix::from_integers(self.rows, self.cols, &self.entries).expect("shape already valid")
    }

    pub fn rank_mod(&self, prime: u64) -> Result<usize, ExactError> {
        check_prime(prime)?;
        let data = self.entries.iter().map(|&v| reduce_i64(v, prime)).collect();
        Ok(rank_mod_prime(self.rows, self.cols, data, prime))
    }

    /// Rank over Q by fraction-free elimination.
    pub fn rank_exact(&self) -> usize {
        let data = self.entries.iter().map(|&v| BigInt::from(v)).collect();
        bareiss_rank(self.rows, self.cols, data)
    }
}

/// Outcome of [`rank_verified`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    /// Rank modulo each prime, in the order supplied.
    pub modular: Vec<(u64, usize)>,
    /// Largest modular rank. Never exceeds the rational rank.
    pub rank: usize,
    /// Rational rank, when the confirmation pass was requested.
    pub exact: Option<usize>,
}

impl RankReport {
    pub fn primes_agree(&self) -> bool {
        self.modular.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

/// Rank modulo each prime; the maximum is a lower bound for the rank over Q.
pub fn rank_verified(m: &IntegerMatrix, primes: &[u64], confirm_exact: bool) -> Result<RankReport, ExactError> {
    if primes.is_empty() {
        return Err(ExactError::NoPrimes);
    }
    let modular = primes
        .iter()
        .map(|&p| m.rank_mod(p).map(|r| (p, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let rank = modular.iter().map(|&(_, r)| r).max().unwrap_or(0);
    let exact = confirm_exact.then(|| m.rank_exact());
    Ok(RankReport { modular, rank, exact })
}

/// How integer ranks are computed downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankMode {
    /// Rank at each prime; on disagreement the rational rank is computed.
    Modular(Vec<u64>),
    Exact,
}

impl Default for RankMode {
    fn default() -> Self {
        RankMode::Modular(DEFAULT_PRIMES.to_vec())
    }
}

impl RankMode {
    pub fn modular(primes: Vec<u64>) -> Result<Self, ExactError> {
        if primes.is_empty() {
            return Err(ExactError::NoPrimes);
        }
        for &p in &primes {
            check_prime(p)?;
        }
        Ok(RankMode::Modular(primes))
    }

    /// Default primes, overridden by `PUSHSPLIT_PRIMES` when set.
    pub fn from_env() -> Result<Self, ExactError> {
        match std::env::var(PRIMES_ENV) {
            Ok(list) if !list.trim().is_empty() => RankMode::modular(parse_prime_list(&list)?),
            _ => Ok(RankMode::default()),
        }
    }

    pub fn rank(&self, m: &IntegerMatrix) -> Result<usize, ExactError> {
        match self {
            RankMode::Exact => Ok(m.rank_exact()),
            RankMode::Modular(primes) => {
                let report = rank_verified(m, primes, false)?;
                if report.primes_agree() {
                    Ok(report.rank)
                } else {
                    Ok(m.rank_exact())
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RankMode::Exact => "exact".to_string(),
            RankMode::Modular(ps) => {
                let list: Vec<String> = ps.iter().map(u64::to_string).collect();
                format!("modular:{}", list.join(","))
            }
        }
    }
}

pub fn parse_prime_list(text: &str) -> Result<Vec<u64>, ExactError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| ExactError::PrimeList(text.to_string()))
        })
        .collect()
}

/// C(a, b) for 0 <= b <= a, zero otherwise.
pub fn binomial(a: i64, b: i64) -> u64 {
    if b < 0 || a < 0 || b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient exceeds u64")
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<(), ExactError> {
    if p < (1 << 32) && is_prime(p) {
        Ok(())
    } else {
        Err(ExactError::NotPrime(p))
    }
}

fn check_shape(rows: usize, cols: usize, got: usize) -> Result<(), ExactError> {
    if rows * cols != got {
        return Err(ExactError::Shape {
            rows,
            cols,
            expected: rows * cols,
            got,
        });
    }
    Ok(())
}

fn reduce_i64(v: i64, p: u64) -> u64 {
    (v as i128).rem_euclid(p as i128) as u64
}

fn reduce_big(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue below p")
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) is the inverse.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Gaussian elimination over Z/p, p < 2^32 so products fit in u64.
fn rank_mod_prime(rows: usize, cols: usize, mut a: Vec<u64>, p: u64) -> usize {
    let mut rank = 0;
    let mut pivot_support = Vec::with_capacity(cols);
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in c..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let inv = inverse_mod(a[rank * cols + c], p);
        pivot_support.clear();
        for j in c..cols {
            let v = &mut a[rank * cols + j];
            if *v != 0 {
                *v = *v * inv % p;
                if j > c {
                    pivot_support.push(j);
                }
            }
        }
        for r in rank + 1..rows {
            let f = a[r * cols + c];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            a[r * cols + c] = 0;
            for &j in &pivot_support {
                let idx = r * cols + j;
                a[idx] = (a[idx] + neg * a[rank * cols + j]) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Fraction-free (Bareiss) elimination over Z. Every division is exact.
fn bareiss_rank(rows: usize, cols: usize, mut a: Vec<BigInt>) -> usize {
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r * cols + c].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let pv = a[rank * cols + c].clone();
        for r in rank + 1..rows {
            let f = std::mem::take(&mut a[r * cols + c]);
            for j in c + 1..cols {
                let v = &pv * &a[r * cols + j] - &f * &a[rank * cols + j];
                debug_assert!((&v % &prev).is_zero());
                a[r * cols + j] = v / &prev;
            }
        }
        prev = pv;
        rank += 1;
    }
    rank
}
