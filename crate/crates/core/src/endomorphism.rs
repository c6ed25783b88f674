//! Finite endomorphisms of projective space given by `n+1` forms of degree `k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactla::{ExactError, IntegerMatrix, RankMode};
use crate::polyring::{graded_dim, parse_form, GradedBasis, HomogPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndoError {
    #[error("dimension n must be at least 1")]
    ZeroDimension,
    #[error("degree k must be at least 1")]
    ZeroDegree,
    #[error("expected {expected} forms, got {got}")]
    FormCount { expected: usize, got: usize },
    #[error("form f{index} has {got} variables, expected {expected}")]
    FormVars { index: usize, expected: usize, got: usize },
    #[error("form f{index} has degree {got}, expected {expected}")]
    FormDegree { index: usize, expected: u32, got: u32 },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("no finite endomorphism found after {0} attempts")]
    RandomExhausted(usize),
    #[error(transparent)]
    Rank(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A morphism P^n -> P^n, `x_i = f_i(y)`, with all `f_i` of degree `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    n: usize,
    k: u32,
    forms: Vec<HomogPoly>,
    certified: bool,
}

/// Result of the socle-degree test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitenessVerdict {
    pub finite: bool,
    /// `(n+1)(k-1)+1`
    pub test_degree: u32,
    pub rank: usize,
    /// Number of monomials of the test degree.
    pub target_dim: u64,
    pub rows: usize,
    pub cols: usize,
    pub rank_mode: String,
}

impl Endomorphism {
    pub fn new(n: usize, k: u32, forms: Vec<HomogPoly>) -> Result<Self, EndoError> {
        if n == 0 {
            return Err(EndoError::ZeroDimension);
        }
        if k == 0 {
            return Err(EndoError::ZeroDegree);
        }
        if forms.len() != n + 1 {
            return Err(EndoError::FormCount {
                expected: n + 1,
                got: forms.len(),
            });
        }
        for (index, f) in forms.iter().enumerate() {
            if f.num_vars() != n + 1 {
                return Err(EndoError::FormVars {
                    index,
                    expected: n + 1,
                    got: f.num_vars(),
                });
            }
            if f.degree() != k {
                return Err(EndoError::FormDegree {
                    index,
                    expected: k,
                    got: f.degree(),
                });
            }
        }
        Ok(Endomorphism {
            n,
            k,
            forms,
            certified: false,
        })
    }

    /// `f_i = y_i^k`. Finite for every `k >= 1`, so it comes certified.
    pub fn power_map(n: usize, k: u32) -> Self {
        assert!(n >= 1 && k >= 1, "power map needs n >= 1 and k >= 1");
        let forms = (0..=n).map(|i| HomogPoly::var(n + 1, i).pow(k)).collect();
        Endomorphism {
            n,
            k,
            forms,
            certified: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn num_vars(&self) -> usize {
        self.n + 1
    }

    pub fn forms(&self) -> &[HomogPoly] {
        &self.forms
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Degree of the map, `k^n`.
    pub fn map_degree(&self) -> u64 {
        u64::from(self.k).pow(self.n as u32)
    }

    /// Matrix of `(g_0..g_n) -> sum f_i g_i` from `n+1` copies of the
    /// degree-`source_degree` piece into the degree-`source_degree + k` piece.
    ///
    /// Rows follow the target basis; column `i * |source| + j` holds
    /// `f_i * source[j]`.
    pub fn multiplication_matrix(&self, source_degree: i64) -> Result<IntegerMatrix, PolyError> {
        let v = self.num_vars();
        let source = GradedBasis::new(v, source_degree);
        let target = GradedBasis::new(v, source_degree + i64::from(self.k));
        let mut m = IntegerMatrix::zeros(target.len(), v * source.len());
        for (i, f) in self.forms.iter().enumerate() {
            let terms = f.small_terms()?;
            for (j, mono) in source.monomials().iter().enumerate() {
                let col = i * source.len() + j;
                for (fm, c) in &terms {
                    let row = target
                        .index_of(&fm.mul(mono))
                        .expect("product lies in the target degree");
                    m.set(row, col, *c);
                }
            }
        }
        Ok(m)
    }

    /// The forms have no common projective zero iff the ideal they generate
    /// contains every monomial of degree `(n+1)(k-1)+1`.
    pub fn validate_finite(&self, mode: &RankMode) -> Result<FinitenessVerdict, EndoError> {
        let test_degree = (self.n as u32 + 1) * (self.k - 1) + 1;
        let m = self.multiplication_matrix(i64::from(test_degree) - i64::from(self.k))?;
        let rank = mode.rank(&m)?;
        let target_dim = graded_dim(self.num_vars(), i64::from(test_degree));
        Ok(FinitenessVerdict {
            finite: rank as u64 == target_dim,
            test_degree,
            rank,
            target_dim,
            rows: m.rows(),
            cols: m.cols(),
            rank_mode: mode.describe(),
        })
    }

    /// Run the finiteness test and certify the map when it passes.
    pub fn certify(mut self, mode: &RankMode) -> Result<(Self, FinitenessVerdict), EndoError> {
        let verdict = self.validate_finite(mode)?;
        self.certified = verdict.finite;
        Ok((self, verdict))
    }

    /// `g(f_0, .., f_n)` for a form `g` on the target space.
    pub fn pullback_form(&self, g: &HomogPoly) -> Result<HomogPoly, PolyError> {
        g.compose(&self.forms)
    }

    /// Power map plus a random degree-`k` form on each coordinate, retried
    /// until the finiteness test passes.
    pub fn random(
        n: usize,
        k: u32,
        seed: u64,
        coeff_bound: i64,
        max_attempts: usize,
        mode: &RankMode,
    ) -> Result<Self, EndoError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = GradedBasis::new(n + 1, i64::from(k));
        for _ in 0..max_attempts {
            let forms = (0..=n)
                .map(|i| {
                    let mut f = HomogPoly::var(n + 1, i).pow(k);
                    for mono in basis.monomials() {
                        let c = rng.gen_range(-coeff_bound..=coeff_bound);
                        let term = HomogPoly::monomial(BigInt::from(c), mono.clone());
                        f = f.add(&term).expect("same degree");
                    }
                    f
                })
                .collect();
            let (e, verdict) = Endomorphism::new(n, k, forms)?.certify(mode)?;
            if verdict.finite {
                return Ok(e);
            }
        }
        Err(EndoError::RandomExhausted(max_attempts))
    }

    /// Read the `key = value` endomorphism file format.
    pub fn parse(text: &str) -> Result<Self, EndoError> {
        let mut entries: BTreeMap<String, (usize, usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(EndoError::Parse {
                    line,
                    column: content.len() - content.trim_start().len() + 1,
                    message: "expected '<name> = <value>'".into(),
                });
            };
            let key = content[..eq].trim().to_string();
            let value_start = eq + 1 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
            let value = content[eq + 1..].trim().to_string();
            if key.is_empty() {
                return Err(EndoError::Parse {
                    line,
                    column: 1,
                    message: "missing name before '='".into(),
                });
            }
            if entries.contains_key(&key) {
                return Err(EndoError::Parse {
                    line,
                    column: 1,
                    message: format!("duplicate statement '{key}'"),
                });
            }
            entries.insert(key, (line, value_start + 1, value));
        }

        let natural = |key: &str| -> Result<u64, EndoError> {
            let (line, column, value) = entries.get(key).ok_or_else(|| EndoError::Parse {
                line: 0,
                column: 0,
                message: format!("missing statement '{key}'"),
            })?;
            value.parse().map_err(|_| EndoError::Parse {
                line: *line,
                column: *column,
                message: format!("'{key}' must be a natural number"),
            })
        };
        let n = natural("n")? as usize;
        let k = natural("k")? as u32;
        if n == 0 {
            return Err(EndoError::ZeroDimension);
        }
        if k == 0 {
            return Err(EndoError::ZeroDegree);
        }
        for key in entries.keys() {
            let known = key == "n"
                || key == "k"
                || key
                    .strip_prefix('f')
                    .and_then(|s| s.parse::<usize>().ok())
                    .is_some_and(|i| i <= n);
            if !known {
                let (line, _, _) = entries[key];
                return Err(EndoError::Parse {
                    line,
                    column: 1,
                    message: format!("unknown statement '{key}'"),
                });
            }
        }
        let mut forms = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let key = format!("f{i}");
            let (line, column, value) = entries.get(&key).ok_or_else(|| EndoError::Parse {
                line: 0,
                column: 0,
                message: format!("missing statement '{key}'"),
            })?;
            let f = parse_form(value, n + 1).map_err(|e| {
                let (col, message) = match &e {
                    PolyError::Syntax { column, message } => (*column, message.clone()),
                    PolyError::NonHomogeneous { column, .. } | PolyError::VarOutOfRange { column, .. } => {
                        (*column, e.to_string())
                    }
                    _ => (1, e.to_string()),
                };
                EndoError::Parse {
                    line: *line,
                    column: column + col - 1,
                    message,
                }
            })?;
            if f.degree() != k {
                return Err(EndoError::Parse {
                    line: *line,
                    column: *column,
                    message: format!("form {key} has degree {}, expected {k}", f.degree()),
                });
            }
            forms.push(f);
        }
        Endomorphism::new(n, k, forms)
    }

    pub fn to_file_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "k = {}", self.k)?;
        for (i, form) in self.forms.iter().enumerate() {
            writeln!(f, "f{i} = {form}")?;
        }
        Ok(())
    }
}
