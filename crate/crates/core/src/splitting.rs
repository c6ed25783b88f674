//! Splitting type of the pushforward of `O(l)` along a degree-`k` endomorphism
//! of P^n.
//!
//! The pushforward is a sum of line bundles `O(-d)^{m_d}`. Two routes compute
//! the multiplicities:
//!
//! * [`splitting_universal`] counts `a in {0..k-1}^{n+1}` with `|a| = l + k d`,
//!   i.e. reads coefficients of `((1 - t^k) / (1 - t))^{n+1}`;
//! * [`splitting_from_endo`] takes cokernels of the multiplication maps
//!   `H^0(O(1)) (x) V_{d-1} -> V_d` for an explicit endomorphism, where `V_d`
//!   is the degree `l + k d` piece of the source coordinate ring.
//!
//! The second route is always cross-checked against the first.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::endomorphism::Endomorphism;
use crate::exactla::{ExactError, RankMode};
use crate::polyring::{graded_dim, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("endomorphism has not been certified finite")]
    NotCertified,
    #[error("route disagreement: closed form {universal}, multiplication maps {computed}")]
    Integrity {
        universal: SplittingType,
        computed: SplittingType,
    },
    #[error("dualizing decomposition needs 0 <= l < k (l = {l}, k = {k})")]
    DualRange { l: i64, k: u32 },
    #[error(transparent)]
    Rank(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Largest twist in the splitting: `n + 1 + floor(-(n + 1 + l) / k)`.
pub fn delta(n: usize, k: u32, l: i64) -> i64 {
    let n1 = n as i64 + 1;
    n1 + (-(n1 + l)).div_euclid(i64::from(k))
}

/// Smallest twist in the splitting, `-floor(l / k)`.
pub fn lowest_twist(k: u32, l: i64) -> i64 {
    -l.div_euclid(i64::from(k))
}

/// Multiplicities `d -> m_{l,d}` of `O(-d)`; only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingType {
    n: usize,
    k: u32,
    l: i64,
    multiplicities: BTreeMap<i64, u64>,
}

impl SplittingType {
    pub fn new(n: usize, k: u32, l: i64, multiplicities: BTreeMap<i64, u64>) -> Self {
        let multiplicities = multiplicities.into_iter().filter(|&(_, m)| m > 0).collect();
        SplittingType {
            n,
            k,
            l,
            multiplicities,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn multiplicities(&self) -> &BTreeMap<i64, u64> {
        &self.multiplicities
    }

    pub fn get(&self, d: i64) -> u64 {
        self.multiplicities.get(&d).copied().unwrap_or(0)
    }

    /// Rank of the bundle; `k^n` for a genuine splitting.
    pub fn rank_sum(&self) -> u64 {
        self.multiplicities.values().sum()
    }

    /// `(min, max)` twist with nonzero multiplicity.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.multiplicities.keys().next()?;
        let hi = *self.multiplicities.keys().next_back()?;
        Some((lo, hi))
    }

    /// True when every `d` between the support endpoints is present.
    pub fn support_is_interval(&self) -> bool {
        match self.support() {
            None => true,
            Some((lo, hi)) => self.multiplicities.len() as i64 == hi - lo + 1,
        }
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (d, m)) in self.multiplicities.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}: {m}")?;
        }
        f.write_str("}")
    }
}

/// Coefficients of `(1 + t + .. + t^{k-1})^{n+1}`.
fn truncated_geometric_power(n: usize, k: u32) -> Vec<u64> {
    let k = k as usize;
    let mut coeffs = vec![1u64];
    for _ in 0..=n {
        let mut next = vec![0u64; coeffs.len() + k - 1];
        for (s, &c) in coeffs.iter().enumerate() {
            for slot in &mut next[s..s + k] {
                *slot += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Closed-form splitting type; depends only on `(n, k, l)`.
pub fn splitting_universal(n: usize, k: u32, l: i64) -> SplittingType {
    assert!(n >= 1 && k >= 1, "splitting needs n >= 1 and k >= 1");
    let k64 = i64::from(k);
    let multiplicities = truncated_geometric_power(n, k)
        .into_iter()
        .enumerate()
        .filter_map(|(s, m)| {
            let shifted = s as i64 - l;
            (shifted.rem_euclid(k64) == 0).then_some((shifted.div_euclid(k64), m))
        })
        .collect();
    SplittingType::new(n, k, l, multiplicities)
}

/// One step of the multiplication-map computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CokernelStep {
    pub d: i64,
    /// `dim V_{l,d}`
    pub target_dim: u64,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// `dim V_{l,d} - rank`
    pub multiplicity: u64,
}

/// Cokernel dimension of `H^0(O(1)) (x) V_{l,d-1} -> V_{l,d}` for each `d` in
/// `range`, without any stopping rule.
pub fn cokernel_dimensions(
    e: &Endomorphism,
    l: i64,
    range: RangeInclusive<i64>,
    mode: &RankMode,
) -> Result<Vec<CokernelStep>, SplitError> {
    if !e.is_certified() {
        return Err(SplitError::NotCertified);
    }
    range.map(|d| cokernel_step(e, l, d, mode)).collect()
}

fn cokernel_step(e: &Endomorphism, l: i64, d: i64, mode: &RankMode) -> Result<CokernelStep, SplitError> {
    let k = i64::from(e.k());
    let target_degree = l + k * d;
    let m = e.multiplication_matrix(target_degree - k)?;
    let rank = mode.rank(&m)?;
    let target_dim = graded_dim(e.num_vars(), target_degree);
    Ok(CokernelStep {
        d,
        target_dim,
        rows: m.rows(),
        cols: m.cols(),
        rank,
        multiplicity: target_dim - rank as u64,
    })
}

/// Splitting type of `pi_* O(l)` from the multiplication maps of `e`.
///
/// Walks `d` upward from `-floor(l/k)`, stops at the first vanishing
/// cokernel, and never goes past `delta(n, k, l)`.
pub fn splitting_from_endo_unchecked(
    e: &Endomorphism,
    l: i64,
    mode: &RankMode,
) -> Result<(SplittingType, Vec<CokernelStep>), SplitError> {
    if !e.is_certified() {
        return Err(SplitError::NotCertified);
    }
    let lo = lowest_twist(e.k(), l);
    let hi = delta(e.n(), e.k(), l);
    let mut steps = Vec::new();
    for d in lo..=hi {
        let step = cokernel_step(e, l, d, mode)?;
        let done = step.multiplicity == 0;
        steps.push(step);
        if done {
            break;
        }
    }
    let multiplicities = steps.iter().map(|s| (s.d, s.multiplicity)).collect();
    Ok((SplittingType::new(e.n(), e.k(), l, multiplicities), steps))
}

/// As [`splitting_from_endo_unchecked`], failing with an integrity error when
/// the result differs from the closed form.
pub fn splitting_from_endo(e: &Endomorphism, l: i64, mode: &RankMode) -> Result<SplittingType, SplitError> {
    let (computed, _) = splitting_from_endo_unchecked(e, l, mode)?;
    let universal = splitting_universal(e.n(), e.k(), l);
    if computed != universal {
        return Err(SplitError::Integrity { universal, computed });
    }
    Ok(computed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertFailure {
    pub e: i64,
    pub lhs: u64,
    pub rhs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertCheck {
    pub passed: bool,
    pub e_min: i64,
    pub e_max: i64,
    pub first_failure: Option<HilbertFailure>,
}

/// Checks `sum_d m_d * dim S_{e-d} = dim S'_{l+ke}` for `e` in
/// `[-floor(l/k), e_max]`.
pub fn hilbert_check(st: &SplittingType, e_max: i64) -> HilbertCheck {
    let v = st.n + 1;
    let e_min = lowest_twist(st.k, st.l);
    let first_failure = (e_min..=e_max).find_map(|e| {
        let lhs: u64 = st.multiplicities.iter().map(|(&d, &m)| m * graded_dim(v, e - d)).sum();
        let rhs = graded_dim(v, st.l + i64::from(st.k) * e);
        (lhs != rhs).then_some(HilbertFailure { e, lhs, rhs })
    });
    HilbertCheck {
        passed: first_failure.is_none(),
        e_min,
        e_max,
        first_failure,
    }
}

/// Multiplicities of `omega_X(d)` in `pi_* omega_{X'}(-l)`, for `0 <= l < k`.
/// The dual spaces have the same dimensions, so the map is unchanged.
pub fn dual_multiplicities(st: &SplittingType) -> Result<BTreeMap<i64, u64>, SplitError> {
    if st.l < 0 || st.l >= i64::from(st.k) {
        return Err(SplitError::DualRange { l: st.l, k: st.k });
    }
    Ok(st.multiplicities.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(i64, u64)]) -> BTreeMap<i64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(4, 2, 0), 2);
        assert_eq!(delta(1, 2, 0), 1);
        for n in 1..5 {
            for l in -4..6 {
                assert_eq!(delta(n, 1, l), -l);
            }
        }
        assert_eq!(delta(3, 3, 0), 2);
        assert_eq!(delta(3, 3, 1), 2);
        assert_eq!(delta(3, 3, 2), 2);
    }

    #[test]
    fn universal_examples() {
        assert_eq!(
            splitting_universal(4, 2, 0).multiplicities(),
            &map(&[(0, 1), (1, 10), (2, 5)])
        );
        assert_eq!(
            splitting_universal(4, 2, 1).multiplicities(),
            &map(&[(0, 5), (1, 10), (2, 1)])
        );
        assert_eq!(splitting_universal(1, 2, 0).multiplicities(), &map(&[(0, 1), (1, 1)]));
        assert_eq!(splitting_universal(4, 1, 3).multiplicities(), &map(&[(-3, 1)]));
    }

    #[test]
    fn from_endo_examples() {
        let mode = RankMode::default();
        let st = splitting_from_endo(&Endomorphism::power_map(4, 2), 0, &mode).unwrap();
        assert_eq!(st.multiplicities(), &map(&[(0, 1), (1, 10), (2, 5)]));
        let st = splitting_from_endo(&Endomorphism::power_map(1, 2), 1, &mode).unwrap();
        assert_eq!(st.multiplicities(), &map(&[(0, 2)]));
    }

    #[test]
    fn uncertified_map_is_refused() {
        let e = Endomorphism::new(1, 2, Endomorphism::power_map(1, 2).forms().to_vec()).unwrap();
        assert_eq!(
            splitting_from_endo(&e, 0, &RankMode::default()),
            Err(SplitError::NotCertified)
        );
    }

    #[test]
    fn hilbert_check_examples() {
        let st = splitting_universal(4, 2, 1);
        let c = hilbert_check(&st, 1);
        assert!(c.passed);
        assert!(hilbert_check(&splitting_universal(4, 2, 0), 0).passed);
        let tampered = SplittingType::new(4, 2, 0, map(&[(0, 2), (1, 9), (2, 5)]));
        let c = hilbert_check(&tampered, 5);
        assert!(!c.passed);
        assert_eq!(c.first_failure, Some(HilbertFailure { e: 0, lhs: 2, rhs: 1 }));
    }

    #[test]
    fn dual_multiplicity_range() {
        let st = splitting_universal(4, 2, 1);
        assert_eq!(dual_multiplicities(&st).unwrap(), map(&[(0, 5), (1, 10), (2, 1)]));
        assert_eq!(
            dual_multiplicities(&splitting_universal(4, 2, 0)).unwrap(),
            map(&[(0, 1), (1, 10), (2, 5)])
        );
        assert_eq!(
            dual_multiplicities(&splitting_universal(4, 2, 2)),
            Err(SplitError::DualRange { l: 2, k: 2 })
        );
        assert!(dual_multiplicities(&splitting_universal(4, 2, -1)).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(splitting_universal(4, 2, 0).to_string(), "{0: 1, 1: 10, 2: 5}");
    }
}
