//! Cohomology and verdicts for the inverse image `X' = pi^{-1}(X)` of a model
//! variety under a degree-`k` endomorphism.
//!
//! Everything here goes through the splitting
//! `pi_* O_{X'}(l) = sum_d O_X(-d)^{m_{l,d}}`: a cohomology group of `X'` is a
//! weighted sum of cohomology groups of `X`.

use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::splitting::{delta, lowest_twist, splitting_universal, SplittingType};
use crate::varieties::{ModelSummary, ModelVariety, VarietyError};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PullbackError {
    #[error(transparent)]
    Table(#[from] VarietyError),
    #[error("k must be at least 1")]
    ZeroDegree,
    #[error("dualizing decomposition needs 0 <= l < k (l = {l}, k = {k})")]
    DualRange { l: i64, k: u32 },
    #[error("integrity failure: {0}")]
    Integrity(String),
}

impl PullbackError {
    pub fn is_range(&self) -> bool {
        matches!(self, PullbackError::Table(VarietyError::Range { .. }))
    }
}

/// Verdict with provenance: either the computed record or the reason the
/// statement does not apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum Verdict<T> {
    #[serde(rename = "APPLICABLE")]
    Applicable(T),
    #[serde(rename = "NOT_APPLICABLE")]
    NotApplicable { reason: String },
}

impl<T> Verdict<T> {
    pub fn applicable(&self) -> Option<&T> {
        match self {
            Verdict::Applicable(t) => Some(t),
            Verdict::NotApplicable { .. } => None,
        }
    }

    pub fn not_applicable(reason: impl Into<String>) -> Self {
        Verdict::NotApplicable { reason: reason.into() }
    }
}

pub(crate) const K_HYPOTHESIS: &str = "hypothesis k > 1 violated: the map is an automorphism";

/// Hypotheses a verdict consumed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assumptions {
    pub k_greater_than_one: bool,
    pub smooth_general_position: bool,
    /// `h^0(O_X)`; 1 for a connected model.
    pub h0_ox: u64,
}

fn check_k(k: u32) -> Result<(), PullbackError> {
    if k == 0 {
        Err(PullbackError::ZeroDegree)
    } else {
        Ok(())
    }
}

/// `deg X' = deg X * k^codim X`.
pub fn pullback_degree(m: &ModelVariety, k: u32) -> u64 {
    m.degree() * u64::from(k).pow(m.codim() as u32)
}

fn splitting(m: &ModelVariety, k: u32, l: i64) -> Result<SplittingType, PullbackError> {
    check_k(k)?;
    Ok(splitting_universal(m.n(), k, l))
}

fn weighted_sum(
    st: &SplittingType,
    mut query: impl FnMut(i64) -> Result<u64, VarietyError>,
) -> Result<u64, PullbackError> {
    st.multiplicities().iter().map(|(&d, &mult)| Ok(mult * query(d)?)).sum()
}

/// `h^i(O_{X'}(l)) = sum_d m_{l,d} h^i(O_X(-d))`.
pub fn pushforward_cohomology(m: &ModelVariety, k: u32, l: i64, i: usize) -> Result<u64, PullbackError> {
    let st = splitting(m, k, l)?;
    weighted_sum(&st, |d| m.table().h(i, -d))
}

/// `h^i(I_{X'}(l)) = sum_d m_{l,d} h^i(I_X(-d))`. Zero for `X = P^n`.
pub fn ideal_pushforward_cohomology(m: &ModelVariety, k: u32, l: i64, i: usize) -> Result<u64, PullbackError> {
    let st = splitting(m, k, l)?;
    weighted_sum(&st, |d| m.table().h_ideal(i, -d))
}

/// `h^i(omega_{X'}(-l)) = sum_{d} m_{l,d} h^i(omega_X(d))` for `0 <= l < k`.
pub fn dualizing_cohomology(m: &ModelVariety, k: u32, l: i64, i: usize) -> Result<u64, PullbackError> {
    check_k(k)?;
    if l < 0 || l >= i64::from(k) {
        return Err(PullbackError::DualRange { l, k });
    }
    let st = splitting(m, k, l)?;
    weighted_sum(&st, |d| m.table().h_omega(i, d))
}

/// `chi(O_{X'}(l))`.
pub fn euler_characteristic(m: &ModelVariety, k: u32, l: i64) -> Result<i64, PullbackError> {
    (0..=m.dim()).try_fold(0i64, |acc, i| {
        let h = pushforward_cohomology(m, k, l, i)? as i64;
        Ok(if i % 2 == 0 { acc + h } else { acc - h })
    })
}

/// Whether every twist `-d` needed for `O_{X'}(l)` lies in the model's table.
pub fn covers_twist(m: &ModelVariety, k: u32, l: i64) -> bool {
    let lo = lowest_twist(k, l);
    let hi = delta(m.n(), k, l).max(lo);
    m.table().covers(-lo) && m.table().covers(-hi)
}

/// Bound `s` with `h^1(I_X(d)) = 0` for every `d < s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingBound {
    /// Vanishes at every twist.
    Infinite,
    /// Vanishes below this twist (within the table range).
    Below(i64),
    /// Fails already at the bottom of the range.
    Nowhere,
    /// No ideal-sheaf data.
    Unavailable,
}

/// Window scanned on closed-form tables.
const OPEN_TABLE_WINDOW: i64 = 50;

fn ideal_h1_bound(m: &ModelVariety) -> Result<VanishingBound, PullbackError> {
    if !m.table().has_ideal() {
        return Ok(VanishingBound::Unavailable);
    }
    let (lo, hi, open) = match m.table().trange() {
        Some((a, b)) => (a, b, false),
        None => (-OPEN_TABLE_WINDOW, OPEN_TABLE_WINDOW, true),
    };
    for t in lo..=hi {
        if m.table().h_ideal(1, t)? != 0 {
            return Ok(if t == lo && open {
                VanishingBound::Nowhere
            } else {
                VanishingBound::Below(t)
            });
        }
    }
    Ok(if open {
        VanishingBound::Infinite
    } else {
        VanishingBound::Below(hi + 1)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H1Vanishing {
    pub model_bound: VanishingBound,
    /// `s k`: `h^1(I_{X'}(l)) = 0` for `l` below this.
    pub pullback_bound: Option<i64>,
    /// Twists `l` where the vanishing was recomputed numerically.
    pub checked: Option<(i64, i64)>,
    /// `h^1(I_{X'}(s k))`, when computable.
    pub value_at_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Completeness {
    /// `X'` lies in no hyperplane; holds for k > 1, witnessed only through
    /// the dimension count below.
    pub nondegenerate: bool,
    pub nondegenerate_basis: String,
    /// `h^0(O_{X'}(1))`; equals `(n+1) h^0(O_X)`.
    pub h0_ox_prime_1: u64,
    pub linearly_complete: bool,
    pub linearly_complete_basis: String,
    pub h1_vanishing: H1Vanishing,
    pub assumptions: Assumptions,
}

/// Nondegeneracy, linear completeness and `h^1` vanishing of the ideal of `X'`.
pub fn completeness_verdict(m: &ModelVariety, k: u32) -> Result<Verdict<Completeness>, PullbackError> {
    check_k(k)?;
    if k < 2 {
        return Ok(Verdict::not_applicable(K_HYPOTHESIS));
    }
    let n1 = m.n() as u64 + 1;
    let h0_ox = m.table().h(0, 0)?;
    let h0_ox_prime_1 = pushforward_cohomology(m, k, 1, 0)?;
    if h0_ox_prime_1 != n1 * h0_ox {
        return Err(PullbackError::Integrity(format!(
            "h^0(O_X'(1)) = {h0_ox_prime_1}, expected (n+1) h^0(O_X) = {}",
            n1 * h0_ox
        )));
    }
    let linearly_complete = h0_ox == 1;

    let model_bound = ideal_h1_bound(m)?;
    let k64 = i64::from(k);
    let window = |hi: i64| -> Option<(i64, i64)> {
        let range: Vec<i64> = (hi - 4 * k64..=hi).filter(|&l| covers_twist(m, k, l)).collect();
        Some((*range.first()?, *range.last()?))
    };
    let (pullback_bound, checked, value_at_bound) = match model_bound {
        VanishingBound::Infinite => (None, window(3 * k64), None),
        VanishingBound::Below(s) => {
            let sk = s * k64;
            let at = if covers_twist(m, k, sk) {
                Some(ideal_pushforward_cohomology(m, k, sk, 1)?)
            } else {
                None
            };
            (Some(sk), window(sk - 1), at)
        }
        VanishingBound::Nowhere | VanishingBound::Unavailable => (None, None, None),
    };
    if let Some((a, b)) = checked {
        for l in a..=b {
            let h = ideal_pushforward_cohomology(m, k, l, 1)?;
            if h != 0 {
                return Err(PullbackError::Integrity(format!(
                    "h^1(I_X'({l})) = {h} inside the vanishing range"
                )));
            }
        }
    }

    Ok(Verdict::Applicable(Completeness {
        nondegenerate: true,
        nondegenerate_basis: "holds for every non-automorphism; dimension witness h^0(O_X'(1)) = (n+1) h^0(O_X)".into(),
        h0_ox_prime_1,
        linearly_complete,
        linearly_complete_basis: if linearly_complete {
            "h^0(O_X) = 1, so h^0(O_X'(1)) = n+1".into()
        } else {
            format!("h^0(O_X) = {h0_ox}, so h^0(O_X'(1)) = {h0_ox_prime_1} > n+1")
        },
        h1_vanishing: H1Vanishing {
            model_bound,
            pullback_bound,
            checked,
            value_at_bound,
        },
        assumptions: Assumptions {
            k_greater_than_one: true,
            smooth_general_position: m.smooth_general_position(),
            h0_ox,
        },
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperplaneSection {
    pub linearly_complete: bool,
    /// `h^0(O_{X'})`
    pub h0_ox_prime: u64,
    /// `h^0(O_{X'}(1))`
    pub h0_ox_prime_1: u64,
    /// `h^0(O_{Y'}(1))` for `Y' = X' cut by a hyperplane`
    pub h0_oy_prime_1: u64,
    /// Dimension of the hyperplane `Y'` lives in.
    pub ambient_dim: usize,
    pub scope: String,
    pub assumptions: Assumptions,
}

/// Linear completeness of every hyperplane section meeting `X'` properly.
///
/// Since multiplication by a linear form is injective on `H^0` and `H^1` of
/// `O_{X'}`, `h^0(O_{Y'}(1)) = h^0(O_{X'}(1)) - h^0(O_{X'})`.
pub fn hyperplane_section_verdict(m: &ModelVariety, k: u32) -> Result<Verdict<HyperplaneSection>, PullbackError> {
    check_k(k)?;
    if k < 2 {
        return Ok(Verdict::not_applicable(K_HYPOTHESIS));
    }
    if m.dim() < 2 {
        return Ok(Verdict::not_applicable(format!(
            "dim X = {} but dim X >= 2 is required",
            m.dim()
        )));
    }
    if !m.smooth_general_position() {
        return Ok(Verdict::not_applicable("general position not asserted"));
    }
    let h0_ox = m.table().h(0, 0)?;
    if h0_ox != 1 {
        return Ok(Verdict::not_applicable(format!(
            "X is not connected (h^0(O_X) = {h0_ox})"
        )));
    }
    let h0_ox_prime = pushforward_cohomology(m, k, 0, 0)?;
    let h0_ox_prime_1 = pushforward_cohomology(m, k, 1, 0)?;
    let h0_oy_prime_1 = h0_ox_prime_1 - h0_ox_prime;
    Ok(Verdict::Applicable(HyperplaneSection {
        linearly_complete: h0_oy_prime_1 == m.n() as u64,
        h0_ox_prime,
        h0_ox_prime_1,
        h0_oy_prime_1,
        ambient_dim: m.n() - 1,
        scope: "every hyperplane meeting X' properly".into(),
        assumptions: Assumptions {
            k_greater_than_one: true,
            smooth_general_position: true,
            h0_ox,
        },
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectivityCheck {
    pub j: usize,
    /// `delta(n, k, 0)`: twists `-1 .. -delta` are inspected.
    pub delta0: i64,
    pub holds: bool,
    /// First `(i, d)` with `h^i(O_X(-d)) != 0`.
    pub first_failure: Option<(usize, i64)>,
    pub conclusion: String,
}

/// If `h^i(O_X(-d)) = 0` for all `i < j` and `0 < d <= delta(n, k, 0)`, then
/// multiplication by a linear form is injective on `H^i(O_{X'})` for `i < j`.
pub fn injectivity_hypothesis_check(
    m: &ModelVariety,
    k: u32,
    j: usize,
) -> Result<Verdict<InjectivityCheck>, PullbackError> {
    check_k(k)?;
    if k < 2 {
        return Ok(Verdict::not_applicable(K_HYPOTHESIS));
    }
    let delta0 = delta(m.n(), k, 0);
    let mut first_failure = None;
    'outer: for i in 0..j {
        for d in 1..=delta0 {
            if m.table().h(i, -d)? != 0 {
                first_failure = Some((i, d));
                break 'outer;
            }
        }
    }
    let holds = first_failure.is_none();
    Ok(Verdict::Applicable(InjectivityCheck {
        j,
        delta0,
        holds,
        first_failure,
        conclusion: if holds {
            format!("H^i of multiplication by a linear form on O_X' is injective for i < {j}")
        } else {
            "hypothesis fails; no conclusion".into()
        },
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyEntry {
    pub l: i64,
    pub i: usize,
    pub h: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerEntry {
    pub l: i64,
    pub chi: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub report_version: u32,
    pub model: ModelSummary,
    pub n: usize,
    pub k: u32,
    pub degree: u64,
    pub lrange: (i64, i64),
    /// `h^i(O_{X'}(l))`
    pub cohomology: Vec<CohomologyEntry>,
    pub euler: Vec<EulerEntry>,
    /// `h^i(I_{X'}(l))`, when the model has ideal data.
    pub ideal: Option<Vec<CohomologyEntry>>,
    /// `h^i(omega_{X'}(-l))` for `0 <= l < k`, when the model has dualizing data.
    pub dualizing: Option<Vec<CohomologyEntry>>,
    pub completeness: Verdict<Completeness>,
    pub hyperplane_section: Verdict<HyperplaneSection>,
    /// With `j = dim X`.
    pub injectivity: Verdict<InjectivityCheck>,
}

impl PullbackReport {
    /// `false` only when an applicable verdict came out negative.
    pub fn all_verdicts_positive(&self) -> bool {
        self.completeness.applicable().is_none_or(|c| c.linearly_complete)
            && self.hyperplane_section.applicable().is_none_or(|h| h.linearly_complete)
    }
}

/// Default `l` range `[-k, 3k]`.
pub fn default_lrange(k: u32) -> RangeInclusive<i64> {
    let k = i64::from(k);
    -k..=3 * k
}

/// Full report for `X'` over an `l` range.
pub fn pullback_report(m: &ModelVariety, k: u32, lrange: RangeInclusive<i64>) -> Result<PullbackReport, PullbackError> {
    check_k(k)?;
    let dim = m.dim();
    let k64 = i64::from(k);
    let mut cohomology = Vec::new();
    let mut euler = Vec::new();
    for l in lrange.clone() {
        // Recompute through the shift law m_{l,d} = m_{l mod k, d + floor(l/k)}.
        let base = splitting_universal(m.n(), k, l.rem_euclid(k64));
        let shift = l.div_euclid(k64);
        let mut chi = 0i64;
        for i in 0..=dim {
            let h = pushforward_cohomology(m, k, l, i)?;
            let again = weighted_sum(&base, |d| m.table().h(i, shift - d))?;
            if h != again {
                return Err(PullbackError::Integrity(format!(
                    "h^{i}(O_X'({l})) = {h} but the shifted splitting gives {again}"
                )));
            }
            chi += if i % 2 == 0 { h as i64 } else { -(h as i64) };
            cohomology.push(CohomologyEntry { l, i, h });
        }
        euler.push(EulerEntry { l, chi });
    }
    let ideal = if m.table().has_ideal() {
        let mut rows = Vec::new();
        for l in lrange.clone() {
            for i in 0..=m.n() {
                rows.push(CohomologyEntry {
                    l,
                    i,
                    h: ideal_pushforward_cohomology(m, k, l, i)?,
                });
            }
        }
        Some(rows)
    } else {
        None
    };
    let dualizing = if m.table().has_dualizing() {
        let mut rows = Vec::new();
        for l in 0..k64 {
            for i in 0..=dim {
                rows.push(CohomologyEntry {
                    l,
                    i,
                    h: dualizing_cohomology(m, k, l, i)?,
                });
            }
        }
        Some(rows)
    } else {
        None
    };
    Ok(PullbackReport {
        report_version: REPORT_VERSION,
        model: m.summary(),
        n: m.n(),
        k,
        degree: pullback_degree(m, k),
        lrange: (*lrange.start(), *lrange.end()),
        cohomology,
        euler,
        ideal,
        dualizing,
        completeness: completeness_verdict(m, k)?,
        hyperplane_section: hyperplane_section_verdict(m, k)?,
        injectivity: injectivity_hypothesis_check(m, k, dim)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci22() -> ModelVariety {
        ModelVariety::complete_intersection(4, &[2, 2]).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(pullback_degree(&ci22(), 2), 16);
        assert_eq!(pullback_degree(&ModelVariety::projective_space(3).unwrap(), 5), 1);
        let cubic = ModelVariety::complete_intersection(2, &[3]).unwrap();
        assert_eq!(pullback_degree(&cubic, 2), 6);
    }

    #[test]
    fn worked_cohomology_values() {
        let m = ci22();
        assert_eq!(pushforward_cohomology(&m, 2, 0, 2).unwrap(), 35);
        assert_eq!(pushforward_cohomology(&m, 2, 0, 1).unwrap(), 0);
        assert_eq!(pushforward_cohomology(&m, 2, 1, 0).unwrap(), 5);
        assert_eq!(euler_characteristic(&m, 2, 0).unwrap(), 36);
        let p4 = ModelVariety::projective_space(4).unwrap();
        assert_eq!(euler_characteristic(&p4, 2, 0).unwrap(), 1);
    }

    #[test]
    fn dualizing_values() {
        let m = ci22();
        assert_eq!(dualizing_cohomology(&m, 2, 1, 0).unwrap(), 15);
        assert_eq!(dualizing_cohomology(&m, 2, 0, 0).unwrap(), 35);
        assert_eq!(
            dualizing_cohomology(&m, 2, 2, 0),
            Err(PullbackError::DualRange { l: 2, k: 2 })
        );
    }

    #[test]
    fn ideal_cohomology_of_ci_and_ambient() {
        let m = ci22();
        let p4 = ModelVariety::projective_space(4).unwrap();
        for l in -4..8 {
            assert_eq!(ideal_pushforward_cohomology(&m, 2, l, 1).unwrap(), 0);
            for i in 0..=4 {
                assert_eq!(ideal_pushforward_cohomology(&p4, 2, l, i).unwrap(), 0);
            }
        }
    }

    #[test]
    fn completeness_on_ci() {
        let v = completeness_verdict(&ci22(), 2).unwrap();
        let c = v.applicable().unwrap();
        assert!(c.nondegenerate && c.linearly_complete);
        assert_eq!(c.h0_ox_prime_1, 5);
        assert_eq!(c.h1_vanishing.model_bound, VanishingBound::Infinite);
        assert!(matches!(
            completeness_verdict(&ci22(), 1).unwrap(),
            Verdict::NotApplicable { .. }
        ));
    }

    #[test]
    fn hyperplane_section_on_ci() {
        let v = hyperplane_section_verdict(&ci22(), 2).unwrap();
        let h = v.applicable().unwrap();
        assert_eq!(h.h0_oy_prime_1, 4);
        assert!(h.linearly_complete);
        let curve = ModelVariety::complete_intersection(2, &[3]).unwrap();
        assert!(hyperplane_section_verdict(&curve, 2).unwrap().applicable().is_none());
        let unset = ci22().with_general_position(false);
        assert_eq!(
            hyperplane_section_verdict(&unset, 2).unwrap(),
            Verdict::not_applicable("general position not asserted")
        );
    }

    #[test]
    fn injectivity_on_standard_models() {
        let v = injectivity_hypothesis_check(&ci22(), 2, 2).unwrap();
        assert!(v.applicable().unwrap().holds);
        let p4 = ModelVariety::projective_space(4).unwrap();
        let v = injectivity_hypothesis_check(&p4, 2, 4).unwrap();
        assert!(v.applicable().unwrap().holds);
        assert_eq!(v.applicable().unwrap().delta0, 2);
    }

    #[test]
    fn report_on_k1_keeps_tables() {
        let r = pullback_report(&ci22(), 1, default_lrange(1)).unwrap();
        assert!(matches!(r.completeness, Verdict::NotApplicable { .. }));
        assert!(matches!(r.hyperplane_section, Verdict::NotApplicable { .. }));
        assert_eq!(r.cohomology.len(), 5 * 3);
        assert_eq!(r.degree, 4);
    }
}
