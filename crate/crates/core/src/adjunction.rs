//! Canonical bundles of inverse images: bounds on the dualizing decomposition,
//! adjunction for surfaces in P^4 and the canonical-map verdicts.

use serde::Serialize;
use thiserror::Error;

use crate::pullback::{
    dualizing_cohomology, pullback_degree, pushforward_cohomology, Assumptions, PullbackError, Verdict, K_HYPOTHESIS,
    REPORT_VERSION,
};
use crate::splitting::delta;
use crate::varieties::{ModelSummary, ModelVariety};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdjunctionError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("integrity failure: {0}")]
    Integrity(String),
    #[error(transparent)]
    Pullback(#[from] PullbackError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeltaEntry {
    pub l: i64,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaBoundCheck {
    pub n: usize,
    pub k: u32,
    pub deltas: Vec<DeltaEntry>,
    /// `0 < delta_l < n+1` for every `0 <= l < k`.
    pub passed: bool,
    /// Values of `l` breaking the bound. For `n = 1` the last residue
    /// `l = k-1` gives `delta = 0`.
    pub failures: Vec<i64>,
}

/// Check `0 < delta(n, k, l) < n+1` for `0 <= l < k`.
pub fn delta_l_bound_check(n: usize, k: u32) -> Result<DeltaBoundCheck, AdjunctionError> {
    if n == 0 || k < 2 {
        return Err(AdjunctionError::Precondition(format!(
            "need n >= 1 and k >= 2 (n = {n}, k = {k})"
        )));
    }
    let deltas: Vec<DeltaEntry> = (0..i64::from(k))
        .map(|l| DeltaEntry {
            l,
            delta: delta(n, k, l),
        })
        .collect();
    let failures: Vec<i64> = deltas
        .iter()
        .filter(|e| !(0 < e.delta && e.delta < n as i64 + 1))
        .map(|e| e.l)
        .collect();
    Ok(DeltaBoundCheck {
        n,
        k,
        deltas,
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// `e' < 0`
    DelPezzo,
    /// `e' = 0`
    TrivialCanonical,
    /// `e' > 0`
    GeneralType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceAdjunction {
    /// `omega_S = O_S(e)`
    pub e: i64,
    /// `omega_{S'} = O_{S'}(e')`, `e' = k e + 5k - 5`
    pub e_prime: i64,
    pub degree_prime: u64,
    /// `K . H'`
    pub k_dot_h: i64,
    /// `K^2`
    pub k_squared: i64,
    pub sectional_genus: i64,
    pub kind: SurfaceKind,
    pub canonical_very_ample: bool,
    pub del_pezzo_exception: bool,
    pub assumptions: Assumptions,
}

fn surface_preconditions(m: &ModelVariety, k: u32) -> Result<i64, AdjunctionError> {
    if m.n() != 4 || m.dim() != 2 {
        return Err(AdjunctionError::Precondition(format!(
            "a surface in P^4 is required (n = {}, dim = {})",
            m.n(),
            m.dim()
        )));
    }
    if k < 2 {
        return Err(AdjunctionError::Precondition(K_HYPOTHESIS.into()));
    }
    if !m.smooth_general_position() {
        return Err(AdjunctionError::Precondition("general position not asserted".into()));
    }
    m.omega_twist()
        .ok_or_else(|| AdjunctionError::Precondition("the surface is not known to be subcanonical".into()))
}

/// Canonical bundle of `S' = pi^{-1}(S)` for a subcanonical surface `S` in P^4.
///
/// `omega_{S'} = pi^*(omega_S(3)) (2k-5)`, so `e' = k(e+3) + 2k - 5`. The
/// canonical bundle is very ample unless `S` is a plane and `k = 2`, in which
/// case `S'` is a quartic Del Pezzo surface.
pub fn surface_adjunction(m: &ModelVariety, k: u32) -> Result<SurfaceAdjunction, AdjunctionError> {
    let e = surface_preconditions(m, k)?;
    let k64 = i64::from(k);
    let e_prime = k64 * e + 5 * k64 - 5;
    let degree_prime = pullback_degree(m, k);
    let d = degree_prime as i64;
    let k_dot_h = e_prime * d;
    let k_squared = e_prime * e_prime * d;
    // 2g - 2 = (K + H') . H'
    let twice = (e_prime + 1) * d;
    if twice % 2 != 0 {
        return Err(AdjunctionError::Integrity(format!("(K + H').H' = {twice} is odd")));
    }
    let sectional_genus = twice / 2 + 1;
    if 2 * sectional_genus - 2 != k_dot_h + d {
        return Err(AdjunctionError::Integrity("sectional genus inconsistent".into()));
    }
    let del_pezzo_exception = m.is_linear_pm() && k == 2;
    let kind = match e_prime.signum() {
        -1 => SurfaceKind::DelPezzo,
        0 => SurfaceKind::TrivialCanonical,
        _ => SurfaceKind::GeneralType,
    };
    if del_pezzo_exception != (kind == SurfaceKind::DelPezzo) {
        return Err(AdjunctionError::Integrity(format!(
            "e' = {e_prime} disagrees with the exceptional-case flag"
        )));
    }
    Ok(SurfaceAdjunction {
        e,
        e_prime,
        degree_prime,
        k_dot_h,
        k_squared,
        sectional_genus,
        kind,
        canonical_very_ample: !del_pezzo_exception,
        del_pezzo_exception,
        assumptions: Assumptions {
            k_greater_than_one: true,
            smooth_general_position: true,
            h0_ox: m.table().h(0, 0).map_err(PullbackError::from)?,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalBirational {
    /// `delta(n, k, 1)`
    pub delta1: i64,
    pub dim: usize,
    /// `h^0(omega_{X'}(-1))`, the witness.
    pub h0_omega_prime_minus_1: u64,
    pub conclusion: String,
    pub assumptions: Assumptions,
}

/// When `delta_1 >= dim X` and `X` is not a linearly embedded `P^m`,
/// `omega_{X'}(-1)` has a section and the canonical map of `X'` is birational.
pub fn canonical_birationality_verdict(
    m: &ModelVariety,
    k: u32,
) -> Result<Verdict<CanonicalBirational>, AdjunctionError> {
    if k < 2 {
        return Ok(Verdict::not_applicable(K_HYPOTHESIS));
    }
    if !m.table().has_dualizing() {
        return Ok(Verdict::not_applicable("no dualizing data for the model"));
    }
    if !m.smooth_general_position() {
        return Ok(Verdict::not_applicable("general position not asserted"));
    }
    if m.is_linear_pm() {
        return Ok(Verdict::not_applicable(
            "X is a linearly embedded P^m, where omega_X(dim X) has no sections",
        ));
    }
    let delta1 = delta(m.n(), k, 1);
    if delta1 < m.dim() as i64 {
        return Ok(Verdict::not_applicable(format!(
            "delta(n, k, 1) = {delta1} < dim X = {}",
            m.dim()
        )));
    }
    let h = dualizing_cohomology(m, k, 1, 0)?;
    if h == 0 {
        return Err(AdjunctionError::Integrity(format!(
            "h^0(omega_X'(-1)) = 0 although delta_1 = {delta1} >= dim X"
        )));
    }
    Ok(Verdict::Applicable(CanonicalBirational {
        delta1,
        dim: m.dim(),
        h0_omega_prime_minus_1: h,
        conclusion: "canonical map of X' is birational".into(),
        assumptions: Assumptions {
            k_greater_than_one: true,
            smooth_general_position: true,
            h0_ox: m.table().h(0, 0).map_err(PullbackError::from)?,
        },
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalSystem {
    pub delta0: i64,
    /// `h^0(omega_{X'})`
    pub h0_omega_prime: u64,
    /// `h^0(omega_X(delta_0))`
    pub h0_omega_delta0: u64,
    /// The canonical map of `X'` is `pi` followed by the `delta_0`-adjoint
    /// map of `X` and a linear projection; only the dimension inequality is
    /// checked.
    pub factorization: String,
}

pub fn canonical_system_dimensions(m: &ModelVariety, k: u32) -> Result<CanonicalSystem, AdjunctionError> {
    if k == 0 {
        return Err(AdjunctionError::Pullback(PullbackError::ZeroDegree));
    }
    if !m.table().has_dualizing() {
        return Err(AdjunctionError::Precondition("no dualizing data for the model".into()));
    }
    let delta0 = delta(m.n(), k, 0);
    let h0_omega_prime = dualizing_cohomology(m, k, 0, 0)?;
    let h0_omega_delta0 = m.table().h_omega(0, delta0).map_err(PullbackError::from)?;
    if h0_omega_prime < h0_omega_delta0 {
        return Err(AdjunctionError::Integrity(format!(
            "h^0(omega_X') = {h0_omega_prime} < h^0(omega_X({delta0})) = {h0_omega_delta0}"
        )));
    }
    Ok(CanonicalSystem {
        delta0,
        h0_omega_prime,
        h0_omega_delta0,
        factorization: format!(
            "P(H^0(omega_X')) projects onto P(H^0(omega_X({delta0}))): {h0_omega_prime} >= {h0_omega_delta0}"
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjunctionReport {
    pub report_version: u32,
    pub model: ModelSummary,
    pub n: usize,
    pub k: u32,
    pub deltas: Vec<DeltaEntry>,
    pub surface: SurfaceAdjunction,
    /// `h^0(omega_{X'})`
    pub h0_omega_prime: u64,
    /// `h^0(omega_{X'}(-1))`
    pub h0_omega_prime_minus_1: u64,
    pub canonical_system: CanonicalSystem,
    pub canonical_birational: Verdict<CanonicalBirational>,
}

/// Full report for a surface in P^4. Cross-checks `omega_{S'} = O_{S'}(e')`
/// against the dualizing decomposition.
pub fn adjunction_report(m: &ModelVariety, k: u32) -> Result<AdjunctionReport, AdjunctionError> {
    let surface = surface_adjunction(m, k)?;
    let deltas = delta_l_bound_check(m.n(), k)?;
    if !deltas.passed {
        return Err(AdjunctionError::Integrity("delta_l outside (0, n+1)".into()));
    }
    let h0_omega_prime = dualizing_cohomology(m, k, 0, 0)?;
    let h0_omega_prime_minus_1 = dualizing_cohomology(m, k, 1, 0)?;
    let direct = pushforward_cohomology(m, k, surface.e_prime, 0)?;
    let direct_minus_1 = pushforward_cohomology(m, k, surface.e_prime - 1, 0)?;
    if (direct, direct_minus_1) != (h0_omega_prime, h0_omega_prime_minus_1) {
        return Err(AdjunctionError::Integrity(format!(
            "h^0(O_S'({e})) = {direct}, h^0(O_S'({e1})) = {direct_minus_1} but the dualizing sums give {h0_omega_prime}, {h0_omega_prime_minus_1}",
            e = surface.e_prime,
            e1 = surface.e_prime - 1,
        )));
    }
    Ok(AdjunctionReport {
        report_version: REPORT_VERSION,
        model: m.summary(),
        n: m.n(),
        k,
        deltas: deltas.deltas,
        surface,
        h0_omega_prime,
        h0_omega_prime_minus_1,
        canonical_system: canonical_system_dimensions(m, k)?,
        canonical_birational: canonical_birationality_verdict(m, k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::CustomTable;

    #[test]
    fn delta_bounds() {
        let d = |n, k| -> Vec<i64> {
            delta_l_bound_check(n, k)
                .unwrap()
                .deltas
                .iter()
                .map(|e| e.delta)
                .collect()
        };
        assert_eq!(d(4, 2), vec![2, 2]);
        assert_eq!(d(1, 2), vec![1, 0]);
        assert_eq!(delta_l_bound_check(1, 2).unwrap().failures, vec![1]);
        assert!(delta_l_bound_check(4, 2).unwrap().passed);
        assert_eq!(d(3, 3), vec![2, 2, 2]);
        assert!(delta_l_bound_check(3, 1).is_err());
    }

    #[test]
    fn plane_k2_is_del_pezzo() {
        let s = surface_adjunction(&ModelVariety::plane_in_p4(), 2).unwrap();
        assert_eq!((s.e_prime, s.degree_prime), (-1, 4));
        assert!(s.del_pezzo_exception && !s.canonical_very_ample);
        assert_eq!(s.sectional_genus, 1);
    }

    #[test]
    fn ci22_k2() {
        let m = ModelVariety::complete_intersection(4, &[2, 2]).unwrap();
        let s = surface_adjunction(&m, 2).unwrap();
        assert_eq!(
            (s.e_prime, s.degree_prime, s.k_squared, s.sectional_genus),
            (3, 16, 144, 33)
        );
        assert!(s.canonical_very_ample);
        let r = adjunction_report(&m, 2).unwrap();
        assert_eq!((r.h0_omega_prime, r.h0_omega_prime_minus_1), (35, 15));
        let c = r.canonical_birational.applicable().unwrap();
        assert_eq!(c.h0_omega_prime_minus_1, 15);
        assert_eq!(r.canonical_system.h0_omega_delta0, 5);
    }

    #[test]
    fn plane_k3_general_type() {
        let r = adjunction_report(&ModelVariety::plane_in_p4(), 3).unwrap();
        assert_eq!(r.surface.e_prime, 1);
        assert_eq!(r.surface.kind, SurfaceKind::GeneralType);
        assert!(r.surface.canonical_very_ample);
        assert_eq!(r.canonical_system.h0_omega_prime, 5);
        assert_eq!(r.canonical_system.h0_omega_delta0, 1);
        assert!(matches!(r.canonical_birational, Verdict::NotApplicable { .. }));
    }

    #[test]
    fn preconditions() {
        let threefold = ModelVariety::complete_intersection(4, &[3]).unwrap();
        assert!(matches!(
            surface_adjunction(&threefold, 2),
            Err(AdjunctionError::Precondition(_))
        ));
        let m = ModelVariety::complete_intersection(4, &[2, 2]).unwrap();
        assert!(matches!(
            surface_adjunction(&m, 1),
            Err(AdjunctionError::Precondition(_))
        ));
    }

    #[test]
    fn projective_space_canonical_system_is_empty() {
        let p4 = ModelVariety::projective_space(4).unwrap();
        let c = canonical_system_dimensions(&p4, 2).unwrap();
        assert_eq!((c.h0_omega_prime, c.h0_omega_delta0), (0, 0));
    }

    #[test]
    fn vanishing_witness_is_an_integrity_error() {
        let mut text = String::from("n = 4\ndim = 2\ndegree = 1\nomega_twist = none\nsmooth = true\ntrange = -4..4\n");
        for i in 0..=2 {
            for t in -4..=4 {
                text.push_str(&format!("h {i} {t} {}\n", u64::from(i == 0 && t >= 0)));
                text.push_str(&format!("hw {i} {t} 0\n"));
            }
        }
        let m = ModelVariety::from_table(CustomTable::parse(&text, "inline").unwrap());
        assert!(matches!(
            canonical_birationality_verdict(&m, 2),
            Err(AdjunctionError::Integrity(_))
        ));
    }
}
