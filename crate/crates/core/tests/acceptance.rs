//! Acceptance suite: one PASS/FAIL line per criterion, exact integer checks.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::process::Command;
use std::time::Instant;

use common::*;
use pushsplit_core::adjunction::{delta_l_bound_check, surface_adjunction};
use pushsplit_core::endomorphism::Endomorphism;
use pushsplit_core::exactla::RankMode;
use pushsplit_core::pullback::{
    completeness_verdict, dualizing_cohomology, hyperplane_section_verdict, pushforward_cohomology,
};
use pushsplit_core::splitting::{delta, hilbert_check, splitting_from_endo, splitting_universal};
use pushsplit_core::varieties::{load_custom_table, ModelVariety};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], ok: String) -> Outcome {
    match failures.first() {
        None => Outcome { pass: true, detail: ok },
        Some(first) => Outcome {
            pass: false,
            detail: format!("{} failure(s), first: {first}", failures.len()),
        },
    }
}

fn support_law() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 1..=4usize {
        for k in 2..=3u32 {
            for l in -6..=8i64 {
                cases += 1;
                let st = splitting_universal(n, k, l);
                let want = (-l.div_euclid(i64::from(k)), delta(n, k, l));
                if st.support() != Some(want) || !st.support_is_interval() {
                    failures.push(format!("({n},{k},{l}) support {:?}, want {want:?}", st.support()));
                }
                if st.rank_sum() != u64::from(k).pow(n as u32) {
                    failures.push(format!("({n},{k},{l}) rank {}", st.rank_sum()));
                }
                if !hilbert_check(&st, 10).passed {
                    failures.push(format!("({n},{k},{l}) Hilbert identity"));
                }
                if st.multiplicities() != &splitting_by_enumeration(n, k, l) {
                    failures.push(format!("({n},{k},{l}) differs from enumeration"));
                }
            }
        }
    }
    outcome(&failures, format!("{cases} cases"))
}

fn dual_route() -> Outcome {
    let mode = RankMode::default();
    let mut failures = Vec::new();
    let mut cases: Vec<(usize, u32, i64)> = Vec::new();
    for n in 1..=3 {
        for l in -2..=4 {
            cases.push((n, 2, l));
        }
    }
    cases.extend([(4, 2, 0), (4, 2, 1), (4, 2, 2), (4, 3, 0)]);
    for &(n, k, l) in &cases {
        let e = Endomorphism::power_map(n, k);
        match splitting_from_endo(&e, l, &mode) {
            Ok(st) if st == splitting_universal(n, k, l) => {}
            Ok(st) => failures.push(format!("power map ({n},{k},{l}) gave {st}")),
            Err(err) => failures.push(format!("power map ({n},{k},{l}): {err}")),
        }
    }
    let mut random = 0;
    for seed in 0..6u64 {
        let e = match Endomorphism::random(2, 2, seed, 3, 50, &mode) {
            Ok(e) => e,
            Err(err) => {
                failures.push(format!("random seed {seed}: {err}"));
                continue;
            }
        };
        if e.forms() == Endomorphism::power_map(2, 2).forms() {
            failures.push(format!("random seed {seed} is the power map"));
        }
        for l in 0..=1 {
            match splitting_from_endo(&e, l, &mode) {
                Ok(_) => {}
                Err(err) => failures.push(format!("random seed {seed}, l = {l}: {err}")),
            }
        }
        random += 1;
    }
    outcome(
        &failures,
        format!(
            "{} power-map cases, {random} random endomorphisms at (2,2)",
            cases.len()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let models: [(usize, &[u32]); 5] = [(2, &[2]), (3, &[2]), (2, &[3]), (4, &[2, 2]), (4, &[2, 3])];
    let mut failures = Vec::new();
    let mut entries = 0;
    for (n, degrees) in models {
        let m = ModelVariety::complete_intersection(n, degrees).unwrap();
        let big = scaled(degrees, 2);
        for l in -6..=8 {
            for i in 0..=m.dim() {
                entries += 1;
                let got = pushforward_cohomology(&m, 2, l, i).unwrap();
                let want = koszul_h(n, &big, i, l);
                if got != want {
                    failures.push(format!("CI{degrees:?}@{n} h^{i}({l}) = {got}, oracle {want}"));
                }
            }
        }
    }
    let worked = ModelVariety::complete_intersection(4, &[2, 2]).unwrap();
    let h2 = pushforward_cohomology(&worked, 2, 0, 2).unwrap();
    if h2 != 35 {
        failures.push(format!("h^2(O_X') = {h2}, expected 35"));
    }
    outcome(&failures, format!("{entries} entries, h^2(O_X') = {h2}"))
}

fn completeness() -> Outcome {
    let models: [(usize, &[u32]); 5] = [(2, &[2]), (3, &[2]), (2, &[3]), (4, &[2, 2]), (4, &[2, 3])];
    let mut failures = Vec::new();
    for (n, degrees) in models {
        let m = ModelVariety::complete_intersection(n, degrees).unwrap();
        for k in 2..=3 {
            let v = completeness_verdict(&m, k).unwrap();
            match v.applicable() {
                Some(c) if c.linearly_complete && c.h0_ox_prime_1 == n as u64 + 1 => {}
                _ => failures.push(format!("CI{degrees:?}@{n}, k = {k}: {v:?}")),
            }
            for i in 0..m.dim() {
                let a = pushforward_cohomology(&m, k, 0, i).unwrap();
                let b = m.table().h(i, 0).unwrap();
                if a != b {
                    failures.push(format!("CI{degrees:?}@{n}, k = {k}: h^{i} {a} vs {b}"));
                }
            }
        }
    }
    let two = load_custom_table(fixture("two_lines_p3.table")).unwrap();
    let v = completeness_verdict(&two, 2).unwrap();
    let witness = v.applicable().map(|c| (c.linearly_complete, c.h0_ox_prime_1));
    if witness != Some((false, 2 * 4)) {
        failures.push(format!("two lines: {witness:?}"));
    }
    outcome(&failures, "10 CI cases, two lines give h^0(O_X'(1)) = 8".into())
}

fn hyperplane_section() -> Outcome {
    let m = ModelVariety::complete_intersection(4, &[2, 2]).unwrap();
    let v = hyperplane_section_verdict(&m, 2).unwrap();
    let oracle = koszul_h(3, &[4, 4], 0, 1);
    let got = v.applicable().map(|h| (h.linearly_complete, h.h0_oy_prime_1));
    let failures = if got == Some((true, 4)) && oracle == 4 {
        vec![]
    } else {
        vec![format!("{got:?}, oracle {oracle}")]
    };
    outcome(&failures, format!("h^0(O_Y'(1)) = 4, oracle {oracle}"))
}

fn dualizing_numbers() -> Outcome {
    let mut failures = Vec::new();
    let m = ModelVariety::complete_intersection(4, &[2, 2]).unwrap();
    let minus1 = dualizing_cohomology(&m, 2, 1, 0).unwrap();
    let zero = dualizing_cohomology(&m, 2, 0, 0).unwrap();
    // omega of CI(4,4) is O(3)
    let oracle = (koszul_h(4, &[4, 4], 0, 2), koszul_h(4, &[4, 4], 0, 3));
    if (minus1, zero) != (15, 35) || oracle != (15, 35) {
        failures.push(format!(
            "h^0(omega(-1)), h^0(omega) = {minus1}, {zero}; oracle {oracle:?}"
        ));
    }
    for n in 1..=6 {
        for k in 2..=5 {
            let check = delta_l_bound_check(n, k).unwrap();
            for &l in &check.failures {
                failures.push(format!("0 < delta({n},{k},{l}) = {} fails", delta(n, k, l)));
            }
        }
    }
    outcome(&failures, "15 and 35 match; delta bounds hold".into())
}

fn surface_adjunction_check() -> Outcome {
    let mut failures = Vec::new();
    let plane = ModelVariety::plane_in_p4();
    for k in 2..=3 {
        let s = surface_adjunction(&plane, k).unwrap();
        let flagged = k == 2;
        if s.del_pezzo_exception != flagged || s.canonical_very_ample == flagged {
            failures.push(format!("plane, k = {k}: {s:?}"));
        }
        if flagged && (s.e_prime, s.degree_prime) != (-1, 4) {
            failures.push(format!("plane, k = 2: e' = {}, degree {}", s.e_prime, s.degree_prime));
        }
    }
    let mut cases = 0;
    for a in 1..=3u32 {
        for b in a..=3u32 {
            let m = ModelVariety::complete_intersection(4, &[a, b]).unwrap();
            for k in 2..=3u32 {
                cases += 1;
                let s = surface_adjunction(&m, k).unwrap();
                let oracle = i64::from(k * (a + b)) - 5;
                let linear = a == 1 && b == 1;
                if s.e_prime != oracle {
                    failures.push(format!("CI({a},{b}), k = {k}: e' = {}, oracle {oracle}", s.e_prime));
                }
                if s.del_pezzo_exception != (linear && k == 2) || s.canonical_very_ample == (linear && k == 2) {
                    failures.push(format!(
                        "CI({a},{b}), k = {k}: exception flag {}",
                        s.del_pezzo_exception
                    ));
                }
            }
        }
    }
    outcome(
        &failures,
        format!("plane flagged at k = 2 only, {cases} CI cases match k(a+b)-5"),
    )
}

fn determinism() -> Outcome {
    let args = ["split", "--n", "4", "--k", "3", "--l", "0", "--json"];
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_pushsplit"))
            .args(args)
            .env_remove("PUSHSPLIT_PRIMES")
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let failures = if a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout {
        vec![]
    } else {
        vec![format!(
            "exit {:?}/{:?}, identical = {}",
            a.status.code(),
            b.status.code(),
            a.stdout == b.stdout
        )]
    };
    outcome(&failures, format!("{} identical bytes", a.stdout.len()))
}

/// Criteria that cannot hold as stated, with the expected failure text.
///
/// Criterion 6 asks for `0 < delta(n, k, l)` at every `0 <= l < k`, but for
/// `n = 1` and `l = k-1`, `delta = 2 + floor(-(k+1)/k) = 0`: the pushforward
/// `pi_* O(k-1)` on P^1 is `O^k`. The numeric part of the criterion holds.
const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[(6, "4 failure(s), first: 0 < delta(1,2,1) = 0 fails")];

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("support law, rank and Hilbert identity", support_law),
        ("closed form equals multiplication-map route", dual_route),
        ("pushforward cohomology equals Koszul tables", oracle_equivalence),
        ("linear completeness and low cohomology", completeness),
        ("hyperplane section is linearly complete", hyperplane_section),
        ("dualizing numbers and delta bounds", dualizing_numbers),
        ("surface adjunction and Del Pezzo exception", surface_adjunction_check),
        ("split output is byte-identical across runs", determinism),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let number = idx + 1;
        let start = Instant::now();
        let o = check();
        let ms = start.elapsed().as_millis();
        println!(
            "criterion {number}: {} {name} ({}; {ms} ms)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if o.pass {
            passed += 1;
        }
        let known = KNOWN_UNATTAINABLE.iter().find(|(n, _)| *n == number);
        match (o.pass, known) {
            (true, None) => {}
            (false, Some((_, text))) if o.detail == *text => {}
            _ => unexpected.push(number),
        }
    }
    println!("acceptance: {passed}/8 criteria pass");
    assert!(unexpected.is_empty(), "unexpected outcome for criteria {unexpected:?}");
}
