//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's own counting code.
#![allow(dead_code)]

use std::collections::BTreeMap;

pub fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// `C(a, b)` by the multiplicative formula, 0 outside `0 <= b <= a`.
pub fn choose(a: i64, b: i64) -> u128 {
    if b < 0 || a < b || a < 0 {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for j in 0..b {
        acc = acc * (a - j) as u128 / (j + 1) as u128;
    }
    acc
}

/// Number of monomials of degree `t` in `v` variables.
pub fn monomials(v: usize, t: i64) -> u128 {
    if t < 0 {
        0
    } else {
        choose(t + v as i64 - 1, v as i64 - 1)
    }
}

/// Splitting type recovered from the Hilbert function alone: with
/// `g(e) = dim S_{l+ke}` and `g(e) = sum_d m_d dim S_{e-d}`, the
/// `(n+1)`-st finite difference of `g` is `m`.
pub fn splitting_by_differences(n: usize, k: u32, l: i64) -> BTreeMap<i64, u64> {
    let v = n + 1;
    let g = |e: i64| monomials(v, l + i64::from(k) * e) as i128;
    let mut out = BTreeMap::new();
    // d ranges over a window wide enough to contain every nonzero term.
    for d in (-l.abs() - 2)..=(n as i64 + 2 + l.abs()) {
        let mut m: i128 = 0;
        for j in 0..=v as i64 {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            m += sign * choose(v as i64, j) as i128 * g(d - j);
        }
        assert!(m >= 0, "negative multiplicity from differences");
        if m > 0 {
            out.insert(d, m as u64);
        }
    }
    out
}

/// Brute-force count of exponent vectors `a` in `{0..k-1}^{n+1}` with
/// `|a| = l + kd`.
pub fn splitting_by_enumeration(n: usize, k: u32, l: i64) -> BTreeMap<i64, u64> {
    let v = n + 1;
    let k = i64::from(k);
    let mut out = BTreeMap::new();
    let mut a = vec![0i64; v];
    loop {
        let s: i64 = a.iter().sum();
        if (s - l).rem_euclid(k) == 0 {
            *out.entry((s - l).div_euclid(k)).or_insert(0) += 1;
        }
        let mut i = 0;
        loop {
            if i == v {
                return out;
            }
            a[i] += 1;
            if a[i] < k {
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

/// Cohomology of a smooth complete intersection of the given degrees in P^n,
/// from the Koszul resolution and Serre duality.
pub fn koszul_h(n: usize, degrees: &[u32], i: usize, t: i64) -> u64 {
    let v = n + 1;
    let dim = n - degrees.len();
    let quotient = |t: i64| -> u64 {
        let mut acc: i128 = 0;
        for mask in 0u32..(1 << degrees.len()) {
            let shift: i64 = degrees
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, &d)| i64::from(d))
                .sum();
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            acc += sign * monomials(v, t - shift) as i128;
        }
        acc as u64
    };
    if dim == 0 {
        return if i == 0 {
            degrees.iter().map(|&d| u64::from(d)).product()
        } else {
            0
        };
    }
    let e: i64 = degrees.iter().map(|&d| i64::from(d)).sum::<i64>() - v as i64;
    if i == 0 {
        quotient(t)
    } else if i == dim {
        quotient(e - t)
    } else {
        0
    }
}

/// The complete intersection of the `k`-th powers: `CI(k d_1, ..)`.
pub fn scaled(degrees: &[u32], k: u32) -> Vec<u32> {
    degrees.iter().map(|d| d * k).collect()
}
