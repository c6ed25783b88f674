//! Model varieties `X` in P^n with exact cohomology of `O_X(t)`, `I_X(t)` and
//! `omega_X(t)`.
//!
//! Complete intersections (and P^n itself, the case with no equations) are
//! answered in closed form from the Koszul complex and Serre duality. Any
//! other variety enters through a [`CustomTable`] read from a text file;
//! tables answer only inside their declared twist range.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::polyring::graded_dim;

const PLANE_P4: &str = include_str!("../fixtures/plane_p4.table");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("{sheaf} table has no entry for i = {i}, t = {t} (declared range {lo}..{hi})")]
    Range {
        sheaf: &'static str,
        i: usize,
        t: i64,
        lo: i64,
        hi: i64,
    },
    #[error("{0} cohomology is not available for this model")]
    Unavailable(&'static str),
    #[error("{origin}, line {line}: {message}")]
    Load {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Koszul data for a complete intersection; no degrees means all of P^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiTable {
    n: usize,
    degrees: Vec<u32>,
}

impl CiTable {
    fn dim(&self) -> usize {
        self.n - self.degrees.len()
    }

    fn omega_twist(&self) -> i64 {
        self.degrees.iter().map(|&d| i64::from(d)).sum::<i64>() - self.n as i64 - 1
    }

    fn degree(&self) -> u64 {
        self.degrees.iter().map(|&d| u64::from(d)).product()
    }

    /// `dim (S/I)_t` by inclusion-exclusion over the Koszul complex.
    fn quotient_dim(&self, t: i64) -> u64 {
        let v = self.n + 1;
        let c = self.degrees.len();
        let mut acc: i128 = 0;
        for subset in 0u32..(1 << c) {
            let shift: i64 = (0..c)
                .filter(|j| subset & (1 << j) != 0)
                .map(|j| i64::from(self.degrees[j]))
                .sum();
            let term = i128::from(graded_dim(v, t - shift));
            if subset.count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        u64::try_from(acc).expect("Koszul sum of a regular sequence is nonnegative")
    }

    fn h(&self, i: usize, t: i64) -> u64 {
        let dim = self.dim();
        if dim == 0 {
            return if i == 0 { self.degree() } else { 0 };
        }
        match i {
            0 => self.quotient_dim(t),
            _ if i == dim => self.quotient_dim(self.omega_twist() - t),
            _ => 0,
        }
    }

    fn h_ideal(&self, i: usize, t: i64) -> u64 {
        if self.degrees.is_empty() || i > self.n {
            return 0;
        }
        let v = self.n + 1;
        let ambient_top = |i: usize| {
            if i == self.n {
                graded_dim(v, -t - v as i64)
            } else {
                0
            }
        };
        if i == 0 {
            return graded_dim(v, t) - self.quotient_dim(t);
        }
        // H^{i-1}(O_X) -> H^i(I_X) -> H^i(O_P) -> H^i(O_X) with the last map
        // zero whenever dim X < n.
        let coker = if i == 1 {
            self.h(0, t) - self.quotient_dim(t)
        } else {
            self.h(i - 1, t)
        };
        coker + ambient_top(i)
    }
}

/// Cohomology `h^0(O_X(t))` of a complete intersection.
pub fn ci_h0(n: usize, degrees: &[u32], t: i64) -> u64 {
    CiTable {
        n,
        degrees: degrees.to_vec(),
    }
    .h(0, t)
}

/// Closed-form cohomology table of a complete intersection.
pub fn ci_table(n: usize, degrees: &[u32]) -> Result<CohomologyTable, VarietyError> {
    validate_ci(n, degrees)?;
    Ok(CohomologyTable::Koszul(CiTable {
        n,
        degrees: degrees.to_vec(),
    }))
}

fn validate_ci(n: usize, degrees: &[u32]) -> Result<(), VarietyError> {
    if n == 0 {
        return Err(VarietyError::Invalid("ambient dimension must be at least 1".into()));
    }
    if degrees.len() > n {
        return Err(VarietyError::Invalid(format!(
            "{} equations in P^{n} exceed the dimension",
            degrees.len()
        )));
    }
    if degrees.contains(&0) {
        return Err(VarietyError::Invalid("equation degrees must be at least 1".into()));
    }
    Ok(())
}

/// Cohomology read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustomTable {
    name: String,
    n: usize,
    dim: usize,
    degree: u64,
    omega_twist: Option<i64>,
    trange: (i64, i64),
    smooth: bool,
    linear_pm: bool,
    h: BTreeMap<(usize, i64), u64>,
    ideal: BTreeMap<(usize, i64), u64>,
    ideal_indices: BTreeSet<usize>,
    omega: BTreeMap<(usize, i64), u64>,
    omega_indices: BTreeSet<usize>,
}

impl CustomTable {
    pub fn parse(text: &str, origin: &str) -> Result<Self, VarietyError> {
        let err = |line: usize, message: String| VarietyError::Load {
            origin: origin.to_string(),
            line,
            message,
        };
        let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut rows: Vec<(usize, String, usize, i64, u64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some((key, value)) = content.split_once('=') {
                let key = key.trim().to_string();
                if header.contains_key(&key) {
                    return Err(err(line, format!("duplicate header '{key}'")));
                }
                header.insert(key, (line, value.trim().to_string()));
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [kind, i, t, v] = fields.as_slice() else {
                return Err(err(line, "expected '<kind> <i> <t> <value>'".into()));
            };
            if !matches!(*kind, "h" | "hI" | "hw") {
                return Err(err(line, format!("unknown row kind '{kind}'")));
            }
            let i: usize = i.parse().map_err(|_| err(line, format!("bad index '{i}'")))?;
            let t: i64 = t.parse().map_err(|_| err(line, format!("bad twist '{t}'")))?;
            let v: u64 = v.parse().map_err(|_| err(line, format!("bad value '{v}'")))?;
            rows.push((line, kind.to_string(), i, t, v));
        }

        let get = |key: &str| -> Result<&(usize, String), VarietyError> {
            header.get(key).ok_or_else(|| err(0, format!("missing header '{key}'")))
        };
        let parse_num = |key: &str| -> Result<i64, VarietyError> {
            let (line, value) = get(key)?;
            value
                .parse()
                .map_err(|_| err(*line, format!("header '{key}' must be an integer")))
        };
        let parse_flag = |key: &str| -> Result<bool, VarietyError> {
            match header.get(key) {
                None => Ok(false),
                Some((line, value)) => match value.as_str() {
                    "true" => Ok(true),
                    "false" => Ok(false),
                    _ => Err(err(*line, format!("header '{key}' must be true or false"))),
                },
            }
        };
        for (key, (line, _)) in &header {
            let known = [
                "name",
                "n",
                "dim",
                "degree",
                "omega_twist",
                "trange",
                "smooth",
                "linear_pm",
            ];
            if !known.contains(&key.as_str()) {
                return Err(err(*line, format!("unknown header '{key}'")));
            }
        }

        let n = parse_num("n")?;
        let dim = parse_num("dim")?;
        let degree = parse_num("degree")?;
        if n < 1 {
            return Err(err(get("n")?.0, "n must be at least 1".into()));
        }
        if dim < 0 || dim > n {
            return Err(err(get("dim")?.0, format!("dim {dim} is outside 0..={n}")));
        }
        if degree < 1 {
            return Err(err(get("degree")?.0, "degree must be at least 1".into()));
        }
        let (n, dim, degree) = (n as usize, dim as usize, degree as u64);
        let omega_twist = {
            let (line, value) = get("omega_twist")?;
            match value.as_str() {
                "none" => None,
                v => Some(
                    v.parse()
                        .map_err(|_| err(*line, "omega_twist must be an integer or 'none'".into()))?,
                ),
            }
        };
        let trange = {
            let (line, value) = get("trange")?;
            let bad = || err(*line, format!("trange '{value}' must look like a..b"));
            let (a, b) = value.split_once("..").ok_or_else(bad)?;
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            (a, b)
        };

        let mut table = CustomTable {
            name: header
                .get("name")
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| origin.to_string()),
            n,
            dim,
            degree,
            omega_twist,
            trange,
            smooth: parse_flag("smooth")?,
            linear_pm: parse_flag("linear_pm")?,
            h: BTreeMap::new(),
            ideal: BTreeMap::new(),
            ideal_indices: BTreeSet::new(),
            omega: BTreeMap::new(),
            omega_indices: BTreeSet::new(),
        };
        for (line, kind, i, t, v) in rows {
            let (max_i, map, sheaf) = match kind.as_str() {
                "h" => (dim, &mut table.h, "O_X"),
                "hI" => (n, &mut table.ideal, "I_X"),
                _ => (dim, &mut table.omega, "omega_X"),
            };
            if i > max_i {
                return Err(err(line, format!("{sheaf} row with i = {i} beyond {max_i}")));
            }
            if t < trange.0 || t > trange.1 {
                return Err(err(
                    line,
                    format!("twist {t} outside trange {}..{}", trange.0, trange.1),
                ));
            }
            if map.insert((i, t), v).is_some() {
                return Err(err(line, format!("duplicate {sheaf} row ({i}, {t})")));
            }
            match kind.as_str() {
                "hI" => table.ideal_indices.insert(i),
                "hw" => table.omega_indices.insert(i),
                _ => true,
            };
        }
        if omega_twist.is_some() && !table.omega.is_empty() {
            return Err(err(0, "give either omega_twist or hw rows, not both".into()));
        }
        let complete = |map: &BTreeMap<(usize, i64), u64>, indices: &mut dyn Iterator<Item = usize>, sheaf: &str| {
            for i in indices {
                for t in trange.0..=trange.1 {
                    if !map.contains_key(&(i, t)) {
                        return Err(err(0, format!("missing {sheaf} row ({i}, {t})")));
                    }
                }
            }
            Ok(())
        };
        complete(&table.h, &mut (0..=dim), "h")?;
        complete(&table.ideal, &mut table.ideal_indices.iter().copied(), "hI")?;
        complete(&table.omega, &mut table.omega_indices.iter().copied(), "hw")?;
        Ok(table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn trange(&self) -> (i64, i64) {
        self.trange
    }

    fn lookup(
        &self,
        map: &BTreeMap<(usize, i64), u64>,
        sheaf: &'static str,
        i: usize,
        t: i64,
    ) -> Result<u64, VarietyError> {
        map.get(&(i, t)).copied().ok_or(VarietyError::Range {
            sheaf,
            i,
            t,
            lo: self.trange.0,
            hi: self.trange.1,
        })
    }

    fn h(&self, i: usize, t: i64) -> Result<u64, VarietyError> {
        if i > self.dim {
            return Ok(0);
        }
        self.lookup(&self.h, "O_X", i, t)
    }

    fn h_ideal(&self, i: usize, t: i64) -> Result<u64, VarietyError> {
        if i > self.n {
            return Ok(0);
        }
        if !self.ideal_indices.contains(&i) {
            return Err(VarietyError::Unavailable("ideal sheaf"));
        }
        self.lookup(&self.ideal, "I_X", i, t)
    }

    fn h_omega(&self, i: usize, t: i64) -> Result<u64, VarietyError> {
        if i > self.dim {
            return Ok(0);
        }
        if let Some(e) = self.omega_twist {
            return self.h(i, t + e);
        }
        if !self.omega_indices.contains(&i) {
            return Err(VarietyError::Unavailable("dualizing sheaf"));
        }
        self.lookup(&self.omega, "omega_X", i, t)
    }
}

/// Queryable cohomology of a model variety.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CohomologyTable {
    Koszul(CiTable),
    Custom(CustomTable),
}

impl CohomologyTable {
    pub fn dim(&self) -> usize {
        match self {
            CohomologyTable::Koszul(ci) => ci.dim(),
            CohomologyTable::Custom(t) => t.dim,
        }
    }

    /// `h^i(O_X(t))`.
    pub fn h(&self, i: usize, t: i64) -> Result<u64, VarietyError> {
        match self {
            CohomologyTable::Koszul(ci) => Ok(ci.h(i, t)),
            CohomologyTable::Custom(table) => table.h(i, t),
        }
    }

    /// `h^i(I_X(t))`.
    pub fn h_ideal(&self, i: usize, t: i64) -> Result<u64, VarietyError> {
        match self {
            CohomologyTable::Koszul(ci) => Ok(ci.h_ideal(i, t)),
            CohomologyTable::Custom(table) => table.h_ideal(i, t),
        }
    }

    /// `h^i(omega_X(t))`.
    pub fn h_omega(&self, i: usize, t: i64) -> Result<u64, VarietyError> {
        match self {
            CohomologyTable::Koszul(ci) => Ok(ci.h(i, t + ci.omega_twist())),
            CohomologyTable::Custom(table) => table.h_omega(i, t),
        }
    }

    /// Declared twist range; `None` when every twist is answered.
    pub fn trange(&self) -> Option<(i64, i64)> {
        match self {
            CohomologyTable::Koszul(_) => None,
            CohomologyTable::Custom(t) => Some(t.trange),
        }
    }

    pub fn covers(&self, t: i64) -> bool {
        self.trange().is_none_or(|(a, b)| a <= t && t <= b)
    }

    pub fn has_ideal(&self) -> bool {
        match self {
            CohomologyTable::Koszul(_) => true,
            CohomologyTable::Custom(t) => t.ideal_indices.len() == t.n + 1,
        }
    }

    pub fn has_dualizing(&self) -> bool {
        match self {
            CohomologyTable::Koszul(_) => true,
            CohomologyTable::Custom(t) => t.omega_twist.is_some() || t.omega_indices.len() == t.dim + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelClass {
    ProjectiveSpace,
    CompleteIntersection(Vec<u32>),
    CustomTable,
}

/// A variety `X` in P^n together with its cohomology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelVariety {
    name: String,
    class: ModelClass,
    n: usize,
    degree: u64,
    omega_twist: Option<i64>,
    smooth_general_position: bool,
    linear_pm: bool,
    table: CohomologyTable,
}

/// Identity of a model as echoed in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub name: String,
    pub class: ModelClass,
    pub n: usize,
    pub dim: usize,
    pub codim: usize,
    pub degree: u64,
    pub omega_twist: Option<i64>,
    pub smooth_general_position: bool,
    pub linear_pm: bool,
}

impl ModelVariety {
    pub fn projective_space(n: usize) -> Result<Self, VarietyError> {
        let table = ci_table(n, &[])?;
        Ok(ModelVariety {
            name: format!("p{n}"),
            class: ModelClass::ProjectiveSpace,
            n,
            degree: 1,
            omega_twist: Some(-(n as i64) - 1),
            smooth_general_position: true,
            linear_pm: true,
            table,
        })
    }

    /// A complete intersection is taken to be smooth and in general position
    /// unless told otherwise. All-linear equations give a linear subspace.
    pub fn complete_intersection(n: usize, degrees: &[u32]) -> Result<Self, VarietyError> {
        if degrees.is_empty() {
            return Err(VarietyError::Invalid(
                "a complete intersection needs at least one equation".into(),
            ));
        }
        let table = ci_table(n, degrees)?;
        let list: Vec<String> = degrees.iter().map(u32::to_string).collect();
        let CohomologyTable::Koszul(ci) = &table else {
            unreachable!()
        };
        Ok(ModelVariety {
            name: format!("ci:{}@{n}", list.join(",")),
            class: ModelClass::CompleteIntersection(degrees.to_vec()),
            n,
            degree: ci.degree(),
            omega_twist: Some(ci.omega_twist()),
            smooth_general_position: true,
            linear_pm: degrees.iter().all(|&d| d == 1),
            table,
        })
    }

    pub fn from_table(table: CustomTable) -> Self {
        ModelVariety {
            name: table.name.clone(),
            class: ModelClass::CustomTable,
            n: table.n,
            degree: table.degree,
            omega_twist: table.omega_twist,
            smooth_general_position: table.smooth,
            linear_pm: table.linear_pm,
            table: CohomologyTable::Custom(table),
        }
    }

    /// The linear plane in P^4, shipped as a table fixture.
    pub fn plane_in_p4() -> Self {
        let table = CustomTable::parse(PLANE_P4, "plane@4").expect("bundled fixture is valid");
        ModelVariety::from_table(table)
    }

    /// `p<n>`, `ci:<d1>,<d2>,..@<n>`, `plane@4` or `table:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self, VarietyError> {
        let bad = || VarietyError::Invalid(format!("unrecognised model spec '{spec}'"));
        if let Some(path) = spec.strip_prefix("table:") {
            return load_custom_table(path);
        }
        if spec == "plane@4" {
            return Ok(ModelVariety::plane_in_p4());
        }
        if let Some(rest) = spec.strip_prefix("ci:") {
            let (list, n) = rest.split_once('@').ok_or_else(bad)?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            let degrees = list
                .split(',')
                .map(|d| d.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            return ModelVariety::complete_intersection(n, &degrees);
        }
        if let Some(n) = spec.strip_prefix('p') {
            let n: usize = n.parse().map_err(|_| bad())?;
            return ModelVariety::projective_space(n);
        }
        Err(bad())
    }

    pub fn with_general_position(mut self, asserted: bool) -> Self {
        self.smooth_general_position = asserted;
        self
    }

    pub fn with_linear_pm(mut self, linear: bool) -> Self {
        self.linear_pm = linear;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> &ModelClass {
        &self.class
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn codim(&self) -> usize {
        self.n - self.dim()
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// `e` with `omega_X = O_X(e)`, when known.
    pub fn omega_twist(&self) -> Option<i64> {
        self.omega_twist
    }

    pub fn smooth_general_position(&self) -> bool {
        self.smooth_general_position
    }

    /// `(X, O_X(1)) = (P^m, O(1))`.
    pub fn is_linear_pm(&self) -> bool {
        self.linear_pm
    }

    pub fn table(&self) -> &CohomologyTable {
        &self.table
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            name: self.name.clone(),
            class: self.class.clone(),
            n: self.n,
            dim: self.dim(),
            codim: self.codim(),
            degree: self.degree,
            omega_twist: self.omega_twist,
            smooth_general_position: self.smooth_general_position,
            linear_pm: self.linear_pm,
        }
    }

    /// Write the model's cohomology over `trange` in the table file format.
    pub fn export_table(&self, trange: (i64, i64)) -> Result<String, VarietyError> {
        let mut out = String::new();
        let omega = self.omega_twist.map_or_else(|| "none".to_string(), |e| e.to_string());
        writeln!(out, "name={}", self.name).unwrap();
        writeln!(out, "n={}", self.n).unwrap();
        writeln!(out, "dim={}", self.dim()).unwrap();
        writeln!(out, "degree={}", self.degree).unwrap();
        writeln!(out, "omega_twist={omega}").unwrap();
        writeln!(out, "trange={}..{}", trange.0, trange.1).unwrap();
        writeln!(out, "smooth={}", self.smooth_general_position).unwrap();
        writeln!(out, "linear_pm={}", self.linear_pm).unwrap();
        for i in 0..=self.dim() {
            for t in trange.0..=trange.1 {
                writeln!(out, "h {i} {t} {}", self.table.h(i, t)?).unwrap();
            }
        }
        if self.table.has_ideal() {
            for i in 0..=self.n {
                for t in trange.0..=trange.1 {
                    writeln!(out, "hI {i} {t} {}", self.table.h_ideal(i, t)?).unwrap();
                }
            }
        }
        if self.omega_twist.is_none() && self.table.has_dualizing() {
            for i in 0..=self.dim() {
                for t in trange.0..=trange.1 {
                    writeln!(out, "hw {i} {t} {}", self.table.h_omega(i, t)?).unwrap();
                }
            }
        }
        Ok(out)
    }
}

pub fn load_custom_table(path: impl AsRef<Path>) -> Result<ModelVariety, VarietyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| VarietyError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let table = CustomTable::parse(&text, &path.display().to_string())?;
    Ok(ModelVariety::from_table(table))
}
