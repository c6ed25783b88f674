//! Command-line front end for the `pushsplit` binary.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 input error, 3 integrity
//! error, 4 table range error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::adjunction::{adjunction_report, AdjunctionError, AdjunctionReport};
use crate::endomorphism::{EndoError, Endomorphism, FinitenessVerdict};
use crate::exactla::RankMode;
use crate::pullback::{
    default_lrange, pullback_report, PullbackError, PullbackReport, VanishingBound, Verdict, REPORT_VERSION,
};
use crate::splitting::{delta, hilbert_check, splitting_from_endo_unchecked, splitting_universal, SplitError};
use crate::varieties::{ModelVariety, VarietyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTEGRITY: i32 = 3;
pub const EXIT_RANGE: i32 = 4;

/// Twists checked by the Hilbert identity in `split`.
const HILBERT_E_MAX: i64 = 10;

#[derive(Debug, Parser)]
#[command(
    name = "pushsplit",
    version,
    about = "Splitting of pushforwards under endomorphisms of projective space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Splitting type of pi_* O(l)
    Split(SplitArgs),
    /// Finiteness test for an endomorphism file, or a random one
    VerifyEndo(VerifyArgs),
    /// Cohomology and verdicts for the inverse image of a model variety
    Pullback(PullbackArgs),
    /// Adjunction for the inverse image of a surface in P^4
    Adjoint(AdjointArgs),
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Emit canonical JSON
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV
    #[arg(long)]
    pub csv: bool,
    /// Write output to this file instead of stdout (`-` for stdout)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Rank over the rationals instead of modulo primes
    #[arg(long)]
    pub exact: bool,
    /// key = value file supplying any of the options
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<i64>,
    /// Also compute the splitting from this endomorphism file
    #[arg(long)]
    pub endo: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Endomorphism file
    pub file: Option<PathBuf>,
    /// Generate a random endomorphism instead of reading a file
    #[arg(long)]
    pub random: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Coefficients are drawn from [-bound, bound]
    #[arg(long)]
    pub coeff_bound: Option<i64>,
    #[arg(long)]
    pub attempts: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PullbackArgs {
    /// p<n>, ci:d1,..@n, plane@4 or table:<path>
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    /// Twists a..b (default -k..3k)
    #[arg(long, allow_hyphen_values = true)]
    pub lrange: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AdjointArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn integrity(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INTEGRITY,
            message: message.into(),
        }
    }
}

impl From<VarietyError> for CliError {
    fn from(e: VarietyError) -> Self {
        let code = if matches!(e, VarietyError::Range { .. }) {
            EXIT_RANGE
        } else {
            EXIT_INPUT
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<PullbackError> for CliError {
    fn from(e: PullbackError) -> Self {
        match e {
            PullbackError::Table(v) => v.into(),
            PullbackError::Integrity(m) => CliError::integrity(m),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<AdjunctionError> for CliError {
    fn from(e: AdjunctionError) -> Self {
        match e {
            AdjunctionError::Pullback(p) => p.into(),
            AdjunctionError::Integrity(m) => CliError::integrity(m),
            AdjunctionError::Precondition(m) => CliError::input(m),
        }
    }
}

impl From<EndoError> for CliError {
    fn from(e: EndoError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<SplitError> for CliError {
    fn from(e: SplitError) -> Self {
        match e {
            SplitError::Integrity { .. } => CliError::integrity(e.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Options from a `--config` file; command-line flags take precedence.
#[derive(Debug, Default)]
struct Config(BTreeMap<String, String>);

const CONFIG_KEYS: [&str; 13] = [
    "n",
    "k",
    "l",
    "lrange",
    "model",
    "endo",
    "exact",
    "format",
    "output",
    "seed",
    "random",
    "coeff_bound",
    "attempts",
];

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = || format!("{}, line {}", path.display(), idx + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("{}: expected key = value", at())))?;
            let key = key.trim().to_string();
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::input(format!("{}: unknown key '{key}'", at())));
            }
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::input(format!("{}: duplicate key '{key}'", at())));
            }
        }
        Ok(Config(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::input(format!("config: invalid value '{v}' for {key}")))
            })
            .transpose()
    }

    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn require<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::input(format!("missing --{}", key.replace('_', "-"))))
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }
}

struct Output {
    format: Format,
    path: Option<PathBuf>,
    mode: RankMode,
}

impl Output {
    fn new(common: &Common, config: &Config) -> Result<Self, CliError> {
        let format = if common.json {
            Format::Json
        } else if common.csv {
            Format::Csv
        } else {
            match config.get::<String>("format")?.as_deref() {
                None | Some("text") => Format::Text,
                Some("json") => Format::Json,
                Some("csv") => Format::Csv,
                Some(other) => return Err(CliError::input(format!("unknown format '{other}'"))),
            }
        };
        let mode = if config.flag(common.exact, "exact")? {
            RankMode::Exact
        } else {
            RankMode::from_env().map_err(|e| CliError::input(e.to_string()))?
        };
        Ok(Output {
            format,
            path: config.pick(common.output.clone(), "output")?,
            mode,
        })
    }

    fn emit(&self, text: String, json: Value, csv: String) -> Result<(), CliError> {
        let body = match self.format {
            Format::Text => text,
            Format::Json => canonical_json(&json),
            Format::Csv => csv,
        };
        match self.path.as_ref().filter(|p| p.as_os_str() != "-") {
            Some(p) => {
                std::fs::write(p, body).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))
            }
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

/// Sorted keys, two-space indent, trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn parse_lrange(text: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::input(format!("invalid l range '{text}', expected a..b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn read_endo(path: &Path) -> Result<Endomorphism, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    Endomorphism::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Run a parsed command line; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Split(a) => cmd_split(a),
        Command::VerifyEndo(a) => cmd_verify_endo(a),
        Command::Pullback(a) => cmd_pullback(a),
        Command::Adjoint(a) => cmd_adjoint(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn map_str(m: &BTreeMap<i64, u64>) -> String {
    let parts: Vec<String> = m.iter().map(|(d, v)| format!("{d}: {v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn cmd_split(a: SplitArgs) -> Result<i32, CliError> {
    let config = Config::load(a.common.config.as_deref())?;
    let out = Output::new(&a.common, &config)?;
    let l: i64 = config.require(a.l, "l")?;
    let endo_path: Option<PathBuf> = config.pick(a.endo, "endo")?;

    let (n, k, route) = match &endo_path {
        Some(path) => {
            let e = read_endo(path)?;
            let (e, verdict) = e.certify(&out.mode)?;
            if !verdict.finite {
                return Err(CliError::input(format!(
                    "{}: endomorphism is not finite (rank {} of {} in degree {})",
                    path.display(),
                    verdict.rank,
                    verdict.target_dim,
                    verdict.test_degree
                )));
            }
            let (computed, steps) = splitting_from_endo_unchecked(&e, l, &out.mode)?;
            (e.n(), e.k(), Some((path.clone(), computed, steps)))
        }
        None => (config.require(a.n, "n")?, config.require(a.k, "k")?, None),
    };
    if n == 0 || k == 0 {
        return Err(CliError::input("n and k must be at least 1"));
    }
    let st = splitting_universal(n, k, l);
    let hc = hilbert_check(&st, HILBERT_E_MAX);
    let dl = delta(n, k, l);

    let mut text = String::new();
    writeln!(text, "n = {n}, k = {k}, l = {l}").ok();
    writeln!(text, "table {}", map_str(st.multiplicities())).ok();
    writeln!(text, "delta = {dl}").ok();
    writeln!(text, "rank = {}", st.rank_sum()).ok();
    writeln!(
        text,
        "hilbert identity for e in {}..{}: {}",
        hc.e_min,
        hc.e_max,
        if hc.passed { "holds" } else { "FAILS" }
    )
    .ok();
    let mut json = json!({
        "report_version": REPORT_VERSION,
        "n": n,
        "k": k,
        "l": l,
        "delta": dl,
        "rank": st.rank_sum(),
        "multiplicities": st.multiplicities(),
        "support": st.support(),
        "hilbert_check": hc,
    });
    let mut csv = String::from("d,multiplicity\n");
    for (d, m) in st.multiplicities() {
        writeln!(csv, "{d},{m}").ok();
    }

    let mut code = if hc.passed { EXIT_OK } else { EXIT_INTEGRITY };
    if let Some((path, computed, steps)) = route {
        let agrees = computed == st;
        if agrees {
            writeln!(
                text,
                "{}: matches closed form ({})",
                path.display(),
                out.mode.describe()
            )
            .ok();
        } else {
            writeln!(
                text,
                "{}: DISAGREES with closed form: {}",
                path.display(),
                map_str(computed.multiplicities())
            )
            .ok();
            code = EXIT_INTEGRITY;
        }
        json["endo"] = json!({
            "path": path.display().to_string(),
            "agrees": agrees,
            "multiplicities": computed.multiplicities(),
            "rank_mode": out.mode.describe(),
            "steps": steps,
        });
    }
    out.emit(text, json, csv)?;
    if code == EXIT_INTEGRITY {
        eprintln!("error: integrity check failed");
    }
    Ok(code)
}

fn verdict_text(path: &str, v: &FinitenessVerdict) -> String {
    format!(
        "{path}: {}\nrank {} of {} in degree {} ({}x{} matrix, {})\n",
        if v.finite { "FINITE" } else { "NOT_FINITE" },
        v.rank,
        v.target_dim,
        v.test_degree,
        v.rows,
        v.cols,
        v.rank_mode
    )
}

pub fn cmd_verify_endo(a: VerifyArgs) -> Result<i32, CliError> {
    let config = Config::load(a.common.config.as_deref())?;
    let out = Output::new(&a.common, &config)?;
    let random = config.flag(a.random, "random")?;
    let file: Option<PathBuf> = config.pick(a.file, "endo")?;

    let (source, e, seed) = if random {
        if file.is_some() {
            return Err(CliError::input("give either a file or --random, not both"));
        }
        let n: usize = config.require(a.n, "n")?;
        let k: u32 = config.require(a.k, "k")?;
        let seed: u64 = config.pick(a.seed, "seed")?.unwrap_or(0);
        let bound: i64 = config.pick(a.coeff_bound, "coeff_bound")?.unwrap_or(3);
        let attempts: usize = config.pick(a.attempts, "attempts")?.unwrap_or(20);
        if bound < 0 {
            return Err(CliError::input("--coeff-bound must be non-negative"));
        }
        let e = Endomorphism::random(n, k, seed, bound, attempts, &out.mode)?;
        ("random".to_string(), e, Some(seed))
    } else {
        let path = file.ok_or_else(|| CliError::input("missing endomorphism file (or --random)"))?;
        (path.display().to_string(), read_endo(&path)?, None)
    };
    let v = e.validate_finite(&out.mode)?;

    let mut text = verdict_text(&source, &v);
    if random {
        text.push_str(&e.to_file_text());
    }
    let mut json = json!({
        "report_version": REPORT_VERSION,
        "source": source,
        "n": e.n(),
        "k": e.k(),
        "verdict": if v.finite { "FINITE" } else { "NOT_FINITE" },
        "evidence": v,
        "forms": e.forms().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    });
    if let Some(seed) = seed {
        json["seed"] = json!(seed);
    }
    let csv = format!(
        "verdict,test_degree,rank,target_dim,rows,cols,rank_mode\n{},{},{},{},{},{},{}\n",
        if v.finite { "FINITE" } else { "NOT_FINITE" },
        v.test_degree,
        v.rank,
        v.target_dim,
        v.rows,
        v.cols,
        v.rank_mode
    );
    out.emit(text, json, csv)?;
    Ok(if v.finite { EXIT_OK } else { EXIT_NEGATIVE })
}

fn verdict_line<T>(name: &str, v: &Verdict<T>, f: impl Fn(&T) -> String) -> String {
    match v {
        Verdict::Applicable(t) => format!("{name}: {}\n", f(t)),
        Verdict::NotApplicable { reason } => format!("{name}: NOT_APPLICABLE ({reason})\n"),
    }
}

fn pullback_text(r: &PullbackReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "model {} (n = {}, dim = {}), k = {}",
        r.model.name, r.n, r.model.dim, r.k
    )
    .ok();
    writeln!(s, "degree of X' = {}", r.degree).ok();
    writeln!(s, "h^i(O_X'(l)):").ok();
    for e in &r.euler {
        let hs: Vec<String> = r
            .cohomology
            .iter()
            .filter(|c| c.l == e.l)
            .map(|c| format!("h{}={}", c.i, c.h))
            .collect();
        writeln!(s, "  l = {:>3}: {}  chi={}", e.l, hs.join(" "), e.chi).ok();
    }
    if let Some(rows) = &r.dualizing {
        writeln!(s, "h^i(omega_X'(-l)):").ok();
        for c in rows {
            writeln!(s, "  l = {}, i = {}: {}", c.l, c.i, c.h).ok();
        }
    }
    s.push_str(&verdict_line("completeness", &r.completeness, |c| {
        format!(
            "nondegenerate={} linearly_complete={} h0(O_X'(1))={} h1(I_X'(l))=0 {}",
            c.nondegenerate,
            c.linearly_complete,
            c.h0_ox_prime_1,
            match c.h1_vanishing.model_bound {
                VanishingBound::Infinite => "for every l".to_string(),
                VanishingBound::Below(_) => format!(
                    "for l < {}{}",
                    c.h1_vanishing.pullback_bound.unwrap_or_default(),
                    c.h1_vanishing
                        .value_at_bound
                        .map_or(String::new(), |v| format!(" (value {v} at the bound)"))
                ),
                VanishingBound::Nowhere => "nowhere in range".to_string(),
                VanishingBound::Unavailable => "unknown (no ideal data)".to_string(),
            }
        )
    }));
    s.push_str(&verdict_line("hyperplane section", &r.hyperplane_section, |h| {
        format!(
            "linearly_complete={} h0(O_Y'(1))={} in P^{} ({})",
            h.linearly_complete, h.h0_oy_prime_1, h.ambient_dim, h.scope
        )
    }));
    s.push_str(&verdict_line("injectivity", &r.injectivity, |c| {
        match c.first_failure {
            None => format!("HYPOTHESIS_HOLDS: {}", c.conclusion),
            Some((i, d)) => format!("fails at i = {i}, d = {d}"),
        }
    }));
    s
}

fn pullback_csv(r: &PullbackReport) -> String {
    let mut s = String::from("sheaf,i,l,h\n");
    for c in &r.cohomology {
        writeln!(s, "O,{},{},{}", c.i, c.l, c.h).ok();
    }
    for c in r.ideal.iter().flatten() {
        writeln!(s, "I,{},{},{}", c.i, c.l, c.h).ok();
    }
    for c in r.dualizing.iter().flatten() {
        writeln!(s, "omega(-l),{},{},{}", c.i, c.l, c.h).ok();
    }
    s
}

pub fn cmd_pullback(a: PullbackArgs) -> Result<i32, CliError> {
    let config = Config::load(a.common.config.as_deref())?;
    let out = Output::new(&a.common, &config)?;
    let spec: String = config.require(a.model, "model")?;
    let k: u32 = config.require(a.k, "k")?;
    if k == 0 {
        return Err(CliError::input("k must be at least 1"));
    }
    let m = ModelVariety::from_spec(&spec)?;
    let lrange = match config.pick(a.lrange, "lrange")? {
        Some(text) => {
            let (lo, hi) = parse_lrange(&text)?;
            lo..=hi
        }
        None => default_lrange(k),
    };
    let r = pullback_report(&m, k, lrange)?;
    out.emit(pullback_text(&r), to_value(&r), pullback_csv(&r))?;
    Ok(if r.all_verdicts_positive() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn adjoint_text(r: &AdjunctionReport) -> String {
    let s = &r.surface;
    let mut t = String::new();
    writeln!(t, "model {}, k = {}", r.model.name, r.k).ok();
    let ds: Vec<String> = r.deltas.iter().map(|d| format!("delta_{}={}", d.l, d.delta)).collect();
    writeln!(t, "{}", ds.join(" ")).ok();
    writeln!(t, "omega_S' = O_S'({}), degree' = {}", s.e_prime, s.degree_prime).ok();
    writeln!(
        t,
        "K.H' = {}, K^2 = {}, sectional genus = {}",
        s.k_dot_h, s.k_squared, s.sectional_genus
    )
    .ok();
    writeln!(
        t,
        "h0(omega_X') = {}, h0(omega_X'(-1)) = {}",
        r.h0_omega_prime, r.h0_omega_prime_minus_1
    )
    .ok();
    writeln!(t, "{}", r.canonical_system.factorization).ok();
    if s.del_pezzo_exception {
        writeln!(
            t,
            "canonical bundle NOT very ample: Del Pezzo exception (quartic Del Pezzo surface)"
        )
        .ok();
    } else {
        writeln!(t, "canonical bundle very ample ({:?})", s.kind).ok();
    }
    t.push_str(&verdict_line("canonical map", &r.canonical_birational, |c| {
        format!("CANONICAL_BIRATIONAL, h0(omega_X'(-1)) = {}", c.h0_omega_prime_minus_1)
    }));
    t
}

pub fn cmd_adjoint(a: AdjointArgs) -> Result<i32, CliError> {
    let config = Config::load(a.common.config.as_deref())?;
    let out = Output::new(&a.common, &config)?;
    let spec: String = config.require(a.model, "model")?;
    let k: u32 = config.require(a.k, "k")?;
    let m = ModelVariety::from_spec(&spec)?;
    let r = adjunction_report(&m, k)?;
    let s = &r.surface;
    let csv = format!(
        "e,e_prime,degree_prime,k_dot_h,k_squared,sectional_genus,canonical_very_ample,del_pezzo_exception\n{},{},{},{},{},{},{},{}\n",
        s.e, s.e_prime, s.degree_prime, s.k_dot_h, s.k_squared, s.sectional_genus, s.canonical_very_ample, s.del_pezzo_exception
    );
    out.emit(adjoint_text(&r), to_value(&r), csv)?;
    Ok(if s.canonical_very_ample { EXIT_OK } else { EXIT_NEGATIVE })
}
