//! Exhaustive checks over `S_n`: distributions of statistic tuples,
//! pointwise transport along the bijections, and reports with minimal
//! counterexamples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bijections::{
    self, dw_loc, dw_oracle, dw_word, dw_word_by_composition, f2, f2_loc, f2_prime, f3, f3_prime,
    matched_dw_base, matched_word_base, register_dw_table, register_word_table, word_f3,
    BijectionError, BijectionTable, DwBase, LoadedTable, WordBase,
};
use crate::decomp::{
    self, derangement_word_classes, desarrangement_word_classes, enumerate_derangements,
    enumerate_desarrangements, fixed_decomposition, pixed_decomposition, zder, zdesar,
    ShuffleClassId,
};
use crate::perm::{self, factorial, Permutation, Permutations, StatValue, ZeroWord};
use crate::qseries::{
    certify_q_series, combinatorial_gf_by, gf_coefficients_t, ExactPolynomial, GfMode, Monomial,
    QSeriesError,
};

/// Environment variable overriding [`Budget::DEFAULT_MAX_N`].
pub const BUDGET_ENV: &str = "FIXMAHON_MAX_N";

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("n = {n} needs {required} permutations, over the budget of n <= {max}; raise it with --allow-large or {BUDGET_ENV}")]
    BudgetExceeded { n: usize, max: usize, required: u64 },
    #[error("unknown statistic {0:?}")]
    UnknownStat(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid {BUDGET_ENV} value {0:?}")]
    BadBudget(String),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
    #[error(transparent)]
    Bijection(#[from] BijectionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stat {
    Fix,
    FixSet,
    Des,
    DesSet,
    Ides,
    IdesSet,
    Maj,
    Imaj,
    Inv,
    Dez,
    DezSet,
    Maz,
    Maf,
    Pix,
    PixSet,
    Mag,
    Der,
    Desar,
}

impl Stat {
    pub const ALL: [Stat; 18] = [
        Stat::Fix,
        Stat::FixSet,
        Stat::Des,
        Stat::DesSet,
        Stat::Ides,
        Stat::IdesSet,
        Stat::Maj,
        Stat::Imaj,
        Stat::Inv,
        Stat::Dez,
        Stat::DezSet,
        Stat::Maz,
        Stat::Maf,
        Stat::Pix,
        Stat::PixSet,
        Stat::Mag,
        Stat::Der,
        Stat::Desar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stat::Fix => "fix",
            Stat::FixSet => "FIX",
            Stat::Des => "des",
            Stat::DesSet => "DES",
            Stat::Ides => "ides",
            Stat::IdesSet => "IDES",
            Stat::Maj => "maj",
            Stat::Imaj => "imaj",
            Stat::Inv => "inv",
            Stat::Dez => "dez",
            Stat::DezSet => "DEZ",
            Stat::Maz => "maz",
            Stat::Maf => "maf",
            Stat::Pix => "pix",
            Stat::PixSet => "PIX",
            Stat::Mag => "mag",
            Stat::Der => "Der",
            Stat::Desar => "Desar",
        }
    }
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stat {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stat::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| VerifyError::UnknownStat(s.to_string()))
    }
}

/// A tuple of statistics such as `(fix, maz, Der)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatProfile {
    stats: Vec<Stat>,
}

impl StatProfile {
    pub fn new(stats: Vec<Stat>) -> Self {
        StatProfile { stats }
    }

    pub fn stats(&self) -> &[Stat] {
        &self.stats
    }
}

impl FromStr for StatProfile {
    type Err = VerifyError;

    /// Comma-separated names, e.g. `fix,maz,Der`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let stats = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(Stat::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        if stats.is_empty() {
            return Err(VerifyError::UnknownStat(s.to_string()));
        }
        Ok(StatProfile { stats })
    }
}

impl fmt::Display for StatProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.stats.iter().map(|s| s.name()).collect();
        write!(f, "({})", names.join(", "))
    }
}

/// A deliberate corruption of the kernel, used to confirm that the suites
/// can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    Exact,
    /// Descents at position `i` contribute `i − 1` to `maj`.
    MajOffByOne,
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" | "exact" => Ok(Mutation::Exact),
            "maj-off-by-one" => Ok(Mutation::MajOffByOne),
            other => Err(format!("unknown mutation {other:?}")),
        }
    }
}

/// Statistic kernel. Every statistic built on `maj` (`imaj`, `maz`, `maf`,
/// `mag`, `mafz`) goes through [`Statistics::word_maj`], so a mutation there
/// reaches all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Statistics {
    mutation: Mutation,
}

impl Statistics {
    pub fn new(mutation: Mutation) -> Self {
        Statistics { mutation }
    }

    pub fn mutation(&self) -> Mutation {
        self.mutation
    }

    pub fn word_maj(&self, letters: &[usize]) -> usize {
        match self.mutation {
            Mutation::Exact => perm::maj(letters),
            Mutation::MajOffByOne => perm::des_set(letters).members().iter().map(|i| i - 1).sum(),
        }
    }

    pub fn maj(&self, p: &Permutation) -> usize {
        self.word_maj(p.word())
    }

    pub fn imaj(&self, p: &Permutation) -> usize {
        self.word_maj(p.inverse().word())
    }

    pub fn maz(&self, p: &Permutation) -> usize {
        self.word_maj(zder(p).letters())
    }

    pub fn maf(&self, p: &Permutation) -> usize {
        let d = fixed_decomposition(p);
        d.fix_set.excess() + self.maj(&d.derangement_part)
    }

    pub fn mag(&self, p: &Permutation) -> usize {
        let d = pixed_decomposition(p);
        d.pix_set.excess() + self.imaj(&d.desarrangement_part)
    }

    pub fn mafz(&self, w: &ZeroWord) -> usize {
        w.zero_set().excess() + self.word_maj(&w.positive_part())
    }

    pub fn value(&self, stat: Stat, p: &Permutation) -> StatValue {
        match stat {
            Stat::Fix => p.fix().into(),
            Stat::FixSet => p.fix_set().into(),
            Stat::Des => p.des().into(),
            Stat::DesSet => p.des_set().into(),
            Stat::Ides => p.ides_set().len().into(),
            Stat::IdesSet => p.ides_set().into(),
            Stat::Maj => self.maj(p).into(),
            Stat::Imaj => self.imaj(p).into(),
            Stat::Inv => p.inv().into(),
            Stat::Dez => decomp::dez(p).into(),
            Stat::DezSet => decomp::dez_set(p).into(),
            Stat::Maz => self.maz(p).into(),
            Stat::Maf => self.maf(p).into(),
            Stat::Pix => decomp::pix(p).into(),
            Stat::PixSet => decomp::pix_set(p).into(),
            Stat::Mag => self.mag(p).into(),
            Stat::Der => decomp::der(p).into(),
            Stat::Desar => decomp::desar(p).into(),
        }
    }

    pub fn tuple(&self, profile: &StatProfile, p: &Permutation) -> Vec<StatValue> {
        profile.stats.iter().map(|&s| self.value(s, p)).collect()
    }
}

/// Largest `n` enumerated without an explicit override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_n: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_n: Self::DEFAULT_MAX_N,
        }
    }
}

impl Budget {
    pub const DEFAULT_MAX_N: usize = 8;

    pub fn new(max_n: usize) -> Self {
        Budget { max_n }
    }

    pub fn unlimited() -> Self {
        Budget { max_n: usize::MAX }
    }

    /// The default, or the value of [`BUDGET_ENV`] when set.
    pub fn from_env() -> Result<Self, VerifyError> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(Budget::new)
                .map_err(|_| VerifyError::BadBudget(v)),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub fn check(&self, n: usize) -> Result<(), VerifyError> {
        if n > self.max_n {
            return Err(VerifyError::BudgetExceeded {
                n,
                max: self.max_n,
                required: factorial(n),
            });
        }
        Ok(())
    }
}

/// Counts of each statistic tuple over a domain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Distribution {
    domain_size: u64,
    counts: BTreeMap<Vec<StatValue>, u64>,
}

impl Distribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: Vec<StatValue>) {
        self.domain_size += 1;
        *self.counts.entry(key).or_default() += 1;
    }

    pub fn merge(&mut self, other: Distribution) {
        self.domain_size += other.domain_size;
        for (k, c) in other.counts {
            *self.counts.entry(k).or_default() += c;
        }
    }

    pub fn domain_size(&self) -> u64 {
        self.domain_size
    }

    pub fn counts(&self) -> &BTreeMap<Vec<StatValue>, u64> {
        &self.counts
    }

    pub fn count(&self, key: &[StatValue]) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in &self.counts {
            writeln!(f, "{}: {c}", render_tuple(k))?;
        }
        Ok(())
    }
}

pub fn render_tuple(values: &[StatValue]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// First letters `1..=n` dealt round-robin to at most `jobs` workers.
fn partition(n: usize, jobs: usize) -> Vec<Vec<usize>> {
    let workers = jobs.clamp(1, n.max(1));
    let mut parts = vec![Vec::new(); workers];
    for first in 1..=n {
        parts[(first - 1) % workers].push(first);
    }
    parts
}

pub fn distribution(
    n: usize,
    profile: &StatProfile,
    stats: &Statistics,
    budget: &Budget,
) -> Result<Distribution, VerifyError> {
    budget.check(n)?;
    let mut d = Distribution::new();
    for p in Permutations::new(n) {
        d.add(stats.tuple(profile, &p));
    }
    Ok(d)
}

/// As [`distribution`], splitting `S_n` by first letter across `jobs`
/// threads and merging the partial counts.
pub fn distribution_partitioned(
    n: usize,
    profile: &StatProfile,
    stats: &Statistics,
    budget: &Budget,
    jobs: usize,
) -> Result<Distribution, VerifyError> {
    if jobs <= 1 || n < 2 {
        return distribution(n, profile, stats, budget);
    }
    budget.check(n)?;
    let parts = partition(n, jobs);
    let partials: Vec<Distribution> = std::thread::scope(|scope| {
        let handles: Vec<_> = parts
            .iter()
            .map(|firsts| {
                scope.spawn(move || {
                    let mut d = Distribution::new();
                    for &first in firsts {
                        for p in Permutations::starting_with(n, first) {
                            d.add(stats.tuple(profile, &p));
                        }
                    }
                    d
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut total = Distribution::new();
    for d in partials {
        total.merge(d);
    }
    Ok(total)
}

/// Lexicographically least `σ ∈ S_n` for which `check` reports a problem.
fn first_failure<F>(n: usize, jobs: usize, check: &F) -> Option<(Permutation, String)>
where
    F: Fn(&Permutation) -> Option<String> + Sync,
{
    let scan = |it: &mut dyn Iterator<Item = Permutation>| {
        for p in it {
            if let Some(d) = check(&p) {
                return Some((p, d));
            }
        }
        None
    };
    if jobs <= 1 || n < 2 {
        return scan(&mut Permutations::new(n));
    }
    let parts = partition(n, jobs);
    let found: Vec<(usize, (Permutation, String))> = std::thread::scope(|scope| {
        let handles: Vec<_> = parts
            .iter()
            .map(|firsts| {
                scope.spawn(move || {
                    firsts.iter().find_map(|&first| {
                        scan(&mut Permutations::starting_with(n, first)).map(|hit| (first, hit))
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .filter_map(|h| h.join().unwrap())
            .collect()
    });
    found
        .into_iter()
        .min_by_key(|(first, _)| *first)
        .map(|(_, hit)| hit)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub n: usize,
    pub element: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail(Witness),
    /// Not gating; the note says what was observed.
    Informative(String),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail(_) => "fail",
            Status::Informative(_) => "informative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub claim: String,
    pub n_min: usize,
    pub n_max: usize,
    pub status: Status,
    pub elapsed: Duration,
    pub data: Vec<(String, String)>,
}

impl VerificationReport {
    fn new(claim: &str, n_min: usize, n_max: usize, status: Status, started: Instant) -> Self {
        VerificationReport {
            claim: claim.to_string(),
            n_min,
            n_max,
            status,
            elapsed: started.elapsed(),
            data: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.data.push((key.to_string(), value.to_string()));
        self
    }

    pub fn is_binding(&self) -> bool {
        !matches!(self.status, Status::Informative(_))
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Fail(_))
    }

    /// `key=value` lines; `elapsed_ms` only when `timing` is set.
    pub fn to_key_value(&self, timing: bool) -> String {
        let mut out = format!(
            "claim={}\nn={}..{}\nstatus={}\n",
            self.claim,
            self.n_min,
            self.n_max,
            self.status.label()
        );
        match &self.status {
            Status::Pass => {}
            Status::Fail(w) => {
                out += &format!(
                    "witness.n={}\nwitness.element={}\nwitness.detail={}\n",
                    w.n, w.element, w.detail
                );
            }
            Status::Informative(note) => out += &format!("note={note}\n"),
        }
        for (k, v) in &self.data {
            out += &format!("{k}={v}\n");
        }
        if timing {
            out += &format!("elapsed_ms={}\n", self.elapsed.as_millis());
        }
        out
    }

    fn summary(&self) -> String {
        match &self.status {
            Status::Pass => self
                .data
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" "),
            Status::Fail(w) => format!("n={} at {}: {}", w.n, w.element, w.detail),
            Status::Informative(note) => note.clone(),
        }
    }
}

pub fn render_key_value(reports: &[VerificationReport], timing: bool) -> String {
    reports
        .iter()
        .map(|r| r.to_key_value(timing))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn render_table(reports: &[VerificationReport], timing: bool) -> String {
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            [
                r.claim.clone(),
                format!("{}..{}", r.n_min, r.n_max),
                r.status.label().to_string(),
                if timing {
                    format!("{}ms", r.elapsed.as_millis())
                } else {
                    String::new()
                },
                r.summary(),
            ]
        })
        .collect();
    let header = [
        "claim",
        "n",
        "status",
        if timing { "time" } else { "" },
        "detail",
    ];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 5]| {
        let mut s = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i == 3 && !timing {
                continue;
            }
            if i == 4 {
                s += cell;
            } else {
                s += &format!("{cell:<width$}  ", width = widths[i]);
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header);
    for row in &rows {
        out += &line([&row[0], &row[1], &row[2], &row[3], &row[4]]);
    }
    out
}

pub fn all_binding_pass(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| !r.failed())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Generating functions against enumeration.
    Gf,
    /// Equidistributed pairs.
    Pairs,
    /// Equidistributed triples and the transport along F3, F3′.
    Triples,
    /// Pointwise properties of the bijections and encodings.
    Props,
    All,
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gf" => Ok(Suite::Gf),
            "pairs" => Ok(Suite::Pairs),
            "triples" => Ok(Suite::Triples),
            "props" => Ok(Suite::Props),
            "all" => Ok(Suite::All),
            other => Err(VerifyError::UnknownSuite(other.to_string())),
        }
    }
}

/// The groups of pairs checked by [`Verifier::check_pairs`].
pub const PAIR_GROUPS: [&[&str]; 4] = [
    &[
        "fix,maj", "fix,maf", "fix,maz", "pix,mag", "pix,inv", "pix,imaj",
    ],
    &["FIX,maf", "PIX,mag", "PIX,inv"],
    &["fix,DEZ", "fix,DES", "pix,IDES"],
    &["FIX,DEZ", "PIX,IDES"],
];

/// The groups of triples checked by [`Verifier::check_triples`].
pub const TRIPLE_GROUPS: [&[&str]; 2] = [
    &["fix,maf,Der", "fix,maz,Der"],
    &["pix,mag,Desar", "pix,imaj,Desar"],
];

pub struct Verifier {
    pub stats: Statistics,
    pub budget: Budget,
    pub jobs: usize,
    dw_base: DwBase,
    word_base: WordBase,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier::new(Statistics::default(), Budget::default(), 1)
    }
}

fn mismatch<T: PartialEq + fmt::Debug>(what: &str, left: T, right: T) -> Option<String> {
    (left != right).then(|| format!("{what}: {left:?} vs {right:?}"))
}

fn first_some(checks: impl IntoIterator<Item = Option<String>>) -> Option<String> {
    checks.into_iter().flatten().next()
}

fn members(p: perm::PositionSet) -> Vec<usize> {
    p.members().to_vec()
}

impl Verifier {
    pub fn new(stats: Statistics, budget: Budget, jobs: usize) -> Self {
        Verifier {
            stats,
            budget,
            jobs: jobs.max(1),
            dw_base: matched_dw_base(),
            word_base: matched_word_base(),
        }
    }

    /// Validates a literal DW table and uses it for its order.
    pub fn register_dw_table(
        &mut self,
        table: BijectionTable<Permutation>,
    ) -> Result<usize, BijectionError> {
        register_dw_table(&mut self.dw_base, table)
    }

    /// Validates a literal word-level F3 table and uses it for its class.
    pub fn register_word_table(
        &mut self,
        table: BijectionTable<ZeroWord>,
    ) -> Result<ShuffleClassId, BijectionError> {
        register_word_table(&mut self.word_base, table)
    }

    /// Puts a validated DW or word-level table in front of the oracle.
    /// Φ and CHZ tables play no part in the suites and are declined.
    pub fn register(&mut self, table: LoadedTable) -> Result<(), LoadedTable> {
        match table {
            LoadedTable::Dw(t, m) => self.dw_base.insert_plugin(m, t),
            LoadedTable::WordF3(t, c) => self.word_base.insert_plugin(c, t),
            other => return Err(other),
        }
        Ok(())
    }

    pub fn dw_base(&self) -> &DwBase {
        &self.dw_base
    }

    pub fn word_base(&self) -> &WordBase {
        &self.word_base
    }

    pub fn run(&self, suite: Suite, n_max: usize) -> Result<Vec<VerificationReport>, VerifyError> {
        Ok(match suite {
            Suite::Gf => vec![self.check_generating_functions(n_max)?],
            Suite::Pairs => self.check_pairs(n_max)?,
            Suite::Triples => self.check_triples(n_max)?,
            Suite::Props => self.check_propositions(n_max)?,
            Suite::All => {
                let mut all = vec![self.check_generating_functions(n_max)?];
                all.extend(self.check_pairs(n_max)?);
                all.extend(self.check_triples(n_max)?);
                all.extend(self.check_propositions(n_max)?);
                all
            }
        })
    }

    pub fn distribution(
        &self,
        n: usize,
        profile: &StatProfile,
    ) -> Result<Distribution, VerifyError> {
        distribution_partitioned(n, profile, &self.stats, &self.budget, self.jobs)
    }

    fn pointwise<F>(
        &self,
        claim: &str,
        n_max: usize,
        check: F,
    ) -> Result<VerificationReport, VerifyError>
    where
        F: Fn(&Permutation) -> Option<String> + Sync,
    {
        self.budget.check(n_max)?;
        let started = Instant::now();
        let mut checked = 0u64;
        for n in 0..=n_max {
            if let Some((p, detail)) = first_failure(n, self.jobs, &check) {
                let w = Witness {
                    n,
                    element: p.to_string(),
                    detail,
                };
                return Ok(VerificationReport::new(
                    claim,
                    0,
                    n_max,
                    Status::Fail(w),
                    started,
                ));
            }
            checked += factorial(n);
        }
        Ok(
            VerificationReport::new(claim, 0, n_max, Status::Pass, started)
                .with("checked", checked),
        )
    }

    /// The `(Y, t, q)` polynomials read off the `t`-series against
    /// `Σ Y^fix t^des q^maj`, their `t = 1` specialization against
    /// `Σ Y^fix q^maj`, and the latter certified against the `q`-series
    /// identity by exact evaluation on a grid.
    pub fn check_generating_functions(
        &self,
        n_max: usize,
    ) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        let claim = "gf";
        let started = Instant::now();
        let fail = |n: usize, element: String, detail: String| {
            Ok(VerificationReport::new(
                claim,
                0,
                n_max,
                Status::Fail(Witness { n, element, detail }),
                started,
            ))
        };
        let gf = match gf_coefficients_t(n_max) {
            Ok(gf) => gf,
            Err(QSeriesError::NonVanishing {
                n,
                degree,
                coefficient,
            }) => {
                return fail(
                    n,
                    format!("t^{degree}"),
                    format!("coefficient {coefficient} should vanish"),
                )
            }
            Err(e) => return Err(e.into()),
        };
        let stats = self.stats;
        let triple = |p: &Permutation| (p.fix(), p.des(), stats.maj(p));
        for (n, a) in gf.iter().enumerate() {
            for (mode, series) in [
                (GfMode::Triple, a.clone()),
                (GfMode::Pair, a.substitute_t_one()),
            ] {
                let comb = combinatorial_gf_by(n, mode, triple);
                if comb != series {
                    let (element, detail) = self.polynomial_witness(n, mode, &series, &comb);
                    return fail(n, element, detail);
                }
            }
        }
        let pairs: Vec<ExactPolynomial> =
            gf.iter().map(ExactPolynomial::substitute_t_one).collect();
        let cert = certify_q_series(&pairs)?;
        if let Some(m) = cert.mismatch {
            return fail(
                m.n,
                format!("Y={}, q={}", m.y, m.q),
                format!(
                    "q-series gives {}, polynomial gives {}",
                    m.series, m.polynomial
                ),
            );
        }
        let terms = gf.last().map_or(0, |a| a.terms().count());
        Ok(
            VerificationReport::new(claim, 0, n_max, Status::Pass, started)
                .with("certified_points", cert.points)
                .with("terms_at_nmax", terms),
        )
    }

    /// Lex-least permutation whose monomial carries a wrong coefficient.
    fn polynomial_witness(
        &self,
        n: usize,
        mode: GfMode,
        expected: &ExactPolynomial,
        found: &ExactPolynomial,
    ) -> (String, String) {
        let diff = expected - found;
        let (m, c) = diff.terms().next().expect("polynomials differ");
        let m = *m;
        let detail = format!(
            "coefficient of {m}: series {} vs enumeration {} (difference {c})",
            expected.coefficient(&m),
            found.coefficient(&m)
        );
        let target = match mode {
            GfMode::Triple => m,
            GfMode::Pair => Monomial::new(m.y, 0, m.q),
        };
        let hit = Permutations::new(n).find(|p| {
            let t = if mode == GfMode::Triple {
                p.des() as u32
            } else {
                0
            };
            Monomial::new(p.fix() as u32, t, self.stats.maj(p) as u32) == target
        });
        (hit.map_or_else(|| m.to_string(), |p| p.to_string()), detail)
    }

    fn check_groups(
        &self,
        prefix: &str,
        groups: &[&[&str]],
        n_max: usize,
    ) -> Result<Vec<VerificationReport>, VerifyError> {
        self.budget.check(n_max)?;
        let mut reports = Vec::new();
        for (g, names) in groups.iter().enumerate() {
            let started = Instant::now();
            let claim = format!("{prefix}/{}", g + 1);
            let profiles: Vec<StatProfile> =
                names.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
            let listing = profiles
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let mut status = Status::Pass;
            'outer: for n in 0..=n_max {
                let dists: Vec<Distribution> = profiles
                    .iter()
                    .map(|p| self.distribution(n, p))
                    .collect::<Result<_, _>>()?;
                for k in 1..profiles.len() {
                    if dists[k] != dists[0] {
                        status = Status::Fail(self.distribution_witness(
                            n,
                            (&profiles[0], &dists[0]),
                            (&profiles[k], &dists[k]),
                        ));
                        break 'outer;
                    }
                }
            }
            let done = status == Status::Pass;
            let mut r = VerificationReport::new(&claim, 0, n_max, status, started)
                .with("profiles", listing);
            if done {
                r = r.with("checked", (0..=n_max).map(factorial).sum::<u64>());
            }
            reports.push(r);
        }
        Ok(reports)
    }

    /// Lex-least `σ` whose tuple under either profile is counted unequally.
    fn distribution_witness(
        &self,
        n: usize,
        (pa, da): (&StatProfile, &Distribution),
        (pb, db): (&StatProfile, &Distribution),
    ) -> Witness {
        let unequal = |k: &[StatValue]| da.count(k) != db.count(k);
        for p in Permutations::new(n) {
            for key in [self.stats.tuple(pa, &p), self.stats.tuple(pb, &p)] {
                if unequal(&key) {
                    return Witness {
                        n,
                        element: p.to_string(),
                        detail: format!(
                            "{pa} vs {pb}: {} occurs {} vs {} times",
                            render_tuple(&key),
                            da.count(&key),
                            db.count(&key)
                        ),
                    };
                }
            }
        }
        unreachable!("distinct distributions over the same domain have a discrepant key")
    }

    pub fn check_pairs(&self, n_max: usize) -> Result<Vec<VerificationReport>, VerifyError> {
        self.check_groups("pairs", &PAIR_GROUPS, n_max)
    }

    pub fn check_triples(&self, n_max: usize) -> Result<Vec<VerificationReport>, VerifyError> {
        let mut reports = self.check_groups("triples", &TRIPLE_GROUPS, n_max)?;
        let s = self.stats;
        let wb = &self.word_base;
        reports.push(self.pointwise("f3-transport", n_max, |p| match f3(p, wb) {
            Ok(r) => mismatch(
                "(fix, maz, Der) vs (fix, maf, Der) of image",
                (p.fix(), s.maz(p), decomp::der(p).to_string()),
                (r.fix(), s.maf(&r), decomp::der(&r).to_string()),
            ),
            Err(e) => Some(e.to_string()),
        })?);
        reports.push(
            self.pointwise("f3-prime-transport", n_max, |p| match f3_prime(p, wb) {
                Ok(r) => mismatch(
                    "(pix, imaj, Desar) vs (pix, mag, Desar) of image",
                    (decomp::pix(p), s.imaj(p), decomp::desar(p).to_string()),
                    (decomp::pix(&r), s.mag(&r), decomp::desar(&r).to_string()),
                ),
                Err(e) => Some(e.to_string()),
            })?,
        );
        Ok(reports)
    }

    pub fn check_propositions(&self, n_max: usize) -> Result<Vec<VerificationReport>, VerifyError> {
        self.budget.check(n_max)?;
        let s = self.stats;
        let dw = &self.dw_base;
        let mut reports = Vec::new();

        reports.push(
            self.pointwise("dw-loc-fix-maf", n_max, |t| match dw_loc(t, dw) {
                Ok(r) => first_some([
                    mismatch(
                        "FIX vs PIX of image",
                        members(t.fix_set()),
                        members(decomp::pix_set(&r)),
                    ),
                    mismatch("maf vs mag of image", s.maf(t), s.mag(&r)),
                ]),
                Err(e) => Some(e.to_string()),
            })?,
        );
        reports.push(
            self.pointwise("dw-loc-dez-ides", n_max, |t| match dw_loc(t, dw) {
                Ok(r) => first_some([
                    mismatch(
                        "(FIX, DEZ) vs (PIX, IDES) of image",
                        (members(t.fix_set()), members(decomp::dez_set(t))),
                        (members(decomp::pix_set(&r)), members(r.ides_set())),
                    ),
                    mismatch(
                        "(fix, maz) vs (pix, imaj) of image",
                        (t.fix(), s.maz(t)),
                        (decomp::pix(&r), s.imaj(&r)),
                    ),
                ]),
                Err(e) => Some(e.to_string()),
            })?,
        );
        reports.push(self.check_dw_loc_example()?);
        reports.push(self.check_f2(n_max)?);
        reports.push(self.pointwise("f2-prime", n_max, |p| {
            let r = f2_prime(p);
            first_some([
                mismatch("inv of image vs imaj", r.inv(), s.imaj(p)),
                mismatch(
                    "DES of image vs DES",
                    members(r.des_set()),
                    members(p.des_set()),
                ),
            ])
        })?);
        reports.push(self.pointwise("f2-loc", n_max, |p| {
            let r = f2_loc(p);
            mismatch(
                "(PIX, mag) vs (PIX, inv) of image",
                (members(decomp::pix_set(p)), s.mag(p)),
                (members(decomp::pix_set(&r)), r.inv()),
            )
        })?);
        reports.push(self.pointwise("f2-prime-pix", n_max, |p| {
            let r = f2_prime(p);
            mismatch(
                "(pix, inv) of image vs (pix, imaj)",
                (decomp::pix(&r), r.inv()),
                (decomp::pix(p), s.imaj(p)),
            )
        })?);
        reports.push(self.check_phi_oracle(n_max)?);
        reports.push(self.check_chz_oracle(n_max)?);
        reports.push(self.check_dw_oracle(n_max)?);
        reports.push(self.check_word_oracle(n_max)?);
        reports.push(self.pointwise("zder-encoding", n_max, |p| {
            let z = zder(p);
            let d = fixed_decomposition(p);
            first_some([
                mismatch("FIX vs Zero", members(d.fix_set), members(z.zero_set())),
                mismatch(
                    "Der vs Pos",
                    d.derangement_part.word().to_vec(),
                    z.positive_part(),
                ),
                mismatch("maf vs mafz", s.maf(p), s.mafz(&z)),
                mismatch(
                    "DEZ vs DES",
                    members(decomp::dez_set(p)),
                    members(z.des_set()),
                ),
            ])
        })?);
        reports.push(self.pointwise("zdesar-encoding", n_max, |p| {
            let z = zdesar(p);
            let d = pixed_decomposition(p);
            first_some([
                mismatch("PIX vs Zero", members(d.pix_set), members(z.zero_set())),
                mismatch(
                    "inverse of Desar vs Pos",
                    d.desarrangement_part.inverse().into_word(),
                    z.positive_part(),
                ),
                mismatch("mag vs mafz", s.mag(p), s.mafz(&z)),
                mismatch("IDES vs DES", members(p.ides_set()), members(z.des_set())),
            ])
        })?);
        reports.push(self.pointwise("dw-routes", n_max, |p| {
            let w = zder(p);
            match (dw_word(&w, dw), dw_word_by_composition(&w, dw)) {
                (Ok(a), Ok(b)) => mismatch(
                    &format!("dw({w}) by positive part vs by composition"),
                    a.to_string(),
                    b.to_string(),
                ),
                (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
            }
        })?);
        reports.push(self.check_class_counts(n_max)?);
        reports.push(self.check_word_commutation(n_max)?);
        reports.push(self.check_square(n_max)?);
        reports.push(self.check_literal_vectors()?);
        Ok(reports)
    }

    /// Inversion count equals `maj`, `IDES` is kept, and `F2` is injective.
    fn check_f2(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        let s = self.stats;
        let r = self.pointwise("f2", n_max, |p| {
            let r = f2(p);
            first_some([
                mismatch("inv of image vs maj", r.inv(), s.maj(p)),
                mismatch(
                    "IDES of image vs IDES",
                    members(r.ides_set()),
                    members(p.ides_set()),
                ),
            ])
        })?;
        if r.failed() {
            return Ok(r);
        }
        let started = Instant::now();
        for n in 0..=n_max {
            let mut seen: BTreeMap<Permutation, Permutation> = BTreeMap::new();
            for p in Permutations::new(n) {
                if let Some(prev) = seen.insert(f2(&p), p.clone()) {
                    let w = Witness {
                        n,
                        element: p.to_string(),
                        detail: format!("same image as {prev}"),
                    };
                    return Ok(VerificationReport::new(
                        "f2",
                        0,
                        n_max,
                        Status::Fail(w),
                        started,
                    ));
                }
            }
        }
        Ok(r.with("bijective", "yes"))
    }

    /// The worked `DW^loc` example with DW pinned at `512364 ↦ 623145`
    /// (or the registered literal table for order 6).
    fn check_dw_loc_example(&self) -> Result<VerificationReport, VerifyError> {
        let started = Instant::now();
        let claim = "dw-loc-example";
        let pinned;
        let base = if self.dw_base.has_plugin(&6) {
            &self.dw_base
        } else {
            let mut b = matched_dw_base();
            let mut t = dw_oracle(6)?;
            t.pin(&"512364".parse().unwrap(), &"623145".parse().unwrap())?;
            register_dw_table(&mut b, t)?;
            pinned = b;
            &pinned
        };
        let tau: Permutation = "182453697".parse().unwrap();
        let sigma = dw_loc(&tau, base)?;
        let s = self.stats;
        let detail = first_some([
            mismatch("image", sigma.to_string(), "1 4 5 9 3 6 2 7 8".to_string()),
            mismatch("FIX", members(tau.fix_set()), vec![1, 4, 5]),
            mismatch(
                "PIX of image",
                members(decomp::pix_set(&sigma)),
                vec![1, 4, 5],
            ),
            mismatch("maf", s.maf(&tau), 10),
            mismatch("mag of image", s.mag(&sigma), 10),
            mismatch("DEZ", members(decomp::dez_set(&tau)), vec![2, 3, 8]),
            mismatch("IDES of image", members(sigma.ides_set()), vec![2, 3, 8]),
        ]);
        let status = match detail {
            None => Status::Pass,
            Some(detail) => Status::Fail(Witness {
                n: 9,
                element: tau.to_string(),
                detail,
            }),
        };
        Ok(VerificationReport::new(claim, 9, 9, status, started).with("image", sigma))
    }

    fn oracle_report<F>(&self, claim: &str, n_max: usize, build: F) -> VerificationReport
    where
        F: Fn(usize) -> Result<usize, BijectionError>,
    {
        let started = Instant::now();
        let mut pairs = 0;
        for n in 0..=n_max {
            match build(n) {
                Ok(k) => pairs += k,
                Err(e) => {
                    let element = match &e {
                        BijectionError::FiberMismatch { key, .. } => key.clone(),
                        _ => String::new(),
                    };
                    let w = Witness {
                        n,
                        element,
                        detail: e.to_string(),
                    };
                    return VerificationReport::new(claim, 0, n_max, Status::Fail(w), started);
                }
            }
        }
        VerificationReport::new(claim, 0, n_max, Status::Pass, started).with("pairs", pairs)
    }

    /// Φ: `(fix, DEZ, Der) → (fix, DES, Der)` fibers match on `S_n`.
    pub fn check_phi_oracle(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        Ok(self.oracle_report("oracle/phi", n_max, |n| {
            let t = bijections::phi_oracle(n)?;
            bijections::validate_phi_table(&t)?;
            Ok(t.len())
        }))
    }

    /// CHZ: `(fix, maf, Der) → (fix, maj, Der)` fibers match on `S_n`.
    pub fn check_chz_oracle(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        Ok(self.oracle_report("oracle/chz", n_max, |n| {
            let t = bijections::chz_oracle(n)?;
            bijections::validate_chz_table(&t)?;
            Ok(t.len())
        }))
    }

    /// DW: `DES` on `D_m` matches `IDES` on `K_m`.
    pub fn check_dw_oracle(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        Ok(self.oracle_report("oracle/dw", n_max, |m| {
            let t = dw_oracle(m)?;
            bijections::validate_dw_table(&t)?;
            Ok(t.len())
        }))
    }

    /// Word-level F3: `maj` matches `mafz` on every shuffle class of length
    /// `n` arising from either encoding.
    pub fn check_word_oracle(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        Ok(self.oracle_report("oracle/word-f3", n_max, |n| {
            let classes: BTreeSet<ShuffleClassId> = derangement_word_classes(n)
                .chain(desarrangement_word_classes(n))
                .collect();
            let mut total = 0;
            for c in &classes {
                let t = bijections::word_f3_oracle(c)?;
                bijections::validate_word_table(&t)?;
                total += t.len();
            }
            Ok(total)
        }))
    }

    /// `#D_n = #K_n`, both counted by enumeration.
    pub fn check_class_counts(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        let started = Instant::now();
        let mut counts = Vec::new();
        for n in 0..=n_max {
            let d = enumerate_derangements(n).count();
            let k = enumerate_desarrangements(n).count();
            if d != k {
                let w = Witness {
                    n,
                    element: format!("n={n}"),
                    detail: format!("{d} derangements vs {k} desarrangements"),
                };
                return Ok(VerificationReport::new(
                    "class-counts",
                    0,
                    n_max,
                    Status::Fail(w),
                    started,
                ));
            }
            counts.push(d.to_string());
        }
        Ok(
            VerificationReport::new("class-counts", 0, n_max, Status::Pass, started)
                .with("counts", counts.join(",")),
        )
    }

    /// `dw ∘ F3 = F3 ∘ dw` on `S_n^Der`. Binding only on words whose source
    /// and target classes both carry literal tables.
    pub fn check_word_commutation(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        let (dw, wb) = (&self.dw_base, &self.word_base);
        let mut words = Vec::new();
        for n in 0..=n_max {
            for c in derangement_word_classes(n) {
                words.extend(c.members());
            }
        }
        self.commutation_report("dw-f3-commute", n_max, words, |w: &ZeroWord| {
            let target = dw_word(w, dw)?;
            let literal = wb.has_plugin(&ShuffleClassId::of(w))
                && wb.has_plugin(&ShuffleClassId::of(&target));
            let lhs = dw_word(&word_f3(w, wb)?, dw)?;
            let rhs = word_f3(&target, wb)?;
            Ok((
                literal,
                lhs == rhs,
                format!("dw(F3 w) = {lhs}, F3(dw w) = {rhs}"),
                w.len(),
            ))
        })
    }

    /// `DW^loc ∘ F3 = F3′ ∘ DW^loc` on `S_n`, binding as for
    /// [`Verifier::check_word_commutation`].
    pub fn check_square(&self, n_max: usize) -> Result<VerificationReport, VerifyError> {
        self.budget.check(n_max)?;
        let (dw, wb) = (&self.dw_base, &self.word_base);
        let perms: Vec<Permutation> = (0..=n_max).flat_map(Permutations::new).collect();
        self.commutation_report("dw-loc-f3-square", n_max, perms, |p: &Permutation| {
            let down = dw_loc(p, dw)?;
            let literal = wb.has_plugin(&ShuffleClassId::of(&zder(p)))
                && wb.has_plugin(&ShuffleClassId::of(&zdesar(&down)));
            let lhs = dw_loc(&f3(p, wb)?, dw)?;
            let rhs = f3_prime(&down, wb)?;
            Ok((
                literal,
                lhs == rhs,
                format!("DW^loc(F3 p) = {lhs}, F3'(DW^loc p) = {rhs}"),
                p.order(),
            ))
        })
    }

    fn commutation_report<T: fmt::Display>(
        &self,
        claim: &str,
        n_max: usize,
        elements: Vec<T>,
        check: impl Fn(&T) -> Result<(bool, bool, String, usize), BijectionError>,
    ) -> Result<VerificationReport, VerifyError> {
        let started = Instant::now();
        let (mut total, mut agree, mut literal_total) = (0usize, 0usize, 0usize);
        let mut first_gap: Option<(usize, String, String)> = None;
        for x in &elements {
            let (literal, ok, detail, n) = check(x)?;
            total += 1;
            agree += ok as usize;
            if literal {
                literal_total += 1;
                if !ok {
                    let w = Witness {
                        n,
                        element: x.to_string(),
                        detail,
                    };
                    return Ok(VerificationReport::new(
                        claim,
                        0,
                        n_max,
                        Status::Fail(w),
                        started,
                    ));
                }
            } else if !ok && first_gap.is_none() {
                first_gap = Some((n, x.to_string(), detail));
            }
        }
        let status = if literal_total > 0 && literal_total == total {
            Status::Pass
        } else {
            let mut note = format!("{agree} of {total} commute under the matched oracle");
            if let Some((n, x, d)) = &first_gap {
                note += &format!("; first exception n={n} at {x}: {d}");
            }
            Status::Informative(note)
        };
        Ok(VerificationReport::new(claim, 0, n_max, status, started)
            .with("literal_checked", literal_total))
    }

    /// `1735264 ↦ 7431562` under F3, `1365472 ↦ 3564271` under F3′ and
    /// `DW(4312) = 3241`; each is binding when a literal table covers it.
    pub fn check_literal_vectors(&self) -> Result<VerificationReport, VerifyError> {
        let started = Instant::now();
        let p = |s: &str| -> Permutation { s.parse().unwrap() };
        let (sigma, rho, der) = (p("1735264"), p("1365472"), p("4312"));
        let wb = &self.word_base;
        let cases = [
            (
                "F3(1735264)",
                wb.has_plugin(&ShuffleClassId::of(&zder(&sigma))),
                f3(&sigma, wb)?,
                p("7431562"),
            ),
            (
                "F3'(1365472)",
                wb.has_plugin(&ShuffleClassId::of(&zdesar(&rho))),
                f3_prime(&rho, wb)?,
                p("3564271"),
            ),
            (
                "DW(4312)",
                self.dw_base.has_plugin(&4),
                self.dw_base.table(&4)?.apply(&der)?.clone(),
                p("3241"),
            ),
        ];
        let mut observed = Vec::new();
        let mut binding = 0;
        for (name, literal, got, want) in &cases {
            let got_s: String = got.word().iter().map(|x| x.to_string()).collect();
            observed.push(format!("{name}={got_s}"));
            if *literal {
                binding += 1;
                if got != want {
                    let w = Witness {
                        n: got.order(),
                        element: name.to_string(),
                        detail: format!("literal table gives {got}, expected {want}"),
                    };
                    return Ok(VerificationReport::new(
                        "literal-vectors",
                        4,
                        7,
                        Status::Fail(w),
                        started,
                    ));
                }
            }
        }
        let status = if binding == cases.len() {
            Status::Pass
        } else {
            Status::Informative(format!(
                "{binding} of {} vectors covered by literal tables; observed {}",
                cases.len(),
                observed.join(" ")
            ))
        };
        Ok(
            VerificationReport::new("literal-vectors", 4, 7, status, started)
                .with("literal_checked", binding),
        )
    }
}
