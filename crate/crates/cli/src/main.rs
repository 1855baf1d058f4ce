use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fixmahon::bijections::{
    self, chz_oracle, dw_oracle, import_table, phi_oracle, word_f3_oracle, LoadedTable, TableKind,
};
use fixmahon::decomp::{self, ShuffleClassId};
use fixmahon::perm::{PermError, Permutation, ZeroWord};
use fixmahon::qseries::{combinatorial_gf, gf_coefficients_q, gf_coefficients_t, GfMode};
use fixmahon::verifier::{
    all_binding_pass, render_key_value, render_table, Budget, Mutation, StatProfile, Statistics,
    Suite, Verifier, VerifyError,
};

#[derive(Parser, Debug)]
#[command(
    name = "fixmahon",
    version,
    about = "Fix-Mahonian permutation statistics, bijections and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print statistics of permutations
    Stat {
        #[command(flatten)]
        input: PermInput,
        /// Comma-separated names, e.g. fix,maz,maf,DEZ
        #[arg(long)]
        stats: String,
    },
    /// Print a decomposition or word encoding
    Decomp {
        #[command(flatten)]
        input: PermInput,
        #[arg(long, value_enum)]
        kind: DecompKind,
        /// Decode a word with zeros back to its permutation (zder, zdesar)
        #[arg(long, conflicts_with_all = ["perm", "file"])]
        word: Option<String>,
    },
    /// Apply a bijection
    Bij {
        #[command(flatten)]
        input: PermInput,
        #[arg(long, value_enum)]
        map: MapKind,
        /// Literal table replacing the matched oracle where it applies
        #[arg(long)]
        base: Vec<PathBuf>,
    },
    /// Print the generating polynomial A_n
    Poly {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: PolyMode,
        /// One `y t q coefficient` line per term instead of the expression
        #[arg(long)]
        structured: bool,
    },
    /// Run verification suites
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        nmax: usize,
        /// Also write key=value records to this file
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Worker threads for enumeration (output does not depend on it)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Lift the enumeration budget
        #[arg(long)]
        allow_large: bool,
        /// Corrupt the statistic kernel: maj-off-by-one
        #[arg(long)]
        mutate: Option<Mutation>,
        /// Include elapsed times
        #[arg(long)]
        timing: bool,
        /// Literal DW or word-level tables
        #[arg(long)]
        table: Vec<PathBuf>,
    },
    /// Write an oracle table as two-column text
    OracleExport {
        #[arg(long)]
        kind: TableKind,
        /// Order of the permutations (dw: m; phi, chz: n; word-f3: word length)
        #[arg(long)]
        n: usize,
        /// Positive letters of the shuffle class, for word-f3
        #[arg(long)]
        positive: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a two-column table
    OracleImport {
        #[arg(long)]
        file: PathBuf,
        /// Overrides the `# kind:` line
        #[arg(long)]
        kind: Option<TableKind>,
    },
}

#[derive(clap::Args, Debug)]
struct PermInput {
    /// Permutation in one-line notation, e.g. "1 8 2 4 5 3 6 9 7" or 182453697
    #[arg(long)]
    perm: Option<String>,
    /// One permutation per line; output lines are prefixed by the input
    #[arg(long, conflicts_with = "perm")]
    file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DecompKind {
    Fixed,
    Pixed,
    Zder,
    Zdesar,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MapKind {
    F2,
    F2p,
    F2loc,
    Dw,
    Dwloc,
    F3,
    F3p,
    Phi,
    Chz,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PolyMode {
    GfT,
    GfQ,
    CombTriple,
    CombPair,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Table,
    Kv,
}

/// Bad input rather than a failed check; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let refused = matches!(e.downcast_ref(), Some(VerifyError::BudgetExceeded { .. }));
            if refused
                || e.is::<UsageError>()
                || e.is::<PermError>()
                || e.is::<decomp::DecompError>()
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// `Ok(false)` when a binding check failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Stat { input, stats } => {
            let profile: StatProfile = stats.parse().map_err(|e| usage(format!("{e}")))?;
            let kernel = Statistics::default();
            for_each_perm(&input, |p| {
                let parts: Vec<String> = profile
                    .stats()
                    .iter()
                    .map(|&s| format!("{s}={}", kernel.value(s, p)))
                    .collect();
                Ok(parts.join(" "))
            })?;
            Ok(true)
        }
        Command::Decomp { input, kind, word } => {
            if let Some(w) = word {
                let w: ZeroWord = w.parse()?;
                let p = match kind {
                    DecompKind::Zder => decomp::zder_inverse(&w)?,
                    DecompKind::Zdesar => decomp::zdesar_inverse(&w)?,
                    _ => return Err(usage("--word decodes only zder and zdesar words")),
                };
                println!("{p}");
                return Ok(true);
            }
            for_each_perm(&input, |p| {
                Ok(match kind {
                    DecompKind::Fixed => {
                        let d = decomp::fixed_decomposition(p);
                        format!("FIX={} Der=({})", d.fix_set, d.derangement_part)
                    }
                    DecompKind::Pixed => {
                        let d = decomp::pixed_decomposition(p);
                        format!("PIX={} Desar=({})", d.pix_set, d.desarrangement_part)
                    }
                    DecompKind::Zder => decomp::zder(p).to_string(),
                    DecompKind::Zdesar => decomp::zdesar(p).to_string(),
                })
            })?;
            Ok(true)
        }
        Command::Bij { input, map, base } => {
            let mut verifier = Verifier::default();
            let mut literal: Vec<LoadedTable> = Vec::new();
            for path in &base {
                let t = load_table(path, None)?;
                if let Err(t) = verifier.register(t) {
                    literal.push(t);
                }
            }
            for_each_perm(&input, |p| {
                Ok(apply_map(map, p, &verifier, &literal)?.to_string())
            })?;
            Ok(true)
        }
        Command::Poly {
            n,
            mode,
            structured,
        } => {
            let poly = match mode {
                PolyMode::GfT => gf_coefficients_t(n)?.swap_remove(n),
                PolyMode::GfQ => gf_coefficients_q(n)?.swap_remove(n),
                PolyMode::CombTriple => combinatorial_gf(n, GfMode::Triple),
                PolyMode::CombPair => combinatorial_gf(n, GfMode::Pair),
            };
            if structured {
                print!("{}", poly.to_structured());
            } else {
                println!("{poly}");
            }
            Ok(true)
        }
        Command::Verify {
            suite,
            nmax,
            report,
            format,
            jobs,
            allow_large,
            mutate,
            timing,
            table,
        } => {
            let suite: Suite = suite.parse().map_err(|e| usage(format!("{e}")))?;
            let budget = if allow_large {
                Budget::unlimited()
            } else {
                Budget::from_env()?
            };
            let stats = Statistics::new(mutate.unwrap_or_default());
            let mut verifier = Verifier::new(stats, budget, jobs);
            for path in &table {
                if let Err(t) = verifier.register(load_table(path, None)?) {
                    eprintln!(
                        "note: {} validated but not used by the suites",
                        t.describe()
                    );
                }
            }
            let reports = verifier.run(suite, nmax)?;
            match format {
                Format::Table => print!("{}", render_table(&reports, timing)),
                Format::Kv => print!("{}", render_key_value(&reports, timing)),
            }
            if let Some(path) = report {
                fs::write(&path, render_key_value(&reports, timing))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(all_binding_pass(&reports))
        }
        Command::OracleExport {
            kind,
            n,
            positive,
            out,
        } => {
            let table = match kind {
                TableKind::Dw => LoadedTable::Dw(dw_oracle(n)?, n),
                TableKind::Phi => LoadedTable::Phi(phi_oracle(n)?, n),
                TableKind::Chz => LoadedTable::Chz(chz_oracle(n)?, n),
                TableKind::WordF3 => {
                    let letters = positive.ok_or_else(|| usage("word-f3 needs --positive"))?;
                    let v: Vec<usize> = letters
                        .split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse().map_err(|_| usage(format!("bad letter {t:?}"))))
                        .collect::<Result<_>>()?;
                    let class = ShuffleClassId::new(n, v).map_err(|e| usage(e.to_string()))?;
                    LoadedTable::WordF3(word_f3_oracle(&class)?, class)
                }
            };
            let text = table.to_text();
            match out {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::OracleImport { file, kind } => match load_table(&file, kind) {
            Ok(t) => {
                println!("valid {} ({} pairs)", t.describe(), t.len());
                Ok(true)
            }
            Err(e) => {
                println!("invalid: {e:#}");
                Ok(false)
            }
        },
    }
}

fn load_table(path: &Path, kind: Option<TableKind>) -> Result<LoadedTable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    import_table(&text, kind).with_context(|| format!("table {}", path.display()))
}

fn apply_map(
    map: MapKind,
    p: &Permutation,
    v: &Verifier,
    literal: &[LoadedTable],
) -> Result<Permutation> {
    let n = p.order();
    let literal_on = |kind: TableKind| {
        literal.iter().find_map(|t| match (kind, t) {
            (TableKind::Phi, LoadedTable::Phi(t, m)) | (TableKind::Chz, LoadedTable::Chz(t, m))
                if *m == n =>
            {
                Some(t)
            }
            _ => None,
        })
    };
    Ok(match map {
        MapKind::F2 => bijections::f2(p),
        MapKind::F2p => bijections::f2_prime(p),
        MapKind::F2loc => bijections::f2_loc(p),
        MapKind::Dw => {
            if !decomp::is_derangement(p) {
                bail!(usage(format!("{p} is not a derangement")));
            }
            v.dw_base().table(&n)?.apply(p)?.clone()
        }
        MapKind::Dwloc => bijections::dw_loc(p, v.dw_base())?,
        MapKind::F3 => bijections::f3(p, v.word_base())?,
        MapKind::F3p => bijections::f3_prime(p, v.word_base())?,
        MapKind::Phi => match literal_on(TableKind::Phi) {
            Some(t) => t.apply(p)?.clone(),
            None => phi_oracle(n)?.apply(p)?.clone(),
        },
        MapKind::Chz => match literal_on(TableKind::Chz) {
            Some(t) => t.apply(p)?.clone(),
            None => chz_oracle(n)?.apply(p)?.clone(),
        },
    })
}

/// Runs `f` on `--perm`, or on every line of `--file` with the input echoed.
fn for_each_perm(input: &PermInput, f: impl Fn(&Permutation) -> Result<String>) -> Result<()> {
    match (&input.perm, &input.file) {
        (Some(s), None) => {
            let p: Permutation = s.parse()?;
            println!("{}", f(&p)?);
        }
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let p: Permutation = line
                    .parse()
                    .map_err(|e: PermError| anyhow!(e).context(format!("line {}", i + 1)))?;
                println!("{p}\t{}", f(&p)?);
            }
        }
        _ => return Err(usage("give --perm or --file")),
    }
    Ok(())
}
