//! Fiber-matched stand-ins for bijections whose constructions live
//! elsewhere, and validation of literal tables supplied as plug-ins.
//!
//! | oracle | domain → codomain | grouping | source → target |
//! |--------|-------------------|----------|-----------------|
//! | DW     | `D_m → K_m`       | none     | `DES → IDES`    |
//! | Φ      | `S_n → S_n`       | `(fix, Der)` | `DEZ → DES` |
//! | CHZ    | `S_n → S_n`       | `(fix, Der)` | `maf → maj` |
//! | word F3 | `Sh(0^{n−m}v)` onto itself | none | `maj → mafz` |

use std::collections::BTreeSet;

use super::table::{matched_oracle, BijectionTable, StatTransportSpec, TableFamily};
use super::BijectionError;
use crate::decomp::{
    self, enumerate_derangements, enumerate_desarrangements, in_desarrangement_class, mafz,
    ShuffleClassId,
};
use crate::perm::{factorial, Permutation, Permutations, StatValue, ZeroWord};

pub type StatKey = Vec<StatValue>;

/// DW base bijections `D_m → K_m`, keyed by `m`.
pub type DwBase = TableFamily<usize, Permutation>;

/// Word-level F3 tables, one per shuffle class.
pub type WordBase = TableFamily<ShuffleClassId, ZeroWord>;

pub fn dw_spec() -> StatTransportSpec<'static, Permutation, StatKey> {
    StatTransportSpec::new(
        |p: &Permutation| vec![p.des_set().into()],
        |p: &Permutation| vec![p.ides_set().into()],
    )
}

fn fix_and_der(p: &Permutation) -> StatKey {
    let d = decomp::fixed_decomposition(p);
    vec![d.fix_set.len().into(), d.derangement_part.into()]
}

pub fn phi_spec() -> StatTransportSpec<'static, Permutation, StatKey> {
    StatTransportSpec::new(
        |p: &Permutation| vec![decomp::dez_set(p).into()],
        |p: &Permutation| vec![p.des_set().into()],
    )
    .grouped_by(fix_and_der)
}

pub fn chz_spec() -> StatTransportSpec<'static, Permutation, StatKey> {
    StatTransportSpec::new(
        |p: &Permutation| vec![decomp::maf(p).into()],
        |p: &Permutation| vec![p.maj().into()],
    )
    .grouped_by(fix_and_der)
}

pub fn word_f3_spec() -> StatTransportSpec<'static, ZeroWord, StatKey> {
    StatTransportSpec::new(
        |w: &ZeroWord| vec![w.maj().into()],
        |w: &ZeroWord| vec![mafz(w).into()],
    )
}

pub fn dw_oracle(m: usize) -> Result<BijectionTable<Permutation>, BijectionError> {
    matched_oracle(
        format!("D_{m} -> K_{m}"),
        enumerate_derangements(m),
        enumerate_desarrangements(m),
        &dw_spec(),
    )
}

pub fn phi_oracle(n: usize) -> Result<BijectionTable<Permutation>, BijectionError> {
    matched_oracle(
        format!("S_{n}"),
        Permutations::new(n),
        Permutations::new(n),
        &phi_spec(),
    )
}

pub fn chz_oracle(n: usize) -> Result<BijectionTable<Permutation>, BijectionError> {
    matched_oracle(
        format!("S_{n}"),
        Permutations::new(n),
        Permutations::new(n),
        &chz_spec(),
    )
}

pub fn word_f3_oracle(class: &ShuffleClassId) -> Result<BijectionTable<ZeroWord>, BijectionError> {
    matched_oracle(
        class.to_string(),
        class.members(),
        class.members(),
        &word_f3_spec(),
    )
}

pub fn matched_dw_base() -> DwBase {
    TableFamily::new(|m| dw_oracle(*m))
}

pub fn matched_word_base() -> WordBase {
    TableFamily::new(word_f3_oracle)
}

fn violation<T: std::fmt::Display>(x: &T, y: &T, detail: &str) -> BijectionError {
    BijectionError::TransportViolation {
        element: x.to_string(),
        image: y.to_string(),
        detail: detail.to_string(),
    }
}

fn check_domain<T: Ord + Clone + std::fmt::Display>(
    table: &BijectionTable<T>,
    expected: impl IntoIterator<Item = T>,
) -> Result<(), BijectionError> {
    let expected: BTreeSet<T> = expected.into_iter().collect();
    let found: BTreeSet<T> = table.iter().map(|(x, _)| x.clone()).collect();
    if found != expected {
        let missing = expected.difference(&found).next();
        let extra = found.difference(&expected).next();
        return Err(BijectionError::Incomplete {
            tag: table.domain_tag().to_string(),
            expected: expected.len(),
            found: found.len(),
            detail: match (missing, extra) {
                (_, Some(e)) => format!("{e} does not belong to the domain"),
                (Some(m), None) => format!("{m} is missing"),
                (None, None) => String::new(),
            },
        });
    }
    Ok(())
}

fn common_order(table: &BijectionTable<Permutation>) -> usize {
    table.iter().next().map_or(0, |(x, _)| x.order())
}

/// Checks a literal DW table: total on `D_m`, onto `K_m`, `IDES ∘ DW = DES`.
/// Returns `m`.
pub fn validate_dw_table(table: &BijectionTable<Permutation>) -> Result<usize, BijectionError> {
    // D_0 holds the empty permutation, so only D_1 is empty
    let m = if table.is_empty() {
        1
    } else {
        common_order(table)
    };
    check_domain(table, enumerate_derangements(m))?;
    let spec = dw_spec();
    for (x, y) in table.iter() {
        if y.order() != m || !in_desarrangement_class(y) {
            return Err(violation(
                x,
                y,
                "image is not a desarrangement of the same order",
            ));
        }
        if !spec.transports(x, y) {
            return Err(violation(x, y, "IDES of image differs from DES of element"));
        }
    }
    Ok(m)
}

fn validate_on_symmetric_group(
    table: &BijectionTable<Permutation>,
    spec: &StatTransportSpec<'_, Permutation, StatKey>,
    what: &str,
) -> Result<usize, BijectionError> {
    let n = common_order(table);
    if table.len() as u64 != factorial(n) {
        check_domain(table, Permutations::new(n))?;
    }
    for (x, y) in table.iter() {
        if x.order() != n || y.order() != n {
            return Err(violation(x, y, "mixed orders"));
        }
        if !spec.transports(x, y) {
            return Err(violation(x, y, what));
        }
    }
    Ok(n)
}

/// Checks a literal Φ table on `S_n`. Returns `n`.
pub fn validate_phi_table(table: &BijectionTable<Permutation>) -> Result<usize, BijectionError> {
    validate_on_symmetric_group(
        table,
        &phi_spec(),
        "(fix, DEZ, Der) not carried to (fix, DES, Der)",
    )
}

/// Checks a literal CHZ table on `S_n`. Returns `n`.
pub fn validate_chz_table(table: &BijectionTable<Permutation>) -> Result<usize, BijectionError> {
    validate_on_symmetric_group(
        table,
        &chz_spec(),
        "(fix, maf, Der) not carried to (fix, maj, Der)",
    )
}

/// Checks a literal word-level F3 table: a bijection of one shuffle class
/// onto itself with `maj w = mafz F3(w)`. Returns the class.
pub fn validate_word_table(
    table: &BijectionTable<ZeroWord>,
) -> Result<ShuffleClassId, BijectionError> {
    let class = match table.iter().next() {
        Some((x, _)) => ShuffleClassId::of(x),
        None => {
            return Err(BijectionError::Incomplete {
                tag: table.domain_tag().to_string(),
                expected: 1,
                found: 0,
                detail: "empty table".into(),
            })
        }
    };
    check_domain(table, class.members())?;
    let spec = word_f3_spec();
    for (x, y) in table.iter() {
        if ShuffleClassId::of(y) != class {
            return Err(violation(x, y, "image leaves the shuffle class"));
        }
        if !spec.transports(x, y) {
            return Err(violation(x, y, "maj of element differs from mafz of image"));
        }
    }
    Ok(class)
}

/// Validates and registers a literal DW table.
pub fn register_dw_table(
    base: &mut DwBase,
    table: BijectionTable<Permutation>,
) -> Result<usize, BijectionError> {
    let m = validate_dw_table(&table)?;
    base.insert_plugin(m, table);
    Ok(m)
}

/// Validates and registers a literal word-level F3 table.
pub fn register_word_table(
    base: &mut WordBase,
    table: BijectionTable<ZeroWord>,
) -> Result<ShuffleClassId, BijectionError> {
    let class = validate_word_table(&table)?;
    base.insert_plugin(class.clone(), table);
    Ok(class)
}

/// Which bijection a literal table claims to realize. Written as a
/// `# kind: <name>` line ahead of the table text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Dw,
    Phi,
    Chz,
    WordF3,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Dw => "dw",
            TableKind::Phi => "phi",
            TableKind::Chz => "chz",
            TableKind::WordF3 => "word-f3",
        }
    }

    /// The kind named by the first `# kind:` line of `text`, if any.
    pub fn detect(text: &str) -> Option<Result<TableKind, BijectionError>> {
        text.lines().enumerate().find_map(|(i, line)| {
            let rest = line
                .trim()
                .strip_prefix('#')?
                .trim()
                .strip_prefix("kind:")?;
            Some(
                rest.trim()
                    .parse()
                    .map_err(|message| BijectionError::Parse {
                        line: i + 1,
                        message,
                    }),
            )
        })
    }
}

impl std::fmt::Display for TableKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            TableKind::Dw,
            TableKind::Phi,
            TableKind::Chz,
            TableKind::WordF3,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown table kind {s:?} (expected dw, phi, chz or word-f3)"))
    }
}

/// A validated literal table.
#[derive(Debug, Clone)]
pub enum LoadedTable {
    Dw(BijectionTable<Permutation>, usize),
    Phi(BijectionTable<Permutation>, usize),
    Chz(BijectionTable<Permutation>, usize),
    WordF3(BijectionTable<ZeroWord>, ShuffleClassId),
}

impl LoadedTable {
    pub fn kind(&self) -> TableKind {
        match self {
            LoadedTable::Dw(..) => TableKind::Dw,
            LoadedTable::Phi(..) => TableKind::Phi,
            LoadedTable::Chz(..) => TableKind::Chz,
            LoadedTable::WordF3(..) => TableKind::WordF3,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            LoadedTable::Dw(t, _) | LoadedTable::Phi(t, _) | LoadedTable::Chz(t, _) => t.len(),
            LoadedTable::WordF3(t, _) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `kind`, then the domain: `m`, `n` or the shuffle class.
    pub fn describe(&self) -> String {
        match self {
            LoadedTable::Dw(_, m) => format!("dw on D_{m}"),
            LoadedTable::Phi(_, n) => format!("phi on S_{n}"),
            LoadedTable::Chz(_, n) => format!("chz on S_{n}"),
            LoadedTable::WordF3(_, c) => format!("word-f3 on {c}"),
        }
    }

    /// Text with a `# kind:` line, readable by [`import_table`].
    pub fn to_text(&self) -> String {
        let body = match self {
            LoadedTable::Dw(t, _) | LoadedTable::Phi(t, _) | LoadedTable::Chz(t, _) => t.to_text(),
            LoadedTable::WordF3(t, _) => t.to_text(),
        };
        format!("# kind: {}\n{body}", self.kind())
    }
}

/// Parses and validates a literal table. `kind` overrides the `# kind:`
/// line; one of the two must be present.
pub fn import_table(text: &str, kind: Option<TableKind>) -> Result<LoadedTable, BijectionError> {
    let kind = match kind {
        Some(k) => k,
        None => TableKind::detect(text).unwrap_or_else(|| {
            Err(BijectionError::Parse {
                line: 1,
                message: "no `# kind:` line and no kind given".into(),
            })
        })?,
    };
    Ok(match kind {
        TableKind::Dw => {
            let t = BijectionTable::from_text(text, "DW")?;
            let m = validate_dw_table(&t)?;
            LoadedTable::Dw(t, m)
        }
        TableKind::Phi => {
            let t = BijectionTable::from_text(text, "Phi")?;
            let n = validate_phi_table(&t)?;
            LoadedTable::Phi(t, n)
        }
        TableKind::Chz => {
            let t = BijectionTable::from_text(text, "CHZ")?;
            let n = validate_chz_table(&t)?;
            LoadedTable::Chz(t, n)
        }
        TableKind::WordF3 => {
            let t = BijectionTable::from_text(text, "F3")?;
            let c = validate_word_table(&t)?;
            LoadedTable::WordF3(t, c)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn dw_small_orders() {
        let t = dw_oracle(3).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(*t.apply(&p("231")).unwrap(), p("312"));
        assert_eq!(*t.apply(&p("312")).unwrap(), p("213"));
        let t = dw_oracle(2).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(*t.apply(&p("21")).unwrap(), p("21"));
        assert_eq!(dw_oracle(1).unwrap().len(), 0);
        assert_eq!(dw_oracle(0).unwrap().len(), 1);
    }

    #[test]
    fn chz_on_one_class() {
        let t = chz_oracle(3).unwrap();
        assert_eq!(*t.apply(&p("132")).unwrap(), p("213"));
        assert_eq!(*t.apply(&p("321")).unwrap(), p("132"));
        assert_eq!(*t.apply(&p("213")).unwrap(), p("321"));
    }

    #[test]
    fn tiny_oracles_are_identities() {
        for n in 0..=2 {
            assert!(phi_oracle(n).unwrap().is_identity(), "phi {n}");
            assert!(chz_oracle(n).unwrap().is_identity(), "chz {n}");
        }
    }

    #[test]
    fn dw_table_validation() {
        let mut t = dw_oracle(4).unwrap();
        assert_eq!(validate_dw_table(&t).unwrap(), 4);
        t.pin(&p("4312"), &p("3241")).unwrap();
        assert_eq!(validate_dw_table(&t).unwrap(), 4);
        // 4312 has DES {1,2}; 2143 has IDES {1,3}
        let bad = BijectionTable::from_pairs(
            "bad",
            t.iter().map(|(x, y)| {
                let y = if *x == p("4312") {
                    p("2143")
                } else if *y == p("2143") {
                    p("3241")
                } else {
                    y.clone()
                };
                (x.clone(), y)
            }),
        )
        .unwrap();
        assert!(matches!(
            validate_dw_table(&bad),
            Err(BijectionError::TransportViolation { .. })
        ));
        let partial = BijectionTable::from_pairs(
            "partial",
            t.iter().skip(1).map(|(x, y)| (x.clone(), y.clone())),
        )
        .unwrap();
        assert!(matches!(
            validate_dw_table(&partial),
            Err(BijectionError::Incomplete { .. })
        ));
    }

    #[test]
    fn word_table_validation() {
        let class = ShuffleClassId::new(5, vec![2, 1]).unwrap();
        let t = word_f3_oracle(&class).unwrap();
        assert_eq!(validate_word_table(&t).unwrap(), class);
        let ident =
            BijectionTable::from_pairs("id", class.members().map(|w| (w.clone(), w))).unwrap();
        assert!(matches!(
            validate_word_table(&ident),
            Err(BijectionError::TransportViolation { .. })
        ));
    }

    #[test]
    fn import_round_trip() {
        let loaded = LoadedTable::Dw(dw_oracle(4).unwrap(), 4);
        let text = loaded.to_text();
        assert!(text.starts_with("# kind: dw\n# domain: D_4 -> K_4\n"));
        let back = import_table(&text, None).unwrap();
        assert_eq!(back.describe(), "dw on D_4");
        assert_eq!(back.len(), 9);

        let class = ShuffleClassId::new(4, vec![2, 1]).unwrap();
        let text = LoadedTable::WordF3(word_f3_oracle(&class).unwrap(), class.clone()).to_text();
        assert!(
            matches!(import_table(&text, None).unwrap(), LoadedTable::WordF3(_, c) if c == class)
        );

        let body = chz_oracle(3).unwrap().to_text();
        assert!(matches!(
            import_table(&body, None),
            Err(BijectionError::Parse { .. })
        ));
        assert!(matches!(
            import_table(&body, Some(TableKind::Chz)),
            Ok(LoadedTable::Chz(_, 3))
        ));
        // the CHZ table does not carry DEZ to DES
        assert!(matches!(
            import_table(&body, Some(TableKind::Phi)),
            Err(BijectionError::TransportViolation { .. })
        ));
    }

    #[test]
    fn registered_plugin_overrides_oracle() {
        let mut base = matched_dw_base();
        let mut t = dw_oracle(6).unwrap();
        t.pin(&p("512364"), &p("623145")).unwrap();
        assert_eq!(register_dw_table(&mut base, t).unwrap(), 6);
        assert!(base.has_plugin(&6));
        assert_eq!(
            *base.table(&6).unwrap().apply(&p("512364")).unwrap(),
            p("623145")
        );
    }
}
