//! Explicit finite bijections and the fiber-matching construction.

use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use super::BijectionError;

/// A finite bijection stored as forward and backward maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionTable<T: Ord> {
    domain_tag: String,
    forward: BTreeMap<T, T>,
    backward: BTreeMap<T, T>,
}

impl<T: Ord + Clone + Display> BijectionTable<T> {
    /// Builds a table from `(element, image)` pairs, rejecting repeated
    /// elements or repeated images.
    pub fn from_pairs(
        domain_tag: impl Into<String>,
        pairs: impl IntoIterator<Item = (T, T)>,
    ) -> Result<Self, BijectionError> {
        let domain_tag = domain_tag.into();
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (x, y) in pairs {
            if forward.contains_key(&x) {
                return Err(BijectionError::NotBijective {
                    tag: domain_tag,
                    detail: format!("element {x} listed twice"),
                });
            }
            if let Some(prev) = backward.get(&y) {
                return Err(BijectionError::NotBijective {
                    tag: domain_tag,
                    detail: format!("{prev} and {x} share the image {y}"),
                });
            }
            forward.insert(x.clone(), y.clone());
            backward.insert(y, x);
        }
        Ok(BijectionTable {
            domain_tag,
            forward,
            backward,
        })
    }

    pub fn domain_tag(&self) -> &str {
        &self.domain_tag
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn apply(&self, x: &T) -> Result<&T, BijectionError> {
        self.forward
            .get(x)
            .ok_or_else(|| BijectionError::NotInDomain {
                element: x.to_string(),
                tag: self.domain_tag.clone(),
            })
    }

    pub fn apply_inverse(&self, y: &T) -> Result<&T, BijectionError> {
        self.backward
            .get(y)
            .ok_or_else(|| BijectionError::NotInDomain {
                element: y.to_string(),
                tag: format!("image of {}", self.domain_tag),
            })
    }

    /// Pairs in increasing order of the element.
    pub fn iter(&self) -> impl Iterator<Item = (&T, &T)> {
        self.forward.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().all(|(x, y)| x == y)
    }

    /// Forces `from ↦ to` by exchanging images with whichever element
    /// currently maps to `to`. Both must already be present.
    pub fn pin(&mut self, from: &T, to: &T) -> Result<(), BijectionError> {
        let old_image = self.apply(from)?.clone();
        let old_source = self.apply_inverse(to)?.clone();
        self.forward.insert(from.clone(), to.clone());
        self.forward.insert(old_source.clone(), old_image.clone());
        self.backward.insert(to.clone(), from.clone());
        self.backward.insert(old_image, old_source);
        Ok(())
    }

    /// Two tab-separated columns, `element<TAB>image`, after a
    /// `# domain: <tag>` header line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# domain: {}\n", self.domain_tag);
        for (x, y) in &self.forward {
            out.push_str(&format!("{x}\t{y}\n"));
        }
        out
    }
}

impl<T> BijectionTable<T>
where
    T: Ord + Clone + Display + FromStr,
    T::Err: Display,
{
    /// Reads the format written by [`BijectionTable::to_text`]. Blank lines
    /// and other `#` comments are skipped; a missing header leaves the tag
    /// as `fallback_tag`.
    pub fn from_text(text: &str, fallback_tag: &str) -> Result<Self, BijectionError> {
        let mut tag = fallback_tag.to_string();
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(t) = comment.trim().strip_prefix("domain:") {
                    tag = t.trim().to_string();
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| BijectionError::Parse {
                line: idx + 1,
                message: msg,
            };
            let (lhs, rhs) = raw
                .split_once('\t')
                .ok_or_else(|| bad("expected two tab-separated columns".into()))?;
            let x = lhs.trim().parse::<T>().map_err(|e| bad(e.to_string()))?;
            let y = rhs.trim().parse::<T>().map_err(|e| bad(e.to_string()))?;
            pairs.push((x, y));
        }
        BijectionTable::from_pairs(tag, pairs)
    }
}

type KeyFn<'a, T, K> = Box<dyn Fn(&T) -> K + 'a>;

/// What a matched oracle must transport: `target_stat(image) =
/// source_stat(element)`, and, when present, `grouping_key` is preserved.
pub struct StatTransportSpec<'a, T, K> {
    pub source_stat: KeyFn<'a, T, K>,
    pub target_stat: KeyFn<'a, T, K>,
    pub grouping_key: Option<KeyFn<'a, T, K>>,
}

impl<'a, T, K> StatTransportSpec<'a, T, K> {
    pub fn new(source_stat: impl Fn(&T) -> K + 'a, target_stat: impl Fn(&T) -> K + 'a) -> Self {
        StatTransportSpec {
            source_stat: Box::new(source_stat),
            target_stat: Box::new(target_stat),
            grouping_key: None,
        }
    }

    pub fn grouped_by(mut self, grouping_key: impl Fn(&T) -> K + 'a) -> Self {
        self.grouping_key = Some(Box::new(grouping_key));
        self
    }

    fn source_key(&self, x: &T) -> (Option<K>, K) {
        (
            self.grouping_key.as_ref().map(|g| g(x)),
            (self.source_stat)(x),
        )
    }

    fn target_key(&self, x: &T) -> (Option<K>, K) {
        (
            self.grouping_key.as_ref().map(|g| g(x)),
            (self.target_stat)(x),
        )
    }

    /// Checks the transport property on a single pair.
    pub fn transports(&self, x: &T, y: &T) -> bool
    where
        K: PartialEq,
    {
        self.source_key(x) == self.target_key(y)
    }
}

type Fibers<K, T> = BTreeMap<(Option<K>, K), (Vec<T>, Vec<T>)>;

/// Pairs every `(grouping, source_stat)` fiber of `domain` with the
/// `(grouping, target_stat)` fiber of `codomain` carrying the same key,
/// matching elements by rank after sorting each fiber.
///
/// A fiber of unequal size on the two sides yields
/// [`BijectionError::FiberMismatch`] for the smallest such key: the
/// underlying equidistribution fails.
pub fn matched_oracle<T, K>(
    domain_tag: impl Into<String>,
    domain: impl IntoIterator<Item = T>,
    codomain: impl IntoIterator<Item = T>,
    spec: &StatTransportSpec<'_, T, K>,
) -> Result<BijectionTable<T>, BijectionError>
where
    T: Ord + Clone + Display,
    K: Ord + Debug,
{
    let mut fibers: Fibers<K, T> = BTreeMap::new();
    for x in domain {
        fibers.entry(spec.source_key(&x)).or_default().0.push(x);
    }
    for y in codomain {
        fibers.entry(spec.target_key(&y)).or_default().1.push(y);
    }
    let mut pairs = Vec::new();
    for (key, (mut xs, mut ys)) in fibers {
        if xs.len() != ys.len() {
            let key = match &key.0 {
                Some(g) => format!("{g:?} / {:?}", key.1),
                None => format!("{:?}", key.1),
            };
            return Err(BijectionError::FiberMismatch {
                key,
                domain: xs.len(),
                codomain: ys.len(),
            });
        }
        xs.sort();
        ys.sort();
        pairs.extend(xs.into_iter().zip(ys));
    }
    BijectionTable::from_pairs(domain_tag, pairs)
}

type Builder<K, T> = fn(&K) -> Result<BijectionTable<T>, BijectionError>;

/// A family of tables indexed by `K` (an order, or a shuffle class),
/// built on first use and cached. Tables registered with
/// [`TableFamily::insert_plugin`] take precedence over the builder.
pub struct TableFamily<K: Ord, T: Ord> {
    build: Builder<K, T>,
    plugins: BTreeMap<K, Arc<BijectionTable<T>>>,
    cache: Mutex<BTreeMap<K, Arc<BijectionTable<T>>>>,
}

impl<K: Ord + Clone, T: Ord> TableFamily<K, T> {
    pub fn new(build: Builder<K, T>) -> Self {
        TableFamily {
            build,
            plugins: BTreeMap::new(),
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn insert_plugin(&mut self, key: K, table: BijectionTable<T>) {
        self.plugins.insert(key, Arc::new(table));
    }

    pub fn has_plugin(&self, key: &K) -> bool {
        self.plugins.contains_key(key)
    }

    pub fn has_plugins(&self) -> bool {
        !self.plugins.is_empty()
    }

    pub fn table(&self, key: &K) -> Result<Arc<BijectionTable<T>>, BijectionError> {
        if let Some(t) = self.plugins.get(key) {
            return Ok(Arc::clone(t));
        }
        if let Some(t) = self.cache.lock().unwrap().get(key) {
            return Ok(Arc::clone(t));
        }
        // Built outside the lock; a concurrent duplicate build is harmless.
        let built = Arc::new((self.build)(key)?);
        let mut cache = self.cache.lock().unwrap();
        Ok(Arc::clone(cache.entry(key.clone()).or_insert(built)))
    }
}
