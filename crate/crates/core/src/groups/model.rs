use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::cache;
use crate::error::{Error, Result};

/// Bumped whenever the normal-form encoding changes; part of the fingerprint.
pub const NORMAL_FORM_VERSION: u32 = 1;

/// Largest sphere any model will materialize unless configured otherwise.
pub const DEFAULT_SPHERE_BUDGET: usize = 2_000_000;

/// The finitely generated groups the crate knows how to compute in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Free group on `n` generators.
    Free(u32),
    /// Free abelian group of rank `d` with the standard basis.
    Zd(u32),
    /// Integer Heisenberg group generated by `x`, `y`.
    Heisenberg,
    /// Cyclic group of order `p` generated by `u`.
    Cyclic(u32),
    /// Free product `Z/p * Z/q` generated by `a`, `b`.
    FreeProductCyclic(u32, u32),
    /// `Z/2 * Z/2` generated by the two involutions `s`, `t`.
    DihedralInfinity,
}

impl ModelKind {
    pub fn validate(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            ModelKind::Free(0) => bad("free(n) needs n >= 1".into()),
            ModelKind::Zd(0) => bad("zd(d) needs d >= 1".into()),
            ModelKind::Cyclic(p) if p < 2 => bad(format!("cyclic(p) needs p >= 2, got {p}")),
            ModelKind::FreeProductCyclic(p, q) if p < 2 || q < 2 => {
                bad(format!("fpc(p,q) needs p,q >= 2, got ({p},{q})"))
            }
            _ => Ok(self),
        }
    }

    /// Amenability is declared, not detected.
    pub fn is_amenable(self) -> bool {
        match self {
            ModelKind::Free(n) => n == 1,
            ModelKind::Zd(_) | ModelKind::Heisenberg | ModelKind::Cyclic(_) => true,
            ModelKind::FreeProductCyclic(p, q) => p == 2 && q == 2,
            ModelKind::DihedralInfinity => true,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ModelKind::Cyclic(_))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Free(n) => write!(f, "free({n})"),
            ModelKind::Zd(d) => write!(f, "zd({d})"),
            ModelKind::Heisenberg => write!(f, "heisenberg"),
            ModelKind::Cyclic(p) => write!(f, "cyclic({p})"),
            ModelKind::FreeProductCyclic(p, q) => write!(f, "fpc({p},{q})"),
            ModelKind::DihedralInfinity => write!(f, "dihedral-infinity"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    /// Accepts `free(2)`, `free2`, `zd(3)`, `zd3`, `heisenberg`, `cyclic(5)`,
    /// `fpc(3,2)`, `free-product-cyclic(3,2)`, `dihedral-infinity`, `dinf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let parse_err = || Error::Parse(format!("unrecognized model spec '{s}'"));
        let (name, args) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..].strip_suffix(')').ok_or_else(parse_err)?;
                let args = inner
                    .split(',')
                    .map(|a| a.trim().parse::<u32>().map_err(|_| parse_err()))
                    .collect::<Result<Vec<_>>>()?;
                (s[..i].to_string(), args)
            }
            None => {
                let split = s
                    .find(|c: char| c.is_ascii_digit())
                    .unwrap_or(s.len());
                let (name, digits) = s.split_at(split);
                let args = if digits.is_empty() {
                    vec![]
                } else {
                    vec![digits.parse::<u32>().map_err(|_| parse_err())?]
                };
                (name.to_string(), args)
            }
        };
        let kind = match (name.as_str(), args.as_slice()) {
            ("free", [n]) => ModelKind::Free(*n),
            ("zd", [d]) | ("z", [d]) => ModelKind::Zd(*d),
            ("heisenberg", []) => ModelKind::Heisenberg,
            ("cyclic", [p]) => ModelKind::Cyclic(*p),
            ("fpc", [p, q]) | ("free-product-cyclic", [p, q]) => {
                ModelKind::FreeProductCyclic(*p, *q)
            }
            ("dihedral-infinity", []) | ("dinf", []) => ModelKind::DihedralInfinity,
            _ => return Err(parse_err()),
        };
        kind.validate()
    }
}

/// A group element in canonical normal form.
///
/// * free: reduced word, letter `i+1` for generator `i` and `-(i+1)` for its
///   inverse;
/// * zd: coordinate tuple;
/// * heisenberg: `(a, b, c)` for `x^a y^b z^c`, `z = x y x^-1 y^-1`;
/// * cyclic: `[a]` with `0 <= a < p`;
/// * free products: alternating syllables, `+e` for `a^e`, `-e` for `b^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(pub Vec<i32>);

impl Element {
    pub fn letters(&self) -> &[i32] {
        &self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("bad normal form '{s}'")))?;
        if inner.trim().is_empty() {
            return Ok(Element(vec![]));
        }
        inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i32>()
                    .map_err(|_| Error::Parse(format!("bad normal form '{s}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Element)
    }
}

/// The ordered elements of one sphere `E_k = { x : l(x) = k }`.
#[derive(Debug)]
pub struct SphereIndex {
    pub radius: usize,
    pub elements: Vec<Element>,
    index: HashMap<Element, usize>,
}

impl SphereIndex {
    pub(crate) fn new(radius: usize, mut elements: Vec<Element>) -> Self {
        elements.sort();
        elements.dedup();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), i))
            .collect();
        SphereIndex {
            radius,
            elements,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, x: &Element) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.index.contains_key(x)
    }
}

/// A finitely generated group with exact arithmetic and cached spheres.
///
/// Spheres are computed by breadth-first search in the Cayley graph and are
/// immutable once built; the model can be shared across threads.
pub struct GroupModel {
    kind: ModelKind,
    generators: Vec<Element>,
    budget: usize,
    cache_dir: Option<PathBuf>,
    spheres: RwLock<Vec<Arc<SphereIndex>>>,
}

impl fmt::Debug for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupModel")
            .field("kind", &self.kind)
            .field("generators", &self.generators)
            .field("budget", &self.budget)
            .finish()
    }
}

/// Builds a model from its kind, validating the parameters.
pub fn make_model(kind: ModelKind) -> Result<GroupModel> {
    GroupModel::new(kind)
}

impl GroupModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let kind = kind.validate()?;
        let mut generators = match kind {
            ModelKind::Free(n) => (1..=n as i32)
                .flat_map(|i| [Element(vec![i]), Element(vec![-i])])
                .collect(),
            ModelKind::Zd(d) => {
                let d = d as usize;
                (0..d)
                    .flat_map(|i| {
                        [1, -1].map(|s| {
                            let mut v = vec![0; d];
                            v[i] = s;
                            Element(v)
                        })
                    })
                    .collect()
            }
            ModelKind::Heisenberg => vec![
                Element(vec![1, 0, 0]),
                Element(vec![-1, 0, 0]),
                Element(vec![0, 1, 0]),
                Element(vec![0, -1, 0]),
            ],
            ModelKind::Cyclic(p) => vec![Element(vec![1]), Element(vec![p as i32 - 1])],
            ModelKind::FreeProductCyclic(p, q) => vec![
                Element(vec![1]),
                Element(vec![p as i32 - 1]),
                Element(vec![-1]),
                Element(vec![-(q as i32 - 1)]),
            ],
            ModelKind::DihedralInfinity => vec![Element(vec![1]), Element(vec![-1])],
        };
        generators.sort();
        generators.dedup();
        let identity = identity_of(kind);
        let e = SphereIndex::new(0, vec![identity]);
        Ok(GroupModel {
            kind,
            generators,
            budget: DEFAULT_SPHERE_BUDGET,
            cache_dir: None,
            spheres: RwLock::new(vec![Arc::new(e)]),
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Persists spheres under `dir`, keyed by the model fingerprint.
    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn is_amenable(&self) -> bool {
        self.kind.is_amenable()
    }

    pub fn fingerprint(&self) -> String {
        fingerprint_of(self.kind)
    }

    pub fn identity(&self) -> Element {
        identity_of(self.kind)
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        *x == self.identity()
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        match self.kind {
            ModelKind::Free(_) => {
                let mut out = x.0.clone();
                for &l in &y.0 {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element(out)
            }
            ModelKind::Zd(_) => Element(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect()),
            ModelKind::Heisenberg => {
                let (a1, b1, c1) = (x.0[0], x.0[1], x.0[2]);
                let (a2, b2, c2) = (y.0[0], y.0[1], y.0[2]);
                Element(vec![a1 + a2, b1 + b2, c1 + c2 - a2 * b1])
            }
            ModelKind::Cyclic(p) => Element(vec![(x.0[0] + y.0[0]).rem_euclid(p as i32)]),
            ModelKind::FreeProductCyclic(p, q) => syllable_product(x, y, p as i32, q as i32),
            ModelKind::DihedralInfinity => syllable_product(x, y, 2, 2),
        }
    }

    pub fn invert(&self, x: &Element) -> Element {
        match self.kind {
            ModelKind::Free(_) => Element(x.0.iter().rev().map(|l| -l).collect()),
            ModelKind::Zd(_) => Element(x.0.iter().map(|a| -a).collect()),
            ModelKind::Heisenberg => {
                let (a, b, c) = (x.0[0], x.0[1], x.0[2]);
                Element(vec![-a, -b, -c - a * b])
            }
            ModelKind::Cyclic(p) => Element(vec![(-x.0[0]).rem_euclid(p as i32)]),
            ModelKind::FreeProductCyclic(p, q) => syllable_inverse(x, p as i32, q as i32),
            ModelKind::DihedralInfinity => syllable_inverse(x, 2, 2),
        }
    }

    /// Word length with respect to the generating set.
    ///
    /// Closed forms for every model except the Heisenberg group, whose
    /// lengths come from the breadth-first spheres.
    pub fn length(&self, x: &Element) -> Result<usize> {
        Ok(match self.kind {
            ModelKind::Free(_) => x.0.len(),
            ModelKind::Zd(_) => x.0.iter().map(|a| a.unsigned_abs() as usize).sum(),
            ModelKind::Cyclic(p) => {
                let a = x.0[0] as u32;
                a.min(p - a) as usize
            }
            ModelKind::FreeProductCyclic(p, q) => syllable_length(x, p, q),
            ModelKind::DihedralInfinity => x.0.len(),
            ModelKind::Heisenberg => {
                // l(x) >= |a| + |b| since z lies in the commutator subgroup.
                let mut k = (x.0[0].unsigned_abs() + x.0[1].unsigned_abs()) as usize;
                loop {
                    if self.sphere(k)?.contains(x) {
                        return Ok(k);
                    }
                    k += 1;
                }
            }
        })
    }

    /// Left-invariant metric `rho(x, y) = l(x^-1 y)`.
    pub fn distance(&self, x: &Element, y: &Element) -> Result<usize> {
        self.length(&self.multiply(&self.invert(x), y))
    }

    /// The sphere of radius `k`, computed on first use.
    pub fn sphere(&self, k: usize) -> Result<Arc<SphereIndex>> {
        {
            let spheres = self.spheres.read().expect("sphere lock poisoned");
            if let Some(s) = spheres.get(k) {
                return Ok(s.clone());
            }
        }
        let mut spheres = self.spheres.write().expect("sphere lock poisoned");
        while spheres.len() <= k {
            let j = spheres.len();
            let next = match self.load_cached(j) {
                Some(s) => s,
                None => {
                    let prev = &spheres[j - 1];
                    let before = if j >= 2 { Some(&spheres[j - 2]) } else { None };
                    let s = self.bfs_layer(j, prev, before.map(|v| &**v))?;
                    self.store_cached(&s);
                    s
                }
            };
            spheres.push(Arc::new(next));
        }
        Ok(spheres[k].clone())
    }

    /// Spheres `E_0..=E_r`.
    pub fn spheres_upto(&self, r: usize) -> Result<Vec<Arc<SphereIndex>>> {
        self.sphere(r)?;
        let spheres = self.spheres.read().expect("sphere lock poisoned");
        Ok(spheres[..=r].to_vec())
    }

    fn bfs_layer(
        &self,
        radius: usize,
        prev: &SphereIndex,
        before: Option<&SphereIndex>,
    ) -> Result<SphereIndex> {
        let mut seen: HashSet<Element> = HashSet::new();
        for x in &prev.elements {
            for s in &self.generators {
                let y = self.multiply(x, s);
                if prev.contains(&y) || before.is_some_and(|b| b.contains(&y)) {
                    continue;
                }
                if seen.insert(y) && seen.len() > self.budget {
                    return Err(Error::Budget {
                        what: format!("sphere E_{radius} of {}", self.kind),
                        needed: seen.len(),
                        budget: self.budget,
                    });
                }
            }
        }
        Ok(SphereIndex::new(radius, seen.into_iter().collect()))
    }

    fn load_cached(&self, radius: usize) -> Option<SphereIndex> {
        let dir = self.cache_dir.as_ref()?;
        let elements = cache::read_sphere(dir, self, radius).ok()??;
        Some(SphereIndex::new(radius, elements))
    }

    fn store_cached(&self, sphere: &SphereIndex) {
        if let Some(dir) = &self.cache_dir {
            // A failed cache write only costs recomputation later.
            let _ = cache::write_sphere(dir, self, sphere);
        }
    }
}

pub(crate) fn fingerprint_of(kind: ModelKind) -> String {
    let mut h = Sha256::new();
    h.update(format!("{kind}|nf-v{NORMAL_FORM_VERSION}").as_bytes());
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn identity_of(kind: ModelKind) -> Element {
    match kind {
        ModelKind::Free(_) | ModelKind::FreeProductCyclic(..) | ModelKind::DihedralInfinity => {
            Element(vec![])
        }
        ModelKind::Zd(d) => Element(vec![0; d as usize]),
        ModelKind::Heisenberg => Element(vec![0, 0, 0]),
        ModelKind::Cyclic(_) => Element(vec![0]),
    }
}

fn order_of(syllable: i32, p: i32, q: i32) -> i32 {
    if syllable > 0 {
        p
    } else {
        q
    }
}

fn syllable_product(x: &Element, y: &Element, p: i32, q: i32) -> Element {
    let mut out = x.0.clone();
    for &s in &y.0 {
        match out.last().copied() {
            Some(t) if (t > 0) == (s > 0) => {
                let ord = order_of(s, p, q);
                let e = (t.abs() + s.abs()) % ord;
                out.pop();
                if e != 0 {
                    out.push(if s > 0 { e } else { -e });
                }
            }
            _ => out.push(s),
        }
    }
    Element(out)
}

fn syllable_inverse(x: &Element, p: i32, q: i32) -> Element {
    Element(
        x.0.iter()
            .rev()
            .map(|&s| {
                let ord = order_of(s, p, q);
                let e = ord - s.abs();
                if s > 0 {
                    e
                } else {
                    -e
                }
            })
            .collect(),
    )
}

fn syllable_length(x: &Element, p: u32, q: u32) -> usize {
    x.0.iter()
        .map(|&s| {
            let ord = if s > 0 { p } else { q };
            let e = s.unsigned_abs();
            e.min(ord - e) as usize
        })
        .sum()
}
