//! Root lattices, glue constructions and the built-in lattice catalog.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::enumerate::{short_vectors, EnumConfig, EnumError};
use crate::quadform::{is_positive_definite, GramMatrix};
use crate::reduce::{hermite_row_basis, lll_gram};

const EMBEDDED: &str = include_str!("../data/catalog.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown lattice {name:?}; valid names: {}", valid.join(", "))]
    UnknownName { name: String, valid: Vec<String> },
    #[error("invalid root component {0}")]
    InvalidComponent(String),
    #[error("{name}: pairing {value} between basis vectors {i} and {j} is not an integer")]
    NotIntegral {
        name: String,
        i: usize,
        j: usize,
        value: String,
    },
    #[error("{name}: basis vector {i} has odd norm {norm}")]
    NotEven { name: String, i: usize, norm: BigInt },
    #[error("{name}: determinant is {det}, expected 1")]
    NotUnimodular { name: String, det: BigInt },
    #[error("{name}: glue vectors do not span a full-rank lattice")]
    RankDeficient { name: String },
    #[error("{name}: glue row has {got} coordinates, components need {expected}")]
    GlueLength { name: String, expected: usize, got: usize },
    #[error("{name}: {roots} roots found, catalog expects {expected}")]
    RootCountMismatch { name: String, expected: u64, roots: u64 },
    #[error("catalog line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read catalog {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootFamily {
    A,
    D,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootComponent {
    pub family: RootFamily,
    pub rank: usize,
}

impl RootComponent {
    pub fn new(family: RootFamily, rank: usize) -> Result<Self, CatalogError> {
        let ok = match family {
            RootFamily::A => rank >= 1,
            RootFamily::D => rank >= 4,
            RootFamily::E => (6..=8).contains(&rank),
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(CatalogError::InvalidComponent(format!("{family:?}{rank}")))
        }
    }

    /// Order of the discriminant group, i.e. the determinant of the Cartan matrix.
    pub fn discriminant(&self) -> u64 {
        match self.family {
            RootFamily::A => self.rank as u64 + 1,
            RootFamily::D => 4,
            RootFamily::E => 9 - self.rank as u64,
        }
    }

    pub fn coxeter_number(&self) -> u64 {
        let n = self.rank as u64;
        match (self.family, n) {
            (RootFamily::A, _) => n + 1,
            (RootFamily::D, _) => 2 * n - 2,
            (RootFamily::E, 6) => 12,
            (RootFamily::E, 7) => 18,
            _ => 30,
        }
    }

    pub fn root_count(&self) -> u64 {
        self.rank as u64 * self.coxeter_number()
    }
}

impl fmt::Display for RootComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for RootComponent {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CatalogError::InvalidComponent(s.to_string());
        let family = match s.chars().next() {
            Some('A') => RootFamily::A,
            Some('D') => RootFamily::D,
            Some('E') => RootFamily::E,
            _ => return Err(bad()),
        };
        let rank = s[1..].parse().map_err(|_| bad())?;
        Self::new(family, rank)
    }
}

/// Cartan matrix of a simply-laced root system in the usual node numbering:
/// `A_n` and `D_n` are chains (the last `D_n` node hangs off node `n-3`),
/// `E_n` is the chain `0-2-3-…-(n-1)` with node 1 attached to node 3.
pub fn cartan_matrix(family: RootFamily, rank: usize) -> Result<GramMatrix, CatalogError> {
    let c = RootComponent::new(family, rank)?;
    let n = c.rank;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    match family {
        RootFamily::A => edges.extend((0..n - 1).map(|i| (i, i + 1))),
        RootFamily::D => {
            edges.extend((0..n - 2).map(|i| (i, i + 1)));
            edges.push((n - 3, n - 1));
        }
        RootFamily::E => {
            let chain: Vec<usize> = [0, 2, 3, 4, 5, 6, 7].into_iter().take(n - 1).collect();
            edges.extend(chain.windows(2).map(|w| (w[0], w[1])));
            edges.push((1, 3));
        }
    }
    let mut rows = vec![vec![0i64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        rows[a][b] = -1;
        rows[b][a] = -1;
    }
    Ok(GramMatrix::from_i64_rows(&rows).expect("Cartan matrix is symmetric"))
}

/// Rational coordinates in the simple-root basis of the spec's components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueVector {
    pub coordinates: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    pub name: String,
    pub components: Vec<RootComponent>,
    pub glue: Vec<GlueVector>,
    pub scale: BigRational,
}

impl LatticeSpec {
    pub fn new(name: impl Into<String>, components: Vec<RootComponent>) -> Self {
        Self {
            name: name.into(),
            components,
            glue: Vec::new(),
            scale: BigRational::one(),
        }
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    fn ambient_gram(&self) -> GramMatrix {
        self.components
            .iter()
            .map(|c| cartan_matrix(c.family, c.rank).expect("validated component"))
            .fold(GramMatrix::empty(), |acc, g| acc.direct_sum(&g))
    }

    /// Root system label such as `A5^4D4`.
    pub fn root_system(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.components.len() {
            let c = self.components[i];
            let run = self.components[i..].iter().take_while(|&&x| x == c).count();
            out.push_str(&c.to_string());
            if run > 1 {
                out.push_str(&format!("^{run}"));
            }
            i += run;
        }
        out
    }
}

/// A realized lattice: a Gram matrix plus lazily computed metadata.
#[derive(Debug, Clone)]
pub struct Lattice {
    name: String,
    gram: GramMatrix,
    minimum: Arc<OnceLock<(u64, u64)>>,
}

impl Lattice {
    pub fn new(name: impl Into<String>, gram: GramMatrix) -> Self {
        Self {
            name: name.into(),
            gram,
            minimum: Arc::new(OnceLock::new()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.dim()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// `(minimum norm, number of vectors of that norm)`.
    pub fn minimum(&self) -> Result<(u64, u64), CatalogError> {
        if let Some(&m) = self.minimum.get() {
            return Ok(m);
        }
        let mut bound = 2;
        let found = loop {
            let idx = short_vectors(&self.gram, bound, &EnumConfig::from_env())?;
            if let Some(b) = idx.buckets().first() {
                break (b.norm(), b.len() as u64);
            }
            if self.rank() == 0 {
                break (0, 0);
            }
            bound += 2;
        };
        Ok(*self.minimum.get_or_init(|| found))
    }

    pub fn min_norm(&self) -> Result<u64, CatalogError> {
        Ok(self.minimum()?.0)
    }

    pub fn kissing_number(&self) -> Result<u64, CatalogError> {
        Ok(self.minimum()?.1)
    }

    /// Number of norm-2 vectors.
    pub fn root_count(&self) -> Result<u64, CatalogError> {
        let (min, count) = self.minimum()?;
        Ok(if min == 2 { count } else { 0 })
    }
}

pub fn build_root_lattice(c: RootComponent) -> Lattice {
    Lattice::new(
        c.to_string(),
        cartan_matrix(c.family, c.rank).expect("validated component"),
    )
}

/// Realizes `spec`: the span of the component root lattices and the glue
/// vectors, saturated to a basis and LLL-reduced. The result must be even
/// and unimodular.
pub fn glue(spec: &LatticeSpec) -> Result<Lattice, CatalogError> {
    let n = spec.rank();
    let name = spec.name.clone();
    let ambient = spec.ambient_gram();
    for g in &spec.glue {
        if g.coordinates.len() != n {
            return Err(CatalogError::GlueLength {
                name,
                expected: n,
                got: g.coordinates.len(),
            });
        }
    }
    // common denominator of all generators
    let mut den = BigInt::one();
    for g in &spec.glue {
        for x in &g.coordinates {
            den = den.lcm(x.denom());
        }
    }
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { den.clone() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    for g in &spec.glue {
        rows.push(g.coordinates.iter().map(|x| (x * &den).to_integer()).collect());
    }
    let basis = hermite_row_basis(rows);
    if basis.len() != n {
        return Err(CatalogError::RankDeficient { name });
    }
    // Gram of the rational basis B/den: scale · B·A·Bᵀ / den²
    let den2 = BigRational::from_integer(&den * &den);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        let ai: Vec<BigInt> = (0..n)
            .map(|k| (0..n).map(|l| &basis[i][l] * ambient.entry(l, k)).sum())
            .collect();
        for j in 0..n {
            let dot: BigInt = (0..n).map(|k| &ai[k] * &basis[j][k]).sum();
            let v = BigRational::from_integer(dot) * &spec.scale / &den2;
            if !v.is_integer() {
                return Err(CatalogError::NotIntegral {
                    name,
                    i,
                    j,
                    value: v.to_string(),
                });
            }
            entries.push(v.to_integer());
        }
    }
    let gram = GramMatrix::from_row_major_unchecked(n, entries);
    for i in 0..n {
        if gram.entry(i, i).is_odd() {
            return Err(CatalogError::NotEven {
                name,
                i,
                norm: gram.entry(i, i).clone(),
            });
        }
    }
    let det = gram.determinant();
    if !det.is_one() || !is_positive_definite(&gram) {
        return Err(CatalogError::NotUnimodular { name, det });
    }
    Ok(Lattice::new(spec.name.clone(), reduce_basis(&gram)))
}

/// LLL-reduces a Gram matrix so that later enumeration works with small entries.
fn reduce_basis(gram: &GramMatrix) -> GramMatrix {
    match gram.to_i64() {
        Some(g) => {
            let red = lll_gram(&g, gram.dim());
            let n = gram.dim();
            let rows: Vec<Vec<i64>> = red.gram.chunks(n.max(1)).take(n).map(<[i64]>::to_vec).collect();
            GramMatrix::from_i64_rows(&rows).expect("reduced Gram is symmetric")
        }
        None => gram.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub spec: LatticeSpec,
    pub aliases: Vec<String>,
    pub expected_roots: Option<u64>,
}

/// A parsed catalog file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    version: String,
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// The catalog compiled into the library.
    pub fn embedded() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::parse(EMBEDDED).expect("embedded catalog parses"))
    }

    pub fn load(path: &Path) -> Result<Catalog, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let mut version = String::from("unversioned");
        let mut entries: Vec<CatalogEntry> = Vec::new();
        let mut current: Option<CatalogEntry> = None;
        let finish = |cur: &mut Option<CatalogEntry>, entries: &mut Vec<CatalogEntry>| {
            if let Some(e) = cur.take() {
                entries.push(e);
            }
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let err = |message: String| CatalogError::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let rest = rest.trim();
            if key == "version" {
                version = rest.to_string();
                continue;
            }
            if key == "name" {
                finish(&mut current, &mut entries);
                if rest.is_empty() {
                    return Err(err("empty name".into()));
                }
                current = Some(CatalogEntry {
                    spec: LatticeSpec::new(rest, Vec::new()),
                    aliases: Vec::new(),
                    expected_roots: None,
                });
                continue;
            }
            let Some(entry) = current.as_mut() else {
                return Err(err(format!("`{key}` before any `name` line")));
            };
            match key {
                "alias" => entry.aliases.push(rest.to_string()),
                "components" => {
                    for tok in rest.split_whitespace() {
                        let (comp, count) = match tok.split_once('*') {
                            Some((c, k)) => (c, k.parse::<usize>().map_err(|_| err(format!("bad count in {tok}")))?),
                            None => (tok, 1),
                        };
                        let c: RootComponent = comp.parse().map_err(|e: CatalogError| err(e.to_string()))?;
                        entry.spec.components.extend(std::iter::repeat_n(c, count));
                    }
                }
                "scale" => {
                    entry.spec.scale = parse_rational(rest).ok_or_else(|| err(format!("bad scale {rest}")))?;
                    if !entry.spec.scale.is_positive() {
                        return Err(err("scale must be positive".into()));
                    }
                }
                "glue" => {
                    let coordinates = rest
                        .split_whitespace()
                        .map(|t| parse_rational(t).ok_or_else(|| err(format!("bad rational {t}"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    entry.spec.glue.push(GlueVector { coordinates });
                }
                "expected_roots" => {
                    entry.expected_roots = Some(rest.parse().map_err(|_| err(format!("bad root count {rest}")))?);
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        finish(&mut current, &mut entries);
        for (i, e) in entries.iter().enumerate() {
            if e.spec.components.is_empty() {
                return Err(CatalogError::Parse {
                    line: 0,
                    message: format!("{} has no components", e.spec.name),
                });
            }
            let names = std::iter::once(&e.spec.name).chain(&e.aliases);
            for n in names {
                if entries[..i].iter().any(|p| p.spec.name == *n || p.aliases.contains(n)) {
                    return Err(CatalogError::Parse {
                        line: 0,
                        message: format!("duplicate name {n}"),
                    });
                }
            }
        }
        Ok(Catalog { version, entries })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Every accepted name: primary names followed by their aliases.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.push(e.spec.name.clone());
            out.extend(e.aliases.iter().cloned());
        }
        out
    }

    /// Primary names of all entries of the given rank, in file order.
    pub fn names_of_rank(&self, rank: usize) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.spec.rank() == rank)
            .map(|e| e.spec.name.clone())
            .collect()
    }

    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.spec.name == name || e.aliases.iter().any(|a| a == name))
    }

    /// Realizes a catalog lattice. Names `E8^n` not listed in the file are
    /// built as orthogonal sums.
    pub fn lattice(&self, name: &str) -> Result<Lattice, CatalogError> {
        if let Some(e) = self.entry(name) {
            let mut lat = glue(&e.spec)?;
            lat.name = name.to_string();
            return Ok(lat);
        }
        if let Some(k) = name.strip_prefix("E8^").and_then(|k| k.parse::<usize>().ok()) {
            if k >= 1 {
                let spec = LatticeSpec::new(name, vec![RootComponent::new(RootFamily::E, 8)?; k]);
                return glue(&spec);
            }
        }
        Err(CatalogError::UnknownName {
            name: name.to_string(),
            valid: self.names(),
        })
    }

    /// Realizes the lattice and checks its root count against the catalog.
    pub fn validated(&self, name: &str) -> Result<Lattice, CatalogError> {
        let lat = self.lattice(name)?;
        if let Some(expected) = self.entry(name).and_then(|e| e.expected_roots) {
            let roots = lat.root_count()?;
            if roots != expected {
                return Err(CatalogError::RootCountMismatch {
                    name: name.to_string(),
                    expected,
                    roots,
                });
            }
        }
        Ok(lat)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.parse().ok()?;
    let q: BigInt = q.parse().ok()?;
    if q.is_zero() {
        return None;
    }
    Some(BigRational::new(p, q))
}

/// A lattice from the embedded catalog.
pub fn builtin(name: &str) -> Result<Lattice, CatalogError> {
    Catalog::embedded().lattice(name)
}

/// Root count predicted by the component root systems. A rescaled ambient
/// form pushes the component roots to norm `2·scale`, so only unscaled
/// specs have a prediction.
pub fn predicted_roots(spec: &LatticeSpec) -> Option<u64> {
    spec.scale
        .is_one()
        .then(|| spec.components.iter().map(RootComponent::root_count).sum())
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {})", self.name, self.rank())
    }
}
