//! Truncated Fourier expansions indexed by classes of even semidefinite forms.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::gram_class::{canonicalize, enumerate_classes, GramClass};
use crate::lattice::intmat::IMat;
use crate::qanalog::{parse_rational, Rational};

/// Weight and nebentypus data carried along with a series.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesMeta {
    /// Half the rank of the underlying lattice.
    pub k: usize,
    pub level: Option<u64>,
    /// `χ(p) = (disc / p)` with this discriminant.
    pub character_discriminant: Option<i64>,
}

/// Anything that can hand out Fourier coefficients on demand.
pub trait CoefficientSource: Sync {
    fn degree(&self) -> usize;
    fn meta(&self) -> SeriesMeta;
    /// Largest trace guaranteed available; `None` means unbounded.
    fn available_bound(&self) -> Option<i64>;
    fn coefficient(&self, class: &GramClass) -> Result<Rational>;
}

/// Largest trace bound accepted from JSON. Canonicalising a class costs a
/// short-vector search up to its diagonal, so larger inputs are not practical.
pub const MAX_JSON_TRACE: i64 = 256;

/// Finitely supported map from classes to rationals. Every class with trace
/// at most `trace_bound` is meaningful (absent entries are zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierMap {
    n: usize,
    meta: SeriesMeta,
    p_context: Option<u64>,
    trace_bound: i64,
    entries: BTreeMap<GramClass, Rational>,
}

impl FourierMap {
    pub fn zero(n: usize, meta: SeriesMeta, trace_bound: i64) -> Self {
        FourierMap { n, meta, p_context: None, trace_bound, entries: BTreeMap::new() }
    }

    /// Builds a map from explicit entries. Panics on a degree mismatch,
    /// which is a programming error for internal callers.
    pub fn from_entries(
        n: usize,
        meta: SeriesMeta,
        trace_bound: i64,
        entries: impl IntoIterator<Item = (GramClass, Rational)>,
    ) -> Self {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        assert!(entries.keys().all(|c| c.n() == n), "class of wrong degree");
        FourierMap { n, meta, p_context: None, trace_bound, entries }
    }

    /// Evaluates a source on every class up to `bound`.
    pub fn materialise(src: &dyn CoefficientSource, bound: i64) -> Result<Self> {
        use rayon::prelude::*;
        if let Some(av) = src.available_bound() {
            if av < bound {
                return Err(Error::InsufficientBound { needed: bound, available: av });
            }
        }
        let classes = enumerate_classes(src.degree(), bound);
        let entries = classes
            .into_par_iter()
            .map(|c| src.coefficient(&c).map(|v| (c, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FourierMap::from_entries(src.degree(), src.meta(), bound, entries))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.meta.k
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }

    pub fn trace_bound(&self) -> i64 {
        self.trace_bound
    }

    pub fn p_context(&self) -> Option<u64> {
        self.p_context
    }

    pub fn with_p_context(mut self, p: u64) -> Self {
        self.p_context = Some(p);
        self
    }

    pub fn get(&self, class: &GramClass) -> Option<&Rational> {
        self.entries.get(class)
    }

    /// Coefficient at an arbitrary form (canonicalised first).
    pub fn at(&self, t: &IMat) -> Result<Rational> {
        self.coefficient(&canonicalize(t)?)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GramClass, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(Zero::is_zero)
    }

    /// Classes within the bound carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<&GramClass> {
        self.entries.iter().filter(|(_, v)| !v.is_zero()).map(|(c, _)| c).collect()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v = &*v * s;
        }
        out
    }

    /// `self + s·other`, truncated to the smaller bound.
    pub fn add_scaled(&self, other: &Self, s: &Rational) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidMatrix(format!("degree {} vs {}", self.n, other.n)));
        }
        let bound = self.trace_bound.min(other.trace_bound);
        let mut out = self.truncate(bound);
        for (c, v) in other.entries.iter().filter(|(c, _)| c.trace() <= bound) {
            let e = out.entries.entry(c.clone()).or_insert_with(Rational::zero);
            *e += v * s;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &Rational::from_integer(1.into()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &Rational::from_integer((-1).into()))
    }

    pub fn truncate(&self, bound: i64) -> Self {
        let mut out = self.clone();
        out.trace_bound = bound.min(self.trace_bound);
        let b = out.trace_bound;
        out.entries.retain(|c, _| c.trace() <= b);
        out
    }

    /// Whether both maps agree on every class up to the common bound.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    pub fn to_json(&self) -> String {
        let doc = JsonMap {
            n: self.n,
            k: self.meta.k,
            level: self.meta.level,
            character_discriminant: self.meta.character_discriminant,
            p_context: self.p_context,
            trace_bound: self.trace_bound,
            records: self
                .entries
                .iter()
                .map(|(c, v)| Record { class_gram: c.rep().clone(), coefficient: rational_string(v) })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serialises") + "\n"
    }

    /// Parses the JSON produced by [`FourierMap::to_json`]. Class matrices are
    /// canonicalised; two records for the same class are an error.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonMap = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if !(0..=MAX_JSON_TRACE).contains(&doc.trace_bound) {
            return Err(Error::Parse(format!("trace bound {} outside 0..={MAX_JSON_TRACE}", doc.trace_bound)));
        }
        if doc.n == 0 || doc.n > 8 {
            return Err(Error::Parse(format!("unsupported degree {}", doc.n)));
        }
        let mut entries = BTreeMap::new();
        for r in doc.records {
            if r.class_gram.len() != doc.n || r.class_gram.iter().any(|row| row.len() != doc.n) {
                return Err(Error::Parse("class matrix has the wrong size".into()));
            }
            let trace: i64 = (0..doc.n).map(|i| r.class_gram[i][i]).sum();
            if r.class_gram.iter().flatten().any(|x| x.unsigned_abs() > MAX_JSON_TRACE as u64) || trace > doc.trace_bound {
                return Err(Error::Parse(format!("class of trace {trace} beyond the trace bound")));
            }
            let c = canonicalize(&r.class_gram).map_err(|e| Error::Parse(e.to_string()))?;
            let v = parse_rational(&r.coefficient)?;
            if entries.insert(c, v).is_some() {
                return Err(Error::Parse("duplicate class".into()));
            }
        }
        let meta = SeriesMeta {
            k: doc.k,
            level: doc.level,
            character_discriminant: doc.character_discriminant,
        };
        Ok(FourierMap { n: doc.n, meta, p_context: doc.p_context, trace_bound: doc.trace_bound, entries })
    }

    /// CSV in the same order as the JSON records: `trace,class,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trace,class_gram,coefficient\n");
        for (c, v) in &self.entries {
            let rows: Vec<String> = c
                .rep()
                .iter()
                .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
                .collect();
            s += &format!("{},{},{}\n", c.trace(), rows.join(";"), rational_string(v));
        }
        s
    }
}

impl CoefficientSource for FourierMap {
    fn degree(&self) -> usize {
        self.n
    }

    fn meta(&self) -> SeriesMeta {
        self.meta.clone()
    }

    fn available_bound(&self) -> Option<i64> {
        Some(self.trace_bound)
    }

    fn coefficient(&self, class: &GramClass) -> Result<Rational> {
        if class.trace() > self.trace_bound {
            return Err(Error::InsufficientBound { needed: class.trace(), available: self.trace_bound });
        }
        Ok(self.entries.get(class).cloned().unwrap_or_else(Rational::zero))
    }
}

/// Always `num/den`, including integers.
pub fn rational_string(v: &Rational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonMap {
    n: usize,
    k: usize,
    level: Option<u64>,
    character_discriminant: Option<i64>,
    p_context: Option<u64>,
    trace_bound: i64,
    records: Vec<Record>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    class_gram: IMat,
    coefficient: String,
}
