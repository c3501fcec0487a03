//! Fourier coefficients `r(A,T)` of Siegel theta series.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use super::enumerate::Shells;
use super::gram_class::{canonicalize, enumerate_classes, GramClass};
use super::intmat::{self, IMat};
use super::IntegralLattice;
use crate::error::Result;
use crate::fourier::{CoefficientSource, FourierMap, SeriesMeta};
use crate::qanalog::Rational;

/// Lazily evaluated theta series of a lattice in a fixed degree. Coefficients
/// are computed on demand and memoised per class.
pub struct ThetaSeries {
    lattice: IntegralLattice,
    n: usize,
    shells: RwLock<Arc<Shells>>,
    cache: RwLock<HashMap<GramClass, u64>>,
}

impl ThetaSeries {
    pub fn new(lattice: &IntegralLattice, n: usize) -> Self {
        ThetaSeries {
            lattice: lattice.clone(),
            n,
            shells: RwLock::new(Arc::new(Shells::new(lattice.gram(), 0))),
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn lattice(&self) -> &IntegralLattice {
        &self.lattice
    }

    fn shells_for(&self, needed: i64) -> Arc<Shells> {
        {
            let s = self.shells.read().expect("shell lock");
            if s.bound() >= needed {
                return s.clone();
            }
        }
        let mut w = self.shells.write().expect("shell lock");
        if w.bound() < needed {
            // grow geometrically so repeated requests do not re-enumerate
            let target = needed.max(2 * w.bound());
            *w = Arc::new(Shells::new(self.lattice.gram(), target));
        }
        w.clone()
    }

    /// `r(A, T)` for an arbitrary even semidefinite `T` of this degree.
    pub fn count(&self, t: &IMat) -> Result<u64> {
        let class = canonicalize(t)?;
        Ok(self.count_class(&class))
    }

    pub fn count_class(&self, class: &GramClass) -> u64 {
        if let Some(&v) = self.cache.read().expect("cache lock").get(class) {
            return v;
        }
        let rep = class.rep();
        let needed = (0..rep.len()).map(|i| rep[i][i]).max().unwrap_or(0);
        let v = self.shells_for(needed).count_representations(rep);
        self.cache.write().expect("cache lock").insert(class.clone(), v);
        v
    }
}

impl CoefficientSource for ThetaSeries {
    fn degree(&self) -> usize {
        self.n
    }

    fn meta(&self) -> SeriesMeta {
        SeriesMeta {
            k: self.lattice.k(),
            level: Some(self.lattice.level()),
            character_discriminant: Some(self.lattice.character_discriminant()),
        }
    }

    fn available_bound(&self) -> Option<i64> {
        None
    }

    fn coefficient(&self, class: &GramClass) -> Result<Rational> {
        Ok(Rational::from_integer(self.count_class(class).into()))
    }
}

/// θ(L) in degree n, materialised on every class with trace ≤ bound.
pub fn theta_coefficients(l: &IntegralLattice, n: usize, bound: i64) -> FourierMap {
    let classes = enumerate_classes(n, bound);
    let max_diag = classes.iter().flat_map(|c| (0..n).map(move |i| c.rep()[i][i])).max().unwrap_or(0);
    let shells = Shells::new(l.gram(), max_diag);
    let entries: Vec<(GramClass, Rational)> = classes
        .into_par_iter()
        .map(|c| {
            let v = shells.count_representations(c.rep());
            (c, Rational::from_integer(v.into()))
        })
        .collect();
    let meta = SeriesMeta {
        k: l.k(),
        level: Some(l.level()),
        character_discriminant: Some(l.character_discriminant()),
    };
    FourierMap::from_entries(n, meta, bound, entries)
}

/// Weighted sum `Σ w_i θ(L_i)` (genus averages, neighbour sums).
pub fn theta_combination(terms: &[(IntegralLattice, Rational)], n: usize, bound: i64) -> FourierMap {
    let mut acc: Option<FourierMap> = None;
    for (l, w) in terms {
        let t = theta_coefficients(l, n, bound).scaled(w);
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t).expect("same degree and bound"),
        });
    }
    acc.unwrap_or_else(|| FourierMap::zero(n, SeriesMeta::default(), bound))
}

pub fn trace_of(t: &IMat) -> i64 {
    intmat::trace(t)
}
