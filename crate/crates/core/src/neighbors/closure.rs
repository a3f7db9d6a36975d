use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::ifs::{IfsSystem, MapKey, Similarity, Word};
use crate::num::{Rational, Real};

use super::engine::{PairEngine, Side};
use super::NeighborError;

/// `h = f_left^-1 ∘ f_right`.
#[derive(Clone, Debug)]
pub struct NeighborMap {
    pub map: Similarity,
    pub left: Word,
    pub right: Word,
}

impl NeighborMap {
    pub fn ratio(&self) -> Real {
        self.map.ratio_real()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "state")]
pub enum ClosureStatus {
    Stabilized,
    Overflow { limit: usize },
}

#[derive(Clone, Debug)]
pub struct NeighborClosure {
    pub eps: f64,
    pub level: u32,
    /// Sorted by key.
    pub maps: Vec<NeighborMap>,
    pub status: ClosureStatus,
    /// Map count after each round, seeds first.
    pub growth: Vec<usize>,
    quantum: f64,
}

impl NeighborClosure {
    pub fn is_stabilized(&self) -> bool {
        self.status == ClosureStatus::Stabilized
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn keys(&self) -> BTreeSet<MapKey> {
        self.maps.iter().map(|h| h.map.key(self.quantum)).collect()
    }

    /// Same map set, compared by key.
    pub fn same_maps(&self, other: &NeighborClosure) -> bool {
        self.keys() == other.keys()
    }
}

/// Settings for [`neighbor_closure`].
#[derive(Clone, Copy, Debug)]
pub struct ClosureParams {
    pub eps: f64,
    pub level: u32,
    pub max_maps: usize,
}

impl Default for ClosureParams {
    fn default() -> Self {
        ClosureParams { eps: 0.0, level: 4, max_maps: 5000 }
    }
}

pub(crate) fn dedup_quantum(ifs: &IfsSystem) -> f64 {
    1e-9 * ifs.diameter_bound().max(1e-300)
}

/// Conservative test for `[K]_eps ∩ h([K]_eps) ≠ ∅` at piece scale `rho`.
pub fn overlap_test(ifs: &IfsSystem, h: &Similarity, eps: f64, rho: f64) -> bool {
    let engine = PairEngine::new(
        ifs,
        Side { frame: crate::ifs::Similarity::identity(ifs.dim()), eps },
        Side { frame: *h, eps: h.ratio() * eps },
    );
    engine.any_overlap(rho)
}

/// Words of length at most `c`, shortest first.
fn short_words(m: usize, c: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..c {
        layer = layer.iter().flat_map(|w| (0..m).map(move |i| w.child(i))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

struct Candidate {
    key: MapKey,
    nm: NeighborMap,
}

/// Superset of `N_eps(F)` grown from `f_a^-1 ∘ f_b` (`b` not starting with `a`)
/// by `h -> f_a^-1 ∘ h ∘ f_b`, `a ∈ M ∪ {∅}`, `|b| <= C`.
pub fn neighbor_closure(ifs: &IfsSystem, params: ClosureParams) -> Result<NeighborClosure, NeighborError> {
    if !(params.eps >= 0.0) || !params.eps.is_finite() {
        return Err(NeighborError::BadParameter(format!("eps = {}", params.eps)));
    }
    if params.max_maps == 0 {
        return Err(NeighborError::BadParameter("max_maps must be at least 1".into()));
    }
    let m = ifs.len();
    let quantum = dedup_quantum(ifs);
    let rho = ifs.r_max().to_f64().powi(params.level as i32);
    let lo = ifs.r_min();
    let hi = match lo {
        Real::Exact(q) => Real::Exact(Rational::from_integer(1) / q),
        Real::Float(x) => Real::Float(1.0 / x),
    };
    let inverses: Vec<Similarity> = ifs.maps().iter().map(|f| f.inverse()).collect();
    let suffixes: Vec<(Word, Similarity)> = short_words(m, ifs.suffix_bound())
        .into_iter()
        .map(|w| {
            let f = crate::ifs::compose(ifs, &w).expect("in range");
            (w, f)
        })
        .collect();
    let id_tol = quantum;

    let mut accepted: BTreeMap<MapKey, NeighborMap> = BTreeMap::new();
    let mut rejected: BTreeSet<MapKey> = BTreeSet::new();

    // seeds
    let mut seeds = Vec::new();
    for a in 0..m {
        for (w, fb) in suffixes.iter().skip(1) {
            if w.indices()[0] as usize == a {
                continue;
            }
            let g = inverses[a].compose(fb);
            seeds.push(NeighborMap { map: g, left: Word::from_indices(vec![a as u16]), right: w.clone() });
        }
    }
    let mut frontier = screen(ifs, seeds, &lo, &hi, id_tol, quantum, params.eps, rho, &mut accepted, &mut rejected);
    let mut growth = vec![accepted.len()];
    let mut status = ClosureStatus::Stabilized;
    if accepted.len() > params.max_maps {
        status = ClosureStatus::Overflow { limit: params.max_maps };
    }
    while status == ClosureStatus::Stabilized && !frontier.is_empty() {
        let mut cands = Vec::new();
        for h in &frontier {
            for a in std::iter::once(None).chain((0..m).map(Some)) {
                for (w, fb) in &suffixes {
                    if a.is_none() && w.is_empty() {
                        continue;
                    }
                    let inner = h.map.compose(fb);
                    let (map, left) = match a {
                        Some(a) => (inverses[a].compose(&inner), h.left.child(a)),
                        None => (inner, h.left.clone()),
                    };
                    cands.push(NeighborMap { map, left, right: h.right.concat(w) });
                }
            }
        }
        frontier = screen(ifs, cands, &lo, &hi, id_tol, quantum, params.eps, rho, &mut accepted, &mut rejected);
        growth.push(accepted.len());
        if accepted.len() > params.max_maps {
            status = ClosureStatus::Overflow { limit: params.max_maps };
        }
    }
    Ok(NeighborClosure {
        eps: params.eps,
        level: params.level,
        maps: accepted.into_values().collect(),
        status,
        growth,
        quantum,
    })
}

/// Filters candidates, runs the overlap tests in parallel and records the verdicts.
#[allow(clippy::too_many_arguments)]
fn screen(
    ifs: &IfsSystem,
    cands: Vec<NeighborMap>,
    lo: &Real,
    hi: &Real,
    id_tol: f64,
    quantum: f64,
    eps: f64,
    rho: f64,
    accepted: &mut BTreeMap<MapKey, NeighborMap>,
    rejected: &mut BTreeSet<MapKey>,
) -> Vec<NeighborMap> {
    let mut fresh: BTreeMap<MapKey, Candidate> = BTreeMap::new();
    for nm in cands {
        let key = nm.map.key(quantum);
        if accepted.contains_key(&key) || rejected.contains(&key) || fresh.contains_key(&key) {
            continue;
        }
        if !nm.map.ratio_within(lo, hi) || nm.map.is_identity(id_tol) {
            rejected.insert(key);
            continue;
        }
        fresh.insert(key.clone(), Candidate { key, nm });
    }
    let list: Vec<Candidate> = fresh.into_values().collect();
    let verdicts: Vec<bool> = list.par_iter().map(|c| overlap_test(ifs, &c.nm.map, eps, rho)).collect();
    let mut added = Vec::new();
    for (c, ok) in list.into_iter().zip(verdicts) {
        if ok {
            accepted.insert(c.key, c.nm.clone());
            added.push(c.nm);
        } else {
            rejected.insert(c.key);
        }
    }
    added
}

/// Number of new maps one more expansion round over the whole closure would add.
pub fn expansion_defect(ifs: &IfsSystem, closure: &NeighborClosure) -> usize {
    let params = ClosureParams { eps: closure.eps, level: closure.level, max_maps: usize::MAX };
    let m = ifs.len();
    let quantum = closure.quantum;
    let rho = ifs.r_max().to_f64().powi(params.level as i32);
    let lo = ifs.r_min();
    let hi = Real::Float(1.0 / lo.to_f64());
    let inverses: Vec<Similarity> = ifs.maps().iter().map(|f| f.inverse()).collect();
    let keys = closure.keys();
    let mut new = BTreeSet::new();
    for h in &closure.maps {
        for a in std::iter::once(None).chain((0..m).map(Some)) {
            for w in short_words(m, ifs.suffix_bound()) {
                if a.is_none() && w.is_empty() {
                    continue;
                }
                let fb = crate::ifs::compose(ifs, &w).expect("in range");
                let inner = h.map.compose(&fb);
                let g = match a {
                    Some(a) => inverses[a].compose(&inner),
                    None => inner,
                };
                let key = g.key(quantum);
                if keys.contains(&key) || new.contains(&key) {
                    continue;
                }
                if g.ratio_within(&lo, &hi) && !g.is_identity(quantum) && overlap_test(ifs, &g, params.eps, rho) {
                    new.insert(key);
                }
            }
        }
    }
    new.len()
}

/// Outcome of the ε sweep used to pick a working ε for `N(F) = N_ε(F)`.
#[derive(Clone, Debug, Serialize)]
pub struct EpsSweep {
    /// Largest tried ε whose closure equals the ε = 0 closure; a heuristic choice.
    pub eps: Option<f64>,
    pub tried: Vec<(f64, usize, bool)>,
}

/// Tries ε = 2^-j for j = 10 down to 1 and keeps the largest agreeing with ε = 0.
pub fn epsilon_sweep(ifs: &IfsSystem, base: &NeighborClosure) -> Result<EpsSweep, NeighborError> {
    let mut tried = Vec::new();
    let mut best = None;
    let diam = ifs.diameter_bound();
    for j in (1..=10).rev() {
        let eps = diam * 0.5f64.powi(j);
        let c = neighbor_closure(
            ifs,
            ClosureParams { eps, level: base.level, max_maps: base.maps.len().max(1) * 4 },
        )?;
        let same = c.is_stabilized() && c.same_maps(base);
        tried.push((eps, c.len(), same));
        if same {
            best = Some(eps);
        } else {
            break;
        }
    }
    Ok(EpsSweep { eps: best, tried })
}
