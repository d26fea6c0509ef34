//! The scene model: a torus of rank `rank`, the base weights Γ, the
//! linearizations and the weighted points.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::rat::{fmt_rat, from_ints, Rat, RatVec};
use crate::strata::FixedComponent;

/// An integer character (or cocharacter) of the torus.
pub type Character = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearization {
    pub name: String,
    /// Asserts that the sign of the M-function decides (semi)stability for
    /// this bundle. Supplied by the scene author, never inferred.
    pub hm_sanctioned: bool,
}

/// A model point: the base stratum `I` (indices into Γ) and, per
/// linearization, the finite set of weights `χ_i` with
/// `Γ_x = ⋃ (χ_i + monoid(I))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPoint {
    pub name: String,
    /// Sorted, duplicate-free indices into the scene's base weights.
    pub stratum: Vec<usize>,
    pub weights: BTreeMap<String, Vec<Character>>,
    /// Ids of the fixed components met by orbit closures (may be empty).
    pub components: Vec<String>,
}

impl WeightedPoint {
    pub fn new(name: impl Into<String>, stratum: Vec<usize>) -> Self {
        let mut stratum = stratum;
        stratum.sort_unstable();
        stratum.dedup();
        WeightedPoint {
            name: name.into(),
            stratum,
            weights: BTreeMap::new(),
            components: Vec::new(),
        }
    }

    pub fn with_weights(mut self, lin: impl Into<String>, chars: Vec<Character>) -> Self {
        self.weights.insert(lin.into(), chars);
        self
    }

    pub fn with_components(mut self, ids: Vec<String>) -> Self {
        self.components = ids;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SceneError {
    /// A structural invariant failed; `path` locates the offending field in
    /// the scene file layout, e.g. `points[2].name`.
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl SceneError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        SceneError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> &str {
        match self {
            SceneError::Invalid { path, .. } => path,
        }
    }
}

/// Immutable after construction; [`Scene::new`] checks every invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    rank: usize,
    base_weights: Vec<Character>,
    linearizations: Vec<Linearization>,
    points: Vec<WeightedPoint>,
    components: Vec<FixedComponent>,
}

impl Scene {
    pub fn new(
        rank: usize,
        base_weights: Vec<Character>,
        linearizations: Vec<Linearization>,
        points: Vec<WeightedPoint>,
        components: Vec<FixedComponent>,
    ) -> Result<Self, SceneError> {
        if rank == 0 {
            return Err(SceneError::invalid("rank", "must be positive"));
        }
        for (i, c) in base_weights.iter().enumerate() {
            check_len(rank, c, || format!("base_weights[{i}]"))?;
        }
        let mut lin_names = BTreeSet::new();
        for (i, l) in linearizations.iter().enumerate() {
            if l.name.is_empty() {
                return Err(SceneError::invalid(
                    format!("linearizations[{i}].name"),
                    "empty",
                ));
            }
            if !lin_names.insert(l.name.as_str()) {
                return Err(SceneError::invalid(
                    format!("linearizations[{i}].name"),
                    "duplicate",
                ));
            }
        }
        let mut comp_ids = BTreeSet::new();
        for (i, comp) in components.iter().enumerate() {
            if !comp_ids.insert(comp.id.as_str()) {
                return Err(SceneError::invalid(
                    format!("components[{i}].id"),
                    "duplicate",
                ));
            }
            check_stratum(base_weights.len(), &comp.stratum, |k| {
                format!("components[{i}].stratum[{k}]")
            })?;
            for (lin, c) in &comp.c {
                if !lin_names.contains(lin.as_str()) {
                    return Err(SceneError::invalid(
                        format!("components[{i}].c.{lin}"),
                        "unknown linearization",
                    ));
                }
                check_len(rank, c, || format!("components[{i}].c.{lin}"))?;
            }
        }
        let mut point_names = BTreeSet::new();
        for (i, p) in points.iter().enumerate() {
            if p.name.is_empty() {
                return Err(SceneError::invalid(format!("points[{i}].name"), "empty"));
            }
            if !point_names.insert(p.name.as_str()) {
                return Err(SceneError::invalid(
                    format!("points[{i}].name"),
                    "duplicate",
                ));
            }
            check_stratum(base_weights.len(), &p.stratum, |k| {
                format!("points[{i}].stratum[{k}]")
            })?;
            for (lin, chars) in &p.weights {
                let path = format!("points[{i}].weights.{lin}");
                if !lin_names.contains(lin.as_str()) {
                    return Err(SceneError::invalid(path, "unknown linearization"));
                }
                if chars.is_empty() {
                    return Err(SceneError::invalid(path, "weight set must be non-empty"));
                }
                for (k, c) in chars.iter().enumerate() {
                    check_len(rank, c, || format!("{path}[{k}]"))?;
                }
            }
            for (k, id) in p.components.iter().enumerate() {
                if !comp_ids.contains(id.as_str()) {
                    return Err(SceneError::invalid(
                        format!("points[{i}].components[{k}]"),
                        format!("unknown component {id:?}"),
                    ));
                }
            }
        }
        let mut points = points;
        for p in points.iter_mut() {
            p.stratum.sort_unstable();
            p.stratum.dedup();
        }
        Ok(Scene {
            rank,
            base_weights,
            linearizations,
            points,
            components,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base_weights(&self) -> &[Character] {
        &self.base_weights
    }

    pub fn linearizations(&self) -> &[Linearization] {
        &self.linearizations
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn components(&self) -> &[FixedComponent] {
        &self.components
    }

    pub fn point(&self, name: &str) -> Option<&WeightedPoint> {
        self.points.iter().find(|p| p.name == name)
    }

    pub fn linearization(&self, name: &str) -> Option<&Linearization> {
        self.linearizations.iter().find(|l| l.name == name)
    }

    pub fn component(&self, id: &str) -> Option<&FixedComponent> {
        self.components.iter().find(|c| c.id == id)
    }

    /// The characters of a stratum, as rational vectors.
    pub fn stratum_chars(&self, stratum: &[usize]) -> Vec<RatVec> {
        stratum
            .iter()
            .map(|&i| from_ints(&self.base_weights[i]))
            .collect()
    }

    pub fn stratum_ints(&self, stratum: &[usize]) -> Vec<Character> {
        stratum
            .iter()
            .map(|&i| self.base_weights[i].clone())
            .collect()
    }
}

fn check_len(rank: usize, c: &[i64], path: impl FnOnce() -> String) -> Result<(), SceneError> {
    if c.len() != rank {
        return Err(SceneError::invalid(
            path(),
            format!("expected length {rank}, found {}", c.len()),
        ));
    }
    Ok(())
}

fn check_stratum(
    n_base: usize,
    stratum: &[usize],
    path: impl Fn(usize) -> String,
) -> Result<(), SceneError> {
    for (k, &idx) in stratum.iter().enumerate() {
        if idx >= n_base {
            return Err(SceneError::invalid(
                path(k),
                format!("index {idx} out of range (base_weights has {n_base} entries)"),
            ));
        }
    }
    Ok(())
}

/// `L_t = L_0^{1−t} ⊗ L_1^t`: nonnegative rational coefficients on at most
/// two linearizations, summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinCombo {
    terms: Vec<(String, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid linearization combination: {0}")]
pub struct ComboError(pub String);

impl LinCombo {
    pub fn single(name: impl Into<String>) -> Self {
        LinCombo {
            terms: vec![(name.into(), Rat::one())],
        }
    }

    /// `(1 − t)·from + t·to` for `t ∈ [0, 1]`.
    pub fn segment(from: &str, to: &str, t: &Rat) -> Result<Self, ComboError> {
        if t.is_negative() || *t > Rat::one() {
            return Err(ComboError(format!("t = {} outside [0, 1]", fmt_rat(t))));
        }
        Self::new(vec![
            (from.to_string(), Rat::one() - t),
            (to.to_string(), t.clone()),
        ])
    }

    /// Merges repeated names and drops zero coefficients.
    pub fn new(terms: Vec<(String, Rat)>) -> Result<Self, ComboError> {
        let mut merged: BTreeMap<String, Rat> = BTreeMap::new();
        for (name, c) in terms {
            if c.is_negative() {
                return Err(ComboError(format!("negative coefficient on {name}")));
            }
            *merged.entry(name).or_insert_with(Rat::zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        let total: Rat = merged.values().sum();
        if total != Rat::one() {
            return Err(ComboError(format!(
                "coefficients sum to {}, not 1",
                fmt_rat(&total)
            )));
        }
        if merged.len() > 2 {
            return Err(ComboError("more than two nonzero coefficients".into()));
        }
        Ok(LinCombo {
            terms: merged.into_iter().collect(),
        })
    }

    /// Nonzero terms, sorted by linearization name.
    pub fn terms(&self) -> &[(String, Rat)] {
        &self.terms
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(n, _)| n.as_str())
    }
}
