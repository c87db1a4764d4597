//! Executable finite category theory.
//!
//! A [`FinCat`] is a finite category given by explicit data: named objects
//! and arrows, an identity arrow per object, and a composition table.
//! Nothing is assumed lawful; [`check_category`] verifies the axioms
//! exhaustively and reports every violation. On top of that sit functor and
//! naturality checks, isomorphism search, and the skeleton-based equivalence
//! decision with a brute-force reference search as its independent oracle.

mod equivalence;
mod functor;
mod natural;
mod parse;

pub use equivalence::{
    categories_equivalent, categories_equivalent_with_limits, categories_isomorphic,
    categories_isomorphic_with_limits, compute_skeleton, equivalent_by_search, Equivalence,
    SearchError, SearchLimits, Skeleton,
};
pub use functor::{
    check_functor, compose_functors, identity_functor, FunctorMap, FunctorReport,
    FunctorViolation,
};
pub use natural::{
    check_natural, identity_nat, is_natural_iso, NatTrans, NaturalReport, NaturalViolation,
};
pub use parse::{category_description, parse_category, ParseError};

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Arrow {
    name: String,
    dom: usize,
    cod: usize,
}

/// A finite category as plain data. May violate the laws; see
/// [`check_category`].
#[derive(Debug, Clone, PartialEq)]
pub struct FinCat {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identity: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("arrow {arrow} refers to missing object {object}")]
    DanglingObject { arrow: String, object: usize },
    #[error("identity table has {got} entries for {want} objects")]
    IdentityCount { got: usize, want: usize },
    #[error("identity of object {object} refers to missing arrow {arrow}")]
    DanglingIdentity { object: usize, arrow: usize },
    #[error("composition entry refers to missing arrow {0}")]
    DanglingComposite(usize),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
}

impl FinCat {
    /// Builds a category from raw parts, validating only referential
    /// integrity (every index in range, names unique). Law checking is
    /// separate.
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<(String, usize, usize)>,
        identity: Vec<usize>,
        compose: HashMap<(usize, usize), usize>,
    ) -> Result<Self, StructureError> {
        let n_obj = objects.len();
        let n_arr = arrows.len();
        let mut seen = std::collections::HashSet::new();
        for name in objects.iter().chain(arrows.iter().map(|a| &a.0)) {
            if !seen.insert(name.clone()) {
                return Err(StructureError::DuplicateName(name.clone()));
            }
        }
        for (name, dom, cod) in &arrows {
            for &o in [dom, cod].iter() {
                if *o >= n_obj {
                    return Err(StructureError::DanglingObject {
                        arrow: name.clone(),
                        object: *o,
                    });
                }
            }
        }
        if identity.len() != n_obj {
            return Err(StructureError::IdentityCount {
                got: identity.len(),
                want: n_obj,
            });
        }
        for (object, &arrow) in identity.iter().enumerate() {
            if arrow >= n_arr {
                return Err(StructureError::DanglingIdentity { object, arrow });
            }
        }
        for (&(g, f), &gf) in &compose {
            for a in [g, f, gf] {
                if a >= n_arr {
                    return Err(StructureError::DanglingComposite(a));
                }
            }
        }
        Ok(Self {
            objects,
            arrows: arrows
                .into_iter()
                .map(|(name, dom, cod)| Arrow { name, dom, cod })
                .collect(),
            identity,
            compose,
        })
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn arrow_name(&self, f: usize) -> &str {
        &self.arrows[f].name
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn dom(&self, f: usize) -> usize {
        self.arrows[f].dom
    }

    pub fn cod(&self, f: usize) -> usize {
        self.arrows[f].cod
    }

    pub fn identity_of(&self, x: usize) -> usize {
        self.identity[x]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity.iter().any(|&i| i == f)
    }

    /// `g ∘ f` from the table, if present.
    pub fn composite(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    pub fn composition_table(&self) -> &HashMap<(usize, usize), usize> {
        &self.compose
    }

    /// All arrows from `x` to `y`, in index order.
    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&f| self.arrows[f].dom == x && self.arrows[f].cod == y)
            .collect()
    }

    pub fn arrows_from(&self, x: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&f| self.arrows[f].dom == x)
            .collect()
    }

    /// The one-object, one-arrow category.
    pub fn terminal() -> Self {
        Self::discrete(1)
    }

    /// `n` objects, identities only.
    pub fn discrete(n: usize) -> Self {
        let objects = (0..n).map(|i| format!("O{i}")).collect();
        let arrows = (0..n)
            .map(|i| Arrow {
                name: format!("1_O{i}"),
                dom: i,
                cod: i,
            })
            .collect();
        let compose = (0..n).map(|i| ((i, i), i)).collect();
        Self {
            objects,
            arrows,
            identity: (0..n).collect(),
            compose,
        }
    }

    /// `n` objects with exactly one arrow between every ordered pair.
    pub fn indiscrete(n: usize) -> Self {
        let objects = (0..n).map(|i| format!("O{i}")).collect();
        let mut arrows = Vec::new();
        let mut index = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                index.insert((x, y), arrows.len());
                arrows.push(Arrow {
                    name: format!("a{x}_{y}"),
                    dom: x,
                    cod: y,
                });
            }
        }
        let mut compose = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    compose.insert((index[&(y, z)], index[&(x, y)]), index[&(x, z)]);
                }
            }
        }
        Self {
            objects,
            arrows,
            identity: (0..n).map(|i| index[&(i, i)]).collect(),
            compose,
        }
    }

    /// Thin category of a preorder: one arrow `x -> y` whenever `leq(x, y)`.
    /// The relation must be reflexive and transitive.
    pub fn from_preorder(
        n: usize,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, PreorderError> {
        for x in 0..n {
            if !leq(x, x) {
                return Err(PreorderError::NotReflexive(x));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !leq(x, y) {
                    continue;
                }
                for z in 0..n {
                    if leq(y, z) && !leq(x, z) {
                        return Err(PreorderError::NotTransitive(x, y, z));
                    }
                }
            }
        }
        let objects = (0..n).map(|i| format!("s{i}")).collect();
        let mut arrows = Vec::new();
        let mut index = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                if leq(x, y) {
                    index.insert((x, y), arrows.len());
                    arrows.push(Arrow {
                        name: format!("r{x}_{y}"),
                        dom: x,
                        cod: y,
                    });
                }
            }
        }
        let mut compose = HashMap::new();
        for (&(x, y), &f) in &index {
            for (&(y2, z), &g) in &index {
                if y2 == y {
                    compose.insert((g, f), index[&(x, z)]);
                }
            }
        }
        Ok(Self {
            objects,
            arrows,
            identity: (0..n).map(|i| index[&(i, i)]).collect(),
            compose,
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreorderError {
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not transitive: {0} <= {1} <= {2}")]
    NotTransitive(usize, usize, usize),
}

/// One failed law instance, by arrow index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawViolation {
    /// The declared identity of `object` is not an endo-arrow on it.
    IdentityNotEndo { object: usize, arrow: usize },
    /// `(g, f)` is composable but has no table entry.
    MissingComposite { g: usize, f: usize },
    /// `(g, f)` is not composable yet has a table entry.
    SpuriousComposite { g: usize, f: usize },
    /// `g ∘ f` exists but has the wrong domain or codomain.
    CompositeTyping { g: usize, f: usize, gf: usize },
    /// `1_cod(f) ∘ f != f`.
    LeftUnit { f: usize, got: usize },
    /// `f ∘ 1_dom(f) != f`.
    RightUnit { f: usize, got: usize },
    /// `(h ∘ g) ∘ f != h ∘ (g ∘ f)`.
    Associativity {
        h: usize,
        g: usize,
        f: usize,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryReport {
    pub violations: Vec<LawViolation>,
}

impl CategoryReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the category axioms exhaustively: identities are endo-arrows,
/// composition is defined exactly on composable pairs with correct typing,
/// and the unit and associative laws hold.
pub fn check_category(c: &FinCat) -> CategoryReport {
    let mut violations = Vec::new();

    let mut identity_ok = vec![false; c.object_count()];
    for x in 0..c.object_count() {
        let i = c.identity_of(x);
        if c.dom(i) == x && c.cod(i) == x {
            identity_ok[x] = true;
        } else {
            violations.push(LawViolation::IdentityNotEndo { object: x, arrow: i });
        }
    }

    // Totality and typing of the table.
    for g in 0..c.arrow_count() {
        for f in 0..c.arrow_count() {
            let composable = c.cod(f) == c.dom(g);
            match (composable, c.composite(g, f)) {
                (true, None) => violations.push(LawViolation::MissingComposite { g, f }),
                (true, Some(gf)) => {
                    if c.dom(gf) != c.dom(f) || c.cod(gf) != c.cod(g) {
                        violations.push(LawViolation::CompositeTyping { g, f, gf });
                    }
                }
                (false, Some(_)) => violations.push(LawViolation::SpuriousComposite { g, f }),
                (false, None) => {}
            }
        }
    }

    // Unit law against the declared identities.
    for f in 0..c.arrow_count() {
        if identity_ok[c.cod(f)] {
            if let Some(got) = c.composite(c.identity_of(c.cod(f)), f) {
                if got != f {
                    violations.push(LawViolation::LeftUnit { f, got });
                }
            }
        }
        if identity_ok[c.dom(f)] {
            if let Some(got) = c.composite(f, c.identity_of(c.dom(f))) {
                if got != f {
                    violations.push(LawViolation::RightUnit { f, got });
                }
            }
        }
    }

    // Associativity over composable triples with adjacency indexing.
    let out: Vec<Vec<usize>> = (0..c.object_count()).map(|x| c.arrows_from(x)).collect();
    for f in 0..c.arrow_count() {
        for &g in &out[c.cod(f)] {
            let Some(gf) = c.composite(g, f) else { continue };
            for &h in &out[c.cod(g)] {
                let Some(hg) = c.composite(h, g) else { continue };
                let left = c.composite(h, gf);
                let right = c.composite(hg, f);
                if let (Some(left), Some(right)) = (left, right) {
                    if left != right {
                        violations.push(LawViolation::Associativity {
                            h,
                            g,
                            f,
                            left,
                            right,
                        });
                    }
                }
            }
        }
    }

    CategoryReport { violations }
}

/// Looks for the two-sided inverse of `f`: an arrow `g` with
/// `g ∘ f = 1_dom(f)` and `f ∘ g = 1_cod(f)`. Unique in a lawful category.
pub fn is_isomorphism(c: &FinCat, f: usize) -> Option<usize> {
    let (x, y) = (c.dom(f), c.cod(f));
    c.hom(y, x).into_iter().find(|&g| {
        c.composite(g, f) == Some(c.identity_of(x)) && c.composite(f, g) == Some(c.identity_of(y))
    })
}

/// Incremental construction of a [`FinCat`] with implicit identities.
///
/// Every object gets an identity arrow named `1_<object>`, and all
/// compositions with identities are filled in automatically. Only
/// non-identity composites need to be declared.
#[derive(Debug, Default)]
pub struct CatBuilder {
    objects: Vec<String>,
    arrows: Vec<(String, String, String)>,
    compositions: Vec<(String, String, String)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate id {0:?}")]
    Duplicate(String),
    #[error("undeclared id {0:?}")]
    Undeclared(String),
    #[error("arrow name {0:?} collides with an implicit identity")]
    ReservedName(String),
    #[error("{g:?} does not compose with {f:?} (cod/dom mismatch)")]
    NotComposable { g: String, f: String },
    #[error("conflicting composite for ({g:?}, {f:?})")]
    ConflictingComposite { g: String, f: String },
}

impl CatBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, name: impl Into<String>) -> &mut Self {
        self.objects.push(name.into());
        self
    }

    pub fn arrow(
        &mut self,
        name: impl Into<String>,
        dom: impl Into<String>,
        cod: impl Into<String>,
    ) -> &mut Self {
        self.arrows.push((name.into(), dom.into(), cod.into()));
        self
    }

    /// Declares `gf = g ∘ f`.
    pub fn composite(
        &mut self,
        g: impl Into<String>,
        f: impl Into<String>,
        gf: impl Into<String>,
    ) -> &mut Self {
        self.compositions.push((g.into(), f.into(), gf.into()));
        self
    }

    pub fn build(&self) -> Result<FinCat, BuildError> {
        let mut obj_index = HashMap::new();
        for (i, name) in self.objects.iter().enumerate() {
            if obj_index.insert(name.clone(), i).is_some() {
                return Err(BuildError::Duplicate(name.clone()));
            }
        }

        let mut arrows: Vec<(String, usize, usize)> = Vec::new();
        let mut arr_index: HashMap<String, usize> = HashMap::new();
        let mut identity = Vec::new();
        for (i, name) in self.objects.iter().enumerate() {
            let id_name = format!("1_{name}");
            arr_index.insert(id_name.clone(), arrows.len());
            identity.push(arrows.len());
            arrows.push((id_name, i, i));
        }
        for (name, dom, cod) in &self.arrows {
            if name.starts_with("1_") && obj_index.contains_key(&name[2..]) {
                return Err(BuildError::ReservedName(name.clone()));
            }
            let &d = obj_index
                .get(dom)
                .ok_or_else(|| BuildError::Undeclared(dom.clone()))?;
            let &c = obj_index
                .get(cod)
                .ok_or_else(|| BuildError::Undeclared(cod.clone()))?;
            if arr_index.insert(name.clone(), arrows.len()).is_some() {
                return Err(BuildError::Duplicate(name.clone()));
            }
            arrows.push((name.clone(), d, c));
        }

        let mut compose: HashMap<(usize, usize), usize> = HashMap::new();
        for f in 0..arrows.len() {
            let (dom, cod) = (arrows[f].1, arrows[f].2);
            compose.insert((f, identity[dom]), f);
            compose.insert((identity[cod], f), f);
        }
        for (g, f, gf) in &self.compositions {
            let lookup = |n: &String| {
                arr_index
                    .get(n)
                    .copied()
                    .ok_or_else(|| BuildError::Undeclared(n.clone()))
            };
            let (gi, fi, gfi) = (lookup(g)?, lookup(f)?, lookup(gf)?);
            if arrows[fi].2 != arrows[gi].1 {
                return Err(BuildError::NotComposable {
                    g: g.clone(),
                    f: f.clone(),
                });
            }
            match compose.insert((gi, fi), gfi) {
                Some(prev) if prev != gfi => {
                    return Err(BuildError::ConflictingComposite {
                        g: g.clone(),
                        f: f.clone(),
                    });
                }
                _ => {}
            }
        }

        Ok(FinCat::from_parts(self.objects.clone(), arrows, identity, compose)
            .expect("builder output is referentially sound"))
    }
}
