//! Functors between finite categories.

use super::FinCat;

/// A candidate functor: an object map and an arrow map by index.
/// [`check_functor`] verifies it against a source and target category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorMap {
    pub obj_map: Vec<usize>,
    pub arr_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorViolation {
    /// Map sizes do not match the source category.
    Shape { objects: usize, arrows: usize },
    /// An image index falls outside the target category.
    ImageOutOfRange { arrow: Option<usize>, object: Option<usize> },
    /// `F(f)` does not go from `F(dom f)` to `F(cod f)`.
    DomCod { arrow: usize },
    /// `F(1_X) != 1_{F(X)}`.
    Identity { object: usize },
    /// `F(g ∘ f) != F(g) ∘ F(f)` (or the target composite is missing).
    Composition { g: usize, f: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorReport {
    pub violations: Vec<FunctorViolation>,
}

impl FunctorReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn identity_functor(c: &FinCat) -> FunctorMap {
    FunctorMap {
        obj_map: (0..c.object_count()).collect(),
        arr_map: (0..c.arrow_count()).collect(),
    }
}

/// `then ∘ first`, defined when `first: C -> D` and `then: D -> E`.
pub fn compose_functors(first: &FunctorMap, then: &FunctorMap) -> FunctorMap {
    FunctorMap {
        obj_map: first.obj_map.iter().map(|&x| then.obj_map[x]).collect(),
        arr_map: first.arr_map.iter().map(|&f| then.arr_map[f]).collect(),
    }
}

/// Verifies the three functor conditions exhaustively: preservation of
/// domains/codomains, of identities, and of all composites.
pub fn check_functor(src: &FinCat, dst: &FinCat, fm: &FunctorMap) -> FunctorReport {
    let mut violations = Vec::new();
    if fm.obj_map.len() != src.object_count() || fm.arr_map.len() != src.arrow_count() {
        violations.push(FunctorViolation::Shape {
            objects: fm.obj_map.len(),
            arrows: fm.arr_map.len(),
        });
        return FunctorReport { violations };
    }
    let mut in_range = true;
    for (x, &fx) in fm.obj_map.iter().enumerate() {
        if fx >= dst.object_count() {
            violations.push(FunctorViolation::ImageOutOfRange {
                arrow: None,
                object: Some(x),
            });
            in_range = false;
        }
    }
    for (f, &ff) in fm.arr_map.iter().enumerate() {
        if ff >= dst.arrow_count() {
            violations.push(FunctorViolation::ImageOutOfRange {
                arrow: Some(f),
                object: None,
            });
            in_range = false;
        }
    }
    if !in_range {
        return FunctorReport { violations };
    }

    for f in 0..src.arrow_count() {
        let ff = fm.arr_map[f];
        if dst.dom(ff) != fm.obj_map[src.dom(f)] || dst.cod(ff) != fm.obj_map[src.cod(f)] {
            violations.push(FunctorViolation::DomCod { arrow: f });
        }
    }
    for x in 0..src.object_count() {
        if fm.arr_map[src.identity_of(x)] != dst.identity_of(fm.obj_map[x]) {
            violations.push(FunctorViolation::Identity { object: x });
        }
    }
    for g in 0..src.arrow_count() {
        for f in 0..src.arrow_count() {
            let Some(gf) = src.composite(g, f) else { continue };
            let expected = dst.composite(fm.arr_map[g], fm.arr_map[f]);
            if expected != Some(fm.arr_map[gf]) {
                violations.push(FunctorViolation::Composition { g, f });
            }
        }
    }
    FunctorReport { violations }
}
