//! Natural transformations and naturality checking.

use super::functor::FunctorMap;
use super::{is_isomorphism, FinCat};

/// A candidate natural transformation `F => G`: one component arrow of the
/// target category per source object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub components: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaturalViolation {
    /// Component count does not match the source category.
    Shape { components: usize },
    /// Component `t_X` is missing or not an arrow `F(X) -> G(X)`.
    ComponentTyping { object: usize },
    /// The square over this source arrow does not commute:
    /// `t_Y ∘ F(f) != G(f) ∘ t_X`.
    Square {
        f: usize,
        lhs: Option<usize>,
        rhs: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalReport {
    pub violations: Vec<NaturalViolation>,
}

impl NaturalReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The identity transformation on `F`: `t_X = 1_{F(X)}`.
pub fn identity_nat(dst: &FinCat, f: &FunctorMap) -> NatTrans {
    NatTrans {
        components: f.obj_map.iter().map(|&x| dst.identity_of(x)).collect(),
    }
}

/// Checks component typing and every naturality square of `t: F => G`,
/// where `F, G: src -> dst`.
pub fn check_natural(
    src: &FinCat,
    dst: &FinCat,
    f: &FunctorMap,
    g: &FunctorMap,
    t: &NatTrans,
) -> NaturalReport {
    let mut violations = Vec::new();
    if t.components.len() != src.object_count() {
        violations.push(NaturalViolation::Shape {
            components: t.components.len(),
        });
        return NaturalReport { violations };
    }
    let mut typed = vec![true; src.object_count()];
    for x in 0..src.object_count() {
        let c = t.components[x];
        if c >= dst.arrow_count() || dst.dom(c) != f.obj_map[x] || dst.cod(c) != g.obj_map[x] {
            violations.push(NaturalViolation::ComponentTyping { object: x });
            typed[x] = false;
        }
    }
    for arrow in 0..src.arrow_count() {
        let (x, y) = (src.dom(arrow), src.cod(arrow));
        if !typed[x] || !typed[y] {
            continue;
        }
        let lhs = dst.composite(t.components[y], f.arr_map[arrow]);
        let rhs = dst.composite(g.arr_map[arrow], t.components[x]);
        if lhs.is_none() || lhs != rhs {
            violations.push(NaturalViolation::Square { f: arrow, lhs, rhs });
        }
    }
    NaturalReport { violations }
}

/// True when `t` is natural and every component is an isomorphism.
pub fn is_natural_iso(
    src: &FinCat,
    dst: &FinCat,
    f: &FunctorMap,
    g: &FunctorMap,
    t: &NatTrans,
) -> bool {
    check_natural(src, dst, f, g, t).is_valid()
        && t.components
            .iter()
            .all(|&c| is_isomorphism(dst, c).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{check_category, identity_functor, CatBuilder, FinCat};

    #[test]
    fn identity_transformation_is_natural() {
        let c = FinCat::indiscrete(3);
        let id = identity_functor(&c);
        let t = identity_nat(&c, &id);
        assert!(check_natural(&c, &c, &id, &id, &t).is_valid());
        assert!(is_natural_iso(&c, &c, &id, &id, &t));
    }

    #[test]
    fn thin_target_commutes_whenever_typed() {
        // Functors from the 3-chain into a thin category: any well-typed
        // component family is natural.
        let chain = FinCat::from_preorder(3, |x, y| x <= y).unwrap();
        let thin = FinCat::from_preorder(2, |x, y| x <= y).unwrap();
        // F maps i to 0, G maps i to min(i, 1): components exist for all i.
        let f = FunctorMap {
            obj_map: vec![0, 0, 0],
            arr_map: vec![thin.identity_of(0); chain.arrow_count()],
        };
        let g_obj = vec![0usize, 1, 1];
        let g_arr: Vec<usize> = (0..chain.arrow_count())
            .map(|a| thin.hom(g_obj[chain.dom(a)], g_obj[chain.cod(a)])[0])
            .collect();
        let g = FunctorMap {
            obj_map: g_obj.clone(),
            arr_map: g_arr,
        };
        assert!(crate::fincat::check_functor(&chain, &thin, &f).is_valid());
        assert!(crate::fincat::check_functor(&chain, &thin, &g).is_valid());
        let t = NatTrans {
            components: (0..3).map(|x| thin.hom(0, g_obj[x])[0]).collect(),
        };
        assert!(check_natural(&chain, &thin, &f, &g, &t).is_valid());
    }

    #[test]
    fn miswired_component_fails_exactly_one_square() {
        // Source: the 2-chain a <= b. Target: idempotent monoid {1, e}.
        let chain = FinCat::from_preorder(2, |x, y| x <= y).unwrap();
        let mut b = CatBuilder::new();
        b.object("M").arrow("e", "M", "M").composite("e", "e", "e");
        let monoid = b.build().unwrap();
        assert!(check_category(&monoid).is_valid());
        let one = monoid.identity_of(0);
        let e = monoid.arrow_index("e").unwrap();
        let constant = FunctorMap {
            obj_map: vec![0, 0],
            arr_map: vec![one; chain.arrow_count()],
        };
        // components (1, e): the square over a -> b needs t_b = t_a
        let t = NatTrans {
            components: vec![one, e],
        };
        let report = check_natural(&chain, &monoid, &constant, &constant, &t);
        let squares: Vec<_> = report
            .violations
            .iter()
            .filter(|v| matches!(v, NaturalViolation::Square { .. }))
            .collect();
        assert_eq!(squares.len(), 1);
        // while (e, e) commutes everywhere
        let t = NatTrans {
            components: vec![e, e],
        };
        assert!(check_natural(&chain, &monoid, &constant, &constant, &t).is_valid());
    }

    #[test]
    fn component_typing_errors_are_structural() {
        let c = FinCat::discrete(2);
        let id = identity_functor(&c);
        let t = NatTrans {
            components: vec![c.identity_of(1), c.identity_of(0)], // crossed
        };
        let report = check_natural(&c, &c, &id, &id, &t);
        assert_eq!(
            report
                .violations
                .iter()
                .filter(|v| matches!(v, NaturalViolation::ComponentTyping { .. }))
                .count(),
            2
        );
    }
}
