//! Isomorphism and equivalence of finite categories.
//!
//! Isomorphism is decided by exhaustive search for a strict inverse functor
//! pair, with hom-profile pruning and composition propagation. Equivalence
//! is decided on skeletons (one object per isomorphism class): two finite
//! categories are equivalent exactly when their skeletons are isomorphic,
//! and the functor pair plus invertible unit/counit transformations are
//! reconstructed as the returned witness. [`equivalent_by_search`] is the
//! independent reference decision: brute force over functor pairs and
//! natural isomorphisms.

use thiserror::Error;

use super::functor::{compose_functors, FunctorMap};
use super::natural::NatTrans;
use super::{check_category, is_isomorphism, FinCat};

/// Bounds on the exhaustive searches. The defaults keep worst-case
/// backtracking trivial; raise them knowingly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_objects: usize,
    pub max_arrows: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_objects: 8,
            max_arrows: 24,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search capacity exceeded: {objects} objects / {arrows} arrows (limit {max_objects}/{max_arrows})")]
    Capacity {
        objects: usize,
        arrows: usize,
        max_objects: usize,
        max_arrows: usize,
    },
    #[error("the {side} category violates the category laws")]
    InvalidCategory { side: &'static str },
    #[error("reference search budget exceeded ({0} functors)")]
    OracleBudget(usize),
}

fn capacity(objects: usize, arrows: usize, limits: &SearchLimits) -> SearchError {
    SearchError::Capacity {
        objects,
        arrows,
        max_objects: limits.max_objects,
        max_arrows: limits.max_arrows,
    }
}

fn ensure_valid(c: &FinCat, side: &'static str) -> Result<(), SearchError> {
    if check_category(c).is_valid() {
        Ok(())
    } else {
        Err(SearchError::InvalidCategory { side })
    }
}

struct IsoSearch<'a> {
    c: &'a FinCat,
    d: &'a FinCat,
    hom_d: Vec<Vec<Vec<usize>>>,
    sigma: Vec<usize>,
    obj_used: Vec<bool>,
    tau: Vec<Option<usize>>,
    arr_used: Vec<bool>,
    trail: Vec<usize>,
}

impl<'a> IsoSearch<'a> {
    fn new(c: &'a FinCat, d: &'a FinCat) -> Self {
        let n = d.object_count();
        let hom_d = (0..n)
            .map(|x| (0..n).map(|y| d.hom(x, y)).collect())
            .collect();
        Self {
            c,
            d,
            hom_d,
            sigma: vec![usize::MAX; c.object_count()],
            obj_used: vec![false; d.object_count()],
            tau: vec![None; c.arrow_count()],
            arr_used: vec![false; d.arrow_count()],
            trail: Vec::new(),
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let f = self.trail.pop().unwrap();
            let ff = self.tau[f].take().unwrap();
            self.arr_used[ff] = false;
        }
    }

    /// Records `tau[f] = ff` and propagates every composite this forces.
    /// On failure the caller must rewind the trail.
    fn try_assign(&mut self, f: usize, ff: usize) -> bool {
        if let Some(cur) = self.tau[f] {
            return cur == ff;
        }
        if self.arr_used[ff]
            || self.d.dom(ff) != self.sigma[self.c.dom(f)]
            || self.d.cod(ff) != self.sigma[self.c.cod(f)]
        {
            return false;
        }
        self.tau[f] = Some(ff);
        self.arr_used[ff] = true;
        self.trail.push(f);
        let mut qi = self.trail.len() - 1;
        while qi < self.trail.len() {
            let a = self.trail[qi];
            qi += 1;
            let aa = self.tau[a].unwrap();
            for ti in 0..self.trail.len() {
                let b = self.trail[ti];
                let bb = self.tau[b].unwrap();
                // both orders; when a == b this checks the endo-composite
                for ((hi, lo), (hhi, llo)) in [((a, b), (aa, bb)), ((b, a), (bb, aa))] {
                    if self.c.cod(lo) != self.c.dom(hi) {
                        continue;
                    }
                    let (Some(comp), Some(dcomp)) =
                        (self.c.composite(hi, lo), self.d.composite(hhi, llo))
                    else {
                        return false;
                    };
                    match self.tau[comp] {
                        Some(t) => {
                            if t != dcomp {
                                return false;
                            }
                        }
                        None => {
                            if self.arr_used[dcomp]
                                || self.d.dom(dcomp) != self.sigma[self.c.dom(comp)]
                                || self.d.cod(dcomp) != self.sigma[self.c.cod(comp)]
                            {
                                return false;
                            }
                            self.tau[comp] = Some(dcomp);
                            self.arr_used[dcomp] = true;
                            self.trail.push(comp);
                        }
                    }
                }
            }
        }
        true
    }

    fn search_arrows(&mut self) -> bool {
        let Some(f) = (0..self.c.arrow_count()).find(|&f| self.tau[f].is_none()) else {
            return true;
        };
        let (x, y) = (self.sigma[self.c.dom(f)], self.sigma[self.c.cod(f)]);
        let candidates = self.hom_d[x][y].clone();
        for ff in candidates {
            if self.arr_used[ff] {
                continue;
            }
            let mark = self.trail.len();
            if self.try_assign(f, ff) && self.search_arrows() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }

    fn hom_profile_ok(&self, x: usize, y: usize) -> bool {
        for xp in 0..self.c.object_count() {
            let yp = self.sigma[xp];
            if yp == usize::MAX {
                continue;
            }
            if self.c.hom(x, xp).len() != self.hom_d[y][yp].len()
                || self.c.hom(xp, x).len() != self.hom_d[yp][y].len()
            {
                return false;
            }
        }
        self.c.hom(x, x).len() == self.hom_d[y][y].len()
    }

    fn search_objects(&mut self, x: usize) -> bool {
        if x == self.c.object_count() {
            let mark = self.trail.len();
            let ok = (0..self.c.object_count()).all(|o| {
                self.try_assign(
                    self.c.identity_of(o),
                    self.d.identity_of(self.sigma[o]),
                )
            });
            if ok && self.search_arrows() {
                return true;
            }
            self.undo_to(mark);
            return false;
        }
        for y in 0..self.d.object_count() {
            if self.obj_used[y] || !self.hom_profile_ok(x, y) {
                continue;
            }
            self.sigma[x] = y;
            self.obj_used[y] = true;
            if self.search_objects(x + 1) {
                return true;
            }
            self.sigma[x] = usize::MAX;
            self.obj_used[y] = false;
        }
        false
    }
}

fn find_strict_iso(c: &FinCat, d: &FinCat) -> Option<FunctorMap> {
    if c.object_count() != d.object_count() || c.arrow_count() != d.arrow_count() {
        return None;
    }
    let mut search = IsoSearch::new(c, d);
    if !search.search_objects(0) {
        return None;
    }
    Some(FunctorMap {
        obj_map: search.sigma,
        arr_map: search.tau.into_iter().map(|t| t.unwrap()).collect(),
    })
}

fn invert_functor(fm: &FunctorMap) -> FunctorMap {
    let mut obj_map = vec![0; fm.obj_map.len()];
    let mut arr_map = vec![0; fm.arr_map.len()];
    for (x, &y) in fm.obj_map.iter().enumerate() {
        obj_map[y] = x;
    }
    for (f, &g) in fm.arr_map.iter().enumerate() {
        arr_map[g] = f;
    }
    FunctorMap { obj_map, arr_map }
}

/// Decides strict isomorphism in `Cat`: searches for an invertible functor
/// pair. Sizes are guarded by `limits` (checked against both categories).
pub fn categories_isomorphic_with_limits(
    c: &FinCat,
    d: &FinCat,
    limits: &SearchLimits,
) -> Result<Option<(FunctorMap, FunctorMap)>, SearchError> {
    ensure_valid(c, "left")?;
    ensure_valid(d, "right")?;
    if c.object_count() != d.object_count() || c.arrow_count() != d.arrow_count() {
        return Ok(None);
    }
    if c.object_count() > limits.max_objects || c.arrow_count() > limits.max_arrows {
        return Err(capacity(c.object_count(), c.arrow_count(), limits));
    }
    Ok(find_strict_iso(c, d).map(|f| {
        let g = invert_functor(&f);
        (f, g)
    }))
}

pub fn categories_isomorphic(
    c: &FinCat,
    d: &FinCat,
) -> Result<Option<(FunctorMap, FunctorMap)>, SearchError> {
    categories_isomorphic_with_limits(c, d, &SearchLimits::default())
}

/// A skeleton of a category: one representative object per isomorphism
/// class, the full subcategory on those representatives, and the chosen
/// witness isomorphisms between each object and its representative.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub cat: FinCat,
    /// Original object -> skeleton object (isomorphism class) index.
    pub class_of: Vec<usize>,
    /// Skeleton object index -> original representative object.
    pub rep_object: Vec<usize>,
    /// Per original object: witness iso `X -> rep(X)` in the original
    /// category (identity on representatives).
    pub to_rep: Vec<usize>,
    /// Its inverse, `rep(X) -> X`.
    pub from_rep: Vec<usize>,
    /// Retraction functor (original -> skeleton).
    pub retract: FunctorMap,
    /// Inclusion functor (skeleton -> original).
    pub include: FunctorMap,
}

/// Computes a skeleton of a lawful category. Representatives are the
/// lowest-indexed object of each isomorphism class.
pub fn compute_skeleton(c: &FinCat) -> Result<Skeleton, SearchError> {
    ensure_valid(c, "input")?;
    let n = c.object_count();
    let mut class_of = vec![usize::MAX; n];
    let mut rep_object = Vec::new();
    let mut to_rep = vec![usize::MAX; n];
    let mut from_rep = vec![usize::MAX; n];

    for r in 0..n {
        if class_of[r] != usize::MAX {
            continue;
        }
        let class = rep_object.len();
        rep_object.push(r);
        class_of[r] = class;
        to_rep[r] = c.identity_of(r);
        from_rep[r] = c.identity_of(r);
        // breadth-first over iso edges, composing witnesses along the way
        let mut queue = vec![r];
        while let Some(x) = queue.pop() {
            for y in 0..n {
                if class_of[y] != usize::MAX {
                    continue;
                }
                let Some((e, e_inv)) = c
                    .hom(x, y)
                    .into_iter()
                    .find_map(|e| is_isomorphism(c, e).map(|inv| (e, inv)))
                else {
                    continue;
                };
                class_of[y] = class;
                // y -> x -> rep and rep -> x -> y
                to_rep[y] = c
                    .composite(to_rep[x], e_inv)
                    .expect("lawful category has the composite");
                from_rep[y] = c
                    .composite(e, from_rep[x])
                    .expect("lawful category has the composite");
                queue.push(y);
            }
        }
    }

    // Full subcategory on the representatives.
    let is_rep: Vec<bool> = (0..n).map(|x| rep_object.contains(&x)).collect();
    let mut skel_arrow_of = vec![usize::MAX; c.arrow_count()];
    let mut arrows = Vec::new();
    let mut orig_arrow_of = Vec::new();
    for f in 0..c.arrow_count() {
        if is_rep[c.dom(f)] && is_rep[c.cod(f)] {
            skel_arrow_of[f] = arrows.len();
            orig_arrow_of.push(f);
            arrows.push((
                c.arrow_name(f).to_string(),
                class_of[c.dom(f)],
                class_of[c.cod(f)],
            ));
        }
    }
    let mut compose = std::collections::HashMap::new();
    for (&(g, f), &gf) in c.composition_table() {
        if skel_arrow_of[g] != usize::MAX && skel_arrow_of[f] != usize::MAX {
            compose.insert((skel_arrow_of[g], skel_arrow_of[f]), skel_arrow_of[gf]);
        }
    }
    let cat = FinCat::from_parts(
        rep_object
            .iter()
            .map(|&r| c.object_name(r).to_string())
            .collect(),
        arrows,
        rep_object
            .iter()
            .map(|&r| skel_arrow_of[c.identity_of(r)])
            .collect(),
        compose,
    )
    .expect("skeleton construction is referentially sound");

    // r(f) = to_rep[cod f] ∘ f ∘ from_rep[dom f]
    let retract_arr: Vec<usize> = (0..c.arrow_count())
        .map(|f| {
            let t1 = c
                .composite(f, from_rep[c.dom(f)])
                .expect("lawful category has the composite");
            let t2 = c
                .composite(to_rep[c.cod(f)], t1)
                .expect("lawful category has the composite");
            skel_arrow_of[t2]
        })
        .collect();
    let retract = FunctorMap {
        obj_map: class_of.clone(),
        arr_map: retract_arr,
    };
    let include = FunctorMap {
        obj_map: rep_object.clone(),
        arr_map: orig_arrow_of.clone(),
    };

    Ok(Skeleton {
        cat,
        class_of,
        rep_object,
        to_rep,
        from_rep,
        retract,
        include,
    })
}

/// Witness of an equivalence: the functor pair and the invertible natural
/// transformations `Id_C => backward ∘ forward` and
/// `Id_D => forward ∘ backward`.
#[derive(Debug, Clone)]
pub struct Equivalence {
    pub forward: FunctorMap,
    pub backward: FunctorMap,
    pub unit: NatTrans,
    pub counit: NatTrans,
}

/// Decides categorical equivalence via skeletons. `limits` bounds the
/// isomorphism search on the skeletons, not the input categories, so large
/// thin categories with few isomorphism classes are fine.
pub fn categories_equivalent_with_limits(
    c: &FinCat,
    d: &FinCat,
    limits: &SearchLimits,
) -> Result<Option<Equivalence>, SearchError> {
    ensure_valid(c, "left")?;
    ensure_valid(d, "right")?;
    let sc = compute_skeleton(c)?;
    let sd = compute_skeleton(d)?;
    if sc.cat.object_count() != sd.cat.object_count()
        || sc.cat.arrow_count() != sd.cat.arrow_count()
    {
        return Ok(None);
    }
    if sc.cat.object_count() > limits.max_objects || sc.cat.arrow_count() > limits.max_arrows {
        return Err(capacity(sc.cat.object_count(), sc.cat.arrow_count(), limits));
    }
    let Some(f0) = find_strict_iso(&sc.cat, &sd.cat) else {
        return Ok(None);
    };
    let f0_inv = invert_functor(&f0);

    let forward = compose_functors(&compose_functors(&sc.retract, &f0), &sd.include);
    let backward = compose_functors(&compose_functors(&sd.retract, &f0_inv), &sc.include);
    let unit = NatTrans {
        components: sc.to_rep.clone(),
    };
    let counit = NatTrans {
        components: sd.to_rep.clone(),
    };
    Ok(Some(Equivalence {
        forward,
        backward,
        unit,
        counit,
    }))
}

pub fn categories_equivalent(
    c: &FinCat,
    d: &FinCat,
) -> Result<Option<Equivalence>, SearchError> {
    categories_equivalent_with_limits(c, d, &SearchLimits::default())
}

// ---------------------------------------------------------------------------
// Brute-force reference search (the oracle).

struct FunctorEnum<'a> {
    src: &'a FinCat,
    dst: &'a FinCat,
    hom_dst: Vec<Vec<Vec<usize>>>,
    sigma: Vec<usize>,
    tau: Vec<Option<usize>>,
    trail: Vec<usize>,
    out: Vec<FunctorMap>,
    budget: usize,
}

impl<'a> FunctorEnum<'a> {
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let f = self.trail.pop().unwrap();
            self.tau[f] = None;
        }
    }

    fn try_assign(&mut self, f: usize, ff: usize) -> bool {
        if let Some(cur) = self.tau[f] {
            return cur == ff;
        }
        if self.dst.dom(ff) != self.sigma[self.src.dom(f)]
            || self.dst.cod(ff) != self.sigma[self.src.cod(f)]
        {
            return false;
        }
        self.tau[f] = Some(ff);
        self.trail.push(f);
        let mut qi = self.trail.len() - 1;
        while qi < self.trail.len() {
            let a = self.trail[qi];
            qi += 1;
            let aa = self.tau[a].unwrap();
            for ti in 0..self.trail.len() {
                let b = self.trail[ti];
                let bb = self.tau[b].unwrap();
                for ((hi, lo), (hhi, llo)) in [((a, b), (aa, bb)), ((b, a), (bb, aa))] {
                    if self.src.cod(lo) != self.src.dom(hi) {
                        continue;
                    }
                    let (Some(comp), Some(dcomp)) =
                        (self.src.composite(hi, lo), self.dst.composite(hhi, llo))
                    else {
                        return false;
                    };
                    match self.tau[comp] {
                        Some(t) => {
                            if t != dcomp {
                                return false;
                            }
                        }
                        None => {
                            if self.dst.dom(dcomp) != self.sigma[self.src.dom(comp)]
                                || self.dst.cod(dcomp) != self.sigma[self.src.cod(comp)]
                            {
                                return false;
                            }
                            self.tau[comp] = Some(dcomp);
                            self.trail.push(comp);
                        }
                    }
                }
            }
        }
        true
    }

    fn search_arrows(&mut self) -> Result<(), SearchError> {
        let Some(f) = (0..self.src.arrow_count()).find(|&f| self.tau[f].is_none()) else {
            if self.out.len() >= self.budget {
                return Err(SearchError::OracleBudget(self.budget));
            }
            self.out.push(FunctorMap {
                obj_map: self.sigma.clone(),
                arr_map: self.tau.iter().map(|t| t.unwrap()).collect(),
            });
            return Ok(());
        };
        let (x, y) = (self.sigma[self.src.dom(f)], self.sigma[self.src.cod(f)]);
        let candidates = self.hom_dst[x][y].clone();
        for ff in candidates {
            let mark = self.trail.len();
            if self.try_assign(f, ff) {
                self.search_arrows()?;
            }
            self.undo_to(mark);
        }
        Ok(())
    }

    fn search_objects(&mut self, x: usize) -> Result<(), SearchError> {
        if x == self.src.object_count() {
            let mark = self.trail.len();
            let ok = (0..self.src.object_count()).all(|o| {
                self.try_assign(
                    self.src.identity_of(o),
                    self.dst.identity_of(self.sigma[o]),
                )
            });
            if ok {
                self.search_arrows()?;
            }
            self.undo_to(mark);
            return Ok(());
        }
        for y in 0..self.dst.object_count() {
            self.sigma[x] = y;
            self.search_objects(x + 1)?;
        }
        self.sigma[x] = usize::MAX;
        Ok(())
    }
}

/// Enumerates every functor `src -> dst` by exhaustive backtracking.
fn all_functors(src: &FinCat, dst: &FinCat, budget: usize) -> Result<Vec<FunctorMap>, SearchError> {
    let n = dst.object_count();
    let mut e = FunctorEnum {
        src,
        dst,
        hom_dst: (0..n)
            .map(|x| (0..n).map(|y| dst.hom(x, y)).collect())
            .collect(),
        sigma: vec![usize::MAX; src.object_count()],
        tau: vec![None; src.arrow_count()],
        trail: Vec::new(),
        out: Vec::new(),
        budget,
    };
    if src.object_count() == 0 {
        return Ok(vec![FunctorMap {
            obj_map: vec![],
            arr_map: vec![],
        }]);
    }
    if dst.object_count() == 0 {
        return Ok(Vec::new());
    }
    e.search_objects(0)?;
    Ok(e.out)
}

/// Is there an invertible natural transformation `Id => h` on `c`?
fn exists_nat_iso_to_identity(c: &FinCat, h: &FunctorMap) -> bool {
    let n = c.object_count();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            c.hom(x, h.obj_map[x])
                .into_iter()
                .filter(|&e| is_isomorphism(c, e).is_some())
                .collect()
        })
        .collect();
    if candidates.iter().any(|cand| cand.is_empty()) {
        return false;
    }
    fn rec(c: &FinCat, h: &FunctorMap, candidates: &[Vec<usize>], t: &mut Vec<usize>) -> bool {
        let x = t.len();
        if x == candidates.len() {
            return true;
        }
        'cand: for &tx in &candidates[x] {
            t.push(tx);
            // squares over every arrow between already-assigned objects
            for f in 0..c.arrow_count() {
                let (a, b) = (c.dom(f), c.cod(f));
                if a >= t.len() || b >= t.len() {
                    continue;
                }
                let lhs = c.composite(t[b], f);
                let rhs = c.composite(h.arr_map[f], t[a]);
                if lhs.is_none() || lhs != rhs {
                    t.pop();
                    continue 'cand;
                }
            }
            if rec(c, h, candidates, t) {
                return true;
            }
            t.pop();
        }
        false
    }
    rec(c, h, &candidates, &mut Vec::new())
}

/// Brute-force equivalence decision straight from the definition: search
/// all functor pairs `F: C -> D`, `G: D -> C` for one where `G ∘ F` and
/// `F ∘ G` are naturally isomorphic to the identities. Guarded to 4
/// objects per side; independent of the skeleton path.
pub fn equivalent_by_search(c: &FinCat, d: &FinCat) -> Result<bool, SearchError> {
    let limits = SearchLimits {
        max_objects: 4,
        max_arrows: 20,
    };
    for side in [c, d] {
        if side.object_count() > limits.max_objects || side.arrow_count() > limits.max_arrows {
            return Err(capacity(side.object_count(), side.arrow_count(), &limits));
        }
    }
    ensure_valid(c, "left")?;
    ensure_valid(d, "right")?;
    let budget = 20_000;
    let fs = all_functors(c, d, budget)?;
    let gs = all_functors(d, c, budget)?;
    for f in &fs {
        for g in &gs {
            let gf = compose_functors(f, g); // G ∘ F : C -> C
            if !exists_nat_iso_to_identity(c, &gf) {
                continue;
            }
            let fg = compose_functors(g, f); // F ∘ G : D -> D
            if exists_nat_iso_to_identity(d, &fg) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
