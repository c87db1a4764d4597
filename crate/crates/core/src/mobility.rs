//! Categories of mobility built from enumerable toy dynamics.
//!
//! A [`MobilityCat`] is a thin category: objects are the simulator states
//! reachable from the initial state within a horizon, arrows are
//! reachability. One-step transitions enumerate the *full* branching of a
//! cycle — every argmax-tied site and every choice of neighbor columns.
//! Lowered to a [`FinCat`], these categories feed the robot classifications:
//! hard (isomorphic), soft (equivalent), and effectively soft (critical
//! states present / reachable from everywhere).

use std::collections::HashMap;

use thiserror::Error;

use crate::config::{ConfigError, SimConfig};
use crate::dynamics::apply_placed_move;
use crate::fincat::{
    categories_equivalent_with_limits, categories_isomorphic_with_limits, category_description,
    FinCat, SearchError, SearchLimits,
};
use crate::height::HeightField;
use crate::multiscale::{fitness_maximizers, ScaleError};
use crate::profiles::{resolve_target, Profile, ProfileError};

/// Enumeration guards. `max_states` bounds the reachable-state frontier;
/// `max_lowered_arrows` bounds the arrow count when materializing the
/// reachability preorder as a [`FinCat`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobilityLimits {
    pub max_states: usize,
    pub max_lowered_arrows: usize,
}

impl Default for MobilityLimits {
    fn default() -> Self {
        Self {
            max_states: 100_000,
            max_lowered_arrows: 4096,
        }
    }
}

#[derive(Debug, Error)]
pub enum MobilityError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error("toy guard: need width <= 16 and |heights| <= 4, got width {n} max |height| {max_height}")]
    ToyGuard { n: usize, max_height: i64 },
    #[error("state capacity exceeded: frontier reached {states} states (limit {limit})")]
    Capacity { states: usize, limit: usize },
    #[error("lowering capacity exceeded: {arrows} reach arrows (limit {limit})")]
    LoweringCapacity { arrows: usize, limit: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("mapping is not a projection functor: {0:?}")]
    BadProjection(MappingViolation),
    #[error("state index {index} out of range ({states} states)")]
    BadState { index: usize, states: usize },
}

/// Thin category of reachable states. `reach` is the reflexive-transitive
/// closure of the one-step transitions, stored per strongly connected
/// component.
#[derive(Debug, Clone)]
pub struct MobilityCat {
    states: Vec<Vec<i64>>,
    one_step: Vec<Vec<u32>>,
    scc_of: Vec<u32>,
    scc_members: Vec<Vec<u32>>,
    scc_reach: Vec<Vec<u64>>,
    initial: usize,
    horizon: u32,
}

impl MobilityCat {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[i64] {
        &self.states[i]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn successors(&self, i: usize) -> &[u32] {
        &self.one_step[i]
    }

    /// No outgoing one-step transition.
    pub fn is_absorbing(&self, i: usize) -> bool {
        self.one_step[i].is_empty()
    }

    /// Reachability in zero or more steps.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let row = &self.scc_reach[self.scc_of[from] as usize];
        let t = self.scc_of[to] as usize;
        row[t / 64] >> (t % 64) & 1 == 1
    }

    /// All states reachable from `i`, ascending (includes `i`).
    pub fn future_of(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.reaches(i, j)).collect()
    }

    /// States mutually reachable with `i`.
    pub fn cluster_of(&self, i: usize) -> Vec<usize> {
        self.scc_members[self.scc_of[i] as usize]
            .iter()
            .map(|&x| x as usize)
            .collect()
    }

    /// Builds a mobility category from explicit states and one-step edges.
    /// No reachability-from-initial requirement is imposed, so disconnected
    /// toy systems can be expressed.
    pub fn from_parts(
        states: Vec<Vec<i64>>,
        edges: &[(usize, usize)],
        initial: usize,
        horizon: u32,
    ) -> Result<Self, MobilityError> {
        let n = states.len();
        if initial >= n {
            return Err(MobilityError::BadState {
                index: initial,
                states: n,
            });
        }
        let mut one_step = vec![Vec::new(); n];
        for &(a, b) in edges {
            for ix in [a, b] {
                if ix >= n {
                    return Err(MobilityError::BadState {
                        index: ix,
                        states: n,
                    });
                }
            }
            one_step[a].push(b as u32);
        }
        for succ in &mut one_step {
            succ.sort_unstable();
            succ.dedup();
        }
        Ok(Self::finish(states, one_step, initial, horizon))
    }

    fn finish(
        states: Vec<Vec<i64>>,
        one_step: Vec<Vec<u32>>,
        initial: usize,
        horizon: u32,
    ) -> Self {
        let (scc_of, scc_members) = condense(&one_step);
        let scc_reach = scc_closure(&one_step, &scc_of, scc_members.len());
        Self {
            states,
            one_step,
            scc_of,
            scc_members,
            scc_reach,
            initial,
            horizon,
        }
    }
}

/// Iterative Tarjan; SCC ids come out in reverse topological order
/// (successors complete first).
fn condense(one_step: &[Vec<u32>]) -> (Vec<u32>, Vec<Vec<u32>>) {
    let n = one_step.len();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut scc_of = vec![u32::MAX; n];
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut counter = 0u32;

    for root in 0..n {
        if index[root] != u32::MAX {
            continue;
        }
        // explicit DFS: (node, next-child position)
        let mut call: Vec<(u32, usize)> = vec![(root as u32, 0)];
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            let v = v as usize;
            if *ci == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v as u32);
                on_stack[v] = true;
            }
            if *ci < one_step[v].len() {
                let w = one_step[v][*ci] as usize;
                *ci += 1;
                if index[w] == u32::MAX {
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&mut (p, _)) = call.last_mut() {
                let p = p as usize;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let id = members.len() as u32;
                let mut group = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    scc_of[w as usize] = id;
                    group.push(w);
                    if w as usize == v {
                        break;
                    }
                }
                group.sort_unstable();
                members.push(group);
            }
        }
    }
    (scc_of, members)
}

fn scc_closure(one_step: &[Vec<u32>], scc_of: &[u32], scc_count: usize) -> Vec<Vec<u64>> {
    let words = scc_count.div_ceil(64);
    let mut reach = vec![vec![0u64; words]; scc_count];
    // Tarjan order is reverse topological, so successors are already final.
    for s in 0..scc_count {
        reach[s][s / 64] |= 1 << (s % 64);
    }
    let mut cond_edges: Vec<(u32, u32)> = Vec::new();
    for (v, succ) in one_step.iter().enumerate() {
        for &w in succ {
            let (a, b) = (scc_of[v], scc_of[w as usize]);
            if a != b {
                cond_edges.push((a, b));
            }
        }
    }
    cond_edges.sort_unstable();
    cond_edges.dedup();
    // Edges sorted by source: since Tarjan ids successors first, every
    // source id exceeds its target id, so targets are final when merged.
    for &(a, b) in &cond_edges {
        debug_assert!(b < a, "condensation must be topological");
        let (head, tail) = reach.split_at_mut(a as usize);
        for (dst, src) in tail[0].iter_mut().zip(&head[b as usize]) {
            *dst |= *src;
        }
    }
    reach
}

fn combinations(width: usize, take: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, width: usize, left: usize) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=width - left {
            cur.push(i);
            rec(out, cur, i + 1, width, left - 1);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, width, take);
    out
}

/// All distinct next states of `h` under one cycle of the dynamics: every
/// argmax-tied site and every placement of the moved particles.
fn successor_states(h: &[i64], cfg: &SimConfig) -> Result<Vec<Vec<i64>>, MobilityError> {
    let field = HeightField::new(h.to_vec()).expect("states keep power-of-two width");
    let (_, ties) = fitness_maximizers(&field, cfg.s_min, cfg.s_max, cfg.edge_argmax)?;
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (scale, position, sign) in ties {
        let width = 1usize << scale;
        let n_blocks = h.len() >> scale;
        let at_edge = position == 0 || position == n_blocks - 1;
        let placements: Vec<(Vec<usize>, Vec<usize>)> = if at_edge {
            let all: Vec<usize> = (0..width).collect();
            if position == 0 {
                vec![(Vec::new(), all)]
            } else {
                vec![(all, Vec::new())]
            }
        } else {
            let halves = combinations(width, width / 2);
            halves
                .iter()
                .flat_map(|l| halves.iter().map(move |r| (l.clone(), r.clone())))
                .collect()
        };
        for (left, right) in placements {
            let mut next = field.clone();
            apply_placed_move(&mut next, scale, position, sign, &left, &right);
            let v = next.into_vec();
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Enumerates the mobility category of a toy target under `cfg`.
///
/// Objects are the states reachable from the flat-gripper initial state in
/// at most `horizon` cycles; arrows are the reflexive-transitive closure of
/// the one-step transitions restricted to those objects. Guarded to toy
/// sizes (width at most 16, heights within +/-4).
pub fn build_mobility_from(
    target: &Profile,
    cfg: &SimConfig,
    horizon: u32,
    limits: &MobilityLimits,
) -> Result<MobilityCat, MobilityError> {
    cfg.validate()?;
    let max_height = target.heights().iter().map(|h| h.abs()).max().unwrap_or(0);
    if target.len() > 16 || max_height > 4 {
        return Err(MobilityError::ToyGuard {
            n: target.len(),
            max_height,
        });
    }

    let initial: Vec<i64> = target.heights().iter().map(|t| -t).collect();
    let mut states = vec![initial.clone()];
    let mut index: HashMap<Vec<i64>, u32> = HashMap::new();
    index.insert(initial, 0);
    let mut one_step: Vec<Vec<u32>> = vec![Vec::new()];
    let mut expanded = vec![false; 1];

    let mut frontier: Vec<u32> = vec![0];
    for _ in 0..horizon {
        if frontier.is_empty() {
            break;
        }
        let mut next_frontier = Vec::new();
        for &s in &frontier {
            expanded[s as usize] = true;
            let succs = successor_states(&states[s as usize], cfg)?;
            let mut edges = Vec::with_capacity(succs.len());
            for next in succs {
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= limits.max_states {
                            return Err(MobilityError::Capacity {
                                states: states.len() + 1,
                                limit: limits.max_states,
                            });
                        }
                        let id = states.len() as u32;
                        index.insert(next.clone(), id);
                        states.push(next);
                        one_step.push(Vec::new());
                        expanded.push(false);
                        next_frontier.push(id);
                        id
                    }
                };
                edges.push(id);
            }
            edges.sort_unstable();
            edges.dedup();
            one_step[s as usize] = edges;
        }
        frontier = next_frontier;
    }

    // Boundary states keep their in-set transitions (arrows are the one-step
    // moves restricted to the enumerated objects).
    for s in 0..states.len() {
        if expanded[s] {
            continue;
        }
        let succs = successor_states(&states[s], cfg)?;
        let mut edges: Vec<u32> = succs
            .into_iter()
            .filter_map(|next| index.get(&next).copied())
            .collect();
        edges.sort_unstable();
        edges.dedup();
        one_step[s] = edges;
    }

    Ok(MobilityCat::finish(states, one_step, 0, horizon))
}

/// As [`build_mobility_from`], resolving the target from `cfg`.
pub fn build_mobility(
    cfg: &SimConfig,
    horizon: u32,
    limits: &MobilityLimits,
) -> Result<MobilityCat, MobilityError> {
    let target = resolve_target(cfg)?;
    build_mobility_from(&target, cfg, horizon, limits)
}

/// Materializes the reachability preorder as a finite category
/// (objects `s<i>`, one arrow per reach pair).
pub fn lower_to_fincat(m: &MobilityCat, limits: &MobilityLimits) -> Result<FinCat, MobilityError> {
    let n = m.len();
    let arrows: usize = (0..n).map(|x| m.future_of(x).len()).sum();
    if arrows > limits.max_lowered_arrows {
        return Err(MobilityError::LoweringCapacity {
            arrows,
            limit: limits.max_lowered_arrows,
        });
    }
    Ok(FinCat::from_preorder(n, |x, y| m.reaches(x, y))
        .expect("reachability closure is a preorder"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rigidity {
    Hard,
    SoftNotHard,
    Neither,
}

impl std::fmt::Display for Rigidity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rigidity::Hard => write!(f, "hard"),
            Rigidity::SoftNotHard => write!(f, "soft (not hard)"),
            Rigidity::Neither => write!(f, "neither"),
        }
    }
}

/// Hard when the categories are isomorphic, soft-not-hard when merely
/// equivalent, neither otherwise.
pub fn classify_rigidity(
    composite: &FinCat,
    robot: &FinCat,
    limits: &SearchLimits,
) -> Result<Rigidity, SearchError> {
    if categories_isomorphic_with_limits(composite, robot, limits)?.is_some() {
        return Ok(Rigidity::Hard);
    }
    if categories_equivalent_with_limits(composite, robot, limits)?.is_some() {
        return Ok(Rigidity::SoftNotHard);
    }
    Ok(Rigidity::Neither)
}

/// [`classify_rigidity`] on mobility categories, lowering both sides.
pub fn classify_mobility(
    composite: &MobilityCat,
    robot: &MobilityCat,
    mob_limits: &MobilityLimits,
    search_limits: &SearchLimits,
) -> Result<Rigidity, MobilityError> {
    let c = lower_to_fincat(composite, mob_limits)?;
    let r = lower_to_fincat(robot, mob_limits)?;
    Ok(classify_rigidity(&c, &r, search_limits)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MappingViolation {
    Shape { expected: usize, got: usize },
    OutOfRange { state: usize, image: usize },
    /// A reach pair whose images are not reach-related.
    NotMonotone { from: usize, to: usize },
    InitialNotPreserved { image: usize },
    /// `p0(s0(x)) != x`.
    NotSection { state: usize, image_back: usize },
}

/// Checks that `map` is a projection functor `src -> dst`: monotone on
/// reachability and sending initial to initial.
pub fn check_projection(src: &MobilityCat, dst: &MobilityCat, map: &[usize]) -> Vec<MappingViolation> {
    let mut v = check_monotone(src, dst, map);
    if v.is_empty() && map[src.initial()] != dst.initial() {
        v.push(MappingViolation::InitialNotPreserved {
            image: map[src.initial()],
        });
    }
    v
}

fn check_monotone(src: &MobilityCat, dst: &MobilityCat, map: &[usize]) -> Vec<MappingViolation> {
    let mut violations = Vec::new();
    if map.len() != src.len() {
        violations.push(MappingViolation::Shape {
            expected: src.len(),
            got: map.len(),
        });
        return violations;
    }
    for (state, &image) in map.iter().enumerate() {
        if image >= dst.len() {
            violations.push(MappingViolation::OutOfRange { state, image });
        }
    }
    if !violations.is_empty() {
        return violations;
    }
    for from in 0..src.len() {
        for to in 0..src.len() {
            if src.reaches(from, to) && !dst.reaches(map[from], map[to]) {
                violations.push(MappingViolation::NotMonotone { from, to });
            }
        }
    }
    violations
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlReport {
    pub violations: Vec<MappingViolation>,
}

impl ControlReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies that `s0` is a functorial section of the projection `p0`:
/// both maps monotone, `p0` initial-preserving, and `p0 ∘ s0` the identity
/// on the nose.
pub fn verify_control(
    composite: &MobilityCat,
    component: &MobilityCat,
    p0: &[usize],
    s0: &[usize],
) -> ControlReport {
    let mut violations = check_projection(composite, component, p0);
    violations.extend(check_monotone(component, composite, s0));
    if violations.is_empty() {
        for x in 0..component.len() {
            let back = p0[s0[x]];
            if back != x {
                violations.push(MappingViolation::NotSection {
                    state: x,
                    image_back: back,
                });
            }
        }
    }
    ControlReport { violations }
}

/// Finds every critical state: a state whose sub-category of futures is
/// isomorphic to the target entity's futures from its projection. For a
/// static target (one-object category) this reduces to absorbency.
pub fn find_critical_states(
    composite: &MobilityCat,
    target: &MobilityCat,
    proj: &[usize],
    search_limits: &SearchLimits,
) -> Result<Vec<usize>, MobilityError> {
    if let Some(v) = check_projection(composite, target, proj).into_iter().next() {
        return Err(MobilityError::BadProjection(v));
    }
    let mut critical = Vec::new();
    for s in 0..composite.len() {
        let fc = composite.future_of(s);
        let ft = target.future_of(proj[s]);
        if fc.len() != ft.len() {
            continue;
        }
        if fc.len() == 1 {
            critical.push(s);
            continue;
        }
        let sub_c = induced_preorder(composite, &fc);
        let sub_t = induced_preorder(target, &ft);
        if categories_isomorphic_with_limits(&sub_c, &sub_t, search_limits)?.is_some() {
            critical.push(s);
        }
    }
    Ok(critical)
}

fn induced_preorder(m: &MobilityCat, subset: &[usize]) -> FinCat {
    let subset = subset.to_vec();
    FinCat::from_preorder(subset.len(), move |a, b| m.reaches(subset[a], subset[b]))
        .expect("restriction of a preorder is a preorder")
}

/// Effectiveness verdicts over a critical-state set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveReport {
    /// Every state has an arrow to some critical state.
    pub effective: bool,
    /// The category contains critical states at all.
    pub effectively_soft: bool,
    /// A state that cannot reach any critical state, when not effective.
    pub stranded_witness: Option<usize>,
}

pub fn is_effective(composite: &MobilityCat, critical: &[usize]) -> EffectiveReport {
    let effectively_soft = !critical.is_empty();
    let mut stranded = None;
    for s in 0..composite.len() {
        if !critical.iter().any(|&c| composite.reaches(s, c)) {
            stranded = Some(s);
            break;
        }
    }
    EffectiveReport {
        effective: effectively_soft && stranded.is_none(),
        effectively_soft,
        stranded_witness: stranded,
    }
}

/// Category description of the reachability preorder, consumable by the
/// category file parser.
pub fn export_description(m: &MobilityCat, limits: &MobilityLimits) -> Result<String, MobilityError> {
    Ok(category_description(&lower_to_fincat(m, limits)?))
}

/// State table: `id<TAB>height height ...` per line.
pub fn export_state_table(m: &MobilityCat) -> String {
    let mut out = String::new();
    for i in 0..m.len() {
        let heights: Vec<String> = m.state(i).iter().map(|h| h.to_string()).collect();
        out.push_str(&format!("{i}\t{}\n", heights.join(" ")));
    }
    out
}

/// One-step transition edges: `from<TAB>to` per line.
pub fn export_edge_list(m: &MobilityCat) -> String {
    let mut out = String::new();
    for i in 0..m.len() {
        for &j in m.successors(i) {
            out.push_str(&format!("{i}\t{j}\n"));
        }
    }
    out
}
