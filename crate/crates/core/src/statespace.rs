//! Exact state and transition counts for the block-arrangement model.
//!
//! At scale `S` the system is `B = N/2^S` indistinguishable blocks spread
//! over `B` cells (a weak composition). A transition moves one block from an
//! occupied cell to an adjacent cell; edge cells have one legal direction.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateSpaceError {
    #[error("block count must be at least 1, got {0}")]
    NoBlocks(u64),
    #[error("transitions undefined for a single cell (no moves)")]
    NoMoves,
    #[error("enumeration guard: B = {0} exceeds the limit of 6")]
    GuardExceeded(u64),
    #[error("scale {s} leaves fewer than 2 blocks for n_exp {n_exp}")]
    ScaleTooCoarse { s: u32, n_exp: u32 },
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut res = BigUint::one();
    for i in 0..k {
        res = res * (n - i) / (i + 1);
    }
    res
}

/// Number of weak compositions of `B` blocks into `B` cells:
/// `C(2B-1, B-1)`.
pub fn count_states(b: u64) -> Result<BigUint, StateSpaceError> {
    if b == 0 {
        return Err(StateSpaceError::NoBlocks(b));
    }
    Ok(binomial(2 * b - 1, b - 1))
}

/// Number of (state, occupied cell, legal direction) triples:
/// `(2B-2) * (C(2B-1,B-1) - C(2B-2,B-2))`.
pub fn count_transitions(b: u64) -> Result<BigUint, StateSpaceError> {
    if b == 0 {
        return Err(StateSpaceError::NoBlocks(b));
    }
    if b == 1 {
        return Err(StateSpaceError::NoMoves);
    }
    let occupied = count_states(b)? - binomial(2 * b - 2, b - 2);
    Ok(BigUint::from(2 * b - 2) * occupied)
}

/// `log10` of a big integer, accurate to double precision.
pub fn log10_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap_or(0.0).log10();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().unwrap();
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// Closed-form counts at one scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementSpace {
    pub blocks: u64,
    pub states: BigUint,
    pub transitions: BigUint,
}

impl ArrangementSpace {
    pub fn for_blocks(b: u64) -> Result<Self, StateSpaceError> {
        Ok(Self {
            blocks: b,
            states: count_states(b)?,
            transitions: count_transitions(b)?,
        })
    }

    /// Counts at scale `s` of a width-`2^n_exp` system: `B = 2^(n_exp-s)`.
    pub fn for_scale(n_exp: u32, s: u32) -> Result<Self, StateSpaceError> {
        if s >= n_exp {
            return Err(StateSpaceError::ScaleTooCoarse { s, n_exp });
        }
        Self::for_blocks(1u64 << (n_exp - s))
    }

    pub fn log10_states(&self) -> f64 {
        log10_biguint(&self.states)
    }

    pub fn log10_transitions(&self) -> f64 {
        log10_biguint(&self.transitions)
    }
}

/// Explicit state list and directed move edges for small `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedSpace {
    pub states: Vec<Vec<u32>>,
    /// Directed edges as (from, to) indices into `states`.
    pub edges: Vec<(usize, usize)>,
}

/// Brute-force enumeration oracle for the closed forms. Guarded at `B <= 6`.
pub fn enumerate_space(b: u64) -> Result<EnumeratedSpace, StateSpaceError> {
    if b == 0 {
        return Err(StateSpaceError::NoBlocks(b));
    }
    if b > 6 {
        return Err(StateSpaceError::GuardExceeded(b));
    }
    let cells = b as usize;
    let mut states = Vec::new();
    let mut acc = vec![0u32; cells];
    fn fill(states: &mut Vec<Vec<u32>>, acc: &mut Vec<u32>, cell: usize, left: u32) {
        if cell == acc.len() - 1 {
            acc[cell] = left;
            states.push(acc.clone());
            return;
        }
        for take in 0..=left {
            acc[cell] = take;
            fill(states, acc, cell + 1, left - take);
        }
    }
    fill(&mut states, &mut acc, 0, b as u32);

    let index: std::collections::HashMap<Vec<u32>, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut edges = Vec::new();
    for (i, s) in states.iter().enumerate() {
        for cell in 0..cells {
            if s[cell] == 0 {
                continue;
            }
            for dst in [cell.wrapping_sub(1), cell + 1] {
                if dst >= cells {
                    continue;
                }
                let mut next = s.clone();
                next[cell] -= 1;
                next[dst] += 1;
                edges.push((i, index[&next]));
            }
        }
    }
    Ok(EnumeratedSpace { states, edges })
}

/// Scale table CSV interface:
/// `S,B,state_count,transition_count,log10_states,log10_transitions`.
pub fn table_csv(n_exp: u32, scales: &[u32]) -> Result<String, StateSpaceError> {
    let mut out = String::from("S,B,state_count,transition_count,log10_states,log10_transitions\n");
    for &s in scales {
        let a = ArrangementSpace::for_scale(n_exp, s)?;
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6}\n",
            s,
            a.blocks,
            a.states,
            a.transitions,
            a.log10_states(),
            a.log10_transitions()
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_closed_forms() {
        assert_eq!(count_states(1).unwrap(), BigUint::from(1u32));
        assert_eq!(count_states(2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_transitions(2).unwrap(), BigUint::from(4u32));
        assert_eq!(count_states(3).unwrap(), BigUint::from(10u32));
        assert_eq!(count_transitions(3).unwrap(), BigUint::from(24u32));
        assert_eq!(count_states(8).unwrap(), BigUint::from(6435u32));
        assert_eq!(count_transitions(8).unwrap(), BigUint::from(48048u32));
    }

    #[test]
    fn guards() {
        assert_eq!(count_states(0), Err(StateSpaceError::NoBlocks(0)));
        assert_eq!(count_transitions(1), Err(StateSpaceError::NoMoves));
        assert_eq!(enumerate_space(7), Err(StateSpaceError::GuardExceeded(7)));
        assert!(matches!(
            ArrangementSpace::for_scale(10, 10),
            Err(StateSpaceError::ScaleTooCoarse { .. })
        ));
    }

    #[test]
    fn enumeration_matches_closed_forms() {
        for b in 1..=6u64 {
            let e = enumerate_space(b).unwrap();
            assert_eq!(
                BigUint::from(e.states.len()),
                count_states(b).unwrap(),
                "states at B={b}"
            );
            if b >= 2 {
                assert_eq!(
                    BigUint::from(e.edges.len()),
                    count_transitions(b).unwrap(),
                    "transitions at B={b}"
                );
            }
        }
    }

    #[test]
    fn edges_preserve_total_and_avoid_self_loops() {
        let e = enumerate_space(5).unwrap();
        for s in &e.states {
            assert_eq!(s.iter().sum::<u32>(), 5);
        }
        for &(a, b) in &e.edges {
            assert_ne!(a, b);
        }
    }

    #[test]
    fn transition_graph_is_symmetric() {
        let e = enumerate_space(4).unwrap();
        let set: std::collections::HashSet<(usize, usize)> = e.edges.iter().cloned().collect();
        assert_eq!(set.len(), e.edges.len(), "duplicate edges");
        for &(a, b) in &e.edges {
            assert!(set.contains(&(b, a)), "missing reverse of {a}->{b}");
        }
    }

    #[test]
    fn desk_scale_orders_of_magnitude() {
        // B = 128 (S=3 at n_exp=10): 76-digit state count
        let a = ArrangementSpace::for_blocks(128).unwrap();
        assert_eq!(a.states.to_string().len(), 76);
        assert!((a.log10_states() - 75.46).abs() < 0.1, "{}", a.log10_states());
        assert!(
            (a.log10_transitions() - 77.56).abs() < 0.1,
            "{}",
            a.log10_transitions()
        );
    }

    #[test]
    fn log10_matches_f64_in_range() {
        let x = BigUint::from(123_456_789u64);
        assert!((log10_biguint(&x) - (123_456_789f64).log10()).abs() < 1e-12);
    }

    #[test]
    fn table_has_requested_rows() {
        let csv = table_csv(10, &[2, 3, 7]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("7,8,6435,48048,"));
    }
}
