//! Coarse-grained height views and the scale/position fitting measure.
//!
//! Block means and fitness values are exact dyadic rationals (integer block
//! sums over power-of-two denominators), so the argmax over scales has no
//! floating-point ambiguity.

use rand::Rng;
use thiserror::Error;

use crate::height::HeightField;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScaleError {
    #[error("scale {scale} out of range for n_exp {n_exp}")]
    ScaleOutOfRange { scale: u32, n_exp: u32 },
    #[error("fitness needs at least 2 blocks, view at scale {0} has 1")]
    SingleBlock(u32),
    #[error("scale range {s_min}..={s_max} invalid for n_exp {n_exp}")]
    BadScaleRange { s_min: u32, s_max: u32, n_exp: u32 },
}

/// Exact rational with a power-of-two denominator: `num / 2^exp`.
///
/// Normalized on construction (zero has exponent 0, odd numerator otherwise),
/// so equal values compare equal structurally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub fn new(mut num: i128, mut exp: u32) -> Self {
        if num == 0 {
            return Self { num: 0, exp: 0 };
        }
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        Self { num, exp }
    }

    pub fn zero() -> Self {
        Self { num: 0, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn abs(&self) -> Self {
        Self {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    /// Denominator exponent: the value is `numerator / 2^denom_exp`.
    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (1u128 << self.exp) as f64
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // a/2^i vs b/2^j  <=>  a*2^j vs b*2^i; block sums keep these far
        // below i128 overflow.
        let lhs = self.num << other.exp;
        let rhs = other.num << self.exp;
        lhs.cmp(&rhs)
    }
}

/// Block means of a height field at one scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleView {
    scale_exp: u32,
    sums: Vec<i64>,
}

impl ScaleView {
    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    pub fn block_width(&self) -> usize {
        1usize << self.scale_exp
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// Exact integer sum of block `p`.
    pub fn block_sum(&self, p: usize) -> i64 {
        self.sums[p]
    }

    /// Exact mean height of block `p`: `block_sum(p) / 2^scale_exp`.
    pub fn mean(&self, p: usize) -> Dyadic {
        Dyadic::new(self.sums[p] as i128, self.scale_exp)
    }

    pub fn means(&self) -> Vec<Dyadic> {
        (0..self.len()).map(|p| self.mean(p)).collect()
    }
}

/// Scale- and position-dependent fitting measure over one view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitnessField {
    scale_exp: u32,
    values: Vec<Dyadic>,
}

impl FitnessField {
    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, p: usize) -> Dyadic {
        self.values[p]
    }

    pub fn values(&self) -> &[Dyadic] {
        &self.values
    }
}

/// The site selected by the fitness argmax.
///
/// `sign` is the sign of the block's deviation from its neighbors' average:
/// positive means the block sits above them (particles flow out), negative
/// below (particles flow in). When `max_value` is zero the field is flat at
/// every scanned scale, no move is possible, and the remaining fields are
/// meaningless.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveSite {
    pub scale_exp: u32,
    pub position: usize,
    pub sign: i8,
    pub max_value: Dyadic,
}

impl MoveSite {
    pub fn is_flat(&self) -> bool {
        self.max_value.is_zero()
    }
}

/// Averages `h` over contiguous blocks of width `2^scale`.
pub fn coarsen(h: &HeightField, scale: u32) -> Result<ScaleView, ScaleError> {
    if scale > h.n_exp() {
        return Err(ScaleError::ScaleOutOfRange {
            scale,
            n_exp: h.n_exp(),
        });
    }
    let width = 1usize << scale;
    let sums = h
        .as_slice()
        .chunks_exact(width)
        .map(|c| c.iter().sum())
        .collect();
    Ok(ScaleView {
        scale_exp: scale,
        sums,
    })
}

/// Signed deviation of block `p` from its neighbors' average, as an exact
/// `(numerator, denominator exponent)` pair. Edge blocks deviate from their
/// single neighbor.
fn signed_deviation(sums: &[i64], scale: u32, p: usize) -> (i128, u32) {
    let last = sums.len() - 1;
    if p == 0 {
        (sums[0] as i128 - sums[1] as i128, scale)
    } else if p == last {
        (sums[last] as i128 - sums[last - 1] as i128, scale)
    } else {
        (
            2 * sums[p] as i128 - sums[p - 1] as i128 - sums[p + 1] as i128,
            scale + 1,
        )
    }
}

/// Fitting measure of every block in a view: absolute deviation of the block
/// mean from the average of its two neighbors' means, edge blocks from their
/// single neighbor.
pub fn fitness(view: &ScaleView) -> Result<FitnessField, ScaleError> {
    if view.len() < 2 {
        return Err(ScaleError::SingleBlock(view.scale_exp));
    }
    let values = (0..view.len())
        .map(|p| {
            let (num, exp) = signed_deviation(&view.sums, view.scale_exp, p);
            Dyadic::new(num.abs(), exp)
        })
        .collect();
    Ok(FitnessField {
        scale_exp: view.scale_exp,
        values,
    })
}

/// Every site attaining the maximal fitting measure over `s_min..=s_max`,
/// as `(scale_exp, position, sign)` triples in scan order, together with the
/// maximum itself. An empty tie list means the field is flat at every
/// scanned scale.
///
/// With `include_edges` false, edge blocks are scanned out of the argmax
/// (their fitness still exists; they just cannot win).
pub fn fitness_maximizers(
    h: &HeightField,
    s_min: u32,
    s_max: u32,
    include_edges: bool,
) -> Result<(Dyadic, Vec<(u32, usize, i8)>), ScaleError> {
    if s_min > s_max || s_max >= h.n_exp() {
        return Err(ScaleError::BadScaleRange {
            s_min,
            s_max,
            n_exp: h.n_exp(),
        });
    }
    let mut best = Dyadic::zero();
    let mut ties: Vec<(u32, usize, i8)> = Vec::new();

    // Hierarchical halving: block sums at scale s from scale s-1.
    let mut sums: Vec<i64> = coarsen(h, s_min)?.sums;
    let mut scale = s_min;
    loop {
        let last = sums.len() - 1;
        let range = if include_edges { 0..=last } else { 1..=last - 1 };
        for p in range {
            let (num, exp) = signed_deviation(&sums, scale, p);
            let r = Dyadic::new(num.abs(), exp);
            if r.is_zero() {
                continue;
            }
            match r.cmp(&best) {
                std::cmp::Ordering::Greater => {
                    best = r;
                    ties.clear();
                    ties.push((scale, p, num.signum() as i8));
                }
                std::cmp::Ordering::Equal => ties.push((scale, p, num.signum() as i8)),
                std::cmp::Ordering::Less => {}
            }
        }
        if scale == s_max {
            break;
        }
        sums = sums.chunks_exact(2).map(|c| c[0] + c[1]).collect();
        scale += 1;
    }
    Ok((best, ties))
}

/// Finds the scale in `s_min..=s_max` and block position maximizing the
/// fitting measure. Exact ties are broken uniformly at random; a draw is
/// consumed from `rng` only when there is more than one maximizer.
pub fn argmax_fitness(
    h: &HeightField,
    s_min: u32,
    s_max: u32,
    include_edges: bool,
    rng: &mut impl Rng,
) -> Result<MoveSite, ScaleError> {
    let (best, ties) = fitness_maximizers(h, s_min, s_max, include_edges)?;
    if ties.is_empty() {
        return Ok(MoveSite {
            scale_exp: s_min,
            position: 0,
            sign: 0,
            max_value: Dyadic::zero(),
        });
    }
    let (scale_exp, position, sign) = if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.random_range(0..ties.len())]
    };
    Ok(MoveSite {
        scale_exp,
        position,
        sign,
        max_value: best,
    })
}
