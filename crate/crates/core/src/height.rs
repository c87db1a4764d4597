//! Integer height fields at the finest scale.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeightError {
    #[error("height field length {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

/// Signed integer heights, one per column, with power-of-two length.
///
/// For the gripper dynamics this holds the relative difference
/// `GRIPPER - TARGET` in whole particle units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeightField {
    heights: Vec<i64>,
}

impl HeightField {
    pub fn new(heights: Vec<i64>) -> Result<Self, HeightError> {
        if !heights.len().is_power_of_two() {
            return Err(HeightError::NotPowerOfTwo(heights.len()));
        }
        Ok(Self { heights })
    }

    /// All-zero field of length `2^n_exp`.
    pub fn flat(n_exp: u32) -> Self {
        Self {
            heights: vec![0; 1usize << n_exp],
        }
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length is a positive power of two by construction
    }

    /// Exponent of the length: `len() == 2^n_exp()`.
    pub fn n_exp(&self) -> u32 {
        self.heights.len().trailing_zeros()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.heights
    }

    pub fn as_mut_slice(&mut self) -> &mut [i64] {
        &mut self.heights
    }

    pub fn sum(&self) -> i64 {
        self.heights.iter().sum()
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.heights
    }
}

impl std::ops::Index<usize> for HeightField {
    type Output = i64;

    fn index(&self, i: usize) -> &i64 {
        &self.heights[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(
            HeightField::new(vec![1, 2, 3]),
            Err(HeightError::NotPowerOfTwo(3))
        );
        assert_eq!(HeightField::new(vec![]), Err(HeightError::NotPowerOfTwo(0)));
    }

    #[test]
    fn flat_field() {
        let h = HeightField::flat(3);
        assert_eq!(h.len(), 8);
        assert_eq!(h.n_exp(), 3);
        assert_eq!(h.sum(), 0);
    }
}
