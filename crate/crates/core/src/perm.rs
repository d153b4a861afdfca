//! Permutations of `{0..n-1}` acting from the left.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A bijection of `{0..n-1}`, stored by its image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermutationError {
    #[error("image {image} at position {position} is out of range for degree {degree}")]
    OutOfRange {
        position: usize,
        image: usize,
        degree: usize,
    },
    #[error("image {image} appears twice (second time at position {position})")]
    Repeated { position: usize, image: usize },
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images<I: IntoIterator<Item = usize>>(images: I) -> Result<Self, PermutationError> {
        let images: Vec<u32> = images.into_iter().map(|x| x as u32).collect();
        let n = images.len();
        let mut seen = vec![false; n];
        for (position, &image) in images.iter().enumerate() {
            let image = image as usize;
            if image >= n {
                return Err(PermutationError::OutOfRange {
                    position,
                    image,
                    degree: n,
                });
            }
            if std::mem::replace(&mut seen[image], true) {
                return Err(PermutationError::Repeated { position, image });
            }
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees bijectivity.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(images.iter().map(|&x| x as usize)).is_ok());
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: other
                .images
                .iter()
                .map(|&y| self.images[y as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    /// Cycle lengths sorted ascending, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.degree()];
        let mut lens = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }

    /// Length of the cycle through `x`.
    pub fn cycle_length_of(&self, x: usize) -> usize {
        let mut len = 1;
        let mut y = self.apply(x);
        while y != x {
            y = self.apply(y);
            len += 1;
        }
        len
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, l| crate::modular::lcm(acc, l as u64))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({:?})", self.images)
    }
}
