//! Dimensions of the `n`-particle space `(l ⊗ h)^⊗n`.

use crate::error::{Error, Result};
use crate::symmetry::check_particle_count;
use crate::tensor::FactorShape;

/// `d_l` spatial modes, `d_h = 2s + 1` spin levels, `n` particles.
///
/// One-particle basis index: `x * d_h + s`. The `n`-particle index has
/// particle 1 as the slowest digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    pub d_l: usize,
    pub d_h: usize,
    pub n: usize,
}

impl SpaceSpec {
    pub fn new(d_l: usize, d_h: usize, n: usize) -> Result<Self> {
        if d_l == 0 || d_h == 0 {
            return Err(Error::InvalidShape(format!("d_l = {d_l}, d_h = {d_h}")));
        }
        check_particle_count(n)?;
        Ok(SpaceSpec { d_l, d_h, n })
    }

    pub fn one_particle_dim(&self) -> usize {
        self.d_l * self.d_h
    }

    pub fn total_dim(&self) -> usize {
        self.one_particle_dim().pow(self.n as u32)
    }

    pub fn spin_dim(&self) -> usize {
        self.d_h.pow(self.n as u32)
    }

    pub fn spatial_dim(&self) -> usize {
        self.d_l.pow(self.n as u32)
    }

    /// `[d_l, d_h, d_l, d_h, …]`
    pub fn interleaved_shape(&self) -> FactorShape {
        FactorShape::new([self.d_l, self.d_h].repeat(self.n)).expect("nonzero dims")
    }

    /// `[d_l; n] ++ [d_h; n]`
    pub fn grouped_shape(&self) -> FactorShape {
        let mut dims = vec![self.d_l; self.n];
        dims.extend(std::iter::repeat_n(self.d_h, self.n));
        FactorShape::new(dims).expect("nonzero dims")
    }

    /// Factor permutation taking the grouped order `(l^⊗n) ⊗ (h^⊗n)` to the
    /// interleaved order `(l ⊗ h)^⊗n`.
    pub fn grouped_to_interleaved(&self) -> Vec<usize> {
        (0..self.n)
            .map(|k| 2 * k)
            .chain((0..self.n).map(|k| 2 * k + 1))
            .collect()
    }

    pub fn spatial_factors(&self) -> Vec<usize> {
        (0..self.n).map(|k| 2 * k).collect()
    }

    pub fn spin_factors(&self) -> Vec<usize> {
        (0..self.n).map(|k| 2 * k + 1).collect()
    }

    pub fn check_dim(&self, context: &'static str, found: usize) -> Result<()> {
        if found == self.total_dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected: self.total_dim(),
                found,
            })
        }
    }
}
