//! The second-quantization lift of one-particle operators and of `n`-fold
//! product operators, and the localized projector built from it.
//!
//! The one-particle lift is a plain sum over slots; the product lift is a
//! plain sum over all `n!` slot orderings. Neither carries a `1/n!` factor.

use crate::error::{Error, Result};
use crate::spatial::{projector, SpatialRegion, SpatialSpace};
use crate::symmetry::{check_particle_count, enumerate_sn};
use crate::tensor::{kron, kron_all, Operator};

#[derive(Clone, Debug, PartialEq)]
pub enum LiftBase {
    OneParticle(Operator),
    Product(Vec<Operator>),
}

/// An operator on `H^⊗n` obtained from the lift, together with its source.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedOperator {
    pub base: LiftBase,
    pub n: usize,
    pub matrix: Operator,
}

impl LiftedOperator {
    pub fn into_matrix(self) -> Operator {
        self.matrix
    }
}

/// `dΓ(A) = A⊗I⊗…⊗I + I⊗A⊗…⊗I + … + I⊗…⊗I⊗A`
pub fn dgamma_one(a: &Operator, n: usize) -> Result<LiftedOperator> {
    let d = a.ensure_square()?;
    check_particle_count(n)?;
    let id = Operator::identity(d);
    let mut total = Operator::zeros(d.pow(n as u32), d.pow(n as u32));
    for slot in 0..n {
        let factors: Vec<&Operator> = (0..n).map(|k| if k == slot { a } else { &id }).collect();
        total = &total + &kron_all(factors);
    }
    Ok(LiftedOperator {
        base: LiftBase::OneParticle(a.clone()),
        n,
        matrix: total,
    })
}

/// `dΓ(A_1⊗…⊗A_n) = Σ_{π∈S_n} A_{π(1)}⊗…⊗A_{π(n)}`, summed in lexicographic
/// order of `π`.
pub fn dgamma_product(ops: &[Operator]) -> Result<LiftedOperator> {
    let n = ops.len();
    check_particle_count(n)?;
    let d = ops[0].ensure_square()?;
    for op in ops {
        let dim = op.ensure_square()?;
        if dim != d {
            return Err(Error::DimensionMismatch {
                context: "dΓ product factors",
                expected: d,
                found: dim,
            });
        }
    }
    let dim = d.pow(n as u32);
    let mut total = Operator::zeros(dim, dim);
    for p in enumerate_sn(n)? {
        let term = kron_all(p.as_slice().iter().map(|&k| &ops[k]));
        total = &total + &term;
    }
    Ok(LiftedOperator {
        base: LiftBase::Product(ops.to_vec()),
        n,
        matrix: total,
    })
}

/// `Π_spatial = dΓ((P_1⊗I)⊗…⊗(P_n⊗I))`. A projection when the regions are
/// pairwise disjoint; overlapping regions are accepted.
pub fn spatial_projector(regions: &[SpatialRegion], space: &SpatialSpace, d_h: usize) -> Result<Operator> {
    if d_h == 0 {
        return Err(Error::InvalidShape("spin dimension 0".into()));
    }
    let id = Operator::identity(d_h);
    let factors = regions
        .iter()
        .map(|r| Ok(kron(&projector(r, space)?, &id)))
        .collect::<Result<Vec<_>>>()?;
    Ok(dgamma_product(&factors)?.matrix)
}
