//! Inverse construction: for any two-spin target state, a globally
//! (anti)symmetric two-particle state whose spatially separated reduction
//! reproduces the target.

use crate::error::{Error, Result};
use crate::spatial::{mode_wavefunction, SpatialRegion, SpatialSpace};
use crate::states::{superposition_state, LocalizedFactor, SuperpositionTerm};
use crate::symmetry::Parity;
use crate::tensor::{hermitian_eigen, DensityMatrix, StateVector, C64};

/// Eigenvalues above this count towards the rank of the target.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingPlan {
    pub target: DensityMatrix,
    pub rank: usize,
    /// Spatial modes used in each region (one per eigenvector).
    pub modes_per_side: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub plan: EmbeddingPlan,
    pub state: StateVector,
}

fn spin_dim_of(dim: usize) -> Result<usize> {
    let d = (dim as f64).sqrt().round() as usize;
    if d == 0 || d * d != dim {
        return Err(Error::InvalidShape(format!(
            "target dimension {dim} is not d_h² for any d_h"
        )));
    }
    Ok(d)
}

fn check_regions(region1: &SpatialRegion, region2: &SpatialRegion) -> Result<()> {
    let shared = region1.shared_modes(region2);
    if shared.is_empty() {
        Ok(())
    } else {
        Err(Error::RegionConflict(shared))
    }
}

/// Terms `c_ij (f⊗e_i, g⊗e_j)` for the amplitudes `c_ij` of `phi`, scaled.
fn terms_for(
    phi: &[C64],
    d_h: usize,
    f_mode: usize,
    g_mode: usize,
    scale: f64,
    space: &SpatialSpace,
) -> Result<Vec<SuperpositionTerm>> {
    let f = mode_wavefunction(f_mode, space)?;
    let g = mode_wavefunction(g_mode, space)?;
    let mut terms = Vec::new();
    for i in 0..d_h {
        for j in 0..d_h {
            let c = phi[i * d_h + j];
            if c.norm() == 0.0 {
                continue;
            }
            terms.push(SuperpositionTerm::weighted(
                LocalizedFactor::new(f.clone(), StateVector::basis(d_h, i))?,
                LocalizedFactor::new(g.clone(), StateVector::basis(d_h, j))?,
                c * scale,
            ));
        }
    }
    Ok(terms)
}

/// `ψ = (1/√2) Σ_ij c_ij [(f⊗e_i)⊗(g⊗e_j) ± (g⊗e_j)⊗(f⊗e_i)]` with `f`, `g`
/// the lowest modes of the two regions.
pub fn embed_pure(
    phi: &StateVector,
    space: &SpatialSpace,
    region1: &SpatialRegion,
    region2: &SpatialRegion,
    parity: Parity,
) -> Result<StateVector> {
    check_regions(region1, region2)?;
    let d_h = spin_dim_of(phi.dim())?;
    let (phi, _) = StateVector::normalized(phi.amplitudes().to_vec())?;
    let terms = terms_for(phi.amplitudes(), d_h, region1.first(), region2.first(), 1.0, space)?;
    Ok(superposition_state(&terms, parity)?.state)
}

/// Embeds the spectral decomposition `σ = Σ_k p_k |Φ_k⟩⟨Φ_k|`: eigenvector
/// `k` is carried by the `k`-th mode of each region, weighted by `√p_k`.
pub fn embed_mixed(
    sigma: &DensityMatrix,
    space: &SpatialSpace,
    region1: &SpatialRegion,
    region2: &SpatialRegion,
    parity: Parity,
) -> Result<Embedding> {
    check_regions(region1, region2)?;
    let d_h = spin_dim_of(sigma.dim())?;
    let (values, vectors) = hermitian_eigen(sigma.as_operator())?;
    // Descending eigenvalues, so the dominant component uses the first modes.
    let components: Vec<(f64, &StateVector)> = values
        .iter()
        .zip(&vectors)
        .rev()
        .filter(|(p, _)| **p > RANK_CUTOFF)
        .map(|(&p, v)| (p, v))
        .collect();
    let rank = components.len();
    for region in [region1, region2] {
        if region.len() < rank {
            return Err(Error::InsufficientModes {
                needed: rank,
                available: region.len(),
            });
        }
    }
    let mut terms = Vec::new();
    for ((&f_mode, &g_mode), (p, phi)) in region1.modes().iter().zip(region2.modes()).zip(&components) {
        terms.extend(terms_for(phi.amplitudes(), d_h, f_mode, g_mode, p.sqrt(), space)?);
    }
    let state = superposition_state(&terms, parity)?.state;
    Ok(Embedding {
        plan: EmbeddingPlan {
            target: sigma.clone(),
            rank,
            modes_per_side: rank,
        },
        state,
    })
}
