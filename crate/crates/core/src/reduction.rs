//! Reduced spin states.
//!
//! The spin state seen by `n` detectors in regions `Ω_1, …, Ω_n` is defined
//! implicitly by
//!
//! ```text
//! tr(ρ_spin A_1⊗…⊗A_n) = tr{ρ dΓ((P_1⊗A_1)⊗…⊗(P_n⊗A_n))}   for all A_k.
//! ```
//!
//! Probing with matrix units `A_k = E_{i_k j_k}` determines every entry:
//! `⟨j|ρ_spin|i⟩ = tr{ρ dΓ(⊗_k P_k⊗E_{i_k j_k})}`. [`reduced_spin_probe`]
//! evaluates the whole probe sweep at once; [`probe_expectation`] evaluates
//! the defining functional literally for arbitrary spin observables.

use crate::error::{Error, Result};
use crate::second_quantization::dgamma_product;
use crate::space::SpaceSpec;
use crate::spatial::{projector, SpatialRegion, SpatialSpace};
use crate::states::SuperpositionTerm;
use crate::symmetry::{enumerate_sn, symmetrizer, Parity, SymmetryClass};
use crate::tensor::{
    hermitian_spectrum, kron, partial_trace, permute_operator, DensityMatrix, FactorShape, Operator, StateVector, C64,
    ZERO,
};

/// Tolerance used by [`classify_symmetry`].
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Reduced matrices with trace at or below this have no normalized form.
pub const TRACE_FLOOR: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Un-normalized probe-extracted spin matrix with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct RawReduced {
    pub matrix: Operator,
    /// Joint localization probability.
    pub trace: f64,
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl RawReduced {
    fn from_matrix(matrix: Operator) -> Result<Self> {
        let trace = matrix.trace().re;
        let hermiticity_defect = matrix.hermiticity_defect();
        let min_eigenvalue = hermitian_spectrum(&matrix.hermitian_part())?[0];
        Ok(RawReduced {
            matrix,
            trace,
            hermiticity_defect,
            min_eigenvalue,
        })
    }

    /// `matrix / trace` as a density matrix, when the trace is above
    /// [`TRACE_FLOOR`] and the matrix is positive within tolerance.
    pub fn normalized(&self) -> Option<DensityMatrix> {
        if self.trace <= TRACE_FLOOR || self.min_eigenvalue < -POSITIVITY_TOL {
            return None;
        }
        DensityMatrix::new(self.matrix.hermitian_part().scale_real(1.0 / self.trace)).ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport {
    pub raw: RawReduced,
    pub normalized: Option<DensityMatrix>,
    pub symmetry_class: SymmetryClass,
    pub valid_state: bool,
}

fn check_regions(space: &SpaceSpec, regions: &[SpatialRegion]) -> Result<SpatialSpace> {
    if regions.len() != space.n {
        return Err(Error::DimensionMismatch {
            context: "number of probe regions",
            expected: space.n,
            found: regions.len(),
        });
    }
    let spatial = SpatialSpace::new(space.d_l)?;
    for r in regions {
        if r.max_mode() >= space.d_l {
            return Err(Error::OutOfRange {
                context: "probe region mode",
                index: r.max_mode(),
                limit: space.d_l,
            });
        }
    }
    Ok(spatial)
}

/// Extracts the un-normalized spin matrix of `rho` probed in `regions`
/// (one region per particle slot).
///
/// For each slot ordering `π` of the lift, the matrix-unit probes read off the
/// entries of `M_π = Σ_x ρ[(x, ·), (x, ·)]` restricted to spatial indices with
/// `x_k ∈ Ω_{π(k)}`, with spin factors returned to region order.
pub fn reduced_spin_probe(rho: &DensityMatrix, space: &SpaceSpec, regions: &[SpatialRegion]) -> Result<RawReduced> {
    space.check_dim("reduced_spin_probe state", rho.dim())?;
    check_regions(space, regions)?;
    let n = space.n;
    let spatial_shape = FactorShape::uniform(space.d_l, n)?;
    let spin_shape = FactorShape::uniform(space.d_h, n)?;
    let full_shape = space.interleaved_shape();

    // Interleaved offsets of every spatial and every spin multi-index.
    let spatial_offsets: Vec<usize> = (0..space.spatial_dim())
        .map(|x| {
            let mut digits = vec![0; 2 * n];
            for (k, xk) in spatial_shape.digits(x).into_iter().enumerate() {
                digits[2 * k] = xk;
            }
            full_shape.index(&digits)
        })
        .collect();
    let spin_offsets: Vec<usize> = (0..space.spin_dim())
        .map(|s| {
            let mut digits = vec![0; 2 * n];
            for (k, sk) in spin_shape.digits(s).into_iter().enumerate() {
                digits[2 * k + 1] = sk;
            }
            full_shape.index(&digits)
        })
        .collect();

    let rho = rho.as_operator();
    let spin_dim = space.spin_dim();
    let mut total = Operator::zeros(spin_dim, spin_dim);
    for p in enumerate_sn(n)? {
        let allowed: Vec<usize> = (0..space.spatial_dim())
            .filter(|&x| {
                spatial_shape
                    .digits(x)
                    .iter()
                    .enumerate()
                    .all(|(k, &xk)| regions[p.apply(k)].contains(xk))
            })
            .map(|x| spatial_offsets[x])
            .collect();
        if allowed.is_empty() {
            continue;
        }
        let block = Operator::from_fn(spin_dim, spin_dim, |s, t| {
            let (so, to) = (spin_offsets[s], spin_offsets[t]);
            allowed.iter().map(|&xo| rho.get(xo + so, xo + to)).sum()
        });
        total = &total + &permute_operator(&block, &spin_shape, p.as_slice())?;
    }
    RawReduced::from_matrix(total)
}

/// `tr{ρ dΓ((P_1⊗A_1)⊗…⊗(P_n⊗A_n))}` evaluated from the lifted matrix.
pub fn probe_expectation(
    rho: &DensityMatrix,
    space: &SpaceSpec,
    regions: &[SpatialRegion],
    spin_ops: &[Operator],
) -> Result<C64> {
    space.check_dim("probe_expectation state", rho.dim())?;
    let spatial = check_regions(space, regions)?;
    if spin_ops.len() != space.n {
        return Err(Error::DimensionMismatch {
            context: "number of spin observables",
            expected: space.n,
            found: spin_ops.len(),
        });
    }
    let mut slots = Vec::with_capacity(space.n);
    for (r, a) in regions.iter().zip(spin_ops) {
        let d = a.ensure_square()?;
        if d != space.d_h {
            return Err(Error::DimensionMismatch {
                context: "spin observable",
                expected: space.d_h,
                found: d,
            });
        }
        slots.push(kron(&projector(r, &spatial)?, a));
    }
    let lifted = dgamma_product(&slots)?.matrix;
    Ok(trace_of_product(rho.as_operator(), &lifted))
}

/// `tr(AB)` without forming the product.
pub fn trace_of_product(a: &Operator, b: &Operator) -> C64 {
    let n = a.rows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..a.cols() {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// `(1/N) Σ_ij w_i w̄_j ⟨f_j|f_i⟩⟨g_j|g_i⟩ |ξ_i⟩⟨ξ_j| ⊗ |η_i⟩⟨η_j|`
///
/// The reduced spin matrix of `(1/√(2N)) Σ_i w_i[(f_i⊗ξ_i)⊗(g_i⊗η_i) ± …]`
/// when every `f_i` lies in the first region and every `g_i` in a disjoint
/// second region. The state is not normalized, so the trace is the squared
/// norm of that prefactored sum.
pub fn reduced_spin_closed_form(terms: &[SuperpositionTerm]) -> Result<Operator> {
    let first = terms.first().ok_or(Error::Empty("superposition terms"))?;
    let d_h = first.first.d_h();
    let big_n = terms.len() as f64;
    let mut out = Operator::zeros(d_h * d_h, d_h * d_h);
    for ti in terms {
        for tj in terms {
            let gram = crate::spatial::overlap(&tj.first.f, &ti.first.f)?
                * crate::spatial::overlap(&tj.second.f, &ti.second.f)?;
            let coeff = ti.weight * tj.weight.conj() * gram / big_n;
            if coeff == ZERO {
                continue;
            }
            let left = Operator::outer(ti.first.xi.amplitudes(), tj.first.xi.amplitudes());
            let right = Operator::outer(ti.second.xi.amplitudes(), tj.second.xi.amplitudes());
            out = &out + &kron(&left, &right).scale(coeff);
        }
    }
    Ok(out)
}

/// Ordinary partial trace over all spatial factors of the interleaved space.
pub fn trace_out_spatial(rho: &Operator, space: &SpaceSpec) -> Result<Operator> {
    space.check_dim("trace_out_spatial operand", rho.rows())?;
    partial_trace(rho, &space.interleaved_shape(), &space.spin_factors())
}

/// `(‖Π₋ρΠ₋ − ρ‖_F, ‖Π₊ρΠ₊ − ρ‖_F)` on the spin space.
pub fn symmetry_defects(rho_spin: &Operator, n: usize, d_h: usize) -> Result<(f64, f64)> {
    let dim = rho_spin.ensure_square()?;
    let expected = d_h.pow(n as u32);
    if dim != expected {
        return Err(Error::DimensionMismatch {
            context: "classify_symmetry operand",
            expected,
            found: dim,
        });
    }
    let defect = |parity| -> Result<f64> {
        let pi = symmetrizer(n, d_h, parity)?;
        Ok((&(&pi * rho_spin) * &pi).distance(rho_spin))
    };
    Ok((defect(Parity::Fermi)?, defect(Parity::Bose)?))
}

pub fn classify_symmetry(rho_spin: &Operator, n: usize, d_h: usize) -> Result<SymmetryClass> {
    let (anti, sym) = symmetry_defects(rho_spin, n, d_h)?;
    Ok(if anti <= SYMMETRY_TOL {
        SymmetryClass::Antisymmetric
    } else if sym <= SYMMETRY_TOL {
        SymmetryClass::Symmetric
    } else {
        SymmetryClass::None
    })
}

/// Probe reduction plus normalization and symmetry classification.
pub fn reduce(rho: &DensityMatrix, space: &SpaceSpec, regions: &[SpatialRegion]) -> Result<ReductionReport> {
    let raw = reduced_spin_probe(rho, space, regions)?;
    let normalized = raw.normalized();
    let symmetry_class = classify_symmetry(&raw.matrix, space.n, space.d_h)?;
    Ok(ReductionReport {
        valid_state: normalized.is_some(),
        raw,
        normalized,
        symmetry_class,
    })
}

/// `⟨ψ|dΓ((P⊗A)⊗(Q⊗I))|ψ⟩` for a two-particle state.
pub fn cluster_expectation(
    psi: &StateVector,
    space: &SpaceSpec,
    region_p: &SpatialRegion,
    a: &Operator,
    region_q: &SpatialRegion,
) -> Result<C64> {
    if space.n != 2 {
        return Err(Error::DimensionMismatch {
            context: "cluster expectation particle count",
            expected: 2,
            found: space.n,
        });
    }
    space.check_dim("cluster expectation state", psi.dim())?;
    if a.ensure_square()? != space.d_h {
        return Err(Error::DimensionMismatch {
            context: "cluster expectation observable",
            expected: space.d_h,
            found: a.rows(),
        });
    }
    let spatial = check_regions(space, &[region_p.clone(), region_q.clone()])?;
    let first = kron(&projector(region_p, &spatial)?, a);
    let second = kron(&projector(region_q, &spatial)?, &Operator::identity(space.d_h));
    let lifted = dgamma_product(&[first, second])?.matrix;
    Ok(psi.expectation(&lifted))
}
