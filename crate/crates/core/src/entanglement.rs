//! Bipartite entanglement diagnostics. Entropies are in bits.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_spectrum, partial_trace, DensityMatrix, FactorShape, Operator, StateVector, C64};

/// Second Schmidt coefficient at or below this means a product state.
pub const SEPARABLE_TOL: f64 = 1e-10;
/// Negativity above this certifies entanglement.
pub const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtData {
    /// Descending, nonnegative.
    pub coefficients: Vec<f64>,
    pub left: Vec<StateVector>,
    pub right: Vec<StateVector>,
}

impl SchmidtData {
    /// `Σ_k λ_k u_k ⊗ v_k`
    pub fn reconstruct(&self) -> Vec<C64> {
        let dim = self.left[0].dim() * self.right[0].dim();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for ((c, u), v) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (o, z) in out.iter_mut().zip(u.kron(v).amplitudes()) {
                *o += z * *c;
            }
        }
        out
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// Entropy of either marginal, `−Σ λ_k² log₂ λ_k²`.
    pub fn entanglement_entropy(&self) -> f64 {
        entropy_of(self.coefficients.iter().map(|c| c * c))
    }
}

fn check_split(dim: usize, d_left: usize, d_right: usize) -> Result<()> {
    if d_left * d_right != dim {
        return Err(Error::DimensionMismatch {
            context: "bipartition",
            expected: d_left * d_right,
            found: dim,
        });
    }
    Ok(())
}

/// Schmidt decomposition via the SVD of the `d_left × d_right` coefficient
/// matrix.
pub fn schmidt(psi: &StateVector, d_left: usize, d_right: usize) -> Result<SchmidtData> {
    check_split(psi.dim(), d_left, d_right)?;
    let amps = psi.amplitudes();
    let m = DMatrix::from_fn(d_left, d_right, |i, j| amps[i * d_right + j]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V†");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut coefficients = Vec::with_capacity(order.len());
    let mut left = Vec::with_capacity(order.len());
    let mut right = Vec::with_capacity(order.len());
    for k in order {
        coefficients.push(svd.singular_values[k]);
        left.push(StateVector::new(u.column(k).iter().copied().collect())?);
        // ψ_ij = Σ_k s_k U_ik (V†)_kj, so the right factor is row k of V†.
        right.push(StateVector::new(v_t.row(k).iter().copied().collect())?);
    }
    Ok(SchmidtData {
        coefficients,
        left,
        right,
    })
}

pub fn is_separable_pure(psi: &StateVector, d_left: usize, d_right: usize) -> Result<bool> {
    let data = schmidt(psi, d_left, d_right)?;
    Ok(data.coefficients.get(1).is_none_or(|&c| c <= SEPARABLE_TOL))
}

fn entropy_of(probabilities: impl Iterator<Item = f64>) -> f64 {
    let s: f64 = probabilities.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum();
    s.max(0.0)
}

/// `−Σ λ log₂ λ`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(rho.spectrum().into_iter())
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Transpose on the right factor: `ρ^{T_B}[(i,j),(k,l)] = ρ[(i,l),(k,j)]`.
pub fn partial_transpose(rho: &Operator, d_left: usize, d_right: usize) -> Result<Operator> {
    check_split(rho.ensure_square()?, d_left, d_right)?;
    Ok(Operator::from_fn(rho.rows(), rho.cols(), |r, c| {
        let (i, j) = (r / d_right, r % d_right);
        let (k, l) = (c / d_right, c % d_right);
        rho.get(i * d_right + l, k * d_right + j)
    }))
}

/// Transpose on the left factor.
pub fn partial_transpose_left(rho: &Operator, d_left: usize, d_right: usize) -> Result<Operator> {
    check_split(rho.ensure_square()?, d_left, d_right)?;
    Ok(Operator::from_fn(rho.rows(), rho.cols(), |r, c| {
        let (i, j) = (r / d_right, r % d_right);
        let (k, l) = (c / d_right, c % d_right);
        rho.get(k * d_right + j, i * d_right + l)
    }))
}

/// Sum of `|λ|` over negative eigenvalues of the partial transpose.
pub fn negativity(rho: &DensityMatrix, d_left: usize, d_right: usize) -> Result<f64> {
    let pt = partial_transpose(rho.as_operator(), d_left, d_right)?;
    Ok(hermitian_spectrum(&pt)?
        .into_iter()
        .filter(|&x| x < 0.0)
        .fold(0.0, |acc, x| acc - x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PptVerdict {
    /// Negative partial transpose.
    Entangled,
    /// PPT in 2⊗2 or 2⊗3, where PPT is equivalent to separability.
    Separable,
    /// PPT in larger dimensions.
    PptInconclusive,
}

impl std::fmt::Display for PptVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PptVerdict::Entangled => "entangled",
            PptVerdict::Separable => "separable",
            PptVerdict::PptInconclusive => "ppt_inconclusive",
        })
    }
}

pub fn ppt_verdict(rho: &DensityMatrix, d_left: usize, d_right: usize) -> Result<PptVerdict> {
    let neg = negativity(rho, d_left, d_right)?;
    Ok(if neg > NEGATIVITY_TOL {
        PptVerdict::Entangled
    } else if d_left * d_right <= 6 {
        PptVerdict::Separable
    } else {
        PptVerdict::PptInconclusive
    })
}

/// Reduced state of the left factor.
pub fn left_marginal(rho: &DensityMatrix, d_left: usize, d_right: usize) -> Result<DensityMatrix> {
    check_split(rho.dim(), d_left, d_right)?;
    let shape = FactorShape::new(vec![d_left, d_right])?;
    let m = partial_trace(rho.as_operator(), &shape, &[0])?;
    DensityMatrix::new(m.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kron;

    fn sv(v: &[f64]) -> StateVector {
        StateVector::from_real(v).unwrap()
    }

    #[test]
    fn schmidt_examples() {
        let prod = sv(&[0.6, 0.8]).kron(&sv(&[0.0, 1.0]));
        let data = schmidt(&prod, 2, 2).unwrap();
        assert!((data.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(data.coefficients[1].abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = sv(&[h, 0.0, 0.0, h]);
        let data = schmidt(&bell, 2, 2).unwrap();
        assert!(data.coefficients.iter().all(|c| (c - h).abs() < 1e-14));
        assert!(schmidt(&bell, 3, 2).is_err());
    }

    #[test]
    fn schmidt_rectangular_reconstruction() {
        let psi = StateVector::normalized((0..6).map(|k| C64::new(k as f64 - 2.5, (k * k) as f64 * 0.1)).collect())
            .unwrap()
            .0;
        let data = schmidt(&psi, 2, 3).unwrap();
        let back = StateVector::new(data.reconstruct()).unwrap();
        assert!(back.distance(&psi) < 1e-12);
        assert_eq!(data.coefficients.len(), 2);
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&DensityMatrix::from_pure(&sv(&[0.6, 0.8])).unwrap()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - 1.0).abs() < 1e-14);
        let rho = DensityMatrix::new(Operator::real_diag(&[0.75, 0.25])).unwrap();
        // −(3/4)log₂(3/4) − (1/4)log₂(1/4)
        assert!((von_neumann_entropy(&rho) - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn negativity_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = DensityMatrix::from_pure(&sv(&[0.0, h, -h, 0.0])).unwrap();
        assert!((negativity(&singlet, 2, 2).unwrap() - 0.5).abs() < 1e-12);
        let product = DensityMatrix::new(kron(
            &Operator::real_diag(&[0.3, 0.7]),
            &Operator::real_diag(&[1.0, 0.0]),
        ))
        .unwrap();
        assert!(negativity(&product, 2, 2).unwrap() < 1e-15);
        let classical = DensityMatrix::new(Operator::real_diag(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert_eq!(negativity(&classical, 2, 2).unwrap(), 0.0);
        assert_eq!(ppt_verdict(&classical, 2, 2).unwrap(), PptVerdict::Separable);
        assert_eq!(ppt_verdict(&singlet, 2, 2).unwrap(), PptVerdict::Entangled);
        let big = DensityMatrix::maximally_mixed(9);
        assert_eq!(ppt_verdict(&big, 3, 3).unwrap(), PptVerdict::PptInconclusive);
    }

    #[test]
    fn separability_of_pure_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(is_separable_pure(&sv(&[1.0, 0.0]).kron(&sv(&[h, h])), 2, 2).unwrap());
        assert!(!is_separable_pure(&sv(&[h, 0.0, 0.0, h]), 2, 2).unwrap());
    }

    #[test]
    fn singlet_partial_transpose_by_hand() {
        // |ψ⁻⟩⟨ψ⁻| = ½(|01⟩⟨01| + |10⟩⟨10| − |01⟩⟨10| − |10⟩⟨01|);
        // transposing B maps |01⟩⟨10| to |00⟩⟨11|.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = sv(&[0.0, h, -h, 0.0]).projector();
        let pt = partial_transpose(&rho, 2, 2).unwrap();
        let want = Operator::from_real_rows(&[
            &[0.0, 0.0, 0.0, -0.5],
            &[0.0, 0.5, 0.0, 0.0],
            &[0.0, 0.0, 0.5, 0.0],
            &[-0.5, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(pt.approx_eq(&want, 1e-15));
    }
}
