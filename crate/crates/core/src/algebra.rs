//! Commutation of the lifted local spin subalgebras
//!
//! ```text
//! A_1 = { dΓ((P⊗a)⊗(Q⊗I)) },   A_2 = { dΓ((P⊗I)⊗(Q⊗b)) }
//! ```
//!
//! on the two-particle space `(l⊗h)^⊗2`. They commute for every `a`, `b`
//! exactly when `PQ = 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::second_quantization::dgamma_product;
use crate::symmetry::{symmetrizer, Parity};
use crate::tensor::{kron, kron_all, Operator, C64, ONE};

pub const COMMUTE_TOL: f64 = 1e-10;
pub const PROJECTION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Spin observable attached to the `P` slot.
    First,
    /// Spin observable attached to the `Q` slot.
    Second,
}

/// Element of the generalized Gell-Mann basis of Hermitian `d × d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub label: String,
    pub matrix: Operator,
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `d²` Hermitian matrices spanning all `d × d` matrices: the identity
/// `I`, then `Xjk`, `Yjk` for each pair `j < k`, then diagonal `Zl`.
/// For `d = 2` these are `I, σx, σy, σz`.
pub fn hermitian_basis(d: usize) -> Vec<BasisElement> {
    let mut out = vec![BasisElement {
        label: "I".into(),
        matrix: Operator::identity(d),
    }];
    for j in 0..d {
        for k in j + 1..d {
            let mut x = Operator::zeros(d, d);
            x.set(j, k, ONE);
            x.set(k, j, ONE);
            out.push(BasisElement {
                label: format!("X{j}{k}"),
                matrix: x,
            });
            let mut y = Operator::zeros(d, d);
            y.set(j, k, C64::new(0.0, -1.0));
            y.set(k, j, C64::new(0.0, 1.0));
            out.push(BasisElement {
                label: format!("Y{j}{k}"),
                matrix: y,
            });
        }
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|m| match m.cmp(&l) {
                std::cmp::Ordering::Less => scale,
                std::cmp::Ordering::Equal => -(l as f64) * scale,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push(BasisElement {
            label: format!("Z{l}"),
            matrix: Operator::real_diag(&diag),
        });
    }
    out
}

fn check_pair(p: &Operator, q: &Operator) -> Result<usize> {
    let d_l = p.ensure_square()?;
    if q.ensure_square()? != d_l {
        return Err(Error::DimensionMismatch {
            context: "spatial projections",
            expected: d_l,
            found: q.rows(),
        });
    }
    Ok(d_l)
}

/// Side 1: `dΓ((P⊗a)⊗(Q⊗I))`. Side 2: `dΓ((P⊗I)⊗(Q⊗a))`.
pub fn local_generator(side: Side, a: &Operator, p: &Operator, q: &Operator) -> Result<Operator> {
    check_pair(p, q)?;
    let d_h = a.ensure_square()?;
    let id = Operator::identity(d_h);
    let slots = match side {
        Side::First => [kron(p, a), kron(q, &id)],
        Side::Second => [kron(p, &id), kron(q, a)],
    };
    Ok(dgamma_product(&slots)?.matrix)
}

/// The four-term closed form of the commutator of the two generators:
///
/// `QP⊗I⊗PQ⊗ab − PQ⊗I⊗QP⊗ba + PQ⊗ab⊗QP⊗I − QP⊗ba⊗PQ⊗I`
pub fn four_term_commutator(a: &Operator, b: &Operator, p: &Operator, q: &Operator) -> Result<Operator> {
    check_pair(p, q)?;
    let d_h = a.ensure_square()?;
    if b.ensure_square()? != d_h {
        return Err(Error::DimensionMismatch {
            context: "spin observables",
            expected: d_h,
            found: b.rows(),
        });
    }
    let id = Operator::identity(d_h);
    let (pq, qp) = (p * q, q * p);
    let (ab, ba) = (a * b, b * a);
    let t1 = kron_all([&qp, &id, &pq, &ab]);
    let t2 = kron_all([&pq, &id, &qp, &ba]);
    let t3 = kron_all([&pq, &ab, &qp, &id]);
    let t4 = kron_all([&qp, &ba, &pq, &id]);
    Ok(&(&(&t1 - &t2) + &t3) - &t4)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BipartitionVerdict {
    pub commutes: bool,
    /// Max over basis pairs of `‖[A_1(a), A_2(b)]‖_F` on the full tensor space.
    pub max_commutator_norm: f64,
    /// Basis labels `(a, b)` attaining the max; `None` when everything commutes.
    pub witness: Option<(String, String)>,
    /// Max of `‖Π₋[A_1(a), A_2(b)]Π₋‖_F`, the commutator compressed to the
    /// antisymmetric subspace.
    pub max_compressed_norm: f64,
    pub compressed_witness: Option<(String, String)>,
}

fn check_projection(m: &Operator) -> Result<()> {
    let defect = m.projection_defect();
    if defect > PROJECTION_TOL {
        return Err(Error::NotAProjection { defect });
    }
    Ok(())
}

/// Sweeps `a` and `b` over [`hermitian_basis`] and reports the largest
/// commutator. The first pair attaining a strictly larger norm wins ties.
pub fn bipartition_check(p: &Operator, q: &Operator, d_h: usize) -> Result<BipartitionVerdict> {
    let d_l = check_pair(p, q)?;
    check_projection(p)?;
    check_projection(q)?;
    let basis = hermitian_basis(d_h);
    let first: Vec<Operator> = basis
        .iter()
        .map(|e| local_generator(Side::First, &e.matrix, p, q))
        .collect::<Result<_>>()?;
    let second: Vec<Operator> = basis
        .iter()
        .map(|e| local_generator(Side::Second, &e.matrix, p, q))
        .collect::<Result<_>>()?;
    let anti = symmetrizer(2, d_l * d_h, Parity::Fermi)?;

    let mut max_norm = 0.0;
    let mut witness = None;
    let mut max_compressed = 0.0;
    let mut compressed_witness = None;
    for (ea, ga) in basis.iter().zip(&first) {
        for (eb, gb) in basis.iter().zip(&second) {
            let comm = ga.commutator(gb);
            let norm = comm.frobenius_norm();
            if norm > max_norm {
                max_norm = norm;
                witness = Some((ea.label.clone(), eb.label.clone()));
            }
            let compressed = (&(&anti * &comm) * &anti).frobenius_norm();
            if compressed > max_compressed {
                max_compressed = compressed;
                compressed_witness = Some((ea.label.clone(), eb.label.clone()));
            }
        }
    }
    let commutes = max_norm <= COMMUTE_TOL;
    Ok(BipartitionVerdict {
        commutes,
        max_commutator_norm: max_norm,
        witness: if commutes { None } else { witness },
        max_compressed_norm: max_compressed,
        compressed_witness: if max_compressed <= COMMUTE_TOL {
            None
        } else {
            compressed_witness
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> Operator {
        Operator::real_diag(v)
    }

    #[test]
    fn qubit_basis_is_pauli() {
        let b = hermitian_basis(2);
        let labels: Vec<&str> = b.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["I", "X01", "Y01", "Z1"]);
        assert_eq!(
            b[1].matrix,
            Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
        );
        assert_eq!(
            b[2].matrix,
            Operator::from_rows(&[
                vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
                vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
            ])
            .unwrap()
        );
        assert_eq!(b[3].matrix, diag(&[1.0, -1.0]));
    }

    #[test]
    fn basis_is_hermitian_and_trace_orthogonal() {
        for d in 1..=4 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                assert_eq!(x.matrix.hermiticity_defect(), 0.0);
                for y in &b[i + 1..] {
                    assert!((&x.matrix * &y.matrix).trace().norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn generator_with_identity_is_spatial_projector() {
        let p = diag(&[1.0, 0.0]);
        let q = diag(&[0.0, 1.0]);
        let g = local_generator(Side::First, &Operator::identity(2), &p, &q).unwrap();
        let id = Operator::identity(2);
        let want = dgamma_product(&[kron(&p, &id), kron(&q, &id)]).unwrap().matrix;
        assert_eq!(g, want);
    }

    #[test]
    fn generator_term_by_term() {
        let p = diag(&[1.0, 0.0]);
        let q = diag(&[0.0, 1.0]);
        let sz = diag(&[1.0, -1.0]);
        let id = Operator::identity(2);
        let g = local_generator(Side::First, &sz, &p, &q).unwrap();
        let want = &kron_all([&p, &sz, &q, &id]) + &kron_all([&q, &id, &p, &sz]);
        assert_eq!((g.rows(), g.cols()), (16, 16));
        assert_eq!(g, want);
        // side 2 with the roles of P and Q exchanged is side 1
        let g2 = local_generator(Side::Second, &sz, &q, &p).unwrap();
        assert_eq!(g2, g);
    }

    #[test]
    fn disjoint_projections_commute() {
        let v = bipartition_check(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), 2).unwrap();
        assert!(v.commutes);
        assert!(v.max_commutator_norm <= 1e-12);
        assert!(v.witness.is_none());
    }

    #[test]
    fn equal_projections_do_not_commute() {
        let p = diag(&[1.0, 0.0]);
        let v = bipartition_check(&p, &p, 2).unwrap();
        assert!(!v.commutes);
        assert_eq!(v.witness, Some(("X01".to_string(), "Y01".to_string())));
        // P⊗I⊗P⊗[σx,σy] + P⊗[σx,σy]⊗P⊗I: two trace-orthogonal terms of norm √2·‖2iσz‖ = 4
        assert!((v.max_commutator_norm - 32f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trivial_spin_always_commutes() {
        let p = diag(&[1.0, 0.0]);
        let v = bipartition_check(&p, &p, 1).unwrap();
        assert!(v.commutes);
    }

    #[test]
    fn rejects_non_projection() {
        let bad = diag(&[0.5, 0.0]);
        assert!(matches!(
            bipartition_check(&bad, &diag(&[0.0, 1.0]), 2),
            Err(Error::NotAProjection { .. })
        ));
    }
}
