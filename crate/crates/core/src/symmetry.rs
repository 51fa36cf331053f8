//! The symmetric group acting on tensor factors: permutation unitaries,
//! symmetrizers and the exchangeability test.

use std::fmt;

use crate::error::{Error, Result};
use crate::tensor::{conjugate_by_index_map, permutation_index_map, FactorShape, Operator, C64, ONE};

pub const MAX_PARTICLES: usize = 6;

/// Tolerance for [`is_exchangeable`].
pub const EXCHANGE_TOL: f64 = 1e-10;

/// A bijection on `{0, …, n−1}`; `mapping[k]` is the image of `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidPermutation(format!("{mapping:?} is not a bijection")));
            }
            seen[m] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    /// Transposition of `a` and `b` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.swap(a, b);
        Permutation { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, k: usize) -> usize {
        self.mapping[k]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            mapping: other.mapping.iter().map(|&k| self.mapping[k]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut mapping = vec![0; self.len()];
        for (k, &m) in self.mapping.iter().enumerate() {
            mapping[m] = k;
        }
        Permutation { mapping }
    }

    pub fn inversions(&self) -> usize {
        let m = &self.mapping;
        (0..m.len())
            .map(|i| (i + 1..m.len()).filter(|&j| m[i] > m[j]).count())
            .sum()
    }

    /// `(−1)^inversions`
    pub fn sign(&self) -> i32 {
        if self.inversions().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.mapping)
    }
}

/// Exchange statistics of the particles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Bose,
    Fermi,
}

impl Parity {
    /// The character `ε_π`: 1 for bosons, `sgn(π)` for fermions.
    pub fn character(self, p: &Permutation) -> f64 {
        match self {
            Parity::Bose => 1.0,
            Parity::Fermi => p.sign() as f64,
        }
    }

    /// `+` for bosons, `−` for fermions.
    pub fn exchange_sign(self) -> f64 {
        match self {
            Parity::Bose => 1.0,
            Parity::Fermi => -1.0,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Bose => "bose",
            Parity::Fermi => "fermi",
        })
    }
}

pub fn check_particle_count(n: usize) -> Result<()> {
    if (1..=MAX_PARTICLES).contains(&n) {
        Ok(())
    } else {
        Err(Error::ParticleCount(n))
    }
}

/// All `n!` permutations of `{0, …, n−1}` in lexicographic order.
pub fn enumerate_sn(n: usize) -> Result<Vec<Permutation>> {
    check_particle_count(n)?;
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![Permutation {
        mapping: current.clone(),
    }];
    // Standard next-permutation step.
    while let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) {
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(Permutation {
            mapping: current.clone(),
        });
    }
    Ok(out)
}

/// Basis index map of `W_π` on `(C^d)^⊗n`: `W_π e_i = e_{map[i]}`.
///
/// `(W_π Ψ)(i_1, …, i_n) = Ψ(i_{π(1)}, …, i_{π(n)})`, which moves tensor
/// factor `k` to position `π(k)`. With this action `W_π W_τ = W_{π∘τ}`.
pub fn perm_index_map(p: &Permutation, d: usize) -> Vec<usize> {
    let shape = FactorShape::uniform(d, p.len()).expect("d ≥ 1 and n ≥ 1");
    permutation_index_map(&shape, p.as_slice()).expect("valid permutation")
}

/// The permutation unitary `W_π` on `(C^d)^⊗n`.
pub fn perm_unitary(p: &Permutation, d: usize) -> Result<Operator> {
    if d == 0 {
        return Err(Error::InvalidShape("one-particle dimension 0".into()));
    }
    check_particle_count(p.len())?;
    let map = perm_index_map(p, d);
    let dim = map.len();
    let mut w = Operator::zeros(dim, dim);
    for (i, &m) in map.iter().enumerate() {
        w.set(m, i, ONE);
    }
    Ok(w)
}

/// `Π± = (1/n!) Σ_π ε_π W_π`.
pub fn symmetrizer(n: usize, d: usize, parity: Parity) -> Result<Operator> {
    if d == 0 {
        return Err(Error::InvalidShape("one-particle dimension 0".into()));
    }
    let perms = enumerate_sn(n)?;
    let dim = d.pow(n as u32);
    let norm = perms.len() as f64;
    let mut out = Operator::zeros(dim, dim);
    for p in &perms {
        let weight = C64::new(parity.character(p) / norm, 0.0);
        for (i, &m) in perm_index_map(p, d).iter().enumerate() {
            out.add_at(m, i, weight);
        }
    }
    Ok(out)
}

/// Outcome of the exchangeability test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exchangeability {
    pub exchangeable: bool,
    /// `max_π ‖W_π X W_π† − X‖_F`
    pub max_defect: f64,
}

/// Checks `X = W_π X W_π†` for every `π ∈ S_n`.
pub fn is_exchangeable(x: &Operator, n: usize, d: usize) -> Result<Exchangeability> {
    let dim = x.ensure_square()?;
    let expected = d.pow(n as u32);
    if dim != expected {
        return Err(Error::DimensionMismatch {
            context: "exchangeability operand",
            expected,
            found: dim,
        });
    }
    let mut max_defect: f64 = 0.0;
    for p in enumerate_sn(n)? {
        let conj = conjugate_by_index_map(x, &perm_index_map(&p, d));
        max_defect = max_defect.max(conj.distance(x));
    }
    Ok(Exchangeability {
        exchangeable: max_defect <= EXCHANGE_TOL,
        max_defect,
    })
}

/// `‖Π ψ − ψ‖` for the symmetrizer of the given parity.
pub fn symmetry_defect(amplitudes: &[C64], n: usize, d: usize, parity: Parity) -> Result<f64> {
    let pi = symmetrizer(n, d, parity)?;
    if amplitudes.len() != pi.rows() {
        return Err(Error::DimensionMismatch {
            context: "symmetry defect vector",
            expected: pi.rows(),
            found: amplitudes.len(),
        });
    }
    let projected = pi.apply(amplitudes);
    Ok(projected
        .iter()
        .zip(amplitudes)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Exchange symmetry of a vector or operator on `(C^d)^⊗n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    Antisymmetric,
    Symmetric,
    None,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::Antisymmetric => "antisymmetric",
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::None => "none",
        })
    }
}

/// Classifies a vector by which symmetrizer fixes it (antisymmetric checked
/// first). Returns the class with the `Π₋` and `Π₊` defects.
pub fn classify_vector(amplitudes: &[C64], n: usize, d: usize, tol: f64) -> Result<(SymmetryClass, f64, f64)> {
    let anti = symmetry_defect(amplitudes, n, d, Parity::Fermi)?;
    let sym = symmetry_defect(amplitudes, n, d, Parity::Bose)?;
    let class = if anti <= tol {
        SymmetryClass::Antisymmetric
    } else if sym <= tol {
        SymmetryClass::Symmetric
    } else {
        SymmetryClass::None
    };
    Ok((class, anti, sym))
}

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
