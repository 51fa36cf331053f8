//! Random instances for tests and seeded scenarios. Entries are drawn
//! uniformly from the unit square `[-1, 1] + i[-1, 1]`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::spatial::{SpatialRegion, SpatialSpace, Wavefunction};
use crate::tensor::{inner, vec_norm, DensityMatrix, Operator, StateVector, C64, ZERO};

pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| complex(rng)).collect()
}

/// Normalized random state. Redraws in the (measure-zero) event of a
/// vanishing draw.
pub fn state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        if let Ok((s, _)) = StateVector::normalized(vector(rng, dim)) {
            return s;
        }
    }
}

pub fn operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    Operator::from_fn(dim, dim, |_, _| complex(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    operator(rng, dim).hermitian_part()
}

/// `G G† / tr(G G†)` for a `dim × rank` matrix `G`; rank `rank` almost surely.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = Operator::from_fn(dim, rank.max(1), |_, _| complex(rng));
    let m = &g * &g.dagger();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).expect("Wishart matrix is a state")
}

/// Gram-Schmidt orthonormalization of `vectors` against each other and
/// against `against`. Nearly dependent vectors are dropped.
pub fn orthonormalize(vectors: Vec<Vec<C64>>, against: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = against.to_vec();
    let start = basis.len();
    for mut v in vectors {
        // two passes keep the result orthogonal to machine precision
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis.split_off(start)
}

/// Orthogonal projection onto the span of `basis`, which must be orthonormal.
pub fn projection_onto(basis: &[Vec<C64>], dim: usize) -> Operator {
    let mut p = Operator::zeros(dim, dim);
    for b in basis {
        p = &p + &Operator::outer(b, b);
    }
    p
}

/// Projection onto a random `rank`-dimensional subspace.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Operator {
    let vs = (0..rank).map(|_| vector(rng, dim)).collect();
    projection_onto(&orthonormalize(vs, &[]), dim)
}

/// Two projections with `PQ = 0`, of ranks `rank_p` and `rank_q`.
pub fn orthogonal_projections<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank_p: usize,
    rank_q: usize,
) -> (Operator, Operator) {
    assert!(rank_p + rank_q <= dim, "ranks exceed dimension");
    let p_basis = orthonormalize((0..rank_p).map(|_| vector(rng, dim)).collect(), &[]);
    let q_basis = orthonormalize((0..rank_q).map(|_| vector(rng, dim)).collect(), &p_basis);
    (projection_onto(&p_basis, dim), projection_onto(&q_basis, dim))
}

/// Random wavefunction supported on `region`.
pub fn wavefunction<R: Rng + ?Sized>(rng: &mut R, region: &SpatialRegion, space: &SpatialSpace) -> Wavefunction {
    loop {
        let amps: Vec<C64> = (0..space.modes())
            .map(|m| if region.contains(m) { complex(rng) } else { ZERO })
            .collect();
        if let Ok(w) = Wavefunction::new(amps, Some(region.clone())) {
            return w;
        }
    }
}

/// Splits a random shuffle of the modes into `count` nonempty, pairwise
/// disjoint regions. Some modes may be left unused.
pub fn disjoint_regions<R: Rng + ?Sized>(rng: &mut R, space: &SpatialSpace, count: usize) -> Vec<SpatialRegion> {
    assert!(
        count >= 1 && count <= space.modes(),
        "not enough modes for {count} regions"
    );
    let mut modes: Vec<usize> = (0..space.modes()).collect();
    modes.shuffle(rng);
    let used = rng.gen_range(count..=space.modes());
    let mut cuts: Vec<usize> = (1..used).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(count - 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(used);
    bounds
        .windows(2)
        .map(|w| SpatialRegion::new(modes[w[0]..w[1]].iter().copied(), space).expect("modes are in range"))
        .collect()
}
