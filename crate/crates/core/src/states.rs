//! Constructors for (anti)symmetrized states of identical particles with
//! spatial and spin factors.
//!
//! Every constructor renormalizes its output and reports the norm it had
//! before renormalization. A pre-normalization norm below `1e-12` is an
//! error.

use crate::error::{Error, Result};
use crate::space::SpaceSpec;
use crate::spatial::Wavefunction;
use crate::symmetry::{check_particle_count, classify_vector, enumerate_sn, symmetrizer, Parity, SymmetryClass};
use crate::tensor::{kron_vec, permute_vector, StateVector, C64, ONE, ZERO};

/// One particle's state `f ⊗ ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedFactor {
    pub f: Wavefunction,
    pub xi: StateVector,
}

impl LocalizedFactor {
    /// Normalizes `xi`.
    pub fn new(f: Wavefunction, xi: StateVector) -> Result<Self> {
        let (xi, _) = StateVector::normalized(xi.into_amplitudes())?;
        Ok(LocalizedFactor { f, xi })
    }

    pub fn d_l(&self) -> usize {
        self.f.modes()
    }

    pub fn d_h(&self) -> usize {
        self.xi.dim()
    }

    /// Amplitudes of `f ⊗ ξ` in the one-particle basis `x * d_h + s`.
    pub fn vector(&self) -> Vec<C64> {
        kron_vec(self.f.amplitudes(), self.xi.amplitudes())
    }
}

/// One term `w [(f⊗ξ)⊗(g⊗η) ± (g⊗η)⊗(f⊗ξ)]` of a two-particle superposition.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperpositionTerm {
    pub first: LocalizedFactor,
    pub second: LocalizedFactor,
    pub weight: C64,
}

impl SuperpositionTerm {
    pub fn new(first: LocalizedFactor, second: LocalizedFactor) -> Self {
        SuperpositionTerm {
            first,
            second,
            weight: ONE,
        }
    }

    pub fn weighted(first: LocalizedFactor, second: LocalizedFactor, weight: C64) -> Self {
        SuperpositionTerm { first, second, weight }
    }
}

/// A normalized state and the norm it had before normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct Constructed {
    pub state: StateVector,
    pub raw_norm: f64,
}

fn check_same_dims(factors: &[&LocalizedFactor]) -> Result<(usize, usize)> {
    let first = factors.first().ok_or(Error::Empty("factor list"))?;
    let (d_l, d_h) = (first.d_l(), first.d_h());
    for f in factors {
        if f.d_l() != d_l {
            return Err(Error::DimensionMismatch {
                context: "spatial modes of factors",
                expected: d_l,
                found: f.d_l(),
            });
        }
        if f.d_h() != d_h {
            return Err(Error::DimensionMismatch {
                context: "spin dimension of factors",
                expected: d_h,
                found: f.d_h(),
            });
        }
    }
    Ok((d_l, d_h))
}

fn finish(raw: Vec<C64>) -> Result<Constructed> {
    let (state, raw_norm) = StateVector::normalized(raw)?;
    Ok(Constructed { state, raw_norm })
}

/// Adds `w (u⊗v ± v⊗u)` into `acc`.
fn add_exchange_pair(acc: &mut [C64], u: &[C64], v: &[C64], w: C64, sign: f64) {
    let d = u.len();
    for i in 0..d {
        for j in 0..d {
            acc[i * d + j] += w * (u[i] * v[j] + v[i] * u[j] * sign);
        }
    }
}

/// `(1/√2)[(f⊗ξ)⊗(g⊗η) ± (g⊗η)⊗(f⊗ξ)]`
pub fn two_particle_localized(a: &LocalizedFactor, b: &LocalizedFactor, parity: Parity) -> Result<Constructed> {
    check_same_dims(&[a, b])?;
    let (u, v) = (a.vector(), b.vector());
    let mut raw = vec![ZERO; u.len() * u.len()];
    add_exchange_pair(
        &mut raw,
        &u,
        &v,
        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        parity.exchange_sign(),
    );
    finish(raw)
}

/// `Σ_i w_i [(f_i⊗ξ_i)⊗(g_i⊗η_i) ± (g_i⊗η_i)⊗(f_i⊗ξ_i)]`, normalized. The
/// reported raw norm is that of the bare sum, without any `1/√(2N)`.
pub fn superposition_state(terms: &[SuperpositionTerm], parity: Parity) -> Result<Constructed> {
    if terms.is_empty() {
        return Err(Error::Empty("superposition terms"));
    }
    let factors: Vec<&LocalizedFactor> = terms.iter().flat_map(|t| [&t.first, &t.second]).collect();
    check_same_dims(&factors)?;
    if terms
        .iter()
        .any(|t| !t.weight.re.is_finite() || !t.weight.im.is_finite())
    {
        return Err(Error::NonFinite("superposition weight"));
    }
    let d = factors[0].d_l() * factors[0].d_h();
    let mut raw = vec![ZERO; d * d];
    for t in terms {
        add_exchange_pair(
            &mut raw,
            &t.first.vector(),
            &t.second.vector(),
            t.weight,
            parity.exchange_sign(),
        );
    }
    finish(raw)
}

/// `(1/√n!) Σ_π ε_π ⊗_i (f_{π(i)}⊗ξ_{π(i)})`, normalized. The raw norm squared
/// is the permanent (bosons) or determinant (fermions) of the Gram matrix.
pub fn n_particle_localized(factors: &[LocalizedFactor], parity: Parity) -> Result<Constructed> {
    let n = factors.len();
    check_particle_count(n)?;
    check_same_dims(&factors.iter().collect::<Vec<_>>())?;
    let vectors: Vec<Vec<C64>> = factors.iter().map(LocalizedFactor::vector).collect();
    let d = vectors[0].len();
    let perms = enumerate_sn(n)?;
    let scale = 1.0 / (perms.len() as f64).sqrt();
    let mut raw = vec![ZERO; d.pow(n as u32)];
    for p in &perms {
        let eps = C64::new(parity.character(p) * scale, 0.0);
        let mut term = vec![eps];
        for i in 0..n {
            term = kron_vec(&term, &vectors[p.apply(i)]);
        }
        for (acc, t) in raw.iter_mut().zip(term) {
            *acc += t;
        }
    }
    finish(raw)
}

/// The special subspaces where the spatial part is shared or has a definite
/// exchange symmetry.
#[derive(Clone, Debug, PartialEq)]
pub enum SubspaceSpec {
    /// `⊕_μ (|μ⟩⊗h)^∧n = l ⊗ h^∧n`: every particle in mode `μ` with amplitude
    /// `c_μ`, and an antisymmetric spin part `χ_μ` for that mode.
    SharedMode {
        mode_amplitudes: Vec<C64>,
        spins: Vec<StateVector>,
    },
    /// `l^⊙n ⊗ h^∧n`
    SymmetricSpatial { spatial: StateVector, spin: StateVector },
    /// `l^∧n ⊗ h^⊙n`
    AntisymmetricSpatial { spatial: StateVector, spin: StateVector },
}

impl SubspaceSpec {
    pub fn label(&self) -> &'static str {
        match self {
            SubspaceSpec::SharedMode { .. } => "H'",
            SubspaceSpec::SymmetricSpatial { .. } => "H''",
            SubspaceSpec::AntisymmetricSpatial { .. } => "H'''",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceState {
    pub state: StateVector,
    pub raw_norm: f64,
    /// Exchange symmetry of the interleaved global vector, as measured.
    pub global_symmetry: SymmetryClass,
}

fn project(v: &StateVector, n: usize, d: usize, parity: Parity, context: &'static str) -> Result<Vec<C64>> {
    let expected = d.pow(n as u32);
    if v.dim() != expected {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found: v.dim(),
        });
    }
    Ok(symmetrizer(n, d, parity)?.apply(v.amplitudes()))
}

/// Builds a state in one of the special subspaces. The spatial and spin parts
/// are projected onto the required symmetry sectors, assembled in grouped
/// order `(l^⊗n)⊗(h^⊗n)` and then interleaved to `(l⊗h)^⊗n`.
pub fn subspace_state(spec: &SubspaceSpec, space: &SpaceSpec) -> Result<SubspaceState> {
    let SpaceSpec { d_l, d_h, n } = *space;
    let grouped = match spec {
        SubspaceSpec::SharedMode { mode_amplitudes, spins } => {
            if mode_amplitudes.len() != d_l {
                return Err(Error::DimensionMismatch {
                    context: "shared-mode amplitudes",
                    expected: d_l,
                    found: mode_amplitudes.len(),
                });
            }
            if spins.len() != d_l {
                return Err(Error::DimensionMismatch {
                    context: "shared-mode spin parts",
                    expected: d_l,
                    found: spins.len(),
                });
            }
            let spatial_dim = space.spatial_dim();
            let spin_dim = space.spin_dim();
            let mut out = vec![ZERO; spatial_dim * spin_dim];
            // |μ⟩^⊗n has index μ·(1 + d_l + … + d_l^{n−1}).
            let diagonal_stride: usize = (0..n).map(|k| d_l.pow(k as u32)).sum();
            for (mu, (&c, chi)) in mode_amplitudes.iter().zip(spins).enumerate() {
                if c == ZERO {
                    continue;
                }
                let spin = project(chi, n, d_h, Parity::Fermi, "shared-mode spin part")?;
                let row = mu * diagonal_stride;
                for (s, &z) in spin.iter().enumerate() {
                    out[row * spin_dim + s] += c * z;
                }
            }
            out
        }
        SubspaceSpec::SymmetricSpatial { spatial, spin } => kron_vec(
            &project(spatial, n, d_l, Parity::Bose, "symmetric spatial part")?,
            &project(spin, n, d_h, Parity::Fermi, "antisymmetric spin part")?,
        ),
        SubspaceSpec::AntisymmetricSpatial { spatial, spin } => kron_vec(
            &project(spatial, n, d_l, Parity::Fermi, "antisymmetric spatial part")?,
            &project(spin, n, d_h, Parity::Bose, "symmetric spin part")?,
        ),
    };
    let (grouped, raw_norm) = StateVector::normalized(grouped)?;
    let state = permute_vector(&grouped, &space.grouped_shape(), &space.grouped_to_interleaved())?;
    let (global_symmetry, _, _) = classify_vector(state.amplitudes(), n, space.one_particle_dim(), 1e-10)?;
    Ok(SubspaceState {
        state,
        raw_norm,
        global_symmetry,
    })
}
