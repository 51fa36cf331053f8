//! Finite-mode spatial model: regions are subsets of an orthonormal mode
//! basis, so disjoint regions give orthogonal diagonal projections.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::tensor::{inner, vec_norm, Operator, C64, ONE, ZERO};

/// Amplitudes below this magnitude count as vanishing outside a support.
pub const SUPPORT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpatialSpace {
    d_l: usize,
}

impl SpatialSpace {
    pub fn new(d_l: usize) -> Result<Self> {
        if d_l == 0 {
            return Err(Error::InvalidShape("no spatial modes".into()));
        }
        Ok(SpatialSpace { d_l })
    }

    pub fn modes(&self) -> usize {
        self.d_l
    }

    pub fn full_region(&self) -> SpatialRegion {
        SpatialRegion {
            modes: (0..self.d_l).collect(),
        }
    }
}

/// A nonempty set of mode indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpatialRegion {
    modes: BTreeSet<usize>,
}

impl SpatialRegion {
    pub fn new(modes: impl IntoIterator<Item = usize>, space: &SpatialSpace) -> Result<Self> {
        let modes: BTreeSet<usize> = modes.into_iter().collect();
        if modes.is_empty() {
            return Err(Error::EmptyRegion);
        }
        if let Some(&bad) = modes.iter().find(|&&m| m >= space.d_l) {
            return Err(Error::OutOfRange {
                context: "region mode",
                index: bad,
                limit: space.d_l,
            });
        }
        Ok(SpatialRegion { modes })
    }

    pub fn single(mode: usize, space: &SpatialSpace) -> Result<Self> {
        SpatialRegion::new([mode], space)
    }

    pub fn modes(&self) -> &BTreeSet<usize> {
        &self.modes
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.modes.contains(&mode)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn first(&self) -> usize {
        *self.modes.first().expect("regions are nonempty")
    }

    pub fn max_mode(&self) -> usize {
        *self.modes.last().expect("regions are nonempty")
    }

    pub fn shared_modes(&self, other: &SpatialRegion) -> Vec<usize> {
        self.modes.intersection(&other.modes).copied().collect()
    }

    pub fn is_disjoint(&self, other: &SpatialRegion) -> bool {
        self.modes.is_disjoint(&other.modes)
    }
}

/// True when every pair of regions is disjoint.
pub fn pairwise_disjoint(regions: &[SpatialRegion]) -> bool {
    regions
        .iter()
        .enumerate()
        .all(|(i, r)| regions[i + 1..].iter().all(|s| r.is_disjoint(s)))
}

/// Diagonal 0/1 projection onto the modes of `region`.
pub fn projector(region: &SpatialRegion, space: &SpatialSpace) -> Result<Operator> {
    if region.max_mode() >= space.d_l {
        return Err(Error::OutOfRange {
            context: "region mode",
            index: region.max_mode(),
            limit: space.d_l,
        });
    }
    let diag: Vec<C64> = (0..space.d_l)
        .map(|m| if region.contains(m) { ONE } else { ZERO })
        .collect();
    Ok(Operator::diag(&diag))
}

/// Unit-norm spatial wavefunction, optionally tagged with its support.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    amplitudes: Vec<C64>,
    support: Option<SpatialRegion>,
}

impl Wavefunction {
    /// Normalizes `amplitudes`; when `support` is given the amplitudes must
    /// vanish outside it.
    pub fn new(amplitudes: Vec<C64>, support: Option<SpatialRegion>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("wavefunction"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("wavefunction"));
        }
        let norm = vec_norm(&amplitudes);
        if norm < 1e-12 {
            return Err(Error::ZeroVector { norm });
        }
        let amplitudes: Vec<C64> = amplitudes.into_iter().map(|z| z / norm).collect();
        if let Some(region) = &support {
            if region.max_mode() >= amplitudes.len() {
                return Err(Error::OutOfRange {
                    context: "wavefunction support",
                    index: region.max_mode(),
                    limit: amplitudes.len(),
                });
            }
            let leak = amplitudes
                .iter()
                .enumerate()
                .filter(|(m, _)| !region.contains(*m))
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            if leak > SUPPORT_TOL {
                return Err(Error::SupportViolation { leak });
            }
        }
        Ok(Wavefunction { amplitudes, support })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn support(&self) -> Option<&SpatialRegion> {
        self.support.as_ref()
    }

    pub fn modes(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Basis wavefunction `e_mode` supported on `{mode}`.
pub fn mode_wavefunction(mode: usize, space: &SpatialSpace) -> Result<Wavefunction> {
    if mode >= space.d_l {
        return Err(Error::OutOfRange {
            context: "spatial mode",
            index: mode,
            limit: space.d_l,
        });
    }
    let mut amplitudes = vec![ZERO; space.d_l];
    amplitudes[mode] = ONE;
    Ok(Wavefunction {
        amplitudes,
        support: Some(SpatialRegion::single(mode, space)?),
    })
}

/// `⟨f|g⟩`
pub fn overlap(f: &Wavefunction, g: &Wavefunction) -> Result<C64> {
    if f.modes() != g.modes() {
        return Err(Error::DimensionMismatch {
            context: "overlap",
            expected: f.modes(),
            found: g.modes(),
        });
    }
    Ok(inner(&f.amplitudes, &g.amplitudes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(d: usize) -> SpatialSpace {
        SpatialSpace::new(d).unwrap()
    }

    #[test]
    fn projector_examples() {
        let s = space(2);
        let p0 = projector(&SpatialRegion::single(0, &s).unwrap(), &s).unwrap();
        assert_eq!(p0, Operator::real_diag(&[1.0, 0.0]));
        assert_eq!(projector(&s.full_region(), &s).unwrap(), Operator::identity(2));
        let p1 = projector(&SpatialRegion::single(1, &s).unwrap(), &s).unwrap();
        assert_eq!(&p0 * &p1, Operator::zeros(2, 2));
    }

    #[test]
    fn region_validation() {
        let s = space(3);
        assert!(matches!(SpatialRegion::new([], &s), Err(Error::EmptyRegion)));
        assert!(matches!(SpatialRegion::new([3], &s), Err(Error::OutOfRange { .. })));
        let a = SpatialRegion::new([0, 1], &s).unwrap();
        let b = SpatialRegion::new([1, 2], &s).unwrap();
        assert_eq!(a.shared_modes(&b), vec![1]);
        assert!(!pairwise_disjoint(&[a.clone(), b]));
        assert!(pairwise_disjoint(&[a, SpatialRegion::single(2, &s).unwrap()]));
    }

    #[test]
    fn overlaps() {
        let s = space(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = Wavefunction::new(vec![C64::new(h, 0.0), C64::new(h, 0.0)], None).unwrap();
        let g = Wavefunction::new(vec![C64::new(h, 0.0), C64::new(-h, 0.0)], None).unwrap();
        assert!((overlap(&f, &f).unwrap() - ONE).norm() < 1e-15);
        assert!(overlap(&f, &g).unwrap().norm() < 1e-15);
        let e0 = mode_wavefunction(0, &s).unwrap();
        let e1 = mode_wavefunction(1, &s).unwrap();
        assert_eq!(overlap(&e0, &e1).unwrap(), ZERO);
        let long = mode_wavefunction(0, &space(3)).unwrap();
        assert!(overlap(&e0, &long).is_err());
    }

    #[test]
    fn mode_wavefunctions() {
        let s = space(3);
        let e0 = mode_wavefunction(0, &s).unwrap();
        assert_eq!(e0.amplitudes(), &[ONE, ZERO, ZERO]);
        let p = projector(e0.support().unwrap(), &s).unwrap();
        assert_eq!(p.apply(e0.amplitudes()), e0.amplitudes());
        assert!(mode_wavefunction(3, &s).is_err());
    }

    #[test]
    fn support_is_enforced() {
        let s = space(3);
        let r = SpatialRegion::new([0, 1], &s).unwrap();
        let ok = Wavefunction::new(vec![ONE, ONE, ZERO], Some(r.clone()));
        assert!(ok.is_ok());
        let bad = Wavefunction::new(vec![ONE, ONE, C64::new(1e-6, 0.0)], Some(r));
        assert!(matches!(bad, Err(Error::SupportViolation { .. })));
    }
}
