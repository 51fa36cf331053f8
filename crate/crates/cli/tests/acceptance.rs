//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinsep::algebra::{bipartition_check, four_term_commutator, local_generator, Side};
use spinsep::embedding::embed_mixed;
use spinsep::entanglement::negativity;
use spinsep::random;
use spinsep::reduction::{
    cluster_expectation, reduced_spin_closed_form, reduced_spin_probe, symmetry_defects, trace_out_spatial,
};
use spinsep::second_quantization::{dgamma_one, dgamma_product};
use spinsep::states::{
    n_particle_localized, subspace_state, superposition_state, two_particle_localized, LocalizedFactor, SubspaceSpec,
    SuperpositionTerm,
};
use spinsep::symmetry::{binomial, enumerate_sn, perm_unitary, symmetrizer};
use spinsep::tensor::{kron, kron_all};
use spinsep::{DensityMatrix, Operator, Parity, SpaceSpec, SpatialRegion, SpatialSpace, StateVector};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

const PARITIES: [Parity; 2] = [Parity::Fermi, Parity::Bose];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn factor(rng: &mut ChaCha8Rng, region: &SpatialRegion, space: &SpatialSpace, d_h: usize) -> LocalizedFactor {
    LocalizedFactor::new(random::wavefunction(rng, region, space), random::state(rng, d_h)).unwrap()
}

/// A random wavefunction supported on one mode: a phase times `e_mode`.
fn single_mode_factor(rng: &mut ChaCha8Rng, mode: usize, space: &SpatialSpace, d_h: usize) -> LocalizedFactor {
    let region = SpatialRegion::single(mode, space).unwrap();
    factor(rng, &region, space, d_h)
}

fn probe(psi: &StateVector, space: &SpaceSpec, regions: &[SpatialRegion]) -> Operator {
    let rho = DensityMatrix::from_pure(psi).unwrap();
    reduced_spin_probe(&rho, space, regions).unwrap().matrix
}

fn representation_laws() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for n in [2, 3, 4] {
        for d in [2, 4] {
            let perms = enumerate_sn(n).unwrap();
            let w: Vec<Operator> = perms.iter().map(|p| perm_unitary(p, d).unwrap()).collect();
            for (p, wp) in perms.iter().zip(&w) {
                let inv = perm_unitary(&p.inverse(), d).unwrap();
                worst = worst.max(wp.dagger().distance(&inv));
                for (q, wq) in perms.iter().zip(&w) {
                    let composed = perm_unitary(&p.compose(q), d).unwrap();
                    worst = worst.max((wp * wq).distance(&composed));
                    pairs += 1;
                }
            }
        }
    }
    ensure!(worst <= 1e-12, "max defect {worst:e}");
    Ok(format!("{pairs} pairs, max defect {worst:e}"))
}

fn projector_laws() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for d in 1..=4 {
            let plus = symmetrizer(n, d, Parity::Bose).unwrap();
            let minus = symmetrizer(n, d, Parity::Fermi).unwrap();
            for (pi, rank) in [(&plus, binomial(d + n - 1, n)), (&minus, binomial(d, n))] {
                worst = worst.max((pi * pi).distance(pi));
                worst = worst.max(pi.dagger().distance(pi));
                worst = worst.max((pi.trace().re - rank as f64).abs());
            }
            worst = worst.max((&plus * &minus).frobenius_norm());
        }
    }
    ensure!(worst <= 1e-10, "max defect {worst:e}");
    Ok(format!("n = 2..4, d = 1..4, max defect {worst:e}"))
}

fn invariance() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.gen_range(2..=3);
        let d = r.gen_range(2..=3);
        let one = dgamma_one(&random::operator(&mut r, d), n).unwrap().matrix;
        let ops: Vec<Operator> = (0..n).map(|_| random::operator(&mut r, d)).collect();
        let product = dgamma_product(&ops).unwrap().matrix;
        let id = Operator::identity(d.pow(n as u32));
        for parity in PARITIES {
            let pi = symmetrizer(n, d, parity).unwrap();
            let complement = &id - &pi;
            for x in [&one, &product] {
                worst = worst.max((&(&complement * x) * &pi).frobenius_norm());
            }
        }
    }
    ensure!(worst <= 1e-11, "max leak {worst:e}");
    Ok(format!("50 one-particle and 50 product lifts, max leak {worst:e}"))
}

fn two_particle_theorem() -> Outcome {
    let mut r = rng(4);
    let (mut worst, mut parity_gap): (f64, f64) = (0.0, 0.0);
    let mut instances = 0;
    // 100 single-mode instances, then 100 with multi-mode regions.
    for trial in 0..200 {
        let d_l = r.gen_range(2..=6);
        let d_h = r.gen_range(2..=3);
        let spatial = SpatialSpace::new(d_l).unwrap();
        let (a, b, regions) = if trial < 100 {
            let modes: Vec<usize> = rand::seq::index::sample(&mut r, d_l, 2).into_vec();
            let regions = vec![
                SpatialRegion::single(modes[0], &spatial).unwrap(),
                SpatialRegion::single(modes[1], &spatial).unwrap(),
            ];
            let a = single_mode_factor(&mut r, modes[0], &spatial, d_h);
            let b = single_mode_factor(&mut r, modes[1], &spatial, d_h);
            (a, b, regions)
        } else {
            let regions = random::disjoint_regions(&mut r, &spatial, 2);
            let a = factor(&mut r, &regions[0], &spatial, d_h);
            let b = factor(&mut r, &regions[1], &spatial, d_h);
            (a, b, regions)
        };
        let space = SpaceSpec::new(d_l, d_h, 2).unwrap();
        let want = kron(&a.xi.projector(), &b.xi.projector());
        let got: Vec<Operator> = PARITIES
            .iter()
            .map(|&p| probe(&two_particle_localized(&a, &b, p).unwrap().state, &space, &regions))
            .collect();
        for g in &got {
            worst = worst.max(g.distance(&want));
        }
        let entrywise = got[0]
            .as_slice()
            .iter()
            .zip(got[1].as_slice())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        parity_gap = parity_gap.max(entrywise);
        instances += 1;
    }
    ensure!(worst <= 1e-10, "max deviation from the product {worst:e}");
    ensure!(parity_gap <= 1e-12, "Fermi and Bose differ by {parity_gap:e}");
    Ok(format!(
        "{instances} instances, max deviation {worst:e}, max parity gap {parity_gap:e}"
    ))
}

fn gram_closed_form() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let big_n = r.gen_range(1..=4);
        let d_h = r.gen_range(2..=3);
        let d_l = r.gen_range(2..=6);
        let spatial = SpatialSpace::new(d_l).unwrap();
        let regions = random::disjoint_regions(&mut r, &spatial, 2);
        let terms: Vec<SuperpositionTerm> = (0..big_n)
            .map(|_| {
                let first = factor(&mut r, &regions[0], &spatial, d_h);
                let second = factor(&mut r, &regions[1], &spatial, d_h);
                SuperpositionTerm::weighted(first, second, random::complex(&mut r))
            })
            .collect();
        let parity = PARITIES[trial % 2];
        let built = superposition_state(&terms, parity).unwrap();
        let space = SpaceSpec::new(d_l, d_h, 2).unwrap();
        // Probe of the prefactored state (1/√(2N)) Σ_i w_i(...), by quadratic scaling.
        let scale = built.raw_norm.powi(2) / (2.0 * big_n as f64);
        let probed = probe(&built.state, &space, &regions).scale_real(scale);
        let closed = reduced_spin_closed_form(&terms).unwrap();
        worst = worst.max(probed.distance(&closed));
    }
    ensure!(worst <= 1e-10, "max distance {worst:e}");
    Ok(format!("100 superpositions, max distance {worst:e}"))
}

fn n_particle_theorem() -> Outcome {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let d_l = r.gen_range(3..=5);
        let spatial = SpatialSpace::new(d_l).unwrap();
        let regions = random::disjoint_regions(&mut r, &spatial, 3);
        let factors: Vec<LocalizedFactor> = regions.iter().map(|reg| factor(&mut r, reg, &spatial, 2)).collect();
        let projectors: Vec<Operator> = factors.iter().map(|f| f.xi.projector()).collect();
        let want = kron_all(&projectors);
        let space = SpaceSpec::new(d_l, 2, 3).unwrap();
        for parity in PARITIES {
            let psi = n_particle_localized(&factors, parity).unwrap().state;
            worst = worst.max(probe(&psi, &space, &regions).distance(&want));
        }
    }
    ensure!(worst <= 1e-10, "max deviation {worst:e}");
    Ok(format!("25 factor sets, both parities, max deviation {worst:e}"))
}

fn cluster_separability() -> Outcome {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let d_l = r.gen_range(2..=6);
        let d_h = r.gen_range(2..=3);
        let spatial = SpatialSpace::new(d_l).unwrap();
        let regions = random::disjoint_regions(&mut r, &spatial, 2);
        let a_fac = factor(&mut r, &regions[0], &spatial, d_h);
        let b_fac = factor(&mut r, &regions[1], &spatial, d_h);
        let a = random::hermitian(&mut r, d_h);
        let psi = two_particle_localized(&a_fac, &b_fac, PARITIES[trial % 2])
            .unwrap()
            .state;
        let space = SpaceSpec::new(d_l, d_h, 2).unwrap();
        let got = cluster_expectation(&psi, &space, &regions[0], &a, &regions[1]).unwrap();
        let want = a_fac.xi.expectation(&a);
        worst = worst.max((got - want).norm());
    }
    ensure!(worst <= 1e-11, "max deviation {worst:e}");
    Ok(format!("50 instances, max deviation {worst:e}"))
}

fn statistics_transmutation() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for kind in 0..3 {
        for _ in 0..20 {
            let d_l = r.gen_range(2..=4);
            let d_h = r.gen_range(2..=3);
            let space = SpaceSpec::new(d_l, d_h, 2).unwrap();
            let spec = match kind {
                0 => SubspaceSpec::SharedMode {
                    mode_amplitudes: random::vector(&mut r, d_l),
                    spins: (0..d_l)
                        .map(|_| StateVector::new(random::vector(&mut r, d_h * d_h)).unwrap())
                        .collect(),
                },
                1 => SubspaceSpec::SymmetricSpatial {
                    spatial: StateVector::new(random::vector(&mut r, d_l * d_l)).unwrap(),
                    spin: StateVector::new(random::vector(&mut r, d_h * d_h)).unwrap(),
                },
                _ => SubspaceSpec::AntisymmetricSpatial {
                    spatial: StateVector::new(random::vector(&mut r, d_l * d_l)).unwrap(),
                    spin: StateVector::new(random::vector(&mut r, d_h * d_h)).unwrap(),
                },
            };
            let psi = subspace_state(&spec, &space).unwrap().state;
            let rho = DensityMatrix::from_pure(&psi).unwrap();
            let spin = trace_out_spatial(rho.as_operator(), &space).unwrap();
            let (anti, sym) = symmetry_defects(&spin, 2, d_h).unwrap();
            let defect = if kind < 2 { anti } else { sym };
            ensure!(
                defect <= 1e-10,
                "{} instance has classification defect {defect:e}",
                spec.label()
            );
            worst = worst.max(defect);
        }
    }
    Ok(format!("20 each of H', H'', H''', max defect {worst:e}"))
}

fn bipartition() -> Outcome {
    let mut r = rng(9);
    let (mut disjoint_max, mut overlap_min, mut expansion): (f64, f64, f64) = (0.0, f64::INFINITY, 0.0);
    for trial in 0..40 {
        let d_h = if trial % 2 == 0 { 2 } else { 3 };
        let d_l = r.gen_range(2..=3);
        let overlapping = trial >= 20;
        let (p, q) = if overlapping {
            let rp = r.gen_range(1..=d_l);
            let rq = r.gen_range(1..=d_l);
            (random::projection(&mut r, d_l, rp), random::projection(&mut r, d_l, rq))
        } else {
            let rp = r.gen_range(1..d_l);
            let rq = r.gen_range(1..=d_l - rp);
            random::orthogonal_projections(&mut r, d_l, rp, rq)
        };
        let verdict = bipartition_check(&p, &q, d_h).map_err(|e| e.to_string())?;
        if overlapping {
            ensure!(!verdict.commutes, "overlapping pair reported commuting");
            ensure!(verdict.witness.is_some(), "overlapping pair without a witness");
            ensure!(
                verdict.max_commutator_norm >= 1e-3,
                "witness norm {:e}",
                verdict.max_commutator_norm
            );
            overlap_min = overlap_min.min(verdict.max_commutator_norm);
        } else {
            ensure!(verdict.commutes, "disjoint pair reported non-commuting");
            ensure!(
                verdict.max_commutator_norm <= 1e-12,
                "disjoint norm {:e}",
                verdict.max_commutator_norm
            );
            disjoint_max = disjoint_max.max(verdict.max_commutator_norm);
        }
        let a = random::hermitian(&mut r, d_h);
        let b = random::hermitian(&mut r, d_h);
        let direct = local_generator(Side::First, &a, &p, &q)
            .unwrap()
            .commutator(&local_generator(Side::Second, &b, &p, &q).unwrap());
        expansion = expansion.max(direct.distance(&four_term_commutator(&a, &b, &p, &q).unwrap()));
    }
    ensure!(expansion <= 1e-12, "four-term expansion off by {expansion:e}");
    Ok(format!(
        "disjoint max norm {disjoint_max:e}, overlapping min norm {overlap_min:.3e}, expansion defect {expansion:e}"
    ))
}

fn surjectivity() -> Outcome {
    let mut r = rng(10);
    let spatial = SpatialSpace::new(8).unwrap();
    let r1 = SpatialRegion::new(0..4, &spatial).unwrap();
    let r2 = SpatialRegion::new(4..8, &spatial).unwrap();
    let regions = [r1.clone(), r2.clone()];
    let space = SpaceSpec::new(8, 2, 2).unwrap();
    let (mut worst, mut neg_gap): (f64, f64) = (0.0, 0.0);
    let mut npt = 0;
    for _ in 0..200 {
        let rank = r.gen_range(1..=4);
        let sigma = random::density_matrix(&mut r, 4, rank);
        let target_neg = negativity(&sigma, 2, 2).unwrap();
        if target_neg > 1e-10 {
            npt += 1;
        }
        for parity in PARITIES {
            let emb = embed_mixed(&sigma, &spatial, &r1, &r2, parity).unwrap();
            let reduced = probe(&emb.state, &space, &regions);
            worst = worst.max(reduced.distance(sigma.as_operator()));
            let reduced = DensityMatrix::new(reduced.hermitian_part()).map_err(|e| e.to_string())?;
            neg_gap = neg_gap.max((negativity(&reduced, 2, 2).unwrap() - target_neg).abs());
        }
    }
    ensure!(worst <= 1e-9, "max round-trip error {worst:e}");
    ensure!(npt >= 50, "only {npt} PPT-negative targets");
    ensure!(neg_gap <= 1e-9, "negativity off by {neg_gap:e}");
    Ok(format!(
        "200 targets ({npt} NPT), both parities, max error {worst:e}, negativity gap {neg_gap:e}"
    ))
}

fn cli_determinism() -> Outcome {
    let suite = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/paper_claims");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_spinsep"))
            .arg("suite")
            .arg(&suite)
            .arg("--out-dir")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            status.status.success(),
            "{run} run failed:\n{}",
            String::from_utf8_lossy(&status.stdout)
        );
        let mut files: Vec<_> = std::fs::read_dir(&out)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let contents: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(p).unwrap(),
                )
            })
            .collect();
        outputs.push(contents);
    }
    ensure!(
        outputs[0].len() == 9,
        "expected 8 reports and a summary, found {} files",
        outputs[0].len()
    );
    ensure!(outputs[0] == outputs[1], "reports differ between runs");
    Ok(format!(
        "{} JSON files byte-identical across two runs",
        outputs[0].len()
    ))
}

fn main() {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("representation laws", 5, representation_laws),
        ("projector laws", 5, projector_laws),
        ("lift invariance", 5, invariance),
        ("two-particle theorem", 10, two_particle_theorem),
        ("Gram closed form", 30, gram_closed_form),
        ("n-particle theorem", 60, n_particle_theorem),
        ("cluster separability", 5, cluster_separability),
        ("statistics transmutation", 10, statistics_transmutation),
        ("bipartition iff orthogonal", 30, bipartition),
        ("surjectivity of the reduction", 60, surjectivity),
        ("CLI determinism", 120, cli_determinism),
    ];
    let mut failed = 0;
    for (i, (title, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(detail) if elapsed <= Duration::from_secs(*limit) => (true, detail),
            Ok(detail) => (false, format!("{detail}; exceeded {limit} s")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {title} ({:.2} s of {limit} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
