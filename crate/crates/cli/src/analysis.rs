//! Executes a validated scenario and assembles its report.

use serde::Serialize;

use spinsep::algebra::bipartition_check;
use spinsep::embedding::{embed_mixed, embed_pure};
use spinsep::entanglement::{
    left_marginal, negativity, ppt_verdict, schmidt, von_neumann_entropy, PptVerdict, SEPARABLE_TOL,
};
use spinsep::reduction::{reduce, reduced_spin_probe, symmetry_defects, trace_out_spatial};
use spinsep::spatial::SpatialRegion;
use spinsep::states::{
    n_particle_localized, subspace_state, superposition_state, two_particle_localized, LocalizedFactor,
};
use spinsep::symmetry::classify_vector;
use spinsep::tensor::hermitian_eigen;
use spinsep::{DensityMatrix, Operator, StateVector, Wavefunction, C64};

use crate::error::CliError;
use crate::scenario::{Expectations, Matrix, Plan, Scenario, StatePlan, SweepPlan, SymmetryLabel};

/// Purity above `1 − PURE_TOL` counts as a pure state.
const PURE_TOL: f64 = 1e-10;

/// Either a result or an explicit error record.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Entry<T> {
    Ok(T),
    Err { error: String },
}

impl<T> Entry<T> {
    fn from_result(r: spinsep::Result<T>) -> Self {
        match r {
            Ok(v) => Entry::Ok(v),
            Err(e) => Entry::Err { error: e.to_string() },
        }
    }

    fn ok(&self) -> Option<&T> {
        match self {
            Entry::Ok(v) => Some(v),
            Entry::Err { .. } => None,
        }
    }

    fn is_err(&self) -> bool {
        matches!(self, Entry::Err { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StateSummary {
    pub dim: usize,
    /// Norm of the construction before normalization, where defined.
    pub raw_norm: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionOut {
    pub regions: Vec<String>,
    pub matrix: Matrix,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    pub valid_state: bool,
    pub normalized: Option<Matrix>,
    pub symmetry: SymmetryLabel,
    pub antisymmetric_defect: f64,
    pub symmetric_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryOut {
    pub global: SymmetryLabel,
    pub global_antisymmetric_defect: f64,
    pub global_symmetric_defect: f64,
    /// Spin state after tracing out every spatial factor.
    pub spin_trace: Matrix,
    pub spin_symmetry: SymmetryLabel,
    pub spin_antisymmetric_defect: f64,
    pub spin_symmetric_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntanglementOut {
    pub negativity: f64,
    pub ppt: String,
    /// `null` when PPT is inconclusive for a mixed state.
    pub separable: Option<bool>,
    pub purity: f64,
    /// Entropy of the first spin's marginal, in bits.
    pub entropy: f64,
    /// Present when the reduced state is pure.
    pub schmidt_coefficients: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraOut {
    pub p: String,
    pub q: String,
    pub pq_norm: f64,
    pub commutes: bool,
    pub max_commutator_norm: f64,
    pub witness: Option<(String, String)>,
    pub max_compressed_norm: f64,
    pub compressed_witness: Option<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub overlap: f64,
    pub trace: Option<f64>,
    pub min_eig: Option<f64>,
    pub negativity: Option<f64>,
    pub entropy: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepOut {
    pub f_mode: usize,
    pub g_mode: usize,
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Deterministic report: no timings, fixed field order.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub state: Option<Entry<StateSummary>>,
    pub reduction: Option<Entry<ReductionOut>>,
    pub symmetry: Option<Entry<SymmetryOut>>,
    pub entanglement: Option<Entry<EntanglementOut>>,
    pub algebra_check: Vec<Entry<AlgebraOut>>,
    pub overlap_sweep: Option<SweepOut>,
    pub expectations: Vec<Check>,
    pub passed: bool,
}

pub fn matrix_out(m: &Operator) -> Matrix {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn matrix_in(m: &Matrix) -> Operator {
    let rows: Vec<Vec<C64>> = m
        .iter()
        .map(|r| r.iter().map(|z| C64::new(z[0], z[1])).collect())
        .collect();
    Operator::from_rows(&rows).expect("validated matrix")
}

fn build_state(plan: &Plan) -> spinsep::Result<Option<(StateVector, Option<f64>)>> {
    let Some(state) = &plan.state else {
        return Ok(None);
    };
    let built = match state {
        StatePlan::Localized(factors) => {
            let c = n_particle_localized(factors, plan.parity)?;
            (c.state, Some(c.raw_norm))
        }
        StatePlan::Superposition(terms) => {
            let c = superposition_state(terms, plan.parity)?;
            (c.state, Some(c.raw_norm))
        }
        StatePlan::Subspace(spec) => {
            let s = subspace_state(spec, &plan.space)?;
            (s.state, Some(s.raw_norm))
        }
        StatePlan::EmbedMixed { target, first, second } => (
            embed_mixed(target, &plan.spatial, first, second, plan.parity)?.state,
            None,
        ),
        StatePlan::EmbedPure { target, first, second } => {
            (embed_pure(target, &plan.spatial, first, second, plan.parity)?, None)
        }
    };
    Ok(Some(built))
}

fn reduction(rho: &DensityMatrix, plan: &Plan) -> spinsep::Result<(ReductionOut, Option<DensityMatrix>)> {
    let regions: Vec<SpatialRegion> = plan.probe.iter().map(|(_, r)| r.clone()).collect();
    let report = reduce(rho, &plan.space, &regions)?;
    let (anti, sym) = symmetry_defects(&report.raw.matrix, plan.space.n, plan.space.d_h)?;
    let out = ReductionOut {
        regions: plan.probe.iter().map(|(n, _)| n.clone()).collect(),
        matrix: matrix_out(&report.raw.matrix),
        trace: report.raw.trace,
        min_eigenvalue: report.raw.min_eigenvalue,
        hermiticity_defect: report.raw.hermiticity_defect,
        valid_state: report.valid_state,
        normalized: report.normalized.as_ref().map(|d| matrix_out(d.as_operator())),
        symmetry: report.symmetry_class.into(),
        antisymmetric_defect: anti,
        symmetric_defect: sym,
    };
    Ok((out, report.normalized))
}

fn symmetry(psi: &StateVector, rho: &DensityMatrix, plan: &Plan, tol: f64) -> spinsep::Result<SymmetryOut> {
    let space = &plan.space;
    let (global, anti, sym) = classify_vector(psi.amplitudes(), space.n, space.one_particle_dim(), tol)?;
    let spin = trace_out_spatial(rho.as_operator(), space)?;
    let (s_anti, s_sym) = symmetry_defects(&spin, space.n, space.d_h)?;
    let spin_symmetry = spinsep::reduction::classify_symmetry(&spin, space.n, space.d_h)?;
    Ok(SymmetryOut {
        global: global.into(),
        global_antisymmetric_defect: anti,
        global_symmetric_defect: sym,
        spin_trace: matrix_out(&spin),
        spin_symmetry: spin_symmetry.into(),
        spin_antisymmetric_defect: s_anti,
        spin_symmetric_defect: s_sym,
    })
}

fn entanglement(sigma: &DensityMatrix, d_h: usize) -> spinsep::Result<EntanglementOut> {
    let neg = negativity(sigma, d_h, d_h)?;
    let verdict = ppt_verdict(sigma, d_h, d_h)?;
    let purity = sigma.purity();
    let schmidt_coefficients = if purity > 1.0 - PURE_TOL {
        let (_, vectors) = hermitian_eigen(sigma.as_operator())?;
        let top = vectors.last().expect("nonempty spectrum");
        Some(schmidt(top, d_h, d_h)?.coefficients)
    } else {
        None
    };
    let separable = match verdict {
        PptVerdict::Entangled => Some(false),
        PptVerdict::Separable => Some(true),
        PptVerdict::PptInconclusive => schmidt_coefficients
            .as_ref()
            .map(|c| c.get(1).is_none_or(|&x| x <= SEPARABLE_TOL)),
    };
    Ok(EntanglementOut {
        negativity: neg,
        ppt: verdict.to_string(),
        separable,
        purity,
        entropy: von_neumann_entropy(&left_marginal(sigma, d_h, d_h)?),
        schmidt_coefficients,
    })
}

fn algebra(p_name: &str, q_name: &str, p: &Operator, q: &Operator, d_h: usize) -> spinsep::Result<AlgebraOut> {
    let v = bipartition_check(p, q, d_h)?;
    Ok(AlgebraOut {
        p: p_name.to_string(),
        q: q_name.to_string(),
        pq_norm: (p * q).frobenius_norm(),
        commutes: v.commutes,
        max_commutator_norm: v.max_commutator_norm,
        witness: v.witness,
        max_compressed_norm: v.max_compressed_norm,
        compressed_witness: v.compressed_witness,
    })
}

fn sweep_row(plan: &Plan, s: &SweepPlan, k: usize) -> SweepRow {
    let (c, sn) = if k + 1 == s.steps {
        (0.0, 1.0)
    } else {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64 / (s.steps - 1) as f64;
        (theta.cos(), theta.sin())
    };
    let mut row = SweepRow {
        overlap: sn,
        trace: None,
        min_eig: None,
        negativity: None,
        entropy: None,
    };
    let d_l = plan.space.d_l;
    let mut f = vec![C64::new(0.0, 0.0); d_l];
    f[s.f_mode] = C64::new(1.0, 0.0);
    let mut g = vec![C64::new(0.0, 0.0); d_l];
    g[s.g_mode] = C64::new(c, 0.0);
    g[s.f_mode] = C64::new(sn, 0.0);
    let factor =
        |amps: Vec<C64>, spin: &StateVector| LocalizedFactor::new(Wavefunction::new(amps, None)?, spin.clone());
    let Ok(psi) = factor(f, &s.xi)
        .and_then(|a| Ok((a, factor(g, &s.eta)?)))
        .and_then(|(a, b)| two_particle_localized(&a, &b, plan.parity))
    else {
        return row;
    };
    let g_support = [(s.g_mode, c), (s.f_mode, sn)]
        .into_iter()
        .filter(|&(_, a)| a != 0.0)
        .map(|(m, _)| m);
    let regions = [
        SpatialRegion::single(s.f_mode, &plan.spatial).expect("validated mode"),
        SpatialRegion::new(g_support, &plan.spatial).expect("validated modes"),
    ];
    let Ok(raw) = DensityMatrix::from_pure(&psi.state).and_then(|rho| reduced_spin_probe(&rho, &plan.space, &regions))
    else {
        return row;
    };
    row.trace = Some(raw.trace);
    row.min_eig = Some(raw.min_eigenvalue);
    if let Some(sigma) = raw.normalized() {
        let d_h = plan.space.d_h;
        row.negativity = negativity(&sigma, d_h, d_h).ok();
        row.entropy = left_marginal(&sigma, d_h, d_h).ok().map(|m| von_neumann_entropy(&m));
    }
    row
}

pub fn sweep(plan: &Plan) -> Option<SweepOut> {
    plan.sweep.as_ref().map(|s| SweepOut {
        f_mode: s.f_mode,
        g_mode: s.g_mode,
        rows: (0..s.steps).map(|k| sweep_row(plan, s, k)).collect(),
    })
}

/// Header `overlap,trace,min_eig,negativity,entropy`; undefined values are
/// left empty.
pub fn sweep_csv(out: &SweepOut) -> String {
    let field = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
    let mut csv = String::from("overlap,trace,min_eig,negativity,entropy\n");
    for r in &out.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.overlap,
            field(r.trace),
            field(r.min_eig),
            field(r.negativity),
            field(r.entropy)
        ));
    }
    csv
}

/// Runs every requested analysis. Construction failures of the global state
/// abort with [`CliError::Construction`]; failures inside an analysis are
/// recorded in its entry.
pub fn run(scenario: &Scenario, plan: &Plan, tolerance: f64) -> Result<Report, CliError> {
    let a = &scenario.analyses;
    let built = build_state(plan)?;
    let mut report = Report {
        scenario: scenario.clone(),
        state: None,
        reduction: None,
        symmetry: None,
        entanglement: None,
        algebra_check: Vec::new(),
        overlap_sweep: None,
        expectations: Vec::new(),
        passed: true,
    };
    if let Some((psi, raw_norm)) = &built {
        report.state = Some(Entry::Ok(StateSummary {
            dim: psi.dim(),
            raw_norm: *raw_norm,
        }));
        let rho = DensityMatrix::from_pure(psi)?;
        let mut normalized = None;
        if a.reduction {
            let r = reduction(&rho, plan);
            if let Ok((_, n)) = &r {
                normalized = n.clone();
            }
            report.reduction = Some(Entry::from_result(r.map(|(out, _)| out)));
        }
        if a.symmetry {
            report.symmetry = Some(Entry::from_result(symmetry(psi, &rho, plan, tolerance)));
        }
        if a.entanglement {
            report.entanglement = Some(match &normalized {
                Some(sigma) => Entry::from_result(entanglement(sigma, plan.space.d_h)),
                None => Entry::Err {
                    error: "reduced state is not a valid density matrix".into(),
                },
            });
        }
    }
    report.algebra_check = plan
        .algebra
        .iter()
        .map(|(pn, qn, p, q)| Entry::from_result(algebra(pn, qn, p, q, plan.space.d_h)))
        .collect();
    report.overlap_sweep = sweep(plan);

    if let Some(e) = &scenario.expect {
        report.expectations = check_expectations(e, &report, tolerance);
    }
    let errored = [
        report.reduction.as_ref().is_some_and(Entry::is_err),
        report.symmetry.as_ref().is_some_and(Entry::is_err),
        report.entanglement.as_ref().is_some_and(Entry::is_err),
        report.algebra_check.iter().any(Entry::is_err),
    ]
    .into_iter()
    .any(|x| x);
    report.passed = !errored && report.expectations.iter().all(|c| c.passed);
    Ok(report)
}

fn scalar_check(name: &str, got: Option<f64>, want: f64, tol: f64) -> Check {
    match got {
        Some(v) => Check {
            check: name.into(),
            passed: (v - want).abs() <= tol,
            detail: format!("got {v:e}, expected {want:e} ± {tol:e}"),
        },
        None => missing(name),
    }
}

fn equal_check<T: PartialEq + std::fmt::Display>(name: &str, got: Option<T>, want: T) -> Check {
    match got {
        Some(v) => Check {
            check: name.into(),
            passed: v == want,
            detail: format!("got {v}, expected {want}"),
        },
        None => missing(name),
    }
}

fn missing(name: &str) -> Check {
    Check {
        check: name.into(),
        passed: false,
        detail: "analysis produced no value".into(),
    }
}

fn check_expectations(e: &Expectations, r: &Report, tolerance: f64) -> Vec<Check> {
    let red = r.reduction.as_ref().and_then(Entry::ok);
    let sym = r.symmetry.as_ref().and_then(Entry::ok);
    let ent = r.entanglement.as_ref().and_then(Entry::ok);
    let mut out = Vec::new();
    if let Some(m) = &e.reduced {
        let tol = m.tol.unwrap_or(tolerance);
        out.push(match red {
            Some(red) => {
                let dist = matrix_in(&red.matrix).distance(&matrix_in(&m.matrix));
                Check {
                    check: "reduced".into(),
                    passed: dist <= tol,
                    detail: format!("Frobenius distance {dist:e}, tolerance {tol:e}"),
                }
            }
            None => missing("reduced"),
        });
    }
    if let Some(s) = &e.trace {
        out.push(scalar_check(
            "trace",
            red.map(|x| x.trace),
            s.value,
            s.tol.unwrap_or(tolerance),
        ));
    }
    if let Some(v) = e.valid_state {
        out.push(equal_check("valid_state", red.map(|x| x.valid_state), v));
    }
    if let Some(v) = e.symmetry {
        out.push(equal_check("symmetry", red.map(|x| x.symmetry), v));
    }
    if let Some(v) = e.spin_symmetry {
        out.push(equal_check("spin_symmetry", sym.map(|x| x.spin_symmetry), v));
    }
    if let Some(v) = e.global_symmetry {
        out.push(equal_check("global_symmetry", sym.map(|x| x.global), v));
    }
    if let Some(v) = e.separable {
        out.push(equal_check("separable", ent.and_then(|x| x.separable), v));
    }
    if let Some(s) = &e.negativity {
        out.push(scalar_check(
            "negativity",
            ent.map(|x| x.negativity),
            s.value,
            s.tol.unwrap_or(tolerance),
        ));
    }
    if let Some(s) = &e.entropy {
        out.push(scalar_check(
            "entropy",
            ent.map(|x| x.entropy),
            s.value,
            s.tol.unwrap_or(tolerance),
        ));
    }
    if let Some(v) = &e.bipartition_commutes {
        for (i, (want, got)) in v.iter().zip(&r.algebra_check).enumerate() {
            out.push(equal_check(
                &format!("bipartition_commutes[{i}]"),
                got.ok().map(|x| x.commutes),
                *want,
            ));
        }
    }
    out
}
