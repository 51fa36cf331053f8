//! Scenario files: the JSON schema and its validation into core objects.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use spinsep::spatial::{mode_wavefunction, projector};
use spinsep::states::{LocalizedFactor, SubspaceSpec, SuperpositionTerm};
use spinsep::{
    random, DensityMatrix, Operator, Parity, SpaceSpec, SpatialRegion, SpatialSpace, StateVector, SymmetryClass,
    Wavefunction, C64,
};

use crate::error::CliError;

/// `[re, im]`
pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub space: SpaceInput,
    pub parity: ParityInput,
    #[serde(default)]
    pub regions: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probe_regions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateInput>,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceInput {
    pub d_l: usize,
    pub d_h: usize,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityInput {
    Bose,
    Fermi,
}

impl From<ParityInput> for Parity {
    fn from(p: ParityInput) -> Parity {
        match p {
            ParityInput::Bose => Parity::Bose,
            ParityInput::Fermi => Parity::Fermi,
        }
    }
}

/// One localized factor `f ⊗ ξ`. The spatial part is either a basis `mode`
/// or explicit amplitudes `f`, optionally checked against a named `support`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Complex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<String>,
    pub xi: Vec<Complex>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermInput {
    pub first: FactorInput,
    pub second: FactorInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Complex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceKind {
    /// `l ⊗ h^∧n`
    #[serde(alias = "h1")]
    SharedMode,
    /// `l^⊙n ⊗ h^∧n`
    #[serde(alias = "h2")]
    SymmetricSpatial,
    /// `l^∧n ⊗ h^⊙n`
    #[serde(alias = "h3")]
    AntisymmetricSpatial,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateInput {
    Localized {
        factors: Vec<FactorInput>,
    },
    Superposition {
        terms: Vec<TermInput>,
    },
    RandomSuperposition {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        terms: usize,
        first_region: String,
        second_region: String,
    },
    Subspace {
        subspace: SubspaceKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode_amplitudes: Option<Vec<Complex>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spins: Option<Vec<Vec<Complex>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spatial: Option<Vec<Complex>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spin: Option<Vec<Complex>>,
    },
    Embed {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<Matrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target_state: Option<Vec<Complex>>,
        first_region: String,
        second_region: String,
    },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default)]
    pub reduction: bool,
    #[serde(default)]
    pub symmetry: bool,
    #[serde(default)]
    pub entanglement: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub algebra_check: Vec<PairInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap_sweep: Option<SweepInput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInput {
    pub p: String,
    pub q: String,
}

/// `f = e_{f_mode}` and `g = cos θ e_{g_mode} + sin θ e_{f_mode}` with `θ`
/// stepping from 0 (disjoint) to π/2 (identical). Each step probes the
/// supports of `f` and `g`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepInput {
    pub f_mode: usize,
    pub g_mode: usize,
    pub xi: Vec<Complex>,
    pub eta: Vec<Complex>,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    21
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryLabel {
    Antisymmetric,
    Symmetric,
    None,
}

impl std::fmt::Display for SymmetryLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SymmetryLabel::Antisymmetric => "antisymmetric",
            SymmetryLabel::Symmetric => "symmetric",
            SymmetryLabel::None => "none",
        })
    }
}

impl From<SymmetryClass> for SymmetryLabel {
    fn from(c: SymmetryClass) -> Self {
        match c {
            SymmetryClass::Antisymmetric => SymmetryLabel::Antisymmetric,
            SymmetryClass::Symmetric => SymmetryLabel::Symmetric,
            SymmetryClass::None => SymmetryLabel::None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixExpectation {
    pub matrix: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarExpectation {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// Declared outcomes checked by `suite` (and by `run`, when present).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// Un-normalized probe reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<MatrixExpectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<ScalarExpectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid_state: Option<bool>,
    /// Symmetry class of the probe reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryLabel>,
    /// Symmetry class after tracing out every spatial factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_symmetry: Option<SymmetryLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_symmetry: Option<SymmetryLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negativity: Option<ScalarExpectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<ScalarExpectation>,
    /// One entry per `algebra_check` pair, in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartition_commutes: Option<Vec<bool>>,
}

/// Reads and parses a scenario file. Parse failures name the offending field.
pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text).map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse(text: &str) -> Result<Scenario, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        if field == "." {
            e.inner().to_string()
        } else {
            format!("field `{field}`: {}", e.inner())
        }
    })
}

/// How the global state gets built once validation has succeeded.
#[derive(Clone, Debug)]
pub enum StatePlan {
    Localized(Vec<LocalizedFactor>),
    Superposition(Vec<SuperpositionTerm>),
    Subspace(SubspaceSpec),
    EmbedMixed {
        target: DensityMatrix,
        first: SpatialRegion,
        second: SpatialRegion,
    },
    EmbedPure {
        target: StateVector,
        first: SpatialRegion,
        second: SpatialRegion,
    },
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub f_mode: usize,
    pub g_mode: usize,
    pub xi: StateVector,
    pub eta: StateVector,
    pub steps: usize,
}

/// A validated scenario with every reference resolved.
#[derive(Clone, Debug)]
pub struct Plan {
    pub space: SpaceSpec,
    pub spatial: SpatialSpace,
    pub parity: Parity,
    pub probe: Vec<(String, SpatialRegion)>,
    pub state: Option<StatePlan>,
    pub algebra: Vec<(String, String, Operator, Operator)>,
    pub sweep: Option<SweepPlan>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn complex(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn complex_vec(v: &[Complex]) -> Vec<C64> {
    v.iter().copied().map(complex).collect()
}

fn spin_state(v: &[Complex], d_h: usize, field: &str) -> Result<StateVector, CliError> {
    if v.len() != d_h {
        return Err(invalid(format!(
            "{field}: expected {d_h} spin amplitudes, found {}",
            v.len()
        )));
    }
    StateVector::new(complex_vec(v)).map_err(|e| invalid(format!("{field}: {e}")))
}

fn check_vector_len(v: &[Complex], expected: usize, field: &str) -> Result<(), CliError> {
    if v.len() != expected {
        return Err(invalid(format!(
            "{field}: expected {expected} amplitudes, found {}",
            v.len()
        )));
    }
    Ok(())
}

struct Resolver {
    space: SpaceSpec,
    spatial: SpatialSpace,
    regions: BTreeMap<String, SpatialRegion>,
}

impl Resolver {
    fn region(&self, name: &str, field: &str) -> Result<SpatialRegion, CliError> {
        self.regions
            .get(name)
            .cloned()
            .ok_or_else(|| invalid(format!("{field}: unknown region `{name}`")))
    }

    fn factor(&self, f: &FactorInput, field: &str) -> Result<LocalizedFactor, CliError> {
        let d_l = self.space.d_l;
        let wave = match (f.mode, &f.f) {
            (Some(mode), None) => {
                let w = mode_wavefunction(mode, &self.spatial).map_err(|e| invalid(format!("{field}.mode: {e}")))?;
                if let Some(name) = &f.support {
                    let region = self.region(name, &format!("{field}.support"))?;
                    if !region.contains(mode) {
                        return Err(invalid(format!("{field}: mode {mode} lies outside region `{name}`")));
                    }
                }
                w
            }
            (None, Some(amps)) => {
                check_vector_len(amps, d_l, &format!("{field}.f"))?;
                let support = match &f.support {
                    Some(name) => Some(self.region(name, &format!("{field}.support"))?),
                    None => None,
                };
                Wavefunction::new(complex_vec(amps), support).map_err(|e| invalid(format!("{field}.f: {e}")))?
            }
            _ => return Err(invalid(format!("{field}: give exactly one of `mode` and `f`"))),
        };
        let xi = spin_state(&f.xi, self.space.d_h, &format!("{field}.xi"))?;
        LocalizedFactor::new(wave, xi).map_err(|e| invalid(format!("{field}.xi: {e}")))
    }

    fn require_pairs(&self, what: &str) -> Result<(), CliError> {
        if self.space.n != 2 {
            return Err(invalid(format!("{what} needs n = 2, found n = {}", self.space.n)));
        }
        Ok(())
    }

    fn state(&self, input: &StateInput) -> Result<StatePlan, CliError> {
        let SpaceSpec { d_l, d_h, n } = self.space;
        Ok(match input {
            StateInput::Localized { factors } => {
                if factors.len() != n {
                    return Err(invalid(format!(
                        "state.factors: expected {n} factors, found {}",
                        factors.len()
                    )));
                }
                let out = factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| self.factor(f, &format!("state.factors[{i}]")))
                    .collect::<Result<_, _>>()?;
                StatePlan::Localized(out)
            }
            StateInput::Superposition { terms } => {
                self.require_pairs("a superposition state")?;
                if terms.is_empty() {
                    return Err(invalid("state.terms: empty"));
                }
                let out = terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let first = self.factor(&t.first, &format!("state.terms[{i}].first"))?;
                        let second = self.factor(&t.second, &format!("state.terms[{i}].second"))?;
                        let w = t.weight.map_or(C64::new(1.0, 0.0), complex);
                        Ok(SuperpositionTerm::weighted(first, second, w))
                    })
                    .collect::<Result<_, CliError>>()?;
                StatePlan::Superposition(out)
            }
            StateInput::RandomSuperposition {
                seed,
                terms,
                first_region,
                second_region,
            } => {
                self.require_pairs("a superposition state")?;
                let seed = seed.ok_or_else(|| invalid("state.seed: random states need an explicit seed"))?;
                if *terms == 0 {
                    return Err(invalid("state.terms: need at least one term"));
                }
                let r1 = self.region(first_region, "state.first_region")?;
                let r2 = self.region(second_region, "state.second_region")?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let out = (0..*terms)
                    .map(|_| {
                        let first = LocalizedFactor::new(
                            random::wavefunction(&mut rng, &r1, &self.spatial),
                            random::state(&mut rng, d_h),
                        );
                        let second = LocalizedFactor::new(
                            random::wavefunction(&mut rng, &r2, &self.spatial),
                            random::state(&mut rng, d_h),
                        );
                        let w = random::complex(&mut rng);
                        Ok(SuperpositionTerm::weighted(
                            first.map_err(|e| invalid(e.to_string()))?,
                            second.map_err(|e| invalid(e.to_string()))?,
                            w,
                        ))
                    })
                    .collect::<Result<_, CliError>>()?;
                StatePlan::Superposition(out)
            }
            StateInput::Subspace {
                subspace,
                mode_amplitudes,
                spins,
                spatial,
                spin,
            } => {
                let spin_len = d_h.pow(n as u32);
                let spatial_len = d_l.pow(n as u32);
                let spec = match subspace {
                    SubspaceKind::SharedMode => {
                        if spatial.is_some() || spin.is_some() {
                            return Err(invalid("state: shared_mode takes `mode_amplitudes` and `spins`"));
                        }
                        let amps = mode_amplitudes
                            .as_ref()
                            .ok_or_else(|| invalid("state.mode_amplitudes: missing"))?;
                        check_vector_len(amps, d_l, "state.mode_amplitudes")?;
                        let spins = spins.as_ref().ok_or_else(|| invalid("state.spins: missing"))?;
                        if spins.len() != d_l {
                            return Err(invalid(format!(
                                "state.spins: expected {d_l} spin parts, found {}",
                                spins.len()
                            )));
                        }
                        let spins = spins
                            .iter()
                            .enumerate()
                            .map(|(i, s)| {
                                check_vector_len(s, spin_len, &format!("state.spins[{i}]"))?;
                                StateVector::new(complex_vec(s)).map_err(|e| invalid(format!("state.spins[{i}]: {e}")))
                            })
                            .collect::<Result<_, _>>()?;
                        SubspaceSpec::SharedMode {
                            mode_amplitudes: complex_vec(amps),
                            spins,
                        }
                    }
                    kind => {
                        if mode_amplitudes.is_some() || spins.is_some() {
                            return Err(invalid("state: this subspace takes `spatial` and `spin`"));
                        }
                        let sp = spatial.as_ref().ok_or_else(|| invalid("state.spatial: missing"))?;
                        let sn = spin.as_ref().ok_or_else(|| invalid("state.spin: missing"))?;
                        check_vector_len(sp, spatial_len, "state.spatial")?;
                        check_vector_len(sn, spin_len, "state.spin")?;
                        let spatial =
                            StateVector::new(complex_vec(sp)).map_err(|e| invalid(format!("state.spatial: {e}")))?;
                        let spin =
                            StateVector::new(complex_vec(sn)).map_err(|e| invalid(format!("state.spin: {e}")))?;
                        if *kind == SubspaceKind::SymmetricSpatial {
                            SubspaceSpec::SymmetricSpatial { spatial, spin }
                        } else {
                            SubspaceSpec::AntisymmetricSpatial { spatial, spin }
                        }
                    }
                };
                StatePlan::Subspace(spec)
            }
            StateInput::Embed {
                target,
                target_state,
                first_region,
                second_region,
            } => {
                self.require_pairs("an embedding")?;
                let first = self.region(first_region, "state.first_region")?;
                let second = self.region(second_region, "state.second_region")?;
                let dim = d_h * d_h;
                match (target, target_state) {
                    (Some(m), None) => {
                        if m.len() != dim || m.iter().any(|row| row.len() != dim) {
                            return Err(invalid(format!("state.target: expected a {dim}x{dim} matrix")));
                        }
                        let rows: Vec<Vec<C64>> = m.iter().map(|r| complex_vec(r)).collect();
                        let op = Operator::from_rows(&rows).map_err(|e| invalid(format!("state.target: {e}")))?;
                        let target = DensityMatrix::new(op).map_err(|e| invalid(format!("state.target: {e}")))?;
                        StatePlan::EmbedMixed { target, first, second }
                    }
                    (None, Some(v)) => {
                        check_vector_len(v, dim, "state.target_state")?;
                        let target = StateVector::new(complex_vec(v))
                            .map_err(|e| invalid(format!("state.target_state: {e}")))?;
                        StatePlan::EmbedPure { target, first, second }
                    }
                    _ => return Err(invalid("state: give exactly one of `target` and `target_state`")),
                }
            }
        })
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Checks every cross reference and dimension and resolves the scenario.
pub fn validate(scenario: &Scenario) -> Result<Plan, CliError> {
    if !valid_name(&scenario.name) {
        return Err(invalid(format!(
            "name: `{}` must be nonempty and use only letters, digits, `_` and `-`",
            scenario.name
        )));
    }
    let SpaceInput { d_l, d_h, n } = scenario.space;
    let space = SpaceSpec::new(d_l, d_h, n).map_err(|e| invalid(format!("space: {e}")))?;
    let spatial = SpatialSpace::new(d_l).map_err(|e| invalid(format!("space.d_l: {e}")))?;
    let regions = scenario
        .regions
        .iter()
        .map(|(name, modes)| {
            if modes.is_empty() {
                return Err(invalid(format!("regions.{name}: empty region")));
            }
            SpatialRegion::new(modes.iter().copied(), &spatial)
                .map(|r| (name.clone(), r))
                .map_err(|e| invalid(format!("regions.{name}: {e}")))
        })
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    let resolver = Resolver {
        space,
        spatial,
        regions,
    };

    let probe = scenario
        .probe_regions
        .iter()
        .enumerate()
        .map(|(i, name)| Ok((name.clone(), resolver.region(name, &format!("probe_regions[{i}]"))?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let a = &scenario.analyses;
    if (a.reduction || a.entanglement) && probe.len() != n {
        return Err(invalid(format!(
            "probe_regions: the reduction needs {n} regions, found {}",
            probe.len()
        )));
    }
    if a.entanglement && !a.reduction {
        return Err(invalid("analyses.entanglement: requires analyses.reduction"));
    }
    if a.entanglement {
        resolver.require_pairs("analyses.entanglement")?;
    }

    let state = match &scenario.state {
        Some(s) => Some(resolver.state(s)?),
        None => None,
    };
    if state.is_none() && (a.reduction || a.symmetry || a.entanglement) {
        return Err(invalid("state: the requested analyses need a state"));
    }

    let algebra = a
        .algebra_check
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            let p = resolver.region(&pair.p, &format!("analyses.algebra_check[{i}].p"))?;
            let q = resolver.region(&pair.q, &format!("analyses.algebra_check[{i}].q"))?;
            let to_op = |r: &SpatialRegion| projector(r, &spatial).map_err(|e| invalid(e.to_string()));
            Ok((pair.p.clone(), pair.q.clone(), to_op(&p)?, to_op(&q)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let sweep = match &a.overlap_sweep {
        Some(s) => {
            resolver.require_pairs("analyses.overlap_sweep")?;
            for (field, mode) in [("f_mode", s.f_mode), ("g_mode", s.g_mode)] {
                if mode >= d_l {
                    return Err(invalid(format!(
                        "analyses.overlap_sweep.{field}: mode {mode} out of range 0..{d_l}"
                    )));
                }
            }
            if s.f_mode == s.g_mode {
                return Err(invalid("analyses.overlap_sweep: f_mode and g_mode must differ"));
            }
            if s.steps < 2 {
                return Err(invalid("analyses.overlap_sweep.steps: need at least 2"));
            }
            Some(SweepPlan {
                f_mode: s.f_mode,
                g_mode: s.g_mode,
                xi: spin_state(&s.xi, d_h, "analyses.overlap_sweep.xi")?,
                eta: spin_state(&s.eta, d_h, "analyses.overlap_sweep.eta")?,
                steps: s.steps,
            })
        }
        None => None,
    };

    if let Some(e) = &scenario.expect {
        validate_expectations(e, a, &space, algebra.len())?;
    }

    Ok(Plan {
        space,
        spatial,
        parity: scenario.parity.into(),
        probe,
        state,
        algebra,
        sweep,
    })
}

fn validate_expectations(e: &Expectations, a: &Analyses, space: &SpaceSpec, pairs: usize) -> Result<(), CliError> {
    let needs = |present: bool, enabled: bool, field: &str, analysis: &str| {
        if present && !enabled {
            Err(invalid(format!("expect.{field}: requires analyses.{analysis}")))
        } else {
            Ok(())
        }
    };
    needs(e.reduced.is_some(), a.reduction, "reduced", "reduction")?;
    needs(e.trace.is_some(), a.reduction, "trace", "reduction")?;
    needs(e.valid_state.is_some(), a.reduction, "valid_state", "reduction")?;
    needs(e.symmetry.is_some(), a.reduction, "symmetry", "reduction")?;
    needs(e.spin_symmetry.is_some(), a.symmetry, "spin_symmetry", "symmetry")?;
    needs(e.global_symmetry.is_some(), a.symmetry, "global_symmetry", "symmetry")?;
    needs(e.separable.is_some(), a.entanglement, "separable", "entanglement")?;
    needs(e.negativity.is_some(), a.entanglement, "negativity", "entanglement")?;
    needs(e.entropy.is_some(), a.entanglement, "entropy", "entanglement")?;
    if let Some(m) = &e.reduced {
        let dim = space.spin_dim();
        if m.matrix.len() != dim || m.matrix.iter().any(|r| r.len() != dim) {
            return Err(invalid(format!("expect.reduced.matrix: expected a {dim}x{dim} matrix")));
        }
    }
    if let Some(v) = &e.bipartition_commutes {
        if v.len() != pairs {
            return Err(invalid(format!(
                "expect.bipartition_commutes: {} entries for {pairs} algebra_check pairs",
                v.len()
            )));
        }
    }
    Ok(())
}
