//! JSON configurations and versioned reports for the command-line front end.

use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};

use crate::brake::{
    brake_morse_index, instability_parity, shear_morse_index, BrakeOptions, BrakeOrbitData, Check,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    act_on, CoefficientPath, ConstantCoefficients, FundamentalSolution,
    IntegratorOptions, SampledCoefficients,
};
use crate::index::{
    clm_index, hormander_index_both, rs_index, triple_form, triple_index_parts, ConstantPath, CrossingOptions,
    LagrangianPath,
};
use crate::linalg;
use crate::models::{
    hill_region, oscillator_brake_data, oscillator_brake_setup, oscillator_expected_index,
    oscillator_section_triple, seifert_system, H1Profile, OscillatorFamily, PotentialModel, SeifertModel,
    SyntheticSystem, ThrowingBall,
};
use crate::symplectic::{intersection_dim, LagrangianFrame, SymplecticSpace, DEFAULT_RANK_TOL};

pub const SCHEMA_VERSION: &str = "1";

/// A Lagrangian subspace in a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FrameSpec {
    /// `ℝⁿ x 0`.
    Dirichlet { n: usize },
    /// `0 x ℝⁿ`.
    Neumann { n: usize },
    /// The diagonal of the doubled space of `ℝ^{2n}`.
    Diagonal { n: usize },
    /// Explicit `2n x n` frame given by rows; `double` selects the doubled
    /// form.
    Matrix {
        rows: Vec<Vec<f64>>,
        #[serde(default)]
        double: bool,
    },
    /// Graph `{(x, A x)}` of a symmetric matrix.
    Graph { symmetric: Vec<Vec<f64>> },
    Product { left: Box<FrameSpec>, right: Box<FrameSpec> },
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    linalg::from_rows(rows, ncols).ok_or_else(|| Error::InvalidInput(format!("{what}: rows have unequal lengths")))
}

impl FrameSpec {
    pub fn build(&self, tol: f64) -> Result<LagrangianFrame> {
        let frame = match self {
            Self::Dirichlet { n } => LagrangianFrame::dirichlet(positive(*n, "n")?),
            Self::Neumann { n } => LagrangianFrame::neumann(positive(*n, "n")?),
            Self::Diagonal { n } => LagrangianFrame::diagonal(positive(*n, "n")?),
            Self::Matrix { rows, double } => {
                let z = matrix_from_rows(rows, "frame")?;
                if z.nrows() % 2 != 0 || z.nrows() == 0 {
                    return Err(Error::Dimension("frame must have an even, positive number of rows".into()));
                }
                let half = z.nrows() / 2;
                let space = if *double {
                    if half % 2 != 0 {
                        return Err(Error::Dimension("doubled frame must have 4m rows".into()));
                    }
                    SymplecticSpace::double(half / 2)
                } else {
                    SymplecticSpace::standard(half)
                };
                LagrangianFrame::new(space, z, tol)?
            }
            Self::Graph { symmetric } => LagrangianFrame::graph_of_symmetric(&matrix_from_rows(symmetric, "symmetric")?)?,
            Self::Product { left, right } => LagrangianFrame::product(&left.build(tol)?, &right.build(tol)?)?,
        };
        Ok(frame.with_tol(tol))
    }
}

fn positive(n: usize, what: &str) -> Result<usize> {
    if n == 0 {
        Err(Error::InvalidInput(format!("{what} must be positive")))
    } else {
        Ok(n)
    }
}

/// Coefficient paths: a named model or a sampled table `{"t": [...], "B": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Model(ModelSpec),
    Sampled(SampledSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `B = diag(1, 1, 1, μ²)`.
    Oscillator { mu: f64 },
    /// Reduced ballistic model in `n` degrees of freedom.
    Ball { n: usize },
    Seifert {
        n: usize,
        epsilon: f64,
        sigma: f64,
        h1: H1Profile,
    },
    Synthetic {
        system: SyntheticSystem,
        #[serde(default)]
        epsilon: Option<f64>,
    },
    Constant { b: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledSpec {
    pub t: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub mechanical: bool,
}

impl<'de> Deserialize<'de> for CoefficientSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        let nested = |e: serde_path_to_error::Error<serde_json::Error>| {
            serde::de::Error::custom(format!("at {}: {}", e.path(), e.inner()))
        };
        if value.get("model").is_some() {
            serde_path_to_error::deserialize(value).map(Self::Model).map_err(nested)
        } else {
            serde_path_to_error::deserialize(value).map(Self::Sampled).map_err(nested)
        }
    }
}

impl SampledSpec {
    pub fn build(&self) -> Result<SampledCoefficients> {
        let values = self
            .b
            .iter()
            .map(|rows| matrix_from_rows(rows, "B"))
            .collect::<Result<Vec<_>>>()?;
        let table = SampledCoefficients::new(self.t.clone(), values)?;
        if self.mechanical {
            table.into_mechanical()
        } else {
            Ok(table)
        }
    }
}

impl CoefficientSpec {
    pub fn build(&self) -> Result<Arc<dyn CoefficientPath>> {
        Ok(match self {
            Self::Sampled(s) => Arc::new(s.build()?),
            Self::Model(m) => match m {
                ModelSpec::Oscillator { mu } => {
                    if !(*mu > 0.0) {
                        return Err(Error::InvalidInput("mu must be positive".into()));
                    }
                    Arc::new(ConstantCoefficients::mechanical(crate::models::oscillator_hessian(*mu))?)
                }
                ModelSpec::Ball { n } => Arc::new(ThrowingBall::new(*n, 1.0)?.coefficients()),
                ModelSpec::Seifert { n, epsilon, sigma, h1 } => Arc::new(seifert_system(&SeifertModel {
                    n: *n,
                    epsilon: *epsilon,
                    sigma: *sigma,
                    h1: *h1,
                })?),
                ModelSpec::Synthetic { system, epsilon } => system.data(*epsilon)?.coefficients().clone(),
                ModelSpec::Constant { b } => Arc::new(ConstantCoefficients::new(matrix_from_rows(b, "b")?)?),
            },
        })
    }
}

/// Brake-orbit sources.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BrakeSpec {
    Oscillator {
        mu: f64,
        #[serde(default = "family_one")]
        family: OscillatorFamily,
        #[serde(default)]
        epsilon: Option<f64>,
    },
    Synthetic {
        system: SyntheticSystem,
        #[serde(default)]
        epsilon: Option<f64>,
        /// Overrides the natural period, e.g. a multiple of it.
        #[serde(default)]
        period: Option<f64>,
    },
    /// Tabulated `diag(I, K(t))` on `[0, period]`.
    Sampled {
        period: f64,
        epsilon: f64,
        t: Vec<f64>,
        #[serde(rename = "K")]
        k: Vec<Vec<Vec<f64>>>,
    },
}

fn family_one() -> OscillatorFamily {
    OscillatorFamily::I
}

impl BrakeSpec {
    pub fn build(&self) -> Result<BrakeOrbitData> {
        match self {
            Self::Oscillator { mu, family, epsilon } => oscillator_brake_data(*mu, *family, *epsilon),
            Self::Synthetic { system, epsilon, period } => {
                let base = system.data(*epsilon)?;
                match period {
                    Some(p) => BrakeOrbitData::new(*p, epsilon.unwrap_or(p / 100.0), base.coefficients().clone()),
                    None => Ok(base),
                }
            }
            Self::Sampled { period, epsilon, t, k } => {
                let hess = k.iter().map(|rows| matrix_from_rows(rows, "K")).collect::<Result<Vec<_>>>()?;
                let values = hess.iter().map(crate::hamiltonian::mechanical_block).collect();
                let table = SampledCoefficients::new(t.clone(), values)?.into_mechanical()?;
                BrakeOrbitData::new(*period, *epsilon, Arc::new(table))
            }
        }
    }
}

/// Numerical settings shared by all commands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Rank tolerance for frames and intersections.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degeneracy_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect_tol: Option<f64>,
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol", self.tol),
            ("time_tol", self.time_tol),
            ("degeneracy_tol", self.degeneracy_tol),
            ("defect_tol", self.defect_tol),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidInput(format!("tolerances.{name} must be positive")));
                }
            }
        }
        if self.grid == Some(0) {
            return Err(Error::InvalidInput("tolerances.grid must be positive".into()));
        }
        Ok(())
    }

    pub fn rank_tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_RANK_TOL)
    }

    pub fn crossing(&self) -> CrossingOptions {
        let mut o = CrossingOptions::default();
        if let Some(t) = self.tol {
            o.rank_tol = t;
        }
        if let Some(g) = self.grid {
            o.grid = g;
        }
        if let Some(t) = self.time_tol {
            o.time_tol = t;
        }
        if let Some(t) = self.degeneracy_tol {
            o.degeneracy_tol = t;
        }
        o
    }

    pub fn integrator(&self) -> IntegratorOptions {
        let mut o = IntegratorOptions::default();
        if let Some(t) = self.defect_tol {
            o.defect_tol = t;
        }
        o
    }
}

/// `ψ(t) start` against a fixed `reference` over `interval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowTask {
    pub coefficients: CoefficientSpec,
    pub interval: [f64; 2],
    pub start: FrameSpec,
    pub reference: FrameSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleTask {
    pub alpha: FrameSpec,
    pub beta: FrameSpec,
    pub gamma: FrameSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HormanderTask {
    pub lambda1: FrameSpec,
    pub lambda2: FrameSpec,
    pub mu1: FrameSpec,
    pub mu2: FrameSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrakeTask {
    pub system: BrakeSpec,
    /// Also evaluate the half-period doubling formula.
    #[serde(default)]
    pub shear: bool,
    /// Skip the decomposition and geometric-index cross-checks.
    #[serde(default)]
    pub fast: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorTask {
    pub mu: f64,
    #[serde(default = "unit")]
    pub e: f64,
    #[serde(default)]
    pub d0: f64,
    #[serde(default = "family_one")]
    pub family: OscillatorFamily,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HillTask {
    pub model: PotentialModel,
    pub k: f64,
}

fn unit() -> f64 {
    1.0
}

/// One command with its payload.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Task {
    /// `CLM(reference, ψ(t) start)`.
    Clm(FlowTask),
    /// `RS(ψ(t) start, reference)`.
    Rs(FlowTask),
    Triple(TripleTask),
    Hormander(HormanderTask),
    BrakeIndex(BrakeTask),
    Oscillator(OscillatorTask),
    Hill(HillTask),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Clm(_) => "clm",
            Self::Rs(_) => "rs",
            Self::Triple(_) => "triple",
            Self::Hormander(_) => "hormander",
            Self::BrakeIndex(_) => "brake-index",
            Self::Oscillator(_) => "oscillator",
            Self::Hill(_) => "hill",
        }
    }

    /// Builds the task named `command` from its JSON payload.
    pub fn from_value(command: &str, payload: Value) -> Result<Self> {
        Ok(match command {
            "clm" => Self::Clm(from_value_at(payload, "")?),
            "rs" => Self::Rs(from_value_at(payload, "")?),
            "triple" => Self::Triple(from_value_at(payload, "")?),
            "hormander" => Self::Hormander(from_value_at(payload, "")?),
            "brake-index" => Self::BrakeIndex(from_value_at(payload, "")?),
            "oscillator" => Self::Oscillator(from_value_at(payload, "")?),
            "hill" => Self::Hill(from_value_at(payload, "")?),
            other => return Err(Error::InvalidInput(format!("config field `command`: unknown command `{other}`"))),
        })
    }
}

fn from_value_at<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = match (prefix.is_empty(), path.as_str()) {
            (true, p) => p.to_string(),
            (false, ".") => prefix.to_string(),
            (false, p) => format!("{prefix}.{p}"),
        };
        Error::InvalidInput(format!("config field `{path}`: {}", e.inner()))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub task: Task,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            tolerances: Tolerances::default(),
            out: None,
        }
    }

    /// Parses JSON, reporting the path of the offending field on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config is not valid JSON: {e}")))?;
        let Value::Object(mut obj) = value else {
            return Err(Error::InvalidInput("config must be a JSON object".into()));
        };
        let tolerances: Tolerances = match obj.remove("tolerances") {
            Some(v) => from_value_at(v, "tolerances")?,
            None => Tolerances::default(),
        };
        tolerances.validate()?;
        let out = match obj.remove("out") {
            Some(v) => Some(from_value_at(v, "out")?),
            None => None,
        };
        let command = match obj.remove("command") {
            Some(Value::String(c)) => c,
            _ => return Err(Error::InvalidInput("config field `command`: missing or not a string".into())),
        };
        let task = Task::from_value(&command, Value::Object(obj))?;
        Ok(Self { task, tolerances, out })
    }
}

/// A versioned run report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub input: Value,
    pub result: Value,
    /// Internal identities verified during the run.
    pub checks: Vec<Check>,
    /// Comparisons against closed-form statements.
    pub claims: Vec<Check>,
}

impl Report {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialise")
}

/// Runs one configuration.
pub fn run(config: &RunConfig) -> Result<Report> {
    let tol = &config.tolerances;
    let mut checks = Vec::new();
    let mut claims = Vec::new();
    let result = match &config.task {
        Task::Clm(FlowTask {
            coefficients,
            interval,
            start,
            reference,
        })
        | Task::Rs(FlowTask {
            coefficients,
            interval,
            start,
            reference,
        }) => {
            let [a, b] = *interval;
            if !(b > a) {
                return Err(Error::InvalidInput("interval must satisfy a < b".into()));
            }
            let coeffs = coefficients.build()?;
            let psi = FundamentalSolution::integrate(coeffs, (a, b), &tol.integrator())?;
            let w = start.build(tol.rank_tol())?;
            let l0 = reference.build(tol.rank_tol())?;
            let path = act_on(&psi, &w)?;
            let opts = tol.crossing();
            let clm = clm_index(&path, &l0, &opts)?;
            let constant = ConstantPath::new(l0.clone(), (a, b));
            let rs = rs_index(&path, &constant, &opts)?;
            let h = |t: f64| -> Result<i64> {
                let frame = LagrangianFrame::new(w.space().clone(), path.frame(t), tol.rank_tol())?;
                Ok(intersection_dim(&frame, &l0, tol.rank_tol())? as i64)
            };
            let (ha, hb) = (h(a)?, h(b)?);
            checks.push(Check::new(
                "clm = rs - (h(b) - h(a))/2",
                2 * clm.value() == rs.index.twice() - (hb - ha),
                format!("clm {}, rs {}, h(a) {ha}, h(b) {hb}", clm.value(), rs.index),
            ));
            checks.push(Check::new(
                "crossing table reproduces the index",
                clm.recompute() == clm.index && rs.recompute() == rs.index,
                String::new(),
            ));
            checks.push(Check::new(
                "symplectic defect within tolerance",
                psi.stats().max_defect <= tol.integrator().defect_tol,
                format!("{:.3e}", psi.stats().max_defect),
            ));
            let primary = if config.task.name() == "clm" { &clm } else { &rs };
            json!({
                "index": primary.index,
                "convention": primary.convention,
                "crossings": primary.records,
                "clm": clm.index,
                "rs": rs.index,
                "integration": psi.stats(),
            })
        }
        Task::Triple(TripleTask { alpha, beta, gamma }) => {
            let (a, b, c) = (alpha.build(tol.rank_tol())?, beta.build(tol.rank_tol())?, gamma.build(tol.rank_tol())?);
            let parts = triple_index_parts(&a, &b, &c)?;
            let n = a.n();
            checks.push(Check::equal(
                "value = extended coindex of the reduced form",
                parts.value as i64,
                parts.extended_coindex() as i64,
            ));
            checks.push(Check::new(
                "value <= n - dim(a^b) - dim(b^c) + dim(a^b^c)",
                parts.value <= parts.upper_bound(n),
                format!("{} <= {}", parts.value, parts.upper_bound(n)),
            ));
            let forms = [triple_form(&a, &b, &c)?, triple_form(&b, &c, &a)?, triple_form(&c, &a, &b)?];
            checks.push(Check::new(
                "n+ Q is cyclically invariant",
                forms.iter().all(|f| f.coindex == parts.positive),
                format!("{:?}", forms.iter().map(|f| f.coindex).collect::<Vec<_>>()),
            ));
            json!({ "index": parts.value, "parts": parts })
        }
        Task::Hormander(HormanderTask { lambda1, lambda2, mu1, mu2 }) => {
            let r = tol.rank_tol();
            let (l1, l2, m1, m2) = (lambda1.build(r)?, lambda2.build(r)?, mu1.build(r)?, mu2.build(r)?);
            let (primary, alternative) = hormander_index_both(&l1, &l2, &m1, &m2)?;
            checks.push(Check::equal("both triple-index expressions agree", primary, alternative));
            let (swapped, _) = hormander_index_both(&m1, &m2, &l1, &l2)?;
            let mut correction = 0i64;
            for (j, l) in [&l1, &l2].into_iter().enumerate() {
                for (k, m) in [&m1, &m2].into_iter().enumerate() {
                    let sign = if (j + k) % 2 == 0 { -1 } else { 1 };
                    correction += sign * intersection_dim(l, m, r)? as i64;
                }
            }
            checks.push(Check::equal("swap identity with dimension correction", primary, -swapped + correction));
            let (anti, _) = hormander_index_both(&l1, &l2, &m2, &m1)?;
            checks.push(Check::equal("antisymmetry in (mu1, mu2)", primary, -anti));
            json!({ "index": primary, "alternative": alternative })
        }
        Task::BrakeIndex(BrakeTask { system, shear, fast }) => {
            let data = system.build()?;
            let opts = BrakeOptions {
                crossing: tol.crossing(),
                integrator: tol.integrator(),
                decomposition: !fast,
                oracle: !fast,
            };
            let breakdown = brake_morse_index(&data, &opts)?;
            let parity = instability_parity(&data, &BrakeOptions { decomposition: false, oracle: false, ..opts.clone() })?;
            checks.extend(breakdown.checks.iter().cloned());
            claims.extend(breakdown.claims.iter().cloned());
            claims.push(Check::new(
                "iMor + n = triple (mod 2)",
                parity.identity_holds,
                format!("{} + {} vs {}", parity.morse_index, parity.n, parity.triple),
            ));
            let shear_value = if *shear {
                let s = shear_morse_index(&data, &opts)?;
                checks.extend(s.checks.iter().cloned());
                claims.extend(s.claims.iter().cloned());
                Some(s)
            } else {
                None
            };
            json!({
                "total": breakdown.total,
                "period": data.period(),
                "epsilon": data.epsilon(),
                "n": data.n(),
                "breakdown": breakdown,
                "parity": parity,
                "shear_breakdown": shear_value,
            })
        }
        Task::Oscillator(OscillatorTask { mu, e, d0, family, epsilon }) => {
            let setup = oscillator_brake_setup(*mu, *e, *d0)?;
            let data = match epsilon {
                Some(_) => oscillator_brake_data(*mu, *family, *epsilon)?,
                None => setup.family(*family).clone(),
            };
            let opts = BrakeOptions {
                crossing: tol.crossing(),
                integrator: tol.integrator(),
                decomposition: true,
                oracle: true,
            };
            let breakdown = brake_morse_index(&data, &opts)?;
            let expected = oscillator_expected_index(*mu)?;
            let section_triple = oscillator_section_triple(*mu)?;
            checks.extend(breakdown.checks.iter().cloned());
            claims.extend(breakdown.claims.iter().cloned());
            if let Some(exact) = expected.exact_if_small_mu {
                if *family == OscillatorFamily::I {
                    claims.push(Check::equal("index = 2 for mu <= 1/2", breakdown.total, exact));
                }
            }
            if *family == OscillatorFamily::I {
                claims.push(Check::new(
                    "index >= 2 (1 + N)",
                    breakdown.total >= expected.lower_bound,
                    format!("{} vs {}", breakdown.total, expected.lower_bound),
                ));
            }
            json!({
                "total": breakdown.total,
                "family": family,
                "period": data.period(),
                "epsilon": data.epsilon(),
                "orbit": setup.orbit_plus,
                "expected": expected,
                "section_triple": section_triple,
                "warnings": setup.warnings,
                "breakdown": breakdown,
            })
        }
        Task::Hill(HillTask { model, k }) => {
            let region = hill_region(model, *k)?;
            let mut agree = true;
            for i in 0..400 {
                let a = 0.731 * i as f64;
                let r = 0.01 + 0.02 * i as f64;
                let q = [r * a.cos(), r * a.sin()];
                if (model.potential(&q) - k).abs() > 1e-9 {
                    agree &= region.contains(&q) == model.in_sublevel(&q, *k);
                }
            }
            checks.push(Check::new("descriptor agrees with V(q) <= k on samples", agree, String::new()));
            json!({ "region": region, "boundary": region.has_boundary() })
        }
    };
    Ok(Report {
        schema: SCHEMA_VERSION.into(),
        command: config.task.name().into(),
        input: to_value(config),
        result,
        checks,
        claims,
    })
}
