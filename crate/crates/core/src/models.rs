//! Closed-form model systems: Hill regions of the example potentials, the
//! ballistic model near a brake instant, the collar model in Seifert
//! coordinates, the anisotropic oscillator and a few synthetic reversible
//! systems used as oracles.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::brake::BrakeOrbitData;
use crate::error::{Error, Result};
use crate::hamiltonian::{mechanical_coefficients, CoefficientPath, ConstantCoefficients, FnCoefficients, SymplecticPath};
use crate::linalg;
use crate::symplectic::{intersection_dim, LagrangianFrame, DEFAULT_RANK_TOL};

/// The example potentials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialModel {
    /// `V(q) = -1/|q|^α` on `ℝ^d \ {0}`.
    HomogeneousSingular { alpha: f64 },
    /// `V(x, y) = -1/sqrt(ν² x² + y²)`.
    AnisotropicKepler { nu: f64 },
    /// `V(x, y) = (x² + μ² y²)/2`.
    AnisotropicOscillator { mu: f64 },
}

impl PotentialModel {
    /// Parameter checks; `strict` applies the catalog ranges `ν > 1`, `μ > 1`.
    pub fn validate(&self, strict: bool) -> Result<()> {
        let ok = match *self {
            Self::HomogeneousSingular { alpha } => alpha > 0.0,
            Self::AnisotropicKepler { nu } => nu > if strict { 1.0 } else { 0.0 },
            Self::AnisotropicOscillator { mu } => mu > if strict { 1.0 } else { 0.0 },
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("parameters out of range for {self:?}")))
        }
    }

    pub fn potential(&self, q: &[f64]) -> f64 {
        match *self {
            Self::HomogeneousSingular { alpha } => {
                let r = q.iter().map(|x| x * x).sum::<f64>().sqrt();
                -r.powf(-alpha)
            }
            Self::AnisotropicKepler { nu } => -1.0 / (nu * nu * q[0] * q[0] + q[1] * q[1]).sqrt(),
            Self::AnisotropicOscillator { mu } => 0.5 * (q[0] * q[0] + mu * mu * q[1] * q[1]),
        }
    }

    /// Whether `q` lies in `{V ≤ k}` by direct evaluation.
    pub fn in_sublevel(&self, q: &[f64], k: f64) -> bool {
        self.potential(q) <= k
    }
}

/// Shape of `{q : V(q) ≤ k}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum HillRegion {
    /// `|q| ≤ radius`, the centre being a collision point.
    Ball { radius: f64 },
    /// `(x/a)² + (y/b)² ≤ 1`.
    Ellipse { semi_axes: [f64; 2] },
    /// The whole configuration space; the boundary is empty.
    Whole,
    /// A single point.
    Point,
    Empty,
}

impl HillRegion {
    pub fn contains(&self, q: &[f64]) -> bool {
        let ellipse = |ax: [f64; 2]| (q[0] / ax[0]).powi(2) + (q[1] / ax[1]).powi(2);
        match *self {
            Self::Ball { radius } => q.iter().map(|x| x * x).sum::<f64>() <= radius * radius,
            Self::Ellipse { semi_axes } => ellipse(semi_axes) <= 1.0,
            Self::Whole => true,
            Self::Point => q.iter().all(|&x| x == 0.0),
            Self::Empty => false,
        }
    }

    pub fn has_boundary(&self) -> bool {
        !matches!(self, Self::Whole | Self::Empty)
    }
}

/// Hill region at energy `k`.
///
/// Attractive singular potentials are negative, so for `k ≥ 0` every
/// configuration is admissible; for `k < 0` motion is confined to a ball (or
/// ellipse) around the centre.
pub fn hill_region(model: &PotentialModel, k: f64) -> Result<HillRegion> {
    model.validate(false)?;
    if !k.is_finite() {
        return Err(Error::InvalidInput("energy must be finite".into()));
    }
    Ok(match *model {
        PotentialModel::HomogeneousSingular { alpha } => {
            if k >= 0.0 {
                HillRegion::Whole
            } else {
                HillRegion::Ball {
                    radius: (1.0 / k.abs()).powf(1.0 / alpha),
                }
            }
        }
        PotentialModel::AnisotropicKepler { nu } => {
            if k >= 0.0 {
                HillRegion::Whole
            } else {
                HillRegion::Ellipse {
                    semi_axes: [1.0 / (nu * k.abs()), 1.0 / k.abs()],
                }
            }
        }
        PotentialModel::AnisotropicOscillator { mu } => {
            if k < 0.0 {
                HillRegion::Empty
            } else if k == 0.0 {
                HillRegion::Point
            } else {
                let a = (2.0 * k).sqrt();
                HillRegion::Ellipse { semi_axes: [a, a / mu] }
            }
        }
    })
}

/// Vertical ballistic motion `y(t) = (t - ε/2)²/2` reaching the Hill boundary
/// at `ε/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThrowingBall {
    pub n: usize,
    pub epsilon: f64,
}

impl ThrowingBall {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("the ballistic model needs n >= 2".into()));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidInput("epsilon must be positive".into()));
        }
        Ok(Self { n, epsilon })
    }

    /// Dimension `n - 1` of the reduced (horizontal) system.
    pub fn reduced_n(&self) -> usize {
        self.n - 1
    }

    /// `y(t)`.
    pub fn height(&self, t: f64) -> f64 {
        0.5 * (t - 0.5 * self.epsilon).powi(2)
    }

    /// `B = diag(I, 0)`: free motion of the horizontal variations.  The
    /// vertical variation vanishes under the Dirichlet condition and is
    /// dropped.
    pub fn coefficients(&self) -> ConstantCoefficients {
        let m = self.reduced_n();
        ConstantCoefficients::mechanical(DMatrix::zeros(m, m)).expect("zero Hessian is symmetric")
    }

    /// `[[I, 0], [t I, I]]`.
    pub fn closed_form(&self, t: f64) -> DMatrix<f64> {
        let m = self.reduced_n();
        let mut psi = DMatrix::identity(2 * m, 2 * m);
        for i in 0..m {
            psi[(m + i, i)] = t;
        }
        psi
    }

    /// Boundary frame `[X; Y]` with `X = I`, `Y = -(ε/2) I`, transported onto
    /// `W_D` exactly at `ε/2`.
    pub fn boundary_frame(&self) -> LagrangianFrame {
        let m = self.reduced_n();
        let z = linalg::vstack(&DMatrix::identity(m, m), &(DMatrix::identity(m, m) * (-0.5 * self.epsilon)));
        LagrangianFrame::new(crate::symplectic::SymplecticSpace::standard(m), z, DEFAULT_RANK_TOL)
            .expect("graph of a symmetric matrix is Lagrangian")
    }
}

/// The ballistic model's coefficients and reference height function.
pub fn throwing_ball_system(n: usize, epsilon: f64) -> Result<(ConstantCoefficients, impl Fn(f64) -> f64)> {
    let ball = ThrowingBall::new(n, epsilon)?;
    Ok((ball.coefficients(), move |t| ball.height(t)))
}

/// Profiles of the collar coefficient `h1` along the reference orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum H1Profile {
    Constant { value: f64 },
    /// First-order collar expansion `1 + σ b ȳ(t)` with
    /// `ȳ(t) = (t - ε/2)²/(4σ²)`.
    Collar { b: f64 },
    /// `1 + amplitude cos(frequency t)`.
    Cosine { amplitude: f64, frequency: f64 },
}

/// Reduced Jacobi equation `(u' h1)' = 0` near a brake instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeifertModel {
    pub n: usize,
    pub epsilon: f64,
    pub sigma: f64,
    pub h1: H1Profile,
}

impl SeifertModel {
    pub fn h1(&self, t: f64) -> f64 {
        match self.h1 {
            H1Profile::Constant { value } => value,
            H1Profile::Collar { b } => {
                let ybar = (t - 0.5 * self.epsilon).powi(2) / (4.0 * self.sigma * self.sigma);
                1.0 + self.sigma * b * ybar
            }
            H1Profile::Cosine { amplitude, frequency } => 1.0 + amplitude * (frequency * t).cos(),
        }
    }

    /// `ȳ(t)`.
    pub fn reference_height(&self, t: f64) -> f64 {
        (t - 0.5 * self.epsilon).powi(2) / (4.0 * self.sigma * self.sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidInput("the collar model needs n >= 2".into()));
        }
        if !(self.epsilon > 0.0 && self.sigma > 0.0) {
            return Err(Error::InvalidInput("epsilon and sigma must be positive".into()));
        }
        let min = (0..=1000)
            .map(|i| self.h1(self.epsilon * i as f64 / 1000.0))
            .fold(f64::INFINITY, f64::min);
        let analytic_ok = match self.h1 {
            H1Profile::Constant { value } => value > 0.0,
            H1Profile::Collar { b } => 1.0 + b.min(0.0) * self.epsilon * self.epsilon / (16.0 * self.sigma) > 0.0,
            H1Profile::Cosine { amplitude, .. } => amplitude.abs() < 1.0 || min > 0.0,
        };
        if !(min > 0.0 && min.is_finite() && analytic_ok) {
            return Err(Error::InvalidInput(format!("h1 must stay positive on [0, eps] (min {min:.3e})")));
        }
        Ok(())
    }

    pub fn reduced_n(&self) -> usize {
        self.n - 1
    }

    /// Boundary frame `ψ(ε/2)⁻¹ W_D`, the Lagrangian hitting `W_D` exactly at
    /// the brake instant.
    pub fn boundary_frame(&self, psi: &dyn SymplecticPath) -> Result<LagrangianFrame> {
        let m = self.reduced_n();
        let inv = symplectic_inverse(&psi.matrix(0.5 * self.epsilon));
        LagrangianFrame::dirichlet(m).transformed(&inv)
    }
}

/// `B(t) = diag(I/h1(t), 0)` on `ℝ^{2(n-1)}`.
pub fn seifert_system(model: &SeifertModel) -> Result<FnCoefficients> {
    model.validate()?;
    let m = model.reduced_n();
    let model = *model;
    Ok(FnCoefficients::new(2 * m, move |t| {
        let mut b = DMatrix::zeros(2 * m, 2 * m);
        let w = 1.0 / model.h1(t);
        for i in 0..m {
            b[(i, i)] = w;
        }
        b
    }))
}

/// `M⁻¹ = -J Mᵀ J` for symplectic `M`.
pub fn symplectic_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() / 2;
    let j = crate::symplectic::SymplecticSpace::standard(n).j().clone();
    -(&j * m.transpose() * &j)
}

/// The two straight-line brake families of the anisotropic oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OscillatorFamily {
    /// Oscillation along the `x` axis, period `2π`.
    I,
    /// Oscillation along the `y` axis, period `2π/μ`.
    II,
}

impl OscillatorFamily {
    pub fn period(self, mu: f64) -> f64 {
        match self {
            Self::I => 2.0 * PI,
            Self::II => 2.0 * PI / mu,
        }
    }
}

/// `γ±(t) = (±c0 cos t, d0 cos μt)` with `c0 = sqrt(e² - μ² d0²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorOrbit {
    pub mu: f64,
    pub c0: f64,
    pub d0: f64,
    pub sign: f64,
}

impl OscillatorOrbit {
    pub fn position(&self, t: f64) -> [f64; 2] {
        [self.sign * self.c0 * t.cos(), self.d0 * (self.mu * t).cos()]
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        [-self.sign * self.c0 * t.sin(), -self.mu * self.d0 * (self.mu * t).sin()]
    }

    pub fn acceleration(&self, t: f64) -> [f64; 2] {
        let [x, y] = self.position(t);
        [-x, -self.mu * self.mu * y]
    }

    /// `|v|²/2 + V(q)`.
    pub fn energy(&self, t: f64) -> f64 {
        let [x, y] = self.position(t);
        let [u, v] = self.velocity(t);
        0.5 * (u * u + v * v) + 0.5 * (x * x + self.mu * self.mu * y * y)
    }
}

/// Oscillator data: closed-form orbits and the brake data of both families.
#[derive(Clone, Debug)]
pub struct OscillatorSetup {
    pub mu: f64,
    pub e: f64,
    pub d0: f64,
    pub orbit_plus: OscillatorOrbit,
    pub orbit_minus: OscillatorOrbit,
    pub family_i: BrakeOrbitData,
    pub family_ii: BrakeOrbitData,
    pub warnings: Vec<String>,
}

impl OscillatorSetup {
    pub fn family(&self, family: OscillatorFamily) -> &BrakeOrbitData {
        match family {
            OscillatorFamily::I => &self.family_i,
            OscillatorFamily::II => &self.family_ii,
        }
    }
}

/// `Hess V = diag(1, μ²)`.
pub fn oscillator_hessian(mu: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, mu * mu]))
}

/// The uncoupled blocks `H1 = J diag(1, 1)` and `H2 = J diag(1, μ²)` acting on
/// `(p_x, x)` and `(p_y, y)`.
pub fn oscillator_blocks(mu: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let block = |k2: f64| DMatrix::from_row_slice(2, 2, &[0.0, -k2, 1.0, 0.0]);
    (block(1.0), block(mu * mu))
}

/// Closed-form flow of `p' = -k² q, q' = p` on `(p, q)`.
pub fn rotation_block(k: f64, t: f64) -> DMatrix<f64> {
    let (s, c) = (k * t).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -k * s, s / k, c])
}

/// Closed-form `ψ(t)` of the oscillator in coordinates `(p_x, p_y, x, y)`.
pub fn oscillator_closed_form(mu: f64, t: f64) -> DMatrix<f64> {
    let mut psi = DMatrix::zeros(4, 4);
    for (i, k) in [1.0, mu].into_iter().enumerate() {
        let r = rotation_block(k, t);
        psi[(i, i)] = r[(0, 0)];
        psi[(i, 2 + i)] = r[(0, 1)];
        psi[(2 + i, i)] = r[(1, 0)];
        psi[(2 + i, 2 + i)] = r[(1, 1)];
    }
    psi
}

/// Instants `(2k + 1)π/(2μ)` in `(a, b)`.
pub fn oscillator_crossing_instants(mu: f64, (a, b): (f64, f64)) -> Vec<f64> {
    (0..)
        .map(|k| (2 * k + 1) as f64 * PI / (2.0 * mu))
        .take_while(|&t| t < b)
        .filter(|&t| t > a)
        .collect()
}

/// Whether `ε = (π/2)(1 + k/μ)` for some integer `k`.
pub fn oscillator_epsilon_is_degenerate(mu: f64, epsilon: f64) -> bool {
    let k = (2.0 * epsilon / PI - 1.0) * mu;
    (k - k.round()).abs() < 1e-9 * (1.0 + k.abs())
}

fn oscillator_partition_hits(mu: f64, period: f64, epsilon: f64) -> bool {
    [epsilon, 0.5 * period + epsilon]
        .into_iter()
        .any(|t| t.cos().abs() < 1e-6 || (mu * t).cos().abs() < 1e-6)
}

/// First of `T/100, T/97, T/89, ...` avoiding both the degenerate values and
/// crossings at `ε` and `T/2 + ε`.  A crossing at `T/2` does not depend on
/// `ε` and is left to the index pipeline to report.
pub fn oscillator_epsilon(mu: f64, family: OscillatorFamily) -> Result<f64> {
    let period = family.period(mu);
    for d in [100.0, 97.0, 89.0, 83.0, 79.0, 73.0, 71.0, 67.0, 61.0, 59.0] {
        let eps = period / d;
        if !oscillator_epsilon_is_degenerate(mu, eps) && !oscillator_partition_hits(mu, period, eps) {
            return Ok(eps);
        }
    }
    Err(Error::DegeneratePartition { t: period / 100.0 })
}

/// Brake data for one family with an optional explicit `ε`.
pub fn oscillator_brake_data(mu: f64, family: OscillatorFamily, epsilon: Option<f64>) -> Result<BrakeOrbitData> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidInput("mu must be positive".into()));
    }
    let period = family.period(mu);
    let eps = match epsilon {
        Some(eps) => {
            if oscillator_epsilon_is_degenerate(mu, eps) {
                return Err(Error::InvalidInput(format!(
                    "epsilon = {eps} is of the form (pi/2)(1 + k/mu); choose another value"
                )));
            }
            eps
        }
        None => oscillator_epsilon(mu, family)?,
    };
    let h = oscillator_hessian(mu);
    let coeffs = mechanical_coefficients(2, period, move |_| h.clone())?;
    BrakeOrbitData::new(period, eps, Arc::new(coeffs))
}

/// Validates `e`, `d0` and builds both families.
pub fn oscillator_brake_setup(mu: f64, e: f64, d0: f64) -> Result<OscillatorSetup> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::InvalidInput("e must be positive".into()));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidInput("mu must be positive".into()));
    }
    let disc = e * e - mu * mu * d0 * d0;
    if disc < -1e-12 * e * e {
        return Err(Error::InvalidInput("mu^2 d0^2 must not exceed e^2".into()));
    }
    let disc = disc.max(0.0);
    let mut warnings = Vec::new();
    if d0 != 0.0 && disc > 1e-12 * e * e && !is_small_rational(mu) {
        warnings.push(format!("mu = {mu} is not a small-denominator rational; the orbit with d0 = {d0} need not close"));
    }
    let c0 = disc.sqrt();
    let orbit = |sign| OscillatorOrbit { mu, c0, d0, sign };
    Ok(OscillatorSetup {
        mu,
        e,
        d0,
        orbit_plus: orbit(1.0),
        orbit_minus: orbit(-1.0),
        family_i: oscillator_brake_data(mu, OscillatorFamily::I, None)?,
        family_ii: oscillator_brake_data(mu, OscillatorFamily::II, None)?,
        warnings,
    })
}

fn is_small_rational(x: f64) -> bool {
    (1..=64).any(|q| {
        let p = x * q as f64;
        (p - p.round()).abs() < 1e-9 * q as f64
    })
}

/// Index values predicted for family (I) from the crossing count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedIndex {
    pub clm_half: i64,
    pub lower_bound: i64,
    pub exact_if_small_mu: Option<i64>,
}

/// `clm_half = 1 + #{k ≥ 1 : k < μ + 1/2}`.
pub fn oscillator_expected_index(mu: f64) -> Result<ExpectedIndex> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidInput("mu must be positive".into()));
    }
    let count = ((mu + 0.5).ceil() as i64 - 1).max(0);
    let clm_half = 1 + count;
    Ok(ExpectedIndex {
        clm_half,
        lower_bound: 2 * clm_half,
        exact_if_small_mu: (mu <= 0.5).then_some(2),
    })
}

/// The closing triple term with the argument order of the oscillator
/// discussion, `ι(Δ, L_N x L_D, Gr ψ(π))`, from the closed form.
pub fn oscillator_section_triple(mu: f64) -> Result<usize> {
    let graph = crate::symplectic::graph_frame(&oscillator_closed_form(mu, PI), DEFAULT_RANK_TOL)?;
    let beta = LagrangianFrame::product(&LagrangianFrame::neumann(2), &LagrangianFrame::dirichlet(2))?;
    crate::index::triple_index(&LagrangianFrame::diagonal(2), &beta, &graph)
}

/// Reversible synthetic systems with `B(t) = diag(I, K(t))`, where `K` is a
/// cosine series in `t - ε/2` so that both brake instants are symmetry
/// centres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticSystem {
    /// Two coupled degrees of freedom, positive potential Hessian.
    CoupledPair,
    /// Three degrees of freedom with a second harmonic.
    ThreeDof,
    /// Two degrees of freedom with one unstable direction.
    Saddle,
    /// `K = Q diag(1, 4, 9) Qᵀ`, `T = 2π`, so `ψ(T) = I`.
    PeriodicIdentity,
}

impl SyntheticSystem {
    pub const ALL: [Self; 4] = [Self::CoupledPair, Self::ThreeDof, Self::Saddle, Self::PeriodicIdentity];

    pub fn n(self) -> usize {
        match self {
            Self::CoupledPair | Self::Saddle => 2,
            Self::ThreeDof | Self::PeriodicIdentity => 3,
        }
    }

    pub fn period(self) -> f64 {
        2.0 * PI
    }

    fn harmonics(self) -> [DMatrix<f64>; 3] {
        let m = |n: usize, v: &[f64]| DMatrix::from_row_slice(n, n, v);
        match self {
            Self::CoupledPair => [m(2, &[2.0, 0.3, 0.3, 0.5]), m(2, &[0.4, 0.1, 0.1, 0.2]), DMatrix::zeros(2, 2)],
            Self::ThreeDof => [
                m(3, &[1.5, 0.2, 0.0, 0.2, 3.0, 0.4, 0.0, 0.4, 5.5]),
                m(3, &[0.3, 0.0, 0.1, 0.0, 0.5, 0.0, 0.1, 0.0, 0.2]),
                m(3, &[0.1, 0.05, 0.0, 0.05, -0.2, 0.0, 0.0, 0.0, 0.3]),
            ],
            Self::Saddle => [m(2, &[1.2, 0.2, 0.2, -0.3]), m(2, &[0.3, 0.0, 0.0, 0.1]), DMatrix::zeros(2, 2)],
            Self::PeriodicIdentity => {
                let q = givens(3, 0, 1, 0.4) * givens(3, 1, 2, -0.7) * givens(3, 0, 2, 1.1);
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0, 9.0]));
                [&q * d * q.transpose(), DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)]
            }
        }
    }

    /// Brake data with window `ε` (default `T/100`).
    pub fn data(self, epsilon: Option<f64>) -> Result<BrakeOrbitData> {
        let period = self.period();
        let eps = epsilon.unwrap_or(period / 100.0);
        let [k0, k1, k2] = self.harmonics();
        let w = 2.0 * PI / period;
        let coeffs = mechanical_coefficients(self.n(), period, move |t| {
            let s = w * (t - 0.5 * eps);
            &k0 + &k1 * s.cos() + &k2 * (2.0 * s).cos()
        })?;
        BrakeOrbitData::new(period, eps, Arc::new(coeffs))
    }
}

fn givens(n: usize, i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    g[(i, i)] = c;
    g[(j, j)] = c;
    g[(i, j)] = -s;
    g[(j, i)] = s;
    g
}

/// `dim(ψ(t) W ∩ L)`, convenient for locating crossings in tests.
pub fn moved_intersection_dim(psi: &DMatrix<f64>, w: &LagrangianFrame, l: &LagrangianFrame) -> Result<usize> {
    intersection_dim(&w.transformed(psi)?, l, DEFAULT_RANK_TOL)
}

/// `CoefficientPath` trait objects for the named models.
pub fn shared<C: CoefficientPath + 'static>(c: C) -> Arc<dyn CoefficientPath> {
    Arc::new(c)
}
