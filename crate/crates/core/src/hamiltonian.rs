//! Linear Hamiltonian systems `z' = J B(t) z` and their fundamental solutions.
//!
//! Integration uses the three-stage Gauss–Legendre collocation method: it is
//! of order six and symplectic, so the defect `Ψ^T J Ψ - J` only accumulates
//! round-off.  Steps are controlled by step doubling, never straddle a
//! declared breakpoint of `B`, and a first-order projection back to the
//! symplectic group is applied whenever the defect exceeds a tenth of the
//! target.  Values between accepted steps are obtained by one more collocation
//! step from the nearest node on the left, so dense output has the accuracy of
//! the integrator itself.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::LagrangianPath;
use crate::linalg;
use crate::symplectic::{LagrangianFrame, SymplecticSpace};

/// `t ↦ B(t)`, symmetric `2n x 2n`.
pub trait CoefficientPath: Send + Sync {
    /// Dimension `2n` of the phase space.
    fn dim(&self) -> usize;

    fn eval(&self, t: f64) -> DMatrix<f64>;

    /// Instants where `B` may fail to be smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Set for `B = diag(I, Hess V)` coming from a mechanical Lagrangian.
    fn is_mechanical(&self) -> bool {
        false
    }
}

/// Constant `B`.
#[derive(Clone, Debug)]
pub struct ConstantCoefficients {
    b: DMatrix<f64>,
    mechanical: bool,
}

impl ConstantCoefficients {
    pub fn new(b: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&b, 0.0)?;
        Ok(Self { b, mechanical: false })
    }

    pub fn mechanical(hessian: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&hessian, 0.0)?;
        Ok(Self {
            b: mechanical_block(&hessian),
            mechanical: true,
        })
    }
}

impl CoefficientPath for ConstantCoefficients {
    fn dim(&self) -> usize {
        self.b.nrows()
    }
    fn eval(&self, _t: f64) -> DMatrix<f64> {
        self.b.clone()
    }
    fn is_mechanical(&self) -> bool {
        self.mechanical
    }
}

type CoefficientFn = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// `B` given by a closure.
#[derive(Clone)]
pub struct FnCoefficients {
    dim: usize,
    f: CoefficientFn,
    breakpoints: Vec<f64>,
    mechanical: bool,
}

impl FnCoefficients {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            f: Arc::new(f),
            breakpoints: Vec::new(),
            mechanical: false,
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }
}

impl CoefficientPath for FnCoefficients {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: f64) -> DMatrix<f64> {
        (self.f)(t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
    fn is_mechanical(&self) -> bool {
        self.mechanical
    }
}

/// Piecewise-linear interpolation of sampled matrices; constant beyond the
/// sampled range.
#[derive(Clone, Debug)]
pub struct SampledCoefficients {
    times: Vec<f64>,
    values: Vec<DMatrix<f64>>,
    mechanical: bool,
}

impl SampledCoefficients {
    pub fn new(times: Vec<f64>, values: Vec<DMatrix<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidInput("sample times and matrices must match and be non-empty".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sample times must increase strictly".into()));
        }
        let dim = values[0].nrows();
        if !dim.is_multiple_of(2) {
            return Err(Error::Dimension("coefficient matrices must have even size".into()));
        }
        for v in &values {
            if v.shape() != (dim, dim) {
                return Err(Error::Dimension("coefficient matrices differ in size".into()));
            }
            check_symmetric(v, 1e-12)?;
        }
        Ok(Self {
            times,
            values,
            mechanical: false,
        })
    }

    /// Marks the table as mechanical after checking every sample has the
    /// form `diag(I, K)`.
    pub fn into_mechanical(mut self) -> Result<Self> {
        let n = self.values[0].nrows() / 2;
        for v in &self.values {
            let expected = mechanical_block(&v.view((n, n), (n, n)).into_owned());
            let defect = linalg::max_abs(&(v - expected));
            if defect > 1e-12 * (1.0 + linalg::max_abs(v)) {
                return Err(Error::Hypothesis(format!("sample is not of the form diag(I, K) (defect {defect:.3e})")));
            }
        }
        self.mechanical = true;
        Ok(self)
    }
}

impl CoefficientPath for SampledCoefficients {
    fn dim(&self) -> usize {
        self.values[0].nrows()
    }
    fn eval(&self, t: f64) -> DMatrix<f64> {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0].clone();
        }
        if k == self.times.len() {
            return self.values[k - 1].clone();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        &self.values[k - 1] * (1.0 - w) + &self.values[k] * w
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.times.clone()
    }
    fn is_mechanical(&self) -> bool {
        self.mechanical
    }
}

fn check_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension("coefficient matrix must be square".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("coefficient matrix has non-finite entries".into()));
    }
    let asym = linalg::max_abs(&(m - m.transpose()));
    if asym > tol * (1.0 + linalg::max_abs(m)) {
        return Err(Error::InvalidInput(format!("matrix is not symmetric (defect {asym:.3e})")));
    }
    Ok(())
}

/// `diag(I, K)`.
pub fn mechanical_block(hessian: &DMatrix<f64>) -> DMatrix<f64> {
    let n = hessian.nrows();
    linalg::block_diag(&DMatrix::identity(n, n), hessian)
}

/// Coefficients `B(t) = diag(I, Hess V(t))` of the linearised mechanical flow
/// on `[0, period]`.  Hessian samples at 64 instants are checked for symmetry.
pub fn mechanical_coefficients<F>(n: usize, period: f64, hessian: F) -> Result<FnCoefficients>
where
    F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
{
    if !(period > 0.0) {
        return Err(Error::InvalidInput("period must be positive".into()));
    }
    for i in 0..=64 {
        let h = hessian(period * i as f64 / 64.0);
        if h.shape() != (n, n) {
            return Err(Error::Dimension(format!("Hessian must be {n} x {n}")));
        }
        check_symmetric(&h, 1e-12)?;
    }
    let mut c = FnCoefficients::new(2 * n, move |t| mechanical_block(&hessian(t)));
    c.mechanical = true;
    Ok(c)
}

/// `max |B(c + s) - B(c - s)|` over `samples` values of `s ∈ (0, period/2]`,
/// arguments reduced modulo the period into `[0, period)`.
pub fn reflection_defect(b: &dyn CoefficientPath, centre: f64, period: f64, samples: usize) -> f64 {
    let wrap = |t: f64| t.rem_euclid(period);
    (1..=samples)
        .map(|i| {
            let s = 0.5 * period * i as f64 / samples as f64;
            linalg::max_abs(&(b.eval(wrap(centre + s)) - b.eval(wrap(centre - s))))
        })
        .fold(0.0, f64::max)
}

/// A `C^1` path of symplectic matrices.
pub trait SymplecticPath: Sync {
    fn interval(&self) -> (f64, f64);
    fn matrix(&self, t: f64) -> DMatrix<f64>;
    fn derivative(&self, t: f64) -> DMatrix<f64>;
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorOptions {
    /// Target for `max_t |Ψ^T J Ψ - J|`.
    pub defect_tol: f64,
    /// Local error per step relative to `max(1, |Ψ|)`.
    pub local_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            defect_tol: 1e-9,
            local_tol: 1e-12,
            max_steps: 500_000,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub steps: usize,
    pub rejected: usize,
    pub reprojections: usize,
    pub max_defect: f64,
}

const SQRT15: f64 = 3.872_983_346_207_417;

struct Tableau {
    c: [f64; 3],
    a: [[f64; 3]; 3],
    b: [f64; 3],
}

const GAUSS3: Tableau = Tableau {
    c: [0.5 - SQRT15 / 10.0, 0.5, 0.5 + SQRT15 / 10.0],
    a: [
        [5.0 / 36.0, 2.0 / 9.0 - SQRT15 / 15.0, 5.0 / 36.0 - SQRT15 / 30.0],
        [5.0 / 36.0 + SQRT15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - SQRT15 / 24.0],
        [5.0 / 36.0 + SQRT15 / 30.0, 2.0 / 9.0 + SQRT15 / 15.0, 5.0 / 36.0],
    ],
    b: [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
};

/// One Gauss–Legendre step for `Ψ' = J B(t) Ψ`; the stage equations are
/// linear and solved as a single block system.
fn collocation_step(b: &dyn CoefficientPath, j: &DMatrix<f64>, t: f64, h: f64, psi: &DMatrix<f64>) -> DMatrix<f64> {
    let m = psi.nrows();
    let gens: Vec<DMatrix<f64>> = GAUSS3.c.iter().map(|c| j * b.eval(t + c * h)).collect();
    let mut sys = DMatrix::<f64>::identity(3 * m, 3 * m);
    let mut rhs = DMatrix::zeros(3 * m, psi.ncols());
    for (i, g) in gens.iter().enumerate() {
        for k in 0..3 {
            let block = g * (-h * GAUSS3.a[i][k]);
            let mut view = sys.view_mut((i * m, k * m), (m, m));
            view += block;
        }
        rhs.view_mut((i * m, 0), (m, psi.ncols())).copy_from(&(g * psi));
    }
    let stages = sys
        .lu()
        .solve(&rhs)
        .expect("collocation system is nonsingular for admissible steps");
    let mut out = psi.clone();
    for i in 0..3 {
        out += stages.view((i * m, 0), (m, psi.ncols())) * (h * GAUSS3.b[i]);
    }
    out
}

/// `Ψ ← Ψ (I + ½ J E)`, `E = Ψ^T J Ψ - J`: removes the defect to first order.
fn reproject(psi: &mut DMatrix<f64>, j: &DMatrix<f64>) {
    let e = psi.transpose() * j * &*psi - j;
    let m = psi.nrows();
    let correction = DMatrix::<f64>::identity(m, m) + j * e * 0.5;
    *psi = &*psi * correction;
}

/// Fundamental solution `Ψ(t)` with `Ψ(a) = I` on `[a, b]`.
pub struct FundamentalSolution {
    coeffs: Arc<dyn CoefficientPath>,
    space: SymplecticSpace,
    interval: (f64, f64),
    times: Vec<f64>,
    nodes: Vec<DMatrix<f64>>,
    stats: IntegrationStats,
}

impl FundamentalSolution {
    pub fn integrate(coeffs: Arc<dyn CoefficientPath>, interval: (f64, f64), opts: &IntegratorOptions) -> Result<Self> {
        let (a, b) = interval;
        if !(b >= a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!("bad interval [{a}, {b}]")));
        }
        if !(opts.defect_tol > 0.0 && opts.local_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        let dim = coeffs.dim();
        if !dim.is_multiple_of(2) || dim == 0 {
            return Err(Error::Dimension("phase space dimension must be even and positive".into()));
        }
        let space = SymplecticSpace::standard(dim / 2);
        let j = space.j().clone();
        let mut stats = IntegrationStats::default();
        let mut times = vec![a];
        let mut nodes = vec![DMatrix::identity(dim, dim)];

        let mut targets: Vec<f64> = coeffs
            .breakpoints()
            .into_iter()
            .filter(|&s| s > a && s < b)
            .collect();
        targets.sort_by(f64::total_cmp);
        targets.push(b);

        let len = b - a;
        let min_step = 1e-14 * len.max(1.0);
        let mut h = (len / 16.0).min(0.1).max(min_step);
        let mut t = a;
        let mut psi = DMatrix::<f64>::identity(dim, dim);
        for target in targets {
            while target - t > 1e-15 * len.max(1.0) {
                if stats.steps + stats.rejected >= opts.max_steps {
                    return Err(Error::StepUnderflow { t });
                }
                let hs = h.min(target - t);
                let full = collocation_step(coeffs.as_ref(), &j, t, hs, &psi);
                let mid = collocation_step(coeffs.as_ref(), &j, t, 0.5 * hs, &psi);
                let fine = collocation_step(coeffs.as_ref(), &j, t + 0.5 * hs, 0.5 * hs, &mid);
                let scale = linalg::max_abs(&fine).max(1.0);
                let err = linalg::max_abs(&(&full - &fine)) / 63.0;
                let allowed = opts.local_tol * scale;
                let factor = if err == 0.0 {
                    4.0
                } else {
                    (0.9 * (allowed / err).powf(1.0 / 7.0)).clamp(0.2, 4.0)
                };
                if err <= allowed {
                    t = if target - (t + hs) <= 1e-15 * len.max(1.0) { target } else { t + hs };
                    psi = fine;
                    if space.symplectic_defect(&psi) > 0.1 * opts.defect_tol {
                        reproject(&mut psi, &j);
                        stats.reprojections += 1;
                    }
                    times.push(t);
                    nodes.push(psi.clone());
                    stats.steps += 1;
                    h = hs * factor;
                } else {
                    stats.rejected += 1;
                    h = hs * factor;
                    if h < min_step {
                        return Err(Error::StepUnderflow { t });
                    }
                }
            }
        }
        stats.max_defect = nodes.iter().map(|p| space.symplectic_defect(p)).fold(0.0, f64::max);
        if stats.max_defect > opts.defect_tol {
            return Err(Error::DefectUnreachable {
                target: opts.defect_tol,
                achieved: stats.max_defect,
            });
        }
        Ok(Self {
            coeffs,
            space,
            interval,
            times,
            nodes,
            stats,
        })
    }

    pub fn stats(&self) -> &IntegrationStats {
        &self.stats
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn coefficients(&self) -> &Arc<dyn CoefficientPath> {
        &self.coeffs
    }

    /// `Ψ(t)`; instants outside the interval are reached by one step from the
    /// nearest end.
    pub fn at(&self, t: f64) -> DMatrix<f64> {
        let k = self.times.partition_point(|&s| s <= t);
        let k = k.max(1) - 1;
        let t0 = self.times[k];
        if t == t0 {
            return self.nodes[k].clone();
        }
        collocation_step(self.coeffs.as_ref(), self.space.j(), t0, t - t0, &self.nodes[k])
    }

    /// `Ψ'(t) = J B(t) Ψ(t)`.
    pub fn derivative_at(&self, t: f64) -> DMatrix<f64> {
        self.space.j() * self.coeffs.eval(t) * self.at(t)
    }

    /// Largest defect over `samples` equally spaced instants (plus nodes).
    pub fn sampled_defect(&self, samples: usize) -> f64 {
        let (a, b) = self.interval;
        (0..=samples)
            .map(|i| self.space.symplectic_defect(&self.at(a + (b - a) * i as f64 / samples.max(1) as f64)))
            .fold(self.stats.max_defect, f64::max)
    }
}

impl SymplecticPath for FundamentalSolution {
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn matrix(&self, t: f64) -> DMatrix<f64> {
        self.at(t)
    }
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        self.derivative_at(t)
    }
}

/// Convenience wrapper around [`FundamentalSolution::integrate`].
pub fn fundamental_solution<C: CoefficientPath + 'static>(
    coeffs: C,
    interval: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<FundamentalSolution> {
    FundamentalSolution::integrate(Arc::new(coeffs), interval, opts)
}

/// `t ↦ Ψ(t) W`.
pub struct FlowPath<'a> {
    psi: &'a dyn SymplecticPath,
    w: DMatrix<f64>,
    space: SymplecticSpace,
    interval: (f64, f64),
}

impl<'a> FlowPath<'a> {
    pub fn on(mut self, a: f64, b: f64) -> Self {
        self.interval = (a, b);
        self
    }
}

pub fn act_on<'a>(psi: &'a dyn SymplecticPath, w: &LagrangianFrame) -> Result<FlowPath<'a>> {
    let interval = psi.interval();
    if psi.matrix(interval.0).nrows() != w.space().dim() {
        return Err(Error::Dimension("frame and symplectic path disagree".into()));
    }
    Ok(FlowPath {
        psi,
        w: w.basis().clone(),
        space: w.space().clone(),
        interval,
    })
}

impl LagrangianPath for FlowPath<'_> {
    fn space(&self) -> &SymplecticSpace {
        &self.space
    }
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn frame(&self, t: f64) -> DMatrix<f64> {
        self.psi.matrix(t) * &self.w
    }
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        self.psi.derivative(t) * &self.w
    }
}

/// `t ↦ Gr Ψ(t)` in the doubled space.
pub struct GraphPath<'a> {
    psi: &'a dyn SymplecticPath,
    space: SymplecticSpace,
    interval: (f64, f64),
}

impl<'a> GraphPath<'a> {
    pub fn on(mut self, a: f64, b: f64) -> Self {
        self.interval = (a, b);
        self
    }
}

pub fn graph_path(psi: &dyn SymplecticPath) -> GraphPath<'_> {
    let interval = psi.interval();
    let dim = psi.matrix(interval.0).nrows();
    GraphPath {
        psi,
        space: SymplecticSpace::double(dim / 2),
        interval,
    }
}

impl LagrangianPath for GraphPath<'_> {
    fn space(&self) -> &SymplecticSpace {
        &self.space
    }
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn frame(&self, t: f64) -> DMatrix<f64> {
        let m = self.psi.matrix(t);
        linalg::vstack(&DMatrix::identity(m.nrows(), m.ncols()), &m)
    }
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        let d = self.psi.derivative(t);
        linalg::vstack(&DMatrix::zeros(d.nrows(), d.ncols()), &d)
    }
}

/// A symplectic path given by closures, mainly for tests and synthetic data.
pub struct FnSymplecticPath {
    interval: (f64, f64),
    matrix: Box<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>,
    derivative: Box<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>,
}

impl FnSymplecticPath {
    pub fn new<M, D>(interval: (f64, f64), matrix: M, derivative: D) -> Self
    where
        M: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
        D: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            interval,
            matrix: Box::new(matrix),
            derivative: Box::new(derivative),
        }
    }
}

impl SymplecticPath for FnSymplecticPath {
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn matrix(&self, t: f64) -> DMatrix<f64> {
        (self.matrix)(t)
    }
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        (self.derivative)(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::intersection_dim;
    use proptest::prelude::*;

    fn rotation(theta: f64) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
    }

    #[test]
    fn zero_coefficients_give_identity() {
        let psi = fundamental_solution(ConstantCoefficients::new(DMatrix::zeros(4, 4)).unwrap(), (0.0, 3.0), &IntegratorOptions::default()).unwrap();
        for t in [0.0, 0.7, 3.0] {
            assert!(linalg::max_abs(&(psi.at(t) - DMatrix::identity(4, 4))) < 1e-15);
        }
    }

    #[test]
    fn free_particle_is_unipotent() {
        // B = diag(1, 0): p' = 0, q' = p.
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let psi = fundamental_solution(ConstantCoefficients::new(b).unwrap(), (0.0, 2.0), &IntegratorOptions::default()).unwrap();
        for i in 0..=50 {
            let t = 2.0 * i as f64 / 50.0;
            let exact = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, t, 1.0]);
            assert!(linalg::max_abs(&(psi.at(t) - exact)) < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn unit_oscillator_is_a_rotation() {
        let psi = fundamental_solution(ConstantCoefficients::mechanical(DMatrix::identity(1, 1)).unwrap(), (0.0, 7.0), &IntegratorOptions::default()).unwrap();
        for i in 0..=70 {
            let t = 0.1 * i as f64;
            assert!(linalg::max_abs(&(psi.at(t) - rotation(t))) < 1e-10, "t = {t}");
        }
        assert!(psi.sampled_defect(100) < 1e-12);
    }

    #[test]
    fn breakpoints_are_respected() {
        // Piecewise constant stiffness; the exact flow composes rotations.
        let b = FnCoefficients::new(2, |t| mechanical_block(&DMatrix::from_element(1, 1, if t < 1.0 { 1.0 } else { 4.0 })))
            .with_breakpoints(vec![1.0]);
        let psi = fundamental_solution(b, (0.0, 2.0), &IntegratorOptions::default()).unwrap();
        let r2 = |t: f64| {
            let (s, c) = (2.0 * t).sin_cos();
            DMatrix::from_row_slice(2, 2, &[c, -2.0 * s, 0.5 * s, c])
        };
        let exact = r2(1.0) * rotation(1.0);
        assert!(linalg::max_abs(&(psi.at(2.0) - exact)) < 1e-10);
    }

    #[test]
    fn sampled_table_interpolates_linearly() {
        let s = SampledCoefficients::new(
            vec![0.0, 1.0],
            vec![DMatrix::zeros(2, 2), DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0])],
        )
        .unwrap();
        assert!((s.eval(0.25)[(1, 1)] - 1.0).abs() < 1e-15);
        assert!(SampledCoefficients::new(vec![0.0], vec![DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])]).is_err());
    }

    #[test]
    fn asymmetric_hessian_rejected() {
        let r = mechanical_coefficients(2, 1.0, |_| DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]));
        assert!(r.is_err());
    }

    #[test]
    fn identity_flow_leaves_frames_fixed() {
        let psi = fundamental_solution(ConstantCoefficients::new(DMatrix::zeros(2, 2)).unwrap(), (0.0, 1.0), &IntegratorOptions::default()).unwrap();
        let w = LagrangianFrame::neumann(1);
        let path = act_on(&psi, &w).unwrap();
        assert!(linalg::max_abs(&(path.frame(0.6) - w.basis())) < 1e-15);
        let g = graph_path(&psi);
        let gr = LagrangianFrame::new(SymplecticSpace::double(1), g.frame(0.3), 1e-9).unwrap();
        assert!(gr.same_subspace(&LagrangianFrame::diagonal(1)));
    }

    #[test]
    fn full_period_graph_of_oscillator_meets_diagonal_in_first_block() {
        let mu = std::f64::consts::SQRT_2;
        let hess = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, mu * mu]);
        let tp = 2.0 * std::f64::consts::PI;
        let psi = fundamental_solution(ConstantCoefficients::mechanical(hess).unwrap(), (0.0, tp), &IntegratorOptions::default()).unwrap();
        let gr = crate::symplectic::graph_frame(&psi.at(tp), 1e-9).unwrap();
        assert_eq!(intersection_dim(&gr, &LagrangianFrame::diagonal(2), 1e-9).unwrap(), 2);
    }

    fn smooth_mechanical(n: usize, e: Vec<f64>) -> FnCoefficients {
        mechanical_coefficients(n, 4.0, move |t| {
            DMatrix::from_fn(n, n, |r, c| {
                let (r, c) = (r.min(c), r.max(c));
                let base = if r == c { 1.0 + r as f64 } else { 0.0 };
                base + e[(r * n + c) % e.len()] * (t + r as f64).cos()
            })
        })
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn defect_and_composition(n in 1usize..=3, e in prop::collection::vec(-0.5..0.5_f64, 9), s in 0.3..3.5_f64) {
            let coeffs: Arc<dyn CoefficientPath> = Arc::new(smooth_mechanical(n, e));
            let opts = IntegratorOptions::default();
            let psi = FundamentalSolution::integrate(coeffs.clone(), (0.0, 4.0), &opts).unwrap();
            prop_assert!(psi.sampled_defect(100) <= opts.defect_tol);
            let from_s = FundamentalSolution::integrate(coeffs, (s, 4.0), &opts).unwrap();
            for t in [s, 0.5 * (s + 4.0), 4.0] {
                let composed = from_s.at(t) * psi.at(s);
                prop_assert!(linalg::max_abs(&(composed - psi.at(t))) < 10.0 * opts.defect_tol);
            }
        }

        #[test]
        fn shifted_flow_conjugation(n in 1usize..=2, e in prop::collection::vec(-0.5..0.5_f64, 4), s in 0.1..1.5_f64) {
            // Ψ(h + s) = Ψ(s; h) M with M = Ψ(h), and Ψ(s; h) = M Φ(s) M^{-1}
            // where Φ solves the system with coefficients M^T B(h + ·) M.
            let h = 2.0;
            let coeffs = Arc::new(smooth_mechanical(n, e));
            let opts = IntegratorOptions::default();
            let psi = FundamentalSolution::integrate(coeffs.clone(), (0.0, 4.0), &opts).unwrap();
            let m = psi.at(h);
            let mt = m.transpose();
            let shifted = FnCoefficients::new(2 * n, {
                let (m, mt) = (m.clone(), mt.clone());
                move |t| &mt * coeffs.eval(h + t) * &m
            });
            let phi = fundamental_solution(shifted, (0.0, 2.0), &opts).unwrap();
            let lhs = psi.at(h + s);
            let rhs = &m * phi.at(s);
            prop_assert!(linalg::max_abs(&(lhs - rhs)) < 1e-8);
        }
    }
}
