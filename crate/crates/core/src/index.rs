//! Crossing detection and the CLM, Robbin–Salamon, triple and Hörmander
//! indices.
//!
//! # Conventions
//!
//! For a `C^1` frame `Z(t)` of a path `ℓ(t)` the form
//! `Q(ℓ, t)[ξ] = ω(Z ξ, Ż ξ)` is pushed to `ℓ(t)` and does not depend on the
//! frame.  The relative crossing form of a pair is
//! `Γ(ℓ1, ℓ2, t) = Q(ℓ1, t) - Q(ℓ2, t)` restricted to `ℓ1(t) ∩ ℓ2(t)`.
//!
//! * `CLM(ℓ1, ℓ2) = n_+ Γ(ℓ2, ℓ1, a) + Σ sgn Γ(ℓ2, ℓ1, t) - n_- Γ(ℓ2, ℓ1, b)`
//! * `RS(ℓ1, ℓ2) = ½ sgn Γ(ℓ1, ℓ2, a) + Σ sgn Γ(ℓ1, ℓ2, t) + ½ sgn Γ(ℓ1, ℓ2, b)`
//!
//! so `CLM(ℓ1, ℓ2) = RS(ℓ2, ℓ1) - ½ [h(b) - h(a)]` with `h = dim(ℓ1 ∩ ℓ2)`.
//! With a constant reference, `CLM(L0, ℓ)` counts crossings of `ℓ` with
//! positive form `Q(ℓ)`.
//!
//! # Localisation
//!
//! Write `U = X + iY` for an orthonormal frame read in the complex structure
//! `J`.  The symmetric unitary matrix `M = V V^T`, `V = U2^* U1`, has the
//! eigenvalue `1` with multiplicity `dim(ℓ1 ∩ ℓ2)`, and its eigenphases move
//! in the direction of `Γ(ℓ1, ℓ2)`.  Its real and imaginary parts commute, so
//! the phases come from real symmetric eigenproblems.  A uniform grid tracks
//! how many phases sit in `(-π/2, 0)` and in `[0, π/2)`; every change is
//! bisected down to the time tolerance.  Two crossings inside one grid cell
//! whose effects cancel are invisible to the scan: the grid size is a
//! completeness assumption.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SymplecticPath;
use crate::linalg;
use crate::symplectic::{
    intersection_basis, intersection_dim, LagrangianFrame, QuadraticFormReport, Reduction,
    SymplecticSpace,
};

/// A `C^1` path of Lagrangian subspaces given by (not necessarily
/// orthonormal) frames.
pub trait LagrangianPath: Sync {
    fn space(&self) -> &SymplecticSpace;

    fn interval(&self) -> (f64, f64);

    /// A `2n x n` frame of `ℓ(t)`.
    fn frame(&self, t: f64) -> DMatrix<f64>;

    /// Derivative of [`frame`](Self::frame).  The default is a second-order
    /// finite difference with step `1e-6 (b - a)`, one-sided near the ends.
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        finite_difference(|s| self.frame(s), self.interval(), t)
    }
}

pub(crate) fn finite_difference<F>(f: F, (a, b): (f64, f64), t: f64) -> DMatrix<f64>
where
    F: Fn(f64) -> DMatrix<f64>,
{
    let h = 1e-6 * (b - a).abs().max(f64::MIN_POSITIVE);
    if t - h < a {
        (f(t) * -3.0 + f(t + h) * 4.0 - f(t + 2.0 * h)) / (2.0 * h)
    } else if t + h > b {
        (f(t) * 3.0 - f(t - h) * 4.0 + f(t - 2.0 * h)) / (2.0 * h)
    } else {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }
}

/// A constant Lagrangian viewed as a path.
pub struct ConstantPath {
    frame: LagrangianFrame,
    interval: (f64, f64),
}

impl ConstantPath {
    pub fn new(frame: LagrangianFrame, interval: (f64, f64)) -> Self {
        Self { frame, interval }
    }
}

impl LagrangianPath for ConstantPath {
    fn space(&self) -> &SymplecticSpace {
        self.frame.space()
    }
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn frame(&self, _t: f64) -> DMatrix<f64> {
        self.frame.basis().clone()
    }
    fn derivative(&self, _t: f64) -> DMatrix<f64> {
        DMatrix::zeros(self.frame.space().dim(), self.frame.n())
    }
}

type MatrixFn = Box<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// A path given by closures; the derivative closure is optional.
pub struct FnPath {
    space: SymplecticSpace,
    interval: (f64, f64),
    frame: MatrixFn,
    derivative: Option<MatrixFn>,
}

impl FnPath {
    pub fn new<F>(space: SymplecticSpace, interval: (f64, f64), frame: F) -> Self
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            space,
            interval,
            frame: Box::new(frame),
            derivative: None,
        }
    }

    pub fn with_derivative<D>(mut self, derivative: D) -> Self
    where
        D: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.derivative = Some(Box::new(derivative));
        self
    }
}

impl LagrangianPath for FnPath {
    fn space(&self) -> &SymplecticSpace {
        &self.space
    }
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn frame(&self, t: f64) -> DMatrix<f64> {
        (self.frame)(t)
    }
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        match &self.derivative {
            Some(d) => d(t),
            None => finite_difference(|s| (self.frame)(s), self.interval, t),
        }
    }
}

/// Restriction of a path to a sub-interval.
pub struct Segment<'a, P: ?Sized> {
    inner: &'a P,
    interval: (f64, f64),
}

impl<'a, P: LagrangianPath + ?Sized> Segment<'a, P> {
    pub fn new(inner: &'a P, a: f64, b: f64) -> Self {
        Self {
            inner,
            interval: (a, b),
        }
    }
}

impl<P: LagrangianPath + ?Sized> LagrangianPath for Segment<'_, P> {
    fn space(&self) -> &SymplecticSpace {
        self.inner.space()
    }
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn frame(&self, t: f64) -> DMatrix<f64> {
        self.inner.frame(t)
    }
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        self.inner.derivative(t)
    }
}

/// `s ↦ ℓ(φ(s))` for a `C^1` map `φ` from a new interval onto the old one.
pub struct Reparametrized<'a, P: ?Sized> {
    inner: &'a P,
    interval: (f64, f64),
    map: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    map_derivative: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl<'a, P: LagrangianPath + ?Sized> Reparametrized<'a, P> {
    pub fn new<M, D>(inner: &'a P, interval: (f64, f64), map: M, map_derivative: D) -> Self
    where
        M: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            inner,
            interval,
            map: Box::new(map),
            map_derivative: Box::new(map_derivative),
        }
    }
}

impl<P: LagrangianPath + ?Sized> LagrangianPath for Reparametrized<'_, P> {
    fn space(&self) -> &SymplecticSpace {
        self.inner.space()
    }
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn frame(&self, s: f64) -> DMatrix<f64> {
        self.inner.frame((self.map)(s))
    }
    fn derivative(&self, s: f64) -> DMatrix<f64> {
        self.inner.derivative((self.map)(s)) * (self.map_derivative)(s)
    }
}

/// Scan and refinement parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CrossingOptions {
    /// Number of uniform grid cells of the pre-scan.
    pub grid: usize,
    /// Bisection stops at this fraction of the interval length.
    pub time_tol: f64,
    /// A crossing-form eigenvalue below this multiple of the spectral scale
    /// of the two paths is reported as degenerate.
    pub degeneracy_tol: f64,
    /// Relative rank tolerance for intersections.
    pub rank_tol: f64,
    /// Eigenphases closer than this to zero count toward the multiplicity.
    pub phase_tol: f64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            grid: 2048,
            time_tol: 1e-10,
            degeneracy_tol: 1e-7,
            rank_tol: 1e-9,
            phase_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingKind {
    Left,
    Interior,
    Right,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub t: f64,
    pub multiplicity: usize,
    pub kind: CrossingKind,
    #[serde(flatten)]
    pub form: QuadraticFormReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    #[serde(rename = "CLM")]
    Clm,
    #[serde(rename = "RS")]
    Rs,
}

/// An integer or half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }
    pub fn from_integer(v: i64) -> Self {
        Self(2 * v)
    }
    pub fn twice(self) -> i64 {
        self.0
    }
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
    pub fn as_integer(self) -> Option<i64> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }
}

impl std::fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.as_integer() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}", self.as_f64()),
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_integer() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_f64(self.as_f64()),
        }
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let twice = (2.0 * v).round();
        if (twice - 2.0 * v).abs() > 1e-9 {
            return Err(serde::de::Error::custom("not a half-integer"));
        }
        Ok(Self(twice as i64))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossingReport {
    pub index: HalfInteger,
    pub convention: Convention,
    #[serde(rename = "crossings")]
    pub records: Vec<CrossingRecord>,
}

impl CrossingReport {
    /// Integer value; CLM reports are always integral.
    pub fn value(&self) -> i64 {
        self.index
            .as_integer()
            .expect("integer-valued convention")
    }

    pub fn interior(&self) -> impl Iterator<Item = &CrossingRecord> {
        self.records.iter().filter(|r| r.kind == CrossingKind::Interior)
    }

    /// Recomputes the index from the records.
    pub fn recompute(&self) -> HalfInteger {
        assemble(self.convention, &self.records)
    }
}

fn assemble(convention: Convention, records: &[CrossingRecord]) -> HalfInteger {
    let twice: i64 = records
        .iter()
        .map(|r| match (convention, r.kind) {
            (Convention::Clm, CrossingKind::Left) => 2 * r.form.coindex as i64,
            (Convention::Clm, CrossingKind::Interior) => 2 * r.form.signature,
            (Convention::Clm, CrossingKind::Right) => -2 * r.form.index as i64,
            (Convention::Rs, CrossingKind::Interior) => 2 * r.form.signature,
            (Convention::Rs, _) => r.form.signature,
        })
        .sum();
    HalfInteger::from_twice(twice)
}

/// Eigenphases in `(-π, π]` of `M = V V^T` with `V = U2^* U1`, for
/// orthonormal frames `q1`, `q2` and complex structure `j`.
pub fn eigen_phases(q1: &DMatrix<f64>, q2: &DMatrix<f64>, j: &DMatrix<f64>) -> Vec<f64> {
    const CLUSTER: f64 = 1e-6;
    let re = q2.transpose() * q1;
    let im = (j * q2).transpose() * q1;
    let a = &re * re.transpose() - &im * im.transpose();
    let b = &re * im.transpose() + &im * re.transpose();
    let (avals, avecs) = linalg::sym_eigen_sorted(&a);
    let k = avals.len();
    let mut phases = Vec::with_capacity(k);
    let mut i = 0;
    while i < k {
        let mut e = i + 1;
        while e < k && avals[e] - avals[e - 1] < CLUSTER {
            e += 1;
        }
        let block = avecs.columns(i, e - i).into_owned();
        let vecs = if e - i == 1 {
            block
        } else {
            // A and B commute, so B preserves the (near) eigenspace of A.
            let (_, u) = linalg::sym_eigen_sorted(&(block.transpose() * &b * &block));
            &block * u
        };
        for c in 0..vecs.ncols() {
            let w = vecs.column(c);
            let ca = (w.transpose() * &a * w)[0];
            let sb = (w.transpose() * &b * w)[0];
            phases.push(sb.atan2(ca));
        }
        i = e;
    }
    phases
}

struct PairScanner<'a> {
    first: &'a dyn LagrangianPath,
    second: &'a dyn LagrangianPath,
    opts: &'a CrossingOptions,
}

/// Number of eigenphases in each of `S` equal sectors of the circle, with
/// `S > n` even so that `0` and `π` are sector boundaries.  A crossing of `0`
/// can only hide from this count if every one of the `S` boundaries is passed
/// within one grid cell, which takes more than `n` phases once each phase
/// moves by less than a sector per cell.
#[derive(Clone, PartialEq, Eq, Debug)]
struct PhaseState(Vec<usize>);

impl PairScanner<'_> {
    fn phases(&self, t: f64) -> Vec<f64> {
        let q1 = linalg::qr_orthonormal(&self.first.frame(t));
        let q2 = linalg::qr_orthonormal(&self.second.frame(t));
        eigen_phases(&q1, &q2, self.first.space().j())
    }

    fn sectors(&self) -> usize {
        (2 * (self.first.space().n() + 1)).max(8)
    }

    fn state(&self, t: f64) -> PhaseState {
        use std::f64::consts::PI;
        let s = self.sectors();
        let mut counts = vec![0; s];
        for p in self.phases(t) {
            let k = ((p + PI) / (2.0 * PI) * s as f64).floor() as isize;
            counts[k.clamp(0, s as isize - 1) as usize] += 1;
        }
        PhaseState(counts)
    }

    /// Whether some phase sits on a sector boundary other than `0`.
    fn on_other_boundary(&self, phases: &[f64]) -> bool {
        use std::f64::consts::PI;
        let width = 2.0 * PI / self.sectors() as f64;
        phases.iter().any(|&p| {
            let k = (p / width).round();
            k != 0.0 && (p - k * width).abs() < 1e-3
        })
    }

    fn multiplicity(&self, t: f64) -> (usize, Vec<f64>) {
        let ph = self.phases(t);
        let m = ph.iter().filter(|p| p.abs() < self.opts.phase_tol).count();
        (m, ph)
    }

    fn bisect(
        &self,
        (t0, s0): (f64, PhaseState),
        (t1, s1): (f64, PhaseState),
        width: f64,
        out: &mut Vec<f64>,
    ) {
        if t1 - t0 <= width {
            out.push(0.5 * (t0 + t1));
            return;
        }
        let tm = 0.5 * (t0 + t1);
        let sm = self.state(tm);
        if sm != s0 {
            self.bisect((t0, s0), (tm, sm.clone()), width, out);
        }
        if sm != s1 {
            self.bisect((tm, sm), (t1, s1), width, out);
        }
    }

    /// `Γ(first, second, t)` on an orthonormal basis of the intersection of
    /// dimension `mult`, together with the spectral scale of the two forms.
    fn form(&self, t: f64, mult: usize) -> (DMatrix<f64>, f64) {
        let j = self.first.space().j();
        let z1 = self.first.frame(t);
        let z2 = self.second.frame(t);
        let q1 = linalg::qr_orthonormal(&z1);
        let q2 = linalg::qr_orthonormal(&z2);
        let pencil = (j * &q2).transpose() * &q1;
        let (_, v) = linalg::svd_full_right(&pencil);
        let n = v.ncols();
        let xi = v.columns(n - mult, mult).into_owned();
        let w = &q1 * xi;
        let d1 = self.first.derivative(t);
        let d2 = self.second.derivative(t);
        let jt = j.transpose();
        let q_of = |z: &DMatrix<f64>, dz: &DMatrix<f64>, w: &DMatrix<f64>| {
            let coef = linalg::solve_frame(z, w);
            linalg::sym(&(w.transpose() * &jt * dz * coef))
        };
        let gamma = q_of(&z1, &d1, &w) - q_of(&z2, &d2, &w);
        let scale = linalg::sym_spectral_radius(&q_of(&z1, &d1, &q1))
            .max(linalg::sym_spectral_radius(&q_of(&z2, &d2, &q2)));
        (gamma, scale)
    }

    fn record(&self, t: f64, mult: usize, kind: CrossingKind) -> Result<CrossingRecord> {
        let (gamma, scale) = self.form(t, mult);
        let threshold = self.opts.degeneracy_tol * scale;
        let form = QuadraticFormReport::from_symmetric(&gamma, threshold);
        if scale == 0.0 || !form.is_regular() {
            return Err(Error::DegenerateCrossing {
                t,
                eigenvalues: form.eigenvalues,
            });
        }
        Ok(CrossingRecord {
            t,
            multiplicity: mult,
            kind,
            form,
        })
    }

    fn scan(&self) -> Result<Vec<CrossingRecord>> {
        let (a, b) = self.first.interval();
        if !(b >= a) {
            return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
        }
        let len = b - a;
        let (ma, _) = self.multiplicity(a);
        let (mb, _) = if len > 0.0 { self.multiplicity(b) } else { (ma, Vec::new()) };
        let mut records = Vec::new();
        if ma > 0 {
            records.push(self.record(a, ma, CrossingKind::Left)?);
        }
        if len == 0.0 {
            if mb > 0 {
                records.push(self.record(b, mb, CrossingKind::Right)?);
            }
            return Ok(records);
        }

        let cells = self.opts.grid.max(1);
        let width = self.opts.time_tol * len;
        let mut candidates = Vec::new();
        let mut prev = (a, self.state(a));
        for i in 1..=cells {
            let t = if i == cells { b } else { a + len * i as f64 / cells as f64 };
            let cur = (t, self.state(t));
            if cur.1 != prev.1 {
                self.bisect(prev, cur.clone(), width, &mut candidates);
            }
            prev = cur;
        }

        let guard = (10.0 * width).max(1e-6 * len);
        let merge = 10.0 * width;
        let mut kept: Vec<f64> = Vec::new();
        for t in candidates {
            if (ma > 0 && t - a < guard) || (mb > 0 && b - t < guard) {
                continue;
            }
            if kept.last().is_some_and(|&last| t - last < merge) {
                continue;
            }
            kept.push(t);
        }
        for t in kept {
            let (mult, phases) = self.multiplicity(t);
            if mult == 0 {
                // Phases passing other sector boundaries also change the
                // counts; anything else means the refinement could not isolate
                // the crossing.
                if self.on_other_boundary(&phases) {
                    continue;
                }
                return Err(Error::UnresolvedCluster { t });
            }
            records.push(self.record(t, mult, CrossingKind::Interior)?);
        }
        if mb > 0 {
            records.push(self.record(b, mb, CrossingKind::Right)?);
        }
        records.sort_by(|x, y| x.t.total_cmp(&y.t));
        Ok(records)
    }
}

fn check_pair(first: &dyn LagrangianPath, second: &dyn LagrangianPath) -> Result<()> {
    if first.space() != second.space() {
        return Err(Error::Dimension("paths live in different spaces".into()));
    }
    let (a1, b1) = first.interval();
    let (a2, b2) = second.interval();
    let tol = 1e-12 * (1.0 + a1.abs().max(b1.abs()));
    if (a1 - a2).abs() > tol || (b1 - b2).abs() > tol {
        return Err(Error::Dimension("paths have different parameter intervals".into()));
    }
    Ok(())
}

/// Crossings of a pair of paths with the relative form `Γ(first, second)`.
pub fn pair_crossings(
    first: &dyn LagrangianPath,
    second: &dyn LagrangianPath,
    opts: &CrossingOptions,
) -> Result<Vec<CrossingRecord>> {
    check_pair(first, second)?;
    PairScanner { first, second, opts }.scan()
}

/// Crossings of `ℓ` with a fixed Lagrangian; forms are `Γ(ℓ, L0) = Q(ℓ)`.
pub fn detect_crossings(
    path: &dyn LagrangianPath,
    l0: &LagrangianFrame,
    opts: &CrossingOptions,
) -> Result<Vec<CrossingRecord>> {
    let reference = ConstantPath::new(l0.clone(), path.interval());
    pair_crossings(path, &reference, opts)
}

/// `CLM(ℓ1, ℓ2)` for a pair of paths.
pub fn clm_pair(
    l1: &dyn LagrangianPath,
    l2: &dyn LagrangianPath,
    opts: &CrossingOptions,
) -> Result<CrossingReport> {
    let records = pair_crossings(l2, l1, opts)?;
    Ok(CrossingReport {
        index: assemble(Convention::Clm, &records),
        convention: Convention::Clm,
        records,
    })
}

/// `CLM(L0, ℓ)` against a fixed Lagrangian.
pub fn clm_index(
    path: &dyn LagrangianPath,
    l0: &LagrangianFrame,
    opts: &CrossingOptions,
) -> Result<CrossingReport> {
    let records = detect_crossings(path, l0, opts)?;
    Ok(CrossingReport {
        index: assemble(Convention::Clm, &records),
        convention: Convention::Clm,
        records,
    })
}

/// Robbin–Salamon index `RS(ℓ1, ℓ2)`.
pub fn rs_index(
    l1: &dyn LagrangianPath,
    l2: &dyn LagrangianPath,
    opts: &CrossingOptions,
) -> Result<CrossingReport> {
    let records = pair_crossings(l1, l2, opts)?;
    Ok(CrossingReport {
        index: assemble(Convention::Rs, &records),
        convention: Convention::Rs,
        records,
    })
}

/// `w ↦ <J^T ψ'(t0) ψ(t0)^{-1} w, w>` on `ψ(t0) W ∩ L0`.
pub fn crossing_form(
    psi: &dyn SymplecticPath,
    l0: &LagrangianFrame,
    w: &LagrangianFrame,
    t0: f64,
) -> Result<QuadraticFormReport> {
    let m = crossing_form_matrix(psi, l0, w, t0)?;
    let scale = linalg::sym_spectral_radius(&m).max(f64::MIN_POSITIVE);
    Ok(QuadraticFormReport::from_symmetric(&m, 1e-7 * scale))
}

/// Matrix of [`crossing_form`] on an orthonormal basis of the intersection.
pub fn crossing_form_matrix(
    psi: &dyn SymplecticPath,
    l0: &LagrangianFrame,
    w: &LagrangianFrame,
    t0: f64,
) -> Result<DMatrix<f64>> {
    let p = psi.matrix(t0);
    if p.nrows() != l0.space().dim() || w.space() != l0.space() {
        return Err(Error::Dimension("path, reference and frame disagree".into()));
    }
    let moved = LagrangianFrame::new(l0.space().clone(), &p * w.basis(), l0.tol())?;
    let basis = intersection_basis(&moved, l0, l0.tol())?;
    if basis.ncols() == 0 {
        return Err(Error::NoIntersection { t: t0 });
    }
    let p_inv = p
        .try_inverse()
        .ok_or(Error::NotSymplectic { defect: f64::INFINITY })?;
    let jt = l0.space().j().transpose();
    Ok(linalg::sym(&(basis.transpose() * jt * psi.derivative(t0) * p_inv * &basis)))
}

/// The same form written on preimages `v = ψ(t0)^{-1} w`:
/// `v ↦ <ψ(t0)^T J^T ψ'(t0) v, v>`, evaluated on the same orthonormal basis
/// of the intersection.
pub fn crossing_form_matrix_preimage(
    psi: &dyn SymplecticPath,
    l0: &LagrangianFrame,
    w: &LagrangianFrame,
    t0: f64,
) -> Result<DMatrix<f64>> {
    let p = psi.matrix(t0);
    let moved = LagrangianFrame::new(l0.space().clone(), &p * w.basis(), l0.tol())?;
    let basis = intersection_basis(&moved, l0, l0.tol())?;
    if basis.ncols() == 0 {
        return Err(Error::NoIntersection { t: t0 });
    }
    let p_inv = p
        .clone()
        .try_inverse()
        .ok_or(Error::NotSymplectic { defect: f64::INFINITY })?;
    let pre = p_inv * &basis;
    let jt = l0.space().j().transpose();
    Ok(linalg::sym(&(pre.transpose() * p.transpose() * jt * psi.derivative(t0) * pre)))
}

/// Ingredients of the triple index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleIndexParts {
    /// `n_+ Q(πα, πβ; πγ) + dim(α∩γ) - dim(α∩β∩γ)`.
    pub value: usize,
    /// `n_+` of the reduced chart form.
    pub positive: usize,
    /// Kernel of the reduced chart form, `dim(πα ∩ πγ)`.
    pub kernel: usize,
    pub dim_ab: usize,
    pub dim_bc: usize,
    pub dim_ac: usize,
    pub dim_abc: usize,
    /// Half-dimension of the reduced space.
    pub reduced_n: usize,
}

impl TripleIndexParts {
    /// The extended coindex `n_+ + n_0` of the reduced form.
    pub fn extended_coindex(&self) -> usize {
        self.positive + self.kernel
    }

    /// Upper bound `n - dim(α∩β) - dim(β∩γ) + dim(α∩β∩γ)`.
    pub fn upper_bound(&self, n: usize) -> usize {
        n + self.dim_abc - self.dim_ab - self.dim_bc
    }
}

pub fn triple_index_parts(
    alpha: &LagrangianFrame,
    beta: &LagrangianFrame,
    gamma: &LagrangianFrame,
) -> Result<TripleIndexParts> {
    if alpha.space() != beta.space() || beta.space() != gamma.space() {
        return Err(Error::Dimension("triple index needs a common space".into()));
    }
    let tol = alpha.tol().max(beta.tol()).max(gamma.tol());
    let ab = intersection_basis(alpha, beta, tol)?;
    let bc = intersection_basis(beta, gamma, tol)?;
    let ac = intersection_basis(alpha, gamma, tol)?;
    let abc = linalg::intersection(&ab, gamma.basis(), tol);
    let eps = linalg::column_space(&linalg::hstack(&ab, &bc), tol);

    let reduction = Reduction::new(alpha.space(), &eps, tol)?;
    let (pa, pb, pc) = (
        reduction.project(alpha)?,
        reduction.project(beta)?,
        reduction.project(gamma)?,
    );
    let m = reduction.reduced_space().n();
    let (positive, kernel) = if m == 0 {
        (0, 0)
    } else {
        let kernel = intersection_dim(&pa, &pc, tol)?;
        let q = crate::symplectic::chart_matrix(&pa, &pb, &pc)?;
        (QuadraticFormReport::with_nullity(&q, kernel).coindex, kernel)
    };
    let (dim_ac, dim_abc) = (ac.ncols(), abc.ncols());
    Ok(TripleIndexParts {
        value: positive + dim_ac - dim_abc,
        positive,
        kernel,
        dim_ab: ab.ncols(),
        dim_bc: bc.ncols(),
        dim_ac,
        dim_abc,
        reduced_n: m,
    })
}

/// Unreduced form `Q(α, β; γ)[x] = ω(y, z)` on `α ∩ (β + γ)`, where
/// `x = y + z` with `y ∈ β`, `z ∈ γ`.  The splitting is unique up to
/// `β ∩ γ`, which does not change the value.
pub fn triple_form(alpha: &LagrangianFrame, beta: &LagrangianFrame, gamma: &LagrangianFrame) -> Result<QuadraticFormReport> {
    if alpha.space() != beta.space() || beta.space() != gamma.space() {
        return Err(Error::Dimension("triple form needs a common space".into()));
    }
    let tol = alpha.tol().max(beta.tol()).max(gamma.tol());
    let (b, c) = (beta.basis(), gamma.basis());
    let sum = linalg::column_space(&linalg::hstack(b, c), tol);
    let x = linalg::intersection(alpha.basis(), &sum, tol);
    let k = x.ncols();
    if k == 0 {
        return Ok(QuadraticFormReport::from_symmetric(&DMatrix::zeros(0, 0), tol));
    }
    let bc = linalg::hstack(b, c);
    let coeffs = linalg::lstsq(&bc, &x, tol);
    let n = b.ncols();
    let y = b * coeffs.rows(0, n);
    let z = c * coeffs.rows(n, n);
    let q = linalg::sym(&alpha.space().omega(&y, &z));
    let scale = 1.0 + linalg::max_abs(&q);
    Ok(QuadraticFormReport::from_symmetric(&q, 1e3 * tol * scale))
}

/// Triple index `ι(α, β, γ)`.
pub fn triple_index(alpha: &LagrangianFrame, beta: &LagrangianFrame, gamma: &LagrangianFrame) -> Result<usize> {
    Ok(triple_index_parts(alpha, beta, gamma)?.value)
}

/// Hörmander index `s(λ1, λ2; μ1, μ2) = ι(λ1, λ2, μ2) - ι(λ1, λ2, μ1)`
/// together with the alternative `ι(λ1, μ1, μ2) - ι(λ2, μ1, μ2)`.
pub fn hormander_index_both(
    l1: &LagrangianFrame,
    l2: &LagrangianFrame,
    m1: &LagrangianFrame,
    m2: &LagrangianFrame,
) -> Result<(i64, i64)> {
    let t = |a, b, c| triple_index(a, b, c).map(|v| v as i64);
    let primary = t(l1, l2, m2)? - t(l1, l2, m1)?;
    let alternative = t(l1, m1, m2)? - t(l2, m1, m2)?;
    Ok((primary, alternative))
}

pub fn hormander_index(
    l1: &LagrangianFrame,
    l2: &LagrangianFrame,
    m1: &LagrangianFrame,
    m2: &LagrangianFrame,
) -> Result<i64> {
    let (primary, alternative) = hormander_index_both(l1, l2, m1, m2)?;
    debug_assert_eq!(primary, alternative, "Hörmander index expressions disagree");
    Ok(primary)
}
