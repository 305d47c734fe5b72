//! Random symplectic data shared by the property tests and the acceptance
//! harness.
#![allow(dead_code)]

use maslov::index::{CrossingOptions, LagrangianPath};
use maslov::linalg;
use maslov::symplectic::{LagrangianFrame, SymplecticSpace};
use nalgebra::DMatrix;
use proptest::prelude::*;

pub fn sym_from(n: usize, v: &[f64]) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| v[i * n + j]);
    (&a + a.transpose()) * 0.5
}

/// `[[I, 0], [A, I]] [[I, B], [0, I]] diag(M, M^{-T})`.
pub fn symplectic_from(n: usize, a: &[f64], b: &[f64], m: &[f64]) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(n, n);
    let z = DMatrix::<f64>::zeros(n, n);
    let lower = linalg::vstack(&linalg::hstack(&id, &z), &linalg::hstack(&sym_from(n, a), &id));
    let upper = linalg::vstack(&linalg::hstack(&id, &sym_from(n, b)), &linalg::hstack(&z, &id));
    let mm = &id + DMatrix::from_fn(n, n, |i, j| 0.2 * m[i * n + j] / n as f64);
    let minv_t = mm.clone().try_inverse().expect("near-identity block is invertible").transpose();
    lower * upper * linalg::block_diag(&mm, &minv_t)
}

pub fn symplectic_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let j = SymplecticSpace::standard(m.nrows() / 2).j().clone();
    -(&j * m.transpose() * &j)
}

#[derive(Clone, Debug)]
pub struct SymplecticParams {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub m: Vec<f64>,
}

impl SymplecticParams {
    pub fn matrix(&self) -> DMatrix<f64> {
        symplectic_from(self.n, &self.a, &self.b, &self.m)
    }
}

pub fn arb_symplectic(n: usize) -> impl Strategy<Value = SymplecticParams> {
    let k = n * n;
    (
        prop::collection::vec(-1.0..1.0f64, k),
        prop::collection::vec(-1.0..1.0f64, k),
        prop::collection::vec(-1.0..1.0f64, k),
    )
        .prop_map(move |(a, b, m)| SymplecticParams { n, a, b, m })
}

/// Lagrangians built to meet each other: coordinate subspaces
/// `span{p_i, i ∈ S} + span{q_j, j ∉ S}`, graphs of small integer symmetric
/// matrices, and generic graphs.
#[derive(Clone, Debug)]
pub enum LagSeed {
    Coordinate(Vec<bool>),
    IntegerGraph(Vec<i8>),
    Graph(Vec<f64>),
}

impl LagSeed {
    pub fn frame(&self, n: usize) -> LagrangianFrame {
        let space = SymplecticSpace::standard(n);
        match self {
            Self::Coordinate(mask) => {
                let mut z = DMatrix::zeros(2 * n, n);
                for (i, &p) in mask.iter().enumerate() {
                    z[(if p { i } else { n + i }, i)] = 1.0;
                }
                LagrangianFrame::new(space, z, 1e-9).unwrap()
            }
            Self::IntegerGraph(v) => {
                let a = sym_from(n, &v.iter().map(|&x| 2.0 * x as f64).collect::<Vec<_>>());
                LagrangianFrame::graph_of_symmetric(&a).unwrap()
            }
            Self::Graph(v) => LagrangianFrame::graph_of_symmetric(&(sym_from(n, v) * 2.0)).unwrap(),
        }
    }
}

pub fn arb_lag_seed(n: usize) -> impl Strategy<Value = LagSeed> {
    prop_oneof![
        prop::collection::vec(any::<bool>(), n).prop_map(LagSeed::Coordinate),
        prop::collection::vec(-1i8..=1, n * n).prop_map(LagSeed::IntegerGraph),
        prop::collection::vec(-1.0..1.0f64, n * n).prop_map(LagSeed::Graph),
    ]
}

/// `n` followed by four Lagrangians and a common symplectic change of frame.
pub fn arb_quadruple() -> impl Strategy<Value = (usize, [LagrangianFrame; 4])> {
    (1usize..=4).prop_flat_map(|n| {
        (
            Just(n),
            arb_lag_seed(n),
            arb_lag_seed(n),
            arb_lag_seed(n),
            arb_lag_seed(n),
            arb_symplectic(n),
        )
            .prop_map(|(n, a, b, c, d, p)| {
                let m = p.matrix();
                let f = |s: LagSeed| s.frame(n).transformed(&m).unwrap();
                (n, [f(a), f(b), f(c), f(d)])
            })
    })
}

/// `t ↦ P R(t) P⁻¹` with `R(t)` rotating each `(p_i, q_i)` plane at rate
/// `rates[i]`.
#[derive(Clone, Debug)]
pub struct RotationFlow {
    pub p: DMatrix<f64>,
    pub pinv: DMatrix<f64>,
    pub rates: Vec<f64>,
}

impl RotationFlow {
    pub fn new(p: DMatrix<f64>, rates: Vec<f64>) -> Self {
        let pinv = symplectic_inverse(&p);
        Self { p, pinv, rates }
    }

    fn rotation(&self, t: f64, derivative: bool) -> DMatrix<f64> {
        let n = self.rates.len();
        let mut r = DMatrix::zeros(2 * n, 2 * n);
        for (i, &w) in self.rates.iter().enumerate() {
            let (s, c) = (w * t).sin_cos();
            let (s, c, k) = if derivative { (c, -s, w) } else { (s, c, 1.0) };
            r[(i, i)] = k * c;
            r[(i, n + i)] = -k * s;
            r[(n + i, i)] = k * s;
            r[(n + i, n + i)] = k * c;
        }
        r
    }

    pub fn matrix(&self, t: f64) -> DMatrix<f64> {
        &self.p * self.rotation(t, false) * &self.pinv
    }

    pub fn derivative(&self, t: f64) -> DMatrix<f64> {
        &self.p * self.rotation(t, true) * &self.pinv
    }
}

/// `t ↦ Φ(t) W` for a rotation flow, optionally composed on the left with a
/// second flow.
pub struct FlowFrame {
    pub space: SymplecticSpace,
    pub interval: (f64, f64),
    pub outer: Option<RotationFlow>,
    pub inner: Option<RotationFlow>,
    pub w: DMatrix<f64>,
}

impl FlowFrame {
    pub fn new(w: &LagrangianFrame, inner: Option<RotationFlow>, outer: Option<RotationFlow>, interval: (f64, f64)) -> Self {
        Self {
            space: w.space().clone(),
            interval,
            outer,
            inner,
            w: w.basis().clone(),
        }
    }

    fn parts(flow: &Option<RotationFlow>, t: f64, dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        match flow {
            Some(f) => (f.matrix(t), f.derivative(t)),
            None => (DMatrix::identity(dim, dim), DMatrix::zeros(dim, dim)),
        }
    }
}

impl LagrangianPath for FlowFrame {
    fn space(&self) -> &SymplecticSpace {
        &self.space
    }
    fn interval(&self) -> (f64, f64) {
        self.interval
    }
    fn frame(&self, t: f64) -> DMatrix<f64> {
        let d = self.w.nrows();
        let (o, _) = Self::parts(&self.outer, t, d);
        let (i, _) = Self::parts(&self.inner, t, d);
        o * i * &self.w
    }
    fn derivative(&self, t: f64) -> DMatrix<f64> {
        let d = self.w.nrows();
        let (o, od) = Self::parts(&self.outer, t, d);
        let (i, id) = Self::parts(&self.inner, t, d);
        (od * &i + o * id) * &self.w
    }
}

#[derive(Clone, Debug)]
pub struct PathParams {
    pub n: usize,
    pub flow: SymplecticParams,
    pub rates: Vec<f64>,
    pub start: LagSeed,
    pub reference: LagSeed,
}

impl PathParams {
    pub fn flow(&self) -> RotationFlow {
        RotationFlow::new(self.flow.matrix(), self.rates.clone())
    }
}

pub fn arb_path() -> impl Strategy<Value = PathParams> {
    (1usize..=4).prop_flat_map(|n| {
        (
            Just(n),
            arb_symplectic(n),
            prop::collection::vec(prop_oneof![-3.0..-0.3f64, 0.3..3.0f64], n),
            arb_lag_seed(n),
            arb_lag_seed(n),
        )
            .prop_map(|(n, flow, rates, start, reference)| PathParams {
                n,
                flow,
                rates,
                start,
                reference,
            })
    })
}

/// Grid used by the randomized identity checks; rotation rates are bounded,
/// so a few hundred cells resolve every crossing.
pub fn property_options() -> CrossingOptions {
    CrossingOptions {
        grid: 256,
        ..CrossingOptions::default()
    }
}

pub const INTERVAL: (f64, f64) = (0.0, 1.5);

use maslov::index::{
    clm_index, clm_pair, hormander_index_both, rs_index, triple_form, triple_index, triple_index_parts,
    ConstantPath, Reparametrized,
};
use maslov::symplectic::intersection_dim;
use proptest::test_runner::TestCaseError;

pub type Outcome = Result<(), TestCaseError>;

/// Degenerate instances are rejected, any other error fails the case.
pub fn lift<T>(r: maslov::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| {
        if e.is_degenerate() {
            TestCaseError::reject(e.to_string())
        } else {
            TestCaseError::fail(e.to_string())
        }
    })
}

fn frames(p: &PathParams) -> (LagrangianFrame, LagrangianFrame) {
    (p.start.frame(p.n), p.reference.frame(p.n))
}

fn frame_at(path: &dyn LagrangianPath, t: f64) -> Result<LagrangianFrame, TestCaseError> {
    lift(LagrangianFrame::new(path.space().clone(), path.frame(t), 1e-9))
}

pub fn additivity(p: &PathParams, frac: f64) -> Outcome {
    let (w, l0) = frames(p);
    let (a, b) = INTERVAL;
    let c = a + frac * (b - a);
    let opts = property_options();
    let full = FlowFrame::new(&w, Some(p.flow()), None, (a, b));
    let left = FlowFrame::new(&w, Some(p.flow()), None, (a, c));
    let right = FlowFrame::new(&w, Some(p.flow()), None, (c, b));
    let total = lift(clm_index(&full, &l0, &opts))?.value();
    let parts = lift(clm_index(&left, &l0, &opts))?.value() + lift(clm_index(&right, &l0, &opts))?.value();
    prop_assert_eq!(total, parts);
    Ok(())
}

pub fn symplectic_invariance(p: &PathParams, outer: &SymplecticParams, rates: &[f64]) -> Outcome {
    let (w, l0) = frames(p);
    let opts = property_options();
    let phi = RotationFlow::new(outer.matrix(), rates.to_vec());
    let plain = lift(clm_index(&FlowFrame::new(&w, Some(p.flow()), None, INTERVAL), &l0, &opts))?.value();
    let moved_ref = FlowFrame::new(&l0, None, Some(phi.clone()), INTERVAL);
    let moved = FlowFrame::new(&w, Some(p.flow()), Some(phi), INTERVAL);
    let conj = lift(clm_pair(&moved_ref, &moved, &opts))?.value();
    prop_assert_eq!(plain, conj);
    Ok(())
}

pub fn reparametrization(p: &PathParams, kappa: f64) -> Outcome {
    let (w, l0) = frames(p);
    let opts = property_options();
    let (a, b) = INTERVAL;
    let path = FlowFrame::new(&w, Some(p.flow()), None, INTERVAL);
    let plain = lift(clm_index(&path, &l0, &opts))?.value();
    let re = Reparametrized::new(
        &path,
        (0.0, 1.0),
        move |s: f64| a + (b - a) * (s + kappa * s * (1.0 - s)),
        move |s: f64| (b - a) * (1.0 + kappa * (1.0 - 2.0 * s)),
    );
    let other = lift(clm_index(&re, &l0, &opts))?.value();
    prop_assert_eq!(plain, other);
    Ok(())
}

pub fn clm_rs_relation(p: &PathParams, second: &SymplecticParams, rates: &[f64]) -> Outcome {
    let (w, l0) = frames(p);
    let opts = property_options();
    let l1 = FlowFrame::new(&l0, Some(RotationFlow::new(second.matrix(), rates.to_vec())), None, INTERVAL);
    let l2 = FlowFrame::new(&w, Some(p.flow()), None, INTERVAL);
    let clm = lift(clm_pair(&l1, &l2, &opts))?;
    let rs = lift(rs_index(&l2, &l1, &opts))?;
    let h = |t: f64| -> Result<i64, TestCaseError> {
        Ok(lift(intersection_dim(&frame_at(&l1, t)?, &frame_at(&l2, t)?, 1e-9))? as i64)
    };
    let (ha, hb) = (h(INTERVAL.0)?, h(INTERVAL.1)?);
    prop_assert_eq!(2 * clm.value(), rs.index.twice() - (hb - ha));
    Ok(())
}

/// Same relation when the pair starts on a common Lagrangian.
pub fn clm_rs_relation_from_contact(p: &PathParams) -> Outcome {
    let (w, _) = frames(p);
    let opts = property_options();
    let fixed = ConstantPath::new(w.clone(), INTERVAL);
    let moving = FlowFrame::new(&w, Some(p.flow()), None, INTERVAL);
    let clm = lift(clm_pair(&fixed, &moving, &opts))?;
    let rs = lift(rs_index(&moving, &fixed, &opts))?;
    let hb = lift(intersection_dim(&frame_at(&moving, INTERVAL.1)?, &w, 1e-9))? as i64;
    prop_assert_eq!(2 * clm.value(), rs.index.twice() - (hb - p.n as i64));
    Ok(())
}

pub fn hormander_antisymmetry(q: &[LagrangianFrame; 4]) -> Outcome {
    let [l1, l2, m1, m2] = q;
    let (s, alt) = lift(hormander_index_both(l1, l2, m1, m2))?;
    let (r, _) = lift(hormander_index_both(l1, l2, m2, m1))?;
    prop_assert_eq!(s, alt);
    prop_assert_eq!(s, -r);
    Ok(())
}

pub fn hormander_swap(q: &[LagrangianFrame; 4]) -> Outcome {
    let [l1, l2, m1, m2] = q;
    let (s, _) = lift(hormander_index_both(l1, l2, m1, m2))?;
    let (t, _) = lift(hormander_index_both(m1, m2, l1, l2))?;
    let mut correction = 0i64;
    for (j, l) in [l1, l2].into_iter().enumerate() {
        for (k, m) in [m1, m2].into_iter().enumerate() {
            let sign = if (j + k) % 2 == 0 { -1 } else { 1 };
            correction += sign * lift(intersection_dim(l, m, 1e-9))? as i64;
        }
    }
    prop_assert_eq!(s, -t + correction);
    Ok(())
}

pub fn triple_bound(n: usize, q: &[LagrangianFrame; 4]) -> Outcome {
    let [a, b, c, _] = q;
    let parts = lift(triple_index_parts(a, b, c))?;
    prop_assert!(parts.value <= parts.upper_bound(n), "{:?}", parts);
    prop_assert_eq!(parts.value, parts.positive + parts.kernel);
    prop_assert_eq!(parts.kernel + parts.dim_abc, parts.dim_ac);
    Ok(())
}

pub fn cyclic_positive_index(q: &[LagrangianFrame; 4]) -> Outcome {
    let [a, b, c, _] = q;
    let f = [lift(triple_form(a, b, c))?, lift(triple_form(b, c, a))?, lift(triple_form(c, a, b))?];
    prop_assert_eq!(f[0].coindex, f[1].coindex);
    prop_assert_eq!(f[0].coindex, f[2].coindex);
    prop_assert_eq!(f[0].coindex, lift(triple_index_parts(a, b, c))?.positive);
    Ok(())
}

/// `s(λ(a), λ(b); λ(a), μ) = -ι(λ(b), λ(a), μ) ≤ 0` and
/// `s(λ(a), λ(b); λ(b), μ) = ι(λ(a), λ(b), μ) ≥ 0`, with `s` evaluated from
/// its definition as a difference of CLM indices.
pub fn endpoint_hormander_signs(p: &PathParams) -> Outcome {
    let (w, mu) = frames(p);
    let opts = property_options();
    let path = FlowFrame::new(&w, Some(p.flow()), None, INTERVAL);
    let (la, lb) = (frame_at(&path, INTERVAL.0)?, frame_at(&path, INTERVAL.1)?);
    let against = |l: &LagrangianFrame| lift(clm_index(&path, l, &opts)).map(|r| r.value());
    let to_mu = against(&mu)?;
    let s1 = to_mu - against(&la)?;
    let s2 = to_mu - against(&lb)?;
    let i1 = lift(triple_index(&lb, &la, &mu))? as i64;
    let i2 = lift(triple_index(&la, &lb, &mu))? as i64;
    prop_assert_eq!(s1, -i1);
    prop_assert!(s1 <= 0);
    prop_assert_eq!(s2, i2);
    prop_assert!(s2 >= 0);
    Ok(())
}

/// A path together with a second flow of the same dimension.
pub fn arb_path_and_flow() -> impl Strategy<Value = (PathParams, SymplecticParams, Vec<f64>)> {
    arb_path().prop_flat_map(|p| {
        let n = p.n;
        (
            Just(p),
            arb_symplectic(n),
            prop::collection::vec(prop_oneof![-3.0..-0.3f64, 0.3..3.0f64], n),
        )
    })
}
pub mod scenarios;
