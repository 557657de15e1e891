//! Geodesics and parallel transport by fixed-step RK4 with a step-doubling
//! error estimate, plus the CP¹ closed forms used as oracles.

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::calculus::{ChartPoint, Slot, TensorValue, C, ONE, ZERO};
use crate::connection::christoffel;
use crate::error::{GeomError, Result};
use crate::models::{KahlerModel, CHART_RADIUS};

/// Integrator steps per unit parameter when no count is given.
pub const STEPS_PER_UNIT: usize = 1000;
/// Bound on the step-doubling error estimate.
pub const ACCURACY_TOL: f64 = 1e-7;

/// Position and holomorphic velocity `(p, q)`; the real tangent vector is
/// `p∂z + p̄∂z̄ + q∂w + q̄∂w̄`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    pub position: ChartPoint,
    pub velocity: Vec<C>,
}

impl GeodesicState {
    pub fn new(position: ChartPoint, velocity: Vec<C>) -> Result<Self> {
        if velocity.len() != 2 * position.n() {
            return Err(GeomError::argument("velocity needs 2n holomorphic components"));
        }
        Ok(Self { position, velocity })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicSolution {
    pub state: GeodesicState,
    /// Richardson estimate `|y_{2N} − y_N| / 15` of the returned (fine) solution.
    pub error_estimate: f64,
    pub steps: usize,
}

pub fn default_steps(t: f64) -> usize {
    ((STEPS_PER_UNIT as f64 * t.abs()).ceil() as usize).max(1)
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn check_state(x: &[C], v: &[C], t: f64) -> Result<()> {
    if x.iter().chain(v).any(|c| !(c.norm() <= CHART_RADIUS)) {
        let p = ChartPoint::from_hol(x).map(|p| p.to_string()).unwrap_or_else(|_| "non-finite state".into());
        return Err(GeomError::Domain {
            point: p,
            reason: format!("trajectory left the chart at t = {t:.6}"),
        });
    }
    Ok(())
}

fn geodesic_accel(m: &KahlerModel, x: &[C], v: &[C], t: f64) -> Result<Vec<C>> {
    let p = ChartPoint::from_hol(x)?;
    let g = christoffel(m, &p).map_err(|e| match e {
        GeomError::Domain { point, reason } => GeomError::Domain {
            point,
            reason: format!("{reason} (geodesic exit at t = {t:.6})"),
        },
        other => other,
    })?;
    Ok(g.contract(v, v).into_iter().map(|c| -c).collect())
}

/// Runs `steps` RK4 steps of size `t/steps`, calling `visit` after each.
fn rk4_geodesic(
    m: &KahlerModel,
    s0: &GeodesicState,
    t: f64,
    steps: usize,
    mut visit: impl FnMut(f64, &[C], &[C]),
) -> Result<(Vec<C>, Vec<C>)> {
    let h = t / steps as f64;
    let mut x = s0.position.hol();
    let mut v = s0.velocity.clone();
    let axpy = |a: &[C], b: &[C], s: f64| -> Vec<C> { a.iter().zip(b).map(|(p, q)| p + q * s).collect() };
    for k in 0..steps {
        let t0 = k as f64 * h;
        check_state(&x, &v, t0)?;
        let a1 = geodesic_accel(m, &x, &v, t0)?;
        let (x2, v2) = (axpy(&x, &v, h / 2.0), axpy(&v, &a1, h / 2.0));
        check_state(&x2, &v2, t0 + h / 2.0)?;
        let a2 = geodesic_accel(m, &x2, &v2, t0 + h / 2.0)?;
        let (x3, v3) = (axpy(&x, &v2, h / 2.0), axpy(&v, &a2, h / 2.0));
        check_state(&x3, &v3, t0 + h / 2.0)?;
        let a3 = geodesic_accel(m, &x3, &v3, t0 + h / 2.0)?;
        let (x4, v4) = (axpy(&x, &v3, h), axpy(&v, &a3, h));
        check_state(&x4, &v4, t0 + h)?;
        let a4 = geodesic_accel(m, &x4, &v4, t0 + h)?;
        for i in 0..x.len() {
            x[i] += (v[i] + (v2[i] + v3[i]) * 2.0 + v4[i]) * (h / 6.0);
            v[i] += (a1[i] + (a2[i] + a3[i]) * 2.0 + a4[i]) * (h / 6.0);
        }
        visit(t0 + h, &x, &v);
    }
    check_state(&x, &v, t)?;
    Ok((x, v))
}

/// Integrates `ẍᵃ + Γᵃ_{bc} ẋᵇ ẋᶜ = 0` to parameter `t` with `steps` and
/// `2·steps` RK4 steps; fails if the two disagree beyond [`ACCURACY_TOL`].
pub fn integrate_geodesic_with(m: &KahlerModel, s0: &GeodesicState, t: f64, steps: usize) -> Result<GeodesicSolution> {
    if steps == 0 || !t.is_finite() {
        return Err(GeomError::argument("geodesic needs a finite parameter and at least one step"));
    }
    m.check_domain(&s0.position)?;
    let (xc, vc) = rk4_geodesic(m, s0, t, steps, |_, _, _| {})?;
    let (xf, vf) = rk4_geodesic(m, s0, t, 2 * steps, |_, _, _| {})?;
    let est = max_diff(&xc, &xf).max(max_diff(&vc, &vf)) / 15.0;
    if !(est <= ACCURACY_TOL) {
        return Err(GeomError::Accuracy { estimate: est, tolerance: ACCURACY_TOL });
    }
    Ok(GeodesicSolution {
        state: GeodesicState { position: ChartPoint::from_hol(&xf)?, velocity: vf },
        error_estimate: est,
        steps: 2 * steps,
    })
}

pub fn integrate_geodesic(m: &KahlerModel, s0: &GeodesicState, t: f64) -> Result<GeodesicState> {
    Ok(integrate_geodesic_with(m, s0, t, default_steps(t))?.state)
}

/// The sampled trajectory `(t, state)` of the coarse run after its accuracy
/// has been confirmed by step doubling.
pub fn geodesic_trajectory(
    m: &KahlerModel,
    s0: &GeodesicState,
    t: f64,
    steps: usize,
) -> Result<Vec<(f64, GeodesicState)>> {
    integrate_geodesic_with(m, s0, t, steps)?;
    let mut rows = vec![(0.0, s0.clone())];
    let mut bad = None;
    rk4_geodesic(m, s0, t, steps, |tk, x, v| match ChartPoint::from_hol(x) {
        Ok(p) => rows.push((tk, GeodesicState { position: p, velocity: v.to_vec() })),
        Err(e) => bad = Some(e),
    })?;
    match bad {
        Some(e) => Err(e),
        None => Ok(rows),
    }
}

/// A path `[0, 1] → chart` with its velocity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSpec {
    pub from: ChartPoint,
    pub to: ChartPoint,
    /// Amplitude of the transverse bulge `bulge · sin(πt) · i(to − from)`;
    /// zero gives the straight segment.
    pub bulge: f64,
    pub steps: usize,
}

impl PathSpec {
    pub fn segment(from: ChartPoint, to: ChartPoint) -> Result<Self> {
        Self::detour(from, to, 0.0)
    }

    /// A curved path between the same endpoints. For endpoints on one
    /// vertical leaf the path stays in that leaf.
    pub fn detour(from: ChartPoint, to: ChartPoint, bulge: f64) -> Result<Self> {
        if from.n() != to.n() {
            return Err(GeomError::argument("path endpoints of different dimension"));
        }
        Ok(Self { from, to, bulge, steps: STEPS_PER_UNIT })
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    fn delta(&self) -> Vec<C> {
        self.to.hol().iter().zip(self.from.hol()).map(|(b, a)| b - a).collect()
    }

    pub fn position(&self, t: f64) -> Vec<C> {
        let s = self.bulge * (std::f64::consts::PI * t).sin();
        let bend = C::new(t, s);
        self.from.hol().iter().zip(self.delta()).map(|(a, d)| a + d * bend).collect()
    }

    pub fn velocity(&self, t: f64) -> Vec<C> {
        let ds = self.bulge * std::f64::consts::PI * (std::f64::consts::PI * t).cos();
        let bend = C::new(1.0, ds);
        self.delta().into_iter().map(|d| d * bend).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportResult {
    pub tensors: Vec<TensorValue>,
    /// Largest imaginary drift removed by reality re-projection.
    pub reality_drift: f64,
    pub error_estimate: f64,
}

/// `A^a_e = Γᵃ_{be} γ̇ᵇ` over the full frame.
fn transport_matrix(m: &KahlerModel, path: &PathSpec, t: f64, step: usize) -> Result<DMatrix<C>> {
    let x = path.position(t);
    let p = ChartPoint::from_hol(&x)?;
    let g = christoffel(m, &p).map_err(|e| match e {
        GeomError::Domain { point, reason } => GeomError::Domain {
            point,
            reason: format!("{reason} (transport step {step}, t = {t:.6})"),
        },
        other => other,
    })?;
    let d = 2 * m.n();
    let v = path.velocity(t);
    let mut a = DMatrix::from_element(2 * d, 2 * d, ZERO);
    for i in 0..d {
        for e in 0..d {
            let s: C = (0..d).map(|b| g.get(i, b, e) * v[b]).sum();
            a[(i, e)] = s;
            a[(d + i, d + e)] = s.conj();
        }
    }
    Ok(a)
}

/// `dT/dt = −A·T` on contravariant slots and `+Aᵀ·T` on covariant ones.
fn transport_rhs(a: &[C], t: &[C], valence: &[Slot], dim: usize, out: &mut [C]) {
    let rank = valence.len();
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        let mut stride = 1;
        for s in (0..rank).rev() {
            let is = (k / stride) % dim;
            let base = k - is * stride;
            for e in 0..dim {
                let c = match valence[s] {
                    Slot::Up => -a[is * dim + e],
                    Slot::Down => a[e * dim + is],
                };
                if c != ZERO {
                    acc += c * t[base + e * stride];
                }
            }
            stride *= dim;
        }
        *o = acc;
    }
}

fn rk4_transport(
    m: &KahlerModel,
    path: &PathSpec,
    ts: &[TensorValue],
    steps: usize,
    real: &[bool],
) -> Result<(Vec<TensorValue>, f64)> {
    let h = 1.0 / steps as f64;
    let mut cur = ts.to_vec();
    let mut drift: f64 = 0.0;
    for k in 0..steps {
        let t0 = k as f64 * h;
        let rows = |a: DMatrix<C>| -> Vec<C> { a.transpose().as_slice().to_vec() };
        let a1 = rows(transport_matrix(m, path, t0, k)?);
        let a2 = rows(transport_matrix(m, path, t0 + h / 2.0, k)?);
        let a4 = rows(transport_matrix(m, path, t0 + h, k)?);
        for (i, t) in cur.iter_mut().enumerate() {
            let valence = t.valence().to_vec();
            let dim = t.dim();
            let y = t.coeffs().to_vec();
            let len = y.len();
            let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; len], vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]);
            let step = |k: &[C], s: f64| -> Vec<C> { y.iter().zip(k).map(|(a, b)| a + b * s).collect() };
            transport_rhs(&a1, &y, &valence, dim, &mut k1);
            transport_rhs(&a2, &step(&k1, h / 2.0), &valence, dim, &mut k2);
            transport_rhs(&a2, &step(&k2, h / 2.0), &valence, dim, &mut k3);
            transport_rhs(&a4, &step(&k3, h), &valence, dim, &mut k4);
            for (j, c) in t.coeffs_mut().iter_mut().enumerate() {
                *c += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
            }
            if real[i] {
                drift = drift.max(t.reality_defect());
                *t = t.real_part();
            }
        }
    }
    Ok((cur, drift))
}

/// Parallel transport of several tensors along one path.
pub fn parallel_transport_many(m: &KahlerModel, path: &PathSpec, ts: &[TensorValue]) -> Result<TransportResult> {
    if path.steps == 0 {
        return Err(GeomError::argument("transport needs at least one step"));
    }
    for t in ts {
        if t.n() != m.n() {
            return Err(GeomError::argument("tensor frame does not match the model"));
        }
    }
    m.check_domain(&path.from)?;
    m.check_domain(&path.to)?;
    let real: Vec<bool> = ts.iter().map(|t| t.is_real(1e-12)).collect();
    let (coarse, _) = rk4_transport(m, path, ts, path.steps, &real)?;
    let (fine, drift) = rk4_transport(m, path, ts, 2 * path.steps, &real)?;
    let mut est: f64 = 0.0;
    for (c, f) in coarse.iter().zip(&fine) {
        est = est.max(c.dist(f)? / 15.0 / (1.0 + f.max_abs()));
    }
    if !(est <= ACCURACY_TOL) {
        return Err(GeomError::Accuracy { estimate: est, tolerance: ACCURACY_TOL });
    }
    Ok(TransportResult { tensors: fine, reality_drift: drift, error_estimate: est })
}

pub fn parallel_transport(m: &KahlerModel, path: &PathSpec, t: &TensorValue) -> Result<TensorValue> {
    let mut r = parallel_transport_many(m, path, std::slice::from_ref(t))?;
    Ok(r.tensors.remove(0))
}

/// Closed-form CP¹ quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cp1Query {
    /// `w(t)` on the vertical geodesic from `(z₀, w₀)` with `ẇ(0) = a`.
    Geodesic { z0: C, w0: C, a: C, t: f64 },
    /// Factor by which vertical transport from `w₀` to `w₁` scales `∂w`.
    TransportFactor { z0: C, w0: C, w1: C },
    /// The affine coordinate `−1/(z₀(1+z₀w))` of the leaf through `z₀`.
    AffineChart { z0: C, w: C },
    /// `(Γᶻ_{zz}, Γʷ_{ww})`.
    Christoffel { z: C, w: C },
    /// Coefficients `(dz, dw)` of `ω₂¹`.
    ConnectionForm { z: C, w: C },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Cp1Value {
    Scalar(C),
    Pair(C, C),
}

fn guard(z: C, w: C) -> Result<C> {
    let s = ONE + z * w;
    if s.norm() < crate::models::SINGULAR_GUARD {
        return Err(GeomError::domain(format!("(z={z}, w={w})"), "1 + zw = 0"));
    }
    Ok(s)
}

pub fn cp1_geodesic_w(z0: C, w0: C, a: C, t: f64) -> Result<C> {
    let s = guard(z0, w0)?;
    let den = -z0 * a * t + s;
    if den.norm() < crate::models::SINGULAR_GUARD {
        return Err(GeomError::domain(format!("(z={z0}, w={w0}, t={t})"), "geodesic reaches the pole"));
    }
    Ok((a * t + w0 * s) / den)
}

pub fn cp1_transport_factor(z0: C, w0: C, w1: C) -> Result<C> {
    let r = guard(z0, w1)? / guard(z0, w0)?;
    Ok(r * r)
}

pub fn cp1_affine_chart(z0: C, w: C) -> Result<C> {
    if z0.norm() < crate::models::SINGULAR_GUARD {
        return Err(GeomError::domain(format!("(z0={z0})"), "affine chart needs z₀ ≠ 0"));
    }
    Ok(-ONE / (z0 * guard(z0, w)?))
}

pub fn cp1_christoffel(z: C, w: C) -> Result<(C, C)> {
    let s = guard(z, w)?;
    Ok((-2.0 * w / s, -2.0 * z / s))
}

/// `ω₂¹ = −i(w dz − z dw)/(1+zw)` as `(dz, dw)` coefficients.
pub fn cp1_connection_form(z: C, w: C) -> Result<(C, C)> {
    let s = guard(z, w)?;
    let mi = C::new(0.0, -1.0);
    Ok((mi * w / s, -mi * z / s))
}

pub fn cp1_closed_forms(q: Cp1Query) -> Result<Cp1Value> {
    Ok(match q {
        Cp1Query::Geodesic { z0, w0, a, t } => Cp1Value::Scalar(cp1_geodesic_w(z0, w0, a, t)?),
        Cp1Query::TransportFactor { z0, w0, w1 } => Cp1Value::Scalar(cp1_transport_factor(z0, w0, w1)?),
        Cp1Query::AffineChart { z0, w } => Cp1Value::Scalar(cp1_affine_chart(z0, w)?),
        Cp1Query::Christoffel { z, w } => {
            let (a, b) = cp1_christoffel(z, w)?;
            Cp1Value::Pair(a, b)
        }
        Cp1Query::ConnectionForm { z, w } => {
            let (a, b) = cp1_connection_form(z, w)?;
            Cp1Value::Pair(a, b)
        }
    })
}

/// Affine structure of the vertical CP¹ leaf through `z₀ ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineChartCp1 {
    pub z0: C,
}

impl AffineChartCp1 {
    pub fn new(z0: C) -> Result<Self> {
        if z0.norm() < crate::models::SINGULAR_GUARD {
            return Err(GeomError::argument("affine chart needs z₀ ≠ 0"));
        }
        Ok(Self { z0 })
    }

    pub fn map(&self, w: C) -> Result<C> {
        cp1_affine_chart(self.z0, w)
    }

    /// The homography `M_a`, acting on `w` by Möbius transformation.
    pub fn homography(&self, a: C) -> Matrix2<C> {
        let z = self.z0;
        Matrix2::new(ONE + a * z, a, -a * z * z, ONE - a * z)
    }

    /// The conjugator `P_{z₀}` with `M_a = P·[[1,a],[0,1]]·P⁻¹`.
    pub fn conjugator(&self) -> Matrix2<C> {
        let z = self.z0;
        Matrix2::new(z, ONE, -z * z, ZERO)
    }

    pub fn translation(a: C) -> Matrix2<C> {
        Matrix2::new(ONE, a, ZERO, ONE)
    }

    pub fn mobius(m: &Matrix2<C>, w: C) -> C {
        (m[(0, 0)] * w + m[(0, 1)]) / (m[(1, 0)] * w + m[(1, 1)])
    }
}

/// `φ(exp(a·∂w)) − φ(0)` with the exponential map computed by integrating the
/// geodesic from `(z₀, 0)`; equals `a` for the affine chart `φ`.
pub fn exp_chart(m: &KahlerModel, z0: C, a: C, steps: usize) -> Result<C> {
    let chart = AffineChartCp1::new(z0)?;
    let s0 = GeodesicState::new(ChartPoint::new1(z0, ZERO)?, vec![ZERO, a])?;
    let end = integrate_geodesic_with(m, &s0, 1.0, steps)?.state;
    Ok(chart.map(end.position.w()[0])? - chart.map(ZERO)?)
}
