//! The holomorphic Levi-Civita (bi-Lagrangian) connection of `g = −i g₀ᶜ`, its
//! curvature, Bott partial connections and the cotangent-bundle checks.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::bilag::{f_structure, omega_field};
use crate::calculus::{
    ChartPoint, ComplexJet2, Differentiable, Expr, ExprField, Jet1, JetAlgebra, Slot, TensorField, TensorValue,
    Vars, C, ZERO,
};
use crate::error::{GeomError, Result};
use crate::models::KahlerModel;
use crate::report::ValidationReport;
use crate::sampling;

/// Smallest admissible pivot in the Bott solve.
pub const PIVOT_THRESHOLD: f64 = 1e-10;
/// Tolerance of the foliation-tangency test.
pub const TANGENCY_TOL: f64 = 1e-8;

/// `Γᵃ_{bc}` over holomorphic indices `a, b, c ∈ (z¹..zⁿ, w¹..wⁿ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectionTable {
    n: usize,
    /// Row-major `[a][b][c]`, each index in `0..2n`.
    gamma: Vec<C>,
}

impl ConnectionTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> C {
        let d = 2 * self.n;
        self.gamma[(a * d + b) * d + c]
    }

    pub fn hol(&self) -> &[C] {
        &self.gamma
    }

    /// `Γ` over the full `4n` frame: conjugate block is the entrywise
    /// conjugate, mixed blocks vanish.
    pub fn full(&self, a: usize, b: usize, c: usize) -> C {
        let d = 2 * self.n;
        match (a < d, b < d, c < d) {
            (true, true, true) => self.get(a, b, c),
            (false, false, false) => self.get(a - d, b - d, c - d).conj(),
            _ => ZERO,
        }
    }

    /// `Γ(u, v)ᵃ = Γᵃ_{bc} uᵇ vᶜ` on holomorphic components.
    pub fn contract(&self, u: &[C], v: &[C]) -> Vec<C> {
        let d = 2 * self.n;
        (0..d)
            .map(|a| {
                let mut acc = ZERO;
                for b in 0..d {
                    for c in 0..d {
                        acc += self.get(a, b, c) * u[b] * v[c];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Holomorphic block `g_{ab}` of the metric, as jets.
fn metric_block<J: JetAlgebra>(m: &KahlerModel, p: &ChartPoint) -> Result<Vec<J>> {
    m.check_domain(p)?;
    let n = m.n();
    let d = 2 * n;
    let vars = p.vars();
    let nv = vars.len();
    let mut g = vec![J::constant(ZERO, nv); d * d];
    let half = C::new(0.0, -0.5);
    for j in 0..n {
        for k in 0..n {
            let h = m.h_expr(j, k);
            if h.is_zero() {
                continue;
            }
            let hj: J = h.jet_vars(&vars).ok_or_else(|| GeomError::domain(p, "singular metric coefficient"))?;
            let v = hj.scale(half);
            g[j * d + n + k] = v.clone();
            g[(n + k) * d + j] = v;
        }
    }
    Ok(g)
}

fn invert(p: &ChartPoint, g: &DMatrix<C>) -> Result<DMatrix<C>> {
    let lu = g.clone().full_piv_lu();
    let u = lu.u();
    let scale = g.iter().fold(0.0f64, |a, c| a.max(c.norm())).max(1e-300);
    if (0..u.nrows()).any(|i| u[(i, i)].norm() <= PIVOT_THRESHOLD * scale) {
        return Err(GeomError::domain(p, "metric is singular"));
    }
    lu.try_inverse().ok_or_else(|| GeomError::domain(p, "metric is singular"))
}

/// `½ gᵏˡ (∂_a g_{bl} + ∂_b g_{al} − ∂_l g_{ab})` given the inverse metric and
/// the metric partials in the codomain type `L`.
fn koszul<L: Clone + std::ops::Add<Output = L> + std::ops::Sub<Output = L>>(
    d: usize,
    ginv: &[L],
    dg: impl Fn(usize, usize, usize) -> L,
    mul: impl Fn(&L, &L) -> L,
    zero: L,
) -> Vec<L> {
    let mut out = vec![zero.clone(); d * d * d];
    for k in 0..d {
        for a in 0..d {
            for b in a..d {
                let mut acc = zero.clone();
                for l in 0..d {
                    let t = dg(a, b, l) + dg(b, a, l) - dg(l, a, b);
                    acc = acc + mul(&ginv[k * d + l], &t);
                }
                out[(k * d + a) * d + b] = acc.clone();
                out[(k * d + b) * d + a] = acc;
            }
        }
    }
    out
}

/// Christoffel symbols of the holomorphic metric at `p`.
pub fn christoffel(m: &KahlerModel, p: &ChartPoint) -> Result<ConnectionTable> {
    let n = m.n();
    let d = 2 * n;
    let g: Vec<Jet1> = metric_block(m, p)?;
    let g0 = DMatrix::from_fn(d, d, |a, b| g[a * d + b].value());
    let inv = invert(p, &g0)?;
    let ginv: Vec<C> = (0..d * d).map(|k| inv[(k / d, k % d)] * 0.5).collect();
    // ∂_a g_{bl} is the a-th partial of entry (b, l)
    let gamma = koszul(d, &ginv, |a, b, l| g[b * d + l].d(a), |x, y| x * y, ZERO);
    Ok(ConnectionTable { n, gamma })
}

/// Christoffel symbols with their first partials over the `4n` chart variables.
pub fn christoffel_jet(m: &KahlerModel, p: &ChartPoint) -> Result<Vec<Jet1>> {
    let d = 2 * m.n();
    let g: Vec<ComplexJet2> = metric_block(m, p)?;
    let nv = 2 * d;
    let g0 = DMatrix::from_fn(d, d, |a, b| g[a * d + b].value());
    let inv = invert(p, &g0)?;
    // ∂_c g⁻¹ = −g⁻¹ (∂_c g) g⁻¹
    let dinv: Vec<DMatrix<C>> = (0..nv)
        .map(|c| {
            let dgc = DMatrix::from_fn(d, d, |a, b| g[a * d + b].grad()[c]);
            -(&inv * dgc * &inv)
        })
        .collect();
    let ginv: Vec<Jet1> = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            Jet1::new(inv[(i, j)] * 0.5, dinv.iter().map(|m| m[(i, j)] * 0.5).collect())
        })
        .collect();
    Ok(koszul(
        d,
        &ginv,
        |a, b, l| g[b * d + l].partial(a),
        |x, y| x.clone() * y,
        Jet1::constant(ZERO, nv),
    ))
}

/// `∇_b T` at `p` for frame direction `b ∈ 0..4n`.
pub fn covariant_derivative(m: &KahlerModel, t: &dyn TensorField, b: usize, p: &ChartPoint) -> Result<TensorValue> {
    let n = m.n();
    let dim = 4 * n;
    if t.n() != n || b >= dim {
        return Err(GeomError::argument("covariant derivative: field or direction does not match model"));
    }
    let gamma = christoffel(m, p)?;
    let valence = t.valence();
    let jets = t.jets1(p)?;
    let vals = TensorValue::from_coeffs(valence.clone(), n, jets.iter().map(|j| j.value()).collect())?;
    let mut out = TensorValue::from_coeffs(valence.clone(), n, jets.iter().map(|j| j.d(b)).collect())?;
    for k in 0..out.coeffs().len() {
        let idx = out.multi_index(k);
        let mut acc = ZERO;
        for (s, slot) in valence.iter().enumerate() {
            let mut j = idx.clone();
            for e in 0..dim {
                j[s] = e;
                let v = vals.get(&j);
                if v == ZERO {
                    continue;
                }
                acc += match slot {
                    Slot::Up => gamma.full(idx[s], b, e) * v,
                    Slot::Down => -gamma.full(e, b, idx[s]) * v,
                };
            }
        }
        out.coeffs_mut()[k] += acc;
    }
    Ok(out)
}

/// `(∇_X Y)` holomorphic components: `Xᵇ ∂_b Yᵃ + Γᵃ_{bc} Xᵇ Yᶜ`.
pub fn covariant_along(m: &KahlerModel, x: &dyn TensorField, y: &dyn TensorField, p: &ChartPoint) -> Result<Vec<C>> {
    let d = 2 * m.n();
    let gamma = christoffel(m, p)?;
    let xv: Vec<C> = x.jets1(p)?.iter().map(|j| j.value()).collect();
    let yj = y.jets1(p)?;
    let yv: Vec<C> = yj.iter().map(|j| j.value()).collect();
    let g = gamma.contract(&xv[..d], &yv[..d]);
    Ok((0..d)
        .map(|a| (0..d).map(|b| xv[b] * yj[a].d(b)).sum::<C>() + g[a])
        .collect())
}

/// `Rˡ_{kab}` over holomorphic indices, convention
/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureValue {
    n: usize,
    /// Row-major `[l][k][a][b]`.
    r: Vec<C>,
}

impl CurvatureValue {
    pub fn get(&self, l: usize, k: usize, a: usize, b: usize) -> C {
        let d = 2 * self.n;
        self.r[((l * d + k) * d + a) * d + b]
    }

    /// `R(X, Y)` as an endomorphism of the `4n` frame.
    pub fn endomorphism(&self, x: &[C], y: &[C]) -> Result<TensorValue> {
        let d = 2 * self.n;
        let dim = 2 * d;
        if x.len() != dim || y.len() != dim {
            return Err(GeomError::argument("curvature arguments must be frame vectors"));
        }
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for l in 0..d {
            for k in 0..d {
                let mut hol = ZERO;
                let mut anti = ZERO;
                for a in 0..d {
                    for b in 0..d {
                        let r = self.get(l, k, a, b);
                        hol += r * x[a] * y[b];
                        anti += r.conj() * x[d + a] * y[d + b];
                    }
                }
                m[(l, k)] = hol;
                m[(d + l, d + k)] = anti;
            }
        }
        TensorValue::endomorphism(&m)
    }
}

pub fn curvature(m: &KahlerModel, p: &ChartPoint) -> Result<CurvatureValue> {
    let n = m.n();
    let d = 2 * n;
    let g = christoffel_jet(m, p)?;
    let gm = |a: usize, b: usize, c: usize| &g[(a * d + b) * d + c];
    let mut r = vec![ZERO; d * d * d * d];
    for l in 0..d {
        for k in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let mut v = gm(l, b, k).d(a) - gm(l, a, k).d(b);
                    for e in 0..d {
                        v += gm(l, a, e).value() * gm(e, b, k).value() - gm(l, b, e).value() * gm(e, a, k).value();
                    }
                    r[((l * d + k) * d + a) * d + b] = v;
                }
            }
        }
    }
    Ok(CurvatureValue { n, r })
}

pub fn curvature_endomorphism(m: &KahlerModel, p: &ChartPoint, x: &[C], y: &[C]) -> Result<TensorValue> {
    curvature(m, p)?.endomorphism(x, y)
}

/// `+1` for vertical, `−1` for horizontal, `None` if not tangent to either.
fn foliation_sign(f: &TensorValue, v: &[C]) -> Result<Option<i8>> {
    let fv = f.apply(v)?;
    let scale = v.iter().fold(1.0f64, |a, c| a.max(c.norm()));
    let dist = |s: f64| fv.iter().zip(v).fold(0.0f64, |a, (x, y)| a.max((x - y * s).norm()));
    if dist(1.0) <= TANGENCY_TOL * scale {
        Ok(Some(1))
    } else if dist(-1.0) <= TANGENCY_TOL * scale {
        Ok(Some(-1))
    } else {
        Ok(None)
    }
}

/// Bott partial derivative `∇_X Y` for `X, Y` tangent to the same foliation of
/// the para-complex structure `f`, from `X·ω(Y,Z) = ω(∇_X Y, Z) + ω(Y,[X,Z])`
/// solved against the coordinate basis `Z = ∂_c`. Only the holomorphic
/// components of the fields enter; the result has a zero conjugate block.
pub fn bott_with(
    omega: &dyn TensorField,
    f: &TensorValue,
    x: &dyn TensorField,
    y: &dyn TensorField,
    p: &ChartPoint,
) -> Result<TensorValue> {
    let n = omega.n();
    let d = 2 * n;
    let xj = x.jets1(p)?;
    let yj = y.jets1(p)?;
    let hol_only = |j: &[Jet1]| -> Vec<C> { j.iter().take(d).map(|c| c.value()).chain((0..d).map(|_| ZERO)).collect() };
    let (xv, yv) = (hol_only(&xj), hol_only(&yj));
    let sx = foliation_sign(f, &xv)?;
    let sy = foliation_sign(f, &yv)?;
    let zero_x = xv.iter().all(|c| *c == ZERO);
    let zero_y = yv.iter().all(|c| *c == ZERO);
    let tangent = match (sx, sy) {
        (Some(a), Some(b)) => a == b || zero_x || zero_y,
        _ => false,
    };
    if !tangent {
        return Err(GeomError::argument("X and Y must be tangent to the same foliation"));
    }
    let w = omega.jets1(p)?;
    let dim = 4 * n;
    // RHS_c = Xᵃ ∂_a(ω_{bc} Yᵇ) + ω_{ba} Yᵇ ∂_c Xᵃ
    let rhs: Vec<C> = (0..d)
        .map(|c| {
            let mut acc = ZERO;
            for a in 0..d {
                for b in 0..d {
                    let wbc = &w[b * dim + c];
                    acc += xj[a].value() * (wbc.d(a) * yj[b].value() + wbc.value() * yj[b].d(a));
                    acc += w[b * dim + a].value() * yj[b].value() * xj[a].d(c);
                }
            }
            acc
        })
        .collect();
    let wt = DMatrix::from_fn(d, d, |c, e| w[e * dim + c].value());
    let lu = wt.clone().full_piv_lu();
    let u = lu.u();
    if (0..d).any(|i| u[(i, i)].norm() <= PIVOT_THRESHOLD) {
        return Err(GeomError::domain(p, "symplectic form degenerate in the Bott solve"));
    }
    let v = lu
        .solve(&nalgebra::DVector::from_vec(rhs))
        .ok_or_else(|| GeomError::domain(p, "Bott solve failed"))?;
    let mut comps: Vec<C> = v.iter().copied().collect();
    comps.extend((0..d).map(|_| ZERO));
    TensorValue::vector(n, comps)
}

pub fn bott_partial_derivative(
    m: &KahlerModel,
    x: &dyn TensorField,
    y: &dyn TensorField,
    p: &ChartPoint,
) -> Result<TensorValue> {
    m.check_domain(p)?;
    bott_with(&omega_field(m), &f_structure(m.n()), x, y, p)
}

/// `T*ℂⁿ` with base coordinates `q` in the `z` slots and fiber coordinates `p`
/// in the `w` slots.
#[derive(Clone, Debug)]
pub struct CotangentChart {
    pub n: usize,
    /// `ξ = pᵢ dqⁱ`
    pub xi: ExprField,
    /// `ω = dpᵢ ∧ dqⁱ`
    pub omega: ExprField,
}

impl CotangentChart {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GeomError::argument("cotangent chart needs n ≥ 1"));
        }
        let v = Vars::new(n);
        let mut xi = vec![Expr::zero(); 4 * n];
        for (i, c) in xi.iter_mut().take(n).enumerate() {
            *c = v.w(i);
        }
        let xi = ExprField::one_form(n, xi)?;
        let omega = ExprField::two_form(n, (0..n).map(|i| (n + i, i, Expr::one())).collect())?;
        Ok(Self { n, xi, omega })
    }
}

/// A fiber-tangent field `Σ bⱼ(q, p) ∂pⱼ` with random quadratic coefficients.
pub fn random_fiber_field(n: usize, rng: &mut impl Rng) -> ExprField {
    let v = Vars::new(n);
    let coord = |i: usize| if i < n { v.z(i) } else { v.w(i - n) };
    let mut comps = vec![Expr::zero(); 2 * n];
    for c in comps.iter_mut().skip(n) {
        let mut e = Expr::c(sampling::box_point(rng, 1.0));
        for i in 0..2 * n {
            e = e + coord(i) * sampling::box_point(rng, 1.0);
            for j in i..2 * n {
                e = e + coord(i) * coord(j) * sampling::box_point(rng, 1.0);
            }
        }
        *c = e;
    }
    ExprField::hol_vector(n, comps).expect("2n components")
}

/// Verifies `ω = dξ` and that the Bott derivative of fiber-tangent fields is
/// the componentwise fiber derivative `Xⁱ ∂Yʲ/∂pᵢ ∂pⱼ`.
pub fn cotangent_canonical_check(n: usize, samples: usize, seed: u64) -> Result<ValidationReport> {
    if samples == 0 {
        return Err(GeomError::argument("cotangent check needs at least one sample"));
    }
    let chart = CotangentChart::new(n)?;
    let f = f_structure(n);
    let mut rng = sampling::rng(seed);
    let mut dxi: f64 = 0.0;
    let mut bott: f64 = 0.0;
    for _ in 0..samples {
        let z = (0..n).map(|_| sampling::disk_point(&mut rng, 2.0)).collect();
        let w = (0..n).map(|_| sampling::disk_point(&mut rng, 2.0)).collect();
        let p = ChartPoint::new(z, w)?;
        let d = crate::calculus::exterior_derivative(&chart.xi, &p)?;
        dxi = dxi.max(d.dist(&chart.omega.eval(&p)?)?);
        let x = random_fiber_field(n, &mut rng);
        let y = random_fiber_field(n, &mut rng);
        let got = bott_with(&chart.omega, &f, &x, &y, &p)?;
        let xj = x.jets1(&p)?;
        let yj = y.jets1(&p)?;
        let mut want = vec![ZERO; 4 * n];
        for (j, slot) in want.iter_mut().enumerate().skip(n).take(n) {
            *slot = (0..n).map(|i| xj[n + i].value() * yj[j].d(n + i)).sum();
        }
        let want = TensorValue::vector(n, want)?;
        bott = bott.max(got.dist(&want)? / (1.0 + want.max_abs()));
    }
    let mut r = ValidationReport::new();
    r.at_most("cotangent-dxi", "canonical symplectic form ω = dξ", dxi, 1e-12);
    r.at_most(
        "cotangent-bott",
        "Bott connection of the fibers is the vector-space affine structure",
        bott,
        1e-9,
    );
    Ok(r)
}

/// The orthonormal frame, coframe and connection form of `g` on CP¹ used to
/// cross-check the connection through Cartan's structure equations.
#[derive(Clone, Debug)]
pub struct CartanCoframe {
    pub alpha: Expr,
    pub e1: ExprField,
    pub e2: ExprField,
    pub chi1: ExprField,
    pub chi2: ExprField,
    /// `ω₂¹ = −i(w dz − z dw)/(1+zw)`
    pub omega21: ExprField,
}

impl CartanCoframe {
    pub fn cp1() -> Self {
        let v = Vars::new(1);
        let s = Expr::one() + v.z(0) * v.w(0);
        let alpha = s.clone() * C::new(1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt());
        let i = C::new(0.0, 1.0);
        let e1 = ExprField::hol_vector(1, vec![alpha.clone(), alpha.clone()]).expect("2 comps");
        let e2 = ExprField::hol_vector(1, vec![alpha.clone() * i, alpha.clone() * -i]).expect("2 comps");
        let inv2a = Expr::one() / (alpha.clone() * 2.0);
        let inv2ia = Expr::one() / (alpha.clone() * (i * 2.0));
        let chi1 = ExprField::one_form(1, vec![inv2a.clone(), inv2a, Expr::zero(), Expr::zero()]).expect("4 comps");
        let chi2 = ExprField::one_form(1, vec![inv2ia.clone(), -inv2ia, Expr::zero(), Expr::zero()]).expect("4 comps");
        let omega21 = connection_form_field(-i);
        Self { alpha, e1, e2, chi1, chi2, omega21 }
    }
}

/// `c (w dz − z dw)/(1+zw)`.
pub fn connection_form_field(c: C) -> ExprField {
    let v = Vars::new(1);
    let s = Expr::one() + v.z(0) * v.w(0);
    let dz = v.w(0) * c / s.clone();
    let dw = -(v.z(0) * c) / s;
    ExprField::one_form(1, vec![dz, dw, Expr::zero(), Expr::zero()]).expect("4 comps")
}
