//! The Eguchi-Hanson hyper-Kähler structure on `T*CP¹` in the holomorphic
//! cotangent coordinates `(z, u)`, where `(z, u)` is the covector `u dz`.
//!
//! Tensors live on the frame `(∂z, ∂u, ∂z̄, ∂ū)`, i.e. a one-dimensional
//! [`ChartPoint`] with `w = u`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::calculus::{ChartPoint, ComplexJet2, Expr, ExprField, TensorValue, Vars, C, I, ONE, ZERO};
use crate::error::{GeomError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CotangentPoint {
    pub z: C,
    pub u: C,
}

impl CotangentPoint {
    pub fn new(z: C, u: C) -> Result<Self> {
        let p = Self { z, u };
        p.chart()?;
        Ok(p)
    }

    pub fn chart(&self) -> Result<ChartPoint> {
        ChartPoint::new1(self.z, self.u)
    }

    /// `r = 4uū(1+zz̄)²`, the squared Fubini-Study norm of `u dz`.
    pub fn r(&self) -> f64 {
        let q = 1.0 + self.z.norm_sqr();
        4.0 * self.u.norm_sqr() * q * q
    }

    /// The point `(z, e^{iθ}u)`.
    pub fn rotate(&self, theta: f64) -> Self {
        Self { z: self.z, u: self.u * C::from_polar(1.0, theta) }
    }
}

/// The radial potential `y(r)` with integration constant `a = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EHPotential {
    pub r: f64,
    pub y: f64,
    pub dy: f64,
    pub d2y: f64,
    pub a: f64,
}

impl EHPotential {
    /// `|8r²y′y″ + 8r(y′)² − 1|`.
    pub fn ode_residual(&self) -> f64 {
        let r = self.r;
        (8.0 * r * r * self.dy * self.d2y + 8.0 * r * self.dy * self.dy - 1.0).abs()
    }
}

/// `y = √(1+r) − arcoth(√(1+r))`, with `arcoth √(1+r) = ln(1+√(1+r)) − ½ ln r`.
/// At `r = 0` the potential has a logarithmic singularity and the limits
/// `y → −∞`, `y′ → +∞`, `y″ → −∞` are returned.
pub fn eh_potential(r: f64) -> Result<EHPotential> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(GeomError::argument(format!("radius must be finite and non-negative, got {r}")));
    }
    if r == 0.0 {
        return Ok(EHPotential { r, y: f64::NEG_INFINITY, dy: f64::INFINITY, d2y: f64::NEG_INFINITY, a: 1.0 });
    }
    let s = (1.0 + r).sqrt();
    let arcoth = (1.0 + s).ln() - 0.5 * r.ln();
    Ok(EHPotential {
        r,
        y: s - arcoth,
        dy: s / (2.0 * r),
        d2y: -(r + 2.0) / (4.0 * r * r * s),
        a: 1.0,
    })
}

/// The potential `φ(z, u) = y(4uū(1+zz̄)²)` as an expression in `(z, u, z̄, ū)`.
pub fn potential_expr() -> Expr {
    let v = Vars::new(1);
    let q = Expr::one() + v.z(0) * v.zb(0);
    let r = v.w(0) * v.wb(0) * 4.0 * q.powi(2);
    let s = (Expr::one() + r.clone()).sqrt();
    s.clone() - (Expr::one() + s).ln() + r.ln() * 0.5
}

/// The explicit second partials `[φ_zz̄, φ_uz̄, φ_zū, φ_uū]` as expressions.
pub fn phi_exprs() -> [Expr; 4] {
    let v = Vars::new(1);
    let (z, u, zb, ub) = (v.z(0), v.w(0), v.zb(0), v.wb(0));
    let q = Expr::one() + z.clone() * zb.clone();
    let r = u.clone() * ub.clone() * 4.0 * q.clone().powi(2);
    let s = (Expr::one() + r.clone()).sqrt();
    [
        (Expr::one() + r * q.clone()) / (s.clone() * q.clone().powi(2)),
        ub * z * 2.0 * q.clone() / s.clone(),
        u * zb * 2.0 * q.clone() / s.clone(),
        q.powi(2) / s,
    ]
}

/// The Kähler forms `(ω_I, ω_J, ω_K)` as fields.
pub fn eh_forms() -> (ExprField, ExprField, ExprField) {
    let [zz, uz, zu, uu] = phi_exprs();
    let half_i = C::new(0.0, 0.5);
    let omega_i = ExprField::two_form(1, vec![(0, 2, zz), (1, 2, uz), (0, 3, zu), (1, 3, uu)])
        .expect("in range")
        .scale(half_i);
    let omega_j = ExprField::two_form(1, vec![(0, 1, Expr::one()), (2, 3, Expr::one())])
        .expect("in range")
        .scale(C::new(-0.5, 0.0));
    let omega_k = ExprField::two_form(1, vec![(0, 1, Expr::one()), (2, 3, -Expr::one())])
        .expect("in range")
        .scale(half_i);
    (omega_i, omega_j, omega_k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EHFrame {
    pub point: CotangentPoint,
    pub potential: EHPotential,
    /// `[φ_zz̄, φ_uz̄, φ_zū, φ_uū]`.
    pub phi: [C; 4],
    pub g: TensorValue,
    pub i: TensorValue,
    pub j: TensorValue,
    pub k: TensorValue,
    pub omega_i: TensorValue,
    pub omega_j: TensorValue,
    pub omega_k: TensorValue,
}

fn endo(entries: &[(usize, usize, C)]) -> TensorValue {
    let mut m = DMatrix::from_element(4, 4, ZERO);
    for &(a, b, v) in entries {
        m[(a, b)] = v;
    }
    TensorValue::endomorphism(&m).expect("square")
}

fn form(entries: &[(usize, usize, C)]) -> TensorValue {
    let mut m = DMatrix::from_element(4, 4, ZERO);
    for &(a, b, v) in entries {
        m[(a, b)] += v;
        m[(b, a)] -= v;
    }
    TensorValue::bilinear(&m).expect("square")
}

/// The explicit hyper-Kähler tensors at `p`.
pub fn eh_frame(p: &CotangentPoint) -> Result<EHFrame> {
    p.chart()?;
    let potential = eh_potential(p.r())?;
    let q = 1.0 + p.z.norm_sqr();
    let s = (1.0 + potential.r).sqrt();
    let zz = C::new((1.0 + potential.r * q) / (s * q * q), 0.0);
    let uz = p.u.conj() * p.z * (2.0 * q / s);
    let zu = p.u * p.z.conj() * (2.0 * q / s);
    let uu = C::new(q * q / s, 0.0);
    let (z, u, zb, ub) = (0, 1, 2, 3);
    let half = 0.5;
    let g = TensorValue::bilinear(&DMatrix::from_fn(4, 4, |a, b| match (a.min(b), a.max(b)) {
        (0, 2) => zz * half,
        (1, 2) => uz * half,
        (0, 3) => zu * half,
        (1, 3) => uu * half,
        _ => ZERO,
    }))?;
    let i = endo(&[(z, z, I), (u, u, I), (zb, zb, -I), (ub, ub, -I)]);
    // J(∂z) = φ_zū ∂z̄ − φ_zz̄ ∂ū, and so on; column b holds J(∂_b)
    let jcols = [
        (z, [(zb, zu), (ub, -zz)]),
        (zb, [(z, uz), (u, -zz)]),
        (u, [(zb, uu), (ub, -uz)]),
        (ub, [(z, uu), (u, -zu)]),
    ];
    let mut je = Vec::new();
    let mut ke = Vec::new();
    for (b, col) in jcols {
        // K = −i on the (1,0) columns and +i on the (0,1) columns
        let phase = if b < 2 { -I } else { I };
        for (a, v) in col {
            je.push((a, b, v));
            ke.push((a, b, v * phase));
        }
    }
    let j = endo(&je);
    let k = endo(&ke);
    let omega_i = form(&[(z, zb, zz), (u, zb, uz), (z, ub, zu), (u, ub, uu)]).scale(C::new(0.0, 0.5));
    let omega_j = form(&[(z, u, ONE), (zb, ub, ONE)]).scale(C::new(-0.5, 0.0));
    let omega_k = form(&[(z, u, ONE), (zb, ub, -ONE)]).scale(C::new(0.0, 0.5));
    Ok(EHFrame { point: *p, potential, phi: [zz, uz, zu, uu], g, i, j, k, omega_i, omega_j, omega_k })
}

/// `|φ_zz̄ φ_uū − φ_uz̄ φ_zū − 1|`.
pub fn monge_ampere_residual(p: &CotangentPoint) -> Result<f64> {
    let f = eh_frame(p)?;
    let [zz, uz, zu, uu] = f.phi;
    Ok((zz * uu - uz * zu - ONE).norm())
}

/// Residuals on an `n × n` grid of `z = x`, `u = iy` with `x, y ∈ [−extent, extent]`.
pub fn monge_ampere_grid(n: usize, extent: f64) -> Result<Vec<(f64, f64, f64)>> {
    let at = |k: usize| if n < 2 { 0.0 } else { -extent + 2.0 * extent * k as f64 / (n - 1) as f64 };
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (at(a), at(b));
            out.push((x, y, monge_ampere_residual(&CotangentPoint::new(C::new(x, 0.0), C::new(0.0, y))?)?));
        }
    }
    Ok(out)
}

/// `ω = ω_J + iω_K` at `p`.
pub fn canonical_form(f: &EHFrame) -> Result<TensorValue> {
    f.omega_j.add(&f.omega_k.scale(I))
}

/// `|ω∧ω̄ − 2ω_I∧ω_I|`.
pub fn wedge_identity_defect(f: &EHFrame) -> Result<f64> {
    let w = canonical_form(f)?;
    let lhs = w.wedge(&w.conj_tensor())?;
    let rhs = f.omega_i.wedge(&f.omega_i)?.scale(C::new(2.0, 0.0));
    lhs.dist(&rhs)
}

/// `|Φ*g − g|` for `Φ(z, u) = (z, e^{iθ}u)`.
pub fn u1_defect(p: &CotangentPoint, theta: f64) -> Result<f64> {
    let g = eh_frame(p)?.g;
    let moved = eh_frame(&p.rotate(theta))?.g;
    let e = C::from_polar(1.0, theta);
    let push = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, e, ONE, e.conj()]));
    let back = moved.pullback_matrix(&push)?;
    Ok((back - g.to_matrix()?).iter().fold(0.0, |m, c| m.max(c.norm())))
}

/// On the zero section, `g`, `ω_I` and `I` restricted to `(∂z, ∂z̄)` against
/// the Fubini-Study data.
pub fn zero_section_defect(z: C) -> Result<f64> {
    let f = eh_frame(&CotangentPoint::new(z, ZERO)?)?;
    let mut push = DMatrix::from_element(4, 2, ZERO);
    push[(0, 0)] = ONE;
    push[(2, 1)] = ONE;
    let h = 1.0 / (1.0 + z.norm_sqr()).powi(2);
    let g0 = DMatrix::from_row_slice(2, 2, &[ZERO, C::new(h / 2.0, 0.0), C::new(h / 2.0, 0.0), ZERO]);
    let w0 = DMatrix::from_row_slice(2, 2, &[ZERO, C::new(0.0, h / 2.0), C::new(0.0, -h / 2.0), ZERO]);
    let i0 = DMatrix::from_row_slice(2, 2, &[I, ZERO, ZERO, -I]);
    let dg = f.g.pullback_matrix(&push)? - g0;
    let dw = f.omega_i.pullback_matrix(&push)? - w0;
    let di = f.i.to_matrix()? * &push - &push * i0;
    Ok(dg.iter().chain(dw.iter()).chain(di.iter()).fold(0.0, |m, c| m.max(c.norm())))
}

/// Largest gap between the explicit second partials and the Hessian of
/// `φ = y(r)` computed by jets.
pub fn potential_consistency_defect(p: &CotangentPoint) -> Result<f64> {
    if p.u.norm() == 0.0 {
        return Err(GeomError::domain(format!("(z={}, u={})", p.z, p.u), "potential is singular on the zero section"));
    }
    let jet: ComplexJet2 = potential_expr().jet_eval(&p.chart()?)?;
    let f = eh_frame(p)?;
    let pairs = [(0, 2), (1, 2), (0, 3), (1, 3)];
    Ok(pairs.iter().zip(f.phi).fold(0.0, |m, (&(a, b), v)| m.max((jet.hess(a, b) - v).norm())))
}

impl EHFrame {
    /// `ω_A = g(A·, ·)` for each `A`, against the explicit forms.
    pub fn kahler_form_defect(&self) -> Result<f64> {
        let mut d: f64 = 0.0;
        for (a, w) in [(&self.i, &self.omega_i), (&self.j, &self.omega_j), (&self.k, &self.omega_k)] {
            d = d.max(self.g.precompose_first(a)?.dist(w)?);
        }
        Ok(d)
    }

    pub fn quaternionic_defect(&self) -> Result<f64> {
        let minus = TensorValue::identity(1).scale(-ONE);
        let pairs = [
            (self.i.compose(&self.i)?, minus.clone()),
            (self.j.compose(&self.j)?, minus.clone()),
            (self.k.compose(&self.k)?, minus),
            (self.i.compose(&self.j)?, self.k.clone()),
            (self.j.compose(&self.i)?, self.k.scale(-ONE)),
        ];
        let mut d: f64 = 0.0;
        for (a, b) in &pairs {
            d = d.max(a.dist(b)?);
        }
        Ok(d)
    }

    pub fn orthogonality_defect(&self) -> Result<f64> {
        let mut d: f64 = 0.0;
        for a in [&self.i, &self.j, &self.k] {
            d = d.max(self.g.pullback_by(a)?.dist(&self.g)?);
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::exterior_derivative;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn pt(z: C, u: C) -> CotangentPoint {
        CotangentPoint::new(z, u).unwrap()
    }

    #[test]
    fn potential_examples() {
        let p = eh_potential(3.0).unwrap();
        assert_abs_diff_eq!(p.dy, 1.0 / 3.0, epsilon = 1e-15);
        // arcoth 2 = ½ ln 3
        assert_abs_diff_eq!(p.y, 2.0 - 0.5 * 3f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(p.y, 1.450694, epsilon = 1e-6);
        assert!(eh_potential(1.0).unwrap().ode_residual() < 1e-10);
        assert!(eh_potential(-1.0).is_err());
        assert_eq!(eh_potential(0.0).unwrap().y, f64::NEG_INFINITY);
    }

    #[test]
    fn potential_matches_textbook_arcoth() {
        for r in [1e-3, 0.5, 3.0, 40.0] {
            let x = (1.0f64 + r).sqrt();
            let textbook = x - 0.5 * ((x + 1.0) / (x - 1.0)).ln();
            assert_abs_diff_eq!(eh_potential(r).unwrap().y, textbook, epsilon = 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for r in [0.1, 1.0, 7.0] {
            let h = 1e-4 * r;
            let y = |r| eh_potential(r).unwrap().y;
            let dy = |r| eh_potential(r).unwrap().dy;
            let p = eh_potential(r).unwrap();
            assert!(((y(r + h) - y(r - h)) / (2.0 * h) - p.dy).abs() < 1e-6 * p.dy.abs().max(1.0));
            assert!(((dy(r + h) - dy(r - h)) / (2.0 * h) - p.d2y).abs() < 1e-6 * p.d2y.abs().max(1.0));
        }
    }

    #[test]
    fn frame_examples() {
        let f = eh_frame(&pt(ZERO, ZERO)).unwrap();
        assert_eq!(f.phi, [ONE, ZERO, ZERO, ONE]);
        assert_eq!(monge_ampere_residual(&pt(ZERO, ZERO)).unwrap(), 0.0);
        let f = eh_frame(&pt(ZERO, c(0.5, 0.0))).unwrap();
        assert_abs_diff_eq!(f.potential.r, 1.0, epsilon = 1e-15);
        assert!((f.phi[3] - C::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(f.omega_j.get(&[0, 1]), c(-0.5, 0.0));
        assert_eq!(f.omega_j.get(&[2, 3]), c(-0.5, 0.0));
        assert!(monge_ampere_residual(&pt(c(0.5, 0.0), c(0.2, 0.1))).unwrap() < 1e-10);
        assert!(monge_ampere_residual(&pt(c(2.0, 0.0), c(1.0, 0.0))).unwrap() < 1e-9);
    }

    #[test]
    fn explicit_tensors_are_consistent() {
        for p in [pt(c(0.3, -0.2), c(0.7, 0.4)), pt(c(-1.5, 0.5), c(0.1, -0.9)), pt(ZERO, ZERO)] {
            let f = eh_frame(&p).unwrap();
            assert!(f.quaternionic_defect().unwrap() < 1e-10);
            assert!(f.orthogonality_defect().unwrap() < 1e-10);
            assert!(f.kahler_form_defect().unwrap() < 1e-10);
            assert!(wedge_identity_defect(&f).unwrap() < 1e-9);
            assert!(f.g.is_real(1e-15) && f.j.is_real(1e-15) && f.k.is_real(1e-15));
        }
    }

    #[test]
    fn canonical_form_is_du_dz() {
        let f = eh_frame(&pt(c(0.1, 0.2), c(0.3, 0.4))).unwrap();
        let w = canonical_form(&f).unwrap();
        assert_eq!(w.get(&[1, 0]), ONE);
        assert_eq!(w.get(&[0, 1]), -ONE);
        assert_eq!(w.get(&[2, 3]), ZERO);
    }

    #[test]
    fn symmetries_and_zero_section() {
        let p = pt(c(0.4, -0.3), c(-0.6, 0.2));
        for theta in [0.3, 1.7, -2.5] {
            assert!(u1_defect(&p, theta).unwrap() < 1e-9);
        }
        for z in [ZERO, c(0.5, 0.5), c(-2.0, 1.0)] {
            assert!(zero_section_defect(z).unwrap() < 1e-10);
        }
    }

    #[test]
    fn forms_are_closed() {
        let (wi, wj, wk) = eh_forms();
        for p in [pt(c(0.3, -0.2), c(0.7, 0.4)), pt(c(1.2, 0.5), c(0.0, 0.3))] {
            let cp = p.chart().unwrap();
            assert!(exterior_derivative(&wi, &cp).unwrap().max_abs() < 1e-8);
            assert!(exterior_derivative(&wj, &cp).unwrap().max_abs() < 1e-8);
            assert!(exterior_derivative(&wk, &cp).unwrap().max_abs() < 1e-8);
            use crate::calculus::TensorField;
            assert!(wi.eval(&cp).unwrap().dist(&eh_frame(&p).unwrap().omega_i).unwrap() < 1e-14);
        }
    }

    #[test]
    fn potential_hessian_matches_explicit_partials() {
        for p in [pt(c(0.3, -0.2), c(0.7, 0.4)), pt(c(-1.0, 0.1), c(0.05, 0.02)), pt(c(2.0, 0.0), c(1.0, 0.0))] {
            assert!(potential_consistency_defect(&p).unwrap() < 1e-8);
        }
        assert!(potential_consistency_defect(&pt(ONE, ZERO)).is_err());
    }

    #[test]
    fn ode_residual_over_range() {
        // the two terms are each of size ~2/r and cancel, so rounding alone
        // leaves a residual of order ε/r for small r
        for k in 0..=900 {
            let r = 10f64.powf(-6.0 + k as f64 / 100.0);
            let res = eh_potential(r).unwrap().ode_residual();
            assert!(res < 16.0 * f64::EPSILON * (1.0 + 1.0 / r), "r = {r}: {res}");
            if r >= 1e-5 {
                assert!(res < 1e-10, "r = {r}: {res}");
            }
        }
    }

    #[test]
    fn monge_ampere_on_grid() {
        let g = monge_ampere_grid(50, 2.0).unwrap();
        assert_eq!(g.len(), 2500);
        assert!(g.iter().all(|&(_, _, r)| r < 1e-10));
    }
}
