//! Almost hyper-Hermitian frames on the complexification: the linear frame on
//! the totally real locus, its extension by vertical parallel transport, and
//! the biquaternionic and para-quaternionic packages built from it.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bilag::{diagonal_pushforward, f_structure, h_structure, j_structure, kahler_data, omega_field};
use crate::calculus::{ChartPoint, Expr, ExprField, TensorField, TensorValue, Vars, C, I, ONE, ZERO};
use crate::error::{GeomError, Result};
use crate::flows::{parallel_transport_many, PathSpec};
use crate::models::KahlerModel;
use crate::report::ValidationReport;

/// Step of the five-point stencil used to differentiate transported frames.
pub const FD_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuaternionFrame {
    pub point: ChartPoint,
    pub g: TensorValue,
    pub i: TensorValue,
    pub j: TensorValue,
    pub k: TensorValue,
    pub omega_i: TensorValue,
    pub omega_j: TensorValue,
    pub omega_k: TensorValue,
    pub h: TensorValue,
    pub f: TensorValue,
    /// `G = HK`.
    pub gp: TensorValue,
    /// `((1+|z|²)/(1+zw))²` for CP¹ frames.
    pub eta: Option<C>,
}

impl QuaternionFrame {
    /// Completes `(g, I, J, K)` with the Kähler forms and the bicomplex pieces.
    pub fn assemble(point: ChartPoint, g: TensorValue, i: TensorValue, j: TensorValue, k: TensorValue) -> Result<Self> {
        let n = point.n();
        let h = h_structure(n);
        let f = h.compose(&j)?;
        let gp = h.compose(&k)?;
        Ok(Self {
            omega_i: g.precompose_first(&i)?,
            omega_j: g.precompose_first(&j)?,
            omega_k: g.precompose_first(&k)?,
            point,
            g,
            i,
            j,
            k,
            h,
            f,
            gp,
            eta: None,
        })
    }

    /// Largest coefficient difference over `g, I, J, K, ω_I, ω_J, ω_K`.
    pub fn dist(&self, other: &Self) -> Result<f64> {
        let pairs = [
            (&self.g, &other.g),
            (&self.i, &other.i),
            (&self.j, &other.j),
            (&self.k, &other.k),
            (&self.omega_i, &other.omega_i),
            (&self.omega_j, &other.omega_j),
            (&self.omega_k, &other.omega_k),
        ];
        let mut d: f64 = 0.0;
        for (a, b) in pairs {
            d = d.max(a.dist(b)?);
        }
        Ok(d)
    }
}

fn endo(n: usize, entries: &[(usize, usize, C)]) -> TensorValue {
    let d = 4 * n;
    let mut m = DMatrix::from_element(d, d, ZERO);
    for &(a, b, v) in entries {
        m[(a, b)] = v;
    }
    TensorValue::endomorphism(&m).expect("square frame matrix")
}

/// The linear hyper-Hermitian frame at `(z₀, z̄₀)`, from
/// `I(a + Jb) = I₀a − J I₀b` and `g(a + Jb, c + Jd) = g₀(a, c) + g₀(b, d)`.
/// On holomorphic components this is `I(p, q) = (i q̄, −i p̄)`.
pub fn diagonal_hh_frame(m: &KahlerModel, z0: &[C]) -> Result<QuaternionFrame> {
    let n = m.n();
    let p = ChartPoint::diagonal(z0.to_vec())?;
    let h = m.h_value(&p)?;
    let (z, w, zb, wb) = (0, n, 2 * n, 3 * n);
    let mut ie = Vec::new();
    for c in 0..n {
        ie.push((z + c, wb + c, I));
        ie.push((w + c, zb + c, -I));
        ie.push((zb + c, w + c, -I));
        ie.push((wb + c, z + c, I));
    }
    let i = endo(n, &ie);
    let j = j_structure(n);
    let k = i.compose(&j)?;
    let d = 4 * n;
    let mut gm = DMatrix::from_element(d, d, ZERO);
    for a in 0..n {
        for b in 0..n {
            let q = h[(a, b)] * 0.25;
            gm[(z + a, zb + b)] = q;
            gm[(wb + a, w + b)] = q;
            gm[(zb + a, z + b)] = q.conj();
            gm[(w + a, wb + b)] = q.conj();
        }
    }
    let g = TensorValue::bilinear(&gm)?;
    QuaternionFrame::assemble(p, g, i, j, k)
}

/// Transports the diagonal frame at `(z, z̄)` to `p` along the straight
/// vertical segment.
pub fn hh_frame_with(m: &KahlerModel, p: &ChartPoint, steps: usize, bulge: f64) -> Result<QuaternionFrame> {
    m.check_domain(p)?;
    let base = diagonal_hh_frame(m, p.z())?;
    let path = PathSpec::detour(base.point.clone(), p.clone(), bulge)?.with_steps(steps);
    let r = parallel_transport_many(m, &path, &[base.g, base.i, base.j, base.k])?;
    let mut t = r.tensors.into_iter();
    let (g, i, j, k) = (t.next().unwrap(), t.next().unwrap(), t.next().unwrap(), t.next().unwrap());
    let mut frame = QuaternionFrame::assemble(p.clone(), g, i, j, k)?;
    if m.name() == "cp1" {
        frame.eta = Some(cp1_eta(p.z()[0], p.w()[0]));
    }
    Ok(frame)
}

pub fn hh_frame(m: &KahlerModel, p: &ChartPoint) -> Result<QuaternionFrame> {
    hh_frame_with(m, p, crate::flows::STEPS_PER_UNIT, 0.0)
}

pub fn cp1_eta(z: C, w: C) -> C {
    let r = (ONE + z.norm_sqr()) / (ONE + z * w);
    r * r
}

/// `ω_I, ω_J, ω_K` of the CP¹ frame in closed form, as fields.
pub fn cp1_explicit_forms() -> (ExprField, ExprField, ExprField) {
    let v = Vars::new(1);
    let s = Expr::one() + v.z(0) * v.w(0);
    let sb = Expr::one() + v.zb(0) * v.wb(0);
    let q = Expr::one() + v.z(0) * v.zb(0);
    let x = ExprField::two_form(1, vec![(0, 1, Expr::one() / s.clone().powi(2))]).expect("in range");
    let xb = x.conjugate();
    let quarter_i = C::new(0.0, 0.25);
    let omega_i = x.add(&xb.scale(-ONE)).expect("same valence").scale(quarter_i);
    let omega_k = x.add(&xb).expect("same valence").scale(C::new(-0.25, 0.0));
    let a = Expr::one() / q.clone().powi(2);
    let b = q.powi(2) / (s.powi(2) * sb.powi(2));
    let omega_j = ExprField::two_form(1, vec![(0, 2, a), (1, 3, b)]).expect("in range").scale(quarter_i);
    (omega_i, omega_j, omega_k)
}

/// The CP¹ almost hyper-Hermitian frame in closed form.
pub fn cp1_explicit_frame(p: &ChartPoint) -> Result<QuaternionFrame> {
    if p.n() != 1 {
        return Err(GeomError::argument("CP¹ frame needs a one-dimensional point"));
    }
    let (z, w) = (p.z()[0], p.w()[0]);
    let s = ONE + z * w;
    if s.norm() < crate::models::SINGULAR_GUARD {
        return Err(GeomError::domain(p, "1 + zw = 0"));
    }
    let eta = cp1_eta(z, w);
    let q = 1.0 + z.norm_sqr();
    let a = 1.0 / (q * q);
    let b = q * q / s.norm_sqr().powi(2);
    let g = TensorValue::bilinear(&DMatrix::from_fn(4, 4, |r, c| match (r, c) {
        (0, 2) | (2, 0) => C::new(a / 4.0, 0.0),
        (1, 3) | (3, 1) => C::new(b / 4.0, 0.0),
        _ => ZERO,
    }))?;
    let i = endo(1, &[(0, 3, I * eta.conj()), (2, 1, -I * eta), (1, 2, -I / eta), (3, 0, I / eta.conj())]);
    let k = endo(1, &[(0, 3, eta.conj()), (2, 1, eta), (1, 2, -ONE / eta), (3, 0, -ONE / eta.conj())]);
    let (fi, fj, fk) = cp1_explicit_forms();
    let mut frame = QuaternionFrame::assemble(p.clone(), g, i, j_structure(1), k)?;
    frame.omega_i = fi.eval(p)?;
    frame.omega_j = fj.eval(p)?;
    frame.omega_k = fk.eval(p)?;
    frame.eta = Some(eta);
    Ok(frame)
}

fn max_dist(pairs: &[(TensorValue, TensorValue)]) -> Result<f64> {
    let mut d: f64 = 0.0;
    for (a, b) in pairs {
        d = d.max(a.dist(b)?);
    }
    Ok(d)
}

pub fn quaternionic_defect(f: &QuaternionFrame) -> Result<f64> {
    let minus = TensorValue::identity(f.point.n()).scale(-ONE);
    max_dist(&[
        (f.i.compose(&f.i)?, minus.clone()),
        (f.j.compose(&f.j)?, minus.clone()),
        (f.k.compose(&f.k)?, minus),
        (f.i.compose(&f.j)?, f.k.clone()),
        (f.j.compose(&f.i)?, f.k.scale(-ONE)),
    ])
}

pub fn biquaternionic_defect(f: &QuaternionFrame) -> Result<f64> {
    let minus = TensorValue::identity(f.point.n()).scale(-ONE);
    max_dist(&[
        (f.h.compose(&f.h)?, minus),
        (f.h.compose(&f.i)?, f.i.compose(&f.h)?),
        (f.h.compose(&f.j)?, f.j.compose(&f.h)?),
        (f.h.compose(&f.k)?, f.k.compose(&f.h)?),
    ])
}

pub fn para_quaternionic_defect(f: &QuaternionFrame) -> Result<f64> {
    let id = TensorValue::identity(f.point.n());
    max_dist(&[
        (f.f.compose(&f.f)?, id.clone()),
        (f.gp.compose(&f.gp)?, id),
        (f.i.compose(&f.f)?, f.gp.clone()),
        (f.f.compose(&f.i)?, f.gp.scale(-ONE)),
    ])
}

/// `max_A |g(A·, A·) − g|` over `A ∈ {H, I, J, K}`.
pub fn orthogonality_defect(f: &QuaternionFrame) -> Result<f64> {
    let mut pairs = Vec::new();
    for a in [&f.h, &f.i, &f.j, &f.k] {
        pairs.push((f.g.pullback_by(a)?, f.g.clone()));
    }
    max_dist(&pairs)
}

/// Partials of the Kähler forms of transported frames, by a five-point stencil
/// in the real and imaginary directions of each holomorphic coordinate,
/// assembled into Wirtinger derivatives and then `dω`.
pub fn frame_exterior_derivatives(m: &KahlerModel, p: &ChartPoint, steps: usize) -> Result<[TensorValue; 3]> {
    let n = m.n();
    let d = 2 * n;
    let dim = 4 * n;
    let hol = p.hol();
    // part[c][form] = ∂ω/∂(Re x_c) and ∂ω/∂(Im x_c)
    let mut dre = Vec::with_capacity(d);
    let mut dim_ = Vec::with_capacity(d);
    for c in 0..d {
        for (dir, out) in [(C::new(1.0, 0.0), &mut dre), (C::new(0.0, 1.0), &mut dim_)] {
            let mut acc: Vec<Vec<C>> = vec![vec![ZERO; dim * dim]; 3];
            for (k, wgt) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
                let mut x = hol.clone();
                x[c] += dir * (k * FD_STEP);
                let fr = hh_frame_with(m, &ChartPoint::from_hol(&x)?, steps, 0.0)?;
                for (s, om) in [&fr.omega_i, &fr.omega_j, &fr.omega_k].into_iter().enumerate() {
                    for (a, v) in acc[s].iter_mut().zip(om.coeffs()) {
                        *a += v * (wgt / (12.0 * FD_STEP));
                    }
                }
            }
            out.push(acc);
        }
    }
    let mut res = Vec::new();
    for s in 0..3 {
        // ∂/∂x = ½(∂_Re − i∂_Im), ∂/∂x̄ = ½(∂_Re + i∂_Im)
        let partial = |a: usize, e: usize| -> C {
            if a < d {
                (dre[a][s][e] - I * dim_[a][s][e]) * 0.5
            } else {
                (dre[a - d][s][e] + I * dim_[a - d][s][e]) * 0.5
            }
        };
        let mut out = TensorValue::zeros(vec![crate::calculus::Slot::Down; 3], n);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let v = partial(a, b * dim + c) - partial(b, a * dim + c) + partial(c, a * dim + b);
                    out.set(&[a, b, c], v);
                }
            }
        }
        res.push(out);
    }
    let mut it = res.into_iter();
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

/// Which claim about `dω_J` a model supports.
fn dj_claim(m: &KahlerModel) -> (&'static str, bool) {
    if m.is_flat() {
        ("dωJ-zero", true)
    } else if m.name() == "cp1" {
        ("dωJ-nonzero", false)
    } else {
        ("dωJ-norm", false)
    }
}

/// Every relation of the almost biquaternionic Hermitian structure at `p`.
pub fn relation_report(m: &KahlerModel, p: &ChartPoint) -> Result<ValidationReport> {
    relation_report_with(m, p, crate::flows::STEPS_PER_UNIT)
}

pub fn relation_report_with(m: &KahlerModel, p: &ChartPoint, steps: usize) -> Result<ValidationReport> {
    let fr = hh_frame_with(m, p, steps, 0.0)?;
    let mut r = algebraic_report(m, &fr)?;
    r.extend(derivative_report(m, p, steps)?);
    if p.is_diagonal(1e-14) {
        r.at_most(
            "diagonal-restriction",
            "g, I, ω_I extend g₀, I₀, ω₀",
            diagonal_restriction_defect(m, &fr)?,
            1e-10,
        );
    }
    Ok(r)
}

/// Pointwise algebraic relations of a frame.
pub fn algebraic_report(m: &KahlerModel, fr: &QuaternionFrame) -> Result<ValidationReport> {
    let mut r = ValidationReport::new();
    r.at_most("quaternionic", "I² = J² = K² = −1, IJ = −JI = K", quaternionic_defect(fr)?, 1e-10);
    r.at_most(
        "biquaternionic",
        "H² = −1 and H commutes with I, J, K",
        biquaternionic_defect(fr)?,
        1e-10,
    );
    r.at_most(
        "para-quaternionic",
        "F² = G² = 1, IF = −FI = G",
        para_quaternionic_defect(fr)?,
        1e-10,
    );
    r.at_most("orthogonality", "H, I, J, K are g-orthogonal", orthogonality_defect(fr)?, 1e-10);
    let w0 = omega_field(m).eval(&fr.point)?;
    let adm = fr.omega_i.sub(&fr.omega_k.scale(I))?.dist(&w0)?;
    r.at_most("admissibility", "ω_I − iω_K is the complex symplectic form", adm, 1e-9);
    let f_agree = fr.f.dist(&f_structure(m.n()))?;
    r.at_most("F-agreement", "F = HJ matches the bi-Lagrangian F", f_agree, 0.0);
    Ok(r)
}

/// Closedness of `ω_I, ω_K` and the size of `dω_J` at `p`.
pub fn derivative_report(m: &KahlerModel, p: &ChartPoint, steps: usize) -> Result<ValidationReport> {
    let mut r = ValidationReport::new();
    let [di, dj, dk] = frame_exterior_derivatives(m, p, steps)?;
    r.at_most("dωI-closed", "ω_I is closed", di.max_abs(), 1e-8);
    r.at_most("dωK-closed", "ω_K is closed", dk.max_abs(), 1e-8);
    let (name, zero) = dj_claim(m);
    if zero {
        r.at_most(name, "flat case is hyper-Kähler: dω_J = 0", dj.max_abs(), 1e-12);
    } else if name == "dωJ-nonzero" {
        r.at_least(name, "ω_J is not closed", dj.max_abs(), 1e-2);
    } else {
        r.at_least(name, "size of dω_J (no claim)", dj.max_abs(), 0.0);
    }
    Ok(r)
}

/// `max` defect of `ι*g = g₀`, `ι*ω_I = ω₀`, `I∘ι_* = ι_*∘I₀` at a diagonal frame.
pub fn diagonal_restriction_defect(m: &KahlerModel, fr: &QuaternionFrame) -> Result<f64> {
    let n = m.n();
    let push = diagonal_pushforward(n);
    let (g0, w0, i0) = kahler_data(m, fr.point.z())?;
    let dg = fr.g.pullback_matrix(&push)? - g0;
    let dw = fr.omega_i.pullback_matrix(&push)? - w0;
    let di = fr.i.to_matrix()? * &push - &push * i0;
    Ok(dg.iter().chain(dw.iter()).chain(di.iter()).fold(0.0, |a, c| a.max(c.norm())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::exterior_derivative;
    use crate::models::{build_model, ModelKind};
    use crate::sampling::sample_points;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn cp1() -> KahlerModel {
        build_model(ModelKind::Cp1).unwrap()
    }

    #[test]
    fn diagonal_frame_at_origin() {
        let f = diagonal_hh_frame(&cp1(), &[ZERO]).unwrap();
        assert_eq!(f.g.get(&[0, 2]), c(0.25, 0.0));
        assert_eq!(f.g.get(&[1, 3]), c(0.25, 0.0));
        // (p, q) = (0, 1) is the real vector ∂w + ∂w̄
        let v = f.i.apply(&[ZERO, ONE, ZERO, ONE]).unwrap();
        assert_eq!(v, vec![I, ZERO, -I, ZERO]);
    }

    #[test]
    fn diagonal_frame_matches_closed_form_on_diagonal() {
        let m = cp1();
        let z = c(0.5, 0.0);
        let f = diagonal_hh_frame(&m, &[z]).unwrap();
        let p = ChartPoint::diagonal(vec![z]).unwrap();
        let explicit = cp1_explicit_frame(&p).unwrap();
        assert!((explicit.eta.unwrap() - ONE).norm() < 1e-15);
        assert!(f.dist(&explicit).unwrap() < 1e-14);
        let want = 0.5 / 1.25f64.powi(2);
        assert!((f.g.get(&[0, 2]) * 2.0 - want).norm() < 1e-15);
        assert!((f.g.get(&[1, 3]) * 2.0 - want).norm() < 1e-15);
    }

    #[test]
    fn flat_frame_is_constant() {
        let flat = build_model(ModelKind::Flat(1)).unwrap();
        let a = diagonal_hh_frame(&flat, &[c(0.3, -0.7)]).unwrap();
        let b = diagonal_hh_frame(&flat, &[ZERO]).unwrap();
        assert_eq!(a.g, b.g);
        assert_eq!(a.i, b.i);
        let p = ChartPoint::new1(c(0.3, -0.7), c(1.0, 2.0)).unwrap();
        let t = hh_frame(&flat, &p).unwrap();
        assert!(t.dist(&a).unwrap() < 1e-15);
    }

    #[test]
    fn transported_frame_examples() {
        let m = cp1();
        let p = ChartPoint::new1(c(0.5, 0.0), ZERO).unwrap();
        let f = hh_frame(&m, &p).unwrap();
        assert!((f.eta.unwrap() - c(1.5625, 0.0)).norm() < 1e-15);
        let v = f.i.apply(&[ZERO, ONE, ZERO, ONE]).unwrap();
        assert!((v[0] - c(0.0, 1.5625)).norm() < 1e-7);
        assert!(v[1].norm() < 1e-12);
        assert!((f.g.get(&[0, 2]) * 2.0 - 0.5 / 1.5625).norm() < 1e-7);
        assert!((f.g.get(&[1, 3]) * 2.0 - 0.5 * 1.5625).norm() < 1e-7);
    }

    #[test]
    fn closed_form_agreement_and_relations() {
        let m = cp1();
        for p in sample_points(&m, 10, 21) {
            let t = hh_frame(&m, &p).unwrap();
            let explicit = cp1_explicit_frame(&p).unwrap();
            assert!(t.dist(&explicit).unwrap() < 1e-7);
            assert!(quaternionic_defect(&t).unwrap() < 1e-10);
            assert!(biquaternionic_defect(&t).unwrap() < 1e-10);
            assert!(para_quaternionic_defect(&t).unwrap() < 1e-10);
            assert!(orthogonality_defect(&t).unwrap() < 1e-10);
            // explicit tensors are internally consistent: ω_A = g(A·, ·)
            let again = QuaternionFrame::assemble(p.clone(), explicit.g.clone(), explicit.i.clone(), explicit.j.clone(), explicit.k.clone()).unwrap();
            assert!(again.dist(&explicit).unwrap() < 1e-13);
        }
    }

    #[test]
    fn transport_is_path_independent() {
        let m = cp1();
        let p = ChartPoint::new1(c(0.2, 0.3), c(-0.4, 0.1)).unwrap();
        let a = hh_frame_with(&m, &p, 1000, 0.0).unwrap();
        let b = hh_frame_with(&m, &p, 1000, 0.5).unwrap();
        assert!(a.dist(&b).unwrap() < 1e-7);
    }

    #[test]
    fn explicit_forms_closedness() {
        let (wi, wj, wk) = cp1_explicit_forms();
        let p = ChartPoint::new1(c(0.3, 0.0), c(0.0, 0.1)).unwrap();
        assert!(exterior_derivative(&wi, &p).unwrap().max_abs() < 1e-12);
        assert!(exterior_derivative(&wk, &p).unwrap().max_abs() < 1e-12);
        assert!(exterior_derivative(&wj, &p).unwrap().max_abs() > 1e-2);
    }

    #[test]
    fn relation_report_cp1_witness() {
        let m = cp1();
        let p = ChartPoint::new1(c(0.3, 0.0), c(0.0, 0.1)).unwrap();
        let r = relation_report(&m, &p).unwrap();
        assert!(r.pass(), "{r:#?}");
        let dj = r.get("dωJ-nonzero").unwrap().max_defect;
        let (_, wj, _) = cp1_explicit_forms();
        let exact = exterior_derivative(&wj, &p).unwrap().max_abs();
        assert!((dj - exact).abs() < 1e-6, "{dj} vs {exact}");
    }

    #[test]
    fn relation_report_flat() {
        let flat = build_model(ModelKind::Flat(1)).unwrap();
        let r = relation_report(&flat, &ChartPoint::new1(c(0.1, 0.2), c(0.3, -0.4)).unwrap()).unwrap();
        assert!(r.pass(), "{r:#?}");
        assert!(r.get("dωJ-zero").unwrap().max_defect < 1e-12);
    }

    #[test]
    fn diagonal_restriction_on_cp1() {
        let m = cp1();
        let p = ChartPoint::diagonal(vec![c(0.4, -0.3)]).unwrap();
        let r = relation_report(&m, &p).unwrap();
        assert!(r.get("diagonal-restriction").unwrap().passed, "{r:#?}");
    }

    #[test]
    fn cpn_frame_relations() {
        let m = build_model(ModelKind::Cpn(2)).unwrap();
        let p = &sample_points(&m, 1, 3)[0];
        let f = hh_frame_with(&m, p, 200, 0.0).unwrap();
        assert!(quaternionic_defect(&f).unwrap() < 1e-10);
        assert!(orthogonality_defect(&f).unwrap() < 1e-10);
    }
}
