//! The canonical complex bi-Lagrangian package on a complexified chart:
//! `ω₀ᶜ`, the bicomplex triple `(H, J, F)`, the holomorphic metric `g = −i g₀ᶜ`
//! and their real and imaginary parts.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::calculus::{ChartPoint, ExprField, TensorField, TensorValue, C, I, ONE, ZERO};
use crate::error::Result;
use crate::models::KahlerModel;

/// Threshold below which a Gram eigenvalue counts as zero.
pub const SIGNATURE_THRESHOLD: f64 = 1e-8;

/// `ω₀ᶜ = (i/2) hᶜ_{jk̄} dzʲ∧dwᵏ` as a field.
pub fn omega_field(m: &KahlerModel) -> ExprField {
    let n = m.n();
    let mut terms = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let h = m.h_expr(j, k);
            if !h.is_zero() {
                terms.push((j, n + k, h.clone() * C::new(0.0, 0.5)));
            }
        }
    }
    ExprField::two_form(n, terms).expect("indices in range")
}

/// `g = −i hᶜ_{jk̄} dzʲ dwᵏ` (symmetric product) as a field.
pub fn metric_field(m: &KahlerModel) -> ExprField {
    let n = m.n();
    let mut terms = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let h = m.h_expr(j, k);
            if !h.is_zero() {
                terms.push((j, n + k, h.clone() * -I));
            }
        }
    }
    ExprField::symmetric(n, terms).expect("indices in range")
}

/// Real part `ω₁ = ½(ω₀ᶜ + conj)` as a field.
pub fn omega1_field(m: &KahlerModel) -> ExprField {
    omega_field(m).plus_conjugate().expect("same valence").scale(C::new(0.5, 0.0))
}

/// Imaginary part `ω₂ = (ω₀ᶜ − conj)/(2i)` as a field.
pub fn omega2_field(m: &KahlerModel) -> ExprField {
    let w = omega_field(m);
    w.add(&w.conjugate().scale(-ONE)).expect("same valence").scale(C::new(0.0, -0.5))
}

fn diagonal_endomorphism(n: usize, signs: [C; 4]) -> TensorValue {
    let d = 4 * n;
    let m = DMatrix::from_fn(d, d, |a, b| if a == b { signs[a / n] } else { ZERO });
    TensorValue::endomorphism(&m).expect("square frame matrix")
}

/// `H = I₀ᶜ`: `i` on `∂z`, `−i` on `∂w`, conjugate on the conjugate blocks.
pub fn h_structure(n: usize) -> TensorValue {
    diagonal_endomorphism(n, [I, -I, -I, I])
}

/// The ambient complex structure: `i` on holomorphic directions.
pub fn j_structure(n: usize) -> TensorValue {
    diagonal_endomorphism(n, [I, I, -I, -I])
}

/// `F = HJ`: `−1` on the horizontal `∂z`, `+1` on the vertical `∂w`.
pub fn f_structure(n: usize) -> TensorValue {
    h_structure(n).compose(&j_structure(n)).expect("endomorphisms")
}

pub fn complex_symplectic_form(m: &KahlerModel, p: &ChartPoint) -> Result<TensorValue> {
    m.check_domain(p)?;
    omega_field(m).eval(p)
}

pub fn bilagrangian_metric(m: &KahlerModel, p: &ChartPoint) -> Result<TensorValue> {
    m.check_domain(p)?;
    metric_field(m).eval(p)
}

pub fn bicomplex_structure(m: &KahlerModel, p: &ChartPoint) -> Result<(TensorValue, TensorValue, TensorValue)> {
    m.check_domain(p)?;
    let n = m.n();
    Ok((h_structure(n), j_structure(n), f_structure(n)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiLagrangianPackage {
    pub omega: TensorValue,
    pub h: TensorValue,
    pub j: TensorValue,
    pub f: TensorValue,
    pub g: TensorValue,
    pub omega1: TensorValue,
    pub omega2: TensorValue,
    pub g1: TensorValue,
    pub g2: TensorValue,
}

pub fn package(m: &KahlerModel, p: &ChartPoint) -> Result<BiLagrangianPackage> {
    let omega = complex_symplectic_form(m, p)?;
    let g = bilagrangian_metric(m, p)?;
    let (h, j, f) = bicomplex_structure(m, p)?;
    Ok(BiLagrangianPackage {
        omega1: omega.real_part(),
        omega2: omega.imag_part(),
        g1: g.real_part(),
        g2: g.imag_part(),
        omega,
        h,
        j,
        f,
        g,
    })
}

/// `(ω₁, ω₂, g₁, g₂)`.
pub fn real_parts(pkg: &BiLagrangianPackage) -> (TensorValue, TensorValue, TensorValue, TensorValue) {
    (pkg.omega1.clone(), pkg.omega2.clone(), pkg.g1.clone(), pkg.g2.clone())
}

/// Columns are the real frame `(∂x_a, ∂y_a)` for each holomorphic coordinate
/// `a`, written in the complexified frame: `∂x = ∂ + ∂̄`, `∂y = i(∂ − ∂̄)`.
pub fn real_frame(n: usize) -> DMatrix<C> {
    let d = 4 * n;
    let mut m = DMatrix::from_element(d, d, ZERO);
    for a in 0..2 * n {
        let abar = a + 2 * n;
        m[(a, 2 * a)] = ONE;
        m[(abar, 2 * a)] = ONE;
        m[(a, 2 * a + 1)] = I;
        m[(abar, 2 * a + 1)] = -I;
    }
    m
}

/// The real vector with holomorphic components `hol`, in the complexified frame.
pub fn real_vector(hol: &[C]) -> Vec<C> {
    hol.iter().copied().chain(hol.iter().map(|c| c.conj())).collect()
}

/// `(positive, negative, zero)` eigenvalue counts of a real symmetric
/// 2-tensor's Gram matrix in the real frame.
pub fn signature(t: &TensorValue) -> Result<(usize, usize, usize)> {
    let gram = t.pullback_matrix(&real_frame(t.n()))?;
    let re = gram.map(|c| c.re);
    let sym = (&re + re.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let pos = eig.iter().filter(|&&e| e > SIGNATURE_THRESHOLD).count();
    let neg = eig.iter().filter(|&&e| e < -SIGNATURE_THRESHOLD).count();
    Ok((pos, neg, eig.len() - pos - neg))
}

/// Images of the frame `(∂z¹..∂zⁿ, ∂z̄¹..∂z̄ⁿ)` of `N` under the diagonal
/// embedding `z ↦ (z, z̄)`: `∂z ↦ ∂z + ∂w̄`, `∂z̄ ↦ ∂z̄ + ∂w`.
pub fn diagonal_pushforward(n: usize) -> DMatrix<C> {
    let mut m = DMatrix::from_element(4 * n, 2 * n, ZERO);
    for j in 0..n {
        m[(j, j)] = ONE;
        m[(3 * n + j, j)] = ONE;
        m[(2 * n + j, n + j)] = ONE;
        m[(n + j, n + j)] = ONE;
    }
    m
}

/// The Kähler data of the model at `z`, as matrices on the frame `(∂z, ∂z̄)`
/// of `N`: `(g₀, ω₀, I₀)` with `g₀ = h_{jk̄} dzʲ dz̄ᵏ` and `ω₀ = (i/2) h_{jk̄} dzʲ∧dz̄ᵏ`.
pub fn kahler_data(m: &KahlerModel, z: &[C]) -> Result<(DMatrix<C>, DMatrix<C>, DMatrix<C>)> {
    let n = m.n();
    let p = ChartPoint::diagonal(z.to_vec())?;
    let h = m.h_value(&p)?;
    let mut g0 = DMatrix::from_element(2 * n, 2 * n, ZERO);
    let mut w0 = g0.clone();
    let mut i0 = g0.clone();
    for j in 0..n {
        for k in 0..n {
            g0[(j, n + k)] = h[(j, k)] * 0.5;
            g0[(n + k, j)] = h[(j, k)] * 0.5;
            w0[(j, n + k)] = h[(j, k)] * C::new(0.0, 0.5);
            w0[(n + k, j)] = -h[(j, k)] * C::new(0.0, 0.5);
        }
        i0[(j, j)] = I;
        i0[(n + j, n + j)] = -I;
    }
    Ok((g0, w0, i0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{exterior_derivative, Slot};
    use crate::models::{build_model, ModelKind};
    use crate::sampling::sample_points;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn cp1() -> KahlerModel {
        build_model(ModelKind::Cp1).unwrap()
    }

    fn id(n: usize) -> TensorValue {
        TensorValue::identity(n)
    }

    #[test]
    fn omega_on_cp1_examples() {
        let m = cp1();
        let w = complex_symplectic_form(&m, &ChartPoint::new1(ZERO, ZERO).unwrap()).unwrap();
        assert_eq!(w.get(&[0, 1]), c(0.0, 0.5));
        assert_eq!(w.get(&[1, 0]), c(0.0, -0.5));
        let w = complex_symplectic_form(&m, &ChartPoint::new1(ONE, ONE).unwrap()).unwrap();
        assert!((w.get(&[0, 1]) - c(0.0, 0.125)).norm() < 1e-15);
        let flat = build_model(ModelKind::Flat(1)).unwrap();
        let w = complex_symplectic_form(&flat, &ChartPoint::new1(c(3.0, 1.0), c(-2.0, 0.5)).unwrap()).unwrap();
        assert_eq!(w.get(&[0, 1]), c(0.0, 0.5));
    }

    #[test]
    fn metric_on_cp1_examples() {
        let m = cp1();
        for p in [ChartPoint::new1(ZERO, ZERO).unwrap(), ChartPoint::new1(ONE, ZERO).unwrap()] {
            let g = bilagrangian_metric(&m, &p).unwrap();
            // −i dz dw has coefficient −i/2 in each mixed slot
            assert!((g.get(&[0, 1]) - c(0.0, -0.5)).norm() < 1e-15);
            assert!((g.get(&[1, 0]) - c(0.0, -0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn bicomplex_relations() {
        for n in 1..=2 {
            let (h, j, f) = (h_structure(n), j_structure(n), f_structure(n));
            let minus = id(n).scale(-ONE);
            assert_eq!(h.compose(&h).unwrap(), minus);
            assert_eq!(j.compose(&j).unwrap(), minus);
            assert_eq!(f.compose(&f).unwrap(), id(n));
            assert_eq!(j.compose(&h).unwrap(), f);
            assert_eq!(f.contract(0, 1).unwrap().coeffs()[0], ZERO);
            assert!(h.is_real(0.0) && j.is_real(0.0) && f.is_real(0.0));
        }
        let f = f_structure(1);
        assert_eq!(f.apply(&[ZERO, ONE, ZERO, ZERO]).unwrap(), vec![ZERO, ONE, ZERO, ZERO]);
        assert_eq!(f.apply(&[ONE, ZERO, ZERO, ZERO]).unwrap(), vec![-ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn package_invariants_on_models() {
        for kind in [ModelKind::Flat(1), ModelKind::Cp1, ModelKind::Cpn(2), ModelKind::Disk] {
            let m = build_model(kind).unwrap();
            let n = m.n();
            for p in sample_points(&m, 100, 5) {
                let pkg = package(&m, &p).unwrap();
                let gf = pkg.omega.precompose_first(&pkg.f).unwrap();
                assert!(gf.dist(&pkg.g).unwrap() < 1e-12, "{kind}");
                let gm = pkg.g.to_matrix().unwrap();
                assert!((&gm - gm.transpose()).iter().all(|c| c.norm() < 1e-15));
                // ω(u, v) = g(Fu, v)
                let back = pkg.g.precompose_first(&pkg.f).unwrap();
                assert!(back.dist(&pkg.omega).unwrap() < 1e-12);
                // Lagrangian foliations: vertical pairs and horizontal pairs
                for a in 0..n {
                    for b in 0..n {
                        assert_eq!(pkg.omega.get(&[a, b]), ZERO);
                        assert_eq!(pkg.omega.get(&[n + a, n + b]), ZERO);
                    }
                }
                for t in [&pkg.omega1, &pkg.omega2, &pkg.g1, &pkg.g2] {
                    assert!(t.is_real(1e-12));
                }
                assert_eq!(signature(&pkg.g1).unwrap(), (2 * n, 2 * n, 0), "{kind}");
                assert_eq!(signature(&pkg.g2).unwrap(), (2 * n, 2 * n, 0), "{kind}");
            }
        }
    }

    #[test]
    fn g1_equals_g2_of_j() {
        use rand::Rng;
        let m = cp1();
        let mut rng = crate::sampling::rng(99);
        for p in sample_points(&m, 50, 17) {
            let pkg = package(&m, &p).unwrap();
            let mut rv = || {
                let hol: Vec<C> = (0..2).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                real_vector(&hol)
            };
            let (u, v) = (rv(), rv());
            let ju = pkg.j.apply(&u).unwrap();
            let lhs = pkg.g1.eval_on(&[&u, &v]).unwrap();
            let rhs = pkg.g2.eval_on(&[&ju, &v]).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn flat_gram_matrix_signature() {
        let flat = build_model(ModelKind::Flat(1)).unwrap();
        let pkg = package(&flat, &ChartPoint::new1(ZERO, ZERO).unwrap()).unwrap();
        // g1 = Re(−i dz dw): on the real frame (x, y, s, t) it pairs (x,t) and (y,s)
        let gram = pkg.g1.pullback_matrix(&real_frame(1)).unwrap();
        assert!(gram[(0, 2)].norm() < 1e-15);
        assert!((gram[(0, 3)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((gram[(1, 2)] - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(signature(&pkg.g1).unwrap(), (2, 2, 0));
    }

    #[test]
    fn forms_are_closed() {
        let m = cp1();
        let p = ChartPoint::new1(c(0.3, 0.0), c(0.0, 0.2)).unwrap();
        for f in [omega_field(&m), omega1_field(&m), omega2_field(&m)] {
            let d = exterior_derivative(&f, &p).unwrap();
            assert_eq!(d.valence(), &[Slot::Down; 3]);
            assert!(d.max_abs() < 1e-10);
        }
        let pkg = package(&m, &p).unwrap();
        assert!(omega1_field(&m).eval(&p).unwrap().dist(&pkg.omega1).unwrap() < 1e-15);
        assert!(omega2_field(&m).eval(&p).unwrap().dist(&pkg.omega2).unwrap() < 1e-15);
    }

    #[test]
    fn diagonal_restriction_reproduces_kahler_data() {
        for kind in [ModelKind::Flat(2), ModelKind::Cp1, ModelKind::Cpn(2), ModelKind::Disk] {
            let m = build_model(kind).unwrap();
            let n = m.n();
            let push = diagonal_pushforward(n);
            for p in crate::sampling::sample_diagonal(&m, 100, 23) {
                let (g0, w0, i0) = kahler_data(&m, p.z()).unwrap();
                let pkg = package(&m, &p).unwrap();
                let w = pkg.omega.pullback_matrix(&push).unwrap();
                let g = pkg.g.scale(I).pullback_matrix(&push).unwrap();
                assert!((w - w0).iter().all(|c| c.norm() < 1e-10));
                assert!((g - g0).iter().all(|c| c.norm() < 1e-10));
                let hp = pkg.h.to_matrix().unwrap() * &push;
                let pi = &push * i0;
                assert!((hp - pi).iter().all(|c| c.norm() < 1e-15));
            }
        }
    }
}
