//! Tensor fields with jet-valued coefficients, brackets and exterior derivatives.

use super::expr::Expr;
use super::jet::{ComplexJet2, Differentiable, Jet1, Linear, C, ONE, ZERO};
use super::point::{conj_index, ChartPoint};
use super::tensor::{Slot, TensorValue};
use crate::error::{GeomError, Result};

/// A tensor field on a `4n`-dimensional complexified chart. Coefficient jets
/// are taken over the `4n` frame variables, so partial `a` is `∂_a` for frame
/// index `a`.
pub trait TensorField: Send + Sync {
    fn valence(&self) -> Vec<Slot>;
    fn n(&self) -> usize;
    fn jets2(&self, p: &ChartPoint) -> Result<Vec<ComplexJet2>>;

    fn jets1(&self, p: &ChartPoint) -> Result<Vec<Jet1>> {
        Ok(self.jets2(p)?.iter().map(ComplexJet2::truncate).collect())
    }

    fn eval(&self, p: &ChartPoint) -> Result<TensorValue> {
        let vals = self.jets1(p)?.iter().map(Differentiable::val).collect();
        TensorValue::from_coeffs(self.valence(), self.n(), vals)
    }
}

/// A field whose coefficients are closed-form descriptors.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprField {
    valence: Vec<Slot>,
    n: usize,
    coeffs: Vec<Expr>,
}

impl ExprField {
    pub fn new(valence: Vec<Slot>, n: usize, coeffs: Vec<Expr>) -> Result<Self> {
        let len = (4 * n).pow(valence.len() as u32);
        if coeffs.len() != len {
            return Err(GeomError::argument(format!(
                "expected {len} coefficient descriptors, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { valence, n, coeffs })
    }

    pub fn zeros(valence: Vec<Slot>, n: usize) -> Self {
        let len = (4 * n).pow(valence.len() as u32);
        Self { valence, n, coeffs: vec![Expr::zero(); len] }
    }

    pub fn vector(n: usize, comps: Vec<Expr>) -> Result<Self> {
        Self::new(vec![Slot::Up], n, comps)
    }

    pub fn one_form(n: usize, comps: Vec<Expr>) -> Result<Self> {
        Self::new(vec![Slot::Down], n, comps)
    }

    /// The real vector field `Σ Xᵃ ∂_a + conj` from its `2n` holomorphic
    /// components.
    pub fn real_vector(n: usize, hol: Vec<Expr>) -> Result<Self> {
        if hol.len() != 2 * n {
            return Err(GeomError::argument("real_vector needs 2n holomorphic components"));
        }
        let conj: Vec<Expr> = hol.iter().map(|e| e.conjugate(n)).collect();
        Self::vector(n, hol.into_iter().chain(conj).collect())
    }

    /// A vector field with only holomorphic components.
    pub fn hol_vector(n: usize, hol: Vec<Expr>) -> Result<Self> {
        if hol.len() != 2 * n {
            return Err(GeomError::argument("hol_vector needs 2n components"));
        }
        let mut comps = hol;
        comps.extend((0..2 * n).map(|_| Expr::zero()));
        Self::vector(n, comps)
    }

    /// `Σ c dx^a ∧ dx^b` over the listed terms.
    pub fn two_form(n: usize, terms: Vec<(usize, usize, Expr)>) -> Result<Self> {
        let d = 4 * n;
        let mut f = Self::zeros(vec![Slot::Down, Slot::Down], n);
        for (a, b, c) in terms {
            if a >= d || b >= d {
                return Err(GeomError::argument("two_form index out of range"));
            }
            f.accumulate(a * d + b, c.clone());
            f.accumulate(b * d + a, -c);
        }
        Ok(f)
    }

    /// `Σ c (dx^a dx^b)` with the symmetric product `ab = ½(a⊗b + b⊗a)`.
    pub fn symmetric(n: usize, terms: Vec<(usize, usize, Expr)>) -> Result<Self> {
        let d = 4 * n;
        let mut f = Self::zeros(vec![Slot::Down, Slot::Down], n);
        for (a, b, c) in terms {
            if a >= d || b >= d {
                return Err(GeomError::argument("symmetric index out of range"));
            }
            let half = c * 0.5;
            f.accumulate(a * d + b, half.clone());
            f.accumulate(b * d + a, half);
        }
        Ok(f)
    }

    fn accumulate(&mut self, k: usize, c: Expr) {
        let old = std::mem::replace(&mut self.coeffs[k], Expr::zero());
        self.coeffs[k] = if old.is_zero() { c } else { old + c };
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.valence != other.valence || self.n != other.n {
            return Err(GeomError::argument("adding fields of different valence"));
        }
        let mut out = self.clone();
        for (k, c) in other.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.accumulate(k, c.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|e| if e.is_zero() { Expr::zero() } else { e.clone() * c })
            .collect();
        Self { valence: self.valence.clone(), n: self.n, coeffs }
    }

    /// The conjugate field, `T̄[idx] = conj(T[conj idx])`.
    pub fn conjugate(&self) -> Self {
        let d = 4 * self.n;
        let r = self.valence.len();
        let coeffs = (0..self.coeffs.len())
            .map(|k| {
                let mut flat = k;
                let mut cidx = 0;
                let mut mul = 1;
                for _ in 0..r {
                    cidx += conj_index(flat % d, self.n) * mul;
                    flat /= d;
                    mul *= d;
                }
                let e = &self.coeffs[cidx];
                if e.is_zero() {
                    Expr::zero()
                } else {
                    e.conjugate(self.n)
                }
            })
            .collect();
        Self { valence: self.valence.clone(), n: self.n, coeffs }
    }

    /// `T + T̄`.
    pub fn plus_conjugate(&self) -> Result<Self> {
        self.add(&self.conjugate())
    }
}

impl TensorField for ExprField {
    fn valence(&self) -> Vec<Slot> {
        self.valence.clone()
    }

    fn n(&self) -> usize {
        self.n
    }

    fn jets2(&self, p: &ChartPoint) -> Result<Vec<ComplexJet2>> {
        check_n(self.n, p)?;
        self.coeffs.iter().map(|e| e.jet_eval(p)).collect()
    }

    fn jets1(&self, p: &ChartPoint) -> Result<Vec<Jet1>> {
        check_n(self.n, p)?;
        self.coeffs.iter().map(|e| e.jet_eval(p)).collect()
    }

    fn eval(&self, p: &ChartPoint) -> Result<TensorValue> {
        check_n(self.n, p)?;
        let vals = self.coeffs.iter().map(|e| e.eval(p)).collect::<Result<Vec<_>>>()?;
        TensorValue::from_coeffs(self.valence.clone(), self.n, vals)
    }
}

fn check_n(n: usize, p: &ChartPoint) -> Result<()> {
    if p.n() != n {
        return Err(GeomError::argument(format!(
            "field of dimension {n} evaluated at a point of dimension {}",
            p.n()
        )));
    }
    Ok(())
}

/// `[X,Y]ᵃ = Xᵇ ∂_b Yᵃ − Yᵇ ∂_b Xᵃ` on coefficient jets, one order lower.
pub fn bracket_jets<D: Differentiable>(x: &[D], y: &[D]) -> Vec<D::Partial> {
    let d = x.len();
    (0..d)
        .map(|a| {
            let mut acc = y[a].lower().zero_like();
            for b in 0..d {
                acc.add_scaled(&x[b].lower().times(&y[a].d(b)), ONE);
                acc.add_scaled(&y[b].lower().times(&x[a].d(b)), -ONE);
            }
            acc
        })
        .collect()
}

/// Exterior derivative of a `k`-form given by its full antisymmetric
/// coefficient array over a frame of size `dim`:
/// `(dα)_{a₀…a_k} = Σᵢ (−1)ⁱ ∂_{aᵢ} α_{a₀…âᵢ…a_k}`.
pub fn d_coeffs<D: Differentiable>(coeffs: &[D], k: usize, dim: usize) -> Vec<D::Partial> {
    let len = dim.pow(k as u32 + 1);
    let zero = coeffs[0].lower().zero_like();
    (0..len)
        .map(|flat| {
            let idx = decode(flat, k + 1, dim);
            let mut acc = zero.clone();
            if has_repeat(&idx) {
                return acc;
            }
            for i in 0..=k {
                let rest = idx
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(0, |f, (_, &a)| f * dim + a);
                let sign = if i % 2 == 0 { ONE } else { -ONE };
                acc.add_scaled(&coeffs[rest].d(idx[i]), sign);
            }
            acc
        })
        .collect()
}

fn decode(mut flat: usize, r: usize, d: usize) -> Vec<usize> {
    let mut idx = vec![0; r];
    for slot in idx.iter_mut().rev() {
        *slot = flat % d;
        flat /= d;
    }
    idx
}

fn has_repeat(idx: &[usize]) -> bool {
    idx.iter().enumerate().any(|(i, a)| idx[i + 1..].contains(a))
}

fn check_vector(f: &dyn TensorField) -> Result<()> {
    if f.valence() != [Slot::Up] {
        return Err(GeomError::argument(format!(
            "expected a vector field, got valence {:?}",
            f.valence()
        )));
    }
    Ok(())
}

fn check_form(f: &dyn TensorField) -> Result<usize> {
    let v = f.valence();
    if !v.iter().all(|s| *s == Slot::Down) {
        return Err(GeomError::argument(format!("expected a differential form, got valence {v:?}")));
    }
    if v.len() > 3 {
        return Err(GeomError::argument(format!(
            "exterior derivative supports degree at most 3, got {}",
            v.len()
        )));
    }
    Ok(v.len())
}

/// The Lie bracket of two vector fields at a point.
pub fn lie_bracket(x: &dyn TensorField, y: &dyn TensorField, p: &ChartPoint) -> Result<TensorValue> {
    check_vector(x)?;
    check_vector(y)?;
    if x.n() != y.n() {
        return Err(GeomError::argument("bracket of fields on different charts"));
    }
    let v = bracket_jets(&x.jets1(p)?, &y.jets1(p)?);
    TensorValue::vector(x.n(), v)
}

/// `[X,Y]` with first-order jets, for nested brackets.
pub fn lie_bracket_jet(x: &dyn TensorField, y: &dyn TensorField, p: &ChartPoint) -> Result<Vec<Jet1>> {
    check_vector(x)?;
    check_vector(y)?;
    Ok(bracket_jets(&x.jets2(p)?, &y.jets2(p)?))
}

/// Exterior derivative of a form field of degree at most 3 at a point.
pub fn exterior_derivative(form: &dyn TensorField, p: &ChartPoint) -> Result<TensorValue> {
    let k = check_form(form)?;
    let n = form.n();
    let c = d_coeffs(&form.jets1(p)?, k, 4 * n);
    TensorValue::from_coeffs(vec![Slot::Down; k + 1], n, c)
}

/// `d(dα)` at a point, computed from second-order jets.
pub fn exterior_derivative_twice(form: &dyn TensorField, p: &ChartPoint) -> Result<TensorValue> {
    let k = check_form(form)?;
    if k > 2 {
        return Err(GeomError::argument("d∘d needs degree at most 2"));
    }
    let n = form.n();
    let first = d_coeffs(&form.jets2(p)?, k, 4 * n);
    let second = d_coeffs(&first, k + 1, 4 * n);
    TensorValue::from_coeffs(vec![Slot::Down; k + 2], n, second)
}

/// A constant field, handy for frames like `F` or `J`.
pub fn constant_field(t: &TensorValue) -> ExprField {
    ExprField {
        valence: t.valence().to_vec(),
        n: t.n(),
        coeffs: t
            .coeffs()
            .iter()
            .map(|c| if *c == ZERO { Expr::zero() } else { Expr::c(*c) })
            .collect(),
    }
}
