//! Pointwise tensors in the complexified frame `(∂z, ∂w, ∂z̄, ∂w̄)` and its dual.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::jet::{C, I, ZERO};
use super::point::conj_index;
use crate::error::{GeomError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    /// Contravariant (vector) slot.
    Up,
    /// Covariant (covector) slot.
    Down,
}

/// Coefficient array over the `4n`-element frame; index tuples are row-major in
/// slot order. An endomorphism `E` has valence `[Up, Down]` and stores `Eᵃ_b`
/// (the `a`-th component of `E ∂_b`) at `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorValue {
    valence: Vec<Slot>,
    n: usize,
    coeffs: Vec<C>,
}

impl TensorValue {
    pub fn zeros(valence: Vec<Slot>, n: usize) -> Self {
        let len = (4 * n).pow(valence.len() as u32);
        Self { valence, n, coeffs: vec![ZERO; len] }
    }

    pub fn from_coeffs(valence: Vec<Slot>, n: usize, coeffs: Vec<C>) -> Result<Self> {
        let len = (4 * n).pow(valence.len() as u32);
        if coeffs.len() != len {
            return Err(GeomError::argument(format!(
                "expected {len} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { valence, n, coeffs })
    }

    pub fn vector(n: usize, comps: Vec<C>) -> Result<Self> {
        Self::from_coeffs(vec![Slot::Up], n, comps)
    }

    pub fn covector(n: usize, comps: Vec<C>) -> Result<Self> {
        Self::from_coeffs(vec![Slot::Down], n, comps)
    }

    /// Endomorphism with matrix `m` acting on column vectors.
    pub fn endomorphism(m: &DMatrix<C>) -> Result<Self> {
        Self::from_matrix(vec![Slot::Up, Slot::Down], m)
    }

    /// Bilinear form `B(u, v) = uᵀ m v`.
    pub fn bilinear(m: &DMatrix<C>) -> Result<Self> {
        Self::from_matrix(vec![Slot::Down, Slot::Down], m)
    }

    fn from_matrix(valence: Vec<Slot>, m: &DMatrix<C>) -> Result<Self> {
        let d = m.nrows();
        if d != m.ncols() || d % 4 != 0 || d == 0 {
            return Err(GeomError::argument(format!("bad frame matrix {}x{}", d, m.ncols())));
        }
        let coeffs = (0..d * d).map(|k| m[(k / d, k % d)]).collect();
        Ok(Self { valence, n: d / 4, coeffs })
    }

    pub fn identity(n: usize) -> Self {
        Self::endomorphism(&DMatrix::identity(4 * n, 4 * n)).expect("square frame matrix")
    }

    pub fn valence(&self) -> &[Slot] {
        &self.valence
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C] {
        &mut self.coeffs
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let d = self.dim();
        idx.iter().fold(0, |acc, &i| acc * d + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let d = self.dim();
        let mut idx = vec![0; self.rank()];
        for slot in idx.iter_mut().rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> C {
        self.coeffs[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: C) {
        let k = self.flat_index(idx);
        self.coeffs[k] = v;
    }

    pub fn is_form(&self) -> bool {
        self.valence.iter().all(|s| *s == Slot::Down)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.valence != other.valence || self.n != other.n {
            return Err(GeomError::argument(format!(
                "valence mismatch: {:?}/{} vs {:?}/{}",
                self.valence, self.n, other.valence, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Self, f: impl Fn(C, C) -> C) -> Self {
        Self {
            valence: self.valence.clone(),
            n: self.n,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn scale(&self, c: C) -> Self {
        Self {
            valence: self.valence.clone(),
            n: self.n,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `max |self − other|` over all coefficients.
    pub fn dist(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// The tensor `T̄` with `T̄[idx] = conj(T[conj idx])`.
    pub fn conj_tensor(&self) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            let (mut rest, mut ck, mut stride) = (k, 0, 1);
            for _ in 0..self.rank() {
                ck += conj_index(rest % d, self.n) * stride;
                rest /= d;
                stride *= d;
            }
            *c = self.coeffs[ck].conj();
        }
        out
    }

    pub fn reality_defect(&self) -> f64 {
        let c = self.conj_tensor();
        self.coeffs.iter().zip(&c.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }


    pub fn is_real(&self, tol: f64) -> bool {
        self.reality_defect() <= tol
    }

    /// Symmetrization with the conjugate; the nearest real tensor.
    pub fn real_part(&self) -> Self {
        self.zip(&self.conj_tensor(), |a, b| (a + b) * 0.5)
    }

    pub fn imag_part(&self) -> Self {
        self.zip(&self.conj_tensor(), |a, b| (a - b) / (2.0 * I))
    }

    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(GeomError::argument("tensor product of different frames"));
        }
        let mut valence = self.valence.clone();
        valence.extend(&other.valence);
        let coeffs = self
            .coeffs
            .iter()
            .flat_map(|a| other.coeffs.iter().map(move |b| a * b))
            .collect();
        Ok(Self { valence, n: self.n, coeffs })
    }

    /// Contraction of slot `i` against slot `j` (of opposite variance).
    pub fn contract(&self, i: usize, j: usize) -> Result<Self> {
        let r = self.rank();
        if i >= r || j >= r || i == j || self.valence[i] == self.valence[j] {
            return Err(GeomError::argument(format!(
                "cannot contract slots {i},{j} of {:?}",
                self.valence
            )));
        }
        let valence: Vec<Slot> = (0..r)
            .filter(|&k| k != i && k != j)
            .map(|k| self.valence[k])
            .collect();
        let mut out = Self::zeros(valence, self.n);
        for k in 0..self.coeffs.len() {
            let idx = self.multi_index(k);
            if idx[i] != idx[j] {
                continue;
            }
            let rest: Vec<usize> = (0..r).filter(|&s| s != i && s != j).map(|s| idx[s]).collect();
            let f = out.flat_index(&rest);
            out.coeffs[f] += self.coeffs[k];
        }
        Ok(out)
    }

    /// Rank-two coefficients as a matrix (row = first slot).
    pub fn to_matrix(&self) -> Result<DMatrix<C>> {
        if self.rank() != 2 {
            return Err(GeomError::argument("matrix view needs a rank-two tensor"));
        }
        let d = self.dim();
        Ok(DMatrix::from_fn(d, d, |a, b| self.coeffs[a * d + b]))
    }

    fn expect_valence(&self, v: &[Slot]) -> Result<()> {
        if self.valence != v {
            return Err(GeomError::argument(format!(
                "expected valence {v:?}, got {:?}",
                self.valence
            )));
        }
        Ok(())
    }

    /// `E(v)` for an endomorphism and a frame vector.
    pub fn apply(&self, v: &[C]) -> Result<Vec<C>> {
        self.expect_valence(&[Slot::Up, Slot::Down])?;
        let d = self.dim();
        if v.len() != d {
            return Err(GeomError::argument("vector length does not match frame"));
        }
        Ok((0..d)
            .map(|a| (0..d).map(|b| self.coeffs[a * d + b] * v[b]).sum())
            .collect())
    }

    /// Composition `self ∘ other` of endomorphisms.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.expect_valence(&[Slot::Up, Slot::Down])?;
        other.expect_valence(&[Slot::Up, Slot::Down])?;
        Self::endomorphism(&(self.to_matrix()? * other.to_matrix()?))
    }

    /// Evaluates a covariant tensor on a list of vectors.
    pub fn eval_on(&self, vs: &[&[C]]) -> Result<C> {
        if !self.is_form() || vs.len() != self.rank() {
            return Err(GeomError::argument("eval_on needs a covariant tensor and one vector per slot"));
        }
        let mut acc = ZERO;
        for k in 0..self.coeffs.len() {
            let c = self.coeffs[k];
            if c == ZERO {
                continue;
            }
            let idx = self.multi_index(k);
            acc += idx.iter().zip(vs).fold(c, |p, (&a, v)| p * v[a]);
        }
        Ok(acc)
    }

    /// `(A·T)` for a covariant 2-tensor: `(u, v) ↦ T(A u, v)`.
    pub fn precompose_first(&self, a: &Self) -> Result<Self> {
        self.expect_valence(&[Slot::Down, Slot::Down])?;
        a.expect_valence(&[Slot::Up, Slot::Down])?;
        Self::bilinear(&(a.to_matrix()?.transpose() * self.to_matrix()?))
    }

    /// `(u, v) ↦ T(A u, A v)`.
    pub fn pullback_by(&self, a: &Self) -> Result<Self> {
        self.expect_valence(&[Slot::Down, Slot::Down])?;
        a.expect_valence(&[Slot::Up, Slot::Down])?;
        let m = a.to_matrix()?;
        Self::bilinear(&(m.transpose() * self.to_matrix()? * m))
    }

    /// Gram matrix `T(Pe_i, Pe_j)` of a covariant 2-tensor along a linear map
    /// whose columns are the images of the source frame vectors.
    pub fn pullback_matrix(&self, push: &DMatrix<C>) -> Result<DMatrix<C>> {
        self.expect_valence(&[Slot::Down, Slot::Down])?;
        if push.nrows() != self.dim() {
            return Err(GeomError::argument("pullback map does not match frame"));
        }
        Ok(push.transpose() * self.to_matrix()? * push)
    }

    /// Wedge product of forms with `a∧b = a⊗b − b⊗a` and in general
    /// `(α∧β) = 1/(p!q!) Σ_σ sgn σ (α⊗β)∘σ`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if !self.is_form() || !other.is_form() {
            return Err(GeomError::argument("wedge needs differential forms"));
        }
        let (p, q) = (self.rank(), other.rank());
        let prod = self.tensor_product(other)?;
        let norm = (factorial(p) * factorial(q)) as f64;
        let perms = permutations(p + q);
        let mut out = Self::zeros(vec![Slot::Down; p + q], self.n);
        for k in 0..out.coeffs.len() {
            let idx = out.multi_index(k);
            let mut acc = ZERO;
            for (perm, sign) in &perms {
                let permuted: Vec<usize> = perm.iter().map(|&s| idx[s]).collect();
                acc += prod.get(&permuted) * *sign;
            }
            out.coeffs[k] = acc / norm;
        }
        Ok(out)
    }

    /// Largest `|T(..a..b..) + T(..b..a..)|`: zero for alternating tensors.
    pub fn antisymmetry_defect(&self) -> f64 {
        let r = self.rank();
        let mut worst: f64 = 0.0;
        for k in 0..self.coeffs.len() {
            let idx = self.multi_index(k);
            for i in 0..r {
                for j in i + 1..r {
                    let mut sw = idx.clone();
                    sw.swap(i, j);
                    worst = worst.max((self.coeffs[k] + self.get(&sw)).norm());
                }
            }
        }
        worst
    }
}

pub(crate) fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// All permutations of `0..k` with their signs.
pub(crate) fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if left.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            prefix.push(x);
            // removing position i passes x over i smaller remaining entries
            let s = if i % 2 == 0 { sign } else { -sign };
            rec(prefix, left, s, out);
            prefix.pop();
            left.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..k).collect(), 1.0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::jet::ONE;

    fn basis_covector(n: usize, a: usize) -> TensorValue {
        let mut v = vec![ZERO; 4 * n];
        v[a] = ONE;
        TensorValue::covector(n, v).unwrap()
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        let total: f64 = p.iter().map(|(_, s)| s).sum();
        assert_eq!(total, 0.0);
        for (perm, s) in &p {
            let inv = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            assert_eq!(*s, if inv % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn wedge_of_covectors_is_commutator() {
        let dz = basis_covector(1, 0);
        let dw = basis_covector(1, 1);
        let f = dz.wedge(&dw).unwrap();
        assert_eq!(f.get(&[0, 1]), ONE);
        assert_eq!(f.get(&[1, 0]), -ONE);
        assert_eq!(f.get(&[0, 0]), ZERO);
    }

    #[test]
    fn wedge_is_associative_on_covectors() {
        let a = basis_covector(1, 0).add(&basis_covector(1, 2).scale(I)).unwrap();
        let b = basis_covector(1, 1);
        let c = basis_covector(1, 3).add(&basis_covector(1, 0)).unwrap();
        let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        assert!(l.dist(&r).unwrap() < 1e-15);
        assert!(l.antisymmetry_defect() < 1e-15);
    }

    #[test]
    fn reality_of_a_real_vector() {
        // ∂x = ∂z + ∂z̄ is real, i∂z alone is not
        let v = TensorValue::vector(1, vec![ONE, ZERO, ONE, ZERO]).unwrap();
        assert!(v.is_real(1e-12));
        let u = TensorValue::vector(1, vec![I, ZERO, ZERO, ZERO]).unwrap();
        assert!(!u.is_real(1e-12));
        let re = u.real_part();
        let im = u.imag_part();
        assert!(re.is_real(1e-15) && im.is_real(1e-15));
        let back = re.add(&im.scale(I)).unwrap();
        assert!(back.dist(&u).unwrap() < 1e-15);
    }

    #[test]
    fn contraction_of_endomorphism_is_trace() {
        let m = DMatrix::from_fn(4, 4, |a, b| C::new((a * 4 + b) as f64, 0.0));
        let e = TensorValue::endomorphism(&m).unwrap();
        let tr = e.contract(0, 1).unwrap();
        assert_eq!(tr.rank(), 0);
        assert_eq!(tr.coeffs()[0], C::new(30.0, 0.0));
        assert!(e.contract(0, 0).is_err());
    }
}
