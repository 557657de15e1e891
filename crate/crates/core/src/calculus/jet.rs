//! Forward-mode jets over complex variables.
//!
//! Variables are the complexified chart coordinates `(z, w, z̄, w̄)` treated as
//! independent (Wirtinger calculus), so a jet's gradient entry for `z̄ʲ` is the
//! Wirtinger derivative `∂/∂z̄ʲ`. Holomorphic expressions simply carry zeros there.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C = Complex64;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

/// Arithmetic shared by first- and second-order jets.
///
/// Analytic scalar functions are applied through [`JetAlgebra::compose`], which
/// takes the function value and its first two derivatives at the jet's value.
pub trait JetAlgebra:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn constant(c: C, nvars: usize) -> Self;
    fn variable(value: C, index: usize, nvars: usize) -> Self;
    fn value(&self) -> C;
    fn nvars(&self) -> usize;
    fn compose(&self, f0: C, f1: C, f2: C) -> Self;
    fn scale(&self, c: C) -> Self;
    fn add_const(&self, c: C) -> Self;

    fn recip(&self) -> Self {
        let r = self.value().inv();
        self.compose(r, -r * r, 2.0 * r * r * r)
    }

    fn powi(&self, k: i32) -> Self {
        match k {
            0 => Self::constant(ONE, self.nvars()),
            1 => self.clone(),
            2 => self.clone() * self,
            _ => {
                let v = self.value();
                let kf = k as f64;
                self.compose(v.powi(k), kf * v.powi(k - 1), kf * (kf - 1.0) * v.powi(k - 2))
            }
        }
    }

    fn sqrt(&self) -> Self {
        let s = self.value().sqrt();
        let d1 = 0.5 / s;
        self.compose(s, d1, -0.5 * d1 / self.value())
    }

    fn ln(&self) -> Self {
        let v = self.value();
        let r = v.inv();
        self.compose(v.ln(), r, -r * r)
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(e, e, e)
    }
}

/// Value, gradient and (symmetric) Hessian of a complex scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexJet2 {
    value: C,
    grad: Vec<C>,
    /// Row-major `nvars × nvars`.
    hess: Vec<C>,
}

/// Value and gradient of a complex scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    value: C,
    grad: Vec<C>,
}

impl ComplexJet2 {
    pub fn new_unchecked(value: C, grad: Vec<C>, hess: Vec<C>) -> Self {
        debug_assert_eq!(hess.len(), grad.len() * grad.len());
        Self { value, grad, hess }
    }

    pub fn grad(&self) -> &[C] {
        &self.grad
    }

    pub fn hess(&self, a: usize, b: usize) -> C {
        self.hess[a * self.grad.len() + b]
    }

    /// Derivative along variable `a`, as a first-order jet.
    pub fn partial(&self, a: usize) -> Jet1 {
        let n = self.grad.len();
        Jet1 {
            value: self.grad[a],
            grad: self.hess[a * n..(a + 1) * n].to_vec(),
        }
    }

    pub fn truncate(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            grad: self.grad.clone(),
        }
    }

    fn symmetric_fill(n: usize, mut f: impl FnMut(usize, usize) -> C) -> Vec<C> {
        let mut h = vec![ZERO; n * n];
        for a in 0..n {
            for b in a..n {
                let v = f(a, b);
                h[a * n + b] = v;
                h[b * n + a] = v;
            }
        }
        h
    }

    fn zip(&self, other: &Self, f: impl Fn(C, C) -> C) -> Self {
        Self {
            value: f(self.value, other.value),
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| f(*a, *b)).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn product(&self, other: &Self) -> Self {
        let n = self.grad.len();
        let (f, g) = (self.value, other.value);
        let grad = (0..n).map(|a| f * other.grad[a] + g * self.grad[a]).collect();
        let hess = Self::symmetric_fill(n, |a, b| {
            f * other.hess[a * n + b]
                + g * self.hess[a * n + b]
                + (self.grad[a] * other.grad[b] + self.grad[b] * other.grad[a])
        });
        Self { value: f * g, grad, hess }
    }
}

impl JetAlgebra for ComplexJet2 {
    fn constant(c: C, nvars: usize) -> Self {
        Self {
            value: c,
            grad: vec![ZERO; nvars],
            hess: vec![ZERO; nvars * nvars],
        }
    }

    fn variable(value: C, index: usize, nvars: usize) -> Self {
        let mut j = Self::constant(value, nvars);
        j.grad[index] = ONE;
        j
    }

    fn value(&self) -> C {
        self.value
    }

    fn nvars(&self) -> usize {
        self.grad.len()
    }

    fn compose(&self, f0: C, f1: C, f2: C) -> Self {
        let n = self.grad.len();
        let g = &self.grad;
        let hess = Self::symmetric_fill(n, |a, b| f2 * (g[a] * g[b]) + f1 * self.hess[a * n + b]);
        Self {
            value: f0,
            grad: g.iter().map(|x| f1 * x).collect(),
            hess,
        }
    }

    fn scale(&self, c: C) -> Self {
        Self {
            value: self.value * c,
            grad: self.grad.iter().map(|x| x * c).collect(),
            hess: self.hess.iter().map(|x| x * c).collect(),
        }
    }

    fn add_const(&self, c: C) -> Self {
        let mut j = self.clone();
        j.value += c;
        j
    }
}

impl Jet1 {
    pub fn new(value: C, grad: Vec<C>) -> Self {
        Self { value, grad }
    }

    pub fn grad(&self) -> &[C] {
        &self.grad
    }

    pub fn partial(&self, a: usize) -> C {
        self.grad[a]
    }

    fn zip(&self, other: &Self, f: impl Fn(C, C) -> C) -> Self {
        Self {
            value: f(self.value, other.value),
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn product(&self, other: &Self) -> Self {
        let (f, g) = (self.value, other.value);
        Self {
            value: f * g,
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(fa, ga)| f * ga + g * fa)
                .collect(),
        }
    }
}

impl JetAlgebra for Jet1 {
    fn constant(c: C, nvars: usize) -> Self {
        Self {
            value: c,
            grad: vec![ZERO; nvars],
        }
    }

    fn variable(value: C, index: usize, nvars: usize) -> Self {
        let mut j = Self::constant(value, nvars);
        j.grad[index] = ONE;
        j
    }

    fn value(&self) -> C {
        self.value
    }

    fn nvars(&self) -> usize {
        self.grad.len()
    }

    fn compose(&self, f0: C, f1: C, _f2: C) -> Self {
        Self {
            value: f0,
            grad: self.grad.iter().map(|x| f1 * x).collect(),
        }
    }

    fn scale(&self, c: C) -> Self {
        Self {
            value: self.value * c,
            grad: self.grad.iter().map(|x| x * c).collect(),
        }
    }

    fn add_const(&self, c: C) -> Self {
        let mut j = self.clone();
        j.value += c;
        j
    }
}

macro_rules! jet_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                self.zip(&rhs, |a, b| a + b)
            }
        }
        impl<'a> Add<&'a $t> for $t {
            type Output = $t;
            fn add(self, rhs: &'a $t) -> $t {
                self.zip(rhs, |a, b| a + b)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                self.zip(&rhs, |a, b| a - b)
            }
        }
        impl<'a> Sub<&'a $t> for $t {
            type Output = $t;
            fn sub(self, rhs: &'a $t) -> $t {
                self.zip(rhs, |a, b| a - b)
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                self.product(&rhs)
            }
        }
        impl<'a> Mul<&'a $t> for $t {
            type Output = $t;
            fn mul(self, rhs: &'a $t) -> $t {
                self.product(rhs)
            }
        }
        impl<'a, 'b> Mul<&'b $t> for &'a $t {
            type Output = $t;
            fn mul(self, rhs: &'b $t) -> $t {
                self.product(rhs)
            }
        }
        impl Div for $t {
            type Output = $t;
            #[allow(clippy::suspicious_arithmetic_impl)]
            fn div(self, rhs: $t) -> $t {
                self.product(&rhs.recip())
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scale(-ONE)
            }
        }
    };
}

jet_ops!(ComplexJet2);
jet_ops!(Jet1);

/// Coefficient types that can be summed with ±1 weights; the codomain of a
/// partial derivative in the exterior-derivative and bracket routines.
pub trait Linear: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, c: C);
    fn times(&self, other: &Self) -> Self;
}

impl Linear for C {
    fn zero_like(&self) -> Self {
        ZERO
    }
    fn add_scaled(&mut self, other: &Self, c: C) {
        *self += other * c;
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

impl Linear for Jet1 {
    fn zero_like(&self) -> Self {
        Jet1::constant(ZERO, self.grad.len())
    }
    fn add_scaled(&mut self, other: &Self, c: C) {
        self.value += other.value * c;
        for (a, b) in self.grad.iter_mut().zip(&other.grad) {
            *a += b * c;
        }
    }
    fn times(&self, other: &Self) -> Self {
        self.product(other)
    }
}

/// Something with a value and first partials along the frame variables.
pub trait Differentiable {
    type Partial: Linear;
    fn val(&self) -> C;
    fn d(&self, a: usize) -> Self::Partial;
    /// The same quantity one order lower, in the codomain of [`Differentiable::d`].
    fn lower(&self) -> Self::Partial;
}

impl Differentiable for ComplexJet2 {
    type Partial = Jet1;
    fn val(&self) -> C {
        self.value
    }
    fn d(&self, a: usize) -> Jet1 {
        self.partial(a)
    }
    fn lower(&self) -> Jet1 {
        self.truncate()
    }
}

impl Differentiable for Jet1 {
    type Partial = C;
    fn val(&self) -> C {
        self.value
    }
    fn d(&self, a: usize) -> C {
        self.grad[a]
    }
    fn lower(&self) -> C {
        self.value
    }
}
