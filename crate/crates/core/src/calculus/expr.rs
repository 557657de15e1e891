//! Closed-form scalar descriptors over the complexified chart variables.
//!
//! Variable `a` of an expression is frame index `a` in the ordering
//! `(z¹..zⁿ, w¹..wⁿ, z̄¹..z̄ⁿ, w̄¹..w̄ⁿ)`. Evaluating at a [`ChartPoint`] feeds
//! `(z, w, conj z, conj w)`, so holomorphic descriptors only use the first `2n`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::jet::{JetAlgebra, C, ONE, ZERO};
use super::point::ChartPoint;
use crate::error::{GeomError, Result};

const POLE_GUARD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Powi(Box<Expr>, i32),
    Sqrt(Box<Expr>),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn c(v: C) -> Self {
        Expr::Const(v)
    }

    pub fn re(v: f64) -> Self {
        Expr::Const(C::new(v, 0.0))
    }

    pub fn zero() -> Self {
        Expr::Const(ZERO)
    }

    pub fn one() -> Self {
        Expr::Const(ONE)
    }

    pub fn var(a: usize) -> Self {
        Expr::Var(a)
    }

    pub fn powi(self, k: i32) -> Self {
        Expr::Powi(Box::new(self), k)
    }

    pub fn sqrt(self) -> Self {
        Expr::Sqrt(Box::new(self))
    }

    pub fn ln(self) -> Self {
        Expr::Ln(Box::new(self))
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == ZERO)
    }

    /// The descriptor of `conj(f)` as a function of the same variables: conjugate
    /// constants and swap each variable with its conjugate partner. Assumes `ln`
    /// and `sqrt` arguments avoid the principal branch cut.
    pub fn conjugate(&self, n: usize) -> Expr {
        let b = |e: &Expr| Box::new(e.conjugate(n));
        match self {
            Expr::Const(c) => Expr::Const(c.conj()),
            Expr::Var(a) => Expr::Var((a + 2 * n) % (4 * n)),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Div(x, y) => Expr::Div(b(x), b(y)),
            Expr::Neg(x) => Expr::Neg(b(x)),
            Expr::Powi(x, k) => Expr::Powi(b(x), *k),
            Expr::Sqrt(x) => Expr::Sqrt(b(x)),
            Expr::Ln(x) => Expr::Ln(b(x)),
            Expr::Exp(x) => Expr::Exp(b(x)),
        }
    }

    /// Largest variable index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(a) => a + 1,
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.arity().max(y.arity())
            }
            Expr::Neg(x) | Expr::Powi(x, _) | Expr::Sqrt(x) | Expr::Ln(x) | Expr::Exp(x) => x.arity(),
        }
    }

    /// Plain value at the given variable assignment.
    pub fn value(&self, vars: &[C]) -> Option<C> {
        Some(match self {
            Expr::Const(c) => *c,
            Expr::Var(a) => *vars.get(*a)?,
            Expr::Add(x, y) => x.value(vars)? + y.value(vars)?,
            Expr::Sub(x, y) => x.value(vars)? - y.value(vars)?,
            Expr::Mul(x, y) => x.value(vars)? * y.value(vars)?,
            Expr::Div(x, y) => {
                let d = y.value(vars)?;
                if d.norm() < POLE_GUARD {
                    return None;
                }
                x.value(vars)? / d
            }
            Expr::Neg(x) => -x.value(vars)?,
            Expr::Powi(x, k) => {
                let v = x.value(vars)?;
                if *k < 0 && v.norm() < POLE_GUARD {
                    return None;
                }
                v.powi(*k)
            }
            Expr::Sqrt(x) => {
                let v = x.value(vars)?;
                if v.norm() < POLE_GUARD {
                    return None;
                }
                v.sqrt()
            }
            Expr::Ln(x) => {
                let v = x.value(vars)?;
                if v.norm() < POLE_GUARD {
                    return None;
                }
                v.ln()
            }
            Expr::Exp(x) => x.value(vars)?.exp(),
        })
    }

    /// Jet of the descriptor at a variable assignment; `None` at a pole or
    /// branch point.
    pub fn jet_vars<J: JetAlgebra>(&self, vars: &[C]) -> Option<J> {
        let n = vars.len();
        Some(match self {
            Expr::Const(c) => J::constant(*c, n),
            Expr::Var(a) => J::variable(*vars.get(*a)?, *a, n),
            Expr::Add(x, y) => match (x.as_ref(), y.as_ref()) {
                (Expr::Const(c), e) | (e, Expr::Const(c)) => e.jet_vars::<J>(vars)?.add_const(*c),
                _ => x.jet_vars::<J>(vars)? + y.jet_vars::<J>(vars)?,
            },
            Expr::Sub(x, y) => x.jet_vars::<J>(vars)? - y.jet_vars::<J>(vars)?,
            Expr::Mul(x, y) => match (x.as_ref(), y.as_ref()) {
                (Expr::Const(c), e) | (e, Expr::Const(c)) => e.jet_vars::<J>(vars)?.scale(*c),
                _ => x.jet_vars::<J>(vars)? * y.jet_vars::<J>(vars)?,
            },
            Expr::Div(x, y) => {
                let d = y.jet_vars::<J>(vars)?;
                if d.value().norm() < POLE_GUARD {
                    return None;
                }
                x.jet_vars::<J>(vars)? * d.recip()
            }
            Expr::Neg(x) => -x.jet_vars::<J>(vars)?,
            Expr::Powi(x, k) => {
                let v = x.jet_vars::<J>(vars)?;
                if *k < 0 && v.value().norm() < POLE_GUARD {
                    return None;
                }
                v.powi(*k)
            }
            Expr::Sqrt(x) => {
                let v = x.jet_vars::<J>(vars)?;
                if v.value().norm() < POLE_GUARD {
                    return None;
                }
                v.sqrt()
            }
            Expr::Ln(x) => {
                let v = x.jet_vars::<J>(vars)?;
                if v.value().norm() < POLE_GUARD {
                    return None;
                }
                v.ln()
            }
            Expr::Exp(x) => x.jet_vars::<J>(vars)?.exp(),
        })
    }

    /// Jet over the `4n` chart variables at `p`.
    pub fn jet_eval<J: JetAlgebra>(&self, p: &ChartPoint) -> Result<J> {
        self.jet_vars(&p.vars())
            .ok_or_else(|| GeomError::domain(p, format!("singular descriptor {self}")))
    }

    pub fn eval(&self, p: &ChartPoint) -> Result<C> {
        self.value(&p.vars())
            .ok_or_else(|| GeomError::domain(p, format!("singular descriptor {self}")))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Expr::Const(c) => write!(f, "({c})"),
            Expr::Var(a) => write!(f, "x{a}"),
            Expr::Add(x, y) => write!(f, "({x} + {y})"),
            Expr::Sub(x, y) => write!(f, "({x} - {y})"),
            Expr::Mul(x, y) => write!(f, "{x}*{y}"),
            Expr::Div(x, y) => write!(f, "{x}/{y}"),
            Expr::Neg(x) => write!(f, "-{x}"),
            Expr::Powi(x, k) => write!(f, "{x}^{k}"),
            Expr::Sqrt(x) => write!(f, "sqrt({x})"),
            Expr::Ln(x) => write!(f, "ln({x})"),
            Expr::Exp(x) => write!(f, "exp({x})"),
        }
    }
}

macro_rules! expr_binop {
    ($tr:ident, $m:ident, $v:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$v(Box::new(self), Box::new(rhs))
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$v(Box::new(self), Box::new(rhs.clone()))
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$v(Box::new(self.clone()), Box::new(rhs.clone()))
            }
        }
        impl $tr<C> for Expr {
            type Output = Expr;
            fn $m(self, rhs: C) -> Expr {
                Expr::$v(Box::new(self), Box::new(Expr::Const(rhs)))
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: f64) -> Expr {
                Expr::$v(Box::new(self), Box::new(Expr::re(rhs)))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Named chart variables for an `n`-dimensional model.
#[derive(Clone, Copy, Debug)]
pub struct Vars {
    pub n: usize,
}

impl Vars {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
    pub fn z(&self, j: usize) -> Expr {
        Expr::Var(j)
    }
    pub fn w(&self, j: usize) -> Expr {
        Expr::Var(self.n + j)
    }
    pub fn zb(&self, j: usize) -> Expr {
        Expr::Var(2 * self.n + j)
    }
    pub fn wb(&self, j: usize) -> Expr {
        Expr::Var(3 * self.n + j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::jet::ComplexJet2;

    fn cp1_h() -> Expr {
        let v = Vars::new(1);
        Expr::one() / (Expr::one() + v.z(0) * v.w(0)).powi(2)
    }

    #[test]
    fn one_plus_zw_at_one_one() {
        let v = Vars::new(1);
        let f = Expr::one() + v.z(0) * v.w(0);
        let p = ChartPoint::new(vec![ONE], vec![ONE]).unwrap();
        let j: ComplexJet2 = f.jet_eval(&p).unwrap();
        assert_eq!(j.value(), C::new(2.0, 0.0));
        assert_eq!(j.grad()[0], ONE);
        assert_eq!(j.grad()[1], ONE);
        assert_eq!(j.hess(0, 1), ONE);
    }

    #[test]
    fn inverse_square_value_and_z_partial_against_fd() {
        let f = cp1_h();
        let p = ChartPoint::new(vec![ONE], vec![ONE]).unwrap();
        let j: ComplexJet2 = f.jet_eval(&p).unwrap();
        assert!((j.value() - 0.25).norm() < 1e-15);
        // central difference in the z variable with w held fixed
        let h = 1e-5;
        let at = |dz: f64| f.value(&[C::new(1.0 + dz, 0.0), ONE, ZERO, ZERO]).unwrap();
        let fd = (at(h) - at(-h)) / (2.0 * h);
        assert!((fd + 0.25).norm() < 1e-9);
        assert!((j.grad()[0] - fd).norm() < 1e-9);
    }

    #[test]
    fn pole_is_a_domain_error() {
        let p = ChartPoint::new(vec![ONE], vec![-ONE]).unwrap();
        match cp1_h().jet_eval::<ComplexJet2>(&p) {
            Err(GeomError::Domain { point, .. }) => assert!(point.contains("z=")),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_swaps_variables() {
        let v = Vars::new(1);
        let f = v.z(0) * C::new(0.0, 2.0) + v.wb(0);
        let g = f.conjugate(1);
        let p = ChartPoint::new(vec![C::new(0.3, 0.4)], vec![C::new(-0.1, 0.7)]).unwrap();
        let a = f.eval(&p).unwrap();
        let b = g.eval(&p).unwrap();
        assert!((a.conj() - b).norm() < 1e-15);
    }
}
