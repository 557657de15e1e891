//! Complexified Kähler models: closed-form extended metric coefficients
//! `hᶜ_{jk̄}(z, w)` and their domains.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::calculus::{ChartPoint, ComplexJet2, Expr, Vars, C};
use crate::error::{GeomError, Result};
use crate::report::ValidationReport;
use crate::sampling::{sample_diagonal, sample_points};

/// Distance kept from the singular locus.
pub const SINGULAR_GUARD: f64 = 1e-6;
/// Coordinates beyond this modulus are treated as having left the chart.
pub const CHART_RADIUS: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Flat(usize),
    Cp1,
    Cpn(usize),
    Disk,
}

impl FromStr for ModelKind {
    type Err = GeomError;

    /// Accepts `flat1`, `flat:N`, `cp1`, `cpn:N` and `disk`.
    fn from_str(s: &str) -> Result<Self> {
        let dim = |t: &str| -> Result<usize> {
            let n: usize = t
                .parse()
                .map_err(|_| GeomError::argument(format!("bad dimension in model id {s:?}")))?;
            if n == 0 {
                return Err(GeomError::argument("model dimension must be at least 1"));
            }
            Ok(n)
        };
        match s {
            "cp1" => Ok(ModelKind::Cp1),
            "disk" => Ok(ModelKind::Disk),
            _ => {
                if let Some(t) = s.strip_prefix("cpn:") {
                    Ok(ModelKind::Cpn(dim(t)?))
                } else if let Some(t) = s.strip_prefix("flat:").or_else(|| s.strip_prefix("flat")) {
                    Ok(ModelKind::Flat(dim(t)?))
                } else {
                    Err(GeomError::argument(format!("unknown model {s:?}")))
                }
            }
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Flat(n) => write!(f, "flat{n}"),
            ModelKind::Cp1 => write!(f, "cp1"),
            ModelKind::Cpn(n) => write!(f, "cpn:{n}"),
            ModelKind::Disk => write!(f, "disk"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Guard {
    None,
    /// `|1 + Σ zᵢwᵢ| ≥ guard`
    FubiniStudy,
    /// `|1 − zw| ≥ guard`, `|z|, |w| < 1`
    Disk,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KahlerModel {
    name: String,
    n: usize,
    /// Row-major `n × n`, entry `(j, k)` is `hᶜ_{jk̄}`.
    h: Vec<Expr>,
    guard: Guard,
}

pub fn build_model(kind: ModelKind) -> Result<KahlerModel> {
    let name = kind.to_string();
    match kind {
        ModelKind::Flat(n) => {
            if n == 0 {
                return Err(GeomError::argument("model dimension must be at least 1"));
            }
            let h = (0..n * n)
                .map(|k| if k / n == k % n { Expr::one() } else { Expr::zero() })
                .collect();
            Ok(KahlerModel { name, n, h, guard: Guard::None })
        }
        ModelKind::Cp1 => {
            let v = Vars::new(1);
            let h = Expr::one() / (Expr::one() + v.z(0) * v.w(0)).powi(2);
            Ok(KahlerModel { name, n: 1, h: vec![h], guard: Guard::FubiniStudy })
        }
        ModelKind::Cpn(n) => {
            if n == 0 {
                return Err(GeomError::argument("model dimension must be at least 1"));
            }
            let v = Vars::new(n);
            let s = (0..n).fold(Expr::one(), |acc, i| acc + v.z(i) * v.w(i));
            let mut h = Vec::with_capacity(n * n);
            for j in 0..n {
                for k in 0..n {
                    let cross = v.w(j) * v.z(k);
                    let num = if j == k { s.clone() - cross } else { -cross };
                    h.push(num / s.clone().powi(2));
                }
            }
            Ok(KahlerModel { name, n, h, guard: Guard::FubiniStudy })
        }
        ModelKind::Disk => {
            let v = Vars::new(1);
            let h = Expr::one() / (Expr::one() - v.z(0) * v.w(0)).powi(2);
            Ok(KahlerModel { name, n: 1, h: vec![h], guard: Guard::Disk })
        }
    }
}

impl KahlerModel {
    /// A model from arbitrary descriptors, with only the chart-radius guard.
    /// Used to exercise the validator on coefficient functions that are not
    /// genuine holomorphic extensions.
    pub fn custom(name: &str, n: usize, h: Vec<Expr>) -> Result<Self> {
        if n == 0 || h.len() != n * n {
            return Err(GeomError::argument("custom model needs n ≥ 1 and n² coefficients"));
        }
        Ok(Self { name: name.to_string(), n, h, guard: Guard::None })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_expr(&self, j: usize, k: usize) -> &Expr {
        &self.h[j * self.n + k]
    }

    pub fn is_flat(&self) -> bool {
        self.guard == Guard::None && self.h.iter().enumerate().all(|(k, e)| {
            let want = if k / self.n == k % self.n { Expr::one() } else { Expr::zero() };
            *e == want
        })
    }

    pub fn check_domain(&self, p: &ChartPoint) -> Result<()> {
        if p.n() != self.n {
            return Err(GeomError::argument(format!(
                "model {} has dimension {}, point has {}",
                self.name,
                self.n,
                p.n()
            )));
        }
        if p.z().iter().chain(p.w()).any(|c| !(c.norm() <= CHART_RADIUS)) {
            return Err(GeomError::domain(p, "left the chart"));
        }
        match self.guard {
            Guard::None => Ok(()),
            Guard::FubiniStudy => {
                let s: C = C::new(1.0, 0.0) + p.z().iter().zip(p.w()).map(|(z, w)| z * w).sum::<C>();
                if s.norm() < SINGULAR_GUARD {
                    Err(GeomError::domain(p, "too close to the singular locus 1 + zw = 0"))
                } else {
                    Ok(())
                }
            }
            Guard::Disk => {
                let (z, w) = (p.z()[0], p.w()[0]);
                if z.norm() >= 1.0 || w.norm() >= 1.0 {
                    Err(GeomError::domain(p, "outside the unit bidisk"))
                } else if (C::new(1.0, 0.0) - z * w).norm() < SINGULAR_GUARD {
                    Err(GeomError::domain(p, "too close to the singular locus 1 − zw = 0"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Jets of `hᶜ_{jk̄}` at `p`, row-major, over the `4n` chart variables.
    pub fn h_c(&self, p: &ChartPoint) -> Result<Vec<ComplexJet2>> {
        self.check_domain(p)?;
        self.h.iter().map(|e| e.jet_eval(p)).collect()
    }

    pub fn h_value(&self, p: &ChartPoint) -> Result<DMatrix<C>> {
        self.check_domain(p)?;
        let vals = self.h.iter().map(|e| e.eval(p)).collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(self.n, self.n, &vals))
    }
}

/// Wirtinger derivative `∂/∂x̄ = ½(∂/∂Re x + i ∂/∂Im x)` of every `h` entry
/// along holomorphic coordinate `a`, by central differences.
fn antiholomorphic_fd(m: &KahlerModel, p: &ChartPoint, step: f64) -> Result<f64> {
    let hol = p.hol();
    let mut worst: f64 = 0.0;
    for a in 0..hol.len() {
        let at = |d: C| -> Result<DMatrix<C>> {
            let mut x = hol.clone();
            x[a] += d;
            m.h_value(&ChartPoint::from_hol(&x)?)
        };
        let dx = (at(C::new(step, 0.0))? - at(C::new(-step, 0.0))?) / C::new(2.0 * step, 0.0);
        let dy = (at(C::new(0.0, step))? - at(C::new(0.0, -step))?) / C::new(2.0 * step, 0.0);
        let dbar = (dx + dy * C::new(0.0, 1.0)) * C::new(0.5, 0.0);
        worst = worst.max(dbar.iter().fold(0.0, |m, c| m.max(c.norm())));
    }
    Ok(worst)
}

/// Hermiticity, positivity on the diagonal and holomorphy of `hᶜ` at seeded
/// sample points.
pub fn validate_model(m: &KahlerModel, samples: usize, seed: u64) -> Result<ValidationReport> {
    if samples == 0 {
        return Err(GeomError::argument("validate_model needs at least one sample"));
    }
    let mut herm: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for p in sample_diagonal(m, samples, seed) {
        let h = m.h_value(&p)?;
        let adj = h.adjoint();
        herm = herm.max((&h - &adj).iter().fold(0.0, |a, c| a.max(c.norm())));
        let sym = (&h + &adj) * C::new(0.5, 0.0);
        let eig = sym.symmetric_eigenvalues();
        min_eig = min_eig.min(eig.iter().fold(f64::INFINITY, |a, &e| a.min(e)));
    }
    let mut anti: f64 = 0.0;
    for p in sample_points(m, samples, seed.wrapping_add(1)) {
        anti = anti.max(antiholomorphic_fd(m, &p, 1e-5)?);
    }
    let mut r = ValidationReport::new();
    r.at_most("hermiticity", "h(z, z̄) is Hermitian on the totally real locus", herm, 1e-10);
    r.at_least("min-eigenvalue", "h(z, z̄) is positive definite", min_eig, 1e-10);
    r.at_most("antiholomorphic", "hᶜ is the holomorphic extension of h", anti, 1e-6);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::JetAlgebra;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn parse_ids() {
        assert_eq!("flat1".parse::<ModelKind>().unwrap(), ModelKind::Flat(1));
        assert_eq!("flat:3".parse::<ModelKind>().unwrap(), ModelKind::Flat(3));
        assert_eq!("cpn:2".parse::<ModelKind>().unwrap(), ModelKind::Cpn(2));
        assert!("cpn:0".parse::<ModelKind>().is_err());
        assert!(matches!("sphere".parse::<ModelKind>(), Err(GeomError::Argument(_))));
    }

    #[test]
    fn cp1_values() {
        let m = build_model(ModelKind::Cp1).unwrap();
        let h0 = m.h_c(&ChartPoint::new1(c(0.0, 0.0), c(0.0, 0.0)).unwrap()).unwrap();
        assert_eq!(h0[0].value(), c(1.0, 0.0));
        let h1 = m.h_value(&ChartPoint::new1(c(1.0, 0.0), c(1.0, 0.0)).unwrap()).unwrap();
        assert!((h1[(0, 0)] - 0.25).norm() < 1e-15);
    }

    #[test]
    fn flat2_is_identity() {
        let m = build_model(ModelKind::Flat(2)).unwrap();
        let p = ChartPoint::new(vec![c(0.3, 1.0), c(-2.0, 0.0)], vec![c(5.0, 1.0), c(0.0, 0.1)]).unwrap();
        assert_eq!(m.h_value(&p).unwrap(), DMatrix::identity(2, 2));
        assert!(m.is_flat());
    }

    #[test]
    fn cp1_guard() {
        let m = build_model(ModelKind::Cp1).unwrap();
        let p = ChartPoint::new1(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!(matches!(m.h_c(&p), Err(GeomError::Domain { .. })));
    }

    #[test]
    fn cpn_with_n1_matches_cp1() {
        let a = build_model(ModelKind::Cpn(1)).unwrap();
        let b = build_model(ModelKind::Cp1).unwrap();
        let p = ChartPoint::new1(c(0.3, -0.2), c(0.1, 0.5)).unwrap();
        assert!((a.h_value(&p).unwrap()[(0, 0)] - b.h_value(&p).unwrap()[(0, 0)]).norm() < 1e-15);
    }

    #[test]
    fn built_in_models_validate() {
        for kind in [ModelKind::Flat(1), ModelKind::Flat(2), ModelKind::Cp1, ModelKind::Cpn(2), ModelKind::Disk] {
            let m = build_model(kind).unwrap();
            let r = validate_model(&m, 100, 11).unwrap();
            assert!(r.pass(), "{kind}: {r:?}");
        }
    }

    #[test]
    fn flat_defects_are_zero() {
        let m = build_model(ModelKind::Flat(1)).unwrap();
        let r = validate_model(&m, 100, 3).unwrap();
        assert_eq!(r.get("hermiticity").unwrap().max_defect, 0.0);
        assert_eq!(r.get("antiholomorphic").unwrap().max_defect, 0.0);
        assert_eq!(r.get("min-eigenvalue").unwrap().max_defect, 1.0);
    }

    #[test]
    fn corrupted_model_fails() {
        let v = Vars::new(1);
        let h = Expr::one() / (Expr::one() + v.z(0) * v.wb(0)).powi(2);
        let m = KahlerModel::custom("corrupted", 1, vec![h]).unwrap();
        let r = validate_model(&m, 100, 7).unwrap();
        assert!(r.get("antiholomorphic").unwrap().max_defect > 0.01);
        assert!(!r.pass());
    }
}
