//! Browser bindings: flat `f64` buffers for the demo page in `www/`.

use cxgeom::calculus::{exterior_derivative, ChartPoint, C};
use cxgeom::eguchi::monge_ampere_grid;
use cxgeom::flows::{default_steps, geodesic_trajectory, GeodesicState};
use cxgeom::models::{build_model, ModelKind};
use cxgeom::quaternion::cp1_explicit_forms;
use wasm_bindgen::prelude::*;

fn js(e: cxgeom::GeomError) -> JsError {
    JsError::new(&e.to_string())
}

/// Geodesic from `(z, w)` with velocity `(p, q)` on a one-dimensional model
/// (`cp1`, `disk`, `flat1`). Rows of `[t, Re z, Im z, Re w, Im w]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn geodesic(
    model: &str,
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
    p_re: f64,
    p_im: f64,
    q_re: f64,
    q_im: f64,
    t: f64,
) -> Result<Vec<f64>, JsError> {
    let kind: ModelKind = model.parse().map_err(js)?;
    let m = build_model(kind).map_err(js)?;
    if m.n() != 1 {
        return Err(JsError::new("the demo draws one-dimensional models only"));
    }
    let p = ChartPoint::new1(C::new(z_re, z_im), C::new(w_re, w_im)).map_err(js)?;
    let s0 = GeodesicState::new(p, vec![C::new(p_re, p_im), C::new(q_re, q_im)]).map_err(js)?;
    let rows = geodesic_trajectory(&m, &s0, t, default_steps(t)).map_err(js)?;
    let mut out = Vec::with_capacity(5 * rows.len());
    for (t, s) in rows {
        let (z, w) = (s.position.z()[0], s.position.w()[0]);
        out.extend([t, z.re, z.im, w.re, w.im]);
    }
    Ok(out)
}

/// `‖dω_J‖∞` of the CP¹ almost hyper-Hermitian structure on an `n × n` grid of
/// `z ∈ [−extent, extent]²` with `w` fixed; row-major in `Im z`, NaN where
/// `1 + zw` vanishes.
#[wasm_bindgen]
pub fn dj_field(n: usize, extent: f64, w_re: f64, w_im: f64) -> Vec<f64> {
    let (_, omega_j, _) = cp1_explicit_forms();
    let w = C::new(w_re, w_im);
    let coord = |k: usize| if n > 1 { -extent + 2.0 * extent * k as f64 / (n - 1) as f64 } else { 0.0 };
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            let z = C::new(coord(ix), coord(iy));
            let v = ChartPoint::new1(z, w)
                .and_then(|p| exterior_derivative(&omega_j, &p))
                .map(|d| d.max_abs())
                .unwrap_or(f64::NAN);
            out.push(v);
        }
    }
    out
}

/// Eguchi-Hanson Monge-Ampère residual over `z = x`, `u = iy` on an `n × n`
/// grid, as `[x, y, residual]` triples.
#[wasm_bindgen]
pub fn eh_residual(n: usize, extent: f64) -> Result<Vec<f64>, JsError> {
    let cells = monge_ampere_grid(n, extent).map_err(js)?;
    Ok(cells.into_iter().flat_map(|(x, y, r)| [x, y, r]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geodesic_rows_start_at_the_initial_point() {
        let v = geodesic("cp1", 0.3, 0.0, 0.0, 0.1, 0.0, 0.0, 0.2, 0.0, 0.5).unwrap();
        assert_eq!(v.len(), 5 * 501);
        assert_eq!(&v[..5], &[0.0, 0.3, 0.0, 0.0, 0.1]);
    }

    #[test]
    fn dj_field_is_finite_away_from_the_pole() {
        let f = dj_field(5, 0.5, 0.0, 0.1);
        assert!(f.iter().all(|x| x.is_finite() && *x > 0.0));
    }

    #[test]
    fn eh_residual_is_small() {
        let r = eh_residual(4, 1.5).unwrap();
        assert_eq!(r.len(), 48);
        assert!(r.chunks(3).all(|c| c[2] < 1e-10));
    }
}
