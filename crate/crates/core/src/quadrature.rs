//! Adaptive trapezoidal quadrature of matrix-valued integrands along
//! [`Contour`]s.
//!
//! Each segment parameter range is mapped onto the whole real line:
//! `u = u₀ ± e^s` on half-infinite ranges (rays from a vertex, half-lines),
//! `u = sinh s` on full lines and `u = m + h·tanh(π/2·sinh s)` on finite
//! ranges. The trapezoidal rule on the transformed integrand converges
//! exponentially. The step is halved (reusing all previous nodes) until two
//! successive sums agree to the requested tolerance.

use crate::error::{Error, Result};
use crate::operator::{CMat, ComplexMatrix};
use crate::regions::{Contour, Segment};
use num_complex::Complex64;
use serde::Serialize;
use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

/// Default cap on integrand evaluations for one contour integral.
pub const MAX_NODES: usize = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    /// Absolute tolerance on the Frobenius norm of the difference of two
    /// successive refinements (an upper bound for the spectral norm).
    pub tol: f64,
    pub max_nodes: usize,
    /// Trapezoid step on the transformed axis at the first level.
    pub initial_step: f64,
    /// Minimum number of step halvings before convergence is accepted.
    pub min_levels: usize,
}

impl QuadratureOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_nodes: MAX_NODES,
            initial_step: 0.5,
            min_levels: 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureResult {
    pub value: ComplexMatrix,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
enum LineMap {
    /// `u = origin + sign·e^s`
    Exp { origin: f64, sign: f64 },
    /// `u = sinh s`
    Sinh,
    /// `u = mid + half·tanh(π/2·sinh s)`
    TanhSinh { mid: f64, half: f64 },
}

impl LineMap {
    /// Builds the map for `∫_lo^hi`, `lo < hi`.
    fn for_range(lo: f64, hi: f64) -> LineMap {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => LineMap::TanhSinh {
                mid: 0.5 * (lo + hi),
                half: 0.5 * (hi - lo),
            },
            (true, false) => LineMap::Exp { origin: lo, sign: 1.0 },
            (false, true) => LineMap::Exp { origin: hi, sign: -1.0 },
            (false, false) => LineMap::Sinh,
        }
    }

    /// `(u(s), du/ds)`.
    fn eval(&self, s: f64) -> (f64, f64) {
        match *self {
            LineMap::Exp { origin, sign } => {
                let e = s.exp();
                (origin + sign * e, e)
            }
            LineMap::Sinh => (s.sinh(), s.cosh()),
            LineMap::TanhSinh { mid, half } => {
                let w = FRAC_PI_2 * s.sinh();
                let ch = w.cosh();
                (mid + half * w.tanh(), half * FRAC_PI_2 * s.cosh() / (ch * ch))
            }
        }
    }

    /// Admissible range of the transformed variable.
    fn s_limit(&self) -> f64 {
        match self {
            LineMap::Exp { .. } => 650.0,
            LineMap::Sinh => 650.0,
            LineMap::TanhSinh { .. } => 6.5,
        }
    }
}

struct SegmentIntegral {
    value: CMat,
    error: f64,
    nodes: usize,
    converged: bool,
}

/// `∫ g(z) dz` along one segment in its direction of traversal.
fn integrate_segment<G>(seg: &Segment, dim: usize, g: &G, tol: f64, budget: usize, opts: &QuadratureOptions) -> Result<SegmentIntegral>
where
    G: Fn(Complex64) -> Result<CMat>,
{
    let (start, end) = seg.range();
    let (lo, hi, dir) = if end >= start { (start, end, 1.0) } else { (end, start, -1.0) };
    let map = LineMap::for_range(lo, hi);
    let tangent = seg.tangent() * dir;
    let limit = map.s_limit();

    let nodes = Cell::new(0usize);
    let eval = |s: f64| -> Result<CMat> {
        nodes.set(nodes.get() + 1);
        let (u, du) = map.eval(s);
        if du == 0.0 || !u.is_finite() {
            return Ok(CMat::zeros(dim, dim));
        }
        let z = seg.point(u);
        let m = g(z)?;
        Ok(m * (tangent * du))
    };

    // level 0: walk outwards until the integrand is negligible
    let h0 = opts.initial_step;
    let tail_tol = 1e-3 * tol / h0;
    let mut sum = eval(0.0)?;
    let mut k_max = [0i64; 2];
    for (side, sgn) in [(0usize, 1.0), (1usize, -1.0)] {
        let mut quiet = 0;
        let mut k = 1i64;
        loop {
            let s = sgn * k as f64 * h0;
            if s.abs() > limit {
                break;
            }
            let term = eval(s)?;
            let small = term.norm() <= tail_tol;
            sum += term;
            k_max[side] = k;
            quiet = if small { quiet + 1 } else { 0 };
            if quiet >= 4 && s.abs() >= 3.0 {
                break;
            }
            if nodes.get() > budget {
                return Ok(SegmentIntegral {
                    value: sum * Complex64::new(h0, 0.0),
                    error: f64::INFINITY,
                    nodes: nodes.get(),
                    converged: false,
                });
            }
            k += 1;
        }
    }
    let (s_lo, s_hi) = (-(k_max[1] as f64) * h0, k_max[0] as f64 * h0);
    let mut estimate = sum * Complex64::new(h0, 0.0);
    let mut error = f64::INFINITY;

    let mut level = 0usize;
    loop {
        level += 1;
        let h = h0 / (1u64 << level) as f64;
        let fresh = ((s_hi - s_lo) / h).round() as usize / 2 + 1;
        if nodes.get() + fresh > budget {
            return Ok(SegmentIntegral {
                value: estimate,
                error,
                nodes: nodes.get(),
                converged: false,
            });
        }
        let mut odd = CMat::zeros(dim, dim);
        let mut s = s_lo + h;
        while s < s_hi {
            odd += eval(s)?;
            s += 2.0 * h;
        }
        let next = &estimate * Complex64::new(0.5, 0.0) + odd * Complex64::new(h, 0.0);
        error = (&next - &estimate).norm();
        estimate = next;
        if level >= opts.min_levels && error <= tol {
            return Ok(SegmentIntegral {
                value: estimate,
                error,
                nodes: nodes.get(),
                converged: true,
            });
        }
    }
}

/// `(1/2πi) ∮ g(λ) dλ` over the positively oriented `contour`.
///
/// The tolerance is split evenly across segments. When the node cap is hit
/// the last estimate is returned with `converged == false`.
pub fn cauchy_integral<G>(contour: &Contour, dim: usize, g: G, opts: &QuadratureOptions) -> Result<QuadratureResult>
where
    G: Fn(Complex64) -> Result<CMat>,
{
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameters("quadrature tolerance must be positive".into()));
    }
    let nseg = contour.segments.len().max(1);
    let seg_tol = opts.tol / nseg as f64;
    let mut total = CMat::zeros(dim, dim);
    let mut error = 0.0;
    let mut nodes = 0usize;
    let mut converged = true;
    for seg in &contour.segments {
        let budget = opts.max_nodes.saturating_sub(nodes);
        let part = integrate_segment(seg, dim, &g, seg_tol, budget, opts)?;
        total += part.value;
        error += part.error;
        nodes += part.nodes;
        converged &= part.converged;
    }
    let scale = Complex64::new(0.0, -contour.sign() / (2.0 * PI));
    total *= scale;
    if total.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonConvergence {
            what: "contour integral produced non-finite values".into(),
            work: nodes,
        });
    }
    Ok(QuadratureResult {
        value: ComplexMatrix::new(total)?,
        error_estimate: error / (2.0 * PI),
        nodes_used: nodes,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{boundary_contour, Region};

    fn scalar(z: Complex64) -> CMat {
        CMat::from_element(1, 1, z)
    }

    #[test]
    fn cauchy_formula_on_every_family() {
        // f(a) = (1/2πi)∮ f(λ)/(λ − a) dλ with a inside the region
        let a = Complex64::new(1.0, 0.3);
        let f = |l: Complex64| 1.0 / ((3.0 + l) * (3.0 + l));
        let regions = [
            Region::Sector { sigma: 0.8 },
            Region::ShiftedSector { a: 0.5, sigma: 1.0 },
            Region::HalfPlane { alpha: -0.5 },
            Region::Strip { beta: 1.5 },
            Region::KRegion { sigma: 2.2, a: 2.0, r: 0.5 },
            Region::KRegion { sigma: 2.2, a: 0.0, r: 2.0 },
        ];
        for r in regions {
            assert!(r.contains(a), "{r:?}");
            let c = boundary_contour(&r, 1e3).unwrap();
            let res = cauchy_integral(&c, 1, |l| Ok(scalar(f(l) / (l - a))), &QuadratureOptions::new(1e-12)).unwrap();
            assert!(res.converged, "{r:?}");
            let err = (res.value[(0, 0)] - f(a)).norm();
            assert!(err < 1e-11, "{r:?}: {err:e} after {} nodes", res.nodes_used);
        }
    }

    #[test]
    fn node_cap_reports_non_convergence() {
        let c = boundary_contour(&Region::HalfPlane { alpha: 0.0 }, 10.0).unwrap();
        let mut opts = QuadratureOptions::new(1e-30);
        opts.max_nodes = 5000;
        let res = cauchy_integral(&c, 1, |l| Ok(scalar(1.0 / ((l - 1.0) * (l + 3.0)))), &opts).unwrap();
        assert!(!res.converged);
        assert!(res.nodes_used <= 5000);
    }
}
