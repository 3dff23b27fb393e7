//! Quantitative semigroup estimates for `T(t) = exp(−tA)`: exponential
//! lower bounds from a single one, submultiplicativity of the inverse lower
//! bound, and the scalar norm formula of a semigroup whose norm blows up
//! at `0+`.

use crate::error::{Error, Result};
use crate::operator::{smallest_singular_value, spectral_norm, matrix_exp, semigroup_at, CMat, ComplexMatrix};
use crate::rng::{complex_normal, uniform};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

/// `ν = (1/t₀) ln(c/α)`.
pub fn nu_rate(t0: f64, c: f64, alpha: f64) -> Result<f64> {
    if !(t0 > 0.0 && c > 0.0 && alpha > 1.0 && t0.is_finite() && c.is_finite() && alpha.is_finite()) {
        return Err(Error::InvalidParameters(format!(
            "need t0 > 0, c > 0, alpha > 1; got t0 = {t0}, c = {c}, alpha = {alpha}"
        )));
    }
    Ok((c / alpha).ln() / t0)
}

/// `n` equally spaced points from `min` to `max` inclusive.
pub fn uniform_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && max > min && count >= 2) {
        return Err(Error::InvalidParameters(format!(
            "grid needs finite min < max and at least 2 points, got {min}:{max}:{count}"
        )));
    }
    let h = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { max } else { min + h * i as f64 }).collect())
}

/// Grid with the midpoint of every interval inserted.
pub fn refine_grid(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(grid.last());
    out
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParameters("time grid must be non-empty, finite and non-negative".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameters("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Random generator `A = B + sI`, `B` complex Gaussian, with the shift
/// making the smallest real part of the spectrum lie in `[0.1, 1]`.
pub fn random_stable_generator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<ComplexMatrix> {
    let b = ComplexMatrix::new(CMat::from_fn(dim, dim, |_, _| complex_normal(rng) * 0.5))?;
    let min_re = crate::operator::eigenvalues(&b).iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let s = uniform(rng, 0.1, 1.0) - min_re;
    Ok(b.shifted(Complex64::new(s, 0.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemigroupRow {
    pub t: f64,
    pub sigma_min: f64,
    /// `m·e^{νt}`, the certified lower envelope of `σ_min(T(t))`.
    pub nu_envelope: f64,
    /// `1/σ_min(T(t))`.
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundCertificate {
    pub t0: f64,
    /// `σ_min(T(t₀))`.
    pub c: f64,
    pub alpha: f64,
    pub nu: f64,
    /// `min_t σ_min(T(t)) e^{−νt}` over the grid.
    pub m: f64,
    /// The same minimum over the grid with doubled density.
    pub m_refined: f64,
    /// `|m_refined − m| / m`.
    pub refinement_change: f64,
    /// `max ‖T(δ)⁻¹‖` over `δ ∈ [0, t₀]` (sampled, plus every grid remainder).
    pub k: f64,
    /// `‖T(nt₀+δ)⁻¹‖ ≤ K c^{−n}` at every grid time.
    pub negative_time_exact: bool,
    /// `‖T(nt₀+δ)⁻¹‖ ≤ K (α/c)^n` at every grid time.
    pub negative_time_alpha: bool,
    pub pass: bool,
    pub grid: Vec<f64>,
    pub rows: Vec<SemigroupRow>,
}

fn sigma_min_at(a: &ComplexMatrix, t: f64) -> Result<f64> {
    Ok(smallest_singular_value(&semigroup_at(a, t)?))
}

fn envelope_min(a: &ComplexMatrix, nu: f64, grid: &[f64]) -> Result<f64> {
    let mut m = f64::INFINITY;
    for &t in grid {
        m = m.min(sigma_min_at(a, t)? * (-nu * t).exp());
    }
    Ok(m)
}

/// Exponential lower bound `‖T(t)x‖ ≥ m e^{νt}‖x‖` from the single bound
/// `‖T(t₀)x‖ ≥ c‖x‖`, `c = σ_min(T(t₀))`, and `ν = (1/t₀) ln(c/α)`.
pub fn exponential_lower_bound_check(a: &ComplexMatrix, t0: f64, alpha: f64, t_grid: &[f64]) -> Result<LowerBoundCertificate> {
    check_grid(t_grid)?;
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameters(format!("t0 must be positive, got {t0}")));
    }
    let c = sigma_min_at(a, t0)?;
    let nu = nu_rate(t0, c, alpha)?;
    let m = envelope_min(a, nu, t_grid)?;
    let m_refined = envelope_min(a, nu, &refine_grid(t_grid))?;
    let refinement_change = (m_refined - m).abs() / m;

    let inv_norm = |t: f64| -> Result<f64> { Ok(spectral_norm(matrix_exp(a, t)?.as_matrix())) };
    let split = |t: f64| -> (i32, f64) {
        let n = (t / t0).floor();
        (n as i32, (t - n * t0).max(0.0))
    };
    let mut k = 0.0f64;
    for i in 0..=64 {
        k = k.max(inv_norm(t0 * i as f64 / 64.0)?);
    }
    for &t in t_grid {
        k = k.max(inv_norm(split(t).1)?);
    }
    let (mut exact, mut with_alpha) = (true, true);
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let smin = sigma_min_at(a, t)?;
        let (n, _) = split(t);
        let lhs = 1.0 / smin;
        exact &= lhs <= k * c.powi(-n) * (1.0 + 1e-10);
        with_alpha &= lhs <= k * (alpha / c).powi(n) * (1.0 + 1e-10);
        rows.push(SemigroupRow {
            t,
            sigma_min: smin,
            nu_envelope: m * (nu * t).exp(),
            gamma: lhs,
        });
    }
    let pass = m > 0.0 && m.is_finite() && refinement_change < 0.01 && exact && with_alpha;
    Ok(LowerBoundCertificate {
        t0,
        c,
        alpha,
        nu,
        m,
        m_refined,
        refinement_change,
        k,
        negative_time_exact: exact,
        negative_time_alpha: with_alpha,
        pass,
        grid: t_grid.to_vec(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaReport {
    /// Pairs `(t, s)` with `t + s` on the grid.
    pub pairs: usize,
    /// `max γ(t+s) / (γ(t)γ(s))`.
    pub worst_ratio: f64,
    pub violations: usize,
    pub pass: bool,
}

/// `γ(t) = 1/σ_min(T(t))` and `γ(t+s) ≤ γ(t)γ(s)` on grid pairs.
pub fn gamma_submultiplicativity_check(a: &ComplexMatrix, t_grid: &[f64]) -> Result<GammaReport> {
    check_grid(t_grid)?;
    let gamma: Vec<f64> = t_grid.iter().map(|&t| sigma_min_at(a, t).map(|s| 1.0 / s)).collect::<Result<_>>()?;
    let scale = t_grid.last().copied().unwrap_or(1.0).max(1.0);
    let lookup = |t: f64| -> Option<usize> {
        let i = t_grid.partition_point(|&x| x < t - 1e-12 * scale);
        (i < t_grid.len() && (t_grid[i] - t).abs() <= 1e-12 * scale).then_some(i)
    };
    let (mut pairs, mut violations, mut worst) = (0, 0, 0.0f64);
    for i in 0..t_grid.len() {
        for j in i..t_grid.len() {
            let Some(k) = lookup(t_grid[i] + t_grid[j]) else { continue };
            pairs += 1;
            let ratio = gamma[k] / (gamma[i] * gamma[j]);
            worst = worst.max(ratio);
            if ratio > 1.0 + 1e-10 {
                violations += 1;
            }
        }
    }
    Ok(GammaReport {
        pairs,
        worst_ratio: worst,
        violations,
        pass: violations == 0,
    })
}

// ── scalar example ────────────────────────────────────────────────────

/// Catalog of functions `φ: ℝ₊ → ℝ₊` for the example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PhiSpec {
    /// `x²`
    Xsq,
    /// `x²/2`
    XsqHalf,
    /// `x log(1+x)`
    XLog,
    /// `x log(1+x) log(1+log(1+x))`
    XLogLog,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiValidation {
    pub phi_zero: bool,
    pub derivative_zero: bool,
    pub strictly_increasing: bool,
    pub log_bound: bool,
    pub unbounded: bool,
}

impl PhiValidation {
    pub fn all(&self) -> bool {
        self.phi_zero && self.derivative_zero && self.strictly_increasing && self.log_bound && self.unbounded
    }
}

impl PhiSpec {
    pub const ALL: [PhiSpec; 4] = [PhiSpec::Xsq, PhiSpec::XsqHalf, PhiSpec::XLog, PhiSpec::XLogLog];

    pub fn name(&self) -> &'static str {
        match self {
            PhiSpec::Xsq => "xsq",
            PhiSpec::XsqHalf => "xsq_half",
            PhiSpec::XLog => "xlog",
            PhiSpec::XLogLog => "xloglog",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown phi '{name}'; expected one of xsq, xsq_half, xlog, xloglog")))
    }

    pub fn phi(&self, x: f64) -> f64 {
        match self {
            PhiSpec::Xsq => x * x,
            PhiSpec::XsqHalf => 0.5 * x * x,
            PhiSpec::XLog => x * x.ln_1p(),
            PhiSpec::XLogLog => {
                let l = x.ln_1p();
                x * l * l.ln_1p()
            }
        }
    }

    pub fn dphi(&self, x: f64) -> f64 {
        match self {
            PhiSpec::Xsq => 2.0 * x,
            PhiSpec::XsqHalf => x,
            PhiSpec::XLog => x.ln_1p() + x / (1.0 + x),
            PhiSpec::XLogLog => {
                let l = x.ln_1p();
                let ll = l.ln_1p();
                l * ll + x / (1.0 + x) * (ll + l / (1.0 + l))
            }
        }
    }

    /// Numerical check of `φ(0) = φ'(0) = 0`, `φ'` strictly increasing,
    /// `φ'(log x) ≤ x` on `(1, 10³]` and `φ' → ∞`.
    pub fn validate(&self) -> PhiValidation {
        let grid: Vec<f64> = (0..=4000).map(|i| 1e-3 * 1.005f64.powi(i) - 1e-3).collect();
        let strictly_increasing = grid.windows(2).all(|w| self.dphi(w[1]) > self.dphi(w[0]));
        let log_bound = (1..=2000).map(|i| 1.0 + 999.0 * i as f64 / 2000.0).all(|x| self.dphi(x.ln()) <= x);
        PhiValidation {
            phi_zero: self.phi(0.0).abs() <= 1e-14,
            derivative_zero: self.dphi(0.0).abs() <= 1e-14,
            strictly_increasing,
            log_bound,
            unbounded: self.dphi(1e12) >= 10.0 * self.dphi(1.0).max(1.0),
        }
    }

    fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.all() {
            Ok(())
        } else {
            Err(Error::HypothesesViolated(format!("{} fails the hypotheses on phi: {v:?}", self.name())))
        }
    }

    /// Smallest power of two `x` with `φ'(x) ≥ s`.
    fn bracket(&self, s: f64) -> Result<f64> {
        let mut x = 1.0;
        while self.dphi(x) < s {
            x *= 2.0;
            if x > 1e300 {
                return Err(Error::MaximizerAtBoundary { derivative: self.dphi(x), s });
            }
        }
        Ok(x)
    }
}

/// Unique `x ∈ (0, x_max)` with `φ'(x) = s`, by bisection to full precision.
pub fn young_maximizer(phi: PhiSpec, s: f64, x_max: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameters(format!("s must be positive, got {s}")));
    }
    let d = phi.dphi(x_max);
    if d < s {
        return Err(Error::MaximizerAtBoundary { derivative: d, s });
    }
    let (mut lo, mut hi) = (0.0f64, x_max);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi.dphi(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `φ*(s) = sup_{x>0} (sx − φ(x))`, attained where `φ'(x) = s`.
pub fn young_conjugate(phi: PhiSpec, s: f64, x_max: f64) -> Result<f64> {
    let x0 = young_maximizer(phi, s, x_max)?;
    Ok(s * x0 - phi.phi(x0))
}

/// Maximizes `g` on `n` uniform points of `[lo, hi]`, then refines the best
/// cell by golden-section search; returns `(x, g(x))`.
fn grid_golden_max<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, g(lo));
    let mut best_i = 0;
    for i in 1..n {
        let x = if i + 1 == n { hi } else { lo + h * i as f64 };
        let v = g(x);
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let (mut a, mut b) = ((lo + h * best_i.saturating_sub(1) as f64).max(lo), (lo + h * (best_i + 1) as f64).min(hi));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    for (x, v) in [(c, gc), (d, gd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

const EXAMPLE_GRID: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example32Row {
    pub t: f64,
    pub norm_direct: f64,
    pub norm_reduced: f64,
    pub norm_young: f64,
    pub log_direct: f64,
    pub log_reduced: f64,
    pub log_young: f64,
    /// `max |Δ log|` between the routes.
    pub log_spread: f64,
    /// Spread below `ln 1.01`.
    pub agree: bool,
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameters(format!("t must lie in (0,1), got {t}")));
    }
    Ok(())
}

/// `sup_{x>0} e^{−tφ(x)} max{1, t e^x}` by three routes, in logarithms:
/// the direct grid sup, the reduced form `max{1, sup_{x ≥ log(1/t)} t e^{x−tφ(x)}}`
/// and `max{1, t exp(t φ*(1/t))}`.
pub fn example32_norm(phi: PhiSpec, t: f64) -> Result<Example32Row> {
    check_t(t)?;
    phi.require_valid()?;
    let s = 1.0 / t;
    let x0_est = young_maximizer(phi, s, phi.bracket(s)?)?;
    let x_max = 50f64.max(3.0 * x0_est);
    let lt = t.ln();
    let direct = |x: f64| (-t * phi.phi(x)).max(lt + x - t * phi.phi(x));
    let (_, log_direct) = grid_golden_max(direct, 0.0, x_max, EXAMPLE_GRID);
    let reduced = |x: f64| lt + x - t * phi.phi(x);
    let (_, sup_reduced) = grid_golden_max(reduced, s.ln(), x_max, EXAMPLE_GRID);
    let log_reduced = sup_reduced.max(0.0);
    let log_young = (lt + t * young_conjugate(phi, s, phi.bracket(s)?)?).max(0.0);
    let logs = [log_direct, log_reduced, log_young];
    let spread = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - logs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    Ok(Example32Row {
        t,
        norm_direct: log_direct.exp(),
        norm_reduced: log_reduced.exp(),
        norm_young: log_young.exp(),
        log_direct,
        log_reduced,
        log_young,
        log_spread: spread,
        agree: spread <= 1.01f64.ln(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub t: f64,
    /// `sup_{x ≥ log(1/t)} (x/t − φ(x))` by constrained maximization.
    pub constrained: f64,
    /// `φ*(1/t)`.
    pub conjugate: f64,
    pub maximizer: f64,
    pub log_inv_t: f64,
    pub relative_defect: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub phi: String,
    pub validation: PhiValidation,
    pub rows: Vec<IdentityRow>,
    pub pass: bool,
}

/// `sup_{x ≥ log(1/t)} (x/t − φ(x)) = φ*(1/t)` with the unconstrained
/// maximizer `x₀ ≥ log(1/t)`.
pub fn example32_identity_check(phi: PhiSpec, t_list: &[f64]) -> Result<IdentityReport> {
    phi.require_valid()?;
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        check_t(t)?;
        let s = 1.0 / t;
        let x_hi = phi.bracket(s)?;
        let x0 = young_maximizer(phi, s, x_hi)?;
        let conjugate = s * x0 - phi.phi(x0);
        let lo = s.ln();
        let hi = 50f64.max(3.0 * x0);
        let (_, constrained) = grid_golden_max(|x| s * x - phi.phi(x), lo, hi, EXAMPLE_GRID);
        let relative_defect = (constrained - conjugate).abs() / conjugate.abs().max(1e-300);
        rows.push(IdentityRow {
            t,
            constrained,
            conjugate,
            maximizer: x0,
            log_inv_t: lo,
            relative_defect,
            pass: relative_defect <= 1e-6 && x0 >= lo,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(IdentityReport {
        phi: phi.name().into(),
        validation: phi.validate(),
        rows,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_relative_eq;

    #[test]
    fn nu_examples() {
        assert_relative_eq!(nu_rate(1.0, 0.5, 2.0).unwrap(), 0.25f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(nu_rate(1.0, (-2f64).exp(), 2f64.sqrt()).unwrap(), -2.346573590279973, epsilon = 1e-12);
        assert_eq!(nu_rate(2.0, 1.5, 1.5).unwrap(), 0.0);
        assert!(nu_rate(0.0, 1.0, 2.0).is_err());
        assert!(nu_rate(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let grid = uniform_grid(0.0, 5.0, 101).unwrap();
        let a = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
        let cert = exponential_lower_bound_check(&a, 1.0, 2f64.sqrt(), &grid).unwrap();
        assert_relative_eq!(cert.c, (-2f64).exp(), epsilon = 1e-14);
        assert_relative_eq!(cert.nu, -2.346573590279973, epsilon = 1e-12);
        assert_relative_eq!(cert.m, 1.0, epsilon = 1e-12);
        assert!(cert.pass, "{cert:?}");

        let zero = ComplexMatrix::zeros(2);
        let cert = exponential_lower_bound_check(&zero, 1.0, 2.0, &grid).unwrap();
        assert_eq!(cert.c, 1.0);
        assert!(cert.nu < 0.0 && (cert.m - 1.0).abs() < 1e-14 && cert.pass);
        assert!(cert.rows.iter().all(|r| r.gamma == 1.0));

        let rot = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let cert = exponential_lower_bound_check(&rot, 1.0, 2.0, &grid).unwrap();
        assert_relative_eq!(cert.c, 1.0, epsilon = 1e-12);
        assert_relative_eq!(cert.m, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_examples() {
        let grid = uniform_grid(0.0, 4.0, 41).unwrap();
        let a = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
        let r = gamma_submultiplicativity_check(&a, &grid).unwrap();
        assert!(r.pass && r.pairs > 400);
        assert_relative_eq!(r.worst_ratio, 1.0, epsilon = 1e-10);
        let r = gamma_submultiplicativity_check(&ComplexMatrix::zeros(3), &grid).unwrap();
        assert_eq!(r.worst_ratio, 1.0);
        let mut rng = seeded(4);
        let a = random_stable_generator(&mut rng, 4).unwrap();
        assert!(gamma_submultiplicativity_check(&a, &grid).unwrap().pass);
    }

    #[test]
    fn young_examples() {
        assert_relative_eq!(young_conjugate(PhiSpec::XsqHalf, 3.0, 100.0).unwrap(), 4.5, epsilon = 1e-12);
        assert_relative_eq!(young_conjugate(PhiSpec::Xsq, 10.0, 100.0).unwrap(), 25.0, epsilon = 1e-12);
        assert_relative_eq!(young_maximizer(PhiSpec::Xsq, 10.0, 100.0).unwrap(), 5.0, epsilon = 1e-12);
        let v = young_conjugate(PhiSpec::XLog, 2.0, 100.0).unwrap();
        for i in 0..=10_000 {
            let x = i as f64 * 1e-3;
            assert!(v >= 2.0 * x - PhiSpec::XLog.phi(x) - 1e-12);
        }
        assert!(matches!(
            young_conjugate(PhiSpec::Xsq, 10.0, 1.0),
            Err(Error::MaximizerAtBoundary { .. })
        ));
    }

    #[test]
    fn catalog_satisfies_hypotheses() {
        for phi in PhiSpec::ALL {
            assert!(phi.validate().all(), "{phi:?}: {:?}", phi.validate());
            assert_eq!(PhiSpec::from_name(phi.name()).unwrap(), phi);
        }
        assert!(PhiSpec::from_name("cubic").is_err());
    }

    #[test]
    fn example32_examples() {
        let r = example32_norm(PhiSpec::Xsq, 0.1).unwrap();
        let oracle = 0.1 * 2.5f64.exp();
        for v in [r.norm_direct, r.norm_reduced, r.norm_young] {
            assert_relative_eq!(v, oracle, max_relative = 1e-8);
        }
        let r = example32_norm(PhiSpec::Xsq, 0.5).unwrap();
        assert_eq!((r.norm_direct, r.norm_young), (1.0, 1.0));
        // t = 0.9: t·φ*(1/t) = 1/(4t) exceeds log(1/t), so the sup branch is active
        let r = example32_norm(PhiSpec::Xsq, 0.9).unwrap();
        let oracle = 0.9 * (1.0 / 3.6f64).exp();
        for v in [r.norm_direct, r.norm_reduced, r.norm_young] {
            assert_relative_eq!(v, oracle, max_relative = 1e-8);
        }
        assert!(example32_norm(PhiSpec::Xsq, 1.5).is_err());
        for phi in PhiSpec::ALL {
            for t in [0.05, 0.1, 0.2, 0.5] {
                let r = example32_norm(phi, t).unwrap();
                assert!(r.agree, "{phi:?} {r:?}");
            }
            let mut prev = 0.0;
            for t in [0.1, 0.05, 0.025] {
                let r = example32_norm(phi, t).unwrap();
                assert!(r.log_direct > prev, "{phi:?} {r:?}");
                prev = r.log_direct;
            }
        }
    }

    #[test]
    fn identity_examples() {
        let r = example32_identity_check(PhiSpec::Xsq, &[0.1, 0.9]).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.rows[0].conjugate, 25.0, epsilon = 1e-10);
        assert_relative_eq!(r.rows[0].maximizer, 5.0, epsilon = 1e-12);
        assert_relative_eq!(r.rows[1].conjugate, 1.0 / (4.0 * 0.81), epsilon = 1e-12);
        let r = example32_identity_check(PhiSpec::XsqHalf, &[0.5]).unwrap();
        assert_relative_eq!(r.rows[0].conjugate, 2.0, epsilon = 1e-12);
        assert_relative_eq!(r.rows[0].constrained, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn grids() {
        let g = uniform_grid(0.0, 1.0, 3).unwrap();
        assert_eq!(g, vec![0.0, 0.5, 1.0]);
        assert_eq!(refine_grid(&g), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(uniform_grid(1.0, 0.0, 3).is_err());
    }
}
