//! Holomorphic functional calculus by contour quadrature.
//!
//! `f(A) = (1/2πi) ∫_Γ f(λ) R(λ, A) dλ` over the boundary of a sector,
//! strip, half-plane or K-region. Resolvents are evaluated in the Schur
//! basis `A = Q T Q*`, where `λ − T` is triangular, and the integral is
//! mapped back once at the end.

use crate::error::{Error, Result};
use crate::holo::{HoloFunction, Rational};
use crate::operator::{spectral_norm, CMat, ComplexMatrix, EigenDecomposition};
use crate::quadrature::{cauchy_integral, QuadratureOptions, QuadratureResult};
use crate::regions::{boundary_contour, folklore_constants, hinf1_seminorm_estimate, sup_norm_estimate, Contour, FolkloreConstants, GridSpec, Region};
use crate::rng::{seeded, uniform};
use nalgebra::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Truncation radius attached to calculus contours (used by geometric
/// checks only; the quadrature itself runs over the unbounded path).
pub const CONTOUR_RADIUS: f64 = 1e4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Resolvents of `A` and its real shifts in the Schur basis.
#[derive(Clone, Debug)]
pub struct SchurResolvent {
    q: CMat,
    t: CMat,
}

impl SchurResolvent {
    pub fn new(a: &ComplexMatrix) -> Self {
        let (q, t) = Schur::new(a.as_matrix().clone()).unpack();
        Self { q, t }
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// `(λ − shift − T)⁻¹`, i.e. `Q* R(λ, A + shift) Q`.
    pub fn at(&self, lambda: Complex64, shift: f64) -> Result<CMat> {
        let n = self.dim();
        let mu = lambda - shift;
        let mut x = CMat::zeros(n, n);
        let mut pivots = Vec::with_capacity(n);
        for i in 0..n {
            let d = mu - self.t[(i, i)];
            if d.norm() <= f64::MIN_POSITIVE || !d.norm().is_finite() {
                return Err(Error::SingularResolvent {
                    re: lambda.re,
                    im: lambda.im,
                    rcond: 0.0,
                });
            }
            pivots.push(d);
        }
        for j in 0..n {
            x[(j, j)] = 1.0 / pivots[j];
            for i in (0..j).rev() {
                let mut acc = ZERO;
                for k in (i + 1)..=j {
                    acc += self.t[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = acc / pivots[i];
            }
        }
        Ok(x)
    }

    /// Maps a Schur-basis matrix back to the original basis.
    pub fn to_original(&self, m: &CMat) -> CMat {
        &self.q * m * self.q.adjoint()
    }
}

/// Contour family and parameters for [`fc`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CalculusDomain {
    /// Boundary of `Sect_η`.
    Sector { eta: f64 },
    /// Boundary of `a + Sect_σ`.
    ShiftedSector { a: f64, sigma: f64 },
    /// Lines `Re z = ±σ`.
    Strip { sigma: f64 },
    /// Line `Re z = −η`.
    HalfPlane { eta: f64 },
    /// Boundary of `K_{σ',a,−θ'}`.
    KRegion { sigma_prime: f64, a: f64, theta_prime: f64 },
}

impl CalculusDomain {
    /// Region enclosed by the integration contour.
    pub fn region(&self) -> Region {
        match *self {
            CalculusDomain::Sector { eta } => Region::Sector { sigma: eta },
            CalculusDomain::ShiftedSector { a, sigma } => Region::ShiftedSector { a, sigma },
            CalculusDomain::Strip { sigma } => Region::Strip { beta: sigma },
            CalculusDomain::HalfPlane { eta } => Region::HalfPlane { alpha: -eta },
            CalculusDomain::KRegion { sigma_prime, a, theta_prime } => Region::KRegion {
                sigma: sigma_prime,
                a,
                r: -theta_prime,
            },
        }
    }

    /// Inverse of [`CalculusDomain::region`].
    pub fn from_region(region: &Region) -> Self {
        match *region {
            Region::Sector { sigma } => CalculusDomain::Sector { eta: sigma },
            Region::ShiftedSector { a, sigma } => CalculusDomain::ShiftedSector { a, sigma },
            Region::Strip { beta } => CalculusDomain::Strip { sigma: beta },
            Region::HalfPlane { alpha } => CalculusDomain::HalfPlane { eta: -alpha },
            Region::KRegion { sigma, a, r } => CalculusDomain::KRegion {
                sigma_prime: sigma,
                a,
                theta_prime: -r,
            },
        }
    }

    pub fn contour(&self) -> Result<Contour> {
        boundary_contour(&self.region(), CONTOUR_RADIUS)
    }
}

fn check_function(f: &HoloFunction, contour: &Contour) -> Result<()> {
    if !(f.decay_exponent() > 0.0) {
        return Err(Error::NoDecay(f.name().to_string()));
    }
    if let Some(domain) = f.domain() {
        for (z, _) in contour.sample_with_inward_normals(64, 100.0) {
            if !domain.contains(z) {
                return Err(Error::InvalidRegion(format!(
                    "integration contour leaves the domain of `{}` at {z}",
                    f.name()
                )));
            }
        }
    }
    Ok(())
}

fn check_spectrum(spectrum: &[Complex64], domain: &CalculusDomain, contour: &Contour, tol: f64) -> Result<()> {
    let region = domain.region();
    for &l in spectrum {
        let d = contour.distance(l);
        if d <= (10.0 * tol).max(1e-12 * (1.0 + l.norm())) {
            return Err(Error::SpectrumOnContour {
                re: l.re,
                im: l.im,
                distance: d,
            });
        }
        if !region.contains(l) {
            return Err(match *domain {
                CalculusDomain::Sector { eta } => Error::SpectrumOutsideSector {
                    re: l.re,
                    im: l.im,
                    angle: eta,
                },
                _ => Error::SpectrumOutsideRegion { re: l.re, im: l.im },
            });
        }
    }
    Ok(())
}

fn checked_eval(f: &HoloFunction, z: Complex64) -> Result<Complex64> {
    let v = f.eval(z);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::EvaluationFailure { re: z.re, im: z.im })
    }
}

fn into_original(kernel: &SchurResolvent, mut res: QuadratureResult) -> Result<QuadratureResult> {
    res.value = ComplexMatrix::new(kernel.to_original(res.value.as_matrix()))?;
    Ok(res)
}

fn require_converged(res: QuadratureResult, what: &str) -> Result<QuadratureResult> {
    if res.converged {
        Ok(res)
    } else {
        Err(Error::NonConvergence {
            what: what.to_string(),
            work: res.nodes_used,
        })
    }
}

/// `f(A)` over the contour of `domain`, returning unconverged results as
/// they are.
pub fn fc_with_options(f: &HoloFunction, a: &ComplexMatrix, domain: &CalculusDomain, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    let contour = domain.contour()?;
    check_function(f, &contour)?;
    let kernel = SchurResolvent::new(a);
    check_spectrum(&kernel.eigenvalues(), domain, &contour, opts.tol)?;
    let res = cauchy_integral(
        &contour,
        a.dim(),
        |l| Ok(kernel.at(l, 0.0)? * checked_eval(f, l)?),
        opts,
    )?;
    into_original(&kernel, res)
}

/// `f(A)` over the contour of `domain` to absolute tolerance `tol`.
pub fn fc(f: &HoloFunction, a: &ComplexMatrix, domain: &CalculusDomain, tol: f64) -> Result<QuadratureResult> {
    let res = fc_with_options(f, a, domain, &QuadratureOptions::new(tol))?;
    require_converged(res, "functional calculus quadrature")
}

/// `f(A)` over `∂Sect_η`.
pub fn fc_sector(f: &HoloFunction, a: &ComplexMatrix, eta: f64, tol: f64) -> Result<QuadratureResult> {
    fc(f, a, &CalculusDomain::Sector { eta }, tol)
}

/// `f(B)` over the lines `Re z = ±σ`.
pub fn fc_strip(f: &HoloFunction, b: &ComplexMatrix, sigma: f64, tol: f64) -> Result<QuadratureResult> {
    fc(f, b, &CalculusDomain::Strip { sigma }, tol)
}

/// `f(A)` over the line `Re z = −η`.
pub fn fc_halfplane(f: &HoloFunction, a: &ComplexMatrix, eta: f64, tol: f64) -> Result<QuadratureResult> {
    fc(f, a, &CalculusDomain::HalfPlane { eta }, tol)
}

/// `f(A)` over `∂K_{σ',a,−θ'}`.
pub fn fc_kregion(f: &HoloFunction, a: &ComplexMatrix, sigma_prime: f64, a_shift: f64, theta_prime: f64, tol: f64) -> Result<QuadratureResult> {
    fc(
        f,
        a,
        &CalculusDomain::KRegion {
            sigma_prime,
            a: a_shift,
            theta_prime,
        },
        tol,
    )
}

// ── regularizers ──────────────────────────────────────────────────────

/// Approximate-identity families for bounded functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularizerFamily {
    /// `τ_n(z) = [n/(n+w)]·[nw/(1+nw)]`, `w = z + 1 + η'`; tends to 1.
    Tau,
    /// `ϱ(nz) − ϱ(z/n)` with `ϱ(z) = z/(1+η'+z)²`; tends to 0.
    Rho,
}

/// `τ_n`: bounded by 1 on `Re z > −1 − η'`, decays like `|z|⁻¹`, and tends
/// to 1 pointwise as `n → ∞`.
pub fn regularizer_sequence(n: u32, eta_prime: f64) -> Result<HoloFunction> {
    regularizer_family(RegularizerFamily::Tau, n, eta_prime)
}

pub fn regularizer_family(family: RegularizerFamily, n: u32, eta_prime: f64) -> Result<HoloFunction> {
    if n == 0 {
        return Err(Error::InvalidParameters("regularizer index n must be ≥ 1".into()));
    }
    if !(eta_prime > 0.0 && eta_prime.is_finite()) {
        return Err(Error::InvalidParameters(format!("eta_prime must be positive, got {eta_prime}")));
    }
    let nf = n as f64;
    let shift = 1.0 + eta_prime;
    Ok(match family {
        RegularizerFamily::Tau => HoloFunction::new(format!("tau_{n}(eta'={eta_prime})"), 1.0, move |z| {
            let w = z + shift;
            nf * nf * w / ((nf + w) * (1.0 + nf * w))
        })
        .with_derivative(move |z| {
            let w = z + shift;
            let d = (nf + w) * (1.0 + nf * w);
            nf * nf * nf * (1.0 - w * w) / (d * d)
        })
        .with_domain(Region::HalfPlane { alpha: -shift }),
        RegularizerFamily::Rho => {
            let rho = move |z: Complex64| z / ((shift + z) * (shift + z));
            let drho = move |z: Complex64| (shift - z) / ((shift + z) * (shift + z) * (shift + z));
            HoloFunction::new(format!("rho_{n}(eta'={eta_prime})"), 1.0, move |z| rho(nf * z) - rho(z / nf))
                .with_derivative(move |z| nf * drho(nf * z) - drho(z / nf) / nf)
                .with_domain(Region::HalfPlane { alpha: -shift / nf })
        }
    })
}

/// Outcome of [`convergence_lemma_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub ns: Vec<u32>,
    /// `‖(τ_n² f)(A) − f(A)‖` against the eigendecomposition.
    pub errors: Vec<f64>,
    /// `‖(τ_n² f)(A)‖`.
    pub norms: Vec<f64>,
    /// Sampled `sup |f|` over the half-plane together with the spectrum.
    pub sup_f: f64,
    /// `max_n ‖(τ_n² f)(A)‖ / sup |f|`.
    pub bound_ratio: f64,
    pub monotone: bool,
    /// `errors[last] / errors[last − 1]`; about 1/2 for the `O(1/n)` rate.
    pub tail_ratio: f64,
    pub pass: bool,
}

/// Regularizes a bounded `f` by `τ_n²` (with `η' = η`), computes the
/// approximants over `Re z = −η` for `n = 1, 2, 4, …, 64` and compares them
/// with `f(A)` from the eigendecomposition.
///
/// Passes when the errors decrease monotonically (up to the quadrature
/// tolerance) and the last doubling of `n` shrinks the error by at least a
/// factor 3/4, or the error is already below `tol`.
pub fn convergence_lemma_check(f: &HoloFunction, a: &ComplexMatrix, eta: f64, tol: f64) -> Result<ConvergenceReport> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameters(format!("eta must be positive, got {eta}")));
    }
    let eig = EigenDecomposition::new(a)?;
    let target = eig.apply(|z| f.eval(z));
    let domain = CalculusDomain::HalfPlane { eta };
    let region = domain.region();
    let mut sup_f = sup_norm_estimate(f, &region, &GridSpec::default())?.value;
    for &l in &eig.values {
        sup_f = sup_f.max(f.eval(l).norm());
    }
    let ns: Vec<u32> = (0..7).map(|k| 1u32 << k).collect();
    let (mut errors, mut norms) = (Vec::new(), Vec::new());
    for &n in &ns {
        let tau = regularizer_sequence(n, eta)?;
        let fn_ = tau.product(&tau).product(f);
        let v = fc(&fn_, a, &domain, tol)?;
        errors.push(spectral_norm(&(v.value.as_matrix() - &target)));
        norms.push(spectral_norm(v.value.as_matrix()));
    }
    let monotone = errors.windows(2).all(|w| w[1] <= w[0] + 2.0 * tol);
    let last = errors[errors.len() - 1];
    let before = errors[errors.len() - 2];
    let tail_ratio = if before > 0.0 { last / before } else { 0.0 };
    let bound_ratio = norms.iter().fold(0.0f64, |m, &x| m.max(x)) / sup_f.max(f64::MIN_POSITIVE);
    let pass = monotone && (tail_ratio <= 0.75 || last <= tol);
    Ok(ConvergenceReport {
        ns,
        errors,
        norms,
        sup_f,
        bound_ratio,
        monotone,
        tail_ratio,
        pass,
    })
}

// ── identities ────────────────────────────────────────────────────────

/// `‖(fg)(A) − f(A)g(A)‖ / (‖f(A)‖·‖g(A)‖ + 1e−300)`, each factor computed
/// to absolute tolerance `tol / 100`.
pub fn multiplicativity_check(f: &HoloFunction, g: &HoloFunction, a: &ComplexMatrix, domain: &CalculusDomain, tol: f64) -> Result<f64> {
    let qtol = tol / 100.0;
    let fa = fc(f, a, domain, qtol)?.value.into_inner();
    let ga = fc(g, a, domain, qtol)?.value.into_inner();
    let fga = fc(&f.product(g), a, domain, qtol)?.value.into_inner();
    let defect = spectral_norm(&(fga - &fa * &ga));
    Ok(defect / (spectral_norm(&fa) * spectral_norm(&ga) + 1e-300))
}

/// Outcome of [`resolvent_shift_identity_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ShiftIdentityReport {
    /// `(1/2πi)∫_Γ f R(·, A)`.
    pub lhs: ComplexMatrix,
    /// `f(A + η)` over the same contour.
    pub shifted: ComplexMatrix,
    /// `(1/2πi)∫_Γ f R(·, A+η) R(·, A)`.
    pub cross_term: ComplexMatrix,
    /// `‖lhs − (shifted − η·cross_term)‖`.
    pub defect: f64,
    pub pass: bool,
}

/// Three-integral identity over a K-region contour:
/// `∫ f R(·,A) = ∫ f R(·,A+η) − η ∫ f R(·,A+η) R(·,A)` (each divided by
/// `2πi`), the integrated form of `R(λ,A) − R(λ,A+η) = −η R(λ,A+η)R(λ,A)`.
pub fn resolvent_shift_identity_check(f: &HoloFunction, a: &ComplexMatrix, eta: f64, domain: &CalculusDomain, tol: f64) -> Result<ShiftIdentityReport> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameters(format!("eta must be non-negative, got {eta}")));
    }
    let opts = QuadratureOptions::new(tol / 100.0);
    let contour = domain.contour()?;
    check_function(f, &contour)?;
    let kernel = SchurResolvent::new(a);
    let spectrum = kernel.eigenvalues();
    check_spectrum(&spectrum, domain, &contour, opts.tol)?;
    let shifted_spectrum: Vec<Complex64> = spectrum.iter().map(|l| l + eta).collect();
    check_spectrum(&shifted_spectrum, domain, &contour, opts.tol)?;
    let dim = a.dim();

    let lhs = cauchy_integral(&contour, dim, |l| Ok(kernel.at(l, 0.0)? * checked_eval(f, l)?), &opts)?;
    let lhs = require_converged(into_original(&kernel, lhs)?, "shift identity, left integral")?;
    let shifted = cauchy_integral(&contour, dim, |l| Ok(kernel.at(l, eta)? * checked_eval(f, l)?), &opts)?;
    let shifted = require_converged(into_original(&kernel, shifted)?, "shift identity, shifted integral")?;
    let cross = cauchy_integral(
        &contour,
        dim,
        |l| Ok(kernel.at(l, eta)? * kernel.at(l, 0.0)? * checked_eval(f, l)?),
        &opts,
    )?;
    let cross = require_converged(into_original(&kernel, cross)?, "shift identity, cross integral")?;

    let rhs = shifted.value.as_matrix() - cross.value.as_matrix() * Complex64::new(eta, 0.0);
    let defect = spectral_norm(&(lhs.value.as_matrix() - rhs));
    Ok(ShiftIdentityReport {
        lhs: lhs.value,
        shifted: shifted.value,
        cross_term: cross.value,
        defect,
        pass: defect <= tol,
    })
}

// ── test catalog and probe ────────────────────────────────────────────

fn region_scale(region: &Region) -> (Complex64, f64) {
    match *region {
        Region::Sector { .. } => (ZERO, 6.0),
        Region::ShiftedSector { a, .. } => (Complex64::new(a, 0.0), 6.0),
        Region::HalfPlane { alpha } => (Complex64::new(alpha, 0.0), 6.0),
        Region::Strip { beta } => (ZERO, 4.0 + 2.0 * beta),
        Region::KRegion { a, r, .. } => (Complex64::new(0.5 * (a + r), 0.0), 6.0 + (a - r).abs()),
    }
}

/// Random point outside `region` at distance at least `margin` from its
/// boundary.
pub fn exterior_point<R: rand::Rng + ?Sized>(region: &Region, rng: &mut R, margin: f64) -> Result<Complex64> {
    let contour = boundary_contour(region, CONTOUR_RADIUS)?;
    let (centre, scale) = region_scale(region);
    for _ in 0..100_000 {
        let z = centre + Complex64::new(uniform(rng, -scale, scale), uniform(rng, -scale, scale));
        if !region.contains(z) && contour.distance(z) >= margin {
            return Ok(z);
        }
    }
    Err(Error::InvalidRegion(format!(
        "no exterior points of {region:?} found at distance {margin} from the boundary"
    )))
}

/// Random point anywhere in the sampling box of `region`.
fn box_point<R: rand::Rng + ?Sized>(region: &Region, rng: &mut R) -> Complex64 {
    let (centre, scale) = region_scale(region);
    centre + Complex64::new(uniform(rng, -scale, scale), uniform(rng, -scale, scale))
}

/// `count` decaying rational functions holomorphic on a neighbourhood of
/// `region`: resolvent kernels `(μ−z)^{−k}`, Möbius products and random
/// pole placements, all poles at distance ≥ `margin` outside the region.
pub fn rational_catalog(region: &Region, count: usize, seed: u64, margin: f64) -> Result<Vec<HoloFunction>> {
    let mut rng = seeded(seed);
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let f = match i % 5 {
            0 => HoloFunction::resolvent_kernel(exterior_point(region, &mut rng, margin)?),
            1 => HoloFunction::resolvent_power(exterior_point(region, &mut rng, margin)?, 2),
            2 => HoloFunction::resolvent_power(exterior_point(region, &mut rng, margin)?, 3),
            3 => {
                let zero = box_point(region, &mut rng);
                let p1 = exterior_point(region, &mut rng, margin)?;
                let p2 = exterior_point(region, &mut rng, margin)?;
                HoloFunction::rational(Rational::from_roots(one, &[zero], &[p1, p2]))
            }
            _ => {
                let zeros = [box_point(region, &mut rng)];
                let poles: Vec<Complex64> = (0..3)
                    .map(|_| exterior_point(region, &mut rng, margin))
                    .collect::<Result<_>>()?;
                let gain = Complex64::from_polar(1.0, uniform(&mut rng, -PI, PI));
                HoloFunction::rational(Rational::from_roots(gain, &zeros, &poles))
            }
        };
        out.push(f);
    }
    Ok(out)
}

/// An integration domain strictly inside `region` whose contour separates
/// the spectrum from the boundary of `region`.
pub fn admissible_domain(region: &Region, spectrum: &[Complex64]) -> Result<CalculusDomain> {
    region.validate()?;
    for &l in spectrum {
        if !region.contains(l) {
            return Err(Error::SpectrumOutsideRegion { re: l.re, im: l.im });
        }
    }
    let max_arg = |v: f64| spectrum.iter().map(|l| (l - v).arg().abs()).fold(0.0f64, f64::max);
    Ok(match *region {
        Region::Sector { sigma } => CalculusDomain::Sector {
            eta: 0.5 * (max_arg(0.0) + sigma),
        },
        Region::ShiftedSector { a, sigma } => CalculusDomain::ShiftedSector {
            a,
            sigma: 0.5 * (max_arg(a) + sigma),
        },
        Region::HalfPlane { alpha } => {
            let m = spectrum.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
            CalculusDomain::HalfPlane { eta: -0.5 * (alpha + m) }
        }
        Region::Strip { beta } => {
            let w = spectrum.iter().map(|l| l.re.abs()).fold(0.0f64, f64::max);
            CalculusDomain::Strip { sigma: 0.5 * (w + beta) }
        }
        Region::KRegion { sigma, a, r } => {
            let outer = boundary_contour(region, CONTOUR_RADIUS)?;
            let gap = spectrum.iter().map(|&l| outer.distance(l)).fold(f64::INFINITY, f64::min);
            let mut best: Option<(f64, CalculusDomain)> = None;
            for k in 1..=40 {
                let step = 0.5f64.powi(k);
                let cand = Region::KRegion {
                    sigma: sigma - (sigma - FRAC_PI_2) * step,
                    a,
                    r: r + gap * step,
                };
                let inner = boundary_contour(&cand, CONTOUR_RADIUS)?;
                if spectrum.iter().all(|&l| cand.contains(l)) {
                    let m = spectrum.iter().map(|&l| inner.distance(l)).fold(f64::INFINITY, f64::min);
                    let sep = inner_separation(&inner, &outer);
                    let score = m.min(sep);
                    if best.is_none_or(|(s, _)| score > s) {
                        best = Some((score, CalculusDomain::from_region(&cand)));
                    }
                }
            }
            best.map(|(_, d)| d)
                .ok_or_else(|| Error::InvalidRegion(format!("no admissible inner contour for {region:?}")))?
        }
    })
}

/// Smallest sampled distance from points of `inner` to `outer` within a
/// moderate radius.
fn inner_separation(inner: &Contour, outer: &Contour) -> f64 {
    inner
        .sample_with_inward_normals(32, 50.0)
        .iter()
        .map(|(z, _)| outer.distance(*z))
        .fold(f64::INFINITY, f64::min)
}

/// Outcome of [`calculus_bound_probe`].
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub domain: CalculusDomain,
    /// `‖f(A)‖ / sup_region |f|` per catalog function.
    pub ratios: Vec<f64>,
    pub ratio_max: f64,
    pub worst_function: String,
}

/// Test-family specification for [`calculus_bound_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeFamily {
    pub count: usize,
    pub seed: u64,
    /// Minimum pole distance from the region boundary.
    pub margin: f64,
}

impl Default for ProbeFamily {
    fn default() -> Self {
        Self {
            count: 20,
            seed: 0,
            margin: 0.25,
        }
    }
}

/// Empirical lower bound for the `H∞(region)` calculus constant of `A`:
/// `max ‖f(A)‖ / sup |f|` over a rational catalog.
///
/// The supremum is the grid estimate enlarged by `|f|` at the eigenvalues,
/// so normal matrices always give ratios ≤ 1 up to quadrature error.
pub fn calculus_bound_probe(a: &ComplexMatrix, region: &Region, family: &ProbeFamily, tol: f64) -> Result<ProbeReport> {
    if family.count < 20 {
        return Err(Error::InvalidParameters(format!(
            "test family needs at least 20 functions, got {}",
            family.count
        )));
    }
    let kernel = SchurResolvent::new(a);
    let spectrum = kernel.eigenvalues();
    let domain = admissible_domain(region, &spectrum)?;
    let catalog = rational_catalog(region, family.count, family.seed, family.margin)?;
    let grid = GridSpec::default();
    let mut ratios = Vec::with_capacity(catalog.len());
    let (mut ratio_max, mut worst) = (0.0f64, String::new());
    for f in &catalog {
        let mut sup = sup_norm_estimate(f, region, &grid)?.value;
        for &l in &spectrum {
            sup = sup.max(f.eval(l).norm());
        }
        let fa = fc(f, a, &domain, tol)?;
        let ratio = spectral_norm(fa.value.as_matrix()) / sup;
        if ratio > ratio_max {
            ratio_max = ratio;
            worst = f.name().to_string();
        }
        ratios.push(ratio);
    }
    Ok(ProbeReport {
        domain,
        ratios,
        ratio_max,
        worst_function: worst,
    })
}

/// Outcome of [`folklore_check`].
#[derive(Clone, Debug, Serialize)]
pub struct FolkloreReport {
    pub constants: FolkloreConstants,
    #[serde(rename = "C_theoretical")]
    pub c_theoretical: f64,
    /// `sup_{HP_{−η}} |z f'(z)| / sup_K |f|` per test function.
    pub ratios: Vec<f64>,
    pub worst_ratio_observed: f64,
    pub pass: bool,
}

/// Samples `‖f‖_{H∞₁(HP_{−η})} / ‖f‖_{H∞(K)}` with `K = K_{σ,a,−η−ε}`
/// over `count` rational functions with poles outside `K`, against the
/// constant `C` of [`folklore_constants`].
pub fn folklore_check(eta: f64, epsilon: f64, a: f64, sigma: f64, sigma_prime: f64, count: usize, seed: u64) -> Result<FolkloreReport> {
    let constants = folklore_constants(eta, epsilon, a, sigma, sigma_prime)?;
    let k = Region::KRegion { sigma, a, r: -eta - epsilon };
    let hp = Region::HalfPlane { alpha: -eta };
    let catalog = rational_catalog(&k, count, seed, 0.25)?;
    let grid = GridSpec::default();
    let mut ratios = Vec::with_capacity(count);
    for f in &catalog {
        let top = hinf1_seminorm_estimate(f, &hp, &grid)?.value;
        let bottom = sup_norm_estimate(f, &k, &grid)?.value;
        ratios.push(if top == 0.0 { 0.0 } else { top / bottom });
    }
    let worst = ratios.iter().copied().fold(0.0f64, f64::max);
    Ok(FolkloreReport {
        constants,
        c_theoretical: constants.c,
        ratios,
        worst_ratio_observed: worst,
        pass: worst <= constants.c,
    })
}
