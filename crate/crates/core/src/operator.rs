//! Dense complex matrices as the finite-dimensional operator model:
//! resolvents, exponentials, spectra, singular values and growth bounds of
//! matrix semigroups `T(t) = exp(-tA)`.
//!
//! Operator norms in this module are spectral norms.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::Deref;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(CMat);

impl ComplexMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameters("matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    /// Builds a matrix from real rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMat::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::new(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("rows must all have length dim".into()));
        }
        Self::new(CMat::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        Self(CMat::from_diagonal(&CVec::from_column_slice(values)))
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&v)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMat::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMat::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    /// `self + shift·I`.
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += shift;
        }
        Self(m)
    }
}

impl Deref for ComplexMatrix {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.0
    }
}

/// Wire format `{"dim": n, "data": [[re, im], ...]}`, row-major.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    dim: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.0[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixDoc { dim: n, data }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = MatrixDoc::deserialize(d)?;
        if doc.data.len() != doc.dim * doc.dim {
            return Err(D::Error::custom(format!(
                "field `data`: expected {} entries for dim {}, found {}",
                doc.dim * doc.dim,
                doc.dim,
                doc.data.len()
            )));
        }
        let m = CMat::from_fn(doc.dim, doc.dim, |i, j| {
            let [re, im] = doc.data[i * doc.dim + j];
            Complex64::new(re, im)
        });
        ComplexMatrix::new(m).map_err(|e| D::Error::custom(format!("field `data`: {e}")))
    }
}

// ── norms and spectra ────────────────────────────────────────────────

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest singular value, i.e. the best constant `c` in `‖Tx‖₂ ≥ c‖x‖₂`.
pub fn smallest_singular_value(t: &ComplexMatrix) -> f64 {
    t.singular_values().min().max(0.0)
}

pub fn condition_number(m: &CMat) -> f64 {
    let s = m.singular_values();
    let lo = s.min();
    if lo == 0.0 {
        f64::INFINITY
    } else {
        s.max() / lo
    }
}

/// Eigenvalues from the complex Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Vec<Complex64> {
    let schur = Schur::new(a.as_matrix().clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// `‖AA* − A*A‖ ≤ 1e−12‖A‖²`.
pub fn is_normal(a: &ComplexMatrix) -> bool {
    let m = a.as_matrix();
    let adj = m.adjoint();
    let comm = m * &adj - &adj * m;
    let n = spectral_norm(m);
    spectral_norm(&comm) <= 1e-12 * n * n
}

/// Eigendecomposition `A = V diag(λ) V⁻¹` computed from the Schur form.
///
/// Used as the reference route for matrix functions of diagonalizable
/// matrices. For defective or nearly defective input the eigenvector
/// matrix is ill-conditioned; `condition()` reports it.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
    pub inverse: CMat,
}

impl EigenDecomposition {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        let (q, t) = Schur::new(a.as_matrix().clone()).unpack();
        let scale = spectral_norm(&t).max(f64::MIN_POSITIVE);
        let mut vt = CMat::zeros(n, n);
        for k in 0..n {
            vt[(k, k)] = ONE;
            for i in (0..k).rev() {
                let mut acc = ZERO;
                for j in (i + 1)..=k {
                    acc += t[(i, j)] * vt[(j, k)];
                }
                let mut denom = t[(i, i)] - t[(k, k)];
                if denom.norm() < f64::EPSILON * scale {
                    denom = Complex64::new(f64::EPSILON * scale, 0.0);
                }
                vt[(i, k)] = -acc / denom;
            }
            let nrm = vt.column(k).norm();
            vt.column_mut(k).unscale_mut(nrm);
        }
        let vectors = q * vt;
        let inverse = vectors.clone().try_inverse().ok_or_else(|| {
            Error::InvalidParameters("matrix is defective; eigenvectors are not a basis".into())
        })?;
        let values = (0..n).map(|i| t[(i, i)]).collect();
        Ok(Self { values, vectors, inverse })
    }

    pub fn condition(&self) -> f64 {
        condition_number(&self.vectors)
    }

    /// `V f(Λ) V⁻¹`.
    pub fn apply<F: Fn(Complex64) -> Complex64>(&self, f: F) -> CMat {
        let fl: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let d = CMat::from_diagonal(&CVec::from_vec(fl));
        &self.vectors * d * &self.inverse
    }
}

// ── resolvent ─────────────────────────────────────────────────────────

/// Reciprocal condition number below which `λ − A` is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;

/// `R(λ, A) = (λ − A)⁻¹` on a raw matrix; shared by the quadrature loops.
pub(crate) fn resolvent_raw(a: &CMat, lambda: Complex64) -> Result<CMat> {
    let n = a.nrows();
    let mut m = -a.clone();
    for i in 0..n {
        m[(i, i)] += lambda;
    }
    let singular = || Error::SingularResolvent {
        re: lambda.re,
        im: lambda.im,
        rcond: 0.0,
    };
    let inv = m.clone().lu().try_inverse().ok_or_else(singular)?;
    let rcond = 1.0 / (one_norm(&m) * one_norm(&inv));
    if !rcond.is_finite() || rcond < SINGULAR_RCOND {
        return Err(Error::SingularResolvent {
            re: lambda.re,
            im: lambda.im,
            rcond: if rcond.is_finite() { rcond } else { 0.0 },
        });
    }
    Ok(inv)
}

/// `R(λ, A) = (λI − A)⁻¹` via pivoted LU.
pub fn resolvent(a: &ComplexMatrix, lambda: Complex64) -> Result<ComplexMatrix> {
    resolvent_raw(a.as_matrix(), lambda).map(ComplexMatrix)
}

// ── matrix exponential ────────────────────────────────────────────────

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(tA)` by scaling and squaring with the [13/13] Padé approximant.
pub fn matrix_exp(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParameters("time must be finite".into()));
    }
    let n = a.dim();
    let m: CMat = a.as_matrix() * Complex64::new(t, 0.0);
    let norm = one_norm(&m);
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(Error::Overflow(format!("‖tA‖₁ = {norm:e}")));
    }
    let m = m.unscale(2f64.powi(s));
    let b = |k: usize| Complex64::new(PADE_13[k], 0.0);
    let id = CMat::identity(n, n);
    let a2 = &m * &m;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &m * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .ok_or_else(|| Error::Overflow("Padé denominator is singular".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Overflow(format!("‖tA‖₁ = {norm:e}")));
    }
    Ok(ComplexMatrix(r))
}

/// `T(t) = exp(−tA)`.
pub fn semigroup_at(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    matrix_exp(a, -t)
}

// ── growth bounds ─────────────────────────────────────────────────────

/// Constants of a fitted bound `‖T(t)‖ ≤ M e^{ωt}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub m: f64,
    pub omega: f64,
}

/// A matrix semigroup `T(t) = exp(−tA)` together with a fitted growth bound.
#[derive(Clone, Debug)]
pub struct SemigroupModel {
    pub generator_negative: ComplexMatrix,
    pub fit: GrowthFit,
    pub grid: Vec<f64>,
}

impl SemigroupModel {
    pub fn fit(a: ComplexMatrix, t_grid: &[f64]) -> Result<Self> {
        let fit = growth_bound_fit(&a, t_grid)?;
        Ok(Self {
            generator_negative: a,
            fit,
            grid: t_grid.to_vec(),
        })
    }

    pub fn at(&self, t: f64) -> Result<ComplexMatrix> {
        semigroup_at(&self.generator_negative, t)
    }
}

/// Fits `‖T(t)‖ ≤ M e^{ωt}` on a time grid.
///
/// `ω` is the slope of the last edge of the upper concave envelope of the
/// points `(t, log‖T(t)‖)`, i.e. the growth rate the grid exhibits at its
/// far end. `M = max ‖T(t)‖e^{−ωt}` clamped to at least 1, so the bound
/// holds at every grid point by construction.
pub fn growth_bound_fit(a: &ComplexMatrix, t_grid: &[f64]) -> Result<GrowthFit> {
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameters("time grid must be nonempty and nonnegative".into()));
    }
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let nrm = spectral_norm(semigroup_at(a, t)?.as_matrix());
        pts.push((t, nrm.max(f64::MIN_POSITIVE).ln()));
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    pts.dedup_by(|x, y| x.0 == y.0);

    let omega = if pts.len() == 1 {
        let (t, l) = pts[0];
        if t > 0.0 {
            l / t
        } else {
            0.0
        }
    } else {
        let hull = upper_hull(&pts);
        let (t0, l0) = hull[hull.len() - 2];
        let (t1, l1) = hull[hull.len() - 1];
        (l1 - l0) / (t1 - t0)
    };
    let m = pts
        .iter()
        .map(|&(t, l)| (l - omega * t).exp())
        .fold(1.0, f64::max);
    Ok(GrowthFit { m, omega })
}

/// Upper concave hull of points sorted by abscissa (monotone chain).
fn upper_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let (ax, ay) = hull[hull.len() - 2];
            let (bx, by) = hull[hull.len() - 1];
            // drop b when it lies on or below the chord a→p
            let cross = (bx - ax) * (p.1 - ay) - (by - ay) * (p.0 - ax);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Sampling pattern for [`sectoriality_constant`].
#[derive(Clone, Debug)]
pub struct SectorSampling {
    pub r_min: f64,
    pub r_max: f64,
    pub radii: usize,
    pub angles: usize,
}

impl Default for SectorSampling {
    fn default() -> Self {
        Self {
            r_min: 1e-4,
            r_max: 1e4,
            radii: 161,
            angles: 16,
        }
    }
}

/// Sampled lower estimate of `sup{‖λR(λ,A)‖ : λ ∉ closure(Sect_σ)}`.
///
/// λ runs over rays at angles `±σ'` for a ladder of `σ' ∈ (σ, π]`
/// (including the negative real axis), with geometric radii.
pub fn sectoriality_constant(a: &ComplexMatrix, sigma: f64, sampling: &SectorSampling) -> Result<f64> {
    if !(sigma > 0.0 && sigma < std::f64::consts::PI) {
        return Err(Error::InvalidAngles(format!("sector angle {sigma} not in (0, π)")));
    }
    for l in eigenvalues(a) {
        if l.norm() > 1e-14 && l.arg().abs() >= sigma {
            return Err(Error::SpectrumOutsideSector {
                re: l.re,
                im: l.im,
                angle: sigma,
            });
        }
    }
    let pi = std::f64::consts::PI;
    let mut angles = vec![sigma + 1e-3 * (pi - sigma)];
    for k in 1..=sampling.angles {
        angles.push(sigma + (pi - sigma) * k as f64 / sampling.angles as f64);
    }
    let ratio = (sampling.r_max / sampling.r_min).ln() / (sampling.radii.max(2) - 1) as f64;
    let mut best: f64 = 0.0;
    for &theta in &angles {
        for sign in [1.0, -1.0] {
            for k in 0..sampling.radii {
                let r = sampling.r_min * (ratio * k as f64).exp();
                let lambda = Complex64::from_polar(r, sign * theta);
                let res = resolvent_raw(a.as_matrix(), lambda)?;
                best = best.max(r * spectral_norm(&res));
            }
        }
    }
    Ok(best)
}
