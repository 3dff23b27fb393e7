//! Complex domains (sectors, strips, half-planes, K-regions), their oriented
//! boundary contours, and sampled norm estimates of functions on them.

use crate::error::{Error, Result};
use crate::holo::HoloFunction;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Open complex domain. Angles in radians.
///
/// JSON: `{"kind": "sector", "sigma": ..}`, `{"kind": "shifted_sector", "a": .., "sigma": ..}`,
/// `{"kind": "half_plane", "alpha": ..}`, `{"kind": "strip", "beta": ..}`,
/// `{"kind": "k_region", "sigma": .., "a": .., "r": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields, try_from = "RegionDoc")]
pub enum Region {
    /// `{z ≠ 0 : |arg z| < σ}`
    Sector { sigma: f64 },
    /// `a + Sect_σ`
    ShiftedSector { a: f64, sigma: f64 },
    /// `{Re z > α}`
    HalfPlane { alpha: f64 },
    /// `{|Re z| < β}`
    Strip { beta: f64 },
    /// `(a + Sect_σ) ∪ {Re z > r}` with `π/2 < σ < π`
    KRegion { sigma: f64, a: f64, r: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RegionDoc {
    Sector { sigma: f64 },
    ShiftedSector { a: f64, sigma: f64 },
    HalfPlane { alpha: f64 },
    Strip { beta: f64 },
    KRegion { sigma: f64, a: f64, r: f64 },
}

impl TryFrom<RegionDoc> for Region {
    type Error = Error;
    fn try_from(d: RegionDoc) -> Result<Region> {
        let r = match d {
            RegionDoc::Sector { sigma } => Region::Sector { sigma },
            RegionDoc::ShiftedSector { a, sigma } => Region::ShiftedSector { a, sigma },
            RegionDoc::HalfPlane { alpha } => Region::HalfPlane { alpha },
            RegionDoc::Strip { beta } => Region::Strip { beta },
            RegionDoc::KRegion { sigma, a, r } => Region::KRegion { sigma, a, r },
        };
        r.validate()?;
        Ok(r)
    }
}

fn in_open_sector(w: Complex64, sigma: f64) -> bool {
    w.norm() > 0.0 && w.arg().abs() < sigma
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Region::Sector { sigma } | Region::ShiftedSector { sigma, .. } if !(sigma > 0.0 && sigma < PI) => {
                Err(Error::InvalidRegion(format!("sector angle {sigma} not in (0, π)")))
            }
            Region::ShiftedSector { a, .. } if !a.is_finite() => Err(Error::InvalidRegion("`a` must be finite".into())),
            Region::HalfPlane { alpha } if !alpha.is_finite() => {
                Err(Error::InvalidRegion("`alpha` must be finite".into()))
            }
            Region::Strip { beta } if !(beta > 0.0 && beta.is_finite()) => {
                Err(Error::InvalidRegion(format!("strip half-width {beta} must be positive")))
            }
            Region::KRegion { sigma, a, r } => {
                if !finite(&[sigma, a, r]) {
                    Err(Error::InvalidRegion("K-region parameters must be finite".into()))
                } else if !(sigma > FRAC_PI_2 && sigma < PI) {
                    Err(Error::InvalidRegion(format!("K-region angle {sigma} not in (π/2, π)")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Membership in the open region.
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Sector { sigma } => in_open_sector(z, sigma),
            Region::ShiftedSector { a, sigma } => in_open_sector(z - a, sigma),
            Region::HalfPlane { alpha } => z.re > alpha,
            Region::Strip { beta } => z.re.abs() < beta,
            Region::KRegion { sigma, a, r } => in_open_sector(z - a, sigma) || z.re > r,
        }
    }
}

pub fn contains(region: &Region, z: Complex64) -> bool {
    region.contains(z)
}

// ── contours ──────────────────────────────────────────────────────────

/// One piece of a boundary path. Parameters run from `*_start` to `*_end`;
/// either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    /// `vertex + t·e^{iθ}`
    Ray { vertex: Complex64, angle: f64, t_start: f64, t_end: f64 },
    /// `x + i·y`
    Vertical { x: f64, y_start: f64, y_end: f64 },
}

impl Segment {
    pub fn point(&self, u: f64) -> Complex64 {
        match *self {
            Segment::Ray { vertex, angle, .. } => vertex + Complex64::from_polar(u, angle),
            Segment::Vertical { x, .. } => Complex64::new(x, u),
        }
    }

    /// `dz/du` for the parameter `u` (direction of increasing `u`).
    pub fn tangent(&self) -> Complex64 {
        match *self {
            Segment::Ray { angle, .. } => Complex64::from_polar(1.0, angle),
            Segment::Vertical { .. } => Complex64::new(0.0, 1.0),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match *self {
            Segment::Ray { t_start, t_end, .. } => (t_start, t_end),
            Segment::Vertical { y_start, y_end, .. } => (y_start, y_end),
        }
    }

    /// Unit direction of traversal.
    pub fn direction(&self) -> Complex64 {
        let (a, b) = self.range();
        if b >= a {
            self.tangent()
        } else {
            -self.tangent()
        }
    }

    fn reversed(&self) -> Segment {
        match *self {
            Segment::Ray { vertex, angle, t_start, t_end } => Segment::Ray {
                vertex,
                angle,
                t_start: t_end,
                t_end: t_start,
            },
            Segment::Vertical { x, y_start, y_end } => Segment::Vertical {
                x,
                y_start: y_end,
                y_end: y_start,
            },
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        let (a, b) = self.range();
        let (lo, hi) = (a.min(b), a.max(b));
        let u = match *self {
            Segment::Ray { vertex, angle, .. } => ((z - vertex) * Complex64::from_polar(1.0, -angle)).re,
            Segment::Vertical { .. } => z.im,
        };
        (z - self.point(u.clamp(lo, hi))).norm()
    }
}

/// Which side of the listed path the region lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    RegionLeft,
    RegionRight,
}

/// Oriented boundary of a [`Region`].
///
/// Segments are listed in the conventional traversal of each family
/// (half-plane lines upward, sector rays lower-incoming then
/// upper-outgoing); `orientation` records on which side of that listing the
/// region lies. The positively oriented boundary, with the region on the
/// left, is the listing traversed with [`Contour::sign`].
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub segments: Vec<Segment>,
    pub orientation: Orientation,
    /// Set when a K-region's half-plane is absorbed by its sector.
    pub degenerate: bool,
    pub truncation_radius: f64,
}

impl Contour {
    /// `+1` if the listing already has the region on its left, else `−1`.
    pub fn sign(&self) -> f64 {
        match self.orientation {
            Orientation::RegionLeft => 1.0,
            Orientation::RegionRight => -1.0,
        }
    }

    /// The same path with the region on the left of the listed traversal.
    pub fn positively_oriented(&self) -> Vec<Segment> {
        match self.orientation {
            Orientation::RegionLeft => self.segments.clone(),
            Orientation::RegionRight => self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.segments.iter().map(|s| s.distance(z)).fold(f64::INFINITY, f64::min)
    }

    /// Points at interior parameters of every segment (within `radius`),
    /// each paired with the unit normal pointing into the region.
    pub fn sample_with_inward_normals(&self, per_segment: usize, radius: f64) -> Vec<(Complex64, Complex64)> {
        let mut out = Vec::new();
        for seg in self.positively_oriented() {
            let (a, b) = seg.range();
            let (a, b) = (clamp_param(&seg, a, radius), clamp_param(&seg, b, radius));
            let normal = Complex64::new(0.0, 1.0) * seg.direction();
            for k in 1..=per_segment {
                let u = a + (b - a) * k as f64 / (per_segment + 1) as f64;
                out.push((seg.point(u), normal));
            }
        }
        out
    }

    /// Winding number around `p` of the positively oriented path, truncated
    /// to the disk of radius `radius` and closed by counterclockwise arcs
    /// along the circle.
    pub fn winding_number(&self, p: Complex64, radius: f64) -> f64 {
        let segs = self.positively_oriented();
        let mut pieces: Vec<Vec<Complex64>> = Vec::new();
        for seg in &segs {
            let (a, b) = seg.range();
            let (a, b) = (clamp_param(seg, a, radius), clamp_param(seg, b, radius));
            let n = 4000;
            pieces.push((0..=n).map(|k| seg.point(a + (b - a) * k as f64 / n as f64)).collect());
        }
        let mut path: Vec<Complex64> = Vec::new();
        for i in 0..pieces.len() {
            path.extend_from_slice(&pieces[i]);
            let end = *pieces[i].last().unwrap();
            let next = pieces[(i + 1) % pieces.len()][0];
            let on_circle = |z: Complex64| (z.norm() - radius).abs() <= 1e-9 * radius;
            if (end - next).norm() > 1e-12 * radius.max(1.0) && on_circle(end) && on_circle(next) {
                let (t0, mut t1) = (end.arg(), next.arg());
                while t1 <= t0 {
                    t1 += 2.0 * PI;
                }
                let n = 4000;
                for k in 1..n {
                    path.push(Complex64::from_polar(radius, t0 + (t1 - t0) * k as f64 / n as f64));
                }
            }
        }
        let mut total = 0.0;
        for k in 0..path.len() {
            let a = path[k] - p;
            let b = path[(k + 1) % path.len()] - p;
            total += (b / a).arg();
        }
        total / (2.0 * PI)
    }
}

/// Largest parameter (in absolute value) keeping `|point| ≤ radius`.
fn clamp_param(seg: &Segment, u: f64, radius: f64) -> f64 {
    if u.is_finite() && seg.point(u).norm() <= radius {
        return u;
    }
    // bisect between the point nearest the origin and `u`
    let (a, b) = seg.range();
    let (lo_u, hi_u) = (a.min(b), a.max(b));
    let nearest = match *seg {
        Segment::Ray { vertex, angle, .. } => (-vertex * Complex64::from_polar(1.0, -angle)).re,
        Segment::Vertical { .. } => 0.0,
    }
    .clamp(lo_u, hi_u);
    let mut lo = nearest;
    let mut hi = if u.is_finite() {
        u
    } else {
        nearest + u.signum() * (4.0 * radius + nearest.abs())
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if seg.point(mid).norm() <= radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn sector_contour(vertex: f64, sigma: f64) -> Vec<Segment> {
    let v = Complex64::new(vertex, 0.0);
    vec![
        Segment::Ray { vertex: v, angle: -sigma, t_start: f64::INFINITY, t_end: 0.0 },
        Segment::Ray { vertex: v, angle: sigma, t_start: 0.0, t_end: f64::INFINITY },
    ]
}

/// Oriented boundary of `region`.
///
/// For a K-region with `r < a` the path is: lower ray from infinity into
/// the line `x = r` → vertical segment across the line → upper ray out to
/// infinity, the rays meeting the line at `t* = (r − a)/cos σ`.
/// With `r ≥ a` the half-plane lies inside the shifted sector and the
/// shifted-sector boundary is returned with `degenerate` set.
pub fn boundary_contour(region: &Region, truncation_radius: f64) -> Result<Contour> {
    if !(truncation_radius > 0.0) {
        return Err(Error::InvalidParameters("truncation radius must be positive".into()));
    }
    if let Region::KRegion { sigma, .. } = *region {
        if sigma <= FRAC_PI_2 {
            return Err(Error::DegenerateRegion(format!(
                "K-region angle {sigma} ≤ π/2: the rays never meet the vertical line"
            )));
        }
    }
    region.validate()?;
    let contour = |segments, orientation, degenerate| Contour {
        segments,
        orientation,
        degenerate,
        truncation_radius,
    };
    Ok(match *region {
        Region::Sector { sigma } => contour(sector_contour(0.0, sigma), Orientation::RegionRight, false),
        Region::ShiftedSector { a, sigma } => contour(sector_contour(a, sigma), Orientation::RegionRight, false),
        Region::HalfPlane { alpha } => contour(
            vec![Segment::Vertical { x: alpha, y_start: f64::NEG_INFINITY, y_end: f64::INFINITY }],
            Orientation::RegionRight,
            false,
        ),
        Region::Strip { beta } => contour(
            vec![
                Segment::Vertical { x: beta, y_start: f64::NEG_INFINITY, y_end: f64::INFINITY },
                Segment::Vertical { x: -beta, y_start: f64::INFINITY, y_end: f64::NEG_INFINITY },
            ],
            Orientation::RegionLeft,
            false,
        ),
        Region::KRegion { sigma, a, r } => {
            if r >= a {
                contour(sector_contour(a, sigma), Orientation::RegionRight, true)
            } else {
                let t_star = k_intersection(sigma, a, r);
                let y_star = t_star * sigma.sin();
                let hit = Complex64::new(r, y_star).norm();
                if hit > truncation_radius {
                    return Err(Error::InvalidParameters(format!(
                        "truncation radius {truncation_radius} does not contain the corner points (|z| = {hit})"
                    )));
                }
                let v = Complex64::new(a, 0.0);
                contour(
                    vec![
                        Segment::Ray { vertex: v, angle: -sigma, t_start: f64::INFINITY, t_end: t_star },
                        Segment::Vertical { x: r, y_start: -y_star, y_end: y_star },
                        Segment::Ray { vertex: v, angle: sigma, t_start: t_star, t_end: f64::INFINITY },
                    ],
                    Orientation::RegionRight,
                    false,
                )
            }
        }
    })
}

/// Ray parameter at which `a + t·e^{±iσ}` meets `Re z = r`.
pub fn k_intersection(sigma: f64, a: f64, r: f64) -> f64 {
    (r - a) / sigma.cos()
}

// ── Lemma constants ───────────────────────────────────────────────────

/// Constants of the Cauchy-estimate argument bounding `‖zf'‖` on a
/// half-plane by `sup|f|` on a K-region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolkloreConstants {
    pub zone_radius: f64,
    /// Bound for `|z|` over the bounded zone.
    pub m: f64,
    pub delta: f64,
    pub c: f64,
}

/// `zone_radius = max{2a, (η+a)/|cos σ'|}`, `M = |a| + zone_radius`,
/// `δ = sin(σ−σ')/2`, `C = max{4M/ε, 6/δ}`.
pub fn folklore_constants(eta: f64, epsilon: f64, a: f64, sigma: f64, sigma_prime: f64) -> Result<FolkloreConstants> {
    if !(FRAC_PI_2 < sigma_prime && sigma_prime < sigma && sigma < PI) {
        return Err(Error::InvalidAngles(format!(
            "need π/2 < σ' < σ < π, got σ' = {sigma_prime}, σ = {sigma}"
        )));
    }
    if !(eta > 0.0 && epsilon > 0.0) {
        return Err(Error::InvalidParameters("η and ε must be positive".into()));
    }
    if a <= -eta {
        return Err(Error::InvalidParameters(format!(
            "a = {a} ≤ −η: the K-region reduces to the shifted sector"
        )));
    }
    let zone_radius = (2.0 * a).max((eta + a) / sigma_prime.cos().abs());
    let m = a.abs() + zone_radius;
    let delta = 0.5 * (sigma - sigma_prime).sin();
    let c = (4.0 * m / epsilon).max(6.0 / delta);
    Ok(FolkloreConstants { zone_radius, m, delta, c })
}

// ── grid estimates ────────────────────────────────────────────────────

/// Sampling grid for sup-norm estimates: geometric in radius (or distance
/// to the boundary) from `r_min` to `radius` with ratio `ratio`, uniform in
/// angle or height with `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radius: f64,
    pub r_min: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            radius: 100.0,
            r_min: 1e-4,
            ratio: 1.1,
            count: 512,
        }
    }
}

impl GridSpec {
    fn geometric(&self, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut r = self.r_min;
        while r < hi {
            out.push(r);
            r *= self.ratio;
        }
        out.push(hi);
        out
    }

    fn heights(&self) -> Vec<f64> {
        let mut ys = vec![0.0];
        for r in self.geometric(self.radius) {
            ys.push(r);
            ys.push(-r);
        }
        let n = self.count.max(2);
        for k in 0..n {
            ys.push(-self.radius + 2.0 * self.radius * k as f64 / (n - 1) as f64);
        }
        ys
    }

    fn sector_points(&self, vertex: f64, sigma: f64, out: &mut Vec<Complex64>) {
        let n = self.count.max(1);
        let mut angles: Vec<f64> = (0..n).map(|k| -sigma + (k as f64 + 0.5) * 2.0 * sigma / n as f64).collect();
        for j in 2..=6 {
            let th = sigma * (1.0 - 10f64.powi(-j));
            angles.push(th);
            angles.push(-th);
        }
        for r in self.geometric(self.radius) {
            for &th in &angles {
                out.push(vertex + Complex64::from_polar(r, th));
            }
        }
    }

    /// Deterministic grid of points inside `region` with `|z − centre| ≤ radius`.
    pub fn points(&self, region: &Region) -> Vec<Complex64> {
        let mut out = Vec::new();
        match *region {
            Region::Sector { sigma } => self.sector_points(0.0, sigma, &mut out),
            Region::ShiftedSector { a, sigma } => self.sector_points(a, sigma, &mut out),
            Region::HalfPlane { alpha } => {
                let hs = self.heights();
                for d in self.geometric(self.radius) {
                    for &y in &hs {
                        out.push(Complex64::new(alpha + d, y));
                    }
                }
            }
            Region::Strip { beta } => {
                let hs = self.heights();
                let n = self.count.max(1);
                let mut xs: Vec<f64> = (0..n).map(|k| -beta + (k as f64 + 0.5) * 2.0 * beta / n as f64).collect();
                for d in self.geometric(beta) {
                    if d < beta {
                        xs.push(beta - d);
                        xs.push(-beta + d);
                    }
                }
                for &x in &xs {
                    for &y in &hs {
                        out.push(Complex64::new(x, y));
                    }
                }
            }
            Region::KRegion { sigma, a, r } => {
                self.sector_points(a, sigma, &mut out);
                if r < a {
                    let hs = self.heights();
                    for d in self.geometric(self.radius) {
                        for &y in &hs {
                            out.push(Complex64::new(r + d, y));
                        }
                    }
                }
            }
        }
        out.retain(|&z| region.contains(z));
        out
    }
}

/// Result of a sampled maximization over a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEstimate {
    /// Largest sampled value; a lower bound for the true supremum.
    pub value: f64,
    pub argmax: [f64; 2],
    /// False when the maximum over the outer decade of the grid exceeds the
    /// inner maximum, i.e. the estimate still grows with the grid radius.
    pub stable: bool,
}

fn grid_max<F: Fn(Complex64) -> Complex64>(points: &[Complex64], radius: f64, centre: f64, g: F) -> Result<GridEstimate> {
    let mut best = (0.0, Complex64::new(0.0, 0.0));
    let mut inner: f64 = 0.0;
    for &z in points {
        let v = g(z).norm();
        if !v.is_finite() {
            return Err(Error::EvaluationFailure { re: z.re, im: z.im });
        }
        if v > best.0 {
            best = (v, z);
        }
        if (z - centre).norm() <= 0.1 * radius {
            inner = inner.max(v);
        }
    }
    Ok(GridEstimate {
        value: best.0,
        argmax: [best.1.re, best.1.im],
        stable: best.0 <= inner * (1.0 + 1e-3) + 1e-12,
    })
}

fn centre(region: &Region) -> f64 {
    match *region {
        Region::ShiftedSector { a, .. } | Region::KRegion { a, .. } => a,
        Region::HalfPlane { alpha } => alpha,
        _ => 0.0,
    }
}

/// Lower estimate of `‖f‖_{H∞(region)}` by grid maximization of `|f|`.
pub fn sup_norm_estimate(f: &HoloFunction, region: &Region, grid: &GridSpec) -> Result<GridEstimate> {
    region.validate()?;
    grid_max(&grid.points(region), grid.radius, centre(region), |z| f.eval(z))
}

/// Lower estimate of `sup |z f'(z)|` over the region.
pub fn hinf1_seminorm_estimate(f: &HoloFunction, region: &Region, grid: &GridSpec) -> Result<GridEstimate> {
    region.validate()?;
    grid_max(&grid.points(region), grid.radius, centre(region), |z| z * f.derivative(z))
}
