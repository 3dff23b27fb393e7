//! Holomorphic function handles used as calculus integrands.

use crate::error::{Error, Result};
use crate::regions::Region;
use num_complex::Complex64;
use serde_json::Value;
use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A holomorphic function together with an optional analytic derivative and
/// the exponent `ε` of its decay `|f(z)| = O(|z|^{−ε})` at infinity.
///
/// `ε = 0` marks a merely bounded function; such functions must be
/// regularized before they can be fed to a contour integral.
#[derive(Clone)]
pub struct HoloFunction {
    name: String,
    eval: Eval,
    derivative: Option<Eval>,
    decay_exponent: f64,
    domain: Option<Region>,
}

impl fmt::Debug for HoloFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloFunction")
            .field("name", &self.name)
            .field("decay_exponent", &self.decay_exponent)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("domain", &self.domain)
            .finish()
    }
}

impl HoloFunction {
    pub fn new<F>(name: impl Into<String>, decay_exponent: f64, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            derivative: None,
            decay_exponent: decay_exponent.max(0.0),
            domain: None,
        }
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_domain(mut self, region: Region) -> Self {
        self.domain = Some(region);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decay_exponent(&self) -> f64 {
        self.decay_exponent
    }

    pub fn domain(&self) -> Option<&Region> {
        self.domain.as_ref()
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    /// Analytic derivative if provided, otherwise a central difference with
    /// step `h = 1e−6·(1+|z|)`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match &self.derivative {
            Some(d) => d(z),
            None => {
                let h = 1e-6 * (1.0 + z.norm());
                (self.eval(z + h) - self.eval(z - h)) / (2.0 * h)
            }
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("const({c})"), 0.0, move |_| c).with_derivative(|_| Complex64::new(0.0, 0.0))
    }

    /// `z ↦ (μ − z)^{−1}`.
    pub fn resolvent_kernel(mu: Complex64) -> Self {
        Self::new(format!("1/({mu}-z)"), 1.0, move |z| 1.0 / (mu - z))
            .with_derivative(move |z| {
                let w = mu - z;
                1.0 / (w * w)
            })
    }

    /// `z ↦ (μ − z)^{−k}`.
    pub fn resolvent_power(mu: Complex64, k: u32) -> Self {
        let kk = k as i32;
        Self::new(format!("({mu}-z)^-{k}"), k as f64, move |z| (mu - z).powi(-kk))
            .with_derivative(move |z| kk as f64 * (mu - z).powi(-kk - 1))
    }

    pub fn rational(r: Rational) -> Self {
        let decay = r.decay_order().max(0) as f64;
        let name = format!("rational(deg {}/{})", r.num.len().saturating_sub(1), r.den.len().saturating_sub(1));
        let rd = r.clone();
        Self::new(name, decay, move |z| r.eval(z)).with_derivative(move |z| rd.derivative(z))
    }

    /// Pointwise product; decay exponents add.
    pub fn product(&self, other: &HoloFunction) -> Self {
        let (f, g) = (self.clone(), other.clone());
        let mut out = Self::new(
            format!("({})*({})", self.name, other.name),
            self.decay_exponent + other.decay_exponent,
            move |z| f.eval(z) * g.eval(z),
        );
        if self.derivative.is_some() && other.derivative.is_some() {
            let (f, g) = (self.clone(), other.clone());
            out = out.with_derivative(move |z| f.derivative(z) * g.eval(z) + f.eval(z) * g.derivative(z));
        }
        out.domain = self.domain.or(other.domain);
        out
    }

    /// `z ↦ f(z + shift)`.
    pub fn translated(&self, shift: Complex64) -> Self {
        let f = self.clone();
        let mut out = Self::new(format!("({})(z+{shift})", self.name), self.decay_exponent, move |z| {
            f.eval(z + shift)
        });
        if self.derivative.is_some() {
            let f = self.clone();
            out = out.with_derivative(move |z| f.derivative(z + shift));
        }
        out
    }

    /// Sampled estimate of `sup |f(z)|(1+|z|^{2ε})/|z|^ε` over `points`, the
    /// Dunford-class constant for decay exponent `ε`.
    pub fn dunford_constant(&self, points: &[Complex64]) -> f64 {
        let e = self.decay_exponent;
        points
            .iter()
            .filter(|z| z.norm() > 0.0)
            .map(|&z| {
                let r = z.norm();
                self.eval(z).norm() * (1.0 + r.powf(2.0 * e)) / r.powf(e)
            })
            .fold(0.0, f64::max)
    }
}

/// Rational function with complex coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.len() > 1 && c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn horner_derivative(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &a)| acc * z + a * k as f64)
}

impl Rational {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let (num, den) = (trim(num), trim(den));
        if num.is_empty() {
            return Err(Error::InvalidParameters("field `num`: empty coefficient list".into()));
        }
        if den.is_empty() || den.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::InvalidParameters("field `den`: denominator is identically zero".into()));
        }
        Ok(Self { num, den })
    }

    /// Builds `∏(z − zeros) / ∏(z − poles)` scaled by `gain`.
    pub fn from_roots(gain: Complex64, zeros: &[Complex64], poles: &[Complex64]) -> Self {
        let expand = |roots: &[Complex64]| {
            let mut c = vec![Complex64::new(1.0, 0.0)];
            for &r in roots {
                let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
                for (k, &a) in c.iter().enumerate() {
                    next[k + 1] += a;
                    next[k] -= a * r;
                }
                c = next;
            }
            c
        };
        let num: Vec<Complex64> = expand(zeros).into_iter().map(|a| a * gain).collect();
        Self { num, den: expand(poles) }
    }

    /// `deg den − deg num`.
    pub fn decay_order(&self) -> i64 {
        self.den.len() as i64 - self.num.len() as i64
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.num, z) / horner(&self.den, z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let p = horner(&self.num, z);
        let q = horner(&self.den, z);
        (horner_derivative(&self.num, z) * q - p * horner_derivative(&self.den, z)) / (q * q)
    }
}

/// Function description accepted on the command line:
/// `{"num": [[re,im],...], "den": [[re,im],...]}`,
/// `{"kind": "resolvent", "mu": [re,im]}` or
/// `{"kind": "regularizer", "n": k, "eta_prime": v}`.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Rational(Rational),
    Resolvent { mu: Complex64 },
    Regularizer { n: u32, eta_prime: f64 },
}

fn complex_field(v: &Value, field: &str) -> Result<Complex64> {
    let bad = || Error::InvalidParameters(format!("field `{field}`: expected [re, im]"));
    let arr = v.as_array().ok_or_else(bad)?;
    if arr.len() != 2 {
        return Err(bad());
    }
    let re = arr[0].as_f64().ok_or_else(bad)?;
    let im = arr[1].as_f64().ok_or_else(bad)?;
    Ok(Complex64::new(re, im))
}

fn coefficient_list(obj: &serde_json::Map<String, Value>, field: &str) -> Result<Vec<Complex64>> {
    let v = obj
        .get(field)
        .ok_or_else(|| Error::InvalidParameters(format!("field `{field}`: missing")))?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidParameters(format!("field `{field}`: expected a list of [re, im]")))?;
    arr.iter().map(|c| complex_field(c, field)).collect()
}

impl FunctionSpec {
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidParameters("field `function`: expected an object".into()))?;
        match obj.get("kind") {
            None => Ok(FunctionSpec::Rational(Rational::new(
                coefficient_list(obj, "num")?,
                coefficient_list(obj, "den")?,
            )?)),
            Some(Value::String(kind)) if kind == "resolvent" => {
                let mu = obj
                    .get("mu")
                    .ok_or_else(|| Error::InvalidParameters("field `mu`: missing".into()))?;
                Ok(FunctionSpec::Resolvent { mu: complex_field(mu, "mu")? })
            }
            Some(Value::String(kind)) if kind == "regularizer" => {
                let n = obj
                    .get("n")
                    .and_then(Value::as_u64)
                    .filter(|&n| n >= 1 && n <= u32::MAX as u64)
                    .ok_or_else(|| Error::InvalidParameters("field `n`: expected a positive integer".into()))?;
                let eta_prime = obj
                    .get("eta_prime")
                    .and_then(Value::as_f64)
                    .filter(|&e| e > 0.0)
                    .ok_or_else(|| Error::InvalidParameters("field `eta_prime`: expected a positive number".into()))?;
                Ok(FunctionSpec::Regularizer { n: n as u32, eta_prime })
            }
            Some(other) => Err(Error::InvalidParameters(format!("field `kind`: unknown function kind {other}"))),
        }
    }

    pub fn build(&self) -> Result<HoloFunction> {
        match self {
            FunctionSpec::Rational(r) => Ok(HoloFunction::rational(r.clone())),
            FunctionSpec::Resolvent { mu } => Ok(HoloFunction::resolvent_kernel(*mu)),
            FunctionSpec::Regularizer { n, eta_prime } => crate::funcalc::regularizer_sequence(*n, *eta_prime),
        }
    }
}
