//! Holomorphic self-maps of the disk given as expressions or built-in families.
//!
//! The grammar is infix with `^` for integer powers, function-call syntax for
//! the built-ins `blaschke(theta; a1, ..., an)`, `aut(a, theta)`, `id` and
//! `compose(f, g)`, and complex literals written like `0.3-0.2i`. See the
//! grammar notes in the repository README.

mod parse;

pub use parse::{parse, ParseError};

use num_complex::Complex64;
use thiserror::Error;

use crate::hyp_core::BoundaryPoint;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("evaluation hit a pole (denominator modulus {0:e})")]
    Pole(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("map is not in finite Blaschke form")]
    UnsupportedMap,
    #[error("map is not a self-map of the disk")]
    InvalidSelfMap,
}

/// Order-2 jet: value, first and second derivative at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub f: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet2 {
    pub fn constant(c: Complex64) -> Self {
        Jet2 { f: c, d1: Complex64::new(0.0, 0.0), d2: Complex64::new(0.0, 0.0) }
    }

    pub fn variable(z: Complex64) -> Self {
        Jet2 { f: z, d1: Complex64::new(1.0, 0.0), d2: Complex64::new(0.0, 0.0) }
    }

    pub fn add(self, o: Jet2) -> Jet2 {
        Jet2 { f: self.f + o.f, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }

    pub fn sub(self, o: Jet2) -> Jet2 {
        Jet2 { f: self.f - o.f, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }

    pub fn neg(self) -> Jet2 {
        Jet2 { f: -self.f, d1: -self.d1, d2: -self.d2 }
    }

    pub fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            f: self.f * o.f,
            d1: self.d1 * o.f + self.f * o.d1,
            d2: self.d2 * o.f + 2.0 * self.d1 * o.d1 + self.f * o.d2,
        }
    }

    pub fn div(self, o: Jet2) -> Result<Jet2, EvalError> {
        if o.f.norm() < 1e-14 {
            return Err(EvalError::Pole(o.f.norm()));
        }
        let q = self.f / o.f;
        let q1 = (self.d1 - q * o.d1) / o.f;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.f;
        Ok(Jet2 { f: q, d1: q1, d2: q2 })
    }

    pub fn powi(self, n: i32) -> Result<Jet2, EvalError> {
        if n == 0 {
            return Ok(Jet2::constant(Complex64::new(1.0, 0.0)));
        }
        if n < 0 {
            return Jet2::constant(Complex64::new(1.0, 0.0)).div(self.powi(-n)?);
        }
        let nn = n as f64;
        let p2 = if n >= 2 { self.f.powi(n - 2) } else { Complex64::new(0.0, 0.0) };
        let p1 = self.f.powi(n - 1);
        Ok(Jet2 {
            f: self.f.powi(n),
            d1: nn * p1 * self.d1,
            d2: nn * (nn - 1.0) * p2 * self.d1 * self.d1 + nn * p1 * self.d2,
        })
    }

    /// Chain rule: jets of `outer ∘ inner` from `outer` evaluated at `inner.f`.
    pub fn chain(outer: Jet2, inner: Jet2) -> Jet2 {
        Jet2 {
            f: outer.f,
            d1: outer.d1 * inner.d1,
            d2: outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2,
        }
    }
}

/// Parsed map expression. Immutable after parse; evaluation is reentrant.
#[derive(Debug, Clone, PartialEq)]
pub enum MapExpr {
    Var,
    Id,
    Const(Complex64),
    Neg(Box<MapExpr>),
    Add(Box<MapExpr>, Box<MapExpr>),
    Sub(Box<MapExpr>, Box<MapExpr>),
    Mul(Box<MapExpr>, Box<MapExpr>),
    Div(Box<MapExpr>, Box<MapExpr>),
    Pow(Box<MapExpr>, i32),
    Blaschke { theta: f64, zeros: Vec<Complex64> },
    Aut { a: Complex64, theta: f64 },
    /// `Compose(f, g)` is f ∘ g.
    Compose(Box<MapExpr>, Box<MapExpr>),
}

fn blaschke_factor_value(z: Complex64, a: Complex64) -> Result<Complex64, EvalError> {
    let den = Complex64::new(1.0, 0.0) - a.conj() * z;
    if den.norm() < 1e-14 {
        return Err(EvalError::Pole(den.norm()));
    }
    Ok((z - a) / den)
}

fn blaschke_factor_jet(z: Complex64, a: Complex64) -> Result<Jet2, EvalError> {
    let den = Complex64::new(1.0, 0.0) - a.conj() * z;
    if den.norm() < 1e-14 {
        return Err(EvalError::Pole(den.norm()));
    }
    let s = 1.0 - a.norm_sqr();
    Ok(Jet2 {
        f: (z - a) / den,
        d1: s / (den * den),
        d2: 2.0 * a.conj() * s / (den * den * den),
    })
}

impl MapExpr {
    // Smart constructors used by the parser: constant subtrees fold so that
    // unparse/parse is a structural fixpoint.
    pub fn add(a: MapExpr, b: MapExpr) -> MapExpr {
        match (&a, &b) {
            (MapExpr::Const(x), MapExpr::Const(y)) => MapExpr::Const(x + y),
            _ => MapExpr::Add(Box::new(a), Box::new(b)),
        }
    }
    pub fn sub(a: MapExpr, b: MapExpr) -> MapExpr {
        match (&a, &b) {
            (MapExpr::Const(x), MapExpr::Const(y)) => MapExpr::Const(x - y),
            _ => MapExpr::Sub(Box::new(a), Box::new(b)),
        }
    }
    pub fn mul(a: MapExpr, b: MapExpr) -> MapExpr {
        match (&a, &b) {
            (MapExpr::Const(x), MapExpr::Const(y)) => MapExpr::Const(x * y),
            _ => MapExpr::Mul(Box::new(a), Box::new(b)),
        }
    }
    pub fn div(a: MapExpr, b: MapExpr) -> MapExpr {
        match (&a, &b) {
            (MapExpr::Const(x), MapExpr::Const(y)) if y.norm() > 0.0 => MapExpr::Const(x / y),
            _ => MapExpr::Div(Box::new(a), Box::new(b)),
        }
    }
    pub fn neg(a: MapExpr) -> MapExpr {
        match &a {
            MapExpr::Const(x) => MapExpr::Const(-x),
            _ => MapExpr::Neg(Box::new(a)),
        }
    }
    pub fn pow(a: MapExpr, n: i32) -> MapExpr {
        match &a {
            MapExpr::Const(x) => MapExpr::Const(x.powi(n)),
            _ => MapExpr::Pow(Box::new(a), n),
        }
    }

    pub fn eval_value(&self, z: Complex64) -> Result<Complex64, EvalError> {
        match self {
            MapExpr::Var | MapExpr::Id => Ok(z),
            MapExpr::Const(c) => Ok(*c),
            MapExpr::Neg(e) => Ok(-e.eval_value(z)?),
            MapExpr::Add(a, b) => Ok(a.eval_value(z)? + b.eval_value(z)?),
            MapExpr::Sub(a, b) => Ok(a.eval_value(z)? - b.eval_value(z)?),
            MapExpr::Mul(a, b) => Ok(a.eval_value(z)? * b.eval_value(z)?),
            MapExpr::Div(a, b) => {
                let den = b.eval_value(z)?;
                if den.norm() < 1e-14 {
                    return Err(EvalError::Pole(den.norm()));
                }
                Ok(a.eval_value(z)? / den)
            }
            MapExpr::Pow(a, n) => {
                let v = a.eval_value(z)?;
                if *n < 0 && v.norm() < 1e-14 {
                    return Err(EvalError::Pole(v.norm()));
                }
                Ok(v.powi(*n))
            }
            MapExpr::Blaschke { theta, zeros } => {
                let mut acc = Complex64::from_polar(1.0, *theta);
                for a in zeros {
                    acc *= blaschke_factor_value(z, *a)?;
                }
                Ok(acc)
            }
            MapExpr::Aut { a, theta } => {
                Ok(Complex64::from_polar(1.0, *theta) * blaschke_factor_value(z, *a)?)
            }
            MapExpr::Compose(f, g) => f.eval_value(g.eval_value(z)?),
        }
    }

    /// Value, first and second derivative at `z`.
    pub fn eval_jet(&self, z: Complex64) -> Result<Jet2, EvalError> {
        match self {
            MapExpr::Var | MapExpr::Id => Ok(Jet2::variable(z)),
            MapExpr::Const(c) => Ok(Jet2::constant(*c)),
            MapExpr::Neg(e) => Ok(e.eval_jet(z)?.neg()),
            MapExpr::Add(a, b) => Ok(a.eval_jet(z)?.add(b.eval_jet(z)?)),
            MapExpr::Sub(a, b) => Ok(a.eval_jet(z)?.sub(b.eval_jet(z)?)),
            MapExpr::Mul(a, b) => Ok(a.eval_jet(z)?.mul(b.eval_jet(z)?)),
            MapExpr::Div(a, b) => a.eval_jet(z)?.div(b.eval_jet(z)?),
            MapExpr::Pow(a, n) => a.eval_jet(z)?.powi(*n),
            MapExpr::Blaschke { theta, zeros } => {
                let mut acc = Jet2::constant(Complex64::from_polar(1.0, *theta));
                for a in zeros {
                    acc = acc.mul(blaschke_factor_jet(z, *a)?);
                }
                Ok(acc)
            }
            MapExpr::Aut { a, theta } => {
                Ok(Jet2::constant(Complex64::from_polar(1.0, *theta))
                    .mul(blaschke_factor_jet(z, *a)?))
            }
            MapExpr::Compose(f, g) => {
                let inner = g.eval_jet(z)?;
                let outer = f.eval_jet(inner.f)?;
                Ok(Jet2::chain(outer, inner))
            }
        }
    }

    /// Finite Blaschke canonical form `e^{i theta} prod (z - a_k)/(1 - conj(a_k) z)`,
    /// when the expression is structurally a product of such factors.
    pub fn as_blaschke(&self) -> Option<(f64, Vec<Complex64>)> {
        match self {
            MapExpr::Var | MapExpr::Id => Some((0.0, vec![Complex64::new(0.0, 0.0)])),
            MapExpr::Blaschke { theta, zeros } => Some((*theta, zeros.clone())),
            MapExpr::Aut { a, theta } => Some((*theta, vec![*a])),
            MapExpr::Neg(e) => {
                let (t, zs) = e.as_blaschke()?;
                Some((t + std::f64::consts::PI, zs))
            }
            MapExpr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
                (MapExpr::Const(c), e) | (e, MapExpr::Const(c))
                    if (c.norm() - 1.0).abs() < 1e-15 =>
                {
                    let (t, zs) = e.as_blaschke()?;
                    Some((t + c.arg(), zs))
                }
                _ => {
                    let (ta, za) = a.as_blaschke()?;
                    let (tb, mut zb) = b.as_blaschke()?;
                    let mut zeros = za;
                    zeros.append(&mut zb);
                    Some((ta + tb, zeros))
                }
            },
            MapExpr::Pow(e, n) if *n >= 1 => {
                let (t, zs) = e.as_blaschke()?;
                let mut zeros = Vec::with_capacity(zs.len() * *n as usize);
                for _ in 0..*n {
                    zeros.extend_from_slice(&zs);
                }
                Some((t * *n as f64, zeros))
            }
            _ => None,
        }
    }

    /// Structural automorphism test (degree-1 Blaschke form, possibly composed).
    pub fn is_automorphism(&self) -> bool {
        if let Some((_, zeros)) = self.as_blaschke() {
            return zeros.len() == 1;
        }
        matches!(self, MapExpr::Compose(f, g) if f.is_automorphism() && g.is_automorphism())
    }

    pub fn unparse(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s
    }

    // prec: 1 add-level, 2 mul-level, 3 unary, 4 power-base/atom
    fn write(&self, out: &mut String, prec: u8) {
        let own = match self {
            MapExpr::Add(..) | MapExpr::Sub(..) => 1,
            MapExpr::Mul(..) | MapExpr::Div(..) => 2,
            MapExpr::Neg(..) => 3,
            MapExpr::Pow(..) => 4,
            _ => 5,
        };
        let need = own < prec
            || matches!(self, MapExpr::Const(c) if prec > 1 && !is_plain_const(*c));
        if need {
            out.push('(');
        }
        match self {
            MapExpr::Var => out.push('z'),
            MapExpr::Id => out.push_str("id"),
            MapExpr::Const(c) => out.push_str(&fmt_complex(*c)),
            MapExpr::Neg(e) => {
                out.push('-');
                e.write(out, 3);
            }
            MapExpr::Add(a, b) => {
                a.write(out, 1);
                out.push_str(" + ");
                b.write(out, 2);
            }
            MapExpr::Sub(a, b) => {
                a.write(out, 1);
                out.push_str(" - ");
                b.write(out, 2);
            }
            MapExpr::Mul(a, b) => {
                a.write(out, 2);
                out.push('*');
                b.write(out, 3);
            }
            MapExpr::Div(a, b) => {
                a.write(out, 2);
                out.push('/');
                b.write(out, 3);
            }
            MapExpr::Pow(a, n) => {
                a.write(out, 5);
                out.push('^');
                out.push_str(&n.to_string());
            }
            MapExpr::Blaschke { theta, zeros } => {
                out.push_str("blaschke(");
                out.push_str(&fmt_f64(*theta));
                out.push_str("; ");
                for (i, a) in zeros.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&fmt_complex(*a));
                }
                out.push(')');
            }
            MapExpr::Aut { a, theta } => {
                out.push_str("aut(");
                out.push_str(&fmt_complex(*a));
                out.push_str(", ");
                out.push_str(&fmt_f64(*theta));
                out.push(')');
            }
            MapExpr::Compose(f, g) => {
                out.push_str("compose(");
                f.write(out, 0);
                out.push_str(", ");
                g.write(out, 0);
                out.push(')');
            }
        }
        if need {
            out.push(')');
        }
    }
}

fn is_plain_const(c: Complex64) -> bool {
    (c.im == 0.0 && c.re >= 0.0) || (c.re == 0.0 && c.im >= 0.0)
}

fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

pub(crate) fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_f64(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt_f64(c.im))
    } else if c.im < 0.0 {
        format!("{} - {}i", fmt_f64(c.re), fmt_f64(-c.im))
    } else {
        format!("{} + {}i", fmt_f64(c.re), fmt_f64(c.im))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Self-map by construction (built-ins and their closed combinations).
    Exact,
    /// Certified only on the sampled boundary/interior points.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationWitness {
    Boundary(BoundaryPoint),
    Interior(Complex64),
    PoleInClosedDisk(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfMapValidation {
    pub verdict: Verdict,
    pub mode: ValidationMode,
    pub max_boundary_modulus: f64,
    pub witness: Option<ValidationWitness>,
}

pub const TOL_VALIDATE: f64 = 1e-9;

/// Exact boundary modulus for structurally disk-preserving trees, if known.
fn exact_self_map_modulus(e: &MapExpr) -> Option<f64> {
    match e {
        MapExpr::Var | MapExpr::Id | MapExpr::Blaschke { .. } | MapExpr::Aut { .. } => Some(1.0),
        MapExpr::Const(c) if c.norm() < 1.0 => Some(c.norm()),
        MapExpr::Neg(x) => exact_self_map_modulus(x),
        MapExpr::Mul(a, b) => Some(exact_self_map_modulus(a)? * exact_self_map_modulus(b)?),
        MapExpr::Pow(a, n) if *n >= 1 => Some(exact_self_map_modulus(a)?.powi(*n)),
        MapExpr::Compose(f, g) => {
            let _ = exact_self_map_modulus(g)?;
            exact_self_map_modulus(f)
        }
        _ => None,
    }
}

fn collect_divisors<'a>(e: &'a MapExpr, out: &mut Vec<&'a MapExpr>) {
    match e {
        MapExpr::Div(a, b) => {
            out.push(b);
            collect_divisors(a, out);
            collect_divisors(b, out);
        }
        MapExpr::Neg(a) | MapExpr::Pow(a, _) => collect_divisors(a, out),
        MapExpr::Add(a, b) | MapExpr::Sub(a, b) | MapExpr::Mul(a, b) | MapExpr::Compose(a, b) => {
            collect_divisors(a, out);
            collect_divisors(b, out);
        }
        _ => {}
    }
}

/// Sunflower-spiral points filling the disk of radius `r_max`.
fn interior_samples(n: usize, r_max: f64) -> impl Iterator<Item = Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |k| {
        let r = r_max * (((k as f64) + 0.5) / n as f64).sqrt();
        Complex64::from_polar(r, golden * k as f64)
    })
}

/// Validate that an expression maps the disk into itself.
///
/// Built-in constructions are valid by construction and skip sampling. Free
/// expressions are checked on `n_boundary` boundary angles and `n_interior`
/// interior points, with denominators pre-scanned for zeros in the closed
/// disk. Sampling is necessary-but-not-sufficient for non-rational trees, so
/// the mode is recorded in the result.
pub fn validate_self_map(f: &MapExpr, n_boundary: usize, n_interior: usize) -> SelfMapValidation {
    assert!(n_boundary >= 64, "n_boundary must be at least 64");
    if let Some(m) = exact_self_map_modulus(f) {
        return SelfMapValidation {
            verdict: Verdict::Valid,
            mode: ValidationMode::Exact,
            max_boundary_modulus: m,
            witness: None,
        };
    }

    let mut divisors = Vec::new();
    collect_divisors(f, &mut divisors);
    for den in &divisors {
        for k in 0..n_boundary {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n_boundary as f64);
            if den.eval_value(z).map(|v| v.norm() < 1e-8).unwrap_or(true) {
                return SelfMapValidation {
                    verdict: Verdict::Invalid,
                    mode: ValidationMode::Sampled,
                    max_boundary_modulus: f64::INFINITY,
                    witness: Some(ValidationWitness::PoleInClosedDisk(z)),
                };
            }
        }
        for z in interior_samples(n_interior.max(64), 1.0) {
            if den.eval_value(z).map(|v| v.norm() < 1e-8).unwrap_or(true) {
                return SelfMapValidation {
                    verdict: Verdict::Invalid,
                    mode: ValidationMode::Sampled,
                    max_boundary_modulus: f64::INFINITY,
                    witness: Some(ValidationWitness::PoleInClosedDisk(z)),
                };
            }
        }
        // Argument principle: the winding of den around |z| = 1 counts its
        // interior zeros, so a zero is detected even when no sample lands on
        // it. (den is nonzero on the boundary by the check above.)
        if divisor_winding(den, 4096).map(|w| w > 0).unwrap_or(false) {
            let z = interior_samples(4096, 1.0)
                .into_iter()
                .min_by(|a, b| {
                    let ma = den.eval_value(*a).map(|v| v.norm()).unwrap_or(0.0);
                    let mb = den.eval_value(*b).map(|v| v.norm()).unwrap_or(0.0);
                    ma.total_cmp(&mb)
                })
                .unwrap_or_default();
            return SelfMapValidation {
                verdict: Verdict::Invalid,
                mode: ValidationMode::Sampled,
                max_boundary_modulus: f64::INFINITY,
                witness: Some(ValidationWitness::PoleInClosedDisk(z)),
            };
        }
    }

    let mut max_boundary = 0.0f64;
    let mut witness = None;
    for k in 0..n_boundary {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / n_boundary as f64;
        let z = Complex64::from_polar(1.0, angle);
        match f.eval_value(z) {
            Ok(v) => {
                let m = v.norm();
                if m > max_boundary {
                    max_boundary = m;
                    if m > 1.0 + TOL_VALIDATE {
                        witness = Some(ValidationWitness::Boundary(BoundaryPoint::new(angle)));
                    }
                }
            }
            Err(_) => {
                return SelfMapValidation {
                    verdict: Verdict::Invalid,
                    mode: ValidationMode::Sampled,
                    max_boundary_modulus: f64::INFINITY,
                    witness: Some(ValidationWitness::PoleInClosedDisk(z)),
                }
            }
        }
    }
    let mut interior_bad = None;
    for z in interior_samples(n_interior, 1.0 - 1e-6) {
        match f.eval_value(z) {
            Ok(v) if v.norm() < 1.0 => {}
            Ok(_) => {
                interior_bad = Some(ValidationWitness::Interior(z));
                break;
            }
            Err(_) => {
                interior_bad = Some(ValidationWitness::PoleInClosedDisk(z));
                break;
            }
        }
    }

    let valid = max_boundary <= 1.0 + TOL_VALIDATE && interior_bad.is_none();
    SelfMapValidation {
        verdict: if valid { Verdict::Valid } else { Verdict::Invalid },
        mode: ValidationMode::Sampled,
        max_boundary_modulus: max_boundary,
        witness: witness.or(interior_bad),
    }
}

/// Winding number of `g(e^{i phi})` around 0, by summing principal argument
/// increments over `n` samples. Returns None if an evaluation fails or a
/// sample is too close to 0 for the increment to be trustworthy.
fn divisor_winding(g: &MapExpr, n: usize) -> Option<i64> {
    let mut total = 0.0f64;
    let mut prev = g.eval_value(Complex64::new(1.0, 0.0)).ok()?;
    for k in 1..=n {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
        let cur = g.eval_value(z).ok()?;
        if cur.norm() < 1e-12 || prev.norm() < 1e-12 {
            return None;
        }
        total += (cur / prev).arg();
        prev = cur;
    }
    Some((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// Boundary derivative modulus of a finite Blaschke product with the given
/// zeros, `sum_k (1 - |a_k|^2)/|zeta - a_k|^2`. Equals the radial limit of
/// `nu_f` and of |f'| at the boundary point.
pub fn blaschke_boundary_derivative(zeros: &[Complex64], zeta: BoundaryPoint) -> f64 {
    let z = zeta.value();
    zeros
        .iter()
        .map(|a| (1.0 - a.norm_sqr()) / (z - a).norm_sqr())
        .sum()
}

/// Supremum of |f'| over the disk for a finite Blaschke product, attained on
/// the boundary. Dense sampling followed by golden-section refinement.
pub fn sup_derivative(f: &MapExpr) -> Result<f64, MapError> {
    let (_, zeros) = f.as_blaschke().ok_or(MapError::UnsupportedMap)?;
    let eval = |t: f64| blaschke_boundary_derivative(&zeros, BoundaryPoint::new(t));
    let n = 8192usize;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let v = eval(i as f64 * step);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // golden-section maximization on the bracketing interval
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = (best_i as f64 - 1.0) * step;
    let mut hi = (best_i as f64 + 1.0) * step;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1);
        }
    }
    Ok(best.max(f1).max(f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jet_of_identity_and_square() {
        let f = parse("z").unwrap();
        let j = f.eval_jet(c(0.3, 0.0)).unwrap();
        assert_eq!((j.f, j.d1, j.d2), (c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.0)));

        let f = parse("z^2").unwrap();
        let j = f.eval_jet(c(0.5, 0.0)).unwrap();
        assert!((j.f - c(0.25, 0.0)).norm() < 1e-15);
        assert!((j.d1 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((j.d2 - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn jet_of_automorphism_at_origin() {
        // phi(z) = (z + 0.5)/(1 + 0.5 z): phi'(0) = 1 - zeta^2, phi''(0) = -2 zeta (1 - zeta^2)
        let f = parse("compose(aut(-0.5, 0), id)").unwrap();
        let j = f.eval_jet(c(0.0, 0.0)).unwrap();
        assert!((j.f - c(0.5, 0.0)).norm() < 1e-14);
        assert!((j.d1 - c(0.75, 0.0)).norm() < 1e-14);
        assert!((j.d2 - c(-0.75, 0.0)).norm() < 1e-14);
    }

    fn fd_jet(f: &MapExpr, z: Complex64) -> (Complex64, Complex64) {
        let h = 1e-5;
        let dirs = [c(1.0, 0.0), c(0.0, 1.0)];
        let mut d1 = c(0.0, 0.0);
        let mut d2 = c(0.0, 0.0);
        for e in dirs {
            let he = h * e;
            let fp = f.eval_value(z + he).unwrap();
            let fm = f.eval_value(z - he).unwrap();
            let f0 = f.eval_value(z).unwrap();
            d1 += (fp - fm) / (2.0 * he);
            d2 += (fp - 2.0 * f0 + fm) / (he * he);
        }
        (d1 / 2.0, d2 / 2.0)
    }

    #[test]
    fn jets_match_finite_differences() {
        let maps = [
            "blaschke(0.3; 0.3, -0.2i, 0.1 + 0.4i)",
            "compose(aut(0.2 - 0.1i, 1.0), z^3)",
            "(z^2 - 0.25)/(1 - 0.25*z^2)",
            "z*0.5 + z^2*0.25",
        ];
        let pts = [c(0.1, 0.2), c(-0.4, 0.1), c(0.0, 0.0), c(0.3, -0.5)];
        for m in maps {
            let f = parse(m).unwrap();
            for z in pts {
                let j = f.eval_jet(z).unwrap();
                let (fd1, fd2) = fd_jet(&f, z);
                assert!((j.d1 - fd1).norm() / (1.0 + j.d1.norm()) < 1e-6, "{m} d1");
                assert!((j.d2 - fd2).norm() / (1.0 + j.d2.norm()) < 1e-4, "{m} d2");
            }
        }
    }

    #[test]
    fn validation_examples() {
        let v = validate_self_map(&parse("blaschke(0; 0.3)").unwrap(), 64, 64);
        assert_eq!(v.verdict, Verdict::Valid);
        assert_eq!(v.mode, ValidationMode::Exact);
        assert_eq!(v.max_boundary_modulus, 1.0);

        let v = validate_self_map(&parse("z + 0.5").unwrap(), 256, 256);
        assert_eq!(v.verdict, Verdict::Invalid);
        match v.witness {
            Some(ValidationWitness::Boundary(b)) => {
                assert!((b.value() - c(1.0, 0.0)).norm() < 0.5, "witness near z = 1");
            }
            other => panic!("expected boundary witness, got {other:?}"),
        }

        let v = validate_self_map(&parse("z/2").unwrap(), 64, 64);
        assert_eq!(v.verdict, Verdict::Valid);
        assert!((v.max_boundary_modulus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pole_in_disk_is_rejected() {
        let v = validate_self_map(&parse("z/(1 - 2*z)").unwrap(), 64, 256);
        assert_eq!(v.verdict, Verdict::Invalid);
        assert!(matches!(v.witness, Some(ValidationWitness::PoleInClosedDisk(_))));
    }

    #[test]
    fn boundary_derivative_values() {
        let zeta = BoundaryPoint::new(0.7);
        assert!((blaschke_boundary_derivative(&[c(0.0, 0.0)], zeta) - 1.0).abs() < 1e-14);
        assert!(
            (blaschke_boundary_derivative(&[c(0.0, 0.0), c(0.0, 0.0)], zeta) - 2.0).abs() < 1e-14
        );
        let d = blaschke_boundary_derivative(&[c(0.5, 0.0)], BoundaryPoint::new(0.0));
        assert!((d - 3.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_derivative_matches_radial_nu_limit() {
        use crate::hyp_core::{nu_f, DiskPoint};
        let f = parse("blaschke(0.2; 0.5, -0.2 + 0.1i)").unwrap();
        let (_, zeros) = f.as_blaschke().unwrap();
        let zeta = BoundaryPoint::new(1.3);
        let exact = blaschke_boundary_derivative(&zeros, zeta);
        let mut prev_err = f64::INFINITY;
        for r in [0.9, 0.99, 0.999, 0.9999] {
            let z = DiskPoint::new(r * zeta.value()).unwrap();
            let err = (nu_f(&f, z).unwrap() - exact).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-3);
    }

    #[test]
    fn sup_derivative_values() {
        let f = parse("z^2").unwrap();
        assert!((sup_derivative(&f).unwrap() - 2.0).abs() < 1e-9);

        let f = parse("aut(-0.5, 0)").unwrap();
        assert!((sup_derivative(&f).unwrap() - 3.0).abs() < 1e-9);

        // brute-force oracle bracket for blaschke(0; 0.3, -0.3)
        let f = parse("blaschke(0; 0.3, -0.3)").unwrap();
        let s = sup_derivative(&f).unwrap();
        assert!((2.0..=2.86).contains(&s), "{s}");

        assert_eq!(sup_derivative(&parse("z/2").unwrap()), Err(MapError::UnsupportedMap));
    }

    #[test]
    fn sup_derivative_at_least_degree() {
        let f = parse("blaschke(0.4; 0.1, 0.2i, -0.5, 0.3 - 0.3i)").unwrap();
        assert!(sup_derivative(&f).unwrap() >= 4.0 - 1e-9);
    }

    #[test]
    fn blaschke_unit_modulus_and_winding() {
        // boundary modulus == 1 within 1e-12; mean of |f'| over the circle == degree
        let f = parse("blaschke(0.1; 0.3, -0.2i, 0.5 + 0.1i)").unwrap();
        let (_, zeros) = f.as_blaschke().unwrap();
        let n = 20000usize;
        let mut integral = 0.0;
        for k in 0..n {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let z = Complex64::from_polar(1.0, t);
            assert!((f.eval_value(z).unwrap().norm() - 1.0).abs() < 1e-12);
            integral += blaschke_boundary_derivative(&zeros, BoundaryPoint::new(t));
        }
        integral /= n as f64;
        assert!((integral - 3.0).abs() < 1e-6, "{integral}");
    }
}
