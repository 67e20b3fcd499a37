//! The level-set families: their potentials, membership tests and extracted
//! region geometry.
//!
//! Both families are kept in the one sign convention `region = {u > 0}`:
//! the density family uses `u(z) = |f(z)|^2 - lambda |z|^2 + lambda - 1`,
//! the distance family uses `u(z) = (1 + a|z|) |f(z)| - |z| - a` with
//! `a = -tanh(mu/2)`.

mod marching;

pub use marching::extract_region;

use num_complex::Complex64;
use thiserror::Error;

use crate::hyp_core::{BoundaryPoint, EPS_BOUNDARY};
use crate::map_dsl::{sup_derivative, EvalError, MapExpr};

pub const DEFAULT_RESOLUTION: usize = 512;
pub const DEFAULT_TOL_CONTOUR: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum LevelSetError {
    #[error("the origin is not inside the region")]
    OriginNotInRegion,
    #[error("the region is empty")]
    EmptyRegion,
    #[error("the region is the whole disk")]
    WholeDisk,
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error("the potential is not differentiable at this point")]
    NonSmoothPoint,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    Identity,
    LogCoshHalf,
}

/// Which level set: the density family at level `lambda`, the distance
/// family at level `mu`, or a deformed distance family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSpec {
    OmegaLambda { lambda: f64 },
    DMu { mu: f64 },
    PhiMu { phi: PhiKind, mu: f64 },
}

impl LevelSpec {
    pub fn omega(lambda: f64) -> Result<Self, LevelSetError> {
        if lambda <= 0.0 {
            return Err(LevelSetError::UnsupportedParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(LevelSpec::OmegaLambda { lambda })
    }

    pub fn dmu(mu: f64) -> Self {
        LevelSpec::DMu { mu }
    }

    /// The euclidean parameter `a = -tanh(mu/2)` of the distance family.
    pub fn dmu_a(mu: f64) -> f64 {
        -(mu / 2.0).tanh()
    }

    pub fn label(&self) -> String {
        match self {
            LevelSpec::OmegaLambda { lambda } => format!("omega[lambda={lambda}]"),
            LevelSpec::DMu { mu } => format!("dmu[mu={mu}]"),
            LevelSpec::PhiMu { phi: PhiKind::Identity, mu } => format!("phi-identity[mu={mu}]"),
            LevelSpec::PhiMu { phi: PhiKind::LogCoshHalf, mu } => {
                format!("phi-log-cosh-half[mu={mu}]")
            }
        }
    }
}

/// The defining potential; the region is `{z : u(z) > 0}`.
pub fn potential_u(spec: &LevelSpec, f: &MapExpr, z: Complex64) -> Result<f64, EvalError> {
    let fz = f.eval_value(z)?;
    Ok(match spec {
        LevelSpec::OmegaLambda { lambda } => fz.norm_sqr() - lambda * z.norm_sqr() + lambda - 1.0,
        LevelSpec::DMu { mu } | LevelSpec::PhiMu { phi: PhiKind::Identity, mu } => {
            let a = LevelSpec::dmu_a(*mu);
            (1.0 + a * z.norm()) * fz.norm() - z.norm() - a
        }
        LevelSpec::PhiMu { phi: PhiKind::LogCoshHalf, mu } => {
            // log cosh(k(z,0)/2) = -log(1-|z|^2)/2, so the deformed potential
            // reduces to half the log of the density quotient.
            0.5 * ((1.0 - z.norm_sqr()).ln() - (1.0 - fz.norm_sqr()).ln()) + mu
        }
    })
}

/// Gradient of the potential as a 2-vector encoded `u_x + i u_y = 2 du/dzbar`.
pub fn grad_u(spec: &LevelSpec, f: &MapExpr, z: Complex64) -> Result<Complex64, LevelSetError> {
    let jet = f.eval_jet(z)?;
    let (fz, fpz) = (jet.f, jet.d1);
    match spec {
        LevelSpec::OmegaLambda { lambda } => Ok(2.0 * (fz * fpz.conj() - lambda * z)),
        LevelSpec::DMu { mu } | LevelSpec::PhiMu { phi: PhiKind::Identity, mu } => {
            if z.norm() < 1e-12 || fz.norm() < 1e-12 {
                return Err(LevelSetError::NonSmoothPoint);
            }
            let a = LevelSpec::dmu_a(*mu);
            Ok(a * fz.norm() * z / z.norm() + (1.0 + a * z.norm()) * fz * fpz.conj() / fz.norm()
                - z / z.norm())
        }
        LevelSpec::PhiMu { phi: PhiKind::LogCoshHalf, .. } => {
            Ok(fz * fpz.conj() / (1.0 - fz.norm_sqr()) - z / (1.0 - z.norm_sqr()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Boundary,
}

pub fn membership(
    spec: &LevelSpec,
    f: &MapExpr,
    z: Complex64,
    tol: f64,
) -> Result<Membership, EvalError> {
    let u = potential_u(spec, f, z)?;
    Ok(classify(u, tol))
}

pub fn classify(u: f64, tol: f64) -> Membership {
    if u > tol {
        Membership::In
    } else if u < -tol {
        Membership::Out
    } else {
        Membership::Boundary
    }
}

/// Discretized region geometry: a cell-center membership bitmap over the
/// square `[-1,1]^2` plus refined contour polylines.
#[derive(Debug, Clone)]
pub struct RegionSample {
    pub spec: LevelSpec,
    pub map: String,
    /// Cells per axis; the grid has `resolution^2` cells.
    pub resolution: usize,
    /// Cell centers with u > 0 (false outside the disk).
    pub in_bitmap: Vec<bool>,
    /// Cell centers strictly inside the disk.
    pub inside_disk: Vec<bool>,
    pub contours: Vec<Vec<Complex64>>,
    pub contains_origin: bool,
}

impl RegionSample {
    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        let h = 2.0 / self.resolution as f64;
        Complex64::new(-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h)
    }

    pub fn in_count(&self) -> usize {
        self.in_bitmap.iter().filter(|&&b| b).count()
    }

    pub fn out_count_inside_disk(&self) -> usize {
        self.inside_disk
            .iter()
            .zip(&self.in_bitmap)
            .filter(|(&inside, &inn)| inside && !inn)
            .count()
    }
}

/// Restrict the bitmap to the 4-connected component of the origin's cell.
/// Contours are left as extracted.
pub fn component_of_origin(region: &RegionSample) -> Result<RegionSample, LevelSetError> {
    if !region.contains_origin {
        return Err(LevelSetError::OriginNotInRegion);
    }
    let n = region.resolution;
    let idx = |i: usize, j: usize| j * n + i;
    let start = idx(n / 2, n / 2);
    let seed = if region.in_bitmap[start] {
        start
    } else {
        // the exact center cell may straddle u = 0; look at its neighbors
        let (i, j) = (n / 2, n / 2)       ;
        [
            idx(i.wrapping_sub(1), j),
            idx(i + 1, j),
            idx(i, j.wrapping_sub(1)),
            idx(i, j + 1),
        ]
        .into_iter()
        .find(|&k| k < region.in_bitmap.len() && region.in_bitmap[k])
        .ok_or(LevelSetError::OriginNotInRegion)?
    };
    let mut keep = vec![false; region.in_bitmap.len()];
    let mut stack = vec![seed];
    keep[seed] = true;
    while let Some(k) = stack.pop() {
        let (i, j) = (k % n, k / n);
        let mut push = |ii: usize, jj: usize, stack: &mut Vec<usize>| {
            if ii < n && jj < n {
                let kk = idx(ii, jj);
                if region.in_bitmap[kk] && !keep[kk] {
                    keep[kk] = true;
                    stack.push(kk);
                }
            }
        };
        push(i.wrapping_sub(1), j, &mut stack);
        push(i + 1, j, &mut stack);
        push(i, j.wrapping_sub(1), &mut stack);
        push(i, j + 1, &mut stack);
    }
    Ok(RegionSample { in_bitmap: keep, ..region.clone() })
}

pub(crate) const RADIUS_MARCH_STEPS: usize = 1024;

/// Marching predicate: values above this count as "in". Slightly below zero
/// so that potentials whose exact value is 0 on a set (and whose rounding
/// noise straddles zero at ~1e-16) do not produce spurious crossings.
const RADIUS_IN_THRESHOLD: f64 = -1e-13;

/// Radius function of a region given by an arbitrary continuous potential:
/// the largest `r` such that dense samples of `[0, r omega]` all satisfy
/// `u > 0`, located by marching plus bisection, clipped at the disk rim.
/// Sign changes smaller than rounding noise are invisible to this scan, so a
/// measure-zero zero set (a slit on which u = 0 exactly) does not stop the ray.
pub fn radius_function_of(
    u: impl Fn(Complex64) -> f64,
    omega: BoundaryPoint,
    tol: f64,
) -> Result<f64, LevelSetError> {
    if u(Complex64::new(0.0, 0.0)) <= 0.0 {
        return Err(LevelSetError::OriginNotInRegion);
    }
    let dir = omega.value();
    let r_max = 1.0 - EPS_BOUNDARY;
    let mut prev = 0.0f64;
    let mut first_out = None;
    for k in 1..=RADIUS_MARCH_STEPS {
        let r = r_max * k as f64 / RADIUS_MARCH_STEPS as f64;
        if u(r * dir) <= RADIUS_IN_THRESHOLD {
            first_out = Some((prev, r));
            break;
        }
        prev = r;
    }
    let (mut lo, mut hi) = match first_out {
        None => return Ok(r_max),
        Some(bracket) => bracket,
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if u(mid * dir) > RADIUS_IN_THRESHOLD {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn radius_function(
    spec: &LevelSpec,
    f: &MapExpr,
    omega: BoundaryPoint,
    tol: f64,
) -> Result<f64, LevelSetError> {
    let u = |z: Complex64| potential_u(spec, f, z).unwrap_or(f64::NEG_INFINITY);
    radius_function_of(u, omega, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarlikeReport {
    pub starlike: bool,
    pub witness: Option<BoundaryPoint>,
}

/// Starlikeness about the origin for a region given by a potential: for each
/// sampled direction the ray beyond the radius function must stay out.
pub fn is_starlike_of(
    u: impl Fn(Complex64) -> f64,
    n_directions: usize,
    tol: f64,
) -> Result<StarlikeReport, LevelSetError> {
    let r_max = 1.0 - EPS_BOUNDARY;
    for k in 0..n_directions {
        let omega = BoundaryPoint::new(2.0 * std::f64::consts::PI * k as f64 / n_directions as f64);
        let r = radius_function_of(&u, omega, tol)?;
        if r >= r_max - 1e-9 {
            continue;
        }
        let dir = omega.value();
        for j in 0..64 {
            let s = r + (j as f64 + 0.5) / 64.0 * (r_max - r);
            if u(s * dir) > tol {
                return Ok(StarlikeReport { starlike: false, witness: Some(omega) });
            }
        }
    }
    Ok(StarlikeReport { starlike: true, witness: None })
}

pub fn is_starlike(
    spec: &LevelSpec,
    f: &MapExpr,
    n_directions: usize,
    tol: f64,
) -> Result<StarlikeReport, LevelSetError> {
    let u = |z: Complex64| potential_u(spec, f, z).unwrap_or(f64::NEG_INFINITY);
    is_starlike_of(u, n_directions, tol)
}

/// Non-emptiness of the distance family at a negative level:
/// `|f(0)| > -tanh(mu/2)`.
pub fn dmu_nonempty(f: &MapExpr, mu: f64) -> Result<bool, LevelSetError> {
    if mu >= 0.0 {
        return Err(LevelSetError::UnsupportedParameter(format!(
            "nonemptiness criterion applies to mu < 0 only, got {mu}"
        )));
    }
    let f0 = f.eval_value(Complex64::new(0.0, 0.0))?;
    Ok(f0.norm() > -(mu / 2.0).tanh())
}

/// Whether the density-family region is the whole disk: true iff the map is
/// in finite Blaschke form, `lambda > 1` and `lambda >= sup |f'|`.
pub fn omega_whole_disk(f: &MapExpr, lambda: f64) -> bool {
    if lambda <= 1.0 {
        return false;
    }
    match sup_derivative(f) {
        Ok(sup) => lambda >= sup - 1e-9,
        Err(_) => false,
    }
}

/// Sign agreement between the log-cosh-deformed distance potential at level
/// `mu > 0` and the density potential at level `e^{2 mu}`.
pub fn phi_equivalence_check(f: &MapExpr, mu: f64, n_points: usize) -> Result<bool, LevelSetError> {
    if mu <= 0.0 {
        return Err(LevelSetError::UnsupportedParameter(format!(
            "the log-cosh deformation targets mu > 0, got {mu}"
        )));
    }
    let phi = LevelSpec::PhiMu { phi: PhiKind::LogCoshHalf, mu };
    let omega = LevelSpec::OmegaLambda { lambda: (2.0 * mu).exp() };
    // deterministic low-discrepancy samples of the disk
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for k in 0..n_points {
        let r = (1.0 - 1e-6) * (((k as f64) + 0.5) / n_points as f64).sqrt();
        let z = Complex64::from_polar(r, golden * k as f64);
        let u1 = potential_u(&phi, f, z)?;
        let u2 = potential_u(&omega, f, z)?;
        let agree = (u1 > 0.0) == (u2 > 0.0) || u1.abs().min(u2.abs()) < 1e-12;
        if !agree {
            return Ok(false);
        }
    }
    Ok(true)
}
