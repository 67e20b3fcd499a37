//! Boundary second-variation quantities: the coefficient chains c0, c1, A,
//! kappa behind the strict-convexity arguments for both level-set families,
//! plus a finite-difference replica of v''(0) along the tangent geodesic.

use num_complex::Complex64;
use thiserror::Error;

use crate::level_set::{dmu_nonempty, grad_u, potential_u, LevelSpec};
use crate::map_dsl::{EvalError, MapExpr};

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("the point is not on the region boundary (|u| = {0:.3e})")]
    NotOnBoundary(f64),
    #[error("the region is empty")]
    EmptySet,
    #[error("the potential gradient vanishes at this point")]
    ZeroGradient,
    #[error("hypotheses exclude this configuration: {0}")]
    ExcludedByHypothesis(String),
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy)]
pub struct ProofQuantitiesOmega {
    pub lambda: f64,
    /// Boundary point after the rotation normalization (real, in (0,1)).
    pub zeta: f64,
    /// b = |f(zeta)| >= 0.
    pub b: f64,
    pub b1: Complex64,
    pub b2: Complex64,
    pub c0: Complex64,
    pub c1: Complex64,
    pub a_coef: Complex64,
    pub kappa: Complex64,
    pub phi: f64,
    pub v2_analytic: f64,
    pub v2_numeric: f64,
    /// Set when f(zeta) = 0: the rotation cannot make b > 0 and the chain
    /// runs with b = 0.
    pub degenerate_normalization: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ProofQuantitiesDMu {
    pub mu: f64,
    pub zeta: f64,
    pub b: f64,
    pub b1: Complex64,
    pub b2: Complex64,
    pub c0: Complex64,
    pub c1: Complex64,
    pub a_coef: Complex64,
    /// c0 + 1 = r e^{i theta}.
    pub theta: f64,
    pub r: f64,
    pub kappa: Complex64,
    pub alpha: f64,
    pub beta: f64,
    pub p_at_0: f64,
    pub p_at_2cos: f64,
    pub v2_analytic: f64,
    pub v2_numeric: f64,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Rotation-normalized data at a boundary point: angles (t0, s) with
/// F(w) := e^{is} f(e^{it0} w), real radius zr = |zeta|, b = |f(zeta)| and
/// the Taylor coefficients b1, b2 of g := F((zr + w)/(1 + zr w)) at 0.
struct Normalized {
    t0: f64,
    zr: f64,
    b: f64,
    b1: Complex64,
    b2: Complex64,
}

fn normalize(f: &MapExpr, zeta: Complex64) -> Result<Normalized, EvalError> {
    let jet = f.eval_jet(zeta)?;
    let t0 = if zeta.norm() < 1e-15 { 0.0 } else { zeta.arg() };
    let s = if jet.f.norm() < 1e-12 { 0.0 } else { -jet.f.arg() };
    let zr = zeta.norm();
    let f1 = Complex64::from_polar(1.0, s + t0) * jet.d1;
    let f2 = Complex64::from_polar(1.0, s + 2.0 * t0) * jet.d2;
    // phi(w) = (zr + w)/(1 + zr w): phi'(0) = 1 - zr^2, phi''(0) = -2 zr (1 - zr^2)
    let dp = 1.0 - zr * zr;
    let g1 = f1 * dp;
    let g2 = f2 * dp * dp + f1 * (-2.0 * zr * dp);
    Ok(Normalized { t0, zr, b: jet.f.norm(), b1: g1, b2: 0.5 * g2 })
}

/// Newton steps along the gradient pushing |u| down to differencing accuracy,
/// so the v(0) term does not pollute the second differences.
fn snap_to_boundary(
    spec: &LevelSpec,
    f: &MapExpr,
    mut z: Complex64,
) -> Result<Complex64, ProofError> {
    for _ in 0..12 {
        let u = potential_u(spec, f, z)?;
        if u.abs() <= 1e-14 {
            break;
        }
        let g = grad_u(spec, f, z).map_err(|_| ProofError::ZeroGradient)?;
        if g.norm() < 1e-12 {
            return Err(ProofError::ZeroGradient);
        }
        z -= u * g / g.norm_sqr();
    }
    Ok(z)
}

/// Central second difference of v at 0 with two Richardson extrapolations
/// over steps h, h/2, h/4.
fn second_difference(v: impl Fn(f64) -> f64, h: f64) -> f64 {
    let v0 = v(0.0);
    let d = |h: f64| (v(h) - 2.0 * v0 + v(-h)) / (h * h);
    let (d0, d1, d2) = (d(h), d(h / 2.0), d(h / 4.0));
    let r1 = (4.0 * d1 - d0) / 3.0;
    let r2 = (4.0 * d2 - d1) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

fn boundary_tolerance_check(u: f64) -> Result<(), ProofError> {
    if u.abs() > 1e-8 {
        Err(ProofError::NotOnBoundary(u))
    } else {
        Ok(())
    }
}

pub fn proof_quantities_omega(
    f: &MapExpr,
    lambda: f64,
    zeta: Complex64,
) -> Result<ProofQuantitiesOmega, ProofError> {
    if lambda < 1.0 {
        return Err(ProofError::UnsupportedParameter(format!(
            "the strict-convexity chain requires lambda >= 1, got {lambda}"
        )));
    }
    let spec = LevelSpec::OmegaLambda { lambda };
    if lambda == 1.0 {
        let f0 = f.eval_value(Complex64::new(0.0, 0.0))?;
        if f0.norm() < 1e-12 {
            return Err(ProofError::ExcludedByHypothesis(
                "lambda = 1 with f(0) = 0 gives an empty region".into(),
            ));
        }
        if f.is_automorphism() {
            return Err(ProofError::ExcludedByHypothesis(
                "lambda = 1 with an automorphism: the boundary is a geodesic".into(),
            ));
        }
    }
    boundary_tolerance_check(potential_u(&spec, f, zeta)?)?;
    let zeta = snap_to_boundary(&spec, f, zeta)?;

    let n = normalize(f, zeta)?;
    let (z, b) = (n.zr, n.b);
    let degenerate = b < 1e-12;
    let c0 = -n.b1 / (1.0 - b * b);
    let c1 = -n.b2 / (1.0 - b * b) - b * c0 * c0;
    let a_coef = -(1.0 - b * b) * (b * c0 + z);
    if a_coef.norm() < 1e-14 {
        return Err(ProofError::ZeroGradient);
    }
    let kappa2 = -(b * c0.conj() + z) / (b * c0 + z);
    let mut kappa = kappa2.sqrt();
    if (a_coef * kappa).im <= 0.0 {
        kappa = -kappa;
    }
    let dz = 1.0 - z * z;
    let phi = dz * (lambda * c0.norm_sqr() - 1.0)
        + 2.0 * ((z * z - b * b * c0 * c0) * kappa2).re
        + 2.0 * b * c1.norm();
    let v2_analytic = 2.0
        * (lambda * dz * dz * (lambda * c0.norm_sqr() - 1.0)
            + 2.0 * (lambda * dz * (z * z - b * c1 - b * b * c0 * c0) * kappa2).re);

    let rot = Complex64::from_polar(1.0, n.t0);
    let v = |t: f64| {
        let w = t * kappa;
        let p = rot * (z + w) / (1.0 + z * w);
        potential_u(&spec, f, p).unwrap_or(f64::NAN)
    };
    let v2_numeric = second_difference(v, 1e-3);

    Ok(ProofQuantitiesOmega {
        lambda,
        zeta: z,
        b,
        b1: n.b1,
        b2: n.b2,
        c0,
        c1,
        a_coef,
        kappa,
        phi,
        v2_analytic,
        v2_numeric,
        degenerate_normalization: degenerate,
    })
}

pub fn proof_quantities_dmu(
    f: &MapExpr,
    mu: f64,
    zeta: Complex64,
) -> Result<ProofQuantitiesDMu, ProofError> {
    if mu >= 0.0 {
        return Err(ProofError::UnsupportedParameter(format!(
            "the strict-convexity chain requires mu < 0, got {mu}"
        )));
    }
    match dmu_nonempty(f, mu) {
        Ok(true) => {}
        Ok(false) => return Err(ProofError::EmptySet),
        Err(_) => return Err(ProofError::EmptySet),
    }
    let spec = LevelSpec::DMu { mu };
    boundary_tolerance_check(potential_u(&spec, f, zeta)?)?;
    let zeta = snap_to_boundary(&spec, f, zeta)?;

    let n = normalize(f, zeta)?;
    let (z, b) = (n.zr, n.b);
    if b <= z {
        return Err(ProofError::ExcludedByHypothesis(format!(
            "expected |f(zeta)| > |zeta| on the boundary, got b = {b}, zeta = {z}"
        )));
    }
    let c0 = -n.b1 / (1.0 - b * b);
    let c1 = -n.b2 / (1.0 - b * b) - b * c0 * c0;
    let dz = 1.0 - z * z;
    let a_coef = -dz * (1.0 - b * b) * (c0 + 1.0) / (1.0 - b * z);
    let c0p1 = c0 + 1.0;
    let r = c0p1.norm();
    if r < 1e-12 {
        return Err(ProofError::ZeroGradient);
    }
    let theta = c0p1.arg();
    let kappa = -I * Complex64::from_polar(1.0, -theta);
    let alpha = (1.0 + b * b) / (2.0 * b);
    let beta = alpha - (1.0 + z * z) / (2.0 * z);
    let p = |rr: f64| (alpha - 1.0) * rr * (rr - 2.0 * theta.cos()) + beta * theta.cos().powi(2);
    let bracket = alpha * r * r - 2.0 * alpha * r * theta.cos() + beta * theta.cos().powi(2)
        - (c1 * kappa * kappa).re;
    let scale = dz * (1.0 - b * b) / (1.0 - b * z);
    let v2_analytic = 2.0 * scale * bracket;

    let rot = Complex64::from_polar(1.0, n.t0);
    let v = |t: f64| {
        let w = t * kappa;
        let q = rot * (z + w) / (1.0 + z * w);
        potential_u(&spec, f, q).unwrap_or(f64::NAN)
    };
    let v2_numeric = second_difference(v, 1e-3);

    Ok(ProofQuantitiesDMu {
        mu,
        zeta: z,
        b,
        b1: n.b1,
        b2: n.b2,
        c0,
        c1,
        a_coef,
        theta,
        r,
        kappa,
        alpha,
        beta,
        p_at_0: p(0.0),
        p_at_2cos: p(2.0 * theta.cos()),
        v2_analytic,
        v2_numeric,
    })
}
