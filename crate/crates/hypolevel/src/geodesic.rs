//! Hyperbolic geodesics of the disk: diameters and circular arcs orthogonal
//! to the unit circle.

use num_complex::Complex64;
use thiserror::Error;

use crate::hyp_core::{DiskPoint, MoebiusAutomorphism};

#[derive(Debug, Error, PartialEq)]
pub enum GeodesicError {
    #[error("the two points coincide, no unique geodesic")]
    CoincidentPoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geodesic {
    Diameter { direction: Complex64 },
    Arc { center: Complex64, radius: f64 },
}

impl Geodesic {
    /// Distance from `p` to the curve carrier (0 iff on the geodesic's
    /// circle/line; the residual used by invariants).
    pub fn residual(&self, p: Complex64) -> f64 {
        match self {
            Geodesic::Diameter { direction } => (p * direction.conj()).im.abs(),
            Geodesic::Arc { center, radius } => ((p - center).norm() - radius).abs(),
        }
    }

    /// |center|^2 - radius^2 - 1 for arcs (orthogonality defect), 0 for diameters.
    pub fn orthogonality_defect(&self) -> f64 {
        match self {
            Geodesic::Diameter { .. } => 0.0,
            Geodesic::Arc { center, radius } => center.norm_sqr() - radius * radius - 1.0,
        }
    }

    /// Euclidean unit tangent at a point assumed to lie on the geodesic.
    pub fn tangent_at(&self, p: Complex64) -> Complex64 {
        match self {
            Geodesic::Diameter { direction } => *direction,
            Geodesic::Arc { center, .. } => {
                let radial = p - center;
                let t = Complex64::new(0.0, 1.0) * radial;
                t / t.norm()
            }
        }
    }
}

/// Flip the sign so a unit vector has re > 0, or re == 0 and im > 0.
fn canonical_direction(d: Complex64) -> Complex64 {
    let d = d / d.norm();
    if d.re < 0.0 || (d.re == 0.0 && d.im < 0.0) {
        -d
    } else {
        d
    }
}

const COLLINEAR_TOL: f64 = 1e-10;

fn is_collinear_with_origin(z1: Complex64, z2: Complex64) -> bool {
    (z1 * z2.conj()).im.abs() < COLLINEAR_TOL * (z1 - z2).norm()
}

/// The unique geodesic through two distinct points.
///
/// Classification (diameter vs arc) happens on the almost-collinear tie rule;
/// arc centers come from the two orthogonality equations
/// `2 Re(conj(c) z) = 1 + |z|^2`, so `|c|^2 = r^2 + 1` holds by construction.
pub fn geodesic_through(z1: DiskPoint, z2: DiskPoint) -> Result<Geodesic, GeodesicError> {
    let (p, q) = (z1.value(), z2.value());
    if (p - q).norm() <= 1e-12 {
        return Err(GeodesicError::CoincidentPoints);
    }
    if is_collinear_with_origin(p, q) {
        return Ok(Geodesic::Diameter { direction: canonical_direction(q - p) });
    }
    // 2(x1 cx + y1 cy) = 1 + |z1|^2, 2(x2 cx + y2 cy) = 1 + |z2|^2
    let (a11, a12, b1) = (2.0 * p.re, 2.0 * p.im, 1.0 + p.norm_sqr());
    let (a21, a22, b2) = (2.0 * q.re, 2.0 * q.im, 1.0 + q.norm_sqr());
    let det = a11 * a22 - a12 * a21;
    let cx = (b1 * a22 - b2 * a12) / det;
    let cy = (a11 * b2 - a21 * b1) / det;
    let center = Complex64::new(cx, cy);
    let radius = (center.norm_sqr() - 1.0).sqrt();
    Ok(Geodesic::Arc { center, radius })
}

/// Points along the geodesic segment between `z1` and `z2`, equally spaced in
/// hyperbolic arclength. Endpoints are returned exactly.
pub fn segment_sample(
    z1: DiskPoint,
    z2: DiskPoint,
    n: usize,
) -> Result<Vec<DiskPoint>, GeodesicError> {
    assert!(n >= 2, "segment_sample needs n >= 2");
    let (p, q) = (z1.value(), z2.value());
    if (p - q).norm() <= 1e-12 {
        return Err(GeodesicError::CoincidentPoints);
    }
    let t = MoebiusAutomorphism::new(p, 0.0).expect("disk point");
    let w = t.apply_raw(q);
    let rho = w.norm();
    let dir = w / rho;
    let total = rho.atanh();
    let inv = t.inverse();
    let mut out = Vec::with_capacity(n);
    out.push(z1);
    for k in 1..n - 1 {
        let r = (total * k as f64 / (n - 1) as f64).tanh();
        out.push(DiskPoint::clamped(inv.apply_raw(r * dir)));
    }
    out.push(z2);
    Ok(out)
}

/// Interior samples of the segment streamed to a callback, avoiding the Vec.
/// Used by the convexity hot loop. The callback receives (t in (0,1), point).
pub fn segment_scan(
    z1: Complex64,
    z2: Complex64,
    n: usize,
    mut visit: impl FnMut(f64, Complex64),
) {
    let t = MoebiusAutomorphism { a: z1, theta: 0.0 };
    let w = t.apply_raw(z2);
    let rho = w.norm().min(1.0 - 1e-12);
    let dir = w / w.norm();
    let total = rho.atanh();
    let inv = t.inverse();
    for k in 1..n - 1 {
        let frac = k as f64 / (n - 1) as f64;
        let r = (total * frac).tanh();
        visit(frac, inv.apply_raw(r * dir));
    }
}

/// The point at parameter `t` in [0,1] (hyperbolic-arclength fraction) of the
/// segment from `z1` to `z2`.
pub fn segment_point(z1: Complex64, z2: Complex64, t: f64) -> Complex64 {
    let aut = MoebiusAutomorphism { a: z1, theta: 0.0 };
    let w = aut.apply_raw(z2);
    let rho = w.norm().min(1.0 - 1e-12);
    let dir = w / w.norm();
    let r = (rho.atanh() * t).tanh();
    aut.inverse().apply_raw(r * dir)
}

/// Geodesic through `zeta` whose tangent there is orthogonal to `direction`
/// (a unit vector, e.g. a gradient direction).
pub fn orthogonal_geodesic(zeta: DiskPoint, direction: Complex64) -> Geodesic {
    let z = zeta.value();
    let d = direction / direction.norm();
    if z.norm() < 1e-12 {
        return Geodesic::Diameter { direction: canonical_direction(Complex64::new(0.0, 1.0) * d) };
    }
    let proj = 2.0 * (z * d.conj()).re;
    if proj.abs() < 1e-12 * (1.0 - z.norm_sqr()) {
        // gradient orthogonal to the radius: the tangent is radial
        return Geodesic::Diameter { direction: canonical_direction(z) };
    }
    let s = (1.0 - z.norm_sqr()) / proj;
    Geodesic::Arc { center: z + s * d, radius: s.abs() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_core::hyp_distance;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    #[test]
    fn diameters() {
        match geodesic_through(p(0.5, 0.0), p(-0.5, 0.0)).unwrap() {
            Geodesic::Diameter { direction } => {
                assert!((direction - Complex64::new(1.0, 0.0)).norm() < 1e-12)
            }
            g => panic!("expected diameter, got {g:?}"),
        }
        match geodesic_through(DiskPoint::origin(), p(0.0, 0.3)).unwrap() {
            Geodesic::Diameter { direction } => {
                assert!((direction - Complex64::new(0.0, 1.0)).norm() < 1e-12)
            }
            g => panic!("expected diameter, got {g:?}"),
        }
    }

    #[test]
    fn arc_through_quarter_points() {
        let g = geodesic_through(p(0.5, 0.0), p(0.0, 0.5)).unwrap();
        match g {
            Geodesic::Arc { center, radius } => {
                assert!((center - Complex64::new(1.25, 1.25)).norm() < 1e-12);
                assert!((radius - 2.125f64.sqrt()).abs() < 1e-12);
                assert!(g.orthogonality_defect().abs() < 1e-10);
            }
            g => panic!("expected arc, got {g:?}"),
        }
    }

    #[test]
    fn coincident_points_rejected() {
        assert_eq!(
            geodesic_through(p(0.1, 0.1), p(0.1, 0.1)),
            Err(GeodesicError::CoincidentPoints)
        );
    }

    #[test]
    fn radial_sample_midpoint() {
        let r = 0.8;
        let s = segment_sample(DiskPoint::origin(), p(r, 0.0), 3).unwrap();
        assert_eq!(s[0].value(), Complex64::new(0.0, 0.0));
        assert_eq!(s[2].value(), Complex64::new(r, 0.0));
        let m = (r.atanh() / 2.0).tanh();
        assert!((s[1].value() - Complex64::new(m, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn symmetric_sample() {
        let s = segment_sample(p(0.5, 0.0), p(-0.5, 0.0), 5).unwrap();
        for k in 0..5 {
            assert!((s[k].value() + s[4 - k].value()).norm() < 1e-12);
        }
    }

    #[test]
    fn samples_lie_on_geodesic_and_are_equispaced() {
        let (z1, z2) = (p(0.5, 0.0), p(0.0, 0.5));
        let g = geodesic_through(z1, z2).unwrap();
        let s = segment_sample(z1, z2, 33).unwrap();
        let mut gaps = Vec::new();
        for w in &s {
            assert!(g.residual(w.value()) < 1e-9);
        }
        for k in 1..s.len() {
            gaps.push(hyp_distance(s[k - 1], s[k]));
        }
        let g0 = gaps[0];
        for gap in gaps {
            assert!((gap - g0).abs() / g0 < 1e-6);
        }
    }

    #[test]
    fn betweenness_additivity() {
        let (z1, z2) = (p(0.3, -0.4), p(-0.2, 0.6));
        let total = hyp_distance(z1, z2);
        for w in segment_sample(z1, z2, 17).unwrap() {
            let sum = hyp_distance(z1, w) + hyp_distance(w, z2);
            assert!((sum - total).abs() < 1e-9);
        }
    }

    #[test]
    fn orthogonal_geodesic_cases() {
        match orthogonal_geodesic(DiskPoint::origin(), Complex64::new(1.0, 0.0)) {
            Geodesic::Diameter { direction } => {
                assert!((direction - Complex64::new(0.0, 1.0)).norm() < 1e-12)
            }
            g => panic!("{g:?}"),
        }
        match orthogonal_geodesic(p(0.5, 0.0), Complex64::new(1.0, 0.0)) {
            Geodesic::Arc { center, radius } => {
                assert!((center - Complex64::new(1.25, 0.0)).norm() < 1e-12);
                assert!((radius - 0.75).abs() < 1e-12);
            }
            g => panic!("{g:?}"),
        }
        match orthogonal_geodesic(p(0.0, 0.5), Complex64::new(0.0, 1.0)) {
            Geodesic::Arc { center, radius } => {
                assert!((center - Complex64::new(0.0, 1.25)).norm() < 1e-12);
                assert!((radius - 0.75).abs() < 1e-12);
            }
            g => panic!("{g:?}"),
        }
    }

    #[test]
    fn orthogonal_tangent_is_perpendicular() {
        for (z, d) in [
            (p(0.3, 0.2), Complex64::new(0.6, 0.8)),
            (p(-0.5, 0.1), Complex64::new(0.0, 1.0)),
            (p(0.0, -0.7), Complex64::new(1.0, 0.0)),
        ] {
            let g = orthogonal_geodesic(z, d);
            assert!(g.residual(z.value()) < 1e-10);
            let t = g.tangent_at(z.value());
            assert!((t * d.conj()).re.abs() < 1e-10, "{g:?}");
        }
    }
}
