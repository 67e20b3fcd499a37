//! Hyperbolic-convexity verification: geodesic-segment sampling with refined
//! witnesses, boundary support tests, and randomized falsification campaigns.

mod proofs;

pub use proofs::{
    proof_quantities_dmu, proof_quantities_omega, ProofError, ProofQuantitiesDMu,
    ProofQuantitiesOmega,
};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geodesic::{orthogonal_geodesic, segment_point, segment_scan, Geodesic};
use crate::hyp_core::{BoundaryPoint, DiskPoint, MoebiusAutomorphism, EPS_BOUNDARY};
use crate::level_set::{dmu_nonempty, grad_u, potential_u, LevelSetError, LevelSpec};
use crate::map_dsl::{EvalError, MapExpr};

#[derive(Debug, Error)]
pub enum ConvexityError {
    #[error("the region is empty (no interior point found)")]
    EmptyRegion,
    #[error("the region is the whole disk")]
    WholeDisk,
    #[error("the potential gradient vanishes at the given boundary point")]
    ZeroGradient,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    LevelSet(#[from] LevelSetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoViolationFound,
    Violated,
}

/// A geodesic segment whose interior leaves the region: endpoints are
/// interior points (u > 10 tol) while the refined point p has u <= tol.
#[derive(Debug, Clone, Copy)]
pub struct Witness {
    pub z1: Complex64,
    pub z2: Complex64,
    pub p: Complex64,
    pub u_z1: f64,
    pub u_z2: f64,
    pub u_p: f64,
}

#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub verdict: Verdict,
    pub pairs_tested: usize,
    pub witness: Option<Witness>,
    /// Minimum of u over all tested interior geodesic points.
    pub min_interior_u: f64,
    pub seed: u64,
}

/// splitmix64 finalizer: decorrelated per-trial RNG streams from (seed, k).
pub(crate) fn mix(seed: u64, k: u64) -> u64 {
    let mut x = seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn uniform_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = 0.999 * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, 2.0 * std::f64::consts::PI * rng.gen::<f64>())
}

/// Boundary-biased sample: uniform hyperbolic radius up to distance 6, so
/// near-rim annuli are as likely as the center.
fn hyperbolic_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = (3.0 * rng.gen::<f64>()).tanh();
    Complex64::from_polar(r, 2.0 * std::f64::consts::PI * rng.gen::<f64>())
}

/// Deterministic interior point used to seed shrinking-ball fallback
/// sampling for very small regions.
fn find_anchor(spec: &LevelSpec, f: &MapExpr, margin: f64) -> Option<Complex64> {
    let origin = Complex64::new(0.0, 0.0);
    if potential_u(spec, f, origin).map(|u| u > margin).unwrap_or(false) {
        return Some(origin);
    }
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for k in 0..40_000 {
        let z = Complex64::from_polar(
            0.9999 * (((k as f64) + 0.5) / 40_000.0).sqrt(),
            golden * k as f64,
        );
        if potential_u(spec, f, z).map(|u| u > margin).unwrap_or(false) {
            return Some(z);
        }
    }
    None
}

/// Slide an interior point along `dir` until u is about to drop below
/// `margin`, i.e. just inside the region's boundary (or the disk rim).
/// Returns the last point with u > margin.
fn push_toward_boundary(
    spec: &LevelSpec,
    f: &MapExpr,
    z: Complex64,
    dir: Complex64,
    margin: f64,
) -> Complex64 {
    let in_region = |w: Complex64| {
        w.norm() < 1.0 - EPS_BOUNDARY
            && potential_u(spec, f, w).map(|u| u > margin).unwrap_or(false)
    };
    let steps = 256;
    let mut lo = z;
    let mut bracket = None;
    for s in 1..=steps {
        let w = z + dir * (2.0 * s as f64 / steps as f64);
        if in_region(w) {
            lo = w;
        } else {
            bracket = Some((lo, w));
            break;
        }
    }
    let Some((mut lo, mut hi)) = bracket else { return lo };
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if in_region(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn draw_in_point(
    spec: &LevelSpec,
    f: &MapExpr,
    rng: &mut ChaCha8Rng,
    margin: f64,
    anchor: Complex64,
) -> Complex64 {
    for attempt in 0..400 {
        let z = if attempt % 2 == 0 { uniform_disk(rng) } else { hyperbolic_disk(rng) };
        if potential_u(spec, f, z).map(|u| u > margin).unwrap_or(false) {
            // Most endpoints are pushed in a random direction until they hug
            // the region boundary: segments between interior points rarely
            // straddle a non-convex "bite", while segments between
            // near-boundary points (including ones near the corners where a
            // bite meets the rim) do.
            if rng.gen::<f64>() < 0.75 {
                let dir = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.gen::<f64>());
                return push_toward_boundary(spec, f, z, dir, margin);
            }
            return z;
        }
    }
    // region too small for rejection sampling: shrink toward the anchor
    let to_anchor = MoebiusAutomorphism { a: anchor, theta: 0.0 }.inverse();
    let mut scale = 0.5;
    for _ in 0..80 {
        let z = to_anchor.apply_raw(scale * uniform_disk(rng));
        if potential_u(spec, f, z).map(|u| u > margin).unwrap_or(false) {
            return z;
        }
        scale *= 0.8;
    }
    anchor
}

fn golden_min(mut g: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..iters {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + phi * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 <= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

/// Refined interior minima at or below this value count as violations even
/// when not genuinely negative: it is the rounding scale of the potentials,
/// and a boundary-touching segment (e.g. one crossing a slit where u = 0
/// exactly) bottoms out here.
const TOUCH_TOL: f64 = 1e-13;

struct PairOutcome {
    min_u: f64,
    witness: Option<Witness>,
}

fn scan_segment(
    spec: &LevelSpec,
    f: &MapExpr,
    z1: Complex64,
    z2: Complex64,
    u1: f64,
    u2: f64,
    n_segment: usize,
    tol: f64,
) -> PairOutcome {
    let u_at = |z: Complex64| potential_u(spec, f, z).unwrap_or(f64::NEG_INFINITY);
    let mut ts = Vec::with_capacity(n_segment);
    let mut us = Vec::with_capacity(n_segment);
    ts.push(0.0);
    us.push(u1);
    segment_scan(z1, z2, n_segment, |t, p| {
        ts.push(t);
        us.push(u_at(p));
    });
    ts.push(1.0);
    us.push(u2);

    let mut min_u = f64::INFINITY;
    for &u in &us[1..us.len() - 1] {
        min_u = min_u.min(u);
    }
    let mut witness = None;

    let g = |t: f64| u_at(segment_point(z1, z2, t));
    for i in 1..us.len() - 1 {
        if us[i] <= us[i - 1] && us[i] <= us[i + 1] {
            let (t_min, u_min) = golden_min(g, ts[i - 1], ts[i + 1], 80);
            min_u = min_u.min(u_min);
            if u_min <= tol && witness.is_none() {
                // 10x refined re-check before reporting
                let fine = 10 * n_segment;
                let mut best = (t_min, u_min);
                for k in 1..fine {
                    let t = k as f64 / fine as f64;
                    let u = g(t);
                    if u < best.1 {
                        best = (t, u);
                    }
                }
                let dt = 1.0 / fine as f64;
                let (t_p, u_p) =
                    golden_min(g, (best.0 - dt).max(0.0), (best.0 + dt).min(1.0), 100);
                min_u = min_u.min(u_p);
                // Violation: the refined minimum either goes genuinely
                // negative or touches zero at rounding scale. The gap between
                // TOUCH_TOL and the endpoint margin (10 tol) rules out false
                // positives from mere near-boundary dips.
                if u_p <= TOUCH_TOL {
                    witness = Some(Witness {
                        z1,
                        z2,
                        p: segment_point(z1, z2, t_p),
                        u_z1: u1,
                        u_z2: u2,
                        u_p,
                    });
                }
            }
        }
    }
    PairOutcome { min_u, witness }
}

/// Test hyperbolic convexity by sampling pairs of interior points and
/// scanning the geodesic segment between them. A violation is an interior
/// local minimum of u that refines to u <= tol while both endpoints have
/// u > 10 tol; this catches both sign changes and boundary-touching slits.
pub fn check_h_convex(
    spec: &LevelSpec,
    f: &MapExpr,
    n_pairs: usize,
    n_segment: usize,
    tol: f64,
    seed: u64,
) -> Result<ConvexityReport, ConvexityError> {
    let margin = 10.0 * tol;
    let anchor = find_anchor(spec, f, margin).ok_or(ConvexityError::EmptyRegion)?;

    let outcomes: Vec<PairOutcome> = (0..n_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, k as u64));
            let z1 = draw_in_point(spec, f, &mut rng, margin, anchor);
            let z2 = draw_in_point(spec, f, &mut rng, margin, anchor);
            if (z1 - z2).norm() < 1e-9 {
                return PairOutcome { min_u: f64::INFINITY, witness: None };
            }
            let u1 = potential_u(spec, f, z1).unwrap_or(f64::NEG_INFINITY);
            let u2 = potential_u(spec, f, z2).unwrap_or(f64::NEG_INFINITY);
            scan_segment(spec, f, z1, z2, u1, u2, n_segment, tol)
        })
        .collect();

    let mut min_u = f64::INFINITY;
    let mut witness = None;
    for o in outcomes {
        min_u = min_u.min(o.min_u);
        if witness.is_none() {
            witness = o.witness;
        }
    }
    Ok(ConvexityReport {
        verdict: if witness.is_some() { Verdict::Violated } else { Verdict::NoViolationFound },
        pairs_tested: n_pairs,
        witness,
        min_interior_u: min_u,
        seed,
    })
}

/// Boundary points found by root-finding u = 0 along rays from the origin.
/// Rays that never leave the region are skipped; if none cross, the region
/// is the whole disk.
pub fn boundary_points(
    spec: &LevelSpec,
    f: &MapExpr,
    n: usize,
) -> Result<Vec<DiskPoint>, ConvexityError> {
    let u = |z: Complex64| potential_u(spec, f, z);
    if u(Complex64::new(0.0, 0.0))? <= 0.0 {
        return Err(ConvexityError::EmptyRegion);
    }
    let r_max = 1.0 - EPS_BOUNDARY;
    let steps = 2048;
    let mut out = Vec::new();
    for k in 0..n {
        let dir = BoundaryPoint::new(2.0 * std::f64::consts::PI * k as f64 / n as f64).value();
        let mut bracket = None;
        let mut prev = 0.0;
        for s in 1..=steps {
            let r = r_max * s as f64 / steps as f64;
            // strictly-below-rounding threshold, so potentials that are
            // exactly 0 up to noise near the rim do not fake a crossing
            if u(r * dir)? <= -TOUCH_TOL {
                bracket = Some((prev, r));
                break;
            }
            prev = r;
        }
        let Some((mut lo, mut hi)) = bracket else { continue };
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let um = u(mid * dir)?;
            if um.abs() <= 1e-11 {
                break;
            }
            if um > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(DiskPoint::clamped(mid * dir));
    }
    if out.is_empty() {
        return Err(ConvexityError::WholeDisk);
    }
    Ok(out)
}

/// Local supporting-geodesic test at a boundary point: the geodesic through
/// zeta orthogonal to the gradient must stay strictly outside the closed
/// region within the epsilon-ball (a 1e-6 core around zeta excluded).
pub fn support_test(
    spec: &LevelSpec,
    f: &MapExpr,
    zeta: DiskPoint,
    eps: f64,
) -> Result<bool, ConvexityError> {
    let g = grad_u(spec, f, zeta.value()).map_err(|_| ConvexityError::ZeroGradient)?;
    if g.norm() < 1e-12 {
        return Err(ConvexityError::ZeroGradient);
    }
    let geo = orthogonal_geodesic(zeta, g / g.norm());
    let z = zeta.value();
    let n_per_side = 24;
    let s_min: f64 = 3e-6;
    let ratio = (eps / s_min).powf(1.0 / (n_per_side - 1) as f64);
    for side in [-1.0, 1.0] {
        let mut s = s_min;
        for _ in 0..n_per_side {
            let p = match geo {
                Geodesic::Diameter { direction } => z + side * s * direction,
                Geodesic::Arc { center, radius } => {
                    let phi0 = (z - center).arg();
                    center + Complex64::from_polar(radius, phi0 + side * s / radius)
                }
            };
            if p.norm() < 1.0 - EPS_BOUNDARY {
                let u = potential_u(spec, f, p)?;
                // strict negativity scaled to the expected quadratic decay,
                // so roundoff on a geodesic boundary reads as "not outside"
                if u >= -1e-10 * s * s {
                    return Ok(false);
                }
            }
            s *= ratio;
        }
    }
    Ok(true)
}

/// Random Blaschke-product family used by campaigns: degree, zero modulus
/// cap, and optional constraints keeping the theorem hypotheses satisfiable.
#[derive(Debug, Clone, Copy)]
pub struct MapFamily {
    pub degree_min: usize,
    pub degree_max: usize,
    pub max_zero_modulus: f64,
    pub require_f0_nonzero: bool,
}

impl Default for MapFamily {
    fn default() -> Self {
        MapFamily { degree_min: 1, degree_max: 5, max_zero_modulus: 0.9, require_f0_nonzero: false }
    }
}

impl MapFamily {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> MapExpr {
        let degree = rng.gen_range(self.degree_min..=self.degree_max);
        let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let mut zeros = Vec::with_capacity(degree);
        while zeros.len() < degree {
            let z = Complex64::from_polar(
                self.max_zero_modulus * rng.gen::<f64>().sqrt(),
                2.0 * std::f64::consts::PI * rng.gen::<f64>(),
            );
            if self.require_f0_nonzero && z.norm() < 0.05 {
                continue;
            }
            zeros.push(z);
        }
        MapExpr::Blaschke { theta, zeros }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    NoViolationFound,
    Violated,
    SkippedEmpty,
    ExcludedByHypothesis,
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub index: usize,
    pub map: String,
    pub spec: LevelSpec,
    pub outcome: TrialOutcome,
    pub min_interior_u: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct CampaignSummary {
    pub trials: Vec<TrialRecord>,
    pub tested: usize,
    pub violations: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub family: MapFamily,
    pub specs: Vec<LevelSpec>,
    pub maps: usize,
    pub n_pairs: usize,
    pub n_segment: usize,
    pub tol: f64,
    pub seed: u64,
}

/// Run check_h_convex over a random map pool crossed with the given specs.
/// Deterministic for a given seed at any parallelism level: every map and
/// every trial draws from its own (seed, index)-derived stream.
pub fn falsification_campaign(cfg: &CampaignConfig) -> CampaignSummary {
    let maps: Vec<MapExpr> = (0..cfg.maps)
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0x4d61_5000 + m as u64));
            cfg.family.sample(&mut rng)
        })
        .collect();

    let trials: Vec<(usize, usize)> = (0..cfg.maps)
        .flat_map(|m| (0..cfg.specs.len()).map(move |s| (m, s)))
        .collect();

    let records: Vec<TrialRecord> = trials
        .par_iter()
        .map(|&(m, s)| {
            let index = m * cfg.specs.len() + s;
            let f = &maps[m];
            let spec = cfg.specs[s];
            let outcome = classify_trial(&spec, f, cfg, index);
            match outcome {
                Ok(report) => TrialRecord {
                    index,
                    map: f.unparse(),
                    spec,
                    outcome: match report.verdict {
                        Verdict::Violated => TrialOutcome::Violated,
                        Verdict::NoViolationFound => TrialOutcome::NoViolationFound,
                    },
                    min_interior_u: report.min_interior_u,
                    witness: report.witness,
                },
                Err(outcome) => TrialRecord {
                    index,
                    map: f.unparse(),
                    spec,
                    outcome,
                    min_interior_u: f64::INFINITY,
                    witness: None,
                },
            }
        })
        .collect();

    let tested = records
        .iter()
        .filter(|r| {
            matches!(r.outcome, TrialOutcome::NoViolationFound | TrialOutcome::Violated)
        })
        .count();
    let violations = records.iter().filter(|r| r.outcome == TrialOutcome::Violated).count();
    let skipped = records.len() - tested;
    CampaignSummary { trials: records, tested, violations, skipped }
}

fn classify_trial(
    spec: &LevelSpec,
    f: &MapExpr,
    cfg: &CampaignConfig,
    index: usize,
) -> Result<ConvexityReport, TrialOutcome> {
    match spec {
        LevelSpec::OmegaLambda { lambda } if *lambda == 1.0 => {
            let f0 = f
                .eval_value(Complex64::new(0.0, 0.0))
                .map_err(|_| TrialOutcome::SkippedEmpty)?;
            if f0.norm() < 1e-12 || f.is_automorphism() {
                return Err(TrialOutcome::ExcludedByHypothesis);
            }
        }
        LevelSpec::DMu { mu } if *mu < 0.0 => {
            if !dmu_nonempty(f, *mu).unwrap_or(false) {
                return Err(TrialOutcome::SkippedEmpty);
            }
        }
        _ => {}
    }
    check_h_convex(spec, f, cfg.n_pairs, cfg.n_segment, cfg.tol, mix(cfg.seed, index as u64))
        .map_err(|e| match e {
            ConvexityError::EmptyRegion => TrialOutcome::SkippedEmpty,
            _ => TrialOutcome::SkippedEmpty,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_dsl::parse;

    #[test]
    fn round_disk_has_no_violation() {
        let f = parse("z^2").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 1.5 };
        let rep = check_h_convex(&spec, &f, 500, 64, 1e-9, 7).unwrap();
        assert_eq!(rep.verdict, Verdict::NoViolationFound);
        assert_eq!(rep.pairs_tested, 500);
        assert!(rep.witness.is_none());
        assert!(rep.min_interior_u > 0.0);
    }

    #[test]
    fn subunit_lambda_automorphism_is_violated() {
        let f = parse("aut(-0.5, 0)").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 0.8 };
        let rep = check_h_convex(&spec, &f, 500, 64, 1e-9, 11).unwrap();
        assert_eq!(rep.verdict, Verdict::Violated);
        let w = rep.witness.unwrap();
        assert!(w.u_z1 > 1e-8 && w.u_z2 > 1e-8);
        assert!(w.u_p <= 1e-9, "{}", w.u_p);
    }

    #[test]
    fn positive_mu_slit_is_violated_on_the_slit() {
        let b = 0.25f64.tanh();
        let f = parse(&format!("aut({b}, 0)")).unwrap();
        let spec = LevelSpec::DMu { mu: 0.5 };
        let rep = check_h_convex(&spec, &f, 500, 64, 1e-9, 3).unwrap();
        assert_eq!(rep.verdict, Verdict::Violated);
        let w = rep.witness.unwrap();
        assert!(w.p.im.abs() < 1e-6, "witness should sit on the slit: {}", w.p);
        assert!(w.p.re > b && w.p.re < 1.0, "{}", w.p);
    }

    #[test]
    fn empty_region_is_an_error() {
        let f = parse("id").unwrap();
        let spec = LevelSpec::DMu { mu: -0.5 };
        assert!(matches!(
            check_h_convex(&spec, &f, 10, 16, 1e-9, 1),
            Err(ConvexityError::EmptyRegion)
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let f = parse("blaschke(0.4; 0.5, -0.2)").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 1.2 };
        let a = check_h_convex(&spec, &f, 60, 32, 1e-9, 42).unwrap();
        let b = check_h_convex(&spec, &f, 60, 32, 1e-9, 42).unwrap();
        assert_eq!(a.min_interior_u.to_bits(), b.min_interior_u.to_bits());
    }

    #[test]
    fn boundary_points_examples() {
        let f = parse("z^2").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 1.5 };
        let pts = boundary_points(&spec, &f, 8).unwrap();
        assert_eq!(pts.len(), 8);
        for p in &pts {
            assert!((p.value().norm() - 0.5f64.sqrt()).abs() < 1e-9);
            let u = potential_u(&spec, &f, p.value()).unwrap();
            assert!(u.abs() <= 1e-10, "{u}");
        }

        let f = parse("aut(-0.5, 0)").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 1.0 };
        for p in boundary_points(&spec, &f, 8).unwrap() {
            let d = (p.value() - Complex64::new(-2.0, 0.0)).norm();
            assert!((d - 3f64.sqrt()).abs() < 1e-8, "{d}");
        }

        let f = parse("z^2").unwrap();
        assert!(matches!(
            boundary_points(&LevelSpec::OmegaLambda { lambda: 2.0 }, &f, 8),
            Err(ConvexityError::WholeDisk)
        ));
    }

    #[test]
    fn support_test_examples() {
        let f = parse("z^2").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 1.5 };
        let zeta = DiskPoint::from_re_im(0.5f64.sqrt(), 0.0).unwrap();
        assert!(support_test(&spec, &f, zeta, 0.1).unwrap());

        // automorphism at lambda = 1: the boundary is itself a geodesic,
        // so the tangent geodesic stays in the closure
        let f = parse("aut(-0.5, 0)").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 1.0 };
        // only the ray toward -1 crosses the circle |z + 2| = sqrt(3)
        let zeta = boundary_points(&spec, &f, 4).unwrap()[0];
        assert!(!support_test(&spec, &f, zeta, 0.1).unwrap());

        let f = parse("(0.5 - z)/(1 - 0.5*z)").unwrap();
        let spec = LevelSpec::DMu { mu: -0.5 };
        let zeta = boundary_points(&spec, &f, 6).unwrap()[0];
        assert!(support_test(&spec, &f, zeta, 0.05).unwrap());
    }

    #[test]
    fn campaign_detects_subunit_lambda_family() {
        let cfg = CampaignConfig {
            family: MapFamily { degree_min: 1, degree_max: 1, ..Default::default() },
            specs: vec![LevelSpec::OmegaLambda { lambda: 0.8 }],
            maps: 10,
            n_pairs: 300,
            n_segment: 64,
            tol: 1e-9,
            seed: 5,
        };
        let summary = falsification_campaign(&cfg);
        // degree-1 Blaschke maps are automorphisms; at lambda < 1 every
        // nonempty region fails h-convexity
        assert_eq!(summary.violations, summary.tested, "{summary:?}");
        assert!(summary.tested >= 8);
    }

    #[test]
    fn campaign_clears_theorem_configurations() {
        let cfg = CampaignConfig {
            family: MapFamily::default(),
            specs: vec![
                LevelSpec::OmegaLambda { lambda: 1.1 },
                LevelSpec::OmegaLambda { lambda: 2.0 },
                LevelSpec::DMu { mu: -0.5 },
            ],
            maps: 8,
            n_pairs: 120,
            n_segment: 48,
            tol: 1e-9,
            seed: 23,
        };
        let summary = falsification_campaign(&cfg);
        assert_eq!(summary.violations, 0, "{:?}", summary.trials.iter().find(|t| t.outcome == TrialOutcome::Violated));
        assert!(summary.tested > 0);
    }

    #[test]
    fn campaign_is_deterministic() {
        let cfg = CampaignConfig {
            family: MapFamily::default(),
            specs: vec![LevelSpec::OmegaLambda { lambda: 1.5 }],
            maps: 6,
            n_pairs: 40,
            n_segment: 32,
            tol: 1e-9,
            seed: 99,
        };
        let a = falsification_campaign(&cfg);
        let b = falsification_campaign(&cfg);
        for (x, y) in a.trials.iter().zip(&b.trials) {
            assert_eq!(x.map, y.map);
            assert_eq!(x.outcome, y.outcome);
            assert_eq!(x.min_interior_u.to_bits(), y.min_interior_u.to_bits());
        }
    }
}
