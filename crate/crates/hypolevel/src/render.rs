//! Serialization (JSON/CSV) and SVG rendering. JSON is the source of truth;
//! the SVG is always derived from the serialized region.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::convexity::{CampaignSummary, ConvexityReport, TrialOutcome, Verdict, Witness};
use crate::geodesic::Geodesic;
use crate::level_set::{LevelSpec, PhiKind, RegionSample};

pub const REGION_SCHEMA: &str = "hypolevel-region/1";
pub const REPORT_SCHEMA: &str = "hypolevel-convexity/1";

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn spec_to_json(spec: &LevelSpec) -> Value {
    match spec {
        LevelSpec::OmegaLambda { lambda } => json!({"family": "omega", "lambda": lambda}),
        LevelSpec::DMu { mu } => json!({"family": "dmu", "mu": mu}),
        LevelSpec::PhiMu { phi, mu } => {
            let name = match phi {
                PhiKind::Identity => "identity",
                PhiKind::LogCoshHalf => "log-cosh-half",
            };
            json!({"family": "phi", "phi": name, "mu": mu})
        }
    }
}

pub fn geodesic_to_json(g: &Geodesic) -> Value {
    match g {
        Geodesic::Diameter { direction } => {
            json!({"kind": "diameter", "direction": c_json(*direction)})
        }
        Geodesic::Arc { center, radius } => {
            json!({"kind": "arc", "center": c_json(*center), "radius": radius})
        }
    }
}

pub fn region_to_json(region: &RegionSample) -> Value {
    let contours: Vec<Value> = region
        .contours
        .iter()
        .map(|poly| Value::Array(poly.iter().map(|p| c_json(*p)).collect()))
        .collect();
    json!({
        "schema": REGION_SCHEMA,
        "spec": spec_to_json(&region.spec),
        "map": region.map,
        "resolution": region.resolution,
        "contours": contours,
        "contains_origin": region.contains_origin,
    })
}

/// `x,y` per vertex, polylines separated by blank lines.
pub fn region_to_csv(region: &RegionSample) -> String {
    let mut out = String::from("x,y\n");
    for (k, poly) in region.contours.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for p in poly {
            out.push_str(&format!("{},{}\n", p.re, p.im));
        }
    }
    out
}

fn witness_to_json(w: &Witness) -> Value {
    json!({
        "z1": c_json(w.z1),
        "z2": c_json(w.z2),
        "p": c_json(w.p),
        "u_z1": w.u_z1,
        "u_z2": w.u_z2,
        "u_p": w.u_p,
    })
}

pub fn report_to_json(r: &ConvexityReport) -> Value {
    json!({
        "schema": REPORT_SCHEMA,
        "verdict": match r.verdict {
            Verdict::NoViolationFound => "no_violation_found",
            Verdict::Violated => "violated",
        },
        "pairs_tested": r.pairs_tested,
        "witness": r.witness.as_ref().map(witness_to_json).unwrap_or(Value::Null),
        "min_interior_u": r.min_interior_u,
        "seed": r.seed,
    })
}

/// One trial per line: map, spec, verdict, margin, witness.
pub fn campaign_to_jsonl(s: &CampaignSummary) -> String {
    let mut out = String::new();
    for t in &s.trials {
        let line = json!({
            "index": t.index,
            "map": t.map,
            "spec": spec_to_json(&t.spec),
            "outcome": match t.outcome {
                TrialOutcome::NoViolationFound => "no_violation_found",
                TrialOutcome::Violated => "violated",
                TrialOutcome::SkippedEmpty => "skipped_empty",
                TrialOutcome::ExcludedByHypothesis => "excluded_by_hypothesis",
            },
            "min_interior_u": if t.min_interior_u.is_finite() {
                Value::from(t.min_interior_u)
            } else {
                Value::Null
            },
            "witness": t.witness.as_ref().map(witness_to_json).unwrap_or(Value::Null),
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub size_px: u32,
    pub geodesics: Vec<Geodesic>,
    pub points: Vec<Complex64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { size_px: 800, geodesics: Vec::new(), points: Vec::new() }
    }
}

/// Render a serialized region (the JSON form) plus optional overlays.
pub fn render_svg(region: &Value, opts: &RenderOptions) -> String {
    let size = opts.size_px as f64;
    let to_px = |p: Complex64| -> (f64, f64) {
        // [-1.1, 1.1]^2 mapped to [0, size]^2, y up
        ((p.re + 1.1) / 2.2 * size, (1.1 - p.im) / 2.2 * size)
    };
    let fmt = |v: f64| format!("{v:.3}");

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        opts.size_px
    ));
    svg.push_str(&format!(
        "<rect width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n",
        opts.size_px
    ));
    let (cx, cy) = to_px(Complex64::new(0.0, 0.0));
    svg.push_str(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        fmt(cx),
        fmt(cy),
        fmt(size / 2.2)
    ));

    if let Some(contours) = region.get("contours").and_then(|c| c.as_array()) {
        for poly in contours {
            let Some(pts) = poly.as_array() else { continue };
            let mut path = String::new();
            for p in pts {
                let (Some(x), Some(y)) = (
                    p.get(0).and_then(|v| v.as_f64()),
                    p.get(1).and_then(|v| v.as_f64()),
                ) else {
                    continue;
                };
                let (px, py) = to_px(Complex64::new(x, y));
                path.push_str(&format!("{},{} ", fmt(px), fmt(py)));
            }
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\"/>\n",
                path.trim_end()
            ));
        }
    }

    for g in &opts.geodesics {
        let pts = sample_geodesic(g, 129);
        let mut path = String::new();
        for p in pts {
            let (px, py) = to_px(p);
            path.push_str(&format!("{},{} ", fmt(px), fmt(py)));
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.2\" stroke-dasharray=\"5,3\"/>\n",
            path.trim_end()
        ));
    }

    for p in &opts.points {
        let (px, py) = to_px(*p);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#d62728\"/>\n",
            fmt(px),
            fmt(py)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

/// Points tracing the portion of a geodesic inside the closed disk.
pub fn sample_geodesic(g: &Geodesic, n: usize) -> Vec<Complex64> {
    match g {
        Geodesic::Diameter { direction } => {
            let d = direction / direction.norm();
            (0..n)
                .map(|k| {
                    let t = -1.0 + 2.0 * k as f64 / (n - 1) as f64;
                    t * d
                })
                .collect()
        }
        Geodesic::Arc { center, radius } => {
            // ideal endpoints: cos(psi - arg c) = 1/|c| on the unit circle
            let half = (1.0 / center.norm()).acos();
            let t = center.arg();
            let (e1, e2) = (
                Complex64::from_polar(1.0, t - half),
                Complex64::from_polar(1.0, t + half),
            );
            let (a1, a2) = ((e1 - center).arg(), (e2 - center).arg());
            // sweep the short way round (the side whose midpoint is in the disk)
            let mut delta = a2 - a1;
            while delta > std::f64::consts::PI {
                delta -= 2.0 * std::f64::consts::PI;
            }
            while delta < -std::f64::consts::PI {
                delta += 2.0 * std::f64::consts::PI;
            }
            (0..n)
                .map(|k| {
                    let a = a1 + delta * k as f64 / (n - 1) as f64;
                    center + Complex64::from_polar(*radius, a)
                })
                .collect()
        }
    }
}
