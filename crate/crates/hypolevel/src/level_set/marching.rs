//! Contour extraction on a uniform grid over [-1,1]^2 with edge-crossing
//! refinement by bisection, then polyline chaining.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::hyp_core::EPS_BOUNDARY;
use crate::map_dsl::{EvalError, MapExpr};

use super::{potential_u, LevelSpec, RegionSample};

/// Extract the region bitmap and refined contours. Cells touching the rim
/// band |z| >= 1 - EPS_BOUNDARY are skipped (the contour is clipped there).
pub fn extract_region(
    spec: &LevelSpec,
    f: &MapExpr,
    resolution: usize,
    tol_contour: f64,
) -> Result<RegionSample, EvalError> {
    assert!(resolution >= 4, "resolution too small");
    let n = resolution;
    let h = 2.0 / n as f64;
    let coord = |k: usize| -1.0 + k as f64 * h;

    // node potentials; None outside the usable disk
    let node_u: Vec<Option<f64>> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let y = coord(j);
            (0..=n).map(move |i| (i, y))
        })
        .map(|(i, y)| {
            let z = Complex64::new(coord(i), y);
            if z.norm() >= 1.0 - EPS_BOUNDARY {
                None
            } else {
                potential_u(spec, f, z).ok()
            }
        })
        .collect();
    let node = |i: usize, j: usize| node_u[j * (n + 1) + i];

    // cell-center bitmaps
    let mut in_bitmap = vec![false; n * n];
    let mut inside_disk = vec![false; n * n];
    let centers: Vec<(bool, bool)> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let z = Complex64::new(coord(i) + 0.5 * h, coord(j) + 0.5 * h);
            if z.norm() >= 1.0 - EPS_BOUNDARY {
                return (false, false);
            }
            match potential_u(spec, f, z) {
                Ok(u) => (u > 0.0, true),
                Err(_) => (false, true),
            }
        })
        .collect();
    for (k, (inn, disk)) in centers.into_iter().enumerate() {
        in_bitmap[k] = inn;
        inside_disk[k] = disk;
    }

    // refined crossing on a grid edge, shared between the two adjacent cells.
    // key: (i, j, 0 = horizontal edge from node (i,j), 1 = vertical)
    let mut edge_vertex: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut vertices: Vec<Complex64> = Vec::new();
    let u_at = |z: Complex64| potential_u(spec, f, z).unwrap_or(f64::NEG_INFINITY);
    let mut crossing = |i: usize, j: usize, horiz: bool, ua: f64, ub: f64| -> usize {
        let key = (i, j, horiz as u8);
        if let Some(&v) = edge_vertex.get(&key) {
            return v;
        }
        let a = Complex64::new(coord(i), coord(j));
        let b = if horiz {
            Complex64::new(coord(i + 1), coord(j))
        } else {
            Complex64::new(coord(i), coord(j + 1))
        };
        let (mut pa, mut pb) = (a, b);
        let mut fa = ua;
        let mut mid = 0.5 * (pa + pb);
        for _ in 0..60 {
            mid = 0.5 * (pa + pb);
            let fm = u_at(mid);
            if fm.abs() <= tol_contour {
                break;
            }
            if (fm > 0.0) == (fa > 0.0) {
                pa = mid;
                fa = fm;
            } else {
                pb = mid;
            }
        }
        let _ = ub;
        let idx = vertices.len();
        vertices.push(mid);
        edge_vertex.insert(key, idx);
        idx
    };

    // per-cell segments as pairs of vertex indices
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let corners = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
            let Some([u0, u1, u2, u3]) = collect4(corners) else { continue };
            let mask = (u0 > 0.0) as u8
                | ((u1 > 0.0) as u8) << 1
                | ((u2 > 0.0) as u8) << 2
                | ((u3 > 0.0) as u8) << 3;
            if mask == 0 || mask == 15 {
                continue;
            }
            // edge ids: 0 bottom, 1 right, 2 top, 3 left
            let mut edge = |e: u8| -> usize {
                match e {
                    0 => crossing(i, j, true, u0, u1),
                    1 => crossing(i + 1, j, false, u1, u2),
                    2 => crossing(i, j + 1, true, u3, u2),
                    _ => crossing(i, j, false, u0, u3),
                }
            };
            let pairs: &[(u8, u8)] = match mask {
                1 => &[(3, 0)],
                2 => &[(0, 1)],
                3 => &[(3, 1)],
                4 => &[(1, 2)],
                6 => &[(0, 2)],
                7 => &[(3, 2)],
                8 => &[(2, 3)],
                9 => &[(0, 2)],
                11 => &[(1, 2)],
                12 => &[(3, 1)],
                13 => &[(0, 1)],
                14 => &[(3, 0)],
                5 | 10 => {
                    let center = Complex64::new(coord(i) + 0.5 * h, coord(j) + 0.5 * h);
                    let pos = u_at(center) > 0.0;
                    match (mask, pos) {
                        (5, true) => &[(3, 2), (1, 0)],
                        (5, false) => &[(3, 0), (1, 2)],
                        (10, true) => &[(0, 1), (2, 3)],
                        _ => &[(0, 3), (2, 1)],
                    }
                }
                _ => unreachable!(),
            };
            for &(ea, eb) in pairs {
                let (va, vb) = (edge(ea), edge(eb));
                segments.push((va, vb));
            }
        }
    }

    let contours = chain_polylines(&vertices, &segments);
    let origin_u = potential_u(spec, f, Complex64::new(0.0, 0.0))?;
    Ok(RegionSample {
        spec: *spec,
        map: f.unparse(),
        resolution: n,
        in_bitmap,
        inside_disk,
        contours,
        contains_origin: origin_u > 0.0,
    })
}

fn collect4(xs: [Option<f64>; 4]) -> Option<[f64; 4]> {
    Some([xs[0]?, xs[1]?, xs[2]?, xs[3]?])
}

/// Join segments sharing endpoints into polylines. Open chains start at
/// degree-1 vertices; remaining cycles are emitted closed (first point
/// repeated). Deterministic: chains start from the smallest eligible vertex.
fn chain_polylines(vertices: &[Complex64], segments: &[(usize, usize)]) -> Vec<Vec<Complex64>> {
    let mut adj: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push((b, s));
        adj.entry(b).or_default().push((a, s));
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let mut keys: Vec<usize> = adj.keys().copied().collect();
    keys.sort_unstable();

    let walk = |start: usize, used: &mut Vec<bool>| -> Vec<Complex64> {
        let mut path = vec![vertices[start]];
        let mut at = start;
        loop {
            let Some(next) = adj[&at].iter().find(|&&(_, s)| !used[s]) else { break };
            used[next.1] = true;
            at = next.0;
            path.push(vertices[at]);
        }
        path
    };

    for &k in &keys {
        if adj[&k].len() == 1 && adj[&k].iter().any(|&(_, s)| !used[s]) {
            out.push(walk(k, &mut used));
        }
    }
    for &k in &keys {
        if adj[&k].iter().any(|&(_, s)| !used[s]) {
            out.push(walk(k, &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level_set::{component_of_origin, LevelSetError};
    use crate::map_dsl::parse;

    #[test]
    fn omega_square_contour_is_a_circle() {
        let f = parse("z^2").unwrap();
        let spec = LevelSpec::OmegaLambda { lambda: 1.5 };
        let region = extract_region(&spec, &f, 256, 1e-9).unwrap();
        assert!(region.contains_origin);
        assert!(!region.contours.is_empty());
        let target = 0.5f64.sqrt();
        let mut n_pts = 0;
        for c in &region.contours {
            for p in c {
                assert!((p.norm() - target).abs() < 1e-6, "{p}");
                n_pts += 1;
            }
        }
        assert!(n_pts > 200);
        // contour vertices satisfy the potential tolerance
        for c in &region.contours {
            for p in c {
                let u = potential_u(&spec, &f, *p).unwrap();
                assert!(u.abs() <= 1e-9, "{u}");
            }
        }
    }

    #[test]
    fn omega_aut_contour_is_off_center_circle() {
        // aut(-0.5, 0) at lambda = 1: boundary is |z - z0| = sqrt(|z0|^2 - 1)
        // with z0 = -2, i.e. |z + 2| = sqrt(3).
        let f = parse("aut(-0.5, 0)").unwrap();
        let region =
            extract_region(&LevelSpec::OmegaLambda { lambda: 1.0 }, &f, 256, 1e-9).unwrap();
        assert!(region.contains_origin);
        let (z0, r) = (Complex64::new(-2.0, 0.0), 3f64.sqrt());
        for c in &region.contours {
            for p in c {
                assert!(((p - z0).norm() - r).abs() < 1e-6, "{p}");
            }
        }
    }

    #[test]
    fn whole_disk_region_has_no_contour() {
        let f = parse("z^2").unwrap();
        let region =
            extract_region(&LevelSpec::OmegaLambda { lambda: 2.0 }, &f, 128, 1e-9).unwrap();
        assert!(region.contours.is_empty());
        assert_eq!(region.out_count_inside_disk(), 0);
        assert!(region.in_count() > 10_000);
    }

    #[test]
    fn polyline_chaining_joins_shared_edges() {
        let f = parse("z^2").unwrap();
        let region =
            extract_region(&LevelSpec::OmegaLambda { lambda: 1.5 }, &f, 128, 1e-9).unwrap();
        // the circle should come out as a handful of long chains, not confetti
        assert!(region.contours.len() <= 4, "{}", region.contours.len());
        for c in &region.contours {
            assert!(c.len() > 20);
            for w in c.windows(2) {
                assert!((w[0] - w[1]).norm() < 4.0 * (2.0 / 128.0));
            }
        }
    }

    #[test]
    fn component_restriction() {
        let f = parse("z^2").unwrap();
        let region =
            extract_region(&LevelSpec::OmegaLambda { lambda: 1.5 }, &f, 128, 1e-9).unwrap();
        let comp = component_of_origin(&region).unwrap();
        // the region is connected here, so nothing is dropped
        assert_eq!(comp.in_count(), region.in_count());

        let mut detached = region.clone();
        for b in detached.in_bitmap.iter_mut() {
            *b = false;
        }
        detached.contains_origin = false;
        assert!(matches!(
            component_of_origin(&detached),
            Err(LevelSetError::OriginNotInRegion)
        ));
    }
}
