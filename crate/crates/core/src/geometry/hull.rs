//! Point-set hulls in dimension at most three.
//!
//! Everything here works on zero-padded `[f64; 3]` points. A point set is first
//! reduced to its affine hull (Gram-Schmidt with an absolute tolerance), and the
//! hull is then computed in that many dimensions: extremes on a line, Andrew's
//! monotone chain in a plane, an incremental algorithm in space.

use std::collections::HashSet;

pub type Point = [f64; 3];

pub const ORIGIN: Point = [0.0; 3];

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Point, t: f64) -> Point {
    [a[0] * t, a[1] * t, a[2] * t]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn cross2(o: &Point, a: &Point, b: &Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Orthonormal frame of the affine hull of a point set.
#[derive(Clone, Debug)]
pub struct AffineFrame {
    pub origin: Point,
    pub basis: Vec<Point>,
}

impl AffineFrame {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn local(&self, p: &Point) -> Point {
        let d = sub(p, &self.origin);
        let mut y = ORIGIN;
        for (k, b) in self.basis.iter().enumerate() {
            y[k] = dot(&d, b);
        }
        y
    }

    /// Unit vectors completing `basis` to an orthonormal basis of the ambient space.
    pub fn complement(&self, dim: usize) -> Vec<Point> {
        let mut all = self.basis.clone();
        let mut out = Vec::new();
        for axis in 0..dim {
            let mut e = ORIGIN;
            e[axis] = 1.0;
            let mut r = e;
            for b in &all {
                r = sub(&r, &scale(b, dot(&r, b)));
            }
            let n = norm(&r);
            if n > 1e-6 {
                let u = scale(&r, 1.0 / n);
                all.push(u);
                out.push(u);
            }
            if all.len() == dim {
                break;
            }
        }
        out
    }
}

/// Greedy affine frame: repeatedly adds the point farthest from the current span.
pub fn affine_frame(points: &[Point], tol: f64) -> AffineFrame {
    let origin = points.first().copied().unwrap_or(ORIGIN);
    let mut basis: Vec<Point> = Vec::new();
    while basis.len() < 3 {
        let mut best = 0.0;
        let mut best_dir = ORIGIN;
        for p in points {
            let mut r = sub(p, &origin);
            for b in &basis {
                r = sub(&r, &scale(b, dot(&r, b)));
            }
            let n = norm(&r);
            if n > best {
                best = n;
                best_dir = r;
            }
        }
        if best <= tol {
            break;
        }
        // one more orthogonalisation pass for stability
        let mut u = scale(&best_dir, 1.0 / best);
        for b in &basis {
            u = sub(&u, &scale(b, dot(&u, b)));
        }
        let n = norm(&u);
        basis.push(scale(&u, 1.0 / n));
    }
    AffineFrame { origin, basis }
}

/// Result of a hull computation; indices refer to the input slice.
#[derive(Clone, Debug, Default)]
pub struct Hull {
    /// Extreme points. In a plane they are listed counter-clockwise.
    pub vertices: Vec<usize>,
    pub affine_dim: usize,
    /// Outward-oriented boundary triangles, only for full-dimensional spatial hulls.
    pub triangles: Vec<[usize; 3]>,
}

/// Absolute tolerance used for hull predicates on a point set of this extent.
pub fn hull_tolerance(points: &[Point]) -> f64 {
    let o = points.first().copied().unwrap_or(ORIGIN);
    let extent = points.iter().map(|p| norm(&sub(p, &o))).fold(0.0, f64::max);
    1e-9 * extent.max(1.0)
}

pub fn hull(points: &[Point], dim: usize) -> Hull {
    if points.is_empty() {
        return Hull::default();
    }
    let tol = hull_tolerance(points);
    let frame = affine_frame(points, tol);
    match frame.dim() {
        0 => Hull {
            vertices: vec![0],
            affine_dim: 0,
            triangles: Vec::new(),
        },
        1 => {
            let u = frame.basis[0];
            let t: Vec<f64> = points.iter().map(|p| dot(&sub(p, &frame.origin), &u)).collect();
            let (mut lo, mut hi) = (0, 0);
            for (k, &tk) in t.iter().enumerate() {
                if tk < t[lo] {
                    lo = k;
                }
                if tk > t[hi] {
                    hi = k;
                }
            }
            Hull {
                vertices: vec![lo, hi],
                affine_dim: 1,
                triangles: Vec::new(),
            }
        }
        2 => {
            let coords: Vec<Point> = if dim == 2 {
                points.to_vec()
            } else {
                points.iter().map(|p| frame.local(p)).collect()
            };
            let vertices = monotone_chain(&coords, tol);
            if vertices.len() < 3 {
                // collapsed under the tolerance
                return Hull {
                    vertices,
                    affine_dim: 1,
                    triangles: Vec::new(),
                };
            }
            Hull {
                vertices,
                affine_dim: 2,
                triangles: Vec::new(),
            }
        }
        _ => hull3(points, tol),
    }
}

/// Counter-clockwise strict hull of planar points (first two coordinates).
pub fn monotone_chain(points: &[Point], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    idx.dedup_by(|a, b| {
        let pa = &points[*a];
        let pb = &points[*b];
        (pa[0] - pb[0]).abs() <= tol && (pa[1] - pb[1]).abs() <= tol
    });
    if idx.len() < 3 {
        return idx;
    }
    // pop the middle point while it is within `tol` of the chord or turns clockwise
    let keeps = |h: &Vec<usize>, p: usize| -> bool {
        let o = &points[h[h.len() - 2]];
        let a = &points[h[h.len() - 1]];
        let b = &points[p];
        let len = ((b[0] - o[0]).powi(2) + (b[1] - o[1]).powi(2)).sqrt();
        cross2(o, a, b) > tol * len.max(tol)
    };
    let mut lower: Vec<usize> = Vec::with_capacity(idx.len());
    for &p in &idx {
        while lower.len() >= 2 && !keeps(&lower, p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::with_capacity(idx.len());
    for &p in idx.iter().rev() {
        while upper.len() >= 2 && !keeps(&upper, p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[derive(Clone, Copy, Debug)]
struct Face {
    v: [usize; 3],
    normal: Point,
    offset: f64,
}

impl Face {
    fn new(points: &[Point], v: [usize; 3]) -> Self {
        let n = cross(&sub(&points[v[1]], &points[v[0]]), &sub(&points[v[2]], &points[v[0]]));
        let len = norm(&n);
        let normal = if len > 0.0 { scale(&n, 1.0 / len) } else { ORIGIN };
        Face {
            v,
            normal,
            offset: dot(&normal, &points[v[0]]),
        }
    }

    fn distance(&self, p: &Point) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

/// Incremental hull of a full-dimensional spatial point set, followed by removal
/// of vertices that are not corners of the planar facet they lie on.
fn hull3(points: &[Point], tol: f64) -> Hull {
    let first = incremental3(points, tol);
    let corners = facet_corners(points, &first, tol);
    let mut used: Vec<usize> = first.iter().flat_map(|f| f.v).collect();
    used.sort_unstable();
    used.dedup();
    if corners.len() == used.len() {
        return finish3(first, corners);
    }
    let sub_pts: Vec<Point> = corners.iter().map(|&i| points[i]).collect();
    let second = incremental3(&sub_pts, tol);
    let faces: Vec<Face> = second
        .into_iter()
        .map(|f| Face {
            v: [corners[f.v[0]], corners[f.v[1]], corners[f.v[2]]],
            ..f
        })
        .collect();
    finish3(faces, corners)
}

fn finish3(faces: Vec<Face>, mut corners: Vec<usize>) -> Hull {
    corners.sort_unstable();
    Hull {
        vertices: corners,
        affine_dim: 3,
        triangles: faces.iter().map(|f| f.v).collect(),
    }
}

fn incremental3(points: &[Point], tol: f64) -> Vec<Face> {
    // initial tetrahedron from extreme points
    let i0 = (0..points.len())
        .min_by(|&a, &b| points[a][0].total_cmp(&points[b][0]))
        .unwrap();
    let i1 = (0..points.len())
        .max_by(|&a, &b| {
            norm(&sub(&points[a], &points[i0])).total_cmp(&norm(&sub(&points[b], &points[i0])))
        })
        .unwrap();
    let line = sub(&points[i1], &points[i0]);
    let line_dist = |p: &Point| norm(&cross(&sub(p, &points[i0]), &line));
    let i2 = (0..points.len())
        .max_by(|&a, &b| line_dist(&points[a]).total_cmp(&line_dist(&points[b])))
        .unwrap();
    let base = Face::new(points, [i0, i1, i2]);
    let i3 = (0..points.len())
        .max_by(|&a, &b| base.distance(&points[a]).abs().total_cmp(&base.distance(&points[b]).abs()))
        .unwrap();
    let centroid = scale(
        &add(&add(&points[i0], &points[i1]), &add(&points[i2], &points[i3])),
        0.25,
    );
    let mut faces: Vec<Face> = [[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]]
        .iter()
        .map(|&v| {
            let f = Face::new(points, v);
            if f.distance(&centroid) > 0.0 {
                Face::new(points, [v[0], v[2], v[1]])
            } else {
                f
            }
        })
        .collect();

    let seeded = [i0, i1, i2, i3];
    let mut order: Vec<usize> = (0..points.len()).filter(|i| !seeded.contains(i)).collect();
    // far points first keeps intermediate faces well shaped
    order.sort_by(|&a, &b| {
        norm(&sub(&points[b], &centroid)).total_cmp(&norm(&sub(&points[a], &centroid)))
    });

    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    for p in order {
        let visible: Vec<bool> = faces.iter().map(|f| f.distance(&points[p]) > tol).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        edges.clear();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, v)| **v) {
            for k in 0..3 {
                edges.insert((f.v[k], f.v[(k + 1) % 3]));
            }
        }
        let mut fresh = Vec::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, v)| **v) {
            for k in 0..3 {
                let (a, b) = (f.v[k], f.v[(k + 1) % 3]);
                if !edges.contains(&(b, a)) {
                    fresh.push(Face::new(points, [a, b, p]));
                }
            }
        }
        let mut kept: Vec<Face> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, v)| !**v)
            .map(|(f, _)| *f)
            .collect();
        kept.extend(fresh);
        faces = kept;
    }
    faces
}

/// Vertices of the incremental hull that are strict corners of their planar facet.
fn facet_corners(points: &[Point], faces: &[Face], tol: f64) -> Vec<usize> {
    let mut groups: Vec<(Point, f64, Vec<usize>)> = Vec::new();
    for f in faces {
        let slot = groups.iter_mut().find(|(n, o, _)| {
            norm(&sub(n, &f.normal)) <= 1e-9 && (o - f.offset).abs() <= tol
        });
        match slot {
            Some((_, _, vs)) => vs.extend_from_slice(&f.v),
            None => groups.push((f.normal, f.offset, f.v.to_vec())),
        }
    }
    let mut corners: Vec<usize> = Vec::new();
    for (_, _, mut vs) in groups {
        vs.sort_unstable();
        vs.dedup();
        let pts: Vec<Point> = vs.iter().map(|&i| points[i]).collect();
        let frame = affine_frame(&pts, tol);
        if frame.dim() < 2 {
            corners.extend(vs);
            continue;
        }
        let local: Vec<Point> = pts.iter().map(|p| frame.local(p)).collect();
        for k in monotone_chain(&local, tol) {
            corners.push(vs[k]);
        }
    }
    corners.sort_unstable();
    corners.dedup();
    corners
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Point> {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        pts
    }

    #[test]
    fn planar_chain_drops_collinear_points() {
        let pts = vec![
            [0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.5, 0.5, 0.0],
        ];
        let h = hull(&pts, 2);
        assert_eq!(h.affine_dim, 2);
        assert_eq!(h.vertices, vec![0, 2, 3, 4]);
    }

    #[test]
    fn cube_with_face_and_edge_points_keeps_corners_only() {
        let mut pts = cube();
        pts.push([0.5, 0.5, 1.0]);
        pts.push([0.5, 0.0, 0.0]);
        pts.push([0.5, 0.5, 0.5]);
        let h = hull(&pts, 3);
        assert_eq!(h.affine_dim, 3);
        assert_eq!(h.vertices, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn face_points_seen_first_are_removed() {
        // face centres first so they enter the incremental hull before the corners
        let mut pts = vec![
            [0.5, 0.5, 0.0],
            [0.5, 0.5, 1.0],
            [0.0, 0.5, 0.5],
            [1.0, 0.5, 0.5],
        ];
        pts.extend(cube());
        let h = hull(&pts, 3);
        assert_eq!(h.vertices.len(), 8);
        assert!(h.vertices.iter().all(|&v| v >= 4));
    }

    #[test]
    fn degenerate_sets_report_affine_dimension() {
        let line = vec![[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]];
        let h = hull(&line, 3);
        assert_eq!(h.affine_dim, 1);
        assert_eq!(h.vertices, vec![0, 2]);
        let point = vec![[1.0, 2.0, 0.0], [1.0, 2.0, 0.0]];
        assert_eq!(hull(&point, 2).affine_dim, 0);
        let square3 = vec![
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
            [0.5, 0.5, 1.0],
        ];
        let h = hull(&square3, 3);
        assert_eq!(h.affine_dim, 2);
        assert_eq!(h.vertices.len(), 4);
    }
}
