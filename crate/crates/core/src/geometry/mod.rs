//! Vertex-represented convex polytopes in dimension one to three.
//!
//! Predicates use an absolute tolerance of [`TOLERANCE`] scaled by the extent of the
//! point set. Lower-dimensional hulls are kept (flagged through
//! [`ConvexBody::is_degenerate`]) and have volume zero.

pub(crate) mod cells;
pub(crate) mod hull;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use hull::Point;
use hull::{add, affine_frame, cross2, dot, norm, sub, ORIGIN};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 3;

/// Absolute tolerance for hull and containment predicates.
pub const TOLERANCE: f64 = 1e-9;

/// Closed halfspace `⟨normal, x⟩ ≤ offset` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

/// Compact convex polytope stored by its extreme points.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "BodyRepr", into = "BodyRepr")]
pub struct ConvexBody {
    dim: usize,
    /// Minimal hull vertices; counter-clockwise for full-dimensional planar bodies.
    vertices: Vec<Point>,
    affine_dim: usize,
    volume: f64,
    halfspaces: Vec<Halfspace>,
    /// Simplices covering the boundary (full-dimensional) or the body itself
    /// (degenerate); used for distance queries.
    cover: Vec<Vec<usize>>,
}

/// On-disk form: `{"dim": n, "vertices": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodyRepr {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
}

impl TryFrom<BodyRepr> for ConvexBody {
    type Error = Error;

    fn try_from(r: BodyRepr) -> Result<Self> {
        ConvexBody::new(r.dim, &r.vertices)
    }
}

impl From<ConvexBody> for BodyRepr {
    fn from(b: ConvexBody) -> Self {
        BodyRepr {
            dim: b.dim,
            vertices: b.vertices().map(|v| v.to_vec()).collect(),
        }
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// Converts a coordinate slice of length `dim` into a padded point.
pub(crate) fn to_point(dim: usize, x: &[f64]) -> Result<Point> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut p = ORIGIN;
    p[..dim].copy_from_slice(x);
    Ok(p)
}

impl ConvexBody {
    /// Hull of the given points. Interior and repeated points are discarded.
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim)?;
        let pts = points
            .iter()
            .map(|p| to_point(dim, p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(dim, &pts)
    }

    pub(crate) fn from_points(dim: usize, points: &[Point]) -> Result<Self> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(Error::Empty);
        }
        if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFinite);
        }
        let h = hull::hull(points, dim);
        let vertices: Vec<Point> = h.vertices.iter().map(|&i| points[i]).collect();
        let affine_dim = h.affine_dim;
        let full = affine_dim == dim;
        let position = |i: usize| h.vertices.iter().position(|&v| v == i).unwrap();
        let triangles: Vec<[usize; 3]> = h
            .triangles
            .iter()
            .map(|t| [position(t[0]), position(t[1]), position(t[2])])
            .collect();

        let volume = if !full {
            0.0
        } else {
            match dim {
                1 => (vertices[1][0] - vertices[0][0]).abs(),
                2 => polygon_area(&vertices),
                _ => {
                    let c = centroid(&vertices);
                    triangles
                        .iter()
                        .map(|t| {
                            let a = sub(&vertices[t[0]], &c);
                            let b = sub(&vertices[t[1]], &c);
                            let d = sub(&vertices[t[2]], &c);
                            dot(&a, &hull::cross(&b, &d)) / 6.0
                        })
                        .sum::<f64>()
                        .abs()
                }
            }
        };

        let (halfspaces, cover) = if full {
            full_hrep(dim, &vertices, &triangles)
        } else {
            degenerate_hrep(dim, affine_dim, &vertices)
        };

        Ok(ConvexBody {
            dim,
            vertices,
            affine_dim,
            volume,
            halfspaces,
            cover,
        })
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        check_dim(dim)?;
        if hi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: hi.len(),
            });
        }
        let mut pts = Vec::new();
        for mask in 0..(1usize << dim) {
            let p: Vec<f64> = (0..dim)
                .map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] })
                .collect();
            pts.push(p);
        }
        Self::new(dim, &pts)
    }

    /// `[0, 1]ⁿ`.
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::cuboid(&vec![0.0; dim], &vec![1.0; dim])
    }

    /// `Σ = conv{0, e₁, …, eₙ}`.
    pub fn unit_simplex(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut pts = vec![vec![0.0; dim]];
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            pts.push(e);
        }
        Self::new(dim, &pts)
    }

    /// Cross-polytope `conv{±eᵢ}`.
    pub fn cross_polytope(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut pts = Vec::new();
        for k in 0..dim {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[k] = s;
                pts.push(e);
            }
        }
        Self::new(dim, &pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i][..self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.vertices.iter().map(move |v| &v[..self.dim])
    }

    pub(crate) fn points(&self) -> &[Point] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    /// True when the hull is lower-dimensional (no interior).
    pub fn is_degenerate(&self) -> bool {
        self.affine_dim < self.dim
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// H-representation. Degenerate bodies include pairs of opposite halfspaces
    /// pinning their affine hull.
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Average of the vertices; an interior point of a full-dimensional body.
    pub fn vertex_centroid(&self) -> Vec<f64> {
        centroid(&self.vertices)[..self.dim].to_vec()
    }

    /// `h_P(x) = max_{p ∈ P} ⟨x, p⟩`.
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        let p = to_point(self.dim, x)?;
        Ok(self.support_at(&p))
    }

    pub(crate) fn support_at(&self, x: &Point) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn minkowski_sum(&self, other: &ConvexBody) -> Result<ConvexBody> {
        self.same_dim(other)?;
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(add(a, b));
            }
        }
        Self::from_points(self.dim, &pts)
    }

    pub fn translate(&self, t: &[f64]) -> Result<ConvexBody> {
        let t = to_point(self.dim, t)?;
        let pts: Vec<Point> = self.vertices.iter().map(|v| add(v, &t)).collect();
        Self::from_points(self.dim, &pts)
    }

    /// Homothety `tP` about the origin, `t ≥ 0`.
    pub fn scale(&self, t: f64) -> Result<ConvexBody> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {t} must be finite and >= 0")));
        }
        let pts: Vec<Point> = self.vertices.iter().map(|v| hull::scale(v, t)).collect();
        Self::from_points(self.dim, &pts)
    }

    /// Membership with tolerance [`TOLERANCE`].
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        let p = to_point(self.dim, x)?;
        Ok(self.contains_point(&p, TOLERANCE))
    }

    pub(crate) fn contains_point(&self, p: &Point, tol: f64) -> bool {
        self.halfspaces.iter().all(|h| dot(&h.normal, p) <= h.offset + tol)
    }

    /// Every vertex of `other` lies in `self` (tolerance [`TOLERANCE`]).
    pub fn contains_body(&self, other: &ConvexBody) -> bool {
        other
            .vertices
            .iter()
            .all(|v| self.contains_point(v, TOLERANCE))
    }

    /// `{x ∈ P : ⟨normal, x⟩ ≤ offset}`, `None` when empty.
    pub fn clip(&self, h: &Halfspace) -> Option<ConvexBody> {
        let eps = TOLERANCE * 1e-3 * (1.0 + h.offset.abs());
        let s: Vec<f64> = self.vertices.iter().map(|v| dot(&h.normal, v) - h.offset).collect();
        if s.iter().all(|&x| x <= eps) {
            return Some(self.clone());
        }
        if s.iter().all(|&x| x > eps) {
            return None;
        }
        let mut pts: Vec<Point> = Vec::new();
        for (v, &sv) in self.vertices.iter().zip(&s) {
            if sv <= eps {
                pts.push(*v);
            }
        }
        for (a, &sa) in self.vertices.iter().zip(&s) {
            if sa >= 0.0 {
                continue;
            }
            for (b, &sb) in self.vertices.iter().zip(&s) {
                if sb > eps {
                    let t = sa / (sa - sb);
                    pts.push(add(a, &hull::scale(&sub(b, a), t)));
                }
            }
        }
        Self::from_points(self.dim, &pts).ok()
    }

    /// `P ∩ Q`, `None` when empty.
    pub fn intersection(&self, other: &ConvexBody) -> Result<Option<ConvexBody>> {
        self.same_dim(other)?;
        let mut cur = self.clone();
        for h in &other.halfspaces {
            match cur.clip(h) {
                Some(c) => cur = c,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// Smallest `r` with `P ⊂ rΣ`, i.e. the largest coordinate sum over vertices.
    ///
    /// Bodies with a coordinate below `-1e-12` are rejected; translate them into
    /// the positive orthant first.
    pub fn enclosing_simplex_radius(&self) -> Result<f64> {
        for (index, v) in self.vertices.iter().enumerate() {
            for &c in &v[..self.dim] {
                if c < -1e-12 {
                    return Err(Error::NegativeCoordinate { index, value: c });
                }
            }
        }
        Ok(self
            .vertices
            .iter()
            .map(|v| v[..self.dim].iter().sum::<f64>())
            .fold(0.0, f64::max))
    }

    /// Euclidean distance from `x` to the body.
    pub fn distance_to(&self, x: &[f64]) -> Result<f64> {
        let p = to_point(self.dim, x)?;
        Ok(self.distance_to_point(&p))
    }

    pub(crate) fn distance_to_point(&self, p: &Point) -> f64 {
        if !self.is_degenerate() && self.contains_point(p, 0.0) {
            return 0.0;
        }
        self.cover
            .iter()
            .map(|s| match s.len() {
                1 => norm(&sub(p, &self.vertices[s[0]])),
                2 => segment_distance(p, &self.vertices[s[0]], &self.vertices[s[1]]),
                _ => triangle_distance(
                    p,
                    &self.vertices[s[0]],
                    &self.vertices[s[1]],
                    &self.vertices[s[2]],
                ),
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hausdorff_distance(&self, other: &ConvexBody) -> Result<f64> {
        self.same_dim(other)?;
        let a = self
            .vertices
            .iter()
            .map(|v| other.distance_to_point(v))
            .fold(0.0, f64::max);
        let b = other
            .vertices
            .iter()
            .map(|v| self.distance_to_point(v))
            .fold(0.0, f64::max);
        Ok(a.max(b))
    }

    /// Radius of the largest ball about `x` contained in the body (0 if outside).
    pub(crate) fn inner_radius_at(&self, x: &Point) -> f64 {
        if self.is_degenerate() {
            return 0.0;
        }
        self.halfspaces
            .iter()
            .map(|h| h.offset - dot(&h.normal, x))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    fn same_dim(&self, other: &ConvexBody) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }
}

/// Hull of the subgradients of `h` at the nodes within `sample_radius` of the
/// origin; tends to the asymptotic body as the radius and the grid grow.
///
/// Every vertex of every such subgradient cell is used, so `h_P` on a grid
/// containing the origin recovers `P` exactly.
pub fn body_from_subgradients(h: &crate::convexfun::PLConvexFunction, sample_radius: f64) -> Result<ConvexBody> {
    if !(sample_radius > 0.0) {
        return Err(Error::InvalidParameter(format!("sample radius {sample_radius} must be positive")));
    }
    let mut pts = Vec::new();
    for (x, cell) in h.points().iter().zip(h.cells()) {
        if norm(x) <= sample_radius * (1.0 + 1e-12) {
            pts.extend_from_slice(&cell.vertices);
        }
    }
    if pts.is_empty() {
        return Err(Error::Empty);
    }
    ConvexBody::from_points(h.dim(), &pts)
}

pub(crate) fn centroid(points: &[Point]) -> Point {
    let mut c = ORIGIN;
    for p in points {
        c = add(&c, p);
    }
    hull::scale(&c, 1.0 / points.len().max(1) as f64)
}

/// Shoelace area of a planar polygon, evaluated about its vertex centroid.
pub(crate) fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let c = centroid(poly);
    let mut twice = 0.0;
    for k in 0..poly.len() {
        let a = &poly[k];
        let b = &poly[(k + 1) % poly.len()];
        twice += cross2(&c, a, b);
    }
    (0.5 * twice).abs()
}

fn full_hrep(dim: usize, v: &[Point], triangles: &[[usize; 3]]) -> (Vec<Halfspace>, Vec<Vec<usize>>) {
    let mut hs = Vec::new();
    let mut cover = Vec::new();
    match dim {
        1 => {
            let (lo, hi) = if v[0][0] <= v[1][0] { (0, 1) } else { (1, 0) };
            hs.push(Halfspace {
                normal: [1.0, 0.0, 0.0],
                offset: v[hi][0],
            });
            hs.push(Halfspace {
                normal: [-1.0, 0.0, 0.0],
                offset: -v[lo][0],
            });
            cover.push(vec![0]);
            cover.push(vec![1]);
        }
        2 => {
            for k in 0..v.len() {
                let a = v[k];
                let b = v[(k + 1) % v.len()];
                let d = sub(&b, &a);
                let len = norm(&d);
                let normal = [d[1] / len, -d[0] / len, 0.0];
                hs.push(Halfspace {
                    normal,
                    offset: dot(&normal, &a),
                });
                cover.push(vec![k, (k + 1) % v.len()]);
            }
        }
        _ => {
            for t in triangles {
                let n = hull::cross(&sub(&v[t[1]], &v[t[0]]), &sub(&v[t[2]], &v[t[0]]));
                let len = norm(&n);
                cover.push(t.to_vec());
                if len == 0.0 {
                    continue;
                }
                let normal = hull::scale(&n, 1.0 / len);
                let offset = dot(&normal, &v[t[0]]);
                let dup = hs.iter().any(|h: &Halfspace| {
                    norm(&sub(&h.normal, &normal)) <= 1e-9 && (h.offset - offset).abs() <= 1e-9 * (1.0 + offset.abs())
                });
                if !dup {
                    hs.push(Halfspace { normal, offset });
                }
            }
        }
    }
    (hs, cover)
}

fn degenerate_hrep(dim: usize, affine_dim: usize, v: &[Point]) -> (Vec<Halfspace>, Vec<Vec<usize>>) {
    let frame = affine_frame(v, hull::hull_tolerance(v));
    let mut hs = Vec::new();
    for w in frame.complement(dim) {
        let o = dot(&w, &frame.origin);
        hs.push(Halfspace { normal: w, offset: o });
        hs.push(Halfspace {
            normal: hull::scale(&w, -1.0),
            offset: -o,
        });
    }
    let mut cover = Vec::new();
    match affine_dim {
        0 => cover.push(vec![0]),
        1 => {
            let u = frame.basis[0];
            let t: Vec<f64> = v.iter().map(|p| dot(p, &u)).collect();
            let (lo, hi) = (t[0].min(t[1]), t[0].max(t[1]));
            hs.push(Halfspace { normal: u, offset: hi });
            hs.push(Halfspace {
                normal: hull::scale(&u, -1.0),
                offset: -lo,
            });
            cover.push(vec![0, 1]);
        }
        _ => {
            // planar polygon in space, vertices in cyclic order of the local frame
            let local: Vec<Point> = v.iter().map(|p| frame.local(p)).collect();
            let orient = if polygon_signed_area(&local) >= 0.0 { 1.0 } else { -1.0 };
            for k in 0..v.len() {
                let a = local[k];
                let b = local[(k + 1) % v.len()];
                let d = sub(&b, &a);
                let len = norm(&d);
                let n_loc = [orient * d[1] / len, -orient * d[0] / len];
                let normal = add(
                    &hull::scale(&frame.basis[0], n_loc[0]),
                    &hull::scale(&frame.basis[1], n_loc[1]),
                );
                hs.push(Halfspace {
                    normal,
                    offset: dot(&normal, &v[k]),
                });
            }
            for k in 1..v.len() - 1 {
                cover.push(vec![0, k, k + 1]);
            }
        }
    }
    (hs, cover)
}

fn polygon_signed_area(poly: &[Point]) -> f64 {
    let mut twice = 0.0;
    for k in 0..poly.len() {
        twice += cross2(&ORIGIN, &poly[k], &poly[(k + 1) % poly.len()]);
    }
    0.5 * twice
}

fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 > 0.0 {
        (dot(&sub(p, a), &ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    norm(&sub(p, &add(a, &hull::scale(&ab, t))))
}

/// Distance to a filled triangle (closest-point region classification).
fn triangle_distance(p: &Point, a: &Point, b: &Point, c: &Point) -> f64 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(&ab, &ap);
    let d2 = dot(&ac, &ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return norm(&ap);
    }
    let bp = sub(p, b);
    let d3 = dot(&ab, &bp);
    let d4 = dot(&ac, &bp);
    if d3 >= 0.0 && d4 <= d3 {
        return norm(&bp);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return segment_distance(p, a, b);
    }
    let cp = sub(p, c);
    let d5 = dot(&ab, &cp);
    let d6 = dot(&ac, &cp);
    if d6 >= 0.0 && d5 <= d6 {
        return norm(&cp);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return segment_distance(p, a, c);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return segment_distance(p, b, c);
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let q = add(a, &add(&hull::scale(&ab, v), &hull::scale(&ac, w)));
    norm(&sub(p, &q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody {
        ConvexBody::unit_cube(2).unwrap()
    }

    fn diamond() -> ConvexBody {
        ConvexBody::cross_polytope(2).unwrap()
    }

    /// Shoelace on an explicitly ordered vertex list, independent of the hull code.
    fn shoelace(v: &[[f64; 2]]) -> f64 {
        let mut s = 0.0;
        for k in 0..v.len() {
            let (a, b) = (v[k], v[(k + 1) % v.len()]);
            s += a[0] * b[1] - a[1] * b[0];
        }
        0.5 * s.abs()
    }

    #[test]
    fn support_examples() {
        assert_eq!(square().support(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(square().support(&[-1.0, -1.0]).unwrap(), 0.0);
        // brute force over the listed vertices (±1,0),(0,±1)
        let brute = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
            .iter()
            .map(|p: &[f64; 2]| 3.0 * p[0] + 4.0 * p[1])
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(brute, 4.0);
        assert_eq!(diamond().support(&[3.0, 4.0]).unwrap(), brute);
        assert!(matches!(
            square().support(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn square_plus_diamond_is_the_octagon() {
        let oct = square().minkowski_sum(&diamond()).unwrap();
        let expected = [
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
            [-1.0, 1.0],
            [-1.0, 0.0],
            [0.0, -1.0],
            [1.0, -1.0],
        ];
        assert_eq!(oct.num_vertices(), 8);
        for e in &expected {
            assert!(oct.vertices().any(|v| (v[0] - e[0]).abs() < 1e-12 && (v[1] - e[1]).abs() < 1e-12));
        }
        assert_eq!(shoelace(&expected), 7.0);
        assert!((oct.volume() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn sum_with_point_translates() {
        let pt = ConvexBody::new(2, &[vec![3.0, -1.0]]).unwrap();
        let s = square().minkowski_sum(&pt).unwrap();
        assert!(s.hausdorff_distance(&square().translate(&[3.0, -1.0]).unwrap()).unwrap() < 1e-12);
        assert_eq!(square().minkowski_sum(&square()).unwrap().volume(), 4.0);
    }

    #[test]
    fn volumes() {
        assert!((ConvexBody::unit_simplex(2).unwrap().volume() - 0.5).abs() < 1e-15);
        assert!((ConvexBody::unit_cube(3).unwrap().volume() - 1.0).abs() < 1e-15);
        assert!((ConvexBody::unit_simplex(3).unwrap().volume() - 1.0 / 6.0).abs() < 1e-15);
        assert!((ConvexBody::cross_polytope(3).unwrap().volume() - 4.0 / 3.0).abs() < 1e-14);
        let seg = ConvexBody::new(2, &[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(seg.is_degenerate());
        assert_eq!(seg.volume(), 0.0);
    }

    #[test]
    fn simplex_radius() {
        assert_eq!(square().enclosing_simplex_radius().unwrap(), 2.0);
        assert_eq!(ConvexBody::unit_simplex(2).unwrap().enclosing_simplex_radius().unwrap(), 1.0);
        let q = ConvexBody::new(2, &[vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(q.enclosing_simplex_radius().unwrap(), 4.0);
        assert!(matches!(
            diamond().enclosing_simplex_radius(),
            Err(Error::NegativeCoordinate { .. })
        ));
    }

    #[test]
    fn intersection_and_clip() {
        let a = square();
        let b = square().translate(&[0.5, 0.5]).unwrap();
        let c = a.intersection(&b).unwrap().unwrap();
        assert!((c.volume() - 0.25).abs() < 1e-12);
        let far = square().translate(&[5.0, 0.0]).unwrap();
        assert!(a.intersection(&far).unwrap().is_none());
        let cube = ConvexBody::unit_cube(3).unwrap();
        let half = cube
            .clip(&Halfspace {
                normal: [1.0, 0.0, 0.0],
                offset: 0.25,
            })
            .unwrap();
        assert!((half.volume() - 0.25).abs() < 1e-12);
        let corner = cube
            .clip(&Halfspace {
                normal: hull::scale(&[1.0, 1.0, 1.0], 1.0 / 3f64.sqrt()),
                offset: 1.0 / 3f64.sqrt(),
            })
            .unwrap();
        assert!((corner.volume() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_containment_and_distance() {
        let seg = ConvexBody::new(2, &[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(seg.contains(&[1.0, 0.0]).unwrap());
        assert!(!seg.contains(&[1.0, 0.1]).unwrap());
        assert!(!seg.contains(&[2.5, 0.0]).unwrap());
        assert!((seg.distance_to(&[3.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let tri3 = ConvexBody::new(3, &[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        assert_eq!(tri3.affine_dim(), 2);
        assert!(tri3.contains(&[0.2, 0.2, 1.0]).unwrap());
        assert!(!tri3.contains(&[0.8, 0.8, 1.0]).unwrap());
        assert!((tri3.distance_to(&[0.2, 0.2, 3.0]).unwrap() - 2.0).abs() < 1e-12);
        let cube = ConvexBody::unit_cube(3).unwrap();
        assert!((cube.distance_to(&[2.0, 0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
        assert!((cube.distance_to(&[2.0, 2.0, 0.5]).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let json = r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1],[0.2,0.2]]}"#;
        let b: ConvexBody = serde_json::from_str(json).unwrap();
        assert_eq!(b.num_vertices(), 3);
        let back: ConvexBody = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(back.volume(), b.volume());
        assert!(serde_json::from_str::<ConvexBody>(r#"{"dim":2,"vertices":[[0,0,0]]}"#).is_err());
    }
}
