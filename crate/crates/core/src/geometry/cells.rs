//! Dual cells `{p ∈ P : ⟨p, xᵢ − xⱼ⟩ ≥ vᵢ − vⱼ for all j}` of a node/value
//! configuration (a power diagram in slope space, clipped to `P`).
//!
//! Dimension one uses a sorted lower hull. Dimensions two and three clip `P` by
//! one halfspace per node, walking a kd-tree nearest subtree first and skipping
//! a subtree only when a bound proves none of its nodes can cut.

use super::hull::{self, affine_frame, dot, norm, sub, Point, ORIGIN};
use super::{polygon_area, ConvexBody};

/// Facet label for the boundary of `P`.
pub(crate) const BOUNDARY: usize = usize::MAX;

#[derive(Clone, Debug, Default)]
pub(crate) struct Cell {
    pub vertices: Vec<Point>,
    pub volume: f64,
    /// `(neighbour, (n−1)-measure of the shared facet)`.
    pub facets: Vec<(usize, f64)>,
}

impl Cell {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub(crate) struct CellEngine {
    dim: usize,
    /// Vertices of `P`, counter-clockwise in the plane.
    body: Vec<Point>,
    /// `[a, b] = P` when `dim == 1`.
    interval: (f64, f64),
    nodes: Vec<Point>,
    /// Node indices sorted by coordinate (dimension one).
    order: Vec<usize>,
    grid: Option<KdTree>,
    scale_x: f64,
    scale_p: f64,
}

/// Kd-tree over the nodes. Every tree node carries the bounding box of its
/// points so that whole subtrees can be skipped.
struct KdTree {
    /// Node indices, permuted so that each tree node owns a contiguous range.
    order: Vec<usize>,
    tree: Vec<KdNode>,
    /// Leaf containing each node.
    leaf_of: Vec<usize>,
    /// Reference slopes on a grid over the bounding box of `P`.
    refs: Vec<Point>,
    ref_lo: Point,
    ref_step: Point,
    ref_counts: [usize; 3],
}

struct KdNode {
    lo: Point,
    hi: Point,
    start: usize,
    end: usize,
    parent: usize,
    children: Option<(usize, usize)>,
}

const LEAF: usize = 4;

/// Per tree node, `max ⟨q_r, xⱼ⟩ − vⱼ` over its points for every reference
/// slope `q_r`. Since `⟨q, xⱼ⟩ = ⟨q − q_r, xⱼ⟩ + ⟨q_r, xⱼ⟩` this bounds every
/// constraint of a subtree with a slack proportional to `|q − q_r|`.
pub(crate) struct Bounds(Vec<f64>);

impl KdTree {
    fn new(dim: usize, nodes: &[Point], body: &[Point]) -> Self {
        let mut t = KdTree {
            order: (0..nodes.len()).collect(),
            tree: Vec::new(),
            leaf_of: vec![0; nodes.len()],
            refs: Vec::new(),
            ref_lo: ORIGIN,
            ref_step: ORIGIN,
            ref_counts: [1; 3],
        };
        t.build(dim, nodes, 0, nodes.len(), usize::MAX);

        let k = if dim == 2 { 8 } else { 4 };
        for d in 0..dim {
            let a = body.iter().map(|q| q[d]).fold(f64::INFINITY, f64::min);
            let b = body.iter().map(|q| q[d]).fold(f64::NEG_INFINITY, f64::max);
            t.ref_lo[d] = a;
            if b > a {
                t.ref_counts[d] = k;
                t.ref_step[d] = (b - a) / (k - 1) as f64;
            }
        }
        for a in 0..t.ref_counts[0] {
            for b in 0..t.ref_counts[1] {
                for c in 0..t.ref_counts[2] {
                    let idx = [a, b, c];
                    let mut q = ORIGIN;
                    for d in 0..3 {
                        q[d] = t.ref_lo[d] + idx[d] as f64 * t.ref_step[d];
                    }
                    t.refs.push(q);
                }
            }
        }
        t
    }

    fn build(&mut self, dim: usize, nodes: &[Point], start: usize, end: usize, parent: usize) -> usize {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for d in 0..dim {
            lo[d] = f64::INFINITY;
            hi[d] = f64::NEG_INFINITY;
        }
        for &j in &self.order[start..end] {
            for d in 0..dim {
                lo[d] = lo[d].min(nodes[j][d]);
                hi[d] = hi[d].max(nodes[j][d]);
            }
        }
        let id = self.tree.len();
        self.tree.push(KdNode {
            lo,
            hi,
            start,
            end,
            parent,
            children: None,
        });
        let axis = (0..dim).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0);
        if end - start <= LEAF || hi[axis] <= lo[axis] {
            for &j in &self.order[start..end] {
                self.leaf_of[j] = id;
            }
            return id;
        }
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| nodes[a][axis].total_cmp(&nodes[b][axis]));
        let left = self.build(dim, nodes, start, mid, id);
        let right = self.build(dim, nodes, mid, end, id);
        self.tree[id].children = Some((left, right));
        id
    }

    fn nearest_ref(&self, q: &Point) -> usize {
        let mut c = [0usize; 3];
        for d in 0..3 {
            if self.ref_counts[d] > 1 {
                let k = ((q[d] - self.ref_lo[d]) / self.ref_step[d]).round().max(0.0) as usize;
                c[d] = k.min(self.ref_counts[d] - 1);
            }
        }
        (c[0] * self.ref_counts[1] + c[1]) * self.ref_counts[2] + c[2]
    }
}

/// Squared distance from `x` to the box `[lo, hi]`.
fn box_distance(x: &Point, lo: &Point, hi: &Point) -> f64 {
    (0..3)
        .map(|d| {
            let e = (lo[d] - x[d]).max(x[d] - hi[d]).max(0.0);
            e * e
        })
        .sum()
}

/// A cell under construction.
trait Clipper {
    fn all_vertices(&self, f: impl Fn(&Point) -> bool) -> bool;
    fn centroid(&self) -> Point;
    /// Intersects with `⟨q, a⟩ ≤ rhs`, labelled `j`.
    fn clip(&mut self, a: &Point, rhs: f64, j: usize) -> Clip;
}

struct Polygon {
    poly: Vec<(Point, usize)>,
    scratch: Vec<(Point, usize)>,
    eps: f64,
    tiny: f64,
}

impl Clipper for Polygon {
    fn all_vertices(&self, f: impl Fn(&Point) -> bool) -> bool {
        self.poly.iter().all(|(q, _)| f(q))
    }

    fn centroid(&self) -> Point {
        let mut c = ORIGIN;
        for (q, _) in &self.poly {
            c = hull::add(&c, q);
        }
        hull::scale(&c, 1.0 / self.poly.len() as f64)
    }

    fn clip(&mut self, a: &Point, rhs: f64, j: usize) -> Clip {
        let r = clip_polygon(&self.poly, a, rhs, j, self.eps, self.tiny, &mut self.scratch);
        if let Clip::Cut = r {
            std::mem::swap(&mut self.poly, &mut self.scratch);
        }
        r
    }
}

struct Polytope {
    pts: Vec<Point>,
    cut: Vec<usize>,
    eps: f64,
}

impl Clipper for Polytope {
    fn all_vertices(&self, f: impl Fn(&Point) -> bool) -> bool {
        self.pts.iter().all(f)
    }

    fn centroid(&self) -> Point {
        hull::scale(&self.pts.iter().fold(ORIGIN, |c, q| hull::add(&c, q)), 1.0 / self.pts.len() as f64)
    }

    fn clip(&mut self, a: &Point, rhs: f64, j: usize) -> Clip {
        let eps = self.eps;
        let s: Vec<f64> = self.pts.iter().map(|q| dot(q, a) - rhs).collect();
        if s.iter().all(|&v| v <= eps) {
            return Clip::Unchanged;
        }
        if s.iter().all(|&v| v > eps) {
            return Clip::Empty;
        }
        let mut next: Vec<Point> = Vec::new();
        for (q, &sq) in self.pts.iter().zip(&s) {
            if sq <= eps {
                next.push(*q);
            }
        }
        for (p, &sp) in self.pts.iter().zip(&s) {
            if sp > eps {
                continue;
            }
            for (q, &sq) in self.pts.iter().zip(&s) {
                if sq > eps {
                    let t = (sp / (sp - sq)).clamp(0.0, 1.0);
                    next.push(hull::add(p, &hull::scale(&sub(q, p), t)));
                }
            }
        }
        let h = hull::hull(&next, 3);
        self.pts = h.vertices.iter().map(|&k| next[k]).collect();
        self.cut.push(j);
        Clip::Cut
    }
}

/// `max_{x ∈ [lo, hi]} ⟨q, x⟩`.
fn box_support(q: &Point, lo: &Point, hi: &Point) -> f64 {
    (0..3)
        .map(|d| if q[d] >= 0.0 { q[d] * hi[d] } else { q[d] * lo[d] })
        .sum()
}

enum Clip {
    Unchanged,
    Empty,
    Cut,
}

impl CellEngine {
    pub fn new(body: &ConvexBody, nodes: &[Point]) -> Self {
        let dim = body.dim();
        let verts = body.points().to_vec();
        let interval = if dim == 1 {
            let a = verts.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let b = verts.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            (a, b)
        } else {
            (0.0, 0.0)
        };
        let scale_x = nodes.iter().map(norm).fold(0.0, f64::max);
        let scale_p = verts.iter().map(norm).fold(0.0, f64::max);
        let mut order = Vec::new();
        let mut grid = None;
        if dim == 1 {
            order = (0..nodes.len()).collect();
            order.sort_by(|&a, &b| nodes[a][0].total_cmp(&nodes[b][0]));
        } else {
            grid = Some(KdTree::new(dim, nodes, &verts));
        }
        CellEngine {
            dim,
            body: verts,
            interval,
            nodes: nodes.to_vec(),
            order,
            grid,
            scale_x,
            scale_p,
        }
    }

    /// Absolute slack on constraint values `⟨q, xⱼ − xᵢ⟩ − (vⱼ − vᵢ)`.
    pub fn epsilon(&self, values: &[f64]) -> f64 {
        let scale_v = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        1e-12 * (1.0 + self.scale_x * self.scale_p + scale_v)
    }

    pub fn bounds(&self, values: &[f64]) -> Bounds {
        let Some(t) = &self.grid else {
            return Bounds(Vec::new());
        };
        let nr = t.refs.len();
        let mut m = vec![f64::NEG_INFINITY; t.tree.len() * nr];
        // children come after their parent
        for (id, nd) in t.tree.iter().enumerate().rev() {
            match nd.children {
                None => {
                    let row = &mut m[id * nr..(id + 1) * nr];
                    for &j in &t.order[nd.start..nd.end] {
                        let x = &self.nodes[j];
                        for (mr, q) in row.iter_mut().zip(&t.refs) {
                            *mr = mr.max(dot(q, x) - values[j]);
                        }
                    }
                }
                Some((l, r)) => {
                    for k in 0..nr {
                        m[id * nr + k] = m[l * nr + k].max(m[r * nr + k]);
                    }
                }
            }
        }
        Bounds(m)
    }

    /// Records that node `i` now carries the smaller value `v`.
    pub fn lower_value(&self, bounds: &mut Bounds, i: usize, v: f64) {
        if let Some(t) = &self.grid {
            let nr = t.refs.len();
            let x = &self.nodes[i];
            let mut id = t.leaf_of[i];
            while id != usize::MAX {
                for (k, q) in t.refs.iter().enumerate() {
                    let m = &mut bounds.0[id * nr + k];
                    *m = m.max(dot(q, x) - v);
                }
                id = t.tree[id].parent;
            }
        }
    }

    pub fn all_cells(&self, values: &[f64]) -> Vec<Cell> {
        if self.dim == 1 {
            return self.cells_1d(values);
        }
        let bounds = self.bounds(values);
        let eps = self.epsilon(values);
        (0..self.nodes.len())
            .map(|i| self.cell_with(i, values, &bounds, eps))
            .collect()
    }

    /// A single cell. `bounds` must dominate the current values.
    pub fn cell(&self, i: usize, values: &[f64], bounds: &Bounds, eps: f64) -> Cell {
        if self.dim == 1 {
            self.cell_1d(i, values, eps)
        } else {
            self.cell_with(i, values, bounds, eps)
        }
    }

    fn cell_with(&self, i: usize, values: &[f64], bounds: &Bounds, eps: f64) -> Cell {
        if self.dim == 2 {
            self.cell_2d(i, values, bounds, eps)
        } else {
            self.cell_3d(i, values, bounds, eps)
        }
    }

    /// Clips `cell` by every constraint that can cut it. False when it empties.
    fn scan<C: Clipper>(&self, i: usize, values: &[f64], bounds: &Bounds, eps: f64, cell: &mut C) -> bool {
        let t = self.grid.as_ref().expect("kd-tree");
        let xi = self.nodes[i];
        let vi = values[i];
        let nr = t.refs.len();
        let mut r = t.nearest_ref(&cell.centroid());
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            let nd = &t.tree[id];
            let qr = &t.refs[r];
            let m = bounds.0[id * nr + r];
            if cell.all_vertices(|q| box_support(&sub(q, qr), &nd.lo, &nd.hi) + m - dot(q, &xi) + vi <= eps) {
                continue;
            }
            match nd.children {
                Some((a, b)) => {
                    let da = box_distance(&xi, &t.tree[a].lo, &t.tree[a].hi);
                    let db = box_distance(&xi, &t.tree[b].lo, &t.tree[b].hi);
                    let (near, far) = if da <= db { (a, b) } else { (b, a) };
                    stack.push(far);
                    stack.push(near);
                }
                None => {
                    for &j in &t.order[nd.start..nd.end] {
                        if j == i {
                            continue;
                        }
                        match cell.clip(&sub(&self.nodes[j], &xi), values[j] - vi, j) {
                            Clip::Unchanged => {}
                            Clip::Empty => return false,
                            Clip::Cut => r = t.nearest_ref(&cell.centroid()),
                        }
                    }
                }
            }
        }
        true
    }

    fn cells_1d(&self, values: &[f64]) -> Vec<Cell> {
        let n = self.nodes.len();
        let eps = self.epsilon(values);
        let (a, b) = self.interval;
        let x = |k: usize| self.nodes[k][0];
        let mut lower: Vec<usize> = Vec::with_capacity(n);
        for &k in &self.order {
            while lower.len() >= 2 {
                let l = lower[lower.len() - 2];
                let m = lower[lower.len() - 1];
                // twice the signed area of (l, m, k) in the (x, v) plane
                let turn = (x(m) - x(l)) * (values[k] - values[l]) - (x(k) - x(l)) * (values[m] - values[l]);
                if turn <= eps * (x(k) - x(l)) {
                    lower.pop();
                } else {
                    break;
                }
            }
            lower.push(k);
        }
        let slope = |l: usize, r: usize| (values[r] - values[l]) / (x(r) - x(l));
        let mut cells = vec![Cell::default(); n];
        for (pos, &k) in lower.iter().enumerate() {
            let left = (pos > 0).then(|| lower[pos - 1]);
            let right = lower.get(pos + 1).copied();
            cells[k] = self.interval_cell(
                k,
                left.map(|l| (l, slope(l, k))),
                right.map(|r| (r, slope(k, r))),
                values,
                eps,
            );
        }
        // nodes strictly between consecutive hull vertices
        let mut pos = 0;
        for &k in &self.order {
            if pos < lower.len() && lower[pos] == k {
                pos += 1;
                continue;
            }
            if pos == 0 || pos >= lower.len() {
                continue;
            }
            let (l, r) = (lower[pos - 1], lower[pos]);
            let s = slope(l, r);
            let chord = values[l] + s * (x(k) - x(l));
            if values[k] - chord <= eps && s >= a - eps && s <= b + eps {
                let q = s.clamp(a, b);
                cells[k] = Cell {
                    vertices: vec![[q, 0.0, 0.0]],
                    volume: 0.0,
                    facets: Vec::new(),
                };
            }
        }
        cells
    }

    /// `[max(sL, a), min(sR, b)]` with neighbour slopes `sL`, `sR`.
    fn interval_cell(
        &self,
        k: usize,
        left: Option<(usize, f64)>,
        right: Option<(usize, f64)>,
        values: &[f64],
        eps: f64,
    ) -> Cell {
        let _ = values;
        let (a, b) = self.interval;
        let x = |j: usize| self.nodes[j][0];
        let sl = left.map_or(f64::NEG_INFINITY, |(_, s)| s);
        let sr = right.map_or(f64::INFINITY, |(_, s)| s);
        let mut lo = sl.max(a);
        let mut hi = sr.min(b);
        if lo > hi {
            // tolerate violations below eps in constraint units
            let slack_l = left.map_or(0.0, |(j, _)| (lo - hi) * (x(k) - x(j)));
            let slack_r = right.map_or(0.0, |(j, _)| (lo - hi) * (x(j) - x(k)));
            let slack = if sl > b { slack_l } else { slack_r };
            if slack > eps && (lo - hi) > 1e-15 * (1.0 + a.abs() + b.abs()) {
                return Cell::default();
            }
            let mid = if sl > b { b } else { a };
            lo = mid;
            hi = mid;
        }
        let mut facets = Vec::new();
        if let Some((j, s)) = left {
            if s > a && s < b && lo < hi {
                facets.push((j, 1.0));
            }
        }
        if let Some((j, s)) = right {
            if s > a && s < b && lo < hi {
                facets.push((j, 1.0));
            }
        }
        let vertices = if hi > lo {
            vec![[lo, 0.0, 0.0], [hi, 0.0, 0.0]]
        } else {
            vec![[lo, 0.0, 0.0]]
        };
        Cell {
            vertices,
            volume: hi - lo,
            facets,
        }
    }

    fn cell_1d(&self, i: usize, values: &[f64], eps: f64) -> Cell {
        let xi = self.nodes[i][0];
        let mut left: Option<(usize, f64)> = None;
        let mut right: Option<(usize, f64)> = None;
        for (j, xj) in self.nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = xj[0] - xi;
            let s = (values[j] - values[i]) / d;
            if d < 0.0 {
                if left.is_none_or(|(_, t)| s > t) {
                    left = Some((j, s));
                }
            } else if right.is_none_or(|(_, t)| s < t) {
                right = Some((j, s));
            }
        }
        if let (Some((_, sl)), Some((_, sr))) = (left, right) {
            if sl > sr {
                // strictly above the chord of its neighbours
                let (l, r) = (left.unwrap().0, right.unwrap().0);
                let gap = (sl - sr) * (self.nodes[r][0] - xi).min(xi - self.nodes[l][0]);
                if gap > eps {
                    return Cell::default();
                }
                let (a, b) = self.interval;
                let q = (0.5 * (sl + sr)).clamp(a, b);
                if q < sl.min(sr) - eps || q > sl.max(sr) + eps {
                    return Cell::default();
                }
                return Cell {
                    vertices: vec![[q, 0.0, 0.0]],
                    volume: 0.0,
                    facets: Vec::new(),
                };
            }
        }
        self.interval_cell(i, left, right, values, eps)
    }

    fn cell_2d(&self, i: usize, values: &[f64], bounds: &Bounds, eps: f64) -> Cell {
        let mut cell = Polygon {
            poly: self.body.iter().map(|&q| (q, BOUNDARY)).collect(),
            scratch: Vec::with_capacity(self.body.len() + 4),
            eps,
            tiny: 1e-14 * (1.0 + self.scale_p),
        };
        if !self.scan(i, values, bounds, eps, &mut cell) {
            return Cell::default();
        }
        let poly = cell.poly;
        let vertices: Vec<Point> = poly.iter().map(|(q, _)| *q).collect();
        let volume = polygon_area(&vertices);
        let mut facets: Vec<(usize, f64)> = Vec::new();
        if poly.len() >= 2 {
            for k in 0..poly.len() {
                let label = poly[k].1;
                if label == BOUNDARY {
                    continue;
                }
                let len = norm(&sub(&poly[(k + 1) % poly.len()].0, &poly[k].0));
                match facets.iter_mut().find(|(j, _)| *j == label) {
                    Some(f) => f.1 += len,
                    None => facets.push((label, len)),
                }
            }
        }
        Cell {
            vertices,
            volume,
            facets,
        }
    }

    fn cell_3d(&self, i: usize, values: &[f64], bounds: &Bounds, eps: f64) -> Cell {
        let mut cell = Polytope {
            pts: self.body.clone(),
            cut: Vec::new(),
            eps,
        };
        if !self.scan(i, values, bounds, eps, &mut cell) {
            return Cell::default();
        }
        let Polytope { pts, mut cut, .. } = cell;
        let xi = self.nodes[i];
        let vi = values[i];
        let volume = ConvexBody::from_points(3, &pts).map_or(0.0, |b| b.volume());
        let mut facets = Vec::new();
        cut.sort_unstable();
        cut.dedup();
        for j in cut {
            let a = sub(&self.nodes[j], &xi);
            let rhs = values[j] - vi;
            let tol = 1e-9 * norm(&a) * (1.0 + self.scale_p);
            let on: Vec<Point> = pts.iter().filter(|q| (dot(q, &a) - rhs).abs() <= tol).copied().collect();
            if on.len() >= 3 {
                let area = planar_area(&on);
                if area > 0.0 {
                    facets.push((j, area));
                }
            }
        }
        Cell {
            vertices: pts,
            volume,
            facets,
        }
    }
}

/// Area of the convex hull of coplanar points in space.
fn planar_area(points: &[Point]) -> f64 {
    let tol = hull::hull_tolerance(points);
    let frame = affine_frame(points, tol);
    if frame.dim() < 2 {
        return 0.0;
    }
    let local: Vec<Point> = points.iter().map(|p| frame.local(p)).collect();
    let ring: Vec<Point> = hull::monotone_chain(&local, tol)
        .into_iter()
        .map(|k| local[k])
        .collect();
    polygon_area(&ring)
}

/// Sutherland–Hodgman step keeping `⟨q, a⟩ ≤ rhs`. Each vertex carries the label
/// of the edge leaving it; new edges get `label`.
fn clip_polygon(
    poly: &[(Point, usize)],
    a: &Point,
    rhs: f64,
    label: usize,
    eps: f64,
    tiny: f64,
    out: &mut Vec<(Point, usize)>,
) -> Clip {
    let mut any_in = false;
    let mut any_out = false;
    let mut s = [0.0f64; 64];
    let mut heap = Vec::new();
    let sv: &mut [f64] = if poly.len() <= 64 {
        &mut s[..poly.len()]
    } else {
        heap.resize(poly.len(), 0.0);
        &mut heap[..]
    };
    for (k, (q, _)) in poly.iter().enumerate() {
        sv[k] = dot(q, a) - rhs;
        if sv[k] <= eps {
            any_in = true;
        } else {
            any_out = true;
        }
    }
    if !any_out {
        return Clip::Unchanged;
    }
    if !any_in {
        return Clip::Empty;
    }
    out.clear();
    let n = poly.len();
    let push = |out: &mut Vec<(Point, usize)>, p: Point, l: usize| {
        if let Some(last) = out.last_mut() {
            if (last.0[0] - p[0]).abs() <= tiny && (last.0[1] - p[1]).abs() <= tiny {
                *last = (p, l);
                return;
            }
        }
        out.push((p, l));
    };
    for k in 0..n {
        let (cur, lc) = poly[k];
        let nxt = poly[(k + 1) % n].0;
        let (sc, sn) = (sv[k], sv[(k + 1) % n]);
        let cin = sc <= eps;
        let nin = sn <= eps;
        let cross_at = || {
            let t = (sc / (sc - sn)).clamp(0.0, 1.0);
            [cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1]), 0.0]
        };
        match (cin, nin) {
            (true, true) => push(out, cur, lc),
            (true, false) => {
                push(out, cur, lc);
                push(out, cross_at(), label);
            }
            (false, true) => push(out, cross_at(), lc),
            (false, false) => {}
        }
    }
    while out.len() > 1 {
        let first = out[0].0;
        let last = out[out.len() - 1].0;
        if (first[0] - last[0]).abs() <= tiny && (first[1] - last[1]).abs() <= tiny {
            // the closing edge has zero length
            out.pop();
        } else {
            break;
        }
    }
    Clip::Cut
}
