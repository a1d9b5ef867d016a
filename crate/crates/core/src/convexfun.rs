//! Piecewise-linear convex functions with a prescribed asymptotic body.
//!
//! Node data `(xᵢ, vᵢ)` over a polytope `P` represents
//!
//! ```text
//! h(x) = sup_{p ∈ P} min_j ( vⱼ + ⟨p, x − xⱼ⟩ ),
//! ```
//!
//! the largest convex function with subgradients in `P` lying below the data. It
//! agrees with the lower-hull interpolant on the node hull and grows like `h_P`
//! outside. Data is convex when `h(xᵢ) = vᵢ` at every node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::cells::{Cell, CellEngine};
use crate::geometry::hull::{dot, Point, ORIGIN};
use crate::geometry::{to_point, ConvexBody};

/// Relative tolerance for node values sitting above the convex envelope.
pub const CONVEXITY_TOLERANCE: f64 = 1e-9;

/// Largest convex function below node data, with subgradients in a polytope.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FunctionRepr", into = "FunctionRepr")]
pub struct PLConvexFunction {
    body: ConvexBody,
    nodes: Vec<Point>,
    values: Vec<f64>,
    cells: Vec<Cell>,
    pieces: Pieces,
}

/// On-disk form: `{"body": ..., "nodes": [[...]], "values": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionRepr {
    pub body: ConvexBody,
    pub nodes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl TryFrom<FunctionRepr> for PLConvexFunction {
    type Error = Error;

    fn try_from(r: FunctionRepr) -> Result<Self> {
        PLConvexFunction::new(r.body, &r.nodes, r.values)
    }
}

impl From<PLConvexFunction> for FunctionRepr {
    fn from(h: PLConvexFunction) -> Self {
        FunctionRepr {
            nodes: h.nodes().map(|x| x.to_vec()).collect(),
            values: h.values,
            body: h.body,
        }
    }
}

/// Node data without a convexity requirement; input to envelope operations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FunctionRepr", into = "FunctionRepr")]
pub struct Obstacle {
    body: ConvexBody,
    nodes: Vec<Point>,
    values: Vec<f64>,
}

impl TryFrom<FunctionRepr> for Obstacle {
    type Error = Error;

    fn try_from(r: FunctionRepr) -> Result<Self> {
        Obstacle::new(r.body, &r.nodes, r.values)
    }
}

impl From<Obstacle> for FunctionRepr {
    fn from(o: Obstacle) -> Self {
        let dim = o.body.dim();
        FunctionRepr {
            nodes: o.nodes.iter().map(|x| x[..dim].to_vec()).collect(),
            values: o.values,
            body: o.body,
        }
    }
}

/// Affine pieces `x ↦ ⟨q, x⟩ − c`, one per vertex of each nonempty cell.
#[derive(Clone, Debug, Default)]
struct Pieces {
    slopes: Vec<Point>,
    offsets: Vec<f64>,
    /// Upper envelope `(q, c)` sorted by slope, with breakpoints (dimension one).
    line: Vec<(f64, f64)>,
    breaks: Vec<f64>,
}

impl Pieces {
    fn new(dim: usize, nodes: &[Point], values: &[f64], cells: &[Cell]) -> Self {
        let mut raw: Vec<(Point, f64)> = Vec::new();
        for (j, cell) in cells.iter().enumerate() {
            for q in &cell.vertices {
                raw.push((*q, dot(q, &nodes[j]) - values[j]));
            }
        }
        raw.sort_by(|a, b| {
            a.0[0]
                .total_cmp(&b.0[0])
                .then(a.0[1].total_cmp(&b.0[1]))
                .then(a.0[2].total_cmp(&b.0[2]))
                .then(a.1.total_cmp(&b.1))
        });
        let scale = raw.iter().map(|(q, c)| q.iter().map(|v| v.abs()).sum::<f64>() + c.abs()).fold(1.0, f64::max);
        let tiny = 1e-13 * scale;
        let mut pieces = Pieces::default();
        for (q, c) in raw {
            if let (Some(last_q), Some(last_c)) = (pieces.slopes.last(), pieces.offsets.last()) {
                if (0..3).all(|d| (last_q[d] - q[d]).abs() <= tiny) && (last_c - c).abs() <= tiny {
                    continue;
                }
            }
            pieces.slopes.push(q);
            pieces.offsets.push(c);
        }
        if dim == 1 {
            pieces.build_line();
        }
        pieces
    }

    fn build_line(&mut self) {
        // lines y = q x − c sorted by q; for equal q the smallest c wins
        let mut lines: Vec<(f64, f64)> = self.slopes.iter().zip(&self.offsets).map(|(q, &c)| (q[0], c)).collect();
        lines.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        lines.dedup_by(|b, a| a.0 == b.0);
        let cross = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (b.0 - a.0);
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(lines.len());
        for l in lines {
            while hull.len() >= 2 {
                let (l1, l2) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if cross(l1, l) <= cross(l1, l2) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(l);
        }
        self.breaks = hull.windows(2).map(|w| cross(w[0], w[1])).collect();
        self.line = hull;
    }

    fn eval(&self, x: &Point) -> f64 {
        if !self.line.is_empty() {
            let k = self.breaks.partition_point(|&b| b < x[0]);
            let at = |i: usize| self.line[i].0 * x[0] - self.line[i].1;
            let mut best = at(k);
            if k > 0 {
                best = best.max(at(k - 1));
            }
            if k + 1 < self.line.len() {
                best = best.max(at(k + 1));
            }
            return best;
        }
        self.slopes
            .iter()
            .zip(&self.offsets)
            .map(|(q, c)| dot(q, x) - c)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn parse_nodes(dim: usize, nodes: &[Vec<f64>]) -> Result<Vec<Point>> {
    nodes.iter().map(|x| to_point(dim, x)).collect()
}

fn check_nodes(nodes: &[Point], values: &[f64]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::Empty);
    }
    if nodes.len() != values.len() {
        return Err(Error::InvalidParameter(format!(
            "{} nodes but {} values",
            nodes.len(),
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&nodes[a], &nodes[b]);
        p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])).then(p[2].total_cmp(&q[2]))
    });
    for w in order.windows(2) {
        let (p, q) = (&nodes[w[0]], &nodes[w[1]]);
        if (0..3).all(|d| (p[d] - q[d]).abs() <= 1e-12 * (1.0 + p[d].abs())) {
            return Err(Error::DuplicateNode {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
            });
        }
    }
    Ok(())
}

impl Obstacle {
    pub fn new(body: ConvexBody, nodes: &[Vec<f64>], values: Vec<f64>) -> Result<Self> {
        let nodes = parse_nodes(body.dim(), nodes)?;
        check_nodes(&nodes, &values)?;
        Ok(Obstacle { body, nodes, values })
    }

    /// Samples `f` at the nodes.
    pub fn from_fn(body: ConvexBody, nodes: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = nodes.iter().map(|x| f(x)).collect();
        Self::new(body, nodes, values)
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The largest convex function with subgradients in the body lying below the
    /// obstacle at every node (grid biconjugate).
    pub fn envelope(&self) -> PLConvexFunction {
        PLConvexFunction::biconjugate(self.body.clone(), self.nodes.clone(), &self.values)
    }
}

impl PLConvexFunction {
    /// Validates that the data is convex: each value lies on the envelope within
    /// `1e-9·(1 + |v|)`.
    pub fn new(body: ConvexBody, nodes: &[Vec<f64>], values: Vec<f64>) -> Result<Self> {
        let nodes = parse_nodes(body.dim(), nodes)?;
        check_nodes(&nodes, &values)?;
        let h = Self::assemble(body, nodes, values);
        for (i, cell) in h.cells.iter().enumerate() {
            if cell.is_empty() {
                let v = h.values[i];
                let excess = v - h.pieces.eval(&h.nodes[i]);
                if excess > CONVEXITY_TOLERANCE * (1.0 + v.abs()) {
                    return Err(Error::NonConvex { node: i, excess });
                }
            }
        }
        Ok(h)
    }

    /// `h_P` sampled at the nodes.
    pub fn support_function(body: ConvexBody, nodes: &[Vec<f64>]) -> Result<Self> {
        let pts = parse_nodes(body.dim(), nodes)?;
        let values: Vec<f64> = pts.iter().map(|x| body.support_at(x)).collect();
        check_nodes(&pts, &values)?;
        Ok(Self::assemble(body, pts, values))
    }

    /// Envelope of arbitrary node data, see [`Obstacle::envelope`].
    pub fn envelope_of(body: ConvexBody, nodes: &[Vec<f64>], values: Vec<f64>) -> Result<Self> {
        Ok(Obstacle::new(body, nodes, values)?.envelope())
    }

    pub(crate) fn assemble(body: ConvexBody, nodes: Vec<Point>, values: Vec<f64>) -> Self {
        let engine = CellEngine::new(&body, &nodes);
        let cells = engine.all_cells(&values);
        let pieces = Pieces::new(body.dim(), &nodes, &values, &cells);
        PLConvexFunction {
            body,
            nodes,
            values,
            cells,
            pieces,
        }
    }

    pub(crate) fn biconjugate(body: ConvexBody, nodes: Vec<Point>, obstacle: &[f64]) -> Self {
        let first = Self::assemble(body, nodes, obstacle.to_vec());
        let values: Vec<f64> = first
            .nodes
            .iter()
            .zip(obstacle)
            .zip(&first.cells)
            .map(|((x, &o), cell)| if cell.is_empty() { first.pieces.eval(x).min(o) } else { o })
            .collect();
        if values == first.values {
            return first;
        }
        Self::assemble(first.body, first.nodes, values)
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i][..self.dim()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> + '_ {
        let dim = self.dim();
        self.nodes.iter().map(move |x| &x[..dim])
    }

    pub(crate) fn points(&self) -> &[Point] {
        &self.nodes
    }

    pub(crate) fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of the represented function anywhere in ℝⁿ.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let p = to_point(self.dim(), x)?;
        Ok(self.eval_point(&p))
    }

    pub(crate) fn eval_point(&self, x: &Point) -> f64 {
        self.pieces.eval(x)
    }

    /// `h + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut h = self.clone();
        for v in &mut h.values {
            *v += c;
        }
        for o in &mut h.pieces.offsets {
            *o -= c;
        }
        for l in &mut h.pieces.line {
            l.1 -= c;
        }
        h
    }

    /// The same node set carrying `values`, reduced to its envelope.
    pub fn with_obstacle(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::IncompatibleGrids);
        }
        Ok(Self::biconjugate(self.body.clone(), self.nodes.clone(), values))
    }

    /// `sup_{ℝⁿ} (h − h_P)`, attained at the origin.
    pub fn sup_minus_support(&self) -> f64 {
        self.eval_point(&ORIGIN)
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.len() == other.len()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(a, b)| (0..3).all(|d| (a[d] - b[d]).abs() <= 1e-12 * (1.0 + a[d].abs())))
    }
}

/// `ρ_r(x) = (r/2)·log(1 + e^{2x₁} + … + e^{2xₙ})`, evaluated without overflow.
pub fn reference_potential(r: f64, x: &[f64]) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("r = {r} must be positive")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let m = x.iter().map(|&v| 2.0 * v).fold(0.0, f64::max);
    let s = (-m).exp() + x.iter().map(|&v| (2.0 * v - m).exp()).sum::<f64>();
    Ok(0.5 * r * (m + s.ln()))
}

/// Canonical order so that the body intersection is symmetric in its arguments.
fn ordered<'a>(a: &'a ConvexBody, b: &'a ConvexBody) -> (&'a ConvexBody, &'a ConvexBody) {
    let key = |p: &ConvexBody| -> Vec<f64> { p.vertices().flat_map(|v| v.to_vec()).collect() };
    let (ka, kb) = (key(a), key(b));
    let ord = ka
        .iter()
        .zip(&kb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(ka.len().cmp(&kb.len()));
    if ord.is_le() {
        (a, b)
    } else {
        (b, a)
    }
}

fn common_body(a: &ConvexBody, b: &ConvexBody) -> Result<ConvexBody> {
    let (p, q) = ordered(a, b);
    if p.num_vertices() == q.num_vertices() && p.vertices().zip(q.vertices()).all(|(x, y)| x == y) {
        return Ok(p.clone());
    }
    p.intersection(q)?.ok_or(Error::EmptyIntersection)
}

/// Largest convex function below `min(u, v)` on the shared grid. Its body is the
/// intersection of the two bodies.
pub fn rooftop(u: &PLConvexFunction, v: &PLConvexFunction) -> Result<PLConvexFunction> {
    if !u.same_grid(v) {
        return Err(Error::IncompatibleGrids);
    }
    let body = common_body(&u.body, &v.body)?;
    let obstacle: Vec<f64> = u.values.iter().zip(&v.values).map(|(a, b)| a.min(*b)).collect();
    Ok(PLConvexFunction::biconjugate(body, u.nodes.clone(), &obstacle))
}

/// Maximum number of doublings of the shift `C` in [`singularity_envelope`].
pub const MAX_DOUBLINGS: usize = 60;

/// `lim_{C→∞} rooftop(ψ + C, χ)`, with `C = 1, 2, 4, …` until two successive
/// envelopes differ by less than `tol` at every node.
pub fn singularity_envelope(psi: &PLConvexFunction, chi: &PLConvexFunction, tol: f64) -> Result<PLConvexFunction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be positive")));
    }
    if !psi.same_grid(chi) {
        return Err(Error::IncompatibleGrids);
    }
    let body = common_body(&psi.body, &chi.body)?;
    let mut prev: Option<(Vec<f64>, PLConvexFunction)> = None;
    let mut change = f64::INFINITY;
    let mut shift = 1.0;
    for _ in 0..=MAX_DOUBLINGS {
        let obstacle: Vec<f64> = psi.values.iter().zip(&chi.values).map(|(a, b)| (a + shift).min(*b)).collect();
        if let Some((prev_obstacle, prev_env)) = &prev {
            if *prev_obstacle == obstacle {
                return Ok(prev_env.clone());
            }
        }
        let env = PLConvexFunction::biconjugate(body.clone(), psi.nodes.clone(), &obstacle);
        if let Some((_, prev_env)) = &prev {
            change = env
                .values
                .iter()
                .zip(&prev_env.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if change < tol {
                return Ok(env);
            }
        }
        prev = Some((obstacle, env));
        shift *= 2.0;
    }
    Err(Error::NoStabilization {
        doublings: MAX_DOUBLINGS,
        change,
    })
}

/// One level of an [`is_model`] refinement schedule: the grid `[−radius, radius]ⁿ`
/// with spacing `mesh`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridLevel {
    pub radius: f64,
    pub mesh: f64,
}

/// Boxes `[−2ᵏ, 2ᵏ]`. In one dimension `k = 3..8` with the mesh halving from 1;
/// in two and three dimensions `k = 2..5` at mesh 1 to keep node counts moderate.
pub fn default_schedule(dim: usize) -> Vec<GridLevel> {
    if dim == 1 {
        (3..=8)
            .map(|k| GridLevel {
                radius: 2f64.powi(k),
                mesh: 0.5f64.powi(k - 3),
            })
            .collect()
    } else {
        (2..=5)
            .map(|k| GridLevel {
                radius: 2f64.powi(k),
                mesh: 1.0,
            })
            .collect()
    }
}

/// Nodes of `[−radius, radius]ⁿ` with spacing close to `mesh` (the origin is a
/// node whenever `radius/mesh` is an integer).
pub fn box_grid(dim: usize, radius: f64, mesh: f64) -> Result<Vec<Vec<f64>>> {
    crate::geometry::check_dim(dim)?;
    if !(radius > 0.0 && mesh > 0.0) {
        return Err(Error::InvalidParameter("grid radius and mesh must be positive".into()));
    }
    let half = (radius / mesh).round().max(1.0) as usize;
    let lo = vec![-radius; dim];
    let hi = vec![radius; dim];
    grid(&lo, &hi, &vec![2 * half + 1; dim])
}

/// Tensor grid with `counts[d]` equispaced nodes on `[lo[d], hi[d]]`.
pub fn grid(lo: &[f64], hi: &[f64], counts: &[usize]) -> Result<Vec<Vec<f64>>> {
    let dim = lo.len();
    crate::geometry::check_dim(dim)?;
    if hi.len() != dim || counts.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: hi.len().min(counts.len()),
        });
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::InvalidParameter("grid counts must be positive".into()));
    }
    let coord = |d: usize, k: usize| {
        if counts[d] == 1 {
            0.5 * (lo[d] + hi[d])
        } else {
            lo[d] + (hi[d] - lo[d]) * k as f64 / (counts[d] - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(counts.iter().product());
    let mut idx = vec![0usize; dim];
    loop {
        out.push((0..dim).map(|d| coord(d, idx[d])).collect());
        let mut d = 0;
        loop {
            if d == dim {
                return Ok(out);
            }
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Gap statistics of one [`is_model`] level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelLevel {
    pub radius: f64,
    pub mesh: f64,
    /// `sup (P[h](ρ_r) − h)` over the grid.
    pub sup_gap: f64,
    /// `sup − inf` of the same gap; unchanged by adding constants to `h`.
    pub oscillation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelCheck {
    pub is_model: bool,
    /// `sup_gap` at the last level.
    pub bound: f64,
    pub levels: Vec<ModelLevel>,
}

/// Relative growth counted as divergence by [`is_model`].
pub const GROWTH_FACTOR: f64 = 1.1;
/// Consecutive growing steps that make [`is_model`] answer `false`.
pub const GROWTH_STEPS: usize = 3;

/// Model-type test for `h` over the body `rΣ` reference `ρ_r`.
pub fn is_model(h: &PLConvexFunction, r: f64, schedule: &[GridLevel]) -> Result<ModelCheck> {
    is_model_fn(|x| h.eval(x).unwrap_or(f64::NAN), h.body(), r, schedule)
}

/// [`is_model`] for a convex function given by evaluation, sampled afresh on
/// each level with asymptotic body `body`.
pub fn is_model_fn(f: impl Fn(&[f64]) -> f64, body: &ConvexBody, r: f64, schedule: &[GridLevel]) -> Result<ModelCheck> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty refinement schedule".into()));
    }
    let dim = body.dim();
    let sigma = ConvexBody::unit_simplex(dim)?.scale(r)?;
    let mut levels = Vec::with_capacity(schedule.len());
    for level in schedule {
        let nodes = box_grid(dim, level.radius, level.mesh)?;
        let psi = Obstacle::from_fn(body.clone(), &nodes, &f)?.envelope();
        let rho: Vec<f64> = nodes.iter().map(|x| reference_potential(r, x)).collect::<Result<_>>()?;
        let chi = Obstacle::new(sigma.clone(), &nodes, rho)?.envelope();
        let env = singularity_envelope(&psi, &chi, 1e-10)?;
        let gaps: Vec<f64> = env.values.iter().zip(&psi.values).map(|(e, h)| e - h).collect();
        let sup = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let inf = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        levels.push(ModelLevel {
            radius: level.radius,
            mesh: level.mesh,
            sup_gap: sup,
            oscillation: sup - inf,
        });
    }
    let mut run = 0;
    let mut diverges = false;
    for w in levels.windows(2) {
        if w[1].oscillation >= GROWTH_FACTOR * w[0].oscillation && w[1].oscillation > 1e-9 {
            run += 1;
            if run >= GROWTH_STEPS {
                diverges = true;
            }
        } else {
            run = 0;
        }
    }
    Ok(ModelCheck {
        is_model: !diverges,
        bound: levels.last().map_or(0.0, |l| l.sup_gap),
        levels,
    })
}

/// `h*(p) = max over nodes of ⟨p, xᵢ⟩ − vᵢ` at each dual point.
pub fn legendre(h: &PLConvexFunction, dual: &[Vec<f64>]) -> Result<Vec<f64>> {
    dual.iter()
        .map(|p| {
            let q = to_point(h.dim(), p)?;
            Ok(h.nodes
                .iter()
                .zip(&h.values)
                .map(|(x, v)| dot(&q, x) - v)
                .fold(f64::NEG_INFINITY, f64::max))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval() -> ConvexBody {
        ConvexBody::unit_cube(1).unwrap()
    }

    fn line(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
        grid(&[lo], &[hi], &[n]).unwrap()
    }

    /// Largest convex minorant of 1-D points by brute force over all chords.
    fn brute_lower_hull(xs: &[f64], vs: &[f64]) -> Vec<f64> {
        let n = xs.len();
        (0..n)
            .map(|k| {
                let mut best = vs[k];
                for i in 0..n {
                    for j in 0..n {
                        if xs[i] <= xs[k] && xs[k] <= xs[j] && xs[i] < xs[j] {
                            let t = (xs[k] - xs[i]) / (xs[j] - xs[i]);
                            best = best.min((1.0 - t) * vs[i] + t * vs[j]);
                        }
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn eval_examples() {
        let p = ConvexBody::unit_cube(2).unwrap();
        let nodes = box_grid(2, 2.0, 1.0).unwrap();
        let h = PLConvexFunction::support_function(p, &nodes).unwrap();
        assert_eq!(h.eval(&[2.0, 3.0]).unwrap(), 5.0);
        for (i, x) in nodes.iter().enumerate() {
            assert_eq!(h.eval(x).unwrap(), h.values()[i]);
        }
        let single = PLConvexFunction::new(unit_interval(), &[vec![0.0]], vec![-1.0]).unwrap();
        assert_eq!(single.eval(&[4.0]).unwrap(), 3.0);
        assert_eq!(single.eval(&[-4.0]).unwrap(), -1.0);
    }

    #[test]
    fn nonconvex_data_is_rejected() {
        let err = PLConvexFunction::new(unit_interval(), &line(-1.0, 1.0, 3), vec![0.0, 1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonConvex { node: 1, .. }));
        // slope 2 is outside P = [0, 1]
        let err = PLConvexFunction::new(unit_interval(), &line(0.0, 1.0, 2), vec![0.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::NonConvex { .. }));
    }

    #[test]
    fn reference_potential_examples() {
        assert!((reference_potential(1.0, &[0.0]).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((reference_potential(2.0, &[0.0, 0.0]).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((reference_potential(1.0, &[20.0]).unwrap() - 20.0).abs() < 1e-12);
        assert!(reference_potential(1.0, &[800.0]).unwrap().is_finite());
        assert!(reference_potential(0.0, &[0.0]).is_err());
    }

    #[test]
    fn rooftop_examples() {
        let p = ConvexBody::unit_cube(2).unwrap();
        let nodes = box_grid(2, 2.0, 1.0).unwrap();
        let hp = PLConvexFunction::support_function(p.clone(), &nodes).unwrap();
        let r = rooftop(&hp, &hp.shifted(-1.0)).unwrap();
        for (a, b) in r.values().iter().zip(hp.values()) {
            assert!((a - (b - 1.0)).abs() < 1e-12);
        }
        let q = ConvexBody::unit_simplex(2).unwrap();
        let hq = PLConvexFunction::support_function(q, &nodes).unwrap();
        let r = rooftop(&hp, &hq).unwrap();
        for (a, b) in r.values().iter().zip(hq.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        // −|x| on [−1, 1]: slopes ±1 need the body [−1, 1]
        let sym = ConvexBody::cross_polytope(1).unwrap();
        let xs = line(-1.0, 1.0, 21);
        let up = PLConvexFunction::new(sym.clone(), &xs, xs.iter().map(|x| x[0]).collect()).unwrap();
        let down = PLConvexFunction::new(sym, &xs, xs.iter().map(|x| -x[0]).collect()).unwrap();
        let r = rooftop(&up, &down).unwrap();
        let flat: Vec<f64> = xs.iter().map(|x| -x[0].abs()).collect();
        let oracle = brute_lower_hull(&xs.iter().map(|x| x[0]).collect::<Vec<_>>(), &flat);
        for (a, b) in r.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
            assert!((a + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singularity_envelope_examples() {
        let p = unit_interval();
        let q = ConvexBody::new(1, &[vec![0.0], vec![0.5]]).unwrap();
        let xs = line(-8.0, 8.0, 33);
        let hp = PLConvexFunction::support_function(p, &xs).unwrap();
        let hq = PLConvexFunction::support_function(q, &xs).unwrap();
        let e = singularity_envelope(&hq, &hp, 1e-10).unwrap();
        for (a, b) in e.values().iter().zip(hq.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let e = singularity_envelope(&hp, &hp, 1e-10).unwrap();
        assert_eq!(e.values(), hp.values());
        let e = singularity_envelope(&hp.shifted(-5.0), &hp, 1e-10).unwrap();
        for (a, b) in e.values().iter().zip(hp.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_examples() {
        let xs = line(-10.0, 10.0, 41);
        let hp = PLConvexFunction::support_function(unit_interval(), &xs).unwrap();
        assert_eq!(legendre(&hp, &[vec![0.5]]).unwrap()[0], 0.0);
        assert_eq!(legendre(&hp, &[vec![2.0]]).unwrap()[0], 10.0);
        let mesh = 0.01;
        let xs = line(-5.0, 5.0, 1001);
        let wide = ConvexBody::new(1, &[vec![-5.0], vec![5.0]]).unwrap();
        let quad = PLConvexFunction::new(wide, &xs, xs.iter().map(|x| 0.5 * x[0] * x[0]).collect()).unwrap();
        let v = legendre(&quad, &[vec![2.0]]).unwrap()[0];
        assert!((v - 2.0).abs() <= 2.0 * mesh * mesh);
    }

    #[test]
    fn model_detection() {
        let p = unit_interval();
        let sched = default_schedule(1);
        let hp = |x: &[f64]| x[0].max(0.0);
        let check = is_model_fn(hp, &p, 1.0, &sched).unwrap();
        assert!(check.is_model);
        assert!(check.bound <= 0.5 * 2f64.ln() + 1e-6);
        let shifted = is_model_fn(|x: &[f64]| x[0].max(0.0) + 3.0, &p, 1.0, &sched).unwrap();
        assert!(shifted.is_model);
        let log = |x: &[f64]| {
            let t = x[0].max(0.0);
            t - (1.0 + t).ln()
        };
        let check = is_model_fn(log, &p, 1.0, &sched).unwrap();
        assert!(!check.is_model, "{:?}", check.levels);
    }

    #[test]
    fn serde_round_trip() {
        let json = r#"{"body":{"dim":1,"vertices":[[0],[1]]},"nodes":[[-1],[0],[1]],"values":[0,0,1]}"#;
        let h: PLConvexFunction = serde_json::from_str(json).unwrap();
        assert_eq!(h.eval(&[3.0]).unwrap(), 3.0);
        let bad = r#"{"body":{"dim":1,"vertices":[[0],[1]]},"nodes":[[-1],[0],[1]],"values":[0,1,0]}"#;
        assert!(serde_json::from_str::<PLConvexFunction>(bad).is_err());
        let o: Obstacle = serde_json::from_str(bad).unwrap();
        assert_eq!(o.envelope().values(), &[0.0, 0.0, 0.0]);
    }
}
