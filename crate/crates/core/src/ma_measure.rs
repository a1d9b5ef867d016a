//! Alexandrov Monge-Ampère measure: node `i` carries `(n!/2ⁿ)·Vol(∂h(xᵢ) ∩ P)`.
//!
//! Nodes on the boundary of the node hull absorb the mass that a function on all
//! of ℝⁿ would spread to infinity. Their mass is reported separately as
//! `boundary_remainder` and their entry in `masses` is zero.

use serde::{Serialize, Serializer};

use crate::convexfun::PLConvexFunction;
use crate::error::{Error, Result};
use crate::geometry::hull::dot;
use crate::geometry::ConvexBody;
use crate::mass_factor;

#[derive(Clone, Debug)]
pub struct MAResult {
    /// Mass at each node; zero at truncation-boundary nodes.
    pub masses: Vec<f64>,
    /// Subgradient cell of each node, `None` when empty.
    pub cells: Vec<Option<ConvexBody>>,
    /// Sum of `masses`.
    pub total: f64,
    /// Mass of the cells of truncation-boundary nodes.
    pub boundary_remainder: f64,
    /// Which nodes lie on the boundary of the node hull.
    pub on_boundary: Vec<bool>,
}

#[derive(Serialize)]
struct MAResultRepr<'a> {
    masses: &'a [f64],
    total: f64,
    boundary_remainder: f64,
}

impl Serialize for MAResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MAResultRepr {
            masses: &self.masses,
            total: self.total,
            boundary_remainder: self.boundary_remainder,
        }
        .serialize(s)
    }
}

/// `∂h(xᵢ) ∩ P`, `None` when the node lies strictly above the envelope.
pub fn subgradient_cell(h: &PLConvexFunction, i: usize) -> Result<Option<ConvexBody>> {
    let cell = h
        .cells()
        .get(i)
        .ok_or_else(|| Error::InvalidParameter(format!("node index {i} out of range")))?;
    if cell.is_empty() {
        return Ok(None);
    }
    ConvexBody::from_points(h.dim(), &cell.vertices).map(Some)
}

/// Nodes on the boundary of the convex hull of all nodes.
pub(crate) fn hull_boundary(dim: usize, nodes: &[crate::geometry::Point]) -> Vec<bool> {
    let hull = match ConvexBody::from_points(dim, nodes) {
        Ok(b) => b,
        Err(_) => return vec![true; nodes.len()],
    };
    if hull.is_degenerate() {
        return vec![true; nodes.len()];
    }
    let extent = nodes
        .iter()
        .map(|x| x.iter().map(|c| c.abs()).fold(0.0, f64::max))
        .fold(1.0, f64::max);
    let tol = 1e-9 * extent;
    nodes
        .iter()
        .map(|x| hull.halfspaces().iter().any(|h| dot(&h.normal, x) >= h.offset - tol))
        .collect()
}

pub fn ma(h: &PLConvexFunction) -> MAResult {
    let factor = mass_factor(h.dim());
    let on_boundary = hull_boundary(h.dim(), h.points());
    let mut masses = Vec::with_capacity(h.len());
    let mut boundary_remainder = 0.0;
    let mut cells = Vec::with_capacity(h.len());
    for (cell, &edge) in h.cells().iter().zip(&on_boundary) {
        let m = factor * cell.volume;
        if edge {
            boundary_remainder += m;
            masses.push(0.0);
        } else {
            masses.push(m);
        }
        cells.push(if cell.is_empty() {
            None
        } else {
            ConvexBody::from_points(h.dim(), &cell.vertices).ok()
        });
    }
    MAResult {
        total: masses.iter().sum(),
        masses,
        cells,
        boundary_remainder,
        on_boundary,
    }
}

/// `(n!/2ⁿ)·Vol(P)`, the total mass of `MA(h_P)`.
pub fn full_mass(body: &ConvexBody) -> f64 {
    mass_factor(body.dim()) * body.volume()
}

/// Whether the interior nodes carry the full mass `(n!/2ⁿ)·Vol(P)` within `tol`.
pub fn full_mass_check(h: &PLConvexFunction, tol: f64) -> bool {
    (ma(h).total - full_mass(h.body())).abs() <= tol
}
