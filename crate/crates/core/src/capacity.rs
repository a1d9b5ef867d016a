//! Relative extremal functions and capacities of finite unions of boxes.
//!
//! For a compact `K` the extremal function `g` is the largest convex function
//! with subgradients in `P` such that `g ≤ h_P` everywhere and `g ≤ h_P − 1` on
//! `K`. Its capacity is computed twice: as the Monge-Ampère mass charged on `K`
//! and as the energy `Σ (h_P − g)·MA(g)`. For compact `K` the two agree.

use serde::{Deserialize, Serialize};

use crate::convexfun::{Obstacle, PLConvexFunction};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::ma_measure::ma;

/// Membership slack for nodes on the boundary of a box.
const MEMBERSHIP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Finite union of closed axis-aligned boxes. An empty union is allowed and has
/// capacity zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactRegion {
    pub boxes: Vec<AxisBox>,
}

impl CompactRegion {
    pub fn new(boxes: Vec<AxisBox>) -> Result<Self> {
        let r = CompactRegion { boxes };
        r.validate(None)?;
        Ok(r)
    }

    /// The single box `[lo, hi]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Self::new(vec![AxisBox {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
        }])
    }

    /// The single point `x`.
    pub fn point(x: &[f64]) -> Result<Self> {
        Self::cuboid(x, x)
    }

    fn validate(&self, dim: Option<usize>) -> Result<()> {
        let dim = dim.or_else(|| self.boxes.first().map(|b| b.lo.len()));
        for b in &self.boxes {
            let d = dim.unwrap_or(b.lo.len());
            for len in [b.lo.len(), b.hi.len()] {
                if len != d {
                    return Err(Error::DimensionMismatch { expected: d, found: len });
                }
            }
            if b.lo.iter().chain(&b.hi).any(|c| !c.is_finite()) {
                return Err(Error::NonFinite);
            }
            if b.lo.iter().zip(&b.hi).any(|(l, h)| l > h) {
                return Err(Error::InvalidParameter("box with lo > hi".into()));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|b| {
            x.iter()
                .zip(b.lo.iter().zip(&b.hi))
                .all(|(c, (l, h))| *c >= l - MEMBERSHIP_TOLERANCE && *c <= h + MEMBERSHIP_TOLERANCE)
        })
    }

    fn corners(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for b in &self.boxes {
            let n = b.lo.len();
            for mask in 0..1usize << n {
                out.push((0..n).map(|d| if mask >> d & 1 == 1 { b.hi[d] } else { b.lo[d] }).collect());
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityReport {
    pub extremal: PLConvexFunction,
    /// Mass of `MA(g)` on `K`.
    pub cap_mass: f64,
    /// `Σ (h_P − g)·MA(g)`.
    pub cap_energy: f64,
}

/// Grid nodes plus the corners of `K`, checked to contain `K` in the interior
/// of their bounding box.
fn capacity_nodes(k: &CompactRegion, body: &ConvexBody, grid: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let dim = body.dim();
    k.validate(Some(dim))?;
    if grid.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(x) = grid.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    for d in 0..dim {
        let lo = grid.iter().map(|x| x[d]).fold(f64::INFINITY, f64::min);
        let hi = grid.iter().map(|x| x[d]).fold(f64::NEG_INFINITY, f64::max);
        if k.boxes.iter().any(|b| !(b.lo[d] > lo && b.hi[d] < hi)) {
            return Err(Error::GridDoesNotCover);
        }
    }
    let mut nodes = grid.to_vec();
    for c in k.corners() {
        let known = nodes
            .iter()
            .any(|x| x.iter().zip(&c).all(|(a, b)| (a - b).abs() <= MEMBERSHIP_TOLERANCE));
        if !known {
            nodes.push(c);
        }
    }
    Ok(nodes)
}

/// `g = sup{u convex, ∂u ⊂ P : u ≤ h_P, u ≤ h_P − 1 on K}` on `grid`, computed
/// as the envelope of the obstacle `h_P − 1` on `K` and `h_P` elsewhere. The
/// corners of `K` are added to the grid so that every nonempty `K` carries nodes.
pub fn extremal_function(k: &CompactRegion, body: &ConvexBody, grid: &[Vec<f64>]) -> Result<PLConvexFunction> {
    let nodes = capacity_nodes(k, body, grid)?;
    let obstacle = Obstacle::from_fn(body.clone(), &nodes, |x| {
        let h = body.support(x).unwrap_or(f64::NAN);
        if k.contains(x) {
            h - 1.0
        } else {
            h
        }
    })?;
    Ok(obstacle.envelope())
}

pub fn capacity(k: &CompactRegion, body: &ConvexBody, grid: &[Vec<f64>]) -> Result<CapacityReport> {
    let extremal = extremal_function(k, body, grid)?;
    let measure = ma(&extremal);
    let mut cap_mass = 0.0;
    let mut cap_energy = 0.0;
    for (i, x) in extremal.nodes().enumerate() {
        let m = measure.masses[i];
        if k.contains(x) {
            cap_mass += m;
        }
        cap_energy += (body.support(x)? - extremal.values()[i]) * m;
    }
    Ok(CapacityReport {
        extremal,
        cap_mass,
        cap_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfun::grid;

    fn unit() -> ConvexBody {
        ConvexBody::unit_cube(1).unwrap()
    }

    fn line(a: f64, b: f64) -> Vec<Vec<f64>> {
        grid(&[a], &[b], &[(b - a) as usize + 1]).unwrap()
    }

    fn check(k: CompactRegion, expected: f64, g: impl Fn(f64) -> f64) {
        let r = capacity(&k, &unit(), &line(-4.0, 4.0)).unwrap();
        assert!((r.cap_mass - expected).abs() < 1e-12, "mass {}", r.cap_mass);
        assert!((r.cap_energy - expected).abs() < 1e-12, "energy {}", r.cap_energy);
        for (x, v) in r.extremal.nodes().zip(r.extremal.values()) {
            assert!((v - g(x[0])).abs() < 1e-12, "g({}) = {v}", x[0]);
        }
    }

    #[test]
    fn one_dimensional_instances() {
        check(CompactRegion::point(&[0.0]).unwrap(), 0.5, |x| x.max(0.0) - 1.0);
        check(CompactRegion::cuboid(&[1.0], &[2.0]).unwrap(), 0.5, |x| (x - 1.0).max(0.0));
        check(CompactRegion::cuboid(&[2.0], &[3.0]).unwrap(), 0.25, |x| 0f64.max(x / 2.0).max(x - 1.0));
    }

    #[test]
    fn empty_region_has_zero_capacity() {
        let r = capacity(&CompactRegion::new(vec![]).unwrap(), &unit(), &line(-3.0, 3.0)).unwrap();
        assert_eq!(r.cap_mass, 0.0);
        assert_eq!(r.cap_energy, 0.0);
    }

    #[test]
    fn off_grid_corners_are_added() {
        let k = CompactRegion::cuboid(&[0.25], &[0.5]).unwrap();
        let r = capacity(&k, &unit(), &line(-3.0, 3.0)).unwrap();
        assert_eq!(r.extremal.len(), 9);
        assert!(r.cap_mass > 0.0);
        assert!((r.cap_mass - r.cap_energy).abs() < 1e-12);
    }

    #[test]
    fn uncovered_and_malformed_regions() {
        let k = CompactRegion::cuboid(&[2.0], &[3.0]).unwrap();
        assert_eq!(capacity(&k, &unit(), &line(-3.0, 3.0)).unwrap_err(), Error::GridDoesNotCover);
        assert!(CompactRegion::cuboid(&[1.0], &[0.0]).is_err());
        assert!(CompactRegion::cuboid(&[1.0], &[f64::NAN]).is_err());
        let k2 = CompactRegion::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(capacity(&k2, &unit(), &line(-3.0, 3.0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn planar_box_capacity_identity() {
        let p = ConvexBody::unit_cube(2).unwrap();
        let nodes = crate::convexfun::box_grid(2, 3.0, 0.5).unwrap();
        let k = CompactRegion::cuboid(&[-0.5, -0.5], &[0.5, 1.0]).unwrap();
        let r = capacity(&k, &p, &nodes).unwrap();
        assert!(r.cap_mass > 0.0 && r.cap_mass <= 0.5 + 1e-9);
        assert!((r.cap_mass - r.cap_energy).abs() < 1e-9);
        let json: CompactRegion = serde_json::from_str(r#"{"boxes":[{"lo":[-0.5,-0.5],"hi":[0.5,1.0]}]}"#).unwrap();
        assert_eq!(json, k);
    }
}
