//! Volume polynomials of Minkowski combinations and mixed volumes.
//!
//! `Vol(t₁P₁ + … + t_kP_k)` is a homogeneous polynomial of degree `n` in `t ≥ 0`.
//! It is recovered by exact interpolation over the rationals at the lattice
//! points `t = 1 + d`, `|d| ≤ n`, and checked against the remaining points of
//! `{1, …, n+1}ᵏ`. Mixed volumes are normalized so that `MV(P, …, P) = Vol(P)`.
//!
//! Equality tests use an absolute tolerance of `1e-9`, which is meaningful for
//! volumes up to about `10⁶`; rescale larger bodies first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::hull::dot;
use crate::geometry::ConvexBody;

/// Absolute tolerance of the inequality checks.
pub const CHECK_TOLERANCE: f64 = 1e-9;

/// Relative threshold for the interpolation residual.
const FIT_THRESHOLD: f64 = 1e-8;

/// Relative threshold for coefficients that vanish by homogeneity.
const VANISHING_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct VolumePolynomial {
    dim: usize,
    /// `(multi-degree, coefficient)` over all multi-degrees of total degree `dim`.
    terms: Vec<(Vec<u32>, f64)>,
    /// Largest interpolation error at the check points.
    residual: f64,
}

impl VolumePolynomial {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of bodies.
    pub fn num_bodies(&self) -> usize {
        self.terms.first().map_or(0, |(d, _)| d.len())
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Coefficient of `t^degree`, zero for absent multi-degrees.
    pub fn coefficient(&self, degree: &[u32]) -> f64 {
        self.terms
            .iter()
            .find(|(d, _)| d.as_slice() == degree)
            .map_or(0.0, |(_, c)| *c)
    }

    pub fn eval(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.num_bodies() {
            return Err(Error::DimensionMismatch {
                expected: self.num_bodies(),
                found: t.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(d, c)| c * d.iter().zip(t).map(|(&e, &s)| s.powi(e as i32)).product::<f64>())
            .sum())
    }
}

/// All multi-indices of length `k` with entries summing to at most `n`,
/// graded by total degree.
fn multi_indices(k: usize, n: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(k, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut out);
    out.sort_by_key(|d| std::cmp::Reverse(d.iter().sum::<u32>()));
    out
}

fn same_dim(bodies: &[ConvexBody]) -> Result<usize> {
    let first = bodies.first().ok_or(Error::Empty)?;
    for b in bodies {
        if b.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: b.dim(),
            });
        }
    }
    Ok(first.dim())
}

fn combination_volume(bodies: &[ConvexBody], t: &[u32]) -> Result<f64> {
    let mut sum = bodies[0].scale(t[0] as f64)?;
    for (b, &s) in bodies.iter().zip(t).skip(1) {
        sum = sum.minkowski_sum(&b.scale(s as f64)?)?;
    }
    Ok(sum.volume())
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Solves `a·x = b` exactly; `a` is square and nonsingular.
fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero()).expect("unisolvent lattice");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..m {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..m {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &f * &b[col];
            b[r] -= delta;
        }
    }
    (0..m).map(|r| &b[r] / &a[r][r]).collect()
}

fn monomial(d: &[u32], t: &[u32]) -> BigInt {
    d.iter()
        .zip(t)
        .map(|(&e, &s)| BigInt::from(s).pow(e))
        .product()
}

/// Fits `Vol(Σ tᵢPᵢ)` for `1 ≤ k ≤ n + 1` bodies of dimension `n`.
pub fn volume_polynomial(bodies: &[ConvexBody]) -> Result<VolumePolynomial> {
    let n = same_dim(bodies)?;
    let k = bodies.len();
    if k > n + 1 {
        return Err(Error::InvalidParameter(format!(
            "at most {} bodies are supported in dimension {n}, got {k}",
            n + 1
        )));
    }
    let degrees = multi_indices(k, n as u32);
    let nodes: Vec<Vec<u32>> = degrees.iter().map(|d| d.iter().map(|e| e + 1).collect()).collect();
    let volumes = nodes
        .iter()
        .map(|t| combination_volume(bodies, t))
        .collect::<Result<Vec<f64>>>()?;
    let a: Vec<Vec<BigRational>> = nodes
        .iter()
        .map(|t| degrees.iter().map(|d| BigRational::from_integer(monomial(d, t))).collect())
        .collect();
    let coeffs = solve_exact(a, volumes.iter().map(|&v| rational(v)).collect());
    let coeffs: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();

    let eval = |t: &[u32]| -> f64 {
        degrees
            .iter()
            .zip(&coeffs)
            .map(|(d, c)| c * d.iter().zip(t).map(|(&e, &s)| (s as f64).powi(e as i32)).product::<f64>())
            .sum()
    };
    // every other point of {1, …, n+1}ᵏ
    let mut scale = volumes.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut residual = 0.0f64;
    let side = n as u32 + 1;
    let total = (side as usize).pow(k as u32);
    for code in 0..total {
        let mut t = Vec::with_capacity(k);
        let mut c = code;
        for _ in 0..k {
            t.push((c % side as usize) as u32 + 1);
            c /= side as usize;
        }
        if nodes.contains(&t) {
            continue;
        }
        let v = combination_volume(bodies, &t)?;
        scale = scale.max(v.abs());
        residual = residual.max((eval(&t) - v).abs());
    }
    let threshold = FIT_THRESHOLD * scale;
    if !(residual <= threshold) {
        return Err(Error::FitResidual { residual, threshold });
    }
    let mut terms = Vec::new();
    for (d, &c) in degrees.iter().zip(&coeffs) {
        if d.iter().sum::<u32>() == n as u32 {
            terms.push((d.clone(), c));
        } else if !(c.abs() <= VANISHING_THRESHOLD * scale) {
            return Err(Error::FitResidual {
                residual: c.abs(),
                threshold: VANISHING_THRESHOLD * scale,
            });
        }
    }
    Ok(VolumePolynomial {
        dim: n,
        terms,
        residual,
    })
}

/// `MV(P₁, …, Pₙ)`: the coefficient of `t₁⋯tₙ` divided by `n!`.
pub fn mixed_volume(bodies: &[ConvexBody]) -> Result<f64> {
    let n = same_dim(bodies)?;
    if bodies.len() != n {
        return Err(Error::InvalidParameter(format!(
            "mixed volume in dimension {n} takes {n} bodies, got {}",
            bodies.len()
        )));
    }
    let poly = volume_polynomial(bodies)?;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(poly.coefficient(&vec![1; n]) / fact)
}

/// Mixed area of two planar bodies from the edges of `p`:
/// `½ Σ h_Q(νᵢ)·lenᵢ` over the edges of `p` with outer unit normals `νᵢ`.
pub fn mixed_area_edge_formula(p: &ConvexBody, q: &ConvexBody) -> Result<f64> {
    for b in [p, q] {
        if b.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: b.dim() });
        }
    }
    let v = p.points();
    match p.affine_dim() {
        0 => Ok(0.0),
        1 => {
            let (a, b) = (v[0], v[1]);
            let d = [b[0] - a[0], b[1] - a[1], 0.0];
            let len = d[0].hypot(d[1]);
            let nu = [d[1] / len, -d[0] / len, 0.0];
            let back = [-nu[0], -nu[1], 0.0];
            Ok(0.5 * len * (q.support_at(&nu) + q.support_at(&back)))
        }
        _ => Ok(0.5
            * p.halfspaces()
                .iter()
                .enumerate()
                .map(|(k, h)| {
                    let (a, b) = (v[k], v[(k + 1) % v.len()]);
                    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                    debug_assert!((dot(&h.normal, &a) - h.offset).abs() < 1e-6 * (1.0 + h.offset.abs()));
                    q.support_at(&h.normal) * len
                })
                .sum::<f64>()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BrunnMinkowski {
    /// `MV(P₁, …, Pₙ)`.
    pub lhs: f64,
    /// `Π Vol(Pᵢ)^{1/n}`.
    pub rhs: f64,
    pub holds: bool,
}

/// `MV(P₁, …, Pₙ) ≥ Π Vol(Pᵢ)^{1/n}`.
pub fn brunn_minkowski_check(bodies: &[ConvexBody]) -> Result<BrunnMinkowski> {
    let n = same_dim(bodies)?;
    if bodies.iter().any(|b| b.is_degenerate()) {
        return Err(Error::DegenerateBody);
    }
    let lhs = mixed_volume(bodies)?;
    let rhs = bodies.iter().map(|b| b.volume().powf(1.0 / n as f64)).product();
    Ok(BrunnMinkowski {
        lhs,
        rhs,
        holds: lhs >= rhs - CHECK_TOLERANCE,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogConcavitySample {
    pub t: f64,
    /// `Vol(tP₁ + (1−t)P₀)`.
    pub volume: f64,
    /// `Vol(tP₁ + (1−t)P₀)^{1/n}`.
    pub lhs: f64,
    /// `t·Vol(P₁)^{1/n} + (1−t)·Vol(P₀)^{1/n}`.
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogConcavity {
    pub holds: bool,
    pub samples: Vec<LogConcavitySample>,
    /// Largest amount by which `log Vol` drops below a chord of adjacent samples.
    pub concavity_defect: f64,
}

/// Brunn–Minkowski along the segment `t ↦ tP₁ + (1−t)P₀` at each sample, plus
/// concavity of `t ↦ log Vol` across the sorted samples.
pub fn log_concavity_check(p0: &ConvexBody, p1: &ConvexBody, t_samples: &[f64]) -> Result<LogConcavity> {
    let bodies = [p0.clone(), p1.clone()];
    let n = same_dim(&bodies)?;
    if p0.is_degenerate() || p1.is_degenerate() {
        return Err(Error::DegenerateBody);
    }
    if let Some(&t) = t_samples.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidParameter(format!("sample {t} outside [0, 1]")));
    }
    let poly = volume_polynomial(&bodies)?;
    let root = |v: f64| v.max(0.0).powf(1.0 / n as f64);
    let (r0, r1) = (root(p0.volume()), root(p1.volume()));
    let mut ts = t_samples.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let samples = ts
        .iter()
        .map(|&t| {
            let volume = poly.eval(&[1.0 - t, t])?;
            Ok(LogConcavitySample {
                t,
                volume,
                lhs: root(volume),
                rhs: t * r1 + (1.0 - t) * r0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut holds = samples.iter().all(|s| s.lhs >= s.rhs - CHECK_TOLERANCE);
    let mut concavity_defect = 0.0f64;
    for w in samples.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let chord = ((c.t - b.t) * a.volume.ln() + (b.t - a.t) * c.volume.ln()) / (c.t - a.t);
        concavity_defect = concavity_defect.max(chord - b.volume.ln());
    }
    holds &= concavity_defect <= CHECK_TOLERANCE;
    Ok(LogConcavity {
        holds,
        samples,
        concavity_defect,
    })
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

    /// Shoelace area of the hull of all pairwise vertex sums.
    fn shoelace_sum(p: &ConvexBody, q: &ConvexBody) -> f64 {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for a in p.vertices() {
            for b in q.vertices() {
                pts.push((a[0] + b[0], a[1] + b[1]));
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
            for &p in iter {
                while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                    hull.pop();
                }
                hull.push(p);
            }
            hull.pop();
        }
        let m = hull.len();
        0.5 * (0..m)
            .map(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % m]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum::<f64>()
    }

    #[test]
    fn multi_indices_count() {
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 3).len(), 20);
        assert_eq!(multi_indices(1, 2), vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn square_and_diamond_polynomial() {
        assert!((shoelace_sum(&square(), &diamond()) - 7.0).abs() < 1e-12);
        let p = volume_polynomial(&[square(), diamond()]).unwrap();
        assert!((p.coefficient(&[2, 0]) - 1.0).abs() < 1e-9);
        assert!((p.coefficient(&[1, 1]) - 4.0).abs() < 1e-9);
        assert!((p.coefficient(&[0, 2]) - 2.0).abs() < 1e-9);
        assert!((p.eval(&[1.0, 1.0]).unwrap() - 7.0).abs() < 1e-9);
        assert!((p.eval(&[0.5, 0.5]).unwrap() - 1.75).abs() < 1e-9);
        assert!(p.residual() <= 1e-8);
    }

    #[test]
    fn single_and_repeated_bodies() {
        let p = volume_polynomial(&[square()]).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert!((p.coefficient(&[2]) - 1.0).abs() < 1e-12);
        let p = volume_polynomial(&[square(), square()]).unwrap();
        for (d, c) in [([2, 0], 1.0), ([1, 1], 2.0), ([0, 2], 1.0)] {
            assert!((p.coefficient(&d) - c).abs() < 1e-9);
        }
    }

    #[test]
    fn mixed_volume_examples() {
        assert!((mixed_volume(&[square(), square()]).unwrap() - 1.0).abs() < 1e-9);
        assert!((mixed_volume(&[square(), diamond()]).unwrap() - 2.0).abs() < 1e-9);
        let big = square().scale(3.0).unwrap();
        assert!((mixed_volume(&[square(), big]).unwrap() - 3.0).abs() < 1e-9);
        let cube = ConvexBody::unit_cube(3).unwrap();
        let simplex = ConvexBody::unit_simplex(3).unwrap();
        assert!((mixed_volume(&[cube.clone(), cube.clone(), cube.clone()]).unwrap() - 1.0).abs() < 1e-9);
        assert!((mixed_volume(&[simplex.clone(), simplex.clone(), simplex]).unwrap() - 1.0 / 6.0).abs() < 1e-9);
        let segment = ConvexBody::new(1, &[vec![-1.0], vec![2.0]]).unwrap();
        assert!((mixed_volume(&[segment]).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_arity_and_dimension() {
        assert!(matches!(mixed_volume(&[square()]), Err(Error::InvalidParameter(_))));
        let cube = ConvexBody::unit_cube(3).unwrap();
        assert!(matches!(mixed_volume(&[square(), cube]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(volume_polynomial(&[square(), square(), square(), square()]), Err(Error::InvalidParameter(_))));
        assert!(matches!(volume_polynomial(&[]), Err(Error::Empty)));
    }

    #[test]
    fn edge_formula_agrees() {
        for (p, q) in [(square(), diamond()), (diamond(), square()), (square(), square())] {
            let generic = mixed_volume(&[p.clone(), q.clone()]).unwrap();
            assert!((mixed_area_edge_formula(&p, &q).unwrap() - generic).abs() < 1e-9);
        }
        let seg = ConvexBody::new(2, &[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!((mixed_area_edge_formula(&seg, &square()).unwrap() - 1.0).abs() < 1e-12);
        assert!((mixed_volume(&[seg, square()]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn brunn_minkowski_examples() {
        let r = brunn_minkowski_check(&[square(), diamond()]).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-9);
        assert!((r.rhs - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.holds);
        let r = brunn_minkowski_check(&[square(), square()]).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-9 && r.holds);
        let h = square().scale(5.0).unwrap().translate(&[1.0, -2.0]).unwrap();
        let r = brunn_minkowski_check(&[square(), h]).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-9 && r.holds);
        let seg = ConvexBody::new(2, &[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(brunn_minkowski_check(&[seg, square()]), Err(Error::DegenerateBody));
    }

    #[test]
    fn log_concavity_examples() {
        let r = log_concavity_check(&square(), &diamond(), &[0.5]).unwrap();
        assert!(r.holds);
        assert!((r.samples[0].volume - 1.75).abs() < 1e-9);
        assert!((r.samples[0].lhs - 1.75f64.sqrt()).abs() < 1e-9);
        assert!((r.samples[0].rhs - (0.5 + 0.5 * 2f64.sqrt())).abs() < 1e-12);
        let ts: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let r = log_concavity_check(&diamond(), &diamond(), &ts).unwrap();
        assert!(r.holds);
        assert!(r.samples.iter().all(|s| (s.lhs - s.rhs).abs() < 1e-9));
        assert!(log_concavity_check(&square(), &diamond(), &[1.5]).is_err());
    }
}
