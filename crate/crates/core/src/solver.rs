//! Solvers for `MA(h) = μ` and `MA(h) = e^{λh}μ` with discrete `μ`.
//!
//! The unknowns are the values of `h` at the atoms. A frame of nodes on the box
//! `[−R, R]ⁿ` carries `h_P` during the iteration and stands in for the growth
//! condition at infinity. The default method is a damped Newton iteration on the
//! cell volumes; the Jacobian is the weighted graph Laplacian of adjacent cells.
//! A coordinatewise lowering method is available as a derivative-free fallback.

use serde::{Deserialize, Serialize, Serializer};

use crate::convexfun::{FunctionRepr, PLConvexFunction};
use crate::error::{Error, Result};
use crate::geometry::cells::{Cell, CellEngine};
use crate::geometry::hull::{dot, norm, sub, Point};
use crate::geometry::{to_point, ConvexBody};
use crate::ma_measure::full_mass;
use crate::mass_factor;

/// Tolerance on `|Σμ − (n!/2ⁿ)·Vol(P)|`.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: Vec<f64>,
    pub mass: f64,
}

/// Finite sum of point masses with distinct locations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

/// On-disk form: `{"atoms": [{"x": [...], "mass": m}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureRepr {
    pub atoms: Vec<Atom>,
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        DiscreteMeasure::new(r.atoms)
    }
}

impl From<DiscreteMeasure> for MeasureRepr {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureRepr { atoms: m.atoms }
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms.first().ok_or(Error::Empty)?;
        let dim = first.x.len();
        crate::geometry::check_dim(dim)?;
        let mut pts = Vec::with_capacity(atoms.len());
        for a in &atoms {
            pts.push(to_point(dim, &a.x)?);
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom mass {} must be positive", a.mass)));
            }
        }
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| {
            let (p, q) = (&pts[a], &pts[b]);
            p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])).then(p[2].total_cmp(&q[2]))
        });
        for w in order.windows(2) {
            if norm(&sub(&pts[w[0]], &pts[w[1]])) <= 1e-12 {
                return Err(Error::InvalidMeasure(format!(
                    "atoms {} and {} coincide",
                    w[0].min(w[1]),
                    w[0].max(w[1])
                )));
            }
        }
        Ok(DiscreteMeasure { dim, atoms })
    }

    pub fn dirac(x: &[f64], mass: f64) -> Result<Self> {
        Self::new(vec![Atom { x: x.to_vec(), mass }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.mass).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Same locations with new masses.
    pub fn with_masses(&self, masses: &[f64]) -> Result<Self> {
        if masses.len() != self.len() {
            return Err(Error::InvalidMeasure("mass count differs from atom count".into()));
        }
        Self::new(
            self.atoms
                .iter()
                .zip(masses)
                .map(|(a, &m)| Atom { x: a.x.clone(), mass: m })
                .collect(),
        )
    }

    /// Largest max-norm of an atom location.
    pub fn support_radius(&self) -> f64 {
        self.atoms
            .iter()
            .flat_map(|a| a.x.iter().map(|c| c.abs()))
            .fold(0.0, f64::max)
    }

    pub(crate) fn points(&self) -> Vec<Point> {
        self.atoms.iter().map(|a| to_point(self.dim, &a.x).expect("validated")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Damped Newton iteration on the cell volumes.
    #[default]
    Newton,
    /// Repeatedly lower the value at the atom with the largest deficit.
    Lowering,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Half-width of the frame box; chosen from the atom support when `None`.
    pub box_radius: Option<f64>,
    /// Target for the largest atom mass error.
    pub tol: f64,
    /// Newton steps or lowering moves; a method-specific default when `None`.
    pub max_iterations: Option<usize>,
    pub method: Method,
    /// Curvature of the initial quadratic, relative to the largest admissible.
    pub init_scale: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            box_radius: None,
            tol: 1e-8,
            max_iterations: None,
            method: Method::Newton,
            init_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Atoms first, then the frame nodes.
    pub solution: PLConvexFunction,
    /// Largest `|cell mass − target|` over the atoms.
    pub residual: f64,
    pub iterations: usize,
    pub normalization: String,
    /// Achieved cell mass at each atom.
    pub masses: Vec<f64>,
}

#[derive(Serialize)]
struct ReportRepr<'a> {
    solution: FunctionRepr,
    residual: f64,
    iterations: usize,
    normalization: &'a str,
    masses: &'a [f64],
}

impl Serialize for SolveReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportRepr {
            solution: self.solution.clone().into(),
            residual: self.residual,
            iterations: self.iterations,
            normalization: &self.normalization,
            masses: &self.masses,
        }
        .serialize(s)
    }
}

impl SolveReport {
    /// Solution values at the atoms, in measure order.
    pub fn atom_values(&self) -> &[f64] {
        &self.solution.values()[..self.masses.len()]
    }
}

/// `MA(h) = μ` with `sup(h − h_P) = 0`.
pub fn solve_ma(body: &ConvexBody, mu: &DiscreteMeasure, box_radius: f64, tol: f64) -> Result<SolveReport> {
    solve_ma_with(
        body,
        mu,
        &SolveOptions {
            box_radius: Some(box_radius),
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_ma_with(body: &ConvexBody, mu: &DiscreteMeasure, opts: &SolveOptions) -> Result<SolveReport> {
    let problem = Problem::new(body, mu, opts)?;
    let expected = full_mass(body);
    let found = mu.total_mass();
    if (found - expected).abs() > MASS_TOLERANCE {
        return Err(Error::MassMismatch { expected, found });
    }
    problem.solve(&mu.masses(), None)
}

/// Default frame half-width for atoms within max-norm `radius`.
pub fn default_box_radius(radius: f64) -> f64 {
    (3.0 * radius).max(1.0)
}

struct Problem<'a> {
    body: &'a ConvexBody,
    opts: SolveOptions,
    atoms: Vec<Point>,
    frame: Vec<Point>,
    frame_values: Vec<f64>,
    engine: CellEngine,
    factor: f64,
}

impl<'a> Problem<'a> {
    fn new(body: &'a ConvexBody, mu: &DiscreteMeasure, opts: &SolveOptions) -> Result<Self> {
        if body.dim() != mu.dim() {
            return Err(Error::DimensionMismatch {
                expected: body.dim(),
                found: mu.dim(),
            });
        }
        if body.is_degenerate() || body.volume() <= 0.0 {
            return Err(Error::DegenerateBody);
        }
        if !(opts.tol > 0.0 && opts.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol = {} must be positive", opts.tol)));
        }
        if !(opts.init_scale > 0.0 && opts.init_scale <= 1.0) {
            return Err(Error::InvalidParameter("init_scale must lie in (0, 1]".into()));
        }
        let support = mu.support_radius();
        let radius = opts.box_radius.unwrap_or_else(|| default_box_radius(support));
        if !(radius.is_finite() && radius > 2.0 * support && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "box radius {radius} must exceed twice the atom support radius {support}"
            )));
        }
        let dim = body.dim();
        let atoms = mu.points();
        let frame = frame_nodes(dim, radius);
        let frame_values = frame.iter().map(|x| body.support_at(x)).collect();
        let mut all = atoms.clone();
        all.extend_from_slice(&frame);
        let engine = CellEngine::new(body, &all);
        Ok(Problem {
            body,
            opts: opts.clone(),
            atoms,
            frame,
            frame_values,
            engine,
            factor: mass_factor(dim),
        })
    }

    fn m(&self) -> usize {
        self.atoms.len()
    }

    fn full_values(&self, atom_values: &[f64]) -> Vec<f64> {
        let mut v = atom_values.to_vec();
        v.extend_from_slice(&self.frame_values);
        v
    }

    /// Shift keeping every frame cell empty: `vⱼ < min_{p ∈ P} ⟨p, xⱼ⟩`.
    fn lower_below_frame(&self, values: &mut [f64]) {
        let margin = 1e-3 * (1.0 + self.body.support_at(&[1.0, 1.0, 1.0]).abs());
        let excess = self
            .atoms
            .iter()
            .zip(values.iter())
            .map(|(x, v)| v + self.body.support_at(&crate::geometry::hull::scale(x, -1.0)))
            .fold(f64::NEG_INFINITY, f64::max);
        let shift = excess + margin;
        if shift > 0.0 {
            for v in values.iter_mut() {
                *v -= shift;
            }
        }
    }

    /// Convex quadratic whose slopes stay well inside `P`.
    fn initial_values(&self) -> Vec<f64> {
        let m = self.m() as f64;
        let mut mean = [0.0; 3];
        for x in &self.atoms {
            for d in 0..3 {
                mean[d] += x[d] / m;
            }
        }
        let spread = self.atoms.iter().map(|x| norm(&sub(x, &mean))).fold(0.0, f64::max);
        let c = self.body.vertex_centroid();
        let mut a = [0.0; 3];
        a[..c.len()].copy_from_slice(&c);
        let rho = self.body.inner_radius_at(&a);
        let s = if spread > 0.0 { rho / (2.0 * spread) * self.opts.init_scale } else { 0.0 };
        let mut values: Vec<f64> = self
            .atoms
            .iter()
            .map(|x| {
                let d = sub(x, &mean);
                0.5 * s * dot(&d, &d) + dot(&a, x)
            })
            .collect();
        self.lower_below_frame(&mut values);
        values
    }

    fn masses(&self, cells: &[Cell]) -> Vec<f64> {
        cells[..self.m()].iter().map(|c| self.factor * c.volume).collect()
    }

    fn solve(&self, targets: &[f64], warm: Option<&[f64]>) -> Result<SolveReport> {
        let (values, iterations) = match self.opts.method {
            Method::Newton => self.newton(targets, warm)?,
            Method::Lowering => self.lowering(targets)?,
        };
        self.finish(targets, &values, iterations)
    }

    fn finish(&self, targets: &[f64], atom_values: &[f64], iterations: usize) -> Result<SolveReport> {
        let dim = self.body.dim();
        let atoms_only = PLConvexFunction::assemble(self.body.clone(), self.atoms.clone(), atom_values.to_vec());
        let shift = atoms_only.sup_minus_support();
        let mut values: Vec<f64> = atom_values.iter().map(|v| v - shift).collect();
        values.extend(self.frame.iter().map(|x| atoms_only.eval_point(x) - shift));
        let mut nodes = self.atoms.clone();
        nodes.extend_from_slice(&self.frame);
        let solution = PLConvexFunction::assemble(self.body.clone(), nodes, values);
        let masses: Vec<f64> = solution.cells()[..self.m()]
            .iter()
            .map(|c| self.factor * c.volume)
            .collect();
        let residual = masses
            .iter()
            .zip(targets)
            .map(|(g, t)| (g - t).abs())
            .fold(0.0, f64::max);
        let _ = dim;
        Ok(SolveReport {
            solution,
            residual,
            iterations,
            normalization: "sup(h - h_P) = 0, attained at the origin".into(),
            masses,
        })
    }

    fn newton(&self, targets: &[f64], warm: Option<&[f64]>) -> Result<(Vec<f64>, usize)> {
        let m = self.m();
        let cap = self.opts.max_iterations.unwrap_or(200);
        let mut v = match warm {
            Some(w) => {
                let mut w = w.to_vec();
                self.lower_below_frame(&mut w);
                w
            }
            None => self.initial_values(),
        };
        let mut cells = self.engine.all_cells(&self.full_values(&v));
        let mut g = self.masses(&cells);
        let min_target = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let min_start = g.iter().copied().fold(f64::INFINITY, f64::min);
        let floor = 0.5 * min_target.min(min_start);
        if !(floor > 0.0) {
            return Err(Error::NonConvergence {
                iterations: 0,
                residual: max_error(&g, targets),
            });
        }
        for it in 0..=cap {
            let r: Vec<f64> = g.iter().zip(targets).map(|(a, b)| a - b).collect();
            let res = r.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if res <= self.opts.tol {
                return Ok((v, it));
            }
            if it == cap {
                return Err(Error::NonConvergence { iterations: it, residual: res });
            }
            let lap = self.laplacian(&cells);
            let delta = lap.solve(&r);
            let norm_r = l2(&r);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..50 {
                let trial: Vec<f64> = v.iter().zip(&delta).map(|(a, d)| a + alpha * d).collect();
                let tc = self.engine.all_cells(&self.full_values(&trial));
                let tg = self.masses(&tc);
                let min_g = tg.iter().copied().fold(f64::INFINITY, f64::min);
                let tr: Vec<f64> = tg.iter().zip(targets).map(|(a, b)| a - b).collect();
                if min_g >= floor && l2(&tr) <= (1.0 - 0.5 * alpha) * norm_r {
                    v = trial;
                    cells = tc;
                    g = tg;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                return Err(Error::NonConvergence { iterations: it, residual: res });
            }
            debug_assert_eq!(v.len(), m);
        }
        unreachable!()
    }

    /// `L = −∂G/∂v` restricted to the atoms.
    fn laplacian(&self, cells: &[Cell]) -> SparseSym {
        let m = self.m();
        let all = |j: usize| if j < m { self.atoms[j] } else { self.frame[j - m] };
        let mut diag = vec![0.0; m];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for i in 0..m {
            for &(j, len) in &cells[i].facets {
                let w = self.factor * len / norm(&sub(&all(i), &all(j)));
                diag[i] += w;
                if j < m {
                    rows[i].push((j, -w));
                }
            }
        }
        SparseSym { diag, rows }
    }

    fn lowering(&self, targets: &[f64]) -> Result<(Vec<f64>, usize)> {
        let m = self.m();
        let cap = self.opts.max_iterations.unwrap_or(200_000);
        let frame_fn = PLConvexFunction::assemble(self.body.clone(), self.frame.clone(), self.frame_values.clone());
        let atom_start: Vec<f64> = self.atoms.iter().map(|x| frame_fn.eval_point(x)).collect();
        let mut values = self.full_values(&atom_start);
        let eps = 2.0 * self.engine.epsilon(&values);
        let mut mins = self.engine.bounds(&values);
        let mut cells: Vec<Cell> = self.engine.all_cells(&values);
        let mut g = self.masses(&cells);
        let tol = self.opts.tol;
        for it in 0..=cap {
            let mut worst = 0;
            let mut deficit = f64::NEG_INFINITY;
            for i in 0..m {
                let d = targets[i] - g[i];
                if d > deficit {
                    deficit = d;
                    worst = i;
                }
            }
            let res = max_error(&g, targets);
            // the frame still holds the summed deficit, which the atoms absorb
            // once the frame is dropped
            let owed: f64 = g.iter().zip(targets).map(|(a, b)| (b - a).max(0.0)).sum();
            if res <= tol && owed <= tol {
                return Ok((values[..m].to_vec(), it));
            }
            if it == cap {
                return Err(Error::NonConvergence { iterations: it, residual: res });
            }
            let i = worst;
            let base = values[i];
            let mass_at = |t: f64, values: &mut Vec<f64>, mins: &mut crate::geometry::cells::Bounds| {
                values[i] = base - t;
                self.engine.lower_value(mins, i, base - t);
                let c = self.engine.cell(i, values, mins, eps);
                (self.factor * c.volume - targets[i], c)
            };
            // bracket the step: g(t) is nondecreasing in t
            let scale = 1.0 + self.body.support_at(&[1.0, 1.0, 1.0]).abs();
            let mut lo = (0.0, g[i] - targets[i]);
            let mut step = (targets[i] - g[i]).max(tol) * scale;
            let mut hi;
            loop {
                let (f, _) = mass_at(step, &mut values, &mut mins);
                if f >= 0.0 {
                    hi = (step, f);
                    break;
                }
                lo = (step, f);
                step *= 2.0;
                if step > 1e12 * scale {
                    return Err(Error::NonConvergence { iterations: it, residual: res });
                }
            }
            // Illinois regula falsi, keeping the lower end below the target
            let mut side = 0i8;
            for _ in 0..200 {
                if -lo.1 <= 0.1 * tol || hi.0 - lo.0 <= 1e-15 * (1.0 + hi.0) {
                    break;
                }
                let t = (lo.0 * hi.1 - hi.0 * lo.1) / (hi.1 - lo.1);
                let t = if t > lo.0 && t < hi.0 { t } else { 0.5 * (lo.0 + hi.0) };
                let (f, _) = mass_at(t, &mut values, &mut mins);
                if f < 0.0 {
                    lo = (t, f);
                    if side == -1 {
                        hi.1 *= 0.5;
                    }
                    side = -1;
                } else {
                    hi = (t, f);
                    if side == 1 {
                        lo.1 *= 0.5;
                    }
                    side = 1;
                }
            }
            let (_, cell) = mass_at(lo.0, &mut values, &mut mins);
            // the cells touching i before or after the move are the ones that changed
            let mut touched: Vec<usize> = cells[i].facets.iter().map(|f| f.0).collect();
            touched.extend(cell.facets.iter().map(|f| f.0));
            touched.sort_unstable();
            touched.dedup();
            g[i] = self.factor * cell.volume;
            cells[i] = cell;
            for j in touched {
                if j < m && j != i {
                    let c = self.engine.cell(j, &values, &mins, eps);
                    g[j] = self.factor * c.volume;
                    cells[j] = c;
                }
            }
        }
        unreachable!()
    }
}

fn max_error(g: &[f64], t: &[f64]) -> f64 {
    g.iter().zip(t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Box corners and the points `±R·eᵢ`.
fn frame_nodes(dim: usize, radius: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for mask in 0..(1usize << dim) {
        let mut p = [0.0; 3];
        for (d, c) in p.iter_mut().enumerate().take(dim) {
            *c = if mask >> d & 1 == 1 { radius } else { -radius };
        }
        out.push(p);
    }
    if dim > 1 {
        for d in 0..dim {
            for s in [radius, -radius] {
                let mut p = [0.0; 3];
                p[d] = s;
                out.push(p);
            }
        }
    }
    out
}

/// Symmetric matrix with positive diagonal and nonpositive off-diagonal rows.
struct SparseSym {
    diag: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    fn apply(&self, x: &[f64], out: &mut [f64], shift: f64) {
        for i in 0..x.len() {
            let mut s = (self.diag[i] + shift) * x[i];
            for &(j, w) in &self.rows[i] {
                s += w * x[j];
            }
            out[i] = s;
        }
    }

    /// Jacobi-preconditioned conjugate gradients with a tiny diagonal shift.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let dmax = self.diag.iter().copied().fold(0.0, f64::max);
        let shift = 1e-12 * dmax.max(1e-300);
        let pre: Vec<f64> = self.diag.iter().map(|d| 1.0 / (d + shift)).collect();
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&pre).map(|(a, p)| a * p).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let target = 1e-13 * l2(b);
        let mut ap = vec![0.0; n];
        for _ in 0..(10 * n + 50) {
            if l2(&r) <= target {
                break;
            }
            self.apply(&p, &mut ap, shift);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] * pre[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AubinYauOptions {
    pub solve: SolveOptions,
    /// Initial damping `α` in `u ← (1−α)u + α·u_new`.
    pub damping: f64,
    pub max_outer: usize,
}

impl Default for AubinYauOptions {
    fn default() -> Self {
        AubinYauOptions {
            solve: SolveOptions::default(),
            damping: 0.5,
            max_outer: 200,
        }
    }
}

/// `MA(h) = e^{λh}μ`; the equation fixes the additive constant.
pub fn solve_aubin_yau(
    body: &ConvexBody,
    mu: &DiscreteMeasure,
    lambda: f64,
    box_radius: f64,
    tol: f64,
) -> Result<SolveReport> {
    let opts = AubinYauOptions {
        solve: SolveOptions {
            box_radius: Some(box_radius),
            tol,
            ..SolveOptions::default()
        },
        ..AubinYauOptions::default()
    };
    solve_aubin_yau_with(body, mu, lambda, &opts)
}

/// Fixed point of `u ↦ solve(c(u)·e^{λu}μ)` with `c(u)` restoring the full mass,
/// shifted by `log(c)/λ` at the end.
pub fn solve_aubin_yau_with(
    body: &ConvexBody,
    mu: &DiscreteMeasure,
    lambda: f64,
    opts: &AubinYauOptions,
) -> Result<SolveReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter("damping must lie in (0, 1]".into()));
    }
    let tol = opts.solve.tol;
    let mut inner = opts.solve.clone();
    inner.tol = 0.1 * tol;
    let problem = Problem::new(body, mu, &inner)?;
    let full = full_mass(body);
    let base = mu.masses();
    // work with log-weights relative to the largest to avoid overflow
    let targets = |u: &[f64]| -> (Vec<f64>, f64) {
        let top = u.iter().zip(&base).map(|(v, m)| lambda * v + m.ln()).fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = u.iter().zip(&base).map(|(v, m)| (lambda * v + m.ln() - top).exp()).collect();
        let sum: f64 = w.iter().sum();
        // c = full / Σ e^{λu}μ, kept as log c
        let log_c = full.ln() - sum.ln() - top;
        (w.iter().map(|x| x * full / sum).collect(), log_c)
    };
    let mut u: Vec<f64> = problem.atoms.iter().map(|x| body.support_at(x)).collect();
    let mut alpha = opts.damping;
    let mut prev_change = f64::INFINITY;
    let mut warm: Option<Vec<f64>> = None;
    let mut total_inner = 0;
    for outer in 1..=opts.max_outer {
        let (t, _) = targets(&u);
        let rep = problem.solve(&t, warm.as_deref())?;
        total_inner += rep.iterations;
        let u_new = rep.atom_values().to_vec();
        let change = u_new.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change <= 0.1 * tol {
            let (_, log_c) = targets(&u_new);
            let shift = log_c / lambda;
            let solution = rep.solution.shifted(shift);
            let residual = rep
                .masses
                .iter()
                .zip(&base)
                .zip(solution.values())
                .map(|((g, m), v)| (g - (lambda * v).exp() * m).abs())
                .fold(0.0, f64::max);
            return Ok(SolveReport {
                solution,
                residual,
                iterations: outer,
                normalization: format!("none: fixed by the equation (shift log(c)/lambda = {shift})"),
                masses: rep.masses,
            });
        }
        if change > prev_change {
            alpha = (0.5 * alpha).max(1.0 / 64.0);
        }
        prev_change = change;
        for (a, b) in u.iter_mut().zip(&u_new) {
            *a = (1.0 - alpha) * *a + alpha * b;
        }
        warm = Some(u_new);
    }
    let _ = total_inner;
    Err(Error::NonConvergence {
        iterations: opts.max_outer,
        residual: prev_change,
    })
}

/// Density input of [`uniform_bound_diagnostic`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DensitySpec {
    /// Constant density on the box `[lo, hi]` with the given total mass.
    UniformBox { lo: Vec<f64>, hi: Vec<f64>, total: f64 },
    /// An already discrete measure, used unchanged at every level.
    Atoms { measure: DiscreteMeasure },
}

impl DensitySpec {
    /// Atoms at the centres of a `2ᵏ`-per-axis partition of the box.
    pub fn discretize(&self, level: u32) -> Result<DiscreteMeasure> {
        match self {
            DensitySpec::Atoms { measure } => Ok(measure.clone()),
            DensitySpec::UniformBox { lo, hi, total } => {
                let dim = lo.len();
                crate::geometry::check_dim(dim)?;
                if hi.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: hi.len(),
                    });
                }
                if lo.iter().zip(hi).any(|(a, b)| !(b > a)) || !(*total > 0.0) {
                    return Err(Error::InvalidParameter("density box must be nonempty with positive total".into()));
                }
                let k = 1usize << level;
                let count = k.pow(dim as u32);
                let mass = total / count as f64;
                let mut atoms = Vec::with_capacity(count);
                for idx in 0..count {
                    let mut rest = idx;
                    let x: Vec<f64> = (0..dim)
                        .map(|d| {
                            let c = rest % k;
                            rest /= k;
                            lo[d] + (hi[d] - lo[d]) * (c as f64 + 0.5) / k as f64
                        })
                        .collect();
                    atoms.push(Atom { x, mass });
                }
                DiscreteMeasure::new(atoms)
            }
        }
    }

    fn radius(&self) -> f64 {
        match self {
            DensitySpec::Atoms { measure } => measure.support_radius(),
            DensitySpec::UniformBox { lo, hi, .. } => lo.iter().chain(hi).map(|c| c.abs()).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundLevel {
    pub level: u32,
    pub atoms: usize,
    /// `sup over nodes of (h_P − h)` with `sup(h − h_P) = 0`.
    pub deviation: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves on successively finer discretizations and reports `D_k`.
pub fn uniform_bound_diagnostic(
    body: &ConvexBody,
    density: &DensitySpec,
    levels: &[u32],
    opts: &SolveOptions,
) -> Result<Vec<BoundLevel>> {
    let mut opts = opts.clone();
    if opts.box_radius.is_none() {
        opts.box_radius = Some(default_box_radius(density.radius()));
    }
    levels
        .iter()
        .map(|&level| {
            let mu = density.discretize(level)?;
            let rep = solve_ma_with(body, &mu, &opts)?;
            let h = &rep.solution;
            let deviation = h
                .points()
                .iter()
                .zip(h.values())
                .map(|(x, v)| body.support_at(x) - v)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(BoundLevel {
                level,
                atoms: mu.len(),
                deviation,
                residual: rep.residual,
                iterations: rep.iterations,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma_measure::ma;

    fn square() -> ConvexBody {
        ConvexBody::unit_cube(2).unwrap()
    }

    fn interval() -> ConvexBody {
        ConvexBody::unit_cube(1).unwrap()
    }

    fn atoms(list: &[(&[f64], f64)]) -> DiscreteMeasure {
        DiscreteMeasure::new(list.iter().map(|(x, m)| Atom { x: x.to_vec(), mass: *m }).collect()).unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![]).is_err());
        assert!(matches!(
            DiscreteMeasure::new(vec![Atom { x: vec![0.0], mass: 0.0 }]),
            Err(Error::InvalidMeasure(_))
        ));
        let dup = vec![Atom { x: vec![1.0], mass: 1.0 }, Atom { x: vec![1.0], mass: 1.0 }];
        assert!(DiscreteMeasure::new(dup).is_err());
        let json = r#"{"atoms":[{"x":[0,0],"mass":0.5}]}"#;
        let m: DiscreteMeasure = serde_json::from_str(json).unwrap();
        assert_eq!(m.total_mass(), 0.5);
    }

    #[test]
    fn single_atom_gives_the_support_function() {
        let rep = solve_ma(&square(), &DiscreteMeasure::dirac(&[0.0, 0.0], 0.5).unwrap(), 4.0, 1e-8).unwrap();
        assert!(rep.residual <= 1e-8);
        for (x, v) in rep.solution.points().iter().zip(rep.solution.values()) {
            assert!((v - square().support_at(x)).abs() <= 1e-9);
        }
    }

    #[test]
    fn two_atoms_in_one_dimension() {
        let mu = atoms(&[(&[-1.0], 0.25), (&[1.0], 0.25)]);
        for method in [Method::Newton, Method::Lowering] {
            let opts = SolveOptions {
                box_radius: Some(4.0),
                method,
                ..SolveOptions::default()
            };
            let rep = solve_ma_with(&interval(), &mu, &opts).unwrap();
            let h = &rep.solution;
            assert!((h.eval(&[-1.0]).unwrap() + 0.5).abs() < 1e-7, "{method:?}");
            assert!(h.eval(&[0.0]).unwrap().abs() < 1e-7);
            assert!((h.eval(&[1.0]).unwrap() - 0.5).abs() < 1e-7);
        }
    }

    #[test]
    fn translated_atom_translates_the_solution() {
        let t = [0.3, -0.4];
        let rep = solve_ma(&square(), &DiscreteMeasure::dirac(&t, 0.5).unwrap(), 4.0, 1e-8).unwrap();
        let h = &rep.solution;
        let diffs: Vec<f64> = [[1.0, 2.0], [-1.5, 0.5], [0.0, 0.0], [2.0, -2.0]]
            .iter()
            .map(|x| h.eval(x).unwrap() - square().support(&[x[0] - t[0], x[1] - t[1]]).unwrap())
            .collect();
        for d in &diffs {
            assert!((d - diffs[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn methods_agree_on_a_small_planar_problem() {
        let mu = atoms(&[
            (&[0.0, 0.0], 0.1),
            (&[0.5, 0.1], 0.15),
            (&[-0.3, 0.4], 0.125),
            (&[0.2, -0.6], 0.125),
        ]);
        let newton = solve_ma_with(&square(), &mu, &SolveOptions::default()).unwrap();
        let lower = solve_ma_with(
            &square(),
            &mu,
            &SolveOptions {
                method: Method::Lowering,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert!(newton.residual <= 1e-8 && lower.residual <= 1e-8, "{} {}", newton.residual, lower.residual);
        for (a, b) in newton.atom_values().iter().zip(lower.atom_values()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        let r = ma(&newton.solution);
        assert!((r.total + r.boundary_remainder - 0.5).abs() < 1e-9);
    }

    #[test]
    fn mass_mismatch_and_degenerate_body_are_rejected() {
        let mu = DiscreteMeasure::dirac(&[0.0, 0.0], 0.4).unwrap();
        assert!(matches!(solve_ma(&square(), &mu, 4.0, 1e-8), Err(Error::MassMismatch { .. })));
        let flat = ConvexBody::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let mu0 = DiscreteMeasure::dirac(&[0.0, 0.0], 0.0f64.max(1e-3)).unwrap();
        assert!(matches!(solve_ma(&flat, &mu0, 4.0, 1e-8), Err(Error::DegenerateBody)));
        let far = DiscreteMeasure::dirac(&[3.0, 0.0], 0.5).unwrap();
        assert!(matches!(solve_ma(&square(), &far, 4.0, 1e-8), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn aubin_yau_single_atom() {
        let rep = solve_aubin_yau(&square(), &DiscreteMeasure::dirac(&[0.0, 0.0], 0.5).unwrap(), 1.0, 4.0, 1e-8).unwrap();
        assert!(rep.residual <= 1e-8);
        for (x, v) in rep.solution.points().iter().zip(rep.solution.values()) {
            assert!((v - square().support_at(x)).abs() <= 1e-8);
        }
        let c: f64 = 0.7;
        let rep = solve_aubin_yau(&square(), &DiscreteMeasure::dirac(&[0.0, 0.0], 0.5 * c.exp()).unwrap(), 1.0, 4.0, 1e-8).unwrap();
        assert!((rep.solution.eval(&[0.0, 0.0]).unwrap() + c).abs() < 1e-8);
        let rep = solve_aubin_yau(&interval(), &DiscreteMeasure::dirac(&[0.0], 0.5).unwrap(), 2.0, 4.0, 1e-8).unwrap();
        assert!(rep.solution.eval(&[0.0]).unwrap().abs() < 1e-8);
        assert!((rep.solution.eval(&[3.0]).unwrap() - 3.0).abs() < 1e-8);
    }

    #[test]
    fn aubin_yau_several_atoms_satisfy_the_equation() {
        let mu = atoms(&[(&[-0.5], 0.2), (&[0.0], 0.3), (&[0.4], 0.1)]);
        let rep = solve_aubin_yau(&interval(), &mu, 1.0, 4.0, 1e-8).unwrap();
        assert!(rep.residual <= 1e-7, "{}", rep.residual);
        let r = ma(&rep.solution);
        for (i, a) in mu.atoms().iter().enumerate() {
            let v = rep.solution.eval(&a.x).unwrap();
            assert!((r.masses[i] - v.exp() * a.mass).abs() < 1e-7);
        }
    }

    #[test]
    fn discretized_density() {
        let d = DensitySpec::UniformBox {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
            total: 0.5,
        };
        let mu = d.discretize(2).unwrap();
        assert_eq!(mu.len(), 16);
        assert!((mu.total_mass() - 0.5).abs() < 1e-15);
        assert!(mu.atoms().iter().any(|a| a.x == vec![-0.75, -0.75]));
    }
}
