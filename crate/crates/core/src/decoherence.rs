//! Measure of decoherence `D = sup_ρ ‖E(ρ) − ρ‖` for qubit channels.
//!
//! The supremum may be taken over pure states only. `ρ ↦ E(ρ) − ρ` is linear
//! and any norm is convex, so `ρ ↦ ‖E(ρ) − ρ‖` is convex on the Bloch ball and
//! attains its maximum at an extreme point, i.e. on the sphere.
//!
//! For a Bloch vector `P` the difference `E(ρ) − ρ` is traceless and Hermitian
//! with eigenvalues `±|(T − I)P + t| / 2`, where `P ↦ TP + t` is the channel's
//! affine Bloch map. Every method here maximises that quantity.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::channel::{bloch_matrix, ChiMatrix, ChiParams, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::tol;

pub const DEFAULT_GRID_DENSITY: usize = 2000;
pub const DEFAULT_REFINE_ITERS: usize = 20;
/// Off-diagonal and linear-term tolerance used when routing simulated χ.
pub const ROUTING_TOLERANCE: f64 = 1e-10;

/// Point in the closed Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = Self { x, y, z };
        if p.norm() > 1.0 + tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!(
                "Bloch vector norm {} exceeds 1",
                p.norm()
            )));
        }
        Ok(p)
    }

    fn from_vector(v: Vector3<f64>) -> Self {
        Self {
            x: v.x,
            y: v.y,
            z: v.z,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm(self) -> f64 {
        self.vector().norm()
    }

    /// Angle in radians between the directions of two nonzero points.
    pub fn angle_to(self, other: BlochPoint) -> f64 {
        let cos = self.vector().dot(&other.vector()) / (self.norm() * other.norm());
        cos.clamp(-1.0, 1.0).acos()
    }
}

/// Symmetric form `f(P) = Pᵀ M P` on Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm3 {
    matrix: Matrix3<f64>,
}

impl QuadraticForm3 {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let matrix = Matrix3::from_fn(|i, j| m[i][j]);
        let asym = (matrix - matrix.transpose()).abs().max();
        if asym > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!(
                "quadratic form not symmetric (deviation {asym:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let m = &self.matrix;
        [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]])
    }

    pub fn evaluate(&self, p: BlochPoint) -> f64 {
        let v = p.vector();
        v.dot(&(self.matrix * v))
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let mut ev: Vec<f64> = self
            .matrix
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2]]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[2]
    }

    /// Unit eigenvectors whose eigenvalue lies within `tolerance` of the
    /// largest one. Several are returned when the maximum is degenerate.
    pub fn maximizing_axes(&self, tolerance: f64) -> Vec<BlochPoint> {
        let eig = self.matrix.symmetric_eigen();
        let top = eig.eigenvalues.max();
        (0..3)
            .filter(|&k| top - eig.eigenvalues[k] <= tolerance)
            .map(|k| BlochPoint::from_vector(eig.eigenvectors.column(k).into_owned()))
            .collect()
    }
}

/// `n` nearly uniform points on the unit sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<BlochPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            BlochPoint {
                x: r * phi.cos(),
                y: r * phi.sin(),
                z,
            }
        })
        .collect()
}

/// `D = χ1 + χ2 + χ3 − min{χ1, χ2, χ3}` for a diagonal χ.
pub fn measure_diagonal(chi: &ChiMatrix) -> Result<f64> {
    let off = chi.max_off_diagonal();
    if off > tol::ALGEBRAIC {
        return Err(Error::NotDiagonal(off));
    }
    Ok(diagonal_value(chi))
}

fn diagonal_value(chi: &ChiMatrix) -> f64 {
    let [_, a, b, c] = chi.diagonal();
    a + b + c - a.min(b).min(c)
}

fn linear_terms(p: &ChiParams) -> f64 {
    p.get(4).abs().max(p.get(6).abs()).max(p.get(8).abs())
}

/// Coefficient matrix of the squared distance `‖E(ρ) − ρ‖²` as a function of
/// the Bloch vector, written in the twelve χ parameters. Valid for unital
/// trace-preserving χ (`χ4 = χ6 = χ8 = 0`).
pub fn build_quadratic_form(chi: &ChiMatrix) -> Result<QuadraticForm3> {
    build_quadratic_form_with(chi, tol::ALGEBRAIC)
}

fn build_quadratic_form_with(chi: &ChiMatrix, tolerance: f64) -> Result<QuadraticForm3> {
    let params = chi.params();
    let lin = linear_terms(&params);
    if lin > tolerance {
        return Err(Error::LinearTerms(lin));
    }
    QuadraticForm3::new(quadratic_coefficients(&params))
}

fn quadratic_coefficients(p: &ChiParams) -> [[f64; 3]; 3] {
    let x = |k| p.get(k);
    let (x1, x2, x3) = (x(1), x(2), x(3));
    let (x5, x7, x9) = (x(5), x(7), x(9));
    let (x10, x11, x12) = (x(10), x(11), x(12));

    let xx = x10 * x10 + 2.0 * x10 * x9 + x11 * x11 - 2.0 * x11 * x7
        + x2 * x2
        + 2.0 * x2 * x3
        + x3 * x3
        + x7 * x7
        + x9 * x9;
    let yy = x1 * x1 + 2.0 * x1 * x3 + x10 * x10 - 2.0 * x10 * x9
        + x12 * x12
        + 2.0 * x12 * x5
        + x3 * x3
        + x5 * x5
        + x9 * x9;
    let zz = x1 * x1 + 2.0 * x1 * x2 + x11 * x11 + 2.0 * x11 * x7 + x12 * x12 - 2.0 * x12 * x5
        + x2 * x2
        + x5 * x5
        + x7 * x7;
    let xy = -x1 * x10 - x1 * x9 - x10 * x2 - 2.0 * x10 * x3 + x11 * x12 + x11 * x5 - x12 * x7
        + x2 * x9
        - x5 * x7;
    let xz = -x1 * x11 + x1 * x7 + x10 * x12 - x10 * x5 - 2.0 * x11 * x2 - x11 * x3 + x12 * x9
        - x3 * x7
        - x5 * x9;
    let yz = -2.0 * x1 * x12 + x10 * x11 + x10 * x7 - x11 * x9 - x12 * x2 - x12 * x3 - x2 * x5
        + x3 * x5
        - x7 * x9;
    [[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]]
}

/// `D = √λ_max(M)` for unital χ.
pub fn measure_quadratic(chi: &ChiMatrix) -> Result<f64> {
    Ok(build_quadratic_form(chi)?.max_eigenvalue().max(0.0).sqrt())
}

/// Result of the numerical maximisation in [`measure_general_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralMeasure {
    pub value: f64,
    pub argmax: BlochPoint,
    pub grid_max: f64,
}

struct AffineObjective {
    b: Matrix3<f64>,
    t: Vector3<f64>,
}

impl AffineObjective {
    fn new(chi: &ChiMatrix) -> Self {
        let affine = chi.bloch_affine();
        let b = Matrix3::from_fn(|i, j| affine.matrix[i][j]) - Matrix3::identity();
        let t = Vector3::from_fn(|i, _| affine.shift[i]);
        Self { b, t }
    }

    fn value(&self, p: &Vector3<f64>) -> f64 {
        (self.b * p + self.t).norm() / 2.0
    }

    fn on_circle(&self, p: &Vector3<f64>, u: &Vector3<f64>, theta: f64) -> Vector3<f64> {
        p * theta.cos() + u * theta.sin()
    }

    /// Golden-section search along the great circle through `p` in direction `u`.
    fn line_search(&self, p: &Vector3<f64>, u: &Vector3<f64>, half_width: f64) -> Vector3<f64> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let (mut lo, mut hi) = (-half_width, half_width);
        let mut a = hi - INV_PHI * (hi - lo);
        let mut b = lo + INV_PHI * (hi - lo);
        let mut fa = self.value(&self.on_circle(p, u, a));
        let mut fb = self.value(&self.on_circle(p, u, b));
        for _ in 0..40 {
            if fa < fb {
                lo = a;
                a = b;
                fa = fb;
                b = lo + INV_PHI * (hi - lo);
                fb = self.value(&self.on_circle(p, u, b));
            } else {
                hi = b;
                b = a;
                fb = fa;
                a = hi - INV_PHI * (hi - lo);
                fa = self.value(&self.on_circle(p, u, a));
            }
        }
        let best = self.on_circle(p, u, (lo + hi) / 2.0).normalize();
        if self.value(&best) >= self.value(p) {
            best
        } else {
            *p
        }
    }

    fn refine(&self, start: Vector3<f64>, iters: usize, spacing: f64) -> Vector3<f64> {
        let mut p = start;
        let mut width = 2.0 * spacing;
        for step in 0..iters {
            let (mut u, mut v) = tangent_frame(&p);
            if step % 2 == 1 {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                (u, v) = ((u + v) * s, (v - u) * s);
            }
            p = self.line_search(&p, &u, width);
            p = self.line_search(&p, &v, width);
            width *= 0.7;
        }
        self.polish(p)
    }

    /// Conditional-gradient ascent, `P ← normalize(Bᵀ(BP + t))`. Each step
    /// cannot decrease a convex objective, so it only sharpens the result.
    fn polish(&self, mut p: Vector3<f64>) -> Vector3<f64> {
        let mut value = self.value(&p);
        for _ in 0..10_000 {
            let grad = self.b.transpose() * (self.b * p + self.t);
            let n = grad.norm();
            if n < 1e-300 {
                break;
            }
            let next = grad / n;
            let next_value = self.value(&next);
            if next_value < value || (next - p).norm() < 1e-15 {
                break;
            }
            p = next;
            value = next_value;
        }
        p
    }
}

fn tangent_frame(p: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if p.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = p.cross(&helper).normalize();
    let v = p.cross(&u).normalize();
    (u, v)
}

/// Numerical maximum of `‖E(ρ) − ρ‖` over pure states, valid for any
/// trace-preserving χ including those with linear Bloch terms.
pub fn measure_general(chi: &ChiMatrix, grid_density: usize, refine_iters: usize) -> Result<f64> {
    Ok(measure_general_detailed(chi, grid_density, refine_iters)?.value)
}

pub fn measure_general_detailed(
    chi: &ChiMatrix,
    grid_density: usize,
    refine_iters: usize,
) -> Result<GeneralMeasure> {
    if grid_density < 8 {
        return Err(Error::GridTooCoarse(grid_density));
    }
    let objective = AffineObjective::new(chi);
    let grid: Vec<Vector3<f64>> = fibonacci_sphere(grid_density)
        .into_iter()
        .map(BlochPoint::vector)
        .collect();
    let mut scored: Vec<(f64, usize)> = grid
        .iter()
        .enumerate()
        .map(|(i, p)| (objective.value(p), i))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let grid_max = scored[0].0;

    let spacing = (4.0 * std::f64::consts::PI / grid_density as f64).sqrt();
    let mut best = grid[scored[0].1];
    let mut best_value = grid_max;
    for &(_, idx) in scored.iter().take(6) {
        let p = objective.refine(grid[idx], refine_iters, spacing);
        let v = objective.value(&p);
        if v > best_value {
            best = p;
            best_value = v;
        }
    }
    Ok(GeneralMeasure {
        value: best_value,
        argmax: BlochPoint::from_vector(best),
        grid_max,
    })
}

/// Brute-force oracle: largest `‖E(ρ) − ρ‖` (operator norm) over a Fibonacci
/// grid of pure states, using the Kraus operators directly.
pub fn measure_by_definition(ch: &KrausChannel, grid_density: usize) -> Result<f64> {
    if ch.dim() != 2 {
        return Err(Error::NotQubit(ch.dim()));
    }
    if grid_density < 8 {
        return Err(Error::GridTooCoarse(grid_density));
    }
    let points = fibonacci_sphere(grid_density);
    Ok(points
        .par_iter()
        .map(|p| {
            let rho = bloch_matrix(p.x, p.y, p.z);
            let delta = ch.apply_operator(&rho) - &rho;
            // Traceless Hermitian 2×2: eigenvalues ±√(a² + |b|²).
            let a = (delta[(0, 0)].re - delta[(1, 1)].re) / 2.0;
            (a * a + delta[(0, 1)].norm_sqr()).sqrt()
        })
        .reduce(|| 0.0, f64::max))
}

/// Which evaluation path [`measure`] took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMethod {
    Diagonal,
    Quadratic,
    General,
}

impl MeasureMethod {
    pub fn name(self) -> &'static str {
        match self {
            MeasureMethod::Diagonal => "diagonal",
            MeasureMethod::Quadratic => "quadratic",
            MeasureMethod::General => "general",
        }
    }
}

/// Picks the cheapest exact method for the shape of χ: diagonal, then unital
/// quadratic form, then the general maximiser.
pub fn measure(chi: &ChiMatrix) -> Result<(f64, MeasureMethod)> {
    if chi.is_diagonal(ROUTING_TOLERANCE) {
        return Ok((diagonal_value(chi), MeasureMethod::Diagonal));
    }
    match build_quadratic_form_with(chi, ROUTING_TOLERANCE) {
        Ok(form) => Ok((
            form.max_eigenvalue().max(0.0).sqrt(),
            MeasureMethod::Quadratic,
        )),
        Err(Error::LinearTerms(_)) => Ok((
            measure_general(chi, DEFAULT_GRID_DENSITY, DEFAULT_REFINE_ITERS)?,
            MeasureMethod::General,
        )),
        Err(e) => Err(e),
    }
}
