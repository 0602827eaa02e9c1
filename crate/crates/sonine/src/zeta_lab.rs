//! The arithmetic layer: smooth bump test functions on [1/Lambda, Lambda],
//! the invariant differential operator D = u (d^2/du^2) u, the summation map
//! `E(phi)(u) = sum_{n>=1} phi(n u) - (int phi)/u` whose Mellin transform is
//! `zeta(s) phi-hat(s)`, the subspace W_Lambda spanned by E(D phi), the
//! obstruction functional beta whose critical-line minima sit at nontrivial
//! zeta zeros, and the quotient frame HP_Lambda.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::spaces::{
    completed_eval, containment_residual, evaluation_row, orthonormal_frame_from_functions,
    project_coefficients, FrameKind, SubspaceFrame,
};
use crate::transforms::{GridFunction, LogGrid};

/// A smooth compactly supported test function with closed-form derivatives.
pub trait TestFunction {
    fn eval(&self, u: f64) -> f64;
    /// Exact support interval [lo, hi].
    fn support(&self) -> (f64, f64);
    /// True when the Mellin transform vanishes at both 0 and 1, i.e. the
    /// function is D of something compactly supported; then `int phi = 0`
    /// exactly and E(phi) is supported in (0, sup].
    fn mellin_vanishes_at_0_and_1(&self) -> bool {
        false
    }
}

/// Test functions with closed-form first and second derivatives (inputs of D).
pub trait SmoothTestFunction: TestFunction {
    fn d1(&self, u: f64) -> f64;
    fn d2(&self, u: f64) -> f64;
}

/// The bump `phi(u) = xi^m exp(-1/(1 - xi^2))` with `xi = (u - c)/h`,
/// supported exactly on [c-h, c+h] inside (1/Lambda, Lambda).
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub lambda: f64,
    pub center: f64,
    pub width: f64,
    pub degree: u32,
}

/// Margin by which bump supports must clear the [1/Lambda, Lambda] endpoints.
const SUPPORT_MARGIN: f64 = 1e-3;

/// Build a bump on [c-h, c+h], which must sit strictly inside
/// [1/Lambda + margin, Lambda - margin].
pub fn make_bump(lambda: f64, center: f64, width: f64, degree: u32) -> Result<Bump> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidParameter(format!("Lambda = {lambda} must exceed 1")));
    }
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!("width = {width}")));
    }
    let lo = center - width;
    let hi = center + width;
    if lo < 1.0 / lambda + SUPPORT_MARGIN || hi > lambda - SUPPORT_MARGIN {
        return Err(Error::SupportViolation(format!(
            "[{lo}, {hi}] escapes [1/{lambda} + {SUPPORT_MARGIN}, {lambda} - {SUPPORT_MARGIN}]"
        )));
    }
    Ok(Bump { lambda, center, width, degree })
}

impl Bump {
    #[inline]
    fn xi(&self, u: f64) -> f64 {
        (u - self.center) / self.width
    }

    /// exp(-1/(1-xi^2)) and its first two xi-derivatives over the bump core.
    #[inline]
    fn core(&self, xi: f64) -> (f64, f64, f64) {
        let q = 1.0 - xi * xi;
        let b = (-1.0 / q).exp();
        let db = b * (-2.0 * xi / (q * q));
        let d2b = b
            * ((4.0 * xi * xi) / (q * q * q * q) - 2.0 / (q * q) - 8.0 * xi * xi / (q * q * q));
        (b, db, d2b)
    }
}

impl TestFunction for Bump {
    fn eval(&self, u: f64) -> f64 {
        let xi = self.xi(u);
        if xi.abs() >= 1.0 {
            return 0.0;
        }
        let (b, _, _) = self.core(xi);
        xi.powi(self.degree as i32) * b
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

impl SmoothTestFunction for Bump {
    fn d1(&self, u: f64) -> f64 {
        let xi = self.xi(u);
        if xi.abs() >= 1.0 {
            return 0.0;
        }
        let (b, db, _) = self.core(xi);
        let m = self.degree as i32;
        let poly = if m == 0 {
            db
        } else {
            m as f64 * xi.powi(m - 1) * b + xi.powi(m) * db
        };
        poly / self.width
    }

    fn d2(&self, u: f64) -> f64 {
        let xi = self.xi(u);
        if xi.abs() >= 1.0 {
            return 0.0;
        }
        let (b, db, d2b) = self.core(xi);
        let m = self.degree as i32;
        let poly = match m {
            0 => d2b,
            1 => 2.0 * db + xi * d2b,
            _ => {
                (m * (m - 1)) as f64 * xi.powi(m - 2) * b
                    + 2.0 * m as f64 * xi.powi(m - 1) * db
                    + xi.powi(m) * d2b
            }
        };
        poly / (self.width * self.width)
    }
}

/// `(D phi)(u) = u (u phi)'' = 2 u phi' + u^2 phi''`.
///
/// Support is unchanged, `int D phi = [u^2 phi']` over the support = 0
/// exactly, and the Mellin transform picks up the multiplier s(s-1).
#[derive(Debug, Clone, Copy)]
pub struct DApplied<F: SmoothTestFunction> {
    inner: F,
}

pub fn apply_d<F: SmoothTestFunction>(phi: F) -> DApplied<F> {
    DApplied { inner: phi }
}

impl<F: SmoothTestFunction> TestFunction for DApplied<F> {
    fn eval(&self, u: f64) -> f64 {
        2.0 * u * self.inner.d1(u) + u * u * self.inner.d2(u)
    }

    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn mellin_vanishes_at_0_and_1(&self) -> bool {
        true
    }
}

/// `I(phi)(u) = (1/u) phi(1/u)`, still smooth and compactly supported in
/// [1/Lambda, Lambda]; its Mellin transform is `phi-hat(1-s)`.
#[derive(Debug, Clone, Copy)]
pub struct Inverted<F: TestFunction> {
    inner: F,
}

pub fn invert<F: TestFunction>(phi: F) -> Inverted<F> {
    Inverted { inner: phi }
}

impl<F: TestFunction> TestFunction for Inverted<F> {
    fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        self.inner.eval(1.0 / u) / u
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        (1.0 / hi, 1.0 / lo)
    }

    fn mellin_vanishes_at_0_and_1(&self) -> bool {
        // (I phi)-hat(s) = phi-hat(1-s): vanishing at {0,1} is symmetric.
        self.inner.mellin_vanishes_at_0_and_1()
    }
}

/// `phi(theta u)` (used by the dilation covariance probe).
#[derive(Debug, Clone, Copy)]
pub struct Dilated<F: TestFunction> {
    inner: F,
    theta: f64,
}

pub fn dilate_argument<F: TestFunction>(phi: F, theta: f64) -> Dilated<F> {
    Dilated { inner: phi, theta }
}

impl<F: TestFunction> TestFunction for Dilated<F> {
    fn eval(&self, u: f64) -> f64 {
        self.inner.eval(self.theta * u)
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        (lo / self.theta, hi / self.theta)
    }

    fn mellin_vanishes_at_0_and_1(&self) -> bool {
        self.inner.mellin_vanishes_at_0_and_1()
    }
}

/// `int phi` to 1e-12 absolute: exact 0 for D-images, adaptive quadrature on
/// the closed form otherwise (never from grid samples).
pub fn integral(phi: &impl TestFunction) -> f64 {
    if phi.mellin_vanishes_at_0_and_1() {
        return 0.0;
    }
    let (lo, hi) = phi.support();
    quad::adaptive_real(|u| phi.eval(u), lo, hi, 1e-12)
}

/// Mellin transform of a test function by adaptive quadrature on its closed
/// form.
pub fn mellin_testfn(phi: &impl TestFunction, s: Complex64) -> Complex64 {
    let (lo, hi) = phi.support();
    quad::adaptive(
        |u| Complex64::new(phi.eval(u), 0.0) * ((s - 1.0) * u.ln()).exp(),
        lo,
        hi,
        1e-12,
    )
}

/// The summation map `E(phi)(u) = sum_{n >= 1} phi(n u) - (int phi)/u`,
/// sampled on the grid. The sum is finite (n <= sup(supp phi)/u).
pub fn e_map(phi: &impl TestFunction, grid: &Arc<LogGrid>) -> GridFunction {
    let (lo, hi) = phi.support();
    let total = integral(phi);
    let samples = grid
        .nodes()
        .iter()
        .map(|&u| {
            let mut acc = 0.0;
            let n_lo = (lo / u).ceil().max(1.0) as u64;
            let n_hi = (hi / u).floor() as u64;
            for n in n_lo..=n_hi {
                acc += phi.eval(n as f64 * u);
            }
            Complex64::new(acc - total / u, 0.0)
        })
        .collect();
    GridFunction::new(grid.clone(), samples).expect("samples match the grid")
}

/// The default bump family for W_Lambda: centers log-equispaced strictly
/// inside (1/Lambda, Lambda), widths 0.3 min(c - 1/Lambda, Lambda - c),
/// degrees alternating 0, 1.
pub fn default_bump_family(lambda: f64, family_size: usize) -> Result<Vec<Bump>> {
    if family_size < 4 {
        return Err(Error::InvalidParameter(format!(
            "family size {family_size} < 4"
        )));
    }
    let lo = 1.0 / lambda;
    let log_lo = lo.ln();
    let log_hi = lambda.ln();
    let inset = 0.06 * (log_hi - log_lo);
    let mut bumps = Vec::with_capacity(family_size);
    for i in 0..family_size {
        let frac = i as f64 / (family_size as f64 - 1.0);
        let log_c = (log_lo + inset) + frac * (log_hi - log_lo - 2.0 * inset);
        let c = log_c.exp();
        let h = 0.3 * (c - lo).min(lambda - c);
        bumps.push(make_bump(lambda, c, h, (i % 2) as u32)?);
    }
    Ok(bumps)
}

/// Build the discretized W_Lambda: orthonormalized span of E(D phi) over the
/// bump family, with rank truncation at tol * sigma_max. The returned frame's
/// `constraint_residual` records its violation of the H_Lambda constraints
/// (support above Lambda and G-image above Lambda).
pub fn build_w_lambda(
    lambda: f64,
    family_size: usize,
    grid: &Arc<LogGrid>,
    tol: f64,
) -> Result<SubspaceFrame> {
    let bumps = default_bump_family(lambda, family_size)?;
    let functions: Vec<GridFunction> = bumps
        .iter()
        .map(|b| e_map(&apply_d(*b), grid))
        .collect();
    let mut frame =
        orthonormal_frame_from_functions(grid, &functions, FrameKind::WLambda { lambda }, tol)?;

    // H_Lambda-constraint residual of the frame vectors.
    let g = {
        let s = grid.sym_kernel();
        let n = grid.len();
        nalgebra::DMatrix::from_fn(n, n, |i, j| s[(n - 1 - i, n - 1 - j)])
    };
    let above: Vec<usize> = (0..grid.len())
        .filter(|j| grid.nodes()[*j] > lambda)
        .collect();
    let mut worst: f64 = 0.0;
    let basis = frame.basis_matrix();
    for c in 0..basis.ncols() {
        let col = basis.column(c);
        let mut viol: f64 = 0.0;
        for j in &above {
            viol += col[*j] * col[*j];
        }
        let image = &g * col;
        for j in &above {
            viol += image[*j] * image[*j];
        }
        worst = worst.max(viol.sqrt());
    }
    frame.constraint_residual = worst;
    Ok(frame)
}

/// Normalized obstruction `beta = ||P_W Z^Lambda_{w,k}|| / ||Z^Lambda_{w,k}||`.
///
/// Zero characterizes representers perpendicular to W_Lambda, i.e. w a
/// nontrivial zeta zero of multiplicity > k.
pub fn obstruction_beta(
    h_frame: &SubspaceFrame,
    w_frame: &SubspaceFrame,
    w: Complex64,
    k: u32,
) -> Result<f64> {
    let z_coeffs = evaluation_row(h_frame, w, k)?;
    let z_norm_sq: f64 = z_coeffs.iter().map(|c| c.norm_sqr()).sum();
    if z_norm_sq < 1e-24 {
        return Err(Error::DegenerateRepresenter { norm: z_norm_sq.sqrt() });
    }
    let z = h_frame.combine(&z_coeffs)?;
    let proj = project_coefficients(w_frame, &z);
    let proj_norm_sq: f64 = proj.iter().map(|c| c.norm_sqr()).sum();
    Ok((proj_norm_sq / z_norm_sq).sqrt().min(1.0))
}

/// A refined local minimum of the obstruction on the critical line.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ObstructionMinimum {
    pub t: f64,
    pub beta: f64,
}

/// Tabulated obstruction over a critical-line window.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub lambda: f64,
    pub threshold: f64,
    pub t_samples: Vec<f64>,
    pub beta: Vec<f64>,
    /// Sub-threshold refined local minima, sorted by t.
    pub minima: Vec<ObstructionMinimum>,
}

fn golden_minimize<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.6180339887498949;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

/// Scan beta on w = 1/2 + it over [t_min, t_max]; local minima are refined by
/// golden section to step/100 and reported when below the threshold.
pub fn zero_scan(
    h_frame: &SubspaceFrame,
    w_frame: &SubspaceFrame,
    t_min: f64,
    t_max: f64,
    step: f64,
    threshold: f64,
) -> Result<ObstructionReport> {
    let lambda = match h_frame.kind {
        FrameKind::HLambda { lambda } => lambda,
        _ => return Err(Error::InvalidParameter("zero scan needs an H_Lambda frame".into())),
    };
    let n = ((t_max - t_min) / step).round() as usize;
    let t_samples: Vec<f64> = (0..=n).map(|i| t_min + i as f64 * step).collect();
    let beta_at = |t: f64| {
        obstruction_beta(h_frame, w_frame, Complex64::new(0.5, t), 0)
            .expect("critical line stays away from the poles")
    };
    use rayon::prelude::*;
    let beta: Vec<f64> = t_samples.par_iter().map(|t| beta_at(*t)).collect();
    let mut minima = Vec::new();
    for i in 1..beta.len().saturating_sub(1) {
        if beta[i] <= beta[i - 1] && beta[i] <= beta[i + 1] {
            let (t_ref, b_ref) =
                golden_minimize(&beta_at, t_samples[i - 1], t_samples[i + 1], step / 100.0);
            if b_ref < threshold {
                minima.push(ObstructionMinimum { t: t_ref, beta: b_ref });
            }
        }
    }
    minima.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    minima.dedup_by(|a, b| (a.t - b.t).abs() < step / 10.0);
    Ok(ObstructionReport { lambda, threshold, t_samples, beta, minima })
}

/// The orthogonal complement of W_Lambda inside H_Lambda:
/// span(H) with the W-projections removed, dim(HP) = dim(H) - dim(W).
pub fn build_hp_lambda(
    h_frame: &SubspaceFrame,
    w_frame: &SubspaceFrame,
) -> Result<SubspaceFrame> {
    let lambda = match (h_frame.kind, w_frame.kind) {
        (FrameKind::HLambda { lambda }, FrameKind::WLambda { lambda: lw }) => {
            if (lambda - lw).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "H(Lambda={lambda}) vs W(Lambda={lw})"
                )));
            }
            lambda
        }
        _ => {
            return Err(Error::InvalidParameter(
                "HP needs an H_Lambda frame and a W_Lambda frame".into(),
            ))
        }
    };
    let dh = h_frame.dimension();
    let dw = w_frame.dimension();
    if dw > dh {
        return Err(Error::Dimension(format!("dim W = {dw} exceeds dim H = {dh}")));
    }
    // Coefficients of the W-frame inside the H-frame. Its column space (rank
    // dw when W really sits inside H) is the W-part of R^{dh}; HP is H times
    // the orthogonal complement, so HP x W cross-Grams vanish by construction
    // (inner products against W only see its H-projection).
    let cross = h_frame.basis_matrix().transpose() * w_frame.basis_matrix();
    let svd = cross.svd(true, false);
    let rank = svd.singular_values.iter().filter(|s| **s >= 0.5).count();
    if rank < dw {
        return Err(Error::Dimension(format!(
            "W is not contained in H: projection rank {rank} < dim W = {dw}"
        )));
    }
    let u = svd.u.expect("requested U");
    let u_rank = u.columns(0, rank).into_owned();
    // Complete col(u_rank) to an orthonormal basis of R^{dh} by Gram-Schmidt
    // over the identity columns.
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(dh - rank);
    for i in 0..dh {
        let mut v = nalgebra::DVector::<f64>::zeros(dh);
        v[i] = 1.0;
        let coeff = u_rank.transpose() * &v;
        v -= &u_rank * coeff;
        for c in &cols {
            let d: f64 = v.dot(c);
            v -= d * c;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            v /= norm;
            cols.push(v);
            if cols.len() == dh - rank {
                break;
            }
        }
    }
    if cols.len() != dh - rank {
        return Err(Error::Dimension("failed to complete the HP complement basis".into()));
    }
    let mut complement = nalgebra::DMatrix::<f64>::zeros(dh, dh - rank);
    for (c, v) in cols.iter().enumerate() {
        complement.set_column(c, v);
    }
    let basis = h_frame.basis_matrix() * complement;
    Ok(SubspaceFrame::from_basis(
        h_frame.grid().clone(),
        basis,
        FrameKind::HpLambda { lambda },
        h_frame.constraint_residual,
        h_frame.certification_residual,
        h_frame.raw_dimension,
        h_frame.tol,
    ))
}

/// Max principal-angle residual of W against H (the W-subset check).
pub fn w_inside_h_residual(h_frame: &SubspaceFrame, w_frame: &SubspaceFrame) -> f64 {
    containment_residual(w_frame, h_frame)
}

/// `M(g_j)^{(k)}(w)` over the W-frame, the numerator data of beta.
pub fn w_frame_evaluations(
    w_frame: &SubspaceFrame,
    w: Complex64,
    k: u32,
) -> Result<Vec<Complex64>> {
    (0..w_frame.dimension())
        .map(|i| completed_eval(&w_frame.vector(i), w, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{bilinear_pair, make_log_grid, mellin, operator_g};
    use approx::assert_relative_eq;

    fn fast_grid() -> Arc<LogGrid> {
        make_log_grid(4.0, 256).unwrap()
    }

    #[test]
    fn bump_values_at_center_and_edge() {
        let b = make_bump(2.0, 1.0, 0.4, 0).unwrap();
        assert_relative_eq!(b.eval(1.0), (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(b.eval(1.4), 0.0);
        assert_eq!(b.eval(1.4 + 1e-12), 0.0);
    }

    #[test]
    fn bump_is_flat_at_the_edge() {
        let b = make_bump(2.0, 1.0, 0.4, 0).unwrap();
        let v = b.eval(1.0 + 0.4 - 1e-9);
        assert!(v < 1e-300, "near-edge value {v}");
        let v = b.eval(1.0 - 0.4 + 1e-9);
        assert!(v < 1e-300, "near-edge value {v}");
    }

    #[test]
    fn odd_bump_integrates_to_zero() {
        let b = make_bump(2.0, 1.0, 0.3, 1).unwrap();
        let v = integral(&b);
        assert!(v.abs() < 1e-12, "odd bump integral {v}");
    }

    #[test]
    fn bump_rejects_support_violation() {
        assert!(matches!(
            make_bump(2.0, 1.8, 0.4, 0),
            Err(Error::SupportViolation(_))
        ));
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = make_bump(2.0, 1.0, 0.35, 1).unwrap();
        let h = 1e-5;
        for &u in &[0.8, 0.95, 1.0, 1.1, 1.3] {
            let fd1 = (b.eval(u + h) - b.eval(u - h)) / (2.0 * h);
            let fd2 = (b.eval(u + h) - 2.0 * b.eval(u) + b.eval(u - h)) / (h * h);
            assert!((b.d1(u) - fd1).abs() <= 1e-6 * fd1.abs().max(1.0), "d1 at {u}");
            assert!((b.d2(u) - fd2).abs() <= 1e-4 * fd2.abs().max(1.0), "d2 at {u}");
        }
    }

    #[test]
    fn d_multiplier_is_s_s_minus_one() {
        let b = make_bump(2.0, 1.0, 0.35, 0).unwrap();
        let db = apply_d(b);
        let s = Complex64::new(0.5, 3.0);
        let lhs = mellin_testfn(&db, s);
        let rhs = s * (s - 1.0) * mellin_testfn(&b, s);
        assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn d_image_has_vanishing_mass() {
        let b = make_bump(2.0, 1.1, 0.3, 1).unwrap();
        let db = apply_d(b);
        // int D phi = phi-hat(1) = 0, via direct quadrature of the closed form
        let (lo, hi) = db.support();
        let direct = quad::adaptive_real(|u| db.eval(u), lo, hi, 1e-13);
        assert!(direct.abs() <= 1e-10, "int D phi = {direct}");
        // and the multiplier kills s = 0 too
        let at_zero = mellin_testfn(&db, Complex64::new(0.0, 0.0));
        assert!(at_zero.norm() <= 1e-10, "D phi-hat(0) = {at_zero}");
    }

    #[test]
    fn d_on_grid_matches_multiplier() {
        let grid = fast_grid();
        let b = make_bump(2.0, 1.0, 0.35, 0).unwrap();
        let db = apply_d(b);
        let f = GridFunction::from_real_fn(grid.clone(), |u| db.eval(u));
        let phi = GridFunction::from_real_fn(grid.clone(), |u| b.eval(u));
        let s0 = Complex64::new(0.7, 0.0);
        let lhs = mellin(&f, s0);
        let rhs = s0 * (s0 - 1.0) * mellin(&phi, s0);
        assert!((lhs - rhs).norm() <= 1e-6 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn e_map_vanishes_above_lambda_for_d_images() {
        let grid = fast_grid();
        let b = make_bump(2.0, 1.0, 0.3, 0).unwrap();
        let e = e_map(&apply_d(b), &grid);
        for (j, u) in grid.nodes().iter().enumerate() {
            if *u > 2.0 {
                assert_eq!(e.samples()[j], Complex64::new(0.0, 0.0), "E != 0 at u={u}");
            }
        }
    }

    #[test]
    fn e_map_mellin_factorizes_through_zeta() {
        let grid = fast_grid();
        let b = make_bump(2.0, 1.0, 0.3, 0).unwrap();
        let db = apply_d(b);
        let e = e_map(&db, &grid);
        let s = Complex64::new(0.5, 5.0);
        let lhs = mellin(&e, s);
        let rhs = crate::specfun::riemann_zeta(s).unwrap() * mellin_testfn(&db, s);
        assert!(
            (lhs - rhs).norm() <= 1e-4 * rhs.norm().max(1e-6),
            "{lhs} vs {rhs}"
        );
    }

    #[test]
    fn e_map_is_linear() {
        let grid = fast_grid();
        let b1 = make_bump(2.0, 1.0, 0.3, 0).unwrap();
        let b2 = make_bump(2.0, 0.8, 0.2, 1).unwrap();
        let e1 = e_map(&b1, &grid);
        let e2 = e_map(&b2, &grid);
        // E(phi1 + phi2) pointwise equals E(phi1) + E(phi2)
        struct Sum(Bump, Bump);
        impl TestFunction for Sum {
            fn eval(&self, u: f64) -> f64 {
                self.0.eval(u) + self.1.eval(u)
            }
            fn support(&self) -> (f64, f64) {
                let (a1, b1) = self.0.support();
                let (a2, b2) = self.1.support();
                (a1.min(a2), b1.max(b2))
            }
        }
        let e12 = e_map(&Sum(b1, b2), &grid);
        for j in 0..grid.len() {
            let want = e1.samples()[j] + e2.samples()[j];
            assert!(
                (e12.samples()[j] - want).norm() <= 1e-12 * want.norm().max(1.0),
                "nonlinear at node {j}"
            );
        }
    }

    #[test]
    fn e_map_dilation_covariance() {
        let grid = fast_grid();
        let b = make_bump(2.0, 1.0, 0.25, 0).unwrap();
        let theta = grid.delta().exp();
        // E(phi(theta .))(u) = E(phi)(theta u): grid-shift by one node.
        let e_scaled = e_map(&dilate_argument(b, theta), &grid);
        let e_plain = e_map(&b, &grid);
        for j in 0..grid.len() - 1 {
            let want = e_plain.samples()[j + 1]; // node j+1 is theta * node j
            let got = e_scaled.samples()[j];
            assert!(
                (got - want).norm() <= 1e-10 * want.norm().max(1.0),
                "covariance off at node {j}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn g_equivariance_of_e_map() {
        let grid = fast_grid();
        let b = make_bump(2.0, 1.05, 0.3, 0).unwrap();
        let db = apply_d(b);
        let e = e_map(&db, &grid);
        let lhs = operator_g(&e);
        let rhs = e_map(&invert(db), &grid);
        let num = lhs
            .samples()
            .iter()
            .zip(rhs.samples())
            .zip(grid.weights())
            .map(|((a, b), w)| (a - b).norm_sqr() * w)
            .sum::<f64>()
            .sqrt();
        let denom = e.norm();
        assert!(num <= 1e-4 * denom, "relative equivariance error {}", num / denom);
    }

    #[test]
    fn w_frame_builds_with_expected_shape() {
        let grid = fast_grid();
        let w = build_w_lambda(2.0, 8, &grid, 1e-8).unwrap();
        assert!(w.dimension() >= 3, "dim W = {}", w.dimension());
        assert!(w.gram_defect() <= 1e-12);
        assert!(
            w.constraint_residual <= 1e-3,
            "H-constraint residual of W: {}",
            w.constraint_residual
        );
        for i in 0..w.dimension() {
            let v = w.vector(i);
            let above: f64 = v
                .samples()
                .iter()
                .zip(grid.nodes())
                .zip(grid.weights())
                .filter(|((_, t), _)| **t > 2.0)
                .map(|((s, _), wt)| s.norm_sqr() * wt)
                .sum::<f64>()
                .sqrt();
            assert!(above <= 1e-6, "support leak above Lambda: {above}");
        }
    }

    #[test]
    fn hp_complement_shapes_and_orthogonality() {
        let grid = fast_grid();
        let h = crate::spaces::build_h_lambda(2.0, &grid, 1e-8).unwrap();
        let w = build_w_lambda(2.0, 8, &grid, 1e-8).unwrap();
        let hp = build_hp_lambda(&h, &w).unwrap();
        assert_eq!(hp.dimension() + w.dimension(), h.dimension());
        // cross-Gram of HP and W vanishes by construction
        for i in 0..hp.dimension() {
            let hv = hp.vector(i);
            for j in 0..w.dimension() {
                let g = bilinear_pair(&hv, &w.vector(j)).unwrap();
                assert!(g.norm() <= 1e-10, "cross-Gram entry {g}");
            }
        }
    }
}
