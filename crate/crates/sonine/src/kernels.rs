//! The truncated-cosine kernels of the analytic-continuation machinery:
//! `C_a(u,w) = 2 int_a^inf cos(2 pi u t) t^{w-1} dt`, its companion
//! `S_a(u,w)` with sine, and the head integral `D_a(u,w) = 2 int_0^a ...`.
//!
//! Two genuinely independent evaluation routes are kept alive:
//!
//! * series: `C_a = gamma_plus(w) u^{-w} - D_a(u,w)` with D_a summed from its
//!   power series (valid for Re w > 0);
//! * quadrature: one integration by parts,
//!   `C_a = [(1-w) S_a(u,w-1)/2 - a^{w-1} sin(2 pi a u)] / (pi u)`, with the
//!   absolutely convergent sine tail done by half-period panels (valid for
//!   Re w < 1).
//!
//! Their agreement on the overlap strip 0 < Re w < 1 is a standing
//! cross-check. The module also provides Cauchy-circle derivatives in w, the
//! profile functions D_{w,k} / X^lambda_{w,k}, and the numerical form of the
//! analytic-continuation identity for Sonine functions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::gamma_plus;
use crate::transforms::{cosine_transform, mellin, GridFunction, LogGrid};

/// Evaluation route for the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Series,
    Quadrature,
    Auto,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Route::Series => write!(f, "series"),
            Route::Quadrature => write!(f, "quadrature"),
            Route::Auto => write!(f, "auto"),
        }
    }
}

/// Hard divergence guard for the alternating head series (the terms grow
/// like (2 pi u a)^{2j}/(2j)! before alternation wins).
const SERIES_ARG_LIMIT: f64 = 600.0;
/// Above this value of 2 pi u a the series loses too many digits in f64 to
/// be useful, so the series route computes the head integral by adaptive
/// panels instead.
const SERIES_PRECISION_LIMIT: f64 = 15.0;
const SERIES_MAX_TERMS: usize = 200;
const SERIES_REL_TAIL: f64 = 1e-14;
/// Relative disagreement between routes that the auto route tolerates.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-6;

/// One kernel evaluation record (CLI scan row).
#[derive(Debug, Clone)]
pub struct KernelEval {
    pub a: f64,
    pub u: f64,
    pub w: Complex64,
    pub route: Route,
    pub series_cutoff: usize,
    pub value: Complex64,
    /// Relative gap between the two routes when both were computed.
    pub crosscheck_residual: Option<f64>,
}

/// Head-integral series (1.3):
/// `D_a(u,w) = 2 sum_j ((-1)^j/(2j)!) (2 pi u)^{2j} a^{2j+w} / (2j+w)`.
///
/// Requires Re w > 0. Errors if 2 pi u a > 600 (growth before alternation).
pub fn d_a_series(u: f64, w: Complex64, a: f64) -> Result<Complex64> {
    if w.re <= 0.0 {
        return Err(Error::RouteDomain(format!(
            "D_a series needs Re w > 0, got w = {w}"
        )));
    }
    let x = 2.0 * std::f64::consts::PI * u * a;
    if x > SERIES_ARG_LIMIT {
        return Err(Error::SeriesDivergence(format!(
            "2 pi u a = {x:.1} > {SERIES_ARG_LIMIT}"
        )));
    }
    let a_pow_w = (w * a.ln()).exp();
    let mut coeff = 1.0f64; // (-1)^j (2 pi u a)^{2j} / (2j)!
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..SERIES_MAX_TERMS {
        let term = coeff * a_pow_w / (w + 2.0 * j as f64);
        sum += term;
        if term.norm() <= SERIES_REL_TAIL * sum.norm().max(1e-300) && x < 2.0 * j as f64 {
            break;
        }
        let jj = 2.0 * j as f64;
        coeff *= -x * x / ((jj + 1.0) * (jj + 2.0));
    }
    Ok(2.0 * sum)
}

/// Head integral by adaptive panels; used where the series would lose too
/// much precision to cancellation, and as an independent oracle in tests.
fn d_a_quadrature(u: f64, w: Complex64, a: f64, tol: f64) -> Complex64 {
    // Octave subdivision toward 0 tames the t^{w-1} endpoint; each octave is
    // further split by the adaptive rule if 2 pi u t oscillates.
    let f = |t: f64| {
        (2.0 * std::f64::consts::PI * u * t).cos() * ((w - 1.0) * t.ln()).exp()
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut hi = a;
    // stop once the remaining head contributes below tol:
    // |2 int_0^eps cos * t^{w-1} dt| <= 2 eps^Re(w) / Re(w)
    let eps_cut = (0.5 * tol * w.re).powf(1.0 / w.re).min(a / 2.0);
    loop {
        let lo = (0.5 * hi).max(eps_cut);
        acc += quad::adaptive(f, lo, hi, tol * 0.05);
        if lo <= eps_cut {
            break;
        }
        hi = lo;
    }
    2.0 * acc
}

fn c_a_series(u: f64, w: Complex64, a: f64) -> Result<Complex64> {
    if w.re <= 0.0 {
        return Err(Error::RouteDomain(format!(
            "series route needs Re w > 0, got w = {w}"
        )));
    }
    let head = if 2.0 * std::f64::consts::PI * u * a <= SERIES_PRECISION_LIMIT {
        d_a_series(u, w, a)?
    } else {
        d_a_quadrature(u, w, a, 1e-11)
    };
    let mult = gamma_plus(w);
    debug_assert!(!mult.is_pole(), "gamma_plus is pole-free on Re w > 0");
    Ok(mult.value * (-w * u.ln()).exp() - head)
}

fn c_a_quadrature(u: f64, w: Complex64, a: f64) -> Result<Complex64> {
    if w.re >= 1.0 {
        return Err(Error::RouteDomain(format!(
            "quadrature route needs Re w < 1, got w = {w}"
        )));
    }
    // C_a(u,w) = [ (1-w) int_a^inf sin(2 pi u t) t^{w-2} dt
    //             - a^{w-1} sin(2 pi a u) ] / (pi u)
    let tail = quad::osc_sin_tail(u, w - 2.0, a, 1e-12)?;
    let boundary = ((w - 1.0) * a.ln()).exp() * (2.0 * std::f64::consts::PI * a * u).sin();
    Ok(((1.0 - w) * tail - boundary) / (std::f64::consts::PI * u))
}

/// `C_a(u, w)` by the requested route. The auto route dispatches on Re w and
/// cross-checks both routes on the overlap strip 0 < Re w < 1, erroring if
/// they disagree beyond [`ROUTE_AGREEMENT_TOL`] relative.
pub fn c_a_eval(u: f64, w: Complex64, a: f64, route: Route) -> Result<Complex64> {
    assert!(u > 0.0 && a > 0.0, "C_a is defined for u, a > 0");
    match route {
        Route::Series => c_a_series(u, w, a),
        Route::Quadrature => c_a_quadrature(u, w, a),
        Route::Auto => {
            if w.re <= 0.0 {
                c_a_quadrature(u, w, a)
            } else if w.re >= 1.0 {
                c_a_series(u, w, a)
            } else {
                let s = c_a_series(u, w, a)?;
                let q = c_a_quadrature(u, w, a)?;
                let scale = s.norm().max(q.norm()).max(1e-12);
                let gap = (s - q).norm() / scale;
                if gap > ROUTE_AGREEMENT_TOL {
                    return Err(Error::RouteCrosscheck { series: s, quadrature: q, gap });
                }
                Ok(0.5 * (s + q))
            }
        }
    }
}

/// `S_a(u, w) = 2 int_a^inf sin(2 pi u t) t^{w-1} dt`.
///
/// Direct half-period quadrature for Re w < 1; for Re w >= 1 the companion
/// recursion through C_a(u, w-1) (one integration by parts per step).
pub fn s_a_eval(u: f64, w: Complex64, a: f64) -> Result<Complex64> {
    assert!(u > 0.0 && a > 0.0, "S_a is defined for u, a > 0");
    if w.re < 1.0 {
        Ok(2.0 * quad::osc_sin_tail(u, w - 1.0, a, 1e-12)?)
    } else {
        // S_a(u,w) = [a^{w-1} cos(2 pi a u)]/(pi u) + (w-1)/(2 pi u) C_a(u, w-1)
        let c = c_a_eval(u, w - 1.0, a, Route::Auto)?;
        let boundary = ((w - 1.0) * a.ln()).exp() * (2.0 * std::f64::consts::PI * a * u).cos();
        Ok(boundary / (std::f64::consts::PI * u)
            + (w - 1.0) / (2.0 * std::f64::consts::PI * u) * c)
    }
}

/// Convenience record builder for CLI scans.
pub fn kernel_eval_record(u: f64, w: Complex64, a: f64, route: Route) -> Result<KernelEval> {
    let value = c_a_eval(u, w, a, route)?;
    let crosscheck_residual = if w.re > 0.0 && w.re < 1.0 {
        let s = c_a_series(u, w, a)?;
        let q = c_a_quadrature(u, w, a)?;
        Some((s - q).norm() / s.norm().max(q.norm()).max(1e-12))
    } else {
        None
    };
    Ok(KernelEval {
        a,
        u,
        w,
        route,
        series_cutoff: SERIES_MAX_TERMS,
        value,
        crosscheck_residual,
    })
}

/// k-th derivative of an analytic function by the Cauchy integral over a
/// circle of the given radius, trapezoid rule with max(32, 8k) points.
///
/// The evaluator failing anywhere on the circle is reported as a radius
/// collision (a pole inside the disc).
pub fn dw_derivative<F>(eval: F, w: Complex64, k: u32, radius: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::RadiusCollision { center: w, radius });
    }
    let m = 32usize.max(8 * k as usize);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let dir = Complex64::new(0.0, theta).exp();
        let z = w + radius * dir;
        let val = eval(z).map_err(|_| Error::RadiusCollision { center: w, radius })?;
        acc += val * Complex64::new(0.0, -(k as f64) * theta).exp();
    }
    let mut k_fact = 1.0f64;
    for j in 2..=k {
        k_fact *= j as f64;
    }
    Ok(acc * k_fact / (m as f64 * radius.powi(k as i32)))
}

/// Parameters of the profile `D_{w,k}` truncated at lambda.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSpec {
    pub lambda: f64,
    pub w: Complex64,
    pub k: u32,
}

impl ProfileSpec {
    pub fn new(lambda: f64, w: Complex64, k: u32) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
        }
        if k > 8 {
            return Err(Error::InvalidParameter(format!(
                "derivative order k = {k} exceeds cap 8"
            )));
        }
        Ok(ProfileSpec { lambda, w, k })
    }
}

/// The profile `D_{w,k}(t)`: `(log(1/t))^k t^{-w}` on Re w > 1/2, and the
/// k-th w-derivative of `C_lambda(t, w)` on Re w <= 1/2 (Cauchy circle with
/// the quadrature route, which is valid on the whole circle there).
pub fn profile_d_wk(t: f64, spec: &ProfileSpec) -> Result<Complex64> {
    assert!(t > 0.0, "profiles are defined on t > 0");
    if spec.w.re > 0.5 {
        let log_inv = -t.ln();
        Ok(log_inv.powi(spec.k as i32) * (-spec.w * t.ln()).exp())
    } else {
        let radius = 0.2f64.min((1.0 - spec.w.re) / 2.0);
        dw_derivative(
            |z| c_a_eval(t, z, spec.lambda, Route::Quadrature),
            spec.w,
            spec.k,
            radius,
        )
    }
}

/// The vector `X^lambda_{w,k} = 1_{t >= lambda} D_{w,k}(t)` sampled on a grid.
pub fn sample_x_profile(
    spec: &ProfileSpec,
    grid: &std::sync::Arc<LogGrid>,
) -> Result<GridFunction> {
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (j, t) in grid.nodes().iter().enumerate() {
        if *t >= spec.lambda {
            samples[j] = profile_d_wk(*t, spec)?;
        }
    }
    GridFunction::new(grid.clone(), samples)
}

/// Residual of the analytic-continuation identity (the numerical content of
/// the entirety theorem for Sonine functions):
///
/// `int_0^inf f t^{s-1} dt  =  int_b^inf C_a(u, s) (F+ f)(u) du`,
///
/// with the kernel evaluated by the quadrature route (Re s < 1).
/// Returns |LHS - RHS|.
pub fn identity_1_2_residual(f: &GridFunction, a: f64, b: f64, s: Complex64) -> Result<f64> {
    if s.re >= 1.0 {
        return Err(Error::RouteDomain(format!(
            "identity check needs Re s < 1, got {s}"
        )));
    }
    let lhs = mellin(f, s);
    let transform = cosine_transform(f);
    let grid = f.grid();
    let mut rhs = Complex64::new(0.0, 0.0);
    for (j, u) in grid.nodes().iter().enumerate() {
        if *u < b {
            continue;
        }
        let kernel = c_a_eval(*u, s, a, Route::Quadrature)?;
        rhs += kernel * transform.samples()[j] * grid.weights()[j];
    }
    Ok((lhs - rhs).norm())
}
