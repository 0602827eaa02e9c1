//! Internal quadrature machinery: adaptive Gauss-Legendre panels for proper
//! integrals and half-period panel summation with Euler acceleration for
//! oscillatory tails on [a, infinity).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Positive-half Gauss-Legendre 16 nodes and weights on [-1, 1].
const GL16: [(f64, f64); 8] = [
    (0.09501250983763744, 0.1894506104550685),
    (0.2816035507792589, 0.18260341504492358),
    (0.45801677765722737, 0.16915651939500254),
    (0.6178762444026438, 0.14959598881657674),
    (0.755404408355003, 0.12462897125553388),
    (0.8656312023878318, 0.09515851168249278),
    (0.9445750230732326, 0.062253523938647894),
    (0.9894009349916499, 0.027152459411754095),
];

/// Single-panel GL-16 on [a, b].
pub fn gl16<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in GL16 {
        acc += w * (f(c + h * x) + f(c - h * x));
    }
    acc * h
}

fn adaptive_rec<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let left = gl16(f, a, m);
    let right = gl16(f, m, b);
    let diff = (left + right - whole).norm();
    if diff <= tol || depth >= 48 || (b - a) < 1e-300 {
        return left + right;
    }
    adaptive_rec(f, a, m, left, 0.5 * tol, depth + 1)
        + adaptive_rec(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Adaptive GL-16 with bisection on [a, b]; `tol` is absolute.
pub fn adaptive<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let whole = gl16(&f, a, b);
    adaptive_rec(&f, a, b, whole, tol.max(1e-15), 0)
}

/// Adaptive quadrature of a real function.
pub fn adaptive_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adaptive(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}

/// GL-16 over [a, b] split into octave pieces, so both the half-period
/// oscillation and a power-law envelope stay polynomial-like per piece.
fn panel_octaves<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = a;
    while 2.0 * lo < b {
        let hi = 2.0 * lo;
        acc += gl16(f, lo, hi);
        lo = hi;
    }
    acc + gl16(f, lo, b)
}

/// Iterated-average (Euler) acceleration of a sequence of partial sums.
/// Returns (estimate, error estimate).
fn euler_accelerate(partials: &[Complex64]) -> (Complex64, f64) {
    let mut row: Vec<Complex64> = partials.to_vec();
    let mut best = *row.last().unwrap();
    let mut err = f64::INFINITY;
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
        let cur = *row.last().unwrap();
        let step = (cur - best).norm();
        if step < err {
            err = step;
            best = cur;
        }
    }
    (best, err)
}

/// Oscillatory tail integral `int_a^inf sin(2 pi u t) t^exponent dt`.
///
/// Summed over half-period panels [a + m/(2u), a + (m+1)/(2u)] with GL-16 on
/// octave subdivisions, then Euler-accelerated as an alternating series.
/// Converges (conditionally) for Re(exponent) < 0; absolutely below -1.
pub fn osc_sin_tail(u: f64, exponent: Complex64, a: f64, tol: f64) -> Result<Complex64> {
    assert!(u > 0.0 && a > 0.0);
    debug_assert!(exponent.re < 0.0, "tail integral needs a decaying envelope");
    let phase = |t: f64| (2.0 * std::f64::consts::PI * u * t).sin();
    let f = |t: f64| phase(t) * (exponent * t.ln()).exp();
    let half_period = 0.5 / u;

    const MAX_PANELS: usize = 4096;
    const BATCH: usize = 16;
    let mut partials: Vec<Complex64> = Vec::with_capacity(256);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut m = 0usize;
    let mut scale: f64 = 0.0;
    loop {
        for _ in 0..BATCH {
            let lo = a + m as f64 * half_period;
            let hi = lo + half_period;
            let panel = panel_octaves(&f, lo, hi);
            sum += panel;
            partials.push(sum);
            scale = scale.max(panel.norm());
            m += 1;
        }
        // Envelope died inside the panels already summed.
        let recent: f64 = partials[partials.len() - 4..]
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .sum();
        if recent <= 0.25 * tol {
            return Ok(sum);
        }
        if partials.len() >= 8 {
            let start = partials.len().saturating_sub(96);
            let (est, err) = euler_accelerate(&partials[start..]);
            if err <= tol.max(1e-15 * scale) {
                return Ok(est);
            }
        }
        if m >= MAX_PANELS {
            return Err(Error::QuadratureStall { u, panels: m });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn adaptive_integrates_polynomial() {
        let v = adaptive_real(|x| x * x, 0.0, 1.0, 1e-12);
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_integrates_oscillation() {
        let v = adaptive_real(|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI, 1e-12);
        // int_0^pi sin(10x) dx = (1 - cos(10 pi)) / 10 = 0
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_integrable_endpoint_singularity() {
        let v = adaptive_real(|x| x.powf(-0.5), 0.0, 1.0, 1e-10);
        assert_relative_eq!(v, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn sin_tail_matches_sine_integral() {
        // 2 int_1^inf sin(2 pi t)/t dt = 2 (pi/2 - Si(2 pi)), frozen from mpmath.
        let v = osc_sin_tail(1.0, Complex64::new(-1.0, 0.0), 1.0, 1e-12).unwrap();
        assert_relative_eq!(2.0 * v.re, 0.30528950132453634, max_relative = 1e-9);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn sin_tail_small_u_regime() {
        // u = 0.01, exponent -2.5: absolutely convergent, almost no oscillation.
        let u = 0.01;
        let v = osc_sin_tail(u, Complex64::new(-2.5, 0.0), 1.0, 1e-12).unwrap();
        let want = adaptive(
            |t: f64| (2.0 * std::f64::consts::PI * u * t).sin() * Complex64::new(t.powf(-2.5), 0.0),
            1.0,
            4000.0,
            1e-13,
        );
        assert!((v - want).norm() < 1e-8, "{v} vs {want}");
    }

    #[test]
    fn sin_tail_complex_exponent() {
        // Check against a very long direct adaptive integral with analytic tail bound.
        let u = 0.8;
        let e = Complex64::new(-1.7, 1.3);
        let v = osc_sin_tail(u, e, 0.7, 1e-12).unwrap();
        let direct = adaptive(
            |t: f64| {
                (2.0 * std::f64::consts::PI * u * t).sin() * (e * t.ln()).exp()
            },
            0.7,
            3000.0,
            1e-13,
        );
        // |tail beyond 3000| <= int_3000^inf t^-1.7 dt ~ 2.6e-3 / 0.7... actually
        // the oscillatory tail is much smaller; compare loosely.
        assert!((v - direct).norm() < 1e-5, "{v} vs {direct}");
    }
}
