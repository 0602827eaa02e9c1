//! Discrete model of K = L^2((0,infinity), dt): reciprocal-symmetric
//! log-uniform grids, the cosine transform F+, the inversion I, the unitary
//! G = I F+ I, grid-compatible dilations, the euclidean (bilinear) pairing,
//! and discrete Mellin evaluation.
//!
//! Design notes that the rest of the crate leans on:
//!
//! * Nodes come in exact reciprocal pairs: `t[n-1-j] = 1/t[j]` bitwise, so the
//!   inversion I is an exact node permutation and identities of the form
//!   `H_Lambda = I K_{1/Lambda,1/Lambda}` survive discretization exactly.
//! * In "weighted coordinates" `c_j = sqrt(w_j) f_j` the euclidean pairing is
//!   the standard dot product, I is the flip permutation, and the cosine
//!   transform is the symmetric matrix `S_ij = 2 cos(2 pi t_i t_j)
//!   sqrt(w_i w_j)`. All subspace extraction works in these coordinates.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fraction of nodes at each grid end inspected by the tail-mass check.
const TAIL_FRACTION: f64 = 0.05;
/// Relative tail amplitude above which a function is flagged.
const TAIL_RELATIVE: f64 = 1e-6;

/// A log-uniform grid on [e^-L, e^L], closed under t -> 1/t.
#[derive(Debug)]
pub struct LogGrid {
    half_extent: f64,
    delta: f64,
    nodes: Vec<f64>,
    log_nodes: Vec<f64>,
    weights: Vec<f64>,
    cos_kernel: OnceLock<Arc<DMatrix<f64>>>,
    sym_kernel: OnceLock<Arc<DMatrix<f64>>>,
}

/// Build a reciprocal-symmetric log grid with N nodes (N even, N >= 8).
///
/// Nodes are t_j = e^{-L + j delta} with delta = 2L/(N-1); the upper half is
/// defined as exact reciprocals of the lower half. Weights are the trapezoid
/// rule in the log coordinate, `w_j = t_j * delta`, halved at the endpoints.
pub fn make_log_grid(half_extent: f64, point_count: usize) -> Result<Arc<LogGrid>> {
    if !(half_extent > 0.0) || !half_extent.is_finite() {
        return Err(Error::InvalidParameter(format!("half extent L = {half_extent}")));
    }
    if point_count < 8 || point_count % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "point count N = {point_count} (need even N >= 8)"
        )));
    }
    let n = point_count;
    let delta = 2.0 * half_extent / (n as f64 - 1.0);
    let mut nodes = vec![0.0f64; n];
    let mut log_nodes = vec![0.0f64; n];
    for j in 0..n / 2 {
        let x = -half_extent + j as f64 * delta;
        nodes[j] = x.exp();
        nodes[n - 1 - j] = 1.0 / nodes[j];
        log_nodes[j] = x;
        log_nodes[n - 1 - j] = -x;
    }
    let mut weights: Vec<f64> = nodes.iter().map(|t| t * delta).collect();
    weights[0] *= 0.5;
    weights[n - 1] *= 0.5;
    debug_assert!(nodes.windows(2).all(|p| p[0] < p[1]));
    Ok(Arc::new(LogGrid {
        half_extent,
        delta,
        nodes,
        log_nodes,
        weights,
        cos_kernel: OnceLock::new(),
        sym_kernel: OnceLock::new(),
    }))
}

impl LogGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Exact log-positions of the nodes (negated-mirror of the lower half).
    pub fn log_nodes(&self) -> &[f64] {
        &self.log_nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// First index j with t_j >= x (== len() when all nodes are below x).
    pub fn first_index_at_or_above(&self, x: f64) -> usize {
        self.nodes.partition_point(|t| *t < x)
    }

    /// The plain cosine kernel `M_ij = 2 cos(2 pi t_i t_j)` (no weights).
    pub fn cos_kernel(&self) -> Arc<DMatrix<f64>> {
        self.cos_kernel
            .get_or_init(|| {
                let n = self.len();
                let mut m = DMatrix::<f64>::zeros(n, n);
                let nodes = &self.nodes;
                m.as_mut_slice()
                    .par_chunks_mut(n)
                    .enumerate()
                    .for_each(|(col, chunk)| {
                        let tc = nodes[col];
                        for (row, v) in chunk.iter_mut().enumerate() {
                            *v = 2.0 * (2.0 * std::f64::consts::PI * nodes[row] * tc).cos();
                        }
                    });
                Arc::new(m)
            })
            .clone()
    }

    /// The symmetric weighted kernel `S = W^{1/2} M W^{1/2}`, i.e. the cosine
    /// transform expressed in weighted coordinates.
    pub fn sym_kernel(&self) -> Arc<DMatrix<f64>> {
        self.sym_kernel
            .get_or_init(|| {
                let m = self.cos_kernel();
                let n = self.len();
                let sw: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
                let mut s = DMatrix::<f64>::zeros(n, n);
                s.as_mut_slice()
                    .par_chunks_mut(n)
                    .enumerate()
                    .for_each(|(col, chunk)| {
                        for (row, v) in chunk.iter_mut().enumerate() {
                            *v = m[(row, col)] * sw[row] * sw[col];
                        }
                    });
                Arc::new(s)
            })
            .clone()
    }
}

/// A complex-valued function sampled on a [`LogGrid`].
///
/// `tail_flagged` is set by transform operations whose accuracy precondition
/// (decay at both grid ends) was violated; the value is still computed.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<LogGrid>,
    samples: Vec<Complex64>,
    pub tail_flagged: bool,
}

impl GridFunction {
    pub fn new(grid: Arc<LogGrid>, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} samples on a {}-node grid",
                samples.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, samples, tail_flagged: false })
    }

    pub fn zeros(grid: Arc<LogGrid>) -> Self {
        let n = grid.len();
        GridFunction { grid, samples: vec![Complex64::new(0.0, 0.0); n], tail_flagged: false }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Arc<LogGrid>, f: F) -> Self {
        let samples = grid.nodes().iter().map(|t| f(*t)).collect();
        GridFunction { grid, samples, tail_flagged: false }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: Arc<LogGrid>, f: F) -> Self {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.len() == other.grid.len()
                && self.grid.half_extent() == other.grid.half_extent())
    }

    /// Weighted L^2 norm, sqrt(sum |f_j|^2 w_j).
    pub fn norm(&self) -> f64 {
        self.samples
            .iter()
            .zip(self.grid.weights())
            .map(|(s, w)| s.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    /// True when the extreme 5% of nodes at each end carry relative amplitude
    /// above 1e-6 of the peak.
    pub fn touches_boundary(&self) -> bool {
        let n = self.samples.len();
        let k = ((n as f64 * TAIL_FRACTION) as usize).max(1);
        let peak = self.samples.iter().map(|s| s.norm()).fold(0.0f64, f64::max);
        if peak == 0.0 {
            return false;
        }
        let edge = self.samples[..k]
            .iter()
            .chain(self.samples[n - k..].iter())
            .map(|s| s.norm())
            .fold(0.0f64, f64::max);
        edge > TAIL_RELATIVE * peak
    }

    pub fn scaled(&self, factor: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|s| s * factor).collect(),
            tail_flagged: self.tail_flagged,
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            tail_flagged: self.tail_flagged || other.tail_flagged,
        })
    }
}

/// Euclidean bilinear pairing `(f, g] = sum_j f_j g_j w_j` - no conjugation.
pub fn bilinear_pair(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    Ok(f.samples
        .iter()
        .zip(&g.samples)
        .zip(f.grid.weights())
        .map(|((a, b), w)| a * b * w)
        .sum())
}

/// Standard (conjugated) inner product `<f, g> = sum_j f_j conj(g_j) w_j`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    Ok(f.samples
        .iter()
        .zip(&g.samples)
        .zip(f.grid.weights())
        .map(|((a, b), w)| a * b.conj() * w)
        .sum())
}

fn apply_kernel(f: &GridFunction) -> Vec<Complex64> {
    let grid = &f.grid;
    let m = grid.cos_kernel();
    let n = grid.len();
    let wf_re = DVector::from_iterator(
        n,
        f.samples.iter().zip(grid.weights()).map(|(s, w)| s.re * w),
    );
    let wf_im = DVector::from_iterator(
        n,
        f.samples.iter().zip(grid.weights()).map(|(s, w)| s.im * w),
    );
    let out_re = &*m * wf_re;
    let out_im = &*m * wf_im;
    (0..n).map(|i| Complex64::new(out_re[i], out_im[i])).collect()
}

/// Cosine transform `(F+ f)(t_i) = sum_j 2 cos(2 pi t_i u_j) f(u_j) w_j`.
///
/// Functions that do not decay at the grid ends are still transformed, but
/// the result carries `tail_flagged`.
pub fn cosine_transform(f: &GridFunction) -> GridFunction {
    let samples = apply_kernel(f);
    GridFunction {
        grid: f.grid.clone(),
        samples,
        tail_flagged: f.tail_flagged || f.touches_boundary(),
    }
}

/// Inversion `I(f)(t) = (1/t) f(1/t)`: an exact node permutation thanks to
/// the reciprocal symmetry of the grid.
pub fn involution_i(f: &GridFunction) -> GridFunction {
    let n = f.samples.len();
    let nodes = f.grid.nodes();
    let samples = (0..n)
        .map(|j| nodes[n - 1 - j] * f.samples[n - 1 - j])
        .collect();
    GridFunction { grid: f.grid.clone(), samples, tail_flagged: f.tail_flagged }
}

/// The unitary `G = I F+ I`; G^2 = 1 up to discretization error.
pub fn operator_g(f: &GridFunction) -> GridFunction {
    involution_i(&cosine_transform(&involution_i(f)))
}

/// Dilation `D_theta f(t) = (1/sqrt(theta)) f(t/theta)` for grid-compatible
/// theta = e^{m delta}; exposed nodes are zero-filled.
pub fn dilation(f: &GridFunction, theta: f64) -> Result<GridFunction> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::IncompatibleDilation { theta });
    }
    let delta = f.grid.delta();
    let m_real = theta.ln() / delta;
    let m = m_real.round();
    if (m_real - m).abs() > 1e-9 {
        return Err(Error::IncompatibleDilation { theta });
    }
    let m = m as i64;
    let n = f.samples.len() as i64;
    let scale = 1.0 / theta.sqrt();
    let samples = (0..n)
        .map(|j| {
            let src = j - m;
            if src >= 0 && src < n {
                f.samples[src as usize] * scale
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(GridFunction { grid: f.grid.clone(), samples, tail_flagged: f.tail_flagged })
}

/// Discrete Mellin transform `sum_j f_j t_j^{s-1} w_j`.
///
/// Powers use the exact log-positions, so conjugate inputs produce exactly
/// conjugate outputs for real f.
pub fn mellin(f: &GridFunction, s: Complex64) -> Complex64 {
    let e = s - 1.0;
    f.samples
        .iter()
        .zip(f.grid.log_nodes())
        .zip(f.grid.weights())
        .map(|((v, x), w)| v * (e * *x).exp() * *w)
        .sum()
}

/// Mellin transforms of one function at many points (shared sample scan).
pub fn mellin_many(f: &GridFunction, points: &[Complex64]) -> Vec<Complex64> {
    points.iter().map(|s| mellin(f, *s)).collect()
}

/// Serialize as CSV `t,re,im` with a `# L=<val> N=<val>` header line.
pub fn write_grid_function_csv<W: std::io::Write>(f: &GridFunction, out: &mut W) -> Result<()> {
    writeln!(out, "# L={} N={}", f.grid.half_extent(), f.grid.len())?;
    writeln!(out, "t,re,im")?;
    for (t, v) in f.grid.nodes().iter().zip(&f.samples) {
        writeln!(out, "{},{},{}", t, v.re, v.im)?;
    }
    Ok(())
}

/// Read back a CSV produced by [`write_grid_function_csv`].
pub fn read_grid_function_csv<R: std::io::BufRead>(input: R, path: &str) -> Result<GridFunction> {
    let mut half_extent = None;
    let mut count = None;
    let mut samples = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for token in rest.split_whitespace() {
                if let Some(v) = token.strip_prefix("L=") {
                    half_extent = v.parse::<f64>().ok();
                } else if let Some(v) = token.strip_prefix("N=") {
                    count = v.parse::<usize>().ok();
                }
            }
            continue;
        }
        if line.starts_with("t,") {
            continue;
        }
        let mut fields = line.split(',');
        let _t = fields.next();
        let re: f64 = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::MalformedArtifact {
                path: path.into(),
                reason: format!("bad row: {line}"),
            })?;
        let im: f64 = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::MalformedArtifact {
                path: path.into(),
                reason: format!("bad row: {line}"),
            })?;
        samples.push(Complex64::new(re, im));
    }
    let half_extent = half_extent.ok_or_else(|| Error::MalformedArtifact {
        path: path.into(),
        reason: "missing # L=... header".into(),
    })?;
    let count = count.ok_or_else(|| Error::MalformedArtifact {
        path: path.into(),
        reason: "missing N=... header".into(),
    })?;
    if samples.len() != count {
        return Err(Error::MalformedArtifact {
            path: path.into(),
            reason: format!("expected {count} rows, found {}", samples.len()),
        });
    }
    let grid = make_log_grid(half_extent, count)?;
    GridFunction::new(grid, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_grid() -> Arc<LogGrid> {
        make_log_grid(6.0, 1024).unwrap()
    }

    #[test]
    fn grid_ln2_n8_hits_half_and_two() {
        let g = make_log_grid(std::f64::consts::LN_2, 8).unwrap();
        assert_relative_eq!(g.nodes()[0], 0.5, max_relative = 1e-15);
        assert_relative_eq!(g.nodes()[7], 2.0, max_relative = 1e-15);
        assert_eq!(g.nodes()[0] * g.nodes()[7], 1.0);
    }

    #[test]
    fn grid_reciprocal_symmetry_is_exact() {
        let g = default_grid();
        let n = g.len();
        for j in 0..n {
            assert_eq!(g.nodes()[n - 1 - j], 1.0 / g.nodes()[j]);
            assert_eq!(g.log_nodes()[n - 1 - j], -g.log_nodes()[j]);
        }
    }

    #[test]
    fn grid_weight_sum_matches_integral() {
        let g = make_log_grid(3.0, 512).unwrap();
        assert!(g.weights().iter().all(|w| *w > 0.0));
        let total: f64 = g.weights().iter().sum();
        let want = 3.0f64.exp() - (-3.0f64).exp();
        assert_relative_eq!(total, want, max_relative = 1e-3);
    }

    #[test]
    fn grid_rejects_odd_point_count() {
        assert!(matches!(make_log_grid(3.0, 9), Err(Error::InvalidParameter(_))));
        assert!(matches!(make_log_grid(3.0, 4), Err(Error::InvalidParameter(_))));
        assert!(matches!(make_log_grid(-1.0, 64), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn bilinear_pair_of_unit_indicator() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| if t <= 1.0 { 1.0 } else { 0.0 });
        let v = bilinear_pair(&f, &f).unwrap();
        let want = 1.0 - (-6.0f64).exp();
        assert_relative_eq!(v.re, want, max_relative = 1e-2);
    }

    #[test]
    fn bilinear_pair_has_no_conjugation() {
        let g = default_grid();
        let f = GridFunction::from_fn(g.clone(), |t| {
            Complex64::new(0.0, (-(t.ln()).powi(2)).exp())
        });
        let v = bilinear_pair(&f, &f).unwrap();
        assert!(v.re < 0.0, "purely imaginary f must pair to a negative real");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn bilinear_pair_zero() {
        let g = default_grid();
        let f = GridFunction::zeros(g.clone());
        let z = bilinear_pair(&f, &f).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cosine_transform_fixes_gaussian() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| {
            (-std::f64::consts::PI * t * t).exp()
        });
        let tf = cosine_transform(&f);
        for (j, t) in g.nodes().iter().enumerate() {
            if *t < 4.0 {
                assert!(
                    (tf.samples()[j] - f.samples()[j]).norm() < 2e-4,
                    "Gaussian not fixed at t={t}"
                );
            }
        }
    }

    #[test]
    fn cosine_transform_of_indicator_is_sinc() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| if t <= 1.0 { 1.0 } else { 0.0 });
        let tf = cosine_transform(&f);
        for (j, u) in g.nodes().iter().enumerate() {
            if (0.2..4.0).contains(u) {
                let want = (2.0 * std::f64::consts::PI * u).sin() / (std::f64::consts::PI * u);
                assert!(
                    (tf.samples()[j].re - want).abs() < 1e-3,
                    "sinc mismatch at u={u}: {} vs {want}",
                    tf.samples()[j].re
                );
            }
        }
    }

    #[test]
    fn cosine_transform_is_involution_on_log_gaussian() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| (-(t.ln()).powi(2) * 2.0).exp());
        let ff = cosine_transform(&cosine_transform(&f));
        let num = ff
            .samples()
            .iter()
            .zip(f.samples())
            .zip(g.weights())
            .map(|((a, b), w)| (a - b).norm_sqr() * w)
            .sum::<f64>()
            .sqrt();
        assert!(num <= 1e-6 * f.norm(), "relative L2 error {}", num / f.norm());
    }

    #[test]
    fn involution_is_exact() {
        let g = default_grid();
        let f = GridFunction::from_fn(g.clone(), |t| {
            Complex64::new((-(t.ln()).powi(2)).exp(), 0.3 * t.min(2.0))
        });
        let ff = involution_i(&involution_i(&f));
        for (a, b) in ff.samples().iter().zip(f.samples()) {
            assert!((a - b).norm() <= 1e-15 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn involution_fixes_inverse_sqrt() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| t.powf(-0.5));
        let fi = involution_i(&f);
        for (a, b) in fi.samples().iter().zip(f.samples()) {
            assert_relative_eq!(a.re, b.re, max_relative = 1e-13);
        }
    }

    #[test]
    fn involution_preserves_bilinear_pairing() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| (-(t.ln()).powi(2)).exp());
        let h = GridFunction::from_real_fn(g.clone(), |t| (-(t.ln() - 0.4).powi(2) * 1.5).exp());
        let lhs = bilinear_pair(&involution_i(&f), &involution_i(&h)).unwrap();
        let rhs = bilinear_pair(&f, &h).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn g_squared_is_identity_on_middle_bump() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| {
            // smooth bump supported in [1/2, 2]
            let x = t.ln() / std::f64::consts::LN_2; // in [-1, 1] on the support
            if x.abs() < 1.0 {
                (-1.0 / (1.0 - x * x)).exp()
            } else {
                0.0
            }
        });
        let gg = operator_g(&operator_g(&f));
        let err = gg
            .samples()
            .iter()
            .zip(f.samples())
            .zip(g.weights())
            .map(|((a, b), w)| (a - b).norm_sqr() * w)
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-5 * f.norm(), "relative error {}", err / f.norm());
    }

    #[test]
    fn g_unrolls_to_ifi_on_gaussian() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| (-std::f64::consts::PI * t * t).exp());
        let lhs = operator_g(&f);
        let rhs = involution_i(&cosine_transform(&involution_i(&f)));
        for (a, b) in lhs.samples().iter().zip(rhs.samples()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mellin_functional_equation_for_g() {
        // M(G f)(s) = M(f)(1-s) at s = 1/2 + 3i for a middle bump.
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| {
            let x = t.ln() / std::f64::consts::LN_2;
            if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 }
        });
        let s = Complex64::new(0.5, 3.0);
        let lhs = mellin(&operator_g(&f), s);
        let rhs = mellin(&f, Complex64::new(1.0, 0.0) - s);
        assert!((lhs - rhs).norm() <= 1e-4 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn dilation_identity_and_unitarity() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| (-(t.ln()).powi(2)).exp());
        let same = dilation(&f, 1.0).unwrap();
        for (a, b) in same.samples().iter().zip(f.samples()) {
            assert_eq!(a, b);
        }
        let theta = (7.0 * g.delta()).exp();
        let h = GridFunction::from_real_fn(g.clone(), |t| (-(t.ln() + 0.5).powi(2) * 2.0).exp());
        let lhs = bilinear_pair(&dilation(&f, theta).unwrap(), &dilation(&h, theta).unwrap()).unwrap();
        let rhs = bilinear_pair(&f, &h).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn dilation_rejects_incompatible_theta() {
        let g = default_grid();
        let f = GridFunction::zeros(g.clone());
        assert!(matches!(
            dilation(&f, 1.5 * g.delta().exp()),
            Err(Error::IncompatibleDilation { .. })
        ));
    }

    #[test]
    fn mellin_of_unit_indicator() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| if t <= 1.0 { 1.0 } else { 0.0 });
        let v = mellin(&f, Complex64::new(0.5, 0.0));
        assert!((v.re - 2.0).abs() < 2e-2, "got {v}");
    }

    #[test]
    fn mellin_plancherel_identity() {
        // (1.1): f-hat(s) = gamma_plus(s) * (F+ f)-hat(1-s) for a smooth bump.
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| {
            let x = t.ln() / std::f64::consts::LN_2;
            if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 }
        });
        let s = Complex64::new(0.5, 2.0);
        let lhs = mellin(&f, s);
        let rhs = crate::specfun::gamma_plus(s).value
            * mellin(&cosine_transform(&f), Complex64::new(1.0, 0.0) - s);
        assert!((lhs - rhs).norm() <= 1e-4 * lhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn mellin_is_linear() {
        let g = default_grid();
        let f = GridFunction::from_real_fn(g.clone(), |t| (-(t.ln()).powi(2)).exp());
        let h = GridFunction::from_real_fn(g.clone(), |t| (-(t.ln() - 0.3).powi(2) * 3.0).exp());
        let (alpha, beta) = (Complex64::new(1.3, -0.2), Complex64::new(-0.7, 2.1));
        let combo = f.scaled(alpha).add(&h.scaled(beta)).unwrap();
        let s = Complex64::new(0.3, 5.0);
        let lhs = mellin(&combo, s);
        let rhs = alpha * mellin(&f, s) + beta * mellin(&h, s);
        assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm().max(1.0));
    }

    #[test]
    fn csv_round_trip() {
        let g = make_log_grid(2.0, 64).unwrap();
        let f = GridFunction::from_fn(g, |t| Complex64::new(t.sin(), t.cos()));
        let mut buf = Vec::new();
        write_grid_function_csv(&f, &mut buf).unwrap();
        let back = read_grid_function_csv(std::io::BufReader::new(&buf[..]), "mem").unwrap();
        assert_eq!(back.samples().len(), f.samples().len());
        for (a, b) in back.samples().iter().zip(f.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
