//! Discretized Sonine subspaces and the evaluation/representer machinery.
//!
//! Frames are stored in weighted coordinates `c_j = sqrt(w_j) f_j`, where the
//! euclidean pairing is the standard dot product, the inversion I is the
//! exact flip permutation, and the cosine transform is the symmetric matrix
//! `S`. A frame is the orthonormal nullspace of the defining constraint map,
//! filtered down to directions the discretization can certify:
//!
//! * constraint: support rows (identity on forbidden nodes) stacked with the
//!   transform rows (S or G = JSJ restricted to forbidden output nodes);
//! * tail filter: directions carrying L^2 mass in the far tail of the grid
//!   (where power weights t^{s-1} would amplify junk) are dropped;
//! * involution filter: directions on which the discrete transform fails to
//!   square to the identity (unresolved oscillation) are dropped.
//!
//! The certified dimension is reported, never asserted: the continuum spaces
//! are infinite-dimensional and the frames keep what the grid resolves.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::dw_derivative;
use crate::specfun::{completed_factor, dist_to_even_nonpositive};
use crate::transforms::{mellin, GridFunction, LogGrid};

/// Which subspace a frame discretizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameKind {
    /// Functions supported in [a, inf) whose cosine transform is supported in
    /// [b, inf).
    KAb { a: f64, b: f64 },
    /// Functions supported in (0, Lambda] whose image under G = I F+ I is
    /// supported in (0, Lambda].
    HLambda { lambda: f64 },
    /// Closure of E(D phi) for smooth phi supported in [1/Lambda, Lambda].
    WLambda { lambda: f64 },
    /// Orthogonal complement of W_Lambda inside H_Lambda.
    HpLambda { lambda: f64 },
}

impl FrameKind {
    pub fn label(&self) -> String {
        match self {
            FrameKind::KAb { a, b } => format!("K_ab(a={a},b={b})"),
            FrameKind::HLambda { lambda } => format!("H_Lambda({lambda})"),
            FrameKind::WLambda { lambda } => format!("W_Lambda({lambda})"),
            FrameKind::HpLambda { lambda } => format!("HP_Lambda({lambda})"),
        }
    }
}

/// Options governing frame extraction.
#[derive(Debug, Clone)]
pub struct SpaceOptions {
    /// Constraint singular values below `nullspace_tol * sigma_max` define
    /// the raw nullspace.
    pub nullspace_tol: f64,
    /// Apply the tail and involution certification filters.
    pub certify: bool,
    /// Nodes beyond e^{+-tail_log} count as far tail.
    pub tail_log: f64,
    /// Largest admissible far-tail singular value of a kept direction.
    pub tail_tol: f64,
    /// Largest admissible `(transform^2 - id)` singular value of a kept
    /// direction.
    pub involution_tol: f64,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions {
            nullspace_tol: 1e-8,
            certify: true,
            tail_log: 3.0,
            tail_tol: 1e-10,
            involution_tol: 2e-6,
        }
    }
}

/// An orthonormal (euclidean pairing) list of real grid functions spanning a
/// discretized subspace, with build provenance.
#[derive(Debug, Clone)]
pub struct SubspaceFrame {
    grid: Arc<LogGrid>,
    /// Basis in weighted coordinates, orthonormal columns.
    basis: DMatrix<f64>,
    pub kind: FrameKind,
    /// Max over kept vectors of the defining-constraint violation.
    pub constraint_residual: f64,
    /// Max over kept vectors of the involution-certification residual.
    pub certification_residual: f64,
    /// Nullspace dimension before certification filters.
    pub raw_dimension: usize,
    /// The nullspace threshold used at build time.
    pub tol: f64,
}

impl SubspaceFrame {
    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    pub(crate) fn basis_matrix(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub(crate) fn from_basis(
        grid: Arc<LogGrid>,
        basis: DMatrix<f64>,
        kind: FrameKind,
        constraint_residual: f64,
        certification_residual: f64,
        raw_dimension: usize,
        tol: f64,
    ) -> Self {
        SubspaceFrame {
            grid,
            basis,
            kind,
            constraint_residual,
            certification_residual,
            raw_dimension,
            tol,
        }
    }

    /// The i-th frame vector as a sample-space grid function.
    pub fn vector(&self, i: usize) -> GridFunction {
        let col = self.basis.column(i);
        let samples = self
            .grid
            .weights()
            .iter()
            .enumerate()
            .map(|(j, w)| Complex64::new(col[j] / w.sqrt(), 0.0))
            .collect();
        GridFunction::new(self.grid.clone(), samples).expect("column length matches grid")
    }

    pub fn vectors(&self) -> Vec<GridFunction> {
        (0..self.dimension()).map(|i| self.vector(i)).collect()
    }

    /// Combine frame vectors with complex coefficients.
    pub fn combine(&self, coefficients: &[Complex64]) -> Result<GridFunction> {
        if coefficients.len() != self.dimension() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a {}-dim frame",
                coefficients.len(),
                self.dimension()
            )));
        }
        let mut samples = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (i, c) in coefficients.iter().enumerate() {
            let col = self.basis.column(i);
            for (j, s) in samples.iter_mut().enumerate() {
                *s += c * col[j];
            }
        }
        for (j, w) in self.grid.weights().iter().enumerate() {
            samples[j] /= w.sqrt();
        }
        GridFunction::new(self.grid.clone(), samples)
    }

    /// Gram matrix deviation from the identity (orthonormality check).
    pub fn gram_defect(&self) -> f64 {
        let g = self.basis.transpose() * &self.basis;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - want).abs());
            }
        }
        worst
    }
}

/// The weighted-coordinate representation of G = I F+ I: flip-conjugated S.
fn g_matrix(grid: &Arc<LogGrid>) -> DMatrix<f64> {
    let s = grid.sym_kernel();
    let n = grid.len();
    DMatrix::from_fn(n, n, |i, j| s[(n - 1 - i, n - 1 - j)])
}

/// Orthonormal nullspace of `mat` (as a map on R^n), keeping right singular
/// directions with sigma < tol * sigma_max. Returns (basis, sigma_max,
/// smallest sigma seen, per-direction sigmas of kept columns).
fn nullspace(mat: &DMatrix<f64>, tol: f64) -> (DMatrix<f64>, f64, f64, Vec<f64>) {
    let n = mat.ncols();
    let m = mat.nrows();
    // Pad with zero rows so the SVD right factor spans all of R^n.
    let work = if m < n {
        let mut padded = DMatrix::<f64>::zeros(n, n);
        padded.view_mut((0, 0), (m, n)).copy_from(mat);
        padded
    } else {
        mat.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cut = tol * sigma_max;
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|i| svd.singular_values[*i] < cut)
        .collect();
    // pathological case: more right-singular directions than rows
    for extra in svd.singular_values.len()..n {
        idx.push(extra);
    }
    idx.sort_by(|a, b| {
        let sa = svd.singular_values.get(*a).copied().unwrap_or(0.0);
        let sb = svd.singular_values.get(*b).copied().unwrap_or(0.0);
        sa.partial_cmp(&sb).unwrap()
    });
    let smallest = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let mut basis = DMatrix::<f64>::zeros(n, idx.len());
    let mut sigmas = Vec::with_capacity(idx.len());
    for (col, i) in idx.iter().enumerate() {
        if *i < v_t.nrows() {
            for j in 0..n {
                basis[(j, col)] = v_t[(*i, j)];
            }
            sigmas.push(svd.singular_values[*i]);
        }
    }
    (basis, sigma_max, smallest, sigmas)
}

/// Within span(basis), keep the directions on which `op` acts with singular
/// value <= cut. Returns the rotated basis and the per-column residuals.
fn filter_by_operator(
    basis: &DMatrix<f64>,
    op_applied: &DMatrix<f64>,
    cut: f64,
) -> (DMatrix<f64>, Vec<f64>) {
    if basis.ncols() == 0 {
        return (basis.clone(), Vec::new());
    }
    let svd = op_applied.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|a, b| {
        svd.singular_values[*a]
            .partial_cmp(&svd.singular_values[*b])
            .unwrap()
    });
    let mut keep: Vec<usize> = order
        .iter()
        .cloned()
        .filter(|i| svd.singular_values[*i] <= cut)
        .collect();
    // directions beyond the operator's row rank are exactly annihilated
    for extra in k..basis.ncols() {
        keep.push(extra);
    }
    let mut rot = DMatrix::<f64>::zeros(basis.ncols(), keep.len());
    let mut residuals = Vec::with_capacity(keep.len());
    for (col, i) in keep.iter().enumerate() {
        if *i < v_t.nrows() {
            for j in 0..basis.ncols() {
                rot[(j, col)] = v_t[(*i, j)];
            }
            residuals.push(svd.singular_values[*i]);
        } else {
            residuals.push(0.0);
        }
    }
    (basis * rot, residuals)
}

struct ConstraintBuild {
    basis: DMatrix<f64>,
    constraint_residual: f64,
    certification_residual: f64,
    raw_dimension: usize,
}

/// Shared constraint-nullspace pipeline for K_ab and H_Lambda.
///
/// `support_forbidden` marks nodes where samples must vanish;
/// `output_forbidden` marks transform output nodes that must vanish;
/// `transform` is S (for K_ab) or JSJ (for H_Lambda), in weighted
/// coordinates. `tail_region` marks nodes whose mass is filtered out by
/// certification.
fn build_constrained_frame(
    grid: &Arc<LogGrid>,
    support_forbidden: &[bool],
    output_forbidden: &[bool],
    transform: &DMatrix<f64>,
    tail_region: &[bool],
    opts: &SpaceOptions,
) -> Result<ConstraintBuild> {
    let n = grid.len();
    let free: Vec<usize> = (0..n).filter(|j| !support_forbidden[*j]).collect();
    let out_rows: Vec<usize> = (0..n).filter(|i| output_forbidden[*i]).collect();
    if free.is_empty() {
        return Err(Error::EmptyFrame { smallest_sv: f64::INFINITY });
    }
    // Constraint restricted to the free coordinates (support rows are exact).
    let mut restricted = DMatrix::<f64>::zeros(out_rows.len(), free.len());
    for (r, i) in out_rows.iter().enumerate() {
        for (c, j) in free.iter().enumerate() {
            restricted[(r, c)] = transform[(*i, *j)];
        }
    }
    let (null_basis, _sigma_max, smallest, sigmas) = nullspace(&restricted, opts.nullspace_tol);
    if null_basis.ncols() == 0 {
        return Err(Error::EmptyFrame { smallest_sv: smallest });
    }
    let raw_dimension = null_basis.ncols();

    // Embed back into R^n.
    let mut basis = DMatrix::<f64>::zeros(n, raw_dimension);
    for (c_idx, _) in sigmas.iter().enumerate() {
        for (r, j) in free.iter().enumerate() {
            basis[(*j, c_idx)] = null_basis[(r, c_idx)];
        }
    }

    let mut certification_residual = 0.0f64;
    if opts.certify {
        // Tail filter: SVD of the tail-restriction of the raw frame.
        let tail_rows: Vec<usize> = (0..n).filter(|j| tail_region[*j]).collect();
        if !tail_rows.is_empty() {
            let mut tail_map = DMatrix::<f64>::zeros(tail_rows.len(), basis.ncols());
            for (r, j) in tail_rows.iter().enumerate() {
                for c in 0..basis.ncols() {
                    tail_map[(r, c)] = basis[(*j, c)];
                }
            }
            let (filtered, _) = filter_by_operator(&basis, &tail_map, opts.tail_tol);
            basis = filtered;
        }
        if basis.ncols() == 0 {
            return Err(Error::EmptyFrame { smallest_sv: smallest });
        }
        // Involution filter: (transform^2 - id) applied to the frame.
        let t_basis = transform * &basis;
        let tt_basis = transform * &t_basis;
        let defect = &tt_basis - &basis;
        let (filtered, residuals) = filter_by_operator(&basis, &defect, opts.involution_tol);
        basis = filtered;
        certification_residual = residuals.iter().cloned().fold(0.0, f64::max);
        if basis.ncols() == 0 {
            return Err(Error::EmptyFrame { smallest_sv: smallest });
        }
    }

    // Re-measure the full constraint on the kept columns.
    let mut constraint_residual = 0.0f64;
    for c in 0..basis.ncols() {
        let col = basis.column(c);
        let mut viol: f64 = 0.0;
        for (j, forbidden) in support_forbidden.iter().enumerate() {
            if *forbidden {
                viol += col[j] * col[j];
            }
        }
        let image = transform * col;
        for i in &out_rows {
            viol += image[*i] * image[*i];
        }
        constraint_residual = constraint_residual.max(viol.sqrt());
    }

    Ok(ConstraintBuild {
        basis,
        constraint_residual,
        certification_residual,
        raw_dimension,
    })
}

/// Discretized Sonine space K_{a,b}: samples vanish below a, transform
/// outputs vanish below b.
pub fn build_k_ab(a: f64, b: f64, grid: &Arc<LogGrid>, tol: f64) -> Result<SubspaceFrame> {
    build_k_ab_with(a, b, grid, &SpaceOptions { nullspace_tol: tol, ..SpaceOptions::default() })
}

pub fn build_k_ab_with(
    a: f64,
    b: f64,
    grid: &Arc<LogGrid>,
    opts: &SpaceOptions,
) -> Result<SubspaceFrame> {
    let lo = grid.nodes()[0];
    let hi = grid.nodes()[grid.len() - 1];
    if !(a > lo && a < hi && b > lo && b < hi) {
        return Err(Error::InvalidParameter(format!(
            "a = {a}, b = {b} must lie strictly inside the grid range [{lo}, {hi}]"
        )));
    }
    let support_forbidden: Vec<bool> = grid.nodes().iter().map(|t| *t < a).collect();
    let output_forbidden: Vec<bool> = grid.nodes().iter().map(|t| *t < b).collect();
    let tail_cut = grid.half_extent().min(opts.tail_log).exp();
    let tail_region: Vec<bool> = grid.nodes().iter().map(|t| *t > tail_cut).collect();
    let s = grid.sym_kernel();
    let built = build_constrained_frame(
        grid,
        &support_forbidden,
        &output_forbidden,
        &s,
        &tail_region,
        opts,
    )?;
    Ok(SubspaceFrame::from_basis(
        grid.clone(),
        built.basis,
        FrameKind::KAb { a, b },
        built.constraint_residual,
        built.certification_residual,
        built.raw_dimension,
        opts.nullspace_tol,
    ))
}

/// Discretized H_Lambda: samples vanish above Lambda and G-images vanish
/// above Lambda. Equals I(K_{1/Lambda,1/Lambda}) exactly on this grid.
pub fn build_h_lambda(lambda: f64, grid: &Arc<LogGrid>, tol: f64) -> Result<SubspaceFrame> {
    build_h_lambda_with(lambda, grid, &SpaceOptions { nullspace_tol: tol, ..SpaceOptions::default() })
}

pub fn build_h_lambda_with(
    lambda: f64,
    grid: &Arc<LogGrid>,
    opts: &SpaceOptions,
) -> Result<SubspaceFrame> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidParameter(format!("Lambda = {lambda} must exceed 1")));
    }
    let hi = grid.nodes()[grid.len() - 1];
    if !(lambda < hi && 1.0 / lambda > grid.nodes()[0]) {
        return Err(Error::InvalidParameter(format!(
            "Lambda = {lambda} and 1/Lambda must lie strictly inside the grid"
        )));
    }
    let support_forbidden: Vec<bool> = grid.nodes().iter().map(|t| *t > lambda).collect();
    let output_forbidden = support_forbidden.clone();
    // H-side far tail sits at small t (the flip of the K-side tail).
    let tail_cut = (-grid.half_extent().min(opts.tail_log)).exp();
    let tail_region: Vec<bool> = grid.nodes().iter().map(|t| *t < tail_cut).collect();
    let g = g_matrix(grid);
    let built = build_constrained_frame(
        grid,
        &support_forbidden,
        &output_forbidden,
        &g,
        &tail_region,
        opts,
    )?;
    Ok(SubspaceFrame::from_basis(
        grid.clone(),
        built.basis,
        FrameKind::HLambda { lambda },
        built.constraint_residual,
        built.certification_residual,
        built.raw_dimension,
        opts.nullspace_tol,
    ))
}

/// Map a frame through the inversion I (exact flip in weighted coordinates).
pub fn frame_through_involution(frame: &SubspaceFrame, kind: FrameKind) -> SubspaceFrame {
    let n = frame.grid.len();
    let mut basis = DMatrix::<f64>::zeros(n, frame.dimension());
    for c in 0..frame.dimension() {
        for j in 0..n {
            basis[(j, c)] = frame.basis[(n - 1 - j, c)];
        }
    }
    SubspaceFrame {
        grid: frame.grid.clone(),
        basis,
        kind,
        constraint_residual: frame.constraint_residual,
        certification_residual: frame.certification_residual,
        raw_dimension: frame.raw_dimension,
        tol: frame.tol,
    }
}

/// Cosines of the principal angles between the spans of two frames.
pub fn principal_angle_cosines(a: &SubspaceFrame, b: &SubspaceFrame) -> Vec<f64> {
    let cross = a.basis.transpose() * &b.basis;
    let svd = cross.svd(false, false);
    let mut out: Vec<f64> = svd.singular_values.iter().cloned().collect();
    out.sort_by(|x, y| y.partial_cmp(x).unwrap());
    out
}

/// Max over a's vectors of the distance to span(b) (containment residual).
pub fn containment_residual(a: &SubspaceFrame, b: &SubspaceFrame) -> f64 {
    let cross = b.basis.transpose() * &a.basis; // coefficients of projections
    let mut worst: f64 = 0.0;
    for c in 0..a.dimension() {
        let col_norm_sq: f64 = a.basis.column(c).norm_squared();
        let proj_sq: f64 = cross.column(c).norm_squared();
        worst = worst.max((col_norm_sq - proj_sq).max(0.0).sqrt());
    }
    worst
}

/// Split an H_Lambda frame into the +1 and -1 eigenframes of the compressed
/// operator P^T G P.
pub fn split_g_eigenspaces(frame: &SubspaceFrame) -> Result<(SubspaceFrame, SubspaceFrame)> {
    let lambda = match frame.kind {
        FrameKind::HLambda { lambda } => lambda,
        _ => {
            return Err(Error::InvalidParameter(
                "G-eigenspace split needs an H_Lambda frame".into(),
            ))
        }
    };
    let g = g_matrix(&frame.grid);
    let compressed = frame.basis.transpose() * (&g * &frame.basis);
    let sym = 0.5 * (&compressed + compressed.transpose());
    let eig = sym.symmetric_eigen();
    let mut plus_cols = Vec::new();
    let mut minus_cols = Vec::new();
    for (i, ev) in eig.eigenvalues.iter().enumerate() {
        if (ev - 1.0).abs() <= 0.1 {
            plus_cols.push(i);
        } else if (ev + 1.0).abs() <= 0.1 {
            minus_cols.push(i);
        } else {
            return Err(Error::EigenvalueDrift { value: *ev, limit: 0.1 });
        }
    }
    let take = |cols: &[usize]| -> DMatrix<f64> {
        let mut rot = DMatrix::<f64>::zeros(frame.dimension(), cols.len());
        for (c, i) in cols.iter().enumerate() {
            for j in 0..frame.dimension() {
                rot[(j, c)] = eig.eigenvectors[(j, *i)];
            }
        }
        &frame.basis * rot
    };
    let mk = |basis: DMatrix<f64>| SubspaceFrame {
        grid: frame.grid.clone(),
        basis,
        kind: FrameKind::HLambda { lambda },
        constraint_residual: frame.constraint_residual,
        certification_residual: frame.certification_residual,
        raw_dimension: frame.raw_dimension,
        tol: frame.tol,
    };
    Ok((mk(take(&plus_cols)), mk(take(&minus_cols))))
}

/// Distance below which evaluation must go through a Cauchy circle rather
/// than the direct product (the completed factor has poles at 0, -2, ...).
const DIRECT_EVAL_MIN_POLE_DIST: f64 = 0.25;

/// The completed Mellin evaluation `M(f)(w) = pi^{-w/2} Gamma(w/2) f-hat(w)`
/// for a single grid function, derivative order k, pole-safe.
pub fn completed_eval(f: &GridFunction, w: Complex64, k: u32) -> Result<Complex64> {
    let dist = dist_to_even_nonpositive(w);
    let near_pole = dist < DIRECT_EVAL_MIN_POLE_DIST;
    if k == 0 && !near_pole {
        // assertion guard: direct products are forbidden near the poles
        assert!(dist >= DIRECT_EVAL_MIN_POLE_DIST);
        return Ok(completed_factor(w, 0)? * mellin(f, w));
    }
    // Cauchy circle around w; at a trivial-zero point the circle average
    // removes the (numerically tiny) pole contribution of the product.
    let radius = if dist < crate::specfun::POLE_EPS {
        0.25
    } else {
        0.25f64.min(dist / 2.0)
    };
    if radius < 1e-3 {
        return Err(Error::RadiusCollision { center: w, radius });
    }
    dw_derivative(|z| Ok(completed_factor(z, 0)? * mellin(f, z)), w, k, radius)
}

/// Evaluation row: `M(f_i)^{(k)}(w)` across the frame vectors.
pub fn evaluation_row(frame: &SubspaceFrame, w: Complex64, k: u32) -> Result<Vec<Complex64>> {
    let dist = dist_to_even_nonpositive(w);
    let near_pole = dist < DIRECT_EVAL_MIN_POLE_DIST;
    if k == 0 && !near_pole {
        // Shared power vector across all frame vectors.
        let factor = completed_factor(w, 0)?;
        let mut out = Vec::with_capacity(frame.dimension());
        for i in 0..frame.dimension() {
            out.push(factor * mellin(&frame.vector(i), w));
        }
        return Ok(out);
    }
    (0..frame.dimension())
        .map(|i| completed_eval(&frame.vector(i), w, k))
        .collect()
}

/// The Riesz representer of `f -> M(f)^{(k)}(w)` on a frame.
#[derive(Debug, Clone)]
pub struct RepresenterVector {
    pub w: Complex64,
    pub k: u32,
    pub lambda: f64,
    pub coefficients: Vec<Complex64>,
    pub as_grid: GridFunction,
}

impl RepresenterVector {
    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Unique representer `Z^Lambda_{w,k}`: with real orthonormal frame vectors
/// and the bilinear pairing, its coefficients are exactly the evaluation row.
pub fn riesz_z(frame: &SubspaceFrame, w: Complex64, k: u32) -> Result<RepresenterVector> {
    let lambda = match frame.kind {
        FrameKind::HLambda { lambda } | FrameKind::WLambda { lambda } => lambda,
        _ => 0.0,
    };
    let coefficients = evaluation_row(frame, w, k)?;
    let as_grid = frame.combine(&coefficients)?;
    Ok(RepresenterVector { w, k, lambda, coefficients, as_grid })
}

/// Smallest singular value of the column-normalized representer coefficient
/// matrix; strictly positive certifies desk-scale linear independence.
pub fn independence_gram(
    frame: &SubspaceFrame,
    specs: &[(Complex64, u32)],
) -> Result<f64> {
    if specs.is_empty() || specs.len() > frame.dimension() {
        return Err(Error::Dimension(format!(
            "{} specs on a {}-dim frame",
            specs.len(),
            frame.dimension()
        )));
    }
    let mut cols = DMatrix::<Complex64>::zeros(frame.dimension(), specs.len());
    for (c, (w, k)) in specs.iter().enumerate() {
        let row = evaluation_row(frame, *w, *k)?;
        let norm = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::DegenerateRepresenter { norm });
        }
        for (r, v) in row.iter().enumerate() {
            cols[(r, c)] = v / norm;
        }
    }
    let svd = cols.svd(false, false);
    Ok(svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

/// Report of the forced common zeros of Mellin transforms on a K_ab frame.
#[derive(Debug, Clone)]
pub struct TrivialZeroReport {
    /// r_j = max_i |f_i-hat(1 + 2j)|, frame vectors being unit norm.
    pub residuals: Vec<f64>,
    /// Control values at the midpoints s = 2 + 2j (expected not small).
    pub controls: Vec<f64>,
}

/// Scan the trivial zeros s = 1, 3, ..., 1 + 2 j_max on a K_ab frame.
pub fn trivial_zero_scan(frame: &SubspaceFrame, j_max: u32) -> Result<TrivialZeroReport> {
    if !matches!(frame.kind, FrameKind::KAb { .. }) {
        return Err(Error::InvalidParameter(
            "trivial-zero scan needs a K_ab frame".into(),
        ));
    }
    let vectors = frame.vectors();
    let mut residuals = Vec::new();
    let mut controls = Vec::new();
    for j in 0..=j_max {
        let s_zero = Complex64::new(1.0 + 2.0 * j as f64, 0.0);
        let s_ctrl = Complex64::new(2.0 + 2.0 * j as f64, 0.0);
        let mut r: f64 = 0.0;
        let mut c: f64 = 0.0;
        for v in &vectors {
            r = r.max(mellin(v, s_zero).norm());
            c = c.max(mellin(v, s_ctrl).norm());
        }
        residuals.push(r);
        controls.push(c);
    }
    Ok(TrivialZeroReport { residuals, controls })
}

/// Euclidean norms of the evaluation rows `(f_i-hat(s))_i` at each point;
/// zero only at the trivial points.
pub fn common_zero_scan(frame: &SubspaceFrame, points: &[Complex64]) -> Result<Vec<f64>> {
    if !matches!(frame.kind, FrameKind::KAb { .. }) {
        return Err(Error::InvalidParameter(
            "common-zero scan needs a K_ab frame".into(),
        ));
    }
    let vectors = frame.vectors();
    Ok(points
        .iter()
        .map(|s| {
            vectors
                .iter()
                .map(|v| mellin(v, *s).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// Orthonormalize a family of real grid functions into a frame, truncating
/// at tol * sigma_max.
pub fn orthonormal_frame_from_functions(
    grid: &Arc<LogGrid>,
    functions: &[GridFunction],
    kind: FrameKind,
    tol: f64,
) -> Result<SubspaceFrame> {
    if functions.is_empty() {
        return Err(Error::Dimension("empty function family".into()));
    }
    let n = grid.len();
    let mut mat = DMatrix::<f64>::zeros(n, functions.len());
    for (c, f) in functions.iter().enumerate() {
        for (j, (s, w)) in f.samples().iter().zip(grid.weights()).enumerate() {
            mat[(j, c)] = s.re * w.sqrt();
        }
    }
    let svd = mat.svd(true, false);
    let u = svd.u.expect("requested U");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if sigma_max == 0.0 {
        return Err(Error::EmptyFrame { smallest_sv: 0.0 });
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|i| svd.singular_values[*i] > tol * sigma_max)
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyFrame { smallest_sv: 0.0 });
    }
    let mut basis = DMatrix::<f64>::zeros(n, keep.len());
    for (c, i) in keep.iter().enumerate() {
        for j in 0..n {
            basis[(j, c)] = u[(j, *i)];
        }
    }
    Ok(SubspaceFrame::from_basis(
        grid.clone(),
        basis,
        kind,
        0.0,
        0.0,
        functions.len(),
        tol,
    ))
}

/// Standard-inner-product projection coefficients of a complex grid function
/// onto a real frame: `<f, frame_i>`.
pub fn project_coefficients(frame: &SubspaceFrame, f: &GridFunction) -> Vec<Complex64> {
    let sw: Vec<f64> = frame.grid.weights().iter().map(|w| w.sqrt()).collect();
    let c: Vec<Complex64> = f
        .samples()
        .iter()
        .zip(&sw)
        .map(|(s, w)| s * *w)
        .collect();
    (0..frame.dimension())
        .map(|i| {
            let col = frame.basis.column(i);
            c.iter()
                .enumerate()
                .map(|(j, v)| v * col[j])
                .sum()
        })
        .collect()
}
