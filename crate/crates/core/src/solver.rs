//! Kernels, multiplication matrices, eigenvalue extraction and the solve pipeline.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eigen::{self, EigenError};
use crate::field::{Field, FieldSpec, PrimeField};
use crate::hilbert::{self, RegularityBound};
use crate::khov::{GradedSupport, Parameterization};
use crate::km::{km_matrix, KMMatrix, KmError, StructuredSystem};
use crate::linalg::{self, Matrix};
use crate::par;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Km(#[from] KmError),
    #[error("the Khovanskii property fails in degree {degree}")]
    KhovanskiiFailure { degree: usize },
    #[error("h vanishes on a solution or δ overcounted: no invertible δ×δ restriction after {attempts} attempts")]
    SingularRestriction { attempts: usize },
    #[error("multiplication matrices do not commute: degrees not in Reg(I) or scheme non-reduced")]
    NonCommuting,
    #[error("positive-dimensional or irregular: kernel dimension {delta} exceeds HF({degree}) = {hf}")]
    KernelTooLarge { delta: usize, degree: usize, hf: usize },
    #[error("positive-dimensional or irregular: nullity did not stabilize up to degree {max}")]
    PositiveDimensional { max: usize },
    #[error("no working degree given and the system is not square ({equations} equations, {n} variables)")]
    NeedDegree { equations: usize, n: usize },
    #[error("working degree {0} is too small; it must be at least 1")]
    DegreeTooSmall(usize),
    #[error("eigenvalue extraction is not supported over {0}; use the returned matrices or the brute-force oracle")]
    UnsupportedField(FieldSpec),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("eigenvector matrix is singular")]
    SingularEigenvectors,
    #[error("exhaustive scan too large: p = {p}, n = {n}")]
    ScanTooLarge { p: u64, n: usize },
}

/// Basis of the right kernel of a KM matrix, one row per kernel vector.
#[derive(Debug, Clone)]
pub struct KernelBasis<F: Field> {
    pub degree: usize,
    pub rows: Matrix<F::Elem>,
    pub cols: Arc<GradedSupport>,
}

impl<F: Field> KernelBasis<F> {
    pub fn nullity(&self) -> usize {
        self.rows.len()
    }
}

pub fn kernel_basis<F: Field>(m: &KMMatrix<F>) -> KernelBasis<F> {
    let rows = linalg::nullspace(m.field(), &m.entries, m.ncols());
    KernelBasis { degree: m.degree, rows, cols: m.cols.clone() }
}

/// Commuting matrices `M_j = (N_h|B)⁻¹ (N_{x_j}|B)`.
#[derive(Debug, Clone)]
pub struct MultiplicationSystem<F: Field> {
    pub delta: usize,
    /// Degree of the kernel; `B` lives in degree `degree − shift`.
    pub degree: usize,
    pub shift: usize,
    pub h_coeffs: Vec<F::Elem>,
    /// Indices into `basis_support` of the columns forming `B`.
    pub basis_cols: Vec<usize>,
    pub basis_support: Arc<GradedSupport>,
    pub mats: Vec<Matrix<F::Elem>>,
    pub seed: u64,
    pub field: F,
}

impl<F: Field> MultiplicationSystem<F> {
    pub fn commutes(&self) -> bool {
        let f = &self.field;
        for i in 0..self.mats.len() {
            for j in i + 1..self.mats.len() {
                let ab = linalg::mat_mul(f, &self.mats[i], &self.mats[j]);
                let ba = linalg::mat_mul(f, &self.mats[j], &self.mats[i]);
                if ab != ba {
                    return false;
                }
            }
        }
        true
    }

    /// `Σ c_j M_j`.
    pub fn h_combination(&self) -> Matrix<F::Elem> {
        let f = &self.field;
        let mut acc = vec![vec![f.zero(); self.delta]; self.delta];
        for (c, m) in self.h_coeffs.iter().zip(&self.mats) {
            for (ar, mr) in acc.iter_mut().zip(m) {
                for (a, x) in ar.iter_mut().zip(mr) {
                    f.add_assign(a, &f.mul(c, x));
                }
            }
        }
        acc
    }

    pub fn h_is_identity(&self) -> bool {
        self.h_combination() == linalg::identity(&self.field, self.delta)
    }
}

/// Assemble the multiplication matrices from a kernel at degree `d`, with `B`
/// chosen in degree `d − 1`.
pub fn multiplication_matrices<F: Field>(
    sys: &StructuredSystem<F>,
    kernel: &KernelBasis<F>,
    seed: u64,
) -> Result<MultiplicationSystem<F>, SolveError> {
    let par = sys.par();
    let f = par.field();
    let d = kernel.degree;
    if d == 0 {
        return Err(SolveError::DegreeTooSmall(d));
    }
    let delta = kernel.nullity();
    let prev = par.support(d - 1);
    let prev_basis = par.basis(d - 1);
    let ng = par.num_generators();
    let nprev = prev.len();
    if delta > nprev {
        return Err(SolveError::KernelTooLarge { delta, degree: d - 1, hf: nprev });
    }

    // all randomness first, serially
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = (2 * delta * delta).max(1) as u64;
    let attempts: Vec<Vec<F::Elem>> = (0..5).map(|_| (0..ng).map(|_| f.sample(&mut rng, bound)).collect()).collect();

    // N_{x_j}: column γ is N applied to the expansion of b_{d−1,γ}·φ_j
    let columns = par::map_range(ng * nprev, |idx| {
        let (j, g) = (idx / nprev, idx % nprev);
        let r = par.subduct(&(&prev_basis.elements()[g] * &par.phi()[j]), d);
        r.is_member().then(|| linalg::mat_vec(f, &kernel.rows, &r.coeffs))
    });
    let mut nx: Vec<Matrix<F::Elem>> = vec![vec![Vec::with_capacity(nprev); delta]; ng];
    for (idx, col) in columns.into_iter().enumerate() {
        let col = col.ok_or(SolveError::KhovanskiiFailure { degree: d })?;
        for (row, x) in nx[idx / nprev].iter_mut().zip(col) {
            row.push(x);
        }
    }

    for h in &attempts {
        let mut nh = vec![vec![f.zero(); nprev]; delta];
        for (c, m) in h.iter().zip(&nx) {
            for (ar, mr) in nh.iter_mut().zip(m) {
                for (a, x) in ar.iter_mut().zip(mr) {
                    if !f.is_zero(x) {
                        f.add_assign(a, &f.mul(c, x));
                    }
                }
            }
        }
        let pivots = f.pivot_columns(nh.clone(), nprev);
        if pivots.len() < delta {
            continue;
        }
        let cols = pivots[..delta].to_vec();
        let Some(inv) = linalg::inverse(f, &linalg::select_columns(&nh, &cols)) else {
            continue;
        };
        let mats = par::map_range(ng, |j| linalg::mat_mul(f, &inv, &linalg::select_columns(&nx[j], &cols)));
        let ms = MultiplicationSystem {
            delta,
            degree: d,
            shift: 1,
            h_coeffs: h.clone(),
            basis_cols: cols,
            basis_support: prev.clone(),
            mats,
            seed,
            field: f.clone(),
        };
        assert!(ms.h_is_identity(), "h-combination of multiplication matrices must be the identity");
        if !ms.commutes() {
            return Err(SolveError::NonCommuting);
        }
        return Ok(ms);
    }
    Err(SolveError::SingularRestriction { attempts: attempts.len() })
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractOptions {
    pub offdiag_tol: f64,
    pub cluster_tol: f64,
    pub real_tol: f64,
    pub max_retries: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { offdiag_tol: 1e-6, cluster_tol: 1e-8, real_tol: 1e-6, max_retries: 5 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// Largest entry of any floating-point commutator `M_iM_j − M_jM_i`.
    pub commutator_norm: f64,
    /// Largest relative off-diagonal entry of `V⁻¹ M_j V`.
    pub offdiag: f64,
    /// Smallest distance between eigenvalues of the random combination.
    pub separation: f64,
    pub retries: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SolutionSet {
    /// Row `i` holds `x_j(z_i)/h(z_i)` for `j = 0..=ℓ`.
    pub coords: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub real: Vec<bool>,
    pub diagnostics: Diagnostics,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Rows divided by their first non-negligible coordinate.
    pub fn normalized_first(&self) -> Vec<Vec<Complex64>> {
        self.coords.iter().map(|r| normalize_first(r)).collect()
    }
}

pub fn normalize_first(row: &[Complex64]) -> Vec<Complex64> {
    let big = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match row.iter().find(|z| z.norm() > 1e-10 * big) {
        Some(&p) => row.iter().map(|z| z / p).collect(),
        None => row.to_vec(),
    }
}

fn to_float<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Option<Vec<Vec<f64>>> {
    m.iter().map(|r| r.iter().map(|x| f.to_f64(x)).collect()).collect()
}

/// Joint eigenvectors of the multiplication matrices and the coordinate readout.
pub fn extract_solutions<F: Field>(
    ms: &MultiplicationSystem<F>,
    seed: u64,
    opts: &ExtractOptions,
) -> Result<SolutionSet, SolveError> {
    let f = &ms.field;
    if f.spec() != FieldSpec::Rationals {
        return Err(SolveError::UnsupportedField(f.spec()));
    }
    let delta = ms.delta;
    let mats: Vec<eigen::CMatrix> =
        ms.mats.iter().map(|m| eigen::from_real(&to_float(f, m).expect("rational entries convert"))).collect();
    let mut diag = Diagnostics::default();
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let c = cmat_sub(&eigen::mat_mul(&mats[i], &mats[j]), &eigen::mat_mul(&mats[j], &mats[i]));
            diag.commutator_norm = diag.commutator_norm.max(cmax(&c));
        }
    }
    if delta == 0 {
        return Ok(SolutionSet { diagnostics: diag, ..Default::default() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> =
        (0..=opts.max_retries).map(|_| (0..mats.len()).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let scale = mats.iter().map(cmax).fold(1.0, f64::max);
    let mut best: Option<(f64, eigen::EigenDecomposition)> = None;
    for (attempt, r) in draws.iter().enumerate() {
        let mut t = vec![vec![Complex64::new(0.0, 0.0); delta]; delta];
        for (rj, m) in r.iter().zip(&mats) {
            for (tr, mr) in t.iter_mut().zip(m) {
                for (a, x) in tr.iter_mut().zip(mr) {
                    *a += rj * x;
                }
            }
        }
        let e = eigen::eig(&t)?;
        let sep = min_separation(&e.values);
        diag.retries = attempt;
        let good = sep >= opts.cluster_tol * scale;
        if best.as_ref().is_none_or(|(s, _)| sep > *s) {
            best = Some((sep, e));
        }
        if good {
            break;
        }
    }
    let (sep, e) = best.expect("at least one attempt");
    diag.separation = sep;
    if sep < opts.cluster_tol * scale {
        diag.warnings.push("eigenvalues cluster: possibly non-reduced".into());
    }
    let vinv = eigen::inverse(&e.vectors).ok_or(SolveError::SingularEigenvectors)?;
    let mut coords = vec![vec![Complex64::new(0.0, 0.0); mats.len()]; delta];
    for (j, m) in mats.iter().enumerate() {
        let dm = eigen::mat_mul(&eigen::mat_mul(&vinv, m), &e.vectors);
        let dscale = (0..delta).map(|i| dm[i][i].norm()).fold(1.0, f64::max);
        for i in 0..delta {
            coords[i][j] = dm[i][i];
            for (k, x) in dm[i].iter().enumerate() {
                if k != i {
                    diag.offdiag = diag.offdiag.max(x.norm() / dscale);
                }
            }
        }
    }
    if diag.offdiag > opts.offdiag_tol {
        diag.warnings.push(format!("off-diagonal residue {:.3e} exceeds tolerance", diag.offdiag));
    }
    let real = coords.iter().map(|r| normalize_first(r).iter().all(|z| z.im.abs() < opts.real_tol)).collect();
    Ok(SolutionSet { coords, residuals: Vec::new(), real, diagnostics: diag })
}

fn cmat_sub(a: &eigen::CMatrix, b: &eigen::CMatrix) -> eigen::CMatrix {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
}

fn cmax(a: &eigen::CMatrix) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

fn min_separation(v: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.min((v[i] - v[j]).norm());
        }
    }
    best
}

/// Scaled residuals `max_i |Σ c_α x^α| / (‖c‖₁ · ‖x‖∞^{d_i})` per solution row.
pub fn residuals<F: Field>(sys: &StructuredSystem<F>, coords: &[Vec<Complex64>]) -> Result<Vec<f64>, SolveError> {
    let f = sys.field();
    let mut forms = Vec::new();
    for eq in sys.equations() {
        let terms: Option<Vec<(Vec<u32>, f64)>> =
            eq.coeff_form.terms.iter().map(|(a, c)| f.to_f64(c).map(|x| (a.clone(), x))).collect();
        forms.push((terms.ok_or(SolveError::UnsupportedField(f.spec()))?, eq.degree));
    }
    Ok(coords
        .iter()
        .map(|x| {
            let xn = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            forms
                .iter()
                .map(|(terms, d)| {
                    let mut val = Complex64::new(0.0, 0.0);
                    let mut cn = 0.0;
                    for (alpha, c) in terms {
                        let mut m = Complex64::new(*c, 0.0);
                        for (xj, &e) in x.iter().zip(alpha) {
                            if e > 0 {
                                m *= xj.powu(e);
                            }
                        }
                        val += m;
                        cn += c.abs();
                    }
                    let den = cn * xn.powi(*d as i32);
                    if den == 0.0 {
                        0.0
                    } else {
                        val.norm() / den
                    }
                })
                .fold(0.0, f64::max)
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub dreg: Option<usize>,
    pub seed: u64,
    pub adaptive: bool,
    pub dreg_max: Option<usize>,
    /// Hilbert regularity of the coordinate ring, if known in advance.
    pub hreg: Option<i64>,
    pub reduce: bool,
    pub extract: ExtractOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            dreg: None,
            seed: 1,
            adaptive: false,
            dreg_max: None,
            hreg: None,
            reduce: true,
            extract: ExtractOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DregSource {
    Given,
    /// Regularity bound plus one; `certified` is false when the Hilbert numerator was not certified.
    RegularityBound {
        bound: i64,
        certified: bool,
    },
    /// Heuristic search for two consecutive equal nullities.
    Adaptive,
}

#[derive(Debug, Clone)]
pub struct SolveReport<F: Field> {
    pub dreg: usize,
    pub source: DregSource,
    pub km_shape: (usize, usize),
    pub kernel: KernelBasis<F>,
    pub mult: MultiplicationSystem<F>,
    pub solutions: Option<SolutionSet>,
}

/// Pick the working degree according to the options.
pub fn choose_dreg<F: Field>(
    sys: &StructuredSystem<F>,
    opts: &SolveOptions,
) -> Result<(usize, DregSource), SolveError> {
    if let Some(d) = opts.dreg {
        return Ok((d, DregSource::Given));
    }
    let par = sys.par();
    let degrees = sys.degrees();
    let n = par.n();
    if let RegularityBound::Bound(_) = hilbert::regularity_bound(0, &degrees, n) {
        let (hreg, certified) = match opts.hreg {
            Some(h) => (h, true),
            None => {
                let hd = hilbert::hilbert_numerator(par, 2 * n + 2).expect("range is large enough");
                (hd.hreg, hd.certified)
            }
        };
        if let RegularityBound::Bound(b) = hilbert::regularity_bound(hreg, &degrees, n) {
            let d = (b + 1).max(1) as usize;
            return Ok((d, DregSource::RegularityBound { bound: b, certified }));
        }
    }
    if !opts.adaptive {
        return Err(SolveError::NeedDegree { equations: degrees.len(), n });
    }
    let maxd = degrees.iter().copied().max().unwrap_or(0);
    let cap = opts.dreg_max.unwrap_or(degrees.iter().sum::<usize>() + 10);
    let mut prev = km_matrix(sys, maxd, false)?.nullity();
    for d in maxd + 1..=cap {
        let cur = km_matrix(sys, d, false)?.nullity();
        if cur == prev {
            return Ok((d, DregSource::Adaptive));
        }
        prev = cur;
    }
    Err(SolveError::PositiveDimensional { max: cap })
}

/// KM matrix, kernel and multiplication matrices; works over any field.
pub fn commuting_matrices<F: Field>(
    sys: &StructuredSystem<F>,
    opts: &SolveOptions,
) -> Result<SolveReport<F>, SolveError> {
    let (dreg, source) = choose_dreg(sys, opts)?;
    if dreg == 0 {
        return Err(SolveError::DegreeTooSmall(dreg));
    }
    let km = km_matrix(sys, dreg, opts.reduce)?;
    let km_shape = km.shape();
    let kernel = kernel_basis(&km);
    drop(km);
    let mult = multiplication_matrices(sys, &kernel, opts.seed)?;
    Ok(SolveReport { dreg, source, km_shape, kernel, mult, solutions: None })
}

/// The full pipeline including eigenvalue extraction and residuals (rationals only).
pub fn solve<F: Field>(sys: &StructuredSystem<F>, opts: &SolveOptions) -> Result<SolveReport<F>, SolveError> {
    if sys.field().spec() != FieldSpec::Rationals {
        return Err(SolveError::UnsupportedField(sys.field().spec()));
    }
    let mut report = commuting_matrices(sys, opts)?;
    let mut sols = extract_solutions(&report.mult, opts.seed.wrapping_add(0x9e37_79b9), &opts.extract)?;
    sols.residuals = residuals(sys, &sols.coords)?;
    report.solutions = Some(sols);
    Ok(report)
}

/// `(b_{d,β}(t))_β` for an affine point `t`.
pub fn evaluation_vector<F: Field>(par: &Parameterization<F>, d: usize, t: &[F::Elem]) -> Vec<F::Elem> {
    par.basis(d).elements().iter().map(|b| b.evaluate(t).expect("point length")).collect()
}

/// Affine points of `F_p^n` where every equation vanishes and `φ(t) ≠ 0`.
pub fn brute_force_affine(sys: &StructuredSystem<PrimeField>) -> Result<Vec<Vec<u64>>, SolveError> {
    let par = sys.par();
    let p = par.field().modulus();
    let n = par.n();
    if p > 10_000 || n > 3 {
        return Err(SolveError::ScanTooLarge { p, n });
    }
    let total = (p as usize).pow(n as u32);
    let hits = par::map_range(total, |mut idx| {
        let t: Vec<u64> = (0..n)
            .map(|_| {
                let v = (idx % p as usize) as u64;
                idx /= p as usize;
                v
            })
            .collect();
        let ok = sys.equations().iter().all(|e| e.poly.evaluate(&t).expect("length") == 0)
            && par.phi().iter().any(|ph| ph.evaluate(&t).expect("length") != 0);
        ok.then_some(t)
    });
    Ok(hits.into_iter().flatten().collect())
}
