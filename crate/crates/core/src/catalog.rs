//! Generators for the standard example families: Duffing oscillators, the
//! quintic del Pezzo surface, a Bott–Samelson threefold, Plücker charts of
//! Grassmannians, Schubert problems and osculating flags.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Field, Rationals};
use crate::khov::{KhovError, Parameterization};
use crate::km::{CoefficientForm, EquationSpec, KmError, StructuredSystem};
use crate::linalg::{self, Matrix};
use crate::par;
use crate::poly::{Exponents, MultiPoly, PolyError, WeightOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("invalid Grassmannian Gr({k},{m})")]
    InvalidGrassmannian { k: usize, m: usize },
    #[error("Schubert condition {0:?} must be a strictly increasing k-tuple in 1..=m")]
    BadCondition(Vec<usize>),
    #[error("conditions impose codimension {got}, expected {n}")]
    DimensionMismatch { got: usize, n: usize },
    #[error("flag matrix {0} is singular")]
    SingularFlag(usize),
    #[error("flag {0} has the wrong shape")]
    FlagShape(usize),
    #[error("the chart parameterization fails the Khovanskii check in degree {0}")]
    KhovanskiiValidation(usize),
    #[error("unknown catalog entry '{0}'")]
    UnknownName(String),
    #[error(transparent)]
    Khov(#[from] KhovError),
    #[error(transparent)]
    Km(#[from] KmError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A ready-to-solve system with the metadata known for it.
#[derive(Debug, Clone)]
pub struct ProblemInstance<F: Field> {
    pub name: String,
    pub sys: StructuredSystem<F>,
    pub expected_count: Option<usize>,
    pub recommended_dreg: Option<usize>,
    /// Hilbert regularity of the coordinate ring when known in closed form.
    pub hreg: Option<i64>,
    pub note: String,
}

fn parse_all<F: Field>(field: &F, vars: &Arc<[String]>, phi: &[&str]) -> Vec<MultiPoly<F>> {
    phi.iter().map(|s| MultiPoly::parse(field.clone(), vars.clone(), s).expect("catalog polynomial")).collect()
}

fn unit(len: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    v[i] = 1;
    v
}

fn linear_form<F: Field>(field: &F, coeffs: &[F::Elem]) -> CoefficientForm<F> {
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !field.is_zero(c))
        .map(|(i, c)| (unit(coeffs.len(), i), c.clone()))
        .collect();
    CoefficientForm { terms }
}

// ---------------------------------------------------------------------------

pub fn duffing_parameterization<F: Field>(field: F) -> Parameterization<F> {
    let vars = MultiPoly::<F>::ring_vars(2);
    let phi = parse_all(&field, &vars, &["1", "t1", "t2", "t1*(t1^2+t2^2)", "t2*(t1^2+t2^2)"]);
    Parameterization::new(phi, WeightOrder::new(vec![0, -1])).expect("valid parameterization")
}

/// `f_1 = c10 + c11 t1 + c12 t2 + c13 φ3`, `f_2 = c20 + c21 t1 + c22 t2 + c23 φ4`.
pub fn duffing<F: Field>(field: F, coeffs: [[F::Elem; 4]; 2]) -> ProblemInstance<F> {
    let par = Arc::new(duffing_parameterization(field.clone()));
    let z = field.zero();
    let [a, b] = coeffs;
    let forms = [
        [a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), z.clone()],
        [b[0].clone(), b[1].clone(), b[2].clone(), z, b[3].clone()],
    ];
    let degenerate = forms.iter().any(|f| f.iter().all(|c| field.is_zero(c)));
    let eqs = forms.iter().map(|f| EquationSpec::from_form(linear_form(&field, f), 1)).collect();
    let sys = StructuredSystem::new(par, eqs).expect("linear forms are members");
    ProblemInstance {
        name: "duffing".into(),
        sys,
        expected_count: (!degenerate).then_some(5),
        recommended_dreg: Some(3),
        hreg: Some(0),
        note: if degenerate { "degenerate: an equation is identically zero".into() } else { String::new() },
    }
}

pub fn duffing_default<F: Field>(field: F) -> ProblemInstance<F> {
    let c = |v: i64| field.from_i64(v);
    let coeffs = [[c(1), c(3), c(5), c(7)], [c(11), c(13), c(17), c(19)]];
    duffing(field.clone(), coeffs)
}

pub fn duffing_random<F: Field>(field: F, seed: u64) -> ProblemInstance<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || field.sample(&mut rng, 100);
    let coeffs = [[draw(), draw(), draw(), draw()], [draw(), draw(), draw(), draw()]];
    duffing(field.clone(), coeffs)
}

// ---------------------------------------------------------------------------

pub fn del_pezzo<F: Field>(field: F) -> Parameterization<F> {
    let vars = MultiPoly::<F>::ring_vars(2);
    let phi = parse_all(&field, &vars, &["t1-t2", "t2^2-t2", "t1*t2-t2", "t1^2-t2", "t1*t2^2-t2", "t1^2*t2-t2"]);
    Parameterization::new(phi, WeightOrder::new(vec![-2, -1])).expect("valid parameterization")
}

/// All multi-indices of length `len` summing to `d`, lexicographically decreasing.
pub fn multi_indices(len: usize, d: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in multi_indices(len - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Dense random equations with full coefficient forms of the given degrees.
pub fn random_dense_system<F: Field>(
    par: Arc<Parameterization<F>>,
    degrees: &[usize],
    seed: u64,
) -> Result<StructuredSystem<F>, CatalogError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = par.field().clone();
    let specs = degrees
        .iter()
        .map(|&d| {
            let terms = multi_indices(par.num_generators(), d as u32)
                .into_iter()
                .map(|a| (a, field.sample(&mut rng, 100)))
                .collect();
            EquationSpec::from_form(CoefficientForm { terms }, d)
        })
        .collect();
    Ok(StructuredSystem::new(par, specs)?)
}

pub fn del_pezzo_instance<F: Field>(field: F, d: usize, seed: u64) -> ProblemInstance<F> {
    let par = Arc::new(del_pezzo(field));
    let sys = random_dense_system(par, &[d, d], seed).expect("dense forms are members");
    ProblemInstance {
        name: format!("delpezzo:{d}"),
        sys,
        expected_count: Some(5 * d * d),
        recommended_dreg: Some(2 * d + 1),
        hreg: Some(0),
        note: String::new(),
    }
}

// ---------------------------------------------------------------------------

pub fn bott_samelson_parameterization<F: Field>(field: F) -> Parameterization<F> {
    let vars = MultiPoly::<F>::ring_vars(3);
    let phi = parse_all(&field, &vars, &["1", "t1", "t2", "t3", "t1*t3", "t2*t3", "t1*(t1*t3+t2)", "t2*(t1*t3+t2)"]);
    Parameterization::new(phi, WeightOrder::new(vec![0, -1, 0])).expect("valid parameterization")
}

pub fn bott_samelson<F: Field>(field: F) -> ProblemInstance<F> {
    let par = Arc::new(bott_samelson_parameterization(field.clone()));
    let rows: [[i64; 8]; 3] = [[1, 1, 1, 1, 1, 1, 1, 1], [1, -2, 3, -4, 5, -6, 7, -8], [2, 3, 5, 7, 11, 13, 17, 19]];
    let eqs = rows
        .iter()
        .map(|r| {
            let c: Vec<F::Elem> = r.iter().map(|&x| field.from_i64(x)).collect();
            EquationSpec::from_form(linear_form(&field, &c), 1)
        })
        .collect();
    ProblemInstance {
        name: "bottsamelson".into(),
        sys: StructuredSystem::new(par, eqs).expect("linear forms are members"),
        expected_count: Some(6),
        recommended_dreg: Some(3),
        hreg: Some(-1),
        note: String::new(),
    }
}

// ---------------------------------------------------------------------------

/// Determinants of all `size×size` submatrices using rows `rows` (in order)
/// and every column subset, by Laplace expansion along the last row with
/// memoization on column masks. Keys are column bitmasks.
fn minors_of_rows<F: Field>(mat: &[Vec<MultiPoly<F>>], rows: &[usize], ncols: usize) -> HashMap<u64, MultiPoly<F>> {
    let mut level: HashMap<u64, MultiPoly<F>> = HashMap::new();
    for (c, entry) in mat[rows[0]].iter().enumerate().take(ncols) {
        level.insert(1 << c, entry.clone());
    }
    for (r, &row) in rows.iter().enumerate().skip(1) {
        let masks: Vec<u64> = (0u64..1 << ncols).filter(|m| m.count_ones() as usize == r + 1).collect();
        let prev = &level;
        let next: Vec<(u64, MultiPoly<F>)> = par::map_range(masks.len(), |idx| {
            let mask = masks[idx];
            let cols: Vec<usize> = (0..ncols).filter(|c| mask >> c & 1 == 1).collect();
            let mut acc = MultiPoly::zero(mat[row][0].field().clone(), mat[row][0].vars().clone());
            for (j, &c) in cols.iter().enumerate() {
                let entry = &mat[row][c];
                if entry.is_zero() {
                    continue;
                }
                let sub = &prev[&(mask & !(1 << c))];
                if sub.is_zero() {
                    continue;
                }
                let term = entry * sub;
                acc = if (r + j) % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            (mask, acc)
        });
        level = next.into_iter().collect();
    }
    level
}

/// All `s×s` minors of `mat` (rows × ncols), row subsets outer, column subsets inner,
/// both in lexicographic order.
pub fn all_minors<F: Field>(mat: &[Vec<MultiPoly<F>>], ncols: usize, s: usize) -> Vec<MultiPoly<F>> {
    let mut out = Vec::new();
    for rows in subsets(mat.len(), s) {
        let dets = minors_of_rows(mat, &rows, ncols);
        for cols in subsets(ncols, s) {
            let mask = cols.iter().fold(0u64, |m, &c| m | 1 << c);
            out.push(dets[&mask].clone());
        }
    }
    out
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The chart matrix `H = [I_k | T]` with `T` filled row-major by `t1..tn`.
pub fn chart_matrix<F: Field>(field: &F, k: usize, m: usize) -> Vec<Vec<MultiPoly<F>>> {
    let vars = MultiPoly::<F>::ring_vars(k * (m - k));
    (0..k)
        .map(|a| {
            (0..m)
                .map(|c| {
                    if c < k {
                        let v = if c == a { field.one() } else { field.zero() };
                        MultiPoly::constant(field.clone(), vars.clone(), v)
                    } else {
                        MultiPoly::var(field.clone(), vars.clone(), a * (m - k) + (c - k))
                    }
                })
                .collect()
        })
        .collect()
}

/// Weight `−3^a·b` on `t_{a,b}` (1-based), selecting the diagonal term of each minor.
pub fn chart_weight(k: usize, m: usize) -> WeightOrder {
    let mut w = Vec::with_capacity(k * (m - k));
    for a in 1..=k {
        for b in 1..=(m - k) {
            w.push(-(3i64.pow(a as u32) * b as i64));
        }
    }
    WeightOrder::new(w)
}

/// Plücker coordinates of the chart: all `k×k` minors of `H` in lexicographic
/// column-set order, so `φ_0 = 1`.
pub fn pluecker_chart<F: Field>(field: F, k: usize, m: usize) -> Result<Parameterization<F>, CatalogError> {
    if k == 0 || k >= m || m > 63 {
        return Err(CatalogError::InvalidGrassmannian { k, m });
    }
    let h = chart_matrix(&field, k, m);
    let phi = all_minors(&h, m, k);
    Ok(Parameterization::new(phi, chart_weight(k, m))?)
}

/// Run the truncated Khovanskii check on a chart up to `degree`.
pub fn validate_chart<F: Field>(par: &Parameterization<F>, degree: usize) -> Result<(), CatalogError> {
    match par.check_khovanskii_truncated(degree).first_failure() {
        Some(d) => Err(CatalogError::KhovanskiiValidation(d)),
        None => Ok(()),
    }
}

pub fn grassmannian_instance<F: Field>(field: F, k: usize, m: usize) -> Result<ProblemInstance<F>, CatalogError> {
    let par = Arc::new(pluecker_chart(field, k, m)?);
    Ok(ProblemInstance {
        name: format!("grassmannian:{k},{m}"),
        sys: StructuredSystem::new(par, Vec::new())?,
        expected_count: None,
        recommended_dreg: None,
        hreg: Some(1 - m as i64),
        note: "no equations; for Hilbert function queries".into(),
    })
}

// ---------------------------------------------------------------------------

/// A Schubert condition: the k-tuple `alpha` (1-based) and a flag whose first `α_i`
/// rows span `F_{α_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchubertCondition<F: Field> {
    pub alpha: Vec<usize>,
    pub flag: Matrix<F::Elem>,
}

/// `D(α) = Σ (α_i − i)`.
pub fn schubert_dimension(alpha: &[usize]) -> usize {
    alpha.iter().enumerate().map(|(i, &a)| a - (i + 1)).sum()
}

fn check_alpha(alpha: &[usize], k: usize, m: usize) -> Result<(), CatalogError> {
    let ok = alpha.len() == k && alpha.windows(2).all(|w| w[0] < w[1]) && alpha.iter().all(|&a| (1..=m).contains(&a));
    if ok {
        Ok(())
    } else {
        Err(CatalogError::BadCondition(alpha.to_vec()))
    }
}

/// Seeded random integer flag in `{−10..10}^{m×m}`, resampled until invertible.
pub fn random_flag<F: Field, R: Rng>(field: &F, m: usize, rng: &mut R) -> Matrix<F::Elem> {
    loop {
        let ints: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| rng.random_range(-10..=10)).collect()).collect();
        let q: Matrix<_> = ints.iter().map(|r| r.iter().map(|&x| Rationals.from_i64(x)).collect()).collect();
        if linalg::rank(&Rationals, &q, m) == m {
            let f: Matrix<F::Elem> = ints.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
            if linalg::rank(field, &f, m) == m {
                return f;
            }
        }
    }
}

/// Rows `r = 0..m−1` hold the `r`-th derivative of `(1, s, …, s^{m−1})`.
pub fn osculating_flag<F: Field>(field: &F, s: &F::Elem, m: usize) -> Matrix<F::Elem> {
    (0..m)
        .map(|r| {
            (0..m)
                .map(|e| {
                    if e < r {
                        return field.zero();
                    }
                    let falling: i64 = ((e - r + 1)..=e).map(|x| x as i64).product();
                    field.mul(&field.from_i64(falling), &field.pow(s, (e - r) as u64))
                })
                .collect()
        })
        .collect()
}

/// Raw minors cutting out one Schubert condition on the chart of `Gr(k, m)`.
pub fn schubert_minors<F: Field>(
    par: &Parameterization<F>,
    k: usize,
    m: usize,
    cond: &SchubertCondition<F>,
) -> Vec<MultiPoly<F>> {
    let field = par.field();
    let h = chart_matrix(field, k, m);
    let mut out = Vec::new();
    for (i, &a) in cond.alpha.iter().enumerate() {
        let size = k + a - (i + 1) + 1;
        if size > (k + a).min(m) {
            continue;
        }
        let mut stacked = h.clone();
        for row in cond.flag.iter().take(a) {
            stacked
                .push(row.iter().map(|x| MultiPoly::constant(field.clone(), par.vars().clone(), x.clone())).collect());
        }
        out.extend(all_minors(&stacked, m, size));
    }
    out
}

/// Counts and working degrees known for Schubert problems on `Gr(3,6)` and `Gr(2,5)`.
fn schubert_metadata(k: usize, m: usize, alphas: &[Vec<usize>]) -> (Option<usize>, Option<usize>) {
    let count = |a: &[usize]| alphas.iter().filter(|x| x.as_slice() == a).count();
    match (k, m) {
        (3, 6) => match (count(&[2, 4, 6]), count(&[3, 5, 6]), count(&[2, 5, 6]), alphas.len()) {
            (3, 0, 0, 3) => (Some(2), Some(2)),
            (0, 9, 0, 9) => (Some(42), Some(5)),
            (0, 7, 1, 8) => (Some(21), Some(4)),
            (0, 5, 2, 7) => (Some(11), Some(3)),
            (0, 3, 3, 6) => (Some(6), Some(3)),
            (0, 1, 4, 5) => (Some(3), Some(2)),
            _ => (None, None),
        },
        (2, 5) if count(&[3, 5]) == 6 && alphas.len() == 6 => (Some(5), Some(3)),
        _ => (None, None),
    }
}

/// Schubert problem: raw minors from every condition, expressed in degree 1 of
/// the Plücker algebra, then dependent equations removed in order.
#[derive(Debug, Clone)]
pub struct SchubertInstance<F: Field> {
    pub instance: ProblemInstance<F>,
    pub raw_equations: usize,
    pub conditions: Vec<SchubertCondition<F>>,
}

pub fn schubert_equations<F: Field>(
    field: F,
    k: usize,
    m: usize,
    conditions: Vec<SchubertCondition<F>>,
) -> Result<SchubertInstance<F>, CatalogError> {
    let par = Arc::new(pluecker_chart(field.clone(), k, m)?);
    let n = par.n();
    let mut codim = 0usize;
    for (idx, c) in conditions.iter().enumerate() {
        check_alpha(&c.alpha, k, m)?;
        if c.flag.len() != m || c.flag.iter().any(|r| r.len() != m) {
            return Err(CatalogError::FlagShape(idx));
        }
        if linalg::rank(&field, &c.flag, m) < m {
            return Err(CatalogError::SingularFlag(idx));
        }
        codim += n.saturating_sub(schubert_dimension(&c.alpha));
    }
    if codim != n {
        return Err(CatalogError::DimensionMismatch { got: codim, n });
    }
    let raw: Vec<MultiPoly<F>> = conditions.iter().flat_map(|c| schubert_minors(&par, k, m, c)).collect();
    let raw_equations = raw.len();
    let specs = raw.into_iter().map(|p| EquationSpec::from_poly(p, 1)).collect();
    let sys = StructuredSystem::new(par, specs)?.filter_independent();
    let alphas: Vec<Vec<usize>> = conditions.iter().map(|c| c.alpha.clone()).collect();
    let (expected_count, recommended_dreg) = schubert_metadata(k, m, &alphas);
    let instance = ProblemInstance {
        name: format!("schubert:{k},{m}"),
        sys,
        expected_count,
        recommended_dreg,
        hreg: Some(1 - m as i64),
        note: String::new(),
    };
    Ok(SchubertInstance { instance, raw_equations, conditions })
}

/// Schubert problem with seeded random flags.
pub fn schubert_random<F: Field>(
    field: F,
    k: usize,
    m: usize,
    alphas: &[Vec<usize>],
    seed: u64,
) -> Result<SchubertInstance<F>, CatalogError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conditions =
        alphas.iter().map(|a| SchubertCondition { alpha: a.clone(), flag: random_flag(&field, m, &mut rng) }).collect();
    schubert_equations(field, k, m, conditions)
}

/// Schubert problem with osculating flags at the given points.
pub fn schubert_osculating<F: Field>(
    field: F,
    k: usize,
    m: usize,
    alphas: &[Vec<usize>],
    points: &[F::Elem],
) -> Result<SchubertInstance<F>, CatalogError> {
    let conditions = alphas
        .iter()
        .zip(points)
        .map(|(a, s)| SchubertCondition { alpha: a.clone(), flag: osculating_flag(&field, s, m) })
        .collect();
    schubert_equations(field, k, m, conditions)
}

/// `Gr(2,5)` with condition `(3,5)` osculating at `s = ±1, ±2, ±3`.
pub fn osculating_default<F: Field>(field: F) -> Result<SchubertInstance<F>, CatalogError> {
    let points: Vec<F::Elem> = [-3, -2, -1, 1, 2, 3].iter().map(|&s| field.from_i64(s)).collect();
    let alphas = vec![vec![3, 5]; 6];
    let mut out = schubert_osculating(field, 2, 5, &alphas, &points)?;
    out.instance.name = "osculating".into();
    Ok(out)
}

/// `(2,4,6)` three times on `Gr(3,6)` with random flags.
pub fn schubert_default<F: Field>(field: F, seed: u64) -> Result<SchubertInstance<F>, CatalogError> {
    schubert_random(field, 3, 6, &vec![vec![2, 4, 6]; 3], seed)
}

/// Recover the chart matrix `H = [I | T]` from homogeneous Plücker coordinates.
/// The entry `t_{a,b}` is `±p_S/p_{[k]}` where `φ_j = ±t_{a,b}` is the minor
/// replacing identity column `a` by column `k+b`.
pub fn chart_from_pluecker<F: Field>(
    par: &Parameterization<F>,
    k: usize,
    m: usize,
    coords: &[Complex64],
) -> Option<Vec<Vec<Complex64>>> {
    let n = k * (m - k);
    let mut t = vec![Complex64::new(0.0, 0.0); n];
    for (v, slot) in t.iter_mut().enumerate() {
        let target = Exponents::unit(n, v);
        let (j, sign) = par.phi().iter().enumerate().find_map(|(j, p)| {
            if p.len() != 1 {
                return None;
            }
            let (e, c) = p.terms().next()?;
            (*e == target).then(|| (j, par.field().to_f64(c)))
        })?;
        *slot = coords[j] / coords[0] * sign?;
    }
    Some(
        (0..k)
            .map(|a| {
                (0..m)
                    .map(|c| {
                        if c < k {
                            Complex64::new(if c == a { 1.0 } else { 0.0 }, 0.0)
                        } else {
                            t[a * (m - k) + c - k]
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Parse a condition list such as `"2,4,6;2,4,6;2,4,6"`.
pub fn parse_conditions(text: &str) -> Option<Vec<Vec<usize>>> {
    text.split(';').map(|c| c.split(',').map(|x| x.trim().parse().ok()).collect::<Option<Vec<usize>>>()).collect()
}

/// Look up a catalog entry by name: `duffing`, `delpezzo[:d]`, `bottsamelson`,
/// `grassmannian:k,m`, `schubert`, `osculating`.
pub fn by_name<F: Field>(field: F, name: &str, seed: u64) -> Result<ProblemInstance<F>, CatalogError> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let unknown = || CatalogError::UnknownName(name.to_string());
    match (head, arg) {
        ("duffing", None) => Ok(duffing_default(field)),
        ("delpezzo", a) => {
            let d = a.map_or(Some(1), |s| s.parse().ok()).filter(|&d| d >= 1).ok_or_else(unknown)?;
            Ok(del_pezzo_instance(field, d, seed))
        }
        ("bottsamelson", None) => Ok(bott_samelson(field)),
        ("grassmannian", Some(a)) => {
            let v: Vec<usize> =
                a.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>().ok_or_else(unknown)?;
            match v[..] {
                [k, m] => grassmannian_instance(field, k, m),
                _ => Err(unknown()),
            }
        }
        ("schubert", None) => Ok(schubert_default(field, seed)?.instance),
        ("osculating", None) => Ok(osculating_default(field)?.instance),
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(6, 2).len(), 21);
        assert_eq!(multi_indices(6, 3).len(), 56);
        assert_eq!(multi_indices(3, 1), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn osculating_rows() {
        let f = Rationals;
        let q = |rows: &[[i64; 5]]| -> Matrix<_> {
            rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()
        };
        let fl = osculating_flag(&f, &f.from_i64(3), 5);
        assert_eq!(fl[..3].to_vec(), q(&[[1, 3, 9, 27, 81], [0, 1, 6, 27, 108], [0, 0, 2, 18, 108]]));
        let fl = osculating_flag(&f, &f.from_i64(-2), 5);
        assert_eq!(fl[2], q(&[[0, 0, 2, -12, 48]])[0]);
        let fl = osculating_flag(&f, &f.from_i64(0), 4);
        assert_eq!(fl[3], q(&[[0, 0, 0, 6, 0]])[0][..4].to_vec());
    }

    #[test]
    fn chart_minors() {
        let par = pluecker_chart(Rationals, 2, 4).unwrap();
        assert_eq!(par.num_generators(), 6);
        assert_eq!(par.phi()[0].to_string(), "1");
        // columns {3,4}: t1*t4 - t2*t3
        assert_eq!(par.phi()[5].to_string(), "t1*t4 - t2*t3");
        assert!(par.check_khovanskii_truncated(3).passed());
    }

    #[test]
    fn schubert_equation_counts() {
        let f = PrimeField::new(9716633).unwrap();
        let one = schubert_random(f, 3, 6, &vec![vec![3, 5, 6]; 9], 3).unwrap();
        assert_eq!(one.raw_equations, 9);
        let inst = schubert_default(f, 1).unwrap();
        assert_eq!(inst.raw_equations, 39);
        assert_eq!(inst.instance.sys.equations().len(), 18);
        assert!(matches!(
            schubert_random(f, 3, 6, &vec![vec![2, 4, 6]; 2], 1),
            Err(CatalogError::DimensionMismatch { got: 6, n: 9 })
        ));
    }

    #[test]
    fn chart_reconstruction_signs() {
        let par = pluecker_chart(Rationals, 2, 4).unwrap();
        let t = [2.0, -3.0, 5.0, 7.0];
        let point: Vec<Complex64> = t.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let coords: Vec<Complex64> = par.phi().iter().map(|p| p.evaluate_complex(&point).unwrap() * 4.0).collect();
        let h = chart_from_pluecker(&par, 2, 4, &coords).unwrap();
        assert!((h[0][2].re - 2.0).abs() < 1e-12 && (h[1][3].re - 7.0).abs() < 1e-12);
        assert!((h[0][3].re + 3.0).abs() < 1e-12);
    }
}
