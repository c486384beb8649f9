//! Khovanskii-basis layer: leading-exponent matrix, lattice points `d·A` with
//! witnesses, the graded basis `b_{d,β}`, subduction and a truncated check
//! of the Khovanskii property.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

use crate::field::Field;
use crate::par;
use crate::poly::{Exponents, MultiPoly, OrderKey, PolyError, WeightOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KhovError {
    #[error("no generators supplied")]
    Empty,
    #[error("generator {0} is the zero polynomial")]
    ZeroGenerator(usize),
    #[error("generators {0} and {1} share the leading exponent")]
    DuplicateColumn(usize, usize),
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("generators live in different rings")]
    RingMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Lattice points `d·A` with one witness decomposition per point.
///
/// Points are stored by their t-part only; the degree row of `A` is implicit.
#[derive(Debug, Clone)]
pub struct GradedSupport {
    degree: usize,
    points: Vec<Exponents>,
    index: HashMap<Exponents, usize>,
    witness: Vec<Option<(usize, usize)>>,
}

impl GradedSupport {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Exponents] {
        &self.points
    }

    pub fn position(&self, e: &Exponents) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// `(γ index in degree d−1, generator index)` with `γ + α_i = β`.
    pub fn witness(&self, k: usize) -> Option<(usize, usize)> {
        self.witness[k]
    }

    /// Full `(n+1)`-vector `(d, β)`.
    pub fn point_with_degree(&self, k: usize) -> Vec<u32> {
        std::iter::once(self.degree as u32).chain(self.points[k].as_slice().iter().map(|&x| x as u32)).collect()
    }

    pub fn label(&self, k: usize) -> String {
        let v: Vec<String> = self.point_with_degree(k).iter().map(|x| x.to_string()).collect();
        format!("({})", v.join(","))
    }
}

/// Expanded basis `b_{d,β}` of the degree-d piece, aligned with [`GradedSupport`].
#[derive(Debug, Clone)]
pub struct GradedBasis<F: Field> {
    degree: usize,
    elements: Vec<MultiPoly<F>>,
    // terms in order with the leading term removed, plus the leading coefficient
    tails: Vec<Vec<(OrderKey, F::Elem)>>,
    leading: Vec<F::Elem>,
}

impl<F: Field> GradedBasis<F> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[MultiPoly<F>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Expansion of a polynomial in the degree-d basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SubductionResult<F: Field> {
    pub coeffs: Vec<F::Elem>,
    pub remainder: MultiPoly<F>,
}

impl<F: Field> SubductionResult<F> {
    pub fn is_member(&self) -> bool {
        self.remainder.is_zero()
    }
}

/// Degree-wise append-only cache. Readers take the read lock; a separate
/// build lock guarantees one writer per degree.
#[derive(Debug)]
struct DegreeCache<T> {
    items: RwLock<Vec<Arc<T>>>,
    build: Mutex<()>,
}

impl<T> DegreeCache<T> {
    fn new() -> Self {
        DegreeCache { items: RwLock::new(Vec::new()), build: Mutex::new(()) }
    }

    fn get_or_build(&self, d: usize, mut next: impl FnMut(Option<&Arc<T>>, usize) -> T) -> Arc<T> {
        if let Some(x) = self.items.read().expect("cache lock").get(d) {
            return x.clone();
        }
        let _guard = self.build.lock().expect("build lock");
        loop {
            let (len, last) = {
                let items = self.items.read().expect("cache lock");
                if let Some(x) = items.get(d) {
                    return x.clone();
                }
                (items.len(), items.last().cloned())
            };
            let item = Arc::new(next(last.as_ref(), len));
            self.items.write().expect("cache lock").push(item);
        }
    }
}

/// The unirational parameterization `φ_0..φ_ℓ` with its weight order.
#[derive(Debug)]
pub struct Parameterization<F: Field> {
    field: F,
    vars: Arc<[String]>,
    phi: Vec<MultiPoly<F>>,
    order: WeightOrder,
    alpha: Vec<Exponents>,
    supports: DegreeCache<GradedSupport>,
    bases: DegreeCache<GradedBasis<F>>,
}

impl<F: Field> Parameterization<F> {
    pub fn new(phi: Vec<MultiPoly<F>>, order: WeightOrder) -> Result<Self, KhovError> {
        let first = phi.first().ok_or(KhovError::Empty)?;
        let field = first.field().clone();
        let vars = first.vars().clone();
        if order.nvars() != vars.len() {
            return Err(KhovError::WeightLength { expected: vars.len(), got: order.nvars() });
        }
        let mut alpha = Vec::with_capacity(phi.len());
        for (j, p) in phi.iter().enumerate() {
            if !p.same_ring(first) {
                return Err(KhovError::RingMismatch);
            }
            if p.is_zero() {
                return Err(KhovError::ZeroGenerator(j));
            }
            let e = p.leading_exponent(&order)?;
            if let Some(i) = alpha.iter().position(|a| *a == e) {
                return Err(KhovError::DuplicateColumn(i, j));
            }
            alpha.push(e);
        }
        Ok(Parameterization { field, vars, phi, order, alpha, supports: DegreeCache::new(), bases: DegreeCache::new() })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    /// Number of affine variables.
    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Index of the last generator.
    pub fn ell(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn num_generators(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[MultiPoly<F>] {
        &self.phi
    }

    pub fn order(&self) -> &WeightOrder {
        &self.order
    }

    /// Leading exponents of the generators (columns of `A` without the degree row).
    pub fn leading_exponents(&self) -> &[Exponents] {
        &self.alpha
    }

    /// The `(n+1)×(ℓ+1)` matrix `A`; the first row is all ones.
    pub fn matrix_a(&self) -> Vec<Vec<u32>> {
        let mut rows = vec![vec![1u32; self.phi.len()]];
        for v in 0..self.n() {
            rows.push(self.alpha.iter().map(|a| a[v] as u32).collect());
        }
        rows
    }

    pub fn support(&self, d: usize) -> Arc<GradedSupport> {
        self.supports.get_or_build(d, |prev, deg| self.next_support(prev.map(|p| &**p), deg))
    }

    fn next_support(&self, prev: Option<&GradedSupport>, deg: usize) -> GradedSupport {
        let Some(prev) = prev else {
            let zero = Exponents::zero(self.n());
            let index = HashMap::from([(zero.clone(), 0)]);
            return GradedSupport { degree: 0, points: vec![zero], index, witness: vec![None] };
        };
        let mut seen: HashMap<Exponents, (usize, usize)> = HashMap::new();
        for (g, gamma) in prev.points.iter().enumerate() {
            for (i, a) in self.alpha.iter().enumerate() {
                seen.entry(gamma.add(a)).or_insert((g, i));
            }
        }
        let mut entries: Vec<(Exponents, (usize, usize))> = seen.into_iter().collect();
        entries.sort_by(|a, b| a.0.grlex_cmp(&b.0));
        let index = entries.iter().enumerate().map(|(k, (e, _))| (e.clone(), k)).collect();
        let witness = entries.iter().map(|(_, w)| Some(*w)).collect();
        let points = entries.into_iter().map(|(e, _)| e).collect();
        GradedSupport { degree: deg, points, index, witness }
    }

    pub fn basis(&self, d: usize) -> Arc<GradedBasis<F>> {
        self.bases.get_or_build(d, |prev, deg| self.next_basis(prev.map(|p| &**p), deg))
    }

    fn next_basis(&self, prev: Option<&GradedBasis<F>>, deg: usize) -> GradedBasis<F> {
        let support = self.support(deg);
        let elements: Vec<MultiPoly<F>> = match prev {
            None => vec![MultiPoly::one(self.field.clone(), self.vars.clone())],
            Some(prev) => par::map_range(support.len(), |k| {
                let (g, i) = support.witness(k).expect("witness for positive degree");
                &prev.elements[g] * &self.phi[i]
            }),
        };
        let mut tails = Vec::with_capacity(elements.len());
        let mut leading = Vec::with_capacity(elements.len());
        for (k, b) in elements.iter().enumerate() {
            let mut terms = b.ordered_terms(&self.order);
            let (key, c) = terms.remove(0);
            assert_eq!(key.exps, support.points[k], "leading exponent of basis element differs from its label");
            tails.push(terms);
            leading.push(c);
        }
        GradedBasis { degree: deg, elements, tails, leading }
    }

    pub fn hilbert_function(&self, d: usize) -> usize {
        self.support(d).len()
    }

    /// Express `g` in the basis `b_{d,·}` by iterated leading-term elimination.
    pub fn subduct(&self, g: &MultiPoly<F>, d: usize) -> SubductionResult<F> {
        let support = self.support(d);
        let basis = self.basis(d);
        let f = &self.field;
        let mut work: BTreeMap<OrderKey, F::Elem> = g.terms().map(|(e, c)| (self.order.key(e), c.clone())).collect();
        let mut coeffs = vec![f.zero(); support.len()];
        let mut rem = Vec::new();
        while let Some((key, c)) = work.pop_first() {
            match support.position(&key.exps) {
                Some(k) => {
                    let q = f.div(&c, &basis.leading[k]).expect("nonzero leading coefficient");
                    for (tk, tc) in &basis.tails[k] {
                        use std::collections::btree_map::Entry;
                        match work.entry(tk.clone()) {
                            Entry::Vacant(v) => {
                                v.insert(f.neg(&f.mul(&q, tc)));
                            }
                            Entry::Occupied(mut o) => {
                                f.sub_mul_assign(o.get_mut(), &q, tc);
                                if f.is_zero(o.get()) {
                                    o.remove();
                                }
                            }
                        }
                    }
                    coeffs[k] = f.add(&coeffs[k], &q);
                }
                None => rem.push((key.exps, c)),
            }
        }
        let remainder = MultiPoly::from_terms(f.clone(), self.vars.clone(), rem).expect("same ring");
        SubductionResult { coeffs, remainder }
    }

    /// Multiset of generators along the witness chain of point `k` in degree `d`,
    /// as a count vector of length `ℓ+1`.
    pub fn generator_multiset(&self, d: usize, mut k: usize) -> Vec<u32> {
        let mut counts = vec![0u32; self.phi.len()];
        for deg in (1..=d).rev() {
            let (g, i) = self.support(deg).witness(k).expect("witness");
            counts[i] += 1;
            k = g;
        }
        counts
    }

    /// Rank check of the Khovanskii property in degrees `1..=dmax`.
    ///
    /// Every degree-d product is a combination `b_{d−1,γ}·φ_i`; subducting each
    /// at degree d leaves remainders supported outside `d·A`, so the rank of the
    /// span is `|d·A|` plus the rank of the remainders.
    pub fn check_khovanskii_truncated(&self, dmax: usize) -> KhovanskiiReport {
        let mut degrees = Vec::new();
        for d in 1..=dmax {
            let prev = self.basis(d - 1);
            let size = self.support(d).len();
            let ng = self.phi.len();
            let rems: Vec<MultiPoly<F>> = par::map_range(prev.len() * ng, |idx| {
                let (g, i) = (idx / ng, idx % ng);
                self.subduct(&(&prev.elements[g] * &self.phi[i]), d).remainder
            });
            let rems: Vec<_> = rems.into_iter().filter(|r| !r.is_zero()).collect();
            let extra = remainder_rank(&self.field, &rems);
            degrees.push(DegreeCheck { degree: d, support_size: size, rank: size + extra, passed: extra == 0 });
        }
        KhovanskiiReport { degrees }
    }
}

fn remainder_rank<F: Field>(field: &F, rems: &[MultiPoly<F>]) -> usize {
    if rems.is_empty() {
        return 0;
    }
    let mut cols: BTreeMap<Exponents, usize> = BTreeMap::new();
    for r in rems {
        for (e, _) in r.terms() {
            let next = cols.len();
            cols.entry(e.clone()).or_insert(next);
        }
    }
    let rows = rems
        .iter()
        .map(|r| {
            let mut row = vec![field.zero(); cols.len()];
            for (e, c) in r.terms() {
                row[cols[e]] = c.clone();
            }
            row
        })
        .collect();
    field.pivot_columns(rows, cols.len()).len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCheck {
    pub degree: usize,
    pub support_size: usize,
    pub rank: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KhovanskiiReport {
    pub degrees: Vec<DegreeCheck>,
}

impl KhovanskiiReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|d| d.passed)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.degrees.iter().find(|d| !d.passed).map(|d| d.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    fn par(phi: &[&str], omega: Vec<i64>) -> Parameterization<Rationals> {
        let vars = MultiPoly::<Rationals>::ring_vars(omega.len());
        let phi = phi.iter().map(|s| MultiPoly::parse(Rationals, vars.clone(), s).unwrap()).collect();
        Parameterization::new(phi, WeightOrder::new(omega)).unwrap()
    }

    fn duffing() -> Parameterization<Rationals> {
        par(&["1", "t1", "t2", "t1*(t1^2+t2^2)", "t2*(t1^2+t2^2)"], vec![0, -1])
    }

    #[test]
    fn duffing_matrix_and_support() {
        let p = duffing();
        assert_eq!(p.matrix_a(), vec![vec![1, 1, 1, 1, 1], vec![0, 1, 0, 1, 0], vec![0, 0, 1, 2, 3]]);
        assert_eq!(p.hilbert_function(0), 1);
        assert_eq!(p.hilbert_function(2), 14);
        assert_eq!(p.hilbert_function(3), 28);
        let s = p.support(2);
        for k in 0..s.len() {
            let (g, i) = s.witness(k).unwrap();
            assert_eq!(p.support(1).points()[g].add(&p.leading_exponents()[i]), s.points()[k]);
        }
    }

    #[test]
    fn projective_plane() {
        let p = par(&["1", "t1", "t2"], vec![-1, -1]);
        assert_eq!(p.matrix_a(), vec![vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(p.hilbert_function(3), 10);
        assert!(p.check_khovanskii_truncated(3).passed());
    }

    #[test]
    fn subduct_basis_elements_and_products() {
        let p = duffing();
        let b = p.basis(2);
        for (k, e) in b.elements().iter().enumerate() {
            let r = p.subduct(e, 2);
            assert!(r.is_member());
            for (j, c) in r.coeffs.iter().enumerate() {
                assert_eq!(c.clone(), if j == k { Rationals.one() } else { Rationals.zero() });
            }
        }
        let out_of_degree = p.subduct(&MultiPoly::parse(Rationals, p.vars().clone(), "t1^3").unwrap(), 1);
        assert!(!out_of_degree.is_member());
    }

    #[test]
    fn failing_khovanskii_instance() {
        // φ1² − φ0φ2 = −t2 has a leading monomial outside 2·A
        let p = par(&["1", "t1", "t1^2 + t2"], vec![-1, -1]);
        let report = p.check_khovanskii_truncated(2);
        assert!(report.degrees[0].passed);
        assert_eq!(report.first_failure(), Some(2));
        assert_eq!(report.degrees[1].support_size, 5);
        assert_eq!(report.degrees[1].rank, 6);
    }

    #[test]
    fn duplicate_leading_terms_rejected() {
        let vars = MultiPoly::<Rationals>::ring_vars(1);
        let phi = ["t1", "t1 + 1"].iter().map(|s| MultiPoly::parse(Rationals, vars.clone(), s).unwrap()).collect();
        assert_eq!(
            Parameterization::new(phi, WeightOrder::new(vec![-1])).unwrap_err(),
            KhovError::DuplicateColumn(0, 1)
        );
    }

    #[test]
    fn generator_multiset_follows_witnesses() {
        let p = duffing();
        let s = p.support(3);
        for k in 0..s.len() {
            let m = p.generator_multiset(3, k);
            assert_eq!(m.iter().sum::<u32>(), 3);
            let mut e = Exponents::zero(2);
            for (i, &c) in m.iter().enumerate() {
                for _ in 0..c {
                    e = e.add(&p.leading_exponents()[i]);
                }
            }
            assert_eq!(e, s.points()[k]);
        }
    }
}
