//! Structured systems and their Khovanskii–Macaulay matrices.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::field::Field;
use crate::khov::{GradedSupport, Parameterization};
use crate::linalg::{self, Matrix};
use crate::par;
use crate::poly::{MultiPoly, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KmError {
    #[error("equation {index} is not in degree {degree} of the algebra generated by the parameterization")]
    NotInAlgebra { index: usize, degree: usize },
    #[error("the Khovanskii property fails in degree {degree}")]
    KhovanskiiFailure { degree: usize },
    #[error("equation {index}: degree must be at least 1")]
    ZeroDegree { index: usize },
    #[error("equation {index}: coefficient exponent {alpha:?} must have {generators} entries summing to {degree}")]
    BadAlpha { index: usize, alpha: Vec<u32>, generators: usize, degree: usize },
    #[error("equation {index}: coefficient form does not expand to the given polynomial")]
    FormMismatch { index: usize },
    #[error("equation {index}: neither a polynomial nor a coefficient form was given")]
    MissingEquation { index: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `Σ c_α x^α` over multi-indices `α` of the generators, `|α| = d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientForm<F: Field> {
    pub terms: Vec<(Vec<u32>, F::Elem)>,
}

/// One input equation: a polynomial, its coefficient form, or both.
#[derive(Debug, Clone)]
pub struct EquationSpec<F: Field> {
    pub degree: usize,
    pub poly: Option<MultiPoly<F>>,
    pub coeff_form: Option<CoefficientForm<F>>,
}

impl<F: Field> EquationSpec<F> {
    pub fn from_poly(poly: MultiPoly<F>, degree: usize) -> Self {
        EquationSpec { degree, poly: Some(poly), coeff_form: None }
    }

    pub fn from_form(form: CoefficientForm<F>, degree: usize) -> Self {
        EquationSpec { degree, poly: None, coeff_form: Some(form) }
    }
}

#[derive(Debug, Clone)]
pub struct Equation<F: Field> {
    pub poly: MultiPoly<F>,
    pub degree: usize,
    pub coeff_form: CoefficientForm<F>,
}

/// Equations `f_1..f_s` with declared degrees over a parameterization.
#[derive(Debug, Clone)]
pub struct StructuredSystem<F: Field> {
    par: Arc<Parameterization<F>>,
    equations: Vec<Equation<F>>,
}

impl<F: Field> StructuredSystem<F> {
    /// Validate every equation and complete the missing representation.
    pub fn new(par: Arc<Parameterization<F>>, specs: Vec<EquationSpec<F>>) -> Result<Self, KmError> {
        let mut equations = Vec::with_capacity(specs.len());
        let mut powers = PowerCache::new(&par);
        for (index, spec) in specs.into_iter().enumerate() {
            let degree = spec.degree;
            if degree == 0 {
                return Err(KmError::ZeroDegree { index });
            }
            if let Some(form) = &spec.coeff_form {
                for (alpha, _) in &form.terms {
                    if alpha.len() != par.num_generators() || alpha.iter().sum::<u32>() as usize != degree {
                        return Err(KmError::BadAlpha {
                            index,
                            alpha: alpha.clone(),
                            generators: par.num_generators(),
                            degree,
                        });
                    }
                }
            }
            let eq = match (spec.poly, spec.coeff_form) {
                (Some(poly), Some(form)) => {
                    if !poly.same_ring(&par.phi()[0]) {
                        return Err(PolyError::RingMismatch.into());
                    }
                    if powers.expand(&form)? != poly {
                        return Err(KmError::FormMismatch { index });
                    }
                    Equation { poly, degree, coeff_form: form }
                }
                (Some(poly), None) => {
                    if !poly.same_ring(&par.phi()[0]) {
                        return Err(PolyError::RingMismatch.into());
                    }
                    let form =
                        form_from_subduction(&par, &poly, degree).ok_or(KmError::NotInAlgebra { index, degree })?;
                    Equation { poly, degree, coeff_form: form }
                }
                (None, Some(form)) => Equation { poly: powers.expand(&form)?, degree, coeff_form: form },
                (None, None) => return Err(KmError::MissingEquation { index }),
            };
            equations.push(eq);
        }
        Ok(StructuredSystem { par, equations })
    }

    pub fn par(&self) -> &Arc<Parameterization<F>> {
        &self.par
    }

    pub fn equations(&self) -> &[Equation<F>] {
        &self.equations
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.equations.iter().map(|e| e.degree).collect()
    }

    pub fn field(&self) -> &F {
        self.par.field()
    }

    /// Drop equations that are linearly dependent on earlier ones of the same degree.
    pub fn filter_independent(&self) -> Self {
        let mut keep = vec![false; self.equations.len()];
        let mut by_degree: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, e) in self.equations.iter().enumerate() {
            by_degree.entry(e.degree).or_default().push(i);
        }
        for (d, idx) in by_degree {
            let rows: Matrix<F::Elem> =
                idx.iter().map(|&i| self.par.subduct(&self.equations[i].poly, d).coeffs).collect();
            let cols = self.par.hilbert_function(d);
            for r in linalg::independent_rows(self.field(), &rows, cols) {
                keep[idx[r]] = true;
            }
        }
        let equations = self.equations.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| e.clone()).collect();
        StructuredSystem { par: self.par.clone(), equations }
    }
}

/// The coefficient form read off a subduction: `b_{d,β}` is the product of
/// the generators along its witness chain.
fn form_from_subduction<F: Field>(
    par: &Parameterization<F>,
    poly: &MultiPoly<F>,
    d: usize,
) -> Option<CoefficientForm<F>> {
    let r = par.subduct(poly, d);
    if !r.is_member() {
        return None;
    }
    let terms = r
        .coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !par.field().is_zero(c))
        .map(|(k, c)| (par.generator_multiset(d, k), c))
        .collect();
    Some(CoefficientForm { terms })
}

struct PowerCache<'a, F: Field> {
    par: &'a Parameterization<F>,
    powers: Vec<Vec<MultiPoly<F>>>,
}

impl<'a, F: Field> PowerCache<'a, F> {
    fn new(par: &'a Parameterization<F>) -> Self {
        let one = MultiPoly::one(par.field().clone(), par.vars().clone());
        PowerCache { par, powers: vec![vec![one]; par.num_generators()] }
    }

    fn power(&mut self, j: usize, e: usize) -> &MultiPoly<F> {
        while self.powers[j].len() <= e {
            let next = self.powers[j].last().expect("nonempty") * &self.par.phi()[j];
            self.powers[j].push(next);
        }
        &self.powers[j][e]
    }

    fn expand(&mut self, form: &CoefficientForm<F>) -> Result<MultiPoly<F>, KmError> {
        let mut acc = MultiPoly::zero(self.par.field().clone(), self.par.vars().clone());
        for (alpha, c) in &form.terms {
            let mut t = MultiPoly::constant(self.par.field().clone(), self.par.vars().clone(), c.clone());
            for (j, &e) in alpha.iter().enumerate() {
                if e > 0 {
                    t = t.checked_mul(self.power(j, e as usize))?;
                }
            }
            acc = acc.checked_add(&t)?;
        }
        Ok(acc)
    }
}

/// The degree-d Khovanskii–Macaulay matrix.
#[derive(Debug, Clone)]
pub struct KMMatrix<F: Field> {
    pub degree: usize,
    /// `(equation index, index of γ in (d − d_i)·A)`
    pub row_labels: Vec<(usize, usize)>,
    pub cols: Arc<GradedSupport>,
    pub entries: Matrix<F::Elem>,
    pub reduced: bool,
    field: F,
}

impl<F: Field> KMMatrix<F> {
    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.field, &self.entries, self.ncols())
    }

    pub fn nullity(&self) -> usize {
        self.ncols() - self.rank()
    }

    /// Keep a maximal independent subset of rows, scanning in row order.
    pub fn into_reduced(self) -> Self {
        if self.reduced {
            return self;
        }
        let keep = linalg::independent_rows(&self.field, &self.entries, self.ncols());
        let row_labels = keep.iter().map(|&r| self.row_labels[r]).collect();
        let mut entries = self.entries;
        let entries = keep.iter().map(|&r| std::mem::take(&mut entries[r])).collect();
        KMMatrix { row_labels, entries, reduced: true, ..self }
    }
}

/// Build `M_X(d)`: rows `(i, γ)` are the expansions of `b_{d−d_i,γ}·f_i` in
/// the basis of degree d, equations outer and `γ` inner.
pub fn km_matrix<F: Field>(sys: &StructuredSystem<F>, d: usize, reduce: bool) -> Result<KMMatrix<F>, KmError> {
    let par = sys.par();
    let mut labels = Vec::new();
    for (i, eq) in sys.equations().iter().enumerate() {
        if eq.degree <= d {
            labels.extend((0..par.hilbert_function(d - eq.degree)).map(|g| (i, g)));
        }
    }
    let bases: HashMap<usize, _> =
        sys.equations().iter().filter(|e| e.degree <= d).map(|e| (d - e.degree, par.basis(d - e.degree))).collect();
    let rows = par::map_range(labels.len(), |r| {
        let (i, g) = labels[r];
        let eq = &sys.equations()[i];
        let b = &bases[&(d - eq.degree)].elements()[g];
        let res = par.subduct(&(b * &eq.poly), d);
        res.is_member().then_some(res.coeffs)
    });
    let mut entries = Vec::with_capacity(rows.len());
    for (r, row) in rows.into_iter().enumerate() {
        match row {
            Some(row) => entries.push(row),
            None => {
                let report = par.check_khovanskii_truncated(d);
                return Err(match report.first_failure() {
                    Some(degree) => KmError::KhovanskiiFailure { degree },
                    None => KmError::NotInAlgebra { index: labels[r].0, degree: d },
                });
            }
        }
    }
    let m = KMMatrix {
        degree: d,
        row_labels: labels,
        cols: par.support(d),
        entries,
        reduced: false,
        field: par.field().clone(),
    };
    Ok(if reduce { m.into_reduced() } else { m })
}

/// Shape of the unreduced `M_X(d)` without building it.
pub fn km_shape<F: Field>(sys: &StructuredSystem<F>, d: usize) -> (usize, usize) {
    let par = sys.par();
    let rows = sys.equations().iter().filter(|e| e.degree <= d).map(|e| par.hilbert_function(d - e.degree)).sum();
    (rows, par.hilbert_function(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::poly::WeightOrder;

    fn duffing() -> StructuredSystem<Rationals> {
        let vars = MultiPoly::<Rationals>::ring_vars(2);
        let phi = ["1", "t1", "t2", "t1*(t1^2+t2^2)", "t2*(t1^2+t2^2)"]
            .iter()
            .map(|s| MultiPoly::parse(Rationals, vars.clone(), s).unwrap())
            .collect();
        let par = Arc::new(Parameterization::new(phi, WeightOrder::new(vec![0, -1])).unwrap());
        let eqs = ["1+3*t1+5*t2+7*t1*(t1^2+t2^2)", "11+13*t1+17*t2+19*t2*(t1^2+t2^2)"]
            .iter()
            .map(|s| EquationSpec::from_poly(MultiPoly::parse(Rationals, vars.clone(), s).unwrap(), 1))
            .collect();
        StructuredSystem::new(par, eqs).unwrap()
    }

    #[test]
    fn shapes_and_nullities() {
        let sys = duffing();
        assert_eq!(km_shape(&sys, 0), (0, 1));
        assert_eq!(km_shape(&sys, 3), (28, 28));
        let nullities: Vec<usize> = (0..5).map(|d| km_matrix(&sys, d, false).unwrap().nullity()).collect();
        assert_eq!(nullities, vec![1, 3, 5, 5, 5]);
        let m3 = km_matrix(&sys, 3, true).unwrap();
        assert_eq!(m3.shape(), (23, 28));
    }

    #[test]
    fn derived_coefficient_form_expands_back() {
        let sys = duffing();
        let eq = &sys.equations()[0];
        let again = StructuredSystem::new(
            sys.par().clone(),
            vec![EquationSpec { degree: 1, poly: Some(eq.poly.clone()), coeff_form: Some(eq.coeff_form.clone()) }],
        );
        assert!(again.is_ok());
        assert_eq!(eq.coeff_form.terms.len(), 4);
    }

    #[test]
    fn non_member_rejected() {
        let sys = duffing();
        let t1sq = MultiPoly::parse(Rationals, sys.par().vars().clone(), "t1^2").unwrap();
        let err = StructuredSystem::new(sys.par().clone(), vec![EquationSpec::from_poly(t1sq, 1)]).unwrap_err();
        assert_eq!(err, KmError::NotInAlgebra { index: 0, degree: 1 });
    }
}
