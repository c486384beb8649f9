//! File formats and output schemas for the `kmsolve` binary.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use kmsolve::catalog::ProblemInstance;
use kmsolve::khov::KhovError;
use kmsolve::km::KmError;
use kmsolve::poly::PolyError;
use kmsolve::solver::{normalize_first, SolutionSet, SolveError, SolveReport};
use kmsolve::{
    CoefficientForm, Complex64, EquationSpec, Field, FieldSpec, MultiPoly, Parameterization, StructuredSystem,
    WeightOrder,
};

/// Error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    pub fn math(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn unsupported(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<KhovError> for CliError {
    fn from(e: KhovError) -> Self {
        match e {
            KhovError::DuplicateColumn(..) => CliError::math(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<KmError> for CliError {
    fn from(e: KmError) -> Self {
        match e {
            KmError::NotInAlgebra { .. } | KmError::KhovanskiiFailure { .. } => CliError::math(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Km(k) => k.into(),
            SolveError::UnsupportedField(_) => CliError::unsupported(e.to_string()),
            SolveError::NeedDegree { .. } => CliError::input(e.to_string()),
            _ => CliError::math(e.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------

/// `"QQ"` or `{"Fp": p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldJson {
    Named(String),
    Prime {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

impl FieldJson {
    pub fn spec(&self) -> Result<FieldSpec, CliError> {
        let spec = match self {
            FieldJson::Named(s) => parse_field(s)?,
            FieldJson::Prime { fp } => FieldSpec::PrimeField(*fp),
        };
        spec.validate().map_err(|e| CliError::input(e.to_string()))?;
        Ok(spec)
    }

    pub fn from_spec(spec: FieldSpec) -> Self {
        match spec {
            FieldSpec::Rationals => FieldJson::Named("QQ".into()),
            FieldSpec::PrimeField(p) => FieldJson::Prime { fp: p },
        }
    }
}

/// Accepts `QQ`, `Fp:p`, `GF(p)` or a bare prime.
pub fn parse_field(s: &str) -> Result<FieldSpec, CliError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("QQ") || s == "Q" {
        return Ok(FieldSpec::Rationals);
    }
    let digits = s.strip_prefix("Fp:").or_else(|| s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')'))).unwrap_or(s);
    let p: u64 = digits.parse().map_err(|_| CliError::input(format!("unknown field `{s}`")))?;
    let spec = FieldSpec::PrimeField(p);
    spec.validate().map_err(|e| CliError::input(e.to_string()))?;
    Ok(spec)
}

/// Integer or string scalar; strings may be fractions such as `"3/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    /// Multiplicities of the generators `x_0..x_ℓ`, summing to the degree.
    pub alpha: Vec<u32>,
    pub c: ScalarJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationJson {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<CoeffJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub field: FieldJson,
    pub vars: Vec<String>,
    pub weight: Vec<i64>,
    pub phi: Vec<String>,
    #[serde(default)]
    pub equations: Vec<EquationJson>,
    /// Suggested working degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dreg: Option<usize>,
    /// Hilbert regularity of the coordinate ring, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hreg: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_count: Option<usize>,
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: SystemFile = serde_json::from_str(text).map_err(|e| CliError::input(format!("system file: {e}")))?;
        if file.weight.len() != file.vars.len() {
            return Err(CliError::input(format!(
                "weight has length {} but there are {} variables",
                file.weight.len(),
                file.vars.len()
            )));
        }
        if let Some(i) = file.equations.iter().position(|e| e.degree == 0) {
            return Err(CliError::input(format!("equation {} has degree 0", i + 1)));
        }
        Ok(file)
    }

    pub fn field_spec(&self) -> Result<FieldSpec, CliError> {
        self.field.spec()
    }

    pub fn parameterization<F: Field>(&self, field: F) -> Result<Parameterization<F>, CliError> {
        let vars: Arc<[String]> = self.vars.clone().into();
        let phi =
            self.phi.iter().map(|s| MultiPoly::parse(field.clone(), vars.clone(), s)).collect::<Result<Vec<_>, _>>()?;
        Ok(Parameterization::new(phi, WeightOrder::new(self.weight.clone()))?)
    }

    pub fn system<F: Field>(&self, field: F) -> Result<StructuredSystem<F>, CliError> {
        let par = Arc::new(self.parameterization(field.clone())?);
        let mut specs = Vec::with_capacity(self.equations.len());
        for (i, e) in self.equations.iter().enumerate() {
            let poly = e.poly.as_deref().map(|s| MultiPoly::parse(field.clone(), par.vars().clone(), s)).transpose()?;
            let form = match &e.coeffs {
                Some(cs) => {
                    let mut terms = Vec::with_capacity(cs.len());
                    for c in cs {
                        let text = match &c.c {
                            ScalarJson::Int(v) => v.to_string(),
                            ScalarJson::Text(s) => s.clone(),
                        };
                        let v = field
                            .parse_scalar(&text)
                            .map_err(|err| CliError::input(format!("equation {}: {err}", i + 1)))?;
                        terms.push((c.alpha.clone(), v));
                    }
                    Some(CoefficientForm { terms })
                }
                None => None,
            };
            specs.push(EquationSpec { degree: e.degree, poly, coeff_form: form });
        }
        Ok(StructuredSystem::new(par, specs)?)
    }

    pub fn from_instance<F: Field>(inst: &ProblemInstance<F>) -> Self {
        let par = inst.sys.par();
        SystemFile {
            name: Some(inst.name.clone()),
            field: FieldJson::from_spec(par.field().spec()),
            vars: par.vars().to_vec(),
            weight: par.order().omega().to_vec(),
            phi: par.phi().iter().map(|p| p.to_string()).collect(),
            equations: inst
                .sys
                .equations()
                .iter()
                .map(|e| EquationJson { degree: e.degree, poly: Some(e.poly.to_string()), coeffs: None })
                .collect(),
            dreg: inst.recommended_dreg,
            hreg: inst.hreg,
            expected_count: inst.expected_count,
        }
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalize {
    Raw,
    First,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionJson {
    pub coords: Vec<[f64; 2]>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsJson {
    pub commutator_norm: f64,
    pub offdiag: f64,
    pub separation: f64,
    pub retries: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveJson {
    pub delta: usize,
    pub dreg: usize,
    pub h: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<SolutionJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsJson>,
}

fn pair(z: &Complex64) -> [f64; 2] {
    // avoid "-0.0" so output does not depend on the sign of a zero
    let fix = |x: f64| if x == 0.0 { 0.0 } else { x };
    [fix(z.re), fix(z.im)]
}

impl SolveJson {
    pub fn new<F: Field>(report: &SolveReport<F>, normalize: Normalize) -> Self {
        let ms = &report.mult;
        let f = &ms.field;
        let (solutions, diagnostics) = match &report.solutions {
            Some(set) => (Some(solutions_json(set, normalize)), Some(diagnostics_json(set))),
            None => (None, None),
        };
        SolveJson {
            delta: ms.delta,
            dreg: report.dreg,
            h: ms.h_coeffs.iter().map(|c| f.format(c)).collect(),
            solutions,
            diagnostics,
        }
    }
}

fn solutions_json(set: &SolutionSet, normalize: Normalize) -> Vec<SolutionJson> {
    set.coords
        .iter()
        .zip(&set.residuals)
        .map(|(row, &residual)| {
            let row = match normalize {
                Normalize::Raw => row.clone(),
                Normalize::First => normalize_first(row),
            };
            SolutionJson { coords: row.iter().map(pair).collect(), residual, chart: None }
        })
        .collect()
}

fn diagnostics_json(set: &SolutionSet) -> DiagnosticsJson {
    let d = &set.diagnostics;
    DiagnosticsJson {
        commutator_norm: d.commutator_norm,
        offdiag: d.offdiag,
        separation: d.separation,
        retries: d.retries,
        warnings: d.warnings.clone(),
    }
}

/// Attach chart matrices `[I | T]` to Grassmannian solutions.
pub fn attach_charts<F: Field>(
    out: &mut SolveJson,
    report: &SolveReport<F>,
    par: &Parameterization<F>,
    k: usize,
    m: usize,
) {
    let (Some(sols), Some(set)) = (out.solutions.as_mut(), report.solutions.as_ref()) else {
        return;
    };
    for (s, row) in sols.iter_mut().zip(&set.coords) {
        s.chart = kmsolve::catalog::chart_from_pluecker(par, k, m, row)
            .map(|h| h.iter().map(|r| r.iter().map(pair).collect()).collect());
    }
}

/// Exact matrix as CSV: a header of column labels, then one row per matrix row.
pub fn matrix_csv<F: Field, W: std::io::Write>(
    field: &F,
    header: &[String],
    rows: impl Iterator<Item = (Vec<String>, Vec<F::Elem>)>,
    out: W,
) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| CliError::input(format!("write failed: {e}"));
    w.write_record(header).map_err(io)?;
    for (labels, entries) in rows {
        let rec = labels.into_iter().chain(entries.iter().map(|x| field.format(x)));
        w.write_record(rec).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::input(format!("write failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use kmsolve::catalog;
    use kmsolve::Rationals;

    #[test]
    fn field_names() {
        assert_eq!(parse_field("QQ").unwrap(), FieldSpec::Rationals);
        assert_eq!(parse_field("GF(101)").unwrap(), FieldSpec::PrimeField(101));
        assert_eq!(parse_field("Fp:7").unwrap(), FieldSpec::PrimeField(7));
        assert_eq!(parse_field("12").unwrap_err().code, 1);
        let f: FieldJson = serde_json::from_str(r#"{"Fp": 101}"#).unwrap();
        assert_eq!(f.spec().unwrap(), FieldSpec::PrimeField(101));
    }

    #[test]
    fn catalog_round_trip() {
        let inst = catalog::duffing_default(Rationals);
        let file = SystemFile::from_instance(&inst);
        let text = serde_json::to_string(&file).unwrap();
        let back = SystemFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        let sys = back.system(Rationals).unwrap();
        assert_eq!(sys.equations().len(), 2);
        for (a, b) in sys.equations().iter().zip(inst.sys.equations()) {
            assert_eq!(a.poly, b.poly);
            let sorted = |f: &CoefficientForm<Rationals>| {
                let mut t = f.terms.clone();
                t.sort_by(|x, y| x.0.cmp(&y.0));
                t
            };
            assert_eq!(sorted(&a.coeff_form), sorted(&b.coeff_form));
        }
    }

    #[test]
    fn coefficient_equations() {
        let text = r#"{"field":"QQ","vars":["t1","t2"],"weight":[0,-1],
            "phi":["1","t1","t2","t1*(t1^2+t2^2)","t2*(t1^2+t2^2)"],
            "equations":[{"degree":1,"coeffs":[{"alpha":[1,0,0,0,0],"c":1},{"alpha":[0,0,0,1,0],"c":"7/2"}]}]}"#;
        let sys = SystemFile::from_json(text).unwrap().system(Rationals).unwrap();
        assert_eq!(sys.equations()[0].poly.to_string(), "7/2*t1^3 + 7/2*t1*t2^2 + 1");
    }

    #[test]
    fn bad_files() {
        let e = SystemFile::from_json(r#"{"field":"QQ","vars":["t1"],"weight":[0,1],"phi":["1"]}"#).unwrap_err();
        assert_eq!(e.code, 1);
        let e = SystemFile::from_json("{").unwrap_err();
        assert_eq!(e.code, 1);
    }
}
