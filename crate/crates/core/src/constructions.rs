//! Explicit MRD codes that are not generalized Gabidulin codes.
//!
//! Length 4 (`construct4`):
//!
//! ```text
//! [ 1  0  α   α² ]
//! [ 0  1  α²  γα ]
//! ```
//!
//! Length 5 (`construct5`):
//!
//! ```text
//! [ 1  0  α   α²  α³ ]
//! [ 0  1  α²  α⁴  γα ]
//! ```
//!
//! with `α` the primitive element of the field and `γ ∈ F_q` subject to the
//! conditions checked by [`validate_gamma`]. Parameters below the degree for
//! which the MRD property holds unconditionally (`m = 4`, resp. `5 ≤ m ≤ 7`)
//! are accepted only after the minor criterion confirms the code is MRD.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{CodeError, RankCode};
use crate::criteria::{self, CriteriaError, MrdVerdict};
use crate::gf::{coprime_steps, is_quadratic_residue_base, FieldOps, FieldSpec, Fq, Fqm, GfError};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("the length-4 construction needs odd q")]
    EvenCharacteristic,
    #[error("extension degree {m} is below the minimum {min} for this construction")]
    DegreeTooSmall { m: u32, min: u32 },
    #[error("gamma = {} rejected: {}", .0.gamma.0, .0.summary())]
    GammaRejected(Box<GammaCondition>),
    #[error("minor criterion found a vanishing minor; the code is not MRD")]
    MrdCheckFailed(Box<MrdVerdict>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    /// `n = 4`, `k = 2`.
    Construction4,
    /// `n = 5`, `k = 2`.
    Construction5,
}

/// Sign of the middle term `α^{[s]+1}` in the length-5 exclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiddleSign {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedValue {
    pub s: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<MiddleSign>,
    pub value: Fqm,
    /// Values outside `F_q` can never equal `γ`.
    pub vacuous: bool,
    pub collides: bool,
}

/// Result of checking `γ` against a construction's conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaCondition {
    pub kind: ConstructionKind,
    pub gamma: Fq,
    pub nonzero: bool,
    pub qnr_required: bool,
    /// `None` in characteristic 2.
    pub quadratic_residue: Option<bool>,
    /// Informational: `γ` is a non-square in `F_{q^m}`.
    pub qnr_in_extension: Option<bool>,
    pub excluded: Vec<ExcludedValue>,
    pub passes: bool,
}

impl GammaCondition {
    /// Human-readable list of violated conditions.
    pub fn summary(&self) -> String {
        let mut reasons = Vec::new();
        if !self.nonzero {
            reasons.push("gamma is zero".to_string());
        }
        if self.qnr_required {
            match self.quadratic_residue {
                Some(true) => reasons.push("gamma is a quadratic residue in F_q".to_string()),
                None => reasons.push("no quadratic non-residue exists for q = 2".to_string()),
                Some(false) => {}
            }
        }
        for e in self.excluded.iter().filter(|e| e.collides) {
            let sign = match e.sign {
                Some(MiddleSign::Plus) => " (+ variant)",
                Some(MiddleSign::Minus) => " (- variant)",
                None => "",
            };
            reasons.push(format!("gamma equals the excluded value for s = {}{sign}", e.s));
        }
        if reasons.is_empty() {
            "all conditions hold".to_string()
        } else {
            reasons.join("; ")
        }
    }
}

/// Evaluates every condition on `γ` for the given construction. Never fails;
/// out-of-range `γ` is reduced mod `q`.
pub fn validate_gamma(kind: ConstructionKind, field: &FieldSpec, gamma: Fq) -> GammaCondition {
    let q = field.q();
    let gamma = Fq(gamma.0 % q);
    let g = field.embed(gamma);
    let a = field.alpha();
    let nonzero = gamma.0 != 0;
    let quadratic_residue = match is_quadratic_residue_base(gamma, q) {
        Ok(r) => Some(r),
        Err(GfError::ZeroInput) => Some(true),
        Err(_) => None,
    };
    let qnr_in_extension = (q != 2 && nonzero).then(|| {
        let half = u64::from(field.order() - 1) / 2;
        field.pow(g, half) != Fqm::ONE
    });

    let mut excluded = Vec::new();
    for s in coprime_steps(field.m()) {
        let as_ = field.frobenius(a, s);
        let sum = field.add(as_, a);
        match kind {
            ConstructionKind::Construction4 => {
                excluded.push(excluded_value(field, s, None, field.mul(sum, sum), g));
            }
            ConstructionKind::Construction5 => {
                let sq_s = field.mul(as_, as_);
                let cross = field.mul(as_, a);
                let sq = field.mul(a, a);
                let plus = field.add(field.add(sq_s, cross), sq);
                let minus = field.add(field.sub(sq_s, cross), sq);
                excluded.push(excluded_value(field, s, Some(MiddleSign::Plus), field.mul(sum, plus), g));
                excluded.push(excluded_value(field, s, Some(MiddleSign::Minus), field.mul(sum, minus), g));
            }
        }
    }

    let qnr_required = kind == ConstructionKind::Construction4;
    let qnr_ok = !qnr_required || quadratic_residue == Some(false);
    let passes = nonzero && qnr_ok && excluded.iter().all(|e| !e.collides);
    GammaCondition { kind, gamma, nonzero, qnr_required, quadratic_residue, qnr_in_extension, excluded, passes }
}

fn excluded_value(field: &FieldSpec, s: u32, sign: Option<MiddleSign>, value: Fqm, gamma: Fqm) -> ExcludedValue {
    ExcludedValue { s, sign, value, vacuous: !field.in_base_field(value), collides: value == gamma }
}

fn check_gamma(kind: ConstructionKind, field: &FieldSpec, gamma: Fq) -> Result<(), ConstructionError> {
    field.base().elem(gamma.0)?;
    let cond = validate_gamma(kind, field, gamma);
    if cond.passes {
        Ok(())
    } else {
        Err(ConstructionError::GammaRejected(Box::new(cond)))
    }
}

fn require_mrd(code: &RankCode) -> Result<(), ConstructionError> {
    let v = criteria::is_mrd_minor(code)?;
    if v.is_mrd {
        Ok(())
    } else {
        Err(ConstructionError::MrdCheckFailed(Box::new(v)))
    }
}

/// Generator `[[1, 0, α, α²], [0, 1, α², γα]]` without any checks.
pub fn construction4_generator(field: &FieldSpec, gamma: Fq) -> Matrix<Fqm> {
    let a = field.alpha();
    let a2 = field.mul(a, a);
    Matrix::from_rows(vec![vec![Fqm::ONE, Fqm::ZERO, a, a2], vec![Fqm::ZERO, Fqm::ONE, a2, field.scale(a, gamma)]])
        .expect("rectangular")
}

/// Generator `[[1, 0, α, α², α³], [0, 1, α², α⁴, γα]]` without any checks.
pub fn construction5_generator(field: &FieldSpec, gamma: Fq) -> Matrix<Fqm> {
    let p = |i| field.alpha_pow(i);
    Matrix::from_rows(vec![
        vec![Fqm::ONE, Fqm::ZERO, p(1), p(2), p(3)],
        vec![Fqm::ZERO, Fqm::ONE, p(2), p(4), field.scale(p(1), gamma)],
    ])
    .expect("rectangular")
}

/// Length-4, dimension-2 MRD code that is not generalized Gabidulin.
pub fn construct4(field: Arc<FieldSpec>, gamma: Fq) -> Result<RankCode, ConstructionError> {
    if field.q() == 2 {
        return Err(ConstructionError::EvenCharacteristic);
    }
    if field.m() < 4 {
        return Err(ConstructionError::DegreeTooSmall { m: field.m(), min: 4 });
    }
    check_gamma(ConstructionKind::Construction4, &field, gamma)?;
    let g = construction4_generator(&field, gamma);
    let code = RankCode::new(field.clone(), g)?;
    if field.m() == 4 {
        require_mrd(&code)?;
    }
    Ok(code)
}

/// Length-5, dimension-2 MRD code that is not generalized Gabidulin.
pub fn construct5(field: Arc<FieldSpec>, gamma: Fq) -> Result<RankCode, ConstructionError> {
    if field.m() < 5 {
        return Err(ConstructionError::DegreeTooSmall { m: field.m(), min: 5 });
    }
    check_gamma(ConstructionKind::Construction5, &field, gamma)?;
    let g = construction5_generator(&field, gamma);
    let code = RankCode::new(field.clone(), g)?;
    if field.m() <= 7 {
        require_mrd(&code)?;
    }
    Ok(code)
}

pub fn construct(kind: ConstructionKind, field: Arc<FieldSpec>, gamma: Fq) -> Result<RankCode, ConstructionError> {
    match kind {
        ConstructionKind::Construction4 => construct4(field, gamma),
        ConstructionKind::Construction5 => construct5(field, gamma),
    }
}

/// A reference code with the verdicts it is known to have.
#[derive(Clone, Debug)]
pub struct BuiltinExample {
    pub name: &'static str,
    pub kind: ConstructionKind,
    pub gamma: Fq,
    pub code: RankCode,
    pub expected_mrd: bool,
    pub expected_gabidulin: bool,
}

struct ExampleParams {
    name: &'static str,
    kind: ConstructionKind,
    q: u32,
    m: u32,
    modulus: &'static [u32],
    gamma: u32,
}

const EXAMPLES: [ExampleParams; 4] = [
    // x^5 + 2x^2 + x + 1
    ExampleParams {
        name: "q3-m5-len4",
        kind: ConstructionKind::Construction4,
        q: 3,
        m: 5,
        modulus: &[1, 1, 2, 0, 0, 1],
        gamma: 2,
    },
    // x^4 - x^3 - 1
    ExampleParams {
        name: "q3-m4-len4",
        kind: ConstructionKind::Construction4,
        q: 3,
        m: 4,
        modulus: &[2, 0, 0, 2, 1],
        gamma: 2,
    },
    // x^4 + x^3 + x^2 + x + 3
    ExampleParams {
        name: "q5-m4-len4",
        kind: ConstructionKind::Construction4,
        q: 5,
        m: 4,
        modulus: &[3, 1, 1, 1, 1],
        gamma: 2,
    },
    // x^8 + x^4 + x^3 + x^2 + 1
    ExampleParams {
        name: "q2-m8-len5",
        kind: ConstructionKind::Construction5,
        q: 2,
        m: 8,
        modulus: &[1, 0, 1, 1, 1, 0, 0, 0, 1],
        gamma: 1,
    },
];

/// The four reference non-Gabidulin MRD codes.
pub fn builtin_examples() -> Result<Vec<BuiltinExample>, ConstructionError> {
    EXAMPLES
        .iter()
        .map(|p| {
            let field = Arc::new(FieldSpec::new(p.q, p.m, p.modulus)?);
            let code = construct(p.kind, field, Fq(p.gamma))?;
            Ok(BuiltinExample {
                name: p.name,
                kind: p.kind,
                gamma: Fq(p.gamma),
                code,
                expected_mrd: true,
                expected_gabidulin: false,
            })
        })
        .collect()
}

pub fn builtin_example(name: &str) -> Result<Option<BuiltinExample>, ConstructionError> {
    Ok(builtin_examples()?.into_iter().find(|e| e.name == name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::detect_gabidulin;

    fn field(q: u32, m: u32, modulus: &[u32]) -> Arc<FieldSpec> {
        Arc::new(FieldSpec::new(q, m, modulus).unwrap())
    }

    #[test]
    fn gamma_dispatch_q3_m5() {
        let f = field(3, 5, &[1, 1, 2, 0, 0, 1]);
        let one = validate_gamma(ConstructionKind::Construction4, &f, Fq(1));
        assert!(!one.passes);
        assert_eq!(one.quadratic_residue, Some(true));
        let two = validate_gamma(ConstructionKind::Construction4, &f, Fq(2));
        assert!(two.passes, "{}", two.summary());
        assert_eq!(two.excluded.len(), 4);
        // m odd: a non-square of F_3 stays a non-square in F_{3^5}
        assert_eq!(two.qnr_in_extension, Some(true));
        assert!(matches!(construct4(f.clone(), Fq(1)), Err(ConstructionError::GammaRejected(_))));
        let zero = validate_gamma(ConstructionKind::Construction4, &f, Fq(0));
        assert!(!zero.passes);
    }

    #[test]
    fn gamma_q2_m8_length5() {
        let f = field(2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]);
        let c = validate_gamma(ConstructionKind::Construction5, &f, Fq(1));
        assert!(c.passes, "{}", c.summary());
        let steps: Vec<u32> = c.excluded.iter().map(|e| e.s).collect();
        assert_eq!(steps, vec![1, 1, 3, 3, 5, 5, 7, 7]);
        for pair in c.excluded.chunks(2) {
            // characteristic 2: both sign variants coincide
            assert_eq!(pair[0].value, pair[1].value);
        }
        let zero = validate_gamma(ConstructionKind::Construction5, &f, Fq(0));
        assert!(!zero.passes);
        assert!(matches!(construct5(f, Fq(0)), Err(ConstructionError::GammaRejected(_))));
    }

    fn primitive_fields(q: u32, m: u32) -> Vec<Arc<FieldSpec>> {
        let total = q.pow(m);
        (0..total)
            .filter_map(|mut low| {
                let mut coeffs = Vec::new();
                for _ in 0..m {
                    coeffs.push(low % q);
                    low /= q;
                }
                coeffs.push(1);
                FieldSpec::new(q, m, &coeffs).ok().map(Arc::new)
            })
            .collect()
    }

    #[test]
    fn no_excluded_value_lands_in_the_base_field_at_small_parameters() {
        // Measured, not assumed: with α primitive none of the excluded values
        // is an element of F_q here, so every exclusion is vacuous.
        for (q, m) in [(3u32, 4u32), (5, 4), (3, 5)] {
            for f in primitive_fields(q, m) {
                for kind in [ConstructionKind::Construction4, ConstructionKind::Construction5] {
                    let c = validate_gamma(kind, &f, Fq(1));
                    assert!(c.excluded.iter().all(|e| e.vacuous), "q={q} m={m} {:?}", f.modulus());
                }
            }
        }
    }

    #[test]
    fn accepted_gamma_gives_trivial_frobenius_intersections() {
        for f in primitive_fields(3, 4).into_iter().chain(primitive_fields(3, 5)) {
            let code = RankCode::new(f.clone(), construction4_generator(&f, Fq(2))).unwrap();
            assert!(criteria::frobenius_intersection_dims(&code).values().all(|&d| d == 0));
        }
    }

    #[test]
    fn construction_preconditions() {
        let f2 = Arc::new(FieldSpec::with_default_modulus(2, 4).unwrap());
        assert_eq!(construct4(f2, Fq(1)).unwrap_err(), ConstructionError::EvenCharacteristic);
        let f33 = Arc::new(FieldSpec::with_default_modulus(3, 3).unwrap());
        assert_eq!(construct4(f33.clone(), Fq(2)).unwrap_err(), ConstructionError::DegreeTooSmall { m: 3, min: 4 });
        assert_eq!(construct5(f33, Fq(2)).unwrap_err(), ConstructionError::DegreeTooSmall { m: 3, min: 5 });
    }

    #[test]
    fn builtins_are_mrd_and_not_gabidulin() {
        let ex = builtin_examples().unwrap();
        assert_eq!(ex.len(), 4);
        for e in &ex {
            let v = criteria::is_mrd_minor(&e.code).unwrap();
            assert!(v.is_mrd, "{}", e.name);
            let g = detect_gabidulin(&e.code, true).unwrap();
            assert!(!g.is_generalized_gabidulin, "{}: {:?}", e.name, g.dims);
        }
    }
}
