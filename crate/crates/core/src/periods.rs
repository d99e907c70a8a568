//! Period sequence of f_X (constant terms of its powers) and the closed-form
//! regularized quantum period coefficients it is checked against.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::model::CiModel;

pub const DEFAULT_TERM_CAP: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodError {
    #[error("term cap {cap} exceeded at order {order} ({terms} terms)")]
    TermCap { order: usize, terms: usize, cap: usize },
}

/// Constant terms of f^0, ..., f^max_order. Powers are built incrementally;
/// the top power is never materialized since only its constant term is read.
pub fn period_sequence_of(
    f: &LaurentPoly,
    max_order: usize,
    cap: usize,
) -> Result<Vec<Rational>, PeriodError> {
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(Rational::from(1));
    if max_order == 0 {
        return Ok(out);
    }
    let negated: Vec<(Vec<i32>, Rational)> = f
        .terms()
        .map(|(e, c)| (e.as_slice().iter().map(|x| -x).collect(), c.clone()))
        .collect();
    let mut power = LaurentPoly::one(f.nvars());
    for m in 1..=max_order {
        // ct(f^m) = sum over terms c*z^e of f of coeff(f^{m-1}, -e) * c
        let mut ct = Rational::new();
        for (neg, c) in &negated {
            let a = power.coeff(neg);
            if a != 0 {
                ct += a * c;
            }
        }
        out.push(ct);
        if m < max_order {
            power = power.mul(f).expect("same nvars");
            if power.num_terms() > cap {
                return Err(PeriodError::TermCap {
                    order: m + 1,
                    terms: power.num_terms(),
                    cap,
                });
            }
        }
    }
    Ok(out)
}

pub fn period_sequence(model: &CiModel, max_order: usize, cap: usize) -> Result<Vec<Rational>, PeriodError> {
    period_sequence_of(&model.build_givental(), max_order, cap)
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// a_m = 0 unless m = i_X l, where a_m = (i_X l)! prod_i (d_i l)! / (l!)^{N+1}.
pub fn givental_coefficients(model: &CiModel, max_order: usize) -> Vec<Rational> {
    let ix = model.index() as usize;
    (0..=max_order)
        .map(|m| {
            if m % ix != 0 {
                return Rational::new();
            }
            let l = (m / ix) as u32;
            let mut num = factorial(model.index() * l);
            for &d in model.degrees() {
                num *= factorial(d * l);
            }
            let den = factorial(l).pow(model.ambient() + 1);
            Rational::from((num, den))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodRow {
    pub m: usize,
    pub constant_term: String,
    pub closed_form: String,
    pub equal: bool,
}

#[derive(Debug, Clone)]
pub struct PeriodReport {
    pub model: CiModel,
    pub max_order: usize,
    pub constant_terms: Vec<Rational>,
    pub closed_form: Vec<Rational>,
    pub matched: bool,
    pub first_mismatch: Option<usize>,
}

impl PeriodReport {
    pub fn rows(&self) -> Vec<PeriodRow> {
        self.constant_terms
            .iter()
            .zip(&self.closed_form)
            .enumerate()
            .map(|(m, (a, b))| PeriodRow {
                m,
                constant_term: a.to_string(),
                closed_form: b.to_string(),
                equal: a == b,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,constant_term,closed_form,equal\n");
        for r in self.rows() {
            s.push_str(&format!("{},{},{},{}\n", r.m, r.constant_term, r.closed_form, r.equal));
        }
        s
    }

    /// Entries vanish off multiples of the index and are nonnegative integers.
    pub fn divisibility_and_integrality_hold(&self) -> bool {
        let ix = self.model.index() as usize;
        self.constant_terms.iter().enumerate().all(|(m, c)| {
            (m % ix == 0 || *c == 0) && *c.denom() == 1 && *c >= 0
        })
    }
}

pub fn compare_periods(model: &CiModel, max_order: usize, cap: usize) -> Result<PeriodReport, PeriodError> {
    let constant_terms = period_sequence(model, max_order, cap)?;
    let closed_form = givental_coefficients(model, max_order);
    let first_mismatch = constant_terms
        .iter()
        .zip(&closed_form)
        .position(|(a, b)| a != b);
    Ok(PeriodReport {
        model: model.clone(),
        max_order,
        constant_terms,
        closed_form,
        matched: first_mismatch.is_none(),
        first_mismatch,
    })
}
