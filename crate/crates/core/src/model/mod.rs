//! Complete-intersection descriptors and the Givental-type Laurent polynomial.

pub mod hodge;

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::numeric::{self, ComplexBig, Precision};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("ambient dimension must be at least 1, got {0}")]
    AmbientTooSmall(u32),
    #[error("degree {0} rejected: every degree must be at least 2")]
    DegenerateDegree(u32),
    #[error("not Fano: index {0} <= 0")]
    NotFano(i64),
    #[error("dimension {0} < 1 (too many equations for the ambient space)")]
    DimensionTooSmall(i64),
    #[error("h^(1,n-1) needs dimension >= 2, got {0}")]
    HodgeDimension(u32),
    #[error("bad descriptor `{descriptor}`: offending token `{token}`")]
    Syntax { descriptor: String, token: String },
}

/// A Fano complete intersection of the given degrees in P^ambient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiModel {
    degrees: Vec<u32>,
    ambient: u32,
    dim: u32,
    index: u32,
    dconst: Integer,
    var_names: Vec<String>,
}

impl CiModel {
    pub fn new(degrees: &[u32], ambient: u32) -> Result<Self, ModelError> {
        if ambient < 1 {
            return Err(ModelError::AmbientTooSmall(ambient));
        }
        if let Some(&d) = degrees.iter().find(|&&d| d < 2) {
            return Err(ModelError::DegenerateDegree(d));
        }
        let dim = ambient as i64 - degrees.len() as i64;
        if dim < 1 {
            return Err(ModelError::DimensionTooSmall(dim));
        }
        let index = ambient as i64 + 1 - degrees.iter().map(|&d| d as i64).sum::<i64>();
        if index < 1 {
            return Err(ModelError::NotFano(index));
        }
        let dconst = degrees
            .iter()
            .map(|&d| Integer::from(Integer::u_pow_u(d, d)))
            .product();
        let mut var_names = Vec::new();
        for (i, &d) in degrees.iter().enumerate() {
            for j in 1..d {
                var_names.push(format!("x{}_{}", i + 1, j));
            }
        }
        for s in 1..index {
            var_names.push(format!("y{s}"));
        }
        debug_assert_eq!(var_names.len() as i64, dim);
        Ok(CiModel {
            degrees: degrees.to_vec(),
            ambient,
            dim: dim as u32,
            index: index as u32,
            dconst,
            var_names,
        })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn ambient(&self) -> u32 {
        self.ambient
    }

    /// Number of hypersurfaces k.
    pub fn codim(&self) -> usize {
        self.degrees.len()
    }

    /// Dimension n = N - k.
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Fano index i_X = N + 1 - sum d_i.
    pub fn index(&self) -> u32 {
        self.index
    }

    /// d = prod d_i^{d_i}.
    pub fn dconst(&self) -> &Integer {
        &self.dconst
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn is_projective_space(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Index ranges of the x-variables, one range per degree.
    pub fn x_blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.degrees
            .iter()
            .map(|&d| {
                let r = start..start + (d as usize - 1);
                start = r.end;
                r
            })
            .collect()
    }

    /// Index range of the y-variables.
    pub fn y_block(&self) -> std::ops::Range<usize> {
        let start = self.degrees.iter().map(|&d| d as usize - 1).sum();
        start..self.dim as usize
    }

    /// n = 1 models and projective spaces are analytic baselines rather
    /// than genuine complete intersections of dimension >= 2.
    pub fn is_baseline(&self) -> bool {
        self.dim == 1 || self.degrees.is_empty()
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }

    /// f_X = prod_i (x_{i,1} + ... + x_{i,d_i-1} + 1)^{d_i} / (prod x_{i,j} prod y_s) + y_1 + ... + y_{i_X-1}.
    pub fn build_givental(&self) -> LaurentPoly {
        let n = self.dim as usize;
        let names = self.var_names.clone();
        let mut numerator = LaurentPoly::one(n);
        for (block, &d) in self.x_blocks().iter().zip(&self.degrees) {
            let mut linear = LaurentPoly::one(n);
            for v in block.clone() {
                linear = linear.add(&LaurentPoly::var(n, v)).expect("same nvars");
            }
            numerator = numerator.mul(&linear.pow(d)).expect("same nvars");
        }
        let inv_all = LaurentPoly::monomial(vec![-1; n], 1);
        let mut f = numerator.mul(&inv_all).expect("same nvars");
        for v in self.y_block() {
            f = f.add(&LaurentPoly::var(n, v)).expect("same nvars");
        }
        f.with_names(names).expect("name count equals dimension")
    }

    /// Expected critical values i_X * d^{1/i_X} * exp(2 pi i r / i_X), r = 0..i_X-1.
    pub fn expected_critical_values(&self, prec: Precision) -> Vec<ComplexBig> {
        let alpha = numeric::real_root(&self.dconst, self.index, prec);
        let lambda0 = alpha * self.index;
        (0..self.index)
            .map(|r| numeric::root_of_unity(r, self.index, prec) * &lambda0)
            .collect()
    }

    pub fn hodge_h1nm1(&self) -> Result<Integer, ModelError> {
        if self.dim < 2 {
            return Err(ModelError::HodgeDimension(self.dim));
        }
        Ok(hodge::h1_nm1(&self.degrees, self.ambient))
    }

    pub fn invariants(&self, prec: Precision) -> ModelInvariants {
        ModelInvariants {
            dim: self.dim,
            index: self.index,
            dconst: self.dconst.clone(),
            expected_critical_values: self.expected_critical_values(prec),
            expected_exceptional_count: self.index,
            h1nm1: self.hodge_h1nm1().ok(),
        }
    }

    /// The positive real root alpha = d^{1/i_X} as an exact rational when d is a perfect power.
    pub fn alpha_exact(&self) -> Option<Rational> {
        let r = Integer::from(self.dconst.root_ref(self.index));
        (r.clone().pow(self.index) == self.dconst).then(|| Rational::from(r))
    }
}

impl fmt::Display for CiModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degs: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        write!(f, "{}@{}", degs.join(","), self.ambient)
    }
}

/// Parses `d1,...,dk@N`, or `@N` for projective space.
impl FromStr for CiModel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let syntax = |token: &str| ModelError::Syntax {
            descriptor: s.to_string(),
            token: token.to_string(),
        };
        let (degs, amb) = s.split_once('@').ok_or_else(|| syntax(s))?;
        let ambient: u32 = amb.trim().parse().map_err(|_| syntax(amb))?;
        let degrees = if degs.trim().is_empty() {
            Vec::new()
        } else {
            degs.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| syntax(t)))
                .collect::<Result<Vec<_>, _>>()?
        };
        CiModel::new(&degrees, ambient)
    }
}

impl Serialize for CiModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CiModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone)]
pub struct ModelInvariants {
    pub dim: u32,
    pub index: u32,
    pub dconst: Integer,
    pub expected_critical_values: Vec<ComplexBig>,
    pub expected_exceptional_count: u32,
    /// `None` for curves.
    pub h1nm1: Option<Integer>,
}
