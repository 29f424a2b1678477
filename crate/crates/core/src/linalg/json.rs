//! JSON encodings: matrices as `{"dim", "re", "im"}`, vectors as `{"re", "im"}`.

use serde::{Deserialize, Serialize};

use super::hermitian::HermitianMatrix;
use super::matrix::{c, ComplexMatrix, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VectorJson {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Option<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.rows();
        Self {
            dim: n,
            re: (0..n).map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect()).collect(),
            im: Some((0..n).map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect()).collect()),
        }
    }

    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        Self::from_matrix(h.matrix())
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.dim;
        let bad = |what: &str| Error::InvalidArgument(format!("matrix JSON: {what} for dim {n}"));
        if self.re.len() != n || self.re.iter().any(|r| r.len() != n) {
            return Err(bad("'re' has the wrong shape"));
        }
        if let Some(im) = &self.im {
            if im.len() != n || im.iter().any(|r| r.len() != n) {
                return Err(bad("'im' has the wrong shape"));
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
                data.push(c(self.re[i][j], im));
            }
        }
        ComplexMatrix::from_vec(n, n, data)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_matrix()?)
    }
}

impl VectorJson {
    pub fn from_vector(v: &[C64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: Some(v.iter().map(|z| z.im).collect()),
        }
    }

    pub fn to_vector(&self) -> Result<Vec<C64>> {
        if let Some(im) = &self.im {
            if im.len() != self.re.len() {
                return Err(Error::InvalidArgument(
                    "vector JSON: 're' and 'im' lengths differ".into(),
                ));
            }
        }
        let v: Vec<C64> = self
            .re
            .iter()
            .enumerate()
            .map(|(k, &x)| c(x, self.im.as_ref().map_or(0.0, |m| m[k])))
            .collect();
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(v)
    }
}

/// Serde adapter so Hermitian fields can be written as `#[serde(with = "...")]`.
pub mod hermitian_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[HermitianMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        let j: Vec<MatrixJson> = v.iter().map(MatrixJson::from_hermitian).collect();
        j.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<HermitianMatrix>, D::Error> {
        let j = Vec::<MatrixJson>::deserialize(d)?;
        j.iter()
            .map(|m| m.to_hermitian().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod hermitian_one {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &HermitianMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_hermitian(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<HermitianMatrix, D::Error> {
        MatrixJson::deserialize(d)?
            .to_hermitian()
            .map_err(serde::de::Error::custom)
    }
}
