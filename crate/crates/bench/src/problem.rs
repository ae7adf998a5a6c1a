//! JSON problem files. Dense arrays are stored as base64 of little-endian
//! `f64` bytes so that a round trip is bit-exact.

use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use simplexopt::{ChebyshevObjective, Objective, QuadraticObjective, SimplexPoint};

use crate::BenchError;

pub const FORMAT: &str = "simplexopt-problem";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedArray {
    pub shape: Vec<usize>,
    pub data: String,
}

impl EncodedArray {
    pub fn from_vec(v: &[f64]) -> Self {
        EncodedArray {
            shape: vec![v.len()],
            data: encode(v),
        }
    }

    pub fn from_matrix(a: &Array2<f64>) -> Self {
        let flat: Vec<f64> = a.iter().copied().collect();
        EncodedArray {
            shape: vec![a.nrows(), a.ncols()],
            data: encode(&flat),
        }
    }

    pub fn to_vec(&self) -> Result<Vec<f64>, BenchError> {
        if self.shape.len() != 1 {
            return Err(BenchError::Format(format!(
                "expected a vector, got shape {:?}",
                self.shape
            )));
        }
        decode(&self.data, self.shape[0])
    }

    pub fn to_matrix(&self) -> Result<Array2<f64>, BenchError> {
        let [rows, cols] = self.shape[..] else {
            return Err(BenchError::Format(format!(
                "expected a matrix, got shape {:?}",
                self.shape
            )));
        };
        let flat = decode(&self.data, rows * cols)?;
        Array2::from_shape_vec((rows, cols), flat).map_err(|e| BenchError::Format(e.to_string()))
    }
}

fn encode(v: &[f64]) -> String {
    let bytes: Vec<u8> = v.iter().flat_map(|x| x.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn decode(s: &str, len: usize) -> Result<Vec<f64>, BenchError> {
    let bytes = STANDARD
        .decode(s)
        .map_err(|e| BenchError::Format(format!("bad base64: {e}")))?;
    if bytes.len() != 8 * len {
        return Err(BenchError::Format(format!(
            "expected {} bytes, got {}",
            8 * len,
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemData {
    Quadratic {
        n: usize,
        q: EncodedArray,
        c: EncodedArray,
    },
    Chebyshev {
        m: usize,
        n: usize,
        a: EncodedArray,
        b: EncodedArray,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMetadata {
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accepted_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub planted: Option<EncodedArray>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub columns: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub data: ProblemData,
    pub metadata: GeneratorMetadata,
}

/// Decoded problem ready for the solver.
#[derive(Debug, Clone)]
pub enum Problem {
    Quadratic(QuadraticObjective),
    Chebyshev(ChebyshevObjective),
}

impl Problem {
    pub fn objective(&self) -> &dyn Objective {
        match self {
            Problem::Quadratic(q) => q,
            Problem::Chebyshev(c) => c,
        }
    }

    pub fn dim(&self) -> usize {
        self.objective().dim()
    }

    pub fn family(&self) -> &'static str {
        match self {
            Problem::Quadratic(_) => "quadratic",
            Problem::Chebyshev(_) => "chebyshev",
        }
    }
}

impl ProblemFile {
    pub fn quadratic(obj: &QuadraticObjective, metadata: GeneratorMetadata) -> Self {
        ProblemFile {
            format: FORMAT.into(),
            version: VERSION,
            data: ProblemData::Quadratic {
                n: obj.dim(),
                q: EncodedArray::from_matrix(obj.q()),
                c: EncodedArray::from_vec(obj.c()),
            },
            metadata,
        }
    }

    pub fn chebyshev(obj: &ChebyshevObjective, metadata: GeneratorMetadata) -> Self {
        ProblemFile {
            format: FORMAT.into(),
            version: VERSION,
            data: ProblemData::Chebyshev {
                m: obj.sample_dim(),
                n: obj.dim(),
                a: EncodedArray::from_matrix(obj.a()),
                b: EncodedArray::from_vec(obj.b()),
            },
            metadata,
        }
    }

    /// Rebuilds the objective; the Lipschitz estimate is reseeded from the
    /// generator seed so it matches the in-memory original.
    pub fn to_problem(&self) -> Result<Problem, BenchError> {
        if self.format != FORMAT || self.version != VERSION {
            return Err(BenchError::Format(format!(
                "unsupported format {} v{}",
                self.format, self.version
            )));
        }
        let seed = self
            .metadata
            .accepted_seed
            .or(self.metadata.seed)
            .unwrap_or(0);
        match &self.data {
            ProblemData::Quadratic { n, q, c } => {
                let q = q.to_matrix()?;
                let c = c.to_vec()?;
                if q.nrows() != *n || c.len() != *n {
                    return Err(BenchError::Format(format!(
                        "declared n={n} disagrees with the arrays"
                    )));
                }
                Ok(Problem::Quadratic(QuadraticObjective::with_seed(
                    q, c, seed,
                )?))
            }
            ProblemData::Chebyshev { m, n, a, b } => {
                let a = a.to_matrix()?;
                if a.dim() != (*m, *n) {
                    return Err(BenchError::Format(format!(
                        "declared {m}x{n} disagrees with A {:?}",
                        a.dim()
                    )));
                }
                Ok(Problem::Chebyshev(ChebyshevObjective::from_parts(
                    a,
                    b.to_vec()?,
                    seed,
                )?))
            }
        }
    }

    pub fn planted(&self) -> Result<Option<SimplexPoint>, BenchError> {
        match &self.metadata.planted {
            Some(p) => Ok(Some(SimplexPoint::new(p.to_vec()?)?)),
            None => Ok(None),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), BenchError> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, BenchError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrays_round_trip_bitwise() {
        let v = vec![0.1, -0.0, f64::MIN_POSITIVE, 1e300, -3.5];
        let back = EncodedArray::from_vec(&v).to_vec().unwrap();
        assert!(v.iter().zip(&back).all(|(a, b)| a.to_bits() == b.to_bits()));
        let m = Array2::from_shape_fn((2, 3), |(i, j)| i as f64 / 3.0 + j as f64);
        assert_eq!(EncodedArray::from_matrix(&m).to_matrix().unwrap(), m);
    }

    #[test]
    fn corrupt_payloads_are_rejected() {
        let mut e = EncodedArray::from_vec(&[1.0, 2.0]);
        e.shape = vec![3];
        assert!(e.to_vec().is_err());
        e.data = "***".into();
        assert!(e.to_vec().is_err());
        assert!(EncodedArray::from_vec(&[1.0]).to_matrix().is_err());
    }

    #[test]
    fn envelope_is_tagged_by_kind() {
        let obj = ChebyshevObjective::new(Array2::eye(2)).unwrap();
        let file = ProblemFile::chebyshev(&obj, GeneratorMetadata::default());
        let json: serde_json::Value = serde_json::to_value(&file).unwrap();
        assert_eq!(json["kind"], "chebyshev");
        assert_eq!(json["m"], 2);
        assert_eq!(json["format"], FORMAT);
    }
}
