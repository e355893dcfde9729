//! JSON and CSV encodings.
//!
//! A complex number is `[re, im]` and a matrix is an array of rows. Labels
//! use their natural JSON form (number, string or two-element array).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instruments::Instrument;
use crate::linalg::{c, ComplexMatrix};
use crate::measurements::{Observable, Povm};
use crate::models::{
    exp_model_mechanical, exp_model_symmetric, exp_model_unitary, great_circle_model, spin_half_longitude_model,
    ParametricModel,
};
use crate::states::{bloch_to_density, pure, BlochVector, DensityMatrix, StateVector};
use crate::tomography::Channel;
use crate::Label;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    m.to_rows().into_iter().map(|row| row.into_iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    if rows.is_empty() {
        return Err(Error::Format("empty matrix".into()));
    }
    let cols = rows[0].len();
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("matrix rows must be nonempty and of equal length".into()));
    }
    let data = rows.iter().flatten().map(|z| c(z[0], z[1])).collect();
    ComplexMatrix::from_vec(rows.len(), cols, data)
}

fn vector_from_json(v: &[ComplexJson]) -> Vec<num_complex::Complex64> {
    v.iter().map(|z| c(z[0], z[1])).collect()
}

/// `{"kind": "density" | "pure" | "bloch", "data": ...}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum StateFile {
    Density(MatrixJson),
    Pure(Vec<ComplexJson>),
    Bloch([f64; 3]),
}

impl StateFile {
    pub fn to_state(&self) -> Result<DensityMatrix> {
        match self {
            StateFile::Density(m) => DensityMatrix::new(matrix_from_json(m)?),
            StateFile::Pure(v) => Ok(pure(&StateVector::new(vector_from_json(v))?)),
            StateFile::Bloch(u) => bloch_to_density(BlochVector(*u)),
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        StateFile::Density(matrix_to_json(rho.matrix()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmFile {
    pub labels: Vec<Label>,
    pub elements: Vec<MatrixJson>,
}

impl PovmFile {
    pub fn to_povm(&self) -> Result<Povm> {
        let elements = self.elements.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        Povm::new(self.labels.clone(), elements)
    }

    pub fn from_povm(m: &Povm) -> Self {
        Self {
            labels: m.labels().to_vec(),
            elements: m.elements().iter().map(matrix_to_json).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentFile {
    pub labels: Vec<Label>,
    pub kraus: Vec<Vec<MatrixJson>>,
}

impl InstrumentFile {
    pub fn to_instrument(&self) -> Result<Instrument> {
        let kraus = self
            .kraus
            .iter()
            .map(|ops| ops.iter().map(matrix_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Instrument::new(self.labels.clone(), kraus)
    }

    pub fn from_instrument(n: &Instrument) -> Self {
        Self {
            labels: n.labels().to_vec(),
            kraus: n.kraus().iter().map(|ops| ops.iter().map(matrix_to_json).collect()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub kraus: Vec<MatrixJson>,
}

impl ChannelFile {
    pub fn to_channel(&self) -> Result<Channel> {
        Channel::new(self.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?)
    }

    pub fn from_channel(ch: &Channel) -> Self {
        Self {
            kraus: ch.kraus().iter().map(matrix_to_json).collect(),
        }
    }
}

/// `{"family": ..., "params": {...}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `ρ(θ) ∝ e^{θT/2} ρ₀ e^{θT/2}`; `rho0` need not be normalized.
    Symmetric { rho0: MatrixJson, generators: Vec<MatrixJson> },
    /// `ρ(θ) = e^{−iθT/2} ρ₀ e^{iθT/2}`.
    Unitary { rho0: MatrixJson, generators: Vec<MatrixJson> },
    /// `ρ(θ) ∝ exp(T₀ + θT)` with commuting generators.
    Mechanical { t0: MatrixJson, generators: Vec<MatrixJson> },
    /// Great circle rotated by `u` (identity when absent).
    GreatCircle {
        #[serde(default)]
        u: Option<MatrixJson>,
    },
    /// Pure spin-half states at colatitude `eta`, longitude as parameter.
    SpinHalfPure { eta: f64 },
}

fn observables(ms: &[MatrixJson]) -> Result<Vec<Observable>> {
    ms.iter().map(|m| Observable::new(matrix_from_json(m)?)).collect()
}

impl ModelSpec {
    pub fn build(&self) -> Result<ParametricModel> {
        match self {
            ModelSpec::Symmetric { rho0, generators } => {
                exp_model_symmetric(&matrix_from_json(rho0)?, observables(generators)?)
            }
            ModelSpec::Unitary { rho0, generators } => {
                exp_model_unitary(&DensityMatrix::new(matrix_from_json(rho0)?)?, observables(generators)?)
            }
            ModelSpec::Mechanical { t0, generators } => {
                exp_model_mechanical(&Observable::new(matrix_from_json(t0)?)?, observables(generators)?)
            }
            ModelSpec::GreatCircle { u } => {
                let u = match u {
                    Some(m) => matrix_from_json(m)?,
                    None => ComplexMatrix::identity(2),
                };
                great_circle_model(&u)
            }
            ModelSpec::SpinHalfPure { eta } => {
                if !eta.is_finite() {
                    return Err(Error::NonFinite);
                }
                Ok(spin_half_longitude_model(*eta))
            }
        }
    }
}

/// Seventeen significant digits in scientific notation; parses back to the
/// same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn label_to_json(l: &Label) -> String {
    serde_json::to_string(l).expect("labels serialize")
}

/// CSV with columns `index,label`, labels in their JSON form.
pub fn write_samples_csv<W: Write>(out: W, samples: &[Label]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["index", "label"]).map_err(io)?;
    for (i, l) in samples.iter().enumerate() {
        w.write_record([i.to_string(), label_to_json(l)]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

pub fn read_samples_csv<R: std::io::Read>(input: R) -> Result<Vec<Label>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let idx: usize = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("row {k}: bad index")))?;
        if idx != k {
            return Err(Error::Format(format!("row {k}: index {idx} out of order")));
        }
        let label = rec.get(1).ok_or_else(|| Error::Format(format!("row {k}: missing label")))?;
        out.push(serde_json::from_str(label).map_err(|e| Error::Format(format!("row {k}: {e}")))?);
    }
    Ok(out)
}
