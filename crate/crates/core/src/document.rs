//! JSON documents: model specs, target series, parameter files.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major lists of
//! them. Parse errors carry the JSON path of the offending value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::simulator::{
    Ansatz, AnsatzKind, CircuitModel, DiagonalBlock, EncodingSpec, GeneratorEncoding, Layer, Observable, PauliAxis,
    SimError, TrainableBlock,
};
use crate::spectra::EncodingHamiltonian;
use crate::universal::{TargetSeries, UniversalError};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DocumentError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] SimError),
    #[error(transparent)]
    Target(#[from] UniversalError),
}

/// Parses JSON into `T`, reporting the path of the first offending value.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, DocumentError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| DocumentError::Parse {
        path: match e.path().to_string().as_str() {
            "." => "$".to_string(),
            p => format!("$.{p}"),
        },
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| DocumentError::Parse { path: "$".into(), message: e.to_string() })?;
    Ok(value)
}

pub type ComplexPair = [f64; 2];

fn to_complex(pairs: &[ComplexPair]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn to_pairs(values: &[Complex64]) -> Vec<ComplexPair> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

fn square_matrix(entries: &[ComplexPair], what: &str) -> Result<ComplexMatrix, DocumentError> {
    ComplexMatrix::square_from_entries(to_complex(entries))
        .map_err(|_| DocumentError::Invalid(format!("{what} has {} entries, not a square number", entries.len())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrainableDoc {
    Fixed { entries: Vec<ComplexPair> },
    Ansatz { circuit: AnsatzKind, sublayers: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalBlockDoc {
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub feature: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EncodingDoc {
    Pauli {
        axis: PauliAxis,
        qubit: usize,
        #[serde(default)]
        feature: usize,
    },
    ParallelPauli { axis: PauliAxis, qubits: Vec<usize>, features: Vec<usize> },
    Diagonal { blocks: Vec<DiagonalBlockDoc> },
    Generator {
        qubits: Vec<usize>,
        #[serde(default)]
        feature: usize,
        entries: Vec<ComplexPair>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableDoc {
    PauliZ { qubit: usize },
    Dense { entries: Vec<ComplexPair> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub trainable: TrainableDoc,
    pub encoding: EncodingDoc,
}

fn one() -> f64 {
    1.0
}

/// A model specification; `params` optionally carries trainable parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecDocument {
    pub n_qubits: usize,
    pub n_features: usize,
    #[serde(default = "one")]
    pub input_scale: f64,
    pub layers: Vec<LayerDoc>,
    pub final_trainable: TrainableDoc,
    pub observable: ObservableDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
}

impl TrainableDoc {
    fn build(&self) -> Result<TrainableBlock, DocumentError> {
        Ok(match self {
            TrainableDoc::Fixed { entries } => TrainableBlock::Fixed(square_matrix(entries, "fixed block")?),
            TrainableDoc::Ansatz { circuit, sublayers } => TrainableBlock::Ansatz(Ansatz::new(*circuit, *sublayers)),
        })
    }

    fn from_block(block: &TrainableBlock) -> Self {
        match block {
            TrainableBlock::Fixed(m) => TrainableDoc::Fixed { entries: to_pairs(m.as_slice()) },
            TrainableBlock::Ansatz(a) => TrainableDoc::Ansatz { circuit: a.kind, sublayers: a.sublayers },
        }
    }
}

impl EncodingDoc {
    fn build(&self) -> Result<EncodingSpec, DocumentError> {
        Ok(match self {
            EncodingDoc::Pauli { axis, qubit, feature } => {
                EncodingSpec::PauliRotation { axis: *axis, qubit: *qubit, feature: *feature }
            }
            EncodingDoc::ParallelPauli { axis, qubits, features } => {
                EncodingSpec::ParallelPauli { axis: *axis, qubits: qubits.clone(), features: features.clone() }
            }
            EncodingDoc::Diagonal { blocks } => EncodingSpec::Diagonal {
                blocks: blocks
                    .iter()
                    .map(|b| {
                        Ok(DiagonalBlock {
                            qubits: b.qubits.clone(),
                            feature: b.feature,
                            hamiltonian: EncodingHamiltonian::new(b.eigenvalues.clone()).map_err(SimError::from)?,
                        })
                    })
                    .collect::<Result<_, DocumentError>>()?,
            },
            EncodingDoc::Generator { qubits, feature, entries } => EncodingSpec::Generator(GeneratorEncoding::new(
                qubits.clone(),
                *feature,
                square_matrix(entries, "generator")?,
            )?),
        })
    }

    fn from_spec(spec: &EncodingSpec) -> Self {
        match spec {
            EncodingSpec::PauliRotation { axis, qubit, feature } => {
                EncodingDoc::Pauli { axis: *axis, qubit: *qubit, feature: *feature }
            }
            EncodingSpec::ParallelPauli { axis, qubits, features } => {
                EncodingDoc::ParallelPauli { axis: *axis, qubits: qubits.clone(), features: features.clone() }
            }
            EncodingSpec::Diagonal { blocks } => EncodingDoc::Diagonal {
                blocks: blocks
                    .iter()
                    .map(|b| DiagonalBlockDoc {
                        qubits: b.qubits.clone(),
                        feature: b.feature,
                        eigenvalues: b.hamiltonian.eigenvalues().to_vec(),
                    })
                    .collect(),
            },
            EncodingSpec::Generator(g) => EncodingDoc::Generator {
                qubits: g.qubits().to_vec(),
                feature: g.feature(),
                entries: to_pairs(g.hamiltonian().as_slice()),
            },
        }
    }
}

impl ModelSpecDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        parse(text)
    }

    pub fn build(&self) -> Result<CircuitModel, DocumentError> {
        let layers = self
            .layers
            .iter()
            .map(|l| Ok(Layer { trainable: l.trainable.build()?, encoding: l.encoding.build()? }))
            .collect::<Result<Vec<_>, DocumentError>>()?;
        let observable = match &self.observable {
            ObservableDoc::PauliZ { qubit } => Observable::PauliZ { qubit: *qubit },
            ObservableDoc::Dense { entries } => Observable::Dense(square_matrix(entries, "observable")?),
        };
        Ok(CircuitModel::new(
            self.n_qubits,
            self.n_features,
            self.input_scale,
            layers,
            self.final_trainable.build()?,
            observable,
        )?)
    }

    pub fn from_model(model: &CircuitModel, params: Option<Vec<f64>>) -> Self {
        Self {
            n_qubits: model.n_qubits(),
            n_features: model.n_features(),
            input_scale: model.input_scale(),
            layers: model
                .layers()
                .iter()
                .map(|l| LayerDoc {
                    trainable: TrainableDoc::from_block(&l.trainable),
                    encoding: EncodingDoc::from_spec(&l.encoding),
                })
                .collect(),
            final_trainable: TrainableDoc::from_block(model.final_trainable()),
            observable: match model.observable() {
                Observable::PauliZ { qubit } => ObservableDoc::PauliZ { qubit: *qubit },
                Observable::Dense(m) => ObservableDoc::Dense { entries: to_pairs(m.as_slice()) },
            },
            params,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }
}

/// A frequency given either as a single integer (one feature) or a vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FreqDoc {
    Scalar(i64),
    Vector(Vec<i64>),
}

impl FreqDoc {
    fn components(&self) -> Vec<i64> {
        match self {
            FreqDoc::Scalar(n) => vec![*n],
            FreqDoc::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientDoc {
    pub freq: FreqDoc,
    pub c: ComplexPair,
}

/// A truncated Fourier series. Missing `c_{−n}` entries are implied by
/// conjugate symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDocument {
    #[serde(default = "one_feature")]
    pub n_features: usize,
    pub degree: u32,
    pub coefficients: Vec<CoefficientDoc>,
}

fn one_feature() -> usize {
    1
}

impl TargetDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        parse(text)
    }

    pub fn build(&self) -> Result<TargetSeries, DocumentError> {
        Ok(TargetSeries::new(
            self.n_features,
            self.degree,
            self.coefficients.iter().map(|c| (c.freq.components(), Complex64::new(c.c[0], c.c[1]))),
        )?)
    }

    /// Every coefficient of the series, including implied ones.
    pub fn from_target(target: &TargetSeries) -> Self {
        Self {
            n_features: target.n_features(),
            degree: target.degree(),
            coefficients: target
                .frequencies()
                .into_iter()
                .map(|n| {
                    let c = target.coefficient(&n).expect("own frequency");
                    let freq = if n.len() == 1 { FreqDoc::Scalar(n[0]) } else { FreqDoc::Vector(n) };
                    CoefficientDoc { freq, c: [c.re, c.im] }
                })
                .collect(),
        }
    }
}

/// Parameters as a bare array or as an object with a `params` field (the
/// format written by `fit`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsDocument {
    Bare(Vec<f64>),
    Wrapped { params: Vec<f64> },
}

impl ParamsDocument {
    pub fn parse(text: &str) -> Result<Vec<f64>, DocumentError> {
        Ok(match parse::<ParamsDocument>(text)? {
            ParamsDocument::Bare(p) | ParamsDocument::Wrapped { params: p } => p,
        })
    }
}

/// Output of `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutputDocument {
    pub params: Vec<f64>,
    pub final_mse: f64,
    pub seed: u64,
    pub best_restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub gamma: Vec<ComplexPair>,
}

impl StateDocument {
    pub fn new(gamma: &[Complex64]) -> Self {
        Self { gamma: to_pairs(gamma) }
    }
}

/// Dense observable written by `universal`; same shape as the model's
/// `{"kind": "dense"}` observable.
pub fn observable_document(m: &ComplexMatrix) -> ObservableDoc {
    ObservableDoc::Dense { entries: to_pairs(m.as_slice()) }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RX_MODEL: &str = r#"{
        "n_qubits": 1,
        "n_features": 1,
        "layers": [{"trainable": {"kind": "fixed", "entries": [[1,0],[0,0],[0,0],[1,0]]},
                    "encoding": {"kind": "pauli", "axis": "X", "qubit": 0}}],
        "final_trainable": {"kind": "ansatz", "circuit": "A", "sublayers": 1},
        "observable": {"kind": "pauli_z", "qubit": 0},
        "params": [0, 0, 0]
    }"#;

    #[test]
    fn model_round_trip() {
        let doc = ModelSpecDocument::parse(RX_MODEL).unwrap();
        assert_eq!(doc.input_scale, 1.0);
        let model = doc.build().unwrap();
        assert_eq!(model.param_count(), 3);
        let x: f64 = 0.7;
        assert!((model.evaluate(&[0.0; 3], &[x]).unwrap() - x.cos()).abs() < 1e-14);
        let again = ModelSpecDocument::parse(&ModelSpecDocument::from_model(&model, doc.params.clone()).to_json()).unwrap();
        assert_eq!(again.build().unwrap(), model);
    }

    #[test]
    fn parse_errors_carry_paths() {
        let bad = RX_MODEL.replace(r#""axis": "X""#, r#""axis": "W""#);
        match ModelSpecDocument::parse(&bad) {
            Err(DocumentError::Parse { path, .. }) => assert_eq!(path, "$.layers[0].encoding"),
            other => panic!("{other:?}"),
        }
        let bad = RX_MODEL.replace(r#""n_qubits": 1"#, r#""n_qubits": -1"#);
        match ModelSpecDocument::parse(&bad) {
            Err(DocumentError::Parse { path, .. }) => assert_eq!(path, "$.n_qubits"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ModelSpecDocument::parse("{"), Err(DocumentError::Parse { .. })));
    }

    #[test]
    fn invalid_models_are_rejected() {
        let bad = RX_MODEL.replace(r#""qubit": 0}}"#, r#""qubit": 4}}"#);
        assert!(matches!(
            ModelSpecDocument::parse(&bad).unwrap().build(),
            Err(DocumentError::Model(SimError::QubitOutOfRange { .. }))
        ));
        let bad = RX_MODEL.replace("[[1,0],[0,0],[0,0],[1,0]]", "[[1,0],[0,0],[0,0]]");
        assert!(matches!(ModelSpecDocument::parse(&bad).unwrap().build(), Err(DocumentError::Invalid(_))));
    }

    #[test]
    fn target_documents() {
        let doc = TargetDocument::parse(
            r#"{"degree": 1, "coefficients": [{"freq": 0, "c": [0.1, 0]}, {"freq": 1, "c": [0.15, -0.15]}]}"#,
        )
        .unwrap();
        let t = doc.build().unwrap();
        assert_eq!(t.coefficient(&[-1]).unwrap(), Complex64::new(0.15, 0.15));
        let back = TargetDocument::parse(&serde_json::to_string(&TargetDocument::from_target(&t)).unwrap()).unwrap();
        assert_eq!(back.build().unwrap(), t);

        let two = TargetDocument::parse(r#"{"n_features": 2, "degree": 1, "coefficients": [{"freq": [1, -1], "c": [0.1, 0.2]}]}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(two.coefficient(&[-1, 1]).unwrap(), Complex64::new(0.1, -0.2));

        let bad = TargetDocument::parse(r#"{"degree": 1, "coefficients": [{"freq": 0, "c": [0.1, 0.3]}]}"#).unwrap();
        assert!(matches!(bad.build(), Err(DocumentError::Target(_))));
    }

    #[test]
    fn params_documents() {
        assert_eq!(ParamsDocument::parse("[1, 2.5]").unwrap(), vec![1.0, 2.5]);
        assert_eq!(ParamsDocument::parse(r#"{"params": [3]}"#).unwrap(), vec![3.0]);
        assert!(ParamsDocument::parse(r#"{"p": [3]}"#).is_err());
    }
}
