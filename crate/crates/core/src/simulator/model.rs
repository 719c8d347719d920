//! Layered variational models `U(x) = W⁽ᴸ⁺¹⁾ S(x) W⁽ᴸ⁾ … S(x) W⁽¹⁾` and their
//! expectation values `f(x) = ⟨0|U†(x) M U(x)|0⟩`.

use num_complex::Complex64;

use super::ansatz::{ansatz_unitary, Ansatz};
use super::circuit::{EncodingGate, Op, Run, ShiftTable};
use super::gates::{mat2_to_matrix, PauliAxis};
use super::state::{local_offsets, StateVector};
use super::{max_qubits, SimError};
use crate::linalg::ComplexMatrix;
use crate::spectra::{self, EncodingHamiltonian, FrequencySpectrum};

#[derive(Debug, Clone, PartialEq)]
pub enum TrainableBlock {
    /// Dense unitary on the whole register.
    Fixed(ComplexMatrix),
    Ansatz(Ansatz),
}

impl TrainableBlock {
    pub fn param_count(&self, n_qubits: usize) -> usize {
        match self {
            TrainableBlock::Fixed(_) => 0,
            TrainableBlock::Ansatz(a) => a.param_count(n_qubits),
        }
    }

    /// Dense unitary for the given block parameters.
    pub fn unitary(&self, params: &[f64], n_qubits: usize) -> Result<ComplexMatrix, SimError> {
        match self {
            TrainableBlock::Fixed(m) => Ok(m.clone()),
            TrainableBlock::Ansatz(a) => ansatz_unitary(a, params, n_qubits),
        }
    }
}

/// One diagonal generator acting on a group of qubits (`qubits[0]` is the most
/// significant bit of the local index) and encoding one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalBlock {
    pub qubits: Vec<usize>,
    pub feature: usize,
    pub hamiltonian: EncodingHamiltonian,
}

/// A Hermitian, not necessarily diagonal, encoding generator. The
/// eigendecomposition is computed once on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorEncoding {
    qubits: Vec<usize>,
    feature: usize,
    hamiltonian: ComplexMatrix,
    eigenvalues: EncodingHamiltonian,
    basis: ComplexMatrix,
}

impl GeneratorEncoding {
    pub fn new(qubits: Vec<usize>, feature: usize, hamiltonian: ComplexMatrix) -> Result<Self, SimError> {
        if hamiltonian.rows() != 1 << qubits.len() {
            return Err(SimError::DimensionMismatch(format!(
                "generator of dimension {} on {} qubit(s)",
                hamiltonian.rows(),
                qubits.len()
            )));
        }
        let (eigenvalues, basis) = diagonalize_generator(&hamiltonian)?;
        Ok(Self { qubits, feature, hamiltonian, eigenvalues, basis })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn feature(&self) -> usize {
        self.feature
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EncodingSpec {
    /// `R_axis(x_feature)` on one qubit.
    PauliRotation { axis: PauliAxis, qubit: usize, feature: usize },
    /// The same rotation on several qubits; `features[i]` is encoded on `qubits[i]`.
    ParallelPauli { axis: PauliAxis, qubits: Vec<usize>, features: Vec<usize> },
    /// `diag(e^{−i x λ_1}, …)` per block.
    Diagonal { blocks: Vec<DiagonalBlock> },
    /// `e^{−i x H}` for a general Hermitian `H`.
    Generator(GeneratorEncoding),
}

/// Generator of a single encoding component in its eigenbasis.
enum Component<'a> {
    Pauli(PauliAxis),
    Diagonal(&'a EncodingHamiltonian),
    Generator(&'a GeneratorEncoding),
}

impl EncodingSpec {
    fn components(&self) -> Vec<(&[usize], usize, Component<'_>)> {
        match self {
            EncodingSpec::PauliRotation { axis, qubit, feature } => {
                vec![(std::slice::from_ref(qubit), *feature, Component::Pauli(*axis))]
            }
            EncodingSpec::ParallelPauli { axis, qubits, features } => qubits
                .iter()
                .zip(features)
                .map(|(q, &f)| (std::slice::from_ref(q), f, Component::Pauli(*axis)))
                .collect(),
            EncodingSpec::Diagonal { blocks } => blocks
                .iter()
                .map(|b| (b.qubits.as_slice(), b.feature, Component::Diagonal(&b.hamiltonian)))
                .collect(),
            EncodingSpec::Generator(g) => vec![(g.qubits.as_slice(), g.feature, Component::Generator(g))],
        }
    }

    /// All qubits touched, in declaration order.
    pub fn qubits(&self) -> Vec<usize> {
        self.components().iter().flat_map(|(q, _, _)| q.iter().copied()).collect()
    }

    fn validate(&self, n_qubits: usize, n_features: usize) -> Result<(), SimError> {
        if let EncodingSpec::ParallelPauli { qubits, features, .. } = self {
            if qubits.len() != features.len() {
                return Err(SimError::InvalidModel(format!(
                    "parallel encoding lists {} qubits but {} features",
                    qubits.len(),
                    features.len()
                )));
            }
        }
        let qubits = self.qubits();
        if qubits.is_empty() {
            return Err(SimError::InvalidModel("encoding touches no qubits".into()));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(SimError::QubitOutOfRange { qubit: q, n_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(SimError::DuplicateTarget(q));
            }
        }
        for (qs, feature, comp) in self.components() {
            if feature >= n_features {
                return Err(SimError::FeatureOutOfRange { feature, n_features });
            }
            if let Component::Diagonal(h) = comp {
                if h.dim() != 1 << qs.len() {
                    return Err(SimError::DimensionMismatch(format!(
                        "diagonal generator with {} eigenvalues on {} qubit(s)",
                        h.dim(),
                        qs.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Gates realising this layer at already-scaled inputs.
    pub(crate) fn gates(&self, x: &[f64]) -> Vec<EncodingGate> {
        self.components()
            .into_iter()
            .map(|(qubits, feature, comp)| {
                let t = x[feature];
                match comp {
                    Component::Pauli(axis) => EncodingGate::Single { qubit: qubits[0], gate: axis.rotation(t) },
                    Component::Diagonal(h) => EncodingGate::Multi {
                        targets: qubits.to_vec(),
                        gate: ComplexMatrix::diagonal(&phases(h.eigenvalues(), t)),
                    },
                    Component::Generator(g) => {
                        // e^{−itH} = V† e^{−itΣ} V
                        let d = ComplexMatrix::diagonal(&phases(g.eigenvalues.eigenvalues(), t));
                        EncodingGate::Multi {
                            targets: qubits.to_vec(),
                            gate: &(&g.basis.adjoint() * &d) * &g.basis,
                        }
                    }
                }
            })
            .collect()
    }

    /// Per basis state of an `n_qubits` register: the eigenvalue of each
    /// feature's generator, and the basis change `V` (`S = V† e^{−ixΣ} V`), or
    /// `None` when the layer is already diagonal.
    fn eigen_decomposition(
        &self,
        n_qubits: usize,
        n_features: usize,
        scale: f64,
    ) -> (Vec<Vec<f64>>, Option<ComplexMatrix>) {
        let dim = 1usize << n_qubits;
        let mut eig = vec![vec![0.0; n_features]; dim];
        let mut local_bases: Vec<(Vec<usize>, ComplexMatrix)> = Vec::new();
        for (qubits, feature, comp) in self.components() {
            let (values, basis): (Vec<f64>, Option<ComplexMatrix>) = match comp {
                Component::Pauli(axis) => (
                    vec![0.5, -0.5],
                    (axis != PauliAxis::Z).then(|| mat2_to_matrix(&axis.eigenbasis())),
                ),
                Component::Diagonal(h) => (h.eigenvalues().to_vec(), None),
                Component::Generator(g) => (g.eigenvalues.eigenvalues().to_vec(), Some(g.basis.clone())),
            };
            let offsets = local_offsets(qubits);
            let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
            for (b, row) in eig.iter_mut().enumerate() {
                let local = offsets
                    .iter()
                    .position(|&o| o == b & mask)
                    .expect("every masked pattern is a local index");
                row[feature] += scale * values[local];
            }
            if let Some(basis) = basis {
                local_bases.push((qubits.to_vec(), basis));
            }
        }
        if local_bases.is_empty() {
            return (eig, None);
        }
        let mut v = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut psi = StateVector::basis(n_qubits, col);
            for (targets, basis) in &local_bases {
                psi.apply(basis, targets).expect("validated targets");
            }
            for (row, a) in psi.amplitudes().iter().enumerate() {
                v[(row, col)] = *a;
            }
        }
        (eig, Some(v))
    }
}

fn phases(eigenvalues: &[f64], t: f64) -> Vec<Complex64> {
    eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -t * l)).collect()
}

/// `e^{−ixH}` on the spec's qubits, in the order returned by [`EncodingSpec::qubits`]
/// (first qubit most significant). `x` holds one value per feature.
pub fn encoding_unitary(spec: &EncodingSpec, x: &[f64]) -> Result<ComplexMatrix, SimError> {
    let qubits = spec.qubits();
    let n_features = spec.components().iter().map(|(_, f, _)| f + 1).max().unwrap_or(1);
    if x.len() < n_features {
        return Err(SimError::FeatureCountMismatch { expected: n_features, got: x.len() });
    }
    let k = qubits.len();
    // relabel onto a local register: qubits[i] -> local qubit k-1-i
    let local = |q: usize| k - 1 - qubits.iter().position(|&p| p == q).expect("own qubit");
    let gates = spec.gates(x);
    let dim = 1usize << k;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut psi = StateVector::basis(k, col);
        for g in &gates {
            match g {
                EncodingGate::Single { qubit, gate } => psi.apply_single(local(*qubit), gate),
                EncodingGate::Multi { targets, gate } => {
                    let t: Vec<usize> = targets.iter().map(|&q| local(q)).collect();
                    psi.apply(gate, &t)?;
                }
            }
        }
        for (row, a) in psi.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// Eigendecomposition `H = V† Σ V` of a Hermitian generator: eigenvalues
/// ascending, and the unitary `V`.
pub fn diagonalize_generator(h: &ComplexMatrix) -> Result<(EncodingHamiltonian, ComplexMatrix), SimError> {
    let dev = h.hermitian_deviation();
    if dev > crate::linalg::HERMITIAN_TOL {
        return Err(SimError::NotHermitian(dev));
    }
    let (values, q) = h.hermitian_eigen()?;
    Ok((EncodingHamiltonian::new(values)?, q.adjoint()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    PauliZ { qubit: usize },
    Dense(ComplexMatrix),
}

impl Observable {
    pub fn matrix(&self, n_qubits: usize) -> ComplexMatrix {
        match self {
            Observable::PauliZ { qubit } => {
                let diag: Vec<Complex64> = (0..1usize << n_qubits)
                    .map(|b| if b >> qubit & 1 == 0 { 1.0.into() } else { (-1.0).into() })
                    .collect();
                ComplexMatrix::diagonal(&diag)
            }
            Observable::Dense(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub trainable: TrainableBlock,
    pub encoding: EncodingSpec,
}

/// A layered model. Immutable once built; `L` layers of (trainable block,
/// encoding) followed by one final trainable block.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitModel {
    n_qubits: usize,
    n_features: usize,
    input_scale: f64,
    layers: Vec<Layer>,
    final_trainable: TrainableBlock,
    observable: Observable,
    ops: Vec<Op>,
    block_offsets: Vec<usize>,
    n_params: usize,
}

impl CircuitModel {
    pub fn new(
        n_qubits: usize,
        n_features: usize,
        input_scale: f64,
        layers: Vec<Layer>,
        final_trainable: TrainableBlock,
        observable: Observable,
    ) -> Result<Self, SimError> {
        if n_qubits == 0 {
            return Err(SimError::InvalidModel("a model needs at least one qubit".into()));
        }
        let cap = max_qubits();
        if n_qubits > cap {
            return Err(SimError::TooManyQubits { n_qubits, cap });
        }
        if n_features == 0 {
            return Err(SimError::InvalidModel("a model needs at least one feature".into()));
        }
        if !(input_scale.is_finite() && input_scale > 0.0) {
            return Err(SimError::InvalidModel(format!("input scale must be positive, got {input_scale}")));
        }
        let dim = 1usize << n_qubits;
        let blocks = layers.iter().map(|l| &l.trainable).chain(std::iter::once(&final_trainable));
        for block in blocks {
            match block {
                TrainableBlock::Fixed(m) => {
                    if m.rows() != dim || !m.is_square() {
                        return Err(SimError::DimensionMismatch(format!(
                            "fixed block is {}x{}, register dimension is {dim}",
                            m.rows(),
                            m.cols()
                        )));
                    }
                    let dev = m.unitary_deviation();
                    if dev > crate::linalg::UNITARY_TOL {
                        return Err(SimError::NotUnitary(dev));
                    }
                }
                TrainableBlock::Ansatz(a) => {
                    if a.sublayers == 0 {
                        return Err(SimError::InvalidModel("ansatz needs at least one sublayer".into()));
                    }
                }
            }
        }
        for layer in &layers {
            layer.encoding.validate(n_qubits, n_features)?;
        }
        match &observable {
            Observable::PauliZ { qubit } if *qubit >= n_qubits => {
                return Err(SimError::QubitOutOfRange { qubit: *qubit, n_qubits });
            }
            Observable::Dense(m) => {
                if m.rows() != dim || !m.is_square() {
                    return Err(SimError::DimensionMismatch(format!(
                        "observable is {}x{}, register dimension is {dim}",
                        m.rows(),
                        m.cols()
                    )));
                }
                let dev = m.hermitian_deviation();
                if dev > crate::linalg::HERMITIAN_TOL {
                    return Err(SimError::NotHermitian(dev));
                }
            }
            _ => {}
        }

        let mut model = Self {
            n_qubits,
            n_features,
            input_scale,
            layers,
            final_trainable,
            observable,
            ops: Vec::new(),
            block_offsets: Vec::new(),
            n_params: 0,
        };
        model.compile();
        Ok(model)
    }

    fn compile(&mut self) {
        let mut ops = Vec::new();
        let mut offsets = Vec::new();
        let mut p = 0;
        let n = self.n_qubits;
        for b in 0..=self.layers.len() {
            offsets.push(p);
            match self.block(b) {
                TrainableBlock::Fixed(_) => ops.push(Op::Fixed(b)),
                TrainableBlock::Ansatz(a) => {
                    ops.extend(a.ops(n, p));
                    p += a.param_count(n);
                }
            }
            if b < self.layers.len() {
                ops.push(Op::Encoding(b));
            }
        }
        self.ops = ops;
        self.block_offsets = offsets;
        self.n_params = p;
    }

    /// `r` sequential layers of one Pauli rotation on qubit 0, each preceded by
    /// `block`, with `block` repeated once more at the end.
    pub fn sequential_pauli(
        n_qubits: usize,
        r: usize,
        axis: PauliAxis,
        block: TrainableBlock,
        observable: Observable,
    ) -> Result<Self, SimError> {
        let layers = (0..r)
            .map(|_| Layer {
                trainable: block.clone(),
                encoding: EncodingSpec::PauliRotation { axis, qubit: 0, feature: 0 },
            })
            .collect();
        Self::new(n_qubits, 1, 1.0, layers, block, observable)
    }

    /// One layer encoding the single feature on `r` qubits in parallel.
    pub fn parallel_pauli(r: usize, axis: PauliAxis, block: TrainableBlock, observable: Observable) -> Result<Self, SimError> {
        let layer = Layer {
            trainable: block.clone(),
            encoding: EncodingSpec::ParallelPauli { axis, qubits: (0..r).collect(), features: vec![0; r] },
        };
        Self::new(r, 1, 1.0, vec![layer], block, observable)
    }

    /// Same model with a different classical input scaling `x → scale·x`.
    pub fn with_input_scale(&self, scale: f64) -> Result<Self, SimError> {
        Self::new(
            self.n_qubits,
            self.n_features,
            scale,
            self.layers.clone(),
            self.final_trainable.clone(),
            self.observable.clone(),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn input_scale(&self) -> f64 {
        self.input_scale
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn final_trainable(&self) -> &TrainableBlock {
        &self.final_trainable
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn param_count(&self) -> usize {
        self.n_params
    }

    /// Generator axis of every parameter, in parameter order. All trainable
    /// parameters are angles of Pauli rotations.
    pub fn param_generators(&self) -> Vec<PauliAxis> {
        let mut axes = vec![PauliAxis::Z; self.n_params];
        for op in &self.ops {
            if let Op::Rotation { axis, param, .. } = *op {
                axes[param] = axis;
            }
        }
        axes
    }

    pub(crate) fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Trainable block `b`, `0..=L`.
    pub fn block(&self, b: usize) -> &TrainableBlock {
        if b < self.layers.len() {
            &self.layers[b].trainable
        } else {
            &self.final_trainable
        }
    }

    pub(crate) fn fixed_block(&self, b: usize) -> Option<&ComplexMatrix> {
        match self.block(b) {
            TrainableBlock::Fixed(m) => Some(m),
            TrainableBlock::Ansatz(_) => None,
        }
    }

    pub fn check_params(&self, params: &[f64]) -> Result<(), SimError> {
        if params.len() != self.n_params {
            return Err(SimError::ParamCountMismatch { expected: self.n_params, got: params.len() });
        }
        Ok(())
    }

    pub(crate) fn scaled_input(&self, x: &[f64]) -> Result<Vec<f64>, SimError> {
        if x.len() != self.n_features {
            return Err(SimError::FeatureCountMismatch { expected: self.n_features, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFiniteInput);
        }
        Ok(x.iter().map(|v| v * self.input_scale).collect())
    }

    /// `U(scale·x, θ)|0⟩`.
    pub fn final_state(&self, params: &[f64], x: &[f64]) -> Result<StateVector, SimError> {
        Run::new(self, params, x)?.final_state()
    }

    /// `f(x) = Re⟨ψ|M|ψ⟩`; fails if the imaginary part is not rounding noise.
    pub fn evaluate(&self, params: &[f64], x: &[f64]) -> Result<f64, SimError> {
        let run = Run::new(self, params, x)?;
        let psi = run.final_state()?;
        run.measure(&psi)
    }

    /// Expectation values with every parameter shifted by `±delta` in turn.
    pub fn shifted_expectations(&self, params: &[f64], x: &[f64], delta: f64) -> Result<ShiftTable, SimError> {
        Run::new(self, params, x)?.shifted(delta)
    }

    /// Dense unitaries of all trainable blocks at `params`.
    pub fn block_unitaries(&self, params: &[f64]) -> Result<Vec<ComplexMatrix>, SimError> {
        self.check_params(params)?;
        (0..=self.layers.len())
            .map(|b| {
                let block = self.block(b);
                let start = self.block_offsets[b];
                let end = start + block.param_count(self.n_qubits);
                block.unitary(&params[start..end], self.n_qubits)
            })
            .collect()
    }

    /// Per-feature frequency spectrum of the model as a function of the raw
    /// input (input scale included).
    pub fn feature_spectra(&self) -> Result<Vec<FrequencySpectrum>, SimError> {
        let per_layer: Vec<Vec<Vec<f64>>> = self
            .layers
            .iter()
            .map(|l| l.encoding.eigen_decomposition(self.n_qubits, self.n_features, self.input_scale).0)
            .collect();
        (0..self.n_features)
            .map(|f| {
                let mut sums = vec![0.0];
                for layer in &per_layer {
                    let values = spectra::snap_set(layer.iter().map(|row| row[f]).collect());
                    sums = spectra::snap_set(sums.iter().flat_map(|s| values.iter().map(move |v| s + v)).collect());
                }
                Ok(FrequencySpectrum::from_differences(
                    sums.iter().flat_map(|a| sums.iter().map(move |b| a - b)),
                ))
            })
            .collect()
    }

    /// Equivalent model with every encoding generator diagonal: the basis
    /// changes `V`, `V†` of each layer are folded into the neighbouring
    /// trainable blocks.
    pub fn diagonalized(&self, params: &[f64]) -> Result<DiagonalizedModel, SimError> {
        let mut blocks = self.block_unitaries(params)?;
        let mut layer_eigenvalues = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let (eig, basis) = layer.encoding.eigen_decomposition(self.n_qubits, self.n_features, self.input_scale);
            if let Some(v) = basis {
                blocks[l] = &v * &blocks[l];
                blocks[l + 1] = &blocks[l + 1] * &v.adjoint();
            }
            layer_eigenvalues.push(eig);
        }
        Ok(DiagonalizedModel {
            n_features: self.n_features,
            blocks,
            layer_eigenvalues,
            observable: self.observable.matrix(self.n_qubits),
        })
    }
}

/// A model in the form `W⁽ᴸ⁺¹⁾ e^{−ix·Σ} W⁽ᴸ⁾ … e^{−ix·Σ} W⁽¹⁾` with diagonal
/// encodings. `layer_eigenvalues[l][b][f]` is the eigenvalue (input scale
/// included) of feature `f`'s generator on basis state `b` in layer `l`.
#[derive(Debug, Clone)]
pub struct DiagonalizedModel {
    pub n_features: usize,
    pub blocks: Vec<ComplexMatrix>,
    pub layer_eigenvalues: Vec<Vec<Vec<f64>>>,
    pub observable: ComplexMatrix,
}

impl DiagonalizedModel {
    pub fn dim(&self) -> usize {
        self.observable.rows()
    }

    pub fn n_layers(&self) -> usize {
        self.layer_eigenvalues.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, SimError> {
        if x.len() != self.n_features {
            return Err(SimError::FeatureCountMismatch { expected: self.n_features, got: x.len() });
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); self.dim()];
        psi[0] = Complex64::new(1.0, 0.0);
        for (l, block) in self.blocks.iter().enumerate() {
            psi = block.matvec(&psi)?;
            if let Some(eig) = self.layer_eigenvalues.get(l) {
                for (a, lam) in psi.iter_mut().zip(eig) {
                    let phase: f64 = lam.iter().zip(x).map(|(l, x)| l * x).sum();
                    *a *= Complex64::from_polar(1.0, -phase);
                }
            }
        }
        let mv = self.observable.matvec(&psi)?;
        let v: Complex64 = psi.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum();
        Ok(v.re)
    }
}
