//! Learnable parameter tensors and the flat store that owns them.

use rand::Rng;

use crate::{Error, Result};

/// A dense 64-bit float tensor with a gradient buffer of the same shape.
///
/// Values are stored row-major. All learnable state in this crate lives in
/// `ParamTensor`s owned by a [`ParamSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTensor {
    shape: Vec<usize>,
    values: Vec<f64>,
    grad: Vec<f64>,
}

impl ParamTensor {
    /// Builds a tensor from explicit values. The value count must equal the
    /// product of the shape and every entry must be finite.
    pub fn new(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::Shape(format!("zero-sized dimension in {shape:?}")));
        }
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "shape {shape:?} wants {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite value in parameter tensor".into()));
        }
        let n = values.len();
        Ok(Self {
            shape,
            values,
            grad: vec![0.0; n],
        })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let n: usize = shape.iter().product();
        Self::new(shape, vec![0.0; n])
    }

    /// Uniform init in `[-1/sqrt(fan_in), +1/sqrt(fan_in)]`.
    pub fn uniform_fan_in(shape: Vec<usize>, fan_in: usize, rng: &mut impl Rng) -> Result<Self> {
        let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
        let n: usize = shape.iter().product();
        let values = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        Self::new(shape, values)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn grad_mut(&mut self) -> &mut [f64] {
        &mut self.grad
    }

    pub fn zero_grad(&mut self) {
        self.grad.iter_mut().for_each(|g| *g = 0.0);
    }
}

/// Handle to a tensor inside a [`ParamSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(pub(crate) usize);

/// A named, ordered collection of parameter tensors.
///
/// The registration order is deterministic given the network construction
/// code, which makes checkpoints and optimizer state line up by index.
#[derive(Debug, Clone, Default)]
pub struct ParamSet {
    names: Vec<String>,
    tensors: Vec<ParamTensor>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>, tensor: ParamTensor) -> ParamId {
        self.names.push(name.into());
        self.tensors.push(tensor);
        ParamId(self.tensors.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn get(&self, id: ParamId) -> &ParamTensor {
        &self.tensors[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut ParamTensor {
        &mut self.tensors[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamTensor)> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.tensors.iter())
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.tensors.len()).map(ParamId)
    }

    pub fn zero_grads(&mut self) {
        self.tensors.iter_mut().for_each(ParamTensor::zero_grad);
    }

    /// Total scalar count across all tensors.
    pub fn total_len(&self) -> usize {
        self.tensors.iter().map(ParamTensor::len).sum()
    }

    /// Copies values from another set with identical layout (names and
    /// shapes in the same order).
    pub fn load_values_from(&mut self, other: &ParamSet) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "parameter count mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        for i in 0..self.len() {
            if self.names[i] != other.names[i] || self.tensors[i].shape() != other.tensors[i].shape()
            {
                return Err(Error::Shape(format!(
                    "parameter {} mismatch: {}{:?} vs {}{:?}",
                    i,
                    self.names[i],
                    self.tensors[i].shape(),
                    other.names[i],
                    other.tensors[i].shape()
                )));
            }
            self.tensors[i]
                .values_mut()
                .copy_from_slice(other.tensors[i].values());
        }
        Ok(())
    }
}
