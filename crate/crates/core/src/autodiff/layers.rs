//! Network building blocks: dense layers, MLPs, embedding tables and a
//! 4-gate LSTM cell. All parameters live in a [`ParamSet`]; forward passes
//! are recorded on a [`Tape`].

use rand::Rng;

use super::tape::{Activation, NodeId, Tape};
use super::tensor::{ParamId, ParamSet, ParamTensor};
use crate::Result;

/// Fully connected layer `activation(W x + b)`.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    weight: ParamId,
    bias: ParamId,
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let weight = params.register(
            format!("{name}.weight"),
            ParamTensor::uniform_fan_in(vec![out_dim, in_dim], in_dim, rng)?,
        );
        let bias = params.register(
            format!("{name}.bias"),
            ParamTensor::uniform_fan_in(vec![out_dim], in_dim, rng)?,
        );
        Ok(Self {
            weight,
            bias,
            in_dim,
            out_dim,
            activation,
        })
    }

    pub fn forward(&self, tape: &mut Tape, params: &ParamSet, x: NodeId) -> Result<NodeId> {
        let w = tape.param(params, self.weight);
        let b = tape.param(params, self.bias);
        let z = tape.matvec(w, x, self.out_dim, self.in_dim)?;
        let zb = tape.add(z, b)?;
        Ok(tape.activate(zb, self.activation))
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }
}

/// Stack of dense layers; `hidden_activation` between layers, last layer
/// uses `output_activation`.
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
}

impl Mlp {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        dims: &[usize],
        hidden_activation: Activation,
        output_activation: Activation,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        assert!(dims.len() >= 2, "mlp needs at least input and output dims");
        let mut layers = Vec::new();
        for i in 0..dims.len() - 1 {
            let act = if i + 2 == dims.len() {
                output_activation
            } else {
                hidden_activation
            };
            layers.push(DenseLayer::new(
                params,
                &format!("{name}.{i}"),
                dims[i],
                dims[i + 1],
                act,
                rng,
            )?);
        }
        Ok(Self { layers })
    }

    pub fn forward(&self, tape: &mut Tape, params: &ParamSet, x: NodeId) -> Result<NodeId> {
        let mut h = x;
        for layer in &self.layers {
            h = layer.forward(tape, params, h)?;
        }
        Ok(h)
    }
}

/// Trainable lookup table of shape `rows x cols`.
#[derive(Debug, Clone)]
pub struct Embedding {
    table: ParamId,
    rows: usize,
    cols: usize,
}

impl Embedding {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        rows: usize,
        cols: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let table = params.register(
            name,
            ParamTensor::uniform_fan_in(vec![rows, cols], cols, rng)?,
        );
        Ok(Self { table, rows, cols })
    }

    pub fn lookup(&self, tape: &mut Tape, params: &ParamSet, row: usize) -> Result<NodeId> {
        let t = tape.param(params, self.table);
        tape.gather_row(t, self.cols, row)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn param_id(&self) -> ParamId {
        self.table
    }
}

/// Standard 4-gate LSTM cell.
///
/// i = sigmoid(Wxi x + Whi h + bi), f = sigmoid(Wxf x + Whf h + bf),
/// g = tanh(Wxg x + Whg h + bg),    o = sigmoid(Wxo x + Who h + bo),
/// c' = f*c + i*g, h' = o*tanh(c').
#[derive(Debug, Clone)]
pub struct LstmCell {
    input_size: usize,
    hidden_size: usize,
    gates: [GateParams; 4],
}

#[derive(Debug, Clone)]
struct GateParams {
    wx: ParamId,
    wh: ParamId,
    b: ParamId,
}

const GATE_NAMES: [&str; 4] = ["input", "forget", "cell", "output"];

impl LstmCell {
    pub fn new(
        params: &mut ParamSet,
        name: &str,
        input_size: usize,
        hidden_size: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let fan_in = input_size + hidden_size;
        let mut gates = Vec::with_capacity(4);
        for gate in GATE_NAMES {
            let wx = params.register(
                format!("{name}.{gate}.wx"),
                ParamTensor::uniform_fan_in(vec![hidden_size, input_size], fan_in, rng)?,
            );
            let wh = params.register(
                format!("{name}.{gate}.wh"),
                ParamTensor::uniform_fan_in(vec![hidden_size, hidden_size], fan_in, rng)?,
            );
            let b = params.register(
                format!("{name}.{gate}.b"),
                ParamTensor::zeros(vec![hidden_size])?,
            );
            gates.push(GateParams { wx, wh, b });
        }
        Ok(Self {
            input_size,
            hidden_size,
            gates: [
                gates[0].clone(),
                gates[1].clone(),
                gates[2].clone(),
                gates[3].clone(),
            ],
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    /// Zero initial hidden and cell state.
    pub fn zero_state(&self, tape: &mut Tape) -> (NodeId, NodeId) {
        let h = tape.leaf(&vec![0.0; self.hidden_size]);
        let c = tape.leaf(&vec![0.0; self.hidden_size]);
        (h, c)
    }

    fn gate(
        &self,
        tape: &mut Tape,
        params: &ParamSet,
        idx: usize,
        x: NodeId,
        h: NodeId,
        activation: Activation,
    ) -> Result<NodeId> {
        let g = &self.gates[idx];
        let wx = tape.param(params, g.wx);
        let wh = tape.param(params, g.wh);
        let b = tape.param(params, g.b);
        let zx = tape.matvec(wx, x, self.hidden_size, self.input_size)?;
        let zh = tape.matvec(wh, h, self.hidden_size, self.hidden_size)?;
        let z = tape.add(zx, zh)?;
        let zb = tape.add(z, b)?;
        Ok(tape.activate(zb, activation))
    }

    /// One recurrence step; returns `(h', c')`.
    pub fn step(
        &self,
        tape: &mut Tape,
        params: &ParamSet,
        x: NodeId,
        h: NodeId,
        c: NodeId,
    ) -> Result<(NodeId, NodeId)> {
        if tape.value(x).len() != self.input_size {
            return Err(crate::Error::Shape(format!(
                "lstm input has {} values, expected {}",
                tape.value(x).len(),
                self.input_size
            )));
        }
        if tape.value(h).len() != self.hidden_size || tape.value(c).len() != self.hidden_size {
            return Err(crate::Error::Shape(format!(
                "lstm state has lengths {}/{}, expected {}",
                tape.value(h).len(),
                tape.value(c).len(),
                self.hidden_size
            )));
        }
        let i = self.gate(tape, params, 0, x, h, Activation::Sigmoid)?;
        let f = self.gate(tape, params, 1, x, h, Activation::Sigmoid)?;
        let g = self.gate(tape, params, 2, x, h, Activation::Tanh)?;
        let o = self.gate(tape, params, 3, x, h, Activation::Sigmoid)?;
        let fc = tape.mul(f, c)?;
        let ig = tape.mul(i, g)?;
        let c_next = tape.add(fc, ig)?;
        let tc = tape.activate(c_next, Activation::Tanh);
        let h_next = tape.mul(o, tc)?;
        Ok((h_next, c_next))
    }
}
