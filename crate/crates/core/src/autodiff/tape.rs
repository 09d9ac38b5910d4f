//! Reverse-mode automatic differentiation at vector granularity.
//!
//! A [`Tape`] records a forward pass as a sequence of vector-valued nodes.
//! Each node stores its values and a gradient buffer; [`Tape::backward`]
//! seeds the (scalar) output with 1 and walks the record in reverse,
//! accumulating parameter gradients into the owning [`ParamSet`].

use super::tensor::{ParamId, ParamSet};
use crate::{Error, Result};

/// Handle to a node recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

/// Elementwise nonlinearity applied by dense layers and gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => stable_sigmoid(z),
        }
    }

    /// Derivative expressed through the activation output `y` (and, for
    /// relu, the pre-activation `z`). The relu subgradient at the kink is 0.
    fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }
}

fn stable_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Row-major matrix-vector product `out = W x`, shared by forward and eval
/// paths so both compute bit-identical results.
pub fn matvec_into(w: &[f64], x: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    debug_assert_eq!(w.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(out.len(), rows);
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        let mut acc = 0.0;
        for c in 0..cols {
            acc += row[c] * x[c];
        }
        out[r] = acc;
    }
}

enum Op {
    Leaf,
    Param(ParamId),
    MatVec {
        w: NodeId,
        x: NodeId,
        rows: usize,
        cols: usize,
    },
    Add {
        a: NodeId,
        b: NodeId,
    },
    Sub {
        a: NodeId,
        b: NodeId,
    },
    Mul {
        a: NodeId,
        b: NodeId,
    },
    /// Elementwise `mul * x + add`; only the slope enters the backward
    /// pass.
    Affine {
        x: NodeId,
        mul: f64,
    },
    Activate {
        x: NodeId,
        kind: Activation,
    },
    Concat {
        parts: Vec<NodeId>,
    },
    GatherRow {
        table: NodeId,
        cols: usize,
        row: usize,
    },
    /// Elementwise mean over same-length vectors.
    Mean {
        parts: Vec<NodeId>,
    },
    /// Scalar sum of all elements of `x`.
    SumElems {
        x: NodeId,
    },
    /// Scalar sum of scalar nodes.
    SumScalars {
        parts: Vec<NodeId>,
    },
}

struct Node {
    op: Op,
    values: Vec<f64>,
    grad: Vec<f64>,
}

/// Forward-pass recorder. One tape serves one loss graph; it may be
/// backwarded repeatedly (gradients inside the tape are re-seeded each
/// time, while parameter gradients accumulate into the `ParamSet`).
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
    param_nodes: Vec<(ParamId, NodeId)>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, values: Vec<f64>) -> NodeId {
        let n = values.len();
        self.nodes.push(Node {
            op,
            values,
            grad: vec![0.0; n],
        });
        NodeId(self.nodes.len() - 1)
    }

    /// Records an input (or constant) vector.
    pub fn leaf(&mut self, data: &[f64]) -> NodeId {
        self.push(Op::Leaf, data.to_vec())
    }

    pub fn scalar_leaf(&mut self, v: f64) -> NodeId {
        self.leaf(&[v])
    }

    /// Materializes a parameter on the tape. Each parameter gets at most
    /// one node per tape, so gradient fan-in accumulates naturally.
    pub fn param(&mut self, params: &ParamSet, id: ParamId) -> NodeId {
        if let Some(&(_, node)) = self.param_nodes.iter().find(|(pid, _)| *pid == id) {
            return node;
        }
        let node = self.push(Op::Param(id), params.get(id).values().to_vec());
        self.param_nodes.push((id, node));
        node
    }

    pub fn value(&self, id: NodeId) -> &[f64] {
        &self.nodes[id.0].values
    }

    /// Value of a length-1 node.
    pub fn scalar(&self, id: NodeId) -> Result<f64> {
        let v = self.value(id);
        if v.len() != 1 {
            return Err(Error::Shape(format!("expected scalar node, len {}", v.len())));
        }
        Ok(v[0])
    }

    fn len_of(&self, id: NodeId) -> usize {
        self.nodes[id.0].values.len()
    }

    pub fn matvec(&mut self, w: NodeId, x: NodeId, rows: usize, cols: usize) -> Result<NodeId> {
        if self.len_of(w) != rows * cols {
            return Err(Error::Shape(format!(
                "matvec weight has {} values, expected {rows}x{cols}",
                self.len_of(w)
            )));
        }
        if self.len_of(x) != cols {
            return Err(Error::Shape(format!(
                "matvec input has {} values, expected {cols}",
                self.len_of(x)
            )));
        }
        let mut out = vec![0.0; rows];
        matvec_into(
            &self.nodes[w.0].values,
            &self.nodes[x.0].values,
            rows,
            cols,
            &mut out,
        );
        Ok(self.push(Op::MatVec { w, x, rows, cols }, out))
    }

    fn binary(&mut self, a: NodeId, b: NodeId, f: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
        if self.len_of(a) != self.len_of(b) {
            return Err(Error::Shape(format!(
                "elementwise op on lengths {} and {}",
                self.len_of(a),
                self.len_of(b)
            )));
        }
        Ok(self.nodes[a.0]
            .values
            .iter()
            .zip(self.nodes[b.0].values.iter())
            .map(|(&x, &y)| f(x, y))
            .collect())
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let out = self.binary(a, b, |x, y| x + y)?;
        Ok(self.push(Op::Add { a, b }, out))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let out = self.binary(a, b, |x, y| x - y)?;
        Ok(self.push(Op::Sub { a, b }, out))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let out = self.binary(a, b, |x, y| x * y)?;
        Ok(self.push(Op::Mul { a, b }, out))
    }

    /// Elementwise `mul * x + add`.
    pub fn affine(&mut self, x: NodeId, mul: f64, add: f64) -> NodeId {
        let out: Vec<f64> = self.nodes[x.0].values.iter().map(|&v| mul * v + add).collect();
        self.push(Op::Affine { x, mul }, out)
    }

    pub fn activate(&mut self, x: NodeId, kind: Activation) -> NodeId {
        let out: Vec<f64> = self.nodes[x.0].values.iter().map(|&z| kind.apply(z)).collect();
        self.push(Op::Activate { x, kind }, out)
    }

    pub fn concat(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        if parts.is_empty() {
            return Err(Error::Shape("concat of zero parts".into()));
        }
        let mut out = Vec::new();
        for &p in parts {
            out.extend_from_slice(&self.nodes[p.0].values);
        }
        Ok(self.push(
            Op::Concat {
                parts: parts.to_vec(),
            },
            out,
        ))
    }

    /// Extracts row `row` of a `rows x cols` matrix node.
    pub fn gather_row(&mut self, table: NodeId, cols: usize, row: usize) -> Result<NodeId> {
        let total = self.len_of(table);
        if total % cols != 0 || (row + 1) * cols > total {
            return Err(Error::Shape(format!(
                "gather row {row} of {total}-value table with {cols} cols"
            )));
        }
        let out = self.nodes[table.0].values[row * cols..(row + 1) * cols].to_vec();
        Ok(self.push(Op::GatherRow { table, cols, row }, out))
    }

    /// Elementwise mean over same-length vectors.
    pub fn mean(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        if parts.is_empty() {
            return Err(Error::Shape("mean of zero parts".into()));
        }
        let n = self.len_of(parts[0]);
        if parts.iter().any(|&p| self.len_of(p) != n) {
            return Err(Error::Shape("mean over vectors of unequal length".into()));
        }
        let scale = 1.0 / parts.len() as f64;
        let mut out = vec![0.0; n];
        for &p in parts {
            for (o, v) in out.iter_mut().zip(self.nodes[p.0].values.iter()) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|o| *o *= scale);
        Ok(self.push(
            Op::Mean {
                parts: parts.to_vec(),
            },
            out,
        ))
    }

    /// Scalar sum of all elements of `x`.
    pub fn sum_elems(&mut self, x: NodeId) -> NodeId {
        let s: f64 = self.nodes[x.0].values.iter().sum();
        self.push(Op::SumElems { x }, vec![s])
    }

    /// Scalar sum of scalar nodes. An empty list yields the constant 0.
    pub fn sum_scalars(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        if parts.is_empty() {
            return Ok(self.scalar_leaf(0.0));
        }
        let mut s = 0.0;
        for &p in parts {
            if self.len_of(p) != 1 {
                return Err(Error::Shape("sum_scalars over non-scalar node".into()));
            }
            s += self.nodes[p.0].values[0];
        }
        Ok(self.push(
            Op::SumScalars {
                parts: parts.to_vec(),
            },
            vec![s],
        ))
    }

    /// Propagates d(out)/d(node) backwards from a scalar `out` node and
    /// accumulates parameter gradients into `params`.
    pub fn backward(&mut self, out: NodeId, params: &mut ParamSet) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::State("backward before any forward pass".into()));
        }
        if self.len_of(out) != 1 {
            return Err(Error::Shape(
                "backward requires a scalar output node".into(),
            ));
        }
        for node in self.nodes.iter_mut() {
            node.grad.iter_mut().for_each(|g| *g = 0.0);
        }
        self.nodes[out.0].grad[0] = 1.0;

        for i in (0..self.nodes.len()).rev() {
            // Split borrows: take the node's grad out, write into earlier nodes.
            let grad = std::mem::take(&mut self.nodes[i].grad);
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::Param(id) => {
                    let id = *id;
                    for (g, acc) in grad.iter().zip(params.get_mut(id).grad_mut()) {
                        *acc += g;
                    }
                }
                Op::MatVec { w, x, rows, cols } => {
                    let (w, x, rows, cols) = (*w, *x, *rows, *cols);
                    let xv = std::mem::take(&mut self.nodes[x.0].values);
                    let wv = std::mem::take(&mut self.nodes[w.0].values);
                    {
                        let gw = &mut self.nodes[w.0].grad;
                        for r in 0..rows {
                            let go = grad[r];
                            if go != 0.0 {
                                for c in 0..cols {
                                    gw[r * cols + c] += go * xv[c];
                                }
                            }
                        }
                    }
                    {
                        let gx = &mut self.nodes[x.0].grad;
                        for r in 0..rows {
                            let go = grad[r];
                            if go != 0.0 {
                                let row = &wv[r * cols..(r + 1) * cols];
                                for c in 0..cols {
                                    gx[c] += go * row[c];
                                }
                            }
                        }
                    }
                    self.nodes[x.0].values = xv;
                    self.nodes[w.0].values = wv;
                }
                Op::Add { a, b } => {
                    let (a, b) = (*a, *b);
                    for (g, acc) in grad.iter().zip(self.nodes[a.0].grad.iter_mut()) {
                        *acc += g;
                    }
                    for (g, acc) in grad.iter().zip(self.nodes[b.0].grad.iter_mut()) {
                        *acc += g;
                    }
                }
                Op::Sub { a, b } => {
                    let (a, b) = (*a, *b);
                    for (g, acc) in grad.iter().zip(self.nodes[a.0].grad.iter_mut()) {
                        *acc += g;
                    }
                    for (g, acc) in grad.iter().zip(self.nodes[b.0].grad.iter_mut()) {
                        *acc -= g;
                    }
                }
                Op::Mul { a, b } => {
                    let (a, b) = (*a, *b);
                    let av = std::mem::take(&mut self.nodes[a.0].values);
                    let bv = std::mem::take(&mut self.nodes[b.0].values);
                    for ((g, acc), bvi) in grad.iter().zip(self.nodes[a.0].grad.iter_mut()).zip(&bv)
                    {
                        *acc += g * bvi;
                    }
                    for ((g, acc), avi) in grad.iter().zip(self.nodes[b.0].grad.iter_mut()).zip(&av)
                    {
                        *acc += g * avi;
                    }
                    self.nodes[a.0].values = av;
                    self.nodes[b.0].values = bv;
                }
                Op::Affine { x, mul } => {
                    let (x, mul) = (*x, *mul);
                    for (g, acc) in grad.iter().zip(self.nodes[x.0].grad.iter_mut()) {
                        *acc += g * mul;
                    }
                }
                Op::Activate { x, kind } => {
                    let (x, kind) = (*x, *kind);
                    let yv = std::mem::take(&mut self.nodes[i].values);
                    let xv = std::mem::take(&mut self.nodes[x.0].values);
                    for (j, (g, acc)) in
                        grad.iter().zip(self.nodes[x.0].grad.iter_mut()).enumerate()
                    {
                        *acc += g * kind.derivative(xv[j], yv[j]);
                    }
                    self.nodes[x.0].values = xv;
                    self.nodes[i].values = yv;
                }
                Op::Concat { parts } => {
                    let parts = parts.clone();
                    let mut offset = 0;
                    for p in parts {
                        let n = self.nodes[p.0].values.len();
                        for (g, acc) in grad[offset..offset + n]
                            .iter()
                            .zip(self.nodes[p.0].grad.iter_mut())
                        {
                            *acc += g;
                        }
                        offset += n;
                    }
                }
                Op::GatherRow { table, cols, row } => {
                    let (table, cols, row) = (*table, *cols, *row);
                    for (g, acc) in grad
                        .iter()
                        .zip(self.nodes[table.0].grad[row * cols..(row + 1) * cols].iter_mut())
                    {
                        *acc += g;
                    }
                }
                Op::Mean { parts } => {
                    let parts = parts.clone();
                    let scale = 1.0 / parts.len() as f64;
                    for p in parts {
                        for (g, acc) in grad.iter().zip(self.nodes[p.0].grad.iter_mut()) {
                            *acc += g * scale;
                        }
                    }
                }
                Op::SumElems { x } => {
                    let x = *x;
                    let g = grad[0];
                    for acc in self.nodes[x.0].grad.iter_mut() {
                        *acc += g;
                    }
                }
                Op::SumScalars { parts } => {
                    let parts = parts.clone();
                    let g = grad[0];
                    for p in parts {
                        self.nodes[p.0].grad[0] += g;
                    }
                }
            }
            self.nodes[i].grad = grad;
        }
        Ok(())
    }
}
