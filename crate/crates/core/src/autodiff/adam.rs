//! Adam optimizer with bias correction.

use super::tensor::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ..Self::default()
        }
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Per-parameter first/second moment buffers and the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    config: AdamConfig,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
    step: u64,
}

impl AdamState {
    pub fn new(params: &ParamSet, config: AdamConfig) -> Self {
        let first_moment = params.iter().map(|(_, t)| vec![0.0; t.len()]).collect();
        let second_moment = params.iter().map(|(_, t)| vec![0.0; t.len()]).collect();
        Self {
            config,
            first_moment,
            second_moment,
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Applies one Adam update from the gradients currently stored in
    /// `params`. Gradients are left untouched; the caller zeroes them.
    pub fn step(&mut self, params: &mut ParamSet) {
        self.step += 1;
        let t = self.step as i32;
        let c = self.config;
        let bc1 = 1.0 - c.beta1.powi(t);
        let bc2 = 1.0 - c.beta2.powi(t);
        for (idx, id) in params.ids().enumerate().collect::<Vec<_>>() {
            let tensor = params.get_mut(id);
            let m = &mut self.first_moment[idx];
            let v = &mut self.second_moment[idx];
            let n = tensor.len();
            for i in 0..n {
                let g = tensor.grad()[i];
                m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
                v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                tensor.values_mut()[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::tensor::ParamTensor;

    fn one_param(v: f64) -> (ParamSet, crate::autodiff::ParamId) {
        let mut ps = ParamSet::new();
        let id = ps.register("p", ParamTensor::new(vec![1], vec![v]).unwrap());
        (ps, id)
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let (mut ps, id) = one_param(1.25);
        let mut adam = AdamState::new(&ps, AdamConfig::default());
        for _ in 0..5 {
            adam.step(&mut ps);
        }
        assert_eq!(ps.get(id).values(), &[1.25]);
    }

    #[test]
    fn step_counter_increments_once_per_call() {
        let (mut ps, _) = one_param(0.0);
        let mut adam = AdamState::new(&ps, AdamConfig::default());
        assert_eq!(adam.step_count(), 0);
        adam.step(&mut ps);
        assert_eq!(adam.step_count(), 1);
        adam.step(&mut ps);
        assert_eq!(adam.step_count(), 2);
    }

    #[test]
    fn constant_gradient_moves_parameter_monotonically() {
        // Positive constant gradient: parameter must strictly decrease at
        // every step (bias-corrected m/sqrt(v) = sign(g) for constant g).
        let (mut ps, id) = one_param(0.0);
        let mut adam = AdamState::new(&ps, AdamConfig::with_learning_rate(0.01));
        let mut prev = ps.get(id).values()[0];
        for _ in 0..50 {
            ps.get_mut(id).grad_mut()[0] = 2.5;
            adam.step(&mut ps);
            let cur = ps.get(id).values()[0];
            assert!(cur < prev, "expected monotone decrease, {cur} >= {prev}");
            prev = cur;
        }
        // And gradients are untouched by the optimizer.
        assert_eq!(ps.get(id).grad(), &[2.5]);
    }
}
