//! Actor-critic multilayer perceptron with hand-written backprop.
//!
//! A shared tanh trunk feeds two linear heads: policy logits (one per
//! service) and a scalar value. All parameters live in one flat vector so the
//! optimizer, gradient clipping and checkpoints treat them uniformly.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Network input: a dense vector or the indices of the ones of a 0/1 vector.
/// Environment observations are one-hot, so they use the sparse form.
#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    Dense(Vec<f64>),
    Binary(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSpec {
    pub input: usize,
    pub hidden: Vec<usize>,
    pub actions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layer {
    input: usize,
    output: usize,
    weights: usize,
    bias: usize,
}

impl Layer {
    fn param_count(&self) -> usize {
        self.input * self.output + self.output
    }
}

impl NetSpec {
    /// Trunk layers, then the policy head, then the value head.
    fn layers(&self) -> Vec<Layer> {
        let mut layers = Vec::with_capacity(self.hidden.len() + 2);
        let mut offset = 0;
        let mut push = |input: usize, output: usize| {
            let layer = Layer { input, output, weights: offset, bias: offset + input * output };
            offset += layer.param_count();
            layers.push(layer);
        };
        let mut width = self.input;
        for &h in &self.hidden {
            push(width, h);
            width = h;
        }
        push(width, self.actions);
        push(width, 1);
        layers
    }

    pub fn param_count(&self) -> usize {
        self.layers().iter().map(Layer::param_count).sum()
    }
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    input: Features,
    /// Post-tanh output of each trunk layer.
    hidden: Vec<Vec<f64>>,
    pub logits: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyNet {
    spec: NetSpec,
    layers: Vec<Layer>,
    params: Vec<f64>,
}

impl PolicyNet {
    /// Orthogonal initialization: gain √2 in the trunk, 0.01 for the policy
    /// head (near-uniform initial policy) and 1 for the value head. Biases
    /// start at zero.
    pub fn new<R: Rng + ?Sized>(spec: NetSpec, rng: &mut R) -> Self {
        let layers = spec.layers();
        let mut params = vec![0.0; spec.param_count()];
        let trunk = spec.hidden.len();
        for (i, layer) in layers.iter().enumerate() {
            let gain = if i < trunk {
                2f64.sqrt()
            } else if i == trunk {
                0.01
            } else {
                1.0
            };
            let w = orthogonal(layer.output, layer.input, gain, rng);
            params[layer.weights..layer.weights + w.len()].copy_from_slice(&w);
        }
        Self { spec, layers, params }
    }

    pub fn from_parts(spec: NetSpec, params: Vec<f64>) -> Option<Self> {
        let layers = spec.layers();
        (params.len() == spec.param_count()).then_some(Self { spec, layers, params })
    }

    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Whether `features` has the shape the network expects.
    pub fn accepts(&self, features: &Features) -> bool {
        match features {
            Features::Dense(x) => x.len() == self.spec.input,
            Features::Binary(idx) => idx.iter().all(|&i| i < self.spec.input),
        }
    }

    pub fn forward(&self, features: &Features) -> ForwardPass {
        debug_assert!(self.accepts(features));
        let trunk = self.spec.hidden.len();
        let mut hidden = Vec::with_capacity(trunk);
        for (i, layer) in self.layers[..trunk].iter().enumerate() {
            let mut z = self.affine(layer, if i == 0 { None } else { Some(&hidden[i - 1]) }, features);
            z.iter_mut().for_each(|v| *v = v.tanh());
            hidden.push(z);
        }
        let last = hidden.last();
        let logits = self.affine(&self.layers[trunk], last, features);
        let value = self.affine(&self.layers[trunk + 1], last, features)[0];
        ForwardPass { input: features.clone(), hidden, logits, value }
    }

    /// `W·x + b`, where `x` is `prev` or, for `None`, the network input.
    fn affine(&self, layer: &Layer, prev: Option<&Vec<f64>>, input: &Features) -> Vec<f64> {
        let w = &self.params[layer.weights..layer.bias];
        let mut out = self.params[layer.bias..layer.bias + layer.output].to_vec();
        match (prev, input) {
            (Some(x), _) | (None, Features::Dense(x)) => {
                for (o, acc) in out.iter_mut().enumerate() {
                    let row = &w[o * layer.input..(o + 1) * layer.input];
                    *acc += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                }
            }
            (None, Features::Binary(active)) => {
                for (o, acc) in out.iter_mut().enumerate() {
                    let row = &w[o * layer.input..(o + 1) * layer.input];
                    *acc += active.iter().map(|&i| row[i]).sum::<f64>();
                }
            }
        }
        out
    }

    /// Accumulates into `grad` the gradient of a loss whose partial
    /// derivatives with respect to the logits and the value are given.
    pub fn backward(&self, pass: &ForwardPass, d_logits: &[f64], d_value: f64, grad: &mut [f64]) {
        let trunk = self.spec.hidden.len();
        let head_input = pass.hidden.last();
        let width = self.layers[trunk].input;
        let mut d_hidden = vec![0.0; width];

        self.accumulate(&self.layers[trunk], d_logits, head_input, &pass.input, grad, Some(&mut d_hidden));
        self.accumulate(&self.layers[trunk + 1], &[d_value], head_input, &pass.input, grad, Some(&mut d_hidden));

        for i in (0..trunk).rev() {
            let a = &pass.hidden[i];
            let dz: Vec<f64> = d_hidden.iter().zip(a).map(|(d, a)| d * (1.0 - a * a)).collect();
            let prev = if i == 0 { None } else { Some(&pass.hidden[i - 1]) };
            let mut d_prev = vec![0.0; self.layers[i].input];
            self.accumulate(&self.layers[i], &dz, prev, &pass.input, grad, (i > 0).then_some(&mut d_prev));
            d_hidden = d_prev;
        }
    }

    fn accumulate(
        &self,
        layer: &Layer,
        d_out: &[f64],
        prev: Option<&Vec<f64>>,
        input: &Features,
        grad: &mut [f64],
        d_in: Option<&mut Vec<f64>>,
    ) {
        let n_in = layer.input;
        {
            let gw = &mut grad[layer.weights..layer.bias];
            match (prev, input) {
                (Some(x), _) | (None, Features::Dense(x)) => {
                    for (o, &d) in d_out.iter().enumerate() {
                        if d == 0.0 {
                            continue;
                        }
                        let row = &mut gw[o * n_in..(o + 1) * n_in];
                        row.iter_mut().zip(x).for_each(|(g, xi)| *g += d * xi);
                    }
                }
                (None, Features::Binary(active)) => {
                    for (o, &d) in d_out.iter().enumerate() {
                        for &i in active {
                            gw[o * n_in + i] += d;
                        }
                    }
                }
            }
        }
        for (g, d) in grad[layer.bias..layer.bias + layer.output].iter_mut().zip(d_out) {
            *g += d;
        }
        if let Some(d_in) = d_in {
            let w = &self.params[layer.weights..layer.bias];
            for (o, &d) in d_out.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &w[o * n_in..(o + 1) * n_in];
                d_in.iter_mut().zip(row).for_each(|(acc, wi)| *acc += d * wi);
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }
}

/// `rows × cols` matrix (row-major) with orthonormal rows or columns, scaled by `gain`.
fn orthogonal<R: Rng + ?Sized>(rows: usize, cols: usize, gain: f64, rng: &mut R) -> Vec<f64> {
    let (tall, short) = (rows.max(cols), rows.min(cols));
    // `short` orthonormal vectors of length `tall`, via modified Gram-Schmidt.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(short);
    while basis.len() < short {
        let mut v: Vec<f64> = (0..tall).map(|_| rng.sample(StandardNormal)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            // Basis vectors are the columns of a tall matrix or the rows of a wide one.
            out[r * cols + c] = gain * if rows >= cols { basis[c][r] } else { basis[r][c] };
        }
    }
    out
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    logits.iter().map(|l| l - lse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net(input: usize, hidden: Vec<usize>, actions: usize) -> PolicyNet {
        PolicyNet::new(NetSpec { input, hidden, actions }, &mut ChaCha8Rng::seed_from_u64(1))
    }

    #[test]
    fn orthogonal_rows_and_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (rows, cols) in [(5, 3), (3, 5), (4, 4)] {
            let w = orthogonal(rows, cols, 1.0, &mut rng);
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            if rows >= cols {
                let col = |c: usize| (0..rows).map(|r| w[r * cols + c]).collect::<Vec<_>>();
                for a in 0..cols {
                    for b in 0..cols {
                        let expect = if a == b { 1.0 } else { 0.0 };
                        assert!((dot(&col(a), &col(b)) - expect).abs() < 1e-10);
                    }
                }
            } else {
                for a in 0..rows {
                    for b in 0..rows {
                        let expect = if a == b { 1.0 } else { 0.0 };
                        assert!((dot(&w[a * cols..(a + 1) * cols], &w[b * cols..(b + 1) * cols]) - expect).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn sparse_and_dense_inputs_agree() {
        let n = net(6, vec![5, 4], 3);
        let dense = Features::Dense(vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
        let sparse = Features::Binary(vec![1, 4]);
        let (a, b) = (n.forward(&dense), n.forward(&sparse));
        for (x, y) in a.logits.iter().zip(&b.logits) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.value - b.value).abs() < 1e-12);

        let mut ga = vec![0.0; n.param_count()];
        let mut gb = vec![0.0; n.param_count()];
        n.backward(&a, &[0.3, -0.2, 0.1], 0.7, &mut ga);
        n.backward(&b, &[0.3, -0.2, 0.1], 0.7, &mut gb);
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut n = net(3, vec![4], 2);
        let x = Features::Dense(vec![0.5, -1.0, 0.25]);
        // Loss = 0.7·logit0 − 1.1·logit1 + 0.4·value.
        let loss = |n: &PolicyNet| {
            let f = n.forward(&x);
            0.7 * f.logits[0] - 1.1 * f.logits[1] + 0.4 * f.value
        };
        let mut grad = vec![0.0; n.param_count()];
        n.backward(&n.forward(&x), &[0.7, -1.1], 0.4, &mut grad);
        let h = 1e-6;
        for i in 0..n.param_count() {
            let orig = n.params()[i];
            n.params_mut()[i] = orig + h;
            let up = loss(&n);
            n.params_mut()[i] = orig - h;
            let down = loss(&n);
            n.params_mut()[i] = orig;
            assert!(((up - down) / (2.0 * h) - grad[i]).abs() < 1e-7, "param {i}");
        }
    }

    #[test]
    fn initial_policy_is_near_uniform() {
        let n = net(20, vec![128, 128], 10);
        let p = softmax(&n.forward(&Features::Binary(vec![0, 5, 19])).logits);
        assert!(p.iter().all(|&x| (x - 0.1).abs() < 0.01));
    }

    #[test]
    fn softmax_identities() {
        let logits = [1000.0, 999.0, -5.0];
        let p = softmax(&logits);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let lp = log_softmax(&logits);
        for (a, b) in p.iter().zip(&lp) {
            assert!((a.ln() - b).abs() < 1e-9 || *a == 0.0);
        }
    }

    #[test]
    fn from_parts_checks_length() {
        let spec = NetSpec { input: 2, hidden: vec![], actions: 2 };
        assert_eq!(spec.param_count(), 2 * 2 + 2 + 2 + 1);
        assert!(PolicyNet::from_parts(spec.clone(), vec![0.0; 9]).is_some());
        assert!(PolicyNet::from_parts(spec, vec![0.0; 8]).is_none());
    }
}
