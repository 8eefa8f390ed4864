//! Small differentiable classifiers with analytic gradients.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// A differentiable multi-class classifier on `ℝⁿ`.
pub trait Classifier: Sync {
    fn dim(&self) -> usize;
    fn n_classes(&self) -> usize;
    fn scores(&self, x: &[f64]) -> Vec<f64>;
    /// `∇ₓ s_k(x)`.
    fn score_gradient(&self, x: &[f64], k: usize) -> Vec<f64>;

    /// Argmax of the scores; ties go to the lowest class index.
    fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in v.iter().enumerate().skip(1) {
        if *s > v[best] {
            best = i;
        }
    }
    best
}

/// Margin loss `max_{j≠label} s_j(x) - s_label(x)` and its input gradient.
/// Positive margin means the point is misclassified.
pub fn margin_and_gradient<C: Classifier + ?Sized>(
    model: &C,
    x: &[f64],
    label: usize,
) -> (f64, Vec<f64>) {
    let s = model.scores(x);
    let runner_up = (0..s.len())
        .filter(|&j| j != label)
        .max_by(|&a, &b| s[a].total_cmp(&s[b]).then(b.cmp(&a)));
    match runner_up {
        None => (f64::NEG_INFINITY, vec![0.0; x.len()]),
        Some(j) => {
            let gj = model.score_gradient(x, j);
            let gl = model.score_gradient(x, label);
            (
                s[j] - s[label],
                gj.iter().zip(&gl).map(|(a, b)| a - b).collect(),
            )
        }
    }
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Mean softmax cross-entropy over a labeled batch, with per-example
/// `dL/ds` (probabilities minus one-hot, divided by batch size).
pub(crate) fn cross_entropy<'a>(
    all_scores: impl Iterator<Item = (Vec<f64>, usize)> + 'a,
    count: usize,
) -> (f64, Vec<Vec<f64>>) {
    let mut loss = 0.0;
    let mut dscores = Vec::with_capacity(count);
    for (s, y) in all_scores {
        let mut p = softmax(&s);
        loss -= p[y].max(f64::MIN_POSITIVE).ln();
        p[y] -= 1.0;
        p.iter_mut().for_each(|v| *v /= count as f64);
        dscores.push(p);
    }
    (loss / count as f64, dscores)
}

/// Affine scores `W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    n: usize,
    m: usize,
    /// `m × n`, row-major.
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl LinearModel {
    pub fn new(weights: Vec<Vec<f64>>, biases: Vec<f64>) -> Result<Self> {
        let m = weights.len();
        if m == 0 || biases.len() != m {
            return Err(Error::Invalid(
                "need one weight row and one bias per class".into(),
            ));
        }
        let n = weights[0].len();
        if n == 0 || weights.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(
                "weight rows must share a positive length".into(),
            ));
        }
        let weights = weights.concat();
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("model parameters must be finite".into()));
        }
        Ok(LinearModel {
            n,
            m,
            weights,
            biases,
        })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        LinearModel {
            n,
            m,
            weights: vec![0.0; n * m],
            biases: vec![0.0; m],
        }
    }

    pub fn weight_row(&self, k: usize) -> &[f64] {
        &self.weights[k * self.n..(k + 1) * self.n]
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Flattened parameters: weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.extend_from_slice(&self.biases);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let nw = self.weights.len();
        self.weights.copy_from_slice(&p[..nw]);
        self.biases.copy_from_slice(&p[nw..]);
    }

    /// Mean cross-entropy on `(points, labels)` and its gradient in [`params`](Self::params) order.
    pub fn loss_and_param_gradient(
        &self,
        points: &[Vec<f64>],
        labels: &[usize],
    ) -> (f64, Vec<f64>) {
        let (loss, ds) = cross_entropy(
            points.iter().zip(labels).map(|(x, &y)| (self.scores(x), y)),
            points.len(),
        );
        let mut grad = vec![0.0; self.weights.len() + self.m];
        for (x, d) in points.iter().zip(&ds) {
            for k in 0..self.m {
                let row = &mut grad[k * self.n..(k + 1) * self.n];
                for (g, xi) in row.iter_mut().zip(x) {
                    *g += d[k] * xi;
                }
                grad[self.weights.len() + k] += d[k];
            }
        }
        (loss, grad)
    }
}

impl Classifier for LinearModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn n_classes(&self) -> usize {
        self.m
    }

    fn scores(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|k| {
                self.weight_row(k)
                    .iter()
                    .zip(x)
                    .map(|(w, v)| w * v)
                    .sum::<f64>()
                    + self.biases[k]
            })
            .collect()
    }

    fn score_gradient(&self, _x: &[f64], k: usize) -> Vec<f64> {
        self.weight_row(k).to_vec()
    }
}

/// One hidden layer with `tanh` activation: `s = W₂ tanh(W₁ x + b₁) + b₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp1Model {
    n: usize,
    hidden: usize,
    m: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl Mlp1Model {
    /// Gaussian initialization with variance `1/fan_in`.
    pub fn random(n: usize, hidden: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 || hidden == 0 || m == 0 {
            return Err(Error::Invalid("layer sizes must be positive".into()));
        }
        let mut rng = stream_rng(seed, 0);
        let d1 = Normal::new(0.0, 1.0 / (n as f64).sqrt()).expect("valid normal");
        let d2 = Normal::new(0.0, 1.0 / (hidden as f64).sqrt()).expect("valid normal");
        Ok(Mlp1Model {
            n,
            hidden,
            m,
            w1: (0..hidden * n).map(|_| d1.sample(&mut rng)).collect(),
            b1: vec![0.0; hidden],
            w2: (0..m * hidden).map(|_| d2.sample(&mut rng)).collect(),
            b2: vec![0.0; m],
        })
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    fn activations(&self, x: &[f64]) -> Vec<f64> {
        (0..self.hidden)
            .map(|j| {
                let row = &self.w1[j * self.n..(j + 1) * self.n];
                (row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[j]).tanh()
            })
            .collect()
    }

    fn output(&self, a: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|k| {
                let row = &self.w2[k * self.hidden..(k + 1) * self.hidden];
                row.iter().zip(a).map(|(w, v)| w * v).sum::<f64>() + self.b2[k]
            })
            .collect()
    }

    /// Flattened parameters: `W₁, b₁, W₂, b₂`.
    pub fn params(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let mut off = 0;
        for buf in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            let len = buf.len();
            buf.copy_from_slice(&p[off..off + len]);
            off += len;
        }
    }

    /// Mean cross-entropy and its gradient in [`params`](Self::params) order (backpropagation).
    pub fn loss_and_param_gradient(
        &self,
        points: &[Vec<f64>],
        labels: &[usize],
    ) -> (f64, Vec<f64>) {
        let acts: Vec<Vec<f64>> = points.iter().map(|x| self.activations(x)).collect();
        let (loss, ds) = cross_entropy(
            acts.iter().zip(labels).map(|(a, &y)| (self.output(a), y)),
            points.len(),
        );
        let (h, n, m) = (self.hidden, self.n, self.m);
        let mut gw1 = vec![0.0; h * n];
        let mut gb1 = vec![0.0; h];
        let mut gw2 = vec![0.0; m * h];
        let mut gb2 = vec![0.0; m];
        for ((x, a), d) in points.iter().zip(&acts).zip(&ds) {
            let mut da = vec![0.0; h];
            for k in 0..m {
                gb2[k] += d[k];
                for j in 0..h {
                    gw2[k * h + j] += d[k] * a[j];
                    da[j] += d[k] * self.w2[k * h + j];
                }
            }
            for j in 0..h {
                let dz = da[j] * (1.0 - a[j] * a[j]);
                gb1[j] += dz;
                for i in 0..n {
                    gw1[j * n + i] += dz * x[i];
                }
            }
        }
        (loss, [gw1, gb1, gw2, gb2].concat())
    }
}

impl Classifier for Mlp1Model {
    fn dim(&self) -> usize {
        self.n
    }

    fn n_classes(&self) -> usize {
        self.m
    }

    fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.output(&self.activations(x))
    }

    fn score_gradient(&self, x: &[f64], k: usize) -> Vec<f64> {
        let a = self.activations(x);
        let mut g = vec![0.0; self.n];
        for (j, aj) in a.iter().enumerate() {
            let coef = self.w2[k * self.hidden + j] * (1.0 - aj * aj);
            let row = &self.w1[j * self.n..(j + 1) * self.n];
            for (gi, w) in g.iter_mut().zip(row) {
                *gi += coef * w;
            }
        }
        g
    }
}
