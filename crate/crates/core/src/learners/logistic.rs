//! Multinomial (softmax) logistic regression trained by full-batch gradient
//! descent on internally standardized features.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{FeatureMatrix, LabelVector, ProbabilityMatrix};
use crate::error::{Error, Result};
use crate::estimator::{check_fit_inputs, check_predict_inputs, Classifier};
use crate::snapshot::ModelSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub max_iter: usize,
    pub learning_rate: f64,
    /// Coefficient of `0.5 * ||W||²` (bias unpenalized).
    pub l2: f64,
    /// Stop once the largest absolute gradient entry drops below this.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            learning_rate: 0.1,
            l2: 1e-4,
            tol: 1e-6,
        }
    }
}

/// Per-feature centering and scaling recorded at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    /// Population standard deviation, or 1 for (numerically) constant columns.
    pub scale: Vec<f64>,
}

impl Standardization {
    pub fn fit(x: &FeatureMatrix) -> Self {
        let n = x.n_rows() as f64;
        let mut mean = Vec::with_capacity(x.n_cols());
        let mut scale = Vec::with_capacity(x.n_cols());
        for j in 0..x.n_cols() {
            let m = x.column(j).sum::<f64>() / n;
            let var = x.column(j).map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            let sd = var.sqrt();
            mean.push(m);
            scale.push(if sd > 1e-12 * m.abs().max(1.0) { sd } else { 1.0 });
        }
        Self { mean, scale }
    }

    pub fn transform(&self, x: &FeatureMatrix) -> FeatureMatrix {
        let mut out = x.clone();
        for r in 0..out.n_rows() {
            for ((v, m), s) in out.row_mut(r).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for z in logits.iter_mut() {
        *z = (*z - max).exp();
        total += *z;
    }
    for z in logits.iter_mut() {
        *z /= total;
    }
}

fn class_probabilities(row: &[f64], weights: &[f64], bias: &[f64], out: &mut [f64]) {
    let f = row.len();
    for (c, z) in out.iter_mut().enumerate() {
        let w = &weights[c * f..(c + 1) * f];
        *z = bias[c] + w.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
    }
    softmax_in_place(out);
}

/// Loss and gradient of the L2-regularized multinomial cross-entropy
///
/// `L = -(1/n) Σ_i log p(y_i | x_i) + (l2/2) ||W||²`
///
/// with `weights` stored class-major (`k × f`). Returns
/// `(loss, dL/dW, dL/db)`.
pub fn softmax_loss_gradient(
    x: &FeatureMatrix,
    y: &LabelVector,
    weights: &[f64],
    bias: &[f64],
    l2: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let (n, f, k) = (x.n_rows(), x.n_cols(), bias.len());
    let mut grad_w = vec![0.0; k * f];
    let mut grad_b = vec![0.0; k];
    let mut p = vec![0.0; k];
    let mut loss = 0.0;
    for (row, &label) in x.rows().zip(y.indices()) {
        class_probabilities(row, weights, bias, &mut p);
        loss -= p[label].max(f64::MIN_POSITIVE).ln();
        for c in 0..k {
            let err = p[c] - if c == label { 1.0 } else { 0.0 };
            grad_b[c] += err;
            for (g, v) in grad_w[c * f..(c + 1) * f].iter_mut().zip(row) {
                *g += err * v;
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    loss *= inv_n;
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g * inv_n + l2 * w;
    }
    grad_b.iter_mut().for_each(|g| *g *= inv_n);
    (loss, grad_w, grad_b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub standardization: Standardization,
    pub n_classes: usize,
    pub n_iter: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub config: LogisticConfig,
    fitted: Option<LogisticFit>,
}

impl LogisticRegression {
    pub fn new(config: LogisticConfig) -> Self {
        Self { config, fitted: None }
    }

    pub fn fitted(&self) -> Option<&LogisticFit> {
        self.fitted.as_ref()
    }
}

impl Classifier for LogisticRegression {
    fn kind(&self) -> &'static str {
        "logistic_regression"
    }

    fn fit(&mut self, x: &FeatureMatrix, y: &LabelVector) -> Result<()> {
        check_fit_inputs(x, y)?;
        let standardization = Standardization::fit(x);
        let xs = standardization.transform(x);
        let (f, k) = (x.n_cols(), y.n_classes());
        let mut weights = vec![0.0; k * f];
        let mut bias = vec![0.0; k];
        let lr = self.config.learning_rate;
        let mut n_iter = 0;
        while n_iter < self.config.max_iter {
            let (_, gw, gb) = softmax_loss_gradient(&xs, y, &weights, &bias, self.config.l2);
            let max_grad = gw.iter().chain(&gb).fold(0.0f64, |m, g| m.max(g.abs()));
            if max_grad < self.config.tol {
                break;
            }
            weights.iter_mut().zip(&gw).for_each(|(w, g)| *w -= lr * g);
            bias.iter_mut().zip(&gb).for_each(|(b, g)| *b -= lr * g);
            n_iter += 1;
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidHyperparameter(
                "gradient descent diverged; lower the learning rate".into(),
            ));
        }
        self.fitted = Some(LogisticFit {
            weights,
            bias,
            standardization,
            n_classes: k,
            n_iter,
        });
        Ok(())
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<LabelVector> {
        Ok(self.predict_proba(x)?.argmax())
    }

    fn supports_proba(&self) -> bool {
        true
    }

    fn predict_proba(&self, x: &FeatureMatrix) -> Result<ProbabilityMatrix> {
        let fit = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        check_predict_inputs(x, fit.standardization.mean.len())?;
        let xs = fit.standardization.transform(x);
        let k = fit.n_classes;
        let mut values = vec![0.0; x.n_rows() * k];
        for (r, row) in xs.rows().enumerate() {
            class_probabilities(row, &fit.weights, &fit.bias, &mut values[r * k..(r + 1) * k]);
        }
        ProbabilityMatrix::new(x.n_rows(), k, values)
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fresh_clone(&self) -> Box<dyn Classifier> {
        Box::new(Self::new(self.config))
    }

    fn hyperparameters(&self) -> Value {
        json!(self.config)
    }

    fn snapshot(&self) -> Result<ModelSnapshot> {
        Ok(ModelSnapshot::LogisticRegression(self.clone()))
    }
}
