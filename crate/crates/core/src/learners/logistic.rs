//! L2-regularized logistic regression fitted by full-batch gradient descent
//! with a backtracking (Armijo) line search.

use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::LearnerConfig;
use crate::error::{Error, Result};

/// Predicted probabilities are clamped into `[PROBA_FLOOR, 1 - PROBA_FLOOR]`.
pub const PROBA_FLOOR: f64 = 1e-12;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    weights: Vec<f64>,
    bias: f64,
}

impl LinearModel {
    pub fn new(weights: Vec<f64>, bias: f64) -> Result<Self> {
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("linear model has non-finite parameters"));
        }
        Ok(LinearModel { weights, bias })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn num_features(&self) -> usize {
        self.weights.len()
    }

    /// `w . x + b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        Error::check_len(self.weights.len(), x.len())?;
        Ok(self.decision_unchecked(x))
    }

    #[inline]
    pub(crate) fn decision_unchecked(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        Ok(clamp_proba(sigmoid(self.decision(x)?)))
    }
}

pub fn predict_proba(model: &LinearModel, x: &[f64]) -> Result<f64> {
    model.predict_proba(x)
}

#[inline]
pub(crate) fn clamp_proba(p: f64) -> f64 {
    p.clamp(PROBA_FLOOR, 1.0 - PROBA_FLOOR)
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(t))` without overflow.
#[inline]
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `(1/N) sum_i log(1 + exp(-(2 t_i - 1)(w . x_i + b))) + lambda ||w||^2`.
pub fn objective(x: ArrayView2<f64>, targets: &[bool], weights: ArrayView1<f64>, bias: f64, lambda: f64) -> f64 {
    let z = x.dot(&weights);
    let data: f64 = z
        .iter()
        .zip(targets)
        .map(|(&zi, &t)| softplus(if t { -(zi + bias) } else { zi + bias }))
        .sum();
    data / targets.len() as f64 + lambda * weights.dot(&weights)
}

/// Gradient of [`objective`] as `(d/dw, d/db)`.
pub fn gradient(
    x: ArrayView2<f64>,
    targets: &[bool],
    weights: ArrayView1<f64>,
    bias: f64,
    lambda: f64,
) -> (Array1<f64>, f64) {
    let n = targets.len() as f64;
    let residual: Array1<f64> = x
        .dot(&weights)
        .iter()
        .zip(targets)
        .map(|(&zi, &t)| sigmoid(zi + bias) - if t { 1.0 } else { 0.0 })
        .collect();
    let grad_w = x.t().dot(&residual) / n + &weights * (2.0 * lambda);
    (grad_w, residual.sum() / n)
}

/// Fits a logistic model. Rows of `x` are instances.
///
/// A constant target yields the constant model whose probability is the
/// Laplace-smoothed frequency `(positives + 1) / (N + 2)`.
pub fn train_logistic(x: ArrayView2<f64>, targets: &[bool], config: &LearnerConfig) -> Result<LinearModel> {
    let (n, d) = x.dim();
    if n == 0 {
        return Err(Error::Empty("logistic regression training set"));
    }
    if d == 0 {
        return Err(Error::Empty("logistic regression feature set"));
    }
    Error::check_len(n, targets.len())?;

    let positives = targets.iter().filter(|&&t| t).count();
    if positives == 0 || positives == n {
        let p = (positives as f64 + 1.0) / (n as f64 + 2.0);
        return LinearModel::new(vec![0.0; d], (p / (1.0 - p)).ln());
    }

    let lambda = config.l2_lambda;
    let mut w = Array1::<f64>::zeros(d);
    let mut b = 0.0;
    let mut f = objective(x, targets, w.view(), b, lambda);
    let mut step = 1.0;
    for _ in 0..config.max_iters {
        let (gw, gb) = gradient(x, targets, w.view(), b, lambda);
        let g2 = gw.dot(&gw) + gb * gb;
        if g2.sqrt() <= config.grad_tolerance {
            break;
        }
        loop {
            let cw = &w - &(&gw * step);
            let cb = b - step * gb;
            let cf = objective(x, targets, cw.view(), cb, lambda);
            if cf <= f - ARMIJO * step * g2 {
                w = cw;
                b = cb;
                f = cf;
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                break;
            }
        }
        if step < MIN_STEP {
            break;
        }
        step *= 2.0;
    }
    LinearModel::new(w.to_vec(), b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn central_difference(x: ArrayView2<f64>, t: &[bool], w: &Array1<f64>, b: f64, lambda: f64) -> (Vec<f64>, f64) {
        let h = 1e-5;
        let gw = (0..w.len())
            .map(|i| {
                let mut plus = w.clone();
                let mut minus = w.clone();
                plus[i] += h;
                minus[i] -= h;
                (objective(x, t, plus.view(), b, lambda) - objective(x, t, minus.view(), b, lambda)) / (2.0 * h)
            })
            .collect();
        let gb = (objective(x, t, w.view(), b + h, lambda) - objective(x, t, w.view(), b - h, lambda)) / (2.0 * h);
        (gw, gb)
    }

    fn toy_2d() -> (Array2<f64>, Vec<bool>) {
        let x = array![
            [0.0, 1.0],
            [1.0, 0.5],
            [2.0, -1.0],
            [-1.0, 0.0],
            [0.5, 0.5],
            [1.5, 1.5],
            [-0.5, -1.0],
            [0.2, -0.3]
        ];
        let t = vec![false, true, true, false, true, false, false, true];
        (x, t)
    }

    #[test]
    fn constant_targets_give_smoothed_constant_model() {
        let x = Array2::from_elem((4, 2), 1.0);
        let cfg = LearnerConfig::default();
        let m = train_logistic(x.view(), &[false; 4], &cfg).unwrap();
        assert!((m.predict_proba(&[3.0, -2.0]).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let m = train_logistic(x.view(), &[true; 4], &cfg).unwrap();
        assert!((m.predict_proba(&[0.0, 0.0]).unwrap() - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_separable_data_is_centered() {
        let x = array![[-1.0], [1.0]];
        let cfg = LearnerConfig {
            l2_lambda: 0.1,
            ..LearnerConfig::default()
        };
        let m = train_logistic(x.view(), &[false, true], &cfg).unwrap();
        assert!((m.predict_proba(&[0.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(m.predict_proba(&[1.0]).unwrap() > 0.5);
    }

    #[test]
    fn solution_is_stationary() {
        let (x, t) = toy_2d();
        let cfg = LearnerConfig {
            l2_lambda: 0.01,
            max_iters: 100_000,
            grad_tolerance: 1e-6,
            ..LearnerConfig::default()
        };
        let m = train_logistic(x.view(), &t, &cfg).unwrap();
        let w = Array1::from(m.weights().to_vec());
        let (gw, gb) = central_difference(x.view(), &t, &w, m.bias(), cfg.l2_lambda);
        let norm = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
        assert!(norm <= cfg.grad_tolerance, "finite-difference gradient norm {norm}");
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (n, d) = (rng.random_range(2..12), rng.random_range(1..5));
            let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
            let t: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let w = Array1::from_shape_fn(d, |_| rng.random_range(-1.0..1.0));
            let b = rng.random_range(-1.0..1.0);
            let lambda = rng.random_range(0.0..0.5);
            let (gw, gb) = gradient(x.view(), &t, w.view(), b, lambda);
            let (fw, fb) = central_difference(x.view(), &t, &w, b, lambda);
            for (a, f) in gw.iter().chain([&gb]).zip(fw.iter().chain([&fb])) {
                let rel = (a - f).abs() / a.abs().max(f.abs()).max(1e-3);
                assert!(rel <= 1e-6, "analytic {a} vs numeric {f}");
            }
        }
    }

    #[test]
    fn predict_proba_examples() {
        let zero = LinearModel::new(vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(zero.predict_proba(&[5.0, -3.0]).unwrap(), 0.5);
        let saturated = LinearModel::new(vec![0.0], 50.0).unwrap();
        let p = saturated.predict_proba(&[0.0]).unwrap();
        assert_eq!(p, 1.0 - PROBA_FLOOR);
        assert!(p < 1.0);
        let unit = LinearModel::new(vec![1.0], 0.0).unwrap();
        assert_eq!(unit.predict_proba(&[0.0]).unwrap(), 0.5);
        assert!(unit.predict_proba(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_non_finite_parameters() {
        assert!(LinearModel::new(vec![f64::NAN], 0.0).is_err());
        assert!(LinearModel::new(vec![0.0], f64::INFINITY).is_err());
    }

    #[test]
    fn training_is_deterministic() {
        let (x, t) = toy_2d();
        let cfg = LearnerConfig::default();
        let a = train_logistic(x.view(), &t, &cfg).unwrap();
        let b = train_logistic(x.view(), &t, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
