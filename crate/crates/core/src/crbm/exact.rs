//! Exact likelihood by enumerating every binary visible configuration.
//!
//! Only feasible for tiny models; this is the reference the CD estimator is
//! measured against and never a training path.

use super::model::CrbmModel;
use super::train::{sufficient_statistics, CrbmGradient};
use crate::data::Image2D;
use crate::error::{Error, Result};

/// Largest number of visible units the enumeration accepts.
pub const ENUMERATION_LIMIT: usize = 20;

fn guard(model: &CrbmModel) -> Result<usize> {
    let n_v = model.num_visible();
    if n_v > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard(n_v, ENUMERATION_LIMIT));
    }
    Ok(n_v)
}

fn configuration(bits: u32, n_v: usize) -> Vec<f64> {
    (0..n_v).map(|i| f64::from((bits >> i) & 1)).collect()
}

fn check_data(model: &CrbmModel, data: &[Image2D]) -> Result<()> {
    for v in data {
        model.check_visible(v)?;
        if !v.is_binary() {
            return Err(Error::InvalidArgument(
                "exact likelihood requires binary visible data".into(),
            ));
        }
    }
    Ok(())
}

/// `log Z = log Σ_v exp(-F(v))`.
pub fn log_partition(model: &CrbmModel) -> Result<f64> {
    let n_v = guard(model)?;
    let neg_f: Vec<f64> = (0..1u32 << n_v)
        .map(|bits| -model.free_energy_raw(&configuration(bits, n_v)))
        .collect();
    Ok(log_sum_exp(&neg_f))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `log P(v)` for every visible configuration, indexed by the bit pattern
/// (bit `i` is pixel `i` in row-major order).
pub fn log_marginals(model: &CrbmModel) -> Result<Vec<f64>> {
    let n_v = guard(model)?;
    let neg_f: Vec<f64> = (0..1u32 << n_v)
        .map(|bits| -model.free_energy_raw(&configuration(bits, n_v)))
        .collect();
    let log_z = log_sum_exp(&neg_f);
    Ok(neg_f.into_iter().map(|x| x - log_z).collect())
}

/// `Σ_data log P(v)`.
pub fn exact_log_likelihood(model: &CrbmModel, data: &[Image2D]) -> Result<f64> {
    guard(model)?;
    check_data(model, data)?;
    let log_z = log_partition(model)?;
    Ok(data
        .iter()
        .map(|v| -model.free_energy_raw(v.pixels()) - log_z)
        .sum())
}

/// Gradient of [`exact_log_likelihood`]:
/// `Σ_data (-∂F/∂θ)(v) - N · E_model[-∂F/∂θ]`, the model expectation by
/// full enumeration.
pub fn exact_log_likelihood_grad(model: &CrbmModel, data: &[Image2D]) -> Result<CrbmGradient> {
    let n_v = guard(model)?;
    check_data(model, data)?;
    let mut grad = CrbmGradient::zeros_like(model);
    for v in data {
        let h = model.hidden_probs_raw(v.pixels());
        grad.add_scaled(&sufficient_statistics(model, v.pixels(), &h), 1.0);
    }
    let log_p = log_marginals(model)?;
    let n = data.len() as f64;
    for (bits, lp) in log_p.iter().enumerate() {
        let v = configuration(bits as u32, n_v);
        let h = model.hidden_probs_raw(&v);
        grad.add_scaled(&sufficient_statistics(model, &v, &h), -n * lp.exp());
    }
    Ok(grad)
}

/// Every binary visible configuration as an image, in bit-pattern order.
pub fn all_visible_configurations(model: &CrbmModel) -> Result<Vec<Image2D>> {
    let n_v = guard(model)?;
    let n = model.input_size();
    Ok((0..1u32 << n_v)
        .map(|bits| Image2D::unchecked(n, n, configuration(bits, n_v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_for_zero_model() {
        let m = CrbmModel::zeros(1, 1, 2).unwrap();
        let data = all_visible_configurations(&m).unwrap();
        for v in &data {
            let ll = exact_log_likelihood(&m, std::slice::from_ref(v)).unwrap();
            assert!((ll + 4.0 * 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_normalize() {
        let m = CrbmModel::random(2, 2, 3, 1.5, 8).unwrap();
        let total: f64 = log_marginals(&m).unwrap().iter().map(|l| l.exp()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn guard_enforced() {
        let m = CrbmModel::zeros(1, 2, 5).unwrap();
        assert!(matches!(log_partition(&m), Err(Error::EnumerationGuard(25, 20))));
        let v = Image2D::filled(5, 5, 0.0).unwrap();
        assert!(exact_log_likelihood_grad(&m, &[v]).is_err());
    }

    #[test]
    fn uniform_data_gives_zero_weight_gradient() {
        let m = CrbmModel::zeros(2, 2, 3).unwrap();
        let data = all_visible_configurations(&m).unwrap();
        let g = exact_log_likelihood_grad(&m, &data).unwrap();
        for x in g.flatten() {
            assert!(x.abs() < 1e-9, "{x}");
        }
    }

    #[test]
    fn dense_one_by_one_filter_closed_form() {
        // A 1×1 filter ties one hidden unit to each pixel, so the marginal
        // factorizes: P(v) = Π_i e^{b v_i}(1 + e^{w v_i + c}) / (1 + e^c + e^b(1 + e^{w+c})).
        let (w, b, c) = (0.8, -0.4, 0.3);
        let m = CrbmModel::from_parameters(1, 2, b, vec![c], vec![w]).unwrap();
        let z1 = (1.0 + f64::exp(c)) + f64::exp(b) * (1.0 + f64::exp(w + c));
        for v in all_visible_configurations(&m).unwrap() {
            let mut lp = 0.0;
            for &x in v.pixels() {
                lp += b * x + (1.0 + f64::exp(w * x + c)).ln() - z1.ln();
            }
            let ll = exact_log_likelihood(&m, &[v]).unwrap();
            assert!((ll - lp).abs() < 1e-12);
        }
    }
}
