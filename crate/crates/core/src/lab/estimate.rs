//! Estimators with error bars from counting statistics and repetitions.
//!
//! A value is always computed from the counts pooled over all samples. Its
//! Poisson error is propagated from the pooled counts; with more than one
//! sample the standard error of the per-sample values is added in quadrature.

use serde::{Deserialize, Serialize};

use super::{CountTable, Setting};
use crate::error::{Error, Result};
use crate::qutrit::CYCLE_LEN;
use crate::sequential::Order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    PoissonPropagation,
    SampleStd,
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
    pub poisson_sigma: f64,
    pub sample_sigma: Option<f64>,
    pub method: EstimateMethod,
}

impl Estimate {
    pub fn poisson(value: f64, sigma: f64) -> Self {
        Self {
            value,
            sigma,
            poisson_sigma: sigma,
            sample_sigma: None,
            method: EstimateMethod::PoissonPropagation,
        }
    }

    /// Adds the standard error of `per_sample` in quadrature. Fewer than two
    /// values leave the estimate unchanged.
    pub fn with_samples(self, per_sample: &[f64]) -> Self {
        let Some(sample_sigma) = standard_error(per_sample) else {
            return self;
        };
        Self {
            sigma: self.poisson_sigma.hypot(sample_sigma),
            sample_sigma: Some(sample_sigma),
            method: EstimateMethod::Combined,
            ..self
        }
    }

    /// `(value − reference) / sigma`; infinite for a zero sigma away from the
    /// reference.
    pub fn significance(&self, reference: f64) -> f64 {
        let d = self.value - reference;
        if self.sigma > 0.0 {
            d / self.sigma
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }
}

fn standard_error(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some((var / n as f64).sqrt())
}

fn sum_estimates(parts: &[Estimate]) -> Estimate {
    Estimate::poisson(
        parts.iter().map(|e| e.value).sum(),
        parts
            .iter()
            .map(|e| e.poisson_sigma.powi(2))
            .sum::<f64>()
            .sqrt(),
    )
}

/// `P̂ = n_yes / T` with `σ² = n_yes n_no / T³`.
pub fn estimate_yes_probability(no: u64, yes: u64) -> Option<Estimate> {
    let t = (no + yes) as f64;
    if t == 0.0 {
        return None;
    }
    let (y, n) = (yes as f64, no as f64);
    Some(Estimate::poisson(y / t, (y * n / t.powi(3)).sqrt()))
}

/// `Ê = (n_yy + n_nn − n_yn − n_ny) / T` with `σ² = (1 − Ê²) / T`, for counts
/// ordered `nn, yn, ny, yy`.
pub fn estimate_correlation(counts: &[u64; 4]) -> Option<Estimate> {
    let [nn, yn, ny, yy] = counts.map(|c| c as f64);
    let t = nn + yn + ny + yy;
    if t == 0.0 {
        return None;
    }
    let e = (yy + nn - yn - ny) / t;
    Some(Estimate::poisson(e, ((1.0 - e * e).max(0.0) / t).sqrt()))
}

fn empty(setting: Setting) -> Error {
    Error::EmptySetting {
        setting: setting.to_string(),
    }
}

/// Per-sample values and the pooled estimate of one setting.
fn setting_estimate<F>(table: &CountTable, setting: Setting, f: F) -> Result<(Estimate, Vec<f64>)>
where
    F: Fn(&[u64]) -> Option<Estimate>,
{
    let pooled = table.pooled(setting).ok_or_else(|| empty(setting))?;
    let pooled = f(&pooled).ok_or_else(|| empty(setting))?;
    let mut per_sample = vec![f64::NAN; table.samples];
    for row in table.rows_for(setting) {
        let e = f(&row.counts).ok_or_else(|| empty(setting))?;
        if let Some(slot) = per_sample.get_mut(row.sample) {
            *slot = e.value;
        }
    }
    per_sample.retain(|v| !v.is_nan());
    Ok((pooled, per_sample))
}

fn combine_total(parts: &[(Estimate, Vec<f64>)]) -> Estimate {
    let pooled: Vec<Estimate> = parts.iter().map(|(e, _)| *e).collect();
    let n = parts.iter().map(|(_, s)| s.len()).min().unwrap_or(0);
    let totals: Vec<f64> = (0..n)
        .map(|s| parts.iter().map(|(_, v)| v[s]).sum())
        .collect();
    sum_estimates(&pooled).with_samples(&totals)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrightEstimate {
    pub per_question: [Estimate; CYCLE_LEN],
    pub total: Estimate,
}

/// `P(+1|Qᵢ)` for the five single-question settings and their sum `W`.
pub fn estimate_wright(table: &CountTable) -> Result<WrightEstimate> {
    let parts = (0..CYCLE_LEN)
        .map(|i| {
            setting_estimate(table, Setting::Single(i), |c| {
                estimate_yes_probability(c[0], c[1])
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = combine_total(&parts);
    let per_question = std::array::from_fn(|i| parts[i].0.with_samples(&parts[i].1));
    Ok(WrightEstimate {
        per_question,
        total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcbsEstimate {
    pub order: Order,
    pub per_edge: [Estimate; CYCLE_LEN],
    pub kappa: Estimate,
}

/// Edge correlations for the five pairs measured in `order`, and `κ`.
pub fn estimate_kcbs(table: &CountTable, order: Order) -> Result<KcbsEstimate> {
    let parts = (0..CYCLE_LEN)
        .map(|i| {
            setting_estimate(table, Setting::edge(order, i), |c| {
                estimate_correlation(&[c[0], c[1], c[2], c[3]])
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa = combine_total(&parts);
    let per_edge = std::array::from_fn(|i| parts[i].0.with_samples(&parts[i].1));
    Ok(KcbsEstimate {
        order,
        per_edge,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::SettingCounts;

    fn table(rows: Vec<SettingCounts>, samples: usize) -> CountTable {
        CountTable {
            seed: 0,
            shots_per_setting: 0,
            samples,
            rows,
        }
    }

    #[test]
    fn yes_probability_sigma_formula() {
        let e = estimate_yes_probability(600, 400).unwrap();
        assert_eq!(e.value, 0.4);
        assert!((e.sigma - (400.0f64 * 600.0 / 1e9).sqrt()).abs() < 1e-15);
        let e = estimate_yes_probability(1000, 0).unwrap();
        assert_eq!((e.value, e.sigma), (0.0, 0.0));
        assert!(estimate_yes_probability(0, 0).is_none());
    }

    #[test]
    fn correlation_sigma_formula() {
        let e = estimate_correlation(&[100, 400, 400, 100]).unwrap();
        assert!((e.value + 0.6).abs() < 1e-15);
        assert!((e.sigma - (0.64f64 / 1000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn all_no_counts_give_zero_w() {
        let rows = (0..CYCLE_LEN)
            .map(|i| SettingCounts {
                sample: 0,
                setting: Setting::Single(i),
                counts: vec![1000, 0],
            })
            .collect();
        let w = estimate_wright(&table(rows, 1)).unwrap();
        assert_eq!(w.total.value, 0.0);
        assert_eq!(w.total.sigma, 0.0);
        assert_eq!(w.total.method, EstimateMethod::PoissonPropagation);
    }

    #[test]
    fn missing_or_empty_setting_is_an_error() {
        let rows = vec![SettingCounts {
            sample: 0,
            setting: Setting::Single(0),
            counts: vec![0, 0],
        }];
        assert!(matches!(
            estimate_wright(&table(rows, 1)),
            Err(Error::EmptySetting { .. })
        ));
        assert!(estimate_kcbs(&table(vec![], 1), Order::Forward).is_err());
    }

    #[test]
    fn samples_add_in_quadrature() {
        let rows = (0..2)
            .flat_map(|s| {
                (0..CYCLE_LEN).map(move |i| SettingCounts {
                    sample: s,
                    setting: Setting::Single(i),
                    counts: if s == 0 { vec![60, 40] } else { vec![40, 60] },
                })
            })
            .collect();
        let w = estimate_wright(&table(rows, 2)).unwrap();
        assert!((w.total.value - 2.5).abs() < 1e-12);
        // per-sample totals are 2.0 and 3.0
        let sample = w.total.sample_sigma.unwrap();
        assert!((sample - 0.5).abs() < 1e-12);
        assert!((w.total.sigma - w.total.poisson_sigma.hypot(0.5)).abs() < 1e-15);
        assert_eq!(w.total.method, EstimateMethod::Combined);
    }
}
