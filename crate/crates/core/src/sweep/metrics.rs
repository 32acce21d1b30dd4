//! Derived metrics over sweep records.

use std::collections::BTreeMap;

use super::{SweepError, SweepRecord};
use crate::time::Time;
use crate::Nanos;

/// Smallest channel count reaching the minimum delay; `delays[j]` belongs to
/// `k = j + 1`. A larger k wins only by strictly lowering the delay.
pub fn optimal_channel_count<T: Time>(delays: &[T]) -> Result<usize, SweepError> {
    let pairs: Vec<(usize, T)> = delays
        .iter()
        .enumerate()
        .map(|(j, &t)| (j + 1, t))
        .collect();
    optimal_k(&pairs)
}

/// As [`optimal_channel_count`] over explicit `(k, delay)` pairs.
pub fn optimal_k<T: Time>(pairs: &[(usize, T)]) -> Result<usize, SweepError> {
    let mut sorted = pairs.to_vec();
    sorted.sort_by_key(|p| p.0);
    let mut best: Option<(usize, T)> = None;
    for (k, t) in sorted {
        if best.is_none_or(|(_, b)| t < b) {
            best = Some((k, t));
        }
    }
    best.map(|b| b.0)
        .ok_or_else(|| SweepError::Metric("no delays to choose a channel count from".into()))
}

/// `(t_baseline - t) / t_baseline`.
pub fn relative_reduction(baseline: Nanos, t: Nanos) -> f64 {
    (baseline - t) as f64 / baseline as f64
}

/// `(bound - realized) / bound`, or `None` when the bound is zero.
pub fn mitigation_fraction(bound: Nanos, realized: Nanos) -> Option<f64> {
    (bound != 0).then(|| (bound - realized) as f64 / bound as f64)
}

/// Reduction and mitigation of one record.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPoint {
    pub design: String,
    pub profile: String,
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub t_ebit_ns: Option<Nanos>,
    /// Against the baseline design (monolithic) or baseline k (distributed).
    pub reduction: f64,
    /// Against the mitigatable-delay bound; `None` when the bound is zero.
    pub mitigation: Option<f64>,
}

/// Relative reduction of every record against its baseline: the record of
/// `baseline_design` at the same coordinate for monolithic records, the
/// record with `k = baseline_k` for distributed ones.
pub fn relative_reduction_series(
    records: &[SweepRecord],
    baseline_design: &str,
    baseline_k: usize,
) -> Result<Vec<MetricPoint>, SweepError> {
    let index: BTreeMap<_, _> = records.iter().map(|r| (r.key(), r)).collect();
    records
        .iter()
        .map(|r| {
            let key = match r.k {
                None => (
                    r.profile.clone(),
                    baseline_design.to_string(),
                    r.n,
                    r.m,
                    None,
                    None,
                ),
                Some(_) => (
                    r.profile.clone(),
                    r.design.clone(),
                    r.n,
                    r.m,
                    Some(baseline_k),
                    r.t_ebit_ns,
                ),
            };
            let base = index.get(&key).ok_or_else(|| {
                SweepError::Metric(format!("missing baseline {key:?} for record {:?}", r.key()))
            })?;
            Ok(MetricPoint {
                design: r.design.clone(),
                profile: r.profile.clone(),
                n: r.n,
                m: r.m,
                k: r.k,
                t_ebit_ns: r.t_ebit_ns,
                reduction: relative_reduction(base.t_c_ns, r.t_c_ns),
                mitigation: mitigation(r),
            })
        })
        .collect()
}

/// Monolithic records use the phase-processing bound, distributed ones the
/// distribution bound.
pub fn mitigation(r: &SweepRecord) -> Option<f64> {
    match r.delta_d_m_upper_ns {
        Some(upper) => mitigation_fraction(upper, r.delta_d_m_ns),
        None => mitigation_fraction(r.delta_p_m_upper_ns, r.delta_p_m_ns),
    }
}

/// Optimal channel count over an (n × t_ebit) grid for one design/profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub design: String,
    pub profile: String,
    pub n_values: Vec<usize>,
    pub t_ebit_values: Vec<Nanos>,
    /// `cells[row][col]` for `n_values[row]`, `t_ebit_values[col]`.
    pub cells: Vec<Vec<usize>>,
}

/// One heatmap per (design, profile) present among the distributed records.
pub fn heatmaps(records: &[SweepRecord]) -> Result<Vec<Heatmap>, SweepError> {
    type Coord = (usize, Nanos);
    let mut groups: BTreeMap<(String, String), BTreeMap<Coord, Vec<(usize, Nanos)>>> =
        BTreeMap::new();
    for r in records {
        if let (Some(k), Some(t)) = (r.k, r.t_ebit_ns) {
            groups
                .entry((r.design.clone(), r.profile.clone()))
                .or_default()
                .entry((r.n, t))
                .or_default()
                .push((k, r.t_c_ns));
        }
    }
    groups
        .into_iter()
        .map(|((design, profile), by_coord)| {
            let mut n_values: Vec<usize> = by_coord.keys().map(|c| c.0).collect();
            let mut t_ebit_values: Vec<Nanos> = by_coord.keys().map(|c| c.1).collect();
            n_values.sort_unstable();
            n_values.dedup();
            t_ebit_values.sort_unstable();
            t_ebit_values.dedup();
            let cells = n_values
                .iter()
                .map(|&n| {
                    t_ebit_values
                        .iter()
                        .map(|&t| {
                            let pairs = by_coord.get(&(n, t)).ok_or_else(|| {
                                SweepError::Metric(format!("heatmap gap at n={n}, t_ebit={t}"))
                            })?;
                            optimal_k(pairs)
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Heatmap {
                design,
                profile,
                n_values,
                t_ebit_values,
                cells,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_k_rule() {
        assert_eq!(
            optimal_channel_count(&[100.0, 80.0, 80.0, 79.9]).unwrap(),
            4
        );
        assert_eq!(optimal_channel_count(&[100, 80, 80, 80]).unwrap(), 2);
        assert_eq!(optimal_channel_count(&[50]).unwrap(), 1);
        assert!(optimal_channel_count::<i64>(&[]).is_err());
        assert_eq!(optimal_k(&[(4, 7), (2, 7), (1, 9)]).unwrap(), 2);
    }

    #[test]
    fn ratios() {
        assert_eq!(relative_reduction(100, 100), 0.0);
        assert_eq!(relative_reduction(200, 100), 0.5);
        assert_eq!(mitigation_fraction(0, 0), None);
        assert_eq!(mitigation_fraction(10, 0), Some(1.0));
        assert_eq!(mitigation_fraction(10, 10), Some(0.0));
    }
}
