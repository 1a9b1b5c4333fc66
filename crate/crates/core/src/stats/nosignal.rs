//! Statistical no-signaling test on count tables.
//!
//! For every constraint, every comparison group and every marginal cell, all
//! pairs of settings in the group are compared with a pooled two-proportion
//! z statistic. A constraint is flagged when some `|z|` exceeds its
//! threshold. With the default family-wise correction the threshold is the
//! two-sided normal quantile at `α/m`, where `α` is the tail mass of
//! `±sigma` and `m` the number of comparisons of that constraint, so a
//! constraint is flagged about as often as a single `sigma` test would be.
//! The raw count of `|z| > sigma` comparisons is reported as well.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::behavior::{Outcome, Settings};
use crate::inequality::NoSignalingConstraint;
use crate::stats::counts::CountTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    #[default]
    FamilyWise,
    PerComparison,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoSignalStatOptions {
    pub sigma: f64,
    pub correction: Correction,
}

impl Default for NoSignalStatOptions {
    fn default() -> Self {
        Self {
            sigma: 3.0,
            correction: Correction::FamilyWise,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintStat {
    pub constraint: NoSignalingConstraint,
    pub description: String,
    pub comparisons: usize,
    pub threshold: f64,
    pub max_abs_z: f64,
    /// Comparisons with `|z| > sigma`, before any correction.
    pub raw_exceedances: usize,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalStatReport {
    pub options: NoSignalStatOptions,
    pub constraints: Vec<ConstraintStat>,
    pub flagged: bool,
}

fn z_statistic(k1: u64, n1: u64, k2: u64, n2: u64) -> f64 {
    let (f1, f2) = (k1 as f64 / n1 as f64, k2 as f64 / n2 as f64);
    let pooled = (k1 + k2) as f64 / (n1 + n2) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64);
    if var <= 0.0 {
        0.0
    } else {
        (f1 - f2) / var.sqrt()
    }
}

fn marginal_counts(counts: &CountTable, c: NoSignalingConstraint, s: Settings) -> Vec<u64> {
    let mut m = vec![0; c.marginal_size()];
    for o in Outcome::all() {
        m[c.marginal_cell(o)] += counts.count(s, o);
    }
    m
}

pub fn nosignal_stat_check(counts: &CountTable) -> NoSignalStatReport {
    nosignal_stat_check_with(counts, NoSignalStatOptions::default())
}

pub fn nosignal_stat_check_with(
    counts: &CountTable,
    options: NoSignalStatOptions,
) -> NoSignalStatReport {
    let normal = Normal::standard();
    let constraints: Vec<ConstraintStat> = NoSignalingConstraint::ALL
        .iter()
        .map(|&constraint| {
            let mut zs = Vec::new();
            for group in constraint.groups() {
                let data: Vec<(Vec<u64>, u64)> = group
                    .settings
                    .iter()
                    .map(|&s| {
                        (
                            marginal_counts(counts, constraint, s),
                            counts.setting_total(s),
                        )
                    })
                    .collect();
                for i in 0..data.len() {
                    for j in i + 1..data.len() {
                        let ((mi, ni), (mj, nj)) = (&data[i], &data[j]);
                        if *ni == 0 || *nj == 0 {
                            continue;
                        }
                        for cell in 0..constraint.marginal_size() {
                            zs.push(z_statistic(mi[cell], *ni, mj[cell], *nj));
                        }
                    }
                }
            }
            let comparisons = zs.len();
            let threshold = match options.correction {
                Correction::PerComparison => options.sigma,
                Correction::FamilyWise if comparisons > 1 => {
                    let alpha = 2.0 * normal.cdf(-options.sigma);
                    -normal.inverse_cdf(alpha / (2.0 * comparisons as f64))
                }
                Correction::FamilyWise => options.sigma,
            };
            let max_abs_z = zs.iter().fold(0.0f64, |m, z| m.max(z.abs()));
            ConstraintStat {
                constraint,
                description: constraint.label().to_string(),
                comparisons,
                threshold,
                max_abs_z,
                raw_exceedances: zs.iter().filter(|z| z.abs() > options.sigma).count(),
                flagged: max_abs_z > threshold,
            }
        })
        .collect();
    let flagged = constraints.iter().any(|c| c.flagged);
    NoSignalStatReport {
        options,
        constraints,
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_statistic_basics() {
        assert_eq!(z_statistic(0, 10, 0, 10), 0.0);
        assert_eq!(z_statistic(10, 10, 10, 10), 0.0);
        let z = z_statistic(60, 100, 40, 100);
        assert!((z - 0.2 / (0.25f64 * 0.02).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn family_wise_threshold_grows_with_comparisons() {
        let normal = Normal::standard();
        let alpha = 2.0 * normal.cdf(-3.0);
        let t = -normal.inverse_cdf(alpha / 2.0);
        assert!((t - 3.0).abs() < 1e-6);
        let t64 = -normal.inverse_cdf(alpha / 128.0);
        assert!(t64 > 4.0 && t64 < 4.5);
    }
}
