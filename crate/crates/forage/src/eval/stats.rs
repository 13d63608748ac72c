//! Distribution summaries, patch-visit segmentation, comparison against
//! the analytic optimum, and learning-curve smoothing.

use serde::Serialize;

use crate::env::TrajStep;
use crate::error::{Error, Result};
use crate::map::PatchId;
use crate::mvt::MvtSolution;

/// Five-number summary with boxplot whiskers and outliers.
///
/// Quartiles interpolate linearly between closest ranks. Whiskers sit at
/// the quartiles plus/minus 1.5 times the interquartile range, clipped to
/// the data range; outliers are the points beyond them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    /// Points outside the whisker interval, ascending.
    pub outliers: Vec<f64>,
}

/// Interpolated quantile of an ascending slice (closest-ranks method).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summarize a sample; rejects empty input and non-finite values.
pub fn summarize(samples: &[f64]) -> Result<SampleStats> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples to summarize".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Param("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let whisker_lo = (q1 - 1.5 * iqr).max(sorted[0]);
    let whisker_hi = (q3 + 1.5 * iqr).min(sorted[sorted.len() - 1]);
    let outliers =
        sorted.iter().copied().filter(|&x| x < whisker_lo || x > whisker_hi).collect();
    Ok(SampleStats {
        count: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        median,
        q1,
        q3,
        whisker_lo,
        whisker_hi,
        outliers,
    })
}

/// Lengths of patch visits in one trajectory, in visit order.
///
/// A visit is a maximal run of consecutive steps inside one patch; it ends
/// when the agent departs, switches patch, or the episode ends, so a final
/// cut-short visit still counts.
pub fn residence_runs(steps: &[TrajStep]) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current: Option<(PatchId, u32)> = None;
    for step in steps {
        current = match (current, step.patch) {
            (None, None) => None,
            (None, Some(p)) => Some((p, 1)),
            (Some((p, len)), Some(q)) if p == q => Some((p, len + 1)),
            (Some((_, len)), next) => {
                runs.push(len);
                next.map(|p| (p, 1))
            }
        };
    }
    if let Some((_, len)) = current {
        runs.push(len);
    }
    runs
}

/// Observed residence behavior lined up against the analytic optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MvtComparison {
    /// Patch-to-patch travel distance of the scenario.
    pub x_bar: u32,
    /// Rate-optimal residence for that distance.
    pub n_star: u32,
    /// Intake rate achieved at the optimum.
    pub optimal_rate: f64,
    pub observed_mean: f64,
    pub observed_median: f64,
    /// Absolute gap between the observed mean and the optimum.
    pub mean_abs_deviation: f64,
    /// True when the optimum lies inside [q1, q3] of the observations.
    pub within_quartile_band: bool,
}

/// Line up residence statistics with the optimum for one scenario.
pub fn compare_to_mvt(stats: &SampleStats, solution: &MvtSolution, x_bar: u32) -> MvtComparison {
    let n_star = solution.optimal_steps;
    let target = f64::from(n_star);
    MvtComparison {
        x_bar,
        n_star,
        optimal_rate: solution.optimal_rate,
        observed_mean: stats.mean,
        observed_median: stats.median,
        mean_abs_deviation: (stats.mean - target).abs(),
        within_quartile_band: stats.q1 <= target && target <= stats.q3,
    }
}

fn check_smoothing_args(series: &[f64], omega: f64) -> Result<()> {
    if series.is_empty() {
        return Err(Error::InsufficientData("nothing to smooth".into()));
    }
    if !(0.0..=1.0).contains(&omega) {
        return Err(Error::Param(format!("smoothing weight must lie in [0, 1], got {omega}")));
    }
    Ok(())
}

/// Exponential smoothing: `s1 = x1`, `s_i = (1 - omega) * x_i + omega * s_(i-1)`.
/// Larger `omega` means more smoothing; `omega = 0` is the identity.
pub fn smooth_ema(series: &[f64], omega: f64) -> Result<Vec<f64>> {
    check_smoothing_args(series, omega)?;
    let mut out = Vec::with_capacity(series.len());
    let mut prev = series[0];
    out.push(prev);
    for &x in &series[1..] {
        prev = (1.0 - omega) * x + omega * prev;
        out.push(prev);
    }
    Ok(out)
}

/// Two-point blend of each value with its predecessor:
/// `s1 = x1`, `s_i = omega * x_i + (1 - omega) * x_(i-1)`. Here larger
/// `omega` means LESS smoothing; kept as a compatibility alternative to
/// [`smooth_ema`].
pub fn smooth_pairwise(series: &[f64], omega: f64) -> Result<Vec<f64>> {
    check_smoothing_args(series, omega)?;
    let mut out = Vec::with_capacity(series.len());
    out.push(series[0]);
    for pair in series.windows(2) {
        out.push(omega * pair[1] + (1.0 - omega) * pair[0]);
    }
    Ok(out)
}

/// Per-episode mean and population standard deviation across training
/// runs; all runs must have the same length.
pub fn curve_mean_std(runs: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    let first = runs
        .first()
        .ok_or_else(|| Error::InsufficientData("no runs to aggregate".into()))?;
    if runs.iter().any(|r| r.len() != first.len()) {
        return Err(Error::Shape("runs must have equal episode counts".into()));
    }
    if first.is_empty() {
        return Err(Error::InsufficientData("runs contain no episodes".into()));
    }
    let n = runs.len() as f64;
    Ok((0..first.len())
        .map(|i| {
            let mean = runs.iter().map(|r| r[i]).sum::<f64>() / n;
            let var = runs.iter().map(|r| (r[i] - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::mvt::{optimal_residence, RewardParams};

    fn step(n: u32, patch: Option<PatchId>) -> TrajStep {
        TrajStep { step: n, x: 0, y: 0, patch, reward: 0.0, cue: 0.0, score: 0.0 }
    }

    #[test]
    fn odd_count_median_is_the_middle_value() {
        let s = summarize(&[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(s.median, 20.0);
        assert_eq!(s.count, 3);
        assert_eq!(s.mean, 20.0);
    }

    #[test]
    fn identical_values_have_zero_spread_and_no_outliers() {
        let s = summarize(&[5.0; 9]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (5.0, 5.0, 5.0));
        assert_eq!((s.whisker_lo, s.whisker_hi), (5.0, 5.0));
        assert!(s.outliers.is_empty());
    }

    #[test]
    fn an_extreme_point_is_flagged_as_an_outlier() {
        // 1..=100 plus 1000: q1 = 26, q3 = 76, IQR = 50, so the upper
        // whisker clips at 76 + 75 = 151 and 1000 falls outside it.
        let mut data: Vec<f64> = (1..=100).map(f64::from).collect();
        data.push(1000.0);
        let s = summarize(&data).unwrap();
        assert_eq!(s.q1, 26.0);
        assert_eq!(s.median, 51.0);
        assert_eq!(s.q3, 76.0);
        assert_eq!(s.whisker_lo, 1.0);
        assert_eq!(s.whisker_hi, 151.0);
        assert_eq!(s.outliers, vec![1000.0]);
        assert!((s.mean - 6050.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn interpolated_quartiles_on_an_even_count() {
        // Four points: h = 3 * 0.25 = 0.75, so q1 = 1 + 0.75 * (2 - 1).
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q3, 3.25);
    }

    #[test]
    fn unsorted_input_is_handled() {
        let s = summarize(&[30.0, 10.0, 20.0]).unwrap();
        assert_eq!(s.median, 20.0);
    }

    #[test]
    fn empty_and_non_finite_inputs_are_rejected() {
        assert!(matches!(summarize(&[]), Err(Error::InsufficientData(_))));
        assert!(summarize(&[1.0, f64::NAN]).is_err());
        assert!(summarize(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn visits_split_on_departure_and_patch_change() {
        let trace = [
            step(1, None),
            step(2, Some(PatchId::A)),
            step(3, Some(PatchId::A)),
            step(4, None),
            step(5, None),
            step(6, Some(PatchId::B)),
            step(7, Some(PatchId::A)),
            step(8, Some(PatchId::A)),
        ];
        assert_eq!(residence_runs(&trace), vec![2, 1, 2]);
    }

    #[test]
    fn final_cut_short_visit_is_counted() {
        let trace = [step(1, Some(PatchId::A)), step(2, Some(PatchId::A))];
        assert_eq!(residence_runs(&trace), vec![2]);
    }

    #[test]
    fn no_visits_means_no_runs() {
        assert_eq!(residence_runs(&[step(1, None), step(2, None)]), Vec::<u32>::new());
    }

    #[test]
    fn band_flag_tracks_quartile_containment() {
        let solution = MvtSolution { optimal_steps: 25, optimal_rate: 1.0, rate_curve: vec![] };
        let inside = SampleStats {
            count: 5,
            mean: 26.0,
            median: 25.0,
            q1: 20.0,
            q3: 30.0,
            whisker_lo: 20.0,
            whisker_hi: 30.0,
            outliers: vec![],
        };
        let c = compare_to_mvt(&inside, &solution, 5);
        assert!(c.within_quartile_band);
        assert_eq!(c.mean_abs_deviation, 1.0);
        assert_eq!(c.n_star, 25);

        let above = SampleStats { q1: 30.0, q3: 40.0, mean: 35.0, ..inside };
        let c = compare_to_mvt(&above, &solution, 5);
        assert!(!c.within_quartile_band);
        assert_eq!(c.mean_abs_deviation, 10.0);
    }

    #[test]
    fn scripted_constant_residence_has_zero_deviation() {
        // A synthetic policy that always stays exactly n* steps.
        let params = RewardParams::new(30.0, 0.01).unwrap();
        let solution = optimal_residence(&params, 5.0, 200).unwrap();
        let lengths = vec![f64::from(solution.optimal_steps); 40];
        let stats = summarize(&lengths).unwrap();
        let c = compare_to_mvt(&stats, &solution, 5);
        assert_eq!(c.mean_abs_deviation, 0.0);
        assert!(c.within_quartile_band);
        assert_eq!(c.observed_median, f64::from(solution.optimal_steps));
    }

    #[test]
    fn constant_series_is_a_smoothing_fixed_point() {
        let series = [3.5; 10];
        assert_eq!(smooth_ema(&series, 0.95).unwrap(), series.to_vec());
        assert_eq!(smooth_pairwise(&series, 0.95).unwrap(), series.to_vec());
    }

    #[test]
    fn zero_weight_ema_is_the_identity() {
        let series = [1.0, 4.0, 2.0, 8.0];
        assert_eq!(smooth_ema(&series, 0.0).unwrap(), series.to_vec());
    }

    #[test]
    fn hand_checked_ema_values() {
        let out = smooth_ema(&[0.0, 1.0, 0.0], 0.95).unwrap();
        assert_eq!(out[0], 0.0);
        assert!((out[1] - 0.05).abs() < 1e-15);
        assert!((out[2] - 0.0475).abs() < 1e-15);
    }

    #[test]
    fn hand_checked_pairwise_values() {
        let out = smooth_pairwise(&[0.0, 1.0, 0.0], 0.95).unwrap();
        assert_eq!(out[0], 0.0);
        assert!((out[1] - 0.95).abs() < 1e-15);
        assert!((out[2] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn bad_smoothing_arguments_are_rejected() {
        assert!(smooth_ema(&[], 0.5).is_err());
        assert!(smooth_ema(&[1.0], -0.1).is_err());
        assert!(smooth_ema(&[1.0], 1.1).is_err());
    }

    #[test]
    fn curve_aggregation_matches_hand_arithmetic() {
        let runs = vec![vec![1.0, 2.0], vec![3.0, 2.0], vec![5.0, 2.0]];
        let agg = curve_mean_std(&runs).unwrap();
        assert_eq!(agg[0].0, 3.0);
        assert!((agg[0].1 - (8.0_f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(agg[1], (2.0, 0.0));
    }

    #[test]
    fn mismatched_run_lengths_are_rejected() {
        assert!(matches!(
            curve_mean_std(&[vec![1.0], vec![1.0, 2.0]]),
            Err(Error::Shape(_))
        ));
        assert!(curve_mean_std(&[]).is_err());
    }

    proptest! {
        #[test]
        fn boxplot_algebra_holds(samples in proptest::collection::vec(-100.0_f64..100.0, 1..80)) {
            let s = summarize(&samples).unwrap();
            prop_assert!(s.q1 <= s.median && s.median <= s.q3);
            prop_assert!(s.whisker_lo <= s.q1 && s.q3 <= s.whisker_hi);
            for outlier in &s.outliers {
                prop_assert!(*outlier < s.whisker_lo || *outlier > s.whisker_hi);
            }
            let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s.whisker_lo >= min && s.whisker_hi <= max);
        }

        #[test]
        fn smoothing_stays_within_input_bounds(
            series in proptest::collection::vec(-50.0_f64..50.0, 1..60),
            omega in 0.0_f64..=1.0,
        ) {
            let min = series.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for s in smooth_ema(&series, omega).unwrap() {
                prop_assert!(s >= min - 1e-9 && s <= max + 1e-9);
            }
            for s in smooth_pairwise(&series, omega).unwrap() {
                prop_assert!(s >= min - 1e-9 && s <= max + 1e-9);
            }
        }

        #[test]
        fn visit_lengths_conserve_in_patch_steps(
            flags in proptest::collection::vec(proptest::option::of(0_u8..2), 1..120),
        ) {
            let trace: Vec<TrajStep> = flags
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let patch = f.map(|v| if v == 0 { PatchId::A } else { PatchId::B });
                    step(i as u32 + 1, patch)
                })
                .collect();
            let runs = residence_runs(&trace);
            let total: u32 = runs.iter().sum();
            let in_patch = flags.iter().filter(|f| f.is_some()).count() as u32;
            prop_assert_eq!(total, in_patch);
            prop_assert!(runs.iter().all(|&len| len >= 1));
        }
    }
}
