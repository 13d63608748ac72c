//! Marginal-value analysis of patch residence.
//!
//! A forager harvests a depleting patch, then pays travel steps to reach the
//! next one. These routines compute the long-run intake rate achieved by a
//! constant residence policy and find the residence that maximizes it, both
//! for the exponential reward schedule the simulator uses and for general
//! habitats with tabulated gain functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential depletion schedule: the n-th harvest step in a fresh patch
/// yields `peak * exp(-decay * n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardParams {
    /// Yield of an undepleted patch (the n = 0 value of the schedule).
    pub peak: f64,
    /// Per-step decay rate of the yield while the forager keeps harvesting.
    pub decay: f64,
}

impl RewardParams {
    pub fn new(peak: f64, decay: f64) -> Result<Self> {
        let params = RewardParams { peak, decay };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.peak.is_finite() || self.peak <= 0.0 {
            return Err(Error::Param(format!(
                "peak reward must be positive and finite, got {}",
                self.peak
            )));
        }
        if !self.decay.is_finite() || self.decay <= 0.0 {
            return Err(Error::Param(format!(
                "decay rate must be positive and finite, got {}",
                self.decay
            )));
        }
        Ok(())
    }

    /// Reward collected on the n-th consecutive harvest step (1-based).
    ///
    /// Defined at n = 0 as well (the undepleted yield `peak`), which keeps
    /// the schedule and the freshness cue on one formula.
    pub fn reward_at(&self, n: u32) -> f64 {
        self.peak * (-self.decay * f64::from(n)).exp()
    }

    /// Total reward over the first `n` harvest steps of a fresh patch.
    pub fn cumulative_gain(&self, n: u32) -> f64 {
        (1..=n).map(|i| self.reward_at(i)).sum()
    }

    /// Long-run intake rate when the forager harvests `n` steps per patch
    /// and walks `travel` reward-free steps between patches.
    pub fn net_intake_rate(&self, travel: f64, n: u32) -> Result<f64> {
        check_travel(travel)?;
        Ok(self.cumulative_gain(n) / (travel + f64::from(n)))
    }
}

fn check_travel(travel: f64) -> Result<()> {
    if !travel.is_finite() || travel <= 0.0 {
        return Err(Error::Param(format!(
            "travel distance must be positive and finite, got {travel}"
        )));
    }
    Ok(())
}

/// Best constant residence for a schedule, with the full rate curve it was
/// selected from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvtSolution {
    /// Residence (harvest steps per patch visit) that maximizes the rate.
    pub optimal_steps: u32,
    /// Intake rate achieved at `optimal_steps`.
    pub optimal_rate: f64,
    /// `rate_curve[k]` is the intake rate for residence `k + 1`.
    pub rate_curve: Vec<f64>,
}

impl MvtSolution {
    /// Rate for residence `n` (1-based), if it was scanned.
    pub fn rate_at(&self, n: u32) -> Option<f64> {
        let idx = usize::try_from(n.checked_sub(1)?).ok()?;
        self.rate_curve.get(idx).copied()
    }
}

/// Scan residences 1..=`scan_bound` and return the rate-maximizing one.
/// Ties break toward the smaller residence: staying longer for zero
/// marginal benefit is never preferred.
pub fn optimal_residence(
    params: &RewardParams,
    travel: f64,
    scan_bound: u32,
) -> Result<MvtSolution> {
    params.validate()?;
    check_travel(travel)?;
    if scan_bound < 1 {
        return Err(Error::Param("scan bound must be at least 1".into()));
    }

    // Incremental running gain; the addition order matches cumulative_gain
    // exactly, so the curve agrees bit-for-bit with net_intake_rate.
    let mut gain = 0.0;
    let mut curve = Vec::with_capacity(scan_bound as usize);
    let mut best_n = 1;
    let mut best_rate = f64::NEG_INFINITY;
    for n in 1..=scan_bound {
        gain += params.reward_at(n);
        let rate = gain / (travel + f64::from(n));
        if rate > best_rate {
            best_rate = rate;
            best_n = n;
        }
        curve.push(rate);
    }
    Ok(MvtSolution { optimal_steps: best_n, optimal_rate: best_rate, rate_curve: curve })
}

/// Discrete leave-now test: after `n` harvest steps the marginal reward
/// still meets the achieved average rate, and one more step would drop
/// below it. Holds exactly at the optimum of the scanned curve.
pub fn marginal_condition_check(params: &RewardParams, travel: f64, n: u32) -> Result<bool> {
    if n < 1 {
        return Err(Error::Param("marginal condition needs n >= 1".into()));
    }
    let rate = params.net_intake_rate(travel, n)?;
    Ok(params.reward_at(n) >= rate && params.reward_at(n + 1) <= rate)
}

/// One patch variety in a mixed habitat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchType {
    /// Fraction of visited patches that are of this type.
    pub proportion: f64,
    /// Energy spent per step while searching inside this patch type.
    pub search_cost_rate: f64,
    /// `gain_table[t]` is the assimilated energy after `t` steps inside;
    /// entry 0 must be 0 and the table must be nondecreasing.
    pub gain_table: Vec<f64>,
}

impl PatchType {
    pub fn new(proportion: f64, search_cost_rate: f64, gain_table: Vec<f64>) -> Result<Self> {
        let patch = PatchType { proportion, search_cost_rate, gain_table };
        patch.validate()?;
        Ok(patch)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.proportion.is_finite() || !(0.0..=1.0).contains(&self.proportion) {
            return Err(Error::Param(format!(
                "patch proportion must lie in [0, 1], got {}",
                self.proportion
            )));
        }
        if !self.search_cost_rate.is_finite() || self.search_cost_rate < 0.0 {
            return Err(Error::Param(format!(
                "search cost rate must be nonnegative, got {}",
                self.search_cost_rate
            )));
        }
        if self.gain_table.is_empty() {
            return Err(Error::Param("gain table must not be empty".into()));
        }
        if self.gain_table[0] != 0.0 {
            return Err(Error::Param(format!(
                "gain table must start at 0, got {}",
                self.gain_table[0]
            )));
        }
        for (t, pair) in self.gain_table.windows(2).enumerate() {
            if !pair[1].is_finite() {
                return Err(Error::Param(format!("gain table entry {} is not finite", t + 1)));
            }
            if pair[1] < pair[0] {
                return Err(Error::Param(format!(
                    "gain table decreases between steps {t} and {}",
                    t + 1
                )));
            }
        }
        Ok(())
    }

    /// Net energy after `t` steps inside: assimilated gain minus search cost.
    pub fn net_gain(&self, t: u32) -> Result<f64> {
        let gross = self.gain_table.get(t as usize).ok_or_else(|| {
            Error::Shape(format!(
                "residence {t} exceeds gain table length {}",
                self.gain_table.len()
            ))
        })?;
        Ok(gross - self.search_cost_rate * f64::from(t))
    }
}

/// A habitat of patch types separated by costly travel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Habitat {
    pub patch_types: Vec<PatchType>,
    /// Energy spent per step while travelling between patches.
    pub travel_cost_rate: f64,
    /// Expected travel steps between successive patches.
    pub travel_time: f64,
}

impl Habitat {
    pub fn new(patch_types: Vec<PatchType>, travel_cost_rate: f64, travel_time: f64) -> Result<Self> {
        let habitat = Habitat { patch_types, travel_cost_rate, travel_time };
        habitat.validate()?;
        Ok(habitat)
    }

    pub fn validate(&self) -> Result<()> {
        if self.patch_types.is_empty() {
            return Err(Error::Param("habitat needs at least one patch type".into()));
        }
        for patch in &self.patch_types {
            patch.validate()?;
        }
        let total: f64 = self.patch_types.iter().map(|p| p.proportion).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Param(format!(
                "patch proportions must sum to 1, got {total}"
            )));
        }
        if !self.travel_cost_rate.is_finite() || self.travel_cost_rate < 0.0 {
            return Err(Error::Param(format!(
                "travel cost rate must be nonnegative, got {}",
                self.travel_cost_rate
            )));
        }
        if !self.travel_time.is_finite() || self.travel_time <= 0.0 {
            return Err(Error::Param(format!(
                "travel time must be positive, got {}",
                self.travel_time
            )));
        }
        Ok(())
    }
}

/// Residence assignment, one entry per patch type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidenceTimes(pub Vec<u32>);

impl From<Vec<u32>> for ResidenceTimes {
    fn from(steps: Vec<u32>) -> Self {
        ResidenceTimes(steps)
    }
}

/// Long-run net energy intake rate for a habitat under a residence policy:
/// proportion-weighted net patch gains minus travel cost, per unit time.
pub fn general_net_rate(habitat: &Habitat, residence: &ResidenceTimes) -> Result<f64> {
    habitat.validate()?;
    if residence.0.len() != habitat.patch_types.len() {
        return Err(Error::Shape(format!(
            "residence has {} entries for {} patch types",
            residence.0.len(),
            habitat.patch_types.len()
        )));
    }
    let mut energy = -habitat.travel_cost_rate * habitat.travel_time;
    let mut time = habitat.travel_time;
    for (patch, &t) in habitat.patch_types.iter().zip(&residence.0) {
        energy += patch.proportion * patch.net_gain(t)?;
        time += patch.proportion * f64::from(t);
    }
    Ok(energy / time)
}

/// Diagnostics for a tabulated gain curve: does it start at zero, rise at
/// first, and eventually stay concave?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GainProperties {
    /// gain(0) == 0.
    pub zero_at_origin: bool,
    /// First forward difference at 0 is positive.
    pub rises_initially: bool,
    /// Smallest index from which every second forward difference is
    /// strictly negative; `None` when the tail never turns concave.
    pub concave_from: Option<u32>,
}

impl GainProperties {
    pub fn all_hold(&self) -> bool {
        self.zero_at_origin && self.rises_initially && self.concave_from.is_some()
    }
}

/// Check the admissibility conditions a gain curve must satisfy for a
/// finite optimal residence to exist. Needs at least four points so that
/// two second differences are defined.
pub fn verify_gain_properties(gain: &[f64]) -> Result<GainProperties> {
    if gain.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "gain property check needs at least 4 points, got {}",
            gain.len()
        )));
    }
    let zero_at_origin = gain[0] == 0.0;
    let rises_initially = gain[1] - gain[0] > 0.0;

    // Second forward difference d(t) = gain(t+2) - 2*gain(t+1) + gain(t),
    // defined for t in 0..len-2. The threshold is one past the last
    // non-negative difference.
    let second_diff = |t: usize| gain[t + 2] - 2.0 * gain[t + 1] + gain[t];
    let last_valid = gain.len() - 3;
    let concave_from = match (0..=last_valid).rev().find(|&t| second_diff(t) >= 0.0) {
        None => Some(0),
        Some(t) if t == last_valid => None,
        Some(t) => Some((t + 1) as u32),
    };

    Ok(GainProperties { zero_at_origin, rises_initially, concave_from })
}
