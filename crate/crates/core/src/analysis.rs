//! Pattern classification, system metrics and toll bands.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::equilibrium::{balanced_flow, solve, EquilibriumResult};
use crate::model::{Network, Scenario, TollSystem, MINUTES_PER_HOUR};
use crate::numeric::{bisect_predicate, golden_min};
use crate::{Error, Result};

/// Masses below this fraction of the fleet count as zero when classifying.
pub const MASS_TOLERANCE: f64 = 1e-6;

/// Relative slack when comparing TTT against the network minimum.
pub const TTT_TOLERANCE: f64 = 1e-6;

/// Resolution of band boundaries located by bisection (JPY).
pub const BAND_TOLERANCE: f64 = 1e-6;

/// Assignment patterns.
///
/// `A_*` is the toll-free system, `B_*` the fixed toll. `_i` covers a
/// minority of DWPT-EVs (r < 0.5), `_ii` a majority. Under a toll, (a) puts
/// every DWPT-EV on the ERS link, (b) none, and (c) splits them; the
/// majority case distinguishes `x1 = x2` (c1), `x1 > x2` (c2) and `x1 < x2` (c3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternLabel {
    Ai,
    Aii,
    BiA,
    BiB,
    BiC,
    BiiA,
    BiiB,
    BiiC1,
    BiiC2,
    BiiC3,
}

impl PatternLabel {
    pub const ALL: [PatternLabel; 10] = [
        PatternLabel::Ai,
        PatternLabel::Aii,
        PatternLabel::BiA,
        PatternLabel::BiB,
        PatternLabel::BiC,
        PatternLabel::BiiA,
        PatternLabel::BiiB,
        PatternLabel::BiiC1,
        PatternLabel::BiiC2,
        PatternLabel::BiiC3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternLabel::Ai => "A_i",
            PatternLabel::Aii => "A_ii",
            PatternLabel::BiA => "B_i_a",
            PatternLabel::BiB => "B_i_b",
            PatternLabel::BiC => "B_i_c",
            PatternLabel::BiiA => "B_ii_a",
            PatternLabel::BiiB => "B_ii_b",
            PatternLabel::BiiC1 => "B_ii_c1",
            PatternLabel::BiiC2 => "B_ii_c2",
            PatternLabel::BiiC3 => "B_ii_c3",
        }
    }

    /// Every DWPT-EV on the ERS link under a toll.
    pub fn is_all_on_ers(self) -> bool {
        matches!(self, PatternLabel::BiA | PatternLabel::BiiA)
    }
}

impl fmt::Display for PatternLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PatternLabel::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or(Error::Usage("unknown pattern label"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Total travel time, vehicle-minutes.
    pub ttt: f64,
    /// Total charged volume, kWh.
    pub tcv: f64,
    /// Toll revenue, JPY.
    pub revenue: f64,
    /// `r * N * t1`, the ERS-link travel time summed over the whole DWPT
    /// fleet. Diagnostic only.
    pub dwpt_fleet_time: f64,
    pub conventional_so: bool,
    pub ers_optimum: bool,
}

/// Half-open price interval `[c_low, c_high)` producing one pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TollBand {
    pub pattern: PatternLabel,
    pub c_low: f64,
    pub c_high: f64,
}

impl TollBand {
    pub fn contains(&self, price: f64) -> bool {
        self.c_low <= price && price < self.c_high
    }
}

/// Pattern of the band containing `price`.
pub fn band_pattern(bands: &[TollBand], price: f64) -> Option<PatternLabel> {
    bands.iter().find(|b| b.contains(price)).map(|b| b.pattern)
}

fn check_pair(scenario: &Scenario, result: &EquilibriumResult) -> Result<()> {
    let d = scenario.dwpt_mass();
    let o = scenario.other_mass();
    let ok = |sum: f64, mass: f64| (sum - mass).abs() <= 1e-6 * mass.max(1.0);
    if !ok(result.x1_d + result.x2_d, d) || !ok(result.x1_o + result.x2_o, o) {
        return Err(Error::Usage(
            "equilibrium flows do not conserve this scenario's vehicle masses",
        ));
    }
    Ok(())
}

/// Labels an equilibrium with its assignment pattern.
pub fn classify(scenario: &Scenario, result: &EquilibriumResult) -> Result<PatternLabel> {
    check_pair(scenario, result)?;
    let tol = MASS_TOLERANCE * scenario.total_vehicles();
    let majority = scenario.dwpt_ratio() >= 0.5;
    if scenario.toll().is_free() {
        return Ok(if majority {
            PatternLabel::Aii
        } else {
            PatternLabel::Ai
        });
    }
    let all_on_ers = result.x2_d <= tol;
    let none_on_ers = result.x1_d <= tol;
    Ok(match (majority, all_on_ers, none_on_ers) {
        (false, true, _) => PatternLabel::BiA,
        (false, false, true) => PatternLabel::BiB,
        (false, false, false) => PatternLabel::BiC,
        (true, true, _) => PatternLabel::BiiA,
        (true, false, true) => PatternLabel::BiiB,
        (true, false, false) => {
            let diff = result.x1() - result.x2();
            if diff.abs() <= tol {
                PatternLabel::BiiC1
            } else if diff > 0.0 {
                PatternLabel::BiiC2
            } else {
                PatternLabel::BiiC3
            }
        }
    })
}

/// ERS-link flow minimising total travel time, and that minimum.
pub fn min_total_travel_time(network: &Network, total: f64) -> (f64, f64) {
    let (l1, l2) = (network.link1(), network.link2());
    golden_min(
        |x| x * l1.time_unchecked(x) + (total - x) * l2.time_unchecked(total - x),
        0.0,
        total,
        1e-9 * total,
    )
}

fn total_travel_time(result: &EquilibriumResult) -> f64 {
    result.x1() * result.t1 + result.x2() * result.t2
}

/// TTT equals the network minimum (within a relative 1e-6).
pub fn is_conventional_so(scenario: &Scenario, result: &EquilibriumResult) -> bool {
    let (_, best) = min_total_travel_time(scenario.network(), scenario.total_vehicles());
    total_travel_time(result) <= best * (1.0 + TTT_TOLERANCE)
}

/// With link flows held fixed, no further DWPT-EV could be placed on the ERS
/// link (by swapping with another vehicle there).
pub fn is_ers_optimum(scenario: &Scenario, result: &EquilibriumResult) -> bool {
    let cap = result.x1().min(scenario.dwpt_mass());
    result.x1_d >= cap - MASS_TOLERANCE * scenario.total_vehicles()
}

pub fn metrics(scenario: &Scenario, result: &EquilibriumResult) -> Result<Metrics> {
    check_pair(scenario, result)?;
    let power = scenario.network().link1().ers_power_kw();
    Ok(Metrics {
        ttt: total_travel_time(result),
        tcv: result.n_thres * power * result.t1 / MINUTES_PER_HOUR,
        revenue: result.n_thres * scenario.toll().price(),
        dwpt_fleet_time: scenario.dwpt_mass() * result.t1,
        conventional_so: is_conventional_so(scenario, result),
        ers_optimum: is_ers_optimum(scenario, result),
    })
}

const MINORITY_ORDER: [PatternLabel; 3] = [PatternLabel::BiA, PatternLabel::BiC, PatternLabel::BiB];
const MAJORITY_ORDER: [PatternLabel; 5] = [
    PatternLabel::BiiA,
    PatternLabel::BiiC2,
    PatternLabel::BiiC1,
    PatternLabel::BiiC3,
    PatternLabel::BiiB,
];

/// Pattern produced by a fixed toll of `price`.
pub fn pattern_at_price(scenario: &Scenario, price: f64) -> Result<PatternLabel> {
    let priced = scenario.with_toll(TollSystem::fixed(price)?);
    let (eq, _) = solve(&priced)?;
    classify(&priced, &eq)
}

/// Price intervals that produce each pattern under a fixed toll, ordered by
/// price and covering `[0, inf)`. Empty bands are omitted.
///
/// Raising the price moves DWPT-EVs off the ERS link, so patterns appear in
/// the fixed order (a), (c) [(c2), (c1), (c3)], (b). Boundaries come from
/// closed forms where the corner flows are self-consistent and from
/// bisection over the solver otherwise.
pub fn toll_bands(scenario: &Scenario) -> Result<Vec<TollBand>> {
    if scenario.toll().is_free() {
        return Err(Error::Usage("toll bands need a fixed-toll scenario"));
    }
    let total = scenario.total_vehicles();
    let dwpt = scenario.dwpt_mass();
    let other = scenario.other_mass();
    let network = scenario.network();
    let (l1, l2) = (network.link1(), network.link2());
    let prefs = scenario.prefs();
    let soc = scenario.soc();
    let charge = |s: f64| prefs.voe() * (1.0 / s - 1.0);
    // money cost of the ERS link's extra travel time at ERS-link flow x1
    let time_penalty =
        |x1: f64| prefs.vot() * (l1.time_unchecked(x1) - l2.time_unchecked(total - x1));

    let x_eq = balanced_flow(network, total)?;
    let majority = scenario.dwpt_ratio() >= 0.5;
    let order: &[PatternLabel] = if majority {
        &MAJORITY_ORDER
    } else {
        &MINORITY_ORDER
    };
    let last = order.len() - 2;

    let closed_form = |k: usize| -> Option<f64> {
        if !majority {
            // the balanced split is reachable for any DWPT assignment
            if dwpt <= x_eq && x_eq <= other {
                let penalty = time_penalty(x_eq);
                return Some(match k {
                    0 => charge(soc.max()) - penalty,
                    _ => charge(soc.min()) - penalty,
                });
            }
            return None;
        }
        if k == 0 && dwpt >= x_eq {
            Some(charge(soc.max()) - time_penalty(dwpt))
        } else if k == last && other <= x_eq {
            Some(charge(soc.min()) - time_penalty(other))
        } else {
            None
        }
    };

    let rank = |price: f64| -> Result<usize> {
        let p = pattern_at_price(scenario, price)?;
        order
            .iter()
            .position(|&q| q == p)
            .ok_or(Error::Usage("pattern outside the expected sequence"))
    };

    // above this even the emptiest ERS link cannot attract anyone
    let c_max =
        charge(soc.min()) - prefs.vot() * (l1.time_unchecked(0.0) - l2.time_unchecked(total)) + 1.0;

    let mut boundaries = Vec::with_capacity(order.len() - 1);
    let mut prev = 0.0f64;
    for k in 0..order.len() - 1 {
        let b = match closed_form(k) {
            Some(c) => c.max(prev),
            None if rank(prev)? > k => prev,
            None => bisect_predicate(
                "toll band boundary",
                |c| Ok(rank(c)? > k),
                prev,
                c_max,
                BAND_TOLERANCE,
            )?,
        };
        boundaries.push(b);
        prev = b;
    }

    let mut bands = Vec::with_capacity(order.len());
    let mut low = 0.0;
    for (k, &pattern) in order.iter().enumerate() {
        let high = boundaries.get(k).copied().unwrap_or(f64::INFINITY);
        if high > low {
            bands.push(TollBand {
                pattern,
                c_low: low,
                c_high: high,
            });
            low = high;
        }
    }
    Ok(bands)
}
