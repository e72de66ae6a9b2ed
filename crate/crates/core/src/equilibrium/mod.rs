//! User-equilibrium solver.
//!
//! DWPT-EVs sort themselves by state of charge: at given link times every
//! vehicle below a threshold SoC prefers the ERS link. Other vehicles only see
//! travel time, so they balance the links whenever they can. The solver tries
//! the balanced ("interior") configuration first and falls back to one of two
//! corners where every other vehicle sits on a single link, solving the
//! remaining one-dimensional fixed point by bisection.

mod oracle;

pub use oracle::{brute_force_equilibrium, potential, BruteForce};

use alloc::format;

use crate::model::{Network, Preferences, Scenario};
use crate::numeric::bisect_non_decreasing;
use crate::{Error, Result};

/// Minimum money-metric gain (JPY) that counts as a strict improvement.
pub const UTILITY_TOLERANCE: f64 = 1e-9;

/// Bisection tolerance on flows, relative to the total number of vehicles.
pub const FLOW_TOLERANCE: f64 = 1e-9;

/// Class-by-link flows at equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    /// DWPT-EVs on the ERS link.
    pub x1_d: f64,
    /// DWPT-EVs on the plain link.
    pub x2_d: f64,
    /// Other vehicles on the ERS link.
    pub x1_o: f64,
    /// Other vehicles on the plain link.
    pub x2_o: f64,
    pub t1: f64,
    pub t2: f64,
    /// SoC below which a DWPT-EV prefers the ERS link at `(t1, t2)`.
    /// Equal to 1 when every DWPT-EV prefers it.
    pub s_thres: f64,
    /// Mass of DWPT-EVs on the ERS link (same as `x1_d`).
    pub n_thres: f64,
}

impl EquilibriumResult {
    /// Completes an assignment given the ERS-link flows of both classes.
    pub fn from_flows(scenario: &Scenario, x1_d: f64, x1_o: f64) -> Result<Self> {
        let d = scenario.dwpt_mass();
        let o = scenario.other_mass();
        let x2_d = (d - x1_d).max(0.0);
        let x2_o = (o - x1_o).max(0.0);
        let (t1, t2) = scenario.network().times(x1_d + x1_o, x2_d + x2_o)?;
        let s_thres = threshold_soc(scenario.prefs(), scenario.toll().price(), t1, t2);
        Ok(EquilibriumResult {
            x1_d,
            x2_d,
            x1_o,
            x2_o,
            t1,
            t2,
            s_thres,
            n_thres: x1_d,
        })
    }

    pub fn x1(&self) -> f64 {
        self.x1_d + self.x1_o
    }

    pub fn x2(&self) -> f64 {
        self.x2_d + self.x2_o
    }
}

/// Which class-level configuration the solver settled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    /// Other vehicles balance the links: `t1 == t2`.
    Interior,
    /// Every other vehicle is on the plain link and `t1 >= t2`.
    CornerOtherOn2,
    /// Every other vehicle is on the ERS link and `t1 <= t2`.
    CornerOtherOn1,
}

/// SoC at which a DWPT-EV is indifferent between the links.
///
/// Solves `voe * (1/s - 1) = vot * (t1 - t2) + toll_price`. When the right
/// hand side is not positive every DWPT-EV prefers the ERS link and 1 is
/// returned.
pub fn threshold_soc(prefs: &Preferences, toll_price: f64, t1: f64, t2: f64) -> f64 {
    let disadvantage = toll_price + prefs.vot() * (t1 - t2);
    if disadvantage <= 0.0 {
        1.0
    } else {
        prefs.voe() / (prefs.voe() + disadvantage)
    }
}

/// ERS-link flow at which both links have the same travel time when
/// `total` vehicles are split between them. Clamped to `[0, total]` if one
/// link is slower even when empty.
pub fn balanced_flow(network: &Network, total: f64) -> Result<f64> {
    if network.is_symmetric() {
        return Ok(0.5 * total);
    }
    let (l1, l2) = (network.link1(), network.link2());
    let gap = |x: f64| l1.time_unchecked(x) - l2.time_unchecked(total - x);
    if gap(0.0) >= 0.0 {
        return Ok(0.0);
    }
    if gap(total) <= 0.0 {
        return Ok(total);
    }
    bisect_non_decreasing(
        "balanced flow",
        gap,
        0.0,
        total,
        FLOW_TOLERANCE * total,
        0.0,
    )
}

/// Deterministic user equilibrium of `scenario`.
pub fn solve(scenario: &Scenario) -> Result<(EquilibriumResult, RegimeTag)> {
    let total = scenario.total_vehicles();
    let dwpt = scenario.dwpt_mass();
    let other = scenario.other_mass();
    let network = scenario.network();
    let prefs = scenario.prefs();
    let soc = scenario.soc();
    let price = scenario.toll().price();
    let (l1, l2) = (network.link1(), network.link2());
    let tol = FLOW_TOLERANCE * total;

    let x_eq = balanced_flow(network, total)?;
    let s_star = threshold_soc(
        prefs,
        price,
        l1.time_unchecked(x_eq),
        l2.time_unchecked(total - x_eq),
    );
    let n_star = soc.count_below(s_star);

    if n_star <= x_eq + tol && x_eq - n_star <= other + tol {
        let x1_o = (x_eq - n_star).clamp(0.0, other);
        let result = EquilibriumResult::from_flows(scenario, n_star, x1_o)?;
        return Ok((result, RegimeTag::Interior));
    }

    if n_star > x_eq {
        // Too many DWPT-EVs want the ERS link: it ends up slower and every
        // other vehicle leaves it. Solve for the DWPT mass `m` on link 1.
        let excess = |m: f64| {
            let s = threshold_soc(
                prefs,
                price,
                l1.time_unchecked(m),
                l2.time_unchecked(total - m),
            );
            m - soc.count_below(s)
        };
        let m = if excess(dwpt) <= 0.0 {
            dwpt
        } else {
            bisect_non_decreasing("ERS-heavy corner", excess, x_eq, dwpt, tol, tol)
                .map_err(|e| with_context(e, scenario))?
        };
        let result = EquilibriumResult::from_flows(scenario, m, 0.0)?;
        return Ok((result, RegimeTag::CornerOtherOn2));
    }

    // Too few DWPT-EVs want the ERS link for other vehicles to balance it.
    let excess = |m: f64| {
        let x1 = other + m;
        let s = threshold_soc(
            prefs,
            price,
            l1.time_unchecked(x1),
            l2.time_unchecked(total - x1),
        );
        m - soc.count_below(s)
    };
    let m = if excess(0.0) >= 0.0 {
        0.0
    } else {
        bisect_non_decreasing("plain-heavy corner", excess, 0.0, x_eq - other, tol, tol)
            .map_err(|e| with_context(e, scenario))?
    };
    let result = EquilibriumResult::from_flows(scenario, m, other)?;
    Ok((result, RegimeTag::CornerOtherOn1))
}

fn with_context(err: Error, scenario: &Scenario) -> Error {
    match err {
        Error::Numerical { routine, detail } => Error::Numerical {
            routine,
            detail: format!(
                "{detail} (N = {}, r = {}, C = {}, vot = {}, voe = {})",
                scenario.total_vehicles(),
                scenario.dwpt_ratio(),
                scenario.toll().price(),
                scenario.prefs().vot(),
                scenario.prefs().voe()
            ),
        },
        other => other,
    }
}

/// A broken equilibrium condition found by [`verify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NegativeFlow,
    Conservation {
        class_dwpt: bool,
        excess: f64,
    },
    TravelTime {
        link: u8,
        expected: f64,
        found: f64,
    },
    /// Other vehicles use both links at unequal times.
    OtherSplitUnequal {
        gap: f64,
    },
    /// Other vehicles sit entirely on the strictly slower link.
    OtherOnSlowerLink {
        gap: f64,
    },
    /// DWPT-EVs below the threshold are missing from the ERS link, or ones
    /// above it are on it.
    Threshold {
        below: f64,
        at_or_below: f64,
        x1_d: f64,
    },
}

/// Checks the equilibrium conditions of `result` for `scenario`.
///
/// `eps_t` bounds time gaps (minutes), `eps_s` widens the threshold, and
/// `eps_mass` is the absolute slack on masses.
pub fn verify(
    scenario: &Scenario,
    result: &EquilibriumResult,
    eps_t: f64,
    eps_s: f64,
    eps_mass: f64,
) -> core::result::Result<(), Violation> {
    let r = result;
    if [r.x1_d, r.x2_d, r.x1_o, r.x2_o]
        .iter()
        .any(|&x| x < -eps_mass || x.is_nan())
    {
        return Err(Violation::NegativeFlow);
    }
    let d_excess = r.x1_d + r.x2_d - scenario.dwpt_mass();
    if d_excess.abs() > 1e-6 * scenario.dwpt_mass().max(1.0) {
        return Err(Violation::Conservation {
            class_dwpt: true,
            excess: d_excess,
        });
    }
    let o_excess = r.x1_o + r.x2_o - scenario.other_mass();
    if o_excess.abs() > 1e-6 * scenario.other_mass().max(1.0) {
        return Err(Violation::Conservation {
            class_dwpt: false,
            excess: o_excess,
        });
    }
    let net = scenario.network();
    for (link, params, x, t) in [
        (1, net.link1(), r.x1(), r.t1),
        (2, net.link2(), r.x2(), r.t2),
    ] {
        let expected = params.time_unchecked(x.max(0.0));
        if (expected - t).abs() > 1e-9 * expected {
            return Err(Violation::TravelTime {
                link,
                expected,
                found: t,
            });
        }
    }
    let gap = r.t1 - r.t2;
    let on1 = r.x1_o > eps_mass;
    let on2 = r.x2_o > eps_mass;
    if on1 && on2 && gap.abs() > eps_t {
        return Err(Violation::OtherSplitUnequal { gap });
    }
    if (on1 && !on2 && gap > eps_t) || (on2 && !on1 && gap < -eps_t) {
        return Err(Violation::OtherOnSlowerLink { gap });
    }
    let s = threshold_soc(scenario.prefs(), scenario.toll().price(), r.t1, r.t2);
    let below = scenario.soc().count_below(s - eps_s);
    let at_or_below = scenario.soc().count_below(s + eps_s);
    let at_or_below = if s >= 1.0 {
        scenario.dwpt_mass()
    } else {
        at_or_below
    };
    if r.x1_d < below - eps_mass || r.x1_d > at_or_below + eps_mass {
        return Err(Violation::Threshold {
            below,
            at_or_below,
            x1_d: r.x1_d,
        });
    }
    Ok(())
}
