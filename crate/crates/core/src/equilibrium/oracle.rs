//! Agent-level equilibrium search for discrete populations.
//!
//! Independent of the analytic solver: it knows nothing about thresholds or
//! regimes, only that each vehicle keeps switching links while a switch pays.

use alloc::vec::Vec;
use alloc::{format, vec};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EquilibriumResult, UTILITY_TOLERANCE};
use crate::model::{utility, Link, Network, Preferences, Scenario, TollSystem, VehicleClass};
use crate::{Error, Result};

const MAX_SWITCHES: u64 = 10_000_000;
const MAX_ITERATIVE_AGENTS: usize = 10_000;
const MAX_EXHAUSTIVE_AGENTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruteForce {
    /// Better-response switching in seeded random order.
    Iterative { seed: u64 },
    /// Iterative search cross-checked against enumeration of every profile.
    Exhaustive,
}

#[derive(Debug, Clone, Copy)]
struct Agent {
    soc: Option<f64>,
    link: Link,
}

impl Agent {
    fn class(&self) -> VehicleClass {
        if self.soc.is_some() {
            VehicleClass::Dwpt
        } else {
            VehicleClass::Other
        }
    }
}

struct Game<'a> {
    network: &'a Network,
    prefs: &'a Preferences,
    toll: TollSystem,
}

impl Game<'_> {
    /// Utility gain of `agent` moving to the other link, own flow included.
    fn switch_gain(&self, agent: &Agent, x1: usize, x2: usize) -> f64 {
        let (l1, l2) = (self.network.link1(), self.network.link2());
        let now = (l1.time_unchecked(x1 as f64), l2.time_unchecked(x2 as f64));
        let target = agent.link.other();
        let after = match target {
            Link::Ers => (l1.time_unchecked((x1 + 1) as f64), now.1),
            Link::Plain => (now.0, l2.time_unchecked((x2 + 1) as f64)),
        };
        let u = |link, (t1, t2)| {
            utility(
                agent.class(),
                link,
                t1,
                t2,
                self.toll,
                self.prefs,
                agent.soc,
            )
            .expect("agent inputs are validated on construction")
        };
        u(target, after) - u(agent.link, now)
    }
}

/// Rosenthal-style potential of a discrete assignment.
///
/// `vot * sum_a sum_{k=1..x_a} t_a(k)` minus, for each DWPT-EV on the ERS
/// link, its private net benefit `voe * (1/s - 1) - C`. A unilateral switch
/// changes it by exactly minus the switcher's utility gain.
pub fn potential<I>(
    network: &Network,
    prefs: &Preferences,
    toll: TollSystem,
    x1: usize,
    x2: usize,
    ers_dwpt_socs: I,
) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let (l1, l2) = (network.link1(), network.link2());
    let congestion: f64 = (1..=x1).map(|k| l1.time_unchecked(k as f64)).sum::<f64>()
        + (1..=x2).map(|k| l2.time_unchecked(k as f64)).sum::<f64>();
    let private: f64 = ers_dwpt_socs
        .into_iter()
        .map(|s| prefs.voe() * (1.0 / s - 1.0) - toll.price())
        .sum();
    prefs.vot() * congestion - private
}

fn agents_of(scenario: &Scenario) -> Result<Vec<Agent>> {
    let socs = scenario.soc().agents().ok_or(Error::Usage(
        "the brute-force oracle needs a discrete SoC population",
    ))?;
    let other = scenario.other_mass();
    let n_other = libm::round(other);
    if (other - n_other).abs() > 1e-6 {
        return Err(Error::Usage(
            "the brute-force oracle needs a whole number of other vehicles",
        ));
    }
    let mut agents: Vec<Agent> = socs
        .iter()
        .map(|&s| Agent {
            soc: Some(s),
            link: Link::Plain,
        })
        .collect();
    agents.extend((0..n_other as usize).map(|_| Agent {
        soc: None,
        link: Link::Plain,
    }));
    Ok(agents)
}

fn iterate(game: &Game<'_>, agents: &mut [Agent], seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..agents.len()).collect();
    let mut x1 = agents.iter().filter(|a| a.link == Link::Ers).count();
    let mut x2 = agents.len() - x1;
    let mut switches = 0u64;
    loop {
        order.shuffle(&mut rng);
        let mut moved = false;
        for &i in &order {
            if game.switch_gain(&agents[i], x1, x2) > UTILITY_TOLERANCE {
                match agents[i].link {
                    Link::Ers => (x1, x2) = (x1 - 1, x2 + 1),
                    Link::Plain => (x1, x2) = (x1 + 1, x2 - 1),
                }
                agents[i].link = agents[i].link.other();
                moved = true;
                switches += 1;
                if switches > MAX_SWITCHES {
                    return Err(Error::Numerical {
                        routine: "better-response oracle",
                        detail: format!("no equilibrium after {MAX_SWITCHES} switches"),
                    });
                }
            }
        }
        if !moved {
            return Ok(());
        }
    }
}

fn summarize(scenario: &Scenario, agents: &[Agent]) -> Result<EquilibriumResult> {
    let count = |dwpt: bool| {
        agents
            .iter()
            .filter(|a| a.link == Link::Ers && a.soc.is_some() == dwpt)
            .count() as f64
    };
    EquilibriumResult::from_flows(scenario, count(true), count(false))
}

/// Equilibrium of a discrete population found by letting agents switch.
///
/// Starts from everyone on the plain link. The finite improvement property
/// of the underlying potential game guarantees termination.
pub fn brute_force_equilibrium(scenario: &Scenario, mode: BruteForce) -> Result<EquilibriumResult> {
    let mut agents = agents_of(scenario)?;
    let game = Game {
        network: scenario.network(),
        prefs: scenario.prefs(),
        toll: scenario.toll(),
    };
    match mode {
        BruteForce::Iterative { seed } => {
            if agents.len() > MAX_ITERATIVE_AGENTS {
                return Err(Error::Usage("iterative oracle is limited to 10000 agents"));
            }
            iterate(&game, &mut agents, seed)?;
        }
        BruteForce::Exhaustive => {
            if agents.len() > MAX_EXHAUSTIVE_AGENTS {
                return Err(Error::Usage("exhaustive oracle is limited to 20 agents"));
            }
            iterate(&game, &mut agents, 0)?;
            cross_check(&game, &agents)?;
        }
    }
    summarize(scenario, &agents)
}

/// Enumerates every profile and checks that utility-based and
/// potential-based stability agree, and that the iterative endpoint is stable.
fn cross_check(game: &Game<'_>, endpoint: &[Agent]) -> Result<()> {
    let n = endpoint.len();
    let (l1, l2) = (game.network.link1(), game.network.link2());
    let mut cum1 = vec![0.0; n + 1];
    let mut cum2 = vec![0.0; n + 1];
    for k in 1..=n {
        cum1[k] = cum1[k - 1] + l1.time_unchecked(k as f64);
        cum2[k] = cum2[k - 1] + l2.time_unchecked(k as f64);
    }
    let offsets: Vec<f64> = endpoint
        .iter()
        .map(|a| match a.soc {
            Some(s) => game.prefs.voe() * (1.0 / s - 1.0) - game.toll.price(),
            None => 0.0,
        })
        .collect();

    // bit i set = agent i on the ERS link
    let profiles = 1usize << n;
    let phi: Vec<f64> = (0..profiles)
        .map(|mask| {
            let x1 = mask.count_ones() as usize;
            let private: f64 = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| offsets[i])
                .sum();
            game.prefs.vot() * (cum1[x1] + cum2[n - x1]) - private
        })
        .collect();

    let mut argmin = 0;
    let mut scratch: Vec<Agent> = endpoint.to_vec();
    for mask in 0..profiles {
        if phi[mask] < phi[argmin] {
            argmin = mask;
        }
        let x1 = mask.count_ones() as usize;
        let x2 = n - x1;
        let mut by_potential = true;
        let mut by_utility = true;
        for i in 0..n {
            if phi[mask ^ (1 << i)] < phi[mask] - UTILITY_TOLERANCE {
                by_potential = false;
            }
            scratch[i].link = if mask >> i & 1 == 1 {
                Link::Ers
            } else {
                Link::Plain
            };
            if game.switch_gain(&scratch[i], x1, x2) > UTILITY_TOLERANCE {
                by_utility = false;
            }
        }
        if by_potential != by_utility {
            return Err(Error::Numerical {
                routine: "exhaustive oracle",
                detail: format!(
                    "profile {mask:#b}: stable by potential = {by_potential}, by utility = {by_utility}"
                ),
            });
        }
    }

    let end_mask = endpoint
        .iter()
        .enumerate()
        .filter(|(_, a)| a.link == Link::Ers)
        .fold(0usize, |m, (i, _)| m | 1 << i);
    let stable =
        |mask: usize| (0..n).all(|i| phi[mask ^ (1 << i)] >= phi[mask] - UTILITY_TOLERANCE);
    if !stable(end_mask) {
        return Err(Error::Numerical {
            routine: "exhaustive oracle",
            detail: format!("iterative endpoint {end_mask:#b} admits an improving switch"),
        });
    }
    if !stable(argmin) {
        return Err(Error::Numerical {
            routine: "exhaustive oracle",
            detail: format!("potential minimiser {argmin:#b} is not stable"),
        });
    }
    Ok(())
}
