//! Day-to-day better-response dynamics over a discrete population.
//!
//! Agents revise one at a time against the current flows, so the potential
//! of the game falls with every switch and runs always settle.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::UTILITY_TOLERANCE;
use crate::model::{utility, Link, Network, Preferences, Scenario, TollSystem, VehicleClass};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub agent_id: usize,
    pub class: VehicleClass,
    /// Present exactly for DWPT-EVs.
    pub soc: Option<f64>,
    pub current_link: Link,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Agents revise in id order every round.
    Sequential,
    /// A fresh permutation per round drawn from a ChaCha8 stream.
    SeededRandom { seed: u64 },
}

/// Where agents start before the first round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialAssignment {
    AllOn(Link),
    /// Each agent picks a link by fair coin.
    Random {
        seed: u64,
    },
    /// The `x1_d` lowest-SoC DWPT-EVs and the first `x1_o` other vehicles
    /// on the ERS link, everyone else on the plain link.
    Flows {
        x1_d: usize,
        x1_o: usize,
    },
}

/// Builds one agent per vehicle of a discrete scenario.
pub fn agents_from_scenario(
    scenario: &Scenario,
    init: InitialAssignment,
) -> Result<Vec<AgentState>> {
    let socs = scenario
        .soc()
        .agents()
        .ok_or(Error::Usage("simulation needs a discrete SoC population"))?;
    let other = scenario.other_mass();
    let n_other = libm::round(other);
    if (other - n_other).abs() > 1e-6 {
        return Err(Error::Usage(
            "simulation needs a whole number of other vehicles",
        ));
    }
    let n_other = n_other as usize;
    if let InitialAssignment::Flows { x1_d, x1_o } = init {
        if x1_d > socs.len() || x1_o > n_other {
            return Err(Error::Usage("initial flows exceed the class sizes"));
        }
    }
    let mut rng = match init {
        InitialAssignment::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut pick = |rank: usize, is_dwpt: bool| match init {
        InitialAssignment::AllOn(link) => link,
        InitialAssignment::Random { .. } => {
            let rng = rng.as_mut().expect("seeded above");
            if rng.random_bool(0.5) {
                Link::Ers
            } else {
                Link::Plain
            }
        }
        InitialAssignment::Flows { x1_d, x1_o } => {
            let quota = if is_dwpt { x1_d } else { x1_o };
            if rank < quota {
                Link::Ers
            } else {
                Link::Plain
            }
        }
    };
    let mut agents: Vec<AgentState> = Vec::with_capacity(socs.len() + n_other);
    for (k, &s) in socs.iter().enumerate() {
        agents.push(AgentState {
            agent_id: k,
            class: VehicleClass::Dwpt,
            soc: Some(s),
            current_link: pick(k, true),
        });
    }
    for k in 0..n_other {
        agents.push(AgentState {
            agent_id: socs.len() + k,
            class: VehicleClass::Other,
            soc: None,
            current_link: pick(k, false),
        });
    }
    Ok(agents)
}

/// State after one round (round 0 is the initial state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSnapshot {
    pub round: usize,
    pub x1_d: usize,
    pub x1_o: usize,
    pub t1: f64,
    pub t2: f64,
    pub switches: usize,
    pub potential: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Round 0 followed by every simulated round.
    pub snapshots: Vec<RoundSnapshot>,
    pub terminal_round: usize,
    pub converged: bool,
    pub seed: Option<u64>,
    pub total_switches: u64,
    /// Largest potential increase over any single switch. Non-positive up to
    /// rounding when the dynamics behave.
    pub max_potential_rise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub switches: usize,
    pub max_potential_rise: f64,
}

/// One population evolving under asynchronous better response.
#[derive(Debug, Clone)]
pub struct Simulator {
    agents: Vec<AgentState>,
    network: Network,
    prefs: Preferences,
    toll: TollSystem,
    policy: OrderPolicy,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    x1: usize,
    x2: usize,
    /// Prefix sums of link travel times, `cum[k] = sum_{j=1..k} t(j)`.
    cum1: Vec<f64>,
    cum2: Vec<f64>,
}

impl Simulator {
    pub fn new(
        agents: Vec<AgentState>,
        network: Network,
        prefs: Preferences,
        toll: TollSystem,
        policy: OrderPolicy,
    ) -> Result<Self> {
        for a in &agents {
            match (a.class, a.soc) {
                (VehicleClass::Dwpt, Some(s)) if s > 0.0 && s < 1.0 => {}
                (VehicleClass::Other, None) => {}
                _ => {
                    return Err(Error::Invalid {
                        field: "agents",
                        reason: "DWPT-EVs need a SoC in (0, 1) and other vehicles none",
                    })
                }
            }
        }
        let n = agents.len();
        let x1 = agents
            .iter()
            .filter(|a| a.current_link == Link::Ers)
            .count();
        let prefix = |link: &crate::model::LinkParams| {
            let mut cum = Vec::with_capacity(n + 1);
            cum.push(0.0);
            for k in 1..=n {
                cum.push(cum[k - 1] + link.time_unchecked(k as f64));
            }
            cum
        };
        let seed = match policy {
            OrderPolicy::SeededRandom { seed } => seed,
            OrderPolicy::Sequential => 0,
        };
        Ok(Simulator {
            cum1: prefix(network.link1()),
            cum2: prefix(network.link2()),
            order: (0..n).collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            x1,
            x2: n - x1,
            agents,
            network,
            prefs,
            toll,
            policy,
        })
    }

    /// Simulator for a discrete scenario.
    pub fn for_scenario(
        scenario: &Scenario,
        init: InitialAssignment,
        policy: OrderPolicy,
    ) -> Result<Self> {
        let agents = agents_from_scenario(scenario, init)?;
        Simulator::new(
            agents,
            *scenario.network(),
            *scenario.prefs(),
            scenario.toll(),
            policy,
        )
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn into_agents(self) -> Vec<AgentState> {
        self.agents
    }

    /// `(x1_d, x1_o)`.
    pub fn ers_counts(&self) -> (usize, usize) {
        let dwpt = self
            .agents
            .iter()
            .filter(|a| a.current_link == Link::Ers && a.class == VehicleClass::Dwpt)
            .count();
        (dwpt, self.x1 - dwpt)
    }

    pub fn times(&self) -> (f64, f64) {
        (
            self.network.link1().time_unchecked(self.x1 as f64),
            self.network.link2().time_unchecked(self.x2 as f64),
        )
    }

    /// Potential of the current assignment, recomputed from scratch.
    pub fn potential(&self) -> f64 {
        let private: f64 = self
            .agents
            .iter()
            .filter(|a| a.current_link == Link::Ers)
            .filter_map(|a| a.soc)
            .map(|s| self.prefs.voe() * (1.0 / s - 1.0) - self.toll.price())
            .sum();
        self.prefs.vot() * (self.cum1[self.x1] + self.cum2[self.x2]) - private
    }

    fn gain(&self, agent: &AgentState) -> f64 {
        let (l1, l2) = (self.network.link1(), self.network.link2());
        let now = self.times();
        let target = agent.current_link.other();
        let after = match target {
            Link::Ers => (l1.time_unchecked((self.x1 + 1) as f64), now.1),
            Link::Plain => (now.0, l2.time_unchecked((self.x2 + 1) as f64)),
        };
        let u = |link, (t1, t2)| {
            utility(agent.class, link, t1, t2, self.toll, &self.prefs, agent.soc)
                .expect("agents validated on construction")
        };
        u(target, after) - u(agent.current_link, now)
    }

    /// One round: every agent, in policy order, switches iff that strictly
    /// improves its utility at the current flows.
    pub fn step(&mut self) -> StepReport {
        if let OrderPolicy::SeededRandom { .. } = self.policy {
            self.order.shuffle(&mut self.rng);
        }
        let mut switches = 0;
        let mut max_rise = f64::NEG_INFINITY;
        for idx in 0..self.order.len() {
            let i = self.order[idx];
            if self.gain(&self.agents[i]) <= UTILITY_TOLERANCE {
                continue;
            }
            let before = self.potential();
            let agent = &mut self.agents[i];
            match agent.current_link {
                Link::Ers => (self.x1, self.x2) = (self.x1 - 1, self.x2 + 1),
                Link::Plain => (self.x1, self.x2) = (self.x1 + 1, self.x2 - 1),
            }
            agent.current_link = agent.current_link.other();
            switches += 1;
            max_rise = max_rise.max(self.potential() - before);
        }
        StepReport {
            switches,
            max_potential_rise: max_rise,
        }
    }

    fn snapshot(&self, round: usize, switches: usize) -> RoundSnapshot {
        let (x1_d, x1_o) = self.ers_counts();
        let (t1, t2) = self.times();
        RoundSnapshot {
            round,
            x1_d,
            x1_o,
            t1,
            t2,
            switches,
            potential: self.potential(),
        }
    }

    /// Steps until a round without switches or until `max_rounds` rounds.
    pub fn run(&mut self, max_rounds: usize) -> Result<Trajectory> {
        if max_rounds == 0 {
            return Err(Error::Usage("max_rounds must be at least 1"));
        }
        let mut snapshots = Vec::new();
        snapshots.push(self.snapshot(0, 0));
        let mut total = 0u64;
        let mut max_rise = f64::NEG_INFINITY;
        let mut converged = false;
        let mut terminal = 0;
        for round in 1..=max_rounds {
            let report = self.step();
            total += report.switches as u64;
            max_rise = max_rise.max(report.max_potential_rise);
            snapshots.push(self.snapshot(round, report.switches));
            terminal = round;
            if report.switches == 0 {
                converged = true;
                break;
            }
        }
        Ok(Trajectory {
            snapshots,
            terminal_round: terminal,
            converged,
            seed: match self.policy {
                OrderPolicy::SeededRandom { seed } => Some(seed),
                OrderPolicy::Sequential => None,
            },
            total_switches: total,
            max_potential_rise: max_rise,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinkParams;
    use alloc::vec;

    fn network() -> Network {
        let link =
            |ers: bool| LinkParams::new(10.0, 500.0, 0.15, 4.0, ers.then_some(30.0)).unwrap();
        Network::new(link(true), link(false)).unwrap()
    }

    fn prefs() -> Preferences {
        Preferences::new(50.0, 100.0).unwrap()
    }

    #[test]
    fn lone_other_leaves_loaded_link() {
        let agents = vec![AgentState {
            agent_id: 0,
            class: VehicleClass::Other,
            soc: None,
            current_link: Link::Ers,
        }];
        let mut sim = Simulator::new(
            agents,
            network(),
            prefs(),
            TollSystem::Free,
            OrderPolicy::Sequential,
        )
        .unwrap();
        // t(1) on link 1 against t(0 + 1) on link 2: identical, so it stays
        assert_eq!(sim.step().switches, 0);

        // with a second vehicle already on link 1 the lone mover gains
        let agents = vec![
            AgentState {
                agent_id: 0,
                class: VehicleClass::Other,
                soc: None,
                current_link: Link::Ers,
            },
            AgentState {
                agent_id: 1,
                class: VehicleClass::Other,
                soc: None,
                current_link: Link::Ers,
            },
        ];
        let mut sim = Simulator::new(
            agents,
            network(),
            prefs(),
            TollSystem::Free,
            OrderPolicy::Sequential,
        )
        .unwrap();
        let r = sim.step();
        assert_eq!(r.switches, 1);
        assert_eq!(sim.ers_counts(), (0, 1));
        assert!(r.max_potential_rise < 0.0);
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let sc = Scenario::discrete(
            vec![0.2, 0.7],
            4,
            prefs(),
            TollSystem::Fixed(100.0),
            network(),
        )
        .unwrap();
        let mut sim = Simulator::for_scenario(
            &sc,
            InitialAssignment::AllOn(Link::Plain),
            OrderPolicy::SeededRandom { seed: 9 },
        )
        .unwrap();
        let traj = sim.run(100).unwrap();
        assert!(traj.converged);
        assert_eq!(traj.snapshots.last().unwrap().switches, 0);
        assert_eq!(sim.step().switches, 0);
    }

    #[test]
    fn rejects_bad_agents() {
        let agents = vec![AgentState {
            agent_id: 0,
            class: VehicleClass::Dwpt,
            soc: None,
            current_link: Link::Ers,
        }];
        assert!(Simulator::new(
            agents,
            network(),
            prefs(),
            TollSystem::Free,
            OrderPolicy::Sequential
        )
        .is_err());
    }

    #[test]
    fn flows_initialisation_orders_by_soc() {
        let sc = Scenario::discrete(vec![0.9, 0.1, 0.5], 2, prefs(), TollSystem::Free, network())
            .unwrap();
        let agents =
            agents_from_scenario(&sc, InitialAssignment::Flows { x1_d: 1, x1_o: 1 }).unwrap();
        let on1: Vec<_> = agents
            .iter()
            .filter(|a| a.current_link == Link::Ers)
            .collect();
        assert_eq!(on1.len(), 2);
        assert_eq!(on1[0].soc, Some(0.1));
        assert!(agents_from_scenario(&sc, InitialAssignment::Flows { x1_d: 4, x1_o: 0 }).is_err());
    }

    #[test]
    fn runs_are_reproducible() {
        let socs: Vec<f64> = (0..30).map(|k| 0.05 + 0.03 * k as f64).collect();
        let sc = Scenario::discrete(socs, 20, prefs(), TollSystem::Free, network()).unwrap();
        let run = || {
            let mut sim = Simulator::for_scenario(
                &sc,
                InitialAssignment::Random { seed: 4 },
                OrderPolicy::SeededRandom { seed: 11 },
            )
            .unwrap();
            sim.run(1000).unwrap()
        };
        assert_eq!(run(), run());
        assert_eq!(run().seed, Some(11));
    }

    #[test]
    fn zero_rounds_is_usage_error() {
        let sc = Scenario::discrete(vec![0.3], 1, prefs(), TollSystem::Free, network()).unwrap();
        let mut sim = Simulator::for_scenario(
            &sc,
            InitialAssignment::AllOn(Link::Ers),
            OrderPolicy::Sequential,
        )
        .unwrap();
        assert!(sim.run(0).is_err());
    }
}
