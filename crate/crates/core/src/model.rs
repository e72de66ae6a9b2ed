//! Domain types, travel-time and utility functions.
//!
//! Utilities are expressed in money (JPY): every utility is the raw weighted
//! sum divided by the (positive) magnitude of the cost coefficient. Only the
//! value-of-time and value-of-electricity ratios survive that normalisation,
//! which is all the link choice depends on.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Minutes per hour, for converting ERS time to energy.
pub const MINUTES_PER_HOUR: f64 = 60.0;

/// One of the two parallel links between the single origin and destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// Link 1, fitted with an electric road system.
    Ers,
    /// Link 2, a plain road.
    Plain,
}

impl Link {
    pub fn other(self) -> Link {
        match self {
            Link::Ers => Link::Plain,
            Link::Plain => Link::Ers,
        }
    }

    /// 1 for the ERS link, 2 for the plain link.
    pub fn number(self) -> u8 {
        match self {
            Link::Ers => 1,
            Link::Plain => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VehicleClass {
    /// Electric vehicle with dynamic wireless power transfer.
    Dwpt,
    /// Any vehicle that cannot charge on the ERS.
    Other,
}

/// BPR parameters and ERS equipment of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    free_flow_time: f64,
    capacity: f64,
    bpr_alpha: f64,
    bpr_beta: f64,
    ers_power_kw: Option<f64>,
}

impl LinkParams {
    /// `ers_power_kw` is `Some(power)` for an ERS link.
    pub fn new(
        free_flow_time: f64,
        capacity: f64,
        bpr_alpha: f64,
        bpr_beta: f64,
        ers_power_kw: Option<f64>,
    ) -> Result<Self> {
        if !(free_flow_time > 0.0) || !free_flow_time.is_finite() {
            return Err(Error::Invalid {
                field: "free_flow_time",
                reason: "must be positive and finite",
            });
        }
        if !(capacity > 0.0) || !capacity.is_finite() {
            return Err(Error::Invalid {
                field: "capacity",
                reason: "must be positive and finite",
            });
        }
        if !(bpr_alpha >= 0.0) || !bpr_alpha.is_finite() {
            return Err(Error::Invalid {
                field: "bpr_alpha",
                reason: "must be non-negative and finite",
            });
        }
        if !(bpr_beta >= 1.0) || !bpr_beta.is_finite() {
            return Err(Error::Invalid {
                field: "bpr_beta",
                reason: "must be at least 1",
            });
        }
        if let Some(w) = ers_power_kw {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Invalid {
                    field: "ers_power_kw",
                    reason: "must be positive and finite",
                });
            }
        }
        Ok(LinkParams {
            free_flow_time,
            capacity,
            bpr_alpha,
            bpr_beta,
            ers_power_kw,
        })
    }

    pub fn free_flow_time(&self) -> f64 {
        self.free_flow_time
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn bpr_alpha(&self) -> f64 {
        self.bpr_alpha
    }

    pub fn bpr_beta(&self) -> f64 {
        self.bpr_beta
    }

    pub fn has_ers(&self) -> bool {
        self.ers_power_kw.is_some()
    }

    /// ERS output in kW; zero on a plain link.
    pub fn ers_power_kw(&self) -> f64 {
        self.ers_power_kw.unwrap_or(0.0)
    }

    /// BPR travel time in minutes, `t0 * (1 + alpha * (flow / capacity)^beta)`.
    pub fn travel_time(&self, flow: f64) -> Result<f64> {
        if !(flow >= 0.0) || !flow.is_finite() {
            return Err(Error::Domain {
                what: "link flow",
                value: flow,
            });
        }
        Ok(self.time_unchecked(flow))
    }

    #[inline]
    pub(crate) fn time_unchecked(&self, flow: f64) -> f64 {
        let ratio = flow / self.capacity;
        self.free_flow_time * (1.0 + self.bpr_alpha * libm::pow(ratio, self.bpr_beta))
    }
}

/// Free function form of [`LinkParams::travel_time`].
pub fn bpr_time(link: &LinkParams, flow: f64) -> Result<f64> {
    link.travel_time(flow)
}

/// Two parallel links from R to S. Link 1 carries the ERS, link 2 does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Network {
    link1: LinkParams,
    link2: LinkParams,
}

impl Network {
    pub fn new(link1: LinkParams, link2: LinkParams) -> Result<Self> {
        if !link1.has_ers() {
            return Err(Error::Invalid {
                field: "link1",
                reason: "the first link must carry the ERS",
            });
        }
        if link2.has_ers() {
            return Err(Error::Invalid {
                field: "link2",
                reason: "the second link must not carry an ERS",
            });
        }
        Ok(Network { link1, link2 })
    }

    pub fn link1(&self) -> &LinkParams {
        &self.link1
    }

    pub fn link2(&self) -> &LinkParams {
        &self.link2
    }

    pub fn link(&self, link: Link) -> &LinkParams {
        match link {
            Link::Ers => &self.link1,
            Link::Plain => &self.link2,
        }
    }

    /// Both links have identical travel-time functions.
    pub fn is_symmetric(&self) -> bool {
        self.link1.free_flow_time == self.link2.free_flow_time
            && self.link1.capacity == self.link2.capacity
            && self.link1.bpr_alpha == self.link2.bpr_alpha
            && self.link1.bpr_beta == self.link2.bpr_beta
    }

    /// Travel times `(t1, t2)` for link flows `(x1, x2)`.
    pub fn times(&self, x1: f64, x2: f64) -> Result<(f64, f64)> {
        Ok((self.link1.travel_time(x1)?, self.link2.travel_time(x2)?))
    }
}

/// Money-metric preferences: value of time (JPY/min) and value of
/// electricity (JPY per unit of charging utility).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preferences {
    vot: f64,
    voe: f64,
}

impl Preferences {
    pub fn new(vot: f64, voe: f64) -> Result<Self> {
        if !(vot > 0.0) || !vot.is_finite() {
            return Err(Error::Invalid {
                field: "vot",
                reason: "must be positive and finite",
            });
        }
        if !(voe > 0.0) || !voe.is_finite() {
            return Err(Error::Invalid {
                field: "voe",
                reason: "must be positive and finite",
            });
        }
        Ok(Preferences { vot, voe })
    }

    pub fn vot(&self) -> f64 {
        self.vot
    }

    pub fn voe(&self) -> f64 {
        self.voe
    }
}

/// Pricing of the ERS link. Only DWPT-EVs on link 1 pay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TollSystem {
    Free,
    Fixed(f64),
}

impl TollSystem {
    pub fn fixed(price: f64) -> Result<Self> {
        if !(price >= 0.0) || !price.is_finite() {
            return Err(Error::Invalid {
                field: "toll.price",
                reason: "must be non-negative and finite",
            });
        }
        Ok(TollSystem::Fixed(price))
    }

    /// Price paid by a DWPT-EV on the ERS link; zero when free.
    pub fn price(&self) -> f64 {
        match *self {
            TollSystem::Free => 0.0,
            TollSystem::Fixed(c) => c,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, TollSystem::Free)
    }
}

/// `1/s - 1`, the charging utility of a DWPT-EV with state of charge `s`.
pub fn charging_utility(soc: f64) -> Result<f64> {
    if !(soc > 0.0 && soc < 1.0) {
        return Err(Error::Domain {
            what: "state of charge",
            value: soc,
        });
    }
    Ok(1.0 / soc - 1.0)
}

/// Money-metric utility of choosing `link` at travel times `(t1, t2)`.
///
/// `soc` must be given for DWPT-EVs and omitted for other vehicles.
pub fn utility(
    class: VehicleClass,
    link: Link,
    t1: f64,
    t2: f64,
    toll: TollSystem,
    prefs: &Preferences,
    soc: Option<f64>,
) -> Result<f64> {
    if !(t1 >= 0.0) || !(t2 >= 0.0) {
        return Err(Error::Domain {
            what: "travel time",
            value: if t1 >= 0.0 { t2 } else { t1 },
        });
    }
    match (class, soc) {
        (VehicleClass::Dwpt, None) => {
            Err(Error::Usage("a DWPT-EV utility needs a state of charge"))
        }
        (VehicleClass::Other, Some(_)) => Err(Error::Usage(
            "vehicles without DWPT carry no state of charge",
        )),
        (VehicleClass::Dwpt, Some(s)) => {
            let charge = charging_utility(s)?;
            Ok(match link {
                Link::Ers => -prefs.vot * t1 - toll.price() + prefs.voe * charge,
                Link::Plain => -prefs.vot * t2,
            })
        }
        (VehicleClass::Other, None) => Ok(match link {
            Link::Ers => -prefs.vot * t1,
            Link::Plain => -prefs.vot * t2,
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum SocRepr {
    /// Sorted ascending.
    Discrete(Vec<f64>),
    Uniform {
        lo: f64,
        hi: f64,
        mass: f64,
    },
}

/// Borrowed view of a [`SocDistribution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SocKind<'a> {
    DiscreteAgents(&'a [f64]),
    UniformContinuum { s_lo: f64, s_hi: f64, mass: f64 },
}

/// State-of-charge population of the DWPT-EV fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct SocDistribution(SocRepr);

impl SocDistribution {
    /// One agent per value. Values are sorted internally.
    pub fn discrete(mut soc_values: Vec<f64>) -> Result<Self> {
        if soc_values.is_empty() {
            return Err(Error::Invalid {
                field: "soc.values",
                reason: "at least one agent is required",
            });
        }
        if soc_values.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
            return Err(Error::Invalid {
                field: "soc.values",
                reason: "every state of charge must lie strictly between 0 and 1",
            });
        }
        soc_values.sort_by(f64::total_cmp);
        Ok(SocDistribution(SocRepr::Discrete(soc_values)))
    }

    /// `mass` vehicles spread uniformly over `[s_lo, s_hi]`.
    pub fn uniform(s_lo: f64, s_hi: f64, mass: f64) -> Result<Self> {
        if !(s_lo > 0.0 && s_lo < 1.0) {
            return Err(Error::Invalid {
                field: "soc.s_lo",
                reason: "must lie strictly between 0 and 1",
            });
        }
        if !(s_hi > 0.0 && s_hi < 1.0) {
            return Err(Error::Invalid {
                field: "soc.s_hi",
                reason: "must lie strictly between 0 and 1",
            });
        }
        if !(s_lo < s_hi) {
            return Err(Error::Invalid {
                field: "soc.s_hi",
                reason: "must exceed soc.s_lo",
            });
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Invalid {
                field: "soc.mass",
                reason: "must be positive and finite",
            });
        }
        Ok(SocDistribution(SocRepr::Uniform {
            lo: s_lo,
            hi: s_hi,
            mass,
        }))
    }

    pub fn kind(&self) -> SocKind<'_> {
        match &self.0 {
            SocRepr::Discrete(v) => SocKind::DiscreteAgents(v),
            SocRepr::Uniform { lo, hi, mass } => SocKind::UniformContinuum {
                s_lo: *lo,
                s_hi: *hi,
                mass: *mass,
            },
        }
    }

    /// Sorted agent SoC values, if the population is discrete.
    pub fn agents(&self) -> Option<&[f64]> {
        match &self.0 {
            SocRepr::Discrete(v) => Some(v),
            SocRepr::Uniform { .. } => None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        match &self.0 {
            SocRepr::Discrete(v) => v.len() as f64,
            SocRepr::Uniform { mass, .. } => *mass,
        }
    }

    pub fn min(&self) -> f64 {
        match &self.0 {
            SocRepr::Discrete(v) => v[0],
            SocRepr::Uniform { lo, .. } => *lo,
        }
    }

    pub fn max(&self) -> f64 {
        match &self.0 {
            SocRepr::Discrete(v) => v[v.len() - 1],
            SocRepr::Uniform { hi, .. } => *hi,
        }
    }

    /// Mass of vehicles whose SoC is strictly below `s`.
    pub fn count_below(&self, s: f64) -> f64 {
        match &self.0 {
            SocRepr::Discrete(v) => v.partition_point(|&x| x < s) as f64,
            SocRepr::Uniform { lo, hi, mass } => {
                let frac = (s - lo) / (hi - lo);
                mass * frac.clamp(0.0, 1.0)
            }
        }
    }

    /// Smallest SoC `s` such that the mass at or below `s` reaches `m`.
    /// Inverse of [`count_below`](Self::count_below) on the continuum.
    pub fn quantile(&self, m: f64) -> f64 {
        match &self.0 {
            SocRepr::Discrete(v) => {
                if m <= 0.0 {
                    return v[0];
                }
                let idx = (libm::ceil(m) as usize).clamp(1, v.len()) - 1;
                v[idx]
            }
            SocRepr::Uniform { lo, hi, mass } => lo + (hi - lo) * (m / mass).clamp(0.0, 1.0),
        }
    }

    /// Replace the population by `count` agents. A continuum is sampled at
    /// cell midpoints; a discrete population is returned unchanged when
    /// `count` matches its size.
    pub fn discretize(&self, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Usage("cannot discretize into zero agents"));
        }
        match &self.0 {
            SocRepr::Discrete(v) if v.len() == count => Ok(self.clone()),
            SocRepr::Discrete(_) => Err(Error::Usage(
                "a discrete population can only be kept at its own size",
            )),
            SocRepr::Uniform { lo, hi, .. } => {
                let width = (hi - lo) / count as f64;
                let values = (0..count).map(|k| lo + (k as f64 + 0.5) * width).collect();
                SocDistribution::discrete(values)
            }
        }
    }
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    total_vehicles: f64,
    dwpt_ratio: f64,
    soc: SocDistribution,
    prefs: Preferences,
    toll: TollSystem,
    network: Network,
}

impl Scenario {
    pub fn new(
        total_vehicles: f64,
        dwpt_ratio: f64,
        soc: SocDistribution,
        prefs: Preferences,
        toll: TollSystem,
        network: Network,
    ) -> Result<Self> {
        if !(total_vehicles > 0.0) || !total_vehicles.is_finite() {
            return Err(Error::Invalid {
                field: "total_vehicles",
                reason: "must be positive and finite",
            });
        }
        if !(dwpt_ratio > 0.0 && dwpt_ratio < 1.0) {
            return Err(Error::Invalid {
                field: "dwpt_ratio",
                reason: "must lie strictly between 0 and 1",
            });
        }
        let fleet = dwpt_ratio * total_vehicles;
        if (soc.total_mass() - fleet).abs() > 1e-9 * fleet {
            return Err(Error::Invalid {
                field: "soc",
                reason: "population mass must equal dwpt_ratio * total_vehicles",
            });
        }
        Ok(Scenario {
            total_vehicles,
            dwpt_ratio,
            soc,
            prefs,
            toll,
            network,
        })
    }

    /// Integer population: `soc_values.len()` DWPT-EVs plus `n_other` others.
    pub fn discrete(
        soc_values: Vec<f64>,
        n_other: usize,
        prefs: Preferences,
        toll: TollSystem,
        network: Network,
    ) -> Result<Self> {
        let n_dwpt = soc_values.len();
        let total = (n_dwpt + n_other) as f64;
        let soc = SocDistribution::discrete(soc_values)?;
        Scenario::new(total, n_dwpt as f64 / total, soc, prefs, toll, network)
    }

    pub fn total_vehicles(&self) -> f64 {
        self.total_vehicles
    }

    pub fn dwpt_ratio(&self) -> f64 {
        self.dwpt_ratio
    }

    /// DWPT-EV mass, `r * N`.
    pub fn dwpt_mass(&self) -> f64 {
        self.soc.total_mass()
    }

    /// Mass of all other vehicles, `(1 - r) * N`.
    pub fn other_mass(&self) -> f64 {
        self.total_vehicles - self.dwpt_mass()
    }

    pub fn soc(&self) -> &SocDistribution {
        &self.soc
    }

    pub fn prefs(&self) -> &Preferences {
        &self.prefs
    }

    pub fn toll(&self) -> TollSystem {
        self.toll
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn with_toll(&self, toll: TollSystem) -> Scenario {
        Scenario {
            toll,
            ..self.clone()
        }
    }

    pub fn with_prefs(&self, prefs: Preferences) -> Scenario {
        Scenario {
            prefs,
            ..self.clone()
        }
    }

    /// Same scenario with the DWPT population replaced by `count` agents.
    /// Total vehicles are unchanged unless `count` differs from `r * N`, in
    /// which case the ratio is recomputed against the rounded other-vehicle
    /// count.
    pub fn discretized(&self, count: usize) -> Result<Scenario> {
        let n_other = libm::round(self.other_mass());
        let soc = self.soc.discretize(count)?;
        let total = count as f64 + n_other;
        Scenario::new(
            total,
            count as f64 / total,
            soc,
            self.prefs,
            self.toll,
            self.network,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn table1_link(ers: bool) -> LinkParams {
        LinkParams::new(10.0, 500.0, 0.15, 4.0, ers.then_some(30.0)).unwrap()
    }

    fn prefs() -> Preferences {
        Preferences::new(50.0, 100.0).unwrap()
    }

    #[test]
    fn bpr_examples() {
        let link = table1_link(true);
        assert_eq!(bpr_time(&link, 0.0).unwrap(), 10.0);
        assert!((bpr_time(&link, 500.0).unwrap() - 11.5).abs() < 1e-12);
        assert!((bpr_time(&link, 1000.0).unwrap() - 34.0).abs() < 1e-12);
    }

    #[test]
    fn bpr_rejects_negative_flow() {
        let link = table1_link(false);
        assert!(matches!(
            link.travel_time(-1.0),
            Err(Error::Domain {
                what: "link flow",
                ..
            })
        ));
        assert!(link.travel_time(f64::NAN).is_err());
    }

    #[test]
    fn link_validation() {
        assert!(LinkParams::new(0.0, 500.0, 0.15, 4.0, None).is_err());
        assert!(LinkParams::new(10.0, 0.0, 0.15, 4.0, None).is_err());
        assert!(LinkParams::new(10.0, 500.0, -0.1, 4.0, None).is_err());
        assert!(LinkParams::new(10.0, 500.0, 0.15, 0.5, None).is_err());
        assert!(LinkParams::new(10.0, 500.0, 0.15, 4.0, Some(0.0)).is_err());
        assert!(Network::new(table1_link(false), table1_link(false)).is_err());
        assert!(Network::new(table1_link(true), table1_link(true)).is_err());
        assert!(Network::new(table1_link(true), table1_link(false))
            .unwrap()
            .is_symmetric());
    }

    #[test]
    fn charging_utility_examples() {
        assert_eq!(charging_utility(0.5).unwrap(), 1.0);
        assert!((charging_utility(0.1).unwrap() - 9.0).abs() < 1e-12);
        assert!((charging_utility(0.9).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(charging_utility(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn utility_examples() {
        let p = prefs();
        let toll = TollSystem::fixed(100.0).unwrap();
        let u1 = utility(
            VehicleClass::Dwpt,
            Link::Ers,
            11.5,
            11.5,
            toll,
            &p,
            Some(0.5),
        )
        .unwrap();
        let u2 = utility(
            VehicleClass::Dwpt,
            Link::Plain,
            11.5,
            11.5,
            toll,
            &p,
            Some(0.5),
        )
        .unwrap();
        assert!((u1 + 575.0).abs() < 1e-9);
        assert!((u2 + 575.0).abs() < 1e-9);

        let o1 = utility(VehicleClass::Other, Link::Ers, 12.0, 12.0, toll, &p, None).unwrap();
        let o2 = utility(VehicleClass::Other, Link::Plain, 12.0, 12.0, toll, &p, None).unwrap();
        assert_eq!(o1, o2);

        let free = TollSystem::Free;
        for s in [0.1, 0.37, 0.9] {
            let d1 = utility(VehicleClass::Dwpt, Link::Ers, 11.0, 11.0, free, &p, Some(s)).unwrap();
            let d2 = utility(
                VehicleClass::Dwpt,
                Link::Plain,
                11.0,
                11.0,
                free,
                &p,
                Some(s),
            )
            .unwrap();
            assert!((d1 - d2 - 100.0 * (1.0 / s - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn utility_usage_errors() {
        let p = prefs();
        let t = TollSystem::Free;
        assert!(matches!(
            utility(VehicleClass::Dwpt, Link::Ers, 1.0, 1.0, t, &p, None),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            utility(VehicleClass::Other, Link::Ers, 1.0, 1.0, t, &p, Some(0.3)),
            Err(Error::Usage(_))
        ));
        assert!(utility(VehicleClass::Other, Link::Ers, -1.0, 1.0, t, &p, None).is_err());
    }

    #[test]
    fn count_below_examples() {
        let u = SocDistribution::uniform(0.1, 0.9, 200.0).unwrap();
        assert!((u.count_below(0.5) - 100.0).abs() < 1e-9);
        assert_eq!(u.count_below(0.05), 0.0);
        assert!((u.count_below(2.0 / 3.0) - 141.666_666_666).abs() < 1e-6);
        assert_eq!(u.count_below(0.1), 0.0);
        assert_eq!(u.count_below(1.0), 200.0);

        let d = SocDistribution::discrete(vec![0.5, 0.2, 0.2, 0.8]).unwrap();
        assert_eq!(d.count_below(0.2), 0.0);
        assert_eq!(d.count_below(0.21), 2.0);
        assert_eq!(d.count_below(0.5), 2.0);
        assert_eq!(d.count_below(1.0), 4.0);
        assert_eq!(d.min(), 0.2);
        assert_eq!(d.max(), 0.8);
    }

    #[test]
    fn quantile_inverts_count_below() {
        let u = SocDistribution::uniform(0.1, 0.9, 200.0).unwrap();
        assert!((u.quantile(100.0) - 0.5).abs() < 1e-12);
        let d = SocDistribution::discrete(vec![0.1, 0.3, 0.6]).unwrap();
        assert_eq!(d.quantile(0.0), 0.1);
        assert_eq!(d.quantile(1.0), 0.1);
        assert_eq!(d.quantile(1.5), 0.3);
        assert_eq!(d.quantile(3.0), 0.6);
    }

    #[test]
    fn soc_validation() {
        assert!(SocDistribution::uniform(0.5, 0.5, 10.0).is_err());
        assert!(SocDistribution::uniform(0.0, 0.5, 10.0).is_err());
        assert!(SocDistribution::uniform(0.1, 1.0, 10.0).is_err());
        assert!(SocDistribution::uniform(0.1, 0.5, 0.0).is_err());
        assert!(SocDistribution::discrete(vec![]).is_err());
        assert!(SocDistribution::discrete(vec![0.3, 1.0]).is_err());
    }

    #[test]
    fn discretize_uses_midpoints() {
        let u = SocDistribution::uniform(0.1, 0.9, 200.0).unwrap();
        let d = u.discretize(200).unwrap();
        let v = d.agents().unwrap();
        assert_eq!(v.len(), 200);
        assert!((v[0] - 0.102).abs() < 1e-12);
        assert_eq!(d.count_below(0.5), 100.0);
    }

    #[test]
    fn scenario_validation() {
        let net = Network::new(table1_link(true), table1_link(false)).unwrap();
        let soc = SocDistribution::uniform(0.1, 0.9, 200.0).unwrap();
        let toll = TollSystem::Free;
        assert!(Scenario::new(1000.0, 0.2, soc.clone(), prefs(), toll, net).is_ok());
        assert!(matches!(
            Scenario::new(1000.0, 1.2, soc.clone(), prefs(), toll, net),
            Err(Error::Invalid {
                field: "dwpt_ratio",
                ..
            })
        ));
        assert!(Scenario::new(1000.0, 0.3, soc.clone(), prefs(), toll, net).is_err());
        assert!(Scenario::new(0.0, 0.2, soc, prefs(), toll, net).is_err());
        assert!(TollSystem::fixed(-1.0).is_err());
        assert!(Preferences::new(0.0, 1.0).is_err());
        assert!(Preferences::new(1.0, -1.0).is_err());

        let d = Scenario::discrete(vec![0.2, 0.4], 3, prefs(), toll, net).unwrap();
        assert_eq!(d.total_vehicles(), 5.0);
        assert!((d.other_mass() - 3.0).abs() < 1e-12);
    }
}
