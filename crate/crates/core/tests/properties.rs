use ers_core::analysis::{classify, is_conventional_so, is_ers_optimum, metrics, PatternLabel};
use ers_core::dynamics::{InitialAssignment, OrderPolicy, Simulator};
use ers_core::equilibrium::{solve, threshold_soc, verify};
use ers_core::model::{
    utility, Link, LinkParams, Network, Preferences, Scenario, SocDistribution, TollSystem,
    VehicleClass,
};
use proptest::prelude::*;

fn table1_network() -> Network {
    Network::new(
        LinkParams::new(10.0, 500.0, 0.15, 4.0, Some(30.0)).unwrap(),
        LinkParams::new(10.0, 500.0, 0.15, 4.0, None).unwrap(),
    )
    .unwrap()
}

fn uniform(
    r: f64,
    s_lo: f64,
    s_hi: f64,
    vot: f64,
    voe: f64,
    price: f64,
    network: Network,
) -> Scenario {
    let n = 1000.0;
    Scenario::new(
        n,
        r,
        SocDistribution::uniform(s_lo, s_hi, r * n).unwrap(),
        Preferences::new(vot, voe).unwrap(),
        TollSystem::fixed(price).unwrap(),
        network,
    )
    .unwrap()
}

prop_compose! {
    fn continuum()(
        r in 0.01f64..0.99,
        s_lo in 0.02f64..0.5,
        width in 0.01f64..0.48,
        vot in 10.0f64..100.0,
        voe in 10.0f64..300.0,
        price in 0.0f64..1500.0,
        t0_2 in 8.0f64..12.0,
        cap_2 in 300.0f64..700.0,
    ) -> Scenario {
        let network = Network::new(
            LinkParams::new(10.0, 500.0, 0.15, 4.0, Some(30.0)).unwrap(),
            LinkParams::new(t0_2, cap_2, 0.15, 4.0, None).unwrap(),
        )
        .unwrap();
        uniform(r, s_lo, s_lo + width, vot, voe, price, network)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn equilibrium_conditions_hold(sc in continuum()) {
        let (eq, _) = solve(&sc).unwrap();
        let n = sc.total_vehicles();
        prop_assert_eq!(verify(&sc, &eq, 1e-6, 1e-9, 1e-6 * n), Ok(()));
        prop_assert!((eq.x1() + eq.x2() - n).abs() <= 1e-6 * n);
        prop_assert!((eq.x1_d + eq.x2_d - sc.dwpt_mass()).abs() <= 1e-6 * n);
    }

    #[test]
    fn threshold_matches_indifference(sc in continuum()) {
        let (eq, _) = solve(&sc).unwrap();
        let p = sc.prefs();
        let price = sc.toll().price();
        let s = eq.s_thres;
        prop_assume!(s > 0.0 && s < 1.0);
        let on1 = utility(VehicleClass::Dwpt, Link::Ers, eq.t1, eq.t2, sc.toll(), p, Some(s)).unwrap();
        let on2 = utility(VehicleClass::Dwpt, Link::Plain, eq.t1, eq.t2, sc.toll(), p, Some(s)).unwrap();
        prop_assert!((on1 - on2).abs() <= 1e-6 * (1.0 + price + p.voe()), "{} vs {}", on1, on2);
    }

    #[test]
    fn minority_is_balanced(
        r in 0.01f64..0.4999,
        price in 0.0f64..1000.0,
        voe in 10.0f64..300.0,
    ) {
        let sc = uniform(r, 0.1, 0.9, 50.0, voe, price, table1_network());
        let (eq, _) = solve(&sc).unwrap();
        prop_assert!((eq.x1() - eq.x2()).abs() <= 1e-6);
        prop_assert!(is_conventional_so(&sc, &eq));
        let free = sc.with_toll(TollSystem::Free);
        let (eq, _) = solve(&free).unwrap();
        prop_assert!((eq.x1_d - free.dwpt_mass()).abs() <= 1e-6 * 1000.0);
        prop_assert!(is_ers_optimum(&free, &eq));
        prop_assert_eq!(classify(&free, &eq).unwrap(), PatternLabel::Ai);
    }

    #[test]
    fn threshold_monotone(
        vot in 10.0f64..100.0,
        voe in 10.0f64..300.0,
        c in 0.0f64..1000.0,
        dc in 0.01f64..100.0,
        dt in 0.0f64..5.0,
    ) {
        let p = Preferences::new(vot, voe).unwrap();
        let q = Preferences::new(vot, voe * 1.1).unwrap();
        prop_assert!(threshold_soc(&p, c + dc, dt, 0.0) < threshold_soc(&p, c, dt, 0.0));
        prop_assert!(threshold_soc(&q, c, dt, 0.0) > threshold_soc(&p, c, dt, 0.0));
    }

    #[test]
    fn count_below_monotone(
        mut socs in proptest::collection::vec(0.01f64..0.99, 1..50),
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let d = SocDistribution::discrete(socs.clone()).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(d.count_below(lo) <= d.count_below(hi));
        socs.sort_by(f64::total_cmp);
        let expected = socs.iter().filter(|&&s| s < hi).count() as f64;
        prop_assert_eq!(d.count_below(hi), expected);

        let u = SocDistribution::uniform(0.2, 0.7, 100.0).unwrap();
        prop_assert!(u.count_below(lo) <= u.count_below(hi));
    }

    #[test]
    fn utility_difference_identity(
        t1 in 0.0f64..60.0,
        t2 in 0.0f64..60.0,
        s in 0.01f64..0.99,
        price in 0.0f64..500.0,
        vot in 1.0f64..100.0,
        voe in 1.0f64..300.0,
    ) {
        let p = Preferences::new(vot, voe).unwrap();
        let toll = TollSystem::fixed(price).unwrap();
        let d1 = utility(VehicleClass::Dwpt, Link::Ers, t1, t2, toll, &p, Some(s)).unwrap();
        let d2 = utility(VehicleClass::Dwpt, Link::Plain, t1, t2, toll, &p, Some(s)).unwrap();
        let expected = voe * (1.0 / s - 1.0) - price - vot * (t1 - t2);
        prop_assert!((d1 - d2 - expected).abs() <= 1e-9 * (1.0 + expected.abs() + vot * 60.0));
        let o1 = utility(VehicleClass::Other, Link::Ers, t1, t2, toll, &p, None).unwrap();
        let o2 = utility(VehicleClass::Other, Link::Plain, t1, t2, toll, &p, None).unwrap();
        prop_assert!((o1 - o2 + vot * (t1 - t2)).abs() <= 1e-9 * (1.0 + vot * 60.0));
    }

    #[test]
    fn dynamics_never_raise_potential(
        n_dwpt in 1usize..60,
        n_other in 1usize..60,
        price in 0.0f64..300.0,
        voe in 10.0f64..300.0,
        seed in any::<u64>(),
    ) {
        let socs: Vec<f64> = (0..n_dwpt).map(|k| (k as f64 + 0.5) / n_dwpt as f64).collect();
        let sc = Scenario::discrete(
            socs,
            n_other,
            Preferences::new(50.0, voe).unwrap(),
            TollSystem::fixed(price).unwrap(),
            table1_network(),
        )
        .unwrap();
        let mut sim = Simulator::for_scenario(
            &sc,
            InitialAssignment::Random { seed },
            OrderPolicy::SeededRandom { seed },
        )
        .unwrap();
        let before = sim.potential();
        let traj = sim.run(1000).unwrap();
        prop_assert!(traj.converged);
        prop_assert!(traj.max_potential_rise <= 1e-9 * before.abs().max(1.0));
        for w in traj.snapshots.windows(2) {
            prop_assert!(w[1].potential <= w[0].potential + 1e-9 * before.abs().max(1.0));
            prop_assert_eq!(w[1].round, w[0].round + 1);
        }
        let last = traj.snapshots.last().unwrap();
        prop_assert_eq!(last.switches, 0);
        let (x1_d, x1_o) = sim.ers_counts();
        prop_assert_eq!((last.x1_d, last.x1_o), (x1_d, x1_o));
    }
}

#[test]
fn tcv_falls_with_price() {
    let mut last = f64::INFINITY;
    for k in 0..100 {
        let sc = uniform(
            0.3,
            0.1,
            0.9,
            50.0,
            100.0,
            10.0 * k as f64,
            table1_network(),
        );
        let (eq, _) = solve(&sc).unwrap();
        let tcv = metrics(&sc, &eq).unwrap().tcv;
        assert!(tcv <= last + 1e-9, "C={}: {tcv} > {last}", 10 * k);
        last = tcv;
    }
}

#[test]
fn dynamics_reach_solver_flows() {
    let sc = uniform(0.2, 0.1, 0.9, 50.0, 100.0, 100.0, table1_network())
        .discretized(200)
        .unwrap();
    let (eq, _) = solve(&sc).unwrap();
    let mut sim = Simulator::for_scenario(
        &sc,
        InitialAssignment::AllOn(Link::Plain),
        OrderPolicy::Sequential,
    )
    .unwrap();
    let traj = sim.run(1000).unwrap();
    assert!(traj.converged);
    let (x1_d, x1_o) = sim.ers_counts();
    assert!(
        (x1_d as f64 - eq.x1_d).abs() <= 1.0,
        "{x1_d} vs {}",
        eq.x1_d
    );
    assert!(
        (x1_o as f64 - eq.x1_o).abs() <= 1.0,
        "{x1_o} vs {}",
        eq.x1_o
    );
}
