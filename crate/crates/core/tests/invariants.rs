//! Property tests for the structural invariants: schedule shape, involution,
//! interpolation endpoints, clamp geometry, wave-function normalization,
//! config round-trips, celerity monotonicity, and bitwise determinism of a
//! cycle under different worker-pool sizes.

use nalgebra::DVector;
use proptest::prelude::*;

use hamilton_randers::concentration::{empirical_concentration, TailBound};
use hamilton_randers::constants::PhysicalConstants;
use hamilton_randers::dynamics::apparent_celerity;
use hamilton_randers::dynamics::KinematicLimits;
use hamilton_randers::ensemble::{
    assemble_wavefunction, run_cycle, CycleConfig, DensityField, GridSpec, MoleculeEnsemble,
    PhaseModel,
};
use hamilton_randers::experiments::RunConfig;
use hamilton_randers::flow::{t_inversion, ut_deform_value, KappaProfile, KappaSchedule};
use hamilton_randers::geometry::{BetaField, PhasePoint};
use hamilton_randers::lipschitz::{newton_alpha, BoxDomain};

fn profiles() -> impl Strategy<Value = KappaProfile> {
    prop_oneof![
        Just(KappaProfile::Smoothstep),
        Just(KappaProfile::Linear),
        Just(KappaProfile::Cosine),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn kappa_is_a_monotone_bridge_from_0_to_1(
        tt in 0.1f64..10.0,
        profile in profiles(),
        f1 in 0.0f64..=1.0,
        f2 in 0.0f64..=1.0,
    ) {
        let sched = KappaSchedule::new(tt, profile).unwrap();
        prop_assert_eq!(sched.kappa(0.0).unwrap(), 0.0);
        prop_assert_eq!(sched.kappa(tt).unwrap(), 1.0);
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let k_lo = sched.kappa(lo * tt).unwrap();
        let k_hi = sched.kappa(hi * tt).unwrap();
        prop_assert!((0.0..=1.0).contains(&k_lo));
        prop_assert!((0.0..=1.0).contains(&k_hi));
        prop_assert!(k_lo <= k_hi + 1e-15, "kappa not monotone: {} > {}", k_lo, k_hi);
    }

    #[test]
    fn time_inversion_is_an_involution(
        d in 1usize..4,
        n in 1usize..3,
        raw in prop::collection::vec(-5.0f64..5.0, 48),
    ) {
        let dim = 2 * d * n;
        let u = DVector::from_fn(dim, |k, _| raw[k]);
        let p = DVector::from_fn(dim, |k, _| raw[k + dim]);
        let pt = PhasePoint::new(u, p).unwrap();
        let twice = t_inversion(&t_inversion(&pt, d, n).unwrap(), d, n).unwrap();
        prop_assert_eq!(twice.u, pt.u);
        prop_assert_eq!(twice.p, pt.p);
    }

    #[test]
    fn deform_blend_stays_between_its_endpoints(
        g in -100.0f64..100.0,
        h in -100.0f64..100.0,
        kappa in 0.0f64..=1.0,
    ) {
        // Exact endpoint reproduction: the blend coefficient vanishes, and
        // adding 0.0 never changes the other term's bits.
        prop_assert_eq!(ut_deform_value(g, h, 0.0), g.abs().sqrt());
        prop_assert_eq!(ut_deform_value(g, h, 1.0), h.abs().sqrt());
        let v = ut_deform_value(g, h, kappa);
        let (lo, hi) = (g.abs().min(h.abs()).sqrt(), g.abs().max(h.abs()).sqrt());
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "blend {} outside [{}, {}]", v, lo, hi);
    }

    #[test]
    fn box_clamp_is_idempotent_and_nonexpansive(
        half in prop::collection::vec(0.1f64..3.0, 4),
        a in prop::collection::vec(-10.0f64..10.0, 4),
        b in prop::collection::vec(-10.0f64..10.0, 4),
    ) {
        let k = BoxDomain::centered(&half).unwrap();
        let x = DVector::from_vec(a);
        let y = DVector::from_vec(b);
        let cx = k.clamp(&x);
        let cy = k.clamp(&y);
        prop_assert_eq!(k.clamp(&cx), cx.clone());
        for i in 0..4 {
            prop_assert!((cx[i] - cy[i]).abs() <= (x[i] - y[i]).abs() + 1e-15);
        }
        prop_assert_eq!(k.distance(&cx), 0.0);
    }

    #[test]
    fn assembled_wavefunctions_are_normalized(
        spacing in 0.05f64..2.0,
        cells in prop::collection::vec(0.0f64..40.0, 16..64),
        theta in -3.0f64..3.0,
    ) {
        prop_assume!(cells.iter().sum::<f64>() > 0.0);
        let len = cells.len();
        let grid = GridSpec::new(vec![0.0], spacing, vec![len]).unwrap();
        let n2 = DensityField::from_values(grid, cells).unwrap();
        let psi = assemble_wavefunction(&n2, &PhaseModel::Constant { value: theta }).unwrap();
        prop_assert!((psi.norm_sq() - 1.0).abs() < 1e-12, "norm^2 = {}", psi.norm_sq());
    }

    #[test]
    fn config_toml_round_trip_is_stable(
        seed in any::<u64>(),
        n in 1usize..5000,
        tt in 0.25f64..4.0,
    ) {
        let text = format!(
            "scenario = \"collapse\"\n\n[geometry]\nd = 2\nn_molecules = {n}\n\n\
             [flow]\nsemi_period = {tt}\n\n[dynamics]\ndt = 0.0625\n\n\
             [ensemble]\nseed = {seed}\nsigma0 = 0.5\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        let once = cfg.to_toml().unwrap();
        let back = RunConfig::parse(&once).unwrap();
        prop_assert_eq!(back.seed().unwrap(), seed);
        prop_assert_eq!(back.to_toml().unwrap(), once);
    }

    #[test]
    fn apparent_celerity_grows_with_acceleration(
        v in 0.0f64..0.99,
        a1 in 0.0f64..0.999,
        a2 in 0.0f64..0.999,
    ) {
        let limits = KinematicLimits::new(1.0, 1e-3).unwrap();
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let v_lo = apparent_celerity(v, lo * limits.a_max, &limits).unwrap();
        let v_hi = apparent_celerity(v, hi * limits.a_max, &limits).unwrap();
        prop_assert!(v_lo >= v * (1.0 - 1e-12), "celerity below coordinate speed");
        prop_assert!(v_hi >= v_lo * (1.0 - 1e-12), "celerity not monotone in acceleration");
    }

    #[test]
    fn empirical_tails_are_monotone_fractions(
        values in prop::collection::vec(-4.0f64..4.0, 64..256),
        rho1 in 0.05f64..1.0,
        step in 0.05f64..1.0,
    ) {
        let grid = [rho1, rho1 + step];
        let report = empirical_concentration(
            &values,
            &grid,
            &TailBound::Gaussian { rho_p: 1.0 },
        ).unwrap();
        for frac in report.deviation_fraction.iter().chain(&report.alpha_empirical) {
            prop_assert!((0.0..=1.0).contains(frac));
        }
        prop_assert!(report.deviation_fraction[1] <= report.deviation_fraction[0] + 1e-15);
        for (two_sided, one_sided) in report.deviation_fraction.iter().zip(&report.alpha_empirical) {
            prop_assert!(one_sided <= two_sided);
        }
    }

    #[test]
    fn interaction_coefficient_matches_its_compact_form(
        log_m in -20.0f64..3.0,
        log_r in -10.0f64..2.0,
        lambda in 0.2f64..5.0,
    ) {
        let constants = PhysicalConstants::si();
        let m = 10f64.powf(log_m);
        let r = 10f64.powf(log_r);
        let na = newton_alpha(m, m, r, lambda, &constants).unwrap();
        let mp = constants.planck_mass();
        let lp = constants.planck_length();
        let expected = (1.0 + lambda) / (lambda * lambda * lambda)
            * ((m / (r * r * r)) / (mp / (lp * lp * lp)))
            * (m / mp);
        prop_assert!(na.alpha > 0.0 && na.general_form > 0.0);
        prop_assert!(
            (na.alpha - expected).abs() <= 1e-9 * expected.abs(),
            "alpha {} vs compact form {}",
            na.alpha,
            expected
        );
    }
}

/// One fundamental cycle, run twice from the same seed in pools of different
/// sizes: every final molecule state must agree bit for bit.
#[test]
fn cycle_evolution_ignores_worker_pool_size() {
    let run_in = |threads: usize| -> MoleculeEnsemble {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut e =
                MoleculeEnsemble::gaussian_cloud(60, 2, &[0.0, 0.0], 0.5, 1.0, 60.0, 1.0, 77)
                    .unwrap();
            let sched = KappaSchedule::smoothstep(1.0).unwrap();
            let mut cfg = CycleConfig::defaults(sched, BetaField::zero(4));
            cfg.steps = 16;
            run_cycle(&mut e, &cfg, 0).unwrap();
            e
        })
    };
    let single = run_in(1);
    let pooled = run_in(3);
    for (a, b) in single.states.iter().zip(&pooled.states) {
        assert_eq!(a.u, b.u);
        assert_eq!(a.p, b.p);
    }
}
