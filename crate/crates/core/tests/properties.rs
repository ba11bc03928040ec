//! Property tests across modules.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rindler_gauss::channel::{assemble_vacuum_sigma, AccelerationConfig, ChannelElements};
use rindler_gauss::entanglement::{
    bound_from_nu, gamma_plus_minus, nu_pair, template_bound, Bipartition,
};
use rindler_gauss::gaussian::{physicality_check, CovarianceMatrix};
use rindler_gauss::modes::{inner_product, Species, SpinorMode, Wedge};
use rindler_gauss::oracle::{random_channel, random_covariance};
use rindler_gauss::special::{bessel_mod_second, gamma, QuadratureSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn channels_keep_states_physical(seed in any::<u64>(), modes in 1usize..=4, pure in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_covariance(modes, pure, &mut rng);
        let out = random_channel(modes, &mut rng).apply(&sigma).unwrap();
        prop_assert!(out.antisymmetry_defect() == 0.0);
        prop_assert!(physicality_check(&out, 1e-10).physical);
    }

    #[test]
    fn text_round_trip_is_exact(seed in any::<u64>(), modes in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_covariance(modes, false, &mut rng);
        let mut text = Vec::new();
        sigma.write_text(&mut text).unwrap();
        let back = CovarianceMatrix::read_text(text.as_slice()).unwrap();
        prop_assert_eq!(back, sigma);
    }

    #[test]
    fn gamma_recurrence(re in -4.5f64..6.0, im in -8.0f64..8.0) {
        let z = Complex64::new(re, im);
        prop_assume!(z.norm() > 1e-3 && (z + 1.0).norm() > 1e-3);
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm(), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn bessel_k_is_even_in_order(re in -1.5f64..1.5, im in -10.0f64..10.0, x in 0.01f64..20.0) {
        let nu = Complex64::new(re, im);
        prop_assume!(nu.norm() > 1e-6);
        let plus = bessel_mod_second(nu, x).unwrap();
        let minus = bessel_mod_second(-nu, x).unwrap();
        prop_assert!((plus - minus).norm() <= 1e-10 * plus.norm());
    }

    #[test]
    fn closed_form_bound_matches_generic(
        deficit_a in 1e-4f64..0.5,
        deficit_b in 1e-4f64..0.5,
        phase in -3.1f64..3.1,
        fraction in 0.0f64..0.95,
    ) {
        // Keep |X| inside the physical region for the 2x2 template.
        let limit = ((1.0 - deficit_a) * (1.0 - deficit_b)).min(deficit_a * deficit_b).sqrt();
        let cross = Complex64::from_polar(fraction * limit, phase);
        let el = ChannelElements::thermal(deficit_a, deficit_b, cross);
        let sigma = assemble_vacuum_sigma(&el);
        let generic = bound_from_nu(
            &nu_pair(&gamma_plus_minus(&sigma, &Bipartition::vacuum_default()).unwrap().plus).unwrap(),
        )
        .unwrap();
        let closed = template_bound(deficit_a, deficit_b, cross).unwrap();
        prop_assert!((generic - closed).abs() <= 1e-12, "{} vs {}", generic, closed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn inner_product_is_conjugate_symmetric(accel in 0.05f64..0.5, particle in any::<bool>()) {
        let cfg = AccelerationConfig::reference(accel);
        let spec = QuadratureSpec::default();
        let species = if particle { Species::Particle } else { Species::Antiparticle };
        let psi = SpinorMode::rindler_packet(&cfg.rindler_params(Wedge::I), Wedge::I, species, &spec).unwrap();
        let phi = SpinorMode::minkowski_packet(&cfg.minkowski_params(Wedge::I).unwrap(), Wedge::I, species, &spec).unwrap();
        let forward = inner_product(&psi, &phi, &spec).unwrap().value;
        let backward = inner_product(&phi, &psi, &spec).unwrap().value;
        prop_assert!((forward - backward.conj()).norm() <= 1e-10);
        prop_assert!(forward.norm() <= 1.0 + 1e-10);
    }
}
