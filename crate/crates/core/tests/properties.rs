use proptest::prelude::*;

use uavbs::channel::{avg_path_loss, los_probability, path_loss, per_user_tx_power, Environment, Link, RadioConfig};
use uavbs::placement::PlacementModel;

fn env() -> impl Strategy<Value = Environment> {
    prop_oneof![
        Just(Environment::urban()),
        Just(Environment::dense_urban()),
        Just(Environment::suburban())
    ]
}

#[test]
fn per_user_power_golden() {
    let p = per_user_tx_power(100.0, 100.0, &Environment::urban(), &RadioConfig::default()).unwrap();
    assert!(((p - 0.016310373953585636) / p).abs() < 1e-12);
}

proptest! {
    #[test]
    fn los_probability_is_a_probability_increasing_with_altitude(
        e in env(), r in 1.0..5000.0f64, h in 0.0..5000.0f64, dh in 1.0..500.0f64,
    ) {
        let p = los_probability(r, h, &e).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(los_probability(r, h + dh, &e).unwrap() >= p);
    }

    #[test]
    fn average_loss_lies_between_los_and_nlos(e in env(), r in 1.0..5000.0f64, h in 1.0..5000.0f64) {
        let radio = RadioConfig::default();
        let los = path_loss(Link::Los, r, h, &e, &radio).unwrap();
        let nlos = path_loss(Link::Nlos, r, h, &e, &radio).unwrap();
        let avg = avg_path_loss(r, h, &e, &radio).unwrap();
        prop_assert!(los <= avg * (1.0 + 1e-12) && avg <= nlos * (1.0 + 1e-12));
    }

    #[test]
    fn scaling_geometry_scales_power_quadratically(
        e in env(), r in 1.0..2000.0f64, h in 1.0..2000.0f64, k in 0.1..10.0f64,
    ) {
        // Elevation depends on h / r only, so excess loss is scale-free.
        let radio = RadioConfig::default();
        let a = per_user_tx_power(r, h, &e, &radio).unwrap();
        let b = per_user_tx_power(k * r, k * h, &e, &radio).unwrap();
        prop_assert!((b / a / (k * k) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn optimal_radius_scaling(lambda in 1e-6..10.0f64, p in 0.01..100.0f64, k in 0.1..10.0f64) {
        let m = PlacementModel::cached(&Environment::urban(), &RadioConfig::default()).unwrap();
        let r = m.optimal_radius(lambda, p).unwrap();
        prop_assert!((m.optimal_radius(lambda, k * p).unwrap() / r / k.powf(0.25) - 1.0).abs() < 1e-12);
        prop_assert!((m.optimal_radius(k * lambda, p).unwrap() / r * k.powf(0.25) - 1.0).abs() < 1e-12);
    }
}
