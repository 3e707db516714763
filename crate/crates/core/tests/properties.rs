use dihedral_rb::estimation::fit::DecayPoint;
use dihedral_rb::estimation::{assemble_standard, fit_single_exponential, interleaved_bound};
use dihedral_rb::noise::over_rotation_for_fidelity;
use dihedral_rb::protocol::{check_inversion, decay_dataset, sample_sequence, Setting};
use dihedral_rb::{
    avg_fidelity, expectation, twirl, unitary_to_superop, ExperimentPlan, GateNoiseMap,
    GroupElement, Mode, NoiseSpec, PauliVector, Superoperator, UnitarySpec,
};
use nalgebra::Matrix4;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn axis() -> impl Strategy<Value = [f64; 3]> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
}

fn rotation() -> impl Strategy<Value = UnitarySpec> {
    (axis(), -3.0..3.0f64).prop_map(|(a, th)| UnitarySpec::new(a, th).unwrap())
}

/// Physical noise: rotation, depolarizing, rotation.
fn channel() -> impl Strategy<Value = Superoperator> {
    (rotation(), 0.0..=1.0f64, rotation()).prop_map(|(a, p, b)| {
        NoiseSpec::Composed(vec![
            NoiseSpec::OverRotation(a),
            NoiseSpec::Depolarizing { p },
            NoiseSpec::OverRotation(b),
        ])
        .to_superop()
        .unwrap()
    })
}

fn matrix() -> impl Strategy<Value = Superoperator> {
    prop::array::uniform16(-1.0..1.0f64)
        .prop_map(|a| Superoperator::from_matrix(Matrix4::from_row_slice(&a)))
}

fn element(order: u32) -> impl Strategy<Value = GroupElement> {
    (0..order, any::<bool>()).prop_map(move |(z, x)| GroupElement::new(order, z as i64, x).unwrap())
}

fn bloch_ball() -> impl Strategy<Value = PauliVector> {
    (axis(), 0.0..=1.0f64)
        .prop_map(|(a, r)| PauliVector::from_bloch([r * a[0], r * a[1], r * a[2]]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composition_is_associative(a in matrix(), b in matrix(), c in matrix()) {
        let left = (a * b) * c;
        let right = a * (b * c);
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn fidelity_is_unitarily_invariant(e in channel(), u in rotation()) {
        let us = unitary_to_superop(&u).unwrap();
        let conj = us.transpose() * e * us;
        prop_assert!((avg_fidelity(&conj) - avg_fidelity(&e)).abs() < 1e-12);
    }

    #[test]
    fn expectation_of_state_and_effect_is_a_probability(rho in bloch_ball(), e in bloch_ball(), ch in channel()) {
        let effect = PauliVector::new(1.0, e.0[1], e.0[2], e.0[3]);
        let p = expectation(&effect, &ch.apply(&rho)).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn superop_is_a_homomorphism((a, b) in (1u32..=16).prop_flat_map(|j| (element(j), element(j)))) {
        let lhs = a.multiply(&b).unwrap().to_superop();
        prop_assert!(lhs.max_abs_diff(&(a.to_superop() * b.to_superop())) < 1e-12);
        prop_assert!(a.inverse().to_superop().max_abs_diff(&a.to_superop().transpose()) < 1e-12);
    }

    #[test]
    fn twirl_is_idempotent_and_invariant(e in channel(), j in prop::sample::select(vec![3u32, 4, 5, 8, 16]), g in 0usize..32) {
        let t = twirl(&e, j);
        prop_assert!(twirl(&t, j).max_abs_diff(&t) < 1e-12);
        let g = GroupElement::from_index(j, g % (2 * j as usize)).to_superop();
        prop_assert!((g.transpose() * t * g).max_abs_diff(&t) < 1e-12);
        prop_assert!((avg_fidelity(&t) - avg_fidelity(&e)).abs() < 1e-12);
    }

    #[test]
    fn over_rotation_hits_target_fidelity(a in axis(), f in 0.34f64..=1.0) {
        let spec = over_rotation_for_fidelity(a, f).unwrap();
        prop_assert!((avg_fidelity(&spec.to_superop().unwrap()) - f).abs() < 1e-12);
    }

    #[test]
    fn fit_is_scale_equivariant(a in 0.1f64..1.0, p in 0.8f64..0.999, c in 0.1f64..10.0) {
        let pts: Vec<DecayPoint> = (1..=60)
            .map(|m| DecayPoint::new(m as f64, a * p.powi(m), 0.0))
            .collect();
        let scaled: Vec<DecayPoint> = pts.iter().map(|q| DecayPoint::new(q.m, c * q.y, 0.0)).collect();
        let f1 = fit_single_exponential(&pts).unwrap();
        let f2 = fit_single_exponential(&scaled).unwrap();
        prop_assert!((f1.rate - f2.rate).abs() < 1e-9);
        prop_assert!((f2.amplitude - c * f1.amplitude).abs() < 1e-7 * c);
    }

    #[test]
    fn standard_assembly_is_monotone(p0 in 0.0f64..1.0, p1 in 0.0f64..1.0, d in 1e-6f64..0.1) {
        let pts = |p: f64| -> Vec<DecayPoint> {
            (1..=20).map(|m| DecayPoint::new(m as f64, 0.5 * p.powi(m), 0.0)).collect()
        };
        let fit = |p: f64| {
            let mut f = fit_single_exponential(&pts(0.9)).unwrap();
            f.rate = p;
            f
        };
        let base = assemble_standard(&fit(p0), &fit(p1)).f_avg;
        prop_assert!(assemble_standard(&fit(p0 + d), &fit(p1)).f_avg > base);
        prop_assert!(assemble_standard(&fit(p0), &fit(p1 + d)).f_avg > base);
    }

    #[test]
    fn bound_contains_ratio(cr in 0.05f64..=1.0, ratio in 0.0f64..=1.0) {
        let b = interleaved_bound(ratio * cr, cr).unwrap();
        prop_assert!(b.implicit[0] <= ratio + 1e-9 && ratio <= b.implicit[1] + 1e-9);
        prop_assert!(b.plug_in[0] <= ratio + 1e-12 && ratio <= b.plug_in[1] + 1e-12);
    }

    #[test]
    fn sampled_sequences_invert(j in 1u32..=16, m in 0usize..12, seed in any::<u64>(), b1 in any::<bool>(), b2 in any::<bool>(), interleaved in any::<bool>()) {
        let mode = if interleaved { Mode::Interleaved } else { Mode::Standard };
        let m = if interleaved { 2 * (m / 2) } else { m };
        let plan = ExperimentPlan::new(j, mode, vec![m.max(2)], 1);
        let setting = Setting::new(b1, b2 && j % 2 == 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let record = sample_sequence(&plan, m, setting, &mut rng).unwrap();
        prop_assert!(check_inversion(&record).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dataset_is_deterministic_and_sorted(seed in any::<u64>(), j in prop::sample::select(vec![3u32, 4, 8]), shots in prop::sample::select(vec![0u64, 50])) {
        let mut plan = ExperimentPlan::new(j, Mode::Standard, vec![1, 3, 6], 16);
        plan.seed = seed;
        plan.shots = shots;
        plan.noise = GateNoiseMap::uniform(NoiseSpec::Depolarizing { p: 0.97 });
        let a = decay_dataset(&plan).unwrap();
        let b = decay_dataset(&plan).unwrap();
        prop_assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
        for row in &a.rows {
            let settings: Vec<Setting> = row.estimates.iter().map(|e| e.setting).collect();
            prop_assert_eq!(settings, Setting::all(j % 2 == 0));
        }
    }
}
