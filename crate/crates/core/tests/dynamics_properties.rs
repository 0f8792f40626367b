use std::f64::consts::PI;

use fstirap_core::dynamics::from_adiabatic;
use fstirap_core::{evolve_trajectory, to_adiabatic, PulseProfile64, SystemParams64};
use proptest::prelude::*;

fn harmonics() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 0..=4).prop_map(|mut v| {
        if v.len() % 2 == 1 {
            v.pop();
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_keeps_a_physical_state(
        gamma in 0.0f64..1.0,
        kappa1 in 0.0f64..0.1,
        kappa2 in 0.0f64..0.1,
        t_f in 2.0f64..20.0,
        unit in harmonics(),
    ) {
        let p = SystemParams64::new(1.0, gamma, kappa1, kappa2).unwrap();
        let a0 = PI / (4.0 * t_f);
        let h: Vec<f64> = unit.iter().map(|u| u * a0).collect();
        let prof = PulseProfile64::fixed_endpoint(t_f, &h).unwrap();
        let traj = evolve_trajectory(&p, &prof, (t_f / 0.005).ceil() as usize, 10).unwrap();
        let mut prev = 0.0;
        for rho in &traj.states {
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(rho.hermiticity_error() < 1e-14);
            prop_assert!(rho.min_eigenvalue() > -1e-10);
            let p44 = rho.population(4);
            prop_assert!(p44 >= prev - 1e-15);
            prev = p44;
        }
        prop_assert_eq!(traj.times[0], 0.0);
        prop_assert_eq!(*traj.times.last().unwrap(), t_f);
    }

    #[test]
    fn lossless_evolution_is_unitary(t_f in 2.0f64..30.0, unit in harmonics()) {
        let p = SystemParams64::symmetric(1.0, 0.0, 0.0).unwrap();
        let a0 = PI / (4.0 * t_f);
        let h: Vec<f64> = unit.iter().map(|u| u * a0).collect();
        let prof = PulseProfile64::fixed_endpoint(t_f, &h).unwrap();
        let traj = evolve_trajectory(&p, &prof, (t_f / 0.01).ceil() as usize, 25).unwrap();
        for rho in &traj.states {
            prop_assert!((rho.purity() - 1.0).abs() < 1e-8);
            prop_assert_eq!(rho.population(4), 0.0);
        }
    }

    #[test]
    fn frame_rotation_round_trips(theta in -3.0f64..3.0, t_f in 2.0f64..10.0) {
        let p = SystemParams64::new(1.0, 0.3, 0.02, 0.07).unwrap();
        let prof = PulseProfile64::linear_ramp(t_f).unwrap();
        let rho = evolve_trajectory(&p, &prof, (t_f / 0.05).ceil() as usize, 1000).unwrap().last().clone();
        let back = from_adiabatic(&to_adiabatic(&rho, theta).unwrap(), theta).unwrap();
        let err = (back.entries - rho.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-14);
        let rp = to_adiabatic(&rho, theta).unwrap();
        prop_assert!((rp.trace() - rho.trace()).norm() < 1e-14);
    }
}
