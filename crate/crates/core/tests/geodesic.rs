use monodromy_core::geodesic::{integrate, poincare_linearization, GeodesicState, Verdict, WarpedMetric};
use monodromy_core::C64;
use proptest::prelude::{prop_assert, proptest, ProptestConfig};

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn multipliers_are_stable_under_step_halving() {
    for (z0, verdict) in [(0.0, Verdict::SemiHyperbolic), (0.5, Verdict::Hyperbolic), (-0.5, Verdict::Hyperbolic)] {
        let coarse = poincare_linearization(z0, None, 2e-3).unwrap();
        let fine = poincare_linearization(z0, None, 1e-3).unwrap();
        assert_eq!(coarse.verdict, verdict);
        assert_eq!(fine.verdict, verdict);
        for (a, b) in sorted(coarse.multipliers).iter().zip(&sorted(fine.multipliers)) {
            assert!((a - b).norm() <= 1e-4, "{a} vs {b}");
        }
    }
}

#[test]
fn multipliers_pair_with_their_inverses() {
    for z0 in [0.0, 0.5, -0.5] {
        let r = poincare_linearization(z0, Some(1.3), 1e-3).unwrap();
        let prod: C64 = r.multipliers.iter().product();
        assert!((prod - 1.0).norm() < 1e-9);
        for m in &r.multipliers {
            let inv = m.inv();
            assert!(r.multipliers.iter().any(|n| (n - inv).norm() < 1e-8), "{m}");
        }
    }
}

#[test]
fn single_and_double_precision_agree() {
    let m64 = WarpedMetric::<f64>::default();
    let m32 = WarpedMetric::<f32>::default();
    let mut s64 = GeodesicState::on_line(&m64, 0.0, 0.0);
    s64.vy = 1e-2;
    s64.vz = -2e-2;
    let s32 = GeodesicState::<f32> {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        vx: s64.vx as f32,
        vy: s64.vy as f32,
        vz: s64.vz as f32,
    };
    let a = integrate(&m64, &s64, 2.0, 1e-3, 100).unwrap();
    let b = integrate(&m32, &s32, 2.0f32, 1e-3f32, 100).unwrap();
    for (u, v) in a.end.to_array().iter().zip(b.end.to_array()) {
        assert!((u - v as f64).abs() < 1e-4, "{u} vs {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_conserved_and_the_flow_reverses(
        y in -0.3f64..0.3, z in -0.6f64..0.6, vx in 0.2f64..1.5, vy in -0.3f64..0.3, vz in -0.3f64..0.3,
    ) {
        let m = WarpedMetric::<f64>::default();
        let start = GeodesicState { x: 0.0, y, z, vx, vy, vz };
        let fwd = integrate(&m, &start, 1.0, 1e-3, 1000).unwrap();
        prop_assert!(!fwd.blown_up);
        prop_assert!(fwd.energy_drift <= 1e-9 * (1.0 + m.energy(&start)));
        let mut back = fwd.end;
        back.vx = -back.vx;
        back.vy = -back.vy;
        back.vz = -back.vz;
        let rev = integrate(&m, &back, 1.0, 1e-3, 1000).unwrap();
        let e = rev.end;
        for (u, v) in [(e.x, start.x), (e.y, start.y), (e.z, start.z), (-e.vx, vx), (-e.vy, vy), (-e.vz, vz)] {
            prop_assert!((u - v).abs() < 1e-8, "{} vs {}", u, v);
        }
    }
}
