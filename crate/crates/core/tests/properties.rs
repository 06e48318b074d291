//! Randomized invariants of the discretization, dynamics, integrator and
//! output layers.

use approx::assert_relative_eq;
use llcontrol::discretization::{Discretization, MassKind};
use llcontrol::dynamics::RhsKind;
use llcontrol::field::{Equilibrium, MagnetizationField, PhysicalParams};
use llcontrol::integrator::{run, ControlSchedule, IntegratorConfig, Phase, Termination};
use llcontrol::output::{read_trajectory_csv, write_trajectory_csv};
use llcontrol::vec3::Vec3;
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vec3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn unit() -> impl Strategy<Value = Equilibrium> {
    vec3()
        .prop_filter("away from zero", |v| v.norm() > 0.1)
        .prop_map(|v| Equilibrium::normalized(v).unwrap())
}

fn field(nodes: std::ops::Range<usize>) -> impl Strategy<Value = MagnetizationField> {
    prop::collection::vec(vec3(), nodes).prop_map(|v| MagnetizationField::new(v).unwrap())
}

fn saturated(nodes: std::ops::Range<usize>) -> impl Strategy<Value = MagnetizationField> {
    prop::collection::vec(unit(), nodes)
        .prop_map(|v| MagnetizationField::new(v.into_iter().map(Equilibrium::vector).collect()).unwrap())
}

fn mass() -> impl Strategy<Value = MassKind> {
    prop_oneof![Just(MassKind::Lumped), Just(MassKind::Consistent)]
}

fn params() -> PhysicalParams {
    PhysicalParams::new(0.02, 1.0).unwrap()
}

fn grid(m: &MagnetizationField, mass: MassKind) -> Discretization {
    Discretization::build_with(m.len() - 1, 1.0, mass).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l2_inner_symmetric_positive(f in field(3..30), mass in mass(), seed in 0u64..1000) {
        let d = grid(&f, mass);
        let g = f.map(|v| Vec3::new(v.z, v.x * (seed as f64 * 1e-3), -v.y));
        assert_relative_eq!(d.l2_inner(&f, &g).unwrap(), d.l2_inner(&g, &f).unwrap(), max_relative = 1e-12, epsilon = 1e-14);
        let nf = d.l2_norm_sq(&f).unwrap();
        prop_assert!(nf > 0.0 || f.iter().all(|v| *v == Vec3::ZERO));
    }

    #[test]
    fn h1_zero_iff_constant(f in field(3..30), a in vec3(), mass in mass()) {
        let d = grid(&f, mass);
        prop_assert_eq!(d.h1_seminorm_sq(&MagnetizationField::constant(f.len(), a).unwrap()).unwrap(), 0.0);
        prop_assert_eq!(d.h1_seminorm_sq(&f).unwrap() == 0.0, f.is_constant());
    }

    #[test]
    fn equilibria_are_fixed_points(r in unit(), a in unit(), k in 0.1..20.0f64, n in 2usize..30, mass in mass()) {
        let d = Discretization::build_with(n, 1.0, mass).unwrap();
        let p = params();
        let m = MagnetizationField::constant(n + 1, r.vector()).unwrap();
        let kinds = [
            RhsKind::Uncontrolled,
            RhsKind::Affine { gain: k, target: r },
            RhsKind::Field { gain: k, target: r },
            RhsKind::LinearAffine { base: a, gain: k, target: r },
        ];
        for kind in kinds {
            let f = kind.evaluate(&d, &p, &m).unwrap();
            prop_assert!(f.iter().all(|v| v.max_abs() <= 1e-15), "{} not fixed", kind.label());
        }
    }

    #[test]
    fn affine_is_uncontrolled_plus_feedback(m in saturated(3..30), r in unit(), k in 0.1..20.0f64) {
        let d = Discretization::build(m.len() - 1, 1.0).unwrap();
        let p = params();
        let free = RhsKind::Uncontrolled.evaluate(&d, &p, &m).unwrap();
        let aff = RhsKind::Affine { gain: k, target: r }.evaluate(&d, &p, &m).unwrap();
        for i in 0..m.len() {
            let u = (r.vector() - m[i]) * k;
            prop_assert!((aff[i] - (free[i] + u)).max_abs() <= 4.0 * f64::EPSILON * (free[i].max_abs() + u.max_abs()));
        }
    }

    #[test]
    fn rhs_orthogonal_to_state(m in saturated(3..30), r in unit(), k in 0.1..20.0f64, mass in mass()) {
        let d = grid(&m, mass);
        let p = params();
        let w = d.weak_laplacian(&m).unwrap();
        for (kind, use_u) in [(RhsKind::Uncontrolled, false), (RhsKind::Field { gain: k, target: r }, true)] {
            let f = kind.evaluate(&d, &p, &m).unwrap();
            for i in 0..m.len() {
                let h = if use_u { w[i] + (r.vector() - m[i]) * k } else { w[i] };
                let scale = f64::EPSILON * m[i].norm() * h.norm() * (1.0 + p.nu * m[i].norm());
                prop_assert!(m[i].dot(f[i]).abs() <= 8.0 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn runs_are_deterministic_and_chain_exactly(m0 in saturated(5..9), r in unit(), k in 0.5..4.0f64) {
        let d = Discretization::build(m0.len() - 1, 1.0).unwrap();
        let p = params();
        let sched = ControlSchedule::new(vec![
            Phase::new(RhsKind::Uncontrolled, Termination::Duration(0.05)),
            Phase::new(RhsKind::Field { gain: k, target: r }, Termination::Duration(0.05)),
        ]).unwrap();
        let cfg = IntegratorConfig::for_grid(&d, &p);
        let a = run(&d, &p, &sched, &m0, &cfg).unwrap();
        let b = run(&d, &p, &sched, &m0, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a.phases[0].final_state, &a.phases[1].initial);
    }

    #[test]
    fn settle_time_ignores_record_every(m0 in saturated(4..7), r in unit(), every in 2usize..200) {
        let d = Discretization::build(m0.len() - 1, 1.0).unwrap();
        let p = params();
        let sched = ControlSchedule::single(Phase::new(RhsKind::Affine { gain: 4.0, target: r }, Termination::Settle));
        let mut cfg = IntegratorConfig::for_grid(&d, &p);
        cfg.steady_tol = 1e-4;
        cfg.record_every = 1;
        let a = run(&d, &p, &sched, &m0, &cfg).unwrap();
        cfg.record_every = every;
        let b = run(&d, &p, &sched, &m0, &cfg).unwrap();
        prop_assert_eq!(a.phases[0].settle_t, b.phases[0].settle_t);
        prop_assert_eq!(&a.phases[0].final_state, &b.phases[0].final_state);
    }

    #[test]
    fn trajectory_csv_round_trips_bit_exactly(m0 in saturated(3..9), r in unit()) {
        let d = Discretization::build(m0.len() - 1, 1.0).unwrap();
        let p = params();
        let sched = ControlSchedule::single(Phase::new(RhsKind::Affine { gain: 1.0, target: r }, Termination::Duration(0.02)));
        let mut cfg = IntegratorConfig::for_grid(&d, &p);
        cfg.record_every = 3;
        let traj = run(&d, &p, &sched, &m0, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_trajectory_csv(&path, &traj).unwrap();
        let back = read_trajectory_csv(&path).unwrap();
        prop_assert_eq!(back.len(), traj.snapshots.len());
        for ((t, m), s) in back.iter().zip(&traj.snapshots) {
            prop_assert_eq!(t.to_bits(), s.t.to_bits());
            prop_assert_eq!(m, &s.state);
        }
    }
}
