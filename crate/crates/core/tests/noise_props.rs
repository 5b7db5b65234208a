use majorana_teleport::noise::{monte_carlo_teleport, DephasingPolicy, NoiseParams};
use majorana_teleport::teleport::{InputState, TeleportProgram};

const T2: [f64; 8] = [4.73, 2.25, 4.91, 1.25, 6.22, 2.39, 4.7, 2.89];

#[test]
fn dephasing_alone_favours_postselection() {
    let program = TeleportProgram::compile().unwrap();
    for policy in [DephasingPolicy::Midpoint, DephasingPolicy::PerMoment] {
        let p = NoiseParams::from_t2_star(vec![0.0; 8], vec![0.0; 7], &T2, 0.15, policy).unwrap();
        let (mut ns, mut es) = (0.0, 0.0);
        for input in InputState::SIX {
            let est = monte_carlo_teleport(&input, &program, &p, 1000, 17).unwrap();
            ns += est.ns.fidelity.mean;
            es += est.es.fidelity.mean;
        }
        assert!(es >= ns, "{policy:?}: es {es} < ns {ns}");
    }
}

#[test]
fn tiny_widths_give_unit_fidelity() {
    let program = TeleportProgram::compile().unwrap();
    let p = NoiseParams::new(vec![1e-6; 8], vec![1e-6; 7], vec![1e-6; 8], DephasingPolicy::PerMoment).unwrap();
    for input in InputState::SIX {
        let est = monte_carlo_teleport(&input, &program, &p, 50, 1).unwrap();
        assert!((est.ns.fidelity.mean - 1.0).abs() < 1e-6);
        assert!((est.es.fidelity.mean - 1.0).abs() < 1e-6);
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let program = TeleportProgram::compile().unwrap();
    let p = NoiseParams::from_t2_star(vec![0.016; 8], vec![0.08; 7], &T2, 0.15, DephasingPolicy::Midpoint).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo_teleport(&InputState::MinusI, &program, &p, 64, 99).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.ns.fidelity, b.ns.fidelity);
    assert_eq!(a.es.fidelity, b.es.fidelity);
    assert_eq!(a.es.mean_rho, b.es.mean_rho);
}
