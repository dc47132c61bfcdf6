mod common;

use common::{equivalence_spec, mixed_spec, rng, uniform_spec, Kind};
use qswitch::metrics::{evaluate, linear_entropy, MetricKind};
use qswitch::switch::{run, Protocol, SwitchSpec};
use qswitch::verify::{certify_class, check_max_entanglement, check_separability, reduce, StateClass, CONDITION_TOL};

const METRIC_TOL: f64 = 1e-6;

fn target(protocol: Protocol) -> f64 {
    match protocol {
        Protocol::W(3) => 2.0 * 2f64.sqrt() / 3.0,
        _ => 1.0,
    }
}

fn all_outcomes_maximal(spec: &SwitchSpec) -> bool {
    let kind = spec.protocol().default_metric().unwrap();
    let t = target(spec.protocol());
    run(spec)
        .reachable()
        .all(|(_, s)| (evaluate(kind, s).unwrap() - t).abs() < METRIC_TOL)
}

fn equivalence(protocol: Protocol, seed: u64, samples: usize) {
    let mut r = rng(seed);
    let mut satisfied = 0;
    for i in 0..samples {
        let spec = equivalence_spec(&mut r, protocol);
        let holds = check_max_entanglement(&spec, CONDITION_TOL).all_orthogonal;
        satisfied += holds as usize;
        assert_eq!(holds, all_outcomes_maximal(&spec), "{protocol} sample {i}: {spec:?}");
    }
    assert!(
        satisfied > samples / 8 && satisfied < samples,
        "{satisfied}/{samples} satisfied"
    );
}

#[test]
fn bell_maximal_iff_orthogonal() {
    equivalence(Protocol::Bell, 11, 120);
}

#[test]
fn ghz3_maximal_iff_orthogonal() {
    equivalence(Protocol::Ghz(3), 12, 120);
}

#[test]
fn ghz4_maximal_iff_orthogonal() {
    equivalence(Protocol::Ghz(4), 13, 80);
}

#[test]
fn w3_maximal_iff_orthogonal() {
    equivalence(Protocol::W(3), 14, 120);
}

#[test]
fn bell_minus_branch_is_not_enough() {
    // one outcome can be maximal while the condition fails
    let spec = SwitchSpec::z_ry_family(Protocol::Bell, 0.7, 0.4).unwrap();
    let ens = run(&spec);
    assert!(!check_max_entanglement(&spec, CONDITION_TOL).all_orthogonal);
    assert!(
        (evaluate(MetricKind::Concurrence, ens.get("-").unwrap().state.as_ref().unwrap()).unwrap() - 1.0).abs() < 1e-9
    );
    assert!(!all_outcomes_maximal(&spec));
}

fn aligned_qubit_factors_out(protocol: Protocol, seed: u64, samples: usize) {
    let mut r = rng(seed);
    for _ in 0..samples {
        let spec = mixed_spec(&mut r, protocol, Some(Kind::Aligned));
        let report = check_max_entanglement(&spec, CONDITION_TOL);
        assert!(report.any_aligned && check_separability(&spec, CONDITION_TOL));
        for q in report.aligned_qubits() {
            for (label, s) in run(&spec).reachable() {
                let le = linear_entropy(s, &[q]).unwrap();
                assert!(le < 1e-9, "{protocol} {label} qubit {q}: linear entropy {le}");
            }
        }
    }
}

#[test]
fn aligned_qubits_are_unentangled() {
    aligned_qubit_factors_out(Protocol::Bell, 21, 60);
    aligned_qubit_factors_out(Protocol::Ghz(3), 22, 60);
    aligned_qubit_factors_out(Protocol::W(3), 23, 60);
}

#[test]
fn no_alignment_no_pure_marginal() {
    let mut r = rng(31);
    for protocol in [Protocol::Bell, Protocol::Ghz(3), Protocol::Ghz(4), Protocol::W(3)] {
        for _ in 0..60 {
            let spec = uniform_spec(&mut r, protocol, Kind::Generic);
            assert!(!check_max_entanglement(&spec, CONDITION_TOL).any_aligned);
            for (label, s) in run(&spec).reachable() {
                for q in 0..protocol.num_targets() {
                    assert!(linear_entropy(s, &[q]).unwrap() > 1e-9, "{protocol} {label} qubit {q}");
                }
            }
        }
    }
}

#[test]
fn satisfying_specs_reduce_to_canonical_targets() {
    let mut r = rng(41);
    for protocol in [
        Protocol::Bell,
        Protocol::Ghz(3),
        Protocol::Ghz(5),
        Protocol::W(3),
        Protocol::W(4),
        Protocol::W(5),
    ] {
        for _ in 0..20 {
            let spec = uniform_spec(&mut r, protocol, Kind::Orthogonal);
            let red = reduce(&spec).unwrap();
            assert_eq!(red.outcomes.len(), 1 << protocol.control_qubits());
            for o in red.outcomes.iter().filter(|o| o.probability > 1e-12) {
                assert!(
                    (o.fidelity - 1.0).abs() < 1e-9,
                    "{protocol} {}: {}",
                    o.label,
                    o.fidelity
                );
            }
        }
    }
}

#[test]
fn three_qubit_classes() {
    let mut r = rng(51);
    for _ in 0..30 {
        let ghz = uniform_spec(&mut r, Protocol::Ghz(3), Kind::Orthogonal);
        let w = uniform_spec(&mut r, Protocol::W(3), Kind::Orthogonal);
        let sep = uniform_spec(&mut r, Protocol::Ghz(3), Kind::Aligned);
        for (_, s) in run(&ghz).reachable() {
            assert_eq!(certify_class(s, 1e-9).unwrap(), StateClass::GhzClass);
        }
        for (_, s) in run(&w).reachable() {
            assert_eq!(certify_class(s, 1e-9).unwrap(), StateClass::WClass);
        }
        for (_, s) in run(&sep).reachable() {
            assert_eq!(certify_class(s, 1e-9).unwrap(), StateClass::Separable);
        }
    }
}
