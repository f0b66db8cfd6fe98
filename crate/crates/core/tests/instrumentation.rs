//! Counters behind the efficiency claims: memoized function values,
//! pruned branches and untouched unreachable nodes.

use statues::engine::{Edge, EventKind};
use statues::engine::marg_instrumented;
use statues::{marg_traced, Options, Pex, Value};

fn uniform(values: &[i64]) -> Pex {
    Pex::from_ratios(values.iter().map(|&v| (Value::int(v), 1, values.len() as i64))).unwrap()
}

/// `D^2 - U*V given (A <= D) and (D <= B)` with `D = sqrt(X^2 + Y^2)`.
fn distance_query() -> Pex {
    let x = uniform(&[-3, 0, 3]);
    let y = uniform(&[-4, 0, 4]);
    let (a, b) = (uniform(&[0, 3, 5]), uniform(&[3, 4, 5]));
    let (u, v) = (uniform(&[1, 2, 3]), uniform(&[0, 1, 2]));
    let sq = |n: &Pex| Pex::apply("mul", &[n.clone(), n.clone()]);
    let d = Pex::apply("sqrt", &[Pex::apply("add", &[sq(&x), sq(&y)])]);
    let target = Pex::apply("sub", &[sq(&d), Pex::apply("mul", &[u, v])]);
    let evidence = Pex::apply("and", &[Pex::apply("le", &[a, d.clone()]), Pex::apply("le", &[d, b])]);
    Pex::given(&target, &evidence)
}

#[test]
fn sqrt_runs_once_per_argument_pair_at_most() {
    let root = distance_query();
    let (memo, stats) = marg_instrumented(&root, Options::default());
    let sqrt_evals = stats.evals("sqrt");
    assert!(sqrt_evals <= 9, "sqrt evaluated {sqrt_evals} times");

    let (plain, plain_stats) = marg_instrumented(&root, Options { memoize: false, ..Options::default() });
    assert_eq!(memo.unwrap(), plain.unwrap());
    // Binding alone already keeps sqrt far below one call per world.
    assert!(plain_stats.evals("sqrt") < 729, "{}", plain_stats.evals("sqrt"));
    assert!(sqrt_evals <= plain_stats.evals("sqrt"));
}

fn ex3() -> (Pex, Pex) {
    let b1 = Pex::from_ratios([(Value::int(0), 1, 3), (Value::int(1), 2, 3)]).unwrap();
    let b2 = Pex::from_ratios([(Value::int(0), 3, 4), (Value::int(1), 1, 4)]).unwrap();
    let s = Pex::apply("add", &[b1.clone(), b2]);
    (b1.clone(), Pex::given(&b1, &Pex::apply("le", &[s, Pex::certain(1)])))
}

#[test]
fn false_condition_prunes_the_target() {
    let (b1, root) = ex3();
    let (pmf, trace) = marg_traced(&root);
    assert_eq!(pmf.unwrap().to_string(), "{0: 2/5, 1: 3/5}");
    let to_target = Some(Edge { parent: root.id(), slot: 0 });
    let to_evidence = Some(Edge { parent: root.id(), slot: 1 });
    let evidence_atoms = trace.yields_on(root.children()[1].id(), to_evidence);
    let accepted = evidence_atoms.iter().filter(|(v, _)| *v == Value::Bool(true)).count();
    let target_invocations = trace
        .events
        .iter()
        .filter(|e| e.node == b1.id() && matches!(e.kind, EventKind::Invoke { to } if to == to_target))
        .count();
    assert_eq!((evidence_atoms.len(), accepted), (4, 3));
    assert_eq!(target_invocations, accepted);
    assert_eq!(trace.skip_count(), 1);

    // No event between the rejected condition atom and the skip reaches the target.
    let skip = trace.events.iter().position(|e| matches!(e.kind, EventKind::SkipFalseCondition)).unwrap();
    let rejected = trace.events[..skip]
        .iter()
        .rposition(|e| matches!(&e.kind, EventKind::Yield { to, value: Value::Bool(false), .. } if *to == to_evidence))
        .unwrap();
    assert!(trace.events[rejected..skip].iter().all(|e| e.node != b1.id() || !matches!(e.kind, EventKind::Invoke { .. })));
}

#[test]
fn unreachable_nodes_are_never_visited() {
    let (_, root) = ex3();
    let unrelated = Pex::apply("add", &[uniform(&[1, 2]), uniform(&[3, 4])]);
    let _unused_parent = Pex::tuple_of(&[root.clone(), unrelated.clone()]);
    let (_, stats) = marg_instrumented(&root, Options::default());
    assert_eq!(stats.calls(&unrelated), 0);
    assert!(stats.calls(&root) >= 1);
    assert_eq!(stats.binds, stats.unbinds);
}
