//! Multi-conditionals, mixtures and observations against their plain
//! encodings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statues::random::{model_from_seed, Config, Ty};
use statues::{marg, marg_with_observations, Error, Pex, Pmf, Prob, Value};

fn same(a: &statues::Result<Pmf<Prob>>, b: &statues::Result<Pmf<Prob>>) -> bool {
    match (a, b) {
        (Ok(a), Ok(b)) => a.same_mapping(b),
        (Err(Error::EmptyDistribution), Err(Error::EmptyDistribution)) => true,
        _ => false,
    }
}

#[test]
fn multi_given_equals_given_of_conjunction() {
    let cfg = Config::default();
    let mut checked = 0;
    for seed in 0..100u64 {
        let m = model_from_seed(seed, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bools = m.of_type(&Ty::Bool);
        let n = rng.gen_range(1..=3);
        let conds: Vec<Pex> = (0..n).map(|_| (*bools.choose(&mut rng).unwrap()).clone()).collect();
        let conj = conds[1..]
            .iter()
            .fold(conds[0].clone(), |acc, c| Pex::apply("and", &[acc, c.clone()]));
        let multi = marg(&Pex::multi_given(&m.root, &conds).unwrap());
        let plain = marg(&Pex::given(&m.root, &conj));
        assert!(same(&multi, &plain), "seed {seed}: {multi:?} vs {plain:?}");
        checked += 1;
    }
    assert_eq!(checked, 100);
}

#[test]
fn observations_equal_conditioning_on_equality() {
    let cfg = Config::default();
    for seed in 0..100u64 {
        let m = model_from_seed(seed, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let leaves = m.elementaries();
        let e = (*leaves.choose(&mut rng).unwrap()).clone();
        let values: Vec<Value> = e.pmf().unwrap().values().cloned().collect();
        let v = values.choose(&mut rng).unwrap().clone();
        let observed = marg_with_observations(&m.root, &[(e.clone(), v.clone())]);
        let evidence = Pex::apply("eq", &[e, Pex::certain(v)]);
        let given = marg(&Pex::given(&m.root, &evidence));
        assert!(same(&observed, &given), "seed {seed}: {observed:?} vs {given:?}");
    }
}

fn bern(num: i64, den: i64) -> Pex {
    Pex::from_ratios([(Value::Bool(true), num, den), (Value::Bool(false), den - num, den)]).unwrap()
}

#[test]
fn grass_cpt_as_mixture_matches_cascaded_tables() {
    let r = bern(1, 5);
    let s = Pex::table(&r, [(Value::Bool(true), bern(1, 100)), (Value::Bool(false), bern(2, 5))]).unwrap();
    let not = |x: &Pex| Pex::apply("not", std::slice::from_ref(x));
    let and = |a: &Pex, b: &Pex| Pex::apply("and", &[a.clone(), b.clone()]);

    let inner = Pex::table(&r, [(Value::Bool(false), Pex::certain(false)), (Value::Bool(true), bern(4, 5))]).unwrap();
    let cascaded = Pex::table(&s, [(Value::Bool(false), inner), (Value::Bool(true), bern(19, 20))]).unwrap();

    let mixed = Pex::mixture(&[
        Pex::given(&Pex::certain(false), &and(&not(&r), &not(&s))),
        Pex::given(&bern(4, 5), &and(&r, &not(&s))),
        Pex::given(&bern(19, 20), &s),
    ])
    .unwrap();

    for g in [&cascaded, &mixed] {
        assert_eq!(marg(g).unwrap().p_true(), Prob::new(4643.into(), 10000.into()));
    }
    let queries = |g: &Pex| {
        vec![
            marg(g).unwrap(),
            marg(&Pex::tuple_of(&[r.clone(), s.clone(), g.clone()])).unwrap(),
            marg(&Pex::given(&r, g)).unwrap(),
            marg(&Pex::given(&s, &not(g))).unwrap(),
        ]
    };
    for (a, b) in queries(&cascaded).iter().zip(queries(&mixed)) {
        assert!(a.same_mapping(&b), "{a} vs {b}");
    }
}
