mod common;

use common::*;
use proptest::prelude::*;
use twistred::exterior::eval_on;
use twistred::torus::stream_rng;
use twistred::{Form, MultiIndex, TangentVector, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), dim in 1usize..=3, grade in 0usize..=2) {
        let mut rng = stream_rng(seed, 0);
        let f = random_field(dim, grade.min(2 * dim), &mut rng);
        let df = f.d();
        let ddf = df.d();
        let z = random_point(dim, &mut rng);
        prop_assert!(residual_at(&ddf, &[&df], &z) < 1e-10);
    }

    #[test]
    fn d_is_an_antiderivation(seed in any::<u64>(), dim in 2usize..=3, p in 0usize..=2, q in 0usize..=2) {
        let mut rng = stream_rng(seed, 1);
        let a = random_field(dim, p, &mut rng);
        let b = random_field(dim, q, &mut rng);
        let lhs = a.wedge(&b).unwrap().d();
        let sign = if p % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
        let rhs = a.d().wedge(&b).unwrap().add(&a.wedge(&b.d()).unwrap().scale(sign));
        let z = random_point(dim, &mut rng);
        prop_assert!(residual_at(&lhs.sub(&rhs), &[&lhs, &rhs], &z) < 1e-10);
    }

    #[test]
    fn contraction_is_an_antiderivation(seed in any::<u64>(), dim in 2usize..=3, p in 1usize..=2, q in 1usize..=2) {
        let mut rng = stream_rng(seed, 2);
        let a = random_field(dim, p, &mut rng);
        let b = random_field(dim, q, &mut rng);
        let v = random_vector_field(dim, &mut rng);
        let lhs = a.wedge(&b).unwrap().contract(&v).unwrap();
        let sign = if p % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
        let rhs = a
            .contract(&v)
            .unwrap()
            .wedge(&b)
            .unwrap()
            .add(&a.wedge(&b.contract(&v).unwrap()).unwrap().scale(sign));
        let z = random_point(dim, &mut rng);
        prop_assert!(residual_at(&lhs.sub(&rhs), &[&lhs, &rhs], &z) < 1e-10);
    }

    #[test]
    fn eval_on_matches_leibniz_sum(seed in any::<u64>(), dim in 1usize..=3, grade in 0usize..=6) {
        let grade = grade.min(2 * dim);
        let mut rng = stream_rng(seed, 3);
        let terms: Vec<(MultiIndex, C64)> = (0..4).map(|_| (random_index(dim, grade, &mut rng), rc(&mut rng))).collect();
        let a = Form::from_terms(dim, terms).unwrap();
        let vs: Vec<TangentVector> = (0..grade).map(|_| random_vector(dim, &mut rng)).collect();
        let got = eval_on(&a, &vs).unwrap();
        let want = brute_eval(&a, &vs);
        prop_assert!((got - want).norm() < 1e-13 * want.norm().max(1.0));
    }

    #[test]
    fn wedge_of_one_forms_evaluates_to_a_determinant(seed in any::<u64>(), dim in 1usize..=3, k in 1usize..=6) {
        let k = k.min(2 * dim);
        let mut rng = stream_rng(seed, 4);
        let thetas: Vec<(Vec<C64>, Vec<C64>)> = (0..k).map(|_| (random_point(dim, &mut rng), random_point(dim, &mut rng))).collect();
        let as_form = |t: &(Vec<C64>, Vec<C64>)| {
            let holo = Form::one_form(&t.0);
            let anti = Form::from_terms(dim, t.1.iter().enumerate().map(|(j, &c)| (MultiIndex::dzbar(j), c))).unwrap();
            &holo + &anti
        };
        let a = thetas.iter().skip(1).fold(as_form(&thetas[0]), |acc, t| acc.wedge(&as_form(t)).unwrap());
        let vs: Vec<TangentVector> = (0..k).map(|_| random_vector(dim, &mut rng)).collect();
        let want: C64 = permutations(k)
            .into_iter()
            .map(|(perm, s)| thetas.iter().zip(&perm).fold(C64::new(s, 0.0), |acc, (t, &p)| acc * one_form_value(t, &vs[p])))
            .sum();
        let got = eval_on(&a, &vs).unwrap();
        prop_assert!((got - want).norm() < 1e-12 * want.norm().max(1.0));
    }
}
