use proptest::prelude::*;

use hexctx_core::contextuality::{degree_exact, degree_upper_search, violated_lines};
use hexctx_core::gf2::EchelonBasis;
use hexctx_core::pauli::product;
use hexctx_core::{BitVector, Configuration, LineSet, Observable, PolarSpace};

fn observable(n: usize) -> impl Strategy<Value = Observable> {
    (0u8..(1 << n), 0u8..(1 << n)).prop_map(move |(a, b)| Observable::new(n, a, b).unwrap())
}

fn line_subset(max: usize) -> impl Strategy<Value = LineSet> {
    proptest::collection::btree_set(0usize..315, 1..max).prop_map(LineSet::from_ids)
}

fn contexts_of(c: &Configuration) -> Vec<Vec<Observable>> {
    c.contexts()
        .iter()
        .map(|ctx| ctx.members.iter().map(|&j| c.points()[j]).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_product_is_associative_with_phases(
        (p, q, r) in (1usize..=6).prop_flat_map(|n| (observable(n), observable(n), observable(n)))
    ) {
        let (pq, k1) = p.multiply(&q).unwrap();
        let (left, k2) = pq.multiply(&r).unwrap();
        let (qr, k3) = q.multiply(&r).unwrap();
        let (right, k4) = p.multiply(&qr).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(k1 * k2, k3 * k4);
        prop_assert_eq!(product(&[p, q, r]).unwrap(), (left, k1 * k2));
    }

    #[test]
    fn commutation_matches_symplectic_form(p in observable(4), q in observable(4)) {
        prop_assert_eq!(p.commutes(&q).unwrap(), !p.symplectic_form(&q).unwrap());
        let (pq, a) = p.multiply(&q).unwrap();
        let (qp, b) = q.multiply(&p).unwrap();
        prop_assert_eq!(pq, qp);
        prop_assert_eq!(a == b, p.commutes(&q).unwrap());
    }

    #[test]
    fn degree_is_invariant_under_transvections(lines in line_subset(24), v in 0usize..63) {
        let w = PolarSpace::three_qubit();
        let c = Configuration::from_lines(w, &lines);
        let image = Configuration::from_lines(w, &w.transvect_lines(v, &lines));
        prop_assert_eq!(
            degree_exact(&c, 30).unwrap().upper,
            degree_exact(&image, 30).unwrap().upper
        );
    }

    #[test]
    fn degree_ignores_context_order(lines in line_subset(20), rot in 0usize..20) {
        let w = PolarSpace::three_qubit();
        let c = Configuration::from_lines(w, &lines);
        let mut ctx = contexts_of(&c);
        let k = rot % ctx.len();
        ctx.rotate_left(k);
        for members in &mut ctx {
            members.reverse();
        }
        let shuffled = Configuration::build(&ctx).unwrap();
        prop_assert_eq!(
            degree_exact(&c, 30).unwrap().upper,
            degree_exact(&shuffled, 30).unwrap().upper
        );
    }

    #[test]
    fn every_assignment_violates_at_least_the_degree(lines in line_subset(24), flips in proptest::collection::vec(any::<bool>(), 63)) {
        let w = PolarSpace::three_qubit();
        let c = Configuration::from_lines(w, &lines);
        let s = BitVector::from_ones(c.p(), (0..c.p()).filter(|&i| flips[i]));
        let d = degree_exact(&c, 30).unwrap().upper;
        let violated = violated_lines(&c, &s).unwrap();
        prop_assert!(violated.len() >= d);
        prop_assert_eq!(violated.len(), c.violation_vector(&s).unwrap().weight());
        prop_assert!(degree_upper_search(&c, 1, 20).upper >= d);
    }

    #[test]
    fn echelon_solve_reproduces_targets(cols in proptest::collection::vec(any::<u64>(), 1..20), mix in any::<u32>()) {
        let vectors: Vec<BitVector> = cols
            .iter()
            .map(|&x| BitVector::from_ones(64, (0..64).filter(|b| (x >> b) & 1 == 1)))
            .collect();
        let basis = EchelonBasis::new(&vectors);
        let mut target = BitVector::zeros(64);
        for (i, v) in vectors.iter().enumerate() {
            if (mix >> (i % 32)) & 1 == 1 {
                target.xor_assign(v);
            }
        }
        let x = basis.solve(&target, vectors.len()).expect("target lies in the span");
        let mut back = BitVector::zeros(64);
        for i in x.ones() {
            back.xor_assign(&vectors[i]);
        }
        prop_assert_eq!(back, target);
    }
}
