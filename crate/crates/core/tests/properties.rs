use blowdown::contraction;
use blowdown::lattice::{BlowupStep, DivisorClass, SurfaceModel};
use blowdown::linalg;
use blowdown::rational::{self, Rational};
use blowdown::tchains::{self, Move, Recognition, TChain};
use blowdown::topology::{self, BlowdownSpec, Configuration, GraphEdge, Parity, SurfaceSummary};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn coprime_pair(max_p: u64) -> impl Strategy<Value = (u64, u64)> {
    (2..=max_p).prop_flat_map(|p| (Just(p), 1..p)).prop_filter("coprime", |(p, q)| p.gcd(q) == 1)
}

/// A class-T chain built by moves from a random base.
fn class_t_chain() -> impl Strategy<Value = Vec<u32>> {
    let base = (1usize..6).prop_map(|len| {
        if len == 1 {
            vec![4]
        } else {
            let mut b = vec![2; len];
            b[0] = 3;
            b[len - 1] = 3;
            b
        }
    });
    (base, prop::collection::vec(any::<bool>(), 0..10)).prop_map(|(mut bs, moves)| {
        for prepend in moves {
            bs = if prepend { Move::PrependTwo } else { Move::AppendTwo }.apply(&bs);
        }
        bs
    })
}

fn chain_entries() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2u32..9, 1..9)
}

proptest! {
    #[test]
    fn wahl_chain_value_round_trips((p, q) in coprime_pair(5000)) {
        let chain = tchains::hj_expand(p, q).unwrap();
        let value = tchains::hj_value(chain.entries()).unwrap();
        let (p2, pq) = (BigInt::from(p) * p, BigInt::from(p) * q - 1);
        prop_assert_eq!(value, Rational::new(p2, pq));
        let back = tchains::wahl_params(chain.entries()).unwrap();
        prop_assert_eq!((back.p, back.q), (p, q));
        prop_assert!(chain.entries().iter().all(|&b| b >= 2));
    }

    #[test]
    fn expansion_inverts_value(bs in chain_entries()) {
        let v = tchains::hj_value(&bs).unwrap();
        prop_assert_eq!(tchains::hj_expansion(&v).unwrap(), bs);
    }

    #[test]
    fn recognizers_agree(bs in chain_entries()) {
        let r = tchains::recognize(&bs);
        prop_assert_eq!(r.is_class_t(), tchains::is_class_t(&bs));
        prop_assert_eq!(r.is_class_t(), tchains::class_t_params(&bs).is_some());
    }

    #[test]
    fn derivation_rebuilds_chain(bs in class_t_chain()) {
        match tchains::recognize(&bs) {
            Recognition::BaseCase { base } => prop_assert_eq!(base, bs),
            Recognition::Derived { base, moves } => {
                let rebuilt = moves.iter().fold(base, |acc, m| m.apply(&acc));
                prop_assert_eq!(rebuilt, bs);
            }
            other => prop_assert!(false, "{:?} not recognised: {:?}", bs, other),
        }
    }

    #[test]
    fn class_t_parameters_describe_value(bs in class_t_chain()) {
        let t = tchains::class_t_params(&bs).unwrap();
        let (d, n, a) = (t.d as i64, t.n as i64, t.a as i64);
        prop_assert!(0 < a && a < n && a.gcd(&n) == 1);
        let expected = Rational::new(BigInt::from(d * n * n), BigInt::from(d * n * a - 1));
        prop_assert_eq!(tchains::hj_value(&bs).unwrap(), expected);
        // Each move adds one entry and one to Σ(b - 2); bases have Σ(b - 2) = 2.
        let excess: i64 = bs.iter().map(|&b| i64::from(b) - 2).sum();
        prop_assert_eq!(excess, bs.len() as i64 - d + 2);
    }

    #[test]
    fn discrepancies_in_unit_interval(bs in class_t_chain()) {
        let chain = TChain::new(bs).unwrap();
        for d in contraction::discrepancies(&chain).unwrap() {
            prop_assert!(d > Rational::zero() && d < Rational::one());
        }
    }

    #[test]
    fn discrepancies_solve_adjunction(bs in chain_entries()) {
        let chain = TChain::new(bs.clone()).unwrap();
        let ds = contraction::discrepancies(&chain).unwrap();
        let m = chain.intersection_matrix();
        for (j, &b) in bs.iter().enumerate() {
            let lhs: Rational = ds.iter().zip(&m).map(|(d, row)| d * Rational::from_integer(row[j].clone())).sum();
            prop_assert_eq!(lhs, rational::int(2 - i64::from(b)));
        }
    }

    #[test]
    fn chain_form_is_negative_definite(bs in chain_entries()) {
        let chain = TChain::new(bs.clone()).unwrap();
        let minors = linalg::leading_minors(&chain.intersection_matrix()).unwrap();
        for (i, m) in minors.iter().enumerate() {
            let sign_ok = if i % 2 == 0 { m < &BigInt::zero() } else { m > &BigInt::zero() };
            prop_assert!(sign_ok, "minor {} of {:?} is {}", i + 1, bs, m);
        }
        let det = linalg::determinant(&chain.intersection_matrix()).unwrap();
        let cont = tchains::continuant(&bs);
        prop_assert!(det == cont || det == -cont.clone());
    }

    #[test]
    fn wahl_determinant_is_p_squared((p, q) in coprime_pair(400)) {
        let chain = tchains::hj_expand(p, q).unwrap();
        let det = linalg::determinant(&chain.intersection_matrix()).unwrap();
        let square = BigInt::from(p * p);
        prop_assert!(det == square || det == -square);
    }
}

fn orders_graph() -> impl Strategy<Value = (Vec<(String, BigInt)>, Vec<GraphEdge>)> {
    (2usize..6).prop_flat_map(|n| {
        let nodes = prop::collection::vec(1u64..400, n);
        let edges = prop::collection::vec((0..n, 0..n, 1u64..30, 1u64..30), 0..8);
        (nodes, edges).prop_map(|(orders, raw)| {
            let nodes: Vec<(String, BigInt)> =
                orders.into_iter().enumerate().map(|(i, o)| (format!("n{i}"), BigInt::from(o))).collect();
            let edges = raw
                .into_iter()
                .filter(|(a, b, _, _)| a != b)
                .map(|(a, b, wa, wb)| GraphEdge {
                    a: format!("n{a}"),
                    b: format!("n{b}"),
                    power_a: wa,
                    power_b: wb,
                    via: None,
                })
                .collect();
            (nodes, edges)
        })
    })
}

proptest! {
    #[test]
    fn closure_fixpoint_ignores_edge_order((nodes, edges) in orders_graph(), seed in any::<u64>()) {
        let forward: Vec<usize> = (0..edges.len()).collect();
        let mut shuffled = forward.clone();
        // A fixed permutation derived from the seed.
        shuffled.sort_by_key(|&i| (i as u64).wrapping_mul(seed | 1).rotate_left(17));
        let a = topology::gcd_closure(&nodes, &edges, &forward).unwrap();
        let b = topology::gcd_closure(&nodes, &edges, &shuffled).unwrap();
        prop_assert_eq!(&a.orders, &b.orders);
        prop_assert_eq!(a.trivial, b.trivial);
    }

    #[test]
    fn closure_steps_only_shrink((nodes, edges) in orders_graph()) {
        let order: Vec<usize> = (0..edges.len()).collect();
        let r = topology::gcd_closure(&nodes, &edges, &order).unwrap();
        for step in &r.log {
            let (from, to): (BigInt, BigInt) = (step.from.parse().unwrap(), step.to.parse().unwrap());
            prop_assert!(to < from && from.is_multiple_of(&to));
        }
        for (name, start) in &nodes {
            let end: BigInt = r.orders[name].parse().unwrap();
            prop_assert!(start.is_multiple_of(&end));
        }
    }

    #[test]
    fn blowdown_invariants_follow_lengths(n in 0usize..40, lengths in prop::collection::vec(1usize..8, 0..5)) {
        let removed: usize = lengths.iter().sum();
        prop_assume!(removed <= n);
        let spec = BlowdownSpec {
            surface: SurfaceSummary::rational(n),
            configurations: lengths
                .iter()
                .enumerate()
                .map(|(i, &length)| Configuration { name: format!("c{i}"), p: 2, q: 1, length })
                .collect(),
            graph: None,
            parity: Parity::Odd,
        };
        let (n, k) = (n as i64, removed as i64);
        match topology::blowdown_invariants(&spec) {
            Ok(r) => {
                prop_assert_eq!(r.e, 3 + n - k);
                prop_assert_eq!(r.sigma, 1 - n + k);
                prop_assert_eq!(r.b2_plus, 1);
                prop_assert_eq!(r.b2_minus, n - k);
                prop_assert_eq!(r.k_squared, 9 - n + k);
                prop_assert_eq!(r.k_squared + r.e, 12 * r.chi);
                prop_assert_eq!(r.fingerprint, None, "fingerprint needs a π1 verdict");
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn blow_ups_update_the_lattice(mults in prop::collection::vec((0u32..3, 0u32..3), 1..8)) {
        let mut model = SurfaceModel::new_plane([
            ("L", DivisorClass::hyperplane(1)),
            ("C", DivisorClass::from_ints(&[2])),
        ]).unwrap();
        for (ml, mc) in mults {
            let incidences: Vec<(&str, u32)> =
                [("L", ml), ("C", mc)].into_iter().filter(|(_, m)| *m > 0).collect();
            let before = model.clone();
            model = model.blow_up(&BlowupStep::new(incidences)).unwrap();
            prop_assert_eq!(model.rank(), before.rank() + 1);
            let k2 = |m: &SurfaceModel| m.canonical().square();
            prop_assert_eq!(k2(&model), k2(&before) - rational::int(1));
            for (name, m) in [("L", ml), ("C", mc)] {
                let drop = rational::int(i64::from(m * m));
                prop_assert_eq!(model.self_intersection(name).unwrap(), before.self_intersection(name).unwrap() - drop);
            }
            let lc = |m: &SurfaceModel| m.intersect_curves("L", "C").unwrap();
            prop_assert_eq!(lc(&model), lc(&before) - rational::int(i64::from(ml * mc)));
        }
    }
}
