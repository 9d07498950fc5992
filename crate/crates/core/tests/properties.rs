use std::collections::BTreeMap;

use num_traits::Signed;
use proptest::prelude::*;

use mvdelta::carriers::{Carrier, Value};
use mvdelta::decide::{decide, sample_falsify, DecideConfig};
use mvdelta::gammaxi::{enumerate_good_sequences, gs_add, gs_leq, is_good, GoodSeq};
use mvdelta::plfunc::{
    pl_delta, pl_op, pl_precompose, pl_scale, pl_scale_dyadic, uniform_dist, FnSeq, PLFunc, PlOp,
};
use mvdelta::term::EvSeq;
use mvdelta::{evaluate, parse, Equation, MvAlgebra, Q01, Rat, Term, UnitInterval};

fn q01() -> impl Strategy<Value = Q01> {
    (0i64..=12, 1i64..=12).prop_map(|(a, b)| Q01::new(a.min(b), b))
}

fn dyadic() -> impl Strategy<Value = Q01> {
    (0u64..=16).prop_map(|k| Q01::dyadic(k, 4))
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        q01().prop_map(Term::Const),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::neg),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::oplus(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::odot(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::ominus(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::dist(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::join(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::meet(l, r)),
            inner.clone().prop_map(Term::half),
            (1u32..=3, inner.clone()).prop_map(|(n, t)| Term::halfn(n, t)),
            (1u32..=3, inner.clone()).prop_map(|(n, t)| Term::nfold(n, t)),
            (prop::collection::vec(inner.clone(), 0..3), inner)
                .prop_map(|(p, t)| Term::Delta(EvSeq::new(p, t))),
        ]
    })
}

fn plfunc() -> impl Strategy<Value = PLFunc> {
    (prop::collection::btree_set(1u32..8, 0..4), prop::collection::vec(0u32..=6, 5))
        .prop_map(|(xs, ys)| {
            let mut grid = vec![0u32];
            grid.extend(xs);
            grid.push(8);
            let points = grid
                .iter()
                .zip(ys.iter().cycle())
                .map(|(x, y)| {
                    (
                        Q01::try_from_rat(Rat::new((*x).into(), 8.into())).unwrap(),
                        Q01::try_from_rat(Rat::new((*y).into(), 6.into())).unwrap(),
                    )
                })
                .collect();
            PLFunc::new(points).unwrap()
        })
}

fn env(x: Q01, y: Q01, z: Q01) -> BTreeMap<String, Q01> {
    [("x", x), ("y", y), ("z", z)].into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_then_parsing_is_identity(t in term()) {
        prop_assert_eq!(parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn expansion_preserves_value(t in term(), x in q01(), y in q01(), z in q01()) {
        let e = env(x, y, z);
        prop_assert_eq!(evaluate(&t, &e, &UnitInterval).unwrap(), evaluate(&t.expand(), &e, &UnitInterval).unwrap());
    }

    #[test]
    fn mv_axioms_on_rationals(x in q01(), y in q01(), z in q01()) {
        let i = UnitInterval;
        prop_assert_eq!(i.oplus(&x, &i.oplus(&y, &z)), i.oplus(&i.oplus(&x, &y), &z));
        prop_assert_eq!(i.oplus(&x, &y), i.oplus(&y, &x));
        prop_assert_eq!(i.oplus(&x, &i.zero()), x.clone());
        prop_assert_eq!(i.neg(&i.neg(&x)), x.clone());
        prop_assert_eq!(i.oplus(&x, &i.one()), i.one());
        prop_assert_eq!(i.join(&x, &y), i.join(&y, &x));
        prop_assert_eq!(i.dist(&x, &y), Q01::try_from_rat((x.as_rat() - y.as_rat()).abs()).unwrap());
    }

    #[test]
    fn decider_agrees_with_sampling(l in term(), r in term()) {
        let eq = Equation::leq(l, r);
        match decide(&eq, DecideConfig::default()) {
            v if v.is_valid() => prop_assert!(sample_falsify(&eq, 200, 5, 6).is_none()),
            v => {
                if let Some(cx) = v.counterexample() {
                    // decide() already replays the witness; check it again here
                    let lhs = evaluate(&eq.lhs, &cx.assign, &UnitInterval).unwrap();
                    let rhs = evaluate(&eq.rhs, &cx.assign, &UnitInterval).unwrap();
                    prop_assert!(!UnitInterval.leq(&lhs, &rhs));
                }
            }
        }
    }

    #[test]
    fn pl_ops_match_pointwise(f in plfunc(), g in plfunc(), k in 0i64..=24) {
        let x = Q01::new(k, 24);
        let (fx, gx) = (f.eval_q(&x), g.eval_q(&x));
        prop_assert_eq!(pl_op(PlOp::Oplus, &f, &g).eval_q(&x), fx.oplus(&gx));
        prop_assert_eq!(pl_op(PlOp::Odot, &f, &g).eval_q(&x), fx.odot(&gx));
        prop_assert_eq!(pl_op(PlOp::Dist, &f, &g).eval_q(&x), fx.dist(&gx));
        prop_assert_eq!(pl_op(PlOp::Join, &f, &g).eval_q(&x), fx.join(&gx));
        prop_assert_eq!(pl_precompose(&f, &g).eval_q(&x), f.eval_q(&gx));
    }

    #[test]
    fn pl_delta_is_pointwise_delta(fs in prop::collection::vec(plfunc(), 0..4), tail in plfunc(), k in 0i64..=24) {
        let x = Q01::new(k, 24);
        let s = FnSeq { prefix: fs.clone(), tail: tail.clone() };
        let at: Vec<Q01> = fs.iter().map(|f| f.eval_q(&x)).collect();
        prop_assert_eq!(pl_delta(&s).eval_q(&x), Q01::delta(&at, &tail.eval_q(&x)));
    }

    #[test]
    fn dyadic_scaling_paths_agree(f in plfunc(), r in dyadic()) {
        prop_assert_eq!(pl_scale_dyadic(&r, &f).unwrap(), pl_scale(&r, &f));
    }

    #[test]
    fn uniform_dist_is_a_metric(f in plfunc(), g in plfunc(), h in plfunc()) {
        let fg = uniform_dist(&f, &g);
        prop_assert_eq!(fg.clone(), uniform_dist(&g, &f));
        prop_assert_eq!(uniform_dist(&f, &f), Q01::zero());
        let sum = uniform_dist(&f, &h).as_rat() + uniform_dist(&h, &g).as_rat();
        prop_assert!(fg.as_rat() <= &sum);
    }

    #[test]
    fn canonical_form_is_unique(f in plfunc()) {
        // re-inserting a collinear midpoint does not change the canonical form
        let pts = f.points();
        let (a, b) = (&pts[0], &pts[1]);
        let mid_x = Q01::try_from_rat((a.0.as_rat() + b.0.as_rat()) / Rat::from_integer(2.into())).unwrap();
        let mut with_mid = pts.to_vec();
        with_mid.insert(1, (mid_x.clone(), f.eval_q(&mid_x)));
        prop_assert_eq!(PLFunc::new(with_mid).unwrap(), f);
    }
}

fn good_seqs(n: u32) -> Vec<GoodSeq> {
    enumerate_good_sequences(&Carrier::Chain(n), 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn good_sequence_monoid_laws(n in 1u32..=5, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let all = good_seqs(n);
        let (a, b, c) = (i.get(&all), j.get(&all), k.get(&all));
        let c_ = Carrier::Chain(n);
        let ab = gs_add(a, b).unwrap();
        prop_assert!(is_good(&c_, ab.entries()).is_ok());
        prop_assert_eq!(ab.clone(), gs_add(b, a).unwrap());
        prop_assert_eq!(gs_add(&ab, c).unwrap(), gs_add(a, &gs_add(b, c).unwrap()).unwrap());
        prop_assert_eq!(gs_add(a, &GoodSeq::zero(&c_)).unwrap(), a.clone());
        prop_assert!(gs_leq(a, &ab).unwrap());
    }

    #[test]
    fn good_sequences_over_products(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let c: Carrier = "prod(chain:2,chain:3)".parse().unwrap();
        let all = enumerate_good_sequences(&c, 2).unwrap();
        let (a, b) = (i.get(&all), j.get(&all));
        let ab = gs_add(a, b).unwrap();
        prop_assert!(is_good(&c, ab.entries()).is_ok());
        // componentwise: the sum projects to the sums of the factors
        for (factor, idx) in [(Carrier::Chain(2), 0), (Carrier::Chain(3), 1)] {
            let proj = |s: &GoodSeq| {
                let entries: Vec<Value> = s.entries().iter().map(|v| match v { Value::Tuple(vs) => vs[idx].clone(), _ => unreachable!() }).collect();
                GoodSeq::new(&factor, entries).unwrap()
            };
            prop_assert_eq!(proj(&ab), gs_add(&proj(a), &proj(b)).unwrap());
        }
    }
}
