use std::collections::BTreeMap;
use std::sync::Arc;

use c2bordism_core::kernel::{
    graded_quotient_dim, invert_f, monomials_of_degree, F2Poly, Monomial, PowerSeries, TruncCtx,
    VarTable,
};
use proptest::prelude::*;

fn table() -> Arc<VarTable> {
    VarTable::from_ring_vars([("p", 1), ("q", 2), ("r", 3), ("s", 1)])
        .unwrap()
        .into_arc()
}

fn poly_strategy() -> impl Strategy<Value = F2Poly> {
    prop::collection::vec(prop::collection::vec(0u32..3, 4), 0..6).prop_map(|terms| {
        let v = table();
        let mut p = F2Poly::zero(&v);
        for exps in terms {
            p.toggle(Monomial::from_pairs(exps.into_iter().enumerate()));
        }
        p
    })
}

proptest! {
    #[test]
    fn ring_laws(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        let t = TruncCtx::unbounded();
        prop_assert_eq!(a.mul(&b, t).unwrap(), b.mul(&a, t).unwrap());
        prop_assert_eq!(
            a.mul(&b, t).unwrap().mul(&c, t).unwrap(),
            a.mul(&b.mul(&c, t).unwrap(), t).unwrap()
        );
        prop_assert_eq!(a.mul(&(&b + &c), t).unwrap(), &a.mul(&b, t).unwrap() + &a.mul(&c, t).unwrap());
        prop_assert!((&a + &a).is_zero());
    }

    #[test]
    fn truncated_product_is_truncation_of_product(a in poly_strategy(), b in poly_strategy(), n in 0i64..8) {
        let t = TruncCtx::new(n);
        prop_assert_eq!(a.mul(&b, t).unwrap(), a.mul(&b, TruncCtx::unbounded()).unwrap().truncate(t));
    }

    #[test]
    fn render_parse_round_trip(a in poly_strategy()) {
        let text = a.to_string();
        prop_assert_eq!(F2Poly::parse(&text, a.vars()).unwrap(), a);
    }

    #[test]
    fn frobenius(a in poly_strategy()) {
        let t = TruncCtx::unbounded();
        let sq = F2Poly::from_monomials(a.vars(), a.monomials().map(|m| m.mul(m)));
        prop_assert_eq!(a.mul(&a, t).unwrap(), sq);
    }

    #[test]
    fn reversion_inverts(c2 in poly_strategy(), c3 in poly_strategy(), c4 in poly_strategy()) {
        let v = table();
        let f = PowerSeries::new(&v, vec![F2Poly::zero(&v), F2Poly::one(&v), c2, c3, c4]).unwrap();
        let t = TruncCtx::unbounded();
        let g = f.reversion(t).unwrap();
        let fg = f.compose(&g, t).unwrap();
        let gf = g.compose(&f, t).unwrap();
        prop_assert_eq!(fg, PowerSeries::identity(&v, 4));
        prop_assert_eq!(gf, PowerSeries::identity(&v, 4));
    }

    #[test]
    fn quotient_dim_shrinks_with_more_relations(
        rels in prop::collection::vec(poly_strategy(), 0..3),
        extra in poly_strategy(),
        n in 0i64..5,
    ) {
        let v = table();
        let gens: Vec<usize> = (0..v.len()).collect();
        let homog = |p: &F2Poly| p.homogeneous_component(2);
        let base: Vec<F2Poly> = rels.iter().map(homog).collect();
        let mut more = base.clone();
        more.push(homog(&extra));
        let d0 = graded_quotient_dim(&v, &gens, &base, n).unwrap();
        let d1 = graded_quotient_dim(&v, &gens, &more, n).unwrap();
        prop_assert!(d1 <= d0);
        prop_assert!(d0 <= monomials_of_degree(&v, &gens, n).len());
    }
}

#[test]
fn inverse_of_a_deformed_law_multiplies_back_to_one() {
    let v = table();
    let mut f = BTreeMap::new();
    f.insert((1, 0), F2Poly::one(&v));
    f.insert((0, 1), F2Poly::one(&v));
    f.insert((1, 1), F2Poly::parse("p", &v).unwrap());
    f.insert((2, 1), F2Poly::parse("q + p^2", &v).unwrap());
    f.insert((1, 2), F2Poly::parse("q", &v).unwrap());
    // invert_f performs the product check itself and errors on any mismatch.
    let inv = invert_f(&v, &f, 5, 3, (-4, 3), TruncCtx::new(5)).unwrap();
    for i in 0..=3 {
        assert!(inv.coeff(i, -(i as i32) - 1).unwrap().is_one());
    }
}

#[test]
fn quotient_by_a_variable() {
    let v = table();
    let gens: Vec<usize> = (0..v.len()).collect();
    let p = F2Poly::var(&v, 0);
    // Killing p leaves monomials in q, r, s.
    let full = monomials_of_degree(&v, &gens, 3).len();
    let without_p = monomials_of_degree(&v, &[1, 2, 3], 3).len();
    assert_eq!(graded_quotient_dim(&v, &gens, &[p], 3).unwrap(), without_p);
    assert!(without_p < full);
}
