use c2bordism_cli::expr::{parse, Expr};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::Zero),
        Just(Expr::One),
        Just(Expr::A),
        Just(Expr::U),
        (1u32..6, 0u32..4).prop_map(|(m, j)| Expr::RPs(m, j)),
        (1u32..6, 0u32..4).prop_map(|(i, j)| Expr::D(i, j)),
        (1u32..9).prop_map(Expr::X),
    ]
}

fn ast() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Gamma(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::Add(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::Mul(Box::new(l), Box::new(r))),
            (inner, 0u32..5).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parse_inverts_render(e in ast()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e);
    }

    #[test]
    fn parse_ignores_whitespace(e in ast()) {
        let text = e.to_string();
        let spaced: String = text.chars().flat_map(|c| [c, ' ']).collect();
        // Spacing inside identifiers or numbers would change the tokens.
        let spaced = spaced.replace("R P s", "RPs").replace("G a m m a", "Gamma");
        prop_assert_eq!(parse(&spaced).unwrap(), e);
    }
}
