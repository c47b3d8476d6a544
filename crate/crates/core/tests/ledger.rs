use mtensor::ledger::{build_tensor, parse_transactions_csv, write_transactions_csv, Taxonomy, Transaction};
use mtensor::{rank1_approx, AlsConfig, Error};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn taxonomy() -> Taxonomy {
    Taxonomy::new(labels("s", 5), labels("a", 4), labels("q", 6)).unwrap()
}

fn random_txns(rng: &mut ChaCha8Rng, n: usize) -> Vec<Transaction> {
    (0..n)
        .map(|_| {
            let amount = 10f64.powf(rng.gen_range(-2.0..6.0));
            Transaction::new(
                amount,
                format!("s{}", rng.gen_range(0..5)),
                format!("a{}", rng.gen_range(0..4)),
                format!("q{}", rng.gen_range(0..6)),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn ten_thousand_transactions_conserve_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let txns = random_txns(&mut rng, 10_000);
    let t = build_tensor(&txns, &taxonomy()).unwrap();
    let expected: f64 = txns.iter().map(|t| t.amount).sum();
    assert!((t.sum() - expected).abs() <= 1e-9 * expected);

    let mut shuffled = txns.clone();
    shuffled.shuffle(&mut rng);
    let u = build_tensor(&shuffled, &taxonomy()).unwrap();
    assert!(t.values().iter().zip(u.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn hundred_dollar_healthcare_purchase() {
    let csv = "amount,sector,agent,period\n100,healthcare,household,2021Q1\n";
    let tax = Taxonomy::new(
        vec!["manufacturing".into(), "healthcare".into(), "energy".into()],
        vec!["household".into(), "firm".into()],
        vec!["2020Q4".into(), "2021Q1".into()],
    )
    .unwrap();
    let t = build_tensor(&parse_transactions_csv(csv.as_bytes()).unwrap(), &tax).unwrap();
    assert_eq!(t.get(1, 0, 1), 100.0);
    assert_eq!(t.sum(), 100.0);
    let fit = rank1_approx(&t, &AlsConfig::default());
    assert_eq!(fit.factors.weight, 100.0);
    assert_eq!(fit.residual, 0.0);
    assert_eq!(fit.factors.x, vec![0.0, 1.0, 0.0]);
    assert_eq!(fit.factors.y, vec![1.0, 0.0]);
    assert_eq!(fit.factors.z, vec![0.0, 1.0]);
}

#[test]
fn first_bad_transaction_is_reported() {
    let txns = vec![
        Transaction::new(1.0, "s0", "a0", "q0").unwrap(),
        Transaction::new(2.0, "s9", "a0", "q0").unwrap(),
        Transaction::new(3.0, "s0", "zz", "q0").unwrap(),
    ];
    match build_tensor(&txns, &taxonomy()).unwrap_err() {
        Error::Transaction { index, source } => {
            assert_eq!(index, 1);
            assert!(source.to_string().contains("s9"));
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn csv_errors_carry_line_numbers() {
    let bad = "amount,sector,agent,period\n1,s0,a0,q0\n1e3,s0,a0,q0\n";
    assert!(matches!(parse_transactions_csv(bad.as_bytes()), Err(Error::Parse { line: 3, .. })));
    let neg = "amount,sector,agent,period\n1,s0,a0,q0\n2,s0,a0,q0\n-5,s0,a0,q0\n";
    assert!(matches!(parse_transactions_csv(neg.as_bytes()), Err(Error::Validation { line: 4, .. })));
    assert!(matches!(parse_transactions_csv(b"amt,sector,agent,period\n"), Err(Error::Parse { line: 1, .. })));
}

fn label() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9 ,\"]{0,6}[a-z0-9]"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_is_conserved_and_order_free(seed in any::<u64>(), n in 0usize..2000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let txns = random_txns(&mut rng, n);
        let t = build_tensor(&txns, &taxonomy()).unwrap();
        let expected: f64 = txns.iter().map(|t| t.amount).sum();
        prop_assert!((t.sum() - expected).abs() <= 1e-9 * expected.max(1.0));
        let mut rev = txns.clone();
        rev.reverse();
        let u = build_tensor(&rev, &taxonomy()).unwrap();
        prop_assert_eq!(t, u);
    }

    #[test]
    fn csv_round_trips(rows in prop::collection::vec((1e-6f64..1e12, label(), label(), label()), 0..40)) {
        let txns: Vec<Transaction> = rows.into_iter().map(|(a, s, g, p)| Transaction::new(a, s, g, p).unwrap()).collect();
        let text = write_transactions_csv(&txns);
        prop_assert_eq!(parse_transactions_csv(text.as_bytes()).unwrap(), txns);
    }
}
