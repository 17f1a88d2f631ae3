use heightforge::arith::{
    format_rational, log_abs, newton_polygon, padic_valuation, parse_rational, support, valuation_or_inf, LocalValue, Place,
    Rational,
};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

fn nonzero() -> impl Strategy<Value = Rational> {
    (1i64..=100_000, 1i64..=100_000, any::<bool>())
        .prop_map(|(a, b, neg)| Rational::new(BigInt::from(if neg { -a } else { a }), BigInt::from(b)))
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 97, 101];

proptest! {
    #[test]
    fn valuation_is_additive(a in nonzero(), b in nonzero(), i in 0usize..PRIMES.len()) {
        let p = PRIMES[i];
        let vab = padic_valuation(&(&a * &b), p).unwrap();
        prop_assert_eq!(vab, padic_valuation(&a, p).unwrap() + padic_valuation(&b, p).unwrap());
    }

    #[test]
    fn product_formula(q in nonzero()) {
        // |q| = prod p^{v_p(q)} is the exact form of log|q| + sum log|q|_p = 0
        let mut prod = Rational::one();
        for v in support(&q).unwrap() {
            let Place::Finite(p) = v else { continue };
            match log_abs(&q, v).unwrap() {
                LocalValue::Exact { coeff, prime } => {
                    prop_assert_eq!(prime, p);
                    prop_assert!(coeff.is_integer());
                    prod *= Rational::from_integer(BigInt::from(p)).pow(-coeff.to_integer().try_into().unwrap_or(0i32));
                }
                other => prop_assert!(false, "inexact finite value {other:?}"),
            }
        }
        prop_assert_eq!(prod, q.abs());
    }

    #[test]
    fn newton_slopes_sum_to_valuation_drop(
        coeffs in proptest::collection::vec(-2000i64..=2000, 2..8),
        i in 0usize..4,
    ) {
        let p = PRIMES[i];
        let c: Vec<Rational> = coeffs.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
        let vals: Vec<Option<i64>> = c.iter().map(|x| valuation_or_inf(x, p)).collect();
        let nonzero: Vec<i64> = vals.iter().flatten().copied().collect();
        prop_assume!(nonzero.len() >= 2);
        let segs = newton_polygon(&vals).unwrap();
        let total: Rational = segs
            .iter()
            .map(|s| &s.slope * Rational::from_integer(BigInt::from(s.multiplicity)))
            .sum();
        let first = nonzero[0];
        let last = *nonzero.last().unwrap();
        prop_assert_eq!(total, Rational::from_integer(BigInt::from(last - first)));
        let first_idx = vals.iter().position(|v| v.is_some()).unwrap();
        let last_idx = vals.iter().rposition(|v| v.is_some()).unwrap();
        let mult: usize = segs.iter().map(|s| s.multiplicity).sum();
        prop_assert_eq!(mult, last_idx - first_idx);
        for w in segs.windows(2) {
            prop_assert!(w[0].slope < w[1].slope);
        }
    }

    #[test]
    fn rational_text_round_trip(q in nonzero()) {
        let s = format_rational(&q);
        prop_assert_eq!(parse_rational(&s).unwrap(), q.clone());
        prop_assert!(q.denom().is_positive());
    }
}
