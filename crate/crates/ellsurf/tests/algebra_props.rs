use ellsurf::algebra::{
    factor, factor_by_trial_division, parse_poly, parse_ratfunc, power_class_index, valuation, Place, Poly, PowerClass,
    RatFunc,
};
use proptest::prelude::*;

const PRIMES: [u32; 4] = [2, 3, 5, 7];

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..7, 1..=max_deg + 1)
}

fn nonzero(p: u32, c: &[i64]) -> Poly {
    let f = Poly::from_coeffs(p, c);
    if f.is_zero() {
        Poly::one(p)
    } else {
        f
    }
}

/// All places where `x` has a zero or pole, with infinity.
fn support(x: &RatFunc) -> Vec<Place> {
    let mut places = vec![Place::infinity()];
    for part in [x.num(), x.den()] {
        if !part.is_constant() {
            for (f, _) in factor(part).unwrap().factors {
                places.push(Place::finite(f).unwrap());
            }
        }
    }
    places
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factorization_of_products_is_the_union(a in poly_strategy(10), b in poly_strategy(10)) {
        for p in PRIMES {
            let (f, g) = (nonzero(p, &a), nonzero(p, &b));
            let ff = factor(&f).unwrap();
            let fg = factor(&g).unwrap();
            let prod = factor(&(&f * &g)).unwrap();
            prop_assert_eq!(&prod, &ff.merge(&fg, p));
            prop_assert_eq!(prod.expand(p), &f * &g);
            prop_assert!(prod.factors.iter().all(|(h, _)| h.is_monic()));
        }
    }

    #[test]
    fn fast_factorization_matches_trial_division(a in poly_strategy(9)) {
        for p in PRIMES {
            let f = nonzero(p, &a);
            prop_assert_eq!(factor(&f).unwrap(), factor_by_trial_division(&f).unwrap());
        }
    }

    #[test]
    fn valuations_add_and_obey_the_product_formula(a in poly_strategy(6), b in poly_strategy(6), c in poly_strategy(6)) {
        for p in PRIMES {
            let x = RatFunc::new(nonzero(p, &a), nonzero(p, &b)).unwrap();
            let y = RatFunc::from_poly(nonzero(p, &c));
            let xy = &x * &y;
            let mut total = 0i64;
            for v in support(&xy) {
                let vx = valuation(&x, &v).unwrap();
                let vy = valuation(&y, &v).unwrap();
                prop_assert_eq!(valuation(&xy, &v).unwrap(), vx + vy);
            }
            for v in support(&x) {
                total += valuation(&x, &v).unwrap() * v.degree() as i64;
            }
            prop_assert_eq!(total, 0);
        }
    }

    #[test]
    fn kth_powers_are_trivial(a in poly_strategy(4), b in poly_strategy(3), k in 1u32..5) {
        for p in PRIMES {
            let x = RatFunc::new(nonzero(p, &a), nonzero(p, &b)).unwrap();
            prop_assert_eq!(power_class_index(&x.pow(k as i64).unwrap(), k).unwrap(), PowerClass::Trivial);
            prop_assert_eq!(power_class_index(&x, 1).unwrap(), PowerClass::Trivial);
        }
    }
}

#[test]
fn power_class_examples() {
    let t = RatFunc::from_poly(Poly::t(7));
    assert_eq!(power_class_index(&t, 2).unwrap(), PowerClass::Nontrivial);
    // 3 is not a 6th power in GF(7)
    assert_eq!(power_class_index(&RatFunc::constant(7, 3), 6).unwrap(), PowerClass::Nontrivial);
    assert_eq!(power_class_index(&RatFunc::constant(7, 1), 6).unwrap(), PowerClass::Trivial);
    assert_eq!(power_class_index(&RatFunc::constant(3, 2), 2).unwrap(), PowerClass::Nontrivial);
    assert_eq!(power_class_index(&RatFunc::constant(5, 4), 2).unwrap(), PowerClass::Trivial);
}

#[test]
fn parse_errors_carry_offsets() {
    let err = parse_poly("t^2 + * 3", 5).unwrap_err();
    assert_eq!(err.offset, 6);
    assert!(parse_ratfunc("1/0", 5).is_err());
    assert_eq!(parse_poly("(t+1)^2", 2).unwrap(), Poly::from_coeffs(2, &[1, 0, 1]));
}
