use proptest::prelude::*;

use qnahm::bailey::{lift_param, random_pair, reduce_param, s1_transform, verify_bailey};
use qnahm::cartan::{tilde_a, RationalMatrix};
use qnahm::dsl::{load_spec, parse_spec};
use qnahm::nahm::{nahm_sum, nahm_sum_parity_pair, NahmSpec};
use qnahm::qseries::{
    pochhammer_finite, pochhammer_infinite, theta_sum, verify_jtp, FactorSpec, QSeries, ThetaSpec, XSeries,
};
use qnahm::rational::{int, rat, Rational};

fn series(terms: Vec<(i64, i64)>, half: bool, trunc: i64) -> QSeries {
    let d = if half { 2 } else { 1 };
    QSeries::from_terms(terms.into_iter().map(|(e, c)| (rat(e, d), int(c))), Some(&int(trunc)))
}

fn arb_series() -> impl Strategy<Value = QSeries> {
    (prop::collection::vec((0i64..40, -5i64..=5), 0..12), any::<bool>()).prop_map(|(t, h)| series(t, h, 20))
}

fn arb_unit_series() -> impl Strategy<Value = QSeries> {
    (prop::collection::vec((1i64..40, -5i64..=5), 0..12), any::<bool>(), prop::sample::select(vec![-3i64, -1, 1, 2, 5]))
        .prop_map(|(mut t, h, c0)| {
            t.push((0, c0));
            series(t, h, 20)
        })
}

/// Same coefficients and same truncation.
fn identical(a: &QSeries, b: &QSeries) -> bool {
    a == b && a.trunc() == b.trunc()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert!(identical(&(&(&a + &b) + &c), &(&a + &(&b + &c))));
        // a product's known precision depends on the valuations of its
        // factors, so the two sides may carry different truncations
        let (l, r) = (&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!(l == r);
        prop_assert!(l.trunc().unwrap() >= int(20) && r.trunc().unwrap() >= int(20));
        prop_assert!(identical(&(&a * &b), &(&b * &a)));
        prop_assert!(identical(&(&a - &a), &QSeries::zero().truncated(&int(20))));
    }

    #[test]
    fn inverse_is_two_sided(a in arb_unit_series()) {
        let inv = a.inverse().unwrap();
        let one = QSeries::one().truncated(&int(20));
        prop_assert!(identical(&(&a * &inv), &one));
        prop_assert!(identical(&inv.inverse().unwrap(), &a));
    }

    #[test]
    fn rescale_keeps_equality(a in arb_series(), m in 1i64..6) {
        let r = a.rescale(a.scale() * m).unwrap();
        prop_assert_eq!(r.scale(), a.scale() * m);
        prop_assert!(identical(&r, &a));
    }

    #[test]
    fn monotone_truncation_of_products(a in arb_series(), b in arb_series(), t in 1i64..20) {
        let t = int(t);
        let full = &a * &b;
        let cut = &a.truncated(&t) * &b.truncated(&t);
        prop_assert!(identical(&full.truncated(&t), &cut.truncated(&t)));
    }

    #[test]
    fn pochhammer_finite_peels_one_factor(
        sign in prop::sample::select(vec![-1i8, 1]),
        e in 0i64..6, m in 1i64..4, x in -2i64..=2, n in 0usize..8, half in any::<bool>(),
    ) {
        let d = if half { 2 } else { 1 };
        let f = FactorSpec::new(sign, rat(e, d), int(m), x);
        let exp = rat(e, d) + int(m * n as i64);
        let factor = &XSeries::one() - &XSeries::monomial(int(sign as i64), x, &exp);
        prop_assert_eq!(pochhammer_finite(&f, n + 1), &pochhammer_finite(&f, n) * &factor);
    }

    #[test]
    fn pochhammer_infinite_is_a_long_finite_product(
        sign in prop::sample::select(vec![-1i8, 1]),
        e in 1i64..6, m in 1i64..4, x in -1i64..=1, tn in 1i64..25,
    ) {
        let f = FactorSpec::new(sign, int(e), int(m), x);
        let t = int(tn);
        let inf = pochhammer_infinite(&f, &t).unwrap();
        // the factor at index M has exponent e + M·m ≥ t
        let big_m = ((tn - e).max(0) as usize).div_ceil(m as usize) + 1;
        let fin = pochhammer_finite(&f, big_m).truncated(&t);
        prop_assert_eq!(inf.trunc(), Some(t));
        prop_assert_eq!(inf, fin);
    }

    #[test]
    fn theta_is_linear_in_the_weight(q in 1i64..5, l in -4i64..=4, c in 0i64..3, xl in -1i64..=1, t in 5i64..30) {
        let base = ThetaSpec::plain(rat(q, 2), rat(l, 2), int(c)).with_x(xl, 0);
        let t = int(t);
        let w = |c0: i64, c1: i64| theta_sum(&base.clone().with_weight(int(c0), int(c1)), &t).unwrap();
        let sum = &w(1, 0) + &(&w(0, 1) + &w(0, 1));
        prop_assert_eq!(w(1, 2), sum);
    }

    #[test]
    fn jtp_with_x_shifts(x in 1i64..=3, t in 1i64..=60) {
        prop_assert!(verify_jtp(x, &int(t)).unwrap().matches());
    }

    #[test]
    fn tilde_a_boundary(k in 2usize..=8, p in -20i64..=20, q in 1i64..=12) {
        let bound = rat(k as i64 - 1, 2);
        let a = &bound + rat(p, q);
        prop_assert_eq!(tilde_a(k, &a).unwrap().is_positive_definite(), a > bound);
    }
}

/// Diagonally dominant with margin one, so `½nᵀAn ≥ ½|n|²`.
fn arb_dominant(k: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(-1i64..=1, k * (k - 1) / 2).prop_flat_map(move |off| {
        prop::collection::vec(0i64..=2, k).prop_map(move |extra| {
            let mut m = vec![vec![0i64; k]; k];
            let mut it = off.iter();
            for i in 0..k {
                for j in i + 1..k {
                    let v = *it.next().unwrap();
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            for i in 0..k {
                let row: i64 = (0..k).filter(|&j| j != i).map(|j| m[i][j].abs()).sum();
                m[i][i] = row + 1 + extra[i];
            }
            RationalMatrix::from_rows(m.into_iter().map(|r| r.into_iter().map(int).collect()).collect()).unwrap()
        })
    })
}

/// Independent box enumeration: every `n` with `0 ≤ n_i ≤ N`, `N` large
/// enough that `½n² + bn ≥ trunc` past it.
fn box_sum(a: &RationalMatrix, b: &[i64], w: &[i64], trunc: i64) -> XSeries {
    let k = a.dim();
    let bmax = b.iter().map(|x| x.abs()).max().unwrap_or(0);
    let n_box = 2 * bmax + ((2 * trunc + 4 * bmax * bmax) as f64).sqrt().ceil() as i64 + 2;
    let t = int(trunc);
    let mut acc = XSeries::zero().truncated(&t);
    let mut n = vec![0i64; k];
    loop {
        let e = a.quad_form(&n) / int(2) + int(n.iter().zip(b).map(|(x, y)| x * y).sum());
        if e < t {
            let room = &t - &e;
            let mut p = QSeries::one().truncated(&room);
            for &ni in &n {
                for j in 1..=ni {
                    p = &p * &QSeries::from_terms([(int(0), int(1)), (int(j), int(-1))], None);
                }
            }
            let term = p.inverse().unwrap().shift(&e);
            let xd: i64 = n.iter().zip(w).map(|(x, y)| x * y).sum();
            acc = &acc + &XSeries::from_members([(xd, term)], Some(&t));
        }
        let mut i = 0;
        loop {
            if i == k {
                return acc;
            }
            n[i] += 1;
            if n[i] <= n_box {
                break;
            }
            n[i] = 0;
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumeration_is_exhaustive(
        (a, b, w) in (1usize..=3).prop_flat_map(|k| (
            arb_dominant(k),
            prop::collection::vec(-2i64..=2, k),
            prop::collection::vec(-1i64..=2, k),
        )),
        t in 1i64..=12,
    ) {
        let spec = NahmSpec::new(a.clone()).unwrap()
            .with_b(b.iter().map(|&x| int(x)).collect()).unwrap()
            .with_xweight(w.clone()).unwrap();
        let got = nahm_sum(&spec, &int(t));
        prop_assert_eq!(got.trunc(), Some(int(t)));
        prop_assert_eq!(got, box_sum(&a, &b, &w, t));
    }

    #[test]
    fn parity_classes_add_up(
        (a, b) in (2usize..=3).prop_flat_map(|k| (arb_dominant(k), prop::collection::vec(0i64..=2, k))),
        t in 1i64..=15, r in 0u8..2,
    ) {
        let k = a.dim();
        let spec = NahmSpec::new(a).unwrap().with_b(b.into_iter().map(int).collect()).unwrap()
            .with_xweight((0..k as i64).collect()).unwrap();
        let t = int(t);
        let (even, odd) = nahm_sum_parity_pair(&spec, 1, k, &t).unwrap();
        prop_assert_eq!(&(&even + &odd), &nahm_sum(&spec, &t));
        let filtered = nahm_sum(&spec.clone().with_parity(1, k, r).unwrap(), &t);
        prop_assert_eq!(filtered, if r == 0 { even } else { odd });
    }

    #[test]
    fn nahm_sum_truncation_is_monotone(a in arb_dominant(2), t1 in 1i64..=10, dt in 0i64..=10) {
        let spec = NahmSpec::new(a).unwrap().with_c(rat(-1, 24));
        let lo = nahm_sum(&spec, &int(t1));
        let hi = nahm_sum(&spec, &int(t1 + dt));
        prop_assert!(lo.first_mismatch(&hi.truncated(&int(t1))).is_none());
        prop_assert_eq!(hi.truncated(&int(t1)).trunc(), lo.trunc());
    }

    #[test]
    fn bailey_transforms_keep_the_relation(seed in any::<u64>(), e in prop::sample::select(vec![rat(1, 2), int(1), rat(3, 2), int(2), int(3)])) {
        let p = random_pair(seed, e, 5, &int(14)).unwrap();
        prop_assert!(verify_bailey(&p).unwrap().is_none());
        let s = s1_transform(&p);
        prop_assert!(verify_bailey(&s).unwrap().is_none());
        let l = lift_param(&p).unwrap();
        prop_assert!(verify_bailey(&l).unwrap().is_none());
        prop_assert!(l.beta() == p.beta());
        let r = reduce_param(&p).unwrap();
        prop_assert!(verify_bailey(&r).unwrap().is_none());
        prop_assert!(r.beta() == p.beta());
    }

    #[test]
    fn matrix_inverse_roundtrip(a in (1usize..=5).prop_flat_map(arb_dominant)) {
        let inv = a.inverse().unwrap();
        prop_assert_eq!(a.mul(&inv), RationalMatrix::identity(a.dim()));
        let l = a.ldlt().unwrap();
        prop_assert_eq!(l.reconstruct(), a);
    }
}

fn arb_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![(0i64..50).prop_map(|n| n.to_string()), prop::sample::select(vec!["k".to_string(), "a".to_string()])];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]), inner.clone())
                .prop_map(|(l, op, r)| format!("{l} {op} {r}")),
            inner.clone().prop_map(|e| format!("({e})")),
            inner.prop_map(|e| format!("-{e}")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dsl_round_trip(e1 in arb_expr(), e2 in arb_expr(), c in 1i64..9, d in 1i64..9, p in -3i64..=3) {
        let src = format!(
            "identity \"p\" {{ k = 2; a = 3/2; lambda = {e1}; matrix = tildeA(k, a); B = [{e2}, 0]; \
             rhs = {c}/{d}*theta(1, {e1}, 0, [1, {e2}], 1, 0) - J({c}, {})^{p} + invq; order = 7; }}",
            c + d
        );
        let d1 = parse_spec(&src).unwrap();
        let d2 = parse_spec(&d1.to_string()).unwrap();
        prop_assert_eq!(&d1, &d2);
        prop_assert_eq!(d1.to_string(), d2.to_string());
    }

    #[test]
    fn malformed_input_never_panics(cut in 0usize..120, junk in "[ -~]{0,3}") {
        let src = "identity \"m\" { a = 2; matrix = tildeA(3, a); xweight = [0, 1, -1]; parity(2, 3) = 0; rhs = P(-1, 1/2, 1) * invq; order = 5; }";
        let cut = cut.min(src.len());
        let mangled = format!("{}{junk}{}", &src[..cut], &src[(cut + 1).min(src.len())..]);
        match load_spec(&mangled) {
            Ok(_) => {}
            Err(d) => {
                prop_assert!(d.line >= 1 && d.col >= 1);
                prop_assert!(d.exit_code() == 2 || d.exit_code() == 3);
                if let Err(pd) = parse_spec(&mangled) {
                    prop_assert_eq!(pd.exit_code(), 2);
                    prop_assert!(pd.col <= mangled.len() + 1);
                }
            }
        }
    }
}

#[test]
fn box_oracle_self_check() {
    // Rogers–Ramanujan: Σ q^{n²}/(q)_n = 1 + q + q² + q³ + 2q⁴ + 2q⁵ + 3q⁶
    let a = RationalMatrix::from_rows(vec![vec![int(2)]]).unwrap();
    let s = box_sum(&a, &[0], &[0], 7);
    let want: Vec<Rational> = [1, 1, 1, 1, 2, 2, 3].iter().map(|&c| int(c)).collect();
    for (e, c) in want.iter().enumerate() {
        assert_eq!(s.coeff(0, &int(e as i64)).unwrap(), *c);
    }
}
