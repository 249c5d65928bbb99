use minsurf::quad::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Holomorphic off the excluded points 0 and 2.
fn f(z: C) -> C {
    (z * z).exp() / (z * (z - 2.0))
}

fn pt() -> impl Strategy<Value = C> {
    (-3.0f64..3.0, 0.5f64..3.0).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn additivity(a in pt(), b in pt(), d in pt()) {
        let s = QuadSettings::default();
        let p1 = ComplexPath::new(vec![a, b]).unwrap();
        let p2 = ComplexPath::new(vec![b, d]).unwrap();
        let whole = integrate_path(f, &p1.concat(&p2).unwrap(), &s).unwrap();
        let parts = integrate_path(f, &p1, &s).unwrap() + integrate_path(f, &p2, &s).unwrap();
        prop_assert!((whole - parts).norm() <= s.abs_tol, "{}", (whole - parts).norm());
    }

    #[test]
    fn orientation(a in pt(), b in pt(), d in pt()) {
        let s = QuadSettings::default();
        let p = ComplexPath::new(vec![a, b, d]).unwrap();
        let fwd = integrate_path(f, &p, &s).unwrap();
        let back = integrate_path(f, &p.reversed(), &s).unwrap();
        prop_assert!((fwd + back).norm() <= s.abs_tol, "{}", (fwd + back).norm());
    }

    #[test]
    fn homotopy_independence(a in pt(), b in pt(), h1 in 0.5f64..3.0, h2 in 0.5f64..3.0) {
        // Both detours stay in the upper half-plane, so they wind alike about 0 and 2.
        let s = QuadSettings::default();
        let p = ComplexPath::new(vec![a, c(a.re, a.im + h1), c(b.re, b.im + h1), b]).unwrap();
        let q = ComplexPath::new(vec![a, c(0.5 * (a.re + b.re), 0.5 * (a.im + b.im) + h2), b]).unwrap();
        let vp = integrate_path(f, &p, &s).unwrap();
        let vq = integrate_path(f, &q, &s).unwrap();
        prop_assert!((vp - vq).norm() <= 10.0 * s.abs_tol, "{}", (vp - vq).norm());
    }

    #[test]
    fn cauchy(x in -3.0f64..3.0, y in 0.6f64..3.0, r in 0.05f64..0.5) {
        let s = QuadSettings::default();
        let lp = ComplexPath::circle(c(x, y), r, 32, 1).unwrap();
        let v = integrate_path(f, &lp, &s).unwrap();
        prop_assert!(v.norm() < s.abs_tol, "{v}");
    }
}
