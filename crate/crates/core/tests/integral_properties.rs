use h2d::integral::{self, IndexBounds, MixedRelation, RotationPhase};
use h2d::poly::{self, PolyIndex};
use h2d::quad::{QuadratureKind, QuadratureSpec};
use h2d::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..=1.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(move |(u, t)| Complex64::from_polar(radius * u.sqrt(), t))
}

#[test]
fn too_few_points_are_reported() {
    let e = integral::check_circle_rep_fourier(
        6,
        6,
        Complex64::new(1.0, 0.5),
        Complex64::new(-0.7, 1.2),
        4,
    );
    assert!(
        matches!(e, Err(Error::QuadratureUnderResolved { .. })),
        "{e:?}"
    );
    let spec = QuadratureSpec {
        kind: QuadratureKind::GaussHermite2dTensor,
        points: 16,
    };
    let e = integral::check_h2d_moment(
        6,
        6,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        &spec,
    );
    assert!(
        matches!(e, Err(Error::QuadratureUnderResolved { .. })),
        "{e:?}"
    );
}

#[test]
fn cosine_circle_form_is_the_laguerre_form_rescaled() {
    for m in 0..=6u32 {
        for n in 0..=6u32 {
            for r in [0.3, 0.8, 1.5] {
                let scale = 2f64.powi((m + n) as i32);
                // closed sides through the Laguerre connection
                let z = Complex64::new(r, 0.0);
                let h = (-r * r).exp() * poly::h2d_direct(PolyIndex::new(m, n), z, z);
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let lag = sign
                    * scale
                    * poly::factorial(n)
                    * r.powi(m as i32 - n as i32)
                    * (-r * r).exp()
                    * poly::laguerre_real(n, m as i64 - n as i64, r * r);
                assert!(
                    (lag - scale * h).norm() <= 1e-8 * (1.0 + lag.abs()),
                    "m={m} n={n} r={r}"
                );
                // quadrature sides, where both resolve
                let l = integral::check_circle_rep_laguerre(m, n, r, 256);
                let c = integral::check_circle_rep_conjugate(m, n, r, 0.0, 256);
                if let (Ok(l), Ok(c)) = (l, c) {
                    assert!((l.lhs - scale * c.rhs).norm() <= 1e-8, "m={m} n={n} r={r}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn general_circle_form_reduces_to_the_conjugate_form(
        m in 0u32..=6, n in 0u32..=6, r in 0.2..1.5f64, theta in 0.0..std::f64::consts::TAU
    ) {
        let g = integral::check_circle_rep(m, n, r, theta, r, -theta, 256);
        let c = integral::check_circle_rep_conjugate(m, n, r, theta, 256);
        // Both quadratures integrate an odd function, so either both resolve
        // to the same value or both are flagged.
        match (g, c) {
            (Ok(g), Ok(c)) => {
                prop_assert!((g.lhs - c.lhs).norm() <= 1e-10 * (1.0 + g.lhs.norm()));
                prop_assert!((g.rhs - c.rhs).norm() <= 1e-10);
            }
            (Err(Error::QuadratureUnderResolved { .. }), _) | (_, Err(Error::QuadratureUnderResolved { .. })) => {}
            (g, c) => prop_assert!(false, "{g:?} {c:?}"),
        }
    }

    #[test]
    fn rotated_product_expansion(m in 0u32..=5, n in 0u32..=5, w1 in disk(1.5), w2 in disk(1.5)) {
        let case = MixedRelation::RotatedProduct { m, n, w1, w2, phase: RotationPhase::Forward, bounds: IndexBounds::Full };
        let r = integral::check_mixed_relations(&case, 0).unwrap();
        prop_assert!(r.abs_err <= 1e-9 * (1.0 + r.lhs.norm()), "{r:?}");
    }

    #[test]
    fn shift_series(
        m in 0u32..=6, n in 0u32..=6,
        z1 in disk(1.0), z2 in disk(1.0), w1 in disk(0.5), w2 in disk(0.5)
    ) {
        let case = MixedRelation::Shift { m, n, z1, z2, w1, w2, cap: 25 };
        let r = integral::check_mixed_relations(&case, 0).unwrap();
        prop_assert!(r.abs_err <= 1e-8 * (1.0 + r.lhs.norm()), "{r:?}");
    }

    #[test]
    fn corrected_circle_form(m in 0u32..=6, n in 0u32..=6, z1 in disk(1.5), z2 in disk(1.5)) {
        let r = integral::check_circle_rep_fourier(m, n, z1, z2, 64).unwrap();
        prop_assert!(r.abs_err <= 1e-8, "{r:?}");
    }
}
