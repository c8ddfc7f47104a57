mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use rbm_green::kernel::*;
use rbm_green::model::reference_p1;

fn scale(x: C64) -> f64 {
    1.0 + x.norm_sqr()
}

#[test]
fn p1_branch_points() {
    let g = KernelGeometry::new(&reference_p1());
    let r2 = 2f64.sqrt();
    assert!((g.x_min - (-1.0 - r2)).abs() < 1e-14);
    assert!((g.x_max - (-1.0 + r2)).abs() < 1e-14);
    assert!((g.y_max - g.x_max).abs() < 1e-14);
}

proptest! {
    #[test]
    fn branches_are_roots(p in common::model_strategy(), u in -6.0f64..6.0, v in -6.0f64..6.0) {
        let x = C64::new(u, v);
        for b in [Branch::Plus, Branch::Minus] {
            let y = y_branch(&p, x, b);
            prop_assert!(gamma(&p, x, y).norm() < 1e-11 * scale(x) * scale(y));
            let xb = x_branch(&p, x, b);
            prop_assert!(gamma(&p, xb, x).norm() < 1e-11 * scale(x) * scale(xb));
        }
        let (a, bb, c) = coeffs_in_y(&p, x);
        let yp = y_branch(&p, x, Branch::Plus);
        let ym = y_branch(&p, x, Branch::Minus);
        prop_assert!((yp + ym + bb / a).norm() < 1e-11 * scale(x));
        prop_assert!((yp * ym - c / a).norm() < 1e-10 * scale(x));
    }

    #[test]
    fn branch_points_zero_discriminant(p in common::model_strategy()) {
        let g = KernelGeometry::new(&p);
        for x in [g.x_min, g.x_max] {
            prop_assert!(disc(&p, C64::new(x, 0.0)).norm() < 1e-10 * scale(C64::new(x, 0.0)));
        }
        let s = p.swapped();
        for y in [g.y_min, g.y_max] {
            prop_assert!(disc(&s, C64::new(y, 0.0)).norm() < 1e-10 * scale(C64::new(y, 0.0)));
        }
        prop_assert!(g.x_min < 0.0 && g.x_max > 0.0 && g.y_min < 0.0 && g.y_max > 0.0);
    }

    #[test]
    fn closed_form_real_part(p in common::model_strategy(), u in -5.0f64..5.0, v in -5.0f64..5.0) {
        let g = KernelGeometry::new(&p);
        for b in [Branch::Plus, Branch::Minus] {
            let direct = y_branch(&p, C64::new(u, v), b).re;
            // Off the cuts the principal root and the modulus identity agree.
            if v != 0.0 || (u > g.x_min && u < g.x_max) {
                let closed = re_y_branch_closed_form(&p, &g, u, v, b);
                prop_assert!((direct - closed).abs() < 1e-9 * (1.0 + direct.abs()), "{} vs {}", direct, closed);
            }
        }
    }

    #[test]
    fn branch_derivative(p in common::model_strategy(), u in -3.0f64..3.0, v in 0.2f64..3.0) {
        let x = C64::new(u, v);
        let h = 1e-5;
        for b in [Branch::Plus, Branch::Minus] {
            let fd = (y_branch(&p, x + h, b) - y_branch(&p, x - h, b)) / (2.0 * h);
            let an = y_branch_dx(&p, x, b);
            prop_assert!((fd - an).norm() < 1e-6 * (1.0 + an.norm()));
        }
    }

    #[test]
    fn derivative_on_branch(p in common::model_strategy(), t in 0.0f64..1.0) {
        let g = KernelGeometry::new(&p);
        let x = C64::new(g.x_min + t * (g.x_max - g.x_min), 0.0);
        let y = y_branch(&p, x, Branch::Plus);
        prop_assert!((dgamma_y_on_branch(&p, x) - gamma_dy(&p, x, y)).norm() < 1e-12 * scale(x));
    }

    #[test]
    fn ellipse_lies_on_kernel(p in common::model_strategy(), t in 0.0f64..std::f64::consts::TAU) {
        let (c, _) = p.to_cone();
        let (x, y) = ellipse_param(&p, &c, t);
        let z = C64::new(x, 0.0);
        prop_assert!(gamma(&p, z, C64::new(y, 0.0)).norm() < 1e-12 * scale(z) * (1.0 + y * y));
    }
}
