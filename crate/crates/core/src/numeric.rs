//! Circle arithmetic and small linear-algebra helpers shared by the crate.
//!
//! All angular coordinates live on the circle R/Z and are stored by their
//! canonical representative in [0, 1). Trigonometric arguments are reduced to
//! [-1/2, 1/2) before scaling by 2*pi, so precision does not degrade when the
//! argument comes from a long lifted trajectory.

/// 2*pi.
pub const TAU: f64 = std::f64::consts::TAU;

/// Canonical representative of `x` in [0, 1).
///
/// `rem_euclid` can round up to exactly 1.0 for tiny negative inputs; that
/// case is folded back to 0.0 so the result always lies in [0, 1).
#[inline]
pub fn mod1(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// sin(2*pi*x) with the argument reduced to [-1/2, 1/2) first.
#[inline]
pub fn sin2pi(x: f64) -> f64 {
    let r = x - (x + 0.5).floor();
    (TAU * r).sin()
}

/// cos(2*pi*x) with the argument reduced to [-1/2, 1/2) first.
#[inline]
pub fn cos2pi(x: f64) -> f64 {
    let r = x - (x + 0.5).floor();
    (TAU * r).cos()
}

/// Distance on R/Z between the classes of `a` and `b`, in [0, 1/2].
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 1.0;
    d.min(1.0 - d)
}

/// Signed displacement from `b` to `a` reduced to [-1/2, 1/2].
#[inline]
pub fn circle_sub(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - d.round()
}

/// Solve the 3x3 system `a * x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot degenerates (singular matrix).
pub fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut s = b[col];
        for c in col + 1..3 {
            s -= a[col][c] * x[c];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mod1_stays_in_unit_interval() {
        for &x in &[-3.75, -1.0, -1e-17, 0.0, 0.25, 1.0, 7.25, -0.5] {
            let r = mod1(x);
            assert!((0.0..1.0).contains(&r), "mod1({x}) = {r}");
        }
        assert_eq!(mod1(-1e-17), 0.0);
        assert_eq!(mod1(1.25), 0.25);
        assert_eq!(mod1(-0.25), 0.75);
    }

    #[test]
    fn reduced_trig_matches_naive_on_moderate_args() {
        for i in 0..1000 {
            let x = -3.0 + 6.0 * (i as f64) / 1000.0;
            assert!((sin2pi(x) - (TAU * x).sin()).abs() < 1e-12);
            assert!((cos2pi(x) - (TAU * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_trig_is_exactly_periodic_at_large_offsets() {
        // A dyadic x keeps x + 2^20 exactly representable, so the reduction
        // must reproduce the small-argument value bit for bit.
        let x = 0.140625;
        assert_eq!(sin2pi(x + 1048576.0), sin2pi(x));
        assert_eq!(cos2pi(x - 1048576.0), cos2pi(x));
    }

    #[test]
    fn circle_dist_examples() {
        assert!((circle_dist(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert_eq!(circle_dist(0.0, 0.5), 0.5);
        assert_eq!(circle_dist(0.25, 0.25), 0.0);
        assert!((circle_dist(1.1, 0.9) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn solve3_recovers_known_solution() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [1.5, -2.0, 0.25];
        let b = [
            a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2],
            a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2],
            a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2],
        ];
        let got = solve3(a, b).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn solve3_rejects_singular_matrix() {
        let a = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]];
        assert!(solve3(a, [1.0, 2.0, 0.0]).is_none());
    }

    proptest! {
        #[test]
        fn circle_dist_is_a_metric_sample(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
            let dab = circle_dist(a, b);
            let dba = circle_dist(b, a);
            prop_assert!((dab - dba).abs() < 1e-15);
            prop_assert!(dab <= 0.5 + 1e-15);
            prop_assert!(circle_dist(a, c) <= dab + circle_dist(b, c) + 1e-12);
            if (a - b).abs() > 1e-12 && (a - b).abs() < 1.0 - 1e-12 {
                prop_assert!(dab > 0.0);
            }
        }

        #[test]
        fn circle_dist_is_translation_invariant(a in 0.0..1.0f64, b in 0.0..1.0f64, s in -2.0..2.0f64) {
            let lhs = circle_dist(mod1(a + s), mod1(b + s));
            prop_assert!((lhs - circle_dist(a, b)).abs() < 1e-12);
        }

        #[test]
        fn circle_sub_inverts_dist(a in 0.0..1.0f64, b in 0.0..1.0f64) {
            let s = circle_sub(a, b);
            prop_assert!((s.abs() - circle_dist(a, b)).abs() < 1e-15);
            prop_assert!(circle_dist(mod1(b + s), a) < 1e-15);
        }
    }
}
