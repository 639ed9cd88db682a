mod common;

use common::*;
use proptest::prelude::*;
use rifs_core::norms::*;
use rifs_core::orlicz::{modular, young_conjugate, OrliczSpec};
use rifs_core::rearrange::{hlp_dominates_default, rearrange};
use rifs_core::step::{self, Alpha, StepFunction};
use rifs_core::weight::{weight_w, weight_wp, in_d_p, WeightPiece, WeightSpec};

#[test]
fn weight_integrals() {
    assert_eq!(weight_w(&WeightSpec::constant(1.0), 3.0).unwrap(), 3.0);
    assert!(close(weight_w(&sqrt_weight(), 4.0).unwrap(), 4.0, 1e-14));
    assert!(close(weight_wp(&WeightSpec::constant(1.0), 2.0, 1.0).unwrap(), 1.0, 1e-14));
    // s^2 · s^{-3/2} / (3/2) at s = 1.
    assert!(close(weight_wp(&sqrt_weight(), 2.0, 1.0).unwrap(), 2.0 / 3.0, 1e-14));
    let decaying = WeightSpec::new(vec![
        WeightPiece::new(0.0, 1.0, 1.0, 0.0, 0.0),
        WeightPiece::new(1.0, f64::INFINITY, 1.0, -2.0, 0.0),
    ])
    .unwrap();
    assert!(close(decaying.big_w_total().unwrap(), 2.0, 1e-14));
    let growing = WeightSpec::power(1.0, 2.0);
    assert_eq!(weight_wp(&growing, 2.0, 1.0).unwrap_err().code(), "dp_violation");
}

#[test]
fn class_dp_membership() {
    assert!(in_d_p(&WeightSpec::constant(1.0), 2.0, Alpha::Infinite));
    assert!(!in_d_p(&WeightSpec::power(1.0, -2.0), 2.0, Alpha::Infinite));
    assert!(!in_d_p(&WeightSpec::power(1.0, 2.0), 2.0, Alpha::Infinite));
    let err = SpaceHandle::gamma(2.0, WeightSpec::power(1.0, 2.0), Alpha::Infinite).unwrap_err();
    assert_eq!(err.code(), "dp_violation");
}

#[test]
fn lorentz_examples() {
    let c = chi(0.0, 1.0);
    assert!(close(lambda_norm(&c, 2.0, &sqrt_weight()).unwrap(), 2f64.sqrt(), 1e-14));
    assert_eq!(lambda_norm(&StepFunction::zero(Alpha::Infinite), 2.0, &sqrt_weight()).unwrap(), 0.0);
    assert_eq!(gamma_norm(&StepFunction::zero(Alpha::Infinite), 2.0, &sqrt_weight()).unwrap(), 0.0);
    // Γ(2, t^{-1/2}) at χ_(0,1): W(1) + W_2(1) = 2 + 2/3.
    assert!(close(gamma_norm(&c, 2.0, &sqrt_weight()).unwrap(), (8.0f64 / 3.0).sqrt(), 1e-12));
}

#[test]
fn orlicz_examples() {
    let psi = OrliczSpec::power(2.0);
    assert_eq!(modular(&chi(0.0, 4.0), &psi), 4.0);
    assert_eq!(modular(&f(&[(0.0, 1.0, 2.0), (1.0, 3.0, 1.0)]), &psi), 6.0);
    assert!(close(luxemburg_norm(&chi(0.0, 4.0), &psi).unwrap(), 2.0, 1e-14));
    let shifted = OrliczSpec::shifted_power(1.0, 2.0).unwrap();
    assert!(close(luxemburg_norm(&chi(0.0, 1.0), &shifted).unwrap(), 0.5, 1e-13));
    assert!(close(orlicz_norm(&chi(0.0, 1.0), &psi).unwrap(), 2.0, 1e-9));
    assert_eq!(orlicz_norm(&StepFunction::zero(Alpha::Infinite), &psi).unwrap(), 0.0);
}

#[test]
fn young_conjugates() {
    let half_square = OrliczSpec::power_scaled(2.0, 0.5).unwrap();
    assert!(close(young_conjugate(&half_square, 1.0), 0.5, 1e-14));
    assert_eq!(young_conjugate(&half_square, 0.0), 0.0);
    // ψ = |t|^p / p has conjugate |u|^{p'} / p'.
    for p in [1.5, 3.0, 4.0] {
        let psi = OrliczSpec::power_scaled(p, 1.0 / p).unwrap();
        let q = p / (p - 1.0);
        for u in [0.3, 1.0, 2.5] {
            assert!(close(young_conjugate(&psi, u), u.powf(q) / q, 1e-12), "p = {p}, u = {u}");
        }
    }
}

#[test]
fn fundamental_function_examples() {
    let gamma = SpaceHandle::gamma(2.0, WeightSpec::constant(1.0), Alpha::Infinite).unwrap();
    assert!(close(fundamental_function(&gamma, 1.0).unwrap(), 2f64.sqrt(), 1e-14));
    for p in [1.0, 2.0, 3.5] {
        let lp = SpaceHandle::lp(p, Alpha::Infinite);
        for t in [0.01, 1.0, 7.0] {
            assert!(close(fundamental_function(&lp, t).unwrap(), t.powf(1.0 / p), 1e-12));
        }
    }
    for space in [gamma, SpaceHandle::lp(2.0, Alpha::Infinite)] {
        assert!(fundamental_function(&space, 1e-12).unwrap() < 1e-5);
        assert!(fundamental_function(&space, 0.0).is_err());
    }
}

#[test]
fn alpha_must_match() {
    let unit = SpaceHandle::lp(2.0, Alpha::Unit);
    assert_eq!(unit.norm(&chi(0.0, 0.5)).unwrap_err().code(), "alpha_mismatch");
}

/// `sup ∫ x y` over `y` constant on the cells of `x` with `ρ_{ψ_Y}(y) = 1`,
/// scanning how the unit budget is split between cells.
fn dual_sup(cells: &[(f64, f64)], psi: &OrliczSpec, steps: usize) -> f64 {
    let level = |budget: f64, len: f64| {
        let (mut lo, mut hi) = (0.0, 1.0);
        while young_conjugate(psi, hi) * len <= budget {
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if young_conjugate(psi, mid) * len <= budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let pair = |a: (f64, f64), b: (f64, f64), budget: f64| {
        (0..=steps)
            .map(|k| {
                let s = budget * k as f64 / steps as f64;
                a.0 * a.1 * level(s, a.1) + b.0 * b.1 * level(budget - s, b.1)
            })
            .fold(0.0, f64::max)
    };
    match cells {
        [a, b] => pair(*a, *b, 1.0),
        [a, b, c] => (0..=steps / 10)
            .map(|k| {
                let s = k as f64 / (steps / 10) as f64;
                a.0 * a.1 * level(s, a.1) + pair(*b, *c, 1.0 - s)
            })
            .fold(0.0, f64::max),
        _ => unreachable!(),
    }
}

#[test]
fn orlicz_norm_matches_discretized_dual() {
    let inputs: [&[(f64, f64)]; 3] = [&[(2.0, 1.0), (1.0, 2.0)], &[(0.5, 0.25), (3.0, 1.5)], &[(1.0, 1.0), (2.0, 0.5), (0.25, 3.0)]];
    let families = [
        OrliczSpec::power(2.0),
        OrliczSpec::power(3.0),
        OrliczSpec::ExpMinusOne,
        OrliczSpec::shifted_power(0.5, 2.0).unwrap(),
    ];
    for cells in inputs {
        let mut t = 0.0;
        let triples: Vec<(f64, f64, f64)> = cells
            .iter()
            .map(|&(v, len)| {
                t += len;
                (t - len, t, v)
            })
            .collect();
        let x = f(&triples);
        for psi in &families {
            let amemiya = orlicz_norm(&x, psi).unwrap();
            let sup = dual_sup(cells, psi, 1000);
            assert!(sup <= amemiya * (1.0 + 1e-9), "{psi:?}: dual {sup} above {amemiya}");
            assert!(amemiya - sup <= 1e-3 * amemiya, "{psi:?}: dual {sup} vs {amemiya}");
        }
    }
}

fn spaces() -> Vec<SpaceHandle> {
    vec![
        SpaceHandle::lambda(2.0, sqrt_weight(), Alpha::Infinite).unwrap(),
        SpaceHandle::gamma(2.0, sqrt_weight(), Alpha::Infinite).unwrap(),
        SpaceHandle::gamma(1.5, WeightSpec::constant(1.0), Alpha::Infinite).unwrap(),
        SpaceHandle::gamma(3.0, sqrt_weight(), Alpha::Infinite).unwrap(),
        SpaceHandle::lp(3.0, Alpha::Infinite),
        SpaceHandle::orlicz(OrliczSpec::ExpMinusOne, OrliczFlavor::Orlicz, Alpha::Infinite),
        SpaceHandle::orlicz(OrliczSpec::shifted_power(1.0, 2.0).unwrap(), OrliczFlavor::Luxemburg, Alpha::Infinite),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_rearrangement_invariant(x in step(), shift in 0u32..16) {
        for space in spaces() {
            let n = space.norm(&x).unwrap();
            for y in [rearrange(&x), x.translate(shift as f64 / 8.0).unwrap(), step::scale(&x, -1.0).unwrap()] {
                prop_assert!(close(space.norm(&y).unwrap(), n, 1e-9), "{:?}", space.kind());
            }
        }
    }

    #[test]
    fn triangle_inequality_and_homogeneity(x in step(), y in step(), c in -3.0f64..3.0) {
        for space in spaces() {
            let (nx, ny) = (space.norm(&x).unwrap(), space.norm(&y).unwrap());
            let nsum = space.norm(&step::add(&x, &y).unwrap()).unwrap();
            prop_assert!(nsum <= (nx + ny) * (1.0 + 1e-8) + 1e-12, "{:?}", space.kind());
            let ncx = space.norm(&step::scale(&x, c).unwrap()).unwrap();
            prop_assert!(close(ncx, c.abs() * nx, 1e-8), "{:?}: {} vs {}", space.kind(), ncx, c.abs() * nx);
        }
    }

    #[test]
    fn gamma_is_k_monotone_and_dominates_lambda(x in step(), y in step()) {
        let w = sqrt_weight();
        let (gx, gy) = (gamma_norm(&x, 2.0, &w).unwrap(), gamma_norm(&y, 2.0, &w).unwrap());
        if hlp_dominates_default(&x, &y) {
            prop_assert!(gx <= gy + 1e-9);
        }
        prop_assert!(gx >= lambda_norm(&x, 2.0, &w).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn lambda_with_unit_weight_is_lp(x in any_alpha_step(), p in 1.0f64..5.0) {
        let w = WeightSpec::constant(1.0).restrict(x.alpha()).unwrap();
        prop_assert!(close(lambda_norm(&x, p, &w).unwrap(), lp_oracle(&x, p), 1e-12));
    }

    #[test]
    fn luxemburg_below_orlicz_below_twice(x in step()) {
        for psi in [OrliczSpec::power(2.0), OrliczSpec::ExpMinusOne, OrliczSpec::shifted_power(0.5, 3.0).unwrap()] {
            let (l, o) = (luxemburg_norm(&x, &psi).unwrap(), orlicz_norm(&x, &psi).unwrap());
            prop_assert!(l <= o * (1.0 + 1e-9) && o <= 2.0 * l * (1.0 + 1e-9));
        }
    }
}

#[test]
fn fundamental_function_is_quasiconcave() {
    let ts: Vec<f64> = (-12..=12).map(|k| 2f64.powi(k)).collect();
    for space in spaces() {
        let phi: Vec<f64> = ts.iter().map(|&t| fundamental_function(&space, t).unwrap()).collect();
        for i in 1..ts.len() {
            assert!(phi[i] >= phi[i - 1] * (1.0 - 1e-9), "{:?} decreases at {}", space.kind(), ts[i]);
            assert!(phi[i] / ts[i] <= phi[i - 1] / ts[i - 1] * (1.0 + 1e-9), "{:?}", space.kind());
        }
    }
}
