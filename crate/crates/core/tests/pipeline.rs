//! End-to-end invariants of the explicit formula and the comparison
//! experiments.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use ef_lab::comparator::*;
use ef_lab::data::{make_dirichlet_l, make_product, make_zeta, DirichletCharacter, SelbergDatum};
use ef_lab::ef::*;
use ef_lab::fourier::{sinc_product_pair, FourierPair};
use ef_lab::zeros::{scan_zeros, ZeroList};

fn chi(q: u64) -> SelbergDatum {
    make_dirichlet_l(&DirichletCharacter::real_primitive(q).unwrap()).unwrap()
}

fn zeros(f: &SelbergDatum, height: f64) -> ZeroList {
    static CACHE: OnceLock<Mutex<HashMap<(String, u64), ZeroList>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (f.name().to_string(), height.to_bits());
    if let Some(z) = cache.lock().unwrap().get(&key) {
        return z.clone();
    }
    let z = scan_zeros(f, height, None).unwrap();
    cache.lock().unwrap().insert(key, z.clone());
    z
}

fn pairs() -> Vec<FourierPair> {
    vec![sinc_product_pair(&[1.0, 1.0]).unwrap(), sinc_product_pair(&[0.8, 0.5, 0.4]).unwrap()]
}

#[test]
fn identity_over_builtins_pairs_and_grid() {
    let data = vec![
        make_zeta(),
        chi(3),
        chi(4),
        make_dirichlet_l(&DirichletCharacter::builtin(5, 1).unwrap()).unwrap(),
        make_product(&make_zeta(), &chi(3)),
    ];
    for f in &data {
        let z = zeros(f, 200.0);
        for pair in pairs() {
            for t in [0.0, 20.0, 50.0] {
                for l in [1.0, 2.0, 4.0] {
                    let r = verify_formula_with_zeros(f, &z, &pair, &EFParams::new(t, l, 200.0)).unwrap();
                    assert!(r.pass, "{} {} t={t} L={l}: {} > {}", f.name(), pair.label(), r.residual, r.budget);
                    assert!(r.residual >= 0.0 && r.budget >= 0.0);
                }
            }
        }
    }
}

#[test]
fn budget_is_monotone() {
    let f = chi(3);
    let z = zeros(&f, 200.0);
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let budget = |h: f64, q: usize| {
        let mut p = EFParams::new(20.0, 2.0, h);
        p.quad_points = q;
        verify_formula_with_zeros(&f, &z, &pair, &p).unwrap().budget
    };
    let by_height: Vec<f64> = [60.0, 100.0, 150.0, 200.0].iter().map(|&h| budget(h, 10)).collect();
    assert!(by_height.windows(2).all(|w| w[1] <= w[0]), "{by_height:?}");
    let by_points: Vec<f64> = [8, 10, 12, 16].iter().map(|&q| budget(200.0, q)).collect();
    assert!(by_points.windows(2).all(|w| w[1] <= w[0]), "{by_points:?}");
}

#[test]
fn pieces_are_additive_over_products() {
    let (a, b) = (make_zeta(), chi(4));
    let ab = make_product(&a, &b);
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let p = EFParams::new(20.0, 2.0, 150.0);
    let (za, zb, zab) = (zeros(&a, 150.0), zeros(&b, 150.0), zeros(&ab, 150.0));
    let sum = |x: num_complex::Complex64, y: num_complex::Complex64, z: num_complex::Complex64| (x + y - z).norm();
    assert!(sum(pole_term(&a, &pair, &p), pole_term(&b, &pair, &p), pole_term(&ab, &pair, &p)) < 1e-8);
    assert!(sum(arch_term(&a, &pair, &p).unwrap(), arch_term(&b, &pair, &p).unwrap(), arch_term(&ab, &pair, &p).unwrap()) < 1e-8);
    assert!(sum(prime_term(&a, &pair, &p).unwrap(), prime_term(&b, &pair, &p).unwrap(), prime_term(&ab, &pair, &p).unwrap()) < 1e-8);
    let zs = |f: &SelbergDatum, z: &ZeroList| zero_sum(f, z, &pair, &p).unwrap().value;
    assert!(sum(zs(&a, &za), zs(&b, &zb), zs(&ab, &zab)) < 1e-8);
}

#[test]
fn arch_term_is_real_and_even_for_real_data() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    for f in [make_zeta(), chi(8)] {
        let a = arch_term(&f, &pair, &EFParams::new(7.5, 2.0, 100.0)).unwrap();
        let b = arch_term(&f, &pair, &EFParams::new(-7.5, 2.0, 100.0)).unwrap();
        assert_eq!(a.im, 0.0);
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn prime_cutoff_tracks_support() {
    let f = make_zeta();
    let wide = sinc_product_pair(&[1.0]).unwrap();
    let narrow = sinc_product_pair(&[0.5]).unwrap();
    let l = 6.0;
    let p = EFParams::new(3.0, l, 100.0);
    assert!((p.prime_cutoff(&wide) - 6f64.exp()).abs() < 1e-9);
    assert!((p.prime_cutoff(&narrow) - 3f64.exp()).abs() < 1e-9);
    assert_eq!(PrimeSide::new(&f, &narrow, l).unwrap().len(), ef_lab::arith::prime_powers_up_to(20).len());
}

#[test]
fn zero_tail_bounds_are_honest() {
    let f = make_zeta();
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let z = zeros(&f, 400.0);
    for (h, t, l) in [(100.0, 0.0, 1.0), (150.0, 30.0, 2.0), (200.0, 50.0, 1.0)] {
        let a = zero_sum(&f, &z, &pair, &EFParams::new(t, l, h)).unwrap();
        let b = zero_sum(&f, &z, &pair, &EFParams::new(t, l, 2.0 * h)).unwrap();
        assert!((a.value - b.value).norm() <= a.tail_bound, "H={h}: {} > {}", (a.value - b.value).norm(), a.tail_bound);
    }
    let empty = ZeroList::empty("none", 100.0);
    assert_eq!(zero_sum(&f, &empty, &pair, &EFParams::new(0.0, 2.0, 50.0)).unwrap().value.norm(), 0.0);
    let mut partial = z.clone();
    partial.complete = false;
    assert!(zero_sum(&f, &partial, &pair, &EFParams::new(0.0, 2.0, 50.0)).is_err());
}

#[test]
fn stirling_convergence_constant() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    for f in [make_zeta(), make_product(&make_zeta(), &chi(3))] {
        let mut c_fit: f64 = 0.0;
        let mut prev = f64::INFINITY;
        for t in [1e2f64, 1e3, 1e4] {
            let l = t.ln();
            let ratio = arch_term(&f, &pair, &EFParams::new(t, l, 1e9)).unwrap().re / stirling_h(&f, &pair, t, l).unwrap();
            let dev = (ratio - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
            c_fit = c_fit.max(dev * t.ln());
        }
        assert!(c_fit <= 10.0, "{}: C = {c_fit}", f.name());
    }
}

#[test]
fn inferred_difference_tracks_tail_bound() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let (a, b) = (chi(3), chi(4));
    let direct = PrimeSide::difference(&a, &b, &pair, 2.0).unwrap().eval(30.0);
    let mut last_tail = 0.0;
    for h in [200.0, 100.0, 60.0] {
        let (za, zb) = (zeros(&a, 200.0), zeros(&b, 200.0));
        let cut = |z: &ZeroList| {
            let mut c = z.clone();
            c.ordinates.retain(|&g| g <= h);
            c.t_max = h;
            c
        };
        let r = infer_d_delta_from_zeros(&a, &b, &cut(&za), &cut(&zb), &pair, 30.0, 2.0).unwrap();
        assert!((r.value - direct).norm() <= r.tail_bound + 1e-4);
        assert!(r.tail_bound > last_tail);
        last_tail = r.tail_bound;
    }
}

#[test]
fn comparisons_are_antisymmetric() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let (a, b) = (chi(3), chi(4));
    let (za, zb) = (zeros(&a, 500.0), zeros(&b, 500.0));
    let d1 = infer_d_delta_from_zeros(&a, &b, &za, &zb, &pair, 40.0, 2.0).unwrap().value;
    let d2 = infer_d_delta_from_zeros(&b, &a, &zb, &za, &pair, 40.0, 2.0).unwrap().value;
    assert!((d1 + d2).norm() < 1e-12);
    let m1 = mean_value_check(&a, &b, &pair, 100.0, 4.0, 4).unwrap();
    let m2 = mean_value_check(&b, &a, &pair, 100.0, 4.0, 4).unwrap();
    assert!((m1.lhs_integral - m2.lhs_integral).abs() < 1e-12 * m1.lhs_integral);
    let inputs = |mode| ProbeInputs { pair: &pair, zeros: Some((&za, &zb)), mode, masked: true, n_quad: 1 };
    let swapped = |mode| ProbeInputs { pair: &pair, zeros: Some((&zb, &za)), mode, masked: true, n_quad: 1 };
    let p1 = coefficient_probe(&a, &b, 3, 200.0, 3.0, 4.0, &inputs(ProbeMode::Zeros)).unwrap();
    let p2 = coefficient_probe(&b, &a, 3, 200.0, 3.0, 4.0, &swapped(ProbeMode::Zeros)).unwrap();
    assert!((p1.estimate + p2.estimate).norm() < 1e-9);
}

#[test]
fn probe_modes_agree_on_standard_grid() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let (a, b) = (chi(3), chi(4));
    let (za, zb) = (zeros(&a, 500.0), zeros(&b, 500.0));
    for m in [2, 3, 4, 5] {
        let run = |mode| {
            let inputs = ProbeInputs { pair: &pair, zeros: Some((&za, &zb)), mode, masked: true, n_quad: 1 };
            coefficient_probe(&a, &b, m, 200.0, 3.0, 4.0, &inputs).unwrap()
        };
        let (c, z) = (run(ProbeMode::Coefficients), run(ProbeMode::Zeros));
        assert!((c.estimate - z.estimate).norm() <= z.budget + HARD_TOLERANCE, "m={m}");
        assert_eq!(c.target, z.target);
        assert!(z.relative_error < 0.25, "m={m}: {}", z.relative_error);
    }
}

#[test]
fn probe_error_trend_with_height() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let inputs = ProbeInputs { pair: &pair, zeros: None, mode: ProbeMode::Coefficients, masked: false, n_quad: 1 };
    let errs: Vec<f64> = [100.0, 200.0, 400.0, 800.0]
        .iter()
        .map(|&t| coefficient_probe(&make_zeta(), &chi(3), 2, t, 3.0, 4.0, &inputs).unwrap().relative_error)
        .collect();
    let non_increasing = errs.windows(2).filter(|w| w[1] <= w[0]).count();
    assert!(non_increasing >= 2, "{errs:?}");
}

#[test]
fn masking_properties() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    let (a, b) = (make_zeta(), chi(3));
    let (za, zb) = (zeros(&a, 300.0), zeros(&b, 300.0));
    let t: f64 = 100.0;
    let l = 2.0 * t.ln();
    let mut last = 0.0;
    for w in [2.0, 4.0, 8.0] {
        let mask = build_mask(&za, &zb, t, w).unwrap();
        assert!(mask.satisfies_union_bound());
        let r = masked_z_bound_check(&za, &zb, &pair, t, l, w, 8).unwrap();
        assert!(r.ratio.is_finite() && r.lhs > last);
        last = r.lhs;
    }
    let coarse = masked_z_bound_check(&za, &zb, &pair, t, l, 4.0, 8).unwrap();
    let fine = masked_z_bound_check(&za, &zb, &pair, t, l, 4.0, 16).unwrap();
    // |Z_F − Z_G| has kinks at its sign changes, so refinement converges algebraically.
    assert!((coarse.ratio - fine.ratio).abs() < 1e-3 * fine.ratio);
    let far = ZeroList::empty("none", 300.0);
    assert!(masked_z_bound_check(&far, &far, &pair, t, l, 4.0, 8).unwrap().lhs.abs() < 1e-12);
}

#[test]
fn mean_value_ratios_on_catalog() {
    let pair = sinc_product_pair(&[1.0, 1.0]).unwrap();
    for (f, g) in pair_catalog() {
        for t in [50.0, 100.0, 200.0] {
            let r = mean_value_check(&f, &g, &pair, t, 4.0, 4).unwrap();
            assert!(r.ratio <= 8.0 && r.ratio > 0.0, "{} {} {t}: {}", f.name(), g.name(), r.ratio);
        }
    }
}
