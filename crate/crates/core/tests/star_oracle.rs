#![allow(clippy::needless_range_loop)]
use ncpath::star::{potential_operator_kernel, star_apply, star_apply_direct, star_integral_identity_check, star_product_fields};
use ncpath::{ComplexField, PhaseSpaceGrid, Potential, ThetaMatrix, C64};
use std::f64::consts::PI;

fn packet(grid: &PhaseSpaceGrid, center: &[f64], width: f64, p: &[f64]) -> ComplexField {
    ComplexField::gaussian(grid, center, width, p).unwrap()
}

/// (2πħ)^{-N} Σ_k Δk^N Σ_y Δx^N e^{ik·(x-y)/ħ} V(x + θk) ψ(y), written out.
fn double_sum(v: &Potential, theta: &ThetaMatrix, psi: &ComplexField) -> Vec<C64> {
    let g = psi.grid();
    let n = g.len();
    let d = g.dim();
    let h = g.hbar();
    let w = (g.dk() / (2.0 * PI * h)).powi(d as i32) * g.dx().powi(d as i32);
    (0..n)
        .map(|ix| {
            let x = g.x_coord(ix);
            let mut acc = C64::default();
            for ik in 0..n {
                let k = g.k_coord(ik);
                let u: Vec<f64> = (0..d).map(|l| x[l] + (0..d).map(|j| theta.get(l, j) * k[j]).sum::<f64>()).collect();
                let vv = v.eval(&u);
                for iy in 0..n {
                    let y = g.x_coord(iy);
                    let ph: f64 = (0..d).map(|j| k[j] * (x[j] - y[j])).sum::<f64>() / h;
                    acc += C64::from_polar(vv, ph) * psi.values()[iy];
                }
            }
            acc * w
        })
        .collect()
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn fast_path_matches_explicit_double_sum() {
    let g = PhaseSpaceGrid::new(2, 8, 3.0, 1.0).unwrap();
    let psi = packet(&g, &[0.3, -0.2], 0.8, &[0.4, -0.7]);
    let theta = ThetaMatrix::planar(0.15);
    for v in [
        Potential::quartic(0.3),
        Potential::harmonic(1.2, 0.9),
        Potential::linear(vec![0.5, -1.5]),
        Potential::gaussian_well(1.0, 0.7),
    ] {
        let want = double_sum(&v, &theta, &psi);
        let fast = star_apply(&v, &theta, &psi).unwrap();
        let direct = star_apply_direct(&v, &theta, &psi).unwrap();
        let kern = potential_operator_kernel(&v, &theta, &g).unwrap().apply(&psi).unwrap();
        let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_diff(fast.values(), &want) < 1e-10 * scale, "{}", v.name());
        assert!(max_diff(direct.values(), &want) < 1e-10 * scale, "{}", v.name());
        assert!(max_diff(kern.values(), &want) < 1e-10 * scale, "{}", v.name());
    }
}

#[test]
fn linear_potential_matches_derivative_expansion() {
    // c·(x + θk) acting on a Gaussian: (c·x)ψ + c_l θ^{lj} (-iħ∂_j)ψ
    let hbar = 0.7;
    let g = PhaseSpaceGrid::new(2, 48, 8.0, hbar).unwrap();
    let (center, width, p) = ([0.4, -0.3], 1.0, [0.6, 0.2]);
    let psi = packet(&g, &center, width, &p);
    let theta = ThetaMatrix::planar(0.25);
    let c = [0.8, -0.5];
    let out = star_apply(&Potential::linear(c.to_vec()), &theta, &psi).unwrap();
    for ix in 0..g.len() {
        let x = g.x_coord(ix);
        let mut want = C64::new(c[0] * x[0] + c[1] * x[1], 0.0);
        for l in 0..2 {
            for j in 0..2 {
                let mom = C64::new(p[j], hbar * (x[j] - center[j]) / (width * width));
                want += c[l] * theta.get(l, j) * mom;
            }
        }
        want *= psi.values()[ix];
        assert!((out.values()[ix] - want).norm() < 1e-9, "at {x:?}");
    }
}

#[test]
fn theta_zero_reduces_to_pointwise_product() {
    let g = PhaseSpaceGrid::new(2, 16, 4.0, 1.0).unwrap();
    let phi = packet(&g, &[0.1, 0.2], 0.9, &[0.3, 0.0]);
    let psi = packet(&g, &[-0.4, 0.0], 1.1, &[0.0, -0.5]);
    let z = ThetaMatrix::zero(2);
    let prod = star_product_fields(&phi, &psi, &z).unwrap();
    for i in 0..g.len() {
        assert_eq!(prod.values()[i], phi.values()[i] * psi.values()[i]);
    }
    assert_eq!(star_integral_identity_check(&phi, &psi, &z).unwrap(), 0.0);
    let v = Potential::quartic(0.2);
    let a = star_apply(&v, &z, &psi).unwrap();
    for i in 0..g.len() {
        assert_eq!(a.values()[i], psi.values()[i] * v.eval(&g.x_coord(i)));
    }
}

#[test]
fn field_star_product_matches_symbol_route() {
    let g = PhaseSpaceGrid::new(2, 32, 5.0, 1.0).unwrap();
    let theta = ThetaMatrix::planar(0.2);
    let psi = packet(&g, &[0.2, 0.1], 0.8, &[0.5, 0.0]);
    let v = Potential::gaussian_well(1.3, 0.7);
    let phi = ComplexField::from_fn(&g, |x| C64::new(v.eval(x), 0.0));
    let via_field = star_product_fields(&phi, &psi, &theta).unwrap();
    let via_symbol = star_apply(&v, &theta, &psi).unwrap();
    assert!(max_diff(via_field.values(), via_symbol.values()) < 1e-9);
}

#[test]
fn integral_identity_holds_for_gaussians() {
    let g = PhaseSpaceGrid::new(2, 32, 6.0, 1.0).unwrap();
    let phi = packet(&g, &[0.5, -0.5], 1.0, &[0.3, 0.1]);
    let psi = packet(&g, &[-0.2, 0.4], 0.8, &[-0.2, 0.6]);
    for t in [0.05, 0.1, 0.5] {
        let dev = star_integral_identity_check(&phi, &psi, &ThetaMatrix::planar(t)).unwrap();
        assert!(dev < 1e-10, "theta {t}: {dev:e}");
    }
}
