#![allow(clippy::needless_range_loop)]
use ncpath::kernel::OperatorKernel;
use ncpath::potential::evaluate_potential_shifted;
use ncpath::star::potential_operator_kernel;
use ncpath::weyl::{
    symbol_of_operator, symbol_of_operator_with, symmetrized_xk_kernel, trace_form_symbol, verify_alpha_washout,
    AlphaIndex, WeylScheme,
};
use ncpath::{PhaseSpaceGrid, Potential, ThetaMatrix, C64};

fn al(a: f64) -> AlphaIndex {
    AlphaIndex::new(a).unwrap()
}

/// Lattice operator with standard symbol exp(-(x² + k²)/2), N = 1.
fn gaussian_symbol_operator(g: usize) -> OperatorKernel {
    let l = (g as f64 * std::f64::consts::PI / 2.0).sqrt();
    let grid = PhaseSpaceGrid::new(1, g, l, 1.0).unwrap();
    let mut e = vec![C64::default(); g * g];
    for ix in 0..g {
        let x = grid.x_coord(ix)[0];
        for iy in 0..g {
            let y = grid.x_coord(iy)[0];
            let s: C64 = (0..g)
                .map(|ik| {
                    let k = grid.k_coord(ik)[0];
                    C64::from_polar((-(x * x + k * k) / 2.0).exp(), -k * (y - x))
                })
                .sum();
            e[ix * g + iy] = s / (g as f64 * grid.dx());
        }
    }
    OperatorKernel::new(grid, e).unwrap()
}

/// exp(c ∂x∂k) exp(-(x² + k²)/2) with c = iħ(½+α).
fn gaussian_symbol_exact(x: f64, k: f64, alpha: f64) -> C64 {
    let c = C64::new(0.0, 0.5 + alpha);
    let q = 1.0 - c * c;
    q.powf(-0.5) * (-(x * x + k * k - 2.0 * c * x * k) / (2.0 * q)).exp()
}

fn interior_error(kern: &OperatorKernel, alpha: f64, scheme: WeylScheme) -> f64 {
    let grid = kern.grid();
    let s = symbol_of_operator_with(kern, al(alpha), scheme).unwrap();
    let mut worst = 0.0f64;
    for ix in 0..grid.len() {
        for ik in 0..grid.len() {
            let (x, k) = (grid.x_coord(ix)[0], grid.k_coord(ik)[0]);
            if x.abs() < 2.5 && k.abs() < 2.5 {
                worst = worst.max((s.get(ik, ix) - gaussian_symbol_exact(x, k, alpha)).norm());
            }
        }
    }
    worst
}

#[test]
fn local_scheme_converges_under_refinement() {
    for alpha in [0.0, 0.3, 0.5] {
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&g| interior_error(&gaussian_symbol_operator(g), alpha, WeylScheme::LocalTaylor))
            .collect();
        assert!(errs[0] < 1e-2 && errs[1] < errs[0] / 4.0 && errs[2] < errs[1] / 4.0, "alpha {alpha}: {errs:?}");
    }
    assert!(interior_error(&gaussian_symbol_operator(16), -0.5, WeylScheme::LocalTaylor) < 1e-14);
}

#[test]
fn fourier_route_is_spectral_on_periodic_symbols() {
    let k = gaussian_symbol_operator(48);
    for alpha in [-0.5, 0.0, 0.5] {
        assert!(interior_error(&k, alpha, WeylScheme::Fourier) < 1e-8, "alpha {alpha}");
    }
}

#[test]
fn trace_form_agrees_with_fourier_route() {
    let k = gaussian_symbol_operator(8);
    let grid = k.grid().clone();
    for alpha in [-0.3, 0.0, 0.4] {
        let s = symbol_of_operator_with(&k, al(alpha), WeylScheme::Fourier).unwrap();
        for (ik, ix) in [(0, 0), (3, 5), (7, 2), (4, 4)] {
            let t = trace_form_symbol(&k, al(alpha), &grid.k_coord(ik), &grid.x_coord(ix)).unwrap();
            assert!((t - s.get(ik, ix)).norm() < 1e-8, "alpha {alpha} at ({ik}, {ix})");
        }
    }
}

#[test]
fn shifted_harmonic_symbol_matches_its_formula() {
    let grid = PhaseSpaceGrid::new(2, 16, 3.0, 1.0).unwrap();
    let theta = ThetaMatrix::planar(0.1);
    let v = Potential::harmonic(1.0, 1.0);
    let k = potential_operator_kernel(&v, &theta, &grid).unwrap();
    let s = symbol_of_operator(&k, al(0.3)).unwrap();
    let mut worst = 0.0f64;
    for ix in 0..grid.len() {
        for ik in 0..grid.len() {
            let want = evaluate_potential_shifted(&v, &theta, &grid.x_coord(ix), &grid.k_coord(ik));
            worst = worst.max((s.get(ik, ix) - want).norm());
        }
    }
    assert!(worst < 1e-3, "{worst:e}");
}

#[test]
fn symbol_map_is_linear() {
    let grid = PhaseSpaceGrid::new(1, 16, 3.0, 1.0).unwrap();
    let a = potential_operator_kernel(&Potential::quartic(0.5), &ThetaMatrix::zero(1), &grid).unwrap();
    let b = symmetrized_xk_kernel(&grid, 0);
    let (ca, cb) = (C64::new(0.3, -1.2), C64::new(2.0, 0.5));
    let combo = a.scale(ca).add(&b.scale(cb)).unwrap();
    for alpha in [-0.5, 0.1, 0.5] {
        let sc = symbol_of_operator(&combo, al(alpha)).unwrap();
        let sa = symbol_of_operator(&a, al(alpha)).unwrap();
        let sb = symbol_of_operator(&b, al(alpha)).unwrap();
        for i in 0..sc.values().len() {
            let want = sa.values()[i] * ca + sb.values()[i] * cb;
            assert!((sc.values()[i] - want).norm() < 1e-9 * (1.0 + want.norm()));
        }
    }
}

#[test]
fn washout_spread_is_below_refinement_error() {
    let theta = ThetaMatrix::planar(0.1);
    let alphas = [al(-0.4), al(0.0), al(0.4)];
    for v in [Potential::quartic(1.0), Potential::harmonic(1.3, 1.0)] {
        let coarse = PhaseSpaceGrid::new(2, 8, 3.0, 1.0).unwrap();
        let fine = PhaseSpaceGrid::new(2, 16, 3.0, 1.0).unwrap();
        let rep = verify_alpha_washout(&v, &theta, &alphas, &coarse).unwrap();
        let sc = symbol_of_operator(&potential_operator_kernel(&v, &theta, &coarse).unwrap(), al(0.4)).unwrap();
        let sf = symbol_of_operator(&potential_operator_kernel(&v, &theta, &fine).unwrap(), al(0.4)).unwrap();
        // coarse x_j = fine x_{2j}; k lattices share spacing, offset by G/2
        let mut conv = 0.0f64;
        let mut ci = [0usize; 2];
        let mut cj = [0usize; 2];
        for ix in 0..coarse.len() {
            coarse.unflatten(ix, &mut ci);
            let fx = fine.flatten(&[2 * ci[0], 2 * ci[1]]);
            for ik in 0..coarse.len() {
                coarse.unflatten(ik, &mut cj);
                let fk = fine.flatten(&[cj[0] + 4, cj[1] + 4]);
                assert!((fine.k_coord(fk)[0] - coarse.k_coord(ik)[0]).abs() < 1e-12);
                conv = conv.max((sc.get(ik, ix) - sf.get(fk, fx)).norm());
            }
        }
        assert!(rep.max_pairwise <= 10.0 * conv + 1e-12 * rep.scale, "{}: {} vs {conv}", v.name(), rep.max_pairwise);
    }
}

#[test]
fn control_operator_shows_alpha_dependence() {
    for g in [16, 32] {
        let grid = PhaseSpaceGrid::new(1, g, 4.0, 1.0).unwrap();
        let k = symmetrized_xk_kernel(&grid, 0);
        let lo = symbol_of_operator(&k, al(-0.5)).unwrap();
        let hi = symbol_of_operator(&k, al(0.5)).unwrap();
        assert!(lo.max_abs_diff(&hi).unwrap() > 0.5);
    }
}
