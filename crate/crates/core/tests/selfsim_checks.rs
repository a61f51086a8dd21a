mod common;

use common::{load, rel_err};
use hilfer::fracops::{pde_residual, EquationSpec, GeneralEquationSpec, HilferOptions, ResidualOptions, Singularity};
use hilfer::selfsim::{
    coefficients, eval_gen_wright_case, eval_selfsimilar, eval_wright_case, similarity_exponents, wright_seed,
};
use num_complex::Complex64;

#[test]
fn coefficients_match_reference() {
    let g = GeneralEquationSpec::new(0.5, 0.25, 0.5, 0.5, 2.5, 0.5, 1.0).unwrap();
    let e = similarity_exponents(&g, 0.0);
    let t = coefficients(&g, &e, 1, 6, 1.0).unwrap();
    for row in load("selfsim_coeffs.txt") {
        let n = row[0] as usize;
        assert!(rel_err(t.c[n], row[1]) <= 1e-12, "c_{n}: {:e} vs {:e}", t.c[n], row[1]);
    }
}

#[test]
fn degenerate_case_is_generalized_wright() {
    for d in [1.0, -1.0] {
        let g = GeneralEquationSpec::new(0.0, 0.0, 0.5, 0.5, 2.5, 0.5, d).unwrap();
        for j in 1..=3 {
            let b = 0.2;
            let e = similarity_exponents(&g, b);
            let table = coefficients(&g, &e, j, 40, wright_seed(&g, j, b)).unwrap();
            for (x, y) in [(0.4, 1.0), (0.9, 0.7), (1.5, 2.0)] {
                let s = eval_selfsimilar(&g, &e, &table, x, y).unwrap().value.re;
                let w = eval_gen_wright_case(&g, j, b, x, y, 1e-13).unwrap().value.re;
                assert!((s - w).abs() <= 1e-12 * w.abs().max(1e-300), "d={d} j={j} ({x},{y}): {s} vs {w}");
            }
        }
    }
}

#[test]
fn invariant_under_scaling() {
    let g = GeneralEquationSpec::new(0.5, 0.25, 0.5, 0.5, 2.5, 0.5, 1.0).unwrap();
    let b = 0.3;
    let e = similarity_exponents(&g, b);
    let table = coefficients(&g, &e, 1, 30, 1.0).unwrap();
    let (x, y) = (0.8, 1.1);
    let u = eval_selfsimilar(&g, &e, &table, x, y).unwrap().value.re;
    for mu in [0.5f64, 1.7, 3.0] {
        let lam = mu.powf(-e.y_exp / e.a);
        let v = eval_selfsimilar(&g, &e, &table, lam * x, mu * y).unwrap().value.re;
        assert!(rel_err(v / u, mu.powf(b)) <= 1e-12);
    }
}

// D^{0.7,0.3}_y u = ∂⁴_x u with u = φ(−0.175, 1, −x y^{−0.175}), by quadrature.
#[test]
fn wright_case_solves_fourth_order_equation() {
    let spec = EquationSpec::new(2, 0.7, 0.3).unwrap();
    let c = Complex64::new(-1.0, 0.0);
    // pde_residual carries the n = 2 sign (−1); this equation has d = c⁴ = +1
    let u = move |x: f64, y: f64| eval_wright_case(4, 0.7, 0.0, c, x, y, 1e-14).unwrap().value.re;
    let opts = ResidualOptions { h: 0.02, sing: Singularity::power(0.0), hilfer: HilferOptions::default() };
    let r = pde_residual(&u, &spec, 0.5, 0.8, opts).unwrap();
    let time = r.time_term;
    let space = -r.space_term;
    let rel = (time - space).abs() / time.abs().max(1.0);
    assert!(rel < 1e-5, "time {time} space {space} rel {rel:e}");
}
