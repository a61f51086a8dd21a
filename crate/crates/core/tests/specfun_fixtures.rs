mod common;

use common::{load, rel_err};
use hilfer::specfun::{gen_wright, mittag_leffler, recip_gamma, wright_phi, GenWrightParams, WrightParams};
use num_complex::Complex64;

#[test]
fn recip_gamma_reference_values() {
    for row in load("recip_gamma.txt") {
        let (x, want) = (row[0], row[1]);
        let got = recip_gamma(x);
        assert!(rel_err(got, want) <= 1e-14, "x={x}: {got:e} vs {want:e} ({:e})", rel_err(got, want));
    }
}

#[test]
fn wright_phi_reference_values() {
    for row in load("wright_phi.txt") {
        let p = WrightParams::new(row[0], row[1]).unwrap();
        let z = Complex64::new(row[2], row[3]);
        let want = Complex64::new(row[4], row[5]);
        let got = wright_phi(&p, z, 1e-13).unwrap();
        assert!(got.converged());
        let err = (got.value - want).norm() / want.norm();
        assert!(err <= 1e-12, "{row:?}: {:?} rel {err:e}", got.value);
    }
}

#[test]
fn gen_wright_reference_values() {
    for row in load("gen_wright.txt") {
        let p = GenWrightParams::new(row[0], row[1], row[2], row[3]).unwrap();
        let z = Complex64::new(row[4], row[5]);
        let want = Complex64::new(row[6], row[7]);
        let got = gen_wright(&p, z, 1e-13).unwrap();
        assert!(got.converged());
        let err = (got.value - want).norm() / want.norm();
        assert!(err <= 1e-12, "{row:?}: {:?} rel {err:e}", got.value);
    }
}

#[test]
fn mittag_leffler_reference_values() {
    for row in load("mittag_leffler.txt") {
        let z = Complex64::new(row[1], row[2]);
        let want = Complex64::new(row[3], row[4]);
        let got = mittag_leffler(row[0], z, 1e-13).unwrap();
        assert!(got.converged());
        let err = (got.value - want).norm() / want.norm();
        assert!(err <= 1e-12, "{row:?}: {:?} rel {err:e}", got.value);
    }
}
