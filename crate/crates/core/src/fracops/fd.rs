//! Finite-difference weights (Fornberg's recursion) and spatial derivatives.

/// Weights for the `order`-th derivative at 0 from samples at `offsets`.
pub fn fd_weights(order: usize, offsets: &[f64]) -> Vec<f64> {
    let np = offsets.len();
    assert!(np > order, "stencil too small for derivative order");
    // c[j][m]: weight of node j for derivative m
    let mut c = vec![vec![0.0; order + 1]; np];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..np {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for m in (1..=mn).rev() {
                    c[i][m] = c1 * (m as f64 * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for m in (1..=mn).rev() {
                c[j][m] = (c4 * c[j][m] - m as f64 * c[j][m - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Minimal second-order central stencil for the `order`-th derivative, as
/// (integer offset, weight) pairs with zero weights dropped.
pub fn central_weights(order: u32) -> Vec<(i32, f64)> {
    let r = order.div_ceil(2).max(1) as i32;
    let offs: Vec<f64> = (-r..=r).map(|i| i as f64).collect();
    let w = fd_weights(order as usize, &offs);
    (-r..=r).zip(w).filter(|(_, w)| *w != 0.0).collect()
}

/// d^order u / dx^order at x by central differences with steps h and h/2
/// combined by one Richardson step (fourth-order accurate).
pub fn x_derivative(u: &dyn Fn(f64) -> f64, order: u32, x: f64, h: f64) -> f64 {
    assert!((1..=8).contains(&order), "derivative order must lie in 1..=8");
    let w = central_weights(order);
    let d = |h: f64| -> f64 {
        let mut acc = 0.0;
        for (off, c) in &w {
            acc += c * u(x + *off as f64 * h);
        }
        acc / h.powi(order as i32)
    };
    let coarse = d(h);
    let fine = d(0.5 * h);
    (4.0 * fine - coarse) / 3.0
}
