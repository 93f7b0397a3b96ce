use monodromy_core::weyl::{min_eigenvalue, op_exponential, quantize, real_symbol, FnSymbol, PhaseGrid};
use monodromy_core::{linalg, C64};
use proptest::prelude::{prop_assert, proptest, ProptestConfig};

#[test]
fn oscillator_spectrum() {
    let g = PhaseGrid::new(6.0, 128, 0.1).unwrap();
    let q = quantize(&real_symbol("x^2+xi^2", |x, xi| x * x + xi * xi), &g).unwrap();
    let vals = linalg::herm_eigenvalues(&q.matrix);
    for (k, v) in vals.iter().take(11).enumerate() {
        let want = (2 * k + 1) as f64 * g.hbar;
        assert!((v - want).abs() <= 5e-3 * want, "k = {k}: {v} vs {want}");
    }
    assert!((min_eigenvalue(&q.matrix).unwrap() - g.hbar).abs() < 5e-4);
}

/// `exp(-(i/ħ) Op(xξ))` solves `u_t = -(x u' + u/2)`, whose solution is
/// `e^{-t/2} u₀(e^{-t} x)`.
#[test]
fn dilation_matches_characteristics() {
    let g = PhaseGrid::new(8.0, 256, 0.1).unwrap();
    let q = quantize(&real_symbol("x*xi", |x, xi| x * xi), &g).unwrap();
    let m = op_exponential(&q.matrix, C64::new(0.0, -1.0 / g.hbar)).unwrap();
    let u0 = |x: f64| C64::new((-x * x / 0.5).exp(), 0.0) * C64::from_polar(1.0, 0.3 * x / g.hbar);
    let u: Vec<C64> = g.positions().iter().map(|&x| u0(x)).collect();
    let mu: Vec<C64> = (0..g.n).map(|i| m.row(i).iter().zip(&u).map(|(a, b)| a * b).sum()).collect();
    let e = std::f64::consts::E;
    let want: Vec<C64> = g.positions().iter().map(|&x| u0(x / e) / e.sqrt()).collect();
    let err: Vec<C64> = mu.iter().zip(&want).map(|(a, b)| a - b).collect();
    assert!(g.norm(&err) <= 1e-6 * g.norm(&u), "{}", g.norm(&err));

    let var = |v: &[C64]| {
        let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        g.positions().iter().zip(v).map(|(x, z)| x * x * z.norm_sqr()).sum::<f64>() / w
    };
    let growth = var(&mu) / var(&u);
    assert!((growth / (e * e) - 1.0).abs() < 0.05, "{growth}");
}

#[test]
fn complex_symbols_quantize_to_adjoints() {
    let g = PhaseGrid::new(3.0, 32, 0.2).unwrap();
    let a = FnSymbol::new("a", |x: f64, xi: f64| C64::new(x * xi, x - xi * xi));
    let b = FnSymbol::new("conj a", |x: f64, xi: f64| C64::new(x * xi, -(x - xi * xi)));
    let qa = quantize(&a, &g).unwrap();
    let qb = quantize(&b, &g).unwrap();
    assert!(linalg::frobenius(&(qa.matrix.adjoint() - qb.matrix)) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quantization_is_linear(c in proptest::array::uniform6(-2.0f64..2.0), s in -3.0f64..3.0) {
        let g = PhaseGrid::new(3.0, 32, 0.15).unwrap();
        let f = move |x: f64, xi: f64| c[0] + c[1] * x + c[2] * xi + c[3] * x * xi + c[4] * (x * x).sin() + c[5] * (-xi * xi).exp();
        let k = move |x: f64, xi: f64| (x - xi).cos() * x;
        let qf = quantize(&real_symbol("f", f), &g).unwrap();
        let qk = quantize(&real_symbol("k", k), &g).unwrap();
        let qs = quantize(&real_symbol("f+s*k", move |x, xi| f(x, xi) + s * k(x, xi)), &g).unwrap();
        let want = &qf.matrix + &qk.matrix * C64::new(s, 0.0);
        prop_assert!(linalg::frobenius(&(qs.matrix - want)) <= 1e-10 * (1.0 + linalg::frobenius(&qf.matrix)));
        prop_assert!(qf.hermitian_defect() == 0.0);
    }
}
