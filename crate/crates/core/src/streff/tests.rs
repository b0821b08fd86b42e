use super::*;
use crate::chart::Chart;
use crate::check::max_abs;
use crate::error::Error;
use crate::expr::Expr;
use crate::gconn::scalar_g;
use crate::random::{near_identity_metric, poly, poly_form};
use crate::sample::Sampler;
use crate::gtb::theta_pullback;
use crate::tensor::{TensorField, Variance};
use alloc::sync::Arc;
use alloc::vec;
use alloc::string::ToString;
use alloc::vec::Vec;

fn chart(n: usize) -> Arc<Chart> {
    let names = ["x", "y", "z", "w"];
    Arc::new(Chart::new(&names[..n]).unwrap().with_sampling(3, 6))
}

fn diff(a: &[Expr], b: &[Expr], c: &Chart) -> f64 {
    let d: Vec<Expr> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    max_abs(&d, &c.sample_points()).unwrap().value
}

fn scalar(e: &Expr, c: &Chart) -> f64 {
    max_abs(&[e.clone()], &c.sample_points()).unwrap().value
}

fn flat(c: &Arc<Chart>) -> TensorField {
    TensorField::from_fn(c.clone(), vec![Variance::Down; 2], |i| {
        if i[0] == i[1] {
            Expr::one()
        } else {
            Expr::zero()
        }
    })
}

/// Random background; on two dimensions `B` stays invertible on the unit box.
fn random_bg(n: usize, seed: u64) -> Background {
    let c = chart(n);
    let mut s = Sampler::new(seed);
    let g = near_identity_metric(&c, &mut s, 1.0, 0.15);
    let b = if n == 2 {
        let b01 = poly(&c, &mut s, 2, 0.2) + 1.5;
        TensorField::antisymmetric_from_upper(c.clone(), &[vec![b01]]).unwrap()
    } else if n == 4 {
        let mut b = poly_form(&c, 2, &mut s, 0.1);
        for (i, j) in [(0, 1), (2, 3)] {
            let v = b.get(&[i, j]) + 1.5;
            b.set(&[j, i], -&v);
            b.set(&[i, j], v);
        }
        b
    } else {
        poly_form(&c, 2, &mut s, 0.4)
    };
    let phi = poly(&c, &mut s, 2, 0.5);
    let h = if n >= 3 {
        poly_form(&c, 3, &mut s, 0.4)
    } else {
        TensorField::zeros(c.clone(), vec![Variance::Down; 3])
    };
    // Closed on three dimensions; otherwise take an exact twist.
    if n > 3 {
        let b0 = poly_form(&c, 2, &mut s, 0.3);
        return Background::from_potential(&g, &b, phi, &b0).unwrap();
    }
    Background::new(&g, &b, phi, &h).unwrap()
}

fn flat_bg(n: usize) -> Background {
    let c = chart(n);
    let b = TensorField::antisymmetric_from_upper(
        c.clone(),
        &(0..n - 1).map(|i| (i + 1..n).map(|j| Expr::constant(if j == i + 1 { 2.0 } else { 0.0 })).collect()).collect::<Vec<_>>(),
    )
    .unwrap();
    Background::untwisted(&flat(&c), &b, Expr::constant(0.3)).unwrap()
}

#[test]
fn flat_background_has_zero_beta() {
    let bg = flat_bg(2);
    let b = beta_all(&bg).unwrap();
    assert_eq!(b.max_abs().unwrap().value, 0.0);
    assert_eq!(scalar(&b.beta_phi_prime, bg.chart()), 0.0);
}

#[test]
fn beta_forms_agree() {
    for (n, seed) in [(2, 1), (3, 2), (3, 3)] {
        let bg = random_bg(n, seed);
        let c = bg.chart();
        let a = beta_all(&bg).unwrap();
        let i = beta_index(&bg).unwrap();
        assert!(diff(a.beta_g.components(), i.beta_g.components(), c) < 1e-9);
        assert!(diff(a.beta_b.components(), i.beta_b.components(), c) < 1e-9);
        assert!(scalar(&(&a.beta_phi - &i.beta_phi), c) < 1e-9);
        assert!(scalar(&(&a.beta_phi_prime - &i.beta_phi_prime), c) < 1e-9);
        let conf = beta_b_conformal(&bg).unwrap();
        assert!(diff(a.beta_b.components(), conf.components(), c) < 1e-9);
        for b in [&a, &i] {
            assert!(scalar(&b.prime_relation(bg.metric().inverse()), c) < 1e-12);
        }
        a.beta_g.check_symmetric(0, 1, 1e-10).unwrap();
        a.beta_b.check_antisymmetric(&[0, 1], 1e-10).unwrap();
    }
}

#[test]
fn central_identities_hold_off_shell() {
    for (n, seed) in [(2, 4), (2, 5), (3, 6)] {
        let bg = random_bg(n, seed);
        let r = central_residuals(&bg).unwrap();
        let m = r.max_abs().unwrap();
        assert!(m.value < 1e-9, "n={n}: {m:?}");
        assert!(r.beta.max_abs().unwrap().value > 1e-3);
    }
}

#[test]
fn central_identities_on_flat_background() {
    let bg = flat_bg(2);
    let r = central_residuals(&bg).unwrap();
    assert_eq!(r.max_abs().unwrap().value, 0.0);
}

#[test]
fn tangent_algebroid_reproduces_christoffel_symbols() {
    let c = chart(3);
    let mut s = Sampler::new(7);
    let g = near_identity_metric(&c, &mut s, 1.0, 0.2);
    let alg = Arc::new(LieAlgebroid::tangent(c.clone()));
    let lc = AlgebroidConnection::levi_civita(alg, g.components().to_vec()).unwrap();
    let m = crate::riemann::Riemannian::new(&g).unwrap();
    let ours: Vec<Expr> = (0..27).map(|k| lc.gamma(k / 9, (k / 3) % 3, k % 3).clone()).collect();
    assert!(diff(&ours, m.christoffel(), &c) < 1e-10);
    let curv = lc.curvature();
    assert!(scalar(&(&curv.scalar - &m.curvature().scalar), &c) < 1e-9);
}

#[test]
fn constant_data_give_flat_algebroid_connection() {
    let c = chart(2);
    let theta = TensorField::antisymmetric_from_upper(c.clone(), &[vec![Expr::constant(0.5)]]).unwrap();
    let theta = TensorField::new(c.clone(), vec![Variance::Up; 2], theta.into_components()).unwrap();
    let big_g = TensorField::symmetric_from_upper(
        c.clone(),
        &[vec![Expr::constant(2.0), Expr::constant(0.3)], vec![Expr::constant(1.0)]],
    )
    .unwrap();
    let lc = lie_algebroid_lc(&theta, None, &big_g).unwrap();
    assert!((0..8).all(|k| lc.gamma(k / 4, (k / 2) % 2, k % 2).is_zero()));
    assert!(lc.curvature().scalar.simplify().is_zero());
}

#[test]
fn koszul_algebroid_of_inverse_b() {
    let bg = random_bg(2, 8);
    let pkg = SymplecticPackage::new(&bg).unwrap();
    let lc = pkg.connection();
    assert!(lc.algebroid().jacobi_residual().unwrap().value < 1e-9);
    assert!(lc.torsion_residual().unwrap().value < 1e-10);
    assert!(lc.metric_residual().unwrap().value < 1e-10);
    // θ: T*M → TM identifies the algebroid with TM and G⁻¹ with g.
    let c = bg.chart();
    let m = bg.metric();
    assert!(scalar(&(&pkg.curvature().scalar - &m.curvature().scalar), c) < 1e-8);
    let lap = lc.laplacian(bg.phi());
    assert!(scalar(&(lap - m.laplacian(bg.phi()).unwrap()), c) < 1e-9);
}

#[test]
fn koszul_jacobi_needs_the_twist() {
    let c = chart(4);
    let mut s = Sampler::new(9);
    let mut b = flat_bg(4).b().clone();
    b.set(&[0, 2], poly(&c, &mut s, 2, 0.2));
    b.set(&[2, 0], -b.get(&[0, 2]));
    let tw = crate::gtb::ThetaTwist::from_b(&b).unwrap();
    let db = crate::tensor::exterior_derivative(&b).unwrap();
    let good = LieAlgebroid::cotangent(tw.theta(), Some(&db));
    assert!(good.jacobi_residual().unwrap().value < 1e-9);
    let bad = LieAlgebroid::cotangent(tw.theta(), None);
    assert!(bad.jacobi_residual().unwrap().value > 1e-4);
    let big_g = flat(&c);
    assert!(matches!(
        lie_algebroid_lc(tw.theta(), None, &big_g),
        Err(Error::NotTwistedPoisson(_))
    ));
}

#[test]
fn symplectic_flat_and_odd() {
    let bg = flat_bg(2);
    let r = symplectic_residuals(&bg).unwrap();
    assert_eq!(r.max_abs().unwrap().value, 0.0);
    assert!(matches!(symplectic_residuals(&random_bg(3, 10)), Err(Error::OddDimension(3))));
    let c = chart(2);
    let b = TensorField::zeros(c.clone(), vec![Variance::Down; 2]);
    let bg = Background::untwisted(&flat(&c), &b, Expr::zero()).unwrap();
    assert!(matches!(symplectic_residuals(&bg), Err(Error::SingularB { .. })));
}

#[test]
fn symplectic_scalar_is_transported_curvature() {
    for seed in [11, 12] {
        let bg = random_bg(2, seed);
        let c = bg.chart();
        let pkg = SymplecticPackage::new(&bg).unwrap();
        let r = symplectic_residuals_with(&bg, &pkg);
        let conn = theta_connection(&bg, pkg.twist()).unwrap();
        let rg = scalar_g(&conn.curvature().ricci, &theta_metric_inverse(&bg, pkg.twist()).unwrap());
        assert!(scalar(&(&r.scalar - &rg), c) < 1e-9);
        // n = 2: H'_θ vanishes and the scalar equation is the dilaton beta function.
        assert!(pkg.h_theta().max_abs().unwrap() == 0.0);
        let beta = beta_all(&bg).unwrap();
        assert!(scalar(&(&r.scalar - &beta.beta_phi), c) < 1e-9);
    }
}

#[test]
fn symplectic_tensors_are_pulled_back_beta_functions() {
    let bg = random_bg(4, 13);
    let c = bg.chart();
    let pkg = SymplecticPackage::new(&bg).unwrap();
    let r = symplectic_residuals_with(&bg, &pkg);
    let beta = beta_all(&bg).unwrap();
    let th = pkg.theta();
    let pull = |t: &TensorField| theta_pullback(t, th).into_components();
    assert!(diff(r.sym.components(), &pull(&beta.beta_g), c) < 1e-9);
    assert!(diff(r.skew.components(), &pull(&beta.beta_b), c) < 1e-9);
    assert!(beta.beta_b.max_abs().unwrap() > 1e-3);
}

#[test]
fn equivalence_flat_and_random() {
    let rep = equivalence_report(&flat_bg(2)).unwrap();
    assert_eq!(rep.verdict, Verdict::BothOnShell);
    assert_eq!(rep.verdict.to_string(), "equivalent: both on-shell");
    for seed in [14, 15] {
        let bg = random_bg(2, seed);
        let rep = equivalence_report(&bg).unwrap();
        assert!(rep.transport.value < 1e-9, "{:?}", rep.transport);
        assert_eq!(rep.verdict, Verdict::BothOffShell);
        let scaled = equivalence_report(&bg.with_scaled_metric(2.0).unwrap()).unwrap();
        assert_eq!(scaled.verdict, rep.verdict);
        assert!(scaled.transport.value < 1e-9);
    }
}
