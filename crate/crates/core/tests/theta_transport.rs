mod common;

use common::{chart, near_symplectic, residual, section};
use gencourant_core::gconn::CourantFrame;
use gencourant_core::gtb::{a_dorfman, pairing, theta_pullback, Dorfman, GenSection, ThetaTwist};
use gencourant_core::random::poly_form;
use gencourant_core::sample::Sampler;
use gencourant_core::tensor::exterior_derivative;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn theta_twist_gives_a_dorfman_bracket(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 4])) {
        let c = chart(n, seed);
        let mut s = Sampler::new(seed);
        let b = near_symplectic(&c, &mut s, 1.5, 0.2);
        let h = if n == 4 { exterior_derivative(&poly_form(&c, 2, &mut s, 0.3)).unwrap() } else { Dorfman::untwisted(c.clone()).h().clone() };
        let tw = ThetaTwist::from_b(&b).unwrap();
        let dor = Dorfman::new(h.clone()).unwrap();
        let db = exterior_derivative(&b).unwrap();
        let hp = h.add(&db).unwrap();
        let h_a = theta_pullback(&hp, tw.theta());
        let (x, y) = (section(&c, &mut s), section(&c, &mut s));

        let lhs = tw.inverse(&dor.bracket(&tw.apply(&x), &tw.apply(&y)));
        let rhs = a_dorfman(&x, &y, tw.theta(), Some(&db), &h_a);
        prop_assert!(residual(&lhs, &rhs) < TOL);

        // 𝓕_θ is orthogonal and invertible
        let p = pairing(&tw.apply(&x), &tw.apply(&y)) - pairing(&x, &y);
        prop_assert!(common::scalar_residual(&p, &c) < TOL);
        prop_assert!(residual(&tw.inverse(&tw.apply(&x)), &x) < TOL);
    }
}

#[test]
fn transported_frame_structure_is_a_dorfman() {
    let c = chart(4, 3);
    let mut s = Sampler::new(3);
    let b = near_symplectic(&c, &mut s, 1.5, 0.2);
    let h = exterior_derivative(&poly_form(&c, 2, &mut s, 0.3)).unwrap();
    let tw = ThetaTwist::from_b(&b).unwrap();
    let frame = CourantFrame::dorfman(&Dorfman::new(h.clone()).unwrap());
    let moved = frame.transport(&tw.matrix(), &tw.inverse_matrix());
    let db = exterior_derivative(&b).unwrap();
    let h_a = theta_pullback(&h.add(&db).unwrap(), tw.theta());
    let r = 8;
    let mut worst: f64 = 0.0;
    for a in 0..r {
        for bb in 0..r {
            let ea = GenSection::frame(c.clone(), a);
            let eb = GenSection::frame(c.clone(), bb);
            let br = a_dorfman(&ea, &eb, tw.theta(), Some(&db), &h_a).components();
            let diff: Vec<_> = (0..r).map(|k| moved.c(k, a, bb) - &br[k]).collect();
            worst = worst.max(gencourant_core::check::max_abs(&diff, &c.sample_points()).unwrap().value);
        }
    }
    assert!(worst < TOL, "{worst}");
    // anchor of e_{n+i} (the 1-form slot) is θ(dx^i)
    for i in 0..4 {
        for mu in 0..4 {
            let d = moved.anchor(4 + i, mu) - tw.theta().get(&[mu, i]);
            assert!(common::scalar_residual(&d, &c) < 1e-12);
        }
    }
}
