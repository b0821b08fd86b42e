mod common;

use common::{chart, residual, scalar_residual, section};
use gencourant_core::expr::Differentiator;
use gencourant_core::gconn::CourantFrame;
use gencourant_core::gtb::{anchor, b_twist, d_map, lie_bracket, pairing, vector_apply, Dorfman, GenSection};
use gencourant_core::random::{poly, poly_form};
use gencourant_core::sample::Sampler;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dorfman_bracket_is_courant(seed in any::<u64>(), n in 2usize..=3) {
        let c = chart(n, seed);
        let mut s = Sampler::new(seed);
        let dor = Dorfman::from_potential(&poly_form(&c, 2, &mut s, 0.8)).unwrap();
        let (a, b, e) = (section(&c, &mut s), section(&c, &mut s), section(&c, &mut s));
        let f = poly(&c, &mut s, 2, 1.0);
        let br = |p: &GenSection, q: &GenSection| dor.bracket(p, q);
        let mut d = Differentiator::new();

        // Leibniz identity
        let lhs = br(&a, &br(&b, &e));
        let rhs = br(&br(&a, &b), &e).add(&br(&b, &br(&a, &e)));
        prop_assert!(residual(&lhs, &rhs) < TOL);

        // invariance of the pairing
        let ra = anchor(&a);
        let lhs = vector_apply(&ra, &pairing(&b, &e), &mut d);
        let rhs = pairing(&br(&a, &b), &e) + pairing(&b, &br(&a, &e));
        prop_assert!(scalar_residual(&(lhs - rhs), &c) < TOL);

        // symmetric part
        let sym = br(&a, &b).add(&br(&b, &a));
        prop_assert!(residual(&sym, &d_map(c.clone(), &pairing(&a, &b))) < TOL);

        // anchor is a bracket morphism and the Leibniz rule in the second slot
        let lhs = anchor(&br(&a, &b));
        let rhs = lie_bracket(&ra, &anchor(&b), &mut d);
        let diff: Vec<_> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
        prop_assert!(gencourant_core::check::max_abs(&diff, &c.sample_points()).unwrap().value < TOL);
        let lhs = br(&a, &b.scale(&f));
        let rhs = br(&a, &b).scale(&f).add(&b.scale(&vector_apply(&ra, &f, &mut d)));
        prop_assert!(residual(&lhs, &rhs) < TOL);
    }

    #[test]
    fn b_transform_intertwines_twists(seed in any::<u64>(), n in 2usize..=3) {
        let c = chart(n, seed);
        let mut s = Sampler::new(seed ^ 0x5eed);
        let b0 = poly_form(&c, 2, &mut s, 0.6);
        let b = poly_form(&c, 2, &mut s, 0.6);
        let h = Dorfman::from_potential(&b0).unwrap();
        let hp = Dorfman::new(h.h().add(&gencourant_core::tensor::exterior_derivative(&b).unwrap()).unwrap()).unwrap();
        let (x, y) = (section(&c, &mut s), section(&c, &mut s));
        let lhs = b_twist(&hp.bracket(&x, &y), &b);
        let rhs = h.bracket(&b_twist(&x, &b), &b_twist(&y, &b));
        prop_assert!(residual(&lhs, &rhs) < TOL);
    }

    #[test]
    fn frame_bracket_matches_dorfman(seed in any::<u64>(), n in 2usize..=3) {
        let c = chart(n, seed);
        let mut s = Sampler::new(seed.rotate_left(7));
        let dor = Dorfman::from_potential(&poly_form(&c, 2, &mut s, 0.8)).unwrap();
        let frame = CourantFrame::dorfman(&dor);
        let (a, b) = (section(&c, &mut s), section(&c, &mut s));
        let mut d = Differentiator::new();
        let fb = frame.bracket(&a.components(), &b.components(), &mut d);
        let direct = dor.bracket(&a, &b).components();
        let diff: Vec<_> = fb.iter().zip(&direct).map(|(x, y)| x - y).collect();
        prop_assert!(gencourant_core::check::max_abs(&diff, &c.sample_points()).unwrap().value < TOL);
        prop_assert!(frame.anchor_residual().unwrap().value < TOL);
    }
}
