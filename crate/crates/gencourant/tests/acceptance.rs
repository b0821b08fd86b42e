//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed here and never adjusted to the data.

use gencourant_core::check::{max_abs, max_abs_diff, Residual};
use gencourant_core::expr::Differentiator;
use gencourant_core::gconn::{
    expected_dimension, lc_parameter_dimension, lc_parameter_dimension_with, restrict2, scalar_e, scalar_g, validate_params,
    ClosedForms, ConnParams, FrameTensor, Policy, Provenance, QuadraticLieAlgebra, Rational, TwistedPicture,
};
use gencourant_core::gtb::{anchor, d_map, lie_bracket, pairing, vector_apply, Dorfman, GenSection};
use gencourant_core::random::{near_identity_metric, poly, poly_form, poly_tensor, safe_expr};
use gencourant_core::sample::Sampler;
use gencourant_core::streff::{central_residuals, equivalence_report, transport_identity, Background, SymplecticPackage, Verdict};
use gencourant_core::{Chart, Expr, TensorField, Variance};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

const TOL_AXIOMS: f64 = 1e-9;
const TOL_MIN_TORSION: f64 = 1e-10;
const TOL_MIN_RE: f64 = 1e-10;
const TOL_MIN_RG: f64 = 1e-9;
const TOL_SYMMETRIES: f64 = 1e-9;
const TOL_SCALARS: f64 = 1e-9;
const TOL_RICCOMP: f64 = 1e-9;
const TOL_TRACES: f64 = 1e-10;
const TOL_CENTRAL: f64 = 1e-9;
const TOL_TRANSPORT: f64 = 1e-9;
const FD_RATIO_BAND: (f64, f64) = (80.0, 120.0);

type Outcome = Result<String, String>;

fn chart(n: usize, seed: u64, points: usize) -> Arc<Chart> {
    let names = ["x", "y", "z", "w"];
    Arc::new(Chart::new(&names[..n]).unwrap().with_sampling(seed, points))
}

fn worst(rs: impl IntoIterator<Item = Residual>) -> Residual {
    rs.into_iter().fold(Residual::zero(), Residual::max)
}

fn below(label: &str, r: &Residual, tol: f64) -> Outcome {
    let msg = format!("{label} max {:.2e} (tol {tol:.0e})", r.value);
    if r.value <= tol {
        Ok(msg)
    } else {
        Err(format!("{msg} at {:?}", r.point))
    }
}

fn all_of(parts: Vec<Outcome>) -> Outcome {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for p in parts {
        match p {
            Ok(m) => ok.push(m),
            Err(m) => bad.push(m),
        }
    }
    if bad.is_empty() {
        Ok(ok.join("; "))
    } else {
        Err(bad.join("; "))
    }
}

fn section(c: &Arc<Chart>, s: &mut Sampler) -> GenSection {
    let n = c.dim();
    let x = (0..n).map(|_| poly(c, s, 2, 0.8)).collect();
    let xi = (0..n).map(|_| poly(c, s, 2, 0.8)).collect();
    GenSection::new(c.clone(), x, xi).unwrap()
}

fn courant_axioms() -> Outcome {
    let mut res = [Residual::zero(), Residual::zero(), Residual::zero(), Residual::zero()];
    for seed in 0..20u64 {
        let n = 2 + (seed % 2) as usize;
        let c = chart(n, 100 + seed, 8);
        let mut s = Sampler::new(1000 + seed);
        let dor = Dorfman::from_potential(&poly_form(&c, 2, &mut s, 0.8)).unwrap();
        let (a, b, e) = (section(&c, &mut s), section(&c, &mut s), section(&c, &mut s));
        let f = poly(&c, &mut s, 2, 1.0);
        let br = |p: &GenSection, q: &GenSection| dor.bracket(p, q);
        let mut d = Differentiator::new();
        let pts = c.sample_points();

        let lhs = br(&a, &br(&b, &e));
        let rhs = br(&br(&a, &b), &e).add(&br(&b, &br(&a, &e)));
        res[0] = res[0].clone().max(lhs.sub(&rhs).max_abs().unwrap());

        let ra = anchor(&a);
        let lhs = vector_apply(&ra, &pairing(&b, &e), &mut d);
        let rhs = pairing(&br(&a, &b), &e) + pairing(&b, &br(&a, &e));
        res[1] = res[1].clone().max(max_abs(&[lhs - rhs], &pts).unwrap());

        let sym = br(&a, &b).add(&br(&b, &a));
        res[2] = res[2].clone().max(sym.sub(&d_map(c.clone(), &pairing(&a, &b))).max_abs().unwrap());

        let morph = max_abs_diff(&anchor(&br(&a, &b)), &lie_bracket(&ra, &anchor(&b), &mut d), &pts).unwrap();
        let lhs = br(&a, &b.scale(&f));
        let rhs = br(&a, &b).scale(&f).add(&b.scale(&vector_apply(&ra, &f, &mut d)));
        let fl = lhs.sub(&rhs).max_abs().unwrap();
        let rho_d = max_abs(&anchor(&d_map(c.clone(), &f)), &pts).unwrap();
        res[3] = worst([res[3].clone(), morph, fl, rho_d]);
    }
    all_of(vec![
        below("Leibniz", &res[0], TOL_AXIOMS),
        below("invariance", &res[1], TOL_AXIOMS),
        below("symmetric part", &res[2], TOL_AXIOMS),
        below("anchor/Leibniz rule", &res[3], TOL_AXIOMS),
    ])
}

/// Curved metric and non-constant closed `H'`.
fn picture(n: usize, seed: u64) -> TwistedPicture {
    let c = chart(n, seed, 6);
    let mut s = Sampler::new(seed);
    let g = near_identity_metric(&c, &mut s, 1.0, 0.15);
    let h = if n == 3 {
        poly_form(&c, 3, &mut s, 0.5)
    } else {
        TensorField::zeros(c.clone(), vec![Variance::Down; 3])
    };
    TwistedPicture::new(&g, &h).unwrap()
}

fn scalar_diff(a: &Expr, b: &Expr, c: &Chart) -> Residual {
    max_abs(&[a - b], &c.sample_points()).unwrap()
}

fn minimal_connection() -> Outcome {
    let (mut t, mut re, mut rg) = (Residual::zero(), Residual::zero(), Residual::zero());
    for seed in 0..4u64 {
        let tp = picture(2 + (seed % 2) as usize, 200 + seed);
        let c = tp.frame().chart().clone();
        let m = tp.minimal();
        t = t.max(m.torsion().max_abs().unwrap());
        let ric = m.curvature().ricci;
        re = re.max(max_abs(&[scalar_e(&ric)], &c.sample_points()).unwrap());
        let riem = tp.metric();
        let expect = riem.curvature().scalar - 0.5 * riem.form_inner(tp.h_prime(), tp.h_prime()).unwrap();
        rg = rg.max(scalar_diff(&scalar_g(&ric, &tp.generalized_metric_inverse()), &expect, &c));
    }
    all_of(vec![
        below("torsion", &t, TOL_MIN_TORSION),
        below("R_E", &re, TOL_MIN_RE),
        below("R_G - R(g) + <H',H'>/2", &rg, TOL_MIN_RG),
    ])
}

fn random_params(tp: &TwistedPicture, seed: u64) -> ConnParams {
    let c = tp.frame().chart();
    let mut s = Sampler::new(seed);
    let j = poly_tensor(c, vec![Variance::Up; 3], &mut s, 0.3).antisymmetrize(&[1, 2]).unwrap();
    let w = poly_tensor(c, vec![Variance::Down; 3], &mut s, 0.3).antisymmetrize(&[1, 2]).unwrap();
    validate_params(&j, &w, Policy::Project).unwrap()
}

fn symmetry_residual(r: &FrameTensor) -> Residual {
    worst(
        [([0, 1, 3, 2], 1.0), ([1, 0, 2, 3], 1.0), ([3, 2, 1, 0], -1.0), ([2, 3, 0, 1], -1.0)]
            .map(|(perm, sign)| r.add(&r.permute(&perm).scale(sign)).max_abs().unwrap()),
    )
}

fn curvature_symmetries() -> Outcome {
    let (mut sy, mut b0, mut bt) = (Residual::zero(), Residual::zero(), Residual::zero());
    for seed in 0..3u64 {
        let tp = picture(3, 300 + seed);
        let conn = tp.with_params(&random_params(&tp, 310 + seed));
        let r = conn.riemann();
        sy = sy.max(symmetry_residual(&r));
        b0 = b0.max(conn.bianchi_residual(&r).max_abs().unwrap());

        let c = tp.frame().chart().clone();
        let mut s = Sampler::new(320 + seed);
        let k = FrameTensor::from_fn(c.clone(), 3, |_| poly(&c, &mut s, 1, 0.2));
        let k = k.sub(&k.permute(&[0, 2, 1])).scale(0.5);
        let tor = tp.minimal().add_tensor(&k, Provenance::Custom);
        assert!(tor.torsion().max_abs().unwrap().value > 1e-3, "torsionful case lost its torsion");
        let r = tor.riemann();
        sy = sy.max(symmetry_residual(&r));
        bt = bt.max(tor.bianchi_residual(&r).max_abs().unwrap());
    }
    all_of(vec![
        below("symmetries", &sy, TOL_SYMMETRIES),
        below("Bianchi (torsion-free)", &b0, TOL_SYMMETRIES),
        below("Bianchi (torsionful)", &bt, TOL_SYMMETRIES),
    ])
}

/// Ten connections with random valid `(J, W)` on curved backgrounds,
/// alternating `n = 2` and `n = 3`.
fn ten_connections() -> Vec<(TwistedPicture, ConnParams)> {
    (0..10u64)
        .map(|i| {
            let tp = picture(2 + (i % 2) as usize, 400 + i);
            let p = random_params(&tp, 450 + i);
            (tp, p)
        })
        .collect()
}

fn scalar_closed_forms(cases: &[(TwistedPicture, ConnParams)]) -> Outcome {
    let (mut e, mut g) = (Residual::zero(), Residual::zero());
    for (tp, p) in cases {
        let c = tp.frame().chart().clone();
        let ric = tp.with_params(p).curvature().ricci;
        let cf = ClosedForms::new(tp, p);
        e = e.max(scalar_diff(&scalar_e(&ric), &cf.scalar_e().unwrap(), &c));
        g = g.max(scalar_diff(&scalar_g(&ric, &tp.generalized_metric_inverse()), &cf.scalar_g().unwrap(), &c));
    }
    all_of(vec![below("R_E", &e, TOL_SCALARS), below("R_G", &g, TOL_SCALARS)])
}

fn ricci_closed_form(cases: &[(TwistedPicture, ConnParams)]) -> Outcome {
    let mut r = Residual::zero();
    for (tp, p) in cases {
        let c = tp.frame().chart().clone();
        let ric = tp.with_params(p).curvature().ricci;
        let mixed = restrict2(&ric, &tp.psi_matrix(1.0), &tp.psi_matrix(-1.0));
        let cf = ClosedForms::new(tp, p).ricci_compat().unwrap();
        r = r.max(max_abs_diff(mixed.components(), cf.components(), &c.sample_points()).unwrap());
    }
    below("Ric(V+, V-)", &r, TOL_RICCOMP)
}

fn traces(cases: &[(TwistedPicture, ConnParams)]) -> Outcome {
    let (mut x, mut v) = (Residual::zero(), Residual::zero());
    for (tp, p) in cases {
        let pts = tp.frame().chart().sample_points();
        let conn = tp.with_params(p);
        let g = tp.metric().metric();
        let two_j: Vec<Expr> = p.j_trace(g).components().iter().map(|e| 2.0 * e).collect();
        x = x.max(max_abs_diff(conn.characteristic_vector_field().components(), &two_j, &pts).unwrap());
        let w1 = p.w_trace(tp.metric().inverse());
        v = v.max(max_abs_diff(conn.v_trace(g).components(), w1.components(), &pts).unwrap());
    }
    all_of(vec![below("X - 2J'", &x, TOL_TRACES), below("V-trace - W'", &v, TOL_TRACES)])
}

fn random_background(n: usize, seed: u64) -> Background {
    let c = chart(n, seed, 6);
    let mut s = Sampler::new(seed);
    let g = near_identity_metric(&c, &mut s, 1.0, 0.15);
    let b = poly_form(&c, 2, &mut s, 0.4);
    let phi = poly(&c, &mut s, 2, 0.5);
    let b0 = poly_form(&c, 2, &mut s, 0.3);
    Background::from_potential(&g, &b, phi, &b0).unwrap()
}

fn central_identities() -> Outcome {
    let (mut sc, mut ri) = (Residual::zero(), Residual::zero());
    let mut min_b: f64 = f64::INFINITY;
    let mut min_beta: f64 = f64::INFINITY;
    for seed in 0..20u64 {
        let bg = random_background(2 + (seed % 2) as usize, 500 + seed);
        min_b = min_b.min(bg.b().max_abs().unwrap());
        let r = central_residuals(&bg).unwrap();
        min_beta = min_beta.min(r.beta.max_abs().unwrap().value);
        let pts = bg.chart().sample_points();
        sc = sc.max(max_abs(&[r.scalar], &pts).unwrap());
        ri = ri.max(max_abs(r.ricci.components(), &pts).unwrap());
    }
    if min_b < 1e-3 {
        return Err(format!("a background has B = 0 (max |B| = {min_b:.1e})"));
    }
    // The identities must be tested off-shell.
    if min_beta < 1e-3 {
        return Err(format!("a background is nearly on-shell (max |beta| = {min_beta:.1e})"));
    }
    all_of(vec![
        below("R_G - beta(phi)", &sc, TOL_CENTRAL),
        below("Ric(Psi+,Psi-) - beta(g) + beta(B)", &ri, TOL_CENTRAL),
    ])
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn dimension() -> Outcome {
    let d2 = lc_parameter_dimension(2);
    let d3 = lc_parameter_dimension(3);
    let g = vec![q(2, 1), q(1, 3), q(0, 1), q(1, 3), q(1, 1), q(1, 5), q(0, 1), q(1, 5), q(3, 2)];
    let d3g = lc_parameter_dimension_with(&g, 3);
    let msg = format!("n=2: {d2}, n=3: {d3}, n=3 curved g: {d3g}");
    if d2 == 4 && d3 == 16 && d3g == 16 && expected_dimension(2) == 4 && expected_dimension(3) == 16 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn quadratic_lie_algebra() -> Outcome {
    let qla = QuadraticLieAlgebra::so3_pair();
    let lc = qla.lc();
    let zero = q(0, 1);
    let count = |v: Vec<Rational>| v.iter().filter(|x| **x != zero).count();
    let (t, p, m) = (count(qla.torsion(&lc)), count(qla.pairing_residual(&lc)), count(qla.metric_residual(&lc)));
    let nonzero = lc.lowered.iter().filter(|x| **x != zero).count();
    let msg = format!("nonzero residual entries: torsion {t}, pairing {p}, metric {m}; connection has {nonzero} nonzero coefficients");
    if t == 0 && p == 0 && m == 0 && nonzero > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn even_background(n: usize, seed: u64) -> Background {
    let c = chart(n, seed, 4);
    let mut s = Sampler::new(seed);
    let g = near_identity_metric(&c, &mut s, 1.0, 0.15);
    let mut b = poly_form(&c, 2, &mut s, 0.1);
    for (i, j) in [(0, 1), (2, 3)] {
        if j < n {
            let v = b.get(&[i, j]) + 1.5;
            b.set(&[j, i], -&v);
            b.set(&[i, j], v);
        }
    }
    let phi = poly(&c, &mut s, 2, 0.5);
    let b0 = poly_form(&c, 2, &mut s, 0.3);
    Background::from_potential(&g, &b, phi, &b0).unwrap()
}

fn flat_background() -> Background {
    let c = chart(2, 1, 6);
    let g = TensorField::symmetric_from_upper(c.clone(), &[vec![Expr::one(), Expr::zero()], vec![Expr::one()]]).unwrap();
    let b = TensorField::antisymmetric_from_upper(c.clone(), &[vec![Expr::constant(2.0)]]).unwrap();
    Background::untwisted(&g, &b, Expr::constant(0.3)).unwrap()
}

fn symplectic_equivalence() -> Outcome {
    let mut t = Residual::zero();
    for i in 0..10u64 {
        let n = if i < 6 { 2 } else { 4 };
        let bg = even_background(n, 600 + i);
        let pkg = SymplecticPackage::new(&bg).unwrap();
        t = t.max(transport_identity(&bg, &pkg).unwrap());
    }
    let flat = equivalence_report(&flat_background()).unwrap();
    let flat_msg = format!(
        "flat: beta {:.1e}, symplectic {:.1e}, {}",
        flat.beta.value, flat.symplectic.value, flat.verdict
    );
    let flat_ok = if flat.verdict == Verdict::BothOnShell {
        Ok(flat_msg)
    } else {
        Err(flat_msg)
    };
    all_of(vec![below("transport identity", &t, TOL_TRANSPORT), flat_ok])
}

fn fd_convergence() -> Outcome {
    let c = Chart::new(&["x", "y"]).unwrap();
    let mut s = Sampler::new(700);
    let central = |e: &Expr, p: &[f64], var: usize, h: f64| {
        let (mut a, mut b) = (p.to_vec(), p.to_vec());
        a[var] += h;
        b[var] -= h;
        (e.eval(&a).unwrap() - e.eval(&b).unwrap()) / (2.0 * h)
    };
    let mut ratios = Vec::new();
    for i in 0..50 {
        let e = safe_expr(&c, &mut s, 3);
        let p = [s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0)];
        let var = i % 2;
        let exact = e.diff(var).eval(&p).unwrap();
        let e1 = (central(&e, &p, var, 1e-3) - exact).abs();
        let e2 = (central(&e, &p, var, 1e-4) - exact).abs();
        ratios.push(e1 / e2);
    }
    let bad: Vec<(usize, f64)> = ratios
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, r)| !(FD_RATIO_BAND.0..=FD_RATIO_BAND.1).contains(&r))
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let msg = format!("50 expressions, ratios in [{lo:.1}, {hi:.1}] (band {:?})", FD_RATIO_BAND);
    if bad.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; outside band: {bad:?}"))
    }
}

fn main() -> ExitCode {
    let cases = ten_connections();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("Courant axioms", Box::new(courant_axioms)),
        ("minimal connection", Box::new(minimal_connection)),
        ("curvature symmetries and Bianchi", Box::new(curvature_symmetries)),
        ("scalar curvature closed forms", Box::new(|| scalar_closed_forms(&cases))),
        ("Ricci compatibility closed form", Box::new(|| ricci_closed_form(&cases))),
        ("characteristic field and V-trace", Box::new(|| traces(&cases))),
        ("central identities", Box::new(central_identities)),
        ("Levi-Civita parameter dimension", Box::new(dimension)),
        ("quadratic Lie algebra so(3)+so(3)", Box::new(quadratic_lie_algebra)),
        ("symplectic equivalence", Box::new(symplectic_equivalence)),
        ("finite-difference convergence", Box::new(fd_convergence)),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(m) => println!("PASS {:>2} {title}: {m} [{secs:.1}s]", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {m} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
