//! Command dispatch: each command runs a suite of checks against a scene.

use crate::error::CliError;
use crate::report::{CheckRecord, Report, SceneSummary};
use crate::scene::Scene;
use gencourant_core::check::{max_abs, max_abs_diff, Residual};
use gencourant_core::expr::{Differentiator, Expr, Tape};
use gencourant_core::gconn::{
    expected_dimension, lc_parameter_dimension_at, restrict2, scalar_e, scalar_g, ClosedForms, ConnParams, CourantFrame,
    FrameTensor, GenConnection, Provenance, TwistedPicture,
};
use gencourant_core::gtb::{anchor, b_twist, d_map, lie_bracket, pairing, theta_pullback, vector_apply, Dorfman, GenSection};
use gencourant_core::linalg;
use gencourant_core::random::poly;
use gencourant_core::sample::Sampler;
use gencourant_core::streff::{
    beta_all, beta_b_conformal, beta_index, central_residuals, dilaton_connection, symplectic_residuals_with,
    transport_identity, SymplecticPackage, Verdict, VANISHING_TOL,
};
use gencourant_core::tensor::exterior_derivative;
use gencourant_core::{Error as CoreError, TensorField};
use std::collections::BTreeMap;
use std::time::Instant;

/// Salt mixed into the chart seed for the random test data of a suite, so
/// that sections and tensors do not reuse the sample-point stream.
const DATA_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Central-difference step for the Christoffel oracle.
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Axioms,
    Torsion,
    Curvature,
    Beta,
    Central,
    Symplectic,
    Equivalence,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Axioms => "axioms",
            Command::Torsion => "torsion",
            Command::Curvature => "curvature",
            Command::Beta => "beta",
            Command::Central => "central",
            Command::Symplectic => "symplectic",
            Command::Equivalence => "equivalence",
            Command::All => "all",
        }
    }
}

struct Ctx<'a> {
    scene: &'a Scene,
    pts: Vec<Vec<f64>>,
    checks: Vec<CheckRecord>,
    verdicts: BTreeMap<String, String>,
}

type CoreResult<T> = Result<T, CoreError>;

impl Ctx<'_> {
    fn sym(&mut self, name: &str, anchor: &str, r: Residual) {
        let tol = self.scene.tolerances.sym;
        self.checks.push(CheckRecord::new(name, anchor, r, tol));
    }

    fn fd(&mut self, name: &str, anchor: &str, r: Residual) {
        let tol = self.scene.tolerances.fd;
        self.checks.push(CheckRecord::new(name, anchor, r, tol));
    }

    fn exact(&mut self, name: &str, anchor: &str, r: Residual) {
        self.checks.push(CheckRecord::new(name, anchor, r, 0.0));
    }

    fn at(&self, e: &[Expr]) -> CoreResult<Residual> {
        max_abs(e, &self.pts)
    }

    fn diff(&self, a: &[Expr], b: &[Expr]) -> CoreResult<Residual> {
        max_abs_diff(a, b, &self.pts)
    }

    fn data(&self, suite: u64) -> Sampler {
        Sampler::new(self.scene.chart.seed() ^ DATA_SALT.wrapping_mul(suite + 1))
    }
}

pub fn run_command(cmd: Command, scene: &Scene) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut ctx = Ctx {
        scene,
        pts: scene.chart.sample_points(),
        checks: Vec::new(),
        verdicts: BTreeMap::new(),
    };
    let fail = |e: CoreError| classify(cmd, e);
    match cmd {
        Command::Axioms => axioms(&mut ctx).map_err(fail)?,
        Command::Torsion => torsion(&mut ctx).map_err(fail)?,
        Command::Curvature => curvature(&mut ctx).map_err(fail)?,
        Command::Beta => beta(&mut ctx).map_err(fail)?,
        Command::Central => central(&mut ctx).map_err(fail)?,
        Command::Symplectic => symplectic(&mut ctx, false).map_err(fail)?,
        Command::Equivalence => symplectic(&mut ctx, true).map_err(fail)?,
        Command::All => {
            axioms(&mut ctx).map_err(fail)?;
            torsion(&mut ctx).map_err(fail)?;
            curvature(&mut ctx).map_err(fail)?;
            beta(&mut ctx).map_err(fail)?;
            central(&mut ctx).map_err(fail)?;
            match symplectic(&mut ctx, true) {
                Ok(()) => {}
                Err(e @ (CoreError::OddDimension(_) | CoreError::SingularB { .. })) => {
                    ctx.verdicts.insert("symplectic".into(), format!("not applicable: {e}"));
                }
                Err(e) => return Err(fail(e)),
            }
        }
    }
    let summary = SceneSummary {
        dim: scene.chart.dim(),
        coords: scene.chart.names().iter().map(|s| s.to_string()).collect(),
        seed: scene.chart.seed(),
        points: scene.chart.num_points(),
        policy: scene.policy.as_str(),
        tol_sym: scene.tolerances.sym,
        tol_fd: scene.tolerances.fd,
    };
    let mut report = Report::new(cmd.name(), summary, ctx.checks, ctx.verdicts);
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn classify(cmd: Command, e: CoreError) -> CliError {
    match e {
        CoreError::OddDimension(_) | CoreError::SingularB { .. } | CoreError::NotTwistedPoisson(_) => CliError::Command {
            command: cmd.name().to_string(),
            reason: e.to_string(),
        },
        CoreError::Domain { .. } | CoreError::NotPositiveDefinite { .. } | CoreError::SingularMetric { .. } | CoreError::Invalid(_) => {
            CliError::Validation(e.to_string())
        }
        other => CliError::Internal(other.to_string()),
    }
}

fn on_shell(r: &Residual) -> &'static str {
    if r.value < VANISHING_TOL {
        "on-shell"
    } else {
        "off-shell"
    }
}

fn random_section(c: &std::sync::Arc<gencourant_core::Chart>, s: &mut Sampler) -> CoreResult<GenSection> {
    let n = c.dim();
    let x = (0..n).map(|_| poly(c, s, 2, 0.8)).collect();
    let xi = (0..n).map(|_| poly(c, s, 2, 0.8)).collect();
    GenSection::new(c.clone(), x, xi)
}

fn axioms(ctx: &mut Ctx) -> CoreResult<()> {
    let bg = &ctx.scene.background;
    let c = ctx.scene.chart.clone();
    let n = c.dim();
    let mut s = ctx.data(0);
    let dor = Dorfman::new(bg.h().clone())?;
    let (a, b, e) = (random_section(&c, &mut s)?, random_section(&c, &mut s)?, random_section(&c, &mut s)?);
    let f = poly(&c, &mut s, 2, 1.0);
    let br = |p: &GenSection, q: &GenSection| dor.bracket(p, q);
    let mut d = Differentiator::new();

    let lhs = br(&a, &br(&b, &e));
    let rhs = br(&br(&a, &b), &e).add(&br(&b, &br(&a, &e)));
    ctx.sym("courant.leibniz", "[a,[b,c]] = [[a,b],c] + [b,[a,c]]", lhs.sub(&rhs).max_abs()?);

    let ra = anchor(&a);
    let lhs = vector_apply(&ra, &pairing(&b, &e), &mut d);
    let rhs = pairing(&br(&a, &b), &e) + pairing(&b, &br(&a, &e));
    ctx.sym("courant.pairing_invariance", "rho(a)<b,c> = <[a,b],c> + <b,[a,c]>", ctx.at(&[lhs - rhs])?);

    let sym = br(&a, &b).add(&br(&b, &a));
    let expect = d_map(c.clone(), &pairing(&a, &b));
    ctx.sym("courant.symmetric_part", "[a,b] + [b,a] = D<a,b>", sym.sub(&expect).max_abs()?);

    let lhs = anchor(&br(&a, &b));
    let rhs = lie_bracket(&ra, &anchor(&b), &mut d);
    ctx.sym("courant.anchor_morphism", "rho([a,b]) = [rho(a), rho(b)]", ctx.diff(&lhs, &rhs)?);

    let lhs = br(&a, &b.scale(&f));
    let rhs = br(&a, &b).scale(&f).add(&b.scale(&vector_apply(&ra, &f, &mut d)));
    ctx.sym("courant.function_leibniz", "[a,fb] = f[a,b] + rho(a)(f) b", lhs.sub(&rhs).max_abs()?);

    let twisted = Dorfman::new(bg.h_prime().clone())?;
    let lhs = b_twist(&twisted.bracket(&a, &b), bg.b());
    let rhs = br(&b_twist(&a, bg.b()), &b_twist(&b, bg.b()));
    ctx.sym("courant.b_transform", "e^B [a,b]_{H+dB} = [e^B a, e^B b]_H", lhs.sub(&rhs).max_abs()?);

    let frame = CourantFrame::dorfman(&dor);
    let fb = frame.bracket(&a.components(), &b.components(), &mut d);
    let r = ctx.diff(&fb, &br(&a, &b).components())?.max(frame.anchor_residual()?);
    ctx.sym("courant.frame_structure", "frame bracket and anchor reproduce the Dorfman bracket", r);

    ctx.sym("flux.closed", "dH = 0", ctx.at(exterior_derivative(bg.h())?.components())?);

    let gm = bg.generalized_metric()?;
    let tau = gm.tau();
    let r2 = 2 * n;
    let sq = linalg::matmul(&tau, &tau, r2, r2, r2);
    ctx.sym("generalized_metric.involution", "tau^2 = 1 for tau = eta^-1 G", ctx.diff(&sq, &linalg::identity(r2))?);
    Ok(())
}

/// `X - 2J'` and `V-trace - W'` of a connection in the twisted picture.
fn trace_checks(ctx: &mut Ctx, prefix: &str, tp: &TwistedPicture, conn: &GenConnection, params: &ConnParams) -> CoreResult<()> {
    let g = tp.metric().metric();
    let j1 = params.j_trace(g);
    let two_j: Vec<Expr> = j1.components().iter().map(|e| 2.0 * e).collect();
    let x = conn.characteristic_vector_field();
    ctx.sym(&format!("{prefix}.characteristic_field"), "X = 2 J'", ctx.diff(x.components(), &two_j)?);
    let w = conn.v_trace(g);
    let w1 = params.w_trace(tp.metric().inverse());
    ctx.sym(&format!("{prefix}.v_trace"), "g-trace of V = W'", ctx.diff(w.components(), w1.components())?);
    Ok(())
}

fn levi_civita_checks(ctx: &mut Ctx, prefix: &str, conn: &GenConnection, fiber_metric: &[Expr]) -> CoreResult<()> {
    ctx.sym(&format!("{prefix}.torsion"), "Gualtieri torsion vanishes", conn.torsion().max_abs()?);
    ctx.sym(&format!("{prefix}.pairing"), "connection preserves the pairing", conn.pairing_residual()?);
    ctx.sym(&format!("{prefix}.metric"), "connection preserves the generalized metric", conn.metric_residual(fiber_metric)?);
    Ok(())
}

fn torsion(ctx: &mut Ctx) -> CoreResult<()> {
    let bg = ctx.scene.background.clone();
    let tp = bg.twisted_picture()?;
    let gm_tp = tp.generalized_metric();
    levi_civita_checks(ctx, "minimal", &tp.minimal(), &gm_tp)?;

    let dil = tp.dilaton_params(bg.phi())?;
    let conn = tp.with_params(&dil);
    trace_checks(ctx, "dilaton", &tp, &conn, &dil)?;
    let untwisted = dilaton_connection(&bg)?;
    levi_civita_checks(ctx, "dilaton", &untwisted, &bg.generalized_metric()?.block())?;

    if let Some(p) = &ctx.scene.params {
        let conn = tp.with_params(p);
        levi_civita_checks(ctx, "params", &conn, &gm_tp)?;
        trace_checks(ctx, "params", &tp, &conn, p)?;
    }

    let r = christoffel_fd(ctx, &tp)?;
    ctx.fd("christoffel.finite_difference", "Christoffel symbols against central differences of g", r);

    let g0 = bg.g().eval_at(&ctx.pts[0])?;
    let n = bg.dim();
    let found = lc_parameter_dimension_at(&g0, n).ok_or_else(|| CoreError::Invalid("metric is not finite".into()))?;
    let r = Residual {
        value: (found as f64 - expected_dimension(n) as f64).abs(),
        point: ctx.pts[0].clone(),
    };
    ctx.exact("levi_civita.dimension", "dim of Levi-Civita differences = (2/3) n (n^2 - 1)", r);
    Ok(())
}

fn christoffel_fd(ctx: &Ctx, tp: &TwistedPicture) -> CoreResult<Residual> {
    let m = tp.metric();
    let n = m.dim();
    let g = Tape::compile(m.metric().components());
    let gamma = Tape::compile(m.christoffel());
    let mut best = Residual::zero();
    for p in &ctx.pts {
        let g0 = g.eval(p)?;
        let gi = linalg::to_dmatrix(&g0, n)
            .try_inverse()
            .ok_or_else(|| CoreError::SingularMetric { det: 0.0, point: p.clone() })?;
        let mut dg = vec![0.0; n * n * n];
        for k in 0..n {
            let (mut a, mut b) = (p.clone(), p.clone());
            a[k] += FD_STEP;
            b[k] -= FD_STEP;
            let (ga, gb) = (g.eval(&a)?, g.eval(&b)?);
            for ij in 0..n * n {
                dg[k * n * n + ij] = (ga[ij] - gb[ij]) / (2.0 * FD_STEP);
            }
        }
        let dgc = |k: usize, i: usize, j: usize| dg[(k * n + i) * n + j];
        let exact = gamma.eval(p)?;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let approx: f64 = (0..n)
                        .map(|l| 0.5 * gi[(k, l)] * (dgc(i, l, j) + dgc(j, i, l) - dgc(l, i, j)))
                        .sum();
                    let v = (exact[(k * n + i) * n + j] - approx).abs();
                    if !(v <= best.value) {
                        best = Residual { value: v, point: p.clone() };
                    }
                }
            }
        }
    }
    Ok(best)
}

fn riemann_checks(ctx: &mut Ctx, prefix: &str, conn: &GenConnection) -> CoreResult<()> {
    let r = conn.riemann();
    let mut worst = Residual::zero();
    for (perm, sign) in [([0, 1, 3, 2], 1.0), ([1, 0, 2, 3], 1.0), ([3, 2, 1, 0], -1.0), ([2, 3, 0, 1], -1.0)] {
        worst = worst.max(r.add(&r.permute(&perm).scale(sign)).max_abs()?);
    }
    ctx.sym(&format!("{prefix}.riemann_symmetries"), "R_DCAB skew in (A,B) and (C,D), pair symmetric", worst);
    ctx.sym(&format!("{prefix}.bianchi"), "algebraic Bianchi identity with torsion terms", conn.bianchi_residual(&r).max_abs()?);
    Ok(())
}

fn closed_form_checks(ctx: &mut Ctx, prefix: &str, tp: &TwistedPicture, params: &ConnParams) -> CoreResult<()> {
    let conn = tp.with_params(params);
    riemann_checks(ctx, prefix, &conn)?;
    let ric = conn.curvature().ricci;
    let cf = ClosedForms::new(tp, params);
    let re = scalar_e(&ric);
    ctx.sym(&format!("{prefix}.scalar_e"), "R_E = -4 Div(J') + 8 <J',W'>", ctx.diff(&[re], &[cf.scalar_e()?])?);
    let rg = scalar_g(&ric, &tp.generalized_metric_inverse());
    ctx.sym(
        &format!("{prefix}.scalar_g"),
        "R_G = R(g) - <H',H'>/2 + 4 Div(W') - 4|W'|^2 - 4|J'|^2",
        ctx.diff(&[rg], &[cf.scalar_g()?])?,
    );
    let mixed = restrict2(&ric, &tp.psi_matrix(1.0), &tp.psi_matrix(-1.0));
    ctx.sym(
        &format!("{prefix}.ricci_mixed"),
        "Ric(Psi+ X, Psi- Y) closed form in Ric(g), H', J', W'",
        ctx.diff(mixed.components(), cf.ricci_compat()?.components())?,
    );
    Ok(())
}

fn curvature(ctx: &mut Ctx) -> CoreResult<()> {
    let bg = ctx.scene.background.clone();
    let c = ctx.scene.chart.clone();
    let tp = bg.twisted_picture()?;
    let minimal = tp.minimal();
    let ric = minimal.curvature().ricci;
    ctx.sym("minimal.scalar_e", "R_E = 0", ctx.at(&[scalar_e(&ric)])?);
    let cf = ClosedForms::new(&tp, &ConnParams::zero(c.clone()));
    let expect = tp.metric().curvature().scalar - 0.5 * cf.h_norm()?;
    let rg = scalar_g(&ric, &tp.generalized_metric_inverse());
    ctx.sym("minimal.scalar_g", "R_G = R(g) - <H',H'>/2", ctx.diff(&[rg], &[expect])?);

    let dil = tp.dilaton_params(bg.phi())?;
    closed_form_checks(ctx, "dilaton", &tp, &dil)?;
    if let Some(p) = ctx.scene.params.clone() {
        closed_form_checks(ctx, "params", &tp, &p)?;
    }

    // A connection with torsion: the minimal one plus a random tensor skew
    // in its last two slots.
    let mut s = ctx.data(1);
    let k = FrameTensor::from_fn(c.clone(), 3, |_| poly(&c, &mut s, 1, 0.2));
    let k = k.sub(&k.permute(&[0, 2, 1])).scale(0.5);
    let conn = minimal.add_tensor(&k, Provenance::Custom);
    ctx.sym(
        "torsionful.bianchi",
        "algebraic Bianchi identity with torsion terms",
        conn.bianchi_residual(&conn.riemann()).max_abs()?,
    );
    Ok(())
}

fn beta(ctx: &mut Ctx) -> CoreResult<()> {
    let bg = &ctx.scene.background;
    let a = beta_all(bg)?;
    let b = beta_index(bg)?;
    let mut x: Vec<Expr> = a.beta_g.components().to_vec();
    x.extend_from_slice(a.beta_b.components());
    x.push(a.beta_phi.clone());
    let mut y: Vec<Expr> = b.beta_g.components().to_vec();
    y.extend_from_slice(b.beta_b.components());
    y.push(b.beta_phi.clone());
    ctx.sym("beta.index_form", "index-free and index forms of the beta functions agree", ctx.diff(&x, &y)?);
    let conf = beta_b_conformal(bg)?;
    ctx.sym(
        "beta.b_conformal",
        "beta(B) = e^{2 phi} delta(e^{-2 phi} H') / 2",
        ctx.diff(a.beta_b.components(), conf.components())?,
    );
    ctx.sym(
        "beta.dilaton_relation",
        "beta'(phi) = (tr beta(g) - beta(phi)) / 4",
        ctx.at(&[a.prime_relation(bg.metric().inverse())])?,
    );
    let m = a.max_abs()?;
    ctx.verdicts.insert("beta".into(), on_shell(&m).into());
    Ok(())
}

fn central(ctx: &mut Ctx) -> CoreResult<()> {
    let r = central_residuals(&ctx.scene.background)?;
    ctx.sym("central.scalar", "R_G of the dilaton connection = beta(phi)", ctx.at(&[r.scalar])?);
    ctx.sym("central.ricci", "Ric(Psi+ X, Psi- Y) = beta(g) - beta(B)", ctx.at(r.ricci.components())?);
    Ok(())
}

/// Symplectic-side checks, and with `equivalence` also the transport identity
/// and the agreement of the two on-shell verdicts.
fn symplectic(ctx: &mut Ctx, equivalence: bool) -> CoreResult<()> {
    let bg = ctx.scene.background.clone();
    let pkg = SymplecticPackage::new(&bg)?;
    let lc = pkg.connection();
    ctx.sym(
        "symplectic.koszul_jacobi",
        "twisted Koszul bracket satisfies Jacobi and the anchor is a morphism",
        lc.algebroid().jacobi_residual()?,
    );
    ctx.sym("symplectic.torsion", "algebroid Levi-Civita connection is torsion-free", lc.torsion_residual()?);
    ctx.sym("symplectic.metric", "algebroid Levi-Civita connection preserves G^-1", lc.metric_residual()?);
    let res = symplectic_residuals_with(&bg, &pkg);
    let beta = beta_all(&bg)?;
    ctx.sym("symplectic.scalar", "symplectic scalar equation = beta(phi)", ctx.diff(&[res.scalar.clone()], &[beta.beta_phi.clone()])?);
    let pull = |t: &TensorField| theta_pullback(t, pkg.theta());
    ctx.sym(
        "symplectic.sym",
        "symmetric symplectic equation = beta(g)(theta., theta.)",
        ctx.diff(res.sym.components(), pull(&beta.beta_g).components())?,
    );
    ctx.sym(
        "symplectic.skew",
        "skew symplectic equation = beta(B)(theta., theta.)",
        ctx.diff(res.skew.components(), pull(&beta.beta_b).components())?,
    );
    let symp = res.max_abs()?;
    ctx.verdicts.insert("symplectic".into(), on_shell(&symp).into());
    if !equivalence {
        return Ok(());
    }
    ctx.sym(
        "equivalence.transport",
        "Ric_theta(psi, psi') = Ric(F psi, F psi')",
        transport_identity(&bg, &pkg)?,
    );
    let b = beta.max_abs()?;
    let verdict = match (b.value < VANISHING_TOL, symp.value < VANISHING_TOL) {
        (true, true) => Verdict::BothOnShell,
        (false, false) => Verdict::BothOffShell,
        _ => Verdict::Inconsistent,
    };
    let agree = Residual {
        value: if verdict == Verdict::Inconsistent { 1.0 } else { 0.0 },
        point: Vec::new(),
    };
    ctx.exact("equivalence.verdicts_agree", "beta = 0 iff the symplectic equations hold", agree);
    ctx.verdicts.insert("equivalence".into(), verdict.to_string());
    ctx.verdicts.insert("beta".into(), on_shell(&b).into());
    Ok(())
}
