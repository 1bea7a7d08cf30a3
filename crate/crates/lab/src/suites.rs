//! One runner per suite. Each turns a space into verdicts, CSV rows and plot series.

use ckn_core::bernstein::{chain_quadrature, BernsteinTable};
use ckn_core::ckn::verify_uniform_sequence;
use ckn_core::counterexample::run_counterexample;
use ckn_core::profiles::dyadic_epsilons;
use ckn_core::rigidity::{
    corollary_lower_bound_search, default_corollary_samples, fubini_lift_and_reconstruct, stability_check, ConeParams,
};
use ckn_core::sharp::estimate_sharp_constant;
use ckn_core::space::conjugate;
use ckn_core::special::unit_ball_volume;
use ckn_core::volume::{check_volume_ratio_monotone, default_tolerance};
use ckn_core::{
    grid, CheckReport, CounterexampleSpec, FamilyPart, FamilySpec, Geometry, OptimizerSpec, QuadratureSpec,
    RadialProfile,
};
use serde::Serialize;
use serde_json::json;

use crate::builtins::Builtin;
use crate::config::{Expect, Plan, ResolvedSpace, Suite};
use crate::error::{LabError, Result};

/// Radii at which the Fubini identities are compared.
pub const FUBINI_RADII: [f64; 3] = [0.5, 1.0, 2.0];
/// Cuts `l` of the truncated-Gaussian stability sequence.
pub const TRUNCATION_CUTS: [f64; 3] = [1.0, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub space: String,
    pub suite: Suite,
    pub check: String,
    pub expected: Expect,
    pub pass: bool,
    /// `pass` agrees with `expected`.
    pub ok: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub value: f64,
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// What one suite produced for one space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpaceOutput {
    pub verdicts: Vec<Verdict>,
    pub rows: Vec<Vec<String>>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
    pub bundle: Option<serde_json::Value>,
}

/// CSV columns of each suite. Every file starts with a `space` column.
pub fn header(suite: Suite) -> &'static [&'static str] {
    match suite {
        Suite::Ckn => &["space", "k", "ratio", "target", "margin", "tolerance", "member"],
        Suite::Sharp => &["space", "k", "estimate", "target", "implied_constant", "stalled"],
        Suite::Bernstein => &["space", "lambda", "k", "S_k", "chain_margin", "r_derivative"],
        Suite::Volume => &["space", "rho", "ratio"],
        Suite::Rigidity => &["space", "k", "rho", "lifted_volume", "closed_form", "reconstructed_base_volume", "base_volume"],
        Suite::Stability => &["space", "k", "member", "deficit", "distance_sq", "margin"],
        Suite::Counterexample => &["space", "epsilon", "product", "i_mid"],
    }
}

/// Shortest round-trip text, switching to exponent form for very large or small magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Ctx<'a> {
    plan: &'a Plan,
    space: &'a ResolvedSpace,
    suite: Suite,
    out: SpaceOutput,
}

impl Ctx<'_> {
    fn verdict(&mut self, r: &CheckReport, default: Expect) {
        let expected = self.plan.expectation(&self.space.name, self.suite, &r.name, default);
        self.out.verdicts.push(Verdict {
            space: self.space.name.clone(),
            suite: self.suite,
            check: r.name.clone(),
            expected,
            pass: r.pass,
            ok: r.pass == (expected == Expect::Pass),
            margin: r.margin,
            tolerance: r.tolerance,
            value: r.value,
            witness: r.witness.clone(),
        });
    }

    fn row(&mut self, cells: Vec<String>) {
        let mut row = vec![self.space.name.clone()];
        row.extend(cells);
        self.out.rows.push(row);
    }

    fn quad(&self) -> QuadratureSpec {
        QuadratureSpec::default().with_rel_tol(self.plan.tolerances.quad_rel)
    }

    fn wrap(&self, e: ckn_core::Error) -> LabError {
        LabError::numeric(format!("{} suite on `{}`", self.suite, self.space.name), e)
    }
}

/// Test functions for the ckn and sharp suites.
pub fn default_family(plan: &Plan) -> FamilySpec {
    let lambdas = vec![0.25, 1.0, 4.0];
    let p = plan.settings.p;
    let line = if p == 2.0 {
        FamilyPart::Gaussians { lambdas }
    } else {
        FamilyPart::GeneralizedGaussians { lambdas, power: conjugate(p) }
    };
    let mut parts = vec![
        line,
        FamilyPart::Truncations { lambda: 1.0, cuts: vec![0.5, 1.0, 2.0, 3.0] },
        FamilyPart::Cutoffs { epsilons: dyadic_epsilons(1, 8) },
    ];
    if plan.settings.bumps > 0 {
        parts.push(FamilyPart::RandomBumps { count: plan.settings.bumps, seed: plan.seed });
    }
    FamilySpec::new(parts)
}

pub fn run_suite_on_space(plan: &Plan, suite: Suite, space: &ResolvedSpace) -> Result<SpaceOutput> {
    let mut ctx = Ctx { plan, space, suite, out: SpaceOutput::default() };
    match suite {
        Suite::Ckn => ckn(&mut ctx)?,
        Suite::Sharp => sharp(&mut ctx)?,
        Suite::Bernstein => bernstein(&mut ctx)?,
        Suite::Volume => volume(&mut ctx)?,
        Suite::Rigidity => rigidity(&mut ctx)?,
        Suite::Stability => stability(&mut ctx)?,
        Suite::Counterexample => counterexample(&mut ctx)?,
    }
    Ok(ctx.out)
}

fn ckn(ctx: &mut Ctx) -> Result<()> {
    let s = &ctx.plan.settings;
    let c = ctx.space.constant;
    let reports = verify_uniform_sequence(&ctx.space.space, c, s.p, s.k_max, &default_family(ctx.plan), &ctx.quad())
        .map_err(|e| ctx.wrap(e))?;
    let mut points = Vec::new();
    for r in &reports {
        let k = r.witness[0];
        let target = (c + k) / (s.p - 1.0);
        ctx.row(vec![
            format!("{k}"),
            fmt_f64(r.value),
            fmt_f64(target),
            fmt_f64(r.margin),
            fmt_f64(r.tolerance),
            format!("{}", r.witness[1]),
        ]);
        points.push((k, r.margin / target));
        ctx.verdict(r, Expect::Pass);
    }
    ctx.out.series.push(Series { label: ctx.space.name.clone(), points });
    Ok(())
}

fn sharp(ctx: &mut Ctx) -> Result<()> {
    let s = ctx.plan.settings.clone();
    let family = default_family(ctx.plan);
    let tol = ctx.plan.tolerances.sharp;
    for k in 0..=s.k_max {
        let est = estimate_sharp_constant(&ctx.space.space, k, s.p, Some(&family), &OptimizerSpec::default(), &ctx.quad())
            .map_err(|e| ctx.wrap(e))?;
        let target = (ctx.space.constant + k as f64) / (s.p - 1.0);
        ctx.row(vec![
            format!("{k}"),
            fmt_f64(est.estimate),
            fmt_f64(target),
            fmt_f64(est.implied_constant),
            format!("{}", est.stalled),
        ]);
        let r = CheckReport::new(format!("sharp k={k}"), est.estimate / target - 1.0, tol)
            .with_value(est.estimate)
            .with_witness(vec![k as f64, target]);
        ctx.verdict(&r, Expect::Pass);
    }
    Ok(())
}

fn bernstein(ctx: &mut Ctx) -> Result<()> {
    let s = &ctx.plan.settings;
    let tol = ctx.plan.tolerances.check;
    let lams = grid::default_lambda_grid();
    let t = BernsteinTable::build(&ctx.space.space, ctx.space.constant, &lams, s.chain_k_max, s.p, &chain_quadrature())
        .map_err(|e| ctx.wrap(e))?;
    let mut points = Vec::new();
    for k in 0..=t.k_max as usize {
        let mut worst = f64::INFINITY;
        for (i, &lam) in t.lambda_grid.iter().enumerate() {
            let (sk, m, r) = (t.s_values[i][k], t.chain_margins[i][k], t.r_derivatives[i][k]);
            worst = worst.min(m / sk);
            ctx.row(vec![fmt_f64(lam), format!("{k}"), fmt_f64(sk), fmt_f64(m), fmt_f64(r)]);
        }
        points.push((k as f64, worst));
    }
    ctx.out.series.push(Series { label: ctx.space.name.clone(), points });
    let chain = CheckReport::new("chain inequality", t.min_relative_chain_margin(), tol).with_value(t.c);
    let rd = CheckReport::new("r-derivative signs", t.min_scaled_r_derivative(), tol)
        .with_value(t.max_abs_scaled_r_derivative());
    ctx.verdict(&chain, Expect::Pass);
    ctx.verdict(&rd, Expect::Pass);
    Ok(())
}

fn volume(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.plan.tolerances.volume.unwrap_or_else(|| default_tolerance(&ctx.space.space));
    let radii = grid::default_radius_grid();
    let rep = check_volume_ratio_monotone(&ctx.space.space, ctx.space.constant, ctx.plan.settings.p, &radii, tol)
        .map_err(|e| ctx.wrap(e))?;
    for (r, v) in rep.grid.iter().zip(&rep.ratio_values) {
        ctx.row(vec![fmt_f64(*r), fmt_f64(*v)]);
    }
    ctx.out.series.push(Series {
        label: ctx.space.name.clone(),
        points: rep.grid.iter().copied().zip(rep.ratio_values.iter().copied()).collect(),
    });
    let r = CheckReport::new("volume ratio monotone", rep.min_forward_increment, rep.tolerance)
        .with_value(rep.exponent_used)
        .with_witness(vec![rep.witness.0, rep.witness.1]);
    ctx.verdict(&r, Expect::Pass);
    Ok(())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn rigidity(ctx: &mut Ctx) -> Result<()> {
    let sp = &ctx.space.space;
    let tol = ctx.plan.tolerances.fubini;
    for k in 1..=3u32 {
        let lifted = sp.lift(k, 2.0).map_err(|e| ctx.wrap(e))?;
        let mut worst: (f64, f64) = (0.0, FUBINI_RADII[0]);
        for &rho in &FUBINI_RADII {
            let f = fubini_lift_and_reconstruct(sp, k, rho, &ctx.quad()).map_err(|e| ctx.wrap(e))?;
            let base = sp.ball_volume(rho) - sp.atom_mass();
            let mut err = rel(f.reconstructed_base_volume, base).max(rel(f.lifted_volume, lifted.ball_volume(rho)));
            if let Some(cf) = f.closed_form {
                err = err.max(rel(f.lifted_volume, cf));
            }
            if err > worst.0 {
                worst = (err, rho);
            }
            ctx.row(vec![
                format!("{k}"),
                fmt_f64(rho),
                fmt_f64(f.lifted_volume),
                f.closed_form.map(fmt_f64).unwrap_or_default(),
                fmt_f64(f.reconstructed_base_volume),
                fmt_f64(base),
            ]);
        }
        let r = CheckReport::new(format!("fubini k={k}"), tol - worst.0, 0.0)
            .with_value(worst.0)
            .with_witness(vec![k as f64, worst.1]);
        ctx.verdict(&r, Expect::Pass);
    }

    let (dim, floor) = match sp.geometry() {
        Geometry::Euclidean { dim } => (dim as f64, 0.5 * unit_ball_volume(dim as f64)),
        Geometry::HalfLine => (1.0, 1.0),
        Geometry::Radial => {
            ctx.out.notes.push(format!("{}: corollary search skipped, off-center balls unavailable", ctx.space.name));
            return Ok(());
        }
    };
    let c = ctx.space.constant.min(dim / 2.0);
    let res = corollary_lower_bound_search(sp, c, dim, dim, &default_corollary_samples()).map_err(|e| ctx.wrap(e))?;
    let r = CheckReport::new("corollary lower bound", res.c_star - floor, 1e-12 * floor)
        .with_value(res.c_star)
        .with_witness(vec![res.witness.0, res.witness.1, res.c_double_star]);
    ctx.verdict(&r, Expect::Pass);
    Ok(())
}

fn stability(ctx: &mut Ctx) -> Result<()> {
    if ConeParams::of_space(&ctx.space.space).is_none() || ctx.plan.settings.p != 2.0 {
        ctx.out.notes.push(format!("{}: stability applies to exact cones at p = 2 only", ctx.space.name));
        return Ok(());
    }
    let tol = ctx.plan.tolerances.check;
    let quad = ctx.quad();
    for k in 0..=ctx.plan.settings.k_max.min(2) {
        let bumps = FamilyPart::RandomBumps { count: ctx.plan.settings.bumps.max(1), seed: ctx.plan.seed.wrapping_add(k as u64) };
        let members = ckn_core::profiles::make_family(&FamilySpec::new(vec![bumps])).map_err(|e| ctx.wrap(e))?;
        let mut worst = (f64::INFINITY, 0usize);
        for (i, u) in members.iter().enumerate() {
            let rec = stability_check(&ctx.space.space, u, k, &quad).map_err(|e| ctx.wrap(e))?;
            let relm = rec.margin / rec.deficit.abs().max(f64::MIN_POSITIVE);
            if relm < worst.0 {
                worst = (relm, i);
            }
            ctx.row(vec![
                format!("{k}"),
                format!("bump{i}"),
                fmt_f64(rec.deficit),
                fmt_f64(rec.gaussian_distance_sq),
                fmt_f64(rec.margin),
            ]);
        }
        let r = CheckReport::new(format!("stability k={k}"), worst.0, tol).with_witness(vec![k as f64, worst.1 as f64]);
        ctx.verdict(&r, Expect::Pass);

        let mut seq = Vec::new();
        for &l in &TRUNCATION_CUTS {
            let u = RadialProfile::truncated_gaussian(1.0, 1.0, l).map_err(|e| ctx.wrap(e))?;
            let rec = stability_check(&ctx.space.space, &u, k, &quad).map_err(|e| ctx.wrap(e))?;
            ctx.row(vec![
                format!("{k}"),
                format!("truncation{l}"),
                fmt_f64(rec.deficit),
                fmt_f64(rec.gaussian_distance_sq),
                fmt_f64(rec.margin),
            ]);
            seq.push((rec.deficit, rec.gaussian_distance_sq));
        }
        let drop = seq.windows(2).map(|w| (w[0].0 - w[1].0).min(w[0].1 - w[1].1)).fold(f64::INFINITY, f64::min);
        let r = CheckReport::new(format!("truncations decrease k={k}"), drop, 0.0)
            .with_value(seq.last().map_or(f64::NAN, |s| s.0))
            .with_witness(vec![k as f64]);
        ctx.verdict(&r, Expect::Pass);
    }
    Ok(())
}

fn claim(v: &Verdict) -> serde_json::Value {
    json!({ "confirmed": v.ok, "check": v.check, "pass": v.pass, "margin": v.margin, "value": v.value })
}

fn counterexample(ctx: &mut Ctx) -> Result<()> {
    let Some(Builtin::Counterexample { n, atom }) = ctx.space.builtin else {
        return Err(LabError::Config(format!("`{}` is not a counterexample space", ctx.space.name)));
    };
    let spec = CounterexampleSpec::standard(n, atom);
    let b = run_counterexample(&spec, &ctx.quad()).map_err(|e| ctx.wrap(e))?;
    for i in 0..b.scan.epsilons.len() {
        ctx.row(vec![fmt_f64(b.scan.epsilons[i]), fmt_f64(b.scan.products[i]), fmt_f64(b.scan.i_mid[i])]);
    }
    let start = ctx.out.verdicts.len();
    ctx.verdict(&b.holds_for_positive_k, Expect::Pass);
    ctx.verdict(&b.cutoff_rate, Expect::Pass);
    ctx.verdict(&b.fails_at_zero, Expect::Fail);
    ctx.verdict(&b.volume_monotone, Expect::Fail);
    let v = &ctx.out.verdicts[start..];
    let fails_at_zero = json!({
        "confirmed": v[1].ok && v[2].ok,
        "ckn": claim(&v[2]),
        "cutoff_rate": claim(&v[1]),
    });
    ctx.out.bundle = Some(json!({
        "space": ctx.space.name,
        "n": n,
        "atom": atom,
        "constant": spec.c,
        "holds_for_positive_k": claim(&v[0]),
        "fails_at_zero": fails_at_zero,
        "volume_not_monotone": claim(&v[3]),
        "cutoff_scan": {
            "epsilons": b.scan.epsilons,
            "products": b.scan.products,
            "i_mid": b.scan.i_mid,
            "slope": b.scan.slope,
        },
    }));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.5), "1.5");
        assert_eq!(fmt_f64(-2.0), "-2");
        assert_eq!(fmt_f64(1e-300), "1e-300");
        assert_eq!(fmt_f64(2.5e20), "2.5e20");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        for x in [0.1 + 0.2, 1e-5, 123456.789, -3e-12] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
