//! Subcommand implementations.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fs;
use std::io;

use num_complex::Complex64 as C64;

use rbm_green::asymptotics::{self, AsymptoticResult, EdgeCompetition};
use rbm_green::inversion::{green_oracle, InversionConfig, QuadratureResult};
use rbm_green::kernel::{self, Branch, KernelGeometry};
use rbm_green::model::{parse_model, ConeParams, ModelInput, PolarPoint, QuadrantParams};
use rbm_green::poles::{self, pole_locations};
use rbm_green::saddle;
use rbm_green::simulate::{self, SimConfig, SimRun};

use crate::output::{emit, num, RunManifest, Table};
use crate::{AsymWhat, Cli, Command, SimulateWhat};

#[derive(Debug)]
pub enum CliError {
    Lib(rbm_green::Error),
    Io(io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => e.exit_code() as u8,
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<rbm_green::Error> for CliError {
    fn from(e: rbm_green::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<rbm_green::ModelError> for CliError {
    fn from(e: rbm_green::ModelError) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

const P1_JSON: &str = include_str!("../models/p1.json");
const P2_JSON: &str = include_str!("../models/p2.json");

fn load_model(source: &str) -> Result<ModelInput> {
    let text = match source.to_ascii_uppercase().as_str() {
        "P1" => P1_JSON.to_string(),
        "P2" => P2_JSON.to_string(),
        _ => fs::read_to_string(source)?,
    };
    Ok(parse_model(&text)?)
}

fn cone_of(model: &ModelInput) -> ConeParams {
    match model {
        ModelInput::Cone(c) => *c,
        ModelInput::Quadrant(q) => q.to_cone().0,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

struct Ctx<'a> {
    cli: &'a Cli,
    model: ModelInput,
    p: QuadrantParams,
}

impl Ctx<'_> {
    fn manifest(&self, name: &str) -> RunManifest {
        let mut m = RunManifest::new(name, &self.p, self.cli.common.seed);
        m.param("model_source", &self.cli.common.model);
        m
    }

    fn manifest_mc(&self, name: &str) -> RunManifest {
        let mut m = self.manifest(name);
        m.param("n_paths", self.cli.common.n_paths);
        m.param("dt", self.cli.common.dt);
        m
    }

    fn sim_config(&self, green_points: Vec<[f64; 2]>, track_bulk: bool) -> SimConfig {
        SimConfig {
            n_paths: self.cli.common.n_paths,
            dt: self.cli.common.dt,
            seed: self.cli.common.seed,
            green_points,
            track_bulk,
            ..Default::default()
        }
    }

    fn simulate(&self, green_points: Vec<[f64; 2]>, track_bulk: bool) -> Result<SimRun> {
        Ok(simulate::run(&self.p, &self.sim_config(green_points, track_bulk))?)
    }

    fn emit(&self, table: &Table, m: RunManifest) -> Result<()> {
        Ok(emit(table, m, self.cli.common.out.as_deref())?)
    }
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let model = load_model(&cli.common.model)?;
    let p = model.quadrant().validate()?;
    let ctx = Ctx { cli, model, p };
    match &cli.command {
        Command::Validate => validate(&ctx),
        Command::Kernel { points } => kernel_grid(&ctx, *points),
        Command::Saddle { alpha, path_out, samples } => saddle_cmd(&ctx, *alpha, path_out.as_deref(), *samples),
        Command::Poles { with_residues } => poles_cmd(&ctx, *with_residues),
        Command::Simulate { what } => simulate_cmd(&ctx, what),
        Command::Invert { a, b, shifted } => invert(&ctx, *a, *b, *shifted),
        Command::Asym { what } => asym(&ctx, what),
        Command::Compare { a, b } => compare(&ctx, *a, *b),
        Command::Regimes { points } => regimes(&ctx, *points),
    }
}

fn kv(table: &mut Table, key: &str, value: f64) {
    table.row(vec![key.to_string(), num(value)]);
}

fn validate(ctx: &Ctx) -> Result<()> {
    let p = &ctx.p;
    let cone = cone_of(&ctx.model);
    let g = KernelGeometry::new(p);
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in [
        ("sigma11", p.s11),
        ("sigma12", p.s12),
        ("sigma22", p.s22),
        ("mu1", p.mu1),
        ("mu2", p.mu2),
        ("r11", p.r11),
        ("r12", p.r12),
        ("r21", p.r21),
        ("r22", p.r22),
        ("a0", p.a0),
        ("b0", p.b0),
        ("beta", cone.beta),
        ("delta", cone.delta),
        ("epsilon", cone.epsilon),
        ("theta", cone.theta),
        ("mu_norm", cone.mu_norm),
        ("lambda", cone.lambda()),
        ("x_min", g.x_min),
        ("x_max", g.x_max),
        ("y_min", g.y_min),
        ("y_max", g.y_max),
    ] {
        kv(&mut t, k, v);
    }
    ctx.emit(&t, ctx.manifest("validate"))
}

fn kernel_grid(ctx: &Ctx, points: usize) -> Result<()> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let g = KernelGeometry::new(&ctx.p);
    let mut t = Table::new(&["x", "y_minus", "y_plus"]);
    for k in 0..points {
        let x = g.x_min + (g.x_max - g.x_min) * k as f64 / (points - 1) as f64;
        let xc = C64::new(x, 0.0);
        t.row(vec![
            num(x),
            num(kernel::y_branch(&ctx.p, xc, Branch::Minus).re),
            num(kernel::y_branch(&ctx.p, xc, Branch::Plus).re),
        ]);
    }
    let mut m = ctx.manifest("kernel");
    m.param("points", points);
    m.param("x_min", g.x_min);
    m.param("x_max", g.x_max);
    ctx.emit(&t, m)
}

fn saddle_cmd(ctx: &Ctx, alpha: f64, path_out: Option<&std::path::Path>, samples: usize) -> Result<()> {
    let p = &ctx.p;
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(rbm_green::Error::domain("--alpha must lie in [0, pi/2]").into());
    }
    let s = saddle::saddle_point(p, alpha);
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in [
        ("alpha", alpha),
        ("omega", p.omega_of_alpha(alpha)),
        ("x", s.x),
        ("y", s.y),
        ("fxx", s.fxx),
        ("r_alpha", s.r_alpha),
        ("exponent_rate", s.exponent_rate),
    ] {
        kv(&mut t, k, v);
    }
    let mut m = ctx.manifest("saddle");
    m.param("alpha", alpha);
    if let Some(path) = path_out {
        let eps = if alpha == 0.0 { 0.1 } else { saddle::default_epsilon(p, alpha)? };
        let dp = if alpha == 0.0 {
            saddle::descent_path_alpha0(p, eps, samples)
        } else {
            saddle::trace_descent(p, alpha, eps, samples)?
        };
        let mut pt = Table::new(&["t", "x_re", "x_im"]);
        for (tt, x) in &dp.samples {
            pt.row(vec![num(*tt), num(x.re), num(x.im)]);
        }
        let mut pm = ctx.manifest("saddle-path");
        pm.param("alpha", alpha);
        pm.param("epsilon_cap", eps);
        pm.param("samples", samples);
        emit(&pt, pm, Some(path))?;
        m.param("path_out", path.display().to_string());
    }
    ctx.emit(&t, m)
}

fn poles_cmd(ctx: &Ctx, with_residues: bool) -> Result<()> {
    let p = &ctx.p;
    let r = pole_locations(p)?;
    let mut t = Table::new(&["quantity", "value", "std_error"]);
    let mut row = |k: &str, v: String, se: String| t.row(vec![k.to_string(), v, se]);
    row("exists_x", (r.exists_x as u8).to_string(), String::new());
    row("exists_y", (r.exists_y as u8).to_string(), String::new());
    row("x_star", opt(r.x_star), String::new());
    row("y_star", opt(r.y_star), String::new());
    row(
        "y_minus_at_x_star",
        opt(r.x_star.map(|x| kernel::y_branch(p, C64::new(x, 0.0), Branch::Minus).re)),
        String::new(),
    );
    row("alpha_star", opt(r.alpha_star), String::new());
    row("omega_star", opt(r.exists_x.then_some(r.omega_star)), String::new());
    row("y_2star", opt(r.y_2star), String::new());
    row("x_2star", opt(r.x_2star), String::new());
    row("alpha_2star", opt(r.alpha_2star), String::new());
    row("omega_2star", opt(r.exists_y.then_some(r.omega_2star)), String::new());
    let mut m = ctx.manifest("poles");
    m.param("with_residues", with_residues);
    if with_residues && (r.exists_x || r.exists_y) {
        let run = ctx.simulate(Vec::new(), false)?;
        m = ctx.manifest_mc("poles");
        m.param("with_residues", true);
        if let Some(xs) = r.x_star {
            let ym = kernel::y_branch(p, C64::new(xs, 0.0), Branch::Minus);
            let res = poles::residue_phi2(p, xs, run.phi1(ym)?)?;
            let c = poles::pole_constant_cstar(p, xs, res);
            let (re, ce) = (res.estimate(), c.estimate());
            row("residue_phi2", num(re.value.re), num(re.se_re));
            row("c_star", num(ce.value.re), num(ce.se_re));
        }
        if let Some(ys) = r.y_2star {
            let xm = kernel::y_branch(&p.swapped(), C64::new(ys, 0.0), Branch::Minus);
            let res = poles::residue_phi1(p, ys, run.phi2(xm)?)?;
            let c = poles::pole_constant_c2star(p, ys, res);
            let (re, ce) = (res.estimate(), c.estimate());
            row("residue_phi1", num(re.value.re), num(re.se_re));
            row("c_2star", num(ce.value.re), num(ce.se_re));
        }
    }
    ctx.emit(&t, m)
}

fn simulate_cmd(ctx: &Ctx, what: &SimulateWhat) -> Result<()> {
    match what {
        SimulateWhat::Green { a, b } => {
            if a.len() != b.len() {
                return Err(CliError::Usage("--a and --b need the same number of values".into()));
            }
            let pts: Vec<[f64; 2]> = a.iter().zip(b).map(|(a, b)| [*a, *b]).collect();
            let run = ctx.simulate(pts.clone(), false)?;
            let mut t = Table::new(&["a", "b", "value", "std_error", "n_paths", "truncated_fraction"]);
            for z in &pts {
                let e = run.estimate_green(*z)?;
                t.row(vec![
                    num(z[0]),
                    num(z[1]),
                    num(e.value.re),
                    num(e.std_error),
                    e.n_paths.to_string(),
                    num(e.truncated_fraction),
                ]);
            }
            let mut m = ctx.manifest_mc("simulate green");
            m.param("points", &pts);
            ctx.emit(&t, m)
        }
        SimulateWhat::Boundary { axis, width, u_max } => {
            if !(*axis == 1 || *axis == 2) {
                return Err(CliError::Usage("--axis must be 1 or 2".into()));
            }
            if !(*width > 0.0 && *u_max > *width) {
                return Err(CliError::Usage("need 0 < --width < --u-max".into()));
            }
            let run = ctx.simulate(Vec::new(), false)?;
            let mut t = Table::new(&["u", "density", "std_error"]);
            let n = (u_max / width).floor() as usize;
            for k in 0..n {
                let u = (k as f64 + 0.5) * width;
                let e = run.boundary_density_width(*axis, u, *width)?.estimate();
                t.row(vec![num(u), num(e.value.re), num(e.se_re)]);
            }
            let mut m = ctx.manifest_mc("simulate boundary");
            m.param("axis", axis);
            m.param("width", width);
            m.param("u_max", u_max);
            ctx.emit(&t, m)
        }
        SimulateWhat::Phi { x, y } => {
            if x.len() != y.len() {
                return Err(CliError::Usage("--x and --y need the same number of values".into()));
            }
            let run = ctx.simulate(Vec::new(), true)?;
            let mut t = Table::new(&["x", "y", "phi", "phi_se", "phi1", "phi1_se", "phi2", "phi2_se"]);
            for (xv, yv) in x.iter().zip(y) {
                let (xc, yc) = (C64::new(*xv, 0.0), C64::new(*yv, 0.0));
                let f = run.estimate_phi(xc, yc)?;
                let f1 = run.estimate_phi1(yc)?;
                let f2 = run.estimate_phi2(xc)?;
                t.row(vec![
                    num(*xv),
                    num(*yv),
                    num(f.value.re),
                    num(f.std_error),
                    num(f1.value.re),
                    num(f1.std_error),
                    num(f2.value.re),
                    num(f2.std_error),
                ]);
            }
            let mut m = ctx.manifest_mc("simulate phi");
            m.param("x", x);
            m.param("y", y);
            ctx.emit(&t, m)
        }
    }
}

fn quad_row(t: &mut Table, part: &str, q: &QuadratureResult) {
    t.row(vec![
        part.to_string(),
        q.contour.clone(),
        num(q.value.re),
        num(q.value.im),
        num(q.abs_error_est),
        num(q.se_propagated),
    ]);
}

fn invert(ctx: &Ctx, a: f64, b: f64, shifted: bool) -> Result<()> {
    let run = ctx.simulate(Vec::new(), false)?;
    let o = green_oracle(a, b, &ctx.p, &run, shifted, &InversionConfig::default())?;
    let mut t = Table::new(&["part", "contour", "value_re", "value_im", "abs_error_est", "se_propagated"]);
    for (k, q) in o.parts.iter().enumerate() {
        quad_row(&mut t, &format!("I{}", k + 1), q);
    }
    quad_row(&mut t, "total", &o.total);
    let mut m = ctx.manifest_mc("invert");
    m.param("a", a);
    m.param("b", b);
    m.param("shifted", shifted);
    ctx.emit(&t, m)
}

const ASYM_HEADER: [&str; 11] = [
    "rho_or_r",
    "angle",
    "regime",
    "decay_rate",
    "prefactor_power",
    "c0",
    "c_star",
    "transition_factor",
    "se",
    "leading",
    "two_term",
];

fn asym_row(t: &mut Table, radius: f64, angle: f64, r: &AsymptoticResult) {
    t.row(vec![
        num(radius),
        num(angle),
        r.regime.to_string(),
        num(r.decay_rate),
        num(r.prefactor_power),
        opt(r.c0.map(|e| e.value.re)),
        opt(r.c_star.map(|e| e.value.re)),
        opt(r.transition_factor),
        num(r.se()),
        num(r.leading.value.re),
        num(r.two_term.value.re),
    ]);
}

fn asym(ctx: &Ctx, what: &AsymWhat) -> Result<()> {
    let run = ctx.simulate(Vec::new(), false)?;
    let p = &ctx.p;
    match what {
        AsymWhat::Eval { r, alpha } => {
            let res = asymptotics::leading_term(p, &run, *r, *alpha)?;
            let mut t = Table::new(&ASYM_HEADER);
            asym_row(&mut t, *r, *alpha, &res);
            let mut m = ctx.manifest_mc("asym eval");
            m.param("r", r);
            m.param("alpha", alpha);
            ctx.emit(&t, m)
        }
        AsymWhat::Sweep { r, alpha_from, alpha_to, points } => {
            if *points < 2 {
                return Err(CliError::Usage("--points must be at least 2".into()));
            }
            let mut t = Table::new(&ASYM_HEADER);
            for k in 0..*points {
                let alpha = alpha_from + (alpha_to - alpha_from) * k as f64 / (*points - 1) as f64;
                let res = asymptotics::leading_term(p, &run, *r, alpha)?;
                asym_row(&mut t, *r, alpha, &res);
            }
            let mut m = ctx.manifest_mc("asym sweep");
            m.param("r", r);
            m.param("alpha_from", alpha_from);
            m.param("alpha_to", alpha_to);
            m.param("points", points);
            ctx.emit(&t, m)
        }
        AsymWhat::Edge { r, alpha } => {
            let e = asymptotics::edge_expansion(p, &run, *r, *alpha, None)?;
            let mut t = Table::new(&["r", "alpha", "competition", "rate", "c_prime", "c_prime_se", "value", "se"]);
            let comp = match e.competition {
                EdgeCompetition::SecondDominates => "second_dominates",
                EdgeCompetition::Comparable => "comparable",
                EdgeCompetition::FirstDominates => "first_dominates",
            };
            t.row(vec![
                num(*r),
                num(*alpha),
                comp.to_string(),
                num(e.rate),
                num(e.c_prime.value.re),
                num(e.c_prime.se_re),
                num(e.value.value.re),
                num(e.value.se_re),
            ]);
            let mut m = ctx.manifest_mc("asym edge");
            m.param("r", r);
            m.param("alpha", alpha);
            ctx.emit(&t, m)
        }
        AsymWhat::Transition { r, alpha } => {
            let res = asymptotics::transition_term(p, &run, *r, *alpha)?;
            let mut t = Table::new(&ASYM_HEADER);
            asym_row(&mut t, *r, *alpha, &res);
            let mut m = ctx.manifest_mc("asym transition");
            m.param("r", r);
            m.param("alpha", alpha);
            ctx.emit(&t, m)
        }
        AsymWhat::Cone { rho, omega } => {
            let cone = cone_of(&ctx.model);
            let res = asymptotics::cone_asymptotics(&cone, &run, *rho, *omega)?;
            let mut t = Table::new(&ASYM_HEADER);
            asym_row(&mut t, *rho, *omega, &res);
            let mut m = ctx.manifest_mc("asym cone");
            m.param("rho", rho);
            m.param("omega", omega);
            ctx.emit(&t, m)
        }
    }
}

fn compare(ctx: &Ctx, a: f64, b: f64) -> Result<()> {
    let p = &ctx.p;
    let run = ctx.simulate(vec![[a, b]], false)?;
    let oracle = green_oracle(a, b, p, &run, true, &InversionConfig::default())?;
    let mc = run.estimate_green([a, b])?;
    let polar = PolarPoint { radius: a.hypot(b), angle: b.atan2(a) };
    let asym = asymptotics::leading_term(p, &run, polar.radius, polar.angle);
    let combined = oracle.total.se_propagated.hypot(mc.std_error) + oracle.total.abs_error_est;
    let dev = (oracle.total.value.re - mc.value.re).abs() / combined;
    let mut t = Table::new(&["source", "value", "error"]);
    match &asym {
        Ok(r) => t.row(vec![format!("asymptotic_{}", r.regime), num(r.two_term.value.re), num(r.se())]),
        Err(e) => t.row(vec!["asymptotic".into(), String::new(), format!("unavailable: {e}")]),
    }
    t.row(vec!["oracle".into(), num(oracle.total.value.re), num(oracle.total.combined_error())]);
    t.row(vec!["monte_carlo".into(), num(mc.value.re), num(mc.std_error)]);
    t.row(vec!["verdict".into(), if dev <= 3.0 { "PASS" } else { "FAIL" }.into(), num(dev)]);
    let mut m = ctx.manifest_mc("compare");
    m.param("a", a);
    m.param("b", b);
    m.param("verdict_rule", "|oracle - MC| <= 3 combined errors");
    ctx.emit(&t, m)
}

fn regimes(ctx: &Ctx, points: usize) -> Result<()> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let p = &ctx.p;
    let report = pole_locations(p)?;
    let beta = p.beta();
    let mut t = Table::new(&["omega0", "alpha0", "regime"]);
    for k in 0..points {
        let omega = beta * k as f64 / (points - 1) as f64;
        let alpha = if k == 0 {
            0.0
        } else if k == points - 1 {
            FRAC_PI_2
        } else {
            p.alpha_of_omega(omega)
        };
        t.row(vec![num(omega), num(alpha), asymptotics::classify(alpha, &report).to_string()]);
    }
    let mut m = ctx.manifest("regimes");
    m.param("points", points);
    ctx.emit(&t, m)
}
