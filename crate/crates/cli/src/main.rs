//! `shellzeta` command-line front end.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use shellzeta::closed_form::{two_param_complex_dimensions, PoleKind, PoleWindow};
use shellzeta::content::{estimate_phi_dimension, phi_shell_content, GridSpec};
use shellzeta::sampling::SamplingPlan;
use shellzeta::sphere::{
    check_sphere_comparison, inverse_project, spherical_content, spherical_nbhd_volume, spherical_volume,
    stereographic_project, surface_content, DeltaGrid, SpherePoint,
};
use shellzeta::verify::{verify_suite, Selection};
use shellzeta::zeta::{check_residue_bounds, residue_at_dimension, with_bounds, zeta_eval_with};
use shellzeta::{parse_region, region_to_json, Error, QuadScheme, Region};

use output::{Format, Out};

#[derive(Parser)]
#[command(name = "shellzeta", version, about = "Shell Minkowski contents and zeta functions at infinity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Region spec (JSON file)
    #[arg(long)]
    region: Option<PathBuf>,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Monte Carlo samples per stratum
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Relative quadrature tolerance for zeta evaluations
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output format [default: depends on the command]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// t-grid as t_min:t_max:points_per_decade
    #[arg(long, default_value = "1e2:1e6:16")]
    grid: String,
}

#[derive(Subcommand)]
enum Command {
    /// Upper and lower phi-shell dimensions
    Dim {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        phi: f64,
    },
    /// Upper and lower phi-shell contents of order r
    Content {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        phi: f64,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
    },
    /// Zeta function at infinity, e.g. --s "0.5+2i"
    Zeta {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long = "T", default_value_t = 1.0)]
        t0: f64,
    },
    /// Residue at a simple real pole D
    Residue {
        #[command(flatten)]
        common: Common,
        #[arg(long = "D", allow_hyphen_values = true)]
        d: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t0: f64,
        /// Also report the content bounds for this phi
        #[arg(long)]
        phi: Option<f64>,
    },
    /// Poles of the closed-form two-parameter zeta function
    Poles {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, default_value_t = 20.0)]
        im_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        re_min: Option<f64>,
    },
    /// Stereographic projection and spherical volumes
    Sphere {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: SphereMode,
        /// Comma separated point (project mode); R^N point, or S^N point with --inverse
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long)]
        inverse: bool,
        /// Spherical neighbourhood radius of the north pole (volume mode)
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<f64>,
    },
    /// Surface contents H^{N-1}(S_t ∩ Ω) / t^{N-1+r}
    Surface {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
    },
    /// Replay the built-in checks
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(value_enum, default_value = "all")]
        selection: SelectionArg,
    },
    /// Print the spec of a built-in example region
    Emit {
        #[command(flatten)]
        common: Common,
        #[arg(value_enum)]
        name: Example,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SphereMode {
    Project,
    Volume,
    Content,
    Compare,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    All,
    Contents,
    Zeta,
    TwoParam,
    Sphere,
    Surface,
}

impl From<SelectionArg> for Selection {
    fn from(s: SelectionArg) -> Self {
        match s {
            SelectionArg::All => Selection::All,
            SelectionArg::Contents => Selection::Contents,
            SelectionArg::Zeta => Selection::Zeta,
            SelectionArg::TwoParam => Selection::TwoParam,
            SelectionArg::Sphere => Selection::Sphere,
            SelectionArg::Surface => Selection::Surface,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Fullspace2,
    Halfplane,
    Strip,
    Hyperbola,
    EnvelopeB3,
    Tent,
    Stacked,
}

enum Failure {
    Lib(Error),
    Usage(String),
    Verify(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Divergence(_) | Error::Precision(_)) => 3,
            Failure::Lib(_) | Failure::Usage(_) => 2,
            Failure::Verify(_) => 4,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

impl Common {
    fn plan(&self) -> Result<SamplingPlan, Failure> {
        Ok(SamplingPlan::new(self.seed, SamplingPlan::default().strata, self.samples)?)
    }

    fn grid(&self) -> Result<GridSpec, Failure> {
        let parts: Vec<&str> = self.grid.split(':').collect();
        let bad = || Failure::Usage(format!("--grid expects t_min:t_max:points_per_decade, got {:?}", self.grid));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let ppd: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(GridSpec::new(lo, hi, ppd)?)
    }

    fn region(&self) -> Result<Region, Failure> {
        let Some(path) = &self.region else {
            return usage("this command needs --region <file>");
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        parse_region(&text).map_err(|e| match e {
            Error::Spec(m) => Failure::Usage(format!("{}: {m}", path.display())),
            e => Failure::Lib(e),
        })
    }

    fn out(&self, default: Format) -> Out {
        Out::new(self.format.unwrap_or(default), self.out.clone())
    }
}

fn parse_s(s: &str) -> Result<Complex64, Failure> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    t.parse::<Complex64>().map_err(|_| Failure::Usage(format!("cannot parse complex number {s:?}")))
}

fn parse_point(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("cannot parse point {s:?}"))))
        .collect()
}

fn points_table(points: &[shellzeta::content::GridPoint], volume_col: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let header = vec!["t".into(), volume_col.into(), "abs_error".into(), "normalized".into()];
    let rows = points.iter().map(|p| vec![num(p.t), num(p.volume), num(p.abs_error), num(p.normalized)]).collect();
    (header, rows)
}

/// Shortest round-trip representation, so files are byte-stable.
fn num(x: f64) -> String {
    format!("{x:e}")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Dim { common, phi } => {
            let region = common.region()?;
            let d = estimate_phi_dimension(&region, phi, &common.grid()?, &common.plan()?)?;
            let out = common.out(Format::Json);
            match out.format {
                Format::Json => out.json(&json!({
                    "phi": d.phi,
                    "upper_dim": d.upper_dim,
                    "lower_dim": if d.lower_is_neg_infinity { json!("-inf") } else { json!(d.lower_dim) },
                    "lower_is_neg_infinity": d.lower_is_neg_infinity,
                    "upper_fit": d.slope_fit,
                    "lower_fit": d.lower_fit,
                    "warnings": d.warnings,
                })),
                Format::Csv => {
                    let (h, r) = points_table(&d.points, "shell_volume");
                    out.csv(&h, &r)
                }
            }
        }
        Command::Content { common, phi, r } => {
            let region = common.region()?;
            let c = phi_shell_content(&region, phi, r, &common.grid()?, &common.plan()?)?;
            let out = common.out(Format::Csv);
            match out.format {
                Format::Csv => {
                    let (h, rows) = points_table(&c.per_point_errors, "shell_volume");
                    out.csv(&h, &rows)
                }
                Format::Json => out.json(&json!({
                    "phi": c.phi,
                    "r": c.r,
                    "upper": c.upper,
                    "lower": c.lower,
                    "upper_error": c.upper_error,
                    "lower_error": c.lower_error,
                    "argmax_t": c.argmax_t,
                    "argmin_t": c.argmin_t,
                    "warnings": c.warnings,
                })),
            }
        }
        Command::Zeta { common, s, t0 } => {
            let region = common.region()?;
            let s = parse_s(&s)?;
            let scheme = QuadScheme { rel_tol: common.tol, ..QuadScheme::standard() };
            let z = zeta_eval_with(&region, s, t0, &common.plan()?, &scheme)?;
            let out = common.out(Format::Json);
            let row = ZetaRow {
                s: format!("{}", z.s),
                value_re: z.value.re,
                value_im: z.value.im,
                quad_error: z.quad_error,
                t: z.t_trunc,
                route: format!("{:?}", z.route).to_lowercase(),
            };
            match out.format {
                Format::Json => out.json(&row),
                Format::Csv => out.csv(
                    &["s", "value_re", "value_im", "quad_error", "T", "route"].map(String::from),
                    &[vec![row.s.clone(), num(row.value_re), num(row.value_im), num(row.quad_error), num(row.t), row.route.clone()]],
                ),
            }
        }
        Command::Residue { common, d, t0, phi } => {
            let region = common.region()?;
            let plan = common.plan()?;
            let mut res = residue_at_dimension(&region, d, t0, &plan)?;
            let mut report = None;
            if let Some(phi) = phi {
                let c = phi_shell_content(&region, phi, d, &common.grid()?, &plan)?;
                let rep = check_residue_bounds(&region, d, phi, &res, &c)?;
                res = with_bounds(res, &rep);
                report = Some(rep);
            }
            let out = common.out(Format::Json);
            match out.format {
                Format::Json => out.json(&json!({"residue": res, "bounds_check": report})),
                Format::Csv => out.csv(
                    &["D", "value", "extrapolation_error", "quad_error"].map(String::from),
                    &[vec![num(res.d), num(res.value), num(res.extrapolation_error), num(res.quad_error)]],
                ),
            }
        }
        Command::Poles { common, a, b, im_min, im_max, re_min } => {
            let lattice = two_param_complex_dimensions(a, b, &PoleWindow { re_min, im_min, im_max })?;
            let out = common.out(Format::Json);
            match out.format {
                Format::Json => out.json(&lattice),
                Format::Csv => {
                    let rows = lattice
                        .poles
                        .iter()
                        .map(|p| {
                            let kind = match p.kind {
                                PoleKind::Principal => "principal".to_string(),
                                PoleKind::Lattice { k } => format!("lattice {k}"),
                            };
                            vec![num(p.s.re), num(p.s.im), p.order.to_string(), num(p.residue.re), num(p.residue.im), kind]
                        })
                        .collect::<Vec<_>>();
                    out.csv(&["re", "im", "order", "residue_re", "residue_im", "kind"].map(String::from), &rows)
                }
            }
        }
        Command::Sphere { common, mode, point, inverse, delta, r } => sphere(common, mode, point, inverse, delta, r),
        Command::Surface { common, r } => {
            let region = common.region()?;
            let c = surface_content(&region, r, &common.grid()?, &common.plan()?)?;
            let out = common.out(Format::Csv);
            match out.format {
                Format::Csv => {
                    let (h, rows) = points_table(&c.points, "surface_measure");
                    out.csv(&h, &rows)
                }
                Format::Json => out.json(&json!({
                    "r": c.r,
                    "upper": c.upper,
                    "lower": c.lower,
                    "upper_error": c.upper_error,
                    "lower_error": c.lower_error,
                })),
            }
        }
        Command::Verify { common, selection } => {
            let report = verify_suite(selection.into(), &common.plan()?);
            let out = Out::new(common.format.unwrap_or(Format::Csv), common.out.clone());
            match (common.format, out.format) {
                (_, Format::Json) => out.json(&report)?,
                (Some(_), Format::Csv) => {
                    let rows = report
                        .checks
                        .iter()
                        .map(|c| {
                            vec![
                                c.group.to_string(),
                                c.name.clone(),
                                output::basis(c.basis).into(),
                                output::criterion(c.criterion).into(),
                                num(c.expected),
                                num(c.observed),
                                num(c.tolerance),
                                if c.pass { "pass" } else { "fail" }.into(),
                                c.detail.clone(),
                            ]
                        })
                        .collect::<Vec<_>>();
                    out.csv(
                        &["group", "check", "basis", "criterion", "expected", "observed", "tolerance", "result", "detail"]
                            .map(String::from),
                        &rows,
                    )?
                }
                (None, _) => out.text(&output::verify_table(&report))?,
            }
            match report.failures() {
                0 => Ok(()),
                n => Err(Failure::Verify(n)),
            }
        }
        Command::Emit { common, name } => {
            let region = match name {
                Example::Fullspace2 => Region::full_space(2),
                Example::Halfplane => Region::half_space(2),
                Example::Strip => Region::strip(1.0),
                Example::Hyperbola => Region::envelope(1.0, 1.0),
                Example::EnvelopeB3 => Region::envelope(1.0, 3.0),
                Example::Tent => Region::tent(0.5),
                Example::Stacked => Region::stacked(1.0 / 3.0, 2.0),
            }?;
            common.out(Format::Json).json(&region_to_json(&region))
        }
    }
}

#[derive(Serialize)]
struct ZetaRow {
    s: String,
    value_re: f64,
    value_im: f64,
    quad_error: f64,
    #[serde(rename = "T")]
    t: f64,
    route: String,
}

fn sphere(
    common: Common,
    mode: SphereMode,
    point: Option<String>,
    inverse: bool,
    delta: Option<f64>,
    r: Option<f64>,
) -> Result<(), Failure> {
    let out = common.out(Format::Csv);
    match mode {
        SphereMode::Project => {
            let Some(p) = point else {
                return usage("--mode project needs --point x1,...,xN");
            };
            let p = parse_point(&p)?;
            let (input_pt, image) = if inverse {
                let y = SpherePoint::new(p.clone())?;
                (p, inverse_project(&y)?)
            } else {
                let y = stereographic_project(&p);
                (p, y.coordinates)
            };
            match out.format {
                Format::Json => out.json(&json!({"input": input_pt, "image": image, "inverse": inverse})),
                Format::Csv => {
                    let header: Vec<String> = (1..=image.len()).map(|i| format!("y{i}")).collect();
                    out.csv(&header, &[image.iter().map(|v| num(*v)).collect()])
                }
            }
        }
        SphereMode::Volume => {
            let region = common.region()?;
            let plan = common.plan()?;
            let (quantity, v) = match delta {
                Some(d) => ("nbhd_volume", spherical_nbhd_volume(&region, d, &plan)?),
                None => ("spherical_volume", spherical_volume(&region, &plan)?),
            };
            match out.format {
                Format::Json => out.json(&json!({"quantity": quantity, "delta": delta, "volume": v})),
                Format::Csv => out.csv(
                    &["quantity", "delta", "value", "abs_error", "route"].map(String::from),
                    &[vec![quantity.into(), delta.map(num).unwrap_or_default(), num(v.value), num(v.abs_error), v.route.into()]],
                ),
            }
        }
        SphereMode::Content => {
            let Some(r) = r else {
                return usage("--mode content needs --r");
            };
            let region = common.region()?;
            let c = spherical_content(&region, r, &DeltaGrid::matching(&common.grid()?), &common.plan()?)?;
            match out.format {
                Format::Json => out.json(&json!({
                    "r": c.r,
                    "upper": c.upper,
                    "lower": c.lower,
                    "upper_error": c.upper_error,
                    "lower_error": c.lower_error,
                    "delta_window": c.delta_window,
                })),
                Format::Csv => {
                    let rows = c
                        .points
                        .iter()
                        .map(|p| vec![num(p.t), num(p.volume), num(p.abs_error), num(p.normalized)])
                        .collect::<Vec<_>>();
                    out.csv(&["delta", "nbhd_volume", "abs_error", "normalized"].map(String::from), &rows)
                }
            }
        }
        SphereMode::Compare => {
            let Some(r) = r else {
                return usage("--mode compare needs --r");
            };
            let region = common.region()?;
            let rep = check_sphere_comparison(&region, r, &common.grid()?, &common.plan()?)?;
            output::report(&out, &rep)
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("SHELLZETA_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("SHELLZETA_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return usage("SHELLZETA_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Verify(n) => eprintln!("verify: {n} check(s) failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
