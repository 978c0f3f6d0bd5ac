//! `magic8`: q-expansions, magic-function enclosures, lattice data and the
//! verification suite from the command line.

mod figure3;
mod numparse;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magic8::ball::RealBall;
use magic8::certify::{self, CheckResult, Status, Suite, VerifyOptions};
use magic8::evaluator::{Forms, MagicFn, DEFAULT_ORDER};
use magic8::lattice::{self, LatticeKind};
use magic8::modforms::{FormBank, SlashWord};
use magic8::Error;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};

use numparse::Num;

const MIN_PREC: u32 = 64;
const MIN_ORDER: i64 = 40;

#[derive(Parser, Debug)]
#[command(
    name = "magic8",
    version,
    about = "The eight-dimensional magic function, certified"
)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 192, env = "MAGIC8_PREC",
          value_parser = clap::value_parser!(u32).range(MIN_PREC as i64..))]
    prec: u32,

    /// Truncation index of the q-series (exclusive, in powers of q^(1/2)).
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER,
          value_parser = clap::value_parser!(i64).range(1..))]
    order: i64,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the q-expansion of a named form.
    Qexp(QexpArgs),
    /// Enclose the magic functions, g, or a named form on the imaginary axis.
    Eval(EvalArgs),
    /// Shells, holes, density and distance slices of Z^d, D_d and E8.
    Lattice(LatticeArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Emit CSV grids for plots.
    Plotdata(PlotArgs),
    /// Print the plotted LP bound and packing density table.
    Lpbound(LpArgs),
}

#[derive(Args, Debug)]
struct QexpArgs {
    /// Form name, e.g. psi, alpha1, E4.
    #[arg(long)]
    form: String,
    /// Slash word in S, T and T^-1, applied left to right.
    #[arg(long, default_value = "1")]
    slash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Function {
    G,
    F,
    Fhat,
    Fplus,
    Fminus,
}

impl Function {
    fn magic(self) -> Option<MagicFn> {
        match self {
            Function::G => None,
            Function::F => Some(MagicFn::F),
            Function::Fhat => Some(MagicFn::FHat),
            Function::Fplus => Some(MagicFn::FPlus),
            Function::Fminus => Some(MagicFn::FMinus),
        }
    }

    fn name(self) -> &'static str {
        self.magic().map_or("g", MagicFn::name)
    }
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["function", "form"]))]
struct EvalArgs {
    /// Radial function to evaluate.
    #[arg(long, value_enum, requires = "radius")]
    function: Option<Function>,
    /// Radius: decimal, p/q, or sqrt(x).
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<String>,
    /// Radial derivative instead of the value.
    #[arg(long)]
    derivative: bool,
    /// Named form to evaluate at z = it (phi is accepted too).
    #[arg(long, requires = "t", conflicts_with_all = ["function", "derivative"])]
    form: Option<String>,
    /// Positive imaginary part t.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true)
    .args(["theta_max", "holes", "slice", "density"]))]
struct LatticeArgs {
    /// z, d or e8.
    #[arg(long)]
    name: String,
    /// Dimension (E8 only exists for 8).
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Shell counts for squared norms up to K.
    #[arg(long, value_name = "K")]
    theta_max: Option<String>,
    /// The shallow and deep holes of D_d.
    #[arg(long)]
    holes: bool,
    /// Squared distance grid over s*u + t*v: u1,u2,.../v1,v2,.../range/step.
    #[arg(long, allow_hyphen_values = true)]
    slice: Option<String>,
    /// Center density enclosure.
    #[arg(long)]
    density: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Golden,
    Signs,
    Roots,
    Poisson,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Golden => Suite::Golden,
            SuiteArg::Signs => Suite::Signs,
            SuiteArg::Roots => Suite::Roots,
            SuiteArg::Poisson => Suite::Poisson,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Report {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Range of t for the sign certificate.
    #[arg(long, default_value = "1/20:20")]
    t_range: String,
    /// Largest n for the roots at sqrt(2n).
    #[arg(long, default_value_t = 10)]
    n_max: u32,
    #[arg(long, value_enum)]
    report: Option<Report>,
    /// Write the sign certificate as JSON to this file.
    #[arg(long, value_name = "PATH")]
    certificate: Option<std::path::PathBuf>,
    /// Report elapsed as 0 so the output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Figure5,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("grid").required(true).args(["preset", "function"]))]
struct PlotArgs {
    /// Both panels of the magic-function figure: raw f and
    /// exp(2 pi r) r^(7/2) f(r) / 300, for r in [0, 3] step 0.015.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, value_enum, requires_all = ["from", "to", "step"])]
    function: Option<Function>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    #[arg(long)]
    step: Option<String>,
}

#[derive(Args, Debug)]
struct LpArgs {
    /// Print the table (the only mode).
    #[arg(long, required = true)]
    table: bool,
}

/// Failure modes of a command; usage errors exit with 2, the rest with 1.
enum Failure {
    Usage(String),
    Runtime(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse(_) | Error::UnknownForm(_) | Error::BadDimension(_) => {
                Failure::Usage(e.to_string())
            }
            Error::UnsupportedLattice(_) | Error::WeightMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::BufWriter::new(io::stdout().lock());
    let res = run(&cli, &mut out).and_then(|()| out.flush().map_err(Failure::from));
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Runtime(m)) => {
            let _ = out.flush();
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            let _ = out.flush();
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    match &cli.command {
        Command::Qexp(a) => qexp(cli, a, out),
        Command::Eval(a) => eval(cli, a, out),
        Command::Lattice(a) => lattice_cmd(cli, a, out),
        Command::Verify(a) => verify(cli, a, out),
        Command::Plotdata(a) => plotdata(cli, a, out),
        Command::Lpbound(a) => lpbound(cli, a, out),
    }
}

/// Forms at the requested order; evaluation needs enough guard terms.
fn forms(cli: &Cli) -> Result<&'static Forms, Failure> {
    if cli.order < MIN_ORDER {
        return Err(usage(format!(
            "--order must be at least {MIN_ORDER} for evaluation"
        )));
    }
    if cli.order == DEFAULT_ORDER {
        Ok(Forms::standard())
    } else {
        Ok(Box::leak(Box::new(Forms::new(cli.order))))
    }
}

fn digits(prec: u32) -> usize {
    RealBall::decimal_digits(prec)
}

fn write_json(out: &mut impl Write, v: &Value) -> Outcome {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn qexp(cli: &Cli, a: &QexpArgs, out: &mut impl Write) -> Outcome {
    let word: SlashWord = a.slash.parse()?;
    let bank = if cli.order == DEFAULT_ORDER {
        Forms::standard().bank()
    } else {
        &*Box::leak(Box::new(FormBank::new(cli.order)))
    };
    let s = bank.named_slashed(&a.form, &word)?;
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => write!(out, "{}", s.to_csv())?,
        Format::Json => write_json(
            out,
            &json!({
                "form": a.form,
                "slash": a.slash,
                "order": cli.order,
                "coefficients": s.to_json(),
            }),
        )?,
        Format::Text => writeln!(out, "{s}")?,
    }
    Ok(())
}

fn eval(cli: &Cli, a: &EvalArgs, out: &mut impl Write) -> Outcome {
    let prec = cli.prec;
    let forms = forms(cli)?;
    let (label, arg, value) = if let Some(form) = &a.form {
        let t = Num::parse(a.t.as_deref().unwrap_or_default()).map_err(usage)?;
        let tb = t.ball(prec);
        if !tb.is_positive() {
            return Err(usage("--t must be positive"));
        }
        let v = forms.eval_it(form, &tb, prec)?;
        (form.clone(), a.t.clone().unwrap_or_default(), v)
    } else {
        let f = a.function.expect("clap requires a target");
        let r = Num::parse(a.radius.as_deref().unwrap_or_default()).map_err(usage)?;
        if r.is_negative() {
            return Err(usage("--radius must be nonnegative"));
        }
        let rb = r.ball(prec);
        let bundle = forms.bundle(prec)?;
        let v = match (f.magic(), a.derivative) {
            (Some(m), false) => bundle.eval(m, &rb)?,
            (Some(m), true) => bundle.deriv(m, &rb)?,
            (None, false) => bundle.g(&rb)?,
            (None, true) => bundle.g_deriv(&rb)?,
        };
        let label = if a.derivative {
            format!("{}'", f.name())
        } else {
            f.name().to_string()
        };
        (label, a.radius.clone().unwrap_or_default(), v)
    };
    let (argname, unit) = if a.form.is_some() {
        ("t", "imaginary part of z")
    } else {
        ("r", "Euclidean radius in R^8")
    };
    let mid = value.mid_decimal(digits(prec));
    let rad = value.rad_decimal();
    match cli.format.unwrap_or(Format::Text) {
        Format::Text => writeln!(out, "{label}({arg}) = {mid} ± {rad}")?,
        Format::Csv => {
            writeln!(
                out,
                "# {argname}: {unit}; value enclosed as midpoint ± radius"
            )?;
            writeln!(out, "function,{argname},midpoint,radius")?;
            writeln!(out, "{label},{arg},{mid},{rad}")?;
        }
        Format::Json => write_json(
            out,
            &json!({
                "function": label,
                "argument": argname,
                "at": arg,
                "midpoint": mid,
                "radius": rad,
                "prec": prec,
            }),
        )?,
    }
    Ok(())
}

fn lattice_cmd(cli: &Cli, a: &LatticeArgs, out: &mut impl Write) -> Outcome {
    let kind = LatticeKind::parse(&a.name)?;
    let l = lattice::make_lattice(kind, a.dim)?;
    let fmt = cli.format.unwrap_or(Format::Csv);
    if let Some(k) = &a.theta_max {
        let k = numparse::rational(k).map_err(usage)?;
        if k.is_negative() {
            return Err(usage("--theta-max must be nonnegative"));
        }
        let shells = l.enumerate_shells(&k);
        match fmt {
            Format::Json => write_json(
                out,
                &json!({
                    "lattice": l.name,
                    "dim": a.dim,
                    "shells": shells.iter().map(|s| json!({
                        "squared_norm": s.squared_norm.to_string(),
                        "count": s.count,
                    })).collect::<Vec<_>>(),
                }),
            )?,
            _ => {
                writeln!(out, "squared_norm,count")?;
                for s in &shells {
                    writeln!(out, "{},{}", s.squared_norm, s.count)?;
                }
            }
        }
    } else if a.holes {
        if kind != LatticeKind::D {
            return Err(usage("--holes is available for the d lattices only"));
        }
        let (shallow, deep) = lattice::holes_dd(a.dim)?;
        let vec_str = |v: &[BigRational]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        match fmt {
            Format::Json => {
                let h = |name: &str, h: &lattice::Hole| {
                    json!({
                        "hole": name,
                        "point": h.point.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "nearest": h.nearest.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "dist2": h.dist2.to_string(),
                    })
                };
                write_json(
                    out,
                    &json!({"lattice": l.name, "dim": a.dim,
                            "holes": [h("shallow", &shallow), h("deep", &deep)]}),
                )?
            }
            _ => {
                writeln!(out, "hole,point,nearest,dist2")?;
                for (name, h) in [("shallow", &shallow), ("deep", &deep)] {
                    writeln!(
                        out,
                        "{name},{},{},{}",
                        vec_str(&h.point),
                        vec_str(&h.nearest),
                        h.dist2
                    )?;
                }
            }
        }
    } else if let Some(spec) = &a.slice {
        let parts: Vec<&str> = spec.split('/').collect();
        if parts.len() != 4 {
            return Err(usage("--slice takes u1,.../v1,.../range/step"));
        }
        let vector = |s: &str| -> Result<Vec<BigRational>, Failure> {
            s.split(',')
                .map(|x| numparse::rational(x).map_err(usage))
                .collect()
        };
        let u = vector(parts[0])?;
        let v = vector(parts[1])?;
        let range = numparse::rational(parts[2]).map_err(usage)?;
        let step = numparse::rational(parts[3]).map_err(usage)?;
        let grid = lattice::slice_grid(&l, &u, &v, &range, &step)?;
        match fmt {
            Format::Json => write_json(
                out,
                &json!({
                    "lattice": l.name,
                    "dim": a.dim,
                    "grid": grid.iter().map(|(s, t, d)| json!({
                        "s": s.to_string(), "t": t.to_string(), "dist2": d.to_string(),
                    })).collect::<Vec<_>>(),
                }),
            )?,
            _ => {
                writeln!(out, "s,t,dist2")?;
                for (s, t, d) in &grid {
                    writeln!(out, "{s},{t},{d}")?;
                }
            }
        }
    } else {
        let d = l.packing_density(cli.prec);
        let mid = d.mid_decimal(digits(cli.prec));
        let rad = d.rad_decimal();
        match fmt {
            Format::Json => write_json(
                out,
                &json!({"lattice": l.name, "dim": a.dim, "midpoint": mid, "radius": rad}),
            )?,
            Format::Csv => {
                writeln!(out, "lattice,dim,midpoint,radius")?;
                writeln!(out, "{},{},{mid},{rad}", l.name, a.dim)?;
            }
            Format::Text => writeln!(out, "density({}) = {mid} ± {rad}", l.name)?,
        }
    }
    Ok(())
}

fn verify(cli: &Cli, a: &VerifyArgs, out: &mut impl Write) -> Outcome {
    let forms = forms(cli)?;
    let (lo, hi) = a
        .t_range
        .split_once(':')
        .ok_or_else(|| usage("--t-range takes LO:HI"))?;
    let mut opts = VerifyOptions::new(cli.prec);
    opts.t_lo = numparse::rational(lo).map_err(usage)?;
    opts.t_hi = numparse::rational(hi).map_err(usage)?;
    opts.n_max = a.n_max;
    if !opts.t_lo.is_positive() || opts.t_lo >= opts.t_hi {
        return Err(usage("--t-range needs 0 < LO < HI"));
    }
    let (mut results, cert) = certify::run_suite_with_certificate(forms, a.suite.into(), &opts);
    if a.no_timing {
        for r in &mut results {
            r.elapsed = 0.0;
        }
    }
    if let Some(path) = &a.certificate {
        let cert = cert.ok_or_else(|| usage("--certificate needs a suite with signs"))?;
        let mut text =
            serde_json::to_string_pretty(&cert).map_err(|e| Failure::Runtime(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    let report = a.report.unwrap_or(match cli.format {
        Some(Format::Json) => Report::Json,
        _ => Report::Text,
    });
    match report {
        Report::Json => write_json(
            out,
            &serde_json::to_value(&results).map_err(|e| Failure::Runtime(e.to_string()))?,
        )?,
        Report::Text => write_text_report(&results, out)?,
    }
    if certify::overall(&results) == Status::Pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn write_text_report(results: &[CheckResult], out: &mut impl Write) -> Outcome {
    let width = results.iter().map(|r| r.check_id.len()).max().unwrap_or(0);
    for r in results {
        writeln!(
            out,
            "{:<width$}  {:<12}  prec {:>4}  {:>8.2}s",
            r.check_id,
            r.status.name(),
            r.prec_used,
            r.elapsed
        )?;
    }
    writeln!(out, "overall: {}", certify::overall(results))?;
    Ok(())
}

/// `(panel, r, value)` over the grid, evaluated in parallel.
fn plot_rows(
    forms: &Forms,
    prec: u32,
    points: Vec<(&'static str, BigRational, Function, bool)>,
) -> Result<Vec<(&'static str, BigRational, RealBall)>, Failure> {
    let bundle = forms.bundle(prec)?;
    let pi = RealBall::pi(prec);
    points
        .into_par_iter()
        .map(|(panel, r, f, scaled)| {
            let rb = RealBall::from_rational(&r, prec);
            let mut v = match f.magic() {
                Some(m) => bundle.eval(m, &rb)?,
                None => bundle.g(&rb)?,
            };
            if scaled {
                // exp(2 pi r) r^(7/2) / 300
                let w = (&pi * &rb).mul_2exp(1).exp();
                let w = &(&w * &rb.pow(3)) * &rb.sqrt();
                v = (&v * &w).div_u64(300);
            }
            Ok((panel, r, v))
        })
        .collect::<magic8::Result<Vec<_>>>()
        .map_err(Failure::from)
}

fn grid(from: &BigRational, to: &BigRational, step: &BigRational) -> Vec<BigRational> {
    let mut v = Vec::new();
    let mut x = from.clone();
    while &x <= to {
        v.push(x.clone());
        x += step;
    }
    v
}

fn plotdata(cli: &Cli, a: &PlotArgs, out: &mut impl Write) -> Outcome {
    let prec = cli.prec;
    let (header, points) = if a.preset.is_some() {
        let rs = grid(
            &BigRational::from_integer(0.into()),
            &BigRational::from_integer(3.into()),
            &BigRational::new(3.into(), 200.into()),
        );
        let mut pts = Vec::new();
        for (panel, scaled) in [("raw", false), ("scaled", true)] {
            for r in &rs {
                pts.push((panel, r.clone(), Function::F, scaled));
            }
        }
        (
            "preset figure5: panel raw is f(r); panel scaled is exp(2 pi r) r^(7/2) f(r) / 300; \
             r is the Euclidean radius in R^8; values are midpoint ± radius",
            pts,
        )
    } else {
        let f = a.function.expect("clap requires a grid");
        let parse = |s: &Option<String>| numparse::rational(s.as_deref().unwrap_or_default());
        let from = parse(&a.from).map_err(usage)?;
        let to = parse(&a.to).map_err(usage)?;
        let step = parse(&a.step).map_err(usage)?;
        if !step.is_positive() || from.is_negative() || from > to {
            return Err(usage("grid needs 0 <= FROM <= TO and STEP > 0"));
        }
        let pts = grid(&from, &to, &step)
            .into_iter()
            .map(|r| (f.name(), r, f, false))
            .collect();
        (
            "panel is the function name; r is the Euclidean radius in R^8; values are midpoint ± radius",
            pts,
        )
    };
    let forms = forms(cli)?;
    let rows = plot_rows(forms, prec, points)?;
    let d = digits(prec);
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(
            out,
            &json!({
                "provenance": header,
                "rows": rows.iter().map(|(p, r, v)| json!({
                    "panel": p,
                    "r": decimal(r),
                    "midpoint": v.mid_decimal(d),
                    "radius": v.rad_decimal(),
                })).collect::<Vec<_>>(),
            }),
        )?,
        _ => {
            writeln!(out, "# {header}")?;
            writeln!(out, "panel,r,midpoint,radius")?;
            for (p, r, v) in &rows {
                writeln!(
                    out,
                    "{p},{},{},{}",
                    decimal(r),
                    v.mid_decimal(d),
                    v.rad_decimal()
                )?;
            }
        }
    }
    Ok(())
}

/// Terminating decimal rendering of a grid point, falling back to `p/q`.
fn decimal(q: &BigRational) -> String {
    let mut den = q.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = 2.into();
    let five = 5.into();
    while (&den % &two) == 0.into() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five) == 0.into() {
        den /= &five;
        fives += 1;
    }
    if den != 1.into() {
        return q.to_string();
    }
    let places = twos.max(fives);
    let scaled =
        (q * BigRational::from_integer(num_bigint::BigInt::from(10).pow(places))).to_integer();
    if places == 0 {
        return scaled.to_string();
    }
    let neg = scaled.is_negative();
    let s = format!("{:0>width$}", scaled.abs(), width = places as usize + 1);
    let (i, f) = s.split_at(s.len() - places as usize);
    format!("{}{i}.{f}", if neg { "-" } else { "" })
}

fn lpbound(cli: &Cli, _a: &LpArgs, out: &mut impl Write) -> Outcome {
    match cli.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(
            out,
            &json!({
                "provenance": figure3::PROVENANCE,
                "rows": figure3::TABLE.iter().map(|(d, lp, dens)| json!({
                    "dimension": d, "lp_bound": lp, "packing_density": dens,
                })).collect::<Vec<_>>(),
            }),
        )?,
        _ => {
            writeln!(out, "# {}", figure3::PROVENANCE)?;
            writeln!(out, "dimension,lp_bound,packing_density")?;
            for (d, lp, dens) in figure3::TABLE {
                writeln!(out, "{d},{lp},{dens}")?;
            }
        }
    }
    Ok(())
}
