//! The `philap` command line: `analyze | verdict | scan | verify | constants`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{check_precision, ConfigError, Instance, RunConfig};
use crate::coupling::coupling_profile;
use crate::degree::{profile, DegreeProfile};
use crate::ext::ExtReal;
use crate::radial::sweep_radii;
use crate::report::{format_ext, format_number, Csv};
use crate::scan::{run_scan, ScanError};
use crate::verdict::{classify, harnack_form, Verdict};
use crate::Error;

pub mod exit {
    pub const OK: i32 = 0;
    pub const NOT_APPLICABLE: i32 = 2;
    pub const CONFIG: i32 = 64;
    pub const UNSUPPORTED: i32 = 65;
    pub const RESOURCE: i32 = 66;
    pub const SOLVER: i32 = 70;
}

#[derive(Debug, Parser)]
#[command(name = "philap", version, about = "Gradient-estimate conditions for phi-Laplacian equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree bounds, gamma, Gamma, I_psi, Theta, theta and alpha.
    Analyze(RunArgs),
    /// Whether the estimate holds, with the Liouville conclusion if requested.
    Verdict(RunArgs),
    /// Admissibility over a two-parameter grid.
    Scan(RunArgs),
    /// Radial solutions and the empirical estimate constants.
    Verify(RunArgs),
    /// Constants of the iteration scheme.
    Constants(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Significant digits in numeric output, 6 to 17.
    #[arg(long)]
    pub precision: Option<usize>,
}

impl Command {
    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Analyze(a) | Command::Verdict(a) | Command::Scan(a) | Command::Verify(a) | Command::Constants(a) => a,
        }
    }
}

/// A command that could not complete, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl std::fmt::Display) -> Self {
        Self { code, message: message.to_string() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(exit::CONFIG, e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_) | Error::UnsupportedFamily(_) => exit::UNSUPPORTED,
            Error::Precondition(_) => exit::CONFIG,
            _ => exit::SOLVER,
        };
        Failure::new(code, e)
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Config(c) => c.into(),
            ScanError::TooLarge(_) => Failure::new(exit::RESOURCE, e),
            ScanError::Cell { error, .. } => error.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(exit::RESOURCE, e)
    }
}

struct Ctx<'a> {
    cfg: RunConfig,
    precision: usize,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn num(&self, x: f64) -> String {
        format_number(x, self.precision)
    }

    fn ext(&self, x: ExtReal) -> String {
        format_ext(x, self.precision)
    }

    /// Writes `csv` to the configured path, or to stdout when `always` is set
    /// and no path was given.
    fn emit_csv(&mut self, csv: &Csv, always: bool) -> Result<(), Failure> {
        match &self.csv {
            Some(path) => write_file(path, &csv.render()),
            None if always => Ok(self.out.write_all(csv.render().as_bytes())?),
            None => Ok(()),
        }
    }

    fn instance(&self) -> Result<Instance, Failure> {
        Ok(self.cfg.fixed_instance()??)
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::new(exit::RESOURCE, format!("cannot write {}: {e}", path.display())))
}

/// Runs one command and returns its exit code.
pub fn run(command: &Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let args = command.args();
    let cfg = RunConfig::load(&args.config)?;
    let precision = args.precision.unwrap_or_else(|| cfg.precision());
    check_precision(precision)?;
    let csv = args.csv.clone().or_else(|| cfg.output.csv.clone());
    let svg = args.svg.clone().or_else(|| cfg.output.svg.clone());
    let mut ctx = Ctx { cfg, precision, csv, svg, out };
    match command {
        Command::Analyze(_) => analyze(&mut ctx),
        Command::Verdict(_) => verdict(&mut ctx),
        Command::Scan(_) => scan(&mut ctx),
        Command::Verify(_) => verify(&mut ctx),
        Command::Constants(_) => constants(&mut ctx),
    }
}

/// Parses `args` (program name first), runs, and reports failures on stderr.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { exit::CONFIG } else { exit::OK };
        }
    };
    match run(&cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn degree_lines(ctx: &Ctx, d: &DegreeProfile) -> Vec<(String, String, String)> {
    let closed = |x: Option<f64>| x.map_or("none".to_string(), |v| ctx.num(v));
    vec![
        ("l".into(), ctx.ext(d.l), format!("closed_form; {}", d.l_witness)),
        ("d".into(), ctx.ext(d.d), format!("closed_form; {}", d.d_witness)),
        (
            "gamma".into(),
            ctx.ext(d.gamma),
            format!("numeric; {}; closed form {}", d.gamma_witness, closed(d.gamma_closed)),
        ),
        (
            "Gamma".into(),
            ctx.ext(d.big_gamma),
            format!("{}; {}; numeric {}", d.method, d.big_gamma_witness, ctx.ext(d.big_gamma_numeric)),
        ),
    ]
}

fn analyze(ctx: &mut Ctx) -> Result<i32, Failure> {
    let inst = ctx.instance()?;
    let d = profile(&inst.phi, inst.n);
    let mut rows = degree_lines(ctx, &d);
    writeln!(ctx.out, "phi = {}, psi = {}, n = {}", inst.phi, inst.psi, inst.n)?;
    if !d.phi1_ok {
        let what = if d.d.is_finite() { format!("l = {}", ctx.ext(d.l)) } else { format!("d = {}", ctx.ext(d.d)) };
        for (k, v, m) in &rows[..2] {
            writeln!(ctx.out, "{k:>9} = {v}  [{m}]")?;
        }
        writeln!(ctx.out, "(phi1) fails: {what}")?;
        rows.truncate(2);
    } else {
        let c = coupling_profile(&inst.phi, &inst.psi, &d)?;
        rows.extend([
            ("I_psi".into(), c.i_psi.to_string(), c.method.to_string()),
            ("Theta".into(), ctx.ext(c.theta_big), c.method.to_string()),
            ("threshold".into(), ctx.num(c.threshold), "4 gamma/(n-1)".into()),
            ("theta".into(), ctx.ext(c.theta_small), "derived".into()),
            ("alpha".into(), ctx.ext(c.alpha), "derived".into()),
        ]);
        for (k, v, m) in &rows {
            writeln!(ctx.out, "{k:>9} = {v}  [{m}]")?;
        }
        let ok = |b: bool| if b { "holds" } else { "fails" };
        writeln!(ctx.out, "(phi1) {}, (phi2) {}, (psi2) {}", ok(d.phi1_ok), ok(d.phi2_ok), ok(c.psi2_ok))?;
    }
    let mut csv = Csv::new(&["quantity", "value", "method"]);
    for (k, v, m) in rows {
        csv.push(vec![k, v, m]);
    }
    ctx.emit_csv(&csv, false)?;
    Ok(exit::OK)
}

fn verdict(ctx: &mut Ctx) -> Result<i32, Failure> {
    let inst = ctx.instance()?;
    let v = classify(&inst.phi, &inst.psi, inst.n, ctx.cfg.liouville)?;
    writeln!(ctx.out, "phi = {}, psi = {}, n = {}", inst.phi, inst.psi, inst.n)?;
    let (failed, conclusion) = match &v {
        Verdict::NotApplicable { failed, detail, .. } => {
            writeln!(ctx.out, "estimate not established: ({failed}) fails, {detail}")?;
            (failed.to_string(), String::new())
        }
        Verdict::EstimateHolds(_) => {
            writeln!(ctx.out, "gradient estimate holds: |grad u|/u <= C (1 + sqrt(K) R)/R on B(o,R)")?;
            writeln!(ctx.out, "Harnack: {}", harnack_form(false))?;
            ("-".into(), String::new())
        }
        Verdict::Liouville { conclusion, .. } => {
            writeln!(ctx.out, "gradient estimate holds; Harnack: {}", harnack_form(true))?;
            writeln!(ctx.out, "Liouville: {conclusion}")?;
            ("-".into(), conclusion.to_string())
        }
    };
    let margin = ctx.ext(v.margin());
    writeln!(
        ctx.out,
        "verdict status={} failed={} margin={} boundary={} conclusion=\"{}\"",
        v.status(),
        failed,
        margin,
        u8::from(v.is_boundary()),
        conclusion
    )?;
    let mut csv = Csv::new(&["status", "failed", "margin", "boundary", "conclusion"]);
    csv.push(vec![v.status().into(), failed, margin, u8::from(v.is_boundary()).to_string(), conclusion]);
    ctx.emit_csv(&csv, false)?;
    Ok(if v.applicable() { exit::OK } else { exit::NOT_APPLICABLE })
}

fn scan(ctx: &mut Ctx) -> Result<i32, Failure> {
    let res = run_scan(&ctx.cfg)?;
    let csv = res.to_csv(ctx.precision);
    ctx.emit_csv(&csv, true)?;
    if let Some(path) = &ctx.svg {
        write_file(path, &res.to_svg())?;
    }
    Ok(exit::OK)
}

fn verify(ctx: &mut Ctx) -> Result<i32, Failure> {
    let inst = ctx.instance()?;
    let space = ctx.cfg.model_space()??;
    let solver = ctx.cfg.solver.clone().ok_or_else(|| ConfigError::Invalid("verify needs a [solver] section".into()))?;
    let radii = solver.radii()?;
    let rows = sweep_radii(&inst.phi, &inst.psi, space, solver.u0, &radii, solver.h)?;
    let mut csv = Csv::new(&["R", "c_hat", "harnack_log", "positive_ok", "residual_max"]);
    for r in &rows {
        csv.push(vec![
            ctx.num(r.radius),
            ctx.num(r.c_hat),
            ctx.num(r.harnack_log),
            u8::from(r.positive_ok).to_string(),
            ctx.num(r.residual_max),
        ]);
    }
    ctx.emit_csv(&csv, true)?;
    Ok(exit::OK)
}

fn constants(ctx: &mut Ctx) -> Result<i32, Failure> {
    let inst = ctx.instance()?;
    let v = classify(&inst.phi, &inst.psi, inst.n, false)?;
    let (Verdict::EstimateHolds(a) | Verdict::Liouville { assessment: a, .. }) = &v else {
        if let Verdict::NotApplicable { failed, detail, .. } = &v {
            writeln!(ctx.out, "({failed}) fails: {detail}")?;
        }
        return Ok(exit::NOT_APPLICABLE);
    };
    let k = &a.constants;
    let rows = [
        ("a0", ExtReal::Finite(k.a0)),
        ("a1", ExtReal::Finite(k.a1)),
        ("a2", ExtReal::Finite(k.a2)),
        ("a3", ExtReal::Finite(k.a3)),
        ("theta", a.coupling.theta_small),
        ("alpha", a.coupling.alpha),
        ("b_threshold", ExtReal::Finite(k.b_threshold)),
    ];
    let mut csv = Csv::new(&["constant", "value"]);
    for (name, value) in rows {
        writeln!(ctx.out, "{name:>11} = {}", ctx.ext(value))?;
        csv.push(vec![name.into(), ctx.ext(value)]);
    }
    writeln!(ctx.out, "b > {}", ctx.num(k.b_threshold))?;
    ctx.emit_csv(&csv, false)?;
    Ok(exit::OK)
}
