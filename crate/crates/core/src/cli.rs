//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration (or other) error, 2 halt at a
//! singular light front, 3 incompatible initial data.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::compatibility::{adapt_initial_field, check_c1, check_c2_with, C1Report, C2Report, C2Options};
use crate::config::{ConfigDoc, OnFront};
use crate::dynamics::RunEvent;
use crate::error::{Error, FrontEvent, Result};
use crate::output::{write_grid, write_trajectory, GridRow, Manifest, OutputFormat, RunDir};
use crate::propagation::{
    evaluate_grid, propagate_free_field_with, EvalOptions, FieldSample, FreeFieldOptions, FreeFieldSpec, FrontPolicy,
    InitialFieldSpec, Region, DEFAULT_SPHERE_ORDER,
};
use crate::scenarios::{
    coulomb_front, paper_example, run_document, shell_report, CoulombFront, Dynamics, ShellReport, SimulationRun,
    TwoBodyPreset,
};
use crate::units::{UnitMode, UnitScale};
use crate::Vec3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FRONT: i32 = 2;
pub const EXIT_INCOMPATIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lightfront", version, about = "Point-charge fields, light fronts and delay dynamics")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Configuration document (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; a manifest.json is written next to the outputs.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Units of the written numbers; defaults to the units of the document.
    #[arg(long, global = true, value_parser = parse_units)]
    pub units: Option<UnitMode>,
    /// Worker threads for grid evaluation and force sums.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

fn parse_units(s: &str) -> std::result::Result<UnitMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "natural" => Ok(UnitMode::Natural),
        "si" => Ok(UnitMode::Si),
        _ => Err(format!("unknown units {s:?} (natural or si)")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field of one charge on a grid (the document's `field` section).
    EvaluateField,
    /// Integrate the charge dynamics up to `horizon`.
    Simulate,
    /// First and second compatibility conditions for every charge.
    Check,
    /// Run a canned scenario: coulomb-front, paper-example, retarded-line,
    /// retarded-line-adapted, retarded-line-smeared, fst-window.
    Scenario { name: String },
    /// Propagate free initial data (the document's `free_propagation` section).
    PropagateFree,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let mut printed = Vec::new();
    let result = match cli.common.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut printed)),
            Err(e) => Err(Error::Config(format!("--threads: {e}"))),
        },
        None => dispatch(&cli, &mut printed),
    };
    let _ = stdout.write_all(&printed);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::SingularFront(_) => EXIT_FRONT,
                _ => EXIT_CONFIG,
            }
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let c = &cli.common;
    match &cli.command {
        Command::EvaluateField => {
            let (doc, bytes) = load(c)?;
            evaluate_field(&doc, &bytes, c)
        }
        Command::Simulate => {
            let (doc, bytes) = load(c)?;
            simulate(&doc, &bytes, c, "simulate")
        }
        Command::Check => {
            let (doc, bytes) = load(c)?;
            check(&doc, &bytes, c, stdout)
        }
        Command::Scenario { name } => scenario(name, c, stdout),
        Command::PropagateFree => {
            let (doc, bytes) = load(c)?;
            propagate_free(&doc, &bytes, c)
        }
    }
}

fn load(c: &Common) -> Result<(ConfigDoc, Vec<u8>)> {
    let path = c.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    ConfigDoc::load(path)
}

fn out_dir(c: &Common) -> Result<&Path> {
    c.out.as_deref().ok_or_else(|| Error::Config("--out is required".into()))
}

/// Scale for SI output, or `None` for natural units.
fn output_scale(doc: &ConfigDoc, c: &Common) -> Option<UnitScale> {
    match c.units.unwrap_or(doc.units) {
        UnitMode::Si => Some(doc.scale),
        UnitMode::Natural => None,
    }
}

fn units_label(scale: Option<UnitScale>) -> &'static str {
    if scale.is_some() {
        "si"
    } else {
        "natural"
    }
}

fn grid_bytes(rows: &[GridRow], format: OutputFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_grid(rows, format, &mut buf)?;
    Ok(buf)
}

fn scale_row(mut r: GridRow, charge: f64, scale: Option<UnitScale>) -> GridRow {
    for v in [&mut r.ex, &mut r.ey, &mut r.ez, &mut r.bx, &mut r.by, &mut r.bz] {
        *v *= charge;
    }
    match scale {
        Some(s) => r.to_si(&s),
        None => r,
    }
}

fn init_for(doc: &ConfigDoc, i: usize) -> Result<(std::sync::Arc<dyn crate::kinematics::Worldline>, InitialFieldSpec)> {
    let actual = doc.actual(i)?;
    let stripe = doc.stripe(i)?;
    let mut init = doc.initial_field(i, &stripe)?;
    if let Some(opts) = &doc.charges[i].initial_field.adapt {
        init = adapt_initial_field(&actual, &init, opts)?.spec;
    }
    Ok((actual, init))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FieldEvent<'a> {
    SingularFront(&'a FrontEvent),
}

fn evaluate_field(raw: &ConfigDoc, bytes: &[u8], c: &Common) -> Result<i32> {
    let doc = raw.to_natural()?;
    let field = doc.field.as_ref().ok_or_else(|| Error::Config("missing key `field`".into()))?;
    let i = field.charge;
    let e = doc.charges.get(i).ok_or_else(|| Error::Config(format!("field.charge: no charge {i}")))?.e;
    let (actual, init) = init_for(&doc, i)?;
    let points = field.grid.points()?;
    let on_front = match field.on_front {
        OnFront::Error => FrontPolicy::Error,
        OnFront::Report => FrontPolicy::Report,
    };
    let options = EvalOptions { on_front, ..EvalOptions::default() };
    let samples = evaluate_grid(&*actual, &init, &points, field.time, options)?;
    let scale = output_scale(raw, c);
    let mut run = RunDir::create(
        out_dir(c)?,
        Manifest::new("evaluate-field", Some(bytes), units_label(scale), json!({ "shell_band": options.band })),
    )?;
    let mut rows = Vec::with_capacity(points.len());
    for (x, s) in points.iter().zip(samples) {
        match s {
            Ok(s) => rows.push(scale_row(GridRow::from_sample(x, field.time, &s), e, scale)),
            Err(Error::SingularFront(ev)) => {
                run.write_json("events.json", &[FieldEvent::SingularFront(&ev)])?;
                run.finish()?;
                return Ok(EXIT_FRONT);
            }
            Err(err) => return Err(err),
        }
    }
    run.write(&format!("field.{}", c.format.extension()), &grid_bytes(&rows, c.format)?)?;
    run.finish()?;
    Ok(EXIT_OK)
}

fn write_simulation(run_out: &mut RunDir, doc: &ConfigDoc, sim: &SimulationRun, scale: Option<UnitScale>) -> Result<()> {
    for (i, h) in sim.dynamics.histories().iter().enumerate() {
        let mut buf = Vec::new();
        write_trajectory(h, scale.as_ref(), &mut buf)?;
        run_out.write(&format!("trajectory_{i}.csv"), &buf)?;
    }
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in &sim.forces {
            match scale {
                Some(s) => {
                    let f = |v| s.to_si(v, crate::units::Dimension::Force);
                    let t = s.to_si(r.t, crate::units::Dimension::Time);
                    w.serialize(crate::scenarios::ForceRow { charge: r.charge, t, fx: f(r.fx), fy: f(r.fy), fz: f(r.fz) })?;
                }
                None => w.serialize(r)?,
            }
        }
        w.flush()?;
    }
    run_out.write("forces.csv", &buf)?;
    let (halted, final_time) = match &sim.dynamics {
        Dynamics::Marched(o) => (o.halted, o.final_time),
        Dynamics::Relaxed(o) => (false, o.final_time),
    };
    run_out.write_json("events.json", &json!({ "halted": halted, "final_time": final_time, "events": sim.dynamics.events() }))?;
    let relaxation = match &sim.dynamics {
        Dynamics::Relaxed(o) => json!({ "iterations": o.iterations, "trace": o.trace }),
        Dynamics::Marched(_) => serde_json::Value::Null,
    };
    let adaptations: Vec<_> = sim.adaptations.iter().map(|(i, r)| json!({ "charge": i, "report": r })).collect();
    run_out.write_json(
        "report.json",
        &json!({
            "units": "natural",
            "horizon": doc.to_natural()?.horizon,
            "residual": sim.residual,
            "relaxation": relaxation,
            "adaptations": adaptations,
            "front_steps": sim.steps,
        }),
    )?;
    Ok(())
}

fn simulate(raw: &ConfigDoc, bytes: &[u8], c: &Common, command: &str) -> Result<i32> {
    let out = out_dir(c)?;
    let sim = run_document(raw)?;
    let scale = output_scale(raw, c);
    let tolerances = serde_json::to_value(sim.system.integrator)?;
    let mut run = RunDir::create(out, Manifest::new(command, Some(bytes), units_label(scale), tolerances))?;
    write_simulation(&mut run, raw, &sim, scale)?;
    run.finish()?;
    let front = sim.dynamics.halted() && sim.dynamics.events().iter().any(|e| matches!(e, RunEvent::FrontCrossing { .. }));
    Ok(if front { EXIT_FRONT } else { EXIT_OK })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChargeCheck {
    pub charge: usize,
    pub compatible: bool,
    pub c1: C1Report,
    pub c2: C2Report,
    pub shells: Option<ShellReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub order: usize,
    pub compatible: bool,
    pub charges: Vec<ChargeCheck>,
}

/// Checks every charge's initial field against its prescribed (or inertial)
/// motion at the document's `check.order`.
pub fn check_document(raw: &ConfigDoc) -> Result<CheckReport> {
    let doc = raw.to_natural()?;
    let settings = doc.check.unwrap_or_default();
    let mut charges = Vec::new();
    for i in 0..doc.charges.len() {
        let (actual, init) = init_for(&doc, i)?;
        let c1 = check_c1(&*actual, &init)?;
        let c2 = check_c2_with(&*actual, &init, settings.order, &settings.c2)?;
        let shells = if c1.pass { None } else { Some(shell_report(&*actual, &init, 1.0, 12)?) };
        charges.push(ChargeCheck { charge: i, compatible: c2.smoothness_class.is_at_least(settings.order), c1, c2, shells });
    }
    if charges.is_empty() {
        return Err(Error::Config("charges: at least one charge is required".into()));
    }
    Ok(CheckReport { order: settings.order, compatible: charges.iter().all(|c| c.compatible), charges })
}

fn check(raw: &ConfigDoc, bytes: &[u8], c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let report = check_document(raw)?;
    let text = serde_json::to_string_pretty(&report)?;
    writeln!(stdout, "{text}")?;
    if let Some(out) = &c.out {
        let c2 = raw.check.map(|k| k.c2).unwrap_or_else(C2Options::default);
        let mut run = RunDir::create(out, Manifest::new("check", Some(bytes), "natural", serde_json::to_value(c2)?))?;
        run.write_json("check.json", &report)?;
        run.finish()?;
    }
    Ok(if report.compatible { EXIT_OK } else { EXIT_INCOMPATIBLE })
}

fn propagate_free(raw: &ConfigDoc, bytes: &[u8], c: &Common) -> Result<i32> {
    let doc = raw.to_natural()?;
    let free = doc.free_propagation.as_ref().ok_or_else(|| Error::Config("missing key `free_propagation`".into()))?;
    free.spec.validate()?;
    let spec = match &free.tabulate {
        Some(t) => FreeFieldSpec::Tabulated(std::sync::Arc::new(free.spec.tabulate(t.origin, t.spacing, t.dims)?)),
        None => free.spec.clone(),
    };
    let options = FreeFieldOptions {
        force_quadrature: free.sphere_order.is_some(),
        sphere_order: free.sphere_order.unwrap_or(DEFAULT_SPHERE_ORDER),
    };
    let points = free.grid.points()?;
    use rayon::prelude::*;
    let values = points
        .par_iter()
        .map(|x| propagate_free_field_with(&spec, x, free.time, &options))
        .collect::<Result<Vec<_>>>()?;
    let scale = output_scale(raw, c);
    let rows: Vec<GridRow> = points
        .iter()
        .zip(values)
        .map(|(x, f)| {
            let s = FieldSample { regular: f, shells: Vec::new(), region: Region::OutsideCone };
            let mut r = GridRow::from_sample(x, free.time, &s);
            r.region = "free".into();
            scale_row(r, 1.0, scale)
        })
        .collect();
    let tol = json!({ "sphere_order": options.sphere_order, "quadrature": options.force_quadrature || free.tabulate.is_some() });
    let mut run = RunDir::create(out_dir(c)?, Manifest::new("propagate-free", Some(bytes), units_label(scale), tol))?;
    run.write(&format!("free.{}", c.format.extension()), &grid_bytes(&rows, c.format)?)?;
    run.finish()?;
    Ok(EXIT_OK)
}

fn scenario(name: &str, c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let command = format!("scenario {name}");
    match name {
        "coulomb-front" => {
            let data = coulomb_front(&CoulombFront::uniform(Vec3::new(0.3, 0.0, 0.0))?)?;
            let scale = match c.units {
                Some(UnitMode::Si) => Some(UnitScale::default()),
                _ => None,
            };
            let rows: Vec<GridRow> = data.rows.into_iter().map(|r| scale_row(r, 1.0, scale)).collect();
            let mut run = RunDir::create(out_dir(c)?, Manifest::new(&command, None, units_label(scale), json!({})))?;
            run.write(&format!("field.{}", c.format.extension()), &grid_bytes(&rows, c.format)?)?;
            run.write_json("shells.json", &data.shells)?;
            run.finish()?;
            Ok(EXIT_OK)
        }
        "paper-example" => {
            let report = json!({
                "si": paper_example(UnitMode::Si)?,
                "natural": paper_example(UnitMode::Natural)?,
            });
            writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
            if let Some(out) = &c.out {
                let mut run = RunDir::create(out, Manifest::new(&command, None, "si", json!({})))?;
                run.write_json("report.json", &report)?;
                run.finish()?;
            }
            Ok(EXIT_OK)
        }
        other => {
            let preset = TwoBodyPreset::from_name(other)
                .ok_or_else(|| Error::Config(format!("unknown scenario {other:?}")))?;
            let doc = preset.document();
            let mut bytes = doc.to_json()?.into_bytes();
            bytes.push(b'\n');
            let code = simulate(&doc, &bytes, c, &command)?;
            let dir = out_dir(c)?;
            std::fs::write(dir.join("config.json"), &bytes)?;
            Ok(code)
        }
    }
}
