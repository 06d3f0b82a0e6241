//! Command execution. Each command resolves its defaults in place, runs,
//! and returns the JSON summary printed on stdout.

use crate::args::*;
use crate::values::ComplexValue;
use geniter::analysis::{
    assess_stability, classify_attractor, diagonal_fixed_points, refine_orbit,
    verify_orbit_equations, AttractorKind, ClassifyConfig,
};
use geniter::raster::{
    basin_map, escape_raster, with_threads, Coord, EscapeMode, GridSpec, Region,
    DEFAULT_ESCAPE_RADIUS, DEFAULT_MAX_ITER,
};
use geniter::scan::{
    feigenbaum, locate_transition, period_table, probe_seeds, sharkovsky_chain,
    sharkovsky_compare,
};
use geniter::{
    iterate, make_family, Complex64, FamilyId, FamilyKind, MapSpec, Scalar, Scheme,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::cmp::Ordering;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// Invalid input: exit code 1.
    Usage(String),
    /// A numerical procedure failed on valid input: exit code 2.
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<geniter::Error> for CliError {
    fn from(e: geniter::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type Res<T> = std::result::Result<T, CliError>;

/// A finished command: the summary line plus the exit code to use.
pub struct Outcome {
    pub summary: Value,
    pub code: i32,
}

/// Reads a job file into `cmd`, keeping any value already set by a flag.
/// Keys that are not options of the command are rejected.
fn apply_job<T>(cmd: &mut T, job: Option<&Path>, name: &str) -> Res<()>
where
    T: Merge + Default + Serialize + DeserializeOwned,
{
    let Some(path) = job else { return Ok(()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read job file {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| usage(format!("job file {}: {e}", path.display())))?;
    let Value::Object(mut obj) = value else {
        return Err(usage("job file must hold a JSON object"));
    };
    if let Some(c) = obj.remove("command") {
        if c.as_str() != Some(name) {
            return Err(usage(format!("job file is for command {c}, not `{name}`")));
        }
    }
    let known = match serde_json::to_value(T::default()) {
        Ok(Value::Object(k)) => k,
        _ => Map::new(),
    };
    if let Some(bad) = obj.keys().find(|k| !known.contains_key(*k)) {
        return Err(usage(format!("unknown job key `{bad}` for `{name}`")));
    }
    let from_job: T = serde_json::from_value(Value::Object(obj))
        .map_err(|e| usage(format!("job file {}: {e}", path.display())))?;
    cmd.merge(&from_job);
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Res<()> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("summary values serialize")
}

// ---------------------------------------------------------------- maps

/// Parameter bindings in application order: `--param` entries, then the
/// `--a`, `--b`, `--c` shortcuts.
fn bindings(args: &MapArgs) -> Res<Vec<(String, ComplexValue)>> {
    let mut out = Vec::new();
    for p in args.param.iter().flatten() {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| usage(format!("--param `{p}` is not NAME=VALUE")))?;
        let v = value.parse().map_err(|e| usage(format!("--param {name}: {e}")))?;
        out.push((name.trim().to_string(), v));
    }
    if let Some(a) = args.a {
        out.push(("a".into(), ComplexValue(a, 0.0)));
    }
    if let Some(b) = args.b {
        out.push(("b".into(), ComplexValue(b, 0.0)));
    }
    if let Some(c) = args.c {
        out.push(("c".into(), c));
    }
    Ok(out)
}

/// Fills in the scheme and, when neither `--family` nor `--expr` is given,
/// `default_family`.
fn resolve_map(args: &mut MapArgs, default_family: Option<&str>) -> Res<()> {
    args.scheme.get_or_insert(Scheme::F);
    if args.family.is_none() && args.expr.is_none() {
        match default_family {
            Some(f) => args.family = Some(f.into()),
            None => return Err(usage("give --family or --expr")),
        }
    }
    if args.family.is_some() && args.expr.is_some() {
        return Err(usage("--family and --expr are exclusive"));
    }
    Ok(())
}

/// Whether the map needs complex scalars.
fn is_complex(args: &MapArgs) -> Res<bool> {
    if let Some(f) = &args.family {
        let kind: FamilyKind = f.parse()?;
        if kind.is_complex() {
            return Ok(true);
        }
    }
    let param_im = bindings(args)?.iter().any(|(_, v)| v.1 != 0.0);
    let seed_im = args.seeds.iter().flat_map(|s| &s.0).any(|v| v.1 != 0.0);
    Ok(param_im || seed_im)
}

fn scalar<S: Scalar>(v: ComplexValue, what: &str) -> Res<S> {
    S::from_parts(v.0, v.1).ok_or_else(|| usage(format!("{what} is complex but the map is real")))
}

fn build_map<S: Scalar>(args: &MapArgs) -> Res<MapSpec<S>> {
    let binds = bindings(args)?;
    if let Some(f) = &args.family {
        let mut id = FamilyId::named(f)?;
        for (name, v) in &binds {
            id = id.with_complex(name, v.0, v.1)?;
        }
        if let Some(n) = args.n {
            if n != id.kind.dims().0 {
                return Err(usage(format!("family {f} has n = {}", id.kind.dims().0)));
            }
        }
        return Ok(make_family::<S>(&id)?);
    }
    let sources = args.expr.as_deref().unwrap_or_default();
    let n = args.n.ok_or_else(|| usage("--expr maps need --n"))?;
    let mut params: Vec<(String, S)> = Vec::new();
    for (name, v) in &binds {
        let s = scalar::<S>(*v, name)?;
        match params.iter_mut().find(|(p, _)| p == name) {
            Some(slot) => slot.1 = s,
            None => params.push((name.clone(), s)),
        }
    }
    let refs: Vec<(&str, S)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    Ok(MapSpec::from_sources(n, sources, &refs)?)
}

fn seeds<S: Scalar>(args: &MapArgs) -> Res<Vec<S>> {
    let list = args.seeds.as_ref().ok_or_else(|| usage("--seeds is required"))?;
    list.0.iter().map(|&v| scalar::<S>(v, "a seed")).collect()
}

fn map_info<S: Scalar>(spec: &MapSpec<S>) -> Value {
    let params: Map<String, Value> = spec
        .parameter_names()
        .iter()
        .zip(spec.parameters())
        .map(|(k, v)| (k.clone(), to_json(&ComplexValue(v.re(), v.im()))))
        .collect();
    json!({
        "n": spec.n(),
        "m": spec.m(),
        "components": spec.sources(),
        "parameters": params,
        "scalar": if S::from_parts(0.0, 1.0).is_some() { "complex" } else { "real" },
    })
}

fn real_only(args: &MapArgs, what: &str) -> Res<()> {
    if is_complex(args)? {
        Err(usage(format!("{what} needs a real map")))
    } else {
        Ok(())
    }
}

fn pair(list: &Option<crate::values::NumList>, what: &str) -> Res<(f64, f64)> {
    list.as_ref()
        .ok_or_else(|| usage(format!("--{what} is required")))?
        .pair(what)
        .map_err(usage)
}

fn summary<T: Serialize>(name: &str, settings: &T, map: Option<Value>, result: Value) -> Value {
    let mut s = to_json(settings);
    if let (Value::Object(obj), Some(m)) = (&mut s, map) {
        obj.insert("map".into(), m);
    }
    json!({ "command": name, "settings": s, "result": result })
}

// ------------------------------------------------------------ commands

pub fn run(command: Command) -> Res<Outcome> {
    let name = command.name();
    match command {
        Command::Iterate(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || iterate_cmd(c))
        }
        Command::FixedPoints(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || fixed_points_cmd(c))
        }
        Command::Classify(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || classify_cmd(c))
        }
        Command::Scan(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || scan_cmd(c))
        }
        Command::Transition(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || transition_cmd(c))
        }
        Command::Feigenbaum(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || feigenbaum_cmd(c))
        }
        Command::Sharkovsky(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            sharkovsky_cmd(c)
        }
        Command::Basin(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || basin_cmd(c))
        }
        Command::Julia(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || escape_cmd(c, false))
        }
        Command::Mandelbrot(mut c) => {
            let job = c.run.job.clone();
            apply_job(&mut c, job.as_deref(), name)?;
            threaded(c.run.threads, move || escape_cmd(c, true))
        }
    }
}

fn threaded(threads: Option<usize>, f: impl FnOnce() -> Res<Outcome> + Send) -> Res<Outcome> {
    with_threads(threads, f)?
}

fn ok(summary: Value) -> Res<Outcome> {
    Ok(Outcome { summary, code: 0 })
}

fn iterate_cmd(mut c: IterateCmd) -> Res<Outcome> {
    resolve_map(&mut c.map, None)?;
    let count = *c.count.get_or_insert(100);
    if is_complex(&c.map)? {
        iterate_with::<Complex64>(c, count)
    } else {
        iterate_with::<f64>(c, count)
    }
}

fn iterate_with<S: Scalar + Serialize>(c: IterateCmd, count: usize) -> Res<Outcome> {
    let spec = build_map::<S>(&c.map)?;
    let rec = iterate(&spec, c.map.scheme.unwrap(), &seeds::<S>(&c.map)?, count)?;
    if let Some(out) = &c.out {
        write_file(out, rec.to_csv().as_bytes())?;
    }
    let result = json!({
        "produced": rec.values.len(),
        "truncated": rec.truncated,
        "values": rec.values,
    });
    ok(summary("iterate", &c, Some(map_info(&spec)), result))
}

fn fixed_points_cmd(mut c: FixedPointsCmd) -> Res<Outcome> {
    resolve_map(&mut c.map, None)?;
    real_only(&c.map, "fixed-points")?;
    c.interval.get_or_insert(crate::values::NumList(vec![0.0, 1.0]));
    let interval = pair(&c.interval, "interval")?;
    let grid = *c.grid.get_or_insert(10_000);
    let samples = *c.samples.get_or_insert(1000);
    let rng_seed = *c.rng_seed.get_or_insert(1);
    let base = ClassifyConfig {
        transient: 5_000,
        max_period: 64,
        budget: 100_000,
        ..ClassifyConfig::default()
    };
    let config = c.classify.resolve(base);
    let spec = build_map::<f64>(&c.map)?;
    let mut points = diagonal_fixed_points(&spec, interval, grid)?;
    if samples > 0 {
        assess_stability(&spec, c.map.scheme.unwrap(), &mut points, samples, &config, rng_seed)?;
    }
    let result = json!({ "fixed_points": points });
    if let Some(out) = &c.out {
        write_file(out, serde_json::to_string_pretty(&result).unwrap().as_bytes())?;
    }
    ok(summary("fixed-points", &c, Some(map_info(&spec)), result))
}

fn classify_cmd(mut c: ClassifyCmd) -> Res<Outcome> {
    resolve_map(&mut c.map, None)?;
    let config = c.classify.resolve(ClassifyConfig::default());
    let refine = *c.refine.get_or_insert(false);
    let scheme = c.map.scheme.unwrap();
    let complex = is_complex(&c.map)?;
    let (result, info) = if let Some(grid) = &c.seed_grid {
        real_only(&c.map, "--seed-grid")?;
        let spec = build_map::<f64>(&c.map)?;
        let divisions: Vec<usize> = grid.0.iter().map(|&k| k as usize).collect();
        let probe = probe_seeds(&spec, scheme, &divisions, c.target_period, &config)?;
        (to_json(&probe), map_info(&spec))
    } else if complex {
        if refine {
            return Err(usage("--refine needs a real map"));
        }
        let spec = build_map::<Complex64>(&c.map)?;
        let rep = classify_attractor(&spec, scheme, &seeds(&c.map)?, &config)?;
        (json!({ "report": rep }), map_info(&spec))
    } else {
        let spec = build_map::<f64>(&c.map)?;
        let rep = classify_attractor(&spec, scheme, &seeds(&c.map)?, &config)?;
        let mut result = json!({ "report": rep });
        let mut orbit: Vec<f64> = rep.values().to_vec();
        if refine && rep.kind() == AttractorKind::Periodic {
            let r = refine_orbit(&spec, scheme, &orbit)?;
            orbit = r.values.clone();
            result["refined"] = to_json(&r);
        }
        if c.map.family.as_deref() == Some("logistic2")
            && scheme == Scheme::F
            && rep.period() == Some(3)
        {
            let a = spec.param("a").unwrap_or_default();
            result["orbit_equations"] = to_json(&verify_orbit_equations(a, [orbit[0], orbit[1], orbit[2]]));
        }
        (result, map_info(&spec))
    };
    if let Some(out) = &c.out {
        write_file(out, serde_json::to_string_pretty(&result).unwrap().as_bytes())?;
    }
    ok(summary("classify", &c, Some(info), result))
}

fn sweep_name(slot: &mut Option<String>) -> &str {
    slot.get_or_insert_with(|| "a".into())
}

fn scan_cmd(mut c: ScanCmd) -> Res<Outcome> {
    resolve_map(&mut c.map, None)?;
    real_only(&c.map, "scan")?;
    let config = c.classify.resolve(ClassifyConfig::default());
    let param = sweep_name(&mut c.sweep).to_string();
    let range = pair(&c.range, "range")?;
    let steps = *c.steps.get_or_insert(200);
    let spec = build_map::<f64>(&c.map)?;
    let table = period_table(&spec, &param, c.map.scheme.unwrap(), &seeds(&c.map)?, range, steps, &config)?;
    if let Some(out) = &c.out {
        write_file(out, table.to_csv().as_bytes())?;
    }
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| json!({ "a": r.a, "kind": r.report.kind().name(), "period": r.report.period() }))
        .collect();
    let result = json!({
        "progression": table.period_progression(),
        "first_undecided": table.first_undecided(),
        "rows": rows,
    });
    ok(summary("scan", &c, Some(map_info(&spec)), result))
}

fn transition_cmd(mut c: TransitionCmd) -> Res<Outcome> {
    resolve_map(&mut c.map, None)?;
    real_only(&c.map, "transition")?;
    let config = c.classify.resolve(ClassifyConfig::default());
    let param = sweep_name(&mut c.sweep).to_string();
    let bracket = pair(&c.bracket, "bracket")?;
    let tol = *c.tol.get_or_insert(1e-7);
    let spec = build_map::<f64>(&c.map)?;
    let cv = locate_transition(&spec, &param, c.map.scheme.unwrap(), &seeds(&c.map)?, bracket, tol, &config)?;
    let result = to_json(&cv);
    if let Some(out) = &c.out {
        write_file(out, serde_json::to_string_pretty(&result).unwrap().as_bytes())?;
    }
    ok(summary("transition", &c, Some(map_info(&spec)), result))
}

fn feigenbaum_cmd(mut c: FeigenbaumCmd) -> Res<Outcome> {
    resolve_map(&mut c.map, None)?;
    real_only(&c.map, "feigenbaum")?;
    let config = c.classify.resolve(ClassifyConfig::default());
    let param = sweep_name(&mut c.sweep).to_string();
    let base = *c.base_period.get_or_insert(1);
    let doublings = *c.doublings.get_or_insert(4);
    let search = pair(&c.search, "search")?;
    let tol = *c.tol.get_or_insert(1e-8);
    let spec = build_map::<f64>(&c.map)?;
    let est = feigenbaum(
        &spec,
        &param,
        c.map.scheme.unwrap(),
        &seeds(&c.map)?,
        base,
        doublings,
        search,
        tol,
        &config,
    )?;
    let result = to_json(&est);
    if let Some(out) = &c.out {
        write_file(out, serde_json::to_string_pretty(&result).unwrap().as_bytes())?;
    }
    let code = if est.complete() { 0 } else { 2 };
    Ok(Outcome {
        summary: summary("feigenbaum", &c, Some(map_info(&spec)), result),
        code,
    })
}

fn sharkovsky_cmd(mut c: SharkovskyCmd) -> Res<Outcome> {
    let n = c.n.ok_or_else(|| usage("--n is required"))?;
    let result = match &c.compare {
        Some(list) => {
            let [p, q] = list.0[..] else {
                return Err(usage("--compare needs exactly two periods"));
            };
            let verdict = match sharkovsky_compare(p, q, n)? {
                Ordering::Less => format!("{p} precedes {q}"),
                Ordering::Greater => format!("{q} precedes {p}"),
                Ordering::Equal => format!("{p} equals {q}"),
            };
            json!({ "p": p, "q": q, "verdict": verdict })
        }
        None => {
            let limit = *c.limit.get_or_insert(100);
            json!({ "chain": sharkovsky_chain(n, limit)? })
        }
    };
    ok(summary("sharkovsky", &c, None, result))
}

fn resolve_grid(g: &mut GridArgs, region: [f64; 4], binding: Vec<Coord>) -> Res<GridSpec> {
    let width = *g.width.get_or_insert(512);
    let height = *g.height.get_or_insert(512);
    let r = g.region.get_or_insert(crate::values::NumList(region.to_vec()));
    let [x_min, x_max, y_min, y_max] = r.0[..] else {
        return Err(usage("--region needs x_min,x_max,y_min,y_max"));
    };
    let binding = g.binding.get_or_insert(crate::values::Binding(binding)).0.clone();
    Ok(GridSpec {
        width,
        height,
        region: Region { x_min, x_max, y_min, y_max },
        binding,
    })
}

fn basin_cmd(mut c: BasinCmd) -> Res<Outcome> {
    resolve_map(&mut c.map, None)?;
    real_only(&c.map, "basin")?;
    let config = c.classify.resolve(ClassifyConfig::raster());
    let grid = resolve_grid(
        &mut c.grid,
        [0.0, 1.0, 0.0, 1.0],
        vec![Coord::Horizontal, Coord::Vertical],
    )?;
    let spec = build_map::<f64>(&c.map)?;
    let raster = basin_map(&spec, c.map.scheme.unwrap(), &grid, &config)?;
    if let Some(p) = &c.grid.pgm {
        write_file(p, &raster.to_pgm())?;
    }
    if let Some(p) = &c.grid.csv {
        write_file(p, raster.to_csv().as_bytes())?;
    }
    let result = json!({ "roots": raster.roots, "histogram": raster.histogram() });
    ok(summary("basin", &c, Some(map_info(&spec)), result))
}

fn escape_cmd(mut c: EscapeCmd, mandelbrot: bool) -> Res<Outcome> {
    resolve_map(&mut c.map, Some("bilinear-c"))?;
    let radius = *c.escape_radius.get_or_insert(DEFAULT_ESCAPE_RADIUS);
    let max_iter = *c.max_iter.get_or_insert(DEFAULT_MAX_ITER);
    let mode = if mandelbrot {
        EscapeMode::Mandelbrot {
            param: c.plane_param.get_or_insert_with(|| "c".into()).clone(),
        }
    } else {
        EscapeMode::Julia
    };
    let n = match (&c.map.family, c.map.n) {
        (Some(f), _) => f.parse::<FamilyKind>()?.dims().0,
        (None, Some(n)) => n,
        (None, None) => return Err(usage("--expr maps need --n")),
    };
    let binding = if mandelbrot {
        vec![Coord::Fixed(0.0, 0.0); n]
    } else {
        vec![Coord::Plane; n]
    };
    let grid = resolve_grid(&mut c.grid, [-2.0, 2.0, -2.0, 2.0], binding)?;
    // The plane is complex even when every bound value is real.
    let spec = build_map::<Complex64>(&c.map)?;
    let raster = escape_raster(&spec, c.map.scheme.unwrap(), &mode, &grid, radius, max_iter)?;
    if let Some(p) = &c.grid.pgm {
        write_file(p, &raster.to_pgm())?;
    }
    if let Some(p) = &c.grid.csv {
        write_file(p, raster.to_csv().as_bytes())?;
    }
    let result = json!({
        "cells": raster.counts.len(),
        "bounded_cells": raster.bounded_cells(),
        "max_iter": raster.max_iter,
    });
    let name = if mandelbrot { "mandelbrot" } else { "julia" };
    ok(summary(name, &c, Some(map_info(&spec)), result))
}
