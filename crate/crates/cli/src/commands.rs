use crate::{Cli, Cmd, DeformCmd, ModelArgs};
use gausstopo::deform::{self, FieldPath};
use gausstopo::disentangle::is_disentanglable;
use gausstopo::gaussian_core::{fourier, ground_state_covariance, validate, DEFAULT_GAP_TOL};
use gausstopo::invariants::{self, InvariantName};
use gausstopo::io::{read_model, FieldFile, ModelFile, PathBundle};
use gausstopo::symmetry::{az_class, check_emergent, SymmetrySpec};
use gausstopo::tables;
use gausstopo::{models, AZClass, BZGrid, Error, MatrixField, RealSpaceCouplings, Role};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
    /// The command ran but its check did not pass.
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(Error::Config(_) | Error::Parse(_) | Error::Io(_)) => 2,
            CliError::Domain(_) | CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn staged(stage: &str) -> impl Fn(CliError) -> CliError + '_ {
    move |e| match e {
        CliError::Domain(inner) => CliError::Failed(format!("stage {stage}: {inner}")),
        CliError::Usage(m) => CliError::Usage(format!("stage {stage}: {m}")),
        CliError::Failed(m) => CliError::Failed(format!("stage {stage}: {m}")),
    }
}

fn emit(cli: &Cli, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
    match &cli.out {
        Some(p) => std::fs::write(p, text + "\n").map_err(Error::from)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(Error::from(e).into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| usage(e.to_string()))?;
    std::fs::write(path, text).map_err(Error::from)?;
    Ok(())
}

fn to_value(x: &impl serde::Serialize) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn parse_grid(spec: Option<&str>, dim: usize) -> Result<BZGrid> {
    let sizes: Vec<usize> = match spec {
        None => vec![if dim >= 3 { 12 } else { 32 }; dim],
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| usage(format!("bad grid size '{x}'"))))
            .collect::<Result<Vec<_>>>()?,
    };
    let sizes = if sizes.len() == 1 { vec![sizes[0]; dim] } else { sizes };
    if sizes.len() != dim {
        return Err(usage(format!("grid has {} sizes for a d = {dim} model", sizes.len())));
    }
    BZGrid::new(dim, &sizes).map_err(|e| usage(e.to_string()))
}

fn parse_spec(text: &str) -> Result<SymmetrySpec> {
    serde_json::from_str(text).map_err(|e| usage(format!("bad symmetry spec: {e}")))
}

fn parse_class(text: &str) -> Result<AZClass> {
    text.parse().map_err(|e: Error| usage(e.to_string()))
}

struct Loaded {
    file: ModelFile,
    grid: BZGrid,
    /// Hamiltonian field, for Hamiltonian models.
    hamiltonian: Option<MatrixField>,
    /// The state (ground state for Hamiltonians) or operation.
    field: MatrixField,
}

fn load(args: &ModelArgs) -> Result<Loaded> {
    let file = read_model(&args.model)?;
    let couplings = file.couplings()?;
    let grid = parse_grid(args.grid.as_deref(), file.dim)?;
    let raw = fourier(&couplings, &grid)?;
    let (hamiltonian, field) = if raw.role == Role::Hamiltonian {
        let state = ground_state_covariance(&raw, DEFAULT_GAP_TOL)?;
        (Some(raw), state)
    } else {
        (None, raw)
    };
    Ok(Loaded { file, grid, hamiltonian, field })
}

fn class_of(args: &ModelArgs, file: &ModelFile) -> Result<Option<AZClass>> {
    if let Some(c) = &args.class {
        return parse_class(c).map(Some);
    }
    let spec = match &args.spec {
        Some(s) => Some(parse_spec(s)?),
        None => file.symmetry,
    };
    Ok(match spec {
        Some(s) => Some(az_class(&s)?),
        None => None,
    })
}

fn require_class_arg(args: &ModelArgs, file: &ModelFile) -> Result<AZClass> {
    class_of(args, file)?
        .ok_or_else(|| usage("no symmetry class: pass --class or --spec, or add \"symmetry\" to the model file"))
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Validate(args) => validate_cmd(cli, args),
        Cmd::Classify { spec, model, grid } => classify_cmd(cli, spec.as_deref(), model.as_deref(), grid.as_deref()),
        Cmd::Invariant { name, model } => invariant_cmd(cli, name, model),
        Cmd::Deform { action } => deform_cmd(cli, action),
        Cmd::Disentangle { model, dim, emit_op } => disentangle_cmd(cli, model, *dim, emit_op.as_deref()),
        Cmd::Tables { class, dim, dump } => tables_cmd(cli, class.as_deref(), *dim, *dump),
        Cmd::Model { name, params, class } => model_cmd(cli, name, params.as_deref(), class.as_deref()),
        Cmd::Report(args) => report_cmd(cli, args),
    }
}

fn validate_cmd(cli: &Cli, args: &ModelArgs) -> Result<()> {
    let m = load(args)?;
    let field_report = validate(&m.field, cli.tol);
    let mut out = json!({ "grid": m.grid.sizes(), "field": to_value(&field_report) });
    let mut pass = field_report.pass;
    if let Some(h) = &m.hamiltonian {
        let hr = validate(h, cli.tol);
        pass &= hr.pass;
        out["hamiltonian"] = to_value(&hr);
    }
    out["pass"] = json!(pass);
    emit(cli, &out)?;
    eprintln!("{:?}: max violation {:.3e}, pass = {pass}", m.field.role, field_report.max_violation());
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed("validation failed".into()))
    }
}

fn classify_cmd(cli: &Cli, spec: Option<&str>, model: Option<&Path>, grid: Option<&str>) -> Result<()> {
    let file = model.map(read_model).transpose()?;
    let spec = match (spec, &file) {
        (Some(s), _) => parse_spec(s)?,
        (None, Some(f)) => f.symmetry.ok_or_else(|| usage("model file has no \"symmetry\"; pass --spec"))?,
        (None, None) => return Err(usage("pass --spec or --model")),
    };
    let class = az_class(&spec)?;
    let mut out = json!({ "class": class.to_string() });
    if let Some(path) = model {
        let args = ModelArgs { model: path.to_path_buf(), grid: grid.map(str::to_string), class: None, spec: None };
        let m = load(&args)?;
        if m.field.role == Role::FermionState {
            out["emergent"] = to_value(&check_emergent(&m.field, cli.tol.max(1e-8))?);
        }
    }
    emit(cli, &out)?;
    eprintln!("class {class}");
    Ok(())
}

fn invariant_cmd(cli: &Cli, name: &str, args: &ModelArgs) -> Result<()> {
    let which: InvariantName = name.parse().map_err(|e: Error| usage(e.to_string()))?;
    let m = load(args)?;
    let class = require_class_arg(args, &m.file)?;
    let r = invariants::evaluate(which, &m.field, class)?;
    emit(cli, &to_value(&r))?;
    eprintln!("{} = {} (raw {:.6}, gap {:.2e})", r.name, r.value, r.raw, r.quantization_gap);
    Ok(())
}

fn path_summary(path: &FieldPath, tol: f64) -> Value {
    let report = deform::validate_path(path, &[], tol);
    let worst = report.samples.iter().map(|s| s.constraint_violation).fold(0.0, f64::max);
    json!({
        "steps": path.steps(),
        "pass": report.pass,
        "failed": report.failed,
        "max_constraint_violation": worst,
        "max_step_distance": report.max_step_distance,
    })
}

fn interpolated_path(start: &Path, end: &Path, grid: Option<&str>, steps: usize) -> Result<FieldPath> {
    let a = read_model(start)?;
    let b = read_model(end)?;
    if a.role() != Role::Hamiltonian || b.role() != Role::Hamiltonian {
        return Err(usage("--model/--to interpolation takes two Hamiltonian models"));
    }
    if a.n != b.n || a.dim != b.dim {
        return Err(usage("start and end models differ in size or dimension"));
    }
    let g = parse_grid(grid, a.dim)?;
    let ha = fourier(&a.couplings()?, &g)?;
    let hb = fourier(&b.couplings()?, &g)?;
    Ok(FieldPath::sample(steps, |l| {
        let h = ha.map(Role::Hamiltonian, |i, x| x * gausstopo::linalg::c(1.0 - l, 0.0) + &hb.values[i] * gausstopo::linalg::c(l, 0.0))?;
        ground_state_covariance(&h, DEFAULT_GAP_TOL)
    })?)
}

fn deform_cmd(cli: &Cli, action: &DeformCmd) -> Result<()> {
    match action {
        DeformCmd::TrivializeBstate { model, steps, bundle } | DeformCmd::UnitarizeBop { model, steps, bundle } => {
            let m = load(model)?;
            let trivialize = matches!(action, DeformCmd::TrivializeBstate { .. });
            let path = if trivialize {
                deform::trivialize_boson_state(&m.field, *steps)?
            } else {
                deform::unitarize_boson_op_path(&m.field, *steps)?
            };
            let mut out = path_summary(&path, cli.tol);
            let end = path.end();
            if trivialize {
                let one = MatrixField::identity(&end.grid, end.n, Role::BosonState);
                out["endpoint_distance_from_identity"] = json!(end.max_diff(&one));
            } else {
                let unitarity = end
                    .values
                    .iter()
                    .map(|w| gausstopo::linalg::max_abs_diff(&(w * w.adjoint()), &gausstopo::linalg::eye(2 * end.n)))
                    .fold(0.0, f64::max);
                out["endpoint_unitarity_violation"] = json!(unitarity);
            }
            if let Some(p) = bundle {
                write_json(p, &PathBundle::from_path(&path))?;
            }
            let pass = out["pass"].as_bool().unwrap_or(false);
            emit(cli, &out)?;
            eprintln!("{} samples, all valid = {pass}", path.steps() + 1);
            Ok(())
        }
        DeformCmd::Connect { model, to, grid, bundle, steps, path_tol, emit_op } => {
            let path = match (bundle, model, to) {
                (Some(b), None, None) => {
                    let text = std::fs::read_to_string(b).map_err(Error::from)?;
                    let pb: PathBundle = serde_json::from_str(&text).map_err(|e| usage(format!("bad path bundle: {e}")))?;
                    pb.path()?
                }
                (None, Some(a), Some(b)) => interpolated_path(a, b, grid.as_deref(), *steps)?,
                _ => return Err(usage("pass either --bundle or both --model and --to")),
            };
            let conn = deform::connect_states(&path, *path_tol)?;
            let mut out = to_value(&conn);
            out["op_valid"] = json!(validate(&conn.op, cli.tol.max(1e-8)).pass);
            if let Some(p) = emit_op {
                write_json(p, &FieldFile::from_field(&conn.op))?;
            }
            emit(cli, &out)?;
            eprintln!("reconstruction residual {:.3e} after {} RK4 steps", conn.residual, conn.rk4_steps);
            Ok(())
        }
    }
}

fn disentangle_cmd(cli: &Cli, args: &ModelArgs, dim: Option<usize>, emit_op: Option<&Path>) -> Result<()> {
    let m = load(args)?;
    let class = require_class_arg(args, &m.file)?;
    let d = dim.unwrap_or(m.grid.dim());
    let decision = is_disentanglable(&m.field, class, d)?;
    if let (Some(p), Some(op)) = (emit_op, &decision.op) {
        write_json(p, &FieldFile::from_field(op))?;
    }
    emit(cli, &to_value(&decision))?;
    let verdict = match decision.verdict {
        Some(true) => "disentanglable",
        Some(false) => "not disentanglable",
        None => "undecided",
    };
    eprintln!("class {class}, d = {d}: {verdict}");
    Ok(())
}

fn tables_cmd(cli: &Cli, class: Option<&str>, dim: Option<usize>, dump: bool) -> Result<()> {
    if dump {
        return emit(cli, &tables::dump());
    }
    let class = parse_class(class.ok_or_else(|| usage("pass --class (and optionally --dim) or --dump"))?)?;
    let (s, o) = tables::classifying_spaces(class);
    let entry = |d: usize| to_value(&tables::homomorphism_info(class, d));
    let out = match dim {
        Some(d) => {
            let mut v = entry(d);
            v["spaces"] = json!([s.to_string(), o.to_string()]);
            v
        }
        None => json!({
            "class": class.to_string(),
            "spaces": [s.to_string(), o.to_string()],
            "entries": (0..8).map(entry).collect::<Vec<_>>(),
        }),
    };
    emit(cli, &out)?;
    eprintln!("class {class}: spaces {s}, {o}");
    Ok(())
}

fn parse_params(text: Option<&str>) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for pair in text.unwrap_or("").split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| usage(format!("parameter '{pair}' is not k=v")))?;
        let key = match k.trim() {
            "μ" => "mu",
            "Δ" => "delta",
            other => other,
        };
        let val = v.trim().parse::<f64>().map_err(|_| usage(format!("parameter '{key}' is not a number")))?;
        out.insert(key.to_string(), val);
    }
    Ok(out)
}

fn random_model(seed: u64, class: AZClass, params: &BTreeMap<String, f64>) -> Result<RealSpaceCouplings> {
    let known = ["dim", "n", "range", "strength"];
    if let Some(bad) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(usage(format!("random model has no parameter '{bad}'")));
    }
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    let spec = models::RandomSpec::new(
        get("n", class.layout_factor() as f64) as usize,
        get("dim", 1.0) as usize,
        get("range", 1.0) as i64,
        get("strength", 0.6),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(models::random_state(class, &spec, &mut rng)?)
}

fn model_cmd(cli: &Cli, name: &str, params: Option<&str>, class: Option<&str>) -> Result<()> {
    let params = parse_params(params)?;
    let (h, class) = if name == "random" {
        let class = parse_class(class.ok_or_else(|| usage("a random model needs --class"))?)?;
        (random_model(cli.seed, class, &params)?, Some(class))
    } else {
        if class.is_some() {
            return Err(usage("--class applies only to --name random"));
        }
        (models::by_name(name, &params)?, models::model_class(name))
    };
    let file = ModelFile::from_couplings(&h, class.map(|c| c.spec()));
    emit(cli, &to_value(&file))?;
    eprintln!("model {name}: n = {}, d = {}, {} terms", h.n, h.dim, h.terms.len());
    Ok(())
}

fn report_cmd(cli: &Cli, args: &ModelArgs) -> Result<()> {
    let m = load(args).map_err(staged("load"))?;
    let class = class_of(args, &m.file).map_err(staged("classify"))?;
    let validation = validate(&m.field, cli.tol);
    let mut out = json!({
        "model": args.model.display().to_string(),
        "grid": m.grid.sizes(),
        "role": to_value(&m.field.role),
        "validation": to_value(&validation),
        "class": class.map(|c| c.to_string()),
    });
    if !validation.pass {
        emit(cli, &out)?;
        return Err(CliError::Failed("stage validate: constraints violated".into()));
    }
    let d = m.grid.dim();
    if m.field.role == Role::FermionState {
        out["emergent"] = to_value(&check_emergent(&m.field, cli.tol.max(1e-8)).map_err(|e| staged("emergent")(e.into()))?);
    }
    let mut invs = serde_json::Map::new();
    if let Some(class) = class {
        for name in invariants::applicable(class, d, m.field.role) {
            let label = format!("invariants/{name:?}").to_lowercase();
            match invariants::evaluate(name, &m.field, class) {
                Ok(r) => {
                    invs.insert(r.name.clone(), to_value(&r));
                }
                Err(Error::Unsupported(msg)) => {
                    invs.insert(format!("{name:?}").to_lowercase(), json!({ "skipped": msg }));
                }
                Err(e) => return Err(staged(&label)(e.into())),
            }
        }
        if m.field.role == Role::FermionState {
            let decision = is_disentanglable(&m.field, class, d).map_err(|e| staged("disentangle")(e.into()))?;
            out["disentanglable"] = json!(decision.verdict);
            out["disentangle"] = to_value(&decision);
        }
    }
    out["invariants"] = Value::Object(invs);
    emit(cli, &out)?;
    let summary: Vec<String> = out["invariants"]
        .as_object()
        .map(|o| {
            o.iter()
                .filter_map(|(k, v)| v.get("value").map(|x| format!("{k} = {x}")))
                .collect()
        })
        .unwrap_or_default();
    eprintln!(
        "class {}: {}; disentanglable = {}",
        class.map_or("?".to_string(), |c| c.to_string()),
        summary.join(", "),
        out.get("disentanglable").unwrap_or(&Value::Null)
    );
    Ok(())
}
