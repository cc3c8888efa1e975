//! Command-line front end: shape generation, mesh analysis, spheroid sweeps,
//! limit extrapolation, inequality verification, and Willmore minimization.
//!
//! Exit codes: 0 on success, 1 on input/validation/convergence failure,
//! 2 on argument errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use isowill::functionals::compute_report;
use isowill::mesh::{
    bumpy_sphere, icosphere, load_mesh, save_mesh, spheroid_mesh, write_text_atomic, MeshError,
    MeshFormat, TriangleMesh,
};
use isowill::optimize::{minimize, DescentConfig, DescentTrace};
use isowill::spheroid::{
    continuous_ratio_at_unit, deficit_ratio_limit, literature_limit_constant, spheroid_eval,
    spheroid_willmore, spheroid_willmore_quadrature, SpheroidError,
};
use isowill::verify::{run_verify_sweep, VerifyConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "isowill",
    version,
    about = "Willmore and isoperimetric deficit laboratory for genus-0 triangle meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh and write it to a file.
    Gen(GenArgs),
    /// Load a mesh and print its functional report.
    Analyze(AnalyzeArgs),
    /// Evaluate the spheroid closed forms over a grid of aspect ratios.
    Sweep(SweepArgs),
    /// Extrapolate the r -> 1 limit of the deficit ratio.
    Limit(LimitArgs),
    /// Sample generated meshes and estimate the deficit-comparison constant.
    Verify(VerifyArgs),
    /// Run Willmore descent on a mesh file.
    Minimize(MinimizeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Icosphere,
    Spheroid,
    Bumpy,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Off,
    Obj,
}

impl From<FormatArg> for MeshFormat {
    fn from(f: FormatArg) -> MeshFormat {
        match f {
            FormatArg::Off => MeshFormat::Off,
            FormatArg::Obj => MeshFormat::Obj,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Which generator to run.
    #[arg(long, value_enum)]
    shape: ShapeArg,
    /// Icosphere subdivision level (also the bumpy-sphere base level).
    #[arg(long, default_value_t = 4)]
    level: u32,
    /// Spheroid aspect ratio (semi-axes 1, 1, r).
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// Longitude count of the revolution grid.
    #[arg(long, default_value_t = 128)]
    nu: u32,
    /// Latitude count of the revolution grid.
    #[arg(long, default_value_t = 128)]
    nv: u32,
    /// Maximum spherical-harmonic degree of the bumpy perturbation.
    #[arg(long, default_value_t = 4)]
    lmax: u32,
    /// Bumpy perturbation amplitude.
    #[arg(long, default_value_t = 0.1)]
    amp: f64,
    /// Bumpy perturbation seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// File format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Mesh file to analyze.
    path: PathBuf,
    /// Emit a single JSON document instead of human-readable lines.
    #[arg(long)]
    json: bool,
    /// File format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SweepArgs {
    /// Smallest aspect ratio; must exceed 1.
    #[arg(long)]
    r_min: f64,
    /// Largest aspect ratio; must exceed r-min.
    #[arg(long)]
    r_max: f64,
    /// Number of grid points (endpoints included).
    #[arg(long)]
    steps: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LimitArgs {
    /// Deepest evaluation point r = 1 + 2^(-kmax); 8 to 40.
    #[arg(long, default_value_t = 20)]
    kmax: u32,
    /// Emit a single JSON document instead of human-readable lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of meshes to generate.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Isoperimetric-deficit cap; samples above it are discarded.
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    /// Sweep seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5)]
    lmax_min: u32,
    #[arg(long, default_value_t = 8)]
    lmax_max: u32,
    #[arg(long, default_value_t = 0.15)]
    amp_min: f64,
    #[arg(long, default_value_t = 0.25)]
    amp_max: f64,
    #[arg(long, default_value_t = 4)]
    level_min: u32,
    #[arg(long, default_value_t = 4)]
    level_max: u32,
    #[arg(long, default_value_t = 1.1)]
    spheroid_r_min: f64,
    #[arg(long, default_value_t = 2.0)]
    spheroid_r_max: f64,
    /// Revolution grid size for spheroid samples.
    #[arg(long, default_value_t = 192)]
    spheroid_grid: u32,
}

#[derive(Args)]
struct MinimizeArgs {
    /// Mesh file to start from.
    path: PathBuf,
    /// Trace CSV output path.
    #[arg(long)]
    out_trace: PathBuf,
    /// Final mesh output path.
    #[arg(long)]
    out_mesh: PathBuf,
    #[arg(long, default_value_t = 300)]
    max_steps: usize,
    #[arg(long, default_value_t = 0.1)]
    initial_step: f64,
    #[arg(long, default_value_t = 1e-4)]
    armijo_c: f64,
    #[arg(long, default_value_t = 0.5)]
    backtrack: f64,
    #[arg(long, default_value_t = 1e-6)]
    grad_tol: f64,
    /// Target isoperimetric ratio; enables the quadratic penalty.
    #[arg(long)]
    sigma_target: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    penalty_weight: f64,
    #[arg(long, default_value_t = 1e-6)]
    fd_eps: f64,
    /// File format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Limit(args) => cmd_limit(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Minimize(args) => cmd_minimize(args),
    };
    ExitCode::from(code)
}

fn resolve_format(path: &Path, flag: Option<FormatArg>) -> Result<MeshFormat, u8> {
    if let Some(f) = flag {
        return Ok(f.into());
    }
    MeshFormat::from_path(path).ok_or_else(|| {
        eprintln!(
            "error: cannot infer format from {:?}; pass --format off|obj",
            path.display()
        );
        EXIT_USAGE
    })
}

/// Generator parameter errors are usage errors; a perturbation that breaks
/// the mesh is a validation failure.
fn mesh_error_exit(e: &MeshError) -> u8 {
    match e {
        MeshError::LevelTooLarge { .. }
        | MeshError::GridTooCoarse { .. }
        | MeshError::InvalidParameter { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn cmd_gen(args: GenArgs) -> u8 {
    let format = match resolve_format(&args.out, args.format) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let generated = match args.shape {
        ShapeArg::Icosphere => icosphere(args.level),
        ShapeArg::Spheroid => spheroid_mesh(args.r, args.nu, args.nv),
        ShapeArg::Bumpy => bumpy_sphere(args.lmax, args.amp, args.seed, args.level),
    };
    let mesh = match generated {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return mesh_error_exit(&e);
        }
    };
    if let Err(e) = save_mesh(&mesh, &args.out, format) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    println!("vertices: {}", mesh.vertex_count());
    println!("faces: {}", mesh.face_count());
    0
}

fn load_input(path: &Path, flag: Option<FormatArg>) -> Result<TriangleMesh, u8> {
    let format = resolve_format(path, flag)?;
    load_mesh(path, format).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_FAILURE
    })
}

fn cmd_analyze(args: AnalyzeArgs) -> u8 {
    let mesh = match load_input(&args.path, args.format) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let report = compute_report(&mesh);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("vertices:                     {}", report.mesh_vertices);
        println!("faces:                        {}", report.mesh_faces);
        println!("euler_characteristic:         {}", report.euler_characteristic);
        println!("area:                         {:.12}", report.area);
        println!("volume:                       {:.12}", report.volume);
        println!("willmore:                     {:.12}", report.willmore);
        println!("isoperimetric_ratio:          {:.12}", report.isoperimetric_ratio);
        println!("willmore_deficit:             {:.12}", report.willmore_deficit);
        println!("isoperimetric_deficit:        {:.12}", report.isoperimetric_deficit);
        println!("tracefree_energy:             {:.12}", report.tracefree_energy);
        println!("gauss_bonnet_residual:        {:.3e}", report.gauss_bonnet_residual);
        println!("tangential_identity_residual: {:.3e}", report.tangential_identity_residual);
    }
    0
}

fn cmd_sweep(args: SweepArgs) -> u8 {
    if !(args.r_min > 1.0 && args.r_max > args.r_min) || args.steps == 0 {
        eprintln!(
            "error: need 1 < r-min < r-max and steps >= 1, got r-min {}, r-max {}, steps {}",
            args.r_min, args.r_max, args.steps
        );
        return EXIT_USAGE;
    }
    let mut csv = String::from(
        "r,willmore,area,volume,isoperimetric_ratio,willmore_deficit,isoperimetric_deficit,deficit_ratio,quadrature_check_abs_err\n",
    );
    for i in 0..args.steps {
        let r = if args.steps == 1 {
            args.r_min
        } else {
            args.r_min + (args.r_max - args.r_min) * i as f64 / (args.steps - 1) as f64
        };
        let eval = match spheroid_eval(r) {
            Ok(e) => e,
            Err(e) => {
                eprintln!("error at r = {r}: {e}");
                return EXIT_FAILURE;
            }
        };
        let quad = match spheroid_willmore_quadrature(r, 1e-10) {
            Ok(q) => q,
            Err(e) => {
                eprintln!("error at r = {r}: {e}");
                return EXIT_FAILURE;
            }
        };
        let check = (spheroid_willmore(r).expect("r > 1") - quad).abs();
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            eval.r,
            eval.willmore,
            eval.area,
            eval.volume,
            eval.isoperimetric_ratio,
            eval.willmore_deficit,
            eval.isoperimetric_deficit,
            eval.deficit_ratio,
            check
        ));
    }
    if let Err(e) = write_text_atomic(&args.out, &csv) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    println!("wrote {} rows to {}", args.steps, args.out.display());
    0
}

fn cmd_limit(args: LimitArgs) -> u8 {
    let result = match deficit_ratio_limit(args.kmax) {
        Ok(r) => r,
        Err(e @ SpheroidError::Domain { .. }) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let literature = literature_limit_constant();
    let continuous = continuous_ratio_at_unit();
    if args.json {
        let table: Vec<serde_json::Value> = result
            .table
            .iter()
            .map(|&(r, ratio)| serde_json::json!({ "r": r, "ratio": ratio }))
            .collect();
        let doc = serde_json::json!({
            "extrapolated_limit": result.limit,
            "literature_constant": literature,
            "continuous_ratio_at_one": continuous,
            "table": table,
            "extrapolants": result.extrapolants,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("doc serializes"));
    } else {
        println!("deficit ratio (W - 4pi) / (I - I(S^2)) toward r = 1:");
        for &(r, ratio) in &result.table {
            println!("  r = {r:.12}  ratio = {ratio:.12}");
        }
        println!("extrapolated_limit:      {:.12}", result.limit);
        println!("literature_constant:     {:.12}   (6 (16 pi / 3)^(2/3))", literature);
        println!("continuous_ratio_at_one: {:.12}   (4 pi / (6 sqrt(pi))^(2/3))", continuous);
        println!(
            "note: the extrapolated deficit-ratio limit, the literature constant, and the \
             continuous W/I value disagree; all three are reported side by side."
        );
    }
    0
}

fn cmd_verify(args: VerifyArgs) -> u8 {
    if args.c0.is_nan() || args.c0 <= 0.0 {
        eprintln!("error: c0 must be positive, got {}", args.c0);
        return EXIT_USAGE;
    }
    if args.samples == 0 {
        eprintln!("error: samples must be at least 1");
        return EXIT_USAGE;
    }
    if args.lmax_min > args.lmax_max
        || args.amp_min > args.amp_max
        || args.level_min > args.level_max
        || args.spheroid_r_min > args.spheroid_r_max
        || args.spheroid_r_min <= 1.0
    {
        eprintln!("error: empty or invalid generator range");
        return EXIT_USAGE;
    }
    let config = VerifyConfig {
        samples: args.samples,
        c0: args.c0,
        seed: args.seed,
        lmax_range: (args.lmax_min, args.lmax_max),
        amp_range: (args.amp_min, args.amp_max),
        level_range: (args.level_min, args.level_max),
        spheroid_r_range: (args.spheroid_r_min, args.spheroid_r_max),
        spheroid_grid: args.spheroid_grid,
    };
    let outcome = run_verify_sweep(&config);
    if outcome.rows.is_empty() {
        eprintln!("error: all {} samples were discarded by the c0 = {} cap", args.samples, args.c0);
        return EXIT_FAILURE;
    }
    let mut csv = String::from(
        "index,kind,lmax,amp,level,r,isoperimetric_deficit,willmore_deficit,ratio,volume_deficit\n",
    );
    for row in &outcome.rows {
        csv.push_str(&format!(
            "{},{},{},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            row.index,
            row.kind,
            row.lmax,
            row.amp,
            row.level,
            row.r,
            row.isoperimetric_deficit,
            row.willmore_deficit,
            row.ratio,
            row.volume_deficit
        ));
    }
    if let Err(e) = write_text_atomic(&args.out, &csv) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    println!("C_emp = {:.12}", outcome.c_emp);
    println!("retained = {} of {} samples", outcome.rows.len(), args.samples);
    0
}

fn trace_csv(trace: &DescentTrace) -> String {
    let mut csv = String::from("step,objective,willmore,isoperimetric_ratio,step_size,grad_maxnorm\n");
    for rec in &trace.records {
        csv.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            rec.step, rec.objective, rec.willmore, rec.isoperimetric_ratio, rec.step_size,
            rec.grad_maxnorm
        ));
    }
    csv
}

fn cmd_minimize(args: MinimizeArgs) -> u8 {
    let mesh = match load_input(&args.path, args.format) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let config = DescentConfig {
        max_steps: args.max_steps,
        initial_step: args.initial_step,
        armijo_c: args.armijo_c,
        backtrack_factor: args.backtrack,
        grad_tol: args.grad_tol,
        sigma_target: args.sigma_target,
        penalty_weight: args.penalty_weight,
        fd_epsilon: args.fd_eps,
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let (final_mesh, trace) = match minimize(&mesh, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    if let Err(e) = write_text_atomic(&args.out_trace, &trace_csv(&trace)) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    let mesh_format = match resolve_format(&args.out_mesh, args.format) {
        Ok(f) => f,
        Err(code) => return code,
    };
    if let Err(e) = save_mesh(&final_mesh, &args.out_mesh, mesh_format) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    let last = trace.records.last().expect("trace has a start row");
    println!("termination: {}", trace.reason);
    println!("steps: {}", trace.records.len() - 1);
    println!("willmore: {:.12}", last.willmore);
    println!("isoperimetric_ratio: {:.12}", last.isoperimetric_ratio);
    0
}
