//! Command-line surface over the measures library: batch subcommands that
//! read scenes, write CSV/SVG artifacts, and never mutate their inputs.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use parset::field::{CompiledReference, DistanceField, GridSpec, SolidMode};
use parset::geom::scene::ReferenceShape;
use parset::geom::{GermGrainScene, Window};
use parset::io::csv::{
    parse_measures_csv, parse_summary_csv, render_measures_csv, render_summary_csv,
    MEASURES_HEADER, SUMMARY_HEADER,
};
use parset::io::scene::{parse_scene, scene_dimension, write_scene};
use parset::io::svg::{render_plot, PlotSeries};
use parset::io::write_atomic;
use parset::measures::{
    MeasureContext, MeasurePair, MeasuresTable, NormalizationScan, RadiusGrid,
};
use parset::oracle::{analytic_table, TangentBallScene};
use parset::summary::{k_hat, l_hat, SummaryOptions};
use parset::synth::{generate, SynthKind, SynthSpec};

/// Cells along the shortest window side when `--grid-auto` picks the
/// spacing.
const AUTO_CELLS: f64 = 128.0;

#[derive(Parser, Debug)]
#[command(
    name = "parset",
    version,
    about = "Geometric relation measures between observed objects and dilated references"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Per-object measure curves against the union of all reference objects
    Measures(MeasuresArgs),
    /// Cross-K and L summary curves over a whole scene
    Summary(SummaryArgs),
    /// Generate a synthetic scene (written as scene.json plus mesh files)
    Synth(SynthArgs),
    /// Closed-form curves for the tangent ball-and-hyperplane configuration
    Oracle(OracleArgs),
    /// Render curve columns from CSV files as a static SVG
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Distance-field node spacing
    #[arg(long, conflicts_with = "grid_auto", required_unless_present = "grid_auto")]
    pub grid_spacing: Option<f64>,
    /// Pick the spacing automatically: shortest window side / 128
    #[arg(long)]
    pub grid_auto: bool,
}

impl GridArgs {
    fn resolve<const D: usize>(&self, window: &Window<D>) -> Result<f64> {
        let h = match self.grid_spacing {
            Some(h) => h,
            None => (0..D).map(|a| window.side(a)).fold(f64::INFINITY, f64::min) / AUTO_CELLS,
        };
        if !(h > 0.0 && h.is_finite()) {
            bail!("grid spacing must be positive, got {h}");
        }
        Ok(h)
    }
}

#[derive(Args, Debug)]
pub struct MeasuresArgs {
    /// Scene JSON file
    #[arg(long)]
    pub scene: PathBuf,
    /// Largest radius; the grid is uniform over (0, r-max]
    #[arg(long)]
    pub r_max: f64,
    /// Number of radius samples
    #[arg(long)]
    pub r_steps: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated measure pairs from {00,01,10,11}
    #[arg(long, default_value = "00,01,10,11")]
    pub pairs: String,
    /// Evaluate vertex distances exactly instead of through the grid
    #[arg(long)]
    pub exact_vertex_distance: bool,
    /// Output directory; one measures-<id>.csv per observed object
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SummaryArgs {
    /// Scene JSON file
    #[arg(long)]
    pub scene: PathBuf,
    /// Largest radius; must not exceed the extended-window allowance
    #[arg(long)]
    pub r_max: f64,
    /// Number of radius samples
    #[arg(long)]
    pub r_steps: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated measure pairs from {00,01,10,11}
    #[arg(long, default_value = "00,01,10,11")]
    pub pairs: String,
    /// Evaluate vertex distances exactly instead of through the grid
    #[arg(long)]
    pub exact_vertex_distance: bool,
    /// Output directory; khat-<pair>.csv and lhat-<pair>.csv per pair
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SynthKindArg {
    /// One ball tangent to (or offset from) a reference plane
    PlaneBall,
    /// One axis-aligned cube above a reference plane
    PlaneCube,
    /// Random reference and observed spheres in a cubic window
    SphereProcess,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKindArg,
    /// RNG seed; recorded in the scene file
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ball or sphere radius
    #[arg(long, default_value_t = 100.0)]
    pub radius: f64,
    /// Cube edge length (plane-cube)
    #[arg(long, default_value_t = 100.0)]
    pub cube_side: f64,
    /// Gap between the observed object and the plane (plane scenes)
    #[arg(long, default_value_t = 0.0)]
    pub offset: f64,
    /// Observation-window side length
    #[arg(long, default_value_t = 500.0)]
    pub window_side: f64,
    /// Extra margin of the extended window on every side
    #[arg(long, default_value_t = 150.0)]
    pub extension_margin: f64,
    /// Observed sphere count (sphere-process)
    #[arg(long, default_value_t = 40)]
    pub n_observed: usize,
    /// Reference sphere count (sphere-process)
    #[arg(long, default_value_t = 8)]
    pub n_reference: usize,
    /// Place observed spheres around random reference spheres
    #[arg(long)]
    pub clustered: bool,
    /// Isotropic displacement scale for clustered placement
    #[arg(long, default_value_t = 120.0)]
    pub cluster_scale: f64,
    /// Icosphere subdivision depth
    #[arg(long, default_value_t = 4)]
    pub subdivision: u32,
    /// Output directory for scene.json and mesh files
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Ambient dimension, 2 or 3
    #[arg(long)]
    pub dim: usize,
    /// Ball radius of the tangent configuration
    #[arg(long, default_value_t = 100.0)]
    pub radius: f64,
    /// Largest radius; the grid is uniform over (0, r-max]
    #[arg(long)]
    pub r_max: f64,
    /// Number of radius samples
    #[arg(long)]
    pub r_steps: usize,
    /// Output CSV file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Input CSV files (measures or summary schema)
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Comma-separated column names to draw from measures files
    /// (mu00..mu11, N0, N1, nu00..nu11); default is every present
    /// mu and nu column
    #[arg(long)]
    pub columns: Option<String>,
    /// Plot title
    #[arg(long)]
    pub title: Option<String>,
    /// Output SVG file
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Measures(args) => match scene_dimension(&args.scene)? {
            2 => run_measures::<2>(&args),
            3 => run_measures::<3>(&args),
            d => bail!("unsupported scene dimension {d}"),
        },
        Command::Summary(args) => match scene_dimension(&args.scene)? {
            2 => run_summary::<2>(&args),
            3 => run_summary::<3>(&args),
            d => bail!("unsupported scene dimension {d}"),
        },
        Command::Synth(args) => run_synth(&args),
        Command::Oracle(args) => run_oracle(&args),
        Command::Plot(args) => run_plot(&args),
    }
}

fn parse_pairs(text: &str) -> Result<Vec<MeasurePair>> {
    let mut pairs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let pair = MeasurePair::parse(part)
            .ok_or_else(|| anyhow!("unknown measure pair `{part}` (expected 00, 01, 10 or 11)"))?;
        if !pairs.contains(&pair) {
            pairs.push(pair);
        }
    }
    if pairs.is_empty() {
        bail!("no measure pairs selected");
    }
    Ok(pairs)
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "curve".to_string(), |s| s.to_string_lossy().into_owned())
}

/// Object ids become file-name fragments; anything risky maps to '-'.
fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '-' })
        .collect()
}

fn compile_references<const D: usize>(
    scene: &GermGrainScene<D>,
) -> Result<Vec<CompiledReference<D>>> {
    scene
        .reference()
        .iter()
        .map(|germ| {
            let placed = germ.placed();
            let mode = match &placed {
                ReferenceShape::Mesh(m) if !m.has_interior() => SolidMode::Surface,
                _ => SolidMode::Solid,
            };
            CompiledReference::compile(&placed, mode)
                .with_context(|| format!("reference object `{}`", germ.id))
        })
        .collect()
}

/// Smallest window holding the observation window and every observed
/// object, padded by one grid cell so boundary vertices interpolate.
fn field_domain<const D: usize>(scene: &GermGrainScene<D>, h: f64) -> Result<Window<D>> {
    let mut lo = scene.window().lower();
    let mut hi = scene.window().upper();
    for germ in scene.observed() {
        if let Some((l, u)) = germ.placed().bbox() {
            for a in 0..D {
                lo[a] = lo[a].min(l[a]);
                hi[a] = hi[a].max(u[a]);
            }
        }
    }
    for a in 0..D {
        lo[a] -= h;
        hi[a] += h;
    }
    Ok(Window::new(lo, hi)?)
}

fn run_measures<const D: usize>(args: &MeasuresArgs) -> Result<()> {
    let pairs = parse_pairs(&args.pairs)?;
    let scene: GermGrainScene<D> = parse_scene(&args.scene)?;
    if scene.observed().is_empty() {
        bail!("scene has no observed objects");
    }
    if scene.reference().is_empty() {
        bail!("scene has no reference objects");
    }
    let radii = RadiusGrid::uniform_exclusive(args.r_max, args.r_steps)?;
    let h = args.grid.resolve(scene.window())?;
    let references = compile_references(&scene)?;
    let domain = field_domain(&scene, h)?;
    let field = DistanceField::build_union(&references, GridSpec::covering(&domain, h)?);
    let scan = NormalizationScan::new(&field, scene.window())?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for germ in scene.observed() {
        let placed = germ.placed();
        let context = if args.exact_vertex_distance {
            MeasureContext::exact_union(&placed, &references)
        } else {
            MeasureContext::interpolated(&placed, &field)
                .with_context(|| format!("observed object `{}`", germ.id))?
        };
        let table = MeasuresTable::compute(&context, &scan, &radii, &pairs)
            .with_context(|| format!("observed object `{}`", germ.id))?;
        let path = args.out.join(format!("measures-{}.csv", sanitize_id(&germ.id)));
        write_atomic(&path, render_measures_csv(&table).as_bytes())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run_summary<const D: usize>(args: &SummaryArgs) -> Result<()> {
    let pairs = parse_pairs(&args.pairs)?;
    let scene: GermGrainScene<D> = parse_scene(&args.scene)?;
    let radii = RadiusGrid::uniform_exclusive(args.r_max, args.r_steps)?;
    let options = SummaryOptions {
        grid_spacing: args.grid.resolve(scene.window())?,
        exact_vertex_distance: args.exact_vertex_distance,
    };
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for pair in &pairs {
        let kh = k_hat(&scene, &radii, *pair, &options)?;
        let path = args.out.join(format!("khat-{}.csv", pair.label()));
        write_atomic(&path, render_summary_csv(&kh).as_bytes())?;
        eprintln!("wrote {}", path.display());
        let lh = l_hat(&scene, &radii, *pair, &options)?;
        let path = args.out.join(format!("lhat-{}.csv", pair.label()));
        write_atomic(&path, render_summary_csv(&lh).as_bytes())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run_synth(args: &SynthArgs) -> Result<()> {
    let mut spec = match args.kind {
        SynthKindArg::PlaneBall => SynthSpec::plane_ball(
            args.radius,
            args.offset,
            args.window_side,
            args.extension_margin,
            args.subdivision,
        ),
        SynthKindArg::PlaneCube => SynthSpec::plane_cube(
            args.cube_side,
            args.offset,
            args.window_side,
            args.extension_margin,
        ),
        SynthKindArg::SphereProcess => SynthSpec::sphere_process(
            args.radius,
            args.n_observed,
            args.n_reference,
            args.window_side,
            args.extension_margin,
            args.clustered,
            args.cluster_scale,
            args.subdivision,
            args.seed,
        ),
    };
    spec.seed = args.seed;
    debug_assert!(matches!(
        (args.kind, spec.kind),
        (SynthKindArg::PlaneBall, SynthKind::PlaneBall)
            | (SynthKindArg::PlaneCube, SynthKind::PlaneCube)
            | (SynthKindArg::SphereProcess, SynthKind::SphereProcess)
    ));
    let scene = generate(&spec)?;
    let path = write_scene(&scene, &args.out, Some(spec.seed))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Result<()> {
    let scene = TangentBallScene::new(args.dim, args.radius)?;
    let radii = RadiusGrid::uniform_exclusive(args.r_max, args.r_steps)?;
    let table = analytic_table(scene, &radii)?;
    write_atomic(&args.out, render_measures_csv(&table).as_bytes())?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

const MEASURE_COLUMNS: [&str; 10] =
    ["mu00", "mu01", "mu10", "mu11", "N0", "N1", "nu00", "nu01", "nu10", "nu11"];

fn measures_column(table: &MeasuresTable, name: &str) -> Result<Option<Vec<Option<f64>>>> {
    let dense = |v: &[f64]| Some(v.iter().map(|&x| x.is_finite().then_some(x)).collect());
    Ok(match name {
        "mu00" | "mu01" | "mu10" | "mu11" => {
            let idx = MeasurePair::parse(&name[2..]).unwrap().index();
            table.mu[idx].as_deref().and_then(dense)
        }
        "N0" => dense(&table.n[0]),
        "N1" => dense(&table.n[1]),
        "nu00" | "nu01" | "nu10" | "nu11" => {
            let idx = MeasurePair::parse(&name[2..]).unwrap().index();
            table.nu[idx].clone()
        }
        other => bail!("unknown column `{other}` (expected one of {})", MEASURE_COLUMNS.join(", ")),
    })
}

fn plot_series_from_file(path: &Path, columns: &Option<Vec<String>>) -> Result<Vec<PlotSeries>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let header = text.lines().next().map(str::trim_end).unwrap_or("");
    let stem = file_stem(path);
    if header == MEASURES_HEADER {
        let table = parse_measures_csv(path, &text)?;
        let names: Vec<String> = match columns {
            Some(list) => list.clone(),
            None => MEASURE_COLUMNS
                .iter()
                .filter(|n| !n.starts_with('N'))
                .filter(|n| measures_column(&table, n).map_or(false, |c| c.is_some()))
                .map(|n| n.to_string())
                .collect(),
        };
        let mut series = Vec::new();
        for name in &names {
            let Some(values) = measures_column(&table, name)? else {
                bail!("{}: column {name} has no values", path.display());
            };
            series.push(PlotSeries {
                label: format!("{stem}:{name}"),
                points: table.radii.iter().copied().zip(values).collect(),
            });
        }
        Ok(series)
    } else if header == SUMMARY_HEADER {
        let curve = parse_summary_csv(path, &text)?;
        Ok(vec![PlotSeries {
            label: format!("{stem}:{}{}", curve.kind.label(), curve.pair.label()),
            points: curve.radii.iter().copied().zip(curve.values).collect(),
        }])
    } else {
        bail!("{}: unrecognized CSV header", path.display());
    }
}

fn run_plot(args: &PlotArgs) -> Result<()> {
    let columns = args
        .columns
        .as_ref()
        .map(|text| -> Vec<String> {
            text.split(',').map(str::trim).filter(|c| !c.is_empty()).map(String::from).collect()
        })
        .filter(|list| !list.is_empty());
    let mut series = Vec::new();
    for input in &args.inputs {
        series.extend(plot_series_from_file(input, &columns)?);
    }
    if series.is_empty() {
        bail!("nothing to plot");
    }
    let title = args.title.clone().unwrap_or_else(|| file_stem(&args.out));
    let svg = render_plot(&title, "r", "value", &series);
    write_atomic(&args.out, svg.as_bytes())?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}
