//! Command-line front end. Owns all file I/O.
//!
//! Exit codes: 0 on success, 2 when an input file cannot be read or parsed,
//! 3 for invalid flags or flag combinations.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::batch::parallel_available;
use crate::catalog::{load_catalog, GroupCatalog, DEFAULT_CATALOG};
use crate::energy::{best_over_poses_with_placement, EnergyConfig};
use crate::harness::{
    compare, enumerate_exact, ga_run, random_search, Algorithm, GaConfig, LigandObjective, RestrictedInstance,
};
use crate::pso::{self, PsoConfig, RunResult};
use crate::render::render_svg;
use crate::site::{parse_site, ActiveSite};
use crate::tree::{decode, to_structure_text, Genome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ligand-swarm", version, about = "Particle-swarm ligand design in a 2-D active site")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for a low-energy ligand and write its report, structure, genome and manifest.
    Design(DesignArgs),
    /// Print the energy report of a genome file.
    Evaluate(EvaluateArgs),
    /// Draw a genome's best placement as SVG.
    Render(RenderArgs),
    /// Compare PSO, GA and random search at a shared evaluation budget.
    Compare(CompareArgs),
    /// Exhaustively solve a restricted instance.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Active-site file.
    #[arg(long)]
    site: PathBuf,
    /// Group catalog file; the built-in catalog when omitted.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Use only the first N poses of the site.
    #[arg(long)]
    poses: Option<usize>,
    /// Relative permittivity for the electrostatic term.
    #[arg(long)]
    dielectric: Option<f64>,
    /// kcal/mol per residue inside the clash radius.
    #[arg(long)]
    clash_penalty: Option<f64>,
    /// kcal/mol per residue beyond the interaction window.
    #[arg(long)]
    far_penalty: Option<f64>,
    /// kcal/mol per Å of ligand beyond the pocket length.
    #[arg(long)]
    oversize_penalty: Option<f64>,
    /// Lower edge of the interaction window, Å.
    #[arg(long)]
    r_min: Option<f64>,
    /// Upper edge of the interaction window, Å.
    #[arg(long)]
    r_max: Option<f64>,
    /// Evaluate sequentially even when built with parallel support.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output directory.
    #[arg(long, default_value = "ligand-swarm-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Population (swarm or GA).
    #[arg(long, default_value_t = 50)]
    pop: usize,
    /// Generations after the initial population.
    #[arg(long, default_value_t = 100)]
    gens: usize,
    #[arg(long, default_value = "pso")]
    algo: Algorithm,
    /// PSO: stop after this many generations without improvement (0 = never).
    #[arg(long)]
    stall_gens: Option<usize>,
    /// PSO inertia weight.
    #[arg(long)]
    inertia: Option<f64>,
    /// PSO cognitive coefficient.
    #[arg(long)]
    c1: Option<f64>,
    /// PSO social coefficient.
    #[arg(long)]
    c2: Option<f64>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Genome file: one line of 15 `;`-separated reals.
    #[arg(long)]
    genome: PathBuf,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    genome: PathBuf,
    /// SVG output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_values_t = 1..=11u64)]
    seeds: Vec<u64>,
    /// Objective evaluations per run.
    #[arg(long, default_value_t = 5050)]
    budget: usize,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL)]
    algos: Vec<Algorithm>,
    /// Also write the table to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated catalog indices allowed in the ligand.
    #[arg(long, value_delimiter = ',', required = true)]
    subset: Vec<usize>,
    /// Number of leading genes that may vary; the rest are NULL.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Also write the result to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn input_error(path: &Path, e: impl Display) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    }
}

fn usage_error(e: impl Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| input_error(path, e))
}

fn digest(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Everything loaded from the shared input flags.
struct Inputs {
    site: ActiveSite,
    catalog: GroupCatalog,
    energy: EnergyConfig,
    parallel: bool,
    site_sha256: String,
    catalog_sha256: String,
    catalog_source: String,
}

impl Inputs {
    fn load(args: &InputArgs) -> Result<Inputs, Failure> {
        let site_text = read(&args.site)?;
        let mut site = parse_site(&site_text).map_err(|e| input_error(&args.site, e))?;
        let (catalog_text, catalog_source) = match &args.catalog {
            Some(path) => (read(path)?, path.display().to_string()),
            None => (DEFAULT_CATALOG.to_string(), "built-in".to_string()),
        };
        let catalog = load_catalog(&catalog_text).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{catalog_source}: {e}"),
        })?;
        if let Some(n) = args.poses {
            if n == 0 || n > site.poses.len() {
                return Err(usage_error(format!(
                    "--poses {n} is outside 1..={} for this site",
                    site.poses.len()
                )));
            }
            site = site.with_pose_limit(n);
        }
        let mut energy = EnergyConfig::for_catalog(&catalog);
        let overrides = [
            (args.dielectric, &mut energy.dielectric),
            (args.clash_penalty, &mut energy.clash_penalty),
            (args.far_penalty, &mut energy.far_penalty),
            (args.oversize_penalty, &mut energy.oversize_penalty),
            (args.r_min, &mut energy.r_min),
            (args.r_max, &mut energy.r_max),
        ];
        for (value, slot) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        energy.validate().map_err(usage_error)?;
        Ok(Inputs {
            site,
            catalog,
            energy,
            parallel: !args.sequential && parallel_available(),
            site_sha256: digest(&site_text),
            catalog_sha256: digest(&catalog_text),
            catalog_source,
        })
    }

    fn objective(&self) -> LigandObjective<'_> {
        LigandObjective::new(&self.site, &self.catalog, &self.energy)
    }

    fn manifest_entries(&self, args: &InputArgs, m: &mut BTreeMap<String, String>) {
        let e = &self.energy;
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("input.site", args.site.display().to_string());
        put("input.site.sha256", self.site_sha256.clone());
        put("input.catalog", self.catalog_source.clone());
        put("input.catalog.sha256", self.catalog_sha256.clone());
        put("site.name", self.site.name.clone());
        put("site.poses", self.site.poses.len().to_string());
        put("energy.coulomb_constant", e.coulomb_constant.to_string());
        put("energy.dielectric", e.dielectric.to_string());
        put("energy.r_min", e.r_min.to_string());
        put("energy.r_max", e.r_max.to_string());
        put("energy.clash_penalty", e.clash_penalty.to_string());
        put("energy.far_penalty", e.far_penalty.to_string());
        put("energy.oversize_penalty", e.oversize_penalty.to_string());
        put("energy.residue_vdw_a", e.residue_vdw_a.to_string());
        put("energy.residue_vdw_b", e.residue_vdw_b.to_string());
        put("parallel", self.parallel.to_string());
    }
}

fn load_genome(path: &Path) -> Result<Genome, Failure> {
    Genome::parse(&read(path)?).map_err(|e| input_error(path, e))
}

fn fitness_line(e_total: f64) -> String {
    match crate::energy::fitness(e_total) {
        Some(f) => format!("fitness={f}"),
        None => "fitness=undefined (e_total <= 0)".to_string(),
    }
}

fn design(args: &DesignArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if args.algo != Algorithm::Pso && (args.stall_gens.is_some() || args.inertia.is_some() || args.c1.is_some() || args.c2.is_some()) {
        return Err(usage_error(
            "--stall-gens, --inertia, --c1 and --c2 only apply to --algo pso",
        ));
    }
    let inputs = Inputs::load(&args.input)?;
    let objective = inputs.objective();
    let bounds = LigandObjective::bounds();

    let mut pso_config = PsoConfig {
        population: args.pop,
        max_generations: args.gens,
        seed: args.seed,
        parallel: inputs.parallel,
        ..PsoConfig::with_bounds(bounds.clone())
    };
    if let Some(s) = args.stall_gens {
        pso_config.stall_generations = s;
    }
    if let Some(w) = args.inertia {
        pso_config.inertia = w;
    }
    if let Some(c) = args.c1 {
        pso_config.c1 = c;
    }
    if let Some(c) = args.c2 {
        pso_config.c2 = c;
    }
    let ga_config = GaConfig {
        population: args.pop,
        generations: args.gens,
        seed: args.seed,
        parallel: inputs.parallel,
        ..GaConfig::default()
    };

    let result: RunResult = match args.algo {
        Algorithm::Pso => pso::run(&pso_config, &objective).map_err(usage_error)?,
        Algorithm::Ga => {
            let no_null: Vec<(f64, f64)> = bounds.iter().map(|&(lo, hi)| (lo, hi - 1.0)).collect();
            ga_run(&ga_config, &objective, &no_null).map_err(usage_error)?
        }
        Algorithm::Random => {
            if args.pop == 0 {
                return Err(usage_error("--pop must be positive"));
            }
            let budget = args.pop * (args.gens + 1);
            random_search(budget, &objective, &bounds, args.seed, inputs.parallel).map_err(usage_error)?
        }
    };

    let genome = Genome::new(&result.best_position).map_err(usage_error)?;
    let tree = decode(genome.values(), &inputs.catalog);
    let (report, _) = best_over_poses_with_placement(&tree, &inputs.site, &inputs.catalog, &inputs.energy);

    fs::create_dir_all(&args.out).map_err(|e| input_error(&args.out, e))?;
    let outputs = [
        ("report.txt", report.to_string()),
        ("structure.txt", to_structure_text(&tree, &inputs.catalog)),
        ("genome.txt", format!("{genome}\n")),
    ];
    for (name, contents) in &outputs {
        write(&args.out.join(name), contents)?;
    }

    let mut m = BTreeMap::new();
    inputs.manifest_entries(&args.input, &mut m);
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put("command", "design".into());
    put("tool.version", env!("CARGO_PKG_VERSION").into());
    put("algorithm", args.algo.to_string());
    put("seed", args.seed.to_string());
    put("population", args.pop.to_string());
    put("generations", args.gens.to_string());
    put("pso.inertia", pso_config.inertia.to_string());
    put("pso.c1", pso_config.c1.to_string());
    put("pso.c2", pso_config.c2.to_string());
    put("pso.v_max", pso_config.v_max[0].to_string());
    put("pso.stall_generations", pso_config.stall_generations.to_string());
    put("pso.stall_epsilon", pso_config.stall_epsilon.to_string());
    put("pso.rng", "ChaCha8Rng".into());
    put("ga.tournament_size", ga_config.tournament_size.to_string());
    put("ga.crossover_prob", ga_config.crossover_prob.to_string());
    put("ga.mutation_prob_per_gene", ga_config.mutation_prob_per_gene.to_string());
    put("ga.elitism", ga_config.elitism.to_string());
    put("result.e_total", report.e_total.to_string());
    put("result.generations_run", result.generations_run.to_string());
    put("result.evaluations", result.evaluations.to_string());
    put("outputs", "report.txt,structure.txt,genome.txt,manifest.txt".into());
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    put("timestamp", timestamp.to_string());
    let manifest: String = m.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    write(&args.out.join("manifest.txt"), &manifest)?;

    let _ = writeln!(stdout, "e_total={}", report.e_total);
    let _ = writeln!(stdout, "{}", fitness_line(report.e_total));
    let _ = writeln!(stdout, "genome={genome}");
    let _ = writeln!(stdout, "out={}", args.out.display());
    Ok(())
}

fn evaluate(args: &EvaluateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let inputs = Inputs::load(&args.input)?;
    let genome = load_genome(&args.genome)?;
    let report = inputs.objective().report(genome.values());
    let _ = write!(stdout, "{report}");
    Ok(())
}

fn render(args: &RenderArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let inputs = Inputs::load(&args.input)?;
    let genome = load_genome(&args.genome)?;
    let tree = decode(genome.values(), &inputs.catalog);
    let (_, placed) = best_over_poses_with_placement(&tree, &inputs.site, &inputs.catalog, &inputs.energy);
    let svg = render_svg(&inputs.site, &inputs.catalog, placed.as_ref());
    match &args.out {
        Some(path) => write(path, &svg),
        None => {
            let _ = stdout.write_all(svg.as_bytes());
            Ok(())
        }
    }
}

fn compare_cmd(args: &CompareArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let inputs = Inputs::load(&args.input)?;
    let table = compare(&inputs.objective(), &args.algos, &args.seeds, args.budget, inputs.parallel)
        .map_err(usage_error)?;
    let text = table.to_string();
    if let Some(path) = &args.out {
        write(path, &text)?;
    }
    let _ = write!(stdout, "{text}");
    Ok(())
}

fn oracle(args: &OracleArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let inputs = Inputs::load(&args.input)?;
    let instance = RestrictedInstance::new(inputs.objective(), args.subset.clone(), args.depth)
        .map_err(usage_error)?;
    let result = enumerate_exact(&instance, inputs.parallel);
    let tree = decode(result.genome.values(), &inputs.catalog);
    let mut text = format!("evaluations={}\ngenome={}\n", result.evaluations, result.genome);
    text.push_str(&to_structure_text(&tree, &inputs.catalog));
    text.push_str(&result.report.to_string());
    if let Some(path) = &args.out {
        write(path, &text)?;
    }
    let _ = write!(stdout, "{text}");
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Design(a) => design(a, stdout),
        Command::Evaluate(a) => evaluate(a, stdout),
        Command::Render(a) => render(a, stdout),
        Command::Compare(a) => compare_cmd(a, stdout),
        Command::Oracle(a) => oracle(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
