use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use mrga_core::baseline::{run_baseline, BaselineConfig};
use mrga_core::blockstore::{
    generate_population_file, manifest_path_for, read_header, read_manifest, split_into_blocks, write_manifest,
    BlockManifest,
};
use mrga_core::engine::{run_job, JobConfig, Mode};
use mrga_core::experiment::{read_csv, run_sweep, summarize, write_csv, ExperimentRow, SweepSpec};
use mrga_core::ga::GaParams;
use mrga_core::objective::ObjectiveSpec;
use mrga_core::Error;

use crate::{BaselineArgs, GaArgs, GenpopArgs, ReportArgs, RunArgs, SweepArgs};

pub const EXIT_DATA: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

/// Maps engine errors onto the exit-code contract.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Degenerate(_)
        | Error::Contract(_)
        | Error::UnknownObjective { .. }
        | Error::Reduce(_) => EXIT_USAGE,
        Error::ResourceLimit { .. } => EXIT_RESOURCE,
        Error::MapTask { source, .. } => exit_code(source),
        Error::Format { .. } | Error::BlockOutOfRange { .. } | Error::Csv(_) | Error::Io(_) => EXIT_DATA,
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        Self {
            code: exit_code(&err),
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::data(err.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn parallelism(requested: Option<u64>) -> usize {
    requested
        .map(|p| p as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn ga_params(ga: &GaArgs, dimension: usize, bounds: (f64, f64), seed: u64) -> Result<GaParams, Error> {
    let params = GaParams {
        dimension,
        mutation_rate: ga.mutation_rate,
        crossover_rate: ga.crossover_rate,
        iterations: ga.iters as usize,
        elite_rate: ga.elite_rate,
        keep_fraction: ga.keep_fraction,
        lower_bound: bounds.0,
        upper_bound: bounds.1,
        master_seed: seed,
    };
    params.validate()?;
    Ok(params)
}

fn objective_spec(name: &str, dimension: usize, bounds: (f64, f64)) -> ObjectiveSpec {
    ObjectiveSpec {
        name: name.to_owned(),
        dimension,
        lower_bound: bounds.0,
        upper_bound: bounds.1,
    }
}

pub fn genpop(args: GenpopArgs) -> CliResult {
    let spec = objective_spec(&args.objective, args.dim as usize, args.bounds);
    mrga_core::objective::lookup_objective(&spec)?;
    let header = generate_population_file(&args.out, args.count, &spec, args.seed)?;
    let manifest = split_into_blocks(&header, args.block_size)?;
    let manifest_path = manifest_path_for(&args.out);
    write_manifest(&manifest_path, &manifest)?;

    println!("population file: {}", args.out.display());
    println!("chromosomes:     {}", header.chromosome_count);
    println!("dimension:       {}", header.dimension);
    println!("bounds:          [{}, {}]", header.lower_bound, header.upper_bound);
    println!("seed:            {}", header.generator_seed);
    println!("record size:     {} bytes", header.record_size());
    println!("file size:       {} bytes", header.file_len());
    println!("block size:      {} bytes", manifest.block_size_bytes);
    println!("blocks:          {}", manifest.len());
    println!("manifest:        {}", manifest_path.display());
    Ok(())
}

fn load_manifest(args: &RunArgs, header: &mrga_core::blockstore::PopulationFileHeader) -> Result<BlockManifest, Error> {
    if let Some(size) = args.block_size {
        return split_into_blocks(header, size);
    }
    let path = args.manifest.clone().unwrap_or_else(|| manifest_path_for(&args.input));
    if args.manifest.is_some() || path.exists() {
        read_manifest(path)
    } else {
        split_into_blocks(header, mrga_core::blockstore::DEFAULT_BLOCK_SIZE)
    }
}

pub fn run(args: RunArgs) -> CliResult {
    let header = read_header(&args.input).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", args.input.display(), err.message);
        err
    })?;
    let manifest = load_manifest(&args, &header)?;
    let bounds = (header.lower_bound, header.upper_bound);
    let dimension = header.dimension as usize;
    let ga = ga_params(&args.ga, dimension, bounds, args.seed)?;
    let reduce_ga = args.reduce_iters.map(|iters| GaParams {
        iterations: iters as usize,
        ..ga.clone()
    });
    let config = JobConfig {
        mode: args.mode,
        ga,
        reduce_ga,
        objective: header.objective_spec(&args.objective),
        population_path: args.input.clone(),
        manifest,
        parallelism: parallelism(args.parallelism),
    };
    let result = run_job(&config)?;

    println!("mode:          {}", result.mode);
    println!("mer:           {:e}", result.mer);
    println!("maps:          {}", result.map_count);
    println!("elites:        {}", result.emitted_count);
    println!("reduce gens:   {}", result.reduce_generations);
    println!("map phase:     {:.3} s", result.map_phase_time.as_secs_f64());
    println!("shuffle:       {:.3} s", result.shuffle_time.as_secs_f64());
    println!("reduce phase:  {:.3} s", result.reduce_phase_time.as_secs_f64());
    println!("total:         {:.3} s", result.total_wall_time.as_secs_f64());

    if let Some(csv_path) = &args.csv {
        let row = ExperimentRow::from_job(header.chromosome_count, header.payload_bytes(), args.seed, &result);
        append_row(csv_path, &row)?;
    }
    Ok(())
}

/// Appends one row, writing the header first if the file is new or empty.
fn append_row(path: &Path, row: &ExperimentRow) -> CliResult {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut buf = Vec::new();
    write_csv(&mut buf, std::slice::from_ref(row))?;
    let text = String::from_utf8(buf).expect("csv output is utf-8");
    let body = if fresh {
        text.as_str()
    } else {
        text.split_once('\n').map_or("", |(_, rest)| rest)
    };
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(body.as_bytes())?;
    Ok(())
}

fn write_rows(path: &Path, rows: &[ExperimentRow]) -> CliResult {
    let file = BufWriter::new(File::create(path)?);
    write_csv(file, rows)?;
    Ok(())
}

pub fn sweep(args: SweepArgs) -> CliResult {
    let dimension = args.dim as usize;
    let objective = objective_spec(&args.objective, dimension, args.bounds);
    mrga_core::objective::lookup_objective(&objective)?;
    let ga = ga_params(&args.ga, dimension, args.bounds, 0)?;
    let block_size_bytes = match args.block_capacity {
        Some(cap) => cap * mrga_core::blockstore::record_size(dimension),
        None => args.block_size,
    };
    let spec = SweepSpec {
        sizes: args.sizes,
        modes: args.modes,
        seeds: args.seeds,
        ga,
        objective,
        block_size_bytes,
        parallelism: parallelism(args.parallelism),
    };
    spec.validate()?;

    let tmp;
    let workdir = match &args.workdir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            dir.as_path()
        }
        None => {
            tmp = tempfile::tempdir()?;
            tmp.path()
        }
    };

    let total = spec.run_count();
    let mut done = 0usize;
    let outcome = run_sweep(&spec, workdir, |row| {
        done += 1;
        eprintln!(
            "[{done}/{total}] {} population={} seed={} blocks={} mer={:e} time={:.2}s",
            row.mode, row.population, row.seed, row.blocks, row.mer, row.wall_time_s
        );
    });
    let rows = match outcome {
        Ok(rows) => rows,
        Err((partial, err)) => {
            write_rows(&args.out, &partial)?;
            let mut cli_err = CliError::from(err);
            cli_err.message = format!(
                "{} ({} completed rows written to {})",
                cli_err.message,
                partial.len(),
                args.out.display()
            );
            return Err(cli_err);
        }
    };
    write_rows(&args.out, &rows)?;

    println!(
        "{:<6} {:>12} {:>5} {:>16} {:>12}",
        "mode", "population", "runs", "median_mer", "median_s"
    );
    for point in summarize(&rows) {
        println!(
            "{:<6} {:>12} {:>5} {:>16.6e} {:>12.3}",
            point.mode, point.population, point.runs, point.median_mer, point.median_time_s
        );
    }
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

pub fn baseline(args: BaselineArgs) -> CliResult {
    let dimension = args.dim as usize;
    let config = BaselineConfig {
        count: args.count as usize,
        params: ga_params(&args.ga, dimension, args.bounds, args.seed)?,
        objective: objective_spec(&args.objective, dimension, args.bounds),
        mem_limit_bytes: args.mem_limit,
    };
    match run_baseline(&config) {
        Ok(result) => {
            println!("chromosomes:     {}", args.count);
            println!("estimated bytes: {}", result.estimated_bytes);
            println!("generations:     {}", result.generations_run);
            println!("mer:             {:e}", result.mer);
            println!("wall time:       {:.3} s", result.wall_time.as_secs_f64());
            Ok(())
        }
        Err(Error::ResourceLimit {
            estimated_bytes,
            limit_bytes,
        }) => Err(CliError {
            code: EXIT_RESOURCE,
            message: format!(
                "resource limit exceeded: estimated {estimated_bytes} bytes for {} chromosomes of D={dimension}, \
                 limit {limit_bytes} bytes",
                args.count
            ),
        }),
        Err(e) => Err(e.into()),
    }
}

fn write_series(path: &Path, header: &str, points: &[(u64, f64)]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# population {header}")?;
    for (population, value) in points {
        writeln!(out, "{population} {value}")?;
    }
    out.flush()
}

pub fn report(args: ReportArgs) -> CliResult {
    let file = File::open(&args.csv).map_err(|e| CliError::data(format!("{}: {e}", args.csv.display())))?;
    let rows = read_csv(file).map_err(|e| CliError::data(format!("{}: {e}", args.csv.display())))?;
    if rows.is_empty() {
        return Err(CliError::data(format!("{}: no experiment rows", args.csv.display())));
    }
    fs::create_dir_all(&args.out_dir)?;
    let summary = summarize(&rows);
    let mut modes: Vec<Mode> = summary.iter().map(|p| p.mode).collect();
    modes.dedup();
    for mode in modes {
        let points: Vec<_> = summary.iter().filter(|p| p.mode == mode).collect();
        let mer: Vec<(u64, f64)> = points.iter().map(|p| (p.population, p.median_mer)).collect();
        let time: Vec<(u64, f64)> = points.iter().map(|p| (p.population, p.median_time_s)).collect();
        let mer_path = args.out_dir.join(format!("{mode}_mer.dat"));
        let time_path = args.out_dir.join(format!("{mode}_time.dat"));
        write_series(&mer_path, "median_mer", &mer)?;
        write_series(&time_path, "median_time_s", &time)?;
        println!("{}", mer_path.display());
        println!("{}", time_path.display());
    }
    Ok(())
}
