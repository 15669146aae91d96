use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use cpode::report::{
    format_convergence_table, format_summary_table, write_convergence_csv, write_states_csv,
    write_summary_csv, write_trajectory_csv,
};
use cpode::{
    build_grid, parse_config, preset, run_convergence_study, run_scenario, zero_stability_roots,
    EraPreset, Error, ManufacturedProblem, RunConfig, SignConvention,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: io::Error },
    Blowup(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Blowup(_) => 4,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Blowup(msg) => f.write_str(msg),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::Blowup(b) => CliError::Blowup(format!(
                "numerical blow-up at step {} (t = {})",
                b.step, b.t
            )),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn parse_range(range: &str) -> Result<Vec<u32>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "invalid exponent range {range:?} (expected e.g. 4..8)"
        ))
    };
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo < 1 || hi < lo {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

pub fn converge(problem: &str, range: &str, out: Option<&Path>) -> Result<(), CliError> {
    let problem = ManufacturedProblem::by_name(problem).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown problem {problem:?} (expected example1 or example2)"
        ))
    })?;
    let exponents = parse_range(range)?;
    let rows = run_convergence_study(&problem, &exponents)?;
    if let Some(path) = out {
        let file = create(path)?;
        write_convergence_csv(&rows, file).map_err(|e| CliError::io(path, e))?;
    }
    print!("{}", format_convergence_table(&rows));
    Ok(())
}

pub struct SimulateArgs {
    pub preset: Option<String>,
    pub config: Option<PathBuf>,
    pub sign: Option<String>,
    pub out: Option<PathBuf>,
    pub summary_out: Option<PathBuf>,
    pub every: usize,
}

fn load_scenario(args: &SimulateArgs) -> Result<(EraPreset, Option<SignConvention>), CliError> {
    match (&args.preset, &args.config) {
        (Some(label), None) => Ok((preset(label)?, None)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let cfg: RunConfig = parse_config(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Ok((cfg.to_preset("config"), cfg.sign))
        }
        _ => Err(CliError::Usage(
            "give exactly one of --preset or --config".into(),
        )),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    if args.every == 0 {
        return Err(CliError::Usage("--every must be at least 1".into()));
    }
    let (scenario, config_sign) = load_scenario(args)?;
    let sign = match &args.sign {
        Some(s) => s.parse::<SignConvention>()?,
        None => config_sign.unwrap_or_default(),
    };
    if let Some(m) = scenario.params.alpha_mismatch() {
        eprintln!("warning: {}: {m}", scenario.label);
    }

    let run = match run_scenario(&scenario, sign) {
        Ok(run) => run,
        Err(Error::Blowup(b)) => {
            eprintln!(
                "warning: blow-up at step {} (t = {}); last finite state {:?}",
                b.step,
                b.t,
                b.last_state().as_slice()
            );
            if let Some(path) = &args.out {
                let grid = build_grid(scenario.t0, scenario.t_end, scenario.k)?;
                let file = create(path)?;
                write_states_csv(&grid, &b.partial, args.every, file)
                    .map_err(|e| CliError::io(path, e))?;
            }
            return Err(Error::Blowup(b).into());
        }
        Err(other) => return Err(other.into()),
    };

    if run.negativity() {
        eprintln!(
            "warning: {}: trajectory has negative compartment values",
            scenario.label
        );
    }
    if let Some(path) = &args.out {
        let file = create(path)?;
        write_trajectory_csv(&run.trajectory, args.every, file)
            .map_err(|e| CliError::io(path, e))?;
    }
    if let Some(path) = &args.summary_out {
        let file = create(path)?;
        write_summary_csv(&run.summary, &scenario.era_boundaries, file)
            .map_err(|e| CliError::io(path, e))?;
    }
    println!("{} ({} sign)", scenario.label, sign.as_str());
    print!(
        "{}",
        format_summary_table(
            &run.summary,
            &scenario.era_boundaries,
            scenario.published.as_ref()
        )
    );
    Ok(())
}

pub fn roots() -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    for z in zero_stability_roots() {
        writeln!(w, "{:?},{:?},{:?}", z.re, z.im, z.norm())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    }
    Ok(())
}
