//! Command-line front end. Every subcommand writes into `--out` (a
//! directory, created if missing).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use radrepro_core::repro::thickness_pair_wilcoxon;
use radrepro_core::table::FeatureTable;

use crate::cohort::write_cohort;
use crate::config::{load_synth_spec, parse_settings, GridConfig};
use crate::error::{AppError, Result};
use crate::manifest::CohortManifest;
use crate::pipeline::{
    ccc_spectrum, extract_manifest, run_survival_grid, thread_pool, univariate_cindex,
};
use crate::reports::{emit_reports, render_top, write_survival_outputs};
use crate::tables::{
    read_feature_table, read_outcomes, read_repro, select_reconstruction, write_exclusions,
    write_repro, write_rows, write_wilcoxon,
};

pub const FEATURES_FILE: &str = "features.csv";
pub const FAILURES_FILE: &str = "extraction_failures.csv";
pub const REPRO_FILE: &str = "repro.csv";
pub const EXCLUSIONS_FILE: &str = "exclusions.csv";
pub const WILCOXON_FILE: &str = "wilcoxon.csv";

/// Reconstructions extracted between appends to the feature CSV.
const EXTRACT_BATCH: usize = 16;

#[derive(Debug, Parser)]
#[command(
    name = "radrepro",
    version,
    about = "Radiomic feature reproducibility and survival modelling workbench"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed overriding the one in the spec or grid file
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic cohort (volumes, masks, manifest, outcomes)
    Synth {
        /// Cohort specification (TOML); defaults apply when omitted
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Override the number of subjects
        #[arg(long)]
        subjects: Option<usize>,
    },
    /// Extract features for every manifest row and extraction setting
    Extract {
        /// Cohort manifest CSV
        #[arg(long)]
        manifest: PathBuf,
        /// "all", a comma-separated list of setting names, or a TOML file
        #[arg(long, default_value = "all")]
        settings: String,
    },
    /// Pairwise and generalized CCCs with thickness-pair Wilcoxon tests
    Repro {
        /// Feature table CSV written by `extract`
        #[arg(long)]
        features: PathBuf,
    },
    /// Repeated cross-validation of Cox models over the parameter grid
    Survival {
        /// Feature table CSV written by `extract`
        #[arg(long)]
        features: PathBuf,
        /// Reproducibility CSV written by `repro`
        #[arg(long)]
        repro: PathBuf,
        /// Survival outcomes CSV
        #[arg(long)]
        outcomes: PathBuf,
        /// Grid file (TOML); the full default grid when omitted
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Reconstruction used for modelling, THICKNESS[:ASIR]
        #[arg(long)]
        reconstruction: Option<String>,
    },
    /// Clustered heatmaps, Pareto fronts and extractor comparisons
    Analyze {
        /// Reproducibility CSV written by `repro`
        #[arg(long)]
        repro: PathBuf,
        /// Feature table CSV written by `extract`
        #[arg(long)]
        features: PathBuf,
        /// Survival outcomes CSV
        #[arg(long)]
        outcomes: PathBuf,
        /// Reconstruction used for univariate C-indices, THICKNESS[:ASIR]
        #[arg(long)]
        reconstruction: Option<String>,
    },
}

/// Parses `THICKNESS[:ASIR]`.
pub fn parse_reconstruction(s: &str) -> Result<(f64, Option<f64>)> {
    let bad = || {
        AppError::Usage(format!(
            "invalid reconstruction '{s}', expected THICKNESS[:ASIR]"
        ))
    };
    let (t, a) = match s.split_once(':') {
        Some((t, a)) => (t, Some(a)),
        None => (s, None),
    };
    let t: f64 = t.trim().parse().map_err(|_| bad())?;
    let a = a
        .map(|a| a.trim().parse::<f64>())
        .transpose()
        .map_err(|_| bad())?;
    if !(t > 0.0 && t.is_finite()) || a.is_some_and(|a| !(0.0..=100.0).contains(&a)) {
        return Err(bad());
    }
    Ok((t, a))
}

/// Reduces a feature table to one reconstruction: the requested one, or the
/// only one present.
pub fn modelling_table(table: &FeatureTable, reconstruction: Option<&str>) -> Result<FeatureTable> {
    let selected = match reconstruction {
        Some(s) => {
            let (t, a) = parse_reconstruction(s)?;
            select_reconstruction(table, t, a)
        }
        None => table.clone(),
    };
    let mut cells: Vec<(u64, Option<u64>)> = selected
        .records
        .iter()
        .map(|r| {
            (
                r.slice_thickness_mm.to_bits(),
                r.asir_percent.map(f64::to_bits),
            )
        })
        .collect();
    cells.sort_unstable();
    cells.dedup();
    match cells.len() {
        0 => Err(AppError::Data("no feature rows at the requested reconstruction".into())),
        1 => Ok(selected),
        n => Err(AppError::Usage(format!(
            "feature table holds {n} reconstructions; choose one with --reconstruction THICKNESS[:ASIR]"
        ))),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

pub fn run(cli: Cli) -> Result<()> {
    let pool = thread_pool(cli.global.workers)?;
    pool.install(|| dispatch(&cli.global, cli.command))
}

fn dispatch(global: &GlobalArgs, command: Command) -> Result<()> {
    let out = &global.out;
    match command {
        Command::Synth { spec, subjects } => {
            let mut spec = match spec {
                Some(path) => load_synth_spec(&path)?,
                None => Default::default(),
            };
            if let Some(n) = subjects {
                spec.n_subjects = n;
            }
            if let Some(seed) = global.seed {
                spec.seed = seed;
            }
            spec.validate()?;
            let summary = write_cohort(&spec, out)?;
            println!(
                "{} subjects, {} reconstructions, {} manifest rows, {} events; manifest at {}",
                summary.subjects,
                summary.reconstructions,
                summary.manifest_rows,
                summary.events,
                summary.manifest.display()
            );
        }
        Command::Extract { manifest, settings } => {
            let configs = parse_settings(&settings)?;
            let manifest =
                CohortManifest::load(&manifest).map_err(|source| AppError::Manifest {
                    path: manifest.clone(),
                    source,
                })?;
            create_dir(out)?;
            let report =
                extract_manifest(&manifest, &configs, &out.join(FEATURES_FILE), EXTRACT_BATCH)?;
            write_rows(&out.join(FAILURES_FILE), report.failures.iter().cloned())?;
            println!(
                "{} feature rows computed, {} resumed, {} failed extractions",
                report.computed_rows,
                report.resumed_rows,
                report.failures.len()
            );
        }
        Command::Repro { features } => {
            let table = read_feature_table(&features)?;
            let spectrum = ccc_spectrum(&table);
            if spectrum.results.is_empty() {
                return Err(AppError::Data(
                    "no feature group covers the full reconstruction grid".into(),
                ));
            }
            create_dir(out)?;
            write_repro(&out.join(REPRO_FILE), &spectrum.results)?;
            write_exclusions(&out.join(EXCLUSIONS_FILE), &spectrum.excluded)?;
            write_wilcoxon(
                &out.join(WILCOXON_FILE),
                &thickness_pair_wilcoxon(&spectrum.results),
            )?;
            println!(
                "{} CCC rows, {} groups excluded",
                spectrum.results.len(),
                spectrum.excluded.len()
            );
        }
        Command::Survival {
            features,
            repro,
            outcomes,
            grid,
            reconstruction,
        } => {
            let mut grid = match grid {
                Some(path) => GridConfig::load(&path)?,
                None => GridConfig::default(),
            };
            if let Some(seed) = global.seed {
                grid.seed = seed;
            }
            let table =
                modelling_table(&read_feature_table(&features)?, reconstruction.as_deref())?;
            let repro = read_repro(&repro)?;
            let outcomes = read_outcomes(&outcomes)?;
            let runs = run_survival_grid(&table, &repro, &outcomes, &grid)?;
            let top = write_survival_outputs(out, &runs)?;
            print!("{}", render_top(&top));
        }
        Command::Analyze {
            repro,
            features,
            outcomes,
            reconstruction,
        } => {
            let repro = read_repro(&repro)?;
            let table =
                modelling_table(&read_feature_table(&features)?, reconstruction.as_deref())?;
            let outcomes = read_outcomes(&outcomes)?;
            let univariate = univariate_cindex(&table, &outcomes)?;
            let summary = emit_reports(out, &repro, &univariate)?;
            println!(
                "{} features clustered ({} dropped), {} of {} points on the Pareto front",
                summary.ccc_rows, summary.ccc_dropped, summary.front_size, summary.points
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruction_argument() {
        assert_eq!(parse_reconstruction("5").unwrap(), (5.0, None));
        assert_eq!(parse_reconstruction("2.5:40").unwrap(), (2.5, Some(40.0)));
        assert!(parse_reconstruction("0").is_err());
        assert!(parse_reconstruction("5:120").is_err());
        assert!(parse_reconstruction("x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
