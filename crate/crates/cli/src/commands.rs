use std::io::Write;
use std::path::Path;

use serde::Serialize;

use svcsplit::agent::{train_with, training_log_tsv, Checkpoint, EpisodeLog, TrainConfig};
use svcsplit::env::{EnvConfig, Objective};
use svcsplit::graph::{analyze as analyze_log, CallGraph};
use svcsplit::metrics::{evaluate as evaluate_metrics, Decomposition, MetricsReport, TABLE_HEADER};
use svcsplit::oracle::{exhaustive_best, hill_climb, OracleResult};
use svcsplit::trace::{parse_log_bytes, CapabilityMap, TraceLog};

use crate::error::CliError;
use crate::files::{read_bytes, read_text, write_atomic, DecompositionFile};
use crate::{AnalyzeArgs, DecomposeArgs, EvaluateArgs, OracleArgs, OracleMode};

pub const DECOMPOSITION_FILE: &str = "decomposition.json";
pub const METRICS_JSON: &str = "metrics.json";
pub const METRICS_TSV: &str = "metrics.tsv";
pub const TRAINING_LOG: &str = "training_log.tsv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const ORACLE_FILE: &str = "oracle.json";

fn internal(e: std::io::Error) -> CliError {
    CliError::Internal(e.into())
}

pub fn load_graph(path: &Path) -> Result<CallGraph, CliError> {
    CallGraph::from_json(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_capability_map(path: &Path) -> Result<CapabilityMap, CliError> {
    let text = read_text(path)?;
    CapabilityMap::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let map = args.capability_map.as_deref().map(load_capability_map).transpose()?;
    let mut combined = TraceLog::default();
    for path in &args.input {
        let log = parse_log_bytes(&read_bytes(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        // Reconstruct per file first so failures name the file they come from.
        analyze_log(&log, map.as_ref()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        log::info!("{}: {} blocks, {} records", path.display(), log.blocks.len(), log.record_count());
        combined.blocks.extend(log.blocks);
    }
    let analysis = analyze_log(&combined, map.as_ref()).map_err(|e| CliError::Input(e.to_string()))?;
    let g = &analysis.graph;

    write_atomic(&args.output, &g.to_json())?;
    if let Some(dot) = &args.dot {
        write_atomic(dot, &g.to_dot())?;
    }
    writeln!(out, "methods\t{}", g.len()).map_err(internal)?;
    writeln!(out, "edges\t{}", g.edges().len()).map_err(internal)?;
    writeln!(out, "capabilities\t{}", g.capabilities().len()).map_err(internal)?;
    writeln!(out, "overlap_ratio\t{:.6}", g.overlap_ratio()).map_err(internal)?;
    if analysis.unlabeled_blocks > 0 {
        writeln!(out, "unlabeled_blocks\t{}", analysis.unlabeled_blocks).map_err(internal)?;
    }
    if analysis.interleaved_blocks > 0 {
        log::warn!("{} blocks mix several trace ids; they were split by trace id", analysis.interleaved_blocks);
        writeln!(out, "interleaved_blocks\t{}", analysis.interleaved_blocks).map_err(internal)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DecomposeOutcome {
    pub decomposition: Decomposition,
    pub objective: f64,
    pub report: MetricsReport,
    pub log: Vec<EpisodeLog>,
}

pub fn train_config(args: &DecomposeArgs) -> TrainConfig {
    let mut cfg = TrainConfig { episodes: args.episodes, seed: args.seed, patience: args.patience, ..TrainConfig::default() };
    if let Some(lr) = args.learning_rate {
        cfg.learning_rate = lr;
    }
    if let Some(e) = args.epochs {
        cfg.epochs = e;
    }
    if let Some(m) = args.minibatch_size {
        cfg.minibatch_size = m;
    }
    if let Some(c) = args.entropy_coef {
        cfg.entropy_coef = c;
    }
    if let Some(h) = &args.hidden {
        cfg.hidden = h.clone();
    }
    cfg
}

fn write_metrics(dir: &Path, label: &str, report: &MetricsReport) -> Result<(), CliError> {
    write_atomic(&dir.join(METRICS_JSON), &(report.to_json() + "\n"))?;
    write_atomic(&dir.join(METRICS_TSV), &format!("{TABLE_HEADER}\n{}\n", report.table_row(label)))
}

fn write_decomposition(dir: &Path, g: &CallGraph, d: &Decomposition, objective: Objective, value: f64) -> Result<(), CliError> {
    let mut file = DecompositionFile::from_decomposition(g, d);
    file.objective = Some(objective.to_string());
    file.objective_value = Some(value);
    write_atomic(&dir.join(DECOMPOSITION_FILE), &file.to_json())
}

pub fn decompose(args: &DecomposeArgs, out: &mut dyn Write) -> Result<DecomposeOutcome, CliError> {
    let objective = args.objective.resolve()?;
    let g = load_graph(&args.input)?;
    let env_cfg = EnvConfig::new(g.len(), args.pmax, objective)?;
    let cfg = train_config(args);
    cfg.validate()?;

    log::info!(
        "training on {} methods, s_max {}, {} steps per episode, {} episodes, objective {objective}",
        g.len(),
        env_cfg.s_max,
        env_cfg.episode_len(),
        cfg.episodes
    );
    let mut partial: Vec<EpisodeLog> = Vec::new();
    let result = train_with(&g, &env_cfg, &cfg, |e| {
        if e.episode % 100 == 0 {
            log::info!("episode {}: best {:.6}, global {:.6}", e.episode, e.episode_best, e.global_best);
        }
        partial.push(e.clone());
    });
    let trained = match result {
        Ok(t) => t,
        Err(e) => {
            write_atomic(&args.output.join(TRAINING_LOG), &training_log_tsv(&partial, args.timings))?;
            return Err(e.into());
        }
    };

    let report = evaluate_metrics(&g, &trained.best);
    write_decomposition(&args.output, &g, &trained.best, objective, trained.best_objective)?;
    write_metrics(&args.output, "decompose", &report)?;
    write_atomic(&args.output.join(TRAINING_LOG), &training_log_tsv(&trained.log, args.timings))?;
    write_atomic(
        &args.output.join(CHECKPOINT_FILE),
        &Checkpoint::new(env_cfg, cfg, &trained.net, &trained.adam).to_json(),
    )?;

    writeln!(out, "objective\t{objective}\t{:.6}", trained.best_objective).map_err(internal)?;
    writeln!(out, "episodes\t{}", trained.log.len()).map_err(internal)?;
    writeln!(out, "{TABLE_HEADER}\n{}", report.table_row("decompose")).map_err(internal)?;
    Ok(DecomposeOutcome { decomposition: trained.best, objective: trained.best_objective, report, log: trained.log })
}

pub fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<MetricsReport, CliError> {
    let g = load_graph(&args.input)?;
    let file = DecompositionFile::from_json(&read_text(&args.decomposition)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.decomposition.display())))?;
    let d = file.to_decomposition(&g)?;
    let report = evaluate_metrics(&g, &d);
    let label = args.label.clone().unwrap_or_else(|| {
        args.decomposition.file_stem().map_or("decomposition".into(), |s| s.to_string_lossy().into_owned())
    });
    if let Some(dir) = &args.output {
        write_metrics(dir, &label, &report)?;
    }
    writeln!(out, "{TABLE_HEADER}\n{}", report.table_row(&label)).map_err(internal)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
struct OracleSummary<'a> {
    mode: &'a str,
    objective: String,
    objective_value: f64,
    evaluated: u64,
    elapsed_secs: f64,
}

pub fn oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<(OracleResult, MetricsReport), CliError> {
    let objective = args.objective.resolve()?;
    let g = load_graph(&args.input)?;
    let (mode, result) = match args.oracle_mode {
        OracleMode::Exhaustive => ("exhaustive", exhaustive_best(&g, objective, args.cap)?),
        OracleMode::HillClimb => ("hill-climb", hill_climb(&g, objective, args.restarts, args.seed)?),
    };
    let report = evaluate_metrics(&g, &result.decomposition);
    if let Some(dir) = &args.output {
        write_decomposition(dir, &g, &result.decomposition, objective, result.objective)?;
        write_metrics(dir, mode, &report)?;
        let summary = OracleSummary {
            mode,
            objective: objective.to_string(),
            objective_value: result.objective,
            evaluated: result.evaluated,
            elapsed_secs: result.elapsed_secs,
        };
        write_atomic(&dir.join(ORACLE_FILE), &(serde_json::to_string_pretty(&summary).expect("serializes") + "\n"))?;
    }
    writeln!(out, "objective\t{objective}\t{:.6}", result.objective).map_err(internal)?;
    writeln!(out, "evaluated\t{}", result.evaluated).map_err(internal)?;
    writeln!(out, "{TABLE_HEADER}\n{}", report.table_row(mode)).map_err(internal)?;
    Ok((result, report))
}
