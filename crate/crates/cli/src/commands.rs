use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use reflectron::bench::{
    behavior_experiment, config_hash, deliberation_experiment, run_active_scenario_detailed, scaling_experiment,
    summarize_scaling, write_scaling_csv, write_summary_json, BehaviorParams, Deliberator, ScalingParams,
};
use reflectron::env::{run_episode, AgentKind, EpisodeRecord};
use reflectron::szegedy::{ReflectionMode, WalkSpec};
use reflectron::{Error, Result};
use serde::Serialize;

use crate::config::{RandomChain, RunConfig};
use crate::{AgentArg, ChainArgs, Cli, Command, Format, ModeArg};

const LEDGER_FIELDS: [&str; 7] = [
    "classical_diffusions",
    "classical_checks",
    "quantum_diffusion_calls",
    "quantum_check_reflections",
    "aro_invocations",
    "measurements",
    "state_preparations",
];

/// Writes named outputs either to stdout or to `<dir>/<name>-<hash>.<ext>`.
struct Sink {
    dir: Option<PathBuf>,
    hash: String,
}

impl Sink {
    fn emit(&self, name: &str, ext: &str, body: &[u8]) -> Result<()> {
        match &self.dir {
            None => {
                use std::io::Write;
                std::io::stdout().write_all(body)?;
            }
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join(format!("{name}-{}.{ext}", &self.hash[..16])), body)?;
            }
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut buf = Vec::new();
        write_summary_json(&mut buf, &self.hash, value)?;
        self.emit(name, "json", &buf)
    }
}

fn apply_chain_args(cfg: &mut RunConfig, c: &ChainArgs) {
    let from_flags = c.chain.is_some() || c.bundled.is_some() || c.random.is_some();
    if from_flags {
        cfg.chain.file = c.chain.clone();
        cfg.chain.bundled = c.bundled.clone();
        cfg.chain.random = c.random.map(|n| RandomChain { n, gap: c.gap });
    }
    if let Some(f) = &c.flags {
        cfg.chain.flags = Some(f.clone());
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Spectra(chain) => {
            apply_chain_args(&mut cfg, chain);
            spectra(cli, &cfg)
        }
        Command::Deliberate { chain, agent, trials, mode } => {
            apply_chain_args(&mut cfg, chain);
            if let Some(m) = mode {
                cfg.agent.reflection_mode = match m {
                    ModeArg::Ideal => ReflectionMode::Ideal,
                    ModeArg::Approximate => ReflectionMode::Approximate,
                };
            }
            deliberate(cli, &cfg, *agent, *trials)
        }
        Command::Bench { trials, episodes } => {
            if let Some(t) = trials {
                cfg.bench.trials = *t;
            }
            bench(cli, &cfg, *episodes)
        }
        Command::Episodes { agent, steps, budget } => {
            if let Some(s) = steps {
                cfg.episodes.steps = *s;
            }
            episodes(cli, &cfg, *agent, *budget)
        }
    }
}

fn sink<T: Serialize>(cli: &Cli, key: &T, default_dir: Option<&Path>) -> Result<Sink> {
    Ok(Sink { dir: cli.out.clone().or(default_dir.map(Path::to_path_buf)), hash: config_hash(key)? })
}

#[derive(Serialize)]
struct SpectraReport {
    n: usize,
    delta: f64,
    phase_gap: f64,
    phase_gap_bound: f64,
    bound_holds: bool,
    chain_eigenvalues: Vec<[f64; 2]>,
    walk_eigenphases: Vec<f64>,
}

fn spectra(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let (p, _) = cfg.chain()?;
    let spec = WalkSpec::new(&p)?;
    let delta = spec.delta();
    let bound = 2.0 * delta.sqrt();
    let report = SpectraReport {
        n: p.n(),
        delta,
        phase_gap: spec.phase_gap(),
        phase_gap_bound: bound,
        bound_holds: spec.phase_gap() >= bound - 1e-9,
        chain_eigenvalues: spec.chain_eigenvalues().iter().map(|z| [z.re, z.im]).collect(),
        walk_eigenphases: spec.span_eigenvalues().iter().map(|z| z.arg()).collect(),
    };
    let out = sink(cli, &("spectra", cfg), None)?;
    match cli.format {
        Format::Json => out.json("spectra", &report),
        Format::Csv => {
            let mut s = format!("# config_hash={}\nquantity,index,value\n", out.hash);
            let _ = writeln!(s, "n,0,{}", report.n);
            let _ = writeln!(s, "delta,0,{}", report.delta);
            let _ = writeln!(s, "phase_gap,0,{}", report.phase_gap);
            let _ = writeln!(s, "phase_gap_bound,0,{}", report.phase_gap_bound);
            let _ = writeln!(s, "bound_holds,0,{}", report.bound_holds as u8);
            for (i, [re, im]) in report.chain_eigenvalues.iter().enumerate() {
                let _ = writeln!(s, "chain_eigenvalue_re,{i},{re}");
                let _ = writeln!(s, "chain_eigenvalue_im,{i},{im}");
            }
            for (i, phi) in report.walk_eigenphases.iter().enumerate() {
                let _ = writeln!(s, "walk_eigenphase,{i},{phi}");
            }
            out.emit("spectra", "csv", s.as_bytes())
        }
    }
}

fn deliberate(cli: &Cli, cfg: &RunConfig, agent: AgentArg, trials: u64) -> Result<()> {
    let deliberator = match agent {
        AgentArg::Classical => Deliberator::Classical,
        AgentArg::Quantum => Deliberator::Quantum,
        AgentArg::Standard => {
            return Err(Error::InvalidInput("the standard agent has no chain; use `episodes --agent standard`".into()))
        }
    };
    let (p, flags) = cfg.chain()?;
    let params =
        BehaviorParams { agent: cfg.agent.agent_config(cfg.seed), quantum: cfg.agent.quantum(), seed: cfg.seed };
    let summary = deliberation_experiment(&p, &flags, deliberator, trials, &params)?;
    let means = summary.mean_cost();
    let out = sink(cli, &("deliberate", format!("{agent:?}"), trials, cfg), None)?;
    match cli.format {
        Format::Json => {
            let mean_cost: serde_json::Map<String, serde_json::Value> =
                LEDGER_FIELDS.iter().zip(means).map(|(k, v)| (k.to_string(), v.into())).collect();
            out.json("deliberate", &serde_json::json!({ "result": summary, "mean_cost": mean_cost }))
        }
        Format::Csv => {
            let mut s = format!("# config_hash={}\n", out.hash);
            let _ = writeln!(
                s,
                "# agent={agent:?} trials={} eps={} tv={} radius={}",
                summary.trials, summary.eps, summary.tv, summary.radius
            );
            for (k, v) in LEDGER_FIELDS.iter().zip(means) {
                let _ = writeln!(s, "# mean_{k}={v}");
            }
            s.push_str("action,count,frequency,tailed\n");
            for a in 0..summary.counts.len() {
                let _ = writeln!(s, "{a},{},{},{}", summary.counts[a], summary.frequencies[a], summary.tailed[a]);
            }
            out.emit("deliberate", "csv", s.as_bytes())
        }
    }
}

fn bench(cli: &Cli, cfg: &RunConfig, with_episodes: bool) -> Result<()> {
    if cfg.bench.ensemble.is_empty() {
        return Err(Error::InvalidInput("empty ensemble: add [[bench.ensemble]] points".into()));
    }
    let out = sink(cli, &("bench", with_episodes, cfg), Some(Path::new(".")))?;
    let a = &cfg.agent;
    let params = ScalingParams {
        k1: a.k1,
        c: a.c,
        t_const: cfg.bench.t_const,
        reflection_mode: a.reflection_mode,
        retry_mode: a.retry_mode,
        quantum_retry_cap: a.k3,
        seed: cfg.seed,
    };
    let records = scaling_experiment(&cfg.bench.ensemble, cfg.bench.trials, &params)?;
    let fits = summarize_scaling(&records)?;
    match cli.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_scaling_csv(&mut buf, &out.hash, &records)?;
            out.emit("scaling", "csv", &buf)?;
        }
        Format::Json => out.json("scaling", &records)?,
    }

    let (p, flags) = cfg.chain()?;
    let bparams =
        BehaviorParams { agent: cfg.agent.agent_config(cfg.seed), quantum: cfg.agent.quantum(), seed: cfg.seed };
    let behavior = behavior_experiment(&p, &flags, cfg.bench.trials.max(10_000), &bparams)?;

    let active = if with_episodes {
        let (report, classical, quantum) = run_active_scenario_detailed(&cfg.scenario())?;
        emit_episode(&out, cli.format, "episodes-classical", &classical)?;
        emit_episode(&out, cli.format, "episodes-quantum", &quantum)?;
        Some(report)
    } else {
        None
    };
    out.json("summary", &serde_json::json!({ "fits": fits, "behavior": behavior, "active": active }))
}

fn emit_episode(out: &Sink, format: Format, name: &str, record: &EpisodeRecord) -> Result<()> {
    match format {
        Format::Json => out.json(name, record),
        Format::Csv => {
            let mut buf = format!("# config_hash={}\n", out.hash).into_bytes();
            record.write_csv(&mut buf)?;
            out.emit(name, "csv", &buf)
        }
    }
}

fn episodes(cli: &Cli, cfg: &RunConfig, agent: AgentArg, budget: u64) -> Result<()> {
    let kind = match agent {
        AgentArg::Classical => AgentKind::ClassicalRps,
        AgentArg::Quantum => AgentKind::QuantumRps,
        AgentArg::Standard => AgentKind::StandardPs,
    };
    let sc = cfg.scenario();
    let record = run_episode(&mut sc.agent(kind)?, &mut sc.environment(budget)?, sc.steps)?;
    let out = sink(cli, &("episodes", format!("{agent:?}"), budget, cfg), None)?;
    emit_episode(&out, cli.format, "episodes", &record)
}

