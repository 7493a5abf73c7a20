use std::path::{Path, PathBuf};

use clap::{Subcommand, ValueEnum};
use planecode::census::{DEFAULT_SHARD_BUDGET, DEFAULT_VOLUME_LIMIT};
use planecode::{
    bounded_weight_census, code_from_system, full_census, merge, type_census, BoundedOptions, CensusKind,
    CensusTable, LinearCode, ShardSpec, TypeStrategy, WeightType, WordFilter,
};
use serde_json::json;

use crate::{json, read_input, read_system, write_output, Failure, OutArg};

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum KindArg {
    Hamming,
    Complete,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum StrategyArg {
    Full,
    Bounded,
}

#[derive(Subcommand, Debug)]
pub enum CodeAction {
    /// Dimensions of the code, its dual and its hull.
    Stats {
        input: PathBuf,
        #[arg(long)]
        p: u32,
    },
    /// Generator matrix of the code as CSV.
    Generator {
        input: PathBuf,
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Generator matrix of the dual code as CSV.
    Dual {
        input: PathBuf,
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Generator matrix of the hull as CSV.
    Hull {
        input: PathBuf,
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exhaustive census of one shard of the code.
    Census {
        input: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long, value_enum, default_value = "complete")]
        kind: KindArg,
        /// Shard as `index/count`.
        #[arg(long, default_value = "0/1")]
        shard: String,
        /// Maximum words per shard.
        #[arg(long, default_value_t = DEFAULT_SHARD_BUDGET)]
        budget: u64,
        /// Use the dual code.
        #[arg(long)]
        dual: bool,
        /// Lift the per-shard budget; requires more than one shard.
        #[arg(long)]
        allow_full: bool,
        /// Reuse censuses stored here, keyed by system fingerprint, p and kind.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Every codeword of weight at most `wmax`.
    Lowweight {
        input: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        wmax: usize,
        #[arg(long)]
        dual: bool,
        #[arg(long, default_value_t = DEFAULT_VOLUME_LIMIT)]
        volume_limit: u128,
        /// Accept a plan that cannot cover every word (reported as HEURISTIC).
        #[arg(long)]
        allow_heuristic: bool,
        /// Write the words of weight exactly `wmax`, one per line.
        #[arg(long)]
        words: Option<PathBuf>,
        /// Write the complete table in `.cwe` format.
        #[arg(long)]
        cwe: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Number of codewords of one type.
    Typecount {
        input: PathBuf,
        #[arg(long)]
        p: u32,
        /// Comma separated counts `j_0,...,j_{p-1}`.
        #[arg(long = "type")]
        weight_type: String,
        #[arg(long, value_enum, default_value = "bounded")]
        strategy: StrategyArg,
        #[arg(long)]
        dual: bool,
    },
    /// Sum shard tables of the same code.
    Merge {
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn load_code(input: &PathBuf, p: u32, dual: bool) -> anyhow::Result<(LinearCode, String)> {
    let sys = read_system(input)?;
    let code = code_from_system(&sys, p).map_err(Failure::from)?;
    let code = if dual { code.dual() } else { code };
    Ok((code, sys.fingerprint()))
}

fn parse_shard(s: &str) -> anyhow::Result<ShardSpec> {
    let bad = || Failure::Input(format!("shard must look like `index/count`, got {s:?}"));
    let (i, n) = s.split_once('/').ok_or_else(bad)?;
    let i: u64 = i.trim().parse().map_err(|_| bad())?;
    let n: u64 = n.trim().parse().map_err(|_| bad())?;
    Ok(ShardSpec::new(i, n).map_err(Failure::from)?)
}

fn weights_json(table: &CensusTable) -> serde_json::Value {
    let h = table.to_hamming();
    h.entries
        .iter()
        .map(|(k, c)| json!({ "weight": k[0], "count": c.to_string() }))
        .collect()
}

fn cache_path(dir: &Path, sys_fp: &str, p: u32, kind: CensusKind, dual: bool, shard: ShardSpec) -> PathBuf {
    let mut name = format!("{sys_fp}-p{p}-{}", kind.as_str());
    if dual {
        name.push_str("-dual");
    }
    if shard.count > 1 {
        name.push_str(&format!("-{}of{}", shard.index, shard.count));
    }
    dir.join(name + ".cwe")
}

pub fn run(action: CodeAction, seed: u64) -> anyhow::Result<()> {
    match action {
        CodeAction::Stats { input, p } => {
            let sys = read_system(&input)?;
            let code = code_from_system(&sys, p).map_err(Failure::from)?;
            let report = json!({
                "p": p,
                "points": sys.num_points(),
                "lines": sys.num_lines(),
                "dim": code.dimension(),
                "dual_dim": code.dual().dimension(),
                "hull_dim": code.hull().dimension(),
                "hull_equals_dual": code.hull().same_space(&code.dual()),
                "system_fingerprint": sys.fingerprint(),
                "code_fingerprint": code.fingerprint(),
            });
            print!("{}", json(&report));
            Ok(())
        }
        CodeAction::Generator { input, p, out } => {
            let (code, fp) = load_code(&input, p, false)?;
            write_output(&out, &code.to_csv(&format!("code of {} ({fp})", input.display())))
        }
        CodeAction::Dual { input, p, out } => {
            let (code, fp) = load_code(&input, p, true)?;
            write_output(&out, &code.to_csv(&format!("dual code of {} ({fp})", input.display())))
        }
        CodeAction::Hull { input, p, out } => {
            let (code, fp) = load_code(&input, p, false)?;
            write_output(&out, &code.hull().to_csv(&format!("hull of {} ({fp})", input.display())))
        }
        CodeAction::Census { input, p, kind, shard, budget, dual, allow_full, cache_dir, out } => {
            let shard = parse_shard(&shard)?;
            let kind = match kind {
                KindArg::Hamming => CensusKind::Hamming,
                KindArg::Complete => CensusKind::Complete,
            };
            let (code, sys_fp) = load_code(&input, p, dual)?;
            let cached = cache_dir.as_ref().map(|d| cache_path(d, &sys_fp, p, kind, dual, shard));
            if let Some(path) = cached.as_ref().filter(|p| p.exists()) {
                let text = read_input(path)?;
                let table = CensusTable::parse_cwe(&text).map_err(Failure::from)?;
                if table.fingerprint == code.fingerprint() {
                    return write_output(&out, &table.to_cwe());
                }
            }
            let budget = if allow_full {
                if shard.count < 2 {
                    return Err(Failure::Input("--allow-full needs --shard with more than one shard".into()).into());
                }
                u64::MAX
            } else {
                budget
            };
            let table = full_census(&code, kind, shard, budget).map_err(Failure::from)?;
            let text = table.to_cwe();
            if let Some(path) = cached {
                if let Some(dir) = path.parent() {
                    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(e.to_string()))?;
                }
                std::fs::write(&path, &text).map_err(|e| Failure::Input(e.to_string()))?;
            }
            write_output(&out, &text)
        }
        CodeAction::Lowweight { input, p, wmax, dual, volume_limit, allow_heuristic, words, cwe, out } => {
            let (code, _) = load_code(&input, p, dual)?;
            let mut opts = BoundedOptions::new(wmax);
            opts.seed = seed;
            opts.volume_limit = volume_limit;
            opts.allow_heuristic = allow_heuristic;
            if words.is_some() {
                opts.words = WordFilter::Weight(wmax);
            }
            let census = bounded_weight_census(&code, &opts).map_err(Failure::from)?;
            if let Some(path) = words {
                let mut text = String::new();
                for w in &census.words {
                    let cells: Vec<String> = w.coords().iter().map(|c| c.to_string()).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                std::fs::write(&path, text).map_err(|e| Failure::Input(e.to_string()))?;
            }
            if let Some(path) = cwe {
                std::fs::write(&path, census.complete.to_cwe()).map_err(|e| Failure::Input(e.to_string()))?;
            }
            let report = json!({
                "p": p,
                "length": code.length(),
                "dim": code.dimension(),
                "dual": dual,
                "wmax": wmax,
                "status": census.status,
                "plan": census.plan,
                "min_weight": census.min_nonzero_weight(),
                "weights": weights_json(&census.hamming),
            });
            write_output(&out, &json(&report))
        }
        CodeAction::Typecount { input, p, weight_type, strategy, dual } => {
            let (code, _) = load_code(&input, p, dual)?;
            let j = WeightType::parse(&weight_type).map_err(Failure::from)?;
            let strategy = match strategy {
                StrategyArg::Full => TypeStrategy::Full,
                StrategyArg::Bounded => TypeStrategy::BoundedWeight,
            };
            let count = type_census(&code, &j, strategy, seed).map_err(Failure::from)?;
            let report = json!({ "type": j.0, "count": count.to_string(), "strategy": strategy });
            print!("{}", json(&report));
            Ok(())
        }
        CodeAction::Merge { inputs, out } => {
            let tables = inputs
                .iter()
                .map(|p| Ok(CensusTable::parse_cwe(&read_input(p)?).map_err(Failure::from)?))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let merged = merge(&tables).map_err(Failure::from)?;
            write_output(&out, &merged.to_cwe())
        }
    }
}
