use clap::Subcommand;
use planecode::{
    build_desargues_config, build_hall9, build_pappus_config, build_pattern, build_pg2, free_plane_stage, write_inc,
    Pattern, DEFAULT_POINT_BUDGET,
};

use crate::{write_output, Failure, OutArg};

#[derive(Subcommand, Debug)]
pub enum BuildKind {
    /// PG(2,q) for q in {2,3,4,5,7,8,9,11}.
    Pg2 {
        #[arg(long)]
        q: u32,
    },
    /// The near-field plane of order 9.
    Hall9,
    /// Stage X_n of the free completion of the 4-cycle.
    Freeplane {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_POINT_BUDGET)]
        budget: usize,
    },
    /// The Pappus configuration (PG(2,3) minus a flag).
    Pappus,
    /// The Desargues configuration.
    Desargues,
    /// Small pattern systems.
    Pattern {
        #[command(subcommand)]
        pattern: PatternArg,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum PatternArg {
    Triangle,
    SingleLine {
        #[arg(long)]
        size: usize,
    },
    TwoFullLines {
        #[arg(long)]
        p: u32,
    },
    KLines {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u32,
    },
}

impl From<PatternArg> for Pattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::Triangle => Pattern::Triangle,
            PatternArg::SingleLine { size } => Pattern::SingleLine(size),
            PatternArg::TwoFullLines { p } => Pattern::TwoFullLines(p),
            PatternArg::KLines { k, p } => Pattern::KLinesGeneric { k, p },
        }
    }
}

pub fn run(kind: BuildKind, out: &OutArg) -> anyhow::Result<()> {
    let sys = match kind {
        BuildKind::Pg2 { q } => build_pg2(q).map(|p| p.system().clone()),
        BuildKind::Hall9 => build_hall9().map(|p| p.system().clone()),
        BuildKind::Freeplane { n, budget } => free_plane_stage(n, budget),
        BuildKind::Pappus => build_pappus_config(),
        BuildKind::Desargues => build_desargues_config(),
        BuildKind::Pattern { pattern } => build_pattern(pattern.into()),
    }
    .map_err(Failure::from)?;
    write_output(out, &write_inc(&sys))
}
