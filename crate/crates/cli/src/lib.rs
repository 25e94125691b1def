//! Command-line front end: argument types, report documents, and the
//! independent homology oracle used to cross-check the Morse computations.

pub mod oracle;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use treebraid_core::{
    betti_numbers, classify, critical_cells, match_down, match_up, non_flag_witness, raag_status,
    Cell, CellError, CellStatus, ConfigSpace, CupError, CupRing, MorseError, NonFlagWitness,
    PlaneTree, RingTable, TreeSpec, Verdict, VerdictReason,
};

use crate::oracle::{ChainComplex, IntegralHomology, OracleError};

/// Entries allowed in a dense Smith form before the oracle gives up.
const DENSE_LIMIT: usize = 4_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Consistency(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for an internal
    /// inconsistency, 4 for an exceeded resource bound.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Consistency(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

impl From<CellError> for CliError {
    fn from(e: CellError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MorseError> for CliError {
    fn from(e: MorseError) -> Self {
        CliError::Consistency(e.to_string())
    }
}

impl From<CupError> for CliError {
    fn from(e: CupError) -> Self {
        match e {
            CupError::Cell(c) => c.into(),
            other => CliError::Consistency(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooManyCells { .. } | OracleError::DenseTooLarge { .. } => {
                CliError::Resource(e.to_string())
            }
            OracleError::Overflow => CliError::Consistency(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Parser)]
#[command(
    name = "treebraid",
    version,
    about = "Homology and cup products of tree braid groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Tree document (JSON) or the builtin name `tmin`.
    #[arg(long, default_value = "tmin")]
    pub tree: String,
    /// Number of strands.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Subdivide the tree as needed instead of rejecting it.
    #[arg(long)]
    pub subdivide: bool,
    /// Cross-check against boundary-matrix homology.
    #[arg(long)]
    pub oracle: bool,
    /// Largest number of cells of any one dimension the oracle will handle.
    #[arg(long, default_value_t = 200_000)]
    pub max_cells: u128,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Betti numbers from critical cell counts.
    Betti {
        #[command(flatten)]
        cfg: RunConfig,
        /// Also list the critical cells of this dimension.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Status of one cell under the matching, with its partner.
    Classify {
        #[command(flatten)]
        cfg: RunConfig,
        /// Cell text such as `{v10, v14, e16, e19}`.
        cell: String,
    },
    /// Products of degree-one classes.
    CupTable {
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Whether the braid group is a right-angled Artin group.
    Raag {
        #[command(flatten)]
        cfg: RunConfig,
        /// Search the product table for a non-flag triangle.
        #[arg(long)]
        witness: bool,
    },
    /// Homology from boundary matrices alone.
    Oracle {
        #[command(flatten)]
        cfg: RunConfig,
        /// Also compute integral homology and report torsion.
        #[arg(long)]
        integral: bool,
    },
}

impl Command {
    pub fn config(&self) -> &RunConfig {
        match self {
            Command::Betti { cfg, .. }
            | Command::Classify { cfg, .. }
            | Command::CupTable { cfg }
            | Command::Raag { cfg, .. }
            | Command::Oracle { cfg, .. } => cfg,
        }
    }
}

/// Loads `tmin` or a JSON tree document.
pub fn load_tree(source: &str) -> Result<PlaneTree, CliError> {
    if source == "tmin" {
        return Ok(PlaneTree::canonical_t_min());
    }
    let path = PathBuf::from(source);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec: TreeSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    PlaneTree::from_spec(&spec).map_err(|e| CliError::Input(e.to_string()))
}

fn space_for(cfg: &RunConfig) -> Result<ConfigSpace, CliError> {
    if cfg.n == 0 {
        return Err(CliError::Input(
            "the strand count must be at least 1".into(),
        ));
    }
    let mut tree = load_tree(&cfg.tree)?;
    if cfg.subdivide {
        tree = tree.subdivide_for(cfg.n).0;
    }
    Ok(ConfigSpace::new(tree, cfg.n)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub cell_counts: Vec<usize>,
    pub mod2_betti: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral: Option<IntegralHomology>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiReport {
    pub vertices: usize,
    pub strands: usize,
    pub betti: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<CriticalListing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalListing {
    pub dim: usize,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub cell: Cell,
    pub status: CellStatus,
    pub partner: Option<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaagReport {
    pub verdict: Verdict,
    pub reason: VerdictReason,
    /// Diagnostic only; the verdict does not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<NonFlagWitness>,
}

pub fn run_oracle(
    space: &ConfigSpace,
    max_cells: u128,
    integral: bool,
) -> Result<OracleReport, CliError> {
    let cc = ChainComplex::build(space, max_cells)?;
    let integral = if integral {
        Some(cc.integral(DENSE_LIMIT)?)
    } else {
        None
    };
    Ok(OracleReport {
        cell_counts: cc.counts.clone(),
        mod2_betti: cc.betti_mod2(),
        integral,
    })
}

pub fn cmd_betti(cfg: &RunConfig, dim: Option<usize>) -> Result<BettiReport, CliError> {
    let space = space_for(cfg)?;
    let betti = betti_numbers(&space)?;
    let critical = dim.map(|d| CriticalListing {
        dim: d,
        cells: critical_cells(&space, d),
    });
    let oracle = if cfg.oracle {
        let rep = run_oracle(&space, cfg.max_cells, false)?;
        if rep.mod2_betti != betti {
            return Err(CliError::Consistency(format!(
                "critical counts {betti:?} disagree with oracle ranks {:?}",
                rep.mod2_betti
            )));
        }
        Some(rep)
    } else {
        None
    };
    Ok(BettiReport {
        vertices: space.tree().vertex_count(),
        strands: cfg.n,
        betti,
        critical,
        oracle,
    })
}

pub fn cmd_classify(cfg: &RunConfig, text: &str) -> Result<ClassifyReport, CliError> {
    let space = space_for(cfg)?;
    let cell = space.parse_cell(text)?;
    let tree = space.tree();
    let status = classify(tree, &cell);
    let partner = match status {
        CellStatus::Redundant => Some(match_up(tree, &cell)?),
        CellStatus::Collapsible => Some(match_down(tree, &cell)?),
        CellStatus::Critical => None,
    };
    Ok(ClassifyReport {
        cell,
        status,
        partner,
    })
}

pub fn cmd_cup_table(cfg: &RunConfig) -> Result<RingTable, CliError> {
    let space = space_for(cfg)?;
    Ok(CupRing::new(space, 3)?.ring_table()?)
}

pub fn cmd_raag(cfg: &RunConfig, witness: bool) -> Result<RaagReport, CliError> {
    let space = space_for(cfg)?;
    let (verdict, reason) = raag_status(space.tree(), cfg.n);
    let witness = if witness {
        non_flag_witness(&CupRing::new(space, 3)?.ring_table()?)
    } else {
        None
    };
    Ok(RaagReport {
        verdict,
        reason,
        witness,
    })
}

pub fn cmd_oracle(cfg: &RunConfig, integral: bool) -> Result<OracleReport, CliError> {
    let space = space_for(cfg)?;
    run_oracle(&space, cfg.max_cells, integral)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn unsupported(cmd: &str, format: Format) -> CliError {
    CliError::Input(format!("format {format:?} is not available for {cmd}").to_lowercase())
}

fn list(v: &[usize]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Runs one command and renders its report.
pub fn run(command: &Command) -> Result<String, CliError> {
    let format = command.config().format;
    let mut out = String::new();
    match command {
        Command::Betti { cfg, dim } => {
            let r = cmd_betti(cfg, *dim)?;
            match format {
                Format::Json => out = json(&r),
                Format::Text => {
                    let _ = writeln!(out, "betti: {}", list(&r.betti));
                    if let Some(o) = &r.oracle {
                        let _ = writeln!(out, "oracle (mod 2): {} (agrees)", list(&o.mod2_betti));
                    }
                    if let Some(c) = &r.critical {
                        let _ = writeln!(out, "critical {}-cells: {}", c.dim, c.cells.len());
                        for cell in &c.cells {
                            let _ = writeln!(out, "  {cell}");
                        }
                    }
                }
                Format::Csv => {
                    out.push_str("dim,critical");
                    out.push_str(if r.oracle.is_some() {
                        ",oracle_mod2\n"
                    } else {
                        "\n"
                    });
                    for (d, b) in r.betti.iter().enumerate() {
                        let _ = write!(out, "{d},{b}");
                        if let Some(o) = &r.oracle {
                            let _ = write!(out, ",{}", o.mod2_betti[d]);
                        }
                        out.push('\n');
                    }
                }
                Format::Dot => return Err(unsupported("betti", format)),
            }
        }
        Command::Classify { cfg, cell } => {
            let r = cmd_classify(cfg, cell)?;
            let partner = r
                .partner
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default();
            match format {
                Format::Json => out = json(&r),
                Format::Text => {
                    let _ = writeln!(out, "{}: {}", r.cell, r.status);
                    if let Some(p) = &r.partner {
                        let _ = writeln!(out, "partner: {p}");
                    }
                }
                Format::Csv => {
                    let _ = writeln!(
                        out,
                        "cell,status,partner\n\"{}\",{},\"{partner}\"",
                        r.cell, r.status
                    );
                }
                Format::Dot => return Err(unsupported("classify", format)),
            }
        }
        Command::CupTable { cfg } => {
            let r = cmd_cup_table(cfg)?;
            match format {
                Format::Json => out = json(&r),
                Format::Dot => out = r.to_dot(),
                Format::Text => {
                    let _ = writeln!(
                        out,
                        "H1 basis: {}  H2 basis: {}",
                        r.basis1.len(),
                        r.basis2.len()
                    );
                    let _ = writeln!(out, "nonzero products: {}", r.products.len());
                    for p in &r.products {
                        let value: Vec<String> =
                            p.value.iter().map(|&l| r.basis2[l].to_string()).collect();
                        let _ = writeln!(
                            out,
                            "  {} * {} = {}",
                            r.basis1[p.left],
                            r.basis1[p.right],
                            value.join(" + ")
                        );
                    }
                    let _ = writeln!(
                        out,
                        "pairing rank: {}  radical: {}",
                        r.pairing_rank, r.radical_dim
                    );
                }
                Format::Csv => {
                    out.push_str("left,right,product\n");
                    for p in &r.products {
                        let value: Vec<String> =
                            p.value.iter().map(|&l| r.basis2[l].to_string()).collect();
                        let _ = writeln!(
                            out,
                            "\"{}\",\"{}\",\"{}\"",
                            r.basis1[p.left],
                            r.basis1[p.right],
                            value.join(" + ")
                        );
                    }
                }
            }
        }
        Command::Raag { cfg, witness } => {
            let r = cmd_raag(cfg, *witness)?;
            match format {
                Format::Json => out = json(&r),
                Format::Text => {
                    let _ = writeln!(out, "{} ({})", r.verdict, r.reason);
                    if let Some(w) = &r.witness {
                        let names: Vec<String> =
                            w.triangle.iter().map(ToString::to_string).collect();
                        let _ = writeln!(out, "diagnostic non-flag triangle: {}", names.join(", "));
                    }
                }
                Format::Csv => {
                    let _ = writeln!(out, "verdict,reason\n{},{}", r.verdict, r.reason);
                }
                Format::Dot => return Err(unsupported("raag", format)),
            }
        }
        Command::Oracle { cfg, integral } => {
            let r = cmd_oracle(cfg, *integral)?;
            match format {
                Format::Json => out = json(&r),
                Format::Text => {
                    let _ = writeln!(out, "cells: {}", list(&r.cell_counts));
                    let _ = writeln!(out, "betti (mod 2): {}", list(&r.mod2_betti));
                    if let Some(h) = &r.integral {
                        let _ = writeln!(out, "betti (integral): {}", list(&h.free_ranks));
                        if h.torsion.is_empty() {
                            out.push_str("torsion: none\n");
                        }
                        for t in &h.torsion {
                            let _ = writeln!(
                                out,
                                "torsion in degree {}: {}",
                                t.dim,
                                list_u64(&t.factors)
                            );
                        }
                    }
                }
                Format::Csv => {
                    out.push_str("dim,cells,betti_mod2\n");
                    for (d, (c, b)) in r.cell_counts.iter().zip(&r.mod2_betti).enumerate() {
                        let _ = writeln!(out, "{d},{c},{b}");
                    }
                }
                Format::Dot => return Err(unsupported("oracle", format)),
            }
        }
    }
    Ok(out)
}

fn list_u64(v: &[u64]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
