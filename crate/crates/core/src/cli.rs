//! Batch command surface: job configuration, dispatch, and serialization.
//!
//! Everything is deterministic for a fixed configuration: all maps are
//! ordered, every list is sorted canonically, and repeated runs emit
//! byte-identical output. Exit codes (applied by the binary): 0 success,
//! 2 validation error, 3 data-file error.

use std::path::PathBuf;
use std::sync::Arc;

use serde_json::json;

use crate::affine::ActionMode;
use crate::alcove::facet_stabilizer;
use crate::charformula::{
    expand_to_weights, nabla_in_simples, simples_in_nablas_kl, tilting_character, y_region, HatMap,
};
use crate::hecke::{pcan_polynomial, KlTable, PCanMode, PCanTable};
use crate::linkage::{
    all_blocks, block_dominant_weights, block_of, blocks_vs_components_dictionary,
    fixed_point_components, LinkageContext,
};
use crate::rootdata::{datum_from_json, Isogeny, RootDatum};
use crate::{Error, Result};

const KL_FALLBACK_NOTE: &str =
    "kl_fallback substitutes ordinary KL polynomials for l-canonical data; \
     valid for large l and low alcoves, no explicit bound claimed";

/// How the root datum is specified.
#[derive(Clone, Debug)]
pub enum DatumSpec {
    Named { type_str: String, isogeny: Isogeny },
    File(PathBuf),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CliCommand {
    Blocks,
    Components,
    Dict,
    Kl,
    PklImport,
    Tilt,
    Simple,
    Weyl,
    Wgroup,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Json,
    Text,
}

/// A fully described batch job.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub datum: DatumSpec,
    pub command: CliCommand,
    pub ell: Option<i64>,
    /// Length cap for enumerations that need one; `None` picks the
    /// command's default (8 for kl/blocks, the Y region for simple).
    pub max_length: Option<u32>,
    /// Coordinate radius for weight listings (`blocks --box`).
    pub box_radius: Option<i64>,
    pub pcan_path: Option<PathBuf>,
    pub hat_path: Option<PathBuf>,
    pub lambda: Option<Vec<i64>>,
    pub w_word: Option<Vec<usize>>,
    pub format: OutputFormat,
}

impl JobConfig {
    pub fn new(datum: DatumSpec, command: CliCommand) -> Self {
        JobConfig {
            datum,
            command,
            ell: None,
            max_length: None,
            box_radius: None,
            pcan_path: None,
            hat_path: None,
            lambda: None,
            w_word: None,
            format: OutputFormat::Json,
        }
    }
}

/// Runs a job and returns the serialized report destined for stdout.
pub fn run(config: &JobConfig) -> Result<String> {
    if config.max_length == Some(0) {
        return Err(Error::Validation("--max-length must be positive".into()));
    }
    if let Some(b) = config.box_radius {
        if b <= 0 {
            return Err(Error::Validation("--box must be positive".into()));
        }
    }
    let datum = load_datum(&config.datum)?;
    match config.command {
        CliCommand::Blocks => blocks_cmd(config, datum),
        CliCommand::Components => components_cmd(config, datum),
        CliCommand::Dict => dict_cmd(config, datum),
        CliCommand::Kl => kl_cmd(config, datum),
        CliCommand::PklImport => pkl_import_cmd(config, datum),
        CliCommand::Tilt => tilt_cmd(config, datum),
        CliCommand::Simple => simple_cmd(config, datum),
        CliCommand::Weyl => weyl_cmd(config, datum),
        CliCommand::Wgroup => wgroup_cmd(config, datum),
    }
}

fn load_datum(spec: &DatumSpec) -> Result<Arc<RootDatum>> {
    match spec {
        DatumSpec::Named { type_str, isogeny } => RootDatum::from_type(type_str, *isogeny),
        DatumSpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::DataFile(format!("cannot read datum file: {e}")))?;
            datum_from_json(&text)
        }
    }
}

fn context(config: &JobConfig, datum: Arc<RootDatum>) -> Result<LinkageContext> {
    let ell = config
        .ell
        .ok_or_else(|| Error::Validation("this command requires --ell".into()))?;
    LinkageContext::new(datum, ell)
}

fn load_pcan_table(config: &JobConfig, ctx: &LinkageContext) -> Result<PCanTable> {
    match &config.pcan_path {
        None => Ok(PCanTable::fallback(ctx)),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::DataFile(format!("cannot read l-KL file: {e}")))?;
            PCanTable::load(ctx, &text)
        }
    }
}

fn emit(config: &JobConfig, value: serde_json::Value, text: String) -> Result<String> {
    Ok(match config.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&value)
                .map_err(|e| Error::Invariant(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        OutputFormat::Text => text,
    })
}

fn blocks_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let ctx = context(config, datum)?;
    let blocks = all_blocks(&ctx)?;
    let mut records = Vec::new();
    let mut text = String::new();
    for b in &blocks {
        let mut rec = json!({
            "rep": b.rep,
            "i_lambda": b.i_lambda,
            "stabilizer_order": b.stabilizer_order,
        });
        if let Some(radius) = config.box_radius {
            let ws = block_dominant_weights(&ctx, b, config.max_length.unwrap_or(8))?;
            let weights: Vec<Vec<i64>> = ws
                .into_iter()
                .map(|(_, w)| w)
                .filter(|w| w.iter().all(|&c| c.abs() <= radius))
                .collect();
            rec["dominant_weights"] = json!(weights);
        }
        text.push_str(&format!(
            "block rep={:?} I_lambda={:?} |W_lambda|={}\n",
            b.rep, b.i_lambda, b.stabilizer_order
        ));
        records.push(rec);
    }
    emit(config, serde_json::Value::Array(records), text)
}

fn components_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let ctx = context(config, datum)?;
    let comps = fixed_point_components(&ctx)?;
    let mut records = Vec::new();
    let mut text = String::new();
    for c in &comps {
        let facet = facet_stabilizer(ctx.group(), &c.index, ctx.ell())?;
        records.push(json!({
            "index": c.index,
            "stabilizer_order": c.stabilizer_order,
            "kind": c.kind,
            "facet": facet.to_json(),
        }));
        text.push_str(&format!(
            "component index={:?} stabilizer_order={} kind={:?}\n",
            c.index, c.stabilizer_order, c.kind
        ));
    }
    emit(config, serde_json::Value::Array(records), text)
}

fn dict_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let ctx = context(config, datum)?;
    let dict = blocks_vs_components_dictionary(&ctx)?;
    let records: Vec<serde_json::Value> = dict
        .iter()
        .map(|e| {
            json!({
                "block_rep": e.block_rep,
                "block_stabilizer_order": e.block_stabilizer_order,
                "component_index": e.component_index,
                "component_stabilizer_order": e.component_stabilizer_order,
                "kind": e.kind,
            })
        })
        .collect();
    let text = dict
        .iter()
        .map(|e| {
            format!(
                "block {:?} <-> component {:?} (stabilizer order {})\n",
                e.block_rep, e.component_index, e.block_stabilizer_order
            )
        })
        .collect();
    emit(config, serde_json::Value::Array(records), text)
}

fn kl_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let ctx = context(config, datum)?;
    let g = ctx.group();
    let kl = KlTable::new(g.clone());
    let table = load_pcan_table(config, &ctx)?;
    let max_length = config.max_length.unwrap_or(8);
    let fw = g.enumerate_fw(max_length);
    let mut entries = Vec::new();
    let mut text = String::new();
    for w in &fw {
        for y in &fw {
            if !g.bruhat_leq(y, w) {
                continue;
            }
            let poly = pcan_polynomial(&table, &kl, y, w)?;
            if poly.is_zero() {
                continue;
            }
            let row = poly
                .nonneg_coeff_row()
                .ok_or_else(|| Error::Invariant("KL polynomial with negative exponent".into()))?;
            entries.push(json!({"w": g.word(w), "y": g.word(y), "coeffs": row}));
            text.push_str(&format!("n[{:?}, {:?}] = {}\n", g.word(y), g.word(w), poly));
        }
    }
    let value = json!({
        "mode": table.mode().as_str(),
        "ell": ctx.ell(),
        "max_length": max_length,
        "entries": entries,
    });
    emit(config, value, text)
}

fn pkl_import_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let ctx = context(config, datum)?;
    if config.pcan_path.is_none() {
        return Err(Error::Validation("pkl-import requires --pcan".into()));
    }
    let table = load_pcan_table(config, &ctx)?;
    // Canonical re-serialization is the report (and the round-trip vehicle).
    Ok(table.save(ctx.group()))
}

fn tilt_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let rank = datum.rank();
    let ctx = context(config, datum)?;
    let g = ctx.group();
    let lambda = config.lambda.clone().unwrap_or_else(|| vec![0; rank]);
    if lambda.len() != rank {
        return Err(Error::Validation("--lambda has the wrong number of coordinates".into()));
    }
    let word = config
        .w_word
        .clone()
        .ok_or_else(|| Error::Validation("tilt requires --w".into()))?;
    let w = g.from_word(&word)?;
    let block = block_of(&ctx, &lambda)?;
    let kl = KlTable::new(g.clone());
    let table = load_pcan_table(config, &ctx)?;
    let expr = tilting_character(&ctx, &block, &w, &table, &kl)?;
    let character = expand_to_weights(ctx.datum(), &expr)?;
    let top = g.act(&w, &block.rep, ctx.ell(), ActionMode::Dot);
    let mut value = json!({
        "weight": top,
        "block_rep": block.rep,
        "expr": expr.to_json(),
        "dim": character.total(),
        "mode": table.mode().as_str(),
    });
    if table.mode() == PCanMode::KlFallback {
        value["mode_note"] = json!(KL_FALLBACK_NOTE);
    }
    let text = format!(
        "T({top:?}) = {}  dim={}  mode={}\n",
        expr.iter()
            .map(|(wt, c)| format!("{c}*N({wt:?})"))
            .collect::<Vec<_>>()
            .join(" + "),
        character.total(),
        table.mode().as_str()
    );
    emit(config, value, text)
}

fn simple_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let rank = datum.rank();
    let ctx = context(config, datum)?;
    let g = ctx.group();
    let word = config
        .w_word
        .clone()
        .ok_or_else(|| Error::Validation("simple requires --w".into()))?;
    let w = g.from_word(&word)?;
    let kl = KlTable::new(g.clone());

    // Region: Y by default; an ᶠW length ideal when --max-length
    // is given explicitly (useful for truncated experiments).
    let (members, region_tag, warning) = if let Some(cap) = config.max_length {
        (g.enumerate_fw(cap), "fw_ideal", None)
    } else {
        let y = y_region(&ctx)?;
        let warn = (!y.meets_paper_bound)
            .then(|| format!("l = {} is below the validity bound 2h-2 = {}", ctx.ell(), 2 * y.coxeter_number - 2));
        (y.member_elements(), "y", warn)
    };

    let expr = simples_in_nablas_kl(&ctx, &w, &kl, &members)?;
    let weight = g.act(&w, &vec![0; rank], ctx.ell(), ActionMode::Dot);
    let mut value = json!({
        "weight": weight,
        "expr": expr.to_json(),
        "mode": "kl_fallback",
        "mode_note": KL_FALLBACK_NOTE,
        "region": region_tag,
        "region_size": members.len(),
    });
    if let Some(warn) = &warning {
        value["warning"] = json!(warn);
    }
    if let Some(path) = &config.hat_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::DataFile(format!("cannot read hat file: {e}")))?;
        let hat = HatMap::load(g, &text)?;
        let table = load_pcan_table(config, &ctx)?;
        let nabla = nabla_in_simples(&ctx, &w, &table, &kl, &hat, &members)?;
        value["nabla_expr"] = nabla.to_json();
    }
    let text = format!(
        "L({weight:?}) = {}  region={} size={}\n",
        expr.iter()
            .map(|(wt, c)| format!("{c}*N({wt:?})"))
            .collect::<Vec<_>>()
            .join(" + "),
        region_tag,
        members.len()
    );
    emit(config, value, text)
}

fn weyl_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let lambda = config
        .lambda
        .clone()
        .ok_or_else(|| Error::Validation("weyl requires --lambda".into()))?;
    if lambda.len() != datum.rank() {
        return Err(Error::Validation("--lambda has the wrong number of coordinates".into()));
    }
    let dim = datum.weyl_dim(&lambda)?;
    let ch = datum.weyl_character(&lambda)?;
    if ch.total() != dim {
        return Err(Error::Invariant("character mass differs from the dimension formula".into()));
    }
    let value = json!({
        "weight": lambda,
        "dim": dim,
        "character": ch.to_json(),
    });
    let text = format!("dim N({lambda:?}) = {dim}, {} distinct weights\n", ch.weight_mults().len());
    emit(config, value, text)
}

fn wgroup_cmd(config: &JobConfig, datum: Arc<RootDatum>) -> Result<String> {
    let elements = datum.weyl_elements()?;
    let words: Vec<Vec<usize>> = elements.iter().map(|(_, w)| w.clone()).collect();
    let value = json!({
        "order": words.len(),
        "elements": words,
    });
    let text = format!("|W_f| = {}\n", words.len());
    emit(config, value, text)
}

/// Parses a coweight given as comma- or space-separated integers.
pub fn parse_lambda(text: &str) -> Result<Vec<i64>> {
    text.split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Validation(format!("bad coordinate '{t}' in --lambda")))
        })
        .collect()
}

/// Parses a reduced word given as space- or comma-separated generator
/// indices (left-to-right product order).
pub fn parse_word_arg(text: &str) -> Result<Vec<usize>> {
    text.split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Validation(format!("bad generator index '{t}' in --w")))
        })
        .collect()
}
