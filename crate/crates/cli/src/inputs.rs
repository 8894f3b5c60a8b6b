//! Snapshot series and embedding table shared by `analyze` and `sweep`.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use critdisc::embeddings::{fallback_embed, fallback_table, load_embeddings, DEFAULT_DIM};
use critdisc::format::digest;
use critdisc::graph::{list_series_files, load_series, DEFAULT_PATTERN};
use critdisc::{EmbeddingTableF64, Error, SnapshotSeries};
use log::{info, warn};

use crate::config::Resolver;
use crate::error::CliError;

const FALLBACK_HINT: &str = "pass --fallback-embeddings to use deterministic fallback vectors";

#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// Directory of edge-list snapshots.
    #[arg(long, value_name = "DIR")]
    pub snapshots: Option<PathBuf>,
    /// Snapshot filename template; `{iter}` matches the iteration number.
    #[arg(long, value_name = "TEMPLATE")]
    pub pattern: Option<String>,
    /// Embedding file (`#dim d` header, then `label<TAB>v1,...,vd`).
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// Embed labels without a vector using hash-seeded random unit vectors.
    #[arg(long)]
    pub fallback_embeddings: bool,
    /// Dimension of fallback vectors when no embedding file is used.
    #[arg(long, value_name = "D")]
    pub embed_dim: Option<usize>,
    /// Seed for fallback vectors.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

pub struct Inputs {
    pub series: SnapshotSeries,
    pub embeddings: EmbeddingTableF64,
}

fn read(path: &std::path::Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

pub fn load_inputs(args: &InputArgs, r: &mut Resolver) -> Result<Inputs, CliError> {
    let dir: PathBuf = r.required("snapshots", args.snapshots.clone())?;
    let pattern = r.value("pattern", args.pattern.clone(), DEFAULT_PATTERN.to_string())?;
    let emb_path: Option<PathBuf> = r.optional("embeddings", args.embeddings.clone())?;
    let fallback = r.switch("fallback-embeddings", args.fallback_embeddings)?;
    let dim = r.value("embed-dim", args.embed_dim, DEFAULT_DIM)?;
    let seed = r.value("seed", args.seed, 0u64)?;

    let files = list_series_files(&dir, &pattern)?;
    let mut chunks: Vec<Vec<u8>> = Vec::with_capacity(2 * files.len());
    for (_, path) in &files {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        chunks.push(name.into_bytes());
        chunks.push(read(path)?);
    }
    r.meta.push("snapshot_files", files.len());
    r.meta
        .push("snapshots_sha256", digest(chunks.iter().map(Vec::as_slice)));
    let series = load_series(&dir, &pattern)?;
    info!("loaded {} snapshots from {}", series.len(), dir.display());
    let labels = series.all_labels();

    let file_table = match &emb_path {
        Some(p) if p.is_file() => {
            let bytes = read(p)?;
            r.meta.push("embeddings_sha256", digest([bytes.as_slice()]));
            Some(load_embeddings::<f64>(p)?)
        }
        Some(p) if !fallback => {
            return Err(CliError::Hinted {
                source: Error::InvalidInput(format!("embedding file {} not found", p.display())),
                hint: FALLBACK_HINT,
            });
        }
        Some(p) => {
            warn!("embedding file {} not found; using fallback vectors", p.display());
            None
        }
        None if !fallback => {
            return Err(CliError::Hinted {
                source: Error::InvalidInput("no --embeddings file given".into()),
                hint: FALLBACK_HINT,
            });
        }
        None => None,
    };

    let embeddings = match file_table {
        Some(mut table) => {
            let missing: Vec<&String> = labels.iter().filter(|l| table.get(l).is_none()).collect();
            if !missing.is_empty() {
                if !fallback {
                    return Err(CliError::Hinted {
                        source: Error::MissingEmbeddings(missing.into_iter().cloned().collect()),
                        hint: FALLBACK_HINT,
                    });
                }
                warn!(
                    "{} label(s) lack embeddings; using fallback vectors for them",
                    missing.len()
                );
                let d = table.dim();
                for l in &missing {
                    table.insert(l, fallback_embed(l, d, seed))?;
                }
            }
            r.meta.push("fallback_labels", missing.len());
            table
        }
        None => {
            r.meta.push("fallback_labels", labels.len());
            fallback_table(&labels, dim, seed)?
        }
    };
    Ok(Inputs { series, embeddings })
}
