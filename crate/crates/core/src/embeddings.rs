//! Embedding tables, cosine similarity, deterministic fallback vectors and a
//! 2-D PCA projection for visualization.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::{abs, Scalar};

/// Width of the sentence encoder the file format was designed around.
pub const DEFAULT_DIM: usize = 384;

/// Label → vector map with a fixed dimension and nonzero norms.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    dim: usize,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<Vec<T>>,
}

impl<T: Scalar> EmbeddingTable<T> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("embedding dimension must be positive".into()));
        }
        Ok(EmbeddingTable {
            dim,
            labels: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
        })
    }

    pub fn insert(&mut self, label: &str, vector: Vec<T>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "label {label:?}: expected {} values, found {}",
                self.dim,
                vector.len()
            )));
        }
        if self.index.contains_key(label) {
            return Err(Error::InvalidInput(format!("duplicate embedding label {label:?}")));
        }
        if norm(&vector) <= T::zero() || vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::ZeroNorm(label.to_string()));
        }
        self.index.insert(label.to_string(), self.labels.len());
        self.labels.push(label.to_string());
        self.vectors.push(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, label: &str) -> Option<&[T]> {
        self.index.get(label).map(|&i| self.vectors[i].as_slice())
    }

    /// Errors with every label that has no vector.
    pub fn require<S: AsRef<str>>(&self, labels: &[S]) -> Result<()> {
        let missing: Vec<String> = labels
            .iter()
            .filter(|l| !self.index.contains_key(l.as_ref()))
            .map(|l| l.as_ref().to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingEmbeddings(missing))
        }
    }

    /// Vectors for `labels`, in that order.
    pub fn lookup<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<&[T]>> {
        self.require(labels)?;
        Ok(labels
            .iter()
            .map(|l| self.get(l.as_ref()).expect("checked above"))
            .collect())
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Scalar>(&self) -> EmbeddingTable<U> {
        EmbeddingTable {
            dim: self.dim,
            labels: self.labels.clone(),
            index: self.index.clone(),
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|x| U::lit(x.as_f64())).collect())
                .collect(),
        }
    }
}

pub fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

pub fn euclidean<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter()
        .zip(v)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
        .sqrt()
}

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::InvalidInput(format!(
            "cosine of vectors with lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu <= T::zero() || nv <= T::zero() {
        return Err(Error::ZeroNorm("<anonymous>".into()));
    }
    Ok(clamp_unit(dot(u, v) / (nu * nv)))
}

pub(crate) fn clamp_unit<T: Scalar>(c: T) -> T {
    let one = T::one();
    if c > one {
        one
    } else if c < -one {
        -one
    } else {
        c
    }
}

pub fn parse_embeddings<T: Scalar, R: Read>(reader: R, origin: &Path) -> Result<EmbeddingTable<T>> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut lines = BufReader::new(reader).lines().enumerate();
    let header = loop {
        match lines.next() {
            None => return Err(perr(1, "empty embedding file".into())),
            Some((no, l)) => {
                let l = l.map_err(|e| Error::io(origin, e))?;
                if l.trim().is_empty() {
                    continue;
                }
                break (no + 1, l);
            }
        }
    };
    let dim: usize = header
        .1
        .trim()
        .strip_prefix("#dim")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| perr(header.0, format!("expected `#dim <d>` header, found {:?}", header.1)))?;
    let mut table = EmbeddingTable::new(dim).map_err(|e| perr(header.0, e.to_string()))?;
    for (no, line) in lines {
        let line = line.map_err(|e| Error::io(origin, e))?;
        let no = no + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, values) = line
            .split_once('\t')
            .ok_or_else(|| perr(no, "expected `label<TAB>v1,...,vd`".into()))?;
        let vector = values
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| perr(no, format!("label {label:?}: bad number {v:?}")))
            })
            .collect::<Result<Vec<T>>>()?;
        table.insert(label, vector).map_err(|e| perr(no, e.to_string()))?;
    }
    if table.is_empty() {
        return Err(perr(header.0, "embedding file has no vectors".into()));
    }
    Ok(table)
}

pub fn load_embeddings<T: Scalar>(path: impl AsRef<Path>) -> Result<EmbeddingTable<T>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(file, path)
}

/// Writes the `#dim` header, optional `#` comment lines, then one row per label.
pub fn write_embeddings<T: Scalar, W: Write>(
    mut out: W,
    table: &EmbeddingTable<T>,
    comments: &[String],
) -> std::io::Result<()> {
    writeln!(out, "#dim {}", table.dim())?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    for (label, v) in table.labels.iter().zip(&table.vectors) {
        let row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{label}\t{}", row.join(","))?;
    }
    Ok(())
}

fn label_seed(label: &str, seed: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    h.finalize().into()
}

/// Deterministic unit vector for `label`: standard-normal coordinates drawn
/// from a generator keyed by `(label, seed)`, then normalized.
pub fn fallback_embed<T: Scalar>(label: &str, dim: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::from_seed(label_seed(label, seed));
    let raw: Vec<f64> = (0..dim.max(1)).map(|_| rng.sample(StandardNormal)).collect();
    let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.into_iter().map(|x| T::lit(x / n)).collect()
}

pub fn fallback_table<T: Scalar, S: AsRef<str>>(labels: &[S], dim: usize, seed: u64) -> Result<EmbeddingTable<T>> {
    if dim < 2 {
        return Err(Error::InvalidInput(
            "fallback embedding dimension must be at least 2".into(),
        ));
    }
    let mut table = EmbeddingTable::new(dim)?;
    for l in labels {
        if table.get(l.as_ref()).is_none() {
            table.insert(l.as_ref(), fallback_embed(l.as_ref(), dim, seed))?;
        }
    }
    Ok(table)
}

/// Nodes projected onto the top two principal axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection<T> {
    pub labels: Vec<String>,
    pub coordinates: Vec<[T; 2]>,
    /// Fraction of total variance captured by each axis.
    pub explained_variance: [T; 2],
    /// Unit loading vectors of the two axes.
    pub axes: [Vec<T>; 2],
}

impl<T: Scalar> PcaProjection<T> {
    pub fn get(&self, label: &str) -> Option<[T; 2]> {
        self.labels.iter().position(|l| l == label).map(|i| self.coordinates[i])
    }
}

/// PCA on the covariance of mean-centered vectors. Each axis is oriented so
/// that its largest-magnitude loading is positive.
pub fn pca_2d<T: Scalar, S: AsRef<str>>(table: &EmbeddingTable<T>, labels: &[S]) -> Result<PcaProjection<T>> {
    let n = labels.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("PCA needs at least 3 points, got {n}")));
    }
    let rows = table.lookup(labels)?;
    let d = table.dim();
    let mut x = DMatrix::<T>::from_fn(n, d, |i, j| rows[i][j]);
    let inv_n = T::one() / T::from_usize_lossy(n);
    for j in 0..d {
        let mean = x.column(j).iter().fold(T::zero(), |a, &v| a + v) * inv_n;
        for i in 0..n {
            x[(i, j)] -= mean;
        }
    }
    let cov = (x.transpose() * &x) / T::from_usize_lossy(n - 1);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let total = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, &l| if l > T::zero() { acc + l } else { acc });

    let mut axes: [Vec<T>; 2] = [vec![T::zero(); d], vec![T::zero(); d]];
    let mut explained = [T::zero(); 2];
    for (k, slot) in order.iter().take(2).enumerate() {
        let mut v: Vec<T> = eig.eigenvectors.column(*slot).iter().copied().collect();
        let pivot = v
            .iter()
            .enumerate()
            .fold(0, |best, (i, &c)| if abs(c) > abs(v[best]) { i } else { best });
        if v[pivot] < T::zero() {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        let lambda = eig.eigenvalues[*slot];
        explained[k] = if total > T::zero() && lambda > T::zero() {
            lambda / total
        } else {
            T::zero()
        };
        axes[k] = v;
    }

    let coordinates = (0..n)
        .map(|i| {
            let row: Vec<T> = x.row(i).iter().copied().collect();
            [dot(&row, &axes[0]), dot(&row, &axes[1])]
        })
        .collect();
    Ok(PcaProjection {
        labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
        coordinates,
        explained_variance: explained,
        axes,
    })
}
