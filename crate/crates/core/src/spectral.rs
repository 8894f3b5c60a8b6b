//! Von Neumann entropy of normalized Laplacians, for the structural graph and
//! for the dense cosine-similarity graph over node embeddings, plus the
//! discovery parameter that balances the two.
//!
//! All entropies are in nats.

use nalgebra::{DMatrix, DVector};

use crate::embeddings::{clamp_unit, norm, EmbeddingTable};
use crate::error::{Error, Result};
use crate::graph::{adjacency_and_degrees, GraphSnapshot};
use crate::scalar::{abs, Scalar};

/// Largest matrix handed to the dense eigensolver.
pub const MAX_DENSE_NODES: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    /// Ascending, with rounding negatives clamped to zero.
    pub eigenvalues: Vec<T>,
    /// Eigenvalues rescaled to sum to one.
    pub weights: Vec<T>,
    pub entropy_nats: T,
    /// Set when the spectrum is all zeros (edgeless graph); entropy is then 0.
    pub degenerate: bool,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_NODES {
        return Err(Error::TooLarge {
            nodes: n,
            limit: MAX_DENSE_NODES,
        });
    }
    Ok(())
}

/// `L = I - D^{-1/2} A D^{-1/2}`. Zero-degree nodes get an all-zero row and column.
pub fn normalized_laplacian<T: Scalar>(adjacency: &DMatrix<T>, degrees: &DVector<T>) -> Result<DMatrix<T>> {
    let n = adjacency.nrows();
    if adjacency.ncols() != n || degrees.len() != n {
        return Err(Error::InvalidInput(format!(
            "adjacency is {}x{} but degree vector has length {}",
            n,
            adjacency.ncols(),
            degrees.len()
        )));
    }
    if adjacency.iter().any(|&a| a < T::zero() || !a.is_finite()) {
        return Err(Error::InvalidInput(
            "adjacency has negative or non-finite entries".into(),
        ));
    }
    if degrees.iter().any(|&d| d < T::zero()) {
        return Err(Error::InvalidInput("negative degree".into()));
    }
    let inv_sqrt: Vec<T> = degrees
        .iter()
        .map(|&d| if d > T::zero() { T::one() / d.sqrt() } else { T::zero() })
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let off = adjacency[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
        if i == j {
            let diag = if degrees[i] > T::zero() { T::one() } else { T::zero() };
            diag - off
        } else {
            -off
        }
    }))
}

/// Spectral entropy `-Σ w ln w` of a symmetric PSD matrix, where `w` are its
/// eigenvalues normalized to unit sum.
pub fn von_neumann_entropy<T: Scalar>(laplacian: &DMatrix<T>) -> Result<SpectrumResult<T>> {
    let n = laplacian.nrows();
    if laplacian.ncols() != n {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    check_size(n)?;
    if n == 0 {
        return Ok(SpectrumResult {
            eigenvalues: Vec::new(),
            weights: Vec::new(),
            entropy_nats: T::zero(),
            degenerate: true,
        });
    }
    let mut eigenvalues: Vec<T> = laplacian.clone().symmetric_eigenvalues().iter().copied().collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::Numerical("eigensolver returned non-finite values".into()));
    }
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let tol = T::clamp_tolerance();
    for l in eigenvalues.iter_mut() {
        if *l < T::zero() {
            if *l < -tol {
                return Err(Error::Numerical(format!(
                    "eigenvalue {l:e} below clamp tolerance; matrix is not positive semidefinite"
                )));
            }
            *l = T::zero();
        }
    }
    let total = eigenvalues.iter().fold(T::zero(), |a, &b| a + b);
    if total <= T::zero() {
        return Ok(SpectrumResult {
            weights: vec![T::zero(); n],
            eigenvalues,
            entropy_nats: T::zero(),
            degenerate: true,
        });
    }
    let weights: Vec<T> = eigenvalues.iter().map(|&l| l / total).collect();
    let entropy_nats = weights
        .iter()
        .filter(|&&w| w > T::zero())
        .fold(T::zero(), |acc, &w| acc - w * w.ln());
    Ok(SpectrumResult {
        eigenvalues,
        weights,
        entropy_nats,
        degenerate: false,
    })
}

/// Von Neumann entropy of the graph's normalized Laplacian.
pub fn structural_entropy<T: Scalar>(g: &GraphSnapshot) -> Result<SpectrumResult<T>> {
    check_size(g.node_count())?;
    let (a, d) = adjacency_and_degrees::<T>(g);
    von_neumann_entropy(&normalized_laplacian(&a, &d)?)
}

/// Dense similarity matrix `(cos + 1) / 2` over `labels`, zero diagonal, no thresholding.
pub fn semantic_adjacency<T: Scalar, S: AsRef<str>>(
    embeddings: &EmbeddingTable<T>,
    labels: &[S],
) -> Result<DMatrix<T>> {
    check_size(labels.len())?;
    let rows = embeddings.lookup(labels)?;
    let n = rows.len();
    let d = embeddings.dim();
    let mut unit = DMatrix::<T>::zeros(n, d);
    for (i, v) in rows.iter().enumerate() {
        let nv = norm(v);
        if nv <= T::zero() {
            return Err(Error::ZeroNorm(labels[i].as_ref().to_string()));
        }
        for j in 0..d {
            unit[(i, j)] = v[j] / nv;
        }
    }
    let gram = &unit * unit.transpose();
    let half = T::lit(0.5);
    let mut a = DMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            // symmetrize explicitly; the product is symmetric only up to rounding
            let c = clamp_unit(gram[(i, j)]);
            let s = (c + T::one()) * half;
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    Ok(a)
}

/// Entropy of the normalized Laplacian built from a weighted similarity matrix,
/// using weighted degrees.
pub fn semantic_entropy<T: Scalar>(a_sem: &DMatrix<T>) -> Result<SpectrumResult<T>> {
    let n = a_sem.nrows();
    if a_sem.ncols() != n {
        return Err(Error::InvalidInput("semantic adjacency is not square".into()));
    }
    let tol = T::lit(1e3) * T::eps();
    for i in 0..n {
        if a_sem[(i, i)] != T::zero() {
            return Err(Error::InvalidInput(
                "semantic adjacency must have a zero diagonal".into(),
            ));
        }
        for j in 0..n {
            let v = a_sem[(i, j)];
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::InvalidInput(format!(
                    "semantic adjacency entry ({i},{j}) = {v} outside [0,1]"
                )));
            }
            if abs(v - a_sem[(j, i)]) > tol {
                return Err(Error::InvalidInput("semantic adjacency is not symmetric".into()));
            }
        }
    }
    let degrees = DVector::from_iterator(n, a_sem.row_iter().map(|r| r.iter().fold(T::zero(), |acc, &x| acc + x)));
    von_neumann_entropy(&normalized_laplacian(a_sem, &degrees)?)
}

/// `(S_struct - S_sem) / (S_struct + S_sem)`, or `None` when both are zero.
pub fn discovery_parameter<T: Scalar>(s_struct: T, s_sem: T) -> Option<T> {
    let denom = s_struct + s_sem;
    if !(denom > T::zero()) {
        return None;
    }
    let d = (s_struct - s_sem) / denom;
    Some(clamp_unit(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSnapshot;

    fn complete(n: usize) -> GraphSnapshot {
        let labels: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((labels[i].clone(), labels[j].clone()));
            }
        }
        GraphSnapshot::from_parts(0, &labels, &edges).unwrap()
    }

    fn spectrum(g: &GraphSnapshot) -> Vec<f64> {
        let (a, d) = adjacency_and_degrees::<f64>(g);
        let l = normalized_laplacian(&a, &d).unwrap();
        von_neumann_entropy(&l).unwrap().eigenvalues
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn k2_laplacian_and_spectrum() {
        let g = complete(2);
        let (a, d) = adjacency_and_degrees::<f64>(&g);
        let l = normalized_laplacian(&a, &d).unwrap();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        assert!(close(&spectrum(&g), &[0.0, 2.0], 1e-12));
        let s = von_neumann_entropy(&l).unwrap();
        assert_eq!(s.entropy_nats, 0.0);
        assert!(!s.degenerate);
    }

    #[test]
    fn k3_spectrum() {
        assert!(close(&spectrum(&complete(3)), &[0.0, 1.5, 1.5], 1e-12));
        let s = structural_entropy::<f64>(&complete(3)).unwrap();
        assert!((s.entropy_nats - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn isolated_node_block() {
        let g = GraphSnapshot::from_parts(0, &["x", "a", "b"], &[("a", "b")]).unwrap();
        assert!(close(&spectrum(&g), &[0.0, 0.0, 2.0], 1e-12));
    }

    #[test]
    fn star_entropy() {
        let g = GraphSnapshot::from_parts(0, &["c", "a", "b", "d"], &[("c", "a"), ("c", "b"), ("c", "d")]).unwrap();
        let s = structural_entropy::<f64>(&g).unwrap();
        assert!(close(&s.eigenvalues, &[0.0, 1.0, 1.0, 2.0], 1e-12));
        assert!(close(&s.weights, &[0.0, 0.25, 0.25, 0.5], 1e-12));
        assert!((s.entropy_nats - 1.039720770839918).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_is_flagged_zero() {
        let g = GraphSnapshot::from_parts::<&str>(0, &["a", "b", "c"], &[]).unwrap();
        let s = structural_entropy::<f64>(&g).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.entropy_nats, 0.0);
    }

    #[test]
    fn negative_adjacency_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        let d = DVector::from_vec(vec![1.0, 1.0]);
        assert!(normalized_laplacian(&a, &d).is_err());
    }

    #[test]
    fn indefinite_matrix_is_numerical_failure() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(von_neumann_entropy(&m), Err(Error::Numerical(_))));
    }

    #[test]
    fn semantic_adjacency_affine_map() {
        let mut t = EmbeddingTable::<f64>::new(2).unwrap();
        t.insert("a", vec![1.0, 0.0]).unwrap();
        t.insert("a2", vec![2.0, 0.0]).unwrap();
        t.insert("b", vec![0.0, 3.0]).unwrap();
        t.insert("neg", vec![-1.0, 0.0]).unwrap();
        let a = semantic_adjacency(&t, &["a", "a2", "b", "neg"]).unwrap();
        assert!((a[(0, 1)] - 1.0).abs() < 1e-15);
        assert!((a[(0, 2)] - 0.5).abs() < 1e-15);
        assert!(a[(0, 3)].abs() < 1e-15);
        for i in 0..4 {
            assert_eq!(a[(i, i)], 0.0);
        }
        let missing = semantic_adjacency(&t, &["a", "zz", "yy"]).unwrap_err();
        assert!(missing.to_string().contains("zz") && missing.to_string().contains("yy"));
    }

    #[test]
    fn uniform_semantic_weights_match_complete_graph() {
        for n in [3usize, 5, 8] {
            let a = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.37 });
            let s = semantic_entropy(&a).unwrap();
            assert!((s.entropy_nats - ((n - 1) as f64).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn semantic_entropy_validates_input() {
        let bad_diag = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 0.0]);
        assert!(semantic_entropy(&bad_diag).is_err());
        let out_of_range = DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0]);
        assert!(semantic_entropy(&out_of_range).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.2, 0.0]);
        assert!(semantic_entropy(&asym).is_err());
    }

    #[test]
    fn discovery_parameter_boundaries() {
        assert_eq!(discovery_parameter(0.7, 0.7), Some(0.0));
        assert_eq!(discovery_parameter(1.0, 0.0), Some(1.0));
        assert_eq!(discovery_parameter(0.0, 1.0), Some(-1.0));
        assert!((discovery_parameter(0.97f64, 1.03).unwrap() + 0.03).abs() < 1e-12);
        assert_eq!(discovery_parameter(0.0f64, 0.0), None);
    }

    #[test]
    fn too_large_is_rejected() {
        assert!(matches!(check_size(MAX_DENSE_NODES + 1), Err(Error::TooLarge { .. })));
        assert!(check_size(MAX_DENSE_NODES).is_ok());
    }

    #[test]
    fn f32_path_agrees() {
        let s32 = structural_entropy::<f32>(&complete(6)).unwrap();
        assert!((s32.entropy_nats - 5f32.ln()).abs() < 1e-5);
    }
}
