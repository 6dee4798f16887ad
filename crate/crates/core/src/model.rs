//! Domain types shared by every stage of the pipeline, plus the degree and
//! Laplacian constructions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fusion::FusionWeights;
use crate::par;

/// A set of `n` feature vectors of dimension `d`, optionally labelled.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    /// Row-major `n * d` feature values.
    features: Vec<f64>,
    labels: Option<Vec<usize>>,
    label_names: Option<Vec<String>>,
    ids: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from row vectors.
    pub fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::InvalidInput(format!(
                "row {i} has {} features, expected {d}",
                r.len()
            )));
        }
        Self::from_flat(n, d, rows.into_iter().flatten().collect(), labels)
    }

    /// Builds a dataset from a row-major buffer.
    pub fn from_flat(n: usize, d: usize, features: Vec<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 samples, got {n}")));
        }
        if d == 0 {
            return Err(Error::InvalidInput("feature dimension must be at least 1".into()));
        }
        if features.len() != n * d {
            return Err(Error::InvalidInput(format!(
                "feature buffer has {} values, expected {}",
                features.len(),
                n * d
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite feature at sample {}, column {}",
                pos / d,
                pos % d
            )));
        }
        if let Some(l) = &labels {
            validate_labels(l, n)?;
        }
        Ok(Self { n, d, features, labels, label_names: None, ids: None })
    }

    /// Attaches human-readable names for label indices.
    pub fn with_label_names(mut self, names: Vec<String>) -> Result<Self> {
        match self.num_classes() {
            Some(c) if c == names.len() => {
                self.label_names = Some(names);
                Ok(self)
            }
            _ => Err(Error::InvalidInput("label names do not match label count".into())),
        }
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::InvalidInput(format!("{} ids for {} samples", ids.len(), self.n)));
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn label_names(&self) -> Option<&[String]> {
        self.label_names.as_deref()
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    /// Number of ground-truth clusters, when labels are present.
    pub fn num_classes(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    /// Returns a copy with replaced features, keeping labels, names and ids.
    pub fn with_features(&self, features: Vec<f64>) -> Result<Self> {
        let mut out = Self::from_flat(self.n, self.d, features, self.labels.clone())?;
        out.label_names = self.label_names.clone();
        out.ids = self.ids.clone();
        Ok(out)
    }
}

fn validate_labels(labels: &[usize], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::InvalidInput(format!("{} labels for {n} samples", labels.len())));
    }
    let c = labels.iter().max().map_or(0, |m| m + 1);
    let mut seen = vec![false; c];
    for &l in labels {
        seen[l] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidInput(format!("cluster index {missing} never occurs in labels")));
    }
    Ok(())
}

/// Dense symmetric matrix with finite entries.
///
/// Symmetry is exact: every constructor either mirrors one triangle or
/// replaces the input with `(M + Mᵀ) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    m: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Validates and symmetrizes an arbitrary square matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let n = m.nrows();
        let mut out = m;
        for j in 0..n {
            for i in 0..j {
                let avg = (out[(i, j)] + out[(j, i)]) / 2.0;
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        Ok(Self { m: out })
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle (`i <= j`) and
    /// mirrored. Rows are evaluated in parallel.
    pub fn from_upper_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let rows = par::map_range(n, |i| (i..n).map(|j| f(i, j)).collect::<Vec<_>>());
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                let j = i + off;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self { m })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        Self { m: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.m
    }

    /// Row `i` (equal to column `i`), as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.m.as_slice()[i * n..(i + 1) * n]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Largest `|m[i][j] - m[j][i]|`; zero for every matrix built here.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..j {
                worst = worst.max((self.m[(i, j)] - self.m[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn min_entry(&self) -> f64 {
        self.m.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.m * c)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: f64) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Self::new(&self.m + &other.m * c)
    }
}

/// Sparse representation of a vertex-by-hyperedge incidence matrix.
///
/// Each hyperedge stores its member vertices together with the incidence
/// value `h(v, e)` of each member; non-members are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergraphIncidence {
    vertices: usize,
    edges: Vec<Vec<usize>>,
    values: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl HypergraphIncidence {
    pub fn new(vertices: usize, edges: Vec<Vec<usize>>, values: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() || edges.len() != weights.len() {
            return Err(Error::InvalidInput("hyperedge, incidence and weight counts differ".into()));
        }
        for (l, (members, vals)) in edges.iter().zip(&values).enumerate() {
            if members.len() != vals.len() {
                return Err(Error::InvalidInput(format!("hyperedge {l}: member/value length mismatch")));
            }
            if members.iter().any(|&v| v >= vertices) {
                return Err(Error::InvalidInput(format!("hyperedge {l} references a missing vertex")));
            }
            let mut sorted = members.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != members.len() {
                return Err(Error::InvalidInput(format!("hyperedge {l} repeats a vertex")));
            }
            if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidInput(format!("hyperedge {l} has an invalid incidence value")));
            }
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput("hyperedge weights must be finite and nonnegative".into()));
        }
        Ok(Self { vertices, edges, values, weights })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn members(&self, l: usize) -> &[usize] {
        &self.edges[l]
    }

    pub fn edge_values(&self, l: usize) -> &[f64] {
        &self.values[l]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `h(v_i, e_l)`.
    pub fn incidence(&self, i: usize, l: usize) -> f64 {
        self.edges[l].iter().position(|&v| v == i).map_or(0.0, |p| self.values[l][p])
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.vertices, self.edges.len());
        for (l, (members, vals)) in self.edges.iter().zip(&self.values).enumerate() {
            for (&v, &x) in members.iter().zip(vals) {
                h[(v, l)] = x;
            }
        }
        h
    }

    /// `H Σ Hᵀ` accumulated hyperedge by hyperedge.
    pub fn weighted_gram(&self) -> Result<SymmetricMatrix> {
        let n = self.vertices;
        let mut g = DMatrix::zeros(n, n);
        for ((members, vals), &w) in self.edges.iter().zip(&self.values).zip(&self.weights) {
            for (a, (&va, &ha)) in members.iter().zip(vals).enumerate() {
                g[(va, va)] += w * ha * ha;
                for (&vb, &hb) in members[a + 1..].iter().zip(&vals[a + 1..]) {
                    let x = w * ha * hb;
                    g[(va, vb)] += x;
                    g[(vb, va)] += x;
                }
            }
        }
        SymmetricMatrix::new(g)
    }

    /// Per-vertex `Σ_l w_l h(v_i, e_l)²`.
    pub fn vertex_normalizations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.vertices];
        for ((members, vals), &w) in self.edges.iter().zip(&self.values).zip(&self.weights) {
            for (&v, &h) in members.iter().zip(vals) {
                out[v] += w * h * h;
            }
        }
        out
    }

    /// Number of hyperedges containing each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.vertices];
        for members in &self.edges {
            for &v in members {
                out[v] += 1;
            }
        }
        out
    }
}

/// Which orthogonality constraint a continuous candidate satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// `PᵀP = I`
    Orthonormal,
    /// `ZᵀDZ = I`
    DegreeOrthonormal,
}

/// A continuous `N × K` relaxed partition together with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCandidate {
    pub p: DMatrix<f64>,
    /// Trace ratio for the DHPC relaxation, or `tr(ZᵀSZ)/K` for the
    /// normalized-cut relaxation.
    pub rho: f64,
    pub iterations: usize,
    pub constraint: Constraint,
}

impl PartitionCandidate {
    /// Largest element-wise deviation of `PᵀP` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.p.tr_mul(&self.p);
        let k = g.nrows();
        let mut worst = 0.0f64;
        for j in 0..k {
            for i in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// A hard assignment of every vertex to one of `k` clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn from_labels(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidInput(format!("label {bad} out of range for {k} clusters")));
        }
        Ok(Self { labels, k })
    }

    /// Relabels clusters in order of first appearance; empty clusters keep the
    /// highest indices.
    pub fn canonicalized(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Self { labels, k: self.k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn num_clusters(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn has_empty_cluster(&self) -> bool {
        self.cluster_sizes().contains(&0)
    }

    /// Members of each cluster, in ascending vertex order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// The binary `N × K` indicator matrix `X`.
    pub fn indicator(&self) -> DMatrix<f64> {
        let mut x = DMatrix::zeros(self.labels.len(), self.k);
        for (i, &l) in self.labels.iter().enumerate() {
            x[(i, l)] = 1.0;
        }
        x
    }

    /// `X (XᵀX)^{-1/2}`, which has orthonormal columns when no cluster is empty.
    pub fn scaled_indicator(&self) -> Result<DMatrix<f64>> {
        let sizes = self.cluster_sizes();
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidInput(format!("cluster {c} is empty")));
        }
        let mut x = DMatrix::zeros(self.labels.len(), self.k);
        for (i, &l) in self.labels.iter().enumerate() {
            x[(i, l)] = 1.0 / (sizes[l] as f64).sqrt();
        }
        Ok(x)
    }
}

/// How the Gaussian kernel scale is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaChoice {
    Fixed(f64),
    /// 1-based index `λ` into the data-driven grid.
    GridIndex(usize),
}

impl Default for SigmaChoice {
    fn default() -> Self {
        SigmaChoice::GridIndex(crate::pairwise::DEFAULT_GRID_INDEX)
    }
}

/// Every tunable of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    pub sigma: SigmaChoice,
    /// kNN hyperedge neighbourhood size.
    pub k: usize,
    pub weights: FusionWeights,
    /// Desired cluster count.
    pub kappa: usize,
    /// Communities per over-clustering method; `None` means `2 * kappa`.
    pub communities_per_method: Option<usize>,
    pub neighbor_set_size: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl HyperParams {
    pub fn new(kappa: usize) -> Self {
        Self {
            sigma: SigmaChoice::default(),
            k: 3,
            weights: FusionWeights::default(),
            kappa,
            communities_per_method: None,
            neighbor_set_size: 3,
            epsilon: 1e-6,
            seed: 0,
        }
    }

    pub fn communities(&self) -> usize {
        self.communities_per_method.unwrap_or(2 * self.kappa)
    }

    /// Checks the parameters against a dataset of `n` samples.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let SigmaChoice::Fixed(s) = self.sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidParameter(format!("sigma must be positive, got {s}")));
            }
        }
        if let SigmaChoice::GridIndex(l) = self.sigma {
            if l == 0 {
                return Err(Error::InvalidParameter("sigma grid index is 1-based".into()));
            }
        }
        if self.k == 0 || self.k >= n {
            return Err(Error::InvalidParameter(format!("k must be in [1, {n}), got {}", self.k)));
        }
        if self.kappa < 2 || self.kappa > n {
            return Err(Error::InvalidParameter(format!("kappa must be in [2, {n}], got {}", self.kappa)));
        }
        let c = self.communities();
        if c == 0 || c > n {
            return Err(Error::InvalidParameter(format!("communities per method must be in [1, {n}], got {c}")));
        }
        if self.neighbor_set_size == 0 {
            return Err(Error::InvalidParameter("neighbor set size must be at least 1".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        FusionWeights::new(self.weights.alpha(), self.weights.beta()).map(|_| ())
    }
}

/// Diagonal degree matrix `D` with `D[m][m] = Σ_j S[m][j]`.
pub fn degree_matrix(s: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    SymmetricMatrix::from_diagonal(&degrees(s)?)
}

/// Row sums of `s`.
pub fn degrees(s: &SymmetricMatrix) -> Result<Vec<f64>> {
    let d: Vec<f64> = (0..s.dim()).map(|i| s.row(i).iter().sum()).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("degree overflow".into()));
    }
    Ok(d)
}

/// Graph Laplacian `Q = D - S`.
pub fn laplacian(s: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let d = degrees(s)?;
    let mut q = -s.as_matrix().clone();
    for (i, di) in d.into_iter().enumerate() {
        q[(i, i)] += di;
    }
    SymmetricMatrix::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>());
        SymmetricMatrix::new(&m + m.transpose()).unwrap()
    }

    #[test]
    fn degree_of_identity_is_identity() {
        let d = degree_matrix(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(d, SymmetricMatrix::identity(3));
    }

    #[test]
    fn degree_and_laplacian_of_ones() {
        let s = SymmetricMatrix::new(DMatrix::from_element(2, 2, 1.0)).unwrap();
        assert_eq!(degree_matrix(&s).unwrap().diagonal(), vec![2.0, 2.0]);
        let q = laplacian(&s).unwrap();
        assert_eq!(q.as_matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn laplacian_of_identity_is_zero() {
        let q = laplacian(&SymmetricMatrix::identity(3)).unwrap();
        assert!(q.as_matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn degree_matches_elementwise_loop() {
        let s = random_sym(5, 7);
        let d = degree_matrix(&s).unwrap();
        for i in 0..5 {
            let mut acc = 0.0;
            for j in 0..5 {
                acc += s.get(i, j);
            }
            assert!((d.get(i, i) - acc).abs() < 1e-12);
            for j in 0..5 {
                if i != j {
                    assert_eq!(d.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn laplacian_is_psd_and_annihilates_ones() {
        for seed in 0..10 {
            let s = random_sym(12, seed);
            let q = laplacian(&s).unwrap();
            let ones = nalgebra::DVector::from_element(12, 1.0);
            assert!((q.as_matrix() * &ones).amax() < 1e-10);
            let eig = nalgebra::SymmetricEigen::new(q.as_matrix().clone());
            assert!(eig.eigenvalues.min() >= -1e-10);
        }
    }

    #[test]
    fn laplacian_is_linear() {
        let (s1, s2) = (random_sym(6, 1), random_sym(6, 2));
        let (a, b) = (0.3, 1.7);
        let combo = SymmetricMatrix::new(s1.as_matrix() * a + s2.as_matrix() * b).unwrap();
        let lhs = laplacian(&combo).unwrap();
        let rhs = laplacian(&s1).unwrap().as_matrix() * a + laplacian(&s2).unwrap().as_matrix() * b;
        assert!((lhs.as_matrix() - rhs).amax() < 1e-10);
    }

    #[test]
    fn construction_symmetrizes_exactly() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1 + 0.2, 0.3, 2.0]);
        let s = SymmetricMatrix::new(m).unwrap();
        assert_eq!(s.max_asymmetry(), 0.0);
        assert!(SymmetricMatrix::new(DMatrix::from_element(2, 2, f64::NAN)).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![vec![1.0]], None).is_err());
        assert!(Dataset::new(vec![vec![1.0], vec![f64::INFINITY]], None).is_err());
        assert!(Dataset::new(vec![vec![1.0], vec![2.0, 3.0]], None).is_err());
        // label 1 missing
        assert!(Dataset::new(vec![vec![1.0], vec![2.0]], Some(vec![0, 2])).is_err());
        let ds = Dataset::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]], Some(vec![1, 0])).unwrap();
        assert_eq!(ds.num_classes(), Some(2));
        assert_eq!(ds.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn partition_indicator_rows_sum_to_one() {
        let p = Partition::from_labels(vec![2, 0, 2, 1], 3).unwrap();
        let x = p.indicator();
        for i in 0..4 {
            assert_eq!(x.row(i).sum(), 1.0);
        }
        let g = x.tr_mul(&x);
        assert_eq!(g, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 2.0])));
        assert_eq!(p.canonicalized().labels(), &[0, 1, 0, 2]);
        let pn = p.scaled_indicator().unwrap();
        assert!((pn.tr_mul(&pn) - DMatrix::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn incidence_rejects_negative_values() {
        assert!(HypergraphIncidence::new(2, vec![vec![0, 1]], vec![vec![1.0, -1.0]], vec![1.0]).is_err());
        assert!(HypergraphIncidence::new(2, vec![vec![0, 0]], vec![vec![1.0, 1.0]], vec![1.0]).is_err());
    }
}
