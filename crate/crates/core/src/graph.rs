//! Explicit truncated spidernet lattices.
//!
//! Vertex ids are contiguous and stratum-major: the origin is `0`, stratum
//! `k` occupies `strata[k]`. Vertex `j` of stratum `k` owns the children
//! `c*j .. c*j + c` of stratum `k + 1` (the origin owns all `a` vertices of
//! stratum 1). Lateral edges form a circulant inside every stratum with
//! offsets `±1, ..., ±floor(w0/2)` and, when `w0 = b - 1 - c` is odd, the
//! antipodal offset `|V_k| / 2`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{AddAssign, Mul, Range};

use nalgebra::DMatrix;

use crate::{Error, Result};

/// The integer triple selecting a spidernet `S(a,b,c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpidernetParams {
    a: u32,
    b: u32,
    c: u32,
}

impl SpidernetParams {
    /// `a` is the origin degree, `b` the degree of every other vertex and
    /// `c` the forward fan-out.
    pub fn new(a: u32, b: u32, c: u32) -> Result<Self> {
        let invalid = |reason| Error::InvalidParams { a, b, c, reason };
        if a < 1 {
            return Err(invalid("a >= 1"));
        }
        if b < 2 {
            return Err(invalid("b >= 2"));
        }
        if c < 1 || c > b - 1 {
            return Err(invalid("1 <= c <= b - 1"));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// Number of neighbours a non-origin vertex has inside its own stratum.
    pub fn lateral_degree(&self) -> u32 {
        self.b - 1 - self.c
    }

    /// Every vertex has the same degree when the origin degree matches `b`.
    pub fn is_regular(&self) -> bool {
        self.a == self.b
    }

    /// `|V_k|`, saturating at `u64::MAX`.
    pub fn stratum_size(&self, k: usize) -> u64 {
        if k == 0 {
            return 1;
        }
        let mut size = u64::from(self.a);
        for _ in 1..k {
            size = size.saturating_mul(u64::from(self.c));
        }
        size
    }
}

/// `[|V_0|, ..., |V_depth|] = [1, a, ac, ..., ac^(depth-1)]`.
pub fn stratum_sizes(params: &SpidernetParams, depth: usize) -> Vec<u64> {
    (0..=depth).map(|k| params.stratum_size(k)).collect()
}

/// Which generator drives the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkOperatorKind {
    /// `H = A`.
    Adjacency,
    /// `H = A - D`; `e^{tH}` is stochastic.
    NegativeLaplacian,
}

/// A spidernet truncated after stratum `depth`.
///
/// Vertices of the last stratum have no children; their degree in `D` is the
/// truncated one.
#[derive(Debug, Clone)]
pub struct StratifiedGraph {
    params: SpidernetParams,
    depth: usize,
    strata: Vec<Range<usize>>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

/// Builds `S(a,b,c)` out to stratum `depth`.
pub fn build(params: SpidernetParams, depth: usize) -> Result<StratifiedGraph> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be at least 1"));
    }
    let lateral = params.lateral_degree();
    let sizes = stratum_sizes(&params, depth);
    if lateral > 0 {
        for &size in &sizes[1..] {
            let odd_needs_even = lateral % 2 == 1 && size % 2 == 1;
            if u64::from(lateral) >= size || odd_needs_even {
                return Err(Error::UnrealizableInStratumDegree {
                    lateral,
                    stratum_size: size,
                });
            }
        }
    }
    let total = sizes
        .iter()
        .try_fold(0u64, |acc, &s| acc.checked_add(s))
        .filter(|&n| n <= u64::from(u32::MAX))
        .ok_or(Error::InvalidArgument(
            "vertex count does not fit 32-bit ids",
        ))? as usize;

    let mut strata = Vec::with_capacity(depth + 1);
    let mut start = 0usize;
    for &size in &sizes {
        strata.push(start..start + size as usize);
        start += size as usize;
    }

    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut link = |u: usize, v: usize| {
        adjacency[u].push(v as u32);
        adjacency[v].push(u as u32);
    };
    for child in strata[1].clone() {
        link(0, child);
    }
    let fan_out = params.c() as usize;
    for k in 1..depth {
        let (here, next) = (strata[k].clone(), strata[k + 1].start);
        for (j, v) in here.enumerate() {
            for i in 0..fan_out {
                link(v, next + fan_out * j + i);
            }
        }
    }
    if lateral > 0 {
        for range in &strata[1..] {
            let n = range.len();
            for j in 0..n {
                for offset in 1..=(lateral / 2) as usize {
                    link(range.start + j, range.start + (j + offset) % n);
                }
                if lateral % 2 == 1 && j < n / 2 {
                    link(range.start + j, range.start + j + n / 2);
                }
            }
        }
    }

    let mut offsets = Vec::with_capacity(total + 1);
    let mut neighbors = Vec::new();
    offsets.push(0);
    for mut list in adjacency {
        list.sort_unstable();
        neighbors.extend_from_slice(&list);
        offsets.push(neighbors.len());
    }
    Ok(StratifiedGraph {
        params,
        depth,
        strata,
        offsets,
        neighbors,
    })
}

impl StratifiedGraph {
    pub fn params(&self) -> &SpidernetParams {
        &self.params
    }

    /// Index of the last constructed stratum.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Id range of stratum `k`.
    pub fn stratum(&self, k: usize) -> Range<usize> {
        self.strata[k].clone()
    }

    pub fn strata(&self) -> &[Range<usize>] {
        &self.strata
    }

    /// Vertices whose children were not constructed.
    pub fn boundary(&self) -> Range<usize> {
        self.stratum(self.depth)
    }

    pub fn stratum_of(&self, v: usize) -> usize {
        self.strata.partition_point(|r| r.end <= v)
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// `(w_-, w_0, w_+)` of `v` with respect to the construction's stratum labels.
    pub fn degree_census(&self, v: usize) -> (usize, usize, usize) {
        let k = self.stratum_of(v);
        let mut census = (0, 0, 0);
        for &u in self.neighbors(v) {
            match self.stratum_of(u as usize) {
                s if s + 1 == k => census.0 += 1,
                s if s == k => census.1 += 1,
                _ => census.2 += 1,
            }
        }
        census
    }

    /// Edges as `(u, v)` with `u < v`, ordered by `u` then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Breadth-first distance of every vertex from the origin.
    pub fn bfs_distances(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[0] = 0;
        queue.push_back(0usize);
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                let v = v as usize;
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Dense `A` or `A - D`.
    pub fn operator_matrix(&self, kind: WalkOperatorKind) -> DMatrix<f64> {
        let n = self.vertex_count();
        let mut m = DMatrix::zeros(n, n);
        for u in 0..n {
            for &v in self.neighbors(u) {
                m[(u, v as usize)] = 1.0;
            }
            if kind == WalkOperatorKind::NegativeLaplacian {
                m[(u, u)] = -(self.degree(u) as f64);
            }
        }
        m
    }

    /// `out = H x` without forming `H`.
    pub fn apply<T>(&self, kind: WalkOperatorKind, x: &[T], out: &mut [T])
    where
        T: Copy + AddAssign + Mul<f64, Output = T>,
    {
        for (u, slot) in out.iter_mut().enumerate() {
            let row = self.neighbors(u);
            let mut acc = match kind {
                WalkOperatorKind::Adjacency => x[u] * 0.0,
                WalkOperatorKind::NegativeLaplacian => x[u] * -(row.len() as f64),
            };
            for &v in row {
                acc += x[v as usize];
            }
            *slot = acc;
        }
    }

    /// Upper bound on the spectral radius of `H` (maximum absolute row sum).
    pub fn operator_norm_bound(&self, kind: WalkOperatorKind) -> f64 {
        let d = self.max_degree() as f64;
        match kind {
            WalkOperatorKind::Adjacency => d,
            WalkOperatorKind::NegativeLaplacian => 2.0 * d,
        }
    }
}
