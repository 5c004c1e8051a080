//! Seeded generators for the two experiment families: dense random stable
//! systems and positive networked systems on random strongly connected
//! digraphs.
//!
//! Everything is a pure function of the spec (including its seed). The
//! stream is a ChaCha12 generator seeded with `seed_from_u64`, and draws
//! happen in the documented order, so instances reproduce bit-for-bit
//! across runs and platforms.

use std::collections::HashSet;

use faer::Mat;
use faer::linalg::solvers::Solve;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ss::TwoOutputPlant;

/// Dense random stable system family: n_x states, n_x/5 inputs and n_x/5
/// outputs per channel, all data matrices standard normal, A = T⁻¹ΛT with
/// normal T and real poles drawn uniformly from `pole_range`.
#[derive(Debug, Clone)]
pub struct RandomSystemSpec {
    pub n_x: usize,
    pub seed: u64,
    pub pole_range: (f64, f64),
}

impl RandomSystemSpec {
    pub fn new(n_x: usize, seed: u64) -> Self {
        RandomSystemSpec {
            n_x,
            seed,
            pole_range: (-1.5, -0.5),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_x < 5 || !self.n_x.is_multiple_of(5) {
            return Err(Error::GenerationFailed(format!(
                "n_x must be a positive multiple of 5, got {}",
                self.n_x
            )));
        }
        if !(self.pole_range.0 < self.pole_range.1 && self.pole_range.1 < 0.0) {
            return Err(Error::GenerationFailed(format!(
                "pole range must be a strictly negative interval, got {:?}",
                self.pole_range
            )));
        }
        Ok(())
    }
}

/// Row-major standard-normal draw; the explicit buffer fixes the stream
/// order independently of matrix storage.
fn draw_normal(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> Mat<f64> {
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    Mat::from_fn(rows, cols, |i, j| data[i * cols + j])
}

const MAX_CONDITION: f64 = 1e6;
const MAX_REDRAWS: usize = 100;

pub fn random_stable_plant(spec: &RandomSystemSpec) -> Result<TwoOutputPlant> {
    spec.validate()?;
    let n = spec.n_x;
    let m = n / 5;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);

    let b = draw_normal(&mut rng, n, m);
    let cp = draw_normal(&mut rng, m, n);
    let dp = draw_normal(&mut rng, m, m);
    let cr = draw_normal(&mut rng, m, n);
    let dr = draw_normal(&mut rng, m, m);

    let mut t = None;
    for _ in 0..MAX_REDRAWS {
        let candidate = draw_normal(&mut rng, n, n);
        let svd = candidate.svd().map_err(|_| Error::EigenFailure)?;
        let s = svd.S();
        let (smax, smin) = (s[0], s[n - 1]);
        if smin > 0.0 && smax / smin <= MAX_CONDITION {
            t = Some(candidate);
            break;
        }
    }
    let t = t.ok_or_else(|| {
        Error::GenerationFailed(format!(
            "no similarity transform with condition <= {MAX_CONDITION:.0e} in {MAX_REDRAWS} draws"
        ))
    })?;

    let poles: Vec<f64> = (0..n)
        .map(|_| rng.random_range(spec.pole_range.0..spec.pole_range.1))
        .collect();
    // A = T⁻¹ (Λ T)
    let lam_t = Mat::from_fn(n, n, |i, j| poles[i] * t[(i, j)]);
    let a = t.partial_piv_lu().solve(&lam_t);

    TwoOutputPlant::new(a, b, cp, dp, cr, dr)
}

/// Positive networked system family: A = -(L + I) for the in-degree
/// Laplacian L of a random strongly connected weighted digraph, inputs on
/// every node (B = I), performance output the sum of all states, residual
/// outputs a random 2% subset of the nodes.
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub seed: u64,
    pub weight_range: (f64, f64),
    pub residual_fraction: f64,
}

impl NetworkSpec {
    pub fn new(n_nodes: usize, seed: u64) -> Self {
        NetworkSpec {
            n_nodes,
            n_edges: n_nodes,
            seed,
            weight_range: (0.8, 1.2),
            residual_fraction: 0.02,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_nodes;
        if n < 50 {
            return Err(Error::GenerationFailed(format!(
                "network needs at least 50 nodes for a nonempty residual set, got {n}"
            )));
        }
        if self.n_edges < 1 || self.n_edges > n * (n - 1) {
            return Err(Error::GenerationFailed(format!(
                "edge count {} out of range 1..={}",
                self.n_edges,
                n * (n - 1)
            )));
        }
        if !(self.weight_range.0 > 0.0 && self.weight_range.0 < self.weight_range.1) {
            return Err(Error::GenerationFailed(format!(
                "weight range must be a positive interval, got {:?}",
                self.weight_range
            )));
        }
        if !(self.residual_fraction > 0.0 && self.residual_fraction <= 1.0) {
            return Err(Error::GenerationFailed(format!(
                "residual fraction must lie in (0, 1], got {}",
                self.residual_fraction
            )));
        }
        Ok(())
    }
}

/// Strongly connected components by iterative Tarjan; returned in discovery
/// order, each sorted ascending.
fn strongly_connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut comps: Vec<Vec<usize>> = Vec::new();
    // (node, next child position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut child)) = call.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == UNSET {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

const MAX_STITCH_PASSES: usize = 16;

pub fn networked_plant(spec: &NetworkSpec) -> Result<TwoOutputPlant> {
    spec.validate()?;
    let n = spec.n_nodes;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);

    // 1. distinct directed edges, uniform over ordered pairs
    let mut edge_set: HashSet<(usize, usize)> = HashSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(spec.n_edges);
    while edges.len() < spec.n_edges {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && edge_set.insert((u, v)) {
            edges.push((u, v));
        }
    }

    // 2. stitch the strongly connected components into a cycle
    let mut pass = 0;
    loop {
        let comps = strongly_connected_components(n, &edges);
        if comps.len() == 1 {
            break;
        }
        pass += 1;
        if pass > MAX_STITCH_PASSES {
            return Err(Error::GenerationFailed(
                "component stitching did not reach strong connectivity".into(),
            ));
        }
        let k = comps.len();
        for c in 0..k {
            let src = comps[c][rng.random_range(0..comps[c].len())];
            let nxt = &comps[(c + 1) % k];
            let dst = nxt[rng.random_range(0..nxt.len())];
            if src != dst && edge_set.insert((src, dst)) {
                edges.push((src, dst));
            }
        }
    }

    // 3. weights in insertion order
    let weights: Vec<f64> = edges
        .iter()
        .map(|_| rng.random_range(spec.weight_range.0..spec.weight_range.1))
        .collect();

    // 4-5. A = -(L + I) for the in-degree Laplacian L = D_in - W
    let mut a = Mat::<f64>::zeros(n, n);
    for (&(src, dst), &w) in edges.iter().zip(weights.iter()) {
        // weighted edge src → dst feeds state dst
        a[(dst, src)] += w;
        a[(dst, dst)] -= w;
    }
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }

    // 6. performance: sum of all states
    let cp = Mat::from_fn(1, n, |_, _| 1.0);
    let dp = Mat::zeros(1, n);

    // 7. residual: d distinct nodes without replacement
    let d = ((spec.residual_fraction * n as f64).round() as usize).max(1);
    let mut idx: Vec<usize> = (0..n).collect();
    for k in 0..d {
        let j = k + rng.random_range(0..n - k);
        idx.swap(k, j);
    }
    let cr = Mat::from_fn(d, n, |row, col| if idx[row] == col { 1.0 } else { 0.0 });
    let dr = Mat::zeros(d, n);

    TwoOutputPlant::new(a, Mat::<f64>::identity(n, n), cp, dp, cr, dr)
}
