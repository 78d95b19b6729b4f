//! Random forest of CART trees with Gini splits, bootstrap rows and a random
//! feature subset per split. Also used as the stacking combiner.

use ndarray::ArrayView2;
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub trees: usize,
    /// Nodes with fewer rows than this are leaves.
    pub min_split: usize,
    /// Features tried per split; `None` means `floor(sqrt(p))`.
    pub mtry: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            min_split: 2,
            mtry: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Leaf { vote: bool },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn vote(&self, row: ndarray::ArrayView1<f64>) -> bool {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { vote } => return vote,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<Tree>,
}

struct Builder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [u8],
    mtry: usize,
    min_split: usize,
    nodes: Vec<Node>,
    // scratch: (value, label) pairs of the node under evaluation
    scratch: Vec<(f64, u8)>,
}

impl Builder<'_> {
    fn grow(&mut self, rows: &mut [usize], rng: &mut ChaCha8Rng) -> usize {
        let id = self.nodes.len();
        let n1 = rows.iter().filter(|&&r| self.y[r] == 1).count();
        let n = rows.len();
        let majority = Node::Leaf { vote: 2 * n1 > n };
        self.nodes.push(majority);
        if n1 == 0 || n1 == n || n < self.min_split {
            return id;
        }

        let p = self.x.ncols();
        let parent_gini = gini(n1, n);
        let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, decrease)
        for feature in index::sample(rng, p, self.mtry.min(p)) {
            self.scratch.clear();
            self.scratch.extend(rows.iter().map(|&r| (self.x[[r, feature]], self.y[r])));
            self.scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left1 = 0usize;
            for k in 0..n - 1 {
                left1 += usize::from(self.scratch[k].1);
                let (v, next) = (self.scratch[k].0, self.scratch[k + 1].0);
                if next <= v {
                    continue;
                }
                let nl = k + 1;
                let nr = n - nl;
                let child = (nl as f64 * gini(left1, nl) + nr as f64 * gini(n1 - left1, nr)) / n as f64;
                let decrease = parent_gini - child;
                if best.is_none_or(|(_, _, d)| decrease > d) {
                    best = Some((feature, 0.5 * (v + next), decrease));
                }
            }
        }
        let Some((feature, threshold, _)) = best else {
            return id;
        };

        let mut split = 0;
        for k in 0..n {
            if self.x[[rows[k], feature]] <= threshold {
                rows.swap(k, split);
                split += 1;
            }
        }
        let (left_rows, right_rows) = rows.split_at_mut(split);
        let left = self.grow(left_rows, rng);
        let right = self.grow(right_rows, rng);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }
}

fn gini(n1: usize, n: usize) -> f64 {
    let q = n1 as f64 / n as f64;
    2.0 * q * (1.0 - q)
}

impl RandomForest {
    pub fn fit(x: ArrayView2<f64>, y: &[u8], params: &ForestParams, stream: &RngStream) -> Self {
        let n = x.nrows();
        let p = x.ncols();
        let mtry = params
            .mtry
            .unwrap_or_else(|| (p as f64).sqrt().floor() as usize)
            .clamp(1, p.max(1));
        let trees = (0..params.trees)
            .map(|t| {
                let mut rng = stream.child(t as u64).rng();
                let mut rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let mut builder = Builder {
                    x,
                    y,
                    mtry,
                    min_split: params.min_split.max(2),
                    nodes: Vec::new(),
                    scratch: Vec::with_capacity(n),
                };
                builder.grow(&mut rows, &mut rng);
                Tree { nodes: builder.nodes }
            })
            .collect();
        RandomForest { trees }
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Fraction of trees voting for class 1.
    pub fn score(&self, x: ArrayView2<f64>) -> Vec<f64> {
        let total = self.trees.len().max(1) as f64;
        x.rows()
            .into_iter()
            .map(|row| self.trees.iter().filter(|t| t.vote(row)).count() as f64 / total)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::auc;
    use ndarray::Array2;
    use rand_distr::StandardNormal;

    #[test]
    fn interpolates_separable_training_data() {
        let mut rng = RngStream::new(2).rng();
        let y: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
        let x = Array2::from_shape_fn((20, 2), |(i, _)| {
            let shift = if y[i] == 1 { 4.0 } else { 0.0 };
            shift + rng.sample::<f64, _>(StandardNormal) * 0.5
        });
        let forest = RandomForest::fit(x.view(), &y, &ForestParams::default(), &RngStream::new(3));
        assert_eq!(auc(&forest.score(x.view()), &y).unwrap(), 1.0);
    }

    #[test]
    fn votes_are_multiples_of_one_over_trees() {
        let x = Array2::from_shape_fn((30, 3), |(i, j)| ((i * 7 + j * 3) % 10) as f64);
        let y: Vec<u8> = (0..30).map(|i| (i % 3 == 0) as u8).collect();
        let params = ForestParams { trees: 7, ..Default::default() };
        let forest = RandomForest::fit(x.view(), &y, &params, &RngStream::new(1));
        for s in forest.score(x.view()) {
            assert!((0.0..=1.0).contains(&s));
            assert!((s * 7.0 - (s * 7.0).round()).abs() < 1e-12);
        }
    }
}
