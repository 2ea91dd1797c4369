//! Exact best-subset search and model selection.
//!
//! The branch-and-bound engine works on a reduced problem. One Householder
//! QR of `[forced | free | y]` yields a `(q+1)×(q+1)` triangle `R` for the
//! free columns and the response, after the forced columns (the constant)
//! are projected out. Every subset RSS is then a property of `R` alone.
//!
//! A search node owns the triangle for its current column set `F ∪ U`
//! (forced-in terms plus undecided terms). Its RSS is a lower bound for every
//! completion, since dropping columns never lowers the RSS. Branching on an
//! undecided term `v` spawns the child without `v` (one Givens sweep removes
//! the column from the triangle) and continues with `v` forced in. A node is
//! cut when its bound exceeds the current best RSS at every size still
//! reachable from it.

use serde::{Deserialize, Serialize};

use crate::criteria::{compare_candidates, profile_score, Criterion};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{column_rank, least_squares_fit, FitSummary};
use crate::model_space::{Family, FamilyKind, InterceptPolicy, ModelSpec};

/// Largest free-term count handled by the exhaustive fallback for
/// rank-deficient designs.
pub const MAX_EXHAUSTIVE_TERMS: usize = 20;

const PRUNE_RTOL: f64 = 1e-12;
const RECORD_TIE_RTOL: f64 = 1e-12;

/// Champion of one subset size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBest {
    pub size: usize,
    pub model: ModelSpec,
    pub rss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    BranchAndBound,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub method: SearchMethod,
    /// Subsets whose RSS was evaluated.
    pub nodes: u64,
    /// Nodes cut by the bound.
    pub pruned: u64,
    /// Number of non-empty subsets, i.e. the cost of plain enumeration.
    pub exhaustive: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSubsets {
    /// Champions for sizes `1..=q` in increasing size.
    pub per_size: Vec<SizeBest>,
    pub stats: SearchStats,
}

/// Public view of a branch-and-bound node; masks are over free-term positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchNode {
    pub forced_in: u64,
    pub forced_out: u64,
    /// RSS of the model holding every forced-in and undecided term.
    pub bound_rss: f64,
}

struct Node {
    /// Free-term positions in triangle column order.
    cols: Vec<usize>,
    /// Row-major `(k+1)×(k+1)` upper triangle, response last.
    r: Vec<f64>,
    forced: u64,
    rss: f64,
}

impl Node {
    fn dim(&self) -> usize {
        self.cols.len() + 1
    }

    fn mask(&self) -> u64 {
        self.cols.iter().fold(0, |m, &c| m | 1 << c)
    }

    /// Removes the column at `pos` and restores triangular form.
    fn drop_column(&self, pos: usize) -> Node {
        let m = self.dim();
        let w = m - 1;
        // m rows × w columns, column `pos` removed.
        let mut h = vec![0.0; m * w];
        for i in 0..m {
            let mut jj = 0;
            for j in 0..m {
                if j == pos {
                    continue;
                }
                h[i * w + jj] = self.r[i * m + j];
                jj += 1;
            }
        }
        for j in pos..w {
            let a = h[j * w + j];
            let b = h[(j + 1) * w + j];
            if b == 0.0 {
                continue;
            }
            let rho = a.hypot(b);
            let (c, s) = (a / rho, b / rho);
            for col in j..w {
                let t1 = h[j * w + col];
                let t2 = h[(j + 1) * w + col];
                h[j * w + col] = c * t1 + s * t2;
                h[(j + 1) * w + col] = -s * t1 + c * t2;
            }
        }
        h.truncate(w * w);
        let last = h[w * w - 1];
        let mut cols = self.cols.clone();
        cols.remove(pos);
        Node {
            cols,
            r: h,
            forced: self.forced,
            rss: last * last,
        }
    }

    /// Position of the undecided term whose removal raises the RSS most.
    fn steepest_free(&self) -> Option<usize> {
        let k = self.cols.len();
        let m = self.dim();
        let free: Vec<usize> = (0..k)
            .filter(|&p| self.forced >> self.cols[p] & 1 == 0)
            .collect();
        if free.len() <= 1 {
            return free.first().copied();
        }
        let r = |i: usize, j: usize| self.r[i * m + j];
        let mut rinv = vec![0.0; k * k];
        for j in 0..k {
            rinv[j * k + j] = 1.0 / r(j, j);
            for i in (0..j).rev() {
                let mut s = 0.0;
                for l in i + 1..=j {
                    s += r(i, l) * rinv[l * k + j];
                }
                rinv[i * k + j] = -s / r(i, i);
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for &p in &free {
            let row = &rinv[p * k..(p + 1) * k];
            let coef: f64 = (p..k).map(|j| row[j] * r(j, k)).sum();
            let scale: f64 = row[p..].iter().map(|v| v * v).sum();
            let inc = coef * coef / scale;
            if !inc.is_finite() {
                return free.first().copied();
            }
            if best.is_none_or(|(_, b)| inc > b) {
                best = Some((p, inc));
            }
        }
        best.map(|(p, _)| p)
    }
}

struct Searcher<'a> {
    family: &'a Family,
    best: Vec<Option<(f64, u64)>>,
    nodes: u64,
    pruned: u64,
    /// All free-term positions.
    universe: u64,
    trace: Option<Vec<SearchNode>>,
}

impl Searcher<'_> {
    fn tie_key(&self, mask: u64) -> ModelSpec {
        self.family.model_from_mask(mask)
    }

    fn record(&mut self, mask: u64, rss: f64) {
        let size = mask.count_ones() as usize;
        match self.best[size] {
            None => self.best[size] = Some((rss, mask)),
            Some((b, bm)) => {
                let tied = (rss - b).abs() <= RECORD_TIE_RTOL * rss.abs().max(b.abs());
                let replace = if tied {
                    let (new, old) = (self.tie_key(mask), self.tie_key(bm));
                    new.tie_key() < old.tie_key()
                } else {
                    rss < b
                };
                if replace {
                    self.best[size] = Some((rss, mask));
                }
            }
        }
    }

    fn bound_is_hopeless(&self, bound: f64, sizes: std::ops::Range<usize>) -> bool {
        sizes.into_iter().all(|s| match self.best[s] {
            Some((b, _)) => bound - b > PRUNE_RTOL * bound.abs().max(b.abs()),
            None => false,
        })
    }

    fn explore(&mut self, node: &mut Node) {
        loop {
            let k = node.cols.len();
            let fixed = (node.forced & node.mask()).count_ones() as usize;
            if let Some(trace) = self.trace.as_mut() {
                trace.push(SearchNode {
                    forced_in: node.forced & node.mask(),
                    forced_out: self.universe & !node.mask(),
                    bound_rss: node.rss,
                });
            }
            if fixed == k {
                return;
            }
            if self.bound_is_hopeless(node.rss, fixed..k) {
                self.pruned += 1;
                return;
            }
            if k == 1 {
                // The only completion left is the empty set, recorded up front.
                return;
            }
            let Some(pos) = node.steepest_free() else {
                return;
            };
            let mut child = node.drop_column(pos);
            self.nodes += 1;
            self.record(child.mask(), child.rss);
            self.explore(&mut child);
            node.forced |= 1 << node.cols[pos];
        }
    }
}

/// Column index in the design for free-term position `b`.
fn free_column(family: &Family, b: usize) -> usize {
    match family.intercept_policy() {
        InterceptPolicy::Always => b + 1,
        InterceptPolicy::Selectable => b,
    }
}

/// Upper triangle of a plain Householder QR, row-major `m×m` (requires `n ≥ m`).
fn householder_triangle(mut cols: Vec<Vec<f64>>) -> Vec<f64> {
    let m = cols.len();
    for k in 0..m {
        let norm = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if cols[k][k] >= 0.0 { -norm } else { norm };
        let mut v = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        cols[k][k] = alpha;
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;
        for col in cols.iter_mut().skip(k + 1) {
            let s = beta * v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum::<f64>();
            for (c, vi) in col[k..].iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
    }
    let mut r = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            r[i * m + j] = cols[j][i];
        }
    }
    r
}

fn require_subset_family(dataset: &Dataset, family: &Family) -> Result<()> {
    if family.kind() != FamilyKind::AllSubset {
        return Err(Error::Parameter(
            "best-subset search needs an all-subset family".into(),
        ));
    }
    family.check_dataset(dataset)
}

fn finish(
    dataset: &Dataset,
    family: &Family,
    best: &[Option<(f64, u64)>],
    stats: SearchStats,
) -> Result<BestSubsets> {
    let q = family.free_terms();
    let mut per_size = Vec::with_capacity(q);
    for (size, slot) in best.iter().enumerate().take(q + 1).skip(1) {
        let (_, mask) = slot
            .ok_or_else(|| Error::Selection(format!("no subset of size {size} was evaluated")))?;
        let model = family.model_from_mask(mask);
        let rss = least_squares_fit(dataset, &model)?.rss;
        per_size.push(SizeBest { size, model, rss });
    }
    Ok(BestSubsets { per_size, stats })
}

/// Best subsets per size by plain enumeration with rank-revealing fits.
pub fn exhaustive_rss_per_size(dataset: &Dataset, family: &Family) -> Result<BestSubsets> {
    require_subset_family(dataset, family)?;
    let q = family.free_terms();
    if q > MAX_EXHAUSTIVE_TERMS {
        return Err(Error::Parameter(format!(
            "exhaustive enumeration is limited to {MAX_EXHAUSTIVE_TERMS} terms, got {q}"
        )));
    }
    let mut s = Searcher {
        family,
        best: vec![None; q + 1],
        nodes: 0,
        pruned: 0,
        universe: 0,
        trace: None,
    };
    for mask in 1..(1u64 << q) {
        let fit = least_squares_fit(dataset, &family.model_from_mask(mask))?;
        s.nodes += 1;
        s.record(mask, fit.rss);
    }
    let stats = SearchStats {
        method: SearchMethod::Exhaustive,
        nodes: s.nodes,
        pruned: 0,
        exhaustive: (1u64 << q) - 1,
    };
    let best = s.best;
    finish(dataset, family, &best, stats)
}

/// Minimum-RSS subset of every size `1..=q`.
///
/// Uses branch and bound when the full design has full column rank (then
/// every subset does too); falls back to exhaustive enumeration otherwise.
/// Champion RSS values are recomputed with [`least_squares_fit`], so they are
/// identical to what enumeration reports for the same models.
pub fn best_rss_per_size(dataset: &Dataset, family: &Family) -> Result<BestSubsets> {
    search(dataset, family, false).map(|(best, _)| best)
}

/// Like [`best_rss_per_size`], also returning every branch-and-bound node
/// visited (empty when the exhaustive fallback ran).
pub fn best_rss_per_size_traced(
    dataset: &Dataset,
    family: &Family,
) -> Result<(BestSubsets, Vec<SearchNode>)> {
    search(dataset, family, true)
}

fn search(
    dataset: &Dataset,
    family: &Family,
    traced: bool,
) -> Result<(BestSubsets, Vec<SearchNode>)> {
    require_subset_family(dataset, family)?;
    let q = family.free_terms();
    let n = dataset.n();
    let forced: Vec<&[f64]> = match family.intercept_policy() {
        InterceptPolicy::Always => vec![dataset.design().column(0)],
        InterceptPolicy::Selectable => Vec::new(),
    };
    let free: Vec<&[f64]> = (0..q)
        .map(|b| dataset.design().column(free_column(family, b)))
        .collect();
    let total = forced.len() + q;
    let all: Vec<&[f64]> = forced.iter().chain(&free).copied().collect();
    if n <= total || column_rank(n, &all) < total {
        return Ok((exhaustive_rss_per_size(dataset, family)?, Vec::new()));
    }

    let mut cols: Vec<Vec<f64>> = all.iter().map(|c| c.to_vec()).collect();
    cols.push(dataset.y().to_vec());
    let full = householder_triangle(cols);
    let f = forced.len();
    let mfull = total + 1;
    let dim = q + 1;
    let mut r = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            r[i * dim + j] = full[(f + i) * mfull + (f + j)];
        }
    }
    let y_resid: f64 = (0..dim).map(|i| r[i * dim + q].powi(2)).sum();
    let last = r[dim * dim - 1];
    let mut root = Node {
        cols: (0..q).collect(),
        r,
        forced: 0,
        rss: last * last,
    };

    let mut s = Searcher {
        family,
        best: vec![None; q + 1],
        nodes: 1,
        pruned: 0,
        universe: root.mask(),
        trace: traced.then(Vec::new),
    };
    s.best[0] = Some((y_resid, 0));
    s.record(root.mask(), root.rss);
    s.explore(&mut root);

    let stats = SearchStats {
        method: SearchMethod::BranchAndBound,
        nodes: s.nodes,
        pruned: s.pruned,
        exhaustive: if q >= 64 { u64::MAX } else { (1u64 << q) - 1 },
    };
    let trace = s.trace.take().unwrap_or_default();
    Ok((finish(dataset, family, &s.best, stats)?, trace))
}

/// Outcome of a selection step.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub model: ModelSpec,
    pub fit: FitSummary,
    pub score: f64,
    pub criterion: Criterion,
}

/// Fitted candidates scanned by selection: every order for nested families,
/// one champion per size for all-subset families.
pub fn selection_candidates(
    dataset: &Dataset,
    family: &Family,
) -> Result<Vec<(ModelSpec, FitSummary)>> {
    family.check_dataset(dataset)?;
    match family.kind() {
        FamilyKind::Nested => family
            .models()
            .map(|m| least_squares_fit(dataset, &m).map(|f| (m, f)))
            .collect(),
        FamilyKind::AllSubset => best_rss_per_size(dataset, family)?
            .per_size
            .into_iter()
            .map(|b| least_squares_fit(dataset, &b.model).map(|f| (b.model, f)))
            .collect(),
    }
}

/// Argmin of the profile criterion over fitted candidates. Candidates with
/// rank 0 or rank ≥ n are not admissible.
pub fn pick_best(
    candidates: &[(ModelSpec, FitSummary)],
    n: usize,
    criterion: Criterion,
) -> Result<SelectionResult> {
    let mut best: Option<(f64, &ModelSpec, &FitSummary)> = None;
    for (model, fit) in candidates {
        if fit.rank == 0 || fit.rank >= n {
            continue;
        }
        let score = profile_score(criterion, fit, n)?;
        let better = match best {
            None => true,
            Some((bs, bm, bf)) => {
                compare_candidates((score, fit.rank, model), (bs, bf.rank, bm)).is_lt()
            }
        };
        if better {
            best = Some((score, model, fit));
        }
    }
    let (score, model, fit) = best.ok_or_else(|| {
        Error::Selection("no admissible candidate (all ranks are 0 or at least n)".into())
    })?;
    Ok(SelectionResult {
        model: model.clone(),
        fit: fit.clone(),
        score,
        criterion,
    })
}

/// Selects by AIC or BIC over the family.
pub fn select_best(
    dataset: &Dataset,
    family: &Family,
    criterion: Criterion,
) -> Result<SelectionResult> {
    let cands = selection_candidates(dataset, family)?;
    pick_best(&cands, dataset.n(), criterion)
}

/// AIC and BIC selections sharing one candidate scan.
pub fn select_aic_bic(
    dataset: &Dataset,
    family: &Family,
) -> Result<(SelectionResult, SelectionResult)> {
    let cands = selection_candidates(dataset, family)?;
    Ok((
        pick_best(&cands, dataset.n(), Criterion::Aic)?,
        pick_best(&cands, dataset.n(), Criterion::Bic)?,
    ))
}
