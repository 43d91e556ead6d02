//! The analytic core: uniformity and goodness verdicts, density increment,
//! good-subspace search, the dichotomy tree builder, coset approximation, and
//! Cayley-partition verification.

use crate::error::{Error, Result};
use crate::fourier::{balanced_function, coset_density, dft};
use crate::group::{GroupContext, Subspace};
use crate::set::SetIndicator;
use crate::stability::{neighborhood, verify_tree_witness, TreeWitness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct UniformityReport {
    pub y: usize,
    pub sup_coeff: f64,
    /// zero functional when the spectrum vanishes
    pub argmax_t: usize,
    pub epsilon: f64,
    pub uniform: bool,
}

/// Exact sup of |f^y_{H,A}^(t)| over t outside H^perp (equal to the sup over
/// all t, since the spectrum vanishes on H^perp).
pub fn uniformity(
    ctx: &GroupContext,
    a: &SetIndicator,
    h: &Subspace,
    y: usize,
    epsilon: f64,
) -> Result<UniformityReport> {
    let f = balanced_function(ctx, a, h, y)?;
    let s = dft(ctx, &f)?;
    let (sup_coeff, argmax_t) = s.max_modulus_where(|t| !h.annihilates(ctx, t));
    Ok(UniformityReport { y, sup_coeff, argmax_t, epsilon, uniform: sup_coeff <= epsilon })
}

/// Worst uniformity report over a full transversal of H. Valid because the
/// sup depends on y only through its coset.
pub fn total_uniformity(
    ctx: &GroupContext,
    a: &SetIndicator,
    h: &Subspace,
    epsilon: f64,
) -> Result<UniformityReport> {
    let reps = h.transversal(ctx)?;
    let reports: Vec<UniformityReport> = reps
        .par_iter()
        .map(|&y| uniformity(ctx, a, h, y, epsilon))
        .collect::<Result<_>>()?;
    reports
        .into_iter()
        .reduce(|best, r| if r.sup_coeff > best.sup_coeff + 1e-15 { r } else { best })
        .ok_or_else(|| Error::InternalInconsistency("empty transversal".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CosetVerdict {
    Low,
    High,
    Bad,
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetGoodness {
    pub y: usize,
    pub alpha: f64,
    pub verdict: CosetVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodnessReport {
    pub epsilon: f64,
    pub cosets: Vec<CosetGoodness>,
    /// the coset with density nearest 1/2 (a bad one when any exists)
    pub worst_y: usize,
    pub bad_count: usize,
}

impl GoodnessReport {
    pub fn is_good(&self) -> bool {
        self.bad_count == 0
    }
}

/// Exact per-coset densities of A with respect to H, one scan binned by
/// syndrome.
pub fn goodness(ctx: &GroupContext, a: &SetIndicator, h: &Subspace, epsilon: f64) -> Result<GoodnessReport> {
    a.check_ctx(ctx)?;
    let count = h.coset_count();
    if count > crate::group::TRANSVERSAL_CAP {
        return Err(Error::TransversalBudget { codim: h.codim() });
    }
    let mut bins = vec![0usize; count];
    for x in a.members() {
        bins[h.syndrome(ctx, x)] += 1;
    }
    let hsize = h.size() as f64;
    let mut cosets = Vec::with_capacity(count);
    let mut bad_count = 0usize;
    let mut worst = (f64::INFINITY, 0usize, false); // (|alpha-1/2|, y, is_bad)
    for (s, &cnt) in bins.iter().enumerate() {
        let y = h.rep_for_syndrome(ctx, s);
        let alpha = cnt as f64 / hsize;
        let verdict = if alpha <= epsilon {
            CosetVerdict::Low
        } else if alpha >= 1.0 - epsilon {
            CosetVerdict::High
        } else {
            CosetVerdict::Bad
        };
        let is_bad = verdict == CosetVerdict::Bad;
        if is_bad {
            bad_count += 1;
        }
        let dist = (alpha - 0.5).abs();
        // bad cosets dominate; among equals, smaller distance to 1/2 wins
        if (is_bad && !worst.2) || (is_bad == worst.2 && dist < worst.0 - 1e-15) {
            worst = (dist, y, is_bad);
        }
        cosets.push(CosetGoodness { y, alpha, verdict });
    }
    Ok(GoodnessReport { epsilon, cosets, worst_y: worst.1, bad_count })
}

#[derive(Clone, Debug, Serialize)]
pub struct IncrementStep {
    pub t: usize,
    pub x0: usize,
    pub subspace: Subspace,
    pub base_density: f64,
    pub new_density: f64,
}

/// One density-increment step at y: none when y is epsilon-uniform, otherwise
/// the argmax functional t, the refined subspace H' = H ∩ <t>^perp, and the
/// densest of the p cosets of H' inside H, guaranteed >= alpha + epsilon/2.
pub fn density_increment_step(
    ctx: &GroupContext,
    a: &SetIndicator,
    h: &Subspace,
    y: usize,
    epsilon: f64,
) -> Result<Option<IncrementStep>> {
    let report = uniformity(ctx, a, h, y, epsilon)?;
    if report.uniform {
        return Ok(None);
    }
    let t = report.argmax_t;
    let h_new = h.intersect_hyperplane(ctx, t)?;
    if h_new.codim() != h.codim() + 1 {
        return Err(Error::InternalInconsistency("argmax functional already annihilates H".into()));
    }
    // u in H with <u, t> = 1 picks out the p cosets of H' inside H
    let u = h
        .kernel_basis(ctx)
        .into_iter()
        .find(|&v| ctx.dot(v, t) != 0)
        .ok_or_else(|| Error::InternalInconsistency("t vanishes on H but is not in H^perp".into()))?;
    let inv = {
        let d = ctx.dot(u, t);
        let mut x = 1u32;
        for _ in 0..(ctx.p() - 2) {
            x = x * d as u32 % ctx.p() as u32;
        }
        x as u8
    };
    let u1 = ctx.scale(inv, u);
    let base_density = coset_density(ctx, a, h, y);
    let mut best = (f64::NEG_INFINITY, 0usize);
    for j in 0..ctx.p() {
        let xj = ctx.scale(j, u1);
        let d = coset_density(ctx, a, &h_new, ctx.add(y, xj));
        if d > best.0 + 1e-15 {
            best = (d, xj);
        }
    }
    let (new_density, x0) = best;
    if new_density < base_density + epsilon / 2.0 - 1e-12 {
        return Err(Error::InternalInconsistency(format!(
            "increment guarantee failed: {new_density} < {base_density} + {epsilon}/2"
        )));
    }
    Ok(Some(IncrementStep { t, x0, subspace: h_new, base_density, new_density }))
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub y: usize,
    pub t: usize,
    pub codim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodSubspace {
    pub subspace: Subspace,
    pub epsilon: f64,
    pub report: GoodnessReport,
    pub refinement_trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureTrace {
    pub refinement_trace: Vec<TraceStep>,
    pub blocking: GoodnessReport,
    pub anomalies: Vec<String>,
    pub final_codim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub enum SubspaceSearch {
    Good(GoodSubspace),
    Failure(FailureTrace),
}

/// Refine H <- H ∩ <t>^perp until every coset of H is low or high for A.
pub fn good_subspace_search(
    ctx: &GroupContext,
    a: &SetIndicator,
    epsilon: f64,
    max_codim: usize,
) -> Result<SubspaceSearch> {
    let mut h = Subspace::full(ctx);
    let mut working_eps = epsilon;
    let mut halved = false;
    let mut trace = Vec::new();
    let mut anomalies = Vec::new();
    loop {
        let report = goodness(ctx, a, &h, working_eps)?;
        if report.is_good() {
            // re-verify before emitting
            let fresh = goodness(ctx, a, &h, working_eps)?;
            if !fresh.is_good() {
                return Err(Error::InternalInconsistency("good subspace failed re-verification".into()));
            }
            return Ok(SubspaceSearch::Good(GoodSubspace {
                subspace: h,
                epsilon: working_eps,
                report: fresh,
                refinement_trace: trace,
            }));
        }
        if h.codim() >= max_codim {
            return Ok(SubspaceSearch::Failure(FailureTrace {
                refinement_trace: trace,
                final_codim: h.codim(),
                blocking: report,
                anomalies,
            }));
        }
        let y = report.worst_y;
        let ur = uniformity(ctx, a, &h, y, working_eps)?;
        if ur.uniform {
            // uniform-but-bad: impossible asymptotically for stable sets,
            // possible at desk scale; halve the working epsilon once
            anomalies.push(format!(
                "coset y={y} is {working_eps}-uniform but bad (sup={})",
                ur.sup_coeff
            ));
            if halved {
                return Ok(SubspaceSearch::Failure(FailureTrace {
                    refinement_trace: trace,
                    final_codim: h.codim(),
                    blocking: report,
                    anomalies,
                }));
            }
            halved = true;
            working_eps /= 2.0;
            continue;
        }
        h = h.intersect_hyperplane(ctx, ur.argmax_t)?;
        trace.push(TraceStep { y, t: ur.argmax_t, codim: h.codim() });
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum LocateOutcome {
    Located { subspace: Subspace, shift: usize, density: f64, steps: Vec<TraceStep> },
    Anomaly { reason: String, density: f64, codim: usize },
}

/// Run the density increment from y = 0 at most floor(2/epsilon) times inside
/// H; on reaching a uniform point apply the goodness dichotomy with threshold
/// theta. Codimension growth is bounded by floor(2/epsilon).
pub fn dense_coset_locator(
    ctx: &GroupContext,
    s: &SetIndicator,
    h: &Subspace,
    epsilon: f64,
    theta: f64,
) -> Result<LocateOutcome> {
    let m = (2.0 / epsilon).floor() as usize;
    let mut cur = h.clone();
    let mut y = 0usize;
    let mut steps = Vec::new();
    for _ in 0..=m {
        match density_increment_step(ctx, s, &cur, y, epsilon)? {
            Some(step) => {
                y = ctx.add(y, step.x0);
                cur = step.subspace.clone();
                steps.push(TraceStep { y, t: step.t, codim: cur.codim() });
                debug_assert!(cur.codim() - h.codim() <= m + 1);
            }
            None => {
                let density = coset_density(ctx, s, &cur, y);
                debug_assert!(cur.codim() - h.codim() <= m);
                if density >= 1.0 - theta {
                    return Ok(LocateOutcome::Located { subspace: cur, shift: y, density, steps });
                }
                let reason = if density <= theta {
                    format!("uniform coset is sparse: density {density} <= theta {theta}")
                } else {
                    format!("uniform coset neither low nor high: density {density}, theta {theta}")
                };
                return Ok(LocateOutcome::Anomaly { reason, density, codim: cur.codim() });
            }
        }
    }
    let density = coset_density(ctx, s, &cur, y);
    if density >= 1.0 - theta {
        return Ok(LocateOutcome::Located { subspace: cur, shift: y, density, steps });
    }
    Ok(LocateOutcome::Anomaly {
        reason: format!("increment budget {m} exhausted at density {density}"),
        density,
        codim: cur.codim(),
    })
}

struct TreeNode {
    h: Subspace,
    /// g_eta, assigned when the node is expanded
    g: usize,
    /// x_eta, the locator shift that produced this node
    x: usize,
    x_set: SetIndicator,
    trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, Serialize)]
pub enum DichotomyOutcome {
    Good(GoodSubspace),
    Tree(TreeWitness),
    Inconclusive { level: usize, node: usize, reason: String },
}

/// Level-by-level construction of the four sequences (H, g, x, X): either
/// some H_eta is mu-good, or the tree reaches its target height and a
/// TreeWitness is extracted and re-verified. Desk-scale threshold violations
/// surface as a shorter extracted tree or an Inconclusive record.
pub fn dichotomy_tree_builder(
    ctx: &GroupContext,
    a: &SetIndicator,
    k: u64,
    mu: f64,
    max_codim: usize,
    working_epsilon: Option<f64>,
) -> Result<DichotomyOutcome> {
    let eps = working_epsilon.unwrap_or(mu / 4.0);
    let theta = eps.powf(1.0 / (2.0 * k as f64 + 2.0));
    let target_d = crate::budget::d_max(k) as usize;
    let mut levels: Vec<Vec<TreeNode>> = vec![vec![TreeNode {
        h: Subspace::full(ctx),
        g: 0,
        x: 0,
        x_set: SetIndicator::full(ctx),
        trace: Vec::new(),
    }]];
    for t in 0..target_d {
        let mut children: Vec<TreeNode> = Vec::with_capacity(2 << t);
        for idx in 0..levels[t].len() {
            let report = goodness(ctx, a, &levels[t][idx].h, mu)?;
            if report.is_good() {
                return Ok(DichotomyOutcome::Good(GoodSubspace {
                    subspace: levels[t][idx].h.clone(),
                    epsilon: mu,
                    report,
                    refinement_trace: levels[t][idx].trace.clone(),
                }));
            }
            // condition (ii): a bad coset's representative has both
            // neighborhoods of density >= mu on H
            let g = report.worst_y;
            levels[t][idx].g = g;
            let node = &levels[t][idx];
            for i in [0u8, 1u8] {
                let nb = neighborhood(ctx, a, g, i);
                let count = nb
                    .intersection(&SetIndicator::from_subspace(ctx, &node.h))
                    .len();
                if (count as f64) < mu * node.h.size() as f64 - 1e-9 {
                    return Err(Error::InternalInconsistency(
                        "bad coset violates the neighborhood threshold".into(),
                    ));
                }
                let s_i = nb.intersection(&node.x_set);
                let located = match dense_coset_locator(ctx, &s_i, &node.h, eps, theta)? {
                    LocateOutcome::Located { subspace, shift, density, steps } => {
                        (subspace, shift, density, steps)
                    }
                    LocateOutcome::Anomaly { reason, .. } => {
                        return finish_blocked(ctx, a, &levels, t, idx, reason);
                    }
                };
                let (h_child, x_child, _density, steps) = located;
                if h_child.codim() > max_codim {
                    return finish_blocked(
                        ctx,
                        a,
                        &levels,
                        t,
                        idx,
                        format!("codim {} exceeds budget {max_codim}", h_child.codim()),
                    );
                }
                // condition (v)
                let x_set_child = neighborhood(ctx, a, ctx.add(g, x_child), i)
                    .intersection(&node.x_set.translate(ctx, ctx.neg(x_child)));
                // condition (iii), automatic from the locator's guarantee
                let dense = x_set_child
                    .intersection(&SetIndicator::from_subspace(ctx, &h_child))
                    .len() as f64;
                if dense < (1.0 - theta) * h_child.size() as f64 - 1e-9 {
                    return Err(Error::InternalInconsistency(
                        "child X-set violates the density threshold".into(),
                    ));
                }
                let mut trace = node.trace.clone();
                trace.extend(steps);
                children.push(TreeNode { h: h_child, g: 0, x: x_child, x_set: x_set_child, trace });
            }
        }
        // condition (i): codim <= m*(t+1) with m = floor(2/eps)
        let m = (2.0 / eps).floor() as usize;
        for c in &children {
            if c.h.codim() > m * (t + 1) {
                return Err(Error::InternalInconsistency("codim exceeds m per level".into()));
            }
        }
        levels.push(children);
    }
    extract_witness(ctx, a, &levels, target_d)
}

fn finish_blocked(
    ctx: &GroupContext,
    a: &SetIndicator,
    levels: &[Vec<TreeNode>],
    level: usize,
    node: usize,
    reason: String,
) -> Result<DichotomyOutcome> {
    if level >= 1 {
        // levels 0..level are complete with g assigned; extract at the last
        // completed height
        return extract_witness(ctx, a, levels, level);
    }
    Ok(DichotomyOutcome::Inconclusive { level, node, reason })
}

/// a_eta := c_eta + sum of x along the path; b_sigma := g_sigma - that sum.
fn extract_witness(
    ctx: &GroupContext,
    a: &SetIndicator,
    levels: &[Vec<TreeNode>],
    d: usize,
) -> Result<DichotomyOutcome> {
    let leaf_count = 1usize << d;
    // cumulative x along the path to every node, per level
    let mut cums: Vec<Vec<usize>> = vec![vec![0]];
    for t in 1..=d {
        let prev = &cums[t - 1];
        let cur: Vec<usize> = levels[t]
            .iter()
            .enumerate()
            .map(|(c, node)| ctx.add(prev[c / 2], node.x))
            .collect();
        cums.push(cur);
    }
    let mut leaves = Vec::with_capacity(leaf_count);
    for (c, node) in levels[d].iter().enumerate() {
        let Some(c_eta) = node.x_set.min_member() else {
            return Ok(DichotomyOutcome::Inconclusive {
                level: d,
                node: c,
                reason: "empty X-set at a leaf".into(),
            });
        };
        leaves.push(ctx.add(c_eta, cums[d][c]));
    }
    let mut nodes = vec![0usize; leaf_count];
    for t in 0..d {
        for (c, node) in levels[t].iter().enumerate() {
            nodes[(1 << t) + c] = ctx.sub(node.g, cums[t][c]);
        }
    }
    // extraction identity: a_eta + b_sigma = c_eta + g_sigma + x_{eta|s+1} + ... + x_{eta|d}
    for (c, &a_leaf) in leaves.iter().enumerate() {
        let c_eta = ctx.sub(a_leaf, cums[d][c]);
        for s in 0..d {
            let sig = c >> (d - s);
            let suffix = ctx.sub(cums[d][c], cums[s][sig]);
            let lhs = ctx.add(a_leaf, nodes[(1 << s) + sig]);
            let rhs = ctx.add(ctx.add(c_eta, levels[s][sig].g), suffix);
            if lhs != rhs {
                return Err(Error::InternalInconsistency("extraction identity violated".into()));
            }
        }
    }
    let tw = TreeWitness { d, leaves, nodes };
    if !verify_tree_witness(ctx, a, &tw)? {
        return Err(Error::InternalInconsistency("extracted tree witness failed verification".into()));
    }
    Ok(DichotomyOutcome::Tree(tw))
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularPairReport {
    pub sup_coeff: f64,
    pub fourier_bound: f64,
    pub pair_density: f64,
    pub monte_carlo_worst: f64,
    pub samples: usize,
}

/// Fourier bound sqrt(sup |f^(t)|) for the pair (H, H+y), plus a seeded
/// Monte-Carlo check of the regularity definition on dense subset pairs.
pub fn regular_pair_estimate(
    ctx: &GroupContext,
    a: &SetIndicator,
    h: &Subspace,
    y: usize,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<RegularPairReport> {
    let ur = uniformity(ctx, a, h, y, epsilon)?;
    let fourier_bound = ur.sup_coeff.sqrt();
    let pair_density = coset_density(ctx, a, h, y);
    let members = h.members(ctx);
    let q = fourier_bound.max(epsilon.sqrt()).max(0.3).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut used = 0usize;
    for _ in 0..samples {
        let u_sub: Vec<usize> = members.iter().copied().filter(|_| rng.gen_bool(q)).collect();
        let w_sub: Vec<usize> = members.iter().copied().filter(|_| rng.gen_bool(q)).collect();
        if u_sub.is_empty() || w_sub.is_empty() {
            continue;
        }
        used += 1;
        let mut hits = 0usize;
        for &u in &u_sub {
            for &w in &w_sub {
                if a.contains(ctx.add(ctx.add(u, w), y)) {
                    hits += 1;
                }
            }
        }
        let d = hits as f64 / (u_sub.len() * w_sub.len()) as f64;
        worst = worst.max((d - pair_density).abs());
    }
    Ok(RegularPairReport {
        sup_coeff: ur.sup_coeff,
        fourier_bound,
        pair_density,
        monte_carlo_worst: worst,
        samples: used,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproximationReport {
    pub epsilon: f64,
    pub dense_coset_reps: Vec<usize>,
    #[serde(skip)]
    pub union_set: SetIndicator,
    pub sym_diff: usize,
    pub h_is_good: bool,
}

/// I = cosets where A has density >= 1 - epsilon, X = their union, and the
/// exact |A Δ X|. When H is epsilon-good, |A Δ X| <= epsilon|G| is asserted.
pub fn coset_approximation(
    ctx: &GroupContext,
    a: &SetIndicator,
    h: &Subspace,
    epsilon: f64,
) -> Result<ApproximationReport> {
    let report = goodness(ctx, a, h, epsilon)?;
    let hsize = h.size() as f64;
    let dense: Vec<bool> = report.cosets.iter().map(|c| c.alpha * hsize >= (1.0 - epsilon) * hsize - 1e-9).collect();
    let mut union_set = SetIndicator::empty(ctx);
    for x in 0..ctx.order() {
        if dense[h.syndrome(ctx, x)] {
            union_set.insert(x);
        }
    }
    let sym_diff = a.symmetric_difference_size(&union_set);
    let h_is_good = report.is_good();
    if h_is_good && sym_diff as f64 > epsilon * ctx.order() as f64 + 1e-9 {
        return Err(Error::InternalInconsistency(format!(
            "approximation bound failed on a good subspace: {sym_diff} > {epsilon}*|G|"
        )));
    }
    let dense_coset_reps = report
        .cosets
        .iter()
        .zip(&dense)
        .filter(|(_, &d)| d)
        .map(|(c, _)| c.y)
        .collect();
    Ok(ApproximationReport { epsilon, dense_coset_reps, union_set, sym_diff, h_is_good })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionViolation {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub epsilon: f64,
    pub reps: Vec<usize>,
    /// t(i,j) in {0,1}; none where the pair violates the dichotomy
    pub table: Vec<Vec<Option<u8>>>,
    pub violations: Vec<PartitionViolation>,
}

/// Corollary 5.4 table: for cosets V_i = rep_i + H, the count |N^t(z) ∩ V_j|
/// is constant in z over V_i, so one density per (i,j) decides t(i,j).
pub fn cayley_partition_verify(
    ctx: &GroupContext,
    a: &SetIndicator,
    h: &Subspace,
    epsilon: f64,
) -> Result<PartitionReport> {
    let count = h.coset_count();
    if count * count > (1 << 24) {
        return Err(Error::TransversalBudget { codim: h.codim() });
    }
    let reps = h.transversal(ctx)?;
    let mut bins = vec![0usize; count];
    for x in a.members() {
        bins[h.syndrome(ctx, x)] += 1;
    }
    let hsize = h.size() as f64;
    let mut table = vec![vec![None; count]; count];
    let mut violations = Vec::new();
    for i in 0..count {
        for j in 0..count {
            let delta = bins[h.syndrome(ctx, ctx.add(reps[i], reps[j]))] as f64 / hsize;
            if delta >= 1.0 - epsilon {
                table[i][j] = Some(1);
            } else if delta <= epsilon {
                table[i][j] = Some(0);
            } else {
                violations.push(PartitionViolation { i, j, delta });
            }
        }
    }
    Ok(PartitionReport { epsilon, reps, table, violations })
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    pub epsilon: f64,
    pub rate: f64,
    pub sym_diff: usize,
    pub worst_sup: f64,
    pub worst_y: usize,
    pub three_eps_bound: f64,
    pub base_bound: f64,
    pub fourier_diff_bound: f64,
    /// |A|/|H|, reported in place of the paper's unenforceable density
    /// precondition
    pub density_ratio: f64,
}

/// Perturb A' by a seeded-random B at the given rate (capped at epsilon|A'|),
/// then measure the worst balanced-spectrum coefficient of the perturbed set
/// over a transversal of H.
pub fn perturbation_uniformity_check(
    ctx: &GroupContext,
    a_prime: &SetIndicator,
    h: &Subspace,
    epsilon: f64,
    rate: f64,
    seed: u64,
) -> Result<(SetIndicator, PerturbationReport)> {
    a_prime.check_ctx(ctx)?;
    let cap = (epsilon * a_prime.len() as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = a_prime.clone();
    let mut flips = 0usize;
    for x in 0..ctx.order() {
        if rate > 0.0 && rng.gen_bool(rate) {
            a.toggle(x);
            flips += 1;
        }
    }
    if flips > cap {
        return Err(Error::PerturbationTooLarge { achieved: flips, cap });
    }
    let sym_diff = a.symmetric_difference_size(a_prime);
    let worst = total_uniformity(ctx, &a, h, 3.0 * epsilon)?;
    let report = PerturbationReport {
        epsilon,
        rate,
        sym_diff,
        worst_sup: worst.sup_coeff,
        worst_y: worst.y,
        three_eps_bound: 3.0 * epsilon,
        base_bound: (ctx.p() as f64 + 1.0) * epsilon,
        fourier_diff_bound: 2.0 * sym_diff as f64 / h.size() as f64,
        density_ratio: a.len() as f64 / h.size() as f64,
    };
    Ok((a, report))
}
