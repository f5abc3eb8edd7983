//! Accepted multi-trace generation and random prefix selection.
//!
//! Generation walks the execution relation of a model whose every loop
//! occurrence carries an explicit remaining-unfold budget, emitting the
//! accumulated multi-trace at residuals that terminate. Exhaustive mode
//! explores every path; random mode samples seeded paths until a vertex
//! budget runs out.

use std::collections::BTreeSet;
use std::sync::Arc;

use mtrv_core::{Action, Interaction, InteractionModel, MultiTrace, Side};

use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerationMode {
    /// Every accepted multi-trace reachable within the loop budget.
    Exhaustive,
    /// Seeded random paths until `node_limit` vertices were visited.
    RandomPartial,
}

/// How far [`generate_accepted`] explores: each syntactic loop occurrence may
/// unfold at most `loop_bound` times along one derivation, and random
/// sampling stops once `node_limit` vertices were visited. `node_limit` and
/// `seed` only matter in [`GenerationMode::RandomPartial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationCriteria {
    pub loop_bound: usize,
    pub mode: GenerationMode,
    pub node_limit: usize,
    pub seed: u64,
}

impl GenerationCriteria {
    pub fn exhaustive(loop_bound: usize) -> Self {
        GenerationCriteria {
            loop_bound,
            mode: GenerationMode::Exhaustive,
            node_limit: 1,
            seed: 0,
        }
    }

    pub fn random_partial(loop_bound: usize, node_limit: usize, seed: u64) -> Self {
        GenerationCriteria {
            loop_bound,
            mode: GenerationMode::RandomPartial,
            node_limit,
            seed,
        }
    }
}

/// Interaction term with a remaining-unfold budget on every loop occurrence,
/// so every walk is finite. The loop body is kept as the unbudgeted template
/// and re-budgeted fresh on each unfold.
#[derive(Debug, Clone, PartialEq, Eq)]
enum BTerm {
    Empty,
    Act(Action),
    Seq(Arc<BTerm>, Arc<BTerm>),
    Par(Arc<BTerm>, Arc<BTerm>),
    Alt(Arc<BTerm>, Arc<BTerm>),
    Loop {
        sequential: bool,
        budget: usize,
        body: Arc<Interaction>,
    },
}

fn budgeted(i: &Interaction, bound: usize) -> Arc<BTerm> {
    Arc::new(match i {
        Interaction::Empty => BTerm::Empty,
        Interaction::Act(a) => BTerm::Act(a.clone()),
        Interaction::Seq(a, b) => BTerm::Seq(budgeted(a, bound), budgeted(b, bound)),
        Interaction::Par(a, b) => BTerm::Par(budgeted(a, bound), budgeted(b, bound)),
        Interaction::Alt(a, b) => BTerm::Alt(budgeted(a, bound), budgeted(b, bound)),
        Interaction::LoopS(body) => BTerm::Loop {
            sequential: true,
            budget: bound,
            body: Arc::clone(body),
        },
        Interaction::LoopP(body) => BTerm::Loop {
            sequential: false,
            budget: bound,
            body: Arc::clone(body),
        },
    })
}

fn accepts_empty(t: &BTerm) -> bool {
    match t {
        BTerm::Empty | BTerm::Loop { .. } => true,
        BTerm::Act(_) => false,
        BTerm::Seq(a, b) | BTerm::Par(a, b) => accepts_empty(a) && accepts_empty(b),
        BTerm::Alt(a, b) => accepts_empty(a) || accepts_empty(b),
    }
}

fn moves(t: &Arc<BTerm>, bound: usize) -> Vec<(Action, Arc<BTerm>)> {
    let mut out = Vec::new();
    collect(t, bound, &mut out);
    out
}

fn push(out: &mut Vec<(Action, Arc<BTerm>)>, action: Action, residual: Arc<BTerm>) {
    if !out.iter().any(|(a, t)| *a == action && **t == *residual) {
        out.push((action, residual));
    }
}

fn collect(t: &Arc<BTerm>, bound: usize, out: &mut Vec<(Action, Arc<BTerm>)>) {
    match &**t {
        BTerm::Empty => {}
        BTerm::Act(a) => push(out, a.clone(), Arc::new(BTerm::Empty)),
        BTerm::Alt(a, b) => {
            for (x, r) in moves(a, bound) {
                push(out, x, r);
            }
            for (x, r) in moves(b, bound) {
                push(out, x, r);
            }
        }
        BTerm::Seq(a, b) => {
            for (x, r) in moves(a, bound) {
                push(out, x, Arc::new(BTerm::Seq(r, Arc::clone(b))));
            }
            // Starting on the right commits the left side to the empty
            // multi-trace.
            if accepts_empty(a) {
                for (x, r) in moves(b, bound) {
                    push(out, x, r);
                }
            }
        }
        BTerm::Par(a, b) => {
            for (x, r) in moves(a, bound) {
                push(out, x, Arc::new(BTerm::Par(r, Arc::clone(b))));
            }
            for (x, r) in moves(b, bound) {
                push(out, x, Arc::new(BTerm::Par(Arc::clone(a), r)));
            }
        }
        BTerm::Loop {
            sequential,
            budget,
            body,
        } => {
            if *budget == 0 {
                return;
            }
            // A fresh body copy gets full inner budgets; the continuation
            // keeps one unfold less.
            let copy = budgeted(body, bound);
            let rest = Arc::new(BTerm::Loop {
                sequential: *sequential,
                budget: budget - 1,
                body: Arc::clone(body),
            });
            for (x, r) in moves(&copy, bound) {
                let residual = if *sequential {
                    BTerm::Seq(r, Arc::clone(&rest))
                } else {
                    BTerm::Par(r, Arc::clone(&rest))
                };
                push(out, x, Arc::new(residual));
            }
        }
    }
}

fn extend(acc: &MultiTrace, action: &Action) -> MultiTrace {
    acc.attach(action, Side::Right)
        .expect("executed actions lie within the signature")
}

fn walk_all(t: &Arc<BTerm>, bound: usize, acc: &MultiTrace, out: &mut BTreeSet<MultiTrace>) {
    if accepts_empty(t) {
        out.insert(acc.clone());
    }
    for (action, residual) in moves(t, bound) {
        walk_all(&residual, bound, &extend(acc, &action), out);
    }
}

/// The accepted multi-traces of `model` reachable within
/// `criteria.loop_bound` unfoldings per loop occurrence, deduplicated and in
/// sorted order.
pub fn generate_accepted(model: &InteractionModel, criteria: &GenerationCriteria) -> Vec<MultiTrace> {
    let bound = criteria.loop_bound;
    let root = budgeted(model.term(), bound);
    let empty = MultiTrace::empty(model.signature().clone());
    let mut out = BTreeSet::new();
    match criteria.mode {
        GenerationMode::Exhaustive => walk_all(&root, bound, &empty, &mut out),
        GenerationMode::RandomPartial => {
            let mut rng = SplitMix64::new(criteria.seed);
            let mut visited = 0usize;
            while visited < criteria.node_limit {
                let mut current = Arc::clone(&root);
                let mut acc = empty.clone();
                loop {
                    visited += 1;
                    let options = moves(&current, bound);
                    // A stuck residual always terminates, so a path only ever
                    // ends at an accepted multi-trace.
                    if accepts_empty(&current) && (options.is_empty() || rng.coin()) {
                        out.insert(acc);
                        break;
                    }
                    let (action, residual) = options[rng.below(options.len())].clone();
                    acc = extend(&acc, &action);
                    current = residual;
                }
            }
        }
    }
    out.into_iter().collect()
}

/// `count` random multi-prefixes of `mu`, each drawn with uniform
/// per-component cut points. Outputs stay pairwise distinct until the prefix
/// lattice of `mu` has fewer elements than requested.
pub fn select_prefixes(mu: &MultiTrace, count: usize, seed: u64) -> Vec<MultiTrace> {
    let mut rng = SplitMix64::new(seed);
    let lattice: u128 = mu.components().map(|(_, w)| w.len() as u128 + 1).product();
    let mut seen: BTreeSet<MultiTrace> = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let prefix = random_prefix(mu, &mut rng);
        if seen.len() as u128 == lattice || seen.insert(prefix.clone()) {
            out.push(prefix);
        }
    }
    out
}

fn random_prefix(mu: &MultiTrace, rng: &mut SplitMix64) -> MultiTrace {
    let components: Vec<_> = mu
        .components()
        .map(|(l, w)| (l.clone(), w[..rng.below(w.len() + 1)].to_vec()))
        .collect();
    MultiTrace::from_components(mu.signature().clone(), components)
        .expect("cut components stay within the signature")
}
