//! The two semantics of interaction terms: denotational (sets of accepted
//! multi-traces, with loops cut off at a bound) and operational (termination
//! plus a small-step execution relation).

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::interaction::{Interaction, InteractionModel};
use crate::model::{Action, Signature};
use crate::multitrace::{CombineOp, MultiTrace, MultiTraceSet, Side};

/// True iff the term accepts the empty multi-trace right away.
pub fn terminates(i: &Interaction) -> bool {
    match i {
        Interaction::Empty => true,
        Interaction::Act(_) => false,
        Interaction::Seq(i1, i2) | Interaction::Par(i1, i2) => terminates(i1) && terminates(i2),
        Interaction::Alt(i1, i2) => terminates(i1) || terminates(i2),
        Interaction::LoopS(_) | Interaction::LoopP(_) => true,
    }
}

/// The immediately executable actions, each paired with the term that remains
/// after executing it. Entries are in leftmost order and deduplicated.
pub fn frontier(i: &Interaction) -> Vec<(Action, Interaction)> {
    let mut out = Vec::new();
    collect(i, &mut out);
    out
}

fn push_entry(out: &mut Vec<(Action, Interaction)>, entry: (Action, Interaction)) {
    if !out.contains(&entry) {
        out.push(entry);
    }
}

fn collect(i: &Interaction, out: &mut Vec<(Action, Interaction)>) {
    match i {
        Interaction::Empty => {}
        Interaction::Act(a) => push_entry(out, (a.clone(), Interaction::Empty)),
        // A chosen alternative discards the other branch entirely.
        Interaction::Alt(i1, i2) => {
            collect(i1, out);
            collect(i2, out);
        }
        Interaction::Par(i1, i2) => {
            for (a, s) in frontier(i1) {
                push_entry(out, (a, Interaction::Par(Arc::new(s), Arc::clone(i2))));
            }
            for (a, s) in frontier(i2) {
                push_entry(out, (a, Interaction::Par(Arc::clone(i1), Arc::new(s))));
            }
        }
        // Executing on the right requires the left side to terminate, and the
        // remaining term is the right successor alone: choosing to start on
        // the right commits the left side to the empty multi-trace.
        Interaction::Seq(i1, i2) => {
            for (a, s) in frontier(i1) {
                push_entry(out, (a, Interaction::Seq(Arc::new(s), Arc::clone(i2))));
            }
            if terminates(i1) {
                for entry in frontier(i2) {
                    push_entry(out, entry);
                }
            }
        }
        Interaction::LoopS(body) => {
            for (a, s) in frontier(body) {
                push_entry(out, (a, Interaction::Seq(Arc::new(s), Arc::new(i.clone()))));
            }
        }
        Interaction::LoopP(body) => {
            for (a, s) in frontier(body) {
                push_entry(out, (a, Interaction::Par(Arc::new(s), Arc::new(i.clone()))));
            }
        }
    }
}

/// The accepted multi-traces of the model, with every loop unfolded at most
/// `loop_bound` times.
pub fn enumerate_denotational(model: &InteractionModel, loop_bound: usize) -> MultiTraceSet {
    enumerate_denotational_capped(model, loop_bound, usize::MAX)
        .expect("uncapped enumeration cannot overflow")
}

/// Like [`enumerate_denotational`], but gives up with None as soon as any
/// intermediate set would exceed `cap` elements.
pub fn enumerate_denotational_capped(
    model: &InteractionModel,
    loop_bound: usize,
    cap: usize,
) -> Option<MultiTraceSet> {
    denot(model.term(), model.signature(), loop_bound, cap)
}

fn denot(i: &Interaction, sig: &Signature, bound: usize, cap: usize) -> Option<MultiTraceSet> {
    Some(match i {
        Interaction::Empty => MultiTraceSet::epsilon(sig.clone()),
        Interaction::Act(a) => {
            let one = MultiTrace::empty(sig.clone())
                .attach(a, Side::Right)
                .expect("model actions lie within the signature");
            MultiTraceSet::from_elements(sig.clone(), [one]).expect("same signature")
        }
        Interaction::Seq(i1, i2) => {
            let left = denot(i1, sig, bound, cap)?;
            let right = denot(i2, sig, bound, cap)?;
            left.seq_capped(&right, cap).expect("same signature")?
        }
        Interaction::Par(i1, i2) => {
            let left = denot(i1, sig, bound, cap)?;
            let right = denot(i2, sig, bound, cap)?;
            left.interleave_capped(&right, cap).expect("same signature")?
        }
        Interaction::Alt(i1, i2) => {
            let union = denot(i1, sig, bound, cap)?
                .union_with(&denot(i2, sig, bound, cap)?)
                .expect("same signature");
            if union.len() > cap {
                return None;
            }
            union
        }
        Interaction::LoopS(body) => {
            denot(body, sig, bound, cap)?.closure_capped(CombineOp::Seq, bound, cap)?
        }
        Interaction::LoopP(body) => {
            denot(body, sig, bound, cap)?.closure_capped(CombineOp::Par, bound, cap)?
        }
    })
}

/// The accepted multi-traces reachable through at most `max_len` execution
/// steps. Sub-results are memoized per (term, remaining budget).
pub fn enumerate_operational(model: &InteractionModel, max_len: usize) -> MultiTraceSet {
    let mut memo: HashMap<(Interaction, usize), Arc<BTreeSet<MultiTrace>>> = HashMap::new();
    let traces = walk(model.term(), model.signature(), max_len, &mut memo);
    MultiTraceSet::from_elements(model.signature().clone(), traces.iter().cloned())
        .expect("same signature")
}

fn walk(
    i: &Interaction,
    sig: &Signature,
    budget: usize,
    memo: &mut HashMap<(Interaction, usize), Arc<BTreeSet<MultiTrace>>>,
) -> Arc<BTreeSet<MultiTrace>> {
    let key = (i.clone(), budget);
    if let Some(hit) = memo.get(&key) {
        return Arc::clone(hit);
    }
    let mut out = BTreeSet::new();
    if terminates(i) {
        out.insert(MultiTrace::empty(sig.clone()));
    }
    if budget > 0 {
        for (a, succ) in frontier(i) {
            for t in walk(&succ, sig, budget - 1, memo).iter() {
                out.insert(t.attach(&a, Side::Left).expect("model actions lie within the signature"));
            }
        }
    }
    let out = Arc::new(out);
    memo.insert(key, Arc::clone(&out));
    out
}
