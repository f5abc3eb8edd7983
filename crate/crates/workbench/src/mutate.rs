//! The three trace mutation operators used to manufacture benchmark inputs
//! that may leave the specification: swapping two actions inside one
//! component, mixing components of two traces, and inserting a noise action.

use std::collections::BTreeSet;

use mtrv_core::{Action, Lifeline, MultiTrace};
use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    /// Swap two positions within one randomly chosen component.
    Sact,
    /// Take each component from one of two traces, at least one from each.
    Scmp,
    /// Insert one alphabet action at a random position of its component.
    Nois,
}

/// Extra input some mutation kinds require.
#[derive(Debug, Clone, Copy)]
pub enum MutationAux<'a> {
    None,
    /// For [`MutationKind::Scmp`]: the trace to mix components in from.
    Trace(&'a MultiTrace),
    /// For [`MutationKind::Nois`]: the pool the inserted action is drawn from.
    Alphabet(&'a BTreeSet<Action>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("action swap needs a component with at least two actions")]
    NoSwappableComponent,
    #[error("component swap needs a second multi-trace as auxiliary input")]
    AuxTraceRequired,
    #[error("component swap needs both traces over the same signature")]
    AuxSignatureMismatch,
    #[error("noise insertion needs a non-empty alphabet of signature actions")]
    AlphabetRequired,
}

pub fn mutate(
    mu: &MultiTrace,
    kind: MutationKind,
    seed: u64,
    aux: MutationAux<'_>,
) -> Result<MultiTrace, MutationError> {
    let mut rng = SplitMix64::new(seed);
    match kind {
        MutationKind::Sact => swap_actions(mu, &mut rng),
        MutationKind::Scmp => match aux {
            MutationAux::Trace(other) => swap_components(mu, other, &mut rng),
            _ => Err(MutationError::AuxTraceRequired),
        },
        MutationKind::Nois => match aux {
            MutationAux::Alphabet(pool) => insert_noise(mu, pool, &mut rng),
            _ => Err(MutationError::AlphabetRequired),
        },
    }
}

fn rebuild(mu: &MultiTrace, components: Vec<(Lifeline, Vec<Action>)>) -> MultiTrace {
    MultiTrace::from_components(mu.signature().clone(), components)
        .expect("mutated components stay within the signature")
}

fn swap_actions(mu: &MultiTrace, rng: &mut SplitMix64) -> Result<MultiTrace, MutationError> {
    let eligible: Vec<Lifeline> = mu
        .components()
        .filter(|(_, w)| w.len() >= 2)
        .map(|(l, _)| l.clone())
        .collect();
    if eligible.is_empty() {
        return Err(MutationError::NoSwappableComponent);
    }
    let target = eligible[rng.below(eligible.len())].clone();
    let components = mu
        .components()
        .map(|(l, w)| {
            let mut w = w.to_vec();
            if *l == target {
                let i = rng.below(w.len());
                let mut j = rng.below(w.len() - 1);
                if j >= i {
                    j += 1;
                }
                w.swap(i, j);
            }
            (l.clone(), w)
        })
        .collect();
    Ok(rebuild(mu, components))
}

fn swap_components(
    mu: &MultiTrace,
    other: &MultiTrace,
    rng: &mut SplitMix64,
) -> Result<MultiTrace, MutationError> {
    if mu.signature() != other.signature() {
        return Err(MutationError::AuxSignatureMismatch);
    }
    let n = mu.signature().len();
    if n == 0 {
        return Ok(mu.clone());
    }
    let mut from_other: Vec<bool> = (0..n).map(|_| rng.coin()).collect();
    // Force a component from each side; over a single lifeline the second
    // trace wins.
    if from_other.iter().all(|&b| b) && n >= 2 {
        from_other[rng.below(n)] = false;
    }
    if from_other.iter().all(|&b| !b) {
        from_other[rng.below(n)] = true;
    }
    let components = mu
        .components()
        .zip(from_other)
        .map(|((l, w), take_other)| {
            let w = if take_other {
                other.component(l).expect("same signature").to_vec()
            } else {
                w.to_vec()
            };
            (l.clone(), w)
        })
        .collect();
    Ok(rebuild(mu, components))
}

fn insert_noise(
    mu: &MultiTrace,
    pool: &BTreeSet<Action>,
    rng: &mut SplitMix64,
) -> Result<MultiTrace, MutationError> {
    let usable: Vec<&Action> = pool
        .iter()
        .filter(|a| mu.signature().contains(&a.lifeline))
        .collect();
    if usable.is_empty() {
        return Err(MutationError::AlphabetRequired);
    }
    let action = usable[rng.below(usable.len())].clone();
    let components = mu
        .components()
        .map(|(l, w)| {
            let mut w = w.to_vec();
            if *l == action.lifeline {
                let at = rng.below(w.len() + 1);
                w.insert(at, action.clone());
            }
            (l.clone(), w)
        })
        .collect();
    Ok(rebuild(mu, components))
}
