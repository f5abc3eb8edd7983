//! Shared test helpers: terse literals and proptest strategies over a small
//! fixed vocabulary (lifelines `l`, `m`; messages `a`, `b`).

use proptest::prelude::*;

use crate::interaction::Interaction;
use crate::model::{Action, ActionKind, Lifeline, Message, Signature};
use crate::multitrace::MultiTrace;

pub(crate) fn ll(name: &str) -> Lifeline {
    Lifeline::new(name).expect("valid lifeline literal")
}

pub(crate) fn msg(name: &str) -> Message {
    Message::new(name).expect("valid message literal")
}

pub(crate) fn sig(names: &[&str]) -> Signature {
    Signature::new(names.iter().map(|n| ll(n))).expect("valid signature literal")
}

/// Parses `"l!a"` / `"l?a"`.
pub(crate) fn act(text: &str) -> Action {
    let idx = text.find(['!', '?']).expect("action literal has a kind symbol");
    let kind = if text.as_bytes()[idx] == b'!' {
        ActionKind::Emission
    } else {
        ActionKind::Reception
    };
    Action::new(ll(&text[..idx]), kind, msg(&text[idx + 1..]))
}

/// Builds a multi-trace from `(lifeline, dotted actions)` pairs; an empty
/// string is the empty component.
pub(crate) fn mt(components: &[(&str, &str)]) -> MultiTrace {
    let signature = sig(&components.iter().map(|(l, _)| *l).collect::<Vec<_>>());
    MultiTrace::from_components(
        signature,
        components.iter().map(|(l, word)| {
            (ll(l), if word.is_empty() { Vec::new() } else { word.split('.').map(act).collect() })
        }),
    )
    .expect("valid multi-trace literal")
}

pub(crate) fn arb_action() -> impl Strategy<Value = Action> {
    (prop_oneof![Just("l"), Just("m")], any::<bool>(), prop_oneof![Just("a"), Just("b")]).prop_map(
        |(l, emit, m)| {
            let kind = if emit { ActionKind::Emission } else { ActionKind::Reception };
            Action::new(ll(l), kind, msg(m))
        },
    )
}

fn arb_word(lifeline: &'static str, max_len: usize) -> impl Strategy<Value = Vec<Action>> {
    prop::collection::vec(
        (any::<bool>(), prop_oneof![Just("a"), Just("b")]).prop_map(move |(emit, m)| {
            let kind = if emit { ActionKind::Emission } else { ActionKind::Reception };
            Action::new(ll(lifeline), kind, msg(m))
        }),
        0..=max_len,
    )
}

/// Multi-traces over `{l, m}` with components of at most `max_len` actions.
pub(crate) fn arb_multitrace(max_len: usize) -> impl Strategy<Value = MultiTrace> {
    (arb_word("l", max_len), arb_word("m", max_len)).prop_map(|(wl, wm)| {
        MultiTrace::from_components(sig(&["l", "m"]), [(ll("l"), wl), (ll("m"), wm)])
            .expect("components built per lifeline")
    })
}

/// Interaction terms over `{l, m}` nested at most `depth` operators deep.
pub(crate) fn arb_interaction(depth: u32) -> impl Strategy<Value = Interaction> {
    let leaf = prop_oneof![
        1 => Just(Interaction::Empty),
        3 => arb_action().prop_map(Interaction::Act),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Interaction::seq(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Interaction::par(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Interaction::alt(a, b)),
            inner.clone().prop_map(Interaction::loop_s),
            inner.prop_map(Interaction::loop_p),
        ]
    })
}
