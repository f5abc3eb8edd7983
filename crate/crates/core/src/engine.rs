//! The conformance engine: a graph search over (model, multi-trace) vertices.
//!
//! Four rules drive the search. An emptied multi-trace is accepted (Ro). A
//! lifeline whose component is empty can be removed from both the model and
//! the multi-trace, which copes with partially observed executions (Rr).
//! A frontier action matching the head of its component is consumed (Re).
//! A vertex with no such action and no empty component is a dead end (Rn).
//! The verdict is Pass iff some path reaches the Ok sink.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::interaction::InteractionModel;
use crate::model::{Action, Lifeline, ModelError};
use crate::multitrace::MultiTrace;
use crate::semantics::frontier;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("node limit of {0} exceeded")]
    NodeLimitExceeded(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "Pass",
            Verdict::Fail => "Fail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    DepthFirst,
    BreadthFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Skip vertices that were already expanded.
    pub memoize: bool,
    /// Remove all empty-component lifelines in one step instead of one per edge.
    pub simultaneous_removal: bool,
    /// Abort with [`EngineError::NodeLimitExceeded`] after this many expansions.
    pub node_limit: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::default(),
            memoize: true,
            simultaneous_removal: true,
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Vertex {
    Ok,
    Nok,
    Node { model: InteractionModel, trace: MultiTrace },
}

impl Vertex {
    pub fn node(model: InteractionModel, trace: MultiTrace) -> Result<Self, ModelError> {
        if model.signature() != trace.signature() {
            return Err(ModelError::SignatureMismatch);
        }
        Ok(Vertex::Node { model, trace })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleTag {
    Ro,
    Rn,
    Re(Action),
    Rr(Vec<Lifeline>),
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTag::Ro => f.write_str("Ro"),
            RuleTag::Rn => f.write_str("Rn"),
            RuleTag::Re(a) => write!(f, "Re:{a}"),
            RuleTag::Rr(ls) => {
                f.write_str("Rr:")?;
                for (i, l) in ls.iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
        }
    }
}

/// Sinks measure 0; a node measures |μ| + |L| + 1. Every edge strictly
/// decreases it, so the search graph is a DAG.
pub fn measure(v: &Vertex) -> usize {
    match v {
        Vertex::Ok | Vertex::Nok => 0,
        Vertex::Node { trace, .. } => trace.total_len() + trace.signature().len() + 1,
    }
}

/// The outgoing edges of a vertex. Exactly one rule class applies to a node:
/// Ro alone, Rn alone, or a mix of Rr and Re edges. Sinks have none.
pub fn successors(v: &Vertex, config: &SearchConfig) -> Vec<(RuleTag, Vertex)> {
    let Vertex::Node { model, trace } = v else {
        return Vec::new();
    };
    if trace.is_empty() {
        return vec![(RuleTag::Ro, Vertex::Ok)];
    }
    let mut out = Vec::new();
    let empties = trace.empty_components();
    if !empties.is_empty() {
        if config.simultaneous_removal {
            out.push((
                RuleTag::Rr(empties.clone()),
                removal_target(model, trace, &empties),
            ));
        } else {
            for h in empties {
                let target = removal_target(model, trace, std::slice::from_ref(&h));
                out.push((RuleTag::Rr(vec![h]), target));
            }
        }
    }
    for (action, succ_term) in frontier(model.term()) {
        if let Some(rest) = trace.strip_head(&action) {
            let next_model =
                model.with_term(succ_term).expect("execution stays within the signature");
            out.push((RuleTag::Re(action), Vertex::Node { model: next_model, trace: rest }));
        }
    }
    if out.is_empty() {
        out.push((RuleTag::Rn, Vertex::Nok));
    }
    out
}

fn removal_target(model: &InteractionModel, trace: &MultiTrace, hs: &[Lifeline]) -> Vertex {
    Vertex::Node {
        model: model.remove_lifelines(hs).expect("empty components are signature lifelines"),
        trace: trace.remove_lifelines(hs).expect("empty components are signature lifelines"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplorationReport {
    pub verdict: Verdict,
    /// Node expansions performed (re-expansions count when memoization is off).
    pub nodes_explored: usize,
    pub max_depth: usize,
    pub elapsed: Duration,
}

pub fn analyze(
    model: &InteractionModel,
    trace: &MultiTrace,
    config: &SearchConfig,
) -> Result<ExplorationReport, EngineError> {
    Ok(explore(model, trace, config, false)?.0)
}

/// Like [`analyze`], also rendering the explored graph as one `NODE`/`EDGE`
/// line per discovery and a final `VERDICT` line.
pub fn analyze_logged(
    model: &InteractionModel,
    trace: &MultiTrace,
    config: &SearchConfig,
) -> Result<(ExplorationReport, String), EngineError> {
    let (report, log) = explore(model, trace, config, true)?;
    Ok((report, log.expect("logging was requested")))
}

fn explore(
    model: &InteractionModel,
    trace: &MultiTrace,
    config: &SearchConfig,
    logged: bool,
) -> Result<(ExplorationReport, Option<String>), EngineError> {
    if model.signature() != trace.signature() {
        return Err(EngineError::Model(ModelError::SignatureMismatch));
    }
    let start = Instant::now();
    let mut log = logged.then(String::new);
    let mut ids: HashMap<Vertex, usize> = HashMap::new();
    let mut expanded: HashSet<Vertex> = HashSet::new();
    let mut worklist: VecDeque<(Vertex, usize)> = VecDeque::new();
    let mut nodes_explored = 0usize;
    let mut max_depth = 0usize;
    let mut verdict = Verdict::Fail;

    let root = Vertex::Node { model: model.clone(), trace: trace.clone() };
    intern(&mut ids, &mut log, &root);
    worklist.push_back((root, 0));
    while let Some((vertex, depth)) = match config.strategy {
        Strategy::DepthFirst => worklist.pop_back(),
        Strategy::BreadthFirst => worklist.pop_front(),
    } {
        match vertex {
            Vertex::Ok => {
                verdict = Verdict::Pass;
                break;
            }
            Vertex::Nok => continue,
            Vertex::Node { .. } => {}
        }
        if config.memoize && !expanded.insert(vertex.clone()) {
            continue;
        }
        if let Some(limit) = config.node_limit {
            if nodes_explored >= limit {
                return Err(EngineError::NodeLimitExceeded(limit));
            }
        }
        nodes_explored += 1;
        max_depth = max_depth.max(depth);
        let from_id = ids[&vertex];
        let children = successors(&vertex, config);
        let mut batch = Vec::with_capacity(children.len());
        for (tag, child) in children {
            let child_id = intern(&mut ids, &mut log, &child);
            if let Some(log) = log.as_mut() {
                let _ = writeln!(log, "EDGE {from_id} -> {child_id} rule={tag}");
            }
            batch.push((child, depth + 1));
        }
        match config.strategy {
            // Reversed so the leftmost successor is popped first.
            Strategy::DepthFirst => worklist.extend(batch.into_iter().rev()),
            Strategy::BreadthFirst => worklist.extend(batch),
        }
    }
    if let Some(log) = log.as_mut() {
        let _ = writeln!(log, "VERDICT {verdict}");
    }
    let report = ExplorationReport { verdict, nodes_explored, max_depth, elapsed: start.elapsed() };
    Ok((report, log))
}

fn intern(ids: &mut HashMap<Vertex, usize>, log: &mut Option<String>, v: &Vertex) -> usize {
    if let Some(&id) = ids.get(v) {
        return id;
    }
    let id = ids.len();
    ids.insert(v.clone(), id);
    if let Some(log) = log.as_mut() {
        let _ = writeln!(log, "NODE {id} measure={}", measure(v));
    }
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::Interaction;
    use crate::semantics::enumerate_denotational;
    use crate::testkit::{act, ll, mt, sig};
    // The prelude's glob would clash with the engine's own `Strategy`.
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use proptest::strategy::Strategy as _;

    fn a(text: &str) -> Interaction {
        Interaction::Act(act(text))
    }

    fn model(term: Interaction, lifelines: &[&str]) -> InteractionModel {
        InteractionModel::new(sig(lifelines), term).unwrap()
    }

    fn node(m: &InteractionModel, t: &MultiTrace) -> Vertex {
        Vertex::node(m.clone(), t.clone()).unwrap()
    }

    // One subscribe handshake, then any number of published messages flowing
    // pub -> bro -> sub.
    fn pubsub() -> InteractionModel {
        let publish_round = Interaction::seq(
            a("pub!publish"),
            Interaction::seq(a("bro?publish"), Interaction::seq(a("bro!publish"), a("sub?publish"))),
        );
        model(
            Interaction::seq(
                Interaction::seq(a("sub!subscribe"), a("bro?subscribe")),
                Interaction::loop_s(publish_round),
            ),
            &["pub", "bro", "sub"],
        )
    }

    #[test]
    fn emptied_trace_accepts_regardless_of_the_term() {
        let m = model(a("l!a"), &["l"]);
        let eps = MultiTrace::empty(sig(&["l"]));
        assert_eq!(successors(&node(&m, &eps), &SearchConfig::default()), [(RuleTag::Ro, Vertex::Ok)]);

        let nothing = model(Interaction::Empty, &[]);
        let eps = MultiTrace::empty(sig(&[]));
        assert_eq!(
            successors(&node(&nothing, &eps), &SearchConfig::default()),
            [(RuleTag::Ro, Vertex::Ok)]
        );
        assert_eq!(measure(&node(&nothing, &eps)), 1);
    }

    #[test]
    fn blocked_vertex_is_a_dead_end() {
        let m = model(a("l!a"), &["l"]);
        let stuck = mt(&[("l", "l?b")]);
        assert_eq!(
            successors(&node(&m, &stuck), &SearchConfig::default()),
            [(RuleTag::Rn, Vertex::Nok)]
        );
    }

    #[test]
    fn execution_consumes_a_component_head() {
        let m = model(a("l!a"), &["l"]);
        let trace = mt(&[("l", "l!a")]);
        let succs = successors(&node(&m, &trace), &SearchConfig::default());
        assert_eq!(succs.len(), 1);
        assert_eq!(succs[0].0, RuleTag::Re(act("l!a")));
        let expected = node(&model(Interaction::Empty, &["l"]), &MultiTrace::empty(sig(&["l"])));
        assert_eq!(succs[0].1, expected);
    }

    #[test]
    fn removal_is_simultaneous_or_per_lifeline() {
        let m = model(a("bro!m"), &["pub", "bro", "sub"]);
        let trace = mt(&[("pub", ""), ("bro", "bro!m"), ("sub", "")]);
        let v = node(&m, &trace);

        let sim = successors(&v, &SearchConfig::default());
        assert_eq!(sim.len(), 2);
        assert_eq!(sim[0].0, RuleTag::Rr(vec![ll("pub"), ll("sub")]));
        let Vertex::Node { model: m2, trace: t2 } = &sim[0].1 else { panic!("expected a node") };
        assert_eq!(m2.signature(), &sig(&["bro"]));
        assert_eq!(t2, &mt(&[("bro", "bro!m")]));
        assert_eq!(sim[1].0, RuleTag::Re(act("bro!m")));

        let single = SearchConfig { simultaneous_removal: false, ..SearchConfig::default() };
        let one_at_a_time = successors(&v, &single);
        assert_eq!(
            one_at_a_time.iter().map(|(tag, _)| tag.clone()).collect::<Vec<_>>(),
            [
                RuleTag::Rr(vec![ll("pub")]),
                RuleTag::Rr(vec![ll("sub")]),
                RuleTag::Re(act("bro!m")),
            ]
        );
    }

    #[test]
    fn measure_counts_actions_lifelines_and_one() {
        assert_eq!(measure(&Vertex::Ok), 0);
        assert_eq!(measure(&Vertex::Nok), 0);
        let m = pubsub();
        let trace = mt(&[
            ("pub", "pub!publish"),
            ("bro", "bro?subscribe.bro?publish.bro!publish"),
            ("sub", "sub!subscribe.sub?publish"),
        ]);
        assert_eq!(measure(&node(&m, &trace)), 10);
    }

    #[test]
    fn analyze_accepts_prefixes_under_partial_observation() {
        let m = pubsub();
        let config = SearchConfig::default();
        let full = mt(&[
            ("pub", "pub!publish"),
            ("bro", "bro?subscribe.bro?publish.bro!publish"),
            ("sub", "sub!subscribe.sub?publish"),
        ]);
        assert_eq!(analyze(&m, &full, &config).unwrap().verdict, Verdict::Pass);

        // The same execution with the sub log missing entirely.
        let unobserved = mt(&[
            ("pub", "pub!publish"),
            ("bro", "bro?subscribe.bro?publish.bro!publish"),
            ("sub", ""),
        ]);
        assert_eq!(analyze(&m, &unobserved, &config).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn analyze_agrees_with_the_denotational_oracle_on_fixtures() {
        let m = pubsub();
        let config = SearchConfig::default();
        let accepted = enumerate_denotational(&m, 3);
        let cases = [
            mt(&[("pub", ""), ("bro", "bro!publish"), ("sub", "")]),
            mt(&[("pub", "pub!publish"), ("bro", "bro?subscribe"), ("sub", "")]),
            mt(&[("pub", ""), ("bro", ""), ("sub", "sub?publish")]),
            mt(&[("pub", "pub!publish.pub!publish"), ("bro", ""), ("sub", "")]),
        ];
        for trace in cases {
            let verdict = analyze(&m, &trace, &config).unwrap().verdict;
            let member = accepted.admits_prefix(&trace).unwrap();
            assert_eq!(verdict == Verdict::Pass, member, "disagreement on {trace}");
        }
        // The first case is the interesting dead end: a broker emission
        // observed before any subscription was observed anywhere.
        let bad = mt(&[("pub", ""), ("bro", "bro!publish"), ("sub", "")]);
        assert_eq!(analyze(&m, &bad, &config).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn analyze_rejects_mismatched_signatures() {
        let m = model(a("l!a"), &["l"]);
        let foreign = mt(&[("m", "")]);
        assert_eq!(
            analyze(&m, &foreign, &SearchConfig::default()),
            Err(EngineError::Model(ModelError::SignatureMismatch))
        );
    }

    #[test]
    fn node_limit_aborts_the_search() {
        let m = pubsub();
        let trace = mt(&[
            ("pub", "pub!publish"),
            ("bro", "bro?subscribe.bro?publish.bro!publish"),
            ("sub", "sub!subscribe.sub?publish"),
        ]);
        let config = SearchConfig { node_limit: Some(2), ..SearchConfig::default() };
        assert_eq!(analyze(&m, &trace, &config), Err(EngineError::NodeLimitExceeded(2)));
    }

    #[test]
    fn exploration_log_lists_discoveries_and_verdict() {
        let m = model(a("l!a"), &["l"]);
        let trace = mt(&[("l", "l!a")]);
        let (report, log) = analyze_logged(&m, &trace, &SearchConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(
            log,
            "NODE 0 measure=3\n\
             NODE 1 measure=2\n\
             EDGE 0 -> 1 rule=Re:l!a\n\
             NODE 2 measure=0\n\
             EDGE 1 -> 2 rule=Ro\n\
             VERDICT Pass\n"
        );

        let (report, log) = analyze_logged(&m, &mt(&[("l", "l?b")]), &SearchConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(log.ends_with("EDGE 0 -> 1 rule=Rn\nVERDICT Fail\n"));
    }

    fn arb_vertex() -> impl proptest::strategy::Strategy<Value = (InteractionModel, MultiTrace)> {
        (crate::testkit::arb_interaction(2), crate::testkit::arb_multitrace(2))
            .prop_map(|(term, trace)| {
                (InteractionModel::new(sig(&["l", "m"]), term).unwrap(), trace)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_exactly_one_rule_class_applies((m, t) in arb_vertex(), simultaneous in any::<bool>()) {
            let config = SearchConfig { simultaneous_removal: simultaneous, ..SearchConfig::default() };
            let v = node(&m, &t);
            let succs = successors(&v, &config);
            prop_assert!(!succs.is_empty());
            let classes: std::collections::BTreeSet<&str> = succs
                .iter()
                .map(|(tag, _)| match tag {
                    RuleTag::Ro => "accept",
                    RuleTag::Rn => "deadend",
                    RuleTag::Re(_) | RuleTag::Rr(_) => "progress",
                })
                .collect();
            prop_assert_eq!(classes.len(), 1);
            if matches!(succs[0].0, RuleTag::Ro | RuleTag::Rn) {
                prop_assert_eq!(succs.len(), 1);
            }
        }

        #[test]
        fn prop_measure_decreases_along_every_edge((m, t) in arb_vertex(), simultaneous in any::<bool>()) {
            let config = SearchConfig { simultaneous_removal: simultaneous, ..SearchConfig::default() };
            let v = node(&m, &t);
            let before = measure(&v);
            for (tag, child) in successors(&v, &config) {
                match tag {
                    RuleTag::Ro | RuleTag::Rn => prop_assert_eq!(measure(&child), 0),
                    RuleTag::Re(_) => prop_assert_eq!(measure(&child), before - 1),
                    RuleTag::Rr(ls) => prop_assert_eq!(measure(&child), before - ls.len()),
                }
                prop_assert!(measure(&child) < before);
            }
        }

        #[test]
        fn prop_verdict_is_config_invariant((m, t) in arb_vertex()) {
            let baseline = analyze(&m, &t, &SearchConfig::default()).unwrap().verdict;
            for strategy in [Strategy::DepthFirst, Strategy::BreadthFirst] {
                for memoize in [true, false] {
                    for simultaneous_removal in [true, false] {
                        let config = SearchConfig { strategy, memoize, simultaneous_removal, node_limit: None };
                        prop_assert_eq!(analyze(&m, &t, &config).unwrap().verdict, baseline);
                    }
                }
            }
        }

        #[test]
        fn prop_verdict_is_prefix_membership((m, t) in arb_vertex()) {
            let verdict = analyze(&m, &t, &SearchConfig::default()).unwrap().verdict;
            let bound = t.total_len().max(1);
            let member = enumerate_denotational(&m, bound).admits_prefix(&t).unwrap();
            prop_assert_eq!(verdict == Verdict::Pass, member);
        }
    }
}
