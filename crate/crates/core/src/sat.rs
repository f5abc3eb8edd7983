//! CNF satisfiability bridge: DIMACS parsing, a brute-force oracle, and the
//! polynomial reduction of satisfiability onto conformance checking.
//!
//! The reduction uses one lifeline per clause and a single message `m`. Each
//! variable contributes an alternative between its positive and negative
//! occurrence chains; the query multi-trace expects exactly one `l_j?m` per
//! clause, so it is a multi-prefix of an accepted multi-trace iff some branch
//! choice (a variable assignment) covers every clause.

use thiserror::Error;

use crate::engine::{analyze, EngineError, SearchConfig, Verdict};
use crate::interaction::{Interaction, InteractionModel};
use crate::model::{Action, Lifeline, Message, Signature};
use crate::multitrace::MultiTrace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {0}: duplicate `p cnf` header")]
    DuplicateHeader(usize),
    #[error("line {0}: malformed header (expected `p cnf <variables> <clauses>`)")]
    MalformedHeader(usize),
    #[error("line {0}: unexpected token `{1}`")]
    UnexpectedToken(usize, String),
    #[error("variable {variable} exceeds the {declared} declared variables")]
    VariableOutOfRange { variable: u64, declared: u32 },
    #[error("literal variable index must be nonzero")]
    ZeroLiteral,
    #[error("empty clause")]
    EmptyClause,
    #[error("the formula declares no variables")]
    NoVariables,
    #[error("the formula has no clauses")]
    NoClauses,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("unterminated clause (missing trailing 0)")]
    UnterminatedClause,
    #[error("{variables} variables exceed the brute-force limit of {limit}")]
    TooManyVariables { variables: u32, limit: u32 },
}

/// A variable (1-based) or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    variable: u32,
    negated: bool,
}

impl Literal {
    pub fn new(variable: u32, negated: bool) -> Result<Self, SatError> {
        if variable == 0 {
            return Err(SatError::ZeroLiteral);
        }
        Ok(Literal { variable, negated })
    }

    pub fn variable(self) -> u32 {
        self.variable
    }

    pub fn negated(self) -> bool {
        self.negated
    }
}

/// A disjunction of distinct literals. Duplicates are dropped on
/// construction; a clause holding both `x` and `¬x` is kept but detectable
/// via [`Clause::is_tautological`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, SatError> {
        let mut distinct: Vec<Literal> = Vec::new();
        for lit in literals {
            if !distinct.contains(&lit) {
                distinct.push(lit);
            }
        }
        if distinct.is_empty() {
            return Err(SatError::EmptyClause);
        }
        Ok(Clause { literals: distinct })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals.contains(&lit)
    }

    pub fn is_tautological(&self) -> bool {
        self.literals
            .iter()
            .any(|l| l.negated && self.contains(Literal { variable: l.variable, negated: false }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_variables: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_variables: u32, clauses: Vec<Clause>) -> Result<Self, SatError> {
        if num_variables == 0 {
            return Err(SatError::NoVariables);
        }
        if clauses.is_empty() {
            return Err(SatError::NoClauses);
        }
        for clause in &clauses {
            if let Some(lit) = clause.literals().iter().find(|l| l.variable > num_variables) {
                return Err(SatError::VariableOutOfRange {
                    variable: u64::from(lit.variable),
                    declared: num_variables,
                });
            }
        }
        Ok(CnfFormula { num_variables, clauses })
    }

    pub fn num_variables(&self) -> u32 {
        self.num_variables
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// True iff every clause has exactly three distinct literals.
    pub fn is_strict_three(&self) -> bool {
        self.clauses.iter().all(|c| c.literals.len() == 3)
    }
}

/// Parses the DIMACS CNF format: `c` comment lines, one `p cnf <n> <k>`
/// header, then `k` zero-terminated clauses of nonzero integers.
pub fn parse_dimacs(src: &str) -> Result<CnfFormula, SatError> {
    let mut header: Option<(u32, usize)> = None;
    let mut ints: Vec<i64> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(SatError::DuplicateHeader(line_no));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", n, k] => n.parse::<u32>().ok().zip(k.parse::<usize>().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or(SatError::MalformedHeader(line_no))?);
            continue;
        }
        if header.is_none() {
            return Err(SatError::MissingHeader);
        }
        for tok in line.split_whitespace() {
            ints.push(
                tok.parse::<i64>()
                    .map_err(|_| SatError::UnexpectedToken(line_no, tok.to_owned()))?,
            );
        }
    }
    let (num_variables, num_clauses) = header.ok_or(SatError::MissingHeader)?;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for v in ints {
        if v == 0 {
            clauses.push(Clause::new(current.drain(..))?);
            continue;
        }
        let magnitude = v.unsigned_abs();
        if magnitude > u64::from(num_variables) {
            return Err(SatError::VariableOutOfRange {
                variable: magnitude,
                declared: num_variables,
            });
        }
        current.push(Literal::new(magnitude as u32, v < 0)?);
    }
    if !current.is_empty() {
        return Err(SatError::UnterminatedClause);
    }
    if clauses.len() != num_clauses {
        return Err(SatError::ClauseCountMismatch { declared: num_clauses, found: clauses.len() });
    }
    CnfFormula::new(num_variables, clauses)
}

// Right-nested chain; a single item stays bare and an empty list is 0.
fn seq_chain(mut items: Vec<Interaction>) -> Interaction {
    match items.pop() {
        None => Interaction::Empty,
        Some(last) => items.into_iter().rev().fold(last, |acc, i| Interaction::seq(i, acc)),
    }
}

/// Builds the conformance-checking instance whose verdict decides
/// satisfiability: one lifeline `l<j>` per clause, message `m`, the query
/// multi-trace with one `l_j?m` per component, and an interaction sequencing
/// one positive/negative alternative per variable.
pub fn reduce_cnf(phi: &CnfFormula) -> (InteractionModel, MultiTrace) {
    let lifelines: Vec<Lifeline> = (1..=phi.clauses.len())
        .map(|j| Lifeline::new(format!("l{j}")).expect("generated name is a valid identifier"))
        .collect();
    let message = Message::new("m").expect("valid identifier");
    let signature = Signature::new(lifelines.iter().cloned()).expect("generated names are unique");

    let occurrence_chain = |lit: Literal| {
        seq_chain(
            phi.clauses
                .iter()
                .enumerate()
                .filter(|(_, clause)| clause.contains(lit))
                .map(|(j, _)| {
                    Interaction::Act(Action::reception(lifelines[j].clone(), message.clone()))
                })
                .collect(),
        )
    };
    let term = seq_chain(
        (1..=phi.num_variables)
            .map(|v| {
                Interaction::alt(
                    occurrence_chain(Literal { variable: v, negated: false }),
                    occurrence_chain(Literal { variable: v, negated: true }),
                )
            })
            .collect(),
    );
    let model = InteractionModel::new(signature.clone(), term)
        .expect("reduction actions lie within the generated signature");
    let trace = MultiTrace::from_components(
        signature,
        lifelines
            .iter()
            .map(|l| (l.clone(), vec![Action::reception(l.clone(), message.clone())])),
    )
    .expect("one component per generated lifeline");
    (model, trace)
}

/// Exhaustive satisfiability check, as an oracle for [`sat_solve_via_rv`].
pub fn brute_force_sat(phi: &CnfFormula) -> Result<bool, SatError> {
    const LIMIT: u32 = 24;
    if phi.num_variables > LIMIT {
        return Err(SatError::TooManyVariables { variables: phi.num_variables, limit: LIMIT });
    }
    Ok((0u32..1 << phi.num_variables).any(|assignment| {
        phi.clauses.iter().all(|clause| {
            clause
                .literals
                .iter()
                .any(|lit| ((assignment >> (lit.variable - 1)) & 1 == 1) != lit.negated)
        })
    }))
}

/// Decides satisfiability by analyzing the reduction: Pass means SAT.
pub fn sat_solve_via_rv(phi: &CnfFormula, config: &SearchConfig) -> Result<bool, EngineError> {
    let (model, trace) = reduce_cnf(phi);
    Ok(analyze(&model, &trace, config)?.verdict == Verdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{act, mt};
    use proptest::prelude::*;

    fn lit(v: i32) -> Literal {
        Literal::new(v.unsigned_abs(), v < 0).unwrap()
    }

    fn clause(vs: &[i32]) -> Clause {
        Clause::new(vs.iter().map(|&v| lit(v))).unwrap()
    }

    fn formula(num_variables: u32, clauses: &[&[i32]]) -> CnfFormula {
        CnfFormula::new(num_variables, clauses.iter().map(|vs| clause(vs)).collect()).unwrap()
    }

    // Three variables, four clauses, satisfiable by the all-false assignment;
    // the third and fourth clauses are tautological.
    fn mixed_formula() -> CnfFormula {
        formula(3, &[&[-1, -2, -3], &[-1, 2, 3], &[1, -1, 2], &[2, 3, -3]])
    }

    #[test]
    fn literal_indices_are_one_based() {
        assert_eq!(Literal::new(0, false), Err(SatError::ZeroLiteral));
        let l = lit(-3);
        assert_eq!((l.variable(), l.negated()), (3, true));
    }

    #[test]
    fn clause_drops_duplicates_and_flags_tautologies() {
        let c = Clause::new([lit(1), lit(1), lit(-2)]).unwrap();
        assert_eq!(c.literals(), [lit(1), lit(-2)]);
        assert!(!c.is_tautological());
        assert!(clause(&[1, -1]).is_tautological());
        assert_eq!(Clause::new([]), Err(SatError::EmptyClause));
    }

    #[test]
    fn formula_validates_counts_and_ranges() {
        assert_eq!(
            CnfFormula::new(1, vec![clause(&[2])]),
            Err(SatError::VariableOutOfRange { variable: 2, declared: 1 })
        );
        assert_eq!(CnfFormula::new(0, vec![clause(&[1])]), Err(SatError::NoVariables));
        assert_eq!(CnfFormula::new(1, vec![]), Err(SatError::NoClauses));
        assert!(mixed_formula().is_strict_three());
        assert!(!formula(2, &[&[1, 2], &[1]]).is_strict_three());
    }

    #[test]
    fn dimacs_parses_comments_header_and_clauses() {
        let phi = parse_dimacs("p cnf 1 1\n1 0").unwrap();
        assert_eq!(phi, formula(1, &[&[1]]));

        let phi = parse_dimacs("c comment\np cnf 2 2\n1 -2 0\n-1 2 0").unwrap();
        assert_eq!(phi, formula(2, &[&[1, -2], &[-1, 2]]));

        // Clauses may span lines or share one.
        let phi = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n-2 -3 0").unwrap();
        assert_eq!(phi, formula(3, &[&[1, 2, 3], &[-1, -2, -3]]));
    }

    #[test]
    fn dimacs_rejects_malformed_input() {
        assert_eq!(
            parse_dimacs("p cnf 1 1\n2 0"),
            Err(SatError::VariableOutOfRange { variable: 2, declared: 1 })
        );
        assert_eq!(parse_dimacs("1 0"), Err(SatError::MissingHeader));
        assert_eq!(parse_dimacs("c only comments"), Err(SatError::MissingHeader));
        assert_eq!(
            parse_dimacs("p cnf 1 1\np cnf 1 1\n1 0"),
            Err(SatError::DuplicateHeader(2))
        );
        assert_eq!(parse_dimacs("p cnf one 1\n1 0"), Err(SatError::MalformedHeader(1)));
        assert_eq!(
            parse_dimacs("p cnf 1 1\n1 x 0"),
            Err(SatError::UnexpectedToken(2, "x".into()))
        );
        assert_eq!(parse_dimacs("p cnf 1 1\n1"), Err(SatError::UnterminatedClause));
        assert_eq!(
            parse_dimacs("p cnf 1 2\n1 0"),
            Err(SatError::ClauseCountMismatch { declared: 2, found: 1 })
        );
        assert_eq!(parse_dimacs("p cnf 1 1\n0"), Err(SatError::EmptyClause));
    }

    #[test]
    fn reduction_of_a_single_clause() {
        let phi = formula(3, &[&[1, 2, 3]]);
        let (model, trace) = reduce_cnf(&phi);
        let hit = || Interaction::Act(act("l1?m"));
        assert_eq!(
            model.term(),
            &Interaction::seq(
                Interaction::alt(hit(), Interaction::Empty),
                Interaction::seq(
                    Interaction::alt(hit(), Interaction::Empty),
                    Interaction::alt(hit(), Interaction::Empty),
                ),
            )
        );
        assert_eq!(trace, mt(&[("l1", "l1?m")]));
        assert!(sat_solve_via_rv(&phi, &SearchConfig::default()).unwrap());
    }

    #[test]
    fn reduction_covers_each_clause_from_each_occurrence() {
        let (model, trace) = reduce_cnf(&mixed_formula());
        assert_eq!(trace, mt(&[("l1", "l1?m"), ("l2", "l2?m"), ("l3", "l3?m"), ("l4", "l4?m")]));
        let a = |s| Interaction::Act(act(s));
        let expected = Interaction::seq(
            Interaction::alt(
                a("l3?m"),
                Interaction::seq(a("l1?m"), Interaction::seq(a("l2?m"), a("l3?m"))),
            ),
            Interaction::seq(
                Interaction::alt(
                    Interaction::seq(a("l2?m"), Interaction::seq(a("l3?m"), a("l4?m"))),
                    a("l1?m"),
                ),
                Interaction::alt(
                    Interaction::seq(a("l2?m"), a("l4?m")),
                    Interaction::seq(a("l1?m"), a("l4?m")),
                ),
            ),
        );
        assert_eq!(model.term(), &expected);
        assert_eq!(trace.total_len(), 4);
    }

    #[test]
    fn brute_force_enumerates_assignments() {
        assert!(!brute_force_sat(&formula(1, &[&[1], &[-1]])).unwrap());
        assert!(brute_force_sat(&formula(3, &[&[1, 2, 3]])).unwrap());
        assert!(brute_force_sat(&mixed_formula()).unwrap());
        let wide = CnfFormula::new(25, vec![clause(&[1])]).unwrap();
        assert_eq!(
            brute_force_sat(&wide),
            Err(SatError::TooManyVariables { variables: 25, limit: 24 })
        );
    }

    #[test]
    fn solving_via_conformance_matches_the_oracle_on_fixtures() {
        let config = SearchConfig::default();
        assert!(sat_solve_via_rv(&mixed_formula(), &config).unwrap());
        assert!(!sat_solve_via_rv(&formula(1, &[&[1], &[-1]]), &config).unwrap());
        // A variable absent from every clause contributes an alt(0, 0) no-op.
        let slack = formula(2, &[&[1]]);
        assert!(sat_solve_via_rv(&slack, &config).unwrap());
        assert!(brute_force_sat(&slack).unwrap());
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (1u32..=4).prop_flat_map(|n| {
            let literal =
                (1u32..=n, any::<bool>()).prop_map(|(v, neg)| Literal::new(v, neg).unwrap());
            let clause = prop::collection::vec(literal, 1..=3)
                .prop_map(|ls| Clause::new(ls).unwrap());
            (Just(n), prop::collection::vec(clause, 1..=6))
                .prop_map(|(n, cs)| CnfFormula::new(n, cs).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_reduction_decides_satisfiability(phi in arb_formula()) {
            let expected = brute_force_sat(&phi).unwrap();
            prop_assert_eq!(sat_solve_via_rv(&phi, &SearchConfig::default()).unwrap(), expected);
        }

        #[test]
        fn prop_reduction_size_is_linear_in_occurrences(phi in arb_formula()) {
            fn leaves(i: &Interaction) -> usize {
                match i {
                    Interaction::Empty | Interaction::Act(_) => 1,
                    Interaction::Seq(a, b) | Interaction::Par(a, b) | Interaction::Alt(a, b) => {
                        leaves(a) + leaves(b)
                    }
                    Interaction::LoopS(b) | Interaction::LoopP(b) => leaves(b),
                }
            }
            let (model, trace) = reduce_cnf(&phi);
            prop_assert_eq!(trace.total_len(), phi.clauses().len());
            let occurrences: usize = phi.clauses().iter().map(|c| c.literals().len()).sum();
            prop_assert!(leaves(model.term()) <= occurrences + 2 * phi.num_variables() as usize);
        }
    }
}
