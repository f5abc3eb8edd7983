//! Interaction terms and models: the binary operators seq/par/alt, the two
//! loop flavors, and lifeline removal on terms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::model::{Action, Lifeline, ModelError, Signature};

/// An interaction term. Children are reference-counted so the exploration
/// engine can rewrite terms without deep copies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interaction {
    Empty,
    Act(Action),
    Seq(Arc<Interaction>, Arc<Interaction>),
    Par(Arc<Interaction>, Arc<Interaction>),
    Alt(Arc<Interaction>, Arc<Interaction>),
    LoopS(Arc<Interaction>),
    LoopP(Arc<Interaction>),
}

impl Interaction {
    pub fn act(action: Action) -> Self {
        Interaction::Act(action)
    }

    pub fn seq(i1: Interaction, i2: Interaction) -> Self {
        Interaction::Seq(Arc::new(i1), Arc::new(i2))
    }

    pub fn par(i1: Interaction, i2: Interaction) -> Self {
        Interaction::Par(Arc::new(i1), Arc::new(i2))
    }

    pub fn alt(i1: Interaction, i2: Interaction) -> Self {
        Interaction::Alt(Arc::new(i1), Arc::new(i2))
    }

    pub fn loop_s(body: Interaction) -> Self {
        Interaction::LoopS(Arc::new(body))
    }

    pub fn loop_p(body: Interaction) -> Self {
        Interaction::LoopP(Arc::new(body))
    }

    /// Lifelines of the actions occurring in the term.
    pub fn lifelines(&self) -> BTreeSet<Lifeline> {
        let mut out = BTreeSet::new();
        self.visit_actions(&mut |a| {
            out.insert(a.lifeline.clone());
        });
        out
    }

    pub fn actions(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        self.visit_actions(&mut |a| {
            out.insert(a.clone());
        });
        out
    }

    fn visit_actions(&self, f: &mut impl FnMut(&Action)) {
        match self {
            Interaction::Empty => {}
            Interaction::Act(a) => f(a),
            Interaction::Seq(i1, i2) | Interaction::Par(i1, i2) | Interaction::Alt(i1, i2) => {
                i1.visit_actions(f);
                i2.visit_actions(f);
            }
            Interaction::LoopS(body) | Interaction::LoopP(body) => body.visit_actions(f),
        }
    }

    /// Rewrites every action of lifeline `h` to the empty interaction. The
    /// term structure is preserved as-is; no simplification is applied.
    pub fn remove_lifeline(&self, h: &Lifeline) -> Interaction {
        match self {
            Interaction::Empty => Interaction::Empty,
            Interaction::Act(a) => {
                if a.lifeline == *h {
                    Interaction::Empty
                } else {
                    self.clone()
                }
            }
            Interaction::Seq(i1, i2) => {
                Interaction::seq(i1.remove_lifeline(h), i2.remove_lifeline(h))
            }
            Interaction::Par(i1, i2) => {
                Interaction::par(i1.remove_lifeline(h), i2.remove_lifeline(h))
            }
            Interaction::Alt(i1, i2) => {
                Interaction::alt(i1.remove_lifeline(h), i2.remove_lifeline(h))
            }
            Interaction::LoopS(body) => Interaction::loop_s(body.remove_lifeline(h)),
            Interaction::LoopP(body) => Interaction::loop_p(body.remove_lifeline(h)),
        }
    }
}

impl From<Action> for Interaction {
    fn from(a: Action) -> Self {
        Interaction::Act(a)
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interaction::Empty => write!(f, "0"),
            Interaction::Act(a) => write!(f, "{a}"),
            Interaction::Seq(i1, i2) => write!(f, "seq({i1}, {i2})"),
            Interaction::Par(i1, i2) => write!(f, "par({i1}, {i2})"),
            Interaction::Alt(i1, i2) => write!(f, "alt({i1}, {i2})"),
            Interaction::LoopS(body) => write!(f, "loopS({body})"),
            Interaction::LoopP(body) => write!(f, "loopP({body})"),
        }
    }
}

/// An interaction term paired with the signature it is interpreted over. The
/// signature may declare lifelines the term never uses; the term must not use
/// lifelines outside the signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InteractionModel {
    signature: Signature,
    term: Interaction,
}

impl InteractionModel {
    pub fn new(signature: Signature, term: Interaction) -> Result<Self, ModelError> {
        if let Some(l) = term.lifelines().into_iter().find(|l| !signature.contains(l)) {
            return Err(ModelError::LifelineNotInSignature(l.name().to_owned()));
        }
        Ok(InteractionModel { signature, term })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn term(&self) -> &Interaction {
        &self.term
    }

    /// Same signature, different term.
    pub fn with_term(&self, term: Interaction) -> Result<Self, ModelError> {
        Self::new(self.signature.clone(), term)
    }

    /// Removes `h` from the signature and rewrites its actions in the term.
    pub fn remove_lifeline(&self, h: &Lifeline) -> Result<Self, ModelError> {
        Ok(InteractionModel {
            signature: self.signature.without(h)?,
            term: self.term.remove_lifeline(h),
        })
    }

    pub fn remove_lifelines(&self, hs: &[Lifeline]) -> Result<Self, ModelError> {
        let mut term = self.term.clone();
        for h in hs {
            term = term.remove_lifeline(h);
        }
        Ok(InteractionModel { signature: self.signature.without_all(hs)?, term })
    }
}

impl fmt::Display for InteractionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "signature {{ ")?;
        for (i, l) in self.signature.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        writeln!(f, " }}")?;
        write!(f, "interaction {{ {} }}", self.term)
    }
}
