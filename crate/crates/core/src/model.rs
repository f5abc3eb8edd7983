//! Lifelines, messages, actions, and signatures: the vocabulary shared by
//! multi-traces and interaction terms.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid identifier {0:?} (expected [A-Za-z_][A-Za-z0-9_]*)")]
    InvalidIdentifier(String),
    #[error("duplicate lifeline `{0}`")]
    DuplicateLifeline(String),
    #[error("lifeline `{0}` is not in the signature")]
    LifelineNotInSignature(String),
    #[error("operands have different signatures")]
    SignatureMismatch,
    #[error("component `{component}` holds an action of lifeline `{action_lifeline}`")]
    ComponentMismatch {
        component: String,
        action_lifeline: String,
    },
}

pub(crate) fn is_valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The interface of one distributed subsystem. Equality is by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lifeline(Arc<str>);

impl Lifeline {
    pub fn new(name: impl AsRef<str>) -> Result<Self, ModelError> {
        let name = name.as_ref();
        if is_valid_ident(name) {
            Ok(Lifeline(Arc::from(name)))
        } else {
            Err(ModelError::InvalidIdentifier(name.to_owned()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Lifeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A message name. Equality is by name; the universe of messages is open.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Message(Arc<str>);

impl Message {
    pub fn new(name: impl AsRef<str>) -> Result<Self, ModelError> {
        let name = name.as_ref();
        if is_valid_ident(name) {
            Ok(Message(Arc::from(name)))
        } else {
            Err(ModelError::InvalidIdentifier(name.to_owned()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    Emission,
    Reception,
}

impl ActionKind {
    pub fn symbol(self) -> char {
        match self {
            ActionKind::Emission => '!',
            ActionKind::Reception => '?',
        }
    }
}

/// An emission (`l!m`) or reception (`l?m`) observed on lifeline `l`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub lifeline: Lifeline,
    pub kind: ActionKind,
    pub message: Message,
}

impl Action {
    pub fn new(lifeline: Lifeline, kind: ActionKind, message: Message) -> Self {
        Action { lifeline, kind, message }
    }

    pub fn emission(lifeline: Lifeline, message: Message) -> Self {
        Action::new(lifeline, ActionKind::Emission, message)
    }

    pub fn reception(lifeline: Lifeline, message: Message) -> Self {
        Action::new(lifeline, ActionKind::Reception, message)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.lifeline, self.kind.symbol(), self.message)
    }
}

/// The finite, duplicate-free set of lifelines a model and its multi-traces
/// range over. Declaration order is kept for deterministic output only;
/// equality and hashing treat the signature as a set.
#[derive(Debug, Clone)]
pub struct Signature {
    lifelines: Vec<Lifeline>,
}

impl Signature {
    pub fn new(lifelines: impl IntoIterator<Item = Lifeline>) -> Result<Self, ModelError> {
        let lifelines: Vec<Lifeline> = lifelines.into_iter().collect();
        for (i, l) in lifelines.iter().enumerate() {
            if lifelines[..i].contains(l) {
                return Err(ModelError::DuplicateLifeline(l.name().to_owned()));
            }
        }
        Ok(Signature { lifelines })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Lifeline> {
        self.lifelines.iter()
    }

    pub fn len(&self) -> usize {
        self.lifelines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifelines.is_empty()
    }

    pub fn contains(&self, l: &Lifeline) -> bool {
        self.lifelines.contains(l)
    }

    /// The signature with `h` removed, keeping the remaining declaration order.
    pub fn without(&self, h: &Lifeline) -> Result<Signature, ModelError> {
        if !self.contains(h) {
            return Err(ModelError::LifelineNotInSignature(h.name().to_owned()));
        }
        Ok(Signature {
            lifelines: self.lifelines.iter().filter(|l| *l != h).cloned().collect(),
        })
    }

    pub fn without_all(&self, hs: &[Lifeline]) -> Result<Signature, ModelError> {
        for h in hs {
            if !self.contains(h) {
                return Err(ModelError::LifelineNotInSignature(h.name().to_owned()));
            }
        }
        Ok(Signature {
            lifelines: self.lifelines.iter().filter(|l| !hs.contains(l)).cloned().collect(),
        })
    }

    fn sorted(&self) -> Vec<&Lifeline> {
        let mut v: Vec<&Lifeline> = self.lifelines.iter().collect();
        v.sort();
        v
    }
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.lifelines.len() == other.lifelines.len()
            && self.lifelines.iter().all(|l| other.contains(l))
    }
}

impl Eq for Signature {}

impl Hash for Signature {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Must agree with the set-based Eq, so hash in sorted order.
        self.lifelines.len().hash(state);
        for l in self.sorted() {
            l.hash(state);
        }
    }
}
