//! Multi-traces and their algebra: concatenation, lifeline removal,
//! sequencing, interleaving, union, bounded Kleene closures, and the
//! multi-prefix relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::model::{Action, Lifeline, ModelError, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One observed action sequence per lifeline of a signature, with no ordering
/// between components.
#[derive(Debug, Clone)]
pub struct MultiTrace {
    signature: Signature,
    components: BTreeMap<Lifeline, Vec<Action>>,
}

// The component key set always equals the signature's lifeline set, so
// comparing and hashing the key-ordered map alone is sound; the signature
// contributes only its declaration order, which is display-only.
impl PartialEq for MultiTrace {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

impl Eq for MultiTrace {}

impl PartialOrd for MultiTrace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiTrace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.components.cmp(&other.components)
    }
}

impl Hash for MultiTrace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.components.hash(state);
    }
}

impl MultiTrace {
    /// The empty multi-trace over `signature` (every component is ε).
    pub fn empty(signature: Signature) -> Self {
        let components = signature.iter().map(|l| (l.clone(), Vec::new())).collect();
        MultiTrace { signature, components }
    }

    pub fn from_components(
        signature: Signature,
        components: impl IntoIterator<Item = (Lifeline, Vec<Action>)>,
    ) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for (l, actions) in components {
            if !signature.contains(&l) {
                return Err(ModelError::LifelineNotInSignature(l.name().to_owned()));
            }
            if let Some(a) = actions.iter().find(|a| a.lifeline != l) {
                return Err(ModelError::ComponentMismatch {
                    component: l.name().to_owned(),
                    action_lifeline: a.lifeline.name().to_owned(),
                });
            }
            if map.insert(l.clone(), actions).is_some() {
                return Err(ModelError::DuplicateLifeline(l.name().to_owned()));
            }
        }
        if map.len() != signature.len() {
            let missing = signature.iter().find(|l| !map.contains_key(*l)).expect("some lifeline lacks a component");
            return Err(ModelError::LifelineNotInSignature(missing.name().to_owned()));
        }
        Ok(MultiTrace { signature, components: map })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn component(&self, l: &Lifeline) -> Option<&[Action]> {
        self.components.get(l).map(Vec::as_slice)
    }

    /// Components in key order.
    pub fn components(&self) -> impl Iterator<Item = (&Lifeline, &[Action])> {
        self.components.iter().map(|(l, v)| (l, v.as_slice()))
    }

    /// Cumulative length: the sum of all component lengths.
    pub fn total_len(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.values().all(Vec::is_empty)
    }

    pub fn head(&self, l: &Lifeline) -> Option<&Action> {
        self.components.get(l).and_then(|c| c.first())
    }

    /// Lifelines whose component is ε, in signature order.
    pub fn empty_components(&self) -> Vec<Lifeline> {
        self.signature
            .iter()
            .filter(|l| self.components.get(*l).is_some_and(Vec::is_empty))
            .cloned()
            .collect()
    }

    /// Prepends (Left) or appends (Right) `action` to its lifeline's component.
    pub fn attach(&self, action: &Action, side: Side) -> Result<Self, ModelError> {
        if !self.signature.contains(&action.lifeline) {
            return Err(ModelError::LifelineNotInSignature(action.lifeline.name().to_owned()));
        }
        let mut components = self.components.clone();
        let comp = components.get_mut(&action.lifeline).expect("component for signature lifeline");
        match side {
            Side::Left => comp.insert(0, action.clone()),
            Side::Right => comp.push(action.clone()),
        }
        Ok(MultiTrace { signature: self.signature.clone(), components })
    }

    /// The multi-trace with `action` consumed from the head of its component,
    /// or None if that component does not start with `action`.
    pub fn strip_head(&self, action: &Action) -> Option<Self> {
        let comp = self.components.get(&action.lifeline)?;
        if comp.first() != Some(action) {
            return None;
        }
        let mut components = self.components.clone();
        components.get_mut(&action.lifeline).expect("checked above").remove(0);
        Some(MultiTrace { signature: self.signature.clone(), components })
    }

    /// Drops the component of `h`; the signature loses `h`.
    pub fn remove_lifeline(&self, h: &Lifeline) -> Result<Self, ModelError> {
        let signature = self.signature.without(h)?;
        let mut components = self.components.clone();
        components.remove(h);
        Ok(MultiTrace { signature, components })
    }

    pub fn remove_lifelines(&self, hs: &[Lifeline]) -> Result<Self, ModelError> {
        let signature = self.signature.without_all(hs)?;
        let mut components = self.components.clone();
        for h in hs {
            components.remove(h);
        }
        Ok(MultiTrace { signature, components })
    }

    /// Componentwise concatenation.
    pub fn seq(&self, other: &Self) -> Result<Self, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        let components = self
            .components
            .iter()
            .map(|(l, u)| {
                let mut w = u.clone();
                w.extend_from_slice(other.components.get(l).expect("same signature"));
                (l.clone(), w)
            })
            .collect();
        Ok(MultiTrace { signature: self.signature.clone(), components })
    }

    /// All interleavings: each component of the result shuffles the two
    /// operands' components for that lifeline.
    pub fn interleave(&self, other: &Self) -> Result<MultiTraceSet, ModelError> {
        Ok(self
            .interleave_capped(other, usize::MAX)?
            .expect("uncapped interleaving cannot overflow"))
    }

    pub(crate) fn interleave_capped(
        &self,
        other: &Self,
        cap: usize,
    ) -> Result<Option<MultiTraceSet>, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        let mut per_lifeline: Vec<(&Lifeline, Vec<Vec<Action>>)> = Vec::new();
        let mut product: usize = 1;
        for (l, u) in &self.components {
            let v = other.components.get(l).expect("same signature");
            let Some(shuffles) = shuffle_words(u, v, cap) else {
                return Ok(None);
            };
            product = product.saturating_mul(shuffles.len());
            if product > cap {
                return Ok(None);
            }
            per_lifeline.push((l, shuffles.into_iter().collect()));
        }
        let mut out = MultiTraceSet::new(self.signature.clone());
        let mut odometer = vec![0usize; per_lifeline.len()];
        loop {
            let components: BTreeMap<Lifeline, Vec<Action>> = per_lifeline
                .iter()
                .zip(&odometer)
                .map(|((l, words), i)| ((*l).clone(), words[*i].clone()))
                .collect();
            out.elements.insert(MultiTrace { signature: self.signature.clone(), components });
            let mut pos = 0;
            loop {
                if pos == odometer.len() {
                    return Ok(Some(out));
                }
                odometer[pos] += 1;
                if odometer[pos] < per_lifeline[pos].1.len() {
                    break;
                }
                odometer[pos] = 0;
                pos += 1;
            }
        }
    }

    /// The two-element set {self, other} (a singleton if they are equal).
    pub fn union(&self, other: &Self) -> Result<MultiTraceSet, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        let mut out = MultiTraceSet::new(self.signature.clone());
        out.elements.insert(self.clone());
        out.elements.insert(other.clone());
        Ok(out)
    }

    /// True iff every component of `self` is a word-prefix of the matching
    /// component of `other`.
    pub fn is_multi_prefix_of(&self, other: &Self) -> Result<bool, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        Ok(self.components.iter().all(|(l, u)| {
            let v = other.components.get(l).expect("same signature");
            v.len() >= u.len() && v[..u.len()] == u[..]
        }))
    }
}

impl fmt::Display for MultiTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in self.signature.iter() {
            if !first {
                writeln!(f)?;
            }
            first = false;
            let comp = self.components.get(l).expect("component for signature lifeline");
            write!(f, "[{l}] ")?;
            if comp.is_empty() {
                write!(f, "eps")?;
            } else {
                for (i, a) in comp.iter().enumerate() {
                    if i > 0 {
                        write!(f, ".")?;
                    }
                    write!(f, "{a}")?;
                }
            }
        }
        Ok(())
    }
}

/// All deduplicated shuffles of two action words, or None once more than
/// `cap` results (or a proportional amount of work) would be needed.
fn shuffle_words(u: &[Action], v: &[Action], cap: usize) -> Option<BTreeSet<Vec<Action>>> {
    fn go(
        u: &[Action],
        v: &[Action],
        prefix: &mut Vec<Action>,
        out: &mut BTreeSet<Vec<Action>>,
        cap: usize,
        fuel: &mut usize,
    ) -> bool {
        if *fuel == 0 {
            return false;
        }
        *fuel -= 1;
        if u.is_empty() || v.is_empty() {
            let mut w = prefix.clone();
            w.extend_from_slice(if u.is_empty() { v } else { u });
            out.insert(w);
            return out.len() <= cap;
        }
        prefix.push(u[0].clone());
        let ok = go(&u[1..], v, prefix, out, cap, fuel);
        prefix.pop();
        if !ok {
            return false;
        }
        prefix.push(v[0].clone());
        let ok = go(u, &v[1..], prefix, out, cap, fuel);
        prefix.pop();
        ok
    }

    let mut out = BTreeSet::new();
    let mut prefix = Vec::with_capacity(u.len() + v.len());
    let mut fuel = cap.saturating_mul(8).saturating_add(4096);
    go(u, v, &mut prefix, &mut out, cap, &mut fuel).then_some(out)
}

/// Which lifted operator a Kleene closure iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Seq,
    Par,
}

/// A deduplicated set of multi-traces sharing one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiTraceSet {
    signature: Signature,
    elements: BTreeSet<MultiTrace>,
}

impl MultiTraceSet {
    pub fn new(signature: Signature) -> Self {
        MultiTraceSet { signature, elements: BTreeSet::new() }
    }

    /// The singleton {ε_L}.
    pub fn epsilon(signature: Signature) -> Self {
        let mut s = Self::new(signature.clone());
        s.elements.insert(MultiTrace::empty(signature));
        s
    }

    pub fn from_elements(
        signature: Signature,
        elements: impl IntoIterator<Item = MultiTrace>,
    ) -> Result<Self, ModelError> {
        let mut s = Self::new(signature);
        for mt in elements {
            s.insert(mt)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, mt: MultiTrace) -> Result<bool, ModelError> {
        if mt.signature != self.signature {
            return Err(ModelError::SignatureMismatch);
        }
        Ok(self.elements.insert(mt))
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, mt: &MultiTrace) -> bool {
        self.elements.contains(mt)
    }

    /// Elements in key order (deterministic).
    pub fn iter(&self) -> impl Iterator<Item = &MultiTrace> {
        self.elements.iter()
    }

    /// True iff `mt` is a multi-prefix of some element.
    pub fn admits_prefix(&self, mt: &MultiTrace) -> Result<bool, ModelError> {
        for t in &self.elements {
            if mt.is_multi_prefix_of(t)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Plain set union (the lifted alternative operator).
    pub fn union_with(&self, other: &Self) -> Result<Self, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        let mut out = self.clone();
        out.elements.extend(other.elements.iter().cloned());
        Ok(out)
    }

    /// Pairwise sequencing of the two sets.
    pub fn seq(&self, other: &Self) -> Result<Self, ModelError> {
        Ok(self.seq_capped(other, usize::MAX)?.expect("uncapped sequencing cannot overflow"))
    }

    pub(crate) fn seq_capped(&self, other: &Self, cap: usize) -> Result<Option<Self>, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        let mut out = Self::new(self.signature.clone());
        for a in &self.elements {
            for b in &other.elements {
                out.elements.insert(a.seq(b)?);
                if out.elements.len() > cap {
                    return Ok(None);
                }
            }
        }
        Ok(Some(out))
    }

    /// Pairwise interleaving of the two sets.
    pub fn interleave(&self, other: &Self) -> Result<Self, ModelError> {
        Ok(self
            .interleave_capped(other, usize::MAX)?
            .expect("uncapped interleaving cannot overflow"))
    }

    pub(crate) fn interleave_capped(
        &self,
        other: &Self,
        cap: usize,
    ) -> Result<Option<Self>, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        let mut out = Self::new(self.signature.clone());
        for a in &self.elements {
            for b in &other.elements {
                let Some(pair) = a.interleave_capped(b, cap)? else {
                    return Ok(None);
                };
                out.elements.extend(pair.elements);
                if out.elements.len() > cap {
                    return Ok(None);
                }
            }
        }
        Ok(Some(out))
    }

    /// Bounded Kleene closure: ∪_{j=0..bound} of the j-fold `op` powers.
    /// ε elements of the base are skipped when building powers; they only
    /// reproduce lower powers and would make ε-accepting loop bodies spin.
    pub fn closure(&self, op: CombineOp, bound: usize) -> Self {
        self.closure_capped(op, bound, usize::MAX).expect("uncapped closure cannot overflow")
    }

    pub(crate) fn closure_capped(&self, op: CombineOp, bound: usize, cap: usize) -> Option<Self> {
        let epsilon = MultiTrace::empty(self.signature.clone());
        let mut base = self.clone();
        base.elements.remove(&epsilon);
        let mut result = Self::epsilon(self.signature.clone());
        let mut power = Self::epsilon(self.signature.clone());
        for _ in 1..=bound {
            let next = match op {
                CombineOp::Seq => base.seq_capped(&power, cap),
                CombineOp::Par => base.interleave_capped(&power, cap),
            }
            .expect("same signature")?;
            if next.is_empty() {
                break;
            }
            result.elements.extend(next.elements.iter().cloned());
            if result.elements.len() > cap {
                return None;
            }
            power = next;
        }
        Some(result)
    }

    /// Componentwise removal over every element (results are deduplicated).
    pub fn remove_lifeline(&self, h: &Lifeline) -> Result<Self, ModelError> {
        let mut out = Self::new(self.signature.without(h)?);
        for mt in &self.elements {
            out.elements.insert(mt.remove_lifeline(h)?);
        }
        Ok(out)
    }

    pub fn remove_lifelines(&self, hs: &[Lifeline]) -> Result<Self, ModelError> {
        let mut out = Self::new(self.signature.without_all(hs)?);
        for mt in &self.elements {
            out.elements.insert(mt.remove_lifelines(hs)?);
        }
        Ok(out)
    }
}
