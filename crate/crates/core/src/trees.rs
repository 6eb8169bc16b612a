//! Labeled non-planar rooted trees and forests.
//!
//! Every [`Tree`] value is kept in canonical form: children are sorted by the
//! total order (vertex count, root label, child list), so structural equality
//! is isomorphism of non-planar trees. A [`Forest`] is a multiset of trees
//! stored as sorted `(tree, multiplicity)` pairs; the empty forest is the unit.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::text;

/// A vertex label (generator symbol).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    /// Builds a label, checking the `[a-z][a-z0-9]*` shape.
    pub fn new(name: &str) -> Result<Self> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
        if !ok {
            return Err(Error::InvalidArgument(format!("invalid label `{name}`")));
        }
        Ok(Label(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The finite set of generators trees may be labeled with. Labels are
/// ordered lexicographically, whatever order they were listed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<Label>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut labels = names
            .into_iter()
            .map(|s| Label::new(s.as_ref().trim()))
            .collect::<Result<Vec<_>>>()?;
        labels.sort();
        labels.dedup();
        if labels.is_empty() {
            return Err(Error::InvalidArgument("empty alphabet".into()));
        }
        Ok(Alphabet { labels })
    }

    /// Parses a comma-separated generator list such as `"a,b"`.
    pub fn parse(list: &str) -> Result<Self> {
        Alphabet::new(list.split(',').filter(|s| !s.trim().is_empty()))
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn get(&self, name: &str) -> Option<&Label> {
        self.labels.iter().find(|l| l.as_str() == name)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet {
            labels: vec![Label(Arc::from("a"))],
        }
    }
}

/// A planar rooted tree as written in text, before canonicalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTree {
    pub label: String,
    pub children: Vec<RawTree>,
    /// Byte offset of the label in the source text, for error reporting.
    pub offset: usize,
}

impl RawTree {
    pub fn new(label: &str, children: Vec<RawTree>) -> Self {
        RawTree {
            label: label.to_string(),
            children,
            offset: 0,
        }
    }
}

/// A canonical labeled non-planar rooted tree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    label: Label,
    children: Vec<Tree>,
    size: usize,
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.label.cmp(&other.label))
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Tree {
    /// The one-vertex tree.
    pub fn leaf(label: Label) -> Self {
        Tree {
            label,
            children: Vec::new(),
            size: 1,
        }
    }

    /// A root carrying the given branches; the branches are sorted.
    pub fn new(label: Label, mut children: Vec<Tree>) -> Self {
        children.sort();
        let size = 1 + children.iter().map(|c| c.size).sum::<usize>();
        Tree {
            label,
            children,
            size,
        }
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    /// Root branches, in canonical order.
    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// Vertex count.
    pub fn degree(&self) -> usize {
        self.size
    }

    /// Whether every vertex carries `label`.
    pub fn is_monochrome(&self, label: &Label) -> bool {
        &self.label == label && self.children.iter().all(|c| c.is_monochrome(label))
    }

    /// Root labels in preorder; mostly for tests.
    pub fn labels_preorder(&self) -> Vec<Label> {
        let mut out = vec![self.label.clone()];
        for c in &self.children {
            out.extend(c.labels_preorder());
        }
        out
    }

    fn with_child_inserted(&self, child: Tree) -> Tree {
        let mut children = self.children.clone();
        let pos = children.partition_point(|c| c < &child);
        children.insert(pos, child);
        Tree {
            label: self.label.clone(),
            size: self.size + children[pos].size,
            children,
        }
    }

    fn with_child_replaced(&self, index: usize, child: Tree) -> Tree {
        let mut children = self.children.clone();
        children.remove(index);
        let size = self.size - self.children[index].size + child.size;
        let pos = children.partition_point(|c| c < &child);
        children.insert(pos, child);
        Tree {
            label: self.label.clone(),
            children,
            size,
        }
    }

    /// Every tree obtained by attaching `t` as a new child of one vertex of
    /// `self`, one entry per vertex (coincident results are repeated).
    pub fn graft_each_vertex(&self, t: &Tree) -> Vec<Tree> {
        let mut out = Vec::with_capacity(self.size);
        out.push(self.with_child_inserted(t.clone()));
        for (i, c) in self.children.iter().enumerate() {
            for g in c.graft_each_vertex(t) {
                out.push(self.with_child_replaced(i, g));
            }
        }
        out
    }

    /// All trees obtained by attaching each of `items` as a new child of some
    /// vertex of `self`, one entry per assignment of items to vertices.
    pub fn attach_all(&self, items: &[Tree]) -> Vec<Tree> {
        if items.is_empty() {
            return vec![self.clone()];
        }
        // every item goes either to the root (slot 0) or into branch k (slot k+1)
        let slots = self.children.len() + 1;
        let mut assignment = vec![0usize; items.len()];
        let mut out = Vec::new();
        loop {
            let mut at_root = Vec::new();
            let mut per_child: Vec<Vec<Tree>> = vec![Vec::new(); self.children.len()];
            for (item, &slot) in items.iter().zip(&assignment) {
                if slot == 0 {
                    at_root.push(item.clone());
                } else {
                    per_child[slot - 1].push(item.clone());
                }
            }
            // cartesian product of the branch results
            let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
            for (child, extra) in self.children.iter().zip(&per_child) {
                let options = child.attach_all(extra);
                let mut next = Vec::with_capacity(partial.len() * options.len());
                for p in &partial {
                    for o in &options {
                        let mut q = p.clone();
                        q.push(o.clone());
                        next.push(q);
                    }
                }
                partial = next;
            }
            for mut branches in partial {
                branches.extend(at_root.iter().cloned());
                out.push(Tree::new(self.label.clone(), branches));
            }
            // advance the odometer
            let mut k = 0;
            loop {
                if k == assignment.len() {
                    return out;
                }
                assignment[k] += 1;
                if assignment[k] < slots {
                    break;
                }
                assignment[k] = 0;
                k += 1;
            }
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Turns a planar tree into its canonical non-planar representative,
/// checking labels against the alphabet.
pub fn canonicalize(raw: &RawTree, alphabet: &Alphabet) -> Result<Tree> {
    let label = alphabet
        .get(&raw.label)
        .ok_or_else(|| Error::UnknownLabel {
            label: raw.label.clone(),
            offset: raw.offset,
        })?
        .clone();
    let children = raw
        .children
        .iter()
        .map(|c| canonicalize(c, alphabet))
        .collect::<Result<Vec<_>>>()?;
    Ok(Tree::new(label, children))
}

/// Parses a tree in the `label(child,child,...)` grammar.
pub fn parse_tree(input: &str, alphabet: &Alphabet) -> Result<Tree> {
    let raw = text::parse_raw_tree(input)?;
    canonicalize(&raw, alphabet)
}

/// Canonical text rendering of a tree.
pub fn render_tree(tree: &Tree) -> String {
    tree.to_string()
}

/// The free pre-Lie product of two trees: the sum over the vertices of `s`
/// of `s` with the root of `t` attached to that vertex.
pub fn graft(s: &Tree, t: &Tree) -> Element {
    let mut out = Element::zero();
    for g in s.graft_each_vertex(t) {
        out.add_count(Forest::single(g), 1);
    }
    out
}

/// All canonical trees with `n` vertices labeled from `alphabet`, sorted.
pub fn enumerate_trees(n: usize, alphabet: &Alphabet) -> Vec<Tree> {
    if n == 0 {
        return Vec::new();
    }
    let by_size = trees_up_to(n, alphabet);
    by_size[n].clone()
}

/// All forests of total degree `n` (the empty forest for `n = 0`), sorted.
pub fn enumerate_forests(n: usize, alphabet: &Alphabet) -> Vec<Forest> {
    let by_size = trees_up_to(n.max(1), alphabet);
    let pool: Vec<&Tree> = by_size.iter().flatten().collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    multisets(&pool, 0, n, &mut current, &mut |ms| {
        out.push(Forest::from_trees(ms.iter().map(|t| (*t).clone())));
    });
    out.sort();
    out
}

fn trees_up_to(n: usize, alphabet: &Alphabet) -> Vec<Vec<Tree>> {
    let mut by_size: Vec<Vec<Tree>> = vec![Vec::new(); n + 1];
    for size in 1..=n {
        let pool: Vec<&Tree> = by_size[..size].iter().flatten().collect();
        let mut branch_sets: Vec<Vec<Tree>> = Vec::new();
        let mut current = Vec::new();
        multisets(&pool, 0, size - 1, &mut current, &mut |ms| {
            branch_sets.push(ms.iter().map(|t| (*t).clone()).collect());
        });
        let mut level = Vec::new();
        for label in alphabet.labels() {
            for branches in &branch_sets {
                level.push(Tree::new(label.clone(), branches.clone()));
            }
        }
        level.sort();
        by_size[size] = level;
    }
    by_size
}

/// Calls `emit` with every nondecreasing (by pool index) selection of trees
/// from `pool[start..]` whose degrees sum to `budget`.
fn multisets<'a>(
    pool: &[&'a Tree],
    start: usize,
    budget: usize,
    current: &mut Vec<&'a Tree>,
    emit: &mut dyn FnMut(&[&'a Tree]),
) {
    if budget == 0 {
        emit(current);
        return;
    }
    for i in start..pool.len() {
        let d = pool[i].degree();
        if d <= budget {
            current.push(pool[i]);
            multisets(pool, i, budget - d, current, emit);
            current.pop();
        }
    }
}

/// A multiset of canonical trees, stored as sorted `(tree, multiplicity)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Forest {
    trees: Vec<(Tree, usize)>,
    degree: usize,
}

impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.trees.cmp(&other.trees))
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Forest {
    /// The empty forest, unit of both products.
    pub fn empty() -> Self {
        Forest::default()
    }

    pub fn single(tree: Tree) -> Self {
        Forest {
            degree: tree.degree(),
            trees: vec![(tree, 1)],
        }
    }

    pub fn from_trees<I: IntoIterator<Item = Tree>>(trees: I) -> Self {
        let mut counts: BTreeMap<Tree, usize> = BTreeMap::new();
        for t in trees {
            *counts.entry(t).or_insert(0) += 1;
        }
        Self::from_counts(counts)
    }

    fn from_counts(counts: BTreeMap<Tree, usize>) -> Self {
        let degree = counts.iter().map(|(t, m)| t.degree() * m).sum();
        Forest {
            trees: counts.into_iter().filter(|(_, m)| *m > 0).collect(),
            degree,
        }
    }

    /// Builds a forest from `(tree, multiplicity)` pairs; repeated trees merge.
    pub fn from_multiplicities<I: IntoIterator<Item = (Tree, usize)>>(pairs: I) -> Self {
        let mut counts: BTreeMap<Tree, usize> = BTreeMap::new();
        for (t, m) in pairs {
            *counts.entry(t).or_insert(0) += m;
        }
        Self::from_counts(counts)
    }

    /// Distinct trees with their multiplicities, in canonical order.
    pub fn distinct(&self) -> &[(Tree, usize)] {
        &self.trees
    }

    /// Trees with repetition, in canonical order.
    pub fn iter_trees(&self) -> impl Iterator<Item = &Tree> + '_ {
        self.trees
            .iter()
            .flat_map(|(t, m)| std::iter::repeat_n(t, *m))
    }

    pub fn to_vec(&self) -> Vec<Tree> {
        self.iter_trees().cloned().collect()
    }

    /// Total vertex count.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of trees, counted with multiplicity.
    pub fn len(&self) -> usize {
        self.trees.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// The tree of a one-tree forest.
    pub fn as_single_tree(&self) -> Option<&Tree> {
        match self.trees.as_slice() {
            [(t, 1)] => Some(t),
            _ => None,
        }
    }

    /// Multiset union (the commutative product of monomials).
    pub fn union(&self, other: &Forest) -> Forest {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut trees = Vec::with_capacity(self.trees.len() + other.trees.len());
        let (mut i, mut j) = (0, 0);
        while i < self.trees.len() && j < other.trees.len() {
            match self.trees[i].0.cmp(&other.trees[j].0) {
                Ordering::Less => {
                    trees.push(self.trees[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    trees.push(other.trees[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    trees.push((self.trees[i].0.clone(), self.trees[i].1 + other.trees[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        trees.extend_from_slice(&self.trees[i..]);
        trees.extend_from_slice(&other.trees[j..]);
        Forest {
            trees,
            degree: self.degree + other.degree,
        }
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.iter_trees().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses a forest: trees joined by `.`, or `1` for the empty forest.
pub fn parse_forest(input: &str, alphabet: &Alphabet) -> Result<Forest> {
    let raws = text::parse_raw_forest(input)?;
    let trees = raws
        .iter()
        .map(|r| canonicalize(r, alphabet))
        .collect::<Result<Vec<_>>>()?;
    Ok(Forest::from_trees(trees))
}
