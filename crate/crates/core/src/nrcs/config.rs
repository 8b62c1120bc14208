use std::fmt;
use std::sync::Arc;

/// A state name with an optional last-level annotation `ω^i`, written `name@wi`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    name: Arc<str>,
    annotation: Option<u32>,
}

impl Label {
    pub fn new(name: &str) -> Self {
        Label {
            name: Arc::from(name),
            annotation: None,
        }
    }

    pub fn annotated(name: &str, i: u32) -> Self {
        Label {
            name: Arc::from(name),
            annotation: Some(i),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn annotation(&self) -> Option<u32> {
        self.annotation
    }

    /// Same base name, annotation replaced.
    pub fn with_annotation(&self, i: Option<u32>) -> Self {
        Label {
            name: self.name.clone(),
            annotation: i,
        }
    }

    /// Same annotation, base name replaced.
    pub fn renamed(&self, name: &str) -> Self {
        Label {
            name: Arc::from(name),
            annotation: self.annotation,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.annotation {
            Some(i) => write!(f, "{}@w{}", self.name, i),
            None => f.write_str(&self.name),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        super::text::parse_label(s).unwrap_or_else(|_| Label::new(s))
    }
}

/// Child indices from the root; the empty path is the root itself.
pub type NodePath = Vec<usize>;

/// Renders a node path as `/`, `/0`, `/0/2`, …
pub fn render_path(p: &[usize]) -> String {
    if p.is_empty() {
        "/".to_string()
    } else {
        p.iter().map(|i| format!("/{i}")).collect()
    }
}

pub fn parse_path(s: &str) -> Option<NodePath> {
    let s = s.trim();
    if s == "/" {
        return Some(Vec::new());
    }
    s.strip_prefix('/')?
        .split('/')
        .map(|x| x.parse().ok())
        .collect()
}

/// A finite rooted unordered labelled tree kept in canonical form: children
/// are sorted, so isomorphic trees are equal values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    label: Label,
    children: Vec<Config>,
}

impl Config {
    pub fn new(label: Label, mut children: Vec<Config>) -> Self {
        children.sort();
        Config { label, children }
    }

    pub fn leaf(label: Label) -> Self {
        Config {
            label,
            children: Vec::new(),
        }
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn children(&self) -> &[Config] {
        &self.children
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Config::size).sum::<usize>()
    }

    /// Length of the longest root-to-leaf path in edges.
    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| 1 + c.height())
            .max()
            .unwrap_or(0)
    }

    pub fn node(&self, path: &[usize]) -> Option<&Config> {
        let mut n = self;
        for &i in path {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    /// Mutable access without re-sorting; callers must call
    /// [`Config::canonicalize`] afterwards.
    pub(crate) fn node_mut(&mut self, path: &[usize]) -> &mut Config {
        let mut n = self;
        for &i in path {
            n = &mut n.children[i];
        }
        n
    }

    pub(crate) fn set_label(&mut self, l: Label) {
        self.label = l;
    }

    pub(crate) fn children_mut(&mut self) -> &mut Vec<Config> {
        &mut self.children
    }

    pub(crate) fn canonicalize(&mut self) {
        for c in &mut self.children {
            c.canonicalize();
        }
        self.children.sort();
    }

    /// Returns a copy with `child` attached to the node at `path`.
    pub fn with_child_at(&self, path: &[usize], child: Config) -> Config {
        let mut c = self.clone();
        c.node_mut(path).children.push(child);
        c.canonicalize();
        c
    }

    /// Returns a copy with the subtree at `path` removed; `None` for the root.
    pub fn without_subtree(&self, path: &[usize]) -> Option<Config> {
        let (last, parent) = path.split_last()?;
        let mut c = self.clone();
        let p = c.node_mut(parent);
        if *last >= p.children.len() {
            return None;
        }
        p.children.remove(*last);
        c.canonicalize();
        Some(c)
    }

    /// Labels along `path`, root first.
    pub fn path_labels(&self, path: &[usize]) -> Option<Vec<Label>> {
        let mut out = vec![self.label.clone()];
        let mut n = self;
        for &i in path {
            n = n.children.get(i)?;
            out.push(n.label.clone());
        }
        Some(out)
    }

    /// All root-started paths whose labels spell `labels`. Identical sibling
    /// subtrees are reported once, since they give identical steps.
    pub fn matching_paths(&self, labels: &[Label]) -> Vec<NodePath> {
        let mut out = Vec::new();
        if labels.first() == Some(&self.label) {
            let mut cur = Vec::new();
            self.match_rec(&labels[1..], &mut cur, &mut out);
        }
        out
    }

    fn match_rec(&self, rest: &[Label], cur: &mut NodePath, out: &mut Vec<NodePath>) {
        let Some((head, tail)) = rest.split_first() else {
            out.push(cur.clone());
            return;
        };
        for (i, c) in self.children.iter().enumerate() {
            if c.label != *head || (i > 0 && self.children[i - 1] == *c) {
                continue;
            }
            cur.push(i);
            c.match_rec(tail, cur, out);
            cur.pop();
        }
    }

    /// Every label occurring in the tree.
    pub fn labels(&self) -> Vec<Label> {
        let mut v = Vec::new();
        self.collect_labels(&mut v);
        v.sort();
        v.dedup();
        v
    }

    fn collect_labels(&self, v: &mut Vec<Label>) {
        v.push(self.label.clone());
        for c in &self.children {
            c.collect_labels(v);
        }
    }

    /// Number of children carrying `l`.
    pub fn count_children(&self, l: &Label) -> usize {
        self.children.iter().filter(|c| c.label == *l).count()
    }

    /// Applies `f` to every label.
    pub fn map_labels(&self, f: &impl Fn(&Label) -> Label) -> Config {
        Config::new(
            f(&self.label),
            self.children.iter().map(|c| c.map_labels(f)).collect(),
        )
    }
}

impl fmt::Display for Config {
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

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl serde::Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Config {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
